use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "kds", version, about = "Kerr–de Sitter spectral toolkit", propagate_version = true)]
pub struct Cli {
    /// Emit a flat CSV table instead of JSON.
    #[arg(long, global = true)]
    pub csv: bool,
    /// Seed for randomized inputs.
    #[arg(long, global = true, default_value_t = 7)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Horizon radii, surface gravities and related constants.
    Horizons(BlackHole),
    /// Metric and inverse metric at a point.
    Metric(MetricArgs),
    /// Finite-difference residual of Ric(g) + Λg at one or more points.
    RicciCheck(RicciArgs),
    /// Gauge 1-form of the metric relative to a background member of the family.
    Upsilon(UpsilonArgs),
    /// Null-bicharacteristic trajectory.
    Flow(FlowArgs),
    /// Photon sphere location and a trapped trajectory.
    Trap(TrapArgs),
    /// Fitted contraction rates at a radial set.
    RadialRates(RadialArgs),
    /// Subprincipal eigenvalues and characteristic polynomials.
    Subpr(SubprArgs),
    /// The l = 1 vector identity r d(f/r) = C r⁻³ ⋆1.
    L1check(L1Args),
    /// Indicial roots of a de Sitter model operator.
    DsIndicial(DsIndicialArgs),
    /// Exact resonance list and pure-gauge identities on de Sitter.
    DsVerifyResonances(DsResonanceArgs),
    /// Stability scan of the constraint-propagation indicial polynomials.
    DsScpScan(DsScanArgs),
    /// Conformal-method solve on the flat torus.
    LichSolve(LichArgs),
    /// Constraint residuals of a stored initial data set.
    ConstraintCheck(ConstraintArgs),
    /// Gauged Cauchy data of the background on a slice.
    CauchyData(CauchyArgs),
    /// Nash–Moser iteration on a model problem.
    NashMoser(NashMoserArgs),
    /// Acceptance checks.
    Verify(VerifyArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Horizons(_) => "horizons",
            Command::Metric(_) => "metric",
            Command::RicciCheck(_) => "ricci-check",
            Command::Upsilon(_) => "upsilon",
            Command::Flow(_) => "flow",
            Command::Trap(_) => "trap",
            Command::RadialRates(_) => "radial-rates",
            Command::Subpr(_) => "subpr",
            Command::L1check(_) => "l1check",
            Command::DsIndicial(_) => "ds-indicial",
            Command::DsVerifyResonances(_) => "ds-verify-resonances",
            Command::DsScpScan(_) => "ds-scp-scan",
            Command::LichSolve(_) => "lich-solve",
            Command::ConstraintCheck(_) => "constraint-check",
            Command::CauchyData(_) => "cauchy-data",
            Command::NashMoser(_) => "nash-moser",
            Command::Verify(_) => "verify",
        }
    }

    pub fn params(&self) -> serde_json::Value {
        let v = match self {
            Command::Horizons(a) => serde_json::to_value(a),
            Command::Metric(a) => serde_json::to_value(a),
            Command::RicciCheck(a) => serde_json::to_value(a),
            Command::Upsilon(a) => serde_json::to_value(a),
            Command::Flow(a) => serde_json::to_value(a),
            Command::Trap(a) => serde_json::to_value(a),
            Command::RadialRates(a) => serde_json::to_value(a),
            Command::Subpr(a) => serde_json::to_value(a),
            Command::L1check(a) => serde_json::to_value(a),
            Command::DsIndicial(a) => serde_json::to_value(a),
            Command::DsVerifyResonances(a) => serde_json::to_value(a),
            Command::DsScpScan(a) => serde_json::to_value(a),
            Command::LichSolve(a) => serde_json::to_value(a),
            Command::ConstraintCheck(a) => serde_json::to_value(a),
            Command::CauchyData(a) => serde_json::to_value(a),
            Command::NashMoser(a) => serde_json::to_value(a),
            Command::Verify(a) => serde_json::to_value(a),
        };
        v.expect("argument structs serialize")
    }
}

fn parse_list<const N: usize>(s: &str) -> Result<[f64; N], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != N {
        return Err(format!("expected {N} comma-separated numbers, got {}", parts.len()));
    }
    let mut out = [0.0; N];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = p.parse::<f64>().map_err(|e| format!("{p:?}: {e}"))?;
        if !o.is_finite() {
            return Err(format!("{p:?} is not finite"));
        }
    }
    Ok(out)
}

fn parse4(s: &str) -> Result<[f64; 4], String> {
    parse_list::<4>(s)
}

fn parse3(s: &str) -> Result<[f64; 3], String> {
    parse_list::<3>(s)
}

fn parse_rational(s: &str) -> Result<String, String> {
    s.trim()
        .parse::<kds_spectra::numeric::exact::Q>()
        .map(|q| q.to_string())
        .map_err(|e| format!("{s:?} is not a rational number: {e}"))
}

fn check_name_parser() -> clap::builder::PossibleValuesParser {
    let names: Vec<&'static str> =
        kds_spectra::verify::check_names().into_iter().filter(|n| *n != kds_spectra::verify::SUITE_ROW).collect();
    clap::builder::PossibleValuesParser::new(names)
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BlackHole {
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub mass: f64,
    /// Rotation parameter, about the z axis.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub a: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChartArg {
    Star,
    NuForm,
    BoyerLindquist,
    Cartesian,
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MetricArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub bh: BlackHole,
    #[arg(long, value_enum, default_value = "star")]
    pub chart: ChartArg,
    /// Point `t,r,θ,φ` (or `t,x,y,z` in the Cartesian chart).
    #[arg(long, value_parser = parse4, allow_hyphen_values = true)]
    pub at: [f64; 4],
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RicciArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub bh: BlackHole,
    #[arg(long, value_enum, default_value = "star")]
    pub chart: ChartArg,
    /// Evaluation point; repeat for several.
    #[arg(long, value_parser = parse4, allow_hyphen_values = true, required = true)]
    pub at: Vec<[f64; 4]>,
    #[arg(long, default_value_t = 1e-3)]
    pub step: f64,
    /// Pass threshold for the largest residual entry.
    #[arg(long, default_value_t = 1e-5)]
    pub tol: f64,
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct UpsilonArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub bh: BlackHole,
    /// Background mass; defaults to the metric's.
    #[arg(long)]
    pub bg_mass: Option<f64>,
    /// Background rotation; defaults to the metric's.
    #[arg(long, allow_hyphen_values = true)]
    pub bg_a: Option<f64>,
    #[arg(long, value_enum, default_value = "star")]
    pub chart: ChartArg,
    #[arg(long, value_parser = parse4, allow_hyphen_values = true)]
    pub at: [f64; 4],
    #[arg(long, default_value_t = 1e-3)]
    pub step: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FlowChartArg {
    Static,
    NuForm,
    Star,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FlowModeArg {
    Plain,
    Rescaled,
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FlowArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub bh: BlackHole,
    #[arg(long, value_enum, default_value = "star")]
    pub chart: FlowChartArg,
    /// Base point `t,r,θ,φ`.
    #[arg(long, value_parser = parse4, allow_hyphen_values = true)]
    pub start: [f64; 4],
    /// Covector `σ,ξ,η_θ,η_φ`.
    #[arg(long, value_parser = parse4, allow_hyphen_values = true)]
    pub cov: [f64; 4],
    #[arg(long)]
    pub until: f64,
    #[arg(long, value_enum, default_value = "rescaled")]
    pub mode: FlowModeArg,
    #[arg(long, default_value_t = 1)]
    pub record_every: usize,
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TrapArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub bh: BlackHole,
    /// Length of the trapped trajectory.
    #[arg(long, default_value_t = 60.0)]
    pub window: f64,
    /// Initial radial offset from the photon sphere.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub offset: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HorizonArg {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DirectionArg {
    Future,
    Past,
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RadialArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub bh: BlackHole,
    #[arg(long, value_enum, default_value = "plus")]
    pub horizon: HorizonArg,
    #[arg(long, value_enum, default_value = "future")]
    pub direction: DirectionArg,
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2)]
    pub theta: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WhereArg {
    Trapped,
    Radial,
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SubprArgs {
    #[arg(long = "where", value_enum)]
    pub at: WhereArg,
    #[arg(long, allow_hyphen_values = true)]
    pub gamma1: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub gamma2: f64,
    /// Trapped set: radius.
    #[arg(long, default_value_t = 0.3)]
    pub r: f64,
    /// Trapped set: lapse α.
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    /// Trapped set: frequency σ.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub sigma: f64,
    /// Trapped set: F′ at the trapped radius.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub fprime: f64,
    /// Radial set: surface gravity.
    #[arg(long, default_value_t = 0.7604)]
    pub kappa: f64,
    /// Radial set: the free coefficient c_±.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub cpm: f64,
    /// Radial set: +1 for r₊, −1 for r₋.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub sign: f64,
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct L1Args {
    #[arg(long)]
    pub lambda: f64,
    #[arg(long)]
    pub mass: f64,
    /// Number of radii sampled in (r₋, r₊).
    #[arg(long, default_value_t = 12)]
    pub points: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HalfPlaneArg {
    All,
    ClosedUpper,
    OpenLower,
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DsIndicialArgs {
    /// Operator name, one of the de Sitter model operators.
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(kds_spectra::ds_model::OPERATOR_NAMES))]
    pub op: String,
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    /// Rational γ₁ for the modified operators, e.g. `2` or `-3/2`.
    #[arg(long, value_parser = parse_rational, allow_hyphen_values = true, requires = "gamma2")]
    pub gamma1: Option<String>,
    #[arg(long, value_parser = parse_rational, allow_hyphen_values = true, requires = "gamma1")]
    pub gamma2: Option<String>,
    #[arg(long, value_enum, default_value = "all")]
    pub half_plane: HalfPlaneArg,
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DsResonanceArgs {
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[arg(long, value_parser = parse_rational, allow_hyphen_values = true, default_value = "2")]
    pub gamma1: String,
    #[arg(long, value_parser = parse_rational, allow_hyphen_values = true, default_value = "1")]
    pub gamma2: String,
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DsScanArgs {
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    /// Points per axis.
    #[arg(long, default_value_t = 50)]
    pub grid: usize,
    #[arg(long, default_value_t = -4, allow_hyphen_values = true)]
    pub lo: i64,
    #[arg(long, default_value_t = 4, allow_hyphen_values = true)]
    pub hi: i64,
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LichArgs {
    /// Mean curvature.
    #[arg(long = "H", default_value_t = 0.02, allow_hyphen_values = true)]
    pub h: f64,
    /// Seed of the random TT tensor; defaults to `--seed`.
    #[arg(long)]
    pub qtilde_seed: Option<u64>,
    /// Sup norm of the random TT tensor.
    #[arg(long, default_value_t = 0.05)]
    pub amplitude: f64,
    /// Largest wave number in the TT tensor.
    #[arg(long, default_value_t = 2)]
    pub kmax: i32,
    #[arg(long, default_value_t = 3.0, allow_hyphen_values = true)]
    pub lambda: f64,
    /// Nodes per axis.
    #[arg(long, default_value_t = 32)]
    pub grid: usize,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    /// Newton steps instead of the contraction.
    #[arg(long)]
    pub newton: bool,
    /// Writes `<out>.json` and `<out>.bin` with the initial data.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ConstraintArgs {
    /// Header file written by `lich-solve --out`.
    #[arg(long)]
    pub input: PathBuf,
    /// Overrides Λ recorded in the header.
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<f64>,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CauchyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub bh: BlackHole,
    #[arg(long, value_enum, default_value = "star")]
    pub chart: ChartArg,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub t: f64,
    /// Slice node `r,θ,φ`; repeat for several.
    #[arg(long, value_parser = parse3, allow_hyphen_values = true, required = true)]
    pub node: Vec<[f64; 3]>,
    #[arg(long, default_value_t = 1e-3)]
    pub step: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProblemArg {
    ToyOde,
    Quadratic,
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct NashMoserArgs {
    #[arg(long, value_enum, default_value = "toy-ode")]
    pub problem: ProblemArg,
    #[arg(long, default_value_t = 1e-3, allow_hyphen_values = true)]
    pub data_size: f64,
    /// Grid size of the quadratic model.
    #[arg(long, default_value_t = 64)]
    pub grid: usize,
    #[arg(long)]
    pub theta0: Option<f64>,
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub substeps: Option<u32>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub smallness: Option<f64>,
    /// Also write the residual trace as CSV to this file.
    #[arg(long)]
    pub trace_csv: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "camelCase")]
#[command(group(clap::ArgGroup::new("which").required(true).args(["all", "check", "list"])))]
pub struct VerifyArgs {
    /// Run every check.
    #[arg(long)]
    pub all: bool,
    /// Run the named check; repeat for several.
    #[arg(long, value_parser = check_name_parser())]
    pub check: Vec<String>,
    /// List check names and anchors without running them.
    #[arg(long)]
    pub list: bool,
}
