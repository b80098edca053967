use crate::args::*;
use crate::output::{to_value, Cell, Report, Table};
use crate::torus_io;
use kds_spectra::bichar_flow::{
    hamilton_flow, photon_sphere_run, radial_set_rates, trapped_set_locate, Direction, FlowChart, FlowMode,
    FlowOptions, HorizonSel, PhasePoint,
};
use kds_spectra::constraints::{
    cauchy_data_map, constraint_residual, lichnerowicz_solve_with, random_tt, ConformalBackground, InitialDataSet,
    LichOptions, LichnerowiczInput, SliceGrid, TorusGrid,
};
use kds_spectra::ds_model::{
    build_operator, indicial_roots, scp_scan, verify_pure_gauge, verify_resonance_list, HalfPlane,
};
use kds_spectra::metric_family::{find_horizons, ricci_fd, upsilon_eval, BlackHoleParams, Chart, Kds};
use kds_spectra::nash_moser::{run_nash_moser, NmTrace, QuadraticModel, Schedule, ToyOde};
use kds_spectra::numeric::exact::Q;
use kds_spectra::numeric::ode::Control;
use kds_spectra::symbol_calculus::{
    radial_expected, radial_subpr_eigenvalues, trapped_charpoly, trapped_charpoly_expected, trapped_eigenvalues,
    vector_l1_identity, TrappedParams, RADIAL_LABELS,
};
use kds_spectra::{verify, KdsError, Result};
use serde_json::json;

fn kds(bh: &BlackHole) -> Result<Kds> {
    Kds::new(BlackHoleParams::kds(bh.lambda, bh.mass, bh.a))
}

fn chart(c: ChartArg) -> Chart {
    match c {
        ChartArg::Star => Chart::Star,
        ChartArg::NuForm => Chart::NuForm,
        ChartArg::BoyerLindquist => Chart::BoyerLindquist,
        ChartArg::Cartesian => Chart::Cartesian,
    }
}

fn q(s: &str) -> Q {
    s.parse().expect("validated by the argument parser")
}

fn flat(m: &[[f64; 4]; 4]) -> impl Iterator<Item = Cell> + '_ {
    m.iter().flatten().map(|&x| Cell::Num(x))
}

fn matrix_header(prefix: &str) -> Vec<String> {
    (0..4).flat_map(|i| (0..4).map(move |j| format!("{prefix}{i}{j}"))).collect()
}

fn header(fixed: &[&str], extra: Vec<String>) -> Table {
    let mut t = Table::new(fixed);
    t.header.extend(extra);
    t
}

pub fn run(cmd: &Command, seed: u64) -> Result<Report> {
    match cmd {
        Command::Horizons(a) => horizons(a),
        Command::Metric(a) => metric(a),
        Command::RicciCheck(a) => ricci(a),
        Command::Upsilon(a) => upsilon(a),
        Command::Flow(a) => flow(a),
        Command::Trap(a) => trap(a),
        Command::RadialRates(a) => radial(a),
        Command::Subpr(a) => subpr(a),
        Command::L1check(a) => l1(a),
        Command::DsIndicial(a) => ds_indicial(a),
        Command::DsVerifyResonances(a) => ds_resonances(a),
        Command::DsScpScan(a) => ds_scan(a),
        Command::LichSolve(a) => lich(a, seed),
        Command::ConstraintCheck(a) => constraint(a),
        Command::CauchyData(a) => cauchy(a),
        Command::NashMoser(a) => nash_moser(a, seed),
        Command::Verify(a) => verify_cmd(a, seed),
    }
}

fn horizons(a: &BlackHole) -> Result<Report> {
    let h = if a.a == 0.0 { find_horizons(&BlackHoleParams::sds(a.lambda, a.mass))? } else { kds(a)?.horizons };
    let mut t = Table::new(&["rMinus", "rPlus", "kappaMinus", "kappaPlus", "betaMinus", "betaPlus", "rCrit", "cStar"]);
    t.push(vec![
        h.r_minus.into(),
        h.r_plus.into(),
        h.kappa_minus.into(),
        h.kappa_plus.into(),
        h.beta_minus.into(),
        h.beta_plus.into(),
        h.r_crit.into(),
        h.c_star.into(),
    ]);
    Ok(Report::new(to_value(&h), t))
}

fn metric(a: &MetricArgs) -> Result<Report> {
    let m = kds(&a.bh)?.eval_metric(chart(a.chart), a.at)?;
    let mut t = header(&["chart"], matrix_header("g"));
    let mut row = vec![Cell::from(chart(a.chart).name())];
    row.extend(flat(&m.g_cov));
    t.push(row);
    Ok(Report::new(to_value(&m), t))
}

fn ricci(a: &RicciArgs) -> Result<Report> {
    let k = kds(&a.bh)?;
    let reports = a.at.iter().map(|&p| ricci_fd(&k, chart(a.chart), p, a.step)).collect::<Result<Vec<_>>>()?;
    let worst = reports.iter().fold(0.0f64, |m, r| m.max(r.residual_max));
    let ok = worst < a.tol;
    let mut t = Table::new(&["p0", "p1", "p2", "p3", "residualMax", "richardsonDisagreement"]);
    for r in &reports {
        let mut row: Vec<Cell> = r.point.iter().map(|&x| x.into()).collect();
        row.push(r.residual_max.into());
        row.push(r.richardson_disagreement.into());
        t.push(row);
    }
    let v = json!({ "points": to_value(&reports), "worstResidual": worst, "tolerance": a.tol, "pass": ok });
    Ok(Report::new(v, t).with_ok(ok))
}

fn upsilon(a: &UpsilonArgs) -> Result<Report> {
    let k = kds(&a.bh)?;
    let bg = Kds::new(BlackHoleParams::kds(a.bh.lambda, a.bg_mass.unwrap_or(a.bh.mass), a.bg_a.unwrap_or(a.bh.a)))?;
    let c = chart(a.chart);
    k.eval_metric(c, a.at)?;
    bg.eval_metric(c, a.at)?;
    let g = k.metric_sampler(c);
    let b = bg.metric_sampler(c);
    let u = upsilon_eval(&g, &b, &a.at, a.step);
    let comps: Vec<f64> = u.iter().copied().collect();
    let mut t = Table::new(&["u0", "u1", "u2", "u3"]);
    t.push(comps.iter().map(|&x| x.into()).collect());
    Ok(Report::new(json!({ "chart": c, "point": a.at, "upsilon": comps }), t))
}

fn flow(a: &FlowArgs) -> Result<Report> {
    let k = kds(&a.bh)?;
    let fc = match a.chart {
        FlowChartArg::Static => FlowChart::Static,
        FlowChartArg::NuForm => FlowChart::NuForm,
        FlowChartArg::Star => FlowChart::Star,
    };
    let mode = match a.mode {
        FlowModeArg::Plain => FlowMode::Plain,
        FlowModeArg::Rescaled => FlowMode::Rescaled,
    };
    let start = PhasePoint { chart: fc, base: a.start, cov: a.cov };
    let opts = FlowOptions { mode, record_every: a.record_every.max(1), ..FlowOptions::default() };
    let tr = hamilton_flow(&k, &start, a.until, opts, |_| Control::Continue)?;
    let mut t = Table::new(&["s", "t", "r", "theta", "phi", "sigma", "xi", "etaTheta", "etaPhi", "logXi", "g"]);
    for s in &tr.samples {
        let mut row = vec![Cell::Num(s.s)];
        row.extend(s.base.iter().chain(&s.cov).map(|&x| Cell::Num(x)));
        row.push(s.log_xi.into());
        row.push(s.g.into());
        t.push(row);
    }
    Ok(Report::new(to_value(&tr), t))
}

fn trap(a: &TrapArgs) -> Result<Report> {
    let k = kds(&a.bh)?;
    let r_p = trapped_set_locate(&k)?;
    let run = photon_sphere_run(&k, a.window, a.offset)?;
    let mut t = Table::new(&["rP", "window", "maxDeviation", "exitTime", "lyapunov"]);
    t.push(vec![r_p.into(), run.window.into(), run.max_deviation.into(), run.exit_time.into(), run.lyapunov.into()]);
    Ok(Report::new(json!({ "rP": r_p, "threeM": 3.0 * a.bh.mass, "run": to_value(&run) }), t))
}

fn radial(a: &RadialArgs) -> Result<Report> {
    let k = kds(&a.bh)?;
    let hz = match a.horizon {
        HorizonArg::Plus => HorizonSel::Plus,
        HorizonArg::Minus => HorizonSel::Minus,
    };
    let dir = match a.direction {
        DirectionArg::Future => Direction::Future,
        DirectionArg::Past => Direction::Past,
    };
    let r = radial_set_rates(&k, hz, dir, a.theta)?;
    let mut t = Table::new(&["rateRhohat", "rateTau", "rateRho0", "expectedBeta0", "expectedBeta0Beta", "fitRms"]);
    t.push(vec![
        r.rate_rhohat.into(),
        r.rate_tau.into(),
        r.rate_rho0.into(),
        r.expected_beta0.into(),
        r.expected_beta0_beta.into(),
        r.fit_rms.into(),
    ]);
    Ok(Report::new(to_value(&r), t))
}

fn subpr(a: &SubprArgs) -> Result<Report> {
    match a.at {
        WhereArg::Trapped => {
            let p = TrappedParams {
                gamma1: a.gamma1,
                gamma2: a.gamma2,
                r: a.r,
                alpha: a.alpha,
                sigma: a.sigma,
                fprime: a.fprime,
            };
            let ev = trapped_eigenvalues(&p);
            let got = trapped_charpoly(&p);
            let want = trapped_charpoly_expected(&p);
            let err = got.iter().zip(&want).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
            let mut t = Table::new(&["index", "re", "im"]);
            for (i, z) in ev.iter().enumerate() {
                t.push(vec![i.into(), z.re.into(), z.im.into()]);
            }
            let v = json!({
                "where": "trapped",
                "eigenvalues": ev.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
                "charpoly": got,
                "charpolyExpected": want,
                "maxCoefficientError": err,
            });
            Ok(Report::new(v, t))
        }
        WhereArg::Radial => {
            let ev = radial_subpr_eigenvalues(a.gamma1, a.gamma2, a.kappa, a.cpm, a.sign);
            let want = radial_expected(a.gamma1, a.gamma2, a.kappa);
            let err = ev.iter().zip(&want).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
            let mut t = Table::new(&["label", "eigenvalue", "expected"]);
            for ((l, x), y) in RADIAL_LABELS.iter().zip(&ev).zip(&want) {
                t.push(vec![(*l).into(), (*x).into(), (*y).into()]);
            }
            let v = json!({
                "where": "radial",
                "labels": RADIAL_LABELS,
                "eigenvalues": ev,
                "expected": want,
                "maxError": err,
            });
            Ok(Report::new(v, t))
        }
    }
}

fn l1(a: &L1Args) -> Result<Report> {
    if a.points < 2 {
        return Err(KdsError::InvalidParams("need at least 2 sample radii".into()));
    }
    let h = find_horizons(&BlackHoleParams::sds(a.lambda, a.mass))?;
    let grid: Vec<f64> =
        (0..a.points).map(|i| h.r_minus + (h.r_plus - h.r_minus) * (i as f64 + 0.5) / a.points as f64).collect();
    let rep = vector_l1_identity(a.lambda, a.mass, &grid)?;
    let expected = -6.0 * a.mass;
    let ok = (rep.c - expected).abs() < a.tol;
    let mut t = Table::new(&["r", "c"]);
    for &(r, c) in &rep.samples {
        t.push(vec![r.into(), c.into()]);
    }
    let v = json!({ "report": to_value(&rep), "expected": expected, "tolerance": a.tol, "pass": ok });
    Ok(Report::new(v, t).with_ok(ok))
}

fn ds_indicial(a: &DsIndicialArgs) -> Result<Report> {
    let gammas = a.gamma1.as_deref().zip(a.gamma2.as_deref()).map(|(x, y)| (q(x), q(y)));
    let op = build_operator(&a.op, a.n, gammas)?;
    let half = match a.half_plane {
        HalfPlaneArg::All => HalfPlane::All,
        HalfPlaneArg::ClosedUpper => HalfPlane::ClosedUpper,
        HalfPlaneArg::OpenLower => HalfPlane::OpenLower,
    };
    let roots = indicial_roots(&op, half);
    let v = to_value(&roots);
    let mut t = Table::new(&["exact", "re", "im", "subspace", "rank", "multiplicity", "order"]);
    for (r, j) in roots.iter().zip(v.as_array().expect("roots serialize as an array")) {
        let exact = j.get("sigmaExact").or_else(|| j.get("sigma_exact")).and_then(|e| e.as_str()).unwrap_or("");
        t.push(vec![
            exact.into(),
            r.sigma_re.into(),
            r.sigma_im.into(),
            r.subspace.clone().into(),
            r.rank.into(),
            r.algebraic_multiplicity.into(),
            r.order.into(),
        ]);
    }
    Ok(Report::new(json!({ "operator": a.op, "n": a.n, "roots": v }), t))
}

fn ds_resonances(a: &DsResonanceArgs) -> Result<Report> {
    let rep = verify_resonance_list(a.n, q(&a.gamma1), q(&a.gamma2))?;
    let pg = verify_pure_gauge(a.n)?;
    let ok = rep.passed && pg.passed;
    let mut t = Table::new(&["group", "name", "passed", "maxResidual", "detail"]);
    for (g, c) in rep.checks.iter().map(|c| ("resonance", c)).chain(pg.checks.iter().map(|c| ("pure-gauge", c))) {
        t.push(vec![
            g.into(),
            c.name.clone().into(),
            c.passed.to_string().into(),
            c.max_residual.into(),
            c.detail.clone().into(),
        ]);
    }
    let v = json!({ "resonances": to_value(&rep), "pureGauge": to_value(&pg), "pass": ok });
    Ok(Report::new(v, t).with_ok(ok))
}

fn ds_scan(a: &DsScanArgs) -> Result<Report> {
    if a.lo >= a.hi {
        return Err(KdsError::InvalidParams(format!("empty range [{}, {}]", a.lo, a.hi)));
    }
    let s = scp_scan(a.n, a.grid, a.lo, a.hi)?;
    let ok = s.mismatches == 0;
    let mut t = Table::new(&["gamma1", "gamma2", "allRootsLower", "criterion", "maxImSigma"]);
    for p in &s.points {
        t.push(vec![
            p.gamma1.into(),
            p.gamma2.into(),
            p.all_roots_lower.to_string().into(),
            p.criterion.to_string().into(),
            p.max_im_sigma.into(),
        ]);
    }
    Ok(Report::new(to_value(&s), t).with_ok(ok))
}

fn lich(a: &LichArgs, seed: u64) -> Result<Report> {
    let grid = TorusGrid::new(a.grid)?;
    let bg = ConformalBackground::flat(&grid, a.lambda)?;
    let qseed = a.qtilde_seed.unwrap_or(seed);
    let inp = LichnerowiczInput { h: a.h, qtilde: random_tt(&grid, qseed, a.kmax, a.amplitude), lambda: a.lambda };
    let sol =
        lichnerowicz_solve_with(&inp, &bg, LichOptions { tol: a.tol, newton: a.newton, ..LichOptions::default() })?;
    let mut files = serde_json::Value::Null;
    if let Some(prefix) = &a.out {
        let data = sol.initial_data(&inp, &bg)?;
        let (hp, bp) = torus_io::write(prefix, &data, a.lambda, &sol.z)?;
        files = json!({ "header": hp.display().to_string(), "binary": bp.display().to_string() });
    }
    let mut t = Table::new(&["iteration", "residual"]);
    for (i, r) in sol.residual_history.iter().enumerate() {
        t.push(vec![i.into(), (*r).into()]);
    }
    let v = json!({
        "gridShape": [a.grid, a.grid, a.grid],
        "qtildeSeed": qseed,
        "iterations": sol.iterations,
        "residual": sol.residual,
        "residualHistory": sol.residual_history,
        "psiSup": sol.psi_sup,
        "dataSize": sol.data_size,
        "zCoeffs": sol.z_coeffs,
        "kernelDimension": bg.kernel.len(),
        "files": files,
    });
    Ok(Report::new(v, t))
}

fn constraint(a: &ConstraintArgs) -> Result<Report> {
    let stored = torus_io::read(&a.input)?;
    let lambda = a.lambda.unwrap_or(stored.lambda);
    let res = constraint_residual(&InitialDataSet::Torus(stored.data), lambda, 3)?;
    // Σ: nodes where the kernel correction vanishes to round-off
    let zmax = stored.z.as_ref().map_or(0.0, |z| z.iter().fold(0.0f64, |m, x| m.max(x.abs())));
    let keep = |i: usize| stored.z.as_ref().map_or(true, |z| zmax == 0.0 || z[i].abs() < 1e-12 * zmax);
    let (ham, mom) = res.max_on(keep);
    let nodes = (0..res.hamiltonian.len()).filter(|&i| keep(i)).count();
    let ok = ham.max(mom) < a.tol;
    let mut t = Table::new(&["region", "nodes", "hamiltonianMax", "momentumMax"]);
    t.push(vec!["all".into(), res.hamiltonian.len().into(), res.hamiltonian_max.into(), res.momentum_max.into()]);
    t.push(vec!["sigma".into(), nodes.into(), ham.into(), mom.into()]);
    let v = json!({
        "lambda": lambda,
        "hamiltonianMax": res.hamiltonian_max,
        "momentumMax": res.momentum_max,
        "sigmaNodes": nodes,
        "sigmaHamiltonianMax": ham,
        "sigmaMomentumMax": mom,
        "tolerance": a.tol,
        "pass": ok,
    });
    Ok(Report::new(v, t).with_ok(ok))
}

fn cauchy(a: &CauchyArgs) -> Result<Report> {
    let k = kds(&a.bh)?;
    let c = chart(a.chart);
    let (hf, kf) = k.induced_samplers(c, a.t, a.step);
    let grid = SliceGrid { chart: c, t: a.t, nodes: a.node.clone(), step: a.step };
    let cd = cauchy_data_map(&k, &hf, &kf, &grid)?;
    let mut cols = matrix_header("g0_");
    cols.extend(matrix_header("g1_"));
    let mut t = header(&["y0", "y1", "y2"], cols);
    for (i, y) in cd.nodes.iter().enumerate() {
        let mut row: Vec<Cell> = y.iter().map(|&x| x.into()).collect();
        row.extend(flat(&cd.g0[i]));
        row.extend(flat(&cd.g1[i]));
        t.push(row);
    }
    Ok(Report::new(to_value(&cd), t))
}

fn trace_table(tr: &NmTrace) -> Table {
    let mut t = Table::new(&["iteration", "theta", "residual", "stepNorm"]);
    for s in &tr.steps {
        t.push(vec![s.iteration.into(), s.theta.into(), s.residual.into(), s.step_norm.into()]);
    }
    t.push(vec![tr.iterations.into(), Cell::Empty, tr.final_residual.into(), Cell::Empty]);
    t
}

fn nash_moser(a: &NashMoserArgs, seed: u64) -> Result<Report> {
    let base = match a.problem {
        ProblemArg::ToyOde => Schedule::default(),
        ProblemArg::Quadratic => QuadraticModel::schedule(),
    };
    let mut sched = Schedule {
        theta0: a.theta0.unwrap_or(base.theta0),
        rho: a.rho.unwrap_or(base.rho),
        max_iter: a.max_iter.unwrap_or(base.max_iter),
        tol: a.tol.unwrap_or(base.tol),
        smallness: a.smallness.unwrap_or(base.smallness),
        ..base
    };
    if let Some(s) = a.substeps {
        sched = sched.refined(s);
        if let Some(m) = a.max_iter {
            sched.max_iter = m;
        }
    }
    let (trace, extra) = match a.problem {
        ProblemArg::ToyOde => {
            let toy = ToyOde::with_data_size(a.data_size);
            let out = run_nash_moser(&toy.problem(), &sched)?;
            let m = toy.data_modification(&out.u);
            let extra = json!({
                "collocationError": toy.collocation_error(&out.u, 200, seed),
                "dataModification": m,
                "modificationCoefficient": out.u[0],
                "decayRate": toy.decay_rate(&out.u),
            });
            (out.trace, extra)
        }
        ProblemArg::Quadratic => {
            let model = QuadraticModel::new(a.grid, a.data_size, seed);
            let out = run_nash_moser(&model.problem(), &sched)?;
            let exact = model.closed_form();
            let err = out.u.iter().zip(&exact).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
            (out.trace, json!({ "closedFormError": err }))
        }
    };
    let table = trace_table(&trace);
    if let Some(path) = &a.trace_csv {
        std::fs::write(path, table.to_csv())
            .map_err(|e| KdsError::InvalidParams(format!("{}: {e}", path.display())))?;
    }
    let v = json!({ "schedule": to_value(&sched), "trace": to_value(&trace), "solution": extra });
    Ok(Report::new(v, table))
}

fn rows_table(rows: &[verify::CheckRow]) -> Table {
    let mut t = Table::new(&["checkName", "paperAnchor", "status", "measured", "expected", "tolerance", "detail"]);
    for r in rows {
        t.push(vec![
            r.check_name.clone().into(),
            r.paper_anchor.clone().into(),
            to_value(&r.status).as_str().unwrap_or_default().to_string().into(),
            r.measured.into(),
            r.expected.into(),
            r.tolerance.into(),
            r.detail.clone().into(),
        ]);
    }
    t
}

fn verify_cmd(a: &VerifyArgs, seed: u64) -> Result<Report> {
    if a.list {
        let names = verify::check_names();
        let mut t = Table::new(&["checkName"]);
        for n in &names {
            t.push(vec![(*n).into()]);
        }
        return Ok(Report::new(json!({ "checks": names }), t));
    }
    let rows = if a.all {
        verify::run_all(seed)
    } else {
        let mut names = a.check.clone();
        names.sort();
        names.dedup();
        names.iter().filter_map(|n| verify::run_check(n, seed)).collect()
    };
    let failures = rows.iter().filter(|r| !r.passed()).count();
    let v = json!({ "rows": to_value(&rows), "failures": failures });
    Ok(Report::new(v, rows_table(&rows)).with_ok(failures == 0))
}
