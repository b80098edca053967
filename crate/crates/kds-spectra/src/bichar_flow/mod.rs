//! Null-bicharacteristic flow of the dual metric function.
//!
//! Covectors are written `−σ dt + ξ dr + η_θ dθ + η_φ dφ`, so the stored
//! momentum component along `dt` is `−σ`. Four charts are available:
//!
//! - [`FlowChart::Static`]: the static chart (a = 0), with closed-form derivatives.
//! - [`FlowChart::NuForm`]: the chart in which `|dt*|²` is constant (a = 0).
//! - [`FlowChart::Star`]: the horizon-crossing chart, any `a`.
//! - [`FlowChart::T0`]: the chart adapted to one horizon, used for radial sets.

mod flow;
mod radial;
mod trapped;

pub use flow::{
    dual_matrix, dual_metric_fn, hamilton_flow, FlowChart, FlowDiagnostics, FlowMode, FlowOptions, FlowSample,
    PhasePoint, Trajectory,
};
pub use radial::{radial_set_rates, Direction, HorizonSel, RadialRates};
pub use trapped::{photon_sphere_run, static_hamilton_field, trapped_set_locate, PhotonSphereRun};
