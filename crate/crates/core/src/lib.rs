//! Nonlinear coherent states, fan-states and higher-order amplitude squeezing
//! in a truncated Fock space.
//!
//! The crate is organised bottom-up:
//!
//! - [`fock`]: state vectors, normally ordered moments, quadrature operators.
//! - [`states`]: NCS / KNCS / symmetric-even / fan-state builders and the
//!   decomposition and rotation identities.
//! - [`squeezing`]: Hong–Mandel `N`th-order squeezing, numeric and closed form.
//! - [`uncertainty`]: the uncertainty area over all quadrature directions.
//! - [`analysis`]: critical and optimal amplitudes, squeezing directions and
//!   the minimum squeezing order.
//! - [`search`]: the one-dimensional root finding and minimization used by
//!   [`analysis`].

pub mod analysis;
pub mod error;
pub mod fock;
pub mod nonlinear;
pub mod search;
pub mod squeezing;
pub mod states;
pub mod uncertainty;

pub use num_complex::Complex64 as C64;

pub use error::{Error, Result};
pub use fock::{
    apply_quadrature, central_quadrature_moment, inner, normalize, normally_ordered_moment, number_distribution,
    FockVector, MomentTable,
};
pub use nonlinear::NonlinearFn;
pub use states::{
    build_fan, build_fan_with, build_kncs, build_sekncs, coherent, decompose_kncs, eigen_residual, geometry_points,
    rotate, CutoffPolicy, GeometryMode, KncsSpec, Truncation,
};
pub use squeezing::{r_const, squeeze_analytic, squeeze_closed_form, squeeze_numeric, SqueezeSample, SqueezeSource};
pub use uncertainty::{area_analytic, area_numeric, area_report, AreaReport};
pub use analysis::{
    critical_report, find_critical_xi, find_directions, find_optimal_xi, flower_profile, min_squeezing_order, wings,
    AnalysisOptions, CriticalReport, Evaluator, Wings,
};
