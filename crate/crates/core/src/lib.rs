//! One-shot Klein cutting-plane method for geodesically convex Lipschitz
//! minimization over balls of hyperbolic space.
//!
//! Points live on the hyperboloid `<X,X>_L = -1`, `X_0 > 0`, carrying the metric
//! `kappa^{-2} <.,.>_L` of constant curvature `-kappa^2`. A Lorentz frame at the
//! ball center gives a Klein chart in which geodesics are straight lines and
//! Riemannian subgradient halfspaces are exact affine halfspaces, so a central-cut
//! ellipsoid method runs unchanged on `B(0, tanh(kappa r))`.
//!
//! ```
//! use hyperklein::{certify_gap, make_minimax_instance, minimax_oracle, solve, LorentzFrame, MinimaxParams, SolverConfig};
//!
//! let inst = make_minimax_instance(MinimaxParams { d: 4, s: 2.0, seed: 1, ..Default::default() })?;
//! let frame = LorentzFrame::canonical(4, 1.0)?;
//! let cfg = SolverConfig::new(4, 1.0, inst.radius(), 1e-3, 1.0)?;
//! let res = solve(&cfg, &frame, &minimax_oracle(&inst))?;
//! assert!(certify_gap(&res, inst.fstar(), &cfg) <= 1e-3);
//! # Ok::<(), hyperklein::Error>(())
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod complexity;
pub mod cut;
pub mod error;
pub mod harness;
pub mod klein;
pub mod localizer;
pub mod lorentz;
pub mod oracle;
pub mod solver;

pub use complexity::{
    euclidean_limit_bound, large_s_expansion, log_factor, query_bound, simple_upper_bound, sinh_cosh_ratio,
    small_s_expansion, zeta, ComplexityInputs,
};
pub use cut::{feasibility_cut, lorentz_pairing, subgradient_cut, Cut, CutKind, CutOutcome};
pub use error::{Error, Result};
pub use klein::{
    build_frame, from_klein, klein_metric_norm, klein_radius, pullback_lipschitz, to_klein, KleinPoint, LorentzFrame,
};
pub use localizer::{ellipsoid_update, ellipsoid_volume_ratio, interval_update, Ellipsoid, IntervalState};
pub use lorentz::{
    distance, exp_map, log_map, lorentz_angle, minkowski_inner, project_to_tangent, riemannian_inner, HyperboloidPoint,
    LorentzVector, TangentVector,
};
pub use oracle::{
    distance_oracle, make_minimax_instance, minimax_oracle, DistanceOracle, FirstOrderOracle, FnOracle,
    MinimaxInstance, MinimaxOracle, MinimaxParams, OracleOutput,
};
pub use solver::{
    certify_gap, solve, solve_observed, Localizer, QueryRecord, SolverConfig, SolverResult, StepKind, Termination,
};
