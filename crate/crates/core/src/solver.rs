//! The global Klein cutting-plane loop.
//!
//! The feasible ball `B(x_0, r)` is mapped onto the Euclidean ball of radius
//! `R_s = tanh(kappa r)` in the Klein chart of a frame at `x_0`. Each step
//! looks at the current localizer center `c_k`: infeasible centers get the
//! feasibility cut `c_k^T (u - c_k) <= 0`, feasible ones are lifted to the
//! hyperboloid, queried, and cut with the Lorentz spatial part of the
//! returned subgradient. The loop runs `N(d, s, eps)` localizer updates and
//! returns the best feasible query.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::complexity::{query_bound, ComplexityInputs};
use crate::cut::{feasibility_cut, subgradient_cut, CutOutcome};
use crate::error::{usage, Error, Result};
use crate::klein::{from_klein, klein_radius, pullback_lipschitz, KleinPoint, LorentzFrame};
use crate::localizer::{interval_update, Ellipsoid, IntervalState};
use crate::lorentz::{HyperboloidPoint, TangentVector};
use crate::oracle::FirstOrderOracle;

/// Centers within this distance outside `R_s` are treated as feasible and
/// pulled radially onto the sphere of radius `R_s`.
pub const FEASIBILITY_SLACK: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub d: usize,
    pub kappa: f64,
    /// Ball radius in length units.
    pub r: f64,
    pub eps: f64,
    /// Lipschitz constant of the objective in hyperbolic distance.
    pub lipschitz_m: f64,
    /// Replaces the theorem budget on localizer updates.
    pub max_queries_override: Option<usize>,
    pub record_trace: bool,
}

impl SolverConfig {
    pub fn new(d: usize, kappa: f64, r: f64, eps: f64, lipschitz_m: f64) -> Result<Self> {
        let cfg = Self {
            d,
            kappa,
            r,
            eps,
            lipschitz_m,
            max_queries_override: None,
            record_trace: false,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_trace(mut self, on: bool) -> Self {
        self.record_trace = on;
        self
    }

    pub fn with_max_queries(mut self, cap: Option<usize>) -> Self {
        self.max_queries_override = cap;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.d < 1 {
            return Err(usage("dimension must be at least 1"));
        }
        for (name, v) in [("kappa", self.kappa), ("r", self.r), ("lipschitz_m", self.lipschitz_m)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(usage(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(usage(format!("eps must lie in (0, 1), got {}", self.eps)));
        }
        if self.max_queries_override == Some(0) {
            return Err(usage("query budget override must be positive"));
        }
        Ok(())
    }

    /// Dimensionless radius `s = kappa r`.
    pub fn s(&self) -> f64 {
        self.kappa * self.r
    }

    /// `R_s = tanh(s)`.
    pub fn klein_radius(&self) -> f64 {
        klein_radius(self.s())
    }

    /// `L_s = M cosh^2(s) / kappa`.
    pub fn pullback_lipschitz(&self) -> f64 {
        pullback_lipschitz(self.lipschitz_m, self.kappa, self.s())
    }

    /// Target optimality gap `eta = eps M r`.
    pub fn target_gap(&self) -> f64 {
        self.eps * self.lipschitz_m * self.r
    }

    /// `N(d, s, eps)`.
    pub fn theorem_bound(&self) -> Result<u64> {
        query_bound(&ComplexityInputs::new(self.d, self.s(), self.eps)?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Budget,
    ZeroSubgradient,
    Breakdown,
}

impl Termination {
    pub fn as_str(&self) -> &'static str {
        match self {
            Termination::Budget => "budget",
            Termination::ZeroSubgradient => "zero_subgradient",
            Termination::Breakdown => "breakdown",
        }
    }
}

/// What a step did with its center.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepKind {
    Subgradient,
    Feasibility,
    ZeroSubgradient,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QueryRecord {
    pub index: usize,
    /// Localizer center `c_k` before the step.
    pub center: Vec<f64>,
    pub feasible: bool,
    /// Objective value, present exactly for feasible steps.
    pub value: Option<f64>,
    pub cut_kind: StepKind,
    /// `log det Q` (ellipsoid) or interval length after the step.
    pub localizer_measure: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverResult {
    pub best_point: HyperboloidPoint,
    pub best_value: f64,
    /// Oracle calls.
    pub queries_used: usize,
    /// Localizer updates, counted against the budget.
    pub updates: usize,
    pub theorem_bound: u64,
    pub terminated_by: Termination,
    pub trace: Vec<QueryRecord>,
}

/// The current localization body.
#[derive(Clone, Debug, PartialEq)]
pub enum Localizer {
    Ellipsoid(Ellipsoid),
    Interval(IntervalState),
}

impl Localizer {
    pub fn center(&self) -> DVector<f64> {
        match self {
            Localizer::Ellipsoid(e) => e.center().clone(),
            Localizer::Interval(i) => DVector::from_element(1, i.midpoint()),
        }
    }

    /// `log det Q` for ellipsoids, length for intervals.
    pub fn measure(&self) -> Result<f64> {
        match self {
            Localizer::Ellipsoid(e) => e.log_det(),
            Localizer::Interval(i) => Ok(i.length()),
        }
    }

    /// Membership with the standard `1e-9` slack.
    pub fn contains(&self, u: &[f64]) -> Result<bool> {
        match self {
            Localizer::Ellipsoid(e) => e.contains(u),
            Localizer::Interval(i) => {
                if u.len() != 1 {
                    return Err(Error::DimensionMismatch {
                        expected: 1,
                        found: u.len(),
                    });
                }
                Ok(i.contains(u[0]))
            }
        }
    }

    fn update(&mut self, normal: &DVector<f64>) -> Result<()> {
        match self {
            Localizer::Ellipsoid(e) => e.cut_through_center(normal),
            Localizer::Interval(i) => {
                *i = interval_update(i, normal[0])?;
                Ok(())
            }
        }
    }
}

fn contract(err: Error) -> Error {
    match err {
        Error::Usage(msg) => Error::ContractViolation(msg),
        other => other,
    }
}

/// Runs the method to its theorem budget or until a zero subgradient.
pub fn solve<O: FirstOrderOracle + ?Sized>(
    config: &SolverConfig,
    frame: &LorentzFrame,
    oracle: &O,
) -> Result<SolverResult> {
    solve_observed(config, frame, oracle, |_| {})
}

/// Like [`solve`], calling `observer` on the initial localizer and after every update.
pub fn solve_observed<O, F>(
    config: &SolverConfig,
    frame: &LorentzFrame,
    oracle: &O,
    mut observer: F,
) -> Result<SolverResult>
where
    O: FirstOrderOracle + ?Sized,
    F: FnMut(&Localizer),
{
    config.validate()?;
    if frame.dim() != config.d {
        return Err(Error::DimensionMismatch {
            expected: config.d,
            found: frame.dim(),
        });
    }
    if (frame.kappa() - config.kappa).abs() > 1e-15 * config.kappa {
        return Err(usage("frame curvature does not match the configuration"));
    }

    let d = config.d;
    let r_s = config.klein_radius();
    let theorem_bound = config.theorem_bound()?;
    let budget = config.max_queries_override.unwrap_or(theorem_bound as usize);

    let mut localizer = if d == 1 {
        Localizer::Interval(IntervalState::new(-r_s, r_s)?)
    } else {
        Localizer::Ellipsoid(Ellipsoid::ball(d, r_s)?)
    };
    observer(&localizer);

    let mut best: Option<(HyperboloidPoint, f64)> = None;
    let mut trace = Vec::new();
    let mut queries_used = 0;
    let mut updates = 0;
    let mut terminated_by = Termination::Budget;

    for k in 0..budget {
        let center = localizer.center();
        let norm = center.norm();
        let mut record = QueryRecord {
            index: k,
            center: center.as_slice().to_vec(),
            feasible: false,
            value: None,
            cut_kind: StepKind::Feasibility,
            localizer_measure: f64::NAN,
        };

        let normal = if norm > r_s + FEASIBILITY_SLACK {
            feasibility_cut(&center, r_s)?.normal().clone()
        } else {
            let query = if norm > r_s { &center * (r_s / norm) } else { center };
            let x = from_klein(frame, &KleinPoint::from_dvector(query)?)?;
            let out = oracle.evaluate(&x)?;
            queries_used += 1;
            if !out.value.is_finite() {
                return Err(Error::ContractViolation(format!("oracle returned value {}", out.value)));
            }
            let g = TangentVector::new(x.clone(), out.subgradient.coords().clone()).map_err(contract)?;
            if !out.subgradient.base().coincides_with(&x) {
                return Err(Error::ContractViolation(
                    "subgradient is based at a different point".into(),
                ));
            }
            record.feasible = true;
            record.value = Some(out.value);
            if best.as_ref().is_none_or(|(_, v)| out.value < *v) {
                best = Some((x.clone(), out.value));
            }
            match subgradient_cut(frame, &x, &g).map_err(contract)? {
                CutOutcome::Optimal => {
                    record.cut_kind = StepKind::ZeroSubgradient;
                    if config.record_trace {
                        record.localizer_measure = localizer.measure().unwrap_or(f64::NAN);
                        trace.push(record);
                    }
                    terminated_by = Termination::ZeroSubgradient;
                    break;
                }
                CutOutcome::Cut(cut) => {
                    record.cut_kind = StepKind::Subgradient;
                    cut.normal().clone()
                }
            }
        };

        match localizer.update(&normal) {
            Ok(()) => updates += 1,
            Err(Error::Breakdown { iteration, quad_form }) => {
                if best.is_none() {
                    return Err(Error::Breakdown { iteration, quad_form });
                }
                if config.record_trace {
                    trace.push(record);
                }
                terminated_by = Termination::Breakdown;
                break;
            }
            Err(e) => return Err(e),
        }
        observer(&localizer);
        if config.record_trace {
            let measure = localizer.measure();
            record.localizer_measure = *measure.as_ref().unwrap_or(&f64::NAN);
            trace.push(record);
            match measure {
                Ok(_) => {}
                Err(Error::Breakdown { .. }) => {
                    terminated_by = Termination::Breakdown;
                    break;
                }
                Err(e) => return Err(e),
            }
        }
    }

    let (best_point, best_value) = best.ok_or_else(|| usage("budget ended before any feasible query"))?;
    Ok(SolverResult {
        best_point,
        best_value,
        queries_used,
        updates,
        theorem_bound,
        terminated_by,
        trace,
    })
}

/// Normalized gap `(best - f*) / (M r)`.
pub fn certify_gap(result: &SolverResult, known_fstar: f64, config: &SolverConfig) -> f64 {
    (result.best_value - known_fstar) / (config.lipschitz_m * config.r)
}
