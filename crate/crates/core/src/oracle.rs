//! First-order oracles and the seeded minimax-distance benchmark family.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{usage, Error, Result};
use crate::klein::{build_frame, from_klein, klein_radius, KleinPoint, LorentzFrame};
use crate::lorentz::{
    distance, log_map, minkowski_inner, project_to_tangent, HyperboloidPoint, LorentzVector, TangentVector,
};

/// Value and one Riemannian subgradient at a query point.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleOutput {
    pub value: f64,
    pub subgradient: TangentVector,
}

/// A first-order oracle for a geodesically convex objective.
///
/// `subgradient` must be tangent at the queried point and satisfy
/// `f(y) >= f(x) + <g, log_x y>_x` on the feasible ball.
pub trait FirstOrderOracle {
    fn evaluate(&self, x: &HyperboloidPoint) -> Result<OracleOutput>;
}

impl<T: FirstOrderOracle + ?Sized> FirstOrderOracle for &T {
    fn evaluate(&self, x: &HyperboloidPoint) -> Result<OracleOutput> {
        (**self).evaluate(x)
    }
}

/// Adapts a closure into an oracle.
pub struct FnOracle<F>(pub F);

impl<F> FirstOrderOracle for FnOracle<F>
where
    F: Fn(&HyperboloidPoint) -> Result<OracleOutput>,
{
    fn evaluate(&self, x: &HyperboloidPoint) -> Result<OracleOutput> {
        (self.0)(x)
    }
}

/// Unit-speed subgradient `-log_x(p) / dist(x, p)` of `dist(., p)`; zero at `p`.
fn distance_subgradient(x: &HyperboloidPoint, p: &HyperboloidPoint) -> Result<(f64, TangentVector)> {
    let dist = distance(x, p)?;
    if dist == 0.0 {
        return Ok((0.0, TangentVector::zero(x.clone())));
    }
    // The log map loses tangency to cancellation when `p` is close to `x`;
    // one projection restores it, then the unit norm is reinstated.
    let raw = log_map(x, p)?.scaled(-1.0 / dist);
    let g = project_to_tangent(x, raw.coords())?;
    let norm = g.riemannian_norm();
    Ok((dist, g.scaled(1.0 / norm)))
}

/// `f(X) = dist(X, target)`: geodesically convex and 1-Lipschitz.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceOracle {
    target: HyperboloidPoint,
}

pub fn distance_oracle(target: HyperboloidPoint) -> DistanceOracle {
    DistanceOracle { target }
}

impl DistanceOracle {
    pub fn target(&self) -> &HyperboloidPoint {
        &self.target
    }
}

impl FirstOrderOracle for DistanceOracle {
    fn evaluate(&self, x: &HyperboloidPoint) -> Result<OracleOutput> {
        let (value, subgradient) = distance_subgradient(x, &self.target)?;
        Ok(OracleOutput { value, subgradient })
    }
}

/// Everything needed to rebuild a benchmark instance bit-for-bit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinimaxParams {
    pub d: usize,
    pub kappa: f64,
    /// Dimensionless ball radius `s = kappa r`.
    pub s: f64,
    /// Dimensionless spread of the anchors around the target.
    pub tau: f64,
    /// Klein norm of the target as a fraction of `tanh(s)`.
    pub fraction: f64,
    pub seed: u64,
}

impl Default for MinimaxParams {
    fn default() -> Self {
        Self {
            d: 4,
            kappa: 1.0,
            s: 2.0,
            tau: 0.8,
            fraction: 0.55,
            seed: 0,
        }
    }
}

/// `f(X) = max_{i, sigma} dist(X, Y_i^sigma)` with
/// `Y_i^{+-} = cosh(tau) X* +- sinh(tau) v_i` for a Lorentz-orthonormal
/// tangent frame `v_1..v_d` at `X*`. The minimum `tau / kappa` is attained
/// exactly at `X*`.
#[derive(Clone, Debug, PartialEq)]
pub struct MinimaxInstance {
    params: MinimaxParams,
    target: HyperboloidPoint,
    frame_at_target: LorentzFrame,
    anchors: Vec<HyperboloidPoint>,
    fstar: f64,
}

fn gaussian_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

/// Seeded instance: target direction from a normalized Gaussian draw, target
/// frame from Gram-Schmidt on Gaussian seed vectors.
pub fn make_minimax_instance(params: MinimaxParams) -> Result<MinimaxInstance> {
    let MinimaxParams {
        d,
        kappa,
        s,
        tau,
        fraction,
        seed,
    } = params;
    if d < 1 {
        return Err(usage("dimension must be at least 1"));
    }
    if !(kappa.is_finite() && kappa > 0.0 && s.is_finite() && s > 0.0) {
        return Err(usage("kappa and s must be positive"));
    }
    if !(tau.is_finite() && tau > 0.0) {
        return Err(usage("tau must be positive"));
    }
    if !(0.0..1.0).contains(&fraction) {
        return Err(Error::Instance(format!(
            "target fraction {fraction} must lie in [0, 1) to keep X* inside the ball"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let direction = loop {
        let v = gaussian_vec(&mut rng, d);
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 0.0 {
            break v.into_iter().map(|x| x / n).collect::<Vec<_>>();
        }
    };
    let radius = fraction * klein_radius(s);
    let u_star = KleinPoint::new(direction.iter().map(|x| radius * x).collect())?;
    let canonical = LorentzFrame::canonical(d, kappa)?;
    let target = from_klein(&canonical, &u_star)?;

    let seeds = (0..d)
        .map(|_| LorentzVector::new(gaussian_vec(&mut rng, d + 1)))
        .collect::<Result<Vec<_>>>()?;
    let frame_at_target = build_frame(&target, Some(&seeds))?;

    let (ch, sh) = (tau.cosh(), tau.sinh());
    let x = target.coords().as_dvector();
    let mut anchors = Vec::with_capacity(2 * d);
    for i in 1..=d {
        let v = frame_at_target.vector(i);
        for sign in [1.0, -1.0] {
            let y = x * ch + v.as_dvector() * (sign * sh);
            let y = LorentzVector::from_dvector(y)?;
            let defect = minkowski_inner(&y, &y)? + 1.0;
            if defect.abs() > 1e-10 * (1.0 + y.sup_norm().powi(2)) {
                return Err(Error::Instance(format!("anchor is off the hyperboloid by {defect:e}")));
            }
            anchors.push(HyperboloidPoint::normalized(y, kappa)?);
        }
    }

    Ok(MinimaxInstance {
        params,
        target,
        frame_at_target,
        anchors,
        fstar: tau / kappa,
    })
}

impl MinimaxInstance {
    pub fn params(&self) -> &MinimaxParams {
        &self.params
    }

    pub fn target(&self) -> &HyperboloidPoint {
        &self.target
    }

    pub fn frame_at_target(&self) -> &LorentzFrame {
        &self.frame_at_target
    }

    /// Anchors ordered `Y_1^+, Y_1^-, Y_2^+, ...`.
    pub fn anchors(&self) -> &[HyperboloidPoint] {
        &self.anchors
    }

    /// Minimum value `tau / kappa`, in length units.
    pub fn fstar(&self) -> f64 {
        self.fstar
    }

    /// Feasible ball radius `r = s / kappa` in length units.
    pub fn radius(&self) -> f64 {
        self.params.s / self.params.kappa
    }

    /// Whether every anchor lies in the closed feasible ball around `o`.
    /// Not required for correctness: the objective is defined on all of
    /// hyperbolic space and `X*` is always feasible.
    pub fn anchors_inside_ball(&self) -> Result<bool> {
        let o = HyperboloidPoint::origin(self.params.d, self.params.kappa)?;
        for y in &self.anchors {
            if distance(&o, y)? > self.radius() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Oracle view of a [`MinimaxInstance`].
#[derive(Clone, Copy, Debug)]
pub struct MinimaxOracle<'a> {
    instance: &'a MinimaxInstance,
}

pub fn minimax_oracle(instance: &MinimaxInstance) -> MinimaxOracle<'_> {
    MinimaxOracle { instance }
}

impl MinimaxOracle<'_> {
    /// Index of the active anchor and its distance. Ties go to the lowest
    /// anchor index, which orders `+` before `-` within a pair.
    pub fn active_term(&self, x: &HyperboloidPoint) -> Result<(usize, f64)> {
        let mut best = (0, f64::NEG_INFINITY);
        for (i, y) in self.instance.anchors.iter().enumerate() {
            let dist = distance(x, y)?;
            if dist > best.1 {
                best = (i, dist);
            }
        }
        Ok(best)
    }
}

impl FirstOrderOracle for MinimaxOracle<'_> {
    fn evaluate(&self, x: &HyperboloidPoint) -> Result<OracleOutput> {
        let inst = self.instance;
        if distance(x, &inst.target)? == 0.0 {
            return Ok(OracleOutput {
                value: inst.fstar,
                subgradient: TangentVector::zero(x.clone()),
            });
        }
        let (active, _) = self.active_term(x)?;
        let (value, subgradient) = distance_subgradient(x, &inst.anchors[active])?;
        Ok(OracleOutput { value, subgradient })
    }
}
