//! Beltrami-Klein coordinates on the hyperboloid.
//!
//! A [`LorentzFrame`] `(E_0, E_1, ..., E_d)` with `E_0 = x_0` fixes a chart
//! centered at `x_0`:
//!
//! ```text
//! Phi(X) = (<X,E_1>_L, ..., <X,E_d>_L) / (-<X,E_0>_L)
//! X(u)   = (E_0 + sum_i u_i E_i) / sqrt(1 - |u|^2)
//! ```
//!
//! Geodesics are straight chords in this chart, and the ball of radius `r`
//! around `x_0` maps onto the Euclidean ball of radius `tanh(kappa r)`.

use nalgebra::DVector;

use crate::error::{usage, Error, Result};
use crate::lorentz::{lorentz, HyperboloidPoint, LorentzVector, SHEET_TOL};

/// Largest Klein norm accepted by [`from_klein`].
pub const BOUNDARY_GUARD: f64 = 1.0 - 1e-12;

/// Pivot norm below which a seed direction is treated as dependent.
const PIVOT_TOL: f64 = 1e-10;

/// A point of the open unit ball.
#[derive(Clone, Debug, PartialEq)]
pub struct KleinPoint(DVector<f64>);

impl KleinPoint {
    pub fn new(u: Vec<f64>) -> Result<Self> {
        Self::from_dvector(DVector::from_vec(u))
    }

    pub fn from_dvector(u: DVector<f64>) -> Result<Self> {
        if u.is_empty() {
            return Err(usage("Klein point needs at least one coordinate"));
        }
        if u.iter().any(|c| !c.is_finite()) {
            return Err(Error::Numeric("non-finite Klein coordinate".into()));
        }
        let norm = u.norm();
        if norm >= 1.0 {
            return Err(Error::Boundary { norm });
        }
        Ok(Self(u))
    }

    pub fn origin(d: usize) -> Self {
        Self(DVector::zeros(d))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn as_slice(&self) -> &[f64] {
        self.0.as_slice()
    }

    pub fn as_dvector(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn into_dvector(self) -> DVector<f64> {
        self.0
    }
}

/// A Lorentz-orthonormal frame: `<E_0,E_0>_L = -1`, `<E_0,E_i>_L = 0`,
/// `<E_i,E_j>_L = delta_ij`.
#[derive(Clone, Debug, PartialEq)]
pub struct LorentzFrame {
    vectors: Vec<DVector<f64>>,
    kappa: f64,
}

impl LorentzFrame {
    /// The standard basis, centered at `o = (1, 0, ..., 0)`.
    pub fn canonical(d: usize, kappa: f64) -> Result<Self> {
        let o = HyperboloidPoint::origin(d, kappa)?;
        Ok(Self {
            vectors: (0..=d)
                .map(|i| LorentzVector::basis(d, i).as_dvector().clone())
                .collect(),
            kappa: o.kappa(),
        })
    }

    pub fn dim(&self) -> usize {
        self.vectors.len() - 1
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// The frame's base point `E_0`.
    pub fn base_point(&self) -> HyperboloidPoint {
        HyperboloidPoint::raw(self.vectors[0].clone(), self.kappa)
    }

    /// `E_i` for `0 <= i <= d`.
    pub fn vector(&self, i: usize) -> LorentzVector {
        LorentzVector::raw(self.vectors[i].clone())
    }

    pub(crate) fn raw_vector(&self, i: usize) -> &DVector<f64> {
        &self.vectors[i]
    }

    /// The `(d+1) x (d+1)` matrix of Lorentz products `<E_i,E_j>_L`.
    pub fn gram(&self) -> Vec<Vec<f64>> {
        self.vectors
            .iter()
            .map(|a| self.vectors.iter().map(|b| lorentz(a, b)).collect())
            .collect()
    }

    /// Spatial components `(<w,E_1>_L, ..., <w,E_d>_L)`.
    pub(crate) fn spatial_components(&self, w: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(self.dim(), self.vectors[1..].iter().map(|e| lorentz(w, e)))
    }

    fn check(&self, x: &HyperboloidPoint) -> Result<()> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.dim(),
            });
        }
        if (x.kappa() - self.kappa).abs() > 1e-15 * self.kappa {
            return Err(usage("point and frame use different curvature scales"));
        }
        Ok(())
    }
}

/// Builds a Lorentz-orthonormal frame at `x0` by Gram-Schmidt in the Lorentz
/// form. Seeds are projected to the tangent space and processed in index
/// order; dependent seeds (pivot below `1e-10`) are skipped. Without seeds the
/// spatial standard basis `e_1..e_d` is used.
pub fn build_frame(x0: &HyperboloidPoint, seeds: Option<&[LorentzVector]>) -> Result<LorentzFrame> {
    let d = x0.dim();
    let default_seeds;
    let seeds = match seeds {
        Some(s) => s,
        None => {
            default_seeds = (1..=d).map(|i| LorentzVector::basis(d, i)).collect::<Vec<_>>();
            &default_seeds
        }
    };
    let base = x0.coords().as_dvector().clone();
    let mut vectors = vec![base.clone()];
    for seed in seeds {
        if vectors.len() == d + 1 {
            break;
        }
        if seed.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: seed.dim(),
            });
        }
        let mut w = seed.as_dvector().clone();
        // Two passes of classical Gram-Schmidt; the base enters with sign -1.
        for _ in 0..2 {
            let c = lorentz(&w, &base);
            w += &base * c;
            for e in &vectors[1..] {
                let c = lorentz(&w, e);
                w -= e * c;
            }
        }
        let q = lorentz(&w, &w);
        let pivot = q.max(0.0).sqrt();
        if pivot < PIVOT_TOL * (1.0 + seed.sup_norm()) {
            continue;
        }
        vectors.push(w / pivot);
    }
    if vectors.len() != d + 1 {
        return Err(Error::DegenerateFrame {
            needed: d,
            found: vectors.len() - 1,
        });
    }
    Ok(LorentzFrame {
        vectors,
        kappa: x0.kappa(),
    })
}

/// Klein coordinates of `x` in the chart of `frame`.
pub fn to_klein(frame: &LorentzFrame, x: &HyperboloidPoint) -> Result<KleinPoint> {
    frame.check(x)?;
    let x = x.coords().as_dvector();
    let den = -lorentz(x, frame.raw_vector(0));
    if den < 1.0 - SHEET_TOL {
        return Err(Error::InvalidPoint(format!(
            "-<X,E_0>_L = {den}; point is not on the frame's sheet"
        )));
    }
    let u = frame.spatial_components(x) / den;
    // |u| < 1 holds mathematically; guard rounding at extreme radii.
    let norm = u.norm();
    if norm >= 1.0 {
        return Err(Error::Boundary { norm });
    }
    Ok(KleinPoint(u))
}

/// Lift of a Klein point back onto the hyperboloid.
pub fn from_klein(frame: &LorentzFrame, u: &KleinPoint) -> Result<HyperboloidPoint> {
    if u.dim() != frame.dim() {
        return Err(Error::DimensionMismatch {
            expected: frame.dim(),
            found: u.dim(),
        });
    }
    let norm = u.norm();
    if norm > BOUNDARY_GUARD {
        return Err(Error::Boundary { norm });
    }
    let mut x = frame.raw_vector(0).clone();
    for (i, ui) in u.as_slice().iter().enumerate() {
        x.axpy(*ui, frame.raw_vector(i + 1), 1.0);
    }
    let scale = ((1.0 - norm) * (1.0 + norm)).sqrt().recip();
    HyperboloidPoint::normalized(LorentzVector::raw(x * scale), frame.kappa)
}

/// `R_s = tanh(s)`: Klein radius of a hyperbolic ball of dimensionless radius `s`.
pub fn klein_radius(s: f64) -> f64 {
    s.tanh()
}

/// `L_s = M cosh^2(s) / kappa`: Euclidean Lipschitz constant of an
/// `M`-Lipschitz objective pulled back to the Klein ball of radius `tanh s`.
pub fn pullback_lipschitz(lipschitz_m: f64, kappa: f64, s: f64) -> f64 {
    let c = s.cosh();
    lipschitz_m * c * c / kappa
}

/// Norm of the differential `DX(u)[h]` in the hyperbolic metric:
/// `kappa^-1 sqrt(|h|^2 / (1-|u|^2) + (u.h)^2 / (1-|u|^2)^2)`.
pub fn klein_metric_norm(u: &KleinPoint, h: &[f64], kappa: f64) -> Result<f64> {
    if h.len() != u.dim() {
        return Err(Error::DimensionMismatch {
            expected: u.dim(),
            found: h.len(),
        });
    }
    let n = u.norm();
    let w = (1.0 - n) * (1.0 + n);
    let hh: f64 = h.iter().map(|v| v * v).sum();
    let uh: f64 = u.as_slice().iter().zip(h).map(|(a, b)| a * b).sum();
    Ok((hh / w + uh * uh / (w * w)).sqrt() / kappa)
}
