//! Hyperboloid model of hyperbolic space with sectional curvature `-kappa^2`.
//!
//! Points live on the upper sheet `<X,X>_L = -1, X_0 > 0` of `R^{d+1}`, where
//! `<U,V>_L = -U_0 V_0 + sum_i U_i V_i` is the Lorentz form. The Riemannian
//! metric at a point is `kappa^-2 <.,.>_L` on the tangent space
//! `{U : <U,X>_L = 0}`, so every length carries a factor `1/kappa`.
//!
//! All values are immutable; every operation is a pure function.

use nalgebra::DVector;

use crate::error::{usage, Error, Result};

/// Allowed drift `|<X,X>_L + 1|` for a point accepted by [`HyperboloidPoint::new`].
pub const SHEET_TOL: f64 = 1e-9;

/// Relative tangency tolerance: `|<g,X>_L| <= TANGENT_TOL * (1 + |g|_inf)`.
pub const TANGENT_TOL: f64 = 1e-9;

/// Below this angle `theta / sinh(theta)` is evaluated by its Taylor series.
const SERIES_CUTOFF: f64 = 1e-4;

/// A vector of `R^{d+1}`; component 0 is the timelike coordinate.
#[derive(Clone, Debug, PartialEq)]
pub struct LorentzVector(DVector<f64>);

impl LorentzVector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        Self::from_dvector(DVector::from_vec(coords))
    }

    pub fn from_dvector(coords: DVector<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(usage(format!(
                "a Lorentz vector needs at least 2 coordinates, got {}",
                coords.len()
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::Numeric("non-finite Lorentz coordinate".into()));
        }
        Ok(Self(coords))
    }

    pub(crate) fn raw(coords: DVector<f64>) -> Self {
        Self(coords)
    }

    /// The zero vector of `R^{d+1}`.
    pub fn zeros(d: usize) -> Self {
        Self(DVector::zeros(d + 1))
    }

    /// Standard basis vector `e_i`, `0 <= i <= d`.
    pub fn basis(d: usize, i: usize) -> Self {
        let mut v = DVector::zeros(d + 1);
        v[i] = 1.0;
        Self(v)
    }

    /// Spatial dimension `d`.
    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    pub fn as_slice(&self) -> &[f64] {
        self.0.as_slice()
    }

    pub fn as_dvector(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn timelike(&self) -> f64 {
        self.0[0]
    }

    pub fn spatial(&self) -> &[f64] {
        &self.0.as_slice()[1..]
    }

    pub fn sup_norm(&self) -> f64 {
        self.0.amax()
    }
}

pub(crate) fn lorentz(u: &DVector<f64>, v: &DVector<f64>) -> f64 {
    let spatial: f64 = u.iter().zip(v.iter()).skip(1).map(|(a, b)| a * b).sum();
    spatial - u[0] * v[0]
}

fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// Lorentz form `-u_0 v_0 + sum_{i>=1} u_i v_i`.
pub fn minkowski_inner(u: &LorentzVector, v: &LorentzVector) -> Result<f64> {
    check_dims(u.dim(), v.dim())?;
    Ok(lorentz(&u.0, &v.0))
}

/// A point on the upper sheet of the unit hyperboloid, tagged with the
/// curvature scale `kappa` of the space it belongs to.
#[derive(Clone, Debug, PartialEq)]
pub struct HyperboloidPoint {
    coords: LorentzVector,
    kappa: f64,
}

fn check_kappa(kappa: f64) -> Result<()> {
    if !(kappa.is_finite() && kappa > 0.0) {
        return Err(usage(format!("curvature scale must be positive, got {kappa}")));
    }
    Ok(())
}

impl HyperboloidPoint {
    /// Accepts `coords` if it lies on the upper sheet within [`SHEET_TOL`].
    pub fn new(coords: LorentzVector, kappa: f64) -> Result<Self> {
        check_kappa(kappa)?;
        let q = lorentz(&coords.0, &coords.0);
        if coords.timelike() <= 0.0 {
            return Err(Error::InvalidPoint(format!(
                "timelike coordinate {} is not positive",
                coords.timelike()
            )));
        }
        if (q + 1.0).abs() > SHEET_TOL {
            return Err(Error::InvalidPoint(format!("<X,X>_L = {q}, expected -1")));
        }
        Ok(Self { coords, kappa })
    }

    /// Rescales a future-timelike vector onto the sheet.
    pub fn normalized(coords: LorentzVector, kappa: f64) -> Result<Self> {
        check_kappa(kappa)?;
        let q = lorentz(&coords.0, &coords.0);
        if !(q < 0.0) || coords.timelike() <= 0.0 {
            return Err(Error::InvalidPoint(format!(
                "cannot renormalize: <X,X>_L = {q}, X_0 = {}",
                coords.timelike()
            )));
        }
        let scale = (-q).sqrt().recip();
        Ok(Self {
            coords: LorentzVector(coords.0 * scale),
            kappa,
        })
    }

    pub(crate) fn raw(coords: DVector<f64>, kappa: f64) -> Self {
        Self {
            coords: LorentzVector(coords),
            kappa,
        }
    }

    /// The base point `o = (1, 0, ..., 0)`.
    pub fn origin(d: usize, kappa: f64) -> Result<Self> {
        if d == 0 {
            return Err(usage("dimension must be at least 1"));
        }
        check_kappa(kappa)?;
        Ok(Self {
            coords: LorentzVector::basis(d, 0),
            kappa,
        })
    }

    /// Divides out accumulated drift so that `<X,X>_L = -1` again.
    pub fn renormalize(&self) -> Result<Self> {
        Self::normalized(self.coords.clone(), self.kappa)
    }

    pub fn coords(&self) -> &LorentzVector {
        &self.coords
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn dim(&self) -> usize {
        self.coords.dim()
    }

    /// `<X,X>_L + 1`.
    pub fn sheet_defect(&self) -> f64 {
        lorentz(&self.coords.0, &self.coords.0) + 1.0
    }

    pub(crate) fn same_space(&self, other: &HyperboloidPoint) -> Result<()> {
        check_dims(self.dim(), other.dim())?;
        if (self.kappa - other.kappa).abs() > 1e-15 * self.kappa {
            return Err(usage(format!(
                "points from different spaces: kappa {} vs {}",
                self.kappa, other.kappa
            )));
        }
        Ok(())
    }

    pub(crate) fn coincides_with(&self, other: &HyperboloidPoint) -> bool {
        let diff = (&self.coords.0 - &other.coords.0).amax();
        diff <= 1e-12 * (1.0 + self.coords.sup_norm())
    }
}

/// A vector in the tangent space at `base`.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentVector {
    base: HyperboloidPoint,
    coords: LorentzVector,
}

impl TangentVector {
    /// Rejects `coords` unless `|<g,X>_L| <= TANGENT_TOL (1 + |g|_inf)`.
    pub fn new(base: HyperboloidPoint, coords: LorentzVector) -> Result<Self> {
        check_dims(base.dim(), coords.dim())?;
        let defect = lorentz(&coords.0, &base.coords.0);
        if defect.abs() > TANGENT_TOL * (1.0 + coords.sup_norm()) {
            return Err(usage(format!(
                "vector is not tangent at the base point: <g,X>_L = {defect:e}"
            )));
        }
        Ok(Self { base, coords })
    }

    pub(crate) fn raw(base: HyperboloidPoint, coords: DVector<f64>) -> Self {
        Self {
            base,
            coords: LorentzVector(coords),
        }
    }

    pub fn zero(base: HyperboloidPoint) -> Self {
        let d = base.dim();
        Self {
            base,
            coords: LorentzVector::zeros(d),
        }
    }

    pub fn base(&self) -> &HyperboloidPoint {
        &self.base
    }

    pub fn coords(&self) -> &LorentzVector {
        &self.coords
    }

    /// `sqrt(<g,g>_L)`, the length in the unit-curvature normalization.
    pub fn lorentz_norm(&self) -> f64 {
        lorentz(&self.coords.0, &self.coords.0).max(0.0).sqrt()
    }

    /// Length in the metric `kappa^-2 <.,.>_L`.
    pub fn riemannian_norm(&self) -> f64 {
        self.lorentz_norm() / self.base.kappa
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            base: self.base.clone(),
            coords: LorentzVector(&self.coords.0 * factor),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.0.iter().all(|&c| c == 0.0)
    }
}

/// `kappa^-2 <g,h>_L` for two vectors tangent at the same point.
pub fn riemannian_inner(g: &TangentVector, h: &TangentVector) -> Result<f64> {
    g.base.same_space(&h.base)?;
    if !g.base.coincides_with(&h.base) {
        return Err(usage("tangent vectors live at different base points"));
    }
    Ok(lorentz(&g.coords.0, &h.coords.0) / (g.base.kappa * g.base.kappa))
}

/// Dimensionless hyperbolic angle `theta = arcosh(-<X,Y>_L)`.
///
/// `theta - 1` is taken from the Lorentz norm of `X - Y`, which equals
/// `-<X,Y>_L - 1` on the sheet and stays accurate as `Y -> X`.
pub fn lorentz_angle(x: &HyperboloidPoint, y: &HyperboloidPoint) -> Result<f64> {
    x.same_space(y)?;
    let m = -lorentz(&x.coords.0, &y.coords.0);
    if m < 1.0 - SHEET_TOL {
        return Err(Error::Numeric(format!("-<X,Y>_L = {m} is below 1")));
    }
    let diff = &x.coords.0 - &y.coords.0;
    let delta = (0.5 * lorentz(&diff, &diff)).max(0.0);
    Ok((delta + (delta * (delta + 2.0)).sqrt()).ln_1p())
}

/// `theta / sinh(theta)`, with the removable singularity at 0 filled in.
pub(crate) fn theta_over_sinh(theta: f64) -> f64 {
    if theta < SERIES_CUTOFF {
        let t2 = theta * theta;
        1.0 - t2 / 6.0 + 7.0 * t2 * t2 / 360.0
    } else {
        theta / theta.sinh()
    }
}

/// Geodesic distance `theta / kappa`.
pub fn distance(x: &HyperboloidPoint, y: &HyperboloidPoint) -> Result<f64> {
    Ok(lorentz_angle(x, y)? / x.kappa)
}

/// Riemannian logarithm `(theta / sinh theta) (Y - cosh(theta) X)`.
pub fn log_map(x: &HyperboloidPoint, y: &HyperboloidPoint) -> Result<TangentVector> {
    let theta = lorentz_angle(x, y)?;
    if theta == 0.0 {
        return Ok(TangentVector::zero(x.clone()));
    }
    let coords = (&y.coords.0 - &x.coords.0 * theta.cosh()) * theta_over_sinh(theta);
    Ok(TangentVector::raw(x.clone(), coords))
}

/// Riemannian exponential `cosh(t) X + sinh(t) v / t` with `t = sqrt(<v,v>_L)`,
/// renormalized onto the sheet.
pub fn exp_map(x: &HyperboloidPoint, v: &TangentVector) -> Result<HyperboloidPoint> {
    x.same_space(&v.base)?;
    if !x.coincides_with(&v.base) {
        return Err(usage("tangent vector is not based at the given point"));
    }
    let t = v.lorentz_norm();
    if t == 0.0 {
        return Ok(x.clone());
    }
    let coords = &x.coords.0 * t.cosh() + &v.coords.0 * (t.sinh() / t);
    HyperboloidPoint::normalized(LorentzVector(coords), x.kappa)
}

/// Lorentz-orthogonal projection `w + <w,X>_L X` onto the tangent space at `x`.
pub fn project_to_tangent(x: &HyperboloidPoint, w: &LorentzVector) -> Result<TangentVector> {
    check_dims(x.dim(), w.dim())?;
    let coef = lorentz(&w.0, &x.coords.0);
    let coords = &w.0 + &x.coords.0 * coef;
    Ok(TangentVector::raw(x.clone(), coords))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn lv(c: &[f64]) -> LorentzVector {
        LorentzVector::new(c.to_vec()).unwrap()
    }

    fn point(c: &[f64], kappa: f64) -> HyperboloidPoint {
        HyperboloidPoint::new(lv(c), kappa).unwrap()
    }

    #[test]
    fn minkowski_examples() {
        assert_eq!(minkowski_inner(&lv(&[1., 0., 0.]), &lv(&[1., 0., 0.])).unwrap(), -1.0);
        assert_eq!(minkowski_inner(&lv(&[0., 2., -1.]), &lv(&[0., 2., -1.])).unwrap(), 5.0);
        let v = minkowski_inner(&lv(&[1.25, 0.75, 0.]), &lv(&[1., 0., 0.])).unwrap();
        assert_eq!(v, -1.25);
        assert_abs_diff_eq!(v, -(2f64.ln().cosh()), epsilon = 1e-15);
    }

    #[test]
    fn minkowski_dimension_mismatch() {
        let err = minkowski_inner(&lv(&[1., 0.]), &lv(&[1., 0., 0.])).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn vector_validation() {
        assert!(LorentzVector::new(vec![1.0]).is_err());
        assert!(LorentzVector::new(vec![1.0, f64::NAN]).is_err());
        assert!(HyperboloidPoint::new(lv(&[-1., 0., 0.]), 1.0).is_err());
        assert!(HyperboloidPoint::new(lv(&[1.1, 0., 0.]), 1.0).is_err());
        assert!(HyperboloidPoint::new(lv(&[1., 0., 0.]), 0.0).is_err());
    }

    #[test]
    fn riemannian_inner_examples() {
        let o1 = HyperboloidPoint::origin(2, 1.0).unwrap();
        let o2 = HyperboloidPoint::origin(2, 2.0).unwrap();
        let g1 = TangentVector::new(o1.clone(), lv(&[0., 1., 0.])).unwrap();
        assert_eq!(riemannian_inner(&g1, &g1).unwrap(), 1.0);
        let g2 = TangentVector::new(o2, lv(&[0., 1., 0.])).unwrap();
        assert_eq!(riemannian_inner(&g2, &g2).unwrap(), 0.25);
        let g = TangentVector::new(o1.clone(), lv(&[0., 2., -1.])).unwrap();
        let h = TangentVector::new(o1, lv(&[0., 1., 1.])).unwrap();
        assert_eq!(riemannian_inner(&g, &h).unwrap(), 1.0);
    }

    #[test]
    fn riemannian_inner_rejects_mismatched_bases() {
        let o = HyperboloidPoint::origin(2, 1.0).unwrap();
        let x = point(&[1.25, 0.75, 0.], 1.0);
        let g = TangentVector::new(o, lv(&[0., 0., 1.])).unwrap();
        let h = TangentVector::new(x, lv(&[0., 0., 1.])).unwrap();
        assert!(matches!(riemannian_inner(&g, &h), Err(Error::Usage(_))));
    }

    #[test]
    fn tangent_validation() {
        let o = HyperboloidPoint::origin(2, 1.0).unwrap();
        assert!(TangentVector::new(o, lv(&[0.5, 1., 0.])).is_err());
    }

    #[test]
    fn distance_examples() {
        let o = HyperboloidPoint::origin(2, 1.0).unwrap();
        assert_eq!(distance(&o, &o).unwrap(), 0.0);
        let y = point(&[1.25, 0.75, 0.], 1.0);
        assert_abs_diff_eq!(distance(&o, &y).unwrap(), 2f64.ln(), epsilon = 1e-15);
        let o2 = HyperboloidPoint::origin(2, 2.0).unwrap();
        let y2 = point(&[1.25, 0.75, 0.], 2.0);
        assert_abs_diff_eq!(distance(&o2, &y2).unwrap(), 2f64.ln() / 2.0, epsilon = 1e-15);
    }

    #[test]
    fn distance_rejects_other_sheet_and_mixed_kappa() {
        let o = HyperboloidPoint::origin(1, 1.0).unwrap();
        // Inner product -<X,Y> < 1 cannot come from two points on the sheet.
        let bogus = HyperboloidPoint {
            coords: lv(&[0.5, 0.0]),
            kappa: 1.0,
        };
        assert!(matches!(distance(&o, &bogus), Err(Error::Numeric(_))));
        let o2 = HyperboloidPoint::origin(1, 2.0).unwrap();
        assert!(matches!(distance(&o, &o2), Err(Error::Usage(_))));
    }

    #[test]
    fn log_map_examples() {
        let o = HyperboloidPoint::origin(2, 1.0).unwrap();
        assert!(log_map(&o, &o).unwrap().is_zero());
        let y = point(&[1.25, 0.75, 0.], 1.0);
        let v = log_map(&o, &y).unwrap();
        let c = v.coords().as_slice();
        assert_abs_diff_eq!(c[0], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(c[1], 2f64.ln(), epsilon = 1e-15);
        assert_abs_diff_eq!(c[2], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(v.riemannian_norm(), 2f64.ln(), epsilon = 1e-15);
    }

    #[test]
    fn exp_map_examples() {
        let o = HyperboloidPoint::origin(2, 1.0).unwrap();
        assert_eq!(exp_map(&o, &TangentVector::zero(o.clone())).unwrap(), o);
        let v = TangentVector::new(o.clone(), lv(&[0., 2f64.ln(), 0.])).unwrap();
        let y = exp_map(&o, &v).unwrap();
        for (a, b) in y.coords().as_slice().iter().zip([1.25, 0.75, 0.0]) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-14);
        }
        let v = TangentVector::new(o.clone(), lv(&[0., 0.8, 0.])).unwrap();
        let y = exp_map(&o, &v).unwrap();
        assert_abs_diff_eq!(y.coords().as_slice()[0], 1.337434946, epsilon = 1e-8);
        assert_abs_diff_eq!(y.coords().as_slice()[1], 0.888105982, epsilon = 1e-8);
    }

    #[test]
    fn exp_map_rejects_foreign_tangent() {
        let o = HyperboloidPoint::origin(2, 1.0).unwrap();
        let x = point(&[1.25, 0.75, 0.], 1.0);
        let v = TangentVector::new(x, lv(&[0., 0., 1.])).unwrap();
        assert!(exp_map(&o, &v).is_err());
    }

    #[test]
    fn renormalize_examples() {
        let p = HyperboloidPoint::normalized(lv(&[2., 0., 0.]), 1.0).unwrap();
        assert_eq!(p.coords().as_slice(), &[1., 0., 0.]);
        let p = HyperboloidPoint::normalized(lv(&[1.2500001, 0.75, 0.]), 1.0).unwrap();
        assert!(p.sheet_defect().abs() <= 1e-14);
        let o = HyperboloidPoint::origin(2, 1.0).unwrap();
        assert_eq!(o.renormalize().unwrap(), o);
        assert!(HyperboloidPoint::normalized(lv(&[0., 1., 0.]), 1.0).is_err());
        assert!(HyperboloidPoint::normalized(lv(&[-2., 0., 0.]), 1.0).is_err());
    }

    #[test]
    fn projection_examples() {
        let o = HyperboloidPoint::origin(2, 1.0).unwrap();
        let p = project_to_tangent(&o, &lv(&[5., 2., -1.])).unwrap();
        assert_eq!(p.coords().as_slice(), &[0., 2., -1.]);
        let p = project_to_tangent(&o, &lv(&[0., 2., -1.])).unwrap();
        assert_eq!(p.coords().as_slice(), &[0., 2., -1.]);
        let p = project_to_tangent(&o, &lv(&[3., 0., 0.])).unwrap();
        assert!(p.is_zero());
    }

    #[test]
    fn theta_over_sinh_is_continuous_at_cutoff() {
        let below = theta_over_sinh(SERIES_CUTOFF * (1.0 - 1e-12));
        let above = theta_over_sinh(SERIES_CUTOFF);
        assert_abs_diff_eq!(below, above, epsilon = 1e-15);
        assert_eq!(theta_over_sinh(0.0), 1.0);
    }
}
