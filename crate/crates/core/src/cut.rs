//! Exact Euclidean cuts in the Klein chart.
//!
//! For `g` tangent at `X = X(c)` and any `Y = X(u)`, tangency gives
//! `<g,Y>_L = a(g)^T (u - c) / sqrt(1 - |u|^2)` with
//! `a(g) = (<g,E_1>_L, ..., <g,E_d>_L)`. Since `<g, log_X Y>_X` is a positive
//! multiple of `<g,Y>_L`, the Riemannian subgradient halfspace is exactly the
//! affine halfspace `a(g)^T (u - c) <= 0`.

use nalgebra::DVector;

use crate::error::{usage, Error, Result};
use crate::klein::{to_klein, LorentzFrame};
use crate::lorentz::{lorentz, lorentz_angle, theta_over_sinh, HyperboloidPoint, TangentVector};

/// Relative threshold under which a subgradient's spatial part counts as zero.
pub const ZERO_SUBGRADIENT_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CutKind {
    Subgradient,
    Feasibility,
}

/// The halfspace `{u : normal^T (u - center) <= 0}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Cut {
    normal: DVector<f64>,
    center: DVector<f64>,
    kind: CutKind,
}

impl Cut {
    pub fn new(normal: DVector<f64>, center: DVector<f64>, kind: CutKind) -> Result<Self> {
        if normal.len() != center.len() {
            return Err(Error::DimensionMismatch {
                expected: center.len(),
                found: normal.len(),
            });
        }
        if normal.iter().chain(center.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Numeric("non-finite cut data".into()));
        }
        Ok(Self { normal, center, kind })
    }

    pub fn normal(&self) -> &DVector<f64> {
        &self.normal
    }

    pub fn center(&self) -> &DVector<f64> {
        &self.center
    }

    pub fn kind(&self) -> CutKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.normal.len()
    }

    /// The normal scaled to unit Euclidean length; the halfspace is unchanged.
    pub fn unit_normal(&self) -> Result<DVector<f64>> {
        let n = self.normal.norm();
        if !(n > 0.0) {
            return Err(usage("cut normal is zero"));
        }
        Ok(&self.normal / n)
    }

    /// `normal^T (u - center)`; nonpositive exactly on the kept side.
    pub fn evaluate(&self, u: &[f64]) -> f64 {
        self.normal
            .iter()
            .zip(self.center.iter())
            .zip(u)
            .map(|((a, c), x)| a * (x - c))
            .sum()
    }
}

/// Result of turning an oracle answer into a cut.
#[derive(Clone, Debug, PartialEq)]
pub enum CutOutcome {
    Cut(Cut),
    /// The subgradient vanished, so the queried point is a global minimizer.
    Optimal,
}

/// Central cut at `to_klein(frame, x)` with normal `a(g)`.
pub fn subgradient_cut(frame: &LorentzFrame, x: &HyperboloidPoint, g: &TangentVector) -> Result<CutOutcome> {
    if !g.base().coincides_with(x) {
        return Err(usage("subgradient is not based at the queried point"));
    }
    // Re-validate tangency: raw tangent vectors can come from user oracles.
    TangentVector::new(x.clone(), g.coords().clone())?;
    let normal = frame.spatial_components(g.coords().as_dvector());
    if normal.norm() <= ZERO_SUBGRADIENT_TOL * (1.0 + g.coords().sup_norm()) {
        return Ok(CutOutcome::Optimal);
    }
    let center = to_klein(frame, x)?;
    Ok(CutOutcome::Cut(Cut::new(
        normal,
        center.into_dvector(),
        CutKind::Subgradient,
    )?))
}

/// Feasibility cut `c^T (u - c) <= 0` at an infeasible center `|c| > R_s`.
/// It keeps the whole closed ball of radius `R_s`.
pub fn feasibility_cut(c: &DVector<f64>, klein_radius: f64) -> Result<Cut> {
    let norm = c.norm();
    if norm <= klein_radius {
        return Err(usage(format!(
            "center norm {norm} is feasible (R_s = {klein_radius}); query the oracle instead"
        )));
    }
    Cut::new(c.clone(), c.clone(), CutKind::Feasibility)
}

/// `<g, log_X Y>_X` evaluated as `(theta / (kappa^2 sinh theta)) <g,Y>_L`.
pub fn lorentz_pairing(g: &TangentVector, y: &HyperboloidPoint) -> Result<f64> {
    let x = g.base();
    let theta = lorentz_angle(x, y)?;
    let kappa = x.kappa();
    Ok(theta_over_sinh(theta) * lorentz(g.coords().as_dvector(), y.coords().as_dvector()) / (kappa * kappa))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::klein::{from_klein, KleinPoint};
    use crate::lorentz::{log_map, riemannian_inner, LorentzVector};
    use approx::assert_abs_diff_eq;

    fn lv(c: &[f64]) -> LorentzVector {
        LorentzVector::new(c.to_vec()).unwrap()
    }

    #[test]
    fn subgradient_cut_at_origin() {
        let frame = LorentzFrame::canonical(2, 1.0).unwrap();
        let o = frame.base_point();
        let g = TangentVector::new(o.clone(), lv(&[0., 2., -1.])).unwrap();
        match subgradient_cut(&frame, &o, &g).unwrap() {
            CutOutcome::Cut(cut) => {
                assert_eq!(cut.normal().as_slice(), &[2.0, -1.0]);
                assert_eq!(cut.center().as_slice(), &[0.0, 0.0]);
                assert_eq!(cut.kind(), CutKind::Subgradient);
            }
            CutOutcome::Optimal => panic!("expected a cut"),
        }
    }

    #[test]
    fn zero_subgradient_certifies_optimality() {
        let frame = LorentzFrame::canonical(2, 1.0).unwrap();
        let o = frame.base_point();
        let g = TangentVector::zero(o.clone());
        assert_eq!(subgradient_cut(&frame, &o, &g).unwrap(), CutOutcome::Optimal);
    }

    #[test]
    fn cut_sign_matches_riemannian_side() {
        let frame = LorentzFrame::canonical(2, 1.0).unwrap();
        let x = HyperboloidPoint::new(lv(&[1.25, 0.75, 0.]), 1.0).unwrap();
        // Tangency -1.25 g0 + 0.75 = 0 fixes g0 = 0.6 for a(g) = (1, 0).
        let g = TangentVector::new(x.clone(), lv(&[0.6, 1.0, 0.0])).unwrap();
        let CutOutcome::Cut(cut) = subgradient_cut(&frame, &x, &g).unwrap() else {
            panic!("expected a cut");
        };
        assert_abs_diff_eq!(cut.normal()[0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(cut.normal()[1], 0.0, epsilon = 1e-15);
        let u = [0.7, 0.0];
        assert_abs_diff_eq!(cut.evaluate(&u), 0.1, epsilon = 1e-14);
        let y = from_klein(&frame, &KleinPoint::new(u.to_vec()).unwrap()).unwrap();
        let inner = riemannian_inner(&g, &log_map(&x, &y).unwrap()).unwrap();
        assert!(inner > 0.0);
    }

    #[test]
    fn subgradient_cut_rejects_foreign_or_non_tangent() {
        let frame = LorentzFrame::canonical(2, 1.0).unwrap();
        let o = frame.base_point();
        let x = HyperboloidPoint::new(lv(&[1.25, 0.75, 0.]), 1.0).unwrap();
        let g = TangentVector::new(x, lv(&[0.6, 1.0, 0.0])).unwrap();
        assert!(matches!(subgradient_cut(&frame, &o, &g), Err(Error::Usage(_))));
    }

    #[test]
    fn feasibility_cut_examples() {
        let c = DVector::from_vec(vec![1.2, 0.0]);
        let cut = feasibility_cut(&c, 0.96).unwrap();
        assert_eq!(cut.normal().as_slice(), &[1.2, 0.0]);
        assert_eq!(cut.kind(), CutKind::Feasibility);
        assert_abs_diff_eq!(cut.evaluate(&[0.96, 0.0]), -0.288, epsilon = 1e-14);
        assert_abs_diff_eq!(cut.evaluate(&[-0.96, 0.0]), -2.592, epsilon = 1e-14);
        assert!(feasibility_cut(&DVector::from_vec(vec![0.5, 0.0]), 0.96).is_err());
    }

    #[test]
    fn pairing_examples() {
        let o = HyperboloidPoint::origin(2, 1.0).unwrap();
        let y = HyperboloidPoint::new(lv(&[1.25, 0.75, 0.]), 1.0).unwrap();
        assert_eq!(lorentz_pairing(&TangentVector::zero(o.clone()), &y).unwrap(), 0.0);
        let g = TangentVector::new(o, lv(&[0., 1., 0.])).unwrap();
        assert_abs_diff_eq!(lorentz_pairing(&g, &y).unwrap(), 2f64.ln(), epsilon = 1e-15);

        let o2 = HyperboloidPoint::origin(2, 2.0).unwrap();
        let y2 = HyperboloidPoint::new(lv(&[1.25, 0.75, 0.]), 2.0).unwrap();
        let g2 = TangentVector::new(o2, lv(&[0., 1., 0.])).unwrap();
        assert_abs_diff_eq!(lorentz_pairing(&g2, &y2).unwrap(), 2f64.ln() / 4.0, epsilon = 1e-15);
    }

    #[test]
    fn unit_normal_rejects_zero() {
        let cut = Cut::new(DVector::zeros(2), DVector::zeros(2), CutKind::Subgradient).unwrap();
        assert!(cut.unit_normal().is_err());
    }
}
