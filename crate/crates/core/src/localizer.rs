//! Euclidean localization bodies: the central-cut ellipsoid for `d >= 2` and
//! the midpoint interval for `d = 1`.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use serde::{Deserialize, Serialize};

use crate::cut::Cut;
use crate::error::{usage, Error, Result};

/// Slack applied to membership tests.
pub const CONTAINS_SLACK: f64 = 1e-9;

/// Interval between full Cholesky definiteness checks.
const FACTOR_CHECK_PERIOD: usize = 50;

/// `E(c, Q) = {u : (u-c)^T Q^{-1} (u-c) <= 1}` with `Q` symmetric positive definite.
#[derive(Clone, Debug, PartialEq)]
pub struct Ellipsoid {
    center: DVector<f64>,
    shape: DMatrix<f64>,
    updates: usize,
}

impl Ellipsoid {
    pub fn new(center: DVector<f64>, shape: DMatrix<f64>) -> Result<Self> {
        let d = center.len();
        if d < 2 {
            return Err(usage("ellipsoids need d >= 2; use IntervalState for d = 1"));
        }
        if shape.nrows() != d || shape.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: shape.nrows(),
            });
        }
        let asym = (&shape - shape.transpose()).amax();
        if asym > 1e-12 * (1.0 + shape.amax()) {
            return Err(usage(format!("shape matrix is not symmetric (defect {asym:e})")));
        }
        if Cholesky::new(shape.clone()).is_none() {
            return Err(usage("shape matrix is not positive definite"));
        }
        Ok(Self {
            center,
            shape,
            updates: 0,
        })
    }

    /// The ball `E(0, radius^2 I)`.
    pub fn ball(d: usize, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(usage("ball radius must be positive"));
        }
        Self::new(DVector::zeros(d), DMatrix::identity(d, d) * (radius * radius))
    }

    pub fn center(&self) -> &DVector<f64> {
        &self.center
    }

    pub fn shape(&self) -> &DMatrix<f64> {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    /// Number of cuts absorbed since construction.
    pub fn updates(&self) -> usize {
        self.updates
    }

    fn factor(&self) -> Option<Cholesky<f64, Dyn>> {
        Cholesky::new(self.shape.clone())
    }

    /// `log det Q`, from a Cholesky factorization.
    pub fn log_det(&self) -> Result<f64> {
        let chol = self.factor().ok_or(Error::Breakdown {
            iteration: self.updates,
            quad_form: f64::NAN,
        })?;
        Ok(2.0 * chol.l().diagonal().iter().map(|v| v.ln()).sum::<f64>())
    }

    /// `(u-c)^T Q^{-1} (u-c) <= 1 + 1e-9`, solved through a factorization.
    pub fn contains(&self, u: &[f64]) -> Result<bool> {
        Ok(self.mahalanobis_sq(u)? <= 1.0 + CONTAINS_SLACK)
    }

    /// `(u-c)^T Q^{-1} (u-c)`.
    pub fn mahalanobis_sq(&self, u: &[f64]) -> Result<f64> {
        if u.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: u.len(),
            });
        }
        let chol = self.factor().ok_or(Error::Breakdown {
            iteration: self.updates,
            quad_form: f64::NAN,
        })?;
        let diff = DVector::from_column_slice(u) - &self.center;
        let y = chol
            .l_dirty()
            .solve_lower_triangular(&diff)
            .ok_or_else(|| Error::Numeric("singular Cholesky factor".into()))?;
        Ok(y.norm_squared())
    }

    /// Central-cut update with an arbitrary nonzero normal through the current center:
    ///
    /// ```text
    /// b  = Q a / sqrt(a^T Q a)
    /// c+ = c - b / (d+1)
    /// Q+ = d^2/(d^2-1) (Q - 2/(d+1) b b^T)
    /// ```
    pub(crate) fn cut_through_center(&mut self, normal: &DVector<f64>) -> Result<()> {
        let d = self.dim();
        if normal.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: normal.len(),
            });
        }
        let norm = normal.norm();
        if !(norm > 0.0) {
            return Err(usage("cut normal is zero"));
        }
        let a = normal / norm;
        let qa = &self.shape * &a;
        let quad = a.dot(&qa);
        let iteration = self.updates;
        if !(quad > 0.0) {
            return Err(Error::Breakdown {
                iteration,
                quad_form: quad,
            });
        }
        let df = d as f64;
        let b = qa / quad.sqrt();
        self.center.axpy(-1.0 / (df + 1.0), &b, 1.0);
        self.shape.ger(-2.0 / (df + 1.0), &b, &b, 1.0);
        self.shape *= df * df / (df * df - 1.0);
        let sym = (&self.shape + self.shape.transpose()) * 0.5;
        self.shape = sym;
        self.updates += 1;
        if self.updates.is_multiple_of(FACTOR_CHECK_PERIOD) && self.factor().is_none() {
            return Err(Error::Breakdown {
                iteration,
                quad_form: quad,
            });
        }
        Ok(())
    }
}

/// Applies a central cut; `cut.center` must coincide with the ellipsoid center.
pub fn ellipsoid_update(ellipsoid: &Ellipsoid, cut: &Cut) -> Result<Ellipsoid> {
    if cut.dim() != ellipsoid.dim() {
        return Err(Error::DimensionMismatch {
            expected: ellipsoid.dim(),
            found: cut.dim(),
        });
    }
    let offset = (cut.center() - ellipsoid.center()).amax();
    if offset > 1e-10 * (1.0 + ellipsoid.center().amax()) {
        return Err(usage(format!("cut is not central (offset {offset:e})")));
    }
    let mut next = ellipsoid.clone();
    next.cut_through_center(&cut.unit_normal()?)?;
    Ok(next)
}

/// `vol(E+)/vol(E) = d^d / ((d+1) (d^2-1)^((d-1)/2))`, evaluated in logs.
pub fn ellipsoid_volume_ratio(d: usize) -> Result<f64> {
    if d < 2 {
        return Err(usage("the central-cut ellipsoid ratio is defined for d >= 2"));
    }
    let df = d as f64;
    let log_ratio = df * df.ln() - (df + 1.0).ln() - 0.5 * (df - 1.0) * (df * df - 1.0).ln();
    Ok(log_ratio.exp())
}

/// `I = [lo, hi]`, the one-dimensional localization body.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntervalState {
    lo: f64,
    hi: f64,
}

impl IntervalState {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(usage(format!("invalid interval [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        self.lo + 0.5 * (self.hi - self.lo)
    }

    pub fn contains(&self, u: f64) -> bool {
        u >= self.lo - CONTAINS_SLACK && u <= self.hi + CONTAINS_SLACK
    }
}

/// Midpoint bisection: a positive normal keeps the left half, a negative one
/// the right half. An interval that has collapsed to a point stays put.
pub fn interval_update(interval: &IntervalState, normal: f64) -> Result<IntervalState> {
    if normal == 0.0 || !normal.is_finite() {
        return Err(usage("interval update needs a nonzero finite normal"));
    }
    let mid = interval.midpoint();
    Ok(if normal > 0.0 {
        IntervalState {
            lo: interval.lo,
            hi: mid,
        }
    } else {
        IntervalState {
            lo: mid,
            hi: interval.hi,
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cut::CutKind;
    use approx::assert_abs_diff_eq;

    fn unit_ball_cut(normal: &[f64]) -> Ellipsoid {
        let e = Ellipsoid::ball(2, 1.0).unwrap();
        let cut = Cut::new(
            DVector::from_column_slice(normal),
            DVector::zeros(2),
            CutKind::Subgradient,
        )
        .unwrap();
        ellipsoid_update(&e, &cut).unwrap()
    }

    #[test]
    fn central_cut_on_unit_disk() {
        let e = unit_ball_cut(&[1.0, 0.0]);
        assert_abs_diff_eq!(e.center()[0], -1.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(e.center()[1], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(e.shape()[(0, 0)], 4.0 / 9.0, epsilon = 1e-15);
        assert_abs_diff_eq!(e.shape()[(1, 1)], 4.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(e.shape()[(0, 1)], 0.0, epsilon = 1e-15);
        let ratio = (e.log_det().unwrap() * 0.5).exp();
        assert_abs_diff_eq!(ratio, (16.0f64 / 27.0).sqrt(), epsilon = 1e-14);
        assert_eq!(e.updates(), 1);
    }

    #[test]
    fn central_cut_is_rotation_equivariant() {
        let e = unit_ball_cut(&[0.0, 1.0]);
        assert_abs_diff_eq!(e.center()[1], -1.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(e.shape()[(0, 0)], 4.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(e.shape()[(1, 1)], 4.0 / 9.0, epsilon = 1e-15);
    }

    #[test]
    fn normal_scale_does_not_matter() {
        assert_eq!(unit_ball_cut(&[5.0, 0.0]), unit_ball_cut(&[1.0, 0.0]));
    }

    #[test]
    fn update_rejects_off_center_cut() {
        let e = Ellipsoid::ball(2, 1.0).unwrap();
        let cut = Cut::new(
            DVector::from_vec(vec![1.0, 0.0]),
            DVector::from_vec(vec![0.1, 0.0]),
            CutKind::Subgradient,
        )
        .unwrap();
        assert!(matches!(ellipsoid_update(&e, &cut), Err(Error::Usage(_))));
    }

    #[test]
    fn breakdown_reports_iteration() {
        let mut e = Ellipsoid::ball(2, 1.0).unwrap();
        e.cut_through_center(&DVector::from_vec(vec![1.0, 0.0])).unwrap();
        e.shape = DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, 1.0]);
        let err = e.cut_through_center(&DVector::from_vec(vec![1.0, 0.0])).unwrap_err();
        assert!(matches!(err, Error::Breakdown { iteration: 1, .. }));
    }

    #[test]
    fn constructor_validation() {
        assert!(Ellipsoid::ball(1, 1.0).is_err());
        assert!(Ellipsoid::new(DVector::zeros(2), DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0])).is_err());
        assert!(Ellipsoid::new(DVector::zeros(2), DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0])).is_err());
    }

    #[test]
    fn volume_ratio_examples() {
        let r2 = ellipsoid_volume_ratio(2).unwrap();
        assert_abs_diff_eq!(r2, 4.0 / (3.0 * 3f64.sqrt()), epsilon = 1e-15);
        assert!(r2 < (-1.0f64 / 6.0).exp());
        let r16 = ellipsoid_volume_ratio(16).unwrap();
        let direct = 16f64.powi(16) / (17.0 * 255f64.powf(7.5));
        assert_abs_diff_eq!(r16, direct, epsilon = 1e-14);
        assert!(r16 < (-1.0f64 / 34.0).exp());
        assert!(ellipsoid_volume_ratio(1).is_err());
    }

    #[test]
    fn contains_examples() {
        let e = Ellipsoid::ball(3, 1.0).unwrap();
        assert!(e.contains(&[0.0, 0.0, 0.0]).unwrap());
        assert!(e.contains(&[1.0000000001, 0.0, 0.0]).unwrap());
        assert!(!e.contains(&[1.1, 0.0, 0.0]).unwrap());
        let e = Ellipsoid::new(
            DVector::from_vec(vec![-1.0 / 3.0, 0.0]),
            DMatrix::from_diagonal(&DVector::from_vec(vec![4.0 / 9.0, 4.0 / 3.0])),
        )
        .unwrap();
        assert!(e.contains(&[-1.0, 0.0]).unwrap());
        assert!(e.contains(&[0.0, 1.0]).unwrap());
        assert!(e.contains(&[0.0, -1.0]).unwrap());
    }

    #[test]
    fn interval_examples() {
        let i = IntervalState::new(-1.0, 1.0).unwrap();
        assert_eq!(
            interval_update(&i, 2.0).unwrap(),
            IntervalState::new(-1.0, 0.0).unwrap()
        );
        assert_eq!(
            interval_update(&i, -0.1).unwrap(),
            IntervalState::new(0.0, 1.0).unwrap()
        );
        assert!(interval_update(&i, 0.0).is_err());
        assert!(IntervalState::new(1.0, -1.0).is_err());
    }

    #[test]
    fn interval_length_halves() {
        let r = 0.75;
        let mut i = IntervalState::new(-r, r).unwrap();
        for k in 1..=40 {
            let sign = if k % 3 == 0 { 1.0 } else { -1.0 };
            i = interval_update(&i, sign).unwrap();
            assert_eq!(i.length(), 2.0 * r * 2f64.powi(-k));
        }
    }
}
