use num_complex::Complex;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::tensor::{integrate_4d_fallible, integrate_planar_fallible, AngularRule, RadialSample};
use super::{IntegralResult, QuadConfig, Region};
use crate::error::{Error, Result};
use crate::exact::{int, to_real, CDBound, GammaShape, Rational};
use crate::kernels::{HPoint, KernelId, Membership};
use crate::scalar::Real;

/// 1 - x^k from x and 1 - x without cancellation.
fn one_minus_pow<T: Real>(x: T, comp: T, k: i64) -> T {
    let mut geometric = T::zero();
    let mut power = T::one();
    for _ in 0..k {
        geometric += power;
        power *= x;
    }
    comp * geometric
}

/// Per-sample ratios ∫_D (1-|w|²)^{-ε} |1 - z w̄|^{-2} |w|^{-A} dA(w) / (1-|z|²)^{-ε}.
pub fn forelli_rudin_ratio<T: Real>(
    epsilon: T,
    a: T,
    z_samples: &[Complex<T>],
    cfg: &QuadConfig,
) -> Result<Vec<(Complex<T>, IntegralResult<T>, T)>> {
    if !(epsilon > T::zero() && epsilon < T::one()) {
        return Err(Error::InvalidParameter(format!("epsilon = {epsilon} must lie in (0, 1)")));
    }
    if !(a < T::cst(2.0)) {
        return Err(Error::InvalidParameter(format!("A = {a} must be below 2")));
    }
    let one = Complex::new(T::one(), T::zero());
    z_samples
        .iter()
        .map(|&z| {
            if z.norm() >= T::one() {
                return Err(Error::DomainMembership(format!("|z| < 1 violated (|z| = {})", z.norm())));
            }
            let angular = if z.is_zero() { AngularRule::Periodic } else { AngularRule::PeakAt(z.arg().to_f64_lossy()) };
            let res = integrate_planar_fallible(
                &Region::unit_disc(),
                |s| {
                    let defect = s.r_comp * (T::one() + s.r);
                    let v = defect.powf(-epsilon) * s.r.powf(-a) / (one - z * s.w.conj()).norm_sqr();
                    Ok(Complex::new(v, T::zero()))
                },
                angular,
                cfg,
            )?;
            let ratio = res.value.re * (T::one() - z.norm_sqr()).powf(epsilon);
            Ok((z, res, ratio))
        })
        .collect()
}

/// h(w) = |w2|^R (|w2|^{2n} - |w1|^{2m}) (1 - |w2|²).
pub fn auxiliary_h<T: Real>(shape: GammaShape, r: T, w: &HPoint<T>) -> T {
    let (m, n) = (shape.m() as i32, shape.n() as i32);
    let r2 = w.z2.norm();
    r2.powf(r) * (r2.powi(2 * n) - w.z1.norm().powi(2 * m)) * (T::one() - r2 * r2)
}

/// h^{-ε} at a radial sample, assembled factor by factor.
fn auxiliary_h_neg_power<T: Real>(shape: GammaShape, r: T, eps: T, s: &RadialSample<T>) -> T {
    let n = shape.n();
    let two = T::cst(2.0);
    let middle = one_minus_pow(s.fiber, s.fiber_comp, 2 * shape.m());
    let outer = s.r2_comp * (T::one() + s.r2);
    s.r2.powf(-eps * (r + two * T::from_i64(n))) * middle.powf(-eps) * outer.powf(-eps)
}

/// Half-open window [lower, upper) of admissible Schur exponents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchurWindow {
    #[serde(with = "crate::exact::serde_rational")]
    pub lower: Rational,
    #[serde(with = "crate::exact::serde_rational")]
    pub upper: Rational,
}

impl SchurWindow {
    /// The disc window (0, 1) for h = 1 - |w|².
    pub fn disc() -> Self {
        Self { lower: int(0), upper: int(1) }
    }

    /// Exponents must also be positive, so 0 is never admitted.
    pub fn contains(&self, eps: Rational) -> bool {
        eps > int(0) && eps >= self.lower && eps < self.upper
    }

    pub fn midpoint(&self) -> Rational {
        (self.lower.max(int(0)) + self.upper) / int(2)
    }
}

/// Window α = (2n - c)/(2n + R), β = (d + 2n/m - 2n + 2)/(2n + R).
pub fn schur_window(bound: &CDBound, r: Rational) -> Result<SchurWindow> {
    if r < int(0) {
        return Err(Error::InvalidParameter("R must be nonnegative".into()));
    }
    let (m, n) = (int(bound.shape.m()), int(bound.shape.n()));
    let denom = int(2) * n + r;
    let lower = (int(2) * n - bound.c) / denom;
    let upper = (bound.d + int(2) * n / m - int(2) * n + int(2)) / denom;
    if lower >= upper {
        return Err(Error::InvalidParameter(format!("empty Schur window [{lower}, {upper})")));
    }
    Ok(SchurWindow { lower, upper })
}

/// Which auxiliary function a Schur probe uses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SchurWeight {
    /// h(w) = 1 - |w|² on the disc.
    DiscDefect,
    /// h(w) = |w2|^R (|w2|^{2n} - |w1|^{2m})(1 - |w2|²) with the window from `bound`.
    ThreeFactor { bound: CDBound, r: Rational },
}

/// A sample point: a disc point or a Hartogs point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EvalPoint<T> {
    Disc(Complex<T>),
    Hartogs(HPoint<T>),
}

/// Per-sample ratios ∫ |K(z, w)| h(w)^{-ε} dV(w) / h(z)^{-ε}.
pub fn schur_ratio<T: Real>(
    id: &KernelId,
    weight: SchurWeight,
    epsilon: Rational,
    z_samples: &[EvalPoint<T>],
    cfg: &QuadConfig,
) -> Result<Vec<(EvalPoint<T>, IntegralResult<T>, T)>> {
    id.validate()?;
    let window = match weight {
        SchurWeight::DiscDefect => SchurWindow::disc(),
        SchurWeight::ThreeFactor { bound, r } => schur_window(&bound, r)?,
    };
    if !window.contains(epsilon) {
        return Err(Error::InvalidParameter(format!(
            "epsilon = {epsilon} outside the admissible window [{}, {})",
            window.lower, window.upper
        )));
    }
    let eps = to_real::<T>(epsilon);
    z_samples
        .iter()
        .map(|point| match (weight, point) {
            (SchurWeight::DiscDefect, EvalPoint::Disc(z)) => {
                if !id.is_disc() {
                    return Err(Error::ShapeMismatch("h = 1 - |w|² needs a disc kernel".into()));
                }
                if z.norm() >= T::one() {
                    return Err(Error::DomainMembership(format!("|z| < 1 violated (|z| = {})", z.norm())));
                }
                let res = integrate_planar_fallible(
                    &Region::unit_disc(),
                    |s| {
                        let defect = s.r_comp * (T::one() + s.r);
                        Ok(Complex::new(id.eval_disc_interior(*z, s.w).norm() * defect.powf(-eps), T::zero()))
                    },
                    if z.is_zero() { AngularRule::Periodic } else { AngularRule::PeakAt(z.arg().to_f64_lossy()) },
                    cfg,
                )?;
                let ratio = res.value.re * (T::one() - z.norm_sqr()).powf(eps);
                Ok((*point, res, ratio))
            }
            (SchurWeight::ThreeFactor { bound, r }, EvalPoint::Hartogs(z)) => {
                let shape =
                    id.shape().ok_or_else(|| Error::ShapeMismatch("three-factor h needs a Hartogs kernel".into()))?;
                if shape != bound.shape {
                    return Err(Error::ShapeMismatch(format!("kernel on H_{shape}, weight on H_{}", bound.shape)));
                }
                z.check_member(shape, Membership::Strict)?;
                let rr = to_real::<T>(r);
                let res = integrate_4d_fallible(
                    &Region::Hartogs4D { shape, delta_cut: 0.0 },
                    |s| {
                        let k = id.eval_interior(z, &s.w)?;
                        Ok(Complex::new(k.norm() * auxiliary_h_neg_power(shape, rr, eps, &s.radial), T::zero()))
                    },
                    Some(z),
                    cfg,
                )?;
                let ratio = res.value.re * auxiliary_h(shape, rr, z).powf(eps);
                Ok((*point, res, ratio))
            }
            _ => Err(Error::InvalidParameter("sample point kind does not match the Schur weight".into())),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use std::f64::consts::PI;

    #[test]
    fn forelli_rudin_at_origin() {
        let cfg = QuadConfig::default();
        let out = forelli_rudin_ratio(0.5, 0.0, &[Complex::new(0.0, 0.0)], &cfg).unwrap();
        assert!((out[0].2 / (2.0 * PI) - 1.0).abs() < 1e-6, "{}", out[0].2);
        assert!(forelli_rudin_ratio(1.0, 0.0, &[Complex::new(0.0, 0.0)], &cfg).is_err());
        assert!(forelli_rudin_ratio(0.5, 2.0, &[Complex::new(0.0, 0.0)], &cfg).is_err());
    }

    #[test]
    fn auxiliary_h_examples() {
        let s = GammaShape::new(1, 1).unwrap();
        let t: f64 = 0.6;
        assert!((auxiliary_h(s, 2.0, &HPoint::real(0.0, t)) - t.powi(2) * t.powi(2) * (1.0 - t * t)).abs() < 1e-15);
        assert_eq!(auxiliary_h(s, 2.0, &HPoint::real(0.5, 0.5)), 0.0);
        assert_eq!(auxiliary_h(s, 2.0, &HPoint::real(0.0, 1.0)), 0.0);
    }

    #[test]
    fn window_examples() {
        let s = GammaShape::new(1, 1).unwrap();
        let w = schur_window(&CDBound::integers(1, 1, s), int(2)).unwrap();
        assert_eq!((w.lower, w.upper), (rat(1, 4), rat(3, 4)));
        assert!(w.contains(rat(1, 2)));
        assert!(!w.contains(int(0)));
        assert!(!SchurWindow::disc().contains(int(0)));
    }

    #[test]
    fn schur_rejects_zero_epsilon() {
        let s = GammaShape::new(1, 1).unwrap();
        let weight = SchurWeight::ThreeFactor { bound: CDBound::integers(1, 1, s), r: int(2) };
        let z = [EvalPoint::Hartogs(HPoint::real(0.0, 0.5))];
        assert!(schur_ratio(&KernelId::ThinHartogs { n: 1 }, weight, int(0), &z, &QuadConfig::default()).is_err());
    }
}
