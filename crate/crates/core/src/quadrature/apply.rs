use num_complex::Complex;

use super::tensor::{integrate_4d_fallible, integrate_planar_fallible, AngularRule};
use super::{IntegralResult, QuadConfig, Region};
use crate::error::{Error, Result};
use crate::kernels::{HPoint, KernelId, Membership};
use crate::scalar::Real;

/// ∫ K(z, w) f(w) dV(w) over the kernel's Hartogs triangle.
///
/// The mesh is split at |w2| = |z2| and at the fiber radius of z1, with
/// angular grids aligned to the arguments of z.
pub fn apply_kernel<T, F>(id: &KernelId, f: F, z: &HPoint<T>, cfg: &QuadConfig) -> Result<IntegralResult<T>>
where
    T: Real,
    F: Fn(&HPoint<T>) -> Complex<T> + Sync,
{
    id.validate()?;
    let shape =
        id.shape().ok_or_else(|| Error::ShapeMismatch("disc kernels act on the disc; use apply_disc_kernel".into()))?;
    z.check_member(shape, Membership::Strict)?;
    let region = Region::Hartogs4D { shape, delta_cut: 0.0 };
    integrate_4d_fallible(&region, |s| Ok(id.eval_interior(z, &s.w)? * f(&s.w)), Some(z), cfg)
}

/// ∫_D K(z, w) f(w) dA(w) for the disc kernels.
pub fn apply_disc_kernel<T, F>(id: &KernelId, f: F, z: Complex<T>, cfg: &QuadConfig) -> Result<IntegralResult<T>>
where
    T: Real,
    F: Fn(Complex<T>) -> Complex<T> + Sync,
{
    id.validate()?;
    if !id.is_disc() {
        return Err(Error::ShapeMismatch("not a disc kernel".into()));
    }
    if z.norm() >= T::one() {
        return Err(Error::DomainMembership(format!("|z| < 1 violated (|z| = {})", z.norm())));
    }
    integrate_planar_fallible(
        &Region::unit_disc(),
        |s| Ok(id.eval_disc_interior(z, s.w) * f(s.w)),
        AngularRule::Periodic,
        cfg,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disc_reproduces_cubic() {
        let z = Complex::new(0.4, 0.0);
        let r = apply_disc_kernel(&KernelId::Disc, |w: Complex<f64>| w.powi(3), z, &QuadConfig::default()).unwrap();
        assert!((r.value - Complex::new(0.064, 0.0)).norm() < 1e-8);
    }

    #[test]
    fn thin_projection_constant() {
        let z = HPoint::real(0.1, 0.6);
        let r = apply_kernel(
            &KernelId::ThinHartogs { n: 1 },
            |w: &HPoint<f64>| w.z1 * w.z2.conj(),
            &z,
            &QuadConfig::default(),
        )
        .unwrap();
        // target index (1,-1): constant ‖z1‖²/‖z1 z2^{-1}‖² = 2/3
        let expected = 2.0 / 3.0 * 0.1 / 0.6;
        assert!((r.value.re - expected).abs() < 1e-4, "{:?}", r.value);
    }

    #[test]
    fn disc_kernels_are_rejected_on_c2() {
        let z = HPoint::real(0.1, 0.6);
        assert!(matches!(
            apply_kernel(&KernelId::Disc, |w: &HPoint<f64>| w.z1, &z, &QuadConfig::default()),
            Err(Error::ShapeMismatch(_))
        ));
    }
}
