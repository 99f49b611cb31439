//! Pointwise kernel evaluation.
//!
//! Two-variable kernels are written in terms of s1 = z1·w̄1 and s2 = z2·w̄2.
//! The Taylor-modified kernels are defined by their subtraction identities;
//! the rational forms used for evaluation are regression-tested against those
//! identities.
//!
//! The disc Taylor remainder K_k is normalized like the disc kernel itself
//! (prefactor 1/π), so that K_k = B_D - (1/π) Σ_{j<k} (j+1) s^j holds exactly.

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{to_real, CDBound, GammaShape};
use crate::monomial::Basis;
use crate::scalar::Real;

/// A point (z1, z2) of C².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HPoint<T> {
    pub z1: Complex<T>,
    pub z2: Complex<T>,
}

/// Strict membership |z1|^m < |z2|^n, |z2| < 1; closure admits equality.
/// z2 = 0 is rejected in both modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    Strict,
    Closure,
}

impl<T: Real> HPoint<T> {
    pub fn new(z1: Complex<T>, z2: Complex<T>) -> Self {
        Self { z1, z2 }
    }

    pub fn real(z1: T, z2: T) -> Self {
        Self::new(Complex::new(z1, T::zero()), Complex::new(z2, T::zero()))
    }

    /// (0, z2), the projection onto the z2 axis.
    pub fn on_axis(&self) -> Self {
        Self::new(Complex::zero(), self.z2)
    }

    pub fn check_member(&self, shape: GammaShape, mode: Membership) -> Result<()> {
        let r1 = self.z1.norm();
        let r2 = self.z2.norm();
        if !(r1.is_finite() && r2.is_finite()) {
            return Err(Error::DomainMembership("non-finite coordinate".into()));
        }
        if r2 == T::zero() {
            return Err(Error::DomainMembership("z2 = 0".into()));
        }
        let lhs = r1.powi(shape.m() as i32);
        let rhs = r2.powi(shape.n() as i32);
        match mode {
            Membership::Strict => {
                if r2 >= T::one() {
                    return Err(Error::DomainMembership(format!("|z2| < 1 violated (|z2| = {r2})")));
                }
                if lhs >= rhs {
                    return Err(Error::DomainMembership(format!(
                        "|z1|^{} < |z2|^{} violated ({lhs} >= {rhs})",
                        shape.m(),
                        shape.n()
                    )));
                }
            }
            Membership::Closure => {
                if r2 > T::one() {
                    return Err(Error::DomainMembership(format!("|z2| <= 1 violated (|z2| = {r2})")));
                }
                if lhs > rhs {
                    return Err(Error::DomainMembership(format!(
                        "|z1|^{} <= |z2|^{} violated ({lhs} > {rhs})",
                        shape.m(),
                        shape.n()
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn is_member(&self, shape: GammaShape) -> bool {
        self.check_member(shape, Membership::Strict).is_ok()
    }
}

/// Truncation control for the monomial series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesTruncation {
    /// Cap on the weight n·a1 + m·a2.
    pub max_weight: u32,
    /// Stop once a weight shell adds less than `tail_tol` relative to the partial sum.
    pub tail_tol: f64,
}

impl Default for SeriesTruncation {
    fn default() -> Self {
        Self { max_weight: 400, tail_tol: 1e-14 }
    }
}

impl SeriesTruncation {
    pub fn new(max_weight: u32, tail_tol: f64) -> Result<Self> {
        if max_weight == 0 || !(tail_tol > 0.0) {
            return Err(Error::InvalidParameter("series truncation needs max_weight > 0 and tail_tol > 0".into()));
        }
        Ok(Self { max_weight, tail_tol })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    TailTolerance,
    WeightCap,
}

/// A partial sum together with how summation ended.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesValue<T> {
    pub value: Complex<T>,
    pub shells: usize,
    pub last_weight: i64,
    pub stop: StopReason,
}

impl<T: Real> SeriesValue<T> {
    pub fn converged(&self) -> Result<Complex<T>> {
        match self.stop {
            StopReason::TailTolerance => Ok(self.value),
            StopReason::WeightCap => Err(Error::InvalidParameter(format!(
                "series did not reach its tail tolerance before weight {}",
                self.last_weight
            ))),
        }
    }
}

/// Evaluation form of the disc kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiscForm {
    Closed,
    /// N-term partial sum.
    Series(usize),
}

/// Evaluation form of the sub-Bergman kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SeriesForm {
    Closed,
    Series(SeriesTruncation),
}

/// Every kernel the library evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kernel", rename_all = "snake_case")]
pub enum KernelId {
    /// B_D on the unit disc.
    Disc,
    /// B_D minus its degree-(k-1) Taylor part in s = z·w̄.
    DiscModified { k: u32 },
    /// Closed-form Bergman kernel of H_{1/n}.
    ThinHartogs { n: i64 },
    /// Bergman kernel of H_{m/n} as the orthonormal monomial series.
    HartogsSeries { shape: GammaShape, truncation: SeriesTruncation },
    /// B(z,w) - B((0,z2),(0,w2)) on H_{1/n}.
    ThinHartogsModified { n: i64 },
    /// L^∞ sub-Bergman kernel of H_1.
    SubBergmanInfinity,
    /// B̃^∞(z,w) - B̃^∞((0,z2),(0,w2)).
    SubBergmanInfinityModified,
}

impl KernelId {
    /// Domain shape; `None` for the disc kernels.
    pub fn shape(&self) -> Option<GammaShape> {
        match *self {
            KernelId::Disc | KernelId::DiscModified { .. } => None,
            KernelId::ThinHartogs { n } | KernelId::ThinHartogsModified { n } => GammaShape::thin(n).ok(),
            KernelId::HartogsSeries { shape, .. } => Some(shape),
            KernelId::SubBergmanInfinity | KernelId::SubBergmanInfinityModified => GammaShape::new(1, 1).ok(),
        }
    }

    pub fn is_disc(&self) -> bool {
        self.shape().is_none()
    }

    /// Index set whose monomials the kernel reproduces; `None` for the
    /// modified kernels, which reproduce nothing.
    pub fn reproduced_basis(&self) -> Option<Basis> {
        match self {
            KernelId::Disc | KernelId::ThinHartogs { .. } | KernelId::HartogsSeries { .. } => Some(Basis::Full),
            KernelId::SubBergmanInfinity => Some(Basis::BoundedSubspace),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            KernelId::DiscModified { k: 0 } => Err(Error::InvalidParameter("K_k needs k >= 1".into())),
            KernelId::ThinHartogs { n } | KernelId::ThinHartogsModified { n } if n < 1 => {
                Err(Error::InvalidParameter("H_{1/n} needs n >= 1".into()))
            }
            KernelId::HartogsSeries { truncation, .. } => {
                SeriesTruncation::new(truncation.max_weight, truncation.tail_tol).map(|_| ())
            }
            _ => Ok(()),
        }
    }

    /// Evaluates a kernel on H × H after a strict membership check.
    pub fn eval<T: Real>(&self, z: &HPoint<T>, w: &HPoint<T>) -> Result<Complex<T>> {
        self.validate()?;
        let shape = self
            .shape()
            .ok_or_else(|| Error::ShapeMismatch("disc kernels take one complex variable; use eval_disc".into()))?;
        z.check_member(shape, Membership::Strict)?;
        w.check_member(shape, Membership::Strict)?;
        let v = self.eval_interior(z, w)?;
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::DomainMembership("kernel denominator vanished".into()));
        }
        Ok(v)
    }

    /// Evaluates a disc kernel after checking |z|, |w| < 1.
    pub fn eval_disc<T: Real>(&self, z: Complex<T>, w: Complex<T>) -> Result<Complex<T>> {
        match *self {
            KernelId::Disc => disc_kernel(z, w, DiscForm::Closed),
            KernelId::DiscModified { k } => disc_modified_kernel(z, w, k),
            _ => Err(Error::ShapeMismatch("not a disc kernel".into())),
        }
    }

    /// No membership checks; callers guarantee strict interior points.
    pub(crate) fn eval_interior<T: Real>(&self, z: &HPoint<T>, w: &HPoint<T>) -> Result<Complex<T>> {
        Ok(match *self {
            KernelId::ThinHartogs { n } => thin_closed(n, z, w),
            KernelId::ThinHartogsModified { n } => thin_modified_closed(n, z, w),
            KernelId::HartogsSeries { shape, truncation } => {
                series_sum(shape, Basis::Full, z, w, &truncation).converged()?
            }
            KernelId::SubBergmanInfinity => sub_closed(z, w),
            KernelId::SubBergmanInfinityModified => sub_modified_closed(z, w),
            KernelId::Disc | KernelId::DiscModified { .. } => {
                return Err(Error::ShapeMismatch("disc kernel on C²".into()))
            }
        })
    }

    pub(crate) fn eval_disc_interior<T: Real>(&self, z: Complex<T>, w: Complex<T>) -> Complex<T> {
        match *self {
            KernelId::DiscModified { k } => disc_modified_closed(z * w.conj(), k),
            _ => disc_closed(z * w.conj()),
        }
    }
}

fn inv_pi<T: Real>() -> T {
    T::FRAC_1_PI()
}

fn inv_pi2<T: Real>() -> T {
    T::FRAC_1_PI() * T::FRAC_1_PI()
}

fn check_disc<T: Real>(z: Complex<T>) -> Result<()> {
    if z.norm() < T::one() {
        Ok(())
    } else {
        Err(Error::DomainMembership(format!("|z| < 1 violated (|z| = {})", z.norm())))
    }
}

fn disc_closed<T: Real>(s: Complex<T>) -> Complex<T> {
    let one = Complex::<T>::one();
    (one - s).powi(-2) * inv_pi::<T>()
}

fn disc_modified_closed<T: Real>(s: Complex<T>, k: u32) -> Complex<T> {
    let one = Complex::<T>::one();
    let kk = T::from_usize(k as usize);
    let num = s.powi(k as i32) * (kk + T::one()) - s.powi(k as i32 + 1) * kk;
    num / (one - s).powi(2) * inv_pi::<T>()
}

/// (1/π) Σ_{j<N} (j+1) s^j.
fn disc_partial_sum<T: Real>(s: Complex<T>, terms: usize) -> Complex<T> {
    let mut acc = Complex::zero();
    let mut power = Complex::one();
    for j in 0..terms {
        acc += power * T::from_usize(j + 1);
        power *= s;
    }
    acc * inv_pi::<T>()
}

/// B_D(z, w) = (1/π)(1 - z w̄)^{-2}.
pub fn disc_kernel<T: Real>(z: Complex<T>, w: Complex<T>, form: DiscForm) -> Result<Complex<T>> {
    check_disc(z)?;
    check_disc(w)?;
    let s = z * w.conj();
    Ok(match form {
        DiscForm::Closed => disc_closed(s),
        DiscForm::Series(n) => disc_partial_sum(s, n),
    })
}

/// K_k = [(k+1)s^k - k s^{k+1}] / (π (1-s)²).
pub fn disc_modified_kernel<T: Real>(z: Complex<T>, w: Complex<T>, k: u32) -> Result<Complex<T>> {
    if k == 0 {
        return Err(Error::InvalidParameter("K_k needs k >= 1".into()));
    }
    check_disc(z)?;
    check_disc(w)?;
    Ok(disc_modified_closed(z * w.conj(), k))
}

fn products<T: Real>(z: &HPoint<T>, w: &HPoint<T>) -> (Complex<T>, Complex<T>) {
    (z.z1 * w.z1.conj(), z.z2 * w.z2.conj())
}

fn thin_closed<T: Real>(n: i64, z: &HPoint<T>, w: &HPoint<T>) -> Complex<T> {
    let (s1, s2) = products(z, w);
    let a = s2.powi(n as i32);
    let one = Complex::<T>::one();
    a / ((one - s2).powi(2) * (a - s1).powi(2)) * inv_pi2::<T>()
}

fn thin_modified_closed<T: Real>(n: i64, z: &HPoint<T>, w: &HPoint<T>) -> Complex<T> {
    let (s1, s2) = products(z, w);
    let a = s2.powi(n as i32);
    let one = Complex::<T>::one();
    let two = T::cst(2.0);
    (s1 * a * two - s1 * s1) / (a * (one - s2).powi(2) * (a - s1).powi(2)) * inv_pi2::<T>()
}

fn sub_closed<T: Real>(z: &HPoint<T>, w: &HPoint<T>) -> Complex<T> {
    let (s1, s2) = products(z, w);
    let one = Complex::<T>::one();
    let two = T::cst(2.0);
    (s2 * s2 * two - s2.powi(3)) / ((s2 - s1).powi(2) * (one - s2).powi(2)) * inv_pi2::<T>()
}

fn sub_modified_closed<T: Real>(z: &HPoint<T>, w: &HPoint<T>) -> Complex<T> {
    let (s1, s2) = products(z, w);
    let one = Complex::<T>::one();
    let two = T::cst(2.0);
    let four = T::cst(4.0);
    let inner = s2 * four - s2 * s2 * two - s1 * two + s1 * s2;
    s1 * inner / ((one - s2).powi(2) * (s2 - s1).powi(2)) * inv_pi2::<T>()
}

fn checked_pair<T: Real>(shape: GammaShape, z: &HPoint<T>, w: &HPoint<T>) -> Result<()> {
    z.check_member(shape, Membership::Strict)?;
    w.check_member(shape, Membership::Strict)
}

fn finite_or_singular<T: Real>(v: Complex<T>) -> Result<Complex<T>> {
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(Error::DomainMembership("removable-singularity configuration z2^n w̄2^n = z1 w̄1".into()))
    }
}

/// B_{1/n}(z,w) = (1/π²) z2ⁿw̄2ⁿ / [(1 - z2w̄2)² (z2ⁿw̄2ⁿ - z1w̄1)²].
pub fn thin_hartogs_kernel<T: Real>(n: i64, z: &HPoint<T>, w: &HPoint<T>) -> Result<Complex<T>> {
    checked_pair(GammaShape::thin(n)?, z, w)?;
    finite_or_singular(thin_closed(n, z, w))
}

/// K(z,w) = B(z,w) - B((0,z2),(0,w2)) on H_{1/n}.
pub fn thin_hartogs_modified_kernel<T: Real>(n: i64, z: &HPoint<T>, w: &HPoint<T>) -> Result<Complex<T>> {
    checked_pair(GammaShape::thin(n)?, z, w)?;
    finite_or_singular(thin_modified_closed(n, z, w))
}

/// Bergman kernel of H_{m/n} summed over the L^2-allowable monomials.
pub fn hartogs_series_kernel<T: Real>(
    shape: GammaShape,
    z: &HPoint<T>,
    w: &HPoint<T>,
    trunc: &SeriesTruncation,
) -> Result<SeriesValue<T>> {
    checked_pair(shape, z, w)?;
    Ok(series_sum(shape, Basis::Full, z, w, trunc))
}

/// L^∞ sub-Bergman kernel of H_1.
pub fn subbergman_kernel<T: Real>(z: &HPoint<T>, w: &HPoint<T>, form: SeriesForm) -> Result<Complex<T>> {
    let shape = GammaShape::new(1, 1)?;
    checked_pair(shape, z, w)?;
    match form {
        SeriesForm::Closed => finite_or_singular(sub_closed(z, w)),
        SeriesForm::Series(trunc) => series_sum(shape, Basis::BoundedSubspace, z, w, &trunc).converged(),
    }
}

/// K̃^∞(z,w) = B̃^∞(z,w) - B̃^∞((0,z2),(0,w2)).
pub fn subbergman_modified_kernel<T: Real>(z: &HPoint<T>, w: &HPoint<T>) -> Result<Complex<T>> {
    checked_pair(GammaShape::new(1, 1)?, z, w)?;
    finite_or_singular(sub_modified_closed(z, w))
}

/// Σ_{a ∈ basis} z^a w̄^a / ‖z^a‖², ordered by weight W = n·a1 + m·a2.
///
/// With 1/‖z^a‖² = (2a1+2)(2W+2m+2n) / (4π² m), each weight shell is an
/// arithmetico-geometric series in r = s1^m / s2^n (|r| < 1 on H × H) and is
/// summed exactly. Summation stops when the last m shells together add less
/// than `tail_tol` relative to the partial sum (shells whose weight is not
/// reachable with a1 = 0 vanish identically on the z1 = 0 axis).
pub(crate) fn series_sum<T: Real>(
    shape: GammaShape,
    basis: Basis,
    z: &HPoint<T>,
    w: &HPoint<T>,
    trunc: &SeriesTruncation,
) -> SeriesValue<T> {
    let (m, n) = (shape.m(), shape.n());
    let (s1, s2) = products(z, w);
    let s1_zero = s1.norm() == T::zero();
    let one = Complex::<T>::one();
    let r = if s1_zero { Complex::zero() } else { s1.powi(m as i32) / s2.powi(n as i32) };
    let geo = (one - r).inv();
    let step_term = r * geo * geo * T::from_i64(2 * m);
    let min_weight = match basis {
        Basis::Full => 1 - m - n,
        Basis::BoundedSubspace => 0,
    };
    let cap = trunc.max_weight as i64;
    let tol = T::cst(trunc.tail_tol);
    let norm_const = T::cst(0.25) * inv_pi2::<T>() / T::from_i64(m);

    // smallest a1 >= 0 with n·a1 ≡ W (mod m)
    let n_inv = (0..m).find(|k| (n * k).rem_euclid(m) == 1 % m).unwrap_or(0);
    let first_a1 = |weight: i64| (weight * n_inv).rem_euclid(m);
    // s1^{a1} s2^{a2} at the first index of each residue class, advanced by s2 per step of m
    let mut lead: Vec<Complex<T>> = (0..m)
        .map(|k| {
            let weight = min_weight + k;
            let a1 = first_a1(weight);
            let a2 = (weight - n * a1) / m;
            if a1 > 0 && s1_zero {
                Complex::zero()
            } else {
                s1.powi(a1 as i32) * s2.powi(a2 as i32)
            }
        })
        .collect();

    let mut total = Complex::<T>::zero();
    let mut shells = 0usize;
    let mut recent: Vec<T> = Vec::with_capacity(m as usize);
    let mut weight = min_weight;
    loop {
        let class = ((weight - min_weight) % m) as usize;
        let a1 = first_a1(weight);
        let inner = geo * T::from_i64(2 * a1 + 2) + step_term;
        let shell = lead[class] * inner * (T::from_i64(2 * weight + 2 * m + 2 * n) * norm_const);
        lead[class] *= s2;
        total += shell;
        shells += 1;
        if recent.len() == m as usize {
            recent.remove(0);
        }
        recent.push(shell.norm());
        let recent_sum = recent.iter().fold(T::zero(), |a, &b| a + b);
        if weight >= min_weight + m && recent_sum <= tol * total.norm() {
            return SeriesValue { value: total, shells, last_weight: weight, stop: StopReason::TailTolerance };
        }
        if weight >= cap {
            return SeriesValue { value: total, shells, last_weight: weight, stop: StopReason::WeightCap };
        }
        weight += 1;
    }
}

/// π²|K(z,w)| divided by |z2|^c|w2|^d / (|1 - z2w̄2|² |z2ⁿw̄2ⁿ - z1ᵐw̄1ᵐ|²).
///
/// The bound carries the kernels' common 1/π² normalization, so a kernel that
/// saturates the bound has ratio 1.
pub fn kernel_bound_ratio<T: Real>(id: &KernelId, bound: &CDBound, z: &HPoint<T>, w: &HPoint<T>) -> Result<T> {
    let shape = id
        .shape()
        .ok_or_else(|| Error::ShapeMismatch("disc kernels have no (c, d) bound on a Hartogs triangle".into()))?;
    if shape != bound.shape {
        return Err(Error::ShapeMismatch(format!("kernel lives on H_{shape}, bound on H_{}", bound.shape)));
    }
    let k = id.eval(z, w)?;
    let (m, n) = (shape.m() as i32, shape.n() as i32);
    let one = Complex::<T>::one();
    let s2 = z.z2 * w.z2.conj();
    let sing = (z.z2 * w.z2.conj()).powi(n) - (z.z1 * w.z1.conj()).powi(m);
    let c = to_real::<T>(bound.c);
    let d = to_real::<T>(bound.d);
    let bound_value = z.z2.norm().powf(c) * w.z2.norm().powf(d) / ((one - s2).norm_sqr() * sing.norm_sqr());
    Ok(k.norm() * T::PI() * T::PI() / bound_value)
}
