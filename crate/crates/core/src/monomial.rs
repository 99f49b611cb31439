//! Closed-form L^p norms of Laurent monomials on H_{m/n}, exact projection of
//! the conjugated test monomials z1^{β1} z̄2^{β2}, and formal differentiation.
//!
//! In polar coordinates the p-th power of the norm of z1^{a1} z2^{a2} is
//!
//! ```text
//! 4π² ∫₀¹ r2^e dr2 / (p·a1 + 2),   e = p·a2 + 1 + (n/m)(p·a1 + 2),
//! ```
//!
//! finite exactly when e > -1. All values keep π² symbolic, so every
//! comparison in this module is an equality of rationals.

use num_complex::Complex;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{
    int, is_allowable, serde_rational, sobolev_failure_threshold, to_real, witness_index, FailureThreshold, GammaShape,
    LatticeIndex, Rational, SobolevOrder,
};
use crate::scalar::Real;

/// z1^{b1} z̄2^{b2}, smooth up to the closure of every H_{m/n}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TestMonomial {
    pub b1: u32,
    pub b2: u32,
}

impl TestMonomial {
    pub fn new(b1: u32, b2: u32) -> Self {
        Self { b1, b2 }
    }

    /// Index of |f|, i.e. of z1^{b1} z2^{b2}; same modulus as f.
    pub fn modulus_index(&self) -> LatticeIndex {
        LatticeIndex::new(self.b1 as i64, self.b2 as i64).expect("b1 >= 0")
    }

    /// The single basis index (b1, -b2) that pairs nontrivially with f.
    pub fn target_index(&self) -> LatticeIndex {
        LatticeIndex::new(self.b1 as i64, -(self.b2 as i64)).expect("b1 >= 0")
    }

    pub fn eval<T: Real>(&self, z1: Complex<T>, z2: Complex<T>) -> Complex<T> {
        z1.powi(self.b1 as i32) * z2.conj().powi(self.b2 as i32)
    }
}

/// coeff · z1^{a1} z2^{a2}. A zero coefficient is the zero function and is
/// stored with index (0, 0).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LaurentMonomial {
    #[serde(with = "serde_rational")]
    coeff: Rational,
    idx: LatticeIndex,
}

impl LaurentMonomial {
    pub fn new(coeff: Rational, idx: LatticeIndex) -> Self {
        if coeff.is_zero() {
            Self::zero()
        } else {
            Self { coeff, idx }
        }
    }

    pub fn monic(idx: LatticeIndex) -> Self {
        Self::new(Rational::one(), idx)
    }

    pub fn zero() -> Self {
        Self { coeff: Rational::zero(), idx: LatticeIndex::new(0, 0).expect("valid") }
    }

    pub fn coeff(&self) -> Rational {
        self.coeff
    }

    pub fn idx(&self) -> LatticeIndex {
        self.idx
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    pub fn eval<T: Real>(&self, z1: Complex<T>, z2: Complex<T>) -> Complex<T> {
        if self.is_zero() {
            return Complex::new(T::zero(), T::zero());
        }
        z1.powi(self.idx.a1() as i32) * z2.powi(self.idx.a2() as i32) * to_real::<T>(self.coeff)
    }
}

impl std::fmt::Display for LaurentMonomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        write!(f, "({})·z1^{}·z2^{}", crate::exact::format_rational(&self.coeff), self.idx.a1(), self.idx.a2())
    }
}

/// How a divergent truncated norm grows as the cut |z2| > δ shrinks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "growth", rename_all = "snake_case")]
pub enum Divergence {
    /// r2-exponent exactly -1: growth ~ ln(1/δ).
    Logarithmic,
    /// r2-exponent e < -1: growth ~ δ^{order} with order = e + 1 < 0.
    Power {
        #[serde(with = "serde_rational")]
        order: Rational,
    },
}

/// The p-th power of an L^p norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NormValue {
    /// `pi_squared_multiple · π²`
    Finite {
        #[serde(with = "serde_rational")]
        pi_squared_multiple: Rational,
    },
    Infinite {
        divergence: Divergence,
    },
}

impl NormValue {
    pub fn is_finite(&self) -> bool {
        matches!(self, NormValue::Finite { .. })
    }

    pub fn to_real<T: Real>(&self) -> T {
        match self {
            NormValue::Finite { pi_squared_multiple } => to_real::<T>(*pi_squared_multiple) * T::PI() * T::PI(),
            NormValue::Infinite { .. } => T::infinity(),
        }
    }

    pub fn symbolic(&self) -> String {
        match self {
            NormValue::Finite { pi_squared_multiple } => {
                format!("({})π²", crate::exact::format_rational(pi_squared_multiple))
            }
            NormValue::Infinite { divergence: Divergence::Logarithmic } => "∞ (log)".to_string(),
            NormValue::Infinite { divergence: Divergence::Power { order } } => {
                format!("∞ (δ^{})", crate::exact::format_rational(order))
            }
        }
    }
}

/// The r2-exponent e = p·a2 + 1 + (n/m)(p·a1 + 2) of the reduced radial integral.
pub fn radial_exponent(shape: GammaShape, idx: LatticeIndex, p: Rational) -> Rational {
    p * int(idx.a2()) + Rational::one() + shape.fiber_exponent() * (p * int(idx.a1()) + int(2))
}

/// ∫_{H_{m/n}} |z1^{a1} z2^{a2}|^p dV, exactly.
pub fn monomial_lp_norm_pth_power(shape: GammaShape, idx: LatticeIndex, p: Rational) -> Result<NormValue> {
    if p < Rational::one() {
        return Err(Error::ExponentBelowOne(p));
    }
    let e = radial_exponent(shape, idx, p);
    let e1 = e + Rational::one();
    Ok(if e1.is_positive() {
        let inner = p * int(idx.a1()) + int(2);
        NormValue::Finite { pi_squared_multiple: int(4) / (inner * e1) }
    } else if e1.is_zero() {
        NormValue::Infinite { divergence: Divergence::Logarithmic }
    } else {
        NormValue::Infinite { divergence: Divergence::Power { order: e1 } }
    })
}

/// Target space of a projection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    /// All L^2-allowable monomials: the Bergman projection.
    Full,
    /// Bounded monomials {a1 >= 0, n·a1 + m·a2 >= 0}: the L^∞ sub-Bergman projection.
    ///
    /// This is the p → ∞ limit of the allowable sets. On H_1 it is the set the
    /// sub-Bergman kernel is built from; for other shapes it is an extension.
    BoundedSubspace,
}

impl Basis {
    pub fn contains(&self, shape: GammaShape, idx: LatticeIndex) -> bool {
        match self {
            Basis::Full => is_allowable(shape, int(2), idx).expect("p = 2 is valid"),
            Basis::BoundedSubspace => idx.weight(shape) >= 0,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Basis::Full => "L^2-allowable",
            Basis::BoundedSubspace => "bounded-monomial",
        }
    }
}

/// C = ⟨f, z^δ⟩ / ‖z^δ‖² with f = z1^{β1} z̄2^{β2} and δ = (β1, -β2):
/// C = (2 - 2β2 + (n/m)(2β1+2)) / (2 + (n/m)(2β1+2)).
pub fn projection_constant(shape: GammaShape, beta: TestMonomial, basis: Basis) -> Result<Rational> {
    let target = beta.target_index();
    if !basis.contains(shape, target) {
        return Err(Error::NotAllowable { a1: target.a1(), a2: target.a2(), basis: basis.name() });
    }
    let fiber = shape.fiber_exponent() * (int(2) * int(beta.b1 as i64) + int(2));
    let num = int(2) - int(2 * beta.b2 as i64) + fiber;
    let den = int(2) + fiber;
    Ok(num / den)
}

/// Projection of z1^{β1} z̄2^{β2} onto the span of `basis`: C·z1^{β1} z2^{-β2},
/// or zero when (β1, -β2) is outside the basis.
pub fn project_monomial(shape: GammaShape, beta: TestMonomial, basis: Basis) -> LaurentMonomial {
    match projection_constant(shape, beta, basis) {
        Ok(c) => LaurentMonomial::new(c, beta.target_index()),
        Err(_) => LaurentMonomial::zero(),
    }
}

fn falling_factorial(x: i64, k: u32) -> i64 {
    (0..k as i64).map(|i| x - i).product()
}

/// ∂^j_{z1} ∂^l_{z2} applied termwise.
pub fn differentiate(mono: LaurentMonomial, order: SobolevOrder) -> LaurentMonomial {
    if mono.is_zero() {
        return mono;
    }
    let (a1, a2) = (mono.idx.a1(), mono.idx.a2());
    if order.j as i64 > a1 {
        return LaurentMonomial::zero();
    }
    let factor = falling_factorial(a1, order.j) * falling_factorial(a2, order.l);
    let idx = LatticeIndex::new(a1 - order.j as i64, a2 - order.l as i64).expect("a1 - j >= 0");
    LaurentMonomial::new(mono.coeff * int(factor), idx)
}

/// Finiteness verdicts at one sampled exponent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessSample {
    #[serde(with = "serde_rational")]
    pub p: Rational,
    /// ‖f‖_p^p
    pub f_norm: NormValue,
    /// ‖z^γ‖_p^p for the monomial part z^γ of ∂^{(j,l)}Bf.
    pub derivative_norm: NormValue,
    /// p at or beyond the failure threshold.
    pub beyond_threshold: bool,
}

/// The full counterexample pipeline for one (shape, order).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub shape: GammaShape,
    pub order: SobolevOrder,
    pub beta: TestMonomial,
    pub projection: LaurentMonomial,
    pub derivative: LaurentMonomial,
    pub threshold: FailureThreshold,
    pub samples: Vec<WitnessSample>,
}

impl WitnessReport {
    /// f finite everywhere and the derivative infinite exactly at the sampled
    /// exponents on or above the threshold.
    pub fn verdicts_flip_at_threshold(&self) -> bool {
        self.samples.iter().all(|s| s.f_norm.is_finite() && s.derivative_norm.is_finite() != s.beyond_threshold)
    }
}

pub fn witness_report(shape: GammaShape, order: SobolevOrder, p_samples: &[Rational]) -> Result<WitnessReport> {
    let beta = witness_index(shape, order.j);
    let projection = project_monomial(shape, beta, Basis::Full);
    let derivative = differentiate(projection, order);
    let threshold = sobolev_failure_threshold(shape, order);
    let samples = p_samples
        .iter()
        .map(|&p| {
            Ok(WitnessSample {
                p,
                f_norm: monomial_lp_norm_pth_power(shape, beta.modulus_index(), p)?,
                derivative_norm: monomial_lp_norm_pth_power(shape, derivative.idx(), p)?,
                beyond_threshold: threshold.fails_at(p),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(WitnessReport { shape, order, beta, projection, derivative, threshold, samples })
}
