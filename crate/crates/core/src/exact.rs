//! Exact index calculus on H_{m/n} = {|z1|^{m/n} < |z2| < 1}.
//!
//! Everything here runs in `Ratio<i64>` arithmetic. The allowable-index test
//! involves a floor, which is discontinuous in `p`, so `p` never passes
//! through floating point on this path.
//!
//! Irrational γ is not representable. For irrational γ the Bergman projection
//! is known to be L^p bounded if and only if p = 2; none of the interval
//! machinery below applies to that case.

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{CdCondition, Error, Result};
use crate::monomial::TestMonomial;
use crate::scalar::Real;

/// Exact rational scalar. Always in lowest terms with a positive denominator.
pub type Rational = Ratio<i64>;

pub fn rat(num: i64, den: i64) -> Rational {
    Ratio::new(num, den)
}

pub fn int(v: i64) -> Rational {
    Ratio::from_integer(v)
}

pub fn to_real<T: Real>(r: Rational) -> T {
    T::from_i64(*r.numer()) / T::from_i64(*r.denom())
}

/// Renders `4/3`, `4`, `-1/2`.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `a/b`, an integer, or a terminating decimal such as `0.5` or `-1.25e0`
/// (exponent notation is not accepted).
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    if let Some((num, den)) = s.split_once('/') {
        let num: i64 = num.trim().parse().map_err(|_| bad())?;
        let den: i64 = den.trim().parse().map_err(|_| bad())?;
        if den == 0 {
            return Err(bad());
        }
        return Ok(rat(num, den));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let negative = whole.starts_with('-');
        let digits = whole.trim_start_matches(['-', '+']);
        if frac.is_empty() && digits.is_empty() {
            return Err(bad());
        }
        if !frac.chars().all(|c| c.is_ascii_digit()) || frac.len() > 15 {
            return Err(bad());
        }
        let whole: i64 = if digits.is_empty() { 0 } else { digits.parse().map_err(|_| bad())? };
        let scale = 10i64.pow(frac.len() as u32);
        let frac: i64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
        let magnitude = whole.checked_mul(scale).and_then(|w| w.checked_add(frac)).ok_or_else(bad)?;
        let value = rat(magnitude, scale);
        return Ok(if negative { -value } else { value });
    }
    s.parse::<i64>().map(int).map_err(|_| bad())
}

/// Serde adapter rendering a [`Rational`] as a `"num/den"` string.
pub mod serde_rational {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let raw = String::deserialize(d)?;
        parse_rational(&raw).map_err(serde::de::Error::custom)
    }
}

fn require_p(p: Rational) -> Result<()> {
    if p < Rational::one() {
        Err(Error::ExponentBelowOne(p))
    } else {
        Ok(())
    }
}

/// γ = m/n in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawShape")]
pub struct GammaShape {
    m: i64,
    n: i64,
}

#[derive(Deserialize)]
struct RawShape {
    m: i64,
    n: i64,
}

impl TryFrom<RawShape> for GammaShape {
    type Error = Error;

    fn try_from(raw: RawShape) -> Result<Self> {
        let shape = GammaShape::new(raw.m, raw.n)?;
        if shape.m != raw.m {
            return Err(Error::InvalidParameter(format!("shape {}/{} is not in lowest terms", raw.m, raw.n)));
        }
        Ok(shape)
    }
}

impl GammaShape {
    /// Reduces `m/n` to lowest terms; rejects nonpositive entries.
    pub fn new(m: i64, n: i64) -> Result<Self> {
        if m < 1 || n < 1 {
            return Err(Error::InvalidShape { m, n });
        }
        let g = m.gcd(&n);
        Ok(Self { m: m / g, n: n / g })
    }

    /// The thin triangle H_{1/n}.
    pub fn thin(n: i64) -> Result<Self> {
        Self::new(1, n)
    }

    pub fn m(&self) -> i64 {
        self.m
    }

    pub fn n(&self) -> i64 {
        self.n
    }

    pub fn gamma(&self) -> Rational {
        rat(self.m, self.n)
    }

    /// n/m, the exponent with |z1| < |z2|^{n/m}.
    pub fn fiber_exponent(&self) -> Rational {
        rat(self.n, self.m)
    }
}

impl std::fmt::Display for GammaShape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.m, self.n)
    }
}

/// Exponent pair of the Laurent monomial z1^{a1} z2^{a2}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawIndex")]
pub struct LatticeIndex {
    a1: i64,
    a2: i64,
}

#[derive(Deserialize)]
struct RawIndex {
    a1: i64,
    a2: i64,
}

impl TryFrom<RawIndex> for LatticeIndex {
    type Error = Error;

    fn try_from(raw: RawIndex) -> Result<Self> {
        LatticeIndex::new(raw.a1, raw.a2)
    }
}

impl LatticeIndex {
    pub fn new(a1: i64, a2: i64) -> Result<Self> {
        if a1 < 0 {
            return Err(Error::NegativeZ1Exponent { a1, a2 });
        }
        Ok(Self { a1, a2 })
    }

    pub fn a1(&self) -> i64 {
        self.a1
    }

    pub fn a2(&self) -> i64 {
        self.a2
    }

    /// n·a1 + m·a2.
    pub fn weight(&self, shape: GammaShape) -> i64 {
        shape.n * self.a1 + shape.m * self.a2
    }
}

/// Upper endpoint of a p-interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Upper {
    Finite(Rational),
    Infinity,
}

impl Upper {
    fn exceeds(&self, p: Rational) -> bool {
        match self {
            Upper::Finite(u) => p < *u,
            Upper::Infinity => true,
        }
    }

    fn min(self, other: Upper) -> Upper {
        match (self, other) {
            (Upper::Infinity, o) | (o, Upper::Infinity) => o,
            (Upper::Finite(a), Upper::Finite(b)) => Upper::Finite(a.min(b)),
        }
    }
}

impl std::fmt::Display for Upper {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Upper::Finite(r) => f.write_str(&format_rational(r)),
            Upper::Infinity => f.write_str("inf"),
        }
    }
}

/// An open interval of exponents (lower, upper) with 1 <= lower < upper <= ∞,
/// or the empty interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PInterval {
    Empty,
    Open { lower: Rational, upper: Upper },
}

impl PInterval {
    /// Builds (lower, upper); collapses to [`PInterval::Empty`] when lower >= upper.
    pub fn open(lower: Rational, upper: Upper) -> Result<Self> {
        if lower < Rational::one() {
            return Err(Error::IntervalBelowOne(lower));
        }
        if upper.exceeds(lower) {
            Ok(PInterval::Open { lower, upper })
        } else {
            Ok(PInterval::Empty)
        }
    }

    pub fn finite(lower: Rational, upper: Rational) -> Result<Self> {
        Self::open(lower, Upper::Finite(upper))
    }

    pub fn contains(&self, p: Rational) -> bool {
        match self {
            PInterval::Empty => false,
            PInterval::Open { lower, upper } => p > *lower && upper.exceeds(p),
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, PInterval::Empty)
    }

    pub fn lower(&self) -> Option<Rational> {
        match self {
            PInterval::Empty => None,
            PInterval::Open { lower, .. } => Some(*lower),
        }
    }

    pub fn upper(&self) -> Option<Upper> {
        match self {
            PInterval::Empty => None,
            PInterval::Open { upper, .. } => Some(*upper),
        }
    }

    pub fn intersect(&self, other: &PInterval) -> PInterval {
        match (self, other) {
            (PInterval::Open { lower: l1, upper: u1 }, PInterval::Open { lower: l2, upper: u2 }) => {
                PInterval::open((*l1).max(*l2), u1.min(*u2)).expect("lower endpoints are >= 1")
            }
            _ => PInterval::Empty,
        }
    }

    /// True when `self` ⊆ `other`.
    pub fn is_subset_of(&self, other: &PInterval) -> bool {
        self.intersect(other) == *self
    }
}

impl std::fmt::Display for PInterval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PInterval::Empty => f.write_str("(empty)"),
            PInterval::Open { lower, upper } => write!(f, "({}, {})", format_rational(lower), upper),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct RawInterval {
    empty: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lower: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    upper: Option<String>,
}

impl Serialize for PInterval {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let raw = match self {
            PInterval::Empty => RawInterval { empty: true, lower: None, upper: None },
            PInterval::Open { lower, upper } => {
                RawInterval { empty: false, lower: Some(format_rational(lower)), upper: Some(upper.to_string()) }
            }
        };
        raw.serialize(s)
    }
}

impl<'de> Deserialize<'de> for PInterval {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = RawInterval::deserialize(d)?;
        if raw.empty {
            return Ok(PInterval::Empty);
        }
        let lower = raw.lower.ok_or_else(|| D::Error::missing_field("lower"))?;
        let upper = raw.upper.ok_or_else(|| D::Error::missing_field("upper"))?;
        let lower = parse_rational(&lower).map_err(D::Error::custom)?;
        let upper = if upper == "inf" {
            Upper::Infinity
        } else {
            Upper::Finite(parse_rational(&upper).map_err(D::Error::custom)?)
        };
        PInterval::open(lower, upper).map_err(D::Error::custom)
    }
}

/// Exponents (c, d) of the kernel bound
/// |K(z,w)| ≲ |z2|^c |w2|^d / (|1 - z2 w̄2|^2 |z2^n w̄2^n - z1^m w̄1^m|^2).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CDBound {
    #[serde(with = "serde_rational")]
    pub c: Rational,
    #[serde(with = "serde_rational")]
    pub d: Rational,
    pub shape: GammaShape,
}

impl CDBound {
    pub fn new(c: Rational, d: Rational, shape: GammaShape) -> Self {
        Self { c, d, shape }
    }

    pub fn integers(c: i64, d: i64, shape: GammaShape) -> Self {
        Self::new(int(c), int(d), shape)
    }
}

/// Derivative order ∂^j_{z1} ∂^l_{z2}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct SobolevOrder {
    pub j: u32,
    pub l: u32,
}

impl SobolevOrder {
    pub fn new(j: u32, l: u32) -> Self {
        Self { j, l }
    }

    pub fn total(&self) -> u32 {
        self.j + self.l
    }
}

/// ⌊1 - (2/p)(m+n)⌋, the weight threshold of the L^p-allowable index set.
pub fn lp_threshold_floor(shape: GammaShape, p: Rational) -> Result<i64> {
    require_p(p)?;
    let x = Rational::one() - int(2 * (shape.m + shape.n)) / p;
    Ok(x.floor().to_integer())
}

/// Whether z1^{a1} z2^{a2} lies in L^p(H_{m/n}).
pub fn is_allowable(shape: GammaShape, p: Rational, idx: LatticeIndex) -> Result<bool> {
    let threshold = lp_threshold_floor(shape, p)?;
    Ok(idx.a1 >= 0 && idx.weight(shape) >= threshold)
}

/// The extremal line n·x + m·y = threshold, x >= 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryRay {
    /// coefficient of x (= n)
    pub x_coeff: i64,
    /// coefficient of y (= m)
    pub y_coeff: i64,
    pub constant: i64,
}

impl BoundaryRay {
    pub fn contains(&self, idx: LatticeIndex) -> bool {
        self.contains_point(idx.a1, idx.a2)
    }

    pub fn contains_point(&self, x: i64, y: i64) -> bool {
        x >= 0 && self.x_coeff * x + self.y_coeff * y == self.constant
    }

    /// Where the ray meets the α2 axis.
    pub fn y_intercept(&self) -> Rational {
        rat(self.constant, self.y_coeff)
    }

    /// y on the ray at abscissa x.
    pub fn y_at(&self, x: Rational) -> Rational {
        (int(self.constant) - int(self.x_coeff) * x) / int(self.y_coeff)
    }
}

pub fn boundary_ray(shape: GammaShape, p: Rational) -> Result<BoundaryRay> {
    Ok(BoundaryRay { x_coeff: shape.n, y_coeff: shape.m, constant: lp_threshold_floor(shape, p)? })
}

/// (λ(m,n), ρ(m,n)) = ((2m+2n)/(m+n+1), (2m+2n)/(m+n-1)).
pub fn lp_interval(shape: GammaShape) -> PInterval {
    let s = shape.m + shape.n;
    PInterval::finite(rat(2 * s, s + 1), rat(2 * s, s - 1)).expect("λ(m,n) > 1")
}

/// Exponent at and beyond which ∂^{j+l}/∂z1^j∂z2^l ∘ B fails to map smooth
/// functions into L^p. The threshold itself is included.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureThreshold {
    #[serde(with = "serde_rational")]
    pub threshold: Rational,
    pub inclusive: bool,
}

impl FailureThreshold {
    pub fn fails_at(&self, p: Rational) -> bool {
        p >= self.threshold
    }
}

/// (2m+2n) / (m(l+1) + n(j+1) - 1).
pub fn sobolev_failure_threshold(shape: GammaShape, order: SobolevOrder) -> FailureThreshold {
    let (m, n) = (shape.m, shape.n);
    let den = m * (order.l as i64 + 1) + n * (order.j as i64 + 1) - 1;
    FailureThreshold { threshold: rat(2 * (m + n), den), inclusive: true }
}

/// Smallest β1 >= j with (β1, -β2) on the L^2 boundary ray n·β1 - m·β2 = 1 - m - n.
pub fn witness_index(shape: GammaShape, j: u32) -> TestMonomial {
    let (m, n) = (shape.m, shape.n);
    // gcd(m, n) = 1, so some residue of β1 mod m works.
    let b1 =
        (j as i64..j as i64 + m).find(|b1| (n * b1 + m + n - 1).rem_euclid(m) == 0).expect("n is invertible mod m");
    let b2 = (n * b1 + m + n - 1) / m;
    TestMonomial::new(b1 as u32, b2 as u32)
}

fn cd_floor(shape: GammaShape) -> (Rational, Rational) {
    let n = int(shape.n);
    let inv_m = rat(1, shape.m);
    let single = int(2) * n * (Rational::one() - inv_m) - int(2);
    let sum = int(2) * n * (int(2) - inv_m) - int(2);
    (single, sum)
}

/// First violated admissibility inequality, if any.
pub fn cd_violation(bound: &CDBound) -> Option<CdCondition> {
    let (single, sum) = cd_floor(bound.shape);
    if bound.c <= single {
        Some(CdCondition::C)
    } else if bound.d <= single {
        Some(CdCondition::D)
    } else if bound.c + bound.d <= sum {
        Some(CdCondition::Sum)
    } else {
        None
    }
}

pub fn cd_conditions_hold(bound: &CDBound) -> bool {
    cd_violation(bound).is_none()
}

/// L^p range of an operator whose kernel obeys the (c, d) bound:
/// ((2m+2n)/(2m+2n+dm-2mn), (2m+2n)/(2mn-cm)), with the upper end sent to ∞
/// when c >= 2n and the lower end clamped to 1 when d >= 2n or the formula
/// drops to 1 or below.
pub fn cd_interval(bound: &CDBound) -> Result<PInterval> {
    if let Some(cond) = cd_violation(bound) {
        return Err(Error::Inadmissible(cond));
    }
    let (m, n) = (int(bound.shape.m), int(bound.shape.n));
    let two = int(2);
    let num = two * m + two * n;
    let two_n = two * n;

    let upper_den = two * m * n - bound.c * m;
    let upper = if bound.c >= two_n || upper_den <= Rational::zero() {
        Upper::Infinity
    } else {
        Upper::Finite(num / upper_den)
    };

    let lower_den = num + bound.d * m - two * m * n;
    let lower = if bound.d >= two_n || lower_den <= Rational::zero() {
        Rational::one()
    } else {
        (num / lower_den).max(Rational::one())
    };
    PInterval::open(lower, upper)
}

/// Exponent range (γ/β + 1, δ/α + 1) produced by the two-sided Schur test;
/// α = 0 gives an infinite upper end.
pub fn schur_p_range(alpha: Rational, beta: Rational, gamma: Rational, delta: Rational) -> Result<PInterval> {
    let zero = Rational::zero();
    if alpha.is_negative() || gamma.is_negative() || alpha >= beta || gamma >= delta {
        return Err(Error::SchurOrdering);
    }
    let lower = gamma / beta + Rational::one();
    let upper = if alpha == zero { Upper::Infinity } else { Upper::Finite(delta / alpha + Rational::one()) };
    PInterval::open(lower, upper)
}
