use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{CheckReport, Recorder};
use crate::error::{Error, Result};
use crate::quadrature::{integrate_planar, AngularRule, QuadConfig, Region};

/// Test functions of one complex variable used by the planar checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "fn", rename_all = "snake_case")]
pub enum PlanarFunction {
    /// w^k
    Power { k: u32 },
    /// w̄^k
    ConjugatePower { k: u32 },
    /// |w|²
    AbsSquared,
    /// exp(|w|²)
    ExpAbsSquared,
    /// Re w, the non-radial control.
    RealPart,
    /// The constant 1.
    One,
}

impl PlanarFunction {
    pub fn eval(&self, w: Complex64) -> Complex64 {
        match *self {
            PlanarFunction::Power { k } => w.powu(k),
            PlanarFunction::ConjugatePower { k } => w.conj().powu(k),
            PlanarFunction::AbsSquared => Complex64::new(w.norm_sqr(), 0.0),
            PlanarFunction::ExpAbsSquared => Complex64::new(w.norm_sqr().exp(), 0.0),
            PlanarFunction::RealPart => Complex64::new(w.re, 0.0),
            PlanarFunction::One => Complex64::new(1.0, 0.0),
        }
    }
}

impl fmt::Display for PlanarFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlanarFunction::Power { k } => write!(f, "w^{k}"),
            PlanarFunction::ConjugatePower { k } => write!(f, "wbar^{k}"),
            PlanarFunction::AbsSquared => f.write_str("abs2"),
            PlanarFunction::ExpAbsSquared => f.write_str("exp_abs2"),
            PlanarFunction::RealPart => f.write_str("re"),
            PlanarFunction::One => f.write_str("1"),
        }
    }
}

impl FromStr for PlanarFunction {
    type Err = Error;

    /// Accepts `w`, `w^k`, `wbar`, `wbar^k`, `abs2`, `exp_abs2`, `re`, `1`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let power = |rest: &str| -> Result<u32> {
            match rest.strip_prefix('^') {
                None if rest.is_empty() => Ok(1),
                Some(k) => k.parse().map_err(|_| Error::Parse(format!("bad exponent in {s:?}"))),
                None => Err(Error::Parse(format!("unknown test function {s:?}"))),
            }
        };
        Ok(match s {
            "abs2" => PlanarFunction::AbsSquared,
            "exp_abs2" => PlanarFunction::ExpAbsSquared,
            "re" => PlanarFunction::RealPart,
            "1" => PlanarFunction::One,
            _ => {
                if let Some(rest) = s.strip_prefix("wbar") {
                    PlanarFunction::ConjugatePower { k: power(rest)? }
                } else if let Some(rest) = s.strip_prefix('w') {
                    PlanarFunction::Power { k: power(rest)? }
                } else {
                    return Err(Error::Parse(format!("unknown test function {s:?}")));
                }
            }
        })
    }
}

/// T_w g = i(x ∂_y g - y ∂_x g) by central differences with step `h`.
pub fn tangential_derivative(g: impl Fn(Complex64) -> Complex64, w: Complex64, h: f64) -> Complex64 {
    let dx = (g(w + Complex64::new(h, 0.0)) - g(w - Complex64::new(h, 0.0))) / (2.0 * h);
    let dy = (g(w + Complex64::new(0.0, h)) - g(w - Complex64::new(0.0, h))) / (2.0 * h);
    Complex64::i() * (dy * w.re - dx * w.im)
}

#[derive(Serialize)]
struct PointValue {
    w: Complex64,
    t_g: f64,
}

/// |T_w g| at each point must stay below max(1e-6, h² · scale), where scale
/// bounds |g| near the points.
pub fn check_radial_annihilation(g: PlanarFunction, points: &[Complex64], fd_step: f64) -> Result<CheckReport> {
    if !(fd_step > 0.0 && fd_step.is_finite()) {
        return Err(Error::InvalidParameter("fd_step must be positive".into()));
    }
    if points.is_empty() {
        return Err(Error::InvalidParameter("no sample points".into()));
    }
    let rec = Recorder::start(
        "radial_annihilation",
        serde_json::json!({ "g": g, "points": points, "fd_step": fd_step }),
        None,
    );
    let scale = points.iter().map(|&w| g.eval(w).norm()).fold(1.0, f64::max);
    let tolerance = (fd_step * fd_step * scale).max(1e-6);
    let values: Vec<PointValue> = points
        .iter()
        .map(|&w| PointValue { w, t_g: tangential_derivative(|u| g.eval(u), w, fd_step).norm() })
        .collect();
    let max = values.iter().map(|v| v.t_g).fold(0.0, f64::max);
    let pass = max <= tolerance;
    Ok(rec.finish(serde_json::json!({ "max_abs_t_g": max, "points": values }), pass, tolerance))
}

/// A disc or annulus, optionally translated away from the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IbpRegion {
    pub region: Region,
    #[serde(default)]
    pub center: Complex64,
}

impl IbpRegion {
    pub fn centered(region: Region) -> Self {
        Self { region, center: Complex64::new(0.0, 0.0) }
    }
}

pub const IBP_TOLERANCE: f64 = 1e-6;

/// Compares ∫ T_w f · g with -∫ f · T_w g.
///
/// A translated region is still integrated and the residual reported, but
/// the check fails: the identity holds only on origin-centered regions.
pub fn check_integration_by_parts(
    region: IbpRegion,
    f: PlanarFunction,
    g: PlanarFunction,
    fd_step: f64,
    cfg: &QuadConfig,
) -> Result<CheckReport> {
    region.region.validate()?;
    if !matches!(region.region, Region::Disc { .. } | Region::Annulus { .. }) {
        return Err(Error::InvalidParameter("integration by parts takes a disc or an annulus".into()));
    }
    if !(fd_step > 0.0 && fd_step.is_finite()) {
        return Err(Error::InvalidParameter("fd_step must be positive".into()));
    }
    let rec = Recorder::start(
        "integration_by_parts",
        serde_json::json!({ "region": region, "f": f, "g": g, "fd_step": fd_step }),
        Some(cfg),
    );
    let c = region.center;
    let tf_g = integrate_planar(
        &region.region,
        |s| {
            let w = s.w + c;
            tangential_derivative(|u| f.eval(u), w, fd_step) * g.eval(w)
        },
        AngularRule::Periodic,
        cfg,
    )?;
    let f_tg = integrate_planar(
        &region.region,
        |s| {
            let w = s.w + c;
            f.eval(w) * tangential_derivative(|u| g.eval(u), w, fd_step)
        },
        AngularRule::Periodic,
        cfg,
    )?;
    let lhs = tf_g.value;
    let rhs = -f_tg.value;
    let residual = (lhs - rhs).norm() / (lhs.norm() + 1.0);
    let centered = c.norm() == 0.0;
    let pass = centered && residual <= IBP_TOLERANCE;
    Ok(rec.finish(
        serde_json::json!({
            "lhs": lhs,
            "rhs": rhs,
            "residual": residual,
            "origin_centered": centered,
            "quadrature_error": tf_g.error_estimate.max(f_tg.error_estimate),
        }),
        pass,
        IBP_TOLERANCE,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle(r: f64, k: usize) -> Vec<Complex64> {
        (0..k).map(|j| Complex64::from_polar(r, 0.3 + j as f64)).collect()
    }

    #[test]
    fn tangential_derivative_of_monomials() {
        // T(w^a w̄^b) = (b - a) w^a w̄^b
        let w = Complex64::new(0.3, -0.2);
        let t = tangential_derivative(|u| u * u * u.conj(), w, 1e-5);
        let expected = -(w * w * w.conj());
        assert!((t - expected).norm() < 1e-9);
    }

    #[test]
    fn radial_functions_are_annihilated() {
        let pts = circle(0.7, 6);
        let r = check_radial_annihilation(PlanarFunction::AbsSquared, &pts, 1e-5).unwrap();
        assert!(r.pass);
        assert!(r.measured["max_abs_t_g"].as_f64().unwrap() < 1e-8);
        assert!(check_radial_annihilation(PlanarFunction::ExpAbsSquared, &pts, 1e-5).unwrap().pass);
        assert!(!check_radial_annihilation(PlanarFunction::RealPart, &pts, 1e-5).unwrap().pass);
    }

    #[test]
    fn parses_test_functions() {
        for s in ["w", "w^2", "wbar", "wbar^3", "abs2", "exp_abs2", "re", "1"] {
            let f: PlanarFunction = s.parse().unwrap();
            let again: PlanarFunction = f.to_string().parse().unwrap();
            assert_eq!(f, again);
        }
        assert_eq!("w".parse::<PlanarFunction>().unwrap(), PlanarFunction::Power { k: 1 });
        assert!("z".parse::<PlanarFunction>().is_err());
        assert!("w^x".parse::<PlanarFunction>().is_err());
    }

    #[test]
    fn integration_by_parts_on_centered_regions() {
        let cfg = QuadConfig::default();
        let annulus = IbpRegion::centered(Region::Annulus { r_in: 0.3, r_out: 0.8 });
        let r = check_integration_by_parts(
            annulus,
            PlanarFunction::Power { k: 1 },
            PlanarFunction::ConjugatePower { k: 1 },
            1e-5,
            &cfg,
        )
        .unwrap();
        assert!(r.pass);
        assert!(r.measured["residual"].as_f64().unwrap() < 1e-10);
        let shifted = IbpRegion { region: Region::unit_disc(), center: Complex64::new(0.3, 0.0) };
        let r = check_integration_by_parts(
            shifted,
            PlanarFunction::Power { k: 2 },
            PlanarFunction::ConjugatePower { k: 1 },
            1e-5,
            &cfg,
        )
        .unwrap();
        assert!(!r.pass);
        assert!(r.measured["residual"].as_f64().unwrap() > 1e-3);
    }
}
