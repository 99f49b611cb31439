use num_complex::Complex64;
use serde::Serialize;

use super::{CheckReport, PointJson, Recorder};
use crate::error::{Error, Result};
use crate::exact::Rational;
use crate::kernels::KernelId;
use crate::quadrature::{forelli_rudin_ratio, schur_ratio, EvalPoint, QuadConfig, SchurWeight};

/// A probe passes when no ratio exceeds this multiple of the first sample's.
pub const BOUNDEDNESS_FACTOR: f64 = 50.0;

#[derive(Serialize)]
struct RatioSample {
    point: PointJson,
    ratio: f64,
    integral: f64,
    error_estimate: f64,
    suspect: bool,
}

fn bounded(samples: &[RatioSample]) -> (f64, bool) {
    let base = samples[0].ratio;
    let max = samples.iter().map(|s| s.ratio).fold(0.0, f64::max);
    let ok = samples.iter().all(|s| s.ratio.is_finite()) && base > 0.0 && max <= BOUNDEDNESS_FACTOR * base;
    (max / base, ok)
}

/// Forelli–Rudin ratios at z = r for each radius; the first radius is the
/// reference sample.
pub fn check_forelli_rudin(epsilon: f64, a: f64, radii: &[f64], cfg: &QuadConfig) -> Result<CheckReport> {
    if radii.is_empty() {
        return Err(Error::InvalidParameter("no sample radii".into()));
    }
    let rec =
        Recorder::start("forelli_rudin", serde_json::json!({ "epsilon": epsilon, "a": a, "radii": radii }), Some(cfg));
    let points: Vec<Complex64> = radii.iter().map(|&r| Complex64::new(r, 0.0)).collect();
    let samples: Vec<RatioSample> = forelli_rudin_ratio(epsilon, a, &points, cfg)?
        .into_iter()
        .map(|(z, res, ratio)| RatioSample {
            point: PointJson::Disc(z),
            ratio,
            integral: res.value.re,
            error_estimate: res.error_estimate,
            suspect: res.suspect,
        })
        .collect();
    let (spread, pass) = bounded(&samples);
    Ok(rec.finish(serde_json::json!({ "max_over_first": spread, "samples": samples }), pass, BOUNDEDNESS_FACTOR))
}

/// Schur ratios ∫ |K(z,w)| h(w)^{-ε} dV(w) / h(z)^{-ε} along the given points.
pub fn check_schur(
    id: &KernelId,
    weight: SchurWeight,
    epsilon: Rational,
    points: &[EvalPoint<f64>],
    cfg: &QuadConfig,
) -> Result<CheckReport> {
    if points.is_empty() {
        return Err(Error::InvalidParameter("no sample points".into()));
    }
    let weight_json = match weight {
        SchurWeight::DiscDefect => serde_json::json!({ "h": "disc_defect" }),
        SchurWeight::ThreeFactor { bound, r } => serde_json::json!({
            "h": "three_factor",
            "bound": bound,
            "r": crate::exact::format_rational(&r),
        }),
    };
    let rec = Recorder::start(
        "schur",
        serde_json::json!({
            "kernel": id,
            "weight": weight_json,
            "epsilon": crate::exact::format_rational(&epsilon),
        }),
        Some(cfg),
    );
    let samples: Vec<RatioSample> = schur_ratio(id, weight, epsilon, points, cfg)?
        .into_iter()
        .map(|(p, res, ratio)| RatioSample {
            point: (&p).into(),
            ratio,
            integral: res.value.re,
            error_estimate: res.error_estimate,
            suspect: res.suspect,
        })
        .collect();
    let (spread, pass) = bounded(&samples);
    Ok(rec.finish(serde_json::json!({ "max_over_first": spread, "samples": samples }), pass, BOUNDEDNESS_FACTOR))
}
