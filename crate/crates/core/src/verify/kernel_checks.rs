use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{offset_relative, CheckReport, PointJson, Recorder};
use crate::error::{Error, Result};
use crate::exact::{GammaShape, LatticeIndex};
use crate::kernels::{
    disc_kernel, hartogs_series_kernel, subbergman_kernel, thin_hartogs_kernel, DiscForm, HPoint, KernelId, SeriesForm,
    SeriesTruncation,
};
use crate::monomial::{project_monomial, Basis, TestMonomial};
use crate::quadrature::{apply_disc_kernel, apply_kernel, EvalPoint, QuadConfig};

fn lattice_eval(idx: LatticeIndex, z: &HPoint<f64>) -> Complex64 {
    z.z1.powi(idx.a1() as i32) * z.z2.powi(idx.a2() as i32)
}

#[derive(Serialize)]
struct Sample {
    z: PointJson,
    value: Complex64,
    expected: Complex64,
    relative_error: f64,
    quadrature_error: f64,
}

/// Applies a Bergman-type kernel to the monomial z^idx and compares with
/// z^idx itself. On the disc, `idx.a1` is the power and `idx.a2` must be 0.
pub fn check_reproducing(
    id: &KernelId,
    idx: LatticeIndex,
    points: &[EvalPoint<f64>],
    tol: f64,
    cfg: &QuadConfig,
) -> Result<CheckReport> {
    id.validate()?;
    let basis = id
        .reproduced_basis()
        .ok_or_else(|| Error::InvalidParameter("modified kernels reproduce no monomials".into()))?;
    match id.shape() {
        None if idx.a2() != 0 => {
            return Err(Error::InvalidParameter("disc monomials take the form w^k; set a2 = 0".into()))
        }
        Some(shape) if !basis.contains(shape, idx) => {
            return Err(Error::NotAllowable { a1: idx.a1(), a2: idx.a2(), basis: basis.name() })
        }
        _ => {}
    }
    if points.is_empty() {
        return Err(Error::InvalidParameter("no sample points".into()));
    }
    let rec = Recorder::start("reproducing", serde_json::json!({ "kernel": id, "index": idx, "tol": tol }), Some(cfg));
    let samples = points
        .iter()
        .map(|p| {
            let (res, expected) = match p {
                EvalPoint::Disc(z) => {
                    let k = idx.a1() as u32;
                    (apply_disc_kernel(id, |w: Complex64| w.powu(k), *z, cfg)?, z.powu(k))
                }
                EvalPoint::Hartogs(z) => (apply_kernel(id, |w| lattice_eval(idx, w), z, cfg)?, lattice_eval(idx, z)),
            };
            Ok(Sample {
                z: p.into(),
                value: res.value,
                expected,
                relative_error: offset_relative(res.value, expected),
                quadrature_error: res.error_estimate,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let max = samples.iter().map(|s| s.relative_error).fold(0.0, f64::max);
    Ok(rec.finish(serde_json::json!({ "max_relative_error": max, "samples": samples }), max <= tol, tol))
}

/// The kernel whose projection targets `basis` on `shape`.
fn projection_kernel(shape: GammaShape, basis: Basis) -> Result<KernelId> {
    match basis {
        Basis::Full if shape.m() == 1 => Ok(KernelId::ThinHartogs { n: shape.n() }),
        Basis::Full => Ok(KernelId::HartogsSeries { shape, truncation: SeriesTruncation::default() }),
        Basis::BoundedSubspace if shape == GammaShape::new(1, 1)? => Ok(KernelId::SubBergmanInfinity),
        Basis::BoundedSubspace => {
            Err(Error::ShapeMismatch(format!("the sub-Bergman kernel is implemented on H_1 only, not H_{shape}")))
        }
    }
}

/// Numerical projection of z1^{β1} w̄2^{β2} against the exact C z1^{β1} z2^{-β2}.
pub fn check_projection_constants(
    shape: GammaShape,
    beta: TestMonomial,
    basis: Basis,
    points: &[HPoint<f64>],
    tol: f64,
    cfg: &QuadConfig,
) -> Result<CheckReport> {
    let id = projection_kernel(shape, basis)?;
    if points.is_empty() {
        return Err(Error::InvalidParameter("no sample points".into()));
    }
    let exact = project_monomial(shape, beta, basis);
    let rec = Recorder::start(
        "projection_constants",
        serde_json::json!({ "shape": shape, "beta": beta, "basis": basis, "tol": tol }),
        Some(cfg),
    );
    let samples = points
        .iter()
        .map(|z| {
            let res = apply_kernel(&id, |w| beta.eval(w.z1, w.z2), z, cfg)?;
            let expected = exact.eval(z.z1, z.z2);
            Ok(Sample {
                z: (&EvalPoint::Hartogs(*z)).into(),
                value: res.value,
                expected,
                relative_error: offset_relative(res.value, expected),
                quadrature_error: res.error_estimate,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let max = samples.iter().map(|s| s.relative_error).fold(0.0, f64::max);
    Ok(rec.finish(
        serde_json::json!({
            "kernel": id,
            "projection": exact.to_string(),
            "max_relative_error": max,
            "samples": samples,
        }),
        max <= tol,
        tol,
    ))
}

/// Random interior pairs for a Hartogs shape (`Some`) or the disc (`None`).
///
/// With `restricted`, pairs satisfy |z2 w̄2| ≤ 0.7 and |z1^m w̄1^m / (z2^n w̄2^n)| ≤ 0.7
/// (|z w̄| ≤ 0.7 on the disc), where the monomial series converge quickly.
pub fn sample_interior_pairs(
    shape: Option<GammaShape>,
    count: usize,
    seed: u64,
    restricted: bool,
) -> Vec<(EvalPoint<f64>, EvalPoint<f64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let tau = std::f64::consts::TAU;
    let cap = if restricted { 0.85 } else { 0.98 };
    while out.len() < count {
        match shape {
            None => {
                let mut disc = || Complex64::from_polar(cap * rng.random::<f64>().sqrt(), tau * rng.random::<f64>());
                let (z, w) = (disc(), disc());
                if !restricted || (z * w.conj()).norm() <= 0.7 {
                    out.push((EvalPoint::Disc(z), EvalPoint::Disc(w)));
                }
            }
            Some(shape) => {
                let fiber = shape.n() as f64 / shape.m() as f64;
                let mut point = || {
                    let r2 = 0.02 + (cap - 0.02) * rng.random::<f64>();
                    let x = cap * rng.random::<f64>();
                    HPoint::new(
                        Complex64::from_polar(x * r2.powf(fiber), tau * rng.random::<f64>()),
                        Complex64::from_polar(r2, tau * rng.random::<f64>()),
                    )
                };
                let (z, w) = (point(), point());
                let ok = !restricted || {
                    let s1 = (z.z1 * w.z1.conj()).powi(shape.m() as i32);
                    let s2 = z.z2 * w.z2.conj();
                    s2.norm() <= 0.7 && s1.norm() <= 0.7 * s2.powi(shape.n() as i32).norm()
                };
                if ok && z.is_member(shape) && w.is_member(shape) {
                    out.push((EvalPoint::Hartogs(z), EvalPoint::Hartogs(w)));
                }
            }
        }
    }
    out
}

/// Sample sizes and tolerances for [`check_kernel_identities`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityOptions {
    pub pairs: usize,
    pub seed: u64,
    /// Symmetry, positivity and subtraction identities.
    pub tolerance: f64,
    /// Series against closed form.
    pub series_tolerance: f64,
}

impl Default for IdentityOptions {
    fn default() -> Self {
        Self { pairs: 10_000, seed: 0x5eed, tolerance: 1e-12, series_tolerance: 1e-8 }
    }
}

fn eval_at(id: &KernelId, z: &EvalPoint<f64>, w: &EvalPoint<f64>) -> Result<Complex64> {
    match (z, w) {
        (EvalPoint::Disc(z), EvalPoint::Disc(w)) => id.eval_disc(*z, *w),
        (EvalPoint::Hartogs(z), EvalPoint::Hartogs(w)) => id.eval(z, w),
        _ => Err(Error::ShapeMismatch("mixed sample points".into())),
    }
}

/// Independent value of a modified kernel: the parent kernel minus its
/// leading part.
fn subtraction_reference(id: &KernelId, z: &EvalPoint<f64>, w: &EvalPoint<f64>) -> Result<Option<(Complex64, f64)>> {
    Ok(match *id {
        KernelId::DiscModified { k } => {
            let (EvalPoint::Disc(zd), EvalPoint::Disc(wd)) = (z, w) else { return Ok(None) };
            let full = disc_kernel(*zd, *wd, DiscForm::Closed)?;
            let s = zd * wd.conj();
            let taylor: Complex64 =
                (0..k).map(|j| s.powu(j) * (j as f64 + 1.0)).sum::<Complex64>() / std::f64::consts::PI;
            Some((full - taylor, full.norm().max(taylor.norm())))
        }
        KernelId::ThinHartogsModified { n } => {
            let full = thin_hartogs_kernel(n, &hartogs(z), &hartogs(w))?;
            let lead = thin_hartogs_kernel(n, &hartogs(z).on_axis(), &hartogs(w).on_axis())?;
            Some((full - lead, full.norm().max(lead.norm())))
        }
        KernelId::SubBergmanInfinityModified => {
            let full = subbergman_kernel(&hartogs(z), &hartogs(w), SeriesForm::Closed)?;
            let lead = subbergman_kernel(&hartogs(z).on_axis(), &hartogs(w).on_axis(), SeriesForm::Closed)?;
            Some((full - lead, full.norm().max(lead.norm())))
        }
        _ => None,
    })
}

fn hartogs(p: &EvalPoint<f64>) -> HPoint<f64> {
    match p {
        EvalPoint::Hartogs(z) => *z,
        EvalPoint::Disc(_) => unreachable!("Hartogs kernel on a disc point"),
    }
}

/// Series value for kernels that also have a closed form.
fn series_reference(id: &KernelId, z: &EvalPoint<f64>, w: &EvalPoint<f64>) -> Result<Option<Complex64>> {
    let trunc = SeriesTruncation::default();
    Ok(match (*id, z, w) {
        (KernelId::Disc, EvalPoint::Disc(z), EvalPoint::Disc(w)) => Some(disc_kernel(*z, *w, DiscForm::Series(200))?),
        (KernelId::ThinHartogs { n }, EvalPoint::Hartogs(z), EvalPoint::Hartogs(w)) => {
            Some(hartogs_series_kernel(GammaShape::thin(n)?, z, w, &trunc)?.converged()?)
        }
        (KernelId::SubBergmanInfinity, EvalPoint::Hartogs(z), EvalPoint::Hartogs(w)) => {
            Some(subbergman_kernel(z, w, SeriesForm::Series(trunc))?)
        }
        (KernelId::HartogsSeries { shape, .. }, EvalPoint::Hartogs(z), EvalPoint::Hartogs(w)) if shape.m() == 1 => {
            // the roles flip: the closed form is the reference
            Some(thin_hartogs_kernel(shape.n(), z, w)?)
        }
        _ => None,
    })
}

#[derive(Default, Serialize)]
struct IdentityStats {
    pairs: usize,
    max_symmetry_defect: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    min_diagonal: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_diagonal_imaginary: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    series_pairs: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_series_defect: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_subtraction_defect: Option<f64>,
}

/// Conjugate symmetry, diagonal positivity, series/closed agreement and
/// subtraction identities, whichever apply to `id`, on seeded random pairs.
pub fn check_kernel_identities(id: &KernelId, opts: &IdentityOptions) -> Result<CheckReport> {
    id.validate()?;
    let rec = Recorder::start("kernel_identities", serde_json::json!({ "kernel": id, "options": opts }), None);
    let shape = id.shape();
    let mut stats = IdentityStats { pairs: opts.pairs, ..Default::default() };
    let mut pass = true;

    let bergman_type = id.reproduced_basis().is_some();
    let mut min_diag = f64::INFINITY;
    let mut max_diag_im: f64 = 0.0;
    let mut max_sub: Option<f64> = None;
    for (z, w) in sample_interior_pairs(shape, opts.pairs, opts.seed, false) {
        let kzw = eval_at(id, &z, &w)?;
        let kwz = eval_at(id, &w, &z)?;
        let defect = (kzw - kwz.conj()).norm() / (kzw.norm() + 1.0);
        stats.max_symmetry_defect = stats.max_symmetry_defect.max(defect);
        if bergman_type {
            let d = eval_at(id, &z, &z)?;
            min_diag = min_diag.min(d.re);
            max_diag_im = max_diag_im.max(d.im.abs() / d.re.abs().max(1.0));
        }
        if let Some((reference, scale)) = subtraction_reference(id, &z, &w)? {
            let defect = (kzw - reference).norm() / scale.max(1.0);
            max_sub = Some(max_sub.unwrap_or(0.0).max(defect));
        }
    }
    pass &= stats.max_symmetry_defect <= opts.tolerance;
    if bergman_type {
        pass &= min_diag > 0.0 && max_diag_im <= opts.tolerance;
        stats.min_diagonal = Some(min_diag);
        stats.max_diagonal_imaginary = Some(max_diag_im);
    }
    if let Some(m) = max_sub {
        pass &= m <= opts.tolerance;
        stats.max_subtraction_defect = Some(m);
    }

    let series_pairs = (opts.pairs / 10).max(1);
    let mut max_series: Option<f64> = None;
    for (z, w) in sample_interior_pairs(shape, series_pairs, opts.seed ^ 0x5e41e5, true) {
        if let Some(reference) = series_reference(id, &z, &w)? {
            let value = eval_at(id, &z, &w)?;
            let defect = (value - reference).norm() / reference.norm().max(f64::MIN_POSITIVE);
            max_series = Some(max_series.unwrap_or(0.0).max(defect));
        }
    }
    if let Some(m) = max_series {
        pass &= m <= opts.series_tolerance;
        stats.series_pairs = Some(series_pairs);
        stats.max_series_defect = Some(m);
    }
    Ok(rec.finish(stats, pass, opts.tolerance))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn restricted_pairs_respect_bounds() {
        let shape = GammaShape::new(2, 3).unwrap();
        for (z, w) in sample_interior_pairs(Some(shape), 200, 7, true) {
            let (EvalPoint::Hartogs(z), EvalPoint::Hartogs(w)) = (z, w) else { panic!() };
            assert!(z.is_member(shape) && w.is_member(shape));
            assert!((z.z2 * w.z2.conj()).norm() <= 0.7);
        }
        assert_eq!(sample_interior_pairs(None, 50, 1, true), sample_interior_pairs(None, 50, 1, true));
    }

    #[test]
    fn identities_hold_for_closed_forms() {
        let opts = IdentityOptions { pairs: 500, ..Default::default() };
        for id in [
            KernelId::Disc,
            KernelId::DiscModified { k: 3 },
            KernelId::ThinHartogs { n: 2 },
            KernelId::ThinHartogsModified { n: 1 },
            KernelId::SubBergmanInfinity,
            KernelId::SubBergmanInfinityModified,
        ] {
            let r = check_kernel_identities(&id, &opts).unwrap();
            assert!(r.pass, "{id:?}: {}", r.measured);
        }
    }

    #[test]
    fn reproducing_rejects_outside_the_subspace() {
        let cfg = QuadConfig::default();
        let z = [EvalPoint::Hartogs(HPoint::real(0.1, 0.6))];
        let idx = LatticeIndex::new(0, -1).unwrap();
        let err = check_reproducing(&KernelId::SubBergmanInfinity, idx, &z, 1e-4, &cfg).unwrap_err();
        assert!(matches!(err, Error::NotAllowable { .. }));
        let err = check_reproducing(&KernelId::ThinHartogsModified { n: 1 }, idx, &z, 1e-4, &cfg).unwrap_err();
        assert!(matches!(err, Error::InvalidParameter(_)));
    }

    #[test]
    fn disc_reproduces_cubic() {
        let cfg = QuadConfig::default();
        let pts = [
            EvalPoint::Disc(Complex64::new(0.2, 0.0)),
            EvalPoint::Disc(Complex64::from_polar(0.5, 1.0471975511965976)),
        ];
        let r = check_reproducing(&KernelId::Disc, LatticeIndex::new(3, 0).unwrap(), &pts, 1e-8, &cfg).unwrap();
        assert!(r.pass, "{}", r.measured);
    }
}
