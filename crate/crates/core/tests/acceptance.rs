//! Acceptance criteria 1-10. Runs without the test harness so the PASS/FAIL
//! line of every criterion is always printed; exits non-zero if any fails.

use std::time::{Duration, Instant};

use hartogs_core::diagram::DiagramSpec;
use hartogs_core::exact::{
    cd_interval, int, is_allowable, lp_interval, rat, sobolev_failure_threshold, CDBound, SobolevOrder, Upper,
};
use hartogs_core::kernels::KernelId;
use hartogs_core::monomial::{monomial_lp_norm_pth_power, witness_report, Basis, TestMonomial};
use hartogs_core::quadrature::{EvalPoint, QuadConfig, Region, SchurWeight};
use hartogs_core::verify::{
    certify_divergence_rate, check_forelli_rudin, check_integration_by_parts, check_kernel_identities,
    check_projection_constants, check_radial_annihilation, check_reproducing, check_schur, check_theorem_intervals,
    IbpRegion, IdentityOptions, PlanarFunction, RateModel, RateOutcome,
};
use hartogs_core::{Complex64, GammaShape, HPoint64, LatticeIndex, PInterval, Rational};
use num_integer::Integer;

// pinned tolerances
const PROJECTION_TOL: f64 = 1e-4;
const IDENTITY_TOL: f64 = 1e-12;
const SERIES_TOL: f64 = 1e-8;
const IDENTITY_PAIRS: usize = 10_000;
const MISFIT_TOL: f64 = 0.1;
const LOG_CASE_MISFIT_TOL: f64 = 0.05;
const FR_GROWTH_LIMIT: f64 = 50.0;
const IBP_TOL: f64 = 1e-6;
const RADIAL_TOL: f64 = 1e-6;
const REPRODUCING_TOL: f64 = 1e-4;

type Outcome = Result<(), String>;
type Criterion<'a> = (&'static str, Duration, Box<dyn Fn() -> Outcome + 'a>);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Outcome {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn shape(m: i64, n: i64) -> GammaShape {
    GammaShape::new(m, n).unwrap()
}

fn open(lo: Rational, hi: Rational) -> PInterval {
    PInterval::finite(lo, hi).unwrap()
}

fn coprime_shapes(max: i64) -> impl Iterator<Item = (i64, i64)> {
    (1..=max).flat_map(move |m| (1..=max).map(move |n| (m, n))).filter(|(m, n)| m.gcd(n) == 1)
}

fn c1_interval_table() -> Outcome {
    let h1 = shape(1, 1);
    ensure(lp_interval(h1) == open(rat(4, 3), int(4)), || format!("lp_interval(1,1) = {:?}", lp_interval(h1)))?;
    for n in 1..=10 {
        let thin = GammaShape::thin(n).unwrap();
        let z2 = cd_interval(&CDBound::integers(n - 1, n + 1, thin)).map_err(|e| e.to_string())?;
        ensure(z2 == open(rat(2 * n + 2, n + 3), int(2)), || format!("n={n}: z2 family {z2:?}"))?;
        let z1 = cd_interval(&CDBound::integers(0, 2 * n, thin)).map_err(|e| e.to_string())?;
        ensure(z1 == open(int(1), rat(2 * n + 2, 2 * n)), || format!("n={n}: z1 family {z1:?}"))?;
    }
    let sub = cd_interval(&CDBound::integers(2, 2, h1)).map_err(|e| e.to_string())?;
    ensure(sub == PInterval::Open { lower: int(1), upper: Upper::Infinity }, || format!("(2,2) row {sub:?}"))?;
    let report = check_theorem_intervals().map_err(|e| e.to_string())?;
    ensure(report.pass, || format!("interval table mismatch: {}", report.measured))
}

fn c2_threshold_identity() -> Outcome {
    for (m, n) in coprime_shapes(10) {
        let rho = rat(2 * (m + n), m + n - 1);
        let t = sobolev_failure_threshold(shape(m, n), SobolevOrder::new(0, 0)).threshold;
        ensure(t == rho, || format!("({m},{n}): {t} != {rho}"))?;
        ensure(lp_interval(shape(m, n)).upper() == Some(Upper::Finite(rho)), || format!("({m},{n}): lp upper"))?;
    }
    Ok(())
}

fn c3_finiteness_equivalence() -> Outcome {
    let ps = [rat(5, 4), rat(4, 3), rat(3, 2), int(2), int(3), int(4), int(5)];
    for (m, n) in [(1, 1), (1, 2), (2, 1), (2, 3)] {
        let s = shape(m, n);
        for &p in &ps {
            // independent floor of 1 - 2(m+n)/p; negative z1 powers are rejected at construction
            let bound = (int(1) - int(2 * (m + n)) / p).floor().to_integer();
            for a1 in 0i64..=8 {
                for a2 in -8i64..=8 {
                    if a1 + a2.abs() > 8 {
                        continue;
                    }
                    let idx = LatticeIndex::new(a1, a2).unwrap();
                    let finite = monomial_lp_norm_pth_power(s, idx, p).map_err(|e| e.to_string())?.is_finite();
                    let expected = n * a1 + m * a2 >= bound;
                    let allowable = is_allowable(s, p, idx).map_err(|e| e.to_string())?;
                    ensure(finite == expected && allowable == expected, || {
                        format!("({m},{n}) p={p} idx=({a1},{a2}): finite {finite}, allowable {allowable}")
                    })?;
                }
            }
        }
    }
    Ok(())
}

fn h1_points() -> Vec<HPoint64> {
    [(0.3, 0.0), (0.45, 0.7), (0.6, 1.9), (0.75, 3.1), (0.9, 4.4)]
        .iter()
        .map(|&(r2, t)| HPoint64::new(Complex64::from_polar(0.5 * r2, 2.0 * t), Complex64::from_polar(r2, t)))
        .collect()
}

fn c4_projection_constants(cfg: &QuadConfig) -> Outcome {
    let pts = h1_points();
    let full = check_projection_constants(shape(1, 1), TestMonomial::new(0, 1), Basis::Full, &pts, PROJECTION_TOL, cfg)
        .map_err(|e| e.to_string())?;
    ensure(full.pass, || format!("B(conj z2): {}", full.measured))?;
    let sub = check_projection_constants(
        shape(1, 1),
        TestMonomial::new(1, 1),
        Basis::BoundedSubspace,
        &pts,
        PROJECTION_TOL,
        cfg,
    )
    .map_err(|e| e.to_string())?;
    ensure(sub.pass, || format!("sub-Bergman z1 conj z2: {}", sub.measured))
}

fn c5_kernel_identities() -> Outcome {
    let mut ids = vec![KernelId::Disc, KernelId::SubBergmanInfinity, KernelId::SubBergmanInfinityModified];
    ids.extend((1..=4).map(|k| KernelId::DiscModified { k }));
    for n in 1..=3 {
        ids.push(KernelId::ThinHartogs { n });
        ids.push(KernelId::ThinHartogsModified { n });
    }
    let opts =
        IdentityOptions { pairs: IDENTITY_PAIRS, seed: 0x5eed, tolerance: IDENTITY_TOL, series_tolerance: SERIES_TOL };
    for id in ids {
        let r = check_kernel_identities(&id, &opts).map_err(|e| e.to_string())?;
        ensure(r.pass, || format!("{id:?}: {}", r.measured))?;
    }
    Ok(())
}

fn c6_witnesses() -> Outcome {
    let samples: Vec<Rational> = [rat(5, 4), rat(4, 3), rat(3, 2), int(2), int(3), int(4), int(5), int(6)].to_vec();
    for (m, n) in [(1, 1), (1, 2), (2, 1)] {
        for (j, l) in [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)] {
            let threshold = rat(2 * m + 2 * n, m * (l + 1) + n * (j + 1) - 1);
            let mut ps = samples.clone();
            ps.extend([threshold, threshold + rat(1, 7)]);
            if threshold - rat(1, 7) >= int(1) {
                ps.push(threshold - rat(1, 7));
            }
            let report =
                witness_report(shape(m, n), SobolevOrder::new(j as u32, l as u32), &ps).map_err(|e| e.to_string())?;
            ensure(report.threshold.threshold == threshold, || {
                format!("({m},{n}) ({j},{l}): threshold {} != {threshold}", report.threshold.threshold)
            })?;
            for s in &report.samples {
                ensure(s.f_norm.is_finite(), || format!("({m},{n}) ({j},{l}) p={}: f infinite", s.p))?;
                ensure(s.derivative_norm.is_finite() == (s.p < threshold), || {
                    format!("({m},{n}) ({j},{l}) p={}: derivative verdict", s.p)
                })?;
            }
        }
    }
    Ok(())
}

fn c7_divergence_rates(cfg: &QuadConfig) -> Outcome {
    let deltas = [1e-1, 1e-2, 1e-3, 1e-4];
    let cases = [
        (SobolevOrder::new(0, 1), int(2), RateModel::Log, LOG_CASE_MISFIT_TOL),
        (SobolevOrder::new(0, 0), int(4), RateModel::Log, MISFIT_TOL),
        (SobolevOrder::new(1, 0), int(3), RateModel::Power { exponent: -2.0 }, MISFIT_TOL),
    ];
    for (order, p, model, tol) in cases {
        let out = certify_divergence_rate(shape(1, 1), order, p, &deltas, cfg).map_err(|e| e.to_string())?;
        let RateOutcome::Fitted(fit) = out else {
            return Err(format!("{order:?} p={p}: norm is finite"));
        };
        let same_model = match (fit.model, model) {
            (RateModel::Log, RateModel::Log) => true,
            (RateModel::Power { .. }, RateModel::Power { exponent }) => fit.predicted_exponent == exponent,
            _ => false,
        };
        ensure(same_model, || format!("{order:?} p={p}: model {:?}, predicted {}", fit.model, fit.predicted_exponent))?;
        ensure(fit.passes() && fit.relative_misfit <= tol, || {
            format!("{order:?} p={p}: misfit {} exponent {}", fit.relative_misfit, fit.fitted_exponent)
        })?;
    }
    Ok(())
}

fn c8_analytic_machinery(cfg: &QuadConfig) -> Outcome {
    let radii = [0.5, 0.9, 0.99, 0.999];
    for (eps, a) in [(0.25, 0.0), (0.5, 0.0), (0.5, 1.0), (0.75, -1.0)] {
        let r = check_forelli_rudin(eps, a, &radii, cfg).map_err(|e| e.to_string())?;
        ensure(r.pass && hartogs_core::verify::BOUNDEDNESS_FACTOR <= FR_GROWTH_LIMIT, || {
            format!("Forelli-Rudin ({eps},{a}): {}", r.measured)
        })?;
    }

    let disc_pts: Vec<_> =
        [0.0, 0.5, 0.9, 0.99, 0.999].iter().map(|&t| EvalPoint::Disc(Complex64::new(t, 0.0))).collect();
    let r =
        check_schur(&KernelId::Disc, SchurWeight::DiscDefect, rat(1, 2), &disc_pts, cfg).map_err(|e| e.to_string())?;
    ensure(r.pass, || format!("Schur disc: {}", r.measured))?;
    let thin = GammaShape::thin(1).unwrap();
    let weight = SchurWeight::ThreeFactor { bound: CDBound::integers(2, 2, thin), r: int(2) };
    let thin_pts: Vec<_> = [0.1, 0.5, 0.9, 0.99].iter().map(|&t| EvalPoint::Hartogs(HPoint64::real(0.0, t))).collect();
    let r =
        check_schur(&KernelId::ThinHartogs { n: 1 }, weight, rat(1, 2), &thin_pts, cfg).map_err(|e| e.to_string())?;
    ensure(r.pass, || format!("Schur thin: {}", r.measured))?;

    let regions = [Region::Disc { radius: 0.9, puncture_radius: 0.0 }, Region::Annulus { r_in: 0.3, r_out: 0.8 }];
    let pairs = [
        (PlanarFunction::Power { k: 1 }, PlanarFunction::ConjugatePower { k: 1 }),
        (PlanarFunction::Power { k: 2 }, PlanarFunction::AbsSquared),
        (PlanarFunction::ExpAbsSquared, PlanarFunction::ConjugatePower { k: 2 }),
    ];
    for region in regions {
        for (f, g) in pairs {
            let r =
                check_integration_by_parts(IbpRegion::centered(region), f, g, 1e-4, cfg).map_err(|e| e.to_string())?;
            ensure(r.pass && r.tolerance <= IBP_TOL, || format!("IBP {region:?} {f:?} {g:?}: {}", r.measured))?;
        }
    }

    let pts: Vec<Complex64> = (0..8).map(|k| Complex64::from_polar(0.6, 0.8 * k as f64 + 0.1)).collect();
    for g in [PlanarFunction::AbsSquared, PlanarFunction::ExpAbsSquared, PlanarFunction::One] {
        let r = check_radial_annihilation(g, &pts, 1e-4).map_err(|e| e.to_string())?;
        ensure(r.pass && r.tolerance <= RADIAL_TOL, || format!("radial {g:?}: {}", r.measured))?;
    }
    let control = check_radial_annihilation(PlanarFunction::RealPart, &pts, 1e-4).map_err(|e| e.to_string())?;
    ensure(!control.pass, || "non-radial control passed".to_string())
}

fn c9_reproducing(cfg: &QuadConfig) -> Outcome {
    let disc_pts: Vec<_> = [(0.3, 0.0), (0.45, 0.7), (0.6, 1.9), (0.75, 3.1), (0.9, 4.4)]
        .iter()
        .map(|&(r, t)| EvalPoint::Disc(Complex64::from_polar(r, t)))
        .collect();
    let h1: Vec<_> = h1_points().into_iter().map(EvalPoint::Hartogs).collect();
    let cases = [
        (KernelId::Disc, LatticeIndex::new(3, 0).unwrap(), disc_pts),
        (KernelId::ThinHartogs { n: 1 }, LatticeIndex::new(1, -1).unwrap(), h1.clone()),
        (KernelId::SubBergmanInfinity, LatticeIndex::new(1, -1).unwrap(), h1),
    ];
    for (id, idx, pts) in cases {
        let r = check_reproducing(&id, idx, &pts, REPRODUCING_TOL, cfg).map_err(|e| e.to_string())?;
        ensure(r.pass, || format!("{id:?}: {}", r.measured))?;
    }
    Ok(())
}

fn c10_diagrams() -> Outcome {
    let golden = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    for (m, n) in [(1, 1), (1, 2), (2, 1)] {
        let spec = DiagramSpec::new(shape(m, n), vec![int(2), rat(4, 3), rat(3, 2), rat(6, 5)], 12, 8);
        let svg = spec.render_svg().map_err(|e| e.to_string())?;
        let path = golden.join(format!("diagram_m{m}_n{n}.svg"));
        let expected = std::fs::read(&path).map_err(|e| format!("{}: {e}", path.display()))?;
        ensure(svg.as_bytes() == expected.as_slice(), || format!("({m},{n}) differs from {}", path.display()))?;
    }
    // on H_1 the four rays cross the α2 axis at -1, -2, -3 and -4
    for (p, c) in [(int(2), -1), (rat(4, 3), -2), (rat(6, 5), -3)] {
        let ray = hartogs_core::exact::boundary_ray(shape(1, 1), p).map_err(|e| e.to_string())?;
        ensure(ray.constant == c, || format!("p={p}: intercept {}", ray.constant))?;
    }
    Ok(())
}

fn main() -> std::process::ExitCode {
    let cfg = QuadConfig::default();
    let criteria: Vec<Criterion> = vec![
        ("1 exact interval table", Duration::from_secs(1), Box::new(c1_interval_table)),
        ("2 threshold identity", Duration::from_secs(1), Box::new(c2_threshold_identity)),
        ("3 finiteness equivalence", Duration::from_secs(5), Box::new(c3_finiteness_equivalence)),
        ("4 projection constants", Duration::from_secs(120), Box::new(|| c4_projection_constants(&cfg))),
        ("5 kernel identities", Duration::from_secs(120), Box::new(c5_kernel_identities)),
        ("6 Sobolev witnesses", Duration::from_secs(1), Box::new(c6_witnesses)),
        ("7 divergence rates", Duration::from_secs(120), Box::new(|| c7_divergence_rates(&cfg))),
        ("8 analytic machinery", Duration::from_secs(120), Box::new(|| c8_analytic_machinery(&cfg))),
        ("9 reproducing property", Duration::from_secs(120), Box::new(|| c9_reproducing(&cfg))),
        ("10 diagram regression", Duration::from_secs(5), Box::new(c10_diagrams)),
    ];
    let mut failed = Vec::new();
    for (name, budget, run) in &criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome =
            outcome.and_then(|()| ensure(elapsed <= *budget, || format!("took {elapsed:?}, budget {budget:?}")));
        match outcome {
            Ok(()) => println!("PASS criterion {name} ({} ms)", elapsed.as_millis()),
            Err(why) => {
                println!("FAIL criterion {name} ({} ms): {why}", elapsed.as_millis());
                failed.push(*name);
            }
        }
    }
    if failed.is_empty() {
        println!("all {} criteria passed", criteria.len());
        std::process::ExitCode::SUCCESS
    } else {
        println!("failed criteria: {failed:?}");
        std::process::ExitCode::FAILURE
    }
}
