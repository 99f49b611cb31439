use hartogs_core::exact::{
    boundary_ray, cd_interval, int, is_allowable, lp_interval, rat, sobolev_failure_threshold, to_real, witness_index,
    CDBound, SobolevOrder, Upper,
};
use hartogs_core::kernels::{kernel_bound_ratio, HPoint, KernelId, SeriesTruncation};
use hartogs_core::monomial::{
    differentiate, monomial_lp_norm_pth_power, project_monomial, projection_constant, radial_exponent, Basis,
    NormValue, TestMonomial,
};
use hartogs_core::quadrature::{integrate_4d, integrate_radial, HartogsSample, Mode, QuadConfig, RadialSample, Region};
use hartogs_core::verify::{
    certify_divergence_rate, check_forelli_rudin, check_radial_annihilation, sample_interior_pairs, PlanarFunction,
    RateOutcome,
};
use hartogs_core::{Complex64, GammaShape, HPoint64, LatticeIndex, PInterval, Rational};
use num_integer::Integer;
use proptest::prelude::*;
use std::f64::consts::TAU;

fn coprime_shape(max: i64) -> impl Strategy<Value = GammaShape> {
    (1..=max, 1..=max).prop_filter_map("gcd 1", |(m, n)| (m.gcd(&n) == 1).then(|| GammaShape::new(m, n).unwrap()))
}

/// Exponents p = a/b ≥ 1.
fn exponent() -> impl Strategy<Value = Rational> {
    (1i64..=12, 1i64..=12).prop_map(|(a, b)| {
        let p = rat(a, b);
        if p < int(1) {
            p.recip()
        } else {
            p
        }
    })
}

fn index(bound: i64) -> impl Strategy<Value = LatticeIndex> {
    (0..=bound, -bound..=bound).prop_map(|(a1, a2)| LatticeIndex::new(a1, a2).unwrap())
}

const SAMPLED_P: [(i64, i64); 7] = [(5, 4), (4, 3), (3, 2), (2, 1), (3, 1), (4, 1), (5, 1)];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn allowability_is_monotone_in_p(shape in coprime_shape(10), p in exponent(), q in exponent(), idx in index(12)) {
        let (lo, hi) = if p <= q { (p, q) } else { (q, p) };
        if is_allowable(shape, hi, idx).unwrap() {
            prop_assert!(is_allowable(shape, lo, idx).unwrap());
        }
    }

    #[test]
    fn lp_interval_contains_two_and_is_symmetric(shape in coprime_shape(20)) {
        let iv = lp_interval(shape);
        prop_assert!(iv.contains(int(2)));
        let swapped = lp_interval(GammaShape::new(shape.n(), shape.m()).unwrap());
        prop_assert_eq!(iv, swapped);
    }

    #[test]
    fn witness_lies_on_the_l2_ray(shape in coprime_shape(10), j in 0u32..6) {
        let w = witness_index(shape, j);
        prop_assert!(w.b1 >= j);
        let ray = boundary_ray(shape, int(2)).unwrap();
        prop_assert!(ray.contains(LatticeIndex::new(w.b1 as i64, -(w.b2 as i64)).unwrap()));
        // minimal: no smaller β1 ≥ j reaches the ray with an integer β2
        for b1 in j as i64..w.b1 as i64 {
            prop_assert!((shape.n() * b1 + shape.m() + shape.n() - 1) % shape.m() != 0);
        }
    }

    #[test]
    fn finite_norm_iff_allowable(shape in coprime_shape(6), k in 0usize..7, idx in index(8)) {
        let p = rat(SAMPLED_P[k].0, SAMPLED_P[k].1);
        let finite = monomial_lp_norm_pth_power(shape, idx, p).unwrap().is_finite();
        prop_assert_eq!(finite, is_allowable(shape, p, idx).unwrap());
    }

    #[test]
    fn holomorphic_monomials_project_to_themselves(shape in coprime_shape(8), b1 in 0u32..8) {
        let c = projection_constant(shape, TestMonomial::new(b1, 0), Basis::Full).unwrap();
        prop_assert_eq!(c, int(1));
        let proj = project_monomial(shape, TestMonomial::new(b1, 0), Basis::Full);
        prop_assert_eq!(proj.coeff(), int(1));
    }

    #[test]
    fn projection_contracts_on_the_l2_ray(shape in coprime_shape(8), j in 0u32..5) {
        let beta = witness_index(shape, j);
        let c = projection_constant(shape, beta, Basis::Full).unwrap();
        prop_assert!(c > int(0) && c < int(1), "C = {}", c);
    }

    #[test]
    fn rationals_stay_reduced(a in -1000i64..1000, b in 1i64..1000) {
        let r = rat(a, b);
        prop_assert!(*r.denom() > 0);
        prop_assert_eq!(r.numer().gcd(r.denom()), 1);
    }

    #[test]
    fn intervals_are_ordered_or_empty(lo in 1i64..20, hi in 1i64..20, den in 1i64..5) {
        match PInterval::finite(rat(lo, den).max(int(1)), rat(hi, den)) {
            Ok(PInterval::Open { lower, upper }) => {
                prop_assert!(lower >= int(1));
                let ordered = match upper { Upper::Finite(u) => lower < u, Upper::Infinity => true };
                prop_assert!(ordered);
            }
            Ok(PInterval::Empty) => {}
            Err(_) => prop_assert!(rat(hi, den) <= rat(lo, den).max(int(1))),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn finite_norms_match_radial_quadrature(shape in coprime_shape(4), k in 0usize..7, a1 in 0i64..4, slack in 0i64..4) {
        let p = rat(SAMPLED_P[k].0, SAMPLED_P[k].1);
        // the smallest allowable a2 for this a1, pushed up by `slack`
        let (m, n) = (shape.m(), shape.n());
        let floor = hartogs_core::exact::lp_threshold_floor(shape, p).unwrap();
        let a2 = Integer::div_ceil(&(floor - n * a1), &m) + slack;
        let idx = LatticeIndex::new(a1, a2).unwrap();
        // graded Gauss resolves r^e to 1e-6 only for e ≥ -4/5; closer to -1 the rule loses digits
        prop_assume!(radial_exponent(shape, idx, p) >= rat(-4, 5));
        let NormValue::Finite { pi_squared_multiple } = monomial_lp_norm_pth_power(shape, idx, p).unwrap() else {
            return Err(TestCaseError::fail("allowable index with infinite norm"));
        };
        let exact = to_real::<f64>(pi_squared_multiple) * std::f64::consts::PI.powi(2);
        let pf = to_real::<f64>(p);
        let (e1, e2) = (pf * a1 as f64, pf * a2 as f64);
        let region = Region::HartogsShadow { shape, delta_cut: 0.0 };
        // written in the fiber coordinate r1 / r2^(n/m) so the factors stay bounded near the origin
        let fiber = n as f64 / m as f64;
        let integrand = |s: &RadialSample<f64>| (s.r1 / s.r2.powf(fiber)).powf(e1) * s.r2.powf(e2 + fiber * e1);
        let q = integrate_radial(&region, integrand, &QuadConfig::default()).unwrap();
        prop_assert!((q.value.re - exact).abs() <= 1e-6 * exact, "{} vs {}", q.value.re, exact);
    }
}

// ---------------------------------------------------------------- exact grids

#[test]
fn sobolev_threshold_at_order_zero_is_the_lp_upper_endpoint() {
    for m in 1..=10 {
        for n in 1..=10 {
            if m.gcd(&n) != 1 {
                continue;
            }
            let shape = GammaShape::new(m, n).unwrap();
            let t = sobolev_failure_threshold(shape, SobolevOrder::new(0, 0));
            assert_eq!(lp_interval(shape).upper(), Some(Upper::Finite(t.threshold)));
        }
    }
}

#[test]
fn cd_families_on_thin_triangles() {
    for n in 1..=10 {
        let shape = GammaShape::thin(n).unwrap();
        let z2 = cd_interval(&CDBound::integers(n - 1, n + 1, shape)).unwrap();
        assert_eq!(z2, PInterval::finite(rat(2 * n + 2, n + 3), int(2)).unwrap());
        let z1 = cd_interval(&CDBound::integers(0, 2 * n, shape)).unwrap();
        assert_eq!(z1, PInterval::finite(int(1), rat(2 * n + 2, 2 * n)).unwrap());
    }
    let h1 = GammaShape::new(1, 1).unwrap();
    let reg = cd_interval(&CDBound::integers(0, 2, h1))
        .unwrap()
        .intersect(&cd_interval(&CDBound::integers(0, 2, h1)).unwrap())
        .intersect(&lp_interval(h1));
    assert_eq!(reg, PInterval::finite(rat(4, 3), int(2)).unwrap());
}

#[test]
fn derivative_thresholds_match_the_failure_formula() {
    for m in 1..=5 {
        for n in 1..=5 {
            if m.gcd(&n) != 1 {
                continue;
            }
            let shape = GammaShape::new(m, n).unwrap();
            for j in 0..=3 {
                for l in 0..=3 {
                    let order = SobolevOrder::new(j, l);
                    let d = differentiate(project_monomial(shape, witness_index(shape, j), Basis::Full), order);
                    let idx = d.idx();
                    // p where the radial exponent p·a2 + 1 + (n/m)(p·a1 + 2) equals -1
                    let g = shape.fiber_exponent();
                    let slope = int(idx.a2()) + g * int(idx.a1());
                    let crossing = -(int(2) + int(2) * g) / slope;
                    assert_eq!(crossing, sobolev_failure_threshold(shape, order).threshold, "({m},{n}) ({j},{l})");
                    assert!(!d.is_zero());
                }
            }
        }
    }
}

#[test]
fn divergence_classification_agrees_with_the_norm() {
    let cfg = QuadConfig::default();
    let deltas = [0.1, 0.01, 0.001, 0.0001];
    for (m, n) in [(1, 1), (1, 2), (2, 1)] {
        let shape = GammaShape::new(m, n).unwrap();
        for (j, l) in [(0, 0), (1, 0), (0, 1)] {
            let order = SobolevOrder::new(j, l);
            for p in [int(2), int(3), rat(3, 2)] {
                let d = differentiate(project_monomial(shape, witness_index(shape, j), Basis::Full), order);
                let finite = monomial_lp_norm_pth_power(shape, d.idx(), p).unwrap().is_finite();
                let out = certify_divergence_rate(shape, order, p, &deltas, &cfg).unwrap();
                assert_eq!(matches!(out, RateOutcome::Finite { .. }), finite);
            }
        }
    }
}

// ---------------------------------------------------------------- kernels

fn interior_point(shape: GammaShape, (r2, x, t1, t2): (f64, f64, f64, f64)) -> HPoint64 {
    let fiber = shape.n() as f64 / shape.m() as f64;
    HPoint::new(Complex64::from_polar(x * r2.powf(fiber), t1), Complex64::from_polar(r2, t2))
}

fn polar() -> impl Strategy<Value = (f64, f64, f64, f64)> {
    (0.02f64..0.98, 0.0f64..0.98, 0.0..TAU, 0.0..TAU)
}

fn kernels() -> Vec<KernelId> {
    let mut ids = vec![
        KernelId::SubBergmanInfinity,
        KernelId::SubBergmanInfinityModified,
        KernelId::HartogsSeries { shape: GammaShape::new(2, 3).unwrap(), truncation: SeriesTruncation::default() },
    ];
    for n in 1..=3 {
        ids.push(KernelId::ThinHartogs { n });
        ids.push(KernelId::ThinHartogsModified { n });
    }
    ids
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn kernels_are_conjugate_symmetric(k in 0usize..9, a in polar(), b in polar()) {
        let id = kernels()[k];
        let shape = id.shape().unwrap();
        let (z, w) = (interior_point(shape, a), interior_point(shape, b));
        let (Ok(a), Ok(b)) = (id.eval(&z, &w), id.eval(&w, &z)) else { return Ok(()) };
        prop_assert!((a - b.conj()).norm() <= 1e-12 * (a.norm() + 1.0), "{:?}: {} vs {}", id, a, b);
    }

    #[test]
    fn bergman_type_kernels_are_positive_on_the_diagonal(k in 0usize..4, x in 0.0f64..0.98, r2 in 0.02f64..0.98, t in 0.0..TAU) {
        let id = [KernelId::SubBergmanInfinity, KernelId::ThinHartogs { n: 1 }, KernelId::ThinHartogs { n: 2 },
                  KernelId::HartogsSeries { shape: GammaShape::new(2, 3).unwrap(), truncation: SeriesTruncation::default() }][k];
        let shape = id.shape().unwrap();
        let fiber = shape.n() as f64 / shape.m() as f64;
        let z = HPoint::new(Complex64::from_polar(x * r2.powf(fiber), t), Complex64::from_polar(r2, 2.0 * t));
        let Ok(v) = id.eval(&z, &z) else { return Ok(()) };
        prop_assert!(v.re > 0.0);
        prop_assert!(v.im.abs() <= 1e-12 * v.re);
    }

    #[test]
    fn disc_kernels_are_conjugate_symmetric(r in 0.0f64..0.99, s in 0.0f64..0.99, a in 0.0..TAU, b in 0.0..TAU, k in 0u32..5) {
        let (z, w) = (Complex64::from_polar(r, a), Complex64::from_polar(s, b));
        let id = if k == 0 { KernelId::Disc } else { KernelId::DiscModified { k } };
        let (x, y) = (id.eval_disc(z, w).unwrap(), id.eval_disc(w, z).unwrap());
        prop_assert!((x - y.conj()).norm() <= 1e-12 * (x.norm() + 1.0));
        if k == 0 {
            prop_assert!(id.eval_disc(z, z).unwrap().re > 0.0);
        }
    }
}

#[test]
fn bound_ratios_stay_below_recorded_constants() {
    // thin kernels saturate their (n, n) bound exactly; the sub-Bergman ratio is |2 - z2w̄2| < 3
    let cases = [
        (KernelId::SubBergmanInfinity, CDBound::integers(2, 2, GammaShape::new(1, 1).unwrap()), 3.0),
        (KernelId::ThinHartogs { n: 1 }, CDBound::integers(1, 1, GammaShape::thin(1).unwrap()), 1.0 + 1e-9),
        (KernelId::ThinHartogs { n: 2 }, CDBound::integers(2, 2, GammaShape::thin(2).unwrap()), 1.0 + 1e-9),
        (KernelId::ThinHartogs { n: 3 }, CDBound::integers(3, 3, GammaShape::thin(3).unwrap()), 1.0 + 1e-9),
    ];
    for (id, bound, constant) in cases {
        let pairs = sample_interior_pairs(id.shape(), 10_000, 7, false);
        let sup = pairs
            .iter()
            .filter_map(|(z, w)| match (z, w) {
                (hartogs_core::quadrature::EvalPoint::Hartogs(z), hartogs_core::quadrature::EvalPoint::Hartogs(w)) => {
                    kernel_bound_ratio(&id, &bound, z, w).ok()
                }
                _ => None,
            })
            .fold(0.0, f64::max);
        assert!(sup.is_finite() && sup <= constant, "{id:?}: {sup}");
    }
}

// ---------------------------------------------------------------- quadrature

fn shadow(m: i64, n: i64) -> Region {
    Region::HartogsShadow { shape: GammaShape::new(m, n).unwrap(), delta_cut: 0.0 }
}

#[test]
fn tensor_results_do_not_depend_on_thread_count() {
    let base = QuadConfig { nodes_per_axis: 12, ..QuadConfig::default() };
    let region = Region::Hartogs4D { shape: GammaShape::new(1, 1).unwrap(), delta_cut: 0.0 };
    let f = |s: &HartogsSample<f64>| s.w.z1 * s.w.z2.conj() + s.w.z2.norm();
    let runs: Vec<_> = [Some(1), Some(3), Some(8), None]
        .into_iter()
        .map(|threads| integrate_4d(&region, f, &QuadConfig { threads, ..base.clone() }).unwrap())
        .collect();
    for r in &runs[1..] {
        assert_eq!(r.value.re.to_bits(), runs[0].value.re.to_bits());
        assert_eq!(r.value.im.to_bits(), runs[0].value.im.to_bits());
        assert_eq!(r.error_estimate.to_bits(), runs[0].error_estimate.to_bits());
    }
}

#[test]
fn monte_carlo_results_do_not_depend_on_thread_count() {
    let base = QuadConfig { mode: Mode::MonteCarlo, mc_samples: 50_000, ..QuadConfig::default() };
    let region = Region::Hartogs4D { shape: GammaShape::new(1, 2).unwrap(), delta_cut: 0.0 };
    let f = |s: &HartogsSample<f64>| Complex64::new(s.w.z1.norm_sqr() + 1.0, 0.0);
    let runs: Vec<_> = [Some(1), Some(4), None]
        .into_iter()
        .map(|threads| integrate_4d(&region, f, &QuadConfig { threads, ..base.clone() }).unwrap())
        .collect();
    for r in &runs[1..] {
        assert_eq!(r.value.re.to_bits(), runs[0].value.re.to_bits());
        assert_eq!(r.error_estimate.to_bits(), runs[0].error_estimate.to_bits());
    }
    let other_seed = integrate_4d(&region, f, &QuadConfig { seed: 1, ..base }).unwrap();
    assert_ne!(other_seed.value.re.to_bits(), runs[0].value.re.to_bits());
}

/// Error estimate at N and 2N nodes per axis.
fn doubling(estimate: impl Fn(&QuadConfig) -> f64, n: usize) -> (f64, f64) {
    let at = |k| estimate(&QuadConfig { nodes_per_axis: k, ..QuadConfig::default() });
    (at(n), at(2 * n))
}

#[test]
fn doubling_nodes_cuts_the_error_estimate_fourfold() {
    // below 8 nodes (16 for the 4D rule) the two-resolution estimate is still pre-asymptotic
    let radial = |m, n| {
        move |cfg: &QuadConfig| {
            integrate_radial(&shadow(m, n), |s: &RadialSample<f64>| s.r2.sqrt() * (1.0 - s.r1), cfg)
                .unwrap()
                .error_estimate
        }
    };
    for (m, n) in [(1, 1), (1, 2), (2, 3)] {
        for nodes in [8, 16] {
            let (coarse, fine) = doubling(radial(m, n), nodes);
            assert!(fine * 4.0 <= coarse, "({m},{n}) N={nodes}: {coarse:e} -> {fine:e}");
        }
    }
    let volume = |f: fn(&HartogsSample<f64>) -> Complex64| {
        move |cfg: &QuadConfig| {
            let region = Region::Hartogs4D { shape: GammaShape::new(1, 1).unwrap(), delta_cut: 0.0 };
            integrate_4d(&region, f, cfg).unwrap().error_estimate
        }
    };
    let integrands: [fn(&HartogsSample<f64>) -> Complex64; 2] =
        [|s| Complex64::new(s.w.z2.norm().sqrt(), 0.0), |s| Complex64::new(s.w.z2.norm_sqr() + s.w.z1.norm(), 0.0)];
    for f in integrands {
        let (coarse, fine) = doubling(volume(f), 16);
        assert!(fine * 4.0 <= coarse, "4d: {coarse:e} -> {fine:e}");
    }
}

// ---------------------------------------------------------------- verification harness

#[test]
fn checks_are_pure_given_their_inputs() {
    let cfg = QuadConfig::default();
    let strip = |mut r: hartogs_core::verify::CheckReport| {
        r.runtime_ms = 0;
        r
    };
    let a = strip(check_forelli_rudin(0.5, 0.0, &[0.5, 0.9], &cfg).unwrap());
    let b = strip(check_forelli_rudin(0.5, 0.0, &[0.5, 0.9], &cfg).unwrap());
    assert_eq!(a, b);
    let pts: Vec<Complex64> = (0..6).map(|k| Complex64::from_polar(0.6, k as f64)).collect();
    let a = strip(check_radial_annihilation(PlanarFunction::AbsSquared, &pts, 1e-4).unwrap());
    let b = strip(check_radial_annihilation(PlanarFunction::AbsSquared, &pts, 1e-4).unwrap());
    assert_eq!(a, b);
    assert_eq!(a.inputs_digest.len(), 64);
}
