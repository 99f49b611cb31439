use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::rule::{peaked_angular_axis, periodic_axis, radial_axis, AxisNode, GradedRule};
use super::{check_finite, pairwise_sum, IntegralResult, Method, Mode, QuadConfig, Region};
use crate::error::{Error, Result};
use crate::exact::{to_real, GammaShape};
use crate::kernels::HPoint;
use crate::scalar::Real;

/// Radial coordinates handed to a shadow or planar integrand.
///
/// On the shadow, r1 = r2^{n/m} · fiber. On planar regions only `r2` (the
/// radius) and `r2_comp` (outer radius minus r2) are meaningful; r1 and
/// fiber are 0 and fiber_comp is 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialSample<T> {
    pub r1: T,
    pub r2: T,
    /// 1 - r2 (outer radius - r on planar regions).
    pub r2_comp: T,
    pub fiber: T,
    /// 1 - fiber.
    pub fiber_comp: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanarSample<T> {
    pub w: Complex<T>,
    pub r: T,
    /// Outer radius minus r.
    pub r_comp: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HartogsSample<T> {
    pub w: HPoint<T>,
    pub radial: RadialSample<T>,
}

/// Angular rule for planar integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AngularRule {
    /// Trapezoid rule, exponentially accurate for smooth periodic integrands.
    Periodic,
    /// Graded rule clustered at the given angle, for sharp angular peaks.
    PeakAt(f64),
}

fn coarse(n: usize) -> usize {
    (n / 2).max(2)
}

fn tensor_result<T: Real>(
    fine: Complex<T>,
    rough: Complex<T>,
    dims: u8,
    nodes: Vec<usize>,
    grading: f64,
) -> IntegralResult<T> {
    let cells = nodes.iter().map(|&n| n as u64).product();
    IntegralResult::new(
        fine,
        (fine - rough).norm(),
        Method::Tensor { dims, nodes_per_axis: nodes, grading_exponent: grading },
        cells,
    )
}

/// Integral of a radial function: 4π² ∬ f r1 r2 dr1 dr2 over the shadow
/// {0 < r1 < r2^{n/m}, delta_cut < r2 < 1}, or 2π ∫ f r dr on a disc or annulus.
pub fn integrate_radial<T, F>(region: &Region, f: F, cfg: &QuadConfig) -> Result<IntegralResult<T>>
where
    T: Real,
    F: Fn(&RadialSample<T>) -> T + Sync,
{
    region.validate()?;
    cfg.validate()?;
    let n = cfg.planar_nodes();
    let g = cfg.planar_grading_exponent;
    cfg.install(|| match *region {
        Region::HartogsShadow { shape, delta_cut } => {
            let fine = shadow_sum(shape, delta_cut, n, g, &f)?;
            let rough = shadow_sum(shape, delta_cut, coarse(n), g, &f)?;
            Ok(tensor_result(fine, rough, 2, vec![n, n], g))
        }
        Region::Disc { .. } | Region::Annulus { .. } => {
            let (lo, hi) = region.planar_radii().expect("planar");
            let fine = radial_planar_sum(lo, hi, n, g, &f)?;
            let rough = radial_planar_sum(lo, hi, coarse(n), g, &f)?;
            Ok(tensor_result(fine, rough, 1, vec![n], g))
        }
        Region::Hartogs4D { .. } => {
            Err(Error::InvalidParameter("integrate_radial takes a shadow, disc or annulus".into()))
        }
    })
}

fn shadow_sum<T, F>(shape: GammaShape, delta: f64, n: usize, g: f64, f: &F) -> Result<Complex<T>>
where
    T: Real,
    F: Fn(&RadialSample<T>) -> T + Sync,
{
    let rule = GradedRule::new(n, g);
    let r2_axis = radial_axis(delta, 1.0, &[], &rule);
    let x_axis = radial_axis(0.0, 1.0, &[], &rule);
    let fiber_exp = to_real::<f64>(shape.fiber_exponent());
    let rows: Vec<Result<Complex<T>>> = r2_axis
        .par_iter()
        .map(|r2n| {
            let scale = r2n.value.powf(fiber_exp);
            let jac = r2n.value * scale * scale;
            let mut row = T::zero();
            for xn in &x_axis {
                let s = RadialSample {
                    r1: T::cst(scale * xn.value),
                    r2: T::cst(r2n.value),
                    r2_comp: T::cst(r2n.to_end),
                    fiber: T::cst(xn.value),
                    fiber_comp: T::cst(xn.to_end),
                };
                let v = f(&s);
                if !v.is_finite() {
                    return Err(Error::Singularity { location: format!("r1 = {}, r2 = {}", s.r1, s.r2) });
                }
                row += v * T::cst(xn.weight * xn.value);
            }
            Ok(Complex::new(row * T::cst(r2n.weight * jac), T::zero()))
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(pairwise_sum(&rows) * (T::PI() * T::PI() * T::cst(4.0)))
}

fn radial_planar_sum<T, F>(lo: f64, hi: f64, n: usize, g: f64, f: &F) -> Result<Complex<T>>
where
    T: Real,
    F: Fn(&RadialSample<T>) -> T + Sync,
{
    let rule = GradedRule::new(n, g);
    let axis = radial_axis(lo, hi, &[], &rule);
    let terms = axis
        .iter()
        .map(|rn| {
            let s = RadialSample {
                r1: T::zero(),
                r2: T::cst(rn.value),
                r2_comp: T::cst(rn.to_end),
                fiber: T::zero(),
                fiber_comp: T::one(),
            };
            let v = f(&s);
            if !v.is_finite() {
                return Err(Error::Singularity { location: format!("r = {}", rn.value) });
            }
            Ok(Complex::new(v * T::cst(rn.weight * rn.value), T::zero()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(pairwise_sum(&terms) * T::TAU())
}

/// ∫ f dA over a disc or annulus in polar coordinates.
pub fn integrate_planar<T, F>(
    region: &Region,
    f: F,
    angular: AngularRule,
    cfg: &QuadConfig,
) -> Result<IntegralResult<T>>
where
    T: Real,
    F: Fn(&PlanarSample<T>) -> Complex<T> + Sync,
{
    integrate_planar_fallible(region, |s| Ok(f(s)), angular, cfg)
}

pub(crate) fn integrate_planar_fallible<T, F>(
    region: &Region,
    f: F,
    angular: AngularRule,
    cfg: &QuadConfig,
) -> Result<IntegralResult<T>>
where
    T: Real,
    F: Fn(&PlanarSample<T>) -> Result<Complex<T>> + Sync,
{
    region.validate()?;
    cfg.validate()?;
    let (lo, hi) = region
        .planar_radii()
        .ok_or_else(|| Error::InvalidParameter("integrate_planar takes a disc or annulus".into()))?;
    let n = cfg.planar_nodes();
    let g = cfg.planar_grading_exponent;
    cfg.install(|| {
        let fine = planar_sum(lo, hi, n, g, angular, &f)?;
        let rough = planar_sum(lo, hi, coarse(n), g, angular, &f)?;
        Ok(tensor_result(fine, rough, 2, vec![n, n], g))
    })
}

fn planar_sum<T, F>(lo: f64, hi: f64, n: usize, g: f64, angular: AngularRule, f: &F) -> Result<Complex<T>>
where
    T: Real,
    F: Fn(&PlanarSample<T>) -> Result<Complex<T>> + Sync,
{
    let rule = GradedRule::new(n, g);
    let r_axis = radial_axis(lo, hi, &[], &rule);
    let theta_axis = match angular {
        AngularRule::Periodic => periodic_axis(n, 0.0),
        AngularRule::PeakAt(phase) => peaked_angular_axis(&rule, phase),
    };
    let trig: Vec<(T, T, T)> = theta_axis.iter().map(|&(t, w)| (T::cst(t.cos()), T::cst(t.sin()), T::cst(w))).collect();
    let rows: Vec<Result<Complex<T>>> = r_axis
        .par_iter()
        .map(|rn| {
            let r = T::cst(rn.value);
            let mut row = Complex::new(T::zero(), T::zero());
            for &(c, s, w) in &trig {
                let sample = PlanarSample { w: Complex::new(r * c, r * s), r, r_comp: T::cst(rn.to_end) };
                let v = check_finite(f(&sample)?, || format!("w = {}", sample.w))?;
                row += v * w;
            }
            Ok(row * T::cst(rn.weight * rn.value))
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(pairwise_sum(&rows))
}

/// ∫ f dV over the Hartogs triangle (optionally cut to |w2| > delta_cut).
pub fn integrate_4d<T, F>(region: &Region, f: F, cfg: &QuadConfig) -> Result<IntegralResult<T>>
where
    T: Real,
    F: Fn(&HartogsSample<T>) -> Complex<T> + Sync,
{
    integrate_4d_fallible(region, |s| Ok(f(s)), None, cfg)
}

/// As [`integrate_4d`], with the tensor mesh split at the radii of `center`
/// and the angular grids aligned with its arguments.
pub fn integrate_4d_around<T, F>(
    region: &Region,
    f: F,
    center: &HPoint<T>,
    cfg: &QuadConfig,
) -> Result<IntegralResult<T>>
where
    T: Real,
    F: Fn(&HartogsSample<T>) -> Complex<T> + Sync,
{
    integrate_4d_fallible(region, |s| Ok(f(s)), Some(center), cfg)
}

pub(crate) fn integrate_4d_fallible<T, F>(
    region: &Region,
    f: F,
    center: Option<&HPoint<T>>,
    cfg: &QuadConfig,
) -> Result<IntegralResult<T>>
where
    T: Real,
    F: Fn(&HartogsSample<T>) -> Result<Complex<T>> + Sync,
{
    region.validate()?;
    cfg.validate()?;
    let Region::Hartogs4D { shape, delta_cut } = *region else {
        return Err(Error::InvalidParameter("integrate_4d takes a Hartogs4D region".into()));
    };
    let n = cfg.nodes_per_axis;
    let g = cfg.grading_exponent;
    let fiber_exp = to_real::<f64>(shape.fiber_exponent());
    let (r2_breaks, x_breaks, phases, angular_scale) = match center {
        Some(z) => {
            let r2 = z.z2.norm().to_f64_lossy();
            let x = z.z1.norm().to_f64_lossy() / r2.powf(fiber_exp);
            let scale = (angular_factor(n, x), angular_factor(n, r2));
            (vec![r2], vec![x], (z.z1.arg().to_f64_lossy(), z.z2.arg().to_f64_lossy()), scale)
        }
        None => (vec![], vec![], (0.0, 0.0), (1.0, 1.0)),
    };
    let peak_grading = cfg.planar_grading_exponent;
    let geometry =
        Geometry { shape, delta: delta_cut, fiber_exp, r2_breaks, x_breaks, phases, angular_scale, peak_grading };
    cfg.install(|| match cfg.mode {
        Mode::Tensor => {
            let (fine, count) = geometry.tensor_sum(n, g, &f)?;
            let (rough, _) = geometry.tensor_sum(coarse(n), g, &f)?;
            let cells = count as u64;
            let mut res = tensor_result(fine, rough, 4, count_axes(&geometry, n), g);
            res.cells_or_samples = cells;
            Ok(res)
        }
        Mode::MonteCarlo => geometry.monte_carlo(cfg.mc_samples, cfg.seed, &f),
    })
}

fn count_axes(geo: &Geometry, n: usize) -> Vec<usize> {
    let (theta1, theta2) = geo.angular_grids(n);
    let (a1, a2) = (theta1.len(), theta2.len());
    vec![n * (1 + geo.r2_breaks.len()), a2, n * (1 + geo.x_breaks.len()), a1]
}

/// Largest angular refinement relative to `nodes_per_axis`.
const MAX_ANGULAR_FACTOR: f64 = 8.0;

/// Trapezoid error for a pole at modulus 1/ρ decays like ρ^N; returns the
/// factor by which N must grow to reach 1e-10 (at least 1).
fn angular_factor(n: usize, rho: f64) -> f64 {
    if !(rho > 0.0 && rho < 1.0) {
        return 1.0;
    }
    let needed = (1e-10f64).ln() / rho.ln();
    (needed / n as f64).max(1.0)
}

struct Geometry {
    shape: GammaShape,
    delta: f64,
    fiber_exp: f64,
    r2_breaks: Vec<f64>,
    x_breaks: Vec<f64>,
    phases: (f64, f64),
    /// Angular node multipliers for (θ1, θ2).
    angular_scale: (f64, f64),
    peak_grading: f64,
}

const MC_CHUNK: u64 = 4096;

impl Geometry {
    /// Trapezoid rule when its node count stays within budget, otherwise
    /// graded rules clustered at `copies` equally spaced peak directions.
    fn angular_rule(&self, n: usize, factor: f64, copies: usize) -> Vec<(f64, f64)> {
        if factor <= MAX_ANGULAR_FACTOR {
            periodic_axis(((n as f64 * factor).ceil() as usize).max(n), 0.0)
        } else {
            let count = ((n as f64 * MAX_ANGULAR_FACTOR) as usize / copies).max(n);
            let sector = std::f64::consts::TAU / copies as f64;
            let base = peaked_angular_axis(&GradedRule::new(count, self.peak_grading), 0.0);
            (0..copies)
                .flat_map(|k| {
                    base.iter().map(move |&(t, w)| (k as f64 * sector + t / copies as f64, w / copies as f64))
                })
                .collect()
        }
    }

    /// θ1 and θ2 grids. The θ1 grid is sheared by (n/m)(θ2 - arg z2) so that
    /// the ridge m(arg z1 - θ1) = n(arg z2 - θ2) sits on fixed θ1 nodes.
    fn angular_grids(&self, n: usize) -> (Vec<(f64, f64)>, Vec<(f64, f64)>) {
        let theta1 = self.angular_rule(n, self.angular_scale.0, self.shape.m() as usize);
        let theta2 = self.angular_rule(n, self.angular_scale.1, 1);
        (theta1, theta2)
    }

    fn tensor_sum<T, F>(&self, n: usize, g: f64, f: &F) -> Result<(Complex<T>, usize)>
    where
        T: Real,
        F: Fn(&HartogsSample<T>) -> Result<Complex<T>> + Sync,
    {
        let rule = GradedRule::new(n, g);
        let r2_axis = radial_axis(self.delta, 1.0, &self.r2_breaks, &rule);
        let x_axis: Vec<AxisNode> = radial_axis(0.0, 1.0, &self.x_breaks, &rule);
        let (theta1, theta2) = self.angular_grids(n);
        // per θ2 node: (cos θ2, sin θ2, w2, [(cos θ1, sin θ1, w1)])
        let grid: Vec<(T, T, T, Vec<(T, T, T)>)> = theta2
            .iter()
            .map(|&(t2, w2)| {
                let t2 = t2 + self.phases.1;
                let shift = self.phases.0 + self.fiber_exp * (t2 - self.phases.1);
                let ring = theta1
                    .iter()
                    .map(|&(t1, w1)| {
                        let t = t1 + shift;
                        (T::cst(t.cos()), T::cst(t.sin()), T::cst(w1))
                    })
                    .collect();
                (T::cst(t2.cos()), T::cst(t2.sin()), T::cst(w2), ring)
            })
            .collect();
        let count = r2_axis.len() * x_axis.len() * theta1.len() * theta2.len();
        let rows: Vec<Result<Complex<T>>> = r2_axis
            .par_iter()
            .map(|r2n| {
                let scale = r2n.value.powf(self.fiber_exp);
                let jac = r2n.value * scale * scale;
                let r2 = T::cst(r2n.value);
                let mut row = Complex::new(T::zero(), T::zero());
                for (c2, s2, w2, ring_nodes) in &grid {
                    let z2 = Complex::new(r2 * *c2, r2 * *s2);
                    for xn in &x_axis {
                        let r1 = T::cst(scale * xn.value);
                        let radial = RadialSample {
                            r1,
                            r2,
                            r2_comp: T::cst(r2n.to_end),
                            fiber: T::cst(xn.value),
                            fiber_comp: T::cst(xn.to_end),
                        };
                        let mut ring = Complex::new(T::zero(), T::zero());
                        for &(c1, s1, w1) in ring_nodes {
                            let sample = HartogsSample { w: HPoint::new(Complex::new(r1 * c1, r1 * s1), z2), radial };
                            let v = check_finite(f(&sample)?, || format!("w = ({}, {})", sample.w.z1, sample.w.z2))?;
                            ring += v * w1;
                        }
                        row += ring * T::cst(xn.weight * xn.value) * *w2;
                    }
                }
                Ok(row * T::cst(r2n.weight * jac))
            })
            .collect();
        let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
        Ok((pairwise_sum(&rows), count))
    }

    /// Uniform samples in the bidisc, rejected outside the region.
    fn monte_carlo<T, F>(&self, samples: u64, seed: u64, f: &F) -> Result<IntegralResult<T>>
    where
        T: Real,
        F: Fn(&HartogsSample<T>) -> Result<Complex<T>> + Sync,
    {
        let base = ChaCha8Rng::seed_from_u64(seed);
        let (m, n) = (self.shape.m() as i32, self.shape.n() as i32);
        let chunks = samples.div_ceil(MC_CHUNK);
        let partial: Vec<Result<(Complex<T>, T)>> = (0..chunks)
            .into_par_iter()
            .map(|chunk| {
                let mut sum = Complex::new(T::zero(), T::zero());
                let mut sum_sq = T::zero();
                let end = ((chunk + 1) * MC_CHUNK).min(samples);
                for index in chunk * MC_CHUNK..end {
                    let mut rng = base.clone();
                    rng.set_stream(index);
                    let u: [f64; 4] = rng.random();
                    let r1 = u[0].sqrt();
                    let r2 = u[1].sqrt();
                    if r2 <= self.delta || r1.powi(m) >= r2.powi(n) {
                        continue;
                    }
                    let t1 = std::f64::consts::TAU * u[2];
                    let t2 = std::f64::consts::TAU * u[3];
                    let x = r1 / r2.powf(self.fiber_exp);
                    let sample = HartogsSample {
                        w: HPoint::new(
                            Complex::from_polar(T::cst(r1), T::cst(t1)),
                            Complex::from_polar(T::cst(r2), T::cst(t2)),
                        ),
                        radial: RadialSample {
                            r1: T::cst(r1),
                            r2: T::cst(r2),
                            r2_comp: T::cst(1.0 - r2),
                            fiber: T::cst(x),
                            fiber_comp: T::cst(1.0 - x),
                        },
                    };
                    let v = check_finite(f(&sample)?, || format!("w = ({}, {})", sample.w.z1, sample.w.z2))?;
                    sum += v;
                    sum_sq += v.norm_sqr();
                }
                Ok((sum, sum_sq))
            })
            .collect();
        let partial = partial.into_iter().collect::<Result<Vec<_>>>()?;
        let sums: Vec<Complex<T>> = partial.iter().map(|p| p.0).collect();
        let squares: Vec<Complex<T>> = partial.iter().map(|p| Complex::new(p.1, T::zero())).collect();
        let count = T::cst(samples as f64);
        let mean = pairwise_sum(&sums) / count;
        let mean_sq = pairwise_sum(&squares).re / count;
        let variance = (mean_sq - mean.norm_sqr()).max(T::zero());
        let volume = T::PI() * T::PI();
        Ok(IntegralResult::new(
            mean * volume,
            volume * (variance / count).sqrt(),
            Method::MonteCarlo { samples, seed },
            samples,
        ))
    }
}
