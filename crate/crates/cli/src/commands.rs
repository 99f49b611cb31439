use clap::{Args, Subcommand, ValueEnum};
use hartogs_core::diagram::DiagramSpec;
use hartogs_core::exact::{
    boundary_ray, cd_interval, format_rational, is_allowable, lp_interval, lp_threshold_floor, parse_rational,
    sobolev_failure_threshold, CDBound, SobolevOrder,
};
use hartogs_core::kernels::{
    disc_kernel, hartogs_series_kernel, subbergman_kernel, thin_hartogs_kernel, DiscForm, KernelId, SeriesForm,
    SeriesTruncation,
};
use hartogs_core::monomial::{witness_report, Basis, TestMonomial};
use hartogs_core::quadrature::{EvalPoint, QuadConfig, Region, SchurWeight};
use hartogs_core::verify::{self, CheckReport, IbpRegion, IdentityOptions, PlanarFunction};
use hartogs_core::{Complex64, Error, GammaShape, HPoint64, LatticeIndex, PInterval, Rational, Result};
use serde::Serialize;
use serde_json::json;

use crate::parse;
use crate::Output;

fn shape(m: i64, n: i64) -> Result<GammaShape> {
    GammaShape::new(m, n)
}

fn rational(s: &str) -> Result<Rational> {
    parse_rational(s)
}

fn interval_json(iv: &PInterval) -> serde_json::Value {
    match (iv.lower(), iv.upper()) {
        (Some(lo), Some(hi)) => json!({ "lower": format_rational(&lo), "upper": hi.to_string() }),
        _ => json!({ "empty": true }),
    }
}

// ---------------------------------------------------------------- index

#[derive(Args, Debug)]
pub struct IndexArgs {
    #[arg(short, long)]
    m: i64,
    #[arg(short, long)]
    n: i64,
    /// Exponent p >= 1, as a/b, integer or decimal.
    #[arg(short, long)]
    p: String,
    /// Lattice index a1,a2 to test.
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
}

pub fn index(a: &IndexArgs) -> Result<Output> {
    let shape = shape(a.m, a.n)?;
    let p = rational(&a.p)?;
    let threshold = lp_threshold_floor(shape, p)?;
    let ray = boundary_ray(shape, p)?;
    let mut payload = json!({
        "shape": shape,
        "p": format_rational(&p),
        "threshold": threshold,
        "ray": ray,
    });
    if let Some(alpha) = &a.alpha {
        let idx = parse::index(alpha)?;
        payload["alpha"] = json!(idx);
        payload["allowable"] = json!(is_allowable(shape, p, idx)?);
    }
    Ok(Output::json(payload))
}

// ---------------------------------------------------------------- interval

#[derive(Args, Debug)]
pub struct IntervalArgs {
    #[arg(short, long)]
    m: i64,
    #[arg(short, long)]
    n: i64,
    /// Kernel bound exponent on the |z2| factor.
    #[arg(short, long, requires = "d", conflicts_with_all = ["j", "l"], allow_hyphen_values = true)]
    c: Option<String>,
    /// Kernel bound exponent on the |w2| factor.
    #[arg(short, long, requires = "c", allow_hyphen_values = true)]
    d: Option<String>,
    /// Number of z1 derivatives.
    #[arg(short, long, requires = "l")]
    j: Option<u32>,
    /// Number of z2 derivatives.
    #[arg(short, long, requires = "j")]
    l: Option<u32>,
}

pub fn interval(a: &IntervalArgs) -> Result<Output> {
    let shape = shape(a.m, a.n)?;
    if let (Some(c), Some(d)) = (&a.c, &a.d) {
        let bound = CDBound::new(rational(c)?, rational(d)?, shape);
        let iv = cd_interval(&bound)?;
        return Ok(Output::json(interval_json(&iv)));
    }
    if let (Some(j), Some(l)) = (a.j, a.l) {
        return Ok(Output::json(sobolev_failure_threshold(shape, SobolevOrder::new(j, l))));
    }
    Ok(Output::json(interval_json(&lp_interval(shape))))
}

// ---------------------------------------------------------------- witness

#[derive(Args, Debug)]
pub struct WitnessArgs {
    #[arg(short, long)]
    m: i64,
    #[arg(short, long)]
    n: i64,
    #[arg(short, long, default_value_t = 0)]
    j: u32,
    #[arg(short, long, default_value_t = 0)]
    l: u32,
    /// Comma-separated exponents.
    #[arg(short, long)]
    p: String,
}

fn test_function(beta: TestMonomial) -> String {
    let mut parts = Vec::new();
    if beta.b1 > 0 {
        parts.push(if beta.b1 == 1 { "z1".to_string() } else { format!("z1^{}", beta.b1) });
    }
    if beta.b2 > 0 {
        parts.push(if beta.b2 == 1 { "conj(z2)".to_string() } else { format!("conj(z2)^{}", beta.b2) });
    }
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("·")
    }
}

pub fn witness(a: &WitnessArgs) -> Result<Output> {
    let shape = shape(a.m, a.n)?;
    let ps = parse::rationals(&a.p)?;
    let report = witness_report(shape, SobolevOrder::new(a.j, a.l), &ps)?;
    let samples: Vec<_> = report
        .samples
        .iter()
        .map(|s| {
            json!({
                "p": format_rational(&s.p),
                "f_norm": s.f_norm.symbolic(),
                "derivative_norm": s.derivative_norm.symbolic(),
                "beyond_threshold": s.beyond_threshold,
            })
        })
        .collect();
    let rendered = json!({
        "f": test_function(report.beta),
        "projection": report.projection.to_string(),
        "derivative": report.derivative.to_string(),
        "threshold": format_rational(&report.threshold.threshold),
        "samples": samples,
    });
    let rows = report
        .samples
        .iter()
        .map(|s| {
            vec![
                format_rational(&s.p),
                s.f_norm.symbolic(),
                s.derivative_norm.symbolic(),
                s.beyond_threshold.to_string(),
            ]
        })
        .collect();
    let header = ["p", "f_norm", "derivative_norm", "beyond_threshold"].map(String::from).to_vec();
    let flips = report.verdicts_flip_at_threshold();
    Ok(Output::json(json!({ "report": report, "rendered": rendered, "verdicts_flip_at_threshold": flips }))
        .with_table(header, rows))
}

// ---------------------------------------------------------------- kernel

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelName {
    /// Bergman kernel of the unit disc.
    Disc,
    /// Disc kernel minus its degree k-1 Taylor part.
    DiscModified,
    /// Closed-form Bergman kernel of H_{1/n}.
    Thin,
    /// Thin kernel minus its value on the z1 = w1 = 0 slice.
    ThinModified,
    /// Monomial series Bergman kernel of H_{m/n}.
    Series,
    /// Sub-Bergman kernel of H_1.
    Sub,
    /// Sub-Bergman kernel minus its z1 = w1 = 0 slice.
    SubModified,
}

#[derive(Args, Debug, Clone)]
pub struct KernelSel {
    #[arg(value_enum)]
    kernel: KernelName,
    #[arg(short, long, default_value_t = 1)]
    m: i64,
    #[arg(short, long, default_value_t = 1)]
    n: i64,
    /// Order of the modified disc kernel.
    #[arg(short, long, default_value_t = 1)]
    k: u32,
    /// Weight cap of series kernels.
    #[arg(long, default_value_t = SeriesTruncation::default().max_weight)]
    max_weight: u32,
    /// Relative shell tolerance of series kernels.
    #[arg(long, default_value_t = SeriesTruncation::default().tail_tol)]
    tail_tol: f64,
}

impl KernelSel {
    fn id(&self) -> Result<KernelId> {
        let thin_only = || {
            if self.m != 1 {
                Err(Error::InvalidParameter(format!("the {:?} kernel needs m = 1", self.kernel)))
            } else {
                Ok(())
            }
        };
        let id = match self.kernel {
            KernelName::Disc => KernelId::Disc,
            KernelName::DiscModified => KernelId::DiscModified { k: self.k },
            KernelName::Thin => {
                thin_only()?;
                KernelId::ThinHartogs { n: self.n }
            }
            KernelName::ThinModified => {
                thin_only()?;
                KernelId::ThinHartogsModified { n: self.n }
            }
            KernelName::Series => {
                KernelId::HartogsSeries { shape: shape(self.m, self.n)?, truncation: self.truncation()? }
            }
            KernelName::Sub => KernelId::SubBergmanInfinity,
            KernelName::SubModified => KernelId::SubBergmanInfinityModified,
        };
        id.validate()?;
        Ok(id)
    }

    fn truncation(&self) -> Result<SeriesTruncation> {
        SeriesTruncation::new(self.max_weight, self.tail_tol)
    }
}

#[derive(Args, Debug)]
pub struct KernelArgs {
    #[command(flatten)]
    sel: KernelSel,
    /// First argument: z on the disc, or z1,z2.
    #[arg(long, required = true, allow_hyphen_values = true)]
    z: Vec<String>,
    /// Second argument, paired with --z in order.
    #[arg(long, required = true, allow_hyphen_values = true)]
    w: Vec<String>,
    /// Also evaluate the monomial series and report the difference.
    #[arg(long)]
    compare_series: bool,
}

#[derive(Serialize)]
struct ComplexJson {
    re: f64,
    im: f64,
}

impl From<Complex64> for ComplexJson {
    fn from(v: Complex64) -> Self {
        Self { re: v.re, im: v.im }
    }
}

fn parse_eval_point(id: &KernelId, s: &str) -> Result<EvalPoint<f64>> {
    if id.is_disc() {
        Ok(EvalPoint::Disc(parse::complex(s)?))
    } else {
        Ok(EvalPoint::Hartogs(parse::point(s)?))
    }
}

fn point_json(p: &EvalPoint<f64>) -> serde_json::Value {
    match p {
        EvalPoint::Disc(z) => json!(ComplexJson::from(*z)),
        EvalPoint::Hartogs(h) => json!({ "z1": ComplexJson::from(h.z1), "z2": ComplexJson::from(h.z2) }),
    }
}

fn point_text(p: &EvalPoint<f64>) -> String {
    match p {
        EvalPoint::Disc(z) => format!("{z}"),
        EvalPoint::Hartogs(h) => format!("{},{}", h.z1, h.z2),
    }
}

fn eval_kernel(id: &KernelId, z: &EvalPoint<f64>, w: &EvalPoint<f64>) -> Result<Complex64> {
    match (z, w) {
        (EvalPoint::Disc(z), EvalPoint::Disc(w)) => id.eval_disc(*z, *w),
        (EvalPoint::Hartogs(z), EvalPoint::Hartogs(w)) => id.eval(z, w),
        _ => Err(Error::ShapeMismatch("mixed disc and Hartogs points".into())),
    }
}

/// The other evaluation route of a kernel: the monomial series for a closed
/// form, or the closed form for the series kernel on H_{1/n}.
fn series_counterpart(sel: &KernelSel, id: &KernelId, z: &EvalPoint<f64>, w: &EvalPoint<f64>) -> Result<Complex64> {
    match (id, z, w) {
        (KernelId::Disc, EvalPoint::Disc(z), EvalPoint::Disc(w)) => {
            disc_kernel(*z, *w, DiscForm::Series(sel.max_weight as usize))
        }
        (KernelId::ThinHartogs { n }, EvalPoint::Hartogs(z), EvalPoint::Hartogs(w)) => {
            hartogs_series_kernel(GammaShape::thin(*n)?, z, w, &sel.truncation()?)?.converged()
        }
        (KernelId::SubBergmanInfinity, EvalPoint::Hartogs(z), EvalPoint::Hartogs(w)) => {
            subbergman_kernel(z, w, SeriesForm::Series(sel.truncation()?))
        }
        (KernelId::HartogsSeries { shape, .. }, EvalPoint::Hartogs(z), EvalPoint::Hartogs(w)) if shape.m() == 1 => {
            thin_hartogs_kernel(shape.n(), z, w)
        }
        _ => Err(Error::InvalidParameter("--compare-series needs disc, thin, sub, or series with m = 1".into())),
    }
}

pub fn kernel(a: &KernelArgs) -> Result<Output> {
    let id = a.sel.id()?;
    if a.z.len() != a.w.len() {
        return Err(Error::InvalidParameter(format!("{} --z values but {} --w values", a.z.len(), a.w.len())));
    }
    let mut values = Vec::new();
    let mut rows = Vec::new();
    for (zs, ws) in a.z.iter().zip(&a.w) {
        let (z, w) = (parse_eval_point(&id, zs)?, parse_eval_point(&id, ws)?);
        let value = eval_kernel(&id, &z, &w)?;
        let mut entry = json!({ "z": point_json(&z), "w": point_json(&w), "value": ComplexJson::from(value) });
        let mut row = vec![point_text(&z), point_text(&w), value.re.to_string(), value.im.to_string()];
        if a.compare_series {
            let other = series_counterpart(&a.sel, &id, &z, &w)?;
            let abs = (other - value).norm();
            let rel = abs / value.norm().max(1e-300);
            entry["comparison"] = json!({ "series": ComplexJson::from(other), "abs_diff": abs, "rel_diff": rel });
            row.extend([other.re.to_string(), other.im.to_string(), abs.to_string(), rel.to_string()]);
        }
        values.push(entry);
        rows.push(row);
    }
    let mut header: Vec<String> = ["z", "w", "re", "im"].map(String::from).to_vec();
    if a.compare_series {
        header.extend(["series_re", "series_im", "abs_diff", "rel_diff"].map(String::from));
    }
    Ok(Output::json(json!({ "kernel": id, "values": values })).with_table(header, rows))
}

// ---------------------------------------------------------------- verify

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(subcommand)]
    check: Check,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
pub enum BasisArg {
    Full,
    Bounded,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchurKernel {
    Disc,
    Thin,
}

#[derive(Subcommand, Debug)]
pub enum Check {
    /// Integration by parts for the tangential derivative on a disc or annulus.
    Ibp {
        /// disc:R or annulus:r_in,r_out
        #[arg(long, default_value = "annulus:0.3,0.8")]
        region: String,
        /// Translate the region by this complex number.
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        center: String,
        #[arg(long, default_value = "w")]
        f: String,
        #[arg(long, default_value = "wbar")]
        g: String,
        #[arg(long, default_value_t = 1e-4)]
        fd_step: f64,
    },
    /// The tangential derivative annihilates a radial function.
    Radial {
        #[arg(long, default_value = "abs2")]
        g: String,
        #[arg(long, default_value_t = 0.7)]
        radius: f64,
        #[arg(long, default_value_t = 8)]
        points: usize,
        #[arg(long, default_value_t = 1e-4)]
        fd_step: f64,
    },
    /// Quadrature of the kernel against a monomial reproduces the monomial.
    Reproducing {
        #[command(flatten)]
        sel: KernelSel,
        /// Monomial index a1,a2 (a2 = 0 on the disc).
        #[arg(long, allow_hyphen_values = true, default_value = "0,0")]
        alpha: String,
        /// Evaluation points; five built-in interior points when omitted.
        #[arg(long, allow_hyphen_values = true)]
        point: Vec<String>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Projection constant of z1^b1 conj(z2)^b2.
    Projection {
        #[arg(short, long, default_value_t = 1)]
        m: i64,
        #[arg(short, long, default_value_t = 1)]
        n: i64,
        #[arg(long, default_value = "0,1")]
        beta: String,
        #[arg(long, value_enum, default_value_t = BasisArg::Full)]
        basis: BasisArg,
        #[arg(long, allow_hyphen_values = true)]
        point: Vec<String>,
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
    },
    /// Growth rate of the truncated norm of a witness derivative.
    Divergence {
        #[arg(short, long)]
        m: i64,
        #[arg(short, long)]
        n: i64,
        #[arg(short, long, default_value_t = 0)]
        j: u32,
        #[arg(short, long, default_value_t = 0)]
        l: u32,
        #[arg(short, long)]
        p: String,
        #[arg(long, default_value = "0.1,0.01,0.001,0.0001")]
        deltas: String,
    },
    /// Recompute the reference interval table.
    Intervals,
    /// Forelli-Rudin ratio along the positive real axis.
    ForelliRudin {
        #[arg(long, default_value = "1/2")]
        epsilon: String,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        a: f64,
        #[arg(long, default_value = "0.5,0.9,0.99,0.999")]
        radii: String,
    },
    /// Schur test ratio for the disc or a thin Hartogs kernel.
    Schur {
        #[arg(value_enum, default_value_t = SchurKernel::Disc)]
        kernel: SchurKernel,
        #[arg(short, long, default_value_t = 1)]
        n: i64,
        #[arg(long, default_value = "1/2")]
        epsilon: String,
        /// Kernel bound exponents; default c = d = 2n.
        #[arg(short, long, allow_hyphen_values = true)]
        c: Option<String>,
        #[arg(short, long, allow_hyphen_values = true)]
        d: Option<String>,
        /// Exponent R of the |w2| factor of h.
        #[arg(short, long, default_value = "2", allow_hyphen_values = true)]
        r: String,
        #[arg(long, allow_hyphen_values = true)]
        point: Vec<String>,
    },
    /// Symmetry, positivity, series and subtraction identities on random pairs.
    Identities {
        #[command(flatten)]
        sel: KernelSel,
        #[arg(long, default_value_t = IdentityOptions::default().pairs)]
        pairs: usize,
        #[arg(long, default_value_t = IdentityOptions::default().seed)]
        pair_seed: u64,
    },
}

fn parse_region(s: &str) -> Result<Region> {
    let bad = || Error::Parse(format!("expected disc:R or annulus:r_in,r_out but got {s:?}"));
    let (kind, rest) = s.split_once(':').ok_or_else(bad)?;
    let vals = parse::reals(rest)?;
    let region = match (kind, vals.as_slice()) {
        ("disc", [r]) => Region::Disc { radius: *r, puncture_radius: 0.0 },
        ("annulus", [a, b]) => Region::Annulus { r_in: *a, r_out: *b },
        _ => return Err(bad()),
    };
    region.validate()?;
    Ok(region)
}

/// Five interior points spread over the domain.
fn default_points(id: &KernelId) -> Vec<EvalPoint<f64>> {
    let radii = [0.3, 0.45, 0.6, 0.75, 0.9];
    let angles = [0.0, 0.7, 1.9, 3.1, 4.4];
    match id.shape() {
        None => radii.iter().zip(angles).map(|(&r, t)| EvalPoint::Disc(Complex64::from_polar(r, t))).collect(),
        Some(shape) => {
            let fiber = shape.n() as f64 / shape.m() as f64;
            radii
                .iter()
                .zip(angles)
                .map(|(&r2, t)| {
                    EvalPoint::Hartogs(HPoint64::new(
                        Complex64::from_polar(0.5 * r2.powf(fiber), 2.0 * t),
                        Complex64::from_polar(r2, t),
                    ))
                })
                .collect()
        }
    }
}

fn report_output(report: CheckReport) -> Output {
    let exit = if report.pass { 0 } else { 1 };
    let mut out = Output::json(report);
    out.exit = exit;
    out
}

pub fn verify(a: &VerifyArgs, cfg: &QuadConfig) -> Result<Output> {
    let report = match &a.check {
        Check::Ibp { region, center, f, g, fd_step } => {
            let region = IbpRegion { region: parse_region(region)?, center: parse::complex(center)? };
            verify::check_integration_by_parts(region, f.parse()?, g.parse()?, *fd_step, cfg)?
        }
        Check::Radial { g, radius, points, fd_step } => {
            if *points == 0 {
                return Err(Error::InvalidParameter("--points must be positive".into()));
            }
            let g: PlanarFunction = g.parse()?;
            let pts: Vec<Complex64> = (0..*points)
                .map(|k| Complex64::from_polar(*radius, std::f64::consts::TAU * k as f64 / *points as f64 + 0.1))
                .collect();
            verify::check_radial_annihilation(g, &pts, *fd_step)?
        }
        Check::Reproducing { sel, alpha, point, tol } => {
            let id = sel.id()?;
            let idx = parse::index(alpha)?;
            let points = if point.is_empty() {
                default_points(&id)
            } else {
                point.iter().map(|s| parse_eval_point(&id, s)).collect::<Result<_>>()?
            };
            let tol = tol.unwrap_or(if matches!(id, KernelId::HartogsSeries { .. }) { 1e-3 } else { 1e-4 });
            verify::check_reproducing(&id, idx, &points, tol, cfg)?
        }
        Check::Projection { m, n, beta, basis, point, tol } => {
            let shape = shape(*m, *n)?;
            let b = parse::index(beta)?;
            let b2 = u32::try_from(b.a2())
                .map_err(|_| Error::InvalidParameter("beta exponents must be nonnegative".into()))?;
            let beta = TestMonomial::new(b.a1() as u32, b2);
            let basis = match basis {
                BasisArg::Full => Basis::Full,
                BasisArg::Bounded => Basis::BoundedSubspace,
            };
            let points: Vec<HPoint64> = if point.is_empty() {
                let probe = KernelId::HartogsSeries { shape, truncation: SeriesTruncation::default() };
                default_points(&probe)
                    .into_iter()
                    .filter_map(|p| match p {
                        EvalPoint::Hartogs(h) => Some(h),
                        EvalPoint::Disc(_) => None,
                    })
                    .collect()
            } else {
                point.iter().map(|s| parse::point(s)).collect::<Result<_>>()?
            };
            verify::check_projection_constants(shape, beta, basis, &points, *tol, cfg)?
        }
        Check::Divergence { m, n, j, l, p, deltas } => verify::check_divergence_rate(
            shape(*m, *n)?,
            SobolevOrder::new(*j, *l),
            rational(p)?,
            &parse::reals(deltas)?,
            cfg,
        )?,
        Check::Intervals => {
            let report = verify::check_theorem_intervals()?;
            let rows = verify::interval_table()?
                .into_iter()
                .map(|r| {
                    vec![
                        r.label,
                        r.expected.join(" "),
                        r.computed.join(" "),
                        r.reference.to_string(),
                        r.matches.to_string(),
                    ]
                })
                .collect();
            let header = ["label", "expected", "computed", "reference", "matches"].map(String::from).to_vec();
            return Ok(report_output(report).with_table(header, rows));
        }
        Check::ForelliRudin { epsilon, a, radii } => {
            let eps = hartogs_core::exact::to_real::<f64>(rational(epsilon)?);
            verify::check_forelli_rudin(eps, *a, &parse::reals(radii)?, cfg)?
        }
        Check::Schur { kernel, n, epsilon, c, d, r, point } => {
            let eps = rational(epsilon)?;
            let (id, weight) = match kernel {
                SchurKernel::Disc => (KernelId::Disc, SchurWeight::DiscDefect),
                SchurKernel::Thin => {
                    let shape = GammaShape::thin(*n)?;
                    let two_n = Rational::from_integer(2 * n);
                    let c = c.as_deref().map(rational).transpose()?.unwrap_or(two_n);
                    let d = d.as_deref().map(rational).transpose()?.unwrap_or(two_n);
                    let bound = CDBound::new(c, d, shape);
                    (KernelId::ThinHartogs { n: *n }, SchurWeight::ThreeFactor { bound, r: rational(r)? })
                }
            };
            let points: Vec<EvalPoint<f64>> = if !point.is_empty() {
                point.iter().map(|s| parse_eval_point(&id, s)).collect::<Result<_>>()?
            } else if id.is_disc() {
                [0.0, 0.5, 0.9, 0.99, 0.999].iter().map(|&t| EvalPoint::Disc(Complex64::new(t, 0.0))).collect()
            } else {
                [0.1, 0.5, 0.9, 0.99].iter().map(|&t| EvalPoint::Hartogs(HPoint64::real(0.0, t))).collect()
            };
            verify::check_schur(&id, weight, eps, &points, cfg)?
        }
        Check::Identities { sel, pairs, pair_seed } => {
            let opts = IdentityOptions { pairs: *pairs, seed: *pair_seed, ..IdentityOptions::default() };
            verify::check_kernel_identities(&sel.id()?, &opts)?
        }
    };
    Ok(report_output(report))
}

// ---------------------------------------------------------------- diagram

#[derive(Args, Debug)]
pub struct DiagramArgs {
    #[arg(short, long)]
    m: Option<i64>,
    #[arg(short, long)]
    n: Option<i64>,
    /// Comma-separated exponents, one ray each.
    #[arg(short, long)]
    p: Option<String>,
    #[arg(long, default_value_t = 12)]
    alpha1_extent: u32,
    #[arg(long, default_value_t = 8)]
    alpha2_extent: u32,
    /// Index a1,a2 to annotate with derivative arrows; repeatable.
    #[arg(long, allow_hyphen_values = true)]
    highlight: Vec<String>,
    /// JSON DiagramSpec file; replaces the shape and extent flags.
    #[arg(long, conflicts_with_all = ["m", "n", "p"])]
    spec: Option<std::path::PathBuf>,
    /// Write the SVG here and print a summary envelope.
    #[arg(short, long)]
    output: Option<std::path::PathBuf>,
}

pub fn diagram(a: &DiagramArgs) -> Result<Output> {
    let spec = match &a.spec {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
            serde_json::from_str::<DiagramSpec>(&text).map_err(|e| Error::Parse(format!("diagram spec: {e}")))?
        }
        None => {
            let (Some(m), Some(n), Some(p)) = (a.m, a.n, &a.p) else {
                return Err(Error::InvalidParameter("diagram needs -m, -n and -p, or --spec".into()));
            };
            let mut spec = DiagramSpec::new(shape(m, n)?, parse::rationals(p)?, a.alpha1_extent, a.alpha2_extent);
            spec.highlight = a.highlight.iter().map(|s| parse::index(s)).collect::<Result<Vec<LatticeIndex>>>()?;
            spec
        }
    };
    let svg = spec.render_svg()?;
    let Some(path) = &a.output else {
        return Ok(Output { payload: serde_json::Value::Null, table: None, raw: Some(svg), exit: 0 });
    };
    std::fs::write(path, &svg).map_err(|e| Error::Parse(format!("cannot write {}: {e}", path.display())))?;
    let rays: Vec<_> = spec
        .p_list
        .iter()
        .map(|&p| Ok(json!({ "p": format_rational(&p), "ray": boundary_ray(spec.shape, p)? })))
        .collect::<Result<_>>()?;
    Ok(Output::json(json!({
        "output": path.display().to_string(),
        "bytes": svg.len(),
        "spec": spec,
        "rays": rays,
        "arrows": spec.arrows(),
    })))
}
