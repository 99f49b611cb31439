//! Deterministic quadrature over discs, annuli, the Reinhardt shadow and the
//! full Hartogs triangle.
//!
//! Tensor rules combine a graded Gauss–Legendre rule on radial axes with the
//! periodic trapezoid rule on angles. Every sum is reduced through a fixed
//! pairwise tree, so results do not depend on the worker count.

mod apply;
mod probes;
mod rule;
mod tensor;

use std::fmt;

use num_complex::Complex;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::exact::GammaShape;
use crate::scalar::Real;

pub use apply::{apply_disc_kernel, apply_kernel};
pub use probes::{auxiliary_h, forelli_rudin_ratio, schur_ratio, schur_window, EvalPoint, SchurWeight, SchurWindow};
pub use rule::GradedRule;
pub use tensor::{
    integrate_4d, integrate_4d_around, integrate_planar, integrate_radial, AngularRule, HartogsSample, PlanarSample,
    RadialSample,
};

/// Environment variable that caps the number of quadrature workers.
pub const THREADS_ENV: &str = "HARTOGS_THREADS";

/// Relative two-resolution disagreement above which a result is flagged.
pub const SUSPECT_RELATIVE_ERROR: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Tensor,
    MonteCarlo,
}

/// Quadrature budget and reproducibility settings.
///
/// `nodes_per_axis` and `grading_exponent` apply to the axes of a 4D rule;
/// planar and radial rules use four times as many nodes per axis and
/// `planar_grading_exponent`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadConfig {
    pub nodes_per_axis: usize,
    pub grading_exponent: f64,
    pub planar_grading_exponent: f64,
    pub mc_samples: u64,
    pub seed: u64,
    pub mode: Mode,
    /// Worker count; `None` defers to `HARTOGS_THREADS`, then to rayon's default.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            nodes_per_axis: 24,
            grading_exponent: 3.0,
            planar_grading_exponent: 8.0,
            mc_samples: 2_000_000,
            seed: 0x5eed,
            mode: Mode::Tensor,
            threads: None,
        }
    }
}

#[derive(Deserialize)]
struct ConfigFile {
    #[serde(default)]
    quadrature: Option<QuadConfig>,
}

impl QuadConfig {
    pub fn validate(&self) -> Result<()> {
        if self.nodes_per_axis < 2 {
            return Err(Error::Config("nodes_per_axis must be at least 2".into()));
        }
        for g in [self.grading_exponent, self.planar_grading_exponent] {
            if !(g >= 1.0 && g.is_finite()) {
                return Err(Error::Config("grading exponents must be finite reals >= 1".into()));
            }
        }
        if self.mc_samples == 0 {
            return Err(Error::Config("mc_samples must be positive".into()));
        }
        if self.threads == Some(0) {
            return Err(Error::Config("threads must be positive".into()));
        }
        Ok(())
    }

    /// Reads the `[quadrature]` section of a TOML document; missing keys keep
    /// their built-in defaults.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: ConfigFile = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let cfg = file.quadrature.unwrap_or_default();
        cfg.validate()?;
        Ok(cfg)
    }

    /// Nodes per axis for planar and radial rules.
    pub fn planar_nodes(&self) -> usize {
        4 * self.nodes_per_axis
    }

    /// SHA-256 of the canonical JSON form, excluding the worker count.
    pub fn digest(&self) -> String {
        let mut canonical = self.clone();
        canonical.threads = None;
        let json = serde_json::to_string(&canonical).expect("config serializes");
        hex_digest(json.as_bytes())
    }

    fn worker_count(&self) -> Option<usize> {
        self.threads.or_else(|| std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse().ok())).filter(|&n| n > 0)
    }

    /// Runs `op` inside a pool sized by the configured worker count.
    pub(crate) fn install<R: Send>(&self, op: impl FnOnce() -> R + Send) -> R {
        match self.worker_count() {
            Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
                Ok(pool) => pool.install(op),
                Err(_) => op(),
            },
            None => op(),
        }
    }
}

pub(crate) fn hex_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Integration region. Radii are in (0, 1] for the Hartogs variants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "region", rename_all = "snake_case")]
pub enum Region {
    Disc { radius: f64, puncture_radius: f64 },
    Annulus { r_in: f64, r_out: f64 },
    HartogsShadow { shape: GammaShape, delta_cut: f64 },
    Hartogs4D { shape: GammaShape, delta_cut: f64 },
}

impl Region {
    pub fn unit_disc() -> Self {
        Region::Disc { radius: 1.0, puncture_radius: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Region::Disc { radius, puncture_radius } => {
                radius > 0.0 && radius.is_finite() && puncture_radius >= 0.0 && puncture_radius < radius
            }
            Region::Annulus { r_in, r_out } => r_in > 0.0 && r_in < r_out && r_out.is_finite(),
            Region::HartogsShadow { delta_cut, .. } | Region::Hartogs4D { delta_cut, .. } => {
                (0.0..1.0).contains(&delta_cut)
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("invalid region {self:?}")))
        }
    }

    /// Inner and outer radius of a planar region.
    pub(crate) fn planar_radii(&self) -> Option<(f64, f64)> {
        match *self {
            Region::Disc { radius, puncture_radius } => Some((puncture_radius, radius)),
            Region::Annulus { r_in, r_out } => Some((r_in, r_out)),
            _ => None,
        }
    }
}

/// How a result was computed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Method {
    Tensor { dims: u8, nodes_per_axis: Vec<usize>, grading_exponent: f64 },
    MonteCarlo { samples: u64, seed: u64 },
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Tensor { dims, nodes_per_axis, grading_exponent } => {
                write!(f, "tensor{dims}d nodes={nodes_per_axis:?} grading={grading_exponent}")
            }
            Method::MonteCarlo { samples, seed } => write!(f, "monte-carlo samples={samples} seed={seed}"),
        }
    }
}

/// Value, error estimate and provenance of a quadrature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegralResult<T> {
    pub value: Complex<T>,
    /// Two-resolution difference (tensor) or standard error (Monte Carlo).
    pub error_estimate: T,
    pub method: Method,
    pub cells_or_samples: u64,
    /// Set when the error estimate exceeds `SUSPECT_RELATIVE_ERROR` of the value.
    pub suspect: bool,
}

impl<T: Real> IntegralResult<T> {
    pub(crate) fn new(value: Complex<T>, error_estimate: T, method: Method, cells_or_samples: u64) -> Self {
        let suspect = error_estimate > T::cst(SUSPECT_RELATIVE_ERROR) * value.norm() && error_estimate > T::epsilon();
        Self { value, error_estimate, method, cells_or_samples, suspect }
    }

    pub fn relative_error(&self) -> T {
        self.error_estimate / self.value.norm()
    }
}

/// Fixed-shape pairwise reduction.
pub(crate) fn pairwise_sum<T: Real>(values: &[Complex<T>]) -> Complex<T> {
    match values.len() {
        0 => Complex::new(T::zero(), T::zero()),
        1 => values[0],
        len => {
            let mid = len / 2;
            pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
        }
    }
}

pub(crate) fn check_finite<T: Real>(v: Complex<T>, location: impl FnOnce() -> String) -> Result<Complex<T>> {
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(Error::Singularity { location: location() })
    }
}
