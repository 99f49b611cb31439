//! Executable checks of the kernel identities, the analytic estimates and the
//! exact interval formulas. Every check returns a [`CheckReport`].

mod divergence;
mod intervals;
mod kernel_checks;
mod planar;
mod probes;

use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::quadrature::{hex_digest, EvalPoint, QuadConfig};

pub use divergence::{certify_divergence_rate, check_divergence_rate, RateFit, RateModel, RateOutcome};
pub use intervals::{check_theorem_intervals, interval_table, IntervalRow};
pub use kernel_checks::{
    check_kernel_identities, check_projection_constants, check_reproducing, sample_interior_pairs, IdentityOptions,
};
pub use planar::{
    check_integration_by_parts, check_radial_annihilation, tangential_derivative, IbpRegion, PlanarFunction,
};
pub use probes::{check_forelli_rudin, check_schur, BOUNDEDNESS_FACTOR};

/// Outcome of one check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub inputs: Value,
    /// SHA-256 over the name, the inputs and the config digest.
    pub inputs_digest: String,
    /// Digest of the quadrature config, for checks that integrate.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub config_digest: Option<String>,
    pub measured: Value,
    pub pass: bool,
    pub tolerance: f64,
    pub runtime_ms: u64,
}

pub(crate) struct Recorder {
    name: String,
    inputs: Value,
    config_digest: Option<String>,
    start: Instant,
}

impl Recorder {
    pub(crate) fn start(name: &str, inputs: impl Serialize, cfg: Option<&QuadConfig>) -> Self {
        Self {
            name: name.to_string(),
            inputs: serde_json::to_value(inputs).expect("check inputs serialize"),
            config_digest: cfg.map(QuadConfig::digest),
            start: Instant::now(),
        }
    }

    pub(crate) fn finish(self, measured: impl Serialize, pass: bool, tolerance: f64) -> CheckReport {
        let keyed = serde_json::json!({
            "name": self.name,
            "inputs": self.inputs,
            "config": self.config_digest,
        });
        let inputs_digest = hex_digest(keyed.to_string().as_bytes());
        CheckReport {
            name: self.name,
            inputs: self.inputs,
            inputs_digest,
            config_digest: self.config_digest,
            measured: serde_json::to_value(measured).expect("measurements serialize"),
            pass,
            tolerance,
            runtime_ms: self.start.elapsed().as_millis() as u64,
        }
    }
}

/// JSON form of a sample point.
#[derive(Serialize)]
#[serde(untagged)]
pub(crate) enum PointJson {
    Disc(num_complex::Complex64),
    Hartogs { z1: num_complex::Complex64, z2: num_complex::Complex64 },
}

impl From<&EvalPoint<f64>> for PointJson {
    fn from(p: &EvalPoint<f64>) -> Self {
        match p {
            EvalPoint::Disc(z) => PointJson::Disc(*z),
            EvalPoint::Hartogs(z) => PointJson::Hartogs { z1: z.z1, z2: z.z2 },
        }
    }
}

/// Relative deviation |a - b| / (|b| + 1).
pub(crate) fn offset_relative(a: num_complex::Complex64, b: num_complex::Complex64) -> f64 {
    (a - b).norm() / (b.norm() + 1.0)
}
