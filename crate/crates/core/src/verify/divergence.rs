use serde::{Deserialize, Serialize};

use super::{CheckReport, Recorder};
use crate::error::{Error, Result};
use crate::exact::{format_rational, to_real, witness_index, GammaShape, Rational, SobolevOrder};
use crate::monomial::{differentiate, monomial_lp_norm_pth_power, project_monomial, Basis, Divergence, NormValue};
use crate::quadrature::{integrate_radial, QuadConfig, RadialSample, Region};

/// Largest accepted relative misfit of a rate fit.
pub const MAX_MISFIT: f64 = 0.1;

/// Largest accepted relative gap between fitted and predicted rate.
pub const MAX_RATE_GAP: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum RateModel {
    /// I(δ) ≈ a + b ln(1/δ)
    Log,
    /// I(δ) ≈ a δ^exponent
    Power { exponent: f64 },
}

/// Least-squares fit of truncated norms against the cut δ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub delta_samples: Vec<f64>,
    /// ∫_{|z2| > δ} |∂^{(j,l)} B f|^p dV for each δ.
    pub measured: Vec<f64>,
    pub model: RateModel,
    /// Power: fitted exponent. Log: fitted coefficient b of ln(1/δ).
    pub fitted_exponent: f64,
    /// The same quantity from the exact norm integral.
    pub predicted_exponent: f64,
    pub relative_misfit: f64,
    /// Misfit of the other model, for contrast.
    pub alternative_misfit: f64,
}

impl RateFit {
    pub fn passes(&self) -> bool {
        let gap = (self.fitted_exponent - self.predicted_exponent).abs() / self.predicted_exponent.abs();
        self.relative_misfit <= MAX_MISFIT && gap <= MAX_RATE_GAP
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum RateOutcome {
    /// p is below the failure threshold; nothing diverges.
    Finite {
        norm: NormValue,
    },
    Fitted(RateFit),
}

/// Returns (intercept, slope, max relative residual) of y ≈ a + b x.
/// With `log_values`, y holds logarithms and residuals are measured as
/// |e^{r} - 1|; otherwise as |r| / |y|.
fn least_squares(x: &[f64], y: &[f64], log_values: bool) -> (f64, f64, f64) {
    let k = x.len() as f64;
    let mx = x.iter().sum::<f64>() / k;
    let my = y.iter().sum::<f64>() / k;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let misfit = x
        .iter()
        .zip(y)
        .map(|(a, b)| {
            let r = b - (intercept + slope * a);
            if log_values {
                r.exp_m1().abs()
            } else {
                r.abs() / b.abs()
            }
        })
        .fold(0.0, f64::max);
    (intercept, slope, misfit)
}

/// Measures how the truncated L^p norm of ∂^{(j,l)} B f_witness grows as
/// the cut |z2| > δ shrinks, and fits the growth law the exact classification
/// predicts.
pub fn certify_divergence_rate(
    shape: GammaShape,
    order: SobolevOrder,
    p: Rational,
    deltas: &[f64],
    cfg: &QuadConfig,
) -> Result<RateOutcome> {
    if p < Rational::from_integer(1) {
        return Err(Error::ExponentBelowOne(p));
    }
    if deltas.len() < 4 {
        return Err(Error::InvalidParameter("at least four cuts δ are needed".into()));
    }
    if deltas.iter().any(|&d| !(d > 0.0 && d < 1.0)) || deltas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidParameter("cuts δ must lie in (0, 1) and strictly decrease".into()));
    }
    let beta = witness_index(shape, order.j);
    let derivative = differentiate(project_monomial(shape, beta, Basis::Full), order);
    let idx = derivative.idx();
    let norm = monomial_lp_norm_pth_power(shape, idx, p)?;
    let divergence = match norm {
        NormValue::Finite { .. } => return Ok(RateOutcome::Finite { norm }),
        NormValue::Infinite { divergence } => divergence,
    };

    let pf = to_real::<f64>(p);
    let scale = to_real::<f64>(derivative.coeff()).abs().powf(pf);
    let (e1, e2) = (pf * idx.a1() as f64, pf * idx.a2() as f64);
    let measured = deltas
        .iter()
        .map(|&delta| {
            let region = Region::HartogsShadow { shape, delta_cut: delta };
            let res = integrate_radial(&region, |s: &RadialSample<f64>| scale * s.r1.powf(e1) * s.r2.powf(e2), cfg)?;
            Ok(res.value.re)
        })
        .collect::<Result<Vec<f64>>>()?;

    let log_inv: Vec<f64> = deltas.iter().map(|d| -d.ln()).collect();
    let log_delta: Vec<f64> = deltas.iter().map(|d| d.ln()).collect();
    let log_measured: Vec<f64> = measured.iter().map(|v| v.ln()).collect();
    let (_, log_slope, log_misfit) = least_squares(&log_inv, &measured, false);
    let (_, power_slope, power_misfit) = least_squares(&log_delta, &log_measured, true);

    let fit = match divergence {
        Divergence::Logarithmic => {
            let pi2 = std::f64::consts::PI * std::f64::consts::PI;
            RateFit {
                delta_samples: deltas.to_vec(),
                measured,
                model: RateModel::Log,
                fitted_exponent: log_slope,
                predicted_exponent: 4.0 * pi2 * scale / (e1 + 2.0),
                relative_misfit: log_misfit,
                alternative_misfit: power_misfit,
            }
        }
        Divergence::Power { order } => RateFit {
            delta_samples: deltas.to_vec(),
            measured,
            model: RateModel::Power { exponent: power_slope },
            fitted_exponent: power_slope,
            predicted_exponent: to_real(order),
            relative_misfit: power_misfit,
            alternative_misfit: log_misfit,
        },
    };
    Ok(RateOutcome::Fitted(fit))
}

/// Report form of [`certify_divergence_rate`]. A Finite outcome passes.
pub fn check_divergence_rate(
    shape: GammaShape,
    order: SobolevOrder,
    p: Rational,
    deltas: &[f64],
    cfg: &QuadConfig,
) -> Result<CheckReport> {
    let rec = Recorder::start(
        "divergence_rate",
        serde_json::json!({ "shape": shape, "order": order, "p": format_rational(&p), "deltas": deltas }),
        Some(cfg),
    );
    let outcome = certify_divergence_rate(shape, order, p, deltas, cfg)?;
    let pass = match &outcome {
        RateOutcome::Finite { .. } => true,
        RateOutcome::Fitted(fit) => fit.passes(),
    };
    Ok(rec.finish(outcome, pass, MAX_MISFIT))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::int;

    #[test]
    fn least_squares_recovers_lines() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y = [3.0, 5.0, 7.0, 9.0];
        let (a, b, misfit) = least_squares(&x, &y, false);
        assert!((a - 1.0).abs() < 1e-12 && (b - 2.0).abs() < 1e-12 && misfit < 1e-12);
    }

    #[test]
    fn below_threshold_is_finite() {
        let shape = GammaShape::new(1, 1).unwrap();
        let out = certify_divergence_rate(
            shape,
            SobolevOrder::new(0, 0),
            int(3),
            &[0.1, 0.01, 0.001, 0.0001],
            &QuadConfig::default(),
        )
        .unwrap();
        assert!(matches!(out, RateOutcome::Finite { .. }));
    }

    #[test]
    fn rejects_bad_cuts() {
        let shape = GammaShape::new(1, 1).unwrap();
        let cfg = QuadConfig::default();
        let order = SobolevOrder::new(0, 1);
        assert!(certify_divergence_rate(shape, order, int(2), &[0.1, 0.01, 0.001], &cfg).is_err());
        assert!(certify_divergence_rate(shape, order, int(2), &[0.1, 0.2, 0.01, 0.001], &cfg).is_err());
    }

    #[test]
    fn log_growth_of_first_derivative() {
        let shape = GammaShape::new(1, 1).unwrap();
        let deltas = [0.1, 0.01, 0.001, 0.0001];
        let out =
            certify_divergence_rate(shape, SobolevOrder::new(0, 1), int(2), &deltas, &QuadConfig::default()).unwrap();
        let RateOutcome::Fitted(fit) = out else { panic!("expected a fit") };
        assert_eq!(fit.model, RateModel::Log);
        let pi2 = std::f64::consts::PI.powi(2);
        assert!((fit.predicted_exponent - pi2 / 2.0).abs() < 1e-12);
        assert!(fit.passes(), "{fit:?}");
    }
}
