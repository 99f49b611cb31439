use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;

/// Gauss–Legendre rule on [0, 1] composed with the sigmoidal grading
/// x = t^g / (t^g + (1-t)^g), which clusters nodes at both endpoints.
///
/// Complements 1 - x are stored separately so integrands singular at x = 1
/// keep full relative precision there.
#[derive(Debug, Clone, PartialEq)]
pub struct GradedRule {
    nodes: Vec<f64>,
    comps: Vec<f64>,
    weights: Vec<f64>,
}

impl GradedRule {
    pub fn new(n: usize, grading: f64) -> Self {
        let n = n.max(1);
        let gl = GaussLegendre::new(NonZeroUsize::new(n).expect("n >= 1"));
        let mut pairs: Vec<(f64, f64)> = gl.as_node_weight_pairs().iter().map(|&(x, w)| (x, w)).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        // symmetric rule: 1 - t_i is t_{n-1-i}, exact in floating point
        let t: Vec<f64> = pairs.iter().map(|&(x, _)| 0.5 * (1.0 + x)).collect();
        let mut nodes = Vec::with_capacity(n);
        let mut comps = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for (i, &(_, w)) in pairs.iter().enumerate() {
            let ti = t[i];
            let ui = t[n - 1 - i];
            let (x, cx) = if ti <= ui {
                let rho = (ti / ui).powf(grading);
                (rho / (1.0 + rho), 1.0 / (1.0 + rho))
            } else {
                let rho = (ui / ti).powf(grading);
                (1.0 / (1.0 + rho), rho / (1.0 + rho))
            };
            nodes.push(x);
            comps.push(cx);
            weights.push(0.5 * w * grading * x * cx / (ti * ui));
        }
        Self { nodes, comps, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// (x, 1 - x, weight) triples in increasing x.
    pub fn iter(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.nodes.iter().zip(&self.comps).zip(&self.weights).map(|((&x, &c), &w)| (x, c, w))
    }
}

/// A node on a bounded axis with its distance to the axis end.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct AxisNode {
    pub value: f64,
    pub to_end: f64,
    pub weight: f64,
}

/// Composite graded rule on [a, b] split at interior breakpoints.
///
/// Segments starting at a positive radius use a logarithmic map, which keeps
/// power-law integrands over many decades smooth.
pub(crate) fn radial_axis(a: f64, b: f64, breaks: &[f64], rule: &GradedRule) -> Vec<AxisNode> {
    let mut cuts = vec![a];
    for &c in breaks {
        if c > a && c < b && (c - cuts[cuts.len() - 1]) > 1e-9 * (b - a) && (b - c) > 1e-9 * (b - a) {
            cuts.push(c);
        }
    }
    cuts.push(b);
    let mut out = Vec::with_capacity(rule.len() * (cuts.len() - 1));
    for seg in cuts.windows(2) {
        let (lo, hi) = (seg[0], seg[1]);
        let tail = b - hi;
        if lo > 0.0 {
            let span = (hi / lo).ln();
            for (u, cu, w) in rule.iter() {
                let value = lo * (span * u).exp();
                // hi - value = hi (1 - exp(-span (1-u)))
                let gap = -hi * (-span * cu).exp_m1();
                out.push(AxisNode { value, to_end: gap + tail, weight: w * span * value });
            }
        } else {
            let len = hi - lo;
            for (x, cx, w) in rule.iter() {
                out.push(AxisNode { value: lo + len * x, to_end: len * cx + tail, weight: w * len });
            }
        }
    }
    out
}

/// Periodic trapezoid rule on [phase, phase + 2π).
pub(crate) fn periodic_axis(n: usize, phase: f64) -> Vec<(f64, f64)> {
    let h = std::f64::consts::TAU / n as f64;
    (0..n).map(|k| (phase + h * k as f64, h)).collect()
}

/// Graded rule on [phase, phase + 2π], clustering nodes at `phase`.
pub(crate) fn peaked_angular_axis(rule: &GradedRule, phase: f64) -> Vec<(f64, f64)> {
    let tau = std::f64::consts::TAU;
    rule.iter().map(|(x, _, w)| (phase + tau * x, tau * w)).collect()
}
