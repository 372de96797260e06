//! Quadrature rules for the time integrals.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleKind {
    GaussLegendre,
    Custom,
}

/// Nodes and weights; a Gauss–Legendre rule lives on `[0, 1]` with unit
/// total weight, anything mapped or composed is `Custom`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    kind: RuleKind,
}

impl QuadratureRule {
    /// `m`-point Gauss–Legendre rule on `[0, 1]`.
    pub fn gauss_legendre(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidArgument("rule needs at least one node".into()));
        }
        let (x, w) = legendre_nodes(m);
        Ok(Self {
            nodes: x.iter().map(|t| 0.5 * (t + 1.0)).collect(),
            weights: w.iter().map(|w| 0.5 * w).collect(),
            kind: RuleKind::GaussLegendre,
        })
    }

    pub fn custom(nodes: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if nodes.len() != weights.len() {
            return Err(Error::InvalidArgument(format!(
                "{} nodes but {} weights",
                nodes.len(),
                weights.len()
            )));
        }
        if nodes.iter().chain(&weights).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite node or weight".into()));
        }
        Ok(Self {
            nodes,
            weights,
            kind: RuleKind::Custom,
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn kind(&self) -> RuleKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    /// Affine image of this `[0, 1]` rule on `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> QuadratureRule {
        let h = b - a;
        QuadratureRule {
            nodes: self.nodes.iter().map(|r| a + h * r).collect(),
            weights: self.weights.iter().map(|w| h * w).collect(),
            kind: RuleKind::Custom,
        }
    }

    /// This `[0, 1]` rule applied in `log t` on `[a, b]`, `0 < a < b`; the
    /// weights carry the Jacobian `t`.
    pub fn log_mapped(&self, a: f64, b: f64) -> Result<QuadratureRule> {
        if !(a > 0.0 && b > a) {
            return Err(Error::InvalidArgument(format!(
                "log-mapped rule needs 0 < a < b, got ({a}, {b})"
            )));
        }
        let (la, lb) = (a.ln(), b.ln());
        let h = lb - la;
        let nodes: Vec<f64> = self.nodes.iter().map(|r| (la + h * r).exp()).collect();
        let weights = self
            .weights
            .iter()
            .zip(&nodes)
            .map(|(w, t)| h * w * t)
            .collect();
        Ok(QuadratureRule {
            nodes,
            weights,
            kind: RuleKind::Custom,
        })
    }

    /// `panels` equal copies of the affine map on `[a, b]`.
    pub fn composite(&self, a: f64, b: f64, panels: usize) -> QuadratureRule {
        let panels = panels.max(1);
        let h = (b - a) / panels as f64;
        let mut out = QuadratureRule {
            nodes: Vec::with_capacity(self.len() * panels),
            weights: Vec::with_capacity(self.len() * panels),
            kind: RuleKind::Custom,
        };
        for p in 0..panels {
            let lo = a + p as f64 * h;
            let piece = self.mapped(lo, lo + h);
            out.nodes.extend(piece.nodes);
            out.weights.extend(piece.weights);
        }
        out
    }

    /// Composite rule in `log t` on `[a, b]`.
    pub fn composite_log(&self, a: f64, b: f64, panels: usize) -> Result<QuadratureRule> {
        if !(a > 0.0 && b > a) {
            return Err(Error::InvalidArgument(format!(
                "log-mapped rule needs 0 < a < b, got ({a}, {b})"
            )));
        }
        let panels = panels.max(1);
        let ratio = (b / a).powf(1.0 / panels as f64);
        let mut out = QuadratureRule {
            nodes: Vec::new(),
            weights: Vec::new(),
            kind: RuleKind::Custom,
        };
        let mut lo = a;
        for p in 0..panels {
            let hi = if p + 1 == panels { b } else { lo * ratio };
            let piece = self.log_mapped(lo, hi)?;
            out.nodes.extend(piece.nodes);
            out.weights.extend(piece.weights);
            lo = hi;
        }
        Ok(out)
    }

    /// Multiplies every weight by `g(node)`.
    pub fn reweighted(&self, g: impl Fn(f64) -> f64) -> QuadratureRule {
        QuadratureRule {
            nodes: self.nodes.clone(),
            weights: self.iter().map(|(t, w)| w * g(t)).collect(),
            kind: RuleKind::Custom,
        }
    }

    /// Concatenation of two rules (integral over the union of their ranges).
    pub fn concat(&self, other: &QuadratureRule) -> QuadratureRule {
        let mut nodes = self.nodes.clone();
        nodes.extend(&other.nodes);
        let mut weights = self.weights.clone();
        weights.extend(&other.weights);
        QuadratureRule {
            nodes,
            weights,
            kind: RuleKind::Custom,
        }
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        let terms: Vec<f64> = self.iter().map(|(t, w)| w * f(t)).collect();
        crate::fft::pairwise_sum(&terms)
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` by Newton iteration on the
/// three-term recurrence.
fn legendre_nodes(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; m];
    let mut w = vec![0.0; m];
    let half = m.div_ceil(2);
    for i in 0..half {
        let mut z = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_eval(m, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() <= 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_eval(m, z);
        if d != 0.0 {
            dp = d;
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[m - 1 - i] = z;
        w[i] = wi;
        w[m - 1 - i] = wi;
    }
    if m % 2 == 1 {
        x[m / 2] = 0.0;
    }
    (x, w)
}

/// `(P_m(z), P_m'(z))`.
fn legendre_eval(m: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if m == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=m {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = m as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}
