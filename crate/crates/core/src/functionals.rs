//! The averaged nonlocal objects built from the free evolution: the quartic
//! functional `Q(f1,f2,f3,f4)`, the cubic map `Q(f1,f2,f3)`, the
//! `t`-weighted quartic `R`, power-weighted windows of the quartic and the
//! averaged Hamiltonian.
//!
//! Every pointwise product is formed on a grid with twice the points: each
//! evolved field is zero-padded in frequency space, multiplied there, and
//! the `x`-integral is taken on the padded lattice. The cubic map truncates
//! the product back to the original modes before evolving backwards, which
//! makes it the exact adjoint of the quartic form on the grid.
//!
//! Quadrature nodes are evaluated in parallel; contributions are always
//! reduced in node order by pairwise summation, so results do not depend on
//! the thread count.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft::{self, centered_sign, pairwise_sum, pairwise_sum_vecs};
use crate::grid::{Field, Grid, Space};
use crate::quadrature::QuadratureRule;

/// Time weight `t^p` of a windowed functional.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimeWeight {
    /// `p = -1`
    Inverse,
    /// `p = 0`
    Unit,
    /// `p = 1`
    Linear,
}

impl TimeWeight {
    pub fn exponent(self) -> i32 {
        match self {
            TimeWeight::Inverse => -1,
            TimeWeight::Unit => 0,
            TimeWeight::Linear => 1,
        }
    }
}

/// Closed time interval `[start, end]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub start: f64,
    pub end: f64,
}

impl Window {
    pub fn new(start: f64, end: f64) -> Result<Self> {
        if !(start.is_finite() && end.is_finite() && start < end) {
            return Err(Error::InvalidArgument(format!(
                "window needs start < end, got ({start}, {end})"
            )));
        }
        Ok(Self { start, end })
    }

    pub fn unit() -> Self {
        Self {
            start: 0.0,
            end: 1.0,
        }
    }

    /// Mirror image `[-end, -start]`.
    pub fn reflected(&self) -> Self {
        Self {
            start: -self.end,
            end: -self.start,
        }
    }

    /// Time rule for `\int_window g(t) t^p dt`, the weight `t^p` folded into
    /// the quadrature weights. `p = -1` integrates in `log t`.
    pub fn rule(&self, base: &QuadratureRule, weight: TimeWeight) -> Result<QuadratureRule> {
        match weight {
            TimeWeight::Inverse => {
                if !(self.start > 0.0) {
                    return Err(Error::InvalidArgument(format!(
                        "t^-1 weight needs a window inside (0, inf), got [{}, {}]",
                        self.start, self.end
                    )));
                }
                Ok(base.log_mapped(self.start, self.end)?.reweighted(|t| 1.0 / t))
            }
            TimeWeight::Unit => Ok(base.mapped(self.start, self.end)),
            TimeWeight::Linear => Ok(base.mapped(self.start, self.end).reweighted(|t| t)),
        }
    }

    /// Like [`Window::rule`] but with `panels` copies of `base`, equal in
    /// `t` (or in `log t` for the inverse weight).
    pub fn composite_rule(&self, base: &QuadratureRule, weight: TimeWeight, panels: usize) -> Result<QuadratureRule> {
        match weight {
            TimeWeight::Inverse => {
                if !(self.start > 0.0) {
                    return Err(Error::InvalidArgument(format!(
                        "t^-1 weight needs a window inside (0, inf), got [{}, {}]",
                        self.start, self.end
                    )));
                }
                Ok(base
                    .composite_log(self.start, self.end, panels)?
                    .reweighted(|t| 1.0 / t))
            }
            TimeWeight::Unit => Ok(base.composite(self.start, self.end, panels)),
            TimeWeight::Linear => Ok(base.composite(self.start, self.end, panels).reweighted(|t| t)),
        }
    }
}

/// Frequency data of one field laid out for the padded transform:
/// `(-1)^q fhat_m` at FFT index `q mod 2n`.
struct PaddedSpectrum {
    base: Vec<Complex64>,
}

struct Engine {
    grid: Grid,
    /// `k_q^2` at each padded index (zero outside the original band).
    k2: Vec<f64>,
    band: Vec<bool>,
}

impl Engine {
    fn new(grid: Grid) -> Self {
        let n = grid.n();
        let two_n = 2 * n;
        let mut k2 = vec![0.0; two_n];
        let mut band = vec![false; two_n];
        for m in 0..n {
            let p = Self::slot(m, n);
            let k = grid.k(m);
            k2[p] = k * k;
            band[p] = true;
        }
        Self { grid, k2, band }
    }

    #[inline]
    fn slot(m: usize, n: usize) -> usize {
        // q = m - n/2, stored at q mod 2n
        (m + 2 * n - n / 2) % (2 * n)
    }

    fn prepare(&self, f: &Field) -> PaddedSpectrum {
        let n = self.grid.n();
        let spec = f.to_frequency();
        let mut base = vec![Complex64::new(0.0, 0.0); 2 * n];
        for (m, v) in spec.values().iter().enumerate() {
            base[Self::slot(m, n)] = v * centered_sign(m, n);
        }
        PaddedSpectrum { base }
    }

    /// `T_t f` sampled on the padded lattice `-L/2 + j dx/2`.
    fn evolve_padded(&self, s: &PaddedSpectrum, t: f64) -> Vec<Complex64> {
        let two_n = 2 * self.grid.n();
        let (_, inv) = fft::plans(two_n);
        let mut buf: Vec<Complex64> = s
            .base
            .iter()
            .zip(&self.k2)
            .map(|(b, k2)| b * Complex64::from_polar(1.0, -t * k2))
            .collect();
        inv.process(&mut buf);
        let scale = self.grid.dk() / (2.0 * PI).sqrt();
        for v in buf.iter_mut() {
            *v *= scale;
        }
        buf
    }

    fn padded_dx(&self) -> f64 {
        0.5 * self.grid.dx()
    }

    /// Back to the original band: centered frequency samples of `T_{-t} P`
    /// for a padded position array `P`.
    fn project_back(&self, mut product: Vec<Complex64>, t: f64) -> Vec<Complex64> {
        let n = self.grid.n();
        let (fwd, _) = fft::plans(2 * n);
        fwd.process(&mut product);
        let scale = self.padded_dx() / (2.0 * PI).sqrt();
        (0..n)
            .map(|m| {
                let p = Self::slot(m, n);
                debug_assert!(self.band[p]);
                product[p] * (scale * centered_sign(m, n)) * Complex64::from_polar(1.0, t * self.k2[p])
            })
            .collect()
    }
}

/// The trigonometric interpolant of `f` sampled on the lattice with twice
/// the points, `-L/2 + j dx/2`.
pub(crate) fn padded_samples(f: &Field) -> Vec<Complex64> {
    let engine = Engine::new(f.grid());
    engine.evolve_padded(&engine.prepare(f), 0.0)
}

/// Distinct fields among the arguments, so repeated arguments are evolved
/// once per node.
fn dedupe<'a>(fields: &[&'a Field]) -> (Vec<&'a Field>, Vec<usize>) {
    let mut unique: Vec<&Field> = Vec::new();
    let mut index = Vec::with_capacity(fields.len());
    for f in fields {
        match unique.iter().position(|u| std::ptr::eq(*u, *f)) {
            Some(i) => index.push(i),
            None => {
                index.push(unique.len());
                unique.push(f);
            }
        }
    }
    (unique, index)
}

fn check_grids(fields: &[&Field]) -> Result<Grid> {
    let grid = fields[0].grid();
    for f in &fields[1..] {
        if f.grid() != grid {
            return Err(Error::GridMismatch(grid, f.grid()));
        }
    }
    Ok(grid)
}

/// `sum_i w_i \int conj(T f1) T f2 conj(T f3) T f4 dx` at the nodes of
/// `rule`, where the weights already carry any time weight.
pub fn space_time_quartic(fields: [&Field; 4], rule: &QuadratureRule) -> Result<Complex64> {
    let grid = check_grids(&fields)?;
    let engine = Engine::new(grid);
    let (unique, index) = dedupe(&fields);
    let prepared: Vec<PaddedSpectrum> = unique.iter().map(|f| engine.prepare(f)).collect();
    let dxp = engine.padded_dx();
    let terms: Vec<Complex64> = rule
        .iter()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&(t, w)| {
            let evolved: Vec<Vec<Complex64>> =
                prepared.iter().map(|s| engine.evolve_padded(s, t)).collect();
            let (a, b, c, d) = (
                &evolved[index[0]],
                &evolved[index[1]],
                &evolved[index[2]],
                &evolved[index[3]],
            );
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..a.len() {
                acc += a[j].conj() * b[j] * c[j].conj() * d[j];
            }
            acc * (w * dxp)
        })
        .collect();
    Ok(pairwise_sum(&terms))
}

/// `sum_i w_i \int |T f|^p dx` for a single field.
pub fn space_time_modulus_power(f: &Field, exponent: i32, rule: &QuadratureRule) -> Result<f64> {
    let engine = Engine::new(f.grid());
    let prepared = engine.prepare(f);
    let dxp = engine.padded_dx();
    let half = exponent as f64 / 2.0;
    let terms: Vec<f64> = rule
        .iter()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&(t, w)| {
            let u = engine.evolve_padded(&prepared, t);
            let s: f64 = u.iter().map(|v| v.norm_sqr().powf(half)).sum();
            s * w * dxp
        })
        .collect();
    Ok(pairwise_sum(&terms))
}

/// `sum_i w_i T_{-t_i}[T f1 conj(T f2) T f3]` as a frequency-space field.
fn cubic_spectrum(fields: [&Field; 3], rule: &QuadratureRule) -> Result<Field> {
    let grid = check_grids(&fields)?;
    let engine = Engine::new(grid);
    let (unique, index) = dedupe(&fields);
    let prepared: Vec<PaddedSpectrum> = unique.iter().map(|f| engine.prepare(f)).collect();
    let terms: Vec<Vec<Complex64>> = rule
        .iter()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&(t, w)| {
            let evolved: Vec<Vec<Complex64>> =
                prepared.iter().map(|s| engine.evolve_padded(s, t)).collect();
            let (a, b, c) = (&evolved[index[0]], &evolved[index[1]], &evolved[index[2]]);
            let product: Vec<Complex64> = (0..a.len()).map(|j| a[j] * b[j].conj() * c[j]).collect();
            engine
                .project_back(product, t)
                .into_iter()
                .map(|v| v * w)
                .collect()
        })
        .collect();
    let values = if terms.is_empty() {
        vec![Complex64::new(0.0, 0.0); grid.n()]
    } else {
        pairwise_sum_vecs(&terms)
    };
    Field::new(grid, Space::Frequency, values)
}

/// Averaged quartic functional over `r` in `[0, 1]`, `rule` a rule on
/// `[0, 1]`.
pub fn eval_q4(f1: &Field, f2: &Field, f3: &Field, f4: &Field, rule: &QuadratureRule) -> Result<Complex64> {
    space_time_quartic([f1, f2, f3, f4], rule)
}

/// Averaged cubic map, returned in position space. Satisfies
/// `<g, eval_q3(f1,f2,f3)> = eval_q4(g,f1,f2,f3)`.
pub fn eval_q3(f1: &Field, f2: &Field, f3: &Field, rule: &QuadratureRule) -> Result<Field> {
    cubic_spectrum([f1, f2, f3], rule)?.inverse_fourier()
}

/// Frequency-space output of [`eval_q3`], skipping the final transform.
pub fn eval_q3_spectrum(f1: &Field, f2: &Field, f3: &Field, rule: &QuadratureRule) -> Result<Field> {
    cubic_spectrum([f1, f2, f3], rule)
}

/// The quartic form with measure `t dx dt` on `[0, 1]`.
pub fn eval_r(f1: &Field, f2: &Field, f3: &Field, f4: &Field, rule: &QuadratureRule) -> Result<Complex64> {
    let weighted = rule.reweighted(|t| t);
    space_time_quartic([f1, f2, f3, f4], &weighted)
}

/// `\int_window \int conj(T f1) T f2 conj(T f3) T f4 t^p dx dt`; `rule` is a
/// `[0, 1]` rule that gets mapped onto the window.
pub fn eval_q_windowed(
    fields: [&Field; 4],
    window: Window,
    weight: TimeWeight,
    rule: &QuadratureRule,
) -> Result<Complex64> {
    let mapped = window.rule(rule, weight)?;
    space_time_quartic(fields, &mapped)
}

/// Kinetic term `\int |f'|^2 dx = \int k^2 |fhat|^2 dk`.
pub fn kinetic(f: &Field) -> f64 {
    let spec = f.to_frequency();
    let grid = f.grid();
    spec.values()
        .iter()
        .enumerate()
        .map(|(m, v)| grid.k(m).powi(2) * v.norm_sqr())
        .sum::<f64>()
        * grid.dk()
}

/// Averaged Hamiltonian `(d_av/2) \int |f'|^2 - Q(f,f,f,f)/4`.
pub fn eval_h(f: &Field, d_av: f64, rule: &QuadratureRule) -> Result<f64> {
    let q = eval_q4(f, f, f, f, rule)?;
    Ok(0.5 * d_av * kinetic(f) - 0.25 * q.re)
}
