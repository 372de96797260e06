//! Tail distributions `alpha(s)`, `beta(s)` of a field and of its
//! transform, the self-consistency bounds they satisfy for the ground state
//! and the super-polynomial decay envelope built from them.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft::{self, pairwise_sum};
use crate::functionals::padded_samples;
use crate::grid::{Field, Grid};

/// Tails below `TAIL_FLOOR * alpha(0)` are under the discretization noise
/// and never asserted.
pub const TAIL_FLOOR: f64 = 1e-12;
/// Default allowance on the self-consistency margins.
pub const CONSISTENCY_TOL: f64 = 1e-4;
/// Above this solver residual a profile is not treated as a soliton.
pub const SOLITON_RESIDUAL: f64 = 1e-6;
/// Ratio of consecutive default `s` values; eight steps make a factor 3, so
/// `3s` of a grid point is again a grid point.
pub const S_RATIO: f64 = 1.147_202_690_439_877; // 3^{1/8}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    X,
    Fourier,
}

/// How `alpha` turns samples into an integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailRule {
    /// `dx * sum_{|x_j| >= s} |f_j|^2`. Monotone by construction and
    /// accurate relative to the tail itself, but first order in `dx` at the
    /// cut.
    #[default]
    GridSum,
    /// Exact integral of `|p|^2` over `|x| >= s` for the trigonometric
    /// interpolant `p`. Accurate to about `1e-16 ||f||^2` absolute, so
    /// meant for tails that are not tiny.
    Interpolant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailProfile {
    pub s: Vec<f64>,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub alpha_bar: Vec<f64>,
    pub beta_bar: Vec<f64>,
    /// `alpha(0) = beta(0) = ||f||`.
    pub norm: f64,
    pub rule: TailRule,
}

impl TailProfile {
    pub fn values(&self, side: Side) -> &[f64] {
        match side {
            Side::X => &self.alpha,
            Side::Fourier => &self.beta,
        }
    }

    pub fn normalized(&self, side: Side) -> &[f64] {
        match side {
            Side::X => &self.alpha_bar,
            Side::Fourier => &self.beta_bar,
        }
    }

    /// Index of `value` in the `s` grid, up to relative rounding.
    fn index_of(&self, value: f64) -> Option<usize> {
        let i = self.s.partition_point(|&s| s < value * (1.0 - 1e-9));
        (i < self.s.len() && (self.s[i] - value).abs() <= 1e-9 * value.max(1e-300)).then_some(i)
    }

    /// Pairs `(i, j)` with `s_j = 3 s_i`.
    fn triples(&self) -> Vec<(usize, usize)> {
        (0..self.s.len())
            .filter(|&i| self.s[i] > 0.0)
            .filter_map(|i| self.index_of(3.0 * self.s[i]).map(|j| (i, j)))
            .collect()
    }
}

/// `dx * 3^{i/8}` up to `L/2`.
pub fn default_s_grid(grid: Grid) -> Vec<f64> {
    let mut out = Vec::new();
    let mut i = 0;
    loop {
        let s = grid.dx() * 3f64.powf(i as f64 / 8.0);
        if s > grid.length() / 2.0 * (1.0 + 1e-12) {
            break;
        }
        out.push(s.min(grid.length() / 2.0));
        i += 1;
    }
    out
}

/// Profile with the default grid-sum rule.
pub fn tail_profile(f: &Field, s_grid: &[f64]) -> Result<TailProfile> {
    tail_profile_with(f, s_grid, TailRule::GridSum)
}

pub fn tail_profile_with(f: &Field, s_grid: &[f64], rule: TailRule) -> Result<TailProfile> {
    let grid = f.grid();
    if s_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("s grid must be strictly increasing".into()));
    }
    if let Some(&s) = s_grid.iter().find(|&&s| !(s >= 0.0 && s <= grid.length() / 2.0)) {
        return Err(Error::InvalidArgument(format!(
            "tail at s = {s} is not representable on a box of half-length {}",
            grid.length() / 2.0
        )));
    }
    let pos = f.to_position();
    let spec = f.to_frequency();
    let norm = pos.norm();

    let alpha = match rule {
        TailRule::GridSum => grid_sum_tails(&pos, s_grid),
        TailRule::Interpolant => interpolant_tails(&pos, s_grid, norm)?,
    };
    let beta = grid_sum_tails(&spec, s_grid);
    let scale = |v: &[f64]| -> Vec<f64> {
        v.iter()
            .map(|a| if norm > 0.0 { (a / norm).min(1.0) } else { 0.0 })
            .collect()
    };
    Ok(TailProfile {
        s: s_grid.to_vec(),
        alpha_bar: scale(&alpha),
        beta_bar: scale(&beta),
        alpha,
        beta,
        norm,
        rule,
    })
}

/// `sqrt(h * sum_{|y_j| >= s} |f_j|^2)` on the field's own lattice, through
/// suffix sums ordered by `|y|` so the result cannot increase with `s`.
fn grid_sum_tails(f: &Field, s_grid: &[f64]) -> Vec<f64> {
    let lattice = f.grid().lattice(f.space());
    let h = f.grid().spacing(f.space());
    let mut pts: Vec<(f64, f64)> = lattice
        .iter()
        .zip(f.values())
        .map(|(y, v)| (y.abs(), v.norm_sqr()))
        .collect();
    pts.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut suffix = Vec::with_capacity(pts.len() + 1);
    suffix.push(0.0);
    let mut acc = 0.0;
    for (_, w) in &pts {
        acc += w;
        suffix.push(acc);
    }
    s_grid
        .iter()
        .map(|&s| {
            let count = pts.partition_point(|p| p.0 >= s);
            (h * suffix[count]).sqrt()
        })
        .collect()
}

/// Exact tails of the interpolant: with `|p|^2 = sum_r c_r e^{i r dk x}`,
/// `\int_{s <= |x| <= L/2} |p|^2 = c_0 (L - 2s) - sum_{r != 0} c_r 2 sin(r dk s) / (r dk)`.
fn interpolant_tails(f: &Field, s_grid: &[f64], norm: f64) -> Result<Vec<f64>> {
    let grid = f.grid();
    let n = grid.n();
    let two_n = 2 * n;
    let mut u: Vec<Complex64> = padded_samples(f)
        .into_iter()
        .map(|v| Complex64::new(v.norm_sqr(), 0.0))
        .collect();
    let (fwd, _) = fft::plans(two_n);
    fwd.process(&mut u);
    let c: Vec<f64> = (0..n)
        .map(|r| fft::sign(r) * u[r].re / two_n as f64)
        .collect();
    let dk = grid.dk();
    let mut out: Vec<f64> = s_grid
        .iter()
        .map(|&s| {
            let mut terms = Vec::with_capacity(n);
            terms.push(c[0] * (grid.length() - 2.0 * s));
            for (r, cr) in c.iter().enumerate().skip(1) {
                let kr = r as f64 * dk;
                terms.push(-4.0 * cr * (kr * s).sin() / kr);
            }
            pairwise_sum(&terms).max(0.0).sqrt()
        })
        .collect();
    // Rounding can lift a tail by ~1e-16 ||f||; anything beyond that is a bug.
    for i in 1..out.len() {
        if out[i] > out[i - 1] {
            if out[i] - out[i - 1] > 1e-7 * norm.max(1e-300) {
                return Err(Error::Degenerate(format!(
                    "tail increased from {} to {} at s = {}",
                    out[i - 1],
                    out[i],
                    s_grid[i]
                )));
            }
            out[i] = out[i - 1];
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyRow {
    pub s: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub side: Side,
    pub rows: Vec<ConsistencyRow>,
    pub min_margin: f64,
    pub tol: f64,
    pub pass: bool,
    /// Input was not a converged soliton, so `pass` carries no claim.
    pub advisory: bool,
}

/// `bar(3s) <= bar(s)^3 + 3 min(1, c/sqrt(s)) (1 - bar(s)) bar(s)` with
/// `c = 1` on the `x` side and `c = 0.78` on the Fourier side, at every `s`
/// whose triple is also on the grid. `residual` is the solver residual of
/// the profiled field.
pub fn selfconsistency_check(p: &TailProfile, side: Side, residual: f64, tol: f64) -> Result<ConsistencyReport> {
    let c = match side {
        Side::X => 1.0,
        Side::Fourier => 0.78,
    };
    let bar = p.normalized(side);
    let pairs = p.triples();
    if pairs.is_empty() {
        return Err(Error::InvalidArgument("no s in the profile has 3s on the grid".into()));
    }
    let rows: Vec<ConsistencyRow> = pairs
        .into_iter()
        .map(|(i, j)| {
            let a = bar[i];
            let rhs = a.powi(3) + 3.0 * (c / p.s[i].sqrt()).min(1.0) * (1.0 - a) * a;
            ConsistencyRow {
                s: p.s[i],
                lhs: bar[j],
                rhs,
                margin: rhs - bar[j],
            }
        })
        .collect();
    let min_margin = rows.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min);
    Ok(ConsistencyReport {
        side,
        rows,
        min_margin,
        tol,
        pass: min_margin >= -tol,
        advisory: !(residual <= SOLITON_RESIDUAL),
    })
}

/// Smallest `C` with `a(3s) <= C (a(s)^3 + a(0)^2 a(s) / sqrt(s))` on the
/// grid, skipping points whose tail is under the floor.
pub fn fitted_constant(p: &TailProfile, side: Side) -> f64 {
    let a = p.values(side);
    let a0 = p.norm;
    p.triples()
        .into_iter()
        .filter(|&(i, _)| a[i] > TAIL_FLOOR * a0)
        .map(|(i, j)| a[j] / (a[i].powi(3) + a0 * a0 * a[i] / p.s[i].sqrt()))
        .fold(0.0, f64::max)
}

/// First grid `s` with `C (a(s)^2 + a(0)^2 / sqrt(s)) <= 3^{-1/4}`.
pub fn bootstrap_start(p: &TailProfile, side: Side, c: f64) -> Option<f64> {
    let a = p.values(side);
    let a0 = p.norm;
    let target = 3f64.powf(-0.25);
    p.s.iter()
        .zip(a)
        .find(|&(&s, &v)| s > 0.0 && c * (v * v + a0 * a0 / s.sqrt()) <= target)
        .map(|(&s, _)| s)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeRow {
    pub s: f64,
    pub tail: f64,
    pub envelope: f64,
    /// Compared: `s >= s0` and the tail is above the floor.
    pub checked: bool,
    /// `s >= 9 s0`, where the envelope improves on monotonicity.
    pub effective: bool,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeReport {
    pub side: Side,
    pub s0: f64,
    pub tail_at_s0: f64,
    pub rows: Vec<EnvelopeRow>,
    pub pass: bool,
}

impl EnvelopeReport {
    /// Envelope column aligned with the profile; below `s0` only the trivial
    /// bound `||f||` is known.
    pub fn column(&self, norm: f64) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| if r.s >= self.s0 { r.envelope } else { norm })
            .collect()
    }
}

/// `a(s0) 3^{1/4} 3^{-(log_3(s / (3 s0)))^2 / 4}`.
pub fn envelope(tail_at_s0: f64, s0: f64, s: f64) -> f64 {
    let l = (s / (3.0 * s0)).ln() / 3f64.ln();
    tail_at_s0 * 3f64.powf(0.25) * 3f64.powf(-l * l / 4.0)
}

/// Compares the profile against the decay envelope started at `s0`.
pub fn decay_envelope(p: &TailProfile, side: Side, s0: f64, tol: f64) -> Result<EnvelopeReport> {
    let i0 = p
        .index_of(s0)
        .ok_or_else(|| Error::InvalidArgument(format!("s0 = {s0} is not a point of the profile")))?;
    let a = p.values(side);
    let a_s0 = a[i0];
    let floor = TAIL_FLOOR * p.norm;
    let rows: Vec<EnvelopeRow> = p
        .s
        .iter()
        .zip(a)
        .map(|(&s, &v)| {
            let env = envelope(a_s0, s0, s);
            let checked = s >= s0 && v >= floor;
            EnvelopeRow {
                s,
                tail: v,
                envelope: env,
                checked,
                effective: s >= 9.0 * s0 * (1.0 - 1e-12),
                ok: !checked || v <= env * (1.0 + tol),
            }
        })
        .collect();
    Ok(EnvelopeReport {
        side,
        s0,
        tail_at_s0: a_s0,
        pass: rows.iter().all(|r| r.ok),
        rows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointwiseDecay {
    /// `|f(s)|^2 + |f(-s)|^2`
    pub value: f64,
    /// `2 ||f'|| alpha(s)`
    pub bound: f64,
    pub ok: bool,
    /// `s` or `-s` fell between samples and was linearly interpolated.
    pub interpolated: bool,
}

/// Pointwise decay from the tail: `|f(s)|^2 + |f(-s)|^2 <= 2 ||f'|| alpha(s)`.
pub fn pointwise_decay(f: &Field, s: f64) -> Result<PointwiseDecay> {
    let grid = f.grid();
    let half = grid.length() / 2.0;
    if !(s >= 0.0 && s <= half) {
        return Err(Error::InvalidArgument(format!("s = {s} outside [0, {half}]")));
    }
    let pos = f.to_position();
    let sample = |x: f64| -> (Complex64, bool) {
        // periodic lattice position of x
        let u = (x + half) / grid.dx();
        let j = u.floor();
        let frac = u - j;
        let n = grid.n() as i64;
        let idx = |k: i64| k.rem_euclid(n) as usize;
        let j = j as i64;
        if frac.abs() < 1e-9 {
            (pos.values()[idx(j)], false)
        } else if (1.0 - frac).abs() < 1e-9 {
            (pos.values()[idx(j + 1)], false)
        } else {
            let (a, b) = (pos.values()[idx(j)], pos.values()[idx(j + 1)]);
            (a * (1.0 - frac) + b * frac, true)
        }
    };
    let (fp, i1) = sample(s);
    let (fm, i2) = sample(-s);
    let value = fp.norm_sqr() + fm.norm_sqr();
    let alpha = grid_sum_tails(&pos, &[s])[0];
    let bound = 2.0 * pos.derivative().norm() * alpha;
    Ok(PointwiseDecay {
        value,
        bound,
        ok: value <= bound * (1.0 + 1e-6),
        interpolated: i1 || i2,
    })
}
