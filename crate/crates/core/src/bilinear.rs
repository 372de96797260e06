//! Bilinear Strichartz norms, the duality between the `|t|^{-1}`-weighted
//! norm and the flat norm of the inverse transforms, quasi-locality of the
//! quartic functional and the multi-linear bounds that follow.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bounds::Constants;
use crate::error::{Error, Result};
use crate::functionals::{eval_q4, space_time_quartic, TimeWeight, Window};
use crate::grid::{Field, Grid, Space};
use crate::quadrature::QuadratureRule;

/// Samples below this fraction of the peak are treated as zero when
/// reading off a support.
pub const SUPPORT_THRESHOLD: f64 = 1e-14;

/// Closed intervals in `x` or `k`, sorted and disjoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportSpec {
    pub space: Space,
    pub intervals: Vec<(f64, f64)>,
}

impl SupportSpec {
    pub fn new(space: Space, mut intervals: Vec<(f64, f64)>) -> Result<Self> {
        if intervals.iter().any(|(a, b)| !(a <= b)) {
            return Err(Error::InvalidArgument("support interval with a > b".into()));
        }
        intervals.sort_by(|a, b| a.0.total_cmp(&b.0));
        if intervals.windows(2).any(|w| w[1].0 <= w[0].1) {
            return Err(Error::InvalidArgument("support intervals overlap".into()));
        }
        Ok(Self { space, intervals })
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Smallest gap between the two unions; zero if they touch, infinite
    /// if either is empty.
    pub fn dist(&self, other: &SupportSpec) -> f64 {
        let mut best = f64::INFINITY;
        for &(a0, a1) in &self.intervals {
            for &(b0, b1) in &other.intervals {
                let gap = (b0 - a1).max(a0 - b1).max(0.0);
                best = best.min(gap);
            }
        }
        best
    }

    /// `min |y|` over the support.
    pub fn inner_radius(&self) -> f64 {
        self.intervals
            .iter()
            .map(|&(a, b)| if a <= 0.0 && b >= 0.0 { 0.0 } else { a.abs().min(b.abs()) })
            .fold(f64::INFINITY, f64::min)
    }

    /// `max |y|` over the support.
    pub fn outer_radius(&self) -> f64 {
        self.intervals
            .iter()
            .map(|&(a, b)| a.abs().max(b.abs()))
            .fold(0.0, f64::max)
    }
}

/// Runs of samples above `SUPPORT_THRESHOLD * max` in `space`, each run
/// reported as `[first, last]` lattice point.
pub fn numerical_support(f: &Field, space: Space) -> SupportSpec {
    let g = match space {
        Space::Position => f.to_position(),
        Space::Frequency => f.to_frequency(),
    };
    let peak = g.max_abs();
    let lattice = f.grid().lattice(space);
    let mut intervals = Vec::new();
    if peak > 0.0 {
        let cut = SUPPORT_THRESHOLD * peak;
        let mut start: Option<usize> = None;
        for (j, v) in g.values().iter().enumerate() {
            let on = v.norm() > cut;
            match (on, start) {
                (true, None) => start = Some(j),
                (false, Some(s)) => {
                    intervals.push((lattice[s], lattice[j - 1]));
                    start = None;
                }
                _ => {}
            }
        }
        if let Some(s) = start {
            intervals.push((lattice[s], lattice[lattice.len() - 1]));
        }
    }
    SupportSpec { space, intervals }
}

/// Smooth bump supported in `[a, b]` of `space`: a Gaussian centred in the
/// interval with standard deviation `(b - a) / (2 sharpness)`, set to zero
/// outside the interval, times `e^{i phase_slope y}`, at unit mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub space: Space,
    pub start: f64,
    pub end: f64,
    pub sharpness: f64,
    pub phase_slope: f64,
}

impl Bump {
    /// At the default sharpness the profile is `e^{-40.5}` at the ends and
    /// drops below the support threshold well inside the interval.
    pub const DEFAULT_SHARPNESS: f64 = 9.0;

    pub fn new(space: Space, start: f64, end: f64) -> Self {
        Self {
            space,
            start,
            end,
            sharpness: Self::DEFAULT_SHARPNESS,
            phase_slope: 0.0,
        }
    }

    pub fn with_sharpness(mut self, sharpness: f64) -> Self {
        self.sharpness = sharpness;
        self
    }

    pub fn with_phase_slope(mut self, slope: f64) -> Self {
        self.phase_slope = slope;
        self
    }

    /// The bump on `grid`, returned in position space.
    pub fn build(&self, grid: Grid) -> Result<Field> {
        if !(self.start < self.end) || !(self.sharpness > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "bump needs start < end and sharpness > 0, got [{}, {}] / {}",
                self.start, self.end, self.sharpness
            )));
        }
        let c = 0.5 * (self.start + self.end);
        let sd = (self.end - self.start) / (2.0 * self.sharpness);
        let f = Field::from_fn(grid, self.space, |y| {
            if y < self.start || y > self.end {
                Complex64::new(0.0, 0.0)
            } else {
                let u = (y - c) / sd;
                Complex64::from_polar((-0.5 * u * u).exp(), self.phase_slope * y)
            }
        });
        let n = f.norm();
        if n == 0.0 {
            return Err(Error::InvalidArgument(format!(
                "bump [{}, {}] misses every lattice point of {grid}",
                self.start, self.end
            )));
        }
        Ok(f.scale(Complex64::new(1.0 / n, 0.0)).to_position())
    }
}

/// Time rule for a window and weight, `panels` composite copies of a
/// `nodes`-point Gauss–Legendre rule.
pub fn time_rule(window: Window, weight: TimeWeight, nodes: usize, panels: usize) -> Result<QuadratureRule> {
    window.composite_rule(&QuadratureRule::gauss_legendre(nodes)?, weight, panels)
}

/// `(\int \int |T_t f1 T_t f2|^2 dx dt)^{1/2}` with the time weight already
/// in `rule`.
pub fn bilinear_norm(f1: &Field, f2: &Field, rule: &QuadratureRule) -> Result<f64> {
    let v = space_time_quartic([f1, f1, f2, f2], rule)?;
    Ok(v.re.max(0.0).sqrt())
}

/// The rule with every node `t` replaced by `-t`.
pub fn reflected_rule(rule: &QuadratureRule) -> Result<QuadratureRule> {
    QuadratureRule::custom(rule.nodes().iter().map(|t| -t).collect(), rule.weights().to_vec())
}

/// Norm over `[a, b]` and `[-b, -a]` together, both halves evaluated.
pub fn bilinear_norm_two_sided(f1: &Field, f2: &Field, rule: &QuadratureRule) -> Result<f64> {
    let pos = space_time_quartic([f1, f1, f2, f2], rule)?.re;
    let neg = space_time_quartic([f1, f1, f2, f2], &reflected_rule(rule)?)?.re;
    Ok((pos + neg).max(0.0).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualityOutcome {
    pub lhs: f64,
    pub rhs: f64,
    pub rel_err: f64,
    /// Neither side's fields spread past `L/4` over their windows.
    pub resolved: bool,
}

/// Windowed duality between the `|t|^{-1}` norm on `[a, b]` and `sqrt(2)`
/// times the flat norm of the inverse transforms. Under `t = 1/(4 tau)` the
/// window maps to `tau` in `[-1/(4a), -1/(4b)]`; for real even fields the
/// sign of `tau` makes no difference.
pub fn duality_check(f1: &Field, f2: &Field, window: Window, nodes: usize, panels: usize) -> Result<DualityOutcome> {
    if !(window.start > 0.0) {
        return Err(Error::InvalidArgument("duality needs 0 < a < b".into()));
    }
    let lhs_rule = time_rule(window, TimeWeight::Inverse, nodes, panels)?;
    let lhs = bilinear_norm(f1, f2, &lhs_rule)?;

    let c1 = f1.dual_inverse()?;
    let c2 = f2.dual_inverse()?;
    let dual_window = Window::new(-1.0 / (4.0 * window.start), -1.0 / (4.0 * window.end))?;
    let rhs_rule = time_rule(dual_window, TimeWeight::Unit, nodes, panels)?;
    let rhs = std::f64::consts::SQRT_2 * bilinear_norm(&c1, &c2, &rhs_rule)?;

    let rel_err = if rhs == 0.0 {
        if lhs == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (lhs - rhs).abs() / rhs
    };
    let wraps = |f: &Field, times: [f64; 2]| -> Result<bool> {
        if f.norm() == 0.0 {
            return Ok(false);
        }
        Ok(crate::propagator::extent_guard(f, &times)?.1)
    };
    let resolved = !(wraps(f1, [window.start, window.end])?
        || wraps(f2, [window.start, window.end])?
        || wraps(&c1, [dual_window.start, dual_window.end])?
        || wraps(&c2, [dual_window.start, dual_window.end])?);
    Ok(DualityOutcome {
        lhs,
        rhs,
        rel_err,
        resolved,
    })
}

/// `|Q(f1, f2, f3, f4)| / prod ||f_j||` without any geometry check.
pub fn normalized_quartic(fields: [&Field; 4], rule: &QuadratureRule) -> Result<f64> {
    let norms: f64 = fields.iter().map(|f| f.norm()).product();
    if norms == 0.0 {
        return Ok(0.0);
    }
    Ok(eval_q4(fields[0], fields[1], fields[2], fields[3], rule)?.norm() / norms)
}

/// Normalized `|Q|` for a quadruple whose field `which` lives in
/// `|y| > 3s` and the others in `|y| <= s` (in `x`, or in `k` for the
/// frequency version). The numerical supports must clear both radii by two
/// lattice spacings.
pub fn quasilocality_check(
    fields: [&Field; 4],
    s: f64,
    which: usize,
    space: Space,
    rule: &QuadratureRule,
) -> Result<f64> {
    if which >= 4 || !(s > 0.0) {
        return Err(Error::InvalidArgument(format!("need which < 4 and s > 0, got {which}, {s}")));
    }
    let h = fields[0].grid().spacing(space);
    for (i, f) in fields.iter().enumerate() {
        let sup = numerical_support(f, space);
        if sup.is_empty() {
            continue;
        }
        let ok = if i == which {
            sup.inner_radius() >= 3.0 * s + 2.0 * h
        } else {
            sup.outer_radius() <= s - 2.0 * h
        };
        if !ok {
            return Err(Error::InvalidArgument(format!(
                "field {i} has {space} support {:?}, outside the geometry for s = {s}",
                sup.intervals
            )));
        }
    }
    normalized_quartic(fields, rule)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MultilinearOutcome {
    pub value: f64,
    /// `min(P1_upper, prefactor / sqrt(dist)) prod ||f_j||`.
    pub bound: f64,
    /// `P1_upper min(1, c / sqrt(dist)) prod ||f_j||` with `c = 1.33` in
    /// `x` and `1.1` in `k`.
    pub refined_bound: f64,
    pub dist: f64,
    pub ok: bool,
}

/// `|Q(f1..f4)|` over `t` in `[0, 1]` against the multi-linear bounds for
/// the separated pair `(i, j)` in `space`.
pub fn multilinear_bound_check(
    fields: [&Field; 4],
    pair: (usize, usize),
    space: Space,
    rule: &QuadratureRule,
) -> Result<MultilinearOutcome> {
    let (i, j) = pair;
    if i >= 4 || j >= 4 || i == j {
        return Err(Error::InvalidArgument(format!("invalid pair ({i}, {j})")));
    }
    let c = Constants::get();
    let norms: f64 = fields.iter().map(|f| f.norm()).product();
    let value = eval_q4(fields[0], fields[1], fields[2], fields[3], rule)?.norm();
    let dist = numerical_support(fields[i], space).dist(&numerical_support(fields[j], space));
    let (pref, refined) = match space {
        Space::Position => (c.multilinear_x, 1.33),
        Space::Frequency => (c.multilinear_k, 1.1),
    };
    let (bound, refined_bound) = if dist > 0.0 {
        (
            c.p1_upper.min(pref / dist.sqrt()) * norms,
            c.p1_upper * (refined / dist.sqrt()).min(1.0) * norms,
        )
    } else {
        (c.p1_upper * norms, c.p1_upper * norms)
    };
    Ok(MultilinearOutcome {
        value,
        bound,
        refined_bound,
        dist,
        ok: value <= bound + 1e-8,
    })
}
