//! Verification suites. Each runs a family of checks on fixed grids chosen
//! so the fields stay resolved and away from the box edges, and returns a
//! [`Report`].

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::bilinear::{
    bilinear_norm, bilinear_norm_two_sided, duality_check, multilinear_bound_check, normalized_quartic,
    numerical_support, quasilocality_check, time_rule, Bump,
};
use crate::bounds::{gaussian_lower_bound, optimize_delta, p1_estimate_random, strichartz_check, strichartz_rule, Constants};
use crate::error::{Error, Result};
use crate::functionals::{eval_q3, eval_q4, eval_r, TimeWeight, Window};
use crate::grid::{Field, Grid, Space};
use crate::propagator::{gaussian_exact, ChirpedGaussian};
use crate::quadrature::QuadratureRule;
use crate::report::Report;
use crate::sampling::{chirped_gaussian_q, GaussianMixture};
use crate::solver::{residual, solve_from, solve_ground_state, SolitonResult, SolverConfig};
use crate::tails::{
    bootstrap_start, decay_envelope, default_s_grid, fitted_constant, pointwise_decay, selfconsistency_check,
    tail_profile, Side, TailProfile, CONSISTENCY_TOL,
};

/// Lower end of the two-sided window on `P1` from the optimal chirp.
pub const P1_LOWER: f64 = 0.41930;
/// Allowed slack on the envelope comparison.
pub const ENVELOPE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Bounds,
    Bilinear,
    Quasilocal,
    Duality,
    Strichartz,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 6] = ["bounds", "bilinear", "quasilocal", "duality", "strichartz", "all"];
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "bounds" => Suite::Bounds,
            "bilinear" => Suite::Bilinear,
            "quasilocal" => Suite::Quasilocal,
            "duality" => Suite::Duality,
            "strichartz" => Suite::Strichartz,
            "all" => Suite::All,
            other => {
                return Err(Error::InvalidArgument(format!(
                    "unknown suite {other:?}, expected one of {}",
                    Suite::NAMES.join(", ")
                )))
            }
        })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let i = *self as usize;
        f.write_str(Suite::NAMES[i])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SuiteSettings {
    /// Set by the caller; run configurations carry the seed at top level.
    #[serde(skip, default = "default_seed")]
    pub seed: u64,
    /// Random fields per sampled check.
    pub samples: usize,
    pub adjoint_pairs: usize,
    /// Gauss–Legendre nodes for functionals on `[0, 1]`.
    pub nodes: usize,
    /// Time extent for the random Strichartz checks.
    pub strichartz_extent: f64,
    /// Time extent for the Gaussian sharpness probe.
    pub sharp_extent: f64,
}

fn default_seed() -> u64 {
    7
}

impl Default for SuiteSettings {
    fn default() -> Self {
        Self {
            seed: default_seed(),
            samples: 200,
            adjoint_pairs: 20,
            nodes: 32,
            strichartz_extent: 20.0,
            sharp_extent: 64.0,
        }
    }
}

pub fn run(suite: Suite, s: &SuiteSettings) -> Result<Report> {
    match suite {
        Suite::Bounds => bounds_suite(s),
        Suite::Bilinear => bilinear_suite(s),
        Suite::Quasilocal => quasilocal_suite(s),
        Suite::Duality => duality_suite(s),
        Suite::Strichartz => strichartz_suite(s),
        Suite::All => {
            let mut r = Report::new();
            for one in [Suite::Bounds, Suite::Strichartz, Suite::Bilinear, Suite::Duality, Suite::Quasilocal] {
                r.extend(run(one, s)?);
            }
            Ok(r)
        }
    }
}

fn unit_gaussian(sigma0: Complex64, grid: Grid) -> Result<Field> {
    gaussian_exact(&ChirpedGaussian::with_mass(sigma0, 1.0)?, 0.0, grid)
}

/// Grid for functionals of the random mixtures on `t` in `[0, 1]`.
pub fn sample_grid() -> Grid {
    Grid::new(256, 40.0).expect("valid grid")
}

/// Quartic oracle, the lower-bound optimization and the sampled upper
/// bounds on `Q`, `R` and the adjoint identity.
pub fn bounds_suite(s: &SuiteSettings) -> Result<Report> {
    let c = Constants::get();
    let mut r = Report::new();
    let rule = QuadratureRule::gauss_legendre(s.nodes)?;

    r.extend(gaussian_oracle_check(s.nodes)?);

    let (delta, value) = optimize_delta();
    r.close("delta-star", json!({"expected": 3.32}), delta, 3.32, 0.05);
    r.lower("lower-bound-max", json!({"delta": delta}), value, c.p1_lower_factor, 0.0);
    let neighbours = gaussian_lower_bound(delta - 0.01)?.max(gaussian_lower_bound(delta + 0.01)?);
    r.lower("lower-bound-local-max", json!({"step": 0.01}), value, neighbours, 0.0);
    let scan = (0..=400)
        .map(|i| gaussian_lower_bound(10f64.powf(-3.0 + 5.0 * i as f64 / 400.0)))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    r.upper("lower-below-upper", json!({"delta_range": [1e-3, 1e2]}), scan, c.p1_upper, 0.0);

    let grid = sample_grid();
    let est = p1_estimate_random(s.samples, s.seed, grid, &rule)?;
    let params = json!({"samples": s.samples, "seed": s.seed, "grid": grid, "nodes": s.nodes});
    r.upper("q-upper", params.clone(), est.max_q, c.p1_upper, 1e-6);
    r.lower("p1-estimate", json!({"argmax": est.argmax.label}), est.max_q, P1_LOWER, 1e-4);
    r.lower("p1-estimate-gaussian-floor", params.clone(), est.max_q, est.gaussian_floor, 1e-9);

    let fields = sampled_fields(s.samples, s.seed, grid)?;
    let rs: Vec<f64> = fields
        .par_iter()
        .map(|f| Ok(eval_r(f, f, f, f, &rule)?.norm()))
        .collect::<Result<_>>()?;
    r.upper("r-bound", params.clone(), rs.iter().copied().fold(0.0, f64::max), c.r_bound, 1e-6);

    r.upper(
        "adjoint",
        json!({"pairs": s.adjoint_pairs, "seed": s.seed}),
        adjoint_defect(s.adjoint_pairs, s.seed, grid, &rule)?,
        1e-10,
        0.0,
    );
    Ok(r)
}

/// The normalized `sigma0 = 1` Gaussian on `n = 1024` against the closed
/// form of its quartic functional.
pub fn gaussian_oracle_check(nodes: usize) -> Result<Report> {
    let grid = Grid::new(1024, 40.0)?;
    let rule = QuadratureRule::gauss_legendre(nodes)?;
    let f = unit_gaussian(Complex64::new(1.0, 0.0), grid)?;
    let q = eval_q4(&f, &f, &f, &f, &rule)?.re;
    let exact = chirped_gaussian_q(Complex64::new(1.0, 0.0));
    let mut r = Report::new();
    r.close(
        "q4-gaussian-oracle",
        json!({"grid": grid, "nodes": nodes, "rel_tol": 1e-6}),
        q,
        exact,
        1e-6 * exact,
    );
    Ok(r)
}

/// Unit-mass mandatory set followed by `count` random mixtures.
pub fn sampled_fields(count: usize, seed: u64, grid: Grid) -> Result<Vec<Field>> {
    let mut draws = GaussianMixture::mandatory_set();
    draws.extend(GaussianMixture::draw_many(count, seed, grid, 1.0)?);
    draws.iter().map(|d| d.sample(grid)).collect()
}

/// `max |<g, Q(f,f,f)> - Q(g,f,f,f)| / (||g|| ||f||^3)` over random pairs.
pub fn adjoint_defect(pairs: usize, seed: u64, grid: Grid, rule: &QuadratureRule) -> Result<f64> {
    let draws = GaussianMixture::draw_many(2 * pairs, seed ^ 0xad10_1017, grid, 1.0)?;
    let defects: Vec<f64> = (0..pairs)
        .into_par_iter()
        .map(|i| {
            let g = draws[2 * i].sample(grid)?;
            let f = draws[2 * i + 1].sample(grid)?.scale(Complex64::new(0.7, 0.4));
            let lhs = g.inner(&eval_q3(&f, &f, &f, rule)?)?;
            let rhs = eval_q4(&g, &f, &f, &f, rule)?;
            Ok((lhs - rhs).norm() / (g.norm() * f.norm().powi(3)))
        })
        .collect::<Result<_>>()?;
    Ok(defects.into_iter().fold(0.0, f64::max))
}

/// Grid for the Gaussian sharpness probe: the packet reaches width 256 at
/// `|t| = 64`, a fifth of the box.
pub fn sharp_grid() -> Grid {
    Grid::new(8192, 1280.0).expect("valid grid")
}

/// Grid for the random Strichartz checks up to `|t| = 20`.
pub fn strichartz_grid() -> Grid {
    Grid::new(4096, 1024.0).expect("valid grid")
}

pub fn strichartz_suite(s: &SuiteSettings) -> Result<Report> {
    let c = Constants::get();
    let target = c.strichartz_sextic();
    let mut r = Report::new();

    let grid = sharp_grid();
    let rule = strichartz_rule(s.sharp_extent, 16, 8)?;
    let f = unit_gaussian(Complex64::new(1.0, 0.0), grid)?;
    let out = strichartz_check(&f, s.sharp_extent, &rule)?;
    let params = json!({"grid": grid, "t_extent": s.sharp_extent, "resolved": out.resolved});
    r.close("strichartz-gaussian", params.clone(), out.lhs, target, 1e-3);
    // For the unit Gaussian the truncated integral is 12^{-1/2} (2/pi)
    // atan(4T); the missing part must fit the dispersive budget.
    let deficit = target * (1.0 - 2.0 / PI * (4.0 * s.sharp_extent).atan());
    r.upper("strichartz-truncation-budget", params, deficit, out.tail_bound, 0.0);
    r.upper("strichartz-gaussian-resolved", json!({}), if out.resolved { 0.0 } else { 1.0 }, 0.0, 0.0);

    let grid = strichartz_grid();
    let rule = strichartz_rule(s.strichartz_extent, 16, 8)?;
    let draws = GaussianMixture::draw_many(s.samples, s.seed, grid, s.strichartz_extent)?;
    let outs: Vec<_> = draws
        .par_iter()
        .map(|d| strichartz_check(&d.sample(grid)?, s.strichartz_extent, &rule))
        .collect::<Result<_>>()?;
    let worst = outs.iter().map(|o| o.lhs - o.rhs).fold(f64::NEG_INFINITY, f64::max);
    r.upper(
        "strichartz-random",
        json!({"samples": s.samples, "seed": s.seed, "grid": grid, "t_extent": s.strichartz_extent,
               "unresolved": outs.iter().filter(|o| !o.resolved).count()}),
        worst,
        0.0,
        1e-6,
    );
    let zero = strichartz_check(&Field::zeros(grid, Space::Position), s.strichartz_extent, &rule)?;
    r.close("strichartz-zero", json!({}), zero.lhs, 0.0, 0.0);
    Ok(r)
}

/// Grid for the frequency-separated families over `|t| <= 20`.
pub fn fourier_bilinear_grid() -> Grid {
    Grid::new(2048, 512.0).expect("valid grid")
}

/// Grid for the position-separated families: wide enough that the spread
/// packets recirculate only weakly by `|t| = 20`, fine enough to resolve
/// the bumps' spectra.
pub fn position_bilinear_grid() -> Grid {
    Grid::new(16384, 512.0).expect("valid grid")
}

/// Sharpness of the position-space bumps in the bilinear families; their
/// cut at the interval ends is `e^{-18}`.
pub const POSITION_BUMP_SHARPNESS: f64 = 6.0;

pub const SEPARATIONS: [f64; 4] = [1.0, 2.0, 4.0, 8.0];

/// Unit bumps on `[d/2, d/2 + 1]` and `[-d/2 - 1, -d/2]` in `space`.
pub fn separated_pair(space: Space, d: f64, sharpness: f64, grid: Grid) -> Result<(Field, Field)> {
    let a = Bump::new(space, d / 2.0, d / 2.0 + 1.0).with_sharpness(sharpness).build(grid)?;
    let b = Bump::new(space, -d / 2.0 - 1.0, -d / 2.0).with_sharpness(sharpness).build(grid)?;
    Ok((a, b))
}

pub fn bilinear_suite(s: &SuiteSettings) -> Result<Report> {
    let c = Constants::get();
    let mut r = Report::new();

    let grid = fourier_bilinear_grid();
    let rule = time_rule(Window::new(-20.0, 20.0)?, TimeWeight::Unit, 16, 40)?;
    let mut norms = Vec::new();
    for d in SEPARATIONS {
        let (f1, f2) = separated_pair(Space::Frequency, d, Bump::DEFAULT_SHARPNESS, grid)?;
        let dist = numerical_support(&f1, Space::Frequency).dist(&numerical_support(&f2, Space::Frequency));
        let v = bilinear_norm(&f1, &f2, &rule)?;
        let bound = f1.norm() * f2.norm() / (2.0 * dist).sqrt();
        r.upper(
            &format!("bilinear-fourier-d{d}"),
            json!({"d": d, "dist": dist, "window": [-20.0, 20.0], "grid": grid}),
            v,
            bound,
            1e-6,
        );
        norms.push(v);
    }
    r.upper("bilinear-fourier-monotone", json!({"d": SEPARATIONS}), max_ratio(&norms), 1.05, 0.0);

    let grid = position_bilinear_grid();
    let rule = time_rule(Window::new(1e-3, 20.0)?, TimeWeight::Inverse, 16, 24)?;
    let mut norms = Vec::new();
    for d in SEPARATIONS {
        let (f1, f2) = separated_pair(Space::Position, d, POSITION_BUMP_SHARPNESS, grid)?;
        let dist = numerical_support(&f1, Space::Position).dist(&numerical_support(&f2, Space::Position));
        let v = bilinear_norm_two_sided(&f1, &f2, &rule)?;
        let bound = f1.norm() * f2.norm() / dist.sqrt();
        r.upper(
            &format!("bilinear-x-d{d}"),
            json!({"d": d, "dist": dist, "windows": [[-20.0, -1e-3], [1e-3, 20.0]], "grid": grid}),
            v,
            bound,
            1e-6,
        );
        norms.push(v);
    }
    r.upper("bilinear-x-monotone", json!({"d": SEPARATIONS}), max_ratio(&norms), 1.05, 0.0);

    let grid = sample_grid();
    let unit = QuadratureRule::gauss_legendre(s.nodes)?;
    let g = unit_gaussian(Complex64::new(1.0, 0.0), grid)?;
    let q = eval_q4(&g, &g, &g, &g, &unit)?.re;
    let v = bilinear_norm(&g, &g, &Window::unit().rule(&unit, TimeWeight::Unit)?)?;
    r.close("bilinear-diagonal", json!({}), v, q.sqrt(), 1e-10);

    // four-field bound with one separated pair
    let grid = Grid::new(2048, 40.0)?;
    let (f1, f2) = separated_pair(Space::Position, 4.0, Bump::DEFAULT_SHARPNESS, grid)?;
    // partners balance the centres, c1 - c2 + c3 - c4 = 0, otherwise the
    // quartic is exponentially small and the check says nothing
    let f3 = Bump::new(Space::Position, -3.0, -2.0).with_phase_slope(1.0).build(grid)?;
    let f4 = Bump::new(Space::Position, 1.5, 3.5).with_sharpness(6.0).build(grid)?;
    let m = multilinear_bound_check([&f1, &f2, &f3, &f4], (0, 1), Space::Position, &unit)?;
    r.upper("multilinear-x-dist4", json!({"dist": m.dist, "refined": m.refined_bound}), m.value, m.bound, 1e-8);
    r.upper("multilinear-x-dist4-refined", json!({"dist": m.dist}), m.value, m.refined_bound, 1e-8);

    let grid = Grid::new(512, 160.0)?;
    let (f1, f2) = separated_pair(Space::Frequency, 2.0, Bump::DEFAULT_SHARPNESS, grid)?;
    let f3 = Bump::new(Space::Frequency, -1.0, 0.0).build(grid)?;
    let f4 = Bump::new(Space::Frequency, 2.0, 3.0).with_sharpness(6.0).build(grid)?;
    let m = multilinear_bound_check([&f1, &f2, &f3, &f4], (0, 1), Space::Frequency, &unit)?;
    r.upper("multilinear-k-dist2", json!({"dist": m.dist, "refined": m.refined_bound}), m.value, m.bound, 1e-8);
    r.upper("multilinear-k-dist2-refined", json!({"dist": m.dist}), m.value, m.refined_bound, 1e-8);

    let grid = sample_grid();
    let g1 = unit_gaussian(Complex64::new(1.0, 0.0), grid)?;
    let g2 = unit_gaussian(Complex64::new(0.8, -1.5), grid)?;
    let m = multilinear_bound_check([&g1, &g2, &g1, &g2], (0, 1), Space::Position, &unit)?;
    r.close("multilinear-overlap-bound", json!({"dist": m.dist}), m.bound, c.p1_upper, 1e-12);
    r.upper("multilinear-overlap", json!({}), m.value, m.bound, 1e-8);
    Ok(r)
}

/// Largest ratio of consecutive entries.
fn max_ratio(v: &[f64]) -> f64 {
    v.windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max)
}

/// Gaussian pairs for the duality check; the last one is chirped.
pub fn duality_pairs() -> [(Complex64, Complex64); 3] {
    [
        (Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0)),
        (Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)),
        (Complex64::new(0.8, -1.0), Complex64::new(1.5, 0.7)),
    ]
}

pub fn duality_suite(_s: &SuiteSettings) -> Result<Report> {
    let grid = Grid::new(1024, 40.0)?;
    let window = Window::new(0.1, 1.0)?;
    let mut r = Report::new();
    for (a, b) in duality_pairs() {
        let f1 = unit_gaussian(a, grid)?;
        let f2 = unit_gaussian(b, grid)?;
        let o = duality_check(&f1, &f2, window, 16, 8)?;
        r.upper(
            "duality",
            json!({"sigma1": [a.re, a.im], "sigma2": [b.re, b.im], "window": [0.1, 1.0],
                   "lhs": o.lhs, "rhs": o.rhs, "resolved": o.resolved}),
            o.rel_err,
            1e-5,
            0.0,
        );
    }
    let f1 = unit_gaussian(Complex64::new(1.0, 0.0), grid)?;
    let o = duality_check(&f1, &Field::zeros(grid, Space::Position), window, 16, 8)?;
    r.close("duality-zero", json!({"rhs": o.rhs}), o.lhs, 0.0, 0.0);
    Ok(r)
}

/// Four fields with field 0 beyond `3s` and the rest inside `s`, `s = 1`.
pub fn quasilocal_fields(space: Space, grid: Grid) -> Result<[Field; 4]> {
    let (a, b) = match space {
        Space::Position => (3.5, 4.5),
        Space::Frequency => (3.2, 4.0),
    };
    Ok([
        Bump::new(space, a, b).build(grid)?,
        Bump::new(space, -1.0, 1.0).build(grid)?,
        Bump::new(space, -0.8, 0.6).with_phase_slope(1.0).build(grid)?,
        Bump::new(space, -0.5, 1.0).build(grid)?,
    ])
}

/// Field 0 on `[2.5, 3.5]`, inside `3s`, with partners placed so that
/// `y2 - y3 + y4` reaches it.
pub fn negative_control_fields(space: Space, grid: Grid) -> Result<[Field; 4]> {
    let near = Bump::new(space, 1.0, 2.0).with_sharpness(3.0).build(grid)?;
    Ok([
        Bump::new(space, 2.5, 3.5).with_sharpness(3.0).build(grid)?,
        near.clone(),
        Bump::new(space, -0.5, 0.5).with_sharpness(3.0).build(grid)?,
        near,
    ])
}

pub fn quasilocal_suite(s: &SuiteSettings) -> Result<Report> {
    let rule = QuadratureRule::gauss_legendre(s.nodes)?;
    let mut r = Report::new();
    for (space, grid, label) in [
        (Space::Position, Grid::new(2048, 40.0)?, "x"),
        (Space::Frequency, Grid::new(512, 160.0)?, "k"),
    ] {
        let [a, b, c, d] = quasilocal_fields(space, grid)?;
        let v = quasilocality_check([&a, &b, &c, &d], 1.0, 0, space, &rule)?;
        r.upper(&format!("quasilocal-{label}"), json!({"s": 1.0, "which": 0, "grid": grid}), v, 1e-8, 0.0);
        let v = quasilocality_check([&b, &c, &a, &d], 1.0, 2, space, &rule)?;
        r.upper(&format!("quasilocal-{label}-third"), json!({"s": 1.0, "which": 2, "grid": grid}), v, 1e-8, 0.0);
        let [a, b, c, d] = negative_control_fields(space, grid)?;
        let v = normalized_quartic([&a, &b, &c, &d], &rule)?;
        r.lower(&format!("quasilocal-{label}-negative-control"), json!({"grid": grid}), v, 1e-3, 0.0);
    }
    Ok(r)
}

/// Default grid and rule for the ground state.
pub fn soliton_grid() -> Grid {
    Grid::new(1024, 80.0).expect("valid grid")
}

pub const SOLITON_NODES: usize = 64;

pub const MASSES: [f64; 4] = [0.5, 1.0, 2.0, 4.0];

/// Ground state at `lambda = 1` plus the scaling and fixed-point checks.
/// Returns the `lambda = 1` soliton for the tail suite.
pub fn ground_state_suite(grid: Grid, nodes: usize, seed: u64) -> Result<(Report, SolitonResult)> {
    let c = Constants::get();
    let rule = QuadratureRule::gauss_legendre(nodes)?;
    let mut r = Report::new();
    let solve = |lambda: f64| solve_ground_state(&SolverConfig { lambda, ..SolverConfig::default() }, &rule, grid);
    let base = solve(1.0)?;
    let params = json!({"grid": grid, "nodes": nodes, "iterations": base.iterations});
    r.upper("soliton-residual", params.clone(), base.residual, 1e-8, 0.0);
    r.lower("soliton-omega-lower", params.clone(), base.omega, P1_LOWER, 1e-3);
    r.upper("soliton-omega-upper", params.clone(), base.omega, c.p1_upper, 1e-3);
    r.close("soliton-omega-is-q-over-lambda", json!({}), base.omega, base.q_value / base.lambda, 1e-10 * base.omega);

    for lambda in MASSES {
        if lambda == 1.0 {
            continue;
        }
        let s = solve(lambda)?;
        let rel = (s.omega - lambda * base.omega).abs() / (lambda * base.omega);
        r.upper("soliton-scaling", json!({"lambda": lambda, "omega": s.omega}), rel, 1e-6, 0.0);
    }

    let again = solve_from(&SolverConfig::default(), &rule, base.field.clone())?;
    r.upper("soliton-idempotent-iterations", json!({}), again.iterations as f64, 2.0, 0.0);
    r.close("soliton-idempotent-omega", json!({}), again.omega, base.omega, 1e-10);

    let draws = GaussianMixture::draw_many(10, seed, grid, 1.0)?;
    let g3 = eval_q3(&base.field, &base.field, &base.field, &rule)?;
    let defect = base.field.scale(Complex64::new(base.omega, 0.0)).sub(&g3)?;
    let worst = draws
        .iter()
        .map(|d| Ok(d.sample(grid)?.inner(&defect)?.norm()))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    r.upper("soliton-weak-form", json!({"tests": 10}), worst, 1e-8, 0.0);
    let rr = residual(&base.field, base.omega, &rule)?;
    r.close("soliton-residual-recomputed", json!({}), rr, base.residual, 1e-12);
    Ok((r, base))
}

/// Everything the tail analysis produces for one soliton.
#[derive(Debug, Clone)]
pub struct TailAnalysis {
    pub profile: TailProfile,
    pub report: Report,
    pub envelope_column: Vec<f64>,
    /// The input is too far from a soliton for the checks to bind; the
    /// entries are informational.
    pub advisory: bool,
}

impl TailAnalysis {
    pub fn pass(&self) -> bool {
        self.advisory || self.report.pass()
    }
}

/// Self-consistency on both sides, fitted constants, the bootstrap start
/// and the decay envelope for a profiled field with solver residual
/// `residual`.
pub fn tails_analysis(f: &Field, residual: f64) -> Result<TailAnalysis> {
    let profile = tail_profile(f, &default_s_grid(f.grid()))?;
    let mut r = Report::new();
    let mut advisory = false;
    let mut column = vec![profile.norm; profile.s.len()];
    for side in [Side::X, Side::Fourier] {
        let name = match side {
            Side::X => "x",
            Side::Fourier => "fourier",
        };
        let rep = selfconsistency_check(&profile, side, residual, CONSISTENCY_TOL)?;
        advisory |= rep.advisory;
        let worst = rep
            .rows
            .iter()
            .min_by(|a, b| a.margin.total_cmp(&b.margin))
            .map(|w| w.s)
            .unwrap_or(0.0);
        r.lower(
            &format!("selfconsistency-{name}"),
            json!({"rows": rep.rows.len(), "worst_s": worst, "advisory": rep.advisory}),
            rep.min_margin,
            0.0,
            CONSISTENCY_TOL,
        );
        let cfit = fitted_constant(&profile, side);
        let Some(s0) = bootstrap_start(&profile, side, cfit) else {
            r.push(
                &format!("envelope-{name}"),
                json!({"fitted_c": cfit, "advisory": rep.advisory, "s0": null}),
                f64::NAN,
                1.0,
                f64::NAN,
                false,
            );
            continue;
        };
        let env = decay_envelope(&profile, side, s0, ENVELOPE_TOL)?;
        let checked = env.rows.iter().filter(|row| row.checked && row.effective).count();
        // at s0 itself the envelope is the tail, so report the worst ratio
        // where the envelope says something
        let worst = env
            .rows
            .iter()
            .filter(|row| row.checked && row.effective)
            .map(|row| row.tail / row.envelope)
            .fold(0.0, f64::max);
        r.push(
            &format!("envelope-{name}"),
            json!({"s0": s0, "fitted_c": cfit, "effective_points": checked, "advisory": rep.advisory}),
            worst,
            1.0,
            1.0 - worst,
            env.pass && checked > 0,
        );
        if side == Side::X {
            column = env.column(profile.norm);
        }
    }
    let pd = pointwise_decay(f, 5.0_f64.min(f.grid().length() / 2.0))?;
    r.upper(
        "pointwise-decay",
        json!({"s": 5.0, "interpolated": pd.interpolated}),
        pd.value,
        pd.bound,
        pd.bound * 1e-6,
    );
    Ok(TailAnalysis {
        profile,
        report: r,
        envelope_column: column,
        advisory,
    })
}
