//! Ground state: maximize the quartic functional on the sphere
//! `||f||^2 = lambda` by the normalized fixed-point iteration
//! `f <- (1 - theta) f + theta sqrt(lambda) g / ||g||`, `g = Q(f,f,f)`.
//!
//! The quartic form is convex, so with `theta = 1` each step cannot lower
//! it; the driver checks this instead of assuming it. Phase and translation
//! are symmetries: iterates are phase-aligned to their predecessor and
//! recentered so the `|f|^2` centroid stays at `x = 0`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bounds::optimize_delta;
use crate::error::{Error, Result};
use crate::functionals::eval_q3;
use crate::grid::{Field, Grid};
use crate::propagator::{gaussian_exact, ChirpedGaussian};
use crate::quadrature::QuadratureRule;

/// Slack allowed on the monotone ascent before the run is aborted.
pub const ASCENT_SLACK: f64 = 1e-12;
const COLLAPSE_NORM: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub lambda: f64,
    pub max_iters: usize,
    #[serde(default = "default_tol_step")]
    pub tol_step: f64,
    #[serde(default = "default_tol_residual")]
    pub tol_residual: f64,
    /// Initial width `sigma0`; `None` means the optimal chirp
    /// `Re = 2/delta*`, `Im = -2`.
    #[serde(default)]
    pub init_sigma: Option<Complex64>,
    #[serde(default = "default_mixing")]
    pub mixing: f64,
    /// Recenter the iterate at every step.
    #[serde(default = "default_true")]
    pub recenter: bool,
}

fn default_tol_step() -> f64 {
    1e-10
}
fn default_tol_residual() -> f64 {
    1e-8
}
fn default_mixing() -> f64 {
    1.0
}
fn default_true() -> bool {
    true
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            lambda: 1.0,
            max_iters: 2000,
            tol_step: default_tol_step(),
            tol_residual: default_tol_residual(),
            init_sigma: None,
            mixing: default_mixing(),
            recenter: true,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidArgument(format!("lambda must be > 0, got {}", self.lambda)));
        }
        if !(self.tol_step > 0.0 && self.tol_residual > 0.0) {
            return Err(Error::InvalidArgument("tolerances must be > 0".into()));
        }
        if !(self.mixing > 0.0 && self.mixing <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "mixing must lie in (0, 1], got {}",
                self.mixing
            )));
        }
        if let Some(s) = self.init_sigma {
            ChirpedGaussian::new(Complex64::new(1.0, 0.0), s)?;
        }
        Ok(())
    }

    /// The initial chirped Gaussian, normalized to mass `lambda`.
    pub fn initial_profile(&self) -> Result<ChirpedGaussian> {
        let sigma = match self.init_sigma {
            Some(s) => s,
            None => {
                let (delta, _) = optimize_delta();
                Complex64::new(2.0 / delta, -2.0)
            }
        };
        ChirpedGaussian::with_mass(sigma, self.lambda)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub q_value: f64,
    pub residual: f64,
    pub step: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolitonResult {
    pub field: Field,
    pub lambda: f64,
    pub omega: f64,
    pub q_value: f64,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
    pub step_history: Vec<IterationRecord>,
}

/// Summary written next to the field snapshot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolitonSummary {
    pub omega: f64,
    pub q_value: f64,
    pub residual: f64,
    pub iterations: usize,
    pub lambda: f64,
    pub converged: bool,
}

impl SolitonResult {
    pub fn summary(&self) -> SolitonSummary {
        SolitonSummary {
            omega: self.omega,
            q_value: self.q_value,
            residual: self.residual,
            iterations: self.iterations,
            lambda: self.lambda,
            converged: self.converged,
        }
    }
}

/// `||omega f - Q(f,f,f)|| / ||f||`.
pub fn residual(f: &Field, omega: f64, rule: &QuadratureRule) -> Result<f64> {
    let pos = f.to_position();
    let norm = pos.norm();
    if norm == 0.0 {
        return Err(Error::InvalidArgument("residual of the zero field".into()));
    }
    let g = eval_q3(&pos, &pos, &pos, rule)?;
    Ok(pos.scale(Complex64::new(omega, 0.0)).sub(&g)?.norm() / norm)
}

/// Rayleigh quotient `Re <f, Q(f,f,f)> / ||f||^2`, the multiplier that
/// minimizes the residual for fixed `f`.
pub fn rayleigh_omega(f: &Field, rule: &QuadratureRule) -> Result<f64> {
    let pos = f.to_position();
    let n2 = pos.norm_sqr();
    if n2 == 0.0 {
        return Err(Error::InvalidArgument("multiplier of the zero field".into()));
    }
    let g = eval_q3(&pos, &pos, &pos, rule)?;
    Ok(pos.inner(&g)?.re / n2)
}

/// Solve from the configured chirped Gaussian.
pub fn solve_ground_state(cfg: &SolverConfig, rule: &QuadratureRule, grid: Grid) -> Result<SolitonResult> {
    cfg.validate()?;
    let init = gaussian_exact(&cfg.initial_profile()?, 0.0, grid)?;
    solve_from(cfg, rule, init)
}

/// Solve from an arbitrary starting field, rescaled to mass `lambda`.
pub fn solve_from(cfg: &SolverConfig, rule: &QuadratureRule, init: Field) -> Result<SolitonResult> {
    cfg.validate()?;
    let lambda = cfg.lambda;
    let sqrt_lambda = lambda.sqrt();
    let mut f = init.to_position();
    let n0 = f.norm();
    if n0 < COLLAPSE_NORM {
        return Err(Error::Degenerate("initial field is zero".into()));
    }
    f = f.scale(Complex64::new(sqrt_lambda / n0, 0.0));

    let mut history = Vec::new();
    let mut previous_q: Option<f64> = None;
    for iteration in 0..cfg.max_iters {
        let g = eval_q3(&f, &f, &f, rule)?;
        let q = f.inner(&g)?.re;
        let omega = q / lambda;
        let residual = f.scale(Complex64::new(omega, 0.0)).sub(&g)?.norm() / sqrt_lambda;

        if let Some(prev) = previous_q {
            if cfg.mixing == 1.0 && q < prev - ASCENT_SLACK * prev.abs().max(1.0) {
                return Err(Error::AscentViolation {
                    iteration,
                    previous: prev,
                    current: q,
                });
            }
        }
        previous_q = Some(q);

        let gnorm = g.norm();
        if gnorm < COLLAPSE_NORM {
            return Err(Error::Degenerate(format!(
                "||Q(f,f,f)|| = {gnorm:e} at iteration {iteration}"
            )));
        }
        let mut next = f
            .scale(Complex64::new(1.0 - cfg.mixing, 0.0))
            .add_scaled(Complex64::new(cfg.mixing * sqrt_lambda / gnorm, 0.0), &g)?;
        let nn = next.norm();
        next = next.scale(Complex64::new(sqrt_lambda / nn, 0.0));
        if cfg.recenter {
            let c = next.centroid();
            if c != 0.0 {
                next = next.translate(-c);
            }
        }
        let overlap = f.inner(&next)?;
        if overlap.norm() > 0.0 {
            next = next.scale(Complex64::from_polar(1.0, -overlap.arg()));
        }
        let step = next.distance(&f)?;
        history.push(IterationRecord {
            iteration,
            q_value: q,
            residual,
            step,
        });

        if step <= cfg.tol_step * sqrt_lambda && residual <= cfg.tol_residual {
            return Ok(SolitonResult {
                field: f,
                lambda,
                omega,
                q_value: q,
                residual,
                iterations: iteration + 1,
                converged: true,
                step_history: history,
            });
        }
        f = next;
    }

    let (omega, q, residual) = match history.last() {
        Some(r) => (r.q_value / lambda, r.q_value, r.residual),
        None => (f64::NAN, f64::NAN, f64::NAN),
    };
    Err(Error::NotConverged(Box::new(SolitonResult {
        field: f,
        lambda,
        omega,
        q_value: q,
        residual,
        iterations: history.len(),
        converged: false,
        step_history: history,
    })))
}

/// Zero-mass fields cannot be normalized.
pub fn is_degenerate(f: &Field) -> bool {
    f.norm() < COLLAPSE_NORM
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Space;

    #[test]
    fn config_validation() {
        let mut c = SolverConfig::default();
        assert!(c.validate().is_ok());
        c.lambda = 0.0;
        assert!(c.validate().is_err());
        c.lambda = 1.0;
        c.mixing = 0.0;
        assert!(c.validate().is_err());
        c.mixing = 1.0;
        c.tol_step = -1.0;
        assert!(c.validate().is_err());
        c.tol_step = 1e-10;
        c.init_sigma = Some(Complex64::new(-1.0, 0.0));
        assert!(c.validate().is_err());
    }

    #[test]
    fn default_init_is_optimal_chirp() {
        let p = SolverConfig::default().initial_profile().unwrap();
        assert!((p.sigma0.im + 2.0).abs() < 1e-15);
        assert!((2.0 / p.sigma0.re - 3.3198).abs() < 1e-3);
        assert!((p.norm_sqr() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn zero_field_residual_is_an_error() {
        let g = Grid::new(64, 20.0).unwrap();
        let rule = QuadratureRule::gauss_legendre(4).unwrap();
        let z = Field::zeros(g, Space::Position);
        assert!(residual(&z, 1.0, &rule).is_err());
        assert!(rayleigh_omega(&z, &rule).is_err());
        assert!(is_degenerate(&z));
    }

    #[test]
    fn zero_iterations_does_not_converge() {
        let g = Grid::new(128, 40.0).unwrap();
        let rule = QuadratureRule::gauss_legendre(8).unwrap();
        let cfg = SolverConfig {
            max_iters: 0,
            ..SolverConfig::default()
        };
        match solve_ground_state(&cfg, &rule, g) {
            Err(Error::NotConverged(r)) => {
                assert_eq!(r.iterations, 0);
                assert!(!r.converged);
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn zero_start_is_degenerate() {
        let g = Grid::new(64, 20.0).unwrap();
        let rule = QuadratureRule::gauss_legendre(4).unwrap();
        let z = Field::zeros(g, Space::Position);
        assert!(matches!(
            solve_from(&SolverConfig::default(), &rule, z),
            Err(Error::Degenerate(_))
        ));
    }
}
