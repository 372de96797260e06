//! Analytic constants around the ground-state constant `P1`, the
//! chirped-Gaussian lower bound and the sextic Strichartz inequality.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::{eval_q4, space_time_modulus_power};
use crate::grid::{Field, Grid};
use crate::propagator::extent_guard;
use crate::quadrature::QuadratureRule;
use crate::sampling::{FieldDescriptor, GaussianMixture};

/// The constants that the checks compare against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    /// Sharp Strichartz constant `12^{-1/12}`.
    pub s1: f64,
    /// `12^{-1/4}`
    pub p1_upper: f64,
    /// `12^{-1/4} / sqrt(3)`
    pub r_bound: f64,
    /// `1.05 / sqrt(2 pi)`
    pub p1_lower_factor: f64,
    /// `2^{-1/4} 3^{-3/8}`
    pub multilinear_x: f64,
    /// `2^{-3/4} 3^{-1/8}`
    pub multilinear_k: f64,
}

impl Constants {
    pub fn get() -> Self {
        Self {
            s1: 12f64.powf(-1.0 / 12.0),
            p1_upper: 12f64.powf(-0.25),
            r_bound: 12f64.powf(-0.25) / 3f64.sqrt(),
            p1_lower_factor: 1.05 / (2.0 * PI).sqrt(),
            multilinear_x: 2f64.powf(-0.25) * 3f64.powf(-0.375),
            multilinear_k: 2f64.powf(-0.75) * 3f64.powf(-0.125),
        }
    }

    /// `S1^6 = 12^{-1/2}`.
    pub fn strichartz_sextic(&self) -> f64 {
        self.s1.powi(6)
    }
}

/// `asinh(delta) / sqrt(2 pi delta)`: the quartic functional of the unit
/// chirped Gaussian with `Im sigma0 = -2`, `Re sigma0 = 2/delta`.
pub fn gaussian_lower_bound(delta: f64) -> Result<f64> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::InvalidArgument(format!("delta must be > 0, got {delta}")));
    }
    Ok(delta.asinh() / (2.0 * PI * delta).sqrt())
}

/// Golden-section maximization of [`gaussian_lower_bound`] on `[0.1, 100]`.
pub fn optimize_delta() -> (f64, f64) {
    const TOL: f64 = 1e-8;
    let g = |d: f64| gaussian_lower_bound(d).expect("positive delta");
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (0.1_f64, 100.0_f64);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut gc, mut gd) = (g(c), g(d));
    while b - a > TOL {
        if gc > gd {
            b = d;
            d = c;
            gd = gc;
            c = b - inv_phi * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + inv_phi * (b - a);
            gd = g(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, g(x))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrichartzOutcome {
    /// `\int_{-T}^{T} \int |T_t f|^6 dx dt`
    pub lhs: f64,
    /// `12^{-1/2} ||f||^6`
    pub rhs: f64,
    pub ok: bool,
    /// Upper bound on the part of the integral beyond `|t| > T`, from
    /// `|T_t f|_inf <= ||f||_1 / sqrt(4 pi |t|)`.
    pub tail_bound: f64,
    /// Largest width seen over the window stayed below `L/4`.
    pub resolved: bool,
}

/// Time rule on `[-T, T]` in the variable `theta = atan(4t)`. For the unit
/// Gaussian the sextic integrand is constant in `theta`, and in general the
/// `t^{-2}` decay turns into a smooth integrand.
pub fn strichartz_rule(t_extent: f64, nodes: usize, panels: usize) -> Result<QuadratureRule> {
    if !(t_extent > 0.0) {
        return Err(Error::InvalidArgument(format!("t_extent must be > 0, got {t_extent}")));
    }
    let theta = (4.0 * t_extent).atan();
    let base = QuadratureRule::gauss_legendre(nodes)?.composite(-theta, theta, panels);
    let (nodes, weights) = base
        .iter()
        .map(|(th, w)| {
            let c = th.cos();
            (th.tan() / 4.0, w / (4.0 * c * c))
        })
        .unzip();
    QuadratureRule::custom(nodes, weights)
}

/// Truncated sextic space-time integral against the sharp Strichartz bound.
pub fn strichartz_check(f: &Field, t_extent: f64, rule: &QuadratureRule) -> Result<StrichartzOutcome> {
    let pos = f.to_position();
    let c = Constants::get();
    let mass = pos.norm_sqr();
    let rhs = c.strichartz_sextic() * mass.powi(3);
    let lhs = if mass == 0.0 {
        0.0
    } else {
        space_time_modulus_power(&pos, 6, rule)?
    };
    let l1: f64 = pos.values().iter().map(|v| v.norm()).sum::<f64>() * pos.grid().dx();
    let tail_bound = l1.powi(4) * mass / (8.0 * PI * PI * t_extent);
    let (_, wraps) = extent_guard(&pos, &[-t_extent, t_extent])?;
    Ok(StrichartzOutcome {
        lhs,
        rhs,
        ok: lhs <= rhs + 1e-6,
        tail_bound,
        resolved: !wraps,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct P1Estimate {
    pub max_q: f64,
    pub argmax: FieldDescriptor,
    /// Best lower-bound profile value among the drawn single Gaussians.
    pub gaussian_floor: f64,
    /// Every sampled value, mandatory set first.
    pub values: Vec<f64>,
}

/// Random search for `P1`: the mandatory set (optimal chirp, plain unit
/// Gaussian) followed by `samples` random unit-mass mixtures, each drawn from
/// its own stream of `seed`.
pub fn p1_estimate_random(samples: usize, seed: u64, grid: Grid, rule: &QuadratureRule) -> Result<P1Estimate> {
    let mut draws = GaussianMixture::mandatory_set();
    draws.extend(GaussianMixture::draw_many(samples, seed, grid, 1.0)?);
    let values: Vec<f64> = draws
        .par_iter()
        .map(|d| {
            let f = d.sample(grid)?;
            Ok(eval_q4(&f, &f, &f, &f, rule)?.re)
        })
        .collect::<Result<_>>()?;
    let (best, max_q) = values
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
    let gaussian_floor = draws
        .iter()
        .filter_map(|d| d.lower_bound_profile())
        .fold(0.0, f64::max);
    Ok(P1Estimate {
        max_q,
        argmax: draws[best].descriptor(),
        gaussian_floor,
        values,
    })
}

/// Deterministic generator for per-sample stream `index` of `seed`.
pub(crate) fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_are_ordered() {
        let c = Constants::get();
        for v in [c.s1, c.p1_upper, c.r_bound, c.p1_lower_factor, c.multilinear_x, c.multilinear_k] {
            assert!(v > 0.0);
        }
        assert!(c.p1_lower_factor < c.p1_upper);
        assert!((c.strichartz_sextic() - 12f64.powf(-0.5)).abs() < 1e-15);
    }

    #[test]
    fn lower_bound_rejects_nonpositive_delta() {
        assert!(gaussian_lower_bound(0.0).is_err());
        assert!(gaussian_lower_bound(-1.0).is_err());
        assert!(gaussian_lower_bound(f64::NAN).is_err());
        assert!(gaussian_lower_bound(1e-6).unwrap() < 1e-3);
    }

    #[test]
    fn strichartz_rule_integrates_lorentzian() {
        // \int_{-T}^{T} dt / (1 + 16 t^2) = atan(4T) / 2
        let r = strichartz_rule(20.0, 16, 4).unwrap();
        let got = r.integrate(|t| 1.0 / (1.0 + 16.0 * t * t));
        assert!((got - 80f64.atan() / 2.0).abs() < 1e-13);
        assert!(strichartz_rule(0.0, 16, 4).is_err());
    }

    #[test]
    fn streams_differ() {
        use rand::Rng;
        let a: u64 = stream_rng(7, 0).gen();
        let b: u64 = stream_rng(7, 1).gen();
        let c: u64 = stream_rng(7, 0).gen();
        assert_ne!(a, b);
        assert_eq!(a, c);
    }
}
