//! Free Schrödinger evolution `T_t = e^{it d_x^2}` as the frequency
//! multiplier `e^{-itk^2}`, and the closed-form chirped Gaussian orbit.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Field, Grid, Space};

/// `T_t f` for a position-space field. Negative `t` runs backwards.
pub fn evolve(f: &Field, t: f64) -> Result<Field> {
    f.expect_space(Space::Position)?;
    if t == 0.0 {
        return Ok(f.clone());
    }
    evolve_spectrum(&f.fourier()?, t).inverse_fourier()
}

/// Applies `e^{-itk^2}` to a frequency-space field.
pub(crate) fn evolve_spectrum(spec: &Field, t: f64) -> Field {
    let grid = spec.grid();
    let values = spec
        .values()
        .iter()
        .enumerate()
        .map(|(m, v)| {
            let k = grid.k(m);
            v * Complex64::from_polar(1.0, -t * k * k)
        })
        .collect();
    Field::new(grid, Space::Frequency, values).expect("same length")
}

/// `A0 exp(-x^2 / sigma0)` with `Re(sigma0) > 0`. Its free evolution is
/// `A(t) exp(-x^2 / sigma(t))`, `sigma(t) = sigma0 + 4it`,
/// `A(t) = A0 sqrt(sigma0) / sqrt(sigma(t))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChirpedGaussian {
    pub a0: Complex64,
    pub sigma0: Complex64,
}

impl ChirpedGaussian {
    pub fn new(a0: Complex64, sigma0: Complex64) -> Result<Self> {
        if !(sigma0.re > 0.0) || !sigma0.im.is_finite() || !a0.re.is_finite() || !a0.im.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "chirped Gaussian needs Re(sigma0) > 0, got {sigma0}"
            )));
        }
        Ok(Self { a0, sigma0 })
    }

    /// Real positive amplitude chosen so that `||f||^2 = mass`.
    pub fn with_mass(sigma0: Complex64, mass: f64) -> Result<Self> {
        let unit = Self::new(Complex64::new(1.0, 0.0), sigma0)?;
        let a = (mass / unit.norm_sqr()).sqrt();
        Self::new(Complex64::new(a, 0.0), sigma0)
    }

    /// Unit-mass member with `Im(sigma0) = -2` and `Re(sigma0) = 2/delta`;
    /// its quartic functional equals the lower-bound profile at `delta`.
    pub fn optimally_chirped(delta: f64) -> Result<Self> {
        if !(delta > 0.0) {
            return Err(Error::InvalidArgument(format!("delta must be > 0, got {delta}")));
        }
        Self::with_mass(Complex64::new(2.0 / delta, -2.0), 1.0)
    }

    /// Analytic `||f||^2 = |A0|^2 sqrt(pi |sigma0|^2 / (2 Re sigma0))`.
    pub fn norm_sqr(&self) -> f64 {
        self.a0.norm_sqr() * (PI * self.sigma0.norm_sqr() / (2.0 * self.sigma0.re)).sqrt()
    }

    pub fn sigma_at(&self, t: f64) -> Complex64 {
        self.sigma0 + Complex64::new(0.0, 4.0 * t)
    }

    /// `A(t)`. `Re sigma(t) = Re sigma0 > 0` for every `t`, so the principal
    /// square root never meets its cut and is the continuous branch from
    /// `t = 0`.
    pub fn amplitude_at(&self, t: f64) -> Complex64 {
        self.a0 * self.sigma0.sqrt() / self.sigma_at(t).sqrt()
    }

    /// The profile `T_t f` at `x`.
    pub fn value(&self, t: f64, x: f64) -> Complex64 {
        self.amplitude_at(t) * (-(x * x) / self.sigma_at(t)).exp()
    }

    /// Radius where `|T_t f|^2` has dropped by `e^{-2}`:
    /// `|sigma(t)| / sqrt(Re sigma0)`.
    pub fn width_at(&self, t: f64) -> f64 {
        self.sigma_at(t).norm() / self.sigma0.re.sqrt()
    }

    /// Largest width over `t` in `[a, b]`.
    pub fn max_width(&self, a: f64, b: f64) -> f64 {
        self.width_at(a).max(self.width_at(b))
    }

    /// The evolved packet is wider than `L/4` somewhere on `[a, b]`, so the
    /// periodic grid would fold its tails back in.
    pub fn wraps(&self, grid: &Grid, a: f64, b: f64) -> bool {
        self.max_width(a, b) > grid.length() / 4.0
    }
}

/// Samples `T_t f` for a chirped Gaussian on `grid`.
pub fn gaussian_exact(p: &ChirpedGaussian, t: f64, grid: Grid) -> Result<Field> {
    let p = ChirpedGaussian::new(p.a0, p.sigma0)?;
    Ok(Field::from_fn(grid, Space::Position, |x| p.value(t, x)))
}

/// Aliasing guard for arbitrary fields: evolves to each of `times` and
/// reports the largest `2 * rms` width seen, plus whether it exceeds `L/4`.
pub fn extent_guard(f: &Field, times: &[f64]) -> Result<(f64, bool)> {
    let pos = f.to_position();
    let mut widest: f64 = pos.rms_width();
    for &t in times {
        widest = widest.max(evolve(&pos, t)?.rms_width());
    }
    Ok((widest, widest > f.grid().length() / 4.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid {
        Grid::new(512, 40.0).unwrap()
    }

    #[test]
    fn evolve_at_zero_is_identity() {
        let f = Field::from_fn(grid(), Space::Position, |x| Complex64::new((-x * x).exp(), x.sin() * 1e-3));
        assert_eq!(evolve(&f, 0.0).unwrap(), f);
    }

    #[test]
    fn evolve_rejects_frequency_input() {
        let f = Field::zeros(grid(), Space::Frequency);
        assert!(evolve(&f, 0.1).is_err());
    }

    #[test]
    fn rejects_non_integrable_width() {
        assert!(ChirpedGaussian::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)).is_err());
        assert!(ChirpedGaussian::new(Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)).is_err());
        let bad = ChirpedGaussian {
            a0: Complex64::new(1.0, 0.0),
            sigma0: Complex64::new(-1.0, 0.0),
        };
        assert!(gaussian_exact(&bad, 0.0, grid()).is_err());
    }

    #[test]
    fn closed_form_at_zero_samples_initial_profile() {
        let p = ChirpedGaussian::new(Complex64::new(0.7, 0.2), Complex64::new(1.5, -0.5)).unwrap();
        let f = gaussian_exact(&p, 0.0, grid()).unwrap();
        for (j, v) in f.values().iter().enumerate() {
            let x = grid().x(j);
            let want = p.a0 * (-(x * x) / p.sigma0).exp();
            assert!((v - want).norm() < 1e-15);
        }
    }

    #[test]
    fn analytic_norm_matches_samples() {
        let p = ChirpedGaussian::new(Complex64::new(0.7, 0.2), Complex64::new(1.5, -2.0)).unwrap();
        let f = gaussian_exact(&p, 0.0, grid()).unwrap();
        assert!((f.norm_sqr() - p.norm_sqr()).abs() <= 1e-8 * p.norm_sqr());
    }

    #[test]
    fn branch_is_continuous_across_the_window() {
        let p = ChirpedGaussian::new(Complex64::new(1.0, 0.0), Complex64::new(0.1, -3.0)).unwrap();
        let mut prev = p.amplitude_at(-1.0);
        for i in 1..=2000 {
            let t = -1.0 + i as f64 * 1e-3;
            let a = p.amplitude_at(t);
            assert!((a - prev).norm() < 0.2, "jump at t={t}");
            prev = a;
        }
    }

    #[test]
    fn width_guard_flags_wide_packets() {
        let p = ChirpedGaussian::with_mass(Complex64::new(1.0, 0.0), 1.0).unwrap();
        assert!(!p.wraps(&grid(), 0.0, 1.0));
        assert!(p.wraps(&grid(), 0.0, 10.0));
        let f = gaussian_exact(&p, 0.0, grid()).unwrap();
        let (w, wraps) = extent_guard(&f, &[1.0]).unwrap();
        assert!((w - p.width_at(1.0)).abs() < 1e-6 * w);
        assert!(!wraps);
    }
}
