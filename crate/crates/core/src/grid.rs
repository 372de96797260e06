//! Uniform periodic grid, sampled fields and the unitary Fourier transform
//! `fhat(k) = (2pi)^(-1/2) \int e^{-ixk} f(x) dx`.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft;

/// Uniform grid on `[-L/2, L/2)` with `n` points and the paired frequency
/// lattice `dk * {-n/2, ..., n/2 - 1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    n: usize,
    length: f64,
}

impl Grid {
    /// `n` must be even and at least 16. Powers of two give the fastest
    /// transforms.
    pub fn new(n: usize, length: f64) -> Result<Self> {
        if n < 16 || !n.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "point count must be even and >= 16, got {n}"
            )));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "length must be positive and finite, got {length}"
            )));
        }
        Ok(Self { n, length })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn dx(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn dk(&self) -> f64 {
        2.0 * PI / self.length
    }

    /// Largest representable |k|.
    pub fn k_max(&self) -> f64 {
        self.dk() * (self.n / 2) as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        -0.5 * self.length + j as f64 * self.dx()
    }

    pub fn k(&self, m: usize) -> f64 {
        self.dk() * (m as f64 - (self.n / 2) as f64)
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.x(j)).collect()
    }

    pub fn frequencies(&self) -> Vec<f64> {
        (0..self.n).map(|m| self.k(m)).collect()
    }

    /// Sample lattice of the given representation.
    pub fn lattice(&self, space: Space) -> Vec<f64> {
        match space {
            Space::Position => self.positions(),
            Space::Frequency => self.frequencies(),
        }
    }

    pub fn spacing(&self, space: Space) -> f64 {
        match space {
            Space::Position => self.dx(),
            Space::Frequency => self.dk(),
        }
    }

    /// The grid whose position lattice is this grid's frequency lattice and
    /// whose frequency lattice is this grid's position lattice.
    pub fn dual(&self) -> Grid {
        Grid {
            n: self.n,
            length: self.n as f64 * self.dk(),
        }
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Grid(n={}, L={})", self.n, self.length)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Space {
    Position,
    Frequency,
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Space::Position => f.write_str("position"),
            Space::Frequency => f.write_str("frequency"),
        }
    }
}

/// Complex samples of a function on a [`Grid`], in one representation.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid,
    space: Space,
    values: Vec<Complex64>,
}

impl Field {
    pub fn new(grid: Grid, space: Space, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(Error::InvalidArgument(format!(
                "{} samples for {grid}",
                values.len()
            )));
        }
        Ok(Self {
            grid,
            space,
            values,
        })
    }

    pub fn zeros(grid: Grid, space: Space) -> Self {
        Self {
            grid,
            space,
            values: vec![Complex64::new(0.0, 0.0); grid.n()],
        }
    }

    /// Samples `f` on the lattice of `space`.
    pub fn from_fn(grid: Grid, space: Space, mut f: impl FnMut(f64) -> Complex64) -> Self {
        let values = grid.lattice(space).into_iter().map(&mut f).collect();
        Self {
            grid,
            space,
            values,
        }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub(crate) fn expect_space(&self, expected: Space) -> Result<()> {
        if self.space != expected {
            return Err(Error::WrongSpace {
                expected,
                found: self.space,
            });
        }
        Ok(())
    }

    pub(crate) fn expect_same_grid(&self, other: &Field) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch(self.grid, other.grid));
        }
        Ok(())
    }

    pub fn fourier(&self) -> Result<Field> {
        self.expect_space(Space::Position)?;
        Ok(Field {
            grid: self.grid,
            space: Space::Frequency,
            values: fft::forward(&self.values, self.grid.dx()),
        })
    }

    pub fn inverse_fourier(&self) -> Result<Field> {
        self.expect_space(Space::Frequency)?;
        Ok(Field {
            grid: self.grid,
            space: Space::Position,
            values: fft::inverse(&self.values, self.grid.dk()),
        })
    }

    /// The same function in position space.
    pub fn to_position(&self) -> Field {
        match self.space {
            Space::Position => self.clone(),
            Space::Frequency => self.inverse_fourier().expect("space checked"),
        }
    }

    /// The same function in frequency space.
    pub fn to_frequency(&self) -> Field {
        match self.space {
            Space::Frequency => self.clone(),
            Space::Position => self.fourier().expect("space checked"),
        }
    }

    /// Inverse Fourier transform `fcheck(z) = (2pi)^(-1/2) \int e^{iz y} f(y) dy`
    /// of a position-space field, returned as a position-space field on the
    /// dual grid (so its own transform lives on this grid's positions).
    pub fn dual_inverse(&self) -> Result<Field> {
        self.expect_space(Space::Position)?;
        let dual = self.grid.dual();
        let as_spectrum = Field {
            grid: dual,
            space: Space::Frequency,
            values: self.values.clone(),
        };
        as_spectrum.inverse_fourier()
    }

    /// `<self, other>`, conjugate-linear in `self`.
    pub fn inner(&self, other: &Field) -> Result<Complex64> {
        self.expect_same_grid(other)?;
        self.expect_space(other.space)?;
        let sum: Complex64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(sum * self.grid.spacing(self.space))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.spacing(self.space)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, c: Complex64) -> Field {
        self.map(|v| v * c)
    }

    pub fn map(&self, mut f: impl FnMut(Complex64) -> Complex64) -> Field {
        Field {
            grid: self.grid,
            space: self.space,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, c: Complex64, other: &Field) -> Result<Field> {
        self.expect_same_grid(other)?;
        self.expect_space(other.space)?;
        Ok(Field {
            grid: self.grid,
            space: self.space,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + c * b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Field) -> Result<Field> {
        self.add_scaled(Complex64::new(-1.0, 0.0), other)
    }

    /// `f(x - shift)` by a spectral phase; exact for the trigonometric
    /// interpolant. Returned in the input's representation.
    pub fn translate(&self, shift: f64) -> Field {
        let spec = self.to_frequency();
        let ks = self.grid.frequencies();
        let shifted = Field {
            grid: self.grid,
            space: Space::Frequency,
            values: spec
                .values
                .iter()
                .zip(ks)
                .map(|(v, k)| v * Complex64::from_polar(1.0, -k * shift))
                .collect(),
        };
        match self.space {
            Space::Frequency => shifted,
            Space::Position => shifted.inverse_fourier().expect("space checked"),
        }
    }

    /// Spectral derivative `f'` in position space.
    pub fn derivative(&self) -> Field {
        let spec = self.to_frequency();
        let ks = self.grid.frequencies();
        Field {
            grid: self.grid,
            space: Space::Frequency,
            values: spec
                .values
                .iter()
                .zip(ks)
                .map(|(v, k)| v * Complex64::new(0.0, k))
                .collect(),
        }
        .inverse_fourier()
        .expect("space checked")
    }

    /// `L^2` distance, same grid and space required.
    pub fn distance(&self, other: &Field) -> Result<f64> {
        Ok(self.sub(other)?.norm())
    }

    /// Largest sample-wise modulus difference.
    pub fn max_abs_diff(&self, other: &Field) -> Result<f64> {
        Ok(self.sub(other)?.max_abs())
    }

    /// Centroid of `|f|^2` on the periodic domain (circular mean), in
    /// position coordinates.
    pub fn centroid(&self) -> f64 {
        let pos = self.to_position();
        let l = self.grid.length();
        let acc: Complex64 = pos
            .values
            .iter()
            .zip(self.grid.positions())
            .map(|(v, x)| v.norm_sqr() * Complex64::from_polar(1.0, 2.0 * PI * x / l))
            .sum();
        if acc.norm() == 0.0 {
            return 0.0;
        }
        l * acc.arg() / (2.0 * PI)
    }

    /// Twice the root-mean-square radius of `|f|^2` about its centroid.
    pub fn rms_width(&self) -> f64 {
        let pos = self.to_position();
        let c = pos.centroid();
        let l = self.grid.length();
        let mut mass = 0.0;
        let mut second = 0.0;
        for (v, x) in pos.values.iter().zip(self.grid.positions()) {
            let mut d = x - c;
            d -= l * (d / l).round();
            mass += v.norm_sqr();
            second += v.norm_sqr() * d * d;
        }
        if mass == 0.0 {
            return 0.0;
        }
        2.0 * (second / mass).sqrt()
    }

    /// Largest spectral modulus over the outer `fraction` of the frequency
    /// lattice, relative to the spectral peak. Small values mean the grid
    /// resolves the field.
    pub fn spectral_tail(&self, fraction: f64) -> f64 {
        let spec = self.to_frequency();
        let peak = spec.max_abs();
        if peak == 0.0 {
            return 0.0;
        }
        let cut = self.grid.k_max() * (1.0 - fraction);
        let tail = spec
            .values
            .iter()
            .zip(self.grid.frequencies())
            .filter(|(_, k)| k.abs() >= cut)
            .map(|(v, _)| v.norm())
            .fold(0.0, f64::max);
        tail / peak
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn grid_rejects_odd_or_small() {
        assert!(Grid::new(15, 1.0).is_err());
        assert!(Grid::new(8, 1.0).is_err());
        assert!(Grid::new(64, 0.0).is_err());
        assert!(Grid::new(64, f64::NAN).is_err());
        assert!(Grid::new(16, 1.0).is_ok());
    }

    #[test]
    fn lattice_product_is_two_pi() {
        for &(n, l) in &[(16, 1.0), (512, 40.0), (4096, 1024.0), (1000, 3.7)] {
            let g = Grid::new(n, l).unwrap();
            let p = g.dx() * g.dk() * n as f64;
            assert!((p - 2.0 * PI).abs() <= 4.0 * f64::EPSILON * 2.0 * PI);
        }
    }

    #[test]
    fn lattices_are_centered() {
        let g = Grid::new(16, 8.0).unwrap();
        assert_eq!(g.x(0), -4.0);
        assert_eq!(g.x(8), 0.0);
        assert_eq!(g.k(8), 0.0);
        assert!((g.k(0) + g.k_max()).abs() < 1e-15);
    }

    #[test]
    fn dual_grid_swaps_lattices() {
        let g = Grid::new(64, 10.0).unwrap();
        let d = g.dual();
        for j in 0..64 {
            assert!((d.x(j) - g.k(j)).abs() < 1e-12);
            assert!((d.k(j) - g.x(j)).abs() < 1e-12);
        }
    }

    #[test]
    fn wrong_space_is_rejected() {
        let g = Grid::new(16, 1.0).unwrap();
        let f = Field::zeros(g, Space::Frequency);
        assert!(matches!(f.fourier(), Err(Error::WrongSpace { .. })));
        let h = Field::zeros(g, Space::Position);
        assert!(matches!(h.inverse_fourier(), Err(Error::WrongSpace { .. })));
    }

    #[test]
    fn zero_maps_to_zero() {
        let g = Grid::new(64, 10.0).unwrap();
        let f = Field::zeros(g, Space::Position);
        assert_eq!(f.fourier().unwrap().max_abs(), 0.0);
    }

    #[test]
    fn inner_rejects_mismatch() {
        let a = Field::zeros(Grid::new(16, 1.0).unwrap(), Space::Position);
        let b = Field::zeros(Grid::new(32, 1.0).unwrap(), Space::Position);
        assert!(matches!(a.inner(&b), Err(Error::GridMismatch(..))));
        let f = Field::zeros(Grid::new(16, 1.0).unwrap(), Space::Frequency);
        assert!(a.inner(&f).is_err());
    }

    #[test]
    fn inner_with_i_times_self() {
        let g = Grid::new(64, 10.0).unwrap();
        let f = Field::from_fn(g, Space::Position, |x| c((-x * x).exp(), 0.3 * x));
        let lhs = f.inner(&f.scale(c(0.0, 1.0))).unwrap();
        let n2 = f.norm_sqr();
        assert!((lhs - c(0.0, n2)).norm() <= 1e-13 * n2);
    }

    #[test]
    fn single_mode_has_constant_modulus() {
        let g = Grid::new(128, 20.0).unwrap();
        let mut spec = Field::zeros(g, Space::Frequency);
        spec.values[g.n() / 2 + 1] = c(1.0, 0.0);
        let pos = spec.inverse_fourier().unwrap();
        let expected = g.dk() / (2.0 * PI).sqrt();
        for (j, v) in pos.values().iter().enumerate() {
            assert!((v.norm() - expected).abs() <= 1e-12 * expected);
            let phase = Complex64::from_polar(expected, g.x(j) * g.dk());
            assert!((v - phase).norm() <= 1e-12);
        }
    }

    #[test]
    fn translate_moves_centroid() {
        let g = Grid::new(256, 40.0).unwrap();
        let f = Field::from_fn(g, Space::Position, |x| c((-x * x / 2.0).exp(), 0.0));
        assert!(f.centroid().abs() < 1e-12);
        let shifted = f.translate(1.5);
        assert!((shifted.centroid() - 1.5).abs() < 1e-9);
        let expect = Field::from_fn(g, Space::Position, |x| c((-(x - 1.5) * (x - 1.5) / 2.0).exp(), 0.0));
        assert!(shifted.max_abs_diff(&expect).unwrap() < 1e-12);
    }

    #[test]
    fn derivative_of_gaussian() {
        let g = Grid::new(256, 40.0).unwrap();
        let f = Field::from_fn(g, Space::Position, |x| c((-x * x / 2.0).exp(), 0.0));
        let d = f.derivative();
        let expect = Field::from_fn(g, Space::Position, |x| c(-x * (-x * x / 2.0).exp(), 0.0));
        assert!(d.max_abs_diff(&expect).unwrap() < 1e-11);
    }
}
