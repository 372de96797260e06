//! Seeded random test fields: unit-mass mixtures of one to three shifted
//! chirped Gaussians.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bounds::{optimize_delta, stream_rng};
use crate::error::{Error, Result};
use crate::grid::{Field, Grid, Space};
use crate::propagator::ChirpedGaussian;

const MAX_REJECTIONS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub coefficient: Complex64,
    pub sigma0: Complex64,
    pub center: f64,
}

/// What was drawn; the sampled field is this mixture rescaled to unit mass
/// on the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldDescriptor {
    pub label: String,
    pub components: Vec<Component>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianMixture {
    label: String,
    components: Vec<Component>,
}

impl GaussianMixture {
    pub fn new(label: impl Into<String>, components: Vec<Component>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidArgument("mixture needs a component".into()));
        }
        for c in &components {
            ChirpedGaussian::new(c.coefficient, c.sigma0)?;
        }
        Ok(Self {
            label: label.into(),
            components,
        })
    }

    /// The optimally chirped Gaussian and the plain unit Gaussian.
    pub fn mandatory_set() -> Vec<GaussianMixture> {
        let (delta, _) = optimize_delta();
        let one = Complex64::new(1.0, 0.0);
        vec![
            GaussianMixture {
                label: "optimal-chirp".into(),
                components: vec![Component {
                    coefficient: one,
                    sigma0: Complex64::new(2.0 / delta, -2.0),
                    center: 0.0,
                }],
            },
            GaussianMixture {
                label: "unit-gaussian".into(),
                components: vec![Component {
                    coefficient: one,
                    sigma0: one,
                    center: 0.0,
                }],
            },
        ]
    }

    /// One random mixture from `rng`, redrawn until every component stays
    /// within `L/4` of the origin for `|t| <= t_max`.
    pub fn draw<R: Rng>(rng: &mut R, label: String, grid: Grid, t_max: f64) -> Result<Self> {
        for _ in 0..MAX_REJECTIONS {
            let count = rng.gen_range(1..=3);
            let components: Vec<Component> = (0..count)
                .map(|_| Component {
                    coefficient: Complex64::from_polar(rng.gen_range(0.2..1.0), rng.gen_range(0.0..2.0 * PI)),
                    sigma0: Complex64::new(rng.gen_range(0.5..3.0), rng.gen_range(-3.0..1.0)),
                    center: rng.gen_range(-2.0..2.0),
                })
                .collect();
            let fits = components.iter().all(|c| {
                let g = ChirpedGaussian {
                    a0: c.coefficient,
                    sigma0: c.sigma0,
                };
                c.center.abs() + g.max_width(-t_max, t_max) <= grid.length() / 4.0
            });
            if fits {
                return Self::new(label, components);
            }
        }
        Err(Error::InvalidArgument(format!(
            "grid {grid} too small for random fields up to |t| = {t_max}"
        )))
    }

    /// `count` mixtures, the `i`-th drawn from stream `i` of `seed`.
    pub fn draw_many(count: usize, seed: u64, grid: Grid, t_max: f64) -> Result<Vec<Self>> {
        (0..count)
            .map(|i| {
                let mut rng = stream_rng(seed, i as u64);
                Self::draw(&mut rng, format!("random-{seed}-{i}"), grid, t_max)
            })
            .collect()
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn descriptor(&self) -> FieldDescriptor {
        FieldDescriptor {
            label: self.label.clone(),
            components: self.components.clone(),
        }
    }

    /// Unnormalized mixture sampled on `grid`.
    pub fn sample_raw(&self, grid: Grid) -> Field {
        Field::from_fn(grid, Space::Position, |x| {
            self.components
                .iter()
                .map(|c| {
                    let y = x - c.center;
                    c.coefficient * (-(y * y) / c.sigma0).exp()
                })
                .sum()
        })
    }

    /// The mixture at unit mass on `grid`.
    pub fn sample(&self, grid: Grid) -> Result<Field> {
        let f = self.sample_raw(grid);
        let n = f.norm();
        if n == 0.0 {
            return Err(Error::Degenerate(format!("mixture {} vanishes on the grid", self.label)));
        }
        Ok(f.scale(Complex64::new(1.0 / n, 0.0)))
    }

    /// For a single component, its exact quartic functional at unit mass.
    pub fn lower_bound_profile(&self) -> Option<f64> {
        match self.components.as_slice() {
            [c] => Some(chirped_gaussian_q(c.sigma0)),
            _ => None,
        }
    }
}

/// Averaged quartic functional of a unit-mass chirped Gaussian:
/// `sqrt(Re s) / sqrt(pi) * \int_0^1 dt / |s + 4it|`, in closed form.
pub fn chirped_gaussian_q(sigma0: Complex64) -> f64 {
    let (a, b) = (sigma0.re, sigma0.im);
    a.sqrt() / (4.0 * PI.sqrt()) * (((b + 4.0) / a).asinh() - (b / a).asinh())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::gaussian_lower_bound;

    #[test]
    fn closed_form_matches_lower_bound_profile() {
        for delta in [0.3, 1.0, 3.32, 10.0] {
            let q = chirped_gaussian_q(Complex64::new(2.0 / delta, -2.0));
            assert!((q - gaussian_lower_bound(delta).unwrap()).abs() < 1e-15);
        }
    }

    #[test]
    fn draws_are_reproducible_and_normalized() {
        let grid = Grid::new(256, 40.0).unwrap();
        let a = GaussianMixture::draw_many(5, 11, grid, 1.0).unwrap();
        let b = GaussianMixture::draw_many(5, 11, grid, 1.0).unwrap();
        assert_eq!(a, b);
        for m in &a {
            assert!((m.sample(grid).unwrap().norm_sqr() - 1.0).abs() < 1e-13);
            assert!((1..=3).contains(&m.components().len()));
        }
        assert_ne!(a, GaussianMixture::draw_many(5, 12, grid, 1.0).unwrap());
    }

    #[test]
    fn tiny_grid_is_rejected() {
        let grid = Grid::new(64, 4.0).unwrap();
        assert!(GaussianMixture::draw_many(1, 0, grid, 20.0).is_err());
    }

    #[test]
    fn mandatory_set_leads_with_optimal_chirp() {
        let set = GaussianMixture::mandatory_set();
        assert_eq!(set[0].components()[0].sigma0.im, -2.0);
        assert!(set[0].lower_bound_profile().unwrap() > set[1].lower_bound_profile().unwrap());
    }
}
