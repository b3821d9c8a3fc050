//! Synthetic deblurring instances: a sparse test image, Simpson-rule blurred
//! data and relative Gaussian noise.

use std::sync::Arc;

use nalgebra::DVector;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{add_relative_noise, stream_rng, Stream};
use crate::error::{Error, Result};
use crate::objectives::{forward_blur_simpson, BlurOperator, LinearMap, QuadraticObjective};
use crate::problem::{WeightVector, WeightedL1Problem};

pub const DEFAULT_RIDGE: f64 = 1e-6;

/// Fraction of nonzero pixels targeted by [`sparse_test_image`].
const TARGET_DENSITY: f64 = 0.15;

/// Sparse `side x side` image (column-major stack) of rectangles, discs and
/// isolated points with intensities in `[0.3, 1]`; about 15% of the pixels are
/// nonzero.
pub fn sparse_test_image(side: usize, seed: u64) -> DVector<f64> {
    let mut rng = stream_rng(seed, Stream::Image);
    let mut u = DVector::zeros(side * side);
    let target = (TARGET_DENSITY * (side * side) as f64).ceil() as usize;
    let max_extent = (side / 6).max(1);
    let mut nonzero = 0;
    let paint = |u: &mut DVector<f64>, row: usize, col: usize, value: f64, nonzero: &mut usize| {
        let k = col * side + row;
        if u[k] == 0.0 {
            *nonzero += 1;
        }
        u[k] = value;
    };
    while nonzero < target {
        let value = rng.random_range(0.3..1.0);
        let (r0, c0) = (rng.random_range(0..side), rng.random_range(0..side));
        match rng.random_range(0..3) {
            0 => {
                let h = rng.random_range(1..=max_extent);
                let w = rng.random_range(1..=max_extent);
                for row in r0..(r0 + h).min(side) {
                    for col in c0..(c0 + w).min(side) {
                        paint(&mut u, row, col, value, &mut nonzero);
                    }
                }
            }
            1 => {
                let radius = rng.random_range(1..=max_extent.div_ceil(2)) as isize;
                for dr in -radius..=radius {
                    for dc in -radius..=radius {
                        let (row, col) = (r0 as isize + dr, c0 as isize + dc);
                        if dr * dr + dc * dc <= radius * radius
                            && (0..side as isize).contains(&row)
                            && (0..side as isize).contains(&col)
                        {
                            paint(&mut u, row as usize, col as usize, value, &mut nonzero);
                        }
                    }
                }
            }
            _ => paint(&mut u, r0, c0, value, &mut nonzero),
        }
    }
    u
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DeblurConfig {
    pub side: usize,
    pub blur_length: f64,
    pub noise_level: f64,
    pub seed: u64,
    /// Weight of `1/2 ||u||^2` added to the discrepancy term. The banded
    /// blur matrix is singular for some sizes (e.g. `N = 32, 64` at `L = 0.1`)
    /// and a small ridge keeps the Hessian positive definite.
    pub ridge: f64,
}

impl Default for DeblurConfig {
    fn default() -> Self {
        Self {
            side: 64,
            blur_length: 0.1,
            noise_level: 0.05,
            seed: 0,
            ridge: DEFAULT_RIDGE,
        }
    }
}

/// A synthesized deblurring instance.
#[derive(Debug, Clone)]
pub struct DeblurProblem {
    pub config: DeblurConfig,
    pub operator: BlurOperator,
    pub original: DVector<f64>,
    /// Noise-free data from the Simpson forward model.
    pub blurred: DVector<f64>,
    /// `f^delta`.
    pub data: DVector<f64>,
    objective: Arc<QuadraticObjective>,
}

impl DeblurProblem {
    pub fn synthesize(config: DeblurConfig) -> Result<Self> {
        let original = sparse_test_image(config.side, config.seed);
        Self::from_image(config, original)
    }

    pub fn from_image(config: DeblurConfig, original: DVector<f64>) -> Result<Self> {
        Error::check_len(config.side * config.side, original.len())?;
        let operator = BlurOperator::new(config.side, config.blur_length)?;
        let blurred = forward_blur_simpson(config.side, config.blur_length, &original)?;
        let data = add_relative_noise(&blurred, config.noise_level, config.seed)?;
        let objective = Arc::new(
            QuadraticObjective::new(operator.clone(), data.clone())?.with_ridge(config.ridge)?,
        );
        Ok(Self {
            config,
            operator,
            original,
            blurred,
            data,
            objective,
        })
    }

    pub fn dim(&self) -> usize {
        self.original.len()
    }

    pub fn objective(&self) -> Arc<QuadraticObjective> {
        self.objective.clone()
    }

    /// Uniform weight `w` on every pixel.
    pub fn problem(&self, w: f64, gamma: f64) -> Result<WeightedL1Problem> {
        WeightedL1Problem::from_arc(
            self.objective.clone(),
            WeightVector::uniform(self.dim(), w)?,
            gamma,
        )
    }

    /// `||K u - f^delta||_2`.
    pub fn mismatch(&self, u: &DVector<f64>) -> f64 {
        (self.operator.apply(u) - &self.data).norm()
    }

    /// `||f - f^delta||_2`.
    pub fn noise_norm(&self) -> f64 {
        (&self.blurred - &self.data).norm()
    }
}
