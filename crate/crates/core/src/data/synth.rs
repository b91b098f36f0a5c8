//! Seeded synthetic shapes with known first Betti numbers.

use std::f64::consts::TAU;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::geometry::PointCloud;

/// Noise used for `noisy_circle` when none is given.
pub const DEFAULT_NOISY_CIRCLE_SIGMA: f64 = 0.05;

/// Distance between the centres of the two unit circles.
pub const TWO_CIRCLES_SEPARATION: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    /// Unit circle, β₁ = 1.
    Circle,
    /// Unit disk sampled uniformly by area, β₁ = 0.
    FilledDisk,
    /// Two disjoint unit circles, β₁ = 2.
    TwoCircles,
    /// Unit circle intended to carry noise.
    NoisyCircle,
    /// Unit cube of dimension `intrinsic_dim` placed isometrically in
    /// `ambient_dim` dimensions, β₁ = 0.
    Hyperplane,
}

impl Shape {
    pub fn name(self) -> &'static str {
        match self {
            Shape::Circle => "circle",
            Shape::FilledDisk => "filled_disk",
            Shape::TwoCircles => "two_circles",
            Shape::NoisyCircle => "noisy_circle",
            Shape::Hyperplane => "hyperplane",
        }
    }
}

impl FromStr for Shape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "circle" => Ok(Shape::Circle),
            "filled_disk" => Ok(Shape::FilledDisk),
            "two_circles" => Ok(Shape::TwoCircles),
            "noisy_circle" => Ok(Shape::NoisyCircle),
            "hyperplane" => Ok(Shape::Hyperplane),
            _ => Err(Error::param(format!("unknown shape {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub shape: Shape,
    pub n_points: usize,
    /// Standard deviation of Gaussian noise added to every coordinate.
    pub noise_sigma: f64,
    /// Output dimension for `Hyperplane`; ignored otherwise.
    pub ambient_dim: usize,
    /// Subspace dimension for `Hyperplane`; ignored otherwise.
    pub intrinsic_dim: usize,
    pub seed: u64,
}

impl SyntheticSpec {
    fn planar(shape: Shape, n_points: usize, noise_sigma: f64, seed: u64) -> Self {
        Self {
            shape,
            n_points,
            noise_sigma,
            ambient_dim: 2,
            intrinsic_dim: 2,
            seed,
        }
    }

    pub fn circle(n_points: usize, noise_sigma: f64, seed: u64) -> Self {
        Self::planar(Shape::Circle, n_points, noise_sigma, seed)
    }

    pub fn noisy_circle(n_points: usize, noise_sigma: f64, seed: u64) -> Self {
        Self::planar(Shape::NoisyCircle, n_points, noise_sigma, seed)
    }

    pub fn filled_disk(n_points: usize, seed: u64) -> Self {
        Self::planar(Shape::FilledDisk, n_points, 0.0, seed)
    }

    pub fn two_circles(n_points: usize, seed: u64) -> Self {
        Self::planar(Shape::TwoCircles, n_points, 0.0, seed)
    }

    pub fn hyperplane(n_points: usize, intrinsic_dim: usize, ambient_dim: usize, seed: u64) -> Self {
        Self {
            shape: Shape::Hyperplane,
            n_points,
            noise_sigma: 0.0,
            ambient_dim,
            intrinsic_dim,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_points == 0 {
            return Err(Error::param("n_points must be at least 1"));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(Error::param(format!(
                "noise sigma must be non-negative, got {}",
                self.noise_sigma
            )));
        }
        if self.shape == Shape::Hyperplane
            && (self.intrinsic_dim == 0 || self.intrinsic_dim > self.ambient_dim)
        {
            return Err(Error::param(format!(
                "hyperplane needs 1 <= intrinsic_dim <= ambient_dim, got {} and {}",
                self.intrinsic_dim, self.ambient_dim
            )));
        }
        Ok(())
    }
}

pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<PointCloud> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.n_points;
    let (mut data, dim) = match spec.shape {
        Shape::Circle | Shape::NoisyCircle => {
            let mut data = Vec::with_capacity(2 * n);
            for _ in 0..n {
                let t: f64 = rng.random_range(0.0..TAU);
                data.extend([t.cos(), t.sin()]);
            }
            (data, 2)
        }
        Shape::FilledDisk => {
            let mut data = Vec::with_capacity(2 * n);
            for _ in 0..n {
                let r = rng.random::<f64>().sqrt();
                let t: f64 = rng.random_range(0.0..TAU);
                data.extend([r * t.cos(), r * t.sin()]);
            }
            (data, 2)
        }
        Shape::TwoCircles => {
            let half = TWO_CIRCLES_SEPARATION / 2.0;
            let first = n.div_ceil(2);
            let mut data = Vec::with_capacity(2 * n);
            for k in 0..n {
                let cx = if k < first { -half } else { half };
                let t: f64 = rng.random_range(0.0..TAU);
                data.extend([cx + t.cos(), t.sin()]);
            }
            (data, 2)
        }
        Shape::Hyperplane => {
            let (k, d) = (spec.intrinsic_dim, spec.ambient_dim);
            let basis = orthonormal_basis(d, k, &mut ChaCha8Rng::seed_from_u64(!spec.seed));
            let mut data = vec![0.0; n * d];
            let mut z = vec![0.0; k];
            for row in data.chunks_exact_mut(d) {
                z.iter_mut().for_each(|v| *v = rng.random::<f64>());
                for (j, zj) in z.iter().enumerate() {
                    for (x, b) in row.iter_mut().zip(&basis[j * d..(j + 1) * d]) {
                        *x += zj * b;
                    }
                }
            }
            (data, d)
        }
    };
    if spec.noise_sigma > 0.0 {
        for v in &mut data {
            let e: f64 = StandardNormal.sample(&mut rng);
            *v += spec.noise_sigma * e;
        }
    }
    PointCloud::new(data, n, dim)
}

/// `k` orthonormal vectors in `ℝ^d` (stored one after another) from
/// Gram–Schmidt on Gaussian draws.
fn orthonormal_basis<R: Rng>(d: usize, k: usize, rng: &mut R) -> Vec<f64> {
    let mut basis: Vec<f64> = Vec::with_capacity(d * k);
    while basis.len() < d * k {
        let mut v: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut *rng)).collect();
        // Two passes keep the result orthogonal to machine precision.
        for _ in 0..2 {
            for b in basis.chunks_exact(d) {
                let dot: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
                v.iter_mut().zip(b).for_each(|(x, y)| *x -= dot * y);
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-8 {
            basis.extend(v.into_iter().map(|x| x / norm));
        }
    }
    basis
}
