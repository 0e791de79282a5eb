//! Feasible sets with closed-form Euclidean projection, plus the sampling
//! primitives (uniform sphere directions and uniform scalars on `[-1, 1]`).
//!
//! Sampling is deterministic given the generator state; callers own one
//! seeded generator per run and never share it across threads.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::Error;
use crate::linalg;
use crate::Result;

/// A convex compact feasible set with an exact Euclidean projection.
#[derive(Debug, Clone, PartialEq)]
pub enum FeasibleSet {
    Ball { center: Vec<f64>, radius: f64 },
    Box { lower: Vec<f64>, upper: Vec<f64> },
}

impl FeasibleSet {
    /// Euclidean ball of positive radius.
    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "ball radius must be positive and finite, got {radius}"
            )));
        }
        if center.is_empty() {
            return Err(Error::InvalidConfig("ball center must be non-empty".into()));
        }
        Ok(FeasibleSet::Ball { center, radius })
    }

    /// Unit ball centered at the origin.
    pub fn unit_ball(dim: usize) -> Self {
        FeasibleSet::Ball {
            center: vec![0.0; dim],
            radius: 1.0,
        }
    }

    /// Axis-aligned box with `lower ≤ upper` componentwise.
    pub fn axis_box(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(Error::InvalidConfig(
                "box bounds must be non-empty and of equal dimension".into(),
            ));
        }
        for (i, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if !(lo <= hi) {
                return Err(Error::InvalidConfig(format!(
                    "box bound {i}: lower {lo} exceeds upper {hi}"
                )));
            }
        }
        Ok(FeasibleSet::Box { lower, upper })
    }

    pub fn dim(&self) -> usize {
        match self {
            FeasibleSet::Ball { center, .. } => center.len(),
            FeasibleSet::Box { lower, .. } => lower.len(),
        }
    }

    /// Euclidean-nearest point of the set. Dimension mismatch is a contract
    /// violation.
    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim(), "projection dimension mismatch");
        match self {
            FeasibleSet::Ball { center, radius } => {
                let dist = linalg::dist(x, center);
                if dist <= *radius {
                    x.to_vec()
                } else {
                    let scale = radius / dist;
                    center
                        .iter()
                        .zip(x)
                        .map(|(c, xi)| c + scale * (xi - c))
                        .collect()
                }
            }
            FeasibleSet::Box { lower, upper } => x
                .iter()
                .zip(lower.iter().zip(upper))
                .map(|(xi, (lo, hi))| xi.clamp(*lo, *hi))
                .collect(),
        }
    }

    /// Whether `x` is within `tol` of the set (by projection distance).
    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        linalg::dist(x, &self.project(x)) <= tol
    }

    /// Largest Euclidean norm attained on the set; used to size the domain
    /// the oracle must cover once inflated by the smoothing radius.
    pub fn max_norm(&self) -> f64 {
        match self {
            FeasibleSet::Ball { center, radius } => linalg::norm(center) + radius,
            FeasibleSet::Box { lower, upper } => lower
                .iter()
                .zip(upper)
                .map(|(lo, hi)| lo.abs().max(hi.abs()).powi(2))
                .sum::<f64>()
                .sqrt(),
        }
    }
}

/// A unit vector on the Euclidean sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct Direction(Vec<f64>);

impl Direction {
    /// Wraps an explicit unit vector; rejects vectors whose norm strays from
    /// 1 by more than 1e-12.
    pub fn new(e: Vec<f64>) -> Result<Self> {
        let norm = linalg::norm(&e);
        if e.is_empty() || (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidConfig(format!(
                "direction must be a unit vector, got norm {norm}"
            )));
        }
        Ok(Direction(e))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl std::ops::Deref for Direction {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// Uniform direction on the unit sphere: a standard-normal vector normalized
/// to unit length. The measure-zero all-zeros draw is regenerated.
pub fn sample_direction<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Direction {
    assert!(n >= 1, "direction dimension must be positive");
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let norm = linalg::norm(&v);
        if norm > 0.0 && norm.is_finite() {
            return Direction(v.into_iter().map(|c| c / norm).collect());
        }
    }
}

/// Uniform scalar on `[-1, 1]`.
pub fn sample_scalar<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.random_range(-1.0..=1.0)
}
