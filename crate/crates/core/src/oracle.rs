//! Objectives with metadata, bounded-second-moment noise models, and the
//! two-evaluation noisy query with query accounting.
//!
//! The noise contract is deliberately weak: draws need bounded second moment
//! (`E[ξ²] ≤ σ²`) and independence from the algorithm's randomization, but
//! neither zero mean nor identical distribution. Independence is enforced
//! structurally — a noise draw sees only the query index and its own
//! generator, never the direction or radius draws.

use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::Error;
use crate::linalg;
use crate::Result;

type ValueFn = dyn Fn(&[f64]) -> f64 + Send + Sync;
type GradFn = dyn Fn(&[f64]) -> Vec<f64> + Send + Sync;
type RadiusBoundFn = dyn Fn(f64) -> f64 + Send + Sync;

/// An objective function together with the metadata the optimizer and the
/// bound calculators need.
///
/// `lipschitz_on(rho)` bounds `‖∇f‖` over the origin-centered ball of radius
/// `rho`; the caller evaluates it at the feasible set's extent inflated by
/// the first smoothing radius. `holder_l` is the declared smoothness
/// constant used by schedules (objectives document the region it is valid
/// on). The optimum, when present, is the unconstrained minimizer; error
/// reporting against it is meaningful only when it lies in the feasible set.
#[derive(Clone)]
pub struct Objective {
    name: String,
    dim: usize,
    value: Arc<ValueFn>,
    grad: Option<Arc<GradFn>>,
    gamma: f64,
    holder_l: f64,
    lipschitz: Arc<RadiusBoundFn>,
    optimum: Option<(Vec<f64>, f64)>,
    domain_radius: f64,
}

impl std::fmt::Debug for Objective {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Objective")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("gamma", &self.gamma)
            .field("holder_l", &self.holder_l)
            .field("domain_radius", &self.domain_radius)
            .finish()
    }
}

impl Objective {
    pub fn new(
        name: impl Into<String>,
        dim: usize,
        value: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Objective {
            name: name.into(),
            dim,
            value: Arc::new(value),
            grad: None,
            gamma: 0.0,
            holder_l: 1.0,
            lipschitz: Arc::new(|_| f64::INFINITY),
            optimum: None,
            domain_radius: f64::INFINITY,
        }
    }

    pub fn with_grad(mut self, grad: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static) -> Self {
        self.grad = Some(Arc::new(grad));
        self
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn with_holder_l(mut self, l: f64) -> Self {
        self.holder_l = l;
        self
    }

    pub fn with_lipschitz(mut self, bound: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.lipschitz = Arc::new(bound);
        self
    }

    pub fn with_optimum(mut self, point: Vec<f64>, value: f64) -> Self {
        self.optimum = Some((point, value));
        self
    }

    pub fn with_domain_radius(mut self, radius: f64) -> Self {
        self.domain_radius = radius;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        (self.value)(x)
    }

    pub fn grad(&self, x: &[f64]) -> Option<Vec<f64>> {
        self.grad.as_ref().map(|g| g(x))
    }

    /// Strong-convexity modulus (0 for merely convex objectives).
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Declared smoothness constant for schedule construction.
    pub fn holder_l(&self) -> f64 {
        self.holder_l
    }

    /// Bound on `‖∇f‖` over the origin-centered ball of radius `rho`.
    pub fn lipschitz_on(&self, rho: f64) -> f64 {
        (self.lipschitz)(rho)
    }

    pub fn optimum(&self) -> Option<(&[f64], f64)> {
        self.optimum.as_ref().map(|(x, v)| (x.as_slice(), *v))
    }

    pub fn optimum_value(&self) -> Option<f64> {
        self.optimum.as_ref().map(|(_, v)| *v)
    }

    /// Radius of the origin-centered ball on which evaluation is declared
    /// valid; infinite for the bundled test objectives.
    pub fn domain_radius(&self) -> f64 {
        self.domain_radius
    }

    /// The objective plus the proximal penalty `(gamma/2) ‖x - center‖²`.
    ///
    /// Turns a merely convex objective into a `gamma`-strongly-convex one.
    /// The smoothness constant is unchanged (the penalty is quadratic), the
    /// gradient-norm bound inflates by `gamma (rho + ‖center‖)`, and the
    /// optimum is dropped: the wrapped minimizer differs from the original.
    pub fn regularized(&self, gamma: f64, center: &[f64]) -> Objective {
        assert_eq!(center.len(), self.dim, "regularization center dimension");
        let base_value = Arc::clone(&self.value);
        let c_val = center.to_vec();
        let value = move |x: &[f64]| {
            let mut penalty = 0.0;
            for (xi, ci) in x.iter().zip(&c_val) {
                penalty += (xi - ci) * (xi - ci);
            }
            base_value(x) + 0.5 * gamma * penalty
        };
        let grad = self.grad.as_ref().map(|g| {
            let base_grad = Arc::clone(g);
            let c_grad = center.to_vec();
            Arc::new(move |x: &[f64]| {
                let mut out = base_grad(x);
                for ((oi, xi), ci) in out.iter_mut().zip(x).zip(&c_grad) {
                    *oi += gamma * (xi - ci);
                }
                out
            }) as Arc<GradFn>
        });
        let base_lip = Arc::clone(&self.lipschitz);
        let center_norm = linalg::norm(center);
        Objective {
            name: format!("{}+prox{gamma}", self.name),
            dim: self.dim,
            value: Arc::new(value),
            grad,
            gamma: self.gamma + gamma,
            holder_l: self.holder_l,
            lipschitz: Arc::new(move |rho| base_lip(rho) + gamma * (rho + center_norm)),
            optimum: None,
            domain_radius: self.domain_radius,
        }
    }
}

/// Additive oracle noise with `E[ξ²] ≤ sigma_effective²`.
///
/// The biased variants exercise the non-zero-mean corner of the noise
/// contract: `ConstantBias` always adds `b`, `AlternatingBias` adds `±b` by
/// query-index parity. Neither reads the generator, and none of the variants
/// ever sees the direction or radius draws.
#[derive(Debug, Clone, PartialEq)]
pub enum NoiseModel {
    None,
    Gaussian { sigma: f64 },
    /// Uniform on `[-σ√3, σ√3]`, so the second moment is exactly `σ²`.
    UniformBounded { sigma: f64 },
    ConstantBias { bias: f64 },
    AlternatingBias { bias: f64 },
}

impl NoiseModel {
    /// Smallest `σ` with `E[ξ²] ≤ σ²` for the variant.
    pub fn sigma_effective(&self) -> f64 {
        match self {
            NoiseModel::None => 0.0,
            NoiseModel::Gaussian { sigma } | NoiseModel::UniformBounded { sigma } => sigma.abs(),
            NoiseModel::ConstantBias { bias } | NoiseModel::AlternatingBias { bias } => bias.abs(),
        }
    }

    /// One noise realization. Takes only the query index and the noise
    /// substream; direction/radius randomness is structurally out of reach.
    pub fn draw<R: Rng + ?Sized>(&self, query_index: u64, rng: &mut R) -> f64 {
        match self {
            NoiseModel::None => 0.0,
            NoiseModel::Gaussian { sigma } => sigma * rng.sample::<f64, _>(StandardNormal),
            NoiseModel::UniformBounded { sigma } => {
                let half = sigma.abs() * 3.0f64.sqrt();
                if half == 0.0 {
                    0.0
                } else {
                    rng.random_range(-half..=half)
                }
            }
            NoiseModel::ConstantBias { bias } => *bias,
            NoiseModel::AlternatingBias { bias } => {
                if query_index.is_multiple_of(2) {
                    *bias
                } else {
                    -bias
                }
            }
        }
    }
}

/// Count of oracle evaluations; increments by exactly two per iteration.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct QueryLedger {
    count: u64,
}

impl QueryLedger {
    pub fn new() -> Self {
        QueryLedger::default()
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    fn next_index(&mut self) -> u64 {
        let idx = self.count;
        self.count += 1;
        idx
    }
}

/// The symmetric noisy pair `(f(x⁺) + ξ, f(x⁻) + ξ')` with independent noise
/// draws; charges two queries to the ledger. Points outside the objective's
/// declared domain are a contract violation surfaced as an error.
pub fn noisy_pair<R: Rng + ?Sized>(
    obj: &Objective,
    noise: &NoiseModel,
    x_plus: &[f64],
    x_minus: &[f64],
    iteration: u64,
    noise_rng: &mut R,
    ledger: &mut QueryLedger,
) -> Result<(f64, f64)> {
    for x in [x_plus, x_minus] {
        let norm = linalg::norm(x);
        if norm > obj.domain_radius() * (1.0 + 1e-12) {
            return Err(Error::DomainViolation {
                iteration,
                norm,
                domain: obj.domain_radius(),
            });
        }
    }
    let y = obj.value(x_plus) + noise.draw(ledger.next_index(), noise_rng);
    let y_prime = obj.value(x_minus) + noise.draw(ledger.next_index(), noise_rng);
    Ok((y, y_prime))
}

/// The anisotropic benchmark quadratic `f(x) = x₁²/4 + x₂² + 4 x₃²` on
/// `ℝ³`, minimized at the origin. Strong convexity 1/2 (smallest Hessian
/// eigenvalue); `‖∇f‖ ≤ 8 rho` on the radius-`rho` ball. The cubic Taylor
/// remainder vanishes, so the declared smoothness constant is the
/// conventional schedule input 0.01 rather than a real curvature scale.
pub fn anisotropic_quadratic() -> Objective {
    Objective::new("anisotropic_quadratic", 3, |x| {
        0.25 * x[0] * x[0] + x[1] * x[1] + 4.0 * x[2] * x[2]
    })
    .with_grad(|x| vec![0.5 * x[0], 2.0 * x[1], 8.0 * x[2]])
    .with_gamma(0.5)
    .with_holder_l(0.01)
    .with_lipschitz(|rho| 8.0 * rho)
    .with_optimum(vec![0.0, 0.0, 0.0], 0.0)
}

/// Diagonal quadratic `f(x) = (1/2) Σ λ_i x_i² + Σ b_i x_i` with a
/// configurable spectrum. Requires every `λ_i > 0`; the unconstrained
/// minimizer is `x_i* = -b_i / λ_i`.
pub fn general_quadratic(spectrum: Vec<f64>, linear: Vec<f64>) -> Result<Objective> {
    if spectrum.is_empty() || spectrum.len() != linear.len() {
        return Err(Error::InvalidConfig(
            "quadratic spectrum and linear term must be non-empty and of equal length".into(),
        ));
    }
    if spectrum.iter().any(|l| !(*l > 0.0)) {
        return Err(Error::InvalidConfig(
            "quadratic spectrum must be strictly positive".into(),
        ));
    }
    let dim = spectrum.len();
    let gamma = spectrum.iter().cloned().fold(f64::INFINITY, f64::min);
    let lambda_max = spectrum.iter().cloned().fold(0.0f64, f64::max);
    let opt: Vec<f64> = spectrum
        .iter()
        .zip(&linear)
        .map(|(l, b)| -b / l)
        .collect();
    let opt_value = opt
        .iter()
        .zip(spectrum.iter().zip(&linear))
        .map(|(x, (l, b))| 0.5 * l * x * x + b * x)
        .sum();
    let b_norm = linalg::norm(&linear);
    let (s_val, b_val) = (spectrum.clone(), linear.clone());
    let (s_grad, b_grad) = (spectrum, linear);
    Ok(Objective::new("general_quadratic", dim, move |x| {
        x.iter()
            .zip(s_val.iter().zip(&b_val))
            .map(|(xi, (l, b))| 0.5 * l * xi * xi + b * xi)
            .sum()
    })
    .with_grad(move |x| {
        x.iter()
            .zip(s_grad.iter().zip(&b_grad))
            .map(|(xi, (l, b))| l * xi + b)
            .collect()
    })
    .with_gamma(gamma)
    .with_holder_l(0.01)
    .with_lipschitz(move |rho| lambda_max * rho + b_norm)
    .with_optimum(opt, opt_value))
}

/// Separable quartic `f(x) = Σ x_i⁴ + (gamma/2) ‖x‖²`, minimized at the
/// origin. Its cubic Taylor remainder is genuinely nonzero, which makes it
/// the bias-scaling workhorse. The declared smoothness constant 12 bounds
/// the order-3 remainder ratio `4‖x‖ + ‖u‖` on the radius-2 ball.
pub fn separable_quartic(dim: usize, gamma: f64) -> Objective {
    Objective::new("separable_quartic", dim, move |x| {
        let quartic: f64 = x.iter().map(|xi| xi.powi(4)).sum();
        let sq: f64 = x.iter().map(|xi| xi * xi).sum();
        quartic + 0.5 * gamma * sq
    })
    .with_grad(move |x| x.iter().map(|xi| 4.0 * xi.powi(3) + gamma * xi).collect())
    .with_gamma(gamma)
    .with_holder_l(12.0)
    .with_lipschitz(move |rho| 4.0 * rho.powi(3) + gamma * rho)
    .with_optimum(vec![0.0; dim], 0.0)
}

/// Merely convex `f(x) = ‖x‖⁴` near the origin (`gamma = 0`); the target of
/// the regularization reduction. Smoothness constant 12 on the radius-2
/// ball, as for the separable quartic.
pub fn norm_fourth(dim: usize) -> Objective {
    Objective::new("norm_fourth", dim, |x| {
        let sq: f64 = x.iter().map(|xi| xi * xi).sum();
        sq * sq
    })
    .with_grad(|x| {
        let sq: f64 = x.iter().map(|xi| xi * xi).sum();
        x.iter().map(|xi| 4.0 * sq * xi).collect()
    })
    .with_gamma(0.0)
    .with_holder_l(12.0)
    .with_lipschitz(|rho| 4.0 * rho.powi(3))
    .with_optimum(vec![0.0; dim], 0.0)
}

/// The bundled objectives: the benchmark quadratic, a general quadratic with
/// a mild spectrum, the separable quartic, and the merely convex quartic.
pub fn make_test_suite() -> Vec<Objective> {
    vec![
        anisotropic_quadratic(),
        general_quadratic(vec![0.5, 1.0, 4.0], vec![0.1, 0.0, -0.2])
            .expect("valid bundled spectrum"),
        separable_quartic(3, 1.0),
        norm_fourth(3),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn quadratic_values() {
        let f = anisotropic_quadratic();
        assert_eq!(f.value(&[1.0, 1.0, 1.0]), 5.25);
        assert_eq!(f.value(&[0.5, 0.0, 0.0]), 0.0625);
        assert_eq!(f.value(&[0.0, 0.0, 0.0]), 0.0);
        assert_eq!(f.gamma(), 0.5);
        assert_eq!(f.optimum_value(), Some(0.0));
        assert_eq!(f.lipschitz_on(1.5), 12.0);
    }

    #[test]
    fn noisy_pair_noiseless_and_ledger() {
        let f = anisotropic_quadratic();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut ledger = QueryLedger::new();
        let (y, yp) = noisy_pair(
            &f,
            &NoiseModel::None,
            &[0.5, 0.0, 0.0],
            &[0.0, 0.0, 0.0],
            1,
            &mut rng,
            &mut ledger,
        )
        .unwrap();
        assert_eq!((y, yp), (0.0625, 0.0));
        assert_eq!(ledger.count(), 2);
    }

    #[test]
    fn constant_bias_is_exact() {
        let f = anisotropic_quadratic();
        let noise = NoiseModel::ConstantBias { bias: -0.3 };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut ledger = QueryLedger::new();
        let x = [0.1, 0.2, 0.3];
        let (y, yp) = noisy_pair(&f, &noise, &x, &x, 1, &mut rng, &mut ledger).unwrap();
        assert_eq!(y - f.value(&x), -0.3);
        assert_eq!(yp - f.value(&x), -0.3);
        assert_eq!(noise.sigma_effective(), 0.3);
    }

    #[test]
    fn alternating_bias_flips_by_query_parity() {
        let noise = NoiseModel::AlternatingBias { bias: 0.2 };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(noise.draw(0, &mut rng), 0.2);
        assert_eq!(noise.draw(1, &mut rng), -0.2);
        assert_eq!(noise.draw(7, &mut rng), -0.2);
    }

    #[test]
    fn gaussian_second_moment_within_bound() {
        // sample mean of ξ² over 10⁵ draws stays within the chi-square CLT
        // envelope σ²(1 + 5/√10⁵)
        let sigma = 0.37;
        let noise = NoiseModel::Gaussian { sigma };
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let draws = 100_000;
        let mean_sq: f64 = (0..draws)
            .map(|q| noise.draw(q, &mut rng).powi(2))
            .sum::<f64>()
            / draws as f64;
        assert!(mean_sq <= sigma * sigma * (1.0 + 5.0 / (draws as f64).sqrt()));
    }

    #[test]
    fn uniform_bounded_support_and_moment() {
        let sigma = 0.5;
        let noise = NoiseModel::UniformBounded { sigma };
        let half = sigma * 3.0f64.sqrt();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let draws = 200_000;
        let mut mean_sq = 0.0;
        for q in 0..draws {
            let xi = noise.draw(q, &mut rng);
            assert!(xi.abs() <= half);
            mean_sq += xi * xi;
        }
        mean_sq /= draws as f64;
        assert!((mean_sq - sigma * sigma).abs() < 5e-3);
    }

    #[test]
    fn noise_stream_independent_of_direction_stream() {
        // fixing the noise substream while varying the direction substream
        // must leave the realized noise sequence bitwise identical
        let noise = NoiseModel::Gaussian { sigma: 1.0 };
        let collect = |direction_seed: u64| -> Vec<f64> {
            let mut noise_rng = ChaCha8Rng::seed_from_u64(1234);
            let mut dir_rng = ChaCha8Rng::seed_from_u64(direction_seed);
            (0..200)
                .map(|q| {
                    // interleave direction/radius draws as the optimizer does
                    let _ = crate::geometry::sample_scalar(&mut dir_rng);
                    let _ = crate::geometry::sample_direction(3, &mut dir_rng);
                    noise.draw(q, &mut noise_rng)
                })
                .collect()
        };
        let a = collect(1);
        let b = collect(2);
        assert_eq!(a, b);
    }

    #[test]
    fn gradient_matches_central_differences() {
        let suite = make_test_suite();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let h = 1e-5;
        for obj in &suite {
            for _ in 0..100 {
                let x: Vec<f64> = (0..obj.dim()).map(|_| rng.random_range(-0.9..0.9)).collect();
                let g = obj.grad(&x).expect("suite objectives carry gradients");
                for i in 0..obj.dim() {
                    let mut xp = x.clone();
                    let mut xm = x.clone();
                    xp[i] += h;
                    xm[i] -= h;
                    let fd = (obj.value(&xp) - obj.value(&xm)) / (2.0 * h);
                    assert!(
                        (g[i] - fd).abs() < 1e-6,
                        "{}: coordinate {i}, grad {} vs fd {fd}",
                        obj.name(),
                        g[i]
                    );
                }
            }
        }
    }

    #[test]
    fn strong_convexity_spot_check() {
        // f(z) ≥ f(x) + <∇f(x), z-x> + (γ/2)‖z-x‖² on sampled pairs
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for obj in make_test_suite() {
            if obj.gamma() == 0.0 {
                continue;
            }
            for _ in 0..200 {
                let x: Vec<f64> = (0..obj.dim()).map(|_| rng.random_range(-1.0..1.0)).collect();
                let z: Vec<f64> = (0..obj.dim()).map(|_| rng.random_range(-1.0..1.0)).collect();
                let g = obj.grad(&x).unwrap();
                let dz: Vec<f64> = z.iter().zip(&x).map(|(a, b)| a - b).collect();
                let lower = obj.value(&x)
                    + linalg::dot(&g, &dz)
                    + 0.5 * obj.gamma() * linalg::dot(&dz, &dz);
                assert!(
                    obj.value(&z) >= lower - 1e-9,
                    "{} violates strong convexity",
                    obj.name()
                );
            }
        }
    }

    #[test]
    fn domain_violation_is_reported() {
        let f = anisotropic_quadratic().with_domain_radius(1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut ledger = QueryLedger::new();
        let err = noisy_pair(
            &f,
            &NoiseModel::None,
            &[2.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0],
            3,
            &mut rng,
            &mut ledger,
        )
        .unwrap_err();
        assert!(matches!(err, Error::DomainViolation { iteration: 3, .. }));
        assert_eq!(ledger.count(), 0);
    }

    #[test]
    fn regularized_wrapper_values() {
        let base = norm_fourth(3);
        let center = [0.5, 0.0, 0.0];
        let wrapped = base.regularized(0.1, &center);
        // zero penalty at the center
        assert_eq!(wrapped.value(&center), base.value(&center));
        let x = [0.2, -0.4, 0.1];
        let penalty: f64 = x
            .iter()
            .zip(&center)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        assert!((wrapped.value(&x) - (base.value(&x) + 0.05 * penalty)).abs() < 1e-15);
        assert_eq!(wrapped.gamma(), 0.1);
        // gradient picks up the proximal term
        let g = wrapped.grad(&x).unwrap();
        let gb = base.grad(&x).unwrap();
        for i in 0..3 {
            assert!((g[i] - (gb[i] + 0.1 * (x[i] - center[i]))).abs() < 1e-15);
        }
    }
}
