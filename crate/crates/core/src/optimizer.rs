//! The zeroth-order stochastic projected gradient loop, its schedules, the
//! regularization reduction for merely convex problems, and the calculators
//! for the theoretical error bound and the iteration budget `N(ε)`.
//!
//! Iteration `k` draws a radius `r_k ~ Uniform[-1,1]` and a direction `e_k`
//! uniform on the sphere, queries the noisy oracle at `x_k ± τ_k r_k e_k`,
//! forms the surrogate `g_k = n/(2τ_k) (y_k - y'_k) K(r_k) e_k`, and steps
//! `x_{k+1} = Π_Q(x_k - α_k g_k)`. Query points may leave the feasible set;
//! the objective's declared domain must cover the set inflated by `τ_1`,
//! which is validated before the run instead of projecting query points.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Error;
use crate::geometry::{sample_direction, sample_scalar, Direction, FeasibleSet};
use crate::kernel::KernelSpec;
use crate::linalg;
use crate::oracle::{noisy_pair, NoiseModel, Objective, QueryLedger};
use crate::Result;

/// Stream ids for the two independent substreams derived from one run seed.
const STREAM_SAMPLING: u64 = 0;
const STREAM_NOISE: u64 = 1;

/// Everything tunable about one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Smoothness order driving the kernel and the schedules; 2 is the
    /// linear-kernel baseline, the main method uses beta > 2.
    pub beta: f64,
    /// Strong-convexity modulus used by the step size.
    pub gamma: f64,
    /// Noise level entering the smoothing schedule.
    pub sigma: f64,
    /// Declared smoothness constant entering the smoothing schedule.
    pub holder_l: f64,
    /// Problem dimension.
    pub dim: usize,
    /// Iteration budget N.
    pub iterations: u64,
    /// Run seed; two substreams (sampling, noise) derive from it.
    pub seed: u64,
    /// Coefficient override for the smoothing schedule; mandatory when
    /// sigma = 0, where the noise-optimal coefficient degenerates to zero.
    pub tau_override: Option<f64>,
    /// Step-size override (replaces 2/(gamma k)); diagnostics only.
    pub alpha_override: Option<f64>,
    /// Constant in the second-moment ceiling; 9 is the conservative default.
    pub c_star: f64,
    /// Iterations between recorded checkpoints.
    pub checkpoint_stride: u64,
    /// Record the iterate at every checkpoint into the trace.
    pub record_iterates: bool,
}

impl RunConfig {
    pub fn new(beta: f64, gamma: f64, sigma: f64, holder_l: f64, dim: usize) -> Self {
        RunConfig {
            beta,
            gamma,
            sigma,
            holder_l,
            dim,
            iterations: 1000,
            seed: 0,
            tau_override: None,
            alpha_override: None,
            c_star: 9.0,
            checkpoint_stride: 100,
            record_iterates: false,
        }
    }

    pub fn with_iterations(mut self, n: u64) -> Self {
        self.iterations = n;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_stride(mut self, stride: u64) -> Self {
        self.checkpoint_stride = stride.max(1);
        self
    }

    pub fn with_tau_override(mut self, coefficient: f64) -> Self {
        self.tau_override = Some(coefficient);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !self.beta.is_finite() || self.beta < 2.0 {
            return Err(Error::InvalidBeta(self.beta));
        }
        if self.iterations == 0 {
            return Err(Error::EmptyBudget);
        }
        if self.alpha_override.is_none() && !(self.gamma > 0.0) {
            return Err(Error::InvalidGamma(self.gamma));
        }
        if self.sigma < 0.0 || !self.sigma.is_finite() {
            return Err(Error::InvalidConfig(format!("sigma must be finite and nonnegative, got {}", self.sigma)));
        }
        if self.sigma == 0.0 && self.tau_override.is_none() {
            return Err(Error::MissingTauOverride);
        }
        if !(self.holder_l > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "smoothness constant must be positive, got {}",
                self.holder_l
            )));
        }
        if !(self.c_star > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "c_star must be positive, got {}",
                self.c_star
            )));
        }
        Ok(())
    }
}

/// Coefficient of the smoothing schedule: tau_k = coefficient · k^(-1/(2β)).
///
/// With sigma > 0 this is the noise-optimal value
/// `(3 κ σ² n / (2 (β-1) (κ_β L)²))^(1/(2β))`; with sigma = 0 the formula
/// degenerates and an explicit override is required.
pub fn tau_coefficient(cfg: &RunConfig, kernel: &KernelSpec) -> Result<f64> {
    if let Some(coefficient) = cfg.tau_override {
        if !(coefficient > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "tau_override must be positive, got {coefficient}"
            )));
        }
        return Ok(coefficient);
    }
    if cfg.sigma == 0.0 {
        return Err(Error::MissingTauOverride);
    }
    let beta = cfg.beta;
    let numerator = 3.0 * kernel.kappa() * cfg.sigma * cfg.sigma * cfg.dim as f64;
    let denominator = 2.0 * (beta - 1.0) * (kernel.kappa_beta() * cfg.holder_l).powi(2);
    Ok((numerator / denominator).powf(1.0 / (2.0 * beta)))
}

/// Smoothing radius at iteration `k ≥ 1`.
pub fn tau_schedule(cfg: &RunConfig, kernel: &KernelSpec, k: u64) -> Result<f64> {
    debug_assert!(k >= 1);
    let coefficient = tau_coefficient(cfg, kernel)?;
    Ok(coefficient * (k as f64).powf(-1.0 / (2.0 * cfg.beta)))
}

/// Step size at iteration `k ≥ 1`: exactly `2 / (gamma k)` unless overridden.
pub fn alpha_schedule(cfg: &RunConfig, k: u64) -> Result<f64> {
    debug_assert!(k >= 1);
    if let Some(alpha) = cfg.alpha_override {
        return Ok(alpha);
    }
    if !(cfg.gamma > 0.0) {
        return Err(Error::InvalidGamma(cfg.gamma));
    }
    Ok(2.0 / (cfg.gamma * k as f64))
}

/// The gradient surrogate `n/(2τ) (y - y') K(r) e`.
pub fn gradient_estimate(
    dim: usize,
    tau: f64,
    y: f64,
    y_prime: f64,
    e: &Direction,
    kernel_value: f64,
) -> Vec<f64> {
    debug_assert!(tau > 0.0);
    debug_assert_eq!(e.len(), dim);
    let scale = dim as f64 / (2.0 * tau) * (y - y_prime) * kernel_value;
    e.iter().map(|ei| scale * ei).collect()
}

/// One recorded point along a run.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub iteration: u64,
    /// `f(avg_k) - f*` when the reporting objective declares an optimum.
    pub avg_error: Option<f64>,
    /// Best single-iterate error seen so far (diagnostic companion to the
    /// averaged error; reporting uses the average).
    pub best_error: Option<f64>,
    pub queries: u64,
}

/// Full record of one run.
#[derive(Debug, Clone)]
pub struct Trace {
    pub checkpoints: Vec<Checkpoint>,
    pub final_point: Vec<f64>,
    pub final_average: Vec<f64>,
    pub final_avg_error: Option<f64>,
    pub best_error: Option<f64>,
    pub queries: u64,
    pub wall_seconds: f64,
    /// `(k, x_k)` at checkpoint stride when `record_iterates` is set.
    pub iterates: Vec<(u64, Vec<f64>)>,
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Runs the zeroth-order stochastic projected gradient method.
///
/// Requires `x0` in the set and the objective evaluable on the set inflated
/// by the first smoothing radius. Every produced iterate lies in the set.
pub fn run_zospg(
    cfg: &RunConfig,
    obj: &Objective,
    set: &FeasibleSet,
    noise: &NoiseModel,
    x0: &[f64],
) -> Result<Trace> {
    run_with(cfg, obj, obj, set, noise, x0)
}

/// Regularization reduction for merely convex objectives: wraps `obj` as
/// `f(x) + (gamma/2)‖x - x0‖²` with `gamma = eps / radius²`, runs the
/// strongly convex method on the wrapped objective, and reports errors
/// against the ORIGINAL objective.
///
/// `radius` must dominate `‖x0 - x*‖`; this is checked when the optimum is
/// known.
pub fn run_regularized(
    cfg: &RunConfig,
    obj: &Objective,
    set: &FeasibleSet,
    noise: &NoiseModel,
    x0: &[f64],
    eps: f64,
    radius: f64,
) -> Result<Trace> {
    if !(eps > 0.0) || !(radius > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "regularized run needs eps > 0 and radius > 0, got eps = {eps}, radius = {radius}"
        )));
    }
    if let Some((x_star, _)) = obj.optimum() {
        let dist = linalg::dist(x0, x_star);
        if dist > radius * (1.0 + 1e-12) {
            return Err(Error::InvalidConfig(format!(
                "radius {radius} does not cover the start-to-optimum distance {dist}"
            )));
        }
    }
    let gamma = eps / (radius * radius);
    let wrapped = obj.regularized(gamma, x0);
    let mut run_cfg = cfg.clone();
    run_cfg.gamma = obj.gamma() + gamma;
    run_with(&run_cfg, &wrapped, obj, set, noise, x0)
}

/// Shared loop: queries `query_obj`, reports errors against `report_obj`.
fn run_with(
    cfg: &RunConfig,
    query_obj: &Objective,
    report_obj: &Objective,
    set: &FeasibleSet,
    noise: &NoiseModel,
    x0: &[f64],
) -> Result<Trace> {
    cfg.validate()?;
    let n = set.dim();
    assert_eq!(cfg.dim, n, "config dimension does not match the set");
    assert_eq!(query_obj.dim(), n, "objective dimension does not match the set");
    assert_eq!(x0.len(), n, "starting point dimension does not match the set");

    let kernel = KernelSpec::for_beta(cfg.beta)?;
    let tau_first = tau_schedule(cfg, &kernel, 1)?;

    let needed = set.max_norm() + tau_first;
    if needed > query_obj.domain_radius() * (1.0 + 1e-12) {
        return Err(Error::DomainTooSmall {
            domain: query_obj.domain_radius(),
            needed,
        });
    }
    let start_gap = linalg::dist(x0, &set.project(x0));
    if start_gap > 1e-9 {
        return Err(Error::StartOutsideSet(start_gap));
    }

    let start = Instant::now();
    let mut sampling_rng = rng_for(cfg.seed, STREAM_SAMPLING);
    let mut noise_rng = rng_for(cfg.seed, STREAM_NOISE);
    let mut ledger = QueryLedger::new();

    let f_star = report_obj.optimum_value();
    let mut x = x0.to_vec();
    let mut average = vec![0.0; n];
    let mut best_error: Option<f64> = None;
    let mut checkpoints = Vec::new();
    let mut iterates = Vec::new();

    for k in 1..=cfg.iterations {
        // running average over x_1..x_k
        let inv_k = 1.0 / k as f64;
        for (ai, xi) in average.iter_mut().zip(&x) {
            *ai += (xi - *ai) * inv_k;
        }
        if let Some(fs) = f_star {
            let err = report_obj.value(&x) - fs;
            best_error = Some(best_error.map_or(err, |b: f64| b.min(err)));
        }
        if cfg.record_iterates && k.is_multiple_of(cfg.checkpoint_stride) {
            iterates.push((k, x.clone()));
        }

        let tau = tau_schedule(cfg, &kernel, k)?;
        let alpha = alpha_schedule(cfg, k)?;
        let r = sample_scalar(&mut sampling_rng);
        let e = sample_direction(n, &mut sampling_rng);
        let x_plus = linalg::offset(&x, tau * r, &e);
        let x_minus = linalg::offset(&x, -tau * r, &e);
        let (y, y_prime) = noisy_pair(query_obj, noise, &x_plus, &x_minus, k, &mut noise_rng, &mut ledger)?;
        if !y.is_finite() || !y_prime.is_finite() {
            return Err(Error::NonFiniteValue { iteration: k });
        }
        let estimate = gradient_estimate(n, tau, y, y_prime, &e, kernel.eval(r));
        linalg::add_scaled(&mut x, -alpha, &estimate);
        x = set.project(&x);

        if k.is_multiple_of(cfg.checkpoint_stride) {
            checkpoints.push(Checkpoint {
                iteration: k,
                avg_error: f_star.map(|fs| report_obj.value(&average) - fs),
                best_error,
                queries: ledger.count(),
            });
        }
    }

    Ok(Trace {
        final_avg_error: f_star.map(|fs| report_obj.value(&average) - fs),
        final_point: x,
        final_average: average,
        best_error,
        queries: ledger.count(),
        wall_seconds: start.elapsed().as_secs_f64(),
        checkpoints,
        iterates,
    })
}

/// Right-hand side of the strongly convex error bound at horizon `N`:
///
/// ```text
/// (1/γ) ( n^(2-1/β) A₁ / N^((β-1)/β) + A₂ n (1 + ln N) / N )
/// A₁ = 3 β (κ σ²)^((β-1)/β) (κ_β L)^(2/β),     A₂ = c* κ G²
/// ```
///
/// `lipschitz_g` bounds the gradient norm on the `τ_1`-inflated feasible
/// set. With the default `c_star = 9` the bound is conservative.
pub fn theoretical_bound(
    cfg: &RunConfig,
    kernel: &KernelSpec,
    lipschitz_g: f64,
    horizon: u64,
) -> f64 {
    let beta = cfg.beta;
    let n = cfg.dim as f64;
    let horizon = horizon.max(1) as f64;
    let a1 = 3.0
        * beta
        * (kernel.kappa() * cfg.sigma * cfg.sigma).powf((beta - 1.0) / beta)
        * (kernel.kappa_beta() * cfg.holder_l).powf(2.0 / beta);
    let a2 = cfg.c_star * kernel.kappa() * lipschitz_g * lipschitz_g;
    (n.powf(2.0 - 1.0 / beta) * a1 / horizon.powf((beta - 1.0) / beta)
        + a2 * n * (1.0 + horizon.ln()) / horizon)
        / cfg.gamma
}

/// Smallest `c'` with `1 + ln N ≤ c' N^(ρ/(ρ+1))` over `N ∈ [1, 10¹²]`,
/// found by one-dimensional maximization of `(1 + ln N) / N^(ρ/(ρ+1))`.
pub fn log_growth_constant(rho: f64) -> f64 {
    assert!(rho > 0.0, "rho must be positive");
    let s = rho / (rho + 1.0);
    let g = |t: f64| (1.0 + t) * (-s * t).exp(); // t = ln N
    let (mut lo, mut hi) = (0.0f64, (1e12f64).ln());
    // golden-section search; g is unimodal in t
    let phi = 0.5 * (5.0f64.sqrt() - 1.0);
    let (mut a, mut b) = (hi - phi * (hi - lo), lo + phi * (hi - lo));
    let (mut ga, mut gb) = (g(a), g(b));
    for _ in 0..200 {
        if ga < gb {
            lo = a;
            a = b;
            ga = gb;
            b = lo + phi * (hi - lo);
            gb = g(b);
        } else {
            hi = b;
            b = a;
            gb = ga;
            a = hi - phi * (hi - lo);
            ga = g(a);
        }
    }
    g(0.5 * (lo + hi)).max(g(0.0))
}

/// Iteration budget sufficient for error `eps` on a merely convex problem
/// solved through the regularization reduction:
///
/// ```text
/// N(ε) = max{ (R√(2A₁))^(2β/(β-1)) n^(2+1/(β-1)) / ε^(2+2/(β-1)),
///             (R√(2c'A₂))^(2(1+ρ)) n^(1+ρ) / ε^(2(1+ρ)) }
/// ```
///
/// `c_prime` defaults to [`log_growth_constant`] at the given `rho`, which
/// makes `1 + ln N ≤ c' N^(ρ/(ρ+1))` hold on the returned value by
/// construction.
pub fn n_epsilon(
    cfg: &RunConfig,
    kernel: &KernelSpec,
    lipschitz_g: f64,
    eps: f64,
    radius: f64,
    rho: f64,
    c_prime: Option<f64>,
) -> Result<u64> {
    if !(eps > 0.0) || !(rho > 0.0) || !(radius > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "n_epsilon needs eps > 0, rho > 0, radius > 0; got {eps}, {rho}, {radius}"
        )));
    }
    let beta = cfg.beta;
    let n = cfg.dim as f64;
    let c_prime = c_prime.unwrap_or_else(|| log_growth_constant(rho));
    let a1 = 3.0
        * beta
        * (kernel.kappa() * cfg.sigma * cfg.sigma).powf((beta - 1.0) / beta)
        * (kernel.kappa_beta() * cfg.holder_l).powf(2.0 / beta);
    let a2 = cfg.c_star * kernel.kappa() * lipschitz_g * lipschitz_g;
    let branch_smooth = (radius * (2.0 * a1).sqrt()).powf(2.0 * beta / (beta - 1.0))
        * n.powf(2.0 + 1.0 / (beta - 1.0))
        / eps.powf(2.0 + 2.0 / (beta - 1.0));
    let branch_log = (radius * (2.0 * c_prime * a2).sqrt()).powf(2.0 * (1.0 + rho))
        * n.powf(1.0 + rho)
        / eps.powf(2.0 * (1.0 + rho));
    let mut budget = branch_smooth.max(branch_log).ceil().max(1.0) as u64;
    // c' maximizes the ratio globally, so this can only fire on round-off
    while (1.0 + (budget as f64).ln()) > c_prime * (budget as f64).powf(rho / (rho + 1.0)) {
        budget *= 2;
    }
    Ok(budget)
}
