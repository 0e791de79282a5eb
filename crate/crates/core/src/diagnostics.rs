//! Empirical estimators for the statistical properties of the gradient
//! surrogate: its Monte-Carlo mean, its bias at a fixed smoothing radius,
//! and its second moment against the theoretical ceiling.
//!
//! These are verification tools, deliberately independent of the optimizer's
//! iteration path: they draw their own randomness and integrate over the
//! radius by quadrature where that kills a variance term for free.

use rand::Rng;

use crate::geometry::sample_direction;
use crate::kernel::KernelSpec;
use crate::linalg;
use crate::oracle::{NoiseModel, Objective};
use crate::quad;

/// Plain Monte-Carlo mean of the surrogate at a fixed point, with
/// per-coordinate standard errors. One paired oracle evaluation per draw,
/// zero noise.
pub fn mc_gradient_mean<R: Rng + ?Sized>(
    obj: &Objective,
    kernel: &KernelSpec,
    x: &[f64],
    tau: f64,
    draws: usize,
    rng: &mut R,
) -> (Vec<f64>, Vec<f64>) {
    let n = obj.dim();
    let mut sum = vec![0.0; n];
    let mut sum_sq = vec![0.0; n];
    for _ in 0..draws {
        let r = crate::geometry::sample_scalar(rng);
        let e = sample_direction(n, rng);
        let x_plus = linalg::offset(x, tau * r, &e);
        let x_minus = linalg::offset(x, -tau * r, &e);
        let scale = n as f64 / (2.0 * tau) * (obj.value(&x_plus) - obj.value(&x_minus)) * kernel.eval(r);
        for i in 0..n {
            let gi = scale * e[i];
            sum[i] += gi;
            sum_sq[i] += gi * gi;
        }
    }
    let m = draws as f64;
    let mean: Vec<f64> = sum.iter().map(|s| s / m).collect();
    let se: Vec<f64> = sum_sq
        .iter()
        .zip(&mean)
        .map(|(sq, mu)| ((sq / m - mu * mu).max(0.0) / m).sqrt())
        .collect();
    (mean, se)
}

/// Estimate of the surrogate bias `E[g] - ∇f(x)` with standard errors.
///
/// The radius integral is done by Gauss-Legendre quadrature (exact for
/// polynomial objectives), leaving a sphere average estimated by Monte
/// Carlo. The known first-order part `n <∇f(x), e> e`, whose sphere mean is
/// exactly `∇f(x)`, is subtracted per draw, so only the genuinely biased
/// remainder carries sampling variance. The integrand is even in `e`, which
/// makes each draw its own antithetic partner.
pub fn estimate_gradient_bias<R: Rng + ?Sized>(
    obj: &Objective,
    kernel: &KernelSpec,
    x: &[f64],
    tau: f64,
    draws: usize,
    quadrature_order: usize,
    rng: &mut R,
) -> (Vec<f64>, Vec<f64>) {
    let n = obj.dim();
    let grad = obj
        .grad(x)
        .expect("bias estimation needs the analytic gradient");
    let (nodes, weights) = quad::gauss_legendre(quadrature_order);
    let mut sum = vec![0.0; n];
    let mut sum_sq = vec![0.0; n];
    for _ in 0..draws {
        let e = sample_direction(n, rng);
        // E_r[(n/2τ)(f(x+τre) - f(x-τre)) K(r)] by quadrature, density 1/2
        let mut radial = 0.0;
        for (&r, &w) in nodes.iter().zip(&weights) {
            let x_plus = linalg::offset(x, tau * r, &e);
            let x_minus = linalg::offset(x, -tau * r, &e);
            radial += w * (obj.value(&x_plus) - obj.value(&x_minus)) * kernel.eval(r);
        }
        let scalar = 0.5 * radial * n as f64 / (2.0 * tau) - n as f64 * linalg::dot(&grad, &e);
        for i in 0..n {
            let vi = scalar * e[i];
            sum[i] += vi;
            sum_sq[i] += vi * vi;
        }
    }
    let m = draws as f64;
    let mean: Vec<f64> = sum.iter().map(|s| s / m).collect();
    let se: Vec<f64> = sum_sq
        .iter()
        .zip(&mean)
        .map(|(sq, mu)| ((sq / m - mu * mu).max(0.0) / m).sqrt())
        .collect();
    (mean, se)
}

/// Monte-Carlo estimate of `E[‖g‖²]` at a fixed point under a noise model.
#[allow(clippy::too_many_arguments)]
pub fn estimate_second_moment<R: Rng + ?Sized>(
    obj: &Objective,
    noise: &NoiseModel,
    kernel: &KernelSpec,
    x: &[f64],
    tau: f64,
    draws: usize,
    rng: &mut R,
    noise_rng: &mut R,
) -> f64 {
    let n = obj.dim();
    let mut total = 0.0;
    for j in 0..draws {
        let r = crate::geometry::sample_scalar(rng);
        let e = sample_direction(n, rng);
        let x_plus = linalg::offset(x, tau * r, &e);
        let x_minus = linalg::offset(x, -tau * r, &e);
        let y = obj.value(&x_plus) + noise.draw(2 * j as u64, noise_rng);
        let y_prime = obj.value(&x_minus) + noise.draw(2 * j as u64 + 1, noise_rng);
        let scale = n as f64 / (2.0 * tau) * (y - y_prime) * kernel.eval(r);
        total += scale * scale; // ‖scale · e‖² with ‖e‖ = 1
    }
    total / draws as f64
}

/// Ceiling `κ (c* n G² + 3 (nσ)² / (2τ²))` for the surrogate second moment.
pub fn second_moment_bound(
    kernel: &KernelSpec,
    c_star: f64,
    dim: usize,
    lipschitz_g: f64,
    sigma: f64,
    tau: f64,
) -> f64 {
    let n = dim as f64;
    kernel.kappa()
        * (c_star * n * lipschitz_g * lipschitz_g
            + 3.0 * (n * sigma).powi(2) / (2.0 * tau * tau))
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn fit_loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    assert!(xs.len() >= 2, "slope fit needs at least two points");
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in lx.iter().zip(&ly) {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    num / den
}
