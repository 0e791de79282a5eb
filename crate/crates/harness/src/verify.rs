//! The property-verification suite behind `zospg verify`: kernel moment
//! conditions, closed-form kernel agreement, the kernel-constant envelopes,
//! projection laws, and the surrogate's statistical properties.
//!
//! Every check returns a row; the CLI prints the table and exits nonzero on
//! any failure. The κ envelope `√3 β^(3/2)` is checked as stated even
//! though the constant `κ = Σ c_m²` provably grows like `β³`, so kernels of
//! order ≥ 3 fail that row; the cubic envelope `3 β³` is reported alongside
//! for contrast.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use zospg::diagnostics::{
    estimate_gradient_bias, estimate_second_moment, fit_loglog_slope, mc_gradient_mean,
    second_moment_bound,
};
use zospg::geometry::FeasibleSet;
use zospg::kernel::KernelSpec;
use zospg::linalg;
use zospg::oracle::{anisotropic_quadratic, make_test_suite, separable_quartic, NoiseModel};

pub const TESTED_BETAS: [f64; 8] = [2.0, 2.5, 3.0, 3.5, 4.0, 5.0, 6.0, 7.0];

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        CheckResult {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

/// Moment conditions for one kernel at tolerance 1e-10: `E[K] = 0`,
/// `E[rK] = 1`, `E[r^j K] = 0` for `2 ≤ j ≤ l`.
pub fn moment_check(spec: &KernelSpec) -> Result<(), String> {
    let tol = 1e-10;
    let m0 = spec.moment(0);
    if m0.abs() >= tol {
        return Err(format!("E[K] = {m0:e}"));
    }
    let m1 = spec.moment(1);
    if (m1 - 1.0).abs() >= tol {
        return Err(format!("E[rK] - 1 = {:e}", m1 - 1.0));
    }
    for j in 2..=spec.order() {
        let mj = spec.moment(j);
        if mj.abs() >= tol {
            return Err(format!("E[r^{j} K] = {mj:e}"));
        }
    }
    Ok(())
}

fn closed_form(beta: f64, r: f64) -> f64 {
    if beta <= 3.0 {
        3.0 * r
    } else if beta <= 5.0 {
        15.0 * r / 4.0 * (5.0 - 7.0 * r * r)
    } else {
        105.0 * r / 64.0 * (99.0 * r.powi(4) - 126.0 * r * r + 35.0)
    }
}

fn check_kernel_moments() -> Vec<CheckResult> {
    TESTED_BETAS
        .iter()
        .map(|&beta| {
            let spec = KernelSpec::for_beta(beta).expect("tested betas are valid");
            match moment_check(&spec) {
                Ok(()) => CheckResult::new(
                    format!("kernel moments (beta = {beta})"),
                    true,
                    "E[K] = 0, E[rK] = 1, higher moments vanish at 1e-10",
                ),
                Err(detail) => {
                    CheckResult::new(format!("kernel moments (beta = {beta})"), false, detail)
                }
            }
        })
        .collect()
}

fn check_closed_forms() -> Vec<CheckResult> {
    TESTED_BETAS
        .iter()
        .map(|&beta| {
            let spec = KernelSpec::for_beta(beta).expect("tested betas are valid");
            let mut worst = 0.0f64;
            for i in 0..=1000 {
                let r = -1.0 + 2.0 * i as f64 / 1000.0;
                worst = worst.max((spec.eval(r) - closed_form(beta, r)).abs());
            }
            CheckResult::new(
                format!("closed-form kernel (beta = {beta})"),
                worst < 1e-10,
                format!("max deviation {worst:.2e} on a 1000-point grid"),
            )
        })
        .collect()
}

fn check_constant_bounds() -> Vec<CheckResult> {
    let mut rows = Vec::new();
    for &beta in &TESTED_BETAS {
        let spec = KernelSpec::for_beta(beta).expect("tested betas are valid");
        let kb_bound = 2.0 * 2.0f64.sqrt() * (beta - 1.0);
        rows.push(CheckResult::new(
            format!("kappa_beta envelope (beta = {beta})"),
            spec.kappa_beta() <= kb_bound,
            format!("kappa_beta = {:.6} vs 2sqrt2(beta-1) = {kb_bound:.4}", spec.kappa_beta()),
        ));
        let k_bound = 3.0f64.sqrt() * beta.powf(1.5);
        let cubic = 3.0 * beta.powi(3);
        rows.push(CheckResult::new(
            format!("kappa envelope (beta = {beta})"),
            spec.kappa() <= k_bound,
            format!(
                "kappa = {:.6} vs sqrt3*beta^1.5 = {k_bound:.4} (cubic envelope 3*beta^3 = {cubic:.1} {})",
                spec.kappa(),
                if spec.kappa() <= cubic { "holds" } else { "fails" }
            ),
        ));
    }
    rows
}

fn check_projections() -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(211);
    let sets = [
        FeasibleSet::unit_ball(3),
        FeasibleSet::ball(vec![1.0, -0.5, 0.0], 2.0).expect("valid ball"),
        FeasibleSet::axis_box(vec![-1.0, 0.0, -3.0], vec![1.0, 2.0, 0.0]).expect("valid box"),
    ];
    use rand::Rng;
    for set in &sets {
        for _ in 0..10_000 {
            let x: Vec<f64> = (0..3).map(|_| rng.random_range(-5.0..5.0)).collect();
            let y: Vec<f64> = (0..3).map(|_| rng.random_range(-5.0..5.0)).collect();
            let px = set.project(&x);
            let py = set.project(&y);
            if linalg::dist(&set.project(&px), &px) > 1e-12 {
                return CheckResult::new("projection laws", false, "idempotence violated");
            }
            if linalg::dist(&px, &py) > linalg::dist(&x, &y) + 1e-12 {
                return CheckResult::new("projection laws", false, "nonexpansiveness violated");
            }
        }
    }
    CheckResult::new(
        "projection laws",
        true,
        "idempotent and nonexpansive on 10^4 random pairs per set",
    )
}

fn check_unbiasedness(draws: usize) -> CheckResult {
    let obj = anisotropic_quadratic();
    let kernel = KernelSpec::for_beta(3.0).expect("beta 3");
    let x = [0.3, -0.2, 0.4];
    let grad = obj.grad(&x).expect("quadratic has a gradient");
    let mut rng = ChaCha8Rng::seed_from_u64(223);
    let (mean, se) = mc_gradient_mean(&obj, &kernel, &x, 0.25, draws, &mut rng);
    let z_max = (0..3)
        .map(|i| ((mean[i] - grad[i]) / se[i]).abs())
        .fold(0.0f64, f64::max);
    CheckResult::new(
        "estimator unbiasedness (quadratic, order-2 kernel)",
        z_max <= 4.0,
        format!("max |z| = {z_max:.2} over {draws} paired draws (threshold 4)"),
    )
}

fn check_bias_slope(draws: usize) -> CheckResult {
    let obj = separable_quartic(3, 1.0);
    let kernel = KernelSpec::for_beta(3.0).expect("beta 3");
    let x = [0.4, 0.3, 0.2];
    let taus = [0.4, 0.2, 0.1, 0.05];
    let mut rng = ChaCha8Rng::seed_from_u64(227);
    let norms: Vec<f64> = taus
        .iter()
        .map(|&tau| {
            let (bias, _) = estimate_gradient_bias(&obj, &kernel, &x, tau, draws, 12, &mut rng);
            linalg::norm(&bias)
        })
        .collect();
    let slope = fit_loglog_slope(&taus, &norms);
    CheckResult::new(
        "bias scaling slope (quartic, order-2 kernel)",
        (slope - 2.0).abs() <= 0.3,
        format!("log-log slope {slope:.3} over tau in {taus:?} (target 2.0 +- 0.3)"),
    )
}

fn check_second_moment(draws: usize) -> CheckResult {
    let taus = [0.01, 0.02, 0.05, 0.1, 0.2, 0.5];
    let noises = [
        NoiseModel::None,
        NoiseModel::Gaussian { sigma: 0.01 },
        NoiseModel::AlternatingBias { bias: 0.01 },
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(229);
    let mut noise_rng = ChaCha8Rng::seed_from_u64(230);
    let mut worst_ratio = 0.0f64;
    let mut worst_at = String::new();
    for obj in make_test_suite() {
        let points = [vec![0.5, 0.0, 0.0], vec![0.2, -0.4, 0.6]];
        for beta in [3.0, 5.0] {
            let kernel = KernelSpec::for_beta(beta).expect("valid beta");
            for x in &points {
                let radius = linalg::norm(x) + 0.5;
                let g = obj.lipschitz_on(radius);
                for noise in &noises {
                    for &tau in &taus {
                        let got = estimate_second_moment(
                            &obj, noise, &kernel, x, tau, draws, &mut rng, &mut noise_rng,
                        );
                        let ceiling = second_moment_bound(
                            &kernel,
                            9.0,
                            obj.dim(),
                            g,
                            noise.sigma_effective(),
                            tau,
                        );
                        let ratio = got / ceiling;
                        if ratio > worst_ratio {
                            worst_ratio = ratio;
                            worst_at = format!(
                                "{} beta={beta} tau={tau} noise={noise:?}",
                                obj.name()
                            );
                        }
                    }
                }
            }
        }
    }
    CheckResult::new(
        "second-moment ceiling (c* = 9)",
        worst_ratio <= 1.0,
        format!("worst empirical/bound ratio {worst_ratio:.4} at {worst_at}"),
    )
}

/// Runs the full verification suite. `quick` shrinks the Monte-Carlo sizes
/// by an order of magnitude.
pub fn verify_suite(quick: bool) -> Vec<CheckResult> {
    let (mc_mean, mc_bias, mc_second) = if quick {
        (100_000, 20_000, 20_000)
    } else {
        (1_000_000, 200_000, 100_000)
    };
    let mut rows = Vec::new();
    rows.extend(check_kernel_moments());
    rows.extend(check_closed_forms());
    rows.extend(check_constant_bounds());
    rows.push(check_projections());
    rows.push(check_unbiasedness(mc_mean));
    rows.push(check_bias_slope(mc_bias));
    rows.push(check_second_moment(mc_second));
    rows
}
