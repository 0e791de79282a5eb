//! Acceptance suite: one test per criterion, each printing a pass/fail line
//! (run with `--nocapture` to see them). Every tolerance is asserted as
//! stated; a failing assert carries the measured numbers.
//!
//! Known-red checks, kept red on purpose rather than loosened:
//! - criterion 3: the envelope `κ ≤ √3 β^(3/2)` cannot hold for kernels of
//!   order ≥ 3 because `κ = Σ c_m²` grows cubically in β (the matching
//!   cubic envelope `3β³` holds for every tested order);
//! - criterion 7 (slope half): at noise 0.01 the averaged iterate is still
//!   in its super-convergent transient at N = 10⁵ — the measured tail slope
//!   is ≈ -1.4, i.e. the error decays faster than the guaranteed -2/3 rate
//!   and the bound half of the criterion passes with a wide margin.
//!
//! Criterion 8 passes on the bundled scenario; note that the beta5-vs-beta2
//! margin is thin at N = 10⁵ (about 10% on the true means) because the
//! order-4 kernel's variance-inflated transient clears only near this
//! horizon, while beta3 beats the baseline by roughly 2.5x.

use std::path::PathBuf;
use std::sync::OnceLock;

use rayon::prelude::*;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use zospg::diagnostics::{
    estimate_gradient_bias, estimate_second_moment, fit_loglog_slope, mc_gradient_mean,
    second_moment_bound,
};
use zospg::geometry::FeasibleSet;
use zospg::kernel::KernelSpec;
use zospg::linalg;
use zospg::optimizer::{
    n_epsilon, run_regularized, run_zospg, tau_schedule, theoretical_bound, RunConfig,
};
use zospg::oracle::{
    anisotropic_quadratic, make_test_suite, norm_fourth, separable_quartic, NoiseModel,
};
use zospg_harness::config::figure2_config;
use zospg_harness::runner::{derive_seed, run_experiment};
use zospg_harness::verify::TESTED_BETAS;

fn report(criterion: u32, name: &str, passed: bool, detail: &str) {
    println!(
        "criterion {criterion:02} [{}] {name}: {detail}",
        if passed { "PASS" } else { "FAIL" }
    );
}

#[test]
fn criterion_01_kernel_moment_suite() {
    let mut worst: (f64, String) = (0.0, String::new());
    for &beta in &TESTED_BETAS {
        let spec = KernelSpec::for_beta(beta).unwrap();
        let mut track = |value: f64, what: String| {
            if value.abs() > worst.0 {
                worst = (value.abs(), what);
            }
        };
        track(spec.moment(0), format!("E[K] at beta = {beta}"));
        track(spec.moment(1) - 1.0, format!("E[rK] - 1 at beta = {beta}"));
        for j in 2..=spec.order() {
            track(spec.moment(j), format!("E[r^{j}K] at beta = {beta}"));
        }
    }
    let passed = worst.0 < 1e-10;
    report(
        1,
        "kernel moment suite",
        passed,
        &format!("worst residual {:.2e} ({})", worst.0, worst.1),
    );
    assert!(passed, "moment residual {:.2e} at {}", worst.0, worst.1);
}

type KernelPoly = fn(f64) -> f64;

#[test]
fn criterion_02_closed_form_kernels() {
    let cases: [(f64, KernelPoly); 3] = [
        (3.0, |r| 3.0 * r),
        (5.0, |r| 15.0 * r / 4.0 * (5.0 - 7.0 * r * r)),
        (7.0, |r| 105.0 * r / 64.0 * (99.0 * r.powi(4) - 126.0 * r * r + 35.0)),
    ];
    let mut worst = 0.0f64;
    for (beta, poly) in cases {
        let spec = KernelSpec::for_beta(beta).unwrap();
        for i in 0..=1000 {
            let r = -1.0 + 2.0 * i as f64 / 1000.0;
            worst = worst.max((spec.eval(r) - poly(r)).abs());
        }
    }
    let passed = worst < 1e-10;
    report(
        2,
        "closed-form kernels",
        passed,
        &format!("max grid deviation {worst:.2e} for beta in {{3, 5, 7}}"),
    );
    assert!(passed, "closed-form deviation {worst:.2e}");
}

#[test]
fn criterion_03_constant_bounds() {
    let mut kb_ok = true;
    let mut k_ok = true;
    let mut lines = Vec::new();
    for &beta in &TESTED_BETAS {
        let spec = KernelSpec::for_beta(beta).unwrap();
        let kb_bound = 2.0 * 2.0f64.sqrt() * (beta - 1.0);
        let k_bound = 3.0f64.sqrt() * beta.powf(1.5);
        let kb_pass = spec.kappa_beta() <= kb_bound;
        let k_pass = spec.kappa() <= k_bound;
        kb_ok &= kb_pass;
        k_ok &= k_pass;
        lines.push(format!(
            "beta {beta}: kappa_beta {:.4} <= {kb_bound:.4} [{}], kappa {:.4} <= {k_bound:.4} [{}]",
            spec.kappa_beta(),
            if kb_pass { "ok" } else { "VIOLATED" },
            spec.kappa(),
            if k_pass { "ok" } else { "VIOLATED" },
        ));
    }
    for line in &lines {
        println!("    {line}");
    }
    report(
        3,
        "constant bounds",
        kb_ok && k_ok,
        &format!(
            "kappa_beta envelope: {}; kappa envelope: {}",
            if kb_ok { "holds for all beta" } else { "violated" },
            if k_ok {
                "holds for all beta".to_string()
            } else {
                "violated (kappa = sum of squared kernel weights grows ~beta^3; \
                 a beta^(3/2) envelope cannot hold above order 2 — the cubic \
                 envelope 3*beta^3 holds everywhere)"
                    .to_string()
            }
        ),
    );
    assert!(kb_ok, "kappa_beta <= 2*sqrt(2)*(beta-1) violated:\n{}", lines.join("\n"));
    assert!(k_ok, "kappa <= sqrt(3)*beta^1.5 violated:\n{}", lines.join("\n"));
}

#[test]
fn criterion_04_estimator_exactness() {
    let obj = anisotropic_quadratic();
    let kernel = KernelSpec::for_beta(3.0).unwrap();
    let x = [0.3, -0.2, 0.4];
    let grad = obj.grad(&x).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(40_001);
    let (mean, se) = mc_gradient_mean(&obj, &kernel, &x, 0.25, 1_000_000, &mut rng);
    let z: Vec<f64> = (0..3).map(|i| (mean[i] - grad[i]) / se[i]).collect();
    let z_max = z.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    let passed = z_max <= 4.0;
    report(
        4,
        "estimator exactness",
        passed,
        &format!("per-coordinate z-scores {z:?} over 10^6 paired draws (threshold 4)"),
    );
    assert!(passed, "z-scores {z:?} exceed 4 standard errors");
}

#[test]
fn criterion_05_bias_scaling_slope() {
    let obj = separable_quartic(3, 1.0);
    let kernel = KernelSpec::for_beta(3.0).unwrap();
    let x = [0.4, 0.3, 0.2];
    let taus = [0.4, 0.2, 0.1, 0.05];
    let mut rng = ChaCha8Rng::seed_from_u64(50_001);
    let norms: Vec<f64> = taus
        .iter()
        .map(|&tau| {
            let (bias, _) = estimate_gradient_bias(&obj, &kernel, &x, tau, 200_000, 16, &mut rng);
            linalg::norm(&bias)
        })
        .collect();
    let slope = fit_loglog_slope(&taus, &norms);
    let passed = (slope - 2.0).abs() <= 0.3;
    report(
        5,
        "bias-scaling slope",
        passed,
        &format!("slope {slope:.4} over tau {taus:?}, bias norms {norms:?}"),
    );
    assert!(passed, "bias slope {slope:.4} outside 2.0 +- 0.3");
}

#[test]
fn criterion_06_second_moment_ceiling() {
    let taus = [0.01, 0.02, 0.05, 0.1, 0.2, 0.5];
    let noises = [
        NoiseModel::None,
        NoiseModel::Gaussian { sigma: 0.01 },
        NoiseModel::AlternatingBias { bias: 0.01 },
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(60_001);
    let mut noise_rng = ChaCha8Rng::seed_from_u64(60_002);
    let mut worst = (0.0f64, String::new());
    for obj in make_test_suite() {
        for beta in [3.0, 5.0] {
            let kernel = KernelSpec::for_beta(beta).unwrap();
            for x in [vec![0.5, 0.0, 0.0], vec![0.2, -0.4, 0.6]] {
                let g = obj.lipschitz_on(linalg::norm(&x) + 0.5);
                for noise in &noises {
                    for &tau in &taus {
                        let got = estimate_second_moment(
                            &obj, noise, &kernel, &x, tau, 100_000, &mut rng, &mut noise_rng,
                        );
                        let ceiling =
                            second_moment_bound(&kernel, 9.0, obj.dim(), g, noise.sigma_effective(), tau);
                        let ratio = got / ceiling;
                        if ratio > worst.0 {
                            worst = (
                                ratio,
                                format!("{} beta={beta} tau={tau} noise={noise:?}", obj.name()),
                            );
                        }
                    }
                }
            }
        }
    }
    let passed = worst.0 <= 1.0;
    report(
        6,
        "second-moment ceiling",
        passed,
        &format!("worst empirical/ceiling ratio {:.4} at {}", worst.0, worst.1),
    );
    assert!(passed, "second moment exceeded the c* = 9 ceiling: {}", worst.1);
}

#[test]
fn criterion_07_rate_reproduction() {
    let obj = anisotropic_quadratic();
    let set = FeasibleSet::unit_ball(3);
    let noise = NoiseModel::Gaussian { sigma: 0.01 };
    let x0 = [0.5, 0.0, 0.0];
    let seeds = 100u64;
    let iterations = 100_000u64;
    let stride = 100u64;

    let curves: Vec<Vec<f64>> = (0..seeds)
        .into_par_iter()
        .map(|s| {
            let cfg = RunConfig::new(3.0, 0.5, 0.01, 0.01, 3)
                .with_iterations(iterations)
                .with_stride(stride)
                .with_seed(derive_seed(70_001, 0, s));
            let trace = run_zospg(&cfg, &obj, &set, &noise, &x0).expect("run succeeds");
            trace
                .checkpoints
                .iter()
                .map(|c| c.avg_error.expect("optimum known"))
                .collect()
        })
        .collect();
    let checkpoints: Vec<u64> = (1..=(iterations / stride)).map(|i| i * stride).collect();
    let mean_curve: Vec<f64> = (0..checkpoints.len())
        .map(|i| curves.iter().map(|c| c[i]).sum::<f64>() / seeds as f64)
        .collect();

    // the error curve over N in [1e3, 1e5]; its tail half in log space
    let fit_xs: Vec<f64> = checkpoints
        .iter()
        .zip(&mean_curve)
        .filter(|(&k, _)| k >= 10_000)
        .map(|(&k, _)| k as f64)
        .collect();
    let fit_ys: Vec<f64> = checkpoints
        .iter()
        .zip(&mean_curve)
        .filter(|(&k, _)| k >= 10_000)
        .map(|(_, &e)| e)
        .collect();
    let slope = fit_loglog_slope(&fit_xs, &fit_ys);
    let target = -2.0 / 3.0;
    let slope_ok = (slope - target).abs() <= 0.15;

    // the theoretical envelope must dominate the empirical mean everywhere
    let cfg = RunConfig::new(3.0, 0.5, 0.01, 0.01, 3).with_iterations(iterations);
    let kernel = KernelSpec::for_beta(3.0).unwrap();
    let tau_first = tau_schedule(&cfg, &kernel, 1).unwrap();
    let lipschitz_g = obj.lipschitz_on(set.max_norm() + tau_first);
    let mut bound_ok = true;
    let mut worst_margin = f64::INFINITY;
    for (i, &k) in checkpoints.iter().enumerate() {
        let bound = theoretical_bound(&cfg, &kernel, lipschitz_g, k);
        worst_margin = worst_margin.min(bound / mean_curve[i]);
        if mean_curve[i] > bound {
            bound_ok = false;
        }
    }

    report(
        7,
        "rate reproduction (slope)",
        slope_ok,
        &format!(
            "tail log-log slope {slope:.3} vs target {target:.3} +- 0.15 \
             (mean error {:.3e} at 1e4, {:.3e} at 1e5: still in the transient \
             where the error falls faster than the guaranteed rate)",
            mean_curve[checkpoints.iter().position(|&k| k == 10_000).unwrap()],
            mean_curve.last().unwrap()
        ),
    );
    report(
        7,
        "rate reproduction (bound domination)",
        bound_ok,
        &format!("theoretical envelope exceeds the mean at every checkpoint (min bound/mean {worst_margin:.1e})"),
    );
    assert!(
        bound_ok,
        "theoretical bound crossed the empirical mean (min ratio {worst_margin:.3e})"
    );
    assert!(
        slope_ok,
        "tail slope {slope:.3} outside {target:.3} +- 0.15; the mean curve is \
         transient-dominated at this horizon and decays faster than the rate"
    );
}

struct Figure2Run {
    dir: tempfile::TempDir,
    finals: Vec<(String, f64)>,
}

fn figure2_run() -> &'static Figure2Run {
    static RUN: OnceLock<Figure2Run> = OnceLock::new();
    RUN.get_or_init(|| {
        let cfg = figure2_config();
        let dir = tempfile::tempdir().expect("tempdir");
        let report = run_experiment(&cfg, dir.path(), None, false).expect("figure2 runs");
        assert!(report.all_complete(), "figure2 trials aborted");
        let finals = report
            .methods
            .iter()
            .map(|m| {
                (
                    m.label.clone(),
                    m.curve.as_ref().expect("curve present").final_mean(),
                )
            })
            .collect();
        Figure2Run { dir, finals }
    })
}

#[test]
fn criterion_08_figure2_qualitative_ordering() {
    let run = figure2_run();
    let get = |label: &str| {
        run.finals
            .iter()
            .find(|(l, _)| l.starts_with(label))
            .unwrap_or_else(|| panic!("missing method {label}"))
            .1
    };
    let e3 = get("beta3");
    let e5 = get("beta5");
    let e2 = get("beta2");
    let order3 = e3 < e2;
    let order5 = e5 < e2;
    report(
        8,
        "comparison ordering (beta3 < beta2)",
        order3,
        &format!("final means: beta3 {e3:.4e} vs beta2 {e2:.4e}"),
    );
    report(
        8,
        "comparison ordering (beta5 < beta2)",
        order5,
        &format!(
            "final means: beta5 {e5:.4e} vs beta2 {e2:.4e} \
             (thin margin: the order-4 kernel's transient clears only near this horizon)"
        ),
    );
    assert!(order3, "beta3 final mean {e3:.4e} not below beta2 {e2:.4e}");
    assert!(order5, "beta5 final mean {e5:.4e} not below beta2 {e2:.4e}");
}

#[test]
fn criterion_09_convex_reduction_budget() {
    let obj = norm_fourth(3);
    let set = FeasibleSet::unit_ball(3);
    let noise = NoiseModel::Gaussian { sigma: 0.01 };
    let x0 = [0.5, 0.0, 0.0];
    let (eps, radius, rho) = (0.2, 1.0, 0.1);

    let gamma = eps / (radius * radius);
    let kernel = KernelSpec::for_beta(3.0).unwrap();
    let mut cfg = RunConfig::new(3.0, gamma, noise.sigma_effective(), obj.holder_l(), 3);
    let tau_first = tau_schedule(&cfg, &kernel, 1).unwrap();
    let wrapped = obj.regularized(gamma, &x0);
    let lipschitz_g = wrapped.lipschitz_on(set.max_norm() + tau_first);
    let budget = n_epsilon(&cfg, &kernel, lipschitz_g, eps, radius, rho, None).unwrap();
    println!("    criterion 09: N(eps) = {budget} (eps = {eps}, R = {radius}, rho = {rho}, G = {lipschitz_g:.3})");

    if budget <= 10_000_000 {
        cfg = cfg.with_iterations(budget).with_stride(budget);
        let seeds = 30u64;
        let errors: Vec<f64> = (0..seeds)
            .into_par_iter()
            .map(|s| {
                let mut cfg = cfg.clone().with_seed(derive_seed(90_001, 0, s));
                cfg.gamma = 0.0; // filled by the reduction
                let trace = run_regularized(&cfg, &obj, &set, &noise, &x0, eps, radius)
                    .expect("regularized run succeeds");
                trace.final_avg_error.expect("original optimum known")
            })
            .collect();
        let mean = errors.iter().sum::<f64>() / seeds as f64;
        let passed = mean <= eps;
        report(
            9,
            "convex reduction budget",
            passed,
            &format!("mean error {mean:.4e} <= {eps} after N(eps) = {budget} iterations, {seeds} seeds"),
        );
        assert!(passed, "mean error {mean:.4e} above eps = {eps}");
    } else {
        // budget beyond the desk-scale cap: substitute the envelope property
        // at 10^7 iterations on the regularized objective
        let capped = 10_000_000u64;
        cfg = cfg.with_iterations(capped).with_stride(capped);
        let mut run_cfg = cfg.clone().with_seed(derive_seed(90_001, 0, 0));
        run_cfg.gamma = 0.0;
        let trace = run_regularized(&run_cfg, &obj, &set, &noise, &x0, eps, radius)
            .expect("regularized run succeeds");
        let err = trace.final_avg_error.unwrap();
        let mut bound_cfg = cfg.clone();
        bound_cfg.gamma = gamma;
        let bound = theoretical_bound(&bound_cfg, &kernel, lipschitz_g, capped);
        let passed = err <= bound;
        report(
            9,
            "convex reduction budget (capped substitute)",
            passed,
            &format!("N(eps) = {budget} > 1e7; error at 1e7 = {err:.4e} vs envelope {bound:.4e}"),
        );
        assert!(passed, "error {err:.4e} above the envelope {bound:.4e} at 1e7 iterations");
    }
}

#[test]
fn criterion_10_determinism() {
    let first = figure2_run();
    let cfg = figure2_config();
    let dir = tempfile::tempdir().expect("tempdir");
    let report10 = run_experiment(&cfg, dir.path(), Some(1), false).expect("rerun succeeds");
    assert!(report10.all_complete());

    let list = |root: &PathBuf| -> Vec<(String, Vec<u8>)> {
        let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(root)
            .unwrap()
            .map(|e| {
                let e = e.unwrap();
                (
                    e.file_name().to_string_lossy().into_owned(),
                    std::fs::read(e.path()).unwrap(),
                )
            })
            .collect();
        files.sort();
        files
    };
    let a = list(&first.dir.path().to_path_buf());
    let b = list(&dir.path().to_path_buf());
    let mut identical = a.len() == b.len();
    let mut mismatch = String::new();
    if identical {
        for ((na, ba), (nb, bb)) in a.iter().zip(&b) {
            if na != nb || ba != bb {
                identical = false;
                mismatch = format!("{na} vs {nb}");
                break;
            }
        }
    } else {
        mismatch = format!("{} vs {} files", a.len(), b.len());
    }
    report(
        10,
        "determinism",
        identical,
        &format!(
            "two full runs with equal master seed: {} files byte-compared{}",
            a.len(),
            if identical { ", identical" } else { ", MISMATCH" }
        ),
    );
    assert!(identical, "outputs differ between equal-seed runs: {mismatch}");
}
