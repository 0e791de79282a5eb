//! Experiment configuration: TOML schema, loading, and validation.
//!
//! One file describes one experiment: the problem, the feasible set, the
//! noise model, the starting point, and a list of methods (one smoothness
//! order each). Every validation failure names the offending field.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Deserialize;

use zospg::geometry::FeasibleSet;
use zospg::linalg;
use zospg::oracle::{
    anisotropic_quadratic, general_quadratic, norm_fourth, separable_quartic, NoiseModel,
    Objective,
};

/// The bundled three-method comparison on the anisotropic quadratic.
pub const FIGURE2_TOML: &str = include_str!("../configs/figure2.toml");

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    experiment: RawExperiment,
    problem: RawProblem,
    set: RawSet,
    noise: RawNoise,
    start: RawStart,
    #[serde(default)]
    method: Vec<RawMethod>,
    convex_budget: Option<ConvexBudgetSection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExperiment {
    name: String,
    trials: u64,
    iterations: u64,
    master_seed: u64,
    checkpoint_stride: u64,
    output_dir: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProblem {
    id: String,
    dim: usize,
    /// Diagonal Hessian entries for `id = "quadratic"`.
    spectrum: Option<Vec<f64>>,
    /// Linear term for `id = "quadratic"`; defaults to zeros.
    linear: Option<Vec<f64>>,
    /// Curvature for `id = "separable_quartic"`; defaults to 1.
    gamma: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSet {
    kind: String,
    center: Option<Vec<f64>>,
    radius: Option<f64>,
    lower: Option<Vec<f64>>,
    upper: Option<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNoise {
    kind: String,
    sigma: Option<f64>,
    bias: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStart {
    x0: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMethod {
    label: String,
    beta: f64,
    holder_l: Option<f64>,
    gamma: Option<f64>,
    tau_override: Option<f64>,
    c_star: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvexBudgetSection {
    pub eps: f64,
    pub radius: f64,
    #[serde(default = "default_rho")]
    pub rho: f64,
}

fn default_rho() -> f64 {
    0.1
}

/// One method of the experiment: a smoothness order plus its schedule
/// parameters.
#[derive(Debug, Clone)]
pub struct MethodConfig {
    pub label: String,
    pub beta: f64,
    pub holder_l: f64,
    pub gamma: f64,
    pub tau_override: Option<f64>,
    pub c_star: f64,
}

/// A fully validated experiment, ready to run.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub name: String,
    pub trials: u64,
    pub iterations: u64,
    pub master_seed: u64,
    pub checkpoint_stride: u64,
    pub output_dir: Option<PathBuf>,
    pub objective: Objective,
    pub set: FeasibleSet,
    pub noise: NoiseModel,
    pub x0: Vec<f64>,
    pub methods: Vec<MethodConfig>,
    pub convex_budget: Option<ConvexBudgetSection>,
}

/// Loads and validates a config file.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config {}", path.display()))?;
    parse_config(&text).with_context(|| format!("in config {}", path.display()))
}

/// The bundled comparison scenario, parsed from `configs/figure2.toml`.
pub fn figure2_config() -> ExperimentConfig {
    parse_config(FIGURE2_TOML).expect("bundled figure2 config is valid")
}

/// Parses and validates config text (TOML parse errors carry line/column).
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let raw: RawConfig = toml::from_str(text).context("config parse error")?;
    resolve(raw)
}

fn resolve(raw: RawConfig) -> Result<ExperimentConfig> {
    let exp = raw.experiment;
    if exp.trials < 1 {
        bail!("experiment.trials: must be at least 1, got {}", exp.trials);
    }
    if exp.iterations < 1 {
        bail!("experiment.iterations: must be at least 1");
    }
    if exp.checkpoint_stride < 1 || exp.checkpoint_stride > exp.iterations {
        bail!(
            "experiment.checkpoint_stride: must be in [1, iterations], got {}",
            exp.checkpoint_stride
        );
    }

    let dim = raw.problem.dim;
    if dim == 0 {
        bail!("problem.dim: must be positive");
    }
    let objective = build_objective(&raw.problem)?;
    let set = build_set(&raw.set, dim)?;
    let noise = build_noise(&raw.noise)?;

    if raw.start.x0.len() != dim {
        bail!(
            "start.x0: dimension {} does not match problem.dim {}",
            raw.start.x0.len(),
            dim
        );
    }
    let projected = set.project(&raw.start.x0);
    if linalg::dist(&raw.start.x0, &projected) > 1e-9 {
        bail!("start.x0: lies outside the feasible set");
    }

    if raw.method.is_empty() {
        bail!("method: at least one [[method]] block is required");
    }
    let mut methods = Vec::with_capacity(raw.method.len());
    let mut labels = std::collections::HashSet::new();
    for (i, m) in raw.method.iter().enumerate() {
        if m.label.trim().is_empty() {
            bail!("method[{i}].label: must be non-empty");
        }
        if !labels.insert(m.label.clone()) {
            bail!("method[{i}].label: duplicate label {:?}", m.label);
        }
        if !m.beta.is_finite() || m.beta < 2.0 {
            bail!(
                "method[{i}].beta: must be 2 (linear-kernel baseline) or greater than 2, got {}",
                m.beta
            );
        }
        let holder_l = m.holder_l.unwrap_or(objective.holder_l());
        if !(holder_l > 0.0) {
            bail!("method[{i}].holder_l: must be positive, got {holder_l}");
        }
        let gamma = m.gamma.unwrap_or(objective.gamma());
        if !(gamma > 0.0) {
            bail!(
                "method[{i}].gamma: strongly convex runner needs gamma > 0 \
                 (objective declares {}); set method gamma or use a strongly convex problem",
                objective.gamma()
            );
        }
        if noise.sigma_effective() == 0.0 && m.tau_override.is_none() {
            bail!(
                "method[{i}]: sigma = 0 degenerates the smoothing schedule; set tau_override"
            );
        }
        if let Some(t) = m.tau_override {
            if !(t > 0.0) {
                bail!("method[{i}].tau_override: must be positive, got {t}");
            }
        }
        let c_star = m.c_star.unwrap_or(9.0);
        if !(c_star > 0.0) {
            bail!("method[{i}].c_star: must be positive, got {c_star}");
        }
        methods.push(MethodConfig {
            label: m.label.clone(),
            beta: m.beta,
            holder_l,
            gamma,
            tau_override: m.tau_override,
            c_star,
        });
    }

    if let Some(t2) = &raw.convex_budget {
        if !(t2.eps > 0.0) {
            bail!("convex_budget.eps: must be positive");
        }
        if !(t2.radius > 0.0) {
            bail!("convex_budget.radius: must be positive");
        }
        if !(t2.rho > 0.0) {
            bail!("convex_budget.rho: must be positive");
        }
    }

    Ok(ExperimentConfig {
        name: exp.name,
        trials: exp.trials,
        iterations: exp.iterations,
        master_seed: exp.master_seed,
        checkpoint_stride: exp.checkpoint_stride,
        output_dir: exp.output_dir,
        objective,
        set,
        noise,
        x0: raw.start.x0,
        methods,
        convex_budget: raw.convex_budget,
    })
}

fn build_objective(problem: &RawProblem) -> Result<Objective> {
    match problem.id.as_str() {
        "anisotropic_quadratic" => {
            if problem.dim != 3 {
                bail!("problem.dim: anisotropic_quadratic is 3-dimensional");
            }
            Ok(anisotropic_quadratic())
        }
        "quadratic" => {
            let spectrum = problem
                .spectrum
                .clone()
                .context("problem.spectrum: required for id = \"quadratic\"")?;
            if spectrum.len() != problem.dim {
                bail!(
                    "problem.spectrum: length {} does not match dim {}",
                    spectrum.len(),
                    problem.dim
                );
            }
            let linear = problem.linear.clone().unwrap_or_else(|| vec![0.0; problem.dim]);
            if linear.len() != problem.dim {
                bail!(
                    "problem.linear: length {} does not match dim {}",
                    linear.len(),
                    problem.dim
                );
            }
            general_quadratic(spectrum, linear).map_err(|e| anyhow::anyhow!("problem: {e}"))
        }
        "separable_quartic" => Ok(separable_quartic(problem.dim, problem.gamma.unwrap_or(1.0))),
        "norm_fourth" => Ok(norm_fourth(problem.dim)),
        other => bail!(
            "problem.id: unknown problem {other:?} (expected anisotropic_quadratic, quadratic, \
             separable_quartic, or norm_fourth)"
        ),
    }
}

fn build_set(set: &RawSet, dim: usize) -> Result<FeasibleSet> {
    match set.kind.as_str() {
        "ball" => {
            let center = set.center.clone().unwrap_or_else(|| vec![0.0; dim]);
            if center.len() != dim {
                bail!("set.center: dimension {} does not match {dim}", center.len());
            }
            let radius = set.radius.context("set.radius: required for kind = \"ball\"")?;
            FeasibleSet::ball(center, radius).map_err(|e| anyhow::anyhow!("set: {e}"))
        }
        "box" => {
            let lower = set.lower.clone().context("set.lower: required for kind = \"box\"")?;
            let upper = set.upper.clone().context("set.upper: required for kind = \"box\"")?;
            if lower.len() != dim || upper.len() != dim {
                bail!("set bounds: dimension does not match problem.dim {dim}");
            }
            FeasibleSet::axis_box(lower, upper).map_err(|e| anyhow::anyhow!("set: {e}"))
        }
        other => bail!("set.kind: unknown kind {other:?} (expected ball or box)"),
    }
}

fn build_noise(noise: &RawNoise) -> Result<NoiseModel> {
    let need_sigma = || noise.sigma.context("noise.sigma: required for this noise kind");
    let need_bias = || noise.bias.context("noise.bias: required for this noise kind");
    let model = match noise.kind.as_str() {
        "none" => NoiseModel::None,
        "gaussian" => NoiseModel::Gaussian { sigma: need_sigma()? },
        "uniform" => NoiseModel::UniformBounded { sigma: need_sigma()? },
        "constant_bias" => NoiseModel::ConstantBias { bias: need_bias()? },
        "alternating_bias" => NoiseModel::AlternatingBias { bias: need_bias()? },
        other => bail!(
            "noise.kind: unknown kind {other:?} (expected none, gaussian, uniform, \
             constant_bias, or alternating_bias)"
        ),
    };
    if let NoiseModel::Gaussian { sigma } | NoiseModel::UniformBounded { sigma } = &model {
        if *sigma < 0.0 || !sigma.is_finite() {
            bail!("noise.sigma: must be finite and nonnegative, got {sigma}");
        }
    }
    Ok(model)
}
