//! TOML experiment configuration: required channel/code keys, optional
//! overrides and sweep axes, strict about unknown keys.

use serde::Deserialize;

use polarfade::construction::ConstructionMethod;

use crate::AppError;

const DEFAULT_TRIALS: u64 = 100;
const DEFAULT_GENIE_TRIALS: u64 = 10_000;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "B")]
    b: usize,
    h: Vec<f64>,
    q: Vec<f64>,
    snr_db: f64,
    epsilon: f64,
    method: Option<String>,
    trials: Option<u64>,
    seed: Option<u64>,
    genie_trials: Option<u64>,
    sweep_snr_db: Option<Vec<f64>>,
    sweep_epsilon: Option<Vec<f64>>,
    #[serde(rename = "sweep_N")]
    sweep_n: Option<Vec<usize>>,
    #[serde(rename = "sweep_B")]
    sweep_b: Option<Vec<usize>>,
}

/// Resolved experiment: every axis non-empty, every value validated.
/// Single-point runs use the head of each axis.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub ns: Vec<usize>,
    pub bs: Vec<usize>,
    pub snr_dbs: Vec<f64>,
    pub epsilons: Vec<f64>,
    pub gains: Vec<f64>,
    pub probs: Vec<f64>,
    pub method: ConstructionMethod,
    pub method_name: String,
    pub trials: u64,
    pub seed: u64,
}

/// Command-line overrides applied on top of the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub method: Option<String>,
    pub seed: Option<u64>,
    pub trials: Option<u64>,
}

pub fn load(path: &std::path::Path, over: &Overrides) -> Result<ExperimentConfig, AppError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| AppError::Io(format!("reading {}: {e}", path.display())))?;
    parse(&text, over)
}

pub fn parse(text: &str, over: &Overrides) -> Result<ExperimentConfig, AppError> {
    let file: FileConfig =
        toml::from_str(text).map_err(|e| AppError::Config(format!("config: {e}")))?;
    resolve(file, over)
}

fn resolve(file: FileConfig, over: &Overrides) -> Result<ExperimentConfig, AppError> {
    let cfg = |msg: String| AppError::Config(msg);

    let ns = axis("sweep_N", file.sweep_n, file.n)?;
    let bs = axis("sweep_B", file.sweep_b, file.b)?;
    let snr_dbs = axis("sweep_snr_db", file.sweep_snr_db, file.snr_db)?;
    let epsilons = axis("sweep_epsilon", file.sweep_epsilon, file.epsilon)?;

    for &n in ns.iter().chain(&bs) {
        if n < 2 || !n.is_power_of_two() {
            return Err(cfg(format!("N and B values must be powers of two >= 2, got {n}")));
        }
    }
    for &e in &epsilons {
        if !(e > 0.0 && e < 1.0) {
            return Err(cfg(format!("epsilon: {e} outside (0,1)")));
        }
    }
    for &s in &snr_dbs {
        if !s.is_finite() {
            return Err(cfg(format!("snr_db: {s} must be finite")));
        }
    }

    if file.h.is_empty() || file.h.len() != file.q.len() {
        return Err(cfg(format!(
            "h and q must be matching nonempty lists, got {} and {}",
            file.h.len(),
            file.q.len()
        )));
    }
    if file.h.iter().any(|&h| !h.is_finite() || h < 0.0) {
        return Err(cfg("h: gains must be finite and nonnegative".to_string()));
    }
    if file.h.windows(2).any(|w| w[0] > w[1]) {
        return Err(cfg("h: gains must be sorted ascending".to_string()));
    }
    if file.q.iter().any(|&q| !q.is_finite() || q <= 0.0 || q > 1.0) {
        return Err(cfg("q: state probabilities must lie in (0,1]".to_string()));
    }
    let total: f64 = file.q.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(cfg(format!("q must sum to 1, got {total}")));
    }

    let method_name = over
        .method
        .clone()
        .or(file.method)
        .unwrap_or_else(|| "bound".to_string());
    let method = match method_name.as_str() {
        "bound" => ConstructionMethod::Bound,
        "genie" => {
            let trials = file.genie_trials.unwrap_or(DEFAULT_GENIE_TRIALS);
            if trials < 100 {
                return Err(cfg(format!("genie_trials: {trials} is below the minimum of 100")));
            }
            ConstructionMethod::Genie { trials }
        }
        other => return Err(cfg(format!("method: unknown value '{other}'"))),
    };

    let trials = over.trials.or(file.trials).unwrap_or(DEFAULT_TRIALS);
    if trials == 0 {
        return Err(cfg("trials must be at least 1".to_string()));
    }
    let seed = over.seed.or(file.seed).unwrap_or(0);

    Ok(ExperimentConfig {
        ns,
        bs,
        snr_dbs,
        epsilons,
        gains: file.h,
        probs: file.q,
        method,
        method_name,
        trials,
        seed,
    })
}

fn axis<T: Copy>(name: &str, sweep: Option<Vec<T>>, base: T) -> Result<Vec<T>, AppError> {
    match sweep {
        Some(v) if v.is_empty() => {
            Err(AppError::Config(format!("{name}: sweep axis must be non-empty")))
        }
        Some(v) => Ok(v),
        None => Ok(vec![base]),
    }
}

impl ExperimentConfig {
    pub fn state_count(&self) -> usize {
        self.gains.len()
    }

    /// Sweep grid in emission order: N outermost, then B, snr_db, and
    /// epsilon innermost, matching the column order of the output.
    pub fn grid(&self) -> Vec<(usize, usize, f64, f64)> {
        let mut points = Vec::new();
        for &n in &self.ns {
            for &b in &self.bs {
                for &snr_db in &self.snr_dbs {
                    for &eps in &self.epsilons {
                        points.push((n, b, snr_db, eps));
                    }
                }
            }
        }
        points
    }
}

pub fn snr_from_db(snr_db: f64) -> f64 {
    10f64.powf(snr_db / 10.0)
}
