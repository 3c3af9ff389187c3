//! Experiment grid: every (problem, t, ε̄, method, policy) configuration is
//! trained once per seed, evaluated on the test split and aggregated.
//!
//! Results go to one CSV. `detail` rows hold single runs, `aggregate` rows
//! hold the mean, sample standard deviation and a paired t-test against the
//! empirical policy of the same method (paired by seed). Wall-clock times are
//! kept out of that file so reruns are byte-identical.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bench::eval::eval_regret;
use crate::bench::stats::paired_t_test;
use crate::datagen::{generate_splits, GenParams};
use crate::error::{Error, Result};
use crate::learning::{train, Method, TrainConfig};
use crate::oracles::{Oracle, ProblemInstance, SolveCounts, UncertaintyParams};
use crate::targets::{
    build_targets, TargetPolicy, DEFAULT_GAMMA_FRAC, DEFAULT_K, DEFAULT_RHO, DEFAULT_W,
};

pub const SIGNIFICANCE_ALPHA: f64 = 0.05;

/// Target policy with the budget given relative to the instance size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PolicySpec {
    Empirical,
    RobustOpt { rho: f64, gamma_frac: f64 },
    TopK { k: usize },
    Knn { k: usize, w: f64 },
}

impl PolicySpec {
    pub fn resolve(&self, n: usize) -> Result<TargetPolicy> {
        let p = match *self {
            PolicySpec::Empirical => TargetPolicy::Empirical,
            PolicySpec::RobustOpt { rho, gamma_frac } => TargetPolicy::RobustOpt {
                uncertainty: UncertaintyParams::with_budget_fraction(rho, gamma_frac, n)?,
            },
            PolicySpec::TopK { k } => TargetPolicy::TopK { k },
            PolicySpec::Knn { k, w } => TargetPolicy::Knn { k, w },
        };
        p.validate()?;
        Ok(p)
    }

    pub fn label(&self) -> &'static str {
        match self {
            PolicySpec::Empirical => "emp",
            PolicySpec::RobustOpt { .. } => "ro",
            PolicySpec::TopK { .. } => "topk",
            PolicySpec::Knn { .. } => "knn",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    /// Instance descriptor such as `grid:5x5` or `tsp:8`.
    pub instance: String,
    /// Overrides the global training sizes for this problem.
    #[serde(default)]
    pub train_sizes: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub problems: Vec<ProblemSpec>,
    pub train_sizes: Vec<usize>,
    pub noise: Vec<f64>,
    pub methods: Vec<Method>,
    pub policies: Vec<PolicySpec>,
    pub seeds: Vec<u64>,
    /// Epochs per training size; sizes not listed use `default_epochs`.
    #[serde(default)]
    pub epochs: BTreeMap<usize, usize>,
    pub default_epochs: usize,
    pub val_size: usize,
    pub test_size: usize,
    pub features: usize,
    pub degree: u32,
    pub batch_size: usize,
    pub lr: f64,
    #[serde(default)]
    pub noise_shared: bool,
}

impl SweepConfig {
    /// Reduced version of the published grid that finishes on a laptop.
    pub fn desk_scale() -> Self {
        Self {
            problems: vec![
                ProblemSpec {
                    instance: "grid:5x5".into(),
                    train_sizes: Some(vec![100, 1000]),
                },
                ProblemSpec {
                    instance: "tsp:8".into(),
                    train_sizes: Some(vec![100]),
                },
            ],
            train_sizes: vec![100],
            noise: vec![0.0, 0.5, 1.0],
            methods: vec![Method::Mse, Method::SpoPlus, Method::pfyl_default()],
            policies: vec![
                PolicySpec::Empirical,
                PolicySpec::RobustOpt {
                    rho: DEFAULT_RHO,
                    gamma_frac: DEFAULT_GAMMA_FRAC,
                },
                PolicySpec::TopK { k: DEFAULT_K },
                PolicySpec::Knn {
                    k: DEFAULT_K,
                    w: DEFAULT_W,
                },
            ],
            seeds: (0..10).collect(),
            epochs: BTreeMap::from([(100, 200), (1000, 100)]),
            default_epochs: 200,
            val_size: 100,
            test_size: 1000,
            features: 5,
            degree: 6,
            batch_size: 32,
            lr: 0.01,
            noise_shared: false,
        }
    }

    pub fn epochs_for(&self, t: usize) -> usize {
        self.epochs.get(&t).copied().unwrap_or(self.default_epochs)
    }

    pub fn validate(&self) -> Result<()> {
        let empty = |what: &str| Err(Error::InvalidParameter(format!("sweep has no {what}")));
        if self.problems.is_empty() {
            return empty("problems");
        }
        if self.noise.is_empty() {
            return empty("noise levels");
        }
        if self.methods.is_empty() {
            return empty("methods");
        }
        if self.policies.is_empty() {
            return empty("policies");
        }
        if self.seeds.is_empty() {
            return empty("seeds");
        }
        for p in &self.problems {
            p.instance.parse::<ProblemInstance>()?;
            if self.sizes_for(p).is_empty() {
                return empty("training sizes");
            }
        }
        Ok(())
    }

    fn sizes_for<'a>(&'a self, p: &'a ProblemSpec) -> &'a [usize] {
        p.train_sizes.as_deref().unwrap_or(&self.train_sizes)
    }

    /// Configurations in output order. The prediction-focused baseline only
    /// pairs with the empirical policy.
    pub fn runs(&self) -> Vec<RunKey> {
        let mut out = Vec::new();
        for p in &self.problems {
            for &t in self.sizes_for(p) {
                for &noise in &self.noise {
                    for &method in &self.methods {
                        for &policy in &self.policies {
                            if method == Method::Mse && policy != PolicySpec::Empirical {
                                continue;
                            }
                            out.push(RunKey {
                                instance: p.instance.clone(),
                                train_size: t,
                                noise,
                                method,
                                policy,
                            });
                        }
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunKey {
    pub instance: String,
    pub train_size: usize,
    pub noise: f64,
    pub method: Method,
    pub policy: PolicySpec,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub best_epoch: usize,
    pub test_regret_pct: f64,
    pub test_expected_regret_pct: Option<f64>,
    pub solves: SolveCounts,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub config_index: usize,
    pub seed: u64,
    pub outcome: std::result::Result<RunOutcome, String>,
    pub wall_seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Aggregate {
    pub config_index: usize,
    pub runs_ok: usize,
    pub runs_failed: usize,
    pub mean_regret_pct: Option<f64>,
    pub std_regret_pct: Option<f64>,
    pub mean_expected_regret_pct: Option<f64>,
    pub t_stat: Option<f64>,
    pub p_value: Option<f64>,
    /// `*` when significantly lower than the empirical counterpart, `x` when
    /// significantly higher, empty otherwise.
    pub marker: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResults {
    pub configs: Vec<RunKey>,
    pub records: Vec<RunRecord>,
    pub aggregates: Vec<Aggregate>,
}

#[derive(Debug, Serialize)]
struct CsvRow<'a> {
    row_type: &'static str,
    problem: &'a str,
    train_size: usize,
    noise: f64,
    method: &'static str,
    policy: &'static str,
    seed: Option<u64>,
    status: String,
    best_epoch: Option<usize>,
    test_regret_pct: Option<f64>,
    test_expected_regret_pct: Option<f64>,
    precompute_solves: Option<u64>,
    gradient_solves: Option<u64>,
    evaluation_solves: Option<u64>,
    runs: Option<usize>,
    mean_regret_pct: Option<f64>,
    std_regret_pct: Option<f64>,
    mean_expected_regret_pct: Option<f64>,
    t_stat: Option<f64>,
    p_value: Option<f64>,
    marker: &'a str,
}

impl SweepResults {
    pub fn write_csv(&self, w: impl Write) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        for (ci, key) in self.configs.iter().enumerate() {
            let base = |row_type| CsvRow {
                row_type,
                problem: &key.instance,
                train_size: key.train_size,
                noise: key.noise,
                method: key.method.label(),
                policy: key.policy.label(),
                seed: None,
                status: String::new(),
                best_epoch: None,
                test_regret_pct: None,
                test_expected_regret_pct: None,
                precompute_solves: None,
                gradient_solves: None,
                evaluation_solves: None,
                runs: None,
                mean_regret_pct: None,
                std_regret_pct: None,
                mean_expected_regret_pct: None,
                t_stat: None,
                p_value: None,
                marker: "",
            };
            for r in self.records.iter().filter(|r| r.config_index == ci) {
                let mut row = base("detail");
                row.seed = Some(r.seed);
                match &r.outcome {
                    Ok(o) => {
                        row.status = "ok".into();
                        row.best_epoch = Some(o.best_epoch);
                        row.test_regret_pct = Some(o.test_regret_pct);
                        row.test_expected_regret_pct = o.test_expected_regret_pct;
                        row.precompute_solves = Some(o.solves.precompute);
                        row.gradient_solves = Some(o.solves.gradient);
                        row.evaluation_solves = Some(o.solves.evaluation);
                    }
                    Err(e) => row.status = format!("error: {e}"),
                }
                out.serialize(row)?;
            }
            let a = &self.aggregates[ci];
            let mut row = base("aggregate");
            row.status = if a.runs_failed == 0 {
                "ok".into()
            } else {
                format!("{} failed", a.runs_failed)
            };
            row.runs = Some(a.runs_ok);
            row.mean_regret_pct = a.mean_regret_pct;
            row.std_regret_pct = a.std_regret_pct;
            row.mean_expected_regret_pct = a.mean_expected_regret_pct;
            row.t_stat = a.t_stat;
            row.p_value = a.p_value;
            row.marker = &a.marker;
            out.serialize(row)?;
        }
        out.flush().map_err(|e| Error::io("results csv", e))?;
        Ok(())
    }

    /// Per-run wall-clock seconds, kept apart from the reproducible results.
    pub fn write_timing_csv(&self, w: impl Write) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record([
            "problem",
            "train_size",
            "noise",
            "method",
            "policy",
            "seed",
            "wall_seconds",
        ])?;
        for r in &self.records {
            let k = &self.configs[r.config_index];
            out.write_record([
                k.instance.clone(),
                k.train_size.to_string(),
                k.noise.to_string(),
                k.method.label().to_string(),
                k.policy.label().to_string(),
                r.seed.to_string(),
                format!("{:.3}", r.wall_seconds),
            ])?;
        }
        out.flush().map_err(|e| Error::io("timing csv", e))?;
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        std::fs::write(path, buf).map_err(|e| Error::io(path, e))?;
        let timing = timing_path(path);
        let mut buf = Vec::new();
        self.write_timing_csv(&mut buf)?;
        std::fs::write(&timing, buf).map_err(|e| Error::io(&timing, e))
    }
}

/// `results.csv` → `results.timing.csv`.
pub fn timing_path(path: &Path) -> std::path::PathBuf {
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("results");
    path.with_file_name(format!("{stem}.timing.csv"))
}

fn run_one(cfg: &SweepConfig, key: &RunKey, seed: u64) -> Result<RunOutcome> {
    let instance: ProblemInstance = key.instance.parse()?;
    let params = GenParams {
        m: cfg.features,
        deg: cfg.degree,
        noise_halfwidth: key.noise,
        t_train: key.train_size,
        t_val: cfg.val_size,
        t_test: cfg.test_size,
        seed,
        noise_shared: cfg.noise_shared,
    };
    let splits = generate_splits(&instance, &params)?;
    let oracle = Oracle::new(instance);
    let policy = key.policy.resolve(oracle.num_vars())?;
    let targets = build_targets(&policy, &splits.train, &oracle)?;
    let tc = TrainConfig {
        method: key.method,
        policy,
        epochs: cfg.epochs_for(key.train_size),
        batch_size: cfg.batch_size,
        lr: cfg.lr,
        seed,
        shuffle: true,
        use_bias: false,
    };
    let model = train(&tc, &splits.train, &splits.val, &oracle, &targets)?;
    let report = eval_regret(&model.predictor, &splits.test, &oracle)?;
    Ok(RunOutcome {
        best_epoch: model.best_epoch,
        test_regret_pct: report.normalized_regret_pct,
        test_expected_regret_pct: report.expected_normalized_regret_pct,
        solves: model.solves,
    })
}

fn mean(v: &[f64]) -> Option<f64> {
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

fn sample_std(v: &[f64]) -> Option<f64> {
    let m = mean(v)?;
    if v.len() < 2 {
        return None;
    }
    Some((v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() - 1) as f64).sqrt())
}

fn ok_regrets(records: &[RunRecord], ci: usize) -> BTreeMap<u64, &RunOutcome> {
    records
        .iter()
        .filter(|r| r.config_index == ci)
        .filter_map(|r| r.outcome.as_ref().ok().map(|o| (r.seed, o)))
        .collect()
}

fn aggregate(configs: &[RunKey], records: &[RunRecord]) -> Vec<Aggregate> {
    configs
        .iter()
        .enumerate()
        .map(|(ci, key)| {
            let ok = ok_regrets(records, ci);
            let regrets: Vec<f64> = ok.values().map(|o| o.test_regret_pct).collect();
            let expected: Option<Vec<f64>> =
                ok.values().map(|o| o.test_expected_regret_pct).collect();
            let total = records.iter().filter(|r| r.config_index == ci).count();
            let mut agg = Aggregate {
                config_index: ci,
                runs_ok: ok.len(),
                runs_failed: total - ok.len(),
                mean_regret_pct: mean(&regrets),
                std_regret_pct: sample_std(&regrets),
                mean_expected_regret_pct: expected.as_deref().and_then(mean),
                t_stat: None,
                p_value: None,
                marker: String::new(),
            };
            if key.policy == PolicySpec::Empirical {
                return agg;
            }
            let baseline = configs.iter().position(|k| {
                k.policy == PolicySpec::Empirical
                    && k.method == key.method
                    && k.instance == key.instance
                    && k.train_size == key.train_size
                    && k.noise == key.noise
            });
            if let Some(bi) = baseline {
                let base = ok_regrets(records, bi);
                let (a, b): (Vec<f64>, Vec<f64>) = ok
                    .iter()
                    .filter_map(|(s, o)| {
                        base.get(s).map(|e| (o.test_regret_pct, e.test_regret_pct))
                    })
                    .unzip();
                if let Ok(t) = paired_t_test(&a, &b, SIGNIFICANCE_ALPHA) {
                    agg.t_stat = Some(t.t_stat);
                    agg.p_value = Some(t.p_value);
                    if t.significant {
                        agg.marker = if t.mean_diff < 0.0 { "*" } else { "x" }.into();
                    }
                }
            }
            agg
        })
        .collect()
}

/// Runs every configuration and seed in parallel. Failures become `error`
/// rows instead of aborting the sweep.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepResults> {
    cfg.validate()?;
    let configs = cfg.runs();
    let jobs: Vec<(usize, u64)> = (0..configs.len())
        .flat_map(|ci| cfg.seeds.iter().map(move |&s| (ci, s)))
        .collect();
    let records: Vec<RunRecord> = jobs
        .par_iter()
        .map(|&(ci, seed)| {
            let start = Instant::now();
            let outcome = run_one(cfg, &configs[ci], seed).map_err(|e| {
                log::warn!("run {ci} seed {seed} failed: {e}");
                e.to_string()
            });
            RunRecord {
                config_index: ci,
                seed,
                outcome,
                wall_seconds: start.elapsed().as_secs_f64(),
            }
        })
        .collect();
    let aggregates = aggregate(&configs, &records);
    Ok(SweepResults {
        configs,
        records,
        aggregates,
    })
}
