use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use robust_dfl::bench::{bias_demo, eval_regret, run_sweep, BiasDemoConfig, SweepConfig};
use robust_dfl::datagen::{
    generate_splits, load_dataset, random_tsp_instance, save_dataset, GenParams,
};
use robust_dfl::learning::{train, Method, TrainConfig, TrainedModel};
use robust_dfl::targets::{build_targets, build_targets_cached, TargetPolicy};
use robust_dfl::{Oracle, ProblemInstance, UncertaintyParams};

#[derive(Parser)]
#[command(
    name = "rdfl",
    version,
    about = "Decision-focused learning with robust regret losses"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProblemKind {
    Grid,
    Tsp,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    #[value(name = "spo+")]
    SpoPlus,
    Pfyl,
    Pfl,
}

#[derive(Clone, Copy, ValueEnum)]
enum LossArg {
    Emp,
    Ro,
    Topk,
    Knn,
}

#[derive(Clone, Copy, ValueEnum)]
enum SplitArg {
    Train,
    Val,
    Test,
}

impl SplitArg {
    fn dir_name(self) -> &'static str {
        match self {
            SplitArg::Train => "train",
            SplitArg::Val => "val",
            SplitArg::Test => "test",
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate train/val/test splits into DIR/{train,val,test}.
    Datagen {
        #[arg(long, value_enum)]
        problem: ProblemKind,
        /// Grid size as VxH.
        #[arg(long, default_value = "5x5")]
        grid: String,
        #[arg(long, default_value_t = 8)]
        nodes: usize,
        #[arg(long, default_value_t = 5)]
        features: usize,
        #[arg(long, default_value_t = 6)]
        deg: u32,
        #[arg(long, default_value_t = 0.5)]
        noise: f64,
        #[arg(long, default_value_t = 100)]
        train: usize,
        #[arg(long, default_value_t = 100)]
        val: usize,
        #[arg(long, default_value_t = 1000)]
        test: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// One noise factor per sample instead of one per coefficient.
        #[arg(long)]
        noise_shared: bool,
    },
    /// Train a linear predictor and write it as JSON.
    Train {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, value_enum)]
        method: MethodArg,
        #[arg(long, value_enum, default_value = "emp")]
        loss: LossArg,
        #[arg(long, default_value_t = robust_dfl::targets::DEFAULT_K)]
        k: usize,
        #[arg(long, default_value_t = robust_dfl::targets::DEFAULT_W)]
        w: f64,
        #[arg(long, default_value_t = robust_dfl::targets::DEFAULT_RHO)]
        rho: f64,
        #[arg(long, default_value_t = robust_dfl::targets::DEFAULT_GAMMA_FRAC)]
        gamma_frac: f64,
        #[arg(long, default_value_t = 1)]
        pfyl_m: usize,
        #[arg(long, default_value_t = 1.0)]
        pfyl_sigma: f64,
        #[arg(long, default_value_t = 200)]
        epochs: usize,
        #[arg(long, default_value_t = 32)]
        batch: usize,
        #[arg(long, default_value_t = 0.01)]
        lr: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        bias: bool,
        /// Reuse or write precomputed targets at this path.
        #[arg(long)]
        targets_cache: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate a trained model on one split.
    Eval {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long, value_enum, default_value = "test")]
        split: SplitArg,
        #[arg(long)]
        report: PathBuf,
    },
    /// Run an experiment grid from a JSON config (or the built-in one).
    Sweep {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Print the built-in configuration as JSON and exit.
        #[arg(long)]
        print_default: bool,
    },
    /// Monte Carlo of argmin frequencies for high vs low variance costs.
    BiasDemo {
        #[arg(long)]
        nh: usize,
        #[arg(long)]
        nl: usize,
        #[arg(long)]
        sigma_h: f64,
        #[arg(long)]
        sigma_l: f64,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}

fn datagen(
    problem: ProblemKind,
    grid: &str,
    nodes: usize,
    params: &GenParams,
    out: &Path,
) -> Result<()> {
    let instance = match problem {
        ProblemKind::Grid => format!("grid:{grid}").parse::<ProblemInstance>()?,
        ProblemKind::Tsp => random_tsp_instance(nodes, params.seed)?,
    };
    let splits = generate_splits(&instance, params)?;
    for (name, ds) in [
        ("train", &splits.train),
        ("val", &splits.val),
        ("test", &splits.test),
    ] {
        save_dataset(ds, &out.join(name))?;
    }
    println!(
        "wrote {} train / {} val / {} test samples for {instance} to {}",
        params.t_train,
        params.t_val,
        params.t_test,
        out.display()
    );
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Datagen {
            problem,
            grid,
            nodes,
            features,
            deg,
            noise,
            train,
            val,
            test,
            seed,
            out,
            noise_shared,
        } => {
            let params = GenParams {
                m: features,
                deg,
                noise_halfwidth: noise,
                t_train: train,
                t_val: val,
                t_test: test,
                seed,
                noise_shared,
            };
            datagen(problem, &grid, nodes, &params, &out)
        }
        Command::Train {
            data,
            method,
            loss,
            k,
            w,
            rho,
            gamma_frac,
            pfyl_m,
            pfyl_sigma,
            epochs,
            batch,
            lr,
            seed,
            bias,
            targets_cache,
            out,
        } => {
            let train_ds = load_dataset(&data.join("train"))?;
            let val_ds = load_dataset(&data.join("val"))?;
            let instance: ProblemInstance = train_ds.meta.instance.parse()?;
            let oracle = Oracle::new(instance);
            let policy = match loss {
                LossArg::Emp => TargetPolicy::Empirical,
                LossArg::Ro => TargetPolicy::RobustOpt {
                    uncertainty: UncertaintyParams::with_budget_fraction(
                        rho,
                        gamma_frac,
                        oracle.num_vars(),
                    )?,
                },
                LossArg::Topk => TargetPolicy::TopK { k },
                LossArg::Knn => TargetPolicy::Knn { k, w },
            };
            policy.validate()?;
            let method = match method {
                MethodArg::SpoPlus => Method::SpoPlus,
                MethodArg::Pfyl => Method::Pfyl {
                    samples: pfyl_m,
                    sigma: pfyl_sigma,
                },
                MethodArg::Pfl => {
                    if !matches!(policy, TargetPolicy::Empirical) {
                        bail!(
                            "the pfl baseline trains on squared error and only accepts --loss emp"
                        );
                    }
                    Method::Mse
                }
            };
            let targets = match &targets_cache {
                Some(p) => build_targets_cached(&policy, &train_ds, &oracle, p)?,
                None => build_targets(&policy, &train_ds, &oracle)?,
            };
            let cfg = TrainConfig {
                method,
                policy,
                epochs,
                batch_size: batch,
                lr,
                seed,
                shuffle: true,
                use_bias: bias,
            };
            let model = train(&cfg, &train_ds, &val_ds, &oracle, &targets)?;
            write_json(&out, &model)?;
            let best = model
                .history
                .iter()
                .find(|r| r.epoch == model.best_epoch)
                .map(|r| format!("{:.4}%", r.val_regret_pct))
                .unwrap_or_else(|| "n/a".into());
            println!(
                "best epoch {} (validation regret {best}); solves: {} precompute, {} gradient, {} evaluation",
                model.best_epoch,
                model.solves.precompute,
                model.solves.gradient,
                model.solves.evaluation
            );
            Ok(())
        }
        Command::Eval {
            data,
            model,
            split,
            report,
        } => {
            let ds = load_dataset(&data.join(split.dir_name()))?;
            let text = fs::read_to_string(&model)
                .with_context(|| format!("reading {}", model.display()))?;
            let trained: TrainedModel = serde_json::from_str(&text)
                .with_context(|| format!("parsing {}", model.display()))?;
            let oracle = Oracle::new(ds.meta.instance.parse()?);
            let mut rep = eval_regret(&trained.predictor, &ds, &oracle)?;
            rep.split = split.dir_name().into();
            rep.model = model.display().to_string();
            write_json(&report, &rep)?;
            print!("{} regret {:.4}%", rep.split, rep.normalized_regret_pct);
            if let Some(e) = rep.expected_normalized_regret_pct {
                print!(", expected regret {e:.4}%");
            }
            if rep.denominator_zero {
                print!(" (all optimal objectives are zero)");
            }
            println!();
            Ok(())
        }
        Command::Sweep {
            config,
            out,
            print_default,
        } => {
            if print_default {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&SweepConfig::desk_scale())?
                );
                return Ok(());
            }
            let cfg = match &config {
                Some(p) => {
                    let text = fs::read_to_string(p)
                        .with_context(|| format!("reading {}", p.display()))?;
                    serde_json::from_str(&text)
                        .with_context(|| format!("parsing {}", p.display()))?
                }
                None => SweepConfig::desk_scale(),
            };
            let results = run_sweep(&cfg)?;
            results.save(&out)?;
            let failed = results
                .records
                .iter()
                .filter(|r| r.outcome.is_err())
                .count();
            println!(
                "{} runs over {} configurations written to {} ({failed} failed)",
                results.records.len(),
                results.configs.len(),
                out.display()
            );
            Ok(())
        }
        Command::BiasDemo {
            nh,
            nl,
            sigma_h,
            sigma_l,
            trials,
            seed,
        } => {
            let report = bias_demo(&BiasDemoConfig {
                n_h: nh,
                n_l: nl,
                sigma_h,
                sigma_l,
                trials,
                seed,
            })?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
