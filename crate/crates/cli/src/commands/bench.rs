use std::path::PathBuf;

use clap::Args;
use horizon_core::arena::{max_regret_curve, run_trial, RegretTrace};

use super::plot::render_file;
use crate::config::ExperimentConfig;
use crate::csvio::{metadata_line, write_table, write_traces};
use crate::error::{exit, CliError, CliResult};

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Experiment document (TOML).
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory, overriding `output.dir`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub parallelism: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct BenchArtifacts {
    pub csv: PathBuf,
    pub svg: PathBuf,
    pub traces: Option<PathBuf>,
}

fn adversary_note(name: &str) -> &'static str {
    match name {
        "sphere" => "uniform on the unit sphere, drawn fresh each round",
        "ball" => "uniform in the unit ball, drawn fresh each round",
        "random_cube" => "uniform in [0,1]^N each round",
        "random_basis" => "uniform random basis vector each round",
        "alternating" => "basis vectors e_1, e_2, ... in turn",
        "alternating_sign" => "e_1 and -e_1 in turn",
        "greedy" => "unit loss on the learner's heaviest action",
        _ => "all-zero losses",
    }
}

/// Runs the experiment and writes `<name>.csv`, `<name>.svg` and, when
/// traces are requested, `<name>_traces.csv`.
pub fn execute(cfg: &ExperimentConfig) -> CliResult<BenchArtifacts> {
    let batch = cfg.batch();
    let table = max_regret_curve(&batch)?;
    let dir = &cfg.output.dir;
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let b = &cfg.bench;
    let learners: Vec<String> = b.learners.iter().map(ToString::to_string).collect();
    let meta = metadata_line(&[
        ("adversary", b.adversary.to_string()),
        ("adversary_model", adversary_note(b.adversary.name()).into()),
        ("shared_sequences", "true".into()),
        ("seed", b.seed.to_string()),
        ("n", b.n.to_string()),
        ("horizon", b.horizon.to_string()),
        ("trials", b.trials.to_string()),
        ("learners", learners.join(" | ")),
    ]);
    let csv = dir.join(format!("{}.csv", cfg.output.name));
    write_table(&csv, &meta, &table)?;
    let svg = dir.join(format!("{}.svg", cfg.output.name));
    let title = format!(
        "Max regret over {} trials, {} adversary, N={}",
        b.trials, b.adversary, b.n
    );
    render_file(&csv, &svg, &title)?;

    let traces = if cfg.output.trace_trials > 0 {
        let mut all: Vec<RegretTrace> = Vec::new();
        for spec in &b.learners {
            for trial in 0..cfg.output.trace_trials as u64 {
                let mut learner = spec.build(b.n)?;
                let mut adversary = b.adversary.build(b.n, learner.setting())?;
                let mut trace = run_trial(
                    learner.as_mut(),
                    adversary.as_mut(),
                    b.horizon,
                    b.seed,
                    trial,
                )?;
                trace.learner = spec.to_string();
                all.push(trace);
            }
        }
        let path = dir.join(format!("{}_traces.csv", cfg.output.name));
        write_traces(&path, &meta, &all)?;
        Some(path)
    } else {
        None
    };
    Ok(BenchArtifacts { csv, svg, traces })
}

pub fn run(args: &BenchArgs) -> CliResult<u8> {
    let mut cfg = ExperimentConfig::load(&args.config)?;
    if let Some(dir) = &args.out {
        cfg.output.dir = dir.clone();
    }
    if let Some(t) = args.trials {
        cfg.bench.trials = t;
    }
    if let Some(s) = args.seed {
        cfg.bench.seed = s;
    }
    if let Some(p) = args.parallelism {
        cfg.bench.parallelism = Some(p);
    }
    cfg.validate()?;
    let out = execute(&cfg)?;
    println!("wrote {}", out.csv.display());
    println!("wrote {}", out.svg.display());
    if let Some(t) = out.traces {
        println!("wrote {}", t.display());
    }
    Ok(exit::OK)
}
