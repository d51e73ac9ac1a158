//! Criterion 15: `bench` output does not depend on repetition or thread count.

use crate::commands::bench::execute;
use crate::config::ExperimentConfig;
use crate::csvio::body_bytes;
use crate::error::{CliError, CliResult};

use super::{Check, Context, Outcome};

const CONFIG: &str = r#"
schema_version = 1

[bench]
learners = ["ball_adaptive", "ogd", "doubling:base=ball_minimax", "ball_minimax:T=200"]
adversary = "sphere"
n = 5
horizon = 200
trials = 40
seed = 15

[output]
name = "determinism"
trace_trials = 2
"#;

fn body(parallelism: usize) -> CliResult<(Vec<u8>, Vec<u8>)> {
    let dir = tempfile::tempdir().map_err(|e| CliError::io(std::env::temp_dir(), e))?;
    let mut cfg = ExperimentConfig::parse(CONFIG)?;
    cfg.bench.parallelism = Some(parallelism);
    cfg.output.dir = dir.path().to_path_buf();
    let out = execute(&cfg)?;
    let traces = out.traces.expect("config requests traces");
    Ok((body_bytes(&out.csv)?, body_bytes(&traces)?))
}

pub fn determinism(_: &Context) -> CliResult<Outcome> {
    let mut out = Outcome::default();
    let first = body(1)?;
    let again = body(1)?;
    let wide = body(8)?;
    let describe = |a: &(Vec<u8>, Vec<u8>), b: &(Vec<u8>, Vec<u8>)| {
        if a == b {
            "identical".to_string()
        } else {
            "differ".to_string()
        }
    };
    out.push(Check::new(
        "repeat at parallelism 1",
        describe(&first, &again),
        "identical",
        first == again,
    ));
    out.push(Check::new(
        "parallelism 1 vs 8",
        describe(&first, &wide),
        "identical",
        first == wide,
    ));
    out.push(Check::new(
        "table rows",
        first.0.iter().filter(|&&b| b == b'\n').count(),
        "801 (header + 4 learners x 200 rounds)",
        first.0.iter().filter(|&&b| b == b'\n').count() == 801,
    ));
    Ok(out)
}
