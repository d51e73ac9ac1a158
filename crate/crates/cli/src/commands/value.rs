use std::path::PathBuf;

use clap::Args;
use horizon_core::hedge_values::{
    c_n, two_action_game_value, RandomWalkTable, DEFAULT_STATE_BUDGET,
};
use horizon_core::CumulativeLossVector;

use super::emit;
use crate::error::{exit, CliError, CliResult};

#[derive(Debug, Args)]
pub struct ValueArgs {
    /// Number of actions.
    #[arg(long)]
    pub n: usize,
    /// Largest horizon; rows cover T = 0..=t.
    #[arg(long)]
    pub t: u32,
    /// CSV destination (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Memo capacity of the value recursion.
    #[arg(long, default_value_t = DEFAULT_STATE_BUDGET)]
    pub state_budget: usize,
}

/// CSV with columns `T, V, R, c_n_sqrt_t, within_bound` and, for `N = 2`, `S_T`.
pub fn table(args: &ValueArgs) -> CliResult<String> {
    let table = RandomWalkTable::with_budget(args.n, args.state_budget)?;
    let zero = CumulativeLossVector::zeros(args.n);
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["T", "V", "R", "c_n_sqrt_t", "within_bound"];
    if args.n == 2 {
        header.push("S_T");
    }
    w.write_record(&header)?;
    for t in 0..=args.t {
        let v = table.minimax_v(&zero, t)?;
        let r = table.random_walk_r(&zero, t)?;
        let bound = c_n(args.n) * (t as f64).sqrt();
        let mut row = vec![
            t.to_string(),
            v.to_string(),
            r.to_string(),
            bound.to_string(),
            (v <= bound + 1e-12).to_string(),
        ];
        if args.n == 2 {
            row.push(two_action_game_value(t as u64).to_string());
        }
        w.write_record(&row)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::io("<buffer>", e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

pub fn run(args: &ValueArgs) -> CliResult<u8> {
    emit(args.out.as_deref(), &table(args)?)?;
    Ok(exit::OK)
}
