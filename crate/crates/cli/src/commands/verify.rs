use clap::Args;

use crate::criteria::{self, Context};
use crate::error::{exit, CliError, CliResult};

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Run one criterion, by id or number.
    #[arg(long)]
    pub only: Option<String>,
    /// List criterion ids and exit.
    #[arg(long)]
    pub list: bool,
    /// Worker threads for batch experiments.
    #[arg(long)]
    pub parallelism: Option<usize>,
}

pub fn run(args: &VerifyArgs) -> CliResult<u8> {
    if args.list {
        for c in criteria::all() {
            println!("{:>2} {:<22} {}", c.number, c.id, c.title);
        }
        return Ok(exit::OK);
    }
    let selected: Vec<_> =
        match &args.only {
            Some(key) => vec![criteria::find(key)
                .ok_or_else(|| CliError::config(format!("no criterion `{key}`")))?],
            None => criteria::all().iter().collect(),
        };
    let mut ctx = Context::default();
    if let Some(p) = args.parallelism {
        ctx.parallelism = p.max(1);
    }
    let mut failed = 0;
    for c in selected {
        let report = c.run(&ctx);
        println!("{}", report.line());
        for line in report.details() {
            println!("{line}");
        }
        if !report.passed() {
            failed += 1;
        }
    }
    Ok(if failed == 0 { exit::OK } else { exit::FAILURE })
}
