use clap::{Args, ValueEnum};
use horizon_core::game_solver::{
    exact_v, scaled_lower_bound, scaled_lower_bound_closed_form, FiniteLossSpace, ScaledRegretTable,
};
use horizon_core::CumulativeLossVector;

use crate::criteria::{exact, learning, Context, Outcome};
use crate::error::{exit, CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Example {
    /// Complemented-basis game with a two-point horizon prior.
    #[value(name = "two-point-prior", alias = "appendix-g-1")]
    StageExample,
    /// Last-round Hedge against alternating basis vectors.
    #[value(name = "last-round-hedge", alias = "appendix-g-2")]
    LastRoundHedge,
    /// Last-round ball learner against alternating signs.
    #[value(name = "last-round-ball", alias = "appendix-g-3")]
    LastRoundBall,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("task").required(true).args(["lower_bound", "example", "compare_spaces"])))]
pub struct SolveArgs {
    /// Two-action lower bound truncated at `--t0`.
    #[arg(long)]
    pub lower_bound: bool,
    #[arg(long, default_value_t = 60)]
    pub t0: u64,
    /// Reproduce a worked example and check its values.
    #[arg(long, value_enum)]
    pub example: Option<Example>,
    /// Compare V(0,T) across the basis, binary and complemented-basis spaces.
    #[arg(long)]
    pub compare_spaces: bool,
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[arg(long, default_value_t = 3)]
    pub t: u32,
}

fn print_outcome(out: &Outcome) -> u8 {
    for c in &out.checks {
        println!(
            "[{}] {}: {} (expected {})",
            if c.pass { "ok" } else { "FAIL" },
            c.label,
            c.measured,
            c.expected
        );
    }
    if out.passed() {
        exit::OK
    } else {
        exit::FAILURE
    }
}

fn lower_bound(t0: u64) -> CliResult<u8> {
    let partial = scaled_lower_bound(t0)?;
    let closed = scaled_lower_bound_closed_form(t0)?;
    let raw = ScaledRegretTable::new(t0)?.bound();
    println!("t0,partial_sum,closed_form,affine_recursion,sqrt2");
    println!("{t0},{partial},{closed},{raw},{}", std::f64::consts::SQRT_2);
    Ok(exit::OK)
}

fn compare_spaces(n: usize, t: u32) -> CliResult<u8> {
    if n < 2 {
        return Err(CliError::config("--n must be at least 2"));
    }
    let zero = CumulativeLossVector::zeros(n);
    println!("T,basis,binary,complemented_basis,basis_equals_binary");
    for r in 0..=t {
        let ls1 = exact_v(&FiniteLossSpace::basis(n), &zero, r)?;
        let ls2 = exact_v(&FiniteLossSpace::binary(n), &zero, r)?;
        let comp = exact_v(&FiniteLossSpace::complemented_basis(n), &zero, r)?;
        println!("{r},{ls1},{ls2},{comp},{}", (ls1 - ls2).abs() <= 1e-9);
    }
    Ok(exit::OK)
}

pub fn run(args: &SolveArgs) -> CliResult<u8> {
    if args.lower_bound {
        return lower_bound(args.t0);
    }
    if args.compare_spaces {
        return compare_spaces(args.n, args.t);
    }
    let out = match args.example.expect("clap enforces one task") {
        Example::StageExample => exact::example_one(&Context::default())?,
        Example::LastRoundHedge => Outcome {
            checks: vec![learning::last_round_hedge()?],
        },
        Example::LastRoundBall => Outcome {
            checks: vec![learning::last_round_ball()?],
        },
    };
    Ok(print_outcome(&out))
}
