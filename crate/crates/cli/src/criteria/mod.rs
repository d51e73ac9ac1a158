//! The acceptance criteria, runnable one by one from `verify` and from the
//! `acceptance` test target.

pub(crate) mod determinism;
pub(crate) mod exact;
pub(crate) mod learning;

use std::fmt;
use std::time::{Duration, Instant};

use crate::error::CliResult;

/// One measured quantity against its target.
#[derive(Debug, Clone)]
pub struct Check {
    pub label: String,
    pub measured: String,
    pub expected: String,
    pub pass: bool,
}

/// Fixed notation for ordinary magnitudes, scientific for tiny ones.
fn num(x: f64) -> String {
    if x != 0.0 && x.abs() < 1e-3 {
        format!("{x:.3e}")
    } else {
        format!("{x:.6}")
    }
}

impl Check {
    pub fn new(
        label: impl Into<String>,
        measured: impl fmt::Display,
        expected: impl Into<String>,
        pass: bool,
    ) -> Self {
        Check {
            label: label.into(),
            measured: measured.to_string(),
            expected: expected.into(),
            pass,
        }
    }

    /// `|measured - target| <= tol`.
    pub fn close(label: impl Into<String>, measured: f64, target: f64, tol: f64) -> Self {
        let pass = (measured - target).abs() <= tol;
        Check::new(
            label,
            format!("{measured:.12}"),
            format!("{target:.12} ± {tol:e}"),
            pass,
        )
    }

    /// `measured <= bound`.
    pub fn at_most(label: impl Into<String>, measured: f64, bound: f64) -> Self {
        Check::new(
            label,
            num(measured),
            format!("<= {}", num(bound)),
            measured <= bound,
        )
    }

    /// `measured >= bound`.
    pub fn at_least(label: impl Into<String>, measured: f64, bound: f64) -> Self {
        Check::new(
            label,
            num(measured),
            format!(">= {}", num(bound)),
            measured >= bound,
        )
    }

    /// `measured < bound` (strict).
    pub fn below(label: impl Into<String>, measured: f64, bound: f64) -> Self {
        Check::new(
            label,
            num(measured),
            format!("< {}", num(bound)),
            measured < bound,
        )
    }
}

#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub checks: Vec<Check>,
}

impl Outcome {
    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.pass)
    }
}

#[derive(Debug, Clone)]
pub struct Context {
    /// Worker threads for batch experiments.
    pub parallelism: usize,
}

impl Default for Context {
    fn default() -> Self {
        Context {
            parallelism: crate::config::default_parallelism(),
        }
    }
}

pub struct Criterion {
    pub number: u8,
    pub id: &'static str,
    pub title: &'static str,
    /// Implemented faithfully but not met; see the README.
    pub known_unattainable: bool,
    run: fn(&Context) -> CliResult<Outcome>,
}

impl Criterion {
    pub fn run(&self, ctx: &Context) -> Report<'_> {
        let start = Instant::now();
        let outcome = (self.run)(ctx).map_err(|e| e.to_string());
        Report {
            criterion: self,
            outcome,
            elapsed: start.elapsed(),
        }
    }
}

pub struct Report<'a> {
    pub criterion: &'a Criterion,
    pub outcome: Result<Outcome, String>,
    pub elapsed: Duration,
}

impl Report<'_> {
    pub fn passed(&self) -> bool {
        matches!(&self.outcome, Ok(o) if o.passed())
    }

    /// `criterion  4 lower-bound: PASS (3 checks, 0.1s)`.
    pub fn line(&self) -> String {
        let c = self.criterion;
        let status = if self.passed() { "PASS" } else { "FAIL" };
        let detail = match &self.outcome {
            Ok(o) => {
                let failed = o.checks.iter().filter(|c| !c.pass).count();
                format!("{} checks, {} failed", o.checks.len(), failed)
            }
            Err(e) => format!("error: {e}"),
        };
        let note = if c.known_unattainable && !self.passed() {
            " [known unattainable]"
        } else {
            ""
        };
        format!(
            "criterion {:>2} {:<22} {status} ({detail}, {:.1}s){note}",
            c.number,
            c.id,
            self.elapsed.as_secs_f64()
        )
    }

    /// Indented measured-vs-expected lines.
    pub fn details(&self) -> Vec<String> {
        match &self.outcome {
            Ok(o) => o
                .checks
                .iter()
                .map(|c| {
                    format!(
                        "    [{}] {}: {} (expected {})",
                        if c.pass { "ok" } else { "FAIL" },
                        c.label,
                        c.measured,
                        c.expected
                    )
                })
                .collect(),
            Err(e) => vec![format!("    [FAIL] {e}")],
        }
    }
}

static CRITERIA: [Criterion; 15] = [
    Criterion {
        number: 1,
        id: "stage-example",
        title: "complemented-basis example: stage values and weights",
        known_unattainable: false,
        run: exact::example_one,
    },
    Criterion {
        number: 2,
        id: "closed-form",
        title: "two-action closed form equals both recursions",
        known_unattainable: false,
        run: exact::closed_form,
    },
    Criterion {
        number: 3,
        id: "loss-space-separation",
        title: "basis space strictly below binary space for N=3; base case",
        known_unattainable: false,
        run: exact::separation,
    },
    Criterion {
        number: 4,
        id: "lower-bound",
        title: "scaled lower bound tends to sqrt(2) from above",
        known_unattainable: false,
        run: exact::lower_bound,
    },
    Criterion {
        number: 5,
        id: "value-bound",
        title: "V(0,T) <= c_N sqrt(T); Monte Carlo R",
        known_unattainable: false,
        run: exact::value_bound,
    },
    Criterion {
        number: 6,
        id: "random-horizon",
        title: "random-horizon value equals expected fixed value",
        known_unattainable: false,
        run: exact::random_horizon,
    },
    Criterion {
        number: 7,
        id: "properties",
        title: "value-function property suite",
        known_unattainable: false,
        run: exact::properties,
    },
    Criterion {
        number: 8,
        id: "last-round",
        title: "last-round heuristics suffer linear regret",
        known_unattainable: false,
        run: learning::last_round,
    },
    Criterion {
        number: 9,
        id: "ball-closed-form",
        title: "adaptive ball coefficient vs quadrature",
        known_unattainable: false,
        run: learning::ball_closed_form,
    },
    Criterion {
        number: 10,
        id: "regret-bounds",
        title: "adaptive learners within their leading-term bounds",
        known_unattainable: false,
        run: learning::regret_bounds,
    },
    Criterion {
        number: 11,
        id: "ball-regret-curves",
        title: "ball-game max-regret curves: ordering",
        known_unattainable: false,
        run: learning::ball_curves,
    },
    Criterion {
        number: 12,
        id: "large-d-limit",
        title: "pretend exponential weights at d=50 vs time-varying",
        known_unattainable: true,
        run: learning::large_d_limit,
    },
    Criterion {
        number: 13,
        id: "fpl-density",
        title: "FPL perturbation density and samplers",
        known_unattainable: false,
        run: learning::fpl_density,
    },
    Criterion {
        number: 14,
        id: "negative-priors",
        title: "uniform pretend prior is uninformative",
        known_unattainable: false,
        run: learning::negative_priors,
    },
    Criterion {
        number: 15,
        id: "determinism",
        title: "bench output is byte-identical across runs and thread counts",
        known_unattainable: false,
        run: determinism::determinism,
    },
];

pub fn all() -> &'static [Criterion] {
    &CRITERIA
}

/// Looks a criterion up by id or number.
pub fn find(key: &str) -> Option<&'static Criterion> {
    CRITERIA
        .iter()
        .find(|c| c.id == key || key.parse::<u8>().is_ok_and(|n| n == c.number))
}
