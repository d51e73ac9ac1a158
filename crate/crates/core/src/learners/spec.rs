//! Text specs for learners: `name` or `name:key=value,key=value`.
//!
//! | name | keys |
//! |------|------|
//! | `fixed_minimax` | `T` |
//! | `random_horizon` | `lo`, `hi` |
//! | `pretend_hedge` | `d` (2.35), or `prior=uniform,hi` / `prior=geometric,p`; `two_stage` |
//! | `last_round_hedge` | |
//! | `ball_minimax` | `T` |
//! | `ball_adaptive` | |
//! | `ogd` | `scale` (2) |
//! | `last_round_ball` | |
//! | `doubling` | `base` (`ball_minimax`, `fixed_minimax` or `exp_weights`) |
//! | `exp_weights` | `mode` (`fixed`, `time_varying`, `pretend`), `T`, `d`, `b` |
//! | `fpl` | `d`, `b` |
//! | `first_order` | `d` |
//!
//! Any distribution-emitting Hedge learner also accepts `sampled=true`, which
//! plays one drawn action per round.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{
    BallAdaptive, BallMinimax, Doubling, ExpWeights, ExpWeightsMode, FirstOrder, FixedMinimaxHedge,
    FplPretend, LastRoundBall, LastRoundHedge, Learner, LearnerFactory, OgdBall,
    PriorAveragedHedge, Sampled, Setting,
};
use crate::error::{Error, Result};
use crate::priors::{
    exp_weights_optimal_b, fpl_default_b, FinitePrior, GeometricPrior, HorizonPrior,
};

/// Default exponent of the pretend Hedge prior.
pub const DEFAULT_PRETEND_D: f64 = 2.35;

/// A parsed learner spec; `Display` gives the canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct LearnerSpec {
    name: String,
    params: BTreeMap<String, String>,
}

const KNOWN: &[(&str, &[&str])] = &[
    ("fixed_minimax", &["T", "sampled"]),
    ("random_horizon", &["lo", "hi", "sampled"]),
    (
        "pretend_hedge",
        &["d", "prior", "hi", "p", "two_stage", "sampled"],
    ),
    ("last_round_hedge", &["sampled"]),
    ("ball_minimax", &["T"]),
    ("ball_adaptive", &[]),
    ("ogd", &["scale"]),
    ("last_round_ball", &[]),
    ("doubling", &["base"]),
    ("exp_weights", &["mode", "T", "d", "b", "sampled"]),
    ("fpl", &["d", "b"]),
    ("first_order", &["d", "sampled"]),
];

impl LearnerSpec {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn param(&self, key: &str) -> Option<&str> {
        self.params.get(key).map(String::as_str)
    }

    fn unknown(&self, why: impl fmt::Display) -> Error {
        Error::UnknownSpec(format!("{self}: {why}"))
    }

    fn f64_or(&self, key: &str, default: Option<f64>) -> Result<f64> {
        match self.param(key) {
            Some(v) => v
                .parse::<f64>()
                .map_err(|_| self.unknown(format!("`{key}` is not a number"))),
            None => default.ok_or_else(|| self.unknown(format!("missing `{key}`"))),
        }
    }

    fn u64_req(&self, key: &str) -> Result<u64> {
        let v = self
            .param(key)
            .ok_or_else(|| self.unknown(format!("missing `{key}`")))?;
        v.parse::<u64>()
            .map_err(|_| self.unknown(format!("`{key}` is not a positive integer")))
    }

    fn flag(&self, key: &str) -> Result<bool> {
        match self.param(key) {
            None | Some("false") => Ok(false),
            Some("true") | Some("") => Ok(true),
            Some(v) => Err(self.unknown(format!("`{key}={v}` is not a boolean"))),
        }
    }

    /// Game this learner plays.
    pub fn setting(&self) -> Setting {
        match self.name.as_str() {
            "ball_minimax" | "ball_adaptive" | "ogd" | "last_round_ball" => Setting::Ball,
            "doubling" if self.param("base") == Some("ball_minimax") => Setting::Ball,
            _ => Setting::Hedge,
        }
    }

    /// Instantiates the learner for `n` actions (or dimensions).
    pub fn build(&self, n: usize) -> Result<Box<dyn Learner>> {
        let learner: Box<dyn Learner> = match self.name.as_str() {
            "fixed_minimax" => Box::new(FixedMinimaxHedge::new(n, self.u64_req("T")?)?),
            "random_horizon" => {
                let prior = FinitePrior::uniform(self.u64_req("lo")?, self.u64_req("hi")?)?;
                Box::new(
                    PriorAveragedHedge::new(n, HorizonPrior::Finite(prior))?
                        .labeled(self.to_string()),
                )
            }
            "pretend_hedge" => {
                let prior = match self.param("prior") {
                    None | Some("power") => {
                        HorizonPrior::discrete(self.f64_or("d", Some(DEFAULT_PRETEND_D))?)?
                    }
                    Some("uniform") => {
                        HorizonPrior::Finite(FinitePrior::uniform(1, self.u64_req("hi")?)?)
                    }
                    Some("geometric") => {
                        HorizonPrior::Geometric(GeometricPrior::new(self.f64_or("p", None)?)?)
                    }
                    Some(other) => return Err(self.unknown(format!("unknown prior `{other}`"))),
                };
                let mut l = PriorAveragedHedge::new(n, prior)?.labeled(self.to_string());
                if self.flag("two_stage")? {
                    l = l.two_stage();
                }
                Box::new(l)
            }
            "last_round_hedge" => Box::new(LastRoundHedge::new(n)?),
            "ball_minimax" => Box::new(BallMinimax::new(n, self.u64_req("T")?)),
            "ball_adaptive" => Box::new(BallAdaptive::new(n)),
            "ogd" => Box::new(OgdBall::with_scale(n, self.f64_or("scale", Some(2.0))?)),
            "last_round_ball" => Box::new(LastRoundBall::new(n)),
            "doubling" => {
                let base = self.param("base").unwrap_or("ball_minimax").to_string();
                let factory: LearnerFactory =
                    match base.as_str() {
                        "ball_minimax" => Arc::new(move |t| {
                            Ok(Box::new(BallMinimax::new(n, t)) as Box<dyn Learner>)
                        }),
                        "fixed_minimax" => Arc::new(move |t| {
                            Ok(Box::new(FixedMinimaxHedge::new(n, t)?) as Box<dyn Learner>)
                        }),
                        "exp_weights" => Arc::new(move |t| {
                            Ok(Box::new(ExpWeights::fixed(n, t)?) as Box<dyn Learner>)
                        }),
                        other => {
                            return Err(self.unknown(format!("unsupported doubling base `{other}`")))
                        }
                    };
                Box::new(Doubling::new(factory, base)?)
            }
            "exp_weights" => {
                let mode = self.param("mode").unwrap_or("time_varying");
                let (mode, default_b) = match mode {
                    "fixed" => (
                        ExpWeightsMode::Fixed {
                            horizon: self.u64_req("T")?,
                        },
                        8.0,
                    ),
                    "time_varying" => (ExpWeightsMode::TimeVarying, 8.0),
                    "pretend" => {
                        let d = self.f64_or("d", Some(4.0))?;
                        (ExpWeightsMode::Pretend { d }, exp_weights_optimal_b(d))
                    }
                    other => return Err(self.unknown(format!("unknown mode `{other}`"))),
                };
                Box::new(ExpWeights::new(
                    n,
                    mode,
                    self.f64_or("b", Some(default_b))?,
                )?)
            }
            "fpl" => {
                let d = self.f64_or("d", Some(1.0 + 3f64.sqrt() / 2.0))?;
                Box::new(FplPretend::new(
                    n,
                    d,
                    self.f64_or("b", Some(fpl_default_b(d)))?,
                )?)
            }
            "first_order" => Box::new(FirstOrder::new(
                n,
                self.f64_or("d", Some(FirstOrder::default_d()))?,
            )?),
            other => return Err(Error::UnknownSpec(format!("unknown learner `{other}`"))),
        };
        if self.flag("sampled")? && !learner.is_randomized() {
            return Ok(Box::new(Sampled::new(learner)));
        }
        Ok(learner)
    }
}

/// Splits `name:key=value,...` and checks keys against `known`.
pub(crate) fn parse_spec(
    s: &str,
    known: &[(&str, &[&str])],
) -> Result<(String, BTreeMap<String, String>)> {
    let s = s.trim();
    let (name, rest) = match s.split_once(':') {
        Some((n, r)) => (n.trim(), Some(r)),
        None => (s, None),
    };
    let allowed = known
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, keys)| *keys)
        .ok_or_else(|| Error::UnknownSpec(format!("unknown name `{name}`")))?;
    let mut params = BTreeMap::new();
    for item in rest.into_iter().flat_map(|r| r.split(',')).map(str::trim) {
        if item.is_empty() {
            continue;
        }
        let (k, v) = item.split_once('=').unwrap_or((item, ""));
        let (k, v) = (k.trim(), v.trim());
        if !allowed.contains(&k) {
            return Err(Error::UnknownSpec(format!(
                "`{name}` takes no parameter `{k}`"
            )));
        }
        if params.insert(k.to_string(), v.to_string()).is_some() {
            return Err(Error::UnknownSpec(format!("parameter `{k}` given twice")));
        }
    }
    Ok((name.to_string(), params))
}

pub(crate) fn fmt_spec(
    f: &mut fmt::Formatter<'_>,
    name: &str,
    params: &BTreeMap<String, String>,
) -> fmt::Result {
    f.write_str(name)?;
    for (i, (k, v)) in params.iter().enumerate() {
        f.write_str(if i == 0 { ":" } else { "," })?;
        if v.is_empty() {
            write!(f, "{k}")?;
        } else {
            write!(f, "{k}={v}")?;
        }
    }
    Ok(())
}

impl FromStr for LearnerSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, params) = parse_spec(s, KNOWN)?;
        Ok(LearnerSpec { name, params })
    }
}

impl fmt::Display for LearnerSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_spec(f, &self.name, &self.params)
    }
}

impl TryFrom<String> for LearnerSpec {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<LearnerSpec> for String {
    fn from(s: LearnerSpec) -> String {
        s.to_string()
    }
}
