//! Adversaries for both games, and their text specs.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, RngCore};
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learners::{fmt_spec, parse_spec, Decision, Setting};
use crate::types::l2_norm;

/// Emits each round's loss object after seeing the learner's decision.
pub trait Adversary: Send {
    fn setting(&self) -> Setting;

    fn n(&self) -> usize;

    fn name(&self) -> String;

    /// Loss vector (Hedge) or point (ball) for `round`, 1-based.
    fn respond(
        &mut self,
        round: u64,
        decision: &Decision,
        rng: &mut dyn RngCore,
    ) -> Result<Vec<f64>>;

    fn boxed_clone(&self) -> Box<dyn Adversary>;
}

impl Clone for Box<dyn Adversary> {
    fn clone(&self) -> Self {
        self.boxed_clone()
    }
}

fn basis(n: usize, i: usize) -> Vec<f64> {
    let mut z = vec![0.0; n];
    z[i] = 1.0;
    z
}

macro_rules! adversary_common {
    ($setting:expr, $name:expr) => {
        fn setting(&self) -> Setting {
            $setting(self)
        }

        fn n(&self) -> usize {
            self.n
        }

        fn name(&self) -> String {
            $name(self)
        }

        fn boxed_clone(&self) -> Box<dyn Adversary> {
            Box::new(self.clone())
        }
    };
}

/// Zero loss every round.
#[derive(Debug, Clone)]
pub struct Zero {
    pub n: usize,
    pub setting: Setting,
}

impl Adversary for Zero {
    adversary_common!(|s: &Self| s.setting, |_| "zero".to_string());

    fn respond(&mut self, _round: u64, _d: &Decision, _rng: &mut dyn RngCore) -> Result<Vec<f64>> {
        Ok(vec![0.0; self.n])
    }
}

/// `e_1, e_2, e_1, e_2, ...`.
#[derive(Debug, Clone)]
pub struct AlternatingBasis {
    pub n: usize,
}

impl Adversary for AlternatingBasis {
    adversary_common!(|_| Setting::Hedge, |_| "alternating".to_string());

    fn respond(&mut self, round: u64, _d: &Decision, _rng: &mut dyn RngCore) -> Result<Vec<f64>> {
        Ok(basis(self.n, ((round - 1) % 2) as usize))
    }
}

/// Ball points `e_1, -e_1, e_1, ...`.
#[derive(Debug, Clone)]
pub struct AlternatingSign {
    pub n: usize,
}

impl Adversary for AlternatingSign {
    adversary_common!(|_| Setting::Ball, |_| "alternating_sign".to_string());

    fn respond(&mut self, round: u64, _d: &Decision, _rng: &mut dyn RngCore) -> Result<Vec<f64>> {
        let mut z = vec![0.0; self.n];
        z[0] = if round % 2 == 1 { 1.0 } else { -1.0 };
        Ok(z)
    }
}

/// A uniformly drawn basis vector each round.
#[derive(Debug, Clone)]
pub struct RandomBasis {
    pub n: usize,
}

impl Adversary for RandomBasis {
    adversary_common!(|_| Setting::Hedge, |_| "random_basis".to_string());

    fn respond(&mut self, _round: u64, _d: &Decision, rng: &mut dyn RngCore) -> Result<Vec<f64>> {
        Ok(basis(self.n, rng.gen_range(0..self.n)))
    }
}

/// Independent `U[0, 1]` losses; action `i` is scaled by `scales[i]`.
#[derive(Debug, Clone)]
pub struct RandomCube {
    pub n: usize,
    pub scales: Vec<f64>,
}

impl RandomCube {
    pub fn new(n: usize) -> Self {
        RandomCube {
            n,
            scales: vec![1.0; n],
        }
    }
}

impl Adversary for RandomCube {
    adversary_common!(|_| Setting::Hedge, |_| "random_cube".to_string());

    fn respond(&mut self, _round: u64, _d: &Decision, rng: &mut dyn RngCore) -> Result<Vec<f64>> {
        Ok(self.scales.iter().map(|s| s * rng.gen::<f64>()).collect())
    }
}

/// Uniform points on the unit sphere, or inside the unit ball.
#[derive(Debug, Clone)]
pub struct RandomBall {
    pub n: usize,
    pub surface: bool,
}

impl Adversary for RandomBall {
    adversary_common!(|_| Setting::Ball, |s: &Self| if s.surface {
        "sphere"
    } else {
        "ball"
    }
    .to_string());

    fn respond(&mut self, _round: u64, _d: &Decision, rng: &mut dyn RngCore) -> Result<Vec<f64>> {
        let mut z: Vec<f64> = (0..self.n).map(|_| rng.sample(StandardNormal)).collect();
        let mut norm = l2_norm(&z);
        while norm == 0.0 {
            z = (0..self.n).map(|_| rng.sample(StandardNormal)).collect();
            norm = l2_norm(&z);
        }
        let radius = if self.surface {
            1.0
        } else {
            rng.gen::<f64>().powf(1.0 / self.n as f64)
        };
        z.iter_mut().for_each(|x| *x *= radius / norm);
        Ok(z)
    }
}

/// Puts the unit loss on the action the learner weights most (lowest index on ties).
#[derive(Debug, Clone)]
pub struct Greedy {
    pub n: usize,
}

impl Adversary for Greedy {
    adversary_common!(|_| Setting::Hedge, |_| "greedy".to_string());

    fn respond(&mut self, _round: u64, d: &Decision, _rng: &mut dyn RngCore) -> Result<Vec<f64>> {
        let p = match d {
            Decision::Distribution(p) => p,
            _ => {
                return Err(Error::SettingMismatch(
                    "greedy adversary needs a distribution".into(),
                ))
            }
        };
        let mut best = 0;
        for i in 1..self.n {
            if p[i] > p[best] {
                best = i;
            }
        }
        Ok(basis(self.n, best))
    }
}

/// Plays a fixed sequence.
#[derive(Debug, Clone)]
pub struct Replay {
    pub n: usize,
    pub setting: Setting,
    pub sequence: Vec<Vec<f64>>,
}

impl Replay {
    pub fn new(setting: Setting, sequence: Vec<Vec<f64>>) -> Result<Self> {
        let n = sequence.first().map_or(0, Vec::len);
        if n == 0 || sequence.iter().any(|z| z.len() != n) {
            return Err(Error::domain(
                "replay sequence must be nonempty with equal-length rows",
            ));
        }
        Ok(Replay {
            n,
            setting,
            sequence,
        })
    }
}

impl Adversary for Replay {
    adversary_common!(|s: &Self| s.setting, |_| "replay".to_string());

    fn respond(&mut self, round: u64, _d: &Decision, _rng: &mut dyn RngCore) -> Result<Vec<f64>> {
        self.sequence
            .get(round as usize - 1)
            .cloned()
            .ok_or_else(|| Error::domain(format!("replay sequence ends before round {round}")))
    }
}

/// Checks a loss object against the game's constraints.
pub fn check_legal(setting: Setting, z: &[f64]) -> Result<()> {
    let ok = match setting {
        Setting::Hedge => z.iter().all(|&x| (0.0..=1.0).contains(&x)),
        Setting::Ball => z.iter().all(|x| x.is_finite()) && l2_norm(z) <= 1.0 + 1e-12,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::domain(format!("illegal {setting:?} loss {z:?}")))
    }
}

const KNOWN: &[(&str, &[&str])] = &[
    ("zero", &[]),
    ("alternating", &[]),
    ("alternating_sign", &[]),
    ("random_basis", &[]),
    ("random_cube", &[]),
    ("sphere", &[]),
    ("ball", &[]),
    ("greedy", &[]),
];

/// Parsed adversary spec: one of `zero`, `alternating`, `alternating_sign`,
/// `random_basis`, `random_cube`, `sphere`, `ball`, `greedy`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct AdversarySpec {
    name: String,
    params: BTreeMap<String, String>,
}

impl AdversarySpec {
    pub fn name(&self) -> &str {
        &self.name
    }

    /// `setting` is used only by `zero`, which fits either game.
    pub fn build(&self, n: usize, setting: Setting) -> Result<Box<dyn Adversary>> {
        Ok(match self.name.as_str() {
            "zero" => Box::new(Zero { n, setting }),
            "alternating" => Box::new(AlternatingBasis { n }),
            "alternating_sign" => Box::new(AlternatingSign { n }),
            "random_basis" => Box::new(RandomBasis { n }),
            "random_cube" => Box::new(RandomCube::new(n)),
            "sphere" => Box::new(RandomBall { n, surface: true }),
            "ball" => Box::new(RandomBall { n, surface: false }),
            "greedy" => Box::new(Greedy { n }),
            other => return Err(Error::UnknownSpec(format!("unknown adversary `{other}`"))),
        })
    }
}

impl FromStr for AdversarySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, params) = parse_spec(s, KNOWN)?;
        Ok(AdversarySpec { name, params })
    }
}

impl fmt::Display for AdversarySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_spec(f, &self.name, &self.params)
    }
}

impl TryFrom<String> for AdversarySpec {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<AdversarySpec> for String {
    fn from(s: AdversarySpec) -> String {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::ActionDistribution;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn every_adversary_is_legal() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let d = Decision::Distribution(ActionDistribution::uniform(5));
        for name in [
            "zero",
            "alternating",
            "alternating_sign",
            "random_basis",
            "random_cube",
            "sphere",
            "ball",
            "greedy",
        ] {
            let spec: AdversarySpec = name.parse().unwrap();
            let mut a = spec.build(5, Setting::Hedge).unwrap();
            for round in 1..=200 {
                let z = a.respond(round, &d, &mut rng).unwrap();
                assert_eq!(z.len(), 5);
                check_legal(a.setting(), &z).unwrap();
            }
        }
    }

    #[test]
    fn sphere_points_have_unit_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut a = RandomBall {
            n: 10,
            surface: true,
        };
        let d = Decision::Point(vec![0.0; 10]);
        for round in 1..=100 {
            assert!((l2_norm(&a.respond(round, &d, &mut rng).unwrap()) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn greedy_hits_heaviest_action() {
        let mut a = Greedy { n: 3 };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let d = Decision::Distribution(ActionDistribution::new(vec![0.2, 0.5, 0.3]).unwrap());
        assert_eq!(a.respond(1, &d, &mut rng).unwrap(), vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn illegal_losses_rejected() {
        assert!(check_legal(Setting::Hedge, &[1.5, 0.0]).is_err());
        assert!(check_legal(Setting::Ball, &[0.8, 0.8]).is_err());
        assert!("sphere:x=1".parse::<AdversarySpec>().is_err());
    }
}
