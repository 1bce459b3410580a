//! One handle over every placement rule, plus the game each rule plays.
//!
//! The verifier and the CLI work against [`Mechanism`]; the game decides how
//! a user scores an outcome and which misreports are available.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    raw_cost, raw_dual, raw_two_uav_term, Arena, Outcome, Placement, Preference, Profile,
    UserReport,
};
use crate::multi::{
    k_adverse_utility, k_obnoxious_endpoints, min_distance_cost, percentile_mechanism,
    two_uav_dual_mechanism,
};
use crate::oracle::opt_obnoxious;
use crate::single::MechanismKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Game {
    /// Single UAV, users minimize cost.
    Favorable,
    /// Single UAV, users maximize distance utility.
    Obnoxious,
    /// Single UAV, mixed preferences, unit weights.
    Dual,
    /// Two UAVs, a preference towards each.
    TwoUavDual,
    /// `k` UAVs, users maximize total distance utility.
    KObnoxious,
    /// `k` UAVs, users are served by the closest one.
    KFavorable,
}

impl Game {
    pub fn minimizes(self) -> bool {
        matches!(self, Game::Favorable | Game::KFavorable)
    }

    /// The true objective of `truth` under `outcome`. The report's own
    /// preference fields are its true type.
    pub fn user_objective(self, outcome: &Outcome, truth: &UserReport, arena: &Arena) -> f64 {
        let ps = outcome.placements();
        match self {
            Game::Favorable | Game::Obnoxious => raw_cost(&ps[0], truth, arena.alpha),
            Game::Dual => raw_dual(
                &ps[0],
                truth,
                truth.pref.expect("dual game requires a preference"),
                arena,
            ),
            Game::TwoUavDual => {
                let prefs = truth
                    .prefs
                    .expect("two-UAV game requires a preference pair");
                ps.iter()
                    .zip(prefs)
                    .map(|(p, pref)| raw_two_uav_term(p, truth, pref, arena))
                    .sum()
            }
            Game::KObnoxious => k_adverse_utility(outcome.as_multi().expect("multi"), truth, arena),
            Game::KFavorable => min_distance_cost(outcome.as_multi().expect("multi"), truth, arena),
        }
    }

    /// How much better `after` is than `before` for the user.
    pub fn gain(self, before: f64, after: f64) -> f64 {
        if self.minimizes() {
            before - after
        } else {
            after - before
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Mechanism {
    Single {
        rule: MechanismKind,
    },
    TwoUavDual,
    KEndpoints {
        k: usize,
    },
    Percentile {
        k: usize,
    },
    /// Places the UAV at the reported weighted mean. Optimal but manipulable.
    WeightedMeanBaseline,
    /// Places the UAV at the optimal obnoxious corner of the reports. Manipulable.
    OptimalCornerBaseline,
}

impl From<MechanismKind> for Mechanism {
    fn from(rule: MechanismKind) -> Self {
        Mechanism::Single { rule }
    }
}

pub const MECHANISM_NAMES: &[&str] = &[
    "median",
    "wmedian",
    "corner-w",
    "corner-u",
    "dual-majority",
    "two-uav-dual",
    "k-endpoints",
    "percentile",
    "wmean-baseline",
    "opt-corner-baseline",
];

impl Mechanism {
    /// Looks a mechanism up by its CLI name; `k` is used by the k-UAV rules.
    pub fn parse(name: &str, k: usize) -> Result<Self> {
        if let Ok(rule) = name.parse::<MechanismKind>() {
            return Ok(rule.into());
        }
        Ok(match name {
            "two-uav-dual" => Mechanism::TwoUavDual,
            "k-endpoints" => Mechanism::KEndpoints { k },
            "percentile" => Mechanism::Percentile { k },
            "wmean-baseline" => Mechanism::WeightedMeanBaseline,
            "opt-corner-baseline" => Mechanism::OptimalCornerBaseline,
            _ => return Err(Error::UnknownName(name.to_string())),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Mechanism::Single { rule } => rule.name(),
            Mechanism::TwoUavDual => "two-uav-dual",
            Mechanism::KEndpoints { .. } => "k-endpoints",
            Mechanism::Percentile { .. } => "percentile",
            Mechanism::WeightedMeanBaseline => "wmean-baseline",
            Mechanism::OptimalCornerBaseline => "opt-corner-baseline",
        }
    }

    pub fn game(&self) -> Game {
        match self {
            Mechanism::Single { rule } => match rule {
                MechanismKind::Median | MechanismKind::WeightedMedian => Game::Favorable,
                MechanismKind::WeightedCorner | MechanismKind::UnweightedCorner => Game::Obnoxious,
                MechanismKind::DualMajority => Game::Dual,
            },
            Mechanism::TwoUavDual => Game::TwoUavDual,
            Mechanism::KEndpoints { .. } => Game::KObnoxious,
            Mechanism::Percentile { .. } => Game::KFavorable,
            Mechanism::WeightedMeanBaseline => Game::Favorable,
            Mechanism::OptimalCornerBaseline => Game::Obnoxious,
        }
    }

    /// Baselines are optimal but not strategyproof.
    pub fn is_baseline(&self) -> bool {
        matches!(
            self,
            Mechanism::WeightedMeanBaseline | Mechanism::OptimalCornerBaseline
        )
    }

    pub fn place(&self, prof: &Profile) -> Result<Outcome> {
        Ok(match self {
            Mechanism::Single { rule } => Outcome::Single(rule.place(prof)?),
            Mechanism::TwoUavDual => Outcome::Multi(two_uav_dual_mechanism(prof)?),
            Mechanism::KEndpoints { k } => {
                Outcome::Multi(k_obnoxious_endpoints(*k, prof.arena(), None)?)
            }
            Mechanism::Percentile { k } => Outcome::Multi(percentile_mechanism(prof, *k)?),
            Mechanism::WeightedMeanBaseline => {
                let (x, y) = prof.weighted_mean();
                let a = prof.arena();
                Outcome::Single(Placement::in_arena(
                    a,
                    x.clamp(0.0, a.width()),
                    y.clamp(0.0, a.height()),
                ))
            }
            Mechanism::OptimalCornerBaseline => opt_obnoxious(prof)?.outcome,
        })
    }

    /// Preference declarations a user may make in this mechanism's game.
    pub(crate) fn preference_options(&self, truth: &UserReport) -> Vec<UserReport> {
        match self.game() {
            Game::Dual => Preference::ALL
                .iter()
                .map(|&p| truth.with_pref(p))
                .collect(),
            Game::TwoUavDual => Preference::ALL
                .iter()
                .flat_map(|&a| {
                    Preference::ALL
                        .iter()
                        .map(move |&b| truth.with_prefs([a, b]))
                })
                .collect(),
            _ => vec![*truth],
        }
    }
}

impl fmt::Display for Mechanism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mechanism::KEndpoints { k } | Mechanism::Percentile { k } => {
                write!(f, "{}(k={k})", self.name())
            }
            _ => f.write_str(self.name()),
        }
    }
}

impl FromStr for Mechanism {
    type Err = Error;

    /// Accepts `name` or `name:k` for the k-UAV rules (default `k = 2`).
    fn from_str(s: &str) -> Result<Self> {
        match s.split_once(':') {
            Some((name, k)) => {
                let k = k.parse().map_err(|_| Error::UnknownName(s.to_string()))?;
                Mechanism::parse(name, k)
            }
            None => Mechanism::parse(s, 2),
        }
    }
}
