//! Single-UAV mechanisms.
//!
//! Every mechanism decides each axis independently. The median rules return
//! one of the reported coordinates; the corner and majority rules return an
//! endpoint of the axis. Region membership is decided with exact comparisons
//! against `A` and `B`: the interval endpoints are part of each rule.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Placement, Preference, Profile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MechanismKind {
    Median,
    WeightedMedian,
    WeightedCorner,
    UnweightedCorner,
    DualMajority,
}

impl MechanismKind {
    pub const ALL: [MechanismKind; 5] = [
        MechanismKind::Median,
        MechanismKind::WeightedMedian,
        MechanismKind::WeightedCorner,
        MechanismKind::UnweightedCorner,
        MechanismKind::DualMajority,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MechanismKind::Median => "median",
            MechanismKind::WeightedMedian => "wmedian",
            MechanismKind::WeightedCorner => "corner-w",
            MechanismKind::UnweightedCorner => "corner-u",
            MechanismKind::DualMajority => "dual-majority",
        }
    }

    pub fn place(self, prof: &Profile) -> Result<Placement> {
        match self {
            MechanismKind::Median => median_mechanism(prof),
            MechanismKind::WeightedMedian => weighted_median_mechanism(prof),
            MechanismKind::WeightedCorner => weighted_corner_mechanism(prof),
            MechanismKind::UnweightedCorner => unweighted_corner_mechanism(prof),
            MechanismKind::DualMajority => dual_majority_mechanism(prof),
        }
    }

    /// Mechanisms whose output never depends on reported weights.
    pub fn is_weight_blind(self) -> bool {
        matches!(
            self,
            MechanismKind::Median | MechanismKind::UnweightedCorner
        )
    }
}

impl fmt::Display for MechanismKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MechanismKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MechanismKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::UnknownName(s.to_string()))
    }
}

fn non_empty(prof: &Profile) -> Result<()> {
    if prof.is_empty() {
        Err(Error::EmptyProfile)
    } else {
        Ok(())
    }
}

/// The `(n/2)`-th smallest value for even `n`, the middle one for odd `n`.
pub fn lower_median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    let mid = (v.len() - 1) / 2;
    let (_, m, _) = v.select_nth_unstable_by(mid, f64::total_cmp);
    *m
}

/// Weighted median: sort ascending (stable, so equal coordinates keep user
/// order) and return the first coordinate `q` whose prefix weight reaches the
/// weight strictly after it, i.e. `sum_{i<=q} w >= sum_{i>q} w`.
pub fn weighted_median(values: &[f64], weights: &[f64]) -> f64 {
    assert_eq!(values.len(), weights.len());
    assert!(!values.is_empty());
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));

    let n = order.len();
    // prefix[q] = sum of the first q sorted weights, suffix[q] = sum from q on.
    let mut prefix = vec![0.0; n + 1];
    for (q, &i) in order.iter().enumerate() {
        prefix[q + 1] = prefix[q] + weights[i];
    }
    let mut suffix = vec![0.0; n + 1];
    for (q, &i) in order.iter().enumerate().rev() {
        suffix[q] = suffix[q + 1] + weights[i];
    }

    let q = (1..=n)
        .find(|&q| prefix[q] >= suffix[q])
        .expect("the full prefix always dominates an empty suffix");
    // The second defining inequality, sum_{i<q} w < sum_{i>=q} w.
    assert!(
        prefix[q - 1] < suffix[q - 1],
        "weighted median index not unique"
    );
    values[order[q - 1]]
}

/// Coordinate-wise median of the reports; weights are ignored.
pub fn median_mechanism(prof: &Profile) -> Result<Placement> {
    non_empty(prof)?;
    let xs: Vec<f64> = prof.users().iter().map(|u| u.x).collect();
    let ys: Vec<f64> = prof.users().iter().map(|u| u.y).collect();
    Ok(Placement::in_arena(
        prof.arena(),
        lower_median(&xs),
        lower_median(&ys),
    ))
}

/// Coordinate-wise weighted median.
pub fn weighted_median_mechanism(prof: &Profile) -> Result<Placement> {
    non_empty(prof)?;
    let xs: Vec<f64> = prof.users().iter().map(|u| u.x).collect();
    let ys: Vec<f64> = prof.users().iter().map(|u| u.y).collect();
    let ws: Vec<f64> = prof.users().iter().map(|u| u.w).collect();
    Ok(Placement::in_arena(
        prof.arena(),
        weighted_median(&xs, &ws),
        weighted_median(&ys, &ws),
    ))
}

/// Puts the UAV at the endpoint facing the lighter half: `0` when the weight
/// in `[0, half)` is at most the weight in `[half, 2*half]`, otherwise `2*half`.
fn lighter_side(coords: impl Iterator<Item = (f64, f64)>, half: f64) -> f64 {
    let (mut low, mut high) = (0.0, 0.0);
    for (c, w) in coords {
        if c < half {
            low += w;
        } else {
            high += w;
        }
    }
    if low <= high {
        0.0
    } else {
        2.0 * half
    }
}

pub fn weighted_corner_mechanism(prof: &Profile) -> Result<Placement> {
    non_empty(prof)?;
    let a = prof.arena();
    let x = lighter_side(prof.users().iter().map(|u| (u.x, u.w)), a.half_width);
    let y = lighter_side(prof.users().iter().map(|u| (u.y, u.w)), a.half_height);
    Ok(Placement::in_arena(a, x, y))
}

/// As [`weighted_corner_mechanism`] but every user counts once.
pub fn unweighted_corner_mechanism(prof: &Profile) -> Result<Placement> {
    non_empty(prof)?;
    let a = prof.arena();
    let x = lighter_side(prof.users().iter().map(|u| (u.x, 1.0)), a.half_width);
    let y = lighter_side(prof.users().iter().map(|u| (u.y, 1.0)), a.half_height);
    Ok(Placement::in_arena(a, x, y))
}

/// Majority vote between the two endpoints of one axis.
///
/// Favorable users at or above `half` and adverse users at or below it want
/// the far endpoint `2*half`; everyone else wants `0`. Ties go to `2*half`.
fn majority_side(coords: impl Iterator<Item = (f64, Preference)>, half: f64) -> f64 {
    let (mut high, mut low) = (0usize, 0usize);
    for (c, pref) in coords {
        let wants_high = match pref {
            Preference::Favorable => c >= half,
            Preference::Adverse => c <= half,
        };
        if wants_high {
            high += 1;
        } else {
            low += 1;
        }
    }
    if high >= low {
        2.0 * half
    } else {
        0.0
    }
}

/// Dual-preference majority rule. Unit weights only.
pub fn dual_majority_mechanism(prof: &Profile) -> Result<Placement> {
    non_empty(prof)?;
    prof.require_unit_weights()?;
    let prefs = prof.preferences()?;
    let a = prof.arena();
    let users = prof.users();
    let x = majority_side(
        users.iter().zip(&prefs).map(|(u, &p)| (u.x, p)),
        a.half_width,
    );
    let y = majority_side(
        users.iter().zip(&prefs).map(|(u, &p)| (u.y, p)),
        a.half_height,
    );
    Ok(Placement::in_arena(a, x, y))
}
