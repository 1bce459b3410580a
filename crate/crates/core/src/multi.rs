//! Mechanisms for several UAVs.
//!
//! * [`two_uav_dual_mechanism`]: two UAVs, users hold a preference towards each.
//! * [`k_obnoxious_endpoints`]: `k` obnoxious UAVs split between two opposite corners.
//! * [`percentile_mechanism`]: `k` favorable UAVs at evenly spaced weighted percentiles.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::model::{
    distance_power, Arena, MultiPlacement, Placement, Preference, Profile, UserReport,
};

/// Cap on the number of unit users after integer rescaling of weights.
pub const MAX_EXPANDED_UNITS: u64 = 1_000_000;

/// Membership of a user in one of the eight sets spanned by
/// `{[0, A], (A, 2A]} x {(1,1), (1,2), (2,1), (2,2)}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum QSet {
    Q1,
    Q2,
    Q3,
    Q4,
    Q5,
    Q6,
    Q7,
    Q8,
}

impl QSet {
    pub fn classify(coord: f64, half: f64, prefs: [Preference; 2]) -> QSet {
        use Preference::*;
        let low = coord <= half;
        match (low, prefs) {
            (true, [Favorable, Favorable]) => QSet::Q1,
            (true, [Favorable, Adverse]) => QSet::Q2,
            (true, [Adverse, Favorable]) => QSet::Q3,
            (true, [Adverse, Adverse]) => QSet::Q4,
            (false, [Favorable, Favorable]) => QSet::Q5,
            (false, [Favorable, Adverse]) => QSet::Q6,
            (false, [Adverse, Favorable]) => QSet::Q7,
            (false, [Adverse, Adverse]) => QSet::Q8,
        }
    }

    /// 1-based set number.
    pub fn number(self) -> usize {
        self as usize + 1
    }
}

/// Per-axis Q-set of every user, in profile order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QSetClassification {
    pub x: Vec<QSet>,
    pub y: Vec<QSet>,
}

impl QSetClassification {
    pub fn of(prof: &Profile) -> Result<Self> {
        let prefs = prof.preference_pairs()?;
        let a = prof.arena();
        let users = prof.users();
        Ok(QSetClassification {
            x: users
                .iter()
                .zip(&prefs)
                .map(|(u, &p)| QSet::classify(u.x, a.half_width, p))
                .collect(),
            y: users
                .iter()
                .zip(&prefs)
                .map(|(u, &p)| QSet::classify(u.y, a.half_height, p))
                .collect(),
        })
    }

    /// Counts per set, indexed by `QSet::number() - 1`.
    pub fn counts(sets: &[QSet]) -> [usize; 8] {
        let mut c = [0; 8];
        for s in sets {
            c[*s as usize] += 1;
        }
        c
    }
}

/// `(0, 2*half)` when `|Q2| + |Q7| >= |Q3| + |Q6|`, else `(2*half, 0)`.
fn two_uav_axis(sets: &[QSet], half: f64) -> (f64, f64) {
    let c = QSetClassification::counts(sets);
    let (q2, q3, q6, q7) = (c[1], c[2], c[5], c[6]);
    if q2 + q7 >= q3 + q6 {
        (0.0, 2.0 * half)
    } else {
        (2.0 * half, 0.0)
    }
}

fn resolve_altitudes(arena: &Arena, k: usize, altitudes: Option<&[f64]>) -> Result<Vec<f64>> {
    match altitudes {
        None => Ok(vec![arena.altitude; k]),
        Some(zs) if zs.len() == k => {
            if let Some(z) = zs.iter().find(|z| !(z.is_finite() && **z >= 0.0)) {
                return Err(domain(format!(
                    "UAV altitude must be non-negative, got {z}"
                )));
            }
            Ok(zs.to_vec())
        }
        Some(zs) => Err(domain(format!("expected {k} altitudes, got {}", zs.len()))),
    }
}

/// Two-UAV dual-preference mechanism with both UAVs at the arena altitude.
pub fn two_uav_dual_mechanism(prof: &Profile) -> Result<MultiPlacement> {
    two_uav_dual_mechanism_at(prof, None)
}

/// Two-UAV dual-preference mechanism with explicit altitudes `[Z1, Z2]`.
pub fn two_uav_dual_mechanism_at(
    prof: &Profile,
    altitudes: Option<&[f64]>,
) -> Result<MultiPlacement> {
    let a = prof.arena();
    if a.alpha != 2.0 {
        return Err(Error::Unsupported(format!(
            "the two-UAV game is defined for alpha = 2, got {}",
            a.alpha
        )));
    }
    prof.require_unit_weights()?;
    let zs = resolve_altitudes(a, 2, altitudes)?;
    let q = QSetClassification::of(prof)?;
    let (x1, x2) = two_uav_axis(&q.x, a.half_width);
    let (y1, y2) = two_uav_axis(&q.y, a.half_height);
    MultiPlacement::new(vec![
        Placement::new(x1, y1, zs[0]),
        Placement::new(x2, y2, zs[1]),
    ])
}

/// `k` obnoxious UAVs: the first `ceil(k/2)` at `(0, 0)`, the rest at `(2A, 2B)`.
/// The output does not depend on any report.
pub fn k_obnoxious_endpoints(
    k: usize,
    a: &Arena,
    altitudes: Option<&[f64]>,
) -> Result<MultiPlacement> {
    if k == 0 {
        return Err(domain("k must be at least 1"));
    }
    let zs = resolve_altitudes(a, k, altitudes)?;
    let at_origin = k.div_ceil(2);
    MultiPlacement::new(
        zs.iter()
            .enumerate()
            .map(|(j, &z)| {
                if j < at_origin {
                    Placement::new(0.0, 0.0, z)
                } else {
                    Placement::new(a.width(), a.height(), z)
                }
            })
            .collect(),
    )
}

/// Exact rational reading of a weight: the smallest-denominator fraction that
/// rounds to the same `f64`.
fn as_fraction(w: f64) -> Option<(u64, u64)> {
    // Continued-fraction convergents of w.
    let (mut p0, mut q0, mut p1, mut q1) = (0u64, 1u64, 1u64, 0u64);
    let mut rest = w;
    for _ in 0..64 {
        let a = rest.floor();
        if a > 1e15 {
            return None;
        }
        let a = a as u64;
        let p2 = a.checked_mul(p1)?.checked_add(p0)?;
        let q2 = a.checked_mul(q1)?.checked_add(q0)?;
        if q2 > MAX_EXPANDED_UNITS {
            return None;
        }
        if p2 as f64 / q2 as f64 == w {
            return Some((p2, q2));
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let frac = rest - a as f64;
        if frac <= 0.0 {
            return None;
        }
        rest = 1.0 / frac;
    }
    None
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Percentiles `p_j = j / (k + 1)` together with the integer unit weights of
/// the virtual expansion `Lambda`.
///
/// Weights are read as exact fractions, multiplied by their least common
/// denominator and divided by the common factor of the results, so the
/// expansion is the smallest integer profile with the reported weight ratios.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PercentileSchedule {
    pub k: usize,
    pub units: Vec<u64>,
    pub total_units: u64,
}

impl PercentileSchedule {
    pub fn new(k: usize, weights: &[f64]) -> Result<Self> {
        if k == 0 {
            return Err(domain("k must be at least 1"));
        }
        if weights.is_empty() {
            return Err(Error::EmptyProfile);
        }
        let mut fractions = Vec::with_capacity(weights.len());
        for &w in weights {
            let f = as_fraction(w).ok_or_else(|| {
                Error::WeightRescale(format!(
                    "weight {w} has no exact fraction with denominator <= {MAX_EXPANDED_UNITS}"
                ))
            })?;
            fractions.push(f);
        }
        let mut lcd = 1u64;
        for &(_, q) in &fractions {
            lcd = lcd / gcd(lcd, q) * q;
            if lcd > MAX_EXPANDED_UNITS {
                return Err(Error::WeightRescale(format!(
                    "common denominator exceeds {MAX_EXPANDED_UNITS}"
                )));
            }
        }
        let mut units: Vec<u64> = fractions.iter().map(|&(p, q)| p * (lcd / q)).collect();
        let common = units.iter().fold(0, |g, &u| gcd(g, u));
        units.iter_mut().for_each(|u| *u /= common);
        let total_units = units
            .iter()
            .try_fold(0u64, |acc, &u| acc.checked_add(u))
            .filter(|&t| t <= MAX_EXPANDED_UNITS)
            .ok_or_else(|| {
                Error::WeightRescale(format!(
                    "expanded profile exceeds {MAX_EXPANDED_UNITS} units"
                ))
            })?;
        Ok(PercentileSchedule {
            k,
            units,
            total_units,
        })
    }

    /// `p_j` for `j = 1..=k`.
    pub fn percentile(&self, j: usize) -> f64 {
        j as f64 / (self.k + 1) as f64
    }

    /// 1-based position `floor((W - 1) * j / (k + 1)) + 1` in the expansion.
    pub fn index(&self, j: usize) -> u64 {
        (self.total_units - 1) * j as u64 / (self.k as u64 + 1) + 1
    }

    /// Picks the scheduled order statistics of `coords` without materializing
    /// the expansion. The result is non-decreasing in `j`.
    pub fn select(&self, coords: &[f64]) -> Vec<f64> {
        assert_eq!(coords.len(), self.units.len());
        let mut order: Vec<usize> = (0..coords.len()).collect();
        order.sort_by(|&a, &b| coords[a].total_cmp(&coords[b]));
        let mut out = Vec::with_capacity(self.k);
        let mut cursor = 0;
        let mut reached = self.units[order[0]];
        for j in 1..=self.k {
            let target = self.index(j);
            while reached < target {
                cursor += 1;
                reached += self.units[order[cursor]];
            }
            out.push(coords[order[cursor]]);
        }
        out
    }
}

/// Percentile mechanism for `k` favorable UAVs at the arena altitude.
pub fn percentile_mechanism(prof: &Profile, k: usize) -> Result<MultiPlacement> {
    percentile_mechanism_at(prof, k, None)
}

pub fn percentile_mechanism_at(
    prof: &Profile,
    k: usize,
    altitudes: Option<&[f64]>,
) -> Result<MultiPlacement> {
    let weights: Vec<f64> = prof.users().iter().map(|u| u.w).collect();
    let schedule = PercentileSchedule::new(k, &weights)?;
    let zs = resolve_altitudes(prof.arena(), k, altitudes)?;
    let xs: Vec<f64> = prof.users().iter().map(|u| u.x).collect();
    let ys: Vec<f64> = prof.users().iter().map(|u| u.y).collect();
    let (px, py) = (schedule.select(&xs), schedule.select(&ys));
    MultiPlacement::new(
        px.into_iter()
            .zip(py)
            .zip(zs)
            .map(|((x, y), z)| Placement::new(x, y, z))
            .collect(),
    )
}

/// Cost of a favorable user served by its closest UAV.
pub fn min_distance_cost(mp: &MultiPlacement, u: &UserReport, a: &Arena) -> f64 {
    mp.placements()
        .iter()
        .map(|p| u.w * distance_power(u.x - p.x, u.y - p.y, p.z, a.alpha))
        .fold(f64::INFINITY, f64::min)
}

/// Utility of an adverse user summed over all UAVs.
pub fn k_adverse_utility(mp: &MultiPlacement, u: &UserReport, a: &Arena) -> f64 {
    mp.placements()
        .iter()
        .map(|p| u.w * distance_power(u.x - p.x, u.y - p.y, p.z, a.alpha))
        .sum()
}

pub fn social_min_distance_cost(prof: &Profile, mp: &MultiPlacement) -> f64 {
    prof.users()
        .iter()
        .map(|u| min_distance_cost(mp, u, prof.arena()))
        .sum()
}

pub fn social_utility_k_adverse(prof: &Profile, mp: &MultiPlacement) -> f64 {
    prof.users()
        .iter()
        .map(|u| k_adverse_utility(mp, u, prof.arena()))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use Preference::*;

    fn pair_profile(users: &[(f64, [Preference; 2])]) -> Profile {
        Profile::new(
            Arena::unit(),
            users
                .iter()
                .map(|&(x, p)| UserReport::at(x, 0.1).with_prefs(p))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn classification_table() {
        assert_eq!(QSet::classify(0.5, 0.5, [Favorable, Favorable]), QSet::Q1);
        assert_eq!(QSet::classify(0.2, 0.5, [Favorable, Adverse]), QSet::Q2);
        assert_eq!(QSet::classify(0.3, 0.5, [Adverse, Favorable]), QSet::Q3);
        assert_eq!(QSet::classify(0.0, 0.5, [Adverse, Adverse]), QSet::Q4);
        assert_eq!(QSet::classify(0.51, 0.5, [Favorable, Favorable]), QSet::Q5);
        assert_eq!(QSet::classify(0.9, 0.5, [Favorable, Adverse]), QSet::Q6);
        assert_eq!(QSet::classify(0.8, 0.5, [Adverse, Favorable]), QSet::Q7);
        assert_eq!(QSet::classify(1.0, 0.5, [Adverse, Adverse]), QSet::Q8);
        assert_eq!(QSet::Q8.number(), 8);
    }

    #[test]
    fn two_uav_examples() {
        let p = pair_profile(&[
            (0.2, [Favorable, Adverse]),
            (0.8, [Adverse, Favorable]),
            (0.3, [Adverse, Favorable]),
        ]);
        let q = QSetClassification::of(&p).unwrap();
        assert_eq!(q.x, vec![QSet::Q2, QSet::Q7, QSet::Q3]);
        let mp = two_uav_dual_mechanism(&p).unwrap();
        assert_eq!((mp.placements()[0].x, mp.placements()[1].x), (0.0, 1.0));

        let p = pair_profile(&[(0.3, [Favorable, Favorable]), (0.9, [Adverse, Adverse])]);
        let mp = two_uav_dual_mechanism(&p).unwrap();
        assert_eq!((mp.placements()[0].x, mp.placements()[1].x), (0.0, 1.0));

        let p = pair_profile(&[(0.3, [Adverse, Favorable]), (0.4, [Adverse, Favorable])]);
        let mp = two_uav_dual_mechanism(&p).unwrap();
        assert_eq!((mp.placements()[0].x, mp.placements()[1].x), (1.0, 0.0));
    }

    #[test]
    fn two_uav_errors_and_altitudes() {
        let bare = Profile::new(Arena::unit(), vec![UserReport::at(0.1, 0.1)]).unwrap();
        assert!(matches!(
            two_uav_dual_mechanism(&bare),
            Err(Error::MissingPreferencePair(0))
        ));
        let p = pair_profile(&[(0.2, [Favorable, Adverse])]);
        let steep = p.with_alpha(3.0).unwrap();
        assert!(matches!(
            two_uav_dual_mechanism(&steep),
            Err(Error::Unsupported(_))
        ));
        let mp = two_uav_dual_mechanism_at(&p, Some(&[0.1, 0.3])).unwrap();
        assert_eq!(mp.placements()[0].z, 0.1);
        assert_eq!(mp.placements()[1].z, 0.3);
    }

    #[test]
    fn endpoints() {
        let a = Arena::new(1.0, 1.0, 0.0, 2.0).unwrap();
        let mp = k_obnoxious_endpoints(4, &a, None).unwrap();
        let xy: Vec<(f64, f64)> = mp.placements().iter().map(|p| (p.x, p.y)).collect();
        assert_eq!(xy, vec![(0.0, 0.0), (0.0, 0.0), (2.0, 2.0), (2.0, 2.0)]);
        let mp = k_obnoxious_endpoints(3, &a, None).unwrap();
        let xy: Vec<(f64, f64)> = mp.placements().iter().map(|p| (p.x, p.y)).collect();
        assert_eq!(xy, vec![(0.0, 0.0), (0.0, 0.0), (2.0, 2.0)]);
        let mp = k_obnoxious_endpoints(1, &a, None).unwrap();
        assert_eq!(mp.placements(), &[Placement::new(0.0, 0.0, 0.0)]);
        assert!(k_obnoxious_endpoints(0, &a, None).is_err());
        assert!(k_obnoxious_endpoints(2, &a, Some(&[0.1])).is_err());
    }

    #[test]
    fn fractions() {
        assert_eq!(as_fraction(1.0), Some((1, 1)));
        assert_eq!(as_fraction(0.25), Some((1, 4)));
        assert_eq!(as_fraction(0.3), Some((3, 10)));
        assert_eq!(as_fraction(2.5), Some((5, 2)));
        assert_eq!(as_fraction(1.0 / 3.0), Some((1, 3)));
        assert_eq!(as_fraction(std::f64::consts::PI), None);
    }

    #[test]
    fn schedule_rescales_weights() {
        let s = PercentileSchedule::new(1, &[0.5, 0.25, 0.25]).unwrap();
        assert_eq!(s.units, vec![2, 1, 1]);
        assert_eq!(s.total_units, 4);
        let s = PercentileSchedule::new(1, &[3.0, 6.0]).unwrap();
        assert_eq!(s.units, vec![1, 2]);
        assert!(matches!(
            PercentileSchedule::new(1, &[1.0, std::f64::consts::E]),
            Err(Error::WeightRescale(_))
        ));
        assert!(matches!(
            PercentileSchedule::new(1, &[1.0, 999_999.0, 7.0]),
            Err(Error::WeightRescale(_))
        ));
        assert!(PercentileSchedule::new(0, &[1.0]).is_err());
    }

    #[test]
    fn fourteen_users_three_uavs() {
        let s = PercentileSchedule::new(3, &[1.0; 14]).unwrap();
        assert_eq!(
            (1..=3).map(|j| s.index(j)).collect::<Vec<_>>(),
            vec![4, 7, 10]
        );
        assert_eq!(s.percentile(2), 0.5);
    }

    #[test]
    fn percentile_single_user_and_median() {
        let p = Profile::new(Arena::unit(), vec![UserReport::new(0.3, 0.7, 0.2)]).unwrap();
        let mp = percentile_mechanism(&p, 4).unwrap();
        assert!(mp.placements().iter().all(|q| (q.x, q.y) == (0.3, 0.7)));

        let p = Profile::new(
            Arena::unit(),
            [0.9, 0.1, 0.5, 0.3]
                .iter()
                .map(|&x| UserReport::at(x, 1.0 - x))
                .collect(),
        )
        .unwrap();
        let mp = percentile_mechanism(&p, 1).unwrap();
        let wm = crate::single::weighted_median_mechanism(&p).unwrap();
        assert_eq!(mp.placements()[0], wm);
    }
}
