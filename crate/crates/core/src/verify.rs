//! Strategyproofness deviation search, empirical approximation ratios and
//! the power-inequality checks the ratio bounds rest on.
//!
//! Every mechanism here decides each axis from the order of the reported
//! coordinates and from which side of `A` (or `B`) they fall. A misreport can
//! therefore only change the outcome by crossing another report or the
//! half-way line, so a finite candidate set that straddles all of those
//! points witnesses any profitable deviation: per axis
//! `{0, A, 2A, A - eps, A + eps}`, every reported coordinate, and the
//! midpoints between consecutive sorted coordinates, with `eps = 1e-7 * A`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mechanism::{Game, Mechanism};
use crate::model::{Outcome, Profile, UserReport};
use crate::montecarlo::rng::SplitMix64;
use crate::multi::social_utility_k_adverse;
use crate::oracle::{
    opt_dual_single_at, opt_favorable, opt_k_obnoxious, opt_obnoxious, opt_two_uav,
    DEFAULT_GRID_RESOLUTION,
};
use crate::single::MechanismKind;

pub const DEFAULT_TOLERANCE: f64 = 1e-9;
pub const RATIO_RELATIVE_SLACK: f64 = 1e-9;

/// A profitable unilateral misreport.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviationReport {
    pub user: usize,
    pub truthful: UserReport,
    pub deviation: UserReport,
    /// The user's true objective under truthful reporting.
    pub before: f64,
    /// The user's true objective after the misreport.
    pub after: f64,
    pub improvement: f64,
}

/// Candidate misreported coordinates for one axis of length `2 * half`.
pub fn axis_candidates(coords: &[f64], half: f64) -> Vec<f64> {
    let eps = 1e-7 * half;
    let len = 2.0 * half;
    let mut sorted = coords.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut out = vec![0.0, half, len, half - eps, half + eps];
    out.extend_from_slice(&sorted);
    out.extend(sorted.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    out.retain(|c| (0.0..=len).contains(c));
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

fn evaluate(
    mech: &Mechanism,
    prof: &Profile,
    user: usize,
    dev: UserReport,
    truth: &UserReport,
    before: f64,
) -> Result<Option<DeviationReport>> {
    let game = mech.game();
    let outcome = mech.place(&prof.with_user(user, dev)?)?;
    let after = game.user_objective(&outcome, truth, prof.arena());
    let improvement = game.gain(before, after);
    Ok((improvement > 0.0).then_some(DeviationReport {
        user,
        truthful: *truth,
        deviation: dev,
        before,
        after,
        improvement,
    }))
}

fn keep_best(best: &mut Option<DeviationReport>, r: DeviationReport, tol: f64) {
    let floor = best.as_ref().map_or(tol, |b| b.improvement.max(tol));
    if r.improvement > floor {
        *best = Some(r);
    }
}

fn truthful_objectives(mech: &Mechanism, prof: &Profile) -> Result<(Outcome, Vec<f64>)> {
    let outcome = mech.place(prof)?;
    let game = mech.game();
    let objectives = prof
        .users()
        .iter()
        .map(|u| game.user_objective(&outcome, u, prof.arena()))
        .collect();
    Ok((outcome, objectives))
}

/// Searches the candidate deviation set of every user and returns, per user,
/// the most profitable misreport if it improves that user's true objective by
/// more than `tol`. Ties keep the first misreport in search order.
///
/// Dual games also try every preference declaration with every location.
pub fn check_strategyproof(
    mech: &Mechanism,
    prof: &Profile,
    tol: f64,
) -> Result<Vec<DeviationReport>> {
    let (_, before) = truthful_objectives(mech, prof)?;
    let a = prof.arena();
    let xs: Vec<f64> = prof.users().iter().map(|u| u.x).collect();
    let ys: Vec<f64> = prof.users().iter().map(|u| u.y).collect();
    let cx = axis_candidates(&xs, a.half_width);
    let cy = axis_candidates(&ys, a.half_height);

    let mut reports = Vec::new();
    for (i, truth) in prof.users().iter().enumerate() {
        let mut best: Option<DeviationReport> = None;
        for declared in mech.preference_options(truth) {
            for &x in &cx {
                for &y in &cy {
                    let dev = declared.moved_to(x, y);
                    if dev == *truth {
                        continue;
                    }
                    if let Some(r) = evaluate(mech, prof, i, dev, truth, before[i])? {
                        keep_best(&mut best, r, tol);
                    }
                }
            }
        }
        reports.extend(best);
    }
    Ok(reports)
}

/// Random-deviation counterpart of [`check_strategyproof`]: `samples`
/// uniformly drawn misreports per user (location, and preference where the
/// game has one), reporting the most profitable one per user.
pub fn fuzz_strategyproof(
    mech: &Mechanism,
    prof: &Profile,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<Vec<DeviationReport>> {
    let (_, before) = truthful_objectives(mech, prof)?;
    let a = *prof.arena();
    let mut reports = Vec::new();
    for (i, truth) in prof.users().iter().enumerate() {
        let options = mech.preference_options(truth);
        let mut rng = SplitMix64::for_trial(seed, i as u64);
        let mut best: Option<DeviationReport> = None;
        for _ in 0..samples {
            let declared = options[rng.below(options.len() as u64) as usize];
            let dev = declared.moved_to(rng.uniform(0.0, a.width()), rng.uniform(0.0, a.height()));
            if let Some(r) = evaluate(mech, prof, i, dev, truth, before[i])? {
                keep_best(&mut best, r, tol);
            }
        }
        reports.extend(best);
    }
    Ok(reports)
}

/// Worst-case ratio each mechanism is proven to achieve at `z0 = 0`.
pub fn ratio_bound(mech: &Mechanism, alpha: f64, prof: &Profile) -> Result<f64> {
    let mismatch = |reason: &str| Error::Mismatch {
        mechanism: mech.to_string(),
        reason: reason.to_string(),
    };
    Ok(match mech {
        Mechanism::Single { rule } => match rule {
            MechanismKind::Median => prof.weight_spread() * 2f64.powf((3.0 * alpha - 4.0) / 2.0),
            MechanismKind::WeightedMedian => 2f64.powf((3.0 * alpha - 4.0) / 2.0),
            MechanismKind::WeightedCorner => 5.0 * 2f64.powf((alpha - 2.0) / 2.0),
            MechanismKind::UnweightedCorner => {
                5.0 * prof.weight_spread() * 2f64.powf((alpha - 2.0) / 2.0)
            }
            MechanismKind::DualMajority => 2f64.powf(3.0 * alpha / 2.0),
        },
        Mechanism::TwoUavDual => {
            if alpha != 2.0 {
                return Err(mismatch("the two-UAV bound holds for alpha = 2 only"));
            }
            4.0
        }
        Mechanism::KEndpoints { k } => {
            if alpha != 2.0 {
                return Err(mismatch("the k-UAV bound holds for alpha = 2 only"));
            }
            match *k {
                0 | 1 => return Err(mismatch("the k-UAV bound needs k >= 2")),
                k if k % 2 == 0 => 2.0,
                k => 2.0 * k as f64 / (k as f64 - 1.0),
            }
        }
        Mechanism::Percentile { .. } => return Err(mismatch("no proven approximation ratio")),
        Mechanism::WeightedMeanBaseline | Mechanism::OptimalCornerBaseline => {
            return Err(mismatch(
                "baselines are not strategyproof and carry no bound",
            ))
        }
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub mechanism: String,
    pub alpha: f64,
    pub profile_digest: String,
    pub mechanism_objective: f64,
    pub oracle_objective: f64,
    pub ratio: f64,
    pub bound: f64,
    /// Allowance added to the bound: relative `1e-9` plus the oracle's own tolerance.
    pub slack: f64,
    pub violation: bool,
}

/// FNV-1a over the bit patterns of the arena and every report.
pub fn profile_digest(prof: &Profile) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut feed = |v: u64| {
        for b in v.to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    };
    let a = prof.arena();
    for v in [a.half_width, a.half_height, a.altitude, a.alpha] {
        feed(v.to_bits());
    }
    for u in prof.users() {
        feed(u.x.to_bits());
        feed(u.y.to_bits());
        feed(u.w.to_bits());
        let code = |p: Option<crate::model::Preference>| match p {
            None => 0,
            Some(crate::model::Preference::Favorable) => 1,
            Some(crate::model::Preference::Adverse) => 2,
        };
        feed(code(u.pref));
        let (p1, p2) = u.prefs.map_or((None, None), |[a, b]| (Some(a), Some(b)));
        feed(code(p1) * 3 + code(p2));
    }
    format!("{h:016x}")
}

/// `numerator / denominator`, with `0 / 0` read as a perfect ratio of 1.
pub(crate) fn ratio_of(numerator: f64, denominator: f64) -> f64 {
    if numerator == 0.0 && denominator == 0.0 {
        1.0
    } else {
        numerator / denominator
    }
}

/// Empirical ratio of `mech` against the matching optimum for each `alpha`.
///
/// Altitudes are forced to zero, the setting the bounds are proven in.
pub fn check_ratio(mech: &Mechanism, prof: &Profile, alphas: &[f64]) -> Result<Vec<RatioReport>> {
    check_ratio_at(mech, prof, alphas, DEFAULT_GRID_RESOLUTION)
}

/// [`check_ratio`] with an explicit resolution for grid-backed oracles.
pub fn check_ratio_at(
    mech: &Mechanism,
    prof: &Profile,
    alphas: &[f64],
    grid_resolution: usize,
) -> Result<Vec<RatioReport>> {
    let flat = prof.with_altitude(0.0)?;
    let mut out = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        let p = flat.with_alpha(alpha)?;
        let bound = ratio_bound(mech, alpha, &p)?;
        let outcome = mech.place(&p)?;
        let (mech_value, oracle) = match mech.game() {
            Game::Favorable => (
                crate::model::social_cost(&p, outcome.as_single().expect("single"))?,
                opt_favorable(&p)?,
            ),
            Game::Obnoxious => (
                crate::model::social_utility_adverse(&p, outcome.as_single().expect("single"))?,
                opt_obnoxious(&p)?,
            ),
            Game::Dual => (
                crate::model::social_utility_dual(&p, outcome.as_single().expect("single"))?,
                opt_dual_single_at(&p, grid_resolution)?,
            ),
            Game::TwoUavDual => (
                crate::model::social_utility_two_uav(&p, outcome.as_multi().expect("multi"))?,
                opt_two_uav(&p, Some([0.0, 0.0]))?,
            ),
            Game::KObnoxious => {
                let mp = outcome.as_multi().expect("multi");
                (
                    social_utility_k_adverse(&p, mp),
                    opt_k_obnoxious(&p, mp.len(), None)?,
                )
            }
            Game::KFavorable => unreachable!("rejected by ratio_bound"),
        };
        // The mechanism's own outcome is feasible, so it also bounds the optimum.
        let (ratio, oracle_slack) = if mech.game().minimizes() {
            let opt = oracle.value.min(mech_value);
            let r = ratio_of(mech_value, opt);
            let worst = ratio_of(mech_value, (opt - oracle.tolerance).max(0.0));
            (r, worst - r)
        } else {
            let opt = oracle.value.max(mech_value);
            let extra = if oracle.tolerance == 0.0 {
                0.0
            } else {
                oracle.tolerance / mech_value
            };
            (ratio_of(opt, mech_value), extra)
        };
        let slack = RATIO_RELATIVE_SLACK * bound + oracle_slack;
        out.push(RatioReport {
            mechanism: mech.to_string(),
            alpha,
            profile_digest: profile_digest(&p),
            mechanism_objective: mech_value,
            oracle_objective: oracle.value,
            ratio,
            bound,
            slack,
            violation: ratio.is_nan() || ratio > bound + slack,
        });
    }
    Ok(out)
}

/// Outcome of the power-inequality property check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub samples: usize,
    pub passed: bool,
    /// `min ((C+D)^E - C^E - D^E) / (C+D)^E`; must stay above `-1e-9`.
    pub worst_lower_margin: f64,
    /// `min (2^(E-1)(C^E + D^E) - (C+D)^E) / (2^(E-1)(C^E + D^E))`; must stay above `-1e-9`.
    pub worst_upper_margin: f64,
}

/// Relative margins of `C^E + D^E <= (C+D)^E <= 2^(E-1) (C^E + D^E)`.
pub fn power_margins(c: f64, d: f64, e: f64) -> (f64, f64) {
    let sum_pow = (c + d).powf(e);
    let pow_sum = c.powf(e) + d.powf(e);
    let upper = 2f64.powf(e - 1.0) * pow_sum;
    let rel = |gap: f64, scale: f64| if scale == 0.0 { gap } else { gap / scale };
    (rel(sum_pow - pow_sum, sum_pow), rel(upper - sum_pow, upper))
}

/// Draws `C, D` uniform in `[0, 10]` and `E` uniform in `[2, 6]` and checks
/// both power inequalities to a relative `1e-9`.
pub fn check_power_inequalities(samples: usize, seed: u64) -> Result<LemmaReport> {
    if samples == 0 {
        return Err(Error::Domain("samples must be at least 1".into()));
    }
    let mut rng = SplitMix64::new(seed);
    let (mut lower, mut upper) = (f64::INFINITY, f64::INFINITY);
    for _ in 0..samples {
        let c = rng.uniform(0.0, 10.0);
        let d = rng.uniform(0.0, 10.0);
        let e = rng.uniform(2.0, 6.0);
        let (lo, up) = power_margins(c, d, e);
        lower = lower.min(lo);
        upper = upper.min(up);
    }
    Ok(LemmaReport {
        samples,
        passed: lower >= -1e-9 && upper >= -1e-9,
        worst_lower_margin: lower,
        worst_upper_margin: upper,
    })
}

/// Re-runs a weight-blind mechanism under `perturbations` random reweightings
/// and reports whether the placement stayed bit-for-bit identical.
pub fn check_weight_independence(
    mech: MechanismKind,
    prof: &Profile,
    perturbations: usize,
    seed: u64,
) -> Result<bool> {
    if !mech.is_weight_blind() {
        return Err(Error::Mismatch {
            mechanism: mech.to_string(),
            reason: "only median and corner-u ignore weights".into(),
        });
    }
    let reference = mech.place(prof)?;
    let mut rng = SplitMix64::new(seed);
    for _ in 0..perturbations {
        let weights: Vec<f64> = (0..prof.len())
            .map(|_| 1e-3 + 1e3 * rng.next_f64_open0())
            .collect();
        let moved = mech.place(&prof.with_weights(&weights)?)?;
        if moved.x.to_bits() != reference.x.to_bits()
            || moved.y.to_bits() != reference.y.to_bits()
            || moved.z.to_bits() != reference.z.to_bits()
        {
            return Ok(false);
        }
    }
    Ok(true)
}
