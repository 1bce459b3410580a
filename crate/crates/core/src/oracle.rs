//! Full-information social optima for every game.
//!
//! These are the benchmarks the mechanisms are measured against. Closed forms
//! and corner enumeration are exact; the convex search is accurate to a
//! relative `1e-8` in objective; the grid search is a bounding oracle that
//! reports its own lattice tolerance.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    raw_cost, social_cost, social_utility_adverse, social_utility_dual, social_utility_two_uav,
    Arena, MultiPlacement, Outcome, Placement, Preference, Profile,
};

pub const DEFAULT_GRID_RESOLUTION: usize = 400;
pub const GRID_ZOOM_PASSES: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleMethod {
    ClosedForm,
    CornerEnumeration,
    ConvexSearch,
    GridSearch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    #[serde(rename = "placement")]
    pub outcome: Outcome,
    pub value: f64,
    pub method: OracleMethod,
    /// Absolute bound on how far `value` may sit from the true optimum.
    /// Zero for exact methods.
    pub tolerance: f64,
}

impl OracleResult {
    pub fn placement(&self) -> Option<&Placement> {
        self.outcome.as_single()
    }
}

fn exact(p: Placement, value: f64, method: OracleMethod) -> OracleResult {
    OracleResult {
        outcome: Outcome::Single(p),
        value,
        method,
        tolerance: 0.0,
    }
}

/// Minimizes a convex function on `[lo, hi]` by golden-section search.
pub fn golden_section_min(mut f: impl FnMut(f64) -> f64, lo: f64, hi: f64, tol: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    // Endpoints matter when the minimum sits on the boundary.
    [(lo, f(lo)), (hi, f(hi)), ((a + b) / 2.0, f((a + b) / 2.0))]
        .into_iter()
        .fold((f64::NAN, f64::INFINITY), |best, (x, v)| {
            if v < best.1 {
                (x, v)
            } else {
                best
            }
        })
        .0
}

/// Minimal social cost (`OPT_1`).
///
/// `alpha = 2` uses the weighted mean. Otherwise the objective is minimized by
/// alternating golden-section searches along x and y until the relative
/// improvement drops below `1e-10` (at most 200 rounds).
pub fn opt_favorable(prof: &Profile) -> Result<OracleResult> {
    let a = *prof.arena();
    if a.alpha == 2.0 {
        let (mx, my) = prof.weighted_mean();
        // A convex combination of in-arena points, clamped against rounding.
        let p = Placement::in_arena(&a, mx.clamp(0.0, a.width()), my.clamp(0.0, a.height()));
        return Ok(exact(p, social_cost(prof, &p)?, OracleMethod::ClosedForm));
    }

    let users = prof.users();
    let eval = |x: f64, y: f64| -> f64 {
        let p = Placement::new(x, y, a.altitude);
        users.iter().map(|u| raw_cost(&p, u, a.alpha)).sum()
    };
    let (mut x, mut y) = prof.weighted_mean();
    x = x.clamp(0.0, a.width());
    y = y.clamp(0.0, a.height());
    let mut best = eval(x, y);
    let tol_x = 1e-13 * a.width();
    let tol_y = 1e-13 * a.height();
    for _ in 0..200 {
        x = golden_section_min(|t| eval(t, y), 0.0, a.width(), tol_x);
        y = golden_section_min(|t| eval(x, t), 0.0, a.height(), tol_y);
        let next = eval(x, y);
        let improvement = best - next;
        best = best.min(next);
        if improvement <= 1e-10 * best.abs() {
            break;
        }
    }
    let p = Placement::in_arena(&a, x, y);
    Ok(OracleResult {
        outcome: Outcome::Single(p),
        value: best,
        method: OracleMethod::ConvexSearch,
        tolerance: 1e-8 * best.abs(),
    })
}

/// Maximal obnoxious social utility (`OPT_2`): the best of the four corners,
/// ties going to the lexicographically smallest corner.
pub fn opt_obnoxious(prof: &Profile) -> Result<OracleResult> {
    let a = *prof.arena();
    let mut best: Option<(Placement, f64)> = None;
    for (x, y) in a.corners() {
        let p = Placement::in_arena(&a, x, y);
        let v = social_utility_adverse(prof, &p)?;
        if best.is_none_or(|(_, b)| v > b) {
            best = Some((p, v));
        }
    }
    let (p, v) = best.expect("four corners");
    Ok(exact(p, v, OracleMethod::CornerEnumeration))
}

/// The `alpha = 2` optimal corner from the weighted mean: `x = 0` iff `mean_x >= A`.
pub fn obnoxious_corner_by_mean(prof: &Profile) -> (f64, f64) {
    let a = prof.arena();
    let (mx, my) = prof.weighted_mean();
    let x = if mx >= a.half_width { 0.0 } else { a.width() };
    let y = if my >= a.half_height { 0.0 } else { a.height() };
    (x, y)
}

/// Maximizer on `[0, len]` of `sum_adv (t - c)^2 - sum_fav (t - c)^2`.
///
/// The quadratic coefficient is `n_adv - n_fav`; the candidates are both
/// endpoints and, when the parabola opens downwards, its clipped vertex.
fn best_on_axis(favorable: &[f64], adverse: &[f64], len: f64) -> f64 {
    let q = |t: f64| -> f64 {
        adverse.iter().map(|c| (t - c) * (t - c)).sum::<f64>()
            - favorable.iter().map(|c| (t - c) * (t - c)).sum::<f64>()
    };
    let mut candidates = vec![0.0];
    let curvature = adverse.len() as f64 - favorable.len() as f64;
    if curvature < 0.0 {
        let linear: f64 = favorable.iter().sum::<f64>() - adverse.iter().sum::<f64>();
        candidates.push((linear / -curvature).clamp(0.0, len));
    }
    candidates.push(len);
    let mut best = (candidates[0], q(candidates[0]));
    for &t in &candidates[1..] {
        let v = q(t);
        if v > best.1 {
            best = (t, v);
        }
    }
    best.0
}

fn split_by_pref(coords: impl Iterator<Item = (f64, Preference)>) -> (Vec<f64>, Vec<f64>) {
    let (mut fav, mut adv) = (Vec::new(), Vec::new());
    for (c, p) in coords {
        match p {
            Preference::Favorable => fav.push(c),
            Preference::Adverse => adv.push(c),
        }
    }
    (fav, adv)
}

/// Maximal dual-preference social utility (`OPT_3`).
///
/// At `alpha = 2` the objective separates into two one-dimensional quadratics
/// solved over their candidate sets. Other exponents fall back to
/// [`grid_search`] at the default resolution.
pub fn opt_dual_single(prof: &Profile) -> Result<OracleResult> {
    opt_dual_single_at(prof, DEFAULT_GRID_RESOLUTION)
}

/// [`opt_dual_single`] with an explicit grid resolution for `alpha != 2`.
pub fn opt_dual_single_at(prof: &Profile, resolution: usize) -> Result<OracleResult> {
    prof.require_unit_weights()?;
    let prefs = prof.preferences()?;
    let a = *prof.arena();
    if a.alpha == 2.0 {
        let users = prof.users();
        let (fx, ax) = split_by_pref(users.iter().zip(&prefs).map(|(u, &p)| (u.x, p)));
        let (fy, ay) = split_by_pref(users.iter().zip(&prefs).map(|(u, &p)| (u.y, p)));
        let p = Placement::in_arena(
            &a,
            best_on_axis(&fx, &ax, a.width()),
            best_on_axis(&fy, &ay, a.height()),
        );
        return Ok(exact(
            p,
            social_utility_dual(prof, &p)?,
            OracleMethod::ClosedForm,
        ));
    }
    Ok(grid_search(
        |p| social_utility_dual(prof, p).expect("validated profile"),
        &a,
        resolution,
        SearchMode::Maximize,
    ))
}

/// Maximal two-UAV social utility at `alpha = 2`.
///
/// The utility separates into one quadratic per UAV and axis, each solved over
/// its candidate set. Both UAVs sit at the given altitudes (default `z0`).
pub fn opt_two_uav(prof: &Profile, altitudes: Option<[f64; 2]>) -> Result<OracleResult> {
    let a = *prof.arena();
    if a.alpha != 2.0 {
        return Err(Error::Unsupported(format!(
            "the two-UAV game is defined for alpha = 2, got {}",
            a.alpha
        )));
    }
    let prefs = prof.preference_pairs()?;
    let zs = altitudes.unwrap_or([a.altitude; 2]);
    let users = prof.users();
    let mut placements = Vec::with_capacity(2);
    for j in 0..2 {
        let (fx, ax) = split_by_pref(users.iter().zip(&prefs).map(|(u, p)| (u.x, p[j])));
        let (fy, ay) = split_by_pref(users.iter().zip(&prefs).map(|(u, p)| (u.y, p[j])));
        placements.push(Placement::new(
            best_on_axis(&fx, &ax, a.width()),
            best_on_axis(&fy, &ay, a.height()),
            zs[j],
        ));
    }
    let mp = MultiPlacement::new(placements)?;
    let value = social_utility_two_uav(prof, &mp)?;
    Ok(OracleResult {
        outcome: Outcome::Multi(mp),
        value,
        method: OracleMethod::ClosedForm,
        tolerance: 0.0,
    })
}

/// Maximal utility of `k` obnoxious UAVs at `alpha = 2`.
///
/// Per axis each UAV independently takes the better endpoint, so
/// `OPT_x = k * max(sum w x^2, sum w (x - 2A)^2)`; all UAVs share the best corner.
pub fn opt_k_obnoxious(
    prof: &Profile,
    k: usize,
    altitudes: Option<&[f64]>,
) -> Result<OracleResult> {
    let a = *prof.arena();
    if a.alpha != 2.0 {
        return Err(Error::Unsupported(format!(
            "the k-UAV obnoxious game is defined for alpha = 2, got {}",
            a.alpha
        )));
    }
    if k == 0 {
        return Err(Error::Domain("k must be at least 1".into()));
    }
    let zs = match altitudes {
        Some(zs) if zs.len() == k => zs.to_vec(),
        Some(zs) => {
            return Err(Error::Domain(format!(
                "expected {k} altitudes, got {}",
                zs.len()
            )))
        }
        None => vec![a.altitude; k],
    };
    let users = prof.users();
    let axis = |coord: fn(&crate::model::UserReport) -> f64, len: f64| -> (f64, f64) {
        let at_zero: f64 = users.iter().map(|u| u.w * coord(u) * coord(u)).sum();
        let at_far: f64 = users
            .iter()
            .map(|u| u.w * (coord(u) - len) * (coord(u) - len))
            .sum();
        if at_zero >= at_far {
            (0.0, at_zero)
        } else {
            (len, at_far)
        }
    };
    let (x, sx) = axis(|u| u.x, a.width());
    let (y, sy) = axis(|u| u.y, a.height());
    let total_w = prof.total_weight();
    let value = k as f64 * (sx + sy) + zs.iter().map(|z| total_w * z * z).sum::<f64>();
    let mp = MultiPlacement::new(zs.iter().map(|&z| Placement::new(x, y, z)).collect())?;
    Ok(OracleResult {
        outcome: Outcome::Multi(mp),
        value,
        method: OracleMethod::ClosedForm,
        tolerance: 0.0,
    })
}

fn lattice(lo: f64, hi: f64, step: f64, steps: usize) -> Vec<f64> {
    (0..=steps)
        .map(|i| {
            if i == steps {
                hi
            } else {
                (lo + step * i as f64).min(hi)
            }
        })
        .collect()
}

/// Best lattice point of `objective` over the arena.
///
/// Evaluates a `(resolution + 1)^2` lattice, then zooms three times around the
/// incumbent, shrinking the step tenfold each pass. Rows are evaluated in
/// parallel; the argmax scan runs in fixed row-major order, earliest point
/// winning ties. For minimization the value upper-bounds the optimum, for
/// maximization it lower-bounds it. `tolerance` is the spread of the objective
/// over the final incumbent's neighbouring lattice cell.
pub fn grid_search<F>(
    objective: F,
    arena: &Arena,
    resolution: usize,
    mode: SearchMode,
) -> OracleResult
where
    F: Fn(&Placement) -> f64 + Sync,
{
    assert!(resolution >= 2, "grid resolution must be at least 2");
    let better = |v: f64, best: f64| match mode {
        SearchMode::Minimize => v < best,
        SearchMode::Maximize => v > best,
    };
    let z = arena.altitude;
    let scan = |xs: &[f64], ys: &[f64]| -> (f64, f64, f64) {
        let rows: Vec<(f64, f64, f64)> = xs
            .par_iter()
            .map(|&x| {
                let mut best = (x, ys[0], objective(&Placement::new(x, ys[0], z)));
                for &y in &ys[1..] {
                    let v = objective(&Placement::new(x, y, z));
                    if better(v, best.2) {
                        best = (x, y, v);
                    }
                }
                best
            })
            .collect();
        rows.into_iter()
            .reduce(|best, r| if better(r.2, best.2) { r } else { best })
            .expect("non-empty lattice")
    };

    let (w, h) = (arena.width(), arena.height());
    let (mut sx, mut sy) = (w / resolution as f64, h / resolution as f64);
    let mut best = scan(
        &lattice(0.0, w, sx, resolution),
        &lattice(0.0, h, sy, resolution),
    );
    for _ in 0..GRID_ZOOM_PASSES {
        let (x0, x1) = ((best.0 - sx).max(0.0), (best.0 + sx).min(w));
        let (y0, y1) = ((best.1 - sy).max(0.0), (best.1 + sy).min(h));
        sx /= 10.0;
        sy /= 10.0;
        let xs = lattice(x0, x1, sx, ((x1 - x0) / sx).round() as usize);
        let ys = lattice(y0, y1, sy, ((y1 - y0) / sy).round() as usize);
        let refined = scan(&xs, &ys);
        if better(refined.2, best.2) {
            best = refined;
        }
    }

    let mut spread: f64 = 0.0;
    for dx in [-1.0, 0.0, 1.0] {
        for dy in [-1.0, 0.0, 1.0] {
            let (x, y) = (best.0 + dx * sx, best.1 + dy * sy);
            if arena.contains(x, y) {
                spread = spread.max((objective(&Placement::new(x, y, z)) - best.2).abs());
            }
        }
    }
    OracleResult {
        outcome: Outcome::Single(Placement::new(best.0, best.1, z)),
        value: best.2,
        method: OracleMethod::GridSearch,
        tolerance: spread,
    }
}
