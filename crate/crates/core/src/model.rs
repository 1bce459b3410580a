//! Domain types and the per-user cost and utility functions.
//!
//! The ground region is the rectangle `[0, 2A] x [0, 2B]`; a UAV hovers at
//! altitude `z0` above it. A user at ground distance `d` from the UAV pays
//! `w * (d^2 + z0^2)^(alpha/2)` when it wants the UAV close (favorable) and
//! receives the same quantity as utility when it wants the UAV far (adverse).

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Rectangular ground region plus the fixed flight altitude and path-loss exponent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Arena {
    #[serde(rename = "A")]
    pub half_width: f64,
    #[serde(rename = "B")]
    pub half_height: f64,
    #[serde(rename = "z0")]
    pub altitude: f64,
    pub alpha: f64,
}

pub const MIN_ALPHA: f64 = 2.0;
pub const MAX_ALPHA: f64 = 6.0;

impl Arena {
    pub fn new(half_width: f64, half_height: f64, altitude: f64, alpha: f64) -> Result<Self> {
        let arena = Arena {
            half_width,
            half_height,
            altitude,
            alpha,
        };
        arena.validate()?;
        Ok(arena)
    }

    /// The unit square `[0,1]^2` at ground level with `alpha = 2`.
    pub fn unit() -> Self {
        Arena {
            half_width: 0.5,
            half_height: 0.5,
            altitude: 0.0,
            alpha: 2.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.half_width.is_finite() && self.half_width > 0.0) {
            return Err(domain(format!(
                "A must be positive, got {}",
                self.half_width
            )));
        }
        if !(self.half_height.is_finite() && self.half_height > 0.0) {
            return Err(domain(format!(
                "B must be positive, got {}",
                self.half_height
            )));
        }
        if !(self.altitude.is_finite() && self.altitude >= 0.0) {
            return Err(domain(format!(
                "z0 must be non-negative, got {}",
                self.altitude
            )));
        }
        if !(MIN_ALPHA..=MAX_ALPHA).contains(&self.alpha) {
            return Err(domain(format!(
                "alpha must lie in [2, 6], got {}",
                self.alpha
            )));
        }
        Ok(())
    }

    pub fn width(&self) -> f64 {
        2.0 * self.half_width
    }

    pub fn height(&self) -> f64 {
        2.0 * self.half_height
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        (0.0..=self.width()).contains(&x) && (0.0..=self.height()).contains(&y)
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_altitude(mut self, altitude: f64) -> Self {
        self.altitude = altitude;
        self
    }

    /// The four corners in lexicographic (x, then y) order.
    pub fn corners(&self) -> [(f64, f64); 4] {
        let (w, h) = (self.width(), self.height());
        [(0.0, 0.0), (0.0, h), (w, 0.0), (w, h)]
    }
}

/// Whether a user wants the UAV close (type 1) or far away (type 2).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preference {
    Favorable,
    Adverse,
}

impl Preference {
    pub const ALL: [Preference; 2] = [Preference::Favorable, Preference::Adverse];

    pub fn flipped(self) -> Self {
        match self {
            Preference::Favorable => Preference::Adverse,
            Preference::Adverse => Preference::Favorable,
        }
    }
}

/// One user's report: ground location, weight and (for the dual games) preference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UserReport {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pref: Option<Preference>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prefs: Option<[Preference; 2]>,
}

impl UserReport {
    pub fn new(x: f64, y: f64, w: f64) -> Self {
        UserReport {
            x,
            y,
            w,
            pref: None,
            prefs: None,
        }
    }

    /// Unit-weight user.
    pub fn at(x: f64, y: f64) -> Self {
        Self::new(x, y, 1.0)
    }

    pub fn with_pref(mut self, pref: Preference) -> Self {
        self.pref = Some(pref);
        self
    }

    pub fn with_prefs(mut self, prefs: [Preference; 2]) -> Self {
        self.prefs = Some(prefs);
        self
    }

    pub fn moved_to(mut self, x: f64, y: f64) -> Self {
        self.x = x;
        self.y = y;
        self
    }

    fn check(&self, arena: &Arena) -> Result<()> {
        if !arena.contains(self.x, self.y) {
            return Err(domain(format!(
                "user location ({}, {}) lies outside [0, {}] x [0, {}]",
                self.x,
                self.y,
                arena.width(),
                arena.height()
            )));
        }
        if !(self.w.is_finite() && self.w > 0.0) {
            return Err(domain(format!(
                "user weight must be positive, got {}",
                self.w
            )));
        }
        Ok(())
    }
}

/// An arena together with the ordered list of user reports.
///
/// User order is significant: any tie broken "by user index" refers to the
/// position in this list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    arena: Arena,
    users: Vec<UserReport>,
}

impl Profile {
    pub fn new(arena: Arena, users: Vec<UserReport>) -> Result<Self> {
        arena.validate()?;
        if users.is_empty() {
            return Err(Error::EmptyProfile);
        }
        for (i, u) in users.iter().enumerate() {
            u.check(&arena).map_err(|e| match e {
                Error::Domain(msg) => Error::Domain(format!("user {i}: {msg}")),
                other => other,
            })?;
        }
        Ok(Profile { arena, users })
    }

    pub fn arena(&self) -> &Arena {
        &self.arena
    }

    pub fn users(&self) -> &[UserReport] {
        &self.users
    }

    pub fn len(&self) -> usize {
        self.users.len()
    }

    pub fn is_empty(&self) -> bool {
        self.users.is_empty()
    }

    /// Replaces user `index` with `report`, validating the new report.
    pub fn with_user(&self, index: usize, report: UserReport) -> Result<Self> {
        report.check(&self.arena)?;
        let mut users = self.users.clone();
        users[index] = report;
        Ok(Profile {
            arena: self.arena,
            users,
        })
    }

    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        Profile::new(self.arena.with_alpha(alpha), self.users.clone())
    }

    pub fn with_altitude(&self, altitude: f64) -> Result<Self> {
        Profile::new(self.arena.with_altitude(altitude), self.users.clone())
    }

    pub fn with_weights(&self, weights: &[f64]) -> Result<Self> {
        assert_eq!(weights.len(), self.users.len());
        let users = self
            .users
            .iter()
            .zip(weights)
            .map(|(u, &w)| UserReport { w, ..*u })
            .collect();
        Profile::new(self.arena, users)
    }

    pub fn total_weight(&self) -> f64 {
        self.users.iter().map(|u| u.w).sum()
    }

    /// `w_max / w_min` over the profile.
    pub fn weight_spread(&self) -> f64 {
        let (lo, hi) = self
            .users
            .iter()
            .fold((f64::INFINITY, 0.0_f64), |(lo, hi), u| {
                (lo.min(u.w), hi.max(u.w))
            });
        hi / lo
    }

    /// Weighted mean location.
    pub fn weighted_mean(&self) -> (f64, f64) {
        let total = self.total_weight();
        let sx: f64 = self.users.iter().map(|u| u.w * u.x).sum();
        let sy: f64 = self.users.iter().map(|u| u.w * u.y).sum();
        (sx / total, sy / total)
    }

    pub(crate) fn require_unit_weights(&self) -> Result<()> {
        match self.users.iter().position(|u| u.w != 1.0) {
            Some(index) => Err(Error::NonUnitWeight {
                index,
                weight: self.users[index].w,
            }),
            None => Ok(()),
        }
    }

    pub(crate) fn preferences(&self) -> Result<Vec<Preference>> {
        self.users
            .iter()
            .enumerate()
            .map(|(i, u)| u.pref.ok_or(Error::MissingPreference(i)))
            .collect()
    }

    pub(crate) fn preference_pairs(&self) -> Result<Vec<[Preference; 2]>> {
        self.users
            .iter()
            .enumerate()
            .map(|(i, u)| u.prefs.ok_or(Error::MissingPreferencePair(i)))
            .collect()
    }
}

/// A single UAV position `(x, y, z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Placement {
    pub x: f64,
    pub y: f64,
    #[serde(rename = "z0")]
    pub z: f64,
}

impl Placement {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Placement { x, y, z }
    }

    /// Ground point `(x, y)` at the arena's altitude.
    pub fn in_arena(arena: &Arena, x: f64, y: f64) -> Self {
        Placement::new(x, y, arena.altitude)
    }

    fn check(&self, arena: &Arena) -> Result<()> {
        if !arena.contains(self.x, self.y) {
            return Err(domain(format!(
                "placement ({}, {}) lies outside the arena",
                self.x, self.y
            )));
        }
        Ok(())
    }
}

/// Positions of `k >= 1` UAVs; each carries its own altitude.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiPlacement(Vec<Placement>);

impl MultiPlacement {
    pub fn new(placements: Vec<Placement>) -> Result<Self> {
        if placements.is_empty() {
            return Err(domain("a multi-placement needs at least one UAV"));
        }
        Ok(MultiPlacement(placements))
    }

    pub fn placements(&self) -> &[Placement] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn check(&self, arena: &Arena) -> Result<()> {
        self.0.iter().try_for_each(|p| p.check(arena))
    }
}

/// The output of any mechanism or oracle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Outcome {
    Single(Placement),
    Multi(MultiPlacement),
}

impl Outcome {
    pub fn as_single(&self) -> Option<&Placement> {
        match self {
            Outcome::Single(p) => Some(p),
            Outcome::Multi(_) => None,
        }
    }

    pub fn as_multi(&self) -> Option<&MultiPlacement> {
        match self {
            Outcome::Multi(mp) => Some(mp),
            Outcome::Single(_) => None,
        }
    }

    pub fn placements(&self) -> &[Placement] {
        match self {
            Outcome::Single(p) => std::slice::from_ref(p),
            Outcome::Multi(mp) => mp.placements(),
        }
    }
}

#[inline]
pub(crate) fn distance_power(dx: f64, dy: f64, z: f64, alpha: f64) -> f64 {
    let s = dx * dx + dy * dy + z * z;
    if alpha == 2.0 {
        s
    } else {
        s.powf(alpha / 2.0)
    }
}

#[inline]
pub(crate) fn raw_cost(p: &Placement, u: &UserReport, alpha: f64) -> f64 {
    u.w * distance_power(u.x - p.x, u.y - p.y, p.z, alpha)
}

#[inline]
pub(crate) fn raw_dual(p: &Placement, u: &UserReport, pref: Preference, arena: &Arena) -> f64 {
    let (dx, dy) = (u.x - p.x, u.y - p.y);
    match pref {
        Preference::Adverse => distance_power(dx, dy, p.z, arena.alpha),
        Preference::Favorable => {
            let (w, h) = (arena.width(), arena.height());
            let base = w * w - dx * dx + h * h - dy * dy + p.z * p.z;
            if arena.alpha == 2.0 {
                base
            } else {
                base.powf(arena.alpha / 2.0)
            }
        }
    }
}

/// Utility of one user towards one UAV in the two-UAV game (`alpha = 2`).
/// The favorable branch carries no altitude term.
#[inline]
pub(crate) fn raw_two_uav_term(
    p: &Placement,
    u: &UserReport,
    pref: Preference,
    arena: &Arena,
) -> f64 {
    let (dx, dy) = (p.x - u.x, p.y - u.y);
    match pref {
        Preference::Favorable => {
            let (w, h) = (arena.width(), arena.height());
            w * w - dx * dx + h * h - dy * dy
        }
        Preference::Adverse => dx * dx + dy * dy + p.z * p.z,
    }
}

fn check_pair(p: &Placement, u: &UserReport, a: &Arena) -> Result<()> {
    a.validate()?;
    u.check(a)?;
    p.check(a)
}

/// Service cost of a favorable user: `w * (d^2 + z^2)^(alpha/2)`.
pub fn cost(p: &Placement, u: &UserReport, a: &Arena) -> Result<f64> {
    check_pair(p, u, a)?;
    Ok(raw_cost(p, u, a.alpha))
}

/// Utility of an adverse user; the same expression as [`cost`], to be maximized.
pub fn utility_adverse(p: &Placement, u: &UserReport, a: &Arena) -> Result<f64> {
    cost(p, u, a)
}

/// Utility in the single-UAV dual-preference game. Requires unit weight and a
/// preference on the report.
pub fn utility_dual(p: &Placement, u: &UserReport, a: &Arena) -> Result<f64> {
    check_pair(p, u, a)?;
    if u.w != 1.0 {
        return Err(Error::NonUnitWeight {
            index: 0,
            weight: u.w,
        });
    }
    let pref = u.pref.ok_or(Error::MissingPreference(0))?;
    Ok(raw_dual(p, u, pref, a))
}

/// Total utility `u^1 + u^2` of a user towards two UAVs. Only defined for `alpha = 2`.
pub fn utility_two_uav(mp: &MultiPlacement, u: &UserReport, a: &Arena) -> Result<f64> {
    if a.alpha != 2.0 {
        return Err(Error::Unsupported(format!(
            "the two-UAV game is defined for alpha = 2, got {}",
            a.alpha
        )));
    }
    if mp.len() != 2 {
        return Err(Error::Unsupported(format!(
            "the two-UAV game needs exactly 2 placements, got {}",
            mp.len()
        )));
    }
    a.validate()?;
    u.check(a)?;
    mp.check(a)?;
    let prefs = u.prefs.ok_or(Error::MissingPreferencePair(0))?;
    Ok(mp
        .placements()
        .iter()
        .zip(prefs)
        .map(|(p, pref)| raw_two_uav_term(p, u, pref, a))
        .sum())
}

/// Sum of all users' service costs at `p`.
pub fn social_cost(prof: &Profile, p: &Placement) -> Result<f64> {
    p.check(prof.arena())?;
    let alpha = prof.arena().alpha;
    Ok(prof.users().iter().map(|u| raw_cost(p, u, alpha)).sum())
}

/// Sum of adverse utilities at `p` (obnoxious game).
pub fn social_utility_adverse(prof: &Profile, p: &Placement) -> Result<f64> {
    social_cost(prof, p)
}

/// Sum of dual-preference utilities at `p`.
pub fn social_utility_dual(prof: &Profile, p: &Placement) -> Result<f64> {
    p.check(prof.arena())?;
    prof.require_unit_weights()?;
    let prefs = prof.preferences()?;
    let arena = prof.arena();
    Ok(prof
        .users()
        .iter()
        .zip(prefs)
        .map(|(u, pref)| raw_dual(p, u, pref, arena))
        .sum())
}

/// Sum of two-UAV utilities.
pub fn social_utility_two_uav(prof: &Profile, mp: &MultiPlacement) -> Result<f64> {
    prof.users()
        .iter()
        .enumerate()
        .map(|(i, u)| {
            utility_two_uav(mp, u, prof.arena()).map_err(|e| match e {
                Error::MissingPreferencePair(_) => Error::MissingPreferencePair(i),
                other => other,
            })
        })
        .sum()
}

/// User weight from its link budget: `snr_threshold * noise_power / ref_channel_power`.
pub fn weight_from_link(
    snr_threshold: f64,
    noise_power: f64,
    ref_channel_power: f64,
) -> Result<f64> {
    for (name, v) in [
        ("snr_threshold", snr_threshold),
        ("noise_power", noise_power),
        ("ref_channel_power", ref_channel_power),
    ] {
        if !(v.is_finite() && v > 0.0) {
            return Err(domain(format!("{name} must be positive, got {v}")));
        }
    }
    Ok(snr_threshold * noise_power / ref_channel_power)
}
