//! Profile documents.
//!
//! ```json
//! {
//!   "arena": {"A": 0.5, "B": 0.5, "z0": 0.0, "alpha": 2},
//!   "users": [
//!     {"x": 0.2, "y": 0.5, "w": 1.0, "pref": "adverse"},
//!     {"x": 0.6, "y": 0.5, "prefs": ["favorable", "adverse"]}
//!   ]
//! }
//! ```
//!
//! `w` defaults to 1, `z0` to 0 and `alpha` to 2. Unknown keys are rejected.
//! Errors name the first offending field by path, e.g. `users[1].x`.

use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::model::{Arena, Preference, Profile, UserReport, MAX_ALPHA, MIN_ALPHA};

fn invalid(path: impl Into<String>, reason: impl Into<String>) -> Error {
    Error::InvalidProfile {
        path: path.into(),
        reason: reason.into(),
    }
}

fn object<'a>(v: &'a Value, path: &str, keys: &[&str]) -> Result<&'a Map<String, Value>> {
    let map = v
        .as_object()
        .ok_or_else(|| invalid(path, "expected an object"))?;
    if let Some(k) = map.keys().find(|k| !keys.contains(&k.as_str())) {
        let at = if path == "$" {
            k.clone()
        } else {
            format!("{path}.{k}")
        };
        return Err(invalid(at, "unknown field"));
    }
    Ok(map)
}

fn number(map: &Map<String, Value>, key: &str, path: &str, default: Option<f64>) -> Result<f64> {
    let at = format!("{path}.{key}");
    match map.get(key) {
        None => default.ok_or_else(|| invalid(&at, "missing field")),
        Some(v) => v
            .as_f64()
            .filter(|x| x.is_finite())
            .ok_or_else(|| invalid(&at, "expected a finite number")),
    }
}

fn preference(v: &Value, path: &str) -> Result<Preference> {
    match v.as_str() {
        Some("favorable") => Ok(Preference::Favorable),
        Some("adverse") => Ok(Preference::Adverse),
        _ => Err(invalid(path, "expected \"favorable\" or \"adverse\"")),
    }
}

fn arena(v: &Value) -> Result<Arena> {
    let path = "arena";
    let m = object(v, path, &["A", "B", "z0", "alpha"])?;
    let a = number(m, "A", path, None)?;
    let b = number(m, "B", path, None)?;
    let z0 = number(m, "z0", path, Some(0.0))?;
    let alpha = number(m, "alpha", path, Some(2.0))?;
    if a <= 0.0 {
        return Err(invalid("arena.A", "must be positive"));
    }
    if b <= 0.0 {
        return Err(invalid("arena.B", "must be positive"));
    }
    if z0 < 0.0 {
        return Err(invalid("arena.z0", "must be non-negative"));
    }
    if !(MIN_ALPHA..=MAX_ALPHA).contains(&alpha) {
        return Err(invalid(
            "arena.alpha",
            format!("must lie in [{MIN_ALPHA}, {MAX_ALPHA}]"),
        ));
    }
    Arena::new(a, b, z0, alpha)
}

fn user(v: &Value, i: usize, a: &Arena) -> Result<UserReport> {
    let path = format!("users[{i}]");
    let m = object(v, &path, &["x", "y", "w", "pref", "prefs"])?;
    let x = number(m, "x", &path, None)?;
    let y = number(m, "y", &path, None)?;
    let w = number(m, "w", &path, Some(1.0))?;
    if !(0.0..=a.width()).contains(&x) {
        return Err(invalid(
            format!("{path}.x"),
            format!("must lie in [0, {}]", a.width()),
        ));
    }
    if !(0.0..=a.height()).contains(&y) {
        return Err(invalid(
            format!("{path}.y"),
            format!("must lie in [0, {}]", a.height()),
        ));
    }
    if w <= 0.0 {
        return Err(invalid(format!("{path}.w"), "must be positive"));
    }
    let mut u = UserReport::new(x, y, w);
    if let Some(p) = m.get("pref") {
        u = u.with_pref(preference(p, &format!("{path}.pref"))?);
    }
    if let Some(p) = m.get("prefs") {
        let at = format!("{path}.prefs");
        let pair = p
            .as_array()
            .filter(|arr| arr.len() == 2)
            .ok_or_else(|| invalid(&at, "expected a two-element array"))?;
        u = u.with_prefs([
            preference(&pair[0], &format!("{at}[0]"))?,
            preference(&pair[1], &format!("{at}[1]"))?,
        ]);
    }
    Ok(u)
}

/// Reads a profile from a parsed JSON document.
pub fn profile_from_value(doc: &Value) -> Result<Profile> {
    let root = object(doc, "$", &["arena", "users"])?;
    let a = arena(
        root.get("arena")
            .ok_or_else(|| invalid("arena", "missing field"))?,
    )?;
    let users = root
        .get("users")
        .ok_or_else(|| invalid("users", "missing field"))?
        .as_array()
        .ok_or_else(|| invalid("users", "expected an array"))?;
    if users.is_empty() {
        return Err(invalid("users", "must contain at least one user"));
    }
    let users = users
        .iter()
        .enumerate()
        .map(|(i, v)| user(v, i, &a))
        .collect::<Result<Vec<_>>>()?;
    Profile::new(a, users)
}

/// Parses profile JSON text.
pub fn parse_profile(text: &str) -> Result<Profile> {
    let doc: Value = serde_json::from_str(text).map_err(|e| invalid("$", e.to_string()))?;
    profile_from_value(&doc)
}

pub fn profile_to_value(prof: &Profile) -> Value {
    serde_json::to_value(prof).expect("profiles always serialize")
}
