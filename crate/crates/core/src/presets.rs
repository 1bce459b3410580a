//! Small named profiles used in documentation, tests and the CLI.

use crate::error::{Error, Result};
use crate::model::{Arena, Preference, Profile, UserReport};

pub const PRESET_NAMES: &[&str] = &["intro-2user", "obnoxious-2user", "percentile-14user"];

/// Two unit-weight users at `x = 0` and `x = 2` on `[0, 4]^2`.
pub fn intro_2user() -> Profile {
    Profile::new(
        Arena::new(2.0, 2.0, 0.0, 2.0).expect("valid arena"),
        vec![UserReport::at(0.0, 0.0), UserReport::at(2.0, 0.0)],
    )
    .expect("valid profile")
}

/// Two adverse users at `(0.2, 0.5)` and `(0.6, 0.5)` on the unit square.
pub fn obnoxious_2user() -> Profile {
    Profile::new(
        Arena::unit(),
        vec![
            UserReport::at(0.2, 0.5).with_pref(Preference::Adverse),
            UserReport::at(0.6, 0.5).with_pref(Preference::Adverse),
        ],
    )
    .expect("valid profile")
}

/// Fourteen unit-weight users on `[0, 15]^2` at `x = 1..=14` (listed out of
/// order) and `y = 15 - x`.
pub fn percentile_14user() -> Profile {
    let xs = [
        9.0, 2.0, 14.0, 5.0, 11.0, 1.0, 7.0, 12.0, 3.0, 10.0, 6.0, 13.0, 4.0, 8.0,
    ];
    Profile::new(
        Arena::new(7.5, 7.5, 0.0, 2.0).expect("valid arena"),
        xs.iter().map(|&x| UserReport::at(x, 15.0 - x)).collect(),
    )
    .expect("valid profile")
}

pub fn preset(name: &str) -> Result<Profile> {
    match name {
        "intro-2user" => Ok(intro_2user()),
        "obnoxious-2user" => Ok(obnoxious_2user()),
        "percentile-14user" => Ok(percentile_14user()),
        _ => Err(Error::UnknownName(name.to_string())),
    }
}
