//! Strategyproof placement of UAVs over a rectangular service area.
//!
//! Users report ground locations (and, in the dual games, whether they want
//! a UAV near or far). A mechanism maps the reports to UAV positions so that
//! no user gains by lying. The crate provides the mechanisms, the
//! full-information optima they are measured against, a deviation search
//! that checks truthfulness, ratio checks against the proven bounds, and a
//! seeded Monte Carlo harness.
//!
//! ```
//! use uavplace::{median_mechanism, opt_favorable, presets};
//!
//! let prof = presets::intro_2user();
//! assert_eq!(opt_favorable(&prof).unwrap().value, 2.0);
//! assert_eq!(median_mechanism(&prof).unwrap().x, 0.0);
//! ```

pub mod error;
pub mod format;
pub mod json;
pub mod mechanism;
pub mod model;
pub mod montecarlo;
pub mod multi;
pub mod oracle;
pub mod presets;
pub mod single;
pub mod verify;

pub use error::{Error, Result};
pub use mechanism::{Game, Mechanism, MECHANISM_NAMES};
pub use model::{
    cost, social_cost, social_utility_adverse, social_utility_dual, social_utility_two_uav,
    utility_adverse, utility_dual, utility_two_uav, weight_from_link, Arena, MultiPlacement,
    Outcome, Placement, Preference, Profile, UserReport,
};
pub use multi::{
    k_obnoxious_endpoints, percentile_mechanism, two_uav_dual_mechanism, PercentileSchedule, QSet,
    QSetClassification,
};
pub use oracle::{
    grid_search, opt_dual_single, opt_favorable, opt_k_obnoxious, opt_obnoxious, opt_two_uav,
    OracleMethod, OracleResult, SearchMode,
};
pub use single::{
    dual_majority_mechanism, lower_median, median_mechanism, unweighted_corner_mechanism,
    weighted_corner_mechanism, weighted_median, weighted_median_mechanism, MechanismKind,
};
pub use verify::{
    check_power_inequalities, check_ratio, check_strategyproof, check_weight_independence,
    fuzz_strategyproof, DeviationReport, LemmaReport, RatioReport,
};
