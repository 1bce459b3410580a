//! Fixtures shared by the benchmarks.

use uavplace::montecarlo::SplitMix64;
use uavplace::{Arena, Preference, Profile, UserReport};

/// `n` users with uniform locations over the unit square, each with a random
/// preference and preference pair, at altitude 0.2. Weights are integers in
/// `1..=4` unless `unit_weights` is set.
pub fn random_profile(n: usize, alpha: f64, unit_weights: bool, seed: u64) -> Profile {
    let arena = Arena::new(0.5, 0.5, 0.2, alpha).expect("valid arena");
    let mut rng = SplitMix64::new(seed);
    let pref = |rng: &mut SplitMix64| Preference::ALL[rng.below(2) as usize];
    let users = (0..n)
        .map(|_| {
            let (x, y) = (rng.next_f64(), rng.next_f64());
            let w = if unit_weights {
                1.0
            } else {
                (1 + rng.below(4)) as f64
            };
            let p = pref(&mut rng);
            let pair = [pref(&mut rng), pref(&mut rng)];
            UserReport::new(x, y, w).with_pref(p).with_prefs(pair)
        })
        .collect();
    Profile::new(arena, users).expect("valid profile")
}
