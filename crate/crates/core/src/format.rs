//! Locale-free number formatting for everything the tools print.

/// Significant digits kept in printed numbers.
pub const SIGNIFICANT_DIGITS: usize = 12;

/// Rounds `v` to 12 significant digits and prints the shortest decimal that
/// reads back as the rounded value, without exponent notation.
///
/// Non-finite values print as `inf`, `-inf` and `nan`.
pub fn fmt_num(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf" } else { "-inf" }.into();
    }
    let rounded: f64 = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, v)
        .parse()
        .expect("scientific notation parses");
    if rounded == 0.0 {
        // Collapse -0 so signs never leak into diffs.
        return "0".into();
    }
    rounded.to_string()
}
