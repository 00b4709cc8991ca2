//! Shared formatting for emitted CSV tables.

/// 17 significant digits: enough for any `f64` to round-trip through text.
pub fn format_number(x: f64) -> String {
    format!("{x:.16e}")
}
