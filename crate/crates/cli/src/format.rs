//! Number formatting shared by every output file.

/// `v` rounded to 9 significant digits, printed in the shortest form that
/// reads back as the rounded value. Plain notation for magnitudes in
/// `[1e-5, 1e15)`, exponent notation otherwise. Negative zero prints as `0`.
pub fn sig9(v: f64) -> String {
    if v == 0.0 {
        return "0".to_owned();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let rounded = round9(v);
    let mag = rounded.abs();
    if (1e-5..1e15).contains(&mag) {
        rounded.to_string()
    } else {
        format!("{rounded:e}")
    }
}

/// `v` rounded to 9 significant digits, for values serialized through serde.
/// Negative zero becomes `0.0`.
pub fn round9(v: f64) -> f64 {
    if v == 0.0 {
        return 0.0;
    }
    if !v.is_finite() {
        return v;
    }
    format!("{v:.8e}").parse().expect("exponent form parses")
}
