//! Human-facing number formatting.

/// Formats `x` with `digits` significant digits, `%g` style: trailing zeros
/// are dropped and scientific notation is used outside `1e-4 ..< 1e{digits}`.
pub fn significant(x: f64, digits: usize) -> String {
    let digits = digits.max(1);
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".to_string() } else { x.to_string() };
    }
    // Round first so 9.999995 -> 10.0000 picks the right exponent.
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        return format!("{}e{}", strip_zeros(mantissa), exp);
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    strip_zeros(&format!("{:.*}", decimals, x)).to_string()
}

/// Six significant digits, the precision used for all printed results.
pub fn sig6(x: f64) -> String {
    significant(x, 6)
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
