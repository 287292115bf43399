//! Float formatting for CSV output: 12 significant digits, `%g` style.

pub const SIG_DIGITS: usize = 12;

/// `%.12g`-style rendering: fixed notation for exponents in `[-4, 12)`,
/// scientific otherwise, trailing zeros removed.
pub fn sig(x: f64) -> String {
    sig_digits(x, SIG_DIGITS)
}

pub fn sig_digits(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim_zeros(mantissa), sign, exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// `sig` for optional values; `None` becomes an empty field.
pub fn opt(x: Option<f64>) -> String {
    x.map(sig).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_printf_g() {
        assert_eq!(sig(0.0), "0");
        assert_eq!(sig(1.0), "1");
        assert_eq!(sig(6.0003), "6.0003");
        assert_eq!(sig(-2.5), "-2.5");
        assert_eq!(sig(1.0 / 3.0), "0.333333333333");
        assert_eq!(sig(2.0 / 3.0), "0.666666666667");
        assert_eq!(sig(123456789012.0), "123456789012");
        assert_eq!(sig(1234567890123.0), "1.23456789012e+12");
        assert_eq!(sig(0.0001), "0.0001");
        assert_eq!(sig(0.00001234), "1.234e-05");
        assert_eq!(sig(f64::NAN), "nan");
        assert_eq!(opt(None), "");
    }
}
