//! Number formatting shared by the CSV and JSON emitters.

/// Formats with 9 significant digits, `%g` style: fixed notation for moderate
/// exponents, scientific otherwise, trailing zeros trimmed.
pub fn fmt_sig(x: f64) -> String {
    fmt_sig_digits(x, 9)
}

pub fn fmt_sig_digits(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        let m = trim_zeros(mantissa);
        format!("{m}e{exp}")
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formatting() {
        assert_eq!(fmt_sig(1.6), "1.6");
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(-0.238405844), "-0.238405844");
        assert_eq!(fmt_sig(123456789.4), "123456789");
        assert_eq!(fmt_sig(1.0e10), "1e10");
        assert_eq!(fmt_sig(3.0e-7), "3e-7");
        assert_eq!(fmt_sig(48.4786512345), "48.4786512");
        assert_eq!(fmt_sig(0.000123456789123), "0.000123456789");
    }
}
