/// Formats like C's `%g` with six significant digits.
pub fn g6(x: f64) -> String {
    const DIGITS: i32 = 6;
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    // rounding may carry into the next decade, e.g. 999999.5
    let rounded: f64 = format!("{:.*e}", (DIGITS - 1) as usize, x).parse().unwrap();
    let exp = if rounded.abs() >= 10f64.powi(exp + 1) { exp + 1 } else { exp };
    if !(-5..DIGITS).contains(&exp) {
        let s = format!("{:.*e}", (DIGITS - 1) as usize, x);
        let (mantissa, e) = s.split_once('e').unwrap();
        let e: i32 = e.parse().unwrap();
        let sign = if e < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim(mantissa), e.abs())
    } else {
        let decimals = (DIGITS - 1 - exp).max(0) as usize;
        trim(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::g6;

    #[test]
    fn matches_printf_g() {
        assert_eq!(g6(0.36787944117144233), "0.367879");
        assert_eq!(g6(9.210340371976184e-4), "0.000921034");
        assert_eq!(g6(9.210340371976184e-6), "9.21034e-06");
        assert_eq!(g6(1.0), "1");
        assert_eq!(g6(123456789.0), "1.23457e+08");
        assert_eq!(g6(-0.401), "-0.401");
        assert_eq!(g6(999999.5), "1e+06");
        assert_eq!(g6(0.0), "0");
    }
}
