//! Number formatting helpers shared by the text outputs.

/// Rounds `x` to `digits` significant digits.
pub fn signif(x: f64, digits: usize) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", digits.max(1) - 1, x)
        .parse()
        .unwrap_or(x)
}

fn split_sci(s: &str) -> (&str, i32) {
    let (mantissa, exp) = s.split_once('e').expect("scientific notation");
    (mantissa, exp.parse().expect("exponent"))
}

fn trim_fraction(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

/// C-style `%.{digits}g`.
pub fn format_g(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = split_sci(&sci);
    if exp < -4 || exp >= digits as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim_fraction(mantissa), sign, exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_fraction(&format!("{x:.decimals$}"))
    }
}

/// Fixed-notation column formatting: every value gets the number of
/// decimals the most demanding one needs (at most `digits` significant
/// digits), right-aligned to a common width.
pub fn format_column(values: &[f64], digits: usize) -> Vec<String> {
    let digits = digits.max(1);
    let decimals = values
        .iter()
        .filter(|v| v.is_finite() && **v != 0.0)
        .map(|&v| {
            let reference: f64 = format!("{:.*e}", digits - 1, v).parse().unwrap();
            let (_, exp) = split_sci(&format!("{:.*e}", digits - 1, v));
            let needed = (1..=digits)
                .find(|&s| format!("{:.*e}", s - 1, v).parse::<f64>().unwrap() == reference)
                .unwrap_or(digits);
            (needed as i32 - 1 - exp).max(0) as usize
        })
        .max()
        .unwrap_or(0);
    let cells: Vec<String> = values.iter().map(|v| format!("{v:.decimals$}")).collect();
    let width = cells.iter().map(String::len).max().unwrap_or(0);
    cells.into_iter().map(|c| format!("{c:>width$}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g_format() {
        assert_eq!(format_g(3.5, 4), "3.5");
        assert_eq!(format_g(7.0, 4), "7");
        assert_eq!(format_g(-1.0, 7), "-1");
        assert_eq!(format_g(8627.2, 12), "8627.2");
        assert_eq!(format_g(1.0 / 3.0, 4), "0.3333");
        assert_eq!(format_g(123456.0, 4), "1.235e+05");
        assert_eq!(format_g(0.00001234, 3), "1.23e-05");
        assert_eq!(format_g(0.0, 3), "0");
    }

    #[test]
    fn column_format() {
        assert_eq!(format_column(&[28.0], 7), vec!["28"]);
        assert_eq!(
            format_column(&[28.0, 2.0, 0.0, 0.5, 5.0], 7),
            vec!["28.0", " 2.0", " 0.0", " 0.5", " 5.0"]
        );
        assert_eq!(format_column(&[1.0, 0.25], 7), vec!["1.00", "0.25"]);
    }

    #[test]
    fn signif_rounds() {
        assert_eq!(signif(2.666666, 4), 2.667);
        assert_eq!(signif(0.0, 4), 0.0);
    }
}
