//! Complex literals of the form `[-]ddd[.ddd][(+|-)ddd[.ddd]i]`, plus purely
//! imaginary `[-]ddd[.ddd]i`.

use num_complex::Complex;

fn decimal(s: &str, signed: bool) -> Option<f64> {
    let body = match s.as_bytes().first() {
        Some(b'-') | Some(b'+') if signed => &s[1..],
        Some(b'-') => &s[1..],
        _ => s,
    };
    let (int, frac) = match body.split_once('.') {
        Some((i, f)) => (i, Some(f)),
        None => (body, None),
    };
    let digits = |t: &str| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit());
    if !digits(int) || frac.is_some_and(|f| !digits(f)) {
        return None;
    }
    s.parse().ok()
}

pub fn parse_complex(s: &str) -> Result<Complex<f64>, String> {
    let bad = || format!("{s:?} is not a complex literal (expected e.g. 1.5, -2i or 1+1.7320508075688772i)");
    let s = s.trim();
    let Some(body) = s.strip_suffix('i') else {
        return decimal(s, false).map(|re| Complex::new(re, 0.0)).ok_or_else(bad);
    };
    // the imaginary part starts at the last sign that is not the leading one
    match body.rfind(['+', '-']).filter(|&k| k > 0) {
        Some(k) => {
            let re = decimal(&body[..k], false).ok_or_else(bad)?;
            let im = decimal(&body[k..], true).ok_or_else(bad)?;
            Ok(Complex::new(re, im))
        }
        None => decimal(body, false).map(|im| Complex::new(0.0, im)).ok_or_else(bad),
    }
}

/// Shortest round-trip form in the same grammar.
pub fn format_complex(z: Complex<f64>) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.im.is_sign_negative() {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}
