use serde_json::Value;
use xyep_core::Complex64;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Twelve significant digits, fixed notation for moderate exponents.
pub fn sig12(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let s = format!("{:.11e}", v);
    let exp: i32 = s.split('e').nth(1).and_then(|e| e.parse().ok()).unwrap_or(0);
    if (-5..12).contains(&exp) {
        format!("{:.*}", (11 - exp) as usize, v)
    } else {
        s
    }
}

/// Parse `a`, `bi`, `a+bi` or `a-bi` (with optional exponents and spaces).
pub fn parse_complex(text: &str) -> Result<Complex64, String> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err("empty complex literal".into());
    }
    let bad = || format!("cannot parse complex number '{text}'");
    let Some(body) = s.strip_suffix(['i', 'j']) else {
        return s.parse::<f64>().map(|r| Complex64::new(r, 0.0)).map_err(|_| bad());
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let imag = |t: &str| -> Result<f64, String> {
        match t {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => t.parse::<f64>().map_err(|_| bad()),
        }
    };
    match split {
        Some(k) => {
            let re = body[..k].parse::<f64>().map_err(|_| bad())?;
            Ok(Complex64::new(re, imag(&body[k..])?))
        }
        None => Ok(Complex64::new(0.0, imag(body)?)),
    }
}

pub fn complex_json(z: Complex64) -> Value {
    serde_json::json!([z.re, z.im])
}

/// Comment header with version and resolved configuration.
pub fn csv_header(command: &str, config: &Value) -> String {
    format!("# xyep {VERSION} {command}\n# config: {config}\n")
}

pub fn meta(command: &str, config: &Value) -> Value {
    serde_json::json!({ "version": VERSION, "command": command, "config": config })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_literals() {
        assert_eq!(parse_complex("0.6+0.8i").unwrap(), Complex64::new(0.6, 0.8));
        assert_eq!(parse_complex("-0.6-0.8i").unwrap(), Complex64::new(-0.6, -0.8));
        assert_eq!(parse_complex("2i").unwrap(), Complex64::new(0.0, 2.0));
        assert_eq!(parse_complex("-i").unwrap(), Complex64::new(0.0, -1.0));
        assert_eq!(parse_complex("1e-3-2E-4i").unwrap(), Complex64::new(1e-3, -2e-4));
        assert_eq!(parse_complex("0.25").unwrap(), Complex64::new(0.25, 0.0));
        assert!(parse_complex("abc").is_err());
    }

    #[test]
    fn twelve_digits() {
        assert_eq!(sig12(0.6), "0.600000000000");
        assert_eq!(sig12(-1.01159), "-1.01159000000");
        assert_eq!(sig12(1.5e-20), "1.50000000000e-20");
    }

    proptest::proptest! {
        #[test]
        fn complex_literals_round_trip(re in -1e6f64..1e6, im in -1e6f64..1e6) {
            let text = format!("{re:e}{im:+e}i");
            proptest::prop_assert_eq!(parse_complex(&text).unwrap(), Complex64::new(re, im));
        }

        #[test]
        fn sig12_parses_back(v in -1e12f64..1e12) {
            let back: f64 = sig12(v).parse().unwrap();
            proptest::prop_assert!((back - v).abs() <= 1e-11 * v.abs().max(1e-300));
        }
    }
}
