//! Number formatting and small parsing helpers shared by the CSV readers
//! and writers.

use crate::error::{Error, Result};

/// Formats `x` with 15 significant digits in the style of C's `%.15g`.
///
/// Non-finite values are written as `inf`, `-inf` and `nan`. Output is
/// locale independent.
pub fn fmt_g15(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.14e}", x);
    let (mant, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..15).contains(&exp) {
        let decimals = (14 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, x))
    } else {
        let mant = trim_zeros(mant.to_string());
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mant}e{sign}{:02}", exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    let t = s.trim_end_matches('0').trim_end_matches('.');
    t.to_string()
}

/// Parses one CSV field as `f64`, accepting `inf`/`-inf`/`nan`.
pub fn parse_f64(field: &str, line: usize) -> Result<f64> {
    let f = field.trim();
    match f {
        "inf" | "+inf" | "Infinity" => Ok(f64::INFINITY),
        "-inf" | "-Infinity" => Ok(f64::NEG_INFINITY),
        _ => f.parse::<f64>().map_err(|_| Error::Parse {
            line,
            msg: format!("cannot parse number '{f}'"),
        }),
    }
}

/// Splits a CSV line and checks the field count.
pub fn split_fields(line: &str, lineno: usize, expected: usize) -> Result<Vec<&str>> {
    let fields: Vec<&str> = line.split(',').collect();
    if fields.len() != expected {
        return Err(Error::Parse {
            line: lineno,
            msg: format!("expected {expected} fields, found {}", fields.len()),
        });
    }
    Ok(fields)
}

/// JSON helper: non-finite numbers become `null`.
pub(crate) fn finite_or_none(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}
