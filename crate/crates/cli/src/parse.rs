//! Value parsers for command-line arguments.

use hartogs_core::exact::parse_rational;
use hartogs_core::{Complex64, Error, HPoint64, LatticeIndex, Rational, Result};

/// Parses `0.3`, `-0.2i`, `0.1+0.4i`, `i`, or polar `r@theta`.
pub fn complex(s: &str) -> Result<Complex64> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a complex number: {s:?}"));
    if let Some((r, t)) = s.split_once('@') {
        let r: f64 = r.trim().parse().map_err(|_| bad())?;
        let t: f64 = t.trim().parse().map_err(|_| bad())?;
        return Ok(Complex64::from_polar(r, t));
    }
    let Some(body) = s.strip_suffix('i') else {
        return s.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad());
    };
    let bytes = body.as_bytes();
    let split =
        (1..bytes.len()).rev().find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("", body),
    };
    let re: f64 = if re.is_empty() { 0.0 } else { re.parse().map_err(|_| bad())? };
    let im: f64 = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        v => v.parse().map_err(|_| bad())?,
    };
    Ok(Complex64::new(re, im))
}

/// Parses `z1,z2`.
pub fn point(s: &str) -> Result<HPoint64> {
    let (a, b) = s.split_once(',').ok_or_else(|| Error::Parse(format!("expected z1,z2 but got {s:?}")))?;
    Ok(HPoint64::new(complex(a)?, complex(b)?))
}

/// Parses `a1,a2`.
pub fn index(s: &str) -> Result<LatticeIndex> {
    let (a, b) = s.split_once(',').ok_or_else(|| Error::Parse(format!("expected a1,a2 but got {s:?}")))?;
    let parse = |v: &str| v.trim().parse::<i64>().map_err(|_| Error::Parse(format!("not an integer: {v:?}")));
    LatticeIndex::new(parse(a)?, parse(b)?)
}

pub fn rationals(s: &str) -> Result<Vec<Rational>> {
    s.split(',').map(parse_rational).collect()
}

pub fn reals(s: &str) -> Result<Vec<f64>> {
    s.split(',').map(|v| v.trim().parse::<f64>().map_err(|_| Error::Parse(format!("not a number: {v:?}")))).collect()
}
