//! Flag value parsing: complex numbers, integer lists and windows.

use recurlerch::Cplx;
use rug::Float;

/// Index of the sign separating real and imaginary parts, skipping a leading
/// sign and exponent signs.
fn split_point(body: &str) -> Option<usize> {
    let b = body.as_bytes();
    (1..b.len()).rev().find(|&i| (b[i] == b'+' || b[i] == b'-') && !matches!(b[i - 1], b'e' | b'E'))
}

fn real(text: &str, prec: u32) -> Result<Float, String> {
    let t = match text {
        "" | "+" => "1",
        "-" => "-1",
        t => t,
    };
    let parsed = Float::parse(t).map_err(|e| format!("bad number '{text}': {e}"))?;
    let v = Float::with_val(prec, parsed);
    if !v.is_finite() {
        return Err(format!("non-finite number '{text}'"));
    }
    Ok(v)
}

/// Parses `re`, `re+imi`, `re-imi` or `imi` at `prec` bits.
pub fn parse_complex(text: &str, prec: u32) -> Result<Cplx, String> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err("empty complex number".into());
    }
    let Some(body) = t.strip_suffix('i') else {
        return Ok(Cplx::from_real(real(&t, prec)?));
    };
    let (re, im) = match split_point(body) {
        Some(k) => (real(&body[..k], prec)?, real(&body[k..], prec)?),
        None => (Float::new(prec), real(body, prec)?),
    };
    Ok(Cplx::from_parts(re, im))
}

pub fn parse_list<T: std::str::FromStr>(text: &str) -> Result<Vec<T>, String>
where
    T::Err: std::fmt::Display,
{
    text.split(',').map(|p| p.trim().parse::<T>().map_err(|e| format!("bad list entry '{}': {e}", p.trim()))).collect()
}

/// `re0,re1,im0,im1` or, for annuli, `r0,r1`.
pub fn parse_bounds(text: &str, n: usize) -> Result<Vec<f64>, String> {
    let v: Vec<f64> = parse_list(text)?;
    if v.len() != n {
        return Err(format!("expected {n} comma-separated numbers, got {}", v.len()));
    }
    Ok(v)
}
