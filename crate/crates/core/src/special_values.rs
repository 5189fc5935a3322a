//! Values of `phi(1, -m, 0)` at non-positive integers and their rational
//! reconstruction.
//!
//! At `s = -m` the continuation series is a finite sum (every term with
//! `k_1 > m` carries `binom(m, k_1) = 0`), so the value is an algebraic
//! number computed to working precision. When the recurrence has integer
//! data it is rational; the fraction is recovered from a continued fraction
//! expansion and confirmed by recomputing at twice the precision.

use rug::{Float, Integer};

use crate::error::{Error, Result};
use crate::mp::Cplx;
use crate::poles_residues::{PoleCaps, SWindow};
use crate::{EvalParams, LerchZeta, Method, RecurrenceSpec};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalCandidate {
    pub numerator: Integer,
    pub denominator: Integer,
}

impl std::fmt::Display for RationalCandidate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.denominator == 1 {
            write!(f, "{}", self.numerator)
        } else {
            write!(f, "{}/{}", self.numerator, self.denominator)
        }
    }
}

impl RationalCandidate {
    pub fn to_f64(&self) -> f64 {
        self.numerator.to_f64() / self.denominator.to_f64()
    }
}

#[derive(Clone, Debug)]
pub struct SpecialValue {
    pub m: u32,
    pub value: Cplx,
    pub error_bound: f64,
    pub rational: Option<RationalCandidate>,
    /// `|value - p/q|` at the working precision.
    pub reconstruction_error: Option<f64>,
    /// The same fraction was recovered at twice the precision.
    pub confirmed: bool,
    /// Why no fraction was accepted.
    pub failure: Option<String>,
}

/// Smallest-denominator convergent of `v` within `accept` of it, with
/// denominators capped at `den_cap`.
pub fn reconstruct_rational(v: &Float, den_cap: &Integer, accept: &Float) -> Option<RationalCandidate> {
    let p = v.prec();
    let (mut h1, mut h2) = (Integer::from(1), Integer::from(0));
    let (mut k1, mut k2) = (Integer::from(0), Integer::from(1));
    let mut x = v.clone();
    for _ in 0..4 * p {
        let a_f = Float::with_val(p, x.floor_ref());
        let a = a_f.to_integer()?;
        let h = Integer::from(&a * &h1) + &h2;
        let k = Integer::from(&a * &k1) + &k2;
        if k > *den_cap {
            return None;
        }
        let approx = Float::with_val(p, &h) / &k;
        if Float::with_val(p, &approx - v).abs() <= *accept {
            return Some(RationalCandidate { numerator: h, denominator: k });
        }
        let frac = Float::with_val(p, &x - &a_f);
        if frac.is_zero() {
            return None;
        }
        x = Float::with_val(p, 1) / frac;
        (h2, h1) = (h1, h);
        (k2, k1) = (k1, k);
    }
    None
}

fn evaluate(zeta: &LerchZeta, m: u32) -> Result<(Cplx, f64)> {
    let p = zeta.precision();
    let params = EvalParams::from_values(Cplx::one(p), Cplx::from_real(Float::with_val(p, -(m as i64))), Float::new(p))
        .with_tol(2f64.powi(-(p as i32 - 16)).max(1e-300));
    let r = zeta.eval(&params, Some(Method::ContinuedX0))?;
    Ok((r.value, r.error_bound))
}

fn reconstruct_at(value: &Cplx) -> (Option<RationalCandidate>, Option<f64>, Option<String>) {
    let p = value.prec();
    let accept = Float::with_val(p, Float::i_exp(1, -(p as i32) / 2))
        * Float::with_val(p, value.re.abs_ref()).max(&Float::with_val(p, 1));
    if Float::with_val(p, value.im.abs_ref()) > accept {
        return (None, None, Some(format!("value is not real (imaginary part {:e})", value.im.to_f64())));
    }
    let cap = Integer::from(1) << (p / 4);
    match reconstruct_rational(&value.re, &cap, &accept) {
        Some(q) => {
            let d = Float::with_val(p, &value.re - Float::with_val(p, &q.numerator) / &q.denominator);
            (Some(q), Some(d.to_f64().abs()), None)
        }
        None => (None, None, Some(format!("no fraction with denominator below 2^{}", p / 4))),
    }
}

/// `phi(1, -m, 0)` at the zeta's precision, rejecting lattice points.
pub fn value_at_negative_integer(zeta: &LerchZeta, m: u32) -> Result<SpecialValue> {
    let p = zeta.precision();
    let target = -(m as f64);
    let window = SWindow::new(target - 0.25, target + 0.25, -0.25, 0.25)?;
    let recs = zeta.poles_s(&Cplx::one(p), &window, PoleCaps::x0())?;
    if recs.iter().any(|r| !r.removable && (r.location.to_c64().re - target).abs() < 1e-6 && r.location.is_real()) {
        return Err(Error::IsPole { m });
    }
    let (value, error_bound) = evaluate(zeta, m)?;
    let (rational, reconstruction_error, failure) = reconstruct_at(&value);
    let confirmed = match &rational {
        Some(q) => {
            let hi = zeta.at_precision(2 * p)?;
            let (v2, _) = evaluate(&hi, m)?;
            matches!(reconstruct_at(&v2).0, Some(q2) if &q2 == q)
        }
        None => false,
    };
    Ok(SpecialValue { m, value, error_bound, rational, reconstruction_error, confirmed, failure })
}

pub fn special_value(spec: &RecurrenceSpec, m: u32, prec: u32) -> Result<SpecialValue> {
    value_at_negative_integer(&LerchZeta::new(spec.clone(), prec)?, m)
}
