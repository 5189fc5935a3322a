//! Brute-force summation of the defining series inside its convergence
//! half-plane, with explicit geometric tail bounds.

use std::fmt;

use num_complex::Complex64;
use rug::{Float, Integer};

use crate::algebraic::BinetData;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::mp::{self, CompensatedSum, Cplx};
use crate::recurrence::NormalizedRecurrence;

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MARGIN: f64 = 1e-3;
pub const DEFAULT_POLE_GUARD: f64 = 1e-6;
pub const DEFAULT_MAX_TERMS: usize = 2_000_000;

/// Inputs of a single evaluation of `phi(z, s, x)`.
#[derive(Clone, Debug)]
pub struct EvalParams {
    pub z: Cplx,
    pub s: Cplx,
    pub x: Float,
    pub tol: f64,
    pub max_terms: usize,
    /// Distance from the abscissa below which direct summation is refused.
    pub margin: f64,
    /// Continuation denominators smaller than this abort with `NearPole`.
    pub pole_guard: f64,
    pub exec: Execution,
}

impl EvalParams {
    pub fn new(prec: u32, z: Complex64, s: Complex64, x: f64) -> Self {
        EvalParams::from_values(Cplx::from_c64(prec, z), Cplx::from_c64(prec, s), Float::with_val(prec, x))
    }

    pub fn from_values(z: Cplx, s: Cplx, x: Float) -> Self {
        EvalParams {
            z,
            s,
            x,
            tol: DEFAULT_TOL,
            max_terms: DEFAULT_MAX_TERMS,
            margin: DEFAULT_MARGIN,
            pole_guard: DEFAULT_POLE_GUARD,
            exec: Execution::Sequential,
        }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_terms(mut self, max_terms: usize) -> Self {
        self.max_terms = max_terms;
        self
    }

    pub fn with_pole_guard(mut self, guard: f64) -> Self {
        self.pole_guard = guard;
        self
    }

    pub fn with_exec(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }

    pub fn with_s(&self, s: Cplx) -> Self {
        EvalParams { s, ..self.clone() }
    }

    pub fn with_z(&self, z: Cplx) -> Self {
        EvalParams { z, ..self.clone() }
    }

    pub fn sigma(&self) -> f64 {
        self.s.re.to_f64()
    }

    /// Copies `z`, `s`, `x` to `prec` bits.
    pub(crate) fn at_prec(&self, prec: u32) -> (Cplx, Cplx, Float) {
        (self.z.with_prec(prec), self.s.with_prec(prec), Float::with_val(prec, &self.x))
    }

    pub fn check(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidSpec(format!("tolerance {} must be positive", self.tol)));
        }
        let x = self.x.to_f64();
        if !(self.x >= 0 && self.x < 1) {
            return Err(Error::XOutOfRange { x });
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Direct,
    ContinuedX0,
    RamanujanLift,
    PowerSeriesZ,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Direct => "direct",
            Method::ContinuedX0 => "continued_x0",
            Method::RamanujanLift => "ramanujan_lift",
            Method::PowerSeriesZ => "power_series_z",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug)]
pub struct EvalResult {
    pub value: Cplx,
    pub error_bound: f64,
    pub method: Method,
    /// Number of series terms actually summed.
    pub terms_used: usize,
    /// Outer truncation index: last `n` (direct), last `k_1` (continuation)
    /// or last `j` (lift).
    pub depth: usize,
    /// Largest truncation index of any inner evaluation (lift only).
    pub inner_depth: usize,
    /// Smallest continuation denominator modulus encountered.
    pub nearest_denominator: Option<f64>,
}

impl EvalResult {
    pub(crate) fn zero(prec: u32, method: Method) -> Self {
        EvalResult {
            value: Cplx::zero(prec),
            error_bound: 0.0,
            method,
            terms_used: 0,
            depth: 0,
            inner_depth: 0,
            nearest_denominator: None,
        }
    }
}

/// `log|z| / log alpha_1`; `-inf` for `z = 0`.
pub fn abscissa(binet: &BinetData, z: &Cplx) -> f64 {
    if z.is_zero() {
        return f64::NEG_INFINITY;
    }
    let prec = binet.precision_bits;
    let lz = mp::ln(&z.with_prec(prec).abs());
    Float::with_val(prec, &lz / &binet.ln_alpha1()).to_f64()
}

pub fn abscissa_c64(binet: &BinetData, z: Complex64) -> f64 {
    abscissa(binet, &Cplx::from_c64(binet.precision_bits, z))
}

/// `(a + x)^{-s}`, principal branch when `a + x < 0`.
pub(crate) fn neg_power(a: &Integer, x: &Float, s: &Cplx, n: usize) -> Result<Cplx> {
    let p = s.prec();
    let b = Float::with_val(p, a) + x;
    if b.is_zero() {
        return Err(Error::SingularTerm { n });
    }
    let lg = if b.is_sign_positive() {
        Cplx::from_real(mp::ln(&b))
    } else {
        Cplx::from_parts(mp::ln(&Float::with_val(p, b.abs_ref())), mp::pi(p))
    };
    Ok((-&(s * &lg)).exp())
}

/// Natural log of a bound on `sum_{n > big_n} |z|^{n - shift} |a_n + x|^{-sigma}`.
///
/// Needs `big_n >= n0`; then `a_n` is within a factor `1 +- delta` of
/// `lambda_1 alpha_1^n` with `delta = rho_{N+1} < 1`.
pub(crate) fn ln_tail_bound(binet: &BinetData, ln_abs_z: f64, sigma: f64, big_n: usize, shift: usize) -> f64 {
    let delta = binet.dominance_ratio(big_n + 1);
    let la1 = binet.alpha1().to_f64().ln();
    let l1 = binet.lambda1().to_f64();
    let ln_q = ln_abs_z - sigma * la1;
    if delta >= 1.0 || ln_q >= 0.0 {
        return f64::INFINITY;
    }
    let ln_c = if sigma >= 0.0 {
        -sigma * (l1 * (1.0 - delta)).ln()
    } else {
        let top = l1 * (1.0 + delta) + (-(big_n as f64 + 1.0) * la1).exp();
        -sigma * top.ln()
    };
    let q = ln_q.exp();
    ln_c + (big_n as f64 + 1.0) * ln_q - shift as f64 * ln_abs_z - (-q).ln_1p() + 1e-9
}

/// Rounding slack for a sum of `count` terms of total modulus `abs_total`
/// each carrying an `exp(-s log b)` with `|log b| <= ln_base`.
pub(crate) fn rounding_slack(prec: u32, abs_total: f64, count: usize, s_abs: f64, ln_base: f64) -> f64 {
    abs_total * mp::ulp(prec) * (count as f64 + 16.0 + 2.0 * s_abs * (ln_base + 1.0))
}

pub(crate) struct SeriesSum {
    pub value: Cplx,
    pub error_bound: f64,
    pub last_n: usize,
    pub terms: usize,
}

/// `sum_{n >= start} z^{n - start + 1} (a_n + x)^{-s}` summed until the tail
/// bound drops below `tol / 2`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn direct_series(
    norm: &NormalizedRecurrence,
    binet: &BinetData,
    z: &Cplx,
    s: &Cplx,
    x: &Float,
    start: usize,
    tol: f64,
    max_terms: usize,
) -> Result<SeriesSum> {
    let prec = s.prec();
    let shift = start - 1;
    let ln_abs_z = z.abs_f64().ln();
    let sigma = s.re.to_f64();
    let ln_tol = (tol / 2.0).ln();
    let mut acc = CompensatedSum::new(prec);
    let mut zp = z.clone();
    let mut n = start;
    let mut last_ln_base = 0.0f64;
    for a in norm.spec.terms().skip(shift) {
        let t = &zp * &neg_power(&a, x, s, n)?;
        acc.add(&t);
        last_ln_base = (a.to_f64().abs() + 1.0).ln();
        if n >= norm.n0.max(1) && ln_tail_bound(binet, ln_abs_z, sigma, n, shift) <= ln_tol {
            break;
        }
        if acc.count() >= max_terms {
            return Err(Error::BudgetExceeded { what: "direct series terms", limit: max_terms });
        }
        zp.mul_assign_ref(z);
        n += 1;
    }
    let tail = ln_tail_bound(binet, ln_abs_z, sigma, n, shift).exp();
    let s_abs = s.abs_f64();
    Ok(SeriesSum {
        value: acc.value(),
        error_bound: tail + rounding_slack(prec, acc.abs_total(), acc.count(), s_abs, last_ln_base),
        last_n: n,
        terms: acc.count(),
    })
}

fn check_region(binet: &BinetData, p: &EvalParams) -> Result<()> {
    let sigma = p.sigma();
    let ab = abscissa(binet, &p.z);
    if sigma > ab + p.margin {
        Ok(())
    } else {
        Err(Error::OutsideConvergenceRegion { sigma, abscissa: ab, margin: p.margin })
    }
}

/// Direct summation of `sum_{n >= 1} z^n (a_n + x)^{-s}`.
pub fn eval_direct(norm: &NormalizedRecurrence, binet: &BinetData, p: &EvalParams) -> Result<EvalResult> {
    p.check()?;
    let prec = binet.precision_bits;
    if p.z.is_zero() {
        return Ok(EvalResult::zero(prec, Method::Direct));
    }
    check_region(binet, p)?;
    let (z, s, x) = p.at_prec(prec);
    let sum = direct_series(norm, binet, &z, &s, &x, 1, p.tol, p.max_terms)?;
    Ok(EvalResult {
        value: sum.value,
        error_bound: sum.error_bound,
        method: Method::Direct,
        terms_used: sum.terms,
        depth: sum.last_n,
        inner_depth: 0,
        nearest_denominator: None,
    })
}

/// The same series read as a power series in `z`: all coefficients
/// `(a_n + x)^{-s}` first, then a Horner pass.
pub fn eval_power_series_z(norm: &NormalizedRecurrence, binet: &BinetData, p: &EvalParams) -> Result<EvalResult> {
    p.check()?;
    let prec = binet.precision_bits;
    if p.z.is_zero() {
        return Ok(EvalResult::zero(prec, Method::PowerSeriesZ));
    }
    let sigma = p.sigma();
    let la1 = binet.alpha1().to_f64().ln();
    let ln_abs_z = p.z.abs_f64().ln();
    // radius of convergence alpha_1^sigma
    // written so that a NaN lands outside
    let inside = ln_abs_z < sigma * la1 + (-p.margin).ln_1p();
    if !inside {
        return Err(Error::OutsideConvergenceRegion { sigma, abscissa: abscissa(binet, &p.z), margin: p.margin });
    }
    let ln_tol = (p.tol / 2.0).ln();
    let mut big_n = norm.n0.max(1);
    while ln_tail_bound(binet, ln_abs_z, sigma, big_n, 0) > ln_tol {
        big_n += 1;
        if big_n > p.max_terms {
            return Err(Error::BudgetExceeded { what: "power series coefficients", limit: p.max_terms });
        }
    }
    let (z, s, x) = p.at_prec(prec);
    let terms: Vec<(usize, Integer)> = norm.spec.terms().take(big_n).enumerate().collect();
    let coeffs: Vec<Result<Cplx>> = p.exec.map_collect_min(&terms, 256, |(i, a)| neg_power(a, &x, &s, i + 1));
    let coeffs: Vec<Cplx> = coeffs.into_iter().collect::<Result<_>>()?;

    let mut acc = coeffs[big_n - 1].clone();
    for c in coeffs[..big_n - 1].iter().rev() {
        acc = &(&acc * &z) + c;
    }
    let value = &acc * &z;

    let mut abs_total = 0.0f64;
    for (i, c) in coeffs.iter().enumerate() {
        abs_total += (c.abs_f64().ln() + (i + 1) as f64 * ln_abs_z).exp();
    }
    let last = terms.last().map(|(_, a)| (a.to_f64().abs() + 1.0).ln()).unwrap_or(0.0);
    let tail = ln_tail_bound(binet, ln_abs_z, sigma, big_n, 0).exp();
    Ok(EvalResult {
        value,
        error_bound: tail + rounding_slack(prec, abs_total, 2 * big_n, s.abs_f64(), last),
        method: Method::PowerSeriesZ,
        terms_used: big_n,
        depth: big_n,
        inner_depth: 0,
        nearest_denominator: None,
    })
}
