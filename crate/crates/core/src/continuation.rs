//! Meromorphic continuation of `phi(z, s, 0)` through the multi-index series
//!
//! ```text
//! phi(z, s, 0) = sum_{n <= n0} z^n a_n^{-s}
//!              + z^{n0} sum_k  L_k(s) / (z^{-1} alpha_1^{s+k_1} alpha_2^{-k_1+k_2} ... alpha_d^{-k_{d-1}} - 1)
//! L_k(s) = binom(-s, k_1) binom(k_1, k_2) ... binom(k_{d-2}, k_{d-1})
//!          lambda_1^{-s-k_1} lambda_2^{k_1-k_2} ... lambda_d^{k_{d-1}}
//! ```
//!
//! with the shifted coefficients `lambda_i alpha_i^{n0}`, and of `phi(z, s, x)`
//! through the binomial expansion in `x`.

use std::fmt;

use rug::{Float, Integer};

use crate::algebraic::BinetData;
use crate::direct_eval::{self, abscissa, EvalParams, EvalResult, Method};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::mp::{self, CompensatedSum, Cplx};
use crate::poles_residues::{Plane, PoleId};
use crate::recurrence::NormalizedRecurrence;

/// Non-increasing tuple `(k_1, ..., k_{d-1})`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex {
    k: Vec<u32>,
}

impl MultiIndex {
    pub fn new(k: Vec<u32>) -> Result<Self> {
        if k.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidSpec(format!("multi-index {k:?} is not non-increasing")));
        }
        Ok(MultiIndex { k })
    }

    pub fn zero(d: usize) -> Self {
        MultiIndex { k: vec![0; d.saturating_sub(1)] }
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.k
    }

    pub fn len(&self) -> usize {
        self.k.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k.is_empty()
    }

    pub fn k1(&self) -> u32 {
        self.k.first().copied().unwrap_or(0)
    }

    /// Exponents `e_i = k_{i-1} - k_i` carried by `alpha_i`, `lambda_i` for
    /// `i = 2..d` (with `k_d = 0`). They sum to `k_1`.
    pub fn exponents(&self) -> Vec<u32> {
        (0..self.k.len()).map(|m| self.k[m] - self.k.get(m + 1).copied().unwrap_or(0)).collect()
    }

    /// Multinomial `k_1! / prod e_i!` as the telescoped binomial product.
    pub fn multinomial(&self) -> Integer {
        let mut acc = Integer::from(1);
        for w in self.k.windows(2) {
            acc *= Integer::from(Integer::binomial_u(w[0], w[1]));
        }
        acc
    }

    /// All tuples with first entry `k1` for degree `d`, in descending
    /// lexicographic order.
    pub fn shell(d: usize, k1: u32) -> Vec<MultiIndex> {
        if d <= 1 {
            return if k1 == 0 { vec![MultiIndex { k: vec![] }] } else { vec![] };
        }
        let mut out = Vec::new();
        let mut cur = vec![k1];
        fn rec(cur: &mut Vec<u32>, len: usize, out: &mut Vec<MultiIndex>) {
            if cur.len() == len {
                out.push(MultiIndex { k: cur.clone() });
                return;
            }
            let top = *cur.last().unwrap();
            for v in (0..=top).rev() {
                cur.push(v);
                rec(cur, len, out);
                cur.pop();
            }
        }
        rec(&mut cur, d - 1, &mut out);
        out
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.k.iter().map(u32::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// `binom(-s, j) = (-s)(-s-1)...(-s-j+1) / j!`.
pub fn binom_complex(s: &Cplx, j: u32) -> Cplx {
    let p = s.prec();
    let mut acc = Cplx::one(p);
    let neg_s = -s;
    for i in 0..j {
        let f = neg_s.add_real(&Float::with_val(p, -(i as i64)));
        acc = (&acc * &f).scale(&Float::with_val(p, Float::with_val(p, 1) / (i + 1)));
    }
    acc
}

/// `M (M+1) ... (M+j-1) / j!`, the bound `|binom(-s, j)| <= binom_bound(|s|, j)`.
pub fn binom_bound(m: f64, j: u32) -> f64 {
    ln_binom_bound(m, j).exp()
}

pub fn ln_binom_bound(m: f64, j: u32) -> f64 {
    (0..j).map(|i| ((m + i as f64) / (i as f64 + 1.0)).ln()).sum()
}

/// `L_k(s)` together with the index and argument it was evaluated at.
#[derive(Clone, Debug)]
pub struct LambdaCoefficient {
    pub value: Cplx,
    pub index: MultiIndex,
    pub at: Cplx,
}

/// `L_k(s)` for Binet coefficients `lambdas` (`lambdas[0]` real positive).
pub fn lambda_coeff(lambdas: &[Cplx], s: &Cplx, k: &MultiIndex) -> LambdaCoefficient {
    let p = s.prec();
    let k1 = k.k1();
    let mut v = binom_complex(s, k1);
    if !v.is_zero() {
        let ln_l1 = mp::ln(&lambdas[0].re.clone());
        let mut e = -s;
        e = e.add_real(&Float::with_val(p, -(k1 as i64)));
        v = &v * &e.exp_times(&ln_l1);
        v = v.scale(&Float::with_val(p, k.multinomial()));
        for (i, ei) in k.exponents().into_iter().enumerate() {
            v = &v * &lambdas[i + 1].with_prec(p).powi(ei as i64);
        }
    }
    LambdaCoefficient { value: v, index: k.clone(), at: s.clone() }
}

/// `L_k(s)` with the original (unshifted) Binet coefficients.
pub fn lambda_coeff_unshifted(binet: &BinetData, s: &Cplx, k: &MultiIndex) -> LambdaCoefficient {
    let l: Vec<Cplx> = binet.coeffs.iter().map(|c| c.value.clone()).collect();
    lambda_coeff(&l, s, k)
}

/// `L_k(s)` with the coefficients of the shifted tail `a_{n0+n}`.
pub fn lambda_coeff_shifted(norm: &NormalizedRecurrence, s: &Cplx, k: &MultiIndex) -> LambdaCoefficient {
    lambda_coeff(&norm.shifted_coeffs, s, k)
}

/// `arg z + sum_i e_i arg alpha_i`: the s-plane lattice phase of `k`.
pub(crate) fn lattice_phase(binet: &BinetData, z: &Cplx, k: &MultiIndex) -> Float {
    let mut theta = z.arg();
    for (i, e) in k.exponents().into_iter().enumerate() {
        theta += Float::with_val(theta.prec(), binet.alpha(i + 1).arg() * e);
    }
    theta
}

/// Lattice index `n` of the nearest pole of tuple `k` to `s`.
pub(crate) fn nearest_n(binet: &BinetData, z: &Cplx, s: &Cplx, k: &MultiIndex) -> i64 {
    let p = s.prec();
    let im_l = Float::with_val(p, &s.im * &binet.ln_alpha1());
    let t = Float::with_val(p, im_l - lattice_phase(binet, z, k)) / mp::two_pi(p);
    t.to_f64().round() as i64
}

fn s_is_nonpositive_integer(s: &Cplx) -> Option<u32> {
    if !s.im.is_zero() || s.re.is_sign_positive() && !s.re.is_zero() || !s.re.is_integer() {
        return None;
    }
    Some(Float::with_val(s.prec(), -&s.re).to_f64() as u32)
}

pub(crate) struct TailSum {
    pub value: Cplx,
    pub error_bound: f64,
    pub k_max: u32,
    pub terms: usize,
    pub nearest: Option<f64>,
}

/// Constants of the shell bound, all in f64.
struct ShellBound {
    ln_const: f64,
    ln_rho: f64,
    m: f64,
    k0: u32,
}

impl ShellBound {
    fn new(norm: &NormalizedRecurrence, binet: &BinetData, z: &Cplx, s: &Cplx) -> Self {
        let la1 = binet.alpha1().to_f64().ln();
        let l1 = norm.shifted_coeffs[0].re.to_f64();
        let a1 = binet.alpha1().to_f64();
        let sigma = s.re.to_f64();
        let ln_z = z.abs_f64().ln();
        let rho: f64 =
            (1..binet.degree()).map(|i| norm.shifted_coeffs[i].abs_f64() * binet.alpha(i).abs_f64() / (l1 * a1)).sum();
        let k0 = if binet.degree() == 1 {
            0
        } else {
            let la = (binet.subdominant_modulus()).ln();
            let need = 2f64.ln() + ln_z - sigma * la1;
            if need <= 0.0 {
                0
            } else {
                (need / (la1 - la)).ceil() as u32
            }
        };
        ShellBound {
            ln_const: (2.0 * z.abs_f64()).ln() - sigma * (l1 * a1).ln(),
            ln_rho: rho.ln(),
            m: s.abs_f64() * (1.0 + 1e-12),
            k0,
        }
    }

    /// Bound on the sum of all shells `k_1 > big_k`, given `ln B(M, K+1)`.
    fn tail_after(&self, big_k: u32, ln_b_next: f64) -> f64 {
        if big_k + 1 < self.k0 {
            return f64::INFINITY;
        }
        let kk = big_k as f64;
        let q = self.ln_rho.exp() * ((self.m + kk + 1.0) / (kk + 2.0)).max(1.0);
        if q >= 1.0 {
            return f64::INFINITY;
        }
        (self.ln_const + ln_b_next + (kk + 1.0) * self.ln_rho).exp() / (1.0 - q)
    }
}

/// Lazily extended powers `lambda_i^e` and `alpha_i^{-e}` for `i >= 2`.
struct PowerTables {
    lam: Vec<Vec<Cplx>>,
    ainv: Vec<Vec<Cplx>>,
    lam_base: Vec<Cplx>,
    ainv_base: Vec<Cplx>,
}

impl PowerTables {
    fn new(norm: &NormalizedRecurrence, binet: &BinetData, prec: u32) -> Self {
        let d = binet.degree();
        let lam_base: Vec<Cplx> = (1..d).map(|i| norm.shifted_coeffs[i].with_prec(prec)).collect();
        let ainv_base: Vec<Cplx> = (1..d).map(|i| binet.alpha(i).with_prec(prec).recip()).collect();
        PowerTables {
            lam: vec![vec![Cplx::one(prec)]; d - 1],
            ainv: vec![vec![Cplx::one(prec)]; d - 1],
            lam_base,
            ainv_base,
        }
    }

    fn extend_to(&mut self, e: usize) {
        for i in 0..self.lam.len() {
            while self.lam[i].len() <= e {
                let next = self.lam[i].last().unwrap() * &self.lam_base[i];
                self.lam[i].push(next);
                let next = self.ainv[i].last().unwrap() * &self.ainv_base[i];
                self.ainv[i].push(next);
            }
        }
    }
}

struct ShellTerm {
    value: Cplx,
    abs: f64,
    den_abs: f64,
    /// First-order relative error of `value`.
    rel_err: f64,
    zero: bool,
}

/// `T(z, s) = sum_{n >= 1} z^n a_{n0+n}^{-s}` through the multi-index series.
#[allow(clippy::too_many_arguments)]
pub(crate) fn continued_tail(
    norm: &NormalizedRecurrence,
    binet: &BinetData,
    z: &Cplx,
    s: &Cplx,
    tol: f64,
    pole_guard: f64,
    max_terms: usize,
    exec: Execution,
) -> Result<TailSum> {
    let prec = s.prec();
    let d = binet.degree();
    let bound = ShellBound::new(norm, binet, z, s);
    let finite_at = s_is_nonpositive_integer(s);
    let la1 = binet.ln_alpha1();
    let ln_l1 = mp::ln(&norm.shifted_coeffs[0].re);
    let l1_inv = Float::with_val(prec, Float::with_val(prec, 1) / &norm.shifted_coeffs[0].re);
    let a1 = binet.alpha1().clone();

    // k_1 = 0 factors: lambda_1^{-s} and z^{-1} alpha_1^{s}
    let neg_s = -s;
    let mut lam1_pow = neg_s.exp_times(&ln_l1);
    let mut den_base = &s.exp_times(&la1) * &z.recip();
    let mut binom = Cplx::one(prec);
    let mut ln_b = 0.0f64;

    let ulp = mp::ulp(prec);
    let data_rel = binet.relative_data_error();
    let scale = la1.to_f64() + ln_l1.to_f64().abs() + 1.0;
    let s_abs = s.abs_f64();

    let mut tables = PowerTables::new(norm, binet, prec);
    let mut acc = CompensatedSum::new(prec);
    let mut rounding = 0.0f64;
    let mut nearest: Option<f64> = None;
    let mut k1: u32 = 0;
    loop {
        tables.extend_to(k1 as usize);
        let shell = MultiIndex::shell(d, k1);
        let coeff = &binom * &lam1_pow;
        let sens = ulp * (32.0 + 4.0 * (s_abs + k1 as f64 + 1.0) * scale) + data_rel * (s_abs + k1 as f64 + d as f64);
        let compute = |k: &MultiIndex| -> ShellTerm {
            let e = k.exponents();
            let mut num = coeff.scale(&Float::with_val(prec, k.multinomial()));
            let mut den = den_base.clone();
            for (i, &ei) in e.iter().enumerate() {
                num = &num * &tables.lam[i][ei as usize];
                den = &den * &tables.ainv[i][ei as usize];
            }
            let g_abs = den.abs_f64();
            let den = den.add_real(&Float::with_val(prec, -1));
            let den_abs = den.abs_f64();
            if num.is_zero() {
                return ShellTerm { value: Cplx::zero(prec), abs: 0.0, den_abs, rel_err: 0.0, zero: true };
            }
            let value = &num / &den;
            ShellTerm { abs: value.abs_f64(), value, den_abs, rel_err: sens * (1.0 + g_abs / den_abs), zero: false }
        };
        let terms = exec.map_collect_min(&shell, 64, compute);
        for (k, t) in shell.iter().zip(&terms) {
            if t.zero {
                continue;
            }
            if t.den_abs < pole_guard || !t.den_abs.is_normal() {
                return Err(Error::NearPole {
                    pole: PoleId { plane: Plane::S, j: 0, n: nearest_n(binet, z, s, k), k: k.clone() },
                    distance: t.den_abs / la1.to_f64(),
                });
            }
            nearest = Some(nearest.map_or(t.den_abs, |m: f64| m.min(t.den_abs)));
            acc.add(&t.value);
            rounding += t.abs * t.rel_err;
        }
        if acc.count() > max_terms {
            return Err(Error::BudgetExceeded { what: "continuation series terms", limit: max_terms });
        }

        // advance the k_1-dependent factors
        let kf = k1 as f64;
        ln_b += ((bound.m + kf) / (kf + 1.0)).ln();
        let tail = if d == 1 || finite_at.is_some_and(|m| k1 >= m) { 0.0 } else { bound.tail_after(k1, ln_b) };
        if tail <= tol / 2.0 {
            let err = tail + rounding + acc.abs_total() * ulp * 4.0;
            return Ok(TailSum { value: acc.value(), error_bound: err, k_max: k1, terms: acc.count(), nearest });
        }
        let f = neg_s.add_real(&Float::with_val(prec, -(k1 as i64)));
        binom = (&binom * &f).scale(&Float::with_val(prec, Float::with_val(prec, 1) / (k1 + 1)));
        lam1_pow = lam1_pow.scale(&l1_inv);
        den_base = den_base.scale(&a1);
        k1 += 1;
    }
}

/// `sum_{n <= n0} z^n (a_n + x)^{-s}` and its rounding slack.
pub(crate) fn prefix_sum(norm: &NormalizedRecurrence, z: &Cplx, s: &Cplx, x: &Float) -> Result<(Cplx, f64)> {
    let prec = s.prec();
    let mut acc = CompensatedSum::new(prec);
    let mut zp = z.clone();
    let mut ln_base = 0.0f64;
    for (i, a) in norm.prefix_terms.iter().enumerate() {
        acc.add(&(&zp * &direct_eval::neg_power(a, x, s, i + 1)?));
        ln_base = ln_base.max((a.to_f64().abs() + 1.0).ln());
        zp.mul_assign_ref(z);
    }
    let slack = direct_eval::rounding_slack(prec, acc.abs_total(), acc.count(), s.abs_f64(), ln_base);
    Ok((acc.value(), slack))
}

/// `phi(z, s, 0)` for every `s` off the pole lattice.
pub fn eval_continued_x0(norm: &NormalizedRecurrence, binet: &BinetData, p: &EvalParams) -> Result<EvalResult> {
    p.check()?;
    if !p.x.is_zero() {
        return Err(Error::InvalidSpec("eval_continued_x0 evaluates at x = 0; use eval_lerch".into()));
    }
    let prec = binet.precision_bits;
    if p.z.is_zero() {
        return Ok(EvalResult::zero(prec, Method::ContinuedX0));
    }
    let (z, s, x) = p.at_prec(prec);
    let (pre, pre_err) = prefix_sum(norm, &z, &s, &x)?;
    let zn0 = z.powi(norm.n0 as i64);
    let zn0_abs = zn0.abs_f64();
    let tail_tol = p.tol / zn0_abs.max(1e-300);
    let t = continued_tail(norm, binet, &z, &s, tail_tol, p.pole_guard, p.max_terms, p.exec)?;
    Ok(EvalResult {
        value: &pre + &(&zn0 * &t.value),
        error_bound: pre_err + zn0_abs * t.error_bound * (1.0 + 4.0 * mp::ulp(prec)),
        method: Method::ContinuedX0,
        terms_used: t.terms + norm.n0,
        depth: t.k_max as usize,
        inner_depth: 0,
        nearest_denominator: t.nearest,
    })
}

/// Exact leading terms used by the lift's tail majorant.
const LIFT_HEAD: usize = 16;

fn ln_integer(b: &rug::Integer) -> f64 {
    let (m, e) = b.to_f64_exp();
    m.ln() + e as f64 * std::f64::consts::LN_2
}

/// `ln sum_{n >= 1} |z|^n b_n^{-sigma}` bounded with the exact head
/// `b_1..b_H` and the Binet tail bound after it. Valid for every real part
/// `>= sigma`, since all `b_n >= 1`.
fn ln_tail_majorant(
    binet: &BinetData,
    norm: &NormalizedRecurrence,
    ln_b_head: &[f64],
    ln_abs_z: f64,
    sigma: f64,
) -> f64 {
    let head = ln_b_head.len();
    let tail = direct_eval::ln_tail_bound(binet, ln_abs_z, sigma, norm.n0 + head, norm.n0);
    let mut terms: Vec<f64> =
        ln_b_head.iter().enumerate().map(|(i, lb)| (i + 1) as f64 * ln_abs_z - sigma * lb).collect();
    terms.push(tail);
    let top = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !top.is_finite() {
        return top;
    }
    top + terms.iter().map(|t| (t - top).exp()).sum::<f64>().ln()
}

/// `phi(z, s, x) = prefix + z^{n0} sum_j binom(-s, j) x^j T(z, s + j)` for `0 <= x < 1`.
///
/// Inner values with `Re(s) + j` at least two units past the abscissa are
/// summed directly; the rest go through the continuation series.
pub fn eval_lerch(norm: &NormalizedRecurrence, binet: &BinetData, p: &EvalParams) -> Result<EvalResult> {
    p.check()?;
    let prec = binet.precision_bits;
    if p.z.is_zero() {
        return Ok(EvalResult::zero(prec, Method::RamanujanLift));
    }
    if p.x.is_zero() {
        let r = eval_continued_x0(norm, binet, p)?;
        return Ok(EvalResult { method: Method::RamanujanLift, inner_depth: r.depth, depth: 0, ..r });
    }
    let (z, s, x) = p.at_prec(prec);
    let (pre, pre_err) = prefix_sum(norm, &z, &s, &x)?;
    let zn0 = z.powi(norm.n0 as i64);
    let zn0_abs = zn0.abs_f64().max(1e-300);

    let xf = x.to_f64();
    let sigma = s.re.to_f64();
    let m = s.abs_f64() * (1.0 + 1e-12);
    let ab = abscissa(binet, &z);
    let ln_abs_z = z.abs_f64().ln();
    let budget = p.tol / zn0_abs;
    let inner_tol = budget / (4.0 * (-m * (-xf).ln_1p()).exp());

    let ln_b_head: Vec<f64> = norm.spec.terms().skip(norm.n0).take(LIFT_HEAD).map(|b| ln_integer(&b)).collect();
    let mut acc = CompensatedSum::new(prec);
    let mut err = 0.0f64;
    let mut coeff = Cplx::one(prec); // binom(-s, j) x^j
    let mut ln_b = 0.0f64;
    let mut inner_depth = 0usize;
    let mut terms = 0usize;
    let mut nearest: Option<f64> = None;
    let mut j: u32 = 0;
    loop {
        let sj = s.add_real(&Float::with_val(prec, j));
        let (val, e) = if sigma + j as f64 >= ab + 2.0 {
            let r = direct_eval::direct_series(
                norm,
                binet,
                &z,
                &sj,
                &Float::new(prec),
                norm.n0 + 1,
                inner_tol,
                p.max_terms,
            )?;
            inner_depth = inner_depth.max(r.last_n);
            terms += r.terms;
            (r.value, r.error_bound)
        } else {
            let r = continued_tail(norm, binet, &z, &sj, inner_tol, p.pole_guard, p.max_terms, p.exec).map_err(
                |e| match e {
                    Error::NearPole { mut pole, distance } => {
                        pole.j = j;
                        Error::NearPole { pole, distance }
                    }
                    other => other,
                },
            )?;
            inner_depth = inner_depth.max(r.k_max as usize);
            terms += r.terms;
            if let Some(n) = r.nearest {
                nearest = Some(nearest.map_or(n, |m: f64| m.min(n)));
            }
            (r.value, r.error_bound)
        };
        if !coeff.is_zero() {
            acc.add(&(&coeff * &val));
            err += coeff.abs_f64() * e;
        }

        let jf = j as f64;
        ln_b += ((m + jf) / (jf + 1.0)).ln();
        // every later T(z, s + j') is bounded by the positive series at sigma + j + 1
        let sigma_next = sigma + jf + 1.0;
        let ln_m_prime = ln_tail_majorant(binet, norm, &ln_b_head, ln_abs_z, sigma_next);
        let qx = xf * ((m + jf + 1.0) / (jf + 2.0)).max(1.0);
        let tail = if ln_m_prime.is_finite() && qx < 1.0 {
            (ln_m_prime + ln_b + (jf + 1.0) * xf.ln()).exp() / (1.0 - qx)
        } else {
            f64::INFINITY
        };
        if tail <= budget / 4.0 {
            err += tail;
            break;
        }
        if j as usize >= p.max_terms {
            return Err(Error::BudgetExceeded { what: "lift terms", limit: p.max_terms });
        }
        let f = (-&s).add_real(&Float::with_val(prec, -(j as i64)));
        coeff = (&coeff * &f).scale(&Float::with_val(prec, Float::with_val(prec, &x) / (j + 1)));
        j += 1;
    }
    let rounding = acc.abs_total() * mp::ulp(prec) * (j as f64 + 16.0);
    Ok(EvalResult {
        value: &pre + &(&zn0 * &acc.value()),
        error_bound: pre_err + zn0_abs * (err + rounding),
        method: Method::RamanujanLift,
        terms_used: terms + norm.n0,
        depth: j as usize,
        inner_depth,
        nearest_denominator: nearest,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::direct_eval::eval_direct;
    use crate::LerchZeta;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn binom_examples() {
        let s = Cplx::from_f64(128, 0.3, 1.7);
        assert_eq!(binom_complex(&s, 0).to_c64(), c(1.0, 0.0));
        assert!(binom_complex(&Cplx::from_f64(128, -1.0, 0.0), 2).is_zero());
        assert!((binom_complex(&Cplx::from_f64(128, 2.0, 0.0), 3).to_c64() - c(-4.0, 0.0)).norm() < 1e-30);
    }

    #[test]
    fn binom_bound_examples() {
        assert_eq!(binom_bound(0.0, 0), 1.0);
        assert_eq!(binom_bound(0.0, 3), 0.0);
        for j in 0..20 {
            assert!((binom_bound(1.0, j) - 1.0).abs() < 1e-12);
        }
        assert!((binom_bound(2.0, 3) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn shells_are_simplex_ordered() {
        let sh = MultiIndex::shell(3, 2);
        let got: Vec<Vec<u32>> = sh.iter().map(|m| m.as_slice().to_vec()).collect();
        assert_eq!(got, vec![vec![2, 2], vec![2, 1], vec![2, 0]]);
        assert_eq!(MultiIndex::shell(1, 0).len(), 1);
        assert!(MultiIndex::shell(1, 1).is_empty());
        // number of non-increasing (d-1)-tuples with first entry k1: C(k1 + d - 2, d - 2)
        assert_eq!(MultiIndex::shell(4, 5).len(), 21);
        assert_eq!(MultiIndex::new(vec![3, 1, 1]).unwrap().multinomial(), 3);
        assert_eq!(MultiIndex::new(vec![3, 2]).unwrap().multinomial(), 3);
        assert!(MultiIndex::new(vec![1, 2]).is_err());
    }

    #[test]
    fn lambda_instances() {
        let f = LerchZeta::builtin("fibonacci", 128).unwrap();
        let s = Cplx::from_f64(128, 2.0, 0.5);
        let l: Vec<Cplx> = f.binet.coeffs.iter().map(|c| c.value.clone()).collect();
        let l1 = l[0].to_c64();
        let l2 = l[1].to_c64();
        let sc = s.to_c64();
        let k0 = lambda_coeff(&l, &s, &MultiIndex::new(vec![0]).unwrap()).value.to_c64();
        assert!((k0 - l1.powc(-sc)).norm() < 1e-14);
        let k1 = lambda_coeff(&l, &s, &MultiIndex::new(vec![1]).unwrap()).value.to_c64();
        assert!((k1 - (-sc) * l1.powc(-sc - 1.0) * l2).norm() < 1e-14);
        // shifted coefficients of the tail 1, 2, 3, 5, ...
        let ls = lambda_coeff_shifted(&f.norm, &Cplx::from_f64(128, 2.0, 0.0), &MultiIndex::new(vec![1]).unwrap());
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let (a, b) = (phi / 5f64.sqrt(), -(1.0 - phi) / 5f64.sqrt());
        let want = -2.0 * a.powf(-3.0) * b;
        assert!((ls.value.to_c64() - want).norm() < 1e-14);
        let one = LerchZeta::builtin("doubling", 128).unwrap();
        let v = lambda_coeff_unshifted(&one.binet, &s, &MultiIndex::zero(1)).value.to_c64();
        assert!((v - c(0.5, 0.0).powc(-sc)).norm() < 1e-14);
    }

    #[test]
    fn reciprocal_squares_via_continuation() {
        let f = LerchZeta::builtin("fibonacci", 128).unwrap();
        let p = EvalParams::new(128, c(1.0, 0.0), c(2.0, 0.0), 0.0);
        let a = eval_continued_x0(&f.norm, &f.binet, &p).unwrap();
        let b = eval_direct(&f.norm, &f.binet, &p).unwrap();
        assert!((&a.value - &b.value).abs_f64() <= a.error_bound + b.error_bound);
        assert!((a.value.re.to_f64() - 2.426_320_751_167_241).abs() < 1e-10);
    }

    #[test]
    fn geometric_identity() {
        let f = LerchZeta::builtin("fibonacci", 128).unwrap();
        let p = EvalParams::new(128, c(0.5, 0.0), c(0.0, 0.0), 0.0);
        let r = eval_continued_x0(&f.norm, &f.binet, &p).unwrap();
        assert!((r.value.to_c64() - 1.0).norm() < 1e-10);
    }

    #[test]
    fn pole_at_origin() {
        let f = LerchZeta::builtin("fibonacci", 128).unwrap();
        let p = EvalParams::new(128, c(1.0, 0.0), c(0.0, 0.0), 0.0);
        match eval_continued_x0(&f.norm, &f.binet, &p) {
            Err(Error::NearPole { pole, .. }) => {
                assert_eq!(pole.n, 0);
                assert_eq!(pole.k.as_slice(), &[0]);
            }
            other => panic!("expected NearPole, got {other:?}"),
        }
    }

    #[test]
    fn doubling_closed_form() {
        let one = LerchZeta::builtin("doubling", 128).unwrap();
        for &(z, s) in &[(c(1.0, 0.0), c(-1.0, 0.0)), (c(0.3, 0.4), c(-2.5, 1.0)), (c(1.7, 0.0), c(0.2, 3.0))] {
            let p = EvalParams::new(128, z, s, 0.0);
            let r = eval_continued_x0(&one.norm, &one.binet, &p).unwrap();
            let want = c(0.5, 0.0).powc(-s) / (z.inv() * c(2.0, 0.0).powc(s) - 1.0);
            assert!((r.value.to_c64() - want).norm() < 1e-12 * want.norm().max(1.0));
        }
    }

    #[test]
    fn lift_at_zero_is_continuation() {
        let f = LerchZeta::builtin("tribonacci", 128).unwrap();
        let p = EvalParams::new(128, c(0.9, 0.2), c(-1.5, 2.0), 0.0);
        let a = eval_continued_x0(&f.norm, &f.binet, &p).unwrap();
        let b = eval_lerch(&f.norm, &f.binet, &p).unwrap();
        assert_eq!(a.value, b.value);
    }

    #[test]
    fn lift_matches_direct() {
        let f = LerchZeta::builtin("fibonacci", 128).unwrap();
        let p = EvalParams::new(128, c(1.0, 0.0), c(3.0, 0.0), 0.5);
        let a = eval_lerch(&f.norm, &f.binet, &p).unwrap();
        let b = eval_direct(&f.norm, &f.binet, &p).unwrap();
        assert!((&a.value - &b.value).abs_f64() <= a.error_bound + b.error_bound);
    }

    #[test]
    fn lift_two_precisions() {
        let v: Vec<Complex64> = [128u32, 256]
            .iter()
            .map(|&prec| {
                let f = LerchZeta::builtin("fibonacci", prec).unwrap();
                let p = EvalParams::new(prec, c(1.0, 0.0), c(-1.5, 0.5), 0.25);
                eval_lerch(&f.norm, &f.binet, &p).unwrap().value.to_c64()
            })
            .collect();
        assert!((v[0] - v[1]).norm() < 1e-10 * v[0].norm().max(1.0));
    }

    #[test]
    fn minus_one_is_a_pole_once_x_is_positive() {
        // phi(1, s, x) = phi(1, s, 0) + s-shifted terms; j = 1 hits the pole at 0.
        let f = LerchZeta::builtin("fibonacci", 128).unwrap();
        let p = EvalParams::new(128, c(1.0, 0.0), c(-1.0, 0.0), 0.25);
        match eval_lerch(&f.norm, &f.binet, &p) {
            Err(Error::NearPole { pole, .. }) => assert_eq!((pole.j, pole.n), (1, 0)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn parallel_shells_match_sequential() {
        let f = LerchZeta::builtin("tetranacci", 128).unwrap();
        let base = EvalParams::new(128, c(1.2, -0.3), c(-3.0, 4.0), 0.0).with_tol(1e-20);
        let a = eval_continued_x0(&f.norm, &f.binet, &base.clone().with_exec(Execution::Sequential)).unwrap();
        let b = eval_continued_x0(&f.norm, &f.binet, &base.with_exec(Execution::Parallel)).unwrap();
        assert_eq!(a.value, b.value);
        assert_eq!(a.error_bound, b.error_bound);
    }
}
