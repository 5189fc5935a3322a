//! Characteristic roots and Binet coefficients at configurable precision.
//!
//! Roots are seeded by an f64 Aberth–Ehrlich iteration and then polished by
//! the same simultaneous iteration in MPFR arithmetic. Error radii come from
//! Weierstrass corrections: for a monic polynomial every root lies in the
//! union of the disks `D(r_i, d * |P(r_i)| / prod_{j != i} |r_i - r_j|)`, and a
//! disk disjoint from the others holds exactly one root. Rounding in the
//! evaluation of `P` is folded into the radius. This is first-order error
//! tracking, not interval arithmetic.

use std::cmp::Ordering;

use num_complex::Complex64;
use rug::{Float, Integer};

use crate::error::{Error, Hypothesis, Result};
use crate::mp::{self, Cplx};
use crate::recurrence::RecurrenceSpec;

/// A root estimate together with a radius that contains the true root.
#[derive(Clone, Debug)]
pub struct RootEstimate {
    pub value: Cplx,
    pub radius: f64,
}

/// A Binet coefficient estimate with its propagated error radius.
#[derive(Clone, Debug)]
pub struct CoeffEstimate {
    pub value: Cplx,
    pub radius: f64,
}

/// Numerically certified Binet data `a_n = sum_i lambda_i alpha_i^n`.
#[derive(Clone, Debug)]
pub struct BinetData {
    pub roots: Vec<RootEstimate>,
    pub coeffs: Vec<CoeffEstimate>,
    /// Index of the dominant root; always 0 after ordering.
    pub dominant_index: usize,
    pub precision_bits: u32,
    /// Max relative residual of the Binet solve on a_1..a_d.
    pub solve_residual: f64,
}

impl BinetData {
    /// Roots, coefficients and clamping in one go.
    pub fn compute(spec: &RecurrenceSpec, precision_bits: u32) -> Result<Self> {
        // a zero root makes the Vandermonde system singular
        if spec.char_coeffs[0] == 0 {
            return Err(Error::UnsupportedRecurrence {
                hypothesis: Hypothesis::NonzeroRoots,
                detail: "c_0 = 0, so 0 is a characteristic root".into(),
            });
        }
        let roots = char_roots(spec, precision_bits)?;
        let (coeffs, solve_residual) = binet_coefficients(spec, &roots)?;
        let mut data = BinetData { roots, coeffs, dominant_index: 0, precision_bits, solve_residual };
        data.clamp_dominant();
        Ok(data)
    }

    pub fn degree(&self) -> usize {
        self.roots.len()
    }

    pub fn alpha(&self, i: usize) -> &Cplx {
        &self.roots[i].value
    }

    pub fn lambda(&self, i: usize) -> &Cplx {
        &self.coeffs[i].value
    }

    /// `alpha_1` as a real float. Only meaningful after validation.
    pub fn alpha1(&self) -> &Float {
        &self.roots[0].value.re
    }

    pub fn lambda1(&self) -> &Float {
        &self.coeffs[0].value.re
    }

    pub fn ln_alpha1(&self) -> Float {
        mp::ln(self.alpha1())
    }

    /// Largest modulus among the non-dominant roots, inflated by its radius.
    pub fn subdominant_modulus(&self) -> f64 {
        self.roots[1..].iter().map(|r| r.value.abs_f64() + r.radius).fold(0.0, f64::max)
    }

    /// `rho_n = (|lambda_2 alpha_2^n| + ...) / (lambda_1 alpha_1^n)` in f64.
    pub fn dominance_ratio(&self, n: usize) -> f64 {
        let la1 = self.alpha1().to_f64().ln();
        let ll1 = self.lambda1().to_f64().ln();
        self.roots[1..]
            .iter()
            .zip(&self.coeffs[1..])
            .map(|(r, c)| {
                let lc = c.value.abs_f64();
                if lc == 0.0 {
                    return 0.0;
                }
                (lc.ln() - ll1 + n as f64 * (r.value.abs_f64().ln() - la1)).exp()
            })
            .sum()
    }

    /// Ratio certifying `a_{n+1} > a_n` once it drops below 1.
    pub(crate) fn increase_ratio(&self, n: usize) -> f64 {
        let a1 = self.alpha1().to_f64();
        let la1 = a1.ln();
        let base = (self.lambda1().to_f64() * (a1 - 1.0)).ln();
        self.roots[1..]
            .iter()
            .zip(&self.coeffs[1..])
            .map(|(r, c)| {
                let lc = c.value.abs_f64();
                let am = (r.value.to_c64() - 1.0).norm();
                if lc == 0.0 || am == 0.0 {
                    return 0.0;
                }
                (lc.ln() + am.ln() - base + n as f64 * (r.value.abs_f64().ln() - la1)).exp()
            })
            .sum()
    }

    /// Largest relative error radius over roots and coefficients.
    pub fn relative_data_error(&self) -> f64 {
        let roots = self.roots.iter().map(|r| r.radius / r.value.abs_f64().max(1e-300));
        let coeffs = self.coeffs.iter().map(|c| c.radius / c.value.abs_f64().max(1e-300));
        roots.chain(coeffs).fold(0.0, f64::max)
    }

    /// Sets `Im alpha_1` and `Im lambda_1` to exactly zero when they are
    /// below their error radii.
    fn clamp_dominant(&mut self) {
        let r0 = &mut self.roots[0];
        if r0.value.im.to_f64().abs() <= r0.radius {
            r0.value.im = Float::new(self.precision_bits);
        }
        let c0 = &mut self.coeffs[0];
        if self.roots[0].value.is_real() && c0.value.im.to_f64().abs() <= c0.radius {
            c0.value.im = Float::new(self.precision_bits);
        }
        for i in 1..self.roots.len() {
            if self.roots[i].value.is_real() && self.coeffs[i].value.im.to_f64().abs() <= self.coeffs[i].radius {
                self.coeffs[i].value.im = Float::new(self.precision_bits);
            }
        }
    }
}

/// Monic coefficient list `p[0..=d]` of `y^d - c_{d-1} y^{d-1} - ... - c_0`.
fn monic_coeffs(spec: &RecurrenceSpec) -> Vec<Integer> {
    let mut p: Vec<Integer> = spec.char_coeffs.iter().map(|c| Integer::from(-c)).collect();
    p.push(Integer::from(1));
    p
}

fn aberth_f64(p: &[f64]) -> Vec<Complex64> {
    let d = p.len() - 1;
    // Fujiwara-style bound on root moduli, shrunk to seed the iteration.
    let bound = (0..d).map(|i| p[i].abs().powf(1.0 / (d - i) as f64)).fold(0.0, f64::max).max(1e-3);
    let mut z: Vec<Complex64> = (0..d)
        .map(|k| {
            let t = std::f64::consts::TAU * k as f64 / d as f64 + 0.4;
            Complex64::from_polar(bound, t)
        })
        .collect();
    let eval = |x: Complex64| {
        let mut v = Complex64::new(0.0, 0.0);
        let mut dv = Complex64::new(0.0, 0.0);
        for &c in p.iter().rev() {
            dv = dv * x + v;
            v = v * x + c;
        }
        (v, dv)
    };
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for k in 0..d {
            let (v, dv) = eval(z[k]);
            if v == Complex64::new(0.0, 0.0) {
                continue;
            }
            let w = v / dv;
            let repulse: Complex64 = (0..d).filter(|&j| j != k).map(|j| (z[k] - z[j]).inv()).sum();
            let step = w / (Complex64::new(1.0, 0.0) - w * repulse);
            if step.is_finite() {
                z[k] -= step;
                moved = moved.max(step.norm() / z[k].norm().max(1.0));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

fn horner(p: &[Float], x: &Cplx) -> (Cplx, Cplx) {
    let prec = x.prec();
    let mut v = Cplx::zero(prec);
    let mut dv = Cplx::zero(prec);
    for c in p.iter().rev() {
        dv = &(&dv * x) + &v;
        v = (&v * x).add_real(c);
    }
    (v, dv)
}

/// All `d` roots of the characteristic polynomial with error radii.
///
/// Ordering: descending modulus, ties (within radii) by ascending principal
/// argument.
pub fn char_roots(spec: &RecurrenceSpec, precision_bits: u32) -> Result<Vec<RootEstimate>> {
    if precision_bits < 53 {
        return Err(Error::InvalidSpec(format!("precision {precision_bits} bits is below 53")));
    }
    let pint = monic_coeffs(spec);
    let d = pint.len() - 1;
    let work = precision_bits + 32;
    let pf: Vec<Float> = pint.iter().map(|c| Float::with_val(work, c)).collect();
    let seeds = aberth_f64(&pint.iter().map(|c| c.to_f64()).collect::<Vec<_>>());
    let mut z: Vec<Cplx> = seeds.iter().map(|&s| Cplx::from_c64(work, s)).collect();

    let target = Float::with_val(64, Float::i_exp(1, 3 - precision_bits as i32));
    let mut converged = vec![false; d];
    let max_iter = 60 + 2 * (precision_bits as usize / 32);
    for _ in 0..max_iter {
        let mut all = true;
        for k in 0..d {
            let (v, dv) = horner(&pf, &z[k]);
            if v.is_zero() {
                converged[k] = true;
                continue;
            }
            let w = &v / &dv;
            let mut repulse = Cplx::zero(work);
            for j in 0..d {
                if j != k {
                    repulse = &repulse + &(&z[k] - &z[j]).recip();
                }
            }
            let denom = &Cplx::one(work) - &(&w * &repulse);
            let step = &w / &denom;
            let size = step.abs();
            if !size.is_finite() {
                return Err(Error::RootFindingFailure { precision: precision_bits, index: k });
            }
            // |step| <= 4 ulp * max(1, |z|), compared in software floats
            // since the threshold underflows f64 at high precision
            let reach = Float::with_val(64, z[k].abs()).max(&Float::with_val(64, 1)) * &target;
            z[k] = &z[k] - &step;
            converged[k] = size <= reach;
            all &= converged[k];
        }
        if all {
            break;
        }
    }
    if let Some(k) = converged.iter().position(|c| !c) {
        return Err(Error::RootFindingFailure { precision: precision_bits, index: k });
    }

    let u = mp::ulp(precision_bits);
    let mut roots: Vec<RootEstimate> = (0..d)
        .map(|i| {
            let (v, _) = horner(&pf, &z[i]);
            let m = z[i].abs_f64();
            let mut scale = 0.0;
            let mut pw = 1.0;
            for c in &pint {
                scale += c.to_f64().abs() * pw;
                pw *= m;
            }
            let mut prod = Float::with_val(64, 1);
            for j in 0..d {
                if j != i {
                    prod *= z[i].distance(&z[j]);
                }
            }
            let residual = v.abs_f64() + 4.0 * u * scale;
            let radius = if d == 1 { residual } else { d as f64 * Float::with_val(64, residual / &prod).to_f64() };
            RootEstimate { value: z[i].with_prec(precision_bits), radius: radius.max(u * m) }
        })
        .collect();

    snap_real_roots(&mut roots, precision_bits);
    order_roots(&mut roots);
    Ok(roots)
}

/// A disk meeting the real axis whose mirror image meets no other disk holds
/// a real root; snap its imaginary part to zero.
fn snap_real_roots(roots: &mut [RootEstimate], prec: u32) {
    let n = roots.len();
    for i in 0..n {
        let im = roots[i].value.im.to_f64().abs();
        if im == 0.0 || im > roots[i].radius {
            continue;
        }
        let mirror = roots[i].value.conj().to_c64();
        let isolated = (0..n)
            .filter(|&j| j != i)
            .all(|j| (roots[j].value.to_c64() - mirror).norm() > roots[i].radius + roots[j].radius);
        if isolated {
            roots[i].value.im = Float::new(prec);
        }
    }
}

fn order_roots(roots: &mut [RootEstimate]) {
    roots.sort_by(|a, b| b.value.abs_f64().partial_cmp(&a.value.abs_f64()).unwrap_or(Ordering::Equal));
    // Equal-modulus runs (within radii) are ordered by argument.
    let mut start = 0;
    while start < roots.len() {
        let mut end = start + 1;
        while end < roots.len() {
            let tie = roots[end - 1].value.abs_f64() - roots[end].value.abs_f64()
                <= roots[end - 1].radius + roots[end].radius + 1e-300;
            if !tie {
                break;
            }
            end += 1;
        }
        roots[start..end]
            .sort_by(|a, b| a.value.arg().to_f64().partial_cmp(&b.value.arg().to_f64()).unwrap_or(Ordering::Equal));
        start = end;
    }
}

/// Solves the Vandermonde-type system in place; returns `None` if singular.
fn gauss_solve(mut a: Vec<Vec<Cplx>>, mut b: Vec<Cplx>) -> Option<Vec<Cplx>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs_f64().partial_cmp(&a[j][col].abs_f64()).unwrap_or(Ordering::Equal))?;
        if a[piv][col].is_zero() {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = &a[row][col] / &a[col][col];
            let (top, bottom) = a.split_at_mut(row);
            for (x, pv) in bottom[0][col..].iter_mut().zip(&top[col][col..]) {
                let t = &f * pv;
                *x = &*x - &t;
            }
            let t = &f * &b[col];
            b[row] = &b[row] - &t;
        }
    }
    let mut x = vec![Cplx::zero(b[0].prec()); n];
    for row in (0..n).rev() {
        let mut acc = b[row].clone();
        for k in row + 1..n {
            acc = &acc - &(&a[row][k] * &x[k]);
        }
        x[row] = &acc / &a[row][row];
    }
    Some(x)
}

/// Solves `sum_i lambda_i alpha_i^n = a_n` for `n = 1..d`.
///
/// Returns the coefficients (with radii) and the max relative residual.
pub fn binet_coefficients(spec: &RecurrenceSpec, roots: &[RootEstimate]) -> Result<(Vec<CoeffEstimate>, f64)> {
    let d = roots.len();
    let prec = roots[0].value.prec();
    let work = prec + 32;
    let alphas: Vec<Cplx> = roots.iter().map(|r| r.value.with_prec(work)).collect();
    let terms = spec.effective_initial_terms();
    let matrix: Vec<Vec<Cplx>> = (1..=d as i64).map(|n| alphas.iter().map(|a| a.powi(n)).collect()).collect();
    let rhs: Vec<Cplx> = terms.iter().map(|t| Cplx::from_integer(work, t)).collect();
    let singular =
        || Error::IllConditionedSolve { residual: f64::INFINITY, tolerance: (2.0f64).powi(-(prec as i32) / 2) };
    let lambda = gauss_solve(matrix.clone(), rhs.clone()).ok_or_else(singular)?;

    let mut residual = 0.0f64;
    let mut resid_vec = Vec::with_capacity(d);
    for n in 0..d {
        let mut acc = Cplx::zero(work);
        for i in 0..d {
            acc = &acc + &(&matrix[n][i] * &lambda[i]);
        }
        let r = (&acc - &rhs[n]).abs_f64();
        resid_vec.push(r);
        residual = residual.max(r / rhs[n].abs_f64().max(1.0));
    }
    let tolerance = (2.0f64).powi(-(prec as i32) / 2);
    if residual > tolerance {
        return Err(Error::IllConditionedSolve { residual, tolerance });
    }

    // |d lambda| <= |V^{-1}| (|r| + sum_i n |alpha_i|^{n-1} |lambda_i| radius_i)
    let mut perturb = vec![0.0f64; d];
    for (n, p) in perturb.iter_mut().enumerate() {
        let nn = (n + 1) as f64;
        *p = resid_vec[n]
            + (0..d)
                .map(|i| nn * roots[i].value.abs_f64().powf(nn - 1.0) * lambda[i].abs_f64() * roots[i].radius)
                .sum::<f64>();
    }
    let mut inv_abs = vec![vec![0.0f64; d]; d];
    for col in 0..d {
        let mut e = vec![Cplx::zero(work); d];
        e[col] = Cplx::one(work);
        let x = gauss_solve(matrix.clone(), e).ok_or_else(singular)?;
        for row in 0..d {
            inv_abs[row][col] = x[row].abs_f64();
        }
    }
    let u = mp::ulp(prec);
    let coeffs = (0..d)
        .map(|i| {
            let rad: f64 = (0..d).map(|n| inv_abs[i][n] * perturb[n]).sum();
            CoeffEstimate { value: lambda[i].with_prec(prec), radius: rad.max(u * lambda[i].abs_f64()) }
        })
        .collect();
    Ok((coeffs, residual))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn spec(c: &[i64], a: &[i64]) -> RecurrenceSpec {
        RecurrenceSpec::from_i64(None, c, a).unwrap()
    }

    #[test]
    fn golden_ratio_roots() {
        let r = char_roots(&spec(&[1, 1], &[1, 1]), 128).unwrap();
        let s5 = 5f64.sqrt();
        assert!((r[0].value.re.to_f64() - (1.0 + s5) / 2.0).abs() < 1e-15);
        assert!((r[1].value.re.to_f64() - (1.0 - s5) / 2.0).abs() < 1e-15);
        assert!(r[0].value.is_real() && r[1].value.is_real());
        assert!(r[0].radius < 1e-35);
    }

    #[test]
    fn pell_roots() {
        let r = char_roots(&spec(&[1, 2], &[1, 2]), 128).unwrap();
        let s2 = 2f64.sqrt();
        assert!((r[0].value.re.to_f64() - (1.0 + s2)).abs() < 1e-15);
        assert!((r[1].value.re.to_f64() - (1.0 - s2)).abs() < 1e-15);
    }

    #[test]
    fn linear_root_is_exact() {
        let r = char_roots(&spec(&[2], &[1]), 128).unwrap();
        assert_eq!(r[0].value.re.to_f64(), 2.0);
        assert_eq!(r.len(), 1);
    }

    #[test]
    fn rejects_low_precision() {
        assert!(char_roots(&spec(&[1, 1], &[1, 1]), 32).is_err());
    }

    #[test]
    fn classical_binet() {
        let b = BinetData::compute(&spec(&[1, 1], &[1, 1]), 128).unwrap();
        let s5 = 5f64.sqrt();
        assert!((b.lambda(0).re.to_f64() - 1.0 / s5).abs() < 1e-15);
        assert!((b.lambda(1).re.to_f64() + 1.0 / s5).abs() < 1e-15);
        assert!(b.lambda(0).is_real());
    }

    #[test]
    fn lucas_coefficients_are_one() {
        let b = BinetData::compute(&spec(&[1, 1], &[1, 3]), 128).unwrap();
        for i in 0..2 {
            assert!((b.lambda(i).to_c64() - 1.0).norm() < 1e-30);
        }
    }

    #[test]
    fn doubling_coefficient_half() {
        let b = BinetData::compute(&spec(&[2], &[1]), 128).unwrap();
        assert_eq!(b.lambda(0).re.to_f64(), 0.5);
    }

    #[test]
    fn tribonacci_dominant_root() {
        let t = corpus::lookup("tribonacci").unwrap();
        let b = BinetData::compute(&t.spec, 128).unwrap();
        // Real root of y^3 - y^2 - y - 1 by bisection in f64.
        let (mut lo, mut hi) = (1.5f64, 2.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid.powi(3) - mid * mid - mid - 1.0 > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        assert!((b.alpha1().to_f64() - lo).abs() < 1e-14);
        // complex pair, conjugates of each other
        let (a2, a3) = (b.alpha(1).to_c64(), b.alpha(2).to_c64());
        assert!((a2 - a3.conj()).norm() < 1e-14);
        assert!(a2.im < 0.0, "ties ordered by ascending argument");
    }

    #[test]
    fn reconstruction_within_half_precision() {
        for entry in corpus::builtin_corpus() {
            let b = BinetData::compute(&entry.spec, 128).unwrap();
            let mut terms = entry.spec.terms();
            for n in 1..=200i64 {
                let a = terms.next().unwrap();
                let mut acc = Cplx::zero(160);
                for i in 0..b.degree() {
                    acc = &acc + &(&b.lambda(i).with_prec(160) * &b.alpha(i).with_prec(160).powi(n));
                }
                let rel = (&acc - &Cplx::from_integer(160, &a)).abs_f64() / a.to_f64().abs();
                assert!(rel < 2f64.powi(-64), "{} n={n} rel={rel:e}", entry.name());
            }
        }
    }
}
