//! Exact integer linear recurrences: generation, validation, normalization.

use std::collections::VecDeque;

use rug::Integer;

use crate::algebraic::BinetData;
use crate::error::{Error, Hypothesis, Result};
use crate::mp::Cplx;

/// Default cap on the normalization offset search.
pub const DEFAULT_NORMALIZATION_CAP: usize = 10_000;

/// Monic recurrence `a_{n+d} = c_{d-1} a_{n+d-1} + ... + c_0 a_n` with
/// initial terms `a_1..a_d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecurrenceSpec {
    pub name: Option<String>,
    /// `c_0, ..., c_{d-1}`; the characteristic polynomial is
    /// `y^d - c_{d-1} y^{d-1} - ... - c_0`.
    pub char_coeffs: Vec<Integer>,
    pub initial_terms: Vec<Integer>,
    /// Work with `-a_n` instead of `a_n`.
    pub negated: bool,
}

impl RecurrenceSpec {
    pub fn new(name: Option<&str>, char_coeffs: Vec<Integer>, initial_terms: Vec<Integer>) -> Result<Self> {
        if char_coeffs.is_empty() {
            return Err(Error::InvalidSpec("degree must be at least 1".into()));
        }
        if char_coeffs.len() != initial_terms.len() {
            return Err(Error::InvalidSpec(format!(
                "{} characteristic coefficients but {} initial terms",
                char_coeffs.len(),
                initial_terms.len()
            )));
        }
        if initial_terms.iter().all(|t| *t == 0) {
            return Err(Error::InvalidSpec("initial terms are all zero".into()));
        }
        Ok(RecurrenceSpec { name: name.map(str::to_owned), char_coeffs, initial_terms, negated: false })
    }

    pub fn from_i64(name: Option<&str>, char_coeffs: &[i64], initial_terms: &[i64]) -> Result<Self> {
        RecurrenceSpec::new(
            name,
            char_coeffs.iter().map(|&c| Integer::from(c)).collect(),
            initial_terms.iter().map(|&a| Integer::from(a)).collect(),
        )
    }

    pub fn with_negation(mut self, negated: bool) -> Self {
        self.negated = negated;
        self
    }

    pub fn degree(&self) -> usize {
        self.char_coeffs.len()
    }

    pub fn label(&self) -> &str {
        self.name.as_deref().unwrap_or("<anonymous>")
    }

    /// Initial terms after applying the sign flag.
    pub fn effective_initial_terms(&self) -> Vec<Integer> {
        self.initial_terms.iter().map(|a| if self.negated { Integer::from(-a) } else { a.clone() }).collect()
    }

    /// Iterator over `a_1, a_2, ...` by exact integer iteration.
    pub fn terms(&self) -> Terms<'_> {
        Terms { coeffs: &self.char_coeffs, window: self.effective_initial_terms().into_iter().collect(), emitted: 0 }
    }

    /// `a_n` for `n >= 1`.
    pub fn term(&self, n: usize) -> Integer {
        assert!(n >= 1, "terms are indexed from 1");
        self.terms().nth(n - 1).expect("infinite iterator")
    }
}

pub struct Terms<'a> {
    coeffs: &'a [Integer],
    window: VecDeque<Integer>,
    emitted: usize,
}

impl Iterator for Terms<'_> {
    type Item = Integer;

    fn next(&mut self) -> Option<Integer> {
        let d = self.coeffs.len();
        if self.emitted >= d {
            let mut next = Integer::new();
            for (c, a) in self.coeffs.iter().zip(&self.window) {
                next += c * a;
            }
            self.window.pop_front();
            self.window.push_back(next);
        }
        self.emitted += 1;
        let idx = if self.emitted <= d { self.emitted - 1 } else { d - 1 };
        Some(self.window[idx].clone())
    }
}

/// One line of a validation report.
#[derive(Clone, Debug)]
pub struct HypothesisCheck {
    pub hypothesis: Hypothesis,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default)]
pub struct ValidationReport {
    pub checks: Vec<HypothesisCheck>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&HypothesisCheck> {
        self.checks.iter().find(|c| !c.passed)
    }

    pub fn into_result(self) -> Result<Self> {
        match self.first_failure() {
            Some(f) => Err(Error::UnsupportedRecurrence { hypothesis: f.hypothesis, detail: f.detail.clone() }),
            None => Ok(self),
        }
    }
}

/// Runs every standing-hypothesis check and reports all of them.
pub fn diagnose(spec: &RecurrenceSpec, binet: &BinetData) -> ValidationReport {
    let mut checks = Vec::new();
    let mut push = |hypothesis, passed, detail: String| checks.push(HypothesisCheck { hypothesis, passed, detail });
    let d = spec.degree();
    let roots = &binet.roots;

    let zero = roots.iter().position(|r| r.value.abs_f64() <= r.radius);
    push(
        Hypothesis::NonzeroRoots,
        zero.is_none(),
        match zero {
            Some(i) => format!("root {i} is indistinguishable from 0"),
            None => "ok".into(),
        },
    );

    let a1 = &roots[0];
    push(Hypothesis::DominantRootReal, a1.value.is_real(), format!("alpha_1 = {}", a1.value));
    let a1v = a1.value.re.to_f64();
    push(Hypothesis::DominantRootAboveOne, a1.value.is_real() && a1v - a1.radius > 1.0, format!("alpha_1 = {a1v}"));
    let dominated = roots[1..].iter().all(|r| a1v - a1.radius > r.value.abs_f64() + r.radius);
    push(
        Hypothesis::StrictDominance,
        a1.value.is_real() && dominated,
        format!(
            "alpha_1 = {a1v}, max other modulus = {}",
            roots[1..].iter().map(|r| r.value.abs_f64()).fold(0.0, f64::max)
        ),
    );

    let mut min_gap = f64::INFINITY;
    let mut simple = true;
    for i in 0..d {
        for j in i + 1..d {
            let gap = roots[i].value.distance(&roots[j].value).to_f64();
            min_gap = min_gap.min(gap);
            simple &= gap > roots[i].radius + roots[j].radius;
        }
    }
    push(Hypothesis::SimpleRoots, simple, format!("min root separation {min_gap:e}"));

    let l1 = &binet.coeffs[0];
    push(
        Hypothesis::LeadingCoefficientPositive,
        l1.value.is_real() && l1.value.re.to_f64() - l1.radius > 0.0,
        format!("lambda_1 = {}", l1.value),
    );
    ValidationReport { checks }
}

/// Checks the standing hypotheses; the error names the first failure.
pub fn validate(spec: &RecurrenceSpec, binet: &BinetData) -> Result<ValidationReport> {
    diagnose(spec, binet).into_result()
}

/// A recurrence split at `n0`: exact prefix `a_1..a_{n0}` and a tail that is
/// strictly increasing, positive and Binet-dominated.
#[derive(Clone, Debug)]
pub struct NormalizedRecurrence {
    pub spec: RecurrenceSpec,
    pub n0: usize,
    pub prefix_terms: Vec<Integer>,
    /// `lambda_i * alpha_i^{n0}`: Binet coefficients of `b_n = a_{n0+n}`.
    pub shifted_coeffs: Vec<Cplx>,
    /// `rho_{n0+1}`, the dominance ratio of the shifted tail at its first term.
    pub dominance_ratio: f64,
    /// From this index on, monotonicity follows from the Binet bound alone.
    pub horizon: usize,
}

impl NormalizedRecurrence {
    /// Same split at a larger offset; used to check shift independence.
    pub fn reshift(&self, binet: &BinetData, n0: usize) -> Result<Self> {
        if n0 < self.n0 {
            return Err(Error::InvalidSpec(format!("offset {n0} is below the minimal offset {}", self.n0)));
        }
        Ok(build_normalized(&self.spec, binet, n0, self.horizon))
    }
}

fn build_normalized(spec: &RecurrenceSpec, binet: &BinetData, n0: usize, horizon: usize) -> NormalizedRecurrence {
    let prefix_terms: Vec<Integer> = spec.terms().take(n0).collect();
    let shifted_coeffs = (0..binet.degree()).map(|i| binet.lambda(i) * &binet.alpha(i).powi(n0 as i64)).collect();
    NormalizedRecurrence {
        spec: spec.clone(),
        n0,
        prefix_terms,
        shifted_coeffs,
        dominance_ratio: binet.dominance_ratio(n0 + 1),
        horizon,
    }
}

/// Least offset `n0` with the tail strictly increasing, positive and
/// `rho_n < 1` for all `n > n0`.
pub fn normalize(spec: &RecurrenceSpec, binet: &BinetData) -> Result<NormalizedRecurrence> {
    normalize_with_cap(spec, binet, DEFAULT_NORMALIZATION_CAP)
}

pub fn normalize_with_cap(spec: &RecurrenceSpec, binet: &BinetData, cap: usize) -> Result<NormalizedRecurrence> {
    const MARGIN: f64 = 1.0 - 1e-9;
    let overflow = Error::NormalizationOverflow { cap };

    // rho_n is non-increasing, so the first n with rho_n < 1 fixes a floor.
    let rho_start =
        (1..=cap + 1).find(|&n| binet.dominance_ratio(n) < MARGIN).ok_or(Error::NormalizationOverflow { cap })?;
    // Beyond the horizon a_{n+1} > a_n follows from the Binet bound.
    let horizon = (1..=cap + 1)
        .find(|&n| binet.increase_ratio(n) < MARGIN && binet.dominance_ratio(n) < MARGIN)
        .ok_or(Error::NormalizationOverflow { cap })?;

    let terms: Vec<Integer> = spec.terms().take(horizon + 1).collect();
    // Last index n <= horizon where "a_n > 0 and a_{n+1} > a_n" fails.
    let bad = (1..=horizon).rev().find(|&n| !(terms[n - 1] > 0 && terms[n] > terms[n - 1])).unwrap_or(0);
    let n0 = bad.max(rho_start - 1);
    if n0 > cap {
        return Err(overflow);
    }
    Ok(build_normalized(spec, binet, n0, horizon))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fib() -> RecurrenceSpec {
        RecurrenceSpec::from_i64(Some("fibonacci"), &[1, 1], &[1, 1]).unwrap()
    }

    /// Plain iteration over i128, independent of `Terms`.
    fn iterate(c: &[i128], a: &[i128], n: usize) -> i128 {
        let mut w = a.to_vec();
        while w.len() < n {
            let k = w.len();
            let d = c.len();
            let next = (0..d).map(|i| c[i] * w[k - d + i]).sum();
            w.push(next);
        }
        w[n - 1]
    }

    #[test]
    fn fibonacci_terms() {
        assert_eq!(fib().term(10), 55);
        assert_eq!(fib().term(1), 1);
        assert_eq!(iterate(&[1, 1], &[1, 1], 10), 55);
    }

    #[test]
    fn tribonacci_fifth() {
        let t = RecurrenceSpec::from_i64(None, &[1, 1, 1], &[1, 1, 2]).unwrap();
        assert_eq!(t.term(5), 7);
        assert_eq!(iterate(&[1, 1, 1], &[1, 1, 2], 5), 7);
        for n in 1..60 {
            assert_eq!(t.term(n), iterate(&[1, 1, 1], &[1, 1, 2], n));
        }
    }

    #[test]
    fn large_terms_are_exact() {
        let f = fib();
        let a300 = f.term(300);
        let a299 = f.term(299);
        let a298 = f.term(298);
        assert_eq!(a300, Integer::from(&a299 + &a298));
        assert!(a300.significant_bits() > 200);
    }

    #[test]
    fn rejects_malformed_specs() {
        assert!(RecurrenceSpec::from_i64(None, &[], &[]).is_err());
        assert!(RecurrenceSpec::from_i64(None, &[1, 1], &[1]).is_err());
        assert!(RecurrenceSpec::from_i64(None, &[1, 1], &[0, 0]).is_err());
    }

    #[test]
    fn negation_flips_terms() {
        let f = fib().with_negation(true);
        assert_eq!(f.term(6), -8);
    }

    #[test]
    fn validate_fibonacci_and_doubling() {
        let b = BinetData::compute(&fib(), 128).unwrap();
        validate(&fib(), &b).unwrap();
        assert!((b.alpha1().to_f64() - 1.618_033_988_7).abs() < 1e-10);
        assert!((b.lambda1().to_f64() - 0.447_213_595_5).abs() < 1e-10);

        let dbl = RecurrenceSpec::from_i64(None, &[2], &[1]).unwrap();
        let b = BinetData::compute(&dbl, 128).unwrap();
        validate(&dbl, &b).unwrap();
        assert_eq!(b.alpha1().to_f64(), 2.0);
        assert_eq!(b.lambda1().to_f64(), 0.5);
    }

    #[test]
    fn rotation_has_no_dominant_root() {
        // y^2 + 1: roots +-i
        let s = RecurrenceSpec::from_i64(None, &[-1, 0], &[1, 1]).unwrap();
        let b = BinetData::compute(&s, 128).unwrap();
        match validate(&s, &b) {
            Err(Error::UnsupportedRecurrence { hypothesis, .. }) => {
                assert_eq!(hypothesis, Hypothesis::DominantRootReal)
            }
            other => panic!("expected unsupported, got {other:?}"),
        }
        // y^2 + y: roots 0 and -1
        let s = RecurrenceSpec::from_i64(None, &[0, -1], &[1, 1]).unwrap();
        assert!(matches!(
            BinetData::compute(&s, 128),
            Err(Error::UnsupportedRecurrence { hypothesis: Hypothesis::NonzeroRoots, .. })
        ));
    }

    #[test]
    fn negative_leading_coefficient_rejected_until_negated() {
        let s = RecurrenceSpec::from_i64(None, &[1, 1], &[-1, -1]).unwrap();
        let b = BinetData::compute(&s, 128).unwrap();
        match validate(&s, &b) {
            Err(Error::UnsupportedRecurrence { hypothesis, .. }) => {
                assert_eq!(hypothesis, Hypothesis::LeadingCoefficientPositive)
            }
            other => panic!("unexpected {other:?}"),
        }
        let s = s.with_negation(true);
        let b = BinetData::compute(&s, 128).unwrap();
        validate(&s, &b).unwrap();
        assert_eq!(normalize(&s, &b).unwrap().n0, 1);
    }

    #[test]
    fn normalization_offsets() {
        let cases: [(&[i64], &[i64], usize); 4] =
            [(&[1, 1], &[1, 1], 1), (&[2], &[1], 0), (&[1, 1, 1], &[1, 1, 2], 1), (&[1, 1], &[1, 3], 0)];
        for (c, a, want) in cases {
            let s = RecurrenceSpec::from_i64(None, c, a).unwrap();
            let b = BinetData::compute(&s, 128).unwrap();
            let norm = normalize(&s, &b).unwrap();
            assert_eq!(norm.n0, want, "{c:?} {a:?}");
            assert!(norm.dominance_ratio < 1.0);
        }
    }

    #[test]
    fn late_start_sequence_needs_larger_offset() {
        // a = 5, -3, 2, -1, 1, 0, 1, 1, 2, ... (Fibonacci run backwards)
        let s = RecurrenceSpec::from_i64(None, &[1, 1], &[5, -3]).unwrap();
        let b = BinetData::compute(&s, 128).unwrap();
        validate(&s, &b).unwrap();
        let norm = normalize(&s, &b).unwrap();
        let t: Vec<_> = s.terms().take(12).collect();
        assert_eq!(norm.n0, 7, "terms {t:?}");
        assert_eq!(norm.prefix_terms.len(), 7);
    }

    #[test]
    fn tiny_cap_overflows() {
        let s = RecurrenceSpec::from_i64(None, &[1, 1], &[5, -3]).unwrap();
        let b = BinetData::compute(&s, 128).unwrap();
        assert!(matches!(normalize_with_cap(&s, &b, 3), Err(Error::NormalizationOverflow { cap: 3 })));
    }
}
