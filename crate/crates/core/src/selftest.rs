//! Randomized invariant suites, one or more per module.
//!
//! Every suite is deterministic: points are drawn from a ChaCha generator
//! seeded from the suite name. `Level::Quick` uses small samples for a fast
//! smoke test; `Level::Full` uses the sample sizes of the documented
//! properties.

use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::{Float, Integer};

use crate::continuation::{eval_continued_x0, eval_lerch};
use crate::corpus;
use crate::direct_eval::{eval_direct, eval_power_series_z};
use crate::error::Error;
use crate::exec::Execution;
use crate::mp::Cplx;
use crate::poles_residues::{self, group_tol, PoleCaps, PoleRecord, ResidueOptions, SWindow, ZWindow};
use crate::special_values::value_at_negative_integer;
use crate::{BinetData, EvalParams, EvalResult, LerchZeta};

const PREC: u32 = 128;
const TOL: f64 = 1e-10;
const MAX_FAILURES: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Level {
    Quick,
    Full,
}

impl Level {
    fn pick(self, quick: usize, full: usize) -> usize {
        match self {
            Level::Quick => quick,
            Level::Full => full,
        }
    }
}

impl std::str::FromStr for Level {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "quick" => Ok(Level::Quick),
            "full" => Ok(Level::Full),
            _ => Err(format!("unknown level '{s}' (quick|full)")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SuiteResult {
    pub module: &'static str,
    pub name: &'static str,
    pub passed: usize,
    pub failed: usize,
    /// Points skipped because they landed too close to a pole.
    pub skipped: usize,
    /// First few failure messages.
    pub failures: Vec<String>,
    pub elapsed: Duration,
}

impl SuiteResult {
    pub fn ok(&self) -> bool {
        self.failed == 0 && self.passed > 0
    }
}

#[derive(Default)]
struct Tally {
    passed: usize,
    failed: usize,
    skipped: usize,
    failures: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        if ok {
            self.passed += 1;
        } else {
            self.failed += 1;
            if self.failures.len() < MAX_FAILURES {
                self.failures.push(msg());
            }
        }
    }

    fn fail(&mut self, msg: String) {
        self.check(false, || msg);
    }

    /// Counts an `Err` as a failure and hands back the value otherwise.
    fn ok<T>(&mut self, r: crate::Result<T>, ctx: impl FnOnce() -> String) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.fail(format!("{}: {e}", ctx()));
                None
            }
        }
    }
}

type SuiteFn = fn(Level, &mut Tally);

const SUITES: &[(&str, &str, SuiteFn)] = &[
    ("recurrence", "term_vs_binet", term_vs_binet),
    ("recurrence", "shift_consistency", shift_consistency),
    ("algebraic", "reconstruction", reconstruction),
    ("algebraic", "precision_doubling", precision_doubling),
    ("algebraic", "conjugate_closure", conjugate_closure),
    ("direct_eval", "direct_vs_power_series", direct_vs_power_series),
    ("direct_eval", "conjugation_symmetry", conjugation_symmetry),
    ("direct_eval", "monotonicity", monotonicity),
    ("direct_eval", "abscissa_monotone", abscissa_monotone),
    ("continuation", "oracle_equivalence", oracle_equivalence),
    ("continuation", "ramanujan_consistency", ramanujan_consistency),
    ("continuation", "halving_tolerance", halving_tolerance),
    ("continuation", "degree_one", degree_one),
    ("poles_residues", "pole_certification", pole_certification),
    ("poles_residues", "record_invariants", record_invariants),
    ("poles_residues", "non_pole_certification", non_pole_certification),
    ("poles_residues", "translation", translation),
    ("poles_residues", "z_one_reduction", z_one_reduction),
    ("special_values", "fractions", fractions),
    ("special_values", "pole_avoidance", pole_avoidance),
    ("corpus", "builtins", builtins),
];

pub fn suite_names() -> Vec<&'static str> {
    SUITES.iter().map(|s| s.1).collect()
}

fn run_one(level: Level, module: &'static str, name: &'static str, f: SuiteFn) -> SuiteResult {
    let t0 = Instant::now();
    let mut t = Tally::default();
    f(level, &mut t);
    SuiteResult {
        module,
        name,
        passed: t.passed,
        failed: t.failed,
        skipped: t.skipped,
        failures: t.failures,
        elapsed: t0.elapsed(),
    }
}

/// Runs every suite; with `Execution::Parallel` suites run concurrently.
pub fn run_all(level: Level, exec: Execution) -> Vec<SuiteResult> {
    exec.map_collect(SUITES, |&(m, n, f)| run_one(level, m, n, f))
}

pub fn run_named(level: Level, name: &str) -> Option<SuiteResult> {
    SUITES.iter().find(|s| s.1 == name).map(|&(m, n, f)| run_one(level, m, n, f))
}

fn rng_for(name: &str) -> ChaCha8Rng {
    let seed = name.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3));
    ChaCha8Rng::seed_from_u64(seed)
}

fn zeta(name: &str) -> LerchZeta {
    LerchZeta::builtin(name, PREC).expect("builtin recurrence")
}

fn corpus_zetas() -> Vec<LerchZeta> {
    corpus::builtin_corpus().into_iter().map(|e| LerchZeta::new(e.spec, PREC).expect("builtin recurrence")).collect()
}

fn params(z: Complex64, s: Complex64, x: f64) -> EvalParams {
    EvalParams::new(PREC, z, s, x).with_tol(TOL)
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn diff(a: &EvalResult, b: &EvalResult) -> f64 {
    (&a.value - &b.value).abs_f64()
}

/// Uniform point in the disk `|z| <= r_max` avoiding a small neighbourhood of 0.
fn random_z(rng: &mut ChaCha8Rng, r_max: f64) -> Complex64 {
    let r = r_max * rng.gen_range(0.0025f64..1.0).sqrt();
    Complex64::from_polar(r, rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI))
}

fn near_pole(e: &Error) -> bool {
    matches!(e, Error::NearPole { .. })
}

// recurrence

fn term_vs_binet(level: Level, t: &mut Tally) {
    let n_max = level.pick(200, 1000);
    for e in corpus::builtin_corpus() {
        let est = BinetData::compute(&e.spec, 64).expect("binet");
        let prec = (n_max as f64 * est.alpha1().to_f64().log2()) as u32 + 96;
        let Some(b) = t.ok(BinetData::compute(&e.spec, prec), || format!("{} at {prec} bits", e.name())) else {
            continue;
        };
        let mut pw: Vec<Cplx> = (0..b.degree()).map(|i| b.alpha(i).clone()).collect();
        for (n, a) in e.spec.terms().take(n_max).enumerate() {
            let mut sum = Cplx::zero(prec);
            for (i, p) in pw.iter_mut().enumerate() {
                sum = &sum + &(b.lambda(i) * &*p);
                *p = &*p * b.alpha(i);
            }
            let err = Float::with_val(prec, &sum.re - &a).abs().to_f64().max(sum.im.to_f64().abs());
            let rounded = sum.re.to_integer();
            t.check(err < 0.5 && rounded.as_ref() == Some(&a), || {
                format!("{} n={}: rounding error {err:e}", e.name(), n + 1)
            });
        }
    }
}

fn shift_consistency(level: Level, t: &mut Tally) {
    let mut rng = rng_for("shift_consistency");
    let per = level.pick(3, 12);
    for f in corpus_zetas() {
        for shift in [1usize, 3] {
            let norm2 = f.norm.reshift(&f.binet, f.norm.n0 + shift).expect("reshift");
            for _ in 0..per {
                let z = random_z(&mut rng, 1.5);
                let ab = f.abscissa(&Cplx::from_c64(PREC, z));
                let s = c(ab + rng.gen_range(-3.0..2.0), rng.gen_range(-8.0..8.0));
                let x = if rng.gen_bool(0.5) { 0.0 } else { rng.gen_range(0.0..0.9) };
                let p = params(z, s, x);
                match (eval_lerch(&f.norm, &f.binet, &p), eval_lerch(&norm2, &f.binet, &p)) {
                    (Ok(a), Ok(b)) => t.check(diff(&a, &b) <= a.error_bound + b.error_bound, || {
                        format!("{} z={z} s={s} x={x}: {:e}", f.spec.label(), diff(&a, &b))
                    }),
                    (Err(e), _) | (_, Err(e)) if near_pole(&e) => t.skipped += 1,
                    (Err(e), _) | (_, Err(e)) => t.fail(format!("{} z={z} s={s} x={x}: {e}", f.spec.label())),
                }
            }
        }
    }
}

// algebraic

fn reconstruction(_: Level, t: &mut Tally) {
    for f in corpus_zetas() {
        let b = &f.binet;
        let bound = 2f64.powi(-(PREC as i32) / 2);
        let mut pw: Vec<Cplx> = (0..b.degree()).map(|i| b.alpha(i).clone()).collect();
        let mut worst = 0.0f64;
        for a in f.spec.terms().take(200) {
            let mut sum = Cplx::zero(PREC);
            for (i, p) in pw.iter_mut().enumerate() {
                sum = &sum + &(b.lambda(i) * &*p);
                *p = &*p * b.alpha(i);
            }
            let rel = (&sum - &Cplx::from_integer(PREC, &a)).abs_f64() / a.to_f64().abs();
            worst = worst.max(rel);
        }
        t.check(worst < bound, || format!("{}: relative error {worst:e}", f.spec.label()));
    }
}

fn precision_doubling(_: Level, t: &mut Tally) {
    let factor = 2f64.powi(PREC as i32 / 4);
    for e in corpus::builtin_corpus() {
        let lo = BinetData::compute(&e.spec, PREC).expect("binet");
        let hi = BinetData::compute(&e.spec, 2 * PREC).expect("binet");
        for (i, r) in lo.roots.iter().enumerate() {
            let (j, _) = hi
                .roots
                .iter()
                .enumerate()
                .map(|(j, h)| (j, h.value.with_prec(PREC).distance(&r.value).to_f64()))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .expect("roots");
            let (rh, ch) = (hi.roots[j].radius, hi.coeffs[j].radius);
            t.check(rh <= r.radius / factor, || format!("{} root {i}: radius {:e} -> {rh:e}", e.name(), r.radius));
            t.check(ch <= lo.coeffs[i].radius / factor, || {
                format!("{} coeff {i}: radius {:e} -> {ch:e}", e.name(), lo.coeffs[i].radius)
            });
        }
    }
}

fn conjugate_closure(_: Level, t: &mut Tally) {
    for f in corpus_zetas() {
        let roots = &f.binet.roots;
        for r in roots {
            let cj = r.value.conj();
            let ok = roots.iter().any(|q| q.value.distance(&cj).to_f64() <= r.radius + q.radius + 1e-30);
            t.check(ok, || format!("{}: conj({}) not a root", f.spec.label(), r.value));
        }
    }
}

// direct_eval

fn direct_vs_power_series(level: Level, t: &mut Tally) {
    let mut rng = rng_for("direct_vs_power_series");
    let n = level.pick(12, 100);
    for f in corpus_zetas() {
        for _ in 0..n {
            let z = random_z(&mut rng, 0.9);
            let ab = f.abscissa(&Cplx::from_c64(PREC, z));
            let s = c(ab + rng.gen_range(0.5..3.0), rng.gen_range(-6.0..6.0));
            let x = rng.gen_range(0.0..0.95);
            let p = params(z, s, x);
            let (Some(a), Some(b)) = (
                t.ok(eval_direct(&f.norm, &f.binet, &p), || format!("direct z={z} s={s}")),
                t.ok(eval_power_series_z(&f.norm, &f.binet, &p), || format!("power series z={z} s={s}")),
            ) else {
                continue;
            };
            t.check(diff(&a, &b) <= a.error_bound + b.error_bound, || {
                format!("{} z={z} s={s} x={x}: {:e}", f.spec.label(), diff(&a, &b))
            });
        }
    }
}

fn conjugation_symmetry(level: Level, t: &mut Tally) {
    let mut rng = rng_for("conjugation_symmetry");
    let n = level.pick(4, 20);
    for f in corpus_zetas() {
        for i in 0..n {
            let z = c(rng.gen_range(-1.5..1.5), 0.0);
            let ab = f.abscissa(&Cplx::from_c64(PREC, z));
            let (s, x) = if i % 2 == 0 {
                (c(ab + rng.gen_range(0.5..3.0), rng.gen_range(0.5..8.0)), rng.gen_range(0.0..0.9))
            } else {
                (c(ab - rng.gen_range(0.0..3.0), rng.gen_range(0.5..8.0)), 0.0)
            };
            let pa = params(z, s, x);
            let pb = params(z, s.conj(), x);
            match (f.eval(&pa, None), f.eval(&pb, None)) {
                (Ok(a), Ok(b)) => {
                    let d = (&a.value.conj() - &b.value).abs_f64();
                    t.check(d <= a.error_bound + b.error_bound, || {
                        format!("{} z={z} s={s} x={x}: {d:e}", f.spec.label())
                    })
                }
                (Err(e), _) | (_, Err(e)) if near_pole(&e) => t.skipped += 1,
                (Err(e), _) | (_, Err(e)) => t.fail(format!("{} z={z} s={s}: {e}", f.spec.label())),
            }
        }
    }
}

fn monotonicity(level: Level, t: &mut Tally) {
    let mut rng = rng_for("monotonicity");
    let n = level.pick(5, 25);
    for f in corpus_zetas() {
        for _ in 0..n {
            let r = rng.gen_range(0.05..0.95);
            let ab = f.abscissa(&Cplx::from_f64(PREC, r, 0.0));
            let s1 = ab + rng.gen_range(0.5..3.0);
            let s2 = s1 + rng.gen_range(0.05..1.0);
            let x = rng.gen_range(0.0..0.95);
            let a = t.ok(eval_direct(&f.norm, &f.binet, &params(c(r, 0.0), c(s1, 0.0), x)), || format!("s={s1}"));
            let b = t.ok(eval_direct(&f.norm, &f.binet, &params(c(r, 0.0), c(s2, 0.0), x)), || format!("s={s2}"));
            let (Some(a), Some(b)) = (a, b) else { continue };
            let (va, vb) = (a.value.re.to_f64(), b.value.re.to_f64());
            t.check(vb > 0.0 && va - vb > -(a.error_bound + b.error_bound), || {
                format!("{} r={r} x={x}: phi({s1})={va} phi({s2})={vb}", f.spec.label())
            });
        }
    }
}

fn abscissa_monotone(level: Level, t: &mut Tally) {
    let mut rng = rng_for("abscissa_monotone");
    let n = level.pick(20, 100);
    for f in corpus_zetas() {
        for _ in 0..n {
            let r1 = rng.gen_range(0.01..5.0);
            let r2 = r1 * rng.gen_range(1.001..3.0);
            let th = rng.gen_range(-3.0..3.0);
            let a1 = f.abscissa(&Cplx::from_f64(PREC, r1, 0.0));
            let a2 = f.abscissa(&Cplx::from_f64(PREC, r2, 0.0));
            let a3 = f.abscissa(&Cplx::from_c64(PREC, Complex64::from_polar(r1, th)));
            t.check(a1 < a2 && (a1 - a3).abs() < 1e-12, || {
                format!("{}: ab({r1})={a1} ab({r2})={a2} ab({r1}e^{th}i)={a3}", f.spec.label())
            });
        }
    }
}

// continuation

fn oracle_equivalence(level: Level, t: &mut Tally) {
    let mut rng = rng_for("oracle_equivalence");
    let n = level.pick(15, 200);
    for f in corpus_zetas() {
        for _ in 0..n {
            let z = random_z(&mut rng, 2.0);
            let ab = f.abscissa(&Cplx::from_c64(PREC, z));
            let s = c(ab + rng.gen_range(0.5..4.0), rng.gen_range(-10.0..10.0));
            let p = params(z, s, 0.0);
            let a = t.ok(eval_direct(&f.norm, &f.binet, &p), || format!("direct z={z} s={s}"));
            let b = t.ok(eval_continued_x0(&f.norm, &f.binet, &p), || format!("continued z={z} s={s}"));
            let (Some(a), Some(b)) = (a, b) else { continue };
            let d = diff(&a, &b);
            t.check(d <= a.error_bound + b.error_bound && d <= 1e-9, || {
                format!("{} z={z} s={s}: {d:e} (bounds {:e} + {:e})", f.spec.label(), a.error_bound, b.error_bound)
            });
        }
    }
}

fn ramanujan_consistency(level: Level, t: &mut Tally) {
    let mut rng = rng_for("ramanujan_consistency");
    let n = level.pick(3, 20);
    for f in corpus_zetas() {
        for x in [0.1, 0.5, 0.9] {
            for _ in 0..n {
                let s = c(rng.gen_range(0.5..4.0), rng.gen_range(-10.0..10.0));
                let p = params(c(1.0, 0.0), s, x);
                let a = t.ok(eval_direct(&f.norm, &f.binet, &p), || format!("direct s={s} x={x}"));
                let b = t.ok(eval_lerch(&f.norm, &f.binet, &p), || format!("lift s={s} x={x}"));
                let (Some(a), Some(b)) = (a, b) else { continue };
                t.check(diff(&a, &b) <= a.error_bound + b.error_bound, || {
                    format!("{} s={s} x={x}: {:e}", f.spec.label(), diff(&a, &b))
                });
            }
        }
    }
}

fn halving_tolerance(level: Level, t: &mut Tally) {
    let mut rng = rng_for("halving_tolerance");
    let n = level.pick(4, 20);
    for f in corpus_zetas() {
        for i in 0..n {
            let z = random_z(&mut rng, 1.5);
            let ab = f.abscissa(&Cplx::from_c64(PREC, z));
            let s = c(ab + rng.gen_range(-4.0..2.0), rng.gen_range(-8.0..8.0));
            let x = if i % 2 == 0 { 0.0 } else { rng.gen_range(0.0..0.9) };
            let tol = 10f64.powf(-rng.gen_range(4.0..12.0));
            let p1 = params(z, s, x).with_tol(tol);
            let p2 = params(z, s, x).with_tol(tol / 2.0);
            match (f.eval(&p1, None), f.eval(&p2, None)) {
                (Ok(a), Ok(b)) => t.check(diff(&a, &b) <= a.error_bound, || {
                    format!(
                        "{} z={z} s={s} x={x} tol={tol:e}: moved {:e} > {:e}",
                        f.spec.label(),
                        diff(&a, &b),
                        a.error_bound
                    )
                }),
                (Err(e), _) | (_, Err(e)) if near_pole(&e) => t.skipped += 1,
                (Err(e), _) | (_, Err(e)) => t.fail(format!("{} z={z} s={s}: {e}", f.spec.label())),
            }
        }
    }
}

fn degree_one(level: Level, t: &mut Tally) {
    let mut rng = rng_for("degree_one");
    let f = zeta("doubling");
    t.check(crate::MultiIndex::shell(1, 0).len() == 1 && crate::MultiIndex::shell(1, 0)[0].is_empty(), || {
        "degree-one simplex is not the single empty tuple".into()
    });
    for _ in 0..level.pick(10, 50) {
        let z = random_z(&mut rng, 3.0);
        let s = c(rng.gen_range(-6.0..6.0), rng.gen_range(-6.0..6.0));
        // lambda_1^{-s} / (z^{-1} alpha_1^s - 1) with lambda_1 = 1/2, alpha_1 = 2
        let want = c(0.5, 0.0).powc(-s) / (c(2.0, 0.0).powc(s) / z - 1.0);
        match eval_continued_x0(&f.norm, &f.binet, &params(z, s, 0.0)) {
            Ok(r) => {
                let d = (r.value.to_c64() - want).norm();
                t.check(d <= 1e-9 * want.norm().max(1.0), || format!("z={z} s={s}: {} vs {want}", r.value));
                let ab = f.abscissa(&Cplx::from_c64(PREC, z));
                if s.re > ab + 0.5 {
                    if let Some(d) =
                        t.ok(eval_direct(&f.norm, &f.binet, &params(z, s, 0.0)), || format!("direct z={z} s={s}"))
                    {
                        t.check(diff(&r, &d) <= r.error_bound + d.error_bound, || format!("direct z={z} s={s}"));
                    }
                }
            }
            Err(e) if near_pole(&e) => t.skipped += 1,
            Err(e) => t.fail(format!("z={z} s={s}: {e}")),
        }
    }
}

// poles_residues

fn residue_opts() -> ResidueOptions {
    ResidueOptions::default()
}

struct SCase {
    seq: &'static str,
    z: Complex64,
    window: SWindow,
}

fn s_cases(level: Level) -> Vec<SCase> {
    let mut v = vec![SCase {
        seq: "fibonacci",
        z: c(1.0, 0.0),
        window: match level {
            Level::Quick => SWindow { re0: -5.0, re1: 1.0, im0: -14.0, im1: 14.0 },
            Level::Full => SWindow { re0: -9.0, re1: 1.0, im0: -30.0, im1: 30.0 },
        },
    }];
    v.push(SCase { seq: "tribonacci", z: c(0.8, 0.3), window: SWindow { re0: -3.0, re1: 0.5, im0: -12.0, im1: 12.0 } });
    if level == Level::Full {
        v.push(SCase { seq: "pell", z: c(1.3, -0.4), window: SWindow { re0: -4.5, re1: 0.5, im0: -8.0, im1: 8.0 } });
    }
    v
}

/// `|eps * phi(p + eps)|` against `|residue|` along two directions.
fn certify_s(t: &mut Tally, f: &LerchZeta, z: &Cplx, rec: &PoleRecord, res: &Cplx) {
    for dir in [c(1.0, 0.0), c(0.0, 1.0)] {
        let eps = 1e-5;
        let s = &rec.location + &Cplx::from_c64(PREC, dir * eps);
        let p = EvalParams::from_values(z.clone(), s, Float::new(PREC)).with_tol(1e-12).with_pole_guard(1e-12);
        if let Some(r) = t.ok(eval_continued_x0(&f.norm, &f.binet, &p), || format!("near {}", rec.location)) {
            let g = r.value.abs_f64() * eps;
            let want = res.abs_f64();
            t.check((g - want).abs() <= 1e-3 * want, || {
                format!("{} s0={} dir={dir}: |eps phi|={g} |res|={want}", f.spec.label(), rec.location)
            });
        }
    }
}

fn certify_z(t: &mut Tally, f: &LerchZeta, s: &Cplx, rec: &PoleRecord, res: &Cplx) {
    for dir in [c(1.0, 0.0), c(0.0, 1.0)] {
        let dz = &rec.location * &Cplx::from_c64(PREC, dir * 1e-5);
        let z = &rec.location + &dz;
        let p = EvalParams::from_values(z, s.clone(), Float::new(PREC)).with_tol(1e-12).with_pole_guard(1e-12);
        if let Some(r) = t.ok(eval_continued_x0(&f.norm, &f.binet, &p), || format!("near z={}", rec.location)) {
            let g = r.value.abs_f64() * dz.abs_f64();
            let want = res.abs_f64();
            t.check((g - want).abs() <= 1e-3 * want, || {
                format!("{} z0={} dir={dir}: |dz phi|={g} |res|={want}", f.spec.label(), rec.location)
            });
        }
    }
}

fn pole_certification(level: Level, t: &mut Tally) {
    for case in s_cases(level) {
        let f = zeta(case.seq);
        let z = Cplx::from_c64(PREC, case.z);
        let Some(recs) = t.ok(f.poles_s(&z, &case.window, PoleCaps::x0()), || case.seq.to_string()) else {
            continue;
        };
        for rec in recs.iter().filter(|r| !r.removable) {
            if let Some(rep) =
                t.ok(f.residue_s(&z, rec, 0.0, &residue_opts()), || format!("residue at {}", rec.location))
            {
                certify_s(t, &f, &z, rec, &rep.value_at_x);
            }
        }
    }
    let zcases: [(&str, Complex64); 4] =
        [("doubling", c(1.0, 1.0)), ("fibonacci", c(2.0, 0.0)), ("fibonacci", c(1.0, 1.0)), ("doubling", c(2.0, 0.0))];
    for (seq, s) in zcases {
        let f = zeta(seq);
        let s = Cplx::from_c64(PREC, s);
        let w = ZWindow::Annulus { r0: 0.0, r1: 10.0 };
        let Some(recs) = t.ok(f.poles_z(&s, &w, PoleCaps::x0()), || seq.to_string()) else { continue };
        for rec in recs.iter().filter(|r| !r.removable) {
            if let Some(rep) =
                t.ok(f.residue_z(&s, rec, 0.0, &residue_opts()), || format!("residue at z={}", rec.location))
            {
                certify_z(t, &f, &s, rec, &rep.value_at_x);
            }
        }
    }
}

fn record_invariants(level: Level, t: &mut Tally) {
    let tol = group_tol(PREC);
    for case in s_cases(level) {
        let f = zeta(case.seq);
        let z = Cplx::from_c64(PREC, case.z);
        let caps = PoleCaps::default();
        let Some(recs) = t.ok(f.poles_s(&z, &case.window, caps), || case.seq.to_string()) else { continue };
        let la1 = f.binet.ln_alpha1();
        for rec in &recs {
            for m in &rec.members {
                // z^{-1} alpha_1^{s + j + k_1} prod_i alpha_i^{-e_i} == 1 at a lattice point
                let sj = rec.raw_location.add_real(&Float::with_val(PREC, m.j + m.k.k1()));
                let mut g = &sj.exp_times(&la1) * &z.recip();
                for (i, e) in m.k.exponents().into_iter().enumerate() {
                    g = &g * &f.binet.alpha(i + 1).powi(-(e as i64));
                }
                t.check((g.to_c64() - 1.0).norm() <= tol, || format!("{} member {m}: {g}", case.seq));
            }
            if rec.removable {
                continue;
            }
            let opts = ResidueOptions { numeric: false, ..residue_opts() };
            if let Some(rep) = t.ok(f.residue_s(&z, rec, 0.5, &opts), || format!("residue at {}", rec.location)) {
                let j0 = poles_residues::j0_s(&f.binet, &z, &rec.location).max(0) as usize;
                t.check(rep.coefficients.len() <= j0 + 1, || {
                    format!("degree {} > j0 {j0}", rep.coefficients.len() - 1)
                });
            }
        }
    }
}

fn non_pole_certification(level: Level, t: &mut Tally) {
    let mut rng = rng_for("non_pole_certification");
    let n = level.pick(15, 50);
    for case in s_cases(level) {
        let f = zeta(case.seq);
        let z = Cplx::from_c64(PREC, case.z);
        let Some(recs) = t.ok(f.poles_s(&z, &case.window, PoleCaps::x0()), || case.seq.to_string()) else { continue };
        let locs: Vec<Complex64> = recs.iter().map(|r| r.location.to_c64()).collect();
        let w = case.window;
        let mut done = 0;
        while done < n {
            let s = c(rng.gen_range(w.re0..w.re1), rng.gen_range(w.im0..w.im1));
            if locs.iter().any(|l| (l - s).norm() < 0.1) {
                continue;
            }
            done += 1;
            match eval_continued_x0(&f.norm, &f.binet, &params(case.z, s, 0.0)) {
                Ok(r) => {
                    let v = r.value.abs_f64();
                    t.check(v.is_finite() && v < 1e12 && r.error_bound.is_finite(), || {
                        format!("{} s={s}: |phi|={v}", case.seq)
                    })
                }
                Err(e) => t.fail(format!("{} s={s}: {e}", case.seq)),
            }
        }
    }
}

fn translation(level: Level, t: &mut Tally) {
    let f = zeta("fibonacci");
    let one = Cplx::one(PREC);
    let theta = std::f64::consts::FRAC_PI_3;
    let z2 = Cplx::from_c64(PREC, Complex64::from_polar(1.0, theta));
    let w = match level {
        Level::Quick => SWindow { re0: -4.5, re1: 0.5, im0: -7.0, im1: 7.0 },
        Level::Full => SWindow { re0: -9.0, re1: 1.0, im0: -30.0, im1: 30.0 },
    };
    let shift = theta / f.binet.ln_alpha1().to_f64();
    let Some(recs) = t.ok(f.poles_s(&one, &w, PoleCaps::x0()), || "z=1 poles".into()) else { return };
    for rec in recs.iter().filter(|r| !r.removable) {
        let s0 = rec.location.to_c64();
        let target = SWindow::around(s0 + c(0.0, shift), 1e-6);
        let Some(moved) = t.ok(f.poles_s(&z2, &target, PoleCaps::x0()), || format!("translated {s0}")) else {
            continue;
        };
        let Some(m) = moved.first() else {
            t.fail(format!("no translated pole near {}", s0 + c(0.0, shift)));
            continue;
        };
        let a = t.ok(poles_residues::numeric_residue_s(&f.norm, &f.binet, &one, &rec.location), || format!("at {s0}"));
        let b = t.ok(poles_residues::numeric_residue_s(&f.norm, &f.binet, &z2, &m.location), || {
            format!("at {}", m.location)
        });
        let (Some(a), Some(b)) = (a, b) else { continue };
        let rel = (&a - &b).abs_f64() / a.abs_f64();
        t.check(rel <= 1e-6, || format!("s0={s0}: residue {a} at z=1 vs {b} at z=e^(i pi/3) (rel {rel:.3e})"));
    }
}

fn z_one_reduction(level: Level, t: &mut Tally) {
    // Fibonacci: alpha_2 = -1/alpha_1, so the lattice is -2 k_1 + i (k_1 + 2 n) pi / log alpha_1.
    let f = zeta("fibonacci");
    let la1 = ((1.0 + 5f64.sqrt()) / 2.0).ln();
    let w = SWindow { re0: -9.0, re1: 1.0, im0: -30.0, im1: 30.0 };
    let mut want = vec![];
    for k1 in 0..=4i64 {
        for n in -20..=20i64 {
            let s = c(-2.0 * k1 as f64, (k1 + 2 * n) as f64 * std::f64::consts::PI / la1);
            if w.contains(s, 0.0) {
                want.push(s);
            }
        }
    }
    compare_lattice(t, "fibonacci", &f, &w, want);

    // Tribonacci: direct f64 evaluation of the lattice formula.
    let f = zeta("tribonacci");
    let w = match level {
        Level::Quick => SWindow { re0: -3.0, re1: 0.5, im0: -10.0, im1: 10.0 },
        Level::Full => SWindow { re0: -6.0, re1: 0.5, im0: -25.0, im1: 25.0 },
    };
    let a: Vec<Complex64> = f.binet.roots.iter().map(|r| r.value.to_c64()).collect();
    let la1 = a[0].re.ln();
    let mut want = vec![];
    for k1 in 0..=30u32 {
        for k2 in 0..=k1 {
            let w_c = a[1].powu(k1 - k2) * a[2].powu(k2) / a[0].powu(k1);
            let re = w_c.norm().ln() / la1;
            for n in -100..=100i64 {
                let s = c(re, (w_c.arg() + 2.0 * std::f64::consts::PI * n as f64) / la1);
                if w.contains(s, 0.0) {
                    want.push(s);
                }
            }
        }
    }
    compare_lattice(t, "tribonacci", &f, &w, want);
}

fn compare_lattice(t: &mut Tally, name: &str, f: &LerchZeta, w: &SWindow, mut want: Vec<Complex64>) {
    let Some(recs) = t.ok(f.poles_s(&Cplx::one(PREC), w, PoleCaps::x0()), || name.into()) else { return };
    let got: Vec<Complex64> = recs.iter().map(|r| r.location.to_c64()).collect();
    t.check(got.len() == want.len(), || format!("{name}: {} records, {} lattice points", got.len(), want.len()));
    for g in &got {
        let pos = want.iter().position(|p| (p - g).norm() < 1e-9);
        t.check(pos.is_some(), || format!("{name}: unexpected record at {g}"));
        if let Some(i) = pos {
            want.swap_remove(i);
        }
    }
    for p in want {
        t.fail(format!("{name}: missing lattice point {p}"));
    }
}

// special_values

fn fractions(level: Level, t: &mut Tally) {
    let mut cases: Vec<(&str, u32)> =
        vec![("fibonacci", 1), ("fibonacci", 2), ("fibonacci", 3), ("doubling", 1), ("doubling", 2)];
    if level == Level::Full {
        cases.extend([
            ("lucas", 1),
            ("lucas", 2),
            ("lucas", 3),
            ("pell", 1),
            ("pell", 2),
            ("pell", 3),
            ("doubling", 3),
            ("tribonacci", 1),
        ]);
    }
    let bound = Float::with_val(PREC, Float::i_exp(1, -(PREC as i32) / 2));
    for (seq, m) in cases {
        let Some(v) = t.ok(value_at_negative_integer(&zeta(seq), m), || format!("{seq} m={m}")) else { continue };
        match (&v.rational, v.confirmed) {
            (Some(q), true) => {
                let g = Integer::from(q.numerator.gcd_ref(&q.denominator));
                let d = Float::with_val(PREC, &v.value.re - Float::with_val(PREC, &q.numerator) / &q.denominator).abs();
                t.check(d < bound && q.denominator > 0 && (g == 1 || q.numerator == 0), || {
                    format!("{seq} m={m}: {q} off by {}", d.to_f64())
                });
            }
            _ => t.fail(format!("{seq} m={m}: no confirmed fraction ({:?})", v.failure)),
        }
    }
}

fn pole_avoidance(_: Level, t: &mut Tally) {
    for (seq, m) in
        [("fibonacci", 0u32), ("fibonacci", 4), ("fibonacci", 8), ("pell", 4), ("doubling", 0), ("fibonacci", 2)]
    {
        let f = zeta(seq);
        let target = -(m as f64);
        let w = SWindow::around(c(target, 0.0), 0.25);
        let flagged = f
            .poles_s(&Cplx::one(PREC), &w, PoleCaps::x0())
            .map(|r| r.iter().any(|p| !p.removable && p.location.is_real()))
            .unwrap_or(false);
        let r = value_at_negative_integer(&f, m);
        t.check(flagged == matches!(r, Err(Error::IsPole { .. })), || {
            format!("{seq} m={m}: flagged={flagged} but got {:?}", r.map(|v| v.value.to_c64()))
        });
    }
}

// corpus

fn builtins(_: Level, t: &mut Tally) {
    for e in corpus::builtin_corpus() {
        t.check(e.unsupported.is_none(), || format!("{}: {:?}", e.name(), e.unsupported));
        match LerchZeta::new(e.spec.clone(), PREC) {
            Ok(z) => t.check(z.norm.n0 <= 3, || format!("{}: n0 = {}", e.name(), z.norm.n0)),
            Err(err) => t.fail(format!("{}: {err}", e.name())),
        }
    }
}
