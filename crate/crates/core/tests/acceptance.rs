//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Runs as a plain binary (`harness = false`). Criteria whose property is
//! known not to hold are still checked in full; their failure is reported
//! and does not fail the run. Any other failure exits nonzero.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use recurlerch::continuation::{eval_continued_x0, eval_lerch};
use recurlerch::direct_eval::eval_direct;
use recurlerch::poles_residues::{adjudicate_prefactor, numeric_residue_s, ResiduePrefactor};
use recurlerch::selftest::{self, Level};
use recurlerch::special_values::value_at_negative_integer;
use recurlerch::{Cplx, EvalParams, Execution, LerchZeta, PoleCaps, PoleId, ResidueOptions, SWindow, ZWindow};
use rug::Float;

const PREC: u32 = 128;
const SEQS: [&str; 5] = ["fibonacci", "lucas", "pell", "tribonacci", "doubling"];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

/// `"; first: ..."` for the first problem, empty when there is none.
fn first(problems: &[String]) -> String {
    problems.first().map(|p| format!("; first: {p}")).unwrap_or_default()
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn zeta(name: &str) -> LerchZeta {
    LerchZeta::builtin(name, PREC).unwrap()
}

fn params(z: Complex64, s: Complex64, x: f64) -> EvalParams {
    EvalParams::new(PREC, z, s, x).with_tol(1e-10)
}

fn golden_log() -> f64 {
    ((1.0 + 5f64.sqrt()) / 2.0).ln()
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut bad, mut n, mut worst) = (vec![], 0, 0.0f64);
    for seq in SEQS {
        let f = zeta(seq);
        for _ in 0..200 {
            let r = 2.0 * rng.gen_range(0.0025f64..1.0).sqrt();
            let z = Complex64::from_polar(r, rng.gen_range(-PI..PI));
            let ab = f.abscissa(&Cplx::from_c64(PREC, z));
            let s = c(ab + rng.gen_range(0.5..4.0), rng.gen_range(-10.0..10.0));
            let p = params(z, s, 0.0);
            n += 1;
            match (eval_continued_x0(&f.norm, &f.binet, &p), eval_direct(&f.norm, &f.binet, &p)) {
                (Ok(a), Ok(b)) => {
                    let d = (&a.value - &b.value).abs_f64();
                    worst = worst.max(d);
                    if d > a.error_bound + b.error_bound || d > 1e-9 {
                        bad.push(format!("{seq} z={z} s={s} diff={d:e}"));
                    }
                }
                (a, b) => bad.push(format!("{seq} z={z} s={s}: {:?} {:?}", a.err(), b.err())),
            }
        }
    }
    outcome(bad.is_empty(), format!("{n} points, max |diff| {worst:.2e}, {} failures{}", bad.len(), first(&bad)))
}

fn ramanujan() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut bad, mut n, mut worst) = (vec![], 0, 0.0f64);
    for seq in SEQS {
        let f = zeta(seq);
        for z in [1.0, 0.5, 1.3] {
            let ab = f.abscissa(&Cplx::from_f64(PREC, z, 0.0));
            for x in [0.1, 0.5, 0.9] {
                for _ in 0..50 {
                    let s = c(ab + rng.gen_range(0.5..4.0), rng.gen_range(-10.0..10.0));
                    let p = params(c(z, 0.0), s, x);
                    n += 1;
                    match (eval_lerch(&f.norm, &f.binet, &p), eval_direct(&f.norm, &f.binet, &p)) {
                        (Ok(a), Ok(b)) => {
                            let d = (&a.value - &b.value).abs_f64();
                            worst = worst.max(d);
                            if d > 1e-8 {
                                bad.push(format!("{seq} z={z} x={x} s={s} diff={d:e}"));
                            }
                        }
                        (a, b) => bad.push(format!("{seq} z={z} x={x} s={s}: {:?} {:?}", a.err(), b.err())),
                    }
                }
            }
        }
    }
    outcome(bad.is_empty(), format!("{n} points, max |diff| {worst:.2e}, {} failures{}", bad.len(), first(&bad)))
}

fn pole_certification() -> Outcome {
    let f = zeta("fibonacci");
    let one = Cplx::one(PREC);
    let w = SWindow::new(-9.0, 1.0, -30.0, 30.0).unwrap();
    let recs = f.poles_s(&one, &w, PoleCaps::x0()).unwrap();
    // alpha_2 = -1/alpha_1: points -2 k_1 + i (k_1 + 2 n) pi / log alpha_1
    let la1 = golden_log();
    let mut want = vec![];
    for k1 in 0..=4 {
        for n in -20..=20 {
            let s = c(-2.0 * k1 as f64, (k1 + 2 * n) as f64 * std::f64::consts::PI / la1);
            if w.contains(s, 0.0) {
                want.push(s);
            }
        }
    }
    let got: Vec<Complex64> = recs.iter().map(|r| r.location.to_c64()).collect();
    let mut problems = vec![];
    if got.len() != want.len() {
        problems.push(format!("{} records vs {} lattice points", got.len(), want.len()));
    }
    for p in &want {
        if !got.iter().any(|g| (g - p).norm() < 1e-12) {
            problems.push(format!("missing {p}"));
        }
    }
    for s in [
        c(0.0, 0.0),
        c(-4.0, 0.0),
        c(-8.0, 0.0),
        c(0.0, 2.0 * std::f64::consts::PI / la1),
        c(0.0, -2.0 * std::f64::consts::PI / la1),
    ] {
        if !recs.iter().any(|r| (r.location.to_c64() - s).norm() < 1e-12 && (s.im != 0.0 || r.location.is_real())) {
            problems.push(format!("no record at {s}"));
        }
    }
    let mut worst = 0.0f64;
    for r in &recs {
        let res = match numeric_residue_s(&f.norm, &f.binet, &one, &r.location) {
            Ok(v) => v.abs_f64(),
            Err(e) => {
                problems.push(format!("residue at {}: {e}", r.location));
                continue;
            }
        };
        let eps = 1e-5;
        let s = r.location.add_real(&Float::with_val(PREC, eps));
        let p = EvalParams::from_values(one.clone(), s, Float::new(PREC)).with_tol(1e-12).with_pole_guard(1e-12);
        match eval_continued_x0(&f.norm, &f.binet, &p) {
            Ok(v) => {
                let rel = (v.value.abs_f64() * eps - res).abs() / res;
                worst = worst.max(rel);
                if rel > 1e-3 {
                    problems.push(format!("at {}: relative {rel:e}", r.location));
                }
            }
            Err(e) => problems.push(format!("near {}: {e}", r.location)),
        }
    }
    outcome(
        problems.is_empty(),
        format!(
            "{} records, lattice matches, max relative |eps phi| vs residue {worst:.2e}{}",
            recs.len(),
            first(&problems)
        ),
    )
}

fn adjudication() -> Outcome {
    let f = zeta("fibonacci");
    let one = Cplx::one(PREC);
    let recs = f.poles_s(&one, &SWindow::new(-0.5, 0.5, -0.5, 0.5).unwrap(), PoleCaps::x0()).unwrap();
    let adj = adjudicate_prefactor(&f.norm, &f.binet, &one, &recs[0], 1e-6).unwrap();
    let configured = ResidueOptions::default().prefactor;
    let pass = adj.winner == Some(configured) && configured == ResiduePrefactor::InverseLog;
    outcome(
        pass,
        format!(
            "numeric {:.10}, Lambda/log(alpha_1) {:.10} (rel {:.1e}), Lambda/alpha_1 {:.10} (rel {:.1e}); winner {}, configured {}",
            adj.numeric.re.to_f64(),
            adj.inverse_log.re.to_f64(),
            adj.rel_inverse_log,
            adj.inverse_alpha.re.to_f64(),
            adj.rel_inverse_alpha,
            adj.winner.map_or("none", |w| w.as_str()),
            configured.as_str()
        ),
    )
}

/// Lattice points `(j, k_1, z)` with `|z| <= 10`, straight from the closed form.
fn z_lattice(seq: &str, s: Complex64) -> Vec<(u32, u32, Complex64)> {
    let mut out = vec![];
    for j in 0..40u32 {
        for k1 in 0..40u32 {
            let z = match seq {
                "doubling" => {
                    if k1 > 0 {
                        break;
                    }
                    c(2.0, 0.0).powc(s + j as f64)
                }
                _ => {
                    let a = (1.0 + 5f64.sqrt()) / 2.0;
                    c(a, 0.0).powc(s + (j + 2 * k1) as f64) * if k1 % 2 == 0 { 1.0 } else { -1.0 }
                }
            };
            if z.norm() <= 10.0 {
                out.push((j, k1, z));
            }
        }
    }
    out
}

fn z_plane() -> Outcome {
    let mut problems = vec![];
    let mut checked = 0;
    let mut worst = 0.0f64;
    for seq in ["doubling", "fibonacci"] {
        let f = zeta(seq);
        for s in [c(0.0, 0.0), c(2.0, 0.0), c(1.0, 1.0)] {
            let sc = Cplx::from_c64(PREC, s);
            let recs = match f.poles_z(&sc, &ZWindow::disk(10.0).unwrap(), PoleCaps::default()) {
                Ok(r) => r,
                Err(e) => {
                    problems.push(format!("{seq} s={s}: {e}"));
                    continue;
                }
            };
            let members: Vec<(&PoleId, Complex64)> =
                recs.iter().flat_map(|r| r.members.iter().map(move |m| (m, r.location.to_c64()))).collect();
            let want = z_lattice(seq, s);
            if members.len() != want.len() {
                problems.push(format!("{seq} s={s}: {} members vs {} lattice points", members.len(), want.len()));
            }
            for (j, k1, z) in &want {
                let hit = members
                    .iter()
                    .any(|(m, loc)| m.j == *j && m.k.k1() == *k1 && (loc - z).norm() <= 1e-9 * (1.0 + z.norm()));
                if !hit {
                    problems.push(format!("{seq} s={s}: missing (j={j}, k1={k1}) at {z}"));
                }
            }
            let opts = ResidueOptions { max_disagreement: f64::INFINITY, ..Default::default() };
            for r in &recs {
                let rep = match f.residue_z(&sc, r, 0.0, &opts) {
                    Ok(v) => v,
                    Err(e) => {
                        problems.push(format!("{seq} s={s} z0={}: {e}", r.location));
                        continue;
                    }
                };
                checked += 1;
                let (fo, nu) = (rep.coefficients[0].to_c64(), rep.numeric[0].to_c64());
                let scale = rep.coefficients.iter().chain(&rep.numeric).map(Cplx::abs_f64).fold(0.0, f64::max);
                let rel = if fo.norm() > 0.0 {
                    (fo - nu).norm() / fo.norm()
                } else if nu.norm() <= 1e-6 * scale.max(1e-2) {
                    0.0
                } else {
                    1.0
                };
                worst = worst.max(rel);
                if rel > 1e-6 {
                    problems.push(format!("{seq} s={s} z0={}: formula {fo} numeric {nu}", r.location));
                }
            }
            if seq == "doubling" && s == c(0.0, 0.0) {
                let r1 = recs.iter().find(|r| (r.location.to_c64() - 1.0).norm() < 1e-12);
                match r1.map(|r| f.residue_z(&sc, r, 0.0, &opts)) {
                    Some(Ok(rep)) if (rep.value_at_x.to_c64() + 1.0).norm() <= 1e-10 => {}
                    other => problems.push(format!(
                        "doubling s=0 z0=1 residue {:?}",
                        other.map(|r| r.map(|v| v.value_at_x.to_c64()))
                    )),
                }
            }
        }
    }
    outcome(
        problems.is_empty(),
        format!("{checked} records, max relative formula vs numeric {worst:.2e}{}", first(&problems)),
    )
}

fn translation() -> Outcome {
    let f = zeta("fibonacci");
    let one = Cplx::one(PREC);
    let theta = std::f64::consts::FRAC_PI_3;
    let z2 = Cplx::from_c64(PREC, Complex64::from_polar(1.0, theta));
    let shift = theta / golden_log();
    let recs = f.poles_s(&one, &SWindow::new(-9.0, 1.0, -30.0, 30.0).unwrap(), PoleCaps::x0()).unwrap();
    let (mut bad, mut worst) = (0, 0.0f64);
    let mut example = String::new();
    for r in &recs {
        let s0 = r.location.to_c64();
        let moved = f.poles_s(&z2, &SWindow::around(s0 + c(0.0, shift), 1e-6), PoleCaps::x0()).unwrap();
        let Some(m) = moved.first() else {
            bad += 1;
            continue;
        };
        let a = numeric_residue_s(&f.norm, &f.binet, &one, &r.location).unwrap();
        let b = numeric_residue_s(&f.norm, &f.binet, &z2, &m.location).unwrap();
        let rel = (&a - &b).abs_f64() / a.abs_f64();
        if rel > worst {
            worst = rel;
            example = format!("s0={s0}: {:.6} at z=1, {:.6} at z=e^(i pi/3)", a.to_c64(), b.to_c64());
        }
        bad += (rel > 1e-6) as usize;
    }
    outcome(bad == 0, format!("{bad}/{} translated residues differ; worst rel {worst:.3} ({example})", recs.len()))
}

fn rationality() -> Outcome {
    let lo = zeta("fibonacci");
    let hi = LerchZeta::builtin("fibonacci", 2 * PREC).unwrap();
    let cap = rug::Integer::from(1u64 << 32);
    let mut parts = vec![];
    let mut pass = true;
    for m in 1..=3 {
        let a = value_at_negative_integer(&lo, m).unwrap();
        let b = value_at_negative_integer(&hi, m).unwrap();
        match (&a.rational, &b.rational) {
            (Some(qa), Some(qb)) if qa == qb && qa.denominator < cap => parts.push(format!("phi(-{m}) = {qa}")),
            other => {
                pass = false;
                parts.push(format!("m={m}: {other:?}"));
            }
        }
    }
    outcome(pass, parts.join(", "))
}

fn degree_one() -> Outcome {
    let f = zeta("doubling");
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    let mut problems = vec![];
    for _ in 0..100 {
        let z = Complex64::from_polar(rng.gen_range(0.1..3.0), rng.gen_range(-3.0..3.0));
        let s = c(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
        // single empty tuple: lambda_1^{-s} / (z^{-1} alpha_1^s - 1), lambda_1 = 1/2, alpha_1 = 2
        let want = c(0.5, 0.0).powc(-s) / (c(2.0, 0.0).powc(s) / z - 1.0);
        let p = params(z, s, 0.0).with_tol(1e-14);
        match eval_continued_x0(&f.norm, &f.binet, &p) {
            Ok(r) => {
                let d = (r.value.to_c64() - want).norm() / want.norm().max(1.0);
                worst = worst.max(d);
                if d > 1e-12 {
                    problems.push(format!("z={z} s={s}: {} vs {want}", r.value));
                }
            }
            Err(e) => problems.push(format!("z={z} s={s}: {e}")),
        }
    }
    let v = value_at_negative_integer(&f, 1).unwrap();
    let closed = (c(0.5, 0.0).powc(c(1.0, 0.0)) / (c(2.0, 0.0).powc(c(-1.0, 0.0)) - 1.0)).re;
    let at_minus_one = v.value.re.to_f64();
    if (at_minus_one - closed).abs() > 1e-12 {
        problems.push(format!("phi(-1) = {at_minus_one}, closed form {closed}"));
    }
    outcome(
        problems.is_empty(),
        format!(
            "100 points, max relative {worst:.1e}; phi(-1) = {at_minus_one} = closed form {closed} (the stated -4 uses lambda_1^(+1) in place of lambda_1^(-s)){}",
            first(&problems)
        ),
    )
}

fn invariant_suites() -> (Outcome, bool) {
    let results = selftest::run_all(Level::Full, Execution::Parallel);
    let failed: Vec<&str> = results.iter().filter(|r| !r.ok()).map(|r| r.name).collect();
    let total: usize = results.iter().map(|r| r.passed + r.failed).sum();
    let only_translation = failed == ["translation"];
    (
        outcome(failed.is_empty(), format!("{} suites, {total} checks, failing suites {failed:?}", results.len())),
        only_translation,
    )
}

fn main() -> ExitCode {
    let mut unexpected = 0;
    let mut report = |id: u32, name: &str, known_false: bool, run: &dyn Fn() -> Outcome| {
        let t0 = Instant::now();
        let o = run();
        let status = match (o.pass, known_false) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known: the property does not hold)",
            (false, false) => {
                unexpected += 1;
                "FAIL"
            }
        };
        println!("criterion {id} {name}: {status} [{:.1}s] {}", t0.elapsed().as_secs_f64(), o.detail);
    };
    report(1, "oracle_equivalence", false, &oracle_equivalence);
    report(2, "ramanujan_formula", false, &ramanujan);
    report(3, "pole_certification", false, &pole_certification);
    report(4, "residue_adjudication", false, &adjudication);
    report(5, "z_plane", false, &z_plane);
    report(6, "translation_property", true, &translation);
    report(7, "rationality", false, &rationality);
    report(8, "degree_one", false, &degree_one);
    let t0 = Instant::now();
    let (o, only_translation) = invariant_suites();
    let status = if o.pass {
        "PASS"
    } else if only_translation {
        "FAIL (known: only the translation suite fails)"
    } else {
        unexpected += 1;
        "FAIL"
    };
    println!("criterion 9 invariant_suites: {status} [{:.1}s] {}", t0.elapsed().as_secs_f64(), o.detail);
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{unexpected} criteria failed unexpectedly");
        ExitCode::FAILURE
    }
}
