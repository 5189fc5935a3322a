//! Pole lattices in the s- and z-planes, grouping of coincident lattice
//! points, and residues by closed formula and by numeric limit.
//!
//! s-plane points of `phi(z, ., x)`:
//!
//! ```text
//! s = -j + (log|z| + sum_i e_i log|alpha_i|) / log alpha_1 - k_1
//!        + i (arg z + sum_i e_i arg alpha_i + 2 pi n) / log alpha_1
//! ```
//!
//! z-plane points of `phi(., s, x)`: `alpha_1^{s+j+k_1} prod_i alpha_i^{-e_i}`.
//! Here `e_i = k_{i-1} - k_i` and `arg` is the principal argument.

use std::fmt;

use num_complex::Complex64;
use rug::Float;

use crate::algebraic::BinetData;
use crate::continuation::{binom_complex, eval_continued_x0, lambda_coeff_unshifted, lattice_phase, MultiIndex};
use crate::direct_eval::EvalParams;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::mp::{self, Cplx};
use crate::recurrence::NormalizedRecurrence;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Plane {
    S,
    Z,
}

impl Plane {
    pub fn as_str(self) -> &'static str {
        match self {
            Plane::S => "s",
            Plane::Z => "z",
        }
    }
}

/// Lattice coordinates of one pole candidate. `n` is always 0 in the z-plane.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PoleId {
    pub plane: Plane,
    pub j: u32,
    pub n: i64,
    pub k: MultiIndex,
}

impl fmt::Display for PoleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.plane {
            Plane::S => write!(f, "s[j={},n={},k={}]", self.j, self.n, self.k),
            Plane::Z => write!(f, "z[j={},k={}]", self.j, self.k),
        }
    }
}

/// Which prefactor turns `sum L_k(s0)` into the s-plane residue.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ResiduePrefactor {
    /// `1 / log alpha_1`, from differentiating the denominator.
    #[default]
    InverseLog,
    /// `1 / alpha_1`, as stated in the literature formula.
    InverseAlpha,
}

impl ResiduePrefactor {
    pub fn as_str(self) -> &'static str {
        match self {
            ResiduePrefactor::InverseLog => "1/log(alpha_1)",
            ResiduePrefactor::InverseAlpha => "1/alpha_1",
        }
    }

    fn factor(self, binet: &BinetData) -> Float {
        let p = binet.precision_bits;
        let den = match self {
            ResiduePrefactor::InverseLog => binet.ln_alpha1(),
            ResiduePrefactor::InverseAlpha => binet.alpha1().clone(),
        };
        Float::with_val(p, Float::with_val(p, 1) / &den)
    }
}

/// Residue of `phi` at one record as a polynomial in `x`.
#[derive(Clone, Debug)]
pub struct ResidueReport {
    pub prefactor: ResiduePrefactor,
    /// Coefficient of `x^j`, closed form with the configured prefactor.
    pub coefficients: Vec<Cplx>,
    /// Same with the `1/alpha_1` prefactor (s-plane); equal to
    /// `coefficients` in the z-plane.
    pub literal_coefficients: Vec<Cplx>,
    /// Numeric-limit value of each coefficient; empty when not computed.
    pub numeric: Vec<Cplx>,
    pub x: f64,
    pub value_at_x: Cplx,
    pub numeric_at_x: Option<Cplx>,
    /// Largest relative formula-vs-numeric discrepancy over coefficients.
    pub agreement: f64,
}

#[derive(Clone, Debug)]
pub struct PoleRecord {
    /// Location with `Im` snapped to zero when below the grouping tolerance.
    pub location: Cplx,
    pub raw_location: Cplx,
    pub members: Vec<PoleId>,
    /// Every member has an exactly vanishing numerator.
    pub removable: bool,
    pub residue: Option<ResidueReport>,
}

impl PoleRecord {
    pub fn plane(&self) -> Plane {
        self.members[0].plane
    }
}

/// Closed rectangle in the s-plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SWindow {
    pub re0: f64,
    pub re1: f64,
    pub im0: f64,
    pub im1: f64,
}

impl SWindow {
    pub fn new(re0: f64, re1: f64, im0: f64, im1: f64) -> Result<Self> {
        let ok = [re0, re1, im0, im1].iter().all(|v| v.is_finite()) && re0 <= re1 && im0 <= im1;
        if !ok {
            return Err(Error::InvalidSpec(format!(
                "window [{re0}, {re1}] x [{im0}, {im1}] is not a bounded rectangle"
            )));
        }
        Ok(SWindow { re0, re1, im0, im1 })
    }

    /// Square of half-width `h` around `c`.
    pub fn around(c: Complex64, h: f64) -> Self {
        SWindow { re0: c.re - h, re1: c.re + h, im0: c.im - h, im1: c.im + h }
    }

    pub fn contains(&self, s: Complex64, slack: f64) -> bool {
        s.re >= self.re0 - slack && s.re <= self.re1 + slack && s.im >= self.im0 - slack && s.im <= self.im1 + slack
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ZWindow {
    Rect { re0: f64, re1: f64, im0: f64, im1: f64 },
    Annulus { r0: f64, r1: f64 },
}

impl ZWindow {
    pub fn rect(re0: f64, re1: f64, im0: f64, im1: f64) -> Result<Self> {
        let w = SWindow::new(re0, re1, im0, im1)?;
        Ok(ZWindow::Rect { re0: w.re0, re1: w.re1, im0: w.im0, im1: w.im1 })
    }

    pub fn annulus(r0: f64, r1: f64) -> Result<Self> {
        if !(r0.is_finite() && r1.is_finite() && 0.0 <= r0 && r0 <= r1) {
            return Err(Error::InvalidSpec(format!("annulus {r0}..{r1} is invalid")));
        }
        Ok(ZWindow::Annulus { r0, r1 })
    }

    pub fn disk(r: f64) -> Result<Self> {
        ZWindow::annulus(0.0, r)
    }

    pub fn max_modulus(&self) -> f64 {
        match *self {
            ZWindow::Rect { re0, re1, im0, im1 } => {
                let x = re0.abs().max(re1.abs());
                let y = im0.abs().max(im1.abs());
                x.hypot(y)
            }
            ZWindow::Annulus { r1, .. } => r1,
        }
    }

    pub fn contains(&self, z: Complex64, slack: f64) -> bool {
        match *self {
            ZWindow::Rect { re0, re1, im0, im1 } => SWindow { re0, re1, im0, im1 }.contains(z, slack),
            ZWindow::Annulus { r0, r1 } => {
                let r = z.norm();
                r >= r0 - slack && r <= r1 + slack
            }
        }
    }
}

/// Truncation caps. `j_cap = Some(0)` asks for the poles of `phi(z, s, 0)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PoleCaps {
    pub k_cap: Option<u32>,
    pub j_cap: Option<u32>,
}

impl PoleCaps {
    pub fn x0() -> Self {
        PoleCaps { k_cap: None, j_cap: Some(0) }
    }
}

/// Grouping tolerance: `1e-9` at 128 bits, tightening with precision.
pub fn group_tol(prec: u32) -> f64 {
    1e-9 * 2f64.powf(-(prec as f64 - 128.0) * 30.0 / 128.0)
}

fn snap(loc: &Cplx, tol: f64) -> Cplx {
    let mut out = loc.clone();
    if loc.im.to_f64().abs() < tol {
        out.im = Float::new(loc.prec());
    }
    out
}

/// Additionally snaps the real part to an integer on the real axis, so that
/// binomial factors vanish exactly where they should.
fn exact_point(loc: &Cplx, tol: f64) -> Cplx {
    let mut out = snap(loc, tol);
    if out.im.is_zero() {
        let r = Float::with_val(out.prec(), out.re.round_ref());
        if Float::with_val(out.prec(), &out.re - &r).to_f64().abs() < tol {
            out.re = r;
        }
    }
    out
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn find(&mut self, i: usize) -> usize {
        let mut r = i;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut c = i;
        while self.0[c] != r {
            let next = self.0[c];
            self.0[c] = r;
            c = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Deduplicates by id and merges candidates whose locations lie within
/// `group_tol` of each other (transitively). Records come back sorted by
/// real then imaginary part; `removable` is left false.
pub fn tau_group(mut candidates: Vec<(PoleId, Cplx)>, group_tol: f64) -> Vec<PoleRecord> {
    candidates.sort_by(|a, b| a.0.cmp(&b.0));
    candidates.dedup_by(|a, b| a.0 == b.0);
    let locs: Vec<Complex64> = candidates.iter().map(|c| c.1.to_c64()).collect();
    let mut order: Vec<usize> = (0..candidates.len()).collect();
    order.sort_by(|&a, &b| locs[a].re.total_cmp(&locs[b].re));
    let mut dsu = Dsu((0..candidates.len()).collect());
    for (pos, &a) in order.iter().enumerate() {
        for &b in &order[pos + 1..] {
            if locs[b].re - locs[a].re > group_tol {
                break;
            }
            if candidates[a].1.distance(&candidates[b].1).to_f64() <= group_tol {
                dsu.union(a, b);
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..candidates.len() {
        let r = dsu.find(i);
        groups.entry(r).or_default().push(i);
    }
    let mut records: Vec<PoleRecord> = groups
        .into_values()
        .map(|idx| {
            let raw = candidates[idx[0]].1.clone();
            PoleRecord {
                location: snap(&raw, group_tol),
                raw_location: raw,
                members: idx.iter().map(|&i| candidates[i].0.clone()).collect(),
                removable: false,
                residue: None,
            }
        })
        .collect();
    records.sort_by(|a, b| {
        let (x, y) = (a.location.to_c64(), b.location.to_c64());
        x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im))
    });
    records
}

/// Largest `ln |alpha_i|` over `i >= 2`, inflated by the root radius.
fn ln_sub(binet: &BinetData) -> f64 {
    binet.subdominant_modulus().ln()
}

/// Largest `k_1` a lattice point can have while its real part, before the
/// `-j` shift, stays above `re_floor`.
fn k1_needed(binet: &BinetData, top: f64, re_floor: f64) -> Option<u32> {
    if top < re_floor {
        return None;
    }
    if binet.degree() == 1 {
        return Some(0);
    }
    let la1 = binet.ln_alpha1().to_f64();
    let per = 1.0 - ln_sub(binet) / la1;
    Some(((top - re_floor) / per + 1e-9).floor() as u32)
}

/// Real part (without `-j`) of the s-lattice points of tuple `k`.
fn s_real_part(binet: &BinetData, ln_z: &Float, k: &MultiIndex) -> Float {
    let p = binet.precision_bits;
    let mut r = ln_z.clone();
    for (i, e) in k.exponents().into_iter().enumerate() {
        r += Float::with_val(p, mp::ln(&binet.alpha(i + 1).abs()) * e);
    }
    r /= binet.ln_alpha1();
    r -= k.k1();
    r
}

#[derive(Debug)]
struct Candidates {
    list: Vec<(PoleId, Cplx)>,
    max_k1: u32,
    max_j: u32,
}

fn s_candidates(binet: &BinetData, z: &Cplx, w: &SWindow, j_range: u32, tol: f64) -> Candidates {
    let p = binet.precision_bits;
    let la1 = binet.ln_alpha1();
    let ln_z = mp::ln(&z.with_prec(p).abs());
    let top = Float::with_val(p, &ln_z / &la1).to_f64();
    let two_pi = mp::two_pi(p);
    let mut out = Candidates { list: vec![], max_k1: 0, max_j: 0 };
    for j in 0..=j_range {
        let Some(kmax) = k1_needed(binet, top, w.re0 + j as f64 - tol) else {
            break;
        };
        for k1 in 0..=kmax {
            for k in MultiIndex::shell(binet.degree(), k1) {
                let re = Float::with_val(p, s_real_part(binet, &ln_z, &k) - j);
                let ref64 = re.to_f64();
                if ref64 < w.re0 - tol || ref64 > w.re1 + tol {
                    continue;
                }
                let theta = lattice_phase(binet, &z.with_prec(p), &k);
                let per = Float::with_val(p, &two_pi / &la1).to_f64();
                let base = Float::with_val(p, &theta / &la1).to_f64();
                let n_lo = ((w.im0 - base) / per).floor() as i64 - 1;
                let n_hi = ((w.im1 - base) / per).ceil() as i64 + 1;
                for n in n_lo..=n_hi {
                    let im = Float::with_val(p, &two_pi * n) + &theta;
                    let im = Float::with_val(p, im / &la1);
                    let loc = Cplx::from_parts(re.clone(), im);
                    if !w.contains(loc.to_c64(), tol) {
                        continue;
                    }
                    out.max_k1 = out.max_k1.max(k1);
                    out.max_j = out.max_j.max(j);
                    out.list.push((PoleId { plane: Plane::S, j, n, k: k.clone() }, loc));
                }
            }
        }
    }
    out
}

fn check_caps(c: &Candidates, caps: PoleCaps) -> Result<()> {
    if let Some(cap) = caps.k_cap {
        if c.max_k1 > cap && c.list.iter().any(|(id, _)| id.k.k1() > cap) {
            return Err(Error::CapTooSmall { which: "k", cap, needed: c.max_k1 });
        }
    }
    if let Some(cap) = caps.j_cap {
        if cap > 0 && c.max_j > cap {
            return Err(Error::CapTooSmall { which: "j", cap, needed: c.max_j });
        }
    }
    Ok(())
}

/// s-plane member is removable when `binom(-s0, j) L_k(s0 + j)` vanishes.
fn member_vanishes(base: &Cplx, id: &PoleId) -> bool {
    let p = base.prec();
    let sj = base.add_real(&Float::with_val(p, id.j));
    binom_complex(base, id.j).is_zero() || binom_complex(&sj, id.k.k1()).is_zero()
}

/// All s-plane lattice points of `phi(z, ., x)` inside `window`.
pub fn enumerate_poles_s(binet: &BinetData, z: &Cplx, window: &SWindow, caps: PoleCaps) -> Result<Vec<PoleRecord>> {
    if z.is_zero() {
        return Ok(vec![]);
    }
    let tol = group_tol(binet.precision_bits);
    let p = binet.precision_bits;
    let top = Float::with_val(p, mp::ln(&z.with_prec(p).abs()) / &binet.ln_alpha1()).to_f64();
    let j_needed = (top - window.re0 + tol).floor().max(-1.0);
    if j_needed < 0.0 {
        return Ok(vec![]);
    }
    let j_range = match caps.j_cap {
        Some(0) => 0,
        _ => j_needed as u32,
    };
    let cand = s_candidates(binet, z, window, j_range, tol);
    check_caps(&cand, caps)?;
    let mut records = tau_group(cand.list, tol);
    for r in &mut records {
        let base = exact_point(&r.raw_location, tol);
        r.removable = r.members.iter().all(|m| member_vanishes(&base, m));
    }
    Ok(records)
}

/// `(z - z0)`-free location of the z-plane point for `(j, k)`.
fn z_point(binet: &BinetData, s: &Cplx, j: u32, k: &MultiIndex) -> Cplx {
    let p = binet.precision_bits;
    let e1 = s.add_real(&Float::with_val(p, j + k.k1()));
    let mut z = e1.exp_times(&binet.ln_alpha1());
    for (i, e) in k.exponents().into_iter().enumerate() {
        z = &z * &binet.alpha(i + 1).powi(-(e as i64));
    }
    z
}

/// All z-plane lattice points of `phi(., s, x)` inside `window`.
pub fn enumerate_poles_z(binet: &BinetData, s: &Cplx, window: &ZWindow, caps: PoleCaps) -> Result<Vec<PoleRecord>> {
    let p = binet.precision_bits;
    let s = s.with_prec(p);
    let la1 = binet.ln_alpha1().to_f64();
    let sigma = s.re.to_f64();
    let r_max = window.max_modulus();
    let tol = group_tol(p) * (1.0 + r_max);
    if r_max <= 0.0 {
        return Ok(vec![]);
    }
    let ln_r = (r_max + tol).ln();
    let j_needed = (ln_r / la1 - sigma).floor();
    if j_needed < 0.0 {
        return Ok(vec![]);
    }
    let j_range = match caps.j_cap {
        Some(0) => 0,
        _ => j_needed as u32,
    };
    let per = if binet.degree() == 1 { f64::INFINITY } else { la1 - ln_sub(binet) };
    let ln_abs: Vec<f64> = (1..binet.degree()).map(|i| binet.alpha(i).abs_f64().ln()).collect();
    let mut cand = Candidates { list: vec![], max_k1: 0, max_j: 0 };
    for j in 0..=j_range {
        let room = ln_r - (sigma + j as f64) * la1;
        if room < 0.0 {
            break;
        }
        let kmax = if per.is_infinite() { 0 } else { (room / per + 1e-9).floor() as u32 };
        for k1 in 0..=kmax {
            for k in MultiIndex::shell(binet.degree(), k1) {
                let lm = (sigma + (j + k1) as f64) * la1
                    - k.exponents().iter().zip(&ln_abs).map(|(&e, l)| e as f64 * l).sum::<f64>();
                if lm > ln_r + 1e-9 {
                    continue;
                }
                let zp = z_point(binet, &s, j, &k);
                if !window.contains(zp.to_c64(), tol) {
                    continue;
                }
                cand.max_k1 = cand.max_k1.max(k1);
                cand.max_j = cand.max_j.max(j);
                cand.list.push((PoleId { plane: Plane::Z, j, n: 0, k }, zp));
            }
        }
    }
    check_caps(&cand, caps)?;
    let mut records = tau_group(cand.list, tol);
    for r in &mut records {
        r.removable = r.members.iter().all(|m| member_vanishes(&s, m));
    }
    Ok(records)
}

/// Neville extrapolation of `(eps_i, v_i)` to `eps = 0`.
pub fn richardson_zero(eps: &[f64], vals: &[Cplx]) -> Cplx {
    let n = eps.len();
    let p = vals[0].prec();
    let mut t: Vec<Cplx> = vals.to_vec();
    for m in 1..n {
        for i in 0..n - m {
            // t_i <- (eps_{i+m} t_i - eps_i t_{i+1}) / (eps_{i+m} - eps_i)
            let a = t[i].scale_f64(eps[i + m]);
            let b = t[i + 1].scale_f64(eps[i]);
            let d = Float::with_val(p, eps[i + m]) - eps[i];
            t[i] = (&a - &b).scale(&Float::with_val(p, Float::with_val(p, 1) / &d));
        }
    }
    t[0].clone()
}

pub const RICHARDSON_STEPS: [f64; 3] = [1e-3, 1e-4, 1e-5];

fn oracle_params(z: &Cplx, s: &Cplx, eps: f64) -> EvalParams {
    let prec = s.prec();
    EvalParams::from_values(z.clone(), s.clone(), Float::new(prec))
        .with_tol((1e-15 / eps).min(1e-6))
        .with_pole_guard(1e-14)
}

/// `lim_{eps -> 0} eps * phi(z, s0 + eps, 0)` by Richardson extrapolation.
pub fn numeric_residue_s(norm: &NormalizedRecurrence, binet: &BinetData, z: &Cplx, s0: &Cplx) -> Result<Cplx> {
    let p = binet.precision_bits;
    let mut vals = Vec::with_capacity(3);
    for eps in RICHARDSON_STEPS {
        let s = s0.with_prec(p).add_real(&Float::with_val(p, eps));
        let r = eval_continued_x0(norm, binet, &oracle_params(&z.with_prec(p), &s, eps))?;
        vals.push(r.value.scale_f64(eps));
    }
    Ok(richardson_zero(&RICHARDSON_STEPS, &vals))
}

/// `lim_{z -> z0} (z - z0) phi(z, s, 0)` along `z = z0 (1 + eps)`.
pub fn numeric_residue_z(norm: &NormalizedRecurrence, binet: &BinetData, s: &Cplx, z0: &Cplx) -> Result<Cplx> {
    let p = binet.precision_bits;
    let z0 = z0.with_prec(p);
    let mut vals = Vec::with_capacity(3);
    for eps in RICHARDSON_STEPS {
        let dz = z0.scale_f64(eps);
        let z = &z0 + &dz;
        let r = eval_continued_x0(norm, binet, &oracle_params(&z, &s.with_prec(p), eps))?;
        vals.push(&r.value * &dz);
    }
    Ok(richardson_zero(&RICHARDSON_STEPS, &vals))
}

#[derive(Clone, Copy, Debug)]
pub struct ResidueOptions {
    pub prefactor: ResiduePrefactor,
    /// Run the numeric-limit oracle for every coefficient.
    pub numeric: bool,
    /// Relative disagreement above which `ResidueDisagreement` is raised.
    pub max_disagreement: f64,
    pub exec: Execution,
}

impl Default for ResidueOptions {
    fn default() -> Self {
        ResidueOptions {
            prefactor: ResiduePrefactor::InverseLog,
            numeric: true,
            max_disagreement: 1e-4,
            exec: Execution::Sequential,
        }
    }
}

/// Coefficients below this absolute size count as vanishing.
const VANISHING: f64 = 1e-10;
/// Extrapolation noise relative to the largest coefficient.
const NOISE: f64 = 1e-6;

/// Largest per-coefficient discrepancy, each measured against the larger
/// of the two values or the noise floor of the whole polynomial.
fn agreement(formula: &[Cplx], numeric: &[Cplx]) -> f64 {
    let scale = formula.iter().chain(numeric).map(Cplx::abs_f64).fold(0.0, f64::max);
    if scale < 1e-20 {
        return 0.0;
    }
    let floor = VANISHING.max(NOISE * scale);
    formula
        .iter()
        .zip(numeric)
        .map(|(f, n)| (f - n).abs_f64() / f.abs_f64().max(n.abs_f64()).max(floor))
        .fold(0.0, f64::max)
}

fn poly_at(coeffs: &[Cplx], x: f64) -> Cplx {
    let p = coeffs[0].prec();
    let xf = Float::with_val(p, x);
    let mut acc = Cplx::zero(p);
    for c in coeffs.iter().rev() {
        acc = (&acc.scale(&xf)) + c;
    }
    acc
}

fn finish_report(
    prefactor: ResiduePrefactor,
    coefficients: Vec<Cplx>,
    literal: Vec<Cplx>,
    numeric: Vec<Cplx>,
    x: f64,
    max_disagreement: f64,
) -> Result<ResidueReport> {
    let agreement = if numeric.is_empty() { 0.0 } else { agreement(&coefficients, &numeric) };
    let report = ResidueReport {
        prefactor,
        value_at_x: poly_at(&coefficients, x),
        numeric_at_x: (!numeric.is_empty()).then(|| poly_at(&numeric, x)),
        coefficients,
        literal_coefficients: literal,
        numeric,
        x,
        agreement,
    };
    if report.agreement > max_disagreement {
        return Err(Error::ResidueDisagreement { agreement: report.agreement, report: Box::new(report) });
    }
    Ok(report)
}

/// s-plane members of `phi(z, ., 0)` sitting at `t`.
fn s_members_at(binet: &BinetData, z: &Cplx, t: &Cplx) -> Result<Vec<PoleId>> {
    let tol = group_tol(binet.precision_bits);
    let w = SWindow::around(t.to_c64(), 2.0 * tol);
    let recs = enumerate_poles_s(binet, z, &w, PoleCaps::x0())?;
    Ok(recs.into_iter().filter(|r| r.raw_location.distance(t).to_f64() <= tol).flat_map(|r| r.members).collect())
}

fn z_members_at(binet: &BinetData, s: &Cplx, z0: &Cplx) -> Result<Vec<PoleId>> {
    let tol = group_tol(binet.precision_bits) * (1.0 + z0.abs_f64());
    let c = z0.to_c64();
    let w =
        ZWindow::Rect { re0: c.re - 2.0 * tol, re1: c.re + 2.0 * tol, im0: c.im - 2.0 * tol, im1: c.im + 2.0 * tol };
    let recs = enumerate_poles_z(binet, s, &w, PoleCaps::x0())?;
    Ok(recs.into_iter().filter(|r| r.raw_location.distance(z0).to_f64() <= tol).flat_map(|r| r.members).collect())
}

/// Highest power of `x` in the s-plane residue polynomial at `s0`.
pub fn j0_s(binet: &BinetData, z: &Cplx, s0: &Cplx) -> i64 {
    let p = binet.precision_bits;
    let top = Float::with_val(p, mp::ln(&z.with_prec(p).abs()) / &binet.ln_alpha1()).to_f64();
    (top - s0.re.to_f64() + group_tol(p)).floor() as i64
}

/// Highest power of `x` in the z-plane residue polynomial at `z0`.
pub fn j0_z(binet: &BinetData, s: &Cplx, z0: &Cplx) -> i64 {
    let la1 = binet.ln_alpha1().to_f64();
    (z0.abs_f64().ln() / la1 - s.re.to_f64() + group_tol(binet.precision_bits)).floor() as i64
}

/// Residue of `phi(z, ., x)` at the record's location, with coefficient
/// `binom(-s0, j) * Res_{s0 + j} phi(z, ., 0)` for `x^j`.
pub fn residue_s(
    norm: &NormalizedRecurrence,
    binet: &BinetData,
    z: &Cplx,
    record: &PoleRecord,
    x: f64,
    opts: &ResidueOptions,
) -> Result<ResidueReport> {
    let p = binet.precision_bits;
    let tol = group_tol(p);
    let z = z.with_prec(p);
    let s0 = exact_point(&record.raw_location, tol);
    let j0 = j0_s(binet, &z, &s0).max(0) as u32;
    let f_conf = opts.prefactor.factor(binet);
    let f_lit = ResiduePrefactor::InverseAlpha.factor(binet);
    let js: Vec<u32> = (0..=j0).collect();
    let rows: Vec<Result<(Cplx, Cplx, Option<Cplx>)>> = opts.exec.map_collect(&js, |&j| {
        let b = binom_complex(&s0, j);
        let t = s0.add_real(&Float::with_val(p, j));
        let mut sum = Cplx::zero(p);
        if !b.is_zero() {
            for m in s_members_at(binet, &z, &t)? {
                sum = &sum + &lambda_coeff_unshifted(binet, &t, &m.k).value;
            }
        }
        let base = &b * &sum;
        let numeric = if !opts.numeric {
            None
        } else if b.is_zero() {
            Some(Cplx::zero(p))
        } else {
            Some(&b * &numeric_residue_s(norm, binet, &z, &t)?)
        };
        Ok((base.scale(&f_conf), base.scale(&f_lit), numeric))
    });
    let mut coeffs = vec![];
    let mut literal = vec![];
    let mut numeric = vec![];
    for r in rows {
        let (c, l, n) = r?;
        coeffs.push(c);
        literal.push(l);
        numeric.extend(n);
    }
    finish_report(opts.prefactor, coeffs, literal, numeric, x, opts.max_disagreement)
}

/// Residue of `phi(., s, x)` at the record's location: coefficient of `x^j`
/// is `binom(-s, j) * (-z0) * sum L_k(s + j)` over members at `z0`.
pub fn residue_z(
    norm: &NormalizedRecurrence,
    binet: &BinetData,
    s: &Cplx,
    record: &PoleRecord,
    x: f64,
    opts: &ResidueOptions,
) -> Result<ResidueReport> {
    let p = binet.precision_bits;
    let s = s.with_prec(p);
    let z0 = record.location.clone();
    let j0 = j0_z(binet, &s, &z0).max(0) as u32;
    let js: Vec<u32> = (0..=j0).collect();
    let rows: Vec<Result<(Cplx, Option<Cplx>)>> = opts.exec.map_collect(&js, |&j| {
        let b = binom_complex(&s, j);
        let sj = s.add_real(&Float::with_val(p, j));
        let mut sum = Cplx::zero(p);
        if !b.is_zero() {
            for m in z_members_at(binet, &sj, &z0)? {
                sum = &sum + &lambda_coeff_unshifted(binet, &sj, &m.k).value;
            }
        }
        let coeff = -&(&(&b * &sum) * &z0);
        let numeric = if !opts.numeric {
            None
        } else if b.is_zero() {
            Some(Cplx::zero(p))
        } else {
            Some(&b * &numeric_residue_z(norm, binet, &sj, &z0)?)
        };
        Ok((coeff, numeric))
    });
    let mut coeffs = vec![];
    let mut numeric = vec![];
    for r in rows {
        let (c, n) = r?;
        coeffs.push(c);
        numeric.extend(n);
    }
    let literal = coeffs.clone();
    finish_report(ResiduePrefactor::InverseLog, coeffs, literal, numeric, x, opts.max_disagreement)
}

/// Numeric residue against both candidate prefactors at an s-plane record.
#[derive(Clone, Debug)]
pub struct Adjudication {
    pub numeric: Cplx,
    pub inverse_log: Cplx,
    pub inverse_alpha: Cplx,
    pub rel_inverse_log: f64,
    pub rel_inverse_alpha: f64,
    /// The unique candidate matching to `threshold`, if exactly one does.
    pub winner: Option<ResiduePrefactor>,
}

pub fn adjudicate_prefactor(
    norm: &NormalizedRecurrence,
    binet: &BinetData,
    z: &Cplx,
    record: &PoleRecord,
    threshold: f64,
) -> Result<Adjudication> {
    let opts = ResidueOptions { numeric: true, max_disagreement: f64::INFINITY, ..Default::default() };
    let rep = residue_s(norm, binet, z, record, 0.0, &opts)?;
    let numeric = rep.numeric[0].clone();
    let inverse_log = rep.coefficients[0].clone();
    let inverse_alpha = rep.literal_coefficients[0].clone();
    let rel = |c: &Cplx| (c - &numeric).abs_f64() / numeric.abs_f64();
    let (rl, ra) = (rel(&inverse_log), rel(&inverse_alpha));
    let winner = match (rl <= threshold, ra <= threshold) {
        (true, false) => Some(ResiduePrefactor::InverseLog),
        (false, true) => Some(ResiduePrefactor::InverseAlpha),
        _ => None,
    };
    Ok(Adjudication { numeric, inverse_log, inverse_alpha, rel_inverse_log: rl, rel_inverse_alpha: ra, winner })
}

/// Attaches residue reports to every non-removable record.
pub fn attach_residues_s(
    norm: &NormalizedRecurrence,
    binet: &BinetData,
    z: &Cplx,
    records: &mut [PoleRecord],
    x: f64,
    opts: &ResidueOptions,
) -> Result<()> {
    let idx: Vec<usize> = (0..records.len()).filter(|&i| !records[i].removable).collect();
    let reports = opts.exec.map_collect(&idx, |&i| residue_s(norm, binet, z, &records[i], x, opts));
    for (i, r) in idx.into_iter().zip(reports) {
        records[i].residue = Some(r?);
    }
    Ok(())
}

pub fn attach_residues_z(
    norm: &NormalizedRecurrence,
    binet: &BinetData,
    s: &Cplx,
    records: &mut [PoleRecord],
    x: f64,
    opts: &ResidueOptions,
) -> Result<()> {
    let idx: Vec<usize> = (0..records.len()).filter(|&i| !records[i].removable).collect();
    let reports = opts.exec.map_collect(&idx, |&i| residue_z(norm, binet, s, &records[i], x, opts));
    for (i, r) in idx.into_iter().zip(reports) {
        records[i].residue = Some(r?);
    }
    Ok(())
}
