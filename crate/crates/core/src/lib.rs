//! Lerch-type zeta functions of integer linear recurrence sequences.
//!
//! For a recurrence `a_n` with a simple dominant real root `alpha_1 > 1`,
//!
//! ```text
//! phi(z, s, x) = sum_{n >= 1} z^n (a_n + x)^{-s}
//! ```
//!
//! is evaluated in its convergence half-plane by direct summation and
//! everywhere else by meromorphic continuation. The pole lattice in both
//! the `s`- and `z`-planes is enumerated, coincident points are merged, and
//! residues are produced both in closed form and as numeric limits.
//!
//! ```no_run
//! use recurlerch::{EvalParams, LerchZeta};
//! use num_complex::Complex64;
//!
//! let fib = LerchZeta::builtin("fibonacci", 128).unwrap();
//! let p = EvalParams::new(128, Complex64::new(1.0, 0.0), Complex64::new(-0.5, 0.0), 0.0);
//! let r = fib.eval(&p, None).unwrap();
//! println!("{} +- {:e}", r.value, r.error_bound);
//! ```

pub mod algebraic;
pub mod continuation;
pub mod corpus;
pub mod direct_eval;
pub mod error;
pub mod exec;
pub mod mp;
pub mod poles_residues;
pub mod recurrence;
pub mod selftest;
pub mod special_values;

pub use algebraic::BinetData;
pub use continuation::MultiIndex;
pub use direct_eval::{EvalParams, EvalResult, Method};
pub use error::{Error, Hypothesis, Result};
pub use exec::Execution;
pub use mp::Cplx;
pub use poles_residues::{PoleCaps, PoleId, PoleRecord, ResidueOptions, ResidueReport, SWindow, ZWindow};
pub use recurrence::{NormalizedRecurrence, RecurrenceSpec, ValidationReport};

/// A validated, normalized recurrence with its Binet data at one precision.
#[derive(Clone, Debug)]
pub struct LerchZeta {
    pub spec: RecurrenceSpec,
    pub binet: BinetData,
    pub norm: NormalizedRecurrence,
    pub report: ValidationReport,
}

impl LerchZeta {
    pub fn new(spec: RecurrenceSpec, prec: u32) -> Result<Self> {
        let binet = BinetData::compute(&spec, prec)?;
        let report = recurrence::validate(&spec, &binet)?;
        let norm = recurrence::normalize(&spec, &binet)?;
        Ok(LerchZeta { spec, binet, norm, report })
    }

    pub fn builtin(name: &str, prec: u32) -> Result<Self> {
        LerchZeta::new(corpus::lookup(name)?.spec, prec)
    }

    pub fn precision(&self) -> u32 {
        self.binet.precision_bits
    }

    /// Same recurrence recomputed at another precision.
    pub fn at_precision(&self, prec: u32) -> Result<Self> {
        LerchZeta::new(self.spec.clone(), prec)
    }

    pub fn abscissa(&self, z: &Cplx) -> f64 {
        direct_eval::abscissa(&self.binet, z)
    }

    /// Method used when none is requested: direct summation comfortably
    /// inside the half-plane, otherwise the continuation.
    pub fn auto_method(&self, p: &EvalParams) -> Method {
        if p.sigma() > self.abscissa(&p.z) + 0.5 {
            Method::Direct
        } else if p.x.is_zero() {
            Method::ContinuedX0
        } else {
            Method::RamanujanLift
        }
    }

    pub fn eval(&self, p: &EvalParams, method: Option<Method>) -> Result<EvalResult> {
        match method.unwrap_or_else(|| self.auto_method(p)) {
            Method::Direct => direct_eval::eval_direct(&self.norm, &self.binet, p),
            Method::ContinuedX0 => continuation::eval_continued_x0(&self.norm, &self.binet, p),
            Method::RamanujanLift => continuation::eval_lerch(&self.norm, &self.binet, p),
            Method::PowerSeriesZ => direct_eval::eval_power_series_z(&self.norm, &self.binet, p),
        }
    }

    /// Evaluates every point, in parallel across points when `exec` allows.
    /// Results are in input order and identical in both modes.
    pub fn eval_batch(
        &self,
        points: &[EvalParams],
        method: Option<Method>,
        exec: Execution,
    ) -> Vec<Result<EvalResult>> {
        exec.map_collect(points, |p| self.eval(&p.clone().with_exec(Execution::Sequential), method))
    }

    pub fn poles_s(&self, z: &Cplx, window: &SWindow, caps: PoleCaps) -> Result<Vec<PoleRecord>> {
        poles_residues::enumerate_poles_s(&self.binet, z, window, caps)
    }

    pub fn poles_z(&self, s: &Cplx, window: &ZWindow, caps: PoleCaps) -> Result<Vec<PoleRecord>> {
        poles_residues::enumerate_poles_z(&self.binet, s, window, caps)
    }

    pub fn residue_s(&self, z: &Cplx, record: &PoleRecord, x: f64, opts: &ResidueOptions) -> Result<ResidueReport> {
        poles_residues::residue_s(&self.norm, &self.binet, z, record, x, opts)
    }

    pub fn residue_z(&self, s: &Cplx, record: &PoleRecord, x: f64, opts: &ResidueOptions) -> Result<ResidueReport> {
        poles_residues::residue_z(&self.norm, &self.binet, s, record, x, opts)
    }
}
