use std::fmt;

use thiserror::Error;

use crate::poles_residues::{PoleId, ResidueReport};

/// Standing hypothesis on the recurrence that a check can reject.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Hypothesis {
    NonzeroRoots,
    DominantRootReal,
    DominantRootAboveOne,
    StrictDominance,
    SimpleRoots,
    LeadingCoefficientPositive,
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Hypothesis::NonzeroRoots => "all characteristic roots nonzero",
            Hypothesis::DominantRootReal => "dominant root is real",
            Hypothesis::DominantRootAboveOne => "dominant root exceeds 1",
            Hypothesis::StrictDominance => "dominant root strictly exceeds all other moduli",
            Hypothesis::SimpleRoots => "roots are numerically simple",
            Hypothesis::LeadingCoefficientPositive => "dominant Binet coefficient is real and positive",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid recurrence: {0}")]
    InvalidSpec(String),

    #[error("unsupported recurrence: {hypothesis} fails ({detail})")]
    UnsupportedRecurrence { hypothesis: Hypothesis, detail: String },

    #[error("no normalization offset n0 <= {cap} makes the tail increasing and dominated")]
    NormalizationOverflow { cap: usize },

    #[error("root refinement did not converge at {precision} bits (root {index})")]
    RootFindingFailure { precision: u32, index: usize },

    #[error("Binet solve residual {residual:e} exceeds tolerance {tolerance:e}; raise precision")]
    IllConditionedSolve { residual: f64, tolerance: f64 },

    #[error("Re(s) = {sigma} is not above abscissa {abscissa} + margin {margin}")]
    OutsideConvergenceRegion { sigma: f64, abscissa: f64, margin: f64 },

    #[error("budget exceeded: {what} reached limit {limit}")]
    BudgetExceeded { what: &'static str, limit: usize },

    #[error("evaluation point is within {distance:e} of pole {pole}")]
    NearPole { pole: PoleId, distance: f64 },

    #[error("x = {x} is outside [0, 1)")]
    XOutOfRange { x: f64 },

    #[error("term a_{n} + x vanishes; the series is undefined")]
    SingularTerm { n: usize },

    #[error("{which} cap {cap} too small: window needs at least {needed}")]
    CapTooSmall { which: &'static str, cap: u32, needed: u32 },

    #[error("residue formula and numeric limit disagree (relative {agreement:e})")]
    ResidueDisagreement { agreement: f64, report: Box<ResidueReport> },

    #[error("s = -{m} is a pole")]
    IsPole { m: u32 },

    #[error("rational reconstruction failed: {0}")]
    ReconstructionFailed(String),

    #[error("corpus line {line}: {msg}")]
    CorpusParse { line: usize, msg: String },

    #[error("unknown sequence '{0}'")]
    UnknownSequence(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
