//! Versioned output records and their JSON and CSV renderings.
//!
//! Every record carries `"schema": "recur-lerch/1"` and ends with a
//! `timing` object, the only field that differs between identical runs.

use std::io::Write;

use recurlerch::Cplx;
use serde::{Deserialize, Serialize};

pub const SCHEMA: &str = "recur-lerch/1";

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct C {
    pub re: f64,
    pub im: f64,
}

impl C {
    pub fn of(z: &Cplx) -> Self {
        let v = z.to_c64();
        C { re: v.re, im: v.im }
    }

    fn text(&self) -> String {
        // `+ 0.0` turns -0 into 0
        let (re, im) = (self.re + 0.0, self.im + 0.0);
        if im < 0.0 {
            format!("{re}{im}i")
        } else {
            format!("{re}+{im}i")
        }
    }
}

/// Full-precision decimal strings alongside the binary64 rendering.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Digits {
    pub re: String,
    pub im: String,
}

impl Digits {
    pub fn of(z: &Cplx) -> Self {
        let n = (z.prec() as f64 * std::f64::consts::LOG10_2).floor() as usize;
        Digits { re: z.re.to_string_radix(10, Some(n)), im: z.im.to_string_radix(10, Some(n)) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub elapsed_s: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalRequest {
    pub sequence: String,
    pub z: C,
    pub s: C,
    pub x: f64,
    pub method: String,
    pub precision: u32,
    pub tol: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    pub terms_used: usize,
    pub depth: usize,
    pub inner_depth: usize,
    pub nearest_denominator: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub schema: String,
    pub request: EvalRequest,
    pub value: C,
    pub value_digits: Digits,
    pub error_bound: f64,
    pub method_used: String,
    pub truncation: Truncation,
    pub timing: Timing,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidueRow {
    pub prefactor: String,
    /// Coefficients of the residue polynomial in `x`, lowest degree first.
    pub coefficients: Vec<C>,
    /// Numeric-limit estimates of the same coefficients; empty if skipped.
    pub numeric: Vec<C>,
    pub value_at_x: C,
    pub numeric_at_x: Option<C>,
    pub agreement: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoleRow {
    pub location: C,
    pub location_digits: Digits,
    pub members: Vec<String>,
    pub removable: bool,
    pub residue: Option<ResidueRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum WindowEcho {
    Rect { re0: f64, re1: f64, im0: f64, im1: f64 },
    Annulus { r0: f64, r1: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolesRequest {
    pub sequence: String,
    pub plane: String,
    /// `z` for the s-plane, `s` for the z-plane.
    pub fixed: C,
    pub window: WindowEcho,
    pub x: f64,
    pub precision: u32,
    pub k_cap: Option<u32>,
    pub j_cap: Option<u32>,
    pub with_residues: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolesRecord {
    pub schema: String,
    pub request: PolesRequest,
    pub poles: Vec<PoleRow>,
    pub timing: Timing,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AbscissaRecord {
    pub schema: String,
    pub sequence: String,
    pub z: C,
    /// `null` when `z = 0` (the series converges everywhere).
    pub abscissa: Option<f64>,
    pub timing: Timing,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpecialRecord {
    pub schema: String,
    pub sequence: String,
    pub m: u32,
    pub precision: u32,
    pub value: C,
    pub value_digits: Digits,
    pub error_bound: f64,
    /// Always `p/q`, denominator included.
    pub fraction: Option<String>,
    pub confirmed: bool,
    pub reconstruction_error: Option<f64>,
    pub failure: Option<String>,
    pub timing: Timing,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntryRow {
    pub name: String,
    pub degree: usize,
    pub char_coeffs: Vec<String>,
    pub initial_terms: Vec<String>,
    pub negated: bool,
    pub note: String,
    pub unsupported: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorpusRecord {
    pub schema: String,
    pub entries: Vec<EntryRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BinetRow {
    pub root: C,
    pub root_radius: f64,
    pub coefficient: C,
    pub coefficient_radius: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShowRecord {
    pub schema: String,
    pub entry: EntryRow,
    pub precision: u32,
    /// Present only for supported entries.
    pub binet: Vec<BinetRow>,
    pub n0: Option<usize>,
    pub first_terms: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteRow {
    pub module: String,
    pub name: String,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
    pub ok: bool,
    pub failures: Vec<String>,
    pub elapsed_s: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelftestRecord {
    pub schema: String,
    pub level: String,
    pub suites: Vec<SuiteRow>,
    pub suites_passed: usize,
    pub suites_failed: usize,
    pub timing: Timing,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Anything that can be printed in both formats.
pub trait Render: Serialize {
    fn csv_header(&self) -> Vec<&'static str>;
    fn csv_rows(&self) -> Vec<Vec<String>>;
}

pub fn emit<R: Render>(out: &mut impl Write, record: &R, format: Format) -> std::io::Result<()> {
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, record)?;
            writeln!(out)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(record.csv_header())?;
            for row in record.csv_rows() {
                w.write_record(row)?;
            }
            w.flush()
        }
    }
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(T::to_string).unwrap_or_default()
}

fn join_c(v: &[C]) -> String {
    v.iter().map(C::text).collect::<Vec<_>>().join(" ")
}

impl Render for OutputRecord {
    fn csv_header(&self) -> Vec<&'static str> {
        vec![
            "sequence",
            "z_re",
            "z_im",
            "s_re",
            "s_im",
            "x",
            "method",
            "value_re",
            "value_im",
            "error_bound",
            "terms_used",
            "depth",
            "inner_depth",
            "elapsed_s",
        ]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        let r = &self.request;
        let t = &self.truncation;
        vec![vec![
            r.sequence.clone(),
            r.z.re.to_string(),
            r.z.im.to_string(),
            r.s.re.to_string(),
            r.s.im.to_string(),
            r.x.to_string(),
            self.method_used.clone(),
            self.value.re.to_string(),
            self.value.im.to_string(),
            self.error_bound.to_string(),
            t.terms_used.to_string(),
            t.depth.to_string(),
            t.inner_depth.to_string(),
            self.timing.elapsed_s.to_string(),
        ]]
    }
}

impl Render for PolesRecord {
    fn csv_header(&self) -> Vec<&'static str> {
        vec![
            "location_re",
            "location_im",
            "members",
            "removable",
            "coefficients",
            "numeric",
            "value_at_x_re",
            "value_at_x_im",
            "agreement",
        ]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.poles
            .iter()
            .map(|p| {
                let r = p.residue.as_ref();
                vec![
                    p.location.re.to_string(),
                    p.location.im.to_string(),
                    p.members.join(" "),
                    p.removable.to_string(),
                    r.map(|r| join_c(&r.coefficients)).unwrap_or_default(),
                    r.map(|r| join_c(&r.numeric)).unwrap_or_default(),
                    opt(&r.map(|r| r.value_at_x.re)),
                    opt(&r.map(|r| r.value_at_x.im)),
                    opt(&r.map(|r| r.agreement)),
                ]
            })
            .collect()
    }
}

impl Render for AbscissaRecord {
    fn csv_header(&self) -> Vec<&'static str> {
        vec!["sequence", "z_re", "z_im", "abscissa"]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        vec![vec![
            self.sequence.clone(),
            self.z.re.to_string(),
            self.z.im.to_string(),
            self.abscissa.map_or("-inf".into(), |a| a.to_string()),
        ]]
    }
}

impl Render for SpecialRecord {
    fn csv_header(&self) -> Vec<&'static str> {
        vec!["sequence", "m", "value_re", "value_im", "error_bound", "fraction", "confirmed", "failure"]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        vec![vec![
            self.sequence.clone(),
            self.m.to_string(),
            self.value_digits.re.clone(),
            self.value_digits.im.clone(),
            self.error_bound.to_string(),
            opt(&self.fraction),
            self.confirmed.to_string(),
            opt(&self.failure),
        ]]
    }
}

fn entry_cells(e: &EntryRow) -> Vec<String> {
    vec![
        e.name.clone(),
        e.degree.to_string(),
        e.char_coeffs.join(","),
        e.initial_terms.join(","),
        e.negated.to_string(),
        e.note.clone(),
        opt(&e.unsupported),
    ]
}

const ENTRY_HEADER: [&str; 7] = ["name", "degree", "char_coeffs", "initial_terms", "negated", "note", "unsupported"];

impl Render for CorpusRecord {
    fn csv_header(&self) -> Vec<&'static str> {
        ENTRY_HEADER.to_vec()
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.entries.iter().map(entry_cells).collect()
    }
}

impl Render for ShowRecord {
    fn csv_header(&self) -> Vec<&'static str> {
        let mut h = ENTRY_HEADER.to_vec();
        h.extend(["n0", "roots", "coefficients"]);
        h
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        let mut row = entry_cells(&self.entry);
        row.push(opt(&self.n0));
        row.push(self.binet.iter().map(|b| b.root.text()).collect::<Vec<_>>().join(" "));
        row.push(self.binet.iter().map(|b| b.coefficient.text()).collect::<Vec<_>>().join(" "));
        vec![row]
    }
}

impl Render for SelftestRecord {
    fn csv_header(&self) -> Vec<&'static str> {
        vec!["module", "suite", "passed", "failed", "skipped", "ok", "elapsed_s"]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.suites
            .iter()
            .map(|s| {
                vec![
                    s.module.clone(),
                    s.name.clone(),
                    s.passed.to_string(),
                    s.failed.to_string(),
                    s.skipped.to_string(),
                    s.ok.to_string(),
                    s.elapsed_s.to_string(),
                ]
            })
            .collect()
    }
}
