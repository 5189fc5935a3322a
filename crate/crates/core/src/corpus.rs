//! Built-in recurrences and the line-oriented corpus file format.
//!
//! One record per line, fields separated by `;`:
//!
//! ```text
//! name; degree; c0,c1,...,c_{d-1}; a1,...,a_d[; note=free text][; negated=true]
//! ```
//!
//! Blank lines and lines starting with `#` are ignored. Notes may not
//! contain `;`.

use std::path::Path;

use rug::Integer;

use crate::algebraic::BinetData;
use crate::error::{Error, Result};
use crate::recurrence::{self, RecurrenceSpec};

/// Precision used when validating entries at load time.
pub const LOAD_CHECK_PRECISION: u32 = 128;

#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub spec: RecurrenceSpec,
    pub note: String,
    /// Reason the entry fails validation, if it does.
    pub unsupported: Option<String>,
}

impl CorpusEntry {
    pub fn name(&self) -> &str {
        self.spec.label()
    }

    fn checked(spec: RecurrenceSpec, note: &str) -> Self {
        let unsupported = BinetData::compute(&spec, LOAD_CHECK_PRECISION)
            .and_then(|b| recurrence::validate(&spec, &b).map(|_| ()))
            .err()
            .map(|e| e.to_string());
        CorpusEntry { spec, note: note.to_owned(), unsupported }
    }
}

pub fn builtin_corpus() -> Vec<CorpusEntry> {
    let table: [(&str, &[i64], &[i64], &str); 6] = [
        ("fibonacci", &[1, 1], &[1, 1], "F_n, x^2 - x - 1"),
        ("lucas", &[1, 1], &[1, 3], "L_n, x^2 - x - 1"),
        ("pell", &[1, 2], &[1, 2], "P_n, x^2 - 2x - 1"),
        ("tribonacci", &[1, 1, 1], &[1, 1, 2], "x^3 - x^2 - x - 1"),
        ("tetranacci", &[1, 1, 1, 1], &[1, 1, 2, 4], "x^4 - x^3 - x^2 - x - 1"),
        ("doubling", &[2], &[1], "2^(n-1), x - 2"),
    ];
    table
        .iter()
        .map(|&(name, c, a, note)| {
            let spec = RecurrenceSpec::from_i64(Some(name), c, a).expect("builtin spec is well formed");
            CorpusEntry::checked(spec, note)
        })
        .collect()
}

/// Case-insensitive lookup in the builtin corpus.
pub fn lookup(name: &str) -> Result<CorpusEntry> {
    lookup_in(&builtin_corpus(), name)
}

pub fn lookup_in(entries: &[CorpusEntry], name: &str) -> Result<CorpusEntry> {
    entries
        .iter()
        .find(|e| e.name().eq_ignore_ascii_case(name))
        .cloned()
        .ok_or_else(|| Error::UnknownSequence(name.to_owned()))
}

fn parse_ints(field: &str, line: usize, what: &str) -> Result<Vec<Integer>> {
    field
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<Integer>()
                .map_err(|e| Error::CorpusParse { line, msg: format!("bad {what} '{}': {e}", t.trim()) })
        })
        .collect()
}

/// Parses a single record; `line` is used for error messages.
pub fn parse_line(text: &str, line: usize) -> Result<CorpusEntry> {
    let err = |msg: String| Error::CorpusParse { line, msg };
    let fields: Vec<&str> = text.split(';').map(str::trim).collect();
    if fields.len() < 4 {
        return Err(err(format!("expected at least 4 fields, found {}", fields.len())));
    }
    let name = fields[0];
    if name.is_empty() {
        return Err(err("empty name".into()));
    }
    let degree: usize = fields[1].parse().map_err(|e| err(format!("bad degree '{}': {e}", fields[1])))?;
    let coeffs = parse_ints(fields[2], line, "coefficient")?;
    let init = parse_ints(fields[3], line, "initial term")?;
    if coeffs.len() != degree || init.len() != degree {
        return Err(err(format!("degree {degree} but {} coefficients and {} initial terms", coeffs.len(), init.len())));
    }
    let mut note = "";
    let mut negated = false;
    for extra in &fields[4..] {
        match extra.split_once('=') {
            Some(("note", v)) => note = v.trim(),
            Some(("negated", v)) => negated = v.trim().parse().map_err(|_| err(format!("bad negated flag '{v}'")))?,
            _ => return Err(err(format!("unknown field '{extra}'"))),
        }
    }
    let spec = RecurrenceSpec::new(Some(name), coeffs, init).map_err(|e| err(e.to_string()))?.with_negation(negated);
    Ok(CorpusEntry::checked(spec, note))
}

pub fn parse_corpus(text: &str) -> Result<Vec<CorpusEntry>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| {
            let t = l.trim();
            !t.is_empty() && !t.starts_with('#')
        })
        .map(|(i, l)| parse_line(l, i + 1))
        .collect()
}

pub fn load_corpus(path: &Path) -> Result<Vec<CorpusEntry>> {
    parse_corpus(&std::fs::read_to_string(path)?)
}

pub fn format_entry(entry: &CorpusEntry) -> String {
    let join = |v: &[Integer]| v.iter().map(Integer::to_string).collect::<Vec<_>>().join(",");
    let s = &entry.spec;
    let mut out = format!("{}; {}; {}; {}", s.label(), s.degree(), join(&s.char_coeffs), join(&s.initial_terms));
    if !entry.note.is_empty() {
        out.push_str("; note=");
        out.push_str(&entry.note.replace(';', ","));
    }
    if s.negated {
        out.push_str("; negated=true");
    }
    out
}

pub fn format_corpus(entries: &[CorpusEntry]) -> String {
    entries.iter().map(|e| format_entry(e) + "\n").collect()
}
