//! `recurlerch` command-line front end.
//!
//! Exit codes: 0 success, 1 other failure, 2 usage, 3 near a pole,
//! 4 outside the convergence region, 5 unsupported recurrence,
//! 6 enumeration cap too small, 7 residue disagreement, 8 the requested
//! special value sits on a pole, 9 budget exceeded, 10 a selftest suite failed.

mod output;
mod parse;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use recurlerch::corpus::{self, CorpusEntry};
use recurlerch::poles_residues::{attach_residues_s, attach_residues_z, ResiduePrefactor};
use recurlerch::selftest::{self, Level};
use recurlerch::special_values::value_at_negative_integer;
use recurlerch::{
    Cplx, Error, EvalParams, Execution, LerchZeta, Method, PoleCaps, PoleRecord, RecurrenceSpec, ResidueOptions,
    SWindow, ZWindow,
};
use rug::Integer;

use output::*;

#[derive(Parser)]
#[command(name = "recurlerch", version, about = "Lerch-type zeta functions of linear recurrence sequences")]
struct Cli {
    /// Working precision in bits.
    #[arg(long, global = true, env = "RECURLERCH_PRECISION", default_value_t = 128)]
    precision: u32,
    /// Absolute error target for evaluations.
    #[arg(long, global = true, env = "RECURLERCH_TOL", default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Extra corpus file searched before the builtin sequences.
    #[arg(long, global = true)]
    corpus: Option<PathBuf>,
    /// Disable data-parallel work inside a command.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SeqArgs {
    /// Builtin or corpus sequence name; omit when giving --poly/--init.
    seq: Option<String>,
    /// Characteristic coefficients c0,...,c_{d-1} of y^d - c_{d-1} y^{d-1} - ... - c0.
    #[arg(long, allow_hyphen_values = true, requires = "init")]
    poly: Option<String>,
    /// Initial terms a1,...,ad.
    #[arg(long, allow_hyphen_values = true, requires = "poly")]
    init: Option<String>,
    /// Use -a_n (for sequences that are eventually negative).
    #[arg(long, requires = "poly")]
    negate: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Auto,
    Direct,
    Continued,
    Lift,
    PowerSeries,
}

impl MethodArg {
    fn method(self) -> Option<Method> {
        match self {
            MethodArg::Auto => None,
            MethodArg::Direct => Some(Method::Direct),
            MethodArg::Continued => Some(Method::ContinuedX0),
            MethodArg::Lift => Some(Method::RamanujanLift),
            MethodArg::PowerSeries => Some(Method::PowerSeriesZ),
        }
    }

    fn name(self) -> &'static str {
        match self {
            MethodArg::Auto => "auto",
            MethodArg::Direct => "direct",
            MethodArg::Continued => "continued",
            MethodArg::Lift => "lift",
            MethodArg::PowerSeries => "power-series",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PlaneArg {
    S,
    Z,
}

#[derive(Clone, Copy, ValueEnum)]
enum PrefactorArg {
    InverseLog,
    InverseAlpha,
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Quick,
    Full,
}

#[derive(Subcommand)]
enum CorpusCmd {
    /// List every known sequence.
    List,
    /// One entry with its Binet data.
    Show { name: String },
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate phi(z, s, x).
    Eval {
        #[command(flatten)]
        seq: SeqArgs,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        #[arg(long, allow_hyphen_values = true)]
        s: String,
        #[arg(long, allow_hyphen_values = true, default_value = "0")]
        x: String,
        #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
        method: MethodArg,
        #[arg(long)]
        max_terms: Option<usize>,
    },
    /// Tabulate poles in a window of the s- or z-plane.
    Poles {
        #[command(flatten)]
        seq: SeqArgs,
        #[arg(long, value_enum)]
        plane: PlaneArg,
        /// Fixed z for the s-plane.
        #[arg(long, allow_hyphen_values = true, default_value = "1")]
        z: String,
        /// Fixed s for the z-plane.
        #[arg(long, allow_hyphen_values = true)]
        s: Option<String>,
        /// re0,re1,im0,im1
        #[arg(long, allow_hyphen_values = true, conflicts_with = "annulus")]
        window: Option<String>,
        /// r0,r1 (z-plane only)
        #[arg(long)]
        annulus: Option<String>,
        #[arg(long)]
        with_residues: bool,
        #[arg(long, default_value_t = 0.0)]
        x: f64,
        #[arg(long)]
        k_cap: Option<u32>,
        /// Defaults to 0 in the s-plane when x = 0, unbounded otherwise.
        #[arg(long)]
        j_cap: Option<u32>,
        #[arg(long, value_enum, default_value_t = PrefactorArg::InverseLog)]
        prefactor: PrefactorArg,
        /// Skip the numeric-limit cross-check of residues.
        #[arg(long)]
        no_numeric: bool,
    },
    /// Abscissa of convergence log|z| / log alpha_1.
    Abscissa {
        #[command(flatten)]
        seq: SeqArgs,
        #[arg(long, allow_hyphen_values = true, default_value = "1")]
        z: String,
    },
    /// phi(1, -m, 0) and its rational reconstruction.
    Special {
        #[command(flatten)]
        seq: SeqArgs,
        #[arg(long)]
        m: u32,
    },
    /// Inspect the sequence corpus.
    Corpus {
        #[command(subcommand)]
        cmd: CorpusCmd,
    },
    /// Run the invariant suites.
    Selftest {
        #[arg(long, value_enum, default_value_t = LevelArg::Quick)]
        level: LevelArg,
    },
}

enum Failure {
    Usage(String),
    Lib(Error),
    Io(std::io::Error),
    Selftest(usize),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

type Outcome = std::result::Result<(), Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NearPole { .. } => 3,
        Error::OutsideConvergenceRegion { .. } => 4,
        Error::UnsupportedRecurrence { .. } => 5,
        Error::CapTooSmall { .. } => 6,
        Error::ResidueDisagreement { .. } => 7,
        Error::IsPole { .. } => 8,
        Error::BudgetExceeded { .. } => 9,
        Error::InvalidSpec(_) | Error::XOutOfRange { .. } | Error::UnknownSequence(_) | Error::CorpusParse { .. } => 2,
        _ => 1,
    }
}

fn guidance(e: &Error) -> Option<String> {
    match e {
        Error::CapTooSmall { which, needed, .. } => {
            Some(format!("rerun with --{which}-cap {needed} or shrink the window"))
        }
        Error::NearPole { .. } => Some("move the point off the pole lattice (see the poles command)".into()),
        Error::OutsideConvergenceRegion { .. } => Some("use --method auto or a continuation method".into()),
        Error::BudgetExceeded { .. } => Some("loosen --tol or raise --max-terms".into()),
        Error::ResidueDisagreement { .. } => Some("raise --precision, or pass --no-numeric to skip the check".into()),
        _ => None,
    }
}

struct Ctx {
    precision: u32,
    tol: f64,
    format: Format,
    corpus: Vec<CorpusEntry>,
    exec: Execution,
}

impl Ctx {
    fn emit<R: Render>(&self, record: &R) -> Outcome {
        let stdout = std::io::stdout();
        let mut lock = stdout.lock();
        emit(&mut lock, record, self.format)?;
        lock.flush()?;
        Ok(())
    }

    fn resolve(&self, a: &SeqArgs) -> std::result::Result<RecurrenceSpec, Failure> {
        match (&a.seq, &a.poly, &a.init) {
            (None, Some(c), Some(i)) => {
                let c: Vec<Integer> = parse::parse_list(c).map_err(usage)?;
                let i: Vec<Integer> = parse::parse_list(i).map_err(usage)?;
                Ok(RecurrenceSpec::new(None, c, i)?.with_negation(a.negate))
            }
            (Some(name), None, None) => {
                if let Ok(e) = corpus::lookup_in(&self.corpus, name) {
                    return Ok(e.spec);
                }
                Ok(corpus::lookup(name)?.spec)
            }
            (Some(_), _, _) => Err(usage("give either a sequence name or --poly/--init, not both")),
            _ => Err(usage("missing sequence: give a name or --poly/--init")),
        }
    }

    fn zeta(&self, a: &SeqArgs) -> std::result::Result<LerchZeta, Failure> {
        Ok(LerchZeta::new(self.resolve(a)?, self.precision)?)
    }

    fn complex(&self, text: &str, what: &str) -> std::result::Result<Cplx, Failure> {
        parse::parse_complex(text, self.precision).map_err(|e| usage(format!("--{what}: {e}")))
    }
}

fn timing(t0: Instant) -> Timing {
    Timing { elapsed_s: t0.elapsed().as_secs_f64() }
}

#[allow(clippy::too_many_arguments)]
fn cmd_eval(
    ctx: &Ctx,
    seq: &SeqArgs,
    z: &str,
    s: &str,
    x: &str,
    method: MethodArg,
    max_terms: Option<usize>,
) -> Outcome {
    let t0 = Instant::now();
    let zeta = ctx.zeta(seq)?;
    let (z, s) = (ctx.complex(z, "z")?, ctx.complex(s, "s")?);
    let xv = ctx.complex(x, "x")?;
    if !xv.im.is_zero() {
        return Err(usage("--x must be real"));
    }
    let mut p = EvalParams::from_values(z.clone(), s.clone(), xv.re.clone()).with_tol(ctx.tol).with_exec(ctx.exec);
    if let Some(m) = max_terms {
        p = p.with_max_terms(m);
    }
    let r = zeta.eval(&p, method.method())?;
    ctx.emit(&OutputRecord {
        schema: SCHEMA.into(),
        request: EvalRequest {
            sequence: zeta.spec.label().to_owned(),
            z: C::of(&z),
            s: C::of(&s),
            x: xv.re.to_f64(),
            method: method.name().into(),
            precision: ctx.precision,
            tol: ctx.tol,
        },
        value: C::of(&r.value),
        value_digits: Digits::of(&r.value),
        error_bound: r.error_bound,
        method_used: r.method.as_str().into(),
        truncation: Truncation {
            terms_used: r.terms_used,
            depth: r.depth,
            inner_depth: r.inner_depth,
            nearest_denominator: r.nearest_denominator,
        },
        timing: timing(t0),
    })
}

fn pole_row(r: &PoleRecord) -> PoleRow {
    PoleRow {
        location: C::of(&r.location),
        location_digits: Digits::of(&r.location),
        members: r.members.iter().map(ToString::to_string).collect(),
        removable: r.removable,
        residue: r.residue.as_ref().map(|rep| ResidueRow {
            prefactor: rep.prefactor.as_str().into(),
            coefficients: rep.coefficients.iter().map(C::of).collect(),
            numeric: rep.numeric.iter().map(C::of).collect(),
            value_at_x: C::of(&rep.value_at_x),
            numeric_at_x: rep.numeric_at_x.as_ref().map(C::of),
            agreement: rep.agreement,
        }),
    }
}

struct PolesArgs<'a> {
    seq: &'a SeqArgs,
    plane: PlaneArg,
    z: &'a str,
    s: Option<&'a str>,
    window: Option<&'a str>,
    annulus: Option<&'a str>,
    with_residues: bool,
    x: f64,
    k_cap: Option<u32>,
    j_cap: Option<u32>,
    prefactor: PrefactorArg,
    numeric: bool,
}

fn cmd_poles(ctx: &Ctx, a: PolesArgs<'_>) -> Outcome {
    let t0 = Instant::now();
    let zeta = ctx.zeta(a.seq)?;
    if !(0.0..1.0).contains(&a.x) {
        return Err(Error::XOutOfRange { x: a.x }.into());
    }
    // with x = 0 every j > 0 term of the lift vanishes identically
    let j_cap = match (a.plane, a.j_cap) {
        (_, Some(j)) => Some(j),
        (PlaneArg::S, None) if a.x == 0.0 => Some(0),
        _ => None,
    };
    let caps = PoleCaps { k_cap: a.k_cap, j_cap };
    let opts = ResidueOptions {
        prefactor: match a.prefactor {
            PrefactorArg::InverseLog => ResiduePrefactor::InverseLog,
            PrefactorArg::InverseAlpha => ResiduePrefactor::InverseAlpha,
        },
        numeric: a.numeric,
        exec: ctx.exec,
        ..Default::default()
    };
    let rect = a.window.map(|w| parse::parse_bounds(w, 4).map_err(|e| usage(format!("--window: {e}")))).transpose()?;
    let (fixed, echo, mut records) = match a.plane {
        PlaneArg::S => {
            if a.annulus.is_some() {
                return Err(usage("--annulus applies to the z-plane only"));
            }
            let b = rect.ok_or_else(|| usage("--window is required for the s-plane"))?;
            let w = SWindow::new(b[0], b[1], b[2], b[3])?;
            let z = ctx.complex(a.z, "z")?;
            let mut recs = zeta.poles_s(&z, &w, caps)?;
            if a.with_residues {
                attach_residues_s(&zeta.norm, &zeta.binet, &z, &mut recs, a.x, &opts)?;
            }
            let echo = WindowEcho::Rect { re0: b[0], re1: b[1], im0: b[2], im1: b[3] };
            (z, echo, recs)
        }
        PlaneArg::Z => {
            let s = ctx.complex(a.s.ok_or_else(|| usage("--s is required for the z-plane"))?, "s")?;
            let (w, echo) = match (rect, a.annulus) {
                (Some(b), _) => (
                    ZWindow::rect(b[0], b[1], b[2], b[3])?,
                    WindowEcho::Rect { re0: b[0], re1: b[1], im0: b[2], im1: b[3] },
                ),
                (None, Some(t)) => {
                    let b = parse::parse_bounds(t, 2).map_err(|e| usage(format!("--annulus: {e}")))?;
                    (ZWindow::annulus(b[0], b[1])?, WindowEcho::Annulus { r0: b[0], r1: b[1] })
                }
                (None, None) => return Err(usage("give --window or --annulus")),
            };
            let mut recs = zeta.poles_z(&s, &w, caps)?;
            if a.with_residues {
                attach_residues_z(&zeta.norm, &zeta.binet, &s, &mut recs, a.x, &opts)?;
            }
            (s, echo, recs)
        }
    };
    records.sort_by(|p, q| {
        let (u, v) = (p.location.to_c64(), q.location.to_c64());
        u.re.total_cmp(&v.re).then(u.im.total_cmp(&v.im))
    });
    ctx.emit(&PolesRecord {
        schema: SCHEMA.into(),
        request: PolesRequest {
            sequence: zeta.spec.label().to_owned(),
            plane: match a.plane {
                PlaneArg::S => "s",
                PlaneArg::Z => "z",
            }
            .into(),
            fixed: C::of(&fixed),
            window: echo,
            x: a.x,
            precision: ctx.precision,
            k_cap: a.k_cap,
            j_cap,
            with_residues: a.with_residues,
        },
        poles: records.iter().map(pole_row).collect(),
        timing: timing(t0),
    })
}

fn cmd_abscissa(ctx: &Ctx, seq: &SeqArgs, z: &str) -> Outcome {
    let t0 = Instant::now();
    let zeta = ctx.zeta(seq)?;
    let z = ctx.complex(z, "z")?;
    let a = zeta.abscissa(&z);
    ctx.emit(&AbscissaRecord {
        schema: SCHEMA.into(),
        sequence: zeta.spec.label().to_owned(),
        z: C::of(&z),
        abscissa: a.is_finite().then_some(a),
        timing: timing(t0),
    })
}

fn cmd_special(ctx: &Ctx, seq: &SeqArgs, m: u32) -> Outcome {
    let t0 = Instant::now();
    let zeta = ctx.zeta(seq)?;
    let v = value_at_negative_integer(&zeta, m)?;
    ctx.emit(&SpecialRecord {
        schema: SCHEMA.into(),
        sequence: zeta.spec.label().to_owned(),
        m,
        precision: ctx.precision,
        value: C::of(&v.value),
        value_digits: Digits::of(&v.value),
        error_bound: v.error_bound,
        fraction: v.rational.as_ref().map(|q| format!("{}/{}", q.numerator, q.denominator)),
        confirmed: v.confirmed,
        reconstruction_error: v.reconstruction_error,
        failure: v.failure,
        timing: timing(t0),
    })
}

fn entry_row(e: &CorpusEntry) -> EntryRow {
    let s = &e.spec;
    EntryRow {
        name: s.label().to_owned(),
        degree: s.degree(),
        char_coeffs: s.char_coeffs.iter().map(Integer::to_string).collect(),
        initial_terms: s.initial_terms.iter().map(Integer::to_string).collect(),
        negated: s.negated,
        note: e.note.clone(),
        unsupported: e.unsupported.clone(),
    }
}

fn all_entries(ctx: &Ctx) -> Vec<CorpusEntry> {
    let mut v = ctx.corpus.clone();
    v.extend(corpus::builtin_corpus());
    v
}

fn cmd_corpus(ctx: &Ctx, cmd: &CorpusCmd) -> Outcome {
    match cmd {
        CorpusCmd::List => {
            ctx.emit(&CorpusRecord { schema: SCHEMA.into(), entries: all_entries(ctx).iter().map(entry_row).collect() })
        }
        CorpusCmd::Show { name } => {
            let e = corpus::lookup_in(&all_entries(ctx), name)?;
            let (binet, n0) = match LerchZeta::new(e.spec.clone(), ctx.precision) {
                Ok(z) => {
                    let rows = z
                        .binet
                        .roots
                        .iter()
                        .zip(&z.binet.coeffs)
                        .map(|(r, c)| BinetRow {
                            root: C::of(&r.value),
                            root_radius: r.radius,
                            coefficient: C::of(&c.value),
                            coefficient_radius: c.radius,
                        })
                        .collect();
                    (rows, Some(z.norm.n0))
                }
                Err(_) => (Vec::new(), None),
            };
            ctx.emit(&ShowRecord {
                schema: SCHEMA.into(),
                entry: entry_row(&e),
                precision: ctx.precision,
                binet,
                n0,
                first_terms: e.spec.terms().take(12).map(|t| t.to_string()).collect(),
            })
        }
    }
}

fn cmd_selftest(ctx: &Ctx, level: LevelArg) -> Outcome {
    let t0 = Instant::now();
    let (lv, name) = match level {
        LevelArg::Quick => (Level::Quick, "quick"),
        LevelArg::Full => (Level::Full, "full"),
    };
    let results = selftest::run_all(lv, ctx.exec);
    let suites: Vec<SuiteRow> = results
        .iter()
        .map(|r| SuiteRow {
            module: r.module.into(),
            name: r.name.into(),
            passed: r.passed,
            failed: r.failed,
            skipped: r.skipped,
            ok: r.ok(),
            failures: r.failures.clone(),
            elapsed_s: r.elapsed.as_secs_f64(),
        })
        .collect();
    let failed = suites.iter().filter(|s| !s.ok).count();
    for s in &suites {
        eprintln!(
            "{:<5} {:<15} {:<24} passed {:>5}  failed {:>4}  skipped {:>4}",
            if s.ok { "ok" } else { "FAIL" },
            s.module,
            s.name,
            s.passed,
            s.failed,
            s.skipped
        );
    }
    eprintln!("{} of {} suites passed", suites.len() - failed, suites.len());
    ctx.emit(&SelftestRecord {
        schema: SCHEMA.into(),
        level: name.into(),
        suites_passed: suites.len() - failed,
        suites_failed: failed,
        suites,
        timing: timing(t0),
    })?;
    if failed > 0 {
        return Err(Failure::Selftest(failed));
    }
    Ok(())
}

fn run(cli: &Cli) -> Outcome {
    if cli.precision < 32 {
        return Err(usage("--precision must be at least 32 bits"));
    }
    let corpus = match &cli.corpus {
        Some(p) => corpus::load_corpus(p)?,
        None => Vec::new(),
    };
    let ctx = Ctx {
        precision: cli.precision,
        tol: cli.tol,
        format: cli.format,
        corpus,
        exec: if cli.sequential { Execution::Sequential } else { Execution::Parallel },
    };
    match &cli.command {
        Command::Eval { seq, z, s, x, method, max_terms } => cmd_eval(&ctx, seq, z, s, x, *method, *max_terms),
        Command::Poles { seq, plane, z, s, window, annulus, with_residues, x, k_cap, j_cap, prefactor, no_numeric } => {
            cmd_poles(
                &ctx,
                PolesArgs {
                    seq,
                    plane: *plane,
                    z,
                    s: s.as_deref(),
                    window: window.as_deref(),
                    annulus: annulus.as_deref(),
                    with_residues: *with_residues,
                    x: *x,
                    k_cap: *k_cap,
                    j_cap: *j_cap,
                    prefactor: *prefactor,
                    numeric: !no_numeric,
                },
            )
        }
        Command::Abscissa { seq, z } => cmd_abscissa(&ctx, seq, z),
        Command::Special { seq, m } => cmd_special(&ctx, seq, *m),
        Command::Corpus { cmd } => cmd_corpus(&ctx, cmd),
        Command::Selftest { level } => cmd_selftest(&ctx, *level),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            if let Some(g) = guidance(&e) {
                eprintln!("hint: {g}");
            }
            ExitCode::from(exit_code(&e))
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Selftest(n)) => {
            eprintln!("{n} suite(s) failed");
            ExitCode::from(10)
        }
    }
}
