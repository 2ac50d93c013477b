//! Command-line front end.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::contfrac::{
    eval_signed_cf, fraction_to_pair, generate_form_hits, word_for, FormFamily, FormKind, SignedCF,
    SweepBounds,
};
use crate::dedekind::{
    dedekind_sum, fourier_dedekind, lattice_count_l, pick_via_fds, reciprocity_check, sikora_check,
    weak_criterion, weak_scan,
};
use crate::error::{Error, Result};
use crate::exact::HalfInteger;
use crate::families::{classify, validate_pair};
use crate::lattice::{
    census_bruteforce, census_floorsum, pick_value, reduce_parameters, sigma_by_count,
    sigma_from_census, TriangleParams,
};
use crate::report::{render_report, Format};
use crate::search::{
    check_pair, resume, search_range, survey_spectrum, Emit, SearchConfig, SearchSummary,
};
use crate::sigma::{round_to_odd, spectrum, CotangentKernel, SigmaEvaluator};

/// Largest `p` for `dedekind --sikora` without `--force`.
pub const SIKORA_P_LIMIT: u64 = 301;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_COUNTEREXAMPLE: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Count,
    Floorsum,
    Cf,
    Cot,
    Fds,
}

impl Method {
    fn name(self) -> &'static str {
        match self {
            Self::Count => "count",
            Self::Floorsum => "floorsum",
            Self::Cf => "cf",
            Self::Cot => "cot",
            Self::Fds => "fds",
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "count" => Ok(Self::Count),
            "floorsum" => Ok(Self::Floorsum),
            "cf" => Ok(Self::Cf),
            "cot" => Ok(Self::Cot),
            "fds" => Ok(Self::Fds),
            _ => Err(Error::Parse {
                what: "method (count|floorsum|cf|cot|fds)",
                input: s.to_string(),
            }),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "picklab",
    version,
    about = "Lattice points in the triangles rΔ(p,q) and the σ invariant"
)]
pub struct Cli {
    /// Output format: human, jsonl or csv.
    #[arg(long, global = true, default_value = "human")]
    pub format: Format,
    /// Suppress human summaries.
    #[arg(long, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Pick(rΔ(p,q)) = interior + boundary/2 + 1/2.
    Pick(TriangleArgs),
    /// σ(p², q, r).
    Sigma(TriangleArgs),
    /// The set {σ(p², q, r) : r = 1..p-1}.
    Spectrum(PairArgs),
    /// Casson–Gordon family witnesses.
    Classify(PairArgs),
    /// Classification plus almost-correctness for one pair.
    Check(CheckArgs),
    /// Exhaustive check over a range of p.
    Search(SearchArgs),
    /// Pairs whose spectrum equals a target set.
    Survey(SurveyArgs),
    /// q values satisfying the Dedekind-sum necessary condition.
    Weakscan(WeakscanArgs),
    /// Dedekind sums, the σ-sum identity and the weak criterion.
    Dedekind(DedekindArgs),
    /// Fourier–Dedekind sums and the lattice-point count built from them.
    Fds(FdsArgs),
    /// Signed continued fractions and family forms.
    Cf(CfArgs),
    /// Write q as 2kp² ± q' with 1 < q' < p².
    Reduce(PairArgs),
}

#[derive(Debug, Args)]
pub struct TriangleArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long)]
    pub q: u64,
    #[arg(long, default_value_t = 1)]
    pub r: u64,
    /// count, floorsum, cf, cot or fds.
    #[arg(long, default_value = "floorsum")]
    pub method: Method,
}

#[derive(Debug, Args)]
pub struct PairArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long)]
    pub q: u64,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long)]
    pub q: u64,
    /// Compute the full spectrum instead of stopping at the first violation.
    #[arg(long)]
    pub spectrum: bool,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[arg(long, default_value_t = 3)]
    pub p_min: u64,
    #[arg(long)]
    pub p_max: u64,
    /// Worker threads; defaults to the number of CPUs.
    #[arg(long, env = "PICKLAB_JOBS")]
    pub jobs: Option<usize>,
    /// Results file, one JSON record per line after a header line.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Append-only progress file with lines "done p=<p>".
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    /// Continue from --checkpoint instead of starting over.
    #[arg(long, requires = "checkpoint")]
    pub resume: bool,
    /// Record full spectra (disables early exit).
    #[arg(long)]
    pub spectrum: bool,
    /// all, or members (almost-correct or family pairs only).
    #[arg(long, default_value = "all")]
    pub emit: Emit,
}

#[derive(Debug, Args)]
pub struct SurveyArgs {
    #[arg(long)]
    pub p_max: u64,
    /// Comma-separated odd integers, e.g. "-3,-1".
    #[arg(long, allow_hyphen_values = true, default_value = "-3,-1")]
    pub target: String,
    /// Also write the hits as JSON lines to this file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct WeakscanArgs {
    #[arg(long)]
    pub p: u64,
}

#[derive(Debug, Args)]
pub struct DedekindArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<i64>,
    #[arg(long)]
    pub b: Option<u64>,
    /// Compare Σ_r σ(p²,q,r) with 4s(q,p) - 4p·s(q,p²).
    #[arg(long, requires_all = ["p", "q"], conflicts_with = "weak")]
    pub sikora: bool,
    /// Evaluate (4/(p-1))·|s(q,p) - p·s(q,p²)| ≤ 1.
    #[arg(long, requires_all = ["p", "q"])]
    pub weak: bool,
    #[arg(long)]
    pub p: Option<u64>,
    #[arg(long)]
    pub q: Option<u64>,
    /// Allow --sikora above p = 301.
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Args)]
pub struct FdsArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub n: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    pub a1: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    pub a2: Option<i64>,
    #[arg(long)]
    pub b: Option<u64>,
    /// Lattice points of tΔ(p,q) from Fourier–Dedekind sums.
    #[arg(long, requires_all = ["p", "q"], conflicts_with = "reciprocity")]
    pub count: bool,
    /// Check s₀(p²,1;q) = -s₀(q,1;p²) - c + 1.
    #[arg(long, requires_all = ["p", "q"])]
    pub reciprocity: bool,
    #[arg(long)]
    pub p: Option<u64>,
    #[arg(long)]
    pub q: Option<u64>,
    #[arg(long, default_value_t = 1)]
    pub t: u64,
}

#[derive(Debug, Args)]
pub struct CfArgs {
    /// Comma-separated entries, e.g. "6,-4,-2,2".
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["family", "generate"])]
    pub eval: Option<String>,
    /// Form family: cg-palindrome, cg-even-a, cg-even-b, c1..c5, sporadic.
    #[arg(long, conflicts_with = "generate")]
    pub family: Option<FormKind>,
    /// Comma-separated family parameters.
    #[arg(long, allow_hyphen_values = true, default_value = "")]
    pub params: String,
    /// Generate pairs for these kinds ("cg", "c", or a comma list).
    #[arg(long, requires = "p_max")]
    pub generate: Option<String>,
    #[arg(long)]
    pub p_max: Option<u64>,
}

struct Ctx<'a> {
    out: &'a mut dyn Write,
    format: Format,
    quiet: bool,
}

impl Ctx<'_> {
    /// Human: `human` verbatim. jsonl: one object. csv: header plus one row.
    fn record(&mut self, fields: &[(&str, Value)], human: &str) -> Result<()> {
        match self.format {
            Format::Human => writeln!(self.out, "{human}")?,
            Format::Jsonl => {
                let map: serde_json::Map<String, Value> = fields
                    .iter()
                    .map(|(k, v)| (k.to_string(), v.clone()))
                    .collect();
                writeln!(self.out, "{}", Value::Object(map))?;
            }
            Format::Csv => {
                let keys: Vec<&str> = fields.iter().map(|(k, _)| *k).collect();
                let vals: Vec<String> = fields.iter().map(|(_, v)| csv_cell(v)).collect();
                writeln!(self.out, "{}\n{}", keys.join(","), vals.join(","))?;
            }
        }
        Ok(())
    }
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Array(items) => items.iter().map(csv_cell).collect::<Vec<_>>().join(";"),
        other => other.to_string(),
    }
}

fn missing(name: &'static str) -> Error {
    Error::Parse {
        what: name,
        input: "<missing>".to_string(),
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_)
        | Error::Checkpoint { .. }
        | Error::Results { .. }
        | Error::FormulaMismatch { .. }
        | Error::Calibration { .. }
        | Error::CotangentRounding { .. }
        | Error::Reconstruction { .. }
        | Error::NonIntegral { .. } => EXIT_FAILURE,
        _ => EXIT_USAGE,
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    let mut ctx = Ctx {
        out,
        format: cli.format,
        quiet: cli.quiet,
    };
    match dispatch(cli.command, &mut ctx) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(command: Command, ctx: &mut Ctx) -> Result<i32> {
    match command {
        Command::Pick(a) => cmd_pick(a, ctx),
        Command::Sigma(a) => cmd_sigma(a, ctx),
        Command::Spectrum(a) => cmd_spectrum(a, ctx),
        Command::Classify(a) => cmd_classify(a, ctx),
        Command::Check(a) => cmd_check(a, ctx),
        Command::Search(a) => cmd_search(a, ctx),
        Command::Survey(a) => cmd_survey(a, ctx),
        Command::Weakscan(a) => cmd_weakscan(a, ctx),
        Command::Dedekind(a) => cmd_dedekind(a, ctx),
        Command::Fds(a) => cmd_fds(a, ctx),
        Command::Cf(a) => cmd_cf(a, ctx),
        Command::Reduce(a) => cmd_reduce(a, ctx),
    }
    .map(|()| EXIT_OK)
    .or_else(|e| match e {
        Halt::Code(code) => Ok(code),
        Halt::Error(e) => Err(e),
    })
}

/// Early exit with a non-zero code that is not an error.
enum Halt {
    Code(i32),
    Error(Error),
}

impl<E: Into<Error>> From<E> for Halt {
    fn from(e: E) -> Self {
        Halt::Error(e.into())
    }
}

type CmdResult = std::result::Result<(), Halt>;

fn cmd_pick(a: TriangleArgs, ctx: &mut Ctx) -> CmdResult {
    let tri = TriangleParams::new(a.p, a.q, a.r)?;
    let pick: HalfInteger = match a.method {
        Method::Count => pick_value(&census_bruteforce(&tri)),
        Method::Floorsum => pick_value(&census_floorsum(&tri)?),
        Method::Fds => pick_via_fds(a.p, a.q, a.r)?,
        Method::Cf | Method::Cot => {
            return Err(Error::Parse {
                what: "method for pick (count|floorsum|fds)",
                input: a.method.name().to_string(),
            }
            .into())
        }
    };
    let fields = [
        ("p", json!(a.p)),
        ("q", json!(a.q)),
        ("r", json!(a.r)),
        ("method", json!(a.method.name())),
        ("pick", json!(pick.to_string())),
    ];
    ctx.record(&fields, &pick.to_string())?;
    Ok(())
}

fn cmd_sigma(a: TriangleArgs, ctx: &mut Ctx) -> CmdResult {
    let (p, q, r) = (a.p, a.q, a.r);
    let sigma: i64 = match a.method {
        Method::Count => {
            let tri = TriangleParams::new(p, q, r)?;
            tri.require_coprime()?;
            let s: BigInt = sigma_from_census(&tri, &census_bruteforce(&tri));
            i64::try_from(&s).map_err(|e: num_bigint::TryFromBigIntError<()>| Error::Parse {
                what: "sigma within i64",
                input: e.to_string(),
            })?
        }
        Method::Floorsum => sigma_by_count(p, q, r)?,
        Method::Cf => {
            TriangleParams::new(p, q, r)?;
            SigmaEvaluator::new(p, q)?.sigma(r)?
        }
        Method::Cot => {
            TriangleParams::new(p, q, r)?;
            round_to_odd(CotangentKernel::new(p, q)?.sigma(r))?
        }
        Method::Fds => {
            let pick = pick_via_fds(p, q, r)?;
            // σ = 2qr² - 4·Pick + 1 = 2qr² - 2·(2·Pick) + 1.
            let s = BigInt::from(q) * r * r * 2 - pick.twice_value() * 2 + 1;
            i64::try_from(&s).map_err(|e: num_bigint::TryFromBigIntError<()>| Error::Parse {
                what: "sigma within i64",
                input: e.to_string(),
            })?
        }
    };
    let fields = [
        ("p", json!(p)),
        ("q", json!(q)),
        ("r", json!(r)),
        ("method", json!(a.method.name())),
        ("sigma", json!(sigma)),
    ];
    ctx.record(&fields, &sigma.to_string())?;
    Ok(())
}

fn set_text(values: &BTreeSet<i64>) -> String {
    let parts: Vec<String> = values.iter().map(i64::to_string).collect();
    format!("{{{}}}", parts.join(","))
}

fn cmd_spectrum(a: PairArgs, ctx: &mut Ctx) -> CmdResult {
    let spectra = spectrum(a.p, a.q)?;
    let fields = [
        ("p", json!(a.p)),
        ("q", json!(a.q)),
        ("spectrum", json!(spectra.values)),
        ("per_r", json!(spectra.per_r)),
    ];
    ctx.record(&fields, &set_text(&spectra.values))?;
    Ok(())
}

fn cmd_classify(a: PairArgs, ctx: &mut Ctx) -> CmdResult {
    let c = classify(a.p, a.q)?;
    let names: Vec<String> = c.witnesses.iter().map(ToString::to_string).collect();
    let human = if names.is_empty() {
        "none".to_string()
    } else {
        names.join(" ")
    };
    let fields = [
        ("p", json!(a.p)),
        ("q", json!(a.q)),
        ("family", json!(names)),
    ];
    ctx.record(&fields, &human)?;
    Ok(())
}

fn cmd_check(a: CheckArgs, ctx: &mut Ctx) -> CmdResult {
    let report = check_pair(a.p, a.q, a.spectrum)?;
    write!(ctx.out, "{}", render_report(&[report], ctx.format))?;
    Ok(())
}

fn cmd_search(a: SearchArgs, ctx: &mut Ctx) -> CmdResult {
    let jobs = match a.jobs {
        Some(j) => j,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    let config = SearchConfig {
        p_min: a.p_min,
        p_max: a.p_max,
        jobs,
        checkpoint: a.checkpoint,
        out: a.out,
        want_spectrum: a.spectrum,
        emit: a.emit,
    };
    let summary = if a.resume {
        resume(&config)?
    } else {
        search_range(&config)?
    };
    print_summary(&summary, jobs, ctx)?;
    if summary.conjecture_holds {
        Ok(())
    } else {
        Err(Halt::Code(EXIT_COUNTEREXAMPLE))
    }
}

fn print_summary(s: &SearchSummary, jobs: usize, ctx: &mut Ctx) -> Result<()> {
    match ctx.format {
        Format::Human => {
            if !s.counterexamples.is_empty() {
                write!(
                    ctx.out,
                    "{}",
                    render_report(&s.counterexamples, Format::Human)
                )?;
            }
            if !ctx.quiet {
                let verdict = if s.conjecture_holds {
                    "conjecture holds".to_string()
                } else {
                    format!("{} counterexample(s)", s.counterexamples.len())
                };
                let resumed = s
                    .resumed_from
                    .map(|p| format!(", resumed at p={p}"))
                    .unwrap_or_default();
                writeln!(
                    ctx.out,
                    "p in [{}, {}]: {} pairs checked, {verdict}; calibrated sign +1 x{}, -1 x{}{resumed} ({:.2} s, {jobs} jobs)",
                    s.p_range.0,
                    s.p_range.1,
                    s.pairs_checked,
                    s.calibration_signs.plus,
                    s.calibration_signs.minus,
                    s.wall_time.as_secs_f64(),
                )?;
            }
        }
        Format::Jsonl => {
            writeln!(
                ctx.out,
                "{}",
                serde_json::to_string(s).expect("plain data always serializes")
            )?;
        }
        Format::Csv => {
            write!(
                ctx.out,
                "{}",
                render_report(&s.counterexamples, Format::Csv)
            )?;
        }
    }
    Ok(())
}

fn parse_target(text: &str) -> Result<BTreeSet<i64>> {
    let err = || Error::Parse {
        what: "spectrum target (comma-separated odd integers)",
        input: text.to_string(),
    };
    let target: BTreeSet<i64> = text
        .trim_matches(|c| c == '{' || c == '}')
        .split(',')
        .map(|t| t.trim().parse::<i64>().map_err(|_| err()))
        .collect::<Result<_>>()?;
    if target.is_empty() || target.iter().any(|v| v % 2 == 0) {
        return Err(err());
    }
    Ok(target)
}

fn cmd_survey(a: SurveyArgs, ctx: &mut Ctx) -> CmdResult {
    let target = parse_target(&a.target)?;
    let hits = survey_spectrum(a.p_max, &target)?;
    if let Some(path) = &a.out {
        std::fs::write(path, render_report(&hits, Format::Jsonl))?;
    }
    write!(ctx.out, "{}", render_report(&hits, ctx.format))?;
    if ctx.format == Format::Human && !ctx.quiet {
        writeln!(
            ctx.out,
            "{} pair(s) with spectrum {}",
            hits.len(),
            set_text(&target)
        )?;
    }
    Ok(())
}

fn cmd_weakscan(a: WeakscanArgs, ctx: &mut Ctx) -> CmdResult {
    let qs = weak_scan(a.p)?;
    let human: Vec<String> = qs.iter().map(u64::to_string).collect();
    let fields = [("p", json!(a.p)), ("q", json!(qs))];
    ctx.record(&fields, &human.join(" "))?;
    Ok(())
}

fn cmd_dedekind(a: DedekindArgs, ctx: &mut Ctx) -> CmdResult {
    if a.sikora || a.weak {
        let (p, q) = (
            a.p.ok_or_else(|| missing("--p"))?,
            a.q.ok_or_else(|| missing("--q"))?,
        );
        validate_pair(p, q)?;
        if a.sikora {
            if p > SIKORA_P_LIMIT && !a.force {
                return Err(Error::Parameter {
                    kind: "p",
                    value: p as i64,
                    constraint: "p <= 301 for --sikora unless --force",
                }
                .into());
            }
            let c = sikora_check(p, q)?;
            let fields = [
                ("p", json!(p)),
                ("q", json!(q)),
                ("sigma_sum", json!(c.lhs)),
                ("dedekind_expression", json!(c.rhs.to_string())),
                ("equal", json!(c.equal)),
            ];
            let human = format!(
                "{} {} {}",
                c.lhs,
                c.rhs,
                if c.equal { "equal" } else { "differ" }
            );
            ctx.record(&fields, &human)?;
        } else {
            let w = weak_criterion(p, q)?;
            let fields = [
                ("p", json!(p)),
                ("q", json!(q)),
                ("value", json!(w.value.to_string())),
                ("satisfied", json!(w.satisfied)),
            ];
            let human = format!(
                "{} {}",
                w.value,
                if w.satisfied { "satisfied" } else { "violated" }
            );
            ctx.record(&fields, &human)?;
        }
        return Ok(());
    }
    let (aa, b) = (
        a.a.ok_or_else(|| missing("--a"))?,
        a.b.ok_or_else(|| missing("--b"))?,
    );
    let s = dedekind_sum(aa, b)?;
    let fields = [
        ("a", json!(aa)),
        ("b", json!(b)),
        ("value", json!(s.to_string())),
    ];
    ctx.record(&fields, &s.to_string())?;
    Ok(())
}

fn cmd_fds(a: FdsArgs, ctx: &mut Ctx) -> CmdResult {
    if a.count || a.reciprocity {
        let (p, q) = (
            a.p.ok_or_else(|| missing("--p"))?,
            a.q.ok_or_else(|| missing("--q"))?,
        );
        if a.count {
            let total = lattice_count_l(p, q, a.t)?;
            let fields = [
                ("p", json!(p)),
                ("q", json!(q)),
                ("t", json!(a.t)),
                ("count", json!(total.to_string())),
            ];
            ctx.record(&fields, &total.to_string())?;
        } else {
            let c = reciprocity_check(p, q)?;
            let fields = [
                ("p", json!(p)),
                ("q", json!(q)),
                ("lhs", json!(c.lhs.to_string())),
                ("rhs", json!(c.rhs.to_string())),
                ("holds", json!(c.holds)),
            ];
            let human = format!(
                "{} {} {}",
                c.lhs,
                c.rhs,
                if c.holds { "holds" } else { "fails" }
            );
            ctx.record(&fields, &human)?;
        }
        return Ok(());
    }
    let n = a.n.ok_or_else(|| missing("--n"))?;
    let a1 = a.a1.ok_or_else(|| missing("--a1"))?;
    let a2 = a.a2.ok_or_else(|| missing("--a2"))?;
    let b = a.b.ok_or_else(|| missing("--b"))?;
    let v = fourier_dedekind(n, a1, a2, b)?;
    let fields = [
        ("n", json!(n)),
        ("a1", json!(a1)),
        ("a2", json!(a2)),
        ("b", json!(b)),
        ("value", json!(v.value.to_string())),
        ("residual", json!(v.residual)),
    ];
    ctx.record(&fields, &v.value.to_string())?;
    Ok(())
}

fn pair_text(pair: Option<(u64, u64)>) -> String {
    pair.map_or("-".to_string(), |(p, q)| format!("({p},{q})"))
}

fn cmd_cf(a: CfArgs, ctx: &mut Ctx) -> CmdResult {
    if let Some(kinds) = &a.generate {
        let kinds = FormKind::parse_list(kinds)?;
        let p_max = a.p_max.ok_or_else(|| missing("--p-max"))?;
        let hits = generate_form_hits(&kinds, &SweepBounds::new(p_max));
        for h in hits {
            let fields = [
                ("p", json!(h.p)),
                ("q", json!(h.q)),
                ("family", json!(h.family.to_string())),
                ("variant", json!(format!("{:?}", h.variant).to_lowercase())),
            ];
            let human = format!("({},{}) {} {:?}", h.p, h.q, h.family, h.variant);
            ctx.record(&fields, &human)?;
        }
        return Ok(());
    }
    let word = match (&a.eval, a.family) {
        (Some(text), _) => text.parse::<SignedCF>()?,
        (None, Some(kind)) => {
            let params: Vec<i64> = if a.params.trim().is_empty() {
                Vec::new()
            } else {
                a.params
                    .split(',')
                    .map(|t| {
                        t.trim().parse::<i64>().map_err(|_| Error::Parse {
                            what: "family parameters",
                            input: a.params.clone(),
                        })
                    })
                    .collect::<Result<_>>()?
            };
            word_for(&FormFamily::new(kind, params))?
        }
        (None, None) => return Err(missing("--eval, --family or --generate").into()),
    };
    let value = eval_signed_cf(&word)?;
    let pair = fraction_to_pair(&value);
    let fields = [
        ("word", json!(word.entries())),
        ("value", json!(value.to_string())),
        ("pair", pair.map_or(Value::Null, |(p, q)| json!([p, q]))),
    ];
    let human = if a.eval.is_some() {
        format!("{value}\n{}", pair_text(pair))
    } else {
        format!("{word}\n{value}\n{}", pair_text(pair))
    };
    ctx.record(&fields, &human)?;
    Ok(())
}

fn cmd_reduce(a: PairArgs, ctx: &mut Ctx) -> CmdResult {
    let red = reduce_parameters(a.p, a.q)?;
    let sign = if red.sign > 0 { "+" } else { "-" };
    let fields = [
        ("p", json!(a.p)),
        ("q_raw", json!(a.q)),
        ("k", json!(red.k)),
        ("sign", json!(red.sign)),
        ("q", json!(red.q_reduced)),
    ];
    let human = format!("k={} sign={sign} q={}", red.k, red.q_reduced);
    ctx.record(&fields, &human)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("picklab").chain(args.iter().copied());
        let code = run(argv, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn scalar_commands() {
        assert_eq!(
            run_str(&["sigma", "--p", "5", "--q", "4", "--r", "1"]),
            (0, "-1\n".into(), String::new())
        );
        let (code, out, _) = run_str(&[
            "pick", "--p", "11", "--q", "46", "--r", "2", "--method", "fds",
        ]);
        assert_eq!((code, out.as_str()), (0, "92\n"));
        let (code, out, _) = run_str(&["cf", "--eval", "6,-4,-2,2"]);
        assert_eq!((code, out.as_str()), (0, "81/14\n(9,14)\n"));
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run_str(&["bogus"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["sigma", "--p", "5"]).0, EXIT_USAGE);
        let (code, _, err) = run_str(&["classify", "--p", "4", "--q", "6"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("p = 4 must be odd"), "{err}");
        assert_eq!(
            run_str(&["pick", "--p", "5", "--q", "4", "--method", "cot"]).0,
            EXIT_USAGE
        );
    }

    #[test]
    fn sikora_guard() {
        let (code, _, err) = run_str(&["dedekind", "--sikora", "--p", "303", "--q", "2"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("--force"));
    }

    #[test]
    fn target_parsing() {
        assert_eq!(parse_target("-3,-1").unwrap(), [-3, -1].into());
        assert_eq!(parse_target("{1}").unwrap(), [1].into());
        assert!(parse_target("2").is_err());
        assert!(parse_target("").is_err());
    }
}
