//! Exhaustive verification over ranges of `p`, the spectrum survey, and the
//! checkpoint / results-file plumbing.
//!
//! Work is split by whole `p`. Finished batches go to a single collector that
//! emits them in ascending `p`, so result files do not depend on `jobs`.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::mpsc;
use std::time::{Duration, Instant};

use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::{classify, validate_pair, FamilyWitness};
use crate::sigma::SigmaEvaluator;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PairReport {
    pub p: u64,
    pub q: u64,
    #[serde(rename = "family")]
    pub family_witnesses: Vec<FamilyWitness>,
    pub almost_correct: bool,
    pub first_violation_r: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<BTreeSet<i64>>,
    /// Wall time spent on this pair; not serialized, not compared.
    #[serde(skip)]
    pub elapsed_ns: u64,
}

impl PartialEq for PairReport {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p
            && self.q == other.q
            && self.family_witnesses == other.family_witnesses
            && self.almost_correct == other.almost_correct
            && self.first_violation_r == other.first_violation_r
            && self.spectrum == other.spectrum
    }
}

impl Eq for PairReport {}

impl PairReport {
    pub fn is_member(&self) -> bool {
        !self.family_witnesses.is_empty()
    }

    /// Almost correct without a family witness, or the reverse.
    pub fn is_counterexample(&self) -> bool {
        self.almost_correct != self.is_member()
    }
}

/// Report plus the calibrated sign used for it.
fn check_pair_signed(p: u64, q: u64, want_spectrum: bool) -> Result<(PairReport, i8)> {
    let start = Instant::now();
    validate_pair(p, q)?;
    let family_witnesses = classify(p, q)?.witnesses;
    let eval = SigmaEvaluator::new(p, q)?;
    let (first_violation_r, spectrum) = if want_spectrum {
        let spectra = eval.spectrum()?;
        let first = spectra
            .per_r
            .iter()
            .position(|s| s.abs() != 1)
            .map(|i| i as u64 + 1);
        (first, Some(spectra.values))
    } else {
        let mut first = None;
        for r in 1..=(p - 1) / 2 {
            if eval.sigma(r)?.abs() != 1 {
                first = Some(r);
                break;
            }
        }
        (first, None)
    };
    let report = PairReport {
        p,
        q,
        family_witnesses,
        almost_correct: first_violation_r.is_none(),
        first_violation_r,
        spectrum,
        elapsed_ns: start.elapsed().as_nanos() as u64,
    };
    Ok((report, eval.calibration().global_sign))
}

/// Classification and almost-correctness of one pair. Without a spectrum the
/// scan covers `r = 1..=(p-1)/2` and stops at the first `|σ| ≠ 1`.
pub fn check_pair(p: u64, q: u64, want_spectrum: bool) -> Result<PairReport> {
    check_pair_signed(p, q, want_spectrum).map(|(report, _)| report)
}

/// Valid `q` for `p`: even, `1 < q < p²`, coprime to `p`.
pub fn valid_qs(p: u64) -> impl Iterator<Item = u64> {
    (2..p * p).step_by(2).filter(move |q| q.gcd(&p) == 1)
}

/// Which reports go to the results file.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Emit {
    #[default]
    All,
    /// Only pairs that are almost correct or carry a family witness.
    Members,
}

impl FromStr for Emit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(Self::All),
            "members" => Ok(Self::Members),
            _ => Err(Error::Parse {
                what: "emit filter (all|members)",
                input: s.to_string(),
            }),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub p_min: u64,
    pub p_max: u64,
    pub jobs: usize,
    pub checkpoint: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub want_spectrum: bool,
    pub emit: Emit,
}

impl SearchConfig {
    pub fn new(p_min: u64, p_max: u64, jobs: usize) -> Self {
        Self {
            p_min,
            p_max,
            jobs,
            checkpoint: None,
            out: None,
            want_spectrum: false,
            emit: Emit::All,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.p_min < 3 {
            return Err(Error::Parameter {
                kind: "p_min",
                value: self.p_min as i64,
                constraint: "p_min >= 3",
            });
        }
        if self.p_max < self.p_min {
            return Err(Error::Parameter {
                kind: "p_max",
                value: self.p_max as i64,
                constraint: "p_max >= p_min",
            });
        }
        if self.p_max > crate::MAX_P {
            return Err(Error::PTooLarge(self.p_max));
        }
        if self.jobs == 0 {
            return Err(Error::NonPositive { name: "jobs" });
        }
        Ok(())
    }

    fn odd_ps(&self, from: u64) -> Vec<u64> {
        let start = from.max(self.p_min) | 1;
        (start..=self.p_max).step_by(2).collect()
    }
}

/// Calibrated-sign counts over all checked pairs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignTally {
    pub plus: u64,
    pub minus: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SearchSummary {
    pub p_range: (u64, u64),
    /// Pairs checked by this run; pairs restored on resume are not counted.
    pub pairs_checked: u64,
    /// Includes counterexamples restored from the results file on resume.
    pub counterexamples: Vec<PairReport>,
    pub conjecture_holds: bool,
    pub calibration_signs: SignTally,
    /// Smallest `p` computed by this run when it resumed a checkpoint.
    pub resumed_from: Option<u64>,
    #[serde(skip)]
    pub wall_time: Duration,
}

/// Header line of a results file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResultsHeader {
    pub tool: String,
    pub version: String,
    pub p_min: u64,
    pub p_max: u64,
    pub spectrum: bool,
    pub emit: Emit,
}

impl ResultsHeader {
    fn for_config(config: &SearchConfig) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            p_min: config.p_min,
            p_max: config.p_max,
            spectrum: config.want_spectrum,
            emit: config.emit,
        }
    }
}

struct Batch {
    p: u64,
    pairs_checked: u64,
    emitted: Vec<PairReport>,
    counterexamples: Vec<PairReport>,
    signs: SignTally,
}

fn check_p(p: u64, config: &SearchConfig) -> Result<Batch> {
    let keep_all = config.out.is_some() && config.emit == Emit::All;
    let keep_members = config.out.is_some() && config.emit == Emit::Members;
    let mut batch = Batch {
        p,
        pairs_checked: 0,
        emitted: Vec::new(),
        counterexamples: Vec::new(),
        signs: SignTally::default(),
    };
    for q in valid_qs(p) {
        let (report, sign) = check_pair_signed(p, q, config.want_spectrum)?;
        batch.pairs_checked += 1;
        if sign > 0 {
            batch.signs.plus += 1;
        } else {
            batch.signs.minus += 1;
        }
        if report.is_counterexample() {
            batch.counterexamples.push(report.clone());
        }
        if keep_all || (keep_members && (report.almost_correct || report.is_member())) {
            batch.emitted.push(report);
        }
    }
    Ok(batch)
}

/// Checks every valid pair with `p_min ≤ p ≤ p_max`, `p` odd. A fresh run
/// truncates the checkpoint and results files.
pub fn search_range(config: &SearchConfig) -> Result<SearchSummary> {
    config.validate()?;
    let mut out = match &config.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            writeln!(w, "{}", to_json(&ResultsHeader::for_config(config)))?;
            w.flush()?;
            Some(w)
        }
        None => None,
    };
    let mut checkpoint = match &config.checkpoint {
        Some(path) => Some(File::create(path)?),
        None => None,
    };
    run_sweep(
        config,
        config.odd_ps(config.p_min),
        &mut out,
        &mut checkpoint,
        Vec::new(),
        None,
    )
}

/// Continues a search from `config.checkpoint`, starting at the smallest odd
/// `p` not marked done. Results-file records at or above that `p` are
/// dropped before appending. A missing or empty checkpoint runs the whole range.
pub fn resume(config: &SearchConfig) -> Result<SearchSummary> {
    config.validate()?;
    let Some(ck_path) = &config.checkpoint else {
        return search_range(config);
    };
    let done = if ck_path.exists() {
        read_checkpoint(ck_path)?
    } else {
        BTreeSet::new()
    };
    let start = config
        .odd_ps(config.p_min)
        .into_iter()
        .find(|p| !done.contains(p))
        .unwrap_or(config.p_max.saturating_add(2));

    let mut restored = Vec::new();
    let mut out = match &config.out {
        Some(path) => {
            let (header, kept) = if path.exists() {
                read_results(path)?
            } else {
                (None, Vec::new())
            };
            let kept: Vec<PairReport> = kept.into_iter().filter(|r| r.p < start).collect();
            let mut w = BufWriter::new(File::create(path)?);
            let header = header.unwrap_or_else(|| ResultsHeader::for_config(config));
            writeln!(w, "{}", to_json(&header))?;
            for r in &kept {
                writeln!(w, "{}", to_json(r))?;
            }
            w.flush()?;
            restored = kept
                .into_iter()
                .filter(PairReport::is_counterexample)
                .collect();
            Some(w)
        }
        None => None,
    };

    // Rewrite the checkpoint so it lists exactly the p values below `start`.
    let mut ck = File::create(ck_path)?;
    for p in config
        .odd_ps(config.p_min)
        .into_iter()
        .filter(|&p| p < start)
    {
        writeln!(ck, "done p={p}")?;
    }
    ck.sync_data()?;
    let mut checkpoint = Some(ck);
    run_sweep(
        config,
        config.odd_ps(start),
        &mut out,
        &mut checkpoint,
        restored,
        Some(start),
    )
}

fn run_sweep(
    config: &SearchConfig,
    ps: Vec<u64>,
    out: &mut Option<BufWriter<File>>,
    checkpoint: &mut Option<File>,
    restored: Vec<PairReport>,
    resumed_from: Option<u64>,
) -> Result<SearchSummary> {
    let started = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| Error::Io(std::io::Error::other(e)))?;
    let cancel = AtomicBool::new(false);
    let (tx, rx) = mpsc::channel::<Result<Batch>>();

    let mut summary = SearchSummary {
        p_range: (config.p_min, config.p_max),
        pairs_checked: 0,
        counterexamples: restored,
        conjecture_holds: true,
        calibration_signs: SignTally::default(),
        resumed_from: resumed_from.filter(|&p| p <= config.p_max),
        wall_time: Duration::ZERO,
    };

    let collected: Result<()> = std::thread::scope(|scope| {
        let work = &ps;
        let cancel = &cancel;
        scope.spawn(move || {
            pool.install(|| {
                work.par_iter().for_each_with(tx, |tx, &p| {
                    if cancel.load(Ordering::Relaxed) {
                        return;
                    }
                    let _ = tx.send(check_p(p, config));
                });
            });
        });

        let mut pending: BTreeMap<u64, Batch> = BTreeMap::new();
        let mut next = 0usize;
        let mut failure = None;
        for msg in rx {
            if failure.is_some() {
                continue;
            }
            let batch = match msg {
                Ok(b) => b,
                Err(e) => {
                    cancel.store(true, Ordering::Relaxed);
                    failure = Some(e);
                    continue;
                }
            };
            pending.insert(batch.p, batch);
            while next < ps.len() {
                let Some(batch) = pending.remove(&ps[next]) else {
                    break;
                };
                if let Err(e) = emit_batch(batch, out, checkpoint, &mut summary) {
                    cancel.store(true, Ordering::Relaxed);
                    failure = Some(e);
                    break;
                }
                next += 1;
            }
        }
        failure.map_or(Ok(()), Err)
    });
    collected?;

    summary.conjecture_holds = summary.counterexamples.is_empty();
    summary.wall_time = started.elapsed();
    Ok(summary)
}

fn emit_batch(
    batch: Batch,
    out: &mut Option<BufWriter<File>>,
    checkpoint: &mut Option<File>,
    summary: &mut SearchSummary,
) -> Result<()> {
    if let Some(w) = out {
        for report in &batch.emitted {
            writeln!(w, "{}", to_json(report))?;
        }
        w.flush()?;
    }
    if let Some(ck) = checkpoint {
        writeln!(ck, "done p={}", batch.p)?;
        ck.flush()?;
    }
    summary.pairs_checked += batch.pairs_checked;
    summary.calibration_signs.plus += batch.signs.plus;
    summary.calibration_signs.minus += batch.signs.minus;
    summary.counterexamples.extend(batch.counterexamples);
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("plain data always serializes")
}

/// The `p` values marked done. Blank lines are ignored.
pub fn read_checkpoint(path: &Path) -> Result<BTreeSet<u64>> {
    let reader = BufReader::new(File::open(path)?);
    let mut done = BTreeSet::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let p = trimmed
            .strip_prefix("done p=")
            .and_then(|v| v.parse::<u64>().ok())
            .ok_or_else(|| Error::Checkpoint {
                path: path.to_path_buf(),
                line: idx + 1,
                content: line.clone(),
            })?;
        done.insert(p);
    }
    Ok(done)
}

/// Parses a results file into its header (if present) and records.
pub fn read_results(path: &Path) -> Result<(Option<ResultsHeader>, Vec<PairReport>)> {
    let reader = BufReader::new(File::open(path)?);
    let mut header = None;
    let mut reports = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let bad = |e: serde_json::Error| Error::Results {
            path: path.to_path_buf(),
            line: idx + 1,
            detail: e.to_string(),
        };
        if idx == 0 {
            if let Ok(h) = serde_json::from_str::<ResultsHeader>(&line) {
                header = Some(h);
                continue;
            }
        }
        reports.push(serde_json::from_str(&line).map_err(bad)?);
    }
    Ok((header, reports))
}

/// All valid pairs with `p ≤ p_max` whose spectrum is exactly `target`,
/// in ascending `(p, q)`.
pub fn survey_spectrum(p_max: u64, target: &BTreeSet<i64>) -> Result<Vec<PairReport>> {
    if p_max < 3 {
        return Err(Error::Parameter {
            kind: "p_max",
            value: p_max as i64,
            constraint: "p_max >= 3",
        });
    }
    if target.is_empty() {
        return Err(Error::Parse {
            what: "spectrum target (non-empty set of odd integers)",
            input: String::new(),
        });
    }
    let ps: Vec<u64> = (3..=p_max).step_by(2).collect();
    let per_p: Vec<Vec<PairReport>> = ps
        .par_iter()
        .map(|&p| {
            let mut hits = Vec::new();
            for q in valid_qs(p) {
                let report = check_pair(p, q, true)?;
                if report.spectrum.as_ref() == Some(target) {
                    hits.push(report);
                }
            }
            Ok(hits)
        })
        .collect::<Result<_>>()?;
    Ok(per_p.into_iter().flatten().collect())
}
