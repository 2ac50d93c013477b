//! Text renderings of pair reports.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::Error;
use crate::search::PairReport;

pub const CSV_HEADER: &str = "p,q,family,almost_correct,first_violation_r,spectrum";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Format {
    #[default]
    Human,
    Jsonl,
    Csv,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "human" => Ok(Self::Human),
            "jsonl" => Ok(Self::Jsonl),
            "csv" => Ok(Self::Csv),
            _ => Err(Error::Parse {
                what: "format (human|jsonl|csv)",
                input: s.to_string(),
            }),
        }
    }
}

fn join<T: ToString>(items: impl IntoIterator<Item = T>, sep: &str) -> String {
    items
        .into_iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(sep)
}

/// `-3;-1`, or empty when absent.
fn spectrum_cell(report: &PairReport) -> String {
    report
        .spectrum
        .as_ref()
        .map(|s| join(s, ";"))
        .unwrap_or_default()
}

pub fn csv_line(report: &PairReport) -> String {
    format!(
        "{},{},{},{},{},{}",
        report.p,
        report.q,
        join(&report.family_witnesses, ";"),
        report.almost_correct,
        report
            .first_violation_r
            .map(|r| r.to_string())
            .unwrap_or_default(),
        spectrum_cell(report),
    )
}

pub fn jsonl_line(report: &PairReport) -> String {
    serde_json::to_string(report).expect("plain data always serializes")
}

/// Every line ends in a newline. CSV always starts with [`CSV_HEADER`].
pub fn render_report(reports: &[PairReport], format: Format) -> String {
    let mut out = String::new();
    match format {
        Format::Csv => {
            out.push_str(CSV_HEADER);
            out.push('\n');
            for r in reports {
                out.push_str(&csv_line(r));
                out.push('\n');
            }
        }
        Format::Jsonl => {
            for r in reports {
                out.push_str(&jsonl_line(r));
                out.push('\n');
            }
        }
        Format::Human => {
            let rows: Vec<[String; 6]> = reports
                .iter()
                .map(|r| {
                    [
                        r.p.to_string(),
                        r.q.to_string(),
                        if r.family_witnesses.is_empty() {
                            "-".to_string()
                        } else {
                            join(&r.family_witnesses, " ")
                        },
                        if r.almost_correct { "yes" } else { "no" }.to_string(),
                        r.first_violation_r
                            .map_or("-".to_string(), |v| v.to_string()),
                        r.spectrum
                            .as_ref()
                            .map_or("-".to_string(), |s| format!("{{{}}}", join(s, ","))),
                    ]
                })
                .collect();
            let header = [
                "p",
                "q",
                "family",
                "almost correct",
                "first bad r",
                "spectrum",
            ];
            let mut widths = header.map(str::len);
            for row in &rows {
                for (w, cell) in widths.iter_mut().zip(row) {
                    *w = (*w).max(cell.chars().count());
                }
            }
            let mut line = |cells: &[&str]| {
                let padded: Vec<String> = cells
                    .iter()
                    .zip(widths)
                    .map(|(c, w)| format!("{c:<w$}"))
                    .collect();
                let _ = writeln!(out, "{}", padded.join("  ").trim_end());
            };
            line(&header);
            for row in &rows {
                line(&row.each_ref().map(String::as_str));
            }
        }
    }
    out
}
