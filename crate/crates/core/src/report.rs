//! CSV and manifest output.
//!
//! Floats are written in shortest round-trip form (at most 17 significant
//! digits), so identical reports serialize to identical bytes.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::lab::{risk_convergence_check, CellMetrics, CellRecord, ConvergenceReport};

pub const CSV_HEADER: [&str; 8] = [
    "n",
    "replicate",
    "d_psi",
    "ky_fan",
    "sup_gap",
    "l1_gap",
    "risk_gap",
    "wall_time_s",
];

pub const LIBRARY_VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn format_float(v: f64) -> String {
    format!("{v:?}")
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .quote_style(csv::QuoteStyle::Necessary)
        .from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<Vec<u8>> {
    w.into_inner().map_err(|e| Error::Io(e.to_string()))
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

/// Rows for the successful cells under [`CSV_HEADER`]. Failed cells are
/// left out; [`Manifest::failed_cells`] records them.
pub fn report_csv(report: &ConvergenceReport) -> Result<Vec<u8>> {
    let mut w = csv_writer();
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for (n, rep, m) in report.successful() {
        let row = [
            n.to_string(),
            rep.to_string(),
            format_float(m.d_psi),
            format_float(m.ky_fan),
            format_float(m.sup_gap),
            format_float(m.l1_gap),
            format_float(m.risk_gap),
            format_float(m.wall_time_s),
        ];
        w.write_record(&row).map_err(csv_err)?;
    }
    finish(w)
}

/// Parse a CSV written by [`report_csv`].
pub fn read_report_csv(path: &Path) -> Result<ConvergenceReport> {
    let io = |e: csv::Error| Error::Io(format!("{}: {e}", path.display()));
    let mut r = csv::Reader::from_path(path).map_err(io)?;
    let header = r.headers().map_err(io)?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::Config(format!(
            "{}: expected header {}",
            path.display(),
            CSV_HEADER.join(",")
        )));
    }
    let mut cells = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(io)?;
        let bad = |what: &str| Error::Config(format!("{}: line {}: bad {what}", path.display(), i + 2));
        let int = |j: usize| rec[j].parse::<usize>().map_err(|_| bad(CSV_HEADER[j]));
        let float = |j: usize| rec[j].parse::<f64>().map_err(|_| bad(CSV_HEADER[j]));
        cells.push(CellRecord {
            n: int(0)?,
            replicate: int(1)?,
            outcome: Ok(CellMetrics {
                d_psi: float(2)?,
                ky_fan: float(3)?,
                sup_gap: float(4)?,
                l1_gap: float(5)?,
                risk_gap: float(6)?,
                wall_time_s: float(7)?,
            }),
        });
    }
    cells.sort_by_key(|c| (c.n, c.replicate));
    Ok(ConvergenceReport { cells })
}

/// Per-`n` aggregate of a report.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub n: usize,
    pub replicates: usize,
    pub d_psi_mean: f64,
    pub d_psi_max: f64,
    pub ky_fan_mean: f64,
    pub sup_gap_min: f64,
    pub l1_gap_mean: f64,
    pub risk_gap_mean: f64,
    /// `min (L · l1_gap - risk_gap)` over the replicates.
    pub risk_margin_min: f64,
}

pub const SUMMARY_HEADER: [&str; 9] = [
    "n",
    "replicates",
    "d_psi_mean",
    "d_psi_max",
    "ky_fan_mean",
    "sup_gap_min",
    "l1_gap_mean",
    "risk_gap_mean",
    "risk_margin_min",
];

pub fn summarize(report: &ConvergenceReport, lipschitz_constant: f64) -> Vec<SummaryRow> {
    let mut rows = Vec::new();
    for n in report.sample_sizes() {
        let cells: Vec<&CellMetrics> = report
            .successful()
            .filter(|(m, _, _)| *m == n)
            .map(|(_, _, c)| c)
            .collect();
        if cells.is_empty() {
            continue;
        }
        let k = cells.len() as f64;
        let mean = |f: fn(&CellMetrics) -> f64| cells.iter().map(|c| f(c)).sum::<f64>() / k;
        let sub = ConvergenceReport {
            cells: report.cells.iter().filter(|c| c.n == n).cloned().collect(),
        };
        rows.push(SummaryRow {
            n,
            replicates: cells.len(),
            d_psi_mean: mean(|c| c.d_psi),
            d_psi_max: cells.iter().map(|c| c.d_psi).fold(f64::NEG_INFINITY, f64::max),
            ky_fan_mean: mean(|c| c.ky_fan),
            sup_gap_min: cells.iter().map(|c| c.sup_gap).fold(f64::INFINITY, f64::min),
            l1_gap_mean: mean(|c| c.l1_gap),
            risk_gap_mean: mean(|c| c.risk_gap),
            risk_margin_min: risk_convergence_check(&sub, lipschitz_constant).worst_margin,
        });
    }
    rows
}

pub fn summary_csv(rows: &[SummaryRow]) -> Result<Vec<u8>> {
    let mut w = csv_writer();
    w.write_record(SUMMARY_HEADER).map_err(csv_err)?;
    for r in rows {
        let row = [
            r.n.to_string(),
            r.replicates.to_string(),
            format_float(r.d_psi_mean),
            format_float(r.d_psi_max),
            format_float(r.ky_fan_mean),
            format_float(r.sup_gap_min),
            format_float(r.l1_gap_mean),
            format_float(r.risk_gap_mean),
            format_float(r.risk_margin_min),
        ];
        w.write_record(&row).map_err(csv_err)?;
    }
    finish(w)
}

/// Where the seed of a run came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeedSource {
    Config,
    CommandLine,
}

/// Hex SHA-256 of a config document.
pub fn config_hash(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// `key = value` lines describing a run. Contains no timestamps or host
/// data, so reruns produce identical files.
#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    entries: Vec<(String, String)>,
}

impl Manifest {
    pub fn new(command: &str) -> Self {
        Manifest {
            entries: vec![
                ("command".into(), command.into()),
                ("library_version".into(), LIBRARY_VERSION.into()),
            ],
        }
    }

    pub fn push(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.entries.push((key.into(), value.to_string()));
        self
    }

    pub fn seed(&mut self, seed: u64, source: SeedSource) -> &mut Self {
        let src = match source {
            SeedSource::Config => "config",
            SeedSource::CommandLine => "command-line",
        };
        self.push("seed", seed).push("seed_source", src)
    }

    /// Records the hash of the resolved config text.
    pub fn config(&mut self, resolved: &str) -> &mut Self {
        self.push("config_sha256", config_hash(resolved))
    }

    /// Records cell counts and every failed cell with its message.
    pub fn failed_cells(&mut self, report: &ConvergenceReport) -> &mut Self {
        let failed: Vec<&CellRecord> = report.cells.iter().filter(|c| c.outcome.is_err()).collect();
        self.push("cells_ok", report.cells.len() - failed.len())
            .push("cells_failed", failed.len());
        for c in failed {
            let msg = c.outcome.as_ref().err().map_or("", String::as_str);
            self.push(&format!("failed_cell.n{}.r{}", c.n, c.replicate), msg.replace('\n', " "));
        }
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.entries {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }
}

/// `<out>.manifest.txt`, next to the output file.
pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.txt");
    out.with_file_name(name)
}

/// Write `bytes` to `out` and the manifest next to it. Nothing is created
/// outside the directory of `out`, which must already exist.
pub fn write_outputs(out: &Path, bytes: &[u8], manifest: &Manifest) -> Result<()> {
    if out.file_name().is_none() {
        return Err(Error::Io(format!("output path {} has no file name", out.display())));
    }
    let io = |p: &Path, e: std::io::Error| Error::Io(format!("{}: {e}", p.display()));
    std::fs::write(out, bytes).map_err(|e| io(out, e))?;
    let mpath = manifest_path(out);
    std::fs::write(&mpath, manifest.render()).map_err(|e| io(&mpath, e))
}

/// Write the study CSV to `out` and its manifest, including failed cells.
pub fn emit_report(report: &ConvergenceReport, out: &Path, manifest: &Manifest) -> Result<()> {
    let mut m = manifest.clone();
    m.failed_cells(report);
    write_outputs(out, &report_csv(report)?, &m)
}
