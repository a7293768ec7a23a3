//! CSV exports (RFC 4180, UTF-8) and readers for the ones that feed later
//! pipeline stages.
//!
//! Floats are written in shortest round-trip form, so reading a file back
//! gives the exact values that were written.

use std::io::Write;
use std::path::{Path, PathBuf};

use crate::cooccurrence::{MatrixMode, OccurrenceMatrix, SimilarityMatrix};
use crate::corpus::FrequencyTable;
use crate::error::{Error, Result};
use crate::factors::FactorReport;

pub const COSINE_CSV: &str = "cosine.csv";
pub const OCCURRENCE_CSV: &str = "occurrence.csv";
pub const FREQUENCY_CSV: &str = "frequency.csv";
pub const EIGENVALUES_CSV: &str = "eigenvalues.csv";
pub const FACTORS_CSV: &str = "factors.csv";
pub const FACTOR_SUMMARY_CSV: &str = "factor_summary.csv";

pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        "0".to_string()
    } else {
        format!("{x}")
    }
}

fn writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().flexible(true).from_writer(out)
}

fn finish<W: Write>(w: csv::Writer<W>) -> std::io::Result<()> {
    w.into_inner().map_err(|e| e.into_error())?.flush()
}

fn csv_io(e: csv::Error) -> std::io::Error {
    std::io::Error::other(e)
}

pub fn write_similarity<W: Write>(sim: &SimilarityMatrix, out: W) -> std::io::Result<()> {
    let mut w = writer(out);
    w.write_record(std::iter::once("word").chain(sim.labels().iter().map(String::as_str)))
        .map_err(csv_io)?;
    for (i, label) in sim.labels().iter().enumerate() {
        let mut rec = vec![label.clone()];
        rec.extend(sim.row(i).iter().map(|&x| format_float(x)));
        w.write_record(&rec).map_err(csv_io)?;
    }
    finish(w)
}

pub fn write_occurrence<W: Write>(occ: &OccurrenceMatrix, out: W) -> std::io::Result<()> {
    let mut w = writer(out);
    w.write_record(std::iter::once("word").chain(occ.doc_ids().iter().map(String::as_str)))
        .map_err(csv_io)?;
    for (i, label) in occ.labels().iter().enumerate() {
        let mut rec = vec![label.clone()];
        rec.extend(occ.row(i).iter().map(u32::to_string));
        w.write_record(&rec).map_err(csv_io)?;
    }
    finish(w)
}

pub fn write_frequency<W: Write>(table: &FrequencyTable, out: W) -> std::io::Result<()> {
    let mut w = writer(out);
    w.write_record(["word", "count"]).map_err(csv_io)?;
    for (word, count) in table.ranked() {
        w.write_record([table.label(word), &count.to_string()])
            .map_err(csv_io)?;
    }
    finish(w)
}

pub fn write_eigenvalues<W: Write>(report: &FactorReport, out: W) -> std::io::Result<()> {
    let mut w = writer(out);
    w.write_record(["factor", "eigenvalue", "percent_variance"])
        .map_err(csv_io)?;
    for (j, l, pct) in report.scree() {
        w.write_record([j.to_string(), format_float(l), format_float(pct)])
            .map_err(csv_io)?;
    }
    finish(w)
}

/// One row per word: count, rotated loadings, communality and factor.
pub fn write_factors<W: Write>(
    report: &FactorReport,
    counts: &[u64],
    out: W,
) -> std::io::Result<()> {
    let load = &report.loadings;
    let mut w = writer(out);
    let mut header = vec!["word".to_string(), "count".to_string()];
    header.extend((1..=load.k()).map(|j| format!("loading_{j}")));
    header.push("communality".into());
    header.push("assigned_factor".into());
    w.write_record(&header).map_err(csv_io)?;
    let comm = load.communalities();
    for (i, label) in load.labels().iter().enumerate() {
        let mut rec = vec![label.clone(), counts[i].to_string()];
        rec.extend(load.row(i).iter().map(|&x| format_float(x)));
        rec.push(format_float(comm[i]));
        rec.push(report.assignment[i].cluster_id().to_string());
        w.write_record(&rec).map_err(csv_io)?;
    }
    finish(w)
}

/// Key/value summary. List-valued keys take one column per entry.
pub fn write_factor_summary<W: Write>(report: &FactorReport, out: W) -> std::io::Result<()> {
    let mut w = writer(out);
    let list = |key: &str, xs: &[f64]| {
        std::iter::once(key.to_string())
            .chain(xs.iter().map(|&x| format_float(x)))
            .collect::<Vec<_>>()
    };
    w.write_record(["k", &report.k.to_string()])
        .map_err(csv_io)?;
    w.write_record(["kaiser_count", &report.kaiser_count.to_string()])
        .map_err(csv_io)?;
    w.write_record(list("eigenvalues", &report.eigenvalues))
        .map_err(csv_io)?;
    w.write_record(list("percent_per_factor", &report.percent_per_factor))
        .map_err(csv_io)?;
    w.write_record(["percent_total", &format_float(report.percent_total)])
        .map_err(csv_io)?;
    finish(w)
}

fn create(path: &Path) -> Result<std::io::BufWriter<std::fs::File>> {
    std::fs::File::create(path)
        .map(std::io::BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

fn write_file(
    dir: &Path,
    name: &str,
    f: impl FnOnce(&mut std::io::BufWriter<std::fs::File>) -> std::io::Result<()>,
) -> Result<PathBuf> {
    let path = dir.join(name);
    let mut out = create(&path)?;
    f(&mut out).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

pub fn write_similarity_path(sim: &SimilarityMatrix, path: &Path) -> Result<()> {
    let mut out = create(path)?;
    write_similarity(sim, &mut out).map_err(|e| Error::io(path, e))
}

pub fn write_occurrence_path(occ: &OccurrenceMatrix, path: &Path) -> Result<()> {
    let mut out = create(path)?;
    write_occurrence(occ, &mut out).map_err(|e| Error::io(path, e))
}

pub fn write_frequency_path(table: &FrequencyTable, path: &Path) -> Result<()> {
    let mut out = create(path)?;
    write_frequency(table, &mut out).map_err(|e| Error::io(path, e))
}

/// Writes the factor report files (`eigenvalues.csv`, `factors.csv`,
/// `factor_summary.csv`) into `dir`.
pub fn write_factor_outputs(
    report: &FactorReport,
    counts: &[u64],
    dir: &Path,
) -> Result<Vec<PathBuf>> {
    Ok(vec![
        write_file(dir, EIGENVALUES_CSV, |o| write_eigenvalues(report, o))?,
        write_file(dir, FACTORS_CSV, |o| write_factors(report, counts, o))?,
        write_file(dir, FACTOR_SUMMARY_CSV, |o| write_factor_summary(report, o))?,
    ])
}

/// Writes `cosine.csv` and the factor report files, plus `occurrence.csv`
/// and `frequency.csv` when `intermediate` is set.
pub fn write_csv_outputs(
    dir: &Path,
    table: &FrequencyTable,
    occ: &OccurrenceMatrix,
    sim: &SimilarityMatrix,
    report: &FactorReport,
    counts: &[u64],
    intermediate: bool,
) -> Result<Vec<PathBuf>> {
    let mut files = vec![write_file(dir, COSINE_CSV, |o| write_similarity(sim, o))?];
    files.extend(write_factor_outputs(report, counts, dir)?);
    if intermediate {
        files.push(write_file(dir, FREQUENCY_CSV, |o| {
            write_frequency(table, o)
        })?);
        files.push(write_file(dir, OCCURRENCE_CSV, |o| {
            write_occurrence(occ, o)
        })?);
    }
    Ok(files)
}

fn read_records(path: &Path) -> Result<Vec<csv::StringRecord>> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let text = crate::error::decode_utf8(&bytes).map_err(|e| Error::parse(path, e.to_string()))?;
    csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(text.as_bytes())
        .records()
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::parse(path, e.to_string()))
}

/// Row labels, column labels and raw cells.
type Grid = (Vec<String>, Vec<String>, Vec<Vec<String>>);

/// A labelled table: header `word,<col labels>` then one row per word.
fn read_grid(path: &Path) -> Result<Grid> {
    let records = read_records(path)?;
    let (header, body) = records
        .split_first()
        .ok_or_else(|| Error::parse(path, "empty file"))?;
    let columns: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let mut rows = Vec::with_capacity(body.len());
    let mut labels = Vec::with_capacity(body.len());
    for (line, rec) in body.iter().enumerate() {
        if rec.len() != columns.len() + 1 {
            return Err(Error::parse(
                path,
                format!(
                    "row {}: expected {} fields, found {}",
                    line + 2,
                    columns.len() + 1,
                    rec.len()
                ),
            ));
        }
        labels.push(rec[0].to_string());
        rows.push(rec.iter().skip(1).map(str::to_string).collect());
    }
    Ok((labels, columns, rows))
}

/// Reads an occurrence matrix. Cells are taken as counts whatever mode
/// produced them.
pub fn read_occurrence_csv(path: impl AsRef<Path>) -> Result<OccurrenceMatrix> {
    let path = path.as_ref();
    let (labels, doc_ids, rows) = read_grid(path)?;
    let rows = rows
        .into_iter()
        .map(|r| {
            r.iter()
                .map(|c| {
                    c.parse::<u32>()
                        .map_err(|_| Error::parse(path, format!("bad count `{c}`")))
                })
                .collect::<Result<Vec<u32>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    OccurrenceMatrix::from_rows(labels, doc_ids, MatrixMode::Count, rows)
}

pub fn read_similarity_csv(path: impl AsRef<Path>) -> Result<SimilarityMatrix> {
    let path = path.as_ref();
    let (labels, columns, rows) = read_grid(path)?;
    if labels != columns {
        return Err(Error::parse(path, "row and column labels differ"));
    }
    let mut values = Vec::with_capacity(labels.len() * labels.len());
    for r in rows {
        for c in r {
            let x: f64 = c
                .parse()
                .map_err(|_| Error::parse(path, format!("bad value `{c}`")))?;
            values.push(x);
        }
    }
    SimilarityMatrix::from_upper(labels, &values)
}

/// Reads `word,count` rows.
pub fn read_frequency_csv(path: impl AsRef<Path>) -> Result<Vec<(String, u64)>> {
    let path = path.as_ref();
    let records = read_records(path)?;
    let mut out = Vec::new();
    for (line, rec) in records.iter().enumerate().skip(1) {
        if rec.len() != 2 {
            return Err(Error::parse(
                path,
                format!("row {}: expected word,count", line + 1),
            ));
        }
        let count = rec[1].parse().map_err(|_| {
            Error::parse(path, format!("row {}: bad count `{}`", line + 1, &rec[1]))
        })?;
        out.push((rec[0].to_string(), count));
    }
    Ok(out)
}
