//! Word-by-document occurrence matrices and cosine similarity between word
//! vectors.

use std::fmt;
use std::str::FromStr;

use crate::corpus::{Document, Vocabulary};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum MatrixMode {
    /// Cells hold the number of occurrences of the word in the document.
    #[default]
    Count,
    /// Cells hold 1 if the word occurs in the document at all.
    Binary,
}

impl FromStr for MatrixMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "count" => Ok(MatrixMode::Count),
            "binary" => Ok(MatrixMode::Binary),
            other => Err(format!(
                "unknown matrix mode `{other}` (expected count or binary)"
            )),
        }
    }
}

impl fmt::Display for MatrixMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MatrixMode::Count => "count",
            MatrixMode::Binary => "binary",
        })
    }
}

/// Words (rows) by documents (columns). Rows follow vocabulary order,
/// columns follow corpus order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OccurrenceMatrix {
    labels: Vec<String>,
    doc_ids: Vec<String>,
    mode: MatrixMode,
    values: Vec<u32>,
    row_totals: Vec<u64>,
}

impl OccurrenceMatrix {
    /// Assembles a matrix from explicit rows, checking the mode and the
    /// no-empty-row invariant.
    pub fn from_rows(
        labels: Vec<String>,
        doc_ids: Vec<String>,
        mode: MatrixMode,
        rows: Vec<Vec<u32>>,
    ) -> Result<Self> {
        if labels.len() != rows.len() {
            return Err(Error::LengthMismatch(labels.len(), rows.len()));
        }
        let m = doc_ids.len();
        let mut values = Vec::with_capacity(rows.len() * m);
        let mut row_totals = Vec::with_capacity(rows.len());
        for (label, row) in labels.iter().zip(&rows) {
            if row.len() != m {
                return Err(Error::LengthMismatch(row.len(), m));
            }
            if mode == MatrixMode::Binary && row.iter().any(|&c| c > 1) {
                return Err(Error::VocabularyMismatch(format!(
                    "row `{label}` has counts above 1 in binary mode"
                )));
            }
            let total: u64 = row.iter().map(|&c| u64::from(c)).sum();
            if total == 0 {
                return Err(Error::ZeroRow(label.clone()));
            }
            row_totals.push(total);
            values.extend_from_slice(row);
        }
        Ok(OccurrenceMatrix {
            labels,
            doc_ids,
            mode,
            values,
            row_totals,
        })
    }

    pub fn n_words(&self) -> usize {
        self.labels.len()
    }

    pub fn n_docs(&self) -> usize {
        self.doc_ids.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn doc_ids(&self) -> &[String] {
        &self.doc_ids
    }

    pub fn mode(&self) -> MatrixMode {
        self.mode
    }

    pub fn row(&self, i: usize) -> &[u32] {
        let m = self.n_docs();
        &self.values[i * m..(i + 1) * m]
    }

    pub fn get(&self, word: usize, doc: usize) -> u32 {
        self.values[word * self.n_docs() + doc]
    }

    pub fn row_totals(&self) -> &[u64] {
        &self.row_totals
    }

    /// Copy without the given rows.
    pub fn without_rows(&self, rows: &[usize]) -> Result<OccurrenceMatrix> {
        let keep: Vec<usize> = (0..self.n_words()).filter(|i| !rows.contains(i)).collect();
        OccurrenceMatrix::from_rows(
            keep.iter().map(|&i| self.labels[i].clone()).collect(),
            self.doc_ids.clone(),
            self.mode,
            keep.iter().map(|&i| self.row(i).to_vec()).collect(),
        )
    }
}

/// Cross-tables vocabulary words against documents. Tokens outside the
/// vocabulary are ignored.
pub fn build_occurrence_matrix(
    docs: &[Document],
    vocab: &Vocabulary,
    mode: MatrixMode,
) -> Result<OccurrenceMatrix> {
    if docs.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let m = docs.len();
    let mut rows = vec![vec![0u32; m]; vocab.len()];
    for (j, doc) in docs.iter().enumerate() {
        let tokens = doc
            .tokens
            .as_deref()
            .ok_or_else(|| Error::Untokenized(doc.id.clone()))?;
        for t in tokens {
            if let Some(i) = vocab.index_of(&t.key()) {
                let cell = &mut rows[i][j];
                *cell = match mode {
                    MatrixMode::Count => *cell + 1,
                    MatrixMode::Binary => 1,
                };
            }
        }
    }
    OccurrenceMatrix::from_rows(
        vocab.labels().to_vec(),
        docs.iter().map(|d| d.id.clone()).collect(),
        mode,
        rows,
    )
}

/// `dot(u, v) / (‖u‖·‖v‖)`, clamped to [0, 1] for nonnegative inputs.
pub fn cosine(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::LengthMismatch(u.len(), v.len()));
    }
    let (mut dot, mut uu, mut vv) = (0.0, 0.0, 0.0);
    for (&a, &b) in u.iter().zip(v) {
        dot += a * b;
        uu += a * a;
        vv += b * b;
    }
    if uu == 0.0 || vv == 0.0 {
        return Err(Error::ZeroVector);
    }
    // sqrt of the product keeps parallel integer vectors at exactly 1
    Ok((dot / (uu * vv).sqrt()).clamp(0.0, 1.0))
}

/// Symmetric n×n matrix of word similarities with unit diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    labels: Vec<String>,
    values: Vec<f64>,
}

impl SimilarityMatrix {
    /// Builds from a full row-major square matrix. Only the upper triangle is
    /// read; the lower one is mirrored and the diagonal set to 1.
    pub fn from_upper(labels: Vec<String>, values: &[f64]) -> Result<Self> {
        let n = labels.len();
        if values.len() != n * n {
            return Err(Error::LengthMismatch(values.len(), n * n));
        }
        let mut sim = SimilarityMatrix {
            labels,
            values: vec![0.0; n * n],
        };
        for i in 0..n {
            sim.values[i * n + i] = 1.0;
            for j in i + 1..n {
                sim.set(i, j, values[i * n + j]);
            }
        }
        Ok(sim)
    }

    fn set(&mut self, i: usize, j: usize, v: f64) {
        let n = self.n();
        self.values[i * n + j] = v;
        self.values[j * n + i] = v;
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.n();
        &self.values[i * n..(i + 1) * n]
    }

    /// Off-diagonal upper-triangle cells in row-major order.
    pub fn upper_pairs(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let n = self.n();
        (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j, self.get(i, j))))
    }
}

/// Pairwise cosine between word rows, computed once per unordered pair.
pub fn cosine_matrix(occ: &OccurrenceMatrix) -> Result<SimilarityMatrix> {
    let n = occ.n_words();
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| occ.row(i).iter().map(|&c| f64::from(c)).collect())
        .collect();
    let mut sim = SimilarityMatrix {
        labels: occ.labels().to_vec(),
        values: vec![0.0; n * n],
    };
    for i in 0..n {
        if occ.row_totals()[i] == 0 {
            return Err(Error::ZeroRow(occ.labels()[i].clone()));
        }
        sim.values[i * n + i] = 1.0;
        for j in i + 1..n {
            sim.set(i, j, cosine(&rows[i], &rows[j])?);
        }
    }
    Ok(sim)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdStats {
    /// Mean over upper-triangle cells with a cosine above zero; 0 when
    /// there are none.
    pub mean_nonzero: f64,
    /// Mean over all n(n-1)/2 upper-triangle cells.
    pub mean_all: f64,
    pub nonzero_count: usize,
    pub pair_count: usize,
}

pub fn threshold_stats(sim: &SimilarityMatrix) -> Result<ThresholdStats> {
    let n = sim.n();
    if n < 2 {
        return Err(Error::TooFewWords(n));
    }
    let (mut sum, mut nonzero, mut pairs) = (0.0, 0usize, 0usize);
    for (_, _, v) in sim.upper_pairs() {
        pairs += 1;
        if v != 0.0 {
            sum += v;
            nonzero += 1;
        }
    }
    Ok(ThresholdStats {
        mean_nonzero: if nonzero == 0 {
            0.0
        } else {
            sum / nonzero as f64
        },
        mean_all: sum / pairs as f64,
        nonzero_count: nonzero,
        pair_count: pairs,
    })
}

/// Edge threshold: a fixed cosine, or the mean of the nonzero cosines.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub enum Threshold {
    #[default]
    Auto,
    Fixed(f64),
}

impl Threshold {
    pub fn resolve(self, sim: &SimilarityMatrix) -> Result<f64> {
        match self {
            Threshold::Fixed(t) => Ok(t),
            Threshold::Auto => threshold_stats(sim).map(|s| s.mean_nonzero),
        }
    }
}

impl FromStr for Threshold {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "auto" {
            return Ok(Threshold::Auto);
        }
        let t: f64 = s
            .parse()
            .map_err(|_| format!("threshold must be `auto` or a number, got `{s}`"))?;
        if !(0.0..=1.0).contains(&t) {
            return Err(format!("threshold {t} is outside [0, 1]"));
        }
        Ok(Threshold::Fixed(t))
    }
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Threshold::Auto => f.write_str("auto"),
            Threshold::Fixed(t) => write!(f, "{t}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub source: usize,
    pub target: usize,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeList {
    pub edges: Vec<Edge>,
    pub threshold_used: f64,
}

impl EdgeList {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

/// Keeps the pairs whose cosine is strictly above `t`, ordered by (source, target).
pub fn threshold_edges(sim: &SimilarityMatrix, t: f64) -> EdgeList {
    EdgeList {
        edges: sim
            .upper_pairs()
            .filter(|&(_, _, w)| w > t)
            .map(|(source, target, weight)| Edge {
                source,
                target,
                weight,
            })
            .collect(),
        threshold_used: t,
    }
}
