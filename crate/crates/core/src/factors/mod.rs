//! Principal-component factor analysis of the occurrence matrix, with
//! words as variables and documents as cases.
//!
//! The chain is: Pearson correlation between word rows, Jacobi
//! eigendecomposition, loadings of the top `k` components, varimax
//! rotation, and assignment of each word to the factor it loads highest on.

pub mod jacobi;
pub mod varimax;

use std::fmt;

pub use jacobi::{eigendecompose, EigenSolution};
pub use varimax::{varimax, varimax_traced, VarimaxOutcome};

use crate::cooccurrence::OccurrenceMatrix;
use crate::error::{Error, Result};

/// Pearson correlations between word rows. Unit diagonal, exactly symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    labels: Vec<String>,
    values: Vec<f64>,
}

impl CorrelationMatrix {
    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n() + j]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn eigen(&self) -> Result<EigenSolution> {
        eigendecompose(&self.values, self.n())
    }
}

/// Indices of rows that are constant across documents.
pub fn zero_variance_rows(occ: &OccurrenceMatrix) -> Vec<usize> {
    (0..occ.n_words())
        .filter(|&i| {
            let row = occ.row(i);
            row.iter().all(|&c| c == row[0])
        })
        .collect()
}

pub fn correlation_matrix(occ: &OccurrenceMatrix) -> Result<CorrelationMatrix> {
    let degenerate = zero_variance_rows(occ);
    if !degenerate.is_empty() {
        return Err(Error::ZeroVariance(
            degenerate
                .iter()
                .map(|&i| occ.labels()[i].clone())
                .collect(),
        ));
    }
    let n = occ.n_words();
    let m = occ.n_docs() as f64;
    let centered: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let row = occ.row(i);
            let mean = row.iter().map(|&c| f64::from(c)).sum::<f64>() / m;
            row.iter().map(|&c| f64::from(c) - mean).collect()
        })
        .collect();
    let ss: Vec<f64> = centered
        .iter()
        .map(|r| r.iter().map(|x| x * x).sum())
        .collect();

    let mut values = vec![0.0; n * n];
    for i in 0..n {
        values[i * n + i] = 1.0;
        for j in i + 1..n {
            let cov: f64 = centered[i]
                .iter()
                .zip(&centered[j])
                .map(|(a, b)| a * b)
                .sum();
            let r = (cov / (ss[i] * ss[j]).sqrt()).clamp(-1.0, 1.0);
            values[i * n + j] = r;
            values[j * n + i] = r;
        }
    }
    Ok(CorrelationMatrix {
        labels: occ.labels().to_vec(),
        values,
    })
}

/// Number of eigenvalues of one or more.
pub fn kaiser_count(eigenvalues: &[f64]) -> usize {
    eigenvalues.iter().filter(|&&l| l >= 1.0).count()
}

/// Word-by-factor loadings, n×k row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadingMatrix {
    labels: Vec<String>,
    values: Vec<f64>,
    k: usize,
    pub rotated: bool,
}

impl LoadingMatrix {
    pub fn new(labels: Vec<String>, values: Vec<f64>, k: usize, rotated: bool) -> Result<Self> {
        if values.len() != labels.len() * k {
            return Err(Error::LengthMismatch(values.len(), labels.len() * k));
        }
        Ok(LoadingMatrix {
            labels,
            values,
            k,
            rotated,
        })
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, word: usize, factor: usize) -> f64 {
        self.values[word * self.k + factor]
    }

    pub fn row(&self, word: usize) -> &[f64] {
        &self.values[word * self.k..(word + 1) * self.k]
    }

    /// Per-word sum of squared loadings.
    pub fn communalities(&self) -> Vec<f64> {
        (0..self.n())
            .map(|i| self.row(i).iter().map(|x| x * x).sum())
            .collect()
    }

    /// Per-factor sum of squared loadings.
    pub fn column_sums_of_squares(&self) -> Vec<f64> {
        (0..self.k)
            .map(|j| (0..self.n()).map(|i| self.get(i, j).powi(2)).sum())
            .collect()
    }

    /// Varimax criterion of the Kaiser-normalized loadings, the quantity
    /// the rotation maximizes. Rows with zero communality are left as is.
    pub fn normalized_criterion(&self) -> f64 {
        let h = self.communalities();
        let mut x = self.values.clone();
        for (i, hi) in h.iter().enumerate() {
            if *hi > 0.0 {
                let s = hi.sqrt();
                for v in &mut x[i * self.k..(i + 1) * self.k] {
                    *v /= s;
                }
            }
        }
        varimax::criterion(&x, self.n(), self.k)
    }
}

/// Loadings of the top `k` principal components: `vector · √eigenvalue`.
pub fn principal_loadings(
    eig: &EigenSolution,
    labels: &[String],
    k: usize,
) -> Result<LoadingMatrix> {
    let n = eig.n();
    if k == 0 || k > n {
        return Err(Error::FactorCount { k, n });
    }
    if labels.len() != n {
        return Err(Error::LengthMismatch(labels.len(), n));
    }
    let lambda_k = eig.values[k - 1];
    if lambda_k <= 0.0 {
        return Err(Error::NonPositiveEigenvalue {
            index: k,
            value: lambda_k,
        });
    }
    let scale: Vec<f64> = eig.values[..k].iter().map(|l| l.sqrt()).collect();
    let mut values = Vec::with_capacity(n * k);
    for i in 0..n {
        for (j, s) in scale.iter().enumerate() {
            values.push(eig.component(i, j) * s);
        }
    }
    LoadingMatrix::new(labels.to_vec(), values, k, false)
}

/// Percentage of total variance per factor: `100 · Σᵢ loading² / n_variables`.
pub fn variance_explained(load: &LoadingMatrix, n_variables: usize) -> Vec<f64> {
    load.column_sums_of_squares()
        .into_iter()
        .map(|ss| 100.0 * ss / n_variables as f64)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Assignment {
    /// 1-based factor index.
    Factor(usize),
    /// No positive loading on any factor.
    Unassigned,
}

impl Assignment {
    /// Partition id: the factor number, or 0 when unassigned.
    pub fn cluster_id(self) -> usize {
        match self {
            Assignment::Factor(j) => j,
            Assignment::Unassigned => 0,
        }
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.cluster_id())
    }
}

/// Each word goes to the factor with its highest loading (lowest index on
/// ties), or is unassigned when that loading is not positive.
pub fn assign_clusters(load: &LoadingMatrix) -> Vec<Assignment> {
    (0..load.n())
        .map(|i| {
            let row = load.row(i);
            let mut best = 0;
            for j in 1..row.len() {
                if row[j] > row[best] {
                    best = j;
                }
            }
            if row.is_empty() || row[best] <= 0.0 {
                Assignment::Unassigned
            } else {
                Assignment::Factor(best + 1)
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct FactorReport {
    pub k: usize,
    pub eigenvalues: Vec<f64>,
    pub kaiser_count: usize,
    /// Rotated loadings.
    pub loadings: LoadingMatrix,
    pub percent_per_factor: Vec<f64>,
    pub percent_total: f64,
    pub assignment: Vec<Assignment>,
}

impl FactorReport {
    /// Unrotated percentage of variance for every eigenvalue (scree data).
    pub fn scree(&self) -> Vec<(usize, f64, f64)> {
        let n = self.eigenvalues.len() as f64;
        self.eigenvalues
            .iter()
            .enumerate()
            .map(|(j, &l)| (j + 1, l, 100.0 * l / n))
            .collect()
    }
}

/// Runs the whole extraction: correlation, eigendecomposition, `k`
/// principal loadings, varimax and cluster assignment.
pub fn analyze(occ: &OccurrenceMatrix, k: usize) -> Result<FactorReport> {
    let corr = correlation_matrix(occ)?;
    let eig = corr.eigen()?;
    let loadings = varimax(&principal_loadings(&eig, corr.labels(), k)?)?;
    let percent_per_factor = variance_explained(&loadings, corr.n());
    Ok(FactorReport {
        k,
        kaiser_count: kaiser_count(&eig.values),
        percent_total: percent_per_factor.iter().sum(),
        assignment: assign_clusters(&loadings),
        eigenvalues: eig.values,
        loadings,
        percent_per_factor,
    })
}
