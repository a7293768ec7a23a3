//! Cyclic Jacobi eigendecomposition for real symmetric matrices.

use crate::error::{Error, Result};

/// Sweeps stop once the off-diagonal Frobenius norm drops below this.
pub const OFF_DIAGONAL_TOLERANCE: f64 = 1e-12;
pub const MAX_SWEEPS: usize = 100;

/// Eigenpairs sorted by descending eigenvalue. `vectors` is n×n row-major
/// with eigenvector `j` stored in column `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSolution {
    pub values: Vec<f64>,
    vectors: Vec<f64>,
    n: usize,
}

impl EigenSolution {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Component `i` of eigenvector `j`.
    pub fn component(&self, i: usize, j: usize) -> f64 {
        self.vectors[i * self.n + j]
    }

    pub fn vector(&self, j: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.component(i, j)).collect()
    }

    /// Row-major n×n matrix whose columns are the eigenvectors.
    pub fn vectors(&self) -> &[f64] {
        &self.vectors
    }
}

fn off_norm(a: &[f64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[i * n + j] * a[i * n + j];
            }
        }
    }
    s.sqrt()
}

/// Decomposes the symmetric row-major `n×n` matrix `a`. Only symmetric input
/// is meaningful; the upper triangle is mirrored before iterating.
pub fn eigendecompose(matrix: &[f64], n: usize) -> Result<EigenSolution> {
    if matrix.len() != n * n {
        return Err(Error::LengthMismatch(matrix.len(), n * n));
    }
    if matrix.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    let mut a = matrix.to_vec();
    for i in 0..n {
        for j in i + 1..n {
            a[j * n + i] = a[i * n + j];
        }
    }
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }

    let mut sweeps = 0;
    let mut off = off_norm(&a, n);
    while off >= OFF_DIAGONAL_TOLERANCE {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence {
                sweeps,
                residual: off,
            });
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, n, p, q);
            }
        }
        sweeps += 1;
        off = off_norm(&a, n);
    }

    let mut order: Vec<usize> = (0..n).collect();
    // stable, so equal eigenvalues keep their original order
    order.sort_by(|&x, &y| a[y * n + y].total_cmp(&a[x * n + x]));

    let values: Vec<f64> = order.iter().map(|&k| a[k * n + k]).collect();
    let mut vectors = vec![0.0; n * n];
    for (col, &k) in order.iter().enumerate() {
        let sign = sign_of_largest((0..n).map(|i| v[i * n + k]));
        for i in 0..n {
            vectors[i * n + col] = sign * v[i * n + k];
        }
    }
    Ok(EigenSolution { values, vectors, n })
}

/// +1 or -1 so that the largest-magnitude entry (first one on ties) becomes
/// positive.
pub(crate) fn sign_of_largest(entries: impl Iterator<Item = f64>) -> f64 {
    let mut best = 0.0f64;
    let mut sign = 1.0;
    for x in entries {
        if x.abs() > best {
            best = x.abs();
            sign = if x < 0.0 { -1.0 } else { 1.0 };
        }
    }
    sign
}

/// Applies the plane rotation that annihilates `a[p][q]`: A ← JᵀAJ, V ← VJ.
fn rotate(a: &mut [f64], v: &mut [f64], n: usize, p: usize, q: usize) {
    let apq = a[p * n + q];
    if apq == 0.0 {
        return;
    }
    let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
    let t = if theta.is_infinite() {
        0.0
    } else {
        theta.signum() / (theta.abs() + theta.hypot(1.0))
    };
    let c = 1.0 / t.hypot(1.0);
    let s = t * c;

    for k in 0..n {
        let akp = a[k * n + p];
        let akq = a[k * n + q];
        a[k * n + p] = c * akp - s * akq;
        a[k * n + q] = s * akp + c * akq;
    }
    for k in 0..n {
        let apk = a[p * n + k];
        let aqk = a[q * n + k];
        a[p * n + k] = c * apk - s * aqk;
        a[q * n + k] = s * apk + c * aqk;
    }
    a[p * n + q] = 0.0;
    a[q * n + p] = 0.0;

    for k in 0..n {
        let vkp = v[k * n + p];
        let vkq = v[k * n + q];
        v[k * n + p] = c * vkp - s * vkq;
        v[k * n + q] = s * vkp + c * vkq;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity() {
        let eig = eigendecompose(&[1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0], 3).unwrap();
        assert_eq!(eig.values, [1.0, 1.0, 1.0]);
        assert_eq!(eig.vectors(), [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn two_by_two_closed_form() {
        // eigenvalues of [[1, ρ], [ρ, 1]] are 1 ± ρ
        let eig = eigendecompose(&[1.0, 0.5, 0.5, 1.0], 2).unwrap();
        assert!((eig.values[0] - 1.5).abs() < 1e-12);
        assert!((eig.values[1] - 0.5).abs() < 1e-12);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((eig.component(0, 0) - h).abs() < 1e-12);
        assert!((eig.component(1, 0) - h).abs() < 1e-12);
    }

    #[test]
    fn diagonal_is_sorted_descending() {
        let eig = eigendecompose(&[2.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 5.0], 3).unwrap();
        assert_eq!(eig.values, [5.0, 2.0, -1.0]);
        assert_eq!(eig.vector(0), [0.0, 0.0, 1.0]);
    }

    #[test]
    fn sign_convention() {
        let eig = eigendecompose(&[4.0, 2.0, 0.0, 2.0, 3.0, 1.0, 0.0, 1.0, 2.0], 3).unwrap();
        for j in 0..3 {
            let v = eig.vector(j);
            let big = v
                .iter()
                .copied()
                .fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
            assert!(big > 0.0);
        }
    }

    #[test]
    fn eigen_equation_holds() {
        let m = [4.0, 2.0, 0.0, 2.0, 3.0, 1.0, 0.0, 1.0, 2.0];
        let eig = eigendecompose(&m, 3).unwrap();
        for j in 0..3 {
            let v = eig.vector(j);
            for i in 0..3 {
                let mv: f64 = (0..3).map(|k| m[i * 3 + k] * v[k]).sum();
                assert!((mv - eig.values[j] * v[i]).abs() < 1e-10);
            }
        }
        let trace: f64 = eig.values.iter().sum();
        assert!((trace - 9.0).abs() < 1e-12);
    }

    #[test]
    fn empty_matrix() {
        let eig = eigendecompose(&[], 0).unwrap();
        assert!(eig.values.is_empty());
    }

    #[test]
    fn wrong_length() {
        assert!(matches!(
            eigendecompose(&[1.0, 2.0], 2),
            Err(Error::LengthMismatch(2, 4))
        ));
    }

    #[test]
    fn non_finite_input() {
        let err = eigendecompose(&[1.0, f64::NAN, f64::NAN, 1.0], 2).unwrap_err();
        assert!(matches!(err, Error::NonFinite));
    }
}
