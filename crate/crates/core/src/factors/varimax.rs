//! Kaiser-normalized varimax rotation.
//!
//! Rows are scaled to unit communality, then every pair of factor columns is
//! rotated in its plane by the angle that maximizes the varimax criterion for
//! that pair. Sweeps over all pairs repeat until the criterion stops moving.
//!
//! The iteration starts from the principal axes of the normalized loadings
//! rather than from their given orientation. Those axes depend only on the
//! orbit of the input under rotation, so any rotated copy of the same
//! loadings ends up at the same optimum.

use super::jacobi::{eigendecompose, sign_of_largest};
use super::LoadingMatrix;
use crate::error::{Error, Result};

pub const RELATIVE_TOLERANCE: f64 = 1e-8;
pub const MAX_SWEEPS: usize = 1000;

/// Varimax criterion of an n×k row-major matrix: the sum over columns of
/// the variance of the squared entries.
pub fn criterion(values: &[f64], n: usize, k: usize) -> f64 {
    let nf = n as f64;
    (0..k)
        .map(|j| {
            let (mut s2, mut s4) = (0.0, 0.0);
            for i in 0..n {
                let x2 = values[i * k + j] * values[i * k + j];
                s2 += x2;
                s4 += x2 * x2;
            }
            s4 / nf - (s2 / nf) * (s2 / nf)
        })
        .sum()
}

/// Rotated loadings plus the criterion of the normalized loadings before the
/// first sweep and after each sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct VarimaxOutcome {
    pub loadings: LoadingMatrix,
    pub trace: Vec<f64>,
}

pub fn varimax(load: &LoadingMatrix) -> Result<LoadingMatrix> {
    varimax_traced(load).map(|o| o.loadings)
}

pub fn varimax_traced(load: &LoadingMatrix) -> Result<VarimaxOutcome> {
    let (n, k) = (load.n(), load.k());
    if k < 2 {
        let mut out = load.clone();
        out.rotated = true;
        let c = load.normalized_criterion();
        return Ok(VarimaxOutcome {
            loadings: out,
            trace: vec![c],
        });
    }

    let h: Vec<f64> = load.communalities().iter().map(|c| c.sqrt()).collect();
    if let Some(i) = h.iter().position(|&x| x == 0.0) {
        return Err(Error::ZeroCommunality(load.labels()[i].clone()));
    }
    let mut x = load.values().to_vec();
    for i in 0..n {
        for j in 0..k {
            x[i * k + j] /= h[i];
        }
    }

    to_principal_axes(&mut x, n, k)?;

    let mut crit = criterion(&x, n, k);
    let mut trace = vec![crit];
    for _ in 0..MAX_SWEEPS {
        for p in 0..k {
            for q in p + 1..k {
                rotate_pair(&mut x, n, k, p, q);
            }
        }
        let next = criterion(&x, n, k);
        trace.push(next);
        let done = (next - crit).abs() <= RELATIVE_TOLERANCE * crit.abs().max(f64::MIN_POSITIVE);
        crit = next;
        if done {
            break;
        }
    }

    for i in 0..n {
        for j in 0..k {
            x[i * k + j] *= h[i];
        }
    }

    // columns by descending sum of squares, stable on ties
    let ss: Vec<f64> = (0..k)
        .map(|j| (0..n).map(|i| x[i * k + j] * x[i * k + j]).sum())
        .collect();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| ss[b].total_cmp(&ss[a]));

    let mut values = vec![0.0; n * k];
    for (col, &src) in order.iter().enumerate() {
        let sign = sign_of_largest((0..n).map(|i| x[i * k + src]));
        for i in 0..n {
            values[i * k + col] = sign * x[i * k + src];
        }
    }

    Ok(VarimaxOutcome {
        loadings: LoadingMatrix::new(load.labels().to_vec(), values, k, true)?,
        trace,
    })
}

/// Rotates `x` (n×k) onto the eigenvectors of `xᵀx`.
fn to_principal_axes(x: &mut [f64], n: usize, k: usize) -> Result<()> {
    let mut gram = vec![0.0; k * k];
    for a in 0..k {
        for b in a..k {
            let s: f64 = (0..n).map(|i| x[i * k + a] * x[i * k + b]).sum();
            gram[a * k + b] = s;
            gram[b * k + a] = s;
        }
    }
    let axes = eigendecompose(&gram, k)?;
    let mut row = vec![0.0; k];
    for i in 0..n {
        for (j, r) in row.iter_mut().enumerate() {
            *r = (0..k).map(|p| x[i * k + p] * axes.component(p, j)).sum();
        }
        x[i * k..(i + 1) * k].copy_from_slice(&row);
    }
    Ok(())
}

/// Rotates columns `p` and `q` by the angle maximizing their joint criterion.
fn rotate_pair(x: &mut [f64], n: usize, k: usize, p: usize, q: usize) {
    let (mut a, mut b, mut c, mut d) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..n {
        let (xp, xq) = (x[i * k + p], x[i * k + q]);
        let u = xp * xp - xq * xq;
        let v = 2.0 * xp * xq;
        a += u;
        b += v;
        c += u * u - v * v;
        d += 2.0 * u * v;
    }
    let nf = n as f64;
    let num = d - 2.0 * a * b / nf;
    let den = c - (a * a - b * b) / nf;
    if num == 0.0 && den >= 0.0 {
        return;
    }
    let phi = 0.25 * num.atan2(den);
    let (sin, cos) = phi.sin_cos();
    for i in 0..n {
        let (xp, xq) = (x[i * k + p], x[i * k + q]);
        x[i * k + p] = cos * xp + sin * xq;
        x[i * k + q] = -sin * xp + cos * xq;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lm(rows: &[&[f64]]) -> LoadingMatrix {
        let k = rows[0].len();
        let labels = (0..rows.len()).map(|i| format!("w{i}")).collect();
        LoadingMatrix::new(labels, rows.concat(), k, false).unwrap()
    }

    #[test]
    fn single_factor_unchanged() {
        let l = lm(&[&[0.3], &[-0.8], &[0.5]]);
        let r = varimax(&l).unwrap();
        assert!(r.rotated);
        assert_eq!(r.values(), l.values());
    }

    #[test]
    fn recovers_simple_structure() {
        // a clean two-cluster pattern rotated by 30 degrees
        let (s, c) = (30f64.to_radians().sin(), 30f64.to_radians().cos());
        let base: [[f64; 2]; 4] = [[0.9, 0.0], [0.7, 0.0], [0.0, 0.8], [0.0, 0.5]];
        let rows: Vec<Vec<f64>> = base
            .iter()
            .map(|r| vec![c * r[0] - s * r[1], s * r[0] + c * r[1]])
            .collect();
        let refs: Vec<&[f64]> = rows.iter().map(Vec::as_slice).collect();
        let r = varimax(&lm(&refs)).unwrap();
        // column sums of squares 1.30 vs 0.89: columns keep base order
        for (i, want) in base.iter().enumerate() {
            for (j, w) in want.iter().enumerate() {
                assert!((r.get(i, j) - w).abs() < 1e-6, "{i},{j}: {}", r.get(i, j));
            }
        }
    }

    #[test]
    fn preserves_communalities() {
        let l = lm(&[
            &[0.6, 0.3, 0.1],
            &[0.5, -0.4, 0.2],
            &[0.1, 0.7, -0.3],
            &[0.2, 0.2, 0.8],
            &[0.4, 0.1, 0.1],
        ]);
        let r = varimax(&l).unwrap();
        for (a, b) in l.communalities().iter().zip(r.communalities()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_communality_row() {
        let l = lm(&[&[0.6, 0.3], &[0.0, 0.0], &[0.1, 0.7]]);
        assert!(matches!(varimax(&l), Err(Error::ZeroCommunality(w)) if w == "w1"));
    }

    #[test]
    fn criterion_never_decreases() {
        let l = lm(&[
            &[0.6, 0.3, 0.1],
            &[0.5, -0.4, 0.2],
            &[0.1, 0.7, -0.3],
            &[0.2, 0.2, 0.8],
        ]);
        let out = varimax_traced(&l).unwrap();
        for w in out.trace.windows(2) {
            assert!(w[1] >= w[0] - 1e-12);
        }
    }
}
