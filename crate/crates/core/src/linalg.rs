//! Small dense linear-algebra helpers over nalgebra.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_traits::Float;

/// Eigenpairs of a symmetric matrix, largest eigenvalue first.
///
/// Each eigenvector is signed so that its largest-magnitude entry (first on
/// ties) is positive, which keeps outputs reproducible.
pub fn sym_eigen(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), DMatrix::zeros(0, 0));
    }
    let sym = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .unwrap_or(core::cmp::Ordering::Equal)
    });
    let mut vals = Vec::with_capacity(n);
    let mut vecs = DMatrix::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        vals.push(eig.eigenvalues[k]);
        let mut v = eig.eigenvectors.column(k).clone_owned();
        let mut best = 0;
        for i in 1..n {
            if v[i].abs() > v[best].abs() * (1.0 + 1e-9) {
                best = i;
            }
        }
        if v[best] < 0.0 {
            v = -v;
        }
        vecs.set_column(col, &v);
    }
    (vals, vecs)
}

/// Orthonormal basis of the hyperplane orthogonal to the all-ones vector
/// (Helmert contrasts), as an `n x (n-1)` matrix.
pub fn helmert(n: usize) -> DMatrix<f64> {
    let mut q = DMatrix::zeros(n, n.saturating_sub(1));
    for j in 1..n {
        let s = ((j * (j + 1)) as f64).sqrt();
        for i in 0..j {
            q[(i, j - 1)] = 1.0 / s;
        }
        q[(j, j - 1)] = -(j as f64) / s;
    }
    q
}

/// Ratio of smallest to largest singular value (0 for a zero matrix).
pub fn inverse_condition(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 1.0;
    }
    let sv = m.clone().singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if max == 0.0 {
        0.0
    } else {
        min / max
    }
}

pub fn solve(a: &DMatrix<f64>, b: &DVector<f64>) -> Option<DVector<f64>> {
    a.clone().lu().solve(b)
}

/// Lawson-Hanson non-negative least squares: min |Ax - b| with x >= 0.
pub fn nnls(a: &DMatrix<f64>, b: &DVector<f64>, tol: f64) -> DVector<f64> {
    let n = a.ncols();
    let mut x = DVector::zeros(n);
    let mut passive = vec![false; n];
    let max_outer = 3 * n + 10;
    for _ in 0..max_outer {
        let w = a.transpose() * (b - a * &x);
        let mut pick = None;
        let mut best = tol;
        for j in 0..n {
            if !passive[j] && w[j] > best {
                best = w[j];
                pick = Some(j);
            }
        }
        let Some(j) = pick else { break };
        passive[j] = true;
        loop {
            let idx: Vec<usize> = (0..n).filter(|&k| passive[k]).collect();
            let sub = DMatrix::from_fn(a.nrows(), idx.len(), |r, c| a[(r, idx[c])]);
            let z_sub = match sub.clone().svd(true, true).solve(b, 1e-14) {
                Ok(z) => z,
                Err(_) => break,
            };
            let mut z = DVector::zeros(n);
            for (c, &k) in idx.iter().enumerate() {
                z[k] = z_sub[c];
            }
            if idx.iter().all(|&k| z[k] > 0.0) {
                x = z;
                break;
            }
            let mut alpha = f64::INFINITY;
            for &k in &idx {
                if z[k] <= 0.0 {
                    let step = x[k] / (x[k] - z[k]);
                    if step < alpha {
                        alpha = step;
                    }
                }
            }
            x += (z - &x) * alpha;
            for &k in &idx {
                if x[k] <= 1e-15 {
                    x[k] = 0.0;
                    passive[k] = false;
                }
            }
        }
    }
    x
}

/// Orthogonal `Q` minimising `sum |Q y_i - z_i|^2` for row-wise point sets
/// of equal width.
pub fn procrustes(y: &DMatrix<f64>, z: &DMatrix<f64>) -> DMatrix<f64> {
    let h = z.transpose() * y;
    let svd = h.svd(true, true);
    let u = svd.u.expect("u requested");
    let vt = svd.v_t.expect("v requested");
    u * vt
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn helmert_is_orthonormal_and_centered() {
        let q = helmert(5);
        let qtq = q.transpose() * &q;
        assert!((qtq - DMatrix::<f64>::identity(4, 4)).amax() < 1e-14);
        for j in 0..4 {
            assert!(q.column(j).sum().abs() < 1e-14);
        }
    }

    #[test]
    fn nnls_matches_known_solution() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 1.0, 1.0]);
        let b = DVector::from_vec(vec![1.0, -1.0, 0.0]);
        let x = nnls(&a, &b, 1e-12);
        assert!(x[1].abs() < 1e-12);
        assert!((x[0] - 0.5).abs() < 1e-12);
    }
}
