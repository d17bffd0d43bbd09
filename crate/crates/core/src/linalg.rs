use crate::error::{Error, Result};

/// Pivots below this magnitude mark the system as singular.
pub const PIVOT_TOL: f64 = 1e-12;

/// Solves the row-major `n x n` system `a x = b` by Gaussian elimination
/// with partial pivoting.
pub fn solve(mut a: Vec<f64>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let n = b.len();
    assert_eq!(a.len(), n * n);
    for col in 0..n {
        let (pivot_row, pivot) = (col..n)
            .map(|r| (r, a[r * n + col]))
            .max_by(|x, y| x.1.abs().total_cmp(&y.1.abs()))
            .expect("nonempty column");
        if pivot.abs() < PIVOT_TOL {
            return Err(Error::Singular { pivot: pivot.abs() });
        }
        if pivot_row != col {
            for j in 0..n {
                a.swap(col * n + j, pivot_row * n + j);
            }
            b.swap(col, pivot_row);
        }
        for r in col + 1..n {
            let factor = a[r * n + col] / pivot;
            if factor == 0.0 {
                continue;
            }
            for j in col..n {
                a[r * n + j] -= factor * a[col * n + j];
            }
            b[r] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let tail: f64 = (r + 1..n).map(|j| a[r * n + j] * x[j]).sum();
        x[r] = (b[r] - tail) / a[r * n + r];
    }
    Ok(x)
}

/// Stationary vector of the row-stochastic `n x n` matrix `p`: solves
/// `(P^T - I) x = 0` with the last equation replaced by `sum(x) = 1`.
pub fn stationary_vector(p: &[f64], n: usize) -> Result<Vec<f64>> {
    let mut a = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            a[i * n + j] = p[j * n + i] - if i == j { 1.0 } else { 0.0 };
        }
    }
    for j in 0..n {
        a[(n - 1) * n + j] = 1.0;
    }
    let mut b = vec![0.0; n];
    b[n - 1] = 1.0;
    solve(a, b)
}
