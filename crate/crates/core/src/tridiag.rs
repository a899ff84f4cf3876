//! Symmetric tridiagonal solves by forward elimination and back substitution.

use crate::error::{ChainError, Result};

/// Solve `A x = rhs` for symmetric tridiagonal `A` with diagonal `diag` (length `m`)
/// and off-diagonal `off` (length `m - 1`, `A_{i,i+1} = A_{i+1,i} = off[i]`).
pub fn solve_symmetric(diag: &[f64], off: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let m = diag.len();
    if m == 0 || rhs.len() != m || off.len() + 1 != m {
        return Err(ChainError::Size(format!(
            "tridiagonal system with {} diagonal, {} off-diagonal, {} rhs entries",
            m,
            off.len(),
            rhs.len()
        )));
    }
    let mut c = vec![0.0; m];
    let mut d = vec![0.0; m];
    let mut piv = diag[0];
    if piv == 0.0 || !piv.is_finite() {
        return Err(ChainError::Internal("zero pivot in tridiagonal elimination".into()));
    }
    c[0] = if m > 1 { off[0] / piv } else { 0.0 };
    d[0] = rhs[0] / piv;
    for i in 1..m {
        piv = diag[i] - off[i - 1] * c[i - 1];
        if piv == 0.0 || !piv.is_finite() {
            return Err(ChainError::Internal(format!("zero pivot at row {i} in tridiagonal elimination")));
        }
        if i + 1 < m {
            c[i] = off[i] / piv;
        }
        d[i] = (rhs[i] - off[i - 1] * d[i - 1]) / piv;
    }
    let mut x = d;
    for i in (0..m - 1).rev() {
        x[i] -= c[i] * x[i + 1];
    }
    Ok(x)
}

/// `A x` for the same storage layout.
pub fn apply_symmetric(diag: &[f64], off: &[f64], x: &[f64]) -> Vec<f64> {
    let m = diag.len();
    (0..m)
        .map(|i| {
            let mut y = diag[i] * x[i];
            if i > 0 {
                y += off[i - 1] * x[i - 1];
            }
            if i + 1 < m {
                y += off[i] * x[i + 1];
            }
            y
        })
        .collect()
}
