use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Least-squares solution of `X B = Y` for one or more right-hand sides.
pub(crate) struct LeastSquares {
    /// `p x m` coefficient matrix.
    pub coef: DMatrix<f64>,
    /// `n x m` residual matrix.
    pub residuals: DMatrix<f64>,
    /// Diagonal of `(X'X)^-1`.
    pub xtx_inv_diag: DVector<f64>,
}

/// Relative pivot size below which a design column counts as collinear.
const RANK_TOL: f64 = 1e-10;

/// Householder-QR least squares. Fails when `X` is rank deficient.
pub(crate) fn least_squares(x: &DMatrix<f64>, y: &DMatrix<f64>) -> Result<LeastSquares> {
    let (n, p) = x.shape();
    assert_eq!(y.nrows(), n, "design and response row counts differ");
    if p == 0 {
        return Ok(LeastSquares {
            coef: DMatrix::zeros(0, y.ncols()),
            residuals: y.clone(),
            xtx_inv_diag: DVector::zeros(0),
        });
    }
    if n < p {
        return Err(Error::Singular(format!("{n} observations for {p} regressors")));
    }
    let qr = x.clone().qr();
    let r = qr.r();
    for j in 0..p {
        let col_norm = x.column(j).norm();
        if col_norm == 0.0 || r[(j, j)].abs() <= RANK_TOL * col_norm {
            return Err(Error::Singular(format!(
                "design matrix is rank deficient at column {j}"
            )));
        }
    }
    let mut qty = y.clone();
    qr.q_tr_mul(&mut qty);
    let rhs = qty.rows(0, p).into_owned();
    let coef = r
        .solve_upper_triangular(&rhs)
        .ok_or_else(|| Error::Singular("triangular solve failed".into()))?;
    let residuals = y - x * &coef;
    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(p, p))
        .ok_or_else(|| Error::Singular("triangular inverse failed".into()))?;
    let xtx_inv_diag = DVector::from_iterator(p, (0..p).map(|i| r_inv.row(i).norm_squared()));
    Ok(LeastSquares {
        coef,
        residuals,
        xtx_inv_diag,
    })
}

/// Builds an `n x p` matrix from column slices.
pub(crate) fn from_columns(n: usize, columns: &[Vec<f64>]) -> DMatrix<f64> {
    DMatrix::from_fn(n, columns.len(), |i, j| columns[j][i])
}

/// Log-determinant of a symmetric positive definite matrix.
pub(crate) fn ln_det_spd(m: &DMatrix<f64>, what: &str) -> Result<f64> {
    let chol = m.clone().cholesky().ok_or_else(|| {
        Error::Singular(format!("{what} is not positive definite"))
    })?;
    Ok(2.0 * chol.l().diagonal().iter().map(|d| d.ln()).sum::<f64>())
}
