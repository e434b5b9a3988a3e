//! Small dense helpers shared by the rate evaluators.

use nalgebra::{Cholesky, DVector};

use crate::{CMatrix, Error, Result, C64};

/// Gram matrices whose condition number exceeds this are treated as singular.
pub const MAX_CONDITION: f64 = 1e12;

/// `Aᴴ·A`.
pub fn gram(a: &CMatrix) -> CMatrix {
    a.adjoint() * a
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut ev: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Ratio of largest to smallest eigenvalue; infinite when the smallest is not positive.
pub fn hermitian_condition(m: &CMatrix) -> f64 {
    let ev = hermitian_eigenvalues(m);
    match (ev.first(), ev.last()) {
        (Some(&lo), Some(&hi)) if lo > 0.0 => hi / lo,
        (Some(_), Some(_)) => f64::INFINITY,
        _ => 1.0,
    }
}

/// Diagonal of `M⁻¹` for Hermitian positive-definite `M`, by Cholesky solves
/// against the canonical basis.
pub fn hermitian_inverse_diagonal(m: &CMatrix) -> Result<Vec<f64>> {
    let n = m.nrows();
    let chol = Cholesky::new(m.clone()).ok_or(Error::Singular(f64::INFINITY))?;
    let mut e = DVector::<C64>::zeros(n);
    let mut diag = Vec::with_capacity(n);
    for k in 0..n {
        e.fill(C64::new(0.0, 0.0));
        e[k] = C64::new(1.0, 0.0);
        let x = chol.solve(&e);
        diag.push(x[k].re);
    }
    Ok(diag)
}

/// `M` with row and column `k` deleted.
pub fn delete_row_col(m: &CMatrix, k: usize) -> CMatrix {
    m.clone().remove_row(k).remove_column(k)
}

/// Squared Euclidean norm of every column.
pub fn column_norms_sqr(a: &CMatrix) -> Vec<f64> {
    a.column_iter().map(|c| c.norm_squared()).collect()
}
