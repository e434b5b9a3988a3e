use crate::linalg::{delete_row_col, hermitian_eigenvalues, hermitian_inverse_diagonal};
use crate::{CMatrix, Result, C64};

use super::EffectiveLos;

/// Covariance of the central-Wishart surrogate for the effective Gram matrix,
/// plus its leave-one-user-out principal submatrices.
#[derive(Debug, Clone)]
pub struct SigmaHat {
    pub full: CMatrix,
    pub leave_one_out: Vec<CMatrix>,
    /// Eigenvalues of `full`, ascending.
    pub eigen_full: Vec<f64>,
    /// Eigenvalues of each `leave_one_out[k]`, ascending.
    pub eigen_loo: Vec<Vec<f64>>,
}

impl SigmaHat {
    /// `Σ̂ = (Ω+I)⁻¹ + TᴴT / N_s` with `T = F·H̄·[Ω(Ω+I)⁻¹]^{1/2}`.
    pub fn new(kappas: &[f64], los: &EffectiveLos) -> SigmaHat {
        let nu = kappas.len();
        let ns = los.chains() as f64;
        let w: Vec<f64> = kappas.iter().map(|&k| (k / (k + 1.0)).sqrt()).collect();
        let mut full = CMatrix::from_fn(nu, nu, |i, j| los.gram()[(i, j)] * (w[i] * w[j] / ns));
        for (i, &k) in kappas.iter().enumerate() {
            full[(i, i)] = C64::new(full[(i, i)].re + 1.0 / (k + 1.0), 0.0);
        }
        let leave_one_out: Vec<CMatrix> = (0..nu).map(|k| delete_row_col(&full, k)).collect();
        let eigen_full = hermitian_eigenvalues(&full);
        let eigen_loo = leave_one_out.iter().map(hermitian_eigenvalues).collect();
        SigmaHat {
            full,
            leave_one_out,
            eigen_full,
            eigen_loo,
        }
    }

    pub fn users(&self) -> usize {
        self.full.nrows()
    }

    /// `[Σ̂⁻¹]_{k,k}` for every user.
    pub fn inverse_diagonal(&self) -> Result<Vec<f64>> {
        hermitian_inverse_diagonal(&self.full)
    }
}

/// `ε_k = Π_i α_i / Π_i ᾱ_{k,i}`.
pub fn epsilon_factors(sh: &SigmaHat) -> Vec<f64> {
    // accumulate in logs; products of many eigenvalues overflow at large K
    let full: f64 = sh.eigen_full.iter().map(|a| a.ln()).sum();
    sh.eigen_loo
        .iter()
        .map(|loo| (full - loo.iter().map(|a| a.ln()).sum::<f64>()).exp())
        .collect()
}
