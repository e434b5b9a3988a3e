use super::EffectiveLos;

/// Moments of the effective channel columns under Ricean fading.
///
/// * `chi3[k] = K_k‖F·h̄_k‖² + N_s`
/// * `chi1[k] = chi3[k]² + 2·chi3[k] − N_s`
/// * `chi2[k][j] = K_k·K_j·|h̄_jᴴFᴴF·h̄_k|² + chi3[j] + chi3[k] − N_s` for `j ≠ k`
#[derive(Debug, Clone, PartialEq)]
pub struct ChiSet {
    pub chi3: Vec<f64>,
    pub chi1: Vec<f64>,
    /// Diagonal entries are unused and left at zero.
    pub chi2: Vec<Vec<f64>>,
}

impl ChiSet {
    pub fn new(kappas: &[f64], los: &EffectiveLos) -> ChiSet {
        let nu = kappas.len();
        let ns = los.chains() as f64;
        let chi3: Vec<f64> = (0..nu).map(|k| kappas[k] * los.projection(k) + ns).collect();
        let chi1 = chi3.iter().map(|&c| c * c + 2.0 * c - ns).collect();
        let chi2 = (0..nu)
            .map(|k| {
                (0..nu)
                    .map(|j| {
                        if j == k {
                            0.0
                        } else {
                            kappas[k] * kappas[j] * los.gram()[(j, k)].norm_sqr() + chi3[j] + chi3[k] - ns
                        }
                    })
                    .collect()
            })
            .collect();
        ChiSet { chi3, chi1, chi2 }
    }
}
