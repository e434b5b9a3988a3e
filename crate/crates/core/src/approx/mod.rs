//! Closed-form ergodic rate approximations.
//!
//! All six schemes depend on the analog beamformer only through the Gram
//! matrix of the beamformed LoS columns, `(F·H̄)ᴴ(F·H̄)`, and the number of
//! RF chains. [`EffectiveLos`] carries exactly that, so beam selection can
//! evaluate candidates from cached beam projections without forming `F`.

mod chi;
mod digamma;
mod sigma;

pub use chi::ChiSet;
pub use digamma::digamma;
pub use sigma::{epsilon_factors, SigmaHat};

use crate::channel::RiceanParams;
use crate::codebook::AnalogBeamformer;
use crate::linalg::gram;
use crate::linkrates::{LinkPowers, RateReport};
use crate::{CMatrix, Error, Result, Scheme};

/// Gram matrix of the analog-beamformed LoS columns and the chain count `N_s`.
#[derive(Debug, Clone)]
pub struct EffectiveLos {
    gram: CMatrix,
    chains: usize,
}

impl EffectiveLos {
    /// From `F·H̄` (`N_s×N_u`).
    pub fn from_beamformed(fh: &CMatrix) -> EffectiveLos {
        EffectiveLos {
            gram: gram(fh),
            chains: fh.nrows(),
        }
    }

    pub fn new(f: &AnalogBeamformer, p: &RiceanParams) -> Result<EffectiveLos> {
        if f.antennas() != p.antennas() {
            return Err(Error::Dimension(format!(
                "beamformer has {} columns, LoS has {} rows",
                f.antennas(),
                p.antennas()
            )));
        }
        Ok(Self::from_beamformed(&(f.matrix() * p.los())))
    }

    pub fn gram(&self) -> &CMatrix {
        &self.gram
    }

    pub fn chains(&self) -> usize {
        self.chains
    }

    pub fn users(&self) -> usize {
        self.gram.nrows()
    }

    /// `‖F·h̄_k‖²`.
    pub fn projection(&self, k: usize) -> f64 {
        self.gram[(k, k)].re
    }

    pub fn projections(&self) -> Vec<f64> {
        (0..self.users()).map(|k| self.projection(k)).collect()
    }
}

pub fn sigma_hat(p: &RiceanParams, f: &AnalogBeamformer) -> Result<SigmaHat> {
    let los = EffectiveLos::new(f, p)?;
    check_chains(Scheme::UlZf, los.chains(), p.users())?;
    Ok(SigmaHat::new(p.kappas(), &los))
}

pub fn chi_set(p: &RiceanParams, f: &AnalogBeamformer) -> Result<ChiSet> {
    let los = EffectiveLos::new(f, p)?;
    Ok(ChiSet::new(p.kappas(), &los))
}

fn check_chains(scheme: Scheme, ns: usize, nu: usize) -> Result<()> {
    match scheme {
        Scheme::DlZfLt if ns <= nu => Err(Error::Dimension(format!(
            "{scheme} needs N_s > N_u (got N_s={ns}, N_u={nu})"
        ))),
        Scheme::UlZf | Scheme::DlZfSt if ns < nu => Err(Error::Dimension(format!(
            "{scheme} needs N_s >= N_u (got N_s={ns}, N_u={nu})"
        ))),
        _ => Ok(()),
    }
}

fn log2_1p(x: f64) -> f64 {
    x.ln_1p() / std::f64::consts::LN_2
}

/// Closed-form rate of `scheme` for the beamformer `f`.
pub fn approx_rate(scheme: Scheme, p: &RiceanParams, f: &AnalogBeamformer, pw: LinkPowers) -> Result<RateReport> {
    let los = EffectiveLos::new(f, p)?;
    approx_rate_from_los(scheme, p.betas(), p.kappas(), &los, pw)
}

/// Same as [`approx_rate`] but from precomputed LoS geometry.
pub fn approx_rate_from_los(
    scheme: Scheme,
    betas: &[f64],
    kappas: &[f64],
    los: &EffectiveLos,
    pw: LinkPowers,
) -> Result<RateReport> {
    let nu = betas.len();
    if kappas.len() != nu || los.users() != nu {
        return Err(Error::Dimension(format!(
            "{nu} betas, {} K-factors, LoS Gram of order {}",
            kappas.len(),
            los.users()
        )));
    }
    let ns = los.chains();
    check_chains(scheme, ns, nu)?;
    let nsf = ns as f64;
    let nuf = nu as f64;

    let per_user: Vec<f64> = match scheme {
        Scheme::UlZf => {
            let sh = SigmaHat::new(kappas, los);
            let gain = digamma((ns - nu + 1) as f64)?.exp();
            epsilon_factors(&sh)
                .iter()
                .zip(betas)
                .map(|(eps, beta)| log2_1p(pw.p_avg * beta * eps * gain))
                .collect()
        }
        Scheme::DlZfLt | Scheme::DlZfSt => {
            let inv_diag = SigmaHat::new(kappas, los).inverse_diagonal()?;
            let x: Vec<f64> = inv_diag.iter().zip(betas).map(|(d, b)| d / b).collect();
            if scheme == Scheme::DlZfLt {
                let rate = log2_1p(pw.p_total * (nsf - nuf) / x.iter().sum::<f64>());
                vec![rate; nu]
            } else {
                x.iter()
                    .map(|xk| log2_1p(pw.p_total * (nsf - nuf + 1.0) / (nuf * xk)))
                    .collect()
            }
        }
        Scheme::UlMrc => {
            let chi = ChiSet::new(kappas, los);
            let w: Vec<f64> = (0..nu).map(|k| pw.p_avg * betas[k] / (kappas[k] + 1.0)).collect();
            (0..nu)
                .map(|k| {
                    let interference: f64 = (0..nu).filter(|&j| j != k).map(|j| w[j] * chi.chi2[k][j]).sum();
                    log2_1p(w[k] * chi.chi1[k] / (interference + chi.chi3[k]))
                })
                .collect()
        }
        Scheme::DlMrtLt => {
            let chi = ChiSet::new(kappas, los);
            let a: Vec<f64> = (0..nu).map(|k| betas[k] / (kappas[k] + 1.0)).collect();
            let total_power: f64 = (0..nu).map(|i| a[i] * chi.chi3[i]).sum();
            (0..nu)
                .map(|k| {
                    let interference: f64 = (0..nu)
                        .filter(|&j| j != k)
                        .map(|j| pw.p_total * a[k] * a[j] * chi.chi2[k][j])
                        .sum();
                    log2_1p(pw.p_total * a[k] * a[k] * chi.chi1[k] / (interference + total_power))
                })
                .collect()
        }
        Scheme::DlMrtSt => {
            let chi = ChiSet::new(kappas, los);
            (0..nu)
                .map(|k| {
                    let a = pw.p_total * betas[k] / (nuf * (kappas[k] + 1.0));
                    let interference: f64 = (0..nu)
                        .filter(|&j| j != k)
                        .map(|j| a * chi.chi2[k][j] / chi.chi3[j])
                        .sum();
                    log2_1p(a * chi.chi3[k] / (interference + 1.0))
                })
                .collect()
        }
    };
    Ok(RateReport::closed_form(scheme, per_user))
}

/// Rayleigh-fading closed forms for the uplink; independent of the beams.
pub fn rayleigh_rate(scheme: Scheme, betas: &[f64], ns: usize, nu: usize, pw: LinkPowers) -> Result<RateReport> {
    if betas.len() != nu || nu == 0 {
        return Err(Error::Dimension(format!("{} betas for {nu} users", betas.len())));
    }
    check_chains(scheme, ns, nu)?;
    let per_user = match scheme {
        Scheme::UlZf => {
            let gain = digamma((ns - nu + 1) as f64)?.exp();
            betas.iter().map(|b| log2_1p(pw.p_avg * b * gain)).collect()
        }
        Scheme::UlMrc => {
            let total: f64 = betas.iter().sum();
            betas
                .iter()
                .map(|b| log2_1p(pw.p_avg * b * (ns as f64 + 1.0) / (pw.p_avg * (total - b) + 1.0)))
                .collect()
        }
        other => {
            return Err(Error::Parameter(format!(
                "no Rayleigh reduction for {other}; only UL-ZF and UL-MRC"
            )))
        }
    };
    Ok(RateReport::closed_form(scheme, per_user))
}

/// Pure-LoS (`K → ∞`) limits, valid when the beamformed LoS columns are
/// mutually orthogonal. `projections[k] = ‖F·h̄_k‖²`.
pub fn los_limit_rate(
    scheme: Scheme,
    betas: &[f64],
    projections: &[f64],
    ns: usize,
    nu: usize,
    pw: LinkPowers,
) -> Result<RateReport> {
    if betas.len() != nu || projections.len() != nu || nu == 0 {
        return Err(Error::Dimension(format!(
            "{} betas and {} projections for {nu} users",
            betas.len(),
            projections.len()
        )));
    }
    if let Some(x) = projections.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
        return Err(Error::Parameter(format!("projected LoS power {x} must be non-negative")));
    }
    check_chains(scheme, ns, nu)?;
    let nsf = ns as f64;
    let nuf = nu as f64;
    let per_user: Vec<f64> = match scheme {
        Scheme::UlZf => {
            let gain = digamma((ns - nu + 1) as f64)?.exp();
            (0..nu)
                .map(|k| log2_1p(pw.p_avg * betas[k] * projections[k] / nsf * gain))
                .collect()
        }
        Scheme::UlMrc => (0..nu).map(|k| log2_1p(pw.p_avg * betas[k] * projections[k])).collect(),
        Scheme::DlZfLt => {
            if projections.contains(&0.0) {
                return Err(Error::Parameter(
                    "DL-ZF-LT limit diverges when a user has zero projected LoS power".into(),
                ));
            }
            let harmonic: f64 = (0..nu).map(|i| 1.0 / (betas[i] * projections[i])).sum();
            vec![log2_1p(pw.p_total * (nsf - nuf) / (nsf * harmonic)); nu]
        }
        Scheme::DlZfSt => (0..nu)
            .map(|k| log2_1p(pw.p_total * (nsf - nuf + 1.0) * betas[k] * projections[k] / (nsf * nuf)))
            .collect(),
        Scheme::DlMrtLt => {
            let total: f64 = (0..nu).map(|i| betas[i] * projections[i]).sum();
            (0..nu)
                .map(|k| {
                    let signal = betas[k] * projections[k];
                    if signal == 0.0 {
                        0.0
                    } else {
                        log2_1p(pw.p_total * signal * signal / total)
                    }
                })
                .collect()
        }
        Scheme::DlMrtSt => (0..nu)
            .map(|k| log2_1p(pw.p_total * betas[k] * projections[k] / nuf))
            .collect(),
    };
    Ok(RateReport::closed_form(scheme, per_user))
}
