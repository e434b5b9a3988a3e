//! Exact ergodic rates: per-drop SINR evaluation and Monte-Carlo averaging.

mod mc;

pub use mc::{dl_mrt_rate, dl_zf_rate, exact_rate, exact_rates, mc_rate};

use serde::{Deserialize, Serialize};

use crate::channel::EffectiveChannel;
use crate::linalg::{column_norms_sqr, gram, hermitian_condition, hermitian_inverse_diagonal, MAX_CONDITION};
use crate::{CMatrix, Error, Result, Scheme};

/// Monte-Carlo settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McConfig {
    pub drops: usize,
    pub seed: u64,
}

impl McConfig {
    pub fn new(drops: usize, seed: u64) -> Result<Self> {
        if drops == 0 {
            return Err(Error::Parameter("at least one Monte-Carlo drop is required".into()));
        }
        Ok(McConfig { drops, seed })
    }
}

/// Transmit powers with unit noise: `p_avg` per uplink user, `p_total` for
/// the downlink base station.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkPowers {
    pub p_avg: f64,
    pub p_total: f64,
}

impl LinkPowers {
    pub fn new(p_avg: f64, p_total: f64) -> Result<Self> {
        for (name, v) in [("p_avg", p_avg), ("p_total", p_total)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Parameter(format!("{name} = {v} must be positive")));
            }
        }
        Ok(LinkPowers { p_avg, p_total })
    }

    /// Both powers equal to the linear SNR.
    pub fn from_snr_db(snr_db: f64) -> Result<Self> {
        let p = 10f64.powf(snr_db / 10.0);
        Self::new(p, p)
    }
}

/// Per-user and sum rates in bits/s/Hz.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateReport {
    pub scheme: String,
    pub per_user: Vec<f64>,
    pub sum: f64,
    /// Monte-Carlo standard error of each per-user rate; zero for closed forms.
    pub stderr: Vec<f64>,
    pub sum_stderr: f64,
    /// Drops that contributed to the averages.
    pub drops: usize,
    /// Drops discarded as degenerate.
    pub discarded: usize,
}

impl RateReport {
    pub(crate) fn closed_form(scheme: Scheme, per_user: Vec<f64>) -> RateReport {
        let n = per_user.len();
        RateReport {
            scheme: scheme.label().to_string(),
            sum: per_user.iter().sum(),
            per_user,
            stderr: vec![0.0; n],
            sum_stderr: 0.0,
            drops: 0,
            discarded: 0,
        }
    }
}

fn log2_1p(x: f64) -> f64 {
    x.ln_1p() / std::f64::consts::LN_2
}

/// `diag((G_eqᴴG_eq)⁻¹)`, or an error when the Gram matrix is ill-conditioned.
pub fn zf_gram_inverse_diagonal(geq: &EffectiveChannel) -> Result<Vec<f64>> {
    if geq.chains() < geq.users() {
        return Err(Error::Dimension(format!(
            "zero-forcing needs N_s >= N_u (got N_s={}, N_u={})",
            geq.chains(),
            geq.users()
        )));
    }
    let g = check_conditioning(geq)?;
    hermitian_inverse_diagonal(&g)
}

/// Uplink ZF: user `k` gets `log₂(1 + p_avg / [(G_eqᴴG_eq)⁻¹]_{k,k})`.
pub fn ul_zf_drop_rate(geq: &EffectiveChannel, pw: LinkPowers) -> Result<Vec<f64>> {
    Ok(zf_gram_inverse_diagonal(geq)?
        .iter()
        .map(|d| log2_1p(pw.p_avg / d))
        .collect())
}

/// Uplink MRC SINR per user. A zero column gets rate 0.
pub fn ul_mrc_drop_rate(geq: &EffectiveChannel, pw: LinkPowers) -> Vec<f64> {
    let g = gram(&geq.geq);
    let nu = geq.users();
    (0..nu)
        .map(|k| {
            let nk = g[(k, k)].re;
            if nk == 0.0 {
                return 0.0;
            }
            let interference: f64 = (0..nu).filter(|&j| j != k).map(|j| g[(k, j)].norm_sqr()).sum();
            log2_1p(pw.p_avg * nk * nk / (pw.p_avg * interference + nk))
        })
        .collect()
}

/// Unnormalized downlink precoder of one drop plus its normalization coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct PrecoderDrop {
    /// `N_s×N_u`: `G_eq*(G_eqᵀG_eq*)⁻¹` for ZF, `G_eq*` for MRT.
    pub wbar: CMatrix,
    pub rho: Vec<f64>,
}

impl PrecoderDrop {
    /// Squared Frobenius norm of `W̄`.
    pub fn frobenius_sqr(&self) -> f64 {
        self.wbar.norm_squared()
    }
}

fn check_conditioning(geq: &EffectiveChannel) -> Result<CMatrix> {
    let g = gram(&geq.geq);
    let cond = hermitian_condition(&g);
    if cond.is_nan() || cond > MAX_CONDITION {
        return Err(Error::Singular(cond));
    }
    Ok(g)
}

/// ZF precoder with short-term coefficients `ρ_k = 1/(√N_u·‖w̄_k‖)`.
pub fn zf_precoder(geq: &EffectiveChannel) -> Result<PrecoderDrop> {
    if geq.chains() < geq.users() {
        return Err(Error::Dimension("zero-forcing needs N_s >= N_u".into()));
    }
    // G_eqᵀG_eq* is the conjugate of the Gram matrix G_eqᴴG_eq
    let g = check_conditioning(geq)?;
    let inner = g.map(|z| z.conj()).try_inverse().ok_or(Error::Singular(f64::INFINITY))?;
    let wbar = geq.geq.map(|z| z.conj()) * inner;
    let rho = short_term_rho(&wbar)?;
    Ok(PrecoderDrop { wbar, rho })
}

/// MRT precoder `G_eq*` with short-term coefficients.
pub fn mrt_precoder(geq: &EffectiveChannel) -> Result<PrecoderDrop> {
    let wbar = geq.geq.map(|z| z.conj());
    let rho = short_term_rho(&wbar)?;
    Ok(PrecoderDrop { wbar, rho })
}

fn short_term_rho(wbar: &CMatrix) -> Result<Vec<f64>> {
    let nu = wbar.ncols() as f64;
    column_norms_sqr(wbar)
        .into_iter()
        .map(|n| {
            if n > 0.0 {
                Ok(1.0 / (nu * n).sqrt())
            } else {
                Err(Error::Singular(f64::INFINITY))
            }
        })
        .collect()
}

/// Downlink ZF rate of one drop for given `ρ_k²`: `log₂(1 + P·ρ_k²)`.
pub fn dl_zf_drop_rate(rho_sqr: &[f64], pw: LinkPowers) -> Vec<f64> {
    rho_sqr.iter().map(|r| log2_1p(pw.p_total * r)).collect()
}

/// Downlink MRT SINR per user for coefficients `ρ_k²`.
pub fn dl_mrt_drop_rate(geq: &EffectiveChannel, rho_sqr: &[f64], pw: LinkPowers) -> Vec<f64> {
    let g = gram(&geq.geq);
    let nu = geq.users();
    (0..nu)
        .map(|k| {
            let nk = g[(k, k)].re;
            let interference: f64 = (0..nu)
                .filter(|&j| j != k)
                .map(|j| rho_sqr[j] * g[(k, j)].norm_sqr())
                .sum();
            log2_1p(pw.p_total * rho_sqr[k] * nk * nk / (pw.p_total * interference + 1.0))
        })
        .collect()
}

/// Zero interference check helper: `G_eqᵀ·W̄`.
pub fn zf_residual(geq: &EffectiveChannel, pre: &PrecoderDrop) -> CMatrix {
    geq.geq.transpose() * &pre.wbar
}
