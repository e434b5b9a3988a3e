use rayon::prelude::*;

use super::{
    dl_mrt_drop_rate, dl_zf_drop_rate, mrt_precoder, ul_mrc_drop_rate, ul_zf_drop_rate, zf_gram_inverse_diagonal,
    zf_precoder, LinkPowers, McConfig, PrecoderDrop, RateReport,
};
use crate::approx::{ChiSet, EffectiveLos};
use crate::channel::{effective_channel, sample_channel, EffectiveChannel, RiceanParams};
use crate::codebook::AnalogBeamformer;
use crate::{Error, Normalization, Result, Scheme};

/// A non-degenerate drop, with whatever the scheme needs beyond `G_eq`.
struct Drop {
    geq: EffectiveChannel,
    precoder: Option<PrecoderDrop>,
}

fn draw(scheme: Scheme, p: &RiceanParams, f: &AnalogBeamformer, seed: u64, index: u64) -> Result<Option<Drop>> {
    let g = sample_channel(p, seed, index);
    let geq = effective_channel(f, &g)?;
    let precoder = match scheme {
        Scheme::UlZf => match zf_gram_inverse_diagonal(&geq) {
            Ok(_) => None,
            Err(Error::Singular(_)) => return Ok(None),
            Err(e) => return Err(e),
        },
        Scheme::DlZfLt | Scheme::DlZfSt => match zf_precoder(&geq) {
            Ok(pre) => Some(pre),
            Err(Error::Singular(_)) => return Ok(None),
            Err(e) => return Err(e),
        },
        Scheme::DlMrtSt => match mrt_precoder(&geq) {
            Ok(pre) => Some(pre),
            Err(Error::Singular(_)) => return Ok(None),
            Err(e) => return Err(e),
        },
        Scheme::UlMrc | Scheme::DlMrtLt => None,
    };
    Ok(Some(Drop { geq, precoder }))
}

fn drop_rates(scheme: Scheme, d: &Drop, pw: LinkPowers, mrt_long_rho_sqr: f64) -> Result<Vec<f64>> {
    let nu = d.geq.users();
    let rho_sqr = || -> Vec<f64> {
        d.precoder
            .as_ref()
            .map(|pre| pre.rho.iter().map(|r| r * r).collect())
            .unwrap_or_default()
    };
    Ok(match scheme {
        Scheme::UlZf => ul_zf_drop_rate(&d.geq, pw)?,
        Scheme::UlMrc => ul_mrc_drop_rate(&d.geq, pw),
        Scheme::DlZfSt => dl_zf_drop_rate(&rho_sqr(), pw),
        Scheme::DlMrtSt => dl_mrt_drop_rate(&d.geq, &rho_sqr(), pw),
        Scheme::DlMrtLt => dl_mrt_drop_rate(&d.geq, &vec![mrt_long_rho_sqr; nu], pw),
        Scheme::DlZfLt => unreachable!("long-term ZF has no per-drop rate"),
    })
}

/// Mean and standard error per user and for the sum, in drop order.
fn aggregate(scheme: Scheme, rates: &[Vec<f64>], discarded: usize) -> RateReport {
    let n = rates.len();
    let nu = rates[0].len();
    let nf = n as f64;
    let sums: Vec<f64> = rates.iter().map(|r| r.iter().sum()).collect();
    let mean_std = |values: &mut dyn Iterator<Item = f64>| -> (f64, f64) {
        let v: Vec<f64> = values.collect();
        let mean = v.iter().sum::<f64>() / nf;
        if n < 2 {
            return (mean, 0.0);
        }
        let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (nf - 1.0);
        (mean, (var / nf).sqrt())
    };
    let (per_user, stderr): (Vec<f64>, Vec<f64>) = (0..nu)
        .map(|k| mean_std(&mut rates.iter().map(|r| r[k])))
        .unzip();
    let (_, sum_stderr) = mean_std(&mut sums.iter().copied());
    RateReport {
        scheme: scheme.label().to_string(),
        sum: per_user.iter().sum(),
        per_user,
        stderr,
        sum_stderr,
        drops: n,
        discarded,
    }
}

/// Long-term MRT coefficient `ρ² = 1 / E‖G_eq‖²_F = 1 / Σ_i β_i·χ₃⁽ⁱ⁾/(K_i+1)`.
pub(crate) fn mrt_long_term_rho_sqr(p: &RiceanParams, f: &AnalogBeamformer) -> Result<f64> {
    let chi = ChiSet::new(p.kappas(), &EffectiveLos::new(f, p)?);
    let expected: f64 = (0..p.users())
        .map(|i| p.betas()[i] / (p.kappas()[i] + 1.0) * chi.chi3[i])
        .sum();
    Ok(1.0 / expected)
}

/// Exact rates of `scheme` at several power levels, sharing one set of drops.
///
/// Drops are evaluated in parallel but reduced in drop order, so the result
/// depends only on the inputs and `mc.seed`.
pub fn exact_rates(
    scheme: Scheme,
    p: &RiceanParams,
    f: &AnalogBeamformer,
    powers: &[LinkPowers],
    mc: McConfig,
) -> Result<Vec<RateReport>> {
    if mc.drops == 0 {
        return Err(Error::Parameter("at least one Monte-Carlo drop is required".into()));
    }
    if f.antennas() != p.antennas() {
        return Err(Error::Dimension(format!(
            "beamformer has {} columns, channel has {} antennas",
            f.antennas(),
            p.antennas()
        )));
    }
    let (ns, nu) = (f.chains(), p.users());
    if scheme.is_zero_forcing() && ns < nu {
        return Err(Error::Dimension(format!("{scheme} needs N_s >= N_u (got N_s={ns}, N_u={nu})")));
    }
    if scheme == Scheme::DlZfLt && ns == nu {
        return Err(Error::Dimension(format!(
            "{scheme} needs N_s > N_u for a finite E‖W̄‖²_F (got N_s=N_u={ns})"
        )));
    }

    let drawn: Vec<Option<Drop>> = (0..mc.drops as u64)
        .into_par_iter()
        .map(|d| draw(scheme, p, f, mc.seed, d))
        .collect::<Result<_>>()?;
    let kept: Vec<Drop> = drawn.into_iter().flatten().collect();
    let discarded = mc.drops - kept.len();
    if kept.is_empty() {
        return Err(Error::AllDropsDegenerate(mc.drops));
    }

    if scheme == Scheme::DlZfLt {
        // E‖W̄‖²_F estimated over the same drops, then one constant ρ
        let frob: f64 = kept
            .iter()
            .map(|d| d.precoder.as_ref().map_or(0.0, PrecoderDrop::frobenius_sqr))
            .sum::<f64>()
            / kept.len() as f64;
        let rho_sqr = 1.0 / frob;
        return Ok(powers
            .iter()
            .map(|&pw| RateReport {
                drops: kept.len(),
                discarded,
                ..RateReport::closed_form(scheme, dl_zf_drop_rate(&vec![rho_sqr; nu], pw))
            })
            .collect());
    }

    let mrt_rho = if scheme == Scheme::DlMrtLt {
        mrt_long_term_rho_sqr(p, f)?
    } else {
        0.0
    };
    powers
        .iter()
        .map(|&pw| {
            let rates: Vec<Vec<f64>> = kept
                .par_iter()
                .map(|d| drop_rates(scheme, d, pw, mrt_rho))
                .collect::<Result<_>>()?;
            Ok(aggregate(scheme, &rates, discarded))
        })
        .collect()
}

pub fn exact_rate(
    scheme: Scheme,
    p: &RiceanParams,
    f: &AnalogBeamformer,
    pw: LinkPowers,
    mc: McConfig,
) -> Result<RateReport> {
    Ok(exact_rates(scheme, p, f, &[pw], mc)?.remove(0))
}

/// Uplink Monte-Carlo rate for `UlZf` or `UlMrc`.
pub fn mc_rate(scheme: Scheme, p: &RiceanParams, f: &AnalogBeamformer, pw: LinkPowers, mc: McConfig) -> Result<RateReport> {
    if scheme.normalization().is_some() {
        return Err(Error::Parameter(format!("{scheme} is not an uplink scheme")));
    }
    exact_rate(scheme, p, f, pw, mc)
}

pub fn dl_zf_rate(
    p: &RiceanParams,
    f: &AnalogBeamformer,
    pw: LinkPowers,
    norm: Normalization,
    mc: McConfig,
) -> Result<RateReport> {
    let scheme = match norm {
        Normalization::Long => Scheme::DlZfLt,
        Normalization::Short => Scheme::DlZfSt,
    };
    exact_rate(scheme, p, f, pw, mc)
}

pub fn dl_mrt_rate(
    p: &RiceanParams,
    f: &AnalogBeamformer,
    pw: LinkPowers,
    norm: Normalization,
    mc: McConfig,
) -> Result<RateReport> {
    let scheme = match norm {
        Normalization::Long => Scheme::DlMrtLt,
        Normalization::Short => Scheme::DlMrtSt,
    };
    exact_rate(scheme, p, f, pw, mc)
}
