use rayon::prelude::*;

use super::config::{ExperimentConfig, SelectionSpec, DEFAULT_SELECTION_SNR_DB};
use crate::approx::approx_rate;
use crate::channel::{gen_los, RiceanParams};
use crate::codebook::{BeamSelection, DftCodebook};
use crate::linkrates::{exact_rates, LinkPowers, McConfig};
use crate::selection::{select, SelectionContext, DEFAULT_BUDGET};
use crate::{Error, Result};

/// One output line: a user (or the sum, `user = -1`) at one SNR point.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub snr_db: f64,
    pub k_db: f64,
    pub scheme: String,
    pub selection: Vec<usize>,
    pub user: i64,
    pub rate_exact: f64,
    pub rate_approx: f64,
    pub mc_stderr: f64,
    pub comparisons: u64,
    pub discarded_drops: u64,
}

pub const SUM_ROW: i64 = -1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Snr,
    KDb,
    MarginN,
}

impl std::str::FromStr for SweepAxis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "snr" | "snr_db" => Ok(SweepAxis::Snr),
            "k_db" | "k" => Ok(SweepAxis::KDb),
            "margin_n" | "n" => Ok(SweepAxis::MarginN),
            other => Err(Error::config("axis", format!("`{other}` is not snr, k_db or margin_n"))),
        }
    }
}

/// Draws H̄, selects beams once, then evaluates exact and approximate rates
/// at every SNR point.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let r = cfg.resolve()?;
    let los = gen_los(&cfg.los_model.0, cfg.m, cfg.nu, cfg.los_seed())?;
    let params = RiceanParams::new(r.betas.clone(), r.kappas.clone(), los)?;
    let codebook = DftCodebook::new(cfg.m)?;

    let (selection, comparisons) = match &cfg.selection {
        SelectionSpec::Fixed(idx) => (BeamSelection::new(idx.clone())?, 0),
        spec => {
            let scheme = spec.scheme().expect("non-fixed selection");
            let snr = cfg.selection_snr_db.unwrap_or(DEFAULT_SELECTION_SNR_DB);
            let ctx = SelectionContext::new(
                params.clone(),
                codebook.clone(),
                r.scheme,
                LinkPowers::from_snr_db(snr)?,
                cfg.ns,
                cfg.margin_n,
            )?
            .with_budget(cfg.exhaustive_budget.unwrap_or(DEFAULT_BUDGET));
            let res = select(scheme, &ctx)?;
            (res.selection, res.comparisons)
        }
    };
    let f = codebook.analog_beamformer(&selection)?;

    let powers: Vec<LinkPowers> = cfg
        .snr_db_grid
        .iter()
        .map(|&s| LinkPowers::from_snr_db(s))
        .collect::<Result<_>>()?;
    let exact = exact_rates(r.scheme, &params, &f, &powers, McConfig::new(cfg.drops, cfg.seed)?)?;

    let k_sum = if r.kappas_db.iter().all(|&k| k == r.kappas_db[0]) {
        r.kappas_db[0]
    } else {
        r.kappas_db.iter().sum::<f64>() / r.kappas_db.len() as f64
    };
    let indices = selection.indices().to_vec();
    let mut rows = Vec::with_capacity(cfg.snr_db_grid.len() * (cfg.nu + 1));
    for ((&snr, &pw), ex) in cfg.snr_db_grid.iter().zip(&powers).zip(&exact) {
        let ap = approx_rate(r.scheme, &params, &f, pw)?;
        let row = |user: i64, k_db: f64, rate_exact: f64, rate_approx: f64, mc_stderr: f64| ResultRow {
            snr_db: snr,
            k_db,
            scheme: r.scheme.label().to_string(),
            selection: indices.clone(),
            user,
            rate_exact,
            rate_approx,
            mc_stderr,
            comparisons,
            discarded_drops: ex.discarded as u64,
        };
        for k in 0..cfg.nu {
            rows.push(row(k as i64, r.kappas_db[k], ex.per_user[k], ap.per_user[k], ex.stderr[k]));
        }
        rows.push(row(SUM_ROW, k_sum, ex.sum, ap.sum, ex.sum_stderr));
    }
    Ok(rows)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for the `index`-th sweep point.
pub fn sub_seed(seed: u64, index: usize) -> u64 {
    splitmix64(seed ^ splitmix64(index as u64))
}

/// Config for one sweep point. SNR points keep the base seed so they reuse the
/// drops of a plain run; the other axes get derived sub-seeds. H̄ always comes
/// from the base LoS seed.
pub fn sweep_point(cfg: &ExperimentConfig, axis: SweepAxis, value: f64, index: usize) -> Result<ExperimentConfig> {
    let mut c = cfg.clone();
    c.los_seed = Some(cfg.los_seed());
    match axis {
        SweepAxis::Snr => c.snr_db_grid = vec![value],
        SweepAxis::KDb => {
            c.k_db = super::config::PerUser::Scalar(value);
            c.seed = sub_seed(cfg.seed, index);
        }
        SweepAxis::MarginN => {
            if !(value >= 1.0 && value.fract() == 0.0 && value <= u32::MAX as f64) {
                return Err(Error::config("values", format!("margin_n value {value} is not a positive integer")));
            }
            c.margin_n = value as usize;
            c.seed = sub_seed(cfg.seed, index);
        }
    }
    Ok(c)
}

/// Runs one experiment per value and concatenates the rows in value order.
/// Every point is validated before any of them runs.
pub fn sweep(cfg: &ExperimentConfig, axis: SweepAxis, values: &[f64]) -> Result<Vec<ResultRow>> {
    if values.is_empty() {
        return Err(Error::config("values", "empty sweep value list"));
    }
    let points: Vec<ExperimentConfig> = values
        .iter()
        .enumerate()
        .map(|(i, &v)| sweep_point(cfg, axis, v, i))
        .collect::<Result<_>>()?;
    for p in &points {
        p.validate()?;
    }
    let parts: Vec<Vec<ResultRow>> = points.par_iter().map(run_experiment).collect::<Result<_>>()?;
    Ok(parts.into_iter().flatten().collect())
}
