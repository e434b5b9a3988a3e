//! Ricean multiuser channels and their analog-beamformed (effective) versions.
//!
//! Every random draw comes from a ChaCha8 stream keyed by `(seed, stream)`.
//! Drop `d` of a Monte-Carlo run uses stream `d`; the line-of-sight matrix
//! uses [`LOS_STREAM`], so both can share one seed without overlapping.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::codebook::AnalogBeamformer;
use crate::{CMatrix, Error, Result, C64};

/// Stream reserved for drawing the fixed LoS component.
pub const LOS_STREAM: u64 = u64::MAX;

/// RNG for a given seed and stream index.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// One `CN(0, 1)` sample.
pub fn complex_normal<R: rand::Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// `rows×cols` matrix of i.i.d. `CN(0, 1)` entries, filled column by column.
pub fn complex_gaussian_matrix<R: rand::Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    let mut m = CMatrix::zeros(rows, cols);
    for c in 0..cols {
        for r in 0..rows {
            m[(r, c)] = complex_normal(rng);
        }
    }
    m
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum LosModel {
    /// Entries i.i.d. `CN(0, 1)`, drawn once and held fixed.
    GaussianIid,
    /// Half-wavelength ULA steering vectors; one angle (radians) per user.
    UlaSteering { angles: Vec<f64> },
}

/// Deterministic LoS matrix `H̄` (`M×N_u`).
pub fn gen_los(model: &LosModel, antennas: usize, users: usize, seed: u64) -> Result<CMatrix> {
    if users == 0 || antennas < users {
        return Err(Error::Dimension(format!(
            "LoS matrix needs M >= N_u >= 1, got M={antennas}, N_u={users}"
        )));
    }
    match model {
        LosModel::GaussianIid => {
            let mut rng = stream_rng(seed, LOS_STREAM);
            Ok(complex_gaussian_matrix(&mut rng, antennas, users))
        }
        LosModel::UlaSteering { angles } => {
            if angles.len() != users {
                return Err(Error::Dimension(format!(
                    "{} steering angles for {users} users",
                    angles.len()
                )));
            }
            if let Some(a) = angles.iter().find(|a| !(-FRAC_PI_2..=FRAC_PI_2).contains(*a)) {
                return Err(Error::Parameter(format!("steering angle {a} outside [-π/2, π/2]")));
            }
            Ok(CMatrix::from_fn(antennas, users, |m, k| {
                C64::from_polar(1.0, PI * m as f64 * angles[k].sin())
            }))
        }
    }
}

/// Large-scale gains, Ricean factors (linear) and LoS matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct RiceanParams {
    betas: Vec<f64>,
    kappas: Vec<f64>,
    los: CMatrix,
}

impl RiceanParams {
    pub fn new(betas: Vec<f64>, kappas: Vec<f64>, los: CMatrix) -> Result<Self> {
        let nu = betas.len();
        if nu == 0 || kappas.len() != nu || los.ncols() != nu {
            return Err(Error::Dimension(format!(
                "{} betas, {} K-factors, LoS with {} columns",
                nu,
                kappas.len(),
                los.ncols()
            )));
        }
        if let Some(b) = betas.iter().find(|b| !(b.is_finite() && **b > 0.0)) {
            return Err(Error::Parameter(format!("large-scale gain {b} must be positive and finite")));
        }
        if let Some(k) = kappas.iter().find(|k| !(k.is_finite() && **k >= 0.0)) {
            return Err(Error::Parameter(format!("Ricean factor {k} must be finite and non-negative")));
        }
        if los.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::Parameter("LoS matrix has non-finite entries".into()));
        }
        Ok(RiceanParams { betas, kappas, los })
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    pub fn kappas(&self) -> &[f64] {
        &self.kappas
    }

    pub fn los(&self) -> &CMatrix {
        &self.los
    }

    pub fn users(&self) -> usize {
        self.betas.len()
    }

    pub fn antennas(&self) -> usize {
        self.los.nrows()
    }

    /// `√(K_k/(K_k+1))`.
    pub fn los_weight(&self, k: usize) -> f64 {
        let kk = self.kappas[k];
        (kk / (kk + 1.0)).sqrt()
    }

    /// `√(1/(K_k+1))`.
    pub fn scatter_weight(&self, k: usize) -> f64 {
        (1.0 / (self.kappas[k] + 1.0)).sqrt()
    }

    /// `E{G} = H̄·[Ω(Ω+I)⁻¹]^{1/2}·D^{1/2}`.
    pub fn mean_channel(&self) -> CMatrix {
        let mut g = self.los.clone();
        for (k, mut col) in g.column_iter_mut().enumerate() {
            col *= C64::from(self.los_weight(k) * self.betas[k].sqrt());
        }
        g
    }
}

/// One fading realization `G = H·D^{1/2}` (`M×N_u`).
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub g: CMatrix,
}

/// Draws the channel of drop `drop` for `seed`. Same pair, same bits.
pub fn sample_channel(p: &RiceanParams, seed: u64, drop: u64) -> ChannelRealization {
    let mut rng = stream_rng(seed, drop);
    let mut g = complex_gaussian_matrix(&mut rng, p.antennas(), p.users());
    for (k, mut col) in g.column_iter_mut().enumerate() {
        let a = p.los_weight(k);
        let b = p.scatter_weight(k);
        let s = p.betas[k].sqrt();
        for (m, z) in col.iter_mut().enumerate() {
            *z = (p.los[(m, k)] * a + *z * b) * s;
        }
    }
    ChannelRealization { g }
}

/// `G_eq = F·G` (`N_s×N_u`).
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveChannel {
    pub geq: CMatrix,
}

impl EffectiveChannel {
    pub fn new(geq: CMatrix) -> Result<Self> {
        if geq.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::Parameter("effective channel has non-finite entries".into()));
        }
        Ok(EffectiveChannel { geq })
    }

    pub fn users(&self) -> usize {
        self.geq.ncols()
    }

    pub fn chains(&self) -> usize {
        self.geq.nrows()
    }
}

pub fn effective_channel(f: &AnalogBeamformer, g: &ChannelRealization) -> Result<EffectiveChannel> {
    if f.antennas() != g.g.nrows() {
        return Err(Error::Dimension(format!(
            "beamformer has {} columns, channel has {} rows",
            f.antennas(),
            g.g.nrows()
        )));
    }
    Ok(EffectiveChannel {
        geq: f.matrix() * &g.g,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codebook::{BeamSelection, DftCodebook};

    fn params(betas: Vec<f64>, kappas: Vec<f64>, m: usize, seed: u64) -> RiceanParams {
        let nu = betas.len();
        let los = gen_los(&LosModel::GaussianIid, m, nu, seed).unwrap();
        RiceanParams::new(betas, kappas, los).unwrap()
    }

    #[test]
    fn broadside_steering() {
        let h = gen_los(&LosModel::UlaSteering { angles: vec![0.0] }, 4, 1, 0).unwrap();
        assert!(h.iter().all(|z| (z - C64::new(1.0, 0.0)).norm() < 1e-15));
    }

    #[test]
    fn los_validation() {
        assert!(gen_los(&LosModel::GaussianIid, 2, 3, 0).is_err());
        assert!(gen_los(&LosModel::GaussianIid, 2, 0, 0).is_err());
        assert!(gen_los(&LosModel::UlaSteering { angles: vec![0.0] }, 4, 2, 0).is_err());
        assert!(gen_los(&LosModel::UlaSteering { angles: vec![2.0] }, 4, 1, 0).is_err());
    }

    #[test]
    fn gaussian_los_is_seeded() {
        let a = gen_los(&LosModel::GaussianIid, 16, 4, 7).unwrap();
        let b = gen_los(&LosModel::GaussianIid, 16, 4, 7).unwrap();
        let c = gen_los(&LosModel::GaussianIid, 16, 4, 8).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn gaussian_los_column_power() {
        let m = 16;
        let mut total = 0.0;
        for seed in 0..1250 {
            let h = gen_los(&LosModel::GaussianIid, m, 8, seed).unwrap();
            total += h.column_iter().map(|c| c.norm_squared()).sum::<f64>();
        }
        let mean = total / 10_000.0;
        assert!((mean / m as f64 - 1.0).abs() < 0.05, "mean column power {mean}");
    }

    #[test]
    fn params_validation() {
        let los = CMatrix::zeros(4, 2);
        assert!(RiceanParams::new(vec![1.0], vec![0.0, 0.0], los.clone()).is_err());
        assert!(RiceanParams::new(vec![1.0, 0.0], vec![0.0, 0.0], los.clone()).is_err());
        assert!(RiceanParams::new(vec![1.0, 1.0], vec![0.0, f64::INFINITY], los.clone()).is_err());
        assert!(RiceanParams::new(vec![1.0, 1.0], vec![-1.0, 0.0], los.clone()).is_err());
        assert!(RiceanParams::new(vec![1.0, 1.0], vec![0.0, 3.0], los).is_ok());
    }

    #[test]
    fn sampling_is_reproducible() {
        let p = params(vec![1.0, 2.0], vec![1.0, 10.0], 8, 1);
        assert_eq!(sample_channel(&p, 5, 17), sample_channel(&p, 5, 17));
        assert_ne!(sample_channel(&p, 5, 17), sample_channel(&p, 5, 18));
    }

    #[test]
    fn los_dominant_limit() {
        let p = params(vec![1.0], vec![1e8], 8, 2);
        let g = sample_channel(&p, 0, 0).g;
        for m in 0..8 {
            assert!((g[(m, 0)] - p.los()[(m, 0)]).norm() < 1e-3);
        }
    }

    #[test]
    fn rayleigh_covariance_is_identity() {
        let m = 4;
        let drops = 10_000;
        let p = params(vec![1.0], vec![0.0], m, 4);
        let mut cov = CMatrix::zeros(m, m);
        for d in 0..drops {
            let g = sample_channel(&p, 9, d).g;
            cov += &g * g.adjoint();
        }
        cov /= C64::from(drops as f64);
        for i in 0..m {
            assert!((cov[(i, i)].re - 1.0).abs() < 0.05);
            for j in 0..m {
                if i != j {
                    assert!(cov[(i, j)].norm() < 0.05);
                }
            }
        }
    }

    #[test]
    fn beta_scales_power() {
        let m = 8;
        let p = params(vec![4.0], vec![0.0], m, 5);
        let drops = 10_000;
        let mean = (0..drops)
            .map(|d| sample_channel(&p, 1, d).g.norm_squared())
            .sum::<f64>()
            / drops as f64;
        assert!((mean / (4.0 * m as f64) - 1.0).abs() < 0.05, "mean {mean}");
    }

    #[test]
    fn channel_mean_matches_los_part() {
        let m = 4;
        let p = params(vec![2.0, 0.5], vec![3.0, 1.0], m, 6);
        let drops = 20_000;
        let mut acc = CMatrix::zeros(m, 2);
        for d in 0..drops {
            acc += sample_channel(&p, 2, d).g;
        }
        acc /= C64::from(drops as f64);
        let diff = (acc - p.mean_channel()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        // per-entry standard error is at most sqrt(β/(K+1)/drops) ≈ 0.007
        assert!(diff < 0.04, "max deviation {diff}");
    }

    #[test]
    fn beamformed_noise_is_white() {
        let m = 16;
        let cb = DftCodebook::new(m).unwrap();
        let f = cb.analog_beamformer(&BeamSelection::new(vec![0, 3, 9]).unwrap()).unwrap();
        let mut rng = stream_rng(11, 0);
        let draws = 10_000;
        let mut cov = CMatrix::zeros(3, 3);
        for _ in 0..draws {
            let z = complex_gaussian_matrix(&mut rng, m, 1);
            let fz = f.matrix() * z;
            cov += &fz * fz.adjoint();
        }
        cov /= C64::from(draws as f64);
        for i in 0..3 {
            assert!((cov[(i, i)].re - 1.0).abs() < 0.05);
            for j in 0..3 {
                if i != j {
                    assert!(cov[(i, j)].norm() < 0.05);
                }
            }
        }
    }

    #[test]
    fn effective_channel_cases() {
        let m = 4;
        let cb = DftCodebook::new(m).unwrap();
        // user aligned to beam 0
        let g = CMatrix::from_fn(m, 1, |r, _| cb.matrix()[(0, r)].conj() * (m as f64).sqrt());
        let f = cb.analog_beamformer(&BeamSelection::new(vec![0]).unwrap()).unwrap();
        let eq = effective_channel(&f, &ChannelRealization { g }).unwrap();
        assert!((eq.geq[(0, 0)] - C64::new(2.0, 0.0)).norm() < 1e-12);

        let p = params(vec![1.0, 1.0, 1.0], vec![1.0, 1.0, 1.0], m, 8);
        let real = sample_channel(&p, 3, 0);
        let full = cb.analog_beamformer(&BeamSelection::new(vec![0, 1, 2, 3]).unwrap()).unwrap();
        let eq = effective_channel(&full, &real).unwrap();
        assert!((eq.geq.norm() - real.g.norm()).abs() < 1e-10);

        let f = cb.analog_beamformer(&BeamSelection::new(vec![1, 3]).unwrap()).unwrap();
        let eq = effective_channel(&f, &real).unwrap();
        for r in 0..2 {
            let beam = [1, 3][r];
            for k in 0..3 {
                let mut acc = C64::default();
                for n in 0..m {
                    acc += cb.matrix()[(beam, n)] * real.g[(n, k)];
                }
                assert!((eq.geq[(r, k)] - acc).norm() < 1e-12);
            }
        }

        let wrong = ChannelRealization { g: CMatrix::zeros(5, 1) };
        assert!(effective_channel(&f, &wrong).is_err());
    }
}
