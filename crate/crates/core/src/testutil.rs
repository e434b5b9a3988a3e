use rand::Rng;

use crate::channel::{complex_gaussian_matrix, stream_rng, RiceanParams};
use crate::codebook::DftCodebook;
use crate::{CMatrix, C64};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// ψ(n) for integer n ≥ 1 by the harmonic-number identity.
pub fn psi_int(n: usize) -> f64 {
    -EULER_GAMMA + (1..n).map(|k| 1.0 / k as f64).sum::<f64>()
}

pub fn log2_1p(x: f64) -> f64 {
    (1.0 + x).log2()
}

/// LoS whose column `k` is `√M·conj(u_{beams[k]})`, i.e. fully projected onto one beam.
pub fn aligned_los(m: usize, beams: &[usize]) -> CMatrix {
    let u = DftCodebook::new(m).unwrap();
    let scale = (m as f64).sqrt();
    CMatrix::from_fn(m, beams.len(), |a, k| u.matrix()[(beams[k], a)].conj() * scale)
}

/// Random Gaussian LoS with random positive gains and K-factors.
pub fn random_params(m: usize, nu: usize, seed: u64) -> RiceanParams {
    let mut rng = stream_rng(seed, 7);
    let los = complex_gaussian_matrix(&mut rng, m, nu);
    let betas = (0..nu).map(|_| rng.random_range(0.1..2.0)).collect();
    let kappas = (0..nu).map(|_| 10f64.powf(rng.random_range(-1.0..2.0))).collect();
    RiceanParams::new(betas, kappas, los).unwrap()
}

/// Random `rows×cols` complex Gaussian matrix.
pub fn random_matrix(rows: usize, cols: usize, seed: u64) -> CMatrix {
    complex_gaussian_matrix(&mut stream_rng(seed, 11), rows, cols)
}

/// Distinct sorted indices out of `0..m`.
pub fn random_selection(m: usize, ns: usize, seed: u64) -> Vec<usize> {
    let mut rng = stream_rng(seed, 13);
    let mut idx = rand::seq::index::sample(&mut rng, m, ns).into_vec();
    idx.sort_unstable();
    idx
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}
