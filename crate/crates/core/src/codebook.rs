//! DFT beam codebook and analog beamformers built from beam selections.

use std::collections::HashSet;
use std::f64::consts::PI;

use nalgebra::DVector;

use crate::{CMatrix, Error, Result, C64};

/// Unitary `M×M` DFT matrix; row `n` is the `n`-th analog beam.
#[derive(Debug, Clone, PartialEq)]
pub struct DftCodebook {
    entries: CMatrix,
}

impl DftCodebook {
    /// Builds `U` with `U[m, n] = exp(j·2π·m·n / M) / √M` (zero-based).
    pub fn new(order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::Dimension("codebook order must be at least 1".into()));
        }
        let scale = 1.0 / (order as f64).sqrt();
        // reduce m·n modulo M first so the phase argument stays in [0, 2π)
        let entries = CMatrix::from_fn(order, order, |m, n| {
            let phase = 2.0 * PI * ((m * n) % order) as f64 / order as f64;
            C64::from_polar(scale, phase)
        });
        Ok(DftCodebook { entries })
    }

    pub fn order(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.entries
    }

    /// Projection of `v` onto every beam: entry `n` is `Σ_m U[n, m]·v[m]`.
    pub fn beam_projections(&self, v: &DVector<C64>) -> Result<DVector<C64>> {
        if v.len() != self.order() {
            return Err(Error::Dimension(format!(
                "vector of length {} against codebook of order {}",
                v.len(),
                self.order()
            )));
        }
        Ok(&self.entries * v)
    }

    /// `|(U·v)[n]|²` for every beam `n`. Sums to `‖v‖²`.
    pub fn beam_projection_powers(&self, v: &DVector<C64>) -> Result<Vec<f64>> {
        Ok(self
            .beam_projections(v)?
            .iter()
            .map(|z| z.norm_sqr())
            .collect())
    }

    /// `F = Ψ·U`: the rows of `U` named by `sel`, in selection order.
    pub fn analog_beamformer(&self, sel: &BeamSelection) -> Result<AnalogBeamformer> {
        sel.check_order(self.order())?;
        let matrix = self.entries.select_rows(sel.indices());
        Ok(AnalogBeamformer {
            matrix,
            selection: sel.clone(),
        })
    }
}

/// Ordered, distinct beam indices; one per RF chain.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BeamSelection {
    indices: Vec<usize>,
}

impl BeamSelection {
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::Dimension("beam selection is empty".into()));
        }
        let mut seen = HashSet::with_capacity(indices.len());
        for &i in &indices {
            if !seen.insert(i) {
                return Err(Error::DuplicateIndex(i));
            }
        }
        Ok(BeamSelection { indices })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Indices in ascending order.
    pub fn sorted(&self) -> Vec<usize> {
        let mut v = self.indices.clone();
        v.sort_unstable();
        v
    }

    pub(crate) fn check_order(&self, order: usize) -> Result<()> {
        if self.indices.len() > order {
            return Err(Error::Dimension(format!(
                "{} beams requested from a codebook of order {order}",
                self.indices.len()
            )));
        }
        match self.indices.iter().find(|&&i| i >= order) {
            Some(&index) => Err(Error::IndexOutOfRange { index, order }),
            None => Ok(()),
        }
    }
}

/// `N_s×M` analog beamformer with orthonormal rows.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalogBeamformer {
    matrix: CMatrix,
    selection: BeamSelection,
}

impl AnalogBeamformer {
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn selection(&self) -> &BeamSelection {
        &self.selection
    }

    /// Number of RF chains `N_s`.
    pub fn chains(&self) -> usize {
        self.matrix.nrows()
    }

    /// Number of antennas `M`.
    pub fn antennas(&self) -> usize {
        self.matrix.ncols()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_dev_from_identity(m: &CMatrix) -> f64 {
        let n = m.nrows();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((m[(i, j)] - C64::new(target, 0.0)).norm());
            }
        }
        worst
    }

    #[test]
    fn order_zero_rejected() {
        assert!(matches!(DftCodebook::new(0), Err(Error::Dimension(_))));
    }

    #[test]
    fn order_one_is_unit() {
        let cb = DftCodebook::new(1).unwrap();
        assert_eq!(cb.matrix()[(0, 0)], C64::new(1.0, 0.0));
    }

    #[test]
    fn order_two_is_hadamard() {
        let cb = DftCodebook::new(2).unwrap();
        let h = 1.0 / 2f64.sqrt();
        let expect = [h, h, h, -h];
        for (k, z) in cb.matrix().transpose().iter().enumerate() {
            assert!((z.re - expect[k]).abs() < 1e-15 && z.im.abs() < 1e-15);
        }
    }

    #[test]
    fn order_four_entry() {
        let cb = DftCodebook::new(4).unwrap();
        let z = cb.matrix()[(1, 3)];
        // direct evaluation without index reduction
        let oracle = C64::from_polar(0.5, 2.0 * PI * 3.0 / 4.0);
        assert!((z - oracle).norm() < 1e-15);
        assert!((z - C64::new(0.0, -0.5)).norm() < 1e-15);
    }

    #[test]
    fn unitary_and_constant_modulus() {
        for m in [1, 2, 3, 8, 17, 64] {
            let cb = DftCodebook::new(m).unwrap();
            let u = cb.matrix();
            assert!(max_dev_from_identity(&(u * u.adjoint())) < 1e-12);
            assert!(max_dev_from_identity(&(u.adjoint() * u)) < 1e-12);
            let r = 1.0 / (m as f64).sqrt();
            assert!(u.iter().all(|z| (z.norm() - r).abs() < 1e-12));
        }
    }

    #[test]
    fn build_is_pure() {
        assert_eq!(DftCodebook::new(32).unwrap(), DftCodebook::new(32).unwrap());
    }

    #[test]
    fn beamformer_rows() {
        let cb = DftCodebook::new(2).unwrap();
        let f = cb.analog_beamformer(&BeamSelection::new(vec![0]).unwrap()).unwrap();
        let h = 1.0 / 2f64.sqrt();
        assert!((f.matrix()[(0, 0)].re - h).abs() < 1e-15);
        assert!((f.matrix()[(0, 1)].re - h).abs() < 1e-15);

        let cb = DftCodebook::new(4).unwrap();
        let f = cb.analog_beamformer(&BeamSelection::new(vec![0, 2]).unwrap()).unwrap();
        assert!(max_dev_from_identity(&(f.matrix() * f.matrix().adjoint())) < 1e-12);

        let cb = DftCodebook::new(8).unwrap();
        let f = cb.analog_beamformer(&BeamSelection::new(vec![1, 5, 6]).unwrap()).unwrap();
        for (r, &i) in [1usize, 5, 6].iter().enumerate() {
            for n in 0..8 {
                let oracle = C64::from_polar(1.0 / 8f64.sqrt(), 2.0 * PI * (i * n) as f64 / 8.0);
                assert!((f.matrix()[(r, n)] - oracle).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn selection_errors() {
        assert!(matches!(BeamSelection::new(vec![1, 2, 1]), Err(Error::DuplicateIndex(1))));
        assert!(BeamSelection::new(vec![]).is_err());
        let cb = DftCodebook::new(4).unwrap();
        let sel = BeamSelection::new(vec![0, 4]).unwrap();
        assert!(matches!(
            cb.analog_beamformer(&sel),
            Err(Error::IndexOutOfRange { index: 4, order: 4 })
        ));
        let sel = BeamSelection::new(vec![0, 1, 2, 3, 4]).unwrap();
        assert!(cb.analog_beamformer(&sel).is_err());
    }

    #[test]
    fn projection_powers() {
        let m = 8;
        let cb = DftCodebook::new(m).unwrap();
        // scaled conjugate of beam 3
        let v = DVector::from_iterator(m, cb.matrix().row(3).iter().map(|z| z.conj() * (m as f64).sqrt()));
        let p = cb.beam_projection_powers(&v).unwrap();
        assert!((p[3] - m as f64).abs() < 1e-10);
        assert!(p.iter().enumerate().all(|(n, &x)| n == 3 || x < 1e-20));

        let zeros = DVector::<C64>::zeros(m);
        assert!(cb.beam_projection_powers(&zeros).unwrap().iter().all(|&x| x == 0.0));

        let cb4 = DftCodebook::new(4).unwrap();
        let e0 = DVector::from_vec(vec![C64::new(1.0, 0.0), C64::default(), C64::default(), C64::default()]);
        for x in cb4.beam_projection_powers(&e0).unwrap() {
            assert!((x - 0.25).abs() < 1e-15);
        }
        assert!(cb4.beam_projection_powers(&DVector::zeros(3)).is_err());
    }
}
