//! Python bindings: channels, rates, beam selection and experiment runs.
//!
//! Invalid arguments raise `ValueError`; numerical failures raise `RuntimeError`.

use num_bigint::BigUint;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use dftbeam_core::approx;
use dftbeam_core::channel::{gen_los, sample_channel, LosModel, RiceanParams};
use dftbeam_core::codebook::{BeamSelection, DftCodebook};
use dftbeam_core::experiment::{self, ExperimentConfig, ResultRow, SelectionSpec, SweepAxis};
use dftbeam_core::linkrates::{self, LinkPowers, McConfig};
use dftbeam_core::selection::{self, SelectionContext, SelectionScheme};
use dftbeam_core::{CMatrix, Complex, Error, Scheme};

type C64 = Complex<f64>;

fn err(e: Error) -> PyErr {
    if e.is_validation() {
        PyValueError::new_err(e.to_string())
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

fn scheme(name: &str) -> PyResult<Scheme> {
    name.parse().map_err(err)
}

fn method(name: &str) -> PyResult<SelectionScheme> {
    match name.parse::<SelectionSpec>().map_err(err)?.scheme() {
        Some(s) => Ok(s),
        None => Err(PyValueError::new_err("fixed selections are passed as index lists")),
    }
}

fn rows_of(m: &CMatrix) -> Vec<Vec<C64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn matrix_of(rows: &[Vec<C64>]) -> PyResult<CMatrix> {
    let ncols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(PyValueError::new_err("ragged matrix"));
    }
    Ok(CMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]))
}

fn linear(k_db: &[f64]) -> Vec<f64> {
    k_db.iter().map(|k| 10f64.powf(k / 10.0)).collect()
}

/// Ricean multiuser channel statistics: LoS matrix, gains and K-factors.
#[pyclass(frozen, name = "Channel", module = "dftbeam")]
struct PyChannel {
    inner: RiceanParams,
}

#[pymethods]
impl PyChannel {
    /// `los` is M rows of N_u complex entries; `k_db` has one value per user.
    #[new]
    fn new(los: Vec<Vec<C64>>, betas: Vec<f64>, k_db: Vec<f64>) -> PyResult<Self> {
        let inner = RiceanParams::new(betas, linear(&k_db), matrix_of(&los)?).map_err(err)?;
        Ok(PyChannel { inner })
    }

    /// I.i.d. CN(0,1) LoS drawn from `seed`, common K-factor, unit gains unless given.
    #[staticmethod]
    #[pyo3(signature = (m, nu, k_db, seed = 0, betas = None))]
    fn gaussian(m: usize, nu: usize, k_db: f64, seed: u64, betas: Option<Vec<f64>>) -> PyResult<Self> {
        let los = gen_los(&LosModel::GaussianIid, m, nu, seed).map_err(err)?;
        let betas = betas.unwrap_or_else(|| vec![1.0; nu]);
        let inner = RiceanParams::new(betas, linear(&vec![k_db; nu]), los).map_err(err)?;
        Ok(PyChannel { inner })
    }

    /// Half-wavelength ULA steering LoS, one angle (radians) per user.
    #[staticmethod]
    #[pyo3(signature = (m, angles, k_db, betas = None))]
    fn ula(m: usize, angles: Vec<f64>, k_db: f64, betas: Option<Vec<f64>>) -> PyResult<Self> {
        let nu = angles.len();
        let los = gen_los(&LosModel::UlaSteering { angles }, m, nu, 0).map_err(err)?;
        let betas = betas.unwrap_or_else(|| vec![1.0; nu]);
        let inner = RiceanParams::new(betas, linear(&vec![k_db; nu]), los).map_err(err)?;
        Ok(PyChannel { inner })
    }

    #[getter]
    fn antennas(&self) -> usize {
        self.inner.antennas()
    }

    #[getter]
    fn users(&self) -> usize {
        self.inner.users()
    }

    #[getter]
    fn betas(&self) -> Vec<f64> {
        self.inner.betas().to_vec()
    }

    /// Linear K-factors.
    #[getter]
    fn kappas(&self) -> Vec<f64> {
        self.inner.kappas().to_vec()
    }

    #[getter]
    fn los(&self) -> Vec<Vec<C64>> {
        rows_of(self.inner.los())
    }

    /// One channel realization `G` (M×N_u) for `(seed, drop)`.
    fn sample(&self, seed: u64, drop: u64) -> Vec<Vec<C64>> {
        rows_of(&sample_channel(&self.inner, seed, drop).g)
    }

    fn __repr__(&self) -> String {
        format!("Channel(antennas={}, users={})", self.inner.antennas(), self.inner.users())
    }
}

#[pyclass(frozen, get_all, name = "RateReport", module = "dftbeam")]
struct PyRateReport {
    scheme: String,
    per_user: Vec<f64>,
    sum: f64,
    stderr: Vec<f64>,
    sum_stderr: f64,
    drops: usize,
    discarded: usize,
}

#[pymethods]
impl PyRateReport {
    fn __repr__(&self) -> String {
        format!("RateReport(scheme={:?}, sum={:.6}, per_user={:?})", self.scheme, self.sum, self.per_user)
    }
}

impl From<linkrates::RateReport> for PyRateReport {
    fn from(r: linkrates::RateReport) -> Self {
        PyRateReport {
            scheme: r.scheme,
            per_user: r.per_user,
            sum: r.sum,
            stderr: r.stderr,
            sum_stderr: r.sum_stderr,
            drops: r.drops,
            discarded: r.discarded,
        }
    }
}

#[pyclass(frozen, get_all, name = "SelectionResult", module = "dftbeam")]
struct PySelectionResult {
    selection: Vec<usize>,
    comparisons: u64,
    theoretical_comparisons: BigUint,
    objective: f64,
    method: String,
    margin: Option<usize>,
}

#[pymethods]
impl PySelectionResult {
    fn __repr__(&self) -> String {
        format!(
            "SelectionResult(method={:?}, selection={:?}, objective={:.6}, comparisons={})",
            self.method, self.selection, self.objective, self.comparisons
        )
    }
}

fn beamformer(channel: &PyChannel, beams: Vec<usize>) -> PyResult<dftbeam_core::codebook::AnalogBeamformer> {
    let cb = DftCodebook::new(channel.inner.antennas()).map_err(err)?;
    cb.analog_beamformer(&BeamSelection::new(beams).map_err(err)?).map_err(err)
}

/// Rows of the unitary DFT codebook of order `m`.
#[pyfunction]
fn dft_codebook(m: usize) -> PyResult<Vec<Vec<C64>>> {
    Ok(rows_of(DftCodebook::new(m).map_err(err)?.matrix()))
}

#[pyfunction]
fn digamma(x: f64) -> PyResult<f64> {
    approx::digamma(x).map_err(err)
}

/// Closed-form rate of `scheme` for the beams in `selection`.
#[pyfunction]
fn approx_rate(scheme_name: &str, channel: &PyChannel, selection: Vec<usize>, snr_db: f64) -> PyResult<PyRateReport> {
    let f = beamformer(channel, selection)?;
    let pw = LinkPowers::from_snr_db(snr_db).map_err(err)?;
    Ok(approx::approx_rate(scheme(scheme_name)?, &channel.inner, &f, pw).map_err(err)?.into())
}

/// Monte-Carlo rate of `scheme` over `drops` seeded drops.
#[pyfunction]
#[pyo3(signature = (scheme_name, channel, selection, snr_db, drops = 1000, seed = 0))]
fn exact_rate(
    py: Python<'_>,
    scheme_name: &str,
    channel: &PyChannel,
    selection: Vec<usize>,
    snr_db: f64,
    drops: usize,
    seed: u64,
) -> PyResult<PyRateReport> {
    let s = scheme(scheme_name)?;
    let f = beamformer(channel, selection)?;
    let pw = LinkPowers::from_snr_db(snr_db).map_err(err)?;
    let mc = McConfig::new(drops, seed).map_err(err)?;
    let report = py.detach(|| linkrates::exact_rate(s, &channel.inner, &f, pw, mc));
    Ok(report.map_err(err)?.into())
}

/// Uplink Rayleigh closed form (`UL-ZF` or `UL-MRC`).
#[pyfunction]
fn rayleigh_rate(scheme_name: &str, betas: Vec<f64>, ns: usize, snr_db: f64) -> PyResult<PyRateReport> {
    let pw = LinkPowers::from_snr_db(snr_db).map_err(err)?;
    let nu = betas.len();
    Ok(approx::rayleigh_rate(scheme(scheme_name)?, &betas, ns, nu, pw).map_err(err)?.into())
}

/// Pure-LoS limit given the projected LoS powers `‖F·h̄_k‖²`.
#[pyfunction]
fn los_limit_rate(scheme_name: &str, betas: Vec<f64>, projections: Vec<f64>, ns: usize, snr_db: f64) -> PyResult<PyRateReport> {
    let pw = LinkPowers::from_snr_db(snr_db).map_err(err)?;
    let nu = betas.len();
    Ok(approx::los_limit_rate(scheme(scheme_name)?, &betas, &projections, ns, nu, pw).map_err(err)?.into())
}

/// Picks `ns` beams with `method` (`exhaustive`, `per_user`, `two_step`) for `objective`.
#[pyfunction]
#[allow(clippy::too_many_arguments)]
#[pyo3(signature = (method_name, channel, objective, ns, snr_db = 10.0, margin = 1, budget = selection::DEFAULT_BUDGET))]
fn select_beams(
    py: Python<'_>,
    method_name: &str,
    channel: &PyChannel,
    objective: &str,
    ns: usize,
    snr_db: f64,
    margin: usize,
    budget: u64,
) -> PyResult<PySelectionResult> {
    let m = method(method_name)?;
    let ctx = SelectionContext::new(
        channel.inner.clone(),
        DftCodebook::new(channel.inner.antennas()).map_err(err)?,
        scheme(objective)?,
        LinkPowers::from_snr_db(snr_db).map_err(err)?,
        ns,
        margin,
    )
    .map_err(err)?
    .with_budget(budget);
    let r = py.detach(|| selection::select(m, &ctx)).map_err(err)?;
    Ok(PySelectionResult {
        selection: r.selection.indices().to_vec(),
        comparisons: r.comparisons,
        theoretical_comparisons: r.theoretical_comparisons,
        objective: r.objective,
        method: r.scheme.label().to_string(),
        margin: r.margin,
    })
}

/// Table-formula comparison count of a selection method.
#[pyfunction]
#[pyo3(signature = (method_name, m, ns, nu, n = 1))]
fn comparison_count(method_name: &str, m: usize, ns: usize, nu: usize, n: usize) -> PyResult<BigUint> {
    if nu == 0 || ns < nu || m < ns {
        return Err(PyValueError::new_err(format!("need 1 <= nu <= ns <= m, got m={m}, ns={ns}, nu={nu}")));
    }
    Ok(selection::comparison_count(method(method_name)?, m, ns, nu, n))
}

fn row_dict<'py>(py: Python<'py>, r: &ResultRow) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("snr_db", r.snr_db)?;
    d.set_item("k_db", r.k_db)?;
    d.set_item("scheme", &r.scheme)?;
    d.set_item("selection", r.selection.clone())?;
    d.set_item("user", r.user)?;
    d.set_item("rate_exact", r.rate_exact)?;
    d.set_item("rate_approx", r.rate_approx)?;
    d.set_item("mc_stderr", r.mc_stderr)?;
    d.set_item("comparisons", r.comparisons)?;
    d.set_item("discarded_drops", r.discarded_drops)?;
    Ok(d)
}

fn run_rows(py: Python<'_>, config: &str, sweep: Option<(&str, Vec<f64>)>) -> PyResult<Vec<ResultRow>> {
    let cfg = ExperimentConfig::from_json_str(config).map_err(err)?;
    let axis = match &sweep {
        Some((axis, _)) => Some(axis.parse::<SweepAxis>().map_err(err)?),
        None => None,
    };
    py.detach(|| match (axis, sweep) {
        (Some(axis), Some((_, values))) => experiment::sweep(&cfg, axis, &values),
        _ => experiment::run_experiment(&cfg),
    })
    .map_err(err)
}

/// Runs a JSON experiment config; one dict per output row.
#[pyfunction]
fn run_experiment<'py>(py: Python<'py>, config: &str) -> PyResult<Vec<Bound<'py, PyDict>>> {
    run_rows(py, config, None)?.iter().map(|r| row_dict(py, r)).collect()
}

/// Runs the config once per value of `axis` (`snr`, `k_db`, `margin_n`).
#[pyfunction]
fn sweep<'py>(py: Python<'py>, config: &str, axis: &str, values: Vec<f64>) -> PyResult<Vec<Bound<'py, PyDict>>> {
    run_rows(py, config, Some((axis, values)))?.iter().map(|r| row_dict(py, r)).collect()
}

/// The CSV the `dftbeam run` command would write for `config`.
#[pyfunction]
fn experiment_csv(py: Python<'_>, config: &str) -> PyResult<String> {
    Ok(experiment::to_csv_string(&run_rows(py, config, None)?))
}

#[pymodule]
fn dftbeam(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyChannel>()?;
    m.add_class::<PyRateReport>()?;
    m.add_class::<PySelectionResult>()?;
    m.add_function(wrap_pyfunction!(dft_codebook, m)?)?;
    m.add_function(wrap_pyfunction!(digamma, m)?)?;
    m.add_function(wrap_pyfunction!(approx_rate, m)?)?;
    m.add_function(wrap_pyfunction!(exact_rate, m)?)?;
    m.add_function(wrap_pyfunction!(rayleigh_rate, m)?)?;
    m.add_function(wrap_pyfunction!(los_limit_rate, m)?)?;
    m.add_function(wrap_pyfunction!(select_beams, m)?)?;
    m.add_function(wrap_pyfunction!(comparison_count, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(experiment_csv, m)?)?;
    Ok(())
}
