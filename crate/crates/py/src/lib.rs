//! Python bindings: component codes, protographs, thresholds, code
//! construction and erasure simulation.

use std::collections::BTreeMap;

use gldpc_core::doping::{dope_partial, DopingSidecar, DopingSpec};
use gldpc_core::ensemble::{construct_regular, optimize_ensemble, DeConfig, RegularDesign};
use gldpc_core::protograph::parse_rate;
use gldpc_core::seeds::substream;
use gldpc_core::{component, sim};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: gldpc_core::Error) -> PyErr {
    match e {
        gldpc_core::Error::Numerical(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// Hamming component code of redundancy `m`.
#[pyclass(name = "ComponentCode", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyComponentCode(gldpc_core::ComponentCode);

#[pymethods]
impl PyComponentCode {
    #[staticmethod]
    #[pyo3(signature = (m, systematic = true))]
    fn hamming(m: usize, systematic: bool) -> PyResult<Self> {
        gldpc_core::ComponentCode::hamming(m, systematic).map(Self).map_err(err)
    }

    #[getter]
    fn mu(&self) -> usize {
        self.0.mu()
    }

    #[getter]
    fn kappa(&self) -> usize {
        self.0.kappa()
    }

    #[getter]
    fn d_min(&self) -> usize {
        self.0.d_min()
    }

    fn pcm(&self) -> Vec<Vec<u8>> {
        self.0.pcm_rows()
    }

    /// Extrinsic mutual information for a-priori information `i_a`.
    fn exit(&self, i_a: f64) -> PyResult<f64> {
        component::exit_closed_form(&self.0, i_a).map_err(err)
    }

    /// Same quantity by exhaustive enumeration.
    fn exit_oracle(&self, i_a: f64) -> PyResult<f64> {
        component::exit_oracle(&self.0, i_a).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("ComponentCode({}, {})", self.0.mu(), self.0.kappa())
    }
}

#[pyclass(name = "BaseMatrix", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyBaseMatrix(gldpc_core::BaseMatrix);

#[pymethods]
impl PyBaseMatrix {
    #[new]
    fn new(rows: Vec<Vec<u32>>) -> PyResult<Self> {
        gldpc_core::BaseMatrix::from_rows(rows).map(Self).map_err(err)
    }

    /// Progressive edge growth with degree counts `{degree: nodes}`.
    #[staticmethod]
    #[pyo3(signature = (n_c, counts, seed = 0))]
    fn peg(n_c: usize, counts: BTreeMap<usize, usize>, seed: u64) -> PyResult<Self> {
        let counts = gldpc_core::DegreeCountVector::new(counts).map_err(err)?;
        let cfg = gldpc_core::PegConfig::new(n_c, counts.total(), counts, seed);
        gldpc_core::peg_build(&cfg).map(Self).map_err(err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        serde_json::from_str(text).map(Self).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.0).expect("base matrix serializes")
    }

    fn rows(&self) -> Vec<Vec<u32>> {
        self.0.rows()
    }

    #[getter]
    fn n_c(&self) -> usize {
        self.0.n_c()
    }

    #[getter]
    fn n_v(&self) -> usize {
        self.0.n_v()
    }

    /// Returns `(ok, witness)`; the witness lists nodes of a cycle.
    fn typical_dmin_check(&self, doped: Vec<usize>) -> (bool, Option<Vec<usize>>) {
        let c = gldpc_core::typical_dmin_check(&self.0, &doped);
        (c.ok, c.witness)
    }

    /// PEXIT threshold. Pass `doped` and `code` for a partially doped code.
    #[pyo3(signature = (doped = None, code = None, tol = 1e-4))]
    fn threshold(
        &self,
        py: Python<'_>,
        doped: Option<Vec<usize>>,
        code: Option<PyRef<'_, PyComponentCode>>,
        tol: f64,
    ) -> PyResult<f64> {
        let pexit = match (doped, code) {
            (Some(d), Some(c)) => gldpc_core::PexitCode::pd(&self.0, &d, &c.0).map_err(err)?,
            (None, None) => gldpc_core::PexitCode::ldpc(&self.0),
            _ => return Err(PyValueError::new_err("pass both doped and code, or neither")),
        };
        py.detach(|| gldpc_core::threshold(&pexit, tol, &gldpc_core::PexitLimits::default()))
            .map(|t| t.epsilon_star)
            .map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("BaseMatrix({}x{})", self.0.n_c(), self.0.n_v())
    }
}

/// A lifted code with its generalized-check blocks.
#[pyclass(name = "Code", frozen)]
struct PyCode(gldpc_core::PdGldpcCode);

#[pymethods]
impl PyCode {
    /// Lifts `base` by `n` and attaches component checks to `doped` nodes.
    #[staticmethod]
    #[pyo3(signature = (base, n, doped, code, seed = 0))]
    fn partial(
        base: PyRef<'_, PyBaseMatrix>,
        n: usize,
        doped: Vec<usize>,
        code: PyRef<'_, PyComponentCode>,
        seed: u64,
    ) -> PyResult<Self> {
        let lifted = gldpc_core::lift(&base.0, n, code.0.mu(), substream(seed, "lift", 0)).map_err(err)?;
        dope_partial(&base.0, &lifted, &DopingSpec::new(doped, code.0.clone()))
            .map(Self)
            .map_err(err)
    }

    /// Reloads a code from alist text and sidecar JSON.
    #[staticmethod]
    fn from_alist(alist: &str, sidecar: &str) -> PyResult<Self> {
        let pcm = gldpc_core::SparsePcm::from_alist(alist).map_err(err)?;
        let side: DopingSidecar = serde_json::from_str(sidecar).map_err(|e| PyValueError::new_err(e.to_string()))?;
        gldpc_core::PdGldpcCode::from_parts(pcm, side).map(Self).map_err(err)
    }

    fn to_alist(&self) -> String {
        self.0.pcm().pcm().to_alist()
    }

    fn sidecar_json(&self) -> String {
        serde_json::to_string(&self.0.sidecar()).expect("sidecar serializes")
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.pcm().cols()
    }

    #[getter]
    fn rows(&self) -> usize {
        self.0.pcm().rows()
    }

    #[getter]
    fn rate(&self) -> f64 {
        let r = self.0.rate();
        *r.numer() as f64 / *r.denom() as f64
    }

    /// Decodes one erasure pattern; returns `(success, residual)`.
    #[pyo3(signature = (erasures, peeling_only = false))]
    fn decode(&self, erasures: Vec<usize>, peeling_only: bool) -> PyResult<(bool, Vec<usize>)> {
        let mode = if peeling_only { sim::DecoderMode::Peeling } else { sim::DecoderMode::Gldpc };
        sim::decode_block(&self.0, &erasures, mode).map(|o| (o.success, o.residual)).map_err(err)
    }

    /// True iff maximum-likelihood decoding recovers `erasures`.
    fn ml_decodable(&self, erasures: Vec<usize>) -> PyResult<bool> {
        sim::erasure_rank_oracle(&self.0, &erasures).map_err(err)
    }

    /// Block error rate at one erasure probability, as a dict.
    #[pyo3(signature = (epsilon, max_blocks = 10_000, target_errors = 100, seed = 0, workers = 1))]
    fn simulate<'py>(
        &self,
        py: Python<'py>,
        epsilon: f64,
        max_blocks: u64,
        target_errors: u64,
        seed: u64,
        workers: usize,
    ) -> PyResult<Bound<'py, PyDict>> {
        let mut cfg = sim::SimConfig::new(epsilon, substream(seed, "sim", epsilon.to_bits()));
        cfg.max_blocks = max_blocks;
        cfg.target_errors = target_errors;
        cfg.workers = workers;
        let r = py.detach(|| sim::run_bler(&self.0, &cfg)).map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("epsilon", r.epsilon)?;
        d.set_item("blocks", r.blocks_run)?;
        d.set_item("errors", r.block_errors)?;
        d.set_item("bler", r.bler)?;
        d.set_item("ci_low", r.ci_low)?;
        d.set_item("ci_high", r.ci_high)?;
        d.set_item("mean_iters", r.mean_iters)?;
        Ok(d)
    }

    fn __repr__(&self) -> String {
        format!("Code(n={}, rows={}, gc_blocks={})", self.n(), self.rows(), self.0.gc_blocks().len())
    }
}

/// Density-evolution threshold of an edge-perspective ensemble given as
/// `{degree: coefficient}` maps.
#[pyfunction]
#[pyo3(signature = (lambda_, rho, tol = 1e-5))]
fn de_threshold(py: Python<'_>, lambda_: BTreeMap<usize, f64>, rho: BTreeMap<usize, f64>, tol: f64) -> PyResult<f64> {
    let e = gldpc_core::EnsembleDistribution::normalized(lambda_, rho).map_err(err)?;
    py.detach(|| gldpc_core::de_threshold(&e, tol)).map_err(err)
}

/// Regular design: returns `(y_best, base, {y: threshold})`.
#[pyfunction]
#[pyo3(signature = (rate, n_v, m = 4, w_r = 2, seed = 0, y_range = None))]
fn design_regular(
    py: Python<'_>,
    rate: &str,
    n_v: usize,
    m: usize,
    w_r: usize,
    seed: u64,
    y_range: Option<(usize, usize)>,
) -> PyResult<(usize, PyBaseMatrix, BTreeMap<usize, f64>)> {
    let code = gldpc_core::ComponentCode::hamming(m, true).map_err(err)?;
    let mut d = RegularDesign::new(w_r, code, n_v, parse_rate(rate).map_err(err)?, seed);
    d.y_range = y_range;
    let out = py.detach(|| construct_regular(&d)).map_err(err)?;
    let thresholds = out.candidates.iter().map(|c| (c.y, c.threshold.epsilon_star)).collect();
    Ok((out.y_best, PyBaseMatrix(out.best().base.clone()), thresholds))
}

type Coefficients = BTreeMap<usize, f64>;

/// Differential-evolution ensemble search: returns `(lambda, rho, threshold)`.
#[pyfunction]
#[pyo3(signature = (y_max, l = 20, r = 9, n_v = 400, rate = "1/2", m = 4, seed = 0, generations = 300, population = 50))]
#[allow(clippy::too_many_arguments)]
fn optimize(
    py: Python<'_>,
    y_max: usize,
    l: usize,
    r: usize,
    n_v: usize,
    rate: &str,
    m: usize,
    seed: u64,
    generations: usize,
    population: usize,
) -> PyResult<(Coefficients, Coefficients, f64)> {
    let code = gldpc_core::ComponentCode::hamming(m, true).map_err(err)?;
    let mut cfg = DeConfig::new(y_max, l, r, n_v, parse_rate(rate).map_err(err)?, code, seed);
    cfg.generations = generations;
    cfg.population = population;
    let out = py.detach(|| optimize_ensemble(&cfg)).map_err(err)?;
    Ok((out.ensemble.lambda, out.ensemble.rho, out.threshold))
}

#[pymodule]
fn gldpc(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyComponentCode>()?;
    m.add_class::<PyBaseMatrix>()?;
    m.add_class::<PyCode>()?;
    m.add_function(wrap_pyfunction!(de_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(design_regular, m)?)?;
    m.add_function(wrap_pyfunction!(optimize, m)?)?;
    Ok(())
}
