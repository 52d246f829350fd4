//! Python module `asbm`.

use asbm_core::diagnostics::{self, DiagnoseOptions};
use asbm_core::distributions::RngStream;
use asbm_core::generators::{self, LfrSpec};
use asbm_core::netcore::read_edge_list;
use asbm_core::samplers::{self, InitLabels, NewBlockDraw, SamplerConfig, Variant};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: asbm_core::Error) -> PyErr {
    match e {
        asbm_core::Error::InvariantViolation(m) => PyRuntimeError::new_err(m),
        other => PyValueError::new_err(other.to_string()),
    }
}

/// Simple undirected graph on nodes `0..n`.
#[pyclass(frozen, module = "asbm")]
pub struct Graph {
    inner: asbm_core::Graph,
}

#[pymethods]
impl Graph {
    #[new]
    fn new(n: usize, edges: Vec<(usize, usize)>) -> PyResult<Self> {
        Ok(Graph { inner: asbm_core::Graph::from_edges(n, &edges).map_err(err)? })
    }

    #[staticmethod]
    fn read(path: std::path::PathBuf) -> PyResult<Self> {
        Ok(Graph { inner: read_edge_list(path).map_err(err)? })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn n_edges(&self) -> usize {
        self.inner.n_edges()
    }

    fn edges(&self) -> Vec<(usize, usize)> {
        self.inner.edges().collect()
    }

    fn degrees(&self) -> Vec<usize> {
        self.inner.degrees()
    }

    fn has_edge(&self, i: usize, j: usize) -> bool {
        self.inner.has_edge(i, j)
    }

    fn __repr__(&self) -> String {
        format!("Graph(n={}, n_edges={})", self.inner.n(), self.inner.n_edges())
    }
}

/// Kept iterations of one chain.
#[pyclass(frozen, from_py_object, module = "asbm")]
#[derive(Clone)]
pub struct ChainTrace {
    inner: samplers::ChainTrace,
}

#[pymethods]
impl ChainTrace {
    fn __len__(&self) -> usize {
        self.inner.len()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n
    }

    #[getter]
    fn variant(&self) -> &'static str {
        self.inner.config.variant.name()
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.config.seed
    }

    fn iterations(&self) -> Vec<usize> {
        self.inner.records.iter().map(|r| r.iteration).collect()
    }

    fn labels(&self) -> Vec<Vec<usize>> {
        self.inner.labels()
    }

    fn ks(&self) -> Vec<usize> {
        self.inner.ks()
    }

    fn deviances(&self) -> Vec<f64> {
        self.inner.deviances()
    }

    fn epsilons(&self) -> Vec<Option<f64>> {
        self.inner.records.iter().map(|r| r.epsilon).collect()
    }

    fn connectivity(&self) -> Vec<Vec<Vec<f64>>> {
        self.inner.records.iter().map(|r| r.p.clone()).collect()
    }

    fn write(&self, dir: std::path::PathBuf) -> PyResult<()> {
        self.inner.write_dir(&dir).map_err(err)
    }

    #[staticmethod]
    fn read(dir: std::path::PathBuf) -> PyResult<Self> {
        Ok(ChainTrace { inner: samplers::ChainTrace::read_dir(&dir).map_err(err)? })
    }

    fn __repr__(&self) -> String {
        format!("ChainTrace(variant={:?}, n={}, samples={})", self.variant(), self.inner.n, self.inner.len())
    }
}

/// Runs one chain. `iterations` counts all sweeps including burn-in.
#[pyfunction]
#[pyo3(signature = (
    graph, variant = "asbm", *, k = None, gamma = 1.0, alpha = 1.0, beta = 1.0, lam = 0.45, m = 3,
    iterations = 4000, burn_in = 1000, thinning = 5, seed = 0, init = None, init_k = None,
    epsilon_init = 0.5, new_block = "conditional"
))]
#[allow(clippy::too_many_arguments)]
fn fit(
    py: Python<'_>,
    graph: &Graph,
    variant: &str,
    k: Option<usize>,
    gamma: f64,
    alpha: f64,
    beta: f64,
    lam: f64,
    m: usize,
    iterations: usize,
    burn_in: usize,
    thinning: usize,
    seed: u64,
    init: Option<Vec<usize>>,
    init_k: Option<usize>,
    epsilon_init: f64,
    new_block: &str,
) -> PyResult<ChainTrace> {
    let variant: Variant = variant.parse().map_err(err)?;
    let cfg = SamplerConfig {
        variant,
        k,
        gamma,
        alpha,
        beta,
        lambda: lam,
        m,
        iterations,
        burn_in,
        thinning,
        seed,
        init: match init {
            Some(z) => InitLabels::Given(z),
            None => InitLabels::Random(init_k),
        },
        epsilon_init,
        new_block_draw: match new_block {
            "conditional" => NewBlockDraw::Conditional,
            "prior" => NewBlockDraw::Prior,
            other => return Err(PyValueError::new_err(format!("new_block must be conditional or prior, got {other:?}"))),
        },
        ..Default::default()
    };
    let g = &graph.inner;
    let trace = py.detach(|| samplers::run_chain(g, &cfg)).map_err(err)?;
    Ok(ChainTrace { inner: trace })
}

/// Seed of chain `c` under master seed `seed`, as used by the command line.
#[pyfunction]
fn chain_seed(seed: u64, c: u64) -> u64 {
    RngStream::new(seed).split(c).seed()
}

/// Pools chains and returns a dict with the report, the posterior
/// similarity matrix, the point-estimate partition and the aligned
/// connectivity estimate.
#[pyfunction]
#[pyo3(signature = (traces, truth = None, threshold = diagnostics::RHAT_THRESHOLD, restarts = 16, seed = 0))]
fn diagnose<'py>(
    py: Python<'py>,
    traces: Vec<ChainTrace>,
    truth: Option<Vec<usize>>,
    threshold: f64,
    restarts: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let traces: Vec<samplers::ChainTrace> = traces.into_iter().map(|t| t.inner).collect();
    let opts = DiagnoseOptions { rhat_threshold: threshold, restarts, seed };
    let d = py.detach(|| diagnostics::diagnose(&traces, truth.as_deref(), opts)).map_err(err)?;
    let out = PyDict::new(py);
    let r = &d.report;
    out.set_item("rhat_deviance", r.rhat_deviance)?;
    out.set_item("ess_per_sample", r.ess_per_sample.clone())?;
    out.set_item("k_hat", r.k_hat)?;
    out.set_item("ari", r.ari)?;
    out.set_item("relative_k_error", r.relative_k_error)?;
    out.set_item("converged", r.converged)?;
    out.set_item("mean_k", r.mean_k)?;
    out.set_item("n_samples", r.n_samples)?;
    out.set_item("loss", r.loss)?;
    out.set_item("psm", d.psm.rows().map(|row| row.to_vec()).collect::<Vec<_>>())?;
    out.set_item("partition", d.point.partition)?;
    out.set_item("p_hat", d.p_hat.map(|p| p.p_hat))?;
    Ok(out)
}

#[pyfunction]
#[pyo3(signature = (sizes, p, seed = 0))]
fn generate_sbm(sizes: Vec<usize>, p: Vec<Vec<f64>>, seed: u64) -> PyResult<(Graph, Vec<usize>)> {
    let (g, z) = generators::generate_sbm_sizes(&mut RngStream::new(seed), &sizes, &p).map_err(err)?;
    Ok((Graph { inner: g }, z))
}

/// The 100-node core-periphery network.
#[pyfunction]
#[pyo3(signature = (seed = 0))]
fn generate_star(seed: u64) -> PyResult<(Graph, Vec<usize>)> {
    let (g, z) = generators::generate_star_example(&mut RngStream::new(seed)).map_err(err)?;
    Ok((Graph { inner: g }, z))
}

#[pyfunction]
#[pyo3(signature = (*, n = 200, t1 = 2.0, t2 = 2.0, n_min = 5, n_max = 50, d_avg = 20.0, d_max = 49, mu = 0.2, seed = 0))]
#[allow(clippy::too_many_arguments)]
fn generate_lfr(
    n: usize,
    t1: f64,
    t2: f64,
    n_min: usize,
    n_max: usize,
    d_avg: f64,
    d_max: usize,
    mu: f64,
    seed: u64,
) -> PyResult<(Graph, Vec<usize>)> {
    let spec = LfrSpec { n, t1, t2, n_min, n_max, d_avg, d_max, mu };
    let (g, z) = generators::generate_lfr(&mut RngStream::new(seed), &spec).map_err(err)?;
    Ok((Graph { inner: g }, z))
}

/// Realized network statistics as a dict.
#[pyfunction]
fn network_stats<'py>(py: Python<'py>, graph: &Graph, labels: Vec<usize>) -> PyResult<Bound<'py, PyDict>> {
    let s = generators::RealizedStats::compute(&graph.inner, &labels).map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("n", s.n)?;
    out.set_item("n_edges", s.n_edges)?;
    out.set_item("mean_degree", s.mean_degree)?;
    out.set_item("max_degree", s.max_degree)?;
    out.set_item("mixing", s.mixing)?;
    out.set_item("community_sizes", s.community_sizes)?;
    Ok(out)
}

#[pyfunction]
fn complete_log_likelihood(graph: &Graph, z: Vec<usize>, p: Vec<Vec<f64>>, pi: Vec<f64>) -> PyResult<f64> {
    samplers::complete_log_likelihood(&graph.inner, &z, &p, &pi).map_err(err)
}

/// Same as `complete_log_likelihood` with the expected adjacency of the
/// block model `(z, p)` in place of an observed graph.
#[pyfunction]
fn expected_log_likelihood(z_model: Vec<usize>, p_model: Vec<Vec<f64>>, z: Vec<usize>, p: Vec<Vec<f64>>, pi: Vec<f64>) -> PyResult<f64> {
    let a = asbm_core::SoftGraph::expected_adjacency(&z_model, &p_model).map_err(err)?;
    samplers::complete_log_likelihood(&a, &z, &p, &pi).map_err(err)
}

#[pyfunction]
fn deviance(graph: &Graph, z: Vec<usize>, p: Vec<Vec<f64>>) -> PyResult<f64> {
    diagnostics::deviance(&graph.inner, &z, &p).map_err(err)
}

#[pyfunction]
fn split_rhat(chains: Vec<Vec<f64>>) -> PyResult<f64> {
    let refs: Vec<&[f64]> = chains.iter().map(Vec::as_slice).collect();
    diagnostics::split_rhat(&refs).map_err(err)
}

#[pyfunction]
fn effective_sample_size(x: Vec<f64>) -> PyResult<f64> {
    diagnostics::effective_sample_size(&x).map_err(err)
}

#[pyfunction]
fn adjusted_rand_index(a: Vec<usize>, b: Vec<usize>) -> PyResult<f64> {
    diagnostics::adjusted_rand_index(&a, &b).map_err(err)
}

#[pyfunction]
fn signal_to_noise(n: usize, p: f64, q: f64) -> f64 {
    diagnostics::signal_to_noise(n, p, q)
}

#[pymodule]
fn asbm(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Graph>()?;
    m.add_class::<ChainTrace>()?;
    m.add_function(wrap_pyfunction!(fit, m)?)?;
    m.add_function(wrap_pyfunction!(chain_seed, m)?)?;
    m.add_function(wrap_pyfunction!(diagnose, m)?)?;
    m.add_function(wrap_pyfunction!(generate_sbm, m)?)?;
    m.add_function(wrap_pyfunction!(generate_star, m)?)?;
    m.add_function(wrap_pyfunction!(generate_lfr, m)?)?;
    m.add_function(wrap_pyfunction!(network_stats, m)?)?;
    m.add_function(wrap_pyfunction!(complete_log_likelihood, m)?)?;
    m.add_function(wrap_pyfunction!(expected_log_likelihood, m)?)?;
    m.add_function(wrap_pyfunction!(deviance, m)?)?;
    m.add_function(wrap_pyfunction!(split_rhat, m)?)?;
    m.add_function(wrap_pyfunction!(effective_sample_size, m)?)?;
    m.add_function(wrap_pyfunction!(adjusted_rand_index, m)?)?;
    m.add_function(wrap_pyfunction!(signal_to_noise, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
