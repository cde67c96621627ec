//! Python bindings: a `Simulation` class wrapping the stepping session, the
//! closed-form fields, and the preset/convergence entry points.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use lisawave::config::{self, RunConfig};
use lisawave::runner::{self, Session};
use lisawave::{sources, Error};

fn err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// One configured run, stepped explicitly from Python.
#[pyclass]
struct Simulation {
    session: Session,
}

fn build(cfg: &RunConfig) -> PyResult<Simulation> {
    Ok(Simulation { session: Session::new(cfg).map_err(err)? })
}

#[pymethods]
impl Simulation {
    /// Builds a simulation from one of the named presets.
    #[staticmethod]
    fn preset(name: &str) -> PyResult<Simulation> {
        let text = config::preset(name).ok_or_else(|| {
            PyValueError::new_err(format!(
                "unknown preset {name:?}; choose one of {}",
                config::PRESET_NAMES.join(", ")
            ))
        })?;
        build(&config::parse_config(text).map_err(err)?)
    }

    /// Builds a simulation from a TOML config document.
    #[staticmethod]
    fn from_toml(text: &str) -> PyResult<Simulation> {
        build(&config::parse_config(text).map_err(err)?)
    }

    /// Advances `n` time levels.
    #[pyo3(signature = (n = 1))]
    fn step(&mut self, n: u64) -> PyResult<()> {
        for _ in 0..n {
            self.session.step().map_err(err)?;
        }
        Ok(())
    }

    /// Runs to the configured final time.
    fn run(&mut self) -> PyResult<()> {
        self.session.run().map_err(err)
    }

    fn time(&self) -> f64 {
        self.session.state.time()
    }

    fn tau(&self) -> f64 {
        self.session.state.tau
    }

    fn h(&self) -> f64 {
        self.session.interior.h
    }

    fn step_index(&self) -> u64 {
        self.session.state.step_index
    }

    fn total_steps(&self) -> u64 {
        self.session.total_steps
    }

    /// Node rows and columns of the configured domain: (n_y + 1, n_x + 1).
    fn shape(&self) -> (usize, usize) {
        (self.session.interior.n_y + 1, self.session.interior.n_x + 1)
    }

    /// Displacement over the configured domain in row-major order, layer
    /// padding stripped.
    fn field(&self) -> Vec<f64> {
        self.session.interior_field()
    }

    fn interior_max(&self) -> f64 {
        self.session.interior_max()
    }

    /// Relative (L2, Linf) errors against the oscillatory exact solution,
    /// or None when the run has no exact comparison.
    fn errors_vs_exact(&self) -> Option<(f64, f64)> {
        self.session.exact_errors()
    }

    fn cfl_ratio(&self) -> f64 {
        self.session.cfl.ratio
    }

    fn cfl_pass(&self) -> bool {
        self.session.cfl.pass()
    }

    fn __repr__(&self) -> String {
        format!(
            "Simulation({} x {} cells, h = {}, t = {}, step {} of {})",
            self.session.interior.n_x,
            self.session.interior.n_y,
            self.session.interior.h,
            self.session.state.time(),
            self.session.state.step_index,
            self.session.total_steps
        )
    }
}

/// The oscillatory exact solution driving the error studies.
#[pyfunction]
fn manufactured_solution(x: f64, y: f64, t: f64) -> f64 {
    sources::manufactured_solution(x, y, t)
}

/// Its forcing term under the cosine-modulated speed field.
#[pyfunction]
fn manufactured_source(x: f64, y: f64, t: f64) -> f64 {
    sources::manufactured_source(x, y, t)
}

/// The spatially varying squared wave speed.
#[pyfunction]
fn cosine_speed_squared(x: f64, y: f64) -> f64 {
    sources::cosine_speed_squared(x, y)
}

/// The windowed pulse used by the outgoing-wave experiments.
#[pyfunction]
fn gaussian_pulse(x: f64, y: f64, t: f64) -> f64 {
    sources::gaussian_pulse(x, y, t)
}

#[pyfunction]
fn preset_names() -> Vec<String> {
    config::PRESET_NAMES.iter().map(|s| s.to_string()).collect()
}

/// The TOML text of a named preset.
#[pyfunction]
fn preset_toml(name: &str) -> PyResult<String> {
    config::preset(name)
        .map(str::to_string)
        .ok_or_else(|| PyValueError::new_err(format!("unknown preset {name:?}")))
}

/// Largest stable time step for spacing `h` and wave speed `c`.
#[pyfunction]
fn max_stable_tau(h: f64, c: f64) -> f64 {
    lisawave::kernel::check_cfl(0.0, h, c).max_tau
}

/// Reads a field container; returns (field, n_x, n_y, h, t, data).
#[pyfunction]
fn load_snapshot(path: &str) -> PyResult<(String, usize, usize, f64, f64, Vec<f64>)> {
    let s = lisawave::snapshot::read_snapshot(std::path::Path::new(path)).map_err(err)?;
    Ok((s.field, s.n_x, s.n_y, s.h, s.t, s.data))
}

/// Runs a refinement study for a TOML config; returns rows of
/// (n, l2, l2_order, linf, linf_order) with None orders on the first row.
#[pyfunction]
#[pyo3(signature = (toml_text, resolutions, reference = None))]
fn convergence_table(
    toml_text: &str,
    resolutions: Vec<usize>,
    reference: Option<usize>,
) -> PyResult<Vec<(usize, f64, Option<f64>, f64, Option<f64>)>> {
    let cfg = config::parse_config(toml_text).map_err(err)?;
    let report = runner::convergence_study(&cfg, &resolutions, reference).map_err(err)?;
    Ok(report
        .rows
        .iter()
        .map(|r| (r.n, r.l2, r.l2_order, r.linf, r.linf_order))
        .collect())
}

#[pymodule]
fn lisawave_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Simulation>()?;
    m.add_function(wrap_pyfunction!(manufactured_solution, m)?)?;
    m.add_function(wrap_pyfunction!(manufactured_source, m)?)?;
    m.add_function(wrap_pyfunction!(cosine_speed_squared, m)?)?;
    m.add_function(wrap_pyfunction!(gaussian_pulse, m)?)?;
    m.add_function(wrap_pyfunction!(preset_names, m)?)?;
    m.add_function(wrap_pyfunction!(preset_toml, m)?)?;
    m.add_function(wrap_pyfunction!(max_stable_tau, m)?)?;
    m.add_function(wrap_pyfunction!(load_snapshot, m)?)?;
    m.add_function(wrap_pyfunction!(convergence_table, m)?)?;
    Ok(())
}
