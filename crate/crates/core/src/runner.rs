//! Time-loop orchestration: builds a stepping session from a validated
//! config, runs experiments with snapshot/log artifacts, and drives
//! refinement studies.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::analysis::{relative_error, restrict_to_coarse, ErrorReport, Norm};
use crate::config::{Boundary, DirichletValue, Material, RunConfig, Source, TauRule};
use crate::grid::{Grid, MaterialField, NodeCoefficients};
use crate::kernel::{self, CflReport, SourceTerm, WaveState};
use crate::pml::{self, PmlAuxState, PmlRegion};
use crate::snapshot::{read_snapshot, write_snapshot, Snapshot};
use crate::sources::{self, SeparableSource};
use crate::{Error, Result};

/// Builds the cell materials of the configured domain.
pub fn build_materials(config: &RunConfig, grid: &Grid) -> Result<MaterialField> {
    match &config.material {
        Material::Constant { rho, mu } => MaterialField::uniform(grid, *rho, *mu),
        Material::CosineModulated => {
            MaterialField::sample(grid, |_, _| 1.0, sources::cosine_speed_squared)
        }
        Material::VerticalInterface { interface_x, left, right } => {
            MaterialField::vertical_interface(grid, *interface_x, *left, *right)
        }
        Material::Raster { rho_file, mu_file } => load_raster(grid, rho_file, mu_file),
    }
}

fn load_raster(grid: &Grid, rho_file: &str, mu_file: &str) -> Result<MaterialField> {
    let load = |path: &str, name: &str| -> Result<Vec<f64>> {
        let snap = read_snapshot(Path::new(path))?;
        if snap.field != name {
            return Err(Error::Snapshot {
                path: path.to_string(),
                reason: format!("holds field {:?}, expected {name:?}", snap.field),
            });
        }
        // the container's (a+1) x (b+1) array is read cell-wise
        if snap.n_x + 1 != grid.n_x || snap.n_y + 1 != grid.n_y {
            return Err(Error::Dimension(format!(
                "raster {path} holds a {} x {} cell array, domain has {} x {} cells",
                snap.n_x + 1,
                snap.n_y + 1,
                grid.n_x,
                grid.n_y
            )));
        }
        Ok(snap.data)
    };
    let field = MaterialField {
        n_x: grid.n_x,
        n_y: grid.n_y,
        rho: load(rho_file, "rho")?,
        mu: load(mu_file, "mu")?,
    };
    field.validate()?;
    Ok(field)
}

/// A configured run, stepped explicitly. Gathers the stepping grid (padded
/// when absorbing layers are on), the material coefficients, the resolved
/// source, and the evolving state.
pub struct Session {
    pub config: RunConfig,
    /// The configured domain.
    pub interior: Grid,
    /// The grid the state lives on; equals `interior` plus layer padding.
    pub grid: Grid,
    pub state: WaveState,
    pub cfl: CflReport,
    pub total_steps: u64,
    coeffs: NodeCoefficients,
    region: Option<PmlRegion>,
    aux: Option<PmlAuxState>,
    source: Option<SeparableSource>,
    /// Steps the pulse source stays active: floor(pi / tau).
    pulse_cutoff: Option<u64>,
    dirichlet: Option<DirichletValue>,
    pad: usize,
}

impl Session {
    pub fn new(config: &RunConfig) -> Result<Session> {
        let interior = config.grid()?;
        let materials = build_materials(config, &interior)?;
        let c_max = materials.max_speed();
        let h = interior.h;
        let tau = match config.tau_rule {
            TauRule::Factor(f) => f * h,
            TauRule::HOver4C => h / (4.0 * c_max),
        };
        let cfl = kernel::check_cfl(tau, h, c_max);
        let total_steps = (config.final_time / tau).round() as u64;

        let (grid, coeffs, region, aux, pad) = match config.boundary {
            Boundary::Dirichlet(_) => {
                let coeffs = NodeCoefficients::build(&materials)?;
                (interior.clone(), coeffs, None, None, 0)
            }
            Boundary::Pml(p) => {
                let padded = pml::padded_grid(&interior, p.width_cells);
                let cells = pml::pad_materials(&materials, p.width_cells);
                pml::validate_layer_materials(&cells, p.width_cells)?;
                let coeffs = NodeCoefficients::build(&cells)?;
                let profile =
                    pml::build_damping(&interior, p.width_cells, p.m, p.r, c_max, p.log_base)?;
                let mats = pml::node_materials(&cells);
                let aux = PmlAuxState::zeros(&padded);
                (padded, coeffs, Some(PmlRegion { order: p.order, profile, mats }), Some(aux), p.width_cells)
            }
        };

        let seed_exact = region.is_none()
            && (matches!(config.source, Source::Manufactured)
                || matches!(config.boundary, Boundary::Dirichlet(DirichletValue::Manufactured)));
        let state = if !seed_exact {
            WaveState::zeros(&grid, tau)
        } else if total_steps == 0 {
            // no step will advance the clock, so both levels hold t = 0 data
            let mut s = WaveState::zeros(&grid, tau);
            for j in 0..=grid.n_y {
                for i in 0..=grid.n_x {
                    let v = sources::manufactured_solution(grid.x(i), grid.y(j), 0.0);
                    let k = grid.idx(i, j);
                    s.u_curr[k] = v;
                    s.u_prev[k] = v;
                }
            }
            s
        } else {
            WaveState::seeded(&grid, tau, sources::manufactured_solution)
        };

        let source = match config.source {
            Source::None => None,
            Source::Manufactured => Some(SeparableSource::manufactured(&grid)),
            Source::GaussianPulse { center } => {
                Some(SeparableSource::pulse(&grid, center.0, center.1))
            }
        };
        let pulse_cutoff = match config.source {
            Source::GaussianPulse { .. } => {
                Some((std::f64::consts::PI / tau).floor() as u64)
            }
            _ => None,
        };
        let dirichlet = match config.boundary {
            Boundary::Dirichlet(v) => Some(v),
            Boundary::Pml(_) => None,
        };

        Ok(Session {
            config: config.clone(),
            interior,
            grid,
            state,
            cfl,
            total_steps,
            coeffs,
            region,
            aux,
            source,
            pulse_cutoff,
            dirichlet,
            pad,
        })
    }

    /// Advances one time level. The source amplitude and Dirichlet trace are
    /// evaluated at the destination time of the step.
    pub fn step(&mut self) -> Result<()> {
        let t_next = (self.state.step_index + 1) as f64 * self.state.tau;
        let term = match &self.source {
            Some(src) if self.pulse_cutoff.map_or(true, |k| self.state.step_index < k) => {
                Some(SourceTerm { spatial: &src.spatial, amp: src.amp(t_next) })
            }
            _ => None,
        };
        match (&self.region, &mut self.aux) {
            (Some(region), Some(aux)) => {
                pml::coupled_step(&mut self.state, aux, &self.grid, &self.coeffs, region, term)
            }
            _ => {
                kernel::lisa_step(&mut self.state, &self.grid, &self.coeffs, term)?;
                if self.dirichlet == Some(DirichletValue::Manufactured) {
                    kernel::apply_dirichlet(
                        &mut self.state,
                        &self.grid,
                        sources::manufactured_solution,
                        t_next,
                    );
                }
                Ok(())
            }
        }
    }

    pub fn run(&mut self) -> Result<()> {
        while self.state.step_index < self.total_steps {
            self.step()?;
        }
        Ok(())
    }

    /// Current displacement over the configured domain, stripped of layer
    /// padding.
    pub fn interior_field(&self) -> Vec<f64> {
        if self.pad == 0 {
            return self.state.u_curr.clone();
        }
        let nx1 = self.grid.nodes_x();
        let mut out = Vec::with_capacity(self.interior.n_nodes());
        for j in self.pad..=self.pad + self.interior.n_y {
            let base = j * nx1 + self.pad;
            out.extend_from_slice(&self.state.u_curr[base..base + self.interior.nodes_x()]);
        }
        out
    }

    /// Max |u| over the configured domain.
    pub fn interior_max(&self) -> f64 {
        let nx1 = self.grid.nodes_x();
        let mut peak = 0.0f64;
        for j in self.pad..=self.pad + self.interior.n_y {
            let base = j * nx1 + self.pad;
            for v in &self.state.u_curr[base..base + self.interior.nodes_x()] {
                peak = peak.max(v.abs());
            }
        }
        peak
    }

    /// Relative (L2, Linf) errors against the oscillatory exact solution at
    /// the current time, for runs driven by it.
    pub fn exact_errors(&self) -> Option<(f64, f64)> {
        let comparable = self.region.is_none()
            && (matches!(self.config.source, Source::Manufactured)
                || (matches!(self.config.source, Source::None)
                    && self.dirichlet == Some(DirichletValue::Manufactured)));
        if !comparable {
            return None;
        }
        let t = self.state.time();
        let mut exact = Vec::with_capacity(self.grid.n_nodes());
        for j in 0..=self.grid.n_y {
            for i in 0..=self.grid.n_x {
                exact.push(sources::manufactured_solution(self.grid.x(i), self.grid.y(j), t));
            }
        }
        let l2 = relative_error(&self.state.u_curr, &exact, self.grid.h, Norm::L2).ok()?;
        let linf = relative_error(&self.state.u_curr, &exact, self.grid.h, Norm::LInf).ok()?;
        Some((l2, linf))
    }
}

pub struct RunArtifacts {
    pub out_dir: PathBuf,
    pub snapshots: Vec<PathBuf>,
    pub log_path: PathBuf,
    pub peak_interior: f64,
    pub errors: Option<(f64, f64)>,
    pub cfl: CflReport,
    pub steps: u64,
    pub tau: f64,
}

fn write_field_snapshot(
    out_dir: &Path,
    session: &Session,
    snapshots: &mut Vec<PathBuf>,
) -> Result<()> {
    let path = out_dir.join(format!("u_{:06}.snap", session.state.step_index));
    write_snapshot(
        &path,
        &Snapshot {
            field: "u".to_string(),
            n_x: session.interior.n_x,
            n_y: session.interior.n_y,
            h: session.interior.h,
            t: session.state.time(),
            data: session.interior_field(),
        },
    )?;
    snapshots.push(path);
    Ok(())
}

/// Runs a config to completion, writing snapshots on the configured cadence
/// (plus the initial and final levels), and a run log. On divergence the
/// artifacts produced so far are kept, the log records the failing step, and
/// the error is returned.
pub fn run_experiment(config: &RunConfig) -> Result<RunArtifacts> {
    let started = Instant::now();
    let out_dir = PathBuf::from(&config.output.directory);
    fs::create_dir_all(&out_dir)?;
    let mut session = Session::new(config)?;
    let cadence = if config.output.snapshot_every > 0 {
        config.output.snapshot_every as u64
    } else {
        (session.total_steps / 10).max(1)
    };

    let mut snapshots = Vec::new();
    write_field_snapshot(&out_dir, &session, &mut snapshots)?;
    let start_index = session.state.step_index;
    let mut peak = session.interior_max();
    let mut outcome = Ok(());
    while session.state.step_index < session.total_steps {
        match session.step() {
            Ok(()) => {
                peak = peak.max(session.interior_max());
                let done = session.state.step_index - start_index;
                if session.state.step_index >= session.total_steps || done % cadence == 0 {
                    write_field_snapshot(&out_dir, &session, &mut snapshots)?;
                }
            }
            Err(e) => {
                outcome = Err(e);
                break;
            }
        }
    }

    let errors = if outcome.is_ok() { session.exact_errors() } else { None };
    let mut log = String::new();
    let _ = writeln!(
        log,
        "grid: {} x {} cells, h = {}",
        session.interior.n_x, session.interior.n_y, session.interior.h
    );
    let _ = writeln!(
        log,
        "steps: {} of {} planned, tau = {}",
        session.state.step_index - start_index,
        session.total_steps.saturating_sub(start_index),
        session.state.tau
    );
    let _ = writeln!(
        log,
        "cfl: ratio = {} ({}), max stable tau = {}",
        session.cfl.ratio,
        if session.cfl.pass() { "pass" } else { "VIOLATED" },
        session.cfl.max_tau
    );
    let _ = writeln!(log, "peak interior |u| = {peak}");
    if let Some((l2, linf)) = errors {
        let _ = writeln!(log, "errors vs exact: l2 = {l2}, linf = {linf}");
    }
    if let Err(Error::Diverged { step }) = &outcome {
        let _ = writeln!(log, "DIVERGED at step {step}; partial artifacts retained");
    }
    let _ = writeln!(
        log,
        "wall: {:.3}s (informational; not covered by reproducibility)",
        started.elapsed().as_secs_f64()
    );
    let log_path = out_dir.join("run.log");
    fs::write(&log_path, log)?;

    outcome.map(|_| RunArtifacts {
        out_dir,
        snapshots,
        log_path,
        peak_interior: peak,
        errors,
        cfl: session.cfl,
        steps: session.state.step_index - start_index,
        tau: session.state.tau,
    })
}

/// Runs the config at each resolution and tabulates errors and observed
/// orders. Presets driven by the exact solution compare against it directly;
/// pulse presets self-converge against a fine reference run restricted onto
/// each coarse grid. Absorbing-layer presets have no comparison field.
pub fn convergence_study(
    config: &RunConfig,
    resolutions: &[usize],
    reference: Option<usize>,
) -> Result<ErrorReport> {
    if resolutions.is_empty() {
        return Err(Error::config("refinement study needs at least one resolution"));
    }
    if matches!(config.boundary, Boundary::Pml(_)) {
        return Err(Error::config(
            "refinement studies run on dirichlet presets; absorbing-layer runs have no comparison field",
        ));
    }
    let exact_mode = matches!(config.source, Source::Manufactured)
        || (matches!(config.source, Source::None)
            && matches!(config.boundary, Boundary::Dirichlet(DirichletValue::Manufactured)));
    let mut report = ErrorReport::default();
    if exact_mode {
        if reference.is_some() {
            return Err(Error::config(
                "a reference resolution applies only to pulse presets; this preset compares against the exact solution",
            ));
        }
        for &n in resolutions {
            let mut s = Session::new(&config.with_resolution(n))?;
            s.run()?;
            match s.exact_errors() {
                Some((l2, linf)) => report.push(n, l2, linf),
                None => {
                    return Err(Error::config(
                        "exact comparison is undefined at this final time",
                    ))
                }
            }
        }
    } else {
        let n_ref = match reference {
            Some(n) => n,
            None => {
                return Err(Error::config(
                    "pulse presets self-converge and need a finer reference resolution",
                ))
            }
        };
        for &n in resolutions {
            if n == 0 || n_ref % n != 0 || n_ref == n {
                return Err(Error::config(format!(
                    "reference {n_ref} must be a proper multiple of every resolution; got {n}"
                )));
            }
        }
        let mut fine = Session::new(&config.with_resolution(n_ref))?;
        fine.run()?;
        for &n in resolutions {
            let mut s = Session::new(&config.with_resolution(n))?;
            s.run()?;
            let restricted = restrict_to_coarse(&fine.state.u_curr, &fine.grid, n_ref / n)?;
            let l2 = relative_error(&s.state.u_curr, &restricted, s.grid.h, Norm::L2)?;
            let linf = relative_error(&s.state.u_curr, &restricted, s.grid.h, Norm::LInf)?;
            report.push(n, l2, linf);
        }
    }
    Ok(report)
}
