//! Explicit time stepping: the heterogeneous cross-point update, its
//! homogeneous and vertical-interface closed forms, boundary application,
//! and the CFL check.

use rayon::prelude::*;

use crate::grid::{Grid, NodeCoefficients};
use crate::{Error, Result};

/// Two retained displacement levels plus the level under construction.
///
/// `u_prev` holds time level `step_index - 1`, `u_curr` holds `step_index`.
/// A step writes the next level into an internal buffer and rotates, so a
/// half-updated grid is never visible.
#[derive(Debug, Clone)]
pub struct WaveState {
    pub u_prev: Vec<f64>,
    pub u_curr: Vec<f64>,
    next: Vec<f64>,
    /// Count of completed steps; `u_curr` is the field at `step_index * tau`.
    pub step_index: u64,
    pub tau: f64,
}

impl WaveState {
    /// At-rest start: both retained levels zero.
    pub fn zeros(grid: &Grid, tau: f64) -> WaveState {
        let n = grid.n_nodes();
        WaveState { u_prev: vec![0.0; n], u_curr: vec![0.0; n], next: vec![0.0; n], step_index: 0, tau }
    }

    /// Two-level seeding from an analytic field: `u_prev = f(x, y, 0)`,
    /// `u_curr = f(x, y, tau)`. The state starts at `step_index = 1`.
    pub fn seeded(grid: &Grid, tau: f64, f: impl Fn(f64, f64, f64) -> f64) -> WaveState {
        let mut u_prev = Vec::with_capacity(grid.n_nodes());
        let mut u_curr = Vec::with_capacity(grid.n_nodes());
        for j in 0..grid.nodes_y() {
            for i in 0..grid.nodes_x() {
                let (x, y) = (grid.x(i), grid.y(j));
                u_prev.push(f(x, y, 0.0));
                u_curr.push(f(x, y, tau));
            }
        }
        let next = vec![0.0; grid.n_nodes()];
        WaveState { u_prev, u_curr, next, step_index: 1, tau }
    }

    /// Time of the current level.
    pub fn time(&self) -> f64 {
        self.step_index as f64 * self.tau
    }

    /// prev <- curr, curr <- next; the old prev becomes scratch.
    pub(crate) fn rotate(&mut self) {
        std::mem::swap(&mut self.next, &mut self.u_prev);
        std::mem::swap(&mut self.u_prev, &mut self.u_curr);
        self.step_index += 1;
    }

    /// Field-disjoint views for a sweep: (u_prev, u_curr, next).
    pub(crate) fn split_mut(&mut self) -> (&[f64], &[f64], &mut Vec<f64>) {
        (&self.u_prev, &self.u_curr, &mut self.next)
    }

    pub(crate) fn check_dims(&self, grid: &Grid) -> Result<()> {
        let n = grid.n_nodes();
        if self.u_prev.len() != n || self.u_curr.len() != n {
            return Err(Error::Dimension(format!(
                "state holds {} / {} nodes, grid has {}",
                self.u_prev.len(),
                self.u_curr.len(),
                n
            )));
        }
        Ok(())
    }
}

/// Forcing for one step, factored as `amp * spatial[node]`.
///
/// The spatial factor is sampled once on the stepping grid; the driver
/// evaluates the temporal factor at the destination time level `t + tau`
/// and passes it as `amp`. The update adds `tau^2 * amp * spatial`.
#[derive(Clone, Copy)]
pub struct SourceTerm<'a> {
    pub spatial: &'a [f64],
    pub amp: f64,
}

/// One explicit step of the cross-point scheme:
/// `u_next = 2 u - u_prev + (tau^2 / (h^2 alpha)) (-beta_inv u + sum_k u_k / rho_k)`
/// plus the source term on interior nodes. Boundary nodes carry over from
/// `u_curr`; impose boundary values afterwards with [`apply_dirichlet`].
pub fn lisa_step(
    state: &mut WaveState,
    grid: &Grid,
    coeffs: &NodeCoefficients,
    source: Option<SourceTerm>,
) -> Result<()> {
    state.check_dims(grid)?;
    if coeffs.n_x != grid.n_x || coeffs.n_y != grid.n_y {
        return Err(Error::Dimension(format!(
            "coefficients built for {} x {} cells, grid has {} x {}",
            coeffs.n_x, coeffs.n_y, grid.n_x, grid.n_y
        )));
    }
    let n_x = grid.n_x;
    let nx1 = grid.nodes_x();
    let t2h2 = (state.tau * state.tau) / (grid.h * grid.h);
    let t2 = state.tau * state.tau;

    match source {
        Some(s) => {
            if s.spatial.len() != grid.n_nodes() {
                return Err(Error::Dimension(format!(
                    "source spatial factor holds {} nodes, grid has {}",
                    s.spatial.len(),
                    grid.n_nodes()
                )));
            }
            let scale = t2 * s.amp;
            interior_sweep(state, grid, |j, south, mid, north, up, row| {
                let crow = (j - 1) * (n_x - 1);
                let srow = &s.spatial[j * nx1..(j + 1) * nx1];
                for i in 1..n_x {
                    row[i] = lisa_node(coeffs, crow + i - 1, i, t2h2, south, mid, north, up)
                        + scale * srow[i];
                }
            })
        }
        None => interior_sweep(state, grid, |j, south, mid, north, up, row| {
            let crow = (j - 1) * (n_x - 1);
            for i in 1..n_x {
                row[i] = lisa_node(coeffs, crow + i - 1, i, t2h2, south, mid, north, up);
            }
        }),
    }
}

/// Single-node cross-point update, shared with the coupled absorbing step so
/// both advance stencil-owned nodes with bit-identical arithmetic.
#[inline(always)]
pub(crate) fn lisa_node(
    coeffs: &NodeCoefficients,
    c: usize,
    i: usize,
    t2h2: f64,
    south: &[f64],
    mid: &[f64],
    north: &[f64],
    up: &[f64],
) -> f64 {
    let acc = -coeffs.beta_inv[c] * mid[i]
        + coeffs.inv_rho5[c] * mid[i + 1]
        + coeffs.inv_rho6[c] * north[i]
        + coeffs.inv_rho7[c] * mid[i - 1]
        + coeffs.inv_rho8[c] * south[i];
    2.0 * mid[i] - up[i] + t2h2 * coeffs.inv_alpha[c] * acc
}

/// Homogeneous-medium closed form (the five-point leapfrog scheme):
/// `u_next = 2 u - u_prev + (tau^2 mu / (h^2 rho)) (u5 + u6 + u7 + u8 - 4 u)`.
pub fn classical_step(
    state: &mut WaveState,
    grid: &Grid,
    rho: f64,
    mu: f64,
    source: Option<SourceTerm>,
) -> Result<()> {
    state.check_dims(grid)?;
    let n_x = grid.n_x;
    let nx1 = grid.nodes_x();
    let t2 = state.tau * state.tau;
    let cl = t2 * mu / (rho * grid.h * grid.h);

    #[inline(always)]
    fn node(cl: f64, i: usize, south: &[f64], mid: &[f64], north: &[f64], up: &[f64]) -> f64 {
        let lap = mid[i + 1] + mid[i - 1] + north[i] + south[i] - 4.0 * mid[i];
        2.0 * mid[i] - up[i] + cl * lap
    }

    match source {
        Some(s) => {
            let scale = t2 * s.amp;
            interior_sweep(state, grid, |j, south, mid, north, up, row| {
                let srow = &s.spatial[j * nx1..(j + 1) * nx1];
                for i in 1..n_x {
                    row[i] = node(cl, i, south, mid, north, up) + scale * srow[i];
                }
            })
        }
        None => interior_sweep(state, grid, |_j, south, mid, north, up, row| {
            for i in 1..n_x {
                row[i] = node(cl, i, south, mid, north, up);
            }
        }),
    }
}

/// Closed form for two media split by a vertical grid line. Off-interface
/// columns take the homogeneous step with their side's material; on the
/// interface column the update is
/// `u_next = 2 u - u_prev + (tau^2/h^2) (mu_l mu_r / (mu_l + mu_r)) (1 / (rho_l rho_r))
///   (-4 (rho_l + rho_r) u + 2 rho_l u5 + 2 rho_r u7 + (rho_l + rho_r)(u6 + u8))`.
pub fn multilayer_step(
    state: &mut WaveState,
    grid: &Grid,
    left: (f64, f64),
    right: (f64, f64),
    interface_x: f64,
    source: Option<SourceTerm>,
) -> Result<()> {
    state.check_dims(grid)?;
    let ic = interface_column(grid, interface_x)?;
    let n_x = grid.n_x;
    let nx1 = grid.nodes_x();
    let t2 = state.tau * state.tau;
    let (rho_l, mu_l) = left;
    let (rho_r, mu_r) = right;
    let cl_l = t2 * mu_l / (rho_l * grid.h * grid.h);
    let cl_r = t2 * mu_r / (rho_r * grid.h * grid.h);
    let k_if = (t2 / (grid.h * grid.h)) * (mu_l * mu_r / (mu_l + mu_r)) / (rho_l * rho_r);
    let rho_sum = rho_l + rho_r;

    let node = |i: usize, south: &[f64], mid: &[f64], north: &[f64], up: &[f64]| -> f64 {
        if i == ic {
            let acc = -4.0 * rho_sum * mid[i]
                + 2.0 * rho_l * mid[i + 1]
                + 2.0 * rho_r * mid[i - 1]
                + rho_sum * (north[i] + south[i]);
            2.0 * mid[i] - up[i] + k_if * acc
        } else {
            let cl = if i < ic { cl_l } else { cl_r };
            let lap = mid[i + 1] + mid[i - 1] + north[i] + south[i] - 4.0 * mid[i];
            2.0 * mid[i] - up[i] + cl * lap
        }
    };

    match source {
        Some(s) => {
            let scale = t2 * s.amp;
            interior_sweep(state, grid, |j, south, mid, north, up, row| {
                let srow = &s.spatial[j * nx1..(j + 1) * nx1];
                for i in 1..n_x {
                    row[i] = node(i, south, mid, north, up) + scale * srow[i];
                }
            })
        }
        None => interior_sweep(state, grid, |_j, south, mid, north, up, row| {
            for i in 1..n_x {
                row[i] = node(i, south, mid, north, up);
            }
        }),
    }
}

/// Node column of a vertical interface; it must lie on an interior grid line.
pub fn interface_column(grid: &Grid, interface_x: f64) -> Result<usize> {
    let pos = (interface_x - grid.x0) / grid.h;
    let ic = pos.round();
    if (pos - ic).abs() > 1e-9 {
        return Err(Error::config(format!(
            "interface x = {interface_x} does not lie on a grid line (h = {})",
            grid.h
        )));
    }
    let ic = ic as isize;
    if ic < 1 || ic as usize > grid.n_x - 1 {
        return Err(Error::config(format!(
            "interface x = {interface_x} must lie strictly inside the domain"
        )));
    }
    Ok(ic as usize)
}

/// Sets every boundary node of the current level to `boundary_fn(x, y, t)`.
/// Interior nodes are untouched.
pub fn apply_dirichlet(
    state: &mut WaveState,
    grid: &Grid,
    boundary_fn: impl Fn(f64, f64, f64) -> f64,
    t: f64,
) {
    let (n_x, n_y) = (grid.n_x, grid.n_y);
    for i in 0..=n_x {
        let x = grid.x(i);
        state.u_curr[grid.idx(i, 0)] = boundary_fn(x, grid.y(0), t);
        state.u_curr[grid.idx(i, n_y)] = boundary_fn(x, grid.y(n_y), t);
    }
    for j in 1..n_y {
        let y = grid.y(j);
        state.u_curr[grid.idx(0, j)] = boundary_fn(grid.x(0), y, t);
        state.u_curr[grid.idx(n_x, j)] = boundary_fn(grid.x(n_x), y, t);
    }
}

/// Stability check for the explicit schemes: pass iff
/// `tau <= h / (c_max sqrt(2))`.
#[derive(Debug, Clone, Copy)]
pub struct CflReport {
    /// `tau c_max sqrt(2) / h`; stable iff <= 1.
    pub ratio: f64,
    /// Largest stable time step for this grid and speed.
    pub max_tau: f64,
}

impl CflReport {
    pub fn pass(&self) -> bool {
        self.ratio <= 1.0
    }
}

pub fn check_cfl(tau: f64, h: f64, c_max: f64) -> CflReport {
    let root2 = std::f64::consts::SQRT_2;
    CflReport { ratio: tau * c_max * root2 / h, max_tau: h / (c_max * root2) }
}

/// Runs `row_update` over every interior row, carries the boundary ring over
/// from `u_curr`, verifies the produced level is finite, and rotates.
///
/// The closure receives (j, south, mid, north, u_prev row, out row) where
/// south/mid/north are the `u_curr` rows j-1, j, j+1. It must fill columns
/// 1..n_x of the out row; columns 0 and n_x are pre-copied here. Rows are
/// updated independently, so the sweep is partitioned across workers; the
/// arithmetic per row does not depend on the partitioning.
fn interior_sweep<F>(state: &mut WaveState, grid: &Grid, row_update: F) -> Result<()>
where
    F: Fn(usize, &[f64], &[f64], &[f64], &[f64], &mut [f64]) + Sync,
{
    let nx1 = grid.nodes_x();
    let n_y = grid.n_y;
    let failed_step = state.step_index + 1;
    {
        let state = &mut *state;
        let u_prev: &[f64] = &state.u_prev;
        let u_curr: &[f64] = &state.u_curr;
        let next = &mut state.next;
        next.resize(u_curr.len(), 0.0);
        let last = n_y * nx1;
        next[..nx1].copy_from_slice(&u_curr[..nx1]);
        next[last..].copy_from_slice(&u_curr[last..]);
        let ok = next[nx1..last]
            .par_chunks_mut(nx1)
            .enumerate()
            .map(|(r, row)| {
                let j = r + 1;
                let base = j * nx1;
                let south = &u_curr[base - nx1..base];
                let mid = &u_curr[base..base + nx1];
                let north = &u_curr[base + nx1..base + 2 * nx1];
                let up = &u_prev[base..base + nx1];
                row[0] = mid[0];
                row[nx1 - 1] = mid[nx1 - 1];
                row_update(j, south, mid, north, up, row);
                row.iter().all(|v| v.is_finite())
            })
            .reduce(|| true, |a, b| a && b);
        if !ok {
            return Err(Error::Diverged { step: failed_step });
        }
    }
    state.rotate();
    Ok(())
}
