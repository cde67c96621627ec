//! Perfectly matched absorbing layers: polynomial damping profiles, the
//! first- and second-order layer updates, and the coupled step that runs the
//! cross-point stencil in the interior and the layer update in the padding.
//!
//! The intermediate fields v_x, v_y live at staggered half positions
//! (x_i + h/2, y_j) and (x_i, y_j + h/2): the forward difference of u that
//! drives them is centered there, the damping factor in their own update is
//! evaluated there, and divergences of v and of (lambda v) read back with
//! backward differences. This staggering keeps the layer impedance matched;
//! evaluating everything at whole nodes leaves a visible reflection.

use rayon::prelude::*;

use crate::grid::{Grid, MaterialField, NodeCoefficients};
use crate::kernel::{SourceTerm, WaveState};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogBase {
    Natural,
    Ten,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PmlOrder {
    First,
    Second,
}

/// Axis-separable damping on the padded grid.
///
/// `lambda(d) = lambda_max d^m` for depth `d` into a layer, zero across the
/// whole interior including its edge nodes. Depths are computed from node
/// indices, so interior values are exactly zero, never rounding residue.
#[derive(Debug, Clone)]
pub struct DampingProfile {
    /// Layer thickness in cells on every side.
    pub width: usize,
    pub m: u32,
    /// Target reflection coefficient used to size the amplitude.
    pub r: f64,
    /// Profile amplitude: `-c log(R) (m+1) / D^(m+1)` with `D = width * h`.
    pub lambda_max: f64,
    /// Values at node coordinates of the padded grid.
    pub lambda_x: Vec<f64>,
    pub lambda_y: Vec<f64>,
    /// Values at the staggered positions; entry i covers x_i + h/2.
    pub lambda_x_half: Vec<f64>,
    pub lambda_y_half: Vec<f64>,
}

impl DampingProfile {
    /// Profile value at depth `d` into any layer.
    pub fn lambda_at_depth(&self, d: f64) -> f64 {
        self.lambda_max * d.powi(self.m as i32)
    }

    /// Degenerate profile with no layers; every value is zero.
    pub fn zero(grid: &Grid) -> DampingProfile {
        DampingProfile {
            width: 0,
            m: 0,
            r: 0.0,
            lambda_max: 0.0,
            lambda_x: vec![0.0; grid.nodes_x()],
            lambda_y: vec![0.0; grid.nodes_y()],
            lambda_x_half: vec![0.0; grid.nodes_x()],
            lambda_y_half: vec![0.0; grid.nodes_y()],
        }
    }

    /// Inclusive span of node columns (or rows) that the interior stencil
    /// owns on the padded grid, restricted to updatable inner nodes.
    pub(crate) fn stencil_span(&self, cells: usize) -> (usize, usize) {
        (self.width.max(1), (cells - self.width).min(cells - 1))
    }

    fn check_dims(&self, grid: &Grid) -> Result<()> {
        if self.lambda_x.len() != grid.nodes_x()
            || self.lambda_y.len() != grid.nodes_y()
            || self.lambda_x_half.len() != grid.nodes_x()
            || self.lambda_y_half.len() != grid.nodes_y()
        {
            return Err(Error::Dimension(format!(
                "damping profile sized {} x {}, grid has {} x {} nodes",
                self.lambda_x.len(),
                self.lambda_y.len(),
                grid.nodes_x(),
                grid.nodes_y()
            )));
        }
        Ok(())
    }
}

/// Grid extended by `width` layer cells on every side of `interior`.
pub fn padded_grid(interior: &Grid, width: usize) -> Grid {
    let w = width as f64 * interior.h;
    Grid {
        n_x: interior.n_x + 2 * width,
        n_y: interior.n_y + 2 * width,
        h: interior.h,
        x0: interior.x0 - w,
        y0: interior.y0 - w,
    }
}

/// Builds the damping profile for `interior` surrounded by `width` cells of
/// layer on every side. `c` is the fastest wave speed, used to size the
/// amplitude so a wave crossing the layer twice is attenuated to `r`.
pub fn build_damping(
    interior: &Grid,
    width: usize,
    m: u32,
    r: f64,
    c: f64,
    log_base: LogBase,
) -> Result<DampingProfile> {
    let mut problems = Vec::new();
    if width < 1 {
        problems.push(format!("pml: width_cells must be >= 1, got {width}"));
    }
    if !(r > 0.0 && r < 1.0) {
        problems.push(format!(
            "pml: R must lie strictly inside (0, 1), got {r} (R >= 1 gives a non-positive amplitude)"
        ));
    }
    if !(c.is_finite() && c > 0.0) {
        problems.push(format!("pml: wave speed must be positive and finite, got {c}"));
    }
    if !problems.is_empty() {
        return Err(Error::Config(problems));
    }

    let h = interior.h;
    let depth = width as f64 * h;
    let log_r = match log_base {
        LogBase::Natural => r.ln(),
        LogBase::Ten => r.log10(),
    };
    let lambda_max = -c * log_r * (m + 1) as f64 / depth.powi(m as i32 + 1);

    // Depth in cells from the interior edge, by index so the interior is
    // exactly zero. n cells wide interior spans node indices width..width+n.
    let axis = |cells_interior: usize| -> (Vec<f64>, Vec<f64>) {
        let nodes = cells_interior + 2 * width + 1;
        let hi = width + cells_interior;
        let mut whole = Vec::with_capacity(nodes);
        let mut half = Vec::with_capacity(nodes);
        for i in 0..nodes {
            let d_whole = if i < width {
                (width - i) as f64 * h
            } else if i > hi {
                (i - hi) as f64 * h
            } else {
                0.0
            };
            let p = i as f64 + 0.5;
            let d_half = if p < width as f64 {
                (width as f64 - p) * h
            } else if p > hi as f64 {
                (p - hi as f64) * h
            } else {
                0.0
            };
            whole.push(lambda_max * d_whole.powi(m as i32));
            half.push(lambda_max * d_half.powi(m as i32));
        }
        (whole, half)
    };
    let (lambda_x, lambda_x_half) = axis(interior.n_x);
    let (lambda_y, lambda_y_half) = axis(interior.n_y);

    Ok(DampingProfile { width, m, r, lambda_max, lambda_x, lambda_y, lambda_x_half, lambda_y_half })
}

/// Intermediate velocity-like fields and the auxiliary recombination field,
/// all on the padded grid. `vx[i, j]` lives at (x_i + h/2, y_j), `vy[i, j]`
/// at (x_i, y_j + h/2); psi lives on nodes.
#[derive(Debug, Clone)]
pub struct PmlAuxState {
    pub vx: Vec<f64>,
    pub vy: Vec<f64>,
    pub psi: Vec<f64>,
}

impl PmlAuxState {
    pub fn zeros(grid: &Grid) -> PmlAuxState {
        let n = grid.n_nodes();
        PmlAuxState { vx: vec![0.0; n], vy: vec![0.0; n], psi: vec![0.0; n] }
    }

    fn check_dims(&self, grid: &Grid) -> Result<()> {
        let n = grid.n_nodes();
        if self.vx.len() != n || self.vy.len() != n || self.psi.len() != n {
            return Err(Error::Dimension(format!(
                "aux fields hold {} / {} / {} nodes, grid has {}",
                self.vx.len(),
                self.vy.len(),
                self.psi.len(),
                n
            )));
        }
        Ok(())
    }
}

/// Per-node scalar materials for the coupled step: each node takes the cell
/// at (min(i, n_x-1), min(j, n_y-1)) of the padded cell field, which also
/// covers the staggered v positions in their own cell column or row.
#[derive(Debug, Clone)]
pub struct PmlMaterials {
    pub rho_node: Vec<f64>,
    pub mu_node: Vec<f64>,
    /// Cached reciprocal of rho_node, used by the staggered v updates.
    pub inv_rho_node: Vec<f64>,
}

/// Extends interior cell materials into the layers by clamping, so every
/// layer is constant along its depth direction.
pub fn pad_materials(interior: &MaterialField, width: usize) -> MaterialField {
    let (n_x, n_y) = (interior.n_x + 2 * width, interior.n_y + 2 * width);
    let mut rho = Vec::with_capacity(n_x * n_y);
    let mut mu = Vec::with_capacity(n_x * n_y);
    for cy in 0..n_y {
        for cx in 0..n_x {
            let ix = cx.saturating_sub(width).min(interior.n_x - 1);
            let iy = cy.saturating_sub(width).min(interior.n_y - 1);
            let k = interior.cell(ix, iy);
            rho.push(interior.rho[k]);
            mu.push(interior.mu[k]);
        }
    }
    MaterialField { n_x, n_y, rho, mu }
}

/// Checks that a padded cell field is constant along the depth direction of
/// every layer, the assumption the layer equations are derived under.
pub fn validate_layer_materials(padded: &MaterialField, width: usize) -> Result<()> {
    let (n_x, n_y) = (padded.n_x, padded.n_y);
    if n_x <= 2 * width || n_y <= 2 * width {
        return Err(Error::Dimension(format!(
            "padded cell field {n_x} x {n_y} cannot hold {width}-cell layers"
        )));
    }
    let mismatch = |cx: usize, cy: usize, rx: usize, ry: usize| -> bool {
        padded.rho[padded.cell(cx, cy)] != padded.rho[padded.cell(rx, ry)]
            || padded.mu[padded.cell(cx, cy)] != padded.mu[padded.cell(rx, ry)]
    };
    for cy in 0..n_y {
        for cx in 0..width {
            // left and right layers clamp to the first/last interior column
            if mismatch(cx, cy, width, cy) || mismatch(n_x - 1 - cx, cy, n_x - 1 - width, cy) {
                return Err(Error::config(format!(
                    "pml: materials vary along the layer depth near cell column {cx}"
                )));
            }
        }
    }
    for cx in 0..n_x {
        for cy in 0..width {
            if mismatch(cx, cy, cx, width) || mismatch(cx, n_y - 1 - cy, cx, n_y - 1 - width) {
                return Err(Error::config(format!(
                    "pml: materials vary along the layer depth near cell row {cy}"
                )));
            }
        }
    }
    Ok(())
}

/// Per-node materials for the coupled step, from padded cell materials.
pub fn node_materials(padded: &MaterialField) -> PmlMaterials {
    let (nodes_x, nodes_y) = (padded.n_x + 1, padded.n_y + 1);
    let mut rho_node = Vec::with_capacity(nodes_x * nodes_y);
    let mut mu_node = Vec::with_capacity(nodes_x * nodes_y);
    let mut inv_rho_node = Vec::with_capacity(nodes_x * nodes_y);
    for j in 0..nodes_y {
        for i in 0..nodes_x {
            let k = padded.cell(i.min(padded.n_x - 1), j.min(padded.n_y - 1));
            rho_node.push(padded.rho[k]);
            mu_node.push(padded.mu[k]);
            inv_rho_node.push(1.0 / padded.rho[k]);
        }
    }
    PmlMaterials { rho_node, mu_node, inv_rho_node }
}

/// Everything the coupled step needs about the absorbing region.
#[derive(Debug, Clone)]
pub struct PmlRegion {
    pub order: PmlOrder,
    pub profile: DampingProfile,
    pub mats: PmlMaterials,
}

enum RhoFactor<'a> {
    /// Uniform density: differences divide by rho * h.
    Uniform(f64),
    /// Per-node reciprocal densities (coupled step).
    PerNode(&'a [f64]),
}

/// Advances vx and vy one forward step:
/// `v += tau (-lambda_half v + du / (rho h))` with the forward difference of
/// u centered at v's own staggered position. The last column of vx and last
/// row of vy have no forward neighbor and stay fixed.
fn v_sweep(
    vx: &mut [f64],
    vy: &mut [f64],
    u: &[f64],
    grid: &Grid,
    tau: f64,
    lxh: &[f64],
    lyh: &[f64],
    rho: RhoFactor,
) {
    let nx1 = grid.nodes_x();
    let ny1 = grid.nodes_y();
    let h = grid.h;
    vx.par_chunks_mut(nx1)
        .zip(vy.par_chunks_mut(nx1))
        .enumerate()
        .for_each(|(j, (vxr, vyr))| {
            let base = j * nx1;
            let mid = &u[base..base + nx1];
            match rho {
                RhoFactor::Uniform(rho) => {
                    let rh = rho * h;
                    for i in 0..nx1 - 1 {
                        vxr[i] += tau * (-lxh[i] * vxr[i] + (mid[i + 1] - mid[i]) / rh);
                    }
                    if j < ny1 - 1 {
                        let north = &u[base + nx1..base + 2 * nx1];
                        let ly = lyh[j];
                        for i in 0..nx1 {
                            vyr[i] += tau * (-ly * vyr[i] + (north[i] - mid[i]) / rh);
                        }
                    }
                }
                RhoFactor::PerNode(inv_rho) => {
                    let invr = &inv_rho[base..base + nx1];
                    for i in 0..nx1 - 1 {
                        vxr[i] += tau * (-lxh[i] * vxr[i] + (mid[i + 1] - mid[i]) * invr[i] / h);
                    }
                    if j < ny1 - 1 {
                        let north = &u[base + nx1..base + 2 * nx1];
                        let ly = lyh[j];
                        for i in 0..nx1 {
                            vyr[i] += tau * (-ly * vyr[i] + (north[i] - mid[i]) * invr[i] / h);
                        }
                    }
                }
            }
        });
}

/// Row sweep over psi and the next displacement level together, with the
/// same boundary carry-over, finite check, and rotation as the interior
/// steps. The closure fills columns 1..n_x of both rows.
fn pml_sweep<F>(state: &mut WaveState, grid: &Grid, psi: &mut [f64], row_update: F) -> Result<()>
where
    F: Fn(usize, &[f64], &[f64], &[f64], &[f64], &mut [f64], &mut [f64]) + Sync,
{
    let nx1 = grid.nodes_x();
    let n_y = grid.n_y;
    let failed_step = state.step_index + 1;
    {
        let (u_prev, u_curr, next) = state.split_mut();
        next.resize(u_curr.len(), 0.0);
        let last = n_y * nx1;
        next[..nx1].copy_from_slice(&u_curr[..nx1]);
        next[last..].copy_from_slice(&u_curr[last..]);
        let ok = next[nx1..last]
            .par_chunks_mut(nx1)
            .zip(psi[nx1..last].par_chunks_mut(nx1))
            .enumerate()
            .map(|(r, (row, psi_row))| {
                let j = r + 1;
                let base = j * nx1;
                let south = &u_curr[base - nx1..base];
                let mid = &u_curr[base..base + nx1];
                let north = &u_curr[base + nx1..base + 2 * nx1];
                let up = &u_prev[base..base + nx1];
                row[0] = mid[0];
                row[nx1 - 1] = mid[nx1 - 1];
                row_update(j, south, mid, north, up, psi_row, row);
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

/// One step of the first-order layer system with uniform material, in the
/// order v -> psi -> u, each consuming the freshly updated fields:
///
/// `psi += tau (mu lambda_y dx(vx) + mu lambda_x dy(vy) - lambda_x lambda_y u)`
/// `u'   = u + tau (mu dx(vx) + mu dy(vy) - (lambda_x + lambda_y) u + psi')`
///
/// with backward differences dx, dy. Where both profiles vanish this is a
/// first-order-in-time form of the wave equation.
pub fn pml1_step(
    state: &mut WaveState,
    aux: &mut PmlAuxState,
    grid: &Grid,
    rho: f64,
    mu: f64,
    profile: &DampingProfile,
) -> Result<()> {
    state.check_dims(grid)?;
    aux.check_dims(grid)?;
    profile.check_dims(grid)?;
    let n_x = grid.n_x;
    let nx1 = grid.nodes_x();
    let h = grid.h;
    let tau = state.tau;
    let PmlAuxState { vx, vy, psi } = aux;
    v_sweep(
        vx,
        vy,
        &state.u_curr,
        grid,
        tau,
        &profile.lambda_x_half,
        &profile.lambda_y_half,
        RhoFactor::Uniform(rho),
    );
    let vx: &[f64] = vx;
    let vy: &[f64] = vy;
    pml_sweep(state, grid, psi, |j, _south, mid, _north, _up, psi_row, row| {
        let base = j * nx1;
        let vxr = &vx[base..base + nx1];
        let vyr = &vy[base..base + nx1];
        let vys = &vy[base - nx1..base];
        let ly = profile.lambda_y[j];
        for i in 1..n_x {
            let lx = profile.lambda_x[i];
            let dvx = (vxr[i] - vxr[i - 1]) / h;
            let dvy = (vyr[i] - vys[i]) / h;
            psi_row[i] += tau * (mu * ly * dvx + mu * lx * dvy - lx * ly * mid[i]);
            row[i] = mid[i] + tau * (mu * dvx + mu * dvy - (lx + ly) * mid[i] + psi_row[i]);
        }
    })
}

/// One step of the second-order layer system with uniform material, order
/// v -> psi -> u. The psi update uses centered second differences of u and
/// backward differences of the staggered products (lambda v); the u update is
///
/// `(1 + s) u_next = (2 - tau^2 lambda_x lambda_y) u - (1 - s) u_prev
///   - mu tau^2 (dx(lambda_x vx) + dy(lambda_y vy)) + (mu tau^2 / (rho h^2)) lap(u)
///   + tau^2 psi'`,  s = (tau/2)(lambda_x + lambda_y).
///
/// With both profiles zero this coincides with the homogeneous leapfrog step.
pub fn pml2_step(
    state: &mut WaveState,
    aux: &mut PmlAuxState,
    grid: &Grid,
    rho: f64,
    mu: f64,
    profile: &DampingProfile,
) -> Result<()> {
    state.check_dims(grid)?;
    aux.check_dims(grid)?;
    profile.check_dims(grid)?;
    let n_x = grid.n_x;
    let nx1 = grid.nodes_x();
    let h = grid.h;
    let tau = state.tau;
    let t2 = tau * tau;
    let lap_coef = mu * t2 / (rho * h * h);
    let PmlAuxState { vx, vy, psi } = aux;
    v_sweep(
        vx,
        vy,
        &state.u_curr,
        grid,
        tau,
        &profile.lambda_x_half,
        &profile.lambda_y_half,
        RhoFactor::Uniform(rho),
    );
    let vx: &[f64] = vx;
    let vy: &[f64] = vy;
    let lxh = &profile.lambda_x_half;
    let lyh = &profile.lambda_y_half;
    pml_sweep(state, grid, psi, |j, south, mid, north, up, psi_row, row| {
        let base = j * nx1;
        let vxr = &vx[base..base + nx1];
        let vyr = &vy[base..base + nx1];
        let vys = &vy[base - nx1..base];
        let ly = profile.lambda_y[j];
        let lyh_j = lyh[j];
        let lyh_s = lyh[j - 1];
        for i in 1..n_x {
            let lx = profile.lambda_x[i];
            let d2x = (mid[i + 1] - 2.0 * mid[i] + mid[i - 1]) / (h * h);
            let d2y = (north[i] - 2.0 * mid[i] + south[i]) / (h * h);
            let dxlv = (lxh[i] * vxr[i] - lxh[i - 1] * vxr[i - 1]) / h;
            let dylv = (lyh_j * vyr[i] - lyh_s * vys[i]) / h;
            psi_row[i] += tau * mu * (ly / rho * d2x + lx / rho * d2y - ly * dxlv - lx * dylv);
            let s = 0.5 * tau * (lx + ly);
            let lap = mid[i + 1] + mid[i - 1] + north[i] + south[i] - 4.0 * mid[i];
            let num = (2.0 - t2 * lx * ly) * mid[i] - (1.0 - s) * up[i]
                - mu * t2 * (dxlv + dylv)
                + lap_coef * lap
                + t2 * psi_row[i];
            row[i] = num / (1.0 + s);
        }
    })
}

/// One coupled step on the padded grid: nodes with zero damping on both axes
/// advance by the cross-point stencil with source injection; nodes inside a
/// layer advance by the selected layer update with the clamped local
/// material. The regions share u values at their common nodes.
pub fn coupled_step(
    state: &mut WaveState,
    aux: &mut PmlAuxState,
    grid: &Grid,
    coeffs: &NodeCoefficients,
    region: &PmlRegion,
    source: Option<SourceTerm>,
) -> Result<()> {
    state.check_dims(grid)?;
    aux.check_dims(grid)?;
    region.profile.check_dims(grid)?;
    if coeffs.n_x != grid.n_x || coeffs.n_y != grid.n_y {
        return Err(Error::Dimension(format!(
            "coefficients built for {} x {} cells, padded grid has {} x {}",
            coeffs.n_x, coeffs.n_y, grid.n_x, grid.n_y
        )));
    }
    if let Some(s) = source {
        if s.spatial.len() != grid.n_nodes() {
            return Err(Error::Dimension(format!(
                "source spatial factor holds {} nodes, padded grid has {}",
                s.spatial.len(),
                grid.n_nodes()
            )));
        }
    }
    let n_x = grid.n_x;
    let nx1 = grid.nodes_x();
    let h = grid.h;
    let tau = state.tau;
    let t2 = tau * tau;
    let t2h2 = t2 / (h * h);
    let profile = &region.profile;
    let mats = &region.mats;
    let (span_lo, span_hi) = profile.stencil_span(n_x);
    let (span_lo_y, span_hi_y) = profile.stencil_span(grid.n_y);
    let order = region.order;
    let scale = source.map(|s| t2 * s.amp);

    let PmlAuxState { vx, vy, psi } = aux;
    v_sweep(
        vx,
        vy,
        &state.u_curr,
        grid,
        tau,
        &profile.lambda_x_half,
        &profile.lambda_y_half,
        RhoFactor::PerNode(&mats.inv_rho_node),
    );
    let vx: &[f64] = vx;
    let vy: &[f64] = vy;
    let lxh = &profile.lambda_x_half;
    let lyh = &profile.lambda_y_half;

    pml_sweep(state, grid, psi, |j, south, mid, north, up, psi_row, row| {
        let base = j * nx1;
        let vxr = &vx[base..base + nx1];
        let vyr = &vy[base..base + nx1];
        let vys = &vy[base - nx1..base];
        let ly = profile.lambda_y[j];
        let lyh_j = lyh[j];
        let lyh_s = lyh[j - 1];

        let layer_node = |i: usize, psi_row: &mut [f64]| -> f64 {
            let k = base + i;
            let (mu, inv_rho) = (mats.mu_node[k], mats.inv_rho_node[k]);
            let lx = profile.lambda_x[i];
            match order {
                PmlOrder::First => {
                    let dvx = (vxr[i] - vxr[i - 1]) / h;
                    let dvy = (vyr[i] - vys[i]) / h;
                    psi_row[i] += tau * (mu * ly * dvx + mu * lx * dvy - lx * ly * mid[i]);
                    mid[i] + tau * (mu * dvx + mu * dvy - (lx + ly) * mid[i] + psi_row[i])
                }
                PmlOrder::Second => {
                    let d2x = (mid[i + 1] - 2.0 * mid[i] + mid[i - 1]) / (h * h);
                    let d2y = (north[i] - 2.0 * mid[i] + south[i]) / (h * h);
                    let dxlv = (lxh[i] * vxr[i] - lxh[i - 1] * vxr[i - 1]) / h;
                    let dylv = (lyh_j * vyr[i] - lyh_s * vys[i]) / h;
                    psi_row[i] +=
                        tau * mu * (ly * inv_rho * d2x + lx * inv_rho * d2y - ly * dxlv - lx * dylv);
                    let s = 0.5 * tau * (lx + ly);
                    let lap = mid[i + 1] + mid[i - 1] + north[i] + south[i] - 4.0 * mid[i];
                    let num = (2.0 - t2 * lx * ly) * mid[i] - (1.0 - s) * up[i]
                        - mu * t2 * (dxlv + dylv)
                        + mu * t2h2 * inv_rho * lap
                        + t2 * psi_row[i];
                    num / (1.0 + s)
                }
            }
        };

        // rows under y-damping are layer everywhere; otherwise the stencil
        // owns the interior span and the layers the flanks
        let (lisa_lo, lisa_hi) = if ly == 0.0 && j >= span_lo_y && j <= span_hi_y {
            (span_lo, span_hi)
        } else {
            (1, 0)
        };
        for i in 1..lisa_lo {
            row[i] = layer_node(i, psi_row);
        }
        if lisa_lo <= lisa_hi {
            let crow = (j - 1) * (n_x - 1);
            match (scale, source) {
                (Some(scale), Some(s)) => {
                    let srow = &s.spatial[base..base + nx1];
                    for i in lisa_lo..=lisa_hi {
                        row[i] = crate::kernel::lisa_node(
                            coeffs,
                            crow + i - 1,
                            i,
                            t2h2,
                            south,
                            mid,
                            north,
                            up,
                        ) + scale * srow[i];
                    }
                }
                _ => {
                    for i in lisa_lo..=lisa_hi {
                        row[i] = crate::kernel::lisa_node(
                            coeffs,
                            crow + i - 1,
                            i,
                            t2h2,
                            south,
                            mid,
                            north,
                            up,
                        );
                    }
                }
            }
        }
        for i in (lisa_hi + 1).max(lisa_lo)..n_x {
            row[i] = layer_node(i, psi_row);
        }
    })
}
