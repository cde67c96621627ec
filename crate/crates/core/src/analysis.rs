//! Error norms, observed convergence orders, and the tabulated report the
//! convergence studies emit.

use crate::grid::Grid;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Norm {
    L2,
    LInf,
}

/// Sums `term(i)` for i in lo..hi by recursive halving. The reduction tree
/// depends only on the length, so results are reproducible and roundoff does
/// not accumulate linearly on large grids.
fn pairwise<F: Fn(usize) -> f64 + Copy>(lo: usize, hi: usize, term: F) -> f64 {
    if hi - lo <= 64 {
        let mut acc = 0.0;
        for i in lo..hi {
            acc += term(i);
        }
        acc
    } else {
        let mid = lo + (hi - lo) / 2;
        pairwise(lo, mid, term) + pairwise(mid, hi, term)
    }
}

/// Discrete L2 norm with the cell-area weight: `sqrt(h^2 sum u_k^2)`.
pub fn l2_norm(u: &[f64], h: f64) -> f64 {
    (h * h * pairwise(0, u.len(), |i| u[i] * u[i])).sqrt()
}

/// Maximum absolute value.
pub fn linf_norm(u: &[f64]) -> f64 {
    u.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Relative error `||num - exact|| / ||exact||` in the requested norm.
/// A zero reference norm leaves the ratio undefined and is rejected.
pub fn relative_error(num: &[f64], exact: &[f64], h: f64, norm: Norm) -> Result<f64> {
    if num.len() != exact.len() {
        return Err(Error::Dimension(format!(
            "fields hold {} and {} nodes",
            num.len(),
            exact.len()
        )));
    }
    let (diff, denom) = match norm {
        Norm::L2 => (
            (h * h * pairwise(0, num.len(), |i| {
                let d = num[i] - exact[i];
                d * d
            }))
            .sqrt(),
            l2_norm(exact, h),
        ),
        Norm::LInf => (
            num.iter().zip(exact).fold(0.0, |m: f64, (a, b)| m.max((a - b).abs())),
            linf_norm(exact),
        ),
    };
    if denom == 0.0 {
        return Err(Error::config(
            "relative error against a zero reference field is undefined",
        ));
    }
    Ok(diff / denom)
}

/// Observed order between successive refinements at a fixed mesh ratio of 2:
/// `log2(err_coarse / err_fine)`.
pub fn convergence_order(err_coarse: f64, err_fine: f64) -> f64 {
    (err_coarse / err_fine).log2()
}

/// Injects a fine-grid nodal field onto the coarse grid whose cells are
/// `ratio` times larger: coarse node (i, j) takes fine node (ratio i, ratio j).
/// Nodal restriction needs no interpolation because coarse nodes are a subset
/// of fine ones when resolutions divide evenly.
pub fn restrict_to_coarse(fine: &[f64], fine_grid: &Grid, ratio: usize) -> Result<Vec<f64>> {
    if ratio == 0 {
        return Err(Error::Dimension("restriction ratio must be positive".into()));
    }
    if fine.len() != fine_grid.n_nodes() {
        return Err(Error::Dimension(format!(
            "field holds {} nodes, grid has {}",
            fine.len(),
            fine_grid.n_nodes()
        )));
    }
    if fine_grid.n_x % ratio != 0 || fine_grid.n_y % ratio != 0 {
        return Err(Error::Dimension(format!(
            "grid of {} x {} cells does not coarsen by {}",
            fine_grid.n_x, fine_grid.n_y, ratio
        )));
    }
    let (cx, cy) = (fine_grid.n_x / ratio, fine_grid.n_y / ratio);
    let fx1 = fine_grid.nodes_x();
    let mut coarse = Vec::with_capacity((cx + 1) * (cy + 1));
    for j in 0..=cy {
        for i in 0..=cx {
            coarse.push(fine[(j * ratio) * fx1 + i * ratio]);
        }
    }
    Ok(coarse)
}

/// One refinement level of a convergence study.
#[derive(Debug, Clone, Copy)]
pub struct ErrorRow {
    pub n: usize,
    pub l2: f64,
    pub linf: f64,
    /// Orders against the previous (coarser) row; absent on the first row.
    pub l2_order: Option<f64>,
    pub linf_order: Option<f64>,
}

/// Refinement table with observed orders filled in between successive rows.
#[derive(Debug, Clone, Default)]
pub struct ErrorReport {
    pub rows: Vec<ErrorRow>,
}

impl ErrorReport {
    pub fn push(&mut self, n: usize, l2: f64, linf: f64) {
        let orders = self
            .rows
            .last()
            .map(|p| (convergence_order(p.l2, l2), convergence_order(p.linf, linf)));
        self.rows.push(ErrorRow {
            n,
            l2,
            linf,
            l2_order: orders.map(|o| o.0),
            linf_order: orders.map(|o| o.1),
        });
    }

    /// Header plus one line per refinement; order cells are empty where no
    /// coarser row exists.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("N,l2_err,l2_order,linf_err,linf_order\n");
        for row in &self.rows {
            let fmt = |o: Option<f64>| o.map(|v| v.to_string()).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                row.n,
                row.l2,
                fmt(row.l2_order),
                row.linf,
                fmt(row.linf_order)
            ));
        }
        out
    }
}
