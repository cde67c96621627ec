//! Analytic solutions, coefficient fields, and forcing terms used by the
//! verification experiments. All functions are pure.

use crate::grid::Grid;

const TENPI: f64 = 10.0 * std::f64::consts::PI;
const TWOPI: f64 = 2.0 * std::f64::consts::PI;

/// Closed-form standing-wave solution of `u_tt = laplacian(u)`:
/// `U = cos(10 pi x + 1) cos(10 pi y + 2) cos(10 pi sqrt(2) t + 3)`.
///
/// Also the reference solution for the variable-speed forced run below.
pub fn manufactured_solution(x: f64, y: f64, t: f64) -> f64 {
    (TENPI * x + 1.0).cos()
        * (TENPI * y + 2.0).cos()
        * (TENPI * std::f64::consts::SQRT_2 * t + 3.0).cos()
}

/// Smooth squared wave speed `c^2 = 1 + cos(2 pi x) cos(2 pi y) / 2`,
/// bounded in [1/2, 3/2].
pub fn cosine_speed_squared(x: f64, y: f64) -> f64 {
    1.0 + 0.5 * (TWOPI * x).cos() * (TWOPI * y).cos()
}

/// Forcing that makes [`manufactured_solution`] solve
/// `u_tt = c^2 laplacian(u) + f` with the speed field above:
/// `f = (10 pi)^2 cos(2 pi x) cos(2 pi y) U(x, y, t)`.
pub fn manufactured_source(x: f64, y: f64, t: f64) -> f64 {
    TENPI * TENPI * (TWOPI * x).cos() * (TWOPI * y).cos() * manufactured_solution(x, y, t)
}

/// Localized oscillating source `f = exp(-(x^2 + y^2) / 2) cos(t) / (2 pi)`.
pub fn gaussian_pulse(x: f64, y: f64, t: f64) -> f64 {
    (1.0 / TWOPI) * (-(x * x + y * y) / 2.0).exp() * t.cos()
}

/// A forcing term factored into a per-node spatial field and a scalar
/// function of time, so a step costs one multiply-add per node instead of a
/// transcendental evaluation.
#[derive(Debug, Clone)]
pub struct SeparableSource {
    /// Spatial factor on every node of the stepping grid.
    pub spatial: Vec<f64>,
    pub temporal: Temporal,
}

#[derive(Debug, Clone, Copy)]
pub enum Temporal {
    /// `cos(t)`, the pulse modulation.
    Cos,
    /// `cos(omega t + phase)`.
    CosPhase { omega: f64, phase: f64 },
}

impl SeparableSource {
    /// The pulse factored as `(exp(-r^2/2) / 2 pi) * cos(t)`, centered at
    /// `(cx, cy)`.
    pub fn pulse(grid: &Grid, cx: f64, cy: f64) -> SeparableSource {
        let spatial = sample_nodes(grid, |x, y| {
            let (dx, dy) = (x - cx, y - cy);
            (1.0 / TWOPI) * (-(dx * dx + dy * dy) / 2.0).exp()
        });
        SeparableSource { spatial, temporal: Temporal::Cos }
    }

    /// [`manufactured_source`] factored against its own time oscillation
    /// `cos(10 pi sqrt(2) t + 3)`.
    pub fn manufactured(grid: &Grid) -> SeparableSource {
        let spatial = sample_nodes(grid, |x, y| {
            TENPI
                * TENPI
                * (TWOPI * x).cos()
                * (TWOPI * y).cos()
                * (TENPI * x + 1.0).cos()
                * (TENPI * y + 2.0).cos()
        });
        SeparableSource {
            spatial,
            temporal: Temporal::CosPhase { omega: TENPI * std::f64::consts::SQRT_2, phase: 3.0 },
        }
    }

    /// Temporal factor at time `t`.
    pub fn amp(&self, t: f64) -> f64 {
        match self.temporal {
            Temporal::Cos => t.cos(),
            Temporal::CosPhase { omega, phase } => (omega * t + phase).cos(),
        }
    }
}

fn sample_nodes(grid: &Grid, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(grid.n_nodes());
    for j in 0..grid.nodes_y() {
        for i in 0..grid.nodes_x() {
            out.push(f(grid.x(i), grid.y(j)));
        }
    }
    out
}
