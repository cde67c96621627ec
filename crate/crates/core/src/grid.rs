//! Uniform grid geometry, cell-centered materials, and the precomputed
//! cross-point coefficients used by the heterogeneous update stencil.

use crate::{Error, Result};

/// Uniform rectangular grid with square cells.
///
/// Displacement lives on the `(n_x+1) x (n_y+1)` nodes; materials live in the
/// `n_x x n_y` cells. Node storage is row-major with constant-`y` rows:
/// index `j * (n_x + 1) + i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    /// Cell count along x.
    pub n_x: usize,
    /// Cell count along y.
    pub n_y: usize,
    /// Grid spacing, identical in both directions.
    pub h: f64,
    /// Coordinate of node (0, 0).
    pub x0: f64,
    pub y0: f64,
}

impl Grid {
    /// Builds the grid for `[x_min, x_max] x [y_min, y_max]` split into
    /// `n_x x n_y` cells. The cells must come out square.
    pub fn new(
        x_min: f64,
        x_max: f64,
        y_min: f64,
        y_max: f64,
        n_x: usize,
        n_y: usize,
    ) -> Result<Grid> {
        let mut problems = Vec::new();
        if !(x_max > x_min) {
            problems.push(format!("domain: x_max ({x_max}) must exceed x_min ({x_min})"));
        }
        if !(y_max > y_min) {
            problems.push(format!("domain: y_max ({y_max}) must exceed y_min ({y_min})"));
        }
        if n_x < 2 || n_y < 2 {
            problems.push(format!("domain: need n_x >= 2 and n_y >= 2, got {n_x} x {n_y}"));
        }
        if problems.is_empty() {
            let hx = (x_max - x_min) / n_x as f64;
            let hy = (y_max - y_min) / n_y as f64;
            if (hx - hy).abs() > 1e-12 * hx.max(hy) {
                problems.push(format!(
                    "domain: cells must be square, got h_x = {hx} and h_y = {hy}"
                ));
            } else {
                return Ok(Grid { n_x, n_y, h: hx, x0: x_min, y0: y_min });
            }
        }
        Err(Error::Config(problems))
    }

    pub fn nodes_x(&self) -> usize {
        self.n_x + 1
    }

    pub fn nodes_y(&self) -> usize {
        self.n_y + 1
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes_x() * self.nodes_y()
    }

    /// Flat index of node (i, j).
    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * (self.n_x + 1) + i
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.h
    }

    #[inline]
    pub fn y(&self, j: usize) -> f64 {
        self.y0 + j as f64 * self.h
    }

    /// Center coordinate of cell (cx, cy).
    #[inline]
    pub fn cell_center(&self, cx: usize, cy: usize) -> (f64, f64) {
        (self.x0 + (cx as f64 + 0.5) * self.h, self.y0 + (cy as f64 + 0.5) * self.h)
    }
}

/// Per-cell density and bulk modulus. The wave speed in a cell is
/// `sqrt(mu / rho)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MaterialField {
    pub n_x: usize,
    pub n_y: usize,
    /// Row-major over cells, index `cy * n_x + cx`.
    pub rho: Vec<f64>,
    pub mu: Vec<f64>,
}

impl MaterialField {
    /// Samples the coefficient functions at every cell center.
    pub fn sample(
        grid: &Grid,
        rho_fn: impl Fn(f64, f64) -> f64,
        mu_fn: impl Fn(f64, f64) -> f64,
    ) -> Result<MaterialField> {
        let (n_x, n_y) = (grid.n_x, grid.n_y);
        let mut rho = Vec::with_capacity(n_x * n_y);
        let mut mu = Vec::with_capacity(n_x * n_y);
        for cy in 0..n_y {
            for cx in 0..n_x {
                let (x, y) = grid.cell_center(cx, cy);
                rho.push(rho_fn(x, y));
                mu.push(mu_fn(x, y));
            }
        }
        let field = MaterialField { n_x, n_y, rho, mu };
        field.validate()?;
        Ok(field)
    }

    /// Constant material everywhere.
    pub fn uniform(grid: &Grid, rho: f64, mu: f64) -> Result<MaterialField> {
        MaterialField::sample(grid, |_, _| rho, |_, _| mu)
    }

    /// Two media split by the vertical line `x = interface_x`. Cells take the
    /// material of the side their center falls on.
    pub fn vertical_interface(
        grid: &Grid,
        interface_x: f64,
        left: (f64, f64),
        right: (f64, f64),
    ) -> Result<MaterialField> {
        MaterialField::sample(
            grid,
            |x, _| if x < interface_x { left.0 } else { right.0 },
            |x, _| if x < interface_x { left.1 } else { right.1 },
        )
    }

    #[inline]
    pub fn cell(&self, cx: usize, cy: usize) -> usize {
        cy * self.n_x + cx
    }

    /// Every cell must hold finite, strictly positive rho and mu.
    pub fn validate(&self) -> Result<()> {
        if self.rho.len() != self.n_x * self.n_y || self.mu.len() != self.n_x * self.n_y {
            return Err(Error::Dimension(format!(
                "material arrays must hold {} cells, got rho {} and mu {}",
                self.n_x * self.n_y,
                self.rho.len(),
                self.mu.len()
            )));
        }
        for cy in 0..self.n_y {
            for cx in 0..self.n_x {
                let k = self.cell(cx, cy);
                let (r, m) = (self.rho[k], self.mu[k]);
                if !(r.is_finite() && r > 0.0) {
                    return Err(Error::Material(format!(
                        "cell ({cx}, {cy}): density {r} is not positive and finite"
                    )));
                }
                if !(m.is_finite() && m > 0.0) {
                    return Err(Error::Material(format!(
                        "cell ({cx}, {cy}): modulus {m} is not positive and finite"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Largest wave speed over all cells, the conservative CFL input.
    pub fn max_speed(&self) -> f64 {
        self.rho
            .iter()
            .zip(&self.mu)
            .map(|(&r, &m)| (m / r).sqrt())
            .fold(0.0, f64::max)
    }
}

/// Precomputed stencil coefficients for every interior node.
///
/// At node (i, j) the four surrounding cells are labeled by quadrant:
/// medium 1 = (+x, +y) = cell (i, j), medium 2 = (-x, +y) = cell (i-1, j),
/// medium 3 = (-x, -y) = cell (i-1, j-1), medium 4 = (+x, -y) = cell (i, j-1).
/// Neighbor values u5..u8 sit at (+x), (+y), (-x), (-y).
///
/// alpha = (1/mu_1 + 1/mu_2 + 1/mu_3 + 1/mu_4) / 4,
/// beta_inv = 1/rho_1 + 1/rho_2 + 1/rho_3 + 1/rho_4, and each edge density is
/// the mean of its two adjacent quadrants: 1/rho_5 = (1/rho_1 + 1/rho_4)/2,
/// 1/rho_6 = (1/rho_1 + 1/rho_2)/2, 1/rho_7 = (1/rho_2 + 1/rho_3)/2,
/// 1/rho_8 = (1/rho_3 + 1/rho_4)/2.
#[derive(Debug, Clone)]
pub struct NodeCoefficients {
    /// Cell counts of the grid these coefficients were built for.
    pub n_x: usize,
    pub n_y: usize,
    /// All arrays run over interior nodes only, row-major, index
    /// `(j - 1) * (n_x - 1) + (i - 1)` for node (i, j).
    pub alpha: Vec<f64>,
    /// Cached reciprocal of alpha, the factor actually used per update.
    pub inv_alpha: Vec<f64>,
    pub beta_inv: Vec<f64>,
    pub inv_rho5: Vec<f64>,
    pub inv_rho6: Vec<f64>,
    pub inv_rho7: Vec<f64>,
    pub inv_rho8: Vec<f64>,
}

impl NodeCoefficients {
    pub fn build(materials: &MaterialField) -> Result<NodeCoefficients> {
        materials.validate()?;
        let (n_x, n_y) = (materials.n_x, materials.n_y);
        let count = (n_x - 1) * (n_y - 1);
        let mut c = NodeCoefficients {
            n_x,
            n_y,
            alpha: Vec::with_capacity(count),
            inv_alpha: Vec::with_capacity(count),
            beta_inv: Vec::with_capacity(count),
            inv_rho5: Vec::with_capacity(count),
            inv_rho6: Vec::with_capacity(count),
            inv_rho7: Vec::with_capacity(count),
            inv_rho8: Vec::with_capacity(count),
        };
        for j in 1..n_y {
            for i in 1..n_x {
                let m1 = materials.cell(i, j);
                let m2 = materials.cell(i - 1, j);
                let m3 = materials.cell(i - 1, j - 1);
                let m4 = materials.cell(i, j - 1);
                let (ir1, ir2, ir3, ir4) = (
                    1.0 / materials.rho[m1],
                    1.0 / materials.rho[m2],
                    1.0 / materials.rho[m3],
                    1.0 / materials.rho[m4],
                );
                let alpha = 0.25
                    * (1.0 / materials.mu[m1]
                        + 1.0 / materials.mu[m2]
                        + 1.0 / materials.mu[m3]
                        + 1.0 / materials.mu[m4]);
                c.alpha.push(alpha);
                c.inv_alpha.push(1.0 / alpha);
                c.beta_inv.push(ir1 + ir2 + ir3 + ir4);
                c.inv_rho5.push(0.5 * (ir1 + ir4));
                c.inv_rho6.push(0.5 * (ir1 + ir2));
                c.inv_rho7.push(0.5 * (ir2 + ir3));
                c.inv_rho8.push(0.5 * (ir3 + ir4));
            }
        }
        Ok(c)
    }

    /// Flat coefficient index of interior node (i, j).
    #[inline]
    pub fn node(&self, i: usize, j: usize) -> usize {
        (j - 1) * (self.n_x - 1) + (i - 1)
    }
}
