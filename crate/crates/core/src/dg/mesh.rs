use std::fmt;

use crate::error::{Result, SolverError};
use crate::quadrature::NodalBasis;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Boundary {
    Periodic,
    /// Ghost traces copy the interior trace.
    Outflow,
    /// Mirror ghost: `u -> -u` for the macroscopic state and specular
    /// reflection `g(v) -> g(-v)` for kinetic traces.
    Reflective,
}

/// Spatial profile of the Knudsen number.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EpsProfile {
    Constant(f64),
    /// `eps0 + (tanh(1 - a0 x) + tanh(1 + a0 x)) / 2`.
    Tanh { eps0: f64, a0: f64 },
}

impl EpsProfile {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            EpsProfile::Constant(e) => e,
            EpsProfile::Tanh { eps0, a0 } => {
                eps0 + 0.5 * ((1.0 - a0 * x).tanh() + (1.0 + a0 * x).tanh())
            }
        }
    }
}

impl fmt::Display for EpsProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EpsProfile::Constant(e) => write!(f, "const:{e}"),
            EpsProfile::Tanh { eps0, a0 } => write!(f, "tanh:eps0={eps0},a0={a0}"),
        }
    }
}

/// Cell partition of `[a, b]` with the Knudsen number sampled at every Gauss
/// node and every interface.
#[derive(Clone, Debug)]
pub struct Mesh1D {
    pub edges: Vec<f64>,
    pub boundary: Boundary,
    pub eps: EpsProfile,
    nodes_per_cell: usize,
    node_x: Vec<f64>,
    eps_nodes: Vec<f64>,
    eps_faces: Vec<f64>,
    eps_centers: Vec<f64>,
}

impl Mesh1D {
    pub fn uniform(
        a: f64,
        b: f64,
        n_cells: usize,
        boundary: Boundary,
        basis: &NodalBasis,
        eps: EpsProfile,
    ) -> Result<Self> {
        if n_cells == 0 || !(b > a) {
            return Err(SolverError::InvalidArgument(format!(
                "mesh needs b > a and at least one cell (got [{a}, {b}], {n_cells})"
            )));
        }
        let h = (b - a) / n_cells as f64;
        let mut edges: Vec<f64> = (0..=n_cells).map(|i| a + i as f64 * h).collect();
        edges[n_cells] = b;
        Self::from_edges(edges, boundary, basis, eps)
    }

    pub fn from_edges(
        edges: Vec<f64>,
        boundary: Boundary,
        basis: &NodalBasis,
        eps: EpsProfile,
    ) -> Result<Self> {
        if edges.len() < 2 || edges.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(SolverError::InvalidArgument(
                "mesh edges must be strictly increasing".into(),
            ));
        }
        let n = basis.n_nodes();
        let n_cells = edges.len() - 1;
        let mut node_x = Vec::with_capacity(n_cells * n);
        let mut eps_centers = Vec::with_capacity(n_cells);
        for i in 0..n_cells {
            let c = 0.5 * (edges[i] + edges[i + 1]);
            let h = edges[i + 1] - edges[i];
            node_x.extend(basis.nodes().iter().map(|xi| c + h * xi));
            eps_centers.push(eps.eval(c));
        }
        let eps_nodes: Vec<f64> = node_x.iter().map(|&x| eps.eval(x)).collect();
        let eps_faces: Vec<f64> = edges.iter().map(|&x| eps.eval(x)).collect();
        if eps_nodes.iter().chain(&eps_faces).any(|&e| !(e >= 0.0)) {
            return Err(SolverError::InvalidArgument(
                "Knudsen number must be non-negative".into(),
            ));
        }
        Ok(Self {
            edges,
            boundary,
            eps,
            nodes_per_cell: n,
            node_x,
            eps_nodes,
            eps_faces,
            eps_centers,
        })
    }

    pub fn n_cells(&self) -> usize {
        self.edges.len() - 1
    }

    pub fn nodes_per_cell(&self) -> usize {
        self.nodes_per_cell
    }

    #[inline]
    pub fn width(&self, cell: usize) -> f64 {
        self.edges[cell + 1] - self.edges[cell]
    }

    pub fn center(&self, cell: usize) -> f64 {
        0.5 * (self.edges[cell] + self.edges[cell + 1])
    }

    pub fn max_width(&self) -> f64 {
        (0..self.n_cells()).map(|i| self.width(i)).fold(0.0, f64::max)
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.edges[0], self.edges[self.n_cells()])
    }

    /// Physical positions of all Gauss nodes, cell-major.
    pub fn node_positions(&self) -> &[f64] {
        &self.node_x
    }

    pub fn node_x(&self, cell: usize) -> &[f64] {
        &self.node_x[cell * self.nodes_per_cell..(cell + 1) * self.nodes_per_cell]
    }

    #[inline]
    pub fn eps_nodes(&self, cell: usize) -> &[f64] {
        &self.eps_nodes[cell * self.nodes_per_cell..(cell + 1) * self.nodes_per_cell]
    }

    pub fn eps_all_nodes(&self) -> &[f64] {
        &self.eps_nodes
    }

    /// Knudsen number at interface `face` (face `i` is the left edge of cell `i`).
    #[inline]
    pub fn eps_face(&self, face: usize) -> f64 {
        self.eps_faces[face]
    }

    pub fn eps_center(&self, cell: usize) -> f64 {
        self.eps_centers[cell]
    }

    /// Neighbor indices `(left, right)` honoring periodic wraparound.
    pub fn neighbors(&self, cell: usize) -> (Option<usize>, Option<usize>) {
        let n = self.n_cells();
        let periodic = self.boundary == Boundary::Periodic;
        let left = if cell > 0 {
            Some(cell - 1)
        } else if periodic {
            Some(n - 1)
        } else {
            None
        };
        let right = if cell + 1 < n {
            Some(cell + 1)
        } else if periodic {
            Some(0)
        } else {
            None
        };
        (left, right)
    }

    /// Cell containing `x` (clamped to the domain).
    pub fn locate(&self, x: f64) -> usize {
        let n = self.n_cells();
        match self.edges.binary_search_by(|e| e.partial_cmp(&x).unwrap()) {
            Ok(i) => i.min(n - 1),
            Err(i) => i.saturating_sub(1).min(n - 1),
        }
    }
}
