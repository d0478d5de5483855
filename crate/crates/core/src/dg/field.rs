use std::ops::{Add, Mul, Sub};

use crate::quadrature::NodalBasis;
use crate::state::ConservedState;

/// Values that live at Gauss nodes and combine linearly.
pub trait NodalValue:
    Copy + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
}

impl NodalValue for f64 {}
impl NodalValue for ConservedState {}

/// Nodal coefficients of a piecewise polynomial, cell-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DgField<T> {
    nodes_per_cell: usize,
    pub data: Vec<T>,
}

pub type StateField = DgField<ConservedState>;
pub type ScalarField = DgField<f64>;

impl<T: NodalValue> DgField<T> {
    pub fn zeros(n_cells: usize, nodes_per_cell: usize) -> Self {
        Self {
            nodes_per_cell,
            data: vec![T::default(); n_cells * nodes_per_cell],
        }
    }

    pub fn from_vec(nodes_per_cell: usize, data: Vec<T>) -> Self {
        assert!(nodes_per_cell > 0 && data.len().is_multiple_of(nodes_per_cell));
        Self {
            nodes_per_cell,
            data,
        }
    }

    pub fn from_fn(n_cells: usize, nodes_per_cell: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(n_cells * nodes_per_cell);
        for i in 0..n_cells {
            for k in 0..nodes_per_cell {
                data.push(f(i, k));
            }
        }
        Self {
            nodes_per_cell,
            data,
        }
    }

    pub fn n_cells(&self) -> usize {
        self.data.len() / self.nodes_per_cell
    }

    pub fn nodes_per_cell(&self) -> usize {
        self.nodes_per_cell
    }

    #[inline]
    pub fn cell(&self, i: usize) -> &[T] {
        &self.data[i * self.nodes_per_cell..(i + 1) * self.nodes_per_cell]
    }

    #[inline]
    pub fn cell_mut(&mut self, i: usize) -> &mut [T] {
        let n = self.nodes_per_cell;
        &mut self.data[i * n..(i + 1) * n]
    }

    pub fn cell_average(&self, i: usize, basis: &NodalBasis) -> T {
        weighted_sum(self.cell(i), basis.weights())
    }

    pub fn left_trace(&self, i: usize, basis: &NodalBasis) -> T {
        weighted_sum(self.cell(i), &basis.left_trace)
    }

    pub fn right_trace(&self, i: usize, basis: &NodalBasis) -> T {
        weighted_sum(self.cell(i), &basis.right_trace)
    }

    /// `self + other * s`, node by node.
    pub fn axpy(&self, s: f64, other: &Self) -> Self {
        Self {
            nodes_per_cell: self.nodes_per_cell,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| a + b * s)
                .collect(),
        }
    }

    pub fn map<U: NodalValue>(&self, f: impl Fn(T) -> U) -> DgField<U> {
        DgField {
            nodes_per_cell: self.nodes_per_cell,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }
}

impl DgField<f64> {
    /// Interpolant of cell `i` at reference coordinate `xi`.
    pub fn eval(&self, i: usize, xi: f64, basis: &NodalBasis) -> f64 {
        basis.interpolate(self.cell(i), xi)
    }
}

#[inline]
pub(crate) fn weighted_sum<T: NodalValue>(values: &[T], weights: &[f64]) -> T {
    let mut acc = T::default();
    for (&v, &w) in values.iter().zip(weights) {
        acc = acc + v * w;
    }
    acc
}

/// Microscopic perturbation `g` at every Gauss node and velocity point,
/// laid out `[cell][node][velocity]`.
#[derive(Clone, Debug, PartialEq)]
pub struct KineticField {
    n_cells: usize,
    nodes_per_cell: usize,
    n_velocities: usize,
    pub data: Vec<f64>,
}

impl KineticField {
    pub fn zeros(n_cells: usize, nodes_per_cell: usize, n_velocities: usize) -> Self {
        Self {
            n_cells,
            nodes_per_cell,
            n_velocities,
            data: vec![0.0; n_cells * nodes_per_cell * n_velocities],
        }
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn nodes_per_cell(&self) -> usize {
        self.nodes_per_cell
    }

    pub fn n_velocities(&self) -> usize {
        self.n_velocities
    }

    #[inline]
    fn offset(&self, cell: usize, node: usize) -> usize {
        (cell * self.nodes_per_cell + node) * self.n_velocities
    }

    #[inline]
    pub fn slice(&self, cell: usize, node: usize) -> &[f64] {
        let o = self.offset(cell, node);
        &self.data[o..o + self.n_velocities]
    }

    #[inline]
    pub fn slice_mut(&mut self, cell: usize, node: usize) -> &mut [f64] {
        let o = self.offset(cell, node);
        let nv = self.n_velocities;
        &mut self.data[o..o + nv]
    }

    /// All nodes of one cell, contiguous.
    #[inline]
    pub fn cell(&self, cell: usize) -> &[f64] {
        let stride = self.nodes_per_cell * self.n_velocities;
        &self.data[cell * stride..(cell + 1) * stride]
    }

    #[inline]
    pub fn cell_mut(&mut self, cell: usize) -> &mut [f64] {
        let stride = self.nodes_per_cell * self.n_velocities;
        &mut self.data[cell * stride..(cell + 1) * stride]
    }

    pub fn cell_stride(&self) -> usize {
        self.nodes_per_cell * self.n_velocities
    }

    pub fn fill_cell(&mut self, cell: usize, value: f64) {
        self.cell_mut(cell).fill(value);
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |a, x| a.max(x.abs()))
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.n_cells == other.n_cells
            && self.nodes_per_cell == other.nodes_per_cell
            && self.n_velocities == other.n_velocities
    }
}

/// Trace `sum_k w_k g_k(v)` of one cell's kinetic block into `out`.
#[inline]
pub(crate) fn kinetic_trace_into(cell_block: &[f64], trace_weights: &[f64], nv: usize, out: &mut [f64]) {
    out.fill(0.0);
    for (k, &w) in trace_weights.iter().enumerate() {
        let g = &cell_block[k * nv..(k + 1) * nv];
        for (o, &x) in out.iter_mut().zip(g) {
            *o += w * x;
        }
    }
}
