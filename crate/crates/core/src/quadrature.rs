//! Gauss-Legendre rules and Lagrange nodal bases on the reference element
//! (-1/2, 1/2).
//!
//! Physical cells `[x_{i-1/2}, x_{i+1/2}]` of width `h` map to the reference
//! element by `x = x_c + h * xi`, so derivatives in physical space are the
//! reference derivatives divided by `h`. That scaling is applied by the DG
//! kernels, never here.

use crate::error::{Result, SolverError};

const NEWTON_TOL: f64 = 1e-15;
const NEWTON_MAX_ITER: usize = 100;

/// Gauss-Legendre nodes and weights on (-1/2, 1/2). Weights sum to one.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    /// Polynomial degree `K` of the associated nodal space.
    pub fn order(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Legendre polynomial `P_n(x)` and its derivative on [-1, 1].
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let dp = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// `n_points`-point Gauss-Legendre rule mapped to (-1/2, 1/2), exact for
/// polynomials of degree `2 n_points - 1`.
pub fn gauss_legendre_rule(n_points: usize) -> Result<QuadratureRule> {
    if n_points == 0 {
        return Err(SolverError::InvalidArgument(
            "Gauss-Legendre rule needs at least one point".into(),
        ));
    }
    let n = n_points;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let half = n.div_ceil(2);
    for i in 0..half {
        // Chebyshev-like initial guess for the i-th largest root.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..NEWTON_MAX_ITER {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < NEWTON_TOL {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d.is_finite() {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // Map [-1, 1] -> [-1/2, 1/2]; weights scale by 1/2.
        nodes[i] = -0.5 * x;
        nodes[n - 1 - i] = 0.5 * x;
        weights[i] = 0.5 * w;
        weights[n - 1 - i] = 0.5 * w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok(QuadratureRule { nodes, weights })
}

/// Lagrange basis through the quadrature nodes, with its differentiation
/// matrix and end-point traces.
#[derive(Clone, Debug)]
pub struct NodalBasis {
    pub rule: QuadratureRule,
    /// `diff[k'][k]` is d(phi_k)/d(xi) at node `k'` (reference coordinates).
    pub diff: Vec<Vec<f64>>,
    /// `phi_k(-1/2)`.
    pub left_trace: Vec<f64>,
    /// `phi_k(+1/2)`.
    pub right_trace: Vec<f64>,
}

impl NodalBasis {
    pub fn new(rule: QuadratureRule) -> Result<Self> {
        if rule.is_empty() || rule.nodes.len() != rule.weights.len() {
            return Err(SolverError::InvalidArgument(
                "quadrature rule must have matching, non-empty nodes and weights".into(),
            ));
        }
        let n = rule.len();
        let x = &rule.nodes;
        let mut diff = vec![vec![0.0; n]; n];
        // Barycentric weights give a stable closed form for the derivative
        // of each Lagrange polynomial at the nodes.
        let bary: Vec<f64> = (0..n)
            .map(|j| {
                1.0 / (0..n)
                    .filter(|&m| m != j)
                    .map(|m| x[j] - x[m])
                    .product::<f64>()
            })
            .collect();
        for i in 0..n {
            let mut diag = 0.0;
            for j in 0..n {
                if i != j {
                    let v = bary[j] / bary[i] / (x[i] - x[j]);
                    diff[i][j] = v;
                    diag -= v;
                }
            }
            diff[i][i] = diag;
        }
        let left_trace = (0..n).map(|k| lagrange(x, k, -0.5)).collect();
        let right_trace = (0..n).map(|k| lagrange(x, k, 0.5)).collect();
        Ok(Self {
            rule,
            diff,
            left_trace,
            right_trace,
        })
    }

    /// Degree-`k` Gauss basis, the usual entry point.
    pub fn gauss(order: usize) -> Result<Self> {
        Self::new(gauss_legendre_rule(order + 1)?)
    }

    pub fn n_nodes(&self) -> usize {
        self.rule.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.rule.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.rule.weights
    }

    /// Values `phi_k(xi)` for all `k`.
    pub fn eval_basis(&self, xi: f64) -> Vec<f64> {
        (0..self.n_nodes())
            .map(|k| lagrange(&self.rule.nodes, k, xi))
            .collect()
    }

    /// Evaluate the interpolant of `values` at reference point `xi`.
    pub fn interpolate(&self, values: &[f64], xi: f64) -> f64 {
        values
            .iter()
            .enumerate()
            .map(|(k, v)| v * lagrange(&self.rule.nodes, k, xi))
            .sum()
    }
}

/// Build the nodal basis for a given rule.
pub fn build_nodal_basis(rule: QuadratureRule) -> Result<NodalBasis> {
    NodalBasis::new(rule)
}

fn lagrange(nodes: &[f64], k: usize, xi: f64) -> f64 {
    nodes
        .iter()
        .enumerate()
        .filter(|&(m, _)| m != k)
        .map(|(_, &xm)| (xi - xm) / (nodes[k] - xm))
        .product()
}
