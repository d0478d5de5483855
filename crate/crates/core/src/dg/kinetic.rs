//! Operators of the microscopic equation
//! `eps g_t = -(I - Pi_M)(v (eps g)_x) - g + s2`, `s2 = -(I - Pi_M)(v M_x)`.

use crate::error::{Result, SolverError};
use crate::quadrature::NodalBasis;
use crate::state::ConservedState;
use crate::velocity::{equilibrium_g_into, maxwellian_into, Projector, VelocityGrid};

use super::field::{kinetic_trace_into, KineticField, ScalarField, StateField};
use super::mesh::{Boundary, Mesh1D};
use super::ops::validate_states;

/// Left and right traces of every cell, each `n_cells * nv`, cell-major.
pub(crate) fn kinetic_traces(g: &KineticField, basis: &NodalBasis) -> (Vec<f64>, Vec<f64>) {
    let nv = g.n_velocities();
    let n = g.n_cells();
    let mut lefts = vec![0.0; n * nv];
    let mut rights = vec![0.0; n * nv];
    for i in 0..n {
        kinetic_trace_into(g.cell(i), &basis.left_trace, nv, &mut lefts[i * nv..(i + 1) * nv]);
        kinetic_trace_into(g.cell(i), &basis.right_trace, nv, &mut rights[i * nv..(i + 1) * nv]);
    }
    (lefts, rights)
}

/// Upwind trace at every face, `(n_cells + 1) * nv`. Velocities `v > 0` take
/// the minus (left) side. Reflective walls mirror the velocity index.
pub(crate) fn upwind_face_values(
    lefts: &[f64],
    rights: &[f64],
    boundary: Boundary,
    grid: &VelocityGrid,
) -> Vec<f64> {
    let nv = grid.len();
    let n = lefts.len() / nv;
    let mut out = vec![0.0; (n + 1) * nv];
    let trace = |buf: &[f64], i: usize, j: usize| buf[i * nv + j];
    for f in 0..=n {
        for j in 0..nv {
            let minus = if f > 0 {
                trace(rights, f - 1, j)
            } else {
                match boundary {
                    Boundary::Periodic => trace(rights, n - 1, j),
                    Boundary::Outflow => trace(lefts, 0, j),
                    Boundary::Reflective => trace(lefts, 0, grid.mirror(j)),
                }
            };
            let plus = if f < n {
                trace(lefts, f, j)
            } else {
                match boundary {
                    Boundary::Periodic => trace(lefts, 0, j),
                    Boundary::Outflow => trace(rights, n - 1, j),
                    Boundary::Reflective => trace(rights, n - 1, grid.mirror(j)),
                }
            };
            out[f * nv + j] = if grid.points[j] > 0.0 { minus } else { plus };
        }
    }
    out
}

/// Weak form of `-(v eps g)_x` on one cell, before projection. `block` is the
/// cell's `[node][v]` data and `face_l`, `face_r` the upwind traces.
#[allow(clippy::too_many_arguments)]
pub(crate) fn transport_cell_raw(
    block: &[f64],
    face_l: &[f64],
    face_r: &[f64],
    eps_nodes: &[f64],
    eps_l: f64,
    eps_r: f64,
    h: f64,
    basis: &NodalBasis,
    grid: &VelocityGrid,
    out: &mut [f64],
) {
    let nv = grid.len();
    let n = basis.n_nodes();
    let w = basis.weights();
    for k in 0..n {
        let o = &mut out[k * nv..(k + 1) * nv];
        o.fill(0.0);
        for kp in 0..n {
            let c = w[kp] * basis.diff[kp][k] * eps_nodes[kp];
            let g = &block[kp * nv..(kp + 1) * nv];
            for (x, &gj) in o.iter_mut().zip(g) {
                *x += c * gj;
            }
        }
        let cr = eps_r * basis.right_trace[k];
        let cl = eps_l * basis.left_trace[k];
        let inv = 1.0 / (w[k] * h);
        for j in 0..nv {
            o[j] = (o[j] - cr * face_r[j] + cl * face_l[j]) * grid.points[j] * inv;
        }
    }
}

/// `-(I - Pi_M)(v (eps g)_x)` at every node, upwind interface fluxes.
pub fn transport_rhs(
    g: &KineticField,
    states: &StateField,
    mesh: &Mesh1D,
    basis: &NodalBasis,
    grid: &VelocityGrid,
) -> Result<KineticField> {
    check_shapes(g, states, mesh, basis, grid)?;
    validate_states(states)?;
    let (lefts, rights) = kinetic_traces(g, basis);
    let faces = upwind_face_values(&lefts, &rights, mesh.boundary, grid);
    let nv = grid.len();
    let n = basis.n_nodes();
    let mut out = KineticField::zeros(mesh.n_cells(), n, nv);
    let mut m = vec![0.0; nv];
    for i in 0..mesh.n_cells() {
        transport_cell_raw(
            g.cell(i),
            &faces[i * nv..(i + 1) * nv],
            &faces[(i + 1) * nv..(i + 2) * nv],
            mesh.eps_nodes(i),
            mesh.eps_face(i),
            mesh.eps_face(i + 1),
            mesh.width(i),
            basis,
            grid,
            out.cell_mut(i),
        );
        for k in 0..n {
            let prim = states.cell(i)[k].primitive_unchecked();
            maxwellian_into(&prim, grid, &mut m);
            Projector::new(&prim, &m, grid).complement_in_place(out.slice_mut(i, k), &m, grid);
        }
    }
    Ok(out)
}

/// Stiff sources `(s1, s2) = (-g, -(I - Pi_M)(B(V) r / sqrt(T) M))` given the
/// nodal temperature gradient `r`.
pub fn relaxation_sources(
    g: &KineticField,
    states: &StateField,
    temp_x: &ScalarField,
    grid: &VelocityGrid,
) -> Result<(KineticField, KineticField)> {
    if states.data.len() != temp_x.data.len()
        || g.n_cells() * g.nodes_per_cell() != states.data.len()
        || g.n_velocities() != grid.len()
    {
        return Err(SolverError::ShapeMismatch(
            "relaxation sources: g, U and r must share the mesh".into(),
        ));
    }
    validate_states(states)?;
    let mut s1 = g.clone();
    for x in &mut s1.data {
        *x = -*x;
    }
    let mut s2 = KineticField::zeros(g.n_cells(), g.nodes_per_cell(), g.n_velocities());
    let mut m = vec![0.0; grid.len()];
    for i in 0..g.n_cells() {
        for k in 0..g.nodes_per_cell() {
            let idx = i * g.nodes_per_cell() + k;
            let prim = states.data[idx].primitive_unchecked();
            maxwellian_into(&prim, grid, &mut m);
            source2_into(&prim, temp_x.data[idx], &m, grid, s2.slice_mut(i, k));
        }
    }
    Ok((s1, s2))
}

/// `s2` at one node; the projection removes the quadrature residue of the
/// moments so that `g` stays exactly in the complement.
#[inline]
pub(crate) fn source2_into(
    prim: &crate::state::PrimitiveState,
    temp_x: f64,
    maxwellian: &[f64],
    grid: &VelocityGrid,
    out: &mut [f64],
) {
    equilibrium_g_into(prim, temp_x, maxwellian, grid, out);
    Projector::new(prim, maxwellian, grid).complement_in_place(out, maxwellian, grid);
}

fn check_shapes(
    g: &KineticField,
    states: &StateField,
    mesh: &Mesh1D,
    basis: &NodalBasis,
    grid: &VelocityGrid,
) -> Result<()> {
    let n = basis.n_nodes();
    if g.n_cells() != mesh.n_cells()
        || g.nodes_per_cell() != n
        || g.n_velocities() != grid.len()
        || states.n_cells() != mesh.n_cells()
        || states.nodes_per_cell() != n
    {
        return Err(SolverError::ShapeMismatch(format!(
            "g is {}x{}x{}, U is {}x{}, mesh has {} cells, basis {} nodes, grid {} points",
            g.n_cells(),
            g.nodes_per_cell(),
            g.n_velocities(),
            states.n_cells(),
            states.nodes_per_cell(),
            mesh.n_cells(),
            n,
            grid.len()
        )));
    }
    Ok(())
}

/// Uniform-in-space state convenience for tests and initial data.
pub fn uniform_states(n_cells: usize, nodes: usize, s: ConservedState) -> StateField {
    StateField::from_fn(n_cells, nodes, |_, _| s)
}
