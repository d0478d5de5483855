//! Time stepping. One stage loop serves all regimes: each cell follows the
//! Euler, Navier-Stokes or kinetic update according to its label, and the
//! pure solvers are the same loop with uniform labels.
//!
//! Macroscopic stage values are explicit,
//! `U(l) = U^n + dt sum_{j<l} at_lj (-F_h + D_h)(j)`, and the perturbation
//! solves `eps g = R + dt a_ll (-g + s2)` pointwise.

use rayon::prelude::*;

use crate::dg::field::{DgField, KineticField, ScalarField, StateField};
use crate::dg::kinetic::{source2_into, transport_cell_raw, upwind_face_values};
use crate::dg::limiter::tvb_limit_masked;
use crate::dg::mesh::Mesh1D;
use crate::dg::ops::{
    central_derivative_once, euler_rhs_unchecked, pairs_from_traces, reflect_flux_moments,
    validate_states, weak_div_cell, Parity,
};
use crate::dg::field::kinetic_trace_into;
use crate::error::{Result, SolverError};
use crate::imex::TableauF64;
use crate::quadrature::NodalBasis;
use crate::regime::Regime;
use crate::state::{transport_coefficients, wave_speed, ConservedState};
use crate::velocity::{flux_moments_unchecked, maxwellian_into, Projector, VelocityGrid};

/// Mesh, basis and velocity grid of a run.
#[derive(Clone, Debug)]
pub struct Discretization {
    pub mesh: Mesh1D,
    pub basis: NodalBasis,
    pub grid: VelocityGrid,
}

/// Where kinetic cells are limited. Fluid cells are always limited after
/// every stage.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LimiterPlacement {
    StepEnd,
    EveryStage,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepConfig {
    /// TVB constant; `None` disables the limiter.
    pub m_tvb: Option<f64>,
    pub kinetic_limiter: LimiterPlacement,
    pub parallel: bool,
}

impl Default for StepConfig {
    fn default() -> Self {
        Self {
            m_tvb: Some(1.0),
            kinetic_limiter: LimiterPlacement::EveryStage,
            parallel: false,
        }
    }
}

/// Stage storage `U(l)`, `g(l)`, `r(l)` and the stage right-hand sides.
#[derive(Clone, Debug)]
pub struct SolverWorkspace {
    u: Vec<StateField>,
    g: Vec<KineticField>,
    r: Vec<ScalarField>,
    fu: Vec<StateField>,
    tg: Vec<KineticField>,
    ig: Vec<KineticField>,
}

impl SolverWorkspace {
    pub fn new(stages: usize, n_cells: usize, nodes: usize, nv: usize) -> Self {
        Self {
            u: vec![DgField::zeros(n_cells, nodes); stages],
            g: vec![KineticField::zeros(n_cells, nodes, nv); stages],
            r: vec![DgField::zeros(n_cells, nodes); stages],
            fu: vec![DgField::zeros(n_cells, nodes); stages],
            tg: vec![KineticField::zeros(n_cells, nodes, nv); stages],
            ig: vec![KineticField::zeros(n_cells, nodes, nv); stages],
        }
    }

    fn fits(&self, stages: usize, g: &KineticField) -> bool {
        self.u.len() == stages && self.g.first().is_some_and(|x| x.same_shape(g))
    }

    /// Temperature gradient of the last stage of the latest step.
    pub fn last_temperature_gradient(&self) -> Option<&ScalarField> {
        self.r.last()
    }
}

/// `dt = cfl h_max / max(Lambda, v_cut)`.
pub fn cfl_dt(states: &StateField, mesh: &Mesh1D, v_cut: f64, cfl: f64) -> Result<f64> {
    if !(cfl > 0.0) {
        return Err(SolverError::InvalidArgument(format!("cfl must be positive, got {cfl}")));
    }
    let lam = crate::state::max_wave_speed(&states.data)?;
    let speed = lam.max(v_cut);
    if !(speed > 0.0) {
        return Err(SolverError::InvalidArgument("zero signal speed".into()));
    }
    Ok(cfl * mesh.max_width() / speed)
}

/// Pointwise relaxation solve `g = (acc + dt a_ll s2) / (eps + dt a_ll)`;
/// `acc` already contains `eps g^n` and the explicit history.
pub fn implicit_g_stage_solve(acc: &[f64], eps: f64, a_ll: f64, dt: f64, s2: &[f64]) -> Result<Vec<f64>> {
    if acc.len() != s2.len() {
        return Err(SolverError::ShapeMismatch("accumulated and s2 slices differ".into()));
    }
    if !(a_ll >= 0.0) || !(eps >= 0.0) || !(dt > 0.0) {
        return Err(SolverError::InvalidArgument(format!(
            "implicit solve needs a_ll >= 0, eps >= 0, dt > 0 (got {a_ll}, {eps}, {dt})"
        )));
    }
    let den = eps + dt * a_ll;
    if den == 0.0 {
        return Err(SolverError::InvalidArgument(
            "implicit solve with eps = 0 and a_ll = 0 is undefined".into(),
        ));
    }
    Ok(acc.iter().zip(s2).map(|(&r, &s)| (r + dt * a_ll * s) / den).collect())
}

fn check_step_inputs(
    u: &StateField,
    g: &KineticField,
    labels: &[Regime],
    disc: &Discretization,
    tab: &TableauF64,
    dt: f64,
) -> Result<()> {
    let n = disc.mesh.n_cells();
    let k = disc.basis.n_nodes();
    if u.n_cells() != n || u.nodes_per_cell() != k || labels.len() != n {
        return Err(SolverError::ShapeMismatch(format!(
            "U has {} cells, labels {}, mesh {}",
            u.n_cells(),
            labels.len(),
            n
        )));
    }
    if g.n_cells() != n || g.nodes_per_cell() != k || g.n_velocities() != disc.grid.len() {
        return Err(SolverError::ShapeMismatch("g does not match the discretization".into()));
    }
    if !(dt > 0.0) {
        return Err(SolverError::InvalidArgument(format!("dt must be positive, got {dt}")));
    }
    if !tab.stiffly_accurate {
        return Err(SolverError::InvalidConfig(
            "the stage loop requires a globally stiffly accurate tableau".into(),
        ));
    }
    Ok(())
}

fn for_each_block<F>(parallel: bool, data: &mut [f64], stride: usize, f: F)
where
    F: Fn(usize, &mut [f64]) + Sync + Send,
{
    if parallel {
        data.par_chunks_mut(stride).enumerate().for_each(|(i, c)| f(i, c));
    } else {
        data.chunks_mut(stride).enumerate().for_each(|(i, c)| f(i, c));
    }
}

fn for_each_block_pair<F>(parallel: bool, a: &mut [f64], b: &mut [f64], stride: usize, f: F)
where
    F: Fn(usize, &mut [f64], &mut [f64]) + Sync + Send,
{
    if parallel {
        a.par_chunks_mut(stride)
            .zip(b.par_chunks_mut(stride))
            .enumerate()
            .for_each(|(i, (x, y))| f(i, x, y));
    } else {
        a.chunks_mut(stride)
            .zip(b.chunks_mut(stride))
            .enumerate()
            .for_each(|(i, (x, y))| f(i, x, y));
    }
}

fn add_scaled(dst: &mut StateField, s: f64, src: &StateField) {
    for (d, &x) in dst.data.iter_mut().zip(&src.data) {
        *d = *d + x * s;
    }
}

/// Nodal NS flux moments `(0, 0, -kappa r)`.
#[inline]
fn ns_moment(s: &ConservedState, r: f64) -> ConservedState {
    let (kappa, _) = transport_coefficients(&s.primitive_unchecked());
    ConservedState::new(0.0, 0.0, -kappa * r)
}

/// Adds the micro coupling `-D_h` of every cell to `out`.
#[allow(clippy::too_many_arguments)]
fn add_coupling(
    u: &StateField,
    g: &KineticField,
    r: &ScalarField,
    labels: &[Regime],
    disc: &Discretization,
    out: &mut StateField,
) {
    let mesh = &disc.mesh;
    let basis = &disc.basis;
    let n = mesh.n_cells();
    let k = basis.n_nodes();
    // nodal flux moments as seen by the traces
    let w = DgField::from_fn(n, k, |i, node| match labels[i] {
        Regime::Kinetic => flux_moments_unchecked(g.slice(i, node), &disc.grid),
        _ => ns_moment(&u.cell(i)[node], r.cell(i)[node]),
    });
    let lefts: Vec<_> = (0..n).map(|i| w.left_trace(i, basis)).collect();
    let rights: Vec<_> = (0..n).map(|i| w.right_trace(i, basis)).collect();
    let pairs = pairs_from_traces(&lefts, &rights, mesh.boundary, reflect_flux_moments);
    let label_pairs = pairs_from_traces(labels, labels, mesh.boundary, |l| l);
    let face: Vec<ConservedState> = pairs
        .iter()
        .zip(&label_pairs)
        .enumerate()
        .map(|(f, ((a, b), (la, lb)))| {
            if *la == Regime::Euler && *lb == Regime::Euler {
                ConservedState::ZERO
            } else {
                (*a + *b) * (0.5 * mesh.eps_face(f))
            }
        })
        .collect();
    let mut nodal = vec![ConservedState::ZERO; k];
    let mut cell_out = vec![ConservedState::ZERO; k];
    for i in 0..n {
        if labels[i] == Regime::Euler && face[i] == ConservedState::ZERO && face[i + 1] == ConservedState::ZERO {
            continue;
        }
        let eps = mesh.eps_nodes(i);
        for node in 0..k {
            nodal[node] = if labels[i] == Regime::Euler {
                ConservedState::ZERO
            } else {
                w.cell(i)[node] * eps[node]
            };
        }
        weak_div_cell(&nodal, face[i], face[i + 1], basis, mesh.width(i), &mut cell_out);
        for (o, &x) in out.cell_mut(i).iter_mut().zip(&cell_out) {
            *o = *o + x;
        }
    }
}

/// Upwind transport `-(I - Pi_M)(v (eps g)_x)` on kinetic cells. Fluid
/// neighbors contribute recovered traces.
fn kinetic_transport(
    u: &StateField,
    g: &KineticField,
    r: &ScalarField,
    labels: &[Regime],
    disc: &Discretization,
    parallel: bool,
    out: &mut KineticField,
) {
    let mesh = &disc.mesh;
    let basis = &disc.basis;
    let grid = &disc.grid;
    let n = mesh.n_cells();
    let nv = grid.len();
    let needs_trace: Vec<bool> = (0..n)
        .map(|i| {
            if labels[i] == Regime::Kinetic {
                return true;
            }
            let (l, rn) = mesh.neighbors(i);
            l.is_some_and(|j| labels[j] == Regime::Kinetic) || rn.is_some_and(|j| labels[j] == Regime::Kinetic)
        })
        .collect();
    let mut lefts = vec![0.0; n * nv];
    let mut rights = vec![0.0; n * nv];
    let mut block = vec![0.0; basis.n_nodes() * nv];
    let mut m = vec![0.0; nv];
    for i in 0..n {
        if !needs_trace[i] {
            continue;
        }
        let src: &[f64] = if labels[i] == Regime::Kinetic {
            g.cell(i)
        } else {
            crate::regime::recover_cell(u, r, i, grid, &mut m, &mut block);
            &block
        };
        kinetic_trace_into(src, &basis.left_trace, nv, &mut lefts[i * nv..(i + 1) * nv]);
        kinetic_trace_into(src, &basis.right_trace, nv, &mut rights[i * nv..(i + 1) * nv]);
    }
    let faces = upwind_face_values(&lefts, &rights, mesh.boundary, grid);
    let stride = out.cell_stride();
    for_each_block(parallel, &mut out.data, stride, |i, dst| {
        if labels[i] != Regime::Kinetic {
            return;
        }
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
            dst,
        );
        let mut m = vec![0.0; nv];
        for (node, s) in u.cell(i).iter().enumerate() {
            let prim = s.primitive_unchecked();
            maxwellian_into(&prim, grid, &mut m);
            Projector::new(&prim, &m, grid).complement_in_place(&mut dst[node * nv..(node + 1) * nv], &m, grid);
        }
    });
}

fn temperature_gradient_unchecked(u: &StateField, disc: &Discretization) -> ScalarField {
    let t = u.map(|s| s.primitive_unchecked().temp);
    central_derivative_once(&t, &disc.mesh, &disc.basis, Parity::Even)
}

fn limit(u: &mut StateField, labels: &[Regime], disc: &Discretization, cfg: &StepConfig, stage: bool) {
    let Some(m_tvb) = cfg.m_tvb else { return };
    let mask: Vec<bool> = labels
        .iter()
        .map(|&l| match (l, stage, cfg.kinetic_limiter) {
            (Regime::Kinetic, true, LimiterPlacement::StepEnd) => false,
            (Regime::Kinetic, false, LimiterPlacement::EveryStage) => false,
            (Regime::Kinetic, _, _) => true,
            (_, true, _) => true,
            (_, false, _) => false,
        })
        .collect();
    if mask.iter().any(|&b| b) {
        tvb_limit_masked(u, &disc.mesh, &disc.basis, m_tvb, &mask);
    }
}

/// Advances `(U, g)` by one step. `g` is read and written on kinetic cells
/// only. Returns the temperature gradient of the new state.
#[allow(clippy::too_many_arguments)]
pub fn hybrid_step(
    u: &mut StateField,
    g: &mut KineticField,
    labels: &[Regime],
    disc: &Discretization,
    tab: &TableauF64,
    dt: f64,
    cfg: &StepConfig,
    ws: &mut SolverWorkspace,
) -> Result<()> {
    check_step_inputs(u, g, labels, disc, tab, dt)?;
    validate_states(u)?;
    let s = tab.stages;
    if !ws.fits(s, g) {
        *ws = SolverWorkspace::new(s, u.n_cells(), u.nodes_per_cell(), g.n_velocities());
    }
    let mesh = &disc.mesh;
    let grid = &disc.grid;
    let nv = grid.len();
    let nodes = disc.basis.n_nodes();
    let stride = g.cell_stride();
    let any_kinetic = labels.contains(&Regime::Kinetic);
    let any_coupling = labels.iter().any(|&l| l != Regime::Euler);
    let implicit_history_used = |l: usize| (l + 1..s).any(|m| tab.a_imp[m][l] != 0.0);

    for l in 0..s {
        // macroscopic stage value
        let mut ul = u.clone();
        if l > 0 {
            for j in 0..l {
                let c = dt * tab.a_exp[l][j];
                if c != 0.0 {
                    add_scaled(&mut ul, c, &ws.fu[j]);
                }
            }
            limit(&mut ul, labels, disc, cfg, true);
            validate_states(&ul)?;
        }
        ws.r[l] = temperature_gradient_unchecked(&ul, disc);
        ws.u[l] = ul;

        // microscopic stage value on kinetic cells
        if any_kinetic {
            let a_ll = tab.a_imp[l][l];
            let keep_ig = implicit_history_used(l);
            let (g_prev, g_rest) = ws.g.split_at_mut(l);
            let g_cur = &mut g_rest[0];
            let (ig_prev, ig_rest) = ws.ig.split_at_mut(l);
            let ig_cur = &mut ig_rest[0];
            let _ = g_prev;
            let tg = &ws.tg;
            let ul = &ws.u[l];
            let rl = &ws.r[l];
            let gn = &*g;
            let a_exp = &tab.a_exp[l];
            let a_imp = &tab.a_imp[l];
            let parallel = cfg.parallel;
            for_each_block_pair(parallel, &mut g_cur.data, &mut ig_cur.data, stride, |i, gb, igb| {
                if labels[i] != Regime::Kinetic {
                    return;
                }
                let mut m = vec![0.0; nv];
                let mut s2 = vec![0.0; nv];
                let eps_nodes = mesh.eps_nodes(i);
                for node in 0..nodes {
                    let range = node * nv..(node + 1) * nv;
                    let need_s2 = l > 0 || keep_ig;
                    if need_s2 {
                        let prim = ul.cell(i)[node].primitive_unchecked();
                        maxwellian_into(&prim, grid, &mut m);
                        source2_into(&prim, rl.cell(i)[node], &m, grid, &mut s2);
                    }
                    let dst = &mut gb[range.clone()];
                    if l == 0 {
                        dst.copy_from_slice(gn.slice(i, node));
                    } else {
                        let eps = eps_nodes[node];
                        let off = i * stride + node * nv;
                        for (jv, x) in dst.iter_mut().enumerate() {
                            *x = eps * gn.data[off + jv];
                        }
                        for j in 0..l {
                            let ce = dt * a_exp[j];
                            let ci = dt * a_imp[j];
                            if ce != 0.0 {
                                let t = &tg[j].data[off..off + nv];
                                for (x, &y) in dst.iter_mut().zip(t) {
                                    *x += ce * y;
                                }
                            }
                            if ci != 0.0 {
                                let t = &ig_prev[j].data[off..off + nv];
                                for (x, &y) in dst.iter_mut().zip(t) {
                                    *x += ci * y;
                                }
                            }
                        }
                        let c = dt * a_ll;
                        let inv = 1.0 / (eps + c);
                        for (x, &y) in dst.iter_mut().zip(&s2) {
                            *x = (*x + c * y) * inv;
                        }
                    }
                    if keep_ig {
                        for ((o, &x), &y) in igb[range.clone()].iter_mut().zip(&gb[range.clone()]).zip(&s2) {
                            *o = y - x;
                        }
                    }
                }
            });
        }

        // stage right-hand sides, needed by later stages only
        if l + 1 < s {
            let ul = &ws.u[l];
            let lam = ul.data.iter().map(|x| wave_speed(&x.primitive_unchecked())).fold(0.0, f64::max);
            let mut fu = std::mem::replace(&mut ws.fu[l], DgField::zeros(0, 1));
            if fu.data.len() != ul.data.len() {
                fu = DgField::zeros(ul.n_cells(), nodes);
            }
            euler_rhs_unchecked(ul, mesh, &disc.basis, lam, &mut fu);
            if any_coupling {
                add_coupling(ul, &ws.g[l], &ws.r[l], labels, disc, &mut fu);
            }
            ws.fu[l] = fu;
            if any_kinetic {
                let mut tg = std::mem::replace(&mut ws.tg[l], KineticField::zeros(0, 1, 1));
                kinetic_transport(ul, &ws.g[l], &ws.r[l], labels, disc, cfg.parallel, &mut tg);
                ws.tg[l] = tg;
            }
        }
    }

    // globally stiffly accurate: the update is the last stage
    u.data.copy_from_slice(&ws.u[s - 1].data);
    if any_kinetic {
        let last = &ws.g[s - 1];
        for i in 0..labels.len() {
            if labels[i] == Regime::Kinetic {
                g.cell_mut(i).copy_from_slice(last.cell(i));
            }
        }
    }
    limit(u, labels, disc, cfg, false);
    validate_states(u)
}

fn fluid_disc(mesh: &Mesh1D, basis: &NodalBasis) -> Result<Discretization> {
    Ok(Discretization {
        mesh: mesh.clone(),
        basis: basis.clone(),
        grid: VelocityGrid::new(1.0, 1)?,
    })
}

/// Explicit RK-DG step of the Euler equations.
pub fn euler_rk_step(
    u: &StateField,
    mesh: &Mesh1D,
    basis: &NodalBasis,
    tab: &TableauF64,
    dt: f64,
    cfg: &StepConfig,
) -> Result<StateField> {
    let disc = fluid_disc(mesh, basis)?;
    let mut out = u.clone();
    let mut g = KineticField::zeros(mesh.n_cells(), basis.n_nodes(), 1);
    let labels = vec![Regime::Euler; mesh.n_cells()];
    let mut ws = SolverWorkspace::new(tab.stages, mesh.n_cells(), basis.n_nodes(), 1);
    hybrid_step(&mut out, &mut g, &labels, &disc, tab, dt, cfg, &mut ws)?;
    Ok(out)
}

/// Explicit RK-LDG step of the 1D Navier-Stokes system with heat conduction
/// `eps (kappa T_x)_x`; the Knudsen number comes from the mesh.
pub fn ns_ldg_step(
    u: &StateField,
    mesh: &Mesh1D,
    basis: &NodalBasis,
    tab: &TableauF64,
    dt: f64,
    cfg: &StepConfig,
) -> Result<StateField> {
    let disc = fluid_disc(mesh, basis)?;
    let mut out = u.clone();
    let mut g = KineticField::zeros(mesh.n_cells(), basis.n_nodes(), 1);
    let labels = vec![Regime::NavierStokes; mesh.n_cells()];
    let mut ws = SolverWorkspace::new(tab.stages, mesh.n_cells(), basis.n_nodes(), 1);
    hybrid_step(&mut out, &mut g, &labels, &disc, tab, dt, cfg, &mut ws)?;
    Ok(out)
}

/// NDG-IMEX step of the micro-macro system on every cell.
pub fn kinetic_imex_step(
    u: &StateField,
    g: &KineticField,
    disc: &Discretization,
    tab: &TableauF64,
    dt: f64,
    cfg: &StepConfig,
) -> Result<(StateField, KineticField)> {
    let mut out_u = u.clone();
    let mut out_g = g.clone();
    let labels = vec![Regime::Kinetic; disc.mesh.n_cells()];
    let mut ws = SolverWorkspace::new(tab.stages, disc.mesh.n_cells(), disc.basis.n_nodes(), disc.grid.len());
    hybrid_step(&mut out_u, &mut out_g, &labels, disc, tab, dt, cfg, &mut ws)?;
    Ok((out_u, out_g))
}
