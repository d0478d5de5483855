use std::time::Instant;

use crate::dg::field::{KineticField, ScalarField, StateField};
use crate::dg::ops::{central_derivative_once, field_total, temperature_gradient, Parity};
use crate::error::{Result, SolverError};
use crate::imex::ars443;
use crate::regime::{
    classify, compute_diagnostics, compute_indicator_derivatives, recover_cell, HierarchyMode, Regime,
    RegimeMap,
};
use crate::solver::{cfl_dt, hybrid_step, Discretization, SolverWorkspace, StepConfig};
use crate::state::{heat_flux_fluid, ConservedState};
use crate::velocity::heat_flux_kinetic_unchecked;

use super::io::{write_frame, write_report, CellSteps, Drift, Frame, FrameMeta, FrameRow, RunReport, Timings};
use super::problem::{init_problem, ProblemConfig};

/// Everything a finished run leaves behind.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub report: RunReport,
    pub disc: Discretization,
    pub u: StateField,
    pub g: KineticField,
    pub regimes: RegimeMap,
    /// Labels used by every step, in order.
    pub label_history: Vec<Vec<Regime>>,
    pub final_frame: Frame,
}

fn totals(u: &StateField, disc: &Discretization) -> ConservedState {
    field_total(u, &disc.mesh, &disc.basis)
}

/// Frame rows for the current state; refreshes the map's diagnostics.
pub fn build_frame(
    cfg: &ProblemConfig,
    disc: &Discretization,
    u: &StateField,
    g: &KineticField,
    regimes: &mut RegimeMap,
    t: f64,
    step: usize,
) -> Result<Frame> {
    let r = temperature_gradient(u, &disc.mesh, &disc.basis)?;
    let derivs = compute_indicator_derivatives(u, &disc.mesh, &disc.basis)?;
    regimes.diagnostics = compute_diagnostics(u, g, &regimes.labels, &derivs, &r, &disc.mesh, &disc.basis, &disc.grid)?;
    let n = disc.basis.n_nodes();
    let mut rows = Vec::with_capacity(cfg.nx * n);
    for i in 0..cfg.nx {
        let d = regimes.diagnostics[i];
        let label = regimes.labels[i];
        for k in 0..n {
            let p = u.cell(i)[k].to_primitive()?;
            let eps = disc.mesh.eps_nodes(i)[k];
            let q = if label == Regime::Kinetic {
                heat_flux_kinetic_unchecked(g.slice(i, k), p.u, &disc.grid, eps)
            } else {
                heat_flux_fluid(&p, r.cell(i)[k], eps)
            };
            rows.push(FrameRow {
                x: disc.mesh.node_x(i)[k],
                rho: p.rho,
                u: p.u,
                temp: p.temp,
                q,
                regime: label,
                nu_ns: d.nu_ns,
                nu_b: d.nu_b,
            });
        }
    }
    Ok(Frame {
        meta: FrameMeta {
            t,
            step,
            mode: cfg.mode.to_string(),
            eps: cfg.eps.to_string(),
            problem: cfg.problem.to_string(),
            nx: cfg.nx,
            nv: cfg.nv,
            order: cfg.order,
        },
        rows,
    })
}

fn ldg_gradient(u: &StateField, disc: &Discretization) -> ScalarField {
    let t = u.map(|s| s.primitive_unchecked().temp);
    central_derivative_once(&t, &disc.mesh, &disc.basis, Parity::Even)
}

/// Reclassifies every cell and seeds newly kinetic cells with the recovered
/// perturbation.
fn reclassify(
    cfg: &ProblemConfig,
    disc: &Discretization,
    u: &StateField,
    g: &mut KineticField,
    regimes: &mut RegimeMap,
    step: usize,
) -> Result<()> {
    let r = ldg_gradient(u, disc);
    let derivs = compute_indicator_derivatives(u, &disc.mesh, &disc.basis)?;
    let diag = compute_diagnostics(u, g, &regimes.labels, &derivs, &r, &disc.mesh, &disc.basis, &disc.grid)?;
    let new = classify(&regimes.labels, &diag, cfg.mode, &cfg.thresholds, &disc.mesh);
    let mut scratch = vec![0.0; disc.grid.len()];
    for i in 0..new.len() {
        if new[i] != regimes.labels[i] {
            regimes.last_change[i] = step;
            if new[i] == Regime::Kinetic {
                recover_cell(u, &r, i, &disc.grid, &mut scratch, g.cell_mut(i));
            }
        }
    }
    regimes.labels = new;
    regimes.diagnostics = diag;
    Ok(())
}

fn frame_times(cfg: &ProblemConfig) -> Vec<f64> {
    let mut v: Vec<f64> = (1..=cfg.frames)
        .map(|j| cfg.t_final * j as f64 / cfg.frames as f64)
        .collect();
    if v.last() != Some(&cfg.t_final) {
        v.push(cfg.t_final);
    }
    v
}

fn emit(cfg: &ProblemConfig, frame: &Frame, index: usize) -> Result<()> {
    if let Some(dir) = &cfg.out_dir {
        write_frame(frame, &dir.join(format!("frame_{index:04}.dat")))?;
    }
    Ok(())
}

fn run_inner(cfg: &ProblemConfig) -> Result<RunOutcome> {
    let start = Instant::now();
    let (disc, mut u, mut g, mut regimes) = init_problem(cfg)?;
    if let Some(dir) = &cfg.out_dir {
        std::fs::create_dir_all(dir).map_err(|e| SolverError::Io {
            path: dir.clone(),
            source: e,
        })?;
    }
    let tab = ars443().to_f64();
    let step_cfg = StepConfig {
        m_tvb: cfg.m_tvb,
        kinetic_limiter: cfg.kinetic_limiter,
        parallel: cfg.threads > 0,
    };
    let mut ws = SolverWorkspace::new(tab.stages, cfg.nx, disc.basis.n_nodes(), disc.grid.len());
    let mut timings = Timings::default();
    let mut cell_steps = CellSteps::default();
    let mut histogram = Vec::new();
    let mut label_history = Vec::new();
    let initial = totals(&u, &disc);

    let mut frame_index = 0;
    if cfg.frames > 0 {
        let t0 = Instant::now();
        let f = build_frame(cfg, &disc, &u, &g, &mut regimes, 0.0, 0)?;
        emit(cfg, &f, frame_index)?;
        frame_index += 1;
        timings.output_seconds += t0.elapsed().as_secs_f64();
    }
    let targets = frame_times(cfg);
    let mut next_target = 0;
    let mut t = 0.0;
    let mut step = 0;
    let mut last_frame = None;
    while next_target < targets.len() {
        if cfg.mode.is_hierarchical() {
            let t0 = Instant::now();
            reclassify(cfg, &disc, &u, &mut g, &mut regimes, step)?;
            timings.classify_seconds += t0.elapsed().as_secs_f64();
        }
        let target = targets[next_target];
        let mut dt = cfl_dt(&u, &disc.mesh, cfg.v_cut, cfg.cfl)?;
        let mut hit = false;
        if t + dt >= target - 1e-12 * target.abs().max(1.0) {
            dt = target - t;
            hit = true;
        }
        let t0 = Instant::now();
        hybrid_step(&mut u, &mut g, &regimes.labels, &disc, &tab, dt, &step_cfg, &mut ws).map_err(|e| {
            SolverError::Step {
                step: step + 1,
                time: t,
                source: Box::new(e),
            }
        })?;
        timings.step_seconds += t0.elapsed().as_secs_f64();
        step += 1;
        t = if hit { target } else { t + dt };
        let h = regimes.histogram();
        cell_steps.euler += h[0] as u64;
        cell_steps.ns += h[1] as u64;
        cell_steps.kinetic += h[2] as u64;
        histogram.push(h);
        label_history.push(regimes.labels.clone());
        if hit {
            let is_last = next_target + 1 == targets.len();
            if cfg.frames > 0 || is_last {
                let t0 = Instant::now();
                let f = build_frame(cfg, &disc, &u, &g, &mut regimes, t, step)?;
                if cfg.frames > 0 {
                    emit(cfg, &f, frame_index)?;
                    frame_index += 1;
                }
                timings.output_seconds += t0.elapsed().as_secs_f64();
                last_frame = Some(f);
            }
            next_target += 1;
        }
    }
    let fin = totals(&u, &disc);
    let drift = Drift {
        mass: (fin.rho - initial.rho) / initial.rho,
        momentum: (fin.mom - initial.mom) / initial.rho,
        energy: (fin.energy - initial.energy) / initial.energy,
    };
    timings.total_seconds = start.elapsed().as_secs_f64();
    let report = RunReport {
        problem: cfg.problem.to_string(),
        mode: cfg.mode.to_string(),
        eps: cfg.eps.to_string(),
        nx: cfg.nx,
        nv: cfg.nv,
        t_final: cfg.t_final,
        steps: step,
        timings,
        cell_steps,
        drift,
        final_histogram: regimes.histogram(),
        histogram,
    };
    if let Some(dir) = &cfg.out_dir {
        write_report(&report, &dir.join("report.toml"))?;
    }
    Ok(RunOutcome {
        report,
        disc,
        u,
        g,
        regimes,
        label_history,
        final_frame: last_frame.expect("the loop always ends on the final target"),
    })
}

/// Runs one configuration to `t_final`.
pub fn run(cfg: &ProblemConfig) -> Result<RunOutcome> {
    if cfg.threads > 0 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build()
            .map_err(|e| SolverError::InvalidConfig(format!("thread pool: {e}")))?;
        pool.install(|| run_inner(cfg))
    } else {
        run_inner(cfg)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TimingRow {
    pub mode: HierarchyMode,
    pub seconds: f64,
    /// `1 - t_mode / t_full`
    pub savings: f64,
    pub final_histogram: [usize; 3],
}

/// Full-kinetic run followed by the three hierarchical modes on the same
/// configuration, sequentially. Frame output is switched off while timing.
pub fn timing_compare(base: &ProblemConfig) -> Result<Vec<TimingRow>> {
    let modes = [
        HierarchyMode::FullKinetic,
        HierarchyMode::EulerKinetic,
        HierarchyMode::NsKinetic,
        HierarchyMode::EulerNsKinetic,
    ];
    let mut rows = Vec::new();
    let mut full = 0.0;
    for mode in modes {
        let mut cfg = base.clone().with_mode(mode);
        cfg.frames = 0;
        cfg.out_dir = None;
        let out = run(&cfg)?;
        let secs = out.report.timings.total_seconds;
        if mode == HierarchyMode::FullKinetic {
            full = secs;
        }
        rows.push(TimingRow {
            mode,
            seconds: secs,
            savings: 1.0 - secs / full,
            final_histogram: out.report.final_histogram,
        });
    }
    Ok(rows)
}

/// Plain-text table of a comparison.
pub fn format_timing_table(rows: &[TimingRow]) -> String {
    let mut s = String::from("mode                seconds     savings   E    N    K\n");
    for r in rows {
        s.push_str(&format!(
            "{:<18} {:>9.3} {:>10.1}% {:>4} {:>4} {:>4}\n",
            r.mode.name(),
            r.seconds,
            100.0 * r.savings,
            r.final_histogram[0],
            r.final_histogram[1],
            r.final_histogram[2]
        ));
    }
    s
}
