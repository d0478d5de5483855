use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::dg::field::{DgField, KineticField, StateField};
use crate::dg::mesh::{Boundary, EpsProfile, Mesh1D};
use crate::error::{Result, SolverError};
use crate::quadrature::NodalBasis;
use crate::regime::{HierarchyMode, RegimeMap, Thresholds};
use crate::solver::{Discretization, LimiterPlacement};
use crate::state::ConservedState;
use crate::velocity::{maxwellian_into, Projector, VelocityGrid};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProblemId {
    Sod,
    Blast,
    Mixed,
    /// Smooth periodic density wave `rho = 1 + 0.2 sin(2 pi x)`, `u = 1`,
    /// `p = 1`, used for convergence studies.
    Wave,
}

impl ProblemId {
    pub fn name(self) -> &'static str {
        match self {
            ProblemId::Sod => "sod",
            ProblemId::Blast => "blast",
            ProblemId::Mixed => "mixed",
            ProblemId::Wave => "wave",
        }
    }
}

impl fmt::Display for ProblemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProblemId {
    type Err = SolverError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sod" => Ok(ProblemId::Sod),
            "blast" => Ok(ProblemId::Blast),
            "mixed" => Ok(ProblemId::Mixed),
            "wave" => Ok(ProblemId::Wave),
            _ => Err(SolverError::InvalidArgument(format!("unknown problem '{s}'"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ProblemConfig {
    pub problem: ProblemId,
    pub domain: (f64, f64),
    pub boundary: Boundary,
    pub nx: usize,
    pub nv: usize,
    pub v_cut: f64,
    pub order: usize,
    pub eps: EpsProfile,
    pub t_final: f64,
    pub cfl: f64,
    /// `None` switches the limiter off.
    pub m_tvb: Option<f64>,
    pub mode: HierarchyMode,
    pub thresholds: Thresholds,
    pub kinetic_limiter: LimiterPlacement,
    /// Number of equally spaced output frames after t = 0; 0 writes none.
    pub frames: usize,
    pub out_dir: Option<PathBuf>,
    /// 0 runs single-threaded.
    pub threads: usize,
    /// Reserved; the solver is deterministic.
    pub seed: u64,
}

impl ProblemConfig {
    /// Benchmark defaults for `problem`.
    pub fn new(problem: ProblemId) -> Self {
        let (domain, boundary, v_cut, eps, t_final) = match problem {
            ProblemId::Sod => ((-0.2, 1.2), Boundary::Outflow, 4.5, EpsProfile::Constant(1e-3), 0.2),
            ProblemId::Blast => ((0.0, 1.0), Boundary::Reflective, 9.0, EpsProfile::Constant(1e-2), 0.25),
            ProblemId::Mixed => (
                (-0.5, 0.5),
                Boundary::Periodic,
                10.0,
                EpsProfile::Tanh { eps0: 1e-3, a0: 40.0 },
                0.1,
            ),
            ProblemId::Wave => ((0.0, 1.0), Boundary::Periodic, 0.0, EpsProfile::Constant(0.0), 0.1),
        };
        Self {
            problem,
            domain,
            boundary,
            nx: 50,
            nv: 100,
            v_cut,
            order: 2,
            eps,
            t_final,
            cfl: 0.05,
            m_tvb: Some(1.0),
            mode: if problem == ProblemId::Wave {
                HierarchyMode::Euler
            } else {
                HierarchyMode::FullKinetic
            },
            thresholds: Thresholds::default(),
            kinetic_limiter: LimiterPlacement::EveryStage,
            frames: 0,
            out_dir: None,
            threads: 0,
            seed: 0,
        }
    }

    /// Sets the Knudsen number: the constant value, or `eps0` of the mixed profile.
    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps = match self.eps {
            EpsProfile::Tanh { a0, .. } => EpsProfile::Tanh { eps0: eps, a0 },
            EpsProfile::Constant(_) => EpsProfile::Constant(eps),
        };
        self
    }

    pub fn with_mode(mut self, mode: HierarchyMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_nx(mut self, nx: usize) -> Self {
        self.nx = nx;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(SolverError::InvalidConfig(m));
        if !(self.t_final > 0.0) {
            return bad(format!("t_final must be positive, got {}", self.t_final));
        }
        if self.nx == 0 || self.nv == 0 {
            return bad("nx and nv must be at least 1".into());
        }
        if !(self.cfl > 0.0) {
            return bad(format!("cfl must be positive, got {}", self.cfl));
        }
        let th = &self.thresholds;
        if !(th.eta0 > 0.0 && th.eta1 > 0.0 && th.delta0 > 0.0) {
            return bad("thresholds must be positive".into());
        }
        if self.m_tvb.is_some_and(|m| !(m >= 0.0)) {
            return bad("TVB constant must be non-negative".into());
        }
        let needs_grid = !matches!(self.mode, HierarchyMode::Euler | HierarchyMode::Ns);
        if needs_grid && !(self.v_cut > 0.0) {
            return bad(format!("mode {} needs a positive velocity cut-off", self.mode));
        }
        Ok(())
    }
}

fn double_maxwellian(rho: f64, u: f64, t: f64, grid: &VelocityGrid, out: &mut [f64]) {
    let norm = 0.5 * rho / (2.0 * std::f64::consts::PI * t).sqrt();
    for (o, &v) in out.iter_mut().zip(&grid.points) {
        *o = norm * ((-(v - u).powi(2) / (2.0 * t)).exp() + (-(v + u).powi(2) / (2.0 * t)).exp());
    }
}

/// Mesh, initial `(U, g)` and the initial regime map.
pub fn init_problem(cfg: &ProblemConfig) -> Result<(Discretization, StateField, KineticField, RegimeMap)> {
    cfg.validate()?;
    let basis = NodalBasis::gauss(cfg.order)?;
    let mesh = Mesh1D::uniform(cfg.domain.0, cfg.domain.1, cfg.nx, cfg.boundary, &basis, cfg.eps)?;
    let fluid_only = matches!(cfg.mode, HierarchyMode::Euler | HierarchyMode::Ns);
    let grid = if fluid_only {
        VelocityGrid::new(cfg.v_cut.max(1.0), 1)?
    } else {
        VelocityGrid::new(cfg.v_cut, cfg.nv)?
    };
    let n = basis.n_nodes();
    let mut g = KineticField::zeros(cfg.nx, n, grid.len());
    let two_pi = 2.0 * std::f64::consts::PI;
    let u: StateField = match cfg.problem {
        ProblemId::Sod => DgField::from_fn(cfg.nx, n, |i, k| {
            if mesh.node_x(i)[k] < 0.5 {
                ConservedState::from_primitive(1.0, 0.0, 1.0)
            } else {
                ConservedState::from_primitive(0.125, 0.0, 0.8)
            }
        }),
        ProblemId::Blast => DgField::from_fn(cfg.nx, n, |i, k| {
            let x = mesh.node_x(i)[k];
            if x < 0.2 {
                ConservedState::from_primitive(1.0, 1.0, 2.0)
            } else if x < 0.8 {
                ConservedState::from_primitive(1.0, 0.0, 0.25)
            } else {
                ConservedState::from_primitive(1.0, -1.0, 2.0)
            }
        }),
        ProblemId::Mixed => {
            let omega = std::f64::consts::PI / 0.5;
            let ut = 0.75;
            let u = DgField::from_fn(cfg.nx, n, |i, k| {
                let s = (omega * mesh.node_x(i)[k]).sin();
                ConservedState::from_primitive(1.0 + 0.875 * s, 0.0, 0.5 + 0.4 * s + ut * ut)
            });
            if !fluid_only {
                let mut f0 = vec![0.0; grid.len()];
                let mut m = vec![0.0; grid.len()];
                for i in 0..cfg.nx {
                    for k in 0..n {
                        let x = mesh.node_x(i)[k];
                        let s = (omega * x).sin();
                        double_maxwellian(1.0 + 0.875 * s, ut, 0.5 + 0.4 * s, &grid, &mut f0);
                        let prim = u.cell(i)[k].primitive_unchecked();
                        maxwellian_into(&prim, &grid, &mut m);
                        let eps = mesh.eps_nodes(i)[k];
                        let out = g.slice_mut(i, k);
                        for ((o, &f), &mm) in out.iter_mut().zip(&f0).zip(&m) {
                            *o = (f - mm) / eps;
                        }
                        // remove the quadrature residue of the moments
                        Projector::new(&prim, &m, &grid).complement_in_place(out, &m, &grid);
                    }
                }
            }
            u
        }
        ProblemId::Wave => DgField::from_fn(cfg.nx, n, |i, k| {
            let rho = 1.0 + 0.2 * (two_pi * mesh.node_x(i)[k]).sin();
            ConservedState::from_primitive(rho, 1.0, 1.0 / rho)
        }),
    };
    let regimes = RegimeMap::uniform(cfg.nx, cfg.mode.initial_regime());
    Ok((Discretization { mesh, basis, grid }, u, g, regimes))
}

/// Exact density of the wave problem at time `t`.
pub fn wave_density(x: f64, t: f64) -> f64 {
    1.0 + 0.2 * (2.0 * std::f64::consts::PI * (x - t)).sin()
}
