use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use hbgk::driver::{format_timing_table, run, timing_compare, ProblemConfig, ProblemId};
use hbgk::regime::HierarchyMode;
use hbgk::solver::LimiterPlacement;
use hbgk::{Result, SolverError};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum LimiterArg {
    StepEnd,
    EveryStage,
}

/// Hierarchical Euler / Navier-Stokes / BGK solver in one space dimension.
#[derive(Debug, Parser)]
#[command(name = "hbgk", version, allow_negative_numbers = true)]
struct Cli {
    /// sod, blast, mixed or wave
    #[arg(long, default_value = "sod")]
    problem: String,
    /// full-kinetic, euler-kinetic, ns-kinetic, euler-ns-kinetic, euler or ns
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    nx: Option<usize>,
    #[arg(long)]
    nv: Option<usize>,
    /// Knudsen number (eps0 of the profile for the mixed problem)
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    tfinal: Option<f64>,
    #[arg(long, default_value_t = 0.05)]
    cfl: f64,
    /// TVB constant; negative disables the limiter
    #[arg(long, default_value_t = 1.0)]
    mtvb: f64,
    #[arg(long, default_value_t = 1e-2)]
    eta0: f64,
    #[arg(long, default_value_t = 1e-1)]
    eta1: f64,
    #[arg(long, default_value_t = 1e-3)]
    delta0: f64,
    /// Output frames after t = 0
    #[arg(long, default_value_t = 0)]
    frames: usize,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// 0 runs single-threaded and deterministic
    #[arg(long, default_value_t = 0)]
    threads: usize,
    #[arg(long, value_enum, default_value = "every-stage")]
    kinetic_limiter: LimiterArg,
    /// Time full-kinetic against the three hierarchical modes
    #[arg(long)]
    compare: bool,
}

fn config(cli: &Cli) -> Result<ProblemConfig> {
    let problem: ProblemId = cli.problem.parse()?;
    let mut cfg = ProblemConfig::new(problem);
    if let Some(m) = &cli.mode {
        cfg.mode = m.parse::<HierarchyMode>()?;
    }
    if let Some(n) = cli.nx {
        cfg.nx = n;
    }
    if let Some(n) = cli.nv {
        cfg.nv = n;
    }
    if let Some(e) = cli.eps {
        if !(e > 0.0) {
            return Err(SolverError::InvalidArgument(format!("eps must be positive, got {e}")));
        }
        cfg = cfg.with_eps(e);
    }
    if let Some(t) = cli.tfinal {
        cfg.t_final = t;
    }
    cfg.cfl = cli.cfl;
    cfg.m_tvb = (cli.mtvb >= 0.0).then_some(cli.mtvb);
    cfg.thresholds.eta0 = cli.eta0;
    cfg.thresholds.eta1 = cli.eta1;
    cfg.thresholds.delta0 = cli.delta0;
    cfg.frames = cli.frames;
    cfg.out_dir = cli.out_dir.clone();
    cfg.threads = cli.threads;
    cfg.kinetic_limiter = match cli.kinetic_limiter {
        LimiterArg::StepEnd => LimiterPlacement::StepEnd,
        LimiterArg::EveryStage => LimiterPlacement::EveryStage,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn execute(cli: &Cli) -> Result<()> {
    let cfg = config(cli)?;
    if cli.compare {
        let rows = timing_compare(&cfg)?;
        print!("{}", format_timing_table(&rows));
        return Ok(());
    }
    let out = run(&cfg)?;
    let r = &out.report;
    println!(
        "{} {} eps={} nx={} t={} steps={} time={:.3}s",
        r.problem, r.mode, r.eps, r.nx, r.t_final, r.steps, r.timings.total_seconds
    );
    println!(
        "cells E/N/K = {}/{}/{}  drift mass={:.3e} momentum={:.3e} energy={:.3e}",
        r.final_histogram[0], r.final_histogram[1], r.final_histogram[2], r.drift.mass, r.drift.momentum, r.drift.energy
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("").trim_start_matches("error: ");
            eprintln!("error[usage]: {first}");
            return ExitCode::from(2);
        }
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {}", e.category(), e);
            ExitCode::from(1)
        }
    }
}
