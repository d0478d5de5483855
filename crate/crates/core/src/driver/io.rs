//! Frame files (one text row per Gauss node) and the TOML run report.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SolverError};
use crate::regime::Regime;

pub const FRAME_COLUMNS: &str = "x,rho,u,T,q,regime,nu_ns,nu_b";

#[derive(Clone, Debug, PartialEq)]
pub struct FrameMeta {
    pub t: f64,
    pub step: usize,
    pub mode: String,
    pub eps: String,
    pub problem: String,
    pub nx: usize,
    pub nv: usize,
    pub order: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrameRow {
    pub x: f64,
    pub rho: f64,
    pub u: f64,
    pub temp: f64,
    pub q: f64,
    pub regime: Regime,
    pub nu_ns: f64,
    pub nu_b: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Frame {
    pub meta: FrameMeta,
    pub rows: Vec<FrameRow>,
}

fn io_err(path: &Path, source: std::io::Error) -> SolverError {
    SolverError::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn format_frame(frame: &Frame) -> String {
    let m = &frame.meta;
    let mut s = format!(
        "# t={:.16e} step={} mode={} eps={} problem={} nx={} nv={} k={} columns={}\n",
        m.t, m.step, m.mode, m.eps, m.problem, m.nx, m.nv, m.order, FRAME_COLUMNS
    );
    for r in &frame.rows {
        let _ = writeln!(
            s,
            "{:.16e} {:.16e} {:.16e} {:.16e} {:.16e} {} {:.16e} {:.16e}",
            r.x,
            r.rho,
            r.u,
            r.temp,
            r.q,
            r.regime.symbol(),
            r.nu_ns,
            r.nu_b
        );
    }
    s
}

pub fn write_frame(frame: &Frame, path: &Path) -> Result<()> {
    fs::write(path, format_frame(frame)).map_err(|e| io_err(path, e))
}

pub fn parse_frame(text: &str, path: &Path) -> Result<Frame> {
    let perr = |line: usize, message: String| SolverError::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| perr(1, "empty frame".into()))?;
    let header = header
        .strip_prefix('#')
        .ok_or_else(|| perr(1, "header must start with '#'".into()))?;
    let mut get = std::collections::HashMap::new();
    for tok in header.split_whitespace() {
        let (k, v) = tok
            .split_once('=')
            .ok_or_else(|| perr(1, format!("bad header token '{tok}'")))?;
        get.insert(k, v);
    }
    let field = |k: &str| get.get(k).copied().ok_or_else(|| perr(1, format!("missing header key '{k}'")));
    let num = |k: &str| -> Result<usize> {
        field(k)?.parse().map_err(|_| perr(1, format!("header key '{k}' is not an integer")))
    };
    if field("columns")? != FRAME_COLUMNS {
        return Err(perr(1, format!("unexpected columns '{}'", field("columns")?)));
    }
    let meta = FrameMeta {
        t: field("t")?.parse().map_err(|_| perr(1, "bad time".into()))?,
        step: num("step")?,
        mode: field("mode")?.to_string(),
        eps: field("eps")?.to_string(),
        problem: field("problem")?.to_string(),
        nx: num("nx")?,
        nv: num("nv")?,
        order: num("k")?,
    };
    let mut rows = Vec::new();
    for (idx, line) in lines {
        let ln = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split_whitespace().collect();
        if cols.len() != 8 {
            return Err(perr(ln, format!("expected 8 columns, found {}", cols.len())));
        }
        let f = |c: usize| -> Result<f64> {
            cols[c].parse().map_err(|_| perr(ln, format!("bad number '{}'", cols[c])))
        };
        let mut chars = cols[5].chars();
        let regime = match (chars.next(), chars.next()) {
            (Some(c), None) => Regime::from_symbol(c),
            _ => None,
        }
        .ok_or_else(|| perr(ln, format!("bad regime label '{}'", cols[5])))?;
        rows.push(FrameRow {
            x: f(0)?,
            rho: f(1)?,
            u: f(2)?,
            temp: f(3)?,
            q: f(4)?,
            regime,
            nu_ns: f(6)?,
            nu_b: f(7)?,
        });
    }
    Ok(Frame { meta, rows })
}

pub fn read_frame(path: &Path) -> Result<Frame> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    parse_frame(&text, path)
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub total_seconds: f64,
    pub classify_seconds: f64,
    pub step_seconds: f64,
    pub output_seconds: f64,
}

/// Cell-steps spent in each class, the work measure behind the timings.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CellSteps {
    pub euler: u64,
    pub ns: u64,
    pub kinetic: u64,
}

/// Change of the domain totals between t = 0 and the final time. Mass and
/// energy are relative to their initial totals, momentum to the initial mass.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Drift {
    pub mass: f64,
    pub momentum: f64,
    pub energy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub problem: String,
    pub mode: String,
    pub eps: String,
    pub nx: usize,
    pub nv: usize,
    pub t_final: f64,
    pub steps: usize,
    pub timings: Timings,
    pub cell_steps: CellSteps,
    pub drift: Drift,
    /// Final `[euler, ns, kinetic]` counts.
    pub final_histogram: [usize; 3],
    /// `[euler, ns, kinetic]` counts used by each step.
    pub histogram: Vec<[usize; 3]>,
}

pub fn write_report(report: &RunReport, path: &Path) -> Result<()> {
    let text = toml::to_string(report)
        .map_err(|e| SolverError::InvalidArgument(format!("cannot serialize report: {e}")))?;
    fs::write(path, text).map_err(|e| io_err(path, e))
}

pub fn read_report(path: &Path) -> Result<RunReport> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    toml::from_str(&text).map_err(|e| SolverError::Parse {
        path: path.to_path_buf(),
        line: 0,
        message: e.to_string(),
    })
}
