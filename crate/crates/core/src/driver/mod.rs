//! Problem setup, the time loop and file output.

pub mod io;
pub mod problem;
pub mod run;

pub use io::{format_frame, parse_frame, read_frame, read_report, write_frame, write_report, Frame, FrameMeta, FrameRow, RunReport};
pub use problem::{init_problem, wave_density, ProblemConfig, ProblemId};
pub use run::{build_frame, format_timing_table, run, timing_compare, RunOutcome, TimingRow};
