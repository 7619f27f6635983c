//! Analysis and simulation of hard-real-time sporadic task systems whose jobs
//! suspend for I/O (read and write phases) on `m` identical processors.
//!
//! The crate is organized around six pieces:
//!
//! - [`task_model`]: task and system types, derived ratios, the task-system file format.
//! - [`sched_tests`]: closed-form utilization-based schedulability tests.
//! - [`io_placement`]: the read/write phase reassignment that gives read-write
//!   tasks a flexible suspension pattern.
//! - [`simulator`]: tick-level GEDF and GEDF-R/W simulation producing full traces.
//! - [`fluid`]: exact PS/SPS fluid schedules, lag accounting and trace assertions.
//! - [`experiments`]: random task-set generation, acceptance-ratio curves and the
//!   two-task / three-task case study.
//!
//! All ratios are exact rationals ([`Rational`]); time is an integer tick count.

pub mod experiments;
pub mod fluid;
pub mod io_placement;
pub mod rational;
pub mod sched_tests;
pub mod simulator;
pub mod task_model;

pub use rational::Rational;
pub use task_model::{Tick, TaskKind, TaskSpec, TaskSystem};
