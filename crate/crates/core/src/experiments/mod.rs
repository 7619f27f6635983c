//! Random task-set generation, acceptance-ratio curves, the disk case study
//! and small integer systems for simulation fuzzing.

pub mod case_study;
pub mod fuzz;
pub mod generator;
pub mod harness;

pub use case_study::{case_system, run_case_study, write_responses_csv, CaseStudy, CaseStudyResult};
pub use generator::{generate_task_system, GenConfig, GenError, GeneratedSystem, GeneratedTask, SuspDist, UtilDist};
pub use harness::{run_schedulability_experiment, write_curves_csv, CurvePoint, ExperimentConfig};
