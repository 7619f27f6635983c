//! Acceptance-ratio curves: the fraction of generated systems each test
//! accepts, per utilization cap.

use std::io::{self, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::generator::{generate_task_system, GenConfig, GenError, GeneratedSystem, SuspDist, UtilDist};
use crate::rational::{display, ratio, to_f64, Rational};
use crate::sched_tests::{run_test, TestName};
use crate::simulator::{simulate, ReleaseModel, Scheduler};
use crate::task_model::Tick;

/// Version tag written on the first line of curve CSV files.
pub const CURVES_SCHEMA: &str = "# rwsched-curves v1";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExperimentConfig {
    pub m: usize,
    pub util: UtilDist,
    pub susp: SuspDist,
    pub alpha: Rational,
    pub caps: Vec<Rational>,
    pub systems_per_cap: usize,
    pub tests: Vec<TestName>,
    pub seed: u64,
}

impl ExperimentConfig {
    /// Caps 0.1, 0.2, ..., m with the write-only and suspension-oblivious tests.
    pub fn new(m: usize, util: UtilDist, susp: SuspDist, alpha: Rational, systems_per_cap: usize, seed: u64) -> Self {
        Self {
            m,
            util,
            susp,
            alpha,
            caps: cap_grid(m),
            systems_per_cap,
            tests: vec![TestName::WriteOnlyGedf, TestName::SuspObliviousDensity],
            seed,
        }
    }
}

/// 0.1, 0.2, ..., m.
pub fn cap_grid(m: usize) -> Vec<Rational> {
    (1..=10 * m as i128).map(|k| ratio(k, 10)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurvePoint {
    pub cap: Rational,
    pub test: TestName,
    pub accepted: usize,
    pub samples: usize,
}

impl CurvePoint {
    pub fn fraction(&self) -> f64 {
        if self.samples == 0 {
            0.0
        } else {
            self.accepted as f64 / self.samples as f64
        }
    }
}

/// RNG for one trial; independent of evaluation order.
pub fn trial_rng(seed: u64, cap_index: usize, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((cap_index as u64) << 32) | trial as u64);
    rng
}

/// Generates `systems_per_cap` systems for each cap and counts how many each
/// test accepts. Trials run in parallel; results depend only on the config.
pub fn run_schedulability_experiment(cfg: &ExperimentConfig) -> Result<Vec<CurvePoint>, GenError> {
    let mut points = Vec::with_capacity(cfg.caps.len() * cfg.tests.len());
    for (cap_index, &cap) in cfg.caps.iter().enumerate() {
        let gen = GenConfig::new(cfg.m, cfg.util, cfg.susp, cfg.alpha, cap);
        let accepted: Vec<Vec<bool>> = (0..cfg.systems_per_cap)
            .into_par_iter()
            .map(|trial| {
                let sys = generate_task_system(&gen, &mut trial_rng(cfg.seed, cap_index, trial))?;
                let profile = sys.profile();
                Ok(cfg
                    .tests
                    .iter()
                    .map(|&t| run_test(t, &profile).map(|v| v.passed).unwrap_or(false))
                    .collect())
            })
            .collect::<Result<_, GenError>>()?;
        for (k, &test) in cfg.tests.iter().enumerate() {
            points.push(CurvePoint {
                cap,
                test,
                accepted: accepted.iter().filter(|row| row[k]).count(),
                samples: cfg.systems_per_cap,
            });
        }
    }
    Ok(points)
}

pub fn write_curves_csv<W: Write>(points: &[CurvePoint], mut out: W) -> io::Result<()> {
    writeln!(out, "{CURVES_SCHEMA}")?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["cap", "test", "accepted", "samples", "fraction"])?;
    for p in points {
        w.write_record([
            format!("{:.1}", to_f64(&p.cap)),
            p.test.key().to_string(),
            p.accepted.to_string(),
            p.samples.to_string(),
            format!("{:.4}", p.fraction()),
        ])?;
    }
    w.flush()
}

/// Outcome of simulating one generated system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SoundnessOutcome {
    /// Quantized hyperperiod too large to simulate.
    Skipped,
    /// Simulated over two hyperperiods.
    Simulated { hyperperiod: Tick, misses: usize },
}

/// Quantizes `system` and simulates it under GEDF with synchronous periodic
/// releases for two hyperperiods.
pub fn soundness_check(system: &GeneratedSystem, max_hyperperiod: Tick) -> SoundnessOutcome {
    let Ok(quantized) = system.quantize(max_hyperperiod) else {
        return SoundnessOutcome::Skipped;
    };
    let hyperperiod = quantized.hyperperiod();
    let trace = simulate(&quantized, Scheduler::Gedf, &ReleaseModel::SynchronousPeriodic, 2 * hyperperiod)
        .expect("a quantized system always simulates");
    SoundnessOutcome::Simulated { hyperperiod, misses: trace.miss_count() }
}

/// Largest cap at which `test` accepted every sample, scanning up from the
/// smallest cap and stopping at the first cap where it did not.
pub fn full_acceptance_edge(points: &[CurvePoint], test: TestName) -> Option<Rational> {
    points
        .iter()
        .filter(|p| p.test == test)
        .take_while(|p| p.accepted == p.samples)
        .map(|p| p.cap)
        .last()
}

/// Largest cap at which `test` accepted at least one sample.
pub fn last_nonzero_cap(points: &[CurvePoint], test: TestName) -> Option<Rational> {
    points.iter().filter(|p| p.test == test && p.accepted > 0).map(|p| p.cap).max()
}

/// Human-readable cap, e.g. `3.5`.
pub fn cap_label(cap: &Rational) -> String {
    if *cap.denom() == 1 || *cap.denom() == 2 || *cap.denom() == 5 || *cap.denom() == 10 {
        format!("{:.1}", to_f64(cap))
    } else {
        display(cap)
    }
}
