//! Random write-only task systems with a fixed total utilization.
//!
//! Each task draws a write length `W` (µs), a suspension ratio `V` and a
//! utilization `U` from uniform ranges; then `T = W / V`, `C = U T`,
//! `C1 = alpha C`, `C2 = (1 - alpha) C`. Tasks are added until the total
//! utilization reaches the cap, and the last task is shrunk so the total is
//! exactly the cap.
//!
//! Draws are taken on a decimal grid (`U`, `V` in steps of 1e-4, `W` in steps
//! of 0.01 µs) so every parameter is a small exact fraction.

use rand::Rng;
use thiserror::Error;

use crate::rational::{display, int, ratio, Rational};
use crate::task_model::{DerivedParams, SystemProfile, TaskKind, TaskSpec, TaskSystem, Tick};

/// Per-task utilization range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UtilDist {
    /// [0.001, 0.05]
    Light,
    /// [0.05, 0.1]
    Medium,
    /// [0.1, 0.3]
    Heavy,
}

impl UtilDist {
    pub fn range(self) -> (Rational, Rational) {
        match self {
            UtilDist::Light => (ratio(1, 1000), ratio(5, 100)),
            UtilDist::Medium => (ratio(5, 100), ratio(1, 10)),
            UtilDist::Heavy => (ratio(1, 10), ratio(3, 10)),
        }
    }

    pub fn key(self) -> &'static str {
        match self {
            UtilDist::Light => "light",
            UtilDist::Medium => "medium",
            UtilDist::Heavy => "heavy",
        }
    }
}

/// Per-task suspension-ratio range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SuspDist {
    /// [0.005, 0.1]
    Short,
    /// [0.1, 0.3]
    Long,
}

impl SuspDist {
    pub fn range(self) -> (Rational, Rational) {
        match self {
            SuspDist::Short => (ratio(5, 1000), ratio(1, 10)),
            SuspDist::Long => (ratio(1, 10), ratio(3, 10)),
        }
    }

    pub fn key(self) -> &'static str {
        match self {
            SuspDist::Short => "short",
            SuspDist::Long => "long",
        }
    }
}

const UTIL_GRID: i128 = 10_000;
const SUSP_GRID: i128 = 10_000;
const WRITE_GRID: i128 = 100;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenConfig {
    pub m: usize,
    pub util: UtilDist,
    pub susp: SuspDist,
    /// Share of each task's computation in its first compute phase.
    pub alpha: Rational,
    /// Write length range in µs.
    pub write_range: (Rational, Rational),
    /// Target total utilization.
    pub cap: Rational,
}

impl GenConfig {
    pub fn new(m: usize, util: UtilDist, susp: SuspDist, alpha: Rational, cap: Rational) -> Self {
        Self { m, util, susp, alpha, write_range: (int(5), int(50)), cap }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("utilization cap {cap} is below the smallest per-task utilization {floor}")]
    CapTooSmall { cap: String, floor: String },
    #[error("invalid generator configuration: {0}")]
    InvalidConfig(String),
}

/// A write-only task with rational phase lengths (µs).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratedTask {
    pub compute1: Rational,
    pub write: Rational,
    pub compute2: Rational,
    pub period: Rational,
}

impl GeneratedTask {
    pub fn utilization(&self) -> Rational {
        (self.compute1 + self.compute2) / self.period
    }

    pub fn suspension_ratio(&self) -> Rational {
        self.write / self.period
    }

    pub fn delta(&self) -> Rational {
        self.write / self.compute1
    }

    pub fn derived(&self) -> DerivedParams {
        let utilization = self.utilization();
        let suspension_ratio = self.suspension_ratio();
        DerivedParams { z: utilization + suspension_ratio, delta: Some(self.delta()), utilization, suspension_ratio }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratedSystem {
    pub m: usize,
    pub tasks: Vec<GeneratedTask>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuantizeError {
    #[error("hyperperiod after scaling exceeds {limit} ticks")]
    HyperperiodTooLarge { limit: Tick },
}

fn checked_lcm(a: i128, b: i128) -> Option<i128> {
    use num_integer::Integer;
    (a / a.gcd(&b)).checked_mul(b)
}

impl GeneratedSystem {
    pub fn utilization_sum(&self) -> Rational {
        self.tasks.iter().map(GeneratedTask::utilization).sum()
    }

    pub fn profile(&self) -> SystemProfile {
        SystemProfile { m: self.m, tasks: self.tasks.iter().map(|t| (TaskKind::WriteOnly, t.derived())).collect() }
    }

    /// Scales every length by the least common denominator so all of them are
    /// whole ticks. Ratios, and therefore every test verdict, are unchanged.
    /// Fails when the scaled hyperperiod exceeds `max_hyperperiod`.
    pub fn quantize(&self, max_hyperperiod: Tick) -> Result<TaskSystem, QuantizeError> {
        let too_large = QuantizeError::HyperperiodTooLarge { limit: max_hyperperiod };
        let mut scale: i128 = 1;
        for t in &self.tasks {
            for v in [t.compute1, t.write, t.compute2, t.period] {
                scale = checked_lcm(scale, *v.denom()).ok_or(too_large.clone())?;
            }
        }
        let mut hyper: i128 = 1;
        let mut tasks = Vec::with_capacity(self.tasks.len());
        for (id, t) in self.tasks.iter().enumerate() {
            let whole = |v: Rational| -> Result<Tick, QuantizeError> {
                let scaled = v.numer().checked_mul(scale / v.denom()).ok_or(too_large.clone())?;
                Tick::try_from(scaled).map_err(|_| too_large.clone())
            };
            let period = whole(t.period)?;
            hyper = checked_lcm(hyper, period as i128).ok_or(too_large.clone())?;
            if hyper > max_hyperperiod as i128 {
                return Err(too_large);
            }
            tasks.push(TaskSpec::write_only(id, whole(t.compute1)?, whole(t.write)?, whole(t.compute2)?, period));
        }
        Ok(TaskSystem::with_tick_unit(self.m, tasks, format!("1/{scale} us"))
            .expect("scaled tasks keep their ratios"))
    }
}

/// Uniform draw from the multiples of `1/grid` inside `[lo, hi]`.
fn uniform_on_grid<R: Rng + ?Sized>(rng: &mut R, (lo, hi): (Rational, Rational), grid: i128) -> Rational {
    let g = int(grid);
    let first = (lo * g).ceil().to_integer();
    let last = (hi * g).floor().to_integer();
    ratio(rng.gen_range(first..=last), grid)
}

/// One task before any cap adjustment.
pub fn draw_task<R: Rng + ?Sized>(cfg: &GenConfig, rng: &mut R) -> GeneratedTask {
    let write = uniform_on_grid(rng, cfg.write_range, WRITE_GRID);
    let v = uniform_on_grid(rng, cfg.susp.range(), SUSP_GRID);
    let u = uniform_on_grid(rng, cfg.util.range(), UTIL_GRID);
    let period = write / v;
    let compute = u * period;
    GeneratedTask {
        compute1: cfg.alpha * compute,
        write,
        compute2: (int(1) - cfg.alpha) * compute,
        period,
    }
}

fn check_config(cfg: &GenConfig) -> Result<(), GenError> {
    let zero = int(0);
    let one = int(1);
    if cfg.m == 0 {
        return Err(GenError::InvalidConfig("m must be at least 1".into()));
    }
    if cfg.alpha <= zero || cfg.alpha > one {
        return Err(GenError::InvalidConfig(format!("alpha {} is not in (0, 1]", display(&cfg.alpha))));
    }
    let (wlo, whi) = cfg.write_range;
    if wlo <= zero || whi < wlo {
        return Err(GenError::InvalidConfig("write range must be positive and ordered".into()));
    }
    if cfg.cap > int(cfg.m as i128) {
        return Err(GenError::InvalidConfig(format!("cap {} exceeds m = {}", display(&cfg.cap), cfg.m)));
    }
    let floor = cfg.util.range().0;
    if cfg.cap < floor {
        return Err(GenError::CapTooSmall { cap: display(&cfg.cap), floor: display(&floor) });
    }
    Ok(())
}

/// Draws tasks until their utilizations reach `cfg.cap`, then shrinks the
/// last task so the total is exactly the cap.
pub fn generate_task_system<R: Rng + ?Sized>(cfg: &GenConfig, rng: &mut R) -> Result<GeneratedSystem, GenError> {
    check_config(cfg)?;
    let mut tasks = Vec::new();
    let mut total = int(0);
    loop {
        let mut task = draw_task(cfg, rng);
        let u = task.utilization();
        if total + u >= cfg.cap {
            let scale = (cfg.cap - total) / u;
            task.compute1 *= scale;
            task.compute2 *= scale;
            tasks.push(task);
            break;
        }
        total += u;
        tasks.push(task);
    }
    Ok(GeneratedSystem { m: cfg.m, tasks })
}
