//! Small integer task systems for simulation-based checks.
//!
//! Periods come from the divisors of 120, so every hyperperiod is at most 120
//! ticks and a run over a few hyperperiods stays cheap.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::task_model::{TaskSpec, TaskSystem, Tick};

pub const FUZZ_PERIODS: [Tick; 12] = [4, 5, 6, 8, 10, 12, 15, 20, 24, 30, 40, 60];

fn task_count<R: Rng + ?Sized>(rng: &mut R, m: usize) -> usize {
    rng.gen_range(1..=2 * m + 2)
}

/// Per-task utilization ceiling, drawn once per system so both light and heavy
/// systems show up.
fn util_ceiling<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    *[0.15, 0.3, 0.5, 0.8].choose(rng).unwrap()
}

/// A random valid write-only system on `m` processors.
pub fn write_only_system<R: Rng + ?Sized>(rng: &mut R, m: usize) -> TaskSystem {
    let n = task_count(rng, m);
    let ceiling = util_ceiling(rng);
    let tasks = (0..n)
        .map(|id| {
            let period = *FUZZ_PERIODS.choose(rng).unwrap();
            let max_c = ((period as f64 * ceiling) as Tick).max(1);
            let compute = rng.gen_range(1..=max_c);
            let compute1 = rng.gen_range(1..=compute);
            let write = rng.gen_range(0..=(period - compute).min(2 * compute1));
            TaskSpec::write_only(id, compute1, write, compute - compute1, period)
        })
        .collect();
    TaskSystem::new(m, tasks).expect("generated write-only tasks are valid")
}

/// A random valid read-write system on `m` processors.
pub fn read_write_system<R: Rng + ?Sized>(rng: &mut R, m: usize) -> TaskSystem {
    let n = task_count(rng, m);
    let ceiling = util_ceiling(rng);
    let tasks = (0..n).map(|id| read_write_task(rng, id, ceiling)).collect();
    TaskSystem::new(m, tasks).expect("generated read-write tasks are valid")
}

fn read_write_task<R: Rng + ?Sized>(rng: &mut R, id: usize, ceiling: f64) -> TaskSpec {
    let period = *FUZZ_PERIODS.choose(rng).unwrap();
    let max_c = ((period as f64 * ceiling) as Tick).max(1);
    let compute = rng.gen_range(0..=max_c);
    let left = period - compute;
    let read = rng.gen_range(0..=left / 2);
    let write = rng.gen_range(0..=(left - read) / 2);
    TaskSpec::read_write(id, read, compute, write, period)
}

/// A read-write system whose total utilization exceeds `m`, so some jobs
/// must miss.
pub fn overloaded_read_write_system<R: Rng + ?Sized>(rng: &mut R, m: usize) -> TaskSystem {
    let mut tasks = Vec::new();
    let mut total = 0.0;
    while total <= m as f64 + 0.2 {
        let task = read_write_task(rng, tasks.len(), 0.8);
        total += task.compute() as f64 / task.period as f64;
        tasks.push(task);
    }
    TaskSystem::new(m, tasks).expect("generated read-write tasks are valid")
}
