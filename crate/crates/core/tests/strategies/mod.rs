//! Shared proptest strategies.

#![allow(dead_code)]

use proptest::prelude::*;

use rwsched::experiments::fuzz::FUZZ_PERIODS;
use rwsched::{TaskSpec, TaskSystem, Tick};

/// Read-write task with `R + C + W <= T`.
pub fn rw_task(max_period: Tick) -> impl Strategy<Value = TaskSpec> {
    (1..=max_period, 0..=max_period, 0..=max_period, 0..=max_period).prop_map(|(t, c, r, w)| {
        let c = c % (t + 1);
        let r = r % (t - c + 1);
        let w = w % (t - c - r + 1);
        TaskSpec::read_write(0, r, c, w, t)
    })
}

/// Write-only task with `C1 >= 1` and `C1 + W + C2 <= T`.
pub fn wo_task(max_period: Tick) -> impl Strategy<Value = TaskSpec> {
    (1..=max_period, 0..=max_period, 0..=max_period, 0..=max_period).prop_map(|(t, c1, w, c2)| {
        let c1 = 1 + c1 % t;
        let w = w % (t - c1 + 1);
        let c2 = c2 % (t - c1 - w + 1);
        TaskSpec::write_only(0, c1, w, c2, t)
    })
}

fn with_period(task: TaskSpec, period: Tick) -> TaskSpec {
    // shrink phases proportionally so the task still fits
    let fit = |x: Tick| x * period / task.period;
    match task.phases {
        rwsched::task_model::Phases::ReadWrite { read, compute, write } => {
            TaskSpec::read_write(0, fit(read), fit(compute), fit(write), period)
        }
        rwsched::task_model::Phases::WriteOnly { compute1, write, compute2 } => {
            TaskSpec::write_only(0, fit(compute1).max(1), fit(write), fit(compute2), period)
        }
    }
}

pub fn system(task: impl Strategy<Value = TaskSpec>, m: std::ops::RangeInclusive<usize>, n: usize) -> impl Strategy<Value = TaskSystem> {
    (m, prop::collection::vec(task, 1..=n)).prop_map(|(m, tasks)| TaskSystem::from_tasks(m, tasks).unwrap())
}

pub fn rw_system(max_tasks: usize) -> impl Strategy<Value = TaskSystem> {
    system(rw_task(40), 1..=4, max_tasks)
}

pub fn wo_system(max_tasks: usize) -> impl Strategy<Value = TaskSystem> {
    system(wo_task(40), 1..=4, max_tasks)
}

/// Systems whose periods divide 120, for simulation.
pub fn sim_system(write_only: bool, max_tasks: usize) -> impl Strategy<Value = TaskSystem> {
    let task = (if write_only { wo_task(60).boxed() } else { rw_task(60).boxed() }, prop::sample::select(FUZZ_PERIODS.to_vec()))
        .prop_map(|(t, p)| with_period(t, p));
    system(task, 1..=4, max_tasks)
}
