//! Discrete-time simulation of GEDF and GEDF-R/W on `m` identical processors.
//!
//! Every decision is taken at an integer tick and holds for the unit interval
//! `[t, t+1)`. Jobs of one task execute in release order: a job becomes ready
//! only once its predecessor has finished every phase. Suspensions of any
//! number of jobs proceed in parallel.
//!
//! Under [`Scheduler::Gedf`] each job runs its phases in their fixed order and
//! may only compute while in a compute phase. Transformed jobs run under GEDF
//! in template order (pending write, compute, read). Under
//! [`Scheduler::GedfRw`] transformed jobs use the flexible pattern: the `m`
//! earliest-deadline comp-pending jobs compute and every other job with
//! suspension left suspends.
//!
//! For transformed systems the pre-fetch job is assumed to have run before
//! tick 0, so job 1 of every task starts with its input already read.

mod job;
mod policy;
mod release;
mod trace;

pub use job::{JobState, SuspensionPattern};
pub use policy::{gedf_pick, gedf_rw_pick};
pub use release::ReleaseModel;
pub use trace::{
    first_deadline_miss, incomplete_jobs, response_times, DeadlineMiss, JobRecord, ResponseTime, TaskInfo, Trace,
    TRACE_SCHEMA,
};

use std::fmt;

use thiserror::Error;

use crate::io_placement::{PhaseKind, TransformedSystem};
use crate::task_model::{Phases, TaskSpec, TaskSystem, Tick};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheduler {
    Gedf,
    GedfRw,
}

impl Scheduler {
    pub fn as_str(self) -> &'static str {
        match self {
            Scheduler::Gedf => "gedf",
            Scheduler::GedfRw => "gedf-rw",
        }
    }
}

impl fmt::Display for Scheduler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("horizon must be at least one tick")]
    HorizonTooSmall,
    #[error("GEDF-R/W needs the flexible suspension pattern; transform the read-write system first")]
    IncompatibleScheduler,
    #[error("release model gives {given} per-task values for {tasks} tasks")]
    ReleaseModelMismatch { given: usize, tasks: usize },
}

/// Input to [`simulate`].
#[derive(Debug, Clone, Copy)]
pub enum Workload<'a> {
    Original(&'a TaskSystem),
    Transformed(&'a TransformedSystem),
}

impl<'a> From<&'a TaskSystem> for Workload<'a> {
    fn from(s: &'a TaskSystem) -> Self {
        Workload::Original(s)
    }
}

impl<'a> From<&'a TransformedSystem> for Workload<'a> {
    fn from(s: &'a TransformedSystem) -> Self {
        Workload::Transformed(s)
    }
}

impl<'a> From<&'a crate::io_placement::AnySystem> for Workload<'a> {
    fn from(s: &'a crate::io_placement::AnySystem) -> Self {
        match s {
            crate::io_placement::AnySystem::Original(o) => Workload::Original(o),
            crate::io_placement::AnySystem::Transformed(t) => Workload::Transformed(t),
        }
    }
}

impl Workload<'_> {
    fn base(&self) -> &TaskSystem {
        match self {
            Workload::Original(s) => s,
            Workload::Transformed(t) => t.base(),
        }
    }

    fn job_phases(&self, task: usize, job: u64) -> Vec<(PhaseKind, Tick)> {
        match self {
            Workload::Original(s) => original_phases(s.task(task)),
            Workload::Transformed(t) => {
                t.tasks()[task].template(job).iter().map(|p| (p.kind(), p.length)).collect()
            }
        }
    }
}

fn original_phases(task: &TaskSpec) -> Vec<(PhaseKind, Tick)> {
    use PhaseKind::*;
    match task.phases {
        Phases::ReadWrite { read, compute, write } => vec![(Suspend, read), (Compute, compute), (Suspend, write)],
        Phases::WriteOnly { compute1, write, compute2 } => {
            vec![(Compute, compute1), (Suspend, write), (Compute, compute2)]
        }
    }
}

/// Simulates `workload` over `[0, horizon)`.
///
/// Jobs released before the horizon are simulated; those still unfinished at
/// the horizon are recorded without a completion.
pub fn simulate<'a>(
    workload: impl Into<Workload<'a>>,
    scheduler: Scheduler,
    releases: &ReleaseModel,
    horizon: Tick,
) -> Result<Trace, SimError> {
    let workload = workload.into();
    if horizon < 1 {
        return Err(SimError::HorizonTooSmall);
    }
    if scheduler == Scheduler::GedfRw && matches!(workload, Workload::Original(_)) {
        return Err(SimError::IncompatibleScheduler);
    }
    let system = workload.base();
    let n = system.len();
    if let Some(given) = releases.per_task_len() {
        if given != n {
            return Err(SimError::ReleaseModelMismatch { given, tasks: n });
        }
    }
    let m = system.m();
    let pattern = match scheduler {
        Scheduler::Gedf => SuspensionPattern::Ordered,
        Scheduler::GedfRw => SuspensionPattern::Flexible,
    };

    let tasks = system
        .tasks()
        .iter()
        .map(|t| TaskInfo {
            kind: t.kind(),
            period: t.period,
            utilization: t.utilization(),
            suspension_ratio: t.suspension_ratio(),
            delta: t.delta(),
            flexible: pattern == SuspensionPattern::Flexible,
        })
        .collect();

    // (release tick, task) in release order
    let mut schedule: Vec<(Tick, usize)> = system
        .tasks()
        .iter()
        .flat_map(|t| releases.releases(t.id, t.period, horizon).into_iter().map(move |r| (r, t.id)))
        .collect();
    schedule.sort_unstable();

    let mut trace = Trace {
        m,
        horizon,
        scheduler,
        tasks,
        jobs: Vec::with_capacity(schedule.len()),
        slots: vec![None; horizon as usize * m],
    };

    let mut next_job = vec![1u64; n];
    // active jobs and their record indices, kept in release order
    let mut active: Vec<JobState> = Vec::new();
    let mut record_of: Vec<usize> = Vec::new();
    let mut previous: Vec<Option<usize>> = vec![None; m];
    let mut cursor = 0;

    for t in 0..horizon {
        while cursor < schedule.len() && schedule[cursor].0 == t {
            let task = schedule[cursor].1;
            let spec = system.task(task);
            let job = next_job[task];
            next_job[task] += 1;
            let state = JobState::new(task, job, t, t + spec.period, pattern, workload.job_phases(task, job));
            trace.jobs.push(JobRecord {
                task,
                job,
                release: t,
                deadline: t + spec.period,
                ready_at: None,
                compute_demand: state.compute_left(),
                suspension_demand: state.suspension_left(),
                compute_ticks: Vec::new(),
                suspend_ticks: Vec::new(),
                completion: None,
            });
            record_of.push(trace.jobs.len() - 1);
            active.push(state);
            cursor += 1;
        }

        settle(&mut active, &mut record_of, &mut trace, t);

        let (compute, suspend) = match scheduler {
            Scheduler::Gedf => {
                let compute = gedf_pick(&active, m);
                let suspend = (0..active.len()).filter(|&i| active[i].must_suspend()).collect();
                (compute, suspend)
            }
            Scheduler::GedfRw => gedf_rw_pick(&active, m),
        };

        // keep a job on the processor it used in the previous tick when possible
        let chosen: Vec<usize> = compute.iter().map(|&i| record_of[i]).collect();
        let mut row: Vec<Option<usize>> = previous.iter().map(|p| p.filter(|r| chosen.contains(r))).collect();
        for &r in &chosen {
            if !row.contains(&Some(r)) {
                let free = row.iter().position(Option::is_none).expect("at most m jobs are chosen");
                row[free] = Some(r);
            }
        }
        for (p, slot) in row.iter().enumerate() {
            trace.slots[t as usize * m + p] = slot.map(|r| r as u32);
        }
        previous = row;

        for &i in &compute {
            active[i].compute_one();
            trace.jobs[record_of[i]].compute_ticks.push(t);
        }
        for &i in &suspend {
            active[i].suspend_one();
            trace.jobs[record_of[i]].suspend_ticks.push(t);
        }

        settle(&mut active, &mut record_of, &mut trace, t + 1);
    }
    Ok(trace)
}

/// Retires finished jobs at instant `now` and marks each task's oldest
/// unfinished job ready.
fn settle(active: &mut Vec<JobState>, record_of: &mut Vec<usize>, trace: &mut Trace, now: Tick) {
    loop {
        let mut seen = vec![false; trace.tasks.len()];
        let mut finished = None;
        for (i, job) in active.iter_mut().enumerate() {
            let head = !seen[job.task];
            seen[job.task] = true;
            job.ready = head;
            if head {
                let rec = &mut trace.jobs[record_of[i]];
                rec.ready_at.get_or_insert(now);
                if !job.is_pending() {
                    finished = Some(i);
                    break;
                }
            }
        }
        match finished {
            Some(i) => {
                trace.jobs[record_of[i]].completion = Some(now);
                active.remove(i);
                record_of.remove(i);
            }
            None => return,
        }
    }
}
