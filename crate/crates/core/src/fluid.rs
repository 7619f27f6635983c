//! Fluid reference schedules and lag accounting over simulated traces.
//!
//! In the processor-share schedule (PS) every job of task `i` computes at rate
//! `U_i` throughout its window `[r, d)`; in the suspension-share schedule
//! (SPS) it suspends at rate `V_i` over the same window. Both finish their
//! job's demand exactly at the deadline.
//!
//! `lag(job, t) = A(job, 0, t, PS) - A(job, 0, t, S)` compares that fluid
//! service with the compute ticks the job actually received in trace `S`;
//! `slag` does the same for suspension. Task lag sums job lags and system
//! `LAG` sums task lags. Everything here is exact.

use std::fmt;

use crate::rational::{display, int, Rational};
use crate::simulator::{DeadlineMiss, JobRecord, ReleaseModel, Scheduler, Trace};
use crate::task_model::{TaskKind, TaskSpec, Tick};

/// Length of `[t1, t2) ∩ [start, end)`.
fn overlap(t1: Tick, t2: Tick, start: Tick, end: Tick) -> Tick {
    t2.min(end).saturating_sub(t1.max(start))
}

/// Fluid allocation at `rate` over `[t1, t2)` for a job whose window is `[release, deadline)`.
pub fn fluid_allocation(rate: Rational, release: Tick, deadline: Tick, t1: Tick, t2: Tick) -> Rational {
    rate * int(overlap(t1, t2, release, deadline) as i128)
}

/// Computation PS gives job `job` (1-based) of `task` during `[t1, t2)`.
pub fn ps_allocation(task: &TaskSpec, job: u64, t1: Tick, t2: Tick, releases: &ReleaseModel) -> Rational {
    let r = releases.release_of(task.id, task.period, job);
    fluid_allocation(task.utilization(), r, r + task.period, t1, t2)
}

/// Suspension SPS gives job `job` (1-based) of `task` during `[t1, t2)`.
pub fn sps_allocation(task: &TaskSpec, job: u64, t1: Tick, t2: Tick, releases: &ReleaseModel) -> Rational {
    let r = releases.release_of(task.id, task.period, job);
    fluid_allocation(task.suspension_ratio(), r, r + task.period, t1, t2)
}

/// What a lag is measured for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subject {
    /// 1-based job `job` of task `task`.
    Job { task: usize, job: u64 },
    Task(usize),
    System,
}

/// A lag value at one instant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LagRecord {
    pub subject: Subject,
    pub t: Tick,
    pub lag: Rational,
    /// Only for job subjects.
    pub slag: Option<Rational>,
}

fn job_record(trace: &Trace, task: usize, job: u64) -> Option<&JobRecord> {
    trace.jobs.iter().find(|j| j.task == task && j.job == job)
}

/// `lag` of one job record at `t`.
pub fn record_lag(trace: &Trace, rec: &JobRecord, t: Tick) -> Rational {
    let u = trace.tasks[rec.task].utilization;
    fluid_allocation(u, rec.release, rec.deadline, 0, t) - int(rec.computed_before(t) as i128)
}

/// `slag` of one job record at `t`.
pub fn record_slag(trace: &Trace, rec: &JobRecord, t: Tick) -> Rational {
    let v = trace.tasks[rec.task].suspension_ratio;
    fluid_allocation(v, rec.release, rec.deadline, 0, t) - int(rec.suspended_before(t) as i128)
}

/// Lag of a job, a task (sum over its jobs) or the system (sum over tasks).
/// A job that was never released in the trace has lag 0.
pub fn lag(subject: Subject, t: Tick, trace: &Trace) -> Rational {
    match subject {
        Subject::Job { task, job } => job_record(trace, task, job).map_or(int(0), |r| record_lag(trace, r, t)),
        Subject::Task(task) => trace.jobs_of(task).map(|r| record_lag(trace, r, t)).sum(),
        Subject::System => (0..trace.tasks.len()).map(|i| lag(Subject::Task(i), t, trace)).sum(),
    }
}

/// Suspension lag of a job at `t` (defined for read-write tasks).
pub fn slag(task: usize, job: u64, t: Tick, trace: &Trace) -> Rational {
    job_record(trace, task, job).map_or(int(0), |r| record_slag(trace, r, t))
}

/// System `LAG` at `t`, computed from aggregate service: total PS computation
/// minus the number of occupied processor-ticks before `t`.
pub fn system_lag(t: Tick, trace: &Trace) -> Rational {
    let fluid: Rational = trace
        .jobs
        .iter()
        .map(|j| fluid_allocation(trace.tasks[j.task].utilization, j.release, j.deadline, 0, t))
        .sum();
    let served: usize = (0..t.min(trace.horizon)).map(|s| trace.computing_at(s).count()).sum();
    fluid - int(served as i128)
}

pub fn lag_record(subject: Subject, t: Tick, trace: &Trace) -> LagRecord {
    let slag = match subject {
        Subject::Job { task, job } => Some(slag(task, job, t, trace)),
        _ => None,
    };
    LagRecord { subject, t, lag: lag(subject, t, trace), slag }
}

/// Maximal runs of busy ticks, as half-open `[start, end)` intervals.
pub fn busy_intervals(trace: &Trace) -> Vec<(Tick, Tick)> {
    let mut out = Vec::new();
    let mut start = None;
    for t in 0..trace.horizon {
        match (trace.is_busy(t), start) {
            (true, None) => start = Some(t),
            (false, Some(s)) => {
                out.push((s, t));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, trace.horizon));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lemma1Violation {
    pub start: Tick,
    pub end: Tick,
    pub lag_at_start: Rational,
    pub lag_at_end: Rational,
}

impl fmt::Display for Lemma1Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "busy interval [{}, {}): LAG rose from {} to {}",
            self.start,
            self.end,
            display(&self.lag_at_start),
            display(&self.lag_at_end)
        )
    }
}

/// System LAG must not increase across any busy interval.
pub fn assert_lemma1(trace: &Trace) -> Vec<Lemma1Violation> {
    busy_intervals(trace)
        .into_iter()
        .filter_map(|(start, end)| {
            let lag_at_start = system_lag(start, trace);
            let lag_at_end = system_lag(end, trace);
            (lag_at_end > lag_at_start).then_some(Lemma1Violation { start, end, lag_at_start, lag_at_end })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lemma2Violation {
    pub task: usize,
    pub job: u64,
    pub t: Tick,
    /// Suspension finished by `t`.
    pub suspended: Tick,
    /// Computation performed by `t`.
    pub computed: Tick,
    pub delta: Rational,
}

impl fmt::Display for Lemma2Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "job {}/{} at t={}: suspended {} after computing {} exceeds delta = {}",
            self.task,
            self.job,
            self.t,
            self.suspended,
            self.computed,
            display(&self.delta)
        )
    }
}

/// For every write-only job running its phases in order, suspension done by
/// `t` over computation done by `t` never exceeds `delta`; a job that has not
/// computed has not suspended.
///
/// The ratio only grows when a suspension tick completes, so those instants
/// are the ones checked.
pub fn assert_lemma2(trace: &Trace) -> Vec<Lemma2Violation> {
    let mut out = Vec::new();
    for rec in &trace.jobs {
        let info = &trace.tasks[rec.task];
        if info.kind != TaskKind::WriteOnly || info.flexible {
            continue;
        }
        let delta = info.delta.expect("write-only tasks carry delta");
        for &s in &rec.suspend_ticks {
            let t = s + 1;
            let suspended = rec.suspended_before(t);
            let computed = rec.computed_before(t);
            let ok = if computed == 0 {
                suspended == 0
            } else {
                int(suspended as i128) <= delta * int(computed as i128)
            };
            if !ok {
                out.push(Lemma2Violation { task: rec.task, job: rec.job, t, suspended, computed, delta });
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lemma4Violation {
    pub miss: DeadlineMiss,
    pub lag: Rational,
    pub slag: Rational,
}

impl fmt::Display for Lemma4Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "job {}/{} missed its deadline {} with lag {} (slag {})",
            self.miss.task,
            self.miss.job,
            self.miss.deadline,
            display(&self.lag),
            display(&self.slag)
        )
    }
}

fn lemma4_candidates(trace: &Trace) -> impl Iterator<Item = (DeadlineMiss, &JobRecord)> + '_ {
    let flexible = trace.scheduler == Scheduler::GedfRw;
    trace.misses().into_iter().filter(move |_| flexible).map(move |miss| {
        let rec = job_record(trace, miss.task, miss.job).expect("misses come from job records");
        (miss, rec)
    })
}

/// Under GEDF-R/W a job that misses its deadline still has computation left,
/// i.e. `lag(job, d) > 0`.
///
/// Only jobs that were ready from their release are checked; a job held back
/// by an unfinished predecessor of its own task is outside the claim (see
/// [`lemma4_held_back`]). Traces of other schedulers yield nothing.
pub fn assert_lemma4(trace: &Trace) -> Vec<Lemma4Violation> {
    lemma4_candidates(trace)
        .filter(|(_, rec)| rec.ready_on_release())
        .filter_map(|(miss, rec)| {
            let lag = record_lag(trace, rec, miss.deadline);
            let slag = record_slag(trace, rec, miss.deadline);
            (lag <= int(0)).then_some(Lemma4Violation { miss, lag, slag })
        })
        .collect()
}

/// Misses in a GEDF-R/W trace by jobs that could not start at their release.
pub fn lemma4_held_back(trace: &Trace) -> Vec<DeadlineMiss> {
    lemma4_candidates(trace).filter(|(_, rec)| !rec.ready_on_release()).map(|(miss, _)| miss).collect()
}
