use std::io::{self, Write};

use super::Scheduler;
use crate::rational::Rational;
use crate::task_model::{TaskKind, Tick};

/// Version tag written on the first line of trace CSV files.
pub const TRACE_SCHEMA: &str = "# rwsched-trace v1";

/// Task parameters a trace needs for fluid accounting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaskInfo {
    pub kind: TaskKind,
    pub period: Tick,
    pub utilization: Rational,
    pub suspension_ratio: Rational,
    pub delta: Option<Rational>,
    /// Jobs of this task ran with the flexible suspension pattern.
    pub flexible: bool,
}

/// Everything that happened to one job.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JobRecord {
    pub task: usize,
    /// 1-based.
    pub job: u64,
    pub release: Tick,
    pub deadline: Tick,
    /// Tick at which the predecessor of this job had finished; equals
    /// `release` unless the job was held back.
    pub ready_at: Option<Tick>,
    pub compute_demand: Tick,
    pub suspension_demand: Tick,
    /// Ticks `t` such that the job computed in `[t, t+1)`, ascending.
    pub compute_ticks: Vec<Tick>,
    /// Ticks `t` such that the job suspended in `[t, t+1)`, ascending.
    pub suspend_ticks: Vec<Tick>,
    /// Instant all phases were done.
    pub completion: Option<Tick>,
}

impl JobRecord {
    pub fn response_time(&self) -> Option<Tick> {
        self.completion.map(|c| c - self.release)
    }

    /// Not finished by its deadline (only decidable once the deadline is inside the trace).
    pub fn missed(&self, horizon: Tick) -> bool {
        match self.completion {
            Some(c) => c > self.deadline,
            None => self.deadline <= horizon,
        }
    }

    /// Compute ticks strictly before instant `t`.
    pub fn computed_before(&self, t: Tick) -> Tick {
        self.compute_ticks.partition_point(|&x| x < t) as Tick
    }

    /// Suspend ticks strictly before instant `t`.
    pub fn suspended_before(&self, t: Tick) -> Tick {
        self.suspend_ticks.partition_point(|&x| x < t) as Tick
    }

    /// Ready from its release: no earlier job of the task held it back.
    pub fn ready_on_release(&self) -> bool {
        self.ready_at == Some(self.release)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DeadlineMiss {
    pub task: usize,
    pub job: u64,
    pub deadline: Tick,
    /// `completion - deadline`, or `horizon - deadline` if still unfinished.
    pub tardiness: Tick,
    pub completed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResponseTime {
    pub task: usize,
    pub job: u64,
    pub release: Tick,
    pub response: Tick,
}

/// Tick-by-tick record of a simulated schedule over `[0, horizon)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub m: usize,
    pub horizon: Tick,
    pub scheduler: Scheduler,
    pub tasks: Vec<TaskInfo>,
    pub jobs: Vec<JobRecord>,
    /// `slots[t * m + p]` is the job (index into `jobs`) on processor `p` in `[t, t+1)`.
    pub(crate) slots: Vec<Option<u32>>,
}

impl Trace {
    /// Job on processor `p` in `[t, t+1)`.
    pub fn assignment(&self, t: Tick, p: usize) -> Option<&JobRecord> {
        self.slots[t as usize * self.m + p].map(|j| &self.jobs[j as usize])
    }

    /// Jobs computing in `[t, t+1)` as `(processor, job index)`.
    pub fn computing_at(&self, t: Tick) -> impl Iterator<Item = (usize, usize)> + '_ {
        let row = &self.slots[t as usize * self.m..(t as usize + 1) * self.m];
        row.iter().enumerate().filter_map(|(p, j)| j.map(|j| (p, j as usize)))
    }

    /// All `m` processors compute in `[t, t+1)`.
    pub fn is_busy(&self, t: Tick) -> bool {
        self.computing_at(t).count() == self.m
    }

    /// Jobs of task `task`, in release order.
    pub fn jobs_of(&self, task: usize) -> impl Iterator<Item = &JobRecord> + '_ {
        self.jobs.iter().filter(move |j| j.task == task)
    }

    pub fn misses(&self) -> Vec<DeadlineMiss> {
        let mut out: Vec<_> = self
            .jobs
            .iter()
            .filter(|j| j.missed(self.horizon))
            .map(|j| DeadlineMiss {
                task: j.task,
                job: j.job,
                deadline: j.deadline,
                tardiness: j.completion.unwrap_or(self.horizon) - j.deadline,
                completed: j.completion.is_some(),
            })
            .collect();
        out.sort_by_key(|m| (m.deadline, m.task, m.job));
        out
    }

    pub fn miss_count(&self) -> usize {
        self.jobs.iter().filter(|j| j.missed(self.horizon)).count()
    }

    /// Checks the structural guarantees every trace must satisfy; returns a
    /// description of each breach.
    pub fn check_invariants(&self) -> Vec<String> {
        let mut problems = Vec::new();
        let mut computing = vec![Vec::<usize>::new(); self.horizon as usize];
        for t in 0..self.horizon {
            for (p, j) in self.computing_at(t) {
                if computing[t as usize].contains(&j) {
                    problems.push(format!("tick {t}: job #{j} on two processors (second is {p})"));
                }
                computing[t as usize].push(j);
            }
        }
        for (idx, job) in self.jobs.iter().enumerate() {
            for &t in &job.compute_ticks {
                if !computing[t as usize].contains(&idx) {
                    problems.push(format!("tick {t}: job {}/{} records compute without a processor", job.task, job.job));
                }
            }
            for &t in &job.suspend_ticks {
                if job.compute_ticks.binary_search(&t).is_ok() {
                    problems.push(format!("tick {t}: job {}/{} computes and suspends", job.task, job.job));
                }
            }
            let busy = job.compute_ticks.len() + job.suspend_ticks.len();
            if busy as Tick > job.compute_demand + job.suspension_demand {
                problems.push(format!("job {}/{} overran its demand", job.task, job.job));
            }
            if let Some(first) = job.compute_ticks.first().or(job.suspend_ticks.first()) {
                if job.ready_at.is_none_or(|r| *first < r) {
                    problems.push(format!("job {}/{} ran before it was ready", job.task, job.job));
                }
            }
        }
        problems
    }

    /// Writes the trace as CSV: a schema line, a header, then one row per
    /// event ordered by tick (release, compute, suspend, complete, miss).
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{TRACE_SCHEMA}")?;
        let mut rows: Vec<(Tick, u8, usize, usize, u64, Option<usize>)> = Vec::new();
        for (idx, j) in self.jobs.iter().enumerate() {
            rows.push((j.release, 0, j.task, idx, j.job, None));
            for &t in &j.suspend_ticks {
                rows.push((t, 2, j.task, idx, j.job, None));
            }
            if let Some(c) = j.completion {
                rows.push((c, 3, j.task, idx, j.job, None));
            }
            if j.missed(self.horizon) {
                rows.push((j.deadline, 4, j.task, idx, j.job, None));
            }
        }
        for t in 0..self.horizon {
            for (p, idx) in self.computing_at(t) {
                let j = &self.jobs[idx];
                rows.push((t, 1, p, idx, j.job, Some(p)));
            }
        }
        rows.sort_by_key(|&(t, kind, key, idx, _, _)| (t, kind, key, idx));

        let mut w = csv::Writer::from_writer(out);
        w.write_record(["tick", "event", "processor", "task", "job"])?;
        for (t, kind, _, idx, job, processor) in rows {
            let event = ["release", "compute", "suspend", "complete", "miss"][kind as usize];
            let processor = processor.map(|p| p.to_string()).unwrap_or_default();
            w.write_record([
                t.to_string(),
                event.to_string(),
                processor,
                self.jobs[idx].task.to_string(),
                job.to_string(),
            ])?;
        }
        w.flush()
    }
}

/// Response time of every completed job, in trace order.
pub fn response_times(trace: &Trace) -> Vec<ResponseTime> {
    trace
        .jobs
        .iter()
        .filter_map(|j| {
            j.response_time().map(|response| ResponseTime { task: j.task, job: j.job, release: j.release, response })
        })
        .collect()
}

/// Jobs still unfinished at the horizon, as `(task, job)`.
pub fn incomplete_jobs(trace: &Trace) -> Vec<(usize, u64)> {
    trace.jobs.iter().filter(|j| j.completion.is_none()).map(|j| (j.task, j.job)).collect()
}

/// Earliest miss by deadline; ties go to the lower task index.
pub fn first_deadline_miss(trace: &Trace) -> Option<DeadlineMiss> {
    trace.misses().into_iter().next()
}
