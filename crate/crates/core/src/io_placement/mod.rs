//! I/O placement for read-write tasks.
//!
//! Each job's read is performed by its predecessor and each job's write by its
//! successor. After the transformation, job `j` of a task carries
//!
//! - `j = 0` (pre-fetch): the read of job 1;
//! - `j = 1`: the compute of job 1 and the read of job 2;
//! - `j >= 2`: the write of job `j-1`, the compute of job `j`, the read of job `j+1`;
//! - `j = last + 1` (epilogue): the write of the last job.
//!
//! None of the suspensions inside a transformed job depends on that job's
//! compute, so a scheduler may place them anywhere in the job's window.
//! Per-task utilization and suspension ratio are unchanged.

mod file;

pub use file::{
    parse_any_system, parse_transformed, serialize_transformed, AnySystem, PhaseItemDocument,
    PlacementDocument,
};

use std::fmt;

use thiserror::Error;

use crate::rational::Rational;
use crate::task_model::{Phases, TaskKind, TaskSpec, TaskSystem, Tick};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PhaseKind {
    Compute,
    Suspend,
}

/// Which phase of the original job a transformed item came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OriginPhase {
    Read,
    Compute,
    Write,
}

impl OriginPhase {
    pub fn as_str(self) -> &'static str {
        match self {
            OriginPhase::Read => "read",
            OriginPhase::Compute => "compute",
            OriginPhase::Write => "write",
        }
    }

    pub fn kind(self) -> PhaseKind {
        match self {
            OriginPhase::Compute => PhaseKind::Compute,
            OriginPhase::Read | OriginPhase::Write => PhaseKind::Suspend,
        }
    }
}

impl fmt::Display for OriginPhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Origin {
    pub task: usize,
    /// 1-based index of the original job.
    pub job: u64,
    pub phase: OriginPhase,
}

/// One phase of a concrete job.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PhaseItem {
    pub kind: PhaseKind,
    pub length: Tick,
    pub origin: Origin,
}

pub type PhaseList = Vec<PhaseItem>;

/// A phase relative to the transformed job that carries it: the item belongs
/// to original job `j + job_offset`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PhaseTemplate {
    pub phase: OriginPhase,
    pub length: Tick,
    pub job_offset: i64,
}

impl PhaseTemplate {
    fn new(phase: OriginPhase, length: Tick, job_offset: i64) -> Self {
        Self { phase, length, job_offset }
    }

    pub fn kind(&self) -> PhaseKind {
        self.phase.kind()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlacementError {
    #[error("I/O placement applies to read-write tasks only, but task {task} is {found}")]
    WrongTaskKind { task: usize, found: TaskKind },
    #[error("job index {job} is outside 0..={max} for a horizon of {last_job} jobs")]
    IndexOutOfRange { job: u64, last_job: u64, max: u64 },
}

/// A read-write task after phase reassignment.
///
/// Suspension items inside one job are unordered with respect to its compute
/// item; list order is only the order in which pending suspension is drained
/// (write of the predecessor first).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransformedTask {
    pub base: TaskSpec,
    pub prefetch: Vec<PhaseTemplate>,
    pub first_job: Vec<PhaseTemplate>,
    pub steady: Vec<PhaseTemplate>,
    pub epilogue: Vec<PhaseTemplate>,
}

fn nonzero(items: impl IntoIterator<Item = PhaseTemplate>) -> Vec<PhaseTemplate> {
    items.into_iter().filter(|p| p.length > 0).collect()
}

impl TransformedTask {
    pub fn new(base: TaskSpec) -> Result<Self, PlacementError> {
        let Phases::ReadWrite { read, compute, write } = base.phases else {
            return Err(PlacementError::WrongTaskKind { task: base.id, found: base.kind() });
        };
        use OriginPhase::*;
        Ok(Self {
            base,
            prefetch: nonzero([PhaseTemplate::new(Read, read, 1)]),
            first_job: nonzero([PhaseTemplate::new(Compute, compute, 0), PhaseTemplate::new(Read, read, 1)]),
            steady: nonzero([
                PhaseTemplate::new(Write, write, -1),
                PhaseTemplate::new(Compute, compute, 0),
                PhaseTemplate::new(Read, read, 1),
            ]),
            epilogue: nonzero([PhaseTemplate::new(Write, write, -1)]),
        })
    }

    pub fn id(&self) -> usize {
        self.base.id
    }

    pub fn period(&self) -> Tick {
        self.base.period
    }

    fn total(items: &[PhaseTemplate], kind: PhaseKind) -> Tick {
        items.iter().filter(|p| p.kind() == kind).map(|p| p.length).sum()
    }

    /// Compute per steady-state job.
    pub fn steady_compute(&self) -> Tick {
        Self::total(&self.steady, PhaseKind::Compute)
    }

    /// Suspension per steady-state job.
    pub fn steady_suspension(&self) -> Tick {
        Self::total(&self.steady, PhaseKind::Suspend)
    }

    pub fn utilization(&self) -> Rational {
        Rational::new(self.steady_compute() as i128, self.period() as i128)
    }

    pub fn suspension_ratio(&self) -> Rational {
        Rational::new(self.steady_suspension() as i128, self.period() as i128)
    }

    /// Template for job `job` in an unbounded job sequence (`job >= 1`).
    pub fn template(&self, job: u64) -> &[PhaseTemplate] {
        match job {
            0 => &self.prefetch,
            1 => &self.first_job,
            _ => &self.steady,
        }
    }

    fn instantiate(&self, job: u64, items: &[PhaseTemplate]) -> PhaseList {
        items
            .iter()
            .map(|p| PhaseItem {
                kind: p.kind(),
                length: p.length,
                origin: Origin {
                    task: self.base.id,
                    job: (job as i64 + p.job_offset) as u64,
                    phase: p.phase,
                },
            })
            .collect()
    }

    /// Concrete phases of transformed job `job` when original jobs `1..=last_job` exist.
    ///
    /// The last job does not carry a read for the nonexistent job `last_job + 1`,
    /// so every original phase is executed exactly once.
    pub fn job_phases(&self, job: u64, last_job: u64) -> Result<PhaseList, PlacementError> {
        if last_job == 0 || job > last_job + 1 {
            return Err(PlacementError::IndexOutOfRange { job, last_job, max: last_job + 1 });
        }
        let items: Vec<PhaseTemplate> = if job == last_job + 1 {
            self.epilogue.clone()
        } else {
            let template = self.template(job);
            if job == last_job {
                template.iter().filter(|p| p.job_offset <= 0).copied().collect()
            } else {
                template.to_vec()
            }
        };
        Ok(self.instantiate(job, &items))
    }
}

pub fn job_phases(task: &TransformedTask, job: u64, last_job: u64) -> Result<PhaseList, PlacementError> {
    task.job_phases(job, last_job)
}

/// A read-write system after I/O placement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransformedSystem {
    base: TaskSystem,
    tasks: Vec<TransformedTask>,
}

impl TransformedSystem {
    pub fn base(&self) -> &TaskSystem {
        &self.base
    }

    pub fn tasks(&self) -> &[TransformedTask] {
        &self.tasks
    }

    pub fn m(&self) -> usize {
        self.base.m()
    }

    pub fn utilization_sum(&self) -> Rational {
        self.tasks.iter().map(TransformedTask::utilization).sum()
    }

    pub fn suspension_sum(&self) -> Rational {
        self.tasks.iter().map(TransformedTask::suspension_ratio).sum()
    }
}

pub fn transform(system: &TaskSystem) -> Result<TransformedSystem, PlacementError> {
    let tasks = system
        .tasks()
        .iter()
        .map(|t| TransformedTask::new(*t))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(TransformedSystem { base: system.clone(), tasks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn fig1_task() -> TransformedTask {
        TransformedTask::new(TaskSpec::read_write(0, 5, 5, 5, 15)).unwrap()
    }

    fn summary(list: &PhaseList) -> Vec<(PhaseKind, Tick, OriginPhase, u64)> {
        list.iter().map(|p| (p.kind, p.length, p.origin.phase, p.origin.job)).collect()
    }

    #[test]
    fn steady_job_carries_three_phases() {
        let t = fig1_task();
        let job2 = t.job_phases(2, 10).unwrap();
        assert_eq!(
            summary(&job2),
            vec![
                (PhaseKind::Suspend, 5, OriginPhase::Write, 1),
                (PhaseKind::Compute, 5, OriginPhase::Compute, 2),
                (PhaseKind::Suspend, 5, OriginPhase::Read, 3),
            ]
        );
        assert_eq!(t.steady_suspension(), 10);
        assert_eq!(t.steady_compute(), 5);
    }

    #[test]
    fn prefetch_and_first_job() {
        let t = fig1_task();
        assert_eq!(summary(&t.job_phases(0, 3).unwrap()), vec![(PhaseKind::Suspend, 5, OriginPhase::Read, 1)]);
        assert_eq!(
            summary(&t.job_phases(1, 3).unwrap()),
            vec![(PhaseKind::Compute, 5, OriginPhase::Compute, 1), (PhaseKind::Suspend, 5, OriginPhase::Read, 2)]
        );
        assert_eq!(summary(&t.job_phases(4, 3).unwrap()), vec![(PhaseKind::Suspend, 5, OriginPhase::Write, 3)]);
        assert_eq!(
            summary(&t.job_phases(3, 3).unwrap()),
            vec![(PhaseKind::Suspend, 5, OriginPhase::Write, 2), (PhaseKind::Compute, 5, OriginPhase::Compute, 3)]
        );
    }

    #[test]
    fn out_of_range() {
        let t = fig1_task();
        assert!(matches!(t.job_phases(5, 3), Err(PlacementError::IndexOutOfRange { job: 5, .. })));
        assert!(t.job_phases(0, 0).is_err());
    }

    #[test]
    fn compute_only_task_is_unchanged() {
        let t = TransformedTask::new(TaskSpec::read_write(0, 0, 4, 0, 9)).unwrap();
        assert!(t.prefetch.is_empty());
        assert!(t.epilogue.is_empty());
        for j in 1..=3 {
            assert_eq!(summary(&t.job_phases(j, 3).unwrap()), vec![(PhaseKind::Compute, 4, OriginPhase::Compute, j)]);
        }
    }

    #[test]
    fn ratios_are_preserved() {
        let sys = TaskSystem::from_tasks(1, [TaskSpec::read_write(0, 5, 5, 5, 15); 2]).unwrap();
        let tr = transform(&sys).unwrap();
        for t in tr.tasks() {
            assert_eq!(t.utilization(), ratio(1, 3));
            assert_eq!(t.suspension_ratio(), ratio(2, 3));
        }
        assert_eq!(tr.utilization_sum(), sys.utilization_sum());
        assert_eq!(tr.suspension_sum(), sys.suspension_sum());
    }

    #[test]
    fn write_only_is_rejected() {
        let sys = TaskSystem::from_tasks(1, [TaskSpec::write_only(0, 1, 1, 1, 9)]).unwrap();
        assert_eq!(transform(&sys), Err(PlacementError::WrongTaskKind { task: 0, found: TaskKind::WriteOnly }));
    }
}
