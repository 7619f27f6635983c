//! Task and system types for read-write and write-only suspending tasks.
//!
//! Time is an abstract integer tick; every phase length and period is a whole
//! number of ticks. Deadlines are implicit (equal to the period).

mod file;

pub use file::{parse_task_system, serialize_task_system, ParseError, SystemDocument, TaskDocument};

use std::fmt;

use num_integer::Integer;
use thiserror::Error;

use crate::rational::{int, Rational};

/// Time instants and durations, in ticks.
pub type Tick = u64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TaskKind {
    /// compute, write, compute
    WriteOnly,
    /// read, compute, write
    ReadWrite,
}

impl TaskKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TaskKind::WriteOnly => "write-only",
            TaskKind::ReadWrite => "read-write",
        }
    }
}

impl fmt::Display for TaskKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Per-job phase lengths, in the fixed order each task kind executes them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phases {
    ReadWrite { read: Tick, compute: Tick, write: Tick },
    WriteOnly { compute1: Tick, write: Tick, compute2: Tick },
}

/// One sporadic suspending task with an implicit deadline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TaskSpec {
    /// Position in the owning system; lower ids win deadline ties.
    pub id: usize,
    /// Minimum separation between releases, also the relative deadline.
    pub period: Tick,
    pub phases: Phases,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error("task {id}: period must be at least one tick")]
    NonPositivePeriod { id: usize },
    #[error("task {id}: phase `{phase}` has negative length {value}")]
    NegativePhase { id: usize, phase: &'static str, value: i64 },
    #[error("task {id}: utilization plus suspension ratio is {total}, which exceeds 1")]
    UtilizationOverflow { id: usize, total: String },
    #[error("task {id}: write-only task needs a first compute phase of at least one tick")]
    ZeroFirstCompute { id: usize },
}

/// Exact ratios derived from a task's phase lengths and period.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivedParams {
    /// compute / period
    pub utilization: Rational,
    /// suspension / period
    pub suspension_ratio: Rational,
    /// write / first compute; write-only tasks only
    pub delta: Option<Rational>,
    /// utilization + suspension_ratio
    pub z: Rational,
}

impl TaskSpec {
    pub fn read_write(id: usize, read: Tick, compute: Tick, write: Tick, period: Tick) -> Self {
        Self { id, period, phases: Phases::ReadWrite { read, compute, write } }
    }

    pub fn write_only(id: usize, compute1: Tick, write: Tick, compute2: Tick, period: Tick) -> Self {
        Self { id, period, phases: Phases::WriteOnly { compute1, write, compute2 } }
    }

    pub fn kind(&self) -> TaskKind {
        match self.phases {
            Phases::ReadWrite { .. } => TaskKind::ReadWrite,
            Phases::WriteOnly { .. } => TaskKind::WriteOnly,
        }
    }

    /// Total computation per job.
    pub fn compute(&self) -> Tick {
        match self.phases {
            Phases::ReadWrite { compute, .. } => compute,
            Phases::WriteOnly { compute1, compute2, .. } => compute1 + compute2,
        }
    }

    /// Total suspension per job.
    pub fn suspension(&self) -> Tick {
        match self.phases {
            Phases::ReadWrite { read, write, .. } => read + write,
            Phases::WriteOnly { write, .. } => write,
        }
    }

    pub fn validate(&self) -> Result<(), ValidationError> {
        if self.period == 0 {
            return Err(ValidationError::NonPositivePeriod { id: self.id });
        }
        if let Phases::WriteOnly { compute1: 0, .. } = self.phases {
            return Err(ValidationError::ZeroFirstCompute { id: self.id });
        }
        let total = self.compute() as u128 + self.suspension() as u128;
        if total > self.period as u128 {
            return Err(ValidationError::UtilizationOverflow {
                id: self.id,
                total: format!("{}/{}", total, self.period),
            });
        }
        Ok(())
    }

    pub fn utilization(&self) -> Rational {
        Rational::new(self.compute() as i128, self.period as i128)
    }

    pub fn suspension_ratio(&self) -> Rational {
        Rational::new(self.suspension() as i128, self.period as i128)
    }

    /// Write length over first-compute length, for write-only tasks.
    pub fn delta(&self) -> Option<Rational> {
        match self.phases {
            Phases::WriteOnly { compute1, write, .. } if compute1 > 0 => {
                Some(Rational::new(write as i128, compute1 as i128))
            }
            _ => None,
        }
    }

    /// Panics on a zero period; call [`TaskSpec::validate`] first.
    pub fn derived(&self) -> DerivedParams {
        let utilization = self.utilization();
        let suspension_ratio = self.suspension_ratio();
        DerivedParams {
            z: utilization + suspension_ratio,
            delta: self.delta(),
            utilization,
            suspension_ratio,
        }
    }

    /// The same task with every phase length and the period multiplied by `factor`.
    pub fn scaled(&self, factor: Tick) -> Self {
        let phases = match self.phases {
            Phases::ReadWrite { read, compute, write } => Phases::ReadWrite {
                read: read * factor,
                compute: compute * factor,
                write: write * factor,
            },
            Phases::WriteOnly { compute1, write, compute2 } => Phases::WriteOnly {
                compute1: compute1 * factor,
                write: write * factor,
                compute2: compute2 * factor,
            },
        };
        Self { id: self.id, period: self.period * factor, phases }
    }
}

pub fn validate_task(task: &TaskSpec) -> Result<(), ValidationError> {
    task.validate()
}

pub fn derived_params(task: &TaskSpec) -> DerivedParams {
    task.derived()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SystemError {
    #[error("a task system needs at least one task")]
    Empty,
    #[error("a task system needs at least one processor")]
    NoProcessors,
    #[error("task id {id} appears more than once")]
    DuplicateId { id: usize },
    #[error("task at position {position} has id {id}; ids must equal list positions")]
    IdMismatch { position: usize, id: usize },
    #[error(transparent)]
    Task(#[from] ValidationError),
}

/// Tasks sharing `m` identical processors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaskSystem {
    m: usize,
    tasks: Vec<TaskSpec>,
    tick_unit: String,
}

impl TaskSystem {
    pub fn new(m: usize, tasks: Vec<TaskSpec>) -> Result<Self, SystemError> {
        Self::with_tick_unit(m, tasks, "tick")
    }

    pub fn with_tick_unit(
        m: usize,
        tasks: Vec<TaskSpec>,
        tick_unit: impl Into<String>,
    ) -> Result<Self, SystemError> {
        if m == 0 {
            return Err(SystemError::NoProcessors);
        }
        if tasks.is_empty() {
            return Err(SystemError::Empty);
        }
        for (position, task) in tasks.iter().enumerate() {
            if task.id != position {
                return Err(SystemError::IdMismatch { position, id: task.id });
            }
            task.validate()?;
        }
        Ok(Self { m, tasks, tick_unit: tick_unit.into() })
    }

    /// Builds a system from tasks in order, assigning ids by position.
    pub fn from_tasks(m: usize, tasks: impl IntoIterator<Item = TaskSpec>) -> Result<Self, SystemError> {
        let tasks = tasks
            .into_iter()
            .enumerate()
            .map(|(id, t)| TaskSpec { id, ..t })
            .collect();
        Self::new(m, tasks)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn tasks(&self) -> &[TaskSpec] {
        &self.tasks
    }

    pub fn len(&self) -> usize {
        self.tasks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tasks.is_empty()
    }

    pub fn tick_unit(&self) -> &str {
        &self.tick_unit
    }

    pub fn task(&self, id: usize) -> &TaskSpec {
        &self.tasks[id]
    }

    pub fn utilization_sum(&self) -> Rational {
        self.tasks.iter().map(TaskSpec::utilization).sum()
    }

    pub fn suspension_sum(&self) -> Rational {
        self.tasks.iter().map(TaskSpec::suspension_ratio).sum()
    }

    /// Returns `Some(kind)` when every task has the same kind.
    pub fn uniform_kind(&self) -> Option<TaskKind> {
        let first = self.tasks[0].kind();
        self.tasks.iter().all(|t| t.kind() == first).then_some(first)
    }

    /// The ratio view consumed by the schedulability tests.
    pub fn profile(&self) -> SystemProfile {
        SystemProfile {
            m: self.m,
            tasks: self.tasks.iter().map(|t| (t.kind(), t.derived())).collect(),
        }
    }

    /// Same system with everything multiplied by `factor`.
    pub fn scaled(&self, factor: Tick) -> Self {
        Self {
            m: self.m,
            tasks: self.tasks.iter().map(|t| t.scaled(factor)).collect(),
            tick_unit: self.tick_unit.clone(),
        }
    }

    /// Same system without task `id`; remaining tasks are renumbered.
    pub fn without_task(&self, id: usize) -> Option<Self> {
        let rest: Vec<_> = self.tasks.iter().filter(|t| t.id != id).copied().collect();
        let mut sys = Self::from_tasks(self.m, rest).ok()?;
        sys.tick_unit = self.tick_unit.clone();
        Some(sys)
    }

    /// Least common multiple of all periods, or `None` if it does not fit in a tick.
    pub fn checked_hyperperiod(&self) -> Option<Tick> {
        self.tasks.iter().try_fold(1u64, |acc, t| {
            let g = acc.gcd(&t.period);
            (acc / g).checked_mul(t.period)
        })
    }

    /// Panics if the hyperperiod overflows a tick; see [`TaskSystem::checked_hyperperiod`].
    pub fn hyperperiod(&self) -> Tick {
        self.checked_hyperperiod().expect("hyperperiod overflows u64")
    }
}

pub fn hyperperiod(system: &TaskSystem) -> Tick {
    system.hyperperiod()
}

/// Ratios of a task system, detached from integer phase lengths.
///
/// Randomly generated systems carry rational phase lengths and are tested
/// through this view without being quantized to ticks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemProfile {
    pub m: usize,
    pub tasks: Vec<(TaskKind, DerivedParams)>,
}

impl SystemProfile {
    pub fn utilization_sum(&self) -> Rational {
        self.tasks.iter().map(|(_, d)| d.utilization).sum()
    }

    pub fn suspension_sum(&self) -> Rational {
        self.tasks.iter().map(|(_, d)| d.suspension_ratio).sum()
    }

    pub fn max_utilization(&self) -> Rational {
        self.tasks.iter().map(|(_, d)| d.utilization).max().unwrap_or_else(|| int(0))
    }

    pub fn max_z(&self) -> Rational {
        self.tasks.iter().map(|(_, d)| d.z).max().unwrap_or_else(|| int(0))
    }
}
