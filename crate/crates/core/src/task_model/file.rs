//! TOML task-system documents.
//!
//! ```toml
//! m = 1
//! tick_unit = "1 ms"
//!
//! [[tasks]]
//! T = 15
//! id = 0
//! kind = "read-write"
//!
//! [tasks.phases]
//! C = 5
//! R = 5
//! W = 5
//! ```
//!
//! Write-only tasks use `C1`, `W`, `C2` in `phases`. The canonical form lists
//! tasks by id with keys in ASCII order inside every table. Transformed
//! systems add a `placement` table per task (see [`crate::io_placement`]).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Phases, SystemError, TaskSpec, TaskSystem, Tick, ValidationError};
use crate::io_placement::PlacementDocument;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("task id {id} appears more than once")]
    DuplicateId { id: usize },
    #[error(transparent)]
    Invalid(#[from] SystemError),
}

impl From<ValidationError> for ParseError {
    fn from(e: ValidationError) -> Self {
        ParseError::Invalid(SystemError::Task(e))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemDocument {
    pub m: i64,
    #[serde(default)]
    pub tasks: Vec<TaskDocument>,
    #[serde(default = "default_tick_unit")]
    pub tick_unit: String,
}

fn default_tick_unit() -> String {
    "tick".to_string()
}

#[allow(non_snake_case)]
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskDocument {
    pub T: i64,
    pub id: i64,
    pub kind: String,
    pub phases: PhasesDocument,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub placement: Option<PlacementDocument>,
}

#[allow(non_snake_case)]
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhasesDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub C: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub C1: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub C2: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub R: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub W: Option<i64>,
}

impl SystemDocument {
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        toml::from_str(text).map_err(|e| ParseError::Syntax(e.to_string()))
    }

    pub fn render(&self) -> String {
        toml::to_string(self).expect("task documents always serialize")
    }

    pub fn from_system(system: &TaskSystem) -> Self {
        Self {
            m: system.m() as i64,
            tasks: system.tasks().iter().map(TaskDocument::from_task).collect(),
            tick_unit: system.tick_unit().to_string(),
        }
    }

    /// Validates the document and builds the system it describes.
    pub fn to_system(&self) -> Result<TaskSystem, ParseError> {
        if self.m < 1 {
            return Err(SystemError::NoProcessors.into());
        }
        let mut tasks = Vec::with_capacity(self.tasks.len());
        for doc in &self.tasks {
            tasks.push(doc.to_task()?);
        }
        tasks.sort_by_key(|t| t.id);
        if let Some(w) = tasks.windows(2).find(|w| w[0].id == w[1].id) {
            return Err(ParseError::DuplicateId { id: w[0].id });
        }
        Ok(TaskSystem::with_tick_unit(self.m as usize, tasks, self.tick_unit.clone())?)
    }
}

impl TaskDocument {
    pub fn from_task(task: &TaskSpec) -> Self {
        let phases = match task.phases {
            Phases::ReadWrite { read, compute, write } => PhasesDocument {
                C: Some(compute as i64),
                R: Some(read as i64),
                W: Some(write as i64),
                ..Default::default()
            },
            Phases::WriteOnly { compute1, write, compute2 } => PhasesDocument {
                C1: Some(compute1 as i64),
                C2: Some(compute2 as i64),
                W: Some(write as i64),
                ..Default::default()
            },
        };
        Self {
            T: task.period as i64,
            id: task.id as i64,
            kind: task.kind().as_str().to_string(),
            phases,
            placement: None,
        }
    }

    pub fn to_task(&self) -> Result<TaskSpec, ParseError> {
        if self.id < 0 {
            return Err(ParseError::Schema(format!("negative task id {}", self.id)));
        }
        let id = self.id as usize;
        if self.T < 1 {
            return Err(ValidationError::NonPositivePeriod { id }.into());
        }
        let p = &self.phases;
        let field = |name: &'static str, value: Option<i64>| -> Result<Tick, ParseError> {
            let value = value.ok_or_else(|| {
                ParseError::Schema(format!("task {id}: missing phase `{name}`"))
            })?;
            if value < 0 {
                return Err(ValidationError::NegativePhase { id, phase: name, value }.into());
            }
            Ok(value as Tick)
        };
        let reject = |name: &str, value: Option<i64>| -> Result<(), ParseError> {
            match value {
                Some(_) => Err(ParseError::Schema(format!(
                    "task {id}: phase `{name}` does not belong to a {} task",
                    self.kind
                ))),
                None => Ok(()),
            }
        };
        let phases = match self.kind.as_str() {
            "read-write" => {
                reject("C1", p.C1)?;
                reject("C2", p.C2)?;
                Phases::ReadWrite {
                    read: field("R", p.R)?,
                    compute: field("C", p.C)?,
                    write: field("W", p.W)?,
                }
            }
            "write-only" => {
                reject("C", p.C)?;
                reject("R", p.R)?;
                Phases::WriteOnly {
                    compute1: field("C1", p.C1)?,
                    write: field("W", p.W)?,
                    compute2: field("C2", p.C2)?,
                }
            }
            other => return Err(ParseError::Schema(format!("task {id}: unknown kind `{other}`"))),
        };
        let task = TaskSpec { id, period: self.T as Tick, phases };
        task.validate()?;
        Ok(task)
    }
}

/// Reads a task-system document. Placement tables, if present, are ignored.
pub fn parse_task_system(text: &str) -> Result<TaskSystem, ParseError> {
    SystemDocument::parse(text)?.to_system()
}

/// Canonical text form of `system`.
pub fn serialize_task_system(system: &TaskSystem) -> String {
    SystemDocument::from_system(system).render()
}
