//! Transformed-system documents: a task-system document whose tasks each
//! carry a `placement` table listing the per-job phase templates.

use serde::{Deserialize, Serialize};

use super::{transform, PhaseTemplate, TransformedSystem, TransformedTask};
use crate::task_model::{ParseError, SystemDocument, TaskSystem};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlacementDocument {
    pub epilogue: Vec<PhaseItemDocument>,
    pub first_job: Vec<PhaseItemDocument>,
    pub prefetch: Vec<PhaseItemDocument>,
    pub steady: Vec<PhaseItemDocument>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseItemDocument {
    pub job_offset: i64,
    pub kind: String,
    pub length: u64,
    pub origin: String,
}

impl PhaseItemDocument {
    fn from_template(p: &PhaseTemplate) -> Self {
        Self {
            job_offset: p.job_offset,
            kind: match p.kind() {
                super::PhaseKind::Compute => "compute",
                super::PhaseKind::Suspend => "suspend",
            }
            .to_string(),
            length: p.length,
            origin: p.phase.as_str().to_string(),
        }
    }
}

impl PlacementDocument {
    fn from_task(t: &TransformedTask) -> Self {
        let list = |items: &[PhaseTemplate]| items.iter().map(PhaseItemDocument::from_template).collect();
        Self {
            epilogue: list(&t.epilogue),
            first_job: list(&t.first_job),
            prefetch: list(&t.prefetch),
            steady: list(&t.steady),
        }
    }
}

pub fn serialize_transformed(system: &TransformedSystem) -> String {
    let mut doc = SystemDocument::from_system(system.base());
    for (task_doc, task) in doc.tasks.iter_mut().zip(system.tasks()) {
        task_doc.placement = Some(PlacementDocument::from_task(task));
    }
    doc.render()
}

/// Either kind of system file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnySystem {
    Original(TaskSystem),
    Transformed(TransformedSystem),
}

impl AnySystem {
    pub fn base(&self) -> &TaskSystem {
        match self {
            AnySystem::Original(s) => s,
            AnySystem::Transformed(t) => t.base(),
        }
    }
}

/// Reads a task-system or transformed-system document.
///
/// Placement tables must be present on every task or on none, and must match
/// the placement derived from the task's own phases.
pub fn parse_any_system(text: &str) -> Result<AnySystem, ParseError> {
    let doc = SystemDocument::parse(text)?;
    let placed = doc.tasks.iter().filter(|t| t.placement.is_some()).count();
    let base = doc.to_system()?;
    if placed == 0 {
        return Ok(AnySystem::Original(base));
    }
    if placed != doc.tasks.len() {
        return Err(ParseError::Schema("placement tables must be given for every task or for none".into()));
    }
    let transformed = transform(&base).map_err(|e| ParseError::Schema(e.to_string()))?;
    for task_doc in &doc.tasks {
        let task = &transformed.tasks()[task_doc.id as usize];
        if task_doc.placement.as_ref() != Some(&PlacementDocument::from_task(task)) {
            return Err(ParseError::Schema(format!(
                "task {}: placement does not match its read/compute/write phases",
                task.id()
            )));
        }
    }
    Ok(AnySystem::Transformed(transformed))
}

/// Reads a transformed-system document; plain task systems are rejected.
pub fn parse_transformed(text: &str) -> Result<TransformedSystem, ParseError> {
    match parse_any_system(text)? {
        AnySystem::Transformed(t) => Ok(t),
        AnySystem::Original(_) => Err(ParseError::Schema("document has no placement tables".into())),
    }
}
