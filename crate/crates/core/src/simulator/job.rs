use crate::io_placement::PhaseKind;
use crate::task_model::Tick;

/// How a job may interleave its phases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SuspensionPattern {
    /// Phases run strictly in list order; a suspension blocks computation.
    Ordered,
    /// Suspension may be taken in any tick the job does not compute.
    Flexible,
}

/// Run-time state of one released job.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JobState {
    pub task: usize,
    /// 1-based job index within its task.
    pub job: u64,
    pub release: Tick,
    pub deadline: Tick,
    pub pattern: SuspensionPattern,
    /// False while an earlier job of the same task is unfinished.
    pub ready: bool,
    remaining: Vec<(PhaseKind, Tick)>,
}

impl JobState {
    pub fn new(
        task: usize,
        job: u64,
        release: Tick,
        deadline: Tick,
        pattern: SuspensionPattern,
        phases: impl IntoIterator<Item = (PhaseKind, Tick)>,
    ) -> Self {
        Self {
            task,
            job,
            release,
            deadline,
            pattern,
            ready: true,
            remaining: phases.into_iter().filter(|&(_, len)| len > 0).collect(),
        }
    }

    /// Priority key: earlier deadline first, then lower task index, then earlier job.
    pub fn priority(&self) -> (Tick, usize, u64) {
        (self.deadline, self.task, self.job)
    }

    fn left(&self, kind: PhaseKind) -> Tick {
        self.remaining.iter().filter(|(k, _)| *k == kind).map(|(_, n)| n).sum()
    }

    pub fn compute_left(&self) -> Tick {
        self.left(PhaseKind::Compute)
    }

    pub fn suspension_left(&self) -> Tick {
        self.left(PhaseKind::Suspend)
    }

    /// Some phase unfinished.
    pub fn is_pending(&self) -> bool {
        self.remaining.iter().any(|&(_, n)| n > 0)
    }

    /// Some computation unfinished.
    pub fn is_comp_pending(&self) -> bool {
        self.compute_left() > 0
    }

    /// Some suspension unfinished.
    pub fn is_sus_pending(&self) -> bool {
        self.suspension_left() > 0
    }

    /// The phase an ordered job is currently in.
    pub fn current_phase(&self) -> Option<PhaseKind> {
        self.remaining.iter().find(|&&(_, n)| n > 0).map(|&(k, _)| k)
    }

    /// Comp-pending and able to compute in the next tick.
    pub fn is_comp_available(&self) -> bool {
        self.ready
            && match self.pattern {
                SuspensionPattern::Ordered => self.current_phase() == Some(PhaseKind::Compute),
                SuspensionPattern::Flexible => self.is_comp_pending(),
            }
    }

    /// An ordered job whose current phase is a suspension must suspend.
    pub fn must_suspend(&self) -> bool {
        self.ready
            && self.pattern == SuspensionPattern::Ordered
            && self.current_phase() == Some(PhaseKind::Suspend)
    }

    fn advance(&mut self, kind: PhaseKind) {
        let slot = match self.pattern {
            SuspensionPattern::Ordered => self.remaining.iter_mut().find(|(_, n)| *n > 0),
            SuspensionPattern::Flexible => self.remaining.iter_mut().find(|(k, n)| *k == kind && *n > 0),
        };
        match slot {
            Some((k, n)) if *k == kind => *n -= 1,
            _ => panic!("job {}/{} cannot {:?} now", self.task, self.job, kind),
        }
    }

    pub(crate) fn compute_one(&mut self) {
        self.advance(PhaseKind::Compute);
    }

    /// Drains suspension in list order (a pending write before a read).
    pub(crate) fn suspend_one(&mut self) {
        self.advance(PhaseKind::Suspend);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use PhaseKind::*;

    fn rw(pattern: SuspensionPattern) -> JobState {
        JobState::new(0, 1, 0, 15, pattern, [(Suspend, 2), (Compute, 1), (Suspend, 1)])
    }

    #[test]
    fn ordered_job_flags() {
        let mut j = rw(SuspensionPattern::Ordered);
        assert!(j.is_pending() && j.is_comp_pending() && j.is_sus_pending());
        assert!(!j.is_comp_available());
        assert!(j.must_suspend());
        j.suspend_one();
        j.suspend_one();
        assert!(j.is_comp_available());
        j.compute_one();
        assert!(!j.is_comp_pending());
        assert!(j.must_suspend());
        j.suspend_one();
        assert!(!j.is_pending());
    }

    #[test]
    fn flexible_job_computes_first() {
        let mut j = rw(SuspensionPattern::Flexible);
        assert!(j.is_comp_available());
        assert!(!j.must_suspend());
        j.compute_one();
        assert!(!j.is_comp_available());
        j.suspend_one();
        assert_eq!(j.suspension_left(), 2);
    }

    #[test]
    fn blocked_job_is_not_available() {
        let mut j = rw(SuspensionPattern::Flexible);
        j.ready = false;
        assert!(!j.is_comp_available());
        assert!(j.is_comp_pending());
    }

    #[test]
    #[should_panic]
    fn ordered_job_cannot_compute_while_suspended() {
        rw(SuspensionPattern::Ordered).compute_one();
    }
}
