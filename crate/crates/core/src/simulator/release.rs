use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::task_model::Tick;

/// When jobs are released. Consecutive releases of a task are always at
/// least one period apart.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReleaseModel {
    /// Every task releases at 0, T, 2T, ...
    SynchronousPeriodic,
    /// Task `i` releases at `offsets[i] + k T_i`.
    PeriodicWithOffsets(Vec<Tick>),
    /// Task `i` releases its first job in `[0, max_extra_gap[i]]` and each
    /// later job `T_i + g` after the previous one, `g` uniform in
    /// `[0, max_extra_gap[i]]`.
    SporadicSeeded { seed: u64, max_extra_gap: Vec<Tick> },
}

impl ReleaseModel {
    pub(crate) fn per_task_len(&self) -> Option<usize> {
        match self {
            ReleaseModel::SynchronousPeriodic => None,
            ReleaseModel::PeriodicWithOffsets(o) => Some(o.len()),
            ReleaseModel::SporadicSeeded { max_extra_gap, .. } => Some(max_extra_gap.len()),
        }
    }

    /// Release times of task `task` strictly before `horizon`.
    pub fn releases(&self, task: usize, period: Tick, horizon: Tick) -> Vec<Tick> {
        let mut out = Vec::new();
        let mut iter = self.iter(task, period);
        loop {
            let r = iter.next_release();
            if r >= horizon {
                return out;
            }
            out.push(r);
        }
    }

    /// Release time of the 1-based job `job` of task `task`.
    pub fn release_of(&self, task: usize, period: Tick, job: u64) -> Tick {
        assert!(job >= 1, "jobs are numbered from 1");
        let mut iter = self.iter(task, period);
        let mut r = 0;
        for _ in 0..job {
            r = iter.next_release();
        }
        r
    }

    fn iter(&self, task: usize, period: Tick) -> ReleaseIter {
        match self {
            ReleaseModel::SynchronousPeriodic => ReleaseIter::Periodic { next: 0, period },
            ReleaseModel::PeriodicWithOffsets(offsets) => ReleaseIter::Periodic { next: offsets[task], period },
            ReleaseModel::SporadicSeeded { seed, max_extra_gap } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                rng.set_stream(task as u64);
                ReleaseIter::Sporadic { rng, last: None, period, gap: max_extra_gap[task] }
            }
        }
    }
}

enum ReleaseIter {
    Periodic { next: Tick, period: Tick },
    Sporadic { rng: ChaCha8Rng, last: Option<Tick>, period: Tick, gap: Tick },
}

impl ReleaseIter {
    fn next_release(&mut self) -> Tick {
        match self {
            ReleaseIter::Periodic { next, period } => {
                let r = *next;
                *next = next.saturating_add(*period);
                r
            }
            ReleaseIter::Sporadic { rng, last, period, gap } => {
                let extra = rng.gen_range(0..=*gap);
                let r = match *last {
                    None => extra,
                    Some(prev) => prev.saturating_add(*period).saturating_add(extra),
                };
                *last = Some(r);
                r
            }
        }
    }
}
