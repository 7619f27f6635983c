//! Per-tick job selection for GEDF and GEDF-R/W.

use super::job::JobState;

/// Indices of the at most `m` comp-available jobs with the smallest
/// `(deadline, task, job)`, highest priority first.
pub fn gedf_pick(jobs: &[JobState], m: usize) -> Vec<usize> {
    top_m(jobs, m, JobState::is_comp_available)
}

/// Compute and suspend sets for GEDF-R/W.
///
/// The compute set is the at most `m` highest-priority comp-pending jobs.
/// Every other ready job with suspension left suspends: either it was
/// comp-preempted or it has no computation left.
pub fn gedf_rw_pick(jobs: &[JobState], m: usize) -> (Vec<usize>, Vec<usize>) {
    let compute = top_m(jobs, m, |j| j.ready && j.is_comp_pending());
    let suspend = (0..jobs.len())
        .filter(|i| !compute.contains(i))
        .filter(|&i| jobs[i].ready && jobs[i].is_sus_pending())
        .collect();
    (compute, suspend)
}

fn top_m(jobs: &[JobState], m: usize, eligible: impl Fn(&JobState) -> bool) -> Vec<usize> {
    let mut picked: Vec<usize> = (0..jobs.len()).filter(|&i| eligible(&jobs[i])).collect();
    picked.sort_by_key(|&i| jobs[i].priority());
    picked.truncate(m);
    picked
}
