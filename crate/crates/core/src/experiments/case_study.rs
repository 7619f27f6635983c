//! The disk read/compute/write case study, simulated in 1 ms ticks.
//!
//! `τ1 = (R=300, C=400, W=100, T=950)` and `τ2 = (R=300, C=600, W=200, T=1250)`.
//! `Uni2Tasks` runs both on one processor; `Duo3Tasks` runs two copies of `τ1`
//! around `τ2` on two processors.

use std::io::{self, Write};

use crate::io_placement::transform;
use crate::simulator::{simulate, ReleaseModel, Scheduler, SimError, Trace};
use crate::task_model::{TaskSpec, TaskSystem, Tick};

/// Version tag written on the first line of response CSV files.
pub const RESPONSES_SCHEMA: &str = "# rwsched-responses v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseStudy {
    Uni2Tasks,
    Duo3Tasks,
}

impl CaseStudy {
    pub fn key(self) -> &'static str {
        match self {
            CaseStudy::Uni2Tasks => "uni2",
            CaseStudy::Duo3Tasks => "duo3",
        }
    }

    pub fn from_key(key: &str) -> Option<Self> {
        match key {
            "uni2" => Some(CaseStudy::Uni2Tasks),
            "duo3" => Some(CaseStudy::Duo3Tasks),
            _ => None,
        }
    }
}

fn tau1(id: usize) -> TaskSpec {
    TaskSpec::read_write(id, 300, 400, 100, 950)
}

fn tau2(id: usize) -> TaskSpec {
    TaskSpec::read_write(id, 300, 600, 200, 1250)
}

pub fn case_system(case: CaseStudy) -> TaskSystem {
    let (m, tasks) = match case {
        CaseStudy::Uni2Tasks => (1, vec![tau1(0), tau2(1)]),
        CaseStudy::Duo3Tasks => (2, vec![tau1(0), tau2(1), tau1(2)]),
    };
    TaskSystem::with_tick_unit(m, tasks, "ms").expect("case-study parameters are valid")
}

#[derive(Debug, Clone)]
pub struct CaseStudyResult {
    pub case: CaseStudy,
    pub scheduler: Scheduler,
    pub system: TaskSystem,
    pub trace: Trace,
    /// `responses[task][j]` is the response time of job `j + 1`, if it finished.
    pub responses: Vec<Vec<Option<Tick>>>,
}

impl CaseStudyResult {
    /// Responses of `task` that finished, in job order, until the first unfinished one.
    pub fn finished(&self, task: usize) -> Vec<Tick> {
        self.responses[task].iter().map_while(|r| *r).collect()
    }
}

/// Simulates the case study with synchronous periodic releases until the
/// first `jobs_per_task` jobs of every task are done, lengthening the horizon
/// (up to 8x the nominal one) when a backlog delays them. GEDF runs the
/// original system; GEDF-R/W runs its transformed counterpart.
pub fn run_case_study(case: CaseStudy, scheduler: Scheduler, jobs_per_task: u64) -> Result<CaseStudyResult, SimError> {
    let system = case_system(case);
    let transformed = transform(&system).expect("case-study tasks are read-write");
    let longest = system.tasks().iter().map(|t| t.period).max().unwrap_or(1);
    let nominal = (jobs_per_task + 1) * longest;
    let mut horizon = nominal;
    loop {
        let trace = match scheduler {
            Scheduler::Gedf => simulate(&system, scheduler, &ReleaseModel::SynchronousPeriodic, horizon)?,
            Scheduler::GedfRw => simulate(&transformed, scheduler, &ReleaseModel::SynchronousPeriodic, horizon)?,
        };
        let responses: Vec<Vec<Option<Tick>>> = (0..system.len())
            .map(|task| {
                let mut r: Vec<Option<Tick>> =
                    trace.jobs_of(task).take(jobs_per_task as usize).map(|j| j.response_time()).collect();
                r.resize(jobs_per_task as usize, None);
                r
            })
            .collect();
        let complete = responses.iter().all(|r| r.iter().all(Option::is_some));
        if complete || horizon >= 8 * nominal {
            return Ok(CaseStudyResult { case, scheduler, system, trace, responses });
        }
        horizon *= 2;
    }
}

pub fn write_responses_csv<W: Write>(result: &CaseStudyResult, mut out: W) -> io::Result<()> {
    writeln!(out, "{RESPONSES_SCHEMA}")?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["task", "job", "release", "completion", "response", "period", "deadline_met"])?;
    for (task, responses) in result.responses.iter().enumerate() {
        let period = result.system.task(task).period;
        for (k, job) in result.trace.jobs_of(task).take(responses.len()).enumerate() {
            let response = responses[k];
            w.write_record([
                task.to_string(),
                job.job.to_string(),
                job.release.to_string(),
                job.completion.map(|c| c.to_string()).unwrap_or_default(),
                response.map(|r| r.to_string()).unwrap_or_default(),
                period.to_string(),
                response.is_some_and(|r| r <= period).to_string(),
            ])?;
        }
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn systems_match_the_stated_utilizations() {
        let uni = case_system(CaseStudy::Uni2Tasks);
        assert_eq!(uni.utilization_sum(), ratio(400, 950) + ratio(600, 1250));
        assert_eq!(uni.hyperperiod(), 23_750);
        let duo = case_system(CaseStudy::Duo3Tasks);
        assert_eq!(duo.m(), 2);
        assert_eq!(duo.tasks()[0].phases, duo.tasks()[2].phases);
    }

    #[test]
    fn keys_round_trip() {
        for c in [CaseStudy::Uni2Tasks, CaseStudy::Duo3Tasks] {
            assert_eq!(CaseStudy::from_key(c.key()), Some(c));
        }
        assert_eq!(CaseStudy::from_key("trio"), None);
    }

    #[test]
    fn short_run_writes_one_row_per_job() {
        let r = run_case_study(CaseStudy::Duo3Tasks, Scheduler::GedfRw, 5).unwrap();
        let mut buf = Vec::new();
        write_responses_csv(&r, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with(RESPONSES_SCHEMA));
        assert_eq!(text.lines().count(), 2 + 15);
        assert!(r.responses.iter().flatten().all(Option::is_some));
    }

    #[test]
    fn plain_gedf_overruns_then_cycles() {
        // traced by hand: tau2 reads [0,300), waits for tau1's compute [300,700),
        // computes [700,1300), writes [1300,1500)
        let r = run_case_study(CaseStudy::Uni2Tasks, Scheduler::Gedf, 12).unwrap();
        let tau2 = r.finished(1);
        assert_eq!(&tau2[..3], &[1500, 1350, 1200]);
        assert!(tau2.chunks(3).all(|c| c == [1500, 1350, 1200]));
        assert!(tau2[0] > 1250);
    }
}
