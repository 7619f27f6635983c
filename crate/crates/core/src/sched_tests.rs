//! Closed-form utilization tests for global EDF.
//!
//! | test | accepts when |
//! |------|--------------|
//! | [`density_test`] | `U_sum <= m - (m-1) U_max` |
//! | [`susp_oblivious_density_test`] | `U_sum <= m - (m-1) Z_max - V_sum` |
//! | [`write_only_test`] | `U_i (1 + delta_i) < 1` for all `i`, and `U_sum <= m - max_i L_i` |
//! | [`rw_placement_test`] | `U_sum <= m - (m-1) U_max` (transformed system under GEDF-R/W) |
//!
//! with `Z_i = U_i + V_i` and `L_i = (m-1) U_i + m U_i delta_i`. Every
//! comparison is exact.

use std::fmt;

use thiserror::Error;

use crate::rational::{display, int, Rational};
use crate::task_model::{SystemProfile, TaskKind, TaskSystem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TestName {
    Density,
    SuspObliviousDensity,
    WriteOnlyGedf,
    ReadWritePlacement,
}

impl TestName {
    pub const ALL: [TestName; 4] = [
        TestName::Density,
        TestName::SuspObliviousDensity,
        TestName::WriteOnlyGedf,
        TestName::ReadWritePlacement,
    ];

    /// Short name used on the command line and in CSV output.
    pub fn key(self) -> &'static str {
        match self {
            TestName::Density => "density",
            TestName::SuspObliviousDensity => "oblivious",
            TestName::WriteOnlyGedf => "writeonly",
            TestName::ReadWritePlacement => "rw",
        }
    }

    pub fn from_key(key: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.key() == key)
    }
}

impl fmt::Display for TestName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestVerdict {
    pub test: TestName,
    pub passed: bool,
    /// Right-hand side of the utilization inequality.
    pub threshold: Rational,
    pub utilization_sum: Rational,
    /// `threshold - utilization_sum`; negative when the bound is violated.
    pub margin: Rational,
    /// The first inequality that failed, if any.
    pub failed_condition: Option<String>,
}

impl fmt::Display for TestVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} (U_sum = {}, threshold = {}, margin = {})",
            self.test,
            if self.passed { "PASS" } else { "FAIL" },
            display(&self.utilization_sum),
            display(&self.threshold),
            display(&self.margin),
        )?;
        if let Some(reason) = &self.failed_condition {
            write!(f, ": {reason}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TestError {
    #[error("{test} applies to {expected} tasks only, but task {task} is {found}")]
    WrongTaskKind { test: TestName, expected: TaskKind, task: usize, found: TaskKind },
}

fn bound_verdict(test: TestName, profile: &SystemProfile, threshold: Rational, bound: &str) -> TestVerdict {
    let utilization_sum = profile.utilization_sum();
    let margin = threshold - utilization_sum;
    let passed = margin >= int(0);
    TestVerdict {
        test,
        passed,
        failed_condition: (!passed).then(|| {
            format!("U_sum = {} > {bound} = {}", display(&utilization_sum), display(&threshold))
        }),
        threshold,
        utilization_sum,
        margin,
    }
}

fn require_kind(test: TestName, profile: &SystemProfile, expected: TaskKind) -> Result<(), TestError> {
    match profile.tasks.iter().position(|(kind, _)| *kind != expected) {
        Some(task) => Err(TestError::WrongTaskKind { test, expected, task, found: profile.tasks[task].0 }),
        None => Ok(()),
    }
}

fn m_of(profile: &SystemProfile) -> Rational {
    int(profile.m as i128)
}

/// Suspension-free density bound; suspension parameters are ignored.
pub fn density(profile: &SystemProfile) -> TestVerdict {
    let m = m_of(profile);
    let threshold = m - (m - int(1)) * profile.max_utilization();
    bound_verdict(TestName::Density, profile, threshold, "m - (m-1)*U_max")
}

/// Density bound with suspensions counted as computation.
pub fn susp_oblivious_density(profile: &SystemProfile) -> TestVerdict {
    let m = m_of(profile);
    let threshold = m - (m - int(1)) * profile.max_z() - profile.suspension_sum();
    bound_verdict(TestName::SuspObliviousDensity, profile, threshold, "m - (m-1)*Z_max - V_sum")
}

/// Suspension-aware test for write-only tasks under GEDF.
pub fn write_only(profile: &SystemProfile) -> Result<TestVerdict, TestError> {
    require_kind(TestName::WriteOnlyGedf, profile, TaskKind::WriteOnly)?;
    let m = m_of(profile);
    let one = int(1);

    let mut per_task_failure = None;
    let mut l_max = int(0);
    for (id, (_, params)) in profile.tasks.iter().enumerate() {
        let u = params.utilization;
        let delta = params.delta.expect("write-only tasks carry delta");
        if per_task_failure.is_none() && u * (one + delta) >= one {
            per_task_failure = Some(format!(
                "task {id}: U*(1+delta) = {} >= 1",
                display(&(u * (one + delta)))
            ));
        }
        let l = (m - one) * u + m * u * delta;
        if l > l_max {
            l_max = l;
        }
    }

    let mut verdict = bound_verdict(TestName::WriteOnlyGedf, profile, m - l_max, "m - L");
    if let Some(reason) = per_task_failure {
        verdict.passed = false;
        verdict.failed_condition = Some(reason);
    }
    Ok(verdict)
}

/// Density bound for a read-write system after I/O placement, scheduled by GEDF-R/W.
pub fn rw_placement(profile: &SystemProfile) -> Result<TestVerdict, TestError> {
    require_kind(TestName::ReadWritePlacement, profile, TaskKind::ReadWrite)?;
    let mut verdict = density(profile);
    verdict.test = TestName::ReadWritePlacement;
    Ok(verdict)
}

pub fn density_test(system: &TaskSystem) -> TestVerdict {
    density(&system.profile())
}

pub fn susp_oblivious_density_test(system: &TaskSystem) -> TestVerdict {
    susp_oblivious_density(&system.profile())
}

pub fn write_only_test(system: &TaskSystem) -> Result<TestVerdict, TestError> {
    write_only(&system.profile())
}

pub fn rw_placement_test(system: &TaskSystem) -> Result<TestVerdict, TestError> {
    rw_placement(&system.profile())
}

/// Runs one test by name.
pub fn run_test(test: TestName, profile: &SystemProfile) -> Result<TestVerdict, TestError> {
    match test {
        TestName::Density => Ok(density(profile)),
        TestName::SuspObliviousDensity => Ok(susp_oblivious_density(profile)),
        TestName::WriteOnlyGedf => write_only(profile),
        TestName::ReadWritePlacement => rw_placement(profile),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use crate::task_model::{DerivedParams, TaskSpec};

    fn fig1(m: usize) -> TaskSystem {
        TaskSystem::from_tasks(m, [TaskSpec::read_write(0, 5, 5, 5, 15); 2]).unwrap()
    }

    fn profile(m: usize, tasks: &[(TaskKind, Rational, Rational, Option<Rational>)]) -> SystemProfile {
        SystemProfile {
            m,
            tasks: tasks
                .iter()
                .map(|&(kind, u, v, delta)| {
                    (kind, DerivedParams { utilization: u, suspension_ratio: v, delta, z: u + v })
                })
                .collect(),
        }
    }

    #[test]
    fn density_examples() {
        let v = density_test(&fig1(1));
        assert!(v.passed);
        assert_eq!(v.margin, ratio(1, 3));

        let single = TaskSystem::from_tasks(1, [TaskSpec::read_write(0, 0, 7, 0, 7)]).unwrap();
        let v = density_test(&single);
        assert!(v.passed);
        assert_eq!(v.margin, int(0));

        // U_max = 1/2, U_sum = 3 on four processors
        let heavy = TaskSystem::from_tasks(4, [TaskSpec::read_write(0, 0, 1, 0, 2); 6]).unwrap();
        let v = density_test(&heavy);
        assert_eq!(v.threshold, ratio(5, 2));
        assert!(!v.passed);
        assert_eq!(v.margin, ratio(-1, 2));
        assert!(v.failed_condition.is_some());
    }

    #[test]
    fn oblivious_examples() {
        let v = susp_oblivious_density_test(&fig1(1));
        assert_eq!(v.threshold, ratio(-1, 3));
        assert!(!v.passed);

        let quiet = TaskSystem::from_tasks(3, [TaskSpec::read_write(0, 0, 3, 0, 10), TaskSpec::read_write(0, 0, 5, 0, 7)]).unwrap();
        let d = density_test(&quiet);
        let o = susp_oblivious_density_test(&quiet);
        assert_eq!((d.passed, d.threshold), (o.passed, o.threshold));

        let p = profile(4, &[(TaskKind::ReadWrite, ratio(1, 3), ratio(2, 3), None)]);
        let v = susp_oblivious_density(&p);
        assert_eq!(v.threshold, ratio(1, 3));
        assert!(v.passed);
        assert_eq!(v.margin, int(0));
    }

    #[test]
    fn write_only_examples() {
        let sys = TaskSystem::from_tasks(4, [TaskSpec::write_only(0, 2, 2, 2, 10)]).unwrap();
        let v = write_only_test(&sys).unwrap();
        assert_eq!(v.threshold, ratio(6, 5));
        assert!(v.passed);

        let p = profile(4, &[(TaskKind::WriteOnly, ratio(3, 10), ratio(9, 100), Some(int(3)))]);
        let v = write_only(&p).unwrap();
        assert!(!v.passed);
        assert!(v.failed_condition.unwrap().contains("U*(1+delta)"));

        // U*(1+delta) exactly 1 is rejected
        let p = profile(4, &[(TaskKind::WriteOnly, ratio(1, 4), ratio(3, 4), Some(int(3)))]);
        assert!(!write_only(&p).unwrap().passed);

        assert!(matches!(write_only_test(&fig1(1)), Err(TestError::WrongTaskKind { task: 0, .. })));
    }

    #[test]
    fn write_only_without_suspension_matches_density() {
        let sys = TaskSystem::from_tasks(
            3,
            [
                TaskSpec::write_only(0, 4, 0, 1, 10),
                TaskSpec::write_only(0, 3, 0, 0, 4),
                TaskSpec::write_only(0, 6, 0, 2, 9),
                TaskSpec::write_only(0, 1, 0, 0, 2),
            ],
        )
        .unwrap();
        let w = write_only_test(&sys).unwrap();
        let d = density_test(&sys);
        assert_eq!((w.passed, w.threshold, w.margin), (d.passed, d.threshold, d.margin));
    }

    #[test]
    fn rw_placement_examples() {
        let v = rw_placement_test(&fig1(1)).unwrap();
        assert!(v.passed);
        assert_eq!(v.utilization_sum, ratio(2, 3));

        let wo = TaskSystem::from_tasks(1, [TaskSpec::write_only(0, 1, 1, 1, 10)]).unwrap();
        assert!(rw_placement_test(&wo).is_err());
    }

    #[test]
    fn keys_round_trip() {
        for t in TestName::ALL {
            assert_eq!(TestName::from_key(t.key()), Some(t));
        }
        assert_eq!(TestName::from_key("nope"), None);
    }
}
