use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use rwsched::experiments::{
    harness, run_case_study, run_schedulability_experiment, write_curves_csv, write_responses_csv, CaseStudy,
    ExperimentConfig, SuspDist, UtilDist,
};
use rwsched::fluid::{assert_lemma1, assert_lemma2, assert_lemma4, lemma4_held_back};
use rwsched::io_placement::{parse_any_system, serialize_transformed, transform, AnySystem};
use rwsched::rational::{ratio, Rational};
use rwsched::sched_tests::{run_test, TestName};
use rwsched::simulator::{simulate, ReleaseModel, Scheduler, Workload};
use rwsched::{TaskKind, Tick};

/// Schedulability analysis and simulation for task systems with read/write suspensions.
#[derive(Parser)]
#[command(name = "rwsched", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run schedulability tests on a task-system file.
    Analyze {
        system: PathBuf,
        /// Comma-separated subset of density,oblivious,writeonly,rw.
        #[arg(long, value_delimiter = ',')]
        tests: Option<Vec<String>>,
    },
    /// Reassign the read/write phases of a read-write system.
    Transform {
        system: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Simulate a system and write its trace as CSV.
    Simulate {
        system: PathBuf,
        #[arg(long, value_enum)]
        sched: Sched,
        #[arg(long)]
        horizon: Tick,
        /// sync, offsets, or sporadic:SEED
        #[arg(long, default_value = "sync")]
        release: String,
        /// Per-task first-release offsets for `--release offsets`.
        #[arg(long, value_delimiter = ',')]
        offsets: Vec<Tick>,
        /// Largest extra inter-release gap for `--release sporadic:SEED`; one
        /// value for all tasks or one per task.
        #[arg(long, value_delimiter = ',', default_value = "0")]
        max_gap: Vec<Tick>,
        /// Check the fluid-lag properties on the trace.
        #[arg(long)]
        check_lemmas: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Acceptance-ratio curves for randomly generated write-only systems.
    Experiment {
        #[arg(long, default_value = "0.9")]
        alpha: String,
        #[arg(long, value_enum, default_value = "light")]
        util: Util,
        #[arg(long, value_enum, default_value = "short")]
        susp: Susp,
        #[arg(long, default_value_t = 4)]
        m: usize,
        #[arg(long, default_value_t = 1000)]
        per_cap: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Simulate the disk read/compute/write case study.
    Casestudy {
        #[arg(long, value_enum)]
        case: Case,
        #[arg(long, value_enum)]
        sched: Sched,
        #[arg(long, default_value_t = 400)]
        jobs: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Sched {
    Gedf,
    GedfRw,
}

impl From<Sched> for Scheduler {
    fn from(s: Sched) -> Self {
        match s {
            Sched::Gedf => Scheduler::Gedf,
            Sched::GedfRw => Scheduler::GedfRw,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Util {
    Light,
    Medium,
    Heavy,
}

#[derive(Clone, Copy, ValueEnum)]
enum Susp {
    Short,
    Long,
}

#[derive(Clone, Copy, ValueEnum)]
enum Case {
    Uni2,
    Duo3,
}

/// Why a command stopped.
enum Failure {
    /// Bad input: exit code 1.
    Invalid(String),
    /// Everything else: exit code 2.
    Internal(String),
}

type Outcome = Result<(), Failure>;

fn invalid(msg: impl ToString) -> Failure {
    Failure::Invalid(msg.to_string())
}

fn internal(msg: impl ToString) -> Failure {
    Failure::Internal(msg.to_string())
}

fn read_system(path: &Path) -> Result<AnySystem, Failure> {
    let text = fs::read_to_string(path).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
    parse_any_system(&text).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

fn write_output(path: Option<&Path>, write: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Outcome {
    match path {
        Some(p) => {
            let mut file = io::BufWriter::new(fs::File::create(p).map_err(|e| internal(format!("{}: {e}", p.display())))?);
            write(&mut file).and_then(|_| file.flush()).map_err(|e| internal(format!("{}: {e}", p.display())))
        }
        None => write(&mut io::stdout().lock()).map_err(internal),
    }
}

/// Parses `0.9`, `1`, or `9/10`.
fn parse_rational(s: &str) -> Option<Rational> {
    if let Some((n, d)) = s.split_once('/') {
        let n: i128 = n.trim().parse().ok()?;
        let d: i128 = d.trim().parse().ok()?;
        return (d != 0).then(|| ratio(n, d));
    }
    let (whole, frac) = s.split_once('.').unwrap_or((s, ""));
    if frac.len() > 18 || !frac.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let scale = 10i128.pow(frac.len() as u32);
    let whole: i128 = if whole.is_empty() { 0 } else { whole.parse().ok()? };
    let frac: i128 = if frac.is_empty() { 0 } else { frac.parse().ok()? };
    Some(ratio(whole * scale + frac, scale))
}

fn analyze(path: &Path, tests: Option<Vec<String>>) -> Outcome {
    let any = read_system(path)?;
    let system = any.base();
    let tests: Vec<TestName> = match tests {
        Some(keys) => keys
            .iter()
            .map(|k| TestName::from_key(k.trim()).ok_or_else(|| invalid(format!("unknown test `{k}`"))))
            .collect::<Result<_, _>>()?,
        None => {
            let kind_specific = match system.uniform_kind() {
                Some(TaskKind::WriteOnly) => Some(TestName::WriteOnlyGedf),
                Some(TaskKind::ReadWrite) => Some(TestName::ReadWritePlacement),
                None => None,
            };
            [TestName::Density, TestName::SuspObliviousDensity].into_iter().chain(kind_specific).collect()
        }
    };
    let profile = system.profile();
    let mut out = io::stdout().lock();
    for test in tests {
        let line = match run_test(test, &profile) {
            Ok(verdict) => verdict.to_string(),
            Err(e) => format!("{test}: not applicable ({e})"),
        };
        writeln!(out, "{line}").map_err(internal)?;
    }
    Ok(())
}

fn transform_file(path: &Path, output: &Path) -> Outcome {
    let system = match read_system(path)? {
        AnySystem::Original(s) => s,
        AnySystem::Transformed(t) => t.base().clone(),
    };
    let transformed = transform(&system).map_err(invalid)?;
    fs::write(output, serialize_transformed(&transformed)).map_err(|e| internal(format!("{}: {e}", output.display())))
}

fn release_model(spec: &str, offsets: Vec<Tick>, max_gap: Vec<Tick>, tasks: usize) -> Result<ReleaseModel, Failure> {
    match spec {
        "sync" => Ok(ReleaseModel::SynchronousPeriodic),
        "offsets" => {
            if offsets.len() != tasks {
                return Err(invalid(format!("--offsets needs {tasks} values, got {}", offsets.len())));
            }
            Ok(ReleaseModel::PeriodicWithOffsets(offsets))
        }
        _ => {
            let seed = spec
                .strip_prefix("sporadic:")
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| invalid(format!("unknown release model `{spec}`")))?;
            let max_extra_gap = match max_gap.len() {
                1 => vec![max_gap[0]; tasks],
                n if n == tasks => max_gap,
                n => return Err(invalid(format!("--max-gap needs 1 or {tasks} values, got {n}"))),
            };
            Ok(ReleaseModel::SporadicSeeded { seed, max_extra_gap })
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn simulate_file(
    path: &Path,
    sched: Scheduler,
    horizon: Tick,
    release: &str,
    offsets: Vec<Tick>,
    max_gap: Vec<Tick>,
    check_lemmas: bool,
    output: Option<&Path>,
) -> Outcome {
    let any = read_system(path)?;
    let releases = release_model(release, offsets, max_gap, any.base().len())?;
    // GEDF-R/W needs placed phases; transform a plain read-write file on the fly.
    let transformed;
    let workload = match (&any, sched) {
        (AnySystem::Original(s), Scheduler::GedfRw) => {
            transformed = transform(s).map_err(invalid)?;
            Workload::Transformed(&transformed)
        }
        _ => Workload::from(&any),
    };
    let trace = simulate(workload, sched, &releases, horizon).map_err(invalid)?;
    write_output(output, |w| trace.write_csv(w))?;

    let misses = trace.misses();
    eprintln!("{} jobs, {} deadline misses over {} ticks", trace.jobs.len(), misses.len(), horizon);
    if let Some(first) = misses.first() {
        eprintln!("first miss: task {} job {} at {}", first.task, first.job, first.deadline);
    }
    if check_lemmas {
        let l1 = assert_lemma1(&trace);
        let l2 = assert_lemma2(&trace);
        let l4 = assert_lemma4(&trace);
        for v in &l1 {
            eprintln!("lemma 1: {v}");
        }
        for v in &l2 {
            eprintln!("lemma 2: {v}");
        }
        for v in &l4 {
            eprintln!("lemma 4: {v}");
        }
        let held = lemma4_held_back(&trace).len();
        eprintln!(
            "lag checks: {} busy-interval increases, {} ratio violations, {} miss violations ({held} held-back misses not checked)",
            l1.len(),
            l2.len(),
            l4.len()
        );
        if !(l1.is_empty() && l2.is_empty() && l4.is_empty()) {
            return Err(invalid("lag checks failed"));
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn experiment(alpha: &str, util: Util, susp: Susp, m: usize, per_cap: usize, seed: u64, output: Option<&Path>) -> Outcome {
    let alpha = parse_rational(alpha).ok_or_else(|| invalid(format!("cannot parse alpha `{alpha}`")))?;
    if m == 0 {
        return Err(invalid("--m must be at least 1"));
    }
    let util = match util {
        Util::Light => UtilDist::Light,
        Util::Medium => UtilDist::Medium,
        Util::Heavy => UtilDist::Heavy,
    };
    let susp = match susp {
        Susp::Short => SuspDist::Short,
        Susp::Long => SuspDist::Long,
    };
    let cfg = ExperimentConfig::new(m, util, susp, alpha, per_cap, seed);
    let points = run_schedulability_experiment(&cfg).map_err(invalid)?;
    write_output(output, |w| write_curves_csv(&points, w))?;
    for &test in &cfg.tests {
        let edge = harness::full_acceptance_edge(&points, test).map(|c| harness::cap_label(&c));
        let last = harness::last_nonzero_cap(&points, test).map(|c| harness::cap_label(&c));
        eprintln!(
            "{test}: all accepted up to {}, some accepted up to {}",
            edge.as_deref().unwrap_or("-"),
            last.as_deref().unwrap_or("-")
        );
    }
    Ok(())
}

fn casestudy(case: Case, sched: Scheduler, jobs: u64, output: Option<&Path>) -> Outcome {
    let case = match case {
        Case::Uni2 => CaseStudy::Uni2Tasks,
        Case::Duo3 => CaseStudy::Duo3Tasks,
    };
    let result = run_case_study(case, sched, jobs).map_err(internal)?;
    write_output(output, |w| write_responses_csv(&result, w))?;
    for task in 0..result.system.len() {
        let done = result.finished(task);
        let worst = done.iter().max().copied().unwrap_or(0);
        eprintln!(
            "task {task}: {} of {jobs} jobs finished, worst response {worst} (period {})",
            done.len(),
            result.system.task(task).period
        );
    }
    Ok(())
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Analyze { system, tests } => analyze(&system, tests),
        Command::Transform { system, output } => transform_file(&system, &output),
        Command::Simulate { system, sched, horizon, release, offsets, max_gap, check_lemmas, output } => {
            simulate_file(&system, sched.into(), horizon, &release, offsets, max_gap, check_lemmas, output.as_deref())
        }
        Command::Experiment { alpha, util, susp, m, per_cap, seed, output } => {
            experiment(&alpha, util, susp, m, per_cap, seed, output.as_deref())
        }
        Command::Casestudy { case, sched, jobs, output } => casestudy(case, sched.into(), jobs, output.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(2)
        }
    }
}
