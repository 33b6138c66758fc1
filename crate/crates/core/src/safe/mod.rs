//! Stochastic fleet estimation: Monte-Carlo yearly scenarios and the
//! platform-usage profiles they induce under an assignment.

mod io;

pub use io::{load_scenario, save_scenario, usage_csv, SCENARIO_SCHEMA_VERSION};

use rand::Rng as _;

use crate::domain::{Dataset, Task};
use crate::error::{Error, Result};
use crate::nsga2::AssignmentMatrix;
use crate::seed::{derive_seed, rng_from_seed};

pub const DEFAULT_HORIZON_DAYS: u32 = 365;
pub const DEFAULT_YEARS: usize = 100;

/// `ceil(f)` if `r <= frac(f)`, else `floor(f)`. Unbiased for uniform `r`.
pub fn stochastic_round(f: f64, r: f64) -> u64 {
    debug_assert!(f >= 0.0);
    let floor = f.floor();
    let frac = f - floor;
    if frac > 0.0 && r <= frac {
        floor as u64 + 1
    } else {
        floor as u64
    }
}

/// One realized occurrence of a task.
#[derive(Clone, Debug, PartialEq)]
pub struct TaskInstance {
    pub task_id: usize,
    /// Day in `0..=horizon`.
    pub start: u32,
    /// Task-level realized duration in days.
    pub duration: f64,
}

/// One simulated year.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub id: usize,
    pub instances: Vec<TaskInstance>,
    pub horizon: u32,
    pub seed: u64,
    /// Frequency multiplier the source dataset was scaled by (1 when unscaled).
    pub scale: f64,
}

/// How an instance's task-level duration maps onto each platform.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DurationMode {
    /// Platform baseline `d_i(v)` times `duration / dur_dist.mode`.
    #[default]
    Scaled,
    /// Platform baseline `d_i(v)` only; the task-level draw is ignored.
    Baseline,
}

impl DurationMode {
    pub fn platform_duration(self, task: &Task, platform: usize, instance: &TaskInstance) -> f64 {
        let base = task.durations[platform];
        match self {
            DurationMode::Scaled => base * instance.duration / task.dur_dist.mode,
            DurationMode::Baseline => base,
        }
    }

    /// Longest platform duration any instance drawn from `dataset` can have.
    pub fn max_duration(self, dataset: &Dataset) -> f64 {
        dataset
            .tasks
            .iter()
            .map(|t| {
                let base = t.durations.iter().copied().fold(0.0, f64::max);
                match self {
                    DurationMode::Scaled => base * t.dur_dist.max / t.dur_dist.mode,
                    DurationMode::Baseline => base,
                }
            })
            .fold(0.0, f64::max)
    }
}

/// Draws one year: per task a triangular frequency, stochastically rounded to
/// an occurrence count, then a triangular duration and a uniform start day per
/// occurrence. Fully determined by `(dataset, horizon, seed)`.
///
/// Each task draws from its own stream, so scaling frequencies up only adds
/// occurrences: the unscaled instances of a task stay a prefix.
pub fn sample_scenario(dataset: &Dataset, horizon: u32, id: usize, seed: u64) -> Result<Scenario> {
    if horizon == 0 {
        return Err(Error::config("horizon", "must be positive"));
    }
    let mut instances = Vec::new();
    for task in &dataset.tasks {
        let mut rng = rng_from_seed(derive_seed(seed, "task", task.id as u64));
        let f = task.freq_dist.sample(&mut rng).max(0.0);
        let occurrences = stochastic_round(f, rng.gen::<f64>());
        for _ in 0..occurrences {
            let mut duration = task.dur_dist.sample(&mut rng);
            if !(duration > 0.0) {
                duration = task.dur_dist.mode;
            }
            let start = rng.gen_range(0..=horizon);
            instances.push(TaskInstance {
                task_id: task.id,
                start,
                duration,
            });
        }
    }
    Ok(Scenario {
        id,
        instances,
        horizon,
        seed,
        scale: 1.0,
    })
}

/// Multiplies every task's frequency distribution by `r` in `[1, 2]`.
pub fn scale_frequencies(dataset: &Dataset, r: f64) -> Result<Dataset> {
    if !(1.0..=2.0).contains(&r) {
        return Err(Error::config("scale", format!("{r} is outside [1, 2]")));
    }
    let mut out = dataset.clone();
    for t in &mut out.tasks {
        t.freq_dist = t.freq_dist.scaled(r);
    }
    Ok(out)
}

/// Per-platform, per-day usage `usage[platform][day]`.
#[derive(Clone, Debug, PartialEq)]
pub struct UsageProfile {
    pub usage: Vec<Vec<f64>>,
}

impl UsageProfile {
    pub fn days(&self) -> usize {
        self.usage.first().map_or(0, Vec::len)
    }

    pub fn total(&self, platform: usize) -> f64 {
        self.usage[platform].iter().sum()
    }
}

/// Day slots occupied by an interval starting at `start` lasting `duration`
/// days: whole days weigh 1, a trailing fractional day weighs its fraction.
pub(crate) fn day_slots(start: u32, duration: f64) -> impl Iterator<Item = (usize, f64)> {
    let whole = duration.floor();
    let frac = duration - whole;
    let whole = whole as usize;
    let s = start as usize;
    (0..whole)
        .map(move |k| (s + k, 1.0))
        .chain((frac > 0.0).then_some((s + whole, frac)))
}

pub(crate) fn check_rows(scenario: &Scenario, assignment: &AssignmentMatrix, platforms: usize) -> Result<()> {
    for inst in &scenario.instances {
        let row = assignment
            .row(inst.task_id)
            .ok_or(Error::MissingAssignment { task: inst.task_id })?;
        if row.len() != platforms {
            return Err(Error::DimensionMismatch {
                expected: platforms,
                found: row.len(),
            });
        }
    }
    Ok(())
}

/// Accumulates `p_i(v)` over every day each instance keeps platform `v` busy.
///
/// The timeline runs to `horizon + 1 + ceil(max duration)` so nothing is
/// truncated and profiles from the same dataset have equal length.
pub fn usage_profile(
    scenario: &Scenario,
    dataset: &Dataset,
    assignment: &AssignmentMatrix,
    mode: DurationMode,
) -> Result<UsageProfile> {
    let np = dataset.platform_count();
    check_rows(scenario, assignment, np)?;
    let mut span = mode.max_duration(dataset);
    for inst in &scenario.instances {
        let task = &dataset.tasks[inst.task_id];
        for p in 0..np {
            span = span.max(mode.platform_duration(task, p, inst));
        }
    }
    let days = scenario.horizon as usize + 1 + span.ceil() as usize;
    let mut usage = vec![vec![0.0; days]; np];
    for inst in &scenario.instances {
        let task = &dataset.tasks[inst.task_id];
        let row = assignment.row(inst.task_id).expect("checked above");
        for (p, &n) in row.iter().enumerate() {
            if n == 0 {
                continue;
            }
            let d = mode.platform_duration(task, p, inst);
            for (day, w) in day_slots(inst.start, d) {
                usage[p][day] += n as f64 * w;
            }
        }
    }
    Ok(UsageProfile { usage })
}

/// Per-cell mean and population standard deviation across iterations.
#[derive(Clone, Debug, PartialEq)]
pub struct UsageStats {
    pub mean: Vec<Vec<f64>>,
    pub std: Vec<Vec<f64>>,
}

pub fn average_usage(profiles: &[UsageProfile]) -> Result<UsageStats> {
    let first = profiles.first().ok_or(Error::Empty("usage profiles"))?;
    let np = first.usage.len();
    let days = first.days();
    for p in profiles {
        if p.usage.len() != np {
            return Err(Error::DimensionMismatch { expected: np, found: p.usage.len() });
        }
        if p.days() != days {
            return Err(Error::DimensionMismatch { expected: days, found: p.days() });
        }
    }
    let y = profiles.len() as f64;
    let mut mean = vec![vec![0.0; days]; np];
    let mut std = vec![vec![0.0; days]; np];
    for v in 0..np {
        for t in 0..days {
            let m = profiles.iter().map(|p| p.usage[v][t]).sum::<f64>() / y;
            let var = profiles
                .iter()
                .map(|p| (p.usage[v][t] - m).powi(2))
                .sum::<f64>()
                / y;
            mean[v][t] = m;
            std[v][t] = var.sqrt();
        }
    }
    Ok(UsageStats { mean, std })
}
