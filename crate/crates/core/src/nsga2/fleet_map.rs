use std::collections::BTreeSet;

use super::AssignmentMatrix;
use crate::domain::{fleet_cost, Dataset, FleetVector, Platform};
use crate::error::Result;
use crate::safe::{check_rows, day_slots, DurationMode, Scenario};

/// How an assignment is turned into an owned fleet.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum FleetMapping {
    /// Peak number of each platform busy on any one day.
    #[default]
    PeakConcurrent,
    /// Sum of each occurring task's option row, ignoring timing.
    SumOverTasks,
}

impl std::fmt::Display for FleetMapping {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            FleetMapping::PeakConcurrent => "peak-concurrent",
            FleetMapping::SumOverTasks => "sum-over-tasks",
        })
    }
}

/// Maps a solution to the fleet that can fly it in `scenario`.
pub fn solution_to_fleet(
    p: &AssignmentMatrix,
    scenario: &Scenario,
    dataset: &Dataset,
    duration_mode: DurationMode,
    mapping: FleetMapping,
) -> Result<FleetVector> {
    let np = dataset.platform_count();
    check_rows(scenario, p, np)?;
    let mut counts = vec![0u32; np];
    match mapping {
        FleetMapping::SumOverTasks => {
            let present: BTreeSet<usize> = scenario.instances.iter().map(|i| i.task_id).collect();
            for t in present {
                for (c, n) in counts.iter_mut().zip(p.row(t).expect("checked")) {
                    *c += n;
                }
            }
        }
        FleetMapping::PeakConcurrent => {
            let mut busy: Vec<Vec<u32>> = vec![Vec::new(); np];
            for inst in &scenario.instances {
                let task = &dataset.tasks[inst.task_id];
                for (v, &n) in p.row(inst.task_id).expect("checked").iter().enumerate() {
                    if n == 0 {
                        continue;
                    }
                    let d = duration_mode.platform_duration(task, v, inst);
                    for (day, _) in day_slots(inst.start, d) {
                        if busy[v].len() <= day {
                            busy[v].resize(day + 1, 0);
                        }
                        busy[v][day] += n;
                    }
                }
            }
            for (c, days) in counts.iter_mut().zip(&busy) {
                *c = days.iter().copied().max().unwrap_or(0);
            }
        }
    }
    Ok(FleetVector(counts))
}

/// Exact-duplicate removal, ordered by (acquisition cost, counts).
pub fn dedup_fleets(fleets: Vec<FleetVector>, platforms: &[Platform]) -> Result<Vec<FleetVector>> {
    let mut keyed = fleets
        .into_iter()
        .map(|f| Ok((fleet_cost(&f, platforms)?, f)))
        .collect::<Result<Vec<_>>>()?;
    keyed.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    keyed.dedup_by(|a, b| a.1 == b.1);
    Ok(keyed.into_iter().map(|(_, f)| f).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{CargoType, SubfunctionRequirement, Task, TriangularParams};
    use crate::safe::TaskInstance;
    use proptest::prelude::*;

    fn dataset() -> Dataset {
        let task = |id| Task {
            id,
            requirements: vec![SubfunctionRequirement {
                cargo_type: CargoType::Type1,
                subfunction_id: 1,
                quantity: 1,
            }],
            suitability: vec![vec![true, true]],
            durations: vec![4.0, 2.5],
            duration_type: 1,
            freq_dist: TriangularParams::degenerate(1.0),
            dur_dist: TriangularParams::degenerate(4.0),
        };
        Dataset {
            platforms: vec![Platform::new(0, 5, 5, 1.0), Platform::new(1, 5, 5, 2.0)],
            tasks: vec![task(0), task(1)],
            seed: 0,
        }
    }

    fn scenario(instances: Vec<TaskInstance>) -> Scenario {
        Scenario { id: 0, instances, horizon: 50, seed: 0, scale: 1.0 }
    }

    fn inst(task_id: usize, start: u32) -> TaskInstance {
        TaskInstance { task_id, start, duration: 4.0 }
    }

    /// Day-by-day brute force of peak demand.
    fn peak_oracle(p: &AssignmentMatrix, s: &Scenario, d: &Dataset) -> Vec<u32> {
        (0..2)
            .map(|v| {
                (0..200u32)
                    .map(|day| {
                        s.instances
                            .iter()
                            .filter(|i| {
                                let dur = DurationMode::Scaled.platform_duration(&d.tasks[i.task_id], v, i);
                                day >= i.start && (day as f64) < i.start as f64 + dur
                            })
                            .map(|i| p.row(i.task_id).unwrap()[v])
                            .sum::<u32>()
                    })
                    .max()
                    .unwrap()
            })
            .collect()
    }

    #[test]
    fn mapping_examples() {
        let d = dataset();
        let p = AssignmentMatrix::from_rows(vec![vec![2, 0], vec![2, 0]]);
        let map = |s: &Scenario| {
            solution_to_fleet(&p, s, &d, DurationMode::Scaled, FleetMapping::PeakConcurrent).unwrap()
        };
        assert_eq!(map(&scenario(vec![])), FleetVector(vec![0, 0]));
        assert_eq!(map(&scenario(vec![inst(0, 0), inst(1, 10)])), FleetVector(vec![2, 0]));
        assert_eq!(map(&scenario(vec![inst(0, 0), inst(1, 2)])), FleetVector(vec![4, 0]));
        // back-to-back is not overlap
        assert_eq!(map(&scenario(vec![inst(0, 0), inst(1, 4)])), FleetVector(vec![2, 0]));
        let single = AssignmentMatrix::from_rows(vec![vec![1, 3], vec![0, 0]]);
        let f = solution_to_fleet(&single, &scenario(vec![inst(0, 7)]), &d, DurationMode::Scaled, FleetMapping::PeakConcurrent)
            .unwrap();
        assert_eq!(f, FleetVector(vec![1, 3]));
        let f = solution_to_fleet(&p, &scenario(vec![inst(0, 0), inst(1, 10)]), &d, DurationMode::Scaled, FleetMapping::SumOverTasks)
            .unwrap();
        assert_eq!(f, FleetVector(vec![4, 0]));
    }

    #[test]
    fn dedup_examples() {
        let p = vec![Platform::new(0, 1, 1, 2.0), Platform::new(1, 1, 1, 1.0)];
        let x = FleetVector(vec![1, 0]);
        let y = FleetVector(vec![0, 1]);
        assert_eq!(dedup_fleets(vec![x.clone(), x.clone()], &p).unwrap(), vec![x.clone()]);
        assert!(dedup_fleets(vec![], &p).unwrap().is_empty());
        assert_eq!(dedup_fleets(vec![x.clone(), y.clone(), x.clone()], &p).unwrap(), vec![y, x]);
    }

    proptest! {
        #[test]
        fn peak_matches_brute_force_and_is_monotone(
            starts in prop::collection::vec((0usize..2, 0u32..30), 0..12),
            extra in (0usize..2, 0u32..30),
            r0 in prop::collection::vec(0u32..3, 2),
            r1 in prop::collection::vec(0u32..3, 2),
        ) {
            let d = dataset();
            let p = AssignmentMatrix::from_rows(vec![r0, r1]);
            let s = scenario(starts.iter().map(|&(t, st)| inst(t, st)).collect());
            let f = solution_to_fleet(&p, &s, &d, DurationMode::Scaled, FleetMapping::PeakConcurrent).unwrap();
            let oracle = peak_oracle(&p, &s, &d);
            prop_assert_eq!(f.counts(), oracle.as_slice());
            let mut more = s.clone();
            more.instances.push(inst(extra.0, extra.1));
            let g = solution_to_fleet(&p, &more, &d, DurationMode::Scaled, FleetMapping::PeakConcurrent).unwrap();
            prop_assert!(crate::domain::fleet_contains(&g, &f).unwrap());
        }
    }
}
