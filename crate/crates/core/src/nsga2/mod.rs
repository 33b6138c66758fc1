//! Elitist non-dominated sorting GA over per-task assignment choices.

mod evolve;
mod fleet_map;
mod io;
mod operators;
mod sort;

pub use evolve::{
    evolve, evolve_observed, EvolveParams, Individual, Population, DEFAULT_GENERATIONS,
    DEFAULT_MUTATION_RATE, DEFAULT_POPULATION,
};
pub use fleet_map::{dedup_fleets, solution_to_fleet, FleetMapping};
pub use io::{fleets_csv, front_csv, parse_fleets_csv};
pub use operators::{crossover, mutate};
pub use sort::{binary_tournament, crowding_distance, nondominated_sort};

use crate::domain::{Dataset, Platform};
use crate::error::{Error, Result};
use crate::ptma::OptionCatalog;

/// One catalog option index per task.
pub type Genome = Vec<usize>;

/// The solution matrix `P`: row `i` holds the platform counts used for task `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AssignmentMatrix {
    rows: Vec<Vec<u32>>,
}

impl AssignmentMatrix {
    pub fn from_rows(rows: Vec<Vec<u32>>) -> Self {
        AssignmentMatrix { rows }
    }

    pub fn from_genome(genome: &[usize], catalog: &OptionCatalog) -> Self {
        AssignmentMatrix {
            rows: genome
                .iter()
                .enumerate()
                .map(|(task, &k)| catalog.option(task, k).counts.clone())
                .collect(),
        }
    }

    pub fn row(&self, task: usize) -> Option<&[u32]> {
        self.rows.get(task).map(Vec::as_slice)
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn tasks(&self) -> usize {
        self.rows.len()
    }
}

/// `d_i(v)`: days one platform of type `v` spends on its share of all
/// instances of task `i` in a year.
#[derive(Clone, Debug, PartialEq)]
pub struct DurationMatrix {
    rows: Vec<Vec<f64>>,
}

impl DurationMatrix {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Self {
        DurationMatrix { rows }
    }

    /// Baseline platform durations times the mode of each task's frequency.
    pub fn expected(dataset: &Dataset) -> Self {
        DurationMatrix {
            rows: dataset
                .tasks
                .iter()
                .map(|t| t.durations.iter().map(|d| d * t.freq_dist.mode).collect())
                .collect(),
        }
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }
}

/// Both minimized.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Objectives {
    pub monetary: f64,
    pub time: f64,
}

impl Objectives {
    pub fn new(monetary: f64, time: f64) -> Self {
        Objectives { monetary, time }
    }

    pub fn get(&self, k: usize) -> f64 {
        if k == 0 {
            self.monetary
        } else {
            self.time
        }
    }
}

/// Pareto dominance for minimization.
pub fn dominates(a: &Objectives, b: &Objectives) -> bool {
    a.monetary <= b.monetary && a.time <= b.time && (a.monetary < b.monetary || a.time < b.time)
}

fn check_shapes(p: &AssignmentMatrix, d: &DurationMatrix, np: usize) -> Result<()> {
    if p.rows.len() != d.rows.len() {
        return Err(Error::DimensionMismatch { expected: d.rows.len(), found: p.rows.len() });
    }
    for (pr, dr) in p.rows.iter().zip(&d.rows) {
        if pr.len() != np || dr.len() != np {
            return Err(Error::DimensionMismatch { expected: np, found: pr.len().min(dr.len()) });
        }
    }
    Ok(())
}

/// Platform-days committed per platform type: `sum_i d_i(v) * p_i(v)`.
fn platform_days(p: &AssignmentMatrix, d: &DurationMatrix, np: usize) -> Vec<f64> {
    let mut per = vec![0.0; np];
    for (pr, dr) in p.rows.iter().zip(&d.rows) {
        for v in 0..np {
            per[v] += dr[v] * pr[v] as f64;
        }
    }
    per
}

/// `sum_v [sum_i d_i(v) p_i(v)] c(v)`.
pub fn monetary_cost(p: &AssignmentMatrix, d: &DurationMatrix, platforms: &[Platform]) -> Result<f64> {
    check_shapes(p, d, platforms.len())?;
    Ok(platform_days(p, d, platforms.len())
        .iter()
        .zip(platforms)
        .map(|(days, pl)| days * pl.cost)
        .sum())
}

/// `sum_v sum_i d_i(v) p_i(v)`.
pub fn time_cost(p: &AssignmentMatrix, d: &DurationMatrix, platforms: &[Platform]) -> Result<f64> {
    check_shapes(p, d, platforms.len())?;
    Ok(platform_days(p, d, platforms.len()).iter().sum())
}

/// Per-(task, option) objective contributions, so a genome evaluates by
/// summing table entries.
#[derive(Clone, Debug)]
pub struct ObjectiveTable {
    entries: Vec<Vec<Objectives>>,
}

impl ObjectiveTable {
    pub fn new(catalog: &OptionCatalog, d: &DurationMatrix, platforms: &[Platform]) -> Self {
        let entries = (0..catalog.task_count())
            .map(|i| {
                catalog
                    .options(i)
                    .iter()
                    .map(|o| {
                        let mut money = 0.0;
                        let mut time = 0.0;
                        for (v, &n) in o.counts.iter().enumerate() {
                            let days = d.rows[i][v] * n as f64;
                            money += days * platforms[v].cost;
                            time += days;
                        }
                        Objectives::new(money, time)
                    })
                    .collect()
            })
            .collect();
        ObjectiveTable { entries }
    }

    /// Contribution of option `option` of task `task`.
    pub fn entry(&self, task: usize, option: usize) -> Objectives {
        self.entries[task][option]
    }

    pub fn evaluate(&self, genome: &[usize]) -> Objectives {
        let mut acc = Objectives::new(0.0, 0.0);
        for (i, &k) in genome.iter().enumerate() {
            let e = self.entries[i][k];
            acc.monetary += e.monetary;
            acc.time += e.time;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{generate_dataset, table1_platforms, GeneratorConfig};
    use crate::exec::Exec;
    use crate::ptma::build_catalog;
    use crate::seed::rng_from_seed;
    use rand::Rng;

    fn p9_example() -> (AssignmentMatrix, DurationMatrix) {
        let mut row = vec![0; 10];
        row[8] = 2;
        let mut drow = vec![0.0; 10];
        drow[8] = 9.45;
        (AssignmentMatrix::from_rows(vec![row]), DurationMatrix::from_rows(vec![drow]))
    }

    #[test]
    fn objective_examples() {
        let platforms = table1_platforms();
        let (p, d) = p9_example();
        assert!((monetary_cost(&p, &d, &platforms).unwrap() - 65.17854).abs() < 1e-9);
        assert!((time_cost(&p, &d, &platforms).unwrap() - 18.90).abs() < 1e-12);
        let zero = AssignmentMatrix::from_rows(vec![vec![0; 10]]);
        assert_eq!(monetary_cost(&zero, &d, &platforms).unwrap(), 0.0);
        assert_eq!(time_cost(&zero, &d, &platforms).unwrap(), 0.0);
        let doubled = AssignmentMatrix::from_rows(vec![p.rows[0].iter().map(|x| 2 * x).collect()]);
        assert!((time_cost(&doubled, &d, &platforms).unwrap() - 37.8).abs() < 1e-12);
        assert!(monetary_cost(&AssignmentMatrix::from_rows(vec![]), &d, &platforms).is_err());
    }

    #[test]
    fn unit_costs_reduce_monetary_to_time() {
        let mut rng = rng_from_seed(3);
        let mut platforms = table1_platforms();
        for p in &mut platforms {
            p.cost = 1.0;
        }
        for _ in 0..50 {
            let tasks = rng.gen_range(1..20);
            let p = AssignmentMatrix::from_rows(
                (0..tasks).map(|_| (0..10).map(|_| rng.gen_range(0..5)).collect()).collect(),
            );
            let d = DurationMatrix::from_rows(
                (0..tasks).map(|_| (0..10).map(|_| rng.gen_range(0.0..30.0)).collect()).collect(),
            );
            assert_eq!(monetary_cost(&p, &d, &platforms).unwrap(), time_cost(&p, &d, &platforms).unwrap());
        }
    }

    #[test]
    fn dominance_examples() {
        let o = Objectives::new;
        assert!(dominates(&o(1.0, 2.0), &o(2.0, 3.0)));
        assert!(!dominates(&o(1.0, 3.0), &o(3.0, 1.0)));
        assert!(!dominates(&o(3.0, 1.0), &o(1.0, 3.0)));
        assert!(!dominates(&o(1.0, 1.0), &o(1.0, 1.0)));
        assert!(dominates(&o(1.0, 1.0), &o(1.0, 2.0)));
    }

    #[test]
    fn table_evaluation_matches_matrix_evaluation() {
        let d = generate_dataset(&GeneratorConfig::default().with_tasks(15), 8).unwrap();
        let cat = build_catalog(&d, Exec::default()).unwrap();
        let dm = DurationMatrix::expected(&d);
        let table = ObjectiveTable::new(&cat, &dm, &d.platforms);
        let mut rng = rng_from_seed(1);
        for _ in 0..20 {
            let g: Genome = (0..15).map(|i| rng.gen_range(0..cat.options(i).len())).collect();
            let p = AssignmentMatrix::from_genome(&g, &cat);
            let t = table.evaluate(&g);
            let m = monetary_cost(&p, &dm, &d.platforms).unwrap();
            let tm = time_cost(&p, &dm, &d.platforms).unwrap();
            assert!((t.monetary - m).abs() <= 1e-9 * m.max(1.0));
            assert!((t.time - tm).abs() <= 1e-9 * tm.max(1.0));
        }
    }
}
