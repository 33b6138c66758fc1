use rand::Rng as _;

use super::sort::{binary_tournament, crowding_distance, nondominated_sort};
use super::{crossover, mutate, DurationMatrix, Genome, ObjectiveTable, Objectives};
use crate::domain::Dataset;
use crate::error::{Error, Result};
use crate::ptma::OptionCatalog;
use crate::safe::Scenario;
use crate::seed::{rng_from_seed, Rng};

pub const DEFAULT_POPULATION: usize = 500;
pub const DEFAULT_GENERATIONS: usize = 100;
pub const DEFAULT_MUTATION_RATE: f64 = 0.25;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvolveParams {
    pub population: usize,
    pub generations: usize,
    pub mutation_rate: f64,
}

impl Default for EvolveParams {
    fn default() -> Self {
        EvolveParams {
            population: DEFAULT_POPULATION,
            generations: DEFAULT_GENERATIONS,
            mutation_rate: DEFAULT_MUTATION_RATE,
        }
    }
}

impl EvolveParams {
    pub fn validate(&self) -> Result<()> {
        // Four survivors are enough to keep both objectives' boundary points.
        if self.population < 4 {
            return Err(Error::config("population", "must be at least 4"));
        }
        if !(0.0..=1.0).contains(&self.mutation_rate) {
            return Err(Error::config("mutation_rate", "must be in [0, 1]"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Individual {
    pub genome: Genome,
    pub objectives: Objectives,
    pub rank: usize,
    pub crowding: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Population {
    pub individuals: Vec<Individual>,
    /// Indices into `individuals`, best front first.
    pub fronts: Vec<Vec<usize>>,
}

impl Population {
    fn ranked(genomes: Vec<(Genome, Objectives)>) -> Self {
        let objs: Vec<Objectives> = genomes.iter().map(|(_, o)| *o).collect();
        let fronts = nondominated_sort(&objs);
        let mut rank = vec![0; objs.len()];
        let mut crowd = vec![0.0; objs.len()];
        for (r, front) in fronts.iter().enumerate() {
            for (&i, d) in front.iter().zip(crowding_distance(&objs, front)) {
                rank[i] = r;
                crowd[i] = d;
            }
        }
        let individuals = genomes
            .into_iter()
            .enumerate()
            .map(|(i, (genome, objectives))| Individual {
                genome,
                objectives,
                rank: rank[i],
                crowding: crowd[i],
            })
            .collect();
        Population { individuals, fronts }
    }

    pub fn len(&self) -> usize {
        self.individuals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.individuals.is_empty()
    }

    pub fn first_front(&self) -> impl Iterator<Item = &Individual> + '_ {
        self.fronts
            .first()
            .into_iter()
            .flatten()
            .map(move |&i| &self.individuals[i])
    }

    /// Per-objective population minimum `(monetary, time)`.
    pub fn minima(&self) -> (f64, f64) {
        self.individuals.iter().fold((f64::INFINITY, f64::INFINITY), |(m, t), ind| {
            (m.min(ind.objectives.monetary), t.min(ind.objectives.time))
        })
    }

    fn tournament(&self, rng: &mut Rng, rank: &[usize], crowd: &[f64]) -> &Individual {
        &self.individuals[binary_tournament(rank, crowd, rng)]
    }
}

/// Runs the generational loop for one scenario and returns the final
/// population. Deterministic given `seed`.
pub fn evolve(
    scenario: &Scenario,
    dataset: &Dataset,
    catalog: &OptionCatalog,
    params: &EvolveParams,
    seed: u64,
) -> Result<Population> {
    evolve_observed(scenario, dataset, catalog, params, seed, |_, _| {})
}

/// [`evolve`] with a callback invoked on the initial population (generation 0)
/// and after every generation.
pub fn evolve_observed(
    scenario: &Scenario,
    dataset: &Dataset,
    catalog: &OptionCatalog,
    params: &EvolveParams,
    seed: u64,
    mut observe: impl FnMut(usize, &Population),
) -> Result<Population> {
    params.validate()?;
    let tasks = catalog.task_count();
    if tasks != dataset.tasks.len() {
        return Err(Error::DimensionMismatch { expected: dataset.tasks.len(), found: tasks });
    }
    if let Some(bad) = scenario.instances.iter().find(|i| i.task_id >= tasks) {
        return Err(Error::MissingAssignment { task: bad.task_id });
    }
    let table = ObjectiveTable::new(catalog, &DurationMatrix::expected(dataset), &dataset.platforms);
    let sizes = catalog.option_counts();
    let n = params.population;
    let mut rng = rng_from_seed(seed);

    let initial: Vec<(Genome, Objectives)> = (0..n)
        .map(|_| {
            let g: Genome = sizes.iter().map(|&k| rng.gen_range(0..k)).collect();
            let o = table.evaluate(&g);
            (g, o)
        })
        .collect();
    let mut pop = Population::ranked(initial);
    observe(0, &pop);

    for gen in 1..=params.generations {
        let rank: Vec<usize> = pop.individuals.iter().map(|i| i.rank).collect();
        let crowd: Vec<f64> = pop.individuals.iter().map(|i| i.crowding).collect();
        let mut merged: Vec<(Genome, Objectives)> = pop
            .individuals
            .iter()
            .map(|i| (i.genome.clone(), i.objectives))
            .collect();
        for _ in 0..n {
            let a = pop.tournament(&mut rng, &rank, &crowd);
            let b = pop.tournament(&mut rng, &rank, &crowd);
            let mut child = crossover(&a.genome, &b.genome, &mut rng);
            mutate(&mut child, catalog, params.mutation_rate, &mut rng);
            let o = table.evaluate(&child);
            merged.push((child, o));
        }

        let objs: Vec<Objectives> = merged.iter().map(|(_, o)| *o).collect();
        let mut keep: Vec<usize> = Vec::with_capacity(n);
        for front in nondominated_sort(&objs) {
            if keep.len() + front.len() <= n {
                keep.extend(&front);
            } else {
                let dist = crowding_distance(&objs, &front);
                let mut order: Vec<usize> = (0..front.len()).collect();
                order.sort_by(|&x, &y| dist[y].total_cmp(&dist[x]));
                keep.extend(order.iter().take(n - keep.len()).map(|&k| front[k]));
            }
            if keep.len() == n {
                break;
            }
        }
        keep.sort_unstable();
        let mut slots: Vec<Option<(Genome, Objectives)>> = merged.into_iter().map(Some).collect();
        let survivors = keep.iter().map(|&i| slots[i].take().expect("unique")).collect();
        pop = Population::ranked(survivors);
        observe(gen, &pop);
    }
    Ok(pop)
}
