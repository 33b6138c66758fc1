//! End-to-end runs: dataset, catalog, scenarios, per-scenario optimization,
//! portfolio, analysis and the artifact set with its manifest.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use rand::Rng as _;
use serde::Deserialize;

use crate::analysis::{
    capability_csv, capability_histogram, classify, growth_lattice, histogram_csv, lattice_text,
    score_portfolio, CapabilityHistogram, Classification, FleetPortfolio, FleetScores, GrowthLattice,
    DEFAULT_BINS, GROWTH_LADDER, LOW_VARIABILITY_LADDER, SCALED_LADDER,
};
use crate::domain::{
    fleet_cost, generate_dataset, save_dataset, Dataset, FleetVector, GeneratorConfig,
    PlatformSource,
};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::nsga2::{
    dedup_fleets, evolve, fleets_csv, front_csv, solution_to_fleet, AssignmentMatrix,
    DurationMatrix, EvolveParams, FleetMapping, ObjectiveTable, Population, DEFAULT_GENERATIONS,
    DEFAULT_MUTATION_RATE, DEFAULT_POPULATION,
};
use crate::ptma::{build_catalog, load_catalog, save_catalog, OptionCatalog};
use crate::safe::{
    average_usage, sample_scenario, save_scenario, scale_frequencies, usage_csv, usage_profile,
    DurationMode, Scenario, UsageStats, DEFAULT_HORIZON_DAYS, DEFAULT_YEARS,
};
use crate::seed::{derive_seed, rng_from_seed, sha256_hex};
use crate::textfmt::{check_header, fmt_num, fmt_num_list, parse_records, Line};

pub const MANIFEST_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentMode {
    /// Every scenario drawn from the same dataset.
    #[default]
    LowVariability,
    /// Each scenario's frequencies scaled by its own `r` in `[1, 2]`.
    Scaled,
}

impl fmt::Display for ExperimentMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExperimentMode::LowVariability => "low-variability",
            ExperimentMode::Scaled => "scaled",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub tasks: usize,
    /// Random platform count; `None` uses the fixed ten-platform table.
    pub platforms: Option<usize>,
    pub horizon: u32,
    pub years: usize,
    pub population: usize,
    pub generations: usize,
    pub mutation_rate: f64,
    pub mode: ExperimentMode,
    /// Budget fractions for scoring; defaults by mode.
    pub ladder: Option<Vec<f64>>,
    pub growth_ladder: Vec<f64>,
    pub bins: usize,
    pub mapping: FleetMapping,
    /// Worker threads; 0 means one per core.
    pub workers: usize,
    pub sequential: bool,
    pub output: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 0,
            tasks: 100,
            platforms: None,
            horizon: DEFAULT_HORIZON_DAYS,
            years: DEFAULT_YEARS,
            population: DEFAULT_POPULATION,
            generations: DEFAULT_GENERATIONS,
            mutation_rate: DEFAULT_MUTATION_RATE,
            mode: ExperimentMode::LowVariability,
            ladder: None,
            growth_ladder: GROWTH_LADDER.to_vec(),
            bins: DEFAULT_BINS,
            mapping: FleetMapping::PeakConcurrent,
            workers: 0,
            sequential: false,
            output: PathBuf::from("out"),
        }
    }
}

impl RunConfig {
    /// The small configuration used for quick end-to-end runs.
    pub fn desk(seed: u64) -> Self {
        RunConfig {
            seed,
            tasks: 20,
            years: 20,
            population: 100,
            generations: 30,
            ..RunConfig::default()
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::config("config", e.message().to_string()))
    }

    pub fn ladder(&self) -> Vec<f64> {
        match (&self.ladder, self.mode) {
            (Some(l), _) => l.clone(),
            (None, ExperimentMode::LowVariability) => LOW_VARIABILITY_LADDER.to_vec(),
            (None, ExperimentMode::Scaled) => SCALED_LADDER.to_vec(),
        }
    }

    /// Scoring fractions: zero followed by the ladder.
    pub fn fractions(&self) -> Vec<f64> {
        let mut out = vec![0.0];
        out.extend(self.ladder().into_iter().filter(|&f| f > 0.0));
        out
    }

    pub fn exec(&self) -> Exec {
        if self.sequential {
            Exec::Sequential
        } else {
            Exec::default()
        }
    }

    pub fn evolve_params(&self) -> EvolveParams {
        EvolveParams {
            population: self.population,
            generations: self.generations,
            mutation_rate: self.mutation_rate,
        }
    }

    pub fn generator(&self) -> GeneratorConfig {
        let mut g = GeneratorConfig::default().with_tasks(self.tasks);
        if let Some(count) = self.platforms {
            g.platforms = PlatformSource::Random {
                count,
                capacity_type1: (1, 100),
                capacity_type2: (1_000, 50_000),
            };
        }
        g
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("tasks", self.tasks),
            ("years", self.years),
            ("generations", self.generations),
            ("bins", self.bins),
            ("horizon", self.horizon as usize),
        ];
        for (field, v) in positive {
            if v == 0 {
                return Err(Error::config(field, "must be positive"));
            }
        }
        if self.platforms == Some(0) {
            return Err(Error::config("platforms", "must be positive"));
        }
        self.evolve_params().validate()?;
        let ladder = self.ladder();
        if ladder.is_empty() {
            return Err(Error::config("ladder", "must not be empty"));
        }
        for (field, l) in [("ladder", &ladder), ("growth_ladder", &self.growth_ladder)] {
            if l.iter().any(|f| !(f.is_finite() && *f >= 0.0)) {
                return Err(Error::config(field, "fractions must be finite and non-negative"));
            }
            if l.windows(2).any(|w| w[0] > w[1]) {
                return Err(Error::config(field, "must be sorted ascending"));
            }
        }
        self.generator().validate()
    }
}

/// Every seed the run consumed.
#[derive(Clone, Debug, PartialEq)]
pub struct SeedTree {
    pub master: u64,
    pub dataset: u64,
    pub scenarios: Vec<u64>,
    pub scales: Vec<u64>,
    pub evolve: Vec<u64>,
}

impl SeedTree {
    pub fn new(master: u64, years: usize) -> Self {
        let split = |label: &str| (0..years as u64).map(|k| derive_seed(master, label, k)).collect();
        SeedTree {
            master,
            dataset: derive_seed(master, "dataset", 0),
            scenarios: split("scenario"),
            scales: split("r"),
            evolve: split("evolve"),
        }
    }
}

/// Everything a run computes, before it is written out.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub seeds: SeedTree,
    pub dataset: Dataset,
    pub catalog: OptionCatalog,
    /// Frequency multiplier per scenario (1 in low-variability mode).
    pub scales: Vec<f64>,
    pub scenarios: Vec<Scenario>,
    pub populations: Vec<Population>,
    pub portfolio: FleetPortfolio,
    pub fractions: Vec<f64>,
    /// Scenario-major, matching [`FleetPortfolio::iter`].
    pub scores: Vec<FleetScores>,
    pub histogram: CapabilityHistogram,
    /// Portfolio index of the fleet the growth lattice starts from.
    pub growth_fleet: usize,
    pub lattice: GrowthLattice,
    pub usage: UsageStats,
}

impl RunOutcome {
    /// Mean capability score at each of `fractions`.
    pub fn mean_scores(&self) -> &[f64] {
        &self.histogram.mean_scores
    }

    pub fn mean_score_at(&self, fraction: f64) -> Option<f64> {
        self.fractions
            .iter()
            .position(|&f| (f - fraction).abs() < 1e-12)
            .map(|i| self.histogram.mean_scores[i])
    }
}

fn scaled_dataset(base: &Dataset, r: f64) -> Result<Dataset> {
    if r == 1.0 {
        Ok(base.clone())
    } else {
        scale_frequencies(base, r)
    }
}

/// Per task, the option with the lowest expected monetary cost.
pub fn reference_assignment(dataset: &Dataset, catalog: &OptionCatalog) -> AssignmentMatrix {
    let table = ObjectiveTable::new(catalog, &DurationMatrix::expected(dataset), &dataset.platforms);
    let genome: Vec<usize> = (0..catalog.task_count())
        .map(|i| {
            (0..catalog.options(i).len())
                .min_by(|&a, &b| table.entry(i, a).monetary.total_cmp(&table.entry(i, b).monetary))
                .unwrap_or(0)
        })
        .collect();
    AssignmentMatrix::from_genome(&genome, catalog)
}

/// The median-cost portfolio fleet, ties broken by counts then position.
fn median_fleet(portfolio: &FleetPortfolio, scores: &[FleetScores]) -> usize {
    let mut order: Vec<(usize, f64, &FleetVector)> = portfolio
        .iter()
        .zip(scores)
        .enumerate()
        .map(|(g, ((_, _, f), s))| (g, s.cost, f))
        .collect();
    order.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.2.cmp(b.2)).then(a.0.cmp(&b.0)));
    order[order.len() / 2].0
}

fn cached_catalog(dir: &Path, hash: &str) -> Option<OptionCatalog> {
    let text = fs::read_to_string(dir.join("catalog.txt")).ok()?;
    match load_catalog(&text) {
        Ok((h, catalog)) if h == hash => Some(catalog),
        _ => None,
    }
}

/// Runs the whole computation in memory. `cache_dir` is searched for a
/// catalog built from the same dataset.
pub fn run_experiment(config: &RunConfig, cache_dir: Option<&Path>) -> Result<RunOutcome> {
    config.validate()?;
    let exec = config.exec();
    exec.install(config.workers, || run_stages(config, cache_dir, exec))
}

fn run_stages(config: &RunConfig, cache_dir: Option<&Path>, exec: Exec) -> Result<RunOutcome> {
    let seeds = SeedTree::new(config.seed, config.years);
    let dataset = generate_dataset(&config.generator(), seeds.dataset)?;
    let hash = dataset.hash();
    let catalog = match cache_dir.and_then(|d| cached_catalog(d, &hash)) {
        Some(c) => c,
        None => build_catalog(&dataset, exec)?,
    };

    let scales: Vec<f64> = match config.mode {
        ExperimentMode::LowVariability => vec![1.0; config.years],
        ExperimentMode::Scaled => seeds
            .scales
            .iter()
            .map(|&s| rng_from_seed(s).gen_range(1.0..=2.0))
            .collect(),
    };
    let params = config.evolve_params();

    let per_scenario = exec.try_map_range(config.years, |k| -> Result<_> {
        let ds = scaled_dataset(&dataset, scales[k])?;
        let mut scenario = sample_scenario(&ds, config.horizon, k, seeds.scenarios[k])?;
        scenario.scale = scales[k];
        let population = evolve(&scenario, &ds, &catalog, &params, seeds.evolve[k])?;
        let fleets = population
            .individuals
            .iter()
            .map(|ind| {
                let p = AssignmentMatrix::from_genome(&ind.genome, &catalog);
                solution_to_fleet(&p, &scenario, &ds, DurationMode::Scaled, config.mapping)
            })
            .collect::<Result<Vec<_>>>()?;
        let fleets = dedup_fleets(fleets, &ds.platforms)?;
        Ok((scenario, population, fleets))
    })?;

    let mut scenarios = Vec::with_capacity(config.years);
    let mut populations = Vec::with_capacity(config.years);
    let mut sets = Vec::with_capacity(config.years);
    for (s, p, f) in per_scenario {
        scenarios.push(s);
        populations.push(p);
        sets.push(f);
    }
    let portfolio = FleetPortfolio::new(sets)?;
    let fractions = config.fractions();
    let scores = score_portfolio(&portfolio, &fractions, &dataset.platforms, exec)?;
    let histogram = capability_histogram(&scores, &fractions, config.bins)?;

    let growth_fleet = median_fleet(&portfolio, &scores);
    let root = portfolio.iter().nth(growth_fleet).map(|(_, _, f)| f.clone()).expect("index in range");
    let lattice = growth_lattice(&root, &config.growth_ladder, &portfolio, &dataset.platforms)?;

    let reference = reference_assignment(&dataset, &catalog);
    let profiles = exec.try_map_range(config.years, |k| {
        let ds = scaled_dataset(&dataset, scales[k])?;
        usage_profile(&scenarios[k], &ds, &reference, DurationMode::Scaled)
    })?;
    let usage = average_usage(&profiles)?;

    Ok(RunOutcome {
        seeds,
        dataset,
        catalog,
        scales,
        scenarios,
        populations,
        portfolio,
        fractions,
        scores,
        histogram,
        growth_fleet,
        lattice,
        usage,
    })
}

/// `fleet_id,scenario_id,fleet_index,p0..,fleet_cost`, ids in portfolio order.
pub fn portfolio_csv(portfolio: &FleetPortfolio, dataset: &Dataset) -> Result<String> {
    let mut out = String::from("fleet_id,scenario_id,fleet_index");
    for p in &dataset.platforms {
        out.push_str(&format!(",p{}", p.id));
    }
    out.push_str(",fleet_cost\n");
    for (g, (k, j, f)) in portfolio.iter().enumerate() {
        out.push_str(&format!("{g},{k},{j}"));
        for c in f.counts() {
            out.push_str(&format!(",{c}"));
        }
        out.push_str(&format!(",{}\n", fmt_num(fleet_cost(f, &dataset.platforms)?)));
    }
    Ok(out)
}

/// `fraction,mean_score,fleets_at_least_0.9`.
pub fn summary_csv(h: &CapabilityHistogram) -> String {
    let mut out = String::from("fraction,mean_score,fleets_at_least_0.9\n");
    for (rung, f) in h.fractions.iter().enumerate() {
        out.push_str(&format!(
            "{},{},{}\n",
            fmt_num(*f),
            fmt_num(h.mean_scores[rung]),
            h.at_least(rung, 0.9)
        ));
    }
    out
}

/// Every artifact except the manifest, as `(relative path, contents)`.
pub fn render_artifacts(config: &RunConfig, outcome: &RunOutcome) -> Result<Vec<(String, String)>> {
    let hash = outcome.dataset.hash();
    let platforms = &outcome.dataset.platforms;
    let mut files = vec![
        ("dataset.txt".to_string(), save_dataset(&outcome.dataset)),
        ("catalog.txt".to_string(), save_catalog(&outcome.catalog, &hash)),
    ];
    for (k, s) in outcome.scenarios.iter().enumerate() {
        files.push((format!("scenarios/scenario_{k:03}.txt"), save_scenario(s, &hash)));
    }
    for (k, p) in outcome.populations.iter().enumerate() {
        files.push((format!("fronts/front_{k:03}.csv"), front_csv(k, p)));
    }
    for k in 0..outcome.portfolio.scenario_count() {
        files.push((
            format!("fleets/fleets_{k:03}.csv"),
            fleets_csv(k, outcome.portfolio.fleets(k), platforms)?,
        ));
    }
    files.push(("portfolio.csv".into(), portfolio_csv(&outcome.portfolio, &outcome.dataset)?));

    let ladder = config.ladder();
    let classes: Vec<Vec<Classification>> = outcome
        .scores
        .iter()
        .map(|s| classify(&s.augmentation, s.cost, &ladder))
        .collect();
    files.push((
        "capability.csv".into(),
        capability_csv(
            outcome
                .scores
                .iter()
                .zip(&classes)
                .enumerate()
                .map(|(g, (s, c))| (g, s.augmentation.as_slice(), c.as_slice())),
        ),
    ));
    files.push(("histogram.csv".into(), histogram_csv(&outcome.histogram)));
    files.push(("summary.csv".into(), summary_csv(&outcome.histogram)));
    files.push(("growth.txt".into(), lattice_text(&outcome.lattice)));
    files.push(("usage.csv".into(), usage_csv(&outcome.usage)));
    Ok(files)
}

/// Seeds, scale factors and the hash of every other artifact.
pub fn manifest_text(config: &RunConfig, outcome: &RunOutcome, files: &[(String, String)]) -> String {
    let mut out = String::new();
    Line::new("schema")
        .field("document", "manifest")
        .field("schema_version", MANIFEST_SCHEMA_VERSION)
        .finish(&mut out);
    Line::new("config")
        .field("seed", config.seed)
        .field("tasks", config.tasks)
        .field("platforms", config.platforms.map_or("table".to_string(), |n| n.to_string()))
        .field("horizon", config.horizon)
        .field("years", config.years)
        .field("population", config.population)
        .field("generations", config.generations)
        .num("mutation_rate", config.mutation_rate)
        .field("mode", config.mode)
        .field("ladder", fmt_num_list(&config.ladder()))
        .field("growth_ladder", fmt_num_list(&config.growth_ladder))
        .field("bins", config.bins)
        .field("mapping", config.mapping)
        .finish(&mut out);
    Line::new("seed")
        .field("purpose", "dataset")
        .field("index", 0)
        .field("value", outcome.seeds.dataset)
        .finish(&mut out);
    for k in 0..config.years {
        Line::new("seed")
            .field("purpose", "scenario")
            .field("index", k)
            .field("value", outcome.seeds.scenarios[k])
            .finish(&mut out);
        if config.mode == ExperimentMode::Scaled {
            Line::new("seed")
                .field("purpose", "r")
                .field("index", k)
                .field("value", outcome.seeds.scales[k])
                .num("r", outcome.scales[k])
                .finish(&mut out);
        }
        Line::new("seed")
            .field("purpose", "evolve")
            .field("index", k)
            .field("value", outcome.seeds.evolve[k])
            .finish(&mut out);
    }
    Line::new("growth")
        .field("fleet_id", outcome.growth_fleet)
        .field("fleet", &outcome.lattice.root)
        .num("score", outcome.lattice.root_node().score)
        .finish(&mut out);
    for (path, body) in files {
        Line::new("file")
            .field("path", path)
            .field("bytes", body.len())
            .field("sha256", sha256_hex(body.as_bytes()))
            .finish(&mut out);
    }
    out
}

/// The only place artifacts touch the file system.
#[derive(Debug)]
pub struct ArtifactWriter {
    root: PathBuf,
}

impl ArtifactWriter {
    pub fn new(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        fs::create_dir_all(&root).map_err(|e| Error::io(&root, e))?;
        Ok(ArtifactWriter { root })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn write(&self, rel: &str, contents: &str) -> Result<PathBuf> {
        let path = self.root.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
        fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
        Ok(path)
    }
}

/// Runs and writes every artifact under `config.output`, the manifest last.
pub fn run_pipeline(config: &RunConfig) -> Result<RunOutcome> {
    let outcome = run_experiment(config, Some(&config.output))?;
    let files = render_artifacts(config, &outcome)?;
    let writer = ArtifactWriter::new(&config.output)?;
    for (path, body) in &files {
        writer.write(path, body)?;
    }
    writer.write("manifest.txt", &manifest_text(config, &outcome, &files))?;
    Ok(outcome)
}

pub fn read_artifact(dir: &Path, name: &str) -> Result<String> {
    let path = dir.join(name);
    if !path.is_file() {
        return Err(Error::MissingArtifact(path));
    }
    fs::read_to_string(&path).map_err(|e| Error::io(&path, e))
}

/// Summary of an artifact directory.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    /// `(fraction, mean score, fleets scoring at least 0.9)`.
    pub scores: Vec<(f64, f64, usize)>,
    /// Fleet-scenario pair counts: robust, each adaptable rung, then risk.
    pub classes: Vec<(String, usize)>,
    /// `(nodes, options)` per growth level.
    pub growth: Vec<(usize, usize)>,
}

pub fn report(dir: &Path) -> Result<Report> {
    let summary = read_artifact(dir, "summary.csv")?;
    let capability = read_artifact(dir, "capability.csv")?;
    let growth = read_artifact(dir, "growth.txt")?;

    let mut scores = Vec::new();
    for rec in csv::Reader::from_reader(summary.as_bytes()).records() {
        let rec = rec?;
        let field = |i: usize| -> Result<f64> {
            rec.get(i).and_then(|s| s.parse().ok()).ok_or_else(|| Error::Parse {
                line: rec.position().map_or(0, |p| p.line() as usize),
                record: "summary".into(),
                message: format!("bad column {i}"),
            })
        };
        scores.push((field(0)?, field(1)?, field(2)? as usize));
    }

    let mut robust = 0;
    let mut risk = 0;
    let mut adaptable: Vec<(f64, String, usize)> = Vec::new();
    for rec in csv::Reader::from_reader(capability.as_bytes()).records() {
        let rec = rec?;
        let label = rec.get(3).unwrap_or_default().to_string();
        match label.as_str() {
            "robust" => robust += 1,
            "risk" => risk += 1,
            other => {
                let f: f64 = other
                    .strip_prefix("adaptable@")
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| Error::Parse {
                        line: rec.position().map_or(0, |p| p.line() as usize),
                        record: "capability".into(),
                        message: format!("unknown classification `{other}`"),
                    })?;
                match adaptable.iter_mut().find(|a| a.1 == label) {
                    Some(a) => a.2 += 1,
                    None => adaptable.push((f, label, 1)),
                }
            }
        }
    }
    adaptable.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut classes = vec![("robust".to_string(), robust)];
    classes.extend(adaptable.into_iter().map(|(_, l, n)| (l, n)));
    classes.push(("risk".to_string(), risk));

    let records = parse_records(&growth)?;
    check_header(&records, "growth", 1)?;
    let count = match records.iter().find(|r| r.kind == "lattice") {
        Some(rec) => rec.get("levels")?,
        None => 0,
    };
    let mut levels: Vec<(usize, usize)> = vec![(0, 0); count];
    for rec in records.iter().filter(|r| r.kind == "node") {
        let level: usize = rec.get("level")?;
        if levels.len() <= level {
            levels.resize(level + 1, (0, 0));
        }
        levels[level].0 += 1;
        levels[level].1 += rec.get::<usize>("option_count")?;
    }
    Ok(Report { scores, classes, growth: levels })
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "capability scores")?;
        writeln!(f, "  {:>10}  {:>10}  {:>12}", "fraction", "mean", "fleets>=0.9")?;
        for (fr, mean, top) in &self.scores {
            writeln!(f, "  {:>9.2}%  {:>10.4}  {:>12}", fr * 100.0, mean, top)?;
        }
        writeln!(f, "scenario classification (fleet-scenario pairs)")?;
        for (label, n) in &self.classes {
            writeln!(f, "  {label:<20} {n}")?;
        }
        writeln!(f, "growth lattice")?;
        for (level, (nodes, options)) in self.growth.iter().enumerate() {
            writeln!(f, "  level {level}: {nodes} nodes, {options} options")?;
        }
        Ok(())
    }
}
