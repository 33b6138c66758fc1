use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::Rng as _;

use fleetmix::analysis::{
    capability_csv, capability_histogram, classify, growth_lattice, histogram_csv, lattice_text,
    score_portfolio, FleetPortfolio,
};
use fleetmix::domain::{generate_dataset, load_dataset, save_dataset, validate_dataset, Dataset, FleetVector};
use fleetmix::nsga2::{
    dedup_fleets, evolve, fleets_csv, front_csv, parse_fleets_csv, solution_to_fleet, AssignmentMatrix,
    FleetMapping,
};
use fleetmix::pipeline::{
    portfolio_csv, read_artifact, report, run_pipeline, summary_csv, ArtifactWriter, ExperimentMode,
    RunConfig, SeedTree,
};
use fleetmix::ptma::{build_catalog, load_catalog, save_catalog, solution_space_log10};
use fleetmix::safe::{load_scenario, sample_scenario, save_scenario, scale_frequencies};
use fleetmix::seed::{derive_seed, rng_from_seed};
use fleetmix::{Error, Exec, Result};

#[derive(Parser)]
#[command(name = "fleetmix", version, about = "Fleet-mix sizing under uncertainty")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset.
    GenDataset {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        tasks: usize,
        /// Random platform count (default: the fixed ten-platform table).
        #[arg(long)]
        platforms: Option<usize>,
        #[arg(long, default_value = "dataset.txt")]
        out: PathBuf,
    },
    /// Enumerate every task's assignment options.
    Enumerate {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long, default_value = "catalog.txt")]
        out: PathBuf,
        #[arg(long)]
        sequential: bool,
    },
    /// Sample yearly scenarios.
    Simulate {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        years: usize,
        #[arg(long, default_value_t = 365)]
        horizon: u32,
        #[arg(long, value_enum, default_value_t = ExperimentMode::LowVariability)]
        mode: ExperimentMode,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Optimize one scenario and dump its front and fleets.
    Optimize {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        catalog: PathBuf,
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 500)]
        population: usize,
        #[arg(long, default_value_t = 100)]
        generations: usize,
        #[arg(long, default_value_t = 0.25)]
        mutation_rate: f64,
        #[arg(long, value_enum, default_value_t = FleetMapping::PeakConcurrent)]
        mapping: FleetMapping,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Score and classify every fleet under `<dir>/fleets`.
    Analyze {
        #[command(flatten)]
        portfolio: PortfolioArgs,
        #[arg(long, value_delimiter = ',', default_value = "0.01,0.02,0.03,0.04,0.05")]
        ladder: Vec<f64>,
        #[arg(long, default_value_t = 20)]
        bins: usize,
        #[arg(long)]
        sequential: bool,
    },
    /// Build the growth lattice of one fleet.
    Growth {
        #[command(flatten)]
        portfolio: PortfolioArgs,
        /// Comma-separated platform counts.
        #[arg(long, value_delimiter = ',')]
        fleet: Vec<u32>,
        #[arg(long, value_delimiter = ',', default_value = "0,0.01,0.02,0.03")]
        ladder: Vec<f64>,
    },
    /// Summarize an artifact directory.
    Report { dir: PathBuf },
    /// Run the whole pipeline.
    Run(RunArgs),
}

#[derive(Args)]
struct PortfolioArgs {
    #[arg(long)]
    dataset: PathBuf,
    /// Directory holding `fleets/fleets_*.csv`; outputs go here too.
    #[arg(long, default_value = ".")]
    dir: PathBuf,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    seed: u64,
    /// TOML file with any `RunConfig` fields; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    tasks: Option<usize>,
    #[arg(long)]
    platforms: Option<usize>,
    #[arg(long)]
    horizon: Option<u32>,
    #[arg(long)]
    years: Option<usize>,
    #[arg(long)]
    population: Option<usize>,
    #[arg(long)]
    generations: Option<usize>,
    #[arg(long)]
    mutation_rate: Option<f64>,
    #[arg(long, value_enum)]
    mode: Option<ExperimentMode>,
    #[arg(long, value_delimiter = ',')]
    ladder: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    growth_ladder: Option<Vec<f64>>,
    #[arg(long)]
    bins: Option<usize>,
    #[arg(long, value_enum)]
    mapping: Option<FleetMapping>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    sequential: bool,
    /// Use the 20-task, 20-year, N=100, G=30 configuration as the base.
    #[arg(long)]
    desk: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn into_config(self) -> Result<RunConfig> {
        let mut c = match &self.config {
            Some(path) => RunConfig::from_toml(&read(path)?)?,
            None if self.desk => RunConfig::desk(self.seed),
            None => RunConfig::default(),
        };
        c.seed = self.seed;
        macro_rules! set {
            ($($f:ident),*) => { $(if let Some(v) = self.$f { c.$f = v; })* };
        }
        set!(tasks, horizon, years, population, generations, mutation_rate, mode, growth_ladder, bins, mapping, workers);
        if self.platforms.is_some() {
            c.platforms = self.platforms;
        }
        if self.ladder.is_some() {
            c.ladder = self.ladder;
        }
        if let Some(out) = self.out {
            c.output = out;
        }
        c.sequential |= self.sequential;
        Ok(c)
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn read_dataset(path: &Path) -> Result<Dataset> {
    let d = load_dataset(&read(path)?)?;
    if let Some(v) = validate_dataset(&d).into_iter().next() {
        return Err(match v.record.strip_prefix("task ").and_then(|t| t.parse().ok()) {
            Some(task) => Error::InfeasibleTask { task, reason: v.message },
            None => Error::Parse { line: 0, record: v.record, message: v.message },
        });
    }
    Ok(d)
}

fn exec_for(sequential: bool) -> Exec {
    if sequential {
        Exec::Sequential
    } else {
        Exec::default()
    }
}

fn load_portfolio(dir: &Path, dataset: &Dataset) -> Result<FleetPortfolio> {
    let fleet_dir = dir.join("fleets");
    let entries = fs::read_dir(&fleet_dir).map_err(|_| Error::MissingArtifact(fleet_dir.clone()))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .collect();
    files.sort();
    let mut sets = Vec::new();
    for f in files {
        let fleets: Vec<FleetVector> = parse_fleets_csv(&read(&f)?, dataset.platform_count())?
            .into_iter()
            .map(|(_, fleet)| fleet)
            .collect();
        sets.push(fleets);
    }
    FleetPortfolio::new(sets)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::GenDataset { seed, tasks, platforms, out } => {
            let config = RunConfig { seed, tasks, platforms, ..RunConfig::default() };
            config.generator().validate()?;
            let d = generate_dataset(&config.generator(), derive_seed(seed, "dataset", 0))?;
            fs::write(&out, save_dataset(&d)).map_err(|e| Error::io(&out, e))?;
            println!("{} tasks, {} platforms -> {}", d.tasks.len(), d.platform_count(), out.display());
        }
        Command::Enumerate { dataset, out, sequential } => {
            let d = read_dataset(&dataset)?;
            let catalog = build_catalog(&d, exec_for(sequential))?;
            fs::write(&out, save_catalog(&catalog, &d.hash())).map_err(|e| Error::io(&out, e))?;
            let counts = catalog.option_counts();
            println!(
                "{} tasks, {} options, log10 solution space {:.2} -> {}",
                counts.len(),
                counts.iter().sum::<usize>(),
                solution_space_log10(&catalog),
                out.display()
            );
        }
        Command::Simulate { dataset, seed, years, horizon, mode, out_dir } => {
            let d = read_dataset(&dataset)?;
            let seeds = SeedTree::new(seed, years);
            let writer = ArtifactWriter::new(out_dir)?;
            for k in 0..years {
                let r = match mode {
                    ExperimentMode::LowVariability => 1.0,
                    ExperimentMode::Scaled => rng_from_seed(seeds.scales[k]).gen_range(1.0..=2.0),
                };
                let ds = if r == 1.0 { d.clone() } else { scale_frequencies(&d, r)? };
                let mut s = sample_scenario(&ds, horizon, k, seeds.scenarios[k])?;
                s.scale = r;
                writer.write(&format!("scenarios/scenario_{k:03}.txt"), &save_scenario(&s, &d.hash()))?;
            }
            println!("{years} scenarios -> {}", writer.root().join("scenarios").display());
        }
        Command::Optimize {
            dataset,
            catalog,
            scenario,
            seed,
            population,
            generations,
            mutation_rate,
            mapping,
            out_dir,
        } => {
            let d = read_dataset(&dataset)?;
            let hash = d.hash();
            let (chash, catalog) = load_catalog(&read(&catalog)?)?;
            let (shash, s) = load_scenario(&read(&scenario)?)?;
            if chash != hash {
                return Err(Error::config("catalog", "was built from a different dataset"));
            }
            if shash != hash {
                return Err(Error::config("scenario", "was sampled from a different dataset"));
            }
            let ds = if s.scale == 1.0 { d.clone() } else { scale_frequencies(&d, s.scale)? };
            let params = RunConfig { population, generations, mutation_rate, ..RunConfig::default() }.evolve_params();
            let pop = evolve(&s, &ds, &catalog, &params, derive_seed(seed, "evolve", s.id as u64))?;
            let fleets = pop
                .individuals
                .iter()
                .map(|ind| {
                    let p = AssignmentMatrix::from_genome(&ind.genome, &catalog);
                    solution_to_fleet(&p, &s, &ds, Default::default(), mapping)
                })
                .collect::<Result<Vec<_>>>()?;
            let fleets = dedup_fleets(fleets, &d.platforms)?;
            let writer = ArtifactWriter::new(out_dir)?;
            writer.write(&format!("fronts/front_{:03}.csv", s.id), &front_csv(s.id, &pop))?;
            writer.write(&format!("fleets/fleets_{:03}.csv", s.id), &fleets_csv(s.id, &fleets, &d.platforms)?)?;
            println!("scenario {}: {} individuals, {} distinct fleets", s.id, pop.len(), fleets.len());
        }
        Command::Analyze { portfolio, ladder, bins, sequential } => {
            let d = read_dataset(&portfolio.dataset)?;
            let port = load_portfolio(&portfolio.dir, &d)?;
            let config = RunConfig { ladder: Some(ladder.clone()), bins, ..RunConfig::default() };
            config.validate()?;
            let fractions = config.fractions();
            let scores = score_portfolio(&port, &fractions, &d.platforms, exec_for(sequential))?;
            let hist = capability_histogram(&scores, &fractions, bins)?;
            let classes: Vec<_> = scores.iter().map(|s| classify(&s.augmentation, s.cost, &ladder)).collect();
            let writer = ArtifactWriter::new(&portfolio.dir)?;
            writer.write("portfolio.csv", &portfolio_csv(&port, &d)?)?;
            writer.write(
                "capability.csv",
                &capability_csv(
                    scores
                        .iter()
                        .zip(&classes)
                        .enumerate()
                        .map(|(g, (s, c))| (g, s.augmentation.as_slice(), c.as_slice())),
                ),
            )?;
            writer.write("histogram.csv", &histogram_csv(&hist))?;
            writer.write("summary.csv", &summary_csv(&hist))?;
            for (f, m) in fractions.iter().zip(&hist.mean_scores) {
                println!("{:>6.2}%  mean score {m:.4}", f * 100.0);
            }
        }
        Command::Growth { portfolio, fleet, ladder } => {
            let d = read_dataset(&portfolio.dataset)?;
            let port = load_portfolio(&portfolio.dir, &d)?;
            let x = FleetVector(fleet);
            let lattice = growth_lattice(&x, &ladder, &port, &d.platforms)?;
            let writer = ArtifactWriter::new(&portfolio.dir)?;
            writer.write("growth.txt", &lattice_text(&lattice))?;
            for (level, (n, o)) in lattice.nodes_per_level().iter().zip(lattice.options_per_level()).enumerate() {
                println!("level {level}: {n} nodes, {o} options");
            }
        }
        Command::Report { dir } => {
            read_artifact(&dir, "manifest.txt").or_else(|_| read_artifact(&dir, "summary.csv"))?;
            print!("{}", report(&dir)?);
        }
        Command::Run(args) => {
            let config = args.into_config()?;
            let outcome = run_pipeline(&config)?;
            println!(
                "{} scenarios, {} fleets -> {}",
                outcome.scenarios.len(),
                outcome.portfolio.total_fleets(),
                config.output.display()
            );
            for (f, m) in outcome.fractions.iter().zip(outcome.mean_scores()) {
                println!("{:>6.2}%  mean score {m:.4}", f * 100.0);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::InvalidConfig { .. } => 2,
                Error::InfeasibleTask { .. } => 3,
                _ => 1,
            })
        }
    }
}
