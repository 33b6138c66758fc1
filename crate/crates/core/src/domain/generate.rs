//! Synthetic dataset generator.

use rand::Rng as _;

use super::{
    table1_platforms, CargoType, Dataset, Platform, SubfunctionRequirement, Task,
    TriangularParams,
};
use crate::error::{Error, Result};
use crate::seed::{rng_from_seed, Rng};

/// Where the platform table comes from.
#[derive(Clone, Debug, PartialEq)]
pub enum PlatformSource {
    /// Use these platforms verbatim.
    Fixed(Vec<Platform>),
    /// Draw `count` platforms with capacities uniform over the given ranges.
    Random {
        count: usize,
        capacity_type1: (u64, u64),
        capacity_type2: (u64, u64),
    },
}

/// Duration bounds for one duration-type, affine in a platform's normalized
/// capacity `c` in `[0, 1]`: `[low + low_slope * c, high + high_slope * c]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DurationBounds {
    pub low: f64,
    pub high: f64,
    pub low_slope: f64,
    pub high_slope: f64,
}

impl DurationBounds {
    pub const fn new(low: f64, high: f64, low_slope: f64, high_slope: f64) -> Self {
        DurationBounds {
            low,
            high,
            low_slope,
            high_slope,
        }
    }

    pub fn at(&self, c: f64) -> (f64, f64) {
        (self.low + self.low_slope * c, self.high + self.high_slope * c)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorConfig {
    pub tasks: usize,
    pub platforms: PlatformSource,
    /// Inclusive range of cargo types per task (each within 1..=2).
    pub cargo_types: (usize, usize),
    /// Inclusive range of subfunctions per cargo type (each within 1..=3).
    pub subfunctions: (usize, usize),
    pub quantity_type1: (u64, u64),
    pub quantity_type2: (u64, u64),
    /// Probability that a platform can serve a given subfunction.
    pub suitability_probability: f64,
    pub duration_bounds: [DurationBounds; 4],
    /// Range for the nominal yearly frequency (mode of `freq_dist`).
    pub frequency: (f64, f64),
    /// Redraws of a suitability row before giving up.
    pub max_redraws: usize,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            tasks: 100,
            platforms: PlatformSource::Fixed(table1_platforms()),
            cargo_types: (1, 2),
            subfunctions: (1, 3),
            quantity_type1: (1, 250),
            quantity_type2: (1_000, 60_000),
            suitability_probability: 0.2,
            duration_bounds: [
                DurationBounds::new(2.0, 4.0, -1.0, -1.0),
                DurationBounds::new(4.0, 8.0, -1.5, -1.5),
                DurationBounds::new(7.0, 12.0, -2.0, -2.0),
                DurationBounds::new(10.0, 16.0, -3.0, -3.0),
            ],
            frequency: (0.5, 4.0),
            max_redraws: 1_000,
        }
    }
}

impl GeneratorConfig {
    pub fn with_tasks(mut self, tasks: usize) -> Self {
        self.tasks = tasks;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let range_ok = |(lo, hi): (usize, usize), max: usize| lo >= 1 && lo <= hi && hi <= max;
        if self.tasks == 0 {
            return Err(Error::config("tasks", "must be positive"));
        }
        match &self.platforms {
            PlatformSource::Fixed(p) if p.is_empty() => {
                return Err(Error::config("platforms", "must be non-empty"))
            }
            PlatformSource::Fixed(p) => {
                for (i, pl) in p.iter().enumerate() {
                    if pl.id != i || pl.capacity_type1 == 0 || pl.capacity_type2 == 0 || !(pl.cost > 0.0) {
                        return Err(Error::config("platforms", format!("platform {i} is invalid")));
                    }
                }
            }
            PlatformSource::Random {
                count,
                capacity_type1,
                capacity_type2,
            } => {
                if *count == 0 {
                    return Err(Error::config("platforms", "must be positive"));
                }
                for (lo, hi) in [capacity_type1, capacity_type2] {
                    if *lo == 0 || lo > hi {
                        return Err(Error::config("platforms", "capacity range must be positive and ordered"));
                    }
                }
            }
        }
        if !range_ok(self.cargo_types, 2) {
            return Err(Error::config("cargo_types", "must lie within 1..=2"));
        }
        if !range_ok(self.subfunctions, 3) {
            return Err(Error::config("subfunctions", "must lie within 1..=3"));
        }
        for (name, (lo, hi)) in [
            ("quantity_type1", self.quantity_type1),
            ("quantity_type2", self.quantity_type2),
        ] {
            if lo > hi {
                return Err(Error::config(name, "range must be ordered"));
            }
        }
        if !(self.suitability_probability > 0.0 && self.suitability_probability <= 1.0) {
            return Err(Error::config(
                "suitability_probability",
                "must be in (0, 1]; otherwise some subfunction has no suitable platform",
            ));
        }
        for (k, b) in self.duration_bounds.iter().enumerate() {
            for c in [0.0, 1.0] {
                let (lo, hi) = b.at(c);
                if !(lo >= 0.01 && lo <= hi) {
                    return Err(Error::config(
                        "duration_bounds",
                        format!("duration-type {} bounds are empty or non-positive", k + 1),
                    ));
                }
            }
        }
        let (flo, fhi) = self.frequency;
        if !(flo >= 0.0 && flo <= fhi && fhi.is_finite()) {
            return Err(Error::config("frequency", "range must be non-negative and ordered"));
        }
        Ok(())
    }
}

fn round_to(x: f64, decimals: i32) -> f64 {
    let scale = 10f64.powi(decimals);
    (x * scale).round() / scale
}

fn random_platforms(
    rng: &mut Rng,
    count: usize,
    cap1: (u64, u64),
    cap2: (u64, u64),
) -> Vec<Platform> {
    (0..count)
        .map(|id| {
            let c1 = rng.gen_range(cap1.0..=cap1.1);
            let c2 = rng.gen_range(cap2.0..=cap2.1);
            // Cost roughly tracks capacity with multiplicative noise.
            let base = 0.5 + 0.02 * c1 as f64 + 4.0e-5 * c2 as f64;
            let cost = round_to(base * rng.gen_range(0.5..1.5), 4).max(0.0001);
            Platform::new(id, c1, c2, cost)
        })
        .collect()
}

/// Mean of the two capacities, each normalized by the dataset maximum.
fn normalized_capacities(platforms: &[Platform]) -> Vec<f64> {
    let max1 = platforms.iter().map(|p| p.capacity_type1).max().unwrap_or(1) as f64;
    let max2 = platforms.iter().map(|p| p.capacity_type2).max().unwrap_or(1) as f64;
    platforms
        .iter()
        .map(|p| 0.5 * (p.capacity_type1 as f64 / max1 + p.capacity_type2 as f64 / max2))
        .collect()
}

/// Generates a random dataset. Identical `(config, seed)` gives an identical dataset.
pub fn generate_dataset(config: &GeneratorConfig, seed: u64) -> Result<Dataset> {
    config.validate()?;
    let mut rng = rng_from_seed(seed);
    let platforms = match &config.platforms {
        PlatformSource::Fixed(p) => p.clone(),
        PlatformSource::Random {
            count,
            capacity_type1,
            capacity_type2,
        } => random_platforms(&mut rng, *count, *capacity_type1, *capacity_type2),
    };
    let np = platforms.len();
    let norm_cap = normalized_capacities(&platforms);

    let mut tasks = Vec::with_capacity(config.tasks);
    for id in 0..config.tasks {
        let n_cargo = rng.gen_range(config.cargo_types.0..=config.cargo_types.1);
        let cargo_list: Vec<CargoType> = if n_cargo == 2 {
            CargoType::ALL.to_vec()
        } else if rng.gen_bool(0.5) {
            vec![CargoType::Type1]
        } else {
            vec![CargoType::Type2]
        };

        let mut requirements = Vec::new();
        let mut suitability = Vec::new();
        for cargo in cargo_list {
            let n_sub = rng.gen_range(config.subfunctions.0..=config.subfunctions.1);
            let (qlo, qhi) = match cargo {
                CargoType::Type1 => config.quantity_type1,
                CargoType::Type2 => config.quantity_type2,
            };
            for sub in 1..=n_sub as u8 {
                let quantity = rng.gen_range(qlo..=qhi);
                let mut row = vec![false; np];
                let mut draws = 0;
                while !row.iter().any(|&s| s) {
                    if draws == config.max_redraws {
                        return Err(Error::InfeasibleTask {
                            task: id,
                            reason: format!(
                                "no suitable platform for cargo {} subfunction {sub} after {draws} draws",
                                cargo.number()
                            ),
                        });
                    }
                    for s in row.iter_mut() {
                        *s = rng.gen_bool(config.suitability_probability);
                    }
                    draws += 1;
                }
                requirements.push(SubfunctionRequirement {
                    cargo_type: cargo,
                    subfunction_id: sub,
                    quantity,
                });
                suitability.push(row);
            }
        }

        let duration_type = rng.gen_range(1..=4u8);
        let bounds = config.duration_bounds[(duration_type - 1) as usize];
        let mut durations = vec![0.0; np];
        for (p, d) in durations.iter_mut().enumerate() {
            if suitability.iter().any(|row| row[p]) {
                let (lo, hi) = bounds.at(norm_cap[p]);
                let x = if hi > lo { rng.gen_range(lo..=hi) } else { lo };
                *d = round_to(x, 2).max(0.01);
            }
        }
        let positive: Vec<f64> = durations.iter().copied().filter(|d| *d > 0.0).collect();
        let nominal_duration = round_to(positive.iter().sum::<f64>() / positive.len() as f64, 2);
        let (flo, fhi) = config.frequency;
        let nominal_freq = round_to(if fhi > flo { rng.gen_range(flo..=fhi) } else { flo }, 2);

        tasks.push(Task {
            id,
            requirements,
            suitability,
            durations,
            duration_type,
            freq_dist: TriangularParams::around(nominal_freq),
            dur_dist: TriangularParams::around(nominal_duration),
        });
    }

    Ok(Dataset {
        platforms,
        tasks,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{save_dataset, validate_dataset};

    #[test]
    fn deterministic_per_seed() {
        let cfg = GeneratorConfig::default();
        let a = generate_dataset(&cfg, 7).unwrap();
        let b = generate_dataset(&cfg, 7).unwrap();
        assert_eq!(save_dataset(&a), save_dataset(&b));
        let c = generate_dataset(&cfg, 8).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn embeds_table1_verbatim_and_is_valid() {
        let d = generate_dataset(&GeneratorConfig::default(), 3).unwrap();
        assert_eq!(d.platforms, table1_platforms());
        assert_eq!(d.tasks.len(), 100);
        assert!(validate_dataset(&d).is_empty(), "{:?}", validate_dataset(&d));
    }

    #[test]
    fn minimal_instance_has_one_duration_cell() {
        let cfg = GeneratorConfig {
            tasks: 1,
            platforms: PlatformSource::Fixed(vec![Platform::new(0, 10, 100, 1.0)]),
            cargo_types: (1, 1),
            subfunctions: (1, 1),
            ..GeneratorConfig::default()
        };
        let d = generate_dataset(&cfg, 1).unwrap();
        assert_eq!(d.tasks.len(), 1);
        let positive = d.tasks[0].durations.iter().filter(|x| **x > 0.0).count();
        assert_eq!(positive, 1);
        assert!(validate_dataset(&d).is_empty());
    }

    #[test]
    fn random_platforms_are_valid() {
        let cfg = GeneratorConfig {
            tasks: 10,
            platforms: PlatformSource::Random {
                count: 6,
                capacity_type1: (5, 200),
                capacity_type2: (5_000, 120_000),
            },
            ..GeneratorConfig::default()
        };
        let d = generate_dataset(&cfg, 11).unwrap();
        assert_eq!(d.platforms.len(), 6);
        assert!(validate_dataset(&d).is_empty());
    }

    #[test]
    fn rejects_configs_without_suitable_platforms() {
        let cfg = GeneratorConfig {
            suitability_probability: 0.0,
            ..GeneratorConfig::default()
        };
        assert!(matches!(
            generate_dataset(&cfg, 1),
            Err(Error::InvalidConfig { field, .. }) if field == "suitability_probability"
        ));
        let cfg = GeneratorConfig {
            suitability_probability: 1e-9,
            max_redraws: 3,
            ..GeneratorConfig::default()
        };
        assert!(matches!(generate_dataset(&cfg, 1), Err(Error::InfeasibleTask { .. })));
    }
}
