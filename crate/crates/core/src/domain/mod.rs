//! Platforms, tasks and datasets, plus fleet arithmetic.

mod fleet;
mod generate;
mod io;

pub use fleet::{fleet_contains, fleet_cost, FleetVector};
pub use generate::{generate_dataset, DurationBounds, GeneratorConfig, PlatformSource};
pub use io::{load_dataset, save_dataset, validate_dataset, Violation, DATASET_SCHEMA_VERSION};

use rand::Rng as _;

use crate::seed::Rng;

/// One of the two independent cargo dimensions a platform carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CargoType {
    Type1,
    Type2,
}

impl CargoType {
    pub const ALL: [CargoType; 2] = [CargoType::Type1, CargoType::Type2];

    pub fn number(self) -> u8 {
        match self {
            CargoType::Type1 => 1,
            CargoType::Type2 => 2,
        }
    }

    pub fn from_number(n: u8) -> Option<Self> {
        match n {
            1 => Some(CargoType::Type1),
            2 => Some(CargoType::Type2),
            _ => None,
        }
    }
}

/// A vehicle type. `cost` is used both as the per-day use cost in the
/// monetary objective and as the per-unit acquisition cost when fleets are
/// augmented.
#[derive(Clone, Debug, PartialEq)]
pub struct Platform {
    pub id: usize,
    pub capacity_type1: u64,
    pub capacity_type2: u64,
    pub cost: f64,
}

impl Platform {
    pub fn new(id: usize, capacity_type1: u64, capacity_type2: u64, cost: f64) -> Self {
        Platform {
            id,
            capacity_type1,
            capacity_type2,
            cost,
        }
    }

    pub fn capacity(&self, cargo: CargoType) -> u64 {
        match cargo {
            CargoType::Type1 => self.capacity_type1,
            CargoType::Type2 => self.capacity_type2,
        }
    }
}

/// The ten example platforms with their capacities and costs.
pub fn table1_platforms() -> Vec<Platform> {
    const ROWS: [(u64, u64, f64); 10] = [
        (22, 5_072, 0.9199),
        (8, 29_505, 1.9282),
        (9, 95_467, 5.6292),
        (23, 111_716, 20.2813),
        (58, 25_812, 2.8454),
        (47, 106_710, 5.4026),
        (100, 23_827, 4.7058),
        (132, 83_918, 7.7959),
        (200, 21_165, 3.4486),
        (180, 73_303, 4.7107),
    ];
    ROWS.iter()
        .enumerate()
        .map(|(id, &(c1, c2, cost))| Platform::new(id, c1, c2, cost))
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct SubfunctionRequirement {
    pub cargo_type: CargoType,
    /// 1..=3 within its cargo type.
    pub subfunction_id: u8,
    pub quantity: u64,
}

/// Triangular distribution parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TriangularParams {
    pub min: f64,
    pub mode: f64,
    pub max: f64,
}

impl TriangularParams {
    pub fn new(min: f64, mode: f64, max: f64) -> Self {
        TriangularParams { min, mode, max }
    }

    /// `min = 0.5 * mode`, `max = 1.5 * mode`.
    pub fn around(mode: f64) -> Self {
        TriangularParams::new(0.5 * mode, mode, 1.5 * mode)
    }

    pub fn degenerate(value: f64) -> Self {
        TriangularParams::new(value, value, value)
    }

    pub fn is_valid(&self) -> bool {
        self.min.is_finite()
            && self.max.is_finite()
            && self.min <= self.mode
            && self.mode <= self.max
    }

    pub fn mean(&self) -> f64 {
        (self.min + self.mode + self.max) / 3.0
    }

    pub fn scaled(&self, r: f64) -> Self {
        TriangularParams::new(self.min * r, self.mode * r, self.max * r)
    }

    /// Inverse-CDF transform of a uniform draw `u` in `[0, 1)`.
    pub fn quantile(&self, u: f64) -> f64 {
        let span = self.max - self.min;
        if span <= 0.0 {
            return self.mode;
        }
        let split = (self.mode - self.min) / span;
        let x = if u < split {
            self.min + (u * span * (self.mode - self.min)).sqrt()
        } else {
            self.max - ((1.0 - u) * span * (self.max - self.mode)).sqrt()
        };
        x.clamp(self.min, self.max)
    }

    pub fn sample(&self, rng: &mut Rng) -> f64 {
        self.quantile(rng.gen::<f64>())
    }
}

/// A mission template.
#[derive(Clone, Debug, PartialEq)]
pub struct Task {
    pub id: usize,
    pub requirements: Vec<SubfunctionRequirement>,
    /// `suitability[r][p]`: platform `p` can serve requirement `r`.
    pub suitability: Vec<Vec<bool>>,
    /// Baseline days for one platform of each type to do its part; 0 when unsuitable.
    pub durations: Vec<f64>,
    /// 1..=4.
    pub duration_type: u8,
    pub freq_dist: TriangularParams,
    pub dur_dist: TriangularParams,
}

impl Task {
    pub fn is_suitable_for_any(&self, platform: usize) -> bool {
        self.suitability
            .iter()
            .any(|row| row.get(platform).copied().unwrap_or(false))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub platforms: Vec<Platform>,
    pub tasks: Vec<Task>,
    pub seed: u64,
}

impl Dataset {
    pub fn platform_count(&self) -> usize {
        self.platforms.len()
    }

    pub fn costs(&self) -> Vec<f64> {
        self.platforms.iter().map(|p| p.cost).collect()
    }

    /// Content hash of the canonical serialization.
    pub fn hash(&self) -> String {
        crate::seed::sha256_hex(save_dataset(self).as_bytes())
    }
}

/// A task with exactly the mission requirements and durations of the
/// worked example mission (single duration-type, nominal distributions).
pub fn table2_task(id: usize) -> Task {
    use CargoType::*;
    let rows: [(CargoType, u8, u64, [f64; 10]); 6] = [
        (Type1, 1, 401, [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 9.45, 0.0]),
        (Type1, 2, 470, [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 9.45, 0.0]),
        (Type1, 3, 170, [0.0, 9.88, 0.0, 0.0, 12.53, 0.0, 0.0, 0.0, 9.45, 0.0]),
        (Type2, 1, 20_038, [13.96, 9.88, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 9.45, 0.0]),
        (Type2, 2, 20_152, [13.96, 9.88, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 9.45, 0.0]),
        (Type2, 3, 518_347, [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 9.45, 0.0]),
    ];
    let mut durations = vec![0.0; 10];
    let mut requirements = Vec::new();
    let mut suitability = Vec::new();
    for (cargo, sub, qty, row) in rows {
        requirements.push(SubfunctionRequirement {
            cargo_type: cargo,
            subfunction_id: sub,
            quantity: qty,
        });
        suitability.push(row.iter().map(|d| *d > 0.0).collect());
        for (p, d) in row.iter().enumerate() {
            if *d > 0.0 {
                durations[p] = *d;
            }
        }
    }
    Task {
        id,
        requirements,
        suitability,
        durations,
        duration_type: 2,
        freq_dist: TriangularParams::around(1.0),
        dur_dist: TriangularParams::around(10.0),
    }
}
