//! Cross-scenario robustness and adaptability of fleets.
//!
//! A fleet accomplishes scenario `k` when it contains one of the fleets
//! optimized for `k`. When it does not, the cheapest top-up to some fleet of
//! `k` (priced at acquisition cost) decides whether `k` is within reach at a
//! given budget fraction of the fleet's own cost.

mod growth;
mod histogram;
mod io;

pub use growth::{enumerate_growth_options, growth_lattice, GrowthLattice, GrowthNode};
pub use histogram::{capability_histogram, score_portfolio, CapabilityHistogram, FleetScores};
pub use io::{capability_csv, histogram_csv, lattice_text};

use crate::domain::{fleet_contains, fleet_cost, FleetVector, Platform};
use crate::error::{Error, Result};

/// Budget ladders for the two experiment settings.
pub const LOW_VARIABILITY_LADDER: [f64; 5] = [0.01, 0.02, 0.03, 0.04, 0.05];
pub const SCALED_LADDER: [f64; 5] = [0.05, 0.15, 0.25, 0.35, 0.50];
pub const GROWTH_LADDER: [f64; 4] = [0.0, 0.01, 0.02, 0.03];
pub const DEFAULT_BINS: usize = 20;

/// `cost <= budget` up to rounding in the budget product.
pub fn within_budget(cost: f64, budget: f64) -> bool {
    cost <= budget + 1e-9 * budget.abs().max(1.0)
}

/// Deduplicated fleet sets, one per scenario, stored densely for the sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct FleetPortfolio {
    dim: usize,
    scenarios: Vec<Vec<FleetVector>>,
    /// Row-major counts of every fleet; `starts[k]..starts[k + 1]` are scenario `k`'s rows.
    dense: Vec<u32>,
    starts: Vec<usize>,
}

impl FleetPortfolio {
    pub fn new(scenarios: Vec<Vec<FleetVector>>) -> Result<Self> {
        let first = scenarios
            .first()
            .and_then(|s| s.first())
            .ok_or(Error::Empty("portfolio"))?;
        let dim = first.dim();
        let mut dense = Vec::new();
        let mut starts = vec![0];
        for (k, set) in scenarios.iter().enumerate() {
            if set.is_empty() {
                return Err(Error::config(format!("portfolio scenario {k}"), "has no fleets"));
            }
            for f in set {
                if f.dim() != dim {
                    return Err(Error::DimensionMismatch { expected: dim, found: f.dim() });
                }
                dense.extend_from_slice(f.counts());
            }
            starts.push(starts[k] + set.len());
        }
        Ok(FleetPortfolio { dim, scenarios, dense, starts })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn scenario_count(&self) -> usize {
        self.scenarios.len()
    }

    pub fn fleets(&self, scenario: usize) -> &[FleetVector] {
        &self.scenarios[scenario]
    }

    pub fn total_fleets(&self) -> usize {
        *self.starts.last().unwrap_or(&0)
    }

    /// `(scenario, index, fleet)` for every fleet, scenario-major.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &FleetVector)> + '_ {
        self.scenarios
            .iter()
            .enumerate()
            .flat_map(|(k, set)| set.iter().enumerate().map(move |(j, f)| (k, j, f)))
    }

    /// Scenarios `x` accomplishes without additions.
    pub fn accomplished_count(&self, x: &FleetVector) -> usize {
        let xs = x.counts();
        (0..self.scenarios.len())
            .filter(|&k| {
                self.dense[self.starts[k] * self.dim..self.starts[k + 1] * self.dim]
                    .chunks_exact(self.dim)
                    .any(|row| row.iter().zip(xs).all(|(a, b)| a <= b))
            })
            .count()
    }

    /// Cheapest top-up cost from `x` to some fleet of each scenario.
    pub fn augmentation_costs(&self, x: &FleetVector, costs: &[f64]) -> Vec<f64> {
        let xs = x.counts();
        (0..self.scenarios.len())
            .map(|k| {
                let mut best = f64::INFINITY;
                for row in self.dense[self.starts[k] * self.dim..self.starts[k + 1] * self.dim].chunks_exact(self.dim) {
                    let mut c = 0.0;
                    for v in 0..self.dim {
                        if row[v] > xs[v] {
                            c += (row[v] - xs[v]) as f64 * costs[v];
                        }
                    }
                    if c < best {
                        best = c;
                        if c == 0.0 {
                            break;
                        }
                    }
                }
                best
            })
            .collect()
    }
}

/// `true` iff `x` contains some member of `scenario_fleets`.
pub fn can_accomplish(x: &FleetVector, scenario_fleets: &[FleetVector]) -> Result<bool> {
    if scenario_fleets.is_empty() {
        return Err(Error::Empty("scenario fleet set"));
    }
    for f in scenario_fleets {
        if fleet_contains(x, f)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Cheapest additions that make `x` contain some member of `scenario_fleets`.
/// Equal-cost ties go to the lexicographically smallest addition vector.
pub fn augmentation_cost(
    x: &FleetVector,
    scenario_fleets: &[FleetVector],
    platforms: &[Platform],
) -> Result<(f64, FleetVector)> {
    let mut best: Option<(f64, FleetVector)> = None;
    for f in scenario_fleets {
        let add = x.deficit_to(f)?;
        let c = fleet_cost(&add, platforms)?;
        let better = match &best {
            None => true,
            Some((bc, ba)) => c < *bc || (c == *bc && add < *ba),
        };
        if better {
            best = Some((c, add));
        }
    }
    best.ok_or(Error::Empty("scenario fleet set"))
}

/// Fraction of scenarios reachable within `budget_fraction * fleet_cost(x)`.
pub fn capability_score(
    x: &FleetVector,
    portfolio: &FleetPortfolio,
    budget_fraction: f64,
    platforms: &[Platform],
) -> Result<f64> {
    let budget = budget_fraction * fleet_cost(x, platforms)?;
    let costs: Vec<f64> = platforms.iter().map(|p| p.cost).collect();
    let aug = portfolio.augmentation_costs(x, &costs);
    let hit = aug.iter().filter(|&&c| within_budget(c, budget)).count();
    Ok(hit as f64 / portfolio.scenario_count() as f64)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Classification {
    Robust,
    /// Reachable at this ladder fraction (the smallest that suffices).
    Adaptable(f64),
    Risk,
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Classification::Robust => write!(f, "robust"),
            Classification::Adaptable(x) => write!(f, "adaptable@{}", crate::textfmt::fmt_num(*x)),
            Classification::Risk => write!(f, "risk"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CapabilityReport {
    pub fleet: FleetVector,
    pub fleet_cost: f64,
    /// Per scenario.
    pub augmentation: Vec<f64>,
    pub classes: Vec<Classification>,
    /// `(fraction, score)` per ladder rung.
    pub scores: Vec<(f64, f64)>,
}

impl CapabilityReport {
    pub fn count(&self, pred: impl Fn(&Classification) -> bool) -> usize {
        self.classes.iter().filter(|c| pred(c)).count()
    }
}

pub(crate) fn check_ladder(ladder: &[f64]) -> Result<()> {
    if ladder.iter().any(|f| !(*f >= 0.0 && f.is_finite())) {
        return Err(Error::config("ladder", "fractions must be finite and non-negative"));
    }
    if ladder.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::config("ladder", "must be sorted ascending"));
    }
    Ok(())
}

/// Verdict per scenario from its augmentation cost; `ladder` ascending.
pub fn classify(aug: &[f64], cost: f64, ladder: &[f64]) -> Vec<Classification> {
    aug.iter()
        .map(|&c| {
            if c == 0.0 {
                Classification::Robust
            } else {
                ladder
                    .iter()
                    .find(|&&f| within_budget(c, f * cost))
                    .map_or(Classification::Risk, |&f| Classification::Adaptable(f))
            }
        })
        .collect()
}

/// Scenario-by-scenario robust / adaptable / risk verdicts for `x`.
pub fn classify_scenarios(
    x: &FleetVector,
    portfolio: &FleetPortfolio,
    ladder: &[f64],
    platforms: &[Platform],
) -> Result<CapabilityReport> {
    check_ladder(ladder)?;
    let cost = fleet_cost(x, platforms)?;
    let costs: Vec<f64> = platforms.iter().map(|p| p.cost).collect();
    let augmentation = portfolio.augmentation_costs(x, &costs);
    let classes = classify(&augmentation, cost, ladder);
    let y = portfolio.scenario_count() as f64;
    let scores = ladder
        .iter()
        .map(|&f| {
            let reached = classes
                .iter()
                .filter(|c| match c {
                    Classification::Robust => true,
                    Classification::Adaptable(g) => *g <= f,
                    Classification::Risk => false,
                })
                .count();
            (f, reached as f64 / y)
        })
        .collect();
    Ok(CapabilityReport { fleet: x.clone(), fleet_cost: cost, augmentation, classes, scores })
}
