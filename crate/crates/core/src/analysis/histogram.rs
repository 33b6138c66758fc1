use super::{check_ladder, within_budget, FleetPortfolio};
use crate::domain::{fleet_cost, Platform};
use crate::error::{Error, Result};
use crate::exec::Exec;

/// Scores of one portfolio fleet at every requested fraction.
#[derive(Clone, Debug, PartialEq)]
pub struct FleetScores {
    pub scenario: usize,
    pub index: usize,
    pub cost: f64,
    /// Cheapest top-up per scenario.
    pub augmentation: Vec<f64>,
    /// Number of scenarios reachable at each fraction.
    pub reached: Vec<usize>,
}

impl FleetScores {
    pub fn score(&self, rung: usize) -> f64 {
        self.reached[rung] as f64 / self.augmentation.len() as f64
    }
}

/// The all-fleets sweep: every fleet against every scenario.
pub fn score_portfolio(
    portfolio: &FleetPortfolio,
    fractions: &[f64],
    platforms: &[Platform],
    exec: Exec,
) -> Result<Vec<FleetScores>> {
    check_ladder(fractions)?;
    if platforms.len() != portfolio.dim() {
        return Err(Error::DimensionMismatch { expected: portfolio.dim(), found: platforms.len() });
    }
    let costs: Vec<f64> = platforms.iter().map(|p| p.cost).collect();
    let fleets: Vec<(usize, usize, &crate::domain::FleetVector)> = portfolio.iter().collect();
    exec.map(&fleets, |&(k, j, f)| {
        let cost = fleet_cost(f, platforms)?;
        let augmentation = portfolio.augmentation_costs(f, &costs);
        let reached = fractions
            .iter()
            .map(|&frac| augmentation.iter().filter(|&&c| within_budget(c, frac * cost)).count())
            .collect();
        Ok(FleetScores { scenario: k, index: j, cost, augmentation, reached })
    })
    .into_iter()
    .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct CapabilityHistogram {
    pub fractions: Vec<f64>,
    pub bins: usize,
    /// `counts[rung][bin]`.
    pub counts: Vec<Vec<usize>>,
    /// Mean score per rung.
    pub mean_scores: Vec<f64>,
}

impl CapabilityHistogram {
    pub fn bin_edges(&self, bin: usize) -> (f64, f64) {
        (bin as f64 / self.bins as f64, (bin + 1) as f64 / self.bins as f64)
    }

    /// Fleets whose score is at least `threshold` (counted by whole bins).
    pub fn at_least(&self, rung: usize, threshold: f64) -> usize {
        (0..self.bins)
            .filter(|&b| self.bin_edges(b).0 >= threshold - 1e-12)
            .map(|b| self.counts[rung][b])
            .sum()
    }
}

/// Bins each portfolio fleet's score over `[0, 1]` at every fraction; a
/// score of exactly 1 goes in the last bin.
pub fn capability_histogram(
    scores: &[FleetScores],
    fractions: &[f64],
    bins: usize,
) -> Result<CapabilityHistogram> {
    if bins == 0 {
        return Err(Error::config("bins", "must be positive"));
    }
    let mut counts = vec![vec![0usize; bins]; fractions.len()];
    let mut sums = vec![0.0; fractions.len()];
    for s in scores {
        let y = s.augmentation.len();
        for (rung, &hit) in s.reached.iter().enumerate() {
            let bin = (hit * bins / y).min(bins - 1);
            counts[rung][bin] += 1;
            sums[rung] += s.score(rung);
        }
    }
    let n = scores.len().max(1) as f64;
    Ok(CapabilityHistogram {
        fractions: fractions.to_vec(),
        bins,
        counts,
        mean_scores: sums.into_iter().map(|x| x / n).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{table1_platforms, FleetVector};

    #[test]
    fn single_fleet_single_scenario() {
        let p = table1_platforms();
        let port = FleetPortfolio::new(vec![vec![FleetVector::sparse(10, &[(0, 1)])]]).unwrap();
        let s = score_portfolio(&port, &[0.0], &p, Exec::Sequential).unwrap();
        let h = capability_histogram(&s, &[0.0], 20).unwrap();
        assert_eq!(h.counts[0][19], 1);
        assert_eq!(h.counts[0].iter().sum::<usize>(), 1);
        assert_eq!(h.bin_edges(19), (0.95, 1.0));
        assert_eq!(h.mean_scores, vec![1.0]);
    }

    #[test]
    fn bin_assignment_uses_exact_fractions() {
        // 9 of 10 scenarios reached -> bin 18 of 20 ([0.90, 0.95))
        let s = FleetScores { scenario: 0, index: 0, cost: 1.0, augmentation: vec![0.0; 10], reached: vec![9] };
        let h = capability_histogram(&[s], &[0.0], 20).unwrap();
        assert_eq!(h.counts[0][18], 1);
        assert_eq!(h.at_least(0, 0.9), 1);
        assert!(capability_histogram(&[], &[0.0], 0).is_err());
    }

    #[test]
    fn sequential_and_parallel_sweeps_agree() {
        let p = table1_platforms();
        let sets: Vec<Vec<FleetVector>> = (0..6u32)
            .map(|k| (0..5u32).map(|j| FleetVector::sparse(10, &[((k + j) as usize % 10, 1 + j % 3), (k as usize, 1)])).collect())
            .collect();
        let port = FleetPortfolio::new(sets).unwrap();
        let fr = [0.0, 0.1, 0.5];
        assert_eq!(
            score_portfolio(&port, &fr, &p, Exec::Sequential).unwrap(),
            score_portfolio(&port, &fr, &p, Exec::Parallel).unwrap()
        );
    }
}
