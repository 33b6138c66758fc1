use std::fmt;

use super::Platform;
use crate::error::{Error, Result};

/// Number of platforms of each type. Ordering is lexicographic on counts.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct FleetVector(pub Vec<u32>);

impl FleetVector {
    pub fn zeros(dim: usize) -> Self {
        FleetVector(vec![0; dim])
    }

    pub fn from_counts(counts: impl Into<Vec<u32>>) -> Self {
        FleetVector(counts.into())
    }

    /// Builds a fleet from sparse `(platform, count)` pairs.
    pub fn sparse(dim: usize, entries: &[(usize, u32)]) -> Self {
        let mut v = vec![0; dim];
        for &(p, c) in entries {
            v[p] += c;
        }
        FleetVector(v)
    }

    pub fn counts(&self) -> &[u32] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn total(&self) -> u64 {
        self.0.iter().map(|&c| c as u64).sum()
    }

    pub fn checked_add(&self, other: &FleetVector) -> Result<FleetVector> {
        check_dim(self.dim(), other.dim())?;
        Ok(FleetVector(
            self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect(),
        ))
    }

    /// Componentwise `max(0, target - self)`.
    pub fn deficit_to(&self, target: &FleetVector) -> Result<FleetVector> {
        check_dim(self.dim(), target.dim())?;
        Ok(FleetVector(
            self.0
                .iter()
                .zip(&target.0)
                .map(|(have, need)| need.saturating_sub(*have))
                .collect(),
        ))
    }
}

impl fmt::Display for FleetVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// Acquisition cost `sum_v counts[v] * c(v)`.
pub fn fleet_cost(fleet: &FleetVector, platforms: &[Platform]) -> Result<f64> {
    check_dim(platforms.len(), fleet.dim())?;
    Ok(fleet
        .0
        .iter()
        .zip(platforms)
        .map(|(&n, p)| n as f64 * p.cost)
        .sum())
}

/// `true` iff `a` has at least as many of every platform as `b`.
pub fn fleet_contains(a: &FleetVector, b: &FleetVector) -> Result<bool> {
    check_dim(a.dim(), b.dim())?;
    Ok(a.0.iter().zip(&b.0).all(|(x, y)| x >= y))
}
