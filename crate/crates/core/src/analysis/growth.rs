use std::collections::HashMap;

use super::{check_ladder, within_budget, FleetPortfolio};
use crate::domain::{fleet_cost, FleetVector, Platform};
use crate::error::Result;

/// Every non-empty addition vector whose acquisition cost fits `budget`,
/// ordered by (cost, counts).
fn additions_within(budget: f64, platforms: &[Platform]) -> Vec<(f64, FleetVector)> {
    fn walk(
        v: usize,
        spent: f64,
        budget: f64,
        platforms: &[Platform],
        counts: &mut Vec<u32>,
        out: &mut Vec<(f64, FleetVector)>,
    ) {
        if v == platforms.len() {
            if counts.iter().any(|&c| c > 0) {
                out.push((spent, FleetVector(counts.clone())));
            }
            return;
        }
        let mut n = 0u32;
        let mut cost = spent;
        loop {
            counts[v] = n;
            walk(v + 1, cost, budget, platforms, counts, out);
            n += 1;
            cost = spent + n as f64 * platforms[v].cost;
            if !within_budget(cost, budget) {
                break;
            }
        }
        counts[v] = 0;
    }
    let mut out = Vec::new();
    if budget > 0.0 {
        let mut counts = vec![0; platforms.len()];
        walk(0, 0.0, budget, platforms, &mut counts, &mut out);
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    out
}

/// Ways to grow `x` within `budget_fraction` of its cost.
pub fn enumerate_growth_options(
    x: &FleetVector,
    budget_fraction: f64,
    platforms: &[Platform],
) -> Result<Vec<FleetVector>> {
    let budget = budget_fraction * fleet_cost(x, platforms)?;
    Ok(additions_within(budget, platforms).into_iter().map(|(_, f)| f).collect())
}

/// One grown fleet: the root plus `cumulative`.
#[derive(Clone, Debug, PartialEq)]
pub struct GrowthNode {
    pub level: usize,
    /// Total added to the root.
    pub cumulative: FleetVector,
    pub cumulative_cost: f64,
    /// Step from the first parent that reached this node (zero at the root).
    pub additions: FleetVector,
    pub incremental_cost: f64,
    /// Growth options from this node within the next level's budget,
    /// whether or not they add capability.
    pub option_count: usize,
    /// Capability score (fraction 0) of the grown fleet.
    pub score: f64,
    /// `(level, index)` of every node with a capability-raising step here.
    pub parents: Vec<(usize, usize)>,
    /// `(level, index)` of every node this one reaches.
    pub children: Vec<(usize, usize)>,
}

/// Growth options by cost level. Level `l` holds the distinct grown fleets,
/// not already on a lower level, whose total addition costs at most
/// `fractions[l]` of the root's cost and that some lower-level node reaches by
/// a strictly capability-raising step.
#[derive(Clone, Debug, PartialEq)]
pub struct GrowthLattice {
    pub root: FleetVector,
    pub root_cost: f64,
    pub fractions: Vec<f64>,
    pub levels: Vec<Vec<GrowthNode>>,
}

impl GrowthLattice {
    pub fn root_node(&self) -> &GrowthNode {
        &self.levels[0][0]
    }

    pub fn nodes_per_level(&self) -> Vec<usize> {
        self.levels.iter().map(Vec::len).collect()
    }

    /// Summed `option_count` per level.
    pub fn options_per_level(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.iter().map(|n| n.option_count).sum()).collect()
    }

    pub fn nodes(&self) -> impl Iterator<Item = &GrowthNode> + '_ {
        self.levels.iter().flatten()
    }
}

/// Builds the lattice over `ladder`; a zero first rung is implied.
pub fn growth_lattice(
    x: &FleetVector,
    ladder: &[f64],
    portfolio: &FleetPortfolio,
    platforms: &[Platform],
) -> Result<GrowthLattice> {
    check_ladder(ladder)?;
    let mut fractions: Vec<f64> = ladder.to_vec();
    if fractions.first() != Some(&0.0) {
        fractions.insert(0, 0.0);
    }
    let root_cost = fleet_cost(x, platforms)?;
    let budgets: Vec<f64> = fractions.iter().map(|f| f * root_cost).collect();
    let y = portfolio.scenario_count() as f64;
    let mut memo: HashMap<Vec<u32>, f64> = HashMap::new();
    let mut score = |cum: &FleetVector| -> Result<f64> {
        if let Some(&s) = memo.get(cum.counts()) {
            return Ok(s);
        }
        let s = portfolio.accomplished_count(&x.checked_add(cum)?) as f64 / y;
        memo.insert(cum.0.clone(), s);
        Ok(s)
    };
    // sorted by cost, so each node's options are a prefix
    let all = additions_within(*budgets.last().expect("non-empty"), platforms);

    let zero = FleetVector::zeros(x.dim());
    let mut levels = vec![vec![GrowthNode {
        level: 0,
        cumulative: zero.clone(),
        cumulative_cost: 0.0,
        additions: zero,
        incremental_cost: 0.0,
        option_count: 0,
        score: 0.0,
        parents: Vec::new(),
        children: Vec::new(),
    }]];
    levels[0][0].score = score(&levels[0][0].cumulative)?;

    let mut seen: HashMap<Vec<u32>, (usize, usize)> = HashMap::new();
    seen.insert(levels[0][0].cumulative.0.clone(), (0, 0));
    for l in 0..fractions.len() - 1 {
        let budget = budgets[l + 1];
        let mut next: Vec<GrowthNode> = Vec::new();
        for src_level in 0..=l {
            for i in 0..levels[src_level].len() {
                let (spent, base, parent_score) = {
                    let n = &levels[src_level][i];
                    (n.cumulative_cost, n.cumulative.clone(), n.score)
                };
                let mut count = 0;
                let mut children = Vec::new();
                for (c, add) in all.iter().take_while(|(c, _)| within_budget(spent + c, budget)) {
                    count += 1;
                    let cum = base.checked_add(add)?;
                    let s = score(&cum)?;
                    if s <= parent_score {
                        continue;
                    }
                    let j = match seen.get(cum.counts()) {
                        Some(&(lv, j)) if lv == l + 1 => j,
                        Some(_) => continue,
                        None => {
                            seen.insert(cum.0.clone(), (l + 1, next.len()));
                            next.push(GrowthNode {
                                level: l + 1,
                                cumulative: cum,
                                cumulative_cost: spent + c,
                                additions: add.clone(),
                                incremental_cost: *c,
                                option_count: 0,
                                score: s,
                                parents: Vec::new(),
                                children: Vec::new(),
                            });
                            next.len() - 1
                        }
                    };
                    next[j].parents.push((src_level, i));
                    children.push((l + 1, j));
                }
                let node = &mut levels[src_level][i];
                if src_level == l {
                    node.option_count = count;
                }
                node.children.extend(children);
            }
        }
        levels.push(next);
    }
    Ok(GrowthLattice { root: x.clone(), root_cost, fractions, levels })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::table1_platforms;

    /// A fleet of cost exactly 200 under the table costs: 100 P2-equivalents is
    /// not integral, so scale the fleet cost instead by using one custom platform.
    fn cost_200_fleet() -> (FleetVector, Vec<Platform>) {
        let mut p = table1_platforms();
        p.push(Platform::new(10, 1, 1, 200.0));
        let mut x = FleetVector::zeros(11);
        x.0[10] = 1;
        (x, p)
    }

    #[test]
    fn one_percent_of_200() {
        let (x, p) = cost_200_fleet();
        let opts = enumerate_growth_options(&x, 0.01, &p).unwrap();
        let expected = vec![
            FleetVector::sparse(11, &[(0, 1)]),
            FleetVector::sparse(11, &[(0, 2)]),
            FleetVector::sparse(11, &[(1, 1)]),
        ];
        assert_eq!(opts, expected);
    }

    #[test]
    fn zero_fraction_is_empty() {
        let (x, p) = cost_200_fleet();
        assert!(enumerate_growth_options(&x, 0.0, &p).unwrap().is_empty());
    }

    #[test]
    fn brute_force_bounded_additions() {
        let p = table1_platforms();
        let x = FleetVector::sparse(10, &[(3, 1)]);
        // cheapest platform is P1 (0.9199): budget just above covers only it
        let frac = 1.0 / fleet_cost(&x, &p).unwrap();
        let opts = enumerate_growth_options(&x, frac, &p).unwrap();
        assert_eq!(opts, vec![FleetVector::sparse(10, &[(0, 1)])]);
        // brute force over counts <= 3 for a larger budget
        let budget = 4.0;
        let got = additions_within(budget, &p);
        let mut brute = Vec::new();
        let mut counts = [0u32; 10];
        loop {
            let f = FleetVector(counts.to_vec());
            let c = fleet_cost(&f, &p).unwrap();
            if !f.is_zero() && c <= budget {
                brute.push(f);
            }
            let mut v = 0;
            loop {
                if v == 10 {
                    let mut got_f: Vec<FleetVector> = got.iter().map(|(_, f)| f.clone()).collect();
                    got_f.sort();
                    brute.sort();
                    assert_eq!(got_f, brute);
                    return;
                }
                counts[v] += 1;
                if counts[v] <= 4 {
                    break;
                }
                counts[v] = 0;
                v += 1;
            }
        }
    }

    fn ladder_portfolio() -> FleetPortfolio {
        FleetPortfolio::new(vec![
            vec![FleetVector::sparse(10, &[(8, 30)])],
            vec![FleetVector::sparse(10, &[(8, 30), (0, 1)])],
            vec![FleetVector::sparse(10, &[(8, 30), (0, 2)])],
            vec![FleetVector::sparse(10, &[(8, 30), (1, 1)])],
        ])
        .unwrap()
    }

    #[test]
    fn lattice_levels() {
        let p = table1_platforms();
        let x = FleetVector::sparse(10, &[(8, 30)]);
        let portfolio = ladder_portfolio();
        let only_root = growth_lattice(&x, &[0.0], &portfolio, &p).unwrap();
        assert_eq!(only_root.nodes_per_level(), vec![1]);
        assert!(only_root.root_node().children.is_empty());
        assert_eq!(only_root.root_node().score, 0.25);

        // root cost 103.458: 1% fits one P1, 2% fits two P1 or one P2
        let l = growth_lattice(&x, &[0.0, 0.01, 0.02], &portfolio, &p).unwrap();
        assert_eq!(l.root_node().option_count, 1);
        assert_eq!(l.levels[1].len(), 1);
        assert_eq!(l.levels[1][0].cumulative, FleetVector::sparse(10, &[(0, 1)]));
        let mut level2: Vec<FleetVector> = l.levels[2].iter().map(|n| n.cumulative.clone()).collect();
        level2.sort();
        assert_eq!(level2, vec![FleetVector::sparse(10, &[(1, 1)]), FleetVector::sparse(10, &[(0, 2)])]);
        for n in l.nodes() {
            for &(lv, j) in &n.children {
                assert!(l.levels[lv][j].score > n.score);
                assert!(lv > n.level);
            }
            assert!(within_budget(n.cumulative_cost, l.fractions[n.level] * l.root_cost));
            assert_eq!(n.level == 0, n.additions.is_zero());
        }
    }

    #[test]
    fn nodes_are_distinct_and_brute_force_complete() {
        let p = table1_platforms();
        let x = FleetVector::sparse(10, &[(8, 30)]);
        let portfolio = ladder_portfolio();
        let l = growth_lattice(&x, &[0.0, 0.01, 0.02, 0.03], &portfolio, &p).unwrap();
        let mut all: Vec<&FleetVector> = l.nodes().map(|n| &n.cumulative).collect();
        let total = all.len();
        all.sort();
        all.dedup();
        assert_eq!(all.len(), total);
        // every addition within 3% that beats the root score is somewhere
        for add in enumerate_growth_options(&x, 0.03, &p).unwrap() {
            let s = portfolio.accomplished_count(&x.checked_add(&add).unwrap()) as f64 / 4.0;
            if s > l.root_node().score {
                assert!(all.contains(&&add), "{add} missing");
            }
        }
    }

    #[test]
    fn saturated_fleet_has_no_children() {
        let p = table1_platforms();
        let x = FleetVector::sparse(10, &[(0, 1), (8, 30)]);
        let portfolio = FleetPortfolio::new(vec![vec![FleetVector::sparse(10, &[(0, 1)])]]).unwrap();
        let l = growth_lattice(&x, &[0.0, 0.01, 0.02, 0.03], &portfolio, &p).unwrap();
        assert_eq!(l.root_node().score, 1.0);
        assert_eq!(l.nodes_per_level(), vec![1, 0, 0, 0]);
        assert!(l.root_node().option_count > 0);
    }
}
