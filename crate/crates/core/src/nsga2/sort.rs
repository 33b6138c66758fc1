use rand::Rng as _;

use super::{dominates, Objectives};
use crate::seed::Rng;

/// Fast non-dominated sort. Returns fronts of indices, best first; indices
/// within a front are ascending.
pub fn nondominated_sort(objs: &[Objectives]) -> Vec<Vec<usize>> {
    let n = objs.len();
    let mut dominated_by_me: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut dom_count = vec![0usize; n];
    for i in 0..n {
        for j in (i + 1)..n {
            if dominates(&objs[i], &objs[j]) {
                dominated_by_me[i].push(j);
                dom_count[j] += 1;
            } else if dominates(&objs[j], &objs[i]) {
                dominated_by_me[j].push(i);
                dom_count[i] += 1;
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| dom_count[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominated_by_me[i] {
                dom_count[j] -= 1;
                if dom_count[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(current);
        current = next;
    }
    fronts
}

/// Crowding distance of each member of `front` (same order). Boundary
/// members per objective get `f64::INFINITY`; interior members accumulate
/// the normalized gap between their neighbours.
pub fn crowding_distance(objs: &[Objectives], front: &[usize]) -> Vec<f64> {
    let m = front.len();
    let mut dist = vec![0.0; m];
    if m <= 2 {
        return vec![f64::INFINITY; m];
    }
    for k in 0..2 {
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| objs[front[a]].get(k).total_cmp(&objs[front[b]].get(k)));
        let lo = objs[front[order[0]]].get(k);
        let hi = objs[front[order[m - 1]]].get(k);
        dist[order[0]] = f64::INFINITY;
        dist[order[m - 1]] = f64::INFINITY;
        let span = hi - lo;
        if span <= 0.0 {
            continue;
        }
        for w in 1..m - 1 {
            let prev = objs[front[order[w - 1]]].get(k);
            let next = objs[front[order[w + 1]]].get(k);
            dist[order[w]] += (next - prev) / span;
        }
    }
    dist
}

/// Picks two distinct members uniformly and returns the better by
/// (lower rank, larger crowding distance), breaking exact ties by a coin flip.
pub fn binary_tournament(rank: &[usize], crowding: &[f64], rng: &mut Rng) -> usize {
    let n = rank.len();
    debug_assert!(n > 0);
    if n == 1 {
        return 0;
    }
    let a = rng.gen_range(0..n);
    let mut b = rng.gen_range(0..n - 1);
    if b >= a {
        b += 1;
    }
    if rank[a] != rank[b] {
        return if rank[a] < rank[b] { a } else { b };
    }
    if crowding[a] != crowding[b] {
        return if crowding[a] > crowding[b] { a } else { b };
    }
    if rng.gen_bool(0.5) {
        a
    } else {
        b
    }
}
