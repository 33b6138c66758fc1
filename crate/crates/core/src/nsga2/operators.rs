use rand::Rng as _;

use super::Genome;
use crate::ptma::OptionCatalog;
use crate::seed::Rng;

/// Uniform row-wise crossover: each task's option comes from either parent
/// with probability one half.
pub fn crossover(p1: &[usize], p2: &[usize], rng: &mut Rng) -> Genome {
    p1.iter()
        .zip(p2)
        .map(|(&a, &b)| if rng.gen_bool(0.5) { a } else { b })
        .collect()
}

/// With probability `rate` per task, replaces the option by a uniformly
/// chosen different one. Tasks with a single option are left alone.
pub fn mutate(child: &mut Genome, catalog: &OptionCatalog, rate: f64, rng: &mut Rng) {
    for (task, gene) in child.iter_mut().enumerate() {
        let n = catalog.options(task).len();
        if n < 2 || !rng.gen_bool(rate) {
            continue;
        }
        let mut k = rng.gen_range(0..n - 1);
        if k >= *gene {
            k += 1;
        }
        *gene = k;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ptma::AssignmentOption;
    use crate::seed::rng_from_seed;

    fn catalog(sizes: &[usize]) -> OptionCatalog {
        OptionCatalog::new(
            sizes
                .iter()
                .enumerate()
                .map(|(t, &n)| {
                    (0..n as u32)
                        .map(|c| AssignmentOption { task_id: t, counts: vec![c] })
                        .collect()
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn identical_parents_give_identical_child() {
        let mut rng = rng_from_seed(1);
        let p = vec![2, 0, 1, 3];
        assert_eq!(crossover(&p, &p, &mut rng), p);
    }

    #[test]
    fn crossover_takes_rows_from_parents() {
        let mut rng = rng_from_seed(2);
        let a = vec![0; 64];
        let b = vec![1; 64];
        let c = crossover(&a, &b, &mut rng);
        let ones = c.iter().filter(|&&x| x == 1).count();
        assert!(ones > 10 && ones < 54);
    }

    #[test]
    fn zero_rate_is_identity() {
        let cat = catalog(&[3, 3, 3]);
        let mut rng = rng_from_seed(3);
        let mut g = vec![0, 1, 2];
        mutate(&mut g, &cat, 0.0, &mut rng);
        assert_eq!(g, vec![0, 1, 2]);
    }

    #[test]
    fn full_rate_on_two_options_always_flips() {
        let cat = catalog(&[2, 1]);
        let mut rng = rng_from_seed(4);
        for start in [0usize, 1] {
            for _ in 0..20 {
                let mut g = vec![start, 0];
                mutate(&mut g, &cat, 1.0, &mut rng);
                assert_eq!(g, vec![1 - start, 0]);
            }
        }
    }

    #[test]
    fn mutation_always_picks_a_different_valid_option() {
        let cat = catalog(&[5]);
        let mut rng = rng_from_seed(5);
        let mut seen = [0usize; 5];
        for _ in 0..400 {
            let mut g = vec![2];
            mutate(&mut g, &cat, 1.0, &mut rng);
            assert_ne!(g[0], 2);
            seen[g[0]] += 1;
        }
        assert!(seen.iter().enumerate().all(|(k, &n)| (k == 2) == (n == 0)));
    }
}
