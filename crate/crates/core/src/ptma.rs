//! Platform-to-mission assignment: exhaustive enumeration of the minimal
//! platform combinations that can carry each task.

use crate::domain::{CargoType, Dataset, FleetVector, Platform, Task};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::textfmt::{check_header, fmt_list, parse_records, Line};

/// One row of an assignment matrix: how many of each platform a task uses.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AssignmentOption {
    pub task_id: usize,
    pub counts: Vec<u32>,
}

impl AssignmentOption {
    pub fn as_fleet(&self) -> FleetVector {
        FleetVector(self.counts.clone())
    }
}

/// Demands of one cargo type: `(quantity, suitable-platform mask)` for each
/// requirement with positive quantity.
fn demands(task: &Task, cargo: CargoType) -> Vec<(u64, &[bool])> {
    task.requirements
        .iter()
        .zip(&task.suitability)
        .filter(|(r, _)| r.cargo_type == cargo && r.quantity > 0)
        .map(|(r, row)| (r.quantity, row.as_slice()))
        .collect()
}

/// Supply/demand feasibility for one cargo type. Each platform unit offers its
/// capacity to any subfunction it is suitable for, so by the supply-demand
/// theorem a covering allocation exists iff every subset of subfunctions is
/// no larger than the total capacity of the platforms adjacent to it.
fn cargo_feasible(demands: &[(u64, &[bool])], counts: &[u32], platforms: &[Platform], cargo: CargoType) -> bool {
    let k = demands.len();
    debug_assert!(k < 16);
    let supply: Vec<u128> = platforms
        .iter()
        .enumerate()
        .map(|(p, pl)| counts.get(p).copied().unwrap_or(0) as u128 * pl.capacity(cargo) as u128)
        .collect();
    for subset in 1u32..(1 << k) {
        let mut need = 0u128;
        let mut have = 0u128;
        for (j, (q, _)) in demands.iter().enumerate() {
            if subset & (1 << j) != 0 {
                need += *q as u128;
            }
        }
        for (p, s) in supply.iter().enumerate() {
            let adjacent = demands
                .iter()
                .enumerate()
                .any(|(j, (_, row))| subset & (1 << j) != 0 && row.get(p).copied().unwrap_or(false));
            if adjacent {
                have += s;
            }
        }
        if need > have {
            return false;
        }
    }
    true
}

/// `true` iff the platforms in `counts` can cover every requirement of `task`.
/// The two cargo types are independent: a platform carries both at once.
pub fn is_valid_assignment(task: &Task, counts: &[u32], platforms: &[Platform]) -> bool {
    CargoType::ALL
        .iter()
        .all(|&c| cargo_feasible(&demands(task, c), counts, platforms, c))
}

/// Largest count of each platform that can appear in a minimal assignment:
/// `max over cargo types of ceil(suitable demand / capacity)`; 0 if unsuitable.
pub fn count_bounds(task: &Task, platforms: &[Platform]) -> Vec<u32> {
    platforms
        .iter()
        .enumerate()
        .map(|(p, pl)| {
            CargoType::ALL
                .iter()
                .map(|&c| {
                    let total: u64 = demands(task, c)
                        .iter()
                        .filter(|(_, row)| row.get(p).copied().unwrap_or(false))
                        .map(|(q, _)| *q)
                        .sum();
                    total.div_ceil(pl.capacity(c)) as u32
                })
                .max()
                .unwrap_or(0)
        })
        .collect()
}

fn is_minimal(task: &Task, counts: &mut [u32], platforms: &[Platform]) -> bool {
    for p in 0..counts.len() {
        if counts[p] > 0 {
            counts[p] -= 1;
            let still_valid = is_valid_assignment(task, counts, platforms);
            counts[p] += 1;
            if still_valid {
                return false;
            }
        }
    }
    true
}

struct Search<'a> {
    task: &'a Task,
    platforms: &'a [Platform],
    bounds: Vec<u32>,
    /// Platforms with a positive bound, in index order.
    order: Vec<usize>,
    counts: Vec<u32>,
    out: Vec<AssignmentOption>,
}

impl Search<'_> {
    fn remaining_max_valid(&mut self, depth: usize) -> bool {
        let saved: Vec<u32> = self.order[depth..].iter().map(|&p| self.counts[p]).collect();
        for &p in &self.order[depth..] {
            self.counts[p] = self.bounds[p];
        }
        let ok = is_valid_assignment(self.task, &self.counts, self.platforms);
        for (&p, s) in self.order[depth..].iter().zip(saved) {
            self.counts[p] = s;
        }
        ok
    }

    fn emit_if_minimal(&mut self) {
        let mut probe = self.counts.clone();
        if is_minimal(self.task, &mut probe, self.platforms) {
            self.out.push(AssignmentOption {
                task_id: self.task.id,
                counts: self.counts.clone(),
            });
        }
    }

    fn visit(&mut self, depth: usize) {
        // Remaining platforms are all zero here.
        if is_valid_assignment(self.task, &self.counts, self.platforms) {
            // Any further unit would be removable, so only the all-zero tail can be minimal.
            self.emit_if_minimal();
            return;
        }
        if depth == self.order.len() || !self.remaining_max_valid(depth) {
            return;
        }
        let p = self.order[depth];
        for c in 0..=self.bounds[p] {
            self.counts[p] = c;
            let prefix_valid = c > 0 && is_valid_assignment(self.task, &self.counts, self.platforms);
            self.visit(depth + 1);
            if prefix_valid {
                // Larger counts of `p` on a valid prefix are never minimal.
                break;
            }
        }
        self.counts[p] = 0;
    }
}

/// Every minimal valid assignment with each count at most `cap` (or the
/// natural bound when `None`), in ascending lexicographic order of counts.
///
/// Returns an empty list when `cap` is too small to cover the task.
pub fn enumerate_assignments(
    task: &Task,
    platforms: &[Platform],
    cap: Option<u32>,
) -> Result<Vec<AssignmentOption>> {
    for (r, row) in task.requirements.iter().zip(&task.suitability) {
        if r.quantity > 0 && !row.iter().take(platforms.len()).any(|&s| s) {
            return Err(Error::InfeasibleTask {
                task: task.id,
                reason: format!(
                    "no platform can serve cargo {} subfunction {}",
                    r.cargo_type.number(),
                    r.subfunction_id
                ),
            });
        }
    }
    let mut bounds = count_bounds(task, platforms);
    if let Some(cap) = cap {
        for b in &mut bounds {
            *b = (*b).min(cap);
        }
    }
    let order = (0..platforms.len()).filter(|&p| bounds[p] > 0).collect();
    let mut search = Search {
        task,
        platforms,
        bounds,
        order,
        counts: vec![0; platforms.len()],
        out: Vec::new(),
    };
    search.visit(0);
    Ok(search.out)
}

/// The per-task option lists.
#[derive(Clone, Debug, PartialEq)]
pub struct OptionCatalog {
    options: Vec<Vec<AssignmentOption>>,
}

impl OptionCatalog {
    pub fn new(options: Vec<Vec<AssignmentOption>>) -> Result<Self> {
        for (i, opts) in options.iter().enumerate() {
            if opts.is_empty() {
                return Err(Error::InfeasibleTask {
                    task: i,
                    reason: "no valid assignment".into(),
                });
            }
            let mut sorted: Vec<&Vec<u32>> = opts.iter().map(|o| &o.counts).collect();
            sorted.sort();
            sorted.dedup();
            if sorted.len() != opts.len() {
                return Err(Error::InfeasibleTask {
                    task: i,
                    reason: "duplicate assignment options".into(),
                });
            }
        }
        Ok(OptionCatalog { options })
    }

    pub fn task_count(&self) -> usize {
        self.options.len()
    }

    pub fn options(&self, task: usize) -> &[AssignmentOption] {
        &self.options[task]
    }

    pub fn option(&self, task: usize, index: usize) -> &AssignmentOption {
        &self.options[task][index]
    }

    pub fn option_counts(&self) -> Vec<usize> {
        self.options.iter().map(Vec::len).collect()
    }
}

pub fn build_catalog(dataset: &Dataset, exec: Exec) -> Result<OptionCatalog> {
    let lists = exec.try_map_range(dataset.tasks.len(), |i| {
        enumerate_assignments(&dataset.tasks[i], &dataset.platforms, None)
    })?;
    OptionCatalog::new(lists)
}

/// `sum_i log10(|options_i|)`: size of the joint assignment space.
pub fn solution_space_log10(catalog: &OptionCatalog) -> f64 {
    catalog
        .option_counts()
        .iter()
        .map(|&n| (n as f64).log10())
        .sum()
}

pub const CATALOG_SCHEMA_VERSION: u32 = 1;

/// Catalog cache keyed by the dataset hash.
pub fn save_catalog(catalog: &OptionCatalog, dataset_hash: &str) -> String {
    let mut out = String::new();
    Line::new("schema")
        .field("document", "catalog")
        .field("schema_version", CATALOG_SCHEMA_VERSION)
        .finish(&mut out);
    Line::new("catalog")
        .field("dataset", dataset_hash)
        .field("tasks", catalog.task_count())
        .finish(&mut out);
    for opts in &catalog.options {
        for (j, o) in opts.iter().enumerate() {
            Line::new("option")
                .field("task", o.task_id)
                .field("index", j)
                .field("counts", fmt_list(&o.counts))
                .finish(&mut out);
        }
    }
    out
}

/// Returns the dataset hash the cache was built for and the catalog.
pub fn load_catalog(text: &str) -> Result<(String, OptionCatalog)> {
    let records = parse_records(text)?;
    check_header(&records, "catalog", CATALOG_SCHEMA_VERSION)?;
    let head = records.get(1).ok_or_else(|| Error::Parse {
        line: 0,
        record: "catalog".into(),
        message: "missing `catalog` record".into(),
    })?;
    head.expect_kind("catalog")?;
    let hash: String = head.get("dataset")?;
    let tasks: usize = head.get("tasks")?;
    let mut options: Vec<Vec<AssignmentOption>> = vec![Vec::new(); tasks];
    for rec in &records[2..] {
        rec.expect_kind("option")?;
        let task: usize = rec.get("task")?;
        let index: usize = rec.get("index")?;
        let slot = options
            .get_mut(task)
            .ok_or_else(|| rec.err(format!("task {task} out of range")))?;
        if index != slot.len() {
            return Err(rec.err("option indices must be dense and ordered"));
        }
        slot.push(AssignmentOption {
            task_id: task,
            counts: rec.list("counts")?,
        });
    }
    Ok((hash, OptionCatalog::new(options)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{table1_platforms, table2_task, SubfunctionRequirement, TriangularParams};

    pub(crate) fn single_task(reqs: &[(CargoType, u64, &[bool])], np: usize) -> Task {
        let requirements = reqs
            .iter()
            .enumerate()
            .map(|(j, (c, q, _))| SubfunctionRequirement {
                cargo_type: *c,
                subfunction_id: (j % 3 + 1) as u8,
                quantity: *q,
            })
            .collect();
        let suitability: Vec<Vec<bool>> = reqs.iter().map(|(_, _, m)| m.to_vec()).collect();
        let durations = (0..np)
            .map(|p| if suitability.iter().any(|r| r[p]) { 1.0 } else { 0.0 })
            .collect();
        Task {
            id: 0,
            requirements,
            suitability,
            durations,
            duration_type: 1,
            freq_dist: TriangularParams::around(1.0),
            dur_dist: TriangularParams::around(1.0),
        }
    }

    #[test]
    fn table2_mission_validity() {
        let p = table1_platforms();
        let t = table2_task(0);
        let mut counts = vec![0; 10];
        counts[8] = 27;
        assert!(is_valid_assignment(&t, &counts, &p));
        counts[8] = 26;
        assert!(!is_valid_assignment(&t, &counts, &p));
        let mut p5 = vec![0; 10];
        p5[4] = 1;
        assert!(!is_valid_assignment(&t, &p5, &p));
        // P9:27 is one of the minimal options
        let opts = enumerate_assignments(&t, &p, None).unwrap();
        assert!(opts.iter().any(|o| o.counts == counts_with(8, 27)));
    }

    fn counts_with(p: usize, n: u32) -> Vec<u32> {
        let mut v = vec![0; 10];
        v[p] = n;
        v
    }

    #[test]
    fn zero_requirement_task_has_the_empty_option() {
        let p = table1_platforms();
        let t = single_task(&[(CargoType::Type1, 0, &[true; 10])], 10);
        assert!(is_valid_assignment(&t, &[0; 10], &p));
        let opts = enumerate_assignments(&t, &p, None).unwrap();
        assert_eq!(opts.len(), 1);
        assert_eq!(opts[0].counts, vec![0; 10]);
    }

    #[test]
    fn single_platform_needs_ceiling_count() {
        let p = vec![Platform::new(0, 4, 1, 1.0)];
        let t = single_task(&[(CargoType::Type1, 10, &[true])], 1);
        let opts = enumerate_assignments(&t, &p, Some(10)).unwrap();
        assert_eq!(opts.len(), 1);
        assert_eq!(opts[0].counts, vec![3]);
    }

    #[test]
    fn interchangeable_platforms_yield_two_minimal_options() {
        let p = vec![Platform::new(0, 10, 1, 1.0), Platform::new(1, 12, 1, 2.0)];
        let t = single_task(&[(CargoType::Type1, 9, &[true, true])], 2);
        let opts = enumerate_assignments(&t, &p, Some(5)).unwrap();
        let rows: Vec<Vec<u32>> = opts.into_iter().map(|o| o.counts).collect();
        // lexicographic: [0,1] < [1,0]
        assert_eq!(rows, vec![vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn unservable_requirement_is_an_error() {
        let p = table1_platforms();
        let t = single_task(&[(CargoType::Type2, 5, &[false; 10])], 10);
        assert!(matches!(
            enumerate_assignments(&t, &p, None),
            Err(Error::InfeasibleTask { task: 0, .. })
        ));
    }

    #[test]
    fn solution_space_arithmetic() {
        let one = |i| vec![AssignmentOption { task_id: i, counts: vec![0] }];
        let cat = OptionCatalog::new((0..5).map(one).collect()).unwrap();
        assert_eq!(solution_space_log10(&cat), 0.0);
        let ten = |i: usize| {
            (0..10u32)
                .map(|c| AssignmentOption { task_id: i, counts: vec![c] })
                .collect()
        };
        let cat = OptionCatalog::new((0..100).map(ten).collect()).unwrap();
        assert!((solution_space_log10(&cat) - 100.0).abs() < 1e-9);
    }

    #[test]
    fn catalog_cache_round_trip() {
        let d = crate::domain::generate_dataset(
            &crate::domain::GeneratorConfig::default().with_tasks(8),
            5,
        )
        .unwrap();
        let cat = build_catalog(&d, Exec::default()).unwrap();
        let text = save_catalog(&cat, &d.hash());
        let (hash, back) = load_catalog(&text).unwrap();
        assert_eq!(hash, d.hash());
        assert_eq!(back, cat);
    }
}
