//! Canonical text form of a [`Dataset`].
//!
//! ```text
//! schema document=dataset schema_version=1
//! dataset seed=7 platforms=10 tasks=100
//! platform id=0 cap1=22 cap2=5072 cost=0.919900
//! task id=0 duration_type=2 freq=min,mode,max dur=min,mode,max durations=d0,d1,...
//! req task=0 cargo=1 sub=1 qty=401 suitable=0000000010
//! ```
//!
//! `req` lines belong to the preceding `task` line.

use super::{CargoType, Dataset, Platform, SubfunctionRequirement, Task, TriangularParams};
use crate::error::{Error, Result};
use crate::textfmt::{check_header, fmt_num_list, parse_records, Line, Record};

pub const DATASET_SCHEMA_VERSION: u32 = 1;

/// One invariant breach found by [`validate_dataset`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    /// E.g. `task 3` or `platform 1`.
    pub record: String,
    pub message: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.record, self.message)
    }
}

fn tri(t: &TriangularParams) -> String {
    fmt_num_list(&[t.min, t.mode, t.max])
}

fn mask(row: &[bool]) -> String {
    row.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

pub fn save_dataset(d: &Dataset) -> String {
    let mut out = String::new();
    Line::new("schema")
        .field("document", "dataset")
        .field("schema_version", DATASET_SCHEMA_VERSION)
        .finish(&mut out);
    Line::new("dataset")
        .field("seed", d.seed)
        .field("platforms", d.platforms.len())
        .field("tasks", d.tasks.len())
        .finish(&mut out);
    for p in &d.platforms {
        Line::new("platform")
            .field("id", p.id)
            .field("cap1", p.capacity_type1)
            .field("cap2", p.capacity_type2)
            .num("cost", p.cost)
            .finish(&mut out);
    }
    for t in &d.tasks {
        Line::new("task")
            .field("id", t.id)
            .field("duration_type", t.duration_type)
            .field("freq", tri(&t.freq_dist))
            .field("dur", tri(&t.dur_dist))
            .field("durations", fmt_num_list(&t.durations))
            .finish(&mut out);
        for (r, row) in t.requirements.iter().zip(&t.suitability) {
            Line::new("req")
                .field("task", t.id)
                .field("cargo", r.cargo_type.number())
                .field("sub", r.subfunction_id)
                .field("qty", r.quantity)
                .field("suitable", mask(row))
                .finish(&mut out);
        }
    }
    out
}

fn parse_tri(rec: &Record, key: &str) -> Result<TriangularParams> {
    let v: Vec<f64> = rec.list(key)?;
    if v.len() != 3 {
        return Err(rec.err(format!("`{key}` needs exactly three values")));
    }
    Ok(TriangularParams::new(v[0], v[1], v[2]))
}

fn parse_mask(rec: &Record) -> Result<Vec<bool>> {
    rec.raw("suitable")?
        .chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(rec.err("`suitable` must be a 0/1 mask")),
        })
        .collect()
}

/// Parses a dataset document. Structural problems are parse errors; invariant
/// breaches are left for [`validate_dataset`].
pub fn load_dataset(text: &str) -> Result<Dataset> {
    let records = parse_records(text)?;
    check_header(&records, "dataset", DATASET_SCHEMA_VERSION)?;
    let head = records
        .get(1)
        .ok_or_else(|| Error::Parse {
            line: 0,
            record: "dataset".into(),
            message: "missing `dataset` record".into(),
        })?;
    head.expect_kind("dataset")?;
    let seed: u64 = head.get("seed")?;

    let mut platforms = Vec::new();
    let mut tasks: Vec<Task> = Vec::new();
    for rec in &records[2..] {
        match rec.kind.as_str() {
            "platform" => platforms.push(Platform {
                id: rec.get("id")?,
                capacity_type1: rec.get("cap1")?,
                capacity_type2: rec.get("cap2")?,
                cost: rec.get("cost")?,
            }),
            "task" => tasks.push(Task {
                id: rec.get("id")?,
                requirements: Vec::new(),
                suitability: Vec::new(),
                durations: rec.list("durations")?,
                duration_type: rec.get("duration_type")?,
                freq_dist: parse_tri(rec, "freq")?,
                dur_dist: parse_tri(rec, "dur")?,
            }),
            "req" => {
                let task = tasks
                    .last_mut()
                    .ok_or_else(|| rec.err("`req` before any `task`"))?;
                let owner: usize = rec.get("task")?;
                if owner != task.id {
                    return Err(rec.err(format!("`req` for task {owner} follows task {}", task.id)));
                }
                let cargo: u8 = rec.get("cargo")?;
                task.requirements.push(SubfunctionRequirement {
                    cargo_type: CargoType::from_number(cargo)
                        .ok_or_else(|| rec.err("`cargo` must be 1 or 2"))?,
                    subfunction_id: rec.get("sub")?,
                    quantity: rec.get("qty")?,
                });
                task.suitability.push(parse_mask(rec)?);
            }
            other => return Err(rec.err(format!("unknown record kind `{other}`"))),
        }
    }
    let declared_p: usize = head.get("platforms")?;
    let declared_t: usize = head.get("tasks")?;
    if declared_p != platforms.len() || declared_t != tasks.len() {
        return Err(head.err(format!(
            "declares {declared_p} platforms / {declared_t} tasks, found {} / {}",
            platforms.len(),
            tasks.len()
        )));
    }
    Ok(Dataset {
        platforms,
        tasks,
        seed,
    })
}

/// Lists every invariant breach; empty iff the dataset is valid.
pub fn validate_dataset(d: &Dataset) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |record: String, message: String| out.push(Violation { record, message });
    let np = d.platforms.len();
    if np == 0 {
        push("dataset".into(), "no platforms".into());
    }
    for (i, p) in d.platforms.iter().enumerate() {
        let rec = format!("platform {}", p.id);
        if p.id != i {
            push(rec.clone(), format!("id must equal position {i}"));
        }
        if p.capacity_type1 == 0 || p.capacity_type2 == 0 {
            push(rec.clone(), "capacities must be positive".into());
        }
        if !(p.cost > 0.0 && p.cost.is_finite()) {
            push(rec, "cost must be positive".into());
        }
    }
    for (i, t) in d.tasks.iter().enumerate() {
        let rec = format!("task {}", t.id);
        if t.id != i {
            push(rec.clone(), format!("id must equal position {i}"));
        }
        if !(1..=4).contains(&t.duration_type) {
            push(rec.clone(), "duration_type must be 1..=4".into());
        }
        for (name, dist) in [("freq", &t.freq_dist), ("dur", &t.dur_dist)] {
            if !dist.is_valid() || dist.min < 0.0 {
                push(rec.clone(), format!("{name} distribution needs 0 <= min <= mode <= max"));
            }
        }
        if !(t.dur_dist.mode > 0.0) {
            push(rec.clone(), "dur distribution mode must be positive".into());
        }
        if t.durations.len() != np {
            push(rec.clone(), format!("durations has {} entries, expected {np}", t.durations.len()));
            continue;
        }
        if t.suitability.len() != t.requirements.len() {
            push(rec.clone(), "one suitability row per requirement required".into());
            continue;
        }
        let mut seen = std::collections::BTreeSet::new();
        for (r, row) in t.requirements.iter().zip(&t.suitability) {
            if !(1..=3).contains(&r.subfunction_id) {
                push(rec.clone(), "subfunction ids must be 1..=3".into());
            }
            if !seen.insert((r.cargo_type, r.subfunction_id)) {
                push(
                    rec.clone(),
                    format!("duplicate cargo {} subfunction {}", r.cargo_type.number(), r.subfunction_id),
                );
            }
            if row.len() != np {
                push(rec.clone(), "suitability mask length must equal platform count".into());
            } else if r.quantity > 0 && !row.iter().any(|&s| s) {
                push(
                    rec.clone(),
                    format!(
                        "cargo {} subfunction {} has no suitable platform",
                        r.cargo_type.number(),
                        r.subfunction_id
                    ),
                );
            }
        }
        for (p, &dur) in t.durations.iter().enumerate() {
            let suitable = t.is_suitable_for_any(p);
            if !dur.is_finite() || dur < 0.0 || (dur > 0.0) != suitable {
                push(
                    rec.clone(),
                    format!("duration for platform {p} must be positive iff the platform is suitable"),
                );
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{generate_dataset, table1_platforms, GeneratorConfig};
    use proptest::prelude::*;

    fn table1_file() -> String {
        let d = Dataset {
            platforms: table1_platforms(),
            tasks: vec![],
            seed: 0,
        };
        save_dataset(&d)
    }

    #[test]
    fn table1_file_loads() {
        let d = load_dataset(&table1_file()).unwrap();
        assert_eq!(d.platforms.len(), 10);
        assert_eq!(d.platforms[3].cost, 20.2813);
        assert!(table1_file().contains("cost=20.281300"));
    }

    #[test]
    fn bad_triangular_is_one_violation_naming_the_task() {
        let mut d = generate_dataset(&GeneratorConfig::default().with_tasks(5), 2).unwrap();
        d.tasks[3].freq_dist = TriangularParams::new(3.0, 2.0, 1.0);
        let v = validate_dataset(&d);
        assert_eq!(v.len(), 1, "{v:?}");
        assert_eq!(v[0].record, "task 3");
    }

    #[test]
    fn parse_errors_name_the_record() {
        let mut text = table1_file();
        text = text.replace("cap1=22 ", "cap1=abc ");
        match load_dataset(&text) {
            Err(Error::Parse { record, line, .. }) => {
                assert_eq!(record, "platform");
                assert_eq!(line, 3);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(load_dataset("dataset seed=1").is_err());
        assert!(load_dataset("schema document=dataset schema_version=9\n").is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn save_load_is_identity(seed in 0u64..10_000, tasks in 1usize..30) {
            let d = generate_dataset(&GeneratorConfig::default().with_tasks(tasks), seed).unwrap();
            let text = save_dataset(&d);
            let back = load_dataset(&text).unwrap();
            prop_assert_eq!(&back, &d);
            prop_assert_eq!(save_dataset(&back), text);
        }
    }
}
