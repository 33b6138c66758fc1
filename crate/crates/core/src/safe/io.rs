use super::{Scenario, TaskInstance, UsageStats};
use crate::error::{Error, Result};
use crate::textfmt::{check_header, fmt_num, parse_records, Line};

pub const SCENARIO_SCHEMA_VERSION: u32 = 1;

/// Header carries the dataset hash, horizon, seed and frequency scale; one
/// `instance` line per realized occurrence follows.
pub fn save_scenario(s: &Scenario, dataset_hash: &str) -> String {
    let mut out = String::new();
    Line::new("schema")
        .field("document", "scenario")
        .field("schema_version", SCENARIO_SCHEMA_VERSION)
        .finish(&mut out);
    Line::new("scenario")
        .field("id", s.id)
        .field("dataset", dataset_hash)
        .field("horizon", s.horizon)
        .field("seed", s.seed)
        .num("scale", s.scale)
        .field("instances", s.instances.len())
        .finish(&mut out);
    for i in &s.instances {
        Line::new("instance")
            .field("task", i.task_id)
            .field("start", i.start)
            .num("duration", i.duration)
            .finish(&mut out);
    }
    out
}

/// Returns the dataset hash recorded in the header and the scenario.
pub fn load_scenario(text: &str) -> Result<(String, Scenario)> {
    let records = parse_records(text)?;
    check_header(&records, "scenario", SCENARIO_SCHEMA_VERSION)?;
    let head = records.get(1).ok_or_else(|| Error::Parse {
        line: 0,
        record: "scenario".into(),
        message: "missing `scenario` record".into(),
    })?;
    head.expect_kind("scenario")?;
    let mut instances = Vec::new();
    for rec in &records[2..] {
        rec.expect_kind("instance")?;
        instances.push(TaskInstance {
            task_id: rec.get("task")?,
            start: rec.get("start")?,
            duration: rec.get("duration")?,
        });
    }
    let declared: usize = head.get("instances")?;
    if declared != instances.len() {
        return Err(head.err(format!("declares {declared} instances, found {}", instances.len())));
    }
    let s = Scenario {
        id: head.get("id")?,
        instances,
        horizon: head.get("horizon")?,
        seed: head.get("seed")?,
        scale: head.get("scale")?,
    };
    Ok((head.get("dataset")?, s))
}

/// `platform,day,mean,std`.
pub fn usage_csv(stats: &UsageStats) -> String {
    let mut out = String::from("platform,day,mean,std\n");
    for (p, (mean, std)) in stats.mean.iter().zip(&stats.std).enumerate() {
        for (day, (m, s)) in mean.iter().zip(std).enumerate() {
            out.push_str(&format!("{p},{day},{},{}\n", fmt_num(*m), fmt_num(*s)));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{generate_dataset, GeneratorConfig};
    use crate::safe::sample_scenario;

    #[test]
    fn scenario_round_trip() {
        let d = generate_dataset(&GeneratorConfig::default().with_tasks(20), 4).unwrap();
        let s = sample_scenario(&d, 365, 2, 99).unwrap();
        let text = save_scenario(&s, &d.hash());
        let (hash, back) = load_scenario(&text).unwrap();
        assert_eq!(hash, d.hash());
        assert_eq!(back, s);
    }

    #[test]
    fn usage_csv_layout() {
        let stats = UsageStats {
            mean: vec![vec![1.0, 0.5]],
            std: vec![vec![0.0, 0.25]],
        };
        assert_eq!(
            usage_csv(&stats),
            "platform,day,mean,std\n0,0,1.000000,0.000000\n0,1,0.500000,0.250000\n"
        );
    }
}
