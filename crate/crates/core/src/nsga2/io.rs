use super::Population;
use crate::domain::{fleet_cost, FleetVector, Platform};
use crate::error::{Error, Result};
use crate::textfmt::fmt_num;

/// `scenario_id,individual_id,rank,monetary,time,genome`; genome is
/// space-separated option indices.
pub fn front_csv(scenario_id: usize, pop: &Population) -> String {
    let mut out = String::from("scenario_id,individual_id,rank,monetary,time,genome\n");
    for (i, ind) in pop.individuals.iter().enumerate() {
        let genome: Vec<String> = ind.genome.iter().map(|g| g.to_string()).collect();
        out.push_str(&format!(
            "{scenario_id},{i},{},{},{},{}\n",
            ind.rank,
            fmt_num(ind.objectives.monetary),
            fmt_num(ind.objectives.time),
            genome.join(" ")
        ));
    }
    out
}

/// `scenario_id,fleet_index,p0..p{n-1},fleet_cost`.
pub fn fleets_csv(scenario_id: usize, fleets: &[FleetVector], platforms: &[Platform]) -> Result<String> {
    let mut out = String::from("scenario_id,fleet_index");
    for p in platforms {
        out.push_str(&format!(",p{}", p.id));
    }
    out.push_str(",fleet_cost\n");
    for (j, f) in fleets.iter().enumerate() {
        out.push_str(&format!("{scenario_id},{j}"));
        for c in f.counts() {
            out.push_str(&format!(",{c}"));
        }
        out.push_str(&format!(",{}\n", fmt_num(fleet_cost(f, platforms)?)));
    }
    Ok(out)
}

/// Reads a fleet dump back into `(scenario_id, fleet)` pairs.
pub fn parse_fleets_csv(text: &str, platforms: usize) -> Result<Vec<(usize, FleetVector)>> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let mut out = Vec::new();
    for (line, rec) in reader.records().enumerate() {
        let rec = rec?;
        let bad = |message: String| Error::Parse { line: line + 2, record: "fleet".into(), message };
        if rec.len() != platforms + 3 {
            return Err(bad(format!("expected {} columns, found {}", platforms + 3, rec.len())));
        }
        let scenario: usize = rec[0].parse().map_err(|_| bad("bad scenario_id".into()))?;
        let counts = (0..platforms)
            .map(|v| rec[2 + v].parse::<u32>().map_err(|_| bad(format!("bad count in column p{v}"))))
            .collect::<Result<Vec<_>>>()?;
        out.push((scenario, FleetVector(counts)));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fleet_dump_round_trip() {
        let p = vec![Platform::new(0, 1, 1, 0.5), Platform::new(1, 1, 1, 2.0)];
        let fleets = vec![FleetVector(vec![1, 0]), FleetVector(vec![2, 3])];
        let text = fleets_csv(4, &fleets, &p).unwrap();
        assert!(text.starts_with("scenario_id,fleet_index,p0,p1,fleet_cost\n4,0,1,0,0.500000\n"));
        let back = parse_fleets_csv(&text, 2).unwrap();
        assert_eq!(back, vec![(4, fleets[0].clone()), (4, fleets[1].clone())]);
        assert!(parse_fleets_csv(&text, 3).is_err());
    }
}
