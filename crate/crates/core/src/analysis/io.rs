use super::{CapabilityHistogram, Classification, GrowthLattice};
use crate::textfmt::{fmt_list, fmt_num, fmt_num_list, Line};

/// `fleet_id,scenario_id,augmentation_cost,classification`: one row per
/// (fleet, scenario) pair.
pub fn capability_csv<'a>(rows: impl IntoIterator<Item = (usize, &'a [f64], &'a [Classification])>) -> String {
    let mut out = String::from("fleet_id,scenario_id,augmentation_cost,classification\n");
    for (fleet_id, aug, classes) in rows {
        for (k, (c, cls)) in aug.iter().zip(classes).enumerate() {
            out.push_str(&format!("{fleet_id},{k},{},{cls}\n", fmt_num(*c)));
        }
    }
    out
}

/// `fraction,bin_low,bin_high,count`.
pub fn histogram_csv(h: &CapabilityHistogram) -> String {
    let mut out = String::from("fraction,bin_low,bin_high,count\n");
    for (rung, f) in h.fractions.iter().enumerate() {
        for b in 0..h.bins {
            let (lo, hi) = h.bin_edges(b);
            out.push_str(&format!(
                "{},{},{},{}\n",
                fmt_num(*f),
                fmt_num(lo),
                fmt_num(hi),
                h.counts[rung][b]
            ));
        }
    }
    out
}

/// Level-ordered text; nodes are indented two spaces per level and list
/// their parents as `level:index` pairs.
pub fn lattice_text(lattice: &GrowthLattice) -> String {
    let mut out = String::new();
    Line::new("schema")
        .field("document", "growth")
        .field("schema_version", 1)
        .finish(&mut out);
    Line::new("lattice")
        .field("root", &lattice.root)
        .num("root_cost", lattice.root_cost)
        .field("fractions", fmt_num_list(&lattice.fractions))
        .field("levels", lattice.levels.len())
        .finish(&mut out);
    for (level, nodes) in lattice.levels.iter().enumerate() {
        for (i, n) in nodes.iter().enumerate() {
            let parents: Vec<String> = n.parents.iter().map(|(l, j)| format!("{l}:{j}")).collect();
            Line::indented(level, "node")
                .field("level", level)
                .field("index", i)
                .field("additions", &n.additions)
                .num("incremental_cost", n.incremental_cost)
                .field("cumulative", &n.cumulative)
                .num("cumulative_cost", n.cumulative_cost)
                .field("option_count", n.option_count)
                .num("score", n.score)
                .field("parents", fmt_list(&parents))
                .finish(&mut out);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::FleetVector;
    use crate::textfmt::parse_records;

    #[test]
    fn lattice_text_is_nested() {
        use crate::analysis::{growth_lattice, FleetPortfolio};
        use crate::domain::table1_platforms;
        let p = table1_platforms();
        let x = FleetVector::sparse(10, &[(8, 30)]);
        let port = FleetPortfolio::new(vec![
            vec![x.clone()],
            vec![FleetVector::sparse(10, &[(8, 30), (0, 2)])],
        ])
        .unwrap();
        let l = growth_lattice(&x, &[0.0, 0.01, 0.02], &port, &p).unwrap();
        let text = lattice_text(&l);
        let recs = parse_records(&text).unwrap();
        let nodes: Vec<_> = recs.iter().filter(|r| r.kind == "node").collect();
        assert_eq!(nodes.len(), l.nodes().count());
        let last = nodes.last().unwrap();
        assert_eq!(last.depth, 2);
        assert_eq!(last.raw("cumulative").unwrap(), "2,0,0,0,0,0,0,0,0,0");
        assert_eq!(last.raw("parents").unwrap(), "0:0");
        assert_eq!(nodes[0].get::<usize>("option_count").unwrap(), 1);
    }

    #[test]
    fn capability_rows() {
        let aug = [0.0, 1.5];
        let cls = [Classification::Robust, Classification::Adaptable(0.05)];
        let text = capability_csv([(7usize, &aug[..], &cls[..])]);
        assert_eq!(
            text,
            "fleet_id,scenario_id,augmentation_cost,classification\n7,0,0.000000,robust\n7,1,1.500000,adaptable@0.050000\n"
        );
    }
}
