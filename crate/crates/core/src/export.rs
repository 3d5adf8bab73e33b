//! DOT, CSV and JSON renderings of balls, hyperplanes and reports.
//!
//! Every writer iterates in index order so equal inputs give equal bytes.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;

use crate::boundary::{MyrbergProfile, Orientation};
use crate::dynamics::{ContractingCertificate, NsReport, Verdict};
use crate::error::{Error, Result};
use crate::graph::BallGraph;
use crate::order::OrderContext;
use crate::walls::{HyperplaneId, PairRelation, Walls};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Dot,
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Dot => "dot",
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dot" => Ok(Format::Dot),
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::UnsupportedFormat(s.to_string())),
        }
    }
}

const PALETTE: &[&str] = &[
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
    "#bcbd22", "#7f7f7f",
];
const SHADES: &[&str] = &["#f2f2f2", "#cfe2f3", "#f4cccc", "#d9ead3", "#fff2cc"];
const TRUNCATED_COLOR: &str = "#bbbbbb";

/// Pretty JSON with a trailing newline. Field order follows the struct
/// definitions and maps are ordered, so the output is stable.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn graph_json(g: &BallGraph) -> Result<String> {
    to_json(&g.to_record())
}

/// Groups non-truncated hyperplanes into direction families: two disjoint
/// hyperplanes with a common transversal share a family. Truncated
/// hyperplanes get no family.
pub fn wall_families(g: &BallGraph, walls: &Walls) -> Vec<Option<usize>> {
    let live: Vec<HyperplaneId> = (0..walls.len())
        .filter(|&h| !walls.hyperplanes[h].truncated)
        .collect();
    let mut parent: Vec<usize> = (0..walls.len()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for (i, &h) in live.iter().enumerate() {
        for &k in &live[i + 1..] {
            if !walls.transverse(g, h, k) && walls.common_transversals(g, h, k).count > 0 {
                let (a, b) = (find(&mut parent, h), find(&mut parent, k));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut ids: Vec<usize> = Vec::new();
    let mut out = vec![None; walls.len()];
    for &h in &live {
        let root = find(&mut parent, h);
        let id = match ids.iter().position(|&r| r == root) {
            Some(i) => i,
            None => {
                ids.push(root);
                ids.len() - 1
            }
        };
        out[h] = Some(id);
    }
    out
}

fn escape(label: &str) -> String {
    label.replace('\\', "\\\\").replace('"', "\\\"")
}

/// DOT rendering. With walls, edges are coloured by direction family and
/// tagged with their hyperplane; `shade` fills vertices by their sector of
/// that hyperplane.
pub fn graph_dot(g: &BallGraph, walls: Option<&Walls>, shade: Option<HyperplaneId>) -> String {
    let mut s = String::from("graph ball {\n  node [shape=circle, style=filled, fillcolor=\"#ffffff\"];\n");
    for v in 0..g.len() {
        let fill = match (walls, shade) {
            (Some(w), Some(h)) if h < w.len() => SHADES[w.sector_of(h, v) as usize % SHADES.len()],
            _ => "#ffffff",
        };
        let _ = writeln!(s, "  {v} [label=\"{}\", fillcolor=\"{fill}\"];", escape(g.label(v)));
    }
    let families = walls.map(|w| wall_families(g, w));
    for (a, b) in g.edge_list() {
        match (walls, &families) {
            (Some(w), Some(fam)) => {
                let h = w.edge_hyperplane(a, b).expect("every edge has a hyperplane");
                let color = fam[h].map_or(TRUNCATED_COLOR, |f| PALETTE[f % PALETTE.len()]);
                let _ = writeln!(s, "  {a} -- {b} [color=\"{color}\", hyperplane={h}];");
            }
            _ => {
                let _ = writeln!(s, "  {a} -- {b};");
            }
        }
    }
    s.push_str("}\n");
    s
}

fn csv_string(rows: Vec<Vec<String>>) -> Result<String> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    for r in rows {
        w.write_record(&r).map_err(|e| Error::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

fn row<const N: usize>(items: [String; N]) -> Vec<String> {
    items.to_vec()
}

pub fn hyperplanes_csv(g: &BallGraph, walls: &Walls) -> Result<String> {
    let families = wall_families(g, walls);
    let mut rows = vec![row(["id", "truncated", "sectors", "edges", "cliques", "family", "root_distance"].map(String::from))];
    for h in &walls.hyperplanes {
        rows.push(row([
            h.id.to_string(),
            h.truncated.to_string(),
            h.sectors.len().to_string(),
            h.edges.len().to_string(),
            h.cliques.len().to_string(),
            families[h.id].map_or(String::new(), |f| f.to_string()),
            walls.root_distance(g, h.id).to_string(),
        ]));
    }
    csv_string(rows)
}

pub fn relation_name(r: PairRelation) -> &'static str {
    match r {
        PairRelation::Transverse => "transverse",
        PairRelation::Nested { .. } => "nested",
        PairRelation::Undetermined => "undetermined",
    }
}

/// One row per unordered pair `h < k`.
pub fn pairs_csv(g: &BallGraph, walls: &Walls) -> Result<String> {
    let mut rows = vec![row(["h_id", "k_id", "relation", "transversal_count", "lower_bound_only"].map(String::from))];
    for h in 0..walls.len() {
        for k in h + 1..walls.len() {
            let v = walls.classify_pair(g, h, k)?;
            let t = walls.common_transversals(g, h, k);
            rows.push(row([
                h.to_string(),
                k.to_string(),
                relation_name(v.relation).to_string(),
                t.count.to_string(),
                t.lower_bound_only.to_string(),
            ]));
        }
    }
    csv_string(rows)
}

/// `x,y,leq,meet` for every ordered pair of vertices, by label.
pub fn order_csv(ctx: &OrderContext) -> Result<String> {
    let g = ctx.graph;
    let mut rows = vec![row(["x", "y", "leq", "meet"].map(String::from))];
    for x in 0..g.len() {
        for y in 0..g.len() {
            let meet = match ctx.meet(&[x, y]) {
                Ok(m) => g.label(m).to_string(),
                Err(Error::NoMeet(_)) => String::new(),
                Err(e) => return Err(e),
            };
            rows.push(row([
                g.label(x).to_string(),
                g.label(y).to_string(),
                ctx.leq(x, y).to_string(),
                meet,
            ]));
        }
    }
    csv_string(rows)
}

pub fn verdict_name(v: &Verdict) -> String {
    match v {
        Verdict::CertifiedToRadius(r) => format!("CertifiedToRadius({r})"),
        Verdict::RefutedToRadius(r) => format!("RefutedToRadius({r})"),
        Verdict::Inconclusive => "Inconclusive".to_string(),
    }
}

/// One row per radius of the certified pair's transversal counts; a single
/// row with empty pair columns when no pair was found.
pub fn certification_csv(cert: &ContractingCertificate) -> Result<String> {
    let mut rows = vec![row(
        ["radius", "element", "h_id", "k_id", "transversals", "proj_diam_h", "proj_diam_k", "verdict"].map(String::from),
    )];
    let verdict = verdict_name(&cert.verdict);
    match &cert.pair {
        Some(p) => {
            for (r, t) in p.transversals_by_radius.iter().enumerate() {
                rows.push(row([
                    r.to_string(),
                    cert.element.clone(),
                    p.hyperplanes.0.to_string(),
                    p.hyperplanes.1.to_string(),
                    t.to_string(),
                    p.projection_diameters.0.to_string(),
                    p.projection_diameters.1.to_string(),
                    verdict.clone(),
                ]));
            }
        }
        None => rows.push(row([
            cert.radius.to_string(),
            cert.element.clone(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            verdict,
        ])),
    }
    csv_string(rows)
}

pub fn trajectories_csv(report: &NsReport) -> Result<String> {
    let mut rows = vec![row(["sample_id", "n", "agreement_radius", "flagged"].map(String::from))];
    for t in &report.trajectories {
        for (n, a) in t.agreement.iter().enumerate() {
            rows.push(row([t.sample.to_string(), n.to_string(), a.to_string(), t.flagged.to_string()]));
        }
    }
    csv_string(rows)
}

pub fn orientation_csv(o: &Orientation) -> Result<String> {
    let mut rows = vec![row(["hyperplane_id", "sector"].map(String::from))];
    for (h, s) in &o.decided {
        rows.push(row([h.to_string(), s.to_string()]));
    }
    csv_string(rows)
}

pub fn myrberg_csv(profile: &MyrbergProfile) -> Result<String> {
    let mut rows = vec![row(["axis_id", "translate_id", "element", "overlap", "R"].map(String::from))];
    for a in &profile.axes {
        for t in &a.translates {
            rows.push(row([
                a.axis_id.to_string(),
                t.translate_id.to_string(),
                t.element.clone(),
                t.overlap.to_string(),
                profile.neighbourhood.to_string(),
            ]));
        }
    }
    csv_string(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::graph::Extent;
    use crate::walls::build_hyperplanes;

    #[test]
    fn formats_parse() {
        assert_eq!("DOT".parse::<Format>().unwrap(), Format::Dot);
        assert_eq!("svg".parse::<Format>(), Err(Error::UnsupportedFormat("svg".into())));
    }

    #[test]
    fn one_vertex_dot() {
        let g = BallGraph::new(vec!["o".into()], &[], 0, Extent::Finite).unwrap();
        let dot = graph_dot(&g, None, None);
        assert_eq!(dot.matches("label=").count(), 1);
        assert!(!dot.contains("--"));
    }

    #[test]
    fn grid_has_two_wall_families() {
        let sys = fixtures::grid();
        let ball = sys.cayley_ball(3).unwrap();
        let walls = build_hyperplanes(&ball.graph);
        let fam = wall_families(&ball.graph, &walls);
        let mut ids: Vec<usize> = fam.iter().flatten().copied().collect();
        ids.sort_unstable();
        ids.dedup();
        assert_eq!(ids, vec![0, 1]);
        let dot = graph_dot(&ball.graph, Some(&walls), Some(0));
        assert!(dot.contains(PALETTE[0]) && dot.contains(PALETTE[1]) && !dot.contains(PALETTE[2]));
    }

    #[test]
    fn pair_csv_header() {
        let g = fixtures::cycle_graph(4);
        let walls = build_hyperplanes(&g);
        let csv = pairs_csv(&g, &walls).unwrap();
        assert!(csv.starts_with("h_id,k_id,relation,transversal_count,lower_bound_only\n"));
        assert_eq!(csv.lines().count(), 2);
    }
}
