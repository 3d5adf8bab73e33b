//! Commands of the tool as pure functions from inputs to artifact bytes.
//!
//! File handling, caching and manifests belong to the binary; everything
//! here is deterministic in its arguments.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::boundary::{myrberg_profile, ray_orientation};
use crate::coxeter::{CayleyBall, CoxeterSystem, CoxeterType, Word};
use crate::dynamics::{
    build_admissible_path, build_axis, certify_contracting, ns_dynamics, NsOptions, DEFAULT_POWER_BUDGET,
};
use crate::error::{Error, Result};
use crate::export::{self, Format};
use crate::graph::{BallGraph, Path};
use crate::order::OrderContext;
use crate::walls::{build_hyperplanes, ParacliqueReport, Walls};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Ball,
    Hyperplanes,
    Pairs,
    Order,
    Certify,
    Admissible,
    Nsdyn,
    Myrberg,
    FixtureCheck,
}

impl Command {
    pub const ALL: [Command; 9] = [
        Command::Ball,
        Command::Hyperplanes,
        Command::Pairs,
        Command::Order,
        Command::Certify,
        Command::Admissible,
        Command::Nsdyn,
        Command::Myrberg,
        Command::FixtureCheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Ball => "ball",
            Command::Hyperplanes => "hyperplanes",
            Command::Pairs => "pairs",
            Command::Order => "order",
            Command::Certify => "certify",
            Command::Admissible => "admissible",
            Command::Nsdyn => "nsdyn",
            Command::Myrberg => "myrberg",
            Command::FixtureCheck => "fixture-check",
        }
    }

    /// Formats written when none is requested.
    fn default_formats(self) -> &'static [Format] {
        match self {
            Command::Ball | Command::Admissible | Command::FixtureCheck => &[Format::Json],
            Command::Hyperplanes | Command::Pairs | Command::Order => &[Format::Csv],
            Command::Certify | Command::Nsdyn | Command::Myrberg => &[Format::Csv, Format::Json],
        }
    }

    fn supports(self, f: Format) -> bool {
        match self {
            Command::Ball | Command::Hyperplanes => true,
            Command::Pairs | Command::Order => f == Format::Csv,
            Command::Admissible | Command::FixtureCheck => f == Format::Json,
            Command::Certify | Command::Nsdyn | Command::Myrberg => f != Format::Dot,
        }
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::BadScenario(format!("unknown command `{s}`")))
    }
}

fn default_samples() -> usize {
    50
}

fn default_iters() -> u32 {
    6
}

fn default_l() -> usize {
    3
}

fn default_tau() -> u32 {
    4
}

/// Parameters shared by all commands; each command reads the ones it needs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    /// Ball radius; for a graph source, restricts to the ball of this radius.
    #[serde(default)]
    pub radius: Option<u32>,
    #[serde(default)]
    pub element: Option<String>,
    #[serde(default)]
    pub ray: Option<String>,
    #[serde(default)]
    pub axes: Vec<String>,
    /// Neighbourhood size for recurrence profiles.
    #[serde(default, rename = "R")]
    pub neighbourhood: u32,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_iters")]
    pub iters: u32,
    #[serde(default)]
    pub seed: u64,
    /// Admissible path letters, `word` or `word^n`.
    #[serde(default)]
    pub letters: Vec<String>,
    #[serde(default)]
    pub candidates: Vec<String>,
    #[serde(default = "default_l")]
    pub l: usize,
    #[serde(default = "default_tau")]
    pub tau: u32,
    /// Hyperplane whose sectors shade the DOT rendering.
    #[serde(default)]
    pub shade: Option<usize>,
    #[serde(default)]
    pub format: Option<Format>,
}

impl Default for Params {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all fields have defaults")
    }
}

pub enum Input {
    System(CoxeterSystem),
    Graph(BallGraph),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

impl Artifact {
    fn new(stem: &str, format: Format, text: String) -> Self {
        Artifact {
            name: format!("{stem}.{}", format.extension()),
            bytes: text.into_bytes(),
        }
    }
}

/// Summary written by `fixture-check`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixtureReport {
    pub vertices: usize,
    pub edges: usize,
    pub hyperplanes: usize,
    pub truncated: usize,
    pub paraclique: ParacliqueReport,
    pub bijection_holds: bool,
    /// Exact type of each irreducible component, for Coxeter sources.
    pub types: Option<Vec<CoxeterType>>,
}

/// Parses `word` or `word^n`.
pub fn parse_letter(sys: &CoxeterSystem, text: &str) -> Result<(Word, u32)> {
    let (w, n) = match text.split_once('^') {
        Some((w, n)) => (
            w,
            n.trim().parse::<u32>().map_err(|_| Error::BadWord(text.to_string()))?,
        ),
        None => (text, 1),
    };
    Ok((sys.parse_word(w.trim())?, n))
}

/// The walk from the identity spelling `word` letter by letter.
pub fn word_path(sys: &CoxeterSystem, ball: &CayleyBall, word: &str) -> Result<Path> {
    let w = sys.parse_word(word)?;
    let mut current = Word::new();
    let mut vertices = vec![ball.graph.root()];
    for &s in &w {
        current = sys.mul_right(&current, s)?;
        let v = ball
            .vertex_of(&current)
            .ok_or_else(|| Error::UnknownLabel(sys.format_word(&current)))?;
        vertices.push(v);
    }
    Ok(Path::new(vertices))
}

fn require<'a>(field: &'a Option<String>, name: &str) -> Result<&'a str> {
    field
        .as_deref()
        .ok_or_else(|| Error::BadScenario(format!("missing parameter `{name}`")))
}

fn require_radius(p: &Params) -> Result<u32> {
    p.radius.ok_or_else(|| Error::BadScenario("missing parameter `radius`".into()))
}

fn graph_artifacts(
    cmd: Command,
    g: &BallGraph,
    params: &Params,
    formats: &[Format],
) -> Result<Vec<Artifact>> {
    let mut out = Vec::new();
    let walls = match cmd {
        Command::Ball if !formats.contains(&Format::Dot) => None,
        _ => Some(build_hyperplanes(g)),
    };
    for &f in formats {
        let text = match (cmd, f) {
            (Command::Ball, Format::Json) => export::graph_json(g)?,
            (Command::Ball, Format::Dot) => export::graph_dot(g, walls.as_ref(), params.shade),
            (Command::Ball, Format::Csv) => {
                let mut s = String::from("a,b\n");
                for (a, b) in g.edge_list() {
                    s.push_str(&format!("{a},{b}\n"));
                }
                s
            }
            (Command::Hyperplanes, f) => {
                let w = walls.as_ref().expect("walls built");
                match f {
                    Format::Csv => export::hyperplanes_csv(g, w)?,
                    Format::Json => export::to_json(&w.hyperplanes)?,
                    Format::Dot => export::graph_dot(g, Some(w), params.shade),
                }
            }
            (Command::Pairs, _) => export::pairs_csv(g, walls.as_ref().expect("walls built"))?,
            (Command::Order, _) => {
                let w = walls.as_ref().expect("walls built");
                let ctx = match OrderContext::quasi_median(g, w) {
                    Ok(c) => c,
                    Err(Error::NotParaclique(_)) => OrderContext::new(g),
                    Err(e) => return Err(e),
                };
                export::order_csv(&ctx)?
            }
            (Command::FixtureCheck, _) => export::to_json(&fixture_report(g, walls.as_ref().expect("walls built"), None))?,
            _ => return Err(Error::UnsupportedFormat(f.extension().into())),
        };
        out.push(Artifact::new(cmd.name(), f, text));
    }
    Ok(out)
}

fn fixture_report(g: &BallGraph, walls: &Walls, types: Option<Vec<CoxeterType>>) -> FixtureReport {
    FixtureReport {
        vertices: g.len(),
        edges: g.edge_count(),
        hyperplanes: walls.len(),
        truncated: walls.hyperplanes.iter().filter(|h| h.truncated).count(),
        paraclique: walls.report.clone(),
        bijection_holds: walls.report.bijection_holds(),
        types,
    }
}

/// Runs one command. `balls` supplies Cayley balls so callers can cache them.
pub fn run(
    cmd: Command,
    input: &Input,
    params: &Params,
    balls: &dyn Fn(&CoxeterSystem, u32) -> Result<CayleyBall>,
) -> Result<Vec<Artifact>> {
    let formats: Vec<Format> = match params.format {
        Some(f) if cmd.supports(f) => vec![f],
        Some(f) => return Err(Error::UnsupportedFormat(f.extension().into())),
        None => cmd.default_formats().to_vec(),
    };
    let sys = match input {
        Input::Graph(g) => {
            let g = match params.radius {
                Some(r) => g.sub_ball(r)?.0,
                None => g.clone(),
            };
            return match cmd {
                Command::Ball | Command::Hyperplanes | Command::Pairs | Command::Order | Command::FixtureCheck => {
                    graph_artifacts(cmd, &g, params, &formats)
                }
                _ => Err(Error::BadScenario(format!(
                    "command `{}` needs a Coxeter system",
                    cmd.name()
                ))),
            };
        }
        Input::System(sys) => sys,
    };
    if cmd == Command::Admissible {
        let letters = params
            .letters
            .iter()
            .map(|t| parse_letter(sys, t))
            .collect::<Result<Vec<_>>>()?;
        let candidates = params
            .candidates
            .iter()
            .map(|t| sys.parse_word(t))
            .collect::<Result<Vec<_>>>()?;
        let path = build_admissible_path(sys, &letters, &candidates, params.l, params.tau)?;
        return Ok(vec![Artifact::new("admissible", Format::Json, export::to_json(&path)?)]);
    }
    let radius = require_radius(params)?;
    let ball = balls(sys, radius)?;
    let g = &ball.graph;
    let mut out = Vec::new();
    match cmd {
        Command::Ball | Command::Hyperplanes | Command::Pairs | Command::Order => {
            return graph_artifacts(cmd, g, params, &formats);
        }
        Command::FixtureCheck => {
            let walls = build_hyperplanes(g);
            let types = sys.classify()?.components.iter().map(|c| c.kind).collect();
            let report = fixture_report(g, &walls, Some(types));
            out.push(Artifact::new("fixture-check", Format::Json, export::to_json(&report)?));
        }
        Command::Certify => {
            let h = sys.parse_word(require(&params.element, "element")?)?;
            let walls = build_hyperplanes(g);
            let cert = certify_contracting(sys, &ball, &walls, &h)?;
            for &f in &formats {
                let text = match f {
                    Format::Csv => export::certification_csv(&cert)?,
                    _ => export::to_json(&cert)?,
                };
                out.push(Artifact::new("certification", f, text));
            }
        }
        Command::Nsdyn => {
            let h = sys.parse_word(require(&params.element, "element")?)?;
            let walls = build_hyperplanes(g);
            let axis = build_axis(sys, &ball, &h, DEFAULT_POWER_BUDGET)?;
            let opts = NsOptions::for_radius(radius, params.samples, params.iters, params.seed);
            let report = ns_dynamics(sys, &ball, &walls, &axis, &opts)?;
            for &f in &formats {
                let text = match f {
                    Format::Csv => export::trajectories_csv(&report)?,
                    _ => export::to_json(&report)?,
                };
                out.push(Artifact::new("trajectories", f, text));
            }
        }
        Command::Myrberg => {
            let ray = word_path(sys, &ball, require(&params.ray, "ray")?)?;
            let axes = params
                .axes
                .iter()
                .map(|a| build_axis(sys, &ball, &sys.parse_word(a)?, DEFAULT_POWER_BUDGET))
                .collect::<Result<Vec<_>>>()?;
            let profile = myrberg_profile(sys, &ball, &ray, &axes, params.neighbourhood)?;
            let walls = build_hyperplanes(g);
            let orientation = ray_orientation(g, &walls, &ray).ok();
            for &f in &formats {
                match f {
                    Format::Csv => {
                        out.push(Artifact::new("myrberg", f, export::myrberg_csv(&profile)?));
                        if let Some(o) = &orientation {
                            out.push(Artifact::new("orientation", f, export::orientation_csv(o)?));
                        }
                    }
                    _ => out.push(Artifact::new("myrberg", f, export::to_json(&profile)?)),
                }
            }
        }
        Command::Admissible => unreachable!("handled above"),
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn fresh(sys: &CoxeterSystem, r: u32) -> Result<CayleyBall> {
        sys.cayley_ball(r)
    }

    #[test]
    fn commands_round_trip_names() {
        for c in Command::ALL {
            assert_eq!(c.name().parse::<Command>().unwrap(), c);
            let json = serde_json::to_string(&c).unwrap();
            assert_eq!(json, format!("\"{}\"", c.name()));
        }
    }

    #[test]
    fn params_default_from_empty_object() {
        let p = Params::default();
        assert_eq!((p.samples, p.iters, p.seed, p.radius), (50, 6, 0, None));
        assert!(serde_json::from_str::<Params>(r#"{"radius": 3, "bogus": 1}"#).is_err());
    }

    #[test]
    fn dinf_ball_has_eleven_vertices() {
        let p = Params {
            radius: Some(5),
            ..Params::default()
        };
        let out = run(Command::Ball, &Input::System(fixtures::infinite_dihedral()), &p, &fresh).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].name, "ball.json");
        let rec: crate::graph::GraphRecord = serde_json::from_slice(&out[0].bytes).unwrap();
        assert_eq!(rec.labels.len(), 11);
    }

    #[test]
    fn unsupported_combination() {
        let p = Params {
            radius: Some(2),
            format: Some(Format::Dot),
            ..Params::default()
        };
        let err = run(Command::Pairs, &Input::System(fixtures::grid()), &p, &fresh).unwrap_err();
        assert_eq!(err, Error::UnsupportedFormat("dot".into()));
    }

    #[test]
    fn letters_parse() {
        let sys = fixtures::triangle_237();
        assert_eq!(parse_letter(&sys, "abc^3").unwrap(), (sys.parse_word("abc").unwrap(), 3));
        assert_eq!(parse_letter(&sys, "ab").unwrap().1, 1);
        assert!(parse_letter(&sys, "ab^x").is_err());
    }
}
