//! Truncated boundary data: orientations of ray prefixes, symmetric
//! differences, horofunctions, chains of strongly separated half-spaces and
//! recurrence profiles of rays along translated axes.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::coxeter::{CayleyBall, CoxeterSystem};
use crate::dynamics::Axis;
use crate::error::{Error, Result};
use crate::graph::{BallGraph, Path, VertexId};
use crate::par;
use crate::walls::{HyperplaneId, SectorId, Walls};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum OrientationSource {
    RayPrefix { end: VertexId, length: usize },
    Vertex(VertexId),
}

/// A sector chosen for each decided hyperplane.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Orientation {
    pub decided: BTreeMap<HyperplaneId, SectorId>,
    /// Decided hyperplanes in the order the prefix crosses them.
    pub sequence: Vec<HyperplaneId>,
    pub source: OrientationSource,
}

impl Orientation {
    pub fn len(&self) -> usize {
        self.decided.len()
    }

    pub fn is_empty(&self) -> bool {
        self.decided.is_empty()
    }

    /// Vertices lying in every chosen sector.
    pub fn realisers(&self, walls: &Walls, n: usize) -> Vec<VertexId> {
        (0..n)
            .filter(|&v| self.decided.iter().all(|(&h, &s)| walls.sector_of(h, v) == s))
            .collect()
    }
}

/// Sectors entered by a geodesic from the root, for every hyperplane it crosses.
pub fn ray_orientation(g: &BallGraph, walls: &Walls, p: &Path) -> Result<Orientation> {
    if p.first() != g.root() {
        return Err(Error::NotFromRoot);
    }
    let crossings = walls.crossing_signature(g, p)?;
    Ok(Orientation {
        decided: crossings.iter().map(|c| (c.hyperplane, c.enter)).collect(),
        sequence: crossings.iter().map(|c| c.hyperplane).collect(),
        source: OrientationSource::RayPrefix {
            end: p.last(),
            length: p.len(),
        },
    })
}

/// Sector of `x` for every non-truncated hyperplane.
pub fn principal_orientation(walls: &Walls, x: VertexId) -> Orientation {
    let sequence: Vec<HyperplaneId> = (0..walls.len())
        .filter(|&h| !walls.hyperplanes[h].truncated)
        .collect();
    Orientation {
        decided: sequence.iter().map(|&h| (h, walls.sector_of(h, x))).collect(),
        sequence,
        source: OrientationSource::Vertex(x),
    }
}

/// Size of the symmetric difference of the `(hyperplane, sector)` assignments.
pub fn symmetric_difference(o1: &Orientation, o2: &Orientation) -> usize {
    let a: BTreeSet<(HyperplaneId, SectorId)> = o1.decided.iter().map(|(&h, &s)| (h, s)).collect();
    let b: BTreeSet<(HyperplaneId, SectorId)> = o2.decided.iter().map(|(&h, &s)| (h, s)).collect();
    a.symmetric_difference(&b).count()
}

/// `b_y(x) = d(x, y) - d(o, y)` for every vertex `x`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HorofunctionVector {
    pub target: VertexId,
    pub values: Vec<i64>,
}

pub fn horofunction_vector(g: &BallGraph, y: VertexId) -> HorofunctionVector {
    let row = g.dist_row(y);
    let base = row[g.root()] as i64;
    HorofunctionVector {
        target: y,
        values: row.iter().map(|&d| d as i64 - base).collect(),
    }
}

/// Largest `|b1(x) - b2(x)|` over `over`, or over every vertex.
pub fn sup_difference(v1: &HorofunctionVector, v2: &HorofunctionVector, over: Option<&[VertexId]>) -> u64 {
    let diff = |x: usize| v1.values[x].abs_diff(v2.values[x]);
    match over {
        Some(vs) => vs.iter().map(|&x| diff(x)).max().unwrap_or(0),
        None => (0..v1.values.len()).map(diff).max().unwrap_or(0),
    }
}

/// Vertices whose ball distances to every target are true distances.
pub fn margin_safe_vertices(g: &BallGraph, targets: &[VertexId]) -> Vec<VertexId> {
    (0..g.len())
        .filter(|&x| targets.iter().all(|&y| g.is_exact_pair(x, y)))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainReport {
    /// Half-spaces of the chain as `(hyperplane, sector)`, outermost first.
    pub chain: Vec<(HyperplaneId, SectorId)>,
    pub length: usize,
    /// Every pair of the chain has no common transversal in the ball.
    pub pairwise_separated: bool,
}

fn strongly_separated(g: &BallGraph, walls: &Walls, h: HyperplaneId, k: HyperplaneId) -> bool {
    !walls.transverse(g, h, k) && walls.common_transversals(g, h, k).count == 0
}

/// True when sector `b` of `k` lies inside sector `a` of `h`.
fn nested_in(g: &BallGraph, walls: &Walls, (h, a): (HyperplaneId, SectorId), (k, b): (HyperplaneId, SectorId)) -> bool {
    (0..g.len()).all(|v| walls.sector_of(k, v) != b || walls.sector_of(h, v) == a)
}

/// Longest descending chain of pairwise strongly separated half-spaces
/// among the decided sectors of non-truncated hyperplanes.
///
/// Half-spaces are taken in crossing order. If `a > b > c` are nested with
/// `(a, b)` and `(b, c)` strongly separated, a hyperplane crossing `a` and
/// `c` must cross `b`, so checking consecutive members suffices; the full
/// pairwise check is still reported.
pub fn chain_minimality(g: &BallGraph, walls: &Walls, o: &Orientation) -> Result<ChainReport> {
    let items: Vec<(HyperplaneId, SectorId)> = o
        .sequence
        .iter()
        .filter(|&&h| !walls.hyperplanes[h].truncated)
        .map(|&h| (h, o.decided[&h]))
        .collect();
    let n = items.len();
    let mut best = vec![1usize; n];
    let mut prev = vec![usize::MAX; n];
    for j in 0..n {
        for i in 0..j {
            if best[i] + 1 > best[j]
                && strongly_separated(g, walls, items[i].0, items[j].0)
                && nested_in(g, walls, items[i], items[j])
            {
                best[j] = best[i] + 1;
                prev[j] = i;
            }
        }
    }
    let mut chain = Vec::new();
    if let Some(mut j) = (0..n).max_by_key(|&j| (best[j], std::cmp::Reverse(j))) {
        loop {
            chain.push(items[j]);
            if prev[j] == usize::MAX {
                break;
            }
            j = prev[j];
        }
    }
    chain.reverse();
    let pairwise_separated = chain
        .iter()
        .enumerate()
        .all(|(i, a)| chain[i + 1..].iter().all(|b| strongly_separated(g, walls, a.0, b.0)));
    Ok(ChainReport {
        length: chain.len(),
        chain,
        pairwise_separated,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranslateOverlap {
    pub translate_id: usize,
    /// Element moving the axis, formatted.
    pub element: String,
    /// Diameter along the path of the part within distance `R` of the translate.
    pub overlap: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxisProfile {
    pub axis_id: usize,
    pub axis: String,
    /// Distinct translates meeting the ball with positive overlap, by translate id.
    pub translates: Vec<TranslateOverlap>,
    pub max_overlap: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MyrbergProfile {
    pub neighbourhood: u32,
    pub path_length: usize,
    pub axes: Vec<AxisProfile>,
}

/// For each axis and each translate `g A` with `g` in the ball, the largest
/// distance along `p` between two vertices of `p` within `R` of `g A`.
pub fn myrberg_profile(
    sys: &CoxeterSystem,
    ball: &CayleyBall,
    p: &Path,
    axes: &[Axis],
    r: u32,
) -> Result<MyrbergProfile> {
    let g = &ball.graph;
    g.check_walk(p)?;
    let mut out = Vec::with_capacity(axes.len());
    for (axis_id, axis) in axes.iter().enumerate() {
        let images: Vec<Result<Option<(Vec<VertexId>, u32)>>> = par::map_range(g.len(), |t| {
            let elt = &ball.words[t];
            let mut verts = Vec::new();
            for &v in &axis.vertices {
                if let Some(w) = ball.act_on(sys, elt, v)? {
                    verts.push(w);
                }
            }
            if verts.is_empty() {
                return Ok(None);
            }
            verts.sort_unstable();
            let near: Vec<usize> = (0..p.vertices.len())
                .filter(|&i| {
                    let row = g.dist_row(p.vertices[i]);
                    verts.iter().any(|&a| row[a] <= r)
                })
                .collect();
            let overlap = match (near.first(), near.last()) {
                (Some(&lo), Some(&hi)) => overlap_diameter(g, p, &near, lo, hi),
                _ => 0,
            };
            Ok(Some((verts, overlap)))
        });
        let mut seen: BTreeSet<Vec<VertexId>> = BTreeSet::new();
        let mut translates = Vec::new();
        for (t, item) in images.into_iter().enumerate() {
            let Some((verts, overlap)) = item? else { continue };
            if !seen.insert(verts) || overlap == 0 {
                continue;
            }
            translates.push(TranslateOverlap {
                translate_id: translates.len(),
                element: sys.format_word(&ball.words[t]),
                overlap,
            });
        }
        let max_overlap = translates.iter().map(|t| t.overlap).max().unwrap_or(0);
        out.push(AxisProfile {
            axis_id,
            axis: sys.format_word(&axis.element),
            translates,
            max_overlap,
        });
    }
    Ok(MyrbergProfile {
        neighbourhood: r,
        path_length: p.len(),
        axes: out,
    })
}

/// Diameter of a set of path vertices: the largest ball distance between two of them.
fn overlap_diameter(g: &BallGraph, p: &Path, near: &[usize], lo: usize, hi: usize) -> u32 {
    if g.is_geodesic(p).unwrap_or(false) {
        return (hi - lo) as u32;
    }
    let mut d = 0;
    for &i in near {
        for &j in near {
            d = d.max(g.dist(p.vertices[i], p.vertices[j]));
        }
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{self, line_word};
    use crate::walls::build_hyperplanes;

    fn line_prefix(ball: &CayleyBall, sign: i32, len: i32) -> Path {
        Path::new((0..=len).map(|k| ball.vertex_of(&line_word(sign * k)).unwrap()).collect())
    }

    #[test]
    fn line_orientations() {
        let sys = fixtures::infinite_dihedral();
        let ball = sys.cayley_ball(8).unwrap();
        let g = &ball.graph;
        let walls = build_hyperplanes(g);
        let trivial = ray_orientation(g, &walls, &Path::trivial(g.root())).unwrap();
        assert!(trivial.is_empty());
        let right = ray_orientation(g, &walls, &line_prefix(&ball, 1, 4)).unwrap();
        let left = ray_orientation(g, &walls, &line_prefix(&ball, -1, 4)).unwrap();
        assert_eq!(right.len(), 4);
        assert_eq!(symmetric_difference(&right, &right), 0);
        assert_eq!(symmetric_difference(&right, &left), 8);
        let r3 = ray_orientation(g, &walls, &line_prefix(&ball, 1, 3)).unwrap();
        let r5 = ray_orientation(g, &walls, &line_prefix(&ball, 1, 5)).unwrap();
        assert_eq!(symmetric_difference(&r3, &r5), 2);
        let not_root = Path::new(vec![ball.vertex_of(&line_word(1)).unwrap(), ball.vertex_of(&line_word(2)).unwrap()]);
        assert_eq!(ray_orientation(g, &walls, &not_root), Err(Error::NotFromRoot));
    }

    #[test]
    fn line_horofunctions() {
        let sys = fixtures::infinite_dihedral();
        let ball = sys.cayley_ball(3).unwrap();
        let g = &ball.graph;
        let right = horofunction_vector(g, ball.vertex_of(&line_word(3)).unwrap());
        let left = horofunction_vector(g, ball.vertex_of(&line_word(-3)).unwrap());
        for x in -3..=3 {
            let v = ball.vertex_of(&line_word(x)).unwrap();
            assert_eq!(right.values[v], -x as i64);
        }
        assert_eq!(right.values[g.root()], 0);
        assert_eq!(sup_difference(&right, &left, None), 6);
    }

    #[test]
    fn line_chains() {
        let sys = fixtures::infinite_dihedral();
        let ball = sys.cayley_ball(8).unwrap();
        let g = &ball.graph;
        let walls = build_hyperplanes(g);
        let empty = ray_orientation(g, &walls, &Path::trivial(g.root())).unwrap();
        assert_eq!(chain_minimality(g, &walls, &empty).unwrap().length, 0);
        for k in 1..=6 {
            let o = ray_orientation(g, &walls, &line_prefix(&ball, 1, k)).unwrap();
            let c = chain_minimality(g, &walls, &o).unwrap();
            assert_eq!(c.length, k as usize);
            assert!(c.pairwise_separated);
        }
    }

    #[test]
    fn grid_diagonal_barely_meets_horizontal_lines() {
        use crate::dynamics::build_axis;
        let sys = fixtures::grid();
        let ball = sys.cayley_ball(6).unwrap();
        let at = |i, j| ball.vertex_of(&sys.normal_form(&fixtures::grid_word(i, j)).unwrap()).unwrap();
        let stairs: Vec<VertexId> = (0..7).map(|k| at((k + 1) / 2, k / 2)).collect();
        let p = Path::new(stairs);
        assert!(ball.graph.is_geodesic(&p).unwrap());
        let axis = build_axis(&sys, &ball, &sys.parse_word("ac").unwrap(), 8).unwrap();
        let prof = myrberg_profile(&sys, &ball, &p, &[axis], 0).unwrap();
        assert_eq!(prof.axes[0].max_overlap, 1);
    }

    #[test]
    fn axis_overlaps_itself_along_its_length() {
        use crate::dynamics::build_axis;
        let sys = fixtures::triangle_237();
        let ball = sys.cayley_ball(8).unwrap();
        let axis = build_axis(&sys, &ball, &sys.parse_word("abc").unwrap(), 8).unwrap();
        let p = axis.path();
        let prof = myrberg_profile(&sys, &ball, &p, &[axis], 0).unwrap();
        assert_eq!(prof.axes[0].max_overlap as usize, p.len());
        let id = prof.axes[0].translates.iter().find(|t| t.element == "e").unwrap();
        assert_eq!(id.overlap as usize, p.len());
    }

    #[test]
    fn admissible_path_recurs_to_its_axes() {
        use crate::dynamics::{build_admissible_path, build_axis};
        let sys = fixtures::triangle_237();
        let w = |t: &str| sys.parse_word(t).unwrap();
        let (h, k) = (w("abc"), sys.normal_form(&w("caabcac")).unwrap());
        let l = 3;
        let adm = build_admissible_path(
            &sys,
            &[(h.clone(), 2), (k.clone(), 2), (h.clone(), 2)],
            &[w("acab"), w("bcab"), w("cbcb")],
            l,
            4,
        )
        .unwrap();
        let words: Vec<_> = adm.vertices.iter().map(|t| w(t)).collect();
        let radius = words.iter().map(Vec::len).max().unwrap() as u32 + 1;
        let ball = sys.cayley_ball(radius).unwrap();
        let p = Path::new(words.iter().map(|u| ball.vertex_of(u).unwrap()).collect());
        let axes = [build_axis(&sys, &ball, &h, 8).unwrap(), build_axis(&sys, &ball, &k, 8).unwrap()];
        let prof = myrberg_profile(&sys, &ball, &p, &axes, 1).unwrap();
        for a in &prof.axes {
            assert!(a.max_overlap as usize >= l, "axis {} overlap {}", a.axis, a.max_overlap);
        }
    }
}
