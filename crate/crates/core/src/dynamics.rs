//! Axes of infinite-order elements, contracting certificates from strongly
//! separated hyperplanes, admissible paths and north-south dynamics on a
//! Cayley ball.
//!
//! Every verdict is indexed by the radius of the ball it was computed on.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::coxeter::{CayleyBall, CoxeterSystem, Word};
use crate::error::{Error, Result};
use crate::graph::{BallGraph, Path, VertexId};
use crate::par;
use crate::walls::{HyperplaneId, SectorId, Walls, INTERIOR_MARGIN};

pub const DEFAULT_POWER_BUDGET: u32 = 8;
/// Powers tried before an element whose orbit stays in the ball is declared
/// of infinite order anyway.
const ORDER_SCAN_LIMIT: usize = 10_000;
/// Translated prefixes must keep this margin to stay in the domain of the
/// north-south iteration.
pub const NS_DOMAIN_MARGIN: u32 = 1;
/// Fraction of unflagged samples expected to reach the target agreement.
/// A regression bound for this implementation.
pub const NS_REGRESSION_BOUND: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AxisKind {
    InvariantGeodesic,
    /// Orbit of the root under `<h>` joined by ball geodesics.
    OrbitQuasiAxis,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Axis {
    /// Normal form of the element.
    pub element: Word,
    /// Power of the element preserving the geodesic.
    pub period: u32,
    pub kind: AxisKind,
    /// Vertex the segment was grown from.
    pub base: Word,
    /// Reduced word of one period, from `base` to `h^period base`.
    pub step: Word,
    /// Axis vertices inside the ball, backward end first.
    pub vertices: Vec<VertexId>,
    /// Position of `base` in `vertices`.
    pub origin: usize,
}

impl Axis {
    /// Distance along the axis between positions `i` and `j`.
    pub fn axis_distance(&self, g: &BallGraph, i: usize, j: usize) -> u32 {
        match self.kind {
            AxisKind::InvariantGeodesic => i.abs_diff(j) as u32,
            AxisKind::OrbitQuasiAxis => g.dist(self.vertices[i], self.vertices[j]),
        }
    }

    /// Forward end inside the ball.
    pub fn attracting(&self) -> VertexId {
        *self.vertices.last().unwrap()
    }

    /// Backward end inside the ball.
    pub fn repelling(&self) -> VertexId {
        self.vertices[0]
    }

    pub fn path(&self) -> Path {
        Path::new(self.vertices.clone())
    }
}

/// Errs with the order of `h` when its orbit returns to the root while still
/// inside the ball.
fn check_infinite_order(sys: &CoxeterSystem, h: &[u8], radius: u32) -> Result<()> {
    let mut p = h.to_vec();
    for k in 1..=ORDER_SCAN_LIMIT {
        if p.is_empty() {
            return Err(Error::FiniteOrderElement { order: k });
        }
        if p.len() > radius as usize {
            return Ok(());
        }
        p = sys.multiply(h, &p)?;
    }
    Ok(())
}

/// True when `|u^k| = k|u|` for every `k <= count`.
fn straight(sys: &CoxeterSystem, u: &[u8], count: usize) -> Result<bool> {
    let mut p = u.to_vec();
    for k in 2..=count {
        for &s in u {
            p = sys.mul_right(&p, s)?;
        }
        if p.len() != k * u.len() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Walks from `x` reading `letters` cyclically while the vertices stay in the ball.
fn walk_in_ball(
    sys: &CoxeterSystem,
    ball: &CayleyBall,
    x: &[u8],
    letters: &[u8],
) -> Result<Vec<VertexId>> {
    let mut out = Vec::new();
    let mut w = x.to_vec();
    // a straight geodesic leaves a ball of radius R after at most 2R + |x| steps
    let limit = 2 * ball.radius() as usize + x.len() + 1;
    for t in 0..limit {
        w = sys.mul_right(&w, letters[t % letters.len()])?;
        match ball.vertex_of(&w) {
            Some(v) => out.push(v),
            None => break,
        }
    }
    Ok(out)
}

/// Combinatorial axis of `h`: an `h^n`-invariant geodesic through a vertex
/// near the root for the smallest `n <= power_budget`, otherwise the orbit
/// quasi-axis.
pub fn build_axis(sys: &CoxeterSystem, ball: &CayleyBall, h: &[u8], power_budget: u32) -> Result<Axis> {
    let h = sys.normal_form(h)?;
    let radius = ball.radius();
    check_infinite_order(sys, &h, radius)?;
    let g = &ball.graph;
    for n in 1..=power_budget.max(1) {
        let gn = sys.power(&h, n)?;
        let reach = radius.min(gn.len() as u32 / 2 + 1);
        for x in 0..g.len() {
            if g.depth(x) > reach {
                continue;
            }
            let xw = &ball.words[x];
            let xinv = sys.inverse(xw)?;
            let u = sys.multiply(&xinv, &sys.multiply(&gn, xw)?)?;
            if u.is_empty() {
                continue;
            }
            let count = (2 * radius as usize + 2 * xw.len()).div_ceil(u.len()) + 1;
            if !straight(sys, &u, count)? {
                continue;
            }
            let forward = walk_in_ball(sys, ball, xw, &u)?;
            let back_letters: Word = u.iter().rev().copied().collect();
            let backward = walk_in_ball(sys, ball, xw, &back_letters)?;
            let mut vertices: Vec<VertexId> = backward.into_iter().rev().collect();
            let origin = vertices.len();
            vertices.push(x);
            vertices.extend(forward);
            return Ok(Axis {
                element: h,
                period: n,
                kind: AxisKind::InvariantGeodesic,
                base: xw.clone(),
                step: u,
                vertices,
                origin,
            });
        }
    }
    orbit_axis(sys, ball, h)
}

fn orbit_axis(sys: &CoxeterSystem, ball: &CayleyBall, h: Word) -> Result<Axis> {
    let g = &ball.graph;
    let hinv = sys.inverse(&h)?;
    let mut forward = Vec::new();
    let mut p = h.clone();
    while let Some(v) = ball.vertex_of(&p) {
        forward.push(v);
        p = sys.multiply(&h, &p)?;
    }
    let mut backward = Vec::new();
    let mut p = hinv.clone();
    while let Some(v) = ball.vertex_of(&p) {
        backward.push(v);
        p = sys.multiply(&hinv, &p)?;
    }
    let orbit: Vec<VertexId> = backward
        .iter()
        .rev()
        .copied()
        .chain(std::iter::once(g.root()))
        .chain(forward.iter().copied())
        .collect();
    let mut vertices = vec![orbit[0]];
    let mut origin = 0;
    for pair in orbit.windows(2) {
        let seg = g.geodesic(pair[0], pair[1]);
        vertices.extend_from_slice(&seg.vertices[1..]);
        if pair[1] == g.root() {
            origin = vertices.len() - 1;
        }
    }
    Ok(Axis {
        element: h.clone(),
        period: 1,
        kind: AxisKind::OrbitQuasiAxis,
        base: Word::new(),
        step: h,
        vertices,
        origin,
    })
}

// -- projections ------------------------------------------------------------

/// Nearest-point projection data of one vertex onto an axis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexProjection {
    pub distance: u32,
    /// Axis positions realising the distance, ascending.
    pub positions: Vec<usize>,
    pub diameter: u32,
    /// Every distance to the axis that matters is a true distance.
    pub safe: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileEntry {
    pub radius: u32,
    pub max_vertex_diameter: u32,
    /// Smallest `C` such that every sampled geodesic at distance at least
    /// `C` from the axis projects to a set of diameter at most `C`, and no
    /// vertex projection is wider than `C`.
    pub constant: u32,
    pub geodesics: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectionProfile {
    pub vertices: Vec<VertexProjection>,
    /// `(distance to axis, projection diameter, deepest endpoint)` per sampled geodesic.
    pub geodesics: Vec<(u32, u32, u32)>,
    /// One entry per radius `1..=R`, restricting to vertices of that depth.
    pub by_radius: Vec<ProfileEntry>,
    pub constant: u32,
}

fn project(g: &BallGraph, axis: &Axis, x: VertexId) -> VertexProjection {
    let row = g.dist_row(x);
    let distance = axis.vertices.iter().map(|&a| row[a]).min().unwrap();
    let positions: Vec<usize> = (0..axis.vertices.len())
        .filter(|&i| row[axis.vertices[i]] == distance)
        .collect();
    let mut diameter = 0;
    for (n, &i) in positions.iter().enumerate() {
        for &j in &positions[n + 1..] {
            diameter = diameter.max(axis.axis_distance(g, i, j));
        }
    }
    // a shorter path to an axis vertex outside the ball would have to reach
    // the frontier, which costs more than the margins allow
    let safe = axis.vertices.iter().all(|&a| {
        g.is_exact_pair(x, a) || g.margin(x) as u64 + g.margin(a) as u64 + 2 > distance as u64
    });
    VertexProjection {
        distance,
        positions,
        diameter,
        safe,
    }
}

fn projection_diameter(g: &BallGraph, axis: &Axis, proj: &[VertexProjection], vs: &[VertexId]) -> u32 {
    let lo = vs.iter().flat_map(|&v| proj[v].positions.iter()).min().copied();
    let hi = vs.iter().flat_map(|&v| proj[v].positions.iter()).max().copied();
    match (lo, hi, axis.kind) {
        (Some(lo), Some(hi), AxisKind::InvariantGeodesic) => (hi - lo) as u32,
        (Some(_), Some(_), AxisKind::OrbitQuasiAxis) => {
            let all: Vec<usize> = vs.iter().flat_map(|&v| proj[v].positions.iter().copied()).collect();
            let mut d = 0;
            for &i in &all {
                for &j in &all {
                    d = d.max(axis.axis_distance(g, i, j));
                }
            }
            d
        }
        _ => 0,
    }
}

fn empirical_constant(samples: &[(u32, u32)], floor: u32) -> u32 {
    let top = samples.iter().map(|s| s.0).max().unwrap_or(0) as usize;
    let mut worst = vec![0u32; top + 2];
    for &(d, diam) in samples {
        worst[d as usize] = worst[d as usize].max(diam);
    }
    for i in (0..=top).rev() {
        worst[i] = worst[i].max(worst[i + 1]);
    }
    (floor..)
        .find(|&c| worst.get(c as usize).is_none_or(|&w| w <= c))
        .unwrap()
}

/// Projection diameters of vertices and of geodesics between safe vertices.
pub fn projection_profile(g: &BallGraph, axis: &Axis) -> ProjectionProfile {
    let proj: Vec<VertexProjection> = par::map_range(g.len(), |x| project(g, axis, x));
    let safe: Vec<VertexId> = (0..g.len()).filter(|&v| proj[v].safe).collect();
    let rows: Vec<Vec<(u32, u32, u32)>> = par::map_range(safe.len(), |i| {
        let x = safe[i];
        let mut out = Vec::new();
        for &y in &safe[i + 1..] {
            if !g.is_exact_pair(x, y) {
                continue;
            }
            let sigma = g.geodesic(x, y);
            if !sigma.vertices.iter().all(|&v| proj[v].safe) {
                continue;
            }
            let d = sigma.vertices.iter().map(|&v| proj[v].distance).min().unwrap();
            let diam = projection_diameter(g, axis, &proj, &sigma.vertices);
            out.push((d, diam, g.depth(x).max(g.depth(y))));
        }
        out
    });
    let geodesics: Vec<(u32, u32, u32)> = rows.into_iter().flatten().collect();
    let radius = g.radius().unwrap_or_else(|| (0..g.len()).map(|v| g.depth(v)).max().unwrap_or(0));
    let by_radius: Vec<ProfileEntry> = (1..=radius)
        .map(|r| {
            let max_vertex_diameter = safe
                .iter()
                .filter(|&&v| g.depth(v) <= r)
                .map(|&v| proj[v].diameter)
                .max()
                .unwrap_or(0);
            let samples: Vec<(u32, u32)> = geodesics
                .iter()
                .filter(|s| s.2 <= r)
                .map(|s| (s.0, s.1))
                .collect();
            ProfileEntry {
                radius: r,
                max_vertex_diameter,
                constant: empirical_constant(&samples, max_vertex_diameter),
                geodesics: samples.len(),
            }
        })
        .collect();
    let constant = by_radius.last().map(|e| e.constant).unwrap_or(0);
    ProjectionProfile {
        vertices: proj,
        geodesics,
        by_radius,
        constant,
    }
}

// -- certification ------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    CertifiedToRadius(u32),
    RefutedToRadius(u32),
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeparatedPair {
    pub hyperplanes: (HyperplaneId, HyperplaneId),
    /// Axis edges `(i, i+1)` crossing each hyperplane, by `i`.
    pub positions: (usize, usize),
    /// `transversals_by_radius[r]`: common transversals witnessed within depth `r`.
    pub transversals_by_radius: Vec<usize>,
    /// Diameters of the projections of each hyperplane's vertices onto the axis.
    pub projection_diameters: (u32, u32),
}

/// Half-space entered by the axis when crossing a hyperplane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HalfSpace {
    pub hyperplane: HyperplaneId,
    pub sector: SectorId,
    pub position: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractingCertificate {
    pub element: String,
    pub radius: u32,
    pub axis: Axis,
    /// `(axis position, hyperplane)` for every crossed hyperplane, in order.
    pub crossed: Vec<(usize, HyperplaneId)>,
    pub candidate_pairs: usize,
    /// Candidate pairs with a common non-truncated transversal.
    pub interior_transversal_pairs: usize,
    pub pair: Option<SeparatedPair>,
    pub profile: Vec<ProfileEntry>,
    /// Bound used for the projections of the certified pair.
    pub projection_bound: u32,
    /// Nested half-spaces given by the translates of the pair along the axis.
    pub chain: Vec<HalfSpace>,
    pub chain_strongly_separated: bool,
    pub verdict: Verdict,
}

fn hyperplane_projection(g: &BallGraph, walls: &Walls, axis: &Axis, proj: &[VertexProjection], h: HyperplaneId) -> Option<u32> {
    let vs = walls.hyperplane_vertices(h);
    let inner: Vec<VertexId> = vs
        .into_iter()
        .filter(|&v| g.margin(v) >= INTERIOR_MARGIN)
        .collect();
    if inner.iter().any(|&v| !proj[v].safe) {
        return None;
    }
    Some(projection_diameter(g, axis, proj, &inner))
}

fn strongly_separated(walls: &Walls, g: &BallGraph, h: HyperplaneId, k: HyperplaneId) -> bool {
    let t = walls.common_transversals(g, h, k);
    t.count == 0 && !t.lower_bound_only && !walls.transverse(g, h, k)
}

/// Searches the hyperplanes crossed by the axis of `h` for a strongly
/// separated pair.
///
/// Pairs are tried by increasing axis span. A pair certifies when it has no
/// common transversal, neither hyperplane is truncated, no transversal could
/// still appear near the frontier, and both hyperplanes project onto the
/// axis with diameter at most the empirical contracting constant of the
/// ball. The verdict is refuted when every candidate pair has a common
/// transversal that is itself non-truncated.
pub fn certify_contracting(
    sys: &CoxeterSystem,
    ball: &CayleyBall,
    walls: &Walls,
    h: &[u8],
) -> Result<ContractingCertificate> {
    let g = &ball.graph;
    let radius = ball.radius();
    let axis = build_axis(sys, ball, h, DEFAULT_POWER_BUDGET)?;
    let profile = projection_profile(g, &axis);
    let mut crossed = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for i in 0..axis.vertices.len().saturating_sub(1) {
        let (a, b) = (axis.vertices[i], axis.vertices[i + 1]);
        let hp = walls
            .edge_hyperplane(a, b)
            .ok_or_else(|| Error::InternalInconsistency(format!("axis edge {a}-{b} has no hyperplane")))?;
        if seen.insert(hp) {
            crossed.push((i, hp));
        }
    }
    let interior: Vec<(usize, HyperplaneId)> = crossed
        .iter()
        .copied()
        .filter(|&(_, hp)| !walls.hyperplanes[hp].truncated)
        .collect();
    let mut pairs = Vec::new();
    for (n, &(i, hi)) in interior.iter().enumerate() {
        for &(j, hj) in &interior[n + 1..] {
            pairs.push((j - i, i, j, hi, hj));
        }
    }
    pairs.sort_unstable();
    let interior_counts: Vec<usize> = par::map_slice(&pairs, |&(_, _, _, hi, hj)| {
        walls.interior_transversals(g, hi, hj)
    });
    let interior_transversal_pairs = interior_counts.iter().filter(|&&c| c > 0).count();
    let bound = profile.constant;
    let mut pair = None;
    for &(_, i, j, hi, hj) in &pairs {
        if !strongly_separated(walls, g, hi, hj) {
            continue;
        }
        let (Some(pi), Some(pj)) = (
            hyperplane_projection(g, walls, &axis, &profile.vertices, hi),
            hyperplane_projection(g, walls, &axis, &profile.vertices, hj),
        ) else {
            continue;
        };
        if pi > bound || pj > bound {
            continue;
        }
        pair = Some(SeparatedPair {
            hyperplanes: (hi, hj),
            positions: (i, j),
            transversals_by_radius: (0..=radius).map(|r| walls.transversals_within(g, hi, hj, r)).collect(),
            projection_diameters: (pi, pj),
        });
        break;
    }
    let (chain, chain_strongly_separated) = match &pair {
        Some(p) => translate_chain(g, walls, &axis, p),
        None => (Vec::new(), false),
    };
    let verdict = if pair.is_some() {
        Verdict::CertifiedToRadius(radius)
    } else if !pairs.is_empty() && interior_transversal_pairs == pairs.len() {
        Verdict::RefutedToRadius(radius)
    } else {
        Verdict::Inconclusive
    };
    Ok(ContractingCertificate {
        element: sys.format_word(&axis.element),
        radius,
        candidate_pairs: pairs.len(),
        interior_transversal_pairs,
        crossed,
        pair,
        profile: profile.by_radius,
        projection_bound: bound,
        chain,
        chain_strongly_separated,
        axis,
        verdict,
    })
}

/// The pair together with its translates along the axis, consecutive
/// members at least the span of the pair apart, with the half-spaces the
/// axis enters. A hyperplane crossing two members would cross a translate
/// of the pair.
fn translate_chain(g: &BallGraph, walls: &Walls, axis: &Axis, pair: &SeparatedPair) -> (Vec<HalfSpace>, bool) {
    if axis.kind != AxisKind::InvariantGeodesic {
        return (Vec::new(), false);
    }
    let step = axis.step.len();
    let (i, j) = pair.positions;
    let stride = (j - i).div_ceil(step) * step;
    let mut positions: Vec<usize> = (0..=i / stride).rev().map(|m| i - m * stride).collect();
    positions.extend((j..axis.vertices.len() - 1).step_by(stride));
    let chain: Vec<HalfSpace> = positions
        .into_iter()
        .filter_map(|i| {
            let hp = walls.edge_hyperplane(axis.vertices[i], axis.vertices[i + 1])?;
            (!walls.hyperplanes[hp].truncated).then(|| HalfSpace {
                hyperplane: hp,
                sector: walls.sector_of(hp, axis.vertices[i + 1]),
                position: i,
            })
        })
        .collect();
    let separated = chain.iter().enumerate().all(|(n, a)| {
        chain[n + 1..]
            .iter()
            .all(|b| walls.common_transversals(g, a.hyperplane, b.hyperplane).count == 0)
    });
    (chain, separated)
}

// -- admissible paths ---------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum SegmentKind {
    /// Power of the letter with this index.
    Axis(usize),
    /// Connector candidate with this index.
    Connector(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub kind: SegmentKind,
    pub start: String,
    pub end: String,
    pub length: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissiblePath {
    pub l: usize,
    pub tau: u32,
    pub segments: Vec<Segment>,
    /// Every vertex of the path, starting at the identity.
    pub vertices: Vec<String>,
    /// Per axis segment: projection diameters of the preceding and following
    /// connectors onto its carrier.
    pub projections: Vec<(u32, u32)>,
    /// Every interior axis segment is longer than `l`.
    pub long_local: bool,
    pub length: usize,
    pub endpoint_distance: usize,
    /// Max over prefixes of `(length + 1) / endpoint distance`.
    pub quasi_geodesic: Option<f64>,
    /// Fellow-travel radius against the normal-form geodesic with the same endpoints.
    pub fellow_travel: usize,
}

fn trace(sys: &CoxeterSystem, start: &[u8], word: &[u8]) -> Result<Vec<Word>> {
    let mut out = vec![start.to_vec()];
    let mut w = start.to_vec();
    for &s in word {
        w = sys.mul_right(&w, s)?;
        out.push(w.clone());
    }
    Ok(out)
}

/// Vertices `start h^k p` for `k` in `lo..hi` and every prefix `p` of `h`.
fn carrier(sys: &CoxeterSystem, start: &[u8], h: &[u8], lo: i64, hi: i64) -> Result<Vec<Word>> {
    let shift = if lo < 0 {
        sys.power(&sys.inverse(h)?, lo.unsigned_abs() as u32)?
    } else {
        sys.power(h, lo as u32)?
    };
    let first = sys.multiply(start, &shift)?;
    let letters: Word = (lo..hi).flat_map(|_| h.iter().copied()).collect();
    trace(sys, &first, &letters)
}

fn carrier_projection(sys: &CoxeterSystem, points: &[Word], carrier: &[Word]) -> Result<u32> {
    let mut nearest: Vec<&Word> = Vec::new();
    for y in points {
        let ds: Vec<usize> = carrier.iter().map(|c| sys.distance(y, c)).collect::<Result<_>>()?;
        let m = *ds.iter().min().unwrap();
        nearest.extend(carrier.iter().zip(&ds).filter(|(_, &d)| d == m).map(|(c, _)| c));
    }
    let mut diam = 0;
    for a in &nearest {
        for b in &nearest {
            diam = diam.max(sys.distance(a, b)?);
        }
    }
    Ok(diam as u32)
}

/// Builds a path `p0 q1 p1 ... qn pn` from the identity where `p_i` spells
/// `letters[i].0 ^ letters[i].1` and each connector `q_i` is the first
/// candidate whose projections onto the carriers of its neighbours have
/// diameter at most `tau`. Computed in the word metric of the group.
pub fn build_admissible_path(
    sys: &CoxeterSystem,
    letters: &[(Word, u32)],
    candidates: &[Word],
    l: usize,
    tau: u32,
) -> Result<AdmissiblePath> {
    let id = Word::new();
    let mut segments = Vec::new();
    let mut path: Vec<Word> = vec![id.clone()];
    let mut projections: Vec<(u32, u32)> = Vec::new();
    let candidates: Vec<Word> = candidates.iter().map(|f| sys.normal_form(f)).collect::<Result<_>>()?;
    let reach = candidates.iter().map(|f| f.len()).max().unwrap_or(0) as i64;
    let mut long_local = true;
    // carrier of the previous axis segment
    let mut previous: Option<(Vec<Word>, Word, Word)> = None;
    for (i, (h, n)) in letters.iter().enumerate() {
        let h = sys.normal_form(h)?;
        if h.is_empty() {
            return Err(Error::FiniteOrderElement { order: 1 });
        }
        let window = (2 * reach + h.len() as i64 - 1) / h.len() as i64 + 1;
        let start = path.last().unwrap().clone();
        let mut from = start.clone();
        if let Some((prev, prev_start, prev_h)) = &previous {
            let mut chosen = None;
            for (ci, f) in candidates.iter().enumerate() {
                let q = trace(sys, &start, f)?;
                let end = q.last().unwrap().clone();
                let next = carrier(sys, &end, &h, -window, *n as i64 + window)?;
                let same = next.contains(prev_start)
                    && next.contains(&sys.multiply(prev_start, prev_h)?)
                    && prev.contains(&end)
                    && prev.contains(&sys.multiply(&end, &h)?);
                if same {
                    continue;
                }
                let a = carrier_projection(sys, &q, prev)?;
                let b = carrier_projection(sys, &q, &next)?;
                if a <= tau && b <= tau {
                    chosen = Some((ci, q, a, b));
                    break;
                }
            }
            let Some((ci, q, a, b)) = chosen else {
                return Err(Error::AllCandidatesRejected(i - 1, i));
            };
            projections.last_mut().unwrap().1 = a;
            projections.push((b, 0));
            from = q.last().unwrap().clone();
            segments.push(Segment {
                kind: SegmentKind::Connector(ci),
                start: sys.format_word(&start),
                end: sys.format_word(&from),
                length: q.len() - 1,
            });
            path.extend(q.into_iter().skip(1));
        } else {
            projections.push((0, 0));
        }
        let power = sys.power(&h, *n)?;
        if i > 0 && i + 1 < letters.len() && power.len() <= l {
            long_local = false;
        }
        let p = trace(sys, &from, &power)?;
        segments.push(Segment {
            kind: SegmentKind::Axis(i),
            start: sys.format_word(&from),
            end: sys.format_word(p.last().unwrap()),
            length: power.len(),
        });
        path.extend(p.into_iter().skip(1));
        let own = carrier(sys, &from, &h, -window, *n as i64 + window)?;
        previous = Some((own, from, h));
    }
    let end = path.last().unwrap().clone();
    let quasi_geodesic = path
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, w)| if w.is_empty() { None } else { Some((k + 1) as f64 / w.len() as f64) })
        .try_fold(0.0f64, |acc, r| r.map(|r| acc.max(r)));
    let geodesic = trace(sys, &id, &end)?;
    let fellow_travel = fellow_travel_radius(sys, &path, &geodesic)?;
    Ok(AdmissiblePath {
        l,
        tau,
        segments,
        vertices: path.iter().map(|w| sys.format_word(w)).collect(),
        projections,
        long_local,
        length: path.len() - 1,
        endpoint_distance: end.len(),
        quasi_geodesic: if path.len() > 1 { quasi_geodesic } else { Some(1.0) },
        fellow_travel,
    })
}

/// Smallest `r` such that the path vertices can be matched, in order, to
/// geodesic vertices within distance `r`.
fn fellow_travel_radius(sys: &CoxeterSystem, path: &[Word], geodesic: &[Word]) -> Result<usize> {
    let table: Vec<Vec<usize>> = path
        .iter()
        .map(|p| geodesic.iter().map(|q| sys.distance(p, q)).collect::<Result<_>>())
        .collect::<Result<_>>()?;
    let fits = |r: usize| {
        let mut j = 0;
        table.iter().all(|row| {
            while j < row.len() && row[j] > r {
                j += 1;
            }
            j < row.len()
        })
    };
    Ok((0..).find(|&r| fits(r)).unwrap())
}

// -- north-south dynamics -----------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NsOptions {
    pub samples: usize,
    pub n_max: u32,
    pub seed: u64,
    pub min_len: u32,
    pub max_len: u32,
    pub target: u32,
}

impl NsOptions {
    pub fn for_radius(radius: u32, samples: usize, n_max: u32, seed: u64) -> Self {
        NsOptions {
            samples,
            n_max,
            seed,
            min_len: 1,
            max_len: (radius / 3).max(1),
            target: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trajectory {
    pub sample: usize,
    /// Vertices of the ray prefix from the root.
    pub prefix: Vec<VertexId>,
    /// Agreement of the prefix endpoint with the repelling end.
    pub repelling_agreement: u32,
    /// Too close to the repelling end to count.
    pub flagged: bool,
    /// `agreement[n]` for each `n` whose translate stays in the ball.
    pub agreement: Vec<u32>,
    /// First `n` whose translate leaves the interior of the ball.
    pub left_domain_at: Option<u32>,
    pub monotone: bool,
    pub first_reaching_target: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NsReport {
    pub element: String,
    pub radius: u32,
    pub target: u32,
    pub attracting: VertexId,
    pub repelling: VertexId,
    pub trajectories: Vec<Trajectory>,
    /// Unflagged trajectories.
    pub counted: usize,
    /// Unflagged trajectories reaching the target before leaving the ball.
    pub reached: usize,
    pub all_monotone: bool,
}

/// Largest `r <= R` such that `y` and `reference` lie on the same side of
/// every non-truncated hyperplane within depth `r` of the root.
pub fn agreement_radius(g: &BallGraph, walls: &Walls, y: VertexId, reference: VertexId) -> u32 {
    let cap = g.radius().unwrap_or(u32::MAX);
    (0..walls.len())
        .filter(|&h| !walls.hyperplanes[h].truncated && walls.sector_of(h, y) != walls.sector_of(h, reference))
        .map(|h| walls.root_distance(g, h))
        .min()
        .unwrap_or(cap)
        .min(cap)
}

/// Iterates `g` on ray prefixes and records the agreement radius of each
/// translate's endpoint with the attracting end of the axis. A translate is
/// in the domain while none of its vertices reaches the frontier sphere.
pub fn ns_iterate(
    sys: &CoxeterSystem,
    ball: &CayleyBall,
    walls: &Walls,
    axis: &Axis,
    samples: &[Path],
    n_max: u32,
    target: u32,
) -> Result<NsReport> {
    let g = &ball.graph;
    let radius = ball.radius();
    let (attracting, repelling) = (axis.attracting(), axis.repelling());
    let powers: Vec<Word> = (0..=n_max).map(|n| sys.power(&axis.element, n)).collect::<Result<_>>()?;
    let trajectories: Vec<Result<Trajectory>> = par::map_range(samples.len(), |s| {
        let p = &samples[s];
        if p.first() != g.root() {
            return Err(Error::NotFromRoot);
        }
        let repelling_agreement = agreement_radius(g, walls, p.last(), repelling);
        let mut agreement = Vec::new();
        let mut left_domain_at = None;
        for (n, gn) in powers.iter().enumerate() {
            let mut image = Vec::with_capacity(p.len());
            for &v in &p.vertices {
                match ball.act_on(sys, gn, v)? {
                    Some(w) if g.margin(w) >= NS_DOMAIN_MARGIN => image.push(w),
                    _ => break,
                }
            }
            if image.len() < p.vertices.len() {
                left_domain_at = Some(n as u32);
                break;
            }
            agreement.push(agreement_radius(g, walls, *image.last().unwrap(), attracting));
        }
        Ok(Trajectory {
            sample: s,
            prefix: p.vertices.clone(),
            repelling_agreement,
            flagged: repelling_agreement >= radius / 2,
            monotone: agreement.windows(2).all(|w| w[0] <= w[1]),
            first_reaching_target: agreement.iter().position(|&a| a >= target).map(|n| n as u32),
            agreement,
            left_domain_at,
        })
    });
    let trajectories: Vec<Trajectory> = trajectories.into_iter().collect::<Result<_>>()?;
    let counted = trajectories.iter().filter(|t| !t.flagged).count();
    let reached = trajectories
        .iter()
        .filter(|t| !t.flagged && t.first_reaching_target.is_some())
        .count();
    let all_monotone = trajectories.iter().filter(|t| !t.flagged).all(|t| t.monotone);
    Ok(NsReport {
        element: sys.format_word(&axis.element),
        radius,
        target,
        attracting,
        repelling,
        trajectories,
        counted,
        reached,
        all_monotone,
    })
}

/// Random depth-increasing geodesics from the root.
pub fn sample_prefixes(g: &BallGraph, count: usize, min_len: u32, max_len: u32, seed: u64) -> Vec<Path> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let len = rng.random_range(min_len..=max_len.max(min_len));
            let mut v = g.root();
            let mut vertices = vec![v];
            for _ in 0..len {
                let up: Vec<VertexId> = g
                    .neighbors(v)
                    .iter()
                    .copied()
                    .filter(|&w| g.depth(w) == g.depth(v) + 1)
                    .collect();
                if up.is_empty() {
                    break;
                }
                v = up[rng.random_range(0..up.len())];
                vertices.push(v);
            }
            Path::new(vertices)
        })
        .collect()
}

/// Seeded north-south experiment: draws prefixes until `samples` of them
/// are not flagged as repelling, then iterates.
pub fn ns_dynamics(
    sys: &CoxeterSystem,
    ball: &CayleyBall,
    walls: &Walls,
    axis: &Axis,
    opts: &NsOptions,
) -> Result<NsReport> {
    let g = &ball.graph;
    let radius = ball.radius();
    let pool = sample_prefixes(g, opts.samples * 20, opts.min_len, opts.max_len, opts.seed);
    let kept: Vec<Path> = pool
        .into_iter()
        .filter(|p| agreement_radius(g, walls, p.last(), axis.repelling()) < radius / 2)
        .take(opts.samples)
        .collect();
    ns_iterate(sys, ball, walls, axis, &kept, opts.n_max, opts.target)
}
