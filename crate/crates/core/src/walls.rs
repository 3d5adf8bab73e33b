//! Cliques, parallelism, hyperplanes and sectors.
//!
//! Hyperplanes are the classes of the transitive closure of clique
//! parallelism; the sectors of a hyperplane are the components left after
//! deleting the edges of its cliques. On a ball every statement that only
//! holds in the ambient graph is checked on truncation-safe data: vertex
//! pairs whose ball distance is provably exact, and hyperplanes anchored by a
//! clique away from the frontier.

use std::collections::{BTreeSet, HashMap};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{BallGraph, Path, VertexId};
use crate::par;

pub type HyperplaneId = usize;
pub type SectorId = u32;

/// Margin a clique needs to anchor a non-truncated hyperplane.
pub const INTERIOR_MARGIN: u32 = 2;

/// Sentinel in witness tables for "never transverse".
const NEVER: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Clique {
    pub id: usize,
    /// Sorted vertex indices.
    pub vertices: Vec<VertexId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum CliqueRelation {
    /// Pairs `(v, u)` with `v` in the first clique matched to `u` in the second.
    Parallel(Vec<(VertexId, VertexId)>),
    /// The unique closest pair.
    Antipodal(VertexId, VertexId),
    Other,
}

/// All maximal cliques, each sorted, listed in lexicographic order.
pub fn maximal_cliques(g: &BallGraph) -> Vec<Clique> {
    let n = g.len();
    let mut out: Vec<Vec<VertexId>> = Vec::new();
    // degeneracy-free Bron-Kerbosch with pivoting, seeded per vertex so that
    // each clique is reported once from its smallest vertex
    for v in 0..n {
        let p: Vec<VertexId> = g.neighbors(v).iter().copied().filter(|&w| w > v).collect();
        let x: Vec<VertexId> = g.neighbors(v).iter().copied().filter(|&w| w < v).collect();
        let mut r = vec![v];
        bron_kerbosch(g, &mut r, p, x, &mut out);
    }
    for c in &mut out {
        c.sort_unstable();
    }
    out.sort();
    out.into_iter()
        .enumerate()
        .map(|(id, vertices)| Clique { id, vertices })
        .collect()
}

fn bron_kerbosch(
    g: &BallGraph,
    r: &mut Vec<VertexId>,
    mut p: Vec<VertexId>,
    mut x: Vec<VertexId>,
    out: &mut Vec<Vec<VertexId>>,
) {
    if p.is_empty() {
        if x.is_empty() {
            out.push(r.clone());
        }
        return;
    }
    let pivot = p
        .iter()
        .chain(&x)
        .copied()
        .max_by_key(|&u| p.iter().filter(|&&w| g.adjacent(u, w)).count())
        .unwrap();
    let candidates: Vec<VertexId> = p.iter().copied().filter(|&w| !g.adjacent(pivot, w)).collect();
    for v in candidates {
        let np = p.iter().copied().filter(|&w| g.adjacent(v, w)).collect();
        let nx = x.iter().copied().filter(|&w| g.adjacent(v, w)).collect();
        r.push(v);
        bron_kerbosch(g, r, np, nx, out);
        r.pop();
        p.retain(|&w| w != v);
        x.push(v);
    }
}

/// Distance between two vertex sets.
fn set_distance(g: &BallGraph, a: &[VertexId], b: &[VertexId]) -> u32 {
    let mut best = u32::MAX;
    for &u in a {
        let row = g.dist_row(u);
        for &v in b {
            best = best.min(row[v]);
        }
    }
    best
}

/// Parallel / antipodal test on two cliques using distances in `g`.
pub fn clique_pair_relation(g: &BallGraph, c1: &[VertexId], c2: &[VertexId]) -> CliqueRelation {
    let d = set_distance(g, c1, c2);
    if c1.len() == c2.len() {
        let mut matching = Vec::with_capacity(c1.len());
        let mut ok = true;
        let mut used = vec![false; c2.len()];
        for &v in c1 {
            let row = g.dist_row(v);
            let mut partner = None;
            for (j, &u) in c2.iter().enumerate() {
                let duv = row[u];
                if duv == d {
                    if partner.is_some() {
                        ok = false;
                    }
                    partner = Some(j);
                } else if duv != d + 1 {
                    ok = false;
                }
            }
            match partner {
                Some(j) if ok && !used[j] => {
                    used[j] = true;
                    matching.push((v, c2[j]));
                }
                _ => {
                    ok = false;
                }
            }
            if !ok {
                break;
            }
        }
        if ok {
            return CliqueRelation::Parallel(matching);
        }
    }
    // antipodal: a unique closest pair, +1 to the rest of either clique, +2 across
    let mut closest = None;
    for &u in c1 {
        for &v in c2 {
            if g.dist(u, v) == d {
                if closest.is_some() {
                    return CliqueRelation::Other;
                }
                closest = Some((u, v));
            }
        }
    }
    let Some((u, v)) = closest else {
        return CliqueRelation::Other;
    };
    for &u2 in c1 {
        for &v2 in c2 {
            let want = d + (u2 != u) as u32 + (v2 != v) as u32;
            if g.dist(u2, v2) != want {
                return CliqueRelation::Other;
            }
        }
    }
    CliqueRelation::Antipodal(u, v)
}

/// Every cross pair of the two cliques is truncation-safe.
fn cliques_safe(g: &BallGraph, a: &[VertexId], b: &[VertexId]) -> bool {
    a.iter().all(|&u| b.iter().all(|&v| g.is_safe_pair(u, v)))
}

/// Every cross pair of the two cliques has its ambient distance in the ball.
fn cliques_exact(g: &BallGraph, a: &[VertexId], b: &[VertexId]) -> bool {
    a.iter().all(|&u| b.iter().all(|&v| g.is_exact_pair(u, v)))
}

fn clique_interior(g: &BallGraph, c: &[VertexId]) -> bool {
    c.iter().all(|&v| g.margin(v) >= INTERIOR_MARGIN)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hyperplane {
    pub id: HyperplaneId,
    /// Clique ids of the parallel class, ascending.
    pub cliques: Vec<usize>,
    /// Edges `(a, b)` with `a < b`, sorted.
    pub edges: Vec<(VertexId, VertexId)>,
    /// Sector partition, each sorted; sectors ordered by smallest vertex.
    pub sectors: Vec<Vec<VertexId>>,
    /// No clique of the class lies at margin at least [`INTERIOR_MARGIN`].
    pub truncated: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParacliqueReport {
    /// Safe (clique, vertex) pairs with no gate.
    pub gate_failures: Vec<(usize, VertexId)>,
    /// Safe triples violating the triangle condition.
    pub triangle_failures: usize,
    /// Induced `K4` minus an edge with all vertices interior.
    pub diamonds: usize,
    /// Safe clique pairs in one class that are not parallel.
    pub transitivity_violations: Vec<(usize, usize)>,
    /// Interior vertices whose sector disagrees with their gate on a clique of
    /// a non-truncated hyperplane: `(hyperplane, clique, vertex)`.
    pub bijection_failures: Vec<(HyperplaneId, usize, VertexId)>,
    /// Non-truncated hyperplanes whose sector count differs from the size of
    /// an interior clique.
    pub sector_count_failures: Vec<HyperplaneId>,
    pub clique_gated: bool,
    pub paraclique: bool,
}

impl ParacliqueReport {
    pub fn bijection_holds(&self) -> bool {
        self.bijection_failures.is_empty() && self.sector_count_failures.is_empty()
    }
}

/// Hyperplanes of a graph with their sectors and the paraclique report.
#[derive(Debug)]
pub struct Walls {
    pub cliques: Vec<Clique>,
    pub hyperplanes: Vec<Hyperplane>,
    /// Hyperplane of every clique.
    pub clique_class: Vec<HyperplaneId>,
    /// `sector_of[h][v]`: sector of `v` delimited by `h`.
    sector_of: Vec<Vec<SectorId>>,
    edge_class: HashMap<(VertexId, VertexId), HyperplaneId>,
    pub report: ParacliqueReport,
    witness: OnceLock<Vec<Vec<u32>>>,
}

/// Relation between two hyperplanes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PairRelation {
    Transverse,
    /// Sectors `a` of the first and `b` of the second: every other sector of
    /// the second lies in `a` and every other sector of the first lies in `b`.
    Nested { a: SectorId, b: SectorId },
    /// Neither configuration, which only happens near the frontier.
    Undetermined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairVerdict {
    pub relation: PairRelation,
    /// Best-effort verdict: one of the hyperplanes is truncated.
    pub truncated: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transversals {
    pub count: usize,
    /// More transversals may exist beyond the ball.
    pub lower_bound_only: bool,
}

/// One hyperplane crossing of a path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Crossing {
    pub hyperplane: HyperplaneId,
    pub exit: SectorId,
    pub enter: SectorId,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.0[hi] = lo;
        }
    }
}

/// Builds hyperplanes and sectors and checks the paraclique axioms on the
/// truncation-safe part of the graph.
pub fn build_hyperplanes(g: &BallGraph) -> Walls {
    let cliques = maximal_cliques(g);
    let nc = cliques.len();

    // parallel pairs, one row per clique
    let parallel: Vec<Vec<usize>> = par::map_range(nc, |i| {
        let ci = &cliques[i].vertices;
        ((i + 1)..nc)
            .filter(|&j| {
                let cj = &cliques[j].vertices;
                ci.len() == cj.len()
                    && cliques_exact(g, ci, cj)
                    && matches!(clique_pair_relation(g, ci, cj), CliqueRelation::Parallel(_))
            })
            .collect()
    });
    let mut uf = UnionFind((0..nc).collect());
    for (i, row) in parallel.iter().enumerate() {
        for &j in row {
            uf.union(i, j);
        }
    }
    let mut root_class: HashMap<usize, HyperplaneId> = HashMap::new();
    let mut members: Vec<Vec<usize>> = Vec::new();
    let mut clique_class = vec![0; nc];
    for i in 0..nc {
        let r = uf.find(i);
        let id = *root_class.entry(r).or_insert_with(|| {
            members.push(Vec::new());
            members.len() - 1
        });
        members[id].push(i);
        clique_class[i] = id;
    }

    let mut edge_class = HashMap::new();
    for (i, c) in cliques.iter().enumerate() {
        for (k, &a) in c.vertices.iter().enumerate() {
            for &b in &c.vertices[k + 1..] {
                // an edge in several maximal cliques keeps its first class
                edge_class.entry((a, b)).or_insert(clique_class[i]);
            }
        }
    }

    let built: Vec<(Hyperplane, Vec<SectorId>)> = par::map_range(members.len(), |h| {
        let mut edges: Vec<(VertexId, VertexId)> = Vec::new();
        for &c in &members[h] {
            let vs = &cliques[c].vertices;
            for (k, &a) in vs.iter().enumerate() {
                for &b in &vs[k + 1..] {
                    edges.push((a, b));
                }
            }
        }
        edges.sort_unstable();
        edges.dedup();
        let (sectors, labels) = sectors_without(g, &edges);
        let truncated = !members[h]
            .iter()
            .any(|&c| clique_interior(g, &cliques[c].vertices));
        (
            Hyperplane {
                id: h,
                cliques: members[h].clone(),
                edges,
                sectors,
                truncated,
            },
            labels,
        )
    });
    let (hyperplanes, sector_of): (Vec<_>, Vec<_>) = built.into_iter().unzip();

    let mut walls = Walls {
        cliques,
        hyperplanes,
        clique_class,
        sector_of,
        edge_class,
        report: ParacliqueReport {
            gate_failures: Vec::new(),
            triangle_failures: 0,
            diamonds: 0,
            transitivity_violations: Vec::new(),
            bijection_failures: Vec::new(),
            sector_count_failures: Vec::new(),
            clique_gated: true,
            paraclique: true,
        },
        witness: OnceLock::new(),
    };
    walls.report = paraclique_report(g, &walls);
    walls
}

/// Components of `g` after deleting `edges`, ordered by smallest vertex.
fn sectors_without(
    g: &BallGraph,
    edges: &[(VertexId, VertexId)],
) -> (Vec<Vec<VertexId>>, Vec<SectorId>) {
    let n = g.len();
    let removed = |a: VertexId, b: VertexId| {
        let key = if a < b { (a, b) } else { (b, a) };
        edges.binary_search(&key).is_ok()
    };
    let mut label = vec![SectorId::MAX; n];
    let mut sectors = Vec::new();
    for s in 0..n {
        if label[s] != SectorId::MAX {
            continue;
        }
        let id = sectors.len() as SectorId;
        let mut comp = vec![s];
        label[s] = id;
        let mut k = 0;
        while k < comp.len() {
            let v = comp[k];
            for &w in g.neighbors(v) {
                if label[w] == SectorId::MAX && !removed(v, w) {
                    label[w] = id;
                    comp.push(w);
                }
            }
            k += 1;
        }
        comp.sort_unstable();
        sectors.push(comp);
    }
    (sectors, label)
}

fn paraclique_report(g: &BallGraph, w: &Walls) -> ParacliqueReport {
    let n = g.len();

    // every clique gated from every vertex whose distances to it are exact
    let gate_failures: Vec<(usize, VertexId)> = par::map_slice(&w.cliques, |c| {
        (0..n)
            .filter(|&x| c.vertices.iter().all(|&v| g.is_safe_pair(x, v)))
            .filter(|&x| g.gate(x, &c.vertices).is_err())
            .map(|x| (c.id, x))
            .collect::<Vec<_>>()
    })
    .into_iter()
    .flatten()
    .collect();

    // triangle condition: d(u,v) = d(u,w) = k, v ~ w  =>  a common neighbour at k-1
    let triangle_failures: usize = par::map_range(n, |u| {
        let du = g.dist_row(u);
        let mut bad = 0;
        for v in 0..n {
            let k = du[v];
            if k < 2 || !g.is_safe_pair(u, v) {
                continue;
            }
            for &x in g.neighbors(v) {
                if x <= v || du[x] != k || !g.is_safe_pair(u, x) {
                    continue;
                }
                let ok = g
                    .neighbors(v)
                    .iter()
                    .any(|&y| du[y] == k - 1 && g.adjacent(y, x));
                if !ok {
                    bad += 1;
                }
            }
        }
        bad
    })
    .into_iter()
    .sum();

    // induced K4 minus an edge: two triangles sharing exactly one edge
    let diamonds: usize = par::map_range(n, |a| {
        let mut count = 0;
        if g.margin(a) < INTERIOR_MARGIN {
            return 0;
        }
        for &b in g.neighbors(a) {
            if b <= a || g.margin(b) < INTERIOR_MARGIN {
                continue;
            }
            let common: Vec<VertexId> = g
                .neighbors(a)
                .iter()
                .copied()
                .filter(|&c| g.adjacent(b, c) && g.margin(c) >= INTERIOR_MARGIN)
                .collect();
            for (i, &c) in common.iter().enumerate() {
                for &d in &common[i + 1..] {
                    if !g.adjacent(c, d) {
                        count += 1;
                    }
                }
            }
        }
        count
    })
    .into_iter()
    .sum();

    // transitivity: safe pairs inside one class must be parallel
    let transitivity_violations: Vec<(usize, usize)> = par::map_slice(&w.hyperplanes, |h| {
        let mut bad = Vec::new();
        for (i, &c1) in h.cliques.iter().enumerate() {
            for &c2 in &h.cliques[i + 1..] {
                let (a, b) = (&w.cliques[c1].vertices, &w.cliques[c2].vertices);
                if cliques_safe(g, a, b)
                    && !matches!(clique_pair_relation(g, a, b), CliqueRelation::Parallel(_))
                {
                    bad.push((c1, c2));
                }
            }
        }
        bad
    })
    .into_iter()
    .flatten()
    .collect();

    // gate-preimage bijection on non-truncated hyperplanes
    let per_h: Vec<(Vec<(HyperplaneId, usize, VertexId)>, bool)> =
        par::map_slice(&w.hyperplanes, |h| {
            let mut bad = Vec::new();
            let mut count_bad = false;
            if h.truncated {
                return (bad, count_bad);
            }
            let labels = &w.sector_of[h.id];
            for &c in &h.cliques {
                let vs = &w.cliques[c].vertices;
                if !clique_interior(g, vs) {
                    continue;
                }
                let distinct: BTreeSet<SectorId> = vs.iter().map(|&v| labels[v]).collect();
                if distinct.len() != vs.len() || h.sectors.len() != vs.len() {
                    count_bad = true;
                }
                for y in 0..n {
                    if !vs.iter().all(|&v| g.is_safe_pair(y, v)) {
                        continue;
                    }
                    // the sector of y is only known exactly when a geodesic
                    // from y to its gate stays clear of the frontier
                    let dy = vs.iter().map(|&v| g.dist(y, v)).min().unwrap();
                    if g.margin(y) < dy + 1 {
                        continue;
                    }
                    if let Ok(p) = g.gate(y, vs) {
                        if labels[p] != labels[y] {
                            bad.push((h.id, c, y));
                        }
                    }
                }
            }
            (bad, count_bad)
        });
    let mut bijection_failures = Vec::new();
    let mut sector_count_failures = Vec::new();
    for (h, (bad, count_bad)) in per_h.into_iter().enumerate() {
        bijection_failures.extend(bad);
        if count_bad {
            sector_count_failures.push(h);
        }
    }

    let clique_gated = gate_failures.is_empty() && triangle_failures == 0 && diamonds == 0;
    let paraclique = clique_gated && transitivity_violations.is_empty();
    ParacliqueReport {
        gate_failures,
        triangle_failures,
        diamonds,
        transitivity_violations,
        bijection_failures,
        sector_count_failures,
        clique_gated,
        paraclique,
    }
}

impl Walls {
    pub fn len(&self) -> usize {
        self.hyperplanes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hyperplanes.is_empty()
    }

    /// `Err(NotParaclique)` when the interior of the graph violates the axioms.
    pub fn ensure_paraclique(&self) -> Result<()> {
        let r = &self.report;
        if r.paraclique {
            return Ok(());
        }
        let reason = if !r.gate_failures.is_empty() {
            let (c, x) = r.gate_failures[0];
            format!("clique {c} has no gate from vertex {x}")
        } else if r.triangle_failures > 0 {
            format!("{} violations of the triangle condition", r.triangle_failures)
        } else if r.diamonds > 0 {
            format!("{} pairs of triangles share exactly one edge", r.diamonds)
        } else {
            let (a, b) = r.transitivity_violations[0];
            format!("cliques {a} and {b} share a class but are not parallel")
        };
        Err(Error::NotParaclique(reason))
    }

    pub fn sector_of(&self, h: HyperplaneId, v: VertexId) -> SectorId {
        self.sector_of[h][v]
    }

    /// Sector labels of every vertex for hyperplane `h`.
    pub fn sector_labels(&self, h: HyperplaneId) -> &[SectorId] {
        &self.sector_of[h]
    }

    /// Hyperplane containing the edge `a - b`, if it is an edge.
    pub fn edge_hyperplane(&self, a: VertexId, b: VertexId) -> Option<HyperplaneId> {
        let key = if a < b { (a, b) } else { (b, a) };
        self.edge_class.get(&key).copied()
    }

    /// Hyperplanes with `x` and `y` in different sectors, ascending.
    pub fn separating_hyperplanes(&self, x: VertexId, y: VertexId) -> Vec<HyperplaneId> {
        (0..self.len())
            .filter(|&h| self.sector_of[h][x] != self.sector_of[h][y])
            .collect()
    }

    /// Transverse / nested verdict, cross-checked against the equivalent
    /// characterisations of nesting through a pair of antipodal cliques.
    pub fn classify_pair(
        &self,
        g: &BallGraph,
        h: HyperplaneId,
        k: HyperplaneId,
    ) -> Result<PairVerdict> {
        if h >= self.len() || k >= self.len() || h == k {
            return Err(Error::InvalidGraph(format!("invalid hyperplane pair ({h}, {k})")));
        }
        let truncated = self.hyperplanes[h].truncated || self.hyperplanes[k].truncated;
        let relation = self.relation(h, k);
        if !truncated {
            self.cross_check(g, h, k, relation)?;
        }
        Ok(PairVerdict {
            relation,
            truncated,
        })
    }

    /// Sector incidence matrix `inc[a][b]`: sector `a` of `h` meets sector `b` of `k`.
    fn incidence(&self, h: HyperplaneId, k: HyperplaneId) -> Vec<Vec<bool>> {
        let (sh, sk) = (&self.sector_of[h], &self.sector_of[k]);
        let mut inc =
            vec![vec![false; self.hyperplanes[k].sectors.len()]; self.hyperplanes[h].sectors.len()];
        for (a, b) in sh.iter().zip(sk) {
            inc[*a as usize][*b as usize] = true;
        }
        inc
    }

    fn relation(&self, h: HyperplaneId, k: HyperplaneId) -> PairRelation {
        let inc = self.incidence(h, k);
        if inc.iter().all(|row| row.iter().all(|&x| x)) {
            return PairRelation::Transverse;
        }
        let (nh, nk) = (inc.len(), inc[0].len());
        // sector c of k lies in sector a of h iff its column meets only row a
        for a in 0..nh {
            for b in 0..nk {
                let k_ok = (0..nk)
                    .filter(|&c| c != b)
                    .all(|c| (0..nh).all(|r| r == a || !inc[r][c]));
                let h_ok = (0..nh)
                    .filter(|&c| c != a)
                    .all(|c| (0..nk).all(|r| r == b || !inc[c][r]));
                if k_ok && h_ok {
                    return PairRelation::Nested {
                        a: a as SectorId,
                        b: b as SectorId,
                    };
                }
            }
        }
        PairRelation::Undetermined
    }

    /// Closest antipodal pair of cliques between the two classes, interior only.
    fn antipodal_witness(
        &self,
        g: &BallGraph,
        h: HyperplaneId,
        k: HyperplaneId,
    ) -> Option<(usize, usize, VertexId, VertexId)> {
        let mut best: Option<(u32, usize, usize, VertexId, VertexId)> = None;
        for &ch in &self.hyperplanes[h].cliques {
            let vh = &self.cliques[ch].vertices;
            if !clique_interior(g, vh) {
                continue;
            }
            for &ck in &self.hyperplanes[k].cliques {
                let vk = &self.cliques[ck].vertices;
                if !clique_interior(g, vk) || !cliques_safe(g, vh, vk) {
                    continue;
                }
                if let CliqueRelation::Antipodal(x, y) = clique_pair_relation(g, vh, vk) {
                    let d = g.dist(x, y);
                    if best.is_none_or(|b| d < b.0) {
                        best = Some((d, ch, ck, x, y));
                    }
                }
            }
        }
        best.map(|(_, ch, ck, x, y)| (ch, ck, x, y))
    }

    fn cross_check(
        &self,
        g: &BallGraph,
        h: HyperplaneId,
        k: HyperplaneId,
        relation: PairRelation,
    ) -> Result<()> {
        if relation == PairRelation::Undetermined {
            return Err(Error::InternalInconsistency(format!(
                "hyperplanes {h} and {k} are neither transverse nor nested"
            )));
        }
        let Some((ch, ck, x, y)) = self.antipodal_witness(g, h, k) else {
            return Ok(());
        };
        let (sh, sk) = (&self.sector_of[h], &self.sector_of[k]);
        let xt = *self.cliques[ch].vertices.iter().find(|&&v| v != x).unwrap();
        let yt = *self.cliques[ck].vertices.iter().find(|&&v| v != y).unwrap();
        let verts_h: Vec<VertexId> = self.hyperplane_vertices(h);
        let verts_k: Vec<VertexId> = self.hyperplane_vertices(k);
        // (i) h lies in the sector of k at y; (ii) k lies in the sector of h at x
        let c1 = verts_h.iter().all(|&v| sk[v] == sk[y]);
        let c2 = verts_k.iter().all(|&v| sh[v] == sh[x]);
        // (iii) the sector of h at x~ misses the sector of k at y~
        let c3 = (0..g.len()).all(|v| !(sh[v] == sh[xt] && sk[v] == sk[yt]));
        // (iv) the sector of h at x contains the sector of k at y~
        let c4 = (0..g.len()).all(|v| sk[v] != sk[yt] || sh[v] == sh[x]);
        let nested = matches!(relation, PairRelation::Nested { .. });
        if [c1, c2, c3, c4].iter().any(|&c| c != nested) {
            return Err(Error::InternalInconsistency(format!(
                "nesting criteria disagree for hyperplanes {h} and {k}: \
                 verdict nested={nested}, criteria ({c1}, {c2}, {c3}, {c4})"
            )));
        }
        Ok(())
    }

    /// Vertices of all cliques of a hyperplane, sorted.
    pub fn hyperplane_vertices(&self, h: HyperplaneId) -> Vec<VertexId> {
        let mut vs: Vec<VertexId> = self.hyperplanes[h]
            .cliques
            .iter()
            .flat_map(|&c| self.cliques[c].vertices.iter().copied())
            .collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }

    /// `witness[h][k]`: smallest radius around the root within which every
    /// sector pair of `h` and `k` is populated, [`u32::MAX`] when they are not
    /// transverse in the ball.
    fn witness_table(&self, g: &BallGraph) -> &Vec<Vec<u32>> {
        self.witness.get_or_init(|| {
            let nh = self.len();
            par::map_range(nh, |h| {
                (0..nh)
                    .map(|k| if h == k { NEVER } else { self.witness_radius(g, h, k) })
                    .collect()
            })
        })
    }

    fn witness_radius(&self, g: &BallGraph, h: HyperplaneId, k: HyperplaneId) -> u32 {
        let (sh, sk) = (&self.sector_of[h], &self.sector_of[k]);
        let (nh, nk) = (self.hyperplanes[h].sectors.len(), self.hyperplanes[k].sectors.len());
        if nh < 2 || nk < 2 {
            return NEVER;
        }
        let mut depth = vec![NEVER; nh * nk];
        for v in 0..g.len() {
            let slot = &mut depth[sh[v] as usize * nk + sk[v] as usize];
            *slot = (*slot).min(g.depth(v));
        }
        depth.into_iter().max().unwrap()
    }

    /// True when `h` and `k` are transverse in the ball.
    pub fn transverse(&self, g: &BallGraph, h: HyperplaneId, k: HyperplaneId) -> bool {
        h != k && self.witness_table(g)[h][k] != NEVER
    }

    /// Hyperplanes transverse to both `h` and `k`.
    ///
    /// The count is a lower bound when either hyperplane is truncated, or
    /// when some transversal is only witnessed within two steps of the
    /// frontier, so that a larger ball can still change the count.
    pub fn common_transversals(&self, g: &BallGraph, h: HyperplaneId, k: HyperplaneId) -> Transversals {
        let table = self.witness_table(g);
        let limit = g.radius().map(|r| r.saturating_sub(INTERIOR_MARGIN)).unwrap_or(u32::MAX);
        let mut count = 0;
        let mut late = false;
        for t in 0..self.len() {
            if t == h || t == k {
                continue;
            }
            let (a, b) = (table[h][t], table[k][t]);
            if a != NEVER && b != NEVER {
                count += 1;
                if a.max(b) > limit {
                    late = true;
                }
            }
        }
        Transversals {
            count,
            lower_bound_only: self.hyperplanes[h].truncated || self.hyperplanes[k].truncated || late,
        }
    }

    /// Hyperplanes transverse to both `h` and `k` whose sector pairs with
    /// each of them are all populated within depth `r`.
    pub fn transversals_within(&self, g: &BallGraph, h: HyperplaneId, k: HyperplaneId, r: u32) -> usize {
        let table = self.witness_table(g);
        (0..self.len())
            .filter(|&t| t != h && t != k)
            .filter(|&t| table[h][t] != NEVER && table[k][t] != NEVER)
            .filter(|&t| table[h][t].max(table[k][t]) <= r)
            .count()
    }

    /// Non-truncated hyperplanes transverse to both `h` and `k`.
    pub fn interior_transversals(&self, g: &BallGraph, h: HyperplaneId, k: HyperplaneId) -> usize {
        let table = self.witness_table(g);
        (0..self.len())
            .filter(|&t| t != h && t != k && !self.hyperplanes[t].truncated)
            .filter(|&t| table[h][t] != NEVER && table[k][t] != NEVER)
            .count()
    }

    /// Smallest depth of a vertex on an edge of `h`.
    pub fn root_distance(&self, g: &BallGraph, h: HyperplaneId) -> u32 {
        self.hyperplanes[h]
            .edges
            .iter()
            .map(|&(a, b)| g.depth(a).min(g.depth(b)))
            .min()
            .unwrap_or(u32::MAX)
    }

    /// Hyperplanes crossed by a geodesic, in order, with the sectors exited
    /// and entered.
    pub fn crossing_signature(&self, g: &BallGraph, p: &Path) -> Result<Vec<Crossing>> {
        if !g.is_geodesic(p)? {
            return Err(Error::NotGeodesic);
        }
        let mut out = Vec::with_capacity(p.len());
        let mut seen = BTreeSet::new();
        for (a, b) in p.edges() {
            let h = self
                .edge_hyperplane(a, b)
                .ok_or_else(|| Error::InternalInconsistency(format!("edge {a}-{b} has no class")))?;
            if !seen.insert(h) && g.is_safe_pair(p.first(), p.last()) {
                return Err(Error::InternalInconsistency(format!(
                    "geodesic crosses hyperplane {h} twice"
                )));
            }
            out.push(Crossing {
                hyperplane: h,
                exit: self.sector_of[h][a],
                enter: self.sector_of[h][b],
            });
        }
        Ok(out)
    }
}
