//! Finite rooted graphs with exact hop-metric primitives.
//!
//! A [`BallGraph`] is either a radius-`R` ball of some infinite graph (in which
//! case every vertex carries a *margin* `R - d(root, v)`, its distance to the
//! truncation frontier) or an ordinary finite graph with unbounded margins.

use std::collections::{HashMap, VecDeque};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par;

pub type VertexId = usize;

/// Margin reported for every vertex of a finite (non-ball) graph.
pub const UNBOUNDED: u32 = u32::MAX;

/// Sentinel for "unreachable" inside distance rows; never escapes a connected graph.
const FAR: u32 = u32::MAX;

/// Above this vertex count distance rows are computed lazily.
pub const DENSE_LIMIT: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Extent {
    /// Ball of the given radius around the root.
    Ball(u32),
    /// A finite graph taken as is.
    Finite,
}

/// All-pairs hop distances, one breadth-first row per source vertex.
///
/// Rows are filled eagerly for graphs up to [`DENSE_LIMIT`] vertices and on
/// first use otherwise. Either way each row is computed at most once.
#[derive(Debug)]
struct DistanceTable {
    rows: Vec<OnceLock<Box<[u32]>>>,
}

impl DistanceTable {
    fn new(adj: &[Vec<VertexId>]) -> Self {
        let n = adj.len();
        let rows: Vec<OnceLock<Box<[u32]>>> = (0..n).map(|_| OnceLock::new()).collect();
        if n <= DENSE_LIMIT {
            let filled = par::map_range(n, |s| bfs(adj, s));
            for (cell, row) in rows.iter().zip(filled) {
                let _ = cell.set(row);
            }
        }
        DistanceTable { rows }
    }

    fn row<'a>(&'a self, adj: &[Vec<VertexId>], s: VertexId) -> &'a [u32] {
        self.rows[s].get_or_init(|| bfs(adj, s))
    }
}

fn bfs(adj: &[Vec<VertexId>], s: VertexId) -> Box<[u32]> {
    let mut dist = vec![FAR; adj.len()];
    let mut queue = VecDeque::new();
    dist[s] = 0;
    queue.push_back(s);
    while let Some(v) = queue.pop_front() {
        let next = dist[v] + 1;
        for &w in &adj[v] {
            if dist[w] == FAR {
                dist[w] = next;
                queue.push_back(w);
            }
        }
    }
    dist.into_boxed_slice()
}

/// A vertex sequence in which consecutive entries are adjacent.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Path {
    pub vertices: Vec<VertexId>,
}

impl Path {
    pub fn new(vertices: Vec<VertexId>) -> Self {
        Path { vertices }
    }

    pub fn trivial(v: VertexId) -> Self {
        Path { vertices: vec![v] }
    }

    /// Number of edges.
    pub fn len(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn first(&self) -> VertexId {
        self.vertices[0]
    }

    pub fn last(&self) -> VertexId {
        *self.vertices.last().expect("path has at least one vertex")
    }

    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.vertices.windows(2).map(|w| (w[0], w[1]))
    }

    /// Path followed by `other`, which must start where this one ends.
    pub fn concat(&self, other: &Path) -> Path {
        debug_assert_eq!(self.last(), other.first());
        let mut vertices = self.vertices.clone();
        vertices.extend_from_slice(&other.vertices[1..]);
        Path { vertices }
    }
}

/// Result of [`BallGraph::enumerate_geodesics`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Geodesics {
    pub paths: Vec<Path>,
    /// More geodesics exist than were returned.
    pub overflow: bool,
}

#[derive(Debug)]
pub struct BallGraph {
    labels: Vec<String>,
    index: HashMap<String, VertexId>,
    adj: Vec<Vec<VertexId>>,
    root: VertexId,
    extent: Extent,
    depth: Vec<u32>,
    dist: DistanceTable,
}

impl Clone for BallGraph {
    fn clone(&self) -> Self {
        let edges = self.edge_list();
        BallGraph::new(self.labels.clone(), &edges, self.root, self.extent)
            .expect("cloning a valid graph")
    }
}

impl PartialEq for BallGraph {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels
            && self.adj == other.adj
            && self.root == other.root
            && self.extent == other.extent
    }
}

impl BallGraph {
    /// Builds and validates a graph. Vertex indices follow `labels`.
    pub fn new(
        labels: Vec<String>,
        edges: &[(VertexId, VertexId)],
        root: VertexId,
        extent: Extent,
    ) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::InvalidGraph("graph has no vertices".into()));
        }
        if root >= n {
            return Err(Error::InvalidVertex(root));
        }
        let mut index = HashMap::with_capacity(n);
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(Error::InvalidGraph(format!("duplicate label `{l}`")));
            }
        }
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in edges {
            if a >= n {
                return Err(Error::InvalidVertex(a));
            }
            if b >= n {
                return Err(Error::InvalidVertex(b));
            }
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop at `{}`", labels[a])));
            }
            adj[a].push(b);
            adj[b].push(a);
        }
        for (v, nbrs) in adj.iter_mut().enumerate() {
            nbrs.sort_unstable();
            let before = nbrs.len();
            nbrs.dedup();
            if nbrs.len() != before {
                return Err(Error::InvalidGraph(format!(
                    "multiple edges at `{}`",
                    labels[v]
                )));
            }
        }
        let depth_row = bfs(&adj, root);
        if depth_row.iter().any(|&d| d == FAR) {
            return Err(Error::InvalidGraph("graph is not connected".into()));
        }
        if let Extent::Ball(r) = extent {
            if let Some(v) = depth_row.iter().position(|&d| d > r) {
                return Err(Error::InvalidGraph(format!(
                    "vertex `{}` lies outside the ball of radius {r}",
                    labels[v]
                )));
            }
        }
        let dist = DistanceTable::new(&adj);
        Ok(BallGraph {
            labels,
            index,
            adj,
            root,
            extent,
            depth: depth_row.into_vec(),
            dist,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn root(&self) -> VertexId {
        self.root
    }

    pub fn extent(&self) -> Extent {
        self.extent
    }

    /// Ball radius, `None` for a finite graph.
    pub fn radius(&self) -> Option<u32> {
        match self.extent {
            Extent::Ball(r) => Some(r),
            Extent::Finite => None,
        }
    }

    pub fn label(&self, v: VertexId) -> &str {
        &self.labels[v]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn vertex(&self, label: &str) -> Result<VertexId> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.adj[v]
    }

    pub fn adjacent(&self, a: VertexId, b: VertexId) -> bool {
        self.adj[a].binary_search(&b).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edges `(a, b)` with `a < b`, sorted.
    pub fn edge_list(&self) -> Vec<(VertexId, VertexId)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (a, nbrs) in self.adj.iter().enumerate() {
            for &b in nbrs {
                if a < b {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// `d(root, v)`.
    pub fn depth(&self, v: VertexId) -> u32 {
        self.depth[v]
    }

    /// Distance to the truncation frontier: `radius - d(root, v)`.
    pub fn margin(&self, v: VertexId) -> u32 {
        match self.extent {
            Extent::Ball(r) => r - self.depth[v],
            Extent::Finite => UNBOUNDED,
        }
    }

    /// True when the ball distance between `x` and `y` provably equals the
    /// distance in the ambient graph: some geodesic realizing it cannot leave
    /// the ball.
    pub fn is_safe_pair(&self, x: VertexId, y: VertexId) -> bool {
        let d = self.dist(x, y);
        self.margin(x) >= d || self.margin(y) >= d
    }

    /// True when the ball distance is the ambient distance. A shorter ambient
    /// path would have to reach depth `radius + 1`, so it has length at least
    /// `margin(x) + margin(y) + 2`.
    pub fn is_exact_pair(&self, x: VertexId, y: VertexId) -> bool {
        let d = self.dist(x, y) as u64;
        d <= self.margin(x) as u64 + self.margin(y) as u64 + 2
    }

    fn check(&self, v: VertexId) -> Result<()> {
        if v < self.len() {
            Ok(())
        } else {
            Err(Error::InvalidVertex(v))
        }
    }

    /// Unchecked distance lookup; panics on an out-of-range vertex.
    #[inline]
    pub fn dist(&self, x: VertexId, y: VertexId) -> u32 {
        self.dist.row(&self.adj, x)[y]
    }

    /// Breadth-first distance row of `x`.
    pub fn dist_row(&self, x: VertexId) -> &[u32] {
        self.dist.row(&self.adj, x)
    }

    pub fn distance(&self, x: VertexId, y: VertexId) -> Result<u32> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.dist(x, y))
    }

    /// Vertices lying on some geodesic from `x` to `y`, ascending.
    pub fn interval(&self, x: VertexId, y: VertexId) -> Result<Vec<VertexId>> {
        self.check(x)?;
        self.check(y)?;
        let dx = self.dist_row(x);
        let dy = self.dist_row(y);
        let total = dx[y];
        Ok((0..self.len()).filter(|&z| dx[z] + dy[z] == total).collect())
    }

    /// All geodesics from `x` to `y` when there are at most `limit`, else the
    /// first `limit` in lexicographic order of neighbor indices.
    pub fn enumerate_geodesics(&self, x: VertexId, y: VertexId, limit: usize) -> Result<Geodesics> {
        self.check(x)?;
        self.check(y)?;
        let limit = limit.max(1);
        let dy = self.dist_row(y);
        let mut paths = Vec::new();
        let mut overflow = false;
        let mut stack = vec![x];
        self.geodesic_dfs(dy, y, &mut stack, &mut paths, limit, &mut overflow);
        Ok(Geodesics { paths, overflow })
    }

    fn geodesic_dfs(
        &self,
        dy: &[u32],
        target: VertexId,
        stack: &mut Vec<VertexId>,
        out: &mut Vec<Path>,
        limit: usize,
        overflow: &mut bool,
    ) {
        if *overflow {
            return;
        }
        let cur = *stack.last().unwrap();
        if cur == target {
            if out.len() == limit {
                *overflow = true;
            } else {
                out.push(Path::new(stack.clone()));
            }
            return;
        }
        for &w in &self.adj[cur] {
            if dy[w] + 1 == dy[cur] {
                stack.push(w);
                self.geodesic_dfs(dy, target, stack, out, limit, overflow);
                stack.pop();
                if *overflow {
                    return;
                }
            }
        }
    }

    /// One geodesic from `x` to `y`: the lexicographically first one.
    pub fn geodesic(&self, x: VertexId, y: VertexId) -> Path {
        let dy = self.dist_row(y);
        let mut cur = x;
        let mut vertices = vec![x];
        while cur != y {
            cur = *self.adj[cur]
                .iter()
                .find(|&&w| dy[w] + 1 == dy[cur])
                .expect("connected graph always has a descending neighbor");
            vertices.push(cur);
        }
        Path::new(vertices)
    }

    /// Gate of `x` in `set`: the vertex `p` with `d(x,p) + d(p,y) = d(x,y)` for
    /// every `y` in the set.
    pub fn gate(&self, x: VertexId, set: &[VertexId]) -> Result<VertexId> {
        self.check(x)?;
        if set.is_empty() {
            return Err(Error::NotGated(x));
        }
        for &y in set {
            self.check(y)?;
        }
        let dx = self.dist_row(x);
        let mut best = set[0];
        for &y in &set[1..] {
            if dx[y] < dx[best] || (dx[y] == dx[best] && y < best) {
                best = y;
            }
        }
        let dp = self.dist_row(best);
        if set.iter().all(|&y| dx[best] + dp[y] == dx[y]) {
            Ok(best)
        } else {
            Err(Error::NotGated(x))
        }
    }

    /// Checks that consecutive vertices are adjacent.
    pub fn check_walk(&self, p: &Path) -> Result<()> {
        if p.is_empty() {
            return Err(Error::InvalidGraph("empty path".into()));
        }
        for &v in &p.vertices {
            self.check(v)?;
        }
        for (a, b) in p.edges() {
            if !self.adjacent(a, b) {
                return Err(Error::NotAWalk(a, b));
            }
        }
        Ok(())
    }

    pub fn is_geodesic(&self, p: &Path) -> Result<bool> {
        self.check_walk(p)?;
        Ok(p.len() as u32 == self.dist(p.first(), p.last()))
    }

    /// Parses the edge-list text format: a `root <label>` line followed by one
    /// `label1 label2` pair per line. Blank lines and `#` comments are ignored.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut root_label: Option<String> = None;
        let mut labels: Vec<String> = Vec::new();
        let mut index: HashMap<String, VertexId> = HashMap::new();
        let mut edges = Vec::new();
        let mut intern = |l: &str, labels: &mut Vec<String>| -> VertexId {
            if let Some(&i) = index.get(l) {
                return i;
            }
            labels.push(l.to_string());
            index.insert(l.to_string(), labels.len() - 1);
            labels.len() - 1
        };
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            if root_label.is_none() {
                if toks.len() != 2 || toks[0] != "root" {
                    return Err(Error::Parse {
                        line: no + 1,
                        message: "expected `root <label>`".into(),
                    });
                }
                root_label = Some(toks[1].to_string());
                intern(toks[1], &mut labels);
                continue;
            }
            if toks.len() != 2 {
                return Err(Error::Parse {
                    line: no + 1,
                    message: format!("expected two labels, found {}", toks.len()),
                });
            }
            let a = intern(toks[0], &mut labels);
            let b = intern(toks[1], &mut labels);
            edges.push((a, b));
        }
        if root_label.is_none() {
            return Err(Error::Parse {
                line: 0,
                message: "missing `root <label>` line".into(),
            });
        }
        // the root was interned first
        BallGraph::new(labels, &edges, 0, Extent::Finite)
    }

    /// Serializable form used by the JSON graph format and the ball cache.
    pub fn to_record(&self) -> GraphRecord {
        GraphRecord {
            root: self.labels[self.root].clone(),
            radius: self.radius(),
            labels: self.labels.clone(),
            edges: self.edge_list(),
        }
    }

    pub fn from_record(rec: &GraphRecord) -> Result<Self> {
        let root = rec
            .labels
            .iter()
            .position(|l| *l == rec.root)
            .ok_or_else(|| Error::UnknownLabel(rec.root.clone()))?;
        let extent = match rec.radius {
            Some(r) => Extent::Ball(r),
            None => Extent::Finite,
        };
        BallGraph::new(rec.labels.clone(), &rec.edges, root, extent)
    }

    /// Induced subgraph on `keep` (which must contain the root and be connected).
    pub fn induced(&self, keep: &[VertexId], extent: Extent) -> Result<(BallGraph, Vec<VertexId>)> {
        let mut map = vec![usize::MAX; self.len()];
        for (i, &v) in keep.iter().enumerate() {
            map[v] = i;
        }
        if map[self.root] == usize::MAX {
            return Err(Error::InvalidGraph("induced subgraph must contain the root".into()));
        }
        let labels = keep.iter().map(|&v| self.labels[v].clone()).collect();
        let edges: Vec<_> = self
            .edge_list()
            .into_iter()
            .filter(|&(a, b)| map[a] != usize::MAX && map[b] != usize::MAX)
            .map(|(a, b)| (map[a], map[b]))
            .collect();
        let g = BallGraph::new(labels, &edges, map[self.root], extent)?;
        Ok((g, keep.to_vec()))
    }

    /// Sub-ball of radius `r` around the root.
    pub fn sub_ball(&self, r: u32) -> Result<(BallGraph, Vec<VertexId>)> {
        let keep: Vec<VertexId> = (0..self.len()).filter(|&v| self.depth[v] <= r).collect();
        self.induced(&keep, Extent::Ball(r))
    }
}

/// JSON graph format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphRecord {
    pub root: String,
    pub radius: Option<u32>,
    pub labels: Vec<String>,
    pub edges: Vec<(VertexId, VertexId)>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> BallGraph {
        let labels = (0..n).map(|i| i.to_string()).collect();
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        BallGraph::new(labels, &edges, 0, Extent::Finite).unwrap()
    }

    fn path_graph(n: usize) -> BallGraph {
        let labels = (0..n).map(|i| i.to_string()).collect();
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        BallGraph::new(labels, &edges, 0, Extent::Finite).unwrap()
    }

    #[test]
    fn distance_identity_and_errors() {
        let g = cycle(5);
        assert_eq!(g.distance(3, 3).unwrap(), 0);
        assert_eq!(g.distance(0, 2).unwrap(), 2);
        assert_eq!(g.distance(0, 9), Err(Error::InvalidVertex(9)));
    }

    #[test]
    fn gate_on_four_cycle_is_not_gated() {
        let g = cycle(4);
        // 1 is adjacent to both 0 and 2
        assert_eq!(g.gate(1, &[0, 2]), Err(Error::NotGated(1)));
        assert_eq!(g.gate(0, &[0, 2]).unwrap(), 0);
    }

    #[test]
    fn walk_checks() {
        let g = cycle(4);
        assert!(g.is_geodesic(&Path::new(vec![0, 1])).unwrap());
        assert!(!g.is_geodesic(&Path::new(vec![0, 1, 2, 3])).unwrap());
        assert_eq!(
            g.is_geodesic(&Path::new(vec![0, 2])),
            Err(Error::NotAWalk(0, 2))
        );
    }

    #[test]
    fn geodesic_enumeration_overflow() {
        let g = cycle(4);
        let all = g.enumerate_geodesics(0, 2, 10).unwrap();
        assert_eq!(all.paths.len(), 2);
        assert!(!all.overflow);
        let one = g.enumerate_geodesics(0, 2, 1).unwrap();
        assert_eq!(one.paths, vec![Path::new(vec![0, 1, 2])]);
        assert!(one.overflow);
        let trivial = g.enumerate_geodesics(3, 3, 5).unwrap();
        assert_eq!(trivial.paths, vec![Path::trivial(3)]);
    }

    #[test]
    fn rejects_bad_graphs() {
        let labels = vec!["a".to_string(), "b".to_string(), "c".to_string()];
        assert!(matches!(
            BallGraph::new(labels.clone(), &[(0, 1)], 0, Extent::Finite),
            Err(Error::InvalidGraph(_))
        ));
        assert!(matches!(
            BallGraph::new(labels.clone(), &[(0, 1), (1, 2), (1, 0)], 0, Extent::Finite),
            Err(Error::InvalidGraph(_))
        ));
        assert!(matches!(
            BallGraph::new(labels, &[(0, 0), (1, 2)], 0, Extent::Finite),
            Err(Error::InvalidGraph(_))
        ));
    }

    #[test]
    fn parse_edge_list_format() {
        let text = "# a triangle with a tail\nroot x\n\nx y\ny z # comment\nz x\nz w\n";
        let g = BallGraph::parse_edge_list(text).unwrap();
        assert_eq!(g.len(), 4);
        assert_eq!(g.label(g.root()), "x");
        assert_eq!(g.distance(g.vertex("x").unwrap(), g.vertex("w").unwrap()).unwrap(), 2);
        assert!(matches!(
            BallGraph::parse_edge_list("x y\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            BallGraph::parse_edge_list("root x\nx y z\n"),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn margins_and_safe_pairs() {
        let g = path_graph(4);
        let (ball, _) = g.sub_ball(2).unwrap();
        assert_eq!(ball.len(), 3);
        assert_eq!(ball.margin(0), 2);
        assert_eq!(ball.margin(2), 0);
        assert!(ball.is_safe_pair(0, 2));
        assert_eq!(g.margin(3), UNBOUNDED);
    }

    #[test]
    fn record_roundtrip() {
        let g = cycle(6);
        let back = BallGraph::from_record(&g.to_record()).unwrap();
        assert_eq!(g, back);
    }
}
