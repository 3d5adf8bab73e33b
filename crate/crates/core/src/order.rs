//! The graph order at the root: `x <= y` iff `x` lies on a geodesic from the
//! root to `y`. Meets and minimal upper bounds.
//!
//! Every geodesic from the root to a ball vertex stays in the ball, so `leq`
//! is exact on the whole ball and the brute-force meet is always available.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{BallGraph, VertexId};
use crate::walls::Walls;

pub struct OrderContext<'a> {
    pub graph: &'a BallGraph,
    walls: Option<&'a Walls>,
    /// Enables the gate algorithm for meets.
    quasi_median: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UpperBounds {
    /// Minimal common upper bounds found in the ball, ascending.
    pub minimal: Vec<VertexId>,
    /// A minimal upper bound could lie outside the ball.
    pub frontier: bool,
}

impl<'a> OrderContext<'a> {
    /// Brute-force context.
    pub fn new(graph: &'a BallGraph) -> Self {
        OrderContext {
            graph,
            walls: None,
            quasi_median: false,
        }
    }

    /// Context whose meets use the hyperplane gate algorithm, cross-checked
    /// against brute force. Requires a paraclique graph.
    pub fn quasi_median(graph: &'a BallGraph, walls: &'a Walls) -> Result<Self> {
        walls.ensure_paraclique()?;
        Ok(OrderContext {
            graph,
            walls: Some(walls),
            quasi_median: true,
        })
    }

    pub fn leq(&self, x: VertexId, y: VertexId) -> bool {
        let g = self.graph;
        g.depth(x) + g.dist(x, y) == g.depth(y)
    }

    fn check(&self, v: VertexId) -> Result<()> {
        if v < self.graph.len() {
            Ok(())
        } else {
            Err(Error::InvalidVertex(v))
        }
    }

    /// Common lower bounds of `set`, ascending.
    pub fn lower_bounds(&self, set: &[VertexId]) -> Vec<VertexId> {
        (0..self.graph.len())
            .filter(|&x| set.iter().all(|&s| self.leq(x, s)))
            .collect()
    }

    /// Greatest lower bound by scanning all common lower bounds.
    pub fn meet_brute_force(&self, set: &[VertexId]) -> Result<VertexId> {
        if set.is_empty() {
            return Err(Error::NoMeet("empty set".into()));
        }
        for &s in set {
            self.check(s)?;
        }
        let lower = self.lower_bounds(set);
        // the root is a lower bound of everything, so `lower` is nonempty
        let top = *lower
            .iter()
            .max_by_key(|&&x| (self.graph.depth(x), std::cmp::Reverse(x)))
            .unwrap();
        if lower.iter().all(|&x| self.leq(x, top)) {
            Ok(top)
        } else {
            Err(Error::NoMeet(format!(
                "{} maximal lower bounds",
                lower
                    .iter()
                    .filter(|&&x| !lower.iter().any(|&y| y != x && self.leq(x, y)))
                    .count()
            )))
        }
    }

    /// Meet of a nonempty set. With a quasi-median context the sectors on
    /// the far side of every hyperplane separating the root from all of
    /// `set` are intersected and the meet is the gate of the root on that
    /// intersection; the result is cross-checked against brute force.
    pub fn meet(&self, set: &[VertexId]) -> Result<VertexId> {
        let brute = self.meet_brute_force(set)?;
        let (Some(walls), true) = (self.walls, self.quasi_median) else {
            return Ok(brute);
        };
        let fast = gate_meet(self.graph, walls, set)?;
        if fast != brute {
            return Err(Error::InternalInconsistency(format!(
                "gate meet {} differs from brute-force meet {}",
                self.graph.label(fast),
                self.graph.label(brute)
            )));
        }
        Ok(fast)
    }

    /// Minimal elements of the common upper bounds of `x` and `y` in the
    /// ball. The frontier flag is raised when `d(o,x) + d(o,y)` exceeds the
    /// radius: in a median graph every minimal upper bound has depth at most
    /// that sum, so below it the ball sees them all.
    pub fn minimal_upper_bounds(&self, x: VertexId, y: VertexId) -> Result<UpperBounds> {
        self.check(x)?;
        self.check(y)?;
        let g = self.graph;
        let upper: Vec<VertexId> = (0..g.len())
            .filter(|&z| self.leq(x, z) && self.leq(y, z))
            .collect();
        let minimal = upper
            .iter()
            .copied()
            .filter(|&z| !upper.iter().any(|&w| w != z && self.leq(w, z)))
            .collect();
        let frontier = match g.radius() {
            Some(r) => g.depth(x) + g.depth(y) > r,
            None => false,
        };
        Ok(UpperBounds { minimal, frontier })
    }
}

/// The gate algorithm for meets.
pub fn gate_meet(g: &BallGraph, walls: &Walls, set: &[VertexId]) -> Result<VertexId> {
    let o = g.root();
    let mut region: Vec<bool> = vec![true; g.len()];
    for h in 0..walls.len() {
        let labels = walls.sector_labels(h);
        let side = labels[set[0]];
        if side == labels[o] || set.iter().any(|&s| labels[s] != side) {
            continue;
        }
        for (v, keep) in region.iter_mut().enumerate() {
            if labels[v] != side {
                *keep = false;
            }
        }
    }
    let members: Vec<VertexId> = (0..g.len()).filter(|&v| region[v]).collect();
    if members.is_empty() {
        return Err(Error::NoMeet("empty sector intersection".into()));
    }
    g.gate(o, &members).map_err(|_| Error::NoMeet("sector intersection is not gated".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{self, grid_word};
    use crate::walls::build_hyperplanes;

    #[test]
    fn order_on_the_line() {
        let sys = fixtures::infinite_dihedral();
        let ball = sys.cayley_ball(5).unwrap();
        let ctx = OrderContext::new(&ball.graph);
        let v = |t: &str| ball.vertex(&sys, t).unwrap();
        assert!(ctx.leq(v("e"), v("stst")));
        assert!(ctx.leq(v("s"), v("sts")));
        assert!(!ctx.leq(v("s"), v("t")));
        assert_eq!(ctx.meet(&[v("sts"), v("st")]).unwrap(), v("st"));
        assert_eq!(ctx.meet(&[v("s"), v("t")]).unwrap(), v("e"));
        let ub = ctx.minimal_upper_bounds(v("s"), v("t")).unwrap();
        assert!(ub.minimal.is_empty());
    }

    #[test]
    fn grid_meets_and_joins() {
        let sys = fixtures::grid();
        let ball = sys.cayley_ball(5).unwrap();
        let walls = build_hyperplanes(&ball.graph);
        let ctx = OrderContext::quasi_median(&ball.graph, &walls).unwrap();
        let p = |i, j| ball.vertex_of(&sys.normal_form(&grid_word(i, j)).unwrap()).unwrap();
        assert_eq!(ctx.meet(&[p(2, 0), p(0, 2)]).unwrap(), p(0, 0));
        assert_eq!(ctx.meet(&[p(2, 1), p(1, 2)]).unwrap(), p(1, 1));
        assert_eq!(ctx.meet(&[p(2, 1)]).unwrap(), p(2, 1));
        let ub = ctx.minimal_upper_bounds(p(1, 0), p(0, 1)).unwrap();
        assert_eq!(ub.minimal, vec![p(1, 1)]);
        assert!(!ub.frontier);
        let same = ctx.minimal_upper_bounds(p(1, 2), p(1, 2)).unwrap();
        assert_eq!(same.minimal, vec![p(1, 2)]);
    }

    #[test]
    fn empty_meet_is_rejected() {
        let g = fixtures::cycle_graph(4);
        let ctx = OrderContext::new(&g);
        assert!(matches!(ctx.meet(&[]), Err(Error::NoMeet(_))));
    }
}
