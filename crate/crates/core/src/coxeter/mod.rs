//! Coxeter systems: the word problem, Cayley balls, reflections and the left
//! action on a ball.
//!
//! Group elements are represented by their ShortLex-minimal reduced word
//! ([`Word`]). The word problem is solved with Tits' theorem: a word is
//! reduced iff no word reachable from it by braid moves contains two equal
//! adjacent letters. Multiplication is done one letter at a time. For a reduced
//! `w`, the product `ws` is shorter iff some reduced word of `w` ends with `s`
//! (exchange condition), so only braid classes of reduced words are ever
//! explored. Classes are memoized per element.

mod classify;

pub use classify::{classify_type, ComponentType, CoxeterType, TypeReport, MAX_PRECISION_BITS};

use std::collections::{BTreeSet, HashMap, HashSet};
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{BallGraph, Extent, VertexId};

/// Encodes an infinite label in memory. Files use `0`.
pub const INFINITY: u32 = u32::MAX;

/// Generator-index sequence.
pub type Word = Vec<u8>;

/// Default cap on the number of words in one braid class.
pub const DEFAULT_BRAID_BUDGET: usize = 200_000;
/// Default cap on the number of words memoised across all braid classes.
pub const DEFAULT_MEMO_BUDGET: usize = 4_000_000;
/// Default cap on the number of ball vertices.
pub const DEFAULT_BALL_BUDGET: usize = 2_000_000;

/// Braid class of a reduced word.
#[derive(Debug)]
struct Class {
    /// ShortLex-minimal member.
    normal: Word,
    /// Every reduced word of the element, sorted.
    words: Vec<Word>,
    first: u64,
    last: u64,
}

#[derive(Debug)]
pub struct CoxeterSystem {
    names: Vec<String>,
    m: Vec<Vec<u32>>,
    separated: bool,
    braid_budget: usize,
    classes: RwLock<HashMap<Word, Arc<Class>>>,
}

impl Clone for CoxeterSystem {
    fn clone(&self) -> Self {
        let mut s = CoxeterSystem::new(self.names.clone(), self.m.clone())
            .expect("cloning a valid system");
        s.braid_budget = self.braid_budget;
        s
    }
}

impl PartialEq for CoxeterSystem {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names && self.m == other.m
    }
}

/// JSON form of a system; `0` stands for an infinite label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemRecord {
    pub generators: Vec<String>,
    pub m: Vec<Vec<u32>>,
}

impl CoxeterSystem {
    /// Validates a label matrix using [`INFINITY`] for infinite labels.
    pub fn new(names: Vec<String>, m: Vec<Vec<u32>>) -> Result<Self> {
        let n = names.len();
        if n == 0 {
            return Err(Error::BadSystem("no generators".into()));
        }
        if n > 64 {
            return Err(Error::BadSystem("at most 64 generators are supported".into()));
        }
        let mut seen = HashSet::new();
        for name in &names {
            if name.is_empty()
                || name == "e"
                || !name.chars().all(|c| c.is_alphanumeric() || c == '_')
            {
                return Err(Error::BadSystem(format!("invalid generator name `{name}`")));
            }
            if !seen.insert(name) {
                return Err(Error::BadSystem(format!("duplicate generator `{name}`")));
            }
        }
        if m.len() != n || m.iter().any(|r| r.len() != n) {
            return Err(Error::BadSystem(format!("label matrix must be {n} x {n}")));
        }
        for (i, name) in names.iter().enumerate() {
            if m[i][i] != 1 {
                return Err(Error::BadDiagonal(name.clone()));
            }
        }
        for i in 0..n {
            for j in 0..n {
                if m[i][j] != m[j][i] {
                    return Err(Error::Asymmetric(i, j));
                }
                if i != j && m[i][j] < 2 {
                    return Err(Error::BadLabel {
                        row: i,
                        col: j,
                        value: m[i][j],
                    });
                }
            }
        }
        let separated = names.iter().any(|s| s.chars().count() > 1);
        Ok(CoxeterSystem {
            names,
            m,
            separated,
            braid_budget: DEFAULT_BRAID_BUDGET,
            classes: RwLock::new(HashMap::new()),
        })
    }

    /// Parses the JSON system format.
    pub fn parse(text: &str) -> Result<Self> {
        let rec: SystemRecord =
            serde_json::from_str(text).map_err(|e| Error::BadSystem(e.to_string()))?;
        Self::from_record(&rec)
    }

    pub fn from_record(rec: &SystemRecord) -> Result<Self> {
        let m = rec
            .m
            .iter()
            .map(|r| r.iter().map(|&v| if v == 0 { INFINITY } else { v }).collect())
            .collect();
        Self::new(rec.generators.clone(), m)
    }

    pub fn to_record(&self) -> SystemRecord {
        SystemRecord {
            generators: self.names.clone(),
            m: self
                .m
                .iter()
                .map(|r| r.iter().map(|&v| if v == INFINITY { 0 } else { v }).collect())
                .collect(),
        }
    }

    /// Right-angled Coxeter group of a simple graph: adjacent generators
    /// commute, all other pairs generate an infinite dihedral group.
    pub fn right_angled(names: &[&str], edges: &[(usize, usize)]) -> Result<Self> {
        let n = names.len();
        let mut m = vec![vec![INFINITY; n]; n];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 1;
        }
        for &(a, b) in edges {
            if a >= n || b >= n || a == b {
                return Err(Error::BadSystem(format!("invalid edge ({a}, {b})")));
            }
            m[a][b] = 2;
            m[b][a] = 2;
        }
        Self::new(names.iter().map(|s| s.to_string()).collect(), m)
    }

    /// Same system with a different braid-closure budget.
    pub fn with_braid_budget(mut self, budget: usize) -> Self {
        self.braid_budget = budget.max(1);
        self.classes = RwLock::new(HashMap::new());
        self
    }

    pub fn rank(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Label `m_st`, [`INFINITY`] when infinite.
    pub fn m(&self, s: usize, t: usize) -> u32 {
        self.m[s][t]
    }

    /// Connected components of the Coxeter diagram (edges where `m >= 3`).
    pub fn diagram_components(&self) -> Vec<Vec<usize>> {
        let n = self.rank();
        let mut comp = vec![usize::MAX; n];
        let mut out = Vec::new();
        for start in 0..n {
            if comp[start] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut members = vec![start];
            comp[start] = id;
            let mut k = 0;
            while k < members.len() {
                let v = members[k];
                for w in 0..n {
                    if comp[w] == usize::MAX && w != v && self.m[v][w] >= 3 {
                        comp[w] = id;
                        members.push(w);
                    }
                }
                k += 1;
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    pub fn classify(&self) -> Result<TypeReport> {
        classify_type(self)
    }

    // -- words ------------------------------------------------------------

    /// Parses a word. With single-character generator names letters may be
    /// juxtaposed; otherwise they are separated by `.`, `,` or whitespace.
    /// `e` and the empty string denote the identity.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let t = text.trim();
        if t.is_empty() || t == "e" {
            return Ok(Word::new());
        }
        let lookup = |tok: &str| -> Result<u8> {
            self.names
                .iter()
                .position(|n| n == tok)
                .map(|i| i as u8)
                .ok_or_else(|| Error::BadWord(text.to_string()))
        };
        if self.separated {
            t.split(|c: char| c == '.' || c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .map(lookup)
                .collect()
        } else {
            let mut buf = [0u8; 4];
            t.chars()
                .filter(|c| !(c.is_whitespace() || *c == '.' || *c == ','))
                .map(|c| lookup(c.encode_utf8(&mut buf)))
                .collect()
        }
    }

    /// Display form of a word; the identity prints as `e`.
    pub fn format_word(&self, w: &[u8]) -> String {
        if w.is_empty() {
            return "e".to_string();
        }
        let sep = if self.separated { "." } else { "" };
        w.iter()
            .map(|&i| self.names[i as usize].as_str())
            .collect::<Vec<_>>()
            .join(sep)
    }

    fn check_word(&self, w: &[u8]) -> Result<()> {
        if w.iter().any(|&i| i as usize >= self.rank()) {
            return Err(Error::BadWord(format!("{w:?}")));
        }
        Ok(())
    }

    /// All words reachable from `w` by braid moves.
    fn braid_closure(&self, w: &[u8]) -> Result<Vec<Word>> {
        let mut seen: HashSet<Word> = HashSet::new();
        seen.insert(w.to_vec());
        let mut stack = vec![w.to_vec()];
        while let Some(u) = stack.pop() {
            for i in 0..u.len().saturating_sub(1) {
                let (s, t) = (u[i], u[i + 1]);
                if s == t {
                    continue;
                }
                let m = self.m[s as usize][t as usize];
                if m == INFINITY || i + m as usize > u.len() {
                    continue;
                }
                let m = m as usize;
                let alternating = (0..m).all(|k| u[i + k] == if k % 2 == 0 { s } else { t });
                if !alternating {
                    continue;
                }
                let mut v = u.clone();
                for k in 0..m {
                    v[i + k] = if k % 2 == 0 { t } else { s };
                }
                if seen.insert(v.clone()) {
                    if seen.len() > self.braid_budget {
                        return Err(Error::BraidClosureOverflow {
                            budget: self.braid_budget,
                        });
                    }
                    stack.push(v);
                }
            }
        }
        let mut words: Vec<Word> = seen.into_iter().collect();
        words.sort_unstable();
        Ok(words)
    }

    /// Braid class of the element represented by the reduced word `w`.
    fn class_of(&self, w: &[u8]) -> Result<Arc<Class>> {
        if let Some(c) = self.classes.read().unwrap().get(w) {
            return Ok(c.clone());
        }
        let words = self.braid_closure(w)?;
        debug_assert!(
            words.iter().all(|u| u.windows(2).all(|p| p[0] != p[1])),
            "braid class of a reduced word contains a cancelling pair"
        );
        let mut first = 0u64;
        let mut last = 0u64;
        for u in &words {
            if let (Some(&a), Some(&b)) = (u.first(), u.last()) {
                first |= 1 << a;
                last |= 1 << b;
            }
        }
        let class = Arc::new(Class {
            normal: words[0].clone(),
            words,
            first,
            last,
        });
        let mut map = self.classes.write().unwrap();
        if map.len() + class.words.len() > DEFAULT_MEMO_BUDGET {
            return Err(Error::BraidClosureOverflow {
                budget: DEFAULT_MEMO_BUDGET,
            });
        }
        // every member keys the same class
        for u in &class.words {
            map.insert(u.clone(), class.clone());
        }
        Ok(class)
    }

    /// `w s` for a normal form `w`.
    pub fn mul_right(&self, w: &[u8], s: u8) -> Result<Word> {
        let class = self.class_of(w)?;
        if class.last & (1 << s) != 0 {
            let u = class
                .words
                .iter()
                .find(|u| *u.last().unwrap() == s)
                .unwrap();
            Ok(self.class_of(&u[..u.len() - 1])?.normal.clone())
        } else {
            let mut u = class.normal.clone();
            u.push(s);
            Ok(self.class_of(&u)?.normal.clone())
        }
    }

    /// `s w` for a normal form `w`.
    pub fn mul_left(&self, s: u8, w: &[u8]) -> Result<Word> {
        let class = self.class_of(w)?;
        if class.first & (1 << s) != 0 {
            let u = class
                .words
                .iter()
                .find(|u| u[0] == s)
                .unwrap();
            Ok(self.class_of(&u[1..])?.normal.clone())
        } else {
            let mut u = Vec::with_capacity(w.len() + 1);
            u.push(s);
            u.extend_from_slice(&class.normal);
            Ok(self.class_of(&u)?.normal.clone())
        }
    }

    /// ShortLex-minimal reduced word of the element spelled by `word`.
    pub fn normal_form(&self, word: &[u8]) -> Result<Word> {
        self.check_word(word)?;
        let mut w = Word::new();
        for &s in word {
            w = self.mul_right(&w, s)?;
        }
        Ok(w)
    }

    /// Product of two elements given by normal forms.
    pub fn multiply(&self, u: &[u8], v: &[u8]) -> Result<Word> {
        let mut w = v.to_vec();
        for &s in u.iter().rev() {
            w = self.mul_left(s, &w)?;
        }
        Ok(w)
    }

    pub fn inverse(&self, w: &[u8]) -> Result<Word> {
        let rev: Word = w.iter().rev().copied().collect();
        self.normal_form(&rev)
    }

    /// Word length of the element spelled by `word`.
    pub fn length(&self, word: &[u8]) -> Result<usize> {
        Ok(self.normal_form(word)?.len())
    }

    /// Word-metric distance `|u^-1 v|` for a normal form `v`.
    pub fn distance(&self, u: &[u8], v: &[u8]) -> Result<usize> {
        let inv: Word = u.iter().rev().copied().collect();
        Ok(self.multiply(&inv, v)?.len())
    }

    /// Normal form of `w^k`.
    pub fn power(&self, w: &[u8], k: u32) -> Result<Word> {
        let w = self.normal_form(w)?;
        let mut p = Word::new();
        for _ in 0..k {
            p = self.multiply(&w, &p)?;
        }
        Ok(p)
    }

    /// Every reduced word of the element with normal form `w`, sorted.
    pub fn reduced_words(&self, w: &[u8]) -> Result<Vec<Word>> {
        Ok(self.class_of(w)?.words.clone())
    }

    /// The reflection `w s w^-1`.
    pub fn reflection(&self, w: &[u8], s: u8) -> Result<Word> {
        let mut word = w.to_vec();
        word.push(s);
        word.extend(w.iter().rev());
        self.normal_form(&word)
    }

    /// Reflections of the walls crossed by the normal form of `w`: the i-th
    /// letter crosses the wall of `w_{i-1} s_i w_{i-1}^-1`.
    pub fn inversion_set(&self, w: &[u8]) -> Result<BTreeSet<Word>> {
        let w = self.normal_form(w)?;
        let mut out = BTreeSet::new();
        for i in 0..w.len() {
            out.insert(self.reflection(&w[..i], w[i])?);
        }
        Ok(out)
    }

    // -- Cayley balls -----------------------------------------------------

    /// Ball of the given radius around the identity in the Cayley graph.
    pub fn cayley_ball(&self, radius: u32) -> Result<CayleyBall> {
        self.cayley_ball_with_budget(radius, DEFAULT_BALL_BUDGET)
    }

    pub fn cayley_ball_with_budget(&self, radius: u32, budget: usize) -> Result<CayleyBall> {
        let mut words: Vec<Word> = vec![Word::new()];
        let mut index: HashMap<Word, VertexId> = HashMap::new();
        index.insert(Word::new(), 0);
        let mut edges = Vec::new();
        let mut level = vec![0usize];
        for _ in 0..radius {
            let mut next: Vec<Word> = Vec::new();
            let mut up: Vec<(VertexId, Word)> = Vec::new();
            for &v in &level {
                let class = self.class_of(&words[v])?;
                for s in 0..self.rank() as u8 {
                    if class.last & (1 << s) != 0 {
                        continue;
                    }
                    let mut u = class.normal.clone();
                    u.push(s);
                    let nf = self.class_of(&u)?.normal.clone();
                    up.push((v, nf.clone()));
                    next.push(nf);
                }
            }
            next.sort_unstable();
            next.dedup();
            if words.len() + next.len() > budget {
                return Err(Error::BallTooLarge { budget });
            }
            level.clear();
            for w in next {
                index.insert(w.clone(), words.len());
                level.push(words.len());
                words.push(w);
            }
            for (v, w) in up {
                edges.push((v, index[&w]));
            }
        }
        let labels = words.iter().map(|w| self.format_word(w)).collect();
        let graph = BallGraph::new(labels, &edges, 0, Extent::Ball(radius))?;
        Ok(CayleyBall {
            graph,
            words,
            index,
        })
    }
}

/// A Cayley ball together with the element of every vertex.
#[derive(Debug, Clone)]
pub struct CayleyBall {
    pub graph: BallGraph,
    /// Normal form of each vertex.
    pub words: Vec<Word>,
    pub index: HashMap<Word, VertexId>,
}

/// Left multiplication restricted to the vertices whose image stays in the ball.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialAction {
    /// `image[v] = Some(g v)` on the domain.
    pub image: Vec<Option<VertexId>>,
}

impl PartialAction {
    pub fn apply(&self, v: VertexId) -> Option<VertexId> {
        self.image[v]
    }

    pub fn domain(&self) -> Vec<VertexId> {
        (0..self.image.len()).filter(|&v| self.image[v].is_some()).collect()
    }
}

impl CayleyBall {
    pub fn radius(&self) -> u32 {
        self.graph.radius().expect("Cayley balls carry a radius")
    }

    pub fn vertex_of(&self, w: &[u8]) -> Option<VertexId> {
        self.index.get(w).copied()
    }

    /// Vertex of the element spelled by `word`, if it lies in the ball.
    pub fn locate(&self, sys: &CoxeterSystem, word: &[u8]) -> Result<Option<VertexId>> {
        Ok(self.vertex_of(&sys.normal_form(word)?))
    }

    /// The vertex labelled by `text` parsed as a word.
    pub fn vertex(&self, sys: &CoxeterSystem, text: &str) -> Result<VertexId> {
        let w = sys.parse_word(text)?;
        self.locate(sys, &w)?
            .ok_or_else(|| Error::UnknownLabel(text.to_string()))
    }

    /// `g v` if it lies in the ball.
    pub fn act_on(&self, sys: &CoxeterSystem, g: &[u8], v: VertexId) -> Result<Option<VertexId>> {
        let w = sys.multiply(g, &self.words[v])?;
        Ok(self.vertex_of(&w))
    }

    /// Left multiplication by `g` as a partial permutation of the ball.
    pub fn act(&self, sys: &CoxeterSystem, g: &[u8]) -> Result<PartialAction> {
        let g = sys.normal_form(g)?;
        let mut image = Vec::with_capacity(self.words.len());
        for v in 0..self.words.len() {
            image.push(self.act_on(sys, &g, v)?);
        }
        Ok(PartialAction { image })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dinf() -> CoxeterSystem {
        CoxeterSystem::new(
            vec!["s".into(), "t".into()],
            vec![vec![1, INFINITY], vec![INFINITY, 1]],
        )
        .unwrap()
    }

    fn dihedral(m: u32) -> CoxeterSystem {
        CoxeterSystem::new(vec!["a".into(), "b".into()], vec![vec![1, m], vec![m, 1]]).unwrap()
    }

    fn nf(sys: &CoxeterSystem, w: &str) -> String {
        sys.format_word(&sys.normal_form(&sys.parse_word(w).unwrap()).unwrap())
    }

    #[test]
    fn parse_and_validate() {
        let s = CoxeterSystem::parse(r#"{"generators":["s","t"],"m":[[1,0],[0,1]]}"#).unwrap();
        assert_eq!(s.m(0, 1), INFINITY);
        assert_eq!(
            CoxeterSystem::parse(r#"{"generators":["s","t"],"m":[[2,0],[0,1]]}"#),
            Err(Error::BadDiagonal("s".into()))
        );
        assert_eq!(
            CoxeterSystem::parse(r#"{"generators":["s","t"],"m":[[1,3],[2,1]]}"#),
            Err(Error::Asymmetric(0, 1))
        );
        assert_eq!(
            CoxeterSystem::parse(r#"{"generators":["s","t"],"m":[[1,1],[1,1]]}"#),
            Err(Error::BadLabel {
                row: 0,
                col: 1,
                value: 1
            })
        );
        assert!(matches!(
            CoxeterSystem::parse(r#"{"generators":["s"],"m":[[1,2]]}"#),
            Err(Error::BadSystem(_))
        ));
        let back = CoxeterSystem::from_record(&s.to_record()).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn normal_forms() {
        let a2 = dihedral(3);
        assert_eq!(nf(&a2, "aa"), "e");
        assert_eq!(nf(&a2, "bab"), "aba");
        assert_eq!(nf(&a2, "ababab"), "e");
        assert_eq!(nf(&dihedral(2), "abab"), "e");
        assert_eq!(nf(&dihedral(2), "ba"), "ab");
        assert_eq!(nf(&dinf(), "sttsts"), "ts");
        assert_eq!(nf(&dinf(), "stts"), "e");
    }

    #[test]
    fn words_with_long_names() {
        let sys = CoxeterSystem::new(
            vec!["x1".into(), "x2".into()],
            vec![vec![1, 2], vec![2, 1]],
        )
        .unwrap();
        let w = sys.parse_word("x2.x1").unwrap();
        assert_eq!(w, vec![1, 0]);
        assert_eq!(sys.format_word(&sys.normal_form(&w).unwrap()), "x1.x2");
        assert!(matches!(sys.parse_word("x3"), Err(Error::BadWord(_))));
    }

    #[test]
    fn braid_budget_overflow() {
        // the longest element of I2(8) has two reduced words; a budget of one fails
        let sys = dihedral(8).with_braid_budget(1);
        let w = sys.parse_word("abababab").unwrap();
        assert_eq!(
            sys.normal_form(&w),
            Err(Error::BraidClosureOverflow { budget: 1 })
        );
    }

    #[test]
    fn small_balls() {
        let d = dinf();
        let b0 = d.cayley_ball(0).unwrap();
        assert_eq!(b0.graph.len(), 1);
        let b5 = d.cayley_ball(5).unwrap();
        assert_eq!(b5.graph.len(), 11);
        assert_eq!(b5.graph.edge_count(), 10);
        let a2 = dihedral(3).cayley_ball(3).unwrap();
        assert_eq!(a2.graph.len(), 6);
        assert_eq!(a2.graph.edge_count(), 6);
        assert!(a2.graph.neighbors(0).len() == 2);
        assert!(matches!(
            dinf().cayley_ball_with_budget(10, 5),
            Err(Error::BallTooLarge { budget: 5 })
        ));
    }

    #[test]
    fn inversion_sets() {
        let d = dinf();
        let inv = d.inversion_set(&d.parse_word("sts").unwrap()).unwrap();
        let got: Vec<String> = inv.iter().map(|w| d.format_word(w)).collect();
        assert_eq!(got, vec!["s", "sts", "ststs"]);
        assert!(d.inversion_set(&[]).unwrap().is_empty());
    }

    #[test]
    fn action_shifts_the_line() {
        let d = dinf();
        let ball = d.cayley_ball(5).unwrap();
        let g = d.parse_word("st").unwrap();
        let act = ball.act(&d, &g).unwrap();
        for v in 0..ball.graph.len() {
            let img = act.apply(v);
            if ball.graph.margin(v) >= 2 {
                assert!(img.is_some());
            }
            if let Some(u) = img {
                let dv = ball.graph.distance(0, v).unwrap() as i64;
                let du = ball.graph.distance(0, u).unwrap() as i64;
                assert!((du - dv).abs() <= 2);
            }
        }
        let id = ball.act(&d, &[]).unwrap();
        assert!((0..ball.graph.len()).all(|v| id.apply(v) == Some(v)));
    }

    #[test]
    fn walls_are_reflections() {
        use std::collections::{BTreeMap, BTreeSet};
        // A3 at radius 6 is the whole group, so walls and reflections biject
        for (sys, whole) in [
            (crate::fixtures::a3(), true),
            (crate::fixtures::triangle_237(), false),
            (crate::fixtures::triangle_333(), false),
        ] {
            let ball = sys.cayley_ball(6).unwrap();
            let g = &ball.graph;
            let walls = crate::walls::build_hyperplanes(g);
            let mut reflection_of: BTreeMap<usize, BTreeSet<Word>> = BTreeMap::new();
            for (a, b) in g.edge_list() {
                let h = walls.edge_hyperplane(a, b).unwrap();
                let (wa, wb) = (&ball.words[a], &ball.words[b]);
                let s = (0..sys.rank() as u8)
                    .find(|&s| &sys.mul_right(wa, s).unwrap() == wb)
                    .unwrap();
                let r = sys.normal_form(&sys.reflection(wa, s).unwrap()).unwrap();
                assert_eq!(&sys.multiply(&r, wa).unwrap(), wb);
                assert_eq!(&sys.multiply(&r, wb).unwrap(), wa);
                reflection_of.entry(h).or_default().insert(r);
            }
            for h in &walls.hyperplanes {
                if whole || !h.truncated {
                    assert_eq!(reflection_of[&h.id].len(), 1, "hyperplane {} merges reflections", h.id);
                    assert_eq!(h.sectors.len(), 2);
                }
            }
            if whole {
                let distinct: BTreeSet<_> = reflection_of.values().flatten().collect();
                assert_eq!((walls.len(), distinct.len()), (6, 6));
            }
        }
    }
}
