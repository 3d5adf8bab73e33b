//! Named systems and graphs used by tests, benches and the command line tool.

use crate::coxeter::{CoxeterSystem, Word, INFINITY};
use crate::error::{Error, Result};
use crate::graph::{BallGraph, Extent, Path};

const INF: u32 = INFINITY;

fn system(names: &[&str], m: Vec<Vec<u32>>) -> CoxeterSystem {
    CoxeterSystem::new(names.iter().map(|s| s.to_string()).collect(), m)
        .expect("fixture systems are valid")
}

/// Infinite dihedral group on `s, t`; its Cayley graph is a line.
pub fn infinite_dihedral() -> CoxeterSystem {
    system(&["s", "t"], vec![vec![1, INF], vec![INF, 1]])
}

/// Dihedral group of order `2m` on `a, b`.
pub fn dihedral(m: u32) -> CoxeterSystem {
    system(&["a", "b"], vec![vec![1, m], vec![m, 1]])
}

/// Triangle group on `a, b, c` with `m_ab = p`, `m_bc = q`, `m_ac = r`.
pub fn triangle(p: u32, q: u32, r: u32) -> CoxeterSystem {
    system(
        &["a", "b", "c"],
        vec![vec![1, p, r], vec![p, 1, q], vec![r, q, 1]],
    )
}

/// The (2,3,7) triangle group; `abc` is its Coxeter element.
pub fn triangle_237() -> CoxeterSystem {
    triangle(2, 3, 7)
}

/// The affine (3,3,3) triangle group.
pub fn triangle_333() -> CoxeterSystem {
    triangle(3, 3, 3)
}

/// Symmetric group S4 as the type A3 system.
pub fn a3() -> CoxeterSystem {
    system(
        &["a", "b", "c"],
        vec![vec![1, 3, 2], vec![3, 1, 3], vec![2, 3, 1]],
    )
}

/// Hyperoctahedral group of type B3.
pub fn b3() -> CoxeterSystem {
    system(
        &["a", "b", "c"],
        vec![vec![1, 3, 2], vec![3, 1, 4], vec![2, 4, 1]],
    )
}

/// Affine type A3: a square of labels 3.
pub fn affine_a3() -> CoxeterSystem {
    system(
        &["a", "b", "c", "d"],
        vec![
            vec![1, 3, 2, 3],
            vec![3, 1, 3, 2],
            vec![2, 3, 1, 3],
            vec![3, 2, 3, 1],
        ],
    )
}

/// Right-angled group of the square `a-b-c-d-a`, isomorphic to
/// `<a,c> x <b,d>`; its Cayley graph is the square grid.
pub fn grid() -> CoxeterSystem {
    CoxeterSystem::right_angled(&["a", "b", "c", "d"], &[(0, 1), (1, 2), (2, 3), (3, 0)])
        .expect("grid system")
}

/// Right-angled group of the path `a-b-c-d`.
pub fn racg_path4() -> CoxeterSystem {
    CoxeterSystem::right_angled(&["a", "b", "c", "d"], &[(0, 1), (1, 2), (2, 3)])
        .expect("path system")
}

/// Word of the grid point `(i, j)`: horizontal steps alternate `a, c`
/// (starting with `a` for positive `i`, `c` for negative) and vertical steps
/// alternate `b, d` likewise.
pub fn grid_word(i: i32, j: i32) -> Word {
    fn axis(k: i32, pos: u8, neg: u8) -> Vec<u8> {
        let (first, second) = if k >= 0 { (pos, neg) } else { (neg, pos) };
        (0..k.unsigned_abs())
            .map(|n| if n % 2 == 0 { first } else { second })
            .collect()
    }
    let mut w = axis(i, 0, 2);
    w.extend(axis(j, 1, 3));
    w
}

/// Word of the point at signed position `k` on the line of the infinite
/// dihedral group; positive positions start with `s`.
pub fn line_word(k: i32) -> Word {
    let (first, second) = if k >= 0 { (0u8, 1u8) } else { (1, 0) };
    (0..k.unsigned_abs())
        .map(|n| if n % 2 == 0 { first } else { second })
        .collect()
}

/// Cycle graph on `n` vertices labelled `0..n`, rooted at `0`.
pub fn cycle_graph(n: usize) -> BallGraph {
    let labels = (0..n).map(|i| i.to_string()).collect();
    let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    BallGraph::new(labels, &edges, 0, Extent::Finite).expect("cycle graph")
}

/// Complete graph on `n` vertices.
pub fn complete_graph(n: usize) -> BallGraph {
    let labels = (0..n).map(|i| i.to_string()).collect();
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            edges.push((a, b));
        }
    }
    BallGraph::new(labels, &edges, 0, Extent::Finite).expect("complete graph")
}

/// Named Coxeter systems accepted by the command line tool.
pub fn named_system(name: &str) -> Result<CoxeterSystem> {
    Ok(match name {
        "dinf" | "d-infinity" => infinite_dihedral(),
        "grid" => grid(),
        "237" | "triangle-237" => triangle_237(),
        "333" | "triangle-333" => triangle_333(),
        "a2" => dihedral(3),
        "a3" => a3(),
        "b3" => b3(),
        "affine-a3" => affine_a3(),
        "racg-p4" => racg_path4(),
        other => return Err(Error::BadSystem(format!("unknown fixture `{other}`"))),
    })
}

pub const SYSTEM_NAMES: &[&str] = &[
    "dinf",
    "grid",
    "237",
    "333",
    "a2",
    "a3",
    "b3",
    "affine-a3",
    "racg-p4",
];

/// Ball in the universal cover of a thickened rose: two square annuli, one
/// running horizontally and one vertically, glued along a common 2x2 block.
///
/// Vertices of the block are named `x,y` with `x, y` in `-1..=1`; the extra
/// column of the horizontal annulus is `h,y` and the extra row of the
/// vertical one is `x,v`. A lift is labelled `name|w` where `w` is a reduced
/// word in the deck group, `a` and `b` translating along the horizontal and
/// vertical strips (`A`, `B` their inverses, `e` the identity). The root is
/// `0,0|e`.
pub fn rose_cover(radius: u32) -> BallGraph {
    // (from, to, deck letter crossed)
    let mut edges: Vec<(String, String, Option<char>)> = Vec::new();
    let q = |x: i32, y: i32| format!("{x},{y}");
    for x in -1..=1 {
        for y in -1..=1 {
            if x < 1 {
                edges.push((q(x, y), q(x + 1, y), None));
            }
            if y < 1 {
                edges.push((q(x, y), q(x, y + 1), None));
            }
        }
    }
    for t in -1..=1 {
        edges.push((q(1, t), format!("h,{t}"), None));
        edges.push((format!("h,{t}"), q(-1, t), Some('a')));
        edges.push((q(t, 1), format!("{t},v"), None));
        edges.push((format!("{t},v"), q(t, -1), Some('b')));
        if t < 1 {
            edges.push((format!("h,{t}"), format!("h,{}", t + 1), None));
            edges.push((format!("{t},v"), format!("{},v", t + 1), None));
        }
    }
    let mut nbrs: std::collections::BTreeMap<String, Vec<(String, Option<char>)>> = Default::default();
    for (u, w, l) in &edges {
        nbrs.entry(u.clone()).or_default().push((w.clone(), *l));
        nbrs.entry(w.clone()).or_default().push((u.clone(), l.map(invert_letter)));
    }
    let root = (q(0, 0), String::new());
    let mut index: std::collections::HashMap<(String, String), usize> = Default::default();
    let mut order = vec![root.clone()];
    index.insert(root, 0);
    let step = |name: &str, word: &str| -> Vec<(String, String)> {
        nbrs[name]
            .iter()
            .map(|(m, l)| (m.clone(), l.map_or(word.to_string(), |c| free_append(word, c))))
            .collect()
    };
    let mut frontier = vec![0usize];
    for _ in 0..radius {
        let mut next = Vec::new();
        for &i in &frontier {
            let (name, word) = order[i].clone();
            for key in step(&name, &word) {
                if !index.contains_key(&key) {
                    order.push(key.clone());
                    index.insert(key, order.len() - 1);
                    next.push(order.len() - 1);
                }
            }
        }
        frontier = next;
    }
    let mut graph_edges = Vec::new();
    for (i, (name, word)) in order.iter().enumerate() {
        for key in step(name, word) {
            if let Some(&j) = index.get(&key) {
                if i < j {
                    graph_edges.push((i, j));
                }
            }
        }
    }
    let labels = order
        .iter()
        .map(|(n, w)| format!("{n}|{}", if w.is_empty() { "e" } else { w }))
        .collect();
    BallGraph::new(labels, &graph_edges, 0, Extent::Ball(radius)).expect("rose cover ball")
}

/// Geodesic from the root of [`rose_cover`] running along the horizontal
/// strip on row `y`, after one vertical step when `y != 0`.
pub fn rose_row_ray(g: &BallGraph, y: i32, len: usize) -> Result<Path> {
    let cycle = |t: usize| match t % 4 {
        0 => ("0".to_string(), y.to_string()),
        1 => ("1".to_string(), y.to_string()),
        2 => ("h".to_string(), y.to_string()),
        _ => ("-1".to_string(), y.to_string()),
    };
    rose_ray(g, y != 0, &format!("0,{y}"), cycle, 'a', len)
}

/// Geodesic from the root of [`rose_cover`] running up the vertical strip
/// along column `0`.
pub fn rose_column_ray(g: &BallGraph, len: usize) -> Result<Path> {
    let cycle = |t: usize| match t % 4 {
        0 => ("0".to_string(), "0".to_string()),
        1 => ("0".to_string(), "1".to_string()),
        2 => ("0".to_string(), "v".to_string()),
        _ => ("0".to_string(), "-1".to_string()),
    };
    rose_ray(g, false, "", cycle, 'b', len)
}

fn rose_ray(
    g: &BallGraph,
    offset: bool,
    first: &str,
    cycle: impl Fn(usize) -> (String, String),
    letter: char,
    len: usize,
) -> Result<Path> {
    let mut vertices = vec![g.root()];
    let mut word = String::new();
    if offset {
        vertices.push(g.vertex(&format!("{first}|e"))?);
    }
    let mut t = 0;
    while vertices.len() <= len {
        t += 1;
        if t % 4 == 3 {
            word = free_append(&word, letter);
        }
        let (x, y) = cycle(t);
        let w = if word.is_empty() { "e" } else { &word };
        vertices.push(g.vertex(&format!("{x},{y}|{w}"))?);
    }
    Ok(Path::new(vertices))
}

fn invert_letter(c: char) -> char {
    if c.is_ascii_lowercase() {
        c.to_ascii_uppercase()
    } else {
        c.to_ascii_lowercase()
    }
}

fn free_append(word: &str, c: char) -> String {
    let mut w = word.to_string();
    if w.ends_with(invert_letter(c)) {
        w.pop();
    } else {
        w.push(c);
    }
    w
}
