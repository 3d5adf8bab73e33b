use std::collections::BTreeSet;

use proptest::prelude::*;
use wallkit::boundary::{horofunction_vector, margin_safe_vertices, ray_orientation, sup_difference, symmetric_difference};
use wallkit::coxeter::CoxeterSystem;
use wallkit::order::{gate_meet, OrderContext};
use wallkit::walls::build_hyperplanes;

const NAMES: [&str; 5] = ["a", "b", "c", "d", "f"];

/// A right-angled system on `n` generators with edges chosen by `mask`.
fn right_angled(n: usize, mask: u16) -> CoxeterSystem {
    let mut edges = Vec::new();
    let mut bit = 0;
    for i in 0..n {
        for j in i + 1..n {
            if mask >> bit & 1 == 1 {
                edges.push((i, j));
            }
            bit += 1;
        }
    }
    CoxeterSystem::right_angled(&NAMES[..n], &edges).unwrap()
}

fn system() -> impl Strategy<Value = CoxeterSystem> {
    (3usize..=5, any::<u16>()).prop_map(|(n, mask)| right_angled(n, mask))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn safe_distances_count_separating_hyperplanes(sys in system(), r in 3u32..=4) {
        let g = sys.cayley_ball(r).unwrap().graph;
        let walls = build_hyperplanes(&g);
        for x in 0..g.len() {
            for y in 0..g.len() {
                if g.is_safe_pair(x, y) {
                    prop_assert_eq!(walls.separating_hyperplanes(x, y).len() as u32, g.dist(x, y));
                }
            }
        }
    }

    #[test]
    fn interior_hyperplanes_have_two_sides(sys in system(), r in 3u32..=4) {
        let g = sys.cayley_ball(r).unwrap().graph;
        let walls = build_hyperplanes(&g);
        prop_assert!(walls.report.paraclique);
        for h in walls.hyperplanes.iter().filter(|h| !h.truncated) {
            prop_assert_eq!(h.sectors.len(), 2, "hyperplane {}", h.id);
        }
    }

    #[test]
    fn gate_meets_agree_with_brute_force(
        sys in system(),
        r in 3u32..=4,
        picks in proptest::collection::vec((any::<proptest::sample::Index>(), any::<proptest::sample::Index>()), 12),
    ) {
        let g = sys.cayley_ball(r).unwrap().graph;
        let walls = build_hyperplanes(&g);
        let ctx = OrderContext::new(&g);
        for (i, j) in picks {
            let set = [i.index(g.len()), j.index(g.len())];
            prop_assert_eq!(gate_meet(&g, &walls, &set).unwrap(), ctx.meet_brute_force(&set).unwrap());
        }
    }

    #[test]
    fn orientation_distance_is_a_metric(sys in system(), r in 3u32..=4) {
        let g = sys.cayley_ball(r).unwrap().graph;
        let walls = build_hyperplanes(&g);
        let o: Vec<_> = (0..g.len())
            .map(|y| ray_orientation(&g, &walls, &g.geodesic(g.root(), y)).unwrap())
            .collect();
        let n = g.len().min(24);
        for x in 0..n {
            prop_assert_eq!(symmetric_difference(&o[x], &o[x]), 0);
            for y in 0..n {
                let dxy = symmetric_difference(&o[x], &o[y]);
                prop_assert_eq!(dxy, symmetric_difference(&o[y], &o[x]));
                for z in 0..n {
                    prop_assert!(dxy <= symmetric_difference(&o[x], &o[z]) + symmetric_difference(&o[z], &o[y]));
                }
            }
        }
    }

    #[test]
    fn horofunction_gap_is_at_most_twice_the_orientation_gap(sys in system(), r in 3u32..=4) {
        let g = sys.cayley_ball(r).unwrap().graph;
        let walls = build_hyperplanes(&g);
        let o: Vec<_> = (0..g.len())
            .map(|y| ray_orientation(&g, &walls, &g.geodesic(g.root(), y)).unwrap())
            .collect();
        let horos: Vec<_> = (0..g.len()).map(|y| horofunction_vector(&g, y)).collect();
        for y1 in 0..g.len() {
            for y2 in y1 + 1..g.len() {
                let k = symmetric_difference(&o[y1], &o[y2]) as u64;
                let safe = margin_safe_vertices(&g, &[y1, y2]);
                prop_assert!(sup_difference(&horos[y1], &horos[y2], Some(&safe)) <= 2 * k);
            }
        }
    }

    #[test]
    fn normal_forms_are_reduced_and_stable(
        sys in system(),
        word in proptest::collection::vec(0u8..5, 0..12),
    ) {
        let rank = sys.rank() as u8;
        let word: Vec<u8> = word.into_iter().map(|s| s % rank).collect();
        let nf = sys.normal_form(&word).unwrap();
        prop_assert_eq!(sys.normal_form(&nf).unwrap(), nf.clone());
        prop_assert!(nf.len() <= word.len());
        prop_assert_eq!(nf.len() % 2, word.len() % 2);
        let reduced: BTreeSet<_> = sys.reduced_words(&nf).unwrap().into_iter().collect();
        prop_assert!(reduced.contains(&nf));
        for s in 0..rank {
            let ws = sys.mul_right(&nf, s).unwrap();
            prop_assert_eq!(ws.len().abs_diff(nf.len()), 1);
            prop_assert_eq!(sys.mul_right(&ws, s).unwrap(), nf.clone());
        }
    }
}
