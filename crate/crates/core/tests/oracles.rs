//! Cross-checks of the algebraic geometry against breadth-first oracles:
//! distances, projections, gate property, sphere dichotomy and closing
//! squares are recomputed from scratch on explicit balls.

use std::collections::{BTreeSet, HashMap, VecDeque};

use rab_core::building::{Building, Chamber, SphereCase};
use rab_core::diagram::{Diagram, TypeIndex, TypeSet};
use rab_core::words::Parameters;

fn shapes() -> Vec<Building> {
    vec![
        Building::new(
            Diagram::numbered(2, &[(1, 2)]).unwrap(),
            Parameters::uniform(2, 3).unwrap(),
        )
        .unwrap(),
        Building::new(
            Diagram::numbered(2, &[(1, 2)]).unwrap(),
            Parameters::new(vec![2, 3]).unwrap(),
        )
        .unwrap(),
        Building::new(
            Diagram::numbered(3, &[(2, 3)]).unwrap(),
            Parameters::uniform(3, 3).unwrap(),
        )
        .unwrap(),
        Building::new(
            Diagram::numbered(3, &[(2, 3)]).unwrap(),
            Parameters::new(vec![3, 2, 2]).unwrap(),
        )
        .unwrap(),
    ]
}

/// Graph-theoretic BFS distances from a source, inside an explicit ball.
fn bfs_distances(b: &Building, ball: &[Chamber], from: &Chamber) -> HashMap<Chamber, usize> {
    let inside: BTreeSet<&Chamber> = ball.iter().collect();
    let mut dist = HashMap::new();
    dist.insert(from.clone(), 0usize);
    let mut queue = VecDeque::from([from.clone()]);
    while let Some(c) = queue.pop_front() {
        let d = dist[&c];
        for (_, n) in b.neighbors(&c) {
            if inside.contains(&n) && !dist.contains_key(&n) {
                dist.insert(n.clone(), d + 1);
                queue.push_back(n);
            }
        }
    }
    dist
}

#[test]
fn algebraic_distance_matches_bfs() {
    for b in shapes() {
        let ball = b.ball(&b.base(), 4, 200_000).unwrap();
        let oracle = bfs_distances(&b, ball.chambers(), &b.base());
        for c in ball.chambers() {
            assert_eq!(b.dist(&b.base(), c), oracle[c], "distance mismatch at {c:?}");
        }
    }
}

#[test]
fn minimal_gallery_length_matches_bfs() {
    for b in shapes() {
        // a radius-5 ball so that galleries between radius-2 chambers stay inside
        let ball = b.ball(&b.base(), 5, 200_000).unwrap();
        let near: Vec<&Chamber> = ball
            .chambers()
            .iter()
            .filter(|c| ball.dist_to_center(c).unwrap() <= 2)
            .collect();
        for (k, c) in near.iter().enumerate() {
            let oracle = bfs_distances(&b, ball.chambers(), c);
            for e in near.iter().skip(k) {
                let g = b.minimal_gallery(c, e);
                assert!(b.is_minimal(&g));
                assert_eq!(g.len(), oracle[*e]);
            }
        }
    }
}

#[test]
fn project_residue_matches_argmin_oracle() {
    for b in shapes() {
        let ball = b.ball(&b.base(), 4, 200_000).unwrap();
        // all panels and a few larger residues meeting the ball
        let mut residues: BTreeSet<rab_core::ResidueKey> = BTreeSet::new();
        for c in ball.chambers() {
            for i in b.diagram().types() {
                residues.insert(b.panel(c, i));
            }
            residues.insert(b.residue_key(c, b.diagram().all_types()));
            if b.diagram().rank() >= 2 {
                let two: TypeSet = b.diagram().types().take(2).collect();
                residues.insert(b.residue_key(c, two));
            }
        }
        for r in residues {
            // candidate set: residue members inside the ball
            let members: Vec<&Chamber> = ball
                .chambers()
                .iter()
                .filter(|c| b.residue_key(c, r.types) == r)
                .collect();
            if members.is_empty() {
                continue;
            }
            for c in ball.chambers().iter().take(60) {
                let proj = b.project_residue(c, &r);
                if !ball.contains(&proj) {
                    continue;
                }
                let best = members.iter().map(|m| b.dist(c, m)).min().unwrap();
                let argmin: Vec<_> = members
                    .iter()
                    .filter(|m| b.dist(c, m) == best)
                    .collect();
                assert_eq!(argmin.len(), 1, "projection not unique on {r:?}");
                assert_eq!(&proj, *argmin[0]);
            }
        }
    }
}

#[test]
fn panel_closed_projection_gate_property() {
    for b in shapes() {
        let i0 = TypeIndex(0);
        let sets = vec![
            b.panel_closed_set(vec![b.base()]).unwrap(),
            b.panel_closed_set(b.panel_chambers(&b.panel(&b.base(), i0)).unwrap())
                .unwrap(),
        ];
        let ball = b.ball(&b.base(), 4, 200_000).unwrap();
        for set in sets {
            for c in ball.chambers() {
                let (proj, d) = b.project_panel_closed(&set, c).unwrap();
                // oracle: exhaustive argmin
                let best = set.chambers().iter().map(|x| b.dist(x, c)).min().unwrap();
                assert_eq!(d, best);
                let argmin: Vec<_> = set
                    .chambers()
                    .iter()
                    .filter(|x| b.dist(x, c) == best)
                    .collect();
                assert_eq!(argmin.len(), 1);
                assert_eq!(&proj, argmin[0]);
                // gate property: a minimal gallery to each member through proj
                for e in set.chambers() {
                    assert_eq!(
                        b.dist(c, &proj) + b.dist(&proj, e),
                        b.dist(c, e),
                        "gate property fails: {c:?} → {e:?} via {proj:?}"
                    );
                }
            }
        }
    }
}

#[test]
fn sphere_dichotomy_exhaustive() {
    for b in shapes() {
        let set = b.panel_closed_set(vec![b.base()]).unwrap();
        let ball = b.ball(&b.base(), 4, 200_000).unwrap();
        let mut seen = BTreeSet::new();
        for c in ball.chambers() {
            for i in b.diagram().types() {
                let p = b.panel(c, i);
                if seen.insert(p.clone()) {
                    // every panel meeting the ball falls in exactly one case
                    let case = b.sphere_case(&p, &set).unwrap();
                    match case {
                        SphereCase::Parallel(p2) => {
                            assert!(set.contains(&p2.rep));
                        }
                        SphereCase::Gate(gate) => assert!(set.contains(&gate)),
                    }
                }
            }
        }
    }
}

#[test]
fn concave_gallery_is_minimal_and_concave() {
    for b in shapes() {
        let set = b.panel_closed_set(vec![b.base()]).unwrap();
        let ball = b.ball(&b.base(), 3, 200_000).unwrap();
        let chambers = ball.chambers();
        let step = (chambers.len() / 15).max(1);
        for c1 in chambers.iter().step_by(step) {
            for c2 in chambers.iter().step_by(step) {
                let cg = b.concave_gallery(c1, c2, &set).unwrap();
                assert!(b.is_minimal(&cg.gallery));
                assert_eq!(cg.gallery.start(), c1);
                assert_eq!(cg.gallery.end(), c2);
                let dists: Vec<usize> = cg
                    .gallery
                    .chambers
                    .iter()
                    .map(|v| b.dist_to_set(&set, v))
                    .collect();
                for m in 1..dists.len() {
                    if m <= cg.j {
                        assert_eq!(dists[m] + 1, dists[m - 1]);
                    } else if m <= cg.k {
                        assert_eq!(dists[m], dists[m - 1]);
                    } else {
                        assert_eq!(dists[m], dists[m - 1] + 1);
                    }
                }
            }
        }
    }
}

#[test]
fn closing_squares_sweep() {
    // every adjacent triple matching a precondition closes, with zero
    // errors; tree shapes contribute no configurations (no commuting pair)
    let mut checked = 0usize;
    for b in shapes() {
        for set in [
            b.panel_closed_set(vec![b.base()]).unwrap(),
            b.panel_closed_set(b.panel_chambers(&b.panel(&b.base(), TypeIndex(0))).unwrap())
                .unwrap(),
        ] {
            let ball = b.ball(&b.base(), 4, 200_000).unwrap();
            for c2 in ball.chambers() {
                let d2 = b.dist_to_set(&set, c2);
                let nbrs = b.neighbors(c2);
                for (i, c1) in &nbrs {
                    for (j, c3) in &nbrs {
                        if i == j || c1 == c3 {
                            continue;
                        }
                        let (d1, d3) = (b.dist_to_set(&set, c1), b.dist_to_set(&set, c3));
                        if d1 == d3 && d2 == d1 + 1 && d1 >= 1 {
                            let sq = b.closing_square(&set, c1, c2, c3, 1).unwrap();
                            assert_eq!(b.dist_to_set(&set, &sq.d), d1 - 1);
                            checked += 1;
                        } else if d1 == d2 && d3 + 1 == d1 {
                            let sq = b.closing_square(&set, c1, c2, c3, 2).unwrap();
                            assert_eq!(b.dist_to_set(&set, &sq.d), d3);
                            checked += 1;
                        }
                    }
                }
            }
        }
    }
    assert!(checked > 100, "sweep too small: {checked}");
}

#[test]
fn tree_wall_distance_epsilon_range() {
    for b in shapes() {
        let ball = b.ball(&b.base(), 5, 200_000).unwrap();
        let inner: Vec<&Chamber> = ball
            .chambers()
            .iter()
            .filter(|c| ball.dist_to_center(c).unwrap() <= 2)
            .collect();
        for i in b.diagram().types() {
            for c1 in &inner {
                for c2 in &inner {
                    let lhs = b.tw_distance(i, c1, c2, &ball).unwrap();
                    let di = b.dist_i(i, c1, c2);
                    let eps = lhs as isize - 2 * di as isize;
                    assert!(
                        (-1..=1).contains(&eps),
                        "ε = {eps} for {c1:?}, {c2:?}, type {}",
                        i.0
                    );
                    assert!(lhs <= b.dist(c1, c2));
                }
            }
        }
    }
}

#[test]
fn residue_convexity() {
    // minimal galleries between residue members stay in the residue
    for b in shapes() {
        let ball = b.ball(&b.base(), 3, 200_000).unwrap();
        for c in ball.chambers().iter().step_by(7) {
            let two: TypeSet = b.diagram().types().take(2).collect();
            let r = b.residue_key(c, two);
            let members: Vec<&Chamber> = ball
                .chambers()
                .iter()
                .filter(|x| b.residue_key(x, two) == r)
                .collect();
            for (k, m1) in members.iter().enumerate() {
                for m2 in members.iter().skip(k + 1) {
                    for x in b.interval(m1, m2) {
                        assert_eq!(b.residue_key(&x, two), r);
                    }
                }
            }
        }
    }
}
