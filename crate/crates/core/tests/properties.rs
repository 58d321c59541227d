//! Property tests: canonical-form invariance, the isomorphism/certificate
//! correspondence (cross-checked against brute-force permutation search on
//! small graphs), the two independent routes to sphericity, and random-walk
//! closure properties for ribbons and twists.

mod common;

use artin_core::coxeter;
use artin_core::graph::{DefiningGraph, Vertex};
use artin_core::ribbon;
use artin_core::twist::{self, TwistVerdict};
use common::random_connected_graph;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, BTreeSet};

/// Arbitrary labelled graph on up to `max_n` vertices; label 0 encodes an
/// absent edge.
fn arb_graph(max_n: usize) -> impl Strategy<Value = DefiningGraph> {
    (1..=max_n).prop_flat_map(|n| {
        let pairs = n * (n - 1) / 2;
        proptest::collection::vec(
            prop_oneof![3 => Just(0u32), 5 => 2u32..=7],
            pairs,
        )
        .prop_map(move |labels| {
            let vertices: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
            let mut edges = Vec::new();
            let mut k = 0;
            for i in 0..n {
                for j in i + 1..n {
                    if labels[k] != 0 {
                        edges.push((vertices[i].clone(), vertices[j].clone(), labels[k]));
                    }
                    k += 1;
                }
            }
            DefiningGraph::from_parts(vertices, edges).unwrap()
        })
    })
}

/// A permutation of `0..n` as a strategy.
fn arb_permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<usize>>()).prop_shuffle()
}

fn permuted(g: &DefiningGraph, perm: &[usize]) -> DefiningGraph {
    // Rename v_i to v_perm(i) — a relabelled isomorphic copy.
    let map: BTreeMap<Vertex, Vertex> = (0..g.vertex_count())
        .map(|i| (format!("v{i}"), format!("v{}", perm[i])))
        .collect();
    g.renamed(&map).unwrap()
}

/// Label-preserving bijection search by brute force over all vertex
/// bijections; the independent oracle for certificate semantics.
fn brute_force_isomorphic(a: &DefiningGraph, b: &DefiningGraph) -> bool {
    if a.vertex_count() != b.vertex_count() {
        return false;
    }
    let bn: Vec<Vertex> = b.vertices().to_vec();
    let an: Vec<Vertex> = a.vertices().to_vec();
    permutations(&bn).into_iter().any(|image| {
        an.iter().enumerate().all(|(i, u)| {
            an.iter().enumerate().all(|(j, v)| {
                i >= j || a.label(u, v) == b.label(&image[i], &image[j])
            })
        })
    })
}

fn permutations<T: Clone>(items: &[T]) -> Vec<Vec<T>> {
    if items.is_empty() {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for (i, first) in items.iter().enumerate() {
        let mut rest: Vec<T> = items.to_vec();
        rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, first.clone());
            out.push(tail);
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Certificates never depend on the vertex naming or input order.
    #[test]
    fn canonical_form_is_permutation_invariant(
        (g, perm) in arb_graph(6).prop_flat_map(|g| {
            let n = g.vertex_count();
            (Just(g), arb_permutation(n))
        })
    ) {
        let relabelled = permuted(&g, &perm);
        prop_assert_eq!(g.canonical_form(), relabelled.canonical_form());
        prop_assert!(g.is_isomorphic(&relabelled).is_some());
    }

    /// Equal certificates characterise isomorphism, with brute-force
    /// bijection search as the oracle.
    #[test]
    fn certificates_match_brute_force_isomorphism(
        a in arb_graph(6),
        b in arb_graph(6),
    ) {
        let same_cert = a.canonical_form() == b.canonical_form();
        prop_assert_eq!(same_cert, brute_force_isomorphic(&a, &b));
        match a.is_isomorphic(&b) {
            Some(map) => {
                prop_assert!(same_cert);
                for u in a.vertices() {
                    for v in a.vertices() {
                        if u < v {
                            prop_assert_eq!(a.label(u, v), b.label(&map[u], &map[v]));
                        }
                    }
                }
            }
            None => prop_assert!(!same_cert),
        }
    }

    /// The Gram positive-definiteness route and the finite-type table route
    /// agree on every indecomposable subset.
    #[test]
    fn spherical_iff_finite_type(g in arb_graph(5)) {
        let names: Vec<Vertex> = g.vertices().to_vec();
        let n = names.len();
        for mask in 1u32..(1 << n) {
            let subset: BTreeSet<Vertex> = (0..n)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| names[i].clone())
                .collect();
            if coxeter::indecomposable_factors(&g, &subset).unwrap().len() != 1 {
                continue;
            }
            let spherical = coxeter::is_spherical(&g, &subset).unwrap();
            let table = coxeter::finite_type(&g, &subset).unwrap();
            prop_assert_eq!(
                spherical,
                table.is_some(),
                "routes disagree on {:?} in {}",
                subset,
                g.to_json()
            );
        }
    }

    /// Structural invariants of the classification summary: XXXL implies
    /// large type, the dihedral flag pins the shape, and sphericity holds
    /// exactly when every indecomposable factor has a finite family.
    #[test]
    fn coxeter_class_invariants(g in arb_graph(6)) {
        let all = g.vertex_set();
        let class = coxeter::classify(&g, &all).unwrap();
        if class.xxxl {
            prop_assert!(class.large_type);
        }
        if class.dihedral {
            prop_assert_eq!(g.vertex_count(), 2);
            let vs = g.vertices();
            prop_assert!(g.label(&vs[0], &vs[1]).is_some_and(|m| m >= 3));
        }
        let factors = coxeter::indecomposable_factors(&g, &all).unwrap();
        prop_assert_eq!(
            class.spherical,
            class.finite_components.len() == factors.len(),
            "spherical iff every factor is finite-type"
        );
    }

    /// Factors are all singletons exactly when every pair commutes (the
    /// complete graph with all labels 2, i.e. free abelian).
    #[test]
    fn singleton_factors_iff_free_abelian(g in arb_graph(5)) {
        let all = g.vertex_set();
        let factors = coxeter::indecomposable_factors(&g, &all).unwrap();
        let singletons = factors.iter().all(|f| f.len() == 1);
        let free_abelian = g.vertices().iter().all(|u| {
            g.vertices()
                .iter()
                .all(|v| u == v || g.label(u, v) == Some(2))
        });
        prop_assert_eq!(singletons, free_abelian);
    }
}

/// Random walks over elementary ribbon letters always validate, compose, and
/// inverse-cancel.
#[test]
fn ribbon_random_walks_validate() {
    let seed = 0xB1u64;
    println!("properties seed: {seed:#x}");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _trial in 0..100 {
        let n = rng.gen_range(2..=6);
        let g = random_connected_graph(&mut rng, n, &[2, 3, 4, 5], 0.4);
        let start = g.vertices()[rng.gen_range(0..n)].clone();
        let mut letters = Vec::new();
        let mut at = start.clone();
        for _step in 0..rng.gen_range(0..8) {
            let options = ribbon::elementary_ribbons(&g, &at).unwrap();
            let (target, letter) = options[rng.gen_range(0..options.len())].clone();
            letters.push(letter);
            at = target;
        }
        let word = ribbon::validate_ribbon(&g, &letters, &start, &at).unwrap();
        // Chain moves exactly at odd letters.
        for (k, letter) in word.letters.iter().enumerate() {
            let moved = word.chain[k] != word.chain[k + 1];
            let odd = matches!(letter.kind, ribbon::RibbonLetterKind::OddGarside { .. });
            assert_eq!(moved, odd, "chain moves exactly across odd letters");
        }
        // Inverse composes to a reduced-empty loop word.
        let inv = word.inverse();
        let round = ribbon::compose(&g, &word, &inv).unwrap();
        assert_eq!(round.source, round.target);
        assert!(ribbon::free_reduce(&round.letters).is_empty());
    }
}

/// A graph is always twist equivalent to the result of a random twist walk,
/// and the emitted witness replays into the right isomorphism class.
#[test]
fn twist_walks_stay_equivalent() {
    let seed = 0xB2u64;
    println!("properties seed: {seed:#x}");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut nontrivial = 0;
    for _trial in 0..40 {
        let n = rng.gen_range(3..=6);
        let g = random_connected_graph(&mut rng, n, &[2, 3, 4, 5], 0.3);
        let mut current = g.clone();
        for _step in 0..rng.gen_range(1..=3) {
            let moves = twist::enumerate_twists(&current).unwrap();
            if moves.is_empty() {
                break;
            }
            let mv = &moves[rng.gen_range(0..moves.len())];
            current = twist::apply_twist(&current, mv).unwrap();
        }
        if current.canonical_form() != g.canonical_form() {
            nontrivial += 1;
        }
        match twist::are_twist_equivalent(&g, &current, 50_000).unwrap() {
            TwistVerdict::Equivalent { witness } => {
                let state = witness.replay(&g).unwrap();
                assert!(state.graph.is_isomorphic(&current).is_some());
            }
            v => panic!("walk endpoints must stay equivalent, got {v:?}"),
        }
        // Symmetry: the reverse direction agrees.
        assert!(matches!(
            twist::are_twist_equivalent(&current, &g, 50_000).unwrap(),
            TwistVerdict::Equivalent { .. }
        ));
    }
    println!("nontrivial walks: {nontrivial}");
}

/// Orbit members all share the twist invariants of the root.
#[test]
fn orbit_members_share_invariants() {
    let seed = 0xB3u64;
    println!("properties seed: {seed:#x}");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _trial in 0..25 {
        let n = rng.gen_range(2..=6);
        let g = random_connected_graph(&mut rng, n, &[2, 3, 4], 0.3);
        let orbit = twist::twist_orbit(&g, 50_000).unwrap();
        assert!(!orbit.truncated);
        for rep in orbit.representatives.values() {
            assert_eq!(rep.vertex_count(), g.vertex_count());
            assert_eq!(rep.label_multiset(), g.label_multiset());
            assert_eq!(rep.odd_components().len(), g.odd_components().len());
        }
        // The spanning tree covers every non-root certificate exactly once.
        let mut children: Vec<_> = orbit.tree.iter().map(|e| e.child.clone()).collect();
        children.sort();
        children.dedup();
        assert_eq!(children.len(), orbit.size() - 1);
    }
}

/// Table-coverage audit: whenever the certifier classes a chunk, the class's
/// defining predicate is independently re-checked from the raw labels, so the
/// certifier can never claim an unlisted class.
#[test]
fn chunk_class_audit() {
    use artin_core::certify::{self, ChunkClass};
    let seed = 0xB4u64;
    println!("properties seed: {seed:#x}");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut classed = 0;
    for _trial in 0..150 {
        let n = rng.gen_range(2..=7);
        let g = random_connected_graph(&mut rng, n, &[2, 3, 4, 5, 6, 7], 0.3);
        for chunk in g.big_chunks().chunks {
            let class = certify::chunk_class(&g, &chunk).unwrap();
            let members: Vec<&Vertex> = chunk.iter().collect();
            let labels: Vec<Option<u32>> = members
                .iter()
                .enumerate()
                .flat_map(|(i, u)| {
                    members[i + 1..].iter().map(|v| g.label(u, v)).collect::<Vec<_>>()
                })
                .collect();
            let Some(class) = class else { continue };
            classed += 1;
            match class {
                ChunkClass::RightAngled => {
                    assert!(labels.iter().all(|l| l.is_none() || *l == Some(2)))
                }
                ChunkClass::Dihedral => {
                    assert_eq!(chunk.len(), 2);
                    assert!(labels[0].is_some_and(|m| m >= 3));
                }
                ChunkClass::LargeTriangleFree | ChunkClass::LargeFreeOfInfinity => {
                    assert!(labels.iter().all(|l| l.is_none_or(|m| m >= 3)));
                    if class == ChunkClass::LargeFreeOfInfinity {
                        assert!(labels.iter().all(|l| l.is_some()));
                    }
                }
                ChunkClass::Xxxl => {
                    assert!(labels.iter().all(|l| l.is_none_or(|m| m >= 6)))
                }
                ChunkClass::SphericalA(n) => {
                    assert!(n >= 3);
                    assert_eq!(
                        coxeter::finite_type(&g, &chunk).unwrap(),
                        Some(coxeter::FiniteType::A(n))
                    );
                }
                ChunkClass::SphericalB(n) => {
                    assert!(n >= 3);
                    assert_eq!(
                        coxeter::finite_type(&g, &chunk).unwrap(),
                        Some(coxeter::FiniteType::B(n))
                    );
                }
                ChunkClass::SphericalD(n) => {
                    assert!(n >= 4 && n != 5);
                    assert_eq!(
                        coxeter::finite_type(&g, &chunk).unwrap(),
                        Some(coxeter::FiniteType::D(n))
                    );
                }
            }
        }
    }
    println!("chunks classed: {classed}");
    assert!(classed > 50);
}

/// With every label at least 6, all chunks are XXXL-coverable and all cliques
/// large-type, so the verdict depends only on connectivity structure.
#[test]
fn all_big_labels_certify_by_structure() {
    use artin_core::certify::{self, VerdictLevel};
    let seed = 0xB5u64;
    println!("properties seed: {seed:#x}");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _trial in 0..60 {
        let n = rng.gen_range(2..=7);
        let g = random_connected_graph(&mut rng, n, &[6, 7, 9, 12], 0.3);
        let verdict = certify::strong_twist_verdict(&g).unwrap();
        assert_eq!(verdict.level, VerdictLevel::StrongCertified, "{}", g.to_json());
    }
}

/// The rank-4 fork: the table says the D4 longest element acts trivially;
/// the exact breadth-first oracle agrees.
#[test]
fn d4_longest_element_is_trivial_by_oracle() {
    let g = DefiningGraph::parse(
        r#"{"vertices":["c","t1","t2","t3"],
            "edges":[["c","t1",3],["c","t2",3],["c","t3",3],
                     ["t1","t2",2],["t1","t3",2],["t2","t3",2]]}"#,
    )
    .unwrap();
    let all = g.vertex_set();
    let table = coxeter::longest_element_automorphism(&g, &all).unwrap();
    assert!(table.iter().all(|(k, v)| k == v), "D4 pi is the identity");
    let order: Vec<Vertex> = all.iter().cloned().collect();
    let group = common::CoxeterGroup::new(&g, &order);
    let (order_count, _) = group.longest_element();
    assert_eq!(order_count, 192, "the D4 Coxeter group has order 192");
    assert_eq!(group.longest_element_permutation(&order), table);
}

/// Garside words expand dihedral pairs with the alternating product and stay
/// symbolic in higher rank.
#[test]
fn garside_words_have_expected_shapes() {
    let g = DefiningGraph::parse(
        r#"{"vertices":["a","b","c"],
            "edges":[["a","b",5],["a","c",2],["b","c",3]]}"#,
    )
    .unwrap();
    let pair: BTreeSet<Vertex> = ["a", "b"].iter().map(|s| s.to_string()).collect();
    let word = coxeter::garside_word(&g, &pair).unwrap();
    assert_eq!(word.to_string(), "a.b.a.b.a");
    let whole = g.vertex_set();
    // (5,2,3) is H3: spherical and indecomposable, so rank 3 is symbolic.
    let word = coxeter::garside_word(&g, &whole).unwrap();
    assert_eq!(word.len(), 1);
}
