#![allow(dead_code)] // each test binary uses a different slice of this module

//! Shared test support: seeded random graph corpora, brute-force oracles,
//! and small finite-group machinery used to verify letter semantics and
//! longest-element automorphisms independently of the library's table-driven
//! implementations.

use artin_core::algebra::{Cyc, CyclotomicField, Rat};
use artin_core::graph::{DefiningGraph, Vertex};
use num_bigint::BigInt;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, BTreeSet};

// ---------------------------------------------------------------------------
// Corpora.

/// A random connected labelled graph on `n` vertices: a random spanning tree
/// plus extra edges with probability `extra_p`, labels drawn uniformly from
/// `labels` (absence, the infinite label, only happens on non-tree pairs).
pub fn random_connected_graph(
    rng: &mut ChaCha8Rng,
    n: usize,
    labels: &[u32],
    extra_p: f64,
) -> DefiningGraph {
    let vertices: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let mut edges = Vec::new();
    let mut tree_pairs = BTreeSet::new();
    for i in 1..n {
        let parent = rng.gen_range(0..i);
        tree_pairs.insert((parent, i));
        let m = labels[rng.gen_range(0..labels.len())];
        edges.push((vertices[parent].clone(), vertices[i].clone(), m));
    }
    for i in 0..n {
        for j in i + 1..n {
            if !tree_pairs.contains(&(i, j)) && rng.gen_bool(extra_p) {
                let m = labels[rng.gen_range(0..labels.len())];
                edges.push((vertices[i].clone(), vertices[j].clone(), m));
            }
        }
    }
    DefiningGraph::from_parts(vertices, edges).expect("random graph is well-formed")
}

/// All connected unlabelled graphs on exactly `n` vertices, with every edge
/// labelled 3 (the label is irrelevant to block structure).
pub fn all_connected_graphs(n: usize) -> Vec<DefiningGraph> {
    let vertices: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .collect();
    let mut out = Vec::new();
    for mask in 0u64..(1 << pairs.len()) {
        let edges: Vec<(String, String, u32)> = pairs
            .iter()
            .enumerate()
            .filter(|(k, _)| mask & (1 << k) != 0)
            .map(|(_, &(i, j))| (vertices[i].clone(), vertices[j].clone(), 3))
            .collect();
        let g = DefiningGraph::from_parts(vertices.clone(), edges).unwrap();
        if oracle_connected(&g, &g.vertex_set()) {
            out.push(g);
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Brute-force structural oracles (independent of the library's block-cut and
// component machinery: these only read vertex names and labels).

pub fn oracle_connected(g: &DefiningGraph, subset: &BTreeSet<Vertex>) -> bool {
    let verts: Vec<&Vertex> = subset.iter().collect();
    if verts.is_empty() {
        return true;
    }
    let mut seen = BTreeSet::from([verts[0].clone()]);
    let mut stack = vec![verts[0].clone()];
    while let Some(u) = stack.pop() {
        for v in &verts {
            if !seen.contains(*v) && g.label(&u, v).is_some() {
                seen.insert((*v).clone());
                stack.push((*v).clone());
            }
        }
    }
    seen.len() == subset.len()
}

/// Vertices whose deletion disconnects the induced subgraph.
pub fn oracle_cut_vertices(g: &DefiningGraph, subset: &BTreeSet<Vertex>) -> BTreeSet<Vertex> {
    subset
        .iter()
        .filter(|v| {
            let mut rest = subset.clone();
            rest.remove(*v);
            !rest.is_empty() && !oracle_connected(g, &rest)
        })
        .cloned()
        .collect()
}

/// Maximal connected induced cut-vertex-free subgraphs by subset enumeration.
pub fn oracle_chunks(g: &DefiningGraph) -> Vec<BTreeSet<Vertex>> {
    let names: Vec<Vertex> = g.vertices().to_vec();
    let n = names.len();
    let mut candidates: Vec<BTreeSet<Vertex>> = Vec::new();
    for mask in 1u64..(1 << n) {
        let subset: BTreeSet<Vertex> = (0..n)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| names[i].clone())
            .collect();
        if oracle_connected(g, &subset) && oracle_cut_vertices(g, &subset).is_empty() {
            candidates.push(subset);
        }
    }
    let mut maximal: Vec<BTreeSet<Vertex>> = candidates
        .iter()
        .filter(|c| {
            !candidates
                .iter()
                .any(|other| *c != other && c.is_subset(other))
        })
        .cloned()
        .collect();
    maximal.sort();
    maximal
}

// ---------------------------------------------------------------------------
// Finite dihedral groups, for verifying elementary-ribbon letter semantics in
// the Coxeter quotient.

/// Elements of the dihedral group of order `2m`: rotations and reflections
/// indexed mod `m`. The generators map to `Ref(0)` and `Ref(1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dih {
    Rot(i64),
    Ref(i64),
}

impl Dih {
    pub fn mul(self, other: Dih, m: i64) -> Dih {
        let norm = |k: i64| k.rem_euclid(m);
        match (self, other) {
            (Dih::Rot(i), Dih::Rot(j)) => Dih::Rot(norm(i + j)),
            (Dih::Rot(i), Dih::Ref(j)) => Dih::Ref(norm(i + j)),
            (Dih::Ref(i), Dih::Rot(j)) => Dih::Ref(norm(i - j)),
            (Dih::Ref(i), Dih::Ref(j)) => Dih::Rot(norm(i - j)),
        }
    }

    pub fn inv(self, m: i64) -> Dih {
        match self {
            Dih::Rot(i) => Dih::Rot((-i).rem_euclid(m)),
            r @ Dih::Ref(_) => r,
        }
    }
}

/// Image of the alternating word `prod(first, second, len)` where the two
/// generators map to `Ref(0)` and `Ref(1)`.
pub fn dihedral_prod(first: Dih, second: Dih, len: u32, m: i64) -> Dih {
    let mut acc = Dih::Rot(0);
    for i in 0..len {
        let g = if i % 2 == 0 { first } else { second };
        acc = acc.mul(g, m);
    }
    acc
}

// ---------------------------------------------------------------------------
// Exact Coxeter-group breadth-first search: the independent oracle for
// longest-element diagram automorphisms. Elements are matrices of the
// geometric reflection representation over a cyclotomic field.

pub struct CoxeterGroup {
    field: CyclotomicField,
    rank: usize,
    generators: Vec<Vec<Vec<Cyc>>>,
}

fn lcm(a: u32, b: u32) -> u32 {
    fn gcd(mut a: u32, mut b: u32) -> u32 {
        while b != 0 {
            let t = a % b;
            a = b;
            b = t;
        }
        a
    }
    a / gcd(a, b) * b
}

impl CoxeterGroup {
    /// Builds the reflection representation of the Coxeter system on `order`
    /// (all pairwise labels must be finite).
    pub fn new(g: &DefiningGraph, order: &[Vertex]) -> Self {
        let k = order.len();
        let mut n = 4;
        for a in 0..k {
            for b in a + 1..k {
                let m = g
                    .label(&order[a], &order[b])
                    .expect("oracle needs a free-of-infinity subset");
                n = lcm(n, 2 * m);
            }
        }
        let field = CyclotomicField::new(n);
        let mut generators = Vec::with_capacity(k);
        for i in 0..k {
            // sigma_i(alpha_c) = alpha_c - 2 B(i, c) alpha_i, with
            // B(i, i) = 1 and B(i, c) = -cos(pi/m_ic).
            let mut mat = identity(&field, k);
            for c in 0..k {
                mat[i][c] = if c == i {
                    field.from_rat(Rat::from_integer(BigInt::from(-1)))
                } else {
                    let m = g.label(&order[i], &order[c]).unwrap();
                    field.two_cos_pi_over(m)
                };
            }
            generators.push(mat);
        }
        CoxeterGroup {
            field,
            rank: k,
            generators,
        }
    }

    fn mat_mul(&self, a: &[Vec<Cyc>], b: &[Vec<Cyc>]) -> Vec<Vec<Cyc>> {
        let k = self.rank;
        (0..k)
            .map(|r| {
                (0..k)
                    .map(|c| {
                        let mut acc = self.field.zero();
                        for t in 0..k {
                            acc = self.field.add(&acc, &self.field.mul(&a[r][t], &b[t][c]));
                        }
                        acc
                    })
                    .collect()
            })
            .collect()
    }

    fn key(mat: &[Vec<Cyc>]) -> String {
        format!("{mat:?}")
    }

    /// Breadth-first search over reduced words: returns the group order and
    /// the matrix of the unique longest element.
    pub fn longest_element(&self) -> (usize, Vec<Vec<Cyc>>) {
        let mut seen: BTreeMap<String, usize> = BTreeMap::new();
        let id = identity(&self.field, self.rank);
        seen.insert(Self::key(&id), 0);
        let mut frontier = vec![id];
        let mut last_level = frontier.clone();
        let mut depth = 0usize;
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for mat in &frontier {
                for gen in &self.generators {
                    let prod = self.mat_mul(gen, mat);
                    let key = Self::key(&prod);
                    if let std::collections::btree_map::Entry::Vacant(e) = seen.entry(key) {
                        e.insert(depth + 1);
                        next.push(prod);
                    }
                }
            }
            if !next.is_empty() {
                last_level = next.clone();
                depth += 1;
            }
            frontier = next;
        }
        assert_eq!(
            last_level.len(),
            1,
            "the longest element of a finite Coxeter group is unique"
        );
        (seen.len(), last_level.into_iter().next().unwrap())
    }

    /// Conjugates each generator by the longest element and reads off the
    /// induced permutation of the generators.
    pub fn longest_element_permutation(&self, order: &[Vertex]) -> BTreeMap<Vertex, Vertex> {
        let (_, w0) = self.longest_element();
        // w0 is an involution, so w0^-1 = w0.
        let mut map = BTreeMap::new();
        for (i, gen) in self.generators.iter().enumerate() {
            let conj = self.mat_mul(&self.mat_mul(&w0, gen), &w0);
            let image = self
                .generators
                .iter()
                .position(|other| Self::key(other) == Self::key(&conj))
                .expect("w0 conjugation permutes the generators");
            map.insert(order[i].clone(), order[image].clone());
        }
        map
    }
}

fn identity(field: &CyclotomicField, k: usize) -> Vec<Vec<Cyc>> {
    (0..k)
        .map(|r| {
            (0..k)
                .map(|c| if r == c { field.one() } else { field.zero() })
                .collect()
        })
        .collect()
}
