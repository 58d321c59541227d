//! Canonical forms and isomorphism of labelled graphs.
//!
//! The canonical form is a byte certificate: two graphs yield equal
//! certificates exactly when they are isomorphic as labelled graphs. It is
//! computed by iterative colour refinement (over label multisets) followed by
//! backtracking over the orderings compatible with the final colouring,
//! keeping the lexicographically least adjacency encoding. No names enter the
//! certificate, so it is invariant under every relabeling of the input.
//!
//! This is a desk-scale engine: refinement prunes well on irregular graphs,
//! but highly symmetric graphs fall back to factorial search within colour
//! classes. The search entry points elsewhere in the crate cap inputs at
//! [`crate::DEFAULT_VERTEX_CAP`] vertices.

use crate::graph::{DefiningGraph, Vertex};
use std::collections::BTreeMap;
use std::fmt;

/// A deterministic isomorphism certificate.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalForm(pub Vec<u8>);

impl CanonicalForm {
    pub fn to_hex(&self) -> String {
        self.0.iter().map(|b| format!("{b:02x}")).collect()
    }
}

impl fmt::Display for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

/// Label codes used in encodings: 0 stands for the infinite label.
fn label_code(g: &DefiningGraph, i: usize, j: usize) -> u32 {
    g.label_idx(i, j).unwrap_or(0)
}

/// Iterative refinement. Colours start equal and are split by the sorted
/// multiset of `(label, neighbour colour)` pairs over all other vertices,
/// which covers both finite labels and the infinite-label "non-edges".
/// The returned colour ids are canonical: they are assigned in sorted
/// signature order, so isomorphic graphs get identical colour data.
fn refine(g: &DefiningGraph) -> Vec<usize> {
    let n = g.vertex_count();
    let mut colors = vec![0usize; n];
    let mut class_count = 1;
    loop {
        let mut sigs: Vec<(usize, Vec<(u32, usize)>)> = Vec::with_capacity(n);
        for i in 0..n {
            let mut row: Vec<(u32, usize)> = (0..n)
                .filter(|&j| j != i)
                .map(|j| (label_code(g, i, j), colors[j]))
                .collect();
            row.sort_unstable();
            sigs.push((colors[i], row));
        }
        let mut sorted: Vec<&(usize, Vec<(u32, usize)>)> = sigs.iter().collect();
        sorted.sort();
        sorted.dedup();
        let ids: BTreeMap<&(usize, Vec<(u32, usize)>), usize> = sorted
            .iter()
            .enumerate()
            .map(|(id, sig)| (*sig, id))
            .collect();
        let next: Vec<usize> = sigs.iter().map(|s| ids[s]).collect();
        let next_count = ids.len();
        if next_count == class_count && next == colors {
            return colors;
        }
        class_count = next_count;
        colors = next;
    }
}

struct Search<'a> {
    g: &'a DefiningGraph,
    colors: Vec<usize>,
    /// Colour class expected at each position of the ordering.
    position_color: Vec<usize>,
    best: Option<(Vec<u32>, Vec<usize>)>,
}

impl Search<'_> {
    /// Depth-first over orderings that list colour classes in canonical
    /// order, pruning whenever the partial encoding exceeds the best.
    fn run(&mut self, order: &mut Vec<usize>, used: &mut Vec<bool>, encoding: &mut Vec<u32>) {
        let pos = order.len();
        if pos == self.g.vertex_count() {
            let better = match &self.best {
                None => true,
                Some((enc, _)) => encoding[..] < enc[..],
            };
            if better {
                self.best = Some((encoding.clone(), order.clone()));
            }
            return;
        }
        let want = self.position_color[pos];
        for v in 0..self.g.vertex_count() {
            if used[v] || self.colors[v] != want {
                continue;
            }
            let row_start = encoding.len();
            for &u in order.iter() {
                encoding.push(label_code(self.g, v, u));
            }
            let prune = match &self.best {
                None => false,
                Some((enc, _)) => encoding[..] > enc[..encoding.len()],
            };
            if !prune {
                order.push(v);
                used[v] = true;
                self.run(order, used, encoding);
                used[v] = false;
                order.pop();
            }
            encoding.truncate(row_start);
        }
    }
}

fn canonical_order(g: &DefiningGraph) -> (Vec<u32>, Vec<usize>) {
    let n = g.vertex_count();
    if n == 0 {
        return (Vec::new(), Vec::new());
    }
    let colors = refine(g);
    let mut position_color = colors.clone();
    position_color.sort_unstable();
    let mut search = Search {
        g,
        colors,
        position_color,
        best: None,
    };
    let mut order = Vec::with_capacity(n);
    let mut used = vec![false; n];
    let mut encoding = Vec::new();
    search.run(&mut order, &mut used, &mut encoding);
    search.best.expect("at least one ordering exists")
}

impl DefiningGraph {
    /// The canonical certificate of this graph. Equal certificates
    /// characterise labelled-graph isomorphism; the output is deterministic
    /// and independent of vertex names and edge order.
    pub fn canonical_form(&self) -> CanonicalForm {
        let (encoding, _) = canonical_order(self);
        let mut bytes = Vec::with_capacity(4 + 4 * encoding.len());
        bytes.extend_from_slice(&(self.vertex_count() as u32).to_le_bytes());
        for code in encoding {
            bytes.extend_from_slice(&code.to_le_bytes());
        }
        CanonicalForm(bytes)
    }

    /// A label-preserving vertex bijection onto `other`, if one exists.
    /// Consistent with [`DefiningGraph::canonical_form`]: a bijection is
    /// found exactly when the certificates agree.
    pub fn is_isomorphic(&self, other: &DefiningGraph) -> Option<BTreeMap<Vertex, Vertex>> {
        if self.vertex_count() != other.vertex_count() {
            return None;
        }
        if self.label_multiset() != other.label_multiset() {
            return None;
        }
        let (enc_a, order_a) = canonical_order(self);
        let (enc_b, order_b) = canonical_order(other);
        if enc_a != enc_b {
            return None;
        }
        let map: BTreeMap<Vertex, Vertex> = order_a
            .iter()
            .zip(order_b.iter())
            .map(|(&i, &j)| {
                (
                    self.vertex_name(i).to_owned(),
                    other.vertex_name(j).to_owned(),
                )
            })
            .collect();
        debug_assert!(is_label_preserving(self, other, &map));
        Some(map)
    }
}

fn is_label_preserving(
    a: &DefiningGraph,
    b: &DefiningGraph,
    map: &BTreeMap<Vertex, Vertex>,
) -> bool {
    for u in a.vertices() {
        for v in a.vertices() {
            if u < v && a.label(u, v) != b.label(&map[u], &map[v]) {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(text: &str) -> DefiningGraph {
        DefiningGraph::parse(text).unwrap()
    }

    #[test]
    fn relabeled_paths_have_equal_certificates() {
        let p1 = g(r#"{"vertices":["a","b","c"],"edges":[["a","b",3],["b","c",3]]}"#);
        let p2 = g(r#"{"vertices":["x","y","z"],"edges":[["y","x",3],["z","y",3]]}"#);
        assert_eq!(p1.canonical_form(), p2.canonical_form());
        assert!(p1.is_isomorphic(&p2).is_some());
    }

    #[test]
    fn label_mismatch_distinguishes() {
        let p1 = g(r#"{"vertices":["a","b","c"],"edges":[["a","b",3],["b","c",3]]}"#);
        let p2 = g(r#"{"vertices":["a","b","c"],"edges":[["a","b",3],["b","c",4]]}"#);
        assert_ne!(p1.canonical_form(), p2.canonical_form());
        assert!(p1.is_isomorphic(&p2).is_none());
    }

    #[test]
    fn path_and_star_are_distinguished() {
        let path = g(
            r#"{"vertices":["a","x","y","c"],
                "edges":[["a","x",3],["x","y",3],["y","c",3]]}"#,
        );
        let star = g(
            r#"{"vertices":["a","x","y","c"],
                "edges":[["a","y",3],["x","y",3],["y","c",3]]}"#,
        );
        assert_ne!(path.canonical_form(), star.canonical_form());
    }

    #[test]
    fn identity_isomorphism_on_self() {
        let graph = g(
            r#"{"vertices":["a","b","c"],"edges":[["a","b",3],["b","c",5]]}"#,
        );
        let iso = graph.is_isomorphic(&graph).unwrap();
        for v in graph.vertices() {
            assert_eq!(&iso[v], v);
        }
    }

    #[test]
    fn different_vertex_counts_are_never_isomorphic() {
        let a = g(r#"{"vertices":["a"],"edges":[]}"#);
        let b = g(r#"{"vertices":["a","b"],"edges":[]}"#);
        assert!(a.is_isomorphic(&b).is_none());
    }

    #[test]
    fn complete_graph_certificate_is_stable() {
        // Fully symmetric input: exercises the equal-prefix branch.
        let k4a = g(
            r#"{"vertices":["a","b","c","d"],
                "edges":[["a","b",3],["a","c",3],["a","d",3],
                         ["b","c",3],["b","d",3],["c","d",3]]}"#,
        );
        let k4b = g(
            r#"{"vertices":["p","q","r","s"],
                "edges":[["q","p",3],["r","p",3],["s","p",3],
                         ["r","q",3],["s","q",3],["s","r",3]]}"#,
        );
        assert_eq!(k4a.canonical_form(), k4b.canonical_form());
    }
}
