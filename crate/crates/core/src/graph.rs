//! Defining-graph data model and structural decompositions.
//!
//! A [`DefiningGraph`] is a finite labelled simplicial graph: an ordered list
//! of distinct vertex names and a symmetric map from unordered vertex pairs to
//! integer labels `m >= 2`. Pairs absent from the map have `m = infinity`;
//! there is no sentinel integer for the infinite label.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use thiserror::Error;

/// Vertex names are plain strings; they stay stable across twist moves.
pub type Vertex = String;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("malformed graph document: {0}")]
    Malformed(String),
    #[error("duplicate vertex `{0}`")]
    DuplicateVertex(String),
    #[error("label {label} on edge {{{a}, {b}}} is below 2")]
    LabelTooSmall { a: String, b: String, label: u32 },
    #[error("loop edge on `{0}`")]
    LoopEdge(String),
    #[error("unknown vertex `{0}` in edge")]
    UnknownVertex(String),
    #[error("conflicting labels {first} and {second} on edge {{{a}, {b}}}")]
    ConflictingLabels {
        a: String,
        b: String,
        first: u32,
        second: u32,
    },
    #[error("operation requires a connected graph")]
    Disconnected,
    #[error("unknown vertex `{0}`")]
    NoSuchVertex(String),
}

/// On-disk form: `{"vertices": [...], "edges": [["a","b",3], ...]}`.
#[derive(Serialize, Deserialize)]
struct GraphFile {
    vertices: Vec<String>,
    edges: Vec<(String, String, u32)>,
}

/// A finite labelled simplicial graph. Edge labels are integers `>= 2`;
/// an absent edge means the label is infinite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DefiningGraph {
    vertices: Vec<Vertex>,
    index: BTreeMap<Vertex, usize>,
    /// Keys are index pairs with `i < j`.
    labels: BTreeMap<(usize, usize), u32>,
}

impl Serialize for DefiningGraph {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let file = GraphFile {
            vertices: self.vertices.clone(),
            edges: self
                .labels
                .iter()
                .map(|(&(i, j), &m)| (self.vertices[i].clone(), self.vertices[j].clone(), m))
                .collect(),
        };
        file.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DefiningGraph {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let file = GraphFile::deserialize(deserializer)?;
        DefiningGraph::from_parts(file.vertices, file.edges)
            .map_err(|e| serde::de::Error::custom(e.to_string()))
    }
}

impl DefiningGraph {
    /// Builds a graph from vertex names and labelled edges, checking every
    /// invariant: distinct vertices, labels `>= 2`, no loops, no unknown
    /// endpoints, no conflicting duplicate edges.
    pub fn from_parts(
        vertices: Vec<String>,
        edges: Vec<(String, String, u32)>,
    ) -> Result<Self, GraphError> {
        let mut index = BTreeMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if index.insert(v.clone(), i).is_some() {
                return Err(GraphError::DuplicateVertex(v.clone()));
            }
        }
        let mut labels = BTreeMap::new();
        for (a, b, m) in edges {
            if a == b {
                return Err(GraphError::LoopEdge(a));
            }
            if m < 2 {
                return Err(GraphError::LabelTooSmall { a, b, label: m });
            }
            let ia = *index.get(&a).ok_or(GraphError::UnknownVertex(a.clone()))?;
            let ib = *index.get(&b).ok_or(GraphError::UnknownVertex(b.clone()))?;
            let key = (ia.min(ib), ia.max(ib));
            if let Some(&old) = labels.get(&key) {
                if old != m {
                    return Err(GraphError::ConflictingLabels {
                        a,
                        b,
                        first: old,
                        second: m,
                    });
                }
            } else {
                labels.insert(key, m);
            }
        }
        Ok(DefiningGraph {
            vertices,
            index,
            labels,
        })
    }

    /// Parses the JSON document format from External Interfaces.
    pub fn parse(text: &str) -> Result<Self, GraphError> {
        let file: GraphFile =
            serde_json::from_str(text).map_err(|e| GraphError::Malformed(e.to_string()))?;
        Self::from_parts(file.vertices, file.edges)
    }

    /// Serialises back to the JSON document format, deterministically.
    pub fn to_json(&self) -> String {
        let file = GraphFile {
            vertices: self.vertices.clone(),
            edges: self
                .labels
                .iter()
                .map(|(&(i, j), &m)| (self.vertices[i].clone(), self.vertices[j].clone(), m))
                .collect(),
        };
        serde_json::to_string(&file).expect("graph serialisation cannot fail")
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex_set(&self) -> BTreeSet<Vertex> {
        self.vertices.iter().cloned().collect()
    }

    pub fn contains_vertex(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn vertex_name(&self, idx: usize) -> &str {
        &self.vertices[idx]
    }

    /// The label of the pair `{i, j}` by index, `None` meaning infinity.
    pub fn label_idx(&self, i: usize, j: usize) -> Option<u32> {
        if i == j {
            return None;
        }
        self.labels.get(&(i.min(j), i.max(j))).copied()
    }

    /// The label of the pair `{a, b}` by name, `None` meaning infinity.
    pub fn label(&self, a: &str, b: &str) -> Option<u32> {
        let ia = self.vertex_index(a)?;
        let ib = self.vertex_index(b)?;
        self.label_idx(ia, ib)
    }

    /// Edges as `(i, j, m)` index triples with `i < j`.
    pub fn edges_idx(&self) -> impl Iterator<Item = (usize, usize, u32)> + '_ {
        self.labels.iter().map(|(&(i, j), &m)| (i, j, m))
    }

    /// Edges as `(a, b, m)` name triples.
    pub fn edges(&self) -> impl Iterator<Item = (&str, &str, u32)> + '_ {
        self.labels.iter().map(|(&(i, j), &m)| {
            (
                self.vertices[i].as_str(),
                self.vertices[j].as_str(),
                m,
            )
        })
    }

    pub fn edge_count(&self) -> usize {
        self.labels.len()
    }

    /// Sorted multiset of edge labels; a cheap twist invariant.
    pub fn label_multiset(&self) -> Vec<u32> {
        let mut labels: Vec<u32> = self.labels.values().copied().collect();
        labels.sort_unstable();
        labels
    }

    /// Indices of vertices adjacent to `i` (finite label).
    pub fn neighbors_idx(&self, i: usize) -> Vec<usize> {
        (0..self.vertices.len())
            .filter(|&j| self.label_idx(i, j).is_some())
            .collect()
    }

    pub fn degree_idx(&self, i: usize) -> usize {
        self.neighbors_idx(i).len()
    }

    /// The induced subgraph on `subset` (names), with induced labels.
    pub fn induced(&self, subset: &BTreeSet<Vertex>) -> Result<Self, GraphError> {
        let vertices: Vec<Vertex> = self
            .vertices
            .iter()
            .filter(|v| subset.contains(*v))
            .cloned()
            .collect();
        for v in subset {
            if !self.contains_vertex(v) {
                return Err(GraphError::NoSuchVertex(v.clone()));
            }
        }
        let mut edges = Vec::new();
        for (a, b, m) in self.edges() {
            if subset.contains(a) && subset.contains(b) {
                edges.push((a.to_owned(), b.to_owned(), m));
            }
        }
        Self::from_parts(vertices, edges)
    }

    /// Applies a vertex relabeling given as a name map; used by tests and by
    /// witness translation. The map must be a bijection on the vertex set.
    pub fn renamed(&self, map: &BTreeMap<Vertex, Vertex>) -> Result<Self, GraphError> {
        let vertices: Vec<Vertex> = self
            .vertices
            .iter()
            .map(|v| {
                map.get(v)
                    .cloned()
                    .ok_or_else(|| GraphError::NoSuchVertex(v.clone()))
            })
            .collect::<Result<_, _>>()?;
        let edges = self
            .edges()
            .map(|(a, b, m)| (map[a].clone(), map[b].clone(), m))
            .collect();
        Self::from_parts(vertices, edges)
    }

    /// Connected components as index sets, computed over finite-label edges.
    pub fn components_idx(&self) -> Vec<BTreeSet<usize>> {
        let n = self.vertices.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut comp = BTreeSet::new();
            let mut queue = VecDeque::from([start]);
            seen[start] = true;
            while let Some(u) = queue.pop_front() {
                comp.insert(u);
                for v in self.neighbors_idx(u) {
                    if !seen[v] {
                        seen[v] = true;
                        queue.push_back(v);
                    }
                }
            }
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components_idx().len() <= 1
    }

    /// One-endedness of the associated group: the graph is connected and has
    /// at least two vertices.
    pub fn is_one_ended(&self) -> bool {
        self.vertices.len() >= 2 && self.is_connected()
    }

    /// Exactly the vertices whose removal disconnects the graph.
    ///
    /// Errors on disconnected input.
    pub fn separating_vertices(&self) -> Result<BTreeSet<Vertex>, GraphError> {
        if !self.is_connected() {
            return Err(GraphError::Disconnected);
        }
        Ok(self
            .block_decomposition()
            .separating_vertices
            .into_iter()
            .collect())
    }

    /// The big-chunk decomposition: all maximal connected induced subgraphs
    /// without separating vertices. These are the blocks of the block-cut
    /// tree; isolated vertices count as their own degenerate chunk.
    /// Disconnected graphs are decomposed per component.
    pub fn big_chunks(&self) -> ChunkDecomposition {
        self.block_decomposition()
    }

    /// Connected components of the subgraph keeping only odd-labelled edges.
    /// Two generators are conjugate in the group iff they share a class.
    pub fn odd_components(&self) -> Vec<BTreeSet<Vertex>> {
        let n = self.vertices.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut comp = BTreeSet::new();
            let mut queue = VecDeque::from([start]);
            seen[start] = true;
            while let Some(u) = queue.pop_front() {
                comp.insert(self.vertices[u].clone());
                for v in 0..n {
                    if !seen[v] {
                        if let Some(m) = self.label_idx(u, v) {
                            if m % 2 == 1 {
                                seen[v] = true;
                                queue.push_back(v);
                            }
                        }
                    }
                }
            }
            out.push(comp);
        }
        out
    }

    /// Shortest path between two vertices in the odd-edge subgraph, if any.
    pub fn odd_path(&self, from: &str, to: &str) -> Option<Vec<Vertex>> {
        let start = self.vertex_index(from)?;
        let goal = self.vertex_index(to)?;
        let n = self.vertices.len();
        let mut prev = vec![usize::MAX; n];
        let mut seen = vec![false; n];
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            if u == goal {
                let mut path = vec![goal];
                let mut cur = goal;
                while cur != start {
                    cur = prev[cur];
                    path.push(cur);
                }
                path.reverse();
                return Some(path.into_iter().map(|i| self.vertices[i].clone()).collect());
            }
            for v in 0..n {
                if !seen[v] {
                    if let Some(m) = self.label_idx(u, v) {
                        if m % 2 == 1 {
                            seen[v] = true;
                            prev[v] = u;
                            queue.push_back(v);
                        }
                    }
                }
            }
        }
        None
    }

    /// Depth-first lowpoint block decomposition (blocks plus articulation
    /// points), run per connected component.
    fn block_decomposition(&self) -> ChunkDecomposition {
        let n = self.vertices.len();
        let mut state = BlockState {
            graph: self,
            disc: vec![usize::MAX; n],
            low: vec![0; n],
            timer: 0,
            stack: Vec::new(),
            blocks: Vec::new(),
            cut: vec![false; n],
        };
        for root in 0..n {
            if state.disc[root] == usize::MAX {
                state.dfs(root, usize::MAX);
                // Isolated vertex: its own degenerate chunk.
                if self.neighbors_idx(root).is_empty() {
                    state.blocks.push(BTreeSet::from([root]));
                }
            }
        }
        let mut chunks: Vec<BTreeSet<Vertex>> = state
            .blocks
            .into_iter()
            .map(|b| b.into_iter().map(|i| self.vertices[i].clone()).collect())
            .collect();
        chunks.sort();
        let separating_vertices = (0..n)
            .filter(|&i| state.cut[i])
            .map(|i| self.vertices[i].clone())
            .collect();
        ChunkDecomposition {
            chunks,
            separating_vertices,
        }
    }
}

struct BlockState<'a> {
    graph: &'a DefiningGraph,
    disc: Vec<usize>,
    low: Vec<usize>,
    timer: usize,
    stack: Vec<(usize, usize)>,
    blocks: Vec<BTreeSet<usize>>,
    cut: Vec<bool>,
}

impl BlockState<'_> {
    fn dfs(&mut self, u: usize, parent: usize) {
        self.disc[u] = self.timer;
        self.low[u] = self.timer;
        self.timer += 1;
        let mut children = 0;
        for v in self.graph.neighbors_idx(u) {
            if v == parent {
                continue;
            }
            if self.disc[v] == usize::MAX {
                children += 1;
                self.stack.push((u, v));
                self.dfs(v, u);
                self.low[u] = self.low[u].min(self.low[v]);
                if (parent != usize::MAX && self.low[v] >= self.disc[u])
                    || (parent == usize::MAX && children > 1)
                {
                    self.cut[u] = true;
                }
                if self.low[v] >= self.disc[u] {
                    let mut block = BTreeSet::new();
                    while let Some(&(a, b)) = self.stack.last() {
                        if self.disc[a] >= self.disc[v] {
                            self.stack.pop();
                            block.insert(a);
                            block.insert(b);
                        } else {
                            break;
                        }
                    }
                    if let Some(&(a, b)) = self.stack.last() {
                        if (a, b) == (u, v) {
                            self.stack.pop();
                        }
                    }
                    block.insert(u);
                    block.insert(v);
                    self.blocks.push(block);
                }
            } else if self.disc[v] < self.disc[u] {
                self.stack.push((u, v));
                self.low[u] = self.low[u].min(self.disc[v]);
            }
        }
    }
}

/// Big chunks plus the separating vertices of a graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChunkDecomposition {
    /// Vertex sets of the maximal connected cut-vertex-free induced
    /// subgraphs, sorted for determinism.
    pub chunks: Vec<BTreeSet<Vertex>>,
    pub separating_vertices: BTreeSet<Vertex>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(text: &str) -> DefiningGraph {
        DefiningGraph::parse(text).unwrap()
    }

    #[test]
    fn parses_two_vertex_graph() {
        let graph = g(r#"{"vertices":["a","b"],"edges":[["a","b",3]]}"#);
        assert_eq!(graph.vertex_count(), 2);
        assert_eq!(graph.label("a", "b"), Some(3));
        assert_eq!(graph.label("b", "a"), Some(3));
    }

    #[test]
    fn parses_single_vertex() {
        let graph = g(r#"{"vertices":["a"],"edges":[]}"#);
        assert_eq!(graph.vertex_count(), 1);
    }

    #[test]
    fn rejects_small_label() {
        let err = DefiningGraph::parse(r#"{"vertices":["a","b"],"edges":[["a","b",1]]}"#);
        assert!(matches!(err, Err(GraphError::LabelTooSmall { .. })));
    }

    #[test]
    fn rejects_loop_duplicate_and_unknown() {
        assert!(matches!(
            DefiningGraph::parse(r#"{"vertices":["a"],"edges":[["a","a",3]]}"#),
            Err(GraphError::LoopEdge(_))
        ));
        assert!(matches!(
            DefiningGraph::parse(r#"{"vertices":["a","a"],"edges":[]}"#),
            Err(GraphError::DuplicateVertex(_))
        ));
        assert!(matches!(
            DefiningGraph::parse(r#"{"vertices":["a"],"edges":[["a","b",3]]}"#),
            Err(GraphError::UnknownVertex(_))
        ));
        assert!(matches!(
            DefiningGraph::parse(
                r#"{"vertices":["a","b"],"edges":[["a","b",3],["b","a",4]]}"#
            ),
            Err(GraphError::ConflictingLabels { .. })
        ));
        // Duplicate edges with the same label are tolerated.
        assert!(DefiningGraph::parse(
            r#"{"vertices":["a","b"],"edges":[["a","b",3],["b","a",3]]}"#
        )
        .is_ok());
    }

    #[test]
    fn separating_vertices_of_triangle_with_pendant() {
        let graph = g(
            r#"{"vertices":["a","b","c","d"],
                "edges":[["a","b",3],["b","c",3],["a","c",3],["c","d",3]]}"#,
        );
        let sep = graph.separating_vertices().unwrap();
        assert_eq!(sep, BTreeSet::from(["c".to_owned()]));
    }

    #[test]
    fn complete_graph_has_no_separating_vertex() {
        let graph = g(
            r#"{"vertices":["a","b","c","d"],
                "edges":[["a","b",2],["a","c",2],["a","d",2],
                         ["b","c",2],["b","d",2],["c","d",2]]}"#,
        );
        assert!(graph.separating_vertices().unwrap().is_empty());
    }

    #[test]
    fn path_separating_vertices_are_interior() {
        let graph = g(
            r#"{"vertices":["a","b","c","d"],
                "edges":[["a","b",3],["b","c",3],["c","d",3]]}"#,
        );
        let sep = graph.separating_vertices().unwrap();
        assert_eq!(sep, BTreeSet::from(["b".to_owned(), "c".to_owned()]));
    }

    #[test]
    fn separating_vertices_error_on_disconnected() {
        let graph = g(r#"{"vertices":["a","b"],"edges":[]}"#);
        assert_eq!(graph.separating_vertices(), Err(GraphError::Disconnected));
    }

    #[test]
    fn chunks_of_triangle_with_pendant() {
        let graph = g(
            r#"{"vertices":["a","b","c","d"],
                "edges":[["a","b",3],["b","c",3],["a","c",3],["c","d",3]]}"#,
        );
        let dec = graph.big_chunks();
        let abc: BTreeSet<Vertex> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        let cd: BTreeSet<Vertex> = ["c", "d"].iter().map(|s| s.to_string()).collect();
        assert_eq!(dec.chunks, vec![abc, cd]);
        assert_eq!(dec.separating_vertices, BTreeSet::from(["c".to_owned()]));
    }

    #[test]
    fn four_cycle_is_a_single_chunk() {
        let graph = g(
            r#"{"vertices":["a","b","c","d"],
                "edges":[["a","b",2],["b","c",2],["c","d",2],["a","d",2]]}"#,
        );
        let dec = graph.big_chunks();
        assert_eq!(dec.chunks.len(), 1);
        assert_eq!(dec.chunks[0].len(), 4);
        assert!(dec.separating_vertices.is_empty());
    }

    #[test]
    fn single_edge_is_one_chunk() {
        let graph = g(r#"{"vertices":["a","b"],"edges":[["a","b",4]]}"#);
        let dec = graph.big_chunks();
        assert_eq!(dec.chunks.len(), 1);
        assert!(dec.separating_vertices.is_empty());
    }

    #[test]
    fn isolated_vertex_is_its_own_chunk() {
        let graph = g(r#"{"vertices":["a","b","c"],"edges":[["a","b",3]]}"#);
        let dec = graph.big_chunks();
        assert_eq!(dec.chunks.len(), 2);
        assert!(dec.chunks.contains(&BTreeSet::from(["c".to_owned()])));
    }

    #[test]
    fn odd_components_examples() {
        let ab3 = g(r#"{"vertices":["a","b"],"edges":[["a","b",3]]}"#);
        assert_eq!(ab3.odd_components().len(), 1);

        let ab4 = g(r#"{"vertices":["a","b"],"edges":[["a","b",4]]}"#);
        assert_eq!(ab4.odd_components().len(), 2);

        let path = g(
            r#"{"vertices":["a","b","c","d"],
                "edges":[["a","b",3],["b","c",4],["c","d",5]]}"#,
        );
        let comps = path.odd_components();
        assert_eq!(comps.len(), 2);
        assert!(comps.contains(&BTreeSet::from(["a".to_owned(), "b".to_owned()])));
        assert!(comps.contains(&BTreeSet::from(["c".to_owned(), "d".to_owned()])));
    }

    #[test]
    fn one_endedness() {
        assert!(!g(r#"{"vertices":["a"],"edges":[]}"#).is_one_ended());
        assert!(g(r#"{"vertices":["a","b"],"edges":[["a","b",3]]}"#).is_one_ended());
        assert!(!g(r#"{"vertices":["a","b"],"edges":[]}"#).is_one_ended());
    }

    #[test]
    fn json_round_trip() {
        let graph = g(
            r#"{"vertices":["a","b","c"],"edges":[["a","b",3],["b","c",7]]}"#,
        );
        let back = DefiningGraph::parse(&graph.to_json()).unwrap();
        assert_eq!(graph, back);
    }
}
