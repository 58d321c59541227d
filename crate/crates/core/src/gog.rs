//! The crushed graph of groups and its deformation moves.
//!
//! For a one-ended defining graph, `M_S` is the bipartite tree with one black
//! node per big chunk (carrying the chunk's vertex set as a symbolic standard
//! parabolic), one white node per separating vertex (carrying the singleton),
//! and a link wherever a separating vertex belongs to a chunk, with the
//! singleton as link group. Subgroup comparison throughout this module is
//! subset comparison on the symbolic groups.
//!
//! The moves are quotient-level elementary collapses (merge a non-loop link
//! whose group equals an endpoint's group) and their inverse expansions.
//! Reduction collapses until nothing is collapsible, taking the
//! lexicographically least collapsible link first for determinism; the result
//! of reduction may genuinely depend on such choices. A link *survives* when
//! some collapse sequence to a reduced graph never collapses it.

use crate::graph::{DefiningGraph, GraphError, Vertex};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use thiserror::Error;

pub type NodeId = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GogError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("graph is not one-ended (needs to be connected with at least two vertices)")]
    NotOneEnded,
    #[error("no link with index {0}")]
    NoSuchLink(usize),
    #[error("no node with id {0}")]
    NoSuchNode(NodeId),
    #[error("link {0} is not collapsible")]
    NotCollapsible(usize),
    #[error("invalid expansion: {0}")]
    InvalidExpansion(String),
    #[error("malformed graph-of-groups document: {0}")]
    Malformed(String),
    #[error("link group {{{group}}} is not contained in an endpoint group")]
    LinkGroupNotContained { group: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeColour {
    Black,
    White,
    Plain,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GogNode {
    pub id: NodeId,
    pub colour: NodeColour,
    pub group: BTreeSet<Vertex>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GogLink {
    pub a: NodeId,
    pub b: NodeId,
    pub group: BTreeSet<Vertex>,
}

impl GogLink {
    pub fn is_loop(&self) -> bool {
        self.a == self.b
    }

    pub fn touches(&self, id: NodeId) -> bool {
        self.a == id || self.b == id
    }
}

/// A finite graph of groups with symbolic standard-parabolic node and link
/// groups (vertex subsets of the base defining graph).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphOfGroups {
    pub base: DefiningGraph,
    pub nodes: Vec<GogNode>,
    pub links: Vec<GogLink>,
}

/// Undoes a collapse (and is the general deformation move in its own right):
/// splits `node` into itself (keeping `kept_group`) and a fresh node with
/// `split_group`, joined by a link with `link_group`; the listed endpoint
/// slots of existing links move to the fresh node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpansionSpec {
    pub node: NodeId,
    pub kept_group: BTreeSet<Vertex>,
    pub split_group: BTreeSet<Vertex>,
    pub link_group: BTreeSet<Vertex>,
    pub new_node_id: NodeId,
    pub new_colour: NodeColour,
    /// Indices of links whose `a` endpoint moves to the new node.
    pub move_a: BTreeSet<usize>,
    /// Indices of links whose `b` endpoint moves to the new node.
    pub move_b: BTreeSet<usize>,
}

pub struct CollapseOutcome {
    pub gog: GraphOfGroups,
    /// Old link index -> new link index; `None` for the collapsed link.
    pub index_map: Vec<Option<usize>>,
    /// The expansion that undoes this collapse.
    pub inverse: ExpansionSpec,
}

pub struct ExpandOutcome {
    pub gog: GraphOfGroups,
    /// Index of the freshly created link.
    pub new_link_index: usize,
}

/// One replayable move record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum GogMove {
    Collapse { link_index: usize },
    Expand { spec: ExpansionSpec },
}

/// A move log: the starting graph of groups plus the moves applied since.
/// Replaying from the start reproduces the current graph of groups.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MoveLog {
    pub initial: GraphOfGroups,
    pub moves: Vec<GogMove>,
}

impl MoveLog {
    pub fn new(initial: GraphOfGroups) -> Self {
        MoveLog {
            initial,
            moves: Vec::new(),
        }
    }

    pub fn replay(&self) -> Result<GraphOfGroups, GogError> {
        let mut gog = self.initial.clone();
        for mv in &self.moves {
            gog = match mv {
                GogMove::Collapse { link_index } => gog.collapse(*link_index)?.gog,
                GogMove::Expand { spec } => gog.expand(spec)?.gog,
            };
        }
        Ok(gog)
    }
}

/// Builds the crushed decomposition of a one-ended graph: a tree with one
/// black node per big chunk and one white node per separating vertex.
pub fn build_ms(g: &DefiningGraph) -> Result<GraphOfGroups, GogError> {
    if !g.is_one_ended() {
        return Err(GogError::NotOneEnded);
    }
    let decomposition = g.big_chunks();
    let mut nodes = Vec::new();
    let mut links = Vec::new();
    let mut chunk_ids = Vec::new();
    for chunk in &decomposition.chunks {
        let id = nodes.len();
        nodes.push(GogNode {
            id,
            colour: NodeColour::Black,
            group: chunk.clone(),
        });
        chunk_ids.push(id);
    }
    for v in &decomposition.separating_vertices {
        let white_id = nodes.len();
        nodes.push(GogNode {
            id: white_id,
            colour: NodeColour::White,
            group: BTreeSet::from([v.clone()]),
        });
        for (chunk, &black_id) in decomposition.chunks.iter().zip(&chunk_ids) {
            if chunk.contains(v) {
                links.push(GogLink {
                    a: white_id,
                    b: black_id,
                    group: BTreeSet::from([v.clone()]),
                });
            }
        }
    }
    Ok(GraphOfGroups {
        base: g.clone(),
        nodes,
        links,
    })
}

impl GraphOfGroups {
    pub fn node(&self, id: NodeId) -> Result<&GogNode, GogError> {
        self.nodes
            .iter()
            .find(|n| n.id == id)
            .ok_or(GogError::NoSuchNode(id))
    }

    /// Checks the structural invariants: link groups are subsets of both
    /// endpoint groups, and all groups are subsets of the base vertex set.
    pub fn validate(&self) -> Result<(), GogError> {
        let base_vertices = self.base.vertex_set();
        for n in &self.nodes {
            if !n.group.is_subset(&base_vertices) {
                return Err(GogError::Malformed(format!(
                    "node {} group is not a subset of the base vertices",
                    n.id
                )));
            }
        }
        for l in &self.links {
            let a = self.node(l.a)?;
            let b = self.node(l.b)?;
            if !l.group.is_subset(&a.group) || !l.group.is_subset(&b.group) {
                let group: Vec<&str> = l.group.iter().map(|s| s.as_str()).collect();
                return Err(GogError::LinkGroupNotContained {
                    group: group.join(","),
                });
            }
        }
        Ok(())
    }

    /// The non-loop links whose group equals one endpoint's group.
    pub fn collapsible_links(&self) -> Vec<usize> {
        (0..self.links.len())
            .filter(|&i| self.is_collapsible(i))
            .collect()
    }

    pub fn is_collapsible(&self, idx: usize) -> bool {
        match self.links.get(idx) {
            None => false,
            Some(l) => {
                if l.is_loop() {
                    return false;
                }
                let ga = &self.node(l.a).expect("endpoint exists").group;
                let gb = &self.node(l.b).expect("endpoint exists").group;
                l.group == *ga || l.group == *gb
            }
        }
    }

    /// Collapses a collapsible link: the endpoint whose group equals the link
    /// group is absorbed into the other (ties keep the smaller id), and all
    /// its links re-attach to the survivor.
    pub fn collapse(&self, idx: usize) -> Result<CollapseOutcome, GogError> {
        let link = self.links.get(idx).ok_or(GogError::NoSuchLink(idx))?.clone();
        if !self.is_collapsible(idx) {
            return Err(GogError::NotCollapsible(idx));
        }
        let ga = self.node(link.a)?.group.clone();
        let gb = self.node(link.b)?.group.clone();
        let (survivor, removed) = if link.group == ga && link.group == gb {
            (link.a.min(link.b), link.a.max(link.b))
        } else if link.group == ga {
            (link.b, link.a)
        } else {
            (link.a, link.b)
        };
        let removed_node = self.node(removed)?.clone();
        let mut nodes: Vec<GogNode> = self
            .nodes
            .iter()
            .filter(|n| n.id != removed)
            .cloned()
            .collect();
        // The survivor carries the larger group (it already does; collapse
        // merges the smaller endpoint into it).
        let survivor_group = if link.group == ga { gb } else { ga };
        for n in &mut nodes {
            if n.id == survivor {
                n.group = survivor_group.clone();
            }
        }
        let mut links = Vec::with_capacity(self.links.len() - 1);
        let mut index_map = vec![None; self.links.len()];
        let mut move_a = BTreeSet::new();
        let mut move_b = BTreeSet::new();
        for (i, l) in self.links.iter().enumerate() {
            if i == idx {
                continue;
            }
            let mut nl = l.clone();
            let new_index = links.len();
            if nl.a == removed {
                nl.a = survivor;
                move_a.insert(new_index);
            }
            if nl.b == removed {
                nl.b = survivor;
                move_b.insert(new_index);
            }
            index_map[i] = Some(new_index);
            links.push(nl);
        }
        let gog = GraphOfGroups {
            base: self.base.clone(),
            nodes,
            links,
        };
        let inverse = ExpansionSpec {
            node: survivor,
            kept_group: survivor_group,
            split_group: removed_node.group,
            link_group: link.group,
            new_node_id: removed,
            new_colour: removed_node.colour,
            move_a,
            move_b,
        };
        Ok(CollapseOutcome {
            gog,
            index_map,
            inverse,
        })
    }

    /// Elementary expansion, the inverse of a collapse. The result always
    /// admits a collapse (of the fresh link) returning a graph of groups
    /// isomorphic to this one.
    pub fn expand(&self, spec: &ExpansionSpec) -> Result<ExpandOutcome, GogError> {
        let fail = |msg: String| Err(GogError::InvalidExpansion(msg));
        let node = self.node(spec.node)?.clone();
        if self.nodes.iter().any(|n| n.id == spec.new_node_id) {
            return fail(format!("node id {} already exists", spec.new_node_id));
        }
        if !spec.link_group.is_subset(&spec.kept_group)
            || !spec.link_group.is_subset(&spec.split_group)
        {
            return fail("link group must be contained in both sides".into());
        }
        if spec.kept_group != spec.link_group && spec.split_group != spec.link_group {
            return fail("one side must equal the link group".into());
        }
        let larger = if spec.split_group.is_subset(&spec.kept_group) {
            &spec.kept_group
        } else {
            &spec.split_group
        };
        if node.group != *larger {
            return fail("node group must be the larger of the two sides".into());
        }
        for &i in spec.move_a.iter().chain(&spec.move_b) {
            if i >= self.links.len() {
                return Err(GogError::NoSuchLink(i));
            }
        }
        let mut links = self.links.clone();
        for (i, l) in links.iter_mut().enumerate() {
            if spec.move_a.contains(&i) {
                if l.a != spec.node {
                    return fail(format!("link {i} endpoint `a` is not at the split node"));
                }
                l.a = spec.new_node_id;
            }
            if spec.move_b.contains(&i) {
                if l.b != spec.node {
                    return fail(format!("link {i} endpoint `b` is not at the split node"));
                }
                l.b = spec.new_node_id;
            }
        }
        // Every link must still sit inside its (possibly shrunk) endpoints.
        let mut nodes = self.nodes.clone();
        for n in &mut nodes {
            if n.id == spec.node {
                n.group = spec.kept_group.clone();
            }
        }
        nodes.push(GogNode {
            id: spec.new_node_id,
            colour: spec.new_colour,
            group: spec.split_group.clone(),
        });
        links.push(GogLink {
            a: spec.node,
            b: spec.new_node_id,
            group: spec.link_group.clone(),
        });
        let gog = GraphOfGroups {
            base: self.base.clone(),
            nodes,
            links,
        };
        gog.validate().map_err(|e| {
            GogError::InvalidExpansion(format!("a link left its endpoint groups: {e}"))
        })?;
        Ok(ExpandOutcome {
            new_link_index: gog.links.len() - 1,
            gog,
        })
    }

    /// Sort key making "the lexicographically least collapsible link"
    /// deterministic.
    fn link_key(&self, idx: usize) -> (NodeId, NodeId, Vec<Vertex>, usize) {
        let l = &self.links[idx];
        (
            l.a.min(l.b),
            l.a.max(l.b),
            l.group.iter().cloned().collect(),
            idx,
        )
    }

    /// Collapses collapsible links until none remain, least link first.
    /// Reduced shapes may depend on the order in general; this order is the
    /// documented deterministic policy.
    pub fn reduce(&self) -> GraphOfGroups {
        self.reduce_with_log().0
    }

    pub fn reduce_with_log(&self) -> (GraphOfGroups, MoveLog) {
        let mut log = MoveLog::new(self.clone());
        let mut gog = self.clone();
        loop {
            let mut collapsible = gog.collapsible_links();
            if collapsible.is_empty() {
                return (gog, log);
            }
            collapsible.sort_by_key(|&i| gog.link_key(i));
            let idx = collapsible[0];
            log.moves.push(GogMove::Collapse { link_index: idx });
            gog = gog.collapse(idx).expect("collapsible link collapses").gog;
        }
    }

    pub fn is_reduced(&self) -> bool {
        self.collapsible_links().is_empty()
    }

    /// The links for which some collapse sequence reaches a reduced graph
    /// without collapsing them, by exhaustive search with memoisation on the
    /// exact intermediate states.
    pub fn surviving_links(&self) -> BTreeSet<usize> {
        let mut memo: HashMap<String, bool> = HashMap::new();
        (0..self.links.len())
            .filter(|&i| self.link_survives(i, &mut memo))
            .collect()
    }

    fn state_key(&self, target: usize) -> String {
        let mut key = String::new();
        for n in &self.nodes {
            key.push_str(&format!("{}:{:?}:{:?};", n.id, n.colour, n.group));
        }
        for l in &self.links {
            key.push_str(&format!("{}-{}:{:?};", l.a, l.b, l.group));
        }
        key.push_str(&format!("#{target}"));
        key
    }

    fn link_survives(&self, target: usize, memo: &mut HashMap<String, bool>) -> bool {
        if self.is_reduced() {
            return true;
        }
        let key = self.state_key(target);
        if let Some(&v) = memo.get(&key) {
            return v;
        }
        let mut result = false;
        for idx in self.collapsible_links() {
            if idx == target {
                continue;
            }
            let out = self.collapse(idx).expect("collapsible link collapses");
            let new_target = out.index_map[target].expect("target was not collapsed");
            if out.gog.link_survives(new_target, memo) {
                result = true;
                break;
            }
        }
        memo.insert(key, result);
        result
    }

    /// First Betti number of the underlying graph:
    /// links - nodes + components.
    pub fn betti(&self) -> i64 {
        let mut adjacency: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
        for n in &self.nodes {
            adjacency.entry(n.id).or_default();
        }
        for l in &self.links {
            adjacency.entry(l.a).or_default().push(l.b);
            adjacency.entry(l.b).or_default().push(l.a);
        }
        let mut seen: BTreeSet<NodeId> = BTreeSet::new();
        let mut components = 0i64;
        for n in &self.nodes {
            if seen.contains(&n.id) {
                continue;
            }
            components += 1;
            let mut queue = VecDeque::from([n.id]);
            seen.insert(n.id);
            while let Some(u) = queue.pop_front() {
                for &v in &adjacency[&u] {
                    if seen.insert(v) {
                        queue.push_back(v);
                    }
                }
            }
        }
        self.links.len() as i64 - self.nodes.len() as i64 + components
    }

    pub fn is_tree(&self) -> bool {
        self.betti() == 0 && {
            // Also connected: one component.
            self.links.len() as i64 == self.nodes.len() as i64 - 1
        }
    }

    /// Quotient-level screen for ascending loops: loop links whose group
    /// equals the node's whole group. This is a partial, necessary-condition
    /// check only; a faithful non-ascending verdict needs tree-level data
    /// that the quotient does not carry.
    pub fn ascending_loop_screen(&self) -> Vec<usize> {
        (0..self.links.len())
            .filter(|&i| {
                let l = &self.links[i];
                l.is_loop() && self.node(l.a).map(|n| n.group == l.group).unwrap_or(false)
            })
            .collect()
    }

    /// Equality up to link order and endpoint orientation; nodes are still
    /// compared by id, which collapse/expand round trips restore.
    pub fn same_up_to_link_order(&self, other: &GraphOfGroups) -> bool {
        if self.base != other.base {
            return false;
        }
        let node_map = |g: &GraphOfGroups| -> BTreeMap<NodeId, (NodeColour, BTreeSet<Vertex>)> {
            g.nodes
                .iter()
                .map(|n| (n.id, (n.colour, n.group.clone())))
                .collect()
        };
        if node_map(self) != node_map(other) {
            return false;
        }
        let link_multiset = |g: &GraphOfGroups| -> Vec<(NodeId, NodeId, Vec<Vertex>)> {
            let mut v: Vec<_> = g
                .links
                .iter()
                .map(|l| {
                    (
                        l.a.min(l.b),
                        l.a.max(l.b),
                        l.group.iter().cloned().collect(),
                    )
                })
                .collect();
            v.sort();
            v
        };
        link_multiset(self) == link_multiset(other)
    }

    /// Graphviz text for the underlying graph, with groups as labels.
    pub fn to_dot(&self) -> String {
        let join = |s: &BTreeSet<Vertex>| {
            let v: Vec<&str> = s.iter().map(|x| x.as_str()).collect();
            v.join(",")
        };
        let mut out = String::from("graph gog {\n");
        for n in &self.nodes {
            let shape = match n.colour {
                NodeColour::Black => "box",
                NodeColour::White => "circle",
                NodeColour::Plain => "ellipse",
            };
            out.push_str(&format!(
                "  n{} [shape={shape}, label=\"{}\"];\n",
                n.id,
                join(&n.group)
            ));
        }
        for l in &self.links {
            out.push_str(&format!(
                "  n{} -- n{} [label=\"{}\"];\n",
                l.a,
                l.b,
                join(&l.group)
            ));
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("graph-of-groups serialisation cannot fail")
    }

    pub fn parse(text: &str) -> Result<Self, GogError> {
        let gog: GraphOfGroups =
            serde_json::from_str(text).map_err(|e| GogError::Malformed(e.to_string()))?;
        // Ids must be unique and links must point at real nodes.
        let mut ids = BTreeSet::new();
        for n in &gog.nodes {
            if !ids.insert(n.id) {
                return Err(GogError::Malformed(format!("duplicate node id {}", n.id)));
            }
        }
        gog.validate()?;
        Ok(gog)
    }
}
