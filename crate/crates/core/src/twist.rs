//! Elementary twists, twist orbits, twist equivalence, and the compiler
//! from Dehn twists to elementary twists.
//!
//! An elementary twist takes a spherical indecomposable subset `J`, its
//! commuting complement `J_perp`, and a separation of the remaining vertices
//! into nonempty sides `B` and `C` with no edges between them, and conjugates
//! the `B` generators by the Garside element of `J`. At graph level this
//! rewires every edge from `B` into `J` through the diagram automorphism
//! `pi` induced by the Garside element; everything else is unchanged.
//!
//! Whether `B` must be a single component of the separated part or may be any
//! union of components is not pinned down by the definition, which only
//! constrains adjacency; any nonempty proper union is accepted here.
//!
//! Twist moves preserve the vertex count, the edge-label multiset, and the
//! number of odd components, so orbits under twisting are finite and a
//! breadth-first search over canonical forms decides twist equivalence of
//! graphs (with an explicit budget for very large orbits).

use crate::canon::CanonicalForm;
use crate::coxeter::{self, CoxeterError};
use crate::graph::{DefiningGraph, GraphError, Vertex};
use crate::ribbon::{RibbonError, RibbonWord};
use crate::word::{FormalWord, Letter};
use crate::DEFAULT_VERTEX_CAP;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TwistError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Coxeter(#[from] CoxeterError),
    #[error(transparent)]
    Ribbon(#[from] RibbonError),
    #[error("invalid twist move: {0}")]
    InvalidMove(String),
    #[error("graph has {vertices} vertices, above the search cap {cap}")]
    TooLarge { vertices: usize, cap: usize },
    #[error("operation requires a connected graph")]
    NotConnected,
    #[error("invalid Dehn twist input: {0}")]
    InvalidSpec(String),
    #[error("compile step {index} failed on intermediate graph {graph}: {reason}")]
    CompileStep {
        index: usize,
        reason: String,
        graph: String,
    },
}

/// A legal elementary twist datum against a specific graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TwistMove {
    #[serde(rename = "J")]
    pub j: BTreeSet<Vertex>,
    #[serde(rename = "J_perp")]
    pub j_perp: BTreeSet<Vertex>,
    #[serde(rename = "B")]
    pub b: BTreeSet<Vertex>,
    #[serde(rename = "C")]
    pub c: BTreeSet<Vertex>,
    pub pi: BTreeMap<Vertex, Vertex>,
}

/// Vertices of `S - J` commuting with all of `J`.
fn perp(g: &DefiningGraph, j: &BTreeSet<Vertex>) -> BTreeSet<Vertex> {
    g.vertices()
        .iter()
        .filter(|v| !j.contains(*v))
        .filter(|v| j.iter().all(|u| g.label(v, u) == Some(2)))
        .cloned()
        .collect()
}

impl TwistMove {
    /// Builds the move determined by `(J, B)` against `g`, computing
    /// `J_perp`, `C`, and `pi`, and validating everything.
    pub fn from_j_b(
        g: &DefiningGraph,
        j: BTreeSet<Vertex>,
        b: BTreeSet<Vertex>,
    ) -> Result<TwistMove, TwistError> {
        let j_perp = perp(g, &j);
        let c: BTreeSet<Vertex> = g
            .vertices()
            .iter()
            .filter(|v| !j.contains(*v) && !j_perp.contains(*v) && !b.contains(*v))
            .cloned()
            .collect();
        let pi = coxeter::longest_element_automorphism(g, &j)?;
        let mv = TwistMove {
            j,
            j_perp,
            b,
            c,
            pi,
        };
        mv.validate(g)?;
        Ok(mv)
    }

    /// Checks every precondition of the move against `g`.
    pub fn validate(&self, g: &DefiningGraph) -> Result<(), TwistError> {
        let fail = |msg: String| Err(TwistError::InvalidMove(msg));
        for v in self
            .j
            .iter()
            .chain(&self.j_perp)
            .chain(&self.b)
            .chain(&self.c)
        {
            if !g.contains_vertex(v) {
                return fail(format!("unknown vertex `{v}`"));
            }
        }
        if self.j.is_empty() {
            return fail("J is empty".into());
        }
        if coxeter::indecomposable_factors(g, &self.j)?.len() != 1 {
            return fail("J is not indecomposable".into());
        }
        if !coxeter::is_spherical(g, &self.j)? {
            return fail("J is not spherical".into());
        }
        if self.j_perp != perp(g, &self.j) {
            return fail("J_perp does not match the commuting complement".into());
        }
        if self.b.is_empty() || self.c.is_empty() {
            return fail("B and C must both be nonempty".into());
        }
        let mut rest: BTreeSet<Vertex> = g.vertex_set();
        for v in self.j.iter().chain(&self.j_perp) {
            rest.remove(v);
        }
        if self.b.intersection(&self.c).next().is_some() {
            return fail("B and C overlap".into());
        }
        let union: BTreeSet<Vertex> = self.b.union(&self.c).cloned().collect();
        if union != rest {
            return fail("B and C do not partition S - (J u J_perp)".into());
        }
        for b in &self.b {
            for c in &self.c {
                if g.label(b, c).is_some() {
                    return fail(format!("edge between `{b}` in B and `{c}` in C"));
                }
            }
        }
        let pi = coxeter::longest_element_automorphism(g, &self.j)?;
        if self.pi != pi {
            return fail("pi is not the longest-element automorphism of J".into());
        }
        Ok(())
    }

    /// The move with every vertex renamed; used to translate witnesses
    /// across an isomorphism.
    pub(crate) fn renamed(&self, map: &BTreeMap<Vertex, Vertex>) -> TwistMove {
        let rset = |s: &BTreeSet<Vertex>| s.iter().map(|v| map[v].clone()).collect();
        TwistMove {
            j: rset(&self.j),
            j_perp: rset(&self.j_perp),
            b: rset(&self.b),
            c: rset(&self.c),
            pi: self
                .pi
                .iter()
                .map(|(k, v)| (map[k].clone(), map[v].clone()))
                .collect(),
        }
    }
}

/// All elementary twists available on `g`, with `J` ranging over spherical
/// indecomposable subsets. The symmetric move with `B` and `C` exchanged
/// yields the same isomorphism class (the graphs differ by `pi`), so only
/// the move whose `B` contains the lexicographically least separated vertex
/// is emitted.
pub fn enumerate_twists(g: &DefiningGraph) -> Result<Vec<TwistMove>, TwistError> {
    enumerate_twists_with(g, None)
}

/// Same with an optional cap on the size of `J`.
pub fn enumerate_twists_with(
    g: &DefiningGraph,
    max_j: Option<usize>,
) -> Result<Vec<TwistMove>, TwistError> {
    let n = g.vertex_count();
    if n > DEFAULT_VERTEX_CAP {
        return Err(TwistError::TooLarge {
            vertices: n,
            cap: DEFAULT_VERTEX_CAP,
        });
    }
    if !g.is_connected() {
        return Err(TwistError::NotConnected);
    }
    let names = g.vertices();
    let mut moves = Vec::new();
    for mask in 1u32..(1u32 << n) {
        let size = mask.count_ones() as usize;
        if size > max_j.unwrap_or(n) {
            continue;
        }
        let j: BTreeSet<Vertex> = (0..n)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| names[i].clone())
            .collect();
        if coxeter::indecomposable_factors(g, &j)?.len() != 1 {
            continue;
        }
        if !coxeter::is_spherical(g, &j)? {
            continue;
        }
        let j_perp = perp(g, &j);
        let rest: BTreeSet<Vertex> = names
            .iter()
            .filter(|v| !j.contains(*v) && !j_perp.contains(*v))
            .cloned()
            .collect();
        if rest.len() < 2 {
            continue;
        }
        let sub = g.induced(&rest).expect("rest is a valid subset");
        let comps: Vec<BTreeSet<Vertex>> = sub
            .components_idx()
            .into_iter()
            .map(|c| {
                c.into_iter()
                    .map(|i| sub.vertex_name(i).to_owned())
                    .collect()
            })
            .collect();
        if comps.len() < 2 {
            continue;
        }
        let least = rest.iter().next().unwrap();
        let anchor = comps
            .iter()
            .position(|c| c.contains(least))
            .expect("least vertex lies in some component");
        let k = comps.len();
        // B runs over unions of components containing the anchor component,
        // excluding the full set (C must stay nonempty).
        for split in 0u32..(1u32 << (k - 1)) {
            let mut b = comps[anchor].clone();
            let mut c = BTreeSet::new();
            let mut bit = 0;
            for (i, comp) in comps.iter().enumerate() {
                if i == anchor {
                    continue;
                }
                if split & (1 << bit) != 0 {
                    b.extend(comp.iter().cloned());
                } else {
                    c.extend(comp.iter().cloned());
                }
                bit += 1;
            }
            if c.is_empty() {
                continue;
            }
            let pi = coxeter::longest_element_automorphism(g, &j)?;
            moves.push(TwistMove {
                j: j.clone(),
                j_perp: j_perp.clone(),
                b,
                c,
                pi,
            });
        }
    }
    Ok(moves)
}

/// Applies a validated move: every edge `{b, j}` with `b` in `B` and `j` in
/// `J` is replaced by `{b, pi(j)}` with the same label; all other edges are
/// unchanged. Vertex names never change.
pub fn apply_twist(g: &DefiningGraph, mv: &TwistMove) -> Result<DefiningGraph, TwistError> {
    mv.validate(g)?;
    let mut edges = Vec::with_capacity(g.edge_count());
    for (a, b, m) in g.edges() {
        let (a, b) = (a.to_owned(), b.to_owned());
        let edge = if mv.b.contains(&a) && mv.j.contains(&b) {
            let image = mv.pi[&b].clone();
            (a, image, m)
        } else if mv.b.contains(&b) && mv.j.contains(&a) {
            let image = mv.pi[&a].clone();
            (image, b, m)
        } else {
            (a, b, m)
        };
        edges.push(edge);
    }
    DefiningGraph::from_parts(g.vertices().to_vec(), edges).map_err(TwistError::from)
}

// ---------------------------------------------------------------------------
// Marked generating sets.

/// Where a current generator came from: its base vertex in the original
/// generating set and the cumulative formal conjugator. The current
/// generator equals `conjugator * base * conjugator^-1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Mark {
    pub base: Vertex,
    pub conjugator: FormalWord,
}

/// A generating set tracked through twists and conjugations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkedGeneratingSet {
    pub graph: DefiningGraph,
    pub marks: BTreeMap<Vertex, Mark>,
}

impl MarkedGeneratingSet {
    pub fn new(graph: DefiningGraph) -> Self {
        let marks = graph
            .vertices()
            .iter()
            .map(|v| {
                (
                    v.clone(),
                    Mark {
                        base: v.clone(),
                        conjugator: FormalWord::identity(),
                    },
                )
            })
            .collect();
        MarkedGeneratingSet { graph, marks }
    }

    /// Applies a twist with the given exponent: vertices in `B` pick up the
    /// Garside letter of `J` on the left of their conjugator. The graph
    /// rewiring does not depend on the exponent since `pi` is an involution.
    pub fn apply_twist(&self, mv: &TwistMove, exponent: i8) -> Result<Self, TwistError> {
        let graph = apply_twist(&self.graph, mv)?;
        let letter = coxeter::garside_letter(&mv.j, exponent);
        let mut marks = self.marks.clone();
        for v in &mv.b {
            let mark = marks.get_mut(v).expect("B vertices carry marks");
            mark.conjugator.push_left(letter.clone());
        }
        Ok(MarkedGeneratingSet { graph, marks })
    }

    /// Conjugates the whole generating set: every conjugator picks up `word`
    /// on the left; the graph is unchanged.
    pub fn apply_conjugation(&self, word: &FormalWord) -> Self {
        let marks = self
            .marks
            .iter()
            .map(|(v, m)| {
                (
                    v.clone(),
                    Mark {
                        base: m.base.clone(),
                        conjugator: word.concat(&m.conjugator),
                    },
                )
            })
            .collect();
        MarkedGeneratingSet {
            graph: self.graph.clone(),
            marks,
        }
    }
}

// ---------------------------------------------------------------------------
// Twist sequences.

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TwistStep {
    /// An elementary twist; the exponent (+1/-1) affects only the conjugator
    /// bookkeeping, not the graph.
    Twist { mv: TwistMove, exponent: i8 },
    /// A global conjugation of the generating set.
    Conjugation { word: FormalWord },
}

/// A replayable list of steps. Moves are stored against the concrete vertex
/// names of the intermediate graphs; replay re-validates everything.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TwistSequence {
    pub steps: Vec<TwistStep>,
}

/// Serialized step form: `{"type":"twist","J":[...],"B":[...]}` (with an
/// `exp` field only when it is -1) or `{"type":"conj","word":[...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum TwistStepDto {
    Twist {
        #[serde(rename = "J")]
        j: Vec<String>,
        #[serde(rename = "B")]
        b: Vec<String>,
        #[serde(default = "default_exp", skip_serializing_if = "is_default_exp")]
        exp: i8,
    },
    Conj { word: FormalWord },
}

fn default_exp() -> i8 {
    1
}

#[allow(clippy::trivially_copy_pass_by_ref)]
fn is_default_exp(e: &i8) -> bool {
    *e == 1
}

impl TwistSequence {
    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    /// Replays the sequence from `g`, validating each step against the graph
    /// produced by the preceding steps.
    pub fn replay(&self, g: &DefiningGraph) -> Result<MarkedGeneratingSet, TwistError> {
        let mut state = MarkedGeneratingSet::new(g.clone());
        for step in &self.steps {
            state = match step {
                TwistStep::Twist { mv, exponent } => state.apply_twist(mv, *exponent)?,
                TwistStep::Conjugation { word } => state.apply_conjugation(word),
            };
        }
        Ok(state)
    }

    /// The per-vertex cumulative formal conjugators accumulated by the
    /// sequence when replayed from `g`.
    pub fn conjugators(
        &self,
        g: &DefiningGraph,
    ) -> Result<BTreeMap<Vertex, FormalWord>, TwistError> {
        let state = self.replay(g)?;
        Ok(state
            .marks
            .into_iter()
            .map(|(v, mark)| (v, mark.conjugator))
            .collect())
    }

    pub fn to_dtos(&self) -> Vec<TwistStepDto> {
        self.steps
            .iter()
            .map(|step| match step {
                TwistStep::Twist { mv, exponent } => TwistStepDto::Twist {
                    j: mv.j.iter().cloned().collect(),
                    b: mv.b.iter().cloned().collect(),
                    exp: *exponent,
                },
                TwistStep::Conjugation { word } => TwistStepDto::Conj { word: word.clone() },
            })
            .collect()
    }

    /// Rebuilds a sequence from its serialized form by replaying against `g`:
    /// moves are reconstructed from `(J, B)` and validated as they go.
    pub fn from_dtos(g: &DefiningGraph, dtos: &[TwistStepDto]) -> Result<Self, TwistError> {
        let mut steps = Vec::with_capacity(dtos.len());
        let mut graph = g.clone();
        for dto in dtos {
            match dto {
                TwistStepDto::Twist { j, b, exp } => {
                    if *exp != 1 && *exp != -1 {
                        return Err(TwistError::InvalidMove(format!(
                            "twist exponent must be +1 or -1, got {exp}"
                        )));
                    }
                    let mv = TwistMove::from_j_b(
                        &graph,
                        j.iter().cloned().collect(),
                        b.iter().cloned().collect(),
                    )?;
                    graph = apply_twist(&graph, &mv)?;
                    steps.push(TwistStep::Twist { mv, exponent: *exp });
                }
                TwistStepDto::Conj { word } => {
                    steps.push(TwistStep::Conjugation { word: word.clone() });
                }
            }
        }
        Ok(TwistSequence { steps })
    }
}

// ---------------------------------------------------------------------------
// Orbits.

#[derive(Debug, Clone)]
pub struct OrbitEdge {
    pub parent: CanonicalForm,
    pub mv: TwistMove,
    pub child: CanonicalForm,
}

/// The closure of a graph under elementary twists, modulo isomorphism.
#[derive(Debug, Clone)]
pub struct Orbit {
    /// One representative graph per canonical form reached.
    pub representatives: BTreeMap<CanonicalForm, DefiningGraph>,
    /// A spanning tree of discovery moves.
    pub tree: Vec<OrbitEdge>,
    /// True when the node budget stopped the search before closure.
    pub truncated: bool,
}

impl Orbit {
    pub fn size(&self) -> usize {
        self.representatives.len()
    }
}

pub fn twist_orbit(g: &DefiningGraph, budget: usize) -> Result<Orbit, TwistError> {
    twist_orbit_jobs(g, budget, 1)
}

/// Breadth-first closure with a node budget. Frontier expansion is pure and
/// may run on several threads; results are merged in deterministic order, so
/// the output does not depend on `jobs`.
pub fn twist_orbit_jobs(
    g: &DefiningGraph,
    budget: usize,
    jobs: usize,
) -> Result<Orbit, TwistError> {
    if !g.is_connected() {
        return Err(TwistError::NotConnected);
    }
    if g.vertex_count() > DEFAULT_VERTEX_CAP {
        return Err(TwistError::TooLarge {
            vertices: g.vertex_count(),
            cap: DEFAULT_VERTEX_CAP,
        });
    }
    let pool = if jobs > 1 {
        Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(jobs)
                .build()
                .expect("thread pool construction"),
        )
    } else {
        None
    };
    let root_cert = g.canonical_form();
    let mut representatives = BTreeMap::from([(root_cert.clone(), g.clone())]);
    let mut tree = Vec::new();
    let mut frontier = vec![(root_cert, g.clone())];
    let mut truncated = false;
    type Expansion = Vec<(CanonicalForm, TwistMove, DefiningGraph, CanonicalForm)>;
    while !frontier.is_empty() {
        let expand = |(cert, graph): &(CanonicalForm, DefiningGraph)| -> Result<Expansion, TwistError> {
            let mut out = Vec::new();
            for mv in enumerate_twists(graph)? {
                let child = apply_twist(graph, &mv)?;
                let child_cert = child.canonical_form();
                out.push((cert.clone(), mv, child, child_cert));
            }
            Ok(out)
        };
        let expanded: Result<Vec<Expansion>, TwistError> = match &pool {
            Some(pool) => pool.install(|| frontier.par_iter().map(expand).collect()),
            None => frontier.iter().map(expand).collect(),
        };
        let mut next = Vec::new();
        for batch in expanded? {
            for (parent, mv, child, child_cert) in batch {
                if representatives.contains_key(&child_cert) {
                    continue;
                }
                if representatives.len() >= budget {
                    truncated = true;
                    continue;
                }
                representatives.insert(child_cert.clone(), child.clone());
                tree.push(OrbitEdge {
                    parent,
                    mv,
                    child: child_cert.clone(),
                });
                next.push((child_cert, child));
            }
        }
        if truncated {
            break;
        }
        frontier = next;
    }
    Ok(Orbit {
        representatives,
        tree,
        truncated,
    })
}

// ---------------------------------------------------------------------------
// Twist equivalence.

#[derive(Debug, Clone)]
pub enum TwistVerdict {
    /// Twist equivalent; the witness replays from the first graph to a graph
    /// isomorphic to the second.
    Equivalent { witness: TwistSequence },
    NotEquivalent { reason: String },
    /// The node budget ran out before either orbit closed.
    Inconclusive { explored: usize },
}

struct SearchSide {
    /// cert -> (representative graph, discovery edge).
    nodes: BTreeMap<CanonicalForm, (DefiningGraph, Option<(CanonicalForm, TwistMove)>)>,
    frontier: Vec<CanonicalForm>,
    exhausted: bool,
}

impl SearchSide {
    fn new(g: &DefiningGraph) -> Self {
        let cert = g.canonical_form();
        SearchSide {
            nodes: BTreeMap::from([(cert.clone(), (g.clone(), None))]),
            frontier: vec![cert],
            exhausted: false,
        }
    }

    /// Discovery moves from the root to `cert`.
    fn path_to(&self, cert: &CanonicalForm) -> Vec<TwistMove> {
        let mut moves = Vec::new();
        let mut cur = cert.clone();
        while let Some((_, Some((parent, mv)))) = self.nodes.get(&cur) {
            moves.push(mv.clone());
            cur = parent.clone();
        }
        moves.reverse();
        moves
    }
}

/// Decides twist equivalence of two connected graphs by bidirectional
/// breadth-first search over canonical forms, after cheap invariant
/// prechecks. `budget` bounds the total number of canonical forms stored.
pub fn are_twist_equivalent(
    g1: &DefiningGraph,
    g2: &DefiningGraph,
    budget: usize,
) -> Result<TwistVerdict, TwistError> {
    for g in [g1, g2] {
        if !g.is_connected() {
            return Err(TwistError::NotConnected);
        }
        if g.vertex_count() > DEFAULT_VERTEX_CAP {
            return Err(TwistError::TooLarge {
                vertices: g.vertex_count(),
                cap: DEFAULT_VERTEX_CAP,
            });
        }
    }
    if g1.vertex_count() != g2.vertex_count() {
        return Ok(TwistVerdict::NotEquivalent {
            reason: "vertex counts differ".into(),
        });
    }
    if g1.label_multiset() != g2.label_multiset() {
        return Ok(TwistVerdict::NotEquivalent {
            reason: "edge-label multisets differ".into(),
        });
    }
    if g1.odd_components().len() != g2.odd_components().len() {
        return Ok(TwistVerdict::NotEquivalent {
            reason: "odd-component counts differ".into(),
        });
    }

    let mut fwd = SearchSide::new(g1);
    let mut bwd = SearchSide::new(g2);
    {
        let meet: Option<CanonicalForm> = fwd
            .nodes
            .keys()
            .find(|c| bwd.nodes.contains_key(*c))
            .cloned();
        if let Some(meet) = meet {
            return build_witness(g1, &fwd, &bwd, &meet);
        }
    }

    loop {
        if fwd.exhausted && bwd.exhausted {
            return Ok(TwistVerdict::NotEquivalent {
                reason: "twist orbits are disjoint".into(),
            });
        }
        let expand_fwd = if fwd.exhausted {
            false
        } else if bwd.exhausted {
            true
        } else {
            fwd.frontier.len() <= bwd.frontier.len()
        };
        let (side, other) = if expand_fwd {
            (&mut fwd, &mut bwd)
        } else {
            (&mut bwd, &mut fwd)
        };
        let mut next = Vec::new();
        let mut meet: Option<CanonicalForm> = None;
        'expansion: for cert in std::mem::take(&mut side.frontier) {
            let graph = side.nodes[&cert].0.clone();
            for mv in enumerate_twists(&graph)? {
                let child = apply_twist(&graph, &mv)?;
                let child_cert = child.canonical_form();
                if side.nodes.contains_key(&child_cert) {
                    continue;
                }
                if side.nodes.len() + other.nodes.len() >= budget {
                    let explored = side.nodes.len() + other.nodes.len();
                    return Ok(TwistVerdict::Inconclusive { explored });
                }
                side.nodes
                    .insert(child_cert.clone(), (child, Some((cert.clone(), mv))));
                next.push(child_cert.clone());
                if other.nodes.contains_key(&child_cert) {
                    meet = Some(child_cert);
                    break 'expansion;
                }
            }
        }
        side.frontier.extend(next);
        if side.frontier.is_empty() {
            side.exhausted = true;
        }
        if let Some(meet) = meet {
            return build_witness(g1, &fwd, &bwd, &meet);
        }
        // An orbit that closed without meeting the other side is definitive.
        if (fwd.exhausted || bwd.exhausted)
            && fwd.nodes.keys().all(|c| !bwd.nodes.contains_key(c))
        {
            return Ok(TwistVerdict::NotEquivalent {
                reason: "twist orbits are disjoint".into(),
            });
        }
    }
}

/// Stitches the two half-paths into one replayable witness. Backward moves
/// are recorded against the second graph's name lineage; one isomorphism at
/// the meeting class translates them into the first lineage, and the same
/// translation stays valid along the whole tail because move application
/// commutes with renaming.
fn build_witness(
    g1: &DefiningGraph,
    fwd: &SearchSide,
    bwd: &SearchSide,
    meet: &CanonicalForm,
) -> Result<TwistVerdict, TwistError> {
    let fwd_moves = fwd.path_to(meet);
    let bwd_moves = bwd.path_to(meet);
    let mut steps = Vec::new();
    let mut current = g1.clone();
    for mv in fwd_moves {
        current = apply_twist(&current, &mv)?;
        steps.push(TwistStep::Twist { mv, exponent: 1 });
    }
    let bwd_meet_graph = &bwd.nodes[meet].0;
    let iso = bwd_meet_graph
        .is_isomorphic(&current)
        .expect("meeting certificates agree");
    for mv in bwd_moves.into_iter().rev() {
        let translated = mv.renamed(&iso);
        current = apply_twist(&current, &translated)?;
        steps.push(TwistStep::Twist {
            mv: translated,
            exponent: 1,
        });
    }
    Ok(TwistVerdict::Equivalent {
        witness: TwistSequence { steps },
    })
}

// ---------------------------------------------------------------------------
// Ribbon decomposition and the Dehn twist compiler.

/// One decomposed letter of an `(a, a)`-ribbon: the pair `(a_i, b_i)`, the
/// label `m_i` (1 for the self-generator case), the conjugating letter `t_i`
/// (exponent +1), and the letter's exponent `epsilon_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AaRibbonStep {
    pub a: Vertex,
    pub b: Vertex,
    pub m: u32,
    pub t: Letter,
    pub epsilon: i8,
}

/// Decomposes a validated `(a, a)`-ribbon into the pair sequence
/// `(a_i, b_i, m_i, t_i, epsilon_i)`, reading the word right to left (the
/// rightmost letter acts first), so that `h = t_n^(e_n) ... t_0^(e_0)`
/// letterwise. The chain rule `a_(i+1) = a_i` for even `m_i` and
/// `a_(i+1) = b_i` for odd `m_i` closes back at `a` after the last step.
pub fn decompose_aa_ribbon(
    g: &DefiningGraph,
    a: &str,
    h: &RibbonWord,
) -> Result<Vec<AaRibbonStep>, TwistError> {
    if h.source != a || h.target != a {
        return Err(TwistError::InvalidSpec(format!(
            "ribbon endpoints ({}, {}) are not ({a}, {a})",
            h.source, h.target
        )));
    }
    let word = crate::ribbon::validate_ribbon(g, &h.letters, &h.source, &h.target)?;
    let n = word.letters.len();
    let mut steps = Vec::with_capacity(n);
    for k in (1..=n).rev() {
        let letter = &word.letters[k - 1];
        let before = &word.chain[k - 1];
        let after = &word.chain[k];
        use crate::ribbon::RibbonLetterKind as K;
        let (ai, bi, m) = match &letter.kind {
            K::OddGarside { pair: (p, q) } => {
                (after.clone(), before.clone(), g.label(p, q).unwrap())
            }
            K::SelfGenerator { x } => (x.clone(), x.clone(), 1),
            K::EvenGarside { x, t } => (x.clone(), t.clone(), g.label(x, t).unwrap()),
            K::CommutingGenerator { x, t } => (x.clone(), t.clone(), 2),
        };
        let mut base = letter.to_formal_letter();
        base.exponent = 1;
        steps.push(AaRibbonStep {
            a: ai,
            b: bi,
            m,
            t: base,
            epsilon: letter.exponent,
        });
    }
    Ok(steps)
}

/// A Dehn twist datum: a separating vertex `r`, the two sides, and a
/// centralising element presented as an `(r, r)`-ribbon word.
#[derive(Debug, Clone)]
pub struct DehnTwistSpec {
    pub r: Vertex,
    pub b: BTreeSet<Vertex>,
    pub c: BTreeSet<Vertex>,
    pub h: RibbonWord,
}

impl DehnTwistSpec {
    fn validate(&self, g: &DefiningGraph) -> Result<(), TwistError> {
        let fail = |msg: String| Err(TwistError::InvalidSpec(msg));
        if !g.contains_vertex(&self.r) {
            return fail(format!("unknown vertex `{}`", self.r));
        }
        if self.b.is_empty() || self.c.is_empty() {
            return fail("B and C must both be nonempty".into());
        }
        let mut rest = g.vertex_set();
        rest.remove(&self.r);
        let union: BTreeSet<Vertex> = self.b.union(&self.c).cloned().collect();
        if union != rest || self.b.intersection(&self.c).next().is_some() {
            return fail("B and C do not partition S - {r}".into());
        }
        for b in &self.b {
            for c in &self.c {
                if g.label(b, c).is_some() {
                    return fail(format!("edge between `{b}` in B and `{c}` in C"));
                }
            }
        }
        if self.h.source != self.r || self.h.target != self.r {
            return fail("h is not an (r, r)-ribbon".into());
        }
        crate::ribbon::validate_ribbon(g, &self.h.letters, &self.r, &self.r)?;
        Ok(())
    }
}

/// Compiles a Dehn twist into elementary twists (plus, when the ribbon's odd
/// loop runs through the twisted side, a role swap realised by compiling the
/// inverse ribbon against the other side and finishing with one global
/// conjugation).
///
/// The word is first split at every interior visit of its chain to `r`, and
/// the factors are compiled right to left (innermost conjugation first). Per
/// decomposed letter the twist is around `{a_i}` for `m_i = 1`, around
/// `{b_i}` for `m_i = 2`, and along the edge `{a_i, b_i}` for `m_i >= 3`;
/// letters whose conjugation fixes the whole tracked side pointwise (the
/// side lies inside `J u J_perp`) emit no step. Every emitted move is
/// validated on its intermediate graph; a failure aborts with the failing
/// index and that graph, signalling an input outside the expected
/// hypotheses. The final graph is checked to be isomorphic to the input.
pub fn compile_dehn_twist(
    g: &DefiningGraph,
    spec: &DehnTwistSpec,
) -> Result<TwistSequence, TwistError> {
    spec.validate(g)?;
    let h = crate::ribbon::validate_ribbon(g, &spec.h.letters, &spec.r, &spec.r)?;

    // The role swap is decided once for the whole word: if its chain ever
    // enters B, conjugating B by h is replaced by conjugating C by h^-1,
    // followed by one terminal global conjugation by h. Letters must live on
    // the non-twisted side so that their Garside elements stay untouched by
    // the compiled twists; a swap mid-sequence would change the frame of
    // every later letter.
    let interior = &h.chain[1..h.chain.len().saturating_sub(1)];
    let swapped = interior.iter().any(|v| spec.b.contains(v));
    let (side, word) = if swapped {
        (&spec.c, h.inverse())
    } else {
        (&spec.b, h.clone())
    };

    // Split at interior chain visits to r.
    let n = word.letters.len();
    let mut cuts = vec![0usize];
    for k in 1..n {
        if word.chain[k] == spec.r {
            cuts.push(k);
        }
    }
    cuts.push(n);
    let mut factors = Vec::new();
    for w in cuts.windows(2) {
        if w[0] < w[1] {
            factors.push((w[0], w[1]));
        }
    }

    let mut steps = Vec::new();
    let mut graph = g.clone();
    let mut step_index = 0usize;
    // Rightmost factor first: the word f_1 ... f_p conjugates through f_p
    // first.
    for &(start, end) in factors.iter().rev() {
        let letters = &word.letters[start..end];
        let factor =
            crate::ribbon::validate_ribbon(&graph, letters, &spec.r, &spec.r).map_err(|e| {
                TwistError::CompileStep {
                    index: step_index,
                    reason: format!("factor no longer validates: {e}"),
                    graph: graph.to_json(),
                }
            })?;
        let factor_interior = &factor.chain[1..factor.chain.len().saturating_sub(1)];
        if factor_interior.iter().any(|v| side.contains(v)) {
            // The word runs through both sides of the separation; no single
            // role swap brings all of it onto the untouched side.
            return Err(TwistError::CompileStep {
                index: step_index,
                reason: "ribbon chain crosses both sides of the separation".into(),
                graph: graph.to_json(),
            });
        }
        for st in decompose_aa_ribbon(&graph, &spec.r, &factor)? {
            let j: BTreeSet<Vertex> = match st.m {
                1 => BTreeSet::from([st.a.clone()]),
                2 => BTreeSet::from([st.b.clone()]),
                _ => BTreeSet::from([st.a.clone(), st.b.clone()]),
            };
            let j_perp = perp(&graph, &j);
            let b_move: BTreeSet<Vertex> = side
                .iter()
                .filter(|v| !j.contains(*v) && !j_perp.contains(*v))
                .cloned()
                .collect();
            if b_move.is_empty() {
                // The letter commutes with the whole tracked side; its
                // conjugation is the identity there, so there is no move.
                step_index += 1;
                continue;
            }
            let mv = TwistMove::from_j_b(&graph, j, b_move).map_err(|e| {
                TwistError::CompileStep {
                    index: step_index,
                    reason: e.to_string(),
                    graph: graph.to_json(),
                }
            })?;
            graph = apply_twist(&graph, &mv)?;
            steps.push(TwistStep::Twist {
                mv,
                exponent: st.epsilon,
            });
            step_index += 1;
        }
    }
    if swapped {
        steps.push(TwistStep::Conjugation {
            word: h.to_formal_word(),
        });
    }
    if graph.is_isomorphic(g).is_none() {
        return Err(TwistError::CompileStep {
            index: step_index,
            reason: "final graph is not isomorphic to the input".into(),
            graph: graph.to_json(),
        });
    }
    Ok(TwistSequence { steps })
}
