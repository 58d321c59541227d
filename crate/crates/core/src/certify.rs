//! Sufficient-condition certifier for the strong twist conjecture.
//!
//! The certifier combines two ingredients: every big chunk must belong to a
//! class known to satisfy the strong twist conjecture, and every maximal
//! clique must span a system known to have the vertex ribbon property
//! (spherical, large-type, or right-angled). Both lists are closed: the
//! certifier never claims anything for a class that is not in its hardcoded
//! tables, so `not_certified` only ever means "no sufficient condition
//! applied", never that the conjecture fails.

use crate::coxeter::{self, CoxeterError, FiniteType};
use crate::graph::{DefiningGraph, GraphError, Vertex};
use crate::DEFAULT_VERTEX_CAP;
use serde::Serialize;
use std::collections::BTreeSet;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CertifyError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Coxeter(#[from] CoxeterError),
    #[error("graph is not one-ended (needs to be connected with at least two vertices)")]
    NotOneEnded,
    #[error("graph has {vertices} vertices, above the clique-enumeration cap {cap}")]
    TooLarge { vertices: usize, cap: usize },
}

/// Chunk classes with a known strong-twist-conjecture proof. The list is
/// exhaustive by construction; anything outside it is left unclassified.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChunkClass {
    RightAngled,
    Dihedral,
    LargeTriangleFree,
    LargeFreeOfInfinity,
    Xxxl,
    SphericalA(usize),
    SphericalB(usize),
    SphericalD(usize),
}

impl fmt::Display for ChunkClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChunkClass::RightAngled => write!(f, "right_angled"),
            ChunkClass::Dihedral => write!(f, "dihedral"),
            ChunkClass::LargeTriangleFree => write!(f, "large_triangle_free"),
            ChunkClass::LargeFreeOfInfinity => write!(f, "large_free_of_infinity"),
            ChunkClass::Xxxl => write!(f, "xxxl"),
            ChunkClass::SphericalA(n) => write!(f, "spherical_A{n}"),
            ChunkClass::SphericalB(n) => write!(f, "spherical_B{n}"),
            ChunkClass::SphericalD(n) => write!(f, "spherical_D{n}"),
        }
    }
}

impl Serialize for ChunkClass {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// The first matching class for a big chunk, or `None` when no listed class
/// applies. Chunks are connected without separating vertices by
/// construction, which the large-type entries rely on.
pub fn chunk_class(
    g: &DefiningGraph,
    chunk: &BTreeSet<Vertex>,
) -> Result<Option<ChunkClass>, CertifyError> {
    let summary = coxeter::classify(g, chunk)?;
    if summary.right_angled {
        return Ok(Some(ChunkClass::RightAngled));
    }
    // A two-vertex chunk with one label >= 3 is a dihedral system; listed
    // before the other large-type classes, which would also cover it.
    if summary.dihedral {
        return Ok(Some(ChunkClass::Dihedral));
    }
    if summary.large_type && summary.triangle_free {
        return Ok(Some(ChunkClass::LargeTriangleFree));
    }
    if summary.large_type && summary.free_of_infinity {
        return Ok(Some(ChunkClass::LargeFreeOfInfinity));
    }
    if summary.xxxl {
        return Ok(Some(ChunkClass::Xxxl));
    }
    if summary.indecomposable {
        match coxeter::finite_type(g, chunk)? {
            Some(FiniteType::A(n)) if n >= 3 => return Ok(Some(ChunkClass::SphericalA(n))),
            Some(FiniteType::B(n)) if n >= 3 => return Ok(Some(ChunkClass::SphericalB(n))),
            Some(FiniteType::D(n)) if n >= 4 && n != 5 => {
                return Ok(Some(ChunkClass::SphericalD(n)))
            }
            _ => {}
        }
    }
    Ok(None)
}

/// Ribbon status of one maximal clique: the induced system is certified when
/// it is spherical, large-type, or right-angled.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CliqueStatus {
    pub vertices: BTreeSet<Vertex>,
    pub certified: bool,
    pub reason: String,
}

/// Maximal cliques by Bron-Kerbosch with pivoting (adjacency = finite label).
pub fn maximal_cliques(g: &DefiningGraph) -> Result<Vec<BTreeSet<Vertex>>, CertifyError> {
    let n = g.vertex_count();
    if n > DEFAULT_VERTEX_CAP {
        return Err(CertifyError::TooLarge {
            vertices: n,
            cap: DEFAULT_VERTEX_CAP,
        });
    }
    let adj: Vec<BTreeSet<usize>> = (0..n)
        .map(|i| g.neighbors_idx(i).into_iter().collect())
        .collect();
    let mut cliques: Vec<BTreeSet<usize>> = Vec::new();
    bron_kerbosch(
        &adj,
        BTreeSet::new(),
        (0..n).collect(),
        BTreeSet::new(),
        &mut cliques,
    );
    let mut out: Vec<BTreeSet<Vertex>> = cliques
        .into_iter()
        .map(|c| c.into_iter().map(|i| g.vertex_name(i).to_owned()).collect())
        .collect();
    out.sort();
    Ok(out)
}

fn bron_kerbosch(
    adj: &[BTreeSet<usize>],
    r: BTreeSet<usize>,
    mut p: BTreeSet<usize>,
    mut x: BTreeSet<usize>,
    out: &mut Vec<BTreeSet<usize>>,
) {
    if p.is_empty() && x.is_empty() {
        out.push(r);
        return;
    }
    // Pivot on the candidate with the most neighbours in P.
    let pivot = p
        .union(&x)
        .max_by_key(|&&u| adj[u].intersection(&p).count())
        .copied()
        .expect("P or X is nonempty");
    let candidates: Vec<usize> = p.difference(&adj[pivot]).copied().collect();
    for v in candidates {
        let mut r2 = r.clone();
        r2.insert(v);
        let p2 = p.intersection(&adj[v]).copied().collect();
        let x2 = x.intersection(&adj[v]).copied().collect();
        bron_kerbosch(adj, r2, p2, x2, out);
        p.remove(&v);
        x.insert(v);
    }
}

/// Checks the ribbon hypothesis on every maximal clique.
pub fn clique_ribbon_certified(g: &DefiningGraph) -> Result<Vec<CliqueStatus>, CertifyError> {
    let mut out = Vec::new();
    for clique in maximal_cliques(g)? {
        let summary = coxeter::classify(g, &clique)?;
        let (certified, reason) = if summary.right_angled {
            (true, "right-angled (free abelian on the clique)".to_owned())
        } else if summary.spherical {
            let families: Vec<String> = summary
                .finite_components
                .iter()
                .map(|t| t.to_string())
                .collect();
            (true, format!("spherical ({})", families.join(" x ")))
        } else if summary.large_type {
            (true, "large type".to_owned())
        } else {
            (
                false,
                "not spherical, large-type, or right-angled; no ribbon result applies"
                    .to_owned(),
            )
        };
        out.push(CliqueStatus {
            vertices: clique,
            certified,
            reason,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictLevel {
    StrongCertified,
    WeakCertified,
    NotCertified,
}

impl fmt::Display for VerdictLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VerdictLevel::StrongCertified => write!(f, "strong_certified"),
            VerdictLevel::WeakCertified => write!(f, "weak_certified"),
            VerdictLevel::NotCertified => write!(f, "not_certified"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChunkReport {
    pub vertices: BTreeSet<Vertex>,
    pub class: Option<ChunkClass>,
}

/// The certifier's output: a level, per-chunk class labels, per-clique
/// ribbon status, and human-readable reasons citing the rule used.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub level: VerdictLevel,
    pub chunks: Vec<ChunkReport>,
    pub cliques: Vec<CliqueStatus>,
    pub reasons: Vec<String>,
}

/// Applies the combination rules: `strong_certified` when every chunk is
/// classed and every maximal clique is ribbon-certified; `weak_certified`
/// when every chunk is classed but some clique is not certified;
/// `not_certified` otherwise. A negative verdict never means the conjecture
/// fails; it only means no sufficient condition in the tables applied.
pub fn strong_twist_verdict(g: &DefiningGraph) -> Result<Verdict, CertifyError> {
    if g.vertex_count() == 1 {
        // A single generator: the only Artin generating sets with the same
        // reflections are conjugates of it.
        return Ok(Verdict {
            level: VerdictLevel::StrongCertified,
            chunks: vec![ChunkReport {
                vertices: g.vertex_set(),
                class: Some(ChunkClass::RightAngled),
            }],
            cliques: vec![],
            reasons: vec!["single generator: trivially certified".to_owned()],
        });
    }
    if !g.is_one_ended() {
        return Err(CertifyError::NotOneEnded);
    }
    let mut reasons = Vec::new();
    let mut chunks = Vec::new();
    let mut all_classed = true;
    for chunk in g.big_chunks().chunks {
        let class = chunk_class(g, &chunk)?;
        let names: Vec<&str> = chunk.iter().map(|s| s.as_str()).collect();
        match &class {
            Some(c) => reasons.push(format!(
                "chunk {{{}}}: class {c} satisfies the strong twist conjecture",
                names.join(",")
            )),
            None => {
                all_classed = false;
                reasons.push(format!(
                    "chunk {{{}}}: no certified class applies (this does not mean the \
                     conjecture fails)",
                    names.join(",")
                ));
            }
        }
        chunks.push(ChunkReport {
            vertices: chunk,
            class,
        });
    }
    let cliques = clique_ribbon_certified(g)?;
    let mut all_cliques = true;
    for cs in &cliques {
        let names: Vec<&str> = cs.vertices.iter().map(|s| s.as_str()).collect();
        if cs.certified {
            reasons.push(format!(
                "clique {{{}}}: vertex ribbon property holds ({})",
                names.join(","),
                cs.reason
            ));
        } else {
            all_cliques = false;
            reasons.push(format!(
                "clique {{{}}}: {} (this does not mean the conjecture fails)",
                names.join(","),
                cs.reason
            ));
        }
    }
    let level = if all_classed && all_cliques {
        reasons.push(
            "all chunks classed and all maximal cliques ribbon-certified: \
             the strong twist conjecture holds"
                .to_owned(),
        );
        VerdictLevel::StrongCertified
    } else if all_classed {
        reasons.push(
            "all chunks classed but some clique lacks a ribbon certificate: \
             the weak twist conjecture holds"
                .to_owned(),
        );
        VerdictLevel::WeakCertified
    } else {
        VerdictLevel::NotCertified
    };
    Ok(Verdict {
        level,
        chunks,
        cliques,
        reasons,
    })
}
