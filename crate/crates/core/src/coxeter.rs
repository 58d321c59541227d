//! Spherical-type detection and the finite-type classification.
//!
//! A subset `J` of generators is *spherical* when the quotient Coxeter group
//! is finite, which happens exactly when the Gram matrix (1 on the diagonal,
//! `-cos(pi/m)` off it, `-1` for an infinite label) is positive definite, and
//! *indecomposable* when `J` cannot be split into two halves all of whose
//! cross labels are 2. Positive definiteness is decided by leading principal
//! minors in floating point with a symmetric tolerance; whenever a minor
//! lands inside the tolerance (the affine diagrams have determinant exactly
//! zero) the computation falls back to exact cyclotomic arithmetic, so the
//! answer never flips with rounding.
//!
//! The finite-type table works on defining graphs, not Coxeter diagrams: a
//! non-edge of the Coxeter diagram is a label-2 edge here, so e.g. the type
//! `A_3` defining graph is a triangle with labels (3,3,2).

use crate::algebra::{Cyc, CyclotomicField, Rat};
use crate::graph::{DefiningGraph, GraphError, Vertex};
use crate::word::{FormalWord, Letter, LetterKind};
use num_bigint::BigInt;
use serde::{Serialize, Serializer};
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoxeterError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("subset is empty")]
    EmptySubset,
    #[error("subset is not spherical")]
    NotSpherical,
    #[error("subset is not indecomposable")]
    NotIndecomposable,
}

/// Exact symbolic Gram-matrix entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GramEntry {
    /// Diagonal entry, 1.
    One,
    /// Off-diagonal `-cos(pi/m)` for a finite label `m >= 2`.
    MinusCosPiOver(u32),
    /// Off-diagonal entry for an infinite label, -1.
    MinusOne,
}

impl GramEntry {
    pub fn to_f64(self) -> f64 {
        match self {
            GramEntry::One => 1.0,
            GramEntry::MinusOne => -1.0,
            GramEntry::MinusCosPiOver(m) => -(std::f64::consts::PI / m as f64).cos(),
        }
    }

    /// The exact rational value, when there is one.
    pub fn as_rational(self) -> Option<Rat> {
        let r = |n: i64, d: i64| Rat::new(BigInt::from(n), BigInt::from(d));
        match self {
            GramEntry::One => Some(r(1, 1)),
            GramEntry::MinusOne => Some(r(-1, 1)),
            GramEntry::MinusCosPiOver(2) => Some(r(0, 1)),
            GramEntry::MinusCosPiOver(3) => Some(r(-1, 2)),
            GramEntry::MinusCosPiOver(_) => None,
        }
    }
}

fn sorted_indices(g: &DefiningGraph, subset: &BTreeSet<Vertex>) -> Result<Vec<usize>, CoxeterError> {
    let mut out = Vec::with_capacity(subset.len());
    for v in subset {
        out.push(
            g.vertex_index(v)
                .ok_or_else(|| GraphError::NoSuchVertex(v.clone()))?,
        );
    }
    out.sort_unstable();
    Ok(out)
}

/// The symmetric Gram matrix of the induced system on `subset`, in the
/// sorted vertex order of the subset.
pub fn gram_matrix(
    g: &DefiningGraph,
    subset: &BTreeSet<Vertex>,
) -> Result<Vec<Vec<GramEntry>>, CoxeterError> {
    let idx = sorted_indices(g, subset)?;
    let k = idx.len();
    let mut mat = vec![vec![GramEntry::One; k]; k];
    for a in 0..k {
        for b in 0..k {
            if a != b {
                mat[a][b] = match g.label_idx(idx[a], idx[b]) {
                    Some(m) => GramEntry::MinusCosPiOver(m),
                    None => GramEntry::MinusOne,
                };
            }
        }
    }
    Ok(mat)
}

const MINOR_TOLERANCE: f64 = 1e-9;
/// Exact fallback is built for labels up to this bound; beyond it an
/// ambiguous float minor is resolved as "not positive".
const EXACT_LABEL_BOUND: u32 = 12;

/// Determinant of the leading `k x k` block in floats, by elimination with
/// partial pivoting.
fn float_leading_minor(mat: &[Vec<f64>], k: usize) -> f64 {
    let mut m: Vec<Vec<f64>> = mat[..k].iter().map(|row| row[..k].to_vec()).collect();
    let mut det = 1.0;
    for col in 0..k {
        let pivot_row = (col..k)
            .max_by(|&a, &b| m[a][col].abs().partial_cmp(&m[b][col].abs()).unwrap())
            .unwrap();
        if m[pivot_row][col] == 0.0 {
            return 0.0;
        }
        if pivot_row != col {
            m.swap(pivot_row, col);
            det = -det;
        }
        det *= m[col][col];
        for row in col + 1..k {
            let f = m[row][col] / m[col][col];
            for c in col..k {
                m[row][c] -= f * m[col][c];
            }
        }
    }
    det
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

/// Exact signs of all leading principal minors of the doubled Gram matrix
/// (diagonal 2, off-diagonal `-2cos(pi/m)`); doubling scales each minor by a
/// positive factor, so the signs are those of the Gram minors.
fn exact_minor_signs(g: &DefiningGraph, idx: &[usize]) -> Vec<i32> {
    let k = idx.len();
    let mut n = 4; // covers m = 2
    for a in 0..k {
        for b in a + 1..k {
            let m = g
                .label_idx(idx[a], idx[b])
                .expect("exact path runs on free-of-infinity subsets");
            n = lcm(n, 2 * m);
        }
    }
    let field = CyclotomicField::new(n);
    let two = field.from_rat(Rat::new(BigInt::from(2), BigInt::from(1)));
    let mat: Vec<Vec<Cyc>> = (0..k)
        .map(|a| {
            (0..k)
                .map(|b| {
                    if a == b {
                        two.clone()
                    } else {
                        let m = g.label_idx(idx[a], idx[b]).unwrap();
                        field.neg(&field.two_cos_pi_over(m))
                    }
                })
                .collect()
        })
        .collect();
    (1..=k)
        .map(|size| {
            let sub: Vec<Vec<Cyc>> = mat[..size].iter().map(|r| r[..size].to_vec()).collect();
            field.sign_of_real(&field.determinant(&sub))
        })
        .collect()
}

/// Finiteness of the quotient Coxeter group on `subset`: true iff the Gram
/// matrix is positive definite. The empty subset is spherical (trivial
/// group); any subset containing an infinite-label pair is not.
pub fn is_spherical(g: &DefiningGraph, subset: &BTreeSet<Vertex>) -> Result<bool, CoxeterError> {
    let idx = sorted_indices(g, subset)?;
    let k = idx.len();
    if k == 0 {
        return Ok(true);
    }
    for a in 0..k {
        for b in a + 1..k {
            if g.label_idx(idx[a], idx[b]).is_none() {
                return Ok(false);
            }
        }
    }
    let fmat: Vec<Vec<f64>> = (0..k)
        .map(|a| {
            (0..k)
                .map(|b| {
                    if a == b {
                        1.0
                    } else {
                        GramEntry::MinusCosPiOver(g.label_idx(idx[a], idx[b]).unwrap()).to_f64()
                    }
                })
                .collect()
        })
        .collect();
    let mut ambiguous = false;
    for size in 1..=k {
        let det = float_leading_minor(&fmat, size);
        if det < -MINOR_TOLERANCE {
            return Ok(false);
        }
        if det <= MINOR_TOLERANCE {
            ambiguous = true;
            break;
        }
    }
    if !ambiguous {
        return Ok(true);
    }
    let max_label = (0..k)
        .flat_map(|a| (a + 1..k).map(move |b| (a, b)))
        .filter_map(|(a, b)| g.label_idx(idx[a], idx[b]))
        .max()
        .unwrap_or(2);
    if max_label > EXACT_LABEL_BOUND {
        // Outside the exact fallback's domain: settle the ambiguity as
        // "some minor is not strictly positive".
        return Ok(false);
    }
    Ok(exact_minor_signs(g, &idx).iter().all(|&s| s > 0))
}

/// Partition of `subset` into indecomposable factors: connected components
/// of the auxiliary graph whose edges are the pairs with label different
/// from 2 (an infinite label counts as an edge).
pub fn indecomposable_factors(
    g: &DefiningGraph,
    subset: &BTreeSet<Vertex>,
) -> Result<Vec<BTreeSet<Vertex>>, CoxeterError> {
    let idx = sorted_indices(g, subset)?;
    let k = idx.len();
    let mut seen = vec![false; k];
    let mut out = Vec::new();
    for start in 0..k {
        if seen[start] {
            continue;
        }
        let mut comp = BTreeSet::new();
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(a) = queue.pop_front() {
            comp.insert(g.vertex_name(idx[a]).to_owned());
            for b in 0..k {
                if !seen[b] && g.label_idx(idx[a], idx[b]) != Some(2) {
                    seen[b] = true;
                    queue.push_back(b);
                }
            }
        }
        out.push(comp);
    }
    Ok(out)
}

/// The irreducible finite families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FiniteType {
    A(usize),
    B(usize),
    D(usize),
    E6,
    E7,
    E8,
    F4,
    H3,
    H4,
    I2(u32),
}

impl fmt::Display for FiniteType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FiniteType::A(n) => write!(f, "A{n}"),
            FiniteType::B(n) => write!(f, "B{n}"),
            FiniteType::D(n) => write!(f, "D{n}"),
            FiniteType::E6 => write!(f, "E6"),
            FiniteType::E7 => write!(f, "E7"),
            FiniteType::E8 => write!(f, "E8"),
            FiniteType::F4 => write!(f, "F4"),
            FiniteType::H3 => write!(f, "H3"),
            FiniteType::H4 => write!(f, "H4"),
            FiniteType::I2(m) => write!(f, "I2({m})"),
        }
    }
}

impl Serialize for FiniteType {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl FiniteType {
    pub fn rank(&self) -> usize {
        match self {
            FiniteType::A(n) | FiniteType::B(n) | FiniteType::D(n) => *n,
            FiniteType::E6 => 6,
            FiniteType::E7 => 7,
            FiniteType::E8 => 8,
            FiniteType::F4 => 4,
            FiniteType::H3 => 3,
            FiniteType::H4 => 4,
            FiniteType::I2(_) => 2,
        }
    }
}

/// Table match plus a diagram layout: the vertices arranged so that the
/// longest-element automorphism can be read off positionally. For the
/// path families the layout is the path; for `D`/`E` the layout lists the
/// arms in a fixed order.
pub(crate) struct TypeLayout {
    pub family: FiniteType,
    /// Global vertex indices in diagram order.
    pub order: Vec<usize>,
}

pub(crate) fn finite_type_layout(g: &DefiningGraph, idx: &[usize]) -> Option<TypeLayout> {
    let k = idx.len();
    if k == 0 {
        return None;
    }
    // Spherical subsets are free of infinity.
    for a in 0..k {
        for b in a + 1..k {
            g.label_idx(idx[a], idx[b])?;
        }
    }
    if k == 1 {
        return Some(TypeLayout {
            family: FiniteType::A(1),
            order: vec![idx[0]],
        });
    }
    // Coxeter-diagram adjacency: labels >= 3 only.
    let diagram_label = |a: usize, b: usize| -> Option<u32> {
        g.label_idx(idx[a], idx[b]).filter(|&m| m >= 3)
    };
    let adj: Vec<Vec<usize>> = (0..k)
        .map(|a| (0..k).filter(|&b| b != a && diagram_label(a, b).is_some()).collect())
        .collect();
    let edge_count: usize = adj.iter().map(|r| r.len()).sum::<usize>() / 2;
    // Indecomposable = diagram connected; finite types are trees.
    if edge_count != k - 1 {
        return None;
    }
    let mut seen = vec![false; k];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    let mut count = 1;
    while let Some(a) = queue.pop_front() {
        for &b in &adj[a] {
            if !seen[b] {
                seen[b] = true;
                count += 1;
                queue.push_back(b);
            }
        }
    }
    if count != k {
        return None;
    }

    if k == 2 {
        let m = diagram_label(0, 1)?;
        let family = match m {
            3 => FiniteType::A(2),
            4 => FiniteType::B(2),
            m => FiniteType::I2(m),
        };
        return Some(TypeLayout {
            family,
            order: vec![idx[0], idx[1]],
        });
    }

    if adj.iter().any(|r| r.len() > 3) {
        return None;
    }
    let branches: Vec<usize> = (0..k).filter(|&a| adj[a].len() == 3).collect();
    if branches.len() > 1 {
        return None;
    }

    if branches.is_empty() {
        // A path. Walk it from the end with the smaller vertex name.
        let mut ends: Vec<usize> = (0..k).filter(|&a| adj[a].len() == 1).collect();
        ends.sort_by_key(|&a| g.vertex_name(idx[a]));
        let mut path = vec![ends[0]];
        let mut prev = usize::MAX;
        while path.len() < k {
            let cur = *path.last().unwrap();
            let next = *adj[cur].iter().find(|&&b| b != prev)?;
            prev = cur;
            path.push(next);
        }
        let labels: Vec<u32> = (0..k - 1)
            .map(|i| diagram_label(path[i], path[i + 1]).unwrap())
            .collect();
        let special: Vec<u32> = labels.iter().copied().filter(|&m| m != 3).collect();
        let family = match special.as_slice() {
            [] => FiniteType::A(k),
            [4] => {
                if labels[0] == 4 {
                    path.reverse();
                    FiniteType::B(k)
                } else if labels[k - 2] == 4 {
                    FiniteType::B(k)
                } else if k == 4 && labels == [3, 4, 3] {
                    FiniteType::F4
                } else {
                    return None;
                }
            }
            [5] => {
                if labels[k - 2] == 5 {
                    path.reverse();
                }
                if labels.first() == Some(&5) || labels.last() == Some(&5) {
                    // Re-read after the possible reversal.
                    let first = diagram_label(path[0], path[1]).unwrap();
                    if first != 5 {
                        return None;
                    }
                    match k {
                        3 => FiniteType::H3,
                        4 => FiniteType::H4,
                        _ => return None,
                    }
                } else {
                    return None;
                }
            }
            _ => return None,
        };
        return Some(TypeLayout {
            family,
            order: path.into_iter().map(|a| idx[a]).collect(),
        });
    }

    // One branch vertex: D or E, and every diagram label must be 3.
    let centre = branches[0];
    for a in 0..k {
        for &b in &adj[a] {
            if diagram_label(a, b) != Some(3) {
                return None;
            }
        }
    }
    let mut arms: Vec<Vec<usize>> = Vec::new();
    for &first in &adj[centre] {
        let mut arm = vec![first];
        let mut prev = centre;
        loop {
            let cur = *arm.last().unwrap();
            match adj[cur].iter().find(|&&b| b != prev) {
                Some(&next) => {
                    prev = cur;
                    arm.push(next);
                }
                None => break,
            }
        }
        arms.push(arm);
    }
    arms.sort_by(|x, y| {
        (x.len(), g.vertex_name(idx[x[0]])).cmp(&(y.len(), g.vertex_name(idx[y[0]])))
    });
    let lens: Vec<usize> = arms.iter().map(|a| a.len()).collect();
    let family = match lens.as_slice() {
        [1, 1, _] => FiniteType::D(k),
        [1, 2, 2] => FiniteType::E6,
        [1, 2, 3] => FiniteType::E7,
        [1, 2, 4] => FiniteType::E8,
        _ => return None,
    };
    // Layout: long arm outside-in, centre, then the remaining arms.
    let mut order = Vec::with_capacity(k);
    match family {
        FiniteType::D(_) => {
            for &a in arms[2].iter().rev() {
                order.push(idx[a]);
            }
            order.push(idx[centre]);
            order.push(idx[arms[0][0]]);
            order.push(idx[arms[1][0]]);
        }
        FiniteType::E6 => {
            // Mirrored arms of length 2 around the centre, short arm last.
            for &a in arms[1].iter().rev() {
                order.push(idx[a]);
            }
            order.push(idx[centre]);
            for &a in arms[2].iter() {
                order.push(idx[a]);
            }
            order.push(idx[arms[0][0]]);
        }
        _ => {
            for &a in arms[2].iter().rev() {
                order.push(idx[a]);
            }
            order.push(idx[centre]);
            for &a in arms[1].iter() {
                order.push(idx[a]);
            }
            order.push(idx[arms[0][0]]);
        }
    }
    Some(TypeLayout { family, order })
}

/// The classification family of a spherical indecomposable subset, or `None`
/// when the subset is not spherical (or not indecomposable).
pub fn finite_type(
    g: &DefiningGraph,
    subset: &BTreeSet<Vertex>,
) -> Result<Option<FiniteType>, CoxeterError> {
    let idx = sorted_indices(g, subset)?;
    Ok(finite_type_layout(g, &idx).map(|l| l.family))
}

/// The diagram automorphism induced by conjugation with the Garside element
/// (the longest element of the finite Coxeter group): a label-preserving
/// involution of `J`. Nontrivial exactly for `A_n (n >= 2)`, `D_n (n odd)`,
/// `E6`, and `I2(m)` with `m` odd.
pub fn longest_element_automorphism(
    g: &DefiningGraph,
    subset: &BTreeSet<Vertex>,
) -> Result<BTreeMap<Vertex, Vertex>, CoxeterError> {
    let idx = sorted_indices(g, subset)?;
    if idx.is_empty() {
        return Err(CoxeterError::EmptySubset);
    }
    if indecomposable_factors(g, subset)?.len() != 1 {
        return Err(CoxeterError::NotIndecomposable);
    }
    let layout = finite_type_layout(g, &idx).ok_or(CoxeterError::NotSpherical)?;
    let name = |i: usize| g.vertex_name(i).to_owned();
    let identity = || -> BTreeMap<Vertex, Vertex> {
        layout.order.iter().map(|&i| (name(i), name(i))).collect()
    };
    let mirror = |order: &[usize]| -> BTreeMap<Vertex, Vertex> {
        order
            .iter()
            .zip(order.iter().rev())
            .map(|(&i, &j)| (name(i), name(j)))
            .collect()
    };
    let map = match layout.family {
        FiniteType::A(n) if n >= 2 => mirror(&layout.order),
        FiniteType::I2(m) if m % 2 == 1 => mirror(&layout.order),
        FiniteType::D(n) if n % 2 == 1 => {
            // Swap the two fork tips (the last two layout entries).
            let mut map = identity();
            let t1 = name(layout.order[layout.order.len() - 2]);
            let t2 = name(layout.order[layout.order.len() - 1]);
            map.insert(t1.clone(), t2.clone());
            map.insert(t2, t1);
            map
        }
        FiniteType::E6 => {
            // Mirror the five path positions, fix the short arm.
            let path = &layout.order[..5];
            let mut map = mirror(path);
            let tip = name(layout.order[5]);
            map.insert(tip.clone(), tip);
            map
        }
        _ => identity(),
    };
    Ok(map)
}

/// The Garside word of a spherical indecomposable subset: the generator for
/// rank one, the alternating word `prod(a, b, m)` for rank two, and a single
/// symbolic Garside letter for rank three and above.
pub fn garside_word(
    g: &DefiningGraph,
    subset: &BTreeSet<Vertex>,
) -> Result<FormalWord, CoxeterError> {
    if subset.is_empty() {
        return Err(CoxeterError::EmptySubset);
    }
    if indecomposable_factors(g, subset)?.len() != 1 {
        return Err(CoxeterError::NotIndecomposable);
    }
    if !is_spherical(g, subset)? {
        return Err(CoxeterError::NotSpherical);
    }
    let names: Vec<&Vertex> = subset.iter().collect();
    match names.as_slice() {
        [v] => Ok(FormalWord::from_letters([Letter::gen((*v).clone(), 1)])),
        [a, b] => {
            let m = g.label(a, b).expect("spherical pair has a finite label");
            let letters = (0..m).map(|i| {
                let v = if i % 2 == 0 { (*a).clone() } else { (*b).clone() };
                Letter::gen(v, 1)
            });
            Ok(FormalWord::from_letters(letters))
        }
        _ => Ok(FormalWord::from_letters([Letter::garside(
            subset.clone(),
            1,
        )])),
    }
}

/// The single conjugator letter contributed by a twist around `J`: the
/// generator itself for rank one, the Garside letter otherwise.
pub(crate) fn garside_letter(subset: &BTreeSet<Vertex>, exponent: i8) -> Letter {
    if subset.len() == 1 {
        Letter::gen(subset.iter().next().unwrap().clone(), exponent)
    } else {
        Letter {
            kind: LetterKind::Garside(subset.clone()),
            exponent,
        }
    }
}

/// Summary classification of the induced system on a subset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoxeterClass {
    pub spherical: bool,
    pub right_angled: bool,
    pub large_type: bool,
    pub xxxl: bool,
    pub triangle_free: bool,
    pub free_of_infinity: bool,
    pub dihedral: bool,
    pub indecomposable: bool,
    /// Finite families of the indecomposable factors that have one.
    pub finite_components: Vec<FiniteType>,
}

/// Classifies the induced system on `subset` (all present labels are read off
/// the induced subgraph).
pub fn classify(g: &DefiningGraph, subset: &BTreeSet<Vertex>) -> Result<CoxeterClass, CoxeterError> {
    let idx = sorted_indices(g, subset)?;
    let k = idx.len();
    let mut right_angled = true;
    let mut large_type = true;
    let mut xxxl = true;
    let mut free_of_infinity = true;
    for a in 0..k {
        for b in a + 1..k {
            match g.label_idx(idx[a], idx[b]) {
                Some(m) => {
                    if m != 2 {
                        right_angled = false;
                    }
                    if m < 3 {
                        large_type = false;
                    }
                    if m < 6 {
                        xxxl = false;
                    }
                }
                None => free_of_infinity = false,
            }
        }
    }
    let mut triangle_free = true;
    'outer: for a in 0..k {
        for b in a + 1..k {
            for c in b + 1..k {
                if g.label_idx(idx[a], idx[b]).is_some()
                    && g.label_idx(idx[a], idx[c]).is_some()
                    && g.label_idx(idx[b], idx[c]).is_some()
                {
                    triangle_free = false;
                    break 'outer;
                }
            }
        }
    }
    let dihedral = k == 2 && g.label_idx(idx[0], idx[1]).is_some_and(|m| m >= 3);
    let factors = indecomposable_factors(g, subset)?;
    let mut finite_components = Vec::new();
    for f in &factors {
        if let Some(t) = finite_type(g, f)? {
            finite_components.push(t);
        }
    }
    Ok(CoxeterClass {
        spherical: is_spherical(g, subset)?,
        right_angled,
        large_type,
        xxxl,
        triangle_free,
        free_of_infinity,
        dihedral,
        indecomposable: factors.len() <= 1,
        finite_components,
    })
}
