//! Tubes and tubings.
//!
//! A tube is a connected, convex subset with at least two elements; a proper
//! tubing is a set of proper tubes that are pairwise nested or disjoint and
//! whose precedence digraph over disjoint pairs is acyclic. Proper tubings
//! ordered by reverse inclusion form the face lattice of the poset
//! associahedron; maximal tubings are its vertices.

use thiserror::Error;

use crate::poset::{ElemSet, Poset};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TubingError {
    #[error("tubes are not disjoint")]
    NotDisjoint,
    #[error("poset is not connected")]
    NotConnected,
    #[error("poset needs at least 2 elements")]
    TooSmall,
    #[error("tubing is not maximal")]
    NotMaximal,
}

/// All proper tubes of `p`, sorted by size then lexicographically by member
/// indices. This order is the canonical tube order used everywhere.
pub fn enumerate_proper_tubes(p: &Poset) -> Vec<ElemSet> {
    let mut tubes: Vec<ElemSet> = ElemSet::all_subsets(p.len())
        .filter(|&s| p.is_proper_tube(s))
        .collect();
    tubes.sort_by_key(|s| (s.len(), s.to_vec()));
    tubes
}

/// Nested or disjoint.
pub fn tubes_compatible(a: ElemSet, b: ElemSet) -> bool {
    a.is_subset(b) || b.is_subset(a) || a.is_disjoint(b)
}

/// For disjoint tubes: whether some element of `a` strictly precedes some
/// element of `b`.
pub fn tube_precedes(p: &Poset, a: ElemSet, b: ElemSet) -> Result<bool, TubingError> {
    if !a.is_disjoint(b) {
        return Err(TubingError::NotDisjoint);
    }
    Ok(precedes_unchecked(p, a, b))
}

fn precedes_unchecked(p: &Poset, a: ElemSet, b: ElemSet) -> bool {
    a.iter().any(|x| {
        let strictly_above = p.up_set(x).difference(ElemSet::singleton(x));
        !strictly_above.is_disjoint(b)
    })
}

/// Whether a family of proper tubes forms a proper tubing: pairwise nested or
/// disjoint, and no directed cycle in the precedence digraph on disjoint
/// pairs.
pub fn is_proper_tubing(p: &Poset, tubes: &[ElemSet]) -> bool {
    for t in tubes {
        if !p.is_proper_tube(*t) {
            return false;
        }
    }
    for (k, &a) in tubes.iter().enumerate() {
        for &b in &tubes[k + 1..] {
            if a == b || !tubes_compatible(a, b) {
                return false;
            }
        }
    }
    precedence_acyclic(p, tubes)
}

/// Cycle detection on the digraph with an edge a -> b whenever a, b are
/// disjoint and a precedes b. Nested pairs contribute no edges.
pub fn precedence_acyclic(p: &Poset, tubes: &[ElemSet]) -> bool {
    let n = tubes.len();
    let mut adj = vec![Vec::new(); n];
    for i in 0..n {
        for j in 0..n {
            if i != j && tubes[i].is_disjoint(tubes[j]) && precedes_unchecked(p, tubes[i], tubes[j])
            {
                adj[i].push(j);
            }
        }
    }
    // Iterative three-color DFS.
    let mut color = vec![0u8; n];
    for start in 0..n {
        if color[start] != 0 {
            continue;
        }
        let mut stack = vec![(start, 0usize)];
        color[start] = 1;
        while let Some(&mut (v, ref mut next)) = stack.last_mut() {
            if *next < adj[v].len() {
                let w = adj[v][*next];
                *next += 1;
                match color[w] {
                    0 => {
                        color[w] = 1;
                        stack.push((w, 0));
                    }
                    1 => return false,
                    _ => {}
                }
            } else {
                color[v] = 2;
                stack.pop();
            }
        }
    }
    true
}

/// A proper tubing, stored as sorted indices into the canonical tube list.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tubing {
    pub indices: Vec<usize>,
}

impl Tubing {
    pub fn empty() -> Self {
        Tubing {
            indices: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains_all(&self, other: &Tubing) -> bool {
        other.indices.iter().all(|i| self.indices.contains(i))
    }

    /// Size of the intersection with another tubing.
    pub fn common(&self, other: &Tubing) -> usize {
        self.indices
            .iter()
            .filter(|i| other.indices.contains(i))
            .count()
    }
}

/// Canonical tube list of a connected poset plus tubing enumeration.
pub struct TubingEngine<'a> {
    poset: &'a Poset,
    tubes: Vec<ElemSet>,
}

impl<'a> TubingEngine<'a> {
    pub fn new(poset: &'a Poset) -> Result<Self, TubingError> {
        if poset.len() < 2 {
            return Err(TubingError::TooSmall);
        }
        if !poset.is_connected() {
            return Err(TubingError::NotConnected);
        }
        Ok(TubingEngine {
            poset,
            tubes: enumerate_proper_tubes(poset),
        })
    }

    pub fn poset(&self) -> &Poset {
        self.poset
    }

    pub fn tubes(&self) -> &[ElemSet] {
        &self.tubes
    }

    pub fn tube_index(&self, s: ElemSet) -> Option<usize> {
        self.tubes.iter().position(|&t| t == s)
    }

    pub fn members(&self, t: &Tubing) -> Vec<ElemSet> {
        t.indices.iter().map(|&i| self.tubes[i]).collect()
    }

    pub fn is_valid_tubing(&self, t: &Tubing) -> bool {
        is_proper_tubing(self.poset, &self.members(t))
    }

    /// All proper tubings, the empty tubing included, by backtracking over
    /// the canonical tube order. Output is sorted by size then indices.
    pub fn proper_tubings(&self) -> Vec<Tubing> {
        let mut out = vec![Tubing::empty()];
        let mut current: Vec<usize> = Vec::new();
        self.extend_tubings(&mut current, 0, &mut out);
        out.sort_by_key(|t| (t.len(), t.indices.clone()));
        out
    }

    fn extend_tubings(&self, current: &mut Vec<usize>, from: usize, out: &mut Vec<Tubing>) {
        for cand in from..self.tubes.len() {
            if !current
                .iter()
                .all(|&i| tubes_compatible(self.tubes[i], self.tubes[cand]))
            {
                continue;
            }
            current.push(cand);
            let members: Vec<ElemSet> = current.iter().map(|&i| self.tubes[i]).collect();
            if precedence_acyclic(self.poset, &members) {
                out.push(Tubing {
                    indices: current.clone(),
                });
                self.extend_tubings(current, cand + 1, out);
            }
            current.pop();
        }
    }

    /// All maximal tubings. Each must have exactly |P| - 2 tubes; a
    /// violation would mean the polytope is not simple and is reported as a
    /// library bug.
    pub fn maximal_tubings(&self) -> Vec<Tubing> {
        let all = self.proper_tubings();
        let mut maximal = Vec::new();
        for t in &all {
            let extendable = (0..self.tubes.len()).any(|cand| {
                if t.indices.contains(&cand) {
                    return false;
                }
                let mut members = self.members(t);
                if !members
                    .iter()
                    .all(|&m| tubes_compatible(m, self.tubes[cand]))
                {
                    return false;
                }
                members.push(self.tubes[cand]);
                precedence_acyclic(self.poset, &members)
            });
            if !extendable {
                assert_eq!(
                    t.len(),
                    self.poset.len() - 2,
                    "maximal tubing of unexpected size: library bug"
                );
                maximal.push(t.clone());
            }
        }
        maximal
    }

    /// Edge relation of the vertex graph: maximal tubings sharing all but
    /// one tube.
    pub fn tubings_adjacent(&self, a: &Tubing, b: &Tubing) -> Result<bool, TubingError> {
        let want = self.poset.len() - 2;
        if a.len() != want
            || b.len() != want
            || !self.is_valid_tubing(a)
            || !self.is_valid_tubing(b)
        {
            return Err(TubingError::NotMaximal);
        }
        if self.poset.len() < 3 {
            return Ok(false);
        }
        Ok(a != b && a.common(b) == self.poset.len() - 3)
    }

    /// Tubing as nested arrays of element names, e.g. `[[1,2],[1,2,3]]`.
    pub fn tubing_string(&self, t: &Tubing) -> String {
        let parts: Vec<String> = t
            .indices
            .iter()
            .map(|&i| {
                let names: Vec<&str> = self.tubes[i]
                    .iter()
                    .map(|e| self.poset.element_name(e))
                    .collect();
                format!("[{}]", names.join(","))
            })
            .collect();
        format!("[{}]", parts.join(","))
    }

    /// DOT rendering of the face lattice: proper tubings under reverse
    /// inclusion, edges from each tubing to its covers (one tube removed).
    pub fn lattice_dot(&self) -> String {
        let all = self.proper_tubings();
        let mut out = String::from("digraph tubing_lattice {\n  rankdir=BT;\n");
        for (k, t) in all.iter().enumerate() {
            out.push_str(&format!("  t{k} [label=\"{}\"];\n", self.tubing_string(t)));
        }
        for (k, t) in all.iter().enumerate() {
            for (k2, t2) in all.iter().enumerate() {
                if t2.len() + 1 == t.len() && t.contains_all(t2) {
                    out.push_str(&format!("  t{k} -> t{k2};\n"));
                }
            }
        }
        out.push_str("}\n");
        out
    }
}
