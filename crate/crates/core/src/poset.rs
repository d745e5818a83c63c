//! Finite posets as validated DAGs.
//!
//! A [`Poset`] stores its elements in declaration order, the full transitive
//! closure of the order relation as a bit matrix, and the covering relations
//! (the Hasse diagram) as the transitive reduction. Subsets of elements are
//! handled as [`ElemSet`] bitsets over the element indices.

use std::fmt;

use thiserror::Error;

/// Set of element indices of a carrier poset, packed into a 64-bit word.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ElemSet(u64);

impl ElemSet {
    pub const EMPTY: ElemSet = ElemSet(0);

    pub fn singleton(i: usize) -> Self {
        debug_assert!(i < 64);
        ElemSet(1 << i)
    }

    /// The full set {0, .., n-1}.
    pub fn full(n: usize) -> Self {
        debug_assert!(n <= 64);
        if n == 64 {
            ElemSet(!0)
        } else {
            ElemSet((1u64 << n) - 1)
        }
    }

    pub fn contains(self, i: usize) -> bool {
        i < 64 && self.0 >> i & 1 == 1
    }

    pub fn insert(&mut self, i: usize) {
        debug_assert!(i < 64);
        self.0 |= 1 << i;
    }

    pub fn remove(&mut self, i: usize) {
        self.0 &= !(1 << i);
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: ElemSet) -> ElemSet {
        ElemSet(self.0 | other.0)
    }

    pub fn intersection(self, other: ElemSet) -> ElemSet {
        ElemSet(self.0 & other.0)
    }

    pub fn difference(self, other: ElemSet) -> ElemSet {
        ElemSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: ElemSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: ElemSet) -> bool {
        self.0 & other.0 == 0
    }

    pub fn min(self) -> Option<usize> {
        if self.0 == 0 {
            None
        } else {
            Some(self.0.trailing_zeros() as usize)
        }
    }

    /// Iterate member indices in increasing order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i)
            }
        })
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }

    /// All subsets of {0, .., n-1} in increasing numeric order of the bit
    /// pattern (so by size only roughly; callers sort when they need the
    /// canonical size-then-lex order).
    pub fn all_subsets(n: usize) -> impl Iterator<Item = ElemSet> {
        debug_assert!(n < 64);
        (0u64..1 << n).map(ElemSet)
    }
}

impl FromIterator<usize> for ElemSet {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        let mut s = ElemSet::EMPTY;
        for i in iter {
            s.insert(i);
        }
        s
    }
}

impl fmt::Debug for ElemSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PosetError {
    #[error("relation digraph has a directed cycle (antisymmetry violated)")]
    Cycle,
    #[error("duplicate element identifier `{0}`")]
    DuplicateElement(String),
    #[error("relation references undeclared element `{0}`")]
    UnknownElement(String),
    #[error("poset must have at least one element")]
    Empty,
    #[error("subset is not a tube")]
    NotATube,
    #[error("too many elements ({0}); at most 63 supported")]
    TooLarge(usize),
}

/// A finite poset: elements in declaration order, the transitive closure
/// `leq`, and the covering relations of the Hasse diagram.
#[derive(Clone, PartialEq, Eq)]
pub struct Poset {
    elements: Vec<String>,
    /// Row i is the bitset of all j with i <= j; reflexive and transitive.
    up: Vec<ElemSet>,
    /// Covering pairs (i, j) with i covered by j, sorted.
    covers: Vec<(usize, usize)>,
}

impl fmt::Debug for Poset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poset({:?}, covers {:?})", self.elements, self.covers)
    }
}

impl Poset {
    /// Build a poset from declared elements and generating relations
    /// (pairs `(a, b)` meaning `a < b`). Computes the transitive closure and
    /// reduction; rejects cycles and duplicate or unknown identifiers.
    pub fn build<S: AsRef<str>>(elements: &[S], relations: &[(S, S)]) -> Result<Poset, PosetError> {
        if elements.is_empty() {
            return Err(PosetError::Empty);
        }
        if elements.len() > 63 {
            return Err(PosetError::TooLarge(elements.len()));
        }
        let names: Vec<String> = elements.iter().map(|s| s.as_ref().to_string()).collect();
        for (k, name) in names.iter().enumerate() {
            if names[..k].contains(name) {
                return Err(PosetError::DuplicateElement(name.clone()));
            }
        }
        let index_of = |name: &str| -> Result<usize, PosetError> {
            names
                .iter()
                .position(|e| e == name)
                .ok_or_else(|| PosetError::UnknownElement(name.to_string()))
        };
        let mut pairs = Vec::with_capacity(relations.len());
        for (a, b) in relations {
            pairs.push((index_of(a.as_ref())?, index_of(b.as_ref())?));
        }
        Poset::from_index_relations(names, &pairs)
    }

    /// Build from element names and index pairs `(i, j)` meaning `i < j`.
    pub fn from_index_relations(
        names: Vec<String>,
        relations: &[(usize, usize)],
    ) -> Result<Poset, PosetError> {
        let n = names.len();
        if n == 0 {
            return Err(PosetError::Empty);
        }
        if n > 63 {
            return Err(PosetError::TooLarge(n));
        }
        let mut up = vec![ElemSet::EMPTY; n];
        for (i, row) in up.iter_mut().enumerate() {
            row.insert(i);
        }
        for &(a, b) in relations {
            assert!(a < n && b < n, "relation index out of range");
            up[a].insert(b);
        }
        // Warshall closure on bit rows.
        for k in 0..n {
            for i in 0..n {
                if up[i].contains(k) {
                    up[i] = up[i].union(up[k]);
                }
            }
        }
        // Antisymmetry: i <= j and j <= i forces i == j.
        for i in 0..n {
            for j in up[i].iter() {
                if j != i && up[j].contains(i) {
                    return Err(PosetError::Cycle);
                }
            }
        }
        let covers = transitive_reduction(&up);
        Ok(Poset {
            elements: names,
            up,
            covers,
        })
    }

    /// Chain 1 < 2 < ... < n with elements named "1".."n".
    pub fn chain(n: usize) -> Poset {
        let names: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
        let rels: Vec<(usize, usize)> = (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect();
        Poset::from_index_relations(names, &rels).expect("chain is a poset")
    }

    /// Antichain on n elements named "1".."n".
    pub fn antichain(n: usize) -> Poset {
        let names: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
        Poset::from_index_relations(names, &[]).expect("antichain is a poset")
    }

    /// The diamond 0 < a, b < 1.
    pub fn diamond() -> Poset {
        Poset::build(
            &["0", "a", "b", "1"],
            &[("0", "a"), ("0", "b"), ("a", "1"), ("b", "1")],
        )
        .expect("diamond is a poset")
    }

    /// The bowtie a < b, c < d, a < d, c < b.
    pub fn bowtie() -> Poset {
        Poset::build(
            &["a", "b", "c", "d"],
            &[("a", "b"), ("c", "d"), ("a", "d"), ("c", "b")],
        )
        .expect("bowtie is a poset")
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn element_names(&self) -> &[String] {
        &self.elements
    }

    pub fn element_name(&self, i: usize) -> &str {
        &self.elements[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.elements.iter().position(|e| e == name)
    }

    /// i <= j in the partial order.
    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.up[i].contains(j)
    }

    /// i < j strictly.
    pub fn lt(&self, i: usize, j: usize) -> bool {
        i != j && self.up[i].contains(j)
    }

    /// Covering pairs (i, j) with i covered by j, in sorted order.
    pub fn covers(&self) -> &[(usize, usize)] {
        &self.covers
    }

    /// The up-set {j : i <= j} of element i.
    pub fn up_set(&self, i: usize) -> ElemSet {
        self.up[i]
    }

    pub fn full_set(&self) -> ElemSet {
        ElemSet::full(self.len())
    }

    /// Unique minimum element, if the poset has one.
    pub fn minimum(&self) -> Option<usize> {
        (0..self.len()).find(|&m| self.up[m] == self.full_set())
    }

    /// Unique maximum element, if the poset has one.
    pub fn maximum(&self) -> Option<usize> {
        (0..self.len()).find(|&m| (0..self.len()).all(|i| self.leq(i, m)))
    }

    /// Whether the poset is bounded: it has both a unique minimum and a
    /// unique maximum.
    pub fn is_bounded(&self) -> bool {
        self.minimum().is_some() && self.maximum().is_some()
    }

    /// Connectivity of the undirected Hasse graph. The whole poset is
    /// connected iff the full element set induces a connected subgraph.
    pub fn is_connected(&self) -> bool {
        !self.is_empty() && self.is_connected_subset(self.full_set())
    }

    /// Whether `s` induces a connected subgraph of the Hasse diagram.
    /// The empty set is not connected; singletons are.
    pub fn is_connected_subset(&self, s: ElemSet) -> bool {
        let Some(start) = s.min() else {
            return false;
        };
        let mut seen = ElemSet::singleton(start);
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for &(a, b) in &self.covers {
                let w = if a == v {
                    b
                } else if b == v {
                    a
                } else {
                    continue;
                };
                if s.contains(w) && !seen.contains(w) {
                    seen.insert(w);
                    stack.push(w);
                }
            }
        }
        seen == s
    }

    /// Order-convexity: whenever a, c in s and a <= b <= c, then b in s.
    pub fn is_convex(&self, s: ElemSet) -> bool {
        self.convex_hull(s) == s
    }

    /// {b : exists a, c in s with a <= b <= c}. Contains s, idempotent.
    pub fn convex_hull(&self, s: ElemSet) -> ElemSet {
        let mut hull = s;
        for b in 0..self.len() {
            if hull.contains(b) {
                continue;
            }
            let above = s.iter().any(|a| self.leq(a, b));
            if above && s.iter().any(|c| self.leq(b, c)) {
                hull.insert(b);
            }
        }
        hull
    }

    /// A tube: connected, convex, and of size at least 2.
    pub fn is_tube(&self, s: ElemSet) -> bool {
        s.len() >= 2 && self.is_connected_subset(s) && self.is_convex(s)
    }

    /// A proper tube additionally omits at least one element.
    pub fn is_proper_tube(&self, s: ElemSet) -> bool {
        self.is_tube(s) && s.len() < self.len()
    }

    /// Contract the tube `tau` to a single new element. The quotient order is
    /// reachability through the contracted class; the result has
    /// `|P| - |tau| + 1` elements. The merged element is named by joining the
    /// member names with `+` (primed until unique).
    pub fn contract(&self, tau: ElemSet) -> Result<Poset, PosetError> {
        if !self.is_tube(tau) {
            return Err(PosetError::NotATube);
        }
        let keep: Vec<usize> = (0..self.len()).filter(|&i| !tau.contains(i)).collect();
        let mut names: Vec<String> = keep.iter().map(|&i| self.elements[i].clone()).collect();
        let mut merged: String = tau
            .iter()
            .map(|i| self.elements[i].as_str())
            .collect::<Vec<_>>()
            .join("+");
        while names.contains(&merged) {
            merged.push('\'');
        }
        names.push(merged);
        let star = keep.len();
        let old_to_new = |i: usize| -> usize {
            if tau.contains(i) {
                star
            } else {
                keep.iter().position(|&k| k == i).unwrap()
            }
        };
        // x <= y in the quotient iff x <= y in P, or x reaches tau and tau
        // reaches y.
        let reaches_tau = |x: usize| tau.iter().any(|t| self.leq(x, t));
        let tau_reaches = |y: usize| tau.iter().any(|t| self.leq(t, y));
        let mut rels = Vec::new();
        for &x in &keep {
            for &y in &keep {
                if x != y && (self.lt(x, y) || (reaches_tau(x) && tau_reaches(y))) {
                    rels.push((old_to_new(x), old_to_new(y)));
                }
            }
            if reaches_tau(x) {
                rels.push((old_to_new(x), star));
            }
            if tau_reaches(x) {
                rels.push((star, old_to_new(x)));
            }
        }
        // A convex connected tube cannot create a cycle in the quotient; keep
        // the constructor's check as an internal assertion.
        let quotient = Poset::from_index_relations(names, &rels);
        debug_assert!(quotient.is_ok(), "tube contraction produced a cycle");
        quotient
    }

    /// DOT rendering of the Hasse diagram, edges pointing upward.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph hasse {\n  rankdir=BT;\n");
        for (i, name) in self.elements.iter().enumerate() {
            out.push_str(&format!("  n{i} [label=\"{name}\"];\n"));
        }
        for &(a, b) in &self.covers {
            out.push_str(&format!("  n{a} -> n{b};\n"));
        }
        out.push_str("}\n");
        out
    }

    /// Render a subset as sorted element names, e.g. `{a,b}`.
    pub fn set_string(&self, s: ElemSet) -> String {
        let names: Vec<&str> = s.iter().map(|i| self.elements[i].as_str()).collect();
        format!("{{{}}}", names.join(","))
    }
}

/// Covering pairs of a closure matrix: i < j with nothing strictly between.
fn transitive_reduction(up: &[ElemSet]) -> Vec<(usize, usize)> {
    let n = up.len();
    let mut covers = Vec::new();
    for i in 0..n {
        for j in up[i].iter() {
            if i == j {
                continue;
            }
            let between =
                (0..n).any(|k| k != i && k != j && up[i].contains(k) && up[k].contains(j));
            if !between {
                covers.push((i, j));
            }
        }
    }
    covers.sort_unstable();
    covers
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singleton_poset() {
        let p = Poset::build(&["a"], &[]).unwrap();
        assert_eq!(p.len(), 1);
        assert!(p.covers().is_empty());
        assert!(p.is_connected());
    }

    #[test]
    fn chain_closure_and_reduction() {
        let p = Poset::build(&["1", "2", "3", "4"], &[("1", "2"), ("2", "3"), ("3", "4")]).unwrap();
        assert_eq!(p.covers(), &[(0, 1), (1, 2), (2, 3)]);
        assert!(p.leq(0, 3));
        assert!(!p.leq(3, 0));
        // Redundant generators do not change the reduction.
        let q = Poset::build(
            &["1", "2", "3", "4"],
            &[("1", "2"), ("2", "3"), ("3", "4"), ("1", "4"), ("1", "3")],
        )
        .unwrap();
        assert_eq!(q.covers(), p.covers());
    }

    #[test]
    fn cycle_rejected() {
        let err = Poset::build(&["a", "b"], &[("a", "b"), ("b", "a")]).unwrap_err();
        assert_eq!(err, PosetError::Cycle);
        let err =
            Poset::build(&["a", "b", "c"], &[("a", "b"), ("b", "c"), ("c", "a")]).unwrap_err();
        assert_eq!(err, PosetError::Cycle);
    }

    #[test]
    fn duplicate_and_unknown_rejected() {
        assert!(matches!(
            Poset::build(&["a", "a"], &[]),
            Err(PosetError::DuplicateElement(_))
        ));
        assert!(matches!(
            Poset::build(&["a"], &[("a", "z")]),
            Err(PosetError::UnknownElement(_))
        ));
    }

    #[test]
    fn connectivity() {
        assert!(Poset::chain(3).is_connected());
        assert!(!Poset::antichain(2).is_connected());
        assert!(Poset::bowtie().is_connected());
        // Empty subset is not connected.
        assert!(!Poset::chain(3).is_connected_subset(ElemSet::EMPTY));
    }

    #[test]
    fn convexity_and_hull() {
        let c3 = Poset::chain(3);
        let s13: ElemSet = [0, 2].into_iter().collect();
        let s12: ElemSet = [0, 1].into_iter().collect();
        assert!(!c3.is_convex(s13));
        assert!(c3.is_convex(s12));
        let d = Poset::diamond();
        let ab: ElemSet = [1, 2].into_iter().collect();
        assert!(d.is_convex(ab));
        let c4 = Poset::chain(4);
        let s14: ElemSet = [0, 3].into_iter().collect();
        assert_eq!(c4.convex_hull(s14), ElemSet::full(4));
        // Hull of the endpoints of the diamond is everything.
        let ends: ElemSet = [0, 3].into_iter().collect();
        assert_eq!(d.convex_hull(ends), ElemSet::full(4));
        // Idempotence.
        assert_eq!(c4.convex_hull(c4.convex_hull(s14)), c4.convex_hull(s14));
    }

    #[test]
    fn tubes() {
        let c3 = Poset::chain(3);
        let s23: ElemSet = [1, 2].into_iter().collect();
        assert!(c3.is_tube(s23));
        assert!(c3.is_proper_tube(s23));
        assert!(c3.is_tube(ElemSet::full(3)));
        assert!(!c3.is_proper_tube(ElemSet::full(3)));
        let c4 = Poset::chain(4);
        let s13: ElemSet = [0, 2].into_iter().collect();
        assert!(!c4.is_tube(s13));
    }

    #[test]
    fn contract_chain_prefix() {
        let c3 = Poset::chain(3);
        let tau: ElemSet = [0, 1].into_iter().collect();
        let q = c3.contract(tau).unwrap();
        assert_eq!(q.len(), 2);
        assert_eq!(q.covers().len(), 1);
        let star = q.index_of("1+2").unwrap();
        let three = q.index_of("3").unwrap();
        assert!(q.lt(star, three));
    }

    #[test]
    fn contract_whole_poset() {
        let c3 = Poset::chain(3);
        let q = c3.contract(ElemSet::full(3)).unwrap();
        assert_eq!(q.len(), 1);
    }

    #[test]
    fn contract_diamond_upper_edge() {
        // Contracting {a, 1} in the diamond must keep 0 < b < * with 0 < *.
        let d = Poset::diamond();
        let tau: ElemSet = [d.index_of("a").unwrap(), d.index_of("1").unwrap()]
            .into_iter()
            .collect();
        let q = d.contract(tau).unwrap();
        assert_eq!(q.len(), 3);
        let zero = q.index_of("0").unwrap();
        let b = q.index_of("b").unwrap();
        let star = q.index_of("a+1").unwrap();
        assert!(q.lt(zero, b));
        assert!(q.lt(zero, star));
        assert!(q.lt(b, star));
        // It is the 3-chain: two covers only.
        assert_eq!(q.covers().len(), 2);
    }

    #[test]
    fn contract_rejects_non_tube() {
        let c4 = Poset::chain(4);
        let s13: ElemSet = [0, 2].into_iter().collect();
        assert_eq!(c4.contract(s13).unwrap_err(), PosetError::NotATube);
    }

    #[test]
    fn reduction_closure_roundtrip() {
        // Rebuilding from the covers alone recovers the same closure.
        for p in [Poset::chain(5), Poset::diamond(), Poset::bowtie()] {
            let q = Poset::from_index_relations(p.element_names().to_vec(), p.covers()).unwrap();
            assert_eq!(p, q);
        }
    }

    mod prop {
        use super::*;
        use proptest::prelude::*;

        /// Random posets up to 9 elements: relations only point upward in
        /// index order, so every sample is acyclic.
        fn arb_poset() -> impl Strategy<Value = Poset> {
            (2usize..=9)
                .prop_flat_map(|n| {
                    let pairs: Vec<(usize, usize)> = (0..n)
                        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                        .collect();
                    let len = pairs.len();
                    (Just((n, pairs)), proptest::bits::u64::between(0, len))
                })
                .prop_map(|((n, pairs), mask)| {
                    let rel: Vec<(usize, usize)> = pairs
                        .iter()
                        .enumerate()
                        .filter(|(k, _)| mask >> k & 1 == 1)
                        .map(|(_, &pr)| pr)
                        .collect();
                    let names: Vec<String> = (0..n).map(|i| i.to_string()).collect();
                    Poset::from_index_relations(names, &rel).expect("upward relations are acyclic")
                })
        }

        proptest! {
            #[test]
            fn closure_is_a_partial_order(p in arb_poset()) {
                let n = p.len();
                for i in 0..n {
                    prop_assert!(p.leq(i, i));
                    for j in 0..n {
                        prop_assert!(!(i != j && p.leq(i, j) && p.leq(j, i)));
                        for k in 0..n {
                            prop_assert!(!(p.leq(i, j) && p.leq(j, k)) || p.leq(i, k));
                        }
                    }
                }
            }

            #[test]
            fn covers_regenerate_the_order(p in arb_poset()) {
                let q = Poset::from_index_relations(p.element_names().to_vec(), p.covers())
                    .unwrap();
                prop_assert_eq!(p, q);
            }

            #[test]
            fn hull_laws(p in arb_poset(), bits in any::<u64>()) {
                let s = ElemSet::full(p.len()).intersection(ElemSet(bits));
                let hull = p.convex_hull(s);
                prop_assert!(s.is_subset(hull));
                prop_assert_eq!(p.convex_hull(hull), hull);
                prop_assert!(p.is_convex(hull));
                // Monotone in the subset order.
                let t = hull.union(ElemSet::full(p.len()).intersection(ElemSet(bits >> 7)));
                prop_assert!(hull.is_subset(p.convex_hull(t)));
            }

            #[test]
            fn contraction_counts(p in arb_poset()) {
                for tau in ElemSet::all_subsets(p.len()).filter(|&s| p.is_tube(s)) {
                    let q = p.contract(tau).unwrap();
                    prop_assert_eq!(q.len(), p.len() - tau.len() + 1);
                    if p.is_connected() {
                        prop_assert!(q.is_connected());
                    }
                }
            }
        }
    }
}
