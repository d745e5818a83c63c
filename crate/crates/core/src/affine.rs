//! Affine posets and the affine poset cyclohedron.
//!
//! An affine poset of order n is an n-periodic, strongly connected order on
//! the integers with `i <= i + n`. All computation happens on a bounded
//! integer window: reachability, covering relations and tube enumeration are
//! window-confined, tube representatives are required to stay away from the
//! window boundary, and the window is doubled and everything recomputed if
//! one does not. Tubes are finite, have at most one element per residue
//! class, and are identified with their n-periodic orbit; the canonical
//! representative has its minimum in `0..n`.
//!
//! The cyclohedron lives in variables `x_0..x_(n-1)` with the gauge
//! `sum x_i = 0`; an occurrence of `x_j` outside the base residues is
//! rewritten through the extension rule `x_(j+n) = x_j + c` with
//! `c = n^(2(n+1))`, which gives each orbit inequality a constant term and
//! makes shifted tubes share one half-space.

use std::collections::BTreeSet;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::linalg::{solve_fraction_free, Solution};
use crate::realization::RealizeError;
use crate::system::{int_pow, HalfSpaceSystem, Label, LinearFunctional, Point, Rat};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AffineError {
    #[error("order must be at least 1")]
    OrderZero,
    #[error("generator ({0}, {1}) relates an element to itself")]
    SelfRelation(i64, i64),
    #[error("relation digraph has a directed cycle (antisymmetry violated)")]
    Cycle,
    #[error("affine poset is not strongly connected")]
    NotStronglyConnected,
    #[error("window doubling exhausted; generators span too far")]
    WindowExhausted,
    #[error("cyclohedron needs order at least 2")]
    TooSmall,
}

/// A finite tube of an affine poset: sorted integer members, canonically
/// shifted so the minimum lies in `0..n`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AffineTube {
    pub members: Vec<i64>,
}

impl AffineTube {
    pub fn new(mut members: Vec<i64>) -> Self {
        members.sort_unstable();
        members.dedup();
        AffineTube { members }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn shift(&self, delta: i64) -> AffineTube {
        AffineTube {
            members: self.members.iter().map(|z| z + delta).collect(),
        }
    }

    pub fn contains(&self, z: i64) -> bool {
        self.members.binary_search(&z).is_ok()
    }

    fn is_disjoint(&self, other: &AffineTube) -> bool {
        self.members.iter().all(|z| !other.contains(*z))
    }

    fn is_subset(&self, other: &AffineTube) -> bool {
        self.members.iter().all(|z| other.contains(*z))
    }

    fn nested_or_disjoint(&self, other: &AffineTube) -> bool {
        self.is_subset(other) || other.is_subset(self) || self.is_disjoint(other)
    }
}

/// An affine poset of order n, realized on a bounded window of integers.
#[derive(Debug)]
pub struct AffinePoset {
    n: usize,
    /// Normalized generators (i, j) with i in 0..n, meaning i < j expanded
    /// n-periodically; the implicit (i, i+n) are not stored.
    generators: Vec<(i64, i64)>,
    lo: i64,
    hi: i64,
    /// Flat reachability matrix over window indices; reflexive.
    reach: Vec<bool>,
    /// Covering pairs within the window.
    covers: Vec<(i64, i64)>,
    /// Canonical representatives of all proper tube orbits.
    orbits: Vec<AffineTube>,
}

impl AffinePoset {
    /// Validate and build. Adds the implicit relations `i < i + n`, computes
    /// window reachability, checks antisymmetry and strong connectivity, and
    /// enumerates the proper tube orbits (doubling the window if any tube
    /// comes near its boundary).
    pub fn build(n: usize, generators: &[(i64, i64)]) -> Result<AffinePoset, AffineError> {
        if n == 0 {
            return Err(AffineError::OrderZero);
        }
        let ni = n as i64;
        let mut gens = Vec::with_capacity(generators.len());
        for &(i, j) in generators {
            if i == j {
                return Err(AffineError::SelfRelation(i, j));
            }
            // Shift so the source residue lands in 0..n.
            let k = i.div_euclid(ni);
            gens.push((i - k * ni, j - k * ni));
        }
        gens.sort_unstable();
        gens.dedup();
        let max_span = gens
            .iter()
            .map(|&(i, j)| (j - i).abs())
            .chain([ni])
            .max()
            .unwrap();
        let mut width = ni * (1 + max_span);
        for _ in 0..8 {
            let poset = AffinePoset::build_on_window(n, &gens, width)?;
            let margin = max_span + ni;
            let clear = poset.orbits.iter().all(|t| {
                t.members[0] >= poset.lo + margin && *t.members.last().unwrap() <= poset.hi - margin
            });
            if clear {
                return Ok(poset);
            }
            width *= 2;
        }
        Err(AffineError::WindowExhausted)
    }

    fn build_on_window(
        n: usize,
        gens: &[(i64, i64)],
        width: i64,
    ) -> Result<AffinePoset, AffineError> {
        let ni = n as i64;
        let lo = -width;
        let hi = width + ni;
        let m = (hi - lo + 1) as usize;
        let idx = |z: i64| (z - lo) as usize;

        let mut reach = vec![false; m * m];
        for z in lo..=hi {
            reach[idx(z) * m + idx(z)] = true;
            if z + ni <= hi {
                reach[idx(z) * m + idx(z + ni)] = true;
            }
            for &(i, j) in gens {
                if z.rem_euclid(ni) == i {
                    let w = z + (j - i);
                    if w >= lo && w <= hi {
                        reach[idx(z) * m + idx(w)] = true;
                    }
                }
            }
        }
        // Warshall closure.
        for k in 0..m {
            for a in 0..m {
                if reach[a * m + k] {
                    for b in 0..m {
                        if reach[k * m + b] {
                            reach[a * m + b] = true;
                        }
                    }
                }
            }
        }
        // Antisymmetry on the window.
        for a in 0..m {
            for b in a + 1..m {
                if reach[a * m + b] && reach[b * m + a] {
                    return Err(AffineError::Cycle);
                }
            }
        }
        // Strong connectivity on residues: every r reaches some copy of s.
        for r in 0..ni {
            for s in 0..ni {
                let ok = (lo..=hi)
                    .filter(|z| z.rem_euclid(ni) == s)
                    .any(|z| reach[idx(r) * m + idx(z)]);
                if !ok {
                    return Err(AffineError::NotStronglyConnected);
                }
            }
        }
        // Covers: a < b with nothing in the window strictly between.
        let mut covers = Vec::new();
        for a in lo..=hi {
            for b in lo..=hi {
                if a == b || !reach[idx(a) * m + idx(b)] {
                    continue;
                }
                let between = (lo..=hi).any(|c| {
                    c != a && c != b && reach[idx(a) * m + idx(c)] && reach[idx(c) * m + idx(b)]
                });
                if !between {
                    covers.push((a, b));
                }
            }
        }
        covers.sort_unstable();
        let mut poset = AffinePoset {
            n,
            generators: gens.to_vec(),
            lo,
            hi,
            reach,
            covers,
            orbits: Vec::new(),
        };
        poset.orbits = poset.enumerate_orbits();
        Ok(poset)
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[(i64, i64)] {
        &self.generators
    }

    pub fn window(&self) -> (i64, i64) {
        (self.lo, self.hi)
    }

    fn in_window(&self, z: i64) -> bool {
        z >= self.lo && z <= self.hi
    }

    fn ridx(&self, z: i64) -> usize {
        debug_assert!(self.in_window(z));
        (z - self.lo) as usize
    }

    /// a <= b, decided on the window.
    pub fn leq(&self, a: i64, b: i64) -> bool {
        let m = (self.hi - self.lo + 1) as usize;
        self.reach[self.ridx(a) * m + self.ridx(b)]
    }

    pub fn lt(&self, a: i64, b: i64) -> bool {
        a != b && self.leq(a, b)
    }

    /// Covering pairs within the window.
    pub fn covers(&self) -> &[(i64, i64)] {
        &self.covers
    }

    /// Canonical representatives of all proper tube orbits, sorted by size
    /// then members. Every finite tube is proper.
    pub fn tube_orbits(&self) -> &[AffineTube] {
        &self.orbits
    }

    fn enumerate_orbits(&self) -> Vec<AffineTube> {
        let ni = self.n as i64;
        let mut found: BTreeSet<Vec<i64>> = BTreeSet::new();
        for base in 0..ni {
            // Grow connected subsets of the undirected cover graph whose
            // minimum is `base`; one element per residue class.
            let mut queue: Vec<Vec<i64>> = vec![vec![base]];
            let mut seen: BTreeSet<Vec<i64>> = BTreeSet::new();
            while let Some(s) = queue.pop() {
                if s.len() >= 2 && self.is_window_convex(&s) {
                    found.insert(s.clone());
                }
                if s.len() == self.n {
                    continue;
                }
                for &(a, b) in &self.covers {
                    for (x, w) in [(a, b), (b, a)] {
                        if !s.contains(&x) || w <= base || s.contains(&w) {
                            continue;
                        }
                        if s.iter().any(|z| z.rem_euclid(ni) == w.rem_euclid(ni)) {
                            continue;
                        }
                        let mut t = s.clone();
                        t.push(w);
                        t.sort_unstable();
                        if seen.insert(t.clone()) {
                            queue.push(t);
                        }
                    }
                }
            }
        }
        let mut orbits: Vec<AffineTube> = found.into_iter().map(AffineTube::new).collect();
        orbits.sort_by_key(|t| (t.len(), t.members.clone()));
        orbits
    }

    fn is_window_convex(&self, members: &[i64]) -> bool {
        for &a in members {
            for &c in members {
                if a == c || !self.leq(a, c) {
                    continue;
                }
                for b in self.lo..=self.hi {
                    if !members.contains(&b) && self.lt(a, b) && self.lt(b, c) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// All shifts of `tube` whose members stay inside the window.
    fn window_copies(&self, tube: &AffineTube) -> Vec<AffineTube> {
        let ni = self.n as i64;
        let mut out = Vec::new();
        let mut k = 0;
        loop {
            let c = tube.shift(k * ni);
            if !self.in_window(*c.members.last().unwrap()) {
                break;
            }
            out.push(c);
            k += 1;
        }
        let mut k = -1;
        loop {
            let c = tube.shift(k * ni);
            if !self.in_window(c.members[0]) {
                break;
            }
            out.push(c);
            k -= 1;
        }
        out
    }

    /// Whether a set of orbit representatives is a proper tubing: every pair
    /// of periodic copies (including shifted copies of the same orbit) is
    /// nested or disjoint, and the precedence digraph over disjoint copies
    /// has no directed cycle within the window.
    pub fn is_proper_tubing(&self, orbits: &[AffineTube]) -> bool {
        let mut reps: Vec<&AffineTube> = orbits.iter().collect();
        reps.sort_unstable();
        reps.dedup();
        let mut copies: Vec<AffineTube> = Vec::new();
        for rep in reps {
            copies.extend(self.window_copies(rep));
        }
        for (k, a) in copies.iter().enumerate() {
            for b in &copies[k + 1..] {
                if a == b || !a.nested_or_disjoint(b) {
                    return false;
                }
            }
        }
        // Precedence edges between disjoint copies.
        let m = copies.len();
        let mut adj = vec![Vec::new(); m];
        for i in 0..m {
            for j in 0..m {
                if i != j
                    && copies[i].is_disjoint(&copies[j])
                    && self.tube_precedes(&copies[i], &copies[j])
                {
                    adj[i].push(j);
                }
            }
        }
        let mut color = vec![0u8; m];
        for start in 0..m {
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

    fn tube_precedes(&self, a: &AffineTube, b: &AffineTube) -> bool {
        a.members
            .iter()
            .any(|&x| b.members.iter().any(|&y| self.lt(x, y)))
    }

    /// All maximal proper tubings as orbit sets. Each must have exactly
    /// n - 1 orbits and contain a tube of size n; violations are library
    /// bugs.
    pub fn maximal_tubings(&self) -> Vec<Vec<AffineTube>> {
        let mut all: Vec<Vec<usize>> = vec![Vec::new()];
        let mut current: Vec<usize> = Vec::new();
        self.extend_tubings(&mut current, 0, &mut all);
        let mut maximal = Vec::new();
        for t in &all {
            let extendable = (0..self.orbits.len()).any(|cand| {
                if t.contains(&cand) {
                    return false;
                }
                let mut members: Vec<AffineTube> =
                    t.iter().map(|&i| self.orbits[i].clone()).collect();
                members.push(self.orbits[cand].clone());
                self.is_proper_tubing(&members)
            });
            if !extendable {
                assert_eq!(
                    t.len(),
                    self.n.saturating_sub(1),
                    "maximal affine tubing of unexpected size"
                );
                let members: Vec<AffineTube> = t.iter().map(|&i| self.orbits[i].clone()).collect();
                assert!(
                    self.n < 2 || members.iter().any(|tube| tube.len() == self.n),
                    "maximal affine tubing without a full-size tube"
                );
                maximal.push(members);
            }
        }
        maximal.sort();
        maximal
    }

    fn extend_tubings(&self, current: &mut Vec<usize>, from: usize, out: &mut Vec<Vec<usize>>) {
        for cand in from..self.orbits.len() {
            current.push(cand);
            let members: Vec<AffineTube> =
                current.iter().map(|&i| self.orbits[i].clone()).collect();
            if self.is_proper_tubing(&members) {
                out.push(current.clone());
                self.extend_tubings(current, cand + 1, out);
            }
            current.pop();
        }
    }

    /// The tube functional in base coordinates: covers inside the tube, with
    /// out-of-range variables rewritten through the extension rule, which
    /// contributes the constant term.
    pub fn affine_alpha(&self, tube: &AffineTube) -> LinearFunctional {
        let ni = self.n as i64;
        let c = period_constant(self.n);
        let mut f = LinearFunctional::zero(self.n);
        for &(a, b) in &self.covers {
            if tube.contains(a) && tube.contains(b) {
                let (qa, ra) = (a.div_euclid(ni), a.rem_euclid(ni) as usize);
                let (qb, rb) = (b.div_euclid(ni), b.rem_euclid(ni) as usize);
                f.coeffs[rb] += Rat::one();
                f.coeffs[ra] -= Rat::one();
                f.constant += Rat::from(num_bigint::BigInt::from(qb - qa)) * &c;
            }
        }
        f
    }

    /// The cyclohedron: gauge equality plus one inequality per tube orbit.
    pub fn build_cyclohedron(&self) -> Result<HalfSpaceSystem, AffineError> {
        if self.n < 2 {
            return Err(AffineError::TooSmall);
        }
        let mut sys = HalfSpaceSystem::new((0..self.n).map(|i| format!("x{i}")).collect());
        sys.push_equality(
            LinearFunctional {
                coeffs: vec![Rat::one(); self.n],
                constant: Rat::zero(),
            },
            Rat::zero(),
        );
        for orbit in &self.orbits {
            sys.push_inequality(
                Label::Orbit(orbit.members.clone()),
                self.affine_alpha(orbit),
                int_pow(self.n, 2 * orbit.len()),
            )
            .expect("orbit labels are unique");
        }
        Ok(sys)
    }

    /// Exact vertex of a maximal tubing: gauge plus one equality per orbit.
    pub fn vertex_of_tubing(&self, orbits: &[AffineTube]) -> Result<Point, RealizeError> {
        assert_eq!(orbits.len() + 1, self.n, "vertex system must be square");
        let mut rows = Vec::with_capacity(self.n);
        let mut rhs = Vec::with_capacity(self.n);
        rows.push(vec![Rat::one(); self.n]);
        rhs.push(Rat::zero());
        for orbit in orbits {
            let f = self.affine_alpha(orbit);
            rows.push(f.coeffs);
            rhs.push(int_pow(self.n, 2 * orbit.len()) - f.constant);
        }
        match solve_fraction_free(&rows, &rhs) {
            Solution::Unique(x) => Ok(Point(x)),
            _ => Err(RealizeError::SingularSystem),
        }
    }

    /// Value of `x_z` for any integer z, given base values summing to the
    /// gauge: extension rule `x_(z+n) = x_z + c`.
    pub fn extended_value(&self, base: &Point, z: i64) -> Rat {
        let ni = self.n as i64;
        let q = z.div_euclid(ni);
        let r = z.rem_euclid(ni) as usize;
        base.0[r].clone() + Rat::from(num_bigint::BigInt::from(q)) * period_constant(self.n)
    }
}

/// The period constant `c = n^(2(n+1))`.
pub fn period_constant(n: usize) -> Rat {
    int_pow(n, 2 * (n + 1))
}

/// The affine chain of order n: generators i < i+1.
pub fn affine_chain(n: usize) -> AffinePoset {
    let gens: Vec<(i64, i64)> = (0..n as i64).map(|i| (i, i + 1)).collect();
    AffinePoset::build(n, &gens).expect("affine chain is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::rat;

    fn tube(v: &[i64]) -> AffineTube {
        AffineTube::new(v.to_vec())
    }

    #[test]
    fn affine_chain_basics() {
        let p = affine_chain(2);
        assert!(p.leq(0, 1));
        assert!(p.leq(0, 7));
        assert!(!p.leq(1, 0));
        assert!(p.leq(-3, -1));
    }

    #[test]
    fn order_one_chain_forced() {
        let p = AffinePoset::build(1, &[]).unwrap();
        assert!(p.leq(0, 1));
        assert!(p.leq(-2, 3));
        assert!(p.tube_orbits().is_empty());
    }

    #[test]
    fn cycle_rejected() {
        assert_eq!(
            AffinePoset::build(2, &[(0, 1), (1, 0)]).unwrap_err(),
            AffineError::Cycle
        );
        assert_eq!(
            AffinePoset::build(2, &[(0, 0)]).unwrap_err(),
            AffineError::SelfRelation(0, 0)
        );
    }

    #[test]
    fn disconnected_rejected() {
        // Two parallel chains that never interact.
        assert_eq!(
            AffinePoset::build(2, &[(0, 2), (1, 3)]).unwrap_err(),
            AffineError::NotStronglyConnected
        );
    }

    #[test]
    fn orbit_lists_of_small_chains() {
        let p2 = affine_chain(2);
        let got: Vec<&AffineTube> = p2.tube_orbits().iter().collect();
        assert_eq!(got, vec![&tube(&[0, 1]), &tube(&[1, 2])]);
        let p3 = affine_chain(3);
        let got: Vec<&AffineTube> = p3.tube_orbits().iter().collect();
        assert_eq!(
            got,
            vec![
                &tube(&[0, 1]),
                &tube(&[1, 2]),
                &tube(&[2, 3]),
                &tube(&[0, 1, 2]),
                &tube(&[1, 2, 3]),
                &tube(&[2, 3, 4]),
            ]
        );
    }

    #[test]
    fn tubing_validity() {
        let p = affine_chain(2);
        assert!(p.is_proper_tubing(&[tube(&[0, 1])]));
        assert!(!p.is_proper_tubing(&[tube(&[0, 1]), tube(&[1, 2])]));
        let p3 = affine_chain(3);
        // Copies of {2,3} interleave with {0,1}: {-1,0} overlaps it.
        assert!(!p3.is_proper_tubing(&[tube(&[0, 1]), tube(&[2, 3])]));
        // Orbit of a size-3 tube nests around {0,1}.
        assert!(p3.is_proper_tubing(&[tube(&[0, 1]), tube(&[2, 3, 4])]));
    }

    #[test]
    fn maximal_tubing_counts() {
        assert_eq!(affine_chain(2).maximal_tubings().len(), 2);
        assert_eq!(affine_chain(3).maximal_tubings().len(), 6);
    }

    #[test]
    fn cyclohedron_of_order_two() {
        let p = affine_chain(2);
        assert_eq!(period_constant(2), rat(64));
        let sys = p.build_cyclohedron().unwrap();
        assert_eq!(sys.equalities.len(), 1);
        assert_eq!(sys.inequalities.len(), 2);
        // h_{1,2}: x0 + 64 - x1 >= 16.
        let (f, b) = sys.inequality(&Label::Orbit(vec![1, 2])).unwrap();
        assert_eq!(f.coeffs, vec![rat(1), rat(-1)]);
        assert_eq!(f.constant, rat(64));
        assert_eq!(*b, rat(16));
        let v = p.vertex_of_tubing(&[tube(&[0, 1])]).unwrap();
        assert_eq!(v, Point(vec![rat(-8), rat(8)]));
        let w = p.vertex_of_tubing(&[tube(&[1, 2])]).unwrap();
        assert_eq!(w, Point(vec![rat(-24), rat(24)]));
    }

    #[test]
    fn alpha_is_orbit_invariant() {
        for p in [affine_chain(2), affine_chain(3)] {
            let ni = p.order() as i64;
            for orbit in p.tube_orbits() {
                let f = p.affine_alpha(orbit);
                for k in -2i64..=2 {
                    let shifted = orbit.shift(k * ni);
                    if shifted.members[0] > p.window().0
                        && *shifted.members.last().unwrap() < p.window().1
                    {
                        assert_eq!(p.affine_alpha(&shifted), f, "orbit {orbit:?} shift {k}");
                    }
                }
            }
        }
    }

    #[test]
    fn extension_rule() {
        let p = affine_chain(2);
        let base = Point(vec![rat(-8), rat(8)]);
        assert_eq!(p.extended_value(&base, 0), rat(-8));
        assert_eq!(p.extended_value(&base, 2), rat(56));
        assert_eq!(p.extended_value(&base, -1), rat(-56));
    }

    #[test]
    fn nonchain_order_three_is_valid() {
        // Residues 0 and 1 feed 2; 2 feeds both shifted copies.
        let p = AffinePoset::build(3, &[(0, 2), (1, 2), (2, 3), (2, 4)]).unwrap();
        assert!(p.leq(0, 2));
        assert!(p.leq(2, 4));
        assert!(!p.leq(0, 1));
        assert!(!p.tube_orbits().is_empty());
        for t in p.maximal_tubings() {
            assert_eq!(t.len(), 2);
        }
    }
}
