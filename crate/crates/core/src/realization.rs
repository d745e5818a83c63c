//! Half-space realizations of the poset associahedron, the order polytope,
//! and the epsilon realization of bounded posets, together with exact vertex
//! solving and f/h-vector computation.
//!
//! For a connected poset on n elements the associahedron is cut out inside
//! the sum-zero hyperplane by one half-space per proper tube tau:
//! `alpha_tau(p) >= n^(2|tau|)`, where `alpha_tau` sums `p_j - p_i` over the
//! covering relations inside tau, and the whole poset contributes the
//! equality `alpha_P(p) = n^(2n)`. Thresholds grow like `n^(2n)`, so all
//! arithmetic is arbitrary-precision rational.

use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::linalg::{solve_fraction_free, Solution};
use crate::poset::{ElemSet, Poset};
use crate::system::{int_pow, HalfSpaceSystem, Label, LinearFunctional, Point, Rat};
use crate::tubing::{enumerate_proper_tubes, TubingEngine, TubingError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RealizeError {
    #[error("poset is not connected")]
    NotConnected,
    #[error("poset needs at least 2 elements")]
    TooSmall,
    #[error("poset is not bounded (needs a unique minimum and maximum)")]
    Boundedness,
    #[error("epsilon out of range: need 0 < epsilon < 1/n^2")]
    EpsilonRange,
    #[error("vertex system is singular: library bug")]
    SingularSystem,
    #[error("direction is not generic: equal values on an edge")]
    NotGeneric,
}

impl From<TubingError> for RealizeError {
    fn from(e: TubingError) -> Self {
        match e {
            TubingError::NotConnected => RealizeError::NotConnected,
            TubingError::TooSmall => RealizeError::TooSmall,
            _ => unreachable!("unexpected tubing error in realization"),
        }
    }
}

/// Which linear form plays the role of the tube functional.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Default)]
pub enum AlphaVariant {
    /// Sum of `p_j - p_i` over covering relations inside the tube.
    #[default]
    Covers,
    /// Sum over all strictly related pairs inside the tube.
    AllPairs,
    /// Sum over related (minimum, maximum) pairs of the restriction.
    MinMax,
}

impl AlphaVariant {
    pub fn parse(s: &str) -> Option<AlphaVariant> {
        match s {
            "covers" => Some(AlphaVariant::Covers),
            "all-pairs" | "all_pairs" => Some(AlphaVariant::AllPairs),
            "minmax" => Some(AlphaVariant::MinMax),
            _ => None,
        }
    }
}

/// The tube functional of the subset `s`.
pub fn alpha(p: &Poset, s: ElemSet, variant: AlphaVariant) -> LinearFunctional {
    let mut f = LinearFunctional::zero(p.len());
    let mut add_pair = |i: usize, j: usize| {
        f.coeffs[i] -= Rat::one();
        f.coeffs[j] += Rat::one();
    };
    match variant {
        AlphaVariant::Covers => {
            for &(i, j) in p.covers() {
                if s.contains(i) && s.contains(j) {
                    add_pair(i, j);
                }
            }
        }
        AlphaVariant::AllPairs => {
            for i in s.iter() {
                for j in s.iter() {
                    if p.lt(i, j) {
                        add_pair(i, j);
                    }
                }
            }
        }
        AlphaVariant::MinMax => {
            let minima: Vec<usize> = s
                .iter()
                .filter(|&i| !s.iter().any(|y| p.lt(y, i)))
                .collect();
            let maxima: Vec<usize> = s
                .iter()
                .filter(|&j| !s.iter().any(|y| p.lt(j, y)))
                .collect();
            for &i in &minima {
                for &j in &maxima {
                    if p.lt(i, j) {
                        add_pair(i, j);
                    }
                }
            }
        }
    }
    f
}

/// The facet threshold `n^(2*size)`.
pub fn threshold(n: usize, size: usize) -> Rat {
    int_pow(n, 2 * size)
}

/// The associahedron of a connected poset with the default tube functional.
pub fn build_associahedron(p: &Poset) -> Result<HalfSpaceSystem, RealizeError> {
    build_associahedron_with(p, AlphaVariant::Covers)
}

/// Same construction with an alternative tube functional; the thresholds are
/// unchanged.
pub fn build_associahedron_with(
    p: &Poset,
    variant: AlphaVariant,
) -> Result<HalfSpaceSystem, RealizeError> {
    if p.len() < 2 {
        return Err(RealizeError::TooSmall);
    }
    if !p.is_connected() {
        return Err(RealizeError::NotConnected);
    }
    let n = p.len();
    let mut sys = HalfSpaceSystem::new(p.element_names().to_vec());
    sys.push_equality(sum_functional(n), Rat::zero());
    sys.push_equality(alpha(p, p.full_set(), variant), threshold(n, n));
    for tube in enumerate_proper_tubes(p) {
        sys.push_inequality(
            Label::Tube(tube.to_vec()),
            alpha(p, tube, variant),
            threshold(n, tube.len()),
        )
        .expect("tube labels are unique");
    }
    Ok(sys)
}

fn sum_functional(n: usize) -> LinearFunctional {
    LinearFunctional {
        coeffs: vec![Rat::one(); n],
        constant: Rat::zero(),
    }
}

fn unit_functional(n: usize, i: usize) -> LinearFunctional {
    let mut f = LinearFunctional::zero(n);
    f.coeffs[i] = Rat::one();
    f
}

/// The vertex of a maximal tubing: unique solution of the sum-zero equality
/// together with `alpha_tau = n^(2|tau|)` for every tube of the tubing and
/// for the whole poset.
pub fn vertex_of_tubing(p: &Poset, tubing: &[ElemSet]) -> Result<Point, RealizeError> {
    vertex_of_tubing_with(p, tubing, AlphaVariant::Covers)
}

pub fn vertex_of_tubing_with(
    p: &Poset,
    tubing: &[ElemSet],
    variant: AlphaVariant,
) -> Result<Point, RealizeError> {
    let n = p.len();
    assert_eq!(
        tubing.len() + 2,
        n,
        "vertex system must be square: tubing of a maximal size expected"
    );
    let mut rows = Vec::with_capacity(n);
    let mut rhs = Vec::with_capacity(n);
    rows.push(sum_functional(n).coeffs);
    rhs.push(Rat::zero());
    for tau in tubing.iter().copied().chain([p.full_set()]) {
        let f = alpha(p, tau, variant);
        rows.push(f.coeffs);
        rhs.push(threshold(n, tau.len()) - f.constant);
    }
    match solve_fraction_free(&rows, &rhs) {
        Solution::Unique(x) => Ok(Point(x)),
        _ => Err(RealizeError::SingularSystem),
    }
}

/// Strictly inside the half-space of `tau`: `alpha_tau(p) > n^(2|tau|)`.
pub fn strictly_interior(p: &Poset, point: &Point, tau: ElemSet) -> bool {
    alpha(p, tau, AlphaVariant::Covers).evaluate(point) > threshold(p.len(), tau.len())
}

/// The order polytope: the order cone (one inequality per cover) sliced by
/// the sum-zero gauge and `alpha_P = c`.
pub fn order_polytope(p: &Poset, c: &Rat) -> Result<HalfSpaceSystem, RealizeError> {
    if !p.is_connected() {
        return Err(RealizeError::NotConnected);
    }
    let n = p.len();
    let mut sys = HalfSpaceSystem::new(p.element_names().to_vec());
    sys.push_equality(sum_functional(n), Rat::zero());
    sys.push_equality(alpha(p, p.full_set(), AlphaVariant::Covers), c.clone());
    push_order_cone(p, &mut sys);
    Ok(sys)
}

/// Stanley's normalization of the order polytope of a bounded poset:
/// `p_min = 0`, `p_max = 1`, plus the order cone.
pub fn stanley_normalized(p: &Poset) -> Result<HalfSpaceSystem, RealizeError> {
    if !p.is_connected() {
        return Err(RealizeError::NotConnected);
    }
    let (lo, hi) = bounded_extremes(p)?;
    let n = p.len();
    let mut sys = HalfSpaceSystem::new(p.element_names().to_vec());
    sys.push_equality(unit_functional(n, lo), Rat::zero());
    sys.push_equality(unit_functional(n, hi), Rat::one());
    push_order_cone(p, &mut sys);
    Ok(sys)
}

fn bounded_extremes(p: &Poset) -> Result<(usize, usize), RealizeError> {
    match (p.minimum(), p.maximum()) {
        (Some(lo), Some(hi)) => Ok((lo, hi)),
        _ => Err(RealizeError::Boundedness),
    }
}

fn push_order_cone(p: &Poset, sys: &mut HalfSpaceSystem) {
    let n = p.len();
    for &(i, j) in p.covers() {
        let mut f = LinearFunctional::zero(n);
        f.coeffs[i] = -Rat::one();
        f.coeffs[j] = Rat::one();
        sys.push_inequality(Label::Cover(i, j), f, Rat::zero())
            .expect("cover labels are unique");
    }
}

/// The epsilon realization of the associahedron of a bounded poset in
/// Stanley coordinates: `p_min = 0`, `p_max = 1`, the order cone, and one
/// cut `alpha_tau(p) >= eps^(n-|tau|)` per proper tube. Letting eps go to 0
/// recovers the order polytope.
///
/// `eps < 1/n^2` is small enough for every bounded poset; individual posets
/// tolerate larger cuts (the diamond stays an associahedron up to 1/3), so
/// only `0 < eps < 1` is enforced here and the verification suite audits
/// the face lattice instance by instance.
pub fn epsilon_realization(p: &Poset, eps: &Rat) -> Result<HalfSpaceSystem, RealizeError> {
    if !p.is_connected() {
        return Err(RealizeError::NotConnected);
    }
    let (lo, hi) = bounded_extremes(p)?;
    let n = p.len();
    if !eps.is_positive() || *eps >= Rat::one() {
        return Err(RealizeError::EpsilonRange);
    }
    let mut sys = HalfSpaceSystem::new(p.element_names().to_vec());
    sys.push_equality(unit_functional(n, lo), Rat::zero());
    sys.push_equality(unit_functional(n, hi), Rat::one());
    push_order_cone(p, &mut sys);
    for tube in enumerate_proper_tubes(p) {
        sys.push_inequality(
            Label::Tube(tube.to_vec()),
            alpha(p, tube, AlphaVariant::Covers),
            rat_pow(eps, n - tube.len()),
        )
        .expect("tube labels are unique");
    }
    Ok(sys)
}

fn rat_pow(x: &Rat, e: usize) -> Rat {
    let mut acc = Rat::one();
    for _ in 0..e {
        acc *= x;
    }
    acc
}

/// The f- and h-vector of the associahedron, as exact integer sequences
/// tied by `sum f_i t^i = sum h_i (t+1)^i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FHVector {
    pub f: Vec<u64>,
    pub h: Vec<u64>,
}

impl FHVector {
    /// Exact polynomial change of basis from f to h.
    fn from_f(f: Vec<u64>) -> FHVector {
        let d = f.len() - 1;
        let mut h = Vec::with_capacity(f.len());
        for i in 0..=d {
            let mut acc: i128 = 0;
            for (j, &fj) in f.iter().enumerate().skip(i) {
                let term = binomial(j, i) * fj as i128;
                if (j - i) % 2 == 0 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            assert!(acc >= 0, "negative h-entry: library bug");
            h.push(acc as u64);
        }
        let fh = FHVector { f, h };
        debug_assert!(fh.identity_holds());
        fh
    }

    /// Check `sum f_i t^i = sum h_i (t+1)^i` coefficient by coefficient.
    pub fn identity_holds(&self) -> bool {
        (0..self.f.len()).all(|k| {
            let lhs = self.f[k] as i128;
            let rhs: i128 = self
                .h
                .iter()
                .enumerate()
                .skip(k)
                .map(|(i, &hi)| binomial(i, k) * hi as i128)
                .sum();
            lhs == rhs
        })
    }

    /// Dehn-Sommerville symmetry `h_i = h_(d-i)`.
    pub fn is_symmetric(&self) -> bool {
        let d = self.h.len() - 1;
        (0..=d).all(|i| self.h[i] == self.h[d - i])
    }
}

fn binomial(n: usize, k: usize) -> i128 {
    if k > n {
        return 0;
    }
    let mut acc: i128 = 1;
    for t in 0..k.min(n - k) {
        acc = acc * (n - t) as i128 / (t + 1) as i128;
    }
    acc
}

/// Count proper tubings by size: `f_(d-k)` is the number of tubings with
/// exactly k tubes, with d = |P| - 2 (the empty tubing is the whole
/// polytope).
pub fn f_vector(p: &Poset) -> Result<FHVector, RealizeError> {
    let eng = TubingEngine::new(p)?;
    let d = p.len() - 2;
    let mut counts = vec![0u64; d + 1];
    for t in eng.proper_tubings() {
        counts[t.len()] += 1;
    }
    let f: Vec<u64> = (0..=d).map(|i| counts[d - i]).collect();
    Ok(FHVector::from_f(f))
}

/// Orient the vertex graph by a generic direction and histogram the
/// outdegrees (edges pointing to a strictly larger value). For a generic
/// direction this histogram is the h-vector, and that equality is asserted.
pub fn h_vector_by_outdegree(
    p: &Poset,
    direction: &LinearFunctional,
) -> Result<Vec<u64>, RealizeError> {
    let eng = TubingEngine::new(p)?;
    let maximal = eng.maximal_tubings();
    let values: Vec<Rat> = maximal
        .iter()
        .map(|t| {
            let members = eng.members(t);
            vertex_of_tubing(p, &members).map(|v| direction.evaluate(&v))
        })
        .collect::<Result<_, _>>()?;
    let d = p.len() - 2;
    let mut outdeg = vec![0usize; maximal.len()];
    for i in 0..maximal.len() {
        for j in i + 1..maximal.len() {
            if eng
                .tubings_adjacent(&maximal[i], &maximal[j])
                .expect("maximal tubings")
            {
                if values[i] == values[j] {
                    return Err(RealizeError::NotGeneric);
                }
                if values[j] > values[i] {
                    outdeg[i] += 1;
                } else {
                    outdeg[j] += 1;
                }
            }
        }
    }
    let mut hist = vec![0u64; d + 1];
    for &k in &outdeg {
        hist[k] += 1;
    }
    let fh = f_vector(p)?;
    assert_eq!(hist, fh.h, "outdegree histogram must equal the h-vector");
    Ok(hist)
}

/// Search for a generic integer direction with a seeded deterministic
/// generator, retrying on genericity failures. Returns the direction used
/// and the outdegree histogram.
pub fn h_vector_by_outdegree_seeded(
    p: &Poset,
    seed: u64,
) -> Result<(LinearFunctional, Vec<u64>), RealizeError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut last = RealizeError::NotGeneric;
    for _ in 0..64 {
        let mut f = LinearFunctional::zero(p.len());
        for c in f.coeffs.iter_mut() {
            *c = Rat::from(num_bigint::BigInt::from(
                rng.gen_range(-1_000_000i64..=1_000_000),
            ));
        }
        match h_vector_by_outdegree(p, &f) {
            Ok(hist) => return Ok((f, hist)),
            Err(RealizeError::NotGeneric) => last = RealizeError::NotGeneric,
            Err(e) => return Err(e),
        }
    }
    Err(last)
}
