//! Independent brute-force verification machinery.
//!
//! Vertices of a half-space system are enumerated by solving every square
//! subsystem of tight inequalities joined with the equalities and keeping
//! the feasible solutions; no pivoting, no reuse of the realization path
//! (this module deliberately solves with plain rational elimination).
//! On top of that sit the verification suites: vertex-set equality with the
//! tubing predictions, simplicity, facet audits, strict interiority,
//! infeasibility of incompatible families, and face-lattice agreement.

use std::collections::BTreeMap;

use num_traits::Zero;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::affine::{period_constant, AffineError, AffinePoset, AffineTube};
use crate::linalg::{affine_span_dim, nullspace, rank, solve_gauss, Solution};
use crate::poset::{ElemSet, Poset};
use crate::realization::{
    alpha, build_associahedron, threshold, vertex_of_tubing, AlphaVariant, RealizeError,
};
use crate::system::{int_pow, rat_string, HalfSpaceSystem, Label, Point, Rat};
use crate::tubing::{tube_precedes, TubingEngine};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("system is unbounded: recession direction detected")]
    Unbounded,
    #[error("label `{0}` does not name an inequality of the system")]
    UnknownLabel(String),
}

/// A vertex found by basis enumeration, with its incidence evidence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexCertificate {
    pub point: Point,
    /// Labels of all inequalities tight at the point, sorted.
    pub tight: Vec<Label>,
    /// The inequality subset whose equalities solved to this point first.
    pub basis: Vec<Label>,
}

/// Enumerate all vertices of a bounded system exactly: every d-subset of
/// inequalities is turned into equalities and solved, d being the ambient
/// dimension minus the equality rank; solutions violating any inequality are
/// discarded and coincident points deduplicated. A detected recession ray of
/// a nonempty system reports unboundedness.
pub fn brute_force_vertices(sys: &HalfSpaceSystem) -> Result<Vec<VertexCertificate>, OracleError> {
    let dim = sys.dim();
    let eq_rows: Vec<Vec<Rat>> = sys
        .equalities
        .iter()
        .map(|(f, _)| f.coeffs.clone())
        .collect();
    let eq_rhs: Vec<Rat> = sys
        .equalities
        .iter()
        .map(|(f, b)| b - &f.constant)
        .collect();
    let d = dim - rank(&eq_rows);

    let m = sys.inequalities.len();
    let mut found: BTreeMap<Point, VertexCertificate> = BTreeMap::new();
    for subset in k_subsets(m, d) {
        let mut rows = eq_rows.clone();
        let mut rhs = eq_rhs.clone();
        for &i in &subset {
            let (_, f, b) = &sys.inequalities[i];
            rows.push(f.coeffs.clone());
            rhs.push(b - &f.constant);
        }
        if let Solution::Unique(x) = solve_gauss(&rows, &rhs) {
            let point = Point(x);
            if sys.contains(&point) && !found.contains_key(&point) {
                let mut tight = sys.tight_at(&point);
                tight.sort();
                let basis: Vec<Label> = subset
                    .iter()
                    .map(|&i| sys.inequalities[i].0.clone())
                    .collect();
                found.insert(
                    point.clone(),
                    VertexCertificate {
                        point,
                        tight,
                        basis,
                    },
                );
            }
        }
    }
    let vertices: Vec<VertexCertificate> = found.into_values().collect();

    if !vertices.is_empty() && has_recession_ray(sys, d) {
        return Err(OracleError::Unbounded);
    }
    Ok(vertices)
}

/// Look for an extreme ray of the recession cone: a one-dimensional kernel
/// of the equalities plus d-1 tight inequalities whose direction satisfies
/// every inequality homogeneously, or a full line in the lineality space.
fn has_recession_ray(sys: &HalfSpaceSystem, d: usize) -> bool {
    let dim = sys.dim();
    let eq_rows: Vec<Vec<Rat>> = sys
        .equalities
        .iter()
        .map(|(f, _)| f.coeffs.clone())
        .collect();
    let mut all_rows = eq_rows.clone();
    for (_, f, _) in &sys.inequalities {
        all_rows.push(f.coeffs.clone());
    }
    if !nullspace(&all_rows, dim).is_empty() {
        return true;
    }
    if d == 0 {
        return false;
    }
    let homogeneous_ok = |y: &[Rat]| -> bool {
        sys.inequalities
            .iter()
            .all(|(_, f, _)| f.coeffs.iter().zip(y).map(|(a, b)| a * b).sum::<Rat>() >= Rat::zero())
    };
    for subset in k_subsets(sys.inequalities.len(), d - 1) {
        let mut rows = eq_rows.clone();
        for &i in &subset {
            rows.push(sys.inequalities[i].1.coeffs.clone());
        }
        let kernel = nullspace(&rows, dim);
        if kernel.len() != 1 {
            continue;
        }
        let y = &kernel[0];
        let neg: Vec<Rat> = y.iter().map(|v| -v).collect();
        if homogeneous_ok(y) || homogeneous_ok(&neg) {
            return true;
        }
    }
    false
}

/// Turn the named inequalities into equalities and test feasibility by
/// rerunning bounded vertex enumeration: for a bounded system the region is
/// nonempty exactly when some basis is feasible.
pub fn feasible_with_equalities(
    sys: &HalfSpaceSystem,
    extra: &[Label],
) -> Result<bool, OracleError> {
    let mut modified = sys.clone();
    for label in extra {
        let pos = modified
            .inequalities
            .iter()
            .position(|(l, _, _)| l == label)
            .ok_or_else(|| OracleError::UnknownLabel(sys.label_string(label)))?;
        let (_, f, b) = modified.inequalities.remove(pos);
        modified.push_equality(f, b);
    }
    Ok(!brute_force_vertices(&modified)?.is_empty())
}

/// All k-element subsets of 0..m in lexicographic order.
fn k_subsets(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(m: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            cur.push(i);
            rec(m, k, i + 1, cur, out);
            cur.pop();
        }
    }
    rec(m, k, 0, &mut cur, &mut out);
    out
}

/// One verification check with a reproducible witness on failure.
#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub instance: String,
    pub dimension: usize,
    pub vertex_count: usize,
    pub facet_count: usize,
    /// f-vector of the face lattice (finite instances only).
    pub f_vector: Option<Vec<u64>>,
    pub checks: Vec<CheckResult>,
}

impl VerificationReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn render_text(&self) -> String {
        let mut out = format!(
            "instance {}: dimension {}, {} vertices, {} facets\n",
            self.instance, self.dimension, self.vertex_count, self.facet_count
        );
        if let Some(f) = &self.f_vector {
            let parts: Vec<String> = f.iter().map(|x| x.to_string()).collect();
            out.push_str(&format!("  f-vector ({})\n", parts.join(", ")));
        }
        for c in &self.checks {
            let status = if c.pass { "PASS" } else { "FAIL" };
            out.push_str(&format!("  {status} {}", c.name));
            if !c.detail.is_empty() {
                out.push_str(&format!(" ({})", c.detail));
            }
            out.push('\n');
        }
        out
    }

    fn push(&mut self, name: &str, pass: bool, detail: String) {
        self.checks.push(CheckResult {
            name: name.to_string(),
            pass,
            detail,
        });
    }
}

/// Full oracle audit of the associahedron of a connected poset. Intended for
/// desk-scale instances (|P| <= 7). The seed drives the order-cone sampling
/// of the diameter-bounds check.
pub fn verify_poset_realization(
    p: &Poset,
    instance: &str,
    seed: u64,
    samples: usize,
) -> Result<VerificationReport, RealizeError> {
    let sys = build_associahedron(p)?;
    let eng = TubingEngine::new(p)?;
    let d = p.len() - 2;
    let maximal = eng.maximal_tubings();
    let predicted: Vec<(Vec<ElemSet>, Point)> = maximal
        .iter()
        .map(|t| {
            let members = eng.members(t);
            let v = vertex_of_tubing(p, &members).expect("vertex system nonsingular");
            (members, v)
        })
        .collect();

    let mut report = VerificationReport {
        instance: instance.to_string(),
        dimension: d,
        vertex_count: 0,
        facet_count: sys.inequalities.len(),
        f_vector: Some(crate::realization::f_vector(p).expect("connected poset").f),
        checks: Vec::new(),
    };

    let oracle = match brute_force_vertices(&sys) {
        Ok(v) => v,
        Err(e) => {
            report.push("bounded", false, e.to_string());
            return Ok(report);
        }
    };
    report.push("bounded", true, String::new());
    report.vertex_count = oracle.len();

    check_vertex_set_equality(
        &mut report,
        &oracle,
        predicted.iter().map(|(_, v)| v.clone()).collect(),
    );
    check_simplicity(&mut report, &oracle, d);
    check_facets(&mut report, &sys, &oracle, d);

    // Strict interiority: alpha_tau(v^T) > n^(2|tau|) for every tube not in
    // the tubing.
    let mut interior_fail = String::new();
    'outer: for (members, v) in &predicted {
        for tau in eng.tubes() {
            if members.contains(tau) {
                continue;
            }
            let value = alpha(p, *tau, AlphaVariant::Covers).evaluate(v);
            if value <= threshold(p.len(), tau.len()) {
                interior_fail = format!(
                    "tube {} at tubing vertex {:?}: alpha = {}",
                    p.set_string(*tau),
                    v,
                    rat_string(&value)
                );
                break 'outer;
            }
        }
    }
    report.push(
        "strict-interiority",
        interior_fail.is_empty(),
        interior_fail,
    );

    // Incompatible pairs and precedence cycles give empty faces.
    let mut incompat_fail = String::new();
    let tubes = eng.tubes();
    'pairs: for i in 0..tubes.len() {
        for j in i + 1..tubes.len() {
            if crate::tubing::tubes_compatible(tubes[i], tubes[j]) {
                continue;
            }
            let labels = [
                Label::Tube(tubes[i].to_vec()),
                Label::Tube(tubes[j].to_vec()),
            ];
            match feasible_with_equalities(&sys, &labels) {
                Ok(false) => {}
                Ok(true) => {
                    incompat_fail = format!(
                        "overlapping pair {} {} is feasible",
                        p.set_string(tubes[i]),
                        p.set_string(tubes[j])
                    );
                    break 'pairs;
                }
                Err(e) => {
                    incompat_fail = e.to_string();
                    break 'pairs;
                }
            }
        }
    }
    report.push(
        "incompatible-pairs",
        incompat_fail.is_empty(),
        incompat_fail,
    );

    let mut cycle_fail = String::new();
    for cycle in precedence_cycles(p, tubes, 4) {
        let labels: Vec<Label> = cycle.iter().map(|t| Label::Tube(t.to_vec())).collect();
        match feasible_with_equalities(&sys, &labels) {
            Ok(false) => {}
            Ok(true) => {
                let names: Vec<String> = cycle.iter().map(|t| p.set_string(*t)).collect();
                cycle_fail = format!("precedence cycle {} is feasible", names.join(" "));
                break;
            }
            Err(e) => {
                cycle_fail = e.to_string();
                break;
            }
        }
    }
    report.push("precedence-cycles", cycle_fail.is_empty(), cycle_fail);

    // Face lattice: tubings vs tight-set intersections.
    let mut lattice_fail = String::new();
    'faces: for t in eng.proper_tubings() {
        let members = eng.members(&t);
        let verts: Vec<&Point> = predicted
            .iter()
            .filter(|(m, _)| members.iter().all(|tau| m.contains(tau)))
            .map(|(_, v)| v)
            .collect();
        if verts.is_empty() {
            lattice_fail = format!("tubing {} has no vertex above it", eng.tubing_string(&t));
            break;
        }
        let mut common: Option<Vec<Label>> = None;
        for v in &verts {
            let mut tight = sys.tight_at(v);
            tight.sort();
            common = Some(match common {
                None => tight,
                Some(prev) => prev.into_iter().filter(|l| tight.contains(l)).collect(),
            });
        }
        let mut expect: Vec<Label> = members.iter().map(|s| Label::Tube(s.to_vec())).collect();
        expect.sort();
        if common.unwrap_or_default() != expect {
            lattice_fail = format!(
                "tight-set intersection of {} differs from its tubes",
                eng.tubing_string(&t)
            );
            break;
        }
        let coords: Vec<Vec<Rat>> = verts.iter().map(|v| v.0.clone()).collect();
        if affine_span_dim(&coords) != Some(d - t.len()) {
            lattice_fail = format!("face of {} has wrong dimension", eng.tubing_string(&t));
            break 'faces;
        }
    }
    report.push("face-lattice", lattice_fail.is_empty(), lattice_fail);

    // Geometric edges (d-1 shared facets) agree with combinatorial
    // adjacency of maximal tubings.
    let mut adj_fail = String::new();
    if d >= 1 {
        let tight_of = |v: &Point| -> Vec<Label> {
            let mut t = sys.tight_at(v);
            t.sort();
            t
        };
        'adj: for i in 0..predicted.len() {
            for j in i + 1..predicted.len() {
                let shared = tight_of(&predicted[i].1)
                    .iter()
                    .filter(|l| tight_of(&predicted[j].1).contains(l))
                    .count();
                let geometric = shared == d - 1;
                let combinatorial = eng
                    .tubings_adjacent(&maximal[i], &maximal[j])
                    .expect("maximal tubings");
                if geometric != combinatorial {
                    adj_fail = format!(
                        "adjacency mismatch between {} and {}",
                        eng.tubing_string(&maximal[i]),
                        eng.tubing_string(&maximal[j])
                    );
                    break 'adj;
                }
            }
        }
    }
    report.push("edge-graph", adj_fail.is_empty(), adj_fail);

    // Euler relation on three-dimensional instances.
    if d == 3 {
        let edges = count_edges(&oracle, d);
        let euler_ok = oracle.len() as i64 - edges as i64 + sys.inequalities.len() as i64 == 2;
        report.push(
            "euler",
            euler_ok,
            format!("{} - {} + {}", oracle.len(), edges, sys.inequalities.len()),
        );
    }

    let bounds = check_alpha_bounds(p, samples, seed);
    report.push(
        "diameter-bounds",
        bounds.is_none(),
        bounds.unwrap_or_default(),
    );

    Ok(report)
}

/// Sampled check of the functional-versus-diameter sandwich on the order
/// cone: `diam_tau(p) <= alpha_tau(p) <= (n^2/4) diam_tau(p)` for every tube
/// (the whole poset included). Returns a witness on failure.
pub fn check_alpha_bounds(p: &Poset, samples: usize, seed: u64) -> Option<String> {
    let n = p.len();
    let factor = Rat::new((n * n).into(), 4.into());
    let mut tubes: Vec<ElemSet> = ElemSet::all_subsets(n).filter(|&s| p.is_tube(s)).collect();
    tubes.sort_by_key(|s| (s.len(), s.to_vec()));
    for q in sample_order_cone(p, samples, seed) {
        for &tau in &tubes {
            let a = alpha(p, tau, AlphaVariant::Covers).evaluate(&q);
            let dia = diameter(&q, tau);
            if a < dia || a > &factor * &dia {
                return Some(format!(
                    "tube {} at {:?}: alpha = {}, diam = {}",
                    p.set_string(tau),
                    q,
                    rat_string(&a),
                    rat_string(&dia)
                ));
            }
        }
    }
    None
}

/// Full oracle audit of the cyclohedron of an affine poset (desk scale:
/// order <= 4).
pub fn verify_affine_realization(
    ap: &AffinePoset,
    instance: &str,
) -> Result<VerificationReport, AffineError> {
    let n = ap.order();
    let sys = ap.build_cyclohedron()?;
    let d = n - 1;
    let maximal = ap.maximal_tubings();
    let predicted: Vec<(Vec<AffineTube>, Point)> = maximal
        .iter()
        .map(|t| {
            let v = ap.vertex_of_tubing(t).expect("vertex system nonsingular");
            (t.clone(), v)
        })
        .collect();

    let mut report = VerificationReport {
        instance: instance.to_string(),
        dimension: d,
        vertex_count: 0,
        facet_count: sys.inequalities.len(),
        f_vector: None,
        checks: Vec::new(),
    };

    let oracle = match brute_force_vertices(&sys) {
        Ok(v) => v,
        Err(e) => {
            report.push("bounded", false, e.to_string());
            return Ok(report);
        }
    };
    report.push("bounded", true, String::new());
    report.vertex_count = oracle.len();

    check_vertex_set_equality(
        &mut report,
        &oracle,
        predicted.iter().map(|(_, v)| v.clone()).collect(),
    );
    check_simplicity(&mut report, &oracle, d);
    check_facets(&mut report, &sys, &oracle, d);

    let mut interior_fail = String::new();
    'outer: for (members, v) in &predicted {
        for tau in ap.tube_orbits() {
            if members.contains(tau) {
                continue;
            }
            let value = ap.affine_alpha(tau).evaluate(v);
            if value <= int_pow(n, 2 * tau.len()) {
                interior_fail = format!("orbit {:?} at vertex {:?}", tau.members, v);
                break 'outer;
            }
        }
    }
    report.push(
        "strict-interiority",
        interior_fail.is_empty(),
        interior_fail,
    );

    // Non-tubing orbit pairs (overlap or precedence cycle among copies) are
    // infeasible once both hyperplanes are imposed. The periodic obstruction
    // behind the overlap case is also witnessed numerically:
    // c = n^(2(n+1)) > 2 n^(2n).
    let mut incompat_fail = String::new();
    if period_constant(n) <= int_pow(n, 2 * n) * Rat::from(num_bigint::BigInt::from(2)) {
        incompat_fail = "period constant does not dominate 2 n^(2n)".to_string();
    }
    let orbits = ap.tube_orbits();
    'pairs: for i in 0..orbits.len() {
        if !incompat_fail.is_empty() {
            break;
        }
        for j in i + 1..orbits.len() {
            if ap.is_proper_tubing(&[orbits[i].clone(), orbits[j].clone()]) {
                continue;
            }
            let labels = [
                Label::Orbit(orbits[i].members.clone()),
                Label::Orbit(orbits[j].members.clone()),
            ];
            match feasible_with_equalities(&sys, &labels) {
                Ok(false) => {}
                Ok(true) => {
                    incompat_fail = format!(
                        "incompatible orbits {:?} {:?} are feasible",
                        orbits[i].members, orbits[j].members
                    );
                    break 'pairs;
                }
                Err(e) => {
                    incompat_fail = e.to_string();
                    break 'pairs;
                }
            }
        }
    }
    report.push(
        "incompatible-pairs",
        incompat_fail.is_empty(),
        incompat_fail,
    );

    // Face lattice over all proper affine tubings.
    let mut lattice_fail = String::new();
    'faces: for t in all_affine_tubings(ap) {
        let verts: Vec<&Point> = predicted
            .iter()
            .filter(|(m, _)| t.iter().all(|tau| m.contains(tau)))
            .map(|(_, v)| v)
            .collect();
        if verts.is_empty() {
            lattice_fail = format!("tubing {t:?} has no vertex above it");
            break;
        }
        let mut common: Option<Vec<Label>> = None;
        for v in &verts {
            let mut tight = sys.tight_at(v);
            tight.sort();
            common = Some(match common {
                None => tight,
                Some(prev) => prev.into_iter().filter(|l| tight.contains(l)).collect(),
            });
        }
        let mut expect: Vec<Label> = t.iter().map(|s| Label::Orbit(s.members.clone())).collect();
        expect.sort();
        if common.unwrap_or_default() != expect {
            lattice_fail = format!("tight-set intersection of {t:?} differs from its orbits");
            break;
        }
        let coords: Vec<Vec<Rat>> = verts.iter().map(|v| v.0.clone()).collect();
        if affine_span_dim(&coords) != Some(d - t.len()) {
            lattice_fail = format!("face of {t:?} has wrong dimension");
            break 'faces;
        }
    }
    report.push("face-lattice", lattice_fail.is_empty(), lattice_fail);

    // Euler relation on three-dimensional instances.
    if d == 3 {
        let edges = count_edges(&oracle, d);
        let euler_ok = oracle.len() as i64 - edges as i64 + sys.inequalities.len() as i64 == 2;
        report.push(
            "euler",
            euler_ok,
            format!("{} - {} + {}", oracle.len(), edges, sys.inequalities.len()),
        );
    }

    Ok(report)
}

/// Pairs of vertices sharing exactly d-1 tight facets (edges of a simple
/// polytope).
pub fn count_edges(vertices: &[VertexCertificate], d: usize) -> usize {
    if d == 0 {
        return 0;
    }
    let mut edges = 0;
    for i in 0..vertices.len() {
        for j in i + 1..vertices.len() {
            let shared = vertices[i]
                .tight
                .iter()
                .filter(|l| vertices[j].tight.contains(l))
                .count();
            if shared == d - 1 {
                edges += 1;
            }
        }
    }
    edges
}

fn check_vertex_set_equality(
    report: &mut VerificationReport,
    oracle: &[VertexCertificate],
    mut predicted: Vec<Point>,
) {
    let mut oracle_points: Vec<&Point> = oracle.iter().map(|c| &c.point).collect();
    oracle_points.sort();
    predicted.sort();
    predicted.dedup();
    let equal = oracle_points.len() == predicted.len()
        && oracle_points.iter().zip(&predicted).all(|(a, b)| **a == *b);
    let detail = if equal {
        format!("{} vertices", predicted.len())
    } else {
        format!(
            "oracle found {} vertices, tubings predict {}",
            oracle_points.len(),
            predicted.len()
        )
    };
    report.push("vertex-set-equality", equal, detail);
}

fn check_simplicity(report: &mut VerificationReport, oracle: &[VertexCertificate], d: usize) {
    let bad = oracle.iter().find(|c| c.tight.len() != d);
    let detail = match bad {
        None => String::new(),
        Some(c) => format!(
            "vertex {:?} tight on {} facets, expected {}",
            c.point,
            c.tight.len(),
            d
        ),
    };
    report.push("simplicity", detail.is_empty(), detail);
}

fn check_facets(
    report: &mut VerificationReport,
    sys: &HalfSpaceSystem,
    oracle: &[VertexCertificate],
    d: usize,
) {
    let mut detail = String::new();
    if d >= 1 {
        for (label, _, _) in &sys.inequalities {
            let coords: Vec<Vec<Rat>> = oracle
                .iter()
                .filter(|c| c.tight.contains(label))
                .map(|c| c.point.0.clone())
                .collect();
            if affine_span_dim(&coords) != Some(d - 1) {
                detail = format!("inequality {} is not a facet", sys.label_string(label));
                break;
            }
        }
    }
    report.push("facets", detail.is_empty(), detail);
}

/// All proper affine tubings (orbit subsets), the empty one included.
fn all_affine_tubings(ap: &AffinePoset) -> Vec<Vec<AffineTube>> {
    let orbits = ap.tube_orbits();
    let mut out: Vec<Vec<AffineTube>> = vec![Vec::new()];
    let mut stack: Vec<Vec<usize>> = vec![Vec::new()];
    while let Some(current) = stack.pop() {
        let from = current.last().map_or(0, |&i| i + 1);
        for cand in from..orbits.len() {
            let mut next = current.clone();
            next.push(cand);
            let members: Vec<AffineTube> = next.iter().map(|&i| orbits[i].clone()).collect();
            if ap.is_proper_tubing(&members) {
                out.push(members);
                stack.push(next);
            }
        }
    }
    out
}

/// All directed precedence cycles of pairwise disjoint tubes up to the given
/// length, each reported once with its smallest tube first.
pub fn precedence_cycles(p: &Poset, tubes: &[ElemSet], max_len: usize) -> Vec<Vec<ElemSet>> {
    let mut out = Vec::new();
    let prec = |a: ElemSet, b: ElemSet| tube_precedes(p, a, b).unwrap_or(false);
    fn extend(
        tubes: &[ElemSet],
        prec: &dyn Fn(ElemSet, ElemSet) -> bool,
        path: &mut Vec<usize>,
        max_len: usize,
        out: &mut Vec<Vec<ElemSet>>,
    ) {
        let last = tubes[*path.last().unwrap()];
        let first = tubes[path[0]];
        if path.len() >= 2 && prec(last, first) {
            out.push(path.iter().map(|&i| tubes[i]).collect());
        }
        if path.len() == max_len {
            return;
        }
        for cand in path[0] + 1..tubes.len() {
            if path.contains(&cand) {
                continue;
            }
            if !path.iter().all(|&i| tubes[i].is_disjoint(tubes[cand])) {
                continue;
            }
            if !prec(last, tubes[cand]) {
                continue;
            }
            path.push(cand);
            extend(tubes, prec, path, max_len, out);
            path.pop();
        }
    }
    for start in 0..tubes.len() {
        let mut path = vec![start];
        extend(tubes, &prec, &mut path, max_len, &mut out);
    }
    out
}

/// Deterministic pseudorandom order-preserving integer assignments,
/// recentred to sum zero (coordinates are scaled by n so they stay
/// integral).
pub fn sample_order_cone(p: &Poset, count: usize, seed: u64) -> Vec<Point> {
    let n = p.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Process elements in a linear extension.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (0..n).filter(|&j| p.lt(j, i)).count());
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let mut raw = vec![0i64; n];
        for &i in &order {
            let floor = p
                .covers()
                .iter()
                .filter(|&&(_, b)| b == i)
                .map(|&(a, _)| raw[a])
                .max()
                .unwrap_or(0);
            raw[i] = floor + rng.gen_range(0..=4);
        }
        let total: i64 = raw.iter().sum();
        let coords: Vec<Rat> = raw
            .iter()
            .map(|&v| Rat::from(num_bigint::BigInt::from(v * n as i64 - total)))
            .collect();
        out.push(Point(coords));
    }
    out
}

/// Max minus min of the coordinates over a subset.
pub fn diameter(point: &Point, s: ElemSet) -> Rat {
    let mut values = s.iter().map(|i| point.0[i].clone());
    let first = values.next().expect("diameter of a nonempty set");
    let mut lo = first.clone();
    let mut hi = first;
    for v in values {
        if v < lo {
            lo = v.clone();
        }
        if v > hi {
            hi = v;
        }
    }
    hi - lo
}

/// All connected posets with up to `max_n` elements, one per isomorphism
/// class, in a deterministic order. Elements are named "1", "2", ...
pub fn connected_posets_up_to_iso(max_n: usize) -> Vec<Poset> {
    let mut out = Vec::new();
    for n in 1..=max_n {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        let mut classes: BTreeMap<u64, Poset> = BTreeMap::new();
        for mask in 0u64..1 << pairs.len() {
            let rel: Vec<(usize, usize)> = pairs
                .iter()
                .enumerate()
                .filter(|(k, _)| mask >> k & 1 == 1)
                .map(|(_, &pr)| pr)
                .collect();
            if !is_transitive(n, &rel) {
                continue;
            }
            let names: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
            let p = Poset::from_index_relations(names, &rel).expect("acyclic by construction");
            if !p.is_connected() {
                continue;
            }
            classes.entry(canonical_form(&p)).or_insert(p);
        }
        out.extend(classes.into_values());
    }
    out
}

fn is_transitive(n: usize, rel: &[(usize, usize)]) -> bool {
    let has = |a: usize, b: usize| rel.contains(&(a, b));
    for &(a, b) in rel {
        for c in 0..n {
            if has(b, c) && !has(a, c) {
                return false;
            }
        }
    }
    true
}

/// Minimum closure-matrix bit pattern over all relabelings.
pub fn canonical_form(p: &Poset) -> u64 {
    let n = p.len();
    assert!(n * n <= 64, "canonical form limited to 8 elements");
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = u64::MAX;
    loop {
        let mut bits = 0u64;
        for a in 0..n {
            for b in 0..n {
                if p.leq(perm[a], perm[b]) {
                    bits |= 1 << (a * n + b);
                }
            }
        }
        best = best.min(bits);
        if !next_permutation(&mut perm) {
            break;
        }
    }
    best
}

fn next_permutation(perm: &mut [usize]) -> bool {
    let n = perm.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && perm[i - 1] >= perm[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while perm[j] <= perm[i - 1] {
        j -= 1;
    }
    perm.swap(i - 1, j);
    perm[i..].reverse();
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::realization::{epsilon_realization, order_polytope, stanley_normalized};
    use crate::system::rat;

    fn set(v: &[usize]) -> ElemSet {
        v.iter().copied().collect()
    }

    #[test]
    fn pentagon_has_five_vertices() {
        let sys = build_associahedron(&Poset::chain(4)).unwrap();
        let verts = brute_force_vertices(&sys).unwrap();
        assert_eq!(verts.len(), 5);
        for v in &verts {
            assert_eq!(v.tight.len(), 2);
        }
    }

    #[test]
    fn chain2_single_vertex() {
        let sys = build_associahedron(&Poset::chain(2)).unwrap();
        let verts = brute_force_vertices(&sys).unwrap();
        assert_eq!(verts.len(), 1);
        assert_eq!(verts[0].point, Point(vec![rat(-8), rat(8)]));
    }

    #[test]
    fn affine_segment_two_vertices() {
        let sys = crate::affine::affine_chain(2).build_cyclohedron().unwrap();
        let verts = brute_force_vertices(&sys).unwrap();
        assert_eq!(verts.len(), 2);
        let points: Vec<&Point> = verts.iter().map(|c| &c.point).collect();
        assert!(points.contains(&&Point(vec![rat(-8), rat(8)])));
        assert!(points.contains(&&Point(vec![rat(-24), rat(24)])));
    }

    #[test]
    fn unbounded_detected() {
        // A single order-cone inequality with only the gauge equality.
        let p = Poset::chain(2);
        let mut sys = order_polytope(&p, &rat(1)).unwrap();
        sys.equalities.truncate(1);
        assert_eq!(
            brute_force_vertices(&sys).unwrap_err(),
            OracleError::Unbounded
        );
    }

    #[test]
    fn feasibility_checks() {
        let p = Poset::chain(4);
        let sys = build_associahedron(&p).unwrap();
        let t12 = Label::Tube(vec![0, 1]);
        let t23 = Label::Tube(vec![1, 2]);
        assert!(!feasible_with_equalities(&sys, &[t12.clone(), t23]).unwrap());
        assert!(feasible_with_equalities(&sys, &[t12]).unwrap());
        let b = Poset::bowtie();
        let bsys = build_associahedron(&b).unwrap();
        let ab = Label::Tube(vec![0, 1]);
        let cd = Label::Tube(vec![2, 3]);
        assert!(!feasible_with_equalities(&bsys, &[ab, cd]).unwrap());
        assert!(matches!(
            feasible_with_equalities(&bsys, &[Label::Tube(vec![0])]),
            Err(OracleError::UnknownLabel(_))
        ));
    }

    #[test]
    fn order_polytope_of_three_chain_is_a_segment() {
        let sys = order_polytope(&Poset::chain(3), &rat(1)).unwrap();
        let verts = brute_force_vertices(&sys).unwrap();
        assert_eq!(verts.len(), 2);
        let expect_a = Point(vec![
            Rat::new((-1).into(), 3.into()),
            Rat::new((-1).into(), 3.into()),
            Rat::new(2.into(), 3.into()),
        ]);
        let expect_b = Point(vec![
            Rat::new((-2).into(), 3.into()),
            Rat::new(1.into(), 3.into()),
            Rat::new(1.into(), 3.into()),
        ]);
        let points: Vec<&Point> = verts.iter().map(|c| &c.point).collect();
        assert!(points.contains(&&expect_a));
        assert!(points.contains(&&expect_b));
    }

    #[test]
    fn stanley_diamond_is_the_unit_square() {
        let sys = stanley_normalized(&Poset::diamond()).unwrap();
        let verts = brute_force_vertices(&sys).unwrap();
        assert_eq!(verts.len(), 4);
    }

    #[test]
    fn stanley_two_chain_is_a_point() {
        let sys = stanley_normalized(&Poset::chain(2)).unwrap();
        let verts = brute_force_vertices(&sys).unwrap();
        assert_eq!(verts.len(), 1);
        assert_eq!(verts[0].point, Point(vec![rat(0), rat(1)]));
    }

    #[test]
    fn epsilon_chain4_is_a_pentagon() {
        let sys = epsilon_realization(&Poset::chain(4), &Rat::new(1.into(), 17.into())).unwrap();
        let verts = brute_force_vertices(&sys).unwrap();
        assert_eq!(verts.len(), 5);
    }

    #[test]
    fn epsilon_chain2_is_the_stanley_point() {
        for denom in [2u32, 100] {
            let sys =
                epsilon_realization(&Poset::chain(2), &Rat::new(1.into(), denom.into())).unwrap();
            let verts = brute_force_vertices(&sys).unwrap();
            assert_eq!(verts.len(), 1);
            assert_eq!(verts[0].point, Point(vec![rat(0), rat(1)]));
        }
    }

    #[test]
    fn verify_chain4_all_pass() {
        let report = verify_poset_realization(&Poset::chain(4), "chain4", 0, 100).unwrap();
        assert!(report.all_pass(), "{}", report.render_text());
        assert_eq!(report.vertex_count, 5);
    }

    #[test]
    fn verify_chain5_counts() {
        let report = verify_poset_realization(&Poset::chain(5), "chain5", 0, 100).unwrap();
        assert!(report.all_pass(), "{}", report.render_text());
        assert_eq!(report.vertex_count, 14);
        assert_eq!(report.facet_count, 9);
        // Classical 3-dimensional associahedron: 14 - 21 + 9 = 2.
        let sys = build_associahedron(&Poset::chain(5)).unwrap();
        let verts = brute_force_vertices(&sys).unwrap();
        assert_eq!(count_edges(&verts, 3), 21);
    }

    #[test]
    fn verify_affine_hexagon() {
        let report =
            verify_affine_realization(&crate::affine::affine_chain(3), "affine-chain3").unwrap();
        assert!(report.all_pass(), "{}", report.render_text());
        assert_eq!(report.vertex_count, 6);
        assert_eq!(report.facet_count, 6);
    }

    #[test]
    fn bowtie_cycles_found() {
        let p = Poset::bowtie();
        let eng = TubingEngine::new(&p).unwrap();
        let cycles = precedence_cycles(&p, eng.tubes(), 4);
        assert!(cycles
            .iter()
            .any(|c| c.contains(&set(&[0, 1])) && c.contains(&set(&[2, 3]))));
        // Chains have no precedence cycles.
        let c = Poset::chain(5);
        let ceng = TubingEngine::new(&c).unwrap();
        assert!(precedence_cycles(&c, ceng.tubes(), 4).is_empty());
    }

    #[test]
    fn order_cone_samples_are_order_preserving() {
        let p = Poset::chain(3);
        for q in sample_order_cone(&p, 50, 7) {
            assert!(q.0[0] <= q.0[1] && q.0[1] <= q.0[2]);
            let total: Rat = q.0.iter().sum();
            assert!(total.is_zero());
        }
        let b = Poset::bowtie();
        for q in sample_order_cone(&b, 100, 1) {
            for &(i, j) in b.covers() {
                assert!(q.0[i] <= q.0[j]);
            }
        }
    }

    #[test]
    fn diameter_on_constant_map_is_zero() {
        let p = Poset::chain(3);
        let constant = Point(vec![rat(0), rat(0), rat(0)]);
        assert_eq!(diameter(&constant, p.full_set()), rat(0));
        assert_eq!(
            alpha(&p, p.full_set(), AlphaVariant::Covers).evaluate(&constant),
            rat(0)
        );
    }

    #[test]
    fn poset_family_counts() {
        // Connected posets per isomorphism class: 1, 1, 3, 10, 44.
        let family = connected_posets_up_to_iso(5);
        let counts: Vec<usize> = (1..=5)
            .map(|n| family.iter().filter(|p| p.len() == n).count())
            .collect();
        assert_eq!(counts, vec![1, 1, 3, 10, 44]);
    }

    #[test]
    fn canonical_form_identifies_isomorphic_posets() {
        let a = Poset::build(&["x", "y", "z"], &[("x", "y"), ("x", "z")]).unwrap();
        let b = Poset::build(&["1", "2", "3"], &[("3", "1"), ("3", "2")]).unwrap();
        assert_eq!(canonical_form(&a), canonical_form(&b));
        let c = Poset::chain(3);
        assert_ne!(canonical_form(&a), canonical_form(&c));
    }
}
