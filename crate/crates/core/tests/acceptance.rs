//! Acceptance suite: every structural property the library promises, checked
//! end to end in exact arithmetic with the brute-force oracle. One test per
//! criterion; each prints a single pass/fail line.

use std::collections::BTreeSet;

use posetpoly::affine::{affine_chain, AffinePoset};
use posetpoly::linalg::affine_span_dim;
use posetpoly::oracle::sample_order_cone;
use posetpoly::oracle::{
    brute_force_vertices, connected_posets_up_to_iso, count_edges, diameter,
    feasible_with_equalities, precedence_cycles, verify_affine_realization,
    verify_poset_realization,
};
use posetpoly::realization::{
    alpha, build_associahedron, build_associahedron_with, epsilon_realization, f_vector,
    h_vector_by_outdegree_seeded, threshold, vertex_of_tubing, AlphaVariant,
};
use posetpoly::system::{Label, Point, Rat};
use posetpoly::tubing::TubingEngine;
use posetpoly::Poset;

struct Criterion(&'static str);

impl Criterion {
    fn check(&self, pass: bool, detail: &str) {
        let status = if pass { "PASS" } else { "FAIL" };
        println!("acceptance {}: {status} ({detail})", self.0);
        assert!(pass, "acceptance {} failed: {detail}", self.0);
    }
}

fn family(min_n: usize, max_n: usize) -> Vec<Poset> {
    connected_posets_up_to_iso(max_n)
        .into_iter()
        .filter(|p| p.len() >= min_n)
        .collect()
}

/// Tight tube-label sets of all oracle vertices; the face lattice of a
/// polytope is determined by this family.
fn vertex_tube_sets(sys: &posetpoly::HalfSpaceSystem) -> BTreeSet<Vec<Label>> {
    brute_force_vertices(sys)
        .expect("bounded system")
        .into_iter()
        .map(|c| {
            let mut tubes: Vec<Label> = c
                .tight
                .into_iter()
                .filter(|l| matches!(l, Label::Tube(_)))
                .collect();
            tubes.sort();
            tubes
        })
        .collect()
}

#[test]
fn criterion_1_chain_associahedra() {
    let c = Criterion("1 chain-associahedra");
    for (n, catalan) in [(3usize, 2usize), (4, 5), (5, 14), (6, 42)] {
        let p = Poset::chain(n);
        let d = n - 2;
        let eng = TubingEngine::new(&p).unwrap();
        let maximal = eng.maximal_tubings();
        if maximal.len() != catalan {
            c.check(
                false,
                &format!("chain {n}: {} maximal tubings", maximal.len()),
            );
        }
        let mut predicted: Vec<Point> = maximal
            .iter()
            .map(|t| vertex_of_tubing(&p, &eng.members(t)).unwrap())
            .collect();
        predicted.sort();
        let sys = build_associahedron(&p).unwrap();
        let oracle = brute_force_vertices(&sys).unwrap();
        let oracle_points: Vec<Point> = oracle.iter().map(|v| v.point.clone()).collect();
        if oracle_points != predicted {
            c.check(
                false,
                &format!("chain {n}: oracle and tubing vertices differ"),
            );
        }
        if !oracle.iter().all(|v| v.tight.len() == d) {
            c.check(false, &format!("chain {n}: not simple"));
        }
        let coords: Vec<Vec<Rat>> = oracle_points.iter().map(|p| p.0.clone()).collect();
        if affine_span_dim(&coords) != Some(d) {
            c.check(false, &format!("chain {n}: wrong dimension"));
        }
    }
    c.check(
        true,
        "chains 3,4,5,6 give 2,5,14,42 vertices, simple, exact",
    );
}

#[test]
fn criterion_2_pentagon_data() {
    let c = Criterion("2 pentagon-data");
    let p = Poset::chain(4);
    let fh = f_vector(&p).unwrap();
    let f_ok = fh.f == vec![5, 5, 1];
    let h_ok = fh.h == vec![1, 3, 1];
    let sym_ok = fh.is_symmetric() && fh.identity_holds();
    let (_, hist) = h_vector_by_outdegree_seeded(&p, 0).unwrap();
    let out_ok = hist == vec![1, 3, 1];
    c.check(
        f_ok && h_ok && sym_ok && out_ok,
        &format!("f = {:?}, h = {:?}, outdegree = {:?}", fh.f, fh.h, hist),
    );
}

#[test]
fn criterion_3_strict_interiority_family() {
    let c = Criterion("3 strict-interiority");
    let mut tubings = 0usize;
    for p in family(2, 5) {
        let n = p.len();
        let eng = TubingEngine::new(&p).unwrap();
        for t in eng.maximal_tubings() {
            tubings += 1;
            let members = eng.members(&t);
            let v = vertex_of_tubing(&p, &members).unwrap();
            for tau in eng.tubes() {
                if members.contains(tau) {
                    continue;
                }
                let value = alpha(&p, *tau, AlphaVariant::Covers).evaluate(&v);
                if value <= threshold(n, tau.len()) {
                    c.check(
                        false,
                        &format!("poset {p:?}, tube {tau:?} not strictly interior"),
                    );
                }
            }
        }
    }
    c.check(
        true,
        &format!("all {tubings} maximal tubings over the 5-element family"),
    );
}

#[test]
fn criterion_4_incompatibility_family() {
    let c = Criterion("4 incompatibility");
    let mut pairs = 0usize;
    let mut cycles = 0usize;
    for p in family(2, 5) {
        let sys = build_associahedron(&p).unwrap();
        let eng = TubingEngine::new(&p).unwrap();
        let tubes = eng.tubes();
        for i in 0..tubes.len() {
            for j in i + 1..tubes.len() {
                if posetpoly::tubing::tubes_compatible(tubes[i], tubes[j]) {
                    continue;
                }
                pairs += 1;
                let labels = [
                    Label::Tube(tubes[i].to_vec()),
                    Label::Tube(tubes[j].to_vec()),
                ];
                if feasible_with_equalities(&sys, &labels).unwrap() {
                    c.check(false, &format!("poset {p:?}: overlapping pair feasible"));
                }
            }
        }
        for cycle in precedence_cycles(&p, tubes, 4) {
            cycles += 1;
            let labels: Vec<Label> = cycle.iter().map(|t| Label::Tube(t.to_vec())).collect();
            if feasible_with_equalities(&sys, &labels).unwrap() {
                c.check(false, &format!("poset {p:?}: precedence cycle feasible"));
            }
        }
    }
    c.check(
        true,
        &format!("{pairs} overlapping pairs and {cycles} precedence cycles all infeasible"),
    );
}

#[test]
fn criterion_5_diameter_bounds() {
    let c = Criterion("5 diameter-bounds");
    let mut checked = 0usize;
    for p in family(1, 5) {
        let n = p.len();
        let factor = Rat::new((n * n).into(), 4.into());
        let tubes: Vec<posetpoly::ElemSet> = posetpoly::ElemSet::all_subsets(n)
            .filter(|&s| p.is_tube(s))
            .collect();
        for q in sample_order_cone(&p, 1000, 42) {
            for &tau in &tubes {
                checked += 1;
                let a = alpha(&p, tau, AlphaVariant::Covers).evaluate(&q);
                let dia = diameter(&q, tau);
                if a < dia || a > &factor * &dia {
                    c.check(false, &format!("poset {p:?}, tube {tau:?}, sample {q:?}"));
                }
            }
        }
    }
    c.check(
        true,
        &format!("{checked} exact sandwich checks over 1000 samples per poset"),
    );
}

#[test]
fn criterion_6_affine_chains() {
    let c = Criterion("6 affine-chains");
    // Order 2: a segment with x1 - x0 in {16, 48}.
    let p2 = affine_chain(2);
    let sys2 = p2.build_cyclohedron().unwrap();
    let verts2 = brute_force_vertices(&sys2).unwrap();
    let mut gaps: Vec<Rat> = verts2
        .iter()
        .map(|v| &v.point.0[1] - &v.point.0[0])
        .collect();
    gaps.sort();
    let seg_ok = gaps
        == vec![
            Rat::from(num_bigint::BigInt::from(16)),
            Rat::from(num_bigint::BigInt::from(48)),
        ];
    if !seg_ok {
        c.check(false, &format!("order 2 gaps {gaps:?}"));
    }
    // Order 3: hexagon.
    let rep3 = verify_affine_realization(&affine_chain(3), "affine-chain3").unwrap();
    if !(rep3.all_pass() && rep3.vertex_count == 6 && rep3.facet_count == 6) {
        c.check(false, &rep3.render_text());
    }
    // Order 4: simple 3-polytope, oracle count = tubing count, Euler.
    let p4 = affine_chain(4);
    let rep4 = verify_affine_realization(&p4, "affine-chain4").unwrap();
    if !rep4.all_pass() {
        c.check(false, &rep4.render_text());
    }
    let sys4 = p4.build_cyclohedron().unwrap();
    let verts4 = brute_force_vertices(&sys4).unwrap();
    let maximal4 = p4.maximal_tubings();
    let euler =
        verts4.len() as i64 - count_edges(&verts4, 3) as i64 + sys4.inequalities.len() as i64;
    c.check(
        verts4.len() == maximal4.len() && euler == 2,
        &format!(
            "segment {{16,48}}, hexagon 6/6, order 4: {} vertices = {} tubings, euler {euler}",
            verts4.len(),
            maximal4.len()
        ),
    );
}

#[test]
fn criterion_7_epsilon_diamond() {
    let c = Criterion("7 epsilon-realization");
    let d = Poset::diamond();
    let reference = vertex_tube_sets(&build_associahedron(&d).unwrap());
    for denom in [3u32, 9, 27] {
        let eps = Rat::new(1.into(), denom.into());
        let sys = epsilon_realization(&d, &eps).unwrap();
        let faces = vertex_tube_sets(&sys);
        if faces != reference {
            c.check(false, &format!("eps = 1/{denom}: face lattices differ"));
        }
    }
    c.check(true, "eps in {1/3, 1/9, 1/27} all match the hexagon");
}

#[test]
fn criterion_8_variant_robustness() {
    let c = Criterion("8 variant-robustness");
    let mut count = 0usize;
    for p in family(2, 5) {
        let reference = vertex_tube_sets(&build_associahedron(&p).unwrap());
        for variant in [AlphaVariant::AllPairs, AlphaVariant::MinMax] {
            count += 1;
            let sys = build_associahedron_with(&p, variant).unwrap();
            if vertex_tube_sets(&sys) != reference {
                c.check(false, &format!("poset {p:?}, variant {variant:?}"));
            }
        }
    }
    c.check(
        true,
        &format!("{count} variant rebuilds share the face lattice"),
    );
}

#[test]
fn criterion_9_determinism() {
    let c = Criterion("9 determinism");
    let run = || {
        let mut out = String::new();
        for n in 3..=5 {
            let rep =
                verify_poset_realization(&Poset::chain(n), &format!("chain{n}"), 7, 100).unwrap();
            out.push_str(&rep.to_json());
            out.push_str(&rep.render_text());
        }
        for n in 2..=3 {
            let rep = verify_affine_realization(&affine_chain(n), &format!("affine{n}")).unwrap();
            out.push_str(&rep.to_json());
        }
        let rep = verify_poset_realization(&Poset::diamond(), "diamond", 7, 100).unwrap();
        out.push_str(&rep.to_json());
        let claw = AffinePoset::build(3, &[(0, 2), (1, 2), (2, 3), (2, 4)]).unwrap();
        out.push_str(&verify_affine_realization(&claw, "claw").unwrap().to_json());
        out
    };
    let first = run();
    let second = run();
    c.check(
        first == second && first.contains("\"pass\": true"),
        &format!("{} report bytes identical across runs", first.len()),
    );
}
