//! Acceptance suite: one test per criterion, each printing a pass/fail line.
//!
//! Every criterion is checked exhaustively at desk scale. Time budgets are
//! printed always and asserted in optimized builds (`cargo test --release
//! -p grpd-cli --test acceptance`); debug builds check the same mathematics
//! without the timing assertion.

#[path = "../../core/tests/common/oracle.rs"]
mod oracle;

use std::collections::BTreeMap;
use std::process::Command;
use std::time::{Duration, Instant};

use grpd_core::action::{check_two_group_semidirect, AutAction};
use grpd_core::bibundle::{
    compose, decide_weak_equivalence, find_two_iso, from_strict_hom, identity_bibundle,
    induced_coarse_map, induced_stabilizer_hom, is_equivalence, is_essential_equivalence,
    validate_bibundle, Bibundle,
};
use grpd_core::catalog::{
    b_group_corpus, charted_b_group, charted_corpus, small_groupoid_corpus, translation_corpus,
};
use grpd_core::cert::{cert_from_presentation, write_cert};
use grpd_core::charted::{
    check_s0_equivariance, effectivization, equivalent_to_set, ineffective_stabilizers,
    is_effective, is_purely_ineffective, ChartedGroupoid,
};
use grpd_core::descent::{glue, validate_descent, check_stack_property, Cover, DescentViolation};
use grpd_core::format::{parse, ParsedFile};
use grpd_core::group::{are_isomorphic, FiniteGroup};
use grpd_core::groupoid::{b_group, Arr, FiniteGroupoid, Obj};
use grpd_core::hom::StrictHom;
use grpd_core::perm::Perm;
use grpd_core::presentation::{
    band_trivialization, frame_construction, present, present_trivial_center, PresentError,
};

/// Collects named checks for one criterion and prints its verdict line.
struct Criterion {
    number: u32,
    name: &'static str,
    budget: Duration,
    start: Instant,
    failures: Vec<String>,
    detail: String,
}

impl Criterion {
    fn new(number: u32, name: &'static str, budget_ms: u64) -> Criterion {
        Criterion {
            number,
            name,
            budget: Duration::from_millis(budget_ms),
            start: Instant::now(),
            failures: Vec::new(),
            detail: String::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }

    fn detail(&mut self, detail: String) {
        self.detail = detail;
    }

    fn finish(self) {
        let elapsed = self.start.elapsed();
        let verdict = if self.failures.is_empty() { "PASS" } else { "FAIL" };
        println!(
            "acceptance {:02} ({}): {verdict} — {} [{elapsed:?}; budget {:?}]",
            self.number, self.name, self.detail, self.budget
        );
        assert!(
            self.failures.is_empty(),
            "criterion {} failed: {}",
            self.number,
            self.failures.join("; ")
        );
        // Budgets describe optimized builds; debug builds print them only.
        if !cfg!(debug_assertions) {
            assert!(
                elapsed <= self.budget,
                "criterion {} exceeded its {:?} budget: {elapsed:?}",
                self.number,
                self.budget
            );
        }
    }
}

#[test]
fn criterion_01_axiom_suite() {
    let mut c = Criterion::new(1, "axiom suite", 1000);
    let mut count = 0usize;
    for (name, g) in translation_corpus() {
        c.check(g.validate().is_valid(), format!("{name} fails validation"));
        count += 1;
    }
    for (name, g) in b_group_corpus() {
        c.check(g.validate().is_valid(), format!("{name} fails validation"));
        count += 1;
    }
    c.detail(format!("{count} corpus groupoids validated"));
    c.finish();
}

#[test]
fn criterion_02_semidirect_lemma() {
    let mut c = Criterion::new(2, "two-group semidirect lemma", 1000);
    let mut instances = 0usize;
    let mut arrows = 0u32;
    // Inversion and trivial actions on one-object groupoids.
    for n in [3u32, 4, 5, 6, 7, 9] {
        let zn = FiniteGroup::cyclic(n);
        let g = b_group(&zn);
        let z2 = FiniteGroup::cyclic(2);
        let mut arr_act = Vec::new();
        for a in 0..n {
            arr_act.push(a);
            arr_act.push(zn.inv(a));
        }
        let inversion = AutAction::from_tables(z2, g.clone(), vec![0, 0], arr_act);
        let trivial = AutAction::trivial(FiniteGroup::cyclic(3), g);
        match check_two_group_semidirect(&inversion, &trivial) {
            Ok(result) => {
                c.check(result.verified, format!("iso not verified on B(Z{n})"));
                arrows += result.nested.groupoid.arrow_count();
            }
            Err(e) => c.check(false, format!("B(Z{n}) refused: {e}")),
        }
        instances += 1;
    }
    // Swap actions on unit groupoids, including the self-commuting swap.
    for m in [2u32, 3, 4] {
        let g = FiniteGroupoid::trivial(m);
        let z2 = FiniteGroup::cyclic(2);
        let mut table = Vec::new();
        for x in 0..m {
            table.push(x);
            table.push(if x < 2 { 1 - x } else { x });
        }
        let swap = AutAction::from_tables(z2, g.clone(), table.clone(), table);
        match check_two_group_semidirect(&swap, &swap.clone()) {
            Ok(result) => {
                c.check(result.verified, format!("swap iso not verified on {m} points"));
                arrows += result.nested.groupoid.arrow_count();
            }
            Err(e) => c.check(false, format!("swap on {m} points refused: {e}")),
        }
        instances += 1;
    }
    // Both factors trivial.
    let g = b_group(&FiniteGroup::symmetric(3).0);
    let a = AutAction::trivial(FiniteGroup::trivial(), g.clone());
    let b = AutAction::trivial(FiniteGroup::cyclic(2), g);
    match check_two_group_semidirect(&a, &b) {
        Ok(result) => {
            c.check(result.verified, "trivial pair not verified");
            arrows += result.nested.groupoid.arrow_count();
        }
        Err(e) => c.check(false, format!("trivial pair refused: {e}")),
    }
    instances += 1;
    c.check(instances >= 10, format!("only {instances} instances"));
    c.detail(format!(
        "{instances} commuting pairs certified, {arrows} arrows checked"
    ));
    c.finish();
}

#[test]
fn criterion_03_effectivization() {
    let mut c = Criterion::new(3, "effectivization", 1000);
    let corpus = charted_corpus();
    c.check(corpus.len() >= 20, format!("only {} charted instances", corpus.len()));
    for (name, g) in &corpus {
        let (eff, p) = effectivization(g);
        c.check(eff.validate().is_valid(), format!("{name}: quotient invalid"));
        let (_, p2) = effectivization(&eff);
        c.check(p2.is_bijective(), format!("{name}: not idempotent"));
        // Effective iff the class map is bijective.
        c.check(
            is_effective(g) == p.is_bijective(),
            format!("{name}: effective/bijective mismatch"),
        );
        // PI iff the effect map kills every stabilizer arrow; cross-checked
        // through the fiber sizes of the ineffective local system.
        let system = ineffective_stabilizers(g);
        let all_ineffective = g.base.objects().all(|x| {
            system.fiber(x).arrows.len() == g.base.stabilizer_arrows(x).len()
        });
        c.check(
            is_purely_ineffective(g) == all_ineffective,
            format!("{name}: PI/trivial-effect mismatch"),
        );
        // |S⁰_x| divides |S_x| with quotient the image inside Sym(n).
        for x in g.base.objects() {
            let stab = g.base.stabilizer_arrows(x);
            let fiber = system.fiber(x).arrows.len();
            c.check(stab.len() % fiber == 0, format!("{name}: fiber size at {x:?}"));
            let image: std::collections::BTreeSet<&Perm> =
                stab.iter().map(|&a| g.effect(a)).collect();
            c.check(
                image.len() == stab.len() / fiber,
                format!("{name}: effect image size at {x:?}"),
            );
        }
        check_s0_equivariance(g);
    }
    c.detail(format!("{} charted instances checked", corpus.len()));
    c.finish();
}

/// Builds the named strict-homomorphism corpus used by criteria 4 and 5.
fn hom_corpus() -> Vec<(String, StrictHom)> {
    let z = FiniteGroup::cyclic;
    let mut out: Vec<(String, StrictHom)> = Vec::new();
    for (name, g) in [
        ("B(Z2)", b_group(&z(2))),
        ("pair3", FiniteGroupoid::pair(3)),
        ("B(S3)", b_group(&FiniteGroup::symmetric(3).0)),
    ] {
        out.push((format!("id-{name}"), StrictHom::identity(&g)));
    }
    for n in [2u32, 3, 4] {
        let pair = FiniteGroupoid::pair(n);
        out.push((
            format!("point-into-pair{n}"),
            StrictHom {
                dom: FiniteGroupoid::trivial(1),
                cod: pair.clone(),
                obj_map: vec![Obj(0)],
                arr_map: vec![pair.unit(Obj(0))],
            },
        ));
    }
    let quotient = |a: u32, b: u32| StrictHom {
        dom: b_group(&z(a)),
        cod: b_group(&z(b)),
        obj_map: vec![Obj(0)],
        arr_map: (0..a).map(|k| Arr(k % b)).collect(),
    };
    out.push(("quotient-Z4-Z2".into(), quotient(4, 2)));
    out.push(("quotient-Z6-Z3".into(), quotient(6, 3)));
    out.push(("quotient-Z8-Z4".into(), quotient(8, 4)));
    // Inclusion Z/2 -> Z/4 sending the generator to 2.
    out.push((
        "include-Z2-Z4".into(),
        StrictHom {
            dom: b_group(&z(2)),
            cod: b_group(&z(4)),
            obj_map: vec![Obj(0)],
            arr_map: vec![Arr(0), Arr(2)],
        },
    ));
    // Collapse of the pair groupoid onto a point.
    out.push((
        "collapse-pair2".into(),
        StrictHom {
            dom: FiniteGroupoid::pair(2),
            cod: FiniteGroupoid::trivial(1),
            obj_map: vec![Obj(0), Obj(0)],
            arr_map: vec![Arr(0); 4],
        },
    ));
    // Non-full inclusion of units.
    out.push((
        "units-into-pair2".into(),
        StrictHom {
            dom: FiniteGroupoid::trivial(2),
            cod: FiniteGroupoid::pair(2),
            obj_map: vec![Obj(0), Obj(1)],
            arr_map: vec![
                FiniteGroupoid::pair(2).unit(Obj(0)),
                FiniteGroupoid::pair(2).unit(Obj(1)),
            ],
        },
    ));
    out
}

#[test]
fn criterion_04_hs_category_laws() {
    let mut c = Criterion::new(4, "HS category laws", 5000);
    let homs = hom_corpus();
    c.check(homs.len() >= 10, format!("only {} homs", homs.len()));
    for (name, phi) in &homs {
        c.check(phi.is_valid(), format!("{name} is not a functor"));
        let bundle = from_strict_hom(phi);
        c.check(
            validate_bibundle(&bundle).is_valid(),
            format!("{name}: bundle invalid"),
        );
        // Equivalence of the bundle iff essential equivalence of the functor.
        let eq = is_equivalence(&bundle).is_equivalence();
        let ess = is_essential_equivalence(phi).holds();
        c.check(eq == ess, format!("{name}: equivalence mismatch ({eq} vs {ess})"));
    }
    let mut compositions = 0usize;
    // Unit laws for every corpus bundle.
    for (name, phi) in &homs {
        let p = from_strict_hom(phi);
        let left = compose(&identity_bibundle(&phi.dom), &p).expect("composable");
        compositions += 1;
        c.check(
            find_two_iso(&left, &p).is_some(),
            format!("{name}: left unit law"),
        );
        let right = compose(&p, &identity_bibundle(&phi.cod)).expect("composable");
        compositions += 1;
        c.check(
            find_two_iso(&right, &p).is_some(),
            format!("{name}: right unit law"),
        );
    }
    // Associativity on composable triples: quotient chains and point-pair
    // zigzags, plus identity-padded triples.
    let z = FiniteGroup::cyclic;
    let quotient = |a: u32, b: u32| {
        from_strict_hom(&StrictHom {
            dom: b_group(&z(a)),
            cod: b_group(&z(b)),
            obj_map: vec![Obj(0)],
            arr_map: (0..a).map(|k| Arr(k % b)).collect(),
        })
    };
    let mut triples: Vec<(String, Bibundle, Bibundle, Bibundle)> = vec![
        (
            "Z8-Z4-Z2".into(),
            quotient(8, 4),
            quotient(4, 2),
            quotient(2, 1),
        ),
        (
            "Z12-Z6-Z3".into(),
            quotient(12, 6),
            quotient(6, 3),
            quotient(3, 1),
        ),
        (
            "Z12-Z4-Z2".into(),
            quotient(12, 4),
            quotient(4, 2),
            quotient(2, 1),
        ),
    ];
    for (name, phi) in &homs {
        triples.push((
            format!("{name}-padded"),
            identity_bibundle(&phi.dom),
            from_strict_hom(phi),
            identity_bibundle(&phi.cod),
        ));
    }
    for (name, p, q, r) in &triples {
        let pq = compose(p, q).expect("composable");
        let pq_r = compose(&pq, r).expect("composable");
        let qr = compose(q, r).expect("composable");
        let p_qr = compose(p, &qr).expect("composable");
        compositions += 4;
        c.check(
            find_two_iso(&pq_r, &p_qr).is_some(),
            format!("{name}: associativity"),
        );
    }
    c.check(compositions >= 30, format!("only {compositions} compositions"));
    c.detail(format!(
        "{} homs, {compositions} compositions checked",
        homs.len()
    ));
    c.finish();
}

#[test]
fn criterion_05_hseqfeatures() {
    let mut c = Criterion::new(5, "induced coarse maps and stabilizer homs", 1000);
    let (s3, _) = FiniteGroup::symmetric(3);
    let mut equivalences: Vec<(String, Bibundle)> = vec![
        ("id-B(S3)".into(), identity_bibundle(&b_group(&s3))),
        ("id-pair3".into(), identity_bibundle(&FiniteGroupoid::pair(3))),
        (
            "id-mixed".into(),
            identity_bibundle(&b_group(&FiniteGroup::cyclic(2)).disjoint_union(&FiniteGroupoid::trivial(1))),
        ),
    ];
    {
        let pair = FiniteGroupoid::pair(3);
        equivalences.push((
            "point-into-pair3".into(),
            from_strict_hom(&StrictHom {
                dom: FiniteGroupoid::trivial(1),
                cod: pair.clone(),
                obj_map: vec![Obj(0)],
                arr_map: vec![pair.unit(Obj(0))],
            }),
        ));
    }
    {
        let a = b_group(&s3).disjoint_union(&FiniteGroupoid::trivial(1));
        let b = FiniteGroupoid::trivial(1).disjoint_union(&b_group(&s3));
        let w = decide_weak_equivalence(&a, &b);
        equivalences.push(("shuffled-components".into(), w.bibundle.expect("equivalent")));
    }
    {
        // The pair-groupoid-on-6 ⋊ Aut(S3) equivalence from the band stage.
        let charted = ChartedGroupoid::with_trivial_charts(b_group(&s3));
        let band = band_trivialization(&charted, None).expect("PI input");
        equivalences.push(("band-B(S3)".into(), band.quotient.bibundle.clone()));
    }
    c.check(equivalences.len() >= 5, "too few equivalences".to_string());
    for (name, bundle) in &equivalences {
        let coarse = induced_coarse_map(bundle);
        c.check(coarse.consistent, format!("{name}: coarse map inconsistent"));
        c.check(coarse.bijective, format!("{name}: coarse map not bijective"));
        let dom_q = bundle.left.coarse_quotient();
        let cod_q = bundle.right.coarse_quotient();
        for x in bundle.left.objects() {
            let y = cod_q.representative(coarse.map[dom_q.class_of(x)]);
            match induced_stabilizer_hom(bundle, x, y) {
                Ok(psi) => c.check(
                    psi.is_isomorphism,
                    format!("{name}: stabilizer hom at {x:?} not iso"),
                ),
                Err(e) => c.check(false, format!("{name}: {e}")),
            }
        }
    }
    // Non-equivalences: the induced coarse map is still well defined.
    let quotient = from_strict_hom(&StrictHom {
        dom: b_group(&FiniteGroup::cyclic(4)),
        cod: b_group(&FiniteGroup::cyclic(2)),
        obj_map: vec![Obj(0)],
        arr_map: vec![Arr(0), Arr(1), Arr(0), Arr(1)],
    });
    let collapse = from_strict_hom(&StrictHom {
        dom: b_group(&FiniteGroup::cyclic(2)),
        cod: FiniteGroupoid::trivial(1),
        obj_map: vec![Obj(0)],
        arr_map: vec![Arr(0); 2],
    });
    let torsor = {
        let bl = b_group(&FiniteGroup::cyclic(3));
        from_strict_hom(&StrictHom {
            dom: FiniteGroupoid::trivial(2),
            cod: bl.clone(),
            obj_map: vec![Obj(0), Obj(0)],
            arr_map: vec![bl.unit(Obj(0)), bl.unit(Obj(0))],
        })
    };
    let non_equivalences = vec![
        ("quotient-Z4-Z2".to_string(), quotient),
        ("collapse-BZ2".to_string(), collapse),
        ("torsor-2pts-BZ3".to_string(), torsor),
    ];
    for (name, bundle) in &non_equivalences {
        c.check(
            !is_equivalence(bundle).is_equivalence(),
            format!("{name} unexpectedly an equivalence"),
        );
        let coarse = induced_coarse_map(bundle);
        c.check(coarse.consistent, format!("{name}: coarse map inconsistent"));
    }
    c.detail(format!(
        "{} equivalences, {} non-equivalences checked",
        equivalences.len(),
        non_equivalences.len()
    ));
    c.finish();
}

#[test]
fn criterion_06_oracle_agreement() {
    let mut c = Criterion::new(6, "weak-equivalence oracle agreement", 60000);
    let corpus = small_groupoid_corpus();
    for (name, g) in &corpus {
        c.check(
            g.arrow_count() <= 12,
            format!("{name} exceeds the 12-arrow bound"),
        );
    }
    let mut pairs = 0usize;
    let mut agreements = 0usize;
    for (name_g, g) in &corpus {
        for (name_h, h) in &corpus {
            let decided = decide_weak_equivalence(g, h).equivalent;
            let brute = oracle::equivalence_bundle_exists(g, h);
            if decided == brute {
                agreements += 1;
            } else {
                c.check(false, format!("{name_g} vs {name_h}: {decided} vs {brute}"));
            }
            pairs += 1;
        }
    }
    c.check(pairs >= 50, format!("only {pairs} pairs"));
    c.detail(format!("{agreements}/{pairs} pairs agree with brute force"));
    c.finish();
}

#[test]
fn criterion_07_frame_construction() {
    let mut c = Criterion::new(7, "frame construction", 5000);
    let corpus = charted_corpus();
    let mut satake_checked = false;
    for (name, g) in &corpus {
        let fc = match frame_construction(g) {
            Ok(fc) => fc,
            Err(e) => {
                c.check(false, format!("{name}: {e}"));
                continue;
            }
        };
        c.check(fc.purely_ineffective, format!("{name}: frames not PI"));
        c.check(fc.pullback_iso, format!("{name}: pullback iso fails"));
        c.check(
            fc.quotient.equivalence.is_equivalence(),
            format!("{name}: quotient equivalence fails"),
        );
        if name == "B(Z2)-swap-n2" {
            // The discrete Satake case: the frame groupoid has trivial
            // stabilizers, so it is (equivalent to) a set.
            c.check(
                equivalent_to_set(&fc.charted.base).is_some(),
                "Satake case has nontrivial stabilizers".to_string(),
            );
            satake_checked = true;
        }
    }
    c.check(satake_checked, "Satake case missing from corpus".to_string());
    c.detail(format!("{} charted inputs desingularized", corpus.len()));
    c.finish();
}

#[test]
fn criterion_08_band_trivialization() {
    let mut c = Criterion::new(8, "band trivialization", 10000);
    let z = FiniteGroup::cyclic;
    let (s3, _) = FiniteGroup::symmetric(3);
    let v4 = FiniteGroup::direct_product(&z(2), &z(2));
    let cases: Vec<(String, ChartedGroupoid, u32)> = vec![
        ("B(Z2)".into(), ChartedGroupoid::with_trivial_charts(b_group(&z(2))), 2),
        ("B(Z4)".into(), ChartedGroupoid::with_trivial_charts(b_group(&z(4))), 4),
        ("B(Z2xZ2)".into(), ChartedGroupoid::with_trivial_charts(b_group(&v4)), 4),
        ("B(S3)".into(), ChartedGroupoid::with_trivial_charts(b_group(&s3)), 1),
        (
            "B(Z2)+B(Z2)".into(),
            ChartedGroupoid::with_trivial_charts(b_group(&z(2)).disjoint_union(&b_group(&z(2)))),
            2,
        ),
    ];
    let mut tuples = 0usize;
    for (name, g, center_order) in &cases {
        let band = match band_trivialization(g, None) {
            Ok(b) => b,
            Err(e) => {
                c.check(false, format!("{name}: {e}"));
                continue;
            }
        };
        c.check(
            band.stabilizers_equal_center,
            format!("{name}: stabilizers differ from centers"),
        );
        c.check(
            band.center_group.order() == *center_order,
            format!("{name}: wrong center order {}", band.center_group.order()),
        );
        c.check(
            band.checks.all_hold(),
            format!("{name}: trivialization equivariance laws fail"),
        );
        c.check(
            band.quotient.equivalence.is_equivalence(),
            format!("{name}: quotient equivalence fails"),
        );
        tuples += band.checks.tuples_checked;
    }
    // Trivial-center reduction for T = S3.
    // (i) Trivial charts: K ≅ Aut(S3) alone; P is the single coarse class
    // and P ⋊ Aut(S3) ≃ B(S3).
    let charted = ChartedGroupoid::with_trivial_charts(b_group(&s3));
    match present_trivial_center(&charted) {
        Ok(sp) => {
            c.check(sp.points == 1, format!("n=1 set presentation has {} points", sp.points));
            c.check(
                sp.action.group.order() == 6,
                "n=1 acting group is not Aut(S3)".to_string(),
            );
            c.check(
                sp.equivalence.is_equivalence(),
                "n=1 set presentation not equivalent".to_string(),
            );
            let stab = sp.translation.stabilizer(Obj(0));
            c.check(
                are_isomorphic(&stab.group, &s3),
                "n=1 point stabilizer is not S3".to_string(),
            );
        }
        Err(e) => c.check(false, format!("n=1 set presentation: {e}")),
    }
    // (ii) Chart size 3 with trivial effects: the frame stage multiplies the
    // class count by 3! = 6, so P has 6 points per coarse class of G, with
    // K = Aut(S3) × Sym(3) and P ⋊ K ≃ G.
    let charted3 = charted_b_group(&s3, &vec![Perm::identity(3); 6]);
    match present_trivial_center(&charted3) {
        Ok(sp) => {
            c.check(sp.points == 6, format!("n=3 set presentation has {} points", sp.points));
            c.check(
                sp.action.group.order() == 36,
                "n=3 acting group is not Aut(S3) x Sym(3)".to_string(),
            );
            c.check(
                sp.equivalence.is_equivalence(),
                "n=3 set presentation not equivalent".to_string(),
            );
        }
        Err(e) => c.check(false, format!("n=3 set presentation: {e}")),
    }
    // (iii) Two coarse classes with T = S3: six torsor points per class.
    let two_classes = charted3.disjoint_union(&charted3);
    match present_trivial_center(&two_classes) {
        Ok(sp) => {
            c.check(
                sp.points == 12,
                format!("two-class set presentation has {} points", sp.points),
            );
            c.check(
                sp.equivalence.is_equivalence(),
                "two-class set presentation not equivalent".to_string(),
            );
        }
        Err(e) => c.check(false, format!("two-class set presentation: {e}")),
    }
    c.detail(format!(
        "{} bands certified, {tuples} trivialization tuples, S3 set presentations checked",
        cases.len()
    ));
    c.finish();
}

#[test]
fn criterion_09_presentation_theorem() {
    let mut c = Criterion::new(9, "presentation theorem", 30000);
    let dir = tempfile::tempdir().expect("tempdir");
    let mut presented = 0usize;
    let mut skipped = 0usize;
    for (name, g) in charted_corpus() {
        let cert = match present(&g) {
            Ok(cert) => cert,
            Err(PresentError::StabilizerMismatch { .. }) => {
                // Inputs failing the uniform-stabilizer hypothesis are not
                // presentable by this pipeline; the error names the stage.
                skipped += 1;
                continue;
            }
            Err(e) => {
                c.check(false, format!("{name}: {e}"));
                continue;
            }
        };
        c.check(
            cert.equivalence.is_equivalence(),
            format!("{name}: end-to-end equivalence fails"),
        );
        c.check(cert.purely_ineffective, format!("{name}: H not PI"));
        c.check(
            cert.coarse_bijective && cert.stabilizers_preserved,
            format!("{name}: invariants not preserved"),
        );
        // The certificate is re-checked from raw tables by the verifier.
        let path = dir.path().join(format!("cert-{presented}.cert"));
        std::fs::write(&path, write_cert(&cert_from_presentation(&cert))).expect("write");
        let out = Command::new(env!("CARGO_BIN_EXE_grpd"))
            .args(["verify", path.to_str().expect("utf8 path")])
            .output()
            .expect("binary runs");
        c.check(
            out.status.code() == Some(0),
            format!("{name}: verify exited {:?}", out.status.code()),
        );
        presented += 1;
    }
    c.check(presented >= 15, format!("only {presented} presentations"));
    c.detail(format!(
        "{presented} presentations certified and re-verified, {skipped} non-uniform inputs refused"
    ));
    c.finish();
}

/// All covers of an `m`-point base by at most `max_parts` distinct nonempty
/// subsets.
fn all_covers(m: u32, max_parts: usize) -> Vec<Cover> {
    let subsets: Vec<Vec<u32>> = (1..(1u32 << m))
        .map(|mask| (0..m).filter(|&i| mask & (1 << i) != 0).collect())
        .collect();
    let mut out = Vec::new();
    let mut combo: Vec<usize> = Vec::new();
    fn rec(
        subsets: &[Vec<u32>],
        m: u32,
        max_parts: usize,
        start: usize,
        combo: &mut Vec<usize>,
        out: &mut Vec<Cover>,
    ) {
        if !combo.is_empty() {
            let mut covered = vec![false; m as usize];
            for &i in combo.iter() {
                for &p in &subsets[i] {
                    covered[p as usize] = true;
                }
            }
            if covered.iter().all(|&b| b) {
                out.push(Cover::new(
                    m,
                    combo.iter().map(|&i| subsets[i].clone()).collect(),
                ));
            }
        }
        if combo.len() == max_parts {
            return;
        }
        for i in start..subsets.len() {
            combo.push(i);
            rec(subsets, m, max_parts, i + 1, combo, out);
            combo.pop();
        }
    }
    rec(&subsets, m, max_parts, 0, &mut combo, &mut out);
    out
}

#[test]
fn criterion_10_descent() {
    let mut c = Criterion::new(10, "descent and the stack property", 30000);
    let targets = vec![
        ("point", FiniteGroupoid::trivial(1)),
        ("B(Z2)", b_group(&FiniteGroup::cyclic(2))),
        ("B(Z3)", b_group(&FiniteGroup::cyclic(3))),
    ];
    let mut runs = 0usize;
    let mut data_total = 0usize;
    for m in 1..=3u32 {
        for cover in all_covers(m, 3) {
            for (name, target) in &targets {
                match check_stack_property(&cover, target, 0, 16) {
                    Ok(report) => {
                        c.check(report.exhaustive, format!("{name} |M|={m}: not exhaustive"));
                        c.check(
                            report.passed(),
                            format!("{name} |M|={m} cover {:?}: {report}", cover.parts),
                        );
                        data_total += report.data_count;
                    }
                    Err(e) => c.check(false, format!("{name} |M|={m}: {e}")),
                }
                runs += 1;
            }
        }
    }
    // The negated-transition fixture is rejected with a triple-overlap
    // witness, both by the validator and by glue.
    let fixture = std::path::PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures/desc_bad.desc");
    let text = std::fs::read_to_string(&fixture).expect("fixture exists");
    match parse(&text).expect("fixture parses") {
        ParsedFile::Descent(file) => {
            let report = validate_descent(&file.datum);
            c.check(!report.is_valid(), "negated fixture validates".to_string());
            c.check(
                report
                    .violations
                    .iter()
                    .any(|v| matches!(v, DescentViolation::Cocycle { .. })),
                "no triple-overlap witness".to_string(),
            );
            c.check(glue(&file.datum).is_err(), "negated fixture glues".to_string());
        }
        _ => c.check(false, "fixture is not a descent file".to_string()),
    }
    c.detail(format!(
        "{runs} exhaustive stack checks over {data_total} descent data"
    ));
    c.finish();
}

#[test]
fn criterion_11_determinism() {
    let mut c = Criterion::new(11, "determinism", 60000);
    let dir = tempfile::tempdir().expect("tempdir");
    let fixture = |name: &str| {
        std::path::PathBuf::from(env!("CARGO_MANIFEST_DIR"))
            .join("tests/fixtures")
            .join(name)
    };
    // Library level: two presentations serialize identically.
    let charted = ChartedGroupoid::with_trivial_charts(b_group(&FiniteGroup::cyclic(4)));
    let one = write_cert(&cert_from_presentation(&present(&charted).expect("presents")));
    let two = write_cert(&cert_from_presentation(&present(&charted).expect("presents")));
    c.check(one == two, "library certificates differ".to_string());
    // Binary level: full jobs, byte for byte (reports and certificates).
    let jobs: Vec<(&str, Vec<String>)> = vec![
        (
            "present",
            vec![
                "present".into(),
                fixture("b_z4_swap.grpd").to_string_lossy().into_owned(),
            ],
        ),
        (
            "stackcheck",
            vec![
                "stackcheck".into(),
                fixture("cover2.cover").to_string_lossy().into_owned(),
                fixture("b_z2_plain.grpd").to_string_lossy().into_owned(),
                "--seed".into(),
                "42".into(),
            ],
        ),
        (
            "equiv",
            vec![
                "equiv".into(),
                fixture("pair3.grpd").to_string_lossy().into_owned(),
                fixture("point.grpd").to_string_lossy().into_owned(),
            ],
        ),
    ];
    for (name, args) in &jobs {
        let run = |cert_name: &str| {
            let mut full = args.clone();
            let cert_path = dir.path().join(cert_name);
            if *name == "present" {
                full.push("--out".into());
                full.push(cert_path.to_string_lossy().into_owned());
            }
            let out = Command::new(env!("CARGO_BIN_EXE_grpd"))
                .args(&full)
                .output()
                .expect("binary runs");
            let stdout: String = String::from_utf8(out.stdout)
                .expect("utf8")
                .lines()
                .filter(|l| !l.starts_with("wrote "))
                .map(|l| format!("{l}\n"))
                .collect();
            let cert = std::fs::read(&cert_path).unwrap_or_default();
            (stdout, cert)
        };
        let (report1, cert1) = run(&format!("{name}-1.cert"));
        let (report2, cert2) = run(&format!("{name}-2.cert"));
        c.check(report1 == report2, format!("{name}: reports differ"));
        c.check(cert1 == cert2, format!("{name}: certificates differ"));
    }
    c.detail("library and binary outputs byte-identical across reruns".to_string());
    c.finish();
}

#[test]
fn acceptance_suite_banner() {
    // Keep a stable, greppable banner with the pinned budgets.
    let budgets: BTreeMap<u32, &str> = [
        (1, "1s"),
        (2, "1s"),
        (3, "1s"),
        (4, "5s"),
        (5, "1s"),
        (6, "60s"),
        (7, "5s"),
        (8, "10s"),
        (9, "30s"),
        (10, "30s"),
        (11, "60s"),
    ]
    .into_iter()
    .collect();
    println!("acceptance: 11 criteria, budgets {budgets:?} (asserted in release builds)");
}
