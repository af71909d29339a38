//! A deterministic corpus of groups, groupoids, and charted groupoids.
//!
//! Test suites and the acceptance harness share these builders. The group
//! catalog covers every isomorphism type of order at most 12 and a spread of
//! standard groups up to order 24; action families combine exhaustive
//! homomorphism enumeration into small symmetric groups with the natural and
//! regular actions.

use crate::action::{translation_groupoid, SetAction, Side};
use crate::charted::ChartedGroupoid;
use crate::group::FiniteGroup;
use crate::groupoid::{b_group, FiniteGroupoid};
use crate::perm::Perm;

/// A named group, with a faithful permutation realization when one is cheap.
#[derive(Clone, Debug)]
pub struct CatalogGroup {
    pub name: String,
    pub group: FiniteGroup,
    /// Element-indexed permutations of a natural action, when available.
    pub natural_perms: Option<Vec<Perm>>,
}

/// The dihedral group of order `2n` acting on `n` vertices (for `n >= 3`).
pub fn dihedral(n: usize) -> (FiniteGroup, Vec<Perm>) {
    assert!(n >= 3);
    let rot = Perm::cycle(n);
    let refl = Perm::from_images((0..n as u32).map(|i| (n as u32 - i) % n as u32).collect())
        .expect("reflection is a bijection");
    FiniteGroup::permutation_group(n, &[rot, refl])
}

/// The alternating group A₄ on 4 letters.
pub fn alternating4() -> (FiniteGroup, Vec<Perm>) {
    let three_cycle = Perm::from_images(vec![1, 2, 0, 3]).unwrap();
    let double_swap = Perm::from_images(vec![1, 0, 3, 2]).unwrap();
    FiniteGroup::permutation_group(4, &[three_cycle, double_swap])
}

/// The dicyclic group of order `4n` (`n = 2` is the quaternion group Q₈).
pub fn dicyclic(n: u32) -> FiniteGroup {
    assert!(n >= 1);
    let m = 2 * n; // order of the cyclic part
    let order = 4 * n;
    let idx = |i: u32, j: u32| (j * m + i) as usize;
    let mut table = vec![vec![0u32; order as usize]; order as usize];
    for i in 0..m {
        for j in 0..2u32 {
            for k in 0..m {
                for l in 0..2u32 {
                    let (ri, rj) = if j == 0 {
                        ((i + k) % m, l)
                    } else if l == 0 {
                        ((i + m - k) % m, 1)
                    } else {
                        ((i + m - k + n) % m, 0)
                    };
                    table[idx(i, j)][idx(k, l)] = idx(ri, rj) as u32;
                }
            }
        }
    }
    FiniteGroup::from_mul_table(&table).expect("dicyclic normal form is a group")
}

fn cyclic_catalog(n: u32) -> CatalogGroup {
    let perms = (0..n)
        .map(|k| {
            Perm::from_images((0..n).map(|i| (i + k) % n).collect()).unwrap()
        })
        .collect();
    CatalogGroup {
        name: format!("Z{n}"),
        group: FiniteGroup::cyclic(n),
        natural_perms: Some(perms),
    }
}

fn product_catalog(name: &str, a: &FiniteGroup, b: &FiniteGroup) -> CatalogGroup {
    CatalogGroup {
        name: name.to_string(),
        group: FiniteGroup::direct_product(a, b),
        natural_perms: None,
    }
}

/// Every isomorphism type of order at most 12 (24 groups).
pub fn groups_up_to_order_12() -> Vec<CatalogGroup> {
    let z = FiniteGroup::cyclic;
    let mut out = Vec::new();
    out.push(CatalogGroup {
        name: "1".into(),
        group: FiniteGroup::trivial(),
        natural_perms: None,
    });
    for n in [2u32, 3, 4] {
        out.push(cyclic_catalog(n));
    }
    out.push(product_catalog("Z2xZ2", &z(2), &z(2)));
    for n in [5u32, 6] {
        out.push(cyclic_catalog(n));
    }
    {
        let (s3, perms) = FiniteGroup::symmetric(3);
        out.push(CatalogGroup {
            name: "S3".into(),
            group: s3,
            natural_perms: Some(perms),
        });
    }
    out.push(cyclic_catalog(7));
    out.push(cyclic_catalog(8));
    out.push(product_catalog("Z4xZ2", &z(4), &z(2)));
    out.push(product_catalog("Z2xZ2xZ2", &FiniteGroup::direct_product(&z(2), &z(2)), &z(2)));
    {
        let (d4, perms) = dihedral(4);
        out.push(CatalogGroup {
            name: "D4".into(),
            group: d4,
            natural_perms: Some(perms),
        });
    }
    out.push(CatalogGroup {
        name: "Q8".into(),
        group: dicyclic(2),
        natural_perms: None,
    });
    out.push(cyclic_catalog(9));
    out.push(product_catalog("Z3xZ3", &z(3), &z(3)));
    out.push(cyclic_catalog(10));
    {
        let (d5, perms) = dihedral(5);
        out.push(CatalogGroup {
            name: "D5".into(),
            group: d5,
            natural_perms: Some(perms),
        });
    }
    out.push(cyclic_catalog(11));
    out.push(cyclic_catalog(12));
    out.push(product_catalog("Z6xZ2", &z(6), &z(2)));
    {
        let (d6, perms) = dihedral(6);
        out.push(CatalogGroup {
            name: "D6".into(),
            group: d6,
            natural_perms: Some(perms),
        });
    }
    {
        let (a4, perms) = alternating4();
        out.push(CatalogGroup {
            name: "A4".into(),
            group: a4,
            natural_perms: Some(perms),
        });
    }
    out.push(CatalogGroup {
        name: "Dic3".into(),
        group: dicyclic(3),
        natural_perms: None,
    });
    out
}

/// Standard groups of order 13 to 24 extending the catalog (not a complete
/// classification): cyclic and dihedral series, S₄, Q₁₆, Dic₅, and products.
pub fn groups_13_to_24() -> Vec<CatalogGroup> {
    let z = FiniteGroup::cyclic;
    let mut out = Vec::new();
    for n in 13..=24u32 {
        out.push(cyclic_catalog(n));
    }
    for n in [7usize, 8, 9, 10, 11, 12] {
        let (d, perms) = dihedral(n);
        out.push(CatalogGroup {
            name: format!("D{n}"),
            group: d,
            natural_perms: Some(perms),
        });
    }
    {
        let (s4, perms) = FiniteGroup::symmetric(4);
        out.push(CatalogGroup {
            name: "S4".into(),
            group: s4,
            natural_perms: Some(perms),
        });
    }
    out.push(CatalogGroup {
        name: "Q16".into(),
        group: dicyclic(4),
        natural_perms: None,
    });
    out.push(CatalogGroup {
        name: "Dic5".into(),
        group: dicyclic(5),
        natural_perms: None,
    });
    let (a4, _) = alternating4();
    out.push(product_catalog("A4xZ2", &a4, &z(2)));
    out.push(product_catalog("Z4xZ4", &z(4), &z(4)));
    out.push(product_catalog(
        "Z2^4",
        &FiniteGroup::direct_product(&z(2), &z(2)),
        &FiniteGroup::direct_product(&z(2), &z(2)),
    ));
    let (s3, _) = FiniteGroup::symmetric(3);
    out.push(product_catalog("Z3xS3", &z(3), &s3));
    out.push(product_catalog("S3xZ2", &s3, &z(2)));
    out
}

/// All homomorphisms `K -> Sym(m)`, each as an element-indexed image table.
/// Backtracks over generator images with order pruning and closure.
pub fn all_homs_to_sym(k: &FiniteGroup, m: usize) -> Vec<Vec<Perm>> {
    let gens = k.generating_sequence();
    let sym = Perm::all(m);
    let mut map: Vec<Option<Perm>> = vec![None; k.order() as usize];
    map[k.identity() as usize] = Some(Perm::identity(m));
    let mut out = Vec::new();

    fn perm_order(p: &Perm) -> u32 {
        let mut q = p.clone();
        let mut n = 1;
        while !q.is_identity() {
            q = q.compose(p);
            n += 1;
        }
        n
    }

    fn close(k: &FiniteGroup, map: &mut [Option<Perm>]) -> bool {
        loop {
            let mut changed = false;
            let known: Vec<u32> = (0..k.order()).filter(|&x| map[x as usize].is_some()).collect();
            for &x in &known {
                for &y in &known {
                    let xy = k.mul(x, y);
                    let img = map[x as usize]
                        .as_ref()
                        .unwrap()
                        .compose(map[y as usize].as_ref().unwrap());
                    match &map[xy as usize] {
                        None => {
                            map[xy as usize] = Some(img);
                            changed = true;
                        }
                        Some(existing) => {
                            if *existing != img {
                                return false;
                            }
                        }
                    }
                }
            }
            if !changed {
                return true;
            }
        }
    }

    fn rec(
        k: &FiniteGroup,
        gens: &[u32],
        sym: &[Perm],
        map: &mut Vec<Option<Perm>>,
        out: &mut Vec<Vec<Perm>>,
    ) {
        let next = gens.iter().copied().find(|&g| map[g as usize].is_none());
        let g = match next {
            Some(g) => g,
            None => {
                if map.iter().all(|v| v.is_some()) {
                    out.push(map.iter().map(|v| v.clone().unwrap()).collect());
                }
                return;
            }
        };
        let g_order = k.element_order(g);
        for p in sym {
            if !g_order.is_multiple_of(perm_order(p)) {
                continue;
            }
            let saved = map.clone();
            map[g as usize] = Some(p.clone());
            if close(k, map) {
                rec(k, gens, sym, map, out);
            }
            *map = saved;
        }
    }

    rec(k, &gens, &sym, &mut map, &mut out);
    out.sort();
    out
}

/// Named translation groupoids for all catalog groups of order at most 12 on
/// sets of size at most 6: the trivial action on every size, every
/// homomorphism into `Sym(m)` for `m <= 3`, the natural action when its
/// degree fits, and the regular action when the order fits.
pub fn translation_corpus() -> Vec<(String, FiniteGroupoid)> {
    let mut out = Vec::new();
    for cg in groups_up_to_order_12() {
        let k = &cg.group;
        for m in 1..=6u32 {
            let action = SetAction::trivial(k.clone(), m, Side::Right);
            out.push((
                format!("{}-trivial-{m}", cg.name),
                translation_groupoid(&action).expect("right action"),
            ));
        }
        for m in 1..=3usize {
            for (i, hom) in all_homs_to_sym(k, m).into_iter().enumerate() {
                let action = SetAction::from_hom(k.clone(), &hom, Side::Right);
                out.push((
                    format!("{}-hom{m}-{i}", cg.name),
                    translation_groupoid(&action).expect("right action"),
                ));
            }
        }
        if let Some(perms) = &cg.natural_perms {
            let degree = perms[0].degree();
            if (4..=6).contains(&degree) {
                let action = SetAction::from_hom(k.clone(), perms, Side::Right);
                out.push((
                    format!("{}-natural", cg.name),
                    translation_groupoid(&action).expect("right action"),
                ));
            }
        }
        if k.order() <= 6 {
            // Regular action: ρ(a) = (x -> x·a⁻¹) is a homomorphism, and the
            // induced right action is x·a = x a.
            let images: Vec<Perm> = k
                .elements()
                .map(|a| {
                    Perm::from_images(k.elements().map(|x| k.mul(x, k.inv(a))).collect())
                        .unwrap()
                })
                .collect();
            let action = SetAction::from_hom(k.clone(), &images, Side::Right);
            out.push((
                format!("{}-regular", cg.name),
                translation_groupoid(&action).expect("right action"),
            ));
        }
    }
    out
}

/// One-object groupoids for every catalog group of order at most 24.
pub fn b_group_corpus() -> Vec<(String, FiniteGroupoid)> {
    let mut out = Vec::new();
    for cg in groups_up_to_order_12().into_iter().chain(groups_13_to_24()) {
        out.push((format!("B({})", cg.name), b_group(&cg.group)));
    }
    out
}

/// A charted groupoid from a translation groupoid and a chart homomorphism:
/// the effect of `(x, k)` is `ρ(k)`.
pub fn charted_translation(
    k: &FiniteGroup,
    action: &SetAction,
    chart_hom: &[Perm],
) -> ChartedGroupoid {
    let g = translation_groupoid(action).expect("right action");
    let n = chart_hom[0].degree();
    let effects = (0..action.carrier)
        .flat_map(|_| (0..k.order()).map(|e| chart_hom[e as usize].clone()))
        .collect();
    ChartedGroupoid::new(g, n, effects)
}

/// A charted one-object groupoid from a chart homomorphism `K -> Sym(n)`.
pub fn charted_b_group(k: &FiniteGroup, chart_hom: &[Perm]) -> ChartedGroupoid {
    let g = b_group(k);
    let n = chart_hom[0].degree();
    let effects = (0..k.order()).map(|e| chart_hom[e as usize].clone()).collect();
    ChartedGroupoid::new(g, n, effects)
}

/// Named charted corpus: chart sizes 1 to 3, mixing purely ineffective,
/// effective, and mixed examples across several shapes.
pub fn charted_corpus() -> Vec<(String, ChartedGroupoid)> {
    let z = FiniteGroup::cyclic;
    let (s3, s3_perms) = FiniteGroup::symmetric(3);
    let v4 = FiniteGroup::direct_product(&z(2), &z(2));
    let swap2 = Perm::transposition(2, 0, 1);
    let mut out: Vec<(String, ChartedGroupoid)> = Vec::new();
    // Chart size 1: everything is purely ineffective.
    for (name, g) in [
        ("point", FiniteGroupoid::trivial(1)),
        ("set3", FiniteGroupoid::trivial(3)),
        ("pair2", FiniteGroupoid::pair(2)),
        ("pair3", FiniteGroupoid::pair(3)),
        ("B(Z2)", b_group(&z(2))),
        ("B(Z3)", b_group(&z(3))),
        ("B(Z4)", b_group(&z(4))),
        ("B(Z2xZ2)", b_group(&v4)),
        ("B(S3)", b_group(&s3)),
    ] {
        out.push((
            format!("{name}-n1"),
            ChartedGroupoid::with_trivial_charts(g),
        ));
    }
    {
        let swap_action = SetAction::from_hom(
            z(2),
            &[Perm::identity(2), swap2.clone()],
            Side::Right,
        );
        let g = translation_groupoid(&swap_action).unwrap();
        out.push((
            "Z2-swap-n1".into(),
            ChartedGroupoid::with_trivial_charts(g),
        ));
    }
    // Chart size 2.
    let z2_hom2 = vec![Perm::identity(2), swap2.clone()];
    out.push(("B(Z2)-swap-n2".into(), charted_b_group(&z(2), &z2_hom2)));
    let z4_hom2: Vec<Perm> = (0..4)
        .map(|k| if k % 2 == 0 { Perm::identity(2) } else { swap2.clone() })
        .collect();
    out.push(("B(Z4)-swap-n2".into(), charted_b_group(&z(4), &z4_hom2)));
    let v4_hom2: Vec<Perm> = (0..4)
        .map(|k| if k / 2 == 0 { Perm::identity(2) } else { swap2.clone() })
        .collect();
    out.push(("B(Z2xZ2)-half-n2".into(), charted_b_group(&v4, &v4_hom2)));
    // S3 through the sign character: kernel A3.
    let sign: Vec<Perm> = s3_perms
        .iter()
        .map(|p| {
            let mut parity = 0;
            for i in 0..3u32 {
                for j in (i + 1)..3u32 {
                    if p.apply(i) > p.apply(j) {
                        parity ^= 1;
                    }
                }
            }
            if parity == 0 { Perm::identity(2) } else { swap2.clone() }
        })
        .collect();
    out.push(("B(S3)-sign-n2".into(), charted_b_group(&s3, &sign)));
    out.push((
        "B(Z2)-trivial-n2".into(),
        charted_b_group(&z(2), &[Perm::identity(2), Perm::identity(2)]),
    ));
    {
        // Translation Z/4 on two points through the quotient, charted by the
        // same swap character: stabilizer arrows with odd k act effectively.
        let z4_action = SetAction::from_hom(z(4), &z4_hom2, Side::Right);
        out.push((
            "Z4-quotient-swap-n2".into(),
            charted_translation(&z(4), &z4_action, &z4_hom2),
        ));
    }
    {
        let trivial_action = SetAction::trivial(z(2), 2, Side::Right);
        out.push((
            "Z2-trivial-carrier2-swap-n2".into(),
            charted_translation(&z(2), &trivial_action, &z2_hom2),
        ));
    }
    // Chart size 3.
    out.push(("B(S3)-natural-n3".into(), charted_b_group(&s3, &s3_perms)));
    let z3_rot: Vec<Perm> = (0..3).map(|k| {
        let rot = Perm::cycle(3);
        let mut p = Perm::identity(3);
        for _ in 0..k {
            p = rot.compose(&p);
        }
        p
    }).collect();
    out.push(("B(Z3)-rotation-n3".into(), charted_b_group(&z(3), &z3_rot)));
    let z6_rot: Vec<Perm> = (0..6).map(|k| {
        let rot = Perm::cycle(3);
        let mut p = Perm::identity(3);
        for _ in 0..(k % 3) {
            p = rot.compose(&p);
        }
        p
    }).collect();
    out.push(("B(Z6)-rotation-n3".into(), charted_b_group(&z(6), &z6_rot)));
    out.push((
        "B(S3)-trivial-n3".into(),
        charted_b_group(&s3, &vec![Perm::identity(3); 6]),
    ));
    out.push((
        "B(Z2)-trivial-n3".into(),
        charted_b_group(&z(2), &vec![Perm::identity(3); 2]),
    ));
    // Disjoint unions.
    let b_z2_n1 = ChartedGroupoid::with_trivial_charts(b_group(&z(2)));
    out.push(("B(Z2)+B(Z2)-n1".into(), b_z2_n1.disjoint_union(&b_z2_n1)));
    let b_z4_n2 = charted_b_group(&z(4), &z4_hom2);
    out.push(("B(Z4)-swap+B(Z4)-swap-n2".into(), b_z4_n2.disjoint_union(&b_z4_n2)));
    let pt_n2 = charted_b_group(&FiniteGroup::trivial(), &[Perm::identity(2)]);
    out.push(("B(Z4)-swap+point-n2".into(), b_z4_n2.disjoint_union(&pt_n2)));
    let b_s3_n3 = charted_b_group(&s3, &vec![Perm::identity(3); 6]);
    out.push((
        "B(S3)-trivial+B(S3)-trivial-n3".into(),
        b_s3_n3.disjoint_union(&b_s3_n3),
    ));
    out
}

/// Small groupoids with at most 12 arrows, for pairwise equivalence testing.
pub fn small_groupoid_corpus() -> Vec<(String, FiniteGroupoid)> {
    let z = FiniteGroup::cyclic;
    let (s3, _) = FiniteGroup::symmetric(3);
    let v4 = FiniteGroup::direct_product(&z(2), &z(2));
    let mut out: Vec<(String, FiniteGroupoid)> = vec![
        ("point".into(), FiniteGroupoid::trivial(1)),
        ("set2".into(), FiniteGroupoid::trivial(2)),
        ("set3".into(), FiniteGroupoid::trivial(3)),
        ("pair2".into(), FiniteGroupoid::pair(2)),
        ("pair3".into(), FiniteGroupoid::pair(3)),
        ("B(Z2)".into(), b_group(&z(2))),
        ("B(Z3)".into(), b_group(&z(3))),
        ("B(Z4)".into(), b_group(&z(4))),
        ("B(Z2xZ2)".into(), b_group(&v4)),
        ("B(Z5)".into(), b_group(&z(5))),
        ("B(Z6)".into(), b_group(&z(6))),
        ("B(S3)".into(), b_group(&s3)),
        ("B(Z12)".into(), b_group(&z(12))),
    ];
    {
        let swap = SetAction::from_hom(
            z(2),
            &[Perm::identity(2), Perm::transposition(2, 0, 1)],
            Side::Right,
        );
        out.push(("Z2-swap".into(), translation_groupoid(&swap).unwrap()));
    }
    {
        let rot = Perm::cycle(3);
        let images = vec![Perm::identity(3), rot.clone(), rot.compose(&rot)];
        let free3 = SetAction::from_hom(z(3), &images, Side::Right);
        out.push(("Z3-free3".into(), translation_groupoid(&free3).unwrap()));
    }
    {
        let swap = Perm::transposition(2, 0, 1);
        let images: Vec<Perm> = (0..4)
            .map(|k| if k % 2 == 0 { Perm::identity(2) } else { swap.clone() })
            .collect();
        let act = SetAction::from_hom(z(4), &images, Side::Right);
        out.push(("Z4-quotient2".into(), translation_groupoid(&act).unwrap()));
    }
    {
        let act = SetAction::trivial(z(2), 3, Side::Right);
        out.push(("Z2-trivial3".into(), translation_groupoid(&act).unwrap()));
    }
    out.push((
        "B(Z2)+point".into(),
        b_group(&z(2)).disjoint_union(&FiniteGroupoid::trivial(1)),
    ));
    out.push((
        "point+B(Z2)".into(),
        FiniteGroupoid::trivial(1).disjoint_union(&b_group(&z(2))),
    ));
    out.push((
        "B(Z3)+B(Z2)".into(),
        b_group(&z(3)).disjoint_union(&b_group(&z(2))),
    ));
    out.push((
        "pair2+pair2".into(),
        FiniteGroupoid::pair(2).disjoint_union(&FiniteGroupoid::pair(2)),
    ));
    out
}
