//! Charted groupoids: the discrete stand-in for étale structure.
//!
//! Every object carries a chart — a finite set of uniform cardinality `n`,
//! identified with `{0, .., n-1}` — and every arrow `g: x -> y` carries a
//! chart bijection `λ_g: L(x) -> L(y)`. Functoriality of `g -> λ_g` is the
//! chart-level shadow of the strict homomorphism into the groupoid of germs:
//! a germ at a point is modelled by the whole local datum, a bijection of
//! charts, not by a partial map.
//!
//! On top of this sit the ineffective stabilizers `S⁰` (stabilizer arrows
//! whose effect is the identity), their conjugation local system,
//! effectivization, and the purely-ineffective / effective predicates.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::bibundle::{from_strict_hom, is_essential_equivalence, Bibundle, EquivalenceCheck};
use crate::group::{isomorphism, FiniteGroup};
use crate::groupoid::{Arr, CoarseQuotient, FiniteGroupoid, Obj, StabilizerGroup};
use crate::hom::StrictHom;
use crate::perm::Perm;

/// A finite groupoid whose arrows carry chart bijections.
#[derive(Clone, PartialEq, Eq)]
pub struct ChartedGroupoid {
    pub base: FiniteGroupoid,
    chart_size: usize,
    effects: Vec<Perm>,
}

/// A chart-functoriality violation, with a witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ChartViolation {
    WrongDegree { g: Arr },
    UnitEffect { x: Obj },
    CompEffect { g: Arr, h: Arr },
    InvEffect { g: Arr },
}

impl fmt::Display for ChartViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use ChartViolation::*;
        match self {
            WrongDegree { g } => write!(f, "effect of {g:?} has the wrong chart size"),
            UnitEffect { x } => write!(f, "effect of the unit at {x:?} is not the identity"),
            CompEffect { g, h } => write!(f, "effect of comp({g:?}, {h:?}) is not the composite"),
            InvEffect { g } => write!(f, "effect of {g:?}^-1 is not the inverse effect"),
        }
    }
}

/// Validation outcome for a charted groupoid: base-groupoid report plus
/// chart functoriality violations.
#[derive(Clone, Debug)]
pub struct ChartedReport {
    pub base: crate::groupoid::ValidationReport,
    pub charts: Vec<ChartViolation>,
}

impl ChartedReport {
    pub fn is_valid(&self) -> bool {
        self.base.is_valid() && self.charts.is_empty()
    }
}

impl ChartedGroupoid {
    /// Attaches effects to a groupoid; all effects must have degree
    /// `chart_size` (mixed chart sizes are rejected up front, since one
    /// structure group `Sym(n)` must act on all frames).
    pub fn new(base: FiniteGroupoid, chart_size: usize, effects: Vec<Perm>) -> ChartedGroupoid {
        assert!(chart_size >= 1, "chart size must be at least 1");
        assert_eq!(effects.len(), base.arrow_count() as usize);
        assert!(
            effects.iter().all(|p| p.degree() == chart_size),
            "all chart effects must have degree {chart_size}"
        );
        ChartedGroupoid {
            base,
            chart_size,
            effects,
        }
    }

    /// Charts of size 1: every arrow acts trivially.
    pub fn with_trivial_charts(base: FiniteGroupoid) -> ChartedGroupoid {
        let effects = vec![Perm::identity(1); base.arrow_count() as usize];
        ChartedGroupoid {
            base,
            chart_size: 1,
            effects,
        }
    }

    pub fn chart_size(&self) -> usize {
        self.chart_size
    }

    pub fn effect(&self, g: Arr) -> &Perm {
        &self.effects[g.idx()]
    }

    pub fn effects(&self) -> &[Perm] {
        &self.effects
    }

    pub fn validate(&self) -> ChartedReport {
        let base = self.base.validate();
        let mut charts = Vec::new();
        if !base.is_valid() {
            return ChartedReport { base, charts };
        }
        for g in self.base.arrows() {
            if self.effect(g).degree() != self.chart_size {
                charts.push(ChartViolation::WrongDegree { g });
            }
        }
        if !charts.is_empty() {
            return ChartedReport { base, charts };
        }
        for x in self.base.objects() {
            if !self.effect(self.base.unit(x)).is_identity() {
                charts.push(ChartViolation::UnitEffect { x });
            }
        }
        for g in self.base.arrows() {
            if self.effect(self.base.inv(g)) != &self.effect(g).inverse() {
                charts.push(ChartViolation::InvEffect { g });
            }
            for h in self.base.arrows() {
                if let Some(gh) = self.base.compose(g, h) {
                    if self.effect(gh) != &self.effect(g).compose(self.effect(h)) {
                        charts.push(ChartViolation::CompEffect { g, h });
                    }
                }
            }
        }
        ChartedReport { base, charts }
    }

    /// Disjoint union; both sides must share the chart size.
    pub fn disjoint_union(&self, other: &ChartedGroupoid) -> ChartedGroupoid {
        assert_eq!(self.chart_size, other.chart_size);
        let base = self.base.disjoint_union(&other.base);
        let mut effects = self.effects.clone();
        effects.extend(other.effects.iter().cloned());
        ChartedGroupoid {
            base,
            chart_size: self.chart_size,
            effects,
        }
    }
}

impl fmt::Debug for ChartedGroupoid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "ChartedGroupoid(objects={}, arrows={}, chart={})",
            self.base.object_count(),
            self.base.arrow_count(),
            self.chart_size
        )
    }
}

/// A local system of finite groups over the objects: the fiber groups with
/// their conjugation transport along arrows.
#[derive(Clone, Debug)]
pub struct LocalSystem {
    /// Per object: the fiber as a stabilizer subgroup (arrows + group).
    pub fibers: Vec<StabilizerGroup>,
    /// Per arrow `h: y -> x`: the transport `fiber(x) -> fiber(y)`,
    /// `g -> h⁻¹ g h`, as an index map on fiber elements.
    pub transport: BTreeMap<Arr, Vec<u32>>,
}

impl LocalSystem {
    pub fn fiber(&self, x: Obj) -> &StabilizerGroup {
        &self.fibers[x.idx()]
    }
}

/// The ineffective stabilizers `S⁰`: per object, the stabilizer arrows whose
/// chart effect is the identity, with conjugation transport along every arrow.
pub fn ineffective_stabilizers(g: &ChartedGroupoid) -> LocalSystem {
    let base = &g.base;
    let mut fibers = Vec::with_capacity(base.object_count() as usize);
    for x in base.objects() {
        let arrows: Vec<Arr> = base
            .stabilizer_arrows(x)
            .into_iter()
            .filter(|&a| g.effect(a).is_identity())
            .collect();
        let index: BTreeMap<Arr, u32> = arrows
            .iter()
            .enumerate()
            .map(|(i, &a)| (a, i as u32))
            .collect();
        let table: Vec<Vec<u32>> = arrows
            .iter()
            .map(|&a| arrows.iter().map(|&b| index[&base.comp(a, b)]).collect())
            .collect();
        let group = FiniteGroup::from_mul_table(&table)
            .expect("ineffective stabilizers form a group");
        fibers.push(StabilizerGroup { arrows, group });
    }
    let mut transport = BTreeMap::new();
    for h in base.arrows() {
        let from = &fibers[base.tgt(h).idx()];
        let to = &fibers[base.src(h).idx()];
        let map = from
            .arrows
            .iter()
            .map(|&a| {
                let conj = base.comp(base.comp(base.inv(h), a), h);
                to.index_of(conj)
                    .expect("conjugate of an ineffective stabilizer is ineffective")
            })
            .collect();
        transport.insert(h, map);
    }
    LocalSystem { fibers, transport }
}

/// Exhaustive-check counts for the equivariance of `S⁰`.
#[derive(Clone, Debug, Default)]
pub struct S0EquivarianceCert {
    /// Conjugations `h⁻¹ g h` checked to stay in `S⁰`.
    pub conjugations: usize,
    /// Normality witnesses checked (`S⁰_x` normal in `S_x`).
    pub normality: usize,
    /// Per-arrow checks that transport is a group isomorphism.
    pub transports: usize,
    /// Pairs of same-class fibers checked isomorphic.
    pub fiber_isos: usize,
}

/// Verifies, arrow by arrow, that conjugation preserves `S⁰` (the discrete
/// content of equivariance), that each fiber is normal in its stabilizer,
/// that transports are group isomorphisms, and that fibers on one coarse
/// class are isomorphic. A failure is impossible for valid charted input and
/// panics with a witness.
pub fn check_s0_equivariance(g: &ChartedGroupoid) -> S0EquivarianceCert {
    let base = &g.base;
    let system = ineffective_stabilizers(g);
    let mut cert = S0EquivarianceCert::default();
    for h in base.arrows() {
        let fiber = &system.fibers[base.tgt(h).idx()];
        for &a in &fiber.arrows {
            let conj = base.comp(base.comp(base.inv(h), a), h);
            assert!(
                g.effect(conj).is_identity(),
                "conjugation of {a:?} along {h:?} left S0"
            );
            cert.conjugations += 1;
        }
    }
    for x in base.objects() {
        let stab = base.stabilizer(x);
        let fiber = &system.fibers[x.idx()];
        for &s in &stab.arrows {
            for &a in &fiber.arrows {
                let conj = base.comp(base.comp(base.inv(s), a), s);
                assert!(
                    fiber.index_of(conj).is_some(),
                    "S0 at {x:?} is not normal: {a:?} conjugated by {s:?}"
                );
                cert.normality += 1;
            }
        }
    }
    for (h, map) in &system.transport {
        let from = &system.fibers[base.tgt(*h).idx()];
        let to = &system.fibers[base.src(*h).idx()];
        // Transport must be a bijective homomorphism.
        let mut seen = vec![false; to.arrows.len()];
        for &i in map {
            assert!(!seen[i as usize], "transport along {h:?} is not injective");
            seen[i as usize] = true;
        }
        for a in from.group.elements() {
            for b in from.group.elements() {
                assert_eq!(
                    map[from.group.mul(a, b) as usize],
                    to.group.mul(map[a as usize], map[b as usize]),
                    "transport along {h:?} is not a homomorphism"
                );
            }
        }
        cert.transports += 1;
    }
    let coarse = base.coarse_quotient();
    for class in &coarse.classes {
        let rep = &system.fibers[class[0].idx()];
        for &x in &class[1..] {
            assert!(
                isomorphism(&rep.group, &system.fibers[x.idx()].group).is_some(),
                "fibers at {:?} and {x:?} are not isomorphic",
                class[0]
            );
            cert.fiber_isos += 1;
        }
    }
    cert
}

/// The effectivization: same objects, arrows identified when they share
/// source, target, and chart effect. Returns the quotient and the class map.
pub fn effectivization(g: &ChartedGroupoid) -> (ChartedGroupoid, StrictHom) {
    let base = &g.base;
    // Classes keyed by (src, tgt, effect), ordered canonically by that key,
    // so repeated runs emit identical ids.
    let mut class_keys: Vec<(Obj, Obj, Perm)> = Vec::new();
    let mut index: BTreeMap<(Obj, Obj, Perm), u32> = BTreeMap::new();
    for a in base.arrows() {
        let key = (base.src(a), base.tgt(a), g.effect(a).clone());
        if let std::collections::btree_map::Entry::Vacant(slot) = index.entry(key.clone()) {
            slot.insert(0);
            class_keys.push(key);
        }
    }
    class_keys.sort();
    for (i, key) in class_keys.iter().enumerate() {
        index.insert(key.clone(), i as u32);
    }
    let class_of: Vec<u32> = base
        .arrows()
        .map(|a| index[&(base.src(a), base.tgt(a), g.effect(a).clone())])
        .collect();
    // A representative arrow per class (the minimal original id).
    let mut rep: Vec<Arr> = vec![Arr(u32::MAX); class_keys.len()];
    for a in base.arrows() {
        let c = class_of[a.idx()] as usize;
        if rep[c] == Arr(u32::MAX) {
            rep[c] = a;
        }
    }
    let src = class_keys.iter().map(|k| k.0).collect();
    let tgt = class_keys.iter().map(|k| k.1).collect();
    let effects: Vec<Perm> = class_keys.iter().map(|k| k.2.clone()).collect();
    let unit = base
        .objects()
        .map(|x| Arr(class_of[base.unit(x).idx()]))
        .collect();
    let inv = rep
        .iter()
        .map(|&a| Arr(class_of[base.inv(a).idx()]))
        .collect();
    let mut comp = BTreeMap::new();
    for (i, &a) in rep.iter().enumerate() {
        for (j, &b) in rep.iter().enumerate() {
            // Representatives of composable classes are composable: classes
            // record source and target.
            if base.src(a) != base.tgt(b) {
                continue;
            }
            let ab = base.comp(a, b);
            comp.insert((Arr(i as u32), Arr(j as u32)), Arr(class_of[ab.idx()]));
        }
    }
    let eff_base =
        FiniteGroupoid::from_tables(base.object_count(), src, tgt, unit, inv, comp);
    let p = StrictHom {
        dom: base.clone(),
        cod: eff_base.clone(),
        obj_map: base.objects().collect(),
        arr_map: class_of.iter().map(|&c| Arr(c)).collect(),
    };
    (ChartedGroupoid::new(eff_base, g.chart_size, effects), p)
}

/// Every stabilizer arrow induces the trivial chart effect.
pub fn is_purely_ineffective(g: &ChartedGroupoid) -> bool {
    g.base
        .arrows()
        .filter(|&a| g.base.src(a) == g.base.tgt(a))
        .all(|a| g.effect(a).is_identity())
}

/// The ineffective stabilizers consist only of identity arrows.
pub fn is_effective(g: &ChartedGroupoid) -> bool {
    g.base
        .arrows()
        .filter(|&a| g.base.src(a) == g.base.tgt(a))
        .all(|a| g.base.is_unit(a) || !g.effect(a).is_identity())
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ChartedError {
    #[error("not purely ineffective: stabilizer arrow {arrow} has a nontrivial effect")]
    NotPurelyIneffective { arrow: u32 },
}

/// The certified equivalence from the effectivization of a purely
/// ineffective groupoid to its coarse quotient.
#[derive(Clone, Debug)]
pub struct PiCoarseEquivalence {
    pub effectivized: ChartedGroupoid,
    pub class_map: StrictHom,
    /// `G_eff -> trivial_groupoid(coarse classes)`.
    pub hom: StrictHom,
    pub essentially_surjective: bool,
    pub fully_faithful: bool,
    pub bibundle: Bibundle,
    pub equivalence: EquivalenceCheck,
}

/// For a purely ineffective charted groupoid, builds the strict homomorphism
/// from its effectivization to the trivial groupoid on its coarse classes
/// and certifies that it is an essential equivalence, with the associated
/// bibundle checked principal on both sides.
pub fn pi_coarse_equivalence(g: &ChartedGroupoid) -> Result<PiCoarseEquivalence, ChartedError> {
    if let Some(a) = g
        .base
        .arrows()
        .find(|&a| g.base.src(a) == g.base.tgt(a) && !g.effect(a).is_identity())
    {
        return Err(ChartedError::NotPurelyIneffective { arrow: a.0 });
    }
    let (eff, class_map) = effectivization(g);
    let coarse = g.base.coarse_quotient();
    let target = FiniteGroupoid::trivial(coarse.class_count() as u32);
    let obj_map: Vec<Obj> = eff
        .base
        .objects()
        .map(|x| Obj(coarse.class_of(x) as u32))
        .collect();
    let arr_map = eff
        .base
        .arrows()
        .map(|a| Arr(coarse.class_of(eff.base.src(a)) as u32))
        .collect();
    let hom = StrictHom {
        dom: eff.base.clone(),
        cod: target,
        obj_map,
        arr_map,
    };
    debug_assert!(hom.is_valid());
    let essential = is_essential_equivalence(&hom);
    let bibundle = from_strict_hom(&hom);
    let equivalence = crate::bibundle::is_equivalence(&bibundle);
    Ok(PiCoarseEquivalence {
        effectivized: eff,
        class_map,
        hom,
        essentially_surjective: essential.essentially_surjective,
        fully_faithful: essential.fully_faithful,
        bibundle,
        equivalence,
    })
}

/// Returns the coarse quotient iff every stabilizer group is trivial; the
/// finite criterion for a groupoid to be (equivalent to) a plain set.
pub fn equivalent_to_set(g: &FiniteGroupoid) -> Option<CoarseQuotient> {
    for x in g.objects() {
        if g.stabilizer_arrows(x).len() != 1 {
            return None;
        }
    }
    Some(g.coarse_quotient())
}
