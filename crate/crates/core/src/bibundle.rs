//! Hilsum–Skandalis morphisms between finite groupoids.
//!
//! A bibundle `P: G -> H` is a finite set with commuting left `G`- and right
//! `H`-actions over the leg maps `s_P: P -> G₀` and `t_P: P -> H₀`, with the
//! `H`-action principal over `s_P`. Principality is checked in the cheap
//! form — `s_P` surjective, `H` free, `H` transitive on `s_P`-fibers — and
//! the bijection form `(p, h) -> (p, ph)` is exposed separately so the two
//! formulations can be compared against each other.
//!
//! Maps with both legs principal are equivalences (not isomorphisms): no
//! strict inverse is ever constructed, only the two-sided principality
//! certificate.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::action::{SetAction, Side};
use crate::group::isomorphism;
use crate::groupoid::{Arr, FiniteGroupoid, Obj, StabilizerGroup};
use crate::hom::StrictHom;

/// A Hilsum–Skandalis morphism `G -> H`.
#[derive(Clone, PartialEq, Eq)]
pub struct Bibundle {
    pub left: FiniteGroupoid,
    pub right: FiniteGroupoid,
    size: u32,
    src: Vec<Obj>, // s_P: P -> G₀
    tgt: Vec<Obj>, // t_P: P -> H₀
    // Per point p: the entries (g, g·p) and (h, p·h), sorted by arrow.
    left_act: Vec<Vec<(Arr, u32)>>,
    right_act: Vec<Vec<(Arr, u32)>>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BibundleError {
    #[error("bibundle endpoints do not match")]
    Mismatch,
    #[error("coarse class of object {x} is not sent to the class of object {y}")]
    ClassMismatch { x: u32, y: u32 },
    #[error("no total-set point over object {x}")]
    NoPointOver { x: u32 },
    #[error("not an equivalence")]
    NotEquivalence,
    #[error("invalid bibundle: {0}")]
    Invalid(String),
    #[error("equivariance fails: {0}")]
    Equivariance(String),
}

/// A bibundle condition broken by the tables, with a witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BibundleViolation {
    LeftUndefined { g: Arr, p: u32 },
    LeftExtraneous { g: Arr, p: u32 },
    LeftBase { g: Arr, p: u32 },
    LeftUnit { p: u32 },
    LeftComp { g: Arr, h: Arr, p: u32 },
    RightUndefined { p: u32, h: Arr },
    RightExtraneous { p: u32, h: Arr },
    RightBase { p: u32, h: Arr },
    RightUnit { p: u32 },
    RightComp { p: u32, h: Arr, k: Arr },
    SrcNotInvariant { p: u32, h: Arr },
    TgtNotInvariant { g: Arr, p: u32 },
    Compatibility { g: Arr, p: u32, h: Arr },
    SrcNotSurjective { x: Obj },
    NotFree { p: u32, h: Arr },
    NotTransitive { p: u32, q: u32 },
}

impl fmt::Display for BibundleViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use BibundleViolation::*;
        match self {
            LeftUndefined { g, p } => write!(f, "left action undefined at ({g:?}, p{p})"),
            LeftExtraneous { g, p } => write!(f, "left action defined off-base at ({g:?}, p{p})"),
            LeftBase { g, p } => write!(f, "s_P({g:?}·p{p}) != t({g:?})"),
            LeftUnit { p } => write!(f, "unit acts nontrivially on p{p} (left)"),
            LeftComp { g, h, p } => write!(f, "{g:?}({h:?}·p{p}) != ({g:?}{h:?})·p{p}"),
            RightUndefined { p, h } => write!(f, "right action undefined at (p{p}, {h:?})"),
            RightExtraneous { p, h } => {
                write!(f, "right action defined off-base at (p{p}, {h:?})")
            }
            RightBase { p, h } => write!(f, "t_P(p{p}·{h:?}) != s({h:?})"),
            RightUnit { p } => write!(f, "unit acts nontrivially on p{p} (right)"),
            RightComp { p, h, k } => write!(f, "(p{p}·{h:?}){k:?} != p{p}·({h:?}{k:?})"),
            SrcNotInvariant { p, h } => write!(f, "s_P(p{p}·{h:?}) != s_P(p{p})"),
            TgtNotInvariant { g, p } => write!(f, "t_P({g:?}·p{p}) != t_P(p{p})"),
            Compatibility { g, p, h } => write!(f, "({g:?}·p{p})·{h:?} != {g:?}·(p{p}·{h:?})"),
            SrcNotSurjective { x } => write!(f, "s_P misses object {x:?} (fiber witness)"),
            NotFree { p, h } => write!(f, "right action not free: p{p}·{h:?} = p{p}"),
            NotTransitive { p, q } => {
                write!(f, "fiber not transitive: no h with p{p}·h = p{q}")
            }
        }
    }
}

/// Structural problems and condition violations found by [`validate_bibundle`].
#[derive(Clone, Debug, Default)]
pub struct BibundleReport {
    pub structural: Vec<String>,
    pub violations: Vec<BibundleViolation>,
}

impl BibundleReport {
    pub fn is_valid(&self) -> bool {
        self.structural.is_empty() && self.violations.is_empty()
    }
}

impl fmt::Display for BibundleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return writeln!(f, "all bibundle conditions hold");
        }
        for s in &self.structural {
            writeln!(f, "structural: {s}")?;
        }
        for v in &self.violations {
            writeln!(f, "condition: {v}")?;
        }
        Ok(())
    }
}

impl Bibundle {
    pub fn from_tables(
        left: FiniteGroupoid,
        right: FiniteGroupoid,
        src: Vec<Obj>,
        tgt: Vec<Obj>,
        left_act: BTreeMap<(Arr, u32), u32>,
        right_act: BTreeMap<(u32, Arr), u32>,
    ) -> Bibundle {
        assert_eq!(src.len(), tgt.len());
        let size = src.len();
        let mut left_grouped = vec![Vec::new(); size];
        for (&(g, p), &q) in &left_act {
            if (p as usize) < size {
                left_grouped[p as usize].push((g, q));
            }
        }
        for row in &mut left_grouped {
            row.sort();
        }
        let mut right_grouped = vec![Vec::new(); size];
        for (&(p, h), &q) in &right_act {
            if (p as usize) < size {
                right_grouped[p as usize].push((h, q));
            }
        }
        Bibundle {
            left,
            right,
            size: size as u32,
            src,
            tgt,
            left_act: left_grouped,
            right_act: right_grouped,
        }
    }

    pub fn size(&self) -> u32 {
        self.size
    }

    pub fn points(&self) -> impl Iterator<Item = u32> {
        0..self.size
    }

    pub fn s_p(&self, p: u32) -> Obj {
        self.src[p as usize]
    }

    pub fn t_p(&self, p: u32) -> Obj {
        self.tgt[p as usize]
    }

    /// `g·p`, defined when `s(g) = s_P(p)`.
    pub fn left_apply(&self, g: Arr, p: u32) -> Option<u32> {
        let row = self.left_act.get(p as usize)?;
        row.binary_search_by_key(&g, |&(a, _)| a)
            .ok()
            .map(|i| row[i].1)
    }

    /// `p·h`, defined when `t_P(p) = t(h)`.
    pub fn right_apply(&self, p: u32, h: Arr) -> Option<u32> {
        let row = self.right_act.get(p as usize)?;
        row.binary_search_by_key(&h, |&(a, _)| a)
            .ok()
            .map(|i| row[i].1)
    }

    /// All `(g, p, g·p)` entries, grouped by point.
    pub fn left_action_entries(&self) -> impl Iterator<Item = (Arr, u32, u32)> + '_ {
        self.left_act
            .iter()
            .enumerate()
            .flat_map(|(p, row)| row.iter().map(move |&(g, q)| (g, p as u32, q)))
    }

    /// All `(p, h, p·h)` entries, grouped by point.
    pub fn right_action_entries(&self) -> impl Iterator<Item = (u32, Arr, u32)> + '_ {
        self.right_act
            .iter()
            .enumerate()
            .flat_map(|(p, row)| row.iter().map(move |&(h, q)| (p as u32, h, q)))
    }
}

impl fmt::Debug for Bibundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Bibundle(|P|={}, {:?} -> {:?})",
            self.size, self.left, self.right
        )
    }
}

/// Checks structure, both action axioms, invariance, compatibility, and
/// right-principality over `s_P`, reporting every violation with a witness.
pub fn validate_bibundle(b: &Bibundle) -> BibundleReport {
    let mut report = BibundleReport::default();
    let g0 = &b.left;
    let h0 = &b.right;
    for p in b.points() {
        if b.s_p(p).0 >= g0.object_count() {
            report.structural.push(format!("s_P(p{p}) out of range"));
        }
        if b.t_p(p).0 >= h0.object_count() {
            report.structural.push(format!("t_P(p{p}) out of range"));
        }
    }
    for (g, p, q) in b.left_action_entries() {
        if g.0 >= g0.arrow_count() || q >= b.size {
            report
                .structural
                .push(format!("left action entry ({}, p{p}) -> p{q} out of range", g.0));
        }
    }
    for (p, h, q) in b.right_action_entries() {
        if h.0 >= h0.arrow_count() || q >= b.size {
            report
                .structural
                .push(format!("right action entry (p{p}, {}) -> p{q} out of range", h.0));
        }
    }
    if !report.structural.is_empty() {
        return report;
    }

    // Left action axioms over the base map s_P.
    for g in g0.arrows() {
        for p in b.points() {
            let matches = g0.src(g) == b.s_p(p);
            match (matches, b.left_apply(g, p)) {
                (true, None) => report.violations.push(BibundleViolation::LeftUndefined { g, p }),
                (false, Some(_)) => {
                    report.violations.push(BibundleViolation::LeftExtraneous { g, p })
                }
                (true, Some(q)) => {
                    if b.s_p(q) != g0.tgt(g) {
                        report.violations.push(BibundleViolation::LeftBase { g, p });
                    }
                    if b.t_p(q) != b.t_p(p) {
                        report.violations.push(BibundleViolation::TgtNotInvariant { g, p });
                    }
                }
                (false, None) => {}
            }
        }
    }
    for p in b.points() {
        if b.left_apply(g0.unit(b.s_p(p)), p) != Some(p) {
            report.violations.push(BibundleViolation::LeftUnit { p });
        }
    }
    let mut points_by_src: Vec<Vec<u32>> = vec![Vec::new(); g0.object_count() as usize];
    for p in b.points() {
        points_by_src[b.s_p(p).idx()].push(p);
    }
    let mut points_by_tgt: Vec<Vec<u32>> = vec![Vec::new(); h0.object_count() as usize];
    for p in b.points() {
        points_by_tgt[b.t_p(p).idx()].push(p);
    }
    for g in g0.arrows() {
        for h in g0.arrows_into(g0.src(g)) {
            let gh = match g0.compose(g, h) {
                Some(gh) => gh,
                None => continue,
            };
            for &p in &points_by_src[g0.src(h).idx()] {
                if let Some(hp) = b.left_apply(h, p) {
                    if b.left_apply(g, hp) != b.left_apply(gh, p) {
                        report
                            .violations
                            .push(BibundleViolation::LeftComp { g, h, p });
                    }
                }
            }
        }
    }

    // Right action axioms over the base map t_P.
    for p in b.points() {
        for h in h0.arrows() {
            let matches = b.t_p(p) == h0.tgt(h);
            match (matches, b.right_apply(p, h)) {
                (true, None) => {
                    report.violations.push(BibundleViolation::RightUndefined { p, h })
                }
                (false, Some(_)) => {
                    report.violations.push(BibundleViolation::RightExtraneous { p, h })
                }
                (true, Some(q)) => {
                    if b.t_p(q) != h0.src(h) {
                        report.violations.push(BibundleViolation::RightBase { p, h });
                    }
                    if b.s_p(q) != b.s_p(p) {
                        report.violations.push(BibundleViolation::SrcNotInvariant { p, h });
                    }
                }
                (false, None) => {}
            }
        }
        if b.right_apply(p, h0.unit(b.t_p(p))) != Some(p) {
            report.violations.push(BibundleViolation::RightUnit { p });
        }
    }
    for h in h0.arrows() {
        for k in h0.arrows_into(h0.src(h)) {
            let hk = match h0.compose(h, k) {
                Some(hk) => hk,
                None => continue,
            };
            for &p in &points_by_tgt[h0.tgt(h).idx()] {
                if let Some(ph) = b.right_apply(p, h) {
                    if b.right_apply(ph, k) != b.right_apply(p, hk) {
                        report
                            .violations
                            .push(BibundleViolation::RightComp { p, h, k });
                    }
                }
            }
        }
    }

    // Compatibility: (g·p)·h = g·(p·h).
    for g in g0.arrows() {
        for &p in &points_by_src[g0.src(g).idx()] {
            if let Some(gp) = b.left_apply(g, p) {
                for h in h0.arrows_into(b.t_p(p)) {
                    if let Some(ph) = b.right_apply(p, h) {
                        if b.right_apply(gp, h) != b.left_apply(g, ph) {
                            report
                                .violations
                                .push(BibundleViolation::Compatibility { g, p, h });
                        }
                    }
                }
            }
        }
    }

    // Right principality over s_P (surjectivity is the finite content of the
    // "surjective submersion" condition).
    for x in g0.objects() {
        if !b.points().any(|p| b.s_p(p) == x) {
            report.violations.push(BibundleViolation::SrcNotSurjective { x });
        }
    }
    let mut right_orbit: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); b.size as usize];
    for (p, h, q) in b.right_action_entries() {
        right_orbit[p as usize].insert(q);
        if q == p && !h0.is_unit(h) {
            report.violations.push(BibundleViolation::NotFree { p, h });
        }
    }
    for p in b.points() {
        for &q in &points_by_src[b.s_p(p).idx()] {
            if !right_orbit[p as usize].contains(&q) {
                report.violations.push(BibundleViolation::NotTransitive { p, q });
            }
        }
    }
    report
}

/// The bijection formulation of principality: on the right,
/// `(p, h) -> (p, ph)` from `P ×_{H₀} H₁` to `P ×_{G₀} P`; on the left,
/// `(g, p) -> (p, gp)` from `G₁ ×_{G₀} P` to `P ×_{H₀} P`.
pub fn principality_bijection(b: &Bibundle, side: Side) -> bool {
    match side {
        Side::Right => {
            let mut images = BTreeSet::new();
            let mut count = 0usize;
            for p in b.points() {
                for h in b.right.arrows() {
                    if let Some(ph) = b.right_apply(p, h) {
                        count += 1;
                        if !images.insert((p, ph)) {
                            return false;
                        }
                    }
                }
            }
            let codomain = b
                .points()
                .flat_map(|p| b.points().map(move |q| (p, q)))
                .filter(|&(p, q)| b.s_p(p) == b.s_p(q))
                .count();
            count == codomain && b.left.objects().all(|x| b.points().any(|p| b.s_p(p) == x))
        }
        Side::Left => {
            let mut images = BTreeSet::new();
            let mut count = 0usize;
            for g in b.left.arrows() {
                for p in b.points() {
                    if let Some(gp) = b.left_apply(g, p) {
                        count += 1;
                        if !images.insert((p, gp)) {
                            return false;
                        }
                    }
                }
            }
            let codomain = b
                .points()
                .flat_map(|p| b.points().map(move |q| (p, q)))
                .filter(|&(p, q)| b.t_p(p) == b.t_p(q))
                .count();
            count == codomain && b.right.objects().all(|y| b.points().any(|p| b.t_p(p) == y))
        }
    }
}

/// The identity bibundle of `G`: total set `G₁` with `s_P = t`, `t_P = s`,
/// and actions by multiplication.
pub fn identity_bibundle(g: &FiniteGroupoid) -> Bibundle {
    let src = g.arrows().map(|a| g.tgt(a)).collect();
    let tgt = g.arrows().map(|a| g.src(a)).collect();
    let mut left_act = BTreeMap::new();
    let mut right_act = BTreeMap::new();
    for a in g.arrows() {
        for p in g.arrows_into(g.src(a)) {
            left_act.insert((a, p.0), g.comp(a, p).0);
        }
        for p in g.arrows_from(g.tgt(a)) {
            right_act.insert((p.0, a), g.comp(p, a).0);
        }
    }
    Bibundle::from_tables(g.clone(), g.clone(), src, tgt, left_act, right_act)
}

/// The bibundle of a strict homomorphism: total set
/// `{(x, h) | φ₀(x) = t(h)}` with `g·(x, h)·h' = (t(g), φ(g) h h')`.
pub fn from_strict_hom(phi: &StrictHom) -> Bibundle {
    let g0 = &phi.dom;
    let h0 = &phi.cod;
    let mut pairs: Vec<(Obj, Arr)> = Vec::new();
    for x in g0.objects() {
        for h in h0.arrows_into(phi.on_obj(x)) {
            pairs.push((x, h));
        }
    }
    pairs.sort();
    let index: BTreeMap<(Obj, Arr), u32> = pairs
        .iter()
        .enumerate()
        .map(|(i, &p)| (p, i as u32))
        .collect();
    let src = pairs.iter().map(|&(x, _)| x).collect();
    let tgt = pairs.iter().map(|&(_, h)| h0.src(h)).collect();
    let mut left_act = BTreeMap::new();
    let mut right_act = BTreeMap::new();
    for (i, &(x, h)) in pairs.iter().enumerate() {
        for g in g0.arrows_from(x) {
            let moved = (g0.tgt(g), h0.comp(phi.on_arr(g), h));
            left_act.insert((g, i as u32), index[&moved]);
        }
        for hp in h0.arrows_into(h0.src(h)) {
            let moved = (x, h0.comp(h, hp));
            right_act.insert((i as u32, hp), index[&moved]);
        }
    }
    Bibundle::from_tables(g0.clone(), h0.clone(), src, tgt, left_act, right_act)
}

/// Composition `P: G -> H` with `Q: H -> K`: the orbit space of
/// `(p, q)·h = (p·h, h⁻¹·q)` on the fiber product, with minimal-id orbit
/// representatives.
pub fn compose(p: &Bibundle, q: &Bibundle) -> Result<Bibundle, BibundleError> {
    if p.right != q.left {
        return Err(BibundleError::Mismatch);
    }
    let h0 = &p.right;
    let mut pairs: Vec<(u32, u32)> = Vec::new();
    for a in p.points() {
        for b in q.points() {
            if p.t_p(a) == q.s_p(b) {
                pairs.push((a, b));
            }
        }
    }
    pairs.sort();
    let index: BTreeMap<(u32, u32), usize> =
        pairs.iter().enumerate().map(|(i, &pr)| (pr, i)).collect();
    // Union-find over the fiber product, merging along the middle action and
    // keeping the smaller index as root so representatives are minimal.
    let mut parent: Vec<usize> = (0..pairs.len()).collect();
    fn root(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for (i, &(a, b)) in pairs.iter().enumerate() {
        for h in h0.arrows_into(p.t_p(a)) {
            if let Some(ah) = p.right_apply(a, h) {
                if let Some(hib) = q.left_apply(h0.inv(h), b) {
                    let j = index[&(ah, hib)];
                    let (ri, rj) = (root(&mut parent, i), root(&mut parent, j));
                    if ri < rj {
                        parent[rj] = ri;
                    } else {
                        parent[ri] = rj;
                    }
                }
            }
        }
    }
    let mut reps: Vec<usize> = (0..pairs.len())
        .filter(|&i| root(&mut parent, i) == i)
        .collect();
    reps.sort();
    let class_index: BTreeMap<usize, u32> = reps
        .iter()
        .enumerate()
        .map(|(c, &r)| (r, c as u32))
        .collect();
    let src = reps.iter().map(|&r| p.s_p(pairs[r].0)).collect();
    let tgt = reps.iter().map(|&r| q.t_p(pairs[r].1)).collect();
    let mut left_act = BTreeMap::new();
    let mut right_act = BTreeMap::new();
    for (c, &r) in reps.iter().enumerate() {
        let (a, b) = pairs[r];
        for g in p.left.arrows() {
            if let Some(ga) = p.left_apply(g, a) {
                let j = index[&(ga, b)];
                let rj = root(&mut parent, j);
                left_act.insert((g, c as u32), class_index[&rj]);
            }
        }
        for k in q.right.arrows() {
            if let Some(bk) = q.right_apply(b, k) {
                let j = index[&(a, bk)];
                let rj = root(&mut parent, j);
                right_act.insert((c as u32, k), class_index[&rj]);
            }
        }
    }
    Ok(Bibundle::from_tables(
        p.left.clone(),
        q.right.clone(),
        src,
        tgt,
        left_act,
        right_act,
    ))
}

/// A 2-isomorphism of bibundles: an equivariant bijection of total sets
/// commuting with both leg maps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoIso {
    pub map: Vec<u32>,
}

impl TwoIso {
    /// Full check against the definition.
    pub fn validate(&self, p: &Bibundle, q: &Bibundle) -> bool {
        if p.left != q.left || p.right != q.right {
            return false;
        }
        if self.map.len() != p.size() as usize || q.size() != p.size() {
            return false;
        }
        let mut seen = vec![false; q.size() as usize];
        for &v in &self.map {
            if v >= q.size() || seen[v as usize] {
                return false;
            }
            seen[v as usize] = true;
        }
        for pt in p.points() {
            let im = self.map[pt as usize];
            if q.s_p(im) != p.s_p(pt) || q.t_p(im) != p.t_p(pt) {
                return false;
            }
            for g in p.left.arrows() {
                if let Some(gp) = p.left_apply(g, pt) {
                    if q.left_apply(g, im) != Some(self.map[gp as usize]) {
                        return false;
                    }
                }
            }
            for h in p.right.arrows() {
                if let Some(ph) = p.right_apply(pt, h) {
                    if q.right_apply(im, h) != Some(self.map[ph as usize]) {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// All 2-isomorphisms `p -> q`, in lexicographic order of their maps.
/// Backtracks over fiber-respecting assignments, propagating through both
/// actions; the search order is by point id, so results are deterministic.
pub fn two_isos(p: &Bibundle, q: &Bibundle) -> Vec<TwoIso> {
    let mut out = Vec::new();
    two_iso_search(p, q, false, &mut out);
    out.sort_by(|a, b| a.map.cmp(&b.map));
    out
}

/// The first 2-isomorphism in id order, if any.
pub fn find_two_iso(p: &Bibundle, q: &Bibundle) -> Option<TwoIso> {
    let mut out = Vec::new();
    two_iso_search(p, q, true, &mut out);
    out.into_iter().next()
}

fn two_iso_search(p: &Bibundle, q: &Bibundle, first_only: bool, out: &mut Vec<TwoIso>) {
    if p.left != q.left || p.right != q.right || p.size() != q.size() {
        return;
    }
    let n = p.size() as usize;
    let mut assign = vec![u32::MAX; n];
    let mut used = vec![false; n];

    // Rolls back the assignments recorded in `newly`.
    fn rollback(assign: &mut [u32], used: &mut [bool], newly: &[u32]) {
        for &x in newly {
            used[assign[x as usize] as usize] = false;
            assign[x as usize] = u32::MAX;
        }
    }

    // Assigns map[pt] = im and closes under both actions. Returns the newly
    // assigned points for rollback, or None on conflict (already rolled back).
    fn propagate(
        p: &Bibundle,
        q: &Bibundle,
        assign: &mut [u32],
        used: &mut [bool],
        pt: u32,
        im: u32,
    ) -> Option<Vec<u32>> {
        let mut newly = Vec::new();
        let mut queue = vec![(pt, im)];
        while let Some((a, b)) = queue.pop() {
            if assign[a as usize] != u32::MAX {
                if assign[a as usize] != b {
                    rollback(assign, used, &newly);
                    return None;
                }
                continue;
            }
            if used[b as usize] || p.s_p(a) != q.s_p(b) || p.t_p(a) != q.t_p(b) {
                rollback(assign, used, &newly);
                return None;
            }
            assign[a as usize] = b;
            used[b as usize] = true;
            newly.push(a);
            for g in p.left.arrows_from(p.s_p(a)) {
                if let Some(ga) = p.left_apply(g, a) {
                    match q.left_apply(g, b) {
                        Some(gb) => queue.push((ga, gb)),
                        None => {
                            rollback(assign, used, &newly);
                            return None;
                        }
                    }
                }
            }
            for h in p.right.arrows_into(p.t_p(a)) {
                if let Some(ah) = p.right_apply(a, h) {
                    match q.right_apply(b, h) {
                        Some(bh) => queue.push((ah, bh)),
                        None => {
                            rollback(assign, used, &newly);
                            return None;
                        }
                    }
                }
            }
        }
        Some(newly)
    }

    fn rec(
        p: &Bibundle,
        q: &Bibundle,
        assign: &mut Vec<u32>,
        used: &mut Vec<bool>,
        first_only: bool,
        out: &mut Vec<TwoIso>,
    ) -> bool {
        let next = (0..assign.len()).find(|&i| assign[i] == u32::MAX);
        let pt = match next {
            Some(i) => i as u32,
            None => {
                let candidate = TwoIso { map: assign.clone() };
                // Propagation enforces the constraints; re-check against the
                // definition before accepting.
                if candidate.validate(p, q) {
                    out.push(candidate);
                    return first_only;
                }
                return false;
            }
        };
        for im in q.points() {
            if used[im as usize] {
                continue;
            }
            if let Some(newly) = propagate(p, q, assign, used, pt, im) {
                if rec(p, q, assign, used, first_only, out) {
                    return true;
                }
                rollback(assign, used, &newly);
            }
        }
        false
    }

    rec(p, q, &mut assign, &mut used, first_only, out);
}

/// Two-sided principality verdict.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalenceCheck {
    pub right_principal: bool,
    pub left_principal: bool,
    pub witness: Option<String>,
}

impl EquivalenceCheck {
    pub fn is_equivalence(&self) -> bool {
        self.right_principal && self.left_principal
    }
}

/// Checks principality on both sides: the right side as in
/// [`validate_bibundle`], the left side symmetrically (`t_P` surjective, `G`
/// free and transitive on `t_P`-fibers).
pub fn is_equivalence(b: &Bibundle) -> EquivalenceCheck {
    let mut witness = None;
    let mut right = true;
    for x in b.left.objects() {
        if !b.points().any(|p| b.s_p(p) == x) {
            right = false;
            witness.get_or_insert(format!("s_P misses object {x:?}"));
        }
    }
    let mut right_orbit: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); b.size as usize];
    for (p, h, q) in b.right_action_entries() {
        right_orbit[p as usize].insert(q);
        if q == p && !b.right.is_unit(h) {
            right = false;
            witness.get_or_insert(format!("H-action not free at p{p}"));
        }
    }
    'trans_r: for p in b.points() {
        for q in b.points() {
            if b.s_p(p) == b.s_p(q) && !right_orbit[p as usize].contains(&q) {
                right = false;
                witness.get_or_insert(format!("H-action not transitive on fiber of p{p}, p{q}"));
                break 'trans_r;
            }
        }
    }
    let mut left = true;
    for y in b.right.objects() {
        if !b.points().any(|p| b.t_p(p) == y) {
            left = false;
            witness.get_or_insert(format!("t_P misses object {y:?}"));
        }
    }
    let mut left_orbit: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); b.size as usize];
    for (g, p, q) in b.left_action_entries() {
        left_orbit[p as usize].insert(q);
        if q == p && !b.left.is_unit(g) {
            left = false;
            witness.get_or_insert(format!("G-action not free at p{p}"));
        }
    }
    'trans_l: for p in b.points() {
        for q in b.points() {
            if b.t_p(p) == b.t_p(q) && !left_orbit[p as usize].contains(&q) {
                left = false;
                witness.get_or_insert(format!("G-action not transitive on fiber of p{p}, p{q}"));
                break 'trans_l;
            }
        }
    }
    EquivalenceCheck {
        right_principal: right,
        left_principal: left,
        witness,
    }
}

/// Essential-equivalence verdict for a strict homomorphism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EssentialEquivalence {
    /// `(x, h) -> s(h)` from `G₀ ×_{H₀} H₁` onto `H₀`.
    pub essentially_surjective: bool,
    /// `G₁ -> G₀ × G₀ ×_{H₀ × H₀} H₁` is a bijection.
    pub fully_faithful: bool,
    pub witness: Option<String>,
}

impl EssentialEquivalence {
    pub fn holds(&self) -> bool {
        self.essentially_surjective && self.fully_faithful
    }
}

/// Decides essential surjectivity and full faithfulness of `phi` by direct
/// enumeration of the comparison maps.
pub fn is_essential_equivalence(phi: &StrictHom) -> EssentialEquivalence {
    let g0 = &phi.dom;
    let h0 = &phi.cod;
    let mut witness = None;
    let mut reached: BTreeSet<Obj> = BTreeSet::new();
    for x in g0.objects() {
        for h in h0.arrows() {
            if phi.on_obj(x) == h0.tgt(h) {
                reached.insert(h0.src(h));
            }
        }
    }
    let essentially_surjective = h0.objects().all(|y| reached.contains(&y));
    if !essentially_surjective {
        let missing = h0.objects().find(|y| !reached.contains(y)).unwrap();
        witness.get_or_insert(format!("object {missing:?} not essentially hit"));
    }
    // Fully faithful: g -> (s(g), t(g), phi(g)) is a bijection onto the
    // pullback {(x, x', h) | h: phi(x) -> phi(x')}.
    let mut image: BTreeSet<(Obj, Obj, Arr)> = BTreeSet::new();
    let mut injective = true;
    for g in g0.arrows() {
        if !image.insert((g0.src(g), g0.tgt(g), phi.on_arr(g))) {
            injective = false;
            witness.get_or_insert(format!("two arrows share (s, t, phi) at {g:?}"));
        }
    }
    let mut pullback = 0usize;
    for x in g0.objects() {
        for xp in g0.objects() {
            for h in h0.arrows() {
                if h0.src(h) == phi.on_obj(x) && h0.tgt(h) == phi.on_obj(xp) {
                    pullback += 1;
                }
            }
        }
    }
    let fully_faithful = injective && image.len() == pullback;
    if injective && image.len() != pullback {
        witness.get_or_insert(format!(
            "pullback has {pullback} elements, arrow space has {}",
            image.len()
        ));
    }
    EssentialEquivalence {
        essentially_surjective,
        fully_faithful,
        witness,
    }
}

/// The induced map on coarse quotients, with its consistency across all
/// total-set points and bijectivity recorded.
#[derive(Clone, Debug)]
pub struct CoarseMap {
    pub dom_classes: usize,
    pub cod_classes: usize,
    /// Class of `G` -> class of `H`.
    pub map: Vec<usize>,
    /// `[t_P(p)]` agreed for every `p` over each class.
    pub consistent: bool,
    pub bijective: bool,
}

/// Computes `f_P([s_P(p)]) = [t_P(p)]`, checking well-definedness pointwise.
pub fn induced_coarse_map(b: &Bibundle) -> CoarseMap {
    let gq = b.left.coarse_quotient();
    let hq = b.right.coarse_quotient();
    let mut map: Vec<Option<usize>> = vec![None; gq.class_count()];
    let mut consistent = true;
    for p in b.points() {
        let c = gq.class_of(b.s_p(p));
        let d = hq.class_of(b.t_p(p));
        match map[c] {
            None => map[c] = Some(d),
            Some(existing) if existing != d => consistent = false,
            _ => {}
        }
    }
    // s_P surjectivity (validity) makes every class hit; tolerate gaps on
    // invalid input by mapping them to usize::MAX.
    let map: Vec<usize> = map.into_iter().map(|m| m.unwrap_or(usize::MAX)).collect();
    let mut seen = vec![false; hq.class_count()];
    let mut bijective = consistent && map.len() == hq.class_count();
    for &d in &map {
        if d == usize::MAX || seen.get(d).copied().unwrap_or(true) {
            bijective = false;
        } else {
            seen[d] = true;
        }
    }
    CoarseMap {
        dom_classes: gq.class_count(),
        cod_classes: hq.class_count(),
        map,
        consistent,
        bijective,
    }
}

/// An induced stabilizer homomorphism `S_x -> S_y` with its conjugacy normal
/// form (the lexicographically least conjugate table).
#[derive(Clone, Debug)]
pub struct StabilizerHom {
    pub dom: StabilizerGroup,
    pub cod: StabilizerGroup,
    /// Element index of `S_x` -> element index of `S_y`.
    pub table: Vec<u32>,
    /// Lexicographically least table among target-conjugates of `table`;
    /// only this conjugacy class is meaningful.
    pub normalized: Vec<u32>,
    pub is_isomorphism: bool,
}

/// Builds `ψ_{P,x,y}` by the bundle recipe: choose the minimal `p` over `x`
/// and the minimal `h₀: t_P(p) -> y`; for `g ∈ S_x` take the unique `h` with
/// `p·h = g·p` and set `ψ(g) = h₀ h h₀⁻¹`.
pub fn induced_stabilizer_hom(
    b: &Bibundle,
    x: Obj,
    y: Obj,
) -> Result<StabilizerHom, BibundleError> {
    let coarse = induced_coarse_map(b);
    let gq = b.left.coarse_quotient();
    let hq = b.right.coarse_quotient();
    if coarse.map[gq.class_of(x)] != hq.class_of(y) {
        return Err(BibundleError::ClassMismatch { x: x.0, y: y.0 });
    }
    let p = b
        .points()
        .find(|&p| b.s_p(p) == x)
        .ok_or(BibundleError::NoPointOver { x: x.0 })?;
    let h0 = b
        .right
        .arrows_between(b.t_p(p), y)
        .next()
        .expect("class match guarantees an arrow t_P(p) -> y");
    let dom = b.left.stabilizer(x);
    let cod = b.right.stabilizer(y);
    let mut table = Vec::with_capacity(dom.arrows.len());
    for &g in &dom.arrows {
        let gp = b.left_apply(g, p).expect("stabilizer arrow acts on p");
        let h = b
            .right
            .arrows_into(b.t_p(p))
            .find(|&h| b.right_apply(p, h) == Some(gp))
            .expect("principality yields h with p·h = g·p");
        // h: t_P(p) -> t_P(p); conjugate into S_y by h₀.
        let psi = b.right.comp(b.right.comp(h0, h), b.right.inv(h0));
        table.push(cod.index_of(psi).expect("psi lands in S_y"));
    }
    // Normal form: conjugate by every c in S_y, keep the least table.
    let normalized = cod
        .group
        .elements()
        .map(|c| {
            table
                .iter()
                .map(|&v| cod.group.conjugate(v, c))
                .collect::<Vec<u32>>()
        })
        .min()
        .unwrap_or_else(|| table.clone());
    let mut seen = vec![false; cod.arrows.len()];
    let mut bijective = dom.arrows.len() == cod.arrows.len();
    for &v in &table {
        if seen[v as usize] {
            bijective = false;
        }
        seen[v as usize] = true;
    }
    let homomorphic = dom.group.elements().all(|a| {
        dom.group.elements().all(|b2| {
            table[dom.group.mul(a, b2) as usize]
                == cod.group.mul(table[a as usize], table[b2 as usize])
        })
    });
    Ok(StabilizerHom {
        dom,
        cod,
        table: table.clone(),
        normalized,
        is_isomorphism: bijective && homomorphic,
    })
}

/// Input data for a bibundle between translation groupoids: a K-equivariant
/// principal L-bundle `s_P: P -> X` (`s_P(k·p) = s_P(p)·k⁻¹`) and a
/// K-invariant, L-equivariant map `t_P: P -> Y`.
#[derive(Clone, Debug)]
pub struct TranslationBibundleData {
    /// Right action of `K` on `X`.
    pub base_action: SetAction,
    /// Right action of `L` on `Y`.
    pub fiber_action: SetAction,
    pub total: u32,
    pub s_p: Vec<u32>,
    pub t_p: Vec<u32>,
    /// Left action of `K` on the total set.
    pub k_on_total: SetAction,
    /// Right action of `L` on the total set.
    pub l_on_total: SetAction,
}

/// Builds the induced bibundle `X ⋊ K -> Y ⋊ L`. Equivariance violations are
/// refused with a witness; the result is fully validated.
pub fn translation_bibundle(data: &TranslationBibundleData) -> Result<Bibundle, BibundleError> {
    let check_side = |a: &SetAction, side: Side, name: &str| -> Result<(), BibundleError> {
        if a.side != side {
            return Err(BibundleError::Equivariance(format!(
                "{name} must be a {side:?} action"
            )));
        }
        a.validate()
            .map_err(|e| BibundleError::Equivariance(format!("{name}: {e}")))
    };
    check_side(&data.base_action, Side::Right, "base action")?;
    check_side(&data.fiber_action, Side::Right, "fiber action")?;
    check_side(&data.k_on_total, Side::Left, "K on total")?;
    check_side(&data.l_on_total, Side::Right, "L on total")?;
    let k = &data.base_action.group;
    let l = &data.fiber_action.group;
    for p in 0..data.total {
        for a in k.elements() {
            let kp = data.k_on_total.apply(p, a);
            if data.s_p[kp as usize] != data.base_action.apply(data.s_p[p as usize], k.inv(a)) {
                return Err(BibundleError::Equivariance(format!(
                    "s_P(k·p) != s_P(p)·k^-1 at p{p}, k{a}"
                )));
            }
            if data.t_p[kp as usize] != data.t_p[p as usize] {
                return Err(BibundleError::Equivariance(format!(
                    "t_P is not K-invariant at p{p}, k{a}"
                )));
            }
        }
        for b in l.elements() {
            let pl = data.l_on_total.apply(p, b);
            if data.s_p[pl as usize] != data.s_p[p as usize] {
                return Err(BibundleError::Equivariance(format!(
                    "s_P is not L-invariant at p{p}, l{b}"
                )));
            }
            if data.t_p[pl as usize] != data.fiber_action.apply(data.t_p[p as usize], b) {
                return Err(BibundleError::Equivariance(format!(
                    "t_P(p·l) != t_P(p)·l at p{p}, l{b}"
                )));
            }
        }
        for a in k.elements() {
            for b in l.elements() {
                let lhs = data.l_on_total.apply(data.k_on_total.apply(p, a), b);
                let rhs = data.k_on_total.apply(data.l_on_total.apply(p, b), a);
                if lhs != rhs {
                    return Err(BibundleError::Equivariance(format!(
                        "K and L actions do not commute at p{p}, k{a}, l{b}"
                    )));
                }
            }
        }
    }
    let left = crate::action::translation_groupoid(&data.base_action)
        .map_err(|e| BibundleError::Equivariance(e.to_string()))?;
    let right = crate::action::translation_groupoid(&data.fiber_action)
        .map_err(|e| BibundleError::Equivariance(e.to_string()))?;
    let nk = k.order();
    let nl = l.order();
    let src = data.s_p.iter().map(|&x| Obj(x)).collect();
    let tgt = data.t_p.iter().map(|&y| Obj(y)).collect();
    let mut left_act = BTreeMap::new();
    let mut right_act = BTreeMap::new();
    for p in 0..data.total {
        // Arrow (x, a): x·a -> x acts when s_P(p) = x·a; the result is a·p.
        for a in k.elements() {
            let x = data.base_action.apply(data.s_p[p as usize], k.inv(a));
            left_act.insert((Arr(x * nk + a), p), data.k_on_total.apply(p, a));
        }
        // Arrow (y, b): y·b -> y acts when t_P(p) = y; the result is p·b.
        for b in l.elements() {
            let y = data.t_p[p as usize];
            right_act.insert((p, Arr(y * nl + b)), data.l_on_total.apply(p, b));
        }
    }
    let bundle = Bibundle::from_tables(left, right, src, tgt, left_act, right_act);
    let report = validate_bibundle(&bundle);
    if !report.is_valid() {
        return Err(BibundleError::Invalid(report.to_string()));
    }
    Ok(bundle)
}

/// Recovers the `K`- and `L`-actions on the total set from a bibundle built
/// between the given translation groupoids; inverse to
/// [`translation_bibundle`] on its image.
pub fn extract_translation_data(
    b: &Bibundle,
    base_action: &SetAction,
    fiber_action: &SetAction,
) -> (SetAction, SetAction) {
    let k = &base_action.group;
    let l = &fiber_action.group;
    let nk = k.order();
    let nl = l.order();
    let mut k_table = Vec::with_capacity((b.size() * nk) as usize);
    for p in b.points() {
        for a in k.elements() {
            let x = base_action.apply(b.s_p(p).0, k.inv(a));
            let kp = b
                .left_apply(Arr(x * nk + a), p)
                .expect("translation arrow acts on its fiber");
            k_table.push(kp);
        }
    }
    let mut l_table = Vec::with_capacity((b.size() * nl) as usize);
    for p in b.points() {
        for a in l.elements() {
            let y = b.t_p(p).0;
            let pl = b
                .right_apply(p, Arr(y * nl + a))
                .expect("translation arrow acts on its fiber");
            l_table.push(pl);
        }
    }
    (
        SetAction::from_table(k.clone(), b.size(), Side::Left, k_table),
        SetAction::from_table(l.clone(), b.size(), Side::Right, l_table),
    )
}

/// Verdict and invariants for the weak-equivalence decision.
#[derive(Clone, Debug)]
pub struct WeakEquivalence {
    pub equivalent: bool,
    pub g_classes: usize,
    pub h_classes: usize,
    /// For each class of `G`, the matched class of `H`.
    pub matching: Option<Vec<usize>>,
    pub reason: Option<String>,
    /// An explicit equivalence bibundle via basepoints, when equivalent.
    pub bibundle: Option<Bibundle>,
}

/// Decides Morita equivalence by matching coarse classes with isomorphic
/// stabilizer groups, and constructs an explicit equivalence bibundle from
/// the matching when one exists.
pub fn decide_weak_equivalence(g: &FiniteGroupoid, h: &FiniteGroupoid) -> WeakEquivalence {
    let gq = g.coarse_quotient();
    let hq = h.coarse_quotient();
    if gq.class_count() != hq.class_count() {
        return WeakEquivalence {
            equivalent: false,
            g_classes: gq.class_count(),
            h_classes: hq.class_count(),
            matching: None,
            reason: Some(format!(
                "coarse class counts differ: {} vs {}",
                gq.class_count(),
                hq.class_count()
            )),
            bibundle: None,
        };
    }
    let g_stabs: Vec<StabilizerGroup> = gq.classes.iter().map(|c| g.stabilizer(c[0])).collect();
    let h_stabs: Vec<StabilizerGroup> = hq.classes.iter().map(|c| h.stabilizer(c[0])).collect();
    // Greedy matching is complete here because isomorphism is transitive.
    let mut matching = vec![usize::MAX; g_stabs.len()];
    let mut taken = vec![false; h_stabs.len()];
    let mut isos: Vec<Vec<u32>> = vec![Vec::new(); g_stabs.len()];
    for (i, gs) in g_stabs.iter().enumerate() {
        let mut found = false;
        for (j, hs) in h_stabs.iter().enumerate() {
            if taken[j] {
                continue;
            }
            if let Some(iso) = isomorphism(&gs.group, &hs.group) {
                matching[i] = j;
                taken[j] = true;
                isos[i] = iso;
                found = true;
                break;
            }
        }
        if !found {
            return WeakEquivalence {
                equivalent: false,
                g_classes: gq.class_count(),
                h_classes: hq.class_count(),
                matching: None,
                reason: Some(format!(
                    "stabilizer types differ: no match for class {i} (order {})",
                    g_stabs[i].group.order()
                )),
                bibundle: None,
            };
        }
    }
    // Explicit equivalence via basepoints: send each object to the matched
    // representative and transport arrows through chosen connecting arrows.
    let mut obj_map: Vec<Obj> = vec![Obj(0); g.object_count() as usize];
    let mut connector: Vec<Arr> = vec![Arr(0); g.object_count() as usize];
    for (i, class) in gq.classes.iter().enumerate() {
        let x_rep = class[0];
        let y_rep = hq.classes[matching[i]][0];
        for &x in class {
            obj_map[x.idx()] = y_rep;
            connector[x.idx()] = g
                .arrows_between(x, x_rep)
                .next()
                .expect("objects in one class are connected");
        }
    }
    let arr_map: Vec<Arr> = g
        .arrows()
        .map(|a| {
            let x = g.src(a);
            let xp = g.tgt(a);
            let i = gq.class_of(x);
            // r_{x'} ∘ a ∘ r_x⁻¹ ∈ S_{x_rep}, then through the group iso.
            let loop_at_rep = g.comp(g.comp(connector[xp.idx()], a), g.inv(connector[x.idx()]));
            let gs = &g_stabs[i];
            let hs = &h_stabs[matching[i]];
            let idx = gs.index_of(loop_at_rep).expect("loop lands in stabilizer");
            hs.arrows[isos[i][idx as usize] as usize]
        })
        .collect();
    let phi = StrictHom {
        dom: g.clone(),
        cod: h.clone(),
        obj_map,
        arr_map,
    };
    debug_assert!(phi.is_valid());
    let bundle = from_strict_hom(&phi);
    debug_assert!(is_equivalence(&bundle).is_equivalence());
    WeakEquivalence {
        equivalent: true,
        g_classes: gq.class_count(),
        h_classes: hq.class_count(),
        matching: Some(matching),
        reason: None,
        bibundle: Some(bundle),
    }
}

/// The reverse bibundle of an equivalence: the same total set read as a
/// morphism `H -> G`, acting through inverse arrows. Only defined (and only
/// used internally) for two-sided principal bibundles, where it is the weak
/// inverse up to 2-isomorphism; no strict inverse is exposed.
pub(crate) fn flip_equivalence(b: &Bibundle) -> Result<Bibundle, BibundleError> {
    if !is_equivalence(b).is_equivalence() {
        return Err(BibundleError::NotEquivalence);
    }
    let mut left_act = BTreeMap::new();
    let mut right_act = BTreeMap::new();
    for p in b.points() {
        // h ·' p := p · h⁻¹, defined when s(h) = t_P(p).
        for h in b.right.arrows() {
            if b.right.src(h) == b.t_p(p) {
                let q = b
                    .right_apply(p, b.right.inv(h))
                    .expect("matching arrow acts");
                left_act.insert((h, p), q);
            }
        }
        // p ·' g := g⁻¹ · p, defined when t(g) = s_P(p).
        for g in b.left.arrows() {
            if b.left.tgt(g) == b.s_p(p) {
                let q = b.left_apply(b.left.inv(g), p).expect("matching arrow acts");
                right_act.insert((p, g), q);
            }
        }
    }
    let flipped = Bibundle::from_tables(
        b.right.clone(),
        b.left.clone(),
        b.tgt.clone(),
        b.src.clone(),
        left_act,
        right_act,
    );
    // Acting through inverses preserves all bibundle conditions; two-sided
    // principality of the input makes the flip two-sided principal as well.
    debug_assert!(is_equivalence(&flipped).is_equivalence());
    Ok(flipped)
}
