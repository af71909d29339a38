//! Finite groupoids with explicit structure tables.
//!
//! A groupoid is stored as dense object and arrow ids together with total
//! `src`, `tgt`, `unit`, `inv` tables and a composition table over exactly
//! the composable pairs. The composition convention follows `m(g, h) = gh`
//! with `s(gh) = s(h)` and `t(gh) = t(g)`: `g` is applied after `h`.
//!
//! Construction never checks axioms, so broken tables (from files or from
//! deliberately corrupted fixtures) can be represented and then diagnosed by
//! [`FiniteGroupoid::validate`], which reports every violation with a witness.

use std::collections::BTreeMap;
use std::fmt;

use crate::group::FiniteGroup;

/// Object id, dense in `0..groupoid.object_count()`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Obj(pub u32);

/// Arrow id, dense in `0..groupoid.arrow_count()`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Arr(pub u32);

impl Obj {
    pub fn idx(self) -> usize {
        self.0 as usize
    }
}

impl Arr {
    pub fn idx(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Debug for Obj {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

impl fmt::Debug for Arr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a{}", self.0)
    }
}

#[derive(Clone)]
pub struct FiniteGroupoid {
    n_objects: u32,
    src: Vec<Obj>,
    tgt: Vec<Obj>,
    unit: Vec<Arr>,
    inv: Vec<Arr>,
    // comp[g] lists (h, gh) sorted by h; lookup is a binary search.
    comp: Vec<Vec<(Arr, Arr)>>,
    // Adjacency caches; derived from src and tgt, skipping dangling ids.
    out_arrows: Vec<Vec<Arr>>,
    in_arrows: Vec<Vec<Arr>>,
}

impl PartialEq for FiniteGroupoid {
    fn eq(&self, other: &Self) -> bool {
        self.n_objects == other.n_objects
            && self.src == other.src
            && self.tgt == other.tgt
            && self.unit == other.unit
            && self.inv == other.inv
            && self.comp == other.comp
    }
}

impl Eq for FiniteGroupoid {}

/// A reference to a declared id that falls outside the declared sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StructuralError {
    DanglingObject { table: &'static str, index: u32, value: u32 },
    DanglingArrow { table: &'static str, index: u32, value: u32 },
    TableLength { table: &'static str, expected: usize, found: usize },
}

impl fmt::Display for StructuralError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StructuralError::DanglingObject { table, index, value } => {
                write!(f, "{table}[{index}] refers to missing object {value}")
            }
            StructuralError::DanglingArrow { table, index, value } => {
                write!(f, "{table}[{index}] refers to missing arrow {value}")
            }
            StructuralError::TableLength { table, expected, found } => {
                write!(f, "{table} has {found} entries, expected {expected}")
            }
        }
    }
}

/// A groupoid axiom violation with a witness tuple.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AxiomViolation {
    UnitEndpoints { x: Obj },
    InvSource { g: Arr },
    InvTarget { g: Arr },
    InvNotInvolution { g: Arr },
    CompMissing { g: Arr, h: Arr },
    CompNotComposable { g: Arr, h: Arr },
    CompSource { g: Arr, h: Arr },
    CompTarget { g: Arr, h: Arr },
    LeftUnitLaw { g: Arr },
    RightUnitLaw { g: Arr },
    LeftInverseLaw { g: Arr },
    RightInverseLaw { g: Arr },
    Associativity { g: Arr, h: Arr, k: Arr },
}

impl fmt::Display for AxiomViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use AxiomViolation::*;
        match self {
            UnitEndpoints { x } => write!(f, "s(1_{x:?}) = t(1_{x:?}) = {x:?} fails"),
            InvSource { g } => write!(f, "s({g:?}^-1) = t({g:?}) fails (inv missing or wrong)"),
            InvTarget { g } => write!(f, "t({g:?}^-1) = s({g:?}) fails (inv missing or wrong)"),
            InvNotInvolution { g } => write!(f, "({g:?}^-1)^-1 = {g:?} fails"),
            CompMissing { g, h } => write!(f, "comp({g:?}, {h:?}) undefined on a composable pair"),
            CompNotComposable { g, h } => {
                write!(f, "comp({g:?}, {h:?}) defined on a non-composable pair")
            }
            CompSource { g, h } => write!(f, "s({g:?}{h:?}) = s({h:?}) fails"),
            CompTarget { g, h } => write!(f, "t({g:?}{h:?}) = t({g:?}) fails"),
            LeftUnitLaw { g } => write!(f, "1·{g:?} = {g:?} fails"),
            RightUnitLaw { g } => write!(f, "{g:?}·1 = {g:?} fails"),
            LeftInverseLaw { g } => write!(f, "{g:?}^-1·{g:?} = unit fails"),
            RightInverseLaw { g } => write!(f, "{g:?}·{g:?}^-1 = unit fails"),
            Associativity { g, h, k } => write!(f, "({g:?}{h:?}){k:?} = {g:?}({h:?}{k:?}) fails"),
        }
    }
}

/// Outcome of [`FiniteGroupoid::validate`]: all structural errors and axiom
/// violations, in deterministic order. Empty iff the groupoid is valid.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub structural: Vec<StructuralError>,
    pub violations: Vec<AxiomViolation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.structural.is_empty() && self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return writeln!(f, "all groupoid axioms hold");
        }
        for e in &self.structural {
            writeln!(f, "structural: {e}")?;
        }
        for v in &self.violations {
            writeln!(f, "axiom: {v}")?;
        }
        Ok(())
    }
}

impl FiniteGroupoid {
    /// Assembles a groupoid from raw tables without checking any axiom.
    pub fn from_tables(
        n_objects: u32,
        src: Vec<Obj>,
        tgt: Vec<Obj>,
        unit: Vec<Arr>,
        inv: Vec<Arr>,
        comp: BTreeMap<(Arr, Arr), Arr>,
    ) -> FiniteGroupoid {
        let mut grouped = vec![Vec::new(); src.len().max(
            comp.keys().map(|&(g, _)| g.idx() + 1).max().unwrap_or(0),
        )];
        for (&(g, h), &gh) in &comp {
            grouped[g.idx()].push((h, gh));
        }
        FiniteGroupoid::from_comp_groups(n_objects, src, tgt, unit, inv, grouped)
    }

    /// Assembles a groupoid with the composition table pre-grouped by first
    /// factor; each `comp[g]` must be sorted by its `h` component.
    pub(crate) fn from_comp_groups(
        n_objects: u32,
        src: Vec<Obj>,
        tgt: Vec<Obj>,
        unit: Vec<Arr>,
        inv: Vec<Arr>,
        comp: Vec<Vec<(Arr, Arr)>>,
    ) -> FiniteGroupoid {
        debug_assert!(comp
            .iter()
            .all(|row| row.windows(2).all(|w| w[0].0 < w[1].0)));
        let mut out_arrows = vec![Vec::new(); n_objects as usize];
        let mut in_arrows = vec![Vec::new(); n_objects as usize];
        for (i, &x) in src.iter().enumerate() {
            if x.0 < n_objects {
                out_arrows[x.idx()].push(Arr(i as u32));
            }
        }
        for (i, &x) in tgt.iter().enumerate() {
            if x.0 < n_objects {
                in_arrows[x.idx()].push(Arr(i as u32));
            }
        }
        FiniteGroupoid {
            n_objects,
            src,
            tgt,
            unit,
            inv,
            comp,
            out_arrows,
            in_arrows,
        }
    }

    /// The trivial groupoid on `n` objects: units only.
    pub fn trivial(n: u32) -> FiniteGroupoid {
        let ids: Vec<Obj> = (0..n).map(Obj).collect();
        let arrs: Vec<Arr> = (0..n).map(Arr).collect();
        let comp = (0..n).map(|i| ((Arr(i), Arr(i)), Arr(i))).collect();
        FiniteGroupoid::from_tables(n, ids.clone(), ids, arrs.clone(), arrs, comp)
    }

    /// The pair groupoid on `n` objects: exactly one arrow `j -> i` for every
    /// pair, with id `i * n + j`.
    pub fn pair(n: u32) -> FiniteGroupoid {
        let mut src = Vec::new();
        let mut tgt = Vec::new();
        for i in 0..n {
            for j in 0..n {
                src.push(Obj(j));
                tgt.push(Obj(i));
            }
        }
        let unit = (0..n).map(|i| Arr(i * n + i)).collect();
        let inv = (0..n * n).map(|a| Arr((a % n) * n + a / n)).collect();
        let mut comp = BTreeMap::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    // (i <- j) ∘ (j <- k) = (i <- k)
                    comp.insert((Arr(i * n + j), Arr(j * n + k)), Arr(i * n + k));
                }
            }
        }
        FiniteGroupoid::from_tables(n, src, tgt, unit, inv, comp)
    }

    pub fn object_count(&self) -> u32 {
        self.n_objects
    }

    pub fn arrow_count(&self) -> u32 {
        self.src.len() as u32
    }

    pub fn objects(&self) -> impl Iterator<Item = Obj> {
        (0..self.n_objects).map(Obj)
    }

    pub fn arrows(&self) -> impl Iterator<Item = Arr> {
        (0..self.arrow_count()).map(Arr)
    }

    pub fn src(&self, g: Arr) -> Obj {
        self.src[g.idx()]
    }

    pub fn tgt(&self, g: Arr) -> Obj {
        self.tgt[g.idx()]
    }

    pub fn unit(&self, x: Obj) -> Arr {
        self.unit[x.idx()]
    }

    pub fn inv(&self, g: Arr) -> Arr {
        self.inv[g.idx()]
    }

    /// The partial composition `m(g, h) = gh`, defined when `s(g) = t(h)`.
    pub fn compose(&self, g: Arr, h: Arr) -> Option<Arr> {
        let row = self.comp.get(g.idx())?;
        row.binary_search_by_key(&h, |&(k, _)| k)
            .ok()
            .map(|i| row[i].1)
    }

    /// Composition on a pair known to be composable.
    pub fn comp(&self, g: Arr, h: Arr) -> Arr {
        match self.compose(g, h) {
            Some(gh) => gh,
            None => panic!("comp({g:?}, {h:?}) undefined"),
        }
    }

    /// All composition-table entries `(g, h, gh)` in lexicographic order.
    pub fn comp_entries(&self) -> impl Iterator<Item = (Arr, Arr, Arr)> + '_ {
        self.comp
            .iter()
            .enumerate()
            .flat_map(|(g, row)| row.iter().map(move |&(h, gh)| (Arr(g as u32), h, gh)))
    }

    pub fn is_unit(&self, g: Arr) -> bool {
        self.unit[self.src(g).idx()] == g
    }

    pub fn arrows_from(&self, x: Obj) -> impl Iterator<Item = Arr> + '_ {
        self.out_arrows[x.idx()].iter().copied()
    }

    pub fn arrows_into(&self, x: Obj) -> impl Iterator<Item = Arr> + '_ {
        self.in_arrows[x.idx()].iter().copied()
    }

    pub fn arrows_between(&self, x: Obj, y: Obj) -> impl Iterator<Item = Arr> + '_ {
        self.out_arrows[x.idx()]
            .iter()
            .copied()
            .filter(move |&g| self.tgt(g) == y)
    }

    /// Checks every groupoid axiom, listing all violations with witnesses.
    /// Structural problems (dangling ids, wrong table lengths) are reported
    /// separately and suppress the axiom pass, which would index out of range.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let n_obj = self.n_objects;
        let n_arr = self.src.len() as u32;

        if self.tgt.len() != self.src.len() {
            report.structural.push(StructuralError::TableLength {
                table: "tgt",
                expected: self.src.len(),
                found: self.tgt.len(),
            });
        }
        if self.unit.len() != n_obj as usize {
            report.structural.push(StructuralError::TableLength {
                table: "unit",
                expected: n_obj as usize,
                found: self.unit.len(),
            });
        }
        if self.inv.len() != self.src.len() {
            report.structural.push(StructuralError::TableLength {
                table: "inv",
                expected: self.src.len(),
                found: self.inv.len(),
            });
        }
        let check_obj = |report: &mut ValidationReport, table: &'static str, index: u32, v: Obj| {
            if v.0 >= n_obj {
                report
                    .structural
                    .push(StructuralError::DanglingObject { table, index, value: v.0 });
            }
        };
        let check_arr = |report: &mut ValidationReport, table: &'static str, index: u32, v: Arr| {
            if v.0 >= n_arr {
                report
                    .structural
                    .push(StructuralError::DanglingArrow { table, index, value: v.0 });
            }
        };
        for (i, &x) in self.src.iter().enumerate() {
            check_obj(&mut report, "src", i as u32, x);
        }
        for (i, &x) in self.tgt.iter().enumerate() {
            check_obj(&mut report, "tgt", i as u32, x);
        }
        for (i, &a) in self.unit.iter().enumerate() {
            check_arr(&mut report, "unit", i as u32, a);
        }
        for (i, &a) in self.inv.iter().enumerate() {
            check_arr(&mut report, "inv", i as u32, a);
        }
        for (g, h, gh) in self.comp_entries() {
            check_arr(&mut report, "comp(lhs)", g.0, g);
            check_arr(&mut report, "comp(rhs)", h.0, h);
            check_arr(&mut report, "comp(result)", gh.0, gh);
        }
        if self.comp.len() > self.src.len() {
            report.structural.push(StructuralError::TableLength {
                table: "comp",
                expected: self.src.len(),
                found: self.comp.len(),
            });
        }
        if !report.structural.is_empty() {
            return report;
        }

        for x in self.objects() {
            let u = self.unit(x);
            if self.src(u) != x || self.tgt(u) != x {
                report.violations.push(AxiomViolation::UnitEndpoints { x });
            }
        }
        for g in self.arrows() {
            let gi = self.inv(g);
            if self.src(gi) != self.tgt(g) {
                report.violations.push(AxiomViolation::InvSource { g });
            }
            if self.tgt(gi) != self.src(g) {
                report.violations.push(AxiomViolation::InvTarget { g });
            }
            if self.inv(gi) != g {
                report.violations.push(AxiomViolation::InvNotInvolution { g });
            }
        }
        // comp is total on composable pairs and undefined elsewhere.
        for g in self.arrows() {
            for h in self.arrows() {
                let composable = self.src(g) == self.tgt(h);
                match self.compose(g, h) {
                    None if composable => {
                        report.violations.push(AxiomViolation::CompMissing { g, h })
                    }
                    Some(_) if !composable => report
                        .violations
                        .push(AxiomViolation::CompNotComposable { g, h }),
                    Some(gh) if composable => {
                        if self.src(gh) != self.src(h) {
                            report.violations.push(AxiomViolation::CompSource { g, h });
                        }
                        if self.tgt(gh) != self.tgt(g) {
                            report.violations.push(AxiomViolation::CompTarget { g, h });
                        }
                    }
                    _ => {}
                }
            }
        }
        for g in self.arrows() {
            let us = self.unit(self.src(g));
            if self.compose(g, us) != Some(g) {
                report.violations.push(AxiomViolation::RightUnitLaw { g });
            }
            let ut = self.unit(self.tgt(g));
            if self.compose(ut, g) != Some(g) {
                report.violations.push(AxiomViolation::LeftUnitLaw { g });
            }
            let gi = self.inv(g);
            if self.compose(gi, g) != Some(self.unit(self.src(g))) {
                report.violations.push(AxiomViolation::LeftInverseLaw { g });
            }
            if self.compose(g, gi) != Some(self.unit(self.tgt(g))) {
                report.violations.push(AxiomViolation::RightInverseLaw { g });
            }
        }
        for g in self.arrows() {
            for h in self.arrows() {
                if self.src(g) != self.tgt(h) {
                    continue;
                }
                for k in self.arrows() {
                    if self.src(h) != self.tgt(k) {
                        continue;
                    }
                    let gh_k = self.compose(g, h).and_then(|gh| self.compose(gh, k));
                    let g_hk = self.compose(h, k).and_then(|hk| self.compose(g, hk));
                    if gh_k.is_none() || gh_k != g_hk {
                        report
                            .violations
                            .push(AxiomViolation::Associativity { g, h, k });
                    }
                }
            }
        }
        report
    }

    /// Partition of the objects into connected components under "there is an
    /// arrow", with classes ordered by minimal object id.
    pub fn coarse_quotient(&self) -> CoarseQuotient {
        let mut parent: Vec<u32> = (0..self.n_objects).collect();
        fn root(parent: &mut [u32], mut x: u32) -> u32 {
            while parent[x as usize] != x {
                parent[x as usize] = parent[parent[x as usize] as usize];
                x = parent[x as usize];
            }
            x
        }
        for g in self.arrows() {
            let a = root(&mut parent, self.src(g).0);
            let b = root(&mut parent, self.tgt(g).0);
            // Merge toward the smaller id so representatives are minimal.
            if a < b {
                parent[b as usize] = a;
            } else {
                parent[a as usize] = b;
            }
        }
        let mut classes_by_rep: BTreeMap<u32, Vec<Obj>> = BTreeMap::new();
        for x in 0..self.n_objects {
            let r = root(&mut parent, x);
            classes_by_rep.entry(r).or_default().push(Obj(x));
        }
        let classes: Vec<Vec<Obj>> = classes_by_rep.into_values().collect();
        let mut class_of = vec![0usize; self.n_objects as usize];
        for (i, class) in classes.iter().enumerate() {
            for &x in class {
                class_of[x.idx()] = i;
            }
        }
        CoarseQuotient { classes, class_of }
    }

    /// Stabilizer arrows at `x` (same source and target), sorted by id.
    pub fn stabilizer_arrows(&self, x: Obj) -> Vec<Arr> {
        self.arrows()
            .filter(|&g| self.src(g) == x && self.tgt(g) == x)
            .collect()
    }

    /// The stabilizer group `S_x` under composition: element `i` is
    /// `arrows[i]`, and `mul(i, j)` composes `arrows[i]` after `arrows[j]`.
    pub fn stabilizer(&self, x: Obj) -> StabilizerGroup {
        let arrows = self.stabilizer_arrows(x);
        let index: BTreeMap<Arr, u32> = arrows
            .iter()
            .enumerate()
            .map(|(i, &a)| (a, i as u32))
            .collect();
        let table: Vec<Vec<u32>> = arrows
            .iter()
            .map(|&a| {
                arrows
                    .iter()
                    .map(|&b| index[&self.comp(a, b)])
                    .collect::<Vec<u32>>()
            })
            .collect();
        let group = FiniteGroup::from_mul_table(&table)
            .expect("stabilizer of a valid groupoid is a group");
        StabilizerGroup { arrows, group }
    }

    /// The opposite groupoid: same objects, arrows reversed.
    pub fn opposite(&self) -> FiniteGroupoid {
        let comp: BTreeMap<(Arr, Arr), Arr> = self
            .comp_entries()
            .map(|(g, h, gh)| ((h, g), gh))
            .collect();
        FiniteGroupoid::from_tables(
            self.n_objects,
            self.tgt.clone(),
            self.src.clone(),
            self.unit.clone(),
            self.inv.clone(),
            comp,
        )
    }

    /// Disjoint union, with `other`'s ids offset after `self`'s.
    pub fn disjoint_union(&self, other: &FiniteGroupoid) -> FiniteGroupoid {
        let oo = self.n_objects;
        let ao = self.arrow_count();
        let mut src = self.src.clone();
        let mut tgt = self.tgt.clone();
        let mut unit = self.unit.clone();
        let mut inv = self.inv.clone();
        src.extend(other.src.iter().map(|x| Obj(x.0 + oo)));
        tgt.extend(other.tgt.iter().map(|x| Obj(x.0 + oo)));
        unit.extend(other.unit.iter().map(|a| Arr(a.0 + ao)));
        inv.extend(other.inv.iter().map(|a| Arr(a.0 + ao)));
        let mut comp = self.comp.clone();
        comp.resize(self.comp.len() + other.comp.len(), Vec::new());
        for (g, h, gh) in other.comp_entries() {
            comp[(g.0 + ao) as usize].push((Arr(h.0 + ao), Arr(gh.0 + ao)));
        }
        FiniteGroupoid::from_comp_groups(
            self.n_objects + other.n_objects,
            src,
            tgt,
            unit,
            inv,
            comp,
        )
    }
}

impl fmt::Debug for FiniteGroupoid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "FiniteGroupoid(objects={}, arrows={})",
            self.n_objects,
            self.arrow_count()
        )
    }
}

/// A stabilizer group together with the arrows realizing its elements.
#[derive(Clone, Debug)]
pub struct StabilizerGroup {
    pub arrows: Vec<Arr>,
    pub group: FiniteGroup,
}

impl StabilizerGroup {
    pub fn index_of(&self, a: Arr) -> Option<u32> {
        self.arrows.binary_search(&a).ok().map(|i| i as u32)
    }
}

/// Connected components of the object set, with deterministic minimal-id
/// representatives.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoarseQuotient {
    /// Classes ordered by minimal member; members sorted ascending.
    pub classes: Vec<Vec<Obj>>,
    /// Index of the class containing each object.
    pub class_of: Vec<usize>,
}

impl CoarseQuotient {
    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn representative(&self, class: usize) -> Obj {
        self.classes[class][0]
    }

    pub fn class_of(&self, x: Obj) -> usize {
        self.class_of[x.idx()]
    }
}

/// The one-object groupoid `BK` with the elements of `K` as arrows.
pub fn b_group(k: &FiniteGroup) -> FiniteGroupoid {
    let n = k.order();
    let src = vec![Obj(0); n as usize];
    let tgt = vec![Obj(0); n as usize];
    let unit = vec![Arr(k.identity())];
    let inv = (0..n).map(|a| Arr(k.inv(a))).collect();
    let mut comp = BTreeMap::new();
    for a in 0..n {
        for b in 0..n {
            comp.insert((Arr(a), Arr(b)), Arr(k.mul(a, b)));
        }
    }
    FiniteGroupoid::from_tables(1, src, tgt, unit, inv, comp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::are_isomorphic;

    #[test]
    fn unit_groupoid_is_valid() {
        let g = FiniteGroupoid::trivial(1);
        assert!(g.validate().is_valid());
        assert_eq!(g.arrow_count(), 1);
        let empty = FiniteGroupoid::trivial(0);
        assert!(empty.validate().is_valid());
        assert_eq!(empty.object_count(), 0);
        let three = FiniteGroupoid::trivial(3);
        assert!(three.validate().is_valid());
        assert_eq!(three.coarse_quotient().class_count(), 3);
    }

    #[test]
    fn missing_inverse_is_witnessed() {
        // Two objects, units plus one arrow a -> b whose declared inverse is
        // itself; s(g^-1) = t(g) then fails, the "inv missing" witness.
        let mut comp = BTreeMap::new();
        comp.insert((Arr(0), Arr(0)), Arr(0));
        comp.insert((Arr(1), Arr(1)), Arr(1));
        comp.insert((Arr(2), Arr(0)), Arr(2));
        comp.insert((Arr(1), Arr(2)), Arr(2));
        let g = FiniteGroupoid::from_tables(
            2,
            vec![Obj(0), Obj(1), Obj(0)],
            vec![Obj(0), Obj(1), Obj(1)],
            vec![Arr(0), Arr(1)],
            vec![Arr(0), Arr(1), Arr(2)],
            comp,
        );
        let report = g.validate();
        assert!(!report.is_valid());
        assert!(report
            .violations
            .contains(&AxiomViolation::InvSource { g: Arr(2) }));
    }

    #[test]
    fn dangling_id_is_structural() {
        let g = FiniteGroupoid::from_tables(
            1,
            vec![Obj(5)],
            vec![Obj(0)],
            vec![Arr(0)],
            vec![Arr(0)],
            BTreeMap::new(),
        );
        let report = g.validate();
        assert!(!report.structural.is_empty());
        assert!(report.violations.is_empty());
    }

    #[test]
    fn b_group_of_s3_has_six_stabilizer_arrows() {
        let (s3, _) = FiniteGroup::symmetric(3);
        let g = b_group(&s3);
        assert!(g.validate().is_valid());
        assert_eq!(g.arrow_count(), 6);
        let stab = g.stabilizer(Obj(0));
        assert_eq!(stab.arrows.len(), 6);
        assert!(are_isomorphic(&stab.group, &s3));
    }

    #[test]
    fn b_group_of_z2() {
        let g = b_group(&FiniteGroup::cyclic(2));
        assert!(g.validate().is_valid());
        assert_eq!(g.object_count(), 1);
        assert_eq!(g.arrow_count(), 2);
    }

    #[test]
    fn pair_groupoid_is_connected_with_trivial_stabilizers() {
        let g = FiniteGroupoid::pair(3);
        assert!(g.validate().is_valid());
        assert_eq!(g.coarse_quotient().class_count(), 1);
        for x in g.objects() {
            assert_eq!(g.stabilizer(x).arrows.len(), 1);
        }
    }

    #[test]
    fn inv_is_an_involution() {
        let g = FiniteGroupoid::pair(4);
        for a in g.arrows() {
            assert_eq!(g.inv(g.inv(a)), a);
        }
    }

    #[test]
    fn opposite_reverses_arrows() {
        let g = b_group(&FiniteGroup::cyclic(4));
        let op = g.opposite();
        assert!(op.validate().is_valid());
        for a in g.arrows() {
            assert_eq!(op.src(a), g.tgt(a));
            assert_eq!(op.tgt(a), g.src(a));
        }
        assert_eq!(op.opposite(), g);
    }

    #[test]
    fn disjoint_union_validates() {
        let g = b_group(&FiniteGroup::cyclic(2)).disjoint_union(&FiniteGroupoid::trivial(1));
        assert!(g.validate().is_valid());
        assert_eq!(g.coarse_quotient().class_count(), 2);
    }
}
