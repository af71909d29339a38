//! Descent for maps out of a finite set: covers, descent data, gluing, and
//! the stack property.
//!
//! The base is a finite set `M` and a cover is any family of subsets whose
//! union is `M`; parts may overlap, and the Čech combinatorics lives in the
//! overlaps. A descent datum assigns a bibundle `ψ_α: U_α -> G` to each part
//! (the part as a trivial groupoid) and transition 2-isomorphisms
//! `χ_{αβ}: ψ_α|U_{αβ} -> ψ_β|U_{αβ}` subject to normalization and the
//! cocycle condition, read left-to-right: applying `χ_{αβ}`, then `χ_{βγ}`,
//! then `χ_{γα}` is the identity on the triple overlap.
//!
//! Gluing quotients the disjoint union of the local totals by the
//! transitions; the cocycle condition makes every class meet each covering
//! part in exactly one representative, and representatives are taken from
//! the least part index.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::bibundle::{two_isos, validate_bibundle, Bibundle, TwoIso};
use crate::group::FiniteGroup;
use crate::groupoid::{Arr, FiniteGroupoid, Obj};

/// A cover of the finite set `{0, .., base_size-1}` by subsets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cover {
    pub base_size: u32,
    /// Parts as sorted point lists.
    pub parts: Vec<Vec<u32>>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DescentError {
    #[error("cover misses point {point}")]
    NotCovering { point: u32 },
    #[error("cover part {part} lists point {point} out of range")]
    PointOutOfRange { part: usize, point: u32 },
    #[error("index mismatch: {0}")]
    IndexMismatch(String),
    #[error("cocycle violated on triple ({alpha}, {beta}, {gamma}) at point {point}")]
    CocycleViolation {
        alpha: usize,
        beta: usize,
        gamma: usize,
        point: u32,
    },
    #[error("invalid descent datum: {0}")]
    Invalid(String),
}

impl Cover {
    pub fn new(base_size: u32, mut parts: Vec<Vec<u32>>) -> Cover {
        for part in &mut parts {
            part.sort();
            part.dedup();
        }
        Cover { base_size, parts }
    }

    pub fn validate(&self) -> Result<(), DescentError> {
        let mut covered = vec![false; self.base_size as usize];
        for (i, part) in self.parts.iter().enumerate() {
            for &p in part {
                if p >= self.base_size {
                    return Err(DescentError::PointOutOfRange { part: i, point: p });
                }
                covered[p as usize] = true;
            }
        }
        if let Some(p) = covered.iter().position(|&c| !c) {
            return Err(DescentError::NotCovering { point: p as u32 });
        }
        Ok(())
    }

    /// Local index of a global point within a part.
    pub fn local_index(&self, part: usize, point: u32) -> Option<u32> {
        self.parts[part].binary_search(&point).ok().map(|i| i as u32)
    }

    /// Global points of the overlap `U_{αβ}`.
    pub fn overlap(&self, a: usize, b: usize) -> Vec<u32> {
        self.parts[a]
            .iter()
            .copied()
            .filter(|p| self.parts[b].binary_search(p).is_ok())
            .collect()
    }

    /// Parts containing a point, ascending.
    pub fn parts_containing(&self, point: u32) -> Vec<usize> {
        (0..self.parts.len())
            .filter(|&i| self.parts[i].binary_search(&point).is_ok())
            .collect()
    }
}

/// A descent datum: local bibundles over the parts plus transition
/// 2-isomorphisms over the overlaps.
///
/// The local bundle `ψ_α` has the trivial groupoid on `U_α` as its left leg,
/// with local object `i` standing for the global point `cover.parts[α][i]`.
/// `transitions[(α, β)]` maps each point of `ψ_α`'s total set lying over
/// `U_{αβ}` to a point of `ψ_β`'s total set.
#[derive(Clone, Debug)]
pub struct DescentDatum {
    pub cover: Cover,
    pub target: FiniteGroupoid,
    pub local: Vec<Bibundle>,
    pub transitions: BTreeMap<(usize, usize), BTreeMap<u32, u32>>,
}

/// A violated descent condition, with a witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DescentViolation {
    LocalInvalid { part: usize, detail: String },
    MissingTransition { alpha: usize, beta: usize },
    ExtraneousTransition { alpha: usize, beta: usize },
    WrongDomain { alpha: usize, beta: usize, point: u32 },
    BasePoint { alpha: usize, beta: usize, point: u32 },
    TargetLeg { alpha: usize, beta: usize, point: u32 },
    Equivariance { alpha: usize, beta: usize, point: u32 },
    NotInjective { alpha: usize, beta: usize, point: u32 },
    IdentityNormalization { alpha: usize, point: u32 },
    InverseNormalization { alpha: usize, beta: usize, point: u32 },
    Cocycle { alpha: usize, beta: usize, gamma: usize, point: u32 },
}

impl fmt::Display for DescentViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use DescentViolation::*;
        match self {
            LocalInvalid { part, detail } => write!(f, "local bundle {part} invalid: {detail}"),
            MissingTransition { alpha, beta } => {
                write!(f, "transition ({alpha}, {beta}) missing over a nonempty overlap")
            }
            ExtraneousTransition { alpha, beta } => {
                write!(f, "transition ({alpha}, {beta}) given over an empty overlap")
            }
            WrongDomain { alpha, beta, point } => write!(
                f,
                "transition ({alpha}, {beta}) has wrong domain at total point {point}"
            ),
            BasePoint { alpha, beta, point } => write!(
                f,
                "transition ({alpha}, {beta}) moves the base point under total point {point}"
            ),
            TargetLeg { alpha, beta, point } => write!(
                f,
                "transition ({alpha}, {beta}) breaks the target leg at total point {point}"
            ),
            Equivariance { alpha, beta, point } => write!(
                f,
                "transition ({alpha}, {beta}) is not equivariant at total point {point}"
            ),
            NotInjective { alpha, beta, point } => write!(
                f,
                "transition ({alpha}, {beta}) is not injective at total point {point}"
            ),
            IdentityNormalization { alpha, point } => write!(
                f,
                "transition ({alpha}, {alpha}) is not the identity at total point {point}"
            ),
            InverseNormalization { alpha, beta, point } => write!(
                f,
                "transitions ({alpha}, {beta}) and ({beta}, {alpha}) are not inverse at total point {point}"
            ),
            Cocycle { alpha, beta, gamma, point } => write!(
                f,
                "cocycle fails on triple ({alpha}, {beta}, {gamma}) at total point {point}"
            ),
        }
    }
}

/// Validation outcome for a descent datum.
#[derive(Clone, Debug, Default)]
pub struct DescentReport {
    pub structural: Vec<String>,
    pub violations: Vec<DescentViolation>,
}

impl DescentReport {
    pub fn is_valid(&self) -> bool {
        self.structural.is_empty() && self.violations.is_empty()
    }
}

impl fmt::Display for DescentReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return writeln!(f, "descent datum is valid");
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

impl DescentDatum {
    /// Global base point of a total-set point of `ψ_α`.
    fn global_base(&self, alpha: usize, p: u32) -> u32 {
        self.cover.parts[alpha][self.local[alpha].s_p(p).idx()]
    }

    /// Points of `ψ_α`'s total set lying over the overlap `U_{αβ}`.
    fn points_over_overlap(&self, alpha: usize, beta: usize) -> Vec<u32> {
        self.local[alpha]
            .points()
            .filter(|&p| {
                let global = self.global_base(alpha, p);
                self.cover.local_index(beta, global).is_some()
            })
            .collect()
    }
}

/// Checks local bundles, transition shape, normalization, and the cocycle
/// condition on all triple overlaps; every violation carries a witness.
pub fn validate_descent(d: &DescentDatum) -> DescentReport {
    let mut report = DescentReport::default();
    if let Err(e) = d.cover.validate() {
        report.structural.push(e.to_string());
    }
    if d.local.len() != d.cover.parts.len() {
        report
            .structural
            .push("one local bundle per cover part required".into());
    }
    if !report.structural.is_empty() {
        return report;
    }
    for (i, psi) in d.local.iter().enumerate() {
        let expected = FiniteGroupoid::trivial(d.cover.parts[i].len() as u32);
        if psi.left != expected {
            report.structural.push(format!(
                "local bundle {i} does not have the trivial groupoid on its part as left leg"
            ));
            continue;
        }
        if psi.right != d.target {
            report
                .structural
                .push(format!("local bundle {i} has the wrong target groupoid"));
            continue;
        }
        let r = validate_bibundle(psi);
        if !r.is_valid() {
            report.violations.push(DescentViolation::LocalInvalid {
                part: i,
                detail: r.to_string().trim().to_string(),
            });
        }
    }
    if !report.violations.is_empty() || !report.structural.is_empty() {
        return report;
    }
    let nparts = d.cover.parts.len();
    // Transition shape: defined exactly over nonempty overlaps, with the
    // right domain, preserving base point and target leg, equivariantly and
    // injectively.
    for a in 0..nparts {
        for b in 0..nparts {
            let overlap = d.cover.overlap(a, b);
            let trans = d.transitions.get(&(a, b));
            if overlap.is_empty() {
                if trans.is_some() {
                    report
                        .violations
                        .push(DescentViolation::ExtraneousTransition { alpha: a, beta: b });
                }
                continue;
            }
            let trans = match trans {
                Some(t) => t,
                None => {
                    report
                        .violations
                        .push(DescentViolation::MissingTransition { alpha: a, beta: b });
                    continue;
                }
            };
            let domain: BTreeSet<u32> = d.points_over_overlap(a, b).into_iter().collect();
            let keys: BTreeSet<u32> = trans.keys().copied().collect();
            if keys != domain {
                let witness = keys
                    .symmetric_difference(&domain)
                    .next()
                    .copied()
                    .unwrap_or(0);
                report.violations.push(DescentViolation::WrongDomain {
                    alpha: a,
                    beta: b,
                    point: witness,
                });
                continue;
            }
            let mut seen = BTreeSet::new();
            for (&p, &q) in trans {
                if q >= d.local[b].size() {
                    report.violations.push(DescentViolation::WrongDomain {
                        alpha: a,
                        beta: b,
                        point: p,
                    });
                    continue;
                }
                if !seen.insert(q) {
                    report.violations.push(DescentViolation::NotInjective {
                        alpha: a,
                        beta: b,
                        point: p,
                    });
                }
                if d.global_base(a, p) != d.global_base(b, q) {
                    report.violations.push(DescentViolation::BasePoint {
                        alpha: a,
                        beta: b,
                        point: p,
                    });
                }
                if d.local[a].t_p(p) != d.local[b].t_p(q) {
                    report.violations.push(DescentViolation::TargetLeg {
                        alpha: a,
                        beta: b,
                        point: p,
                    });
                }
                // Right equivariance; the action preserves base points, so
                // the image stays over the overlap.
                for h in d.target.arrows_into(d.local[a].t_p(p)) {
                    let ph = d.local[a].right_apply(p, h).expect("matching arrow acts");
                    let qh = d.local[b].right_apply(q, h).expect("matching arrow acts");
                    if trans.get(&ph) != Some(&qh) {
                        report.violations.push(DescentViolation::Equivariance {
                            alpha: a,
                            beta: b,
                            point: p,
                        });
                        break;
                    }
                }
            }
        }
    }
    if !report.violations.is_empty() {
        return report;
    }
    // Normalization.
    for a in 0..nparts {
        if let Some(trans) = d.transitions.get(&(a, a)) {
            for (&p, &q) in trans {
                if p != q {
                    report
                        .violations
                        .push(DescentViolation::IdentityNormalization { alpha: a, point: p });
                }
            }
        }
    }
    for (&(a, b), trans) in &d.transitions {
        if a >= b {
            continue;
        }
        if let Some(back) = d.transitions.get(&(b, a)) {
            for (&p, &q) in trans {
                if back.get(&q) != Some(&p) {
                    report.violations.push(DescentViolation::InverseNormalization {
                        alpha: a,
                        beta: b,
                        point: p,
                    });
                }
            }
        }
    }
    // Cocycle on triple overlaps: χ_{αβ} then χ_{βγ} then χ_{γα} = id.
    for a in 0..nparts {
        for b in 0..nparts {
            for c in 0..nparts {
                if a == b || b == c || a == c {
                    continue;
                }
                let (tab, tbc, tca) = match (
                    d.transitions.get(&(a, b)),
                    d.transitions.get(&(b, c)),
                    d.transitions.get(&(c, a)),
                ) {
                    (Some(x), Some(y), Some(z)) => (x, y, z),
                    _ => continue,
                };
                for p in d.local[a].points() {
                    let global = d.global_base(a, p);
                    let in_all = d.cover.local_index(b, global).is_some()
                        && d.cover.local_index(c, global).is_some();
                    if !in_all {
                        continue;
                    }
                    let round = tab
                        .get(&p)
                        .and_then(|q| tbc.get(q))
                        .and_then(|r| tca.get(r));
                    if round != Some(&p) {
                        report.violations.push(DescentViolation::Cocycle {
                            alpha: a,
                            beta: b,
                            gamma: c,
                            point: p,
                        });
                    }
                }
            }
        }
    }
    report
}

/// Restricts a bibundle `M -> G` to a cover: local bundles are the total-set
/// fibers over each part, and all transitions are identities on common
/// points.
pub fn restrict(psi: &Bibundle, cover: &Cover) -> Result<DescentDatum, DescentError> {
    cover.validate()?;
    if psi.left != FiniteGroupoid::trivial(cover.base_size) {
        return Err(DescentError::IndexMismatch(
            "bundle is not over the trivial groupoid on the base set".into(),
        ));
    }
    let mut local = Vec::new();
    let mut originals: Vec<Vec<u32>> = Vec::new();
    for part in &cover.parts {
        let keep: Vec<u32> = psi
            .points()
            .filter(|&p| part.binary_search(&psi.s_p(p).0).is_ok())
            .collect();
        let reindex: BTreeMap<u32, u32> = keep
            .iter()
            .enumerate()
            .map(|(i, &p)| (p, i as u32))
            .collect();
        let left = FiniteGroupoid::trivial(part.len() as u32);
        let src: Vec<Obj> = keep
            .iter()
            .map(|&p| {
                Obj(part
                    .binary_search(&psi.s_p(p).0)
                    .expect("kept point lies over the part") as u32)
            })
            .collect();
        let tgt: Vec<Obj> = keep.iter().map(|&p| psi.t_p(p)).collect();
        let mut left_act = BTreeMap::new();
        for (i, _) in keep.iter().enumerate() {
            // Only units act on the left of a trivial groupoid.
            left_act.insert((left.unit(src[i]), i as u32), i as u32);
        }
        let mut right_act = BTreeMap::new();
        for (i, &p) in keep.iter().enumerate() {
            for h in psi.right.arrows_into(psi.t_p(p)) {
                let ph = psi.right_apply(p, h).expect("matching arrow acts");
                right_act.insert((i as u32, h), reindex[&ph]);
            }
        }
        local.push(Bibundle::from_tables(
            left,
            psi.right.clone(),
            src,
            tgt,
            left_act,
            right_act,
        ));
        originals.push(keep);
    }
    let mut transitions = BTreeMap::new();
    for a in 0..cover.parts.len() {
        for b in 0..cover.parts.len() {
            if cover.overlap(a, b).is_empty() {
                continue;
            }
            let to_index: BTreeMap<u32, u32> = originals[b]
                .iter()
                .enumerate()
                .map(|(i, &p)| (p, i as u32))
                .collect();
            let mut map = BTreeMap::new();
            for (i, &p) in originals[a].iter().enumerate() {
                let global = psi.s_p(p).0;
                if cover.local_index(b, global).is_some() {
                    map.insert(i as u32, to_index[&p]);
                }
            }
            transitions.insert((a, b), map);
        }
    }
    Ok(DescentDatum {
        cover: cover.clone(),
        target: psi.right.clone(),
        local,
        transitions,
    })
}

/// Glues a valid descent datum into a bibundle `M -> G`. The total set is
/// the disjoint union of the local totals modulo the transitions; each class
/// takes its representative from the least part index.
pub fn glue(d: &DescentDatum) -> Result<Bibundle, DescentError> {
    let report = validate_descent(d);
    if !report.is_valid() {
        if let Some(DescentViolation::Cocycle { alpha, beta, gamma, point }) = report
            .violations
            .iter()
            .find(|v| matches!(v, DescentViolation::Cocycle { .. }))
        {
            return Err(DescentError::CocycleViolation {
                alpha: *alpha,
                beta: *beta,
                gamma: *gamma,
                point: *point,
            });
        }
        let detail = report
            .structural
            .first()
            .cloned()
            .or_else(|| report.violations.first().map(|v| v.to_string()))
            .unwrap_or_default();
        return Err(DescentError::Invalid(detail));
    }
    // Disjoint union indexing: (part, point) -> flat index.
    let mut offsets = Vec::with_capacity(d.local.len());
    let mut total = 0u32;
    for psi in &d.local {
        offsets.push(total);
        total += psi.size();
    }
    let flat = |part: usize, p: u32| offsets[part] + p;
    let mut parent: Vec<u32> = (0..total).collect();
    fn root(parent: &mut [u32], mut i: u32) -> u32 {
        while parent[i as usize] != i {
            parent[i as usize] = parent[parent[i as usize] as usize];
            i = parent[i as usize];
        }
        i
    }
    for (&(a, b), trans) in &d.transitions {
        for (&p, &q) in trans {
            let (i, j) = (flat(a, p), flat(b, q));
            let (ri, rj) = (root(&mut parent, i), root(&mut parent, j));
            if ri < rj {
                parent[rj as usize] = ri;
            } else {
                parent[ri as usize] = rj;
            }
        }
    }
    let mut reps: Vec<u32> = (0..total).filter(|&i| root(&mut parent, i) == i).collect();
    reps.sort();
    let class_index: BTreeMap<u32, u32> = reps
        .iter()
        .enumerate()
        .map(|(c, &r)| (r, c as u32))
        .collect();
    let unflatten = |i: u32| -> (usize, u32) {
        let part = offsets
            .iter()
            .rposition(|&o| o <= i)
            .expect("offsets start at 0");
        (part, i - offsets[part])
    };
    // The cocycle guarantees one representative per covering part: verify.
    let mut members: Vec<BTreeMap<usize, usize>> = vec![BTreeMap::new(); reps.len()];
    for i in 0..total {
        let r = root(&mut parent, i);
        let c = class_index[&r] as usize;
        let (part, _) = unflatten(i);
        *members[c].entry(part).or_insert(0) += 1;
    }
    for (c, &r) in reps.iter().enumerate() {
        let (part, p) = unflatten(r);
        let global = d.global_base(part, p);
        for containing in d.cover.parts_containing(global) {
            if members[c].get(&containing) != Some(&1) {
                return Err(DescentError::Invalid(format!(
                    "class {c} does not meet part {containing} exactly once"
                )));
            }
        }
    }
    let left = FiniteGroupoid::trivial(d.cover.base_size);
    let src: Vec<Obj> = reps
        .iter()
        .map(|&r| {
            let (part, p) = unflatten(r);
            Obj(d.global_base(part, p))
        })
        .collect();
    let tgt: Vec<Obj> = reps
        .iter()
        .map(|&r| {
            let (part, p) = unflatten(r);
            d.local[part].t_p(p)
        })
        .collect();
    let mut left_act = BTreeMap::new();
    for (c, &x) in src.iter().enumerate() {
        left_act.insert((left.unit(x), c as u32), c as u32);
    }
    let mut right_act = BTreeMap::new();
    for (c, &r) in reps.iter().enumerate() {
        let (part, p) = unflatten(r);
        for h in d.target.arrows_into(d.local[part].t_p(p)) {
            let ph = d.local[part].right_apply(p, h).expect("matching arrow acts");
            let rep = root(&mut parent, flat(part, ph));
            right_act.insert((c as u32, h), class_index[&rep]);
        }
    }
    let glued = Bibundle::from_tables(left, d.target.clone(), src, tgt, left_act, right_act);
    let r = validate_bibundle(&glued);
    if !r.is_valid() {
        return Err(DescentError::Invalid(r.to_string().trim().to_string()));
    }
    Ok(glued)
}

/// An isomorphism of descent data: per-part 2-isomorphisms compatible with
/// the transitions on overlaps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DescentIso {
    /// Per part, the total-set map of the 2-isomorphism.
    pub maps: Vec<Vec<u32>>,
}

/// All isomorphisms of descent data, in lexicographic order. Backtracks part
/// by part over local 2-isomorphisms, pruning on the overlap compatibility
/// `χ'_{αβ} ∘ η_α = η_β ∘ χ_{αβ}`.
pub fn descent_isos(d1: &DescentDatum, d2: &DescentDatum) -> Vec<DescentIso> {
    if d1.cover != d2.cover || d1.target != d2.target {
        return Vec::new();
    }
    let nparts = d1.cover.parts.len();
    let per_part: Vec<Vec<TwoIso>> = (0..nparts)
        .map(|a| two_isos(&d1.local[a], &d2.local[a]))
        .collect();
    descent_isos_from_parts(d1, d2, &per_part)
}

/// As [`descent_isos`], with the per-part 2-isomorphism lists supplied by
/// the caller (they depend only on the local bundles, not the transitions).
fn descent_isos_from_parts(
    d1: &DescentDatum,
    d2: &DescentDatum,
    per_part: &[Vec<TwoIso>],
) -> Vec<DescentIso> {
    let mut out = Vec::new();
    let mut chosen: Vec<usize> = Vec::new();

    fn compatible(
        d1: &DescentDatum,
        d2: &DescentDatum,
        per_part: &[Vec<TwoIso>],
        chosen: &[usize],
        a: usize,
        b: usize,
    ) -> bool {
        // For points of part a over the overlap: χ'_{ab}(η_a(p)) = η_b(χ_{ab}(p)).
        let (t1, t2) = match (d1.transitions.get(&(a, b)), d2.transitions.get(&(a, b))) {
            (Some(x), Some(y)) => (x, y),
            _ => return true,
        };
        let eta_a = &per_part[a][chosen[a]].map;
        let eta_b = &per_part[b][chosen[b]].map;
        for (&p, &q) in t1 {
            let lhs = t2.get(&eta_a[p as usize]);
            let rhs = eta_b[q as usize];
            if lhs != Some(&rhs) {
                return false;
            }
        }
        true
    }

    fn rec(
        d1: &DescentDatum,
        d2: &DescentDatum,
        per_part: &[Vec<TwoIso>],
        chosen: &mut Vec<usize>,
        out: &mut Vec<DescentIso>,
    ) {
        let a = chosen.len();
        if a == per_part.len() {
            out.push(DescentIso {
                maps: chosen
                    .iter()
                    .enumerate()
                    .map(|(i, &c)| per_part[i][c].map.clone())
                    .collect(),
            });
            return;
        }
        for c in 0..per_part[a].len() {
            chosen.push(c);
            let ok = (0..=a).all(|b| {
                compatible(d1, d2, per_part, chosen, a, b)
                    && compatible(d1, d2, per_part, chosen, b, a)
            });
            if ok {
                rec(d1, d2, per_part, chosen, out);
            }
            chosen.pop();
        }
    }

    rec(d1, d2, per_part, &mut chosen, &mut out);
    out.sort_by(|x, y| x.maps.cmp(&y.maps));
    out
}

/// The first isomorphism of descent data, if any.
pub fn find_descent_iso(d1: &DescentDatum, d2: &DescentDatum) -> Option<DescentIso> {
    descent_isos(d1, d2).into_iter().next()
}

/// The 2-isomorphism of glued bundles induced by an isomorphism of descent
/// data: classes map through any representative, and compatibility makes
/// this well defined. Returns `None` if the induced map is inconsistent or
/// not a 2-isomorphism.
pub fn glue_iso(
    d1: &DescentDatum,
    d2: &DescentDatum,
    iso: &DescentIso,
    glued1: &Bibundle,
    glued2: &Bibundle,
) -> Option<TwoIso> {
    let class1 = glue_classes(d1)?;
    let class2 = glue_classes(d2)?;
    glue_iso_with_classes(iso, glued1, glued2, &class1, &class2)
}

fn glue_iso_with_classes(
    iso: &DescentIso,
    glued1: &Bibundle,
    glued2: &Bibundle,
    class1: &BTreeMap<(usize, u32), u32>,
    class2: &BTreeMap<(usize, u32), u32>,
) -> Option<TwoIso> {
    let mut map = vec![u32::MAX; glued1.size() as usize];
    for (part, local_map) in iso.maps.iter().enumerate() {
        for (p, &q) in local_map.iter().enumerate() {
            let c1 = class1[&(part, p as u32)];
            let c2 = class2[&(part, q)];
            if map[c1 as usize] != u32::MAX && map[c1 as usize] != c2 {
                return None;
            }
            map[c1 as usize] = c2;
        }
    }
    if map.contains(&u32::MAX) {
        return None;
    }
    let candidate = TwoIso { map };
    candidate.validate(glued1, glued2).then_some(candidate)
}

/// The glued class of each (part, local point), matching the class order
/// produced by [`glue`].
fn glue_classes(d: &DescentDatum) -> Option<BTreeMap<(usize, u32), u32>> {
    let mut offsets = Vec::with_capacity(d.local.len());
    let mut total = 0u32;
    for psi in &d.local {
        offsets.push(total);
        total += psi.size();
    }
    let mut parent: Vec<u32> = (0..total).collect();
    fn root(parent: &mut [u32], mut i: u32) -> u32 {
        while parent[i as usize] != i {
            parent[i as usize] = parent[parent[i as usize] as usize];
            i = parent[i as usize];
        }
        i
    }
    for (&(a, b), trans) in &d.transitions {
        for (&p, &q) in trans {
            let (i, j) = (offsets[a] + p, offsets[b] + q);
            let (ri, rj) = (root(&mut parent, i), root(&mut parent, j));
            if ri < rj {
                parent[rj as usize] = ri;
            } else {
                parent[ri as usize] = rj;
            }
        }
    }
    let mut reps: Vec<u32> = (0..total).filter(|&i| root(&mut parent, i) == i).collect();
    reps.sort();
    let class_index: BTreeMap<u32, u32> = reps
        .iter()
        .enumerate()
        .map(|(c, &r)| (r, c as u32))
        .collect();
    let mut out = BTreeMap::new();
    for (part, psi) in d.local.iter().enumerate() {
        for p in psi.points() {
            let r = root(&mut parent, offsets[part] + p);
            out.insert((part, p), *class_index.get(&r)?);
        }
    }
    Some(out)
}

/// Outcome of the stack-property check.
#[derive(Clone, Debug)]
pub struct StackReport {
    /// Enumeration was exhaustive (within the documented bounds), as opposed
    /// to a seeded sample.
    pub exhaustive: bool,
    /// Seed of the deterministic sampler, recorded when sampling.
    pub seed: Option<u64>,
    pub data_count: usize,
    /// Data with no isomorphism to the restriction of their gluing.
    pub surjectivity_failures: usize,
    pub pairs_checked: usize,
    /// Pairs where descent isomorphisms and 2-isomorphisms of glued bundles
    /// fail to correspond bijectively.
    pub fullness_failures: usize,
}

impl StackReport {
    pub fn passed(&self) -> bool {
        self.surjectivity_failures == 0 && self.fullness_failures == 0
    }
}

impl fmt::Display for StackReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "mode: {}",
            if self.exhaustive {
                "exhaustive".to_string()
            } else {
                format!("sampled (seed {})", self.seed.unwrap_or(0))
            }
        )?;
        writeln!(f, "descent data checked: {}", self.data_count)?;
        writeln!(
            f,
            "glue-restrict round trips failing: {}",
            self.surjectivity_failures
        )?;
        writeln!(f, "pairs checked for fullness: {}", self.pairs_checked)?;
        writeln!(f, "fullness failures: {}", self.fullness_failures)?;
        write!(f, "verdict: {}", if self.passed() { "pass" } else { "fail" })
    }
}

/// Bounds under which the enumeration is exhaustive.
fn exhaustive_bounds(cover: &Cover, target: &FiniteGroupoid) -> bool {
    cover.base_size <= 3 && cover.parts.len() <= 3 && target.arrow_count() <= 6
}

/// Enumerates (or samples) valid descent data over the cover, with canonical
/// local bundles, and checks the two halves of the stack property: every
/// datum is isomorphic to the restriction of its gluing, and descent
/// isomorphisms correspond bijectively to 2-isomorphisms of glued bundles.
///
/// Exhaustive iff `|M| <= 3`, at most 3 parts, and `|G₁| <= 6`; otherwise a
/// deterministic sample drawn from the given seed, recorded in the report.
pub fn check_stack_property(
    cover: &Cover,
    target: &FiniteGroupoid,
    seed: u64,
    max_samples: usize,
) -> Result<StackReport, DescentError> {
    cover.validate()?;
    let exhaustive = exhaustive_bounds(cover, target);
    let data = if exhaustive {
        enumerate_descent_data(cover, target)
    } else {
        sample_descent_data(cover, target, seed, max_samples)
    };
    let mut surjectivity_failures = 0usize;
    let mut glued = Vec::with_capacity(data.len());
    let mut classes = Vec::with_capacity(data.len());
    for d in &data {
        debug_assert!(validate_descent(d).is_valid());
        let g = glue(d)?;
        let restricted = restrict(&g, cover)?;
        if find_descent_iso(d, &restricted).is_none() {
            surjectivity_failures += 1;
        }
        glued.push(g);
        classes.push(glue_classes(d).expect("classes of a glueable datum"));
    }
    // Group data by their local-bundle vectors: per-part 2-isomorphism
    // lists depend only on those, so one computation serves every pair of
    // the same two groups.
    let mut group_of: Vec<usize> = Vec::with_capacity(data.len());
    let mut group_reps: Vec<usize> = Vec::new();
    for (i, d) in data.iter().enumerate() {
        match group_reps.iter().position(|&r| data[r].local == d.local) {
            Some(gi) => group_of.push(gi),
            None => {
                group_of.push(group_reps.len());
                group_reps.push(i);
            }
        }
    }
    let nparts = cover.parts.len();
    let mut part_iso_cache: BTreeMap<(usize, usize), Vec<Vec<TwoIso>>> = BTreeMap::new();
    let mut pairs_checked = 0usize;
    let mut fullness_failures = 0usize;
    let mut check_pair = |i: usize, j: usize| -> bool {
        let key = (group_of[i], group_of[j]);
        let per_part = part_iso_cache.entry(key).or_insert_with(|| {
            (0..nparts)
                .map(|a| two_isos(&data[i].local[a], &data[j].local[a]))
                .collect()
        });
        let d_isos = descent_isos_from_parts(&data[i], &data[j], per_part);
        let t_isos = two_isos(&glued[i], &glued[j]);
        // The gluing map on isomorphisms must be a bijection.
        let mut images: BTreeSet<Vec<u32>> = BTreeSet::new();
        for iso in &d_isos {
            match glue_iso_with_classes(iso, &glued[i], &glued[j], &classes[i], &classes[j]) {
                Some(t) => {
                    if !images.insert(t.map) {
                        return false; // not injective
                    }
                }
                None => return false, // not well defined
            }
        }
        images.len() == t_isos.len() && t_isos.iter().all(|t| images.contains(&t.map))
    };
    if exhaustive {
        for i in 0..data.len() {
            for j in 0..data.len() {
                pairs_checked += 1;
                if !check_pair(i, j) {
                    fullness_failures += 1;
                }
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
        for _ in 0..max_samples.max(1) {
            if data.is_empty() {
                break;
            }
            let i = rng.gen_range(0..data.len());
            let j = rng.gen_range(0..data.len());
            pairs_checked += 1;
            if !check_pair(i, j) {
                fullness_failures += 1;
            }
        }
    }
    Ok(StackReport {
        exhaustive,
        seed: if exhaustive { None } else { Some(seed) },
        data_count: data.len(),
        surjectivity_failures,
        pairs_checked,
        fullness_failures,
    })
}

/// The canonical local bundle over a part: the fiber over local point `i` is
/// the set of target arrows into `y[i]`, with the right action by
/// composition.
fn canonical_local_bundle(part: &[u32], target: &FiniteGroupoid, y: &[Obj]) -> Bibundle {
    let left = FiniteGroupoid::trivial(part.len() as u32);
    let mut points: Vec<(u32, Arr)> = Vec::new();
    for (i, _) in part.iter().enumerate() {
        for h in target.arrows_into(y[i]) {
            points.push((i as u32, h));
        }
    }
    points.sort();
    let index: BTreeMap<(u32, Arr), u32> = points
        .iter()
        .enumerate()
        .map(|(k, &p)| (p, k as u32))
        .collect();
    let src: Vec<Obj> = points.iter().map(|&(i, _)| Obj(i)).collect();
    let tgt: Vec<Obj> = points.iter().map(|&(_, h)| target.src(h)).collect();
    let mut left_act = BTreeMap::new();
    for (k, &(i, _)) in points.iter().enumerate() {
        left_act.insert((left.unit(Obj(i)), k as u32), k as u32);
    }
    let mut right_act = BTreeMap::new();
    for (k, &(i, h)) in points.iter().enumerate() {
        for hp in target.arrows_into(target.src(h)) {
            right_act.insert((k as u32, hp), index[&(i, target.comp(h, hp))]);
        }
    }
    Bibundle::from_tables(left, target.clone(), src, tgt, left_act, right_act)
}

/// Per-point data determining a canonical descent datum: base objects for
/// each containing part and connecting arrows from the least part's base.
/// All transitions follow by composition, so the cocycle holds by
/// construction.
struct PointChoice {
    bases: Vec<Obj>,
    connectors: Vec<Arr>,
}

fn assemble_datum(
    cover: &Cover,
    target: &FiniteGroupoid,
    choices: &BTreeMap<u32, PointChoice>,
) -> DescentDatum {
    let nparts = cover.parts.len();
    // Base choice per (part, local point).
    let mut bases: Vec<Vec<Obj>> = Vec::with_capacity(nparts);
    for (a, part) in cover.parts.iter().enumerate() {
        let mut y = Vec::with_capacity(part.len());
        for &x in part {
            let choice = &choices[&x];
            let slot = cover
                .parts_containing(x)
                .iter()
                .position(|&p| p == a)
                .expect("part contains the point");
            y.push(choice.bases[slot]);
        }
        bases.push(y);
    }
    let local: Vec<Bibundle> = bases
        .iter()
        .enumerate()
        .map(|(a, y)| canonical_local_bundle(&cover.parts[a], target, y))
        .collect();
    // Point index within a canonical bundle: ordered by (local point, arrow).
    let point_index = |a: usize, i: u32, h: Arr| -> u32 {
        let mut k = 0u32;
        for y in bases[a].iter().take(i as usize) {
            k += target.arrows_into(*y).count() as u32;
        }
        for (offset, hp) in target.arrows_into(bases[a][i as usize]).enumerate() {
            if hp == h {
                return k + offset as u32;
            }
        }
        unreachable!("arrow lies in the fiber");
    };
    let mut transitions: BTreeMap<(usize, usize), BTreeMap<u32, u32>> = BTreeMap::new();
    #[allow(clippy::needless_range_loop)]
    for a in 0..nparts {
        for b in 0..nparts {
            let overlap = cover.overlap(a, b);
            if overlap.is_empty() {
                continue;
            }
            let mut map = BTreeMap::new();
            for &x in &overlap {
                let choice = &choices[&x];
                let containing = cover.parts_containing(x);
                let slot_a = containing.iter().position(|&p| p == a).unwrap();
                let slot_b = containing.iter().position(|&p| p == b).unwrap();
                // a_{ab}(x) = conn_b ∘ conn_a⁻¹: y_a(x) -> y_b(x).
                let arrow = target.comp(
                    choice.connectors[slot_b],
                    target.inv(choice.connectors[slot_a]),
                );
                let ia = cover.local_index(a, x).unwrap();
                let ib = cover.local_index(b, x).unwrap();
                for h in target.arrows_into(bases[a][ia as usize]) {
                    let from = point_index(a, ia, h);
                    let to = point_index(b, ib, target.comp(arrow, h));
                    map.insert(from, to);
                }
            }
            transitions.insert((a, b), map);
        }
    }
    DescentDatum {
        cover: cover.clone(),
        target: target.clone(),
        local,
        transitions,
    }
}

/// All valid descent data with canonical local bundles: per point, a base
/// object for each containing part (all in one coarse class) and a
/// connecting arrow per non-least part.
fn enumerate_descent_data(cover: &Cover, target: &FiniteGroupoid) -> Vec<DescentDatum> {
    let mut per_point: Vec<(u32, Vec<PointChoice>)> = Vec::new();
    for x in 0..cover.base_size {
        let containing = cover.parts_containing(x);
        let mut options: Vec<PointChoice> = Vec::new();
        for y0 in target.objects() {
            let mut partial: Vec<(Vec<Obj>, Vec<Arr>)> = vec![(vec![y0], vec![target.unit(y0)])];
            for _ in 1..containing.len() {
                let mut next = Vec::new();
                for (bases, conns) in &partial {
                    for a in target.arrows_from(y0) {
                        let mut b2 = bases.clone();
                        let mut c2 = conns.clone();
                        b2.push(target.tgt(a));
                        c2.push(a);
                        next.push((b2, c2));
                    }
                }
                partial = next;
            }
            for (bases, connectors) in partial {
                options.push(PointChoice { bases, connectors });
            }
        }
        per_point.push((x, options));
    }
    let mut data = Vec::new();
    let mut selection: Vec<usize> = vec![0; per_point.len()];
    loop {
        let choices: BTreeMap<u32, PointChoice> = per_point
            .iter()
            .zip(&selection)
            .map(|((x, opts), &i)| {
                let o = &opts[i];
                (
                    *x,
                    PointChoice {
                        bases: o.bases.clone(),
                        connectors: o.connectors.clone(),
                    },
                )
            })
            .collect();
        data.push(assemble_datum(cover, target, &choices));
        // Advance the odometer over per-point choices.
        let mut pos = 0;
        loop {
            if pos == selection.len() {
                return data;
            }
            selection[pos] += 1;
            if selection[pos] < per_point[pos].1.len() {
                break;
            }
            selection[pos] = 0;
            pos += 1;
        }
    }
}

/// Deterministic sample of valid descent data drawn from a seed.
fn sample_descent_data(
    cover: &Cover,
    target: &FiniteGroupoid,
    seed: u64,
    max_samples: usize,
) -> Vec<DescentDatum> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut data = Vec::new();
    for _ in 0..max_samples {
        let mut choices = BTreeMap::new();
        for x in 0..cover.base_size {
            let containing = cover.parts_containing(x);
            let y0 = Obj(rng.gen_range(0..target.object_count()));
            let mut bases = vec![y0];
            let mut connectors = vec![target.unit(y0)];
            let out: Vec<Arr> = target.arrows_from(y0).collect();
            for _ in 1..containing.len() {
                let a = out[rng.gen_range(0..out.len())];
                bases.push(target.tgt(a));
                connectors.push(a);
            }
            choices.insert(x, PointChoice { bases, connectors });
        }
        data.push(assemble_datum(cover, target, &choices));
    }
    data
}

/// Builds the induced descent datum of a group-valued Čech cocycle over the
/// cover: local bundles `U_α × K` and transitions determined by
/// `k_{αβ}: U_{αβ} -> K` with `k_{αβ} k_{βγ} = k_{αγ}` on triple overlaps.
pub fn cocycle_descent_datum(
    cover: &Cover,
    k: &FiniteGroup,
    transitions: &BTreeMap<(usize, usize), BTreeMap<u32, u32>>,
) -> Result<DescentDatum, DescentError> {
    cover.validate()?;
    let nparts = cover.parts.len();
    let value = |a: usize, b: usize, x: u32| -> Result<u32, DescentError> {
        if a == b {
            return Ok(k.identity());
        }
        transitions
            .get(&(a, b))
            .and_then(|m| m.get(&x))
            .copied()
            .ok_or_else(|| {
                DescentError::IndexMismatch(format!(
                    "cocycle value missing for parts ({a}, {b}) at point {x}"
                ))
            })
    };
    // Normalization and the bundle cocycle k_{ab} k_{bc} = k_{ac} pointwise.
    for a in 0..nparts {
        for b in 0..nparts {
            for &x in &cover.overlap(a, b) {
                let v = value(a, b, x)?;
                let w = value(b, a, x)?;
                if k.mul(v, w) != k.identity() {
                    return Err(DescentError::CocycleViolation {
                        alpha: a,
                        beta: b,
                        gamma: a,
                        point: x,
                    });
                }
                for c in 0..nparts {
                    if cover.local_index(c, x).is_none() {
                        continue;
                    }
                    let u = value(b, c, x)?;
                    let direct = value(a, c, x)?;
                    if k.mul(v, u) != direct {
                        return Err(DescentError::CocycleViolation {
                            alpha: a,
                            beta: b,
                            gamma: c,
                            point: x,
                        });
                    }
                }
            }
        }
    }
    let target = crate::groupoid::b_group(k);
    let local: Vec<Bibundle> = cover
        .parts
        .iter()
        .map(|part| canonical_local_bundle(part, &target, &vec![Obj(0); part.len()]))
        .collect();
    // The fiber over each point is K; the transition at x is left
    // multiplication by k_{αβ}(x)⁻¹, so transitions compose like the cocycle.
    let order = k.order();
    let mut datum_transitions: BTreeMap<(usize, usize), BTreeMap<u32, u32>> = BTreeMap::new();
    for a in 0..nparts {
        for b in 0..nparts {
            let overlap = cover.overlap(a, b);
            if overlap.is_empty() {
                continue;
            }
            let mut map = BTreeMap::new();
            for &x in &overlap {
                let ia = cover.local_index(a, x).unwrap();
                let ib = cover.local_index(b, x).unwrap();
                let c = k.inv(value(a, b, x)?);
                for v in k.elements() {
                    map.insert(ia * order + v, ib * order + k.mul(c, v));
                }
            }
            datum_transitions.insert((a, b), map);
        }
    }
    Ok(DescentDatum {
        cover: cover.clone(),
        target,
        local,
        transitions: datum_transitions,
    })
}

/// Glues a group-valued Čech cocycle directly into a principal bundle
/// `M -> B(K)`: class representatives take the fiber value at the least
/// containing part, so the total is `M × K`. Agrees with [`glue`] on
/// [`cocycle_descent_datum`] up to 2-isomorphism.
pub fn cocycle_to_bundle(
    cover: &Cover,
    k: &FiniteGroup,
    transitions: &BTreeMap<(usize, usize), BTreeMap<u32, u32>>,
) -> Result<Bibundle, DescentError> {
    // Validates the cocycle as a side effect.
    cocycle_descent_datum(cover, k, transitions)?;
    let order = k.order();
    let left = FiniteGroupoid::trivial(cover.base_size);
    let target = crate::groupoid::b_group(k);
    let total = cover.base_size * order;
    let src: Vec<Obj> = (0..total).map(|p| Obj(p / order)).collect();
    let tgt: Vec<Obj> = vec![Obj(0); total as usize];
    let mut left_act = BTreeMap::new();
    for p in 0..total {
        left_act.insert((left.unit(Obj(p / order)), p), p);
    }
    let mut right_act = BTreeMap::new();
    for x in 0..cover.base_size {
        for v in k.elements() {
            for h in k.elements() {
                right_act.insert((x * order + v, Arr(h)), x * order + k.mul(v, h));
            }
        }
    }
    let bundle = Bibundle::from_tables(left, target, src, tgt, left_act, right_act);
    debug_assert!(validate_bibundle(&bundle).is_valid());
    Ok(bundle)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bibundle::find_two_iso;
    use crate::groupoid::b_group;

    fn z2() -> FiniteGroup {
        FiniteGroup::cyclic(2)
    }

    /// The two-part cover of a 2-point set with full overlap; its nerve is a
    /// combinatorial circle (two vertices, two edges).
    fn circle_cover() -> Cover {
        Cover::new(2, vec![vec![0, 1], vec![0, 1]])
    }

    fn constant_cocycle(
        cover: &Cover,
        k: &FiniteGroup,
        value: u32,
    ) -> BTreeMap<(usize, usize), BTreeMap<u32, u32>> {
        let mut out = BTreeMap::new();
        for a in 0..cover.parts.len() {
            for b in 0..cover.parts.len() {
                if a == b || cover.overlap(a, b).is_empty() {
                    continue;
                }
                let v = if a < b { value } else { k.inv(value) };
                let map: BTreeMap<u32, u32> =
                    cover.overlap(a, b).into_iter().map(|x| (x, v)).collect();
                out.insert((a, b), map);
            }
        }
        out
    }

    #[test]
    fn single_part_cover_is_vacuously_valid() {
        let cover = Cover::new(3, vec![vec![0, 1, 2]]);
        let psi = canonical_local_bundle(
            &cover.parts[0],
            &b_group(&z2()),
            &[Obj(0), Obj(0), Obj(0)],
        );
        let mut transitions = BTreeMap::new();
        transitions.insert((0, 0), psi.points().map(|p| (p, p)).collect());
        let d = DescentDatum {
            cover,
            target: b_group(&z2()),
            local: vec![psi],
            transitions,
        };
        assert!(validate_descent(&d).is_valid());
        let glued = glue(&d).unwrap();
        assert_eq!(glued.size(), 6);
    }

    #[test]
    fn two_part_normalized_datum_is_valid() {
        let cover = circle_cover();
        let target = b_group(&z2());
        let data = enumerate_descent_data(&cover, &target);
        // Per point, 2 transition choices: 4 data.
        assert_eq!(data.len(), 4);
        for d in &data {
            assert!(validate_descent(d).is_valid());
        }
    }

    #[test]
    fn negated_transition_fails_with_witness() {
        // Three full parts over two points; negate one transition sheet.
        let cover = Cover::new(2, vec![vec![0, 1], vec![0, 1], vec![0, 1]]);
        let target = b_group(&z2());
        let mut d = enumerate_descent_data(&cover, &target)
            .into_iter()
            .next()
            .expect("enumeration is nonempty");
        assert!(validate_descent(&d).is_valid());
        // Swap the two sheets of χ_{01} over point 0 without touching χ_{10}:
        // the datum can no longer satisfy normalization and the cocycle.
        let t01 = d.transitions.get_mut(&(0, 1)).unwrap();
        let a = t01[&0];
        let b = t01[&1];
        t01.insert(0, b);
        t01.insert(1, a);
        let report = validate_descent(&d);
        assert!(!report.is_valid());
        assert!(report.violations.iter().any(|v| matches!(
            v,
            DescentViolation::Cocycle { .. }
                | DescentViolation::InverseNormalization { .. }
                | DescentViolation::Equivariance { .. }
        )));
        assert!(glue(&d).is_err());
    }

    #[test]
    fn pure_cocycle_negation_is_witnessed_on_the_triple_overlap() {
        // Group-valued version: three parts over one point, one value broken.
        let cover = Cover::new(1, vec![vec![0], vec![0], vec![0]]);
        let k = z2();
        let mut transitions: BTreeMap<(usize, usize), BTreeMap<u32, u32>> = BTreeMap::new();
        let mut ins = |a: usize, b: usize, v: u32| {
            transitions.insert((a, b), [(0u32, v)].into_iter().collect::<BTreeMap<_, _>>());
        };
        ins(0, 1, 1);
        ins(1, 0, 1);
        ins(1, 2, 0);
        ins(2, 1, 0);
        ins(0, 2, 0); // negated: the product around the triple is not 1
        ins(2, 0, 0);
        let err = cocycle_to_bundle(&cover, &k, &transitions).unwrap_err();
        assert!(matches!(err, DescentError::CocycleViolation { .. }));
    }

    #[test]
    fn restrict_then_glue_round_trips() {
        let cover = circle_cover();
        let target = b_group(&z2());
        for d in enumerate_descent_data(&cover, &target) {
            let glued = glue(&d).unwrap();
            let restricted = restrict(&glued, &cover).unwrap();
            assert!(validate_descent(&restricted).is_valid());
            assert!(find_descent_iso(&d, &restricted).is_some());
            // And the other way: glue(restrict(glued)) is 2-isomorphic.
            let reglued = glue(&restricted).unwrap();
            assert!(find_two_iso(&glued, &reglued).is_some());
        }
    }

    #[test]
    fn glue_output_is_always_a_valid_bibundle() {
        let cover = Cover::new(3, vec![vec![0, 1], vec![1, 2], vec![0, 2]]);
        let target = b_group(&FiniteGroup::cyclic(3));
        for d in enumerate_descent_data(&cover, &target) {
            let glued = glue(&d).unwrap();
            assert!(validate_bibundle(&glued).is_valid());
        }
    }

    #[test]
    fn stack_property_for_point_target() {
        let cover = circle_cover();
        let report = check_stack_property(&cover, &FiniteGroupoid::trivial(1), 0, 16).unwrap();
        assert!(report.exhaustive);
        assert!(report.passed());
        assert_eq!(report.data_count, 1);
    }

    #[test]
    fn stack_property_for_b_z2() {
        let cover = circle_cover();
        let report = check_stack_property(&cover, &b_group(&z2()), 0, 16).unwrap();
        assert!(report.exhaustive);
        assert!(report.passed());
        assert_eq!(report.data_count, 4);
    }

    #[test]
    fn stack_property_for_b_z3_three_parts() {
        let cover = Cover::new(2, vec![vec![0, 1], vec![0], vec![1]]);
        let report =
            check_stack_property(&cover, &b_group(&FiniteGroup::cyclic(3)), 0, 16).unwrap();
        assert!(report.exhaustive);
        assert!(report.passed());
    }

    #[test]
    fn sampled_mode_records_seed() {
        // A 4-point base exceeds the exhaustive bounds.
        let cover = Cover::new(4, vec![vec![0, 1, 2], vec![2, 3]]);
        let report = check_stack_property(&cover, &b_group(&z2()), 7, 5).unwrap();
        assert!(!report.exhaustive);
        assert_eq!(report.seed, Some(7));
        assert!(report.passed());
        assert_eq!(report.data_count, 5);
    }

    #[test]
    fn trivial_cocycle_gives_trivial_bundle() {
        let cover = circle_cover();
        let k = z2();
        let transitions = constant_cocycle(&cover, &k, 0);
        let bundle = cocycle_to_bundle(&cover, &k, &transitions).unwrap();
        assert_eq!(bundle.size(), 4);
        assert!(validate_bibundle(&bundle).is_valid());
        // Agreement with glue on the induced datum.
        let datum = cocycle_descent_datum(&cover, &k, &transitions).unwrap();
        assert!(validate_descent(&datum).is_valid());
        let glued = glue(&datum).unwrap();
        assert!(find_two_iso(&bundle, &glued).is_some());
    }

    #[test]
    fn twisted_cocycle_is_the_connected_double_cover_of_the_nerve() {
        // Transition 1 at point 0 and the generator at point 1. The gluing
        // graph on (part, sheet) vertices, one edge per overlap point, is
        // then a single 4-cycle: the connected double cover of the circle
        // nerve. The trivial cocycle gives two disjoint circles.
        let cover = circle_cover();
        let k = z2();
        let mut twisted: BTreeMap<(usize, usize), BTreeMap<u32, u32>> = BTreeMap::new();
        twisted.insert(
            (0, 1),
            [(0u32, 0u32), (1u32, 1u32)].into_iter().collect(),
        );
        twisted.insert(
            (1, 0),
            [(0u32, 0u32), (1u32, 1u32)].into_iter().collect(),
        );
        let components = |trans: &BTreeMap<(usize, usize), BTreeMap<u32, u32>>| -> usize {
            // Vertices: (0, v) -> v, (1, w) -> 2 + w.
            let mut parent: Vec<usize> = (0..4).collect();
            fn root(p: &mut [usize], mut i: usize) -> usize {
                while p[i] != i {
                    p[i] = p[p[i]];
                    i = p[i];
                }
                i
            }
            let t = &trans[&(0, 1)];
            for x in 0..2u32 {
                for v in k.elements() {
                    let w = k.mul(k.inv(t[&x]), v);
                    let (a, b) =
                        (root(&mut parent, v as usize), root(&mut parent, 2 + w as usize));
                    if a != b {
                        parent[a] = b;
                    }
                }
            }
            (0..4).filter(|&i| root(&mut parent, i) == i).count()
        };
        assert_eq!(components(&twisted), 1);
        let trivial = constant_cocycle(&cover, &k, 0);
        assert_eq!(components(&trivial), 2);
        // The twisted datum is still valid and glues to a principal bundle
        // agreeing with the direct construction.
        let datum = cocycle_descent_datum(&cover, &k, &twisted).unwrap();
        assert!(validate_descent(&datum).is_valid());
        let bundle = cocycle_to_bundle(&cover, &k, &twisted).unwrap();
        let glued = glue(&datum).unwrap();
        assert!(find_two_iso(&bundle, &glued).is_some());
    }

    #[test]
    fn product_cocycle_is_componentwise() {
        // K = Z/2 × Z/2 with the value (1, 0) on both overlap points: the
        // glued bundle has fibers of size 4 = 2 × 2 over each point.
        let cover = circle_cover();
        let k4 = FiniteGroup::direct_product(&z2(), &z2());
        let transitions = constant_cocycle(&cover, &k4, 2);
        let bundle = cocycle_to_bundle(&cover, &k4, &transitions).unwrap();
        assert!(validate_bibundle(&bundle).is_valid());
        assert_eq!(bundle.size(), 8);
        let first = constant_cocycle(&cover, &z2(), 1);
        let b1 = cocycle_to_bundle(&cover, &z2(), &first).unwrap();
        let second = constant_cocycle(&cover, &z2(), 0);
        let b2 = cocycle_to_bundle(&cover, &z2(), &second).unwrap();
        let fiber = |b: &Bibundle| b.points().filter(|&p| b.s_p(p) == Obj(0)).count();
        assert_eq!(fiber(&bundle), fiber(&b1) * fiber(&b2));
    }
}
