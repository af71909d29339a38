//! Reference decision procedure for Morita equivalence by brute-force
//! bibundle search. Test-only, and deliberately independent of the library's
//! decision path: it enumerates candidate equivalence bibundles directly and
//! checks principality in the bijection form, never calling
//! `decide_weak_equivalence`, `from_strict_hom`, or `is_equivalence`.
//!
//! Search space: a bibundle whose right action is principal trivializes over
//! each fiber of the source leg (any principal bundle over a point does), so
//! up to 2-isomorphism every candidate has total set
//! `⊔_{x ∈ G₀} t⁻¹(y(x))` for some object assignment `y`, with the right
//! `H`-action by composition; the compatible left `G`-actions then correspond
//! to functor data `a: G₁ -> H₁` over `y`. The oracle enumerates all `y` and
//! all functor assignments by backtracking and tests each induced bundle for
//! two-sided principality from the definition.

use std::collections::BTreeSet;

use grpd_core::groupoid::{Arr, FiniteGroupoid, Obj};

/// Is there an equivalence bibundle `g -> h`? Exhaustive search with
/// functor-axiom pruning; totals are bounded by `|G₀| · |H₁|`.
pub fn equivalence_bundle_exists(g: &FiniteGroupoid, h: &FiniteGroupoid) -> bool {
    if g.object_count() == 0 || h.object_count() == 0 {
        return g.object_count() == 0 && h.object_count() == 0;
    }
    // Odometer over object assignments y: G₀ -> H₀.
    let n_obj = g.object_count() as usize;
    let mut y = vec![0u32; n_obj];
    loop {
        if functor_search(g, h, &y) {
            return true;
        }
        let mut pos = 0;
        loop {
            if pos == n_obj {
                return false;
            }
            y[pos] += 1;
            if y[pos] < h.object_count() {
                break;
            }
            y[pos] = 0;
            pos += 1;
        }
    }
}

/// Backtracking over arrow assignments `a(g): y(s g) -> y(t g)` subject to
/// the functor axioms, testing every complete assignment.
fn functor_search(g: &FiniteGroupoid, h: &FiniteGroupoid, y: &[u32]) -> bool {
    let mut assign: Vec<Option<Arr>> = vec![None; g.arrow_count() as usize];
    for x in g.objects() {
        assign[g.unit(x).idx()] = Some(h.unit(Obj(y[x.idx()])));
    }
    rec(g, h, y, &mut assign)
}

fn propagate(g: &FiniteGroupoid, h: &FiniteGroupoid, assign: &mut [Option<Arr>]) -> bool {
    // Close under inverses and composition until stable or contradictory.
    loop {
        let mut changed = false;
        for a in g.arrows() {
            if let Some(img) = assign[a.idx()] {
                let inv_img = h.inv(img);
                match assign[g.inv(a).idx()] {
                    None => {
                        assign[g.inv(a).idx()] = Some(inv_img);
                        changed = true;
                    }
                    Some(existing) if existing != inv_img => return false,
                    _ => {}
                }
            }
        }
        for a in g.arrows() {
            let img_a = match assign[a.idx()] {
                Some(v) => v,
                None => continue,
            };
            for b in g.arrows_into(g.src(a)) {
                let img_b = match assign[b.idx()] {
                    Some(v) => v,
                    None => continue,
                };
                let ab = g.comp(a, b);
                let img = match h.compose(img_a, img_b) {
                    Some(v) => v,
                    None => return false,
                };
                match assign[ab.idx()] {
                    None => {
                        assign[ab.idx()] = Some(img);
                        changed = true;
                    }
                    Some(existing) if existing != img => return false,
                    _ => {}
                }
            }
        }
        if !changed {
            return true;
        }
    }
}

fn rec(g: &FiniteGroupoid, h: &FiniteGroupoid, y: &[u32], assign: &mut Vec<Option<Arr>>) -> bool {
    let next = g.arrows().find(|a| assign[a.idx()].is_none());
    let a = match next {
        Some(a) => a,
        None => {
            let table: Vec<Arr> = assign.iter().map(|v| v.unwrap()).collect();
            return is_functor(g, h, y, &table) && bundle_is_equivalence(g, h, y, &table);
        }
    };
    let from = Obj(y[g.src(a).idx()]);
    let to = Obj(y[g.tgt(a).idx()]);
    let candidates: Vec<Arr> = h.arrows_between(from, to).collect();
    for img in candidates {
        let saved = assign.clone();
        assign[a.idx()] = Some(img);
        if propagate(g, h, assign) && rec(g, h, y, assign) {
            return true;
        }
        *assign = saved;
    }
    false
}

fn is_functor(g: &FiniteGroupoid, h: &FiniteGroupoid, y: &[u32], table: &[Arr]) -> bool {
    for a in g.arrows() {
        let img = table[a.idx()];
        if h.src(img) != Obj(y[g.src(a).idx()]) || h.tgt(img) != Obj(y[g.tgt(a).idx()]) {
            return false;
        }
        if table[g.inv(a).idx()] != h.inv(img) {
            return false;
        }
    }
    for x in g.objects() {
        if table[g.unit(x).idx()] != h.unit(Obj(y[x.idx()])) {
            return false;
        }
    }
    for a in g.arrows() {
        for b in g.arrows_into(g.src(a)) {
            let ab = g.comp(a, b);
            if h.compose(table[a.idx()], table[b.idx()]) != Some(table[ab.idx()]) {
                return false;
            }
        }
    }
    true
}

/// Builds the candidate total set `{(x, k) | t(k) = y(x)}` with actions
/// `g·(x, k)·h = (t g, a(g) k h)` and checks both principality bijections
/// from the definition.
fn bundle_is_equivalence(
    g: &FiniteGroupoid,
    h: &FiniteGroupoid,
    y: &[u32],
    table: &[Arr],
) -> bool {
    let mut points: Vec<(Obj, Arr)> = Vec::new();
    for x in g.objects() {
        for k in h.arrows_into(Obj(y[x.idx()])) {
            points.push((x, k));
        }
    }
    let index = |x: Obj, k: Arr| -> usize {
        points
            .binary_search(&(x, k))
            .expect("point in the total set")
    };
    let s_p = |p: usize| points[p].0;
    let t_p = |p: usize| h.src(points[p].1);
    // Right principality: (p, k) -> (p, pk) bijects onto same-s_P pairs.
    let mut image: BTreeSet<(usize, usize)> = BTreeSet::new();
    for (p, &(x, k)) in points.iter().enumerate() {
        for kp in h.arrows_into(h.src(k)) {
            let q = index(x, h.comp(k, kp));
            if !image.insert((p, q)) {
                return false;
            }
        }
    }
    let mut expected = 0usize;
    for p in 0..points.len() {
        for q in 0..points.len() {
            if s_p(p) == s_p(q) {
                expected += 1;
            }
        }
    }
    if image.len() != expected {
        return false;
    }
    for x in g.objects() {
        if !points.iter().any(|&(px, _)| px == x) {
            return false;
        }
    }
    // Left principality: (g, p) -> (p, gp) bijects onto same-t_P pairs.
    let mut image: BTreeSet<(usize, usize)> = BTreeSet::new();
    for (p, &(x, k)) in points.iter().enumerate() {
        for a in g.arrows_from(x) {
            let q = index(g.tgt(a), h.comp(table[a.idx()], k));
            if !image.insert((p, q)) {
                return false;
            }
        }
    }
    let mut expected = 0usize;
    for p in 0..points.len() {
        for q in 0..points.len() {
            if t_p(p) == t_p(q) {
                expected += 1;
            }
        }
    }
    if image.len() != expected {
        return false;
    }
    for yy in h.objects() {
        if !points.iter().any(|&(_, k)| h.src(k) == yy) {
            return false;
        }
    }
    true
}
