//! Finite groups as explicit multiplication tables.
//!
//! Elements are dense indices `0..order`. Everything downstream (stabilizer
//! groups, automorphism groups, structure groups of frame bundles) funnels
//! through this representation, so tables are kept small and checks are
//! exhaustive.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::perm::Perm;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GroupError {
    #[error("multiplication table is not square ({rows} rows, expected width {width})")]
    NotSquare { rows: usize, width: usize },
    #[error("entry mul[{a}][{b}] = {value} is out of range")]
    OutOfRange { a: u32, b: u32, value: u32 },
    #[error("no identity element")]
    NoIdentity,
    #[error("element {element} has no inverse")]
    NoInverse { element: u32 },
    #[error("associativity fails at ({a}, {b}, {c})")]
    NotAssociative { a: u32, b: u32, c: u32 },
}

/// A finite group given by its multiplication table.
#[derive(Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    order: u32,
    mul: Vec<u32>, // flattened: mul[a * order + b] = ab
    inv: Vec<u32>,
    identity: u32,
}

impl FiniteGroup {
    pub fn trivial() -> FiniteGroup {
        FiniteGroup {
            order: 1,
            mul: vec![0],
            inv: vec![0],
            identity: 0,
        }
    }

    pub fn cyclic(n: u32) -> FiniteGroup {
        assert!(n >= 1);
        let mut mul = Vec::with_capacity((n * n) as usize);
        for a in 0..n {
            for b in 0..n {
                mul.push((a + b) % n);
            }
        }
        let inv = (0..n).map(|a| (n - a) % n).collect();
        FiniteGroup {
            order: n,
            mul,
            inv,
            identity: 0,
        }
    }

    /// Builds a group from a full table, verifying all group axioms.
    pub fn from_mul_table(table: &[Vec<u32>]) -> Result<FiniteGroup, GroupError> {
        let n = table.len() as u32;
        let mut mul = Vec::with_capacity((n * n) as usize);
        for (a, row) in table.iter().enumerate() {
            if row.len() != n as usize {
                return Err(GroupError::NotSquare {
                    rows: n as usize,
                    width: row.len(),
                });
            }
            for (b, &v) in row.iter().enumerate() {
                if v >= n {
                    return Err(GroupError::OutOfRange {
                        a: a as u32,
                        b: b as u32,
                        value: v,
                    });
                }
                mul.push(v);
            }
        }
        let get = |a: u32, b: u32| mul[(a * n + b) as usize];
        let identity = (0..n)
            .find(|&e| (0..n).all(|a| get(e, a) == a && get(a, e) == a))
            .ok_or(GroupError::NoIdentity)?;
        let mut inv = vec![u32::MAX; n as usize];
        for a in 0..n {
            match (0..n).find(|&b| get(a, b) == identity && get(b, a) == identity) {
                Some(b) => inv[a as usize] = b,
                None => return Err(GroupError::NoInverse { element: a }),
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if get(get(a, b), c) != get(a, get(b, c)) {
                        return Err(GroupError::NotAssociative { a, b, c });
                    }
                }
            }
        }
        Ok(FiniteGroup {
            order: n,
            mul,
            inv,
            identity,
        })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn elements(&self) -> impl Iterator<Item = u32> {
        0..self.order
    }

    pub fn identity(&self) -> u32 {
        self.identity
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.mul[(a * self.order + b) as usize]
    }

    pub fn inv(&self, a: u32) -> u32 {
        self.inv[a as usize]
    }

    pub fn conjugate(&self, a: u32, by: u32) -> u32 {
        self.mul(self.inv(by), self.mul(a, by))
    }

    pub fn element_order(&self, a: u32) -> u32 {
        let mut x = a;
        let mut k = 1;
        while x != self.identity {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn is_abelian(&self) -> bool {
        self.elements()
            .all(|a| self.elements().all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Elements commuting with everything, in index order.
    pub fn center(&self) -> Vec<u32> {
        self.elements()
            .filter(|&a| self.elements().all(|b| self.mul(a, b) == self.mul(b, a)))
            .collect()
    }

    /// Closure of `gens` under multiplication, sorted by element index.
    pub fn subgroup_closure(&self, gens: &[u32]) -> Vec<u32> {
        let mut seen = BTreeSet::new();
        seen.insert(self.identity);
        let mut frontier: Vec<u32> = vec![self.identity];
        while let Some(x) = frontier.pop() {
            for &g in gens {
                let y = self.mul(x, g);
                if seen.insert(y) {
                    frontier.push(y);
                }
            }
        }
        seen.into_iter().collect()
    }

    /// A short generating sequence, chosen greedily by element index.
    pub fn generating_sequence(&self) -> Vec<u32> {
        let mut gens = Vec::new();
        let mut closure = self.subgroup_closure(&gens);
        while closure.len() < self.order as usize {
            let next = self
                .elements()
                .find(|e| closure.binary_search(e).is_err())
                .expect("closure smaller than group");
            gens.push(next);
            closure = self.subgroup_closure(&gens);
        }
        gens
    }

    /// The abstract group on a multiplicatively closed subset, together with
    /// the embedding of its elements. `elements` must be sorted and closed.
    pub fn subgroup(&self, elements: &[u32]) -> (FiniteGroup, Vec<u32>) {
        let index: BTreeMap<u32, u32> = elements
            .iter()
            .enumerate()
            .map(|(i, &e)| (e, i as u32))
            .collect();
        let n = elements.len() as u32;
        let mut mul = Vec::with_capacity((n * n) as usize);
        for &a in elements {
            for &b in elements {
                mul.push(index[&self.mul(a, b)]);
            }
        }
        let inv = elements.iter().map(|&a| index[&self.inv(a)]).collect();
        (
            FiniteGroup {
                order: n,
                mul,
                inv,
                identity: index[&self.identity],
            },
            elements.to_vec(),
        )
    }

    /// Direct product with elements paired lexicographically: `(a, b) -> a * |B| + b`.
    pub fn direct_product(a: &FiniteGroup, b: &FiniteGroup) -> FiniteGroup {
        let n = a.order * b.order;
        let mut mul = Vec::with_capacity((n * n) as usize);
        for x in 0..n {
            let (xa, xb) = (x / b.order, x % b.order);
            for y in 0..n {
                let (ya, yb) = (y / b.order, y % b.order);
                mul.push(a.mul(xa, ya) * b.order + b.mul(xb, yb));
            }
        }
        let inv = (0..n)
            .map(|x| a.inv(x / b.order) * b.order + b.inv(x % b.order))
            .collect();
        FiniteGroup {
            order: n,
            mul,
            inv,
            identity: a.identity * b.order + b.identity,
        }
    }

    /// The subgroup of `Sym(degree)` generated by `gens`, with elements sorted
    /// lexicographically by image table. Returns the abstract group and the
    /// permutation realizing each element.
    pub fn permutation_group(degree: usize, gens: &[Perm]) -> (FiniteGroup, Vec<Perm>) {
        let mut seen: BTreeSet<Perm> = BTreeSet::new();
        seen.insert(Perm::identity(degree));
        let mut frontier: Vec<Perm> = vec![Perm::identity(degree)];
        while let Some(p) = frontier.pop() {
            for g in gens {
                let q = g.compose(&p);
                if !seen.contains(&q) {
                    seen.insert(q.clone());
                    frontier.push(q);
                }
            }
        }
        let perms: Vec<Perm> = seen.into_iter().collect();
        let index: BTreeMap<&Perm, u32> = perms
            .iter()
            .enumerate()
            .map(|(i, p)| (p, i as u32))
            .collect();
        let n = perms.len() as u32;
        let mut mul = Vec::with_capacity((n * n) as usize);
        for p in &perms {
            for q in &perms {
                mul.push(index[&p.compose(q)]);
            }
        }
        let inv = perms.iter().map(|p| index[&p.inverse()]).collect();
        let identity = index[&Perm::identity(degree)];
        (
            FiniteGroup {
                order: n,
                mul,
                inv,
                identity,
            },
            perms,
        )
    }

    /// `Sym(n)` with its permutations in lexicographic order.
    pub fn symmetric(n: usize) -> (FiniteGroup, Vec<Perm>) {
        if n <= 1 {
            return (FiniteGroup::trivial(), vec![Perm::identity(n)]);
        }
        let gens = vec![Perm::transposition(n, 0, 1), Perm::cycle(n)];
        FiniteGroup::permutation_group(n, &gens)
    }
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FiniteGroup(order={})", self.order)
    }
}

/// Searches for an isomorphism `a -> b` by backtracking over generator images.
///
/// Returns the full element map when one exists. Generator images are tried in
/// index order, so the first solution is deterministic.
pub fn isomorphism(a: &FiniteGroup, b: &FiniteGroup) -> Option<Vec<u32>> {
    let mut out = None;
    iso_search(a, b, &mut |map| {
        out = Some(map.to_vec());
        false
    });
    out
}

pub fn are_isomorphic(a: &FiniteGroup, b: &FiniteGroup) -> bool {
    isomorphism(a, b).is_some()
}

/// All automorphisms of `g`, as element maps sorted lexicographically.
pub fn automorphisms(g: &FiniteGroup) -> Vec<Vec<u32>> {
    let mut all = Vec::new();
    iso_search(g, g, &mut |map| {
        all.push(map.to_vec());
        true
    });
    all.sort();
    all
}

/// The automorphism group of `g`: the group law is composition,
/// `mul(f, h) = f ∘ h`. Returns the group and the table of each element.
pub fn automorphism_group(g: &FiniteGroup) -> (FiniteGroup, Vec<Vec<u32>>) {
    let tables = automorphisms(g);
    let index: BTreeMap<&Vec<u32>, u32> = tables
        .iter()
        .enumerate()
        .map(|(i, t)| (t, i as u32))
        .collect();
    let n = tables.len() as u32;
    let mut mul = Vec::with_capacity((n * n) as usize);
    for f in &tables {
        for h in &tables {
            let composite: Vec<u32> = h.iter().map(|&x| f[x as usize]).collect();
            mul.push(index[&composite]);
        }
    }
    let inv = tables
        .iter()
        .map(|f| {
            let mut t = vec![0u32; f.len()];
            for (x, &fx) in f.iter().enumerate() {
                t[fx as usize] = x as u32;
            }
            index[&t]
        })
        .collect();
    let identity = index[&(0..g.order()).collect::<Vec<u32>>()];
    (
        FiniteGroup {
            order: n,
            mul,
            inv,
            identity,
        },
        tables,
    )
}

/// All isomorphisms `a -> b`, sorted lexicographically by element map.
pub fn all_isomorphisms(a: &FiniteGroup, b: &FiniteGroup) -> Vec<Vec<u32>> {
    let mut all = Vec::new();
    iso_search(a, b, &mut |map| {
        all.push(map.to_vec());
        true
    });
    all.sort();
    all
}

/// Backtracking over images of a generating sequence of `a`, searching for
/// isomorphisms. The callback receives each complete isomorphism; returning
/// `false` stops the search.
fn iso_search(a: &FiniteGroup, b: &FiniteGroup, found: &mut dyn FnMut(&[u32]) -> bool) -> bool {
    if a.order() != b.order() {
        return true;
    }
    let gens = a.generating_sequence();
    // map[x] = image of x, u32::MAX when unknown; identity is always mapped.
    let mut map = vec![u32::MAX; a.order() as usize];
    map[a.identity() as usize] = b.identity();

    fn close(a: &FiniteGroup, b: &FiniteGroup, map: &mut [u32]) -> bool {
        // Propagates products of already-mapped elements until stable, failing
        // on any conflict or collision.
        loop {
            let mut changed = false;
            let known: Vec<u32> = (0..a.order()).filter(|&x| map[x as usize] != u32::MAX).collect();
            for &x in &known {
                for &y in &known {
                    let xy = a.mul(x, y);
                    let img = b.mul(map[x as usize], map[y as usize]);
                    if map[xy as usize] == u32::MAX {
                        if known.iter().any(|&z| map[z as usize] == img) {
                            return false;
                        }
                        map[xy as usize] = img;
                        changed = true;
                    } else if map[xy as usize] != img {
                        return false;
                    }
                }
            }
            if !changed {
                return true;
            }
        }
    }

    fn rec(
        a: &FiniteGroup,
        b: &FiniteGroup,
        gens: &[u32],
        map: &mut Vec<u32>,
        found: &mut dyn FnMut(&[u32]) -> bool,
    ) -> bool {
        let next = gens.iter().copied().find(|&g| map[g as usize] == u32::MAX);
        let g = match next {
            Some(g) => g,
            None => {
                if map.iter().all(|&v| v != u32::MAX) {
                    let mut seen = vec![false; b.order() as usize];
                    for &v in map.iter() {
                        if seen[v as usize] {
                            return true;
                        }
                        seen[v as usize] = true;
                    }
                    return found(map);
                }
                return true;
            }
        };
        let g_order = a.element_order(g);
        for h in b.elements() {
            if b.element_order(h) != g_order {
                continue;
            }
            let saved = map.clone();
            map[g as usize] = h;
            if close(a, b, map) && !rec(a, b, gens, map, found) {
                return false;
            }
            *map = saved;
        }
        true
    }

    rec(a, b, &gens, &mut map, found)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_groups() {
        let g = FiniteGroup::cyclic(6);
        assert_eq!(g.order(), 6);
        assert_eq!(g.element_order(1), 6);
        assert_eq!(g.element_order(2), 3);
        assert!(g.is_abelian());
    }

    #[test]
    fn symmetric_group_has_factorial_order() {
        let (s3, perms) = FiniteGroup::symmetric(3);
        assert_eq!(s3.order(), 6);
        assert_eq!(perms.len(), 6);
        assert!(!s3.is_abelian());
        assert_eq!(s3.center(), vec![s3.identity()]);
        // Table agrees with permutation composition.
        for (i, p) in perms.iter().enumerate() {
            for (j, q) in perms.iter().enumerate() {
                let k = s3.mul(i as u32, j as u32);
                assert_eq!(perms[k as usize], p.compose(q));
            }
        }
    }

    #[test]
    fn z4_not_isomorphic_to_klein_four() {
        let z4 = FiniteGroup::cyclic(4);
        let v4 = FiniteGroup::direct_product(&FiniteGroup::cyclic(2), &FiniteGroup::cyclic(2));
        assert!(!are_isomorphic(&z4, &v4));
        assert!(are_isomorphic(&z4, &FiniteGroup::cyclic(4)));
    }

    #[test]
    fn automorphism_counts() {
        // |Aut(Z/4)| = 2, |Aut(Z/2 x Z/2)| = 6, |Aut(S3)| = 6.
        assert_eq!(automorphisms(&FiniteGroup::cyclic(4)).len(), 2);
        let v4 = FiniteGroup::direct_product(&FiniteGroup::cyclic(2), &FiniteGroup::cyclic(2));
        assert_eq!(automorphisms(&v4).len(), 6);
        let (s3, _) = FiniteGroup::symmetric(3);
        assert_eq!(automorphisms(&s3).len(), 6);
        let (aut_s3, _) = automorphism_group(&s3);
        assert!(are_isomorphic(&aut_s3, &s3));
    }

    #[test]
    fn from_mul_table_rejects_broken_tables() {
        // Z/2 table with a wrong entry: no identity.
        let table = vec![vec![1, 1], vec![1, 0]];
        assert!(matches!(
            FiniteGroup::from_mul_table(&table),
            Err(GroupError::NoIdentity)
        ));
    }

    #[test]
    fn center_of_s3_product() {
        let (s3, _) = FiniteGroup::symmetric(3);
        let g = FiniteGroup::direct_product(&s3, &FiniteGroup::cyclic(2));
        assert_eq!(g.center().len(), 2);
    }
}
