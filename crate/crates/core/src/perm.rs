//! Permutations of `{0, .., n-1}`.
//!
//! Chart effects, frame actions and the structure group `Sym(n)` are all
//! built on this type. The composition convention is `(p * q)(i) = p(q(i))`,
//! i.e. `compose` applies its argument first.

use std::fmt;

/// A bijection of `{0, .., n-1}`, stored as its image table.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Perm(Vec<u32>);

impl Perm {
    pub fn identity(n: usize) -> Perm {
        Perm((0..n as u32).collect())
    }

    /// Builds a permutation from its image table; `None` unless it is a bijection.
    pub fn from_images(images: Vec<u32>) -> Option<Perm> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if (i as usize) >= n || seen[i as usize] {
                return None;
            }
            seen[i as usize] = true;
        }
        Some(Perm(images))
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn apply(&self, i: u32) -> u32 {
        self.0[i as usize]
    }

    pub fn images(&self) -> &[u32] {
        &self.0
    }

    /// `self ∘ other`: applies `other` first.
    pub fn compose(&self, other: &Perm) -> Perm {
        debug_assert_eq!(self.degree(), other.degree());
        Perm(other.0.iter().map(|&i| self.0[i as usize]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut images = vec![0u32; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            images[j as usize] = i as u32;
        }
        Perm(images)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i as u32 == j)
    }

    /// The transposition `i <-> j` on `{0, .., n-1}`.
    pub fn transposition(n: usize, i: u32, j: u32) -> Perm {
        let mut p = Perm::identity(n);
        p.0.swap(i as usize, j as usize);
        p
    }

    /// The n-cycle `0 -> 1 -> ... -> n-1 -> 0`.
    pub fn cycle(n: usize) -> Perm {
        Perm((0..n as u32).map(|i| (i + 1) % n as u32).collect())
    }

    /// All permutations of degree `n` in lexicographic order of image tables.
    pub fn all(n: usize) -> Vec<Perm> {
        let mut out = Vec::new();
        let mut current: Vec<u32> = Vec::new();
        let mut used = vec![false; n];
        fn rec(n: usize, current: &mut Vec<u32>, used: &mut Vec<bool>, out: &mut Vec<Perm>) {
            if current.len() == n {
                out.push(Perm(current.clone()));
                return;
            }
            for i in 0..n as u32 {
                if !used[i as usize] {
                    used[i as usize] = true;
                    current.push(i);
                    rec(n, current, used, out);
                    current.pop();
                    used[i as usize] = false;
                }
            }
        }
        rec(n, &mut current, &mut used, &mut out);
        out
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm{:?}", self.0)
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}", v + 1)?;
        }
        Ok(())
    }
}
