//! Strict homomorphisms (functors) between finite groupoids.

use std::fmt;

use crate::groupoid::{Arr, FiniteGroupoid, Obj};

/// A functor: object and arrow maps commuting with all structure maps.
#[derive(Clone, PartialEq, Eq)]
pub struct StrictHom {
    pub dom: FiniteGroupoid,
    pub cod: FiniteGroupoid,
    pub obj_map: Vec<Obj>,
    pub arr_map: Vec<Arr>,
}

/// A functor axiom broken by the candidate maps, with a witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HomViolation {
    ObjMapLength,
    ArrMapLength,
    ObjOutOfRange { x: Obj },
    ArrOutOfRange { g: Arr },
    Source { g: Arr },
    Target { g: Arr },
    Unit { x: Obj },
    Inverse { g: Arr },
    Composition { g: Arr, h: Arr },
}

impl fmt::Display for HomViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use HomViolation::*;
        match self {
            ObjMapLength => write!(f, "object map has wrong length"),
            ArrMapLength => write!(f, "arrow map has wrong length"),
            ObjOutOfRange { x } => write!(f, "image of {x:?} out of range"),
            ArrOutOfRange { g } => write!(f, "image of {g:?} out of range"),
            Source { g } => write!(f, "phi does not commute with src at {g:?}"),
            Target { g } => write!(f, "phi does not commute with tgt at {g:?}"),
            Unit { x } => write!(f, "phi does not preserve the unit at {x:?}"),
            Inverse { g } => write!(f, "phi does not preserve the inverse of {g:?}"),
            Composition { g, h } => write!(f, "phi does not preserve comp({g:?}, {h:?})"),
        }
    }
}

impl StrictHom {
    pub fn identity(g: &FiniteGroupoid) -> StrictHom {
        StrictHom {
            dom: g.clone(),
            cod: g.clone(),
            obj_map: g.objects().collect(),
            arr_map: g.arrows().collect(),
        }
    }

    pub fn on_obj(&self, x: Obj) -> Obj {
        self.obj_map[x.idx()]
    }

    pub fn on_arr(&self, g: Arr) -> Arr {
        self.arr_map[g.idx()]
    }

    /// Checks every functor axiom, returning all violations.
    pub fn validate(&self) -> Vec<HomViolation> {
        let mut out = Vec::new();
        if self.obj_map.len() != self.dom.object_count() as usize {
            out.push(HomViolation::ObjMapLength);
        }
        if self.arr_map.len() != self.dom.arrow_count() as usize {
            out.push(HomViolation::ArrMapLength);
        }
        if !out.is_empty() {
            return out;
        }
        for x in self.dom.objects() {
            if self.on_obj(x).0 >= self.cod.object_count() {
                out.push(HomViolation::ObjOutOfRange { x });
            }
        }
        for g in self.dom.arrows() {
            if self.on_arr(g).0 >= self.cod.arrow_count() {
                out.push(HomViolation::ArrOutOfRange { g });
            }
        }
        if !out.is_empty() {
            return out;
        }
        for g in self.dom.arrows() {
            let fg = self.on_arr(g);
            if self.cod.src(fg) != self.on_obj(self.dom.src(g)) {
                out.push(HomViolation::Source { g });
            }
            if self.cod.tgt(fg) != self.on_obj(self.dom.tgt(g)) {
                out.push(HomViolation::Target { g });
            }
            if self.cod.inv(fg) != self.on_arr(self.dom.inv(g)) {
                out.push(HomViolation::Inverse { g });
            }
        }
        for x in self.dom.objects() {
            if self.on_arr(self.dom.unit(x)) != self.cod.unit(self.on_obj(x)) {
                out.push(HomViolation::Unit { x });
            }
        }
        for g in self.dom.arrows() {
            for h in self.dom.arrows_into(self.dom.src(g)) {
                if let Some(gh) = self.dom.compose(g, h) {
                    let image = self.cod.compose(self.on_arr(g), self.on_arr(h));
                    if image != Some(self.on_arr(gh)) {
                        out.push(HomViolation::Composition { g, h });
                    }
                }
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// `other ∘ self`: applies `self` first. Panics unless the codomain of
    /// `self` equals the domain of `other`.
    pub fn then(&self, other: &StrictHom) -> StrictHom {
        assert_eq!(self.cod, other.dom, "strict hom composition mismatch");
        StrictHom {
            dom: self.dom.clone(),
            cod: other.cod.clone(),
            obj_map: self.obj_map.iter().map(|&x| other.on_obj(x)).collect(),
            arr_map: self.arr_map.iter().map(|&g| other.on_arr(g)).collect(),
        }
    }

    pub fn is_bijective(&self) -> bool {
        let mut seen_obj = vec![false; self.cod.object_count() as usize];
        for &x in &self.obj_map {
            if seen_obj[x.idx()] {
                return false;
            }
            seen_obj[x.idx()] = true;
        }
        let mut seen_arr = vec![false; self.cod.arrow_count() as usize];
        for &g in &self.arr_map {
            if seen_arr[g.idx()] {
                return false;
            }
            seen_arr[g.idx()] = true;
        }
        seen_obj.into_iter().all(|b| b) && seen_arr.into_iter().all(|b| b)
    }

    /// Inverse of a bijective functor. Panics if not bijective.
    pub fn inverse_of_iso(&self) -> StrictHom {
        assert!(self.is_bijective(), "not a strict isomorphism");
        let mut obj_map = vec![Obj(0); self.cod.object_count() as usize];
        for (x, &fx) in self.obj_map.iter().enumerate() {
            obj_map[fx.idx()] = Obj(x as u32);
        }
        let mut arr_map = vec![Arr(0); self.cod.arrow_count() as usize];
        for (g, &fg) in self.arr_map.iter().enumerate() {
            arr_map[fg.idx()] = Arr(g as u32);
        }
        StrictHom {
            dom: self.cod.clone(),
            cod: self.dom.clone(),
            obj_map,
            arr_map,
        }
    }
}

impl fmt::Debug for StrictHom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StrictHom({:?} -> {:?})", self.dom, self.cod)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::FiniteGroup;
    use crate::groupoid::b_group;

    #[test]
    fn identity_hom_is_valid() {
        let g = b_group(&FiniteGroup::cyclic(3));
        let id = StrictHom::identity(&g);
        assert!(id.is_valid());
        assert!(id.is_bijective());
    }

    #[test]
    fn quotient_hom_z4_to_z2() {
        let g = b_group(&FiniteGroup::cyclic(4));
        let h = b_group(&FiniteGroup::cyclic(2));
        let phi = StrictHom {
            dom: g,
            cod: h,
            obj_map: vec![Obj(0)],
            arr_map: vec![Arr(0), Arr(1), Arr(0), Arr(1)],
        };
        assert!(phi.is_valid());
        assert!(!phi.is_bijective());
    }

    #[test]
    fn broken_hom_is_rejected() {
        let g = b_group(&FiniteGroup::cyclic(4));
        let h = b_group(&FiniteGroup::cyclic(2));
        let phi = StrictHom {
            dom: g,
            cod: h,
            obj_map: vec![Obj(0)],
            // 1 -> 1 but 2 = 1+1 -> 1: not a homomorphism.
            arr_map: vec![Arr(0), Arr(1), Arr(1), Arr(0)],
        };
        assert!(!phi.is_valid());
    }
}
