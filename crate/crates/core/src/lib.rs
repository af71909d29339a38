//! A calculus of finite groupoids.
//!
//! The crate provides, on finite discrete models:
//!
//! * groupoids with exhaustive axiom validation, actions and the
//!   translation / semidirect constructions ([`groupoid`], [`action`]);
//! * charted groupoids — chart bijections attached to arrows as the discrete
//!   stand-in for germ data — with ineffective stabilizers and
//!   effectivization ([`charted`]);
//! * Hilsum–Skandalis bibundles: composition, 2-isomorphisms, equivalence
//!   checks and induced invariants ([`bibundle`]);
//! * the presentation pipeline: frame construction, band trivialization, and
//!   end-to-end equivalence certificates ([`presentation`]);
//! * descent data over covers of a finite set, gluing, and the stack
//!   property checker ([`descent`]);
//! * text formats (`GRPD`, `GROUP`, `ACT`, `COVER`, `DESC`, `CERT`) and the
//!   standalone certificate verifier ([`format`], [`cert`]).
//!
//! All values are immutable after construction and every operation is pure;
//! canonical representatives are minimal ids throughout, so outputs are
//! byte-for-byte reproducible.

pub mod action;
pub mod bibundle;
pub mod catalog;
pub mod cert;
pub mod charted;
pub mod descent;
pub mod format;
pub mod group;
pub mod groupoid;
pub mod hom;
pub mod perm;
pub mod presentation;

pub use action::{
    check_two_group_semidirect, semidirect_group, semidirect_space, stabilizer_space,
    translation_groupoid, ActionError, AutAction, GroupoidAction, SetAction, Side,
};
pub use bibundle::{
    compose, decide_weak_equivalence, find_two_iso, from_strict_hom, identity_bibundle,
    induced_coarse_map, induced_stabilizer_hom, is_equivalence, is_essential_equivalence,
    translation_bibundle, two_isos, validate_bibundle, Bibundle, BibundleError, TwoIso,
};
pub use charted::{
    check_s0_equivariance, effectivization, equivalent_to_set, ineffective_stabilizers,
    is_effective, is_purely_ineffective, pi_coarse_equivalence, ChartedGroupoid, LocalSystem,
};
pub use descent::{
    check_stack_property, cocycle_to_bundle, descent_isos, find_descent_iso, glue, restrict,
    validate_descent, Cover, DescentDatum, DescentError, DescentIso,
};
pub use group::{are_isomorphic, automorphism_group, automorphisms, isomorphism, FiniteGroup};
pub use groupoid::{b_group, Arr, CoarseQuotient, FiniteGroupoid, Obj, ValidationReport};
pub use hom::StrictHom;
pub use perm::Perm;
pub use presentation::{
    band_trivialization, frame_construction, present, present_trivial_center,
    principal_quotient_equivalence, EquivariantBundleData, PresentError, PresentationCertificate,
};
