//! Cohomology rings of toric Fano manifolds from smooth Fano polytopes:
//! presentations, Gröbner-basis invariants, characteristic classes,
//! anticanonical degrees and equivalence tests.

pub mod cohomology;
pub mod equivalence;
pub mod fixtures;
pub mod invariants;
pub mod lattice;
pub mod poly;
pub mod polytope;
pub mod ring_iso;

pub use cohomology::{
    build_presentation, degree_anticanonical, degree_via_ring, CohomologyPresentation,
};
pub use equivalence::{classify, EquivalenceWitness, Partition, Relation};
pub use invariants::{fingerprint, mbn_for, InvariantFingerprint, KveReport, MbnBounds};
pub use lattice::{
    extends_to_basis, smith_normal_form, solve_unimodular_from_basis, IntMatrix, LatticeError,
    LatticeVector,
};
pub use poly::{buchberger, normal_form, GroebnerBasis, Monomial, Poly, VarOrder};
pub use polytope::{
    direct_sum, dual_polytope, normalized_volume, parse_polytopes, validate_smooth_fano,
    RationalPolytope, SmoothFanoPolytope, ValidationReport,
};
pub use ring_iso::{find_ring_isos_bounded, RingIsoWitness};
