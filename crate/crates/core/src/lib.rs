//! Certification of orbit-diameter contraction conditions on finite metric spaces.
//!
//! A self-map `f` on a finite metric space is checked pair by pair against contraction
//! inequalities built from orbit diameters, with exact rational arithmetic throughout.
//! Picard iteration and fixed-point enumeration then test the fixed-point conclusions
//! those inequalities are supposed to guarantee, and a seeded falsifier searches random
//! instances for counterexamples.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]

extern crate alloc;

pub mod certify;
pub mod corpus;
pub mod falsifier;
pub mod metric;
pub mod orbit;
pub mod phi;
pub mod picard;
pub mod scalar;

pub use certify::{
    certify, compare_classes, rhs, CertificationReport, Certifier, CertifyError, CertifyOptions,
    ClassOutcome, Coefficients, ComparisonReport, ContractionSpec, PairTerms, SpecError,
    VariantKind, Verdict,
};
pub use metric::{
    validate_metric, window_points, MetricReport, MetricSpace, PointId, Scope, SpaceError,
};
pub use orbit::{
    compute_orbit, fixed_points, orbit_diameter_sequence, pair_stats, FixPointReport, MapError,
    OrbitError, OrbitStats, OrbitTable, PairStats, Rule, SelfMap,
};
pub use phi::{
    check_phi_property1, check_phi_property2, eval_phi, Phi2Evidence, PhiError, PhiSpec,
};
pub use picard::{
    cauchy_diagnostics, iterate, validate_theorem, IterationTrace, TheoremReport, TraceStatus,
};
pub use scalar::{parse_rational, Decision, Rational, Scalar};

/// A complete problem: a space, a self-map on it, a comparison function and optionally
/// the contraction condition it is declared against.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub space: MetricSpace,
    pub map: SelfMap,
    pub phi: PhiSpec,
    pub spec: Option<ContractionSpec>,
}

impl Instance {
    /// Sub-instance on `keep`, or `None` if `keep` is not closed under the map.
    pub fn restrict(&self, keep: &[PointId]) -> Option<Instance> {
        let map = self.map.restrict(keep)?;
        Some(Instance {
            space: self.space.restrict(keep),
            map,
            phi: self.phi.clone(),
            spec: self.spec.clone(),
        })
    }
}
