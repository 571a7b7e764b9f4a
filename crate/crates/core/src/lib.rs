//! Teichmüller geometry of the torus.
//!
//! The Teichmüller space of the torus is the upper half-plane carrying the
//! curvature −4 Poincaré metric; measured foliations form the plane modulo
//! the π-rotation, and the mapping class group acts through `SL2(Z)`. This
//! crate implements that model end to end:
//!
//! * [`teich`] — moduli, slopes, foliations, extremal length, geodesic rays;
//! * [`mapping_class`] — the `SL2(Z)` action, Thurston classification,
//!   bounded word-ball enumeration and subgroup typing;
//! * [`train_track`] — combinatorial train tracks over exact rationals,
//!   switch-condition kernels, the symplectic form and volume density;
//! * [`measure`] — Thurston measure cones on the boundary circle and the
//!   extremal-length Poisson kernel;
//! * [`harmonic`] — Poisson integrals, radial limits, holomorphy tests and
//!   the periodic indicator construction of invariant harmonic functions;
//! * [`dynamics`] — limit sets, conical and horospherical limit point
//!   searches, Poincaré-type sums and wandering-set experiments;
//! * [`quad`] — the adaptive quadrature engine backing the above.
//!
//! All types are immutable values and every operation is pure.

pub mod dynamics;
pub mod harmonic;
pub mod mapping_class;
pub mod measure;
pub mod quad;
pub mod teich;
pub mod train_track;

// pub use mapping_class::{ClassificationResult, MappingClass, SubgroupSpec};
// pub use measure::{ArcSet, MeasureReport};
// pub use teich::{BoundaryPoint, Foliation, Modulus, Slope};
// pub use train_track::{TrainTrack, WeightVector};

/// Hard cap errors raised by word-ball enumeration and orbit scans.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BudgetError {
    /// Number of elements the operation was allowed to produce.
    pub cap: usize,
}

impl std::fmt::Display for BudgetError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "enumeration budget of {} elements exceeded", self.cap)
    }
}

impl std::error::Error for BudgetError {}
