//! Newton-polyhedron invariants of planar polynomial graphs: Newton distance,
//! heights, adapted coordinates, r-heights and the critical exponent of the
//! Fourier restriction problem, together with floating-point decay probes.

pub mod adaptedness;
pub mod error;
pub mod exponents;
pub mod newton;
pub mod numerics;
pub mod poly;
pub mod varchenko;

pub use poly::{
    int, rat, squarefree_real_roots, to_f64, Axis, Exponent, HalfPlane, LinearMap, PolyError,
    PuiseuxPoly, Rational, RootLocation, RootRecord, UniPoly,
};

pub use error::{AlgebraicRootReport, Error, Result};
