//! Exact computations on fat point schemes over weighted projective planes.
//!
//! The library computes, with no floating point anywhere:
//!   * graded pieces of the coordinate ring of P(a,b,c) and their monomial
//!     bases (`plane`)
//!   * linear systems of weighted forms with prescribed vanishing orders at
//!     points with all coordinates nonzero, via a degree-abc covering by the
//!     ordinary plane and divided-power (Hasse) derivative conditions
//!     (`scheme`)
//!   * cohomology tables h0/h1/h2/chi of the classes nA - mE on the blowup
//!     of the plane at the points, with a Riemann-Roch cross-check on
//!     Cartier classes (`cohomology`)
//!   * regularity of symbolic powers, its asymptotic slope, sigma-series
//!     and negative-curve certificates (`asymptotics`)
//!   * root-of-unity orbits, base-change checks and vanishing probes tied to
//!     Nagata-type statements (`nagata`)
//!
//! Coefficients live either in the rationals (certification mode) or in a
//! prime field F_p with p below 2^62 (fast mode); see `field`.

pub mod asymptotics;
pub mod cohomology;
pub mod error;
pub mod field;
pub mod matrix;
pub mod nagata;
pub mod plane;
pub mod scheme;

pub use error::{Error, Result};
pub use field::{Field, FieldSpec, PrimeField, Rationals, DEFAULT_PRIME};
pub use matrix::ExactMatrix;
pub use plane::{Monomial, WeightedPlane};
pub use scheme::{FatPointScheme, MemoryRankCache, RankCache, UpstreamPoint};
