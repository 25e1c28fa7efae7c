//! Mechanical conversion of polygonal tiling systems of the plane into
//! marked unit-square systems.
//!
//! The pipeline runs in stages, each a separate module:
//!
//! - [`tilemodel`]: edge types, prototiles as signed boundary words, patches.
//! - [`rationalizer`]: nearby exact-rational edge vectors satisfying every
//!   tile's closure constraint, integral rescaling, the inradius prescale and
//!   the projection of an integral patch to the torus R²/Z².
//! - [`zigzag`]: lattice staircases for every edge and the unit-cell region
//!   each prototile bounds.
//! - [`squaresys`]: the alphabet of marked unit squares, its matching rules,
//!   and explode/amalgamate between patches and square configurations.
//! - [`transport`]: carrying patches between combinatorially identical
//!   systems and the end-to-end pipeline.
//!
//! [`format`], [`penrose`] and [`svg`] provide the JSON file formats, the
//! Penrose B-tile fixture and SVG rendering.

pub mod exactmath;
pub mod format;
pub mod penrose;
pub mod rationalizer;
pub mod scalar;
pub mod squaresys;
pub mod svg;
pub mod tilemodel;
pub mod transport;
pub mod zigzag;

pub use exactmath::{Rat, RatMatrix, RealScalar};
pub use scalar::{Scalar, Vec2};
pub use tilemodel::{ExactSystem, Patch, Placement, RealSystem, Stage, TileSystem};
