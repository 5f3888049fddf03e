//! Nonlocal Minkowski perimeters, Riesz interaction energies and convex shape
//! optimization on grids and polygons.

pub mod convex;
pub mod error;
pub mod grid;
pub mod optimizer;
mod quadrature;
pub mod riesz;
pub mod scalar;
pub mod verification;

pub use error::{Error, Result};
pub use scalar::{CompensatedSum, Real};

/// Double-precision occupancy grid.
pub type Grid = grid::GridSet<f64>;
/// Double-precision scalar field (potentials, distance maps).
pub type Field = grid::ScalarField<f64>;
/// Double-precision convex polygon.
pub type Polygon = convex::ConvexPolygon<f64>;
/// Double-precision convex polyhedron.
pub type Polyhedron = convex::ConvexPolyhedron<f64>;
/// Double-precision convex polytope of either dimension.
pub type Polytope = convex::ConvexPolytope<f64>;
/// Double-precision Riesz kernel.
pub type Kernel = riesz::RieszKernel<f64>;
