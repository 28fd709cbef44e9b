//! Volumes of solids cut out by quadric inequalities.
//!
//! Three independent routes are provided: seedable Monte Carlo sampling
//! ([`montecarlo`]), sound octree indicator cubature ([`cubature`]), and for
//! the intersection of the three hyperboloids `x²+y²−z² ≤ 1` (and cyclic),
//! an exact decomposition into two tetrahedra and three congruent curved
//! pieces ([`revenge`]), whose total is `log 256`.

pub mod classics;
pub mod cubature;
pub mod dsl;
pub mod error;
pub mod mesh;
pub mod montecarlo;
pub mod parallel;
pub mod quadric;
pub mod revenge;

pub use error::{Error, Result};
pub use quadric::{Aabb, AffineMap, HalfSpace, ImplicitSolid, Point3, Polynomial, QuadricForm};
