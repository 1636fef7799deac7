//! Simplicial complexes and the bifiltrations built from point data.

pub mod bifiltration;
pub mod degree;
pub mod grades;
pub mod multicover;
pub mod rips;
pub mod simplicial;
pub mod subdivision;

pub use bifiltration::BifilteredComplex;
pub use degree::{degree_bifiltration, degree_cech_bifiltration, degree_filtration, degree_rips_bifiltration, DegreeRips};
pub use grades::{minimal_antichain, Bigrade, GridSpec, RConvention};
pub use multicover::{dcov_contains, kfold_cech_complex, kfold_cech_filtration, multicover_contains};
pub use rips::{cech_complex, cech_filtration, full_simplex_count, rips_complex, rips_filtration, EXPLICIT_SIMPLEX_GUARD};
pub use simplicial::{Simplex, SimplicialComplex};
pub use subdivision::{barycentric_subdivision, subdivision_bifiltration};
