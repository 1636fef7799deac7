//! Homology over Z/2: persistence, induced ranks and two-parameter
//! invariants.

pub mod barcode;
mod explicit;
pub mod flag;
mod implicit;
pub mod linalg;
pub mod module;
pub mod reduce;

pub use barcode::{bottleneck_distance, Barcode};
pub use flag::{flag_persistence, FlagBars, FlagFiltration};
pub use module::{bigraded_betti, bigraded_betti_from, fibered_barcode, hilbert_function, BettiTable, Bifiltration, GridModule, Line};
pub use reduce::{homology_dim, induced_rank, persistence_barcode, reduce_filtration, Persistence};
