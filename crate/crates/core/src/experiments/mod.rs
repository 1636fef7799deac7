//! Seeded experiment runners behind `bistable experiment` and
//! `bistable nerve-check`.

pub mod appendix_a;
pub mod consistency;
pub mod nerve;

pub use appendix_a::{appendix_a, appendix_a_clouds, closed_degree_rips, largest_region, AppendixAConfig, AppendixAReport, LineBarcodes, RegionSummary};
pub use consistency::{consistency, reference_atoms, trend_holds, ConsistencyConfig, ConsistencyReport, ConsistencyStep};
pub use nerve::{nerve_check, nerve_check_cloud, NerveCloudReport, NerveConfig, NerveMismatch, NerveReport};
