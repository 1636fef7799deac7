//! Forward shifts, rank obstructions to interleavings, stability audits and
//! the tightness constructions.

pub mod audit;
pub mod discontinuity;
pub mod obstruction;
pub mod shift;
pub mod tightness;

pub use audit::{stability_audit, AuditConfig, AuditMode, AuditReport, Construction, DeltaSource, ProbePoint};
pub use discontinuity::{discontinuity_demo, DiscontinuityReport};
pub use obstruction::{
    internal_maps_vanish, interleaving_obstruction, interleaving_obstruction_within, obstruction_at,
    ObstructionCertificate, Side, SweepLimits,
};
pub use shift::{compose, shift_dominates, AffineShift};
pub use tightness::{main_clouds, tightness_main, tightness_warmup, warmup_clouds, MainReport, MainWindow, WarmupReport};
