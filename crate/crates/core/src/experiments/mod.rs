//! Parameter sweeps, difference maps, beat-the-limit region boundaries and
//! the closed-form versus oracle cross-check.

mod regions;
mod sweep;
mod validate;

pub use regions::{difference_at, find_boundaries, BoundaryOptions, RegionBoundary};
pub use sweep::{difference_map, sweep, Axis, Param, Probe, SweepRow, SweepSpec};
pub use validate::{
    validate_against_oracle, DiscrepancyEntry, DiscrepancyReport, GridPoint, OracleGrid, Quantity,
    QuantitySummary, SkippedPoint, Status,
};
