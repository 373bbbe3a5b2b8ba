//! Phase-estimation sensitivities of an SU(1,1) interferometer fed by a
//! coherent state in one port and a p-photon-subtracted squeezed vacuum in
//! the other.
//!
//! The crate has three layers:
//!
//! * [`fock`] builds input states in a truncated Fock basis, applies the
//!   first nonlinear beam splitter exactly (up to truncation) and extracts
//!   photon-number statistics. It is the brute-force ground truth.
//! * [`closed_form`] evaluates the analytic quantum Fisher information,
//!   Cramér-Rao bound, inside-interferometer photon moments and Heisenberg
//!   limits.
//! * [`experiments`] sweeps the analytic quantities over parameter grids,
//!   locates the regions where the Cramér-Rao bound beats a Heisenberg
//!   limit, and cross-checks every analytic formula against the Fock oracle.

pub mod closed_form;
pub mod error;
pub mod experiments;
pub mod fock;
pub mod roots;

pub use closed_form::{
    BoundReport, BudgetMode, BudgetSpec, ProbeParams, Regime, Subtraction,
};
pub use error::{Error, Result};
pub use experiments::{
    Axis, DiscrepancyReport, OracleGrid, Param, Probe, RegionBoundary, SweepRow, SweepSpec,
};
pub use fock::{FockVector, InputSpec, MomentSet, NbsSpec, OracleConfig};
