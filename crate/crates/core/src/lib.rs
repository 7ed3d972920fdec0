//! Annealing Hamiltonians for degenerate 3-XORSAT instances.
//!
//! The crate builds 3-XORSAT problems on structured hypergraphs, maps them to
//! transverse-field spin Hamiltonians, restricts those Hamiltonians to sectors
//! of conserved charges through a GF(2) duality, and computes annealing gap
//! curves by exact diagonalization. A brute-force verification harness checks
//! every step of the construction on small instances.

pub mod duality;
pub mod gf2;
pub mod model;
pub mod pauli;
pub mod spectrum;
pub mod verify;

pub use duality::{DualModel, EmbeddedModel, SectorSpec, StructureReport};
pub use gf2::{BitMatrix, BitVector, RowBasis, SolveResult};
pub use model::{GaugeCase, GaugeResult, Instance, LeafRemovalReport};
pub use pauli::{PauliString, TermSum};
pub use spectrum::{AnnealOperator, GapCurve, MinGapResult, ScalingRow, SolverOptions};
pub use verify::{CheckOutcome, VerificationReport};
