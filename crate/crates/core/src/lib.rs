//! Boolean Toeplitz matrices `T_n<S;T>` over the binary Boolean semiring.
//!
//! The crate builds the matrix and digraph of an instance, measures the
//! eventual period and index of its power sequence and of the competition
//! sequence `A^m (A^T)^m`, computes m-step competition graphs, the step-offset
//! sets `P_i`, `Q_i`, `R_i`, constructs directed walks with prescribed arc-type
//! counts, and runs an exhaustive checker over every small instance.
//!
//! Vertices and matrix entries are 1-indexed throughout the public API.
//!
//! With the default `parallel` feature, large matrix products and the
//! instance sweep run on rayon; [`Execution::Sequential`] forces the
//! single-threaded path either way.

pub mod boolsemiring;
pub mod compgraph;
mod error;
mod exec;
pub mod goldens;
pub mod spectra;
pub mod toeplitz;
pub mod verify;
pub mod walks;

pub use boolsemiring::{BoolMatrix, Fingerprint};
pub use compgraph::SimpleGraph;
pub use error::{Error, Result};
pub use exec::Execution;
pub use spectra::PeriodicTail;
pub use toeplitz::{BezoutCertificate, GcdInvariants, ToeplitzSpec};
pub use walks::{Arc, ArcKind, StepSets, Walk};
