//! Equivariant graph polynomials indexed by multigraphs.
//!
//! The crate enumerates the multigraph basis of permutation-equivariant
//! polynomials on graph data, counts it independently through cycle-index
//! generating functions, decides which basis elements the node-based and
//! edge-based contraction models can compute, evaluates basis elements by
//! tensor contraction, and exports the non-computable ones as graph features.

pub mod cli;
pub mod contraction;
pub mod enumerate;
pub mod error;
pub mod eval;
pub mod features;
pub mod molien;
pub mod multigraph;
pub mod par;
pub mod verify;

pub use error::{Error, Result};
pub use multigraph::{parse_signature, to_signature, CanonicalSignature, MultiGraphH, OutputKind};

/// Entry point of the `eqpoly` binary; returns the process exit code.
pub fn cli_main() -> i32 {
    cli::main_with_args(std::env::args_os())
}
