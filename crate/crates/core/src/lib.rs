//! Threshold-2 infection (P3-convexity) on q-Kneser graphs `K_q(n,k)` and
//! Grassmann graphs `J_q(n,k)`.
//!
//! The crate is layered bottom-up:
//!
//! * [`gfq`]: table-driven arithmetic in `F_q` for prime powers `q <= 256`.
//! * [`qcomb`]: exact q-factorials, Gaussian binomials and the subspace
//!   counting formulas used by the hull-number arguments.
//! * [`subspace`]: canonical RREF subspaces of `F_q^n`, enumeration and
//!   lattice operations.
//! * [`graphgen`]: explicit graphs with CSR adjacency.
//! * [`hull`]: the interval operator, hull fixpoint with round traces and
//!   hull-pair search.
//! * [`constructions`]: explicit hull-set pairs and the witness objects used
//!   to prove they work.
//! * [`verify`] and [`cli`]: the verification drivers and the command line.

pub mod cli;
pub mod constructions;
pub mod error;
pub mod gfq;
pub mod graphgen;
pub mod hull;
pub mod qcomb;
pub mod subspace;
pub mod verify;

pub use error::{Error, Result};
pub use gfq::{make_field, FieldElement, FieldSpec};
pub use graphgen::{build_graph, BuildCaps, Family, SubspaceGraph};
pub use hull::{InfectionTrace, VertexSet};
pub use qcomb::{gaussian_binomial, q_factorial, CountParams, QInt};
pub use subspace::{enumerate_subspaces, Matrix, Subspace};
