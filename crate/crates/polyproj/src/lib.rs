//! Exact projection onto finite intersections of closed halfspaces.
//!
//! Given halfspaces `C_i = { h : <h|u_i> <= eta_i }` with nonempty
//! intersection `C`, the projector finds the metric projection of a point
//! `x` onto `C` in finitely many steps: it searches index sets `I` of
//! constraints, solves the complementarity system on each candidate set,
//! and accepts the first set whose multipliers are strictly positive and
//! whose candidate point is feasible. The accepted set is returned as a
//! [`projector::SupportCertificate`] that an independent checker can
//! re-verify from raw data.
//!
//! The crate is organized around that search:
//!
//! - [`core`]: vectors, halfspaces, polyhedra, residuals.
//! - [`gram`]: Gram matrices, index sets, subdeterminants, and the
//!   cofactor formulas for the multipliers.
//! - [`projector`]: the certified search itself, sequential or parallel.
//! - [`oracle`]: independent checks (Dykstra's alternating method, a KKT
//!   verifier, a variational-inequality spot check).
//! - [`latticial`]: simplicial cones given by a basis, Moreau splits, and
//!   mixed nonnegative representations.
//! - [`lp`]: coordinatewise clipping in the sequence spaces `l_p` (p > 1)
//!   and a candidate verifier for sparse functional systems.
//! - [`io`]: the text file formats read and written by the CLI.
//! - [`cli`]: the subcommand implementations behind the `polyproj` binary.
//! - [`instances`]: seeded random instance generation for benchmarks and
//!   tests.
//!
//! Every major capability has a runnable example:
//!
//! ```text
//! cargo run -p polyproj --example projection_basics
//! cargo run -p polyproj --example certificates
//! cargo run -p polyproj --example multiplier_formulas
//! cargo run -p polyproj --example support_reduction
//! cargo run -p polyproj --example closed_form_vs_dykstra
//! cargo run -p polyproj --example latticial_cones
//! cargo run -p polyproj --example sequence_space_clipping
//! cargo run -p polyproj --example parallel_search
//! cargo run -p polyproj --example problem_files
//! ```
//!
//! The `polyproj` binary wraps the same library calls behind `project`,
//! `verify`, `cone`, `lp`, and `bench` subcommands; see the README for the
//! file formats and the exit-code contract.

pub mod cli;
pub mod core;
mod dense;
pub mod gram;
pub mod instances;
pub mod io;
pub mod latticial;
pub mod lp;
pub mod oracle;
pub mod projector;

pub use crate::core::{Halfspace, Polyhedron, Vector};
pub use crate::gram::{GramMatrix, IndexSet};
pub use crate::projector::{ProjectionResult, ProjectorConfig, SupportCertificate};
