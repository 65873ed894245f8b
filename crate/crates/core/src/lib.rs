//! Minimization of dense, nonsubmodular quadratic pseudo-Boolean functions.
//!
//! The crate is organised bottom-up:
//!
//! * [`qpbf`] holds the energy representation, labelings, the standard
//!   (monomial) form and an exhaustive minimizer used as a test oracle.
//! * [`graph`] builds the undirected cut characterization of an energy and
//!   the equivalence-preserving transforms on it (variable and terminal
//!   flips, greedy supermodular suppression, decomposition, simplification).
//! * [`maxflow`] is the st-mincut engine.
//! * [`essp`] is the extended submodular-supermodular procedure.
//! * [`baselines`] contains the reference solvers (ICM, min-sum BP, roof
//!   duality and its iterated improvement).
//! * [`synth`] generates instances with controlled hardness factors.
//! * [`recipe`] chains solvers into named pipelines and records
//!   energy-vs-time traces.

pub mod baselines;
pub mod error;
pub mod essp;
pub mod format;
pub mod graph;
pub mod maxflow;
pub mod progress;
pub mod qpbf;
pub mod recipe;
pub mod synth;

pub use error::{Error, Result};
pub use essp::{essp_minimize, essp_refine_local, EsspOptions, EsspReport, ModularFn, Permutation};
pub use graph::{CharGraph, Terminal};
pub use qpbf::{brute_force_min, Label, Labeling, Qpbf, StdQpbf};
