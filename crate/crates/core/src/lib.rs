//! Exact computation of local and global delta-invariants of Du Val del
//! Pezzo surfaces of degree 3.
//!
//! The library builds the minimal resolution of each surface as a
//! configuration of negative curves on a rank-7 Picard lattice, computes the
//! parametric Zariski decomposition of `-K_S - vA` for every negative curve
//! `A` in exact rational arithmetic, and evaluates the Fujita and
//! Abban-Zhuang functionals to certify per-stratum and global
//! delta-invariants.
//!
//! Modules:
//! - [`lattice`]: exact intersection theory on the degree-3 Picard lattice;
//! - [`config`]: the twenty built-in surface configurations, validation,
//!   dual graphs, point strata, and the JSON file format;
//! - [`zariski`]: the parametric active-set decomposition engine and exact
//!   piecewise-quadratic functions;
//! - [`delta`]: `S_S(A)`, the flag functional, per-stratum bounds, global
//!   certificates, and the transcribed lemma corpus;
//! - [`report`]: rendering for the command-line front end.

pub mod config;
pub mod delta;
pub mod lattice;
pub mod report;
pub mod zariski;

pub use config::{builtin, builtins, enumerate_lines, parse_config, SurfaceConfig};
pub use delta::{DeltaCertificate, DeltaEngine};
pub use lattice::{DivisorClass, Rat};
pub use zariski::{param_zariski, zariski_at, ParamDecomp, PiecewiseFunc};
