//! Possibilistic constraint satisfaction.
//!
//! A possibilistic CSP attaches a necessity degree `α ∈ [0, 1]` to each
//! constraint: `(k, α)` asks that the satisfaction of `k` be at least
//! `α`-necessary. The problem then induces a maximal possibility distribution
//! `π*` over complete labelings, a consistency degree (the best `π*` value)
//! and a set of best labelings. This crate provides
//!
//! * [`model`]: variables, labelings, extensional constraints and `π*`;
//! * [`oracle`]: exhaustive reference semantics (generate and test, explicit
//!   possibility distributions, possibility and necessity measures);
//! * [`search`]: depth-first branch and bound with cutoff floor, sufficiency
//!   ceiling, node budget, ordering heuristics and forward checking;
//! * [`propagate`]: possibilistic arc-consistency that infers weighted unary
//!   constraints instead of deleting labels;
//! * [`io`]: the PCSP text format, the menu fixture and a random generator;
//! * [`cli`]: the `pcsp` command line.
//!
//! ```
//! use pcsp::{io, search, deg};
//!
//! let menu = io::builtin_menu();
//! let result = search::solve(&menu, &search::SearchOptions::default()).unwrap();
//! assert_eq!(result.best_value, deg("0.8"));
//! ```

pub mod cli;
pub mod degree;
pub mod error;
pub mod io;
pub mod model;
pub mod oracle;
pub mod propagate;
pub mod search;

pub use degree::{deg, Degree};
pub use error::{Error, Result};
pub use model::{
    classical_consistent, conjoin, disjoin, more_defined, negate, partial_bound, pi_star, satisfies,
    Constraint, DomainVariable, Label, Labeling, Mode, Problem, ValuedConstraint,
};
