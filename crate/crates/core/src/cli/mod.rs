//! Instance files, the formula DSL, serialization of substitutions and
//! traces, and the `epsengine` command line.
//!
//! An instance file declares Skolem functions and lists critical formulas:
//!
//! ```text
//! skolem f(1) := exists x. x = S S y1
//! skolem g(0) := exists x. f(x) = 5
//! crit existence f(3) witness 5
//! crit existence g() witness 3
//! crit pred g()
//! ```

mod commands;
pub mod format;
pub mod gen;
pub mod parse;

pub use commands::{named_traces, run, CliError, Exit};
pub use format::{parse_substitution, parse_trace, print_instance, write_substitution, write_trace};
pub use gen::{generate, GenParams};
pub use parse::{parse_instance, Instance, ParseError, Parser, Pos};
