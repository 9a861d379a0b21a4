//! Compiler and simulators for a small notation of biochemical actions.
//!
//! A program (`bind(Gd, Gbg, G, 1.0); ...`) is parsed into a [`Process`] and
//! translated either to a [`ReactionNetwork`] or to a [`ProcessSystem`] of
//! communicating species automata. Both can be simulated with the Gillespie
//! algorithm; networks also integrate as mass-action ODEs.
//!
//! ```
//! use hlnsim::{parse_program, to_reactions};
//!
//! let p = parse_program("bind(A, B, C, 2.0); degrade(C, 0.1)").unwrap();
//! let net = to_reactions(&p);
//! assert_eq!(net.reactions()[0].to_string(), "A + B -> C @ 2.0");
//! ```

pub mod analysis;
pub mod error;
pub mod hln;
pub mod models;
pub mod ode;
pub mod pi;
pub mod random;
pub mod reaction;
pub mod species;
pub mod ssa;
pub mod trajectory;
pub mod translate;

pub use analysis::{
    compare, describe_weights, enumerate_ctmc, enumerate_ctmc_pi, find_conservation, in_span,
    ComparisonReport, CtmcGraph,
};
pub use error::{Error, Result};
pub use hln::{parse_program, Action, ActionKind, ParseError, ParseErrorKind, Process};
pub use models::{builtin, gprotein_hln, gprotein_network, BuiltinModel};
pub use ode::{build_ode, integrate, OdeConfig, OdeSystem};
pub use pi::{Branch, Channel, Prefix, ProcessSystem, SpeciesAutomaton};
pub use reaction::{
    scale_rate_for_order, scale_rate_to_discrete, RateLaw, Reaction, ReactionNetwork, State,
    AVOGADRO,
};
pub use species::SpeciesName;
pub use ssa::{ensemble, ensemble_pi, simulate, simulate_pi, SsaConfig};
pub use trajectory::{EnsembleStats, Trajectory};
pub use translate::{to_pi, to_reactions};
