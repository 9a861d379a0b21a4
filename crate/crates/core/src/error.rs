use thiserror::Error;

use crate::hln::ParseError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("invalid species name {0:?}: expected [A-Za-z][A-Za-z0-9_]*")]
    InvalidSpeciesName(String),

    #[error("invalid action: {0}")]
    InvalidAction(String),

    #[error("invalid reaction: {0}")]
    InvalidReaction(String),

    #[error("invalid reaction network: {0}")]
    InvalidNetwork(String),

    #[error("invalid process system: {0}")]
    InvalidSystem(String),

    #[error("unknown species {0:?}")]
    UnknownSpecies(String),

    #[error("state has {found} entries but the model declares {expected} species")]
    StateLength { expected: usize, found: usize },

    #[error("firing would drive species {0:?} below zero")]
    Underflow(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("integration failed at t = {t}: step size underflow (h = {h:e})")]
    StepUnderflow { t: f64, h: f64 },

    #[error("reachable state space exceeds {0} states")]
    Explosion(usize),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
