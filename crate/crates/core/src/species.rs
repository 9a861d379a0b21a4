use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Interned-by-value species identifier, `[A-Za-z][A-Za-z0-9_]*`.
///
/// Comparison is case-sensitive: `R` and `r` are different species.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct SpeciesName(Arc<str>);

impl SpeciesName {
    pub fn new(text: &str) -> Result<Self> {
        if is_identifier(text) {
            Ok(Self(Arc::from(text)))
        } else {
            Err(Error::InvalidSpeciesName(text.to_owned()))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

pub(crate) fn is_identifier(text: &str) -> bool {
    let mut chars = text.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl TryFrom<String> for SpeciesName {
    type Error = Error;

    fn try_from(value: String) -> Result<Self> {
        Self::new(&value)
    }
}

impl TryFrom<&str> for SpeciesName {
    type Error = Error;

    fn try_from(value: &str) -> Result<Self> {
        Self::new(value)
    }
}

impl From<SpeciesName> for String {
    fn from(value: SpeciesName) -> Self {
        value.0.to_string()
    }
}

impl AsRef<str> for SpeciesName {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for SpeciesName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for SpeciesName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

/// Shorthand for building names in tests and builtin models.
///
/// Panics on an invalid identifier.
pub fn sp(text: &str) -> SpeciesName {
    SpeciesName::new(text).unwrap_or_else(|e| panic!("{e}"))
}
