//! Dotted numeric version strings ("0.45", "0.46", "1.0.2").

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A dotted numeric version, compared component-wise.
///
/// `"0.45" < "0.46"` and `"0.46" < "0.46.1"`. The textual form is
/// normalized: components are stored as numbers, so `"0.046"` re-renders
/// as `"0.46"`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct VersionNumber(Vec<u32>);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("invalid version string {0:?}: expected dotted numeric components")]
pub struct VersionParseError(pub String);

impl VersionNumber {
    pub fn new(components: Vec<u32>) -> Self {
        VersionNumber(components)
    }

    /// The smallest version, used when no other version is known.
    pub fn zero() -> Self {
        VersionNumber(vec![0])
    }

    pub fn components(&self) -> &[u32] {
        &self.0
    }
}

impl FromStr for VersionNumber {
    type Err = VersionParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let trimmed = s.trim();
        if trimmed.is_empty() {
            return Err(VersionParseError(s.to_string()));
        }
        let components = trimmed
            .split('.')
            .map(|part| part.parse::<u32>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| VersionParseError(s.to_string()))?;
        Ok(VersionNumber(components))
    }
}

impl fmt::Display for VersionNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text = self
            .0
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(".");
        f.write_str(&text)
    }
}

impl TryFrom<String> for VersionNumber {
    type Error = VersionParseError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        value.parse()
    }
}

impl From<VersionNumber> for String {
    fn from(value: VersionNumber) -> Self {
        value.to_string()
    }
}
