//! The eight video-metaphor categories.

use std::fmt;
use std::str::FromStr;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MetaphorType {
    BodyLanguage,
    AtmosphereLanguage,
    CulturalSymbol,
    NaturalisticSymbol,
    CausalMontage,
    AnalogicalMontage,
    SurrealNarrative,
    PerformativeNarrative,
}

impl MetaphorType {
    pub const ALL: [MetaphorType; 8] = [
        MetaphorType::BodyLanguage,
        MetaphorType::AtmosphereLanguage,
        MetaphorType::CulturalSymbol,
        MetaphorType::NaturalisticSymbol,
        MetaphorType::CausalMontage,
        MetaphorType::AnalogicalMontage,
        MetaphorType::SurrealNarrative,
        MetaphorType::PerformativeNarrative,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MetaphorType::BodyLanguage => "body_language",
            MetaphorType::AtmosphereLanguage => "atmosphere_language",
            MetaphorType::CulturalSymbol => "cultural_symbol",
            MetaphorType::NaturalisticSymbol => "naturalistic_symbol",
            MetaphorType::CausalMontage => "causal_montage",
            MetaphorType::AnalogicalMontage => "analogical_montage",
            MetaphorType::SurrealNarrative => "surreal_narrative",
            MetaphorType::PerformativeNarrative => "performative_narrative",
        }
    }

    /// Abbreviated column heading for report tables.
    pub fn short_name(self) -> &'static str {
        match self {
            MetaphorType::BodyLanguage => "Body L.",
            MetaphorType::AtmosphereLanguage => "Atmosph. L.",
            MetaphorType::CulturalSymbol => "Cultural S.",
            MetaphorType::NaturalisticSymbol => "Natural. S.",
            MetaphorType::CausalMontage => "Causal M.",
            MetaphorType::AnalogicalMontage => "Analog. M.",
            MetaphorType::SurrealNarrative => "Surreal N.",
            MetaphorType::PerformativeNarrative => "Perform. N.",
        }
    }
}

impl fmt::Display for MetaphorType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MetaphorType {
    type Err = String;

    /// Accepts canonical snake_case as well as human-readable forms like
    /// "Body Language" (case-insensitive, separators ignored).
    fn from_str(s: &str) -> Result<MetaphorType, String> {
        let squashed: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        MetaphorType::ALL
            .into_iter()
            .find(|t| {
                t.as_str()
                    .chars()
                    .filter(|c| *c != '_')
                    .collect::<String>()
                    == squashed
            })
            .ok_or_else(|| format!("unknown metaphor type {s:?}"))
    }
}

impl Serialize for MetaphorType {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for MetaphorType {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<MetaphorType, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(D::Error::custom)
    }
}
