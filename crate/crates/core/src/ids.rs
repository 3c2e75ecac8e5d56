//! Typed identifiers.
//!
//! Numeric ids are allocated by [`crate::ContentDb`]. User ids are pseudonyms:
//! the mapping to a real identity lives only in the user store.

use serde::{Deserialize, Serialize};
use std::fmt;

macro_rules! numeric_id {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub u64);

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                self.0.fmt(f)
            }
        }

        impl From<u64> for $name {
            fn from(raw: u64) -> Self {
                Self(raw)
            }
        }

        impl std::str::FromStr for $name {
            type Err = std::num::ParseIntError;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                s.parse().map(Self)
            }
        }
    };
}

numeric_id!(
    /// Pseudonymous user id.
    UserId
);
numeric_id!(RatId);
numeric_id!(
    /// Option ids are unique within one RAT.
    OptionId
);
numeric_id!(ScaffoldId);
numeric_id!(LectureId);
numeric_id!(SheetId);
numeric_id!(SessionId);
numeric_id!(LiveSessionId);
numeric_id!(AttemptId);

macro_rules! label_id {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub String);

        impl $name {
            pub fn new(label: impl Into<String>) -> Self {
                Self(label.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(label: &str) -> Self {
                Self(label.to_owned())
            }
        }
    };
}

label_id!(
    /// A subdivision of a lecture, e.g. "matrix-operations".
    TopicId
);
label_id!(
    /// A finer label inside one topic, e.g. "matrix-multiplication".
    ConceptId
);
