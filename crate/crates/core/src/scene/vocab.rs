//! Closed label vocabularies for kitchen scenes.
//!
//! These tables are a reconstruction: 32 AI2THOR-style kitchen categories,
//! 4 affordances, 5 attributes and 4 spatial relationships. Bump
//! [`VOCABULARY_VERSION`] whenever a table changes.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub const VOCABULARY_VERSION: &str = "kitchen-v1";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown {kind} `{value}`")]
pub struct VocabError {
    pub kind: &'static str,
    pub value: String,
}

macro_rules! vocabulary {
    ($(#[$meta:meta])* $name:ident, $kind:literal { $($variant:ident => $text:literal),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum $name {
            $($variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn as_str(self) -> &'static str {
                match self {
                    $($name::$variant => $text),+
                }
            }
        }

        impl FromStr for $name {
            type Err = VocabError;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s {
                    $($text => Ok($name::$variant),)+
                    _ => Err(VocabError { kind: $kind, value: s.to_string() }),
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl Serialize for $name {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.serialize_str(self.as_str())
            }
        }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                let s = String::deserialize(d)?;
                s.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

vocabulary!(
    /// Object category.
    Category, "category" {
        Apple => "apple",
        Bread => "bread",
        Tomato => "tomato",
        Potato => "potato",
        Lettuce => "lettuce",
        Egg => "egg",
        Cucumber => "cucumber",
        Orange => "orange",
        Onion => "onion",
        Knife => "knife",
        ButterKnife => "butterknife",
        Bowl => "bowl",
        Plate => "plate",
        Mug => "mug",
        Cup => "cup",
        Pan => "pan",
        Pot => "pot",
        Tray => "tray",
        Spoon => "spoon",
        Fork => "fork",
        Spatula => "spatula",
        Bottle => "bottle",
        Kettle => "kettle",
        Sponge => "sponge",
        Cloth => "cloth",
        Sink => "sink",
        Stove => "stove",
        Microwave => "microwave",
        Toaster => "toaster",
        Fridge => "fridge",
        Countertop => "countertop",
        Person => "person",
    }
);

vocabulary!(
    /// What an object lets an agent do with or to it.
    Affordance, "affordance" {
        Cut => "cut",
        Cuttable => "cuttable",
        Contain => "contain",
        Heat => "heat",
    }
);

vocabulary!(
    /// General object attribute.
    Attribute, "attribute" {
        Graspable => "graspable",
        Cookable => "cookable",
        Dirty => "dirty",
        Cleaner => "cleaner",
        Receiver => "receiver",
    }
);

vocabulary!(
    /// Pairwise spatial relationship; each maps 1:1 to a domain predicate.
    Relation, "relation" {
        On => "on",
        In => "in",
        NextTo => "next-to",
        Under => "under",
    }
);

impl Attribute {
    /// Attributes describing instance state rather than the category.
    pub fn is_state(self) -> bool {
        matches!(self, Attribute::Dirty)
    }
}

/// Either kind of per-object label; knowledge-base templates key on these.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Affordance(Affordance),
    Attribute(Attribute),
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Affordance(a) => a.as_str(),
            Label::Attribute(a) => a.as_str(),
        }
    }
}

impl FromStr for Label {
    type Err = VocabError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.parse()
            .map(Label::Affordance)
            .or_else(|_| s.parse().map(Label::Attribute))
            .map_err(|_| VocabError {
                kind: "label",
                value: s.to_string(),
            })
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for Label {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for Label {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vocabulary_sizes() {
        assert_eq!(Category::ALL.len(), 32);
        assert_eq!(Affordance::ALL.len(), 4);
        assert_eq!(Attribute::ALL.len(), 5);
        assert_eq!(Relation::ALL.len(), 4);
    }

    #[test]
    fn names_round_trip_and_are_unique() {
        let mut seen = std::collections::BTreeSet::new();
        for c in Category::ALL {
            assert_eq!(c.as_str().parse::<Category>().unwrap(), *c);
            assert!(seen.insert(c.as_str()));
        }
        let mut labels = std::collections::BTreeSet::new();
        for a in Affordance::ALL {
            assert!(labels.insert(a.as_str()));
            assert_eq!(a.as_str().parse::<Label>().unwrap(), Label::Affordance(*a));
        }
        for a in Attribute::ALL {
            assert!(labels.insert(a.as_str()));
            assert_eq!(a.as_str().parse::<Label>().unwrap(), Label::Attribute(*a));
        }
        assert!("spork".parse::<Category>().is_err());
    }
}
