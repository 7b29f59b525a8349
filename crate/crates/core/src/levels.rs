//! The eight reading-ease classes and their target levels.
//!
//! Classes are half-open `[lower, upper)` intervals except the top class,
//! which also contains 100, so together they partition `[0, 100]`.

use std::fmt;
use std::ops::{Index, IndexMut};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Level {
    L5,
    L20,
    L40,
    L55,
    L65,
    L75,
    L85,
    L95,
}

struct ClassInfo {
    label: u8,
    lower: f64,
    upper: f64,
    grade: &'static str,
    description: &'static str,
}

const CLASSES: [ClassInfo; 8] = [
    ClassInfo { label: 5, lower: 0.0, upper: 10.0, grade: "Professional", description: "Extremely difficult to read. Best understood by university graduates." },
    ClassInfo { label: 20, lower: 10.0, upper: 30.0, grade: "College graduate", description: "Very difficult to read. Best understood by university graduates." },
    ClassInfo { label: 40, lower: 30.0, upper: 50.0, grade: "College", description: "Difficult to read." },
    ClassInfo { label: 55, lower: 50.0, upper: 60.0, grade: "10-12th grade", description: "Fairly difficult to read." },
    ClassInfo { label: 65, lower: 60.0, upper: 70.0, grade: "8-9th grade", description: "Plain English. Easily understood by 13- to 15-year-old students." },
    ClassInfo { label: 75, lower: 70.0, upper: 80.0, grade: "7th grade", description: "Fairly easy to read." },
    ClassInfo { label: 85, lower: 80.0, upper: 90.0, grade: "6th grade", description: "Easy to read. Conversational English for consumers." },
    ClassInfo { label: 95, lower: 90.0, upper: 100.0, grade: "5th grade", description: "Very easy to read. Easily understood by an average 11-year-old student." },
];

impl Level {
    pub const ALL: [Level; 8] = [
        Level::L5,
        Level::L20,
        Level::L40,
        Level::L55,
        Level::L65,
        Level::L75,
        Level::L85,
        Level::L95,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    fn info(self) -> &'static ClassInfo {
        &CLASSES[self.index()]
    }

    pub fn label(self) -> u8 {
        self.info().label
    }

    pub fn from_label(label: u32) -> Option<Level> {
        Level::ALL.into_iter().find(|l| u32::from(l.label()) == label)
    }

    /// Target score for this level.
    pub fn target<T: Scalar>(self) -> T {
        T::count(self.label() as usize)
    }

    pub fn lower(self) -> f64 {
        self.info().lower
    }

    pub fn upper(self) -> f64 {
        self.info().upper
    }

    pub fn grade(self) -> &'static str {
        self.info().grade
    }

    pub fn description(self) -> &'static str {
        self.info().description
    }

    pub fn contains<T: Scalar>(self, value: T) -> bool {
        classify(value) == Band::In(self)
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

impl Serialize for Level {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u8(self.label())
    }
}

impl<'de> Deserialize<'de> for Level {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let label = u32::deserialize(d)?;
        Level::from_label(label)
            .ok_or_else(|| serde::de::Error::custom(format!("unknown readability level {label}")))
    }
}

/// Result of classifying a score.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Band {
    In(Level),
    Below,
    Above,
}

impl Band {
    pub fn level(self) -> Option<Level> {
        match self {
            Band::In(l) => Some(l),
            _ => None,
        }
    }

    /// Nearest class, clamping out-of-range scores to the end classes.
    pub fn clamped(self) -> Level {
        match self {
            Band::In(l) => l,
            Band::Below => Level::L5,
            Band::Above => Level::L95,
        }
    }

    pub fn is_out_of_range(self) -> bool {
        !matches!(self, Band::In(_))
    }
}

pub fn classify<T: Scalar>(value: T) -> Band {
    if value.is_nan() || value < T::zero() {
        return Band::Below;
    }
    if value > T::lit(100.0) {
        return Band::Above;
    }
    for level in Level::ALL {
        if value < T::lit(level.upper()) {
            return Band::In(level);
        }
    }
    Band::In(Level::L95)
}

/// One value per readability level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct LevelMap<V>(pub [V; 8]);

impl<V> LevelMap<V> {
    pub fn from_fn(mut f: impl FnMut(Level) -> V) -> Self {
        LevelMap(Level::ALL.map(&mut f))
    }

    pub fn iter(&self) -> impl Iterator<Item = (Level, &V)> {
        Level::ALL.into_iter().zip(self.0.iter())
    }

    pub fn values(&self) -> &[V; 8] {
        &self.0
    }

    pub fn map<U>(&self, mut f: impl FnMut(Level, &V) -> U) -> LevelMap<U> {
        LevelMap::from_fn(|l| f(l, &self[l]))
    }
}

impl<V> Index<Level> for LevelMap<V> {
    type Output = V;
    fn index(&self, level: Level) -> &V {
        &self.0[level.index()]
    }
}

impl<V> IndexMut<Level> for LevelMap<V> {
    fn index_mut(&mut self, level: Level) -> &mut V {
        &mut self.0[level.index()]
    }
}

impl<V: Serialize> Serialize for LevelMap<V> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = s.serialize_map(Some(8))?;
        for (level, v) in self.iter() {
            m.serialize_entry(&level.label().to_string(), v)?;
        }
        m.end()
    }
}

impl<'de, V: Deserialize<'de>> Deserialize<'de> for LevelMap<V> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use std::collections::BTreeMap;
        let raw: BTreeMap<String, V> = BTreeMap::deserialize(d)?;
        if raw.len() != 8 {
            return Err(serde::de::Error::custom(format!("expected 8 levels, found {}", raw.len())));
        }
        let mut slots: [Option<V>; 8] = Default::default();
        for (k, v) in raw {
            let level = k
                .parse::<u32>()
                .ok()
                .and_then(Level::from_label)
                .ok_or_else(|| serde::de::Error::custom(format!("unknown readability level {k:?}")))?;
            slots[level.index()] = Some(v);
        }
        Ok(LevelMap(slots.map(|s| s.expect("all 8 levels present"))))
    }
}
