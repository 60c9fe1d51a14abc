use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// Spatial radius in meters, usable as part of a label.
#[derive(Clone, Copy, Debug)]
pub struct Radius(pub f64);

impl PartialEq for Radius {
    fn eq(&self, other: &Self) -> bool {
        self.0.to_bits() == other.0.to_bits()
    }
}
impl Eq for Radius {}
impl Hash for Radius {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.to_bits().hash(state)
    }
}
impl PartialOrd for Radius {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Radius {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Exposure label produced by an exposure mapping.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    /// Integer exposure level (clustered interference: 0 control, 1 spillover, 2 treated).
    Level(u32),
    /// Untreated, no treated unit within the control radius.
    PureControl,
    /// Untreated, some treated unit within the given radius.
    Spillover(Radius),
    /// Any spatial case not covered by the two above.
    Other,
    /// Treated unit ids inside a k-hop neighborhood, ascending. Equivalent to
    /// the masked neighborhood treatment vector.
    Neighborhood(Vec<u32>),
    Named(String),
}

impl Label {
    pub fn spillover(radius: f64) -> Self {
        Label::Spillover(Radius(radius))
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Level(v) => write!(f, "{v}"),
            Label::PureControl => write!(f, "pure_control"),
            Label::Spillover(r) => write!(f, "spillover_{}", r.0),
            Label::Other => write!(f, "other"),
            Label::Neighborhood(ids) => {
                write!(f, "nbhd:")?;
                for (k, id) in ids.iter().enumerate() {
                    if k > 0 {
                        write!(f, ";")?;
                    }
                    write!(f, "{id}")?;
                }
                Ok(())
            }
            Label::Named(s) => write!(f, "{s}"),
        }
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::Format("empty exposure label".into()));
        }
        if let Ok(v) = s.parse::<u32>() {
            return Ok(Label::Level(v));
        }
        match s {
            "pure_control" | "pure control" => return Ok(Label::PureControl),
            "other" => return Ok(Label::Other),
            _ => {}
        }
        if let Some(r) = s.strip_prefix("spillover_") {
            let r: f64 = r.parse().map_err(|_| Error::Format(format!("bad spillover radius in {s:?}")))?;
            return Ok(Label::spillover(r));
        }
        if let Some(rest) = s.strip_prefix("nbhd:") {
            let ids = if rest.is_empty() {
                Vec::new()
            } else {
                rest.split(';')
                    .map(|t| t.parse::<u32>().map_err(|_| Error::Format(format!("bad neighborhood label {s:?}"))))
                    .collect::<Result<Vec<_>, _>>()?
            };
            return Ok(Label::Neighborhood(ids));
        }
        Ok(Label::Named(s.to_string()))
    }
}

impl Serialize for Label {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Label {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Parses a comma-separated label list such as `0,1` or `pure_control,spillover_125`.
pub fn parse_label_list(s: &str) -> Result<Vec<Label>, Error> {
    s.split(',').map(str::parse).collect()
}
