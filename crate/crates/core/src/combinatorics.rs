//! Partitions, Maya diagrams and the bijection between them.
//!
//! Half-integer positions are stored as integer codes `p - 1/2`, so `-1/2`
//! is code `-1` and `1/2` is code `0`. A Maya diagram of charge `c` is kept
//! relative to its vacuum `{p < c}`: the occupied positions at or above the
//! charge (`added`) and the vacant ones below it (`removed`).

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CombinatoricsError {
    #[error("partition parts must be positive and weakly decreasing: {0:?}")]
    InvalidPartition(Vec<i64>),
    #[error("malformed half-integer {0:?}")]
    BadHalfInteger(String),
    #[error("position {position} cannot be added above charge {charge}")]
    AddedBelowCharge { position: HalfInt, charge: i64 },
    #[error("position {position} cannot be removed at or above charge {charge}")]
    RemovedAboveCharge { position: HalfInt, charge: i64 },
    #[error("{added} positions added but {removed} removed")]
    Unbalanced { added: usize, removed: usize },
}

/// A point of `Z + 1/2`, stored as its integer code `p - 1/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfInt(i64);

impl HalfInt {
    pub const fn from_code(code: i64) -> Self {
        HalfInt(code)
    }

    pub const fn code(self) -> i64 {
        self.0
    }

    /// Numerator over 2, i.e. `2p`.
    pub const fn twice(self) -> i64 {
        2 * self.0 + 1
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2", self.twice())
    }
}

impl FromStr for HalfInt {
    type Err = CombinatoricsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || CombinatoricsError::BadHalfInteger(s.to_string());
        let t = s.trim().replace('\u{2212}', "-");
        let (num, den) = t.split_once('/').ok_or_else(bad)?;
        if den.trim() != "2" {
            return Err(bad());
        }
        let num: i64 = num.trim().parse().map_err(|_| bad())?;
        if num.rem_euclid(2) != 1 {
            return Err(bad());
        }
        Ok(HalfInt((num - 1).div_euclid(2)))
    }
}

/// A weakly decreasing list of positive parts.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize)]
pub struct Partition(Vec<u32>);

impl Partition {
    pub fn new(parts: Vec<u32>) -> Result<Self, CombinatoricsError> {
        let ok = parts.iter().all(|&p| p > 0) && parts.windows(2).all(|w| w[0] >= w[1]);
        if ok {
            Ok(Partition(parts))
        } else {
            Err(CombinatoricsError::InvalidPartition(
                parts.into_iter().map(i64::from).collect(),
            ))
        }
    }

    pub fn empty() -> Self {
        Partition(Vec::new())
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn size(&self) -> u32 {
        self.0.iter().sum()
    }

    /// `λ_k` with 1-based `k`, zero past the last part.
    pub fn part(&self, k: usize) -> u32 {
        self.0.get(k - 1).copied().unwrap_or(0)
    }

    /// All partitions of `n`, parts in decreasing lexicographic order.
    pub fn of_size(n: u32) -> Vec<Partition> {
        fn go(rem: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
            if rem == 0 {
                out.push(Partition(cur.clone()));
                return;
            }
            for p in (1..=rem.min(max)).rev() {
                cur.push(p);
                go(rem - p, p, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        go(n, n, &mut Vec::new(), &mut out);
        out
    }

    /// All partitions of size at most `n`, by size.
    pub fn up_to_size(n: u32) -> Vec<Partition> {
        (0..=n).flat_map(Partition::of_size).collect()
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

impl FromStr for Partition {
    type Err = CombinatoricsError;

    /// Comma-separated parts; the empty string is the empty partition.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim().trim_start_matches('(').trim_end_matches(')');
        if s.trim().is_empty() {
            return Ok(Partition::empty());
        }
        let mut parts = Vec::new();
        for tok in s.split(',') {
            let v: i64 = tok
                .trim()
                .parse()
                .map_err(|_| CombinatoricsError::InvalidPartition(vec![]))?;
            if v <= 0 || v > i64::from(u32::MAX) {
                return Err(CombinatoricsError::InvalidPartition(vec![v]));
            }
            parts.push(v as u32);
        }
        Partition::new(parts)
    }
}

/// Finite perturbation of the charge-`charge` vacuum `{p < charge}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MayaDiagram {
    charge: i64,
    added: BTreeSet<i64>,
    removed: BTreeSet<i64>,
}

impl MayaDiagram {
    pub fn new(
        charge: i64,
        added: impl IntoIterator<Item = HalfInt>,
        removed: impl IntoIterator<Item = HalfInt>,
    ) -> Result<Self, CombinatoricsError> {
        let added: BTreeSet<i64> = added.into_iter().map(HalfInt::code).collect();
        let removed: BTreeSet<i64> = removed.into_iter().map(HalfInt::code).collect();
        if let Some(&p) = added.iter().find(|&&p| p < charge) {
            return Err(CombinatoricsError::AddedBelowCharge {
                position: HalfInt(p),
                charge,
            });
        }
        if let Some(&p) = removed.iter().find(|&&p| p >= charge) {
            return Err(CombinatoricsError::RemovedAboveCharge {
                position: HalfInt(p),
                charge,
            });
        }
        if added.len() != removed.len() {
            return Err(CombinatoricsError::Unbalanced {
                added: added.len(),
                removed: removed.len(),
            });
        }
        Ok(MayaDiagram {
            charge,
            added,
            removed,
        })
    }

    pub fn vacuum(charge: i64) -> Self {
        MayaDiagram {
            charge,
            added: BTreeSet::new(),
            removed: BTreeSet::new(),
        }
    }

    /// Builds the diagram from an occupation pattern: every code below `floor`
    /// is occupied, and `occupied` lists the occupied codes at or above it.
    pub fn from_occupation(floor: i64, occupied: &BTreeSet<i64>) -> Self {
        let above = occupied.iter().filter(|&&p| p >= floor).count() as i64;
        let charge = floor + above;
        let added = occupied.iter().copied().filter(|&p| p >= charge).collect();
        let removed = (floor..charge).filter(|p| !occupied.contains(p)).collect();
        MayaDiagram {
            charge,
            added,
            removed,
        }
    }

    pub fn charge(&self) -> i64 {
        self.charge
    }

    pub fn added(&self) -> impl DoubleEndedIterator<Item = HalfInt> + '_ {
        self.added.iter().map(|&c| HalfInt(c))
    }

    pub fn removed(&self) -> impl DoubleEndedIterator<Item = HalfInt> + '_ {
        self.removed.iter().map(|&c| HalfInt(c))
    }

    pub fn is_occupied(&self, p: HalfInt) -> bool {
        let c = p.code();
        if c >= self.charge {
            self.added.contains(&c)
        } else {
            !self.removed.contains(&c)
        }
    }

    /// Lowest code at which the diagram can differ from a fully occupied tail.
    fn floor(&self) -> i64 {
        self.removed
            .first()
            .copied()
            .unwrap_or(self.charge)
            .min(self.charge)
    }

    /// Occupied codes at or above `floor`, in decreasing order.
    pub fn occupied_from(&self, floor: i64) -> Vec<i64> {
        let top = self
            .added
            .last()
            .map_or(self.charge - 1, |&t| t.max(self.charge - 1));
        (floor..=top)
            .rev()
            .filter(|&c| self.is_occupied(HalfInt(c)))
            .collect()
    }
}

/// `(λ, l) ↦ {l + λ_k − k + 1/2 : k ≥ 1}`.
pub fn maya_from_young_charge(lambda: &Partition, charge: i64) -> MayaDiagram {
    let occupied: BTreeSet<i64> = (1..=lambda.len())
        .map(|k| charge + i64::from(lambda.part(k)) - k as i64)
        .collect();
    let floor = charge - lambda.len() as i64;
    MayaDiagram::from_occupation(floor, &occupied)
}

/// Inverse of [`maya_from_young_charge`].
pub fn young_charge_from_maya(m: &MayaDiagram) -> (Partition, i64) {
    let l = m.charge;
    let occ = m.occupied_from(m.floor());
    let mut parts: Vec<u32> = occ
        .iter()
        .enumerate()
        .map(|(i, &c)| (c - l + (i as i64 + 1)) as u32)
        .collect();
    while parts.last() == Some(&0) {
        parts.pop();
    }
    (Partition(parts), l)
}

#[derive(Serialize, Deserialize)]
struct MayaJson {
    charge: i64,
    added: Vec<String>,
    removed: Vec<String>,
}

impl Serialize for MayaDiagram {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        MayaJson {
            charge: self.charge,
            added: self.added().rev().map(|p| p.to_string()).collect(),
            removed: self.removed().rev().map(|p| p.to_string()).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MayaDiagram {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let raw = MayaJson::deserialize(d)?;
        let parse = |v: &[String]| -> Result<Vec<HalfInt>, D::Error> {
            v.iter()
                .map(|s| s.parse().map_err(D::Error::custom))
                .collect()
        };
        MayaDiagram::new(raw.charge, parse(&raw.added)?, parse(&raw.removed)?)
            .map_err(D::Error::custom)
    }
}
