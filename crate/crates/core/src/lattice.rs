//! Lattice geometry, Hubbard couplings and Trotter schedules shared by both
//! formalisms.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spin {
    Up = 0,
    Down = 1,
}

impl Spin {
    pub const BOTH: [Spin; 2] = [Spin::Up, Spin::Down];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Result<Spin> {
        match i {
            0 => Ok(Spin::Up),
            1 => Ok(Spin::Down),
            _ => Err(Error::invalid(format!("spin index {i}"))),
        }
    }

    pub fn flipped(self) -> Spin {
        match self {
            Spin::Up => Spin::Down,
            Spin::Down => Spin::Up,
        }
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Spin::Up => "up",
            Spin::Down => "down",
        })
    }
}

/// Sites `1..=m` and the neighbor pairs between them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeSpec {
    m: usize,
    edges: Vec<(usize, usize)>,
}

impl LatticeSpec {
    /// Open chain 1–2–…–m.
    pub fn chain(m: usize) -> Result<Self> {
        Self::new(m, (1..m).map(|i| (i, i + 1)).collect())
    }

    /// Arbitrary neighbor list; pairs are stored as (smaller, larger) and
    /// sorted.
    pub fn new(m: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if m == 0 {
            return Err(Error::invalid("lattice needs at least one site"));
        }
        let mut norm = Vec::with_capacity(edges.len());
        for (i, j) in edges {
            if i == j || !(1..=m).contains(&i) || !(1..=m).contains(&j) {
                return Err(Error::invalid(format!("bad neighbor pair ({i}, {j}) for m = {m}")));
            }
            norm.push((i.min(j), i.max(j)));
        }
        norm.sort_unstable();
        if norm.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid("duplicate neighbor pair"));
        }
        Ok(LatticeSpec { m, edges: norm })
    }

    pub fn sites(&self) -> usize {
        self.m
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn are_adjacent(&self, i: usize, j: usize) -> bool {
        self.edges.binary_search(&(i.min(j), i.max(j))).is_ok()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HubbardParams {
    /// On-site repulsion.
    pub v0: f64,
    /// Hopping amplitude.
    pub t0: f64,
}

impl HubbardParams {
    pub fn new(v0: f64, t0: f64) -> Result<Self> {
        if !v0.is_finite() || !t0.is_finite() {
            return Err(Error::invalid("Hubbard couplings must be finite"));
        }
        Ok(HubbardParams { v0, t0 })
    }
}

/// Total time `t` split into `r` equal slices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrotterPlan {
    pub t: f64,
    pub r: usize,
}

impl TrotterPlan {
    pub fn new(t: f64, r: usize) -> Result<Self> {
        if r == 0 {
            return Err(Error::invalid("Trotter step count must be at least 1"));
        }
        if !t.is_finite() {
            return Err(Error::invalid("evolution time must be finite"));
        }
        Ok(TrotterPlan { t, r })
    }

    pub fn dt(&self) -> f64 {
        self.t / self.r as f64
    }
}

/// Elementary-operation tally, keyed by operation kind.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpCount(pub BTreeMap<String, u64>);

impl OpCount {
    pub fn add(&mut self, kind: &str, n: u64) {
        *self.0.entry(kind.to_string()).or_insert(0) += n;
    }

    pub fn get(&self, kind: &str) -> u64 {
        self.0.get(kind).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.0.values().sum()
    }

    pub fn scaled(&self, factor: u64) -> OpCount {
        OpCount(self.0.iter().map(|(k, v)| (k.clone(), v * factor)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_edges() {
        let l = LatticeSpec::chain(4).unwrap();
        assert_eq!(l.edges(), &[(1, 2), (2, 3), (3, 4)]);
        assert!(l.are_adjacent(3, 2));
        assert!(!l.are_adjacent(1, 3));
        assert!(!l.are_adjacent(4, 1));
        assert!(LatticeSpec::chain(1).unwrap().edges().is_empty());
    }

    #[test]
    fn bad_lattices() {
        assert!(LatticeSpec::chain(0).is_err());
        assert!(LatticeSpec::new(3, vec![(1, 1)]).is_err());
        assert!(LatticeSpec::new(3, vec![(1, 4)]).is_err());
        assert!(LatticeSpec::new(3, vec![(1, 2), (2, 1)]).is_err());
    }

    #[test]
    fn plans_and_params() {
        assert!(TrotterPlan::new(1.0, 0).is_err());
        assert!(TrotterPlan::new(f64::NAN, 3).is_err());
        assert_eq!(TrotterPlan::new(1.0, 4).unwrap().dt(), 0.25);
        assert!(HubbardParams::new(f64::INFINITY, 1.0).is_err());
    }
}
