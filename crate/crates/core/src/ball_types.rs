//! Ball types, censuses and component types.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::canon::{canonical_code, CanonicalCode};
use crate::error::{Error, Result};
use crate::gaifman::{ball_in, GaifmanGraph};
use crate::structure::{induced_substructure, FiniteStructure, PointedStructure};
use crate::Element;

/// Ball radius; `Omega` denotes the whole connected component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Radius {
    Finite(usize),
    Omega,
}

impl fmt::Display for Radius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Radius::Finite(r) => write!(f, "{r}"),
            Radius::Omega => f.write_str("omega"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BallType {
    pub radius: Radius,
    pub code: CanonicalCode,
}

/// How many elements realize each `m`-ball type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Census {
    pub radius: usize,
    pub counts: BTreeMap<CanonicalCode, usize>,
    /// The least element realizing each type.
    pub representatives: BTreeMap<CanonicalCode, Element>,
}

impl Census {
    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }

    pub fn count(&self, code: &CanonicalCode) -> usize {
        self.counts.get(code).copied().unwrap_or(0)
    }

    pub fn type_count(&self) -> usize {
        self.counts.len()
    }
}

/// Canonical code of every element's `m`-ball, in element order.
pub fn ball_codes(s: &FiniteStructure, m: usize) -> Vec<CanonicalCode> {
    let graph = GaifmanGraph::of(s);
    (0..s.size())
        .into_par_iter()
        .map(|a| canonical_code(&ball_in(s, &graph, a, m).expect("element in range")))
        .collect()
}

pub fn census(s: &FiniteStructure, m: usize) -> Census {
    let mut counts = BTreeMap::new();
    let mut representatives = BTreeMap::new();
    for (a, code) in ball_codes(s, m).into_iter().enumerate() {
        *counts.entry(code.clone()).or_insert(0) += 1;
        representatives.entry(code).or_insert(a);
    }
    Census {
        radius: m,
        counts,
        representatives,
    }
}

/// The pointed ball realizing a census entry, for human inspection.
pub fn representative_ball(s: &FiniteStructure, census: &Census, code: &CanonicalCode) -> Option<PointedStructure> {
    let &a = census.representatives.get(code)?;
    crate::gaifman::ball(s, a, census.radius).ok()
}

/// Pointed isomorphism type of the connected component containing `a`.
pub fn component_type(s: &FiniteStructure, a: Element) -> Result<BallType> {
    s.check_element(a)?;
    let graph = GaifmanGraph::of(s);
    let members = graph.ball_members(a, usize::MAX);
    let (sub, map) = induced_substructure(s, &members)?;
    let code = canonical_code(&PointedStructure {
        structure: sub,
        points: vec![map[a].expect("member")],
    });
    Ok(BallType {
        radius: Radius::Omega,
        code,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CensusRow {
    pub code: CanonicalCode,
    pub left: usize,
    pub right: usize,
}

/// Two censuses side by side over the union of their types, ordered by code.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CensusComparison {
    pub radius: usize,
    pub rows: Vec<CensusRow>,
}

impl CensusComparison {
    pub fn identical(&self) -> bool {
        self.rows.iter().all(|r| r.left == r.right)
    }
}

pub fn compare_censuses(left: &Census, right: &Census) -> CensusComparison {
    let codes: BTreeSet<&CanonicalCode> = left.counts.keys().chain(right.counts.keys()).collect();
    let rows = codes
        .into_iter()
        .map(|code| CensusRow {
            code: code.clone(),
            left: left.count(code),
            right: right.count(code),
        })
        .collect();
    CensusComparison {
        radius: left.radius,
        rows,
    }
}

pub fn census_compare(a: &FiniteStructure, b: &FiniteStructure, m: usize) -> Result<CensusComparison> {
    if a.signature() != b.signature() {
        return Err(Error::SignatureMismatch);
    }
    Ok(compare_censuses(&census(a, m), &census(b, m)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{cycle, dipath, disjoint_copies};

    fn multiplicities(c: &Census) -> Vec<usize> {
        let mut v: Vec<usize> = c.counts.values().copied().collect();
        v.sort_unstable();
        v
    }

    #[test]
    fn dipath_census_radius_two() {
        let p10 = dipath(10).unwrap();
        let c = census(&p10, 2);
        assert_eq!(multiplicities(&c), vec![1, 1, 1, 1, 6]);
        let codes = ball_codes(&p10, 2);
        assert!((2..=7).all(|a| codes[a] == codes[2]));
        assert_eq!(c.total(), 10);
    }

    #[test]
    fn cycle_census_is_uniform() {
        let c = census(&cycle(8).unwrap(), 1);
        assert_eq!(multiplicities(&c), vec![8]);
        let c0 = census(&dipath(7).unwrap(), 0);
        assert_eq!(multiplicities(&c0), vec![7]);
    }

    #[test]
    fn component_types() {
        let p2 = dipath(2).unwrap();
        assert_ne!(component_type(&p2, 0).unwrap(), component_type(&p2, 1).unwrap());
        let c6 = cycle(6).unwrap();
        let t = component_type(&c6, 0).unwrap();
        assert!((1..6).all(|v| component_type(&c6, v).unwrap() == t));
        assert_eq!(t.radius, Radius::Omega);
        assert!(component_type(&c6, 6).is_err());
    }

    #[test]
    fn comparisons() {
        let p20 = dipath(20).unwrap();
        let p21 = dipath(21).unwrap();
        let cmp = census_compare(&p20, &p21, 2).unwrap();
        let mut pairs: Vec<(usize, usize)> = cmp.rows.iter().map(|r| (r.left, r.right)).collect();
        pairs.sort_unstable();
        assert_eq!(pairs, vec![(1, 1), (1, 1), (1, 1), (1, 1), (16, 17)]);

        let c6 = cycle(6).unwrap();
        let c33 = disjoint_copies(&cycle(3).unwrap(), 2).unwrap();
        let cmp = census_compare(&c6, &c33, 1).unwrap();
        // Induced 1-balls in a triangle are the whole triangle, not a path.
        let mut pairs: Vec<(usize, usize)> = cmp.rows.iter().map(|r| (r.left, r.right)).collect();
        pairs.sort_unstable();
        assert_eq!(pairs, vec![(0, 6), (6, 0)]);
        assert!(census_compare(&c6, &c6, 3).unwrap().identical());
    }
}
