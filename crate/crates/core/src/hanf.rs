//! Hanf-condition checks for pairs and families, and the empirical
//! `m`-equivalence threshold of a family.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::ball_types::{census, compare_censuses, Census, CensusRow};
use crate::canon::CanonicalCode;
use crate::ef::{m_equiv_with, GameConfig};
use crate::error::{Error, Result};
use crate::families::Family;
use crate::gaifman::{degree_bound, max_ball_size};
use crate::structure::FiniteStructure;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum HanfVerdict {
    Pass,
    /// The first type, in code order, that breaks the condition.
    Inconclusive {
        code: CanonicalCode,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HanfCertificate {
    pub m: usize,
    /// Ball radius `3^m`.
    pub radius: usize,
    /// One more than the largest ball in either structure.
    pub e: usize,
    pub rows: Vec<CensusRow>,
    pub verdict: HanfVerdict,
}

impl HanfCertificate {
    pub fn passed(&self) -> bool {
        self.verdict == HanfVerdict::Pass
    }

    /// Counts above this are treated as equal.
    pub fn threshold(&self) -> usize {
        self.m * self.e
    }
}

pub fn hanf_radius(m: usize) -> usize {
    3usize.pow(m as u32)
}

/// Sufficient condition for `a ≡_m b`: at radius `3^m`, every ball type has
/// equal counts in both structures or more than `m·e` in each.
pub fn hanf_pair_check(a: &FiniteStructure, b: &FiniteStructure, m: usize) -> Result<HanfCertificate> {
    if a.signature() != b.signature() {
        return Err(Error::SignatureMismatch);
    }
    let radius = hanf_radius(m);
    let e = 1 + max_ball_size(a, radius).max(max_ball_size(b, radius));
    let (ca, cb) = rayon::join(|| census(a, radius), || census(b, radius));
    let rows = compare_censuses(&ca, &cb).rows;
    let threshold = m * e;
    let verdict = rows
        .iter()
        .find(|r| r.left != r.right && (r.left <= threshold || r.right <= threshold))
        .map_or(HanfVerdict::Pass, |r| HanfVerdict::Inconclusive {
            code: r.code.clone(),
            left: r.left,
            right: r.right,
        });
    Ok(HanfCertificate {
        m,
        radius,
        e,
        rows,
        verdict,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "class", content = "count", rename_all = "snake_case")]
pub enum SeriesClass {
    Stabilized(usize),
    Growing,
    Undecided,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeriesEntry {
    pub m: usize,
    pub code: CanonicalCode,
    /// Count at indices `1..=horizon`.
    pub counts: Vec<usize>,
    pub class: SeriesClass,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SequenceReport {
    pub family: String,
    pub max_m: usize,
    pub horizon: usize,
    pub window: usize,
    pub growth_threshold: usize,
    /// Maximum Gaifman degree at indices `1..=horizon`.
    pub degree_bounds: Vec<usize>,
    pub degree_bound_seen: usize,
    pub entries: Vec<SeriesEntry>,
}

impl SequenceReport {
    pub fn undecided(&self) -> impl Iterator<Item = &SeriesEntry> {
        self.entries.iter().filter(|e| e.class == SeriesClass::Undecided)
    }

    /// Degree bound constant over the trailing window.
    pub fn degree_bound_settled(&self) -> bool {
        let tail = &self.degree_bounds[self.horizon - self.window..];
        tail.iter().all(|&d| d == tail[0])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SequenceConfig {
    pub max_m: usize,
    pub horizon: usize,
    pub window: usize,
    /// Defaults to `3 · window`.
    pub growth_threshold: Option<usize>,
}

/// Classifies the last `window` values of `counts`.
pub fn classify(counts: &[usize], window: usize, growth_threshold: usize) -> SeriesClass {
    let tail = &counts[counts.len() - window..];
    let (first, last) = (tail[0], tail[window - 1]);
    if tail.iter().all(|&c| c == first) {
        SeriesClass::Stabilized(first)
    } else if tail.windows(2).all(|w| w[0] <= w[1]) && last > first && last > growth_threshold {
        SeriesClass::Growing
    } else {
        SeriesClass::Undecided
    }
}

/// Prefix evidence that a family is a Hanf sequence: per-index degree bounds
/// and, for every radius `m ≤ max_m` and every ball type seen, the class of
/// its count sequence over the trailing window.
pub fn hanf_sequence_check(family: &Family, config: &SequenceConfig) -> Result<SequenceReport> {
    let SequenceConfig {
        max_m,
        horizon,
        window,
        growth_threshold,
    } = *config;
    if window < 2 || horizon <= window {
        return Err(Error::InvalidParameter(format!(
            "need horizon > window >= 2, got horizon {horizon}, window {window}"
        )));
    }
    let growth_threshold = growth_threshold.unwrap_or(3 * window);
    let members = (1..=horizon)
        .into_par_iter()
        .map(|i| family.member(i))
        .collect::<Result<Vec<_>>>()?;
    let degree_bounds: Vec<usize> = members.iter().map(degree_bound).collect();
    let censuses: Vec<Vec<Census>> = members
        .par_iter()
        .map(|s| (0..=max_m).map(|m| census(s, m)).collect())
        .collect();

    let mut entries = Vec::new();
    for m in 0..=max_m {
        let mut series: BTreeMap<&CanonicalCode, Vec<usize>> = BTreeMap::new();
        for (i, per_index) in censuses.iter().enumerate() {
            for (code, &count) in &per_index[m].counts {
                series.entry(code).or_insert_with(|| vec![0; horizon])[i] = count;
            }
        }
        for (code, counts) in series {
            let class = classify(&counts, window, growth_threshold);
            entries.push(SeriesEntry {
                m,
                code: code.clone(),
                counts,
                class,
            });
        }
    }
    Ok(SequenceReport {
        family: family.name().to_string(),
        max_m,
        horizon,
        window,
        growth_threshold,
        degree_bound_seen: degree_bounds.iter().copied().max().unwrap_or(0),
        degree_bounds,
        entries,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ThresholdReport {
    pub family: String,
    pub m: usize,
    pub horizon: usize,
    /// Least index from which every later index is `m`-equivalent to it;
    /// `None` when only the last index qualifies.
    pub n_emp: Option<usize>,
    /// `≡_m` classes of `1..=horizon`, ordered by least member.
    pub classes: Vec<Vec<usize>>,
}

/// Partitions `1..=horizon` into `≡_m` classes by comparing each index with
/// the first member of every class found so far.
pub fn threshold_experiment(family: &Family, m: usize, horizon: usize, config: &GameConfig) -> Result<ThresholdReport> {
    if horizon < 2 {
        return Err(Error::InvalidParameter(format!(
            "horizon must be at least 2, got {horizon}"
        )));
    }
    let members = (1..=horizon)
        .into_par_iter()
        .map(|i| family.member(i))
        .collect::<Result<Vec<_>>>()?;
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut class_of = Vec::with_capacity(horizon);
    for (i, s) in members.iter().enumerate() {
        let verdicts = classes
            .par_iter()
            .map(|class| m_equiv_with(&members[class[0] - 1], s, m, config))
            .collect::<Result<Vec<bool>>>()?;
        match verdicts.iter().position(|&v| v) {
            Some(c) => {
                classes[c].push(i + 1);
                class_of.push(c);
            }
            None => {
                class_of.push(classes.len());
                classes.push(vec![i + 1]);
            }
        }
    }
    let last = class_of[horizon - 1];
    let start = class_of.iter().rposition(|&c| c != last).map_or(1, |p| p + 2);
    let n_emp = (start < horizon).then_some(start);
    Ok(ThresholdReport {
        family: family.name().to_string(),
        m,
        horizon,
        n_emp,
        classes,
    })
}
