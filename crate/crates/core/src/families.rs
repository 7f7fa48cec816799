//! Deterministic generators for the structure families used in the
//! inexpressibility experiments.
//!
//! Numbering conventions:
//! - `dipath(n)`: edges `(i, i+1)`.
//! - `linear_order(n)`: relation `<` holds for all `i < j`.
//! - `cycle(n)`: vertex `i` adjacent to `i±1 mod n`, stored as symmetric pairs.
//! - `k5_subdivision(n)`: branch vertices `0..5`; the `n` inner vertices of the
//!   path between branch vertices `i < j` follow in lexicographic pair order,
//!   listed from the `i` end.
//! - `double_path_gadget(n)`: centre `0`, first path `1..=n`, second path
//!   `n+1..=2n`; the centre is adjacent to both ends of each path.
//! - Coloured cycles are traversed clockwise, i.e. in increasing index order.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::structure::{disjoint_union, FiniteStructure, Signature};
use crate::Element;

pub fn graph_signature() -> Signature {
    Signature::new([("E", 2)]).expect("static signature")
}

pub fn order_signature() -> Signature {
    Signature::new([("<", 2)]).expect("static signature")
}

/// `E` plus unary predicates `P1..PK`.
pub fn colored_signature(k: usize) -> Signature {
    let mut rels = vec![("E".to_string(), 2)];
    rels.extend((1..=k).map(|i| (format!("P{i}"), 1)));
    Signature::new(rels).expect("distinct names")
}

fn need(cond: bool, what: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter(what.to_string()))
    }
}

fn undirected(size: usize, sig: Signature, edges: impl IntoIterator<Item = (Element, Element)>) -> FiniteStructure {
    let mut table: Vec<Vec<Element>> = Vec::new();
    for (a, b) in edges {
        table.push(vec![a, b]);
        table.push(vec![b, a]);
    }
    let mut tables = vec![Vec::new(); sig.len()];
    tables[0] = table;
    FiniteStructure::from_tables(sig, size, dedup(tables)).expect("generated tuples are in range")
}

fn dedup(mut tables: Vec<Vec<Vec<Element>>>) -> Vec<Vec<Vec<Element>>> {
    for t in &mut tables {
        t.sort();
        t.dedup();
    }
    tables
}

/// Directed path `P_n` on `n ≥ 1` nodes.
pub fn dipath(n: usize) -> Result<FiniteStructure> {
    need(n >= 1, "dipath needs n >= 1")?;
    let edges = (1..n).map(|i| vec![i - 1, i]).collect();
    FiniteStructure::from_tables(graph_signature(), n, vec![edges])
}

/// Strict linear order `L_n` on `n ≥ 1` elements.
pub fn linear_order(n: usize) -> Result<FiniteStructure> {
    need(n >= 1, "linear order needs n >= 1")?;
    let pairs = (0..n).flat_map(|i| (i + 1..n).map(move |j| vec![i, j])).collect();
    FiniteStructure::from_tables(order_signature(), n, vec![pairs])
}

/// Undirected cycle `C_n`, `n ≥ 3`.
pub fn cycle(n: usize) -> Result<FiniteStructure> {
    need(n >= 3, "cycle needs n >= 3")?;
    Ok(undirected(n, graph_signature(), (0..n).map(|i| (i, (i + 1) % n))))
}

/// `k ≥ 1` disjoint copies of `g`.
pub fn disjoint_copies(g: &FiniteStructure, k: usize) -> Result<FiniteStructure> {
    need(k >= 1, "copies needs k >= 1")?;
    let mut out = g.clone();
    for _ in 1..k {
        out = disjoint_union(&out, g)?;
    }
    Ok(out)
}

/// `K_5` with `n` extra nodes inserted into every edge: `5 + 10n` nodes.
pub fn k5_subdivision(n: usize) -> FiniteStructure {
    let mut edges = Vec::new();
    let mut next = 5;
    for i in 0..5 {
        for j in i + 1..5 {
            let mut prev = i;
            for _ in 0..n {
                edges.push((prev, next));
                prev = next;
                next += 1;
            }
            edges.push((prev, j));
        }
    }
    undirected(5 + 10 * n, graph_signature(), edges)
}

/// Two paths of `n` nodes each, closed into cycles through a shared centre:
/// `2n + 1` nodes.
pub fn double_path_gadget(n: usize) -> Result<FiniteStructure> {
    need(n >= 1, "gadget needs n >= 1")?;
    let mut edges = Vec::new();
    for start in [1, n + 1] {
        let end = start + n - 1;
        edges.extend((start..end).map(|v| (v, v + 1)));
        edges.push((0, start));
        edges.push((0, end));
    }
    Ok(undirected(2 * n + 1, graph_signature(), edges))
}

/// `(k5_subdivision(n), five disjoint gadgets)`: non-planar vs planar.
pub fn planar_pair(n: usize) -> Result<(FiniteStructure, FiniteStructure)> {
    Ok((k5_subdivision(n), disjoint_copies(&double_path_gadget(n)?, 5)?))
}

/// A cycle whose vertices carry `k`-bit colour vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoredCycle {
    k: usize,
    colors: Vec<Vec<bool>>,
}

impl ColoredCycle {
    pub fn new(k: usize, colors: Vec<Vec<bool>>) -> Result<Self> {
        need(colors.len() >= 3, "coloured cycle needs length >= 3")?;
        need(colors.iter().all(|c| c.len() == k), "every colour vector needs k bits")?;
        Ok(ColoredCycle { k, colors })
    }

    /// One predicate, constantly false.
    pub fn monochrome(length: usize) -> Result<Self> {
        Self::new(1, vec![vec![false]; length])
    }

    /// Colour vectors given as integers `< 2^k`, repeating `pattern` cyclically.
    pub fn from_pattern(length: usize, k: usize, pattern: &[u32]) -> Result<Self> {
        need(!pattern.is_empty(), "pattern must be nonempty")?;
        need(
            k <= 31 && pattern.iter().all(|&c| c >> k == 0),
            "pattern colour exceeds 2^k",
        )?;
        let colors = (0..length)
            .map(|i| {
                let c = pattern[i % pattern.len()];
                (0..k).map(|bit| c >> bit & 1 == 1).collect()
            })
            .collect();
        Self::new(k, colors)
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn color(&self, v: Element) -> &[bool] {
        &self.colors[v]
    }

    fn with_edges(&self, edges: impl IntoIterator<Item = (Element, Element)>) -> FiniteStructure {
        let mut s = undirected(self.len(), colored_signature(self.k), edges);
        for (v, c) in self.colors.iter().enumerate() {
            for (bit, &on) in c.iter().enumerate() {
                if on {
                    s.insert_at(bit + 1, vec![v]).expect("in range");
                }
            }
        }
        s
    }

    pub fn structure(&self) -> FiniteStructure {
        let n = self.len();
        self.with_edges((0..n).map(|i| (i, (i + 1) % n)))
    }

    /// Colours of `v−r, …, v+r` in clockwise order.
    pub fn oriented_word(&self, v: Element, r: usize) -> Vec<Vec<bool>> {
        let n = self.len();
        (0..=2 * r)
            .map(|i| self.colors[(v + n * (r + 1) + i - r) % n].clone())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitCycle {
    pub structure: FiniteStructure,
    pub a: Element,
    pub b: Element,
}

/// Splits a coloured cycle into two cycles without changing any `n`-ball type.
///
/// Picks the lexicographically least `a < b` whose oriented `n`-neighbourhood
/// words agree and whose clockwise and counter-clockwise distances are both
/// at least `2n + 2`. With `a' = a+1` and `b' = b+1`, the edges `{a, a'}` and
/// `{b, b'}` are replaced by `{a, b'}` and `{b, a'}`, giving the cycles
/// `a' … b` and `b' … a`.
pub fn split_cycle(c: &ColoredCycle, n: usize) -> Result<SplitCycle> {
    let len = c.len();
    need(len >= 4 * n + 6, "split_cycle needs length >= 4n + 6")?;
    let words: Vec<Vec<Vec<bool>>> = (0..len).map(|v| c.oriented_word(v, n)).collect();
    let gap = 2 * n + 2;
    for a in 0..len {
        for b in a + gap..len {
            if len - (b - a) < gap || words[a] != words[b] {
                continue;
            }
            let (a1, b1) = ((a + 1) % len, (b + 1) % len);
            let edges = (0..len)
                .map(|i| (i, (i + 1) % len))
                .filter(|&(i, _)| i != a && i != b)
                .chain([(a, b1), (b, a1)]);
            return Ok(SplitCycle {
                structure: c.with_edges(edges),
                a,
                b,
            });
        }
    }
    let mut census: BTreeMap<String, usize> = BTreeMap::new();
    for w in &words {
        let text: String = w
            .iter()
            .map(|bits| {
                bits.iter()
                    .enumerate()
                    .fold(0u32, |acc, (i, &on)| acc | (on as u32) << i)
                    .to_string()
            })
            .collect::<Vec<_>>()
            .join(".");
        *census.entry(text).or_default() += 1;
    }
    let words = census
        .iter()
        .map(|(w, k)| format!("{w}:{k}"))
        .collect::<Vec<_>>()
        .join(",");
    Err(Error::NoSplitPair { words })
}

/// A named, integer-indexed family of structures, members `1, 2, …`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Family {
    /// Member `i` is `P_i`.
    Dipaths,
    /// Member `i` is `L_i`.
    LinearOrders,
    /// Member `i` is `C_{i+2}`.
    Cycles,
    /// `A_2, B_2, A_3, B_3, …` with `A_n = k5_subdivision(n)` and `B_n` five gadgets.
    PlanarInterleaved,
    /// `C_{2k}, C_k ⊔ C_k` for `k = 3, 4, …`, alternating.
    ConnectivityInterleaved,
    /// The same structure at every index.
    Constant(Box<FiniteStructure>),
}

impl Family {
    pub fn by_name(name: &str) -> Result<Family> {
        Ok(match name {
            "dipath" | "dipaths" => Family::Dipaths,
            "order" | "orders" => Family::LinearOrders,
            "cycle" | "cycles" => Family::Cycles,
            "planar" | "planarpair" => Family::PlanarInterleaved,
            "connectivity" => Family::ConnectivityInterleaved,
            other => return Err(Error::UnknownFamily(other.to_string())),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::Dipaths => "dipath",
            Family::LinearOrders => "order",
            Family::Cycles => "cycle",
            Family::PlanarInterleaved => "planar",
            Family::ConnectivityInterleaved => "connectivity",
            Family::Constant(_) => "constant",
        }
    }

    /// Member at 1-based index `i`.
    pub fn member(&self, i: usize) -> Result<FiniteStructure> {
        need(i >= 1, "family indices start at 1")?;
        match self {
            Family::Dipaths => dipath(i),
            Family::LinearOrders => linear_order(i),
            Family::Cycles => cycle(i + 2),
            Family::PlanarInterleaved => {
                let n = 2 + (i - 1) / 2;
                let (a, b) = planar_pair(n)?;
                Ok(if i % 2 == 1 { a } else { b })
            }
            Family::ConnectivityInterleaved => {
                let k = 3 + (i - 1) / 2;
                if i % 2 == 1 {
                    cycle(2 * k)
                } else {
                    disjoint_copies(&cycle(k)?, 2)
                }
            }
            Family::Constant(s) => Ok((**s).clone()),
        }
    }
}
