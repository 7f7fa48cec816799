//! Gaifman graphs, distances, balls and connected components.

use std::collections::VecDeque;
use std::fmt;

use crate::error::Result;
use crate::structure::{induced_substructure, FiniteStructure, PointedStructure};
use crate::Element;

/// Shortest-path length in a Gaifman graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Distance {
    Finite(usize),
    Infinite,
}

impl Distance {
    pub fn finite(self) -> Option<usize> {
        match self {
            Distance::Finite(d) => Some(d),
            Distance::Infinite => None,
        }
    }

    pub fn is_within(self, bound: usize) -> bool {
        matches!(self, Distance::Finite(d) if d <= bound)
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Finite(d) => write!(f, "{d}"),
            Distance::Infinite => f.write_str("inf"),
        }
    }
}

/// Undirected, loop-free graph on the universe of a structure: two distinct
/// elements are adjacent when they occur together in some tuple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaifmanGraph {
    adjacency: Vec<Vec<Element>>,
}

impl GaifmanGraph {
    pub fn of(s: &FiniteStructure) -> Self {
        let mut adjacency = vec![Vec::new(); s.size()];
        for (_, tuple) in s.tuples() {
            for (i, &a) in tuple.iter().enumerate() {
                for &b in &tuple[i + 1..] {
                    if a != b {
                        adjacency[a].push(b);
                        adjacency[b].push(a);
                    }
                }
            }
        }
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        GaifmanGraph { adjacency }
    }

    pub fn size(&self) -> usize {
        self.adjacency.len()
    }

    pub fn neighbors(&self, a: Element) -> &[Element] {
        &self.adjacency[a]
    }

    pub fn degree(&self, a: Element) -> usize {
        self.adjacency[a].len()
    }

    pub fn has_edge(&self, a: Element, b: Element) -> bool {
        self.adjacency[a].binary_search(&b).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edges `(a, b)` with `a < b`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (Element, Element)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(a, list)| list.iter().filter(move |&&b| a < b).map(move |&b| (a, b)))
    }

    fn check(&self, a: Element) -> Result<()> {
        if a < self.size() {
            Ok(())
        } else {
            Err(crate::Error::ElementOutOfRange {
                element: a,
                size: self.size(),
            })
        }
    }

    /// BFS distances from `source`, `None` where unreachable.
    pub fn distances_from(&self, source: Element) -> Vec<Option<usize>> {
        self.bfs(source, usize::MAX)
    }

    fn bfs(&self, source: Element, limit: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.size()];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            let d = dist[u].unwrap();
            if d == limit {
                continue;
            }
            for &v in &self.adjacency[u] {
                if dist[v].is_none() {
                    dist[v] = Some(d + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    pub fn distance(&self, a: Element, b: Element) -> Result<Distance> {
        self.check(a)?;
        self.check(b)?;
        Ok(match self.bfs(a, usize::MAX)[b] {
            Some(d) => Distance::Finite(d),
            None => Distance::Infinite,
        })
    }

    /// Elements at distance at most `radius` from `center`, ascending.
    pub fn ball_members(&self, center: Element, radius: usize) -> Vec<Element> {
        self.bfs(center, radius)
            .iter()
            .enumerate()
            .filter_map(|(e, d)| d.map(|_| e))
            .collect()
    }

    pub fn components(&self) -> Vec<Vec<Element>> {
        let mut seen = vec![false; self.size()];
        let mut out = Vec::new();
        for start in 0..self.size() {
            if seen[start] {
                continue;
            }
            let mut comp = vec![start];
            seen[start] = true;
            let mut i = 0;
            while i < comp.len() {
                let u = comp[i];
                i += 1;
                for &v in &self.adjacency[u] {
                    if !seen[v] {
                        seen[v] = true;
                        comp.push(v);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }
}

pub fn gaifman_graph(s: &FiniteStructure) -> GaifmanGraph {
    GaifmanGraph::of(s)
}

pub fn distance(g: &GaifmanGraph, a: Element, b: Element) -> Result<Distance> {
    g.distance(a, b)
}

/// The `m`-ball of `a`: the induced substructure on all elements within
/// Gaifman distance `m`, pointed at the image of `a`.
pub fn ball(s: &FiniteStructure, a: Element, m: usize) -> Result<PointedStructure> {
    s.check_element(a)?;
    ball_in(s, &GaifmanGraph::of(s), a, m)
}

/// Like [`ball`], reusing a precomputed Gaifman graph of `s`.
pub fn ball_in(s: &FiniteStructure, g: &GaifmanGraph, a: Element, m: usize) -> Result<PointedStructure> {
    s.check_element(a)?;
    let members = g.ball_members(a, m);
    let (sub, map) = induced_substructure(s, &members)?;
    Ok(PointedStructure {
        structure: sub,
        points: vec![map[a].expect("center lies in its ball")],
    })
}

/// Connected components of the Gaifman graph, each ascending, ordered by
/// least element.
pub fn components(s: &FiniteStructure) -> Vec<Vec<Element>> {
    GaifmanGraph::of(s).components()
}

/// Largest `|S_m(a)|` over all elements (0 for the empty structure).
pub fn max_ball_size(s: &FiniteStructure, m: usize) -> usize {
    let g = GaifmanGraph::of(s);
    s.universe().map(|a| g.ball_members(a, m).len()).max().unwrap_or(0)
}

/// Largest Gaifman degree.
pub fn degree_bound(s: &FiniteStructure) -> usize {
    GaifmanGraph::of(s).max_degree()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{cycle, dipath, disjoint_copies, k5_subdivision, linear_order};
    use crate::structure::Signature;

    #[test]
    fn linear_order_has_complete_gaifman_graph() {
        let g = gaifman_graph(&linear_order(5).unwrap());
        assert_eq!(g.edge_count(), 10);
        assert!(g.edges().all(|(a, b)| a < b));
    }

    #[test]
    fn dipath_gaifman_graph_is_undirected_path() {
        let g = gaifman_graph(&dipath(6).unwrap());
        assert_eq!(
            g.edges().collect::<Vec<_>>(),
            vec![(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)]
        );
    }

    #[test]
    fn edgeless_and_loops_give_no_edges() {
        let sig = Signature::new([("E", 2), ("P", 1)]).unwrap();
        let mut s = FiniteStructure::new(sig, 3);
        s.insert("E", vec![1, 1]).unwrap();
        s.insert("P", vec![2]).unwrap();
        assert_eq!(gaifman_graph(&s).edge_count(), 0);
    }

    #[test]
    fn ternary_tuple_yields_triangle() {
        let sig = Signature::new([("R", 3)]).unwrap();
        let mut s = FiniteStructure::new(sig, 4);
        s.insert("R", vec![0, 2, 3]).unwrap();
        let g = gaifman_graph(&s);
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 2), (0, 3), (2, 3)]);
    }

    #[test]
    fn distances() {
        let g = gaifman_graph(&dipath(10).unwrap());
        assert_eq!(g.distance(4, 4).unwrap(), Distance::Finite(0));
        assert_eq!(g.distance(0, 3).unwrap(), Distance::Finite(3));
        assert!(g.distance(0, 10).is_err());
        let two = disjoint_copies(&cycle(3).unwrap(), 2).unwrap();
        let g = gaifman_graph(&two);
        assert_eq!(g.distance(0, 4).unwrap(), Distance::Infinite);
        assert_eq!(Distance::Infinite.to_string(), "inf");
    }

    #[test]
    fn balls_of_a_path() {
        let p10 = dipath(10).unwrap();
        let b = ball(&p10, 0, 2).unwrap();
        assert_eq!(b.structure, dipath(3).unwrap());
        assert_eq!(b.points, vec![0]);
        let b = ball(&p10, 5, 2).unwrap();
        assert_eq!(b.structure, dipath(5).unwrap());
        assert_eq!(b.points, vec![2]);
        let b = ball(&p10, 7, 0).unwrap();
        assert_eq!(b.structure.size(), 1);
        assert_eq!(b.structure.tuple_count(), 0);
        assert!(ball(&p10, 10, 1).is_err());
    }

    #[test]
    fn zero_ball_keeps_loops() {
        let sig = Signature::new([("E", 2)]).unwrap();
        let mut s = FiniteStructure::new(sig, 2);
        s.insert("E", vec![1, 1]).unwrap();
        s.insert("E", vec![0, 1]).unwrap();
        let b = ball(&s, 1, 0).unwrap();
        assert_eq!(b.structure.table(0), &[vec![0, 0]]);
    }

    #[test]
    fn component_listing() {
        assert_eq!(components(&cycle(6).unwrap()), vec![vec![0, 1, 2, 3, 4, 5]]);
        let two = disjoint_copies(&cycle(3).unwrap(), 2).unwrap();
        assert_eq!(components(&two), vec![vec![0, 1, 2], vec![3, 4, 5]]);
        let sig = Signature::new([("E", 2)]).unwrap();
        assert_eq!(
            components(&FiniteStructure::new(sig, 3)),
            vec![vec![0], vec![1], vec![2]]
        );
    }

    #[test]
    fn degree_and_ball_bounds() {
        assert_eq!(degree_bound(&dipath(3).unwrap()), 2);
        assert_eq!(degree_bound(&dipath(12).unwrap()), 2);
        for n in 0..4 {
            assert_eq!(degree_bound(&k5_subdivision(n)), 4);
        }
        assert_eq!(max_ball_size(&dipath(10).unwrap(), 1), 3);
        assert_eq!(max_ball_size(&linear_order(7).unwrap(), 1), 7);
    }
}
