//! Point-respecting isomorphism by backtracking.
//!
//! Independent of [`crate::canon`]: candidates are pruned only by local
//! occurrence profiles and Gaifman adjacency to already-mapped elements, and
//! every assignment is checked tuple by tuple in both directions.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::gaifman::GaifmanGraph;
use crate::structure::{FiniteStructure, PointedStructure};
use crate::Element;

pub const DEFAULT_ISO_LIMIT: usize = 512;

pub fn iso_check(a: &PointedStructure, b: &PointedStructure) -> Result<bool> {
    iso_check_with_limit(a, b, DEFAULT_ISO_LIMIT)
}

pub fn iso_check_with_limit(a: &PointedStructure, b: &PointedStructure, limit: usize) -> Result<bool> {
    let (sa, sb) = (&a.structure, &b.structure);
    if sa.signature() != sb.signature() {
        return Err(Error::SignatureMismatch);
    }
    for s in [sa, sb] {
        if s.size() > limit {
            return Err(Error::SizeLimit { size: s.size(), limit });
        }
    }
    if sa.size() != sb.size() || a.points.len() != b.points.len() {
        return Ok(false);
    }
    if sa.tables().iter().zip(sb.tables()).any(|(x, y)| x.len() != y.len()) {
        return Ok(false);
    }
    let left = Side::new(sa, &a.points);
    let right = Side::new(sb, &b.points);
    let mut profile_counts: BTreeMap<&Profile, isize> = BTreeMap::new();
    for p in &left.profiles {
        *profile_counts.entry(p).or_default() += 1;
    }
    for p in &right.profiles {
        *profile_counts.entry(p).or_default() -= 1;
    }
    if profile_counts.values().any(|&c| c != 0) {
        return Ok(false);
    }

    let n = sa.size();
    let mut search = Matcher {
        left: &left,
        right: &right,
        forward: vec![None; n],
        backward: vec![None; n],
        order: left.search_order(),
    };
    // Points are forced; check them first.
    for (&pa, &pb) in a.points.iter().zip(&b.points) {
        match (search.forward[pa], search.backward[pb]) {
            (Some(x), _) if x != pb => return Ok(false),
            (_, Some(y)) if y != pa => return Ok(false),
            (Some(_), _) => continue,
            _ => {}
        }
        if !search.assign(pa, pb) {
            return Ok(false);
        }
    }
    Ok(search.extend(0))
}

/// How an element occurs: relation, position and the equality pattern of
/// each tuple it sits in, plus its Gaifman degree and point indices.
type Profile = (usize, Vec<usize>, Vec<(usize, usize, Vec<usize>)>);

struct Side<'a> {
    structure: &'a FiniteStructure,
    graph: GaifmanGraph,
    profiles: Vec<Profile>,
    incident: Vec<Vec<(usize, usize)>>,
}

impl<'a> Side<'a> {
    fn new(structure: &'a FiniteStructure, points: &[Element]) -> Self {
        let n = structure.size();
        let graph = GaifmanGraph::of(structure);
        let mut occurrences: Vec<Vec<(usize, usize, Vec<usize>)>> = vec![Vec::new(); n];
        let mut incident = vec![Vec::new(); n];
        for (rel, table) in structure.tables().iter().enumerate() {
            for (id, t) in table.iter().enumerate() {
                let pattern: Vec<usize> = t.iter().map(|x| t.iter().position(|y| y == x).unwrap()).collect();
                for (pos, &e) in t.iter().enumerate() {
                    occurrences[e].push((rel, pos, pattern.clone()));
                    if t[..pos].iter().all(|&y| y != e) {
                        incident[e].push((rel, id));
                    }
                }
            }
        }
        let mut point_indices = vec![Vec::new(); n];
        for (i, &p) in points.iter().enumerate() {
            point_indices[p].push(i);
        }
        let profiles = occurrences
            .into_iter()
            .zip(point_indices)
            .enumerate()
            .map(|(e, (mut occ, pts))| {
                occ.sort();
                (graph.degree(e), pts, occ)
            })
            .collect();
        Side {
            structure,
            graph,
            profiles,
            incident,
        }
    }

    /// Points first, then breadth-first through each component.
    fn search_order(&self) -> Vec<Element> {
        let n = self.structure.size();
        let mut seen = vec![false; n];
        let mut order = Vec::with_capacity(n);
        let starts: Vec<Element> = (0..n).filter(|&e| !self.profiles[e].1.is_empty()).chain(0..n).collect();
        for start in starts {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut i = order.len();
            order.push(start);
            while i < order.len() {
                let u = order[i];
                i += 1;
                for &v in self.graph.neighbors(u) {
                    if !seen[v] {
                        seen[v] = true;
                        order.push(v);
                    }
                }
            }
        }
        order
    }
}

struct Matcher<'a, 'b> {
    left: &'b Side<'a>,
    right: &'b Side<'a>,
    forward: Vec<Option<Element>>,
    backward: Vec<Option<Element>>,
    order: Vec<Element>,
}

impl Matcher<'_, '_> {
    fn extend(&mut self, index: usize) -> bool {
        let Some(&u) = self.order.get(index) else {
            return true;
        };
        if self.forward[u].is_some() {
            return self.extend(index + 1);
        }
        let anchor = self.left.graph.neighbors(u).iter().find_map(|&w| self.forward[w]);
        let candidates: Vec<Element> = match anchor {
            Some(img) => self.right.graph.neighbors(img).to_vec(),
            None => (0..self.right.structure.size()).collect(),
        };
        for v in candidates {
            if self.backward[v].is_some() || self.left.profiles[u] != self.right.profiles[v] {
                continue;
            }
            if self.assign(u, v) && self.extend(index + 1) {
                return true;
            }
            self.forward[u] = None;
            self.backward[v] = None;
        }
        false
    }

    /// Maps `u -> v` and checks every tuple that became fully mapped.
    fn assign(&mut self, u: Element, v: Element) -> bool {
        self.forward[u] = Some(v);
        self.backward[v] = Some(u);
        let ok =
            consistent(self.left, self.right, &self.forward, u) && consistent(self.right, self.left, &self.backward, v);
        if !ok {
            self.forward[u] = None;
            self.backward[v] = None;
        }
        ok
    }
}

fn consistent(from: &Side, to: &Side, map: &[Option<Element>], e: Element) -> bool {
    from.incident[e].iter().all(|&(rel, id)| {
        let t = &from.structure.table(rel)[id];
        match t.iter().map(|&x| map[x]).collect::<Option<Vec<Element>>>() {
            Some(image) => to.structure.contains(rel, &image),
            None => true,
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{cycle, dipath, disjoint_copies, linear_order};
    use crate::structure::disjoint_union;

    fn pointed(s: FiniteStructure, pts: &[Element]) -> PointedStructure {
        PointedStructure {
            structure: s,
            points: pts.to_vec(),
        }
    }

    #[test]
    fn spec_cases() {
        let l2 = pointed(linear_order(2).unwrap(), &[]);
        assert!(iso_check(&l2, &l2).unwrap());
        let p3 = dipath(3).unwrap();
        assert!(!iso_check(&pointed(p3.clone(), &[0]), &pointed(p3, &[2])).unwrap());
        let c6 = pointed(cycle(6).unwrap(), &[]);
        let c33 = pointed(disjoint_copies(&cycle(3).unwrap(), 2).unwrap(), &[]);
        assert!(!iso_check(&c6, &c33).unwrap());
    }

    #[test]
    fn relabelled_structures_are_isomorphic() {
        let c = disjoint_union(&cycle(5).unwrap(), &dipath(4).unwrap()).unwrap();
        let perm: Vec<Element> = (0..c.size()).rev().collect();
        let p = pointed(c.clone(), &[1, 6]);
        assert!(iso_check(&p, &p.relabel(&perm)).unwrap());
        assert!(!iso_check(&p, &pointed(c, &[6, 1])).unwrap());
    }

    #[test]
    fn size_limit_is_enforced() {
        let big = pointed(dipath(20).unwrap(), &[]);
        assert!(matches!(
            iso_check_with_limit(&big, &big, 10),
            Err(Error::SizeLimit { .. })
        ));
    }

    #[test]
    fn signature_mismatch_is_an_error() {
        let a = pointed(dipath(2).unwrap(), &[]);
        let b = pointed(linear_order(2).unwrap(), &[]);
        assert!(matches!(iso_check(&a, &b), Err(Error::SignatureMismatch)));
    }
}
