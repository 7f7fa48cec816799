//! Canonical codes for pointed structures.
//!
//! Each connected component is canonized separately by colour refinement
//! followed by individualization of the smallest non-singleton cell; the
//! lexicographically least leaf encoding wins. Automorphisms discovered at
//! equal leaves prune sibling branches. The whole-structure code is the
//! sorted list of component codes, so isomorphisms are assembled from
//! isomorphisms of the components.

use std::fmt;

use crate::gaifman::GaifmanGraph;
use crate::structure::{induced_substructure, FiniteStructure, PointedStructure, Signature};
use crate::Element;

/// Opaque code; equal exactly for point-respecting isomorphic inputs.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalCode(Vec<u8>);

impl CanonicalCode {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        hex::encode(&self.0)
    }

    pub fn from_hex(text: &str) -> Option<Self> {
        hex::decode(text).ok().map(CanonicalCode)
    }
}

impl fmt::Display for CanonicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl serde::Serialize for CanonicalCode {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_hex())
    }
}

impl fmt::Debug for CanonicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CanonicalCode({})", self.to_hex())
    }
}

pub fn canonical_code(p: &PointedStructure) -> CanonicalCode {
    let s = &p.structure;
    let mut words = Vec::new();
    encode_signature(s.signature(), &mut words);
    words.push(s.size() as u32);
    words.push(p.points.len() as u32);

    let graph = GaifmanGraph::of(s);
    let mut parts: Vec<Vec<u32>> = graph
        .components()
        .iter()
        .map(|members| component_code(s, members, &p.points))
        .collect();
    parts.sort();
    words.push(parts.len() as u32);
    for part in parts {
        words.push(part.len() as u32);
        words.extend(part);
    }
    CanonicalCode(words.iter().flat_map(|w| w.to_be_bytes()).collect())
}

fn encode_signature(sig: &Signature, words: &mut Vec<u32>) {
    words.push(sig.len() as u32);
    for r in sig.relations() {
        words.push(r.arity as u32);
        words.push(r.name.len() as u32);
        words.extend(r.name.bytes().map(u32::from));
    }
}

fn component_code(s: &FiniteStructure, members: &[Element], points: &[Element]) -> Vec<u32> {
    let (sub, map) = induced_substructure(s, members).expect("component members are in range");
    let local_points: Vec<(u32, Element)> = points
        .iter()
        .enumerate()
        .filter_map(|(i, &e)| map[e].map(|l| (i as u32, l)))
        .collect();
    Canonizer::new(&sub, &local_points).run()
}

struct Canonizer<'a> {
    structure: &'a FiniteStructure,
    points: &'a [(u32, Element)],
    tuples: Vec<(u32, &'a [Element])>,
    /// Per element: `(tuple id, position)` for every occurrence.
    incidence: Vec<Vec<(u32, u32)>>,
    first: Option<Leaf>,
    best: Option<Leaf>,
    automorphisms: Vec<Vec<Element>>,
}

struct Leaf {
    encoding: Vec<u32>,
    /// `element_at[label]` is the element receiving that label.
    element_at: Vec<Element>,
}

impl<'a> Canonizer<'a> {
    fn new(structure: &'a FiniteStructure, points: &'a [(u32, Element)]) -> Self {
        let tuples: Vec<(u32, &[Element])> = structure.tuples().map(|(r, t)| (r as u32, t.as_slice())).collect();
        let mut incidence = vec![Vec::new(); structure.size()];
        for (id, (_, t)) in tuples.iter().enumerate() {
            for (pos, &e) in t.iter().enumerate() {
                incidence[e].push((id as u32, pos as u32));
            }
        }
        Canonizer {
            structure,
            points,
            tuples,
            incidence,
            first: None,
            best: None,
            automorphisms: Vec::new(),
        }
    }

    fn run(mut self) -> Vec<u32> {
        let n = self.structure.size();
        let mut keys: Vec<Vec<u32>> = vec![Vec::new(); n];
        for &(idx, e) in self.points {
            keys[e].push(idx);
        }
        let colors = ranks(&keys);
        let colors = self.refine(colors);
        self.search(colors, &mut Vec::new());
        self.best.expect("search reaches at least one leaf").encoding
    }

    /// Colour refinement to the coarsest stable partition below `colors`.
    /// Colours are always dense ranks, so the result is label-independent.
    fn refine(&self, mut colors: Vec<u32>) -> Vec<u32> {
        let mut count = distinct(&colors);
        loop {
            let keys: Vec<Vec<u32>> = (0..colors.len())
                .map(|e| {
                    let mut entries: Vec<Vec<u32>> = self.incidence[e]
                        .iter()
                        .map(|&(id, pos)| {
                            let (rel, t) = self.tuples[id as usize];
                            let mut entry = Vec::with_capacity(t.len() + 2);
                            entry.push(rel);
                            entry.push(pos);
                            entry.extend(t.iter().map(|&x| colors[x]));
                            entry
                        })
                        .collect();
                    entries.sort_unstable();
                    let mut key = vec![colors[e]];
                    for entry in entries {
                        key.push(entry.len() as u32);
                        key.extend(entry);
                    }
                    key
                })
                .collect();
            let next = ranks(&keys);
            let next_count = distinct(&next);
            colors = next;
            if next_count == count {
                return colors;
            }
            count = next_count;
        }
    }

    fn search(&mut self, colors: Vec<u32>, path: &mut Vec<Element>) {
        let n = colors.len();
        let Some(cell) = target_cell(&colors) else {
            self.leaf(&colors);
            return;
        };
        let mut explored: Vec<Element> = Vec::new();
        for &v in &cell {
            if !explored.is_empty() && self.same_orbit(v, &explored, path, n) {
                continue;
            }
            explored.push(v);
            let individualized: Vec<u32> = colors
                .iter()
                .enumerate()
                .map(|(e, &c)| if e == v { 2 * c } else { 2 * c + 1 })
                .collect();
            let refined = self.refine(ranks(&individualized));
            path.push(v);
            self.search(refined, path);
            path.pop();
        }
    }

    fn same_orbit(&self, v: Element, explored: &[Element], path: &[Element], n: usize) -> bool {
        let mut uf: Vec<Element> = (0..n).collect();
        fn find(uf: &mut [Element], mut x: Element) -> Element {
            while uf[x] != x {
                uf[x] = uf[uf[x]];
                x = uf[x];
            }
            x
        }
        for gamma in &self.automorphisms {
            if path.iter().any(|&p| gamma[p] != p) {
                continue;
            }
            for (e, &img) in gamma.iter().enumerate() {
                let (a, b) = (find(&mut uf, e), find(&mut uf, img));
                if a != b {
                    uf[a] = b;
                }
            }
        }
        let root = find(&mut uf, v);
        explored.iter().any(|&w| find(&mut uf, w) == root)
    }

    fn leaf(&mut self, colors: &[u32]) {
        let encoding = self.encode(colors);
        let mut element_at = vec![0; colors.len()];
        for (e, &c) in colors.iter().enumerate() {
            element_at[c as usize] = e;
        }
        for reference in [self.first.as_ref(), self.best.as_ref()].into_iter().flatten() {
            if reference.encoding == encoding {
                let gamma: Vec<Element> = colors.iter().map(|&c| reference.element_at[c as usize]).collect();
                if gamma.iter().enumerate().any(|(e, &g)| e != g) {
                    self.automorphisms.push(gamma);
                }
                return;
            }
        }
        let leaf = Leaf { encoding, element_at };
        if self.first.is_none() {
            self.first = Some(Leaf {
                encoding: leaf.encoding.clone(),
                element_at: leaf.element_at.clone(),
            });
        }
        if self.best.as_ref().is_none_or(|b| leaf.encoding < b.encoding) {
            self.best = Some(leaf);
        }
    }

    fn encode(&self, labels: &[u32]) -> Vec<u32> {
        let mut words = vec![labels.len() as u32, self.points.len() as u32];
        for &(idx, e) in self.points {
            words.push(idx);
            words.push(labels[e]);
        }
        for table in self.structure.tables() {
            let mut mapped: Vec<Vec<u32>> = table.iter().map(|t| t.iter().map(|&e| labels[e]).collect()).collect();
            mapped.sort_unstable();
            words.push(mapped.len() as u32);
            words.extend(mapped.into_iter().flatten());
        }
        words
    }
}

fn target_cell(colors: &[u32]) -> Option<Vec<Element>> {
    let k = distinct(colors);
    let mut sizes = vec![0usize; k];
    for &c in colors {
        sizes[c as usize] += 1;
    }
    let (color, _) = sizes
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > 1)
        .min_by_key(|&(c, &s)| (s, c))?;
    Some((0..colors.len()).filter(|&e| colors[e] as usize == color).collect())
}

fn distinct(colors: &[u32]) -> usize {
    colors.iter().max().map_or(0, |&m| m as usize + 1)
}

/// Dense ranks of the keys in sorted order.
fn ranks<K: Ord>(keys: &[K]) -> Vec<u32> {
    let mut order: Vec<usize> = (0..keys.len()).collect();
    order.sort_by(|&a, &b| keys[a].cmp(&keys[b]));
    let mut out = vec![0u32; keys.len()];
    let mut rank = 0u32;
    for (i, &e) in order.iter().enumerate() {
        if i > 0 && keys[order[i - 1]] != keys[e] {
            rank += 1;
        }
        out[e] = rank;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{cycle, dipath, disjoint_copies, k5_subdivision, linear_order};

    fn code(s: &FiniteStructure, points: &[Element]) -> CanonicalCode {
        canonical_code(&PointedStructure {
            structure: s.clone(),
            points: points.to_vec(),
        })
    }

    #[test]
    fn reflexive_and_directed_edge_ends_differ() {
        let p2 = dipath(2).unwrap();
        assert_eq!(code(&p2, &[0]), code(&p2, &[0]));
        assert_ne!(code(&p2, &[0]), code(&p2, &[1]));
    }

    #[test]
    fn cycle_vertices_share_code() {
        let c6 = cycle(6).unwrap();
        let c = code(&c6, &[0]);
        for v in 1..6 {
            assert_eq!(code(&c6, &[v]), c);
        }
        assert_ne!(
            code(&c6, &[]),
            code(&disjoint_copies(&cycle(3).unwrap(), 2).unwrap(), &[])
        );
    }

    #[test]
    fn point_order_matters() {
        let p3 = dipath(3).unwrap();
        assert_ne!(code(&p3, &[0, 1]), code(&p3, &[1, 0]));
        assert_eq!(code(&p3, &[0, 0]), code(&p3, &[0, 0]));
        assert_ne!(code(&p3, &[0, 0]), code(&p3, &[0]));
    }

    #[test]
    fn symmetric_structures_terminate() {
        let k = k5_subdivision(3);
        assert_eq!(code(&k, &[0]), code(&k, &[4]));
        assert_ne!(code(&k, &[0]), code(&k, &[5]));
        let copies = disjoint_copies(&k5_subdivision(1), 4).unwrap();
        assert_eq!(code(&copies, &[3]), code(&copies, &[15 + 2]));
    }

    #[test]
    fn hex_round_trip() {
        let c = code(&linear_order(3).unwrap(), &[1]);
        assert_eq!(CanonicalCode::from_hex(&c.to_hex()), Some(c));
    }
}
