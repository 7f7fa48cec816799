//! Finite relational structures over the universe `{0, …, size−1}`.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Element;

pub type Tuple = Vec<Element>;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationSymbol {
    pub name: String,
    pub arity: usize,
}

/// A finite, purely relational signature. Relation order is significant.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Signature {
    relations: Vec<RelationSymbol>,
}

impl Signature {
    pub fn new<S: Into<String>>(relations: impl IntoIterator<Item = (S, usize)>) -> Result<Self> {
        let relations: Vec<RelationSymbol> = relations
            .into_iter()
            .map(|(name, arity)| RelationSymbol {
                name: name.into(),
                arity,
            })
            .collect();
        let sig = Signature { relations };
        match sig.check() {
            Some(v) => Err(Error::InvalidStructure(v)),
            None => Ok(sig),
        }
    }

    /// Builds a signature without checking the invariants; see [`validate`].
    pub fn from_symbols_unchecked(relations: Vec<RelationSymbol>) -> Self {
        Signature { relations }
    }

    pub fn relations(&self) -> &[RelationSymbol] {
        &self.relations
    }

    pub fn len(&self) -> usize {
        self.relations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.relations.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.relations.iter().position(|r| r.name == name)
    }

    pub fn arity(&self, index: usize) -> usize {
        self.relations[index].arity
    }

    fn check(&self) -> Option<Violation> {
        let mut seen = BTreeSet::new();
        for r in &self.relations {
            if r.name.is_empty() {
                return Some(Violation::EmptyRelationName);
            }
            if r.arity == 0 {
                return Some(Violation::ZeroArity {
                    relation: r.name.clone(),
                });
            }
            if !seen.insert(r.name.as_str()) {
                return Some(Violation::DuplicateRelationName {
                    relation: r.name.clone(),
                });
            }
        }
        None
    }
}

/// The first broken invariant found by [`validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    EmptyRelationName,
    DuplicateRelationName { relation: String },
    ZeroArity { relation: String },
    WrongArity { relation: String, tuple: Tuple },
    ComponentOutOfRange { relation: String, tuple: Tuple },
    DuplicateTuple { relation: String, tuple: Tuple },
    PointOutOfRange { point: Element },
    RelationCountMismatch { expected: usize, found: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyRelationName => write!(f, "relation name is empty"),
            Violation::DuplicateRelationName { relation } => {
                write!(f, "relation name `{relation}` declared twice")
            }
            Violation::ZeroArity { relation } => write!(f, "relation `{relation}` has arity 0"),
            Violation::WrongArity { relation, tuple } => {
                write!(f, "tuple {tuple:?} of `{relation}` has the wrong length")
            }
            Violation::ComponentOutOfRange { relation, tuple } => {
                write!(
                    f,
                    "tuple {tuple:?} of `{relation}` has a component outside the universe"
                )
            }
            Violation::DuplicateTuple { relation, tuple } => {
                write!(f, "tuple {tuple:?} of `{relation}` occurs twice")
            }
            Violation::PointOutOfRange { point } => {
                write!(f, "point {point} is outside the universe")
            }
            Violation::RelationCountMismatch { expected, found } => {
                write!(f, "expected {expected} relation tables, found {found}")
            }
        }
    }
}

/// A finite structure. Relation tables are indexed like the signature and
/// kept sorted so membership is a binary search.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteStructure {
    signature: Signature,
    size: usize,
    relations: Vec<Vec<Tuple>>,
}

impl FiniteStructure {
    /// An edgeless structure of the given size.
    pub fn new(signature: Signature, size: usize) -> Self {
        let relations = vec![Vec::new(); signature.len()];
        FiniteStructure {
            signature,
            size,
            relations,
        }
    }

    /// Builds a structure and rejects it unless it passes [`validate`].
    pub fn from_tables(signature: Signature, size: usize, relations: Vec<Vec<Tuple>>) -> Result<Self> {
        let s = Self::from_tables_unchecked(signature, size, relations);
        validate(&s).map_err(Error::InvalidStructure)?;
        Ok(s.normalized())
    }

    /// Stores the tables as given. Intended for callers that validate later.
    pub fn from_tables_unchecked(signature: Signature, size: usize, relations: Vec<Vec<Tuple>>) -> Self {
        FiniteStructure {
            signature,
            size,
            relations,
        }
    }

    fn normalized(mut self) -> Self {
        for table in &mut self.relations {
            table.sort();
            table.dedup();
        }
        self
    }

    /// Inserts a tuple into the named relation, keeping the table sorted.
    pub fn insert(&mut self, relation: &str, tuple: Tuple) -> Result<bool> {
        let index = self
            .signature
            .index_of(relation)
            .ok_or_else(|| Error::UnknownRelation(relation.to_string()))?;
        self.insert_at(index, tuple)
    }

    pub fn insert_at(&mut self, index: usize, tuple: Tuple) -> Result<bool> {
        let arity = self.signature.arity(index);
        if tuple.len() != arity {
            return Err(Error::ArityMismatch {
                relation: self.signature.relations[index].name.clone(),
                expected: arity,
                found: tuple.len(),
            });
        }
        if let Some(&e) = tuple.iter().find(|&&e| e >= self.size) {
            return Err(Error::ElementOutOfRange {
                element: e,
                size: self.size,
            });
        }
        let table = &mut self.relations[index];
        match table.binary_search(&tuple) {
            Ok(_) => Ok(false),
            Err(pos) => {
                table.insert(pos, tuple);
                Ok(true)
            }
        }
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn table(&self, index: usize) -> &[Tuple] {
        &self.relations[index]
    }

    pub fn tables(&self) -> &[Vec<Tuple>] {
        &self.relations
    }

    pub fn contains(&self, index: usize, tuple: &[Element]) -> bool {
        self.relations[index]
            .binary_search_by(|t| t.as_slice().cmp(tuple))
            .is_ok()
    }

    pub fn tuple_count(&self) -> usize {
        self.relations.iter().map(Vec::len).sum()
    }

    /// All `(relation index, tuple)` pairs in signature order.
    pub fn tuples(&self) -> impl Iterator<Item = (usize, &Tuple)> {
        self.relations
            .iter()
            .enumerate()
            .flat_map(|(i, table)| table.iter().map(move |t| (i, t)))
    }

    pub fn universe(&self) -> std::ops::Range<Element> {
        0..self.size
    }

    pub fn check_element(&self, element: Element) -> Result<()> {
        if element < self.size {
            Ok(())
        } else {
            Err(Error::ElementOutOfRange {
                element,
                size: self.size,
            })
        }
    }

    /// Applies a bijection `old -> perm[old]` to the universe.
    pub fn relabel(&self, perm: &[Element]) -> FiniteStructure {
        assert_eq!(perm.len(), self.size, "permutation length must equal the universe size");
        let relations = self
            .relations
            .iter()
            .map(|table| table.iter().map(|t| t.iter().map(|&e| perm[e]).collect()).collect())
            .collect();
        FiniteStructure {
            signature: self.signature.clone(),
            size: self.size,
            relations,
        }
        .normalized()
    }

    pub fn pointed(self, points: Vec<Element>) -> PointedStructure {
        PointedStructure {
            structure: self,
            points,
        }
    }

    pub fn unpointed(self) -> PointedStructure {
        self.pointed(Vec::new())
    }
}

/// A structure together with an ordered list of distinguished elements.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PointedStructure {
    pub structure: FiniteStructure,
    pub points: Vec<Element>,
}

impl PointedStructure {
    pub fn new(structure: FiniteStructure, points: Vec<Element>) -> Result<Self> {
        if let Some(&p) = points.iter().find(|&&p| p >= structure.size()) {
            return Err(Error::InvalidStructure(Violation::PointOutOfRange { point: p }));
        }
        Ok(PointedStructure { structure, points })
    }

    pub fn relabel(&self, perm: &[Element]) -> PointedStructure {
        PointedStructure {
            structure: self.structure.relabel(perm),
            points: self.points.iter().map(|&p| perm[p]).collect(),
        }
    }
}

/// Checks every structure invariant, reporting the first violation.
pub fn validate(s: &FiniteStructure) -> std::result::Result<(), Violation> {
    if let Some(v) = s.signature.check() {
        return Err(v);
    }
    if s.relations.len() != s.signature.len() {
        return Err(Violation::RelationCountMismatch {
            expected: s.signature.len(),
            found: s.relations.len(),
        });
    }
    for (symbol, table) in s.signature.relations.iter().zip(&s.relations) {
        let mut seen = BTreeSet::new();
        for tuple in table {
            if tuple.len() != symbol.arity {
                return Err(Violation::WrongArity {
                    relation: symbol.name.clone(),
                    tuple: tuple.clone(),
                });
            }
            if tuple.iter().any(|&e| e >= s.size) {
                return Err(Violation::ComponentOutOfRange {
                    relation: symbol.name.clone(),
                    tuple: tuple.clone(),
                });
            }
            if !seen.insert(tuple) {
                return Err(Violation::DuplicateTuple {
                    relation: symbol.name.clone(),
                    tuple: tuple.clone(),
                });
            }
        }
    }
    Ok(())
}

pub fn validate_pointed(p: &PointedStructure) -> std::result::Result<(), Violation> {
    validate(&p.structure)?;
    match p.points.iter().find(|&&e| e >= p.structure.size) {
        Some(&point) => Err(Violation::PointOutOfRange { point }),
        None => Ok(()),
    }
}

/// Disjoint union; elements of `b` are shifted by `a.size()`.
pub fn disjoint_union(a: &FiniteStructure, b: &FiniteStructure) -> Result<FiniteStructure> {
    if a.signature != b.signature {
        return Err(Error::SignatureMismatch);
    }
    let shift = a.size;
    let relations = a
        .relations
        .iter()
        .zip(&b.relations)
        .map(|(ta, tb)| {
            ta.iter()
                .cloned()
                .chain(tb.iter().map(|t| t.iter().map(|&e| e + shift).collect()))
                .collect()
        })
        .collect();
    Ok(FiniteStructure {
        signature: a.signature.clone(),
        size: a.size + b.size,
        relations,
    })
}

/// Induced substructure on `subset`, renumbered in ascending order of the
/// original elements. The returned map sends old elements to new ones.
pub fn induced_substructure(
    s: &FiniteStructure,
    subset: &[Element],
) -> Result<(FiniteStructure, Vec<Option<Element>>)> {
    let mut map = vec![None; s.size];
    let mut members: Vec<Element> = subset.to_vec();
    members.sort_unstable();
    members.dedup();
    for &e in &members {
        s.check_element(e)?;
    }
    for (new, &old) in members.iter().enumerate() {
        map[old] = Some(new);
    }
    let relations = s
        .relations
        .iter()
        .map(|table| {
            table
                .iter()
                .filter_map(|t| t.iter().map(|&e| map[e]).collect::<Option<Tuple>>())
                .collect()
        })
        .collect();
    let sub = FiniteStructure {
        signature: s.signature.clone(),
        size: members.len(),
        relations,
    }
    .normalized();
    Ok((sub, map))
}
