//! The JSON structure file format.
//!
//! ```json
//! {"signature":[{"name":"E","arity":2}], "size":3, "relations":{"E":[[0,1],[1,2]]}, "points":[0]}
//! ```
//!
//! `points` is optional and defaults to empty; relations missing from the
//! `relations` object are empty. Unknown keys are rejected.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::structure::{validate_pointed, FiniteStructure, PointedStructure, RelationSymbol, Signature, Tuple};
use crate::Element;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StructureFile {
    signature: Vec<RelationSymbol>,
    size: usize,
    #[serde(default)]
    relations: BTreeMap<String, Vec<Tuple>>,
    #[serde(default)]
    points: Vec<Element>,
}

/// Parses and validates a structure file.
pub fn parse_structure(text: &str) -> Result<PointedStructure> {
    let file: StructureFile = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    let signature = Signature::from_symbols_unchecked(file.signature);
    let mut tables = vec![Vec::new(); signature.len()];
    for (name, tuples) in file.relations {
        let index = signature.index_of(&name).ok_or(Error::UnknownRelation(name))?;
        tables[index] = tuples;
    }
    let structure = FiniteStructure::from_tables(signature, file.size, tables)?;
    let pointed = PointedStructure {
        structure,
        points: file.points,
    };
    validate_pointed(&pointed).map_err(Error::InvalidStructure)?;
    Ok(pointed)
}

/// Parses a structure file whose `points` must be empty or absent.
pub fn parse_unpointed(text: &str) -> Result<FiniteStructure> {
    let p = parse_structure(text)?;
    if !p.points.is_empty() {
        return Err(Error::Format("expected a structure without points".into()));
    }
    Ok(p.structure)
}

pub fn structure_value(p: &PointedStructure) -> Value {
    let s = &p.structure;
    let signature: Vec<Value> = s
        .signature()
        .relations()
        .iter()
        .map(|r| json!({"name": r.name, "arity": r.arity}))
        .collect();
    let relations: serde_json::Map<String, Value> = s
        .signature()
        .relations()
        .iter()
        .zip(s.tables())
        .map(|(r, t)| (r.name.clone(), json!(t)))
        .collect();
    let mut obj = serde_json::Map::new();
    obj.insert("signature".into(), Value::Array(signature));
    obj.insert("size".into(), json!(s.size()));
    obj.insert("relations".into(), Value::Object(relations));
    if !p.points.is_empty() {
        obj.insert("points".into(), json!(p.points));
    }
    Value::Object(obj)
}

/// Serializes with sorted keys, one structure per line.
pub fn write_structure(p: &PointedStructure) -> String {
    structure_value(p).to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_documented_example() {
        let text = r#"{"signature":[{"name":"E","arity":2}], "size":3, "relations":{"E":[[0,1],[1,2]]}, "points":[0]}"#;
        let p = parse_structure(text).unwrap();
        assert_eq!(p.structure.size(), 3);
        assert_eq!(p.structure.table(0), &[vec![0, 1], vec![1, 2]]);
        assert_eq!(p.points, vec![0]);
        assert_eq!(parse_structure(&write_structure(&p)).unwrap(), p);
    }

    #[test]
    fn points_default_to_empty() {
        let p = parse_structure(r#"{"signature":[{"name":"E","arity":2}],"size":1,"relations":{}}"#).unwrap();
        assert!(p.points.is_empty());
    }

    #[test]
    fn rejects_unknown_keys_and_bad_tuples() {
        let unknown = r#"{"signature":[],"size":1,"relations":{},"extra":1}"#;
        assert!(matches!(parse_structure(unknown), Err(Error::Format(_))));
        let range = r#"{"signature":[{"name":"E","arity":2}],"size":2,"relations":{"E":[[0,2]]}}"#;
        assert!(matches!(parse_structure(range), Err(Error::InvalidStructure(_))));
        let rel = r#"{"signature":[{"name":"E","arity":2}],"size":2,"relations":{"F":[[0,1]]}}"#;
        assert!(matches!(parse_structure(rel), Err(Error::UnknownRelation(_))));
        let dup = r#"{"signature":[{"name":"E","arity":2}],"size":2,"relations":{"E":[[0,1],[0,1]]}}"#;
        assert!(matches!(parse_structure(dup), Err(Error::InvalidStructure(_))));
        let point = r#"{"signature":[],"size":2,"points":[2]}"#;
        assert!(matches!(parse_structure(point), Err(Error::InvalidStructure(_))));
    }

    #[test]
    fn output_is_key_sorted() {
        let p = parse_structure(r#"{"size":1,"signature":[{"name":"E","arity":2}]}"#).unwrap();
        assert_eq!(
            write_structure(&p),
            r#"{"relations":{"E":[]},"signature":[{"arity":2,"name":"E"}],"size":1}"#
        );
    }
}
