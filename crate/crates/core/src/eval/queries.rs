use std::io::Read;

use serde::Deserialize;

use super::EvalError;
use crate::geo::AttributeName;

/// A free-text query and the route attributes it is judged against.
#[derive(Debug, Clone, PartialEq)]
pub struct Query {
    pub id: String,
    pub text: String,
    pub relevant_attributes: Vec<AttributeName>,
}

impl Query {
    pub fn new(
        id: impl Into<String>,
        text: impl Into<String>,
        relevant_attributes: Vec<AttributeName>,
    ) -> Result<Self, EvalError> {
        let id = id.into();
        let text = text.into();
        if text.trim().is_empty() {
            return Err(EvalError::InvalidQuery(format!("query {id} has empty text")));
        }
        if relevant_attributes.is_empty() {
            return Err(EvalError::InvalidQuery(format!("query {id} lists no attributes")));
        }
        Ok(Self { id, text, relevant_attributes })
    }
}

use AttributeName::*;

const EFFORT: &[AttributeName] = &[LengthM, Grade, TotalGain];
const LANDSCAPE: &[AttributeName] =
    &[InUrban, InWoodland, InNationalParks, AlongSurfacewater, AlongCoast];

const BUILTIN: [(&str, &[AttributeName]); 20] = [
    ("what is a short walk", &[LengthM]),
    ("what is a very short walk", &[LengthM]),
    ("what is a long walk", &[LengthM]),
    ("what is a very long walk", &[LengthM]),
    ("what is a walk by the seaside", &[IsCoastal]),
    ("what is a walk through the woods", &[InWoodland]),
    ("what is an urban walk", &[InUrban]),
    ("what is a country walk", &[InUrban, InGreenspace]),
    ("what is a walk for a beginner hiker", EFFORT),
    ("what is a walk for an expert hiker", EFFORT),
    ("what is a walk for a sporty person", EFFORT),
    ("what is a walk for a person with limited mobility", EFFORT),
    ("what is a walk for an elderly person", EFFORT),
    ("what is a walk that can be completed in an hour", &[LengthM]),
    ("what is a walk for someone who likes climbing uphill", &[Grade, TotalGain]),
    ("what is a walk with a variety of landscapes", LANDSCAPE),
    ("what is a walk for someone seeking greater challenges", EFFORT),
    ("what is a walk for someone who enjoys town walks", &[InUrban]),
    ("what is a walk for someone who is interested in nature", LANDSCAPE),
    ("what is a walk for someone who prefers wilderness to man-made", LANDSCAPE),
];

fn query_id(i: usize) -> String {
    format!("q{:02}", i + 1)
}

/// The twenty standard hiking queries, ids `q01`..`q20`.
pub fn builtin_queries() -> Vec<Query> {
    BUILTIN
        .iter()
        .enumerate()
        .map(|(i, (text, attrs))| Query {
            id: query_id(i),
            text: (*text).to_string(),
            relevant_attributes: attrs.to_vec(),
        })
        .collect()
}

#[derive(Deserialize)]
struct QueryRow {
    text: String,
    attributes: String,
}

/// Reads queries from CSV with columns `text` and `attributes`, the latter a
/// semicolon-separated list of attribute names. Ids are assigned in file
/// order.
pub fn read_queries<R: Read>(reader: R) -> Result<Vec<Query>, EvalError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let mut out = Vec::new();
    for (i, row) in rdr.deserialize::<QueryRow>().enumerate() {
        let row = row?;
        let attrs = row
            .attributes
            .split(';')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| AttributeName::parse(s).ok_or_else(|| EvalError::UnknownAttribute(s.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        out.push(Query::new(query_id(i), row.text, attrs)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins() {
        let q = builtin_queries();
        assert_eq!(q.len(), 20);
        assert!(q.iter().any(|q| q.text == "what is a walk for an expert hiker"
            && q.relevant_attributes == [LengthM, Grade, TotalGain]));
        assert!(q.iter().any(|q| q.text == "what is an urban walk" && q.relevant_attributes == [InUrban]));
        assert_eq!(q[0].id, "q01");
        assert_eq!(q[19].id, "q20");
        let pairs: usize = q.iter().map(|q| q.relevant_attributes.len()).sum();
        assert_eq!(pairs, 46);
    }

    #[test]
    fn query_file() {
        let csv = "text,attributes\n\"a walk, by water\",along_surfacewater\nhills,grade; total_gain\n";
        let q = read_queries(csv.as_bytes()).unwrap();
        assert_eq!(q.len(), 2);
        assert_eq!(q[0].text, "a walk, by water");
        assert_eq!(q[1].relevant_attributes, [Grade, TotalGain]);
        assert_eq!(q[1].id, "q02");

        let bad = "text,attributes\nx,start_place\n";
        assert!(matches!(read_queries(bad.as_bytes()), Err(EvalError::UnknownAttribute(_))));
        let empty = "text,attributes\n\" \",grade\n";
        assert!(matches!(read_queries(empty.as_bytes()), Err(EvalError::InvalidQuery(_))));
    }
}
