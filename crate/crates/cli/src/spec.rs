//! JSON configuration: diagram, parameters and local data for one building.
//!
//! Schema:
//! ```json
//! {
//!   "types": [1, 2],
//!   "infinity_edges": [[1, 2]],
//!   "q": {"1": 3, "2": 3},
//!   "F": {"1": {"degree": 3, "generators": [[1, 2, 0]]}, "2": {...}},
//!   "Facute": { ... }
//! }
//! ```
//! `Facute` is optional and defaults to `F`. Unknown keys are rejected.

use serde_json::Value;
use thiserror::Error;

use rab_core::permgrp::PermGroup;
use rab_core::serial::label_of_value;
use rab_core::universal::LocalData;
use rab_core::{Building, Diagram, Error as CoreError, Parameters};

#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed JSON; exit code 2.
    #[error("parse error: {0}")]
    Parse(String),
    /// Well-formed JSON violating the schema; exit code 2.
    #[error("schema error: {0}")]
    Schema(String),
    /// A resource bound was hit; exit code 3.
    #[error("resource bound: {0}")]
    Resource(String),
    /// A property suite found a counterexample; exit code 4.
    #[error("property violation: {0}")]
    Violation(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Schema(_) => 2,
            CliError::Resource(_) => 3,
            CliError::Violation(_) => 4,
            CliError::Io(_) => 2,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::BallTooLarge { .. }
            | CoreError::GroupTooLarge(_)
            | CoreError::RankTooLarge { .. }
            | CoreError::EscapesBound(_) => CliError::Resource(e.to_string()),
            other => CliError::Schema(other.to_string()),
        }
    }
}

/// A fully validated building specification.
#[derive(Debug)]
pub struct BuildingSpec {
    pub building: Building,
    pub f: LocalData,
    pub facute: LocalData,
    /// Whether `Facute` was present in the input (`false` means the
    /// restricted group collapses to `U(F)`).
    pub facute_given: bool,
}

const TOP_KEYS: &[&str] = &["types", "infinity_edges", "q", "F", "Facute"];
const GROUP_KEYS: &[&str] = &["degree", "generators"];

pub fn parse_spec(text: &[u8]) -> Result<BuildingSpec, CliError> {
    let value: Value = serde_json::from_slice(text).map_err(|e| {
        CliError::Parse(format!(
            "invalid JSON at line {}, column {}: {e}",
            e.line(),
            e.column()
        ))
    })?;
    let obj = value
        .as_object()
        .ok_or_else(|| CliError::Schema("top level must be a JSON object".into()))?;
    for key in obj.keys() {
        if !TOP_KEYS.contains(&key.as_str()) {
            return Err(CliError::Schema(format!("unknown key `{key}`")));
        }
    }

    // types and labels
    let types = obj
        .get("types")
        .and_then(Value::as_array)
        .ok_or_else(|| CliError::Schema("`types` must be an array".into()))?;
    let mut labels = Vec::new();
    for t in types {
        labels.push(label_of_value(t).map_err(|e| CliError::Schema(e.to_string()))?);
    }

    // infinity edges by label
    let mut edges = Vec::new();
    if let Some(e) = obj.get("infinity_edges") {
        let arr = e
            .as_array()
            .ok_or_else(|| CliError::Schema("`infinity_edges` must be an array".into()))?;
        for pair in arr {
            let pair = pair
                .as_array()
                .filter(|p| p.len() == 2)
                .ok_or_else(|| CliError::Schema("each infinity edge must be a pair".into()))?;
            let a = label_of_value(&pair[0]).map_err(|e| CliError::Schema(e.to_string()))?;
            let b = label_of_value(&pair[1]).map_err(|e| CliError::Schema(e.to_string()))?;
            let ai = labels
                .iter()
                .position(|l| *l == a)
                .ok_or_else(|| CliError::Schema(format!("unknown type `{a}` in infinity_edges")))?;
            let bi = labels
                .iter()
                .position(|l| *l == b)
                .ok_or_else(|| CliError::Schema(format!("unknown type `{b}` in infinity_edges")))?;
            edges.push((ai, bi));
        }
    }
    let diagram = Diagram::new(labels.clone(), &edges).map_err(CliError::from)?;

    // parameters
    let q_obj = obj
        .get("q")
        .and_then(Value::as_object)
        .ok_or_else(|| CliError::Schema("`q` must be an object keyed by type".into()))?;
    let mut q = Vec::new();
    for label in &labels {
        let v = q_obj
            .get(label)
            .ok_or_else(|| CliError::Schema(format!("`q` is missing type `{label}`")))?;
        let n = v
            .as_u64()
            .filter(|&n| (2..=u16::MAX as u64).contains(&n))
            .ok_or_else(|| CliError::Schema(format!("q[{label}] must be an integer ≥ 2")))?;
        q.push(n as u16);
    }
    for key in q_obj.keys() {
        if !labels.contains(key) {
            return Err(CliError::Schema(format!("`q` has unknown type `{key}`")));
        }
    }
    let params = Parameters::new(q.clone()).map_err(CliError::from)?;
    let building = Building::new(diagram, params).map_err(CliError::from)?;

    // local data
    let f_groups = parse_local_data(obj.get("F"), "F", &labels, &q)?;
    let facute_given = obj.contains_key("Facute");
    let facute_groups = if facute_given {
        parse_local_data(obj.get("Facute"), "Facute", &labels, &q)?
    } else {
        f_groups.clone()
    };
    let f = LocalData::new(&building, f_groups).map_err(CliError::from)?;
    let facute = LocalData::new(&building, facute_groups).map_err(CliError::from)?;

    // the pair must satisfy F ≤ F́ ≤ Ŷ(F) with equal orbits
    let report = f.validate_against(&facute, &building).map_err(CliError::from)?;
    for (i, r) in report.per_type.iter().enumerate() {
        let label = &labels[i];
        if !r.degree_ok {
            return Err(CliError::Schema(format!(
                "local group degrees at type `{label}` do not match q"
            )));
        }
        if !r.f_le_facute {
            return Err(CliError::Schema(format!(
                "F[{label}] is not a subgroup of Facute[{label}]"
            )));
        }
        if !r.facute_le_young {
            return Err(CliError::Schema(format!(
                "Facute[{label}] exceeds the Young overgroup of F[{label}]"
            )));
        }
        if !r.orbits_equal {
            return Err(CliError::Schema(format!(
                "F[{label}] and Facute[{label}] have different orbits"
            )));
        }
    }

    Ok(BuildingSpec {
        building,
        f,
        facute,
        facute_given,
    })
}

fn parse_local_data(
    v: Option<&Value>,
    field: &str,
    labels: &[String],
    q: &[u16],
) -> Result<Vec<PermGroup>, CliError> {
    let map = v
        .and_then(Value::as_object)
        .ok_or_else(|| CliError::Schema(format!("`{field}` must be an object keyed by type")))?;
    for key in map.keys() {
        if !labels.contains(key) {
            return Err(CliError::Schema(format!(
                "`{field}` has unknown type `{key}`"
            )));
        }
    }
    let mut groups = Vec::new();
    for (k, label) in labels.iter().enumerate() {
        let spec = map
            .get(label)
            .ok_or_else(|| CliError::Schema(format!("`{field}` is missing type `{label}`")))?;
        let spec_obj = spec
            .as_object()
            .ok_or_else(|| CliError::Schema(format!("{field}[{label}] must be an object")))?;
        for key in spec_obj.keys() {
            if !GROUP_KEYS.contains(&key.as_str()) {
                return Err(CliError::Schema(format!(
                    "{field}[{label}] has unknown key `{key}`"
                )));
            }
        }
        let degree = spec_obj
            .get("degree")
            .and_then(Value::as_u64)
            .ok_or_else(|| CliError::Schema(format!("{field}[{label}].degree must be an integer")))?;
        if degree != q[k] as u64 {
            return Err(CliError::Schema(format!(
                "{field}[{label}].degree = {degree} does not match q[{label}] = {}",
                q[k]
            )));
        }
        let mut gens = Vec::new();
        if let Some(arr) = spec_obj.get("generators") {
            let arr = arr.as_array().ok_or_else(|| {
                CliError::Schema(format!("{field}[{label}].generators must be an array"))
            })?;
            for g in arr {
                let perm = rab_core::serial::perm_from_json(g).map_err(|e| {
                    CliError::Schema(format!("{field}[{label}] generator: {e}"))
                })?;
                if perm.degree() != degree as usize {
                    return Err(CliError::Schema(format!(
                        "{field}[{label}] generator degree {} does not match {degree}",
                        perm.degree()
                    )));
                }
                gens.push(perm);
            }
        }
        groups.push(PermGroup::new(degree as usize, gens).map_err(CliError::from)?);
    }
    Ok(groups)
}

/// Convenience constructors for the worked configurations used in tests.
pub fn spec_json(
    types: &[&str],
    edges: &[(&str, &str)],
    q: &[(&str, u16)],
    f_gens: &[(&str, Vec<Vec<u16>>)],
    facute_gens: Option<&[(&str, Vec<Vec<u16>>)]>,
) -> Value {
    use serde_json::json;
    let q_map: serde_json::Map<String, Value> = q
        .iter()
        .map(|&(t, n)| (t.to_owned(), json!(n)))
        .collect();
    let group_map = |gens: &[(&str, Vec<Vec<u16>>)]| -> serde_json::Map<String, Value> {
        gens.iter()
            .map(|(t, gs)| {
                let degree = q.iter().find(|&&(qt, _)| qt == *t).map(|&(_, n)| n).unwrap();
                (
                    (*t).to_owned(),
                    json!({"degree": degree, "generators": gs}),
                )
            })
            .collect()
    };
    let mut top = serde_json::Map::new();
    top.insert("types".into(), json!(types));
    top.insert(
        "infinity_edges".into(),
        json!(edges.iter().map(|&(a, b)| json!([a, b])).collect::<Vec<_>>()),
    );
    top.insert("q".into(), Value::Object(q_map));
    top.insert("F".into(), Value::Object(group_map(f_gens)));
    if let Some(fg) = facute_gens {
        top.insert("Facute".into(), Value::Object(group_map(fg)));
    }
    Value::Object(top)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn parses_minimal_tree_spec() {
        let v = spec_json(
            &["1", "2"],
            &[("1", "2")],
            &[("1", 3), ("2", 3)],
            &[
                ("1", vec![vec![1, 0, 2], vec![1, 2, 0]]),
                ("2", vec![vec![1, 0, 2], vec![1, 2, 0]]),
            ],
            None,
        );
        let spec = parse_spec(serde_json::to_vec(&v).unwrap().as_slice()).unwrap();
        assert_eq!(spec.building.diagram().rank(), 2);
        assert!(!spec.facute_given);
        assert_eq!(spec.f.group(rab_core::TypeIndex(0)).order().unwrap(), 6);
    }

    #[test]
    fn rejects_non_bijection_generator() {
        let v = json!({
            "types": [1, 2],
            "infinity_edges": [[1, 2]],
            "q": {"1": 3, "2": 3},
            "F": {
                "1": {"degree": 3, "generators": [[0, 0, 2]]},
                "2": {"degree": 3, "generators": []}
            }
        });
        let err = parse_spec(serde_json::to_vec(&v).unwrap().as_slice()).unwrap_err();
        assert!(matches!(err, CliError::Schema(_)), "{err}");
    }

    #[test]
    fn rejects_unknown_keys_and_bad_json() {
        let v = json!({
            "types": [1],
            "q": {"1": 3},
            "F": {"1": {"degree": 3, "generators": []}},
            "extra": 1
        });
        assert!(matches!(
            parse_spec(serde_json::to_vec(&v).unwrap().as_slice()).unwrap_err(),
            CliError::Schema(_)
        ));
        assert!(matches!(
            parse_spec(b"{ not json"),
            Err(CliError::Parse(_))
        ));
    }

    #[test]
    fn rejects_facute_beyond_young_overgroup() {
        let v = json!({
            "types": [1, 2],
            "infinity_edges": [[1, 2]],
            "q": {"1": 3, "2": 3},
            "F": {
                "1": {"degree": 3, "generators": [[1, 0, 2]]},
                "2": {"degree": 3, "generators": []}
            },
            "Facute": {
                "1": {"degree": 3, "generators": [[1, 0, 2], [1, 2, 0]]},
                "2": {"degree": 3, "generators": []}
            }
        });
        let err = parse_spec(serde_json::to_vec(&v).unwrap().as_slice()).unwrap_err();
        assert!(err.to_string().contains("Young overgroup"), "{err}");
    }
}
