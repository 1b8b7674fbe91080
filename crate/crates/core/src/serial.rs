//! JSON forms of the domain values, with type labels resolved through the
//! diagram. Words serialize as arrays of `[type, color]` pairs; permutations
//! as 0-based image arrays.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::building::{Building, Chamber, ResidueKey, TreeWall};
use crate::diagram::{Diagram, TypeSet};
use crate::error::{Error, Result};
use crate::permgrp::Perm;
use crate::universal::Portrait;
use crate::words::{Letter, Parameters, Word};

/// Reads a type label from a JSON string or number.
pub fn label_of_value(v: &Value) -> Result<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        other => Err(Error::UnknownType(other.to_string())),
    }
}

pub fn word_to_json(d: &Diagram, w: &Word) -> Value {
    Value::Array(
        w.letters()
            .iter()
            .map(|l| json!([d.label(l.ty), l.color]))
            .collect(),
    )
}

pub fn word_from_json(d: &Diagram, p: &Parameters, v: &Value) -> Result<Word> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::PreconditionViolated("word must be a JSON array".into()))?;
    let mut letters = Vec::with_capacity(arr.len());
    for pair in arr {
        let pair = pair
            .as_array()
            .filter(|a| a.len() == 2)
            .ok_or_else(|| Error::PreconditionViolated("letter must be a [type, color] pair".into()))?;
        let ty = d.lookup(&label_of_value(&pair[0])?)?;
        let color = pair[1]
            .as_u64()
            .ok_or_else(|| Error::PreconditionViolated("color must be an integer".into()))?;
        if color > u16::MAX as u64 {
            return Err(Error::ColorOutOfRange {
                ty: d.label(ty).to_owned(),
                color: color as u32,
                q: p.q(ty) as u32,
            });
        }
        letters.push(Letter::new(ty, color as u16));
    }
    Word::from_letters(d, p, &letters)
}

pub fn chamber_to_json(b: &Building, c: &Chamber) -> Value {
    word_to_json(b.diagram(), c.word())
}

pub fn chamber_from_json(b: &Building, v: &Value) -> Result<Chamber> {
    Ok(b.chamber(word_from_json(b.diagram(), b.params(), v)?))
}

/// Compact single-line name of a chamber, used as a stable DOT identifier.
pub fn chamber_name(b: &Building, c: &Chamber) -> String {
    if c.is_base() {
        return "e".to_owned();
    }
    c.word()
        .letters()
        .iter()
        .map(|l| format!("({},{})", b.diagram().label(l.ty), l.color))
        .collect()
}

pub fn perm_to_json(p: &Perm) -> Value {
    Value::Array(p.images().iter().map(|&x| json!(x)).collect())
}

pub fn perm_from_json(v: &Value) -> Result<Perm> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::NotAPermutation("expected a JSON array of images".into()))?;
    let mut images = Vec::with_capacity(arr.len());
    for x in arr {
        let x = x
            .as_u64()
            .ok_or_else(|| Error::NotAPermutation("images must be integers".into()))?;
        if x > u16::MAX as u64 {
            return Err(Error::NotAPermutation(format!("image {x} out of range")));
        }
        images.push(x as u16);
    }
    Perm::from_images(images)
}

pub fn tree_wall_to_json(b: &Building, t: &TreeWall) -> Value {
    json!({
        "type": b.diagram().label(t.ty),
        "residue_rep": word_to_json(b.diagram(), t.residue.rep.word()),
    })
}

pub fn tree_wall_from_json(b: &Building, v: &Value) -> Result<TreeWall> {
    let ty = b.diagram().lookup(&label_of_value(
        v.get("type")
            .ok_or_else(|| Error::PreconditionViolated("tree-wall needs a `type` field".into()))?,
    )?)?;
    let rep = chamber_from_json(
        b,
        v.get("residue_rep")
            .ok_or_else(|| Error::PreconditionViolated("tree-wall needs a `residue_rep` field".into()))?,
    )?;
    let p = b.panel(&rep, ty);
    b.tree_wall_of(&p)
}

pub fn portrait_to_json(b: &Building, g: &Portrait) -> Value {
    let defaults: BTreeMap<String, Value> = b
        .diagram()
        .types()
        .map(|i| {
            (
                b.diagram().label(i).to_owned(),
                perm_to_json(&g.defaults()[i.index()]),
            )
        })
        .collect();
    let assignments: Vec<Value> = g
        .assignments()
        .iter()
        .map(|(t, p)| {
            json!({
                "tree_wall": tree_wall_to_json(b, t),
                "perm": perm_to_json(p),
            })
        })
        .collect();
    json!({
        "base_image": chamber_to_json(b, g.base_image()),
        "defaults": defaults,
        "assignments": assignments,
    })
}

pub fn portrait_from_json(b: &Building, v: &Value) -> Result<Portrait> {
    let base_image = chamber_from_json(
        b,
        v.get("base_image")
            .ok_or_else(|| Error::PreconditionViolated("portrait needs a `base_image`".into()))?,
    )?;
    let mut defaults = Vec::new();
    let default_map = v
        .get("defaults")
        .and_then(Value::as_object)
        .ok_or_else(|| Error::PreconditionViolated("portrait needs a `defaults` object".into()))?;
    for i in b.diagram().types() {
        let label = b.diagram().label(i);
        match default_map.get(label) {
            Some(p) => defaults.push(perm_from_json(p)?),
            None => defaults.push(Perm::identity(b.params().q(i) as usize)),
        }
    }
    let mut assignments = BTreeMap::new();
    if let Some(arr) = v.get("assignments").and_then(Value::as_array) {
        for entry in arr {
            let t = tree_wall_from_json(
                b,
                entry
                    .get("tree_wall")
                    .ok_or_else(|| Error::PreconditionViolated("assignment needs a `tree_wall`".into()))?,
            )?;
            let p = perm_from_json(
                entry
                    .get("perm")
                    .ok_or_else(|| Error::PreconditionViolated("assignment needs a `perm`".into()))?,
            )?;
            assignments.insert(t, p);
        }
    }
    Portrait::new(b, base_image, defaults, assignments)
}

pub fn residue_key_to_json(b: &Building, r: &ResidueKey) -> Value {
    json!({
        "types": types_to_json(b.diagram(), r.types),
        "rep": word_to_json(b.diagram(), r.rep.word()),
    })
}

pub fn types_to_json(d: &Diagram, s: TypeSet) -> Value {
    Value::Array(s.iter().map(|i| json!(d.label(i))).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::TypeIndex;

    fn tree() -> Building {
        Building::new(
            Diagram::numbered(2, &[(1, 2)]).unwrap(),
            Parameters::uniform(2, 3).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn word_round_trip() {
        let b = tree();
        let c = b
            .chamber_from_pairs(&[(TypeIndex(0), 1), (TypeIndex(1), 2), (TypeIndex(0), 1)])
            .unwrap();
        let v = chamber_to_json(&b, &c);
        assert_eq!(v, serde_json::json!([["1", 1], ["2", 2], ["1", 1]]));
        assert_eq!(chamber_from_json(&b, &v).unwrap(), c);
    }

    #[test]
    fn perm_round_trip_and_rejection() {
        let p = Perm::from_cycles(3, &[&[0, 1, 2]]).unwrap();
        let v = perm_to_json(&p);
        assert_eq!(perm_from_json(&v).unwrap(), p);
        assert!(perm_from_json(&serde_json::json!([0, 0, 2])).is_err());
    }

    #[test]
    fn portrait_round_trip() {
        let b = tree();
        let f = crate::universal::LocalData::symmetric(&b);
        let p = b.panel(&b.base(), TypeIndex(0));
        let g = crate::universal::kp_element(&b, &f, &p, &Perm::from_cycles(3, &[&[0, 1, 2]]).unwrap())
            .unwrap();
        let v = portrait_to_json(&b, &g);
        assert_eq!(portrait_from_json(&b, &v).unwrap(), g);
    }
}
