//! DOT and JSON exports of diagrams, balls, galleries and tree-wall trees.
//! Output is deterministic: nodes follow BFS or declaration order.

use std::fmt::Write as _;

use serde_json::{json, Value};

use crate::building::{Ball, Building, Gallery, TreeWallTree};
use crate::diagram::Diagram;
use crate::serial::{chamber_name, chamber_to_json, residue_key_to_json, word_to_json};

/// A diagram as an undirected DOT graph; edges are the `m = ∞` pairs.
pub fn diagram_to_dot(d: &Diagram, name: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "graph {name} {{");
    for i in d.types() {
        let _ = writeln!(out, "  \"{}\";", d.label(i));
    }
    for (i, j) in d.infinity_edges() {
        let _ = writeln!(out, "  \"{}\" -- \"{}\";", d.label(i), d.label(j));
    }
    out.push_str("}\n");
    out
}

/// A ball as an undirected DOT graph: chambers keyed by their serialized
/// words, edges labeled with the adjacency type.
pub fn ball_to_dot(b: &Building, ball: &Ball) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "graph ball {{");
    for c in ball.chambers() {
        let _ = writeln!(out, "  \"{}\";", chamber_name(b, c));
    }
    for (idx, c) in ball.chambers().iter().enumerate() {
        for (ty, n) in b.neighbors(c) {
            if let Some(pos) = ball.chambers().iter().position(|x| x == &n) {
                if pos > idx {
                    let _ = writeln!(
                        out,
                        "  \"{}\" -- \"{}\" [label=\"{}\"];",
                        chamber_name(b, c),
                        chamber_name(b, &n),
                        b.diagram().label(ty)
                    );
                }
            }
        }
    }
    out.push_str("}\n");
    out
}

pub fn ball_to_json(b: &Building, ball: &Ball) -> Value {
    let chambers: Vec<Value> = ball
        .chambers()
        .iter()
        .map(|c| chamber_to_json(b, c))
        .collect();
    let mut edges = Vec::new();
    for (idx, c) in ball.chambers().iter().enumerate() {
        for (ty, n) in b.neighbors(c) {
            if let Some(pos) = ball.chambers().iter().position(|x| x == &n) {
                if pos > idx {
                    edges.push(json!([idx, pos, b.diagram().label(ty)]));
                }
            }
        }
    }
    json!({
        "radius": ball.radius(),
        "chambers": chambers,
        "edges": edges,
    })
}

pub fn gallery_to_json(b: &Building, g: &Gallery) -> Value {
    json!({
        "chambers": g.chambers.iter().map(|c| chamber_to_json(b, c)).collect::<Vec<_>>(),
        "step_types": g.step_types.iter().map(|&t| b.diagram().label(t)).collect::<Vec<_>>(),
    })
}

/// The portion of a tree-wall tree as a bipartite DOT graph: boxes for
/// tree-walls, ellipses for the complementary residues.
pub fn tree_wall_tree_to_dot(b: &Building, t: &TreeWallTree) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "graph treewall_{} {{", b.diagram().label(t.ty));
    for (k, tw) in t.tree_walls.iter().enumerate() {
        let _ = writeln!(
            out,
            "  tw{k} [shape=box,label=\"TW[{}] {}\"];",
            b.diagram().label(tw.ty),
            chamber_name(b, &tw.residue.rep)
        );
    }
    for (k, r) in t.residues.iter().enumerate() {
        let _ = writeln!(
            out,
            "  r{k} [label=\"R {}\"];",
            chamber_name(b, &r.rep)
        );
    }
    for (ti, ri, edge) in &t.edges {
        let _ = writeln!(
            out,
            "  tw{ti} -- r{ri} [label=\"{}\"];",
            chamber_name(b, &edge.rep)
        );
    }
    out.push_str("}\n");
    out
}

pub fn tree_wall_tree_to_json(b: &Building, t: &TreeWallTree) -> Value {
    json!({
        "type": b.diagram().label(t.ty),
        "tree_walls": t.tree_walls.iter().map(|tw| json!({
            "type": b.diagram().label(tw.ty),
            "residue_rep": word_to_json(b.diagram(), tw.residue.rep.word()),
        })).collect::<Vec<_>>(),
        "residues": t.residues.iter().map(|r| residue_key_to_json(b, r)).collect::<Vec<_>>(),
        "edges": t.edges.iter().map(|(ti, ri, e)| json!([ti, ri, word_to_json(b.diagram(), e.rep.word())])).collect::<Vec<_>>(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::Parameters;

    #[test]
    fn dot_outputs_are_deterministic() {
        let d = Diagram::numbered(3, &[(2, 3)]).unwrap();
        let s1 = diagram_to_dot(&d, "ladder");
        let s2 = diagram_to_dot(&d, "ladder");
        assert_eq!(s1, s2);
        assert!(s1.contains("\"2\" -- \"3\""));

        let b = Building::new(d, Parameters::uniform(3, 3).unwrap()).unwrap();
        let ball = b.ball(&b.base(), 2, 10_000).unwrap();
        assert_eq!(ball_to_dot(&b, &ball), ball_to_dot(&b, &ball));
        let t = b.tree_wall_tree(crate::diagram::TypeIndex(0), &ball);
        assert_eq!(tree_wall_tree_to_dot(&b, &t), tree_wall_tree_to_dot(&b, &t));
    }
}
