//! The simplicity analyzer: diagram-level flags plus the decision
//! procedures for simplicity of `U(F́)` and virtual simplicity of `G(F,F́)`
//! from finite input data.

use serde::Serialize;

use rab_core::universal::orbit_census;
use rab_core::{TypeIndex, TypeSet};

use crate::spec::{BuildingSpec, CliError};

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum VerdictValue {
    True,
    False,
    PreconditionFailed,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Verdict {
    pub value: VerdictValue,
    /// Nonempty whenever the value is not `true`; each entry names the
    /// violated condition and the witnessing type or edge.
    pub reasons: Vec<String>,
}

impl Verdict {
    fn ok() -> Verdict {
        Verdict {
            value: VerdictValue::True,
            reasons: vec![],
        }
    }

    fn failed(value: VerdictValue, reasons: Vec<String>) -> Verdict {
        debug_assert!(!reasons.is_empty());
        Verdict { value, reasons }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum Collapse {
    None,
    GEqualsUByLadderful,
    ReducibleDecomposition,
}

#[derive(Clone, Debug, Serialize)]
pub struct ComponentsReport {
    pub components: Vec<Vec<String>>,
    pub isolated: Vec<String>,
    pub irreducible: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct AnalysisReport {
    pub thick: bool,
    pub irreducible: bool,
    pub components: ComponentsReport,
    pub rung_types: Vec<String>,
    pub ladderful: bool,
    pub collapse: Collapse,
    pub discrete: bool,
    pub all_acute_free: bool,
    pub orbit_count: u64,
    pub rung_constraint_ok: bool,
    pub u_acute_simple: Verdict,
    pub g_virtually_simple: Verdict,
    pub notes: Vec<String>,
}

pub fn analyze(spec: &BuildingSpec) -> Result<AnalysisReport, CliError> {
    let b = &spec.building;
    let d = b.diagram();
    let thick = b.params().is_thick();
    let dec = d.decompose();
    let irreducible = dec.irreducible;
    let components = ComponentsReport {
        components: dec.components.iter().map(|c| d.labels_of(*c)).collect(),
        isolated: dec.isolated.iter().map(|&i| d.label(i).to_owned()).collect(),
        irreducible,
    };
    let rungs = d.rung_types();
    let ladderful = d.is_ladderful();
    let collapse = if ladderful {
        Collapse::GEqualsUByLadderful
    } else if !irreducible {
        Collapse::ReducibleDecomposition
    } else {
        Collapse::None
    };

    let mut discrete = true;
    let mut all_acute_free = true;
    let mut not_stab_generated: Vec<TypeIndex> = Vec::new();
    let mut transitive_types = TypeSet::EMPTY;
    for i in d.types() {
        let f_an = spec.f.group(i).stabilizer_analysis().map_err(CliError::from)?;
        if !f_an.free {
            discrete = false;
        }
        let fa = spec.facute.group(i);
        let fa_an = fa.stabilizer_analysis().map_err(CliError::from)?;
        if !fa_an.free {
            all_acute_free = false;
        }
        if !fa_an.gen_by_point_stabs {
            not_stab_generated.push(i);
        }
        if fa.is_transitive() {
            transitive_types.insert(i);
        }
    }

    let mut rung_constraint_ok = true;
    let mut rung_violations = Vec::new();
    for i in rungs.iter() {
        if !spec
            .f
            .group(i)
            .same_group(spec.facute.group(i))
            .map_err(CliError::from)?
        {
            rung_constraint_ok = false;
            rung_violations.push(format!("rung_constraint:type={}", d.label(i)));
        }
    }

    let orbit_count = orbit_census(b, &spec.f).map_err(CliError::from)?.count;

    // shared simplicity conditions on the local data F́
    let mut condition_reasons = Vec::new();
    for &i in &not_stab_generated {
        condition_reasons.push(format!(
            "not_generated_by_point_stabilizers:type={}",
            d.label(i)
        ));
    }
    for (i, j) in d.infinity_edges() {
        if !transitive_types.contains(i) && !transitive_types.contains(j) {
            condition_reasons.push(format!(
                "no_transitive_vertex_cover:edge=[{},{}]",
                d.label(i),
                d.label(j)
            ));
        }
    }

    // shared preconditions of the two theorems
    let mut preconditions = Vec::new();
    if d.rank() < 2 {
        preconditions.push("rank_less_than_2".to_owned());
    }
    if !irreducible {
        preconditions.push("reducible_diagram".to_owned());
    }
    if !thick {
        let witness = d
            .types()
            .find(|&i| b.params().q(i) < 3)
            .map(|i| d.label(i).to_owned())
            .unwrap_or_default();
        preconditions.push(format!("not_thick:type={witness}"));
    }
    if all_acute_free {
        preconditions.push("all local groups free".to_owned());
    }

    let u_acute_simple = if !preconditions.is_empty() {
        Verdict::failed(VerdictValue::PreconditionFailed, preconditions.clone())
    } else if condition_reasons.is_empty() {
        Verdict::ok()
    } else {
        Verdict::failed(VerdictValue::False, condition_reasons.clone())
    };

    let g_virtually_simple = if !preconditions.is_empty() || !rung_constraint_ok {
        let mut reasons = preconditions;
        reasons.extend(rung_violations);
        Verdict::failed(VerdictValue::PreconditionFailed, reasons)
    } else if condition_reasons.is_empty() {
        Verdict::ok()
    } else {
        Verdict::failed(VerdictValue::False, condition_reasons)
    };

    let mut notes = Vec::new();
    if !spec.facute_given {
        notes.push("Facute omitted: G(F,F) = U(F)".to_owned());
    }
    if rung_constraint_ok {
        notes.push(
            "informational: with F = F́ at every rung type, the closure of G(F,F́) in Aut(Δ) is U(F́)"
                .to_owned(),
        );
    }

    Ok(AnalysisReport {
        thick,
        irreducible,
        components,
        rung_types: d.labels_of(rungs),
        ladderful,
        collapse,
        discrete,
        all_acute_free,
        orbit_count,
        rung_constraint_ok,
        u_acute_simple,
        g_virtually_simple,
        notes,
    })
}

pub fn render_text(r: &AnalysisReport) -> String {
    let verdict = |v: &Verdict| match v.value {
        VerdictValue::True => "yes".to_owned(),
        VerdictValue::False => format!("no ({})", v.reasons.join("; ")),
        VerdictValue::PreconditionFailed => {
            format!("precondition failed ({})", v.reasons.join("; "))
        }
    };
    let mut out = String::new();
    out.push_str(&format!("thick:                 {}\n", r.thick));
    out.push_str(&format!("irreducible:           {}\n", r.irreducible));
    out.push_str(&format!(
        "components:            {:?} isolated {:?}\n",
        r.components.components, r.components.isolated
    ));
    out.push_str(&format!("rung types:            {:?}\n", r.rung_types));
    out.push_str(&format!("ladderful:             {}\n", r.ladderful));
    out.push_str(&format!("collapse:              {:?}\n", r.collapse));
    out.push_str(&format!("discrete:              {}\n", r.discrete));
    out.push_str(&format!("all F' free:           {}\n", r.all_acute_free));
    out.push_str(&format!("panel orbit count:     {}\n", r.orbit_count));
    out.push_str(&format!("rung constraint F=F':  {}\n", r.rung_constraint_ok));
    out.push_str(&format!(
        "U(F') simple:          {}\n",
        verdict(&r.u_acute_simple)
    ));
    out.push_str(&format!(
        "G(F,F') virt. simple:  {}\n",
        verdict(&r.g_virtually_simple)
    ));
    for n in &r.notes {
        out.push_str(&format!("note: {n}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::{parse_spec, spec_json};

    fn sym3() -> Vec<Vec<u16>> {
        vec![vec![1, 0, 2], vec![1, 2, 0]]
    }

    fn c3() -> Vec<Vec<u16>> {
        vec![vec![1, 2, 0]]
    }

    #[test]
    fn pentagon_sym3_is_virtually_simple() {
        let v = spec_json(
            &["1", "2", "3", "4", "5"],
            &[("1", "2"), ("2", "3"), ("3", "4"), ("4", "5"), ("5", "1")],
            &[("1", 3), ("2", 3), ("3", 3), ("4", 3), ("5", 3)],
            &[
                ("1", sym3()),
                ("2", sym3()),
                ("3", sym3()),
                ("4", sym3()),
                ("5", sym3()),
            ],
            None,
        );
        let spec = parse_spec(&serde_json::to_vec(&v).unwrap()).unwrap();
        let r = analyze(&spec).unwrap();
        assert!(r.ladderful);
        assert_eq!(r.collapse, Collapse::GEqualsUByLadderful);
        assert_eq!(r.u_acute_simple.value, VerdictValue::True);
        assert_eq!(r.g_virtually_simple.value, VerdictValue::True);
    }

    #[test]
    fn tree_c3_fails_freeness_precondition() {
        let v = spec_json(
            &["1", "2"],
            &[("1", "2")],
            &[("1", 3), ("2", 3)],
            &[("1", c3()), ("2", c3())],
            None,
        );
        let spec = parse_spec(&serde_json::to_vec(&v).unwrap()).unwrap();
        let r = analyze(&spec).unwrap();
        assert!(r.all_acute_free);
        assert!(r.discrete);
        assert_eq!(r.g_virtually_simple.value, VerdictValue::PreconditionFailed);
        assert!(r
            .g_virtually_simple
            .reasons
            .contains(&"all local groups free".to_owned()));
    }

    #[test]
    fn tree_c3_sym3_is_virtually_simple() {
        let v = spec_json(
            &["1", "2"],
            &[("1", "2")],
            &[("1", 3), ("2", 3)],
            &[("1", c3()), ("2", c3())],
            Some(&[("1", sym3()), ("2", sym3())]),
        );
        let spec = parse_spec(&serde_json::to_vec(&v).unwrap()).unwrap();
        let r = analyze(&spec).unwrap();
        assert!(r.rung_constraint_ok); // no rungs in the tree diagram
        assert!(r.discrete); // F itself is free
        assert!(!r.all_acute_free);
        assert_eq!(r.u_acute_simple.value, VerdictValue::True);
        assert_eq!(r.g_virtually_simple.value, VerdictValue::True);
    }

    #[test]
    fn intransitive_facute_fails_with_witnesses() {
        // F = F' = ⟨(0 1)⟩ on both tree types: not transitive, and the
        // single ∞-edge is uncovered; also not generated by point stabilizers?
        // ⟨(0 1)⟩ has stabilizers: of 2 = whole group, so it IS generated.
        let swap = vec![vec![1u16, 0, 2]];
        let v = spec_json(
            &["1", "2"],
            &[("1", "2")],
            &[("1", 3), ("2", 3)],
            &[("1", swap.clone()), ("2", swap)],
            None,
        );
        let spec = parse_spec(&serde_json::to_vec(&v).unwrap()).unwrap();
        let r = analyze(&spec).unwrap();
        assert_eq!(r.g_virtually_simple.value, VerdictValue::False);
        assert!(r
            .g_virtually_simple
            .reasons
            .iter()
            .any(|s| s.starts_with("no_transitive_vertex_cover:edge=")));
    }

    #[test]
    fn analyze_is_deterministic() {
        let v = spec_json(
            &["1", "2", "3"],
            &[("2", "3")],
            &[("1", 3), ("2", 3), ("3", 3)],
            &[("1", sym3()), ("2", sym3()), ("3", sym3())],
            None,
        );
        let spec = parse_spec(&serde_json::to_vec(&v).unwrap()).unwrap();
        let r1 = serde_json::to_string(&analyze(&spec).unwrap()).unwrap();
        let r2 = serde_json::to_string(&analyze(&spec).unwrap()).unwrap();
        assert_eq!(r1, r2);
    }
}
