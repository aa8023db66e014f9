use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use super::{PlaneGraph, Topology};
use crate::error::{invalid, Result};
use crate::relation::WeightedRelation;
use crate::value::rational_str;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Constraint {
    pub relation: String,
    #[serde(with = "rational_str")]
    pub weight: BigRational,
    pub anchor_dart: usize,
    /// Expected vertex walk from the anchor; derived from the walk when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scope: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaneInstance {
    pub domain_size: usize,
    pub graph: PlaneGraph,
    pub relations: BTreeMap<String, WeightedRelation>,
    pub constraints: Vec<Constraint>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    Structure { message: String },
    UnknownRelation { constraint: usize, relation: String },
    DomainMismatch { constraint: usize, expected: usize, found: usize },
    AnchorOutOfRange { constraint: usize, dart: usize },
    ArityMismatch { constraint: usize, arity: usize, boundary_length: usize },
    BoundaryMismatch { constraint: usize, scope: Vec<usize>, walk: Vec<usize> },
    NotInjective { face: usize, constraints: Vec<usize> },
    NegativeWeight { constraint: usize, weight: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub faces: usize,
    pub violations: Vec<Violation>,
}

impl PlaneInstance {
    pub fn relation(&self, c: &Constraint) -> Option<&WeightedRelation> {
        self.relations.get(&c.relation)
    }

    /// Topology plus each constraint's scope, or the first violation as an error.
    pub fn checked(&self) -> Result<(Topology, Vec<Vec<usize>>)> {
        let report = validate_instance(self);
        if let Some(v) = report.violations.first() {
            return Err(invalid(format!("instance is not a valid plane instance: {v:?}")));
        }
        let topo = self.graph.topology()?;
        let scopes = self
            .constraints
            .iter()
            .map(|c| self.graph.vertex_walk_from(&topo, c.anchor_dart))
            .collect();
        Ok((topo, scopes))
    }
}

pub fn validate_instance(inst: &PlaneInstance) -> ValidationReport {
    let mut violations = Vec::new();
    let topo = match inst.graph.topology() {
        Ok(t) => Some(t),
        Err(e) => {
            violations.push(Violation::Structure { message: e.to_string() });
            None
        }
    };
    if let Some(Err(e)) = topo.as_ref().map(|t| inst.graph.outer_face_id(t)) {
        violations.push(Violation::Structure { message: e.to_string() });
    }
    let mut by_face: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, c) in inst.constraints.iter().enumerate() {
        if c.weight.is_negative() {
            violations.push(Violation::NegativeWeight { constraint: i, weight: c.weight.to_string() });
        }
        let rel = inst.relation(c);
        match rel {
            None => violations.push(Violation::UnknownRelation {
                constraint: i,
                relation: c.relation.clone(),
            }),
            Some(r) if r.domain_size() != inst.domain_size => {
                violations.push(Violation::DomainMismatch {
                    constraint: i,
                    expected: inst.domain_size,
                    found: r.domain_size(),
                })
            }
            Some(_) => {}
        }
        if c.anchor_dart >= inst.graph.darts.len() {
            violations.push(Violation::AnchorOutOfRange { constraint: i, dart: c.anchor_dart });
            continue;
        }
        let Some(topo) = &topo else { continue };
        by_face.entry(topo.face_of[c.anchor_dart]).or_default().push(i);
        let walk = inst.graph.vertex_walk_from(topo, c.anchor_dart);
        if let Some(r) = rel {
            if r.arity() != walk.len() {
                violations.push(Violation::ArityMismatch {
                    constraint: i,
                    arity: r.arity(),
                    boundary_length: walk.len(),
                });
            }
        }
        if let Some(scope) = &c.scope {
            if *scope != walk {
                violations.push(Violation::BoundaryMismatch {
                    constraint: i,
                    scope: scope.clone(),
                    walk,
                });
            }
        }
    }
    for (face, cs) in by_face {
        if cs.len() > 1 {
            violations.push(Violation::NotInjective { face, constraints: cs });
        }
    }
    ValidationReport {
        ok: violations.is_empty(),
        faces: topo.map_or(0, |t| t.faces.len()),
        violations,
    }
}

#[cfg(test)]
mod tests {
    use super::super::fixtures;
    use super::*;

    #[test]
    fn four_vars_validates() {
        let report = validate_instance(&fixtures::four_vars());
        assert!(report.ok, "{report:?}");
        assert_eq!(report.faces, 5);
    }

    #[test]
    fn reversed_lens_scope_is_rejected() {
        let mut inst = fixtures::four_vars();
        inst.constraints[2].scope = Some(vec![1, 2]);
        let report = validate_instance(&inst);
        assert!(!report.ok);
        assert!(matches!(
            report.violations.as_slice(),
            [Violation::BoundaryMismatch { constraint: 2, .. }]
        ));
    }

    #[test]
    fn two_constraints_on_one_face() {
        let mut inst = fixtures::four_vars();
        let mut dup = inst.constraints[2].clone();
        dup.anchor_dart = 8;
        dup.scope = None;
        inst.constraints.push(dup);
        let report = validate_instance(&inst);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::NotInjective { constraints, .. } if constraints == &vec![2, 4])));
    }

    #[test]
    fn negative_weight_and_unknown_relation() {
        let mut inst = fixtures::four_vars();
        inst.constraints[0].weight = crate::value::int(-1);
        inst.constraints[1].relation = "missing".into();
        let report = validate_instance(&inst);
        assert_eq!(report.violations.len(), 2);
    }

    #[test]
    fn arity_must_match_boundary() {
        let mut inst = fixtures::four_vars();
        inst.constraints[3].relation = inst.constraints[1].relation.clone();
        inst.constraints[3].scope = None;
        let report = validate_instance(&inst);
        assert!(matches!(
            report.violations.as_slice(),
            [Violation::ArityMismatch { constraint: 3, arity: 3, boundary_length: 2 }]
        ));
    }
}
