//! Self-describing JSON documents. Every file carries a `schema` tag; relations
//! are either catalog references or explicit tables.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::catalog;
use crate::error::{Error, Result};
use crate::express::ExpressibleQuery;
use crate::plane::{Constraint, PlaneGraph, PlaneInstance};
use crate::relation::{Language, MultimorphismCandidate, NamedRelation, OpTable, WeightedRelation};
use crate::value::ExtValue;

pub const LANGUAGE: &str = "planar-vcsp/language";
pub const INSTANCE: &str = "planar-vcsp/instance";
pub const QUERY: &str = "planar-vcsp/query";
pub const MULTIMORPHISM: &str = "planar-vcsp/multimorphism";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum RelationSpec {
    Catalog { catalog: String },
    Table { arity: usize, table: Vec<ExtValue> },
}

impl RelationSpec {
    pub fn resolve(&self, d: usize) -> Result<WeightedRelation> {
        match self {
            RelationSpec::Catalog { catalog: name } => {
                let r = catalog::relation_by_name(name)
                    .ok_or_else(|| Error::Parse(format!("unknown catalog relation {name:?}")))?;
                if r.domain_size() != d {
                    return Err(Error::Invalid(format!(
                        "catalog relation {name:?} has domain size {}, document has {d}",
                        r.domain_size()
                    )));
                }
                Ok(r)
            }
            RelationSpec::Table { arity, table } => WeightedRelation::new(d, *arity, table.clone()),
        }
    }

    pub fn table(r: &WeightedRelation) -> RelationSpec {
        RelationSpec::Table { arity: r.arity(), table: r.table().to_vec() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedSpec {
    pub name: String,
    #[serde(flatten)]
    pub spec: RelationSpec,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LanguageDoc {
    pub schema: String,
    pub domain_size: usize,
    pub relations: Vec<NamedSpec>,
}

impl LanguageDoc {
    pub fn resolve(&self) -> Result<Language> {
        let rels = self
            .relations
            .iter()
            .map(|n| Ok(NamedRelation { name: n.name.clone(), relation: n.spec.resolve(self.domain_size)? }))
            .collect::<Result<Vec<_>>>()?;
        Language::new(self.domain_size, rels)
    }

    pub fn from_language(lang: &Language) -> LanguageDoc {
        LanguageDoc {
            schema: LANGUAGE.into(),
            domain_size: lang.domain_size(),
            relations: lang
                .relations()
                .iter()
                .map(|n| NamedSpec { name: n.name.clone(), spec: RelationSpec::table(&n.relation) })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceBody {
    pub domain_size: usize,
    pub graph: PlaneGraph,
    pub relations: BTreeMap<String, RelationSpec>,
    pub constraints: Vec<Constraint>,
}

impl InstanceBody {
    pub fn resolve(&self) -> Result<PlaneInstance> {
        let relations = self
            .relations
            .iter()
            .map(|(k, s)| Ok((k.clone(), s.resolve(self.domain_size)?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        Ok(PlaneInstance {
            domain_size: self.domain_size,
            graph: self.graph.clone(),
            relations,
            constraints: self.constraints.clone(),
        })
    }

    pub fn from_instance(inst: &PlaneInstance) -> InstanceBody {
        InstanceBody {
            domain_size: inst.domain_size,
            graph: inst.graph.clone(),
            relations: inst.relations.iter().map(|(k, r)| (k.clone(), RelationSpec::table(r))).collect(),
            constraints: inst.constraints.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceDoc {
    pub schema: String,
    #[serde(flatten)]
    pub body: InstanceBody,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QueryDoc {
    pub schema: String,
    pub instance: InstanceBody,
    pub v: Vec<usize>,
}

impl QueryDoc {
    pub fn from_query(q: &ExpressibleQuery) -> QueryDoc {
        QueryDoc { schema: QUERY.into(), instance: InstanceBody::from_instance(&q.instance), v: q.v.clone() }
    }

    pub fn resolve(&self) -> Result<ExpressibleQuery> {
        Ok(ExpressibleQuery { instance: self.instance.resolve()?, v: self.v.clone() })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum OpSpec {
    Catalog { catalog: String },
    Table { arity: usize, table: Vec<usize> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultimorphismDoc {
    pub schema: String,
    pub domain_size: usize,
    pub ops: Vec<OpSpec>,
}

impl MultimorphismDoc {
    pub fn resolve(&self) -> Result<MultimorphismCandidate> {
        let d = self.domain_size;
        let ops = self
            .ops
            .iter()
            .map(|o| match o {
                OpSpec::Catalog { catalog: name } => {
                    let op = catalog::op_by_name(name)
                        .ok_or_else(|| Error::Parse(format!("unknown catalog operation {name:?}")))?;
                    if op.domain_size != d {
                        return Err(Error::Invalid(format!("catalog operation {name:?} is Boolean")));
                    }
                    Ok(op)
                }
                OpSpec::Table { arity, table } => OpTable::new(d, *arity, table.clone()),
            })
            .collect::<Result<Vec<_>>>()?;
        MultimorphismCandidate::new(ops)
    }
}

/// A Boolean candidate written as comma-separated catalog names, e.g. `min,max`.
pub fn multimorphism_by_names(names: &str) -> Result<MultimorphismCandidate> {
    let ops = names
        .split(',')
        .map(|n| catalog::op_by_name(n.trim()).ok_or_else(|| Error::Parse(format!("unknown operation {n:?}"))))
        .collect::<Result<Vec<_>>>()?;
    MultimorphismCandidate::new(ops)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Document {
    Language(Language),
    Instance(PlaneInstance),
    Query(ExpressibleQuery),
    Multimorphism(MultimorphismCandidate),
}

fn located(e: serde_json::Error) -> Error {
    Error::Parse(format!("line {} column {}: {e}", e.line(), e.column()))
}

#[derive(Deserialize)]
struct Tag {
    schema: String,
}

pub fn parse_document(text: &str) -> Result<Document> {
    let tag: Tag = serde_json::from_str(text).map_err(|e| match e.classify() {
        serde_json::error::Category::Data => Error::Parse("document has no \"schema\" tag".into()),
        _ => located(e),
    })?;
    Ok(match tag.schema.as_str() {
        LANGUAGE => Document::Language(serde_json::from_str::<LanguageDoc>(text).map_err(located)?.resolve()?),
        INSTANCE => Document::Instance(serde_json::from_str::<InstanceDoc>(text).map_err(located)?.body.resolve()?),
        QUERY => Document::Query(serde_json::from_str::<QueryDoc>(text).map_err(located)?.resolve()?),
        MULTIMORPHISM => {
            Document::Multimorphism(serde_json::from_str::<MultimorphismDoc>(text).map_err(located)?.resolve()?)
        }
        other => return Err(Error::Parse(format!("unknown schema {other:?}"))),
    })
}

fn expect<T>(got: Document, want: &str, pick: impl FnOnce(Document) -> Option<T>) -> Result<T> {
    pick(got).ok_or_else(|| Error::Parse(format!("expected a {want} document")))
}

pub fn parse_language(text: &str) -> Result<Language> {
    expect(parse_document(text)?, LANGUAGE, |d| match d {
        Document::Language(l) => Some(l),
        _ => None,
    })
}

pub fn parse_instance(text: &str) -> Result<PlaneInstance> {
    expect(parse_document(text)?, INSTANCE, |d| match d {
        Document::Instance(i) => Some(i),
        _ => None,
    })
}

pub fn parse_query(text: &str) -> Result<ExpressibleQuery> {
    expect(parse_document(text)?, QUERY, |d| match d {
        Document::Query(q) => Some(q),
        _ => None,
    })
}

pub fn parse_multimorphism(text: &str) -> Result<MultimorphismCandidate> {
    expect(parse_document(text)?, MULTIMORPHISM, |d| match d {
        Document::Multimorphism(m) => Some(m),
        _ => None,
    })
}

pub fn instance_doc(inst: &PlaneInstance) -> InstanceDoc {
    InstanceDoc { schema: INSTANCE.into(), body: InstanceBody::from_instance(inst) }
}

/// Pretty JSON with a trailing newline.
pub fn to_pretty<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}
