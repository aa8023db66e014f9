//! Weighted relations as dense tables, languages, operation tables.

use std::collections::BTreeSet;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::value::ExtValue;

/// Odometer over `D^r` in lexicographic order, coordinate 0 most significant.
#[derive(Clone, Debug)]
pub struct TupleIter {
    d: usize,
    cur: Vec<usize>,
    done: bool,
}

impl TupleIter {
    pub fn new(d: usize, r: usize) -> Self {
        TupleIter { d, cur: vec![0; r], done: d == 0 }
    }
}

impl Iterator for TupleIter {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.cur.clone();
        let mut k = self.cur.len();
        loop {
            if k == 0 {
                self.done = true;
                break;
            }
            k -= 1;
            self.cur[k] += 1;
            if self.cur[k] < self.d {
                break;
            }
            self.cur[k] = 0;
        }
        Some(out)
    }
}

pub fn tuple_index(d: usize, t: &[usize]) -> usize {
    t.iter().fold(0, |acc, &x| acc * d + x)
}

pub fn index_tuple(d: usize, r: usize, mut idx: usize) -> Vec<usize> {
    let mut t = vec![0; r];
    for k in (0..r).rev() {
        t[k] = idx % d;
        idx /= d;
    }
    t
}

pub fn checked_pow(d: usize, r: usize) -> Option<usize> {
    let mut n: usize = 1;
    for _ in 0..r {
        n = n.checked_mul(d)?;
    }
    Some(n)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RelationRepr", into = "RelationRepr")]
pub struct WeightedRelation {
    domain_size: usize,
    arity: usize,
    table: Vec<ExtValue>,
}

#[derive(Serialize, Deserialize)]
struct RelationRepr {
    domain_size: usize,
    arity: usize,
    table: Vec<ExtValue>,
}

impl TryFrom<RelationRepr> for WeightedRelation {
    type Error = Error;

    fn try_from(r: RelationRepr) -> Result<Self> {
        WeightedRelation::new(r.domain_size, r.arity, r.table)
    }
}

impl From<WeightedRelation> for RelationRepr {
    fn from(w: WeightedRelation) -> Self {
        RelationRepr { domain_size: w.domain_size, arity: w.arity, table: w.table }
    }
}

impl WeightedRelation {
    pub fn new(domain_size: usize, arity: usize, table: Vec<ExtValue>) -> Result<Self> {
        if domain_size == 0 {
            return Err(invalid("domain size must be positive"));
        }
        if arity == 0 {
            return Err(invalid("arity must be positive"));
        }
        let len = checked_pow(domain_size, arity).ok_or_else(|| invalid("table too large"))?;
        if table.len() != len {
            return Err(invalid(format!(
                "table has {} entries, expected {}^{} = {}",
                table.len(),
                domain_size,
                arity,
                len
            )));
        }
        Ok(WeightedRelation { domain_size, arity, table })
    }

    pub fn from_fn(domain_size: usize, arity: usize, f: impl Fn(&[usize]) -> ExtValue) -> Self {
        assert!(domain_size > 0 && arity > 0);
        let table = TupleIter::new(domain_size, arity).map(|t| f(&t)).collect();
        WeightedRelation { domain_size, arity, table }
    }

    /// Crisp relation whose feasible tuples are exactly `tuples`.
    pub fn crisp(domain_size: usize, arity: usize, tuples: &[&[usize]]) -> Self {
        let mut table = vec![ExtValue::Inf; checked_pow(domain_size, arity).expect("size")];
        for t in tuples {
            assert_eq!(t.len(), arity);
            table[tuple_index(domain_size, t)] = ExtValue::zero();
        }
        WeightedRelation::new(domain_size, arity, table).expect("crisp")
    }

    pub fn constant(domain_size: usize, arity: usize, v: ExtValue) -> Self {
        WeightedRelation::from_fn(domain_size, arity, |_| v.clone())
    }

    pub fn domain_size(&self) -> usize {
        self.domain_size
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn table(&self) -> &[ExtValue] {
        &self.table
    }

    pub fn into_table(self) -> Vec<ExtValue> {
        self.table
    }

    pub fn index_of(&self, t: &[usize]) -> usize {
        tuple_index(self.domain_size, t)
    }

    pub fn tuple_at(&self, idx: usize) -> Vec<usize> {
        index_tuple(self.domain_size, self.arity, idx)
    }

    pub fn at(&self, idx: usize) -> &ExtValue {
        &self.table[idx]
    }

    pub fn get(&self, t: &[usize]) -> &ExtValue {
        debug_assert_eq!(t.len(), self.arity);
        &self.table[self.index_of(t)]
    }

    pub fn evaluate(&self, t: &[usize]) -> Result<ExtValue> {
        if t.len() != self.arity {
            return Err(invalid(format!("tuple has length {}, arity is {}", t.len(), self.arity)));
        }
        if let Some(&x) = t.iter().find(|&&x| x >= self.domain_size) {
            return Err(invalid(format!("label {x} outside domain of size {}", self.domain_size)));
        }
        Ok(self.get(t).clone())
    }

    pub fn tuples(&self) -> TupleIter {
        TupleIter::new(self.domain_size, self.arity)
    }

    pub fn is_crisp(&self) -> bool {
        self.table.iter().all(|v| v.is_inf() || v.is_zero())
    }

    pub fn is_feasible(&self, t: &[usize]) -> bool {
        self.get(t).is_finite()
    }

    pub fn feasible_indices(&self) -> Vec<usize> {
        (0..self.table.len()).filter(|&i| self.table[i].is_finite()).collect()
    }

    pub fn feasible_tuples(&self) -> Vec<Vec<usize>> {
        self.feasible_indices().into_iter().map(|i| self.tuple_at(i)).collect()
    }

    pub fn min_value(&self) -> Option<&BigRational> {
        self.table.iter().filter_map(|v| v.finite()).min()
    }

    pub fn max_finite(&self) -> Option<&BigRational> {
        self.table.iter().filter_map(|v| v.finite()).max()
    }

    /// Distinct finite values in increasing order.
    pub fn finite_values(&self) -> Vec<BigRational> {
        let set: BTreeSet<&BigRational> = self.table.iter().filter_map(|v| v.finite()).collect();
        set.into_iter().cloned().collect()
    }

    pub fn map_values(&self, f: impl Fn(&ExtValue) -> ExtValue) -> Self {
        WeightedRelation {
            domain_size: self.domain_size,
            arity: self.arity,
            table: self.table.iter().map(f).collect(),
        }
    }

    /// Compact text key: `d:r:v,v,...`. Equal keys iff equal relations.
    pub fn encode(&self) -> String {
        let vals: Vec<String> = self.table.iter().map(|v| v.to_string()).collect();
        format!("{}:{}:{}", self.domain_size, self.arity, vals.join(","))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedRelation {
    pub name: String,
    pub relation: WeightedRelation,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "LanguageRepr", into = "LanguageRepr")]
pub struct Language {
    domain_size: usize,
    relations: Vec<NamedRelation>,
}

#[derive(Serialize, Deserialize)]
struct LanguageRepr {
    domain_size: usize,
    relations: Vec<NamedRelation>,
}

impl TryFrom<LanguageRepr> for Language {
    type Error = Error;

    fn try_from(r: LanguageRepr) -> Result<Self> {
        Language::new(r.domain_size, r.relations)
    }
}

impl From<Language> for LanguageRepr {
    fn from(l: Language) -> Self {
        LanguageRepr { domain_size: l.domain_size, relations: l.relations }
    }
}

impl Language {
    pub fn new(domain_size: usize, relations: Vec<NamedRelation>) -> Result<Self> {
        if relations.is_empty() {
            return Err(invalid("language must contain at least one relation"));
        }
        let mut names = BTreeSet::new();
        for nr in &relations {
            if nr.relation.domain_size() != domain_size {
                return Err(invalid(format!(
                    "relation {:?} has domain size {}, language has {}",
                    nr.name,
                    nr.relation.domain_size(),
                    domain_size
                )));
            }
            if !names.insert(nr.name.as_str()) {
                return Err(invalid(format!("duplicate relation name {:?}", nr.name)));
            }
        }
        Ok(Language { domain_size, relations })
    }

    pub fn from_pairs(domain_size: usize, rels: Vec<(&str, WeightedRelation)>) -> Result<Self> {
        Language::new(
            domain_size,
            rels.into_iter()
                .map(|(n, r)| NamedRelation { name: n.to_string(), relation: r })
                .collect(),
        )
    }

    pub fn domain_size(&self) -> usize {
        self.domain_size
    }

    pub fn relations(&self) -> &[NamedRelation] {
        &self.relations
    }

    pub fn get(&self, name: &str) -> Option<&WeightedRelation> {
        self.relations.iter().find(|nr| nr.name == name).map(|nr| &nr.relation)
    }

    pub fn max_arity(&self) -> usize {
        self.relations.iter().map(|nr| nr.relation.arity()).max().unwrap_or(0)
    }

    pub fn with(&self, name: &str, rel: WeightedRelation) -> Result<Self> {
        let mut rels = self.relations.clone();
        rels.push(NamedRelation { name: name.to_string(), relation: rel });
        Language::new(self.domain_size, rels)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OpTable {
    pub domain_size: usize,
    pub arity: usize,
    pub table: Vec<usize>,
}

impl OpTable {
    pub fn new(domain_size: usize, arity: usize, table: Vec<usize>) -> Result<Self> {
        let len = checked_pow(domain_size, arity).ok_or_else(|| invalid("op table too large"))?;
        if arity == 0 || table.len() != len {
            return Err(invalid(format!("op table has {} entries, expected {len}", table.len())));
        }
        if table.iter().any(|&x| x >= domain_size) {
            return Err(invalid("op table entry outside the domain"));
        }
        Ok(OpTable { domain_size, arity, table })
    }

    pub fn from_fn(domain_size: usize, arity: usize, f: impl Fn(&[usize]) -> usize) -> Self {
        let table = TupleIter::new(domain_size, arity).map(|t| f(&t)).collect();
        OpTable::new(domain_size, arity, table).expect("op table")
    }

    pub fn projection(domain_size: usize, arity: usize, i: usize) -> Self {
        OpTable::from_fn(domain_size, arity, |t| t[i])
    }

    pub fn apply(&self, args: &[usize]) -> usize {
        self.table[tuple_index(self.domain_size, args)]
    }

    pub fn is_conservative(&self) -> bool {
        TupleIter::new(self.domain_size, self.arity).all(|t| t.contains(&self.apply(&t)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultimorphismCandidate {
    pub ops: Vec<OpTable>,
}

impl MultimorphismCandidate {
    pub fn new(ops: Vec<OpTable>) -> Result<Self> {
        let k = ops.len();
        let Some(first) = ops.first() else {
            return Err(invalid("a multimorphism needs at least one operation"));
        };
        let d = first.domain_size;
        if ops.iter().any(|f| f.arity != k || f.domain_size != d) {
            return Err(invalid(format!("all {k} operations must be {k}-ary over one domain")));
        }
        Ok(MultimorphismCandidate { ops })
    }

    pub fn k(&self) -> usize {
        self.ops.len()
    }

    pub fn domain_size(&self) -> usize {
        self.ops[0].domain_size
    }
}

/// Coordinates split into `I` and its complement `J` (0-based).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TuplePartition {
    pub arity: usize,
    pub i: BTreeSet<usize>,
}

impl TuplePartition {
    pub fn new(arity: usize, i: impl IntoIterator<Item = usize>) -> Result<Self> {
        let i: BTreeSet<usize> = i.into_iter().collect();
        if i.iter().any(|&c| c >= arity) {
            return Err(invalid("partition coordinate out of range"));
        }
        Ok(TuplePartition { arity, i })
    }

    pub fn j(&self) -> BTreeSet<usize> {
        (0..self.arity).filter(|c| !self.i.contains(c)).collect()
    }

    pub fn in_i(&self, c: usize) -> bool {
        self.i.contains(&c)
    }

    /// `x_I · y_J`.
    pub fn mix(&self, x: &[usize], y: &[usize]) -> Vec<usize> {
        (0..self.arity).map(|c| if self.in_i(c) { x[c] } else { y[c] }).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexicographic_order_first_coordinate_major() {
        let all: Vec<_> = TupleIter::new(2, 3).collect();
        assert_eq!(all.len(), 8);
        assert_eq!(all[1], vec![0, 0, 1]);
        assert_eq!(all[4], vec![1, 0, 0]);
        for (i, t) in all.iter().enumerate() {
            assert_eq!(tuple_index(2, t), i);
            assert_eq!(&index_tuple(2, 3, i), t);
        }
    }

    #[test]
    fn table_length_checked() {
        assert!(WeightedRelation::new(2, 2, vec![ExtValue::zero(); 3]).is_err());
        assert!(WeightedRelation::new(2, 0, vec![ExtValue::zero()]).is_err());
        let r = WeightedRelation::new(3, 2, vec![ExtValue::Inf; 9]).unwrap();
        assert!(r.feasible_indices().is_empty());
        assert!(r.is_crisp());
    }

    #[test]
    fn evaluate_rejects_bad_tuples() {
        let r = WeightedRelation::crisp(2, 2, &[&[0, 1]]);
        assert!(r.evaluate(&[0]).is_err());
        assert!(r.evaluate(&[0, 2]).is_err());
        assert_eq!(r.evaluate(&[0, 1]).unwrap(), ExtValue::zero());
    }

    #[test]
    fn language_rejects_duplicates_and_mixed_domains() {
        let a = WeightedRelation::crisp(2, 1, &[&[0]]);
        let b = WeightedRelation::crisp(3, 1, &[&[0]]);
        assert!(Language::from_pairs(2, vec![("a", a.clone()), ("a", a.clone())]).is_err());
        assert!(Language::from_pairs(2, vec![("a", a), ("b", b)]).is_err());
        assert!(Language::new(2, vec![]).is_err());
    }

    #[test]
    fn relation_json_round_trip() {
        let r = WeightedRelation::from_fn(2, 2, |t| {
            if t[0] == t[1] { ExtValue::Inf } else { ExtValue::from_ratio(1, 2) }
        });
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(s, r#"{"domain_size":2,"arity":2,"table":["inf","1/2","1/2","inf"]}"#);
        let back: WeightedRelation = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
        assert!(serde_json::from_str::<WeightedRelation>(
            r#"{"domain_size":2,"arity":2,"table":["0"]}"#
        )
        .is_err());
    }

    #[test]
    fn partition_mix() {
        let p = TuplePartition::new(3, [0, 2]).unwrap();
        assert_eq!(p.j().into_iter().collect::<Vec<_>>(), vec![1]);
        assert_eq!(p.mix(&[0, 0, 0], &[1, 1, 1]), vec![0, 1, 0]);
    }
}
