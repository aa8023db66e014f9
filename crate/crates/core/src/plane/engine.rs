//! Brute-force enumeration of assignments.
//!
//! Weighted tables are brought to a common denominator and summed as `i128`
//! when the bound allows it; otherwise exact big rationals are used.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::PlaneInstance;
use crate::error::{Error, Result};
use crate::relation::{checked_pow, index_tuple};
use crate::value::ExtValue;

/// Default limit on `|D|^n` enumerated assignments.
pub const DEFAULT_CAP: u64 = 1 << 20;

const CHUNK: usize = 1 << 12;

pub(crate) trait Cost: Clone + Ord + Send + Sync {
    fn zero() -> Self;
    fn inf() -> Self;
    fn is_inf(&self) -> bool;
    fn plus(&self, o: &Self) -> Self;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) struct IntCost(u8, i128);

impl Cost for IntCost {
    fn zero() -> Self {
        IntCost(0, 0)
    }
    fn inf() -> Self {
        IntCost(1, 0)
    }
    fn is_inf(&self) -> bool {
        self.0 == 1
    }
    fn plus(&self, o: &Self) -> Self {
        if self.is_inf() || o.is_inf() {
            IntCost::inf()
        } else {
            IntCost(0, self.1 + o.1)
        }
    }
}

impl Cost for ExtValue {
    fn zero() -> Self {
        ExtValue::zero()
    }
    fn inf() -> Self {
        ExtValue::Inf
    }
    fn is_inf(&self) -> bool {
        ExtValue::is_inf(self)
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
}

type Terms<C> = Vec<(Vec<usize>, Vec<C>)>;

enum Compiled {
    Int { terms: Terms<IntCost>, scale: BigInt },
    Big { terms: Terms<ExtValue> },
}

fn compile(terms: Vec<(Vec<usize>, Vec<ExtValue>)>) -> Compiled {
    let mut lcm = BigInt::one();
    for (_, t) in &terms {
        for q in t.iter().filter_map(|v| v.finite()) {
            lcm = lcm.lcm(q.denom());
        }
    }
    let mut max_abs = BigInt::from(0);
    for (_, t) in &terms {
        for q in t.iter().filter_map(|v| v.finite()) {
            let a = (q.numer() * (&lcm / q.denom())).abs();
            if a > max_abs {
                max_abs = a;
            }
        }
    }
    let limit = BigInt::from(1u128 << 120);
    if max_abs * BigInt::from(terms.len() + 1) < limit {
        let int_terms = terms
            .into_iter()
            .map(|(s, t)| {
                let t = t
                    .iter()
                    .map(|v| match v.finite() {
                        Some(q) => IntCost(0, (q.numer() * (&lcm / q.denom())).to_i128().unwrap()),
                        None => IntCost::inf(),
                    })
                    .collect();
                (s, t)
            })
            .collect();
        Compiled::Int { terms: int_terms, scale: lcm }
    } else {
        Compiled::Big { terms }
    }
}

fn int_to_ext(c: &IntCost, scale: &BigInt) -> ExtValue {
    if c.is_inf() {
        ExtValue::Inf
    } else {
        ExtValue::Fin(BigRational::new(BigInt::from(c.1), scale.clone()))
    }
}

fn total_assignments(n: usize, d: usize, cap: u64) -> Result<usize> {
    match checked_pow(d, n) {
        Some(t) if t as u128 <= cap as u128 => Ok(t),
        _ => Err(Error::Budget(format!(
            "{d}^{n} assignments exceed the brute-force cap of {cap}"
        ))),
    }
}

/// Visits every assignment in lexicographic order, chunked in parallel, and
/// merges per-chunk accumulators in order.
fn fold_assignments<C: Cost, A: Send>(
    n: usize,
    d: usize,
    total: usize,
    terms: &Terms<C>,
    init: impl Fn() -> A + Sync + Send,
    step: impl Fn(&mut A, usize, &[usize], C) + Sync + Send,
    merge: impl Fn(A, A) -> A + Sync + Send,
) -> A {
    let chunks = total.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * CHUNK;
            let end = (start + CHUNK).min(total);
            let mut acc = init();
            let mut a = index_tuple(d, n, start);
            for idx in start..end {
                let mut cost = C::zero();
                for (scope, table) in terms {
                    let k = scope.iter().fold(0, |k, &v| k * d + a[v]);
                    cost = cost.plus(&table[k]);
                    if cost.is_inf() {
                        break;
                    }
                }
                step(&mut acc, idx, &a, cost);
                for x in a.iter_mut().rev() {
                    *x += 1;
                    if *x < d {
                        break;
                    }
                    *x = 0;
                }
            }
            acc
        })
        .reduce(&init, &merge)
}

fn best<C: Cost>(n: usize, d: usize, total: usize, terms: &Terms<C>) -> Option<(C, usize)> {
    let keep = |a: Option<(C, usize)>, b: Option<(C, usize)>| match (a, b) {
        (Some(x), Some(y)) => Some(if y < x { y } else { x }),
        (x, None) => x,
        (None, y) => y,
    };
    fold_assignments(
        n,
        d,
        total,
        terms,
        || None,
        |acc, idx, _, cost| {
            let cand = Some((cost, idx));
            *acc = keep(acc.take(), cand);
        },
        keep,
    )
}

fn projected<C: Cost>(n: usize, d: usize, total: usize, terms: &Terms<C>, v: &[usize]) -> Vec<C> {
    let width = d.pow(v.len() as u32);
    fold_assignments(
        n,
        d,
        total,
        terms,
        || vec![C::inf(); width],
        |acc, _, a, cost| {
            let k = v.iter().fold(0, |k, &x| k * d + a[x]);
            if cost < acc[k] {
                acc[k] = cost;
            }
        },
        |mut x, y| {
            for (p, q) in x.iter_mut().zip(y) {
                if q < *p {
                    *p = q;
                }
            }
            x
        },
    )
}

/// Weighted tables `w · γ` paired with their scope vertices.
pub(crate) fn weighted_terms(inst: &PlaneInstance, scopes: &[Vec<usize>]) -> Vec<(Vec<usize>, Vec<ExtValue>)> {
    inst.constraints
        .iter()
        .zip(scopes)
        .map(|(c, s)| {
            let rel = inst.relation(c).expect("validated");
            (s.clone(), rel.table().iter().map(|v| v.scaled(&c.weight)).collect())
        })
        .collect()
}

/// Minimum over assignments with `s(v) = x`, for every `x`, in index order.
pub(crate) fn pi_table(
    n: usize,
    d: usize,
    terms: Vec<(Vec<usize>, Vec<ExtValue>)>,
    v: &[usize],
    cap: u64,
) -> Result<Vec<ExtValue>> {
    let total = total_assignments(n, d, cap)?;
    Ok(match compile(terms) {
        Compiled::Int { terms, scale } => {
            projected(n, d, total, &terms, v).iter().map(|c| int_to_ext(c, &scale)).collect()
        }
        Compiled::Big { terms } => projected(n, d, total, &terms, v),
    })
}

struct Factor {
    vars: Vec<usize>,
    table: Vec<ExtValue>,
}

impl Factor {
    fn from_term(d: usize, scope: &[usize], table: &[ExtValue]) -> Factor {
        let mut vars = scope.to_vec();
        vars.sort_unstable();
        vars.dedup();
        let width = d.pow(vars.len() as u32);
        let table = (0..width)
            .map(|k| {
                let a = index_tuple(d, vars.len(), k);
                let idx = scope.iter().fold(0, |acc, x| {
                    let p = vars.binary_search(x).expect("scope var");
                    acc * d + a[p]
                });
                table[idx].clone()
            })
            .collect();
        Factor { vars, table }
    }

    fn value(&self, d: usize, vars: &[usize], a: &[usize]) -> &ExtValue {
        let k = self.vars.iter().fold(0, |k, x| k * d + a[vars.binary_search(x).expect("var")]);
        &self.table[k]
    }
}

/// Sums `parts` over the union of their variables, then minimises `drop` out if given.
fn combine(d: usize, parts: &[Factor], drop: Option<usize>, cap: u64) -> Result<Factor> {
    let mut vars: Vec<usize> = parts.iter().flat_map(|f| f.vars.iter().copied()).collect();
    vars.sort_unstable();
    vars.dedup();
    match checked_pow(d, vars.len()) {
        Some(w) if w as u128 <= cap as u128 => {}
        _ => {
            return Err(Error::Budget(format!(
                "elimination needs a factor over {} variables, above the cap of {cap}",
                vars.len()
            )))
        }
    }
    let keep: Vec<usize> = vars.iter().copied().filter(|&x| Some(x) != drop).collect();
    let mut table = vec![ExtValue::Inf; d.pow(keep.len() as u32)];
    for k in 0..d.pow(vars.len() as u32) {
        let a = index_tuple(d, vars.len(), k);
        let mut cost = ExtValue::zero();
        for f in parts {
            cost = &cost + f.value(d, &vars, &a);
            if cost.is_inf() {
                break;
            }
        }
        let j = keep.iter().fold(0, |j, x| j * d + a[vars.binary_search(x).unwrap()]);
        if cost < table[j] {
            table[j] = cost;
        }
    }
    Ok(Factor { vars: keep, table })
}

/// Same result as [`pi_table`], computed by min-sum variable elimination in
/// min-degree order; only the factor sizes are bounded by `cap`.
pub(crate) fn pi_eliminate(
    n: usize,
    d: usize,
    terms: Vec<(Vec<usize>, Vec<ExtValue>)>,
    v: &[usize],
    cap: u64,
) -> Result<Vec<ExtValue>> {
    let mut factors: Vec<Factor> = terms.iter().map(|(s, t)| Factor::from_term(d, s, t)).collect();
    let mut boundary = v.to_vec();
    boundary.sort_unstable();
    boundary.dedup();
    let mut pending: Vec<usize> = (0..n).filter(|x| boundary.binary_search(x).is_err()).collect();
    while !pending.is_empty() {
        let degree = |x: usize| {
            let mut nb: Vec<usize> = factors
                .iter()
                .filter(|f| f.vars.contains(&x))
                .flat_map(|f| f.vars.iter().copied())
                .collect();
            nb.sort_unstable();
            nb.dedup();
            nb.len()
        };
        let (pos, &x) = pending
            .iter()
            .enumerate()
            .min_by_key(|&(_, &x)| (degree(x), x))
            .expect("non-empty");
        pending.remove(pos);
        let (touch, rest): (Vec<Factor>, Vec<Factor>) = factors.into_iter().partition(|f| f.vars.contains(&x));
        factors = rest;
        if !touch.is_empty() {
            factors.push(combine(d, &touch, Some(x), cap)?);
        }
    }
    let mut all = factors;
    all.push(Factor { vars: boundary.clone(), table: vec![ExtValue::zero(); d.pow(boundary.len() as u32)] });
    let joint = combine(d, &all, None, cap)?;
    let width = d.pow(v.len() as u32);
    Ok((0..width)
        .map(|k| {
            let t = index_tuple(d, v.len(), k);
            let mut a = vec![usize::MAX; boundary.len()];
            for (x, &val) in v.iter().zip(&t) {
                let p = boundary.binary_search(x).unwrap();
                if a[p] != usize::MAX && a[p] != val {
                    return ExtValue::Inf;
                }
                a[p] = val;
            }
            joint.value(d, &boundary, &a).clone()
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Solution {
    pub optimum: ExtValue,
    pub assignment: Option<Vec<usize>>,
}

pub fn solve(inst: &PlaneInstance) -> Result<Solution> {
    solve_with_cap(inst, DEFAULT_CAP)
}

/// Exact minimum of the objective and the lexicographically smallest optimal assignment.
pub fn solve_with_cap(inst: &PlaneInstance, cap: u64) -> Result<Solution> {
    let (_, scopes) = inst.checked()?;
    let n = inst.graph.vertices;
    let d = inst.domain_size;
    let total = total_assignments(n, d, cap)?;
    let terms = weighted_terms(inst, &scopes);
    let (value, idx) = match compile(terms) {
        Compiled::Int { terms, scale } => {
            let (c, i) = best(n, d, total, &terms).expect("at least one assignment");
            (int_to_ext(&c, &scale), i)
        }
        Compiled::Big { terms } => best(n, d, total, &terms).expect("at least one assignment"),
    };
    if value.is_inf() {
        return Ok(Solution { optimum: ExtValue::Inf, assignment: None });
    }
    Ok(Solution { optimum: value, assignment: Some(index_tuple(d, n, idx)) })
}
