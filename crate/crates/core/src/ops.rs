//! Value-level operations and the polymorphism / multimorphism checker.

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::relation::{Language, MultimorphismCandidate, OpTable, WeightedRelation};
use crate::value::ExtValue;

pub const DEFAULT_MM_BUDGET: u64 = 100_000_000;

pub fn feas(g: &WeightedRelation) -> WeightedRelation {
    g.map_values(|v| if v.is_inf() { ExtValue::Inf } else { ExtValue::zero() })
}

pub fn opt(g: &WeightedRelation) -> WeightedRelation {
    match g.min_value().cloned() {
        None => g.clone(),
        Some(m) => g.map_values(|v| match v.finite() {
            Some(q) if *q == m => ExtValue::zero(),
            _ => ExtValue::Inf,
        }),
    }
}

pub fn scale(g: &WeightedRelation, c: &BigRational) -> Result<WeightedRelation> {
    if c.is_negative() {
        return Err(invalid(format!("scale factor {c} is negative")));
    }
    Ok(g.map_values(|v| v.scaled(c)))
}

pub fn add_constant(g: &WeightedRelation, c: &BigRational) -> WeightedRelation {
    if c.is_zero() {
        return g.clone();
    }
    g.map_values(|v| v.shifted(c))
}

/// Pointwise sum of two relations of equal shape.
pub fn sum(a: &WeightedRelation, b: &WeightedRelation) -> WeightedRelation {
    assert_eq!(a.arity(), b.arity());
    assert_eq!(a.domain_size(), b.domain_size());
    let table = a.table().iter().zip(b.table()).map(|(x, y)| x + y).collect();
    WeightedRelation::new(a.domain_size(), a.arity(), table).expect("same shape")
}

/// Applies `f` coordinatewise to `tuples` (k tuples of equal length r).
pub fn apply_componentwise(f: &OpTable, tuples: &[Vec<usize>]) -> Result<Vec<usize>> {
    if tuples.len() != f.arity {
        return Err(invalid(format!("{}-ary operation given {} tuples", f.arity, tuples.len())));
    }
    let r = tuples.first().map_or(0, |t| t.len());
    if tuples.iter().any(|t| t.len() != r) {
        return Err(invalid("tuples differ in length"));
    }
    if tuples.iter().flatten().any(|&x| x >= f.domain_size) {
        return Err(invalid("label outside the operation's domain"));
    }
    Ok(apply_unchecked(f, tuples))
}

fn apply_unchecked(f: &OpTable, tuples: &[Vec<usize>]) -> Vec<usize> {
    let r = tuples[0].len();
    let mut args = vec![0; tuples.len()];
    (0..r)
        .map(|c| {
            for (a, t) in args.iter_mut().zip(tuples) {
                *a = t[c];
            }
            f.apply(&args)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum PolyVerdict {
    Holds,
    Fails { relation: String, inputs: Vec<Vec<usize>>, image: Vec<usize> },
}

impl PolyVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, PolyVerdict::Holds)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MmFailure {
    pub relation: String,
    pub inputs: Vec<Vec<usize>>,
    pub images: Vec<Vec<usize>>,
    pub input_sum: ExtValue,
    pub image_sum: ExtValue,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum MmVerdict {
    Holds,
    HoldsWithEquality,
    Fails(MmFailure),
}

impl MmVerdict {
    /// True for both `Holds` and `HoldsWithEquality`.
    pub fn holds(&self) -> bool {
        !matches!(self, MmVerdict::Fails(_))
    }
}

fn check_domains(d: usize, lang: &Language) -> Result<()> {
    if d != lang.domain_size() {
        return Err(invalid(format!(
            "operation domain {d} differs from language domain {}",
            lang.domain_size()
        )));
    }
    Ok(())
}

fn work(lang: &Language, k: usize) -> u128 {
    lang.relations()
        .iter()
        .map(|nr| (nr.relation.feasible_indices().len() as u128).pow(k as u32))
        .sum()
}

/// Calls `visit` on every k-tuple of feasible indices in lexicographic order,
/// parallel over the first component, returning the first hit.
fn first_failure<T: Send>(
    feas: &[usize],
    k: usize,
    visit: impl Fn(&[usize]) -> Option<T> + Sync,
) -> Option<T> {
    if feas.is_empty() {
        return None;
    }
    let n = feas.len();
    (0..n).into_par_iter().find_map_first(|first| {
        let mut pos = vec![0usize; k];
        pos[0] = first;
        let mut pick = vec![0usize; k];
        loop {
            for (p, &q) in pick.iter_mut().zip(&pos) {
                *p = feas[q];
            }
            if let Some(hit) = visit(&pick) {
                return Some(hit);
            }
            let mut c = k;
            loop {
                if c == 1 {
                    return None;
                }
                c -= 1;
                pos[c] += 1;
                if pos[c] < n {
                    break;
                }
                pos[c] = 0;
            }
        }
    })
}

pub fn is_polymorphism(f: &OpTable, lang: &Language) -> Result<PolyVerdict> {
    check_domains(f.domain_size, lang)?;
    for nr in lang.relations() {
        let g = &nr.relation;
        let feas = g.feasible_indices();
        let hit = first_failure(&feas, f.arity, |pick| {
            let inputs: Vec<Vec<usize>> = pick.iter().map(|&i| g.tuple_at(i)).collect();
            let image = apply_unchecked(f, &inputs);
            (!g.is_feasible(&image)).then_some((inputs, image))
        });
        if let Some((inputs, image)) = hit {
            return Ok(PolyVerdict::Fails { relation: nr.name.clone(), inputs, image });
        }
    }
    Ok(PolyVerdict::Holds)
}

pub fn is_multimorphism(m: &MultimorphismCandidate, lang: &Language) -> Result<MmVerdict> {
    is_multimorphism_with_budget(m, lang, DEFAULT_MM_BUDGET)
}

pub fn is_multimorphism_with_budget(
    m: &MultimorphismCandidate,
    lang: &Language,
    budget: u64,
) -> Result<MmVerdict> {
    check_domains(m.domain_size(), lang)?;
    let k = m.k();
    let cost = work(lang, k);
    if cost > budget as u128 {
        return Err(Error::Budget(format!(
            "multimorphism check needs {cost} evaluations, budget is {budget}"
        )));
    }
    let mut strict = false;
    for nr in lang.relations() {
        let g = &nr.relation;
        let feas = g.feasible_indices();
        let sums = |pick: &[usize]| {
            let inputs: Vec<Vec<usize>> = pick.iter().map(|&i| g.tuple_at(i)).collect();
            let images: Vec<Vec<usize>> = m.ops.iter().map(|f| apply_unchecked(f, &inputs)).collect();
            let input_sum = pick.iter().fold(ExtValue::zero(), |acc, &i| &acc + g.at(i));
            let image_sum = images.iter().fold(ExtValue::zero(), |acc, t| &acc + g.get(t));
            (inputs, images, input_sum, image_sum)
        };
        let fail = first_failure(&feas, k, |pick| {
            let (inputs, images, input_sum, image_sum) = sums(pick);
            (image_sum > input_sum).then(|| MmFailure {
                relation: nr.name.clone(),
                inputs,
                images,
                input_sum,
                image_sum,
            })
        });
        if let Some(fail) = fail {
            return Ok(MmVerdict::Fails(fail));
        }
        if !strict {
            strict = first_failure(&feas, k, |pick| {
                let (_, _, input_sum, image_sum) = sums(pick);
                (image_sum < input_sum).then_some(())
            })
            .is_some();
        }
    }
    Ok(if strict { MmVerdict::Holds } else { MmVerdict::HoldsWithEquality })
}

/// `Pr_{i,j} ρ` for a crisp relation (0-based coordinates).
pub fn project(rho: &WeightedRelation, i: usize, j: usize) -> Result<WeightedRelation> {
    let r = rho.arity();
    if i >= r || j >= r {
        return Err(invalid(format!("projection coordinates ({i},{j}) out of range for arity {r}")));
    }
    if !rho.is_crisp() {
        return Err(invalid("projection requires a crisp relation"));
    }
    let d = rho.domain_size();
    let mut table = vec![ExtValue::Inf; d * d];
    for t in rho.feasible_tuples() {
        table[t[i] * d + t[j]] = ExtValue::zero();
    }
    WeightedRelation::new(d, 2, table)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum DecompVerdict {
    Yes,
    No { witness: Vec<usize> },
}

pub fn is_2_decomposable(rho: &WeightedRelation) -> Result<DecompVerdict> {
    if !rho.is_crisp() {
        return Err(invalid("2-decomposability requires a crisp relation"));
    }
    let r = rho.arity();
    let mut projections = Vec::new();
    for i in 0..r {
        for j in i + 1..r {
            projections.push((i, j, project(rho, i, j)?));
        }
    }
    for t in rho.tuples() {
        if rho.is_feasible(&t) {
            continue;
        }
        if projections.iter().all(|(i, j, p)| p.is_feasible(&[t[*i], t[*j]])) {
            // Unary coordinates are implied by the pairwise projections when r ≥ 2.
            if r >= 2 {
                return Ok(DecompVerdict::No { witness: t });
            }
        }
    }
    Ok(DecompVerdict::Yes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::value::{int, rat};

    fn lang(name: &str, g: WeightedRelation) -> Language {
        Language::from_pairs(g.domain_size(), vec![(name, g)]).unwrap()
    }

    #[test]
    fn feas_and_opt_basics() {
        let cut = catalog::gamma_cut();
        assert!(feas(&cut).table().iter().all(|v| v.is_zero()));
        assert_eq!(opt(&cut), catalog::rho_neq());
        assert_eq!(opt(&catalog::gamma1()), catalog::rho1());
        let empty = WeightedRelation::constant(2, 1, ExtValue::Inf);
        assert_eq!(opt(&empty), empty);
        assert_eq!(feas(&empty), empty);
        assert_eq!(feas(&catalog::rho_nae()), catalog::rho_nae());
    }

    #[test]
    fn scale_and_shift() {
        let cut = catalog::gamma_cut();
        assert!(scale(&cut, &int(-1)).is_err());
        assert_eq!(scale(&catalog::rho_nae(), &int(0)).unwrap(), catalog::rho_nae());
        let s = scale(&cut, &rat(5, 3)).unwrap();
        assert_eq!(s.get(&[0, 0]), &ExtValue::from_ratio(5, 3));
        assert_eq!(s.get(&[0, 1]), &ExtValue::zero());
        let sh = add_constant(&cut, &int(-1));
        assert_eq!(sh.get(&[1, 1]), &ExtValue::zero());
        assert_eq!(sh.get(&[1, 0]), &ExtValue::from_int(-1));
        let nae7 = add_constant(&catalog::rho_nae(), &int(7));
        assert_eq!(nae7.get(&[0, 0, 1]), &ExtValue::from_int(7));
        assert_eq!(nae7.get(&[1, 1, 1]), &ExtValue::Inf);
    }

    #[test]
    fn componentwise_examples() {
        let mn = catalog::op_min();
        assert_eq!(apply_componentwise(&mn, &[vec![0, 1], vec![1, 0]]).unwrap(), vec![0, 0]);
        let mnrt = catalog::op_mnrt();
        let t = apply_componentwise(&mnrt, &[vec![0, 1], vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(t, vec![1, 0]);
        let e2 = OpTable::projection(2, 3, 1);
        let xs = vec![vec![0, 0, 1], vec![1, 1, 0], vec![0, 1, 1]];
        assert_eq!(apply_componentwise(&e2, &xs).unwrap(), xs[1]);
        assert!(apply_componentwise(&mn, &[vec![0, 1]]).is_err());
    }

    #[test]
    fn polymorphism_examples() {
        let neq = lang("neq", catalog::rho_neq());
        match is_polymorphism(&catalog::op_min(), &neq).unwrap() {
            PolyVerdict::Fails { inputs, image, .. } => {
                assert_eq!(inputs, vec![vec![0, 1], vec![1, 0]]);
                assert_eq!(image, vec![0, 0]);
            }
            v => panic!("{v:?}"),
        }
        assert!(is_polymorphism(&catalog::op_mnrt(), &neq).unwrap().holds());
        assert!(is_polymorphism(&OpTable::projection(2, 3, 2), &lang("nae", catalog::rho_nae()))
            .unwrap()
            .holds());
    }

    #[test]
    fn multimorphism_examples() {
        let cut = lang("cut", catalog::gamma_cut());
        match is_multimorphism(&catalog::mm_min_max(), &cut).unwrap() {
            MmVerdict::Fails(f) => {
                assert_eq!(f.inputs, vec![vec![0, 1], vec![1, 0]]);
                assert_eq!(f.image_sum, ExtValue::from_int(2));
                assert_eq!(f.input_sum, ExtValue::zero());
            }
            v => panic!("{v:?}"),
        }
        assert_eq!(
            is_multimorphism(&catalog::mm_neg(), &cut).unwrap(),
            MmVerdict::HoldsWithEquality
        );
        let imp = lang("imp", catalog::gamma_imp());
        assert_eq!(is_multimorphism(&catalog::mm_min_max(), &imp).unwrap(), MmVerdict::Holds);
    }

    #[test]
    fn multimorphism_budget_is_enforced() {
        let nae = lang("nae", catalog::rho_nae());
        let err = is_multimorphism_with_budget(&catalog::mm_mjrt_mjrt_mnrt(), &nae, 10);
        assert!(matches!(err, Err(Error::Budget(_))));
    }

    #[test]
    fn projection_examples() {
        let p = project(&catalog::rho_1in3(), 0, 1).unwrap();
        assert_eq!(p, WeightedRelation::crisp(2, 2, &[&[0, 0], &[0, 1], &[1, 0]]));
        assert_eq!(project(&catalog::rho_cross(), 0, 2).unwrap(), catalog::rho_eq());
        assert_eq!(project(&catalog::rho_neq(), 0, 1).unwrap(), catalog::rho_neq());
        assert!(project(&catalog::rho_neq(), 0, 2).is_err());
    }

    #[test]
    fn decomposability_examples() {
        assert_eq!(is_2_decomposable(&catalog::rho_neq()).unwrap(), DecompVerdict::Yes);
        assert_eq!(is_2_decomposable(&catalog::rho0()).unwrap(), DecompVerdict::Yes);
        assert_eq!(
            is_2_decomposable(&catalog::rho_1in3()).unwrap(),
            DecompVerdict::No { witness: vec![0, 0, 0] }
        );
        assert_eq!(is_2_decomposable(&catalog::rho_cross()).unwrap(), DecompVerdict::Yes);
    }
}
