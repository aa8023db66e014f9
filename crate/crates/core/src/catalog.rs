//! Named relations and operations used throughout the classifiers and tests.

use crate::relation::{Language, MultimorphismCandidate, NamedRelation, OpTable, WeightedRelation};
use crate::value::ExtValue;

fn inf_or_zero(feasible: bool) -> ExtValue {
    if feasible { ExtValue::zero() } else { ExtValue::Inf }
}

fn unary(v0: ExtValue, v1: ExtValue) -> WeightedRelation {
    WeightedRelation::new(2, 1, vec![v0, v1]).expect("unary")
}

pub fn rho0() -> WeightedRelation {
    WeightedRelation::crisp(2, 1, &[&[0]])
}

pub fn rho1() -> WeightedRelation {
    WeightedRelation::crisp(2, 1, &[&[1]])
}

/// Crisp unary `{a}` on an arbitrary domain.
pub fn rho_const(d: usize, a: usize) -> WeightedRelation {
    WeightedRelation::from_fn(d, 1, |t| inf_or_zero(t[0] == a))
}

/// Crisp unary relation whose feasible labels are `subset`.
pub fn rho_subset(d: usize, subset: &[usize]) -> WeightedRelation {
    WeightedRelation::from_fn(d, 1, |t| inf_or_zero(subset.contains(&t[0])))
}

pub fn rho_eq() -> WeightedRelation {
    rho_eq_on(2)
}

pub fn rho_eq_on(d: usize) -> WeightedRelation {
    WeightedRelation::from_fn(d, 2, |t| inf_or_zero(t[0] == t[1]))
}

pub fn rho_neq() -> WeightedRelation {
    WeightedRelation::from_fn(2, 2, |t| inf_or_zero(t[0] != t[1]))
}

pub fn rho_1in3() -> WeightedRelation {
    WeightedRelation::from_fn(2, 3, |t| inf_or_zero(t.iter().sum::<usize>() == 1))
}

pub fn rho_nae() -> WeightedRelation {
    WeightedRelation::from_fn(2, 3, |t| inf_or_zero(!(t[0] == t[1] && t[1] == t[2])))
}

pub fn rho_cross() -> WeightedRelation {
    WeightedRelation::crisp(2, 4, &[&[0, 0, 0, 0], &[0, 1, 0, 1], &[1, 0, 1, 0], &[1, 1, 1, 1]])
}

pub fn rho_nand() -> WeightedRelation {
    WeightedRelation::from_fn(2, 2, |t| inf_or_zero(!(t[0] == 1 && t[1] == 1)))
}

/// γ₀(0) = 0, γ₀(1) = 1.
pub fn gamma0() -> WeightedRelation {
    unary(ExtValue::zero(), ExtValue::one())
}

/// γ₁(0) = 1, γ₁(1) = 0. Also the `x ↦ 1 − x` unary of the independent-set language.
pub fn gamma1() -> WeightedRelation {
    unary(ExtValue::one(), ExtValue::zero())
}

pub fn gamma_neq() -> WeightedRelation {
    WeightedRelation::from_fn(2, 2, |t| if t[0] != t[1] { ExtValue::zero() } else { ExtValue::one() })
}

pub fn gamma_cut() -> WeightedRelation {
    gamma_neq()
}

/// γ_imp(1,0) = 1, all other entries 0.
pub fn gamma_imp() -> WeightedRelation {
    WeightedRelation::from_fn(2, 2, |t| if t == [1, 0] { ExtValue::one() } else { ExtValue::zero() })
}

/// Proper colouring on `k` colours: 0 off the diagonal, ∞ on it.
pub fn gamma_col(k: usize) -> WeightedRelation {
    WeightedRelation::from_fn(k, 2, |t| inf_or_zero(t[0] != t[1]))
}

pub fn op_const(a: usize) -> OpTable {
    OpTable::from_fn(2, 1, |_| a)
}

pub fn op_neg() -> OpTable {
    OpTable::from_fn(2, 1, |t| 1 - t[0])
}

pub fn op_min() -> OpTable {
    OpTable::from_fn(2, 2, |t| t[0].min(t[1]))
}

pub fn op_max() -> OpTable {
    OpTable::from_fn(2, 2, |t| t[0].max(t[1]))
}

pub fn op_mnrt() -> OpTable {
    OpTable::from_fn(2, 3, |t| t[0] ^ t[1] ^ t[2])
}

pub fn op_mjrt() -> OpTable {
    OpTable::from_fn(2, 3, |t| usize::from(t.iter().sum::<usize>() >= 2))
}

fn mm(ops: Vec<OpTable>) -> MultimorphismCandidate {
    MultimorphismCandidate::new(ops).expect("well-formed candidate")
}

pub fn mm_c0() -> MultimorphismCandidate {
    mm(vec![op_const(0)])
}

pub fn mm_c1() -> MultimorphismCandidate {
    mm(vec![op_const(1)])
}

pub fn mm_neg() -> MultimorphismCandidate {
    mm(vec![op_neg()])
}

pub fn mm_min_min() -> MultimorphismCandidate {
    mm(vec![op_min(), op_min()])
}

pub fn mm_max_max() -> MultimorphismCandidate {
    mm(vec![op_max(), op_max()])
}

pub fn mm_min_max() -> MultimorphismCandidate {
    mm(vec![op_min(), op_max()])
}

pub fn mm_mnrt3() -> MultimorphismCandidate {
    mm(vec![op_mnrt(), op_mnrt(), op_mnrt()])
}

pub fn mm_mjrt3() -> MultimorphismCandidate {
    mm(vec![op_mjrt(), op_mjrt(), op_mjrt()])
}

pub fn mm_mjrt_mjrt_mnrt() -> MultimorphismCandidate {
    mm(vec![op_mjrt(), op_mjrt(), op_mnrt()])
}

/// The eight tractable Boolean multimorphisms, in the order they are checked.
pub fn eight_multimorphisms() -> Vec<(&'static str, MultimorphismCandidate)> {
    vec![
        ("c0", mm_c0()),
        ("c1", mm_c1()),
        ("min,min", mm_min_min()),
        ("max,max", mm_max_max()),
        ("min,max", mm_min_max()),
        ("mnrt,mnrt,mnrt", mm_mnrt3()),
        ("mjrt,mjrt,mjrt", mm_mjrt3()),
        ("mjrt,mjrt,mnrt", mm_mjrt_mjrt_mnrt()),
    ]
}

/// Looks up a Boolean operation by name (`c0`, `c1`, `neg`, `min`, `max`, `mnrt`, `mjrt`).
pub fn op_by_name(name: &str) -> Option<OpTable> {
    Some(match name {
        "c0" => op_const(0),
        "c1" => op_const(1),
        "neg" => op_neg(),
        "min" => op_min(),
        "max" => op_max(),
        "mnrt" => op_mnrt(),
        "mjrt" => op_mjrt(),
        _ => return None,
    })
}

/// Catalog relations by name; `gamma_col_k` is the colouring relation on `k` labels.
pub fn relation_by_name(name: &str) -> Option<WeightedRelation> {
    Some(match name {
        "rho0" => rho0(),
        "rho1" => rho1(),
        "rho_eq" => rho_eq(),
        "rho_neq" => rho_neq(),
        "rho_1in3" => rho_1in3(),
        "rho_nae" => rho_nae(),
        "rho_cross" => rho_cross(),
        "rho_nand" => rho_nand(),
        "gamma0" => gamma0(),
        "gamma1" => gamma1(),
        "gamma_neq" => gamma_neq(),
        "gamma_cut" => gamma_cut(),
        "gamma_imp" => gamma_imp(),
        other => {
            let k: usize = other.strip_prefix("gamma_col_")?.parse().ok()?;
            if k == 0 {
                return None;
            }
            gamma_col(k)
        }
    })
}

pub const RELATION_NAMES: &[&str] = &[
    "rho0", "rho1", "rho_eq", "rho_neq", "rho_1in3", "rho_nae", "rho_cross", "rho_nand", "gamma0",
    "gamma1", "gamma_neq", "gamma_cut", "gamma_imp",
];

fn lang(rels: Vec<(&str, WeightedRelation)>) -> Language {
    let d = rels[0].1.domain_size();
    Language::new(
        d,
        rels.into_iter().map(|(n, r)| NamedRelation { name: n.into(), relation: r }).collect(),
    )
    .expect("catalog language")
}

pub fn lang_nae() -> Language {
    lang(vec![("rho_nae", rho_nae())])
}

pub fn lang_cut() -> Language {
    lang(vec![("gamma_cut", gamma_cut())])
}

pub fn lang_is() -> Language {
    lang(vec![("rho_nand", rho_nand()), ("one_minus_x", gamma1())])
}

pub fn lang_imp() -> Language {
    lang(vec![("gamma_imp", gamma_imp())])
}

pub fn lang_cut_gamma0() -> Language {
    lang(vec![("gamma_cut", gamma_cut()), ("gamma0", gamma0())])
}

pub fn lang_col(k: usize) -> Language {
    lang(vec![("gamma_col", gamma_col(k))])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_in_three_has_three_tuples() {
        let r = rho_1in3();
        assert_eq!(r.feasible_tuples(), vec![vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]]);
    }

    #[test]
    fn documented_entries() {
        assert_eq!(gamma_neq().get(&[0, 0]), &ExtValue::one());
        assert_eq!(gamma_neq().get(&[0, 1]), &ExtValue::zero());
        assert_eq!(gamma_cut().get(&[0, 0]), &ExtValue::one());
        assert_eq!(gamma_cut().get(&[0, 1]), &ExtValue::zero());
        assert_eq!(rho_nae().get(&[1, 1, 1]), &ExtValue::Inf);
        assert_eq!(op_mjrt().apply(&[0, 0, 1]), 0);
        assert_eq!(gamma_imp().table(), &[
            ExtValue::zero(),
            ExtValue::zero(),
            ExtValue::one(),
            ExtValue::zero()
        ]);
    }

    #[test]
    fn names_resolve() {
        for n in RELATION_NAMES {
            assert!(relation_by_name(n).is_some(), "{n}");
        }
        assert_eq!(relation_by_name("gamma_col_3").unwrap().domain_size(), 3);
        assert!(relation_by_name("gamma_col_0").is_none());
        assert!(relation_by_name("nope").is_none());
    }

    #[test]
    fn boolean_ops_are_conservative_except_constants_and_negation() {
        for f in [op_min(), op_max(), op_mnrt(), op_mjrt()] {
            assert!(f.is_conservative());
        }
        assert!(!op_const(0).is_conservative());
        assert!(!op_neg().is_conservative());
    }
}
