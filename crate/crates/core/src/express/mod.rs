//! Planar expressibility: table semantics of the closure operations, π_v,
//! the Opt-by-scaling transformation, derivations and their plane realizations.

pub mod bits;
mod derivation;
mod realize;

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::plane::{self, PlaneInstance};
use crate::relation::{self, WeightedRelation};
use crate::value::ExtValue;

pub use derivation::Derivation;
pub use realize::{check_realization, realize, Realization, RealizationCheck};

fn need_coord(g: &WeightedRelation, i: usize) -> Result<()> {
    if i >= g.arity() {
        return Err(invalid(format!("coordinate {i} out of range for arity {}", g.arity())));
    }
    Ok(())
}

fn need_binary_plus(g: &WeightedRelation, what: &str) -> Result<()> {
    if g.arity() < 2 {
        return Err(invalid(format!("{what} needs arity at least 2")));
    }
    Ok(())
}

fn need_boolean(g: &WeightedRelation, what: &str) -> Result<()> {
    if g.domain_size() != 2 {
        return Err(invalid(format!("{what} is defined on the Boolean domain only")));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Restriction {
    Domain { subset: Vec<usize> },
    Pin { label: usize },
    EqRestrict,
    NeqRestrict,
}

pub fn apply_restriction(g: &WeightedRelation, kind: &Restriction, i: usize) -> Result<WeightedRelation> {
    match kind {
        Restriction::Domain { subset } => domain_restrict(g, i, subset),
        Restriction::Pin { label } => pin(g, i, *label),
        Restriction::EqRestrict => eq_restrict(g, i),
        Restriction::NeqRestrict => neq_restrict(g, i),
    }
}

/// Entries with `x_i ∉ subset` become ∞.
pub fn domain_restrict(g: &WeightedRelation, i: usize, subset: &[usize]) -> Result<WeightedRelation> {
    need_coord(g, i)?;
    if subset.iter().any(|&a| a >= g.domain_size()) {
        return Err(invalid("restriction subset contains a label outside the domain"));
    }
    Ok(WeightedRelation::from_fn(g.domain_size(), g.arity(), |t| {
        if subset.contains(&t[i]) { g.get(t).clone() } else { ExtValue::Inf }
    }))
}

fn insert_at(t: &[usize], i: usize, a: usize) -> Vec<usize> {
    let mut full = Vec::with_capacity(t.len() + 1);
    full.extend_from_slice(&t[..i]);
    full.push(a);
    full.extend_from_slice(&t[i..]);
    full
}

/// Fixes coordinate `i` to `a` and drops it.
pub fn pin(g: &WeightedRelation, i: usize, a: usize) -> Result<WeightedRelation> {
    need_coord(g, i)?;
    need_binary_plus(g, "pinning")?;
    if a >= g.domain_size() {
        return Err(invalid(format!("label {a} outside the domain")));
    }
    Ok(WeightedRelation::from_fn(g.domain_size(), g.arity() - 1, |t| g.get(&insert_at(t, i, a)).clone()))
}

/// Minimum over coordinate `i`, which is dropped.
pub fn minimise(g: &WeightedRelation, i: usize) -> Result<WeightedRelation> {
    need_coord(g, i)?;
    need_binary_plus(g, "minimisation")?;
    let d = g.domain_size();
    Ok(WeightedRelation::from_fn(d, g.arity() - 1, |t| {
        (0..d).map(|a| g.get(&insert_at(t, i, a)).clone()).min().expect("non-empty domain")
    }))
}

fn adjacent_restrict(g: &WeightedRelation, i: usize, equal: bool) -> Result<WeightedRelation> {
    need_coord(g, i)?;
    need_binary_plus(g, "=/≠-restriction")?;
    let j = (i + 1) % g.arity();
    Ok(WeightedRelation::from_fn(g.domain_size(), g.arity(), |t| {
        if (t[i] == t[j]) == equal { g.get(t).clone() } else { ExtValue::Inf }
    }))
}

/// Entries with `x_i ≠ x_{i+1}` (indices cyclic) become ∞.
pub fn eq_restrict(g: &WeightedRelation, i: usize) -> Result<WeightedRelation> {
    adjacent_restrict(g, i, true)
}

/// Entries with `x_i = x_{i+1}` (indices cyclic) become ∞.
pub fn neq_restrict(g: &WeightedRelation, i: usize) -> Result<WeightedRelation> {
    adjacent_restrict(g, i, false)
}

/// `γ'(x) = γ(x ⊕ e_i)` on the Boolean domain.
pub fn twist(g: &WeightedRelation, i: usize) -> Result<WeightedRelation> {
    need_coord(g, i)?;
    need_boolean(g, "twist")?;
    Ok(WeightedRelation::from_fn(2, g.arity(), |t| {
        let mut s = t.to_vec();
        s[i] ^= 1;
        g.get(&s).clone()
    }))
}

/// Join of two binary relations; `left_shared`/`right_shared` name the
/// coordinate of each argument that plays the hidden `z`. Result is `(x, y)`
/// with `x` the other coordinate of `left` and `y` the other of `right`.
pub fn join(
    left: &WeightedRelation,
    right: &WeightedRelation,
    left_shared: usize,
    right_shared: usize,
) -> Result<WeightedRelation> {
    if left.arity() != 2 || right.arity() != 2 {
        return Err(invalid("join needs two binary relations"));
    }
    if left.domain_size() != right.domain_size() {
        return Err(invalid("join arguments differ in domain"));
    }
    if left_shared > 1 || right_shared > 1 {
        return Err(invalid("join orientation must be 0 or 1"));
    }
    let d = left.domain_size();
    let arrange = |shared: usize, other: usize, z: usize| if shared == 0 { [z, other] } else { [other, z] };
    Ok(WeightedRelation::from_fn(d, 2, |t| {
        (0..d)
            .map(|z| left.get(&arrange(left_shared, t[0], z)) + right.get(&arrange(right_shared, t[1], z)))
            .min()
            .expect("non-empty domain")
    }))
}

/// `γ(x) + μ(x_i)`.
pub fn add_unary(g: &WeightedRelation, i: usize, mu: &WeightedRelation) -> Result<WeightedRelation> {
    need_coord(g, i)?;
    if mu.arity() != 1 || mu.domain_size() != g.domain_size() {
        return Err(invalid("add_unary needs a unary relation over the same domain"));
    }
    Ok(WeightedRelation::from_fn(g.domain_size(), g.arity(), |t| g.get(t) + mu.get(&[t[i]])))
}

/// `γ(x) + β(x_i, x_{i+1})` with cyclic indices.
pub fn add_binary(g: &WeightedRelation, i: usize, beta: &WeightedRelation) -> Result<WeightedRelation> {
    need_coord(g, i)?;
    need_binary_plus(g, "adding a binary relation")?;
    if beta.arity() != 2 || beta.domain_size() != g.domain_size() {
        return Err(invalid("add_binary needs a binary relation over the same domain"));
    }
    let j = (i + 1) % g.arity();
    Ok(WeightedRelation::from_fn(g.domain_size(), g.arity(), |t| g.get(t) + beta.get(&[t[i], t[j]])))
}

/// `(x, y) ↦ α(x) + β(y)`.
pub fn product(a: &WeightedRelation, b: &WeightedRelation) -> Result<WeightedRelation> {
    if a.domain_size() != b.domain_size() {
        return Err(invalid("product arguments differ in domain"));
    }
    let r = a.arity();
    Ok(WeightedRelation::from_fn(a.domain_size(), r + b.arity(), |t| a.get(&t[..r]) + b.get(&t[r..])))
}

/// A plane instance together with the outer-face tuple `v`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpressibleQuery {
    pub instance: PlaneInstance,
    pub v: Vec<usize>,
}

/// Checks that the outer walk reads `v_r … v_1` up to rotation and that no
/// constraint sits on the outer face.
pub fn check_query(q: &ExpressibleQuery) -> Result<()> {
    let inst = &q.instance;
    let (topo, _) = inst.checked()?;
    let outer = inst.graph.outer_face_id(&topo)?;
    if let Some(i) = inst.constraints.iter().position(|c| topo.face_of[c.anchor_dart] == outer) {
        return Err(invalid(format!("constraint {i} is placed on the outer face")));
    }
    if q.v.is_empty() {
        return Err(invalid("v must contain at least one vertex"));
    }
    let walk = &topo.faces[outer].vertex_walk;
    let rev: Vec<usize> = q.v.iter().rev().copied().collect();
    let n = walk.len();
    let matches = n == rev.len() && (0..n).any(|s| (0..n).all(|k| walk[(s + k) % n] == rev[k]));
    if !matches {
        return Err(invalid(format!(
            "outer walk {walk:?} does not read v in reverse ({rev:?}) up to rotation"
        )));
    }
    Ok(())
}

const ENUMERATE_BELOW: usize = 1 << 12;

/// `π_v(I)`: exhaustive enumeration for tiny instances, exact variable
/// elimination otherwise. `cap` bounds both the enumeration and every
/// intermediate factor.
pub fn pi_v_with_cap(q: &ExpressibleQuery, cap: u64) -> Result<WeightedRelation> {
    check_query(q)?;
    let inst = &q.instance;
    let (_, scopes) = inst.checked()?;
    let terms = plane::weighted_terms(inst, &scopes);
    let n = inst.graph.vertices;
    let d = inst.domain_size;
    // Elimination wins by far on gadget-sized instances; enumeration is kept
    // for tiny ones and as the fallback when a factor outgrows the cap.
    let small = relation::checked_pow(d, n).is_some_and(|t| t <= ENUMERATE_BELOW);
    let table = if small {
        plane::pi_table(n, d, terms, &q.v, cap)?
    } else {
        match plane::pi_eliminate(n, d, terms.clone(), &q.v, cap) {
            Ok(t) => t,
            Err(Error::Budget(_)) => plane::pi_table(n, d, terms, &q.v, cap)?,
            Err(e) => return Err(e),
        }
    };
    WeightedRelation::new(d, q.v.len(), table)
}

pub fn pi_v(q: &ExpressibleQuery) -> Result<WeightedRelation> {
    pi_v_with_cap(q, plane::DEFAULT_CAP)
}

fn range(g: &WeightedRelation) -> BigRational {
    match (g.min_value(), g.max_finite()) {
        (Some(lo), Some(hi)) => hi - lo,
        _ => BigRational::zero(),
    }
}

fn denominators_lcm<'a>(vals: impl Iterator<Item = &'a BigRational>) -> num_bigint::BigInt {
    vals.fold(num_bigint::BigInt::one(), |l, q| l.lcm(q.denom()))
}

/// Replaces constraint `idx`, read as `Opt(γ)`, by `(W/d + 1)·γ₀` where `γ₀`
/// is γ shifted to minimum 0, `d` its smallest positive value and `W` the
/// total range of the other constraints. A γ with one finite value gets
/// weight 0, i.e. becomes `Feas(γ) = Opt(γ)`.
pub fn opt_by_scaling(inst: &PlaneInstance, idx: usize) -> Result<PlaneInstance> {
    let c = inst
        .constraints
        .get(idx)
        .ok_or_else(|| invalid(format!("no constraint {idx}")))?;
    let g = inst
        .relation(c)
        .ok_or_else(|| invalid(format!("unknown relation {:?}", c.relation)))?;
    let vals = g.finite_values();
    let Some(lo) = vals.first().cloned() else {
        return Err(invalid("Opt of an all-infinite relation cannot be scaled"));
    };
    let mut out = inst.clone();
    let name = format!("{}~opt{idx}", c.relation);
    out.relations.insert(name.clone(), crate::ops::add_constant(g, &-lo.clone()));
    out.constraints[idx].relation = name;
    out.constraints[idx].scope = c.scope.clone();
    if vals.len() == 1 {
        out.constraints[idx].weight = BigRational::zero();
        return Ok(out);
    }
    let gap = &vals[1] - &lo;
    let mut w = BigRational::zero();
    for (k, other) in inst.constraints.iter().enumerate() {
        if k == idx {
            continue;
        }
        let rel = inst.relation(other).ok_or_else(|| invalid("unknown relation"))?;
        w += &other.weight * range(rel);
    }
    out.constraints[idx].weight = w / gap + BigRational::one();
    Ok(out)
}

/// Multiplier for an Opt subtree inside a larger gadget: `W·L + 1`, where
/// `1/L` bounds the gap between distinct values of the subtree objective.
pub(crate) fn nested_opt_multiplier<'a>(
    outside: impl Iterator<Item = (&'a BigRational, &'a WeightedRelation)>,
    inside: impl Iterator<Item = (&'a BigRational, &'a WeightedRelation)>,
) -> BigRational {
    let w: BigRational = outside.map(|(wt, g)| wt * range(g)).fold(BigRational::zero(), |a, b| a + b);
    let scaled: Vec<BigRational> = inside
        .flat_map(|(wt, g)| g.finite_values().into_iter().map(move |q| wt * q))
        .collect();
    let l = denominators_lcm(scaled.iter());
    w * BigRational::from_integer(l) + BigRational::one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::ops::opt;
    use crate::plane::fixtures;
    use crate::value::rat;

    #[test]
    fn eq_restrict_then_minimise_nae_gives_neq() {
        let g = eq_restrict(&catalog::rho_nae(), 0).unwrap();
        assert_eq!(minimise(&g, 0).unwrap(), catalog::rho_neq());
    }

    #[test]
    fn pin_and_domain_restrict_cut() {
        let p = pin(&catalog::gamma_cut(), 0, 0).unwrap();
        assert_eq!(p.table(), &[ExtValue::one(), ExtValue::zero()]);
        let r = domain_restrict(&catalog::gamma_cut(), 0, &[0]).unwrap();
        assert_eq!(r.get(&[1, 0]), &ExtValue::Inf);
        assert_eq!(r.get(&[1, 1]), &ExtValue::Inf);
        assert_eq!(r.get(&[0, 0]), &ExtValue::one());
    }

    #[test]
    fn minimise_cut_is_zero() {
        assert_eq!(minimise(&catalog::gamma_cut(), 1).unwrap(), WeightedRelation::constant(2, 1, ExtValue::zero()));
        assert!(minimise(&catalog::gamma0(), 0).is_err());
    }

    #[test]
    fn join_examples() {
        let eq = catalog::rho_eq();
        assert_eq!(join(&eq, &eq, 0, 0).unwrap(), eq);
        // a=0, b=1, c=2, s1=3, t1=4, s2=5, t2=6
        let r1 = WeightedRelation::crisp(7, 2, &[&[2, 3], &[0, 3], &[1, 4]]);
        let r2 = WeightedRelation::crisp(7, 2, &[&[1, 5], &[2, 5], &[0, 6]]);
        let j = join(&r1, &r2, 0, 0).unwrap();
        assert_eq!(j, WeightedRelation::crisp(7, 2, &[&[3, 5], &[3, 6], &[4, 5]]));
    }

    #[test]
    fn twist_examples() {
        let t = twist(&catalog::rho_nae(), 0).unwrap();
        for x in crate::relation::TupleIter::new(2, 3) {
            let bad = (x[0] == 0 && x[1] == 1 && x[2] == 1) || (x[0] == 1 && x[1] == 0 && x[2] == 0);
            assert_eq!(t.get(&x).is_inf(), bad, "{x:?}");
        }
        assert_eq!(twist(&catalog::gamma0(), 0).unwrap(), catalog::gamma1());
        let g = catalog::gamma_imp();
        assert_eq!(twist(&twist(&g, 1).unwrap(), 1).unwrap(), g);
        assert!(twist(&catalog::gamma_col(3), 0).is_err());
    }

    #[test]
    fn star_expresses_all_equal_relation() {
        let q = ExpressibleQuery { instance: fixtures::star(), v: fixtures::STAR_V.to_vec() };
        let rho = pi_v(&q).unwrap();
        let expected = WeightedRelation::from_fn(2, 3, |t| {
            if t[0] == t[1] && t[1] == t[2] { ExtValue::zero() } else { ExtValue::one() }
        });
        assert_eq!(rho, expected);
    }

    #[test]
    fn two_loops_express_equality() {
        let q = ExpressibleQuery { instance: fixtures::two_loops(), v: fixtures::TWO_LOOPS_V.to_vec() };
        assert_eq!(pi_v(&q).unwrap(), catalog::rho_eq());
    }

    #[test]
    fn query_must_match_outer_walk() {
        let q = ExpressibleQuery { instance: fixtures::star(), v: vec![2, 1, 0] };
        assert!(pi_v(&q).is_err());
        let rotated = ExpressibleQuery { instance: fixtures::star(), v: vec![1, 2, 0] };
        assert!(pi_v(&rotated).is_ok());
    }

    #[test]
    fn elimination_agrees_with_enumeration() {
        for (inst, v) in [
            (fixtures::star(), fixtures::STAR_V.to_vec()),
            (fixtures::two_loops(), fixtures::TWO_LOOPS_V.to_vec()),
        ] {
            let (_, scopes) = inst.checked().unwrap();
            let terms = plane::weighted_terms(&inst, &scopes);
            let n = inst.graph.vertices;
            let fast = plane::pi_eliminate(n, 2, terms, &v, 1 << 10).unwrap();
            let q = ExpressibleQuery { instance: inst, v };
            assert_eq!(&fast, pi_v(&q).unwrap().table());
        }
    }

    #[test]
    fn opt_scaling_multiplier() {
        let mut inst = fixtures::star();
        let two = WeightedRelation::from_fn(2, 2, |t| {
            if t[0] == t[1] { ExtValue::from_int(2) } else { ExtValue::zero() }
        });
        inst.relations.insert("two".into(), two);
        inst.constraints[0].relation = "two".into();
        inst.constraints[1].weight = rat(5, 2);
        inst.constraints[2].weight = rat(5, 2);
        let out = opt_by_scaling(&inst, 0).unwrap();
        assert_eq!(out.constraints[0].weight, rat(7, 2));

        let mut flat = fixtures::star();
        flat.relations.insert("flat".into(), catalog::rho_neq());
        flat.constraints[0].relation = "flat".into();
        let out = opt_by_scaling(&flat, 0).unwrap();
        assert_eq!(out.constraints[0].weight, BigRational::zero());

        let mut dead = fixtures::star();
        dead.relations.insert("dead".into(), WeightedRelation::constant(2, 2, ExtValue::Inf));
        dead.constraints[0].relation = "dead".into();
        assert!(opt_by_scaling(&dead, 0).is_err());
    }

    #[test]
    fn opt_scaling_preserves_optima_on_star() {
        let base = fixtures::star();
        let mut direct = base.clone();
        direct.relations.insert("opt_cut".into(), opt(&catalog::gamma_cut()));
        direct.constraints[0].relation = "opt_cut".into();
        let scaled = opt_by_scaling(&base, 0).unwrap();
        let v = fixtures::STAR_V.to_vec();
        let a = pi_v(&ExpressibleQuery { instance: direct, v: v.clone() }).unwrap();
        let b = pi_v(&ExpressibleQuery { instance: scaled, v }).unwrap();
        assert_eq!(opt(&a), opt(&b));
    }
}
