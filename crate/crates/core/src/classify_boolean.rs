//! Boolean languages: the eight tractable multimorphisms, self-complementarity,
//! and the constructive pipeline producing ρ₀, ρ₁, ρ≠ and ρ_1-in-3 gadgets.
//!
//! Every step starts from a violating relation found in a bounded saturation
//! and shrinks it greedily with pinning, minimisation and =/≠-restriction
//! followed by minimisation, keeping the violation. A relation on which no
//! move keeps the violation has the small shapes the hardness arguments
//! predict; each shape is checked before use and every result is replayed.

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::catalog;
use crate::closure::{saturate, swap_witness, Budget, SaturatedSet};
use crate::error::{invalid, Error, Result};
use crate::express::{self, bits, check_realization, Derivation, RealizationCheck};
use crate::ops::{self, is_multimorphism, is_polymorphism, MmVerdict};
use crate::plane::DEFAULT_CAP;
use crate::relation::{Language, MultimorphismCandidate, OpTable, TuplePartition, WeightedRelation};
use crate::value::ExtValue;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gadget {
    pub target: String,
    pub derivation: Derivation,
    pub realization: RealizationCheck,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict")]
pub enum BooleanVerdict {
    Tractable { multimorphism: String, candidate: MultimorphismCandidate, check: MmVerdict },
    PlanarlyIntractable { gadgets: Vec<Gadget> },
    OpenSelfComplementary,
    BudgetExhausted { stage: String, reason: String, saturation_exhausted: bool },
}

fn need_boolean(lang: &Language) -> Result<()> {
    if lang.domain_size() != 2 {
        return Err(invalid("Boolean classification needs domain size 2"));
    }
    Ok(())
}

pub fn check_eight(lang: &Language) -> Result<Vec<(String, MmVerdict)>> {
    need_boolean(lang)?;
    catalog::eight_multimorphisms()
        .into_iter()
        .map(|(name, m)| Ok((name.to_string(), is_multimorphism(&m, lang)?)))
        .collect()
}

fn stuck(what: impl Into<String>) -> Error {
    Error::Budget(what.into())
}

#[derive(Clone, Debug)]
struct Found {
    rel: WeightedRelation,
    der: Derivation,
}

impl Found {
    fn new(der: Derivation, lang: &Language) -> Result<Found> {
        Ok(Found { rel: der.replay(lang)?, der })
    }
}

fn single(g: &WeightedRelation) -> Language {
    Language::from_pairs(2, vec![("g", g.clone())]).expect("one relation")
}

fn violates_poly(g: &WeightedRelation, f: &OpTable) -> bool {
    g.is_crisp() && !is_polymorphism(f, &single(g)).map(|v| v.holds()).unwrap_or(true)
}

fn violates_mm(g: &WeightedRelation, m: &MultimorphismCandidate) -> bool {
    !is_multimorphism(m, &single(g)).map(|v| v.holds()).unwrap_or(true)
}

fn non_crisp(g: &WeightedRelation) -> bool {
    let vals = g.finite_values();
    vals.iter().any(|v| v != &vals[0])
}

fn fin(v: &ExtValue) -> Result<BigRational> {
    v.finite().cloned().ok_or_else(|| stuck("expected a finite value"))
}

/// Helper relations available to the descent moves.
#[derive(Clone, Default)]
struct Tools {
    rho0: Option<Derivation>,
    rho1: Option<Derivation>,
    neq: Option<Derivation>,
}

impl Tools {
    fn constant(&self, a: usize) -> Option<&Derivation> {
        if a == 0 { self.rho0.as_ref() } else { self.rho1.as_ref() }
    }

    fn need_neq(&self) -> Result<&Derivation> {
        self.neq.as_ref().ok_or_else(|| stuck("≠ is not available"))
    }

    fn twist(&self, f: Found, i: usize) -> Result<Found> {
        let via = self.need_neq()?.clone();
        Ok(Found { rel: express::twist(&f.rel, i)?, der: f.der.twist(i, via) })
    }

    fn pin(&self, f: Found, i: usize, a: usize) -> Result<Found> {
        let via = self.constant(a).ok_or_else(|| stuck("constants are not available"))?.clone();
        Ok(Found { rel: express::pin(&f.rel, i, a)?, der: f.der.pin(i, a, via) })
    }

    fn moves(&self, f: &Found) -> Vec<Found> {
        let r = f.rel.arity();
        let mut out = Vec::new();
        if r < 2 {
            return out;
        }
        for i in 0..r {
            if let Ok(rel) = express::minimise(&f.rel, i) {
                out.push(Found { rel, der: f.der.clone().minimise(i) });
            }
            if let Ok(rel) = express::eq_restrict(&f.rel, i).and_then(|g| express::minimise(&g, i)) {
                out.push(Found { rel, der: f.der.clone().eq_restrict(i).minimise(i) });
            }
            if let Some(neq) = &self.neq {
                if let Ok(rel) = express::neq_restrict(&f.rel, i).and_then(|g| express::minimise(&g, i)) {
                    out.push(Found { rel, der: f.der.clone().neq_restrict(i, neq.clone()).minimise(i) });
                }
            }
            for a in 0..2 {
                if self.constant(a).is_some() {
                    if let Ok(p) = self.pin(f.clone(), i, a) {
                        out.push(p);
                    }
                }
            }
        }
        out
    }

    /// Takes the first move keeping `keep` until none does.
    fn descend(&self, mut f: Found, keep: &dyn Fn(&WeightedRelation) -> bool) -> Found {
        while let Some(next) = self.moves(&f).into_iter().find(|m| keep(&m.rel)) {
            f = next;
        }
        f
    }
}

/// Saturated relations whose derivations can be realized, smallest arity first.
fn pool(s: &SaturatedSet) -> Vec<Found> {
    let mut out: Vec<Found> = s
        .entries
        .iter()
        .filter(|e| e.derivation.realizable())
        .map(|e| Found { rel: e.relation.clone(), der: e.derivation.clone() })
        .collect();
    out.sort_by_key(|f| f.rel.arity());
    out
}

fn first(pool: &[Found], keep: &dyn Fn(&WeightedRelation) -> bool) -> Option<Found> {
    pool.iter().find(|f| keep(&f.rel)).cloned()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Constants {
    Both { rho0: Derivation, rho1: Derivation },
    Neq { rho_neq: Derivation },
}

/// A crisp relation missing the all-`a` tuple, shrunk to `ρ_{1-a}` or `ρ≠`.
fn constant_branch(p: &[Found], a: usize) -> Result<Found> {
    let keep = move |g: &WeightedRelation| {
        g.is_crisp() && !g.feasible_indices().is_empty() && !g.is_feasible(&vec![a; g.arity()])
    };
    let start = first(p, &keep).ok_or_else(|| stuck(format!("no relation without the all-{a} tuple")))?;
    let end = Tools::default().descend(start, &keep);
    let want_const = catalog::rho_const(2, 1 - a);
    if end.rel == want_const || end.rel == catalog::rho_neq() {
        Ok(end)
    } else {
        Err(stuck(format!("constant descent ended at an unexpected relation {}", end.rel.encode())))
    }
}

pub fn derive_constants(lang: &Language, s: &SaturatedSet) -> Result<Constants> {
    need_boolean(lang)?;
    let p = pool(s);
    let from_zero = constant_branch(&p, 0)?;
    if from_zero.rel == catalog::rho_neq() {
        return Ok(Constants::Neq { rho_neq: from_zero.der });
    }
    let from_one = constant_branch(&p, 1)?;
    if from_one.rel == catalog::rho_neq() {
        return Ok(Constants::Neq { rho_neq: from_one.der });
    }
    Ok(Constants::Both { rho0: from_one.der, rho1: from_zero.der })
}

/// `(0, v)` as a derivation from γ₀ and γ₁; `None` for `v = 0`.
fn spike_one(v: &BigRational, g0: &Derivation, g1: &Derivation) -> Option<Derivation> {
    if v.is_zero() {
        None
    } else if v > &BigRational::zero() {
        Some(if v.is_one() { g0.clone() } else { g0.clone().scale(v.clone()) })
    } else {
        let m = -v.clone();
        let scaled = if m.is_one() { g1.clone() } else { g1.clone().scale(m) };
        Some(scaled.add_const(v.clone()))
    }
}

/// From a binary `γ` with `γ(0,1)+γ(1,0) < γ(0,0)+γ(1,1)`, all finite, builds γ≠.
fn gamma_neq_from(g: &Found, g0: &Derivation, g1: &Derivation, lang: &Language) -> Result<Found> {
    let v = |a: usize, b: usize| fin(g.rel.get(&[a, b]));
    let (a, b, p, q) = (v(0, 0)?, v(1, 1)?, v(0, 1)?, v(1, 0)?);
    let gap = &a + &b - &p - &q;
    if gap <= BigRational::zero() {
        return Err(stuck("binary relation does not violate the min/max inequality"));
    }
    let c = BigRational::from_integer(2.into()) / gap;
    let t = BigRational::one() - &c * &a;
    let mut der = g.der.clone();
    if !c.is_one() {
        der = der.scale(c.clone());
    }
    if !t.is_zero() {
        der = der.add_const(t.clone());
    }
    let at_10 = &c * &q + &t;
    let at_01 = &c * &p + &t;
    if let Some(mu) = spike_one(&-at_10, g0, g1) {
        der = der.add_unary(0, mu);
    }
    if let Some(mu) = spike_one(&-at_01, g0, g1) {
        der = der.add_unary(1, mu);
    }
    let out = Found::new(der, lang)?;
    if out.rel != catalog::gamma_neq() {
        return Err(stuck("unary correction did not produce γ≠"));
    }
    Ok(out)
}

/// Normalizes a unary with `μ(lo) < μ(1-lo)` to γ₀ (lo = 0) or γ₁ (lo = 1).
fn normalized_unary(mu: &Found, lang: &Language) -> Result<(usize, Found)> {
    let (m0, m1) = (fin(mu.rel.get(&[0]))?, fin(mu.rel.get(&[1]))?);
    if m0 == m1 {
        return Err(stuck("unary is constant"));
    }
    let (lo, low, high) = if m0 < m1 { (0, m0, m1) } else { (1, m1, m0) };
    let mut der = mu.der.clone();
    if !low.is_zero() {
        der = der.add_const(-low.clone());
    }
    let gap = high - low;
    if !gap.is_one() {
        der = der.scale(gap.recip());
    }
    Ok((lo, Found::new(der, lang)?))
}

struct Unaries {
    g0: Derivation,
    g1: Derivation,
}

/// γ₀ and γ₁ from a non-crisp relation of smallest arity.
fn weighted_unaries(p: &[Found], tools: &Tools, lang: &Language) -> Result<Unaries> {
    let start = first(p, &non_crisp).ok_or_else(|| stuck("no non-crisp relation"))?;
    let end = tools.descend(start, &non_crisp);
    if end.rel.arity() != 1 {
        return Err(stuck("non-crisp descent did not reach a unary"));
    }
    let (lo, g) = normalized_unary(&end, lang)?;
    let other = tools.twist(g.clone(), 0)?;
    Ok(if lo == 0 { Unaries { g0: g.der, g1: other.der } } else { Unaries { g0: other.der, g1: g.der } })
}

enum Side {
    Crisp(Found),
    Unary(Derivation),
}

/// One half of the ≠ construction. `low` is the label the operation favours
/// (0 for min, 1 for max).
fn min_max_side(p: &[Found], tools: &Tools, lang: &Language, low: usize) -> Result<Side> {
    let f = if low == 0 { catalog::op_min() } else { catalog::op_max() };
    let keep = |g: &WeightedRelation| violates_poly(g, &f);
    if let Some(start) = first(p, &keep) {
        let end = tools.descend(start, &keep);
        let r = &end.rel;
        let ok = r.arity() == 2
            && r.is_feasible(&[0, 1])
            && r.is_feasible(&[1, 0])
            && !r.is_feasible(&[low, low]);
        if !ok {
            return Err(stuck(format!("polymorphism descent ended at {}", r.encode())));
        }
        return Ok(Side::Crisp(end));
    }
    let m = MultimorphismCandidate::new(vec![f.clone(), f]).expect("binary pair");
    let keep = |g: &WeightedRelation| violates_mm(g, &m);
    let start = first(p, &keep).ok_or_else(|| stuck("no relation violating the doubled operation"))?;
    let end = tools.descend(start, &keep);
    if end.rel.arity() != 1 {
        return Err(stuck("multimorphism descent did not reach a unary"));
    }
    let (lo, g) = normalized_unary(&end, lang)?;
    if lo == low {
        return Err(stuck("unary favours the wrong label"));
    }
    Ok(Side::Unary(g.der))
}

/// A weighted relation violating ⟨min,max⟩ cut down to γ≠ via swap extraction.
fn neq_from_min_max(p: &[Found], tools: &Tools, u: &Unaries, lang: &Language) -> Result<Found> {
    let m = catalog::mm_min_max();
    let start = first(p, &|g| violates_mm(g, &m)).ok_or_else(|| stuck("no ⟨min,max⟩ violation"))?;
    let ops::MmVerdict::Fails(fail) = is_multimorphism(&m, &single(&start.rel))? else {
        return Err(stuck("⟨min,max⟩ violation vanished"));
    };
    let (x, y) = (fail.inputs[0].clone(), fail.inputs[1].clone());
    let swap = swap_on_differences(start, tools, &x, &y, &|x: &[usize]| x.iter().map(|&a| a == 0).collect())?;
    gamma_neq_from(&swap, &u.g0, &u.g1, lang)
}

/// Pins the coordinates where `x` and `y` agree, then extracts a binary
/// `γ'` with `γ'(0,1)+γ'(1,0) < γ'(0,0)+γ'(1,1)`. `side` picks I from the
/// reduced `x`.
fn swap_on_differences(
    mut f: Found,
    tools: &Tools,
    x: &[usize],
    y: &[usize],
    side: &dyn Fn(&[usize]) -> Vec<bool>,
) -> Result<Found> {
    let mut x = x.to_vec();
    let mut y = y.to_vec();
    for i in (0..x.len()).rev() {
        if x[i] == y[i] {
            f = tools.pin(f, i, x[i])?;
            x.remove(i);
            y.remove(i);
        }
    }
    let in_i = side(&x);
    let part = TuplePartition::new(x.len(), (0..x.len()).filter(|&c| in_i[c]))?;
    let provider = |subset: &[usize]| -> Option<Derivation> {
        match subset {
            [a] => tools.constant(*a).cloned(),
            _ => None,
        }
    };
    let w = swap_witness(&f.rel, &f.der, &part, &x, &y, &provider)?;
    let mut out = Found { rel: w.relation, der: w.derivation };
    let (xi, xj, yi, yj) = (x[w.i], x[w.j], y[w.i], y[w.j]);
    // Orient so that the strict side is {(0,1), (1,0)}.
    if xi == xj {
        out = tools.twist(out, 0)?;
    } else if xi == 1 {
        debug_assert_eq!((xi, xj, yi, yj), (1, 0, 0, 1));
    }
    Ok(out)
}

pub fn derive_neq(lang: &Language, s: &SaturatedSet, rho0: &Derivation, rho1: &Derivation) -> Result<Derivation> {
    need_boolean(lang)?;
    let p = pool(s);
    let tools = Tools { rho0: Some(rho0.clone()), rho1: Some(rho1.clone()), neq: None };
    let lower = min_max_side(&p, &tools, lang, 0)?;
    let upper = min_max_side(&p, &tools, lang, 1)?;
    let der = match (lower, upper) {
        (Side::Crisp(or), Side::Crisp(up)) => or.der.add_binary(0, up.der),
        (Side::Crisp(or), Side::Unary(g0)) => or.der.add_unary(0, g0.clone()).add_unary(1, g0).opt(),
        (Side::Unary(g1), Side::Crisp(up)) => up.der.add_unary(0, g1.clone()).add_unary(1, g1).opt(),
        (Side::Unary(g1), Side::Unary(g0)) => {
            let u = Unaries { g0, g1 };
            neq_from_min_max(&p, &tools, &u, lang)?.der.opt()
        }
    };
    let out = Found::new(der, lang)?;
    if out.rel != catalog::rho_neq() {
        return Err(stuck("≠ construction replayed to the wrong relation"));
    }
    Ok(out.der)
}

pub fn derive_consts_from_neq(lang: &Language, s: &SaturatedSet, rho_neq: &Derivation) -> Result<(Derivation, Derivation)> {
    need_boolean(lang)?;
    let neg = catalog::mm_neg();
    if is_multimorphism(&neg, lang)?.holds() {
        return Err(Error::Precondition("the language admits ⟨¬⟩".into()));
    }
    let p = pool(s);
    let tools = Tools { neq: Some(rho_neq.clone()), ..Tools::default() };
    let keep = |g: &WeightedRelation| violates_mm(g, &neg);
    let start = first(&p, &keep).ok_or_else(|| stuck("no relation violating ⟨¬⟩"))?;
    let end = tools.descend(start, &keep);
    if end.rel.arity() != 1 {
        return Err(stuck("⟨¬⟩ descent did not reach a unary"));
    }
    let o = Found::new(end.der.opt(), lang)?;
    let t = tools.twist(o.clone(), 0)?;
    if o.rel == catalog::rho0() && t.rel == catalog::rho1() {
        Ok((o.der, t.der))
    } else if o.rel == catalog::rho1() && t.rel == catalog::rho0() {
        Ok((t.der, o.der))
    } else {
        Err(stuck("⟨¬⟩ descent produced no constant"))
    }
}

/// `{(0,0),(0,1),(1,0)}` from a binary relation with three tuples.
fn rho_up(p: &[Found], tools: &Tools) -> Result<Option<Found>> {
    let f = catalog::op_mnrt();
    let keep = |g: &WeightedRelation| violates_poly(g, &f);
    let Some(start) = first(p, &keep) else { return Ok(None) };
    let mut end = tools.descend(start, &keep);
    if end.rel.arity() != 2 || end.rel.feasible_indices().len() != 3 {
        return Err(stuck(format!("Mnrt descent ended at {}", end.rel.encode())));
    }
    let missing = (0..4).map(|k| vec![k / 2, k % 2]).find(|t| !end.rel.is_feasible(t)).expect("one tuple missing");
    for (i, &label) in missing.iter().enumerate() {
        if label == 0 {
            end = tools.twist(end, i)?;
        }
    }
    Ok(Some(end))
}

/// A ternary relation without `000` containing every unit vector.
fn rho_prime(p: &[Found], tools: &Tools) -> Result<Option<Found>> {
    let f = catalog::op_mjrt();
    let keep = |g: &WeightedRelation| violates_poly(g, &f);
    let Some(start) = first(p, &keep) else { return Ok(None) };
    let end = tools.descend(start, &keep);
    if end.rel.arity() != 3 {
        return Err(stuck(format!("Mjrt descent ended at arity {}", end.rel.arity())));
    }
    let tuples = end.rel.feasible_tuples();
    for a in &tuples {
        for b in &tuples {
            for c in &tuples {
                let m = crate::ops::apply_componentwise(&f, &[a.clone(), b.clone(), c.clone()])?;
                if end.rel.is_feasible(&m) {
                    continue;
                }
                let mut g = end.clone();
                for (i, &mi) in m.iter().enumerate() {
                    if mi == 1 {
                        g = tools.twist(g, i)?;
                    }
                }
                let units = (0..3).all(|i| {
                    let mut e = vec![0; 3];
                    e[i] = 1;
                    g.rel.is_feasible(&e)
                });
                if units && !g.rel.is_feasible(&[0, 0, 0]) {
                    return Ok(Some(g));
                }
            }
        }
    }
    Err(stuck("Mjrt descent gave no usable orientation"))
}

/// γ≠ from a relation on which ⟨Mjrt,Mjrt,Mnrt⟩ holds but not with equality.
fn neq_from_mixed(p: &[Found], tools: &Tools, u: &Unaries, lang: &Language) -> Result<Found> {
    let (mj, mn) = (catalog::op_mjrt(), catalog::op_mnrt());
    for cand in p {
        let g = &cand.rel;
        let tuples = g.feasible_tuples();
        let mut hit = None;
        'search: for a in &tuples {
            for b in &tuples {
                for c in &tuples {
                    let three = [a.clone(), b.clone(), c.clone()];
                    let j = ops::apply_componentwise(&mj, &three)?;
                    let n = ops::apply_componentwise(&mn, &three)?;
                    let lhs = &(g.get(a) + g.get(b)) + g.get(c);
                    let rhs = &(g.get(&j) + g.get(&j)) + g.get(&n);
                    if rhs.is_finite() && lhs != rhs {
                        hit = Some(three);
                        break 'search;
                    }
                }
            }
        }
        let Some(three) = hit else { continue };
        return neq_from_triple(cand.clone(), tools, u, lang, three);
    }
    Err(stuck("no relation violating ⟨Mjrt,Mjrt,Mnrt⟩ with equality"))
}

fn neq_from_triple(mut f: Found, tools: &Tools, u: &Unaries, lang: &Language, three: [Vec<usize>; 3]) -> Result<Found> {
    let mut t = three.to_vec();
    for i in (0..t[0].len()).rev() {
        if t[0][i] == t[1][i] && t[1][i] == t[2][i] {
            f = tools.pin(f, i, t[0][i])?;
            t.iter_mut().for_each(|v| {
                v.remove(i);
            });
        }
    }
    let j = ops::apply_componentwise(&catalog::op_mjrt(), &t)?;
    for (i, &ji) in j.iter().enumerate() {
        if ji == 1 {
            f = tools.twist(f, i)?;
            t.iter_mut().for_each(|v| v[i] ^= 1);
        }
    }
    let r = f.rel.arity();
    let z = t.iter().find(|v| bits::ones(v) > 0).ok_or_else(|| stuck("all three tuples vanished"))?.clone();
    let nz = bits::complement(&z);
    let (zero, one) = (vec![0; r], vec![1; r]);
    let sum = |a: &[usize], b: &[usize]| f.rel.get(a) + f.rel.get(b);
    let (x, y) = if sum(&z, &nz) < sum(&zero, &one) { (z.clone(), nz) } else { (zero, one) };
    let swapped = swap_on_differences(f, tools, &x, &y, &|_| z.iter().map(|&a| a == 0).collect())?;
    gamma_neq_from(&swapped, &u.g0, &u.g1, lang)
}

pub fn derive_one_in_three(
    lang: &Language,
    s: &SaturatedSet,
    rho0: &Derivation,
    rho1: &Derivation,
    rho_neq: &Derivation,
) -> Result<Derivation> {
    need_boolean(lang)?;
    let p = pool(s);
    let tools = Tools { rho0: Some(rho0.clone()), rho1: Some(rho1.clone()), neq: Some(rho_neq.clone()) };
    let up = rho_up(&p, &tools)?;
    let prime = rho_prime(&p, &tools)?;
    let der = match (up, prime) {
        (Some(up), Some(pr)) => pr.der.add_binary(0, up.der.clone()).add_binary(1, up.der.clone()).add_binary(2, up.der),
        (Some(up), None) => {
            let g1 = weighted_unaries(&p, &tools, lang)?.g1;
            up.der
                .clone()
                .product(g1.clone())
                .add_binary(1, up.der.clone())
                .add_binary(2, up.der)
                .add_unary(0, g1.clone())
                .add_unary(1, g1)
                .opt()
        }
        (None, Some(pr)) => {
            let g0 = weighted_unaries(&p, &tools, lang)?.g0;
            pr.der.add_unary(0, g0.clone()).add_unary(1, g0.clone()).add_unary(2, g0).opt()
        }
        (None, None) => {
            let u = weighted_unaries(&p, &tools, lang)?;
            let ne = neq_from_mixed(&p, &tools, &u, lang)?.der;
            ne.clone()
                .product(u.g0.clone())
                .add_binary(1, ne.clone())
                .add_binary(2, ne)
                .add_unary(0, u.g0.clone())
                .add_unary(1, u.g0)
                .opt()
        }
    };
    let out = Found::new(der, lang)?;
    if out.rel != catalog::rho_1in3() {
        return Err(stuck("1-in-3 construction replayed to the wrong relation"));
    }
    Ok(out.der)
}

/// The four gadgets of the hardness pipeline, each replayed against its target.
pub fn synthesize(lang: &Language, s: &SaturatedSet) -> Result<Vec<(String, Derivation)>> {
    let (rho0, rho1, rho_neq) = match derive_constants(lang, s)? {
        Constants::Both { rho0, rho1 } => {
            let ne = derive_neq(lang, s, &rho0, &rho1)?;
            (rho0, rho1, ne)
        }
        Constants::Neq { rho_neq } => {
            let (r0, r1) = derive_consts_from_neq(lang, s, &rho_neq)?;
            (r0, r1, rho_neq)
        }
    };
    let one_in_three = derive_one_in_three(lang, s, &rho0, &rho1, &rho_neq)?;
    let out = vec![
        ("rho0".to_string(), rho0),
        ("rho1".to_string(), rho1),
        ("rho_neq".to_string(), rho_neq),
        ("rho_1in3".to_string(), one_in_three),
    ];
    for (name, der) in &out {
        let want = catalog::relation_by_name(name).expect("catalog target");
        if der.replay(lang)? != want {
            return Err(stuck(format!("{name} derivation does not replay to its target")));
        }
    }
    Ok(out)
}

pub fn classify_boolean(lang: &Language, budget: Budget) -> Result<BooleanVerdict> {
    classify_boolean_with_cap(lang, budget, DEFAULT_CAP)
}

/// As [`classify_boolean`], with `cap` bounding the table size used when
/// evaluating realized gadgets.
pub fn classify_boolean_with_cap(lang: &Language, budget: Budget, cap: u64) -> Result<BooleanVerdict> {
    need_boolean(lang)?;
    for (name, m) in catalog::eight_multimorphisms() {
        let check = is_multimorphism(&m, lang)?;
        if check.holds() {
            return Ok(BooleanVerdict::Tractable { multimorphism: name.to_string(), candidate: m, check });
        }
    }
    if is_multimorphism(&catalog::mm_neg(), lang)?.holds() {
        return Ok(BooleanVerdict::OpenSelfComplementary);
    }
    let s = saturate(lang, budget, false)?;
    let exhausted = |stage: &str, e: Error| BooleanVerdict::BudgetExhausted {
        stage: stage.to_string(),
        reason: e.to_string(),
        saturation_exhausted: s.exhausted,
    };
    let derivations = match synthesize(lang, &s) {
        Ok(d) => d,
        Err(e @ (Error::Budget(_) | Error::Precondition(_))) => return Ok(exhausted("synthesis", e)),
        Err(e) => return Err(e),
    };
    let mut gadgets = Vec::new();
    for (target, derivation) in derivations {
        let realization = match check_realization(&derivation, lang, cap) {
            Ok(r) => r,
            Err(e @ Error::Budget(_)) => return Ok(exhausted("realization", e)),
            Err(e) => return Err(e),
        };
        if !realization.matches {
            return Err(Error::Invalid(format!("realized {target} gadget does not evaluate to its target")));
        }
        gadgets.push(Gadget { target, derivation, realization });
    }
    Ok(BooleanVerdict::PlanarlyIntractable { gadgets })
}
