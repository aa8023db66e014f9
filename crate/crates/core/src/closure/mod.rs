//! Bounded saturation of the closure of a language, with a derivation for
//! every member, plus the two constructive engines used by the classifiers
//! (the two-fan Opt construction and swap-witness extraction).

mod fan;
mod swap;

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog;
use crate::error::{Error, Result};
use crate::express::{self, Derivation};
use crate::ops;
use crate::relation::{Language, WeightedRelation};
use crate::value::{rational_str, ExtValue};

pub use fan::{two_fan_opt, FanForm, FanWitness};
pub use swap::{swap_witness, SwapWitness};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub max_arity: usize,
    pub max_depth: usize,
    pub max_set: usize,
}

impl Budget {
    pub fn for_language(lang: &Language) -> Budget {
        Budget { max_arity: lang.max_arity().max(3), max_depth: 6, max_set: 50_000 }
    }

    pub fn check(&self) -> Result<()> {
        if self.max_arity == 0 || self.max_depth == 0 || self.max_set == 0 {
            return Err(Error::Invalid("budgets must be positive".into()));
        }
        Ok(())
    }
}

/// `relation = (original + shift) * scale`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CanonicalWRel {
    pub relation: WeightedRelation,
    #[serde(with = "rational_str")]
    pub shift: BigRational,
    #[serde(with = "rational_str")]
    pub scale: BigRational,
}

impl CanonicalWRel {
    /// Wraps `der` (a derivation of the original) so it replays to the canonical form.
    pub fn tag(&self, der: Derivation) -> Derivation {
        let der = if self.shift.is_zero() { der } else { der.add_const(self.shift.clone()) };
        if self.scale.is_one() { der } else { der.scale(self.scale.clone()) }
    }
}

/// Minimum finite value goes to 0, minimum positive value to 1.
pub fn canonicalize(g: &WeightedRelation) -> CanonicalWRel {
    let Some(min) = g.min_value().cloned() else {
        return CanonicalWRel { relation: g.clone(), shift: BigRational::zero(), scale: BigRational::one() };
    };
    let shift = -min;
    let shifted = ops::add_constant(g, &shift);
    let pos = shifted.finite_values().into_iter().filter(|q| q > &BigRational::zero()).min();
    let scale = match pos {
        Some(p) => p.recip(),
        None => BigRational::one(),
    };
    let relation = if scale.is_one() { shifted } else { ops::scale(&shifted, &scale).expect("positive scale") };
    CanonicalWRel { relation, shift, scale }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entry {
    pub relation: WeightedRelation,
    pub derivation: Derivation,
    pub level: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SaturatedSet {
    pub base: Language,
    pub budget: Budget,
    pub conservative: bool,
    /// Sorted by canonical encoding.
    pub entries: Vec<Entry>,
    /// True when a fixpoint was reached inside the budget.
    pub exhausted: bool,
    #[serde(skip)]
    index: BTreeMap<String, usize>,
}

impl SaturatedSet {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn truncated(&self) -> bool {
        !self.exhausted
    }

    /// The entry for `rel`'s class: equal up to scaling and shifting, and
    /// up to finite unaries in conservative sets.
    pub fn find(&self, rel: &WeightedRelation) -> Option<&Entry> {
        let (key, _, _) = normalize((rel.clone(), Derivation::Equality), self.conservative);
        self.index.get(&key).map(|&i| &self.entries[i])
    }

    pub fn of_arity(&self, r: usize) -> impl Iterator<Item = &Entry> {
        self.entries.iter().filter(move |e| e.relation.arity() == r)
    }

    /// A derivation of the crisp unary `{a : a ∈ subset}`, free in conservative mode.
    pub fn crisp_unary(&self, subset: &[usize]) -> Option<Derivation> {
        let rel = catalog::rho_subset(self.base.domain_size(), subset);
        if self.conservative {
            return Some(Derivation::unary(rel));
        }
        self.find(&rel).map(|e| e.derivation.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Lookup {
    Found { derivation: Derivation },
    NotFound { exhausted: bool },
}

pub fn contains_crisp(s: &SaturatedSet, rho: &WeightedRelation) -> Result<Lookup> {
    if !rho.is_crisp() {
        return Err(Error::Invalid("membership queries take crisp relations".into()));
    }
    if rho.arity() > s.budget.max_arity {
        return Err(Error::Precondition(format!(
            "arity {} exceeds the saturation budget {}",
            rho.arity(),
            s.budget.max_arity
        )));
    }
    Ok(match s.find(rho) {
        Some(e) => Lookup::Found { derivation: e.derivation.clone() },
        None => Lookup::NotFound { exhausted: s.exhausted },
    })
}

/// Subtracts finite unaries so that the result is the unique member of
/// `γ + {Σ μ_i(x_i)}` vanishing on a fixed set of pivot tuples. Returns the
/// unaries added, one per coordinate (`None` when zero).
pub fn unary_reduce(g: &WeightedRelation) -> (WeightedRelation, Vec<Option<WeightedRelation>>) {
    let (d, r) = (g.domain_size(), g.arity());
    let feas = g.feasible_indices();
    let nothing = || (g.clone(), vec![None; r]);
    if feas.is_empty() {
        return nothing();
    }
    let tuples: Vec<Vec<usize>> = feas.iter().map(|&f| g.tuple_at(f)).collect();
    let gens = r * d;
    // Rows in reduced echelon form: (values on Feas, combination of generators, pivot).
    let mut rows: Vec<(Vec<BigRational>, Vec<BigRational>, usize)> = Vec::new();
    for gi in 0..gens {
        let (i, a) = (gi / d, gi % d);
        let mut v: Vec<BigRational> =
            tuples.iter().map(|t| if t[i] == a { BigRational::one() } else { BigRational::zero() }).collect();
        let mut c = vec![BigRational::zero(); gens];
        c[gi] = BigRational::one();
        for (rv, rc, p) in &rows {
            let f = v[*p].clone();
            if !f.is_zero() {
                v.iter_mut().zip(rv).for_each(|(x, y)| *x -= &f * y);
                c.iter_mut().zip(rc).for_each(|(x, y)| *x -= &f * y);
            }
        }
        let Some(p) = v.iter().position(|x| !x.is_zero()) else { continue };
        let inv = v[p].recip();
        v.iter_mut().for_each(|x| *x *= &inv);
        c.iter_mut().for_each(|x| *x *= &inv);
        for (rv, rc, _) in rows.iter_mut() {
            let f = rv[p].clone();
            if !f.is_zero() {
                rv.iter_mut().zip(&v).for_each(|(x, y)| *x -= &f * y);
                rc.iter_mut().zip(&c).for_each(|(x, y)| *x -= &f * y);
            }
        }
        rows.push((v, c, p));
    }
    let vals: Vec<BigRational> = feas.iter().map(|&f| g.at(f).finite().expect("feasible").clone()).collect();
    let mut mu = vec![BigRational::zero(); gens];
    for (_, rc, p) in &rows {
        let f = &vals[*p];
        if !f.is_zero() {
            mu.iter_mut().zip(rc).for_each(|(x, y)| *x -= f * y);
        }
    }
    let mut out = g.clone();
    let mut unaries = vec![None; r];
    for i in 0..r {
        let part = &mu[i * d..(i + 1) * d];
        if part.iter().all(|x| x.is_zero()) {
            continue;
        }
        let u = WeightedRelation::new(d, 1, part.iter().cloned().map(ExtValue::Fin).collect()).expect("unary");
        out = express::add_unary(&out, i, &u).expect("same domain");
        unaries[i] = Some(u);
    }
    (out, unaries)
}

/// Normal form of a candidate: the canonical affine form, taken after
/// unary reduction when finite unaries are free.
fn normalize((rel, der): Candidate, conservative: bool) -> (String, WeightedRelation, Derivation) {
    let (rel, der) = if conservative && !rel.is_crisp() {
        let (red, mus) = unary_reduce(&rel);
        let der = mus
            .into_iter()
            .enumerate()
            .filter_map(|(i, m)| m.map(|m| (i, m)))
            .fold(der, |acc, (i, m)| acc.add_unary(i, Derivation::unary(m)));
        (red, der)
    } else {
        (rel, der)
    };
    let c = canonicalize(&rel);
    let der = c.tag(der);
    (c.relation.encode(), c.relation, der)
}

fn is_zero_relation(g: &WeightedRelation) -> bool {
    g.table().iter().all(|v| v.is_zero())
}

/// Non-constant `{0,1}`-valued unaries, added before Opt and minimisation
/// when finite unaries are free.
fn probes(d: usize) -> Vec<WeightedRelation> {
    (1..(1usize << d) - 1)
        .map(|mask| {
            WeightedRelation::from_fn(d, 1, |t| {
                if mask >> t[0] & 1 == 1 { ExtValue::one() } else { ExtValue::zero() }
            })
        })
        .collect()
}

/// Helpers available to the generators at one level.
struct Helpers {
    d: usize,
    conservative: bool,
    neq: Option<Derivation>,
    consts: Vec<(usize, Derivation)>,
    subsets: Vec<(Vec<usize>, Derivation)>,
    unaries: Vec<(WeightedRelation, Derivation)>,
    probes: Vec<WeightedRelation>,
}

fn helpers(d: usize, conservative: bool, entries: &[Entry], index: &BTreeMap<String, usize>) -> Helpers {
    let lookup = |rel: &WeightedRelation| index.get(&rel.encode()).map(|&i| entries[i].derivation.clone());
    let neq = lookup(&catalog::gamma_col(d));
    let mut consts = Vec::new();
    let mut subsets = Vec::new();
    for mask in 1..(1usize << d) - 1 {
        let subset: Vec<usize> = (0..d).filter(|a| mask >> a & 1 == 1).collect();
        let rel = catalog::rho_subset(d, &subset);
        let der = if conservative { Some(Derivation::unary(rel.clone())) } else { lookup(&rel) };
        if let Some(der) = der {
            if subset.len() == 1 {
                consts.push((subset[0], der.clone()));
            }
            subsets.push((subset, der));
        }
    }
    consts.sort_by_key(|c| c.0);
    let unaries = if conservative {
        Vec::new()
    } else {
        entries
            .iter()
            .filter(|e| e.relation.arity() == 1 && !is_zero_relation(&e.relation))
            .map(|e| (e.relation.clone(), e.derivation.clone()))
            .collect()
    };
    let probes = if conservative { probes(d) } else { Vec::new() };
    Helpers { d, conservative, neq, consts, subsets, unaries, probes }
}

type Candidate = (WeightedRelation, Derivation);

fn push(out: &mut Vec<Candidate>, rel: Result<WeightedRelation>, der: impl FnOnce() -> Derivation) {
    if let Ok(rel) = rel {
        out.push((rel, der()));
    }
}

fn children(e: &Entry, h: &Helpers) -> Vec<Candidate> {
    let g = &e.relation;
    let r = g.arity();
    let base = || e.derivation.clone();
    let mut out = Vec::new();
    if !g.is_crisp() {
        out.push((ops::feas(g), base().feas()));
        out.push((ops::opt(g), base().opt()));
    }
    for i in 0..r {
        if r >= 2 {
            push(&mut out, express::minimise(g, i), || base().minimise(i));
            push(&mut out, express::eq_restrict(g, i), || base().eq_restrict(i));
            if let Some(neq) = &h.neq {
                push(&mut out, express::neq_restrict(g, i), || base().neq_restrict(i, neq.clone()));
            }
            for (a, via) in &h.consts {
                push(&mut out, express::pin(g, i, *a), || base().pin(i, *a, via.clone()));
            }
        }
        if h.d == 2 {
            if let Some(neq) = &h.neq {
                push(&mut out, express::twist(g, i), || base().twist(i, neq.clone()));
            }
        }
        for (subset, via) in &h.subsets {
            push(&mut out, express::domain_restrict(g, i, subset), || {
                base().restrict_domain(i, subset.clone(), via.clone())
            });
        }
        for (mu, mu_der) in &h.unaries {
            push(&mut out, express::add_unary(g, i, mu), || base().add_unary(i, mu_der.clone()));
        }
        for mu in &h.probes {
            let Ok(tilted) = express::add_unary(g, i, mu) else { continue };
            let der = || base().add_unary(i, Derivation::unary(mu.clone()));
            out.push((ops::opt(&tilted), der().opt()));
            if r >= 2 {
                push(&mut out, express::minimise(&tilted, i), || der().minimise(i));
            }
        }
    }
    if h.conservative && r == 2 && !g.is_crisp() {
        out.extend(fans(g, &e.derivation, h.d));
    }
    out
}

/// Crisp relations cut out of a weighted binary by the two-fan construction.
fn fans(g: &WeightedRelation, der: &Derivation, d: usize) -> Vec<Candidate> {
    let mut out = Vec::new();
    for a1 in 0..d {
        for b1 in (0..d).filter(|&b| b != a1) {
            for a2 in 0..d {
                for b2 in (0..d).filter(|&b| b != a2) {
                    for form in [FanForm::Hard, FanForm::SoftA, FanForm::SoftB] {
                        if let Ok(Some(w)) = two_fan_opt(g, der, (a1, b1, a2, b2), form) {
                            out.push((w.relation, w.derivation));
                        }
                    }
                }
            }
        }
    }
    out
}

fn joins(a: &Entry, b: &Entry) -> Vec<Candidate> {
    let mut out = Vec::new();
    for ls in 0..2 {
        for rs in 0..2 {
            push(&mut out, express::join(&a.relation, &b.relation, ls, rs), || {
                a.derivation.clone().join(b.derivation.clone(), ls, rs)
            });
        }
    }
    out
}

/// Level-by-level saturation. Every relation found at level `k` has a
/// derivation using at most `k` generator steps over level 0 (the language,
/// `=` and, when conservative, the crisp unaries).
///
/// When `conservative` is set every unary is free, so weighted relations are
/// kept modulo finite unaries (see [`unary_reduce`]); Opt and minimisation are
/// then also applied after adding each `{0,1}`-valued unary to one
/// coordinate, and weighted binaries feed the two-fan construction.
pub fn saturate(lang: &Language, budget: Budget, conservative: bool) -> Result<SaturatedSet> {
    budget.check()?;
    let d = lang.domain_size();
    let mut entries: Vec<Entry> = Vec::new();
    let mut index: BTreeMap<String, usize> = BTreeMap::new();
    let mut insert = |entries: &mut Vec<Entry>, key: String, relation, derivation, level| {
        if let std::collections::btree_map::Entry::Vacant(slot) = index.entry(key) {
            slot.insert(entries.len());
            entries.push(Entry { relation, derivation, level });
        }
    };

    let mut seeds: Vec<Candidate> =
        lang.relations().iter().map(|nr| (nr.relation.clone(), Derivation::base(nr.name.clone()))).collect();
    seeds.push((catalog::rho_eq_on(d), Derivation::Equality));
    if conservative {
        for mask in 1..(1usize << d) - 1 {
            let subset: Vec<usize> = (0..d).filter(|a| mask >> a & 1 == 1).collect();
            let u = catalog::rho_subset(d, &subset);
            seeds.push((u.clone(), Derivation::unary(u)));
        }
    }
    let seeds = seeds.into_iter().map(|c| normalize(c, conservative)).collect();
    for (key, rel, der) in pick_best(seeds) {
        insert(&mut entries, key, rel, der, 0);
    }

    let mut exhausted = false;
    let mut truncated = entries.len() > budget.max_set;
    let mut level = 0;
    while !truncated {
        if level == budget.max_depth {
            break;
        }
        level += 1;
        let lookup: BTreeMap<String, usize> =
            entries.iter().enumerate().map(|(i, e)| (e.relation.encode(), i)).collect();
        let h = helpers(d, conservative, &entries, &lookup);
        let frontier: Vec<usize> = (0..entries.len()).filter(|&i| entries[i].level == level - 1).collect();
        let binaries: Vec<usize> = (0..entries.len()).filter(|&i| entries[i].relation.arity() == 2).collect();

        let mut raw: Vec<(String, WeightedRelation, Derivation)> = frontier
            .par_iter()
            .flat_map_iter(|&i| {
                let e = &entries[i];
                let mut out = children(e, &h);
                if e.relation.arity() == 2 {
                    for &j in &binaries {
                        let f = &entries[j];
                        // Two weighted arguments are never joined; pairs inside the
                        // frontier are generated once, from the smaller index.
                        if !e.relation.is_crisp() && !f.relation.is_crisp() {
                            continue;
                        }
                        if f.level == level - 1 && j < i {
                            continue;
                        }
                        out.extend(joins(e, f));
                        if j != i {
                            out.extend(joins(f, e));
                        }
                    }
                }
                out.into_iter()
                    .filter(|(rel, _)| {
                        rel.arity() <= budget.max_arity && !lookup.contains_key(&rel.encode())
                    })
                    .map(|c| normalize(c, conservative))
                    .collect::<Vec<_>>()
            })
            .collect();
        raw.retain(|(key, _, _)| !lookup.contains_key(key));
        let fresh = pick_best(raw);
        if fresh.is_empty() {
            exhausted = true;
            break;
        }
        for (key, rel, der) in fresh {
            if entries.len() >= budget.max_set {
                truncated = true;
                break;
            }
            insert(&mut entries, key, rel, der, level);
        }
    }
    let mut sorted: Vec<(String, Entry)> = entries.into_iter().map(|e| (e.relation.encode(), e)).collect();
    sorted.sort_by(|a, b| a.0.cmp(&b.0));
    let index = sorted.iter().enumerate().map(|(i, (k, _))| (k.clone(), i)).collect();
    Ok(SaturatedSet {
        base: lang.clone(),
        budget,
        conservative,
        entries: sorted.into_iter().map(|(_, e)| e).collect(),
        exhausted,
        index,
    })
}

/// One candidate per key, keeping the smallest serialized derivation; output sorted by key.
fn pick_best(mut raw: Vec<(String, WeightedRelation, Derivation)>) -> Vec<(String, WeightedRelation, Derivation)> {
    raw.sort_by(|a, b| a.0.cmp(&b.0));
    let mut out: Vec<(String, WeightedRelation, Derivation)> = Vec::new();
    let mut best_code: Option<String> = None;
    for cand in raw {
        match out.last_mut() {
            Some(last) if last.0 == cand.0 => {
                let code = best_code.get_or_insert_with(|| last.2.encode());
                let mine = cand.2.encode();
                if mine < *code {
                    *code = mine;
                    *last = cand;
                }
            }
            _ => {
                best_code = None;
                out.push(cand);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value::{int, rat};

    fn small() -> Budget {
        Budget { max_arity: 2, max_depth: 4, max_set: 5_000 }
    }

    #[test]
    fn canonical_form() {
        let g = WeightedRelation::new(2, 1, vec![ExtValue::from_int(3), ExtValue::from_int(7)]).unwrap();
        let c = canonicalize(&g);
        assert_eq!(c.relation.table(), &[ExtValue::zero(), ExtValue::one()]);
        assert_eq!(c.shift, int(-3));
        assert_eq!(c.scale, rat(1, 4));
        let lang = Language::from_pairs(2, vec![("g", g)]).unwrap();
        assert_eq!(c.tag(Derivation::base("g")).replay(&lang).unwrap(), c.relation);
        let crisp = catalog::rho_nae();
        assert_eq!(canonicalize(&crisp).relation, crisp);
        assert!(canonicalize(&crisp).scale.is_one());
    }

    #[test]
    fn unary_reduction_is_a_class_invariant() {
        let cut = catalog::gamma_cut();
        let mu = WeightedRelation::new(2, 1, vec![ExtValue::from_int(5), ExtValue::from_ratio(-1, 3)]).unwrap();
        let tilted = express::add_unary(&express::add_unary(&cut, 1, &mu).unwrap(), 0, &catalog::gamma0()).unwrap();
        let (a, _) = unary_reduce(&cut);
        let (b, mus) = unary_reduce(&tilted);
        assert_eq!(a, b);
        assert!(mus.iter().any(|m| m.is_some()));
        let crisp_plus = express::add_unary(&catalog::rho_nand(), 0, &mu).unwrap();
        assert_eq!(unary_reduce(&crisp_plus).0, catalog::rho_nand());
        assert!(!a.is_crisp());
    }

    #[test]
    fn conservative_lookup_is_modulo_unaries() {
        let s = saturate(&catalog::lang_cut(), small(), true).unwrap();
        let tilted = express::add_unary(&catalog::gamma_cut(), 0, &catalog::gamma1()).unwrap();
        let e = s.find(&tilted).unwrap();
        assert_eq!(e.derivation.replay(&s.base).unwrap(), e.relation);
    }

    #[test]
    fn cut_saturation_contains_neq() {
        let s = saturate(&catalog::lang_cut(), small(), true).unwrap();
        match contains_crisp(&s, &catalog::rho_neq()).unwrap() {
            Lookup::Found { derivation } => {
                assert_eq!(derivation.replay(&s.base).unwrap(), catalog::rho_neq())
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn equality_never_gives_neq() {
        let lang = Language::from_pairs(2, vec![("eq", catalog::rho_eq())]).unwrap();
        let s = saturate(&lang, Budget { max_arity: 3, max_depth: 6, max_set: 1000 }, false).unwrap();
        assert!(s.exhausted);
        assert_eq!(contains_crisp(&s, &catalog::rho_neq()).unwrap(), Lookup::NotFound { exhausted: true });
        for e in &s.entries {
            let zeros = vec![0; e.relation.arity()];
            let ones = vec![1; e.relation.arity()];
            assert!(e.relation.is_feasible(&zeros) && e.relation.is_feasible(&ones), "{:?}", e.relation);
        }
    }

    #[test]
    fn is_language_gives_constants_and_neq() {
        let s = saturate(&catalog::lang_is(), Budget::for_language(&catalog::lang_is()), false).unwrap();
        for target in [catalog::rho0(), catalog::rho1(), catalog::rho_neq()] {
            let Lookup::Found { derivation } = contains_crisp(&s, &target).unwrap() else {
                panic!("missing {target:?}");
            };
            assert_eq!(derivation.replay(&s.base).unwrap(), target);
        }
    }

    #[test]
    fn every_entry_replays() {
        for (lang, cons) in [(catalog::lang_cut(), true), (catalog::lang_imp(), true), (catalog::lang_is(), false)] {
            let s = saturate(&lang, small(), cons).unwrap();
            for e in &s.entries {
                assert_eq!(e.derivation.replay(&lang).unwrap(), e.relation);
            }
            let keys: Vec<String> = s.entries.iter().map(|e| e.relation.encode()).collect();
            let mut sorted = keys.clone();
            sorted.sort();
            sorted.dedup();
            assert_eq!(keys, sorted);
        }
    }

    #[test]
    fn larger_budget_keeps_everything() {
        let lang = catalog::lang_imp();
        let a = saturate(&lang, Budget { max_arity: 2, max_depth: 2, max_set: 10_000 }, true).unwrap();
        let b = saturate(&lang, Budget { max_arity: 2, max_depth: 3, max_set: 10_000 }, true).unwrap();
        for e in &a.entries {
            assert!(b.find(&e.relation).is_some());
        }
    }

    #[test]
    fn deterministic() {
        let lang = catalog::lang_cut_gamma0();
        let a = saturate(&lang, small(), false).unwrap();
        let b = saturate(&lang, small(), false).unwrap();
        assert_eq!(a.entries, b.entries);
    }

    #[test]
    fn arity_over_budget_is_rejected() {
        let s = saturate(&catalog::lang_cut(), small(), true).unwrap();
        assert!(contains_crisp(&s, &catalog::rho_nae()).is_err());
    }
}
