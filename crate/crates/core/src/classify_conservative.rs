//! Conservative languages: the pair graph on ordered label pairs, soft
//! self-loops as hardness certificates, and otherwise an STP on the loopless
//! pairs and an MJN on the looped ones, each verified against the language.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog;
use crate::closure::{
    canonicalize, contains_crisp, saturate, swap_witness, two_fan_opt, Budget, CanonicalWRel, FanForm, FanWitness,
    Lookup, SaturatedSet,
};
use crate::error::{invalid, Result};
use crate::express::Derivation;
use crate::ops::{is_multimorphism, MmVerdict};
use crate::relation::{Language, MultimorphismCandidate, OpTable, TupleIter, TuplePartition, WeightedRelation};
use crate::value::ExtValue;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PairVertex {
    pub a: usize,
    pub b: usize,
}

impl PairVertex {
    pub fn new(a: usize, b: usize) -> PairVertex {
        assert_ne!(a, b, "pair vertices need distinct labels");
        PairVertex { a, b }
    }

    pub fn bar(self) -> PairVertex {
        PairVertex { a: self.b, b: self.a }
    }

    fn label(self) -> String {
        format!("{}{}", self.a, self.b)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeKind {
    Hard,
    Soft,
}

/// A binary `γ` with `γ(a₁,b₂)+γ(b₁,a₂) < γ(a₁,a₂)+γ(b₁,b₂)` for `u = (a₁,b₁)`,
/// `v = (a₂,b₂)`. The values are read off the canonical relation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeWitness {
    pub relation: CanonicalWRel,
    pub derivation: Derivation,
    #[serde(rename = "A")]
    pub big_a: ExtValue,
    #[serde(rename = "P")]
    pub p: ExtValue,
    #[serde(rename = "Q")]
    pub q: ExtValue,
    #[serde(rename = "B")]
    pub big_b: ExtValue,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub u: PairVertex,
    pub v: PairVertex,
    pub kind: EdgeKind,
    pub witness: EdgeWitness,
}

impl Edge {
    fn key(&self) -> (PairVertex, PairVertex) {
        (self.u.min(self.v), self.u.max(self.v))
    }

    pub fn is_loop(&self) -> bool {
        self.u == self.v
    }

    pub fn touches(&self, w: PairVertex) -> bool {
        self.u == w || self.v == w
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairGraph {
    pub domain_size: usize,
    pub vertices: Vec<PairVertex>,
    /// Sorted by unordered endpoint pair, one edge per pair.
    pub edges: Vec<Edge>,
    pub truncated: bool,
}

fn eq7(g: &WeightedRelation, u: PairVertex, v: PairVertex) -> Option<(ExtValue, ExtValue, ExtValue, ExtValue, EdgeKind)> {
    let (a1, b1, a2, b2) = (u.a, u.b, v.a, v.b);
    let p = g.get(&[a1, b2]);
    let q = g.get(&[b1, a2]);
    let big_a = g.get(&[a1, a2]);
    let big_b = g.get(&[b1, b2]);
    let lhs = p + q;
    if !lhs.is_finite() || lhs >= big_a + big_b {
        return None;
    }
    let kind = if big_a.is_finite() || big_b.is_finite() { EdgeKind::Soft } else { EdgeKind::Hard };
    Some((big_a.clone(), p.clone(), q.clone(), big_b.clone(), kind))
}

fn all_vertices(d: usize) -> Vec<PairVertex> {
    let mut out = Vec::new();
    for a in 0..d {
        for b in 0..d {
            if a != b {
                out.push(PairVertex::new(a, b));
            }
        }
    }
    out
}

/// Every pair-graph edge a binary relation establishes.
fn edges_of(g: &WeightedRelation, der: &Derivation, vertices: &[PairVertex]) -> Vec<Edge> {
    let canon = canonicalize(g);
    let mut out = Vec::new();
    for &u in vertices {
        for &v in vertices {
            if let Some((big_a, p, q, big_b, kind)) = eq7(&canon.relation, u, v) {
                let witness = EdgeWitness {
                    relation: canon.clone(),
                    derivation: canon.tag(der.clone()),
                    big_a,
                    p,
                    q,
                    big_b,
                };
                out.push(Edge { u, v, kind, witness });
            }
        }
    }
    out
}

/// Binary relations from the swap recursion on members of `lang`, over
/// every pair of feasible tuples and every split of the coordinates.
fn swap_binaries(lang: &Language, max_arity: usize) -> Vec<(WeightedRelation, Derivation)> {
    let d = lang.domain_size();
    let free = move |s: &[usize]| Some(Derivation::unary(catalog::rho_subset(d, s)));
    let mut out = Vec::new();
    for nr in lang.relations() {
        let g = &nr.relation;
        let r = g.arity();
        if r < 3 || r > max_arity {
            continue;
        }
        let base = Derivation::base(nr.name.clone());
        let feasible = g.feasible_tuples();
        // Splits with coordinate 0 in I; the mirrored split swaps the roles of x and y.
        let splits: Vec<TuplePartition> = (0..1usize << (r - 1))
            .filter(|m| *m != (1 << (r - 1)) - 1)
            .map(|m| {
                let i = std::iter::once(0).chain((1..r).filter(|c| m >> (c - 1) & 1 == 1));
                TuplePartition::new(r, i).expect("valid split")
            })
            .collect();
        let found: Vec<Vec<(WeightedRelation, Derivation)>> = feasible
            .par_iter()
            .map(|x| {
                let mut local = Vec::new();
                for y in &feasible {
                    for part in &splits {
                        let xy = part.mix(x, y);
                        let yx = part.mix(y, x);
                        let lhs = g.get(x) + g.get(y);
                        if lhs >= g.get(&xy) + g.get(&yx) {
                            continue;
                        }
                        if let Ok(w) = swap_witness(g, &base, part, x, y, &free) {
                            local.push((w.relation, w.derivation));
                        }
                    }
                }
                local
            })
            .collect();
        out.extend(found.into_iter().flatten());
    }
    out
}

impl PairGraph {
    pub fn build(lang: &Language, budget: Budget) -> Result<(PairGraph, SaturatedSet)> {
        let s = saturate(lang, budget, true)?;
        let g = PairGraph::from_saturation(lang, &s);
        Ok((g, s))
    }

    pub fn from_saturation(lang: &Language, s: &SaturatedSet) -> PairGraph {
        let d = lang.domain_size();
        let vertices = all_vertices(d);
        // The language's own binaries first, so their witnesses are the ones kept.
        let mut sources: Vec<(WeightedRelation, Derivation)> = lang
            .relations()
            .iter()
            .filter(|nr| nr.relation.arity() == 2)
            .map(|nr| (nr.relation.clone(), Derivation::base(nr.name.clone())))
            .collect();
        sources.extend(s.of_arity(2).map(|e| (e.relation.clone(), e.derivation.clone())));
        sources.extend(swap_binaries(lang, s.budget.max_arity));
        let found: Vec<Vec<Edge>> = sources.par_iter().map(|(g, der)| edges_of(g, der, &vertices)).collect();
        // First witness per endpoint pair, upgraded to the first soft one.
        let mut edges: BTreeMap<(PairVertex, PairVertex), Edge> = BTreeMap::new();
        for e in found.into_iter().flatten() {
            match edges.get(&e.key()) {
                Some(old) if old.kind == EdgeKind::Soft || e.kind == EdgeKind::Hard => {}
                _ => {
                    edges.insert(e.key(), e);
                }
            }
        }
        PairGraph { domain_size: d, vertices, edges: edges.into_values().collect(), truncated: s.truncated() }
    }

    pub fn edge(&self, u: PairVertex, v: PairVertex) -> Option<&Edge> {
        let key = (u.min(v), u.max(v));
        self.edges.binary_search_by(|e| e.key().cmp(&key)).ok().map(|i| &self.edges[i])
    }

    pub fn self_loop(&self, v: PairVertex) -> Option<&Edge> {
        self.edge(v, v)
    }

    pub fn neighbours(&self, v: PairVertex) -> impl Iterator<Item = PairVertex> + '_ {
        self.edges.iter().filter(move |e| !e.is_loop() && e.touches(v)).map(move |e| if e.u == v { e.v } else { e.u })
    }

    /// Rechecks every witness: replay, canonical values and the edge inequality.
    pub fn verify(&self, lang: &Language) -> Result<()> {
        for e in &self.edges {
            let w = &e.witness;
            if w.derivation.replay(lang)? != w.relation.relation {
                return Err(invalid(format!("witness for {:?}-{:?} does not replay", e.u, e.v)));
            }
            match eq7(&w.relation.relation, e.u, e.v) {
                Some((a, p, q, b, kind))
                    if a == w.big_a && p == w.p && q == w.q && b == w.big_b && kind == e.kind => {}
                _ => return Err(invalid(format!("witness for {:?}-{:?} fails the edge inequality", e.u, e.v))),
            }
        }
        Ok(())
    }

    /// Graphviz rendering: soft edges dashed, looped vertices shaded.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph pairs {\n  node [shape=circle];\n");
        for &v in &self.vertices {
            let style = if self.self_loop(v).is_some() { " style=filled fillcolor=lightgray" } else { "" };
            let _ = writeln!(out, "  \"{}\" [label=\"({},{})\"{}];", v.label(), v.a, v.b, style);
        }
        for e in &self.edges {
            let style = if e.kind == EdgeKind::Soft { " [style=dashed]" } else { "" };
            let _ = writeln!(out, "  \"{}\" -- \"{}\"{};", e.u.label(), e.v.label(), style);
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SoftLoopWitness {
    pub vertex: PairVertex,
    pub edge: EdgeWitness,
    /// `{(a,a),(a,b),(b,a)}` or `{(b,b),(a,b),(b,a)}`, as Opt of the edge
    /// relation plus two unaries.
    pub soft_relation: FanWitness,
}

pub fn detect_soft_self_loop(g: &PairGraph) -> Result<Option<SoftLoopWitness>> {
    for &v in &g.vertices {
        let Some(e) = g.self_loop(v).filter(|e| e.kind == EdgeKind::Soft) else { continue };
        let w = &e.witness;
        let form = if w.big_b.is_finite() { FanForm::SoftB } else { FanForm::SoftA };
        let fan = two_fan_opt(&w.relation.relation, &w.derivation, (v.a, v.b, v.a, v.b), form)?
            .ok_or_else(|| invalid("soft loop witness gave no soft relation"))?;
        return Ok(Some(SoftLoopWitness { vertex: v, edge: w.clone(), soft_relation: fan }));
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bipartition {
    pub m: Vec<PairVertex>,
    pub bar_m: Vec<PairVertex>,
    pub m1: Vec<PairVertex>,
    pub m2: Vec<PairVertex>,
}

impl Bipartition {
    pub fn in_bar_m(&self, a: usize, b: usize) -> bool {
        a != b && self.bar_m.binary_search(&PairVertex::new(a, b)).is_ok()
    }

    pub fn in_m1(&self, a: usize, b: usize) -> bool {
        a != b && self.m1.binary_search(&PairVertex::new(a, b)).is_ok()
    }

    pub fn in_m2(&self, a: usize, b: usize) -> bool {
        a != b && self.m2.binary_search(&PairVertex::new(a, b)).is_ok()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "failure", rename_all = "snake_case")]
pub enum StructureFailure {
    MissingBarEdge { vertex: PairVertex },
    MBarMEdge { u: PairVertex, v: PairVertex },
    SoftEdgeInBarM { u: PairVertex, v: PairVertex },
    OddCycle { u: PairVertex, v: PairVertex },
    Inconsistent { vertex: PairVertex },
}

pub fn split_and_bipartition(g: &PairGraph) -> std::result::Result<Bipartition, StructureFailure> {
    let looped = |v: PairVertex| g.self_loop(v).is_some();
    let (bar_m, m): (Vec<PairVertex>, Vec<PairVertex>) = g.vertices.iter().partition(|&&v| looped(v));
    for &v in &g.vertices {
        if g.edge(v, v.bar()).is_none() {
            return Err(StructureFailure::MissingBarEdge { vertex: v });
        }
    }
    for e in g.edges.iter().filter(|e| !e.is_loop()) {
        match (looped(e.u), looped(e.v)) {
            (true, true) if e.kind == EdgeKind::Soft => return Err(StructureFailure::SoftEdgeInBarM { u: e.u, v: e.v }),
            (true, false) | (false, true) => return Err(StructureFailure::MBarMEdge { u: e.u, v: e.v }),
            _ => {}
        }
    }
    let mut side: BTreeMap<PairVertex, bool> = BTreeMap::new();
    for &seed in &m {
        if side.contains_key(&seed) {
            continue;
        }
        side.insert(seed, true);
        let mut queue = VecDeque::from([seed]);
        while let Some(u) = queue.pop_front() {
            let su = side[&u];
            for w in g.neighbours(u) {
                match side.get(&w) {
                    Some(&sw) if sw == su => return Err(StructureFailure::OddCycle { u, v: w }),
                    Some(_) => {}
                    None => {
                        side.insert(w, !su);
                        queue.push_back(w);
                    }
                }
            }
        }
    }
    let m1: Vec<PairVertex> = m.iter().copied().filter(|v| side[v]).collect();
    let m2: Vec<PairVertex> = m.iter().copied().filter(|v| !side[v]).collect();
    for &v in &m {
        if side[&v] == side[&v.bar()] {
            return Err(StructureFailure::Inconsistent { vertex: v });
        }
    }
    Ok(Bipartition { m, bar_m, m1, m2 })
}

/// Whether some `(s,t)` in bar-M has the crisp relation `{(a,s),(b,s),(c,t)}` in `s`.
pub fn ab_c(a: usize, b: usize, c: usize, s: &SaturatedSet, bip: &Bipartition) -> Result<bool> {
    if a == b || b == c || a == c {
        return Ok(false);
    }
    let d = s.base.domain_size();
    for v in &bip.bar_m {
        let rho = WeightedRelation::crisp(d, 2, &[&[a, v.a], &[b, v.a], &[c, v.b]]);
        if matches!(contains_crisp(s, &rho)?, Lookup::Found { .. }) {
            return Ok(true);
        }
    }
    Ok(false)
}

fn pair_tables(d: usize, f: impl Fn(usize, usize) -> (usize, usize)) -> MultimorphismCandidate {
    let first = OpTable::from_fn(d, 2, |t| f(t[0], t[1]).0);
    let second = OpTable::from_fn(d, 2, |t| f(t[0], t[1]).1);
    MultimorphismCandidate::new(vec![first, second]).expect("binary pair")
}

pub fn build_stp(bip: &Bipartition, d: usize) -> MultimorphismCandidate {
    pair_tables(d, |x, y| if bip.in_m2(x, y) { (y, x) } else { (x, y) })
}

/// The MJN tables, with cases tried in order. Errors when two applicable
/// cases disagree, which the structure lemmas rule out on a complete graph.
pub fn build_mjn(bip: &Bipartition, d: usize, abc: &BTreeSet<(usize, usize, usize)>) -> Result<MultimorphismCandidate> {
    let mu = |a, b, c| abc.contains(&(a, b, c));
    let mut outs = Vec::with_capacity(d * d * d);
    for t in TupleIter::new(d, 3) {
        let (x, y, z) = (t[0], t[1], t[2]);
        let mut cases = Vec::new();
        if (x == y && bip.in_bar_m(y, z)) || mu(x, y, z) {
            cases.push([x, y, z]);
        }
        if (z == x && bip.in_bar_m(x, y)) || mu(z, x, y) {
            cases.push([z, x, y]);
        }
        if (y == z && bip.in_bar_m(z, x)) || mu(y, z, x) {
            cases.push([y, z, x]);
        }
        if cases.windows(2).any(|w| w[0] != w[1]) {
            return Err(invalid(format!("MJN cases disagree on ({x},{y},{z})")));
        }
        outs.push(cases.first().copied().unwrap_or([x, y, z]));
    }
    let ops = (0..3).map(|k| OpTable::from_fn(d, 3, |t| outs[t[0] * d * d + t[1] * d + t[2]][k])).collect();
    Ok(MultimorphismCandidate::new(ops).expect("ternary triple"))
}

/// Commutative and conservative on every pair in M.
pub fn stp_shape_ok(stp: &MultimorphismCandidate, bip: &Bipartition) -> bool {
    let (f, g) = (&stp.ops[0], &stp.ops[1]);
    bip.m.iter().all(|v| {
        let (a, b) = (v.a, v.b);
        f.apply(&[a, b]) == f.apply(&[b, a])
            && g.apply(&[a, b]) == g.apply(&[b, a])
            && BTreeSet::from([f.apply(&[a, b]), g.apply(&[a, b])]) == BTreeSet::from([a, b])
    })
}

/// Two majorities and a minority on every `{a,b}` with `(a,b)` in bar-M.
pub fn mjn_shape_ok(mjn: &MultimorphismCandidate, bip: &Bipartition) -> bool {
    bip.bar_m.iter().all(|v| {
        let labels = [v.a, v.b];
        (0..8).all(|m| {
            let t: Vec<usize> = (0..3).map(|k| labels[m >> k & 1]).collect();
            let maj = if t[0] == t[1] || t[0] == t[2] { t[0] } else { t[1] };
            let min = if t[0] == t[1] { t[2] } else if t[0] == t[2] { t[1] } else { t[0] };
            mjn.ops[0].apply(&t) == maj && mjn.ops[1].apply(&t) == maj && mjn.ops[2].apply(&t) == min
        })
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict")]
pub enum ConservativeVerdict {
    Tractable {
        bipartition: Bipartition,
        stp: MultimorphismCandidate,
        stp_check: MmVerdict,
        mjn: MultimorphismCandidate,
        mjn_check: MmVerdict,
        ab_c: Vec<(usize, usize, usize)>,
        truncated: bool,
    },
    PlanarlyIntractable {
        witness: SoftLoopWitness,
    },
    Unknown {
        reason: String,
        truncated: bool,
    },
}

pub fn classify_conservative(lang: &Language, budget: Budget) -> Result<ConservativeVerdict> {
    let (graph, s) = PairGraph::build(lang, budget)?;
    classify_from_graph(lang, &graph, &s)
}

pub fn classify_from_graph(lang: &Language, graph: &PairGraph, s: &SaturatedSet) -> Result<ConservativeVerdict> {
    let d = lang.domain_size();
    let truncated = graph.truncated;
    let unknown = |reason: String| Ok(ConservativeVerdict::Unknown { reason, truncated });
    if let Some(witness) = detect_soft_self_loop(graph)? {
        let replayed = witness.soft_relation.derivation.replay(lang)?;
        if replayed != witness.soft_relation.relation {
            return unknown("soft relation does not replay".into());
        }
        return Ok(ConservativeVerdict::PlanarlyIntractable { witness });
    }
    let bip = match split_and_bipartition(graph) {
        Ok(b) => b,
        Err(f) => return unknown(format!("graph structure: {f:?}")),
    };
    let mut abc = BTreeSet::new();
    for t in TupleIter::new(d, 3) {
        if ab_c(t[0], t[1], t[2], s, &bip)? {
            abc.insert((t[0], t[1], t[2]));
        }
    }
    let stp = build_stp(&bip, d);
    let mjn = match build_mjn(&bip, d, &abc) {
        Ok(m) => m,
        Err(e) => return unknown(e.to_string()),
    };
    if !stp_shape_ok(&stp, &bip) {
        return unknown("STP is not commutative and conservative on M".into());
    }
    if !mjn_shape_ok(&mjn, &bip) {
        return unknown("MJN is not majority/minority on bar-M".into());
    }
    let stp_check = is_multimorphism(&stp, lang)?;
    if !stp_check.holds() {
        return unknown(format!("STP fails: {stp_check:?}"));
    }
    let mjn_check = is_multimorphism(&mjn, lang)?;
    if mjn_check != MmVerdict::HoldsWithEquality {
        return unknown(format!("MJN does not hold with equality: {mjn_check:?}"));
    }
    Ok(ConservativeVerdict::Tractable {
        bipartition: bip,
        stp,
        stp_check,
        mjn,
        mjn_check,
        ab_c: abc.into_iter().collect(),
        truncated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(lang: &Language) -> (PairGraph, SaturatedSet) {
        PairGraph::build(lang, Budget::for_language(lang)).unwrap()
    }

    fn v(a: usize, b: usize) -> PairVertex {
        PairVertex::new(a, b)
    }

    fn single(name: &str, g: WeightedRelation) -> Language {
        Language::from_pairs(g.domain_size(), vec![(name, g)]).unwrap()
    }

    fn chi_delta() -> Language {
        let chi = WeightedRelation::crisp(3, 2, &[&[0, 0], &[1, 0], &[2, 1]]);
        let delta = WeightedRelation::crisp(3, 2, &[&[0, 1], &[1, 0]]);
        Language::from_pairs(3, vec![("chi", chi), ("delta", delta)]).unwrap()
    }

    #[test]
    fn cut_has_soft_loop() {
        let lang = catalog::lang_cut();
        let (g, _) = graph(&lang);
        g.verify(&lang).unwrap();
        let w = detect_soft_self_loop(&g).unwrap().unwrap();
        assert_eq!(w.vertex, v(0, 1));
        assert_eq!((w.edge.p.clone(), w.edge.q.clone()), (ExtValue::zero(), ExtValue::zero()));
        assert_eq!((w.edge.big_a.clone(), w.edge.big_b.clone()), (ExtValue::one(), ExtValue::one()));
        assert_eq!(w.soft_relation.derivation.replay(&lang).unwrap(), w.soft_relation.relation);
    }

    #[test]
    fn neq_has_hard_loop() {
        let lang = single("neq", catalog::rho_neq());
        let (g, _) = graph(&lang);
        assert_eq!(g.self_loop(v(0, 1)).unwrap().kind, EdgeKind::Hard);
        assert!(detect_soft_self_loop(&g).unwrap().is_none());
        let bip = split_and_bipartition(&g).unwrap();
        assert!(bip.m.is_empty());
        assert_eq!(bip.bar_m, vec![v(0, 1), v(1, 0)]);
    }

    #[test]
    fn nand_has_soft_loop() {
        let lang = single("nand", catalog::rho_nand());
        let w = detect_soft_self_loop(&graph(&lang).0).unwrap().unwrap();
        assert_eq!(w.vertex, v(0, 1));
    }

    #[test]
    fn imp_graph() {
        let lang = catalog::lang_imp();
        let (g, _) = graph(&lang);
        assert!(g.edges.iter().all(|e| !e.is_loop()));
        // γ_imp(0,1) is finite, so the definition makes this edge soft.
        assert_eq!(g.edges.len(), 1);
        assert_eq!(g.edge(v(0, 1), v(1, 0)).unwrap().kind, EdgeKind::Soft);
        let bip = split_and_bipartition(&g).unwrap();
        assert_eq!((bip.m1.clone(), bip.m2.clone()), (vec![v(0, 1)], vec![v(1, 0)]));
        let stp = build_stp(&bip, 2);
        assert_eq!(stp.ops[0], catalog::op_min());
        assert_eq!(stp.ops[1], catalog::op_max());
    }

    #[test]
    fn equality_on_three_labels() {
        let lang = single("eq", catalog::rho_eq_on(3));
        let bip = split_and_bipartition(&graph(&lang).0).unwrap();
        assert_eq!(bip.m.len(), 6);
        for p in &bip.m1 {
            assert!(bip.m2.contains(&p.bar()));
        }
    }

    #[test]
    fn ab_c_examples() {
        let lang = chi_delta();
        let (g, s) = graph(&lang);
        let bip = split_and_bipartition(&g).unwrap();
        assert!(bip.in_bar_m(0, 1));
        assert!(ab_c(0, 1, 2, &s, &bip).unwrap());
        assert!(!ab_c(0, 2, 1, &s, &bip).unwrap());
        let bool_lang = catalog::lang_imp();
        let (bg, bs) = graph(&bool_lang);
        let bb = split_and_bipartition(&bg).unwrap();
        assert!(!ab_c(0, 1, 0, &bs, &bb).unwrap());
    }

    #[test]
    fn mjn_on_neq() {
        let bip = Bipartition { m: vec![], bar_m: vec![v(0, 1), v(1, 0)], m1: vec![], m2: vec![] };
        let mjn = build_mjn(&bip, 2, &BTreeSet::new()).unwrap();
        assert_eq!(mjn.ops[2].apply(&[0, 0, 1]), 1);
        assert_eq!(mjn.ops[0].apply(&[1, 1, 1]), 1);
        assert!(mjn_shape_ok(&mjn, &bip));
    }

    #[test]
    fn verdicts() {
        let cut = classify_conservative(&catalog::lang_cut(), Budget::for_language(&catalog::lang_cut())).unwrap();
        assert!(matches!(cut, ConservativeVerdict::PlanarlyIntractable { .. }));
        let imp = catalog::lang_imp();
        let ConservativeVerdict::Tractable { bipartition, stp_check, .. } =
            classify_conservative(&imp, Budget::for_language(&imp)).unwrap()
        else {
            panic!("imp should be tractable");
        };
        assert!(bipartition.bar_m.is_empty());
        assert!(stp_check.holds());
        let neq = single("neq", catalog::rho_neq());
        let ConservativeVerdict::Tractable { mjn_check, .. } = classify_conservative(&neq, Budget::for_language(&neq)).unwrap()
        else {
            panic!("neq should be tractable");
        };
        assert_eq!(mjn_check, MmVerdict::HoldsWithEquality);
        let cd = chi_delta();
        assert!(matches!(
            classify_conservative(&cd, Budget::for_language(&cd)).unwrap(),
            ConservativeVerdict::Tractable { .. }
        ));
    }

    #[test]
    fn swap_edges_from_ternary() {
        // γ(x,y,z) = cut(x,z): the cut edge must appear through the ternary relation.
        let g = WeightedRelation::from_fn(2, 3, |t| catalog::gamma_cut().get(&[t[0], t[2]]).clone());
        let lang = single("g", g);
        assert!(!swap_binaries(&lang, 3).is_empty());
        assert!(detect_soft_self_loop(&graph(&lang).0).unwrap().is_some());
    }

    #[test]
    fn dot_output() {
        let lang = single("neq", catalog::rho_neq());
        let dot = graph(&lang).0.to_dot();
        assert!(dot.starts_with("graph pairs {"));
        assert!(dot.contains("fillcolor=lightgray"));
        let cut = graph(&catalog::lang_cut()).0.to_dot();
        assert!(cut.contains("style=dashed"));
    }
}
