#![allow(dead_code)]

use planar_vcsp::catalog;
use planar_vcsp::express::{self, Derivation};
use planar_vcsp::value::{int, rat};
use planar_vcsp::{ExtValue, Language, TuplePartition, WeightedRelation};
use rand::Rng;

/// Values in {0, 1, 2, ∞}, at least one finite.
pub fn random_relation(rng: &mut impl Rng, d: usize, r: usize) -> WeightedRelation {
    loop {
        let n = d.pow(r as u32);
        let table: Vec<ExtValue> = (0..n)
            .map(|_| if rng.gen_bool(0.2) { ExtValue::Inf } else { ExtValue::from_int(rng.gen_range(0..3)) })
            .collect();
        let g = WeightedRelation::new(d, r, table).unwrap();
        if !g.feasible_indices().is_empty() {
            return g;
        }
    }
}

pub fn random_crisp(rng: &mut impl Rng, d: usize, r: usize, density: f64) -> WeightedRelation {
    loop {
        let n = d.pow(r as u32);
        let table: Vec<ExtValue> =
            (0..n).map(|_| if rng.gen_bool(density) { ExtValue::zero() } else { ExtValue::Inf }).collect();
        let g = WeightedRelation::new(d, r, table).unwrap();
        if !g.feasible_indices().is_empty() {
            return g;
        }
    }
}

/// `g` and the binary `h`, plus the helpers gadget moves refer to.
pub fn gadget_language(g: WeightedRelation, h: WeightedRelation) -> Language {
    Language::from_pairs(
        2,
        vec![
            ("g", g),
            ("h", h),
            ("r0", catalog::rho0()),
            ("r1", catalog::rho1()),
            ("neq", catalog::rho_neq()),
            ("g0", catalog::gamma0()),
        ],
    )
    .unwrap()
}

/// One random gadget move on top of `der` (arity `r`); `None` when the drawn
/// move does not apply at this arity.
pub fn random_move(rng: &mut impl Rng, der: Derivation, r: usize) -> Option<(Derivation, usize)> {
    let i = rng.gen_range(0..r);
    let a = rng.gen_range(0..2);
    let via = |a: usize| Derivation::base(if a == 0 { "r0" } else { "r1" });
    let neq = || Derivation::base("neq");
    Some(match rng.gen_range(0..15) {
        0 if r >= 2 => (der.minimise(i), r - 1),
        1 if r >= 2 => (der.pin(i, a, via(a)), r - 1),
        2 if r >= 2 => (der.eq_restrict(i), r),
        3 if r >= 2 => (der.neq_restrict(i, neq()), r),
        4 => (der.twist(i, neq()), r),
        5 => (der.add_unary(i, Derivation::base("g0")), r),
        6 => {
            let mu = WeightedRelation::new(2, 1, vec![ExtValue::from_int(rng.gen_range(0..3)), ExtValue::zero()])
                .unwrap();
            (der.add_unary(i, Derivation::unary(mu)), r)
        }
        7 if r >= 2 => (der.add_binary(i, Derivation::base("h")), r),
        8 if r == 2 => (der.join(Derivation::base("h"), rng.gen_range(0..2), rng.gen_range(0..2)), 2),
        9 if r <= 2 => (der.product(Derivation::base("g0")), r + 1),
        10 => (der.scale(rat(rng.gen_range(0..4), rng.gen_range(1..3))), r),
        11 => (der.add_const(int(rng.gen_range(-2..3))), r),
        12 => (der.opt(), r),
        13 => (der.feas(), r),
        14 => (der.restrict_domain(i, vec![a], via(a)), r),
        _ => return None,
    })
}

/// A derivation of one to three random moves over `g` (arity `r`).
pub fn random_derivation(rng: &mut impl Rng, r: usize) -> Derivation {
    let mut der = Derivation::base("g");
    let mut arity = r;
    let moves = rng.gen_range(1..=3);
    let mut done = 0;
    while done < moves {
        if let Some((next, a)) = random_move(rng, der.clone(), arity) {
            der = next;
            arity = a;
            done += 1;
        }
    }
    der
}

fn violates(g: &WeightedRelation, x: &[usize], y: &[usize], mixed_xy: &[usize], mixed_yx: &[usize]) -> bool {
    let lhs = g.get(x) + g.get(y);
    g.is_feasible(x) && g.is_feasible(y) && lhs < g.get(mixed_xy) + g.get(mixed_yx)
}

/// `(x, y)` violates the swap inequality for `part`.
pub fn swap_violation(g: &WeightedRelation, part: &TuplePartition, x: &[usize], y: &[usize]) -> bool {
    violates(g, x, y, &part.mix(x, y), &part.mix(y, x))
}

/// Every binary on `(i, j)` obtained by pinning each other coordinate or
/// minimising it over a subset of size ≥ 2, oriented as `(i, j)`.
pub fn reductions(g: &WeightedRelation, i: usize, j: usize) -> Vec<WeightedRelation> {
    let d = g.domain_size();
    let r = g.arity();
    let subsets: Vec<Vec<usize>> = (1u32..1 << d)
        .filter(|m| m.count_ones() >= 2)
        .map(|m| (0..d).filter(|&a| m >> a & 1 == 1).collect())
        .collect();
    // Per other coordinate: Ok(label) pins, Err(subset) minimises.
    let choices: Vec<Result<usize, Vec<usize>>> =
        (0..d).map(Ok).chain(subsets.into_iter().map(Err)).collect();
    let others: Vec<usize> = (0..r).filter(|&c| c != i && c != j).collect();
    let mut out = Vec::new();
    let mut pick = vec![0usize; others.len()];
    loop {
        let mut rel = g.clone();
        // Highest coordinate first so lower positions stay valid.
        for (&c, &p) in others.iter().zip(&pick).rev() {
            rel = match &choices[p] {
                Ok(a) => express::pin(&rel, c, *a).unwrap(),
                Err(s) => {
                    let restricted =
                        if s.len() < d { express::domain_restrict(&rel, c, s).unwrap() } else { rel };
                    express::minimise(&restricted, c).unwrap()
                }
            };
        }
        if i > j {
            rel = WeightedRelation::from_fn(d, 2, |t| rel.get(&[t[1], t[0]]).clone());
        }
        out.push(rel);
        let mut p = 0;
        loop {
            if p == pick.len() {
                return out;
            }
            pick[p] += 1;
            if pick[p] < choices.len() {
                break;
            }
            pick[p] = 0;
            p += 1;
        }
    }
}

/// Whether the binary `b` on `(i, j)` certifies the swap conclusion for `x, y`.
pub fn binary_violates(b: &WeightedRelation, i: usize, j: usize, x: &[usize], y: &[usize]) -> bool {
    violates(b, &[x[i], x[j]], &[y[i], y[j]], &[x[i], y[j]], &[y[i], x[j]])
}
