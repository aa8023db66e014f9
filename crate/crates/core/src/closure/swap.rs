use serde::{Deserialize, Serialize};

use super::{canonicalize, CanonicalWRel};
use crate::error::{Error, Result};
use crate::express::{self, Derivation};
use crate::relation::{TuplePartition, WeightedRelation};

/// A binary relation `γ_ij` on original coordinates `(i, j)`, `i ∈ I`, `j ∈ J`, with
/// `γ_ij(x_i,x_j) + γ_ij(y_i,y_j) < γ_ij(x_i,y_j) + γ_ij(y_i,x_j)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SwapWitness {
    pub i: usize,
    pub j: usize,
    pub relation: WeightedRelation,
    pub derivation: Derivation,
}

impl SwapWitness {
    pub fn canonical(&self) -> (CanonicalWRel, Derivation) {
        let c = canonicalize(&self.relation);
        let der = c.tag(self.derivation.clone());
        (c, der)
    }
}

struct State {
    rel: WeightedRelation,
    der: Derivation,
    orig: Vec<usize>,
    in_i: Vec<bool>,
    x: Vec<usize>,
    y: Vec<usize>,
}

impl State {
    fn mixed(&self, a: &[usize], b: &[usize]) -> Vec<usize> {
        (0..a.len()).map(|p| if self.in_i[p] { a[p] } else { b[p] }).collect()
    }

    fn strict(&self) -> bool {
        let lhs = self.rel.get(&self.x) + self.rel.get(&self.y);
        let rhs = self.rel.get(&self.mixed(&self.x, &self.y)) + self.rel.get(&self.mixed(&self.y, &self.x));
        lhs.is_finite() && lhs < rhs
    }

    fn keep(&mut self, drop: usize) {
        self.orig.remove(drop);
        self.in_i.remove(drop);
        self.x.remove(drop);
        self.y.remove(drop);
    }
}

fn missing(subset: &[usize]) -> Error {
    Error::Precondition(format!("no crisp unary {subset:?} available"))
}

/// Follows the recursion that shrinks a relation violating the swap
/// inequality for `(x, y)` and the partition `I | J` down to two coordinates.
/// `unary` supplies derivations of crisp unaries used for pinning and domain
/// restriction.
pub fn swap_witness(
    g: &WeightedRelation,
    der: &Derivation,
    part: &TuplePartition,
    x: &[usize],
    y: &[usize],
    unary: &dyn Fn(&[usize]) -> Option<Derivation>,
) -> Result<SwapWitness> {
    let r = g.arity();
    if part.arity != r || x.len() != r || y.len() != r {
        return Err(Error::Invalid("partition and tuples must match the arity".into()));
    }
    let in_i: Vec<bool> = (0..r).map(|c| part.in_i(c)).collect();
    if !in_i.iter().any(|&b| b) || in_i.iter().all(|&b| b) {
        return Err(Error::Precondition("both sides of the partition must be non-empty".into()));
    }
    let mut st = State { rel: g.clone(), der: der.clone(), orig: (0..r).collect(), in_i, x: x.to_vec(), y: y.to_vec() };
    if !g.is_feasible(x) || !g.is_feasible(y) || !st.strict() {
        return Err(Error::Precondition("x, y must be feasible and violate the swap inequality".into()));
    }
    let d = g.domain_size();

    while st.orig.len() > 2 {
        let n_i = st.in_i.iter().filter(|&&b| b).count();
        let n_j = st.in_i.len() - n_i;
        // The side that gets split plays J; k is its last position.
        let split_side = n_j < 2;
        debug_assert!(n_i >= 2 || n_j >= 2);
        let k = (0..st.orig.len()).rev().find(|&p| st.in_i[p] == split_side).expect("side is non-empty");
        let tri = |st: &State, a: &[usize], b: &[usize], c: &[usize]| -> Vec<usize> {
            (0..st.orig.len())
                .map(|p| if p == k { c[p] } else if st.in_i[p] != split_side { a[p] } else { b[p] })
                .collect()
        };
        let (x, y) = (st.x.clone(), st.y.clone());
        let yxy = tri(&st, &y, &x, &y);
        let xyx = tri(&st, &x, &y, &x);
        if !st.rel.is_feasible(&yxy) && !st.rel.is_feasible(&xyx) {
            let mut subset = vec![x[k], y[k]];
            subset.sort_unstable();
            subset.dedup();
            if subset.len() < d {
                let via = unary(&subset).ok_or_else(|| missing(&subset))?;
                st.rel = express::domain_restrict(&st.rel, k, &subset)?;
                st.der = st.der.clone().restrict_domain(k, subset, via);
            }
            st.rel = express::minimise(&st.rel, k)?;
            st.der = st.der.clone().minimise(k);
            st.keep(k);
        } else {
            if !st.rel.is_feasible(&yxy) {
                std::mem::swap(&mut st.x, &mut st.y);
            }
            let (x, y) = (st.x.clone(), st.y.clone());
            let xxx = x.clone();
            let yxy = tri(&st, &y, &x, &y);
            let xxy = tri(&st, &x, &x, &y);
            let yxx = tri(&st, &y, &x, &x);
            let lhs = st.rel.get(&xxx) + st.rel.get(&yxy);
            let rhs = st.rel.get(&xxy) + st.rel.get(&yxx);
            if lhs < rhs {
                // Pin J' to x; y becomes (y_I, y_k) restricted.
                st.y = yxy;
                let pins: Vec<usize> =
                    (0..st.orig.len()).filter(|&p| p != k && st.in_i[p] == split_side).collect();
                for &p in pins.iter().rev() {
                    let a = st.x[p];
                    let via = unary(&[a]).ok_or_else(|| missing(&[a]))?;
                    st.rel = express::pin(&st.rel, p, a)?;
                    st.der = st.der.clone().pin(p, a, via);
                    st.keep(p);
                }
            } else {
                // Pin k to y_k; x becomes (x_I, x_J') restricted.
                st.x = xxy;
                let a = st.y[k];
                let via = unary(&[a]).ok_or_else(|| missing(&[a]))?;
                st.rel = express::pin(&st.rel, k, a)?;
                st.der = st.der.clone().pin(k, a, via);
                st.keep(k);
            }
        }
        if !st.rel.is_feasible(&st.x) || !st.rel.is_feasible(&st.y) || !st.strict() {
            return Err(Error::Precondition("swap recursion lost the violation".into()));
        }
    }

    if st.in_i[1] {
        st.rel = express::join(&st.rel, &crate::catalog::rho_eq_on(d), 0, 0)?;
        st.der = st.der.clone().join(Derivation::Equality, 0, 0);
        st.orig.swap(0, 1);
        st.in_i.swap(0, 1);
        st.x.swap(0, 1);
        st.y.swap(0, 1);
    }
    Ok(SwapWitness { i: st.orig[0], j: st.orig[1], relation: st.rel, derivation: st.der })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::relation::Language;
    use crate::value::ExtValue;

    fn free(d: usize) -> impl Fn(&[usize]) -> Option<Derivation> {
        move |s: &[usize]| Some(Derivation::unary(catalog::rho_subset(d, s)))
    }

    fn check(lang: &Language, w: &SwapWitness, x: &[usize], y: &[usize]) {
        assert_eq!(w.derivation.replay(lang).unwrap(), w.relation);
        let (i, j) = (w.i, w.j);
        let g = &w.relation;
        let lhs = g.get(&[x[i], x[j]]) + g.get(&[y[i], y[j]]);
        assert!(lhs.is_finite());
        assert!(lhs < g.get(&[x[i], y[j]]) + g.get(&[y[i], x[j]]));
    }

    #[test]
    fn binary_is_returned_unchanged() {
        let g = catalog::gamma_cut();
        let part = TuplePartition::new(2, [0]).unwrap();
        let w = swap_witness(&g, &Derivation::base("gamma_cut"), &part, &[0, 1], &[1, 0], &free(2)).unwrap();
        assert_eq!((w.i, w.j), (0, 1));
        assert_eq!(w.relation, g);
        assert_eq!(w.derivation, Derivation::base("gamma_cut"));
    }

    #[test]
    fn transposes_when_i_is_second() {
        let g = catalog::gamma_imp();
        let lang = Language::from_pairs(2, vec![("imp", g.clone())]).unwrap();
        let part = TuplePartition::new(2, [1]).unwrap();
        let (x, y) = ([0, 0], [1, 1]);
        let w = swap_witness(&g, &Derivation::base("imp"), &part, &x, &y, &free(2)).unwrap();
        assert_eq!((w.i, w.j), (1, 0));
        check(&lang, &w, &x, &y);
    }

    #[test]
    fn embedded_cut() {
        let g = WeightedRelation::from_fn(2, 3, |t| catalog::gamma_cut().get(&[t[0], t[2]]).clone());
        let lang = Language::from_pairs(2, vec![("g", g.clone())]).unwrap();
        let part = TuplePartition::new(3, [0, 1]).unwrap();
        let (x, y) = ([0, 0, 1], [1, 1, 0]);
        let w = swap_witness(&g, &Derivation::base("g"), &part, &x, &y, &free(2)).unwrap();
        assert_eq!((w.i, w.j), (0, 2));
        assert_eq!(w.relation, catalog::gamma_cut());
        check(&lang, &w, &x, &y);
    }

    #[test]
    fn modular_relation_rejected() {
        let g = WeightedRelation::from_fn(2, 4, |t| ExtValue::from_int((t[0] + 2 * t[3]) as i64));
        let part = TuplePartition::new(4, [0, 1]).unwrap();
        let e = swap_witness(&g, &Derivation::base("g"), &part, &[0, 0, 1, 1], &[1, 1, 0, 0], &free(2));
        assert!(matches!(e, Err(Error::Precondition(_))));
    }

    #[test]
    fn three_labels() {
        // Crisp relation whose swap violation needs the domain restriction branch.
        let g = WeightedRelation::crisp(3, 3, &[&[0, 1, 2], &[2, 0, 1]]);
        let lang = Language::from_pairs(3, vec![("g", g.clone())]).unwrap();
        let part = TuplePartition::new(3, [0]).unwrap();
        let (x, y) = ([0, 1, 2], [2, 0, 1]);
        let w = swap_witness(&g, &Derivation::base("g"), &part, &x, &y, &free(3)).unwrap();
        check(&lang, &w, &x, &y);
    }
}
