use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::catalog;
use crate::error::{invalid, Result};
use crate::express::{self, Derivation};
use crate::ops;
use crate::relation::WeightedRelation;
use crate::value::ExtValue;

/// Which crisp relation to extract from a two-fan.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FanForm {
    /// `{(a1,b2), (b1,a2)}`
    Hard,
    /// `{(b1,b2), (a1,b2), (b1,a2)}`; needs `(b1,b2)` feasible.
    SoftB,
    /// `{(a1,a2), (a1,b2), (b1,a2)}`; needs `(a1,a2)` feasible.
    SoftA,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FanWitness {
    pub relation: WeightedRelation,
    pub derivation: Derivation,
    pub lambda: ExtValue,
}

fn fin(v: &ExtValue) -> Option<BigRational> {
    v.finite().cloned()
}

/// The unary `μ(label) = value`, 0 elsewhere.
fn spike(d: usize, label: usize, value: &BigRational) -> WeightedRelation {
    WeightedRelation::from_fn(d, 1, |t| {
        if t[0] == label { ExtValue::Fin(value.clone()) } else { ExtValue::zero() }
    })
}

/// Opt of `γ` restricted to `{a1,b1} × {a2,b2}` plus two unaries that make the
/// chosen tuples optimal. `der` must replay to `γ`; the restriction and the
/// unaries are free unaries, so the result lives in conservative closures.
/// Returns `None` when `γ(a1,b2)+γ(b1,a2) < γ(a1,a2)+γ(b1,b2)` fails or the
/// requested soft form is unavailable.
pub fn two_fan_opt(
    g: &WeightedRelation,
    der: &Derivation,
    (a1, b1, a2, b2): (usize, usize, usize, usize),
    form: FanForm,
) -> Result<Option<FanWitness>> {
    if g.arity() != 2 {
        return Err(invalid("two_fan_opt needs a binary relation"));
    }
    let d = g.domain_size();
    if [a1, b1, a2, b2].iter().any(|&a| a >= d) || a1 == b1 || a2 == b2 {
        return Err(invalid("two_fan_opt needs pairs of distinct labels inside the domain"));
    }
    let big_a = g.get(&[a1, a2]);
    let big_b = g.get(&[b1, b2]);
    let (Some(p), Some(q)) = (fin(g.get(&[a1, b2])), fin(g.get(&[b1, a2]))) else {
        return Ok(None);
    };
    let pq = &p + &q;
    if ExtValue::Fin(pq.clone()) >= big_a + big_b {
        return Ok(None);
    }
    let two = BigRational::from_integer(2.into());
    let one = BigRational::from_integer(1.into());
    let lambda = match form {
        FanForm::Hard => match (fin(big_a), fin(big_b)) {
            (Some(a), Some(b)) => (&pq - &a + &b) / &two,
            (Some(a), None) => &pq - &a + &one,
            (None, Some(b)) => b - &one,
            (None, None) => BigRational::zero(),
        },
        FanForm::SoftB => match fin(big_b) {
            Some(b) => b,
            None => return Ok(None),
        },
        FanForm::SoftA => match fin(big_a) {
            Some(a) => &pq - a,
            None => return Ok(None),
        },
    };
    let mu1 = spike(d, a1, &(&lambda - &p));
    let mu2 = spike(d, a2, &(&lambda - &q));

    let mut rel = g.clone();
    let mut out = der.clone();
    for (coord, pair) in [(0, [a1.min(b1), a1.max(b1)]), (1, [a2.min(b2), a2.max(b2)])] {
        if d > 2 {
            rel = express::domain_restrict(&rel, coord, &pair)?;
            out = out.restrict_domain(coord, pair.to_vec(), Derivation::unary(catalog::rho_subset(d, &pair)));
        }
    }
    rel = express::add_unary(&rel, 0, &mu1)?;
    rel = express::add_unary(&rel, 1, &mu2)?;
    out = out.add_unary(0, Derivation::unary(mu1)).add_unary(1, Derivation::unary(mu2)).opt();
    let relation = ops::opt(&rel);

    let mut want: Vec<[usize; 2]> = vec![[a1, b2], [b1, a2]];
    match form {
        FanForm::Hard => {}
        FanForm::SoftB => want.push([b1, b2]),
        FanForm::SoftA => want.push([a1, a2]),
    }
    let expected = WeightedRelation::crisp(d, 2, &want.iter().map(|t| &t[..]).collect::<Vec<_>>());
    if relation != expected {
        return Err(invalid("two-fan construction did not isolate the expected tuples"));
    }
    Ok(Some(FanWitness { relation, derivation: out, lambda: ExtValue::Fin(lambda) }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relation::Language;

    fn run(g: WeightedRelation, q: (usize, usize, usize, usize), form: FanForm) -> Option<WeightedRelation> {
        let lang = Language::from_pairs(g.domain_size(), vec![("g", g.clone())]).unwrap();
        let w = two_fan_opt(&g, &Derivation::base("g"), q, form).unwrap()?;
        assert_eq!(w.derivation.replay(&lang).unwrap(), w.relation);
        Some(w.relation)
    }

    #[test]
    fn cut_gives_neq() {
        assert_eq!(run(catalog::gamma_cut(), (0, 1, 0, 1), FanForm::Hard), Some(catalog::rho_neq()));
    }

    #[test]
    fn equality_gives_nothing() {
        assert_eq!(run(catalog::rho_eq(), (0, 1, 0, 1), FanForm::Hard), None);
    }

    #[test]
    fn implication_gives_equality() {
        assert_eq!(run(catalog::gamma_imp(), (0, 1, 1, 0), FanForm::Hard), Some(catalog::rho_eq()));
    }

    #[test]
    fn soft_forms() {
        let nand_like = run(catalog::gamma_cut(), (0, 1, 0, 1), FanForm::SoftB).unwrap();
        assert_eq!(nand_like, WeightedRelation::crisp(2, 2, &[&[0, 1], &[1, 0], &[1, 1]]));
        let or_like = run(catalog::gamma_cut(), (0, 1, 0, 1), FanForm::SoftA).unwrap();
        assert_eq!(or_like, catalog::rho_nand());
        assert_eq!(run(catalog::rho_neq(), (0, 1, 0, 1), FanForm::SoftA), None);
    }

    #[test]
    fn three_labels_restrict_first() {
        let got = run(catalog::gamma_col(3), (0, 2, 0, 2), FanForm::Hard);
        assert_eq!(got, Some(WeightedRelation::crisp(3, 2, &[&[0, 2], &[2, 0]])));
    }

    #[test]
    fn non_binary_is_an_error() {
        assert!(two_fan_opt(&catalog::rho_nae(), &Derivation::base("x"), (0, 1, 0, 1), FanForm::Hard).is_err());
    }
}
