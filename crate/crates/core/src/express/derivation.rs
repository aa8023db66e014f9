use std::sync::Arc;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::catalog;
use crate::error::{invalid, Result};
use crate::ops;
use crate::relation::{Language, WeightedRelation};
use crate::value::rational_str;

type Node = Arc<Derivation>;

/// How a relation is obtained from a language. Every node has exact table
/// semantics (see [`Derivation::replay`]) and a plane gadget.
///
/// `via` children carry the derivation of the helper relation a gadget needs:
/// `{a}` for pinning, the subset relation for domain restriction and `≠` for
/// twisting and ≠-restriction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Derivation {
    Base { name: String },
    /// A unary relation available for free (conservative languages).
    Unary { table: WeightedRelation },
    Equality,
    AddUnary { coord: usize, unary: Node, arg: Node },
    AddBinary { coord: usize, binary: Node, arg: Node },
    Minimise { coord: usize, arg: Node },
    Join { left_shared: usize, right_shared: usize, left: Node, right: Node },
    RestrictDomain { coord: usize, subset: Vec<usize>, via: Node, arg: Node },
    Pin { coord: usize, label: usize, via: Node, arg: Node },
    EqRestrict { coord: usize, arg: Node },
    NeqRestrict { coord: usize, via: Node, arg: Node },
    Twist { coord: usize, via: Node, arg: Node },
    Opt { arg: Node },
    Feas { arg: Node },
    Scale {
        #[serde(with = "rational_str")]
        factor: BigRational,
        arg: Node,
    },
    AddConst {
        #[serde(with = "rational_str")]
        constant: BigRational,
        arg: Node,
    },
    Product { left: Node, right: Node },
}

fn expect_table(what: &str, got: &WeightedRelation, want: &WeightedRelation) -> Result<()> {
    if got != want {
        return Err(invalid(format!("{what} helper does not evaluate to the required relation")));
    }
    Ok(())
}

impl Derivation {
    pub fn base(name: impl Into<String>) -> Derivation {
        Derivation::Base { name: name.into() }
    }

    pub fn unary(table: WeightedRelation) -> Derivation {
        Derivation::Unary { table }
    }

    fn wrap(self) -> Node {
        Arc::new(self)
    }

    pub fn add_unary(self, coord: usize, unary: Derivation) -> Derivation {
        Derivation::AddUnary { coord, unary: unary.wrap(), arg: self.wrap() }
    }

    pub fn add_binary(self, coord: usize, binary: Derivation) -> Derivation {
        Derivation::AddBinary { coord, binary: binary.wrap(), arg: self.wrap() }
    }

    pub fn minimise(self, coord: usize) -> Derivation {
        Derivation::Minimise { coord, arg: self.wrap() }
    }

    pub fn join(self, right: Derivation, left_shared: usize, right_shared: usize) -> Derivation {
        Derivation::Join { left_shared, right_shared, left: self.wrap(), right: right.wrap() }
    }

    pub fn restrict_domain(self, coord: usize, subset: Vec<usize>, via: Derivation) -> Derivation {
        Derivation::RestrictDomain { coord, subset, via: via.wrap(), arg: self.wrap() }
    }

    pub fn pin(self, coord: usize, label: usize, via: Derivation) -> Derivation {
        Derivation::Pin { coord, label, via: via.wrap(), arg: self.wrap() }
    }

    pub fn eq_restrict(self, coord: usize) -> Derivation {
        Derivation::EqRestrict { coord, arg: self.wrap() }
    }

    pub fn neq_restrict(self, coord: usize, via: Derivation) -> Derivation {
        Derivation::NeqRestrict { coord, via: via.wrap(), arg: self.wrap() }
    }

    pub fn twist(self, coord: usize, via: Derivation) -> Derivation {
        Derivation::Twist { coord, via: via.wrap(), arg: self.wrap() }
    }

    pub fn opt(self) -> Derivation {
        Derivation::Opt { arg: self.wrap() }
    }

    pub fn feas(self) -> Derivation {
        Derivation::Feas { arg: self.wrap() }
    }

    pub fn scale(self, factor: BigRational) -> Derivation {
        Derivation::Scale { factor, arg: self.wrap() }
    }

    pub fn add_const(self, constant: BigRational) -> Derivation {
        Derivation::AddConst { constant, arg: self.wrap() }
    }

    pub fn product(self, right: Derivation) -> Derivation {
        Derivation::Product { left: self.wrap(), right: right.wrap() }
    }

    pub fn children(&self) -> Vec<&Derivation> {
        use Derivation::*;
        match self {
            Base { .. } | Unary { .. } | Equality => vec![],
            AddUnary { unary: h, arg, .. } | AddBinary { binary: h, arg, .. } => vec![h, arg],
            RestrictDomain { via, arg, .. } | Pin { via, arg, .. } => vec![via, arg],
            NeqRestrict { via, arg, .. } | Twist { via, arg, .. } => vec![via, arg],
            Join { left, right, .. } | Product { left, right } => vec![left, right],
            Minimise { arg, .. }
            | EqRestrict { arg, .. }
            | Opt { arg }
            | Feas { arg }
            | Scale { arg, .. }
            | AddConst { arg, .. } => vec![arg],
        }
        .into_iter()
        .map(|n| n.as_ref())
        .collect()
    }

    /// Number of nodes, counting shared subtrees once per use.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.children().iter().map(|c| c.depth()).max().unwrap_or(0)
    }

    pub fn uses_opt(&self) -> bool {
        matches!(self, Derivation::Opt { .. }) || self.children().iter().any(|c| c.uses_opt())
    }

    /// False when some `Feas` node sits above an `Opt` node; such trees have
    /// table semantics but no plane realization.
    pub fn realizable(&self) -> bool {
        match self {
            Derivation::Feas { arg } if arg.uses_opt() => false,
            _ => self.children().iter().all(|c| c.realizable()),
        }
    }

    /// Canonical text form; used for deterministic tie-breaking.
    pub fn encode(&self) -> String {
        serde_json::to_string(self).expect("derivations serialize")
    }

    /// Exact table semantics over `lang`.
    pub fn replay(&self, lang: &Language) -> Result<WeightedRelation> {
        use Derivation::*;
        let d = lang.domain_size();
        Ok(match self {
            Base { name } => lang
                .get(name)
                .cloned()
                .ok_or_else(|| invalid(format!("relation {name:?} is not in the language")))?,
            Unary { table } => {
                if table.arity() != 1 || table.domain_size() != d {
                    return Err(invalid("free unary has the wrong shape"));
                }
                table.clone()
            }
            Equality => catalog::rho_eq_on(d),
            AddUnary { coord, unary, arg } => super::add_unary(&arg.replay(lang)?, *coord, &unary.replay(lang)?)?,
            AddBinary { coord, binary, arg } => {
                super::add_binary(&arg.replay(lang)?, *coord, &binary.replay(lang)?)?
            }
            Minimise { coord, arg } => super::minimise(&arg.replay(lang)?, *coord)?,
            Join { left_shared, right_shared, left, right } => {
                super::join(&left.replay(lang)?, &right.replay(lang)?, *left_shared, *right_shared)?
            }
            RestrictDomain { coord, subset, via, arg } => {
                expect_table("domain restriction", &via.replay(lang)?, &catalog::rho_subset(d, subset))?;
                super::domain_restrict(&arg.replay(lang)?, *coord, subset)?
            }
            Pin { coord, label, via, arg } => {
                expect_table("pinning", &via.replay(lang)?, &catalog::rho_const(d, *label))?;
                super::pin(&arg.replay(lang)?, *coord, *label)?
            }
            EqRestrict { coord, arg } => super::eq_restrict(&arg.replay(lang)?, *coord)?,
            NeqRestrict { coord, via, arg } => {
                expect_table("≠-restriction", &via.replay(lang)?, &catalog::gamma_col(d))?;
                super::neq_restrict(&arg.replay(lang)?, *coord)?
            }
            Twist { coord, via, arg } => {
                expect_table("twist", &via.replay(lang)?, &catalog::gamma_col(d))?;
                super::twist(&arg.replay(lang)?, *coord)?
            }
            Opt { arg } => ops::opt(&arg.replay(lang)?),
            Feas { arg } => ops::feas(&arg.replay(lang)?),
            Scale { factor, arg } => ops::scale(&arg.replay(lang)?, factor)?,
            AddConst { constant, arg } => ops::add_constant(&arg.replay(lang)?, constant),
            Product { left, right } => super::product(&left.replay(lang)?, &right.replay(lang)?)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value::{int, rat};

    #[test]
    fn replay_neq_from_nae() {
        let d = Derivation::base("rho_nae").eq_restrict(0).minimise(0);
        assert_eq!(d.replay(&catalog::lang_nae()).unwrap(), catalog::rho_neq());
        assert_eq!(d.size(), 3);
        assert!(!d.uses_opt());
    }

    #[test]
    fn helper_must_match() {
        let lang = catalog::lang_cut();
        let neq = Derivation::base("gamma_cut").opt();
        let ok = Derivation::base("gamma_cut").twist(0, neq.clone());
        assert!(ok.replay(&lang).is_ok());
        let bad = Derivation::base("gamma_cut").twist(0, Derivation::base("gamma_cut"));
        assert!(bad.replay(&lang).is_err());
    }

    #[test]
    fn serde_round_trip() {
        let d = Derivation::base("gamma_cut")
            .scale(rat(3, 2))
            .add_const(int(-1))
            .product(Derivation::unary(catalog::gamma0()))
            .opt();
        let s = d.encode();
        let back: Derivation = serde_json::from_str(&s).unwrap();
        assert_eq!(back, d);
        assert!(s.contains("\"factor\":\"3/2\""));
    }

    #[test]
    fn unknown_base_is_an_error() {
        assert!(Derivation::base("nope").replay(&catalog::lang_cut()).is_err());
    }
}
