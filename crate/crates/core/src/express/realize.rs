//! Plane gadgets for derivations.
//!
//! A gadget is a rotation system plus a start dart on the outer face; the
//! tuple `v` is the outer vertex walk from the start dart, reversed. All
//! surgery happens in corners of the outer face, so constraint faces are
//! never touched once created.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{nested_opt_multiplier, pi_v_with_cap, Derivation, ExpressibleQuery};
use crate::error::{Error, Result};
use crate::ops;
use crate::plane::{Constraint, Dart, PlaneGraph, PlaneInstance};
use crate::relation::{Language, WeightedRelation};

#[derive(Clone, Debug)]
struct GCon {
    anchor: usize,
    rel: String,
    weight: BigRational,
    /// Opt nodes this constraint sits under.
    opts: Vec<usize>,
}

#[derive(Clone, Debug)]
struct Gadget {
    tails: Vec<usize>,
    twin: Vec<usize>,
    rot: Vec<Vec<usize>>,
    alive: Vec<bool>,
    start: usize,
    cons: Vec<GCon>,
    shift: BigRational,
}

fn pos(list: &[usize], d: usize) -> usize {
    list.iter().position(|&x| x == d).expect("dart in rotation")
}

fn broken(msg: &str) -> Error {
    Error::NotRealizable(format!("gadget surgery failed: {msg}"))
}

impl Gadget {
    /// An `r`-cycle whose inner face carries `con`; reads `(u_0, …, u_{r-1})`.
    fn cycle(r: usize, con: Option<(String, BigRational)>) -> Gadget {
        let mut tails = Vec::with_capacity(2 * r);
        let mut twin = Vec::with_capacity(2 * r);
        for k in 0..r {
            tails.extend([k, (k + 1) % r]);
            twin.extend([2 * k + 1, 2 * k]);
        }
        let rot = (0..r).map(|k| vec![2 * k, 2 * ((k + r - 1) % r) + 1]).collect();
        let cons = con
            .into_iter()
            .map(|(rel, weight)| GCon { anchor: 0, rel, weight, opts: vec![] })
            .collect();
        Gadget {
            tails,
            twin,
            rot,
            alive: vec![true; r],
            start: 2 * ((2 * r - 2) % r) + 1,
            cons,
            shift: BigRational::zero(),
        }
    }

    /// One vertex with two loops, reading `(x, x)`.
    fn equality() -> Gadget {
        Gadget {
            tails: vec![0; 4],
            twin: vec![1, 0, 3, 2],
            rot: vec![vec![0, 1, 2, 3]],
            alive: vec![true],
            start: 0,
            cons: vec![],
            shift: BigRational::zero(),
        }
    }

    fn succ(&self, d: usize) -> usize {
        let r = &self.rot[self.tails[d]];
        r[(pos(r, d) + 1) % r.len()]
    }

    fn walk(&self, d: usize) -> Vec<usize> {
        let mut out = vec![d];
        let mut cur = self.succ(self.twin[d]);
        while cur != d {
            out.push(cur);
            cur = self.succ(self.twin[cur]);
        }
        out
    }

    fn tuple(&self) -> Vec<usize> {
        self.walk(self.start).iter().rev().map(|&d| self.tails[d]).collect()
    }

    fn corner(&self, i: usize) -> usize {
        let o = self.walk(self.start);
        o[o.len() - 1 - i]
    }

    fn new_edge(&mut self, u: usize, w: usize) -> (usize, usize) {
        let a = self.tails.len();
        self.tails.extend([u, w]);
        self.twin.extend([a + 1, a]);
        (a, a + 1)
    }

    fn insert_before(&mut self, new: usize, before: usize) {
        let v = self.tails[before];
        let p = pos(&self.rot[v], before);
        self.rot[v].insert(p, new);
    }

    fn insert_after(&mut self, new: usize, after: usize) {
        let v = self.tails[after];
        let p = pos(&self.rot[v], after);
        self.rot[v].insert(p + 1, new);
    }

    /// Picks the start dart on the face of `on_face` so the tuple reads `want`.
    fn set_start(&mut self, on_face: usize, want: &[usize]) -> Result<()> {
        let w = self.walk(on_face);
        let n = w.len();
        if n != want.len() {
            return Err(broken("outer walk has the wrong length"));
        }
        let s = (0..n)
            .find(|&s| (0..n).all(|k| self.tails[w[(s + k) % n]] == want[n - 1 - k]))
            .ok_or_else(|| broken("outer walk does not read the expected tuple"))?;
        self.start = w[s];
        Ok(())
    }

    /// Copies `h` in, identifying its vertex `glue.0` with our vertex `glue.1`.
    fn absorb(&mut self, h: &Gadget, glue: Option<(usize, usize)>) -> (usize, impl Fn(usize) -> usize) {
        let doff = self.tails.len();
        let voff = self.rot.len();
        let vmap = move |x: usize| match glue {
            Some((hv, u)) if x == hv => u,
            _ => x + voff,
        };
        self.tails.extend(h.tails.iter().map(|&x| vmap(x)));
        self.twin.extend(h.twin.iter().map(|&t| t + doff));
        for (x, r) in h.rot.iter().enumerate() {
            if glue.is_some_and(|(hv, _)| hv == x) {
                self.rot.push(vec![]);
                self.alive.push(false);
            } else {
                self.rot.push(r.iter().map(|&d| d + doff).collect());
                self.alive.push(h.alive[x]);
            }
        }
        self.cons.extend(h.cons.iter().map(|c| GCon { anchor: c.anchor + doff, ..c.clone() }));
        self.shift += &h.shift;
        (doff, vmap)
    }

    /// Glues `h`'s coordinate `j` into our corner `i`. The tuple becomes
    /// `v_0..v_i, w_{j+1}..w_{j-1}, v_i, v_{i+1}..` (w indices cyclic).
    fn union(&mut self, i: usize, h: &Gadget, j: usize) -> Result<()> {
        let v = self.tuple();
        let target = self.corner(i);
        let u = self.tails[target];
        let w = h.tuple();
        let hd = h.corner(j);
        let hv = h.tails[hd];
        let (doff, vmap) = self.absorb(h, Some((hv, u)));
        let hr = &h.rot[hv];
        let p = pos(hr, hd);
        let seq: Vec<usize> = hr[p..].iter().chain(&hr[..p]).map(|&d| d + doff).collect();
        let q = pos(&self.rot[u], target);
        self.rot[u].splice(q..q, seq);
        let s = w.len();
        let mut want = v[..=i].to_vec();
        want.extend((1..s).map(|k| vmap(w[(j + k) % s])));
        want.push(v[i]);
        want.extend_from_slice(&v[i + 1..]);
        self.set_start(hd + doff, &want)
    }

    /// Removes coordinate `i` from the outer walk by closing its corner with
    /// a new edge; the vertex stays and is minimised over unless it still
    /// occurs elsewhere in the tuple.
    fn hide(&mut self, i: usize) -> Result<()> {
        let v = self.tuple();
        let r = v.len();
        if r < 2 {
            return Err(broken("cannot hide the only coordinate"));
        }
        let o = self.walk(self.start);
        let p = r - 1 - i;
        let b = o[p];
        let a = o[(p + r - 1) % r];
        let c = o[(p + 1) % r];
        let (n1, n2) = self.new_edge(self.tails[a], self.tails[c]);
        self.insert_after(n2, self.twin[b]);
        self.insert_before(n1, a);
        let mut want = v;
        want.remove(i);
        self.set_start(n1, &want)
    }

    /// Identifies the tails of two outer darts, splitting the outer face.
    /// `y`'s side stays outer.
    fn merge(&mut self, x: usize, y: usize) {
        let u = self.tails[x];
        let w = self.tails[y];
        debug_assert_ne!(u, w);
        let wr = std::mem::take(&mut self.rot[w]);
        let p = pos(&wr, y);
        let seq: Vec<usize> = wr[p..].iter().chain(&wr[..p]).copied().collect();
        for &d in &seq {
            self.tails[d] = u;
        }
        let q = pos(&self.rot[u], x);
        self.rot[u].splice(q..q, seq);
        self.alive[w] = false;
    }

    fn add_unary(&mut self, i: usize, h: &Gadget) -> Result<()> {
        self.union(i, h, 0)?;
        self.hide(i)
    }

    /// Adds `h(x_i, x_{i+1})`.
    fn add_binary(&mut self, i: usize, h: &Gadget) -> Result<()> {
        let v = self.tuple();
        let r2 = v.len() + 2;
        self.union(i, h, 0)?;
        let t = self.tuple();
        let (h2, nxt) = (t[i + 1], t[(i + 3) % r2]);
        if h2 == nxt {
            self.hide(i + 2)?;
            return self.hide(i + 1);
        }
        let y = self.corner(i + 1);
        self.merge(self.corner((i + 3) % r2), y);
        let want: Vec<usize> = v.iter().map(|&a| if a == h2 { nxt } else { a }).collect();
        self.set_start(y, &want)
    }

    /// Replaces coordinate `i` by the far end of a `≠` gadget.
    fn twist(&mut self, i: usize, neq: &Gadget) -> Result<()> {
        self.union(i, neq, 0)?;
        self.hide(i + 2)?;
        self.hide(i)
    }

    fn join(&mut self, h: &Gadget, ls: usize, rs: usize) -> Result<()> {
        self.union(ls, h, rs)?;
        if ls == 0 {
            self.hide(2)?;
            self.hide(0)?;
            let t = self.tuple();
            self.set_start(self.start, &[t[1], t[0]])
        } else {
            self.hide(3)?;
            self.hide(1)
        }
    }

    /// Places `h` next to us across a bridge; the tuple is the concatenation.
    fn product(&mut self, h: &Gadget) -> Result<()> {
        let v = self.tuple();
        let r = v.len();
        let bg = self.corner(r - 1);
        let hw = h.tuple();
        let hb = h.corner(0);
        let (doff, vmap) = self.absorb(h, None);
        let w: Vec<usize> = hw.iter().map(|&x| vmap(x)).collect();
        let (n1, n2) = self.new_edge(v[r - 1], w[0]);
        self.insert_before(n1, bg);
        self.insert_before(n2, hb + doff);
        let mut want = v.clone();
        want.extend_from_slice(&w);
        want.extend([w[0], v[r - 1]]);
        self.set_start(n1, &want)?;
        let s = w.len();
        self.hide(r + s + 1)?;
        self.hide(r + s)
    }

    fn scale(&mut self, c: &BigRational) -> Result<()> {
        if c.is_zero() && self.cons.iter().any(|k| !k.opts.is_empty()) {
            return Err(Error::NotRealizable(
                "scaling by 0 above an Opt node has no gadget; apply Feas before Opt instead".into(),
            ));
        }
        for k in &mut self.cons {
            k.weight *= c;
        }
        self.shift *= c;
        Ok(())
    }
}

/// A realized derivation: `π_v` of the query plus `shift` equals the
/// derivation's table, or when Opt nodes were scaled, has the same Opt.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Realization {
    pub query: ExpressibleQuery,
    #[serde(with = "crate::value::rational_str")]
    pub shift: BigRational,
    pub opt_scaled: bool,
}

struct Realizer<'a> {
    lang: &'a Language,
    unaries: BTreeMap<String, WeightedRelation>,
    opt_count: usize,
}

impl Realizer<'_> {
    fn build(&mut self, d: &Derivation) -> Result<Gadget> {
        use Derivation::*;
        Ok(match d {
            Base { name } => {
                let r = self.lang.get(name).expect("replayed").arity();
                Gadget::cycle(r, Some((name.clone(), BigRational::one())))
            }
            Unary { table } => {
                let name = format!("unary:{}", table.encode());
                self.unaries.insert(name.clone(), table.clone());
                Gadget::cycle(1, Some((name, BigRational::one())))
            }
            Equality => Gadget::equality(),
            AddUnary { coord, unary, arg } | RestrictDomain { coord, via: unary, arg, .. } => {
                let mut g = self.build(arg)?;
                g.add_unary(*coord, &self.build(unary)?)?;
                g
            }
            AddBinary { coord, binary, arg } | NeqRestrict { coord, via: binary, arg } => {
                let mut g = self.build(arg)?;
                g.add_binary(*coord, &self.build(binary)?)?;
                g
            }
            EqRestrict { coord, arg } => {
                let mut g = self.build(arg)?;
                g.add_binary(*coord, &Gadget::equality())?;
                g
            }
            Minimise { coord, arg } => {
                let mut g = self.build(arg)?;
                g.hide(*coord)?;
                g
            }
            Pin { coord, via, arg, .. } => {
                let mut g = self.build(arg)?;
                g.add_unary(*coord, &self.build(via)?)?;
                g.hide(*coord)?;
                g
            }
            Twist { coord, via, arg } => {
                let mut g = self.build(arg)?;
                g.twist(*coord, &self.build(via)?)?;
                g
            }
            Join { left_shared, right_shared, left, right } => {
                let mut g = self.build(left)?;
                g.join(&self.build(right)?, *left_shared, *right_shared)?;
                g
            }
            Product { left, right } => {
                let mut g = self.build(left)?;
                g.product(&self.build(right)?)?;
                g
            }
            Opt { arg } => {
                let mut g = self.build(arg)?;
                let id = self.opt_count;
                self.opt_count += 1;
                for k in &mut g.cons {
                    k.opts.push(id);
                }
                g
            }
            Feas { arg } => {
                let mut g = self.build(arg)?;
                g.scale(&BigRational::zero())?;
                g
            }
            Scale { factor, arg } => {
                let mut g = self.build(arg)?;
                g.scale(factor)?;
                g
            }
            AddConst { constant, arg } => {
                let mut g = self.build(arg)?;
                g.shift += constant;
                g
            }
        })
    }

    fn relation(&self, name: &str) -> &WeightedRelation {
        self.lang.get(name).or_else(|| self.unaries.get(name)).expect("known relation")
    }

    /// Replaces every Opt subtree, innermost first, by a scaled copy.
    fn scale_opts(&self, g: &mut Gadget) {
        for id in 0..self.opt_count {
            let (inside, outside): (Vec<&GCon>, Vec<&GCon>) = g.cons.iter().partition(|k| k.opts.contains(&id));
            if inside.is_empty() {
                continue;
            }
            let m = nested_opt_multiplier(
                outside.iter().map(|k| (&k.weight, self.relation(&k.rel))),
                inside.iter().map(|k| (&k.weight, self.relation(&k.rel))),
            );
            for k in &mut g.cons {
                if k.opts.contains(&id) {
                    k.weight *= &m;
                }
            }
        }
    }

    fn finish(&self, g: Gadget) -> Realization {
        let mut g = g;
        self.scale_opts(&mut g);
        let mut ids = vec![usize::MAX; g.rot.len()];
        let mut n = 0;
        for (x, &a) in g.alive.iter().enumerate() {
            if a {
                ids[x] = n;
                n += 1;
            }
        }
        let edges = (0..g.tails.len()).filter(|&d| d < g.twin[d]).map(|d| [d, g.twin[d]]).collect();
        let graph = PlaneGraph {
            vertices: n,
            darts: g.tails.iter().map(|&t| Dart { vertex: ids[t] }).collect(),
            edges,
            rotations: g.alive.iter().zip(&g.rot).filter(|(a, _)| **a).map(|(_, r)| r.clone()).collect(),
            outer_face: Some(g.start),
        };
        let mut relations = BTreeMap::new();
        let constraints = g
            .cons
            .iter()
            .map(|k| {
                relations.insert(k.rel.clone(), self.relation(&k.rel).clone());
                let scope = g.walk(k.anchor).iter().map(|&d| ids[g.tails[d]]).collect();
                Constraint { relation: k.rel.clone(), weight: k.weight.clone(), anchor_dart: k.anchor, scope: Some(scope) }
            })
            .collect();
        let v = g.tuple().iter().map(|&x| ids[x]).collect();
        Realization {
            query: ExpressibleQuery {
                instance: PlaneInstance { domain_size: self.lang.domain_size(), graph, relations, constraints },
                v,
            },
            shift: g.shift,
            opt_scaled: self.opt_count > 0,
        }
    }
}

/// Builds a plane instance and tuple expressing the derivation.
pub fn realize(d: &Derivation, lang: &Language) -> Result<Realization> {
    let target = d.replay(lang)?;
    // Scaled Opt subtrees only preserve Opt of a nonempty result.
    if d.uses_opt() && target.feasible_indices().is_empty() {
        return Err(Error::NotRealizable("empty relation below an Opt node".into()));
    }
    let mut r = Realizer { lang, unaries: BTreeMap::new(), opt_count: 0 };
    let g = r.build(d)?;
    Ok(r.finish(g))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RealizationCheck {
    pub matches: bool,
    pub vertices: usize,
    pub constraints: usize,
    pub opt_scaled: bool,
}

/// Realizes `d` and compares `π_v` against the table semantics: exactly (after
/// the recorded shift) or, when Opt nodes were scaled, after applying Opt.
pub fn check_realization(d: &Derivation, lang: &Language, cap: u64) -> Result<RealizationCheck> {
    let target = d.replay(lang)?;
    let real = realize(d, lang)?;
    let pi = pi_v_with_cap(&real.query, cap)?;
    let matches = if real.opt_scaled {
        ops::opt(&pi) == ops::opt(&target)
    } else {
        ops::add_constant(&pi, &real.shift) == target
    };
    Ok(RealizationCheck {
        matches,
        vertices: real.query.instance.graph.vertices,
        constraints: real.query.instance.constraints.len(),
        opt_scaled: real.opt_scaled,
    })
}
