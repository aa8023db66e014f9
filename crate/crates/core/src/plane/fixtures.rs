//! Small plane instances used by tests, benchmarks and the CLI data files.

use std::collections::BTreeMap;

use super::{Constraint, Dart, PlaneGraph, PlaneInstance};
use crate::catalog;
use crate::relation::WeightedRelation;
use crate::value::{int, rat};

fn darts(tails: &[usize]) -> Vec<Dart> {
    tails.iter().map(|&vertex| Dart { vertex }).collect()
}

fn pair_edges(n: usize) -> Vec<[usize; 2]> {
    (0..n).map(|e| [2 * e, 2 * e + 1]).collect()
}

fn rels(list: &[(&str, WeightedRelation)]) -> BTreeMap<String, WeightedRelation> {
    list.iter().map(|(n, r)| (n.to_string(), r.clone())).collect()
}

fn constraint(relation: &str, weight: num_rational::BigRational, anchor: usize, scope: &[usize]) -> Constraint {
    Constraint {
        relation: relation.into(),
        weight,
        anchor_dart: anchor,
        scope: Some(scope.to_vec()),
    }
}

/// Four variables `x1..x4` (vertices 0..3): a loop at x1, the triangle
/// x1 x2 x3, a lens between x2 and x3 and a lens between x3 and x4, with
/// objective `2·γ1(x1) + 0·γ2(x2,x3,x1) + γ3(x3,x2) + 5/3·γ4(x3,x4)`.
pub fn four_vars() -> PlaneInstance {
    // Dart 2e and 2e+1 form edge e.
    // e0 x1-x2, e1 x1-x3, e2 x2-x3, e3 loop at x1, e4 x2-x3 (lower),
    // e5 x3-x4, e6 x3-x4 (lower).
    let graph = PlaneGraph {
        vertices: 4,
        darts: darts(&[0, 1, 0, 2, 1, 2, 0, 0, 1, 2, 2, 3, 2, 3]),
        edges: pair_edges(7),
        rotations: vec![vec![7, 6, 2, 0], vec![1, 4, 8], vec![5, 3, 10, 12, 9], vec![11, 13]],
        outer_face: Some(1),
    };
    PlaneInstance {
        domain_size: 2,
        graph,
        relations: rels(&[
            ("gamma1", catalog::gamma1()),
            ("rho_nae", catalog::rho_nae()),
            ("gamma_cut", catalog::gamma_cut()),
            ("gamma_imp", catalog::gamma_imp()),
        ]),
        constraints: vec![
            constraint("gamma1", int(2), 6, &[0]),
            constraint("rho_nae", int(0), 4, &[1, 2, 0]),
            constraint("gamma_cut", int(1), 5, &[2, 1]),
            constraint("gamma_imp", rat(5, 3), 12, &[2, 3]),
        ],
    }
}

/// Three `γ_cut` constraints between `x1, x2, x3` (vertices 0..2) and a
/// centre `z` (vertex 3), each on a lens of parallel edges, inside the
/// triangle x1 x2 x3. The outer walk reads x3 x2 x1, so `v = (x1, x2, x3)`.
pub fn star() -> PlaneInstance {
    // e0,e1: x1-z; e2,e3: z-x2; e4,e5: z-x3; e6 x1-x3; e7 x1-x2; e8 x2-x3.
    let graph = PlaneGraph {
        vertices: 4,
        darts: darts(&[0, 3, 0, 3, 3, 1, 3, 1, 3, 2, 3, 2, 0, 2, 0, 1, 1, 2]),
        edges: pair_edges(9),
        rotations: vec![
            vec![12, 0, 2, 14],
            vec![15, 5, 7, 16],
            vec![11, 9, 13, 17],
            vec![3, 1, 8, 10, 6, 4],
        ],
        outer_face: Some(12),
    };
    PlaneInstance {
        domain_size: 2,
        graph,
        relations: rels(&[("gamma_cut", catalog::gamma_cut())]),
        constraints: vec![
            constraint("gamma_cut", int(1), 2, &[0, 3]),
            constraint("gamma_cut", int(1), 7, &[1, 3]),
            constraint("gamma_cut", int(1), 9, &[2, 3]),
        ],
    }
}

pub const STAR_V: [usize; 3] = [0, 1, 2];

/// One vertex with two self-loops and no constraints; the outer walk is `x x`.
pub fn two_loops() -> PlaneInstance {
    PlaneInstance {
        domain_size: 2,
        graph: PlaneGraph {
            vertices: 1,
            darts: darts(&[0, 0, 0, 0]),
            edges: pair_edges(2),
            rotations: vec![vec![0, 1, 2, 3]],
            outer_face: Some(0),
        },
        relations: BTreeMap::new(),
        constraints: vec![],
    }
}

pub const TWO_LOOPS_V: [usize; 2] = [0, 0];

/// `ρ_nae(x, x, x)` on a face formed by three loops at one vertex.
pub fn nae_on_one_vertex() -> PlaneInstance {
    PlaneInstance {
        domain_size: 2,
        graph: PlaneGraph {
            vertices: 1,
            darts: darts(&[0; 6]),
            edges: pair_edges(3),
            rotations: vec![vec![0, 1, 2, 3, 4, 5]],
            outer_face: Some(1),
        },
        relations: rels(&[("rho_nae", catalog::rho_nae())]),
        constraints: vec![constraint("rho_nae", int(1), 0, &[0, 0, 0])],
    }
}
