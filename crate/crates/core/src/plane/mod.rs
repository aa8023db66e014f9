//! Rotation-system plane multigraphs and face tracing.
//!
//! Every dart has a tail vertex and a twin. A vertex's rotation lists its
//! darts in increasing angle with the y axis pointing up (clockwise when the
//! y axis points down, as on a screen). Faces are traced with
//! `next(d) = successor of twin(d) in the rotation at head(d)`, which walks
//! every bounded face clockwise with the face on the right; the outer face
//! comes out as `v_r … v_1`.

mod engine;
pub mod fixtures;
mod instance;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

pub use engine::{solve, solve_with_cap, Solution, DEFAULT_CAP};
pub(crate) use engine::{pi_eliminate, pi_table, weighted_terms};
pub use instance::{validate_instance, Constraint, PlaneInstance, ValidationReport, Violation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dart {
    pub vertex: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaneGraph {
    pub vertices: usize,
    pub darts: Vec<Dart>,
    pub edges: Vec<[usize; 2]>,
    pub rotations: Vec<Vec<usize>>,
    /// A dart on the outer face; `None` only for the edgeless one-vertex graph.
    pub outer_face: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Face {
    pub id: usize,
    pub boundary: Vec<usize>,
    pub vertex_walk: Vec<usize>,
}

/// Derived combinatorial structure of a structurally valid graph.
#[derive(Clone, Debug)]
pub struct Topology {
    pub twin: Vec<usize>,
    /// Position of each dart inside its tail's rotation.
    pub rot_pos: Vec<usize>,
    pub faces: Vec<Face>,
    pub face_of: Vec<usize>,
}

impl PlaneGraph {
    pub fn tail(&self, d: usize) -> usize {
        self.darts[d].vertex
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    fn check_structure(&self) -> Result<(Vec<usize>, Vec<usize>)> {
        let nd = self.darts.len();
        if self.vertices == 0 {
            return Err(invalid("graph has no vertices"));
        }
        if let Some(d) = self.darts.iter().position(|d| d.vertex >= self.vertices) {
            return Err(invalid(format!("dart {d} is attached to a missing vertex")));
        }
        let mut twin = vec![usize::MAX; nd];
        for (e, &[a, b]) in self.edges.iter().enumerate() {
            if a >= nd || b >= nd || a == b {
                return Err(invalid(format!("edge {e} has invalid darts ({a},{b})")));
            }
            if twin[a] != usize::MAX || twin[b] != usize::MAX {
                return Err(invalid(format!("edge {e} reuses a dart")));
            }
            twin[a] = b;
            twin[b] = a;
        }
        if let Some(d) = twin.iter().position(|&t| t == usize::MAX) {
            return Err(invalid(format!("dangling dart {d} belongs to no edge")));
        }
        if self.rotations.len() != self.vertices {
            return Err(invalid(format!(
                "{} rotations given for {} vertices",
                self.rotations.len(),
                self.vertices
            )));
        }
        let mut rot_pos = vec![usize::MAX; nd];
        for (v, rot) in self.rotations.iter().enumerate() {
            for (p, &d) in rot.iter().enumerate() {
                if d >= nd {
                    return Err(invalid(format!("rotation of vertex {v} names missing dart {d}")));
                }
                if self.darts[d].vertex != v {
                    return Err(invalid(format!(
                        "dart {d} listed at vertex {v} but attached to {}",
                        self.darts[d].vertex
                    )));
                }
                if rot_pos[d] != usize::MAX {
                    return Err(invalid(format!("dart {d} appears twice in rotations")));
                }
                rot_pos[d] = p;
            }
        }
        if let Some(d) = rot_pos.iter().position(|&p| p == usize::MAX) {
            return Err(invalid(format!("dangling dart {d} appears in no rotation")));
        }
        Ok((twin, rot_pos))
    }

    fn check_connected(&self, twin: &[usize]) -> Result<()> {
        let mut seen = vec![false; self.vertices];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &d in &self.rotations[v] {
                let w = self.darts[twin[d]].vertex;
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        match seen.iter().position(|s| !s) {
            Some(v) => Err(invalid(format!("graph is disconnected: vertex {v} unreachable"))),
            None => Ok(()),
        }
    }

    pub fn next_dart(&self, twin: &[usize], rot_pos: &[usize], d: usize) -> usize {
        let t = twin[d];
        let rot = &self.rotations[self.darts[t].vertex];
        rot[(rot_pos[t] + 1) % rot.len()]
    }

    pub fn topology(&self) -> Result<Topology> {
        let (twin, rot_pos) = self.check_structure()?;
        self.check_connected(&twin)?;
        let nd = self.darts.len();
        let mut face_of = vec![usize::MAX; nd];
        let mut faces = Vec::new();
        for start in 0..nd {
            if face_of[start] != usize::MAX {
                continue;
            }
            let id = faces.len();
            let mut boundary = Vec::new();
            let mut d = start;
            loop {
                face_of[d] = id;
                boundary.push(d);
                d = self.next_dart(&twin, &rot_pos, d);
                if d == start {
                    break;
                }
            }
            let vertex_walk = boundary.iter().map(|&d| self.darts[d].vertex).collect();
            faces.push(Face { id, boundary, vertex_walk });
        }
        if nd == 0 {
            faces.push(Face { id: 0, boundary: vec![], vertex_walk: vec![] });
        }
        let euler = self.vertices as i64 - self.edges.len() as i64 + faces.len() as i64;
        if euler != 2 {
            return Err(invalid(format!(
                "Euler check failed: {} - {} + {} = {euler}, rotation system is not planar",
                self.vertices,
                self.edges.len(),
                faces.len()
            )));
        }
        Ok(Topology { twin, rot_pos, faces, face_of })
    }

    /// Dart sequence of the face walk starting at `d`.
    pub fn walk_from(&self, topo: &Topology, d: usize) -> Vec<usize> {
        let mut out = vec![d];
        let mut cur = self.next_dart(&topo.twin, &topo.rot_pos, d);
        while cur != d {
            out.push(cur);
            cur = self.next_dart(&topo.twin, &topo.rot_pos, cur);
        }
        out
    }

    pub fn vertex_walk_from(&self, topo: &Topology, d: usize) -> Vec<usize> {
        self.walk_from(topo, d).into_iter().map(|d| self.tail(d)).collect()
    }

    pub fn outer_face_id(&self, topo: &Topology) -> Result<usize> {
        match self.outer_face {
            Some(d) if d < self.darts.len() => Ok(topo.face_of[d]),
            Some(d) => Err(invalid(format!("outer face dart {d} does not exist"))),
            None if self.darts.is_empty() => Ok(0),
            None => Err(invalid("outer face must be given by one of its darts")),
        }
    }
}

/// Computes faces; errors on structural defects, disconnection or a non-planar rotation system.
pub fn trace_faces(g: &PlaneGraph) -> Result<Vec<Face>> {
    Ok(g.topology()?.faces)
}

#[cfg(test)]
mod tests {
    use super::fixtures;
    use super::*;

    fn two_loops() -> PlaneGraph {
        fixtures::two_loops().graph
    }

    #[test]
    fn two_self_loops_have_three_faces() {
        let g = two_loops();
        let faces = trace_faces(&g).unwrap();
        assert_eq!(faces.len(), 3);
        assert_eq!(1 - 2 + faces.len() as i64, 2);
    }

    #[test]
    fn single_edge_has_one_face() {
        let g = PlaneGraph {
            vertices: 2,
            darts: vec![Dart { vertex: 0 }, Dart { vertex: 1 }],
            edges: vec![[0, 1]],
            rotations: vec![vec![0], vec![1]],
            outer_face: Some(0),
        };
        let faces = trace_faces(&g).unwrap();
        assert_eq!(faces.len(), 1);
        assert_eq!(faces[0].vertex_walk, vec![0, 1]);
    }

    #[test]
    fn four_vars_walks() {
        let inst = fixtures::four_vars();
        let topo = inst.graph.topology().unwrap();
        assert_eq!(inst.graph.vertices, 4);
        assert_eq!(inst.graph.edge_count(), 7);
        assert_eq!(topo.faces.len(), 5);
        let walks: Vec<Vec<usize>> =
            inst.constraints.iter().map(|c| inst.graph.vertex_walk_from(&topo, c.anchor_dart)).collect();
        assert_eq!(walks, vec![vec![0], vec![1, 2, 0], vec![2, 1], vec![2, 3]]);
    }

    #[test]
    fn structural_errors() {
        let mut g = two_loops();
        g.rotations[0].pop();
        assert!(trace_faces(&g).unwrap_err().to_string().contains("dangling"));

        let mut g = two_loops();
        g.edges.pop();
        assert!(trace_faces(&g).unwrap_err().to_string().contains("dangling"));

        let g = PlaneGraph {
            vertices: 2,
            darts: vec![Dart { vertex: 0 }, Dart { vertex: 0 }],
            edges: vec![[0, 1]],
            rotations: vec![vec![0, 1], vec![]],
            outer_face: Some(0),
        };
        assert!(trace_faces(&g).unwrap_err().to_string().contains("disconnected"));
    }

    #[test]
    fn nonplanar_rotation_is_rejected() {
        // Two loops whose ends interleave form a torus embedding.
        let mut g = two_loops();
        g.rotations[0] = vec![0, 2, 1, 3];
        assert!(trace_faces(&g).unwrap_err().to_string().contains("Euler"));
    }

    #[test]
    fn edgeless_vertex_has_one_face() {
        let g = PlaneGraph {
            vertices: 1,
            darts: vec![],
            edges: vec![],
            rotations: vec![vec![]],
            outer_face: None,
        };
        assert_eq!(trace_faces(&g).unwrap().len(), 1);
    }
}
