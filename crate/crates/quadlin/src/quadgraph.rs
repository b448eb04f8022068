//! Bipartite rhombically embedded quad-graphs with directed, angle-labeled
//! edges.
//!
//! Every edge points from a black vertex to a white one and carries a label
//! `alpha` with `pos(white) - pos(black) = exp(i alpha)`; opposite edges of a
//! face carry labels `alpha` and `alpha + pi`. Faces are stored as oriented
//! quadruples `(x0, x1, x12, x2)` with `x1 - x0 = exp(i alpha)`,
//! `x2 - x0 = exp(i beta)` and `beta - alpha` in `(0, pi)` modulo `2 pi`.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type VertexId = usize;

/// Geometric tolerance for embedding checks.
pub const GEOM_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Color {
    #[serde(rename = "b")]
    Black,
    #[serde(rename = "w")]
    White,
}

impl Color {
    pub fn flipped(self) -> Self {
        match self {
            Color::Black => Color::White,
            Color::White => Color::Black,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Vertex {
    pub id: VertexId,
    pub pos: Complex64,
    pub color: Color,
}

/// Directed black-to-white edge labeled by its direction angle.
#[derive(Clone, Copy, Debug)]
pub struct Edge {
    pub from: VertexId,
    pub to: VertexId,
    pub alpha: f64,
}

/// Oriented quad `(x0, x1, x12, x2)`; `x0`, `x12` black.
#[derive(Clone, Copy, Debug)]
pub struct Face {
    pub corners: [VertexId; 4],
    pub alpha: f64,
    pub beta: f64,
}

impl Face {
    /// Rhombus angle at the black corners, `(beta - alpha) mod 2pi`, in `(0, pi)`.
    pub fn black_angle(&self) -> f64 {
        normalize_angle(self.beta - self.alpha)
    }
}

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("geometry error: {0}")]
    Geometry(String),
    #[error("topology error: {0}")]
    Topology(String),
    #[error("flip error: {0}")]
    Flip(String),
    #[error("unknown vertex id {0}")]
    UnknownVertex(VertexId),
    #[error("malformed graph JSON: {0}")]
    Json(String),
}

/// A single invariant violation found by [`QuadGraph::validate`].
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    Bipartiteness { edge: usize },
    EdgeEmbedding { edge: usize, error: f64 },
    FaceCornerColor { face: usize },
    FaceOrientation { face: usize },
    FaceEmbedding { face: usize, error: f64 },
    FaceEdgeLabel { face: usize },
    MissingVertex { id: VertexId },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Bipartiteness { edge } => {
                write!(f, "edge {edge} does not join black to white")
            }
            Violation::EdgeEmbedding { edge, error } => {
                write!(
                    f,
                    "edge {edge} violates the rhombic embedding by {error:.3e}"
                )
            }
            Violation::FaceCornerColor { face } => write!(f, "face {face} has wrong corner colors"),
            Violation::FaceOrientation { face } => {
                write!(f, "face {face} is not positively oriented")
            }
            Violation::FaceEmbedding { face, error } => {
                write!(
                    f,
                    "face {face} corners are not a rhombus (error {error:.3e})"
                )
            }
            Violation::FaceEdgeLabel { face } => {
                write!(f, "face {face} labels disagree with its boundary edges")
            }
            Violation::MissingVertex { id } => write!(f, "vertex id {id} is referenced but absent"),
        }
    }
}

/// Fan entry of a black star: the opposite black vertex of one incident quad
/// together with that quad's label pair as seen from the center.
#[derive(Clone, Copy, Debug)]
pub struct FanEntry {
    pub opposite: VertexId,
    pub labels: (f64, f64),
}

/// Star of an interior black vertex in the black graph.
#[derive(Clone, Debug)]
pub struct BlackStar {
    pub center: VertexId,
    pub fan: Vec<FanEntry>,
}

pub fn normalize_angle(a: f64) -> f64 {
    let mut r = a.rem_euclid(TAU);
    if r >= TAU {
        r -= TAU;
    }
    r
}

pub fn angles_close(a: f64, b: f64) -> bool {
    let d = normalize_angle(a - b);
    d < GEOM_TOL || TAU - d < GEOM_TOL
}

fn unit(a: f64) -> Complex64 {
    Complex64::new(a.cos(), a.sin())
}

#[derive(Clone, Debug, Default)]
pub struct QuadGraph {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    faces: Vec<Face>,
    index_of: BTreeMap<VertexId, usize>,
}

impl QuadGraph {
    pub fn new(vertices: Vec<Vertex>, edges: Vec<Edge>, faces: Vec<Face>) -> Self {
        let index_of = vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.id, i))
            .collect();
        Self {
            vertices,
            edges,
            faces,
            index_of,
        }
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn vertex(&self, id: VertexId) -> Result<&Vertex, GraphError> {
        self.index_of
            .get(&id)
            .map(|&i| &self.vertices[i])
            .ok_or(GraphError::UnknownVertex(id))
    }

    pub fn contains(&self, id: VertexId) -> bool {
        self.index_of.contains_key(&id)
    }

    /// Ids of all vertices of the given color.
    pub fn vertex_ids(&self, color: Color) -> Vec<VertexId> {
        self.vertices
            .iter()
            .filter(|v| v.color == color)
            .map(|v| v.id)
            .collect()
    }

    /// Vertex at the given position, within a loose geometric tolerance.
    pub fn vertex_at(&self, pos: Complex64) -> Option<VertexId> {
        self.vertices
            .iter()
            .find(|v| (v.pos - pos).norm() < 1e-7)
            .map(|v| v.id)
    }

    pub fn faces_at(&self, id: VertexId) -> Vec<usize> {
        self.faces
            .iter()
            .enumerate()
            .filter(|(_, f)| f.corners.contains(&id))
            .map(|(i, _)| i)
            .collect()
    }

    /// Label pair of `face` as seen from the black corner `v`, plus the
    /// opposite black corner. The pair is ordered counterclockwise.
    pub fn labels_from(
        &self,
        face: &Face,
        v: VertexId,
    ) -> Result<(f64, f64, VertexId), GraphError> {
        if face.corners[0] == v {
            Ok((face.alpha, face.beta, face.corners[2]))
        } else if face.corners[2] == v {
            Ok((
                normalize_angle(face.alpha + PI),
                normalize_angle(face.beta + PI),
                face.corners[0],
            ))
        } else {
            Err(GraphError::Topology(format!(
                "vertex {v} is not a black corner of the face"
            )))
        }
    }

    /// One star per interior black vertex, fans ordered counterclockwise.
    pub fn black_stars(&self) -> Vec<BlackStar> {
        let mut out = Vec::new();
        for v in self.vertices.iter().filter(|v| v.color == Color::Black) {
            if let Some(star) = self.star_of(v.id) {
                out.push(star);
            }
        }
        out
    }

    /// The star of a black vertex if it is interior (full 2 pi fan).
    pub fn star_of(&self, center: VertexId) -> Option<BlackStar> {
        let faces = self.faces_at(center);
        if faces.is_empty() {
            return None;
        }
        let mut fan: Vec<FanEntry> = Vec::with_capacity(faces.len());
        for fi in faces {
            let f = &self.faces[fi];
            let (a, b, opp) = self.labels_from(f, center).ok()?;
            fan.push(FanEntry {
                opposite: opp,
                labels: (a, b),
            });
        }
        fan.sort_by(|p, q| p.labels.0.partial_cmp(&q.labels.0).unwrap());
        // interior iff the label pairs chain cyclically and the angles close up
        let mut total = 0.0;
        for k in 0..fan.len() {
            let next = &fan[(k + 1) % fan.len()];
            if !angles_close(fan[k].labels.1, next.labels.0) {
                return None;
            }
            total += normalize_angle(fan[k].labels.1 - fan[k].labels.0);
        }
        if (total - TAU).abs() > 1e-6 {
            return None;
        }
        Some(BlackStar { center, fan })
    }

    /// All invariant violations; empty iff the graph is a valid bipartite
    /// rhombically embedded quad-graph.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            let (from, to) = match (self.vertex(e.from), self.vertex(e.to)) {
                (Ok(a), Ok(b)) => (a, b),
                _ => {
                    out.push(Violation::MissingVertex {
                        id: if self.contains(e.from) { e.to } else { e.from },
                    });
                    continue;
                }
            };
            if from.color != Color::Black || to.color != Color::White {
                out.push(Violation::Bipartiteness { edge: i });
            }
            let err = (to.pos - from.pos - unit(e.alpha)).norm();
            if err > GEOM_TOL {
                out.push(Violation::EdgeEmbedding {
                    edge: i,
                    error: err,
                });
            }
        }
        for (i, f) in self.faces.iter().enumerate() {
            let vs: Option<Vec<&Vertex>> = f.corners.iter().map(|&c| self.vertex(c).ok()).collect();
            let Some(vs) = vs else {
                out.push(Violation::MissingVertex {
                    id: *f.corners.iter().find(|&&c| !self.contains(c)).unwrap(),
                });
                continue;
            };
            if vs[0].color != Color::Black
                || vs[2].color != Color::Black
                || vs[1].color != Color::White
                || vs[3].color != Color::White
            {
                out.push(Violation::FaceCornerColor { face: i });
            }
            let angle = normalize_angle(f.beta - f.alpha);
            if !(GEOM_TOL..PI - GEOM_TOL).contains(&angle) {
                out.push(Violation::FaceOrientation { face: i });
            }
            let e1 = (vs[1].pos - vs[0].pos - unit(f.alpha)).norm();
            let e2 = (vs[3].pos - vs[0].pos - unit(f.beta)).norm();
            let e3 = (vs[2].pos - vs[0].pos - unit(f.alpha) - unit(f.beta)).norm();
            let err = e1.max(e2).max(e3);
            if err > GEOM_TOL {
                out.push(Violation::FaceEmbedding {
                    face: i,
                    error: err,
                });
            }
            // the four boundary edges must exist with matching labels
            let wanted = [
                (f.corners[0], f.corners[1], f.alpha),
                (f.corners[0], f.corners[3], f.beta),
                (f.corners[2], f.corners[1], f.beta + PI),
                (f.corners[2], f.corners[3], f.alpha + PI),
            ];
            for (b, w, lbl) in wanted {
                let found = self
                    .edges
                    .iter()
                    .any(|e| e.from == b && e.to == w && angles_close(e.alpha, lbl));
                if !found {
                    out.push(Violation::FaceEdgeLabel { face: i });
                    break;
                }
            }
        }
        out
    }

    /// Star-triangle flip at an interior degree-3 vertex. Works on black
    /// vertices (star to triangle) and on white vertices (the inverse);
    /// surviving vertices keep their ids, the inserted vertex gets a fresh id.
    pub fn star_triangle_flip(&self, center: VertexId) -> Result<QuadGraph, GraphError> {
        let v = *self.vertex(center)?;
        let face_ids = self.faces_at(center);
        if face_ids.len() != 3 {
            return Err(GraphError::Flip(format!(
                "vertex {center} has {} incident faces, need exactly 3",
                face_ids.len()
            )));
        }
        // Directions from the center to its neighbors inside the three faces.
        let mut spokes: BTreeMap<VertexId, f64> = BTreeMap::new();
        let mut angle_sum = 0.0;
        for &fi in &face_ids {
            let f = &self.faces[fi];
            let idx = f
                .corners
                .iter()
                .position(|&c| c == center)
                .expect("face listed as incident");
            if idx % 2 == 0 {
                let (a, b, _) = self.labels_from(f, center)?;
                spokes.insert(f.corners[(idx + 1) % 4], normalize_angle(a));
                spokes.insert(f.corners[(idx + 3) % 4], normalize_angle(b));
                angle_sum += normalize_angle(b - a);
            } else {
                // center sits on the white diagonal of this face
                let (a, b) = if idx == 1 {
                    (normalize_angle(f.alpha + PI), f.beta)
                } else {
                    (normalize_angle(f.beta + PI), f.alpha)
                };
                spokes.insert(f.corners[0], a);
                spokes.insert(f.corners[2], b);
                angle_sum += normalize_angle(b - a);
            }
        }
        if spokes.len() != 3 {
            return Err(GraphError::Flip(format!(
                "faces around {center} do not close a 3-star"
            )));
        }
        if (angle_sum - TAU).abs() > 1e-6 {
            return Err(GraphError::Flip(format!(
                "angles around {center} sum to {angle_sum:.6}, not 2 pi; vertex is not interior"
            )));
        }

        // Counterclockwise ring of spokes.
        let mut ring: Vec<(VertexId, f64)> = spokes.into_iter().collect();
        ring.sort_by(|x, y| x.1.partial_cmp(&y.1).unwrap());
        let opposite = |a: VertexId, b: VertexId| -> Result<VertexId, GraphError> {
            for &fi in &face_ids {
                let c = &self.faces[fi].corners;
                if c.contains(&a) && c.contains(&b) {
                    let idx = c.iter().position(|&x| x == center).unwrap();
                    return Ok(c[(idx + 2) % 4]);
                }
            }
            Err(GraphError::Flip(format!(
                "no face joins spokes {a} and {b} around {center}"
            )))
        };
        let opp = [
            opposite(ring[0].0, ring[1].0)?,
            opposite(ring[1].0, ring[2].0)?,
            opposite(ring[2].0, ring[0].0)?,
        ];

        let new_id = self.vertices.iter().map(|u| u.id).max().unwrap_or(0) + 1;
        let new_pos =
            self.vertex(ring[0].0)?.pos + self.vertex(ring[1].0)?.pos + self.vertex(ring[2].0)?.pos
                - v.pos * 2.0;

        let mut vertices: Vec<Vertex> = self
            .vertices
            .iter()
            .filter(|u| u.id != center)
            .copied()
            .collect();
        vertices.push(Vertex {
            id: new_id,
            pos: new_pos,
            color: v.color.flipped(),
        });

        let mut edges: Vec<Edge> = self
            .edges
            .iter()
            .filter(|e| e.from != center && e.to != center)
            .copied()
            .collect();
        let mut faces: Vec<Face> = self
            .faces
            .iter()
            .enumerate()
            .filter(|(i, _)| !face_ids.contains(i))
            .map(|(_, f)| *f)
            .collect();

        // New rhombi: corners {opp[l], ring[l+1], opp[l+1], new} with sides
        // along the directions mu_l and mu_{l+2}.
        for l in 0..3 {
            let mu = ring[l].1;
            let lam = ring[(l + 2) % 3].1;
            match v.color {
                Color::Black => {
                    // black diagonal (opp[l], opp[l+1]); from opp[l] the white
                    // corner ring[l+1] lies at mu + pi and the new one at lam
                    let (a, b, x1, x2) =
                        orient(normalize_angle(mu + PI), lam, ring[(l + 1) % 3].0, new_id);
                    faces.push(Face {
                        corners: [opp[l], x1, opp[(l + 1) % 3], x2],
                        alpha: a,
                        beta: b,
                    });
                    edges.push(Edge {
                        from: opp[l],
                        to: new_id,
                        alpha: lam,
                    });
                }
                Color::White => {
                    // black diagonal (ring[l+1], new); from the spoke the white
                    // corner opp[l] lies at mu and opp[l+1] at lam
                    let base = ring[(l + 1) % 3].0;
                    let (a, b, x1, x2) = orient(mu, lam, opp[l], opp[(l + 1) % 3]);
                    faces.push(Face {
                        corners: [base, x1, new_id, x2],
                        alpha: a,
                        beta: b,
                    });
                    // the inserted vertex is black; it points at the old
                    // opposite corners, each one step back along mu_{l+2}
                    edges.push(Edge {
                        from: new_id,
                        to: opp[l],
                        alpha: normalize_angle(lam + PI),
                    });
                }
            }
        }

        Ok(QuadGraph::new(vertices, edges, faces))
    }

    /// Bounding box of the embedding.
    pub fn bounds(&self) -> (Complex64, Complex64) {
        let mut lo = Complex64::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Complex64::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for v in &self.vertices {
            lo = Complex64::new(lo.re.min(v.pos.re), lo.im.min(v.pos.im));
            hi = Complex64::new(hi.re.max(v.pos.re), hi.im.max(v.pos.im));
        }
        (lo, hi)
    }
}

/// Orders a label pair so that `(beta - alpha) mod 2pi` lies in `(0, pi)`,
/// swapping the associated corners along with it.
fn orient(a: f64, b: f64, xa: VertexId, xb: VertexId) -> (f64, f64, VertexId, VertexId) {
    if normalize_angle(b - a) < PI {
        (a, b, xa, xb)
    } else {
        (b, a, xb, xa)
    }
}

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

/// Square grid with `(n+1)^2` vertices, all faces labeled `(alpha, beta)`.
pub fn gen_square_grid(n: usize, alpha: f64, beta: f64) -> Result<QuadGraph, GraphError> {
    if n == 0 {
        return Err(GraphError::Geometry("grid size must be at least 1".into()));
    }
    let opening = normalize_angle(beta - alpha);
    if !(GEOM_TOL..PI - GEOM_TOL).contains(&opening) {
        return Err(GraphError::Geometry(format!(
            "beta - alpha = {opening:.6} must lie strictly inside (0, pi)"
        )));
    }
    let alpha = normalize_angle(alpha);
    let beta = normalize_angle(beta);
    let side = n + 1;
    let id_of = |j: usize, k: usize| k * side + j;
    let ea = unit(alpha);
    let eb = unit(beta);
    let mut vertices = Vec::with_capacity(side * side);
    for k in 0..side {
        for j in 0..side {
            vertices.push(Vertex {
                id: id_of(j, k),
                pos: ea * j as f64 + eb * k as f64,
                color: if (j + k) % 2 == 0 {
                    Color::Black
                } else {
                    Color::White
                },
            });
        }
    }
    let mut edges = Vec::new();
    for k in 0..side {
        for j in 0..side {
            let here = id_of(j, k);
            let black_here = (j + k) % 2 == 0;
            if j + 1 < side {
                let right = id_of(j + 1, k);
                edges.push(if black_here {
                    Edge {
                        from: here,
                        to: right,
                        alpha,
                    }
                } else {
                    Edge {
                        from: right,
                        to: here,
                        alpha: normalize_angle(alpha + PI),
                    }
                });
            }
            if k + 1 < side {
                let up = id_of(j, k + 1);
                edges.push(if black_here {
                    Edge {
                        from: here,
                        to: up,
                        alpha: beta,
                    }
                } else {
                    Edge {
                        from: up,
                        to: here,
                        alpha: normalize_angle(beta + PI),
                    }
                });
            }
        }
    }
    let mut faces = Vec::new();
    for k in 0..n {
        for j in 0..n {
            let (c00, c10, c11, c01) = (
                id_of(j, k),
                id_of(j + 1, k),
                id_of(j + 1, k + 1),
                id_of(j, k + 1),
            );
            if (j + k) % 2 == 0 {
                faces.push(Face {
                    corners: [c00, c10, c11, c01],
                    alpha,
                    beta,
                });
            } else {
                // black diagonal (c10, c01): from c10 the whites sit at
                // beta (c11) and alpha + pi (c00)
                faces.push(Face {
                    corners: [c10, c11, c01, c00],
                    alpha: beta,
                    beta: normalize_angle(alpha + PI),
                });
            }
        }
    }
    Ok(QuadGraph::new(vertices, edges, faces))
}

/// One plaquette of a stepped surface in `Z^m`: the 2-face at `base` spanned
/// by the coordinate directions `dirs`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Plaquette {
    pub base: Vec<i64>,
    pub dirs: (usize, usize),
}

/// Realizes a monotone stepped surface in `Z^m` as a rhombic quad-graph,
/// mapping the lattice point `n` to `sum_k n_k exp(i alpha_k)` and coloring
/// by the parity of `|n|`.
pub fn gen_from_stepped_surface(
    plaquettes: &[Plaquette],
    alphas: &[f64],
) -> Result<QuadGraph, GraphError> {
    let m = alphas.len();
    if m < 2 {
        return Err(GraphError::Geometry("need at least two directions".into()));
    }
    for i in 0..m {
        for j in i + 1..m {
            let d = normalize_angle(alphas[i] - alphas[j]);
            if d < GEOM_TOL || (d - PI).abs() < GEOM_TOL || TAU - d < GEOM_TOL {
                return Err(GraphError::Geometry(format!(
                    "directions {i} and {j} are parallel"
                )));
            }
        }
    }
    if plaquettes.is_empty() {
        return Err(GraphError::Topology("empty surface".into()));
    }

    let embed = |n: &[i64]| -> Complex64 {
        n.iter()
            .zip(alphas)
            .map(|(&c, &a)| unit(a) * c as f64)
            .sum()
    };
    let parity = |n: &[i64]| -> Color {
        if n.iter().sum::<i64>().rem_euclid(2) == 0 {
            Color::Black
        } else {
            Color::White
        }
    };

    let mut ids: BTreeMap<Vec<i64>, VertexId> = BTreeMap::new();
    let mut vertices: Vec<Vertex> = Vec::new();
    let mut intern = |n: Vec<i64>| -> VertexId {
        if let Some(&id) = ids.get(&n) {
            return id;
        }
        let id = vertices.len();
        vertices.push(Vertex {
            id,
            pos: embed(&n),
            color: parity(&n),
        });
        ids.insert(n, id);
        id
    };

    let mut faces = Vec::new();
    let mut edge_set: BTreeMap<(VertexId, VertexId), f64> = BTreeMap::new();
    for (pi_idx, p) in plaquettes.iter().enumerate() {
        if p.base.len() != m {
            return Err(GraphError::Topology(format!(
                "plaquette {pi_idx} has dimension {} but {m} directions are given",
                p.base.len()
            )));
        }
        let (di, dj) = p.dirs;
        if di >= m || dj >= m || di == dj {
            return Err(GraphError::Topology(format!(
                "plaquette {pi_idx} has invalid direction pair ({di}, {dj})"
            )));
        }
        let mut n_i = p.base.clone();
        n_i[di] += 1;
        let mut n_j = p.base.clone();
        n_j[dj] += 1;
        let mut n_ij = n_i.clone();
        n_ij[dj] += 1;
        let (v00, v10, v01, v11) = (
            intern(p.base.clone()),
            intern(n_i),
            intern(n_j),
            intern(n_ij),
        );
        // black base corner and its two outgoing directions
        let (base, mu, nu, wa, wb, opposite_corner) = if parity(&p.base) == Color::Black {
            (v00, alphas[di], alphas[dj], v10, v01, v11)
        } else {
            (
                v10,
                normalize_angle(alphas[di] + PI),
                alphas[dj],
                v00,
                v11,
                v01,
            )
        };
        let (a, b, x1, x2) = orient(normalize_angle(mu), normalize_angle(nu), wa, wb);
        faces.push(Face {
            corners: [base, x1, opposite_corner, x2],
            alpha: a,
            beta: b,
        });
        // the four directed boundary edges
        for (bk, wk, lbl) in [
            (base, x1, a),
            (base, x2, b),
            (opposite_corner, x1, normalize_angle(b + PI)),
            (opposite_corner, x2, normalize_angle(a + PI)),
        ] {
            if let Some(&prev) = edge_set.get(&(bk, wk)) {
                if !angles_close(prev, lbl) {
                    return Err(GraphError::Topology(format!(
                        "plaquette {pi_idx} disagrees with a neighbor on edge ({bk}, {wk})"
                    )));
                }
            } else {
                edge_set.insert((bk, wk), normalize_angle(lbl));
            }
        }
    }

    // Monotonicity: distinct lattice points must embed at distinct positions.
    let all: Vec<VertexId> = ids.values().copied().collect();
    for (i, &a) in all.iter().enumerate() {
        for &b in &all[i + 1..] {
            if (vertices[a].pos - vertices[b].pos).norm() < 1e-7 {
                return Err(GraphError::Topology(
                    "surface is not monotone: two lattice points project to the same position"
                        .into(),
                ));
            }
        }
    }

    let edges = edge_set
        .into_iter()
        .map(|((from, to), alpha)| Edge { from, to, alpha })
        .collect();
    Ok(QuadGraph::new(vertices, edges, faces))
}

/// The three plaquettes of the lower corner of `Z^3` at the origin: the
/// "star" side of the elementary flip.
pub fn corner_surface() -> Vec<Plaquette> {
    vec![
        Plaquette {
            base: vec![0, 0, 0],
            dirs: (0, 1),
        },
        Plaquette {
            base: vec![0, 0, 0],
            dirs: (1, 2),
        },
        Plaquette {
            base: vec![0, 0, 0],
            dirs: (2, 0),
        },
    ]
}

/// Staircase patch of the octant boundary: all plaquettes of the three
/// coordinate planes with offsets in `[0, extent)^2`. Contains the corner
/// surface and keeps its hexagon interior for `extent >= 2`.
pub fn corner_patch(extent: i64) -> Vec<Plaquette> {
    let mut out = Vec::new();
    for (i, j) in [(0usize, 1usize), (1, 2), (2, 0)] {
        for a in 0..extent {
            for b in 0..extent {
                let mut base = vec![0i64; 3];
                base[i] = a;
                base[j] = b;
                out.push(Plaquette { base, dirs: (i, j) });
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct VertexJson {
    id: usize,
    pos: [f64; 2],
    color: Color,
}

#[derive(Serialize, Deserialize)]
struct EdgeJson {
    from: usize,
    to: usize,
    alpha: f64,
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    vertices: Vec<VertexJson>,
    edges: Vec<EdgeJson>,
    faces: Vec<[usize; 4]>,
}

impl QuadGraph {
    pub fn to_json(&self) -> String {
        let doc = GraphJson {
            vertices: self
                .vertices
                .iter()
                .map(|v| VertexJson {
                    id: v.id,
                    pos: [v.pos.re, v.pos.im],
                    color: v.color,
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeJson {
                    from: e.from,
                    to: e.to,
                    alpha: e.alpha,
                })
                .collect(),
            faces: self.faces.iter().map(|f| f.corners).collect(),
        };
        serde_json::to_string_pretty(&doc).expect("graph serialization cannot fail")
    }

    /// Parses the JSON graph format; face labels are reconstructed from the
    /// boundary edges.
    pub fn from_json(text: &str) -> Result<Self, GraphError> {
        let doc: GraphJson =
            serde_json::from_str(text).map_err(|e| GraphError::Json(e.to_string()))?;
        let vertices: Vec<Vertex> = doc
            .vertices
            .iter()
            .map(|v| Vertex {
                id: v.id,
                pos: Complex64::new(v.pos[0], v.pos[1]),
                color: v.color,
            })
            .collect();
        let edges: Vec<Edge> = doc
            .edges
            .iter()
            .map(|e| Edge {
                from: e.from,
                to: e.to,
                alpha: e.alpha,
            })
            .collect();
        let mut faces = Vec::with_capacity(doc.faces.len());
        for corners in doc.faces {
            let find = |b: usize, w: usize| -> Result<f64, GraphError> {
                edges
                    .iter()
                    .find(|e| e.from == b && e.to == w)
                    .map(|e| e.alpha)
                    .ok_or_else(|| {
                        GraphError::Json(format!("face references missing edge ({b}, {w})"))
                    })
            };
            let alpha = find(corners[0], corners[1])?;
            let beta = find(corners[0], corners[3])?;
            faces.push(Face {
                corners,
                alpha,
                beta,
            });
        }
        Ok(QuadGraph::new(vertices, edges, faces))
    }

    /// SVG rendering: black vertices filled, white hollow, unit edges, and an
    /// optional per-vertex scalar rendered as a blue-to-red fill.
    pub fn to_svg(&self, field: Option<&BTreeMap<VertexId, f64>>) -> String {
        let (lo, hi) = self.bounds();
        let pad = 0.6;
        let scale = 60.0;
        let w = (hi.re - lo.re + 2.0 * pad) * scale;
        let h = (hi.im - lo.im + 2.0 * pad) * scale;
        let tx = |p: Complex64| -> (f64, f64) {
            // SVG y grows downward
            (
                (p.re - lo.re + pad) * scale,
                h - (p.im - lo.im + pad) * scale,
            )
        };
        let (fmin, fmax) = field
            .map(|f| {
                f.values()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
                        (a.min(v), b.max(v))
                    })
            })
            .unwrap_or((0.0, 1.0));
        let mut s = String::new();
        s.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.0}\" height=\"{h:.0}\" viewBox=\"0 0 {w:.2} {h:.2}\">\n"
        ));
        for e in &self.edges {
            if let (Ok(a), Ok(b)) = (self.vertex(e.from), self.vertex(e.to)) {
                let (x1, y1) = tx(a.pos);
                let (x2, y2) = tx(b.pos);
                s.push_str(&format!(
                    "  <line x1=\"{x1:.2}\" y1=\"{y1:.2}\" x2=\"{x2:.2}\" y2=\"{y2:.2}\" stroke=\"#555\" stroke-width=\"1.5\"/>\n"
                ));
            }
        }
        for v in &self.vertices {
            let (x, y) = tx(v.pos);
            let fill = match field.and_then(|f| f.get(&v.id)) {
                Some(&val) => {
                    let t = if fmax > fmin {
                        (val - fmin) / (fmax - fmin)
                    } else {
                        0.5
                    };
                    let r = (255.0 * t) as u8;
                    let b = (255.0 * (1.0 - t)) as u8;
                    format!("rgb({r},60,{b})")
                }
                None => match v.color {
                    Color::Black => "#000".to_string(),
                    Color::White => "#fff".to_string(),
                },
            };
            s.push_str(&format!(
                "  <circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"5\" fill=\"{fill}\" stroke=\"#000\" stroke-width=\"1.2\"/>\n"
            ));
        }
        s.push_str("</svg>\n");
        s
    }
}
