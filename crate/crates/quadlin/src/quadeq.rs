//! The linear three-leg quad-equation: evaluation, face solving, cube
//! consistency, Bäcklund transforms and discrete exponential functions.
//!
//! On a face `(x0, x1, x12, x2)` with labels `(alpha, beta)` the equation is
//!
//! ```text
//! f(alpha - beta) x12 - g(alpha, beta) x0 = i ( h(beta) x2 - h(alpha) x1 ).
//! ```
//!
//! Bäcklund transforms impose the same equation on the vertical quads of the
//! two-layer graph, with `lambda` on ascending black-to-white edges. The top
//! layer carries reversed colors, so the transform of a solution solves the
//! quad-equation of the dual family (`lambda0 + pi`, i.e. `h` replaced by
//! `1/h`); its Laplacian is unchanged since the mass is `lambda0`-free.

use std::collections::{BTreeMap, VecDeque};
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coeffs::{CoefficientFamily, CoeffsError};
use crate::quadgraph::{Color, Face, GraphError, QuadGraph, VertexId};

/// Leading coefficients smaller than this abort a face solve.
pub const SINGULAR_TOL: f64 = 1e-12;

type C = Complex64;

#[derive(Debug, Error)]
pub enum QuadEqError {
    #[error(transparent)]
    Coeffs(#[from] CoeffsError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("singular face: coefficient of the target corner has magnitude {0:.3e}")]
    SingularFace(f64),
    #[error("propagation error: {0}")]
    Propagation(String),
    #[error("field does not match its domain: {0}")]
    DomainMismatch(String),
    #[error("input field violates the quad-equation: max residual {0:.3e}")]
    ResidualThreshold(f64),
}

/// Which vertices of a graph a field covers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Full,
    Black,
    White,
}

/// Complex-valued function on graph vertices.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldAssignment {
    pub domain: Domain,
    values: BTreeMap<VertexId, C>,
}

impl FieldAssignment {
    pub fn new(domain: Domain) -> Self {
        Self {
            domain,
            values: BTreeMap::new(),
        }
    }

    pub fn from_values(domain: Domain, values: BTreeMap<VertexId, C>) -> Self {
        Self { domain, values }
    }

    pub fn get(&self, id: VertexId) -> Option<C> {
        self.values.get(&id).copied()
    }

    pub fn set(&mut self, id: VertexId, value: C) {
        self.values.insert(id, value);
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (VertexId, C)> + '_ {
        self.values.iter().map(|(&k, &v)| (k, v))
    }

    pub fn max_abs(&self) -> f64 {
        self.values.values().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Checks the domain tag against the colors of the populated vertices.
    pub fn check_domain(&self, graph: &QuadGraph) -> Result<(), QuadEqError> {
        for (&id, _) in &self.values {
            let v = graph.vertex(id)?;
            let ok = match self.domain {
                Domain::Full => true,
                Domain::Black => v.color == Color::Black,
                Domain::White => v.color == Color::White,
            };
            if !ok {
                return Err(QuadEqError::DomainMismatch(format!(
                    "vertex {id} has color {:?} outside domain {:?}",
                    v.color, self.domain
                )));
            }
        }
        Ok(())
    }

    /// Restriction to the black vertices of `graph`.
    pub fn restrict_to_black(&self, graph: &QuadGraph) -> FieldAssignment {
        let values = self
            .values
            .iter()
            .filter(|(&id, _)| {
                graph
                    .vertex(id)
                    .map(|v| v.color == Color::Black)
                    .unwrap_or(false)
            })
            .map(|(&k, &v)| (k, v))
            .collect();
        FieldAssignment {
            domain: Domain::Black,
            values,
        }
    }

    /// `self * a + other * b`, defined on the intersection of supports.
    pub fn linear_combination(&self, a: C, other: &FieldAssignment, b: C) -> FieldAssignment {
        let mut values = BTreeMap::new();
        for (&id, &v) in &self.values {
            if let Some(w) = other.get(id) {
                values.insert(id, v * a + w * b);
            }
        }
        FieldAssignment {
            domain: self.domain,
            values,
        }
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Entry {
            id: usize,
            re: f64,
            im: f64,
        }
        #[derive(Serialize)]
        struct Doc {
            domain: Domain,
            values: Vec<Entry>,
        }
        let doc = Doc {
            domain: self.domain,
            values: self
                .values
                .iter()
                .map(|(&id, v)| Entry {
                    id,
                    re: v.re,
                    im: v.im,
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("field serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self, QuadEqError> {
        #[derive(Deserialize)]
        struct Entry {
            id: usize,
            re: f64,
            im: f64,
        }
        #[derive(Deserialize)]
        struct Doc {
            domain: Domain,
            values: Vec<Entry>,
        }
        let doc: Doc = serde_json::from_str(text)
            .map_err(|e| QuadEqError::Propagation(format!("bad field JSON: {e}")))?;
        let mut values = BTreeMap::new();
        for e in doc.values {
            values.insert(e.id, C::new(e.re, e.im));
        }
        Ok(Self {
            domain: doc.domain,
            values,
        })
    }

    /// CSV export `id,re,im`, one row per vertex.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("id,re,im\n");
        for (&id, v) in &self.values {
            s.push_str(&format!("{id},{},{}\n", v.re, v.im));
        }
        s
    }
}

/// Corner of a quad in face order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Corner {
    X0,
    X1,
    X12,
    X2,
}

impl Corner {
    fn index(self) -> usize {
        match self {
            Corner::X0 => 0,
            Corner::X1 => 1,
            Corner::X12 => 2,
            Corner::X2 => 3,
        }
    }
}

/// Coefficient row of the quad-equation on `(x0, x1, x12, x2)` with labels
/// `(alpha, beta)`.
fn equation_row(
    fam: &CoefficientFamily<f64>,
    alpha: f64,
    beta: f64,
) -> Result<[C; 4], CoeffsError> {
    let f = fam.f(C::new(alpha - beta, 0.0))?;
    let g = fam.g(alpha, beta)?;
    let ha = fam.h(alpha)?;
    let hb = fam.h(beta)?;
    let i = C::i();
    Ok([-g, i * ha, f, -(i * hb)])
}

/// Residual `f(a-b) x12 - g(a,b) x0 - i (h(b) x2 - h(a) x1)`.
pub fn quad_residual(
    fam: &CoefficientFamily<f64>,
    labels: (f64, f64),
    values: [C; 4],
) -> Result<C, QuadEqError> {
    let row = equation_row(fam, labels.0, labels.1)?;
    Ok(row.iter().zip(values.iter()).map(|(c, x)| c * x).sum())
}

/// Solves the quad-equation for one corner given the other three values
/// (in face order, the target entry being ignored).
pub fn solve_for_vertex(
    fam: &CoefficientFamily<f64>,
    labels: (f64, f64),
    values: [C; 4],
    target: Corner,
) -> Result<C, QuadEqError> {
    let row = equation_row(fam, labels.0, labels.1)?;
    let t = target.index();
    if row[t].norm() < SINGULAR_TOL {
        return Err(QuadEqError::SingularFace(row[t].norm()));
    }
    let mut rhs = C::new(0.0, 0.0);
    for k in 0..4 {
        if k != t {
            rhs += row[k] * values[k];
        }
    }
    Ok(-rhs / row[t])
}

/// Residual of the quad-equation on one face of a graph.
pub fn face_residual(
    fam: &CoefficientFamily<f64>,
    field: &FieldAssignment,
    face: &Face,
) -> Result<C, QuadEqError> {
    let mut values = [C::new(0.0, 0.0); 4];
    for (slot, &corner) in values.iter_mut().zip(face.corners.iter()) {
        *slot = field.get(corner).ok_or_else(|| {
            QuadEqError::DomainMismatch(format!("field misses face corner {corner}"))
        })?;
    }
    quad_residual(fam, (face.alpha, face.beta), values)
}

/// Largest face residual over the whole graph.
pub fn max_face_residual(
    graph: &QuadGraph,
    fam: &CoefficientFamily<f64>,
    field: &FieldAssignment,
) -> Result<f64, QuadEqError> {
    let mut max = 0.0f64;
    for face in graph.faces() {
        max = max.max(face_residual(fam, field, face)?.norm());
    }
    Ok(max)
}

/// Face-by-face extension of Cauchy data: any face with exactly one unknown
/// corner is solved, sweeping in face order until nothing changes.
pub fn propagate(
    graph: &QuadGraph,
    fam: &CoefficientFamily<f64>,
    cauchy: &FieldAssignment,
) -> Result<FieldAssignment, QuadEqError> {
    let mut field = cauchy.clone();
    field.domain = Domain::Full;
    loop {
        let mut progressed = false;
        for face in graph.faces() {
            let known: Vec<bool> = face
                .corners
                .iter()
                .map(|&c| field.get(c).is_some())
                .collect();
            let unknown = known.iter().filter(|&&k| !k).count();
            if unknown != 1 {
                continue;
            }
            let t = known.iter().position(|&k| !k).unwrap();
            let target = [Corner::X0, Corner::X1, Corner::X12, Corner::X2][t];
            let mut values = [C::new(0.0, 0.0); 4];
            for (k, &corner) in face.corners.iter().enumerate() {
                if k != t {
                    values[k] = field.get(corner).unwrap();
                }
            }
            let solved = solve_for_vertex(fam, (face.alpha, face.beta), values, target)?;
            field.set(face.corners[t], solved);
            progressed = true;
        }
        if !progressed {
            break;
        }
    }
    if field.len() < graph.vertices().len() {
        return Err(QuadEqError::Propagation(format!(
            "data determines {} of {} vertices; the Cauchy set does not span the graph",
            field.len(),
            graph.vertices().len()
        )));
    }
    Ok(field)
}

/// Labels of the three directions of an elementary cube.
#[derive(Clone, Copy, Debug)]
pub struct CubeLabels {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

/// Outcome of imposing the equation on all six faces of a cube.
#[derive(Clone, Copy, Debug)]
pub struct Consistency3 {
    /// `x123` computed through each of the three upper faces.
    pub candidates: [C; 3],
    /// Maximum pairwise distance between the candidates.
    pub discrepancy: f64,
    pub x12: C,
    pub x13: C,
    pub x23: C,
}

/// Computes `x12`, `x13`, `x23` from the lower faces and the three candidate
/// values of `x123` from the upper faces of the labeled cube.
pub fn check_3d_consistency(
    fam: &CoefficientFamily<f64>,
    labels: CubeLabels,
    init: [C; 4],
) -> Result<Consistency3, QuadEqError> {
    let [x0, x1, x2, x3] = init;
    let (a, b, c) = (labels.alpha, labels.beta, labels.gamma);
    let z = C::new(0.0, 0.0);
    let x12 = solve_for_vertex(fam, (a, b), [x0, x1, z, x2], Corner::X12)?;
    let x13 = solve_for_vertex(fam, (a, c), [x0, x1, z, x3], Corner::X12)?;
    let x23 = solve_for_vertex(fam, (b, c), [x0, x2, z, x3], Corner::X12)?;
    // upper faces, each solved for the white corner x123
    let t1 = solve_for_vertex(fam, (b + PI, c), [x12, x1, x13, z], Corner::X2)?;
    let t2 = solve_for_vertex(fam, (a + PI, c), [x12, x2, x23, z], Corner::X2)?;
    let t3 = solve_for_vertex(fam, (a + PI, b), [x13, x3, x23, z], Corner::X2)?;
    let discrepancy = (t1 - t2).norm().max((t1 - t3).norm()).max((t2 - t3).norm());
    Ok(Consistency3 {
        candidates: [t1, t2, t3],
        discrepancy,
        x12,
        x13,
        x23,
    })
}

/// Residual of the symmetric tetrahedron equation
/// `f(b-c) x1 + f(c-a) x2 + f(a-b) x3 - f(a-b) f(b-c) f(c-a) x123`,
/// with `x123` taken from the consistency computation.
pub fn tetrahedron_check(
    fam: &CoefficientFamily<f64>,
    labels: CubeLabels,
    init: [C; 4],
) -> Result<C, QuadEqError> {
    let cons = check_3d_consistency(fam, labels, init)?;
    let x123 = cons.candidates[0];
    let (a, b, c) = (labels.alpha, labels.beta, labels.gamma);
    let fab = fam.f(C::new(a - b, 0.0))?;
    let fbc = fam.f(C::new(b - c, 0.0))?;
    let fca = fam.f(C::new(c - a, 0.0))?;
    let [_, x1, x2, x3] = init;
    Ok(fbc * x1 + fca * x2 + fab * x3 - fab * fbc * fca * x123)
}

/// Bäcklund transform of `x` with parameter `lambda`, normalized by `seed`.
///
/// The input must solve the quad-equation of `fam` on `graph` (the zero field
/// always does); the output solves the dual family's equation.
pub fn backlund(
    graph: &QuadGraph,
    fam: &CoefficientFamily<f64>,
    x: &FieldAssignment,
    lambda: f64,
    seed: (VertexId, C),
) -> Result<FieldAssignment, QuadEqError> {
    let scale = 1.0 + x.max_abs();
    let max_in = max_face_residual(graph, fam, x)?;
    if max_in > 1e-9 * scale {
        return Err(QuadEqError::ResidualThreshold(max_in));
    }
    graph.vertex(seed.0)?;

    let mut out = FieldAssignment::new(Domain::Full);
    out.set(seed.0, seed.1);
    let mut queue = VecDeque::from([seed.0]);
    while let Some(v) = queue.pop_front() {
        let xv_plus = out.get(v).unwrap();
        for e in graph.edges() {
            let (next, value) = if e.from == v && out.get(e.to).is_none() {
                // ascending step along a black-to-white edge, label mu:
                // f(mu - lam) xw+ - g(mu, lam) xb = i ( h(lam) xb+ - h(mu) xw )
                let (xb, xw) = (field_value(x, v)?, field_value(x, e.to)?);
                let fml = fam.f(C::new(e.alpha - lambda, 0.0))?;
                if fml.norm() < SINGULAR_TOL {
                    return Err(QuadEqError::SingularFace(fml.norm()));
                }
                let rhs = fam.g(e.alpha, lambda)? * xb
                    + C::i() * (fam.h(lambda)? * xv_plus - fam.h(e.alpha)? * xw);
                (e.to, rhs / fml)
            } else if e.to == v && out.get(e.from).is_none() {
                // descending step, white to black, against an edge labeled mu:
                // f(mu - lam - pi) xb+ - g(mu, lam + pi) xw
                //     = i ( h(lam + pi) xw+ - h(mu) xb )
                let (xw, xb) = (field_value(x, v)?, field_value(x, e.from)?);
                let fml = fam.f(C::new(e.alpha - lambda - PI, 0.0))?;
                if fml.norm() < SINGULAR_TOL {
                    return Err(QuadEqError::SingularFace(fml.norm()));
                }
                let rhs = fam.g(e.alpha, lambda + PI)? * xw
                    + C::i() * (fam.h(lambda + PI)? * xv_plus - fam.h(e.alpha)? * xb);
                (e.from, rhs / fml)
            } else {
                continue;
            };
            out.set(next, value);
            queue.push_back(next);
        }
    }
    if out.len() < graph.vertices().len() {
        return Err(QuadEqError::Propagation(
            "graph is not edge-connected from the seed vertex".into(),
        ));
    }
    Ok(out)
}

fn field_value(x: &FieldAssignment, id: VertexId) -> Result<C, QuadEqError> {
    x.get(id)
        .ok_or_else(|| QuadEqError::DomainMismatch(format!("field misses vertex {id}")))
}

/// Discrete exponential normalized to 1 at the black vertex `v0`: along a
/// path with step angles `a_k` the value gains `i / f(a_k - lambda)` per
/// step, white endpoints carrying one extra factor `h(lambda)`.
pub fn discrete_exponential(
    graph: &QuadGraph,
    fam: &CoefficientFamily<f64>,
    lambda: f64,
    v0: VertexId,
) -> Result<FieldAssignment, QuadEqError> {
    if graph.vertex(v0)?.color != Color::Black {
        return Err(QuadEqError::Propagation(format!(
            "exponential must be normalized at a black vertex, {v0} is white"
        )));
    }
    let h_lam = fam.h(lambda)?;
    let mut out = FieldAssignment::new(Domain::Full);
    out.set(v0, C::new(1.0, 0.0));
    let mut queue = VecDeque::from([v0]);
    while let Some(v) = queue.pop_front() {
        let ev = out.get(v).unwrap();
        for e in graph.edges() {
            let (next, value) = if e.from == v && out.get(e.to).is_none() {
                // black -> white, step angle = label
                let fml = fam.f(C::new(e.alpha - lambda, 0.0))?;
                if fml.norm() < SINGULAR_TOL {
                    return Err(QuadEqError::SingularFace(fml.norm()));
                }
                (e.to, ev * C::i() * h_lam / fml)
            } else if e.to == v && out.get(e.from).is_none() {
                // white -> black, step angle = label + pi;
                // i / (h(lam) f(mu + pi - lam)) = -i f(mu - lam) / h(lam)
                let fml = fam.f(C::new(e.alpha - lambda, 0.0))?;
                (e.from, -(ev * C::i() * fml) / h_lam)
            } else {
                continue;
            };
            out.set(next, value);
            queue.push_back(next);
        }
    }
    if out.len() < graph.vertices().len() {
        return Err(QuadEqError::Propagation(
            "graph is not edge-connected from the base vertex".into(),
        ));
    }
    Ok(out)
}

/// Largest deviation of the one-step exponential relation over all edges;
/// zero exactly when the product formula is path independent.
pub fn exponential_path_spread(
    graph: &QuadGraph,
    fam: &CoefficientFamily<f64>,
    lambda: f64,
    field: &FieldAssignment,
) -> Result<f64, QuadEqError> {
    let h_lam = fam.h(lambda)?;
    let mut max = 0.0f64;
    for e in graph.edges() {
        let (eb, ew) = (field_value(field, e.from)?, field_value(field, e.to)?);
        let fml = fam.f(C::new(e.alpha - lambda, 0.0))?;
        max = max.max((ew - eb * C::i() * h_lam / fml).norm() / (1.0 + ew.norm()));
    }
    Ok(max)
}
