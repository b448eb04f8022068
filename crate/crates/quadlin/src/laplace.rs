//! Massive Laplace operators on the black vertices of a quad-graph, both
//! Dirichlet energy forms, positivity certificates and a Dirichlet solver.
//!
//! Per interior black star with rhombus angles `phi_k` at the center, the
//! operator row reads `mass * x0 - sum_k f(phi_k) x_{k,k+1}` with
//! `mass = sum_k g0(phi_k)`. This is the Euler-Lagrange row of both energy
//! forms, so the residual equals the energy gradient. In the rectangular
//! regime all weights `f(phi_k)` are positive and dominated by the mass, and
//! the interior system is symmetric positive definite.

use std::collections::BTreeMap;

use num_complex::Complex64;
use thiserror::Error;

use crate::coeffs::{CoefficientFamily, CoeffsError};
use crate::quadeq::{Domain, FieldAssignment, QuadEqError};
use crate::quadgraph::{Color, GraphError, QuadGraph, VertexId};

type C = Complex64;

#[derive(Debug, Error)]
pub enum LaplaceError {
    #[error(transparent)]
    Coeffs(#[from] CoeffsError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Field(#[from] QuadEqError),
    #[error("assembly inconsistency: mass via g and via g0 differ by {0:.3e}")]
    MassMismatch(f64),
    #[error("coefficient expected real, found imaginary part {0:.3e}")]
    NotReal(f64),
    #[error("missing value at vertex {0}")]
    MissingValue(VertexId),
    #[error("solver error: {0} (condition estimate {1:.3e})")]
    Singular(String, f64),
    #[error("geometry error: {0}")]
    Geometry(String),
}

/// Row of the operator at one interior black vertex.
#[derive(Clone, Debug)]
pub struct LaplaceRow {
    pub center: VertexId,
    /// `(neighbor black id, weight f(phi_k))` per incident quad.
    pub neighbors: Vec<(VertexId, f64)>,
    /// `sum_k g0(phi_k)`.
    pub mass: f64,
}

/// Assembled operator over the interior black vertices, with the black
/// boundary handled by identity rows against Dirichlet data.
#[derive(Clone, Debug)]
pub struct LaplaceOperator {
    rows: Vec<LaplaceRow>,
    index: BTreeMap<VertexId, usize>,
    boundary: Vec<VertexId>,
    /// Dominance `mass > sum |f|` on every row; implies positive definiteness.
    definite: bool,
}

fn real_part(v: C, scale: f64) -> Result<f64, LaplaceError> {
    if v.im.abs() > 1e-10 * (1.0 + scale) {
        return Err(LaplaceError::NotReal(v.im.abs()));
    }
    Ok(v.re)
}

impl LaplaceOperator {
    pub fn rows(&self) -> &[LaplaceRow] {
        &self.rows
    }

    pub fn interior(&self) -> Vec<VertexId> {
        self.rows.iter().map(|r| r.center).collect()
    }

    pub fn boundary(&self) -> &[VertexId] {
        &self.boundary
    }

    pub fn is_definite(&self) -> bool {
        self.definite
    }

    /// Residual `mass * x_v - sum w x_nb` per interior black vertex.
    pub fn residual(&self, x: &FieldAssignment) -> Result<BTreeMap<VertexId, C>, LaplaceError> {
        let mut out = BTreeMap::new();
        for row in &self.rows {
            let xv = x
                .get(row.center)
                .ok_or(LaplaceError::MissingValue(row.center))?;
            let mut acc = xv * row.mass;
            for &(nb, w) in &row.neighbors {
                let xn = x.get(nb).ok_or(LaplaceError::MissingValue(nb))?;
                acc -= xn * w;
            }
            out.insert(row.center, acc);
        }
        Ok(out)
    }

    pub fn max_residual(&self, x: &FieldAssignment) -> Result<f64, LaplaceError> {
        Ok(self
            .residual(x)?
            .values()
            .map(|v| v.norm())
            .fold(0.0, f64::max))
    }

    /// Solves the Dirichlet problem for the given black boundary values.
    ///
    /// Conjugate gradients with diagonal preconditioning on definite systems,
    /// dense LU otherwise. Returns values on the interior black vertices.
    pub fn solve_dirichlet(
        &self,
        boundary: &FieldAssignment,
    ) -> Result<FieldAssignment, LaplaceError> {
        let n = self.rows.len();
        let mut rhs = vec![C::new(0.0, 0.0); n];
        for (i, row) in self.rows.iter().enumerate() {
            for &(nb, w) in &row.neighbors {
                if !self.index.contains_key(&nb) {
                    let value = boundary.get(nb).ok_or(LaplaceError::MissingValue(nb))?;
                    rhs[i] += value * w;
                }
            }
        }
        let solution = if self.definite {
            let re = self.cg(&rhs.iter().map(|v| v.re).collect::<Vec<_>>())?;
            let im = self.cg(&rhs.iter().map(|v| v.im).collect::<Vec<_>>())?;
            re.into_iter()
                .zip(im)
                .map(|(r, i)| C::new(r, i))
                .collect::<Vec<_>>()
        } else {
            self.lu_solve(&rhs)?
        };
        let mut out = FieldAssignment::new(Domain::Black);
        for (row, value) in self.rows.iter().zip(solution) {
            out.set(row.center, value);
        }
        Ok(out)
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; x.len()];
        for (i, row) in self.rows.iter().enumerate() {
            let mut acc = row.mass * x[i];
            for &(nb, w) in &row.neighbors {
                if let Some(&j) = self.index.get(&nb) {
                    acc -= w * x[j];
                }
            }
            y[i] = acc;
        }
        y
    }

    fn cg(&self, b: &[f64]) -> Result<Vec<f64>, LaplaceError> {
        let n = b.len();
        let dinv: Vec<f64> = self.rows.iter().map(|r| 1.0 / r.mass).collect();
        let mut x = vec![0.0; n];
        let mut r = b.to_vec();
        let mut z: Vec<f64> = r.iter().zip(&dinv).map(|(a, d)| a * d).collect();
        let mut p = z.clone();
        let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let bnorm: f64 = b.iter().map(|v| v * v).sum::<f64>().sqrt();
        if bnorm == 0.0 {
            return Ok(x);
        }
        for _ in 0..10 * n.max(1) {
            let ap = self.apply(&p);
            let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
            if pap <= 0.0 {
                return Err(LaplaceError::Singular(
                    "matrix is not positive definite".into(),
                    f64::INFINITY,
                ));
            }
            let alpha = rz / pap;
            for k in 0..n {
                x[k] += alpha * p[k];
                r[k] -= alpha * ap[k];
            }
            let rnorm: f64 = r.iter().map(|v| v * v).sum::<f64>().sqrt();
            if rnorm <= 1e-12 * bnorm {
                return Ok(x);
            }
            z = r.iter().zip(&dinv).map(|(a, d)| a * d).collect();
            let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
            let beta = rz_new / rz;
            rz = rz_new;
            for k in 0..n {
                p[k] = z[k] + beta * p[k];
            }
        }
        Err(LaplaceError::Singular(
            "CG did not converge".into(),
            f64::NAN,
        ))
    }

    fn dense_matrix(&self) -> Vec<Vec<f64>> {
        let n = self.rows.len();
        let mut m = vec![vec![0.0; n]; n];
        for (i, row) in self.rows.iter().enumerate() {
            m[i][i] = row.mass;
            for &(nb, w) in &row.neighbors {
                if let Some(&j) = self.index.get(&nb) {
                    m[i][j] -= w;
                }
            }
        }
        m
    }

    fn lu_solve(&self, rhs: &[C]) -> Result<Vec<C>, LaplaceError> {
        let n = rhs.len();
        let mut m = self.dense_matrix();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut max_pivot = 0.0f64;
        let mut min_pivot = f64::INFINITY;
        for col in 0..n {
            let (p, _) = (col..n)
                .map(|r| (r, m[r][col].abs()))
                .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
                .unwrap();
            m.swap(col, p);
            perm.swap(col, p);
            let pivot = m[col][col];
            max_pivot = max_pivot.max(pivot.abs());
            min_pivot = min_pivot.min(pivot.abs());
            if pivot.abs() < 1e-14 * max_pivot.max(1.0) {
                return Err(LaplaceError::Singular(
                    "zero pivot in LU factorization".into(),
                    max_pivot / pivot.abs().max(f64::MIN_POSITIVE),
                ));
            }
            for r in col + 1..n {
                let factor = m[r][col] / pivot;
                m[r][col] = factor;
                for c in col + 1..n {
                    m[r][c] -= factor * m[col][c];
                }
            }
        }
        // forward elimination, then back substitution
        let mut x = perm.iter().map(|&p| rhs[p]).collect::<Vec<C>>();
        for r in 1..n {
            for c in 0..r {
                let f = m[r][c];
                x[r] = x[r] - x[c] * f;
            }
        }
        for r in (0..n).rev() {
            let mut acc = x[r];
            for c in r + 1..n {
                acc -= x[c] * m[r][c];
            }
            x[r] = acc / m[r][r];
        }
        Ok(x)
    }

    /// Matrix-market-style coordinate export of the assembled system
    /// (boundary rows as identity), plus a JSON sidecar mapping matrix
    /// indices to vertex ids.
    pub fn export_matrix_market(&self) -> (String, String) {
        let n_int = self.rows.len();
        let ids: Vec<VertexId> = self
            .rows
            .iter()
            .map(|r| r.center)
            .chain(self.boundary.iter().copied())
            .collect();
        let pos: BTreeMap<VertexId, usize> = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut entries: Vec<(usize, usize, f64)> = Vec::new();
        for (i, row) in self.rows.iter().enumerate() {
            entries.push((i, i, row.mass));
            for &(nb, w) in &row.neighbors {
                if let Some(&j) = pos.get(&nb) {
                    entries.push((i, j, -w));
                }
            }
        }
        for b in 0..self.boundary.len() {
            entries.push((n_int + b, n_int + b, 1.0));
        }
        let mut text = String::from("%%MatrixMarket matrix coordinate real general\n");
        text.push_str(&format!("{} {} {}\n", ids.len(), ids.len(), entries.len()));
        for (r, c, v) in entries {
            text.push_str(&format!("{} {} {}\n", r + 1, c + 1, v));
        }
        let sidecar = serde_json::json!({
            "interior": n_int,
            "vertex_ids": ids,
        });
        (text, serde_json::to_string_pretty(&sidecar).unwrap())
    }
}

/// Assembles the massive Laplacian of the family on the graph.
pub fn assemble(
    graph: &QuadGraph,
    fam: &CoefficientFamily<f64>,
) -> Result<LaplaceOperator, LaplaceError> {
    let mut rows = Vec::new();
    let mut definite = true;
    for star in graph.black_stars() {
        let mut neighbors = Vec::with_capacity(star.fan.len());
        let mut mass = 0.0;
        let mut mass_via_g = C::new(0.0, 0.0);
        let mut weight_sum = 0.0;
        for entry in &star.fan {
            let phi = crate::quadgraph::normalize_angle(entry.labels.1 - entry.labels.0);
            let w = real_part(fam.f(C::new(phi, 0.0))?, 1.0)?;
            let m = real_part(fam.g0(C::new(phi, 0.0))?, 1.0)?;
            neighbors.push((entry.opposite, w));
            mass += m;
            weight_sum += w.abs();
            // the paper's mass is the sum of g over the fan label pairs
            mass_via_g -= fam.g(entry.labels.0, entry.labels.1)?;
        }
        let diff = (mass_via_g - C::new(mass, 0.0)).norm();
        if diff > 1e-10 * (1.0 + mass.abs()) {
            return Err(LaplaceError::MassMismatch(diff));
        }
        if mass <= weight_sum {
            definite = false;
        }
        rows.push(LaplaceRow {
            center: star.center,
            neighbors,
            mass,
        });
    }
    rows.sort_by_key(|r| r.center);
    let index = rows
        .iter()
        .enumerate()
        .map(|(i, r)| (r.center, i))
        .collect();
    let interior: Vec<VertexId> = rows.iter().map(|r| r.center).collect();
    let boundary = graph
        .vertex_ids(Color::Black)
        .into_iter()
        .filter(|v| !interior.contains(v) && !graph.faces_at(*v).is_empty())
        .collect();
    Ok(LaplaceOperator {
        rows,
        index,
        boundary,
        definite,
    })
}

/// Which quadratic form to evaluate per quad.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EnergyForm {
    /// `g(b,a) x0^2 / 2 + g(b+pi,a+pi) x12^2 / 2 - f(phi) x0 x12`
    Gg,
    /// `g0(phi) (x0^2 + x12^2) / 2 - f(phi) x0 x12`
    G0,
}

/// Per-quad coefficients `(p, s, r)` of the form
/// `p x0^2 / 2 + s x12^2 / 2 - r x0 x12`.
fn quad_form(
    fam: &CoefficientFamily<f64>,
    alpha: f64,
    beta: f64,
    form: EnergyForm,
) -> Result<(f64, f64, f64), LaplaceError> {
    let phi = crate::quadgraph::normalize_angle(beta - alpha);
    if !(0.0..std::f64::consts::PI).contains(&phi) {
        return Err(LaplaceError::Geometry(format!(
            "face is not positively oriented: opening {phi:.6}"
        )));
    }
    let f = real_part(fam.f(C::new(phi, 0.0))?, 1.0)?;
    match form {
        EnergyForm::G0 => {
            let g0 = real_part(fam.g0(C::new(phi, 0.0))?, 1.0)?;
            Ok((g0, g0, f))
        }
        EnergyForm::Gg => {
            // label pair read clockwise so that the difference is +phi
            let p = real_part(fam.g(beta, alpha)?, 1.0)?;
            let s = real_part(
                fam.g(beta + std::f64::consts::PI, alpha + std::f64::consts::PI)?,
                1.0,
            )?;
            Ok((p, s, f))
        }
    }
}

/// Dirichlet energy of a field over all faces of the graph.
pub fn dirichlet_energy(
    graph: &QuadGraph,
    fam: &CoefficientFamily<f64>,
    x: &FieldAssignment,
    form: EnergyForm,
) -> Result<C, LaplaceError> {
    let mut total = C::new(0.0, 0.0);
    for face in graph.faces() {
        let (p, s, r) = quad_form(fam, face.alpha, face.beta, form)?;
        let x0 = x
            .get(face.corners[0])
            .ok_or(LaplaceError::MissingValue(face.corners[0]))?;
        let x12 = x
            .get(face.corners[2])
            .ok_or(LaplaceError::MissingValue(face.corners[2]))?;
        total += x0 * x0 * (0.5 * p) + x12 * x12 * (0.5 * s) - x0 * x12 * r;
    }
    Ok(total)
}

/// Positivity certificate entry for one quad.
#[derive(Clone, Copy, Debug)]
pub struct QuadCertificate {
    pub face: usize,
    /// Minimum eigenvalue of the symmetric 2x2 form in `(x0, x12)`.
    pub min_eigenvalue: f64,
    /// Coefficient of the complete square carrying the gg-form,
    /// `f(phi) h(alpha) h(beta)`; equals the x0^2 coefficient.
    pub square_coefficient: f64,
}

/// Per-quad minimum eigenvalues of the selected energy form.
pub fn positivity_certificate(
    graph: &QuadGraph,
    fam: &CoefficientFamily<f64>,
    form: EnergyForm,
) -> Result<Vec<QuadCertificate>, LaplaceError> {
    let mut out = Vec::with_capacity(graph.faces().len());
    for (i, face) in graph.faces().iter().enumerate() {
        let (p, s, r) = quad_form(fam, face.alpha, face.beta, form)?;
        let half_tr = 0.5 * (p + s);
        let disc = (0.5 * (p - s)).hypot(r);
        out.push(QuadCertificate {
            face: i,
            min_eigenvalue: half_tr - disc,
            square_coefficient: p,
        });
    }
    Ok(out)
}

/// Combines boundary data and an interior solution into one black field.
pub fn merge_black_field(
    boundary: &FieldAssignment,
    interior: &FieldAssignment,
) -> FieldAssignment {
    let mut out = FieldAssignment::new(Domain::Black);
    for (id, v) in boundary.iter() {
        out.set(id, v);
    }
    for (id, v) in interior.iter() {
        out.set(id, v);
    }
    out
}
