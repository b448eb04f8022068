//! Pluri-Lagrangian machinery for quadratic 2-forms on black vertices:
//! corner-equation systems, the two-field star-triangle map and its inverse,
//! 4D consistency, the three-field map with its gauge classification, and
//! Dirichlet-energy invariance under flips.
//!
//! Weight triples are stored in the cyclic order `(ij, jk, ki)`; reversing a
//! plaquette's orientation negates both of its coefficients.

use num_complex::Complex;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coeffs::{CoefficientFamily, CoeffsError, FamilyRegime};
use crate::laplace::{self, EnergyForm, LaplaceError};
use crate::quadeq::{FieldAssignment, QuadEqError};
use crate::quadgraph::{GraphError, QuadGraph, VertexId};
use crate::scalar::Scalar;

/// Denominators smaller than this abort the rational maps.
pub const DEGENERACY_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum PluriError {
    #[error("zero denominator: |c^ij + c^jk + c^ki| = {0:.3e}")]
    ZeroDenominator(f64),
    #[error("singular inverse: a flipped a-component has magnitude {0:.3e}")]
    SingularInverse(f64),
    #[error("branch point: D^2 vanishes")]
    BranchPoint,
    #[error("weights leave the complete-square variety: |bc - a^2| = {0:.3e}")]
    NotCompleteSquare(f64),
    #[error("angle sum {0:.6} is not 2 pi")]
    AngleSum(f64),
    #[error(
        "input triples do not satisfy the classical star-triangle relation (residual {0:.3e})"
    )]
    StarTriangleMismatch(f64),
    #[error("operation requires the rectangular or degenerate regime, got {0:?}")]
    Regime(FamilyRegime),
    #[error("malformed weights JSON: {0}")]
    Json(String),
    #[error("expected exactly 3 weight entries, found {0}")]
    BadWeightCount(usize),
    #[error(transparent)]
    Coeffs(#[from] CoeffsError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Laplace(#[from] LaplaceError),
    #[error(transparent)]
    Field(#[from] QuadEqError),
}

/// Two-field plaquette weights `(a, c)` for the form
/// `c (x^2 + x_ij^2)/2 - a x x_ij` on the black diagonal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlaquetteWeights2<S> {
    pub a: Complex<S>,
    pub c: Complex<S>,
}

impl<S: Scalar> PlaquetteWeights2<S> {
    pub fn new(a: Complex<S>, c: Complex<S>) -> Self {
        Self { a, c }
    }

    /// Orientation reversal `sigma^ij -> sigma^ji`.
    pub fn reversed(self) -> Self {
        Self {
            a: -self.a,
            c: -self.c,
        }
    }
}

/// The three plaquette weight pairs of an elementary cube, in the cyclic
/// order `(ij, jk, ki)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CubeWeights2<S> {
    pub w: [PlaquetteWeights2<S>; 3],
}

impl<S: Scalar> CubeWeights2<S> {
    pub fn new(w: [PlaquetteWeights2<S>; 3]) -> Self {
        Self { w }
    }

    fn a(&self, k: usize) -> Complex<S> {
        self.w[k].a
    }

    fn c(&self, k: usize) -> Complex<S> {
        self.w[k].c
    }

    pub fn max_abs(&self) -> S {
        self.w
            .iter()
            .flat_map(|p| [p.a.norm(), p.c.norm()])
            .fold(S::zero(), S::max)
    }
}

/// Branch choice for the square root in the triangle-star map.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RootSign {
    Plus,
    Minus,
}

impl RootSign {
    fn apply<S: Scalar>(self, v: Complex<S>) -> Complex<S> {
        match self {
            RootSign::Plus => v,
            RootSign::Minus => -v,
        }
    }
}

/// Result of the triangle-star map, with the square root that was taken and
/// the residual between the two algebraic routes to `D^2`.
#[derive(Clone, Copy, Debug)]
pub struct TriangleStar<S> {
    pub weights: CubeWeights2<S>,
    pub d: Complex<S>,
    pub d_squared_residual: S,
}

/// Two-field star-triangle map `F`.
///
/// `a^ij_k = a^jk a^ki / S` and
/// `c^ij_k = (c^jk + c^ki - c^ij - ((a^jk)^2 + (a^ki)^2 - (a^ij)^2)/S) / 2`
/// with `S = c^ij + c^jk + c^ki`, plus cyclic shifts.
pub fn two_field_f<S: Scalar>(w: &CubeWeights2<S>) -> Result<CubeWeights2<S>, PluriError> {
    let s = w.c(0) + w.c(1) + w.c(2);
    let scale = S::one() + w.max_abs();
    if s.norm() < S::from_f64(DEGENERACY_TOL).unwrap() * scale {
        return Err(PluriError::ZeroDenominator(s.norm().approx_f64()));
    }
    let half = S::from_f64(0.5).unwrap();
    let sq = |z: Complex<S>| z * z;
    let mut out = [PlaquetteWeights2 {
        a: Complex::zero(),
        c: Complex::zero(),
    }; 3];
    for k in 0..3 {
        let (i, j) = ((k + 1) % 3, (k + 2) % 3);
        out[k].a = w.a(i) * w.a(j) / s;
        out[k].c = (w.c(i) + w.c(j) - w.c(k) - (sq(w.a(i)) + sq(w.a(j)) - sq(w.a(k))) / s) * half;
    }
    Ok(CubeWeights2 { w: out })
}

/// Inverse ("triangle-star") map `G`; rational in `c`, with a square-root
/// ambiguity flipping the sign of all three `a`-components at once.
pub fn two_field_g<S: Scalar>(
    wf: &CubeWeights2<S>,
    sign: RootSign,
) -> Result<TriangleStar<S>, PluriError> {
    let tol = S::from_f64(DEGENERACY_TOL).unwrap() * (S::one() + wf.max_abs());
    for k in 0..3 {
        if wf.a(k).norm() < tol {
            return Err(PluriError::SingularInverse(wf.a(k).norm().approx_f64()));
        }
    }
    let mut c = [Complex::<S>::zero(); 3];
    for k in 0..3 {
        let (i, j) = ((k + 1) % 3, (k + 2) % 3);
        c[k] = wf.c(i) + wf.c(j) + wf.a(i) * wf.a(j) / wf.a(k);
    }
    let sq = |z: Complex<S>| z * z;
    let two = S::from_f64(2.0).unwrap();
    let d2 = sq(wf.a(0) * wf.a(1))
        + sq(wf.a(1) * wf.a(2))
        + sq(wf.a(2) * wf.a(0))
        + wf.a(0) * wf.a(1) * wf.a(2) * (wf.c(0) + wf.c(1) + wf.c(2)) * two;
    let d2_alt = wf.a(0) * wf.a(1) * wf.a(2) * (c[0] + c[1] + c[2]);
    let scale4 = (S::one() + wf.max_abs()).powi(4);
    if d2.norm() < S::from_f64(DEGENERACY_TOL * DEGENERACY_TOL).unwrap() * scale4 {
        return Err(PluriError::BranchPoint);
    }
    let d = sign.apply(d2.sqrt());
    let w = [
        PlaquetteWeights2 {
            a: d / wf.a(0),
            c: c[0],
        },
        PlaquetteWeights2 {
            a: d / wf.a(1),
            c: c[1],
        },
        PlaquetteWeights2 {
            a: d / wf.a(2),
            c: c[2],
        },
    ];
    Ok(TriangleStar {
        weights: CubeWeights2 { w },
        d,
        d_squared_residual: (d2 - d2_alt).norm(),
    })
}

/// Classical star-triangle map on plain conductances.
pub fn classical_star_triangle<S: Scalar>(
    a: [Complex<S>; 3],
) -> Result<[Complex<S>; 3], PluriError> {
    let s = a[0] + a[1] + a[2];
    if s.norm().approx_f64() < DEGENERACY_TOL {
        return Err(PluriError::ZeroDenominator(s.norm().approx_f64()));
    }
    Ok([a[1] * a[2] / s, a[2] * a[0] / s, a[0] * a[1] / s])
}

/// Rational inverse of the classical map.
pub fn classical_triangle_star<S: Scalar>(
    ak: [Complex<S>; 3],
) -> Result<[Complex<S>; 3], PluriError> {
    let p = ak[0] * ak[1] + ak[1] * ak[2] + ak[2] * ak[0];
    let mut out = [Complex::<S>::zero(); 3];
    for k in 0..3 {
        if ak[k].norm().approx_f64() < DEGENERACY_TOL {
            return Err(PluriError::SingularInverse(ak[k].norm().approx_f64()));
        }
        out[k] = p / ak[k];
    }
    Ok(out)
}

/// The four corner-equation rows in the unknowns `(x, x_ij, x_jk, x_ki)` for
/// a black-based cube with star weights `w` and flipped weights `wf`.
pub fn corner_system<S: Scalar>(w: &CubeWeights2<S>, wf: &CubeWeights2<S>) -> [[Complex<S>; 4]; 4] {
    [
        [-(w.c(0) + w.c(1) + w.c(2)), w.a(0), w.a(1), w.a(2)],
        [w.a(0), wf.c(1) + wf.c(2) - w.c(0), -wf.a(2), -wf.a(1)],
        [w.a(1), -wf.a(2), wf.c(2) + wf.c(0) - w.c(1), -wf.a(0)],
        [w.a(2), -wf.a(1), -wf.a(0), wf.c(0) + wf.c(1) - w.c(2)],
    ]
}

/// Scale-free rank-1 test: rows are normalized to unit maximum entry and the
/// largest 2x2 minor over all row and column pairs is returned.
pub fn proportionality_defect<S: Scalar>(rows: &[[Complex<S>; 4]; 4]) -> S {
    let mut normalized = *rows;
    for row in normalized.iter_mut() {
        let m = row.iter().map(|z| z.norm()).fold(S::zero(), S::max);
        if m > S::zero() {
            for z in row.iter_mut() {
                *z = *z / m;
            }
        }
    }
    let mut defect = S::zero();
    for i in 0..4 {
        for j in i + 1..4 {
            for p in 0..4 {
                for q in p + 1..4 {
                    let minor =
                        normalized[i][p] * normalized[j][q] - normalized[i][q] * normalized[j][p];
                    defect = defect.max(minor.norm());
                }
            }
        }
    }
    defect
}

/// Action of the elementary cube on its four black values
/// `(x, x_ij, x_jk, x_ki)`: flipped plaquettes minus star plaquettes.
pub fn action_sijk<S: Scalar>(
    w: &CubeWeights2<S>,
    wf: &CubeWeights2<S>,
    x: [Complex<S>; 4],
) -> Complex<S> {
    let half = S::from_f64(0.5).unwrap();
    let [x0, xij, xjk, xki] = x;
    let sq = |z: Complex<S>| z * z;
    (sq(xki) + sq(xjk)) * wf.c(0) * half - wf.a(0) * xki * xjk
        + (sq(xij) + sq(xki)) * wf.c(1) * half
        - wf.a(1) * xij * xki
        + (sq(xij) + sq(xjk)) * wf.c(2) * half
        - wf.a(2) * xij * xjk
        - (sq(x0) + sq(xij)) * w.c(0) * half
        + w.a(0) * x0 * xij
        - (sq(x0) + sq(xjk)) * w.c(1) * half
        + w.a(1) * x0 * xjk
        - (sq(x0) + sq(xki)) * w.c(2) * half
        + w.a(2) * x0 * xki
}

/// Solves the central corner equation for `x` given the three outer values.
pub fn solve_corner_center<S: Scalar>(
    w: &CubeWeights2<S>,
    outer: [Complex<S>; 3],
) -> Result<Complex<S>, PluriError> {
    let s = w.c(0) + w.c(1) + w.c(2);
    if s.norm().approx_f64() < DEGENERACY_TOL {
        return Err(PluriError::ZeroDenominator(s.norm().approx_f64()));
    }
    Ok((w.a(0) * outer[0] + w.a(1) * outer[1] + w.a(2) * outer[2]) / s)
}

// ---------------------------------------------------------------------------
// 4D consistency
// ---------------------------------------------------------------------------

/// Weights on the six coordinate 2-face classes of a 4D cube, indexed by the
/// unordered pair; reading a pair against its stored orientation negates it.
#[derive(Clone, Copy, Debug)]
pub struct FourDWeights<S> {
    /// Order: (0,1), (0,2), (0,3), (1,2), (1,3), (2,3).
    pub w: [PlaquetteWeights2<S>; 6],
}

const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

impl<S: Scalar> FourDWeights<S> {
    fn get(&self, i: usize, j: usize) -> PlaquetteWeights2<S> {
        let (lo, hi, flip) = if i < j { (i, j, false) } else { (j, i, true) };
        let idx = PAIRS
            .iter()
            .position(|&p| p == (lo, hi))
            .expect("valid pair");
        if flip {
            self.w[idx].reversed()
        } else {
            self.w[idx]
        }
    }
}

/// Which corner of the 4D cube the construction starts from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BaseColor {
    Black,
    White,
}

/// Antisymmetric store of subscripted weights `a^{ij}_k`.
struct SubWeights<S> {
    map: std::collections::BTreeMap<(usize, usize, usize), PlaquetteWeights2<S>>,
}

impl<S: Scalar> SubWeights<S> {
    fn new() -> Self {
        Self {
            map: std::collections::BTreeMap::new(),
        }
    }

    fn put(&mut self, i: usize, j: usize, k: usize, w: PlaquetteWeights2<S>) {
        self.map.insert((i, j, k), w);
    }

    fn get(&self, i: usize, j: usize, k: usize) -> PlaquetteWeights2<S> {
        if let Some(w) = self.map.get(&(i, j, k)) {
            *w
        } else {
            self.map[&(j, i, k)].reversed()
        }
    }
}

const CUBES: [[usize; 3]; 4] = [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]];

/// Verifies 4D consistency of the two-field map around one 4D cube.
///
/// Black base: `F` in the four cubes at the base, `G` (principal root) in the
/// four opposite cubes; the `a`-results must agree up to sign (squares are
/// compared) and the `c`-results exactly. White base: `G` first with the given
/// per-cube root choices, then `F`; both `a` and `c` must agree exactly.
/// Returns the maximum relative discrepancy.
pub fn check_4d_consistency<S: Scalar>(
    init: &FourDWeights<S>,
    base: BaseColor,
    signs: [RootSign; 4],
) -> Result<S, PluriError> {
    let mut sub = SubWeights::new();
    for (cube_idx, &[i, j, k]) in CUBES.iter().enumerate() {
        let w = CubeWeights2::new([init.get(i, j), init.get(j, k), init.get(k, i)]);
        let out = match base {
            BaseColor::Black => two_field_f(&w)?,
            BaseColor::White => two_field_g(&w, signs[cube_idx])?.weights,
        };
        sub.put(i, j, k, out.w[0]);
        sub.put(j, k, i, out.w[1]);
        sub.put(k, i, j, out.w[2]);
    }
    // opposite cubes: T_l sigma^{ijk} takes the l-subscripted weights
    let mut results: std::collections::BTreeMap<
        (usize, usize, usize, usize),
        PlaquetteWeights2<S>,
    > = std::collections::BTreeMap::new();
    for &[i, j, k] in &CUBES {
        let l = 6 - i - j - k;
        let w = CubeWeights2::new([sub.get(i, j, l), sub.get(j, k, l), sub.get(k, i, l)]);
        let out = match base {
            BaseColor::Black => two_field_g(&w, RootSign::Plus)?.weights,
            BaseColor::White => two_field_f(&w)?,
        };
        // out.w[0] = T_k a^{ij}_l etc.
        results.insert((i, j, l, k), out.w[0]);
        results.insert((j, k, l, i), out.w[1]);
        results.insert((k, i, l, j), out.w[2]);
    }
    let fetch = |i: usize, j: usize, l: usize, k: usize| -> PlaquetteWeights2<S> {
        if let Some(w) = results.get(&(i, j, l, k)) {
            *w
        } else {
            results[&(j, i, l, k)].reversed()
        }
    };
    let one = S::one();
    let mut disc = S::zero();
    for &(i, j) in &PAIRS {
        let mut rest = (0..4).filter(|&m| m != i && m != j);
        let k = rest.next().unwrap();
        let l = rest.next().unwrap();
        let p = fetch(i, j, l, k); // T_k ( . )_l
        let q = fetch(i, j, k, l); // T_l ( . )_k
        let (da, dc) = match base {
            BaseColor::Black => (
                (p.a * p.a - q.a * q.a).norm() / (one + q.a.norm() * q.a.norm()),
                (p.c - q.c).norm() / (one + q.c.norm()),
            ),
            BaseColor::White => (
                (p.a - q.a).norm() / (one + q.a.norm()),
                (p.c - q.c).norm() / (one + q.c.norm()),
            ),
        };
        disc = disc.max(da).max(dc);
    }
    Ok(disc)
}

// ---------------------------------------------------------------------------
// Elliptic special solution and flip invariance
// ---------------------------------------------------------------------------

/// The star-triangle weights realized by a coefficient family on three rhombi
/// with black-vertex angles `phi = (phi1, phi2, phi3)`, `sum phi = 2 pi`:
/// star side `(f(phi_k), g0(phi_k))`, flipped side
/// `(f(pi - phi_k), g0(pi - phi_k))`.
pub fn elliptic_special_solution<S: Scalar>(
    phis: (S, S, S),
    fam: &CoefficientFamily<S>,
) -> Result<(CubeWeights2<S>, CubeWeights2<S>), PluriError> {
    let two_pi = S::PI() + S::PI();
    let sum = phis.0 + phis.1 + phis.2;
    if (sum - two_pi).abs().approx_f64() > 1e-9 {
        return Err(PluriError::AngleSum(sum.approx_f64()));
    }
    let phi = [phis.0, phis.1, phis.2];
    let mut star = [PlaquetteWeights2 {
        a: Complex::zero(),
        c: Complex::zero(),
    }; 3];
    let mut tri = star;
    for k in 0..3 {
        let p = Complex::new(phi[k], S::zero());
        let q = Complex::new(S::PI() - phi[k], S::zero());
        star[k] = PlaquetteWeights2 {
            a: fam.f(p)?,
            c: fam.g0(p)?,
        };
        tri[k] = PlaquetteWeights2 {
            a: fam.f(q)?,
            c: fam.g0(q)?,
        };
    }
    Ok((CubeWeights2 { w: star }, CubeWeights2 { w: tri }))
}

/// Energies of the Dirichlet solutions on a graph and on its flip at
/// `center`, with identical boundary data.
#[derive(Clone, Debug)]
pub struct FlipEnergyReport {
    pub energy_before: Complex<f64>,
    pub energy_after: Complex<f64>,
    pub difference: f64,
    /// Largest disagreement of the two solutions on shared black vertices.
    pub common_value_gap: f64,
}

/// Solves the Dirichlet problem before and after a star-triangle flip and
/// compares the two Dirichlet energies; they coincide for the integrable
/// weights.
pub fn flip_energy_invariance(
    graph: &QuadGraph,
    center: VertexId,
    fam: &CoefficientFamily<f64>,
    boundary: &FieldAssignment,
) -> Result<FlipEnergyReport, PluriError> {
    if fam.regime() == FamilyRegime::Rhombic {
        return Err(PluriError::Regime(fam.regime()));
    }
    let flipped = graph.star_triangle_flip(center)?;

    let solve = |g: &QuadGraph| -> Result<(FieldAssignment, Complex<f64>), PluriError> {
        let op = laplace::assemble(g, fam)?;
        let interior = op.solve_dirichlet(boundary)?;
        let full = laplace::merge_black_field(boundary, &interior);
        let energy = laplace::dirichlet_energy(g, fam, &full, EnergyForm::G0)?;
        Ok((full, energy))
    };
    let (before_field, energy_before) = solve(graph)?;
    let (after_field, energy_after) = solve(&flipped)?;

    let mut gap = 0.0f64;
    for (id, v) in after_field.iter() {
        if let Some(w) = before_field.get(id) {
            gap = gap.max((v - w).norm());
        }
    }
    Ok(FlipEnergyReport {
        energy_before,
        energy_after,
        difference: (energy_before - energy_after).norm(),
        common_value_gap: gap,
    })
}

// ---------------------------------------------------------------------------
// Three-field map and gauge classification
// ---------------------------------------------------------------------------

/// Three-field plaquette weights with the complete-square constraint
/// `b c = a^2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlaquetteWeights3<S> {
    pub a: Complex<S>,
    pub b: Complex<S>,
    pub c: Complex<S>,
}

impl<S: Scalar> PlaquetteWeights3<S> {
    pub fn new(a: Complex<S>, b: Complex<S>, c: Complex<S>) -> Result<Self, PluriError> {
        let w = Self { a, b, c };
        w.check_complete_square()?;
        Ok(w)
    }

    pub fn check_complete_square(&self) -> Result<(), PluriError> {
        let resid = (self.b * self.c - self.a * self.a).norm();
        let bound = S::from_f64(1e-10).unwrap() * (self.a.norm() * self.a.norm() + S::one());
        if resid > bound {
            return Err(PluriError::NotCompleteSquare(resid.approx_f64()));
        }
        Ok(())
    }
}

/// Three-field star-triangle map on the triple `(12, 23, 31)`:
///
/// ```text
/// a^12_3 = a^23 a^31 / Sb,  b^12_3 = c^23 b^31 / Sb,  c^12_3 = b^23 c^31 / Sb
/// ```
///
/// with `Sb = b^12 + b^23 + b^31`, plus cyclic shifts. Preserves `bc = a^2`
/// and lands in the variety `b^12_3 b^23_1 b^31_2 = c^12_3 c^23_1 c^31_2`.
pub fn three_field_map<S: Scalar>(
    w: &[PlaquetteWeights3<S>; 3],
) -> Result<[PlaquetteWeights3<S>; 3], PluriError> {
    for p in w {
        p.check_complete_square()?;
    }
    let sb = w[0].b + w[1].b + w[2].b;
    let scale = S::one()
        + w.iter()
            .flat_map(|p| [p.a.norm(), p.b.norm(), p.c.norm()])
            .fold(S::zero(), S::max);
    if sb.norm() < S::from_f64(DEGENERACY_TOL).unwrap() * scale {
        return Err(PluriError::ZeroDenominator(sb.norm().approx_f64()));
    }
    let mut out = [PlaquetteWeights3 {
        a: Complex::<S>::zero(),
        b: Complex::zero(),
        c: Complex::zero(),
    }; 3];
    for k in 0..3 {
        let (i, j) = ((k + 1) % 3, (k + 2) % 3);
        out[k].a = w[i].a * w[j].a / sb;
        out[k].b = w[i].c * w[j].b / sb;
        out[k].c = w[i].b * w[j].c / sb;
    }
    Ok(out)
}

/// Residual of the image-domain condition
/// `b^12_3 b^23_1 b^31_2 - c^12_3 c^23_1 c^31_2`.
pub fn three_field_image_condition<S: Scalar>(w: &[PlaquetteWeights3<S>; 3]) -> Complex<S> {
    w[0].b * w[1].b * w[2].b - w[0].c * w[1].c * w[2].c
}

/// Builds the gauge-equivalent three-field weights from classical
/// star-triangle conductances `A` / `A_k` and the gauge values
/// `rho = (rho, rho_ij, rho_jk, rho_ki)` at the four black points:
/// `a = A/(rho rho')`, `b = A/rho^2`, `c = A/rho'^2`.
pub fn gauge_construct<S: Scalar>(
    a_star: [Complex<S>; 3],
    a_tri: [Complex<S>; 3],
    rho: [Complex<S>; 4],
) -> Result<([PlaquetteWeights3<S>; 3], [PlaquetteWeights3<S>; 3]), PluriError> {
    for r in rho {
        if r.norm().approx_f64() < DEGENERACY_TOL {
            return Err(PluriError::ZeroDenominator(r.norm().approx_f64()));
        }
    }
    // the conductances must be related by the classical map
    let expect = classical_star_triangle(a_star)?;
    let scale = a_tri.iter().map(|z| z.norm()).fold(S::one(), S::max);
    for k in 0..3 {
        let resid = (expect[k] - a_tri[k]).norm();
        if resid > S::from_f64(1e-9).unwrap() * scale {
            return Err(PluriError::StarTriangleMismatch(resid.approx_f64()));
        }
    }
    let [r0, rij, rjk, rki] = rho;
    let pair = |a: Complex<S>, p: Complex<S>, q: Complex<S>| PlaquetteWeights3 {
        a: a / (p * q),
        b: a / (p * p),
        c: a / (q * q),
    };
    let star = [
        pair(a_star[0], r0, rij),
        pair(a_star[1], r0, rjk),
        pair(a_star[2], r0, rki),
    ];
    let tri = [
        pair(a_tri[0], rjk, rki),
        pair(a_tri[1], rki, rij),
        pair(a_tri[2], rij, rjk),
    ];
    Ok((star, tri))
}

// ---------------------------------------------------------------------------
// Weight serialization (re/im pair format)
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct ComplexJson {
    re: f64,
    im: f64,
}

impl From<Complex<f64>> for ComplexJson {
    fn from(z: Complex<f64>) -> Self {
        Self { re: z.re, im: z.im }
    }
}

impl From<ComplexJson> for Complex<f64> {
    fn from(z: ComplexJson) -> Self {
        Complex::new(z.re, z.im)
    }
}

#[derive(Serialize, Deserialize)]
struct W2Json {
    a: ComplexJson,
    c: ComplexJson,
}

#[derive(Serialize, Deserialize)]
struct W3Json {
    a: ComplexJson,
    b: ComplexJson,
    c: ComplexJson,
}

/// Serializes a two-field triple as a JSON array of `{a, c}` pairs.
pub fn weights2_to_json(w: &CubeWeights2<f64>) -> String {
    let doc: Vec<W2Json> =
        w.w.iter()
            .map(|p| W2Json {
                a: p.a.into(),
                c: p.c.into(),
            })
            .collect();
    serde_json::to_string_pretty(&doc).expect("weights serialize")
}

pub fn weights2_from_json(text: &str) -> Result<CubeWeights2<f64>, PluriError> {
    let doc: Vec<W2Json> =
        serde_json::from_str(text).map_err(|e| PluriError::Json(e.to_string()))?;
    if doc.len() != 3 {
        return Err(PluriError::BadWeightCount(doc.len()));
    }
    let w: Vec<PlaquetteWeights2<f64>> = doc
        .into_iter()
        .map(|p| PlaquetteWeights2::new(p.a.into(), p.c.into()))
        .collect();
    Ok(CubeWeights2::new([w[0], w[1], w[2]]))
}

/// Serializes a three-field triple as a JSON array of `{a, b, c}` entries.
pub fn weights3_to_json(w: &[PlaquetteWeights3<f64>; 3]) -> String {
    let doc: Vec<W3Json> = w
        .iter()
        .map(|p| W3Json {
            a: p.a.into(),
            b: p.b.into(),
            c: p.c.into(),
        })
        .collect();
    serde_json::to_string_pretty(&doc).expect("weights serialize")
}

pub fn weights3_from_json(text: &str) -> Result<[PlaquetteWeights3<f64>; 3], PluriError> {
    let doc: Vec<W3Json> =
        serde_json::from_str(text).map_err(|e| PluriError::Json(e.to_string()))?;
    if doc.len() != 3 {
        return Err(PluriError::BadWeightCount(doc.len()));
    }
    let mut out = Vec::with_capacity(3);
    for p in doc {
        out.push(PlaquetteWeights3::new(p.a.into(), p.b.into(), p.c.into())?);
    }
    Ok([out[0], out[1], out[2]])
}
