//! Coefficient families of the linear three-leg quad-equation.
//!
//! A family is the triple `(f, g, h)` built from theta quotients at a fixed
//! torus regime, normalized so that `f(a) f(a+pi) = -1` and
//! `h(a) h(a+pi) = 1`. The rectangular regime has real-valued `h`, the
//! rhombic regime purely imaginary `h`, and the degenerate regime collapses
//! everything to trigonometric quotients.

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;
use crate::theta::{ThetaError, ThetaParams};

/// Real form of the underlying torus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyRegime {
    Rectangular,
    Rhombic,
    Degenerate,
}

/// Serialized form of a family: `{"regime": ..., "tau0": ..., "lambda0": ...}`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct FamilySpec {
    pub regime: FamilyRegime,
    pub tau0: f64,
    pub lambda0: f64,
}

#[derive(Debug, Error)]
pub enum CoeffsError {
    #[error("pole of {func} at alpha = {location}")]
    Pole {
        func: &'static str,
        location: String,
    },
    #[error("operation {op} not defined in the {regime:?} regime")]
    RegimeMismatch {
        op: &'static str,
        regime: FamilyRegime,
    },
    #[error("domain error: {0}")]
    Domain(String),
    #[error(transparent)]
    Theta(#[from] ThetaError),
}

type CResult<S> = Result<Complex<S>, CoeffsError>;

/// Distance of `alpha/2` to the nearest zero of the relevant theta quotient
/// below which evaluation refuses and reports a pole.
pub const POLE_GUARD: f64 = 0.02;

/// A concrete integrable family `(f, g, h)` with parameters `(tau0, lambda0)`
/// and normalization `c = 1`.
#[derive(Clone, Copy, Debug)]
pub struct CoefficientFamily<S: Scalar> {
    regime: FamilyRegime,
    tau0: S,
    lambda0: S,
    theta: ThetaParams<S>,
    /// Cached theta3(0) * theta4(0).
    th3th4: Complex<S>,
}

impl<S: Scalar> CoefficientFamily<S> {
    pub fn rectangular(tau0: S, lambda0: S) -> Result<Self, CoeffsError> {
        let theta = ThetaParams::rectangular(tau0)?;
        Self::build(FamilyRegime::Rectangular, tau0, lambda0, theta)
    }

    pub fn rhombic(tau0: S, lambda0: S) -> Result<Self, CoeffsError> {
        let theta = ThetaParams::rhombic(tau0)?;
        Self::build(FamilyRegime::Rhombic, tau0, lambda0, theta)
    }

    /// `q = 0`; trigonometric limits of all coefficients.
    pub fn degenerate(lambda0: S) -> Self {
        Self {
            regime: FamilyRegime::Degenerate,
            tau0: S::zero(),
            lambda0,
            theta: ThetaParams::degenerate(),
            th3th4: Complex::one(),
        }
    }

    pub fn new(regime: FamilyRegime, tau0: S, lambda0: S) -> Result<Self, CoeffsError> {
        match regime {
            FamilyRegime::Rectangular => Self::rectangular(tau0, lambda0),
            FamilyRegime::Rhombic => Self::rhombic(tau0, lambda0),
            FamilyRegime::Degenerate => Ok(Self::degenerate(lambda0)),
        }
    }

    pub fn from_spec(spec: &FamilySpec) -> Result<Self, CoeffsError> {
        Self::new(
            spec.regime,
            S::from_f64(spec.tau0).unwrap(),
            S::from_f64(spec.lambda0).unwrap(),
        )
    }

    fn build(
        regime: FamilyRegime,
        tau0: S,
        lambda0: S,
        theta: ThetaParams<S>,
    ) -> Result<Self, CoeffsError> {
        let k = theta.constants()?;
        Ok(Self {
            regime,
            tau0,
            lambda0,
            theta,
            th3th4: k.theta3 * k.theta4,
        })
    }

    pub fn regime(&self) -> FamilyRegime {
        self.regime
    }

    pub fn tau0(&self) -> S {
        self.tau0
    }

    pub fn lambda0(&self) -> S {
        self.lambda0
    }

    pub fn theta_params(&self) -> &ThetaParams<S> {
        &self.theta
    }

    pub fn spec(&self) -> FamilySpec {
        FamilySpec {
            regime: self.regime,
            tau0: self.tau0.approx_f64(),
            lambda0: self.lambda0.approx_f64(),
        }
    }

    /// The family with `lambda0` shifted by pi, i.e. with `h` replaced by
    /// `1/h`. Bäcklund transforms of solutions of this family's equation
    /// solve the dual family's equation and vice versa.
    pub fn dual(&self) -> Self {
        let mut out = *self;
        out.lambda0 = self.lambda0 + S::PI();
        out
    }

    fn guard(&self) -> S {
        S::from_f64(POLE_GUARD).unwrap()
    }

    fn half(&self) -> S {
        S::from_f64(0.5).unwrap()
    }

    fn check_pole_f(&self, func: &'static str, alpha: Complex<S>) -> Result<(), CoeffsError> {
        let half_pi = Complex::new(S::FRAC_PI_2(), S::zero());
        let z = alpha * self.half();
        if self.theta.lattice_distance(z, half_pi) < self.guard() {
            return Err(CoeffsError::Pole {
                func,
                location: format!("{alpha}"),
            });
        }
        Ok(())
    }

    /// `f(alpha) = theta1(alpha/2) / theta2(alpha/2)`, odd, with
    /// `f(alpha) f(alpha + pi) = -1`. Degenerate limit: `tan(alpha/2)`.
    pub fn f(&self, alpha: Complex<S>) -> CResult<S> {
        self.check_pole_f("f", alpha)?;
        let z = alpha * self.half();
        if self.regime == FamilyRegime::Degenerate {
            return Ok(z.tan());
        }
        let t1 = self.theta.theta(1, z)?;
        let t2 = self.theta.theta(2, z)?;
        Ok(t1 / t2)
    }

    /// `g0(alpha) = -theta2'(alpha/2) / (theta3 theta4 theta2(alpha/2))`, odd.
    /// Degenerate limit: `tan(alpha/2)`.
    pub fn g0(&self, alpha: Complex<S>) -> CResult<S> {
        self.check_pole_f("g0", alpha)?;
        let z = alpha * self.half();
        if self.regime == FamilyRegime::Degenerate {
            return Ok(z.tan());
        }
        let (t2, d2) = self.theta.theta_pair(2, z)?;
        Ok(-(d2 / t2) / self.th3th4)
    }

    /// `g1(alpha) = -theta3'(alpha/2) / (theta3 theta4 theta3(alpha/2))`,
    /// rectangular regime only.
    pub fn g1(&self, alpha: Complex<S>) -> CResult<S> {
        if self.regime != FamilyRegime::Rectangular {
            return Err(CoeffsError::RegimeMismatch {
                op: "g1",
                regime: self.regime,
            });
        }
        let z = alpha * self.half();
        // theta3 zeros sit at pi/2 + pi tau / 2 modulo the lattice.
        let offset = Complex::new(S::FRAC_PI_2(), S::zero()) + self.theta.tau() * S::FRAC_PI_2();
        if self.theta.lattice_distance(z, offset) < self.guard() {
            return Err(CoeffsError::Pole {
                func: "g1",
                location: format!("{alpha}"),
            });
        }
        let (t3, d3) = self.theta.theta_pair(3, z)?;
        Ok(-(d3 / t3) / self.th3th4)
    }

    /// `h(alpha)`: real-valued `theta4/theta3` quotient in the rectangular
    /// regime, `i f(alpha - lambda0)` in the rhombic regime. Real arguments
    /// only; satisfies `h(alpha) h(alpha + pi) = 1`.
    pub fn h(&self, alpha: S) -> CResult<S> {
        let u = Complex::new(alpha - self.lambda0, S::zero());
        match self.regime {
            FamilyRegime::Rectangular => {
                let z = u * self.half();
                let t4 = self.theta.theta(4, z)?;
                let t3 = self.theta.theta(3, z)?;
                Ok(t4 / t3)
            }
            FamilyRegime::Rhombic => {
                let fv = self.f(u).map_err(|e| match e {
                    CoeffsError::Pole { location, .. } => CoeffsError::Pole {
                        func: "h",
                        location,
                    },
                    other => other,
                })?;
                Ok(fv * Complex::i())
            }
            // q -> 0 limit of the rectangular quotient: identically 1.
            FamilyRegime::Degenerate => Ok(Complex::one()),
        }
    }

    /// `g(alpha, beta) = f(alpha - beta) h(alpha) h(beta)`, antisymmetric.
    pub fn g(&self, alpha: S, beta: S) -> CResult<S> {
        let fv = self
            .f(Complex::new(alpha - beta, S::zero()))
            .map_err(|e| match e {
                CoeffsError::Pole { location, .. } => CoeffsError::Pole {
                    func: "g",
                    location,
                },
                other => other,
            })?;
        Ok(fv * self.h(alpha)? * self.h(beta)?)
    }

    /// Four-term cyclic sum of `f` triples; vanishes identically for the
    /// elliptic families.
    pub fn check_fff(
        &self,
        alpha: Complex<S>,
        beta: Complex<S>,
        gamma: Complex<S>,
        delta: Complex<S>,
    ) -> CResult<S> {
        let ff = |x: Complex<S>, y: Complex<S>| self.f(x - y);
        Ok(ff(alpha, beta)? * ff(beta, gamma)? * ff(gamma, alpha)?
            + ff(beta, alpha)? * ff(alpha, delta)? * ff(delta, beta)?
            + ff(gamma, beta)? * ff(beta, delta)? * ff(delta, gamma)?
            + ff(alpha, gamma)? * ff(gamma, delta)? * ff(delta, alpha)?)
    }

    /// `f(a-b)h(a)h(b) + f(b-c)h(b)h(c) + f(c-a)h(c)h(a) - f(a-b)f(b-c)f(c-a)`;
    /// vanishing is the 3D-consistency criterion.
    pub fn check_fhh(&self, alpha: S, beta: S, gamma: S) -> CResult<S> {
        let fab = self.f(Complex::new(alpha - beta, S::zero()))?;
        let fbc = self.f(Complex::new(beta - gamma, S::zero()))?;
        let fca = self.f(Complex::new(gamma - alpha, S::zero()))?;
        let (ha, hb, hc) = (self.h(alpha)?, self.h(beta)?, self.h(gamma)?);
        Ok(fab * ha * hb + fbc * hb * hc + fca * hc * ha - fab * fbc * fca)
    }

    /// `f(a-b)f(b-c)f(c-a) - g0(a-b) - g0(b-c) - g0(c-a)`; vanishes for the
    /// elliptic and degenerate families.
    pub fn check_gsum(&self, alpha: Complex<S>, beta: Complex<S>, gamma: Complex<S>) -> CResult<S> {
        let fab = self.f(alpha - beta)?;
        let fbc = self.f(beta - gamma)?;
        let fca = self.f(gamma - alpha)?;
        Ok(fab * fbc * fca
            - self.g0(alpha - beta)?
            - self.g0(beta - gamma)?
            - self.g0(gamma - alpha)?)
    }

    /// Residual of the additive decomposition of `g(alpha, beta)` against
    /// `g0` and the regime's shift function.
    pub fn additive_decomposition_residual(&self, alpha: S, beta: S) -> CResult<S> {
        let prod = self.g(alpha, beta)?;
        let dif = Complex::new(alpha - beta, S::zero());
        let a_sh = Complex::new(alpha - self.lambda0, S::zero());
        let b_sh = Complex::new(beta - self.lambda0, S::zero());
        let additive = match self.regime {
            FamilyRegime::Rectangular => self.g0(dif)? + self.g1(b_sh)? - self.g1(a_sh)?,
            FamilyRegime::Rhombic => self.g0(dif)? + self.g0(b_sh)? - self.g0(a_sh)?,
            // q -> 0 limit of the rectangular form: g1 vanishes identically
            FamilyRegime::Degenerate => {
                let _ = (a_sh, b_sh);
                self.g0(dif)?
            }
        };
        Ok(prod - additive)
    }

    /// Margin of the weight-dominance inequality: `g0 - f` in the
    /// rectangular regime, `f - g0` in the rhombic one; strictly positive
    /// on `(0, pi)`.
    pub fn lemma_margin(&self, alpha: S) -> Result<S, CoeffsError> {
        if !(alpha > S::zero() && alpha < S::PI()) {
            return Err(CoeffsError::Domain(format!(
                "dominance margin defined for 0 < alpha < pi, got {alpha}"
            )));
        }
        let a = Complex::new(alpha, S::zero());
        match self.regime {
            FamilyRegime::Rectangular => Ok((self.g0(a)? - self.f(a)?).re),
            FamilyRegime::Rhombic => Ok((self.f(a)? - self.g0(a)?).re),
            FamilyRegime::Degenerate => Err(CoeffsError::RegimeMismatch {
                op: "lemma_margin",
                regime: self.regime,
            }),
        }
    }

    /// The same margin through its closed form in second-nome theta
    /// quotients; an independent route for cross-checking.
    pub fn lemma_margin_closed_form(&self, alpha: S) -> Result<S, CoeffsError> {
        if !(alpha > S::zero() && alpha < S::PI()) {
            return Err(CoeffsError::Domain(format!(
                "dominance margin defined for 0 < alpha < pi, got {alpha}"
            )));
        }
        let z = Complex::new(alpha * self.half(), S::zero());
        let two = S::from_f64(2.0).unwrap();
        match self.regime {
            FamilyRegime::Rectangular => {
                // 2 (-theta3'/theta3)(alpha/2; q^2) / (theta3 theta4)
                let q2 = self.theta.nome() * self.theta.nome();
                let p2 = ThetaParams::from_nome(q2)?;
                let (t3, d3) = p2.theta_pair(3, z)?;
                Ok(((-(d3 / t3)) / self.th3th4 * two).re)
            }
            FamilyRegime::Rhombic => {
                // 2 (theta4'/theta4)(alpha/2; q0^2) / theta3(0; q0^2)^2
                let q0sq = -(self.theta.nome() * self.theta.nome());
                let p2 = ThetaParams::from_nome(q0sq)?;
                let (t4, d4) = p2.theta_pair(4, z)?;
                let t30 = p2.theta(3, Complex::zero())?;
                Ok(((d4 / t4) / (t30 * t30) * two).re)
            }
            FamilyRegime::Degenerate => Err(CoeffsError::RegimeMismatch {
                op: "lemma_margin_closed_form",
                regime: self.regime,
            }),
        }
    }
}

/// Residual of the rhombic nome reduction
/// `theta1/theta2 (alpha/2, i q0) - (theta1 theta3)/(theta2 theta4) (alpha/2, q0^2)`.
pub fn rhombic_nome_reduction_check<S: Scalar>(alpha: S, tau0: S) -> CResult<S> {
    let fam = CoefficientFamily::rhombic(tau0, S::zero())?;
    let lhs = fam.f(Complex::new(alpha, S::zero()))?;
    let q0 = (-S::PI() * tau0).exp();
    let p2 = ThetaParams::from_nome(Complex::new(q0 * q0, S::zero()))?;
    let z = Complex::new(alpha * S::from_f64(0.5).unwrap(), S::zero());
    let rhs = p2.theta(1, z)? * p2.theta(3, z)? / (p2.theta(2, z)? * p2.theta(4, z)?);
    Ok(lhs - rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rect(tau0: f64, lambda0: f64) -> CoefficientFamily<f64> {
        CoefficientFamily::rectangular(tau0, lambda0).unwrap()
    }

    fn rhom(tau0: f64, lambda0: f64) -> CoefficientFamily<f64> {
        CoefficientFamily::rhombic(tau0, lambda0).unwrap()
    }

    #[test]
    fn frozen_reference_values() {
        // 40-digit reference evaluations, frozen.
        let fam = rect(1.0, 0.3);
        assert_abs_diff_eq!(
            fam.f(c(1.1, 0.0)).unwrap().re,
            0.61102750109238180609,
            epsilon = 1e-13
        );
        assert_abs_diff_eq!(
            fam.g0(c(0.8, 0.0)).unwrap().re,
            0.43136397674134496265,
            epsilon = 1e-13
        );
        assert_abs_diff_eq!(
            fam.h(1.3).unwrap().re,
            0.91077211122664640552,
            epsilon = 1e-13
        );
        let fam9 = rect(0.9, 0.0);
        assert_abs_diff_eq!(
            fam9.g1(c(0.7, 0.0)).unwrap().re,
            0.14187397480343919281,
            epsilon = 1e-13
        );
        let famh = rhom(1.0, 0.0);
        assert_abs_diff_eq!(
            famh.f(c(1.1, 0.0)).unwrap().re,
            0.61518220538957584888,
            epsilon = 1e-13
        );
        assert_abs_diff_eq!(
            famh.g0(c(0.8, 0.0)).unwrap().re,
            0.41433002994184648366,
            epsilon = 1e-13
        );
    }

    #[test]
    fn f_is_odd_and_pi_antiperiodic() {
        for fam in [rect(1.0, 0.0), rhom(1.0, 0.0)] {
            let a = c(0.8, 0.0);
            assert!((fam.f(a).unwrap() + fam.f(-a).unwrap()).norm() < 1e-14);
            let prod = fam.f(a).unwrap() * fam.f(a + c(std::f64::consts::PI, 0.0)).unwrap();
            assert!((prod + Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
        assert!(rect(1.0, 0.0).f(c(0.0, 0.0)).unwrap().norm() == 0.0);
    }

    #[test]
    fn degenerate_closed_forms() {
        let fam = CoefficientFamily::<f64>::degenerate(0.0);
        assert_abs_diff_eq!(
            fam.f(c(1.0, 0.0)).unwrap().re,
            0.5f64.tan(),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            fam.g0(c(1.0, 0.0)).unwrap().re,
            0.5f64.tan(),
            epsilon = 1e-15
        );
        assert_eq!(fam.h(2.2).unwrap(), Complex64::new(1.0, 0.0));
        // q -> 0 within the rectangular regime: f and g0 collapse to tan(alpha/2)
        let small_q = rect(6.0, 0.0);
        for a in [0.3, 1.2, 2.9] {
            let t = (a / 2.0f64).tan();
            assert!((small_q.f(c(a, 0.0)).unwrap().re - t).abs() < 1e-7);
            assert!((small_q.g0(c(a, 0.0)).unwrap().re - t).abs() < 1e-7);
            assert!(small_q.g1(c(a, 0.0)).unwrap().norm() < 1e-7);
        }
    }

    #[test]
    fn g0_positive_margin_examples() {
        let fam = rect(1.0, 0.0);
        for a in [0.3, 1.5, 2.8] {
            let m = (fam.g0(c(a, 0.0)).unwrap() - fam.f(c(a, 0.0)).unwrap()).re;
            assert!(m > 0.0, "margin at {a} = {m}");
        }
    }

    #[test]
    fn g1_equals_shifted_g0_up_to_constant() {
        // g1(a) = g0(a + i pi tau0) - i/(theta3 theta4); the constant drops
        // out of every difference the decomposition uses.
        let tau0 = 0.9;
        let fam = rect(tau0, 0.0);
        let k = fam.theta_params().constants().unwrap();
        let corr = Complex64::i() / (k.theta3 * k.theta4);
        for a in [0.7, 1.3] {
            let lhs = fam.g1(c(a, 0.0)).unwrap();
            let rhs = fam.g0(c(a, std::f64::consts::PI * tau0)).unwrap() - corr;
            assert!((lhs - rhs).norm() < 1e-11, "a = {a}: {} vs {}", lhs, rhs);
        }
        assert!(fam.g1(c(0.0, 0.0)).unwrap().norm() < 1e-15);
    }

    #[test]
    fn h_symmetry_and_bounds() {
        let pi = std::f64::consts::PI;
        for fam in [rect(1.0, 0.4), rhom(1.0, 0.4)] {
            let prod = fam.h(1.2).unwrap() * fam.h(1.2 + pi).unwrap();
            assert!((prod - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
        let fam = rect(1.0, 0.3);
        let k = fam.theta_params().constants().unwrap();
        let lo = (k.theta4 / k.theta3).re;
        let hi = (k.theta3 / k.theta4).re;
        assert_abs_diff_eq!(fam.h(0.3).unwrap().re, lo, epsilon = 1e-13);
        for i in 0..40 {
            let a = -3.0 + 6.5 * (i as f64) / 39.0;
            let v = fam.h(a).unwrap();
            assert!(v.im.abs() < 1e-14);
            assert!(v.re >= lo - 1e-12 && v.re <= hi + 1e-12, "h({a}) = {v}");
        }
        // rhombic h is purely imaginary on the real axis and vanishes at lambda0
        let famh = rhom(0.8, 0.5);
        assert!(famh.h(0.5).unwrap().norm() < 1e-15);
        for a in [0.1, 1.0, 2.7] {
            assert!(famh.h(a).unwrap().re.abs() < 1e-14);
        }
    }

    #[test]
    fn g_antisymmetric_and_decomposes() {
        let fam = rect(1.0, 0.3);
        assert!(fam.g(0.9, 0.9).unwrap().norm() == 0.0);
        let s = fam.g(0.5, 2.1).unwrap() + fam.g(2.1, 0.5).unwrap();
        assert!(s.norm() < 1e-14);
        assert!(
            fam.additive_decomposition_residual(1.9, 0.4)
                .unwrap()
                .norm()
                < 1e-11
        );
        let famh = rhom(1.0, 0.3);
        assert!(
            famh.additive_decomposition_residual(1.9, 0.4)
                .unwrap()
                .norm()
                < 1e-11
        );
    }

    #[test]
    fn functional_equations_vanish() {
        for fam in [rect(0.8, 0.0), rhom(0.8, 0.0)] {
            let r = fam
                .check_fff(c(0.3, 0.0), c(1.1, 0.0), c(2.0, 0.0), c(-0.7, 0.0))
                .unwrap();
            assert!(r.norm() < 1e-11, "fff residual {r}");
        }
        // degenerate structural zero: delta = gamma
        let fam = rect(0.8, 0.0);
        let r0 = fam
            .check_fff(c(0.3, 0.0), c(1.1, 0.0), c(2.0, 0.0), c(2.0, 0.0))
            .unwrap();
        assert!(r0.norm() < 1e-13);

        for fam in [rect(1.0, 0.0), rhom(1.0, 0.0)] {
            let r = fam.check_fhh(0.4, 1.3, 2.5).unwrap();
            assert!(r.norm() < 1e-11, "fhh residual {r}");
            assert!(fam.check_fhh(0.4, 0.4, 2.5).unwrap().norm() < 1e-13);
        }

        let fam = rect(1.0, 0.0);
        assert!(
            fam.check_gsum(c(0.2, 0.0), c(1.0, 0.0), c(2.2, 0.0))
                .unwrap()
                .norm()
                < 1e-11
        );
        // tan addition identity in the trigonometric limit
        let deg = CoefficientFamily::<f64>::degenerate(0.0);
        let (a, b) = (0.3, 0.5);
        assert!(
            deg.check_gsum(c(2.0 * a, 0.0), c(0.0, 0.0), c(-2.0 * b, 0.0))
                .unwrap()
                .norm()
                < 1e-14
        );
    }

    #[test]
    fn nome_reduction_residuals() {
        assert!(rhombic_nome_reduction_check(0.0f64, 0.7).unwrap().norm() == 0.0);
        assert!(rhombic_nome_reduction_check(1.1f64, 0.7).unwrap().norm() < 1e-11);
        assert!(rhombic_nome_reduction_check(2.6f64, 0.4).unwrap().norm() < 1e-11);
    }

    #[test]
    fn lemma_margins_match_closed_forms() {
        let fam = rect(1.0, 0.0);
        let m = fam.lemma_margin(1.5).unwrap();
        assert!(m > 0.0);
        assert_abs_diff_eq!(m, 0.01501009468543895389, epsilon = 1e-13);
        assert_abs_diff_eq!(
            m,
            fam.lemma_margin_closed_form(1.5).unwrap(),
            epsilon = 1e-10
        );

        let famh = rhom(1.0, 0.0);
        let mh = famh.lemma_margin(1.5).unwrap();
        assert!(mh > 0.0);
        assert_abs_diff_eq!(mh, 0.01479533205723596097, epsilon = 1e-13);
        assert_abs_diff_eq!(
            mh,
            famh.lemma_margin_closed_form(1.5).unwrap(),
            epsilon = 1e-10
        );

        // margin tends to zero at the left endpoint
        assert!(fam.lemma_margin(1e-6).unwrap().abs() < 1e-5);
        assert!(fam.lemma_margin(3.5).is_err());
    }

    #[test]
    fn mass_independent_of_lambda0() {
        // cyclic labels closing a star: sum of g over consecutive pairs
        let labels = [
            0.4,
            1.7,
            0.4 + std::f64::consts::PI,
            1.7 + std::f64::consts::PI,
        ];
        for mk in [rect as fn(f64, f64) -> CoefficientFamily<f64>, rhom] {
            let (f1, f2) = (mk(1.0, 0.2), mk(1.0, 1.5));
            let mass = |fam: &CoefficientFamily<f64>| {
                let mut s = Complex64::new(0.0, 0.0);
                for k in 0..labels.len() {
                    s += fam.g(labels[k], labels[(k + 1) % labels.len()]).unwrap();
                }
                s
            };
            assert!((mass(&f1) - mass(&f2)).norm() < 1e-10);
        }
    }

    #[test]
    fn periodicity_2pi() {
        let two_pi = 2.0 * std::f64::consts::PI;
        for fam in [rect(1.0, 0.3), rhom(1.0, 0.3)] {
            for a in [0.7, 2.2] {
                let df = fam.f(c(a + two_pi, 0.0)).unwrap() - fam.f(c(a, 0.0)).unwrap();
                assert!(df.norm() < 1e-12);
                let dh = fam.h(a + two_pi).unwrap() - fam.h(a).unwrap();
                assert!(dh.norm() < 1e-12);
            }
        }
    }

    #[test]
    fn pole_guard_reports_location() {
        let fam = rect(1.0, 0.0);
        match fam.f(c(std::f64::consts::PI + 0.001, 0.0)) {
            Err(CoeffsError::Pole { func, .. }) => assert_eq!(func, "f"),
            other => panic!("expected pole error, got {other:?}"),
        }
        // degenerate f has the same pole
        let deg = CoefficientFamily::<f64>::degenerate(0.0);
        assert!(deg.f(c(std::f64::consts::PI, 0.0)).is_err());
    }

    #[test]
    fn dual_family_inverts_h() {
        for fam in [rect(1.0, 0.3), rhom(1.0, 0.3)] {
            let dual = fam.dual();
            for a in [0.2, 1.4, 2.9] {
                let prod = fam.h(a).unwrap() * dual.h(a).unwrap();
                assert!((prod - Complex64::new(1.0, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn spec_roundtrip_serialization() {
        let fam = rect(1.25, 0.6);
        let json = serde_json::to_string(&fam.spec()).unwrap();
        assert_eq!(
            json,
            r#"{"regime":"rectangular","tau0":1.25,"lambda0":0.6}"#
        );
        let spec: FamilySpec = serde_json::from_str(&json).unwrap();
        let back = CoefficientFamily::<f64>::from_spec(&spec).unwrap();
        assert_eq!(back.regime(), FamilyRegime::Rectangular);
        assert_eq!(back.tau0(), 1.25);
    }

    #[test]
    fn extended_scalar_cross_check() {
        use crate::scalar::Dd;
        let fam64 = rect(1.0, 0.3);
        let famdd = CoefficientFamily::rectangular(Dd::from_f64(1.0), Dd::from_f64(0.3)).unwrap();
        let a64 = fam64.g(1.9, 0.4).unwrap();
        let add = famdd.g(Dd::from_f64(1.9), Dd::from_f64(0.4)).unwrap();
        assert!((a64.re - add.re.to_f64()).abs() < 1e-14);
    }
}

#[cfg(test)]
mod prop_tests {
    use super::*;
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn any_family() -> impl Strategy<Value = CoefficientFamily<f64>> {
        (0u8..3, 0.4f64..2.0, 0.0f64..6.0).prop_map(|(r, tau0, lambda0)| match r {
            0 => CoefficientFamily::rectangular(tau0, lambda0).unwrap(),
            1 => CoefficientFamily::rhombic(tau0, lambda0).unwrap(),
            _ => CoefficientFamily::degenerate(lambda0),
        })
    }

    proptest! {
        #[test]
        fn f_is_odd(fam in any_family(), a in -6.0f64..6.0) {
            let z = Complex64::new(a, 0.0);
            if let (Ok(p), Ok(m)) = (fam.f(z), fam.f(-z)) {
                prop_assert!((p + m).norm() < 1e-11 * (1.0 + p.norm()));
            }
        }

        #[test]
        fn g_is_antisymmetric(fam in any_family(), a in 0.0f64..6.0, b in 0.0f64..6.0) {
            if let (Ok(p), Ok(q)) = (fam.g(a, b), fam.g(b, a)) {
                prop_assert!((p + q).norm() < 1e-11 * (1.0 + p.norm()));
            }
        }

        #[test]
        fn h_product_is_one(fam in any_family(), a in 0.0f64..6.0) {
            if let (Ok(p), Ok(q)) = (fam.h(a), fam.h(a + std::f64::consts::PI)) {
                prop_assert!((p * q - Complex64::new(1.0, 0.0)).norm() < 1e-10);
            }
        }
    }
}
