//! Jacobi theta functions by truncated q-series.
//!
//! Conventions: `theta3(z, q) = sum_n q^{n^2} exp(2 i n z)` with nome
//! `q = exp(pi i tau)`, `Im tau > 0`, and the quasi-periods `pi`, `pi tau`.
//! Arguments with large imaginary part are reduced into the fundamental strip
//! by the quasi-periodicity relations before summation.

use num_complex::Complex;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::scalar::Scalar;

/// Torus regime of the nome.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Regime {
    /// `tau = i tau0`, `tau0 > 0`; the nome is real, `0 < q < 1`.
    Rectangular,
    /// `tau = 1/2 + i tau0`, `tau0 > 0`; the nome is `i q0` with `q0 in (0,1)`.
    Rhombic,
    /// Any complex `tau` with positive imaginary part.
    Generic,
    /// `q = 0`; all theta values collapse to their trigonometric limits.
    Degenerate,
}

#[derive(Debug, Error)]
pub enum ThetaError {
    #[error("theta index {0} out of range 1..=4")]
    InvalidIndex(u8),
    #[error("invalid theta parameters: {0}")]
    InvalidParams(String),
    #[error("series does not converge: |Im z| = {im_z} too large for log|q| = {log_q}")]
    NonConvergent { im_z: f64, log_q: f64 },
}

/// The four theta constants at `z = 0`.
#[derive(Clone, Copy, Debug)]
pub struct ThetaConstants<S: Scalar> {
    pub theta2: Complex<S>,
    pub theta3: Complex<S>,
    pub theta4: Complex<S>,
    pub theta1_prime: Complex<S>,
}

/// Modulus/nome pair with the cached quantities the series needs.
#[derive(Clone, Copy, Debug)]
pub struct ThetaParams<S: Scalar> {
    tau: Complex<S>,
    q: Complex<S>,
    q_fourth: Complex<S>,
    regime: Regime,
    eps: S,
}

impl<S: Scalar> ThetaParams<S> {
    /// Rectangular torus, `q = exp(-pi tau0)`.
    pub fn rectangular(tau0: S) -> Result<Self, ThetaError> {
        if !(tau0 > S::zero()) {
            return Err(ThetaError::InvalidParams(format!(
                "rectangular regime needs tau0 > 0, got {tau0}"
            )));
        }
        let tau = Complex::new(S::zero(), tau0);
        Ok(Self::with_regime(tau, Regime::Rectangular))
    }

    /// Rhombic torus, `q = i exp(-pi tau0)`.
    pub fn rhombic(tau0: S) -> Result<Self, ThetaError> {
        if !(tau0 > S::zero()) {
            return Err(ThetaError::InvalidParams(format!(
                "rhombic regime needs tau0 > 0, got {tau0}"
            )));
        }
        let half = S::from_f64(0.5).unwrap();
        let tau = Complex::new(half, tau0);
        Ok(Self::with_regime(tau, Regime::Rhombic))
    }

    /// Generic complex modulus with `Im tau > 0`.
    pub fn from_tau(tau: Complex<S>) -> Result<Self, ThetaError> {
        if !(tau.im > S::zero()) {
            return Err(ThetaError::InvalidParams(format!(
                "need Im tau > 0, got tau = {tau}"
            )));
        }
        Ok(Self::with_regime(tau, Regime::Generic))
    }

    /// Directly from a nome with `|q| < 1` (`q = 0` selects the degenerate regime).
    pub fn from_nome(q: Complex<S>) -> Result<Self, ThetaError> {
        if q.is_zero() {
            return Ok(Self::degenerate());
        }
        if !(q.norm_sqr() < S::one()) {
            return Err(ThetaError::InvalidParams(format!(
                "need |q| < 1, got q = {q}"
            )));
        }
        // tau = -i ln(q) / pi (principal branch)
        let tau = -Complex::<S>::i() * q.ln() / S::PI();
        Ok(Self {
            tau,
            q,
            q_fourth: q.powf(S::from_f64(0.25).unwrap()),
            regime: Regime::Generic,
            eps: S::theta_epsilon(),
        })
    }

    /// The `q = 0` trigonometric limit.
    pub fn degenerate() -> Self {
        Self {
            tau: Complex::new(S::zero(), S::infinity()),
            q: Complex::zero(),
            q_fourth: Complex::zero(),
            regime: Regime::Degenerate,
            eps: S::theta_epsilon(),
        }
    }

    fn with_regime(tau: Complex<S>, regime: Regime) -> Self {
        let q = (Complex::<S>::i() * S::PI() * tau).exp();
        Self {
            tau,
            q,
            q_fourth: q.powf(S::from_f64(0.25).unwrap()),
            regime,
            eps: S::theta_epsilon(),
        }
    }

    /// Override the relative series accuracy target.
    pub fn with_epsilon(mut self, eps: S) -> Self {
        self.eps = eps;
        self
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn nome(&self) -> Complex<S> {
        self.q
    }

    pub fn tau(&self) -> Complex<S> {
        self.tau
    }

    /// `-ln|q|`, the height of the fundamental strip.
    fn strip_height(&self) -> S {
        -self.q.norm().ln()
    }

    /// theta_k(z, q).
    pub fn theta(&self, k: u8, z: Complex<S>) -> Result<Complex<S>, ThetaError> {
        Ok(self.theta_pair(k, z)?.0)
    }

    /// d/dz theta_k(z, q).
    pub fn theta_deriv(&self, k: u8, z: Complex<S>) -> Result<Complex<S>, ThetaError> {
        Ok(self.theta_pair(k, z)?.1)
    }

    /// Value and z-derivative in one pass.
    pub fn theta_pair(&self, k: u8, z: Complex<S>) -> Result<(Complex<S>, Complex<S>), ThetaError> {
        if !(1..=4).contains(&k) {
            return Err(ThetaError::InvalidIndex(k));
        }
        if self.regime == Regime::Degenerate {
            let (v, d) = match k {
                3 | 4 => (Complex::one(), Complex::zero()),
                _ => (Complex::zero(), Complex::zero()),
            };
            return Ok((v, d));
        }

        // Quasi-periodic reduction z = z' + m*pi*tau keeps |Im z'| within half
        // the strip, where the series terms decrease monotonically.
        let height = self.strip_height();
        let bound = S::from_f64(0.45).unwrap() * height;
        let m = if z.im.abs() <= bound {
            0i64
        } else {
            (z.im / height)
                .round()
                .to_i64()
                .ok_or(ThetaError::NonConvergent {
                    im_z: z.im.approx_f64(),
                    log_q: (-height).approx_f64(),
                })?
        };
        if m == 0 {
            return self.series_pair(k, z);
        }
        let pit = self.tau * S::PI();
        let ms = S::from_i64_checked(m);
        let zr = z - pit * ms;
        // Prefactor magnitude m^2 * height + 2 m Im z' must stay representable.
        let log_mag = (ms * ms * height + (ms + ms).abs() * zr.im.abs()).approx_f64();
        if log_mag > 690.0 {
            return Err(ThetaError::NonConvergent {
                im_z: z.im.approx_f64(),
                log_q: (-height).approx_f64(),
            });
        }
        let (v, d) = self.series_pair(k, zr)?;
        // theta_k(z' + m pi tau) = s^m q^{-m^2} e^{-2 i m z'} theta_k(z'),
        // with s = -1 for k = 1, 4 and s = +1 for k = 2, 3.
        let two_i_m = Complex::new(S::zero(), ms + ms);
        let mut factor = (-self.q.ln() * ms * ms - two_i_m * zr).exp();
        if (k == 1 || k == 4) && m.rem_euclid(2) == 1 {
            factor = -factor;
        }
        Ok((factor * v, factor * (d - two_i_m * v)))
    }

    fn series_pair(&self, k: u8, z: Complex<S>) -> Result<(Complex<S>, Complex<S>), ThetaError> {
        let two = S::from_f64(2.0).unwrap();
        let eiz = (Complex::<S>::i() * z).exp();
        let eiz_inv = (-Complex::<S>::i() * z).exp();
        let e2iz = eiz * eiz;
        let e2iz_inv = eiz_inv * eiz_inv;
        let q = self.q;
        let q2 = q * q;
        let growth = (two * z.im.abs()).exp();

        let mut sum = Complex::<S>::zero();
        let mut dsum = Complex::<S>::zero();

        match k {
            1 | 2 => {
                // 2 q^{1/4} sum_{n>=0} (+-1)^n q^{n(n+1)} trig((2n+1) z)
                let mut coef = Complex::<S>::one(); // q^{n(n+1)}
                let mut coef_mag = S::one();
                let mut ratio = q2; // q^{2n} multiplier, n = 1, 2, ...
                let mut u = eiz; // e^{i(2n+1)z}
                let mut u_inv1 = eiz_inv;
                let u_step = e2iz;
                let u_step_inv = e2iz_inv;
                let mut sign = S::one();
                let mut growth_pow = growth;
                let mut converged = false;
                for n in 0..200u32 {
                    let cos_t = (u + u_inv1) * S::from_f64(0.5).unwrap();
                    let sin_t = (u - u_inv1) * Complex::new(S::zero(), S::from_f64(-0.5).unwrap());
                    let odd = S::from_u32_checked(2 * n + 1);
                    if k == 1 {
                        sum = sum + coef * sin_t * sign;
                        dsum = dsum + coef * cos_t * sign * odd;
                    } else {
                        sum = sum + coef * cos_t * sign;
                        dsum = dsum - coef * sin_t * sign * odd;
                    }
                    // bound on the next coefficient magnitude
                    coef = coef * ratio;
                    coef_mag = coef_mag * ratio.norm();
                    ratio = ratio * q2;
                    growth_pow = growth_pow * growth * growth;
                    if k == 1 {
                        sign = -sign;
                    }
                    u = u * u_step;
                    u_inv1 = u_inv1 * u_step_inv;
                    let next_mag = coef_mag * growth_pow;
                    if next_mag < self.eps * sum.norm().max(S::one()) {
                        converged = true;
                        break;
                    }
                }
                if !converged {
                    return Err(ThetaError::NonConvergent {
                        im_z: z.im.approx_f64(),
                        log_q: self.q.norm().ln().approx_f64(),
                    });
                }
                let pref = self.q_fourth * two;
                Ok((pref * sum, pref * dsum))
            }
            _ => {
                // 1 + 2 sum_{n>=1} (+-1)^n q^{n^2} cos(2 n z)
                sum = Complex::one();
                let mut coef = q; // q^{n^2}
                let mut coef_mag = q.norm();
                let mut ratio = q * q2; // q^{2n+1} multiplier
                let mut u = e2iz;
                let mut u_inv = e2iz_inv;
                let mut sign = if k == 4 { -S::one() } else { S::one() };
                let mut growth_pow = growth * growth;
                let mut converged = false;
                for n in 1..=200u32 {
                    let cos_t = (u + u_inv) * S::from_f64(0.5).unwrap();
                    let sin_t = (u - u_inv) * Complex::new(S::zero(), S::from_f64(-0.5).unwrap());
                    let even = S::from_u32_checked(2 * n);
                    sum = sum + coef * cos_t * (sign + sign);
                    dsum = dsum - coef * sin_t * (sign + sign) * even;
                    coef = coef * ratio;
                    coef_mag = coef_mag * ratio.norm();
                    ratio = ratio * q2;
                    growth_pow = growth_pow * growth * growth;
                    if k == 4 {
                        sign = -sign;
                    }
                    u = u * e2iz;
                    u_inv = u_inv * e2iz_inv;
                    let next_mag = (coef_mag + coef_mag) * growth_pow;
                    if next_mag < self.eps * sum.norm().max(S::one()) {
                        converged = true;
                        break;
                    }
                }
                if !converged {
                    return Err(ThetaError::NonConvergent {
                        im_z: z.im.approx_f64(),
                        log_q: self.q.norm().ln().approx_f64(),
                    });
                }
                Ok((sum, dsum))
            }
        }
    }

    /// `(theta2(0), theta3(0), theta4(0), theta1'(0))`.
    pub fn constants(&self) -> Result<ThetaConstants<S>, ThetaError> {
        if self.regime == Regime::Degenerate {
            return Ok(ThetaConstants {
                theta2: Complex::zero(),
                theta3: Complex::one(),
                theta4: Complex::one(),
                theta1_prime: Complex::zero(),
            });
        }
        let zero = Complex::zero();
        Ok(ThetaConstants {
            theta2: self.theta(2, zero)?,
            theta3: self.theta(3, zero)?,
            theta4: self.theta(4, zero)?,
            theta1_prime: self.theta_deriv(1, zero)?,
        })
    }

    /// Distance from `z` to the lattice `offset + pi Z + pi tau Z`.
    pub fn lattice_distance(&self, z: Complex<S>, offset: Complex<S>) -> S {
        if self.regime == Regime::Degenerate {
            // Only the real period survives.
            let w = (z - offset) / S::PI();
            let m = w.re.round();
            return Complex::new(w.re - m, w.im).norm() * S::PI();
        }
        let pit = self.tau * S::PI();
        let w = z - offset;
        let n0 = (w.im / pit.im).round();
        let mut best = S::infinity();
        for dn in [-S::one(), S::zero(), S::one()] {
            let n = n0 + dn;
            let rem = w - pit * n;
            let m0 = (rem.re / S::PI()).round();
            for dm in [-S::one(), S::zero(), S::one()] {
                let d = (rem - Complex::new((m0 + dm) * S::PI(), S::zero())).norm();
                if d < best {
                    best = d;
                }
            }
        }
        best
    }
}

/// Helper conversions that keep the generic code readable.
trait FromIntExt: Scalar {
    fn from_i64_checked(v: i64) -> Self {
        Self::from_i64(v).unwrap_or_else(|| Self::from_f64(v as f64).unwrap())
    }
    fn from_u32_checked(v: u32) -> Self {
        Self::from_u32(v).unwrap_or_else(|| Self::from_f64(v as f64).unwrap())
    }
}
impl<S: Scalar> FromIntExt for S {}
