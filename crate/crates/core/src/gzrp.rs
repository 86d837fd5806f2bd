//! Generalized zero-range potential acting in a single partial wave.
//!
//! The S-matrix element is `(alpha - i k^(2l+1)) / (alpha + i k^(2l+1))`. Its poles sit at
//! `k = i kappa_m` where the `kappa_m` are the `2l+1` roots of `kappa^(2l+1) = (-1)^l alpha`;
//! with that root set the pole product reproduces the closed form exactly.

use num_complex::Complex;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::scalar::{reduce_mod_pi, Real};
use crate::specfun::{double_factorial, MAX_L};

/// Partial phase at momentum `k` (atomic units, radians).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PhaseShift<T> {
    pub k: T,
    pub delta: T,
}

impl<T: Real> PhaseShift<T> {
    pub fn new(k: T, delta: T) -> Self {
        Self { k, delta }
    }

    /// `exp(2 i delta)`.
    pub fn s_matrix(&self) -> Complex<T> {
        Complex::from_polar(T::one(), self.delta + self.delta)
    }

    pub fn tan(&self) -> T {
        self.delta.tan()
    }

    /// Partial cross section `4 pi / k^2 sin^2 delta` in a0^2.
    pub fn partial_cross_section(&self) -> T {
        let s = self.delta.sin();
        T::lit(4.0) * T::PI() * s * s / (self.k * self.k)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GzrpChannel<T> {
    l: usize,
    alpha: T,
    kappas: Vec<Complex<T>>,
}

impl<T: Real> GzrpChannel<T> {
    pub fn new(l: usize, alpha: T) -> Result<Self> {
        if l > MAX_L {
            return domain(format!("l = {l} exceeds {MAX_L}"));
        }
        if alpha == T::zero() || !alpha.is_finite() {
            return domain("inverse scattering parameter alpha must be finite and nonzero");
        }
        Ok(Self {
            l,
            alpha,
            kappas: pole_parameters(l, alpha),
        })
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn kappas(&self) -> &[Complex<T>] {
        &self.kappas
    }

    /// Low-energy coefficient `a_l` in `tan delta ~ -a_l k^(2l+1)`.
    pub fn scattering_length(&self) -> T {
        T::one() / self.alpha
    }

    fn k_power(&self, k: T) -> T {
        k.powi(2 * self.l as i32 + 1)
    }

    /// Closed-form S-matrix element.
    pub fn s_matrix(&self, k: T) -> Complex<T> {
        let kp = self.k_power(k);
        Complex::new(self.alpha, -kp) / Complex::new(self.alpha, kp)
    }

    /// S-matrix element as the product over poles `prod (kappa_m - i k)/(kappa_m + i k)`.
    pub fn s_matrix_from_poles(&self, k: T) -> Complex<T> {
        let ik = Complex::new(T::zero(), k);
        self.kappas
            .iter()
            .fold(Complex::new(T::one(), T::zero()), |acc, &kap| acc * (kap - ik) / (kap + ik))
    }
}

/// The `2l+1` roots of `kappa^(2l+1) = (-1)^l alpha`, real root stored exactly.
fn pole_parameters<T: Real>(l: usize, alpha: T) -> Vec<Complex<T>> {
    let order = 2 * l + 1;
    let c = if l.is_multiple_of(2) { alpha } else { -alpha };
    let radius = c.abs().powf(T::one() / T::from_count(order));
    let two_pi = T::PI() + T::PI();
    (0..order)
        .map(|m| {
            if c > T::zero() && m == 0 {
                Complex::new(radius, T::zero())
            } else if c < T::zero() && m == l {
                Complex::new(-radius, T::zero())
            } else {
                let offset = if c > T::zero() { T::zero() } else { T::PI() };
                let theta = (offset + two_pi * T::from_count(m)) / T::from_count(order);
                Complex::from_polar(radius, theta)
            }
        })
        .collect()
}

/// Partial phase of the channel, in (-pi/2, pi/2].
pub fn gzrp_phase<T: Real>(channel: &GzrpChannel<T>, k: T) -> Result<PhaseShift<T>> {
    if !(k > T::zero()) {
        return domain(format!("momentum must be positive, got {k}"));
    }
    let delta = -(channel.k_power(k) / channel.alpha).atan();
    Ok(PhaseShift::new(k, reduce_mod_pi(delta)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PoleKind {
    Bound,
    Antibound,
    ResonancePair,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Pole<T> {
    /// Pole location in the complex k-plane.
    pub k: Complex<T>,
    pub kind: PoleKind,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StateClassification<T> {
    pub poles: Vec<Pole<T>>,
    /// Whether any pole lies on the positive imaginary axis.
    pub has_bound_state: bool,
    /// Bound-state prediction of the parity rule "alpha > 0 and l odd, or alpha < 0 and l even".
    /// Kept alongside the pole-based answer; the two disagree under this root convention.
    pub parity_rule_bound: bool,
}

/// Locates the S-matrix poles and labels them.
pub fn classify_states<T: Real>(channel: &GzrpChannel<T>) -> StateClassification<T> {
    let poles: Vec<Pole<T>> = channel
        .kappas
        .iter()
        .map(|&kap| {
            let k = Complex::new(T::zero(), T::one()) * kap;
            let on_axis = k.re.abs() <= T::epsilon() * T::lit(64.0) * k.norm();
            let kind = if on_axis && k.im > T::zero() {
                PoleKind::Bound
            } else if on_axis && k.im < T::zero() {
                PoleKind::Antibound
            } else {
                PoleKind::ResonancePair
            };
            Pole { k, kind }
        })
        .collect();
    let has_bound_state = poles.iter().any(|p| p.kind == PoleKind::Bound);
    let odd = channel.l % 2 == 1;
    let parity_rule_bound = (channel.alpha > T::zero() && odd) || (channel.alpha < T::zero() && !odd);
    StateClassification {
        poles,
        has_bound_state,
        parity_rule_bound,
    }
}

/// Small-r Laurent expansion `psi(r) = sum_i coeffs[i] r^(lowest_power + i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SmallRSeries<T> {
    pub lowest_power: i32,
    pub coeffs: Vec<Complex<T>>,
}

impl<T: Real> SmallRSeries<T> {
    pub fn new(lowest_power: i32, coeffs: Vec<Complex<T>>) -> Self {
        Self { lowest_power, coeffs }
    }

    /// Coefficient of `r^power`, zero outside the stored range.
    pub fn coefficient(&self, power: i32) -> Option<Complex<T>> {
        let idx = power - self.lowest_power;
        if idx < 0 {
            return Some(Complex::new(T::zero(), T::zero()));
        }
        self.coeffs.get(idx as usize).copied()
    }

    pub fn highest_power(&self) -> i32 {
        self.lowest_power + self.coeffs.len() as i32 - 1
    }
}

/// `(d/dr)^(2l+1) (r^(l+1) psi) / (r^(l+1) psi)` at the origin.
pub fn boundary_ratio<T: Real>(l: usize, psi: &SmallRSeries<T>) -> Result<Complex<T>> {
    let shift = l as i32 + 1;
    let order = 2 * l as i32 + 1;
    if psi.lowest_power + shift < 0 {
        return domain("r^(l+1) psi is singular at the origin");
    }
    // coefficients of F = r^(l+1) psi are psi's shifted by l+1
    let b0 = psi.coefficient(-shift).unwrap_or_default();
    let top = psi
        .coefficient(order - shift)
        .ok_or_else(|| crate::ZrpError::Domain(format!(
            "series reaches r^{} but r^{} is required",
            psi.highest_power(),
            order - shift
        )))?;
    if b0.norm() == T::zero() {
        return domain("r^(l+1) psi vanishes at the origin; boundary ratio is infinite");
    }
    let factorial: f64 = (1..=order).map(|i| i as f64).product();
    Ok(top * T::lit(factorial) / b0)
}

/// Residual of the generalized boundary condition
/// `(d/dr)^(2l+1)(r^(l+1) psi)/(r^(l+1) psi)|_0 = -2^l l! alpha / (2l-1)!!`.
pub fn boundary_residual<T: Real>(channel: &GzrpChannel<T>, psi: &SmallRSeries<T>) -> Result<T> {
    let l = channel.l;
    let ratio = boundary_ratio(l, psi)?;
    let l_fact: f64 = (1..=l).map(|i| i as f64).product();
    let df = double_factorial(2 * l as i64 - 1)? as f64;
    let target = -T::lit(2f64.powi(l as i32) * l_fact / df) * channel.alpha;
    Ok((ratio - Complex::new(target, T::zero())).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn s_wave_phase() {
        let ch = GzrpChannel::new(0, 1.0f64).unwrap();
        let p = gzrp_phase(&ch, 1.0).unwrap();
        assert!((p.delta + PI / 4.0).abs() < 1e-15);
        let hard = GzrpChannel::new(0, 1e12f64).unwrap();
        assert!(gzrp_phase(&hard, 1.0).unwrap().delta.abs() < 1e-11);
        assert!(gzrp_phase(&ch, 0.0).is_err());
        assert!(gzrp_phase(&ch, -1.0).is_err());
        assert!(GzrpChannel::new(0, 0.0).is_err());
    }

    #[test]
    fn p_wave_low_energy() {
        let ch = GzrpChannel::new(1, 1.0).unwrap();
        let k = 1e-2f64;
        let t = gzrp_phase(&ch, k).unwrap().tan();
        assert!((t / (-k.powi(3)) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn roots_satisfy_equation_on_circle() {
        for l in 0..4 {
            for &alpha in &[2.5, -0.7] {
                let ch = GzrpChannel::new(l, alpha).unwrap();
                let target = if l % 2 == 0 { alpha } else { -alpha };
                let radius = f64::abs(alpha).powf(1.0 / (2 * l + 1) as f64);
                assert_eq!(ch.kappas().len(), 2 * l + 1);
                for kap in ch.kappas() {
                    let p = kap.powu(2 * l as u32 + 1);
                    assert!((p - Complex::new(target, 0.0)).norm() < 1e-12 * target.abs().max(1.0));
                    assert!((kap.norm() - radius).abs() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn pole_classification() {
        let c = classify_states(&GzrpChannel::new(0, 2.0).unwrap());
        assert_eq!(c.poles.len(), 1);
        assert_eq!(c.poles[0].kind, PoleKind::Bound);
        assert!((c.poles[0].k - Complex::new(0.0, 2.0)).norm() < 1e-15);
        assert!(!c.parity_rule_bound);

        let c = classify_states(&GzrpChannel::new(0, -2.0).unwrap());
        assert_eq!(c.poles[0].kind, PoleKind::Antibound);
        assert!((c.poles[0].k - Complex::new(0.0, -2.0)).norm() < 1e-15);

        let c = classify_states(&GzrpChannel::new(1, 1.0).unwrap());
        assert_eq!(c.poles.len(), 3);
        let on_axis = c.poles.iter().filter(|p| p.kind != PoleKind::ResonancePair).count();
        assert_eq!(on_axis, 1);
        // enumerate cube roots of -1 independently
        let mut expected: Vec<Complex<f64>> = (0..3)
            .map(|m| Complex::<f64>::from_polar(1.0, PI * (1.0 + 2.0 * m as f64) / 3.0))
            .map(|kap| Complex::<f64>::i() * kap)
            .collect();
        for p in &c.poles {
            let pos = expected.iter().position(|e| (e - p.k).norm() < 1e-12).unwrap();
            expected.remove(pos);
        }
    }

    #[test]
    fn s_wave_boundary_condition() {
        // r psi = sin(k r - theta)/k with theta = atan(k/alpha)
        let (k, alpha) = (0.7f64, 1.3f64);
        let theta = (k / alpha).atan();
        // psi = (sin(kr) cos(theta) - cos(kr) sin(theta)) / (k r)
        let coeffs: Vec<Complex<f64>> = (0..6)
            .map(|p| {
                let fact: f64 = (1..=p).map(|i| i as f64).product();
                let kp = k.powi(p) / fact;
                let c = match p % 4 {
                    0 => -theta.sin() * kp,
                    1 => theta.cos() * kp,
                    2 => theta.sin() * kp,
                    _ => -theta.cos() * kp,
                };
                Complex::new(c / k, 0.0)
            })
            .collect();
        let psi = SmallRSeries::new(-1, coeffs);
        let ch = GzrpChannel::new(0, alpha).unwrap();
        assert!(boundary_residual(&ch, &psi).unwrap() < 1e-14);
    }

    #[test]
    fn regular_wave_has_infinite_ratio() {
        // j_0(kr) = 1 - k^2 r^2/6 ...: r psi vanishes at the origin
        let psi = SmallRSeries::new(0, vec![Complex::new(1.0, 0.0), Complex::new(0.0, 0.0)]);
        assert!(boundary_ratio(0, &psi).is_err());
        // n_0(kr) = cos(kr)/(kr): the alpha -> 0 limit, ratio 0
        let k = 0.5;
        let psi = SmallRSeries::new(
            -1,
            vec![Complex::new(1.0 / k, 0.0), Complex::new(0.0, 0.0), Complex::new(-k / 2.0, 0.0)],
        );
        assert!(boundary_ratio(0, &psi).unwrap().norm() < 1e-15);
    }

    #[test]
    fn short_series_rejected() {
        let ch = GzrpChannel::new(1, 1.0).unwrap();
        let psi = SmallRSeries::new(-2, vec![Complex::new(1.0, 0.0); 2]);
        assert!(boundary_residual(&ch, &psi).is_err());
    }

    #[test]
    fn f32_channel() {
        let ch = GzrpChannel::<f32>::new(0, 1.0).unwrap();
        let p = gzrp_phase(&ch, 1.0).unwrap();
        assert!((p.delta + std::f32::consts::FRAC_PI_4).abs() < 1e-6);
    }
}
