//! Scalar abstraction shared by every numerical module.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use serde::Serialize;

/// Floating point scalar the library computes in: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + Default
    + Serialize
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal into the scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    /// Converts a count or index.
    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Reduces a phase into the branch (-pi/2, pi/2].
pub fn reduce_mod_pi<T: Real>(delta: T) -> T {
    let pi = T::PI();
    let half = T::FRAC_PI_2();
    let mut d = delta - (delta / pi).round() * pi;
    if d <= -half {
        d = d + pi;
    } else if d > half {
        d = d - pi;
    }
    d
}

/// Shifts each phase by a multiple of pi so consecutive entries differ by at most pi/2.
pub fn unwrap_mod_pi<T: Real>(phases: &mut [T]) {
    let pi = T::PI();
    for i in 1..phases.len() {
        let prev = phases[i - 1];
        let jump = ((phases[i] - prev) / pi).round();
        phases[i] = phases[i] - jump * pi;
    }
}

/// Angular distance of two phases modulo pi, in [0, pi/2].
pub fn phase_distance_mod_pi<T: Real>(a: T, b: T) -> T {
    reduce_mod_pi(a - b).abs()
}

/// Hartree energy in eV.
pub const HARTREE_EV: f64 = 27.2114;
/// Square Bohr radius in square angstrom.
pub const BOHR2_IN_ANGSTROM2: f64 = 0.280028;

/// Momentum in a.u. for a kinetic energy in eV (`E = k^2/2` hartree).
pub fn k_from_ev<T: Real>(e_ev: T) -> T {
    (T::lit(2.0) * e_ev / T::lit(HARTREE_EV)).sqrt()
}

/// Kinetic energy in eV for a momentum in a.u.
pub fn ev_from_k<T: Real>(k: T) -> T {
    k * k / T::lit(2.0) * T::lit(HARTREE_EV)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn reduce_lands_in_branch() {
        for &x in &[-7.0, -PI / 2.0, -1.0, 0.0, 1.0, PI / 2.0, 4.0, 10.0] {
            let r = reduce_mod_pi(x);
            assert!(r > -PI / 2.0 - 1e-15 && r <= PI / 2.0 + 1e-15, "{x} -> {r}");
            let k = ((x - r) / PI).round();
            assert!((x - r - k * PI).abs() < 1e-12);
        }
        assert_eq!(reduce_mod_pi(-PI / 2.0), PI / 2.0);
    }

    #[test]
    fn unwrap_removes_pi_jumps() {
        let mut p = vec![1.4, 1.5, 1.55 - PI, 1.6 - PI, 1.7 - 2.0 * PI];
        unwrap_mod_pi(&mut p);
        for w in p.windows(2) {
            assert!((w[1] - w[0]).abs() < 0.2);
        }
        assert!((p[4] - 1.7).abs() < 1e-12);
    }

    #[test]
    fn energy_round_trip() {
        for &e in &[1e-4, 0.01, 0.35, 1.0, 17.0] {
            assert!((ev_from_k(k_from_ev(e)) / e - 1.0f64).abs() < 1e-12);
        }
        assert!((k_from_ev(HARTREE_EV / 2.0) - 1.0f64).abs() < 1e-15);
    }
}
