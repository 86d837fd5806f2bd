//! Numerov integration of the radial equation for `chi = r psi`,
//!
//! `chi'' = (l(l+1)/r^2 + 2 u(r) - k^2) chi`,
//!
//! with the phase read off by matching to `r (j_l(kr) cos delta + n_l(kr) sin delta)`.
//! It shares no code path with the analytic dressing formulas and serves as their check.

use rayon::prelude::*;

use crate::error::{domain, Result, ZrpError};
use crate::gzrp::PhaseShift;
use crate::scalar::{reduce_mod_pi, unwrap_mod_pi, Real};
use crate::specfun::{spherical_j, spherical_n, spherical_with_derivative, SphericalKind};

/// Tail magnitude accepted at the matching radius.
pub const TAIL_THRESHOLD: f64 = 1e-10;
pub const DEFAULT_STEP: f64 = 1e-3;
pub const DEFAULT_INNER_RADIUS: f64 = 1e-3;
pub const DEFAULT_TOLERANCE: f64 = 1e-6;

/// Natural cubic spline through potential samples; zero beyond the last sample.
#[derive(Clone, Debug)]
pub struct SampledPotential<T> {
    r: Vec<T>,
    u: Vec<T>,
    m: Vec<T>,
}

impl<T: Real> SampledPotential<T> {
    pub fn new(r: Vec<T>, u: Vec<T>) -> Result<Self> {
        let n = r.len();
        if n < 3 || u.len() != n {
            return domain("sampled potential needs at least three (r, u) pairs of equal length");
        }
        if r.windows(2).any(|w| !(w[1] > w[0])) {
            return domain("sample radii must be strictly increasing");
        }
        // second derivatives from the tridiagonal system, natural end conditions
        let mut m = vec![T::zero(); n];
        let mut c_prime = vec![T::zero(); n];
        let mut d_prime = vec![T::zero(); n];
        let two = T::lit(2.0);
        let six = T::lit(6.0);
        for i in 1..n - 1 {
            let h0 = r[i] - r[i - 1];
            let h1 = r[i + 1] - r[i];
            let a = h0;
            let b = two * (h0 + h1);
            let c = h1;
            let d = six * ((u[i + 1] - u[i]) / h1 - (u[i] - u[i - 1]) / h0);
            let denom = b - a * c_prime[i - 1];
            c_prime[i] = c / denom;
            d_prime[i] = (d - a * d_prime[i - 1]) / denom;
        }
        for i in (1..n - 1).rev() {
            m[i] = d_prime[i] - c_prime[i] * m[i + 1];
        }
        Ok(Self { r, u, m })
    }

    pub fn eval(&self, x: T) -> T {
        let n = self.r.len();
        if x <= self.r[0] {
            return self.u[0];
        }
        if x > self.r[n - 1] {
            return T::zero();
        }
        let i = match self.r.binary_search_by(|p| p.partial_cmp(&x).unwrap_or(std::cmp::Ordering::Less)) {
            Ok(i) => return self.u[i],
            Err(i) => i - 1,
        };
        let h = self.r[i + 1] - self.r[i];
        let a = (self.r[i + 1] - x) / h;
        let b = (x - self.r[i]) / h;
        let six = T::lit(6.0);
        a * self.u[i]
            + b * self.u[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / six
    }
}

/// One radial scattering problem.
#[derive(Clone, Debug)]
pub struct RadialProblem<T, P> {
    pub l: usize,
    pub k: T,
    pub potential: P,
    /// `(r psi)'/(r psi)` imposed at `r0`.
    pub inner_log_derivative: T,
    pub r0: T,
    pub r_match: T,
    pub step: T,
    /// Bound on the Richardson estimate of the phase error.
    pub tolerance: T,
}

impl<T: Real, P: Fn(T) -> T + Sync> RadialProblem<T, P> {
    /// Problem with the default step and tolerance; `r0 = 0` for `l = 0`, `1e-3` otherwise.
    pub fn new(l: usize, k: T, potential: P, inner_log_derivative: T, r_match: T) -> Self {
        let r0 = if l == 0 { T::zero() } else { T::lit(DEFAULT_INNER_RADIUS) };
        Self {
            l,
            k,
            potential,
            inner_log_derivative,
            r0,
            r_match,
            step: T::lit(DEFAULT_STEP),
            tolerance: T::lit(DEFAULT_TOLERANCE),
        }
    }

    pub fn with_inner_radius(mut self, r0: T) -> Self {
        self.r0 = r0;
        self
    }

    pub fn with_step(mut self, step: T) -> Self {
        self.step = step;
        self
    }

    pub fn with_tolerance(mut self, tolerance: T) -> Self {
        self.tolerance = tolerance;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.k > T::zero()) {
            return domain("momentum must be positive");
        }
        if !self.inner_log_derivative.is_finite() {
            return domain("inner log-derivative is infinite");
        }
        if self.r0 < T::zero() || (self.l > 0 && self.r0 == T::zero()) {
            return domain("l > 0 needs a strictly positive inner radius");
        }
        if !(self.r_match > self.r0) || !(self.step > T::zero()) {
            return domain("need r0 < r_match and a positive step");
        }
        let tail = (self.potential)(self.r_match).abs();
        if !(tail < T::lit(TAIL_THRESHOLD)) {
            return Err(ZrpError::TailNotNegligible {
                r_match: self.r_match.to_f64_lossy(),
                value: tail.to_f64_lossy(),
            });
        }
        Ok(())
    }
}

/// Matching radius `25 / kappa_min`, clamped to [20, 200] a.u.
pub fn default_match_radius<T: Real>(kappa_min: T) -> T {
    (T::lit(25.0) / kappa_min.abs()).max(T::lit(20.0)).min(T::lit(200.0))
}

/// Log-derivative of `r j_l(kr)` at `r0`: the inner condition of the regular solution.
pub fn regular_log_derivative<T: Real>(l: usize, k: T, r0: T) -> Result<T> {
    if !(r0 > T::zero()) {
        return domain("regular solution has an infinite log-derivative at the origin");
    }
    let x = k * r0;
    let (j, dj) = spherical_with_derivative(SphericalKind::J, l, num_complex::Complex::new(x, T::zero()))?;
    Ok(T::one() / r0 + k * dj.re / j.re)
}

struct Grid<T> {
    r0: T,
    h: T,
    n: usize,
}

impl<T: Real> Grid<T> {
    fn new(r0: T, r_match: T, h: T) -> Self {
        let n = ((r_match - r0) / h).ceil().to_usize().unwrap_or(0).max(8);
        Self { r0, h, n }
    }
    fn r(&self, i: usize) -> T {
        self.r0 + self.h * T::from_count(i)
    }
}

/// Samples `2 u(r) + l(l+1)/r^2` on the grid (the `k`-independent part of the coefficient).
fn sample_q<T: Real, P: Fn(T) -> T>(l: usize, potential: &P, grid: &Grid<T>) -> Vec<T> {
    let ll = T::from_count(l * (l + 1));
    (0..=grid.n)
        .map(|i| {
            let r = grid.r(i);
            let centrifugal = if l == 0 { T::zero() } else { ll / (r * r) };
            T::lit(2.0) * potential(r) + centrifugal
        })
        .collect()
}

/// Second starting value by RK4 sub-stepping of `chi'' = Q chi` from `(chi, chi') = (1, L)`.
fn second_point<T: Real, P: Fn(T) -> T>(l: usize, k: T, potential: &P, r0: T, lg: T, h: T) -> T {
    let ll = T::from_count(l * (l + 1));
    let q = |r: T| {
        let c = if l == 0 { T::zero() } else { ll / (r * r) };
        T::lit(2.0) * potential(r) + c - k * k
    };
    let substeps = 16;
    let dh = h / T::from_count(substeps);
    let half = T::lit(0.5);
    let (mut y, mut v) = (T::one(), lg);
    let mut r = r0;
    for _ in 0..substeps {
        let (k1y, k1v) = (v, q(r) * y);
        let (k2y, k2v) = (v + half * dh * k1v, q(r + half * dh) * (y + half * dh * k1y));
        let (k3y, k3v) = (v + half * dh * k2v, q(r + half * dh) * (y + half * dh * k2y));
        let (k4y, k4v) = (v + dh * k3v, q(r + dh) * (y + dh * k3y));
        let sixth = T::one() / T::lit(6.0);
        y = y + dh * sixth * (k1y + T::lit(2.0) * k2y + T::lit(2.0) * k3y + k4y);
        v = v + dh * sixth * (k1v + T::lit(2.0) * k2v + T::lit(2.0) * k3v + k4v);
        r = r + dh;
    }
    y
}

/// Numerov in summed form: with `z = w chi`, `z_(i+1) - z_i` is accumulated separately,
/// which keeps round-off from growing quadratically with the number of steps.
fn numerov<T: Real>(q_static: &[T], k: T, h: T, chi0: T, chi1: T) -> Vec<T> {
    let n = q_static.len();
    let mut chi = vec![T::zero(); n];
    chi[0] = chi0;
    chi[1] = chi1;
    let h2 = h * h;
    let k2 = k * k;
    let w = |i: usize| T::one() - h2 / T::lit(12.0) * (q_static[i] - k2);
    let mut z = w(1) * chi1;
    let mut dz = z - w(0) * chi0;
    let big = T::lit(1e100);
    for i in 1..n - 1 {
        dz = dz + h2 * (q_static[i] - k2) * chi[i];
        z = z + dz;
        chi[i + 1] = z / w(i + 1);
        if chi[i + 1].abs() > big {
            let scale = chi[i + 1].abs();
            for c in chi.iter_mut().take(i + 2) {
                *c = *c / scale;
            }
            z = z / scale;
            dz = dz / scale;
        }
    }
    chi
}

/// Phase from two samples of `chi` beyond the potential's range.
fn match_phase<T: Real>(l: usize, k: T, r1: T, chi1: T, r2: T, chi2: T) -> Result<T> {
    let f = |r: T| -> Result<(T, T)> { Ok((r * spherical_j(l, k * r)?, r * spherical_n(l, k * r)?)) };
    let (f1, g1) = f(r1)?;
    let (f2, g2) = f(r2)?;
    // chi = a F + b G  =>  tan delta = b / a
    let det = f1 * g2 - f2 * g1;
    let a = (chi1 * g2 - chi2 * g1) / det;
    let b = (f1 * chi2 - f2 * chi1) / det;
    Ok(reduce_mod_pi(b.atan2(a)))
}

fn phase_from_q<T: Real, P: Fn(T) -> T>(
    l: usize,
    k: T,
    potential: &P,
    inner: T,
    grid: &Grid<T>,
    q: &[T],
) -> Result<T> {
    let chi1 = second_point(l, k, potential, grid.r0, inner, grid.h);
    let chi = numerov(q, k, grid.h, T::one(), chi1);
    let last = grid.n;
    let separation = (T::FRAC_PI_4() / k).min((grid.r(last) - grid.r0) / T::lit(4.0));
    let offset = (separation / grid.h).round().to_usize().unwrap_or(1).clamp(1, last);
    match_phase(l, k, grid.r(last - offset), chi[last - offset], grid.r(last), chi[last])
}

/// Phase for a fixed step, without the accuracy check.
pub fn integrate_phase_with_step<T: Real, P: Fn(T) -> T + Sync>(problem: &RadialProblem<T, P>, step: T) -> Result<T> {
    problem.validate()?;
    let grid = Grid::new(problem.r0, problem.r_match, step);
    let q = sample_q(problem.l, &problem.potential, &grid);
    phase_from_q(problem.l, problem.k, &problem.potential, problem.inner_log_derivative, &grid, &q)
}

/// Integrates at `h` and `h/2`; returns the finer phase if the Richardson estimate
/// `|delta_h - delta_(h/2)| / 15` is within tolerance.
pub fn integrate_phase<T: Real, P: Fn(T) -> T + Sync>(problem: &RadialProblem<T, P>) -> Result<PhaseShift<T>> {
    let coarse = integrate_phase_with_step(problem, problem.step)?;
    let fine = integrate_phase_with_step(problem, problem.step / T::lit(2.0))?;
    let estimate = reduce_mod_pi(coarse - fine).abs() / T::lit(15.0);
    if estimate > problem.tolerance {
        return Err(ZrpError::Accuracy {
            estimate: estimate.to_f64_lossy(),
            tolerance: problem.tolerance.to_f64_lossy(),
        });
    }
    Ok(PhaseShift::new(problem.k, fine))
}

/// Settings shared by every momentum of a scan.
#[derive(Clone, Copy, Debug)]
pub struct ScanSettings<T> {
    pub l: usize,
    pub r0: T,
    pub r_match: T,
    pub step: T,
    pub tolerance: T,
}

/// Phases over a momentum grid, unwrapped by continuity; the potential is sampled once.
pub fn integrate_phase_scan<T, P, L>(
    settings: ScanSettings<T>,
    potential: P,
    inner_log_derivative: L,
    ks: &[T],
) -> Result<Vec<PhaseShift<T>>>
where
    T: Real,
    P: Fn(T) -> T + Sync,
    L: Fn(T) -> T + Sync,
{
    let probe = RadialProblem {
        l: settings.l,
        k: T::one(),
        potential: &potential,
        inner_log_derivative: T::zero(),
        r0: settings.r0,
        r_match: settings.r_match,
        step: settings.step,
        tolerance: settings.tolerance,
    };
    probe.validate()?;
    let coarse_grid = Grid::new(settings.r0, settings.r_match, settings.step);
    let fine_grid = Grid::new(settings.r0, settings.r_match, settings.step / T::lit(2.0));
    let q_coarse = sample_q(settings.l, &potential, &coarse_grid);
    let q_fine = sample_q(settings.l, &potential, &fine_grid);
    let mut deltas = ks
        .par_iter()
        .map(|&k| {
            if !(k > T::zero()) {
                return domain("momentum must be positive");
            }
            let inner = inner_log_derivative(k);
            if !inner.is_finite() {
                return domain("inner log-derivative is infinite");
            }
            let coarse = phase_from_q(settings.l, k, &potential, inner, &coarse_grid, &q_coarse)?;
            let fine = phase_from_q(settings.l, k, &potential, inner, &fine_grid, &q_fine)?;
            let estimate = reduce_mod_pi(coarse - fine).abs() / T::lit(15.0);
            if estimate > settings.tolerance {
                return Err(ZrpError::Accuracy {
                    estimate: estimate.to_f64_lossy(),
                    tolerance: settings.tolerance.to_f64_lossy(),
                });
            }
            Ok(fine)
        })
        .collect::<Result<Vec<T>>>()?;
    unwrap_mod_pi(&mut deltas);
    Ok(ks.iter().zip(deltas).map(|(&k, d)| PhaseShift::new(k, d)).collect())
}

/// `-kappa^2 / cosh^2(kappa r)`.
pub fn poschl_teller<T: Real>(kappa: T) -> impl Fn(T) -> T + Sync + Copy {
    move |r: T| {
        let sech = (kappa * r).cosh().recip();
        -kappa * kappa * sech * sech
    }
}
