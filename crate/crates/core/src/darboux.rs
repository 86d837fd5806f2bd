//! Darboux dressing of zero-range potentials.
//!
//! A prop function `phi` solving the free radial equation defines `s = phi'/phi`; the
//! transform `psi -> psi' - s psi` maps solutions onto solutions of the dressed problem
//! with potential `u + 1/r^2 - s'`. Chains of transforms add S-matrix poles, which for
//! real `kappa_m` shifts the phase by `-sum atan(k/kappa_m)`.

use num_complex::Complex;

use crate::error::{domain, Result, ZrpError};
use crate::gzrp::{gzrp_phase, GzrpChannel, PhaseShift};
use crate::linalg::det_complex;
use crate::scalar::Real;
use crate::specfun::{spherical_with_derivative, SphericalKind, MAX_L};

/// A real function of the radius with a first derivative.
pub trait RadialFn<T: Real> {
    fn value(&self, r: T) -> T;

    /// Defaults to a 5-point central stencil with `h = 1e-4 r`.
    fn derivative(&self, r: T) -> T {
        five_point_derivative(|x| self.value(x), r)
    }
}

/// 5-point central difference with step `1e-4 * r` (or `1e-4` at the origin).
pub fn five_point_derivative<T: Real, F: Fn(T) -> T>(f: F, r: T) -> T {
    let h = if r == T::zero() { T::lit(1e-4) } else { T::lit(1e-4) * r.abs() };
    let two = T::lit(2.0);
    let eight = T::lit(8.0);
    (f(r - two * h) - eight * f(r - h) + eight * f(r + h) - f(r + two * h)) / (T::lit(12.0) * h)
}

/// Radial function known only through its values.
pub struct Numeric<F>(pub F);

impl<T: Real, F: Fn(T) -> T> RadialFn<T> for Numeric<F> {
    fn value(&self, r: T) -> T {
        (self.0)(r)
    }
}

/// Radial function with an analytic derivative.
pub struct Analytic<F, G> {
    pub value: F,
    pub derivative: G,
}

impl<T: Real, F: Fn(T) -> T, G: Fn(T) -> T> RadialFn<T> for Analytic<F, G> {
    fn value(&self, r: T) -> T {
        (self.value)(r)
    }
    fn derivative(&self, r: T) -> T {
        (self.derivative)(r)
    }
}

/// Auxiliary solution of the free radial equation used to build the transform.
#[derive(Clone, Debug, PartialEq)]
pub enum PropFunction<T> {
    /// `h1_l(kappa r)` with complex `kappa`; the GZRP-generating family.
    HankelOfKappa { l: usize, kappa: Complex<T> },
    /// `cosh(kappa r) / r`, an s-wave solution at `E = -kappa^2/2`.
    CoshOverR { kappa: T },
    /// `exp(rate r) / r`; `rate = +alpha` or `-alpha`.
    ExpOverR { rate: T },
    /// `C n_l(i kappa r) + C1 j_l(i kappa r)`, each term phase-normalized so the prop is
    /// real for real `C`, `C1`, `kappa` (`l = 0`, `C = 1`, `C1 = 0` is `cosh(kappa r)/r`).
    /// Nonzero `C1` gives phase-equivalent deformations; those are sampleable only.
    GeneralLc { l: usize, kappa: T, c: T, c1: T },
}

impl<T: Real> PropFunction<T> {
    pub fn l(&self) -> usize {
        match *self {
            PropFunction::HankelOfKappa { l, .. } | PropFunction::GeneralLc { l, .. } => l,
            _ => 0,
        }
    }

    /// `q^2` such that `(r phi)'' = (l(l+1)/r^2 - q^2) (r phi)`; the energy is `q^2/2`.
    pub fn wavenumber_sq(&self) -> Complex<T> {
        match *self {
            PropFunction::HankelOfKappa { kappa, .. } => kappa * kappa,
            PropFunction::CoshOverR { kappa } => Complex::new(-kappa * kappa, T::zero()),
            PropFunction::ExpOverR { rate } => Complex::new(-rate * rate, T::zero()),
            PropFunction::GeneralLc { kappa, .. } => Complex::new(-kappa * kappa, T::zero()),
        }
    }

    pub fn energy(&self) -> Complex<T> {
        self.wavenumber_sq() / T::lit(2.0)
    }

    pub fn is_real(&self) -> bool {
        !matches!(self, PropFunction::HankelOfKappa { .. })
    }

    pub fn is_experimental(&self) -> bool {
        matches!(self, PropFunction::GeneralLc { c1, .. } if *c1 != T::zero())
    }

    fn validate(&self) -> Result<()> {
        if self.l() > MAX_L {
            return domain(format!("prop angular momentum {} exceeds {MAX_L}", self.l()));
        }
        Ok(())
    }

    /// `(phi(r), phi'(r))`.
    pub fn value_and_derivative(&self, r: T) -> Result<(Complex<T>, Complex<T>)> {
        self.validate()?;
        if !(r > T::zero()) {
            return Err(ZrpError::Pole { r: r.to_f64_lossy() });
        }
        let re = |x: T| Complex::new(x, T::zero());
        Ok(match *self {
            PropFunction::CoshOverR { kappa } => {
                let (ch, sh) = ((kappa * r).cosh(), (kappa * r).sinh());
                (re(ch / r), re((kappa * sh * r - ch) / (r * r)))
            }
            PropFunction::ExpOverR { rate } => {
                let e = (rate * r).exp();
                (re(e / r), re(e * (rate * r - T::one()) / (r * r)))
            }
            PropFunction::HankelOfKappa { l, kappa } => {
                let (f, df) = spherical_with_derivative(SphericalKind::H1, l, kappa * r)?;
                (f, df * kappa)
            }
            PropFunction::GeneralLc { l, kappa, c, c1 } => {
                let q = Complex::new(T::zero(), kappa);
                let z = q * r;
                let i = Complex::new(T::zero(), T::one());
                let mut val = Complex::new(T::zero(), T::zero());
                let mut der = val;
                if c != T::zero() {
                    let (f, df) = spherical_with_derivative(SphericalKind::N, l, z)?;
                    let phase = i.powu(l as u32 + 1);
                    val = val + phase * f * c;
                    der = der + phase * df * q * c;
                }
                if c1 != T::zero() {
                    let (f, df) = spherical_with_derivative(SphericalKind::J, l, z)?;
                    let phase = i.powu(l as u32).inv();
                    val = val + phase * f * c1;
                    der = der + phase * df * q * c1;
                }
                (re(val.re), re(der.re))
            }
        })
    }

    pub fn value(&self, r: T) -> Result<Complex<T>> {
        Ok(self.value_and_derivative(r)?.0)
    }

    /// Derivatives `g, g', ..., g^(order)` of `g = r phi` at `r`.
    pub fn rphi_derivatives(&self, r: T, order: usize) -> Result<Vec<Complex<T>>> {
        let (phi, dphi) = self.value_and_derivative(r)?;
        let mut g = vec![phi * r];
        if order >= 1 {
            g.push(phi + dphi * r);
        }
        let ll = T::from_count(self.l() * (self.l() + 1));
        let q2 = self.wavenumber_sq();
        // V^(j) for V = l(l+1)/r^2 - q^2
        let v_deriv = |j: usize| -> Complex<T> {
            let fact: f64 = (1..=j + 1).map(|i| i as f64).product();
            let sign = if j.is_multiple_of(2) { T::one() } else { -T::one() };
            let base = Complex::new(sign * ll * T::lit(fact) / r.powi(j as i32 + 2), T::zero());
            if j == 0 {
                base - q2
            } else {
                base
            }
        };
        for n in 0..order.saturating_sub(1) {
            let mut acc = Complex::new(T::zero(), T::zero());
            let mut binom = 1.0f64;
            for j in 0..=n {
                if j > 0 {
                    binom = binom * (n - j + 1) as f64 / j as f64;
                }
                acc = acc + v_deriv(j) * g[n - j] * T::lit(binom);
            }
            g.push(acc);
        }
        Ok(g)
    }
}

/// `s = (ln phi)'` for a prop function.
pub struct LogDerivative<'a, T> {
    prop: &'a PropFunction<T>,
}

pub fn log_derivative_s<T: Real>(prop: &PropFunction<T>) -> LogDerivative<'_, T> {
    LogDerivative { prop }
}

impl<T: Real> LogDerivative<'_, T> {
    pub fn prop(&self) -> &PropFunction<T> {
        self.prop
    }

    /// Complex-valued `s(r)`; errors where the prop vanishes.
    pub fn eval_complex(&self, r: T) -> Result<Complex<T>> {
        match *self.prop {
            PropFunction::CoshOverR { kappa } if r > T::zero() => {
                return Ok(Complex::new(kappa * (kappa * r).tanh() - r.recip(), T::zero()));
            }
            PropFunction::ExpOverR { rate } if r > T::zero() => {
                return Ok(Complex::new(rate - r.recip(), T::zero()));
            }
            _ => {}
        }
        let (phi, dphi) = self.prop.value_and_derivative(r)?;
        let s = dphi / phi;
        if phi.norm() == T::zero() || !(s.re.is_finite() && s.im.is_finite()) {
            return Err(ZrpError::Pole { r: r.to_f64_lossy() });
        }
        Ok(s)
    }

    pub fn eval(&self, r: T) -> Result<T> {
        Ok(self.eval_complex(r)?.re)
    }

    /// `s'(r)`: closed form for cosh/exp props, otherwise from the radial equation.
    pub fn eval_derivative_complex(&self, r: T) -> Result<Complex<T>> {
        match *self.prop {
            PropFunction::CoshOverR { kappa } if r > T::zero() => {
                let sech = (kappa * r).cosh().recip();
                return Ok(Complex::new(kappa * kappa * sech * sech + (r * r).recip(), T::zero()));
            }
            PropFunction::ExpOverR { .. } if r > T::zero() => {
                return Ok(Complex::new((r * r).recip(), T::zero()));
            }
            _ => {}
        }
        let s = self.eval_complex(r)?;
        let l = self.prop.l();
        let ll = T::from_count(l * (l + 1)) / (r * r);
        Ok(-s * (T::lit(2.0) / r) + Complex::new(ll, T::zero()) - self.prop.wavenumber_sq() - s * s)
    }

    /// Samples `s` on a grid, rejecting sign changes of a real prop between nodes.
    pub fn sample(&self, grid: &RadialGrid<T>) -> Result<Vec<T>> {
        check_no_zero_crossing(self.prop, grid)?;
        grid.points().iter().map(|&r| self.eval(r)).collect()
    }
}

impl<T: Real> RadialFn<T> for LogDerivative<'_, T> {
    fn value(&self, r: T) -> T {
        self.eval(r).unwrap_or_else(|_| T::nan())
    }
    fn derivative(&self, r: T) -> T {
        self.eval_derivative_complex(r).map(|c| c.re).unwrap_or_else(|_| T::nan())
    }
}

fn check_no_zero_crossing<T: Real>(prop: &PropFunction<T>, grid: &RadialGrid<T>) -> Result<()> {
    if !prop.is_real() {
        return Ok(());
    }
    let mut prev: Option<(T, T)> = None;
    for &r in grid.points() {
        let v = prop.value(r)?.re;
        if v == T::zero() {
            return Err(ZrpError::Pole { r: r.to_f64_lossy() });
        }
        if let Some((rp, vp)) = prev {
            if (vp > T::zero()) != (v > T::zero()) {
                let mid = (rp + r) / T::lit(2.0);
                return Err(ZrpError::Pole { r: mid.to_f64_lossy() });
            }
        }
        prev = Some((r, v));
    }
    Ok(())
}

/// Strictly increasing radial sample points with `r_0 > 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialGrid<T> {
    points: Vec<T>,
}

impl<T: Real> RadialGrid<T> {
    pub fn new(points: Vec<T>) -> Result<Self> {
        if points.is_empty() {
            return domain("radial grid is empty");
        }
        if !(points[0] > T::zero()) {
            return domain("radial grid must start at r > 0");
        }
        if points.windows(2).any(|w| !(w[1] > w[0])) {
            return domain("radial grid must be strictly increasing");
        }
        Ok(Self { points })
    }

    /// `n` evenly spaced points from `r_start` to `r_end` inclusive.
    pub fn uniform(r_start: T, r_end: T, n: usize) -> Result<Self> {
        if n < 2 {
            return domain("uniform grid needs at least two points");
        }
        let step = (r_end - r_start) / T::from_count(n - 1);
        Self::new((0..n).map(|i| r_start + step * T::from_count(i)).collect())
    }

    pub fn points(&self) -> &[T] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Dressed function `psi' - s psi`.
pub struct Dressed<'a, P: ?Sized, S: ?Sized> {
    psi: &'a P,
    s: &'a S,
}

pub fn dt_apply<'a, T: Real, P: RadialFn<T> + ?Sized, S: RadialFn<T> + ?Sized>(
    psi: &'a P,
    s: &'a S,
) -> Dressed<'a, P, S> {
    Dressed { psi, s }
}

impl<T: Real, P: RadialFn<T> + ?Sized, S: RadialFn<T> + ?Sized> RadialFn<T> for Dressed<'_, P, S> {
    fn value(&self, r: T) -> T {
        self.psi.derivative(r) - self.s.value(r) * self.psi.value(r)
    }
}

/// Pointwise `dpsi - s psi` over samples on a common grid.
pub fn dt_apply_sampled<T: Real>(psi: &[T], dpsi: &[T], s: &[T]) -> Result<Vec<T>> {
    if psi.len() != dpsi.len() || psi.len() != s.len() {
        return domain(format!(
            "grid mismatch: psi {} / psi' {} / s {} samples",
            psi.len(),
            dpsi.len(),
            s.len()
        ));
    }
    Ok(psi.iter().zip(dpsi).zip(s).map(|((&p, &dp), &sv)| dp - sv * p).collect())
}

/// Dressed potential `u^(1) = 1/r^2 - s'` on a grid, starting from a zero-range seed.
pub fn dressed_potential<T: Real>(prop: &PropFunction<T>, l: usize, grid: &RadialGrid<T>) -> Result<Vec<T>> {
    if prop.l() != l {
        return domain(format!("prop solves the l = {} equation, not l = {l}", prop.l()));
    }
    if !prop.is_real() {
        return domain("complex prop functions give complex potentials");
    }
    check_no_zero_crossing(prop, grid)?;
    let s = log_derivative_s(prop);
    grid.points()
        .iter()
        .map(|&r| {
            if let PropFunction::CoshOverR { kappa } = *prop {
                let sech = (kappa * r).cosh().recip();
                return Ok(-kappa * kappa * sech * sech);
            }
            if let PropFunction::ExpOverR { .. } = *prop {
                return Ok(T::zero());
            }
            Ok((r * r).recip() - s.eval_derivative_complex(r)?.re)
        })
        .collect()
}

/// Ordered chain of real dressing parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct DressingChain<T> {
    kappas: Vec<T>,
    core_flags: Vec<bool>,
}

impl<T: Real> DressingChain<T> {
    pub fn new(kappas: Vec<T>, core_flags: Vec<bool>) -> Result<Self> {
        if kappas.len() != core_flags.len() {
            return domain("one core flag per dressing parameter");
        }
        for (i, &k) in kappas.iter().enumerate() {
            if k == T::zero() || !k.is_finite() {
                return domain(format!("dressing parameter kappa_{i} must be finite and nonzero"));
            }
            if kappas[..i].contains(&k) {
                return domain(format!("dressing parameters must be distinct (kappa = {k} repeats)"));
            }
        }
        Ok(Self { kappas, core_flags })
    }

    /// Chain whose props all have `C = 1`.
    pub fn from_kappas(kappas: Vec<T>) -> Result<Self> {
        let flags = vec![true; kappas.len()];
        Self::new(kappas, flags)
    }

    pub fn empty() -> Self {
        Self {
            kappas: Vec::new(),
            core_flags: Vec::new(),
        }
    }

    pub fn kappas(&self) -> &[T] {
        &self.kappas
    }

    pub fn core_flags(&self) -> &[bool] {
        &self.core_flags
    }

    pub fn len(&self) -> usize {
        self.kappas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kappas.is_empty()
    }

    /// `-sum_m atan(k / kappa_m)`.
    pub fn phase_correction(&self, k: T) -> T {
        self.kappas.iter().fold(T::zero(), |acc, &kap| acc - (k / kap).atan())
    }
}

/// Phase of a GZRP channel dressed by a chain: `delta_gzrp - sum atan(k/kappa_m)`.
pub fn chain_phase<T: Real>(channel: &GzrpChannel<T>, chain: &DressingChain<T>, k: T) -> Result<PhaseShift<T>> {
    let base = gzrp_phase(channel, k)?;
    Ok(PhaseShift::new(k, base.delta + chain.phase_correction(k)))
}

/// Scattering length after one dressing step, `A + 1/kappa`.
pub fn renormalized_length<T: Real>(a: T, kappa: T) -> Result<T> {
    if kappa == T::zero() {
        return domain("dressing parameter kappa must be nonzero");
    }
    Ok(a + kappa.recip())
}

/// Inner boundary value `(r psi)'/(r psi)` at the origin of the cosh-dressed s-wave ZRP.
pub fn dressed_boundary_logderiv<T: Real>(k: T, kappa: T, alpha: T) -> Result<T> {
    if alpha == T::zero() {
        return domain("alpha must be nonzero");
    }
    Ok((k * k + kappa * kappa) / alpha)
}

/// `max |s' + (2/r) s + s^2 - l(l+1)/r^2 - K0|` over the grid.
pub fn riccati_residual<T: Real, S: RadialFn<T> + ?Sized>(s: &S, l: usize, k0: T, grid: &RadialGrid<T>) -> T {
    let ll = T::from_count(l * (l + 1));
    grid.points().iter().fold(T::zero(), |worst, &r| {
        let sv = s.value(r);
        let res = (s.derivative(r) + T::lit(2.0) * sv / r + sv * sv - ll / (r * r) - k0).abs();
        if res.is_nan() {
            T::nan()
        } else {
            worst.max(res)
        }
    })
}

/// Wronskian of `{r phi_1, ..., r phi_N}` at `r`.
pub fn crum_wronskian<T: Real>(props: &[PropFunction<T>], r: T) -> Result<Complex<T>> {
    let n = props.len();
    if n == 0 || n > 7 {
        return domain(format!("Wronskian supports 1 to 7 props, got {n}"));
    }
    let columns = props
        .iter()
        .map(|p| p.rphi_derivatives(r, n - 1))
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<Vec<Complex<T>>> = (0..n).map(|i| columns.iter().map(|c| c[i]).collect()).collect();
    let w = det_complex(rows);
    if !(w.re.is_finite() && w.im.is_finite()) {
        return Err(ZrpError::Pole { r: r.to_f64_lossy() });
    }
    Ok(w)
}

/// The `2l+1` props `h1_l(kappa_m r)` generating a GZRP channel.
pub fn gzrp_props<T: Real>(channel: &GzrpChannel<T>) -> Vec<PropFunction<T>> {
    channel
        .kappas()
        .iter()
        .map(|&kappa| PropFunction::HankelOfKappa { l: channel.l(), kappa })
        .collect()
}

/// Writes potential samples as CSV: `r`, the reduced potential `u` (entering
/// `-chi'' + u chi = k^2 chi`) and the potential energy `V = u/2` in hartree.
pub fn write_potential_csv<W: std::io::Write, T: Real>(out: W, grid: &RadialGrid<T>, u: &[T]) -> Result<()> {
    if u.len() != grid.len() {
        return domain("potential samples do not match grid");
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["r_a0", "u_a0^-2", "V_hartree"])?;
    for (&r, &v) in grid.points().iter().zip(u) {
        let v = v.to_f64_lossy();
        w.write_record([crate::io::fmt_sig(r.to_f64_lossy()), crate::io::fmt_sig(v), crate::io::fmt_sig(0.5 * v)])?;
    }
    w.flush()?;
    Ok(())
}
