//! Spherical Bessel-type functions in the sign convention used throughout the crate.
//!
//! The irregular function is `n_l(x) ~ cos(x - l pi/2) / x` at large `x`, i.e. the
//! negative of the common `y_l`. Hankel-type functions are `h1 = n + i j` and
//! `h2 = n - i j`, so that `h1_0(x) = exp(ix)/x`.

use num_complex::Complex;

use crate::error::{domain, Result, ZrpError};
use crate::scalar::Real;

/// Largest supported angular momentum.
pub const MAX_L: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SphericalKind {
    /// Regular solution `j_l`.
    J,
    /// Irregular solution `n_l = -y_l`.
    N,
    /// Outgoing `n_l + i j_l`.
    H1,
    /// Incoming `n_l - i j_l`.
    H2,
}

impl SphericalKind {
    pub fn is_regular(self) -> bool {
        self == SphericalKind::J
    }
}

fn check_l(l: usize) -> Result<()> {
    if l > MAX_L {
        return domain(format!("angular momentum l = {l} exceeds supported maximum {MAX_L}"));
    }
    Ok(())
}

/// Evaluates `kind` of order `l` at a (possibly complex) argument.
pub fn spherical<T: Real>(kind: SphericalKind, l: usize, z: Complex<T>) -> Result<Complex<T>> {
    check_l(l)?;
    let zero = T::zero();
    if z.re == zero && z.im == zero {
        return match kind {
            SphericalKind::J => Ok(Complex::new(if l == 0 { T::one() } else { zero }, zero)),
            _ => domain(format!("{kind:?} is singular at the origin")),
        };
    }
    if !(z.re.is_finite() && z.im.is_finite()) {
        return domain("non-finite argument");
    }
    let i = Complex::new(zero, T::one());
    Ok(match kind {
        SphericalKind::J => j_complex(l, z),
        SphericalKind::N => upward(l, n0(z), n1(z), z),
        SphericalKind::H1 | SphericalKind::H2 => {
            let sign = if kind == SphericalKind::H1 { T::one() } else { -T::one() };
            if z.im == zero {
                // Real axis: combine the accurate real parts so the tiny j_l is not polluted.
                n_complex(l, z) + i * j_complex(l, z) * sign
            } else {
                let e = (i * z * sign).exp();
                let h0 = e / z;
                let h1 = e * (z.inv() * z.inv() - i * z.inv() * sign);
                upward(l, h0, h1, z)
            }
        }
    })
}

/// Real-argument evaluation for the real kinds `J` and `N`.
pub fn spherical_real<T: Real>(kind: SphericalKind, l: usize, x: T) -> Result<T> {
    match kind {
        SphericalKind::J | SphericalKind::N => Ok(spherical(kind, l, Complex::new(x, T::zero()))?.re),
        _ => domain("complex-valued kind requested through the real interface"),
    }
}

pub fn spherical_j<T: Real>(l: usize, x: T) -> Result<T> {
    spherical_real(SphericalKind::J, l, x)
}

pub fn spherical_n<T: Real>(l: usize, x: T) -> Result<T> {
    spherical_real(SphericalKind::N, l, x)
}

/// `|f_(l+1) - (2l+1)/x f_l + f_(l-1)|` relative to the largest of the three terms.
pub fn recurrence_residual<T: Real>(kind: SphericalKind, l: usize, x: T) -> Result<T> {
    if l == 0 || l + 1 > MAX_L {
        return domain(format!("recurrence check needs 1 <= l <= {}", MAX_L - 1));
    }
    let lo = spherical_real(kind, l - 1, x)?;
    let mid = T::from_count(2 * l + 1) / x * spherical_real(kind, l, x)?;
    let hi = spherical_real(kind, l + 1, x)?;
    let scale = lo.abs().max(mid.abs()).max(hi.abs());
    Ok((hi - mid + lo).abs() / scale)
}

/// Value and first derivative `(f_l(z), f_l'(z))`.
pub fn spherical_with_derivative<T: Real>(
    kind: SphericalKind,
    l: usize,
    z: Complex<T>,
) -> Result<(Complex<T>, Complex<T>)> {
    let f = spherical(kind, l, z)?;
    let df = if l == 0 {
        -spherical(kind, 1, z)?
    } else if kind == SphericalKind::J && z.norm() == T::zero() {
        // j_l'(0) is 1/3 for l = 1 and 0 otherwise.
        let v = if l == 1 { T::one() / T::lit(3.0) } else { T::zero() };
        Complex::new(v, T::zero())
    } else {
        spherical(kind, l - 1, z)? - f * T::from_count(l + 1) / z
    };
    Ok((f, df))
}

fn n0<T: Real>(z: Complex<T>) -> Complex<T> {
    z.cos() / z
}

fn n1<T: Real>(z: Complex<T>) -> Complex<T> {
    z.cos() / (z * z) + z.sin() / z
}

fn upward<T: Real>(l: usize, f0: Complex<T>, f1: Complex<T>, z: Complex<T>) -> Complex<T> {
    if l == 0 {
        return f0;
    }
    let (mut prev, mut cur) = (f0, f1);
    for m in 1..l {
        let next = cur * T::from_count(2 * m + 1) / z - prev;
        prev = cur;
        cur = next;
    }
    cur
}

fn n_complex<T: Real>(l: usize, z: Complex<T>) -> Complex<T> {
    upward(l, n0(z), n1(z), z)
}

fn j_complex<T: Real>(l: usize, z: Complex<T>) -> Complex<T> {
    let threshold = T::from_count(l.max(1));
    if z.norm() <= threshold {
        return j_by_series(l, z);
    }
    let j0 = z.sin() / z;
    let j1 = z.sin() / (z * z) - z.cos() / z;
    upward(l, j0, j1, z)
}

/// Power series `j_l(z) = z^l/(2l+1)!! * sum_s (-z^2/2)^s / (s! (2l+3)...(2l+2s+1))`.
fn j_by_series<T: Real>(l: usize, z: Complex<T>) -> Complex<T> {
    let lead = z.powu(l as u32) / T::lit(odd_double_factorial_f64(2 * l as i64 + 1));
    let w = -(z * z) / T::lit(2.0);
    let mut term = Complex::new(T::one(), T::zero());
    let mut sum = term;
    for s in 1..200usize {
        term = term * w / (T::from_count(s) * T::from_count(2 * l + 2 * s + 1));
        sum = sum + term;
        if term.norm() <= T::epsilon() * sum.norm() * T::lit(0.25) {
            break;
        }
    }
    lead * sum
}

fn odd_double_factorial_f64(m: i64) -> f64 {
    let mut acc = 1.0;
    let mut k = m;
    while k > 1 {
        acc *= k as f64;
        k -= 2;
    }
    acc
}

/// `m!!` for odd `m >= -1`, with `(-1)!! = 1`.
pub fn double_factorial(m: i64) -> Result<u64> {
    if m < -1 || m % 2 == 0 {
        return domain(format!("double factorial defined here for odd m >= -1, got {m}"));
    }
    let mut acc: u64 = 1;
    let mut k = m;
    while k > 1 {
        acc = acc
            .checked_mul(k as u64)
            .ok_or_else(|| ZrpError::Domain(format!("{m}!! overflows u64")))?;
        k -= 2;
    }
    Ok(acc)
}

/// `prod_m (kappa_m - z)`: the Vandermonde ratio `Delta(z, kappas) / Delta(kappas)`.
pub fn vandermonde_ratio<T: Real>(z: Complex<T>, kappas: &[Complex<T>]) -> Complex<T> {
    kappas
        .iter()
        .fold(Complex::new(T::one(), T::zero()), |acc, &k| acc * (k - z))
}

/// Laurent coefficients of `kind` (J or N) in powers of `x`.
///
/// Returns `(lowest_power, coeffs)` with `f_l(x) = sum_i coeffs[i] x^(lowest_power + i)`,
/// dense in consecutive powers and truncated after `terms` nonzero contributions.
pub fn series_coefficients<T: Real>(
    kind: SphericalKind,
    l: usize,
    terms: usize,
) -> Result<(i32, Vec<T>)> {
    check_l(l)?;
    let li = l as i64;
    let (lowest, lead, factor): (i32, f64, Box<dyn Fn(usize) -> f64>) = match kind {
        SphericalKind::J => (
            l as i32,
            1.0 / odd_double_factorial_f64(2 * li + 1),
            Box::new(move |s| (2 * li + 2 * s as i64 + 1) as f64),
        ),
        SphericalKind::N => (
            -(l as i32) - 1,
            odd_double_factorial_f64(2 * li - 1),
            Box::new(move |s| (2 * s as i64 - 1 - 2 * li) as f64),
        ),
        _ => return domain("series available for J and N only"),
    };
    let mut coeffs = vec![T::zero(); 2 * terms.max(1) - 1];
    let mut c = lead;
    for s in 0..terms {
        if s > 0 {
            c *= -0.5 / (s as f64 * factor(s));
        }
        coeffs[2 * s] = T::lit(c);
    }
    Ok((lowest, coeffs))
}
