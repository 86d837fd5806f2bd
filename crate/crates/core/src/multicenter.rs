//! Point-scatterer clusters: `X_n` (n identical equidistant centers) and `YX_n`
//! (the same plus one distinct center at distance `D` from each `X`).
//!
//! Every center is an s-wave zero-range scatterer with boundary parameter `a`
//! (its scattering length). Channel phases come from closed forms; the
//! [`determinant_oracle`] solves the full boundary-condition matrix instead and is
//! used to check them.

use std::io::Write;

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Result, ZrpError};
use crate::io::fmt_sig;
use crate::scalar::{ev_from_k, reduce_mod_pi, unwrap_mod_pi, Real, BOHR2_IN_ANGSTROM2};

/// Largest cluster size with an equidistant embedding in three dimensions.
pub const MAX_CENTERS: usize = 4;

/// Relative tolerance of the `n = 4` condition `R = 2 sqrt(2/3) D`.
pub const TETRAHEDRON_TOLERANCE: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct XnGeometry<T> {
    pub n: usize,
    /// X–X distance.
    pub r: T,
    /// Boundary parameter of each X.
    pub a: T,
}

impl<T: Real> XnGeometry<T> {
    pub fn new(n: usize, r: T, a: T) -> Result<Self> {
        if n == 0 || n > MAX_CENTERS {
            return domain(format!("X_n needs 1 <= n <= {MAX_CENTERS}, got {n}"));
        }
        if !(r > T::zero()) || !r.is_finite() || !a.is_finite() {
            return domain("X_n needs R > 0 and a finite boundary parameter");
        }
        Ok(Self { n, r, a })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct YxnGeometry<T> {
    pub n: usize,
    /// Y–X distance.
    pub d: T,
    /// X–X distance.
    pub r: T,
    pub a_x: T,
    pub a_y: T,
}

impl<T: Real> YxnGeometry<T> {
    /// Accepts `n` in 2..=4. A violated tetrahedral constraint at `n = 4` is
    /// reported by [`YxnGeometry::constraint_warning`], not rejected.
    pub fn new(n: usize, d: T, r: T, a_x: T, a_y: T) -> Result<Self> {
        if !(2..=MAX_CENTERS).contains(&n) {
            return domain(format!("YX_n needs 2 <= n <= {MAX_CENTERS}, got {n}"));
        }
        if !(d > T::zero()) || !(r > T::zero()) || !d.is_finite() || !r.is_finite() {
            return domain("YX_n needs D > 0 and R > 0");
        }
        if !a_x.is_finite() || !a_y.is_finite() {
            return domain("boundary parameters must be finite");
        }
        Ok(Self { n, d, r, a_x, a_y })
    }

    /// The `X_n` sub-cluster.
    pub fn xn(&self) -> XnGeometry<T> {
        XnGeometry { n: self.n, r: self.r, a: self.a_x }
    }

    /// Relative deviation from `R = 2 sqrt(2/3) D`; only meaningful for `n = 4`.
    pub fn tetrahedral_deviation(&self) -> T {
        let ideal = T::lit(2.0) * (T::lit(2.0) / T::lit(3.0)).sqrt() * self.d;
        ((self.r - ideal) / self.r).abs()
    }

    pub fn constraint_warning(&self) -> Option<String> {
        if self.n == 4 && self.tetrahedral_deviation() > T::lit(TETRAHEDRON_TOLERANCE) {
            Some(format!(
                "YX_4 with R = {} and D = {} violates R = 2 sqrt(2/3) D (relative deviation {:.3e}); Y cannot sit at the centroid",
                self.r,
                self.d,
                self.tetrahedral_deviation().to_f64_lossy()
            ))
        } else {
            None
        }
    }
}

/// Circumradius of the X polygon/polyhedron with edge `R`.
fn circumradius(n: usize, r: f64) -> f64 {
    match n {
        1 => 0.0,
        2 => r / 2.0,
        3 => r / 3f64.sqrt(),
        _ => r * (3.0f64 / 8.0).sqrt(),
    }
}

/// Explicit X positions: segment, equilateral triangle, regular tetrahedron, all
/// centered on the origin; the symmetry axis is `z`.
pub fn xn_positions(n: usize, r: f64) -> Vec<[f64; 3]> {
    match n {
        1 => vec![[0.0; 3]],
        2 => vec![[-r / 2.0, 0.0, 0.0], [r / 2.0, 0.0, 0.0]],
        3 => {
            let rc = circumradius(3, r);
            (0..3)
                .map(|m| {
                    let phi = 2.0 * std::f64::consts::PI * m as f64 / 3.0;
                    [rc * phi.cos(), rc * phi.sin(), 0.0]
                })
                .collect()
        }
        _ => {
            let s = r / (2.0 * 2f64.sqrt());
            vec![[s, s, s], [s, -s, -s], [-s, s, -s], [-s, -s, s]]
        }
    }
}

/// Explicit positions for `YX_n`, Y last, on the symmetry axis. `None` when no
/// point is at distance `D` from every X.
pub fn yxn_positions(n: usize, d: f64, r: f64) -> Option<Vec<[f64; 3]>> {
    let rc = circumradius(n, r);
    let mut pos = xn_positions(n, r);
    if n == 4 {
        if ((d - rc) / d).abs() > TETRAHEDRON_TOLERANCE {
            return None;
        }
        pos.push([0.0; 3]);
    } else {
        if d < rc {
            return None;
        }
        pos.push([0.0, 0.0, (d * d - rc * rc).sqrt()]);
    }
    Some(pos)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct XnPhases<T> {
    pub k: T,
    /// Fully symmetric channel.
    pub delta0: T,
    /// Channel of degeneracy `n - 1`.
    pub delta1: T,
}

fn check_k<T: Real>(k: T) -> Result<()> {
    if k > T::zero() && k.is_finite() {
        Ok(())
    } else {
        domain("momentum must be positive and finite")
    }
}

/// Channel phases of `X_n`, each in (-pi/2, pi/2].
pub fn xn_phases<T: Real>(geom: &XnGeometry<T>, k: T) -> Result<XnPhases<T>> {
    check_k(k)?;
    let (n1, r, a) = (T::from_count(geom.n - 1), geom.r, geom.a);
    let (s, c) = (k * r).sin_cos();
    let delta0 = (-a * (k * r + n1 * s)).atan2(r + n1 * a * c);
    let delta1 = (-a * (k * r - s)).atan2(r - a * c);
    Ok(XnPhases { k, delta0: reduce_mod_pi(delta0), delta1: reduce_mod_pi(delta1) })
}

/// `(p + (n-1) q)(p - q)^(n-1)` with `p = a k R + R t`, `q = a (sin kR + t cos kR)`:
/// the factored boundary-condition determinant at `t = tan delta`.
pub fn xn_compatibility_residual<T: Real>(geom: &XnGeometry<T>, k: T, t: T) -> T {
    let (r, a) = (geom.r, geom.a);
    let (s, c) = (k * r).sin_cos();
    let p = a * k * r + r * t;
    let q = a * (s + t * c);
    (p + T::from_count(geom.n - 1) * q) * (p - q).powi(geom.n as i32 - 1)
}

/// `A = n a R / (R + (n-1) a)`.
pub fn xn_scattering_length<T: Real>(geom: &XnGeometry<T>) -> Result<T> {
    let n = T::from_count(geom.n);
    let den = geom.r + T::from_count(geom.n - 1) * geom.a;
    if den.abs() <= T::epsilon() * (geom.r.abs() + (n * geom.a).abs()) {
        return Err(ZrpError::DivergentLength { denominator: den.to_f64_lossy() });
    }
    Ok(n * geom.a * geom.r / den)
}

/// Coefficients `(A2, A1, A0)` of the quadratic in `t = tan delta` for the two
/// non-degenerate `YX_n` channels.
pub fn eta12_coefficients<T: Real>(geom: &YxnGeometry<T>, k: T) -> (T, T, T) {
    let n = T::from_count(geom.n);
    let n1 = T::from_count(geom.n - 1);
    let (ax, ay, r, d) = (geom.a_x, geom.a_y, geom.r, geom.d);
    let (sr, cr) = (k * r).sin_cos();
    let (sd, cd) = (k * d).sin_cos();
    let beta = T::one() + ax * n1 * cr / r;
    let gamma = ax * k + ax * n1 * sr / r;
    let u = sd / d;
    let v = cd / d;
    let two = T::lit(2.0);
    let a2 = beta - n * ax * ay * v * v;
    let a1 = gamma + ay * k * beta - two * n * ax * ay * u * v;
    let a0 = ay * k * gamma - n * ax * ay * u * u;
    (a2, a1, a0)
}

/// The two roots of the `YX_n` quadratic as phases in (-pi/2, pi/2], unordered.
pub fn yxn_roots<T: Real>(geom: &YxnGeometry<T>, k: T) -> Result<[T; 2]> {
    check_k(k)?;
    let (a2, a1, a0) = eta12_coefficients(geom, k);
    let disc = a1 * a1 - T::lit(4.0) * a2 * a0;
    let scale = a1 * a1 + (a2 * a0).abs();
    if disc < -T::lit(64.0) * T::epsilon() * scale {
        return Err(ZrpError::ComplexRoots { k: k.to_f64_lossy(), discriminant: disc.to_f64_lossy() });
    }
    let root = disc.max(T::zero()).sqrt();
    let sign = if a1 < T::zero() { -T::one() } else { T::one() };
    let q = -(a1 + sign * root) / T::lit(2.0);
    if q == T::zero() {
        if a2 == T::zero() {
            return domain("degenerate quadratic: every tan(delta) solves the low channels");
        }
        // a1 = 0 and disc = 0, hence a0 = 0: double root t = 0
        return Ok([T::zero(), T::zero()]);
    }
    Ok([reduce_mod_pi(q.atan2(a2)), reduce_mod_pi(a0.atan2(q))])
}

/// `A = D[(a_y + n a_x) R D + a_x a_y ((n-1) D - 2 n R)] / [(R + (n-1) a_x) D^2 - n a_x a_y R]`.
pub fn yxn_scattering_length<T: Real>(geom: &YxnGeometry<T>) -> Result<T> {
    let n = T::from_count(geom.n);
    let n1 = T::from_count(geom.n - 1);
    let (ax, ay, r, d) = (geom.a_x, geom.a_y, geom.r, geom.d);
    let num = d * ((ay + n * ax) * r * d + ax * ay * (n1 * d - T::lit(2.0) * n * r));
    let left = (r + n1 * ax) * d * d;
    let right = n * ax * ay * r;
    let den = left - right;
    if den.abs() <= T::lit(16.0) * T::epsilon() * (left.abs() + right.abs()) {
        return Err(ZrpError::DivergentLength { denominator: den.to_f64_lossy() });
    }
    Ok(num / den)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct YxnPhases<T> {
    pub k: T,
    /// Branch with scattering length `A_YXn`.
    pub delta0: T,
    /// Branch with vanishing low-energy slope.
    pub delta1: T,
    /// Channel of degeneracy `n - 1`.
    pub delta2: T,
}

/// Continuation step for the low-channel labels.
fn continuation_step<T: Real>(geom: &YxnGeometry<T>) -> T {
    (T::lit(0.05) / geom.r.max(geom.d)).min(T::lit(1e-3))
}

/// Tracks the two low-channel branches in `k`, pairing new roots with a linear
/// prediction modulo pi.
struct BranchTracker<'g, T> {
    geom: &'g YxnGeometry<T>,
    k: T,
    delta: [T; 2],
    slope: [T; 2],
}

impl<'g, T: Real> BranchTracker<'g, T> {
    fn start(geom: &'g YxnGeometry<T>) -> Result<Self> {
        // deep in the threshold region the A_YXn branch has the larger |tan delta|
        let k = continuation_step(geom) * T::lit(1e-3);
        let [x, y] = yxn_roots(geom, k)?;
        let delta = if x.abs() >= y.abs() { [x, y] } else { [y, x] };
        let slope = [delta[0] / k, delta[1] / k];
        Ok(Self { geom, k, delta, slope })
    }

    fn advance_to(&mut self, target: T) -> Result<()> {
        let h = continuation_step(self.geom);
        while self.k < target {
            let next = (self.k + h).min(target);
            let dk = next - self.k;
            let pred = [self.delta[0] + self.slope[0] * dk, self.delta[1] + self.slope[1] * dk];
            let [x, y] = yxn_roots(self.geom, next)?;
            let dist = |a: T, b: T| reduce_mod_pi(a - b).abs();
            let pair = if dist(x, pred[0]) + dist(y, pred[1]) <= dist(y, pred[0]) + dist(x, pred[1]) {
                [x, y]
            } else {
                [y, x]
            };
            let new = [pred[0] + reduce_mod_pi(pair[0] - pred[0]), pred[1] + reduce_mod_pi(pair[1] - pred[1])];
            self.slope = [(new[0] - self.delta[0]) / dk, (new[1] - self.delta[1]) / dk];
            self.delta = new;
            self.k = next;
        }
        Ok(())
    }
}

fn yxn_high_channel<T: Real>(geom: &YxnGeometry<T>, k: T) -> Result<T> {
    Ok(xn_phases(&geom.xn(), k)?.delta1)
}

/// Channel phases of `YX_n` at one momentum, each in (-pi/2, pi/2].
///
/// The low channels are labeled by continuation from threshold, so the cost grows
/// linearly with `k`; use [`yxn_phase_scan`] for grids.
pub fn yxn_phases<T: Real>(geom: &YxnGeometry<T>, k: T) -> Result<YxnPhases<T>> {
    check_k(k)?;
    let mut tracker = BranchTracker::start(geom)?;
    tracker.advance_to(k)?;
    Ok(YxnPhases {
        k,
        delta0: reduce_mod_pi(tracker.delta[0]),
        delta1: reduce_mod_pi(tracker.delta[1]),
        delta2: yxn_high_channel(geom, k)?,
    })
}

fn check_grid<T: Real>(ks: &[T]) -> Result<()> {
    if ks.iter().any(|&k| !(k > T::zero()) || !k.is_finite()) {
        return domain("momenta must be positive and finite");
    }
    if ks.windows(2).any(|w| !(w[1] > w[0])) {
        return domain("momentum grid must be strictly increasing");
    }
    Ok(())
}

/// Phases over an increasing momentum grid, unwrapped along the grid.
pub fn yxn_phase_scan<T: Real>(geom: &YxnGeometry<T>, ks: &[T]) -> Result<Vec<YxnPhases<T>>> {
    check_grid(ks)?;
    let mut out = Vec::with_capacity(ks.len());
    if ks.is_empty() {
        return Ok(out);
    }
    let mut tracker = BranchTracker::start(geom)?;
    let mut high = Vec::with_capacity(ks.len());
    for &k in ks {
        tracker.advance_to(k)?;
        high.push(yxn_high_channel(geom, k)?);
        out.push(YxnPhases { k, delta0: tracker.delta[0], delta1: tracker.delta[1], delta2: T::zero() });
    }
    unwrap_mod_pi(&mut high);
    for (p, d) in out.iter_mut().zip(high) {
        p.delta2 = d;
    }
    Ok(out)
}

/// Phases over a momentum grid (evaluated in parallel), unwrapped along the grid.
pub fn xn_phase_scan<T: Real>(geom: &XnGeometry<T>, ks: &[T]) -> Result<Vec<XnPhases<T>>> {
    check_grid(ks)?;
    let mut phases = ks.par_iter().map(|&k| xn_phases(geom, k)).collect::<Result<Vec<_>>>()?;
    let mut d0: Vec<T> = phases.iter().map(|p| p.delta0).collect();
    let mut d1: Vec<T> = phases.iter().map(|p| p.delta1).collect();
    unwrap_mod_pi(&mut d0);
    unwrap_mod_pi(&mut d1);
    for ((p, a), b) in phases.iter_mut().zip(d0).zip(d1) {
        p.delta0 = a;
        p.delta1 = b;
    }
    Ok(phases)
}

/// `4 pi / k^2 sin^2 delta`.
pub fn partial_cross_section<T: Real>(delta: T, k: T) -> T {
    let s = delta.sin();
    T::lit(4.0) * T::PI() / (k * k) * s * s
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrossSections<T> {
    /// Per-channel `sigma_J`, not weighted by degeneracy.
    pub partial: Vec<T>,
    /// `sum_J g_J sigma_J`.
    pub total: T,
}

/// Cross sections from `(delta_J, g_J)` pairs.
pub fn total_cross_section<T: Real>(channels: &[(T, usize)], k: T) -> Result<CrossSections<T>> {
    check_k(k)?;
    let partial: Vec<T> = channels.iter().map(|&(d, _)| partial_cross_section(d, k)).collect();
    let total = channels
        .iter()
        .zip(&partial)
        .fold(T::zero(), |acc, (&(_, g), &s)| acc + T::from_count(g) * s);
    Ok(CrossSections { partial, total })
}

impl<T: Real> XnPhases<T> {
    pub fn channels(&self, n: usize) -> Vec<(T, usize)> {
        vec![(self.delta0, 1), (self.delta1, n - 1)]
    }
}

impl<T: Real> YxnPhases<T> {
    pub fn channels(&self, n: usize) -> Vec<(T, usize)> {
        vec![(self.delta0, 1), (self.delta1, 1), (self.delta2, n - 1)]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrossSectionRow<T> {
    pub e_ev: T,
    pub k: T,
    pub deltas: Vec<T>,
    /// Cross sections in a0^2.
    pub sigmas: Vec<T>,
    pub total: T,
    /// Values of the series' extra columns.
    pub extra: Vec<T>,
}

/// Energy scan of channel phases and cross sections.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrossSectionSeries<T> {
    pub degeneracies: Vec<usize>,
    pub extra_columns: Vec<String>,
    pub rows: Vec<CrossSectionRow<T>>,
    /// Unit tag appended to every cross-section column name: `_a02` or `_A2`.
    pub sigma_unit_suffix: String,
}

impl<T: Real> CrossSectionSeries<T> {
    pub fn new(degeneracies: Vec<usize>) -> Self {
        Self { degeneracies, extra_columns: Vec::new(), rows: Vec::new(), sigma_unit_suffix: "_a02".to_string() }
    }

    /// Appends a row from channel phases; sigmas and total are derived.
    pub fn push(&mut self, k: T, deltas: Vec<T>) -> Result<()> {
        if deltas.len() != self.degeneracies.len() {
            return domain("one phase per channel expected");
        }
        let channels: Vec<(T, usize)> = deltas.iter().copied().zip(self.degeneracies.iter().copied()).collect();
        let cs = total_cross_section(&channels, k)?;
        self.rows.push(CrossSectionRow {
            e_ev: ev_from_k(k),
            k,
            deltas,
            sigmas: cs.partial,
            total: cs.total,
            extra: vec![T::nan(); self.extra_columns.len()],
        });
        Ok(())
    }

    /// Adds a named column; `values` must have one entry per row.
    pub fn add_column(&mut self, name: &str, values: Vec<T>) -> Result<()> {
        if values.len() != self.rows.len() {
            return domain(format!("column {name} has {} values for {} rows", values.len(), self.rows.len()));
        }
        self.extra_columns.push(name.to_string());
        for (row, v) in self.rows.iter_mut().zip(values) {
            row.extra.push(v);
        }
        Ok(())
    }

    pub fn column(&self, name: &str) -> Option<Vec<T>> {
        let i = self.extra_columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r.extra[i]).collect())
    }

    pub fn energies(&self) -> Vec<T> {
        self.rows.iter().map(|r| r.e_ev).collect()
    }

    /// Rescales every cross section (including extra `sigma*` columns) from a0^2 to
    /// square angstrom and tags the column names with `_A2`.
    pub fn convert_to_angstrom2(&mut self) {
        if self.sigma_unit_suffix == "_A2" {
            return;
        }
        let f = T::lit(BOHR2_IN_ANGSTROM2);
        let sigma_cols: Vec<bool> = self.extra_columns.iter().map(|c| c.starts_with("sigma")).collect();
        for row in &mut self.rows {
            row.sigmas.iter_mut().for_each(|s| *s = *s * f);
            row.total = row.total * f;
            for (v, &is_sigma) in row.extra.iter_mut().zip(&sigma_cols) {
                if is_sigma {
                    *v = *v * f;
                }
            }
        }
        self.sigma_unit_suffix = "_A2".to_string();
    }

    pub fn header(&self) -> Vec<String> {
        let m = self.degeneracies.len();
        let u = &self.sigma_unit_suffix;
        let mut h = vec!["E_eV".to_string(), "k_au".to_string()];
        h.extend((0..m).map(|j| format!("delta_{j}_rad")));
        h.extend((0..m).map(|j| format!("sigma_{j}{u}")));
        h.push(format!("sigma_total{u}"));
        h.extend(
            self.extra_columns
                .iter()
                .map(|c| if c.starts_with("sigma") { format!("{c}{u}") } else { c.clone() }),
        );
        h
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(self.header())?;
        for row in &self.rows {
            let mut rec = vec![fmt_sig(row.e_ev.to_f64_lossy()), fmt_sig(row.k.to_f64_lossy())];
            rec.extend(row.deltas.iter().map(|d| fmt_sig(d.to_f64_lossy())));
            rec.extend(row.sigmas.iter().map(|s| fmt_sig(s.to_f64_lossy())));
            rec.push(fmt_sig(row.total.to_f64_lossy()));
            rec.extend(row.extra.iter().map(|x| fmt_sig(x.to_f64_lossy())));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_json<W: Write>(&self, out: W) -> Result<()> {
        serde_json::to_writer_pretty(out, self).map_err(|e| ZrpError::Input(e.to_string()))
    }
}

/// Cross-section series for `X_n` over an increasing momentum grid.
pub fn xn_series<T: Real>(geom: &XnGeometry<T>, ks: &[T]) -> Result<CrossSectionSeries<T>> {
    let mut series = CrossSectionSeries::new(vec![1, geom.n - 1]);
    for p in xn_phase_scan(geom, ks)? {
        series.push(p.k, vec![p.delta0, p.delta1])?;
    }
    Ok(series)
}

/// Cross-section series for `YX_n` over an increasing momentum grid.
pub fn yxn_series<T: Real>(geom: &YxnGeometry<T>, ks: &[T]) -> Result<CrossSectionSeries<T>> {
    let mut series = CrossSectionSeries::new(vec![1, 1, geom.n - 1]);
    for p in yxn_phase_scan(geom, ks)? {
        series.push(p.k, vec![p.delta0, p.delta1, p.delta2])?;
    }
    Ok(series)
}

/// A root of the boundary-condition determinant with its null space.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SymmetryChannel {
    /// `"symmetric"` when the X amplitudes of every null vector are equal, else `"mixed"`.
    pub label: String,
    pub degeneracy: usize,
    /// `tan delta` of the channel.
    pub tan_delta: f64,
    /// Orthonormal null vectors, one amplitude per center (Y last).
    pub coefficients: Vec<Vec<f64>>,
    /// Largest `|lambda| / ||M||` over the null space.
    pub residual: f64,
}

/// Centers for the oracle: boundary parameters and the pairwise distance matrix.
#[derive(Clone, Debug)]
pub struct Cluster {
    pub a: Vec<f64>,
    pub distances: Vec<Vec<f64>>,
    /// Number of leading centers of X type.
    pub n_x: usize,
}

fn distance(p: &[f64; 3], q: &[f64; 3]) -> f64 {
    ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2)).sqrt()
}

fn distance_matrix(pos: &[[f64; 3]]) -> Vec<Vec<f64>> {
    pos.iter().map(|p| pos.iter().map(|q| distance(p, q)).collect()).collect()
}

impl Cluster {
    pub fn from_xn<T: Real>(geom: &XnGeometry<T>) -> Self {
        let r = geom.r.to_f64_lossy();
        Self {
            a: vec![geom.a.to_f64_lossy(); geom.n],
            distances: distance_matrix(&xn_positions(geom.n, r)),
            n_x: geom.n,
        }
    }

    /// Uses explicit coordinates when they reproduce `R` and `D` exactly; otherwise
    /// (no embedding, or the tetrahedral constraint only approximately met) the
    /// nominal distances, which are all the boundary conditions depend on.
    pub fn from_yxn<T: Real>(geom: &YxnGeometry<T>) -> Self {
        let (n, d, r) = (geom.n, geom.d.to_f64_lossy(), geom.r.to_f64_lossy());
        let exact = |pos: &Vec<[f64; 3]>| (distance(&pos[0], &pos[n]) - d).abs() <= 1e-12 * d;
        let distances = match yxn_positions(n, d, r).filter(exact) {
            Some(pos) => distance_matrix(&pos),
            None => (0..=n)
                .map(|i| {
                    (0..=n)
                        .map(|j| match (i == j, i == n || j == n) {
                            (true, _) => 0.0,
                            (false, true) => d,
                            (false, false) => r,
                        })
                        .collect()
                })
                .collect(),
        };
        let mut a = vec![geom.a_x.to_f64_lossy(); n];
        a.push(geom.a_y.to_f64_lossy());
        Self { a, distances, n_x: n }
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }
}

/// `cos(delta) A + sin(delta) B` with `A = diag(k) + sin(kR)/R`, `B = diag(1/a) + cos(kR)/R`:
/// the boundary conditions `c_m (a_m k + t) + a_m sum_j c_j (sin kR_mj + t cos kR_mj)/R_mj = 0`
/// divided by `a_m` and multiplied by `cos delta`, which makes the matrix symmetric.
struct OracleMatrices {
    a: DMatrix<f64>,
    b: DMatrix<f64>,
}

impl OracleMatrices {
    fn new(cluster: &Cluster, active: &[usize], k: f64) -> Self {
        let m = active.len();
        let mut a = DMatrix::zeros(m, m);
        let mut b = DMatrix::zeros(m, m);
        for (i, &ci) in active.iter().enumerate() {
            for (j, &cj) in active.iter().enumerate() {
                if i == j {
                    a[(i, j)] = k;
                    b[(i, j)] = 1.0 / cluster.a[ci];
                } else {
                    let r = cluster.distances[ci][cj];
                    a[(i, j)] = (k * r).sin() / r;
                    b[(i, j)] = (k * r).cos() / r;
                }
            }
        }
        Self { a, b }
    }

    fn at(&self, delta: f64) -> DMatrix<f64> {
        &self.a * delta.cos() + &self.b * delta.sin()
    }

    fn negative_count(&self, delta: f64) -> usize {
        SymmetricEigen::new(self.at(delta)).eigenvalues.iter().filter(|&&l| l < 0.0).count()
    }
}

/// Margin kept from `delta = +-pi/2`.
pub const ORACLE_EDGE: f64 = 1e-9;
/// Null-space threshold relative to the matrix norm.
pub const NULL_THRESHOLD: f64 = 1e-8;

/// Roots `t = tan delta` of the boundary-condition determinant for an explicit cluster,
/// found by tracking the inertia of the symmetric matrix `M(delta)` on a grid over
/// `(-pi/2, pi/2)` and bisecting where the count of negative eigenvalues changes.
/// Centers with `a = 0` do not scatter and contribute the root `t = 0`.
pub fn cluster_oracle(cluster: &Cluster, k: f64) -> Result<Vec<SymmetryChannel>> {
    if !(k > 0.0) || !k.is_finite() {
        return domain("momentum must be positive and finite");
    }
    let size = cluster.len();
    let active: Vec<usize> = (0..size).filter(|&i| cluster.a[i] != 0.0).collect();
    let inert: Vec<usize> = (0..size).filter(|&i| cluster.a[i] == 0.0).collect();
    let mut channels = Vec::new();
    if !active.is_empty() {
        let mats = OracleMatrices::new(cluster, &active, k);
        let lo = -std::f64::consts::FRAC_PI_2 + ORACLE_EDGE;
        let hi = std::f64::consts::FRAC_PI_2 - ORACLE_EDGE;
        let mut cells = 64;
        let roots = loop {
            let grid: Vec<f64> = (0..=cells).map(|i| lo + (hi - lo) * i as f64 / cells as f64).collect();
            let counts: Vec<usize> = grid.iter().map(|&d| mats.negative_count(d)).collect();
            let mut roots = Vec::new();
            for i in 0..cells {
                isolate(&mats, grid[i], grid[i + 1], counts[i], counts[i + 1], &mut roots);
            }
            let found: usize = roots.iter().map(|&(_, m)| m).sum();
            if found == active.len() {
                break roots;
            }
            if cells >= 1 << 14 {
                return Err(ZrpError::Bracketing { found, expected: active.len(), lo, hi });
            }
            cells *= 4;
        };
        for (delta, mult) in merge_roots(roots) {
            channels.push(null_space_channel(cluster, &active, &mats, delta, mult)?);
        }
    }
    if !inert.is_empty() {
        let coefficients: Vec<Vec<f64>> = inert
            .iter()
            .map(|&i| (0..size).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        channels.push(SymmetryChannel {
            label: label_for(cluster, &coefficients),
            degeneracy: inert.len(),
            tan_delta: 0.0,
            coefficients,
            residual: 0.0,
        });
    }
    channels.sort_by(|x, y| x.tan_delta.total_cmp(&y.tan_delta));
    Ok(channels)
}

/// Roots closer than this (in delta) are one degenerate root split by round-off.
const MERGE_WIDTH: f64 = 1e-10;

fn merge_roots(mut roots: Vec<(f64, usize)>) -> Vec<(f64, usize)> {
    roots.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut merged: Vec<(f64, usize, f64)> = Vec::new();
    for (d, m) in roots {
        match merged.last_mut() {
            Some(last) if d - last.2 <= MERGE_WIDTH => {
                last.0 = (last.0 * last.1 as f64 + d * m as f64) / (last.1 + m) as f64;
                last.1 += m;
                last.2 = d;
            }
            _ => merged.push((d, m, d)),
        }
    }
    merged.into_iter().map(|(d, m, _)| (d, m)).collect()
}

/// Final bracket width in `delta`; below [`MERGE_WIDTH`] so split brackets still merge.
const ISOLATE_WIDTH: f64 = 1e-11;

fn isolate(mats: &OracleMatrices, lo: f64, hi: f64, c_lo: usize, c_hi: usize, out: &mut Vec<(f64, usize)>) {
    if c_lo == c_hi {
        return;
    }
    let mid = 0.5 * (lo + hi);
    // Stop well above round-off: closer to a degenerate root the small eigenvalues
    // flicker in sign and would be counted as extra crossings.
    if hi - lo <= ISOLATE_WIDTH {
        out.push((mid, c_lo.abs_diff(c_hi)));
        return;
    }
    let c_mid = mats.negative_count(mid);
    isolate(mats, lo, mid, c_lo, c_mid, out);
    isolate(mats, mid, hi, c_mid, c_hi, out);
}

fn null_space_channel(
    cluster: &Cluster,
    active: &[usize],
    mats: &OracleMatrices,
    delta: f64,
    mult: usize,
) -> Result<SymmetryChannel> {
    let m = mats.at(delta);
    let norm = m.norm();
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].abs().total_cmp(&eig.eigenvalues[j].abs()));
    let residual = order.iter().take(mult).map(|&i| eig.eigenvalues[i].abs()).fold(0.0, f64::max) / norm;
    let coefficients: Vec<Vec<f64>> = order
        .iter()
        .take(mult)
        .map(|&i| {
            let mut full = vec![0.0; cluster.len()];
            for (slot, &c) in active.iter().enumerate() {
                full[c] = eig.eigenvectors[(slot, i)];
            }
            full
        })
        .collect();
    Ok(SymmetryChannel {
        label: label_for(cluster, &coefficients),
        degeneracy: mult,
        tan_delta: delta.tan(),
        coefficients,
        residual,
    })
}

fn label_for(cluster: &Cluster, vectors: &[Vec<f64>]) -> String {
    let symmetric = vectors.iter().all(|v| {
        let x = &v[..cluster.n_x];
        let scale = v.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        x.iter().all(|&c| (c - x[0]).abs() <= 1e-6 * scale)
    });
    if symmetric { "symmetric" } else { "mixed" }.to_string()
}

/// Geometry accepted by [`determinant_oracle`].
#[derive(Clone, Copy, Debug)]
pub enum OracleGeometry<T> {
    Xn(XnGeometry<T>),
    Yxn(YxnGeometry<T>),
}

/// Brute-force channel roots for an `X_n` or `YX_n` cluster.
pub fn determinant_oracle<T: Real>(geom: &OracleGeometry<T>, k: T) -> Result<Vec<SymmetryChannel>> {
    let cluster = match geom {
        OracleGeometry::Xn(g) => Cluster::from_xn(g),
        OracleGeometry::Yxn(g) => Cluster::from_yxn(g),
    };
    cluster_oracle(&cluster, k.to_f64_lossy())
}

/// Agreement of two `tan delta` values: absolute below 1, relative above.
pub fn tan_agrees(x: f64, y: f64, tol: f64) -> bool {
    (x - y).abs() <= tol * x.abs().max(y.abs()).max(1.0)
}

/// Matches analytic `(tan delta, degeneracy)` roots against oracle channels, merging
/// analytic roots that coincide. Returns the largest mismatch, or `None` when the
/// multisets cannot be paired.
pub fn compare_with_oracle(analytic: &[(f64, usize)], oracle: &[SymmetryChannel], tol: f64) -> Option<f64> {
    let mut merged: Vec<(f64, usize)> = Vec::new();
    let mut sorted = analytic.to_vec();
    sorted.sort_by(|x, y| x.0.total_cmp(&y.0));
    for (t, g) in sorted {
        match merged.last_mut() {
            Some(last) if tan_agrees(last.0, t, tol) => last.1 += g,
            _ => merged.push((t, g)),
        }
    }
    if merged.len() != oracle.len() {
        return None;
    }
    let mut worst = 0.0f64;
    for ((t, g), ch) in merged.iter().zip(oracle) {
        if *g != ch.degeneracy || !tan_agrees(*t, ch.tan_delta, tol) {
            return None;
        }
        worst = worst.max((t - ch.tan_delta).abs() / t.abs().max(ch.tan_delta.abs()).max(1.0));
    }
    Some(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::phase_distance_mod_pi;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn silane() -> YxnGeometry<f64> {
        YxnGeometry::<f64>::new(4, 2.762, 4.51, 4.10, 1.88).unwrap()
    }

    #[test]
    fn xn_low_energy_slope() {
        let g = XnGeometry::<f64>::new(2, 2.0, 1.0).unwrap();
        let k = 1e-3;
        let t = xn_phases(&g, k).unwrap().delta0.tan();
        let a = xn_scattering_length(&g).unwrap();
        assert!((a - 4.0 / 3.0).abs() < 1e-15);
        assert!((t / (-a * k) - 1.0).abs() < 1e-5);
    }

    #[test]
    fn xn_scattering_lengths() {
        for &r in &[0.5, 2.0, 9.0] {
            assert_eq!(xn_scattering_length(&XnGeometry::<f64>::new(1, r, 2.5).unwrap()).unwrap(), 2.5);
        }
        let a = xn_scattering_length(&XnGeometry::<f64>::new(4, 2.0, 1.0).unwrap()).unwrap();
        assert!((a - 1.6).abs() < 1e-15);
        let g = XnGeometry::<f64>::new(4, 2.0, 1.0).unwrap();
        let h = 1e-5;
        let fd = -(xn_phases(&g, h).unwrap().delta0) / h;
        assert!((fd - 1.6).abs() < 1e-6);
        let sat = xn_scattering_length(&XnGeometry::<f64>::new(2, 3.0, 1e6).unwrap()).unwrap();
        assert!((sat - 6.0).abs() < 1e-4);
        let pole = XnGeometry::<f64>::new(2, 1.0, -1.0).unwrap();
        assert!(matches!(xn_scattering_length(&pole), Err(ZrpError::DivergentLength { .. })));
    }

    #[test]
    fn xn_length_monotone_and_saturating() {
        for n in 2..=4 {
            let r = 2.5;
            let mut prev = 0.0;
            for i in 1..=2000 {
                let a = 1e3 * (i as f64 / 2000.0).powi(3);
                let len = xn_scattering_length(&XnGeometry::<f64>::new(n, r, a).unwrap()).unwrap();
                assert!(len > prev);
                prev = len;
            }
            let limit = n as f64 * r / (n as f64 - 1.0);
            assert!(prev < limit && (limit - prev) / limit < 1e-2);
        }
    }

    #[test]
    fn resonant_channel_is_regular() {
        let (a, r) = (3.0f64, 2.0);
        // R - a cos kR = 0
        let k = (r / a).acos() / r;
        let g = XnGeometry::<f64>::new(3, r, a).unwrap();
        let p = xn_phases(&g, k).unwrap();
        assert!((p.delta1.abs() - PI / 2.0).abs() < 1e-12);
        let cs = total_cross_section(&p.channels(3), k).unwrap();
        assert!((cs.partial[1] - 4.0 * PI / (k * k)).abs() < 1e-9 * cs.partial[1]);
    }

    #[test]
    fn compatibility_vanishes_at_roots() {
        for n in 1..=4 {
            let g = XnGeometry::<f64>::new(n, 2.3, 1.7).unwrap();
            for &k in &[0.1, 0.8, 1.9] {
                let p = xn_phases(&g, k).unwrap();
                assert!(xn_compatibility_residual(&g, k, p.delta0.tan()).abs() <= 1e-10);
                if n > 1 {
                    assert!(xn_compatibility_residual(&g, k, p.delta1.tan()).abs() <= 1e-10);
                }
                assert!(xn_compatibility_residual(&g, k, 0.37).abs() > 1e-6);
            }
        }
    }

    #[test]
    fn cross_section_examples() {
        let cs = total_cross_section(&[(0.0, 1), (0.0, 1)], 0.7).unwrap();
        assert_eq!(cs.total, 0.0);
        let cs = total_cross_section(&[(PI / 2.0, 1), (0.0, 1)], 1.0).unwrap();
        assert!((cs.total - 4.0 * PI).abs() < 1e-12);
        for n in 2..=4 {
            let g = XnGeometry::<f64>::new(n, 2.0, 1.0).unwrap();
            let k = 1e-3;
            let a = xn_scattering_length(&g).unwrap();
            let cs = total_cross_section(&xn_phases(&g, k).unwrap().channels(n), k).unwrap();
            assert!((cs.total / (4.0 * PI * a * a) - 1.0).abs() < 1e-2);
        }
    }

    #[test]
    fn yxn_reduces_to_xn_without_y() {
        for n in 2..=4 {
            let d = if n == 4 { 2.0 * (3.0f64 / 8.0).sqrt() } else { 1.7 };
            let g = YxnGeometry::<f64>::new(n, d, 2.0, 1.3, 0.0).unwrap();
            for &k in &[0.05, 0.5, 1.5] {
                let y = yxn_phases(&g, k).unwrap();
                let x = xn_phases(&g.xn(), k).unwrap();
                assert!((y.delta0.tan() - x.delta0.tan()).abs() < 1e-10);
                assert!(y.delta1.abs() < 1e-12);
                assert_eq!(y.delta2, x.delta1);
            }
        }
    }

    #[test]
    fn yxn_length_examples() {
        let a = yxn_scattering_length(&silane()).unwrap();
        assert!((a + 3.44).abs() < 0.01, "{a}");
        let zero = YxnGeometry::<f64>::new(4, 2.762, 4.51, 0.0, 0.0).unwrap();
        assert_eq!(yxn_scattering_length(&zero).unwrap(), 0.0);
        for n in 2..=4 {
            let g = YxnGeometry::<f64>::new(n, 1.9, 2.7, 1.4, 0.0).unwrap();
            let x = xn_scattering_length(&g.xn()).unwrap();
            assert!((yxn_scattering_length(&g).unwrap() - x).abs() < 1e-12);
        }
    }

    #[test]
    fn silane_branch_slopes() {
        let g = silane();
        let a = yxn_scattering_length(&g).unwrap();
        let k = 1e-4;
        let p = yxn_phases(&g, k).unwrap();
        assert!((-p.delta0 / k - a).abs() < 1e-4 * a.abs(), "{} vs {a}", -p.delta0 / k);
        assert!((p.delta1 / k).abs() < 1e-4);
    }

    #[test]
    fn large_separation_recovers_isolated_y() {
        // labels are not asserted: the threshold ordering and the large-D ordering differ
        let g = YxnGeometry::<f64>::new(3, 1e3, 2.0, 1.1, 0.8).unwrap();
        let k = 0.1;
        let target = -0.8 * k;
        let roots = yxn_roots(&g, k).unwrap();
        let best = roots.iter().map(|d| (d.tan() / target - 1.0).abs()).fold(f64::MAX, f64::min);
        assert!(best < 1e-3, "{best}");
        let x = xn_phases(&g.xn(), k).unwrap().delta0;
        assert!(roots.iter().any(|&d| phase_distance_mod_pi(d, x) < 1e-2));
    }

    #[test]
    fn scan_is_continuous_and_consistent() {
        let g = silane();
        let ks: Vec<f64> = (1..=600).map(|i| i as f64 * 1e-3).collect();
        let scan = yxn_phase_scan(&g, &ks).unwrap();
        for w in scan.windows(2) {
            assert!((w[1].delta0 - w[0].delta0).abs() < 0.3);
            assert!((w[1].delta1 - w[0].delta1).abs() < 0.3);
            assert!((w[1].delta2 - w[0].delta2).abs() < 0.3);
        }
        for &i in &[0, 137, 599] {
            let single = yxn_phases(&g, ks[i]).unwrap();
            assert!(phase_distance_mod_pi(single.delta0, scan[i].delta0) < 1e-12);
            assert!(phase_distance_mod_pi(single.delta1, scan[i].delta1) < 1e-12);
        }
        assert!(yxn_phase_scan(&g, &[0.2, 0.1]).is_err());
    }

    #[test]
    fn geometry_validation() {
        assert!(XnGeometry::<f64>::new(5, 1.0, 1.0).is_err());
        assert!(XnGeometry::<f64>::new(2, 0.0, 1.0).is_err());
        assert!(YxnGeometry::<f64>::new(1, 1.0, 1.0, 1.0, 1.0).is_err());
        assert!(silane().constraint_warning().is_none());
        let bad = YxnGeometry::<f64>::new(4, 3.0, 4.51, 4.1, 1.88).unwrap();
        assert!(bad.constraint_warning().is_some());
        assert!(YxnGeometry::<f64>::new(3, 3.0, 4.51, 4.1, 1.88).unwrap().constraint_warning().is_none());
    }

    #[test]
    fn explicit_positions_are_equidistant() {
        for n in 2..=4 {
            let r = 2.7;
            let d = if n == 4 { r * (3.0f64 / 8.0).sqrt() } else { 2.5 };
            let pos = yxn_positions(n, d, r).unwrap();
            for i in 0..n {
                assert!((distance(&pos[i], &pos[n]) - d).abs() < 1e-12);
                for j in 0..i {
                    assert!((distance(&pos[i], &pos[j]) - r).abs() < 1e-12);
                }
            }
        }
        assert!(yxn_positions(2, 1.0, 3.0).is_none());
    }

    #[test]
    fn oracle_x4_tetrahedron() {
        let g = XnGeometry::<f64>::new(4, 2.0, 1.0).unwrap();
        let k = 0.9;
        let p = xn_phases(&g, k).unwrap();
        let oracle = determinant_oracle(&OracleGeometry::Xn(g), k).unwrap();
        let mut degs: Vec<usize> = oracle.iter().map(|c| c.degeneracy).collect();
        degs.sort();
        assert_eq!(degs, vec![1, 3]);
        let analytic = [(p.delta0.tan(), 1), (p.delta1.tan(), 3)];
        assert!(compare_with_oracle(&analytic, &oracle, 1e-9).is_some());
        for ch in &oracle {
            assert!(ch.residual <= 1e-8);
            let expect = if ch.degeneracy == 1 { "symmetric" } else { "mixed" };
            assert_eq!(ch.label, expect);
        }
    }

    #[test]
    fn oracle_x2_vectors() {
        let g = XnGeometry::<f64>::new(2, 1.5, 0.8).unwrap();
        let oracle = determinant_oracle(&OracleGeometry::Xn(g), 0.6).unwrap();
        assert_eq!(oracle.len(), 2);
        for ch in oracle {
            let v = &ch.coefficients[0];
            let ratio = v[1] / v[0];
            if ch.label == "symmetric" {
                assert!((ratio - 1.0).abs() < 1e-10);
            } else {
                assert!((ratio + 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn oracle_silane() {
        let g = silane();
        for &k in &[0.05, 0.2, 0.7] {
            let p = yxn_phases(&g, k).unwrap();
            let oracle = determinant_oracle(&OracleGeometry::Yxn(g), k).unwrap();
            let analytic = [(p.delta0.tan(), 1), (p.delta1.tan(), 1), (p.delta2.tan(), 3)];
            assert!(compare_with_oracle(&analytic, &oracle, 1e-8).is_some(), "k={k}: {analytic:?} {oracle:?}");
        }
    }

    #[test]
    fn oracle_inert_centers() {
        let g = YxnGeometry::<f64>::new(3, 2.0, 2.0, 1.2, 0.0).unwrap();
        let oracle = determinant_oracle(&OracleGeometry::Yxn(g), 0.4).unwrap();
        assert_eq!(oracle.iter().map(|c| c.degeneracy).sum::<usize>(), 4);
        assert!(oracle.iter().any(|c| c.tan_delta == 0.0 && c.coefficients[0][3] == 1.0));
    }

    #[test]
    fn series_layout() {
        let g = XnGeometry::<f64>::new(2, 2.0, 1.0).unwrap();
        let s = xn_series(&g, &[0.1, 0.2]).unwrap();
        assert_eq!(s.header().join(","), "E_eV,k_au,delta_0_rad,delta_1_rad,sigma_0_a02,sigma_1_a02,sigma_total_a02");
        let y = yxn_series(&silane(), &[0.1, 0.2]).unwrap();
        assert_eq!(
            y.header().join(","),
            "E_eV,k_au,delta_0_rad,delta_1_rad,delta_2_rad,sigma_0_a02,sigma_1_a02,sigma_2_a02,sigma_total_a02"
        );
        for row in &y.rows {
            let sum = row.sigmas[0] + row.sigmas[1] + 3.0 * row.sigmas[2];
            assert!((row.total - sum).abs() <= 1e-12 * sum);
            assert!(row.sigmas.iter().all(|&s| s >= 0.0));
        }
        let mut a2 = y.clone();
        a2.convert_to_angstrom2();
        assert!(a2.header().contains(&"sigma_total_A2".to_string()));
        assert!((a2.rows[0].total / y.rows[0].total - BOHR2_IN_ANGSTROM2).abs() < 1e-15);
        let mut buf = Vec::new();
        y.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 3);
    }

    fn random_xn() -> impl Strategy<Value = (XnGeometry<f64>, f64)> {
        (2usize..=4, 0.5f64..5.0, 1.0f64..6.0, 0.01f64..2.0)
            .prop_map(|(n, a, r, k)| (XnGeometry::<f64>::new(n, r, a).unwrap(), k))
    }

    fn random_yxn() -> impl Strategy<Value = (YxnGeometry<f64>, f64)> {
        (2usize..=4, 0.5f64..5.0, 0.0f64..3.0, 1.0f64..6.0, 0.0f64..1.0, 0.01f64..2.0).prop_map(
            |(n, ax, ay, r, extra, k)| {
                let rc = circumradius(n, r);
                let d = if n == 4 { rc } else { rc * 1.02 + 3.0 * extra };
                (YxnGeometry::<f64>::new(n, d, r, ax, ay).unwrap(), k)
            },
        )
    }

    #[test]
    fn oracle_tetrahedral_triple_root_not_overcounted() {
        // Round-off near the triply degenerate root used to register as extra crossings.
        let g = YxnGeometry::<f64>::new(4, 2.3198181670540103, 3.788247203547248, 4.234471597559129, 2.846384843776365).unwrap();
        let k: f64 = 0.10893146714199174;
        let p = yxn_phases(&g, k).unwrap();
        let oracle = determinant_oracle(&OracleGeometry::Yxn(g), k).unwrap();
        let analytic = [(p.delta0.tan(), 1), (p.delta1.tan(), 1), (p.delta2.tan(), 3)];
        assert!(compare_with_oracle(&analytic, &oracle, 1e-8).is_some());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn xn_oracle_equivalence((g, k) in random_xn()) {
            let p = xn_phases(&g, k).unwrap();
            let oracle = determinant_oracle(&OracleGeometry::Xn(g), k).unwrap();
            let analytic = [(p.delta0.tan(), 1), (p.delta1.tan(), g.n - 1)];
            prop_assert!(compare_with_oracle(&analytic, &oracle, 1e-8).is_some());
        }

        #[test]
        fn yxn_oracle_equivalence((g, k) in random_yxn()) {
            let p = yxn_phases(&g, k).unwrap();
            let oracle = determinant_oracle(&OracleGeometry::Yxn(g), k).unwrap();
            let analytic = [(p.delta0.tan(), 1), (p.delta1.tan(), 1), (p.delta2.tan(), g.n - 1)];
            prop_assert!(compare_with_oracle(&analytic, &oracle, 1e-8).is_some());
        }

        #[test]
        fn cross_sections_nonnegative((g, k) in random_yxn()) {
            let p = yxn_phases(&g, k).unwrap();
            let cs = total_cross_section(&p.channels(g.n), k).unwrap();
            prop_assert!(cs.partial.iter().all(|&s| s >= 0.0));
            prop_assert!(cs.total <= 4.0 * PI / (k * k) * (g.n + 1) as f64 * (1.0 + 1e-12));
        }
    }
}
