//! Self-check suites run by `verify`.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::darboux::{crum_wronskian, dressed_boundary_logderiv, gzrp_props, log_derivative_s, riccati_residual};
use crate::darboux::{PropFunction, RadialGrid};
use crate::gzrp::GzrpChannel;
use crate::multicenter::{
    compare_with_oracle, determinant_oracle, xn_phases, yxn_phases, OracleGeometry, XnGeometry, YxnGeometry,
};
use crate::radial_oracle::{default_match_radius, integrate_phase, integrate_phase_with_step, poschl_teller};
use crate::radial_oracle::RadialProblem;
use crate::scalar::{phase_distance_mod_pi, reduce_mod_pi};
use crate::specfun::{recurrence_residual, SphericalKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    All,
    Oracle,
    Numerov,
    Identities,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    /// Worst residual observed (NaN when the check could not be evaluated).
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub note: String,
}

impl Check {
    fn bound(name: &str, residual: f64, tolerance: f64) -> Self {
        Self { name: name.into(), residual, tolerance, passed: residual <= tolerance, note: String::new() }
    }

    fn failed(name: &str, tolerance: f64, note: String) -> Self {
        Self { name: name.into(), residual: f64::NAN, tolerance, passed: false, note }
    }

    /// Residual must fall inside `[lo, hi]`; `tolerance` reports `hi`.
    fn window(name: &str, value: f64, lo: f64, hi: f64) -> Self {
        Self {
            name: name.into(),
            residual: value,
            tolerance: hi,
            passed: (lo..=hi).contains(&value),
            note: format!("expected in [{lo}, {hi}]"),
        }
    }

    pub fn line(&self) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        let mut s = format!("{status} {:<28} residual={:.3e} tol={:.1e}", self.name, self.residual, self.tolerance);
        if !self.note.is_empty() {
            s.push_str(&format!(" ({})", self.note));
        }
        s
    }
}

pub fn run_suite(suite: Suite, seed: u64) -> Vec<Check> {
    let mut out = Vec::new();
    if matches!(suite, Suite::All | Suite::Oracle) {
        out.extend(oracle_checks(seed));
    }
    if matches!(suite, Suite::All | Suite::Numerov) {
        out.extend(numerov_checks());
    }
    if matches!(suite, Suite::All | Suite::Identities) {
        out.extend(identity_checks(seed));
    }
    out
}

const DRAWS: usize = 100;

fn oracle_checks(seed: u64) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut xn_worst = 0.0f64;
    let mut xn_fail = None;
    for _ in 0..DRAWS {
        let n = rng.gen_range(2..=4);
        let g = XnGeometry::<f64>::new(n, rng.gen_range(1.0..6.0), rng.gen_range(0.5..5.0)).expect("valid draw");
        let k: f64 = rng.gen_range(1e-3..=2.0);
        let r = xn_phases(&g, k)
            .and_then(|p| Ok((p, determinant_oracle(&OracleGeometry::Xn(g), k)?)))
            .map(|(p, o)| compare_with_oracle(&[(p.delta0.tan(), 1), (p.delta1.tan(), n - 1)], &o, 1e-8));
        match r {
            Ok(Some(w)) => xn_worst = xn_worst.max(w),
            other => xn_fail = Some(format!("{g:?} k={k}: {other:?}")),
        }
    }
    let mut yxn_worst = 0.0f64;
    let mut yxn_fail = None;
    for _ in 0..DRAWS {
        let n = rng.gen_range(2..=4);
        let r: f64 = rng.gen_range(1.0..6.0);
        let rc = match n {
            2 => r / 2.0,
            3 => r / 3f64.sqrt(),
            _ => r * (3.0f64 / 8.0).sqrt(),
        };
        let d = if n == 4 { rc } else { rc * rng.gen_range(1.02..3.0) };
        let g = YxnGeometry::<f64>::new(n, d, r, rng.gen_range(0.5..5.0), rng.gen_range(0.0..3.0)).expect("valid draw");
        let k: f64 = rng.gen_range(1e-3..=2.0);
        let res = yxn_phases(&g, k).and_then(|p| Ok((p, determinant_oracle(&OracleGeometry::Yxn(g), k)?))).map(|(p, o)| {
            compare_with_oracle(&[(p.delta0.tan(), 1), (p.delta1.tan(), 1), (p.delta2.tan(), n - 1)], &o, 1e-8)
        });
        match res {
            Ok(Some(w)) => yxn_worst = yxn_worst.max(w),
            other => yxn_fail = Some(format!("{g:?} k={k}: {other:?}")),
        }
    }
    let finish = |name: &str, worst: f64, fail: Option<String>| match fail {
        None => Check::bound(name, worst, 1e-8),
        Some(note) => Check::failed(name, 1e-8, note),
    };
    vec![finish("oracle/xn", xn_worst, xn_fail), finish("oracle/yxn", yxn_worst, yxn_fail)]
}

fn numerov_checks() -> Vec<Check> {
    let mut checks = Vec::new();
    for &(alpha, kappa) in &[(1.0, 0.185), (2.0, 0.5), (0.5, 1.0)] {
        let name = format!("numerov/poschl-teller a={alpha} k={kappa}");
        let rm = default_match_radius(kappa);
        let mut worst = 0.0f64;
        let mut err = None;
        for i in 0..=19 {
            let k = 0.05 + 0.05 * i as f64;
            let p = RadialProblem::new(0, k, poschl_teller(kappa), dressed_boundary_logderiv(k, kappa, alpha).unwrap_or(f64::NAN), rm);
            match integrate_phase(&p) {
                Ok(ph) => {
                    let exact = -(k / alpha).atan() - (k / kappa).atan();
                    worst = worst.max(phase_distance_mod_pi(ph.delta, exact));
                }
                Err(e) => err = Some(format!("k={k}: {e}")),
            }
        }
        checks.push(match err {
            None => Check::bound(&name, worst, 1e-3),
            Some(note) => Check::failed(&name, 1e-3, note),
        });
    }
    let (alpha, kappa, k) = (0.6f64, 1.0f64, 1.2f64);
    let p = RadialProblem::new(0, k, poschl_teller(kappa), (k * k + kappa * kappa) / alpha, 25.0);
    let exact = -(k / alpha).atan() - (k / kappa).atan();
    let ratio = integrate_phase_with_step(&p, 0.04)
        .and_then(|a| Ok((a, integrate_phase_with_step(&p, 0.02)?)))
        .map(|(a, b)| reduce_mod_pi(a - exact).abs() / reduce_mod_pi(b - exact).abs());
    checks.push(match ratio {
        Ok(r) => Check::window("numerov/convergence-ratio", r, 12.0, 20.0),
        Err(e) => Check::failed("numerov/convergence-ratio", 20.0, e.to_string()),
    });
    checks
}

fn identity_checks(seed: u64) -> Vec<Check> {
    let mut checks = Vec::new();

    let kappa = 0.185;
    let prop = PropFunction::CoshOverR { kappa };
    let s = log_derivative_s(&prop);
    let grid = RadialGrid::uniform(0.1, 20.0, 2000).expect("grid");
    checks.push(Check::bound("identity/riccati", riccati_residual(&s, 0, kappa * kappa, &grid), 1e-10));

    for l in 1..=2 {
        let name = format!("identity/wronskian l={l}");
        let check = GzrpChannel::new(l, 1.3).and_then(|ch| {
            let props = gzrp_props(&ch);
            let ws = (0..=45)
                .map(|i| crum_wronskian(&props, 0.5 + 0.1 * i as f64))
                .collect::<crate::Result<Vec<Complex<f64>>>>()?;
            let w0 = ws[0];
            Ok(ws.iter().map(|w| (w - w0).norm() / w0.norm()).fold(0.0, f64::max))
        });
        checks.push(match check {
            Ok(v) => Check::bound(&name, v, 1e-6),
            Err(e) => Check::failed(&name, 1e-6, e.to_string()),
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut worst = 0.0f64;
    for l in 0..=3 {
        for _ in 0..100 {
            let alpha = rng.gen_range(0.1..5.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let k = rng.gen_range(0.01..3.0);
            if let Ok(ch) = GzrpChannel::new(l, alpha) {
                worst = worst.max((ch.s_matrix(k) - ch.s_matrix_from_poles(k)).norm());
            }
        }
    }
    checks.push(Check::bound("identity/pole-product", worst, 1e-10));

    let mut rec = 0.0f64;
    for l in 1..=8 {
        for i in 0..=499 {
            let x = 0.1 + (50.0 - 0.1) * i as f64 / 499.0;
            for kind in [SphericalKind::J, SphericalKind::N] {
                rec = rec.max(recurrence_residual(kind, l, x).unwrap_or(f64::NAN));
            }
        }
    }
    checks.push(Check::bound("identity/bessel-recurrence", rec, 1e-10));
    checks
}
