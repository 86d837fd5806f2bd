//! Acceptance checks. Each criterion prints one `PASS`/`FAIL` line straight to stdout
//! (bypassing the test harness capture) and then asserts.

use std::io::Write;
use std::time::{Duration, Instant};

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dressed_zrp::darboux::{crum_wronskian, gzrp_props, log_derivative_s, riccati_residual, PropFunction, RadialGrid};
use dressed_zrp::gzrp::GzrpChannel;
use dressed_zrp::model::{
    find_rt_minimum, fit_parameters, sigma_a1_at, sigma_a1_scan, DataPoint, EnergyGrid, ExperimentDataset,
    FitOptions, FitParameter, SilaneModel,
};
use dressed_zrp::multicenter::{
    compare_with_oracle, determinant_oracle, total_cross_section, xn_phases, xn_scattering_length, yxn_phases,
    OracleGeometry, XnGeometry, YxnGeometry,
};
use dressed_zrp::radial_oracle::{default_match_radius, integrate_phase, integrate_phase_with_step, poschl_teller};
use dressed_zrp::radial_oracle::RadialProblem;
use dressed_zrp::scalar::{k_from_ev, phase_distance_mod_pi, reduce_mod_pi};
use dressed_zrp::specfun::{recurrence_residual, SphericalKind};

fn report(id: u32, title: &str, passed: bool, detail: &str, elapsed: Duration) {
    let status = if passed { "PASS" } else { "FAIL" };
    let line = format!("\n{status} criterion {id} ({title}): {detail} [{:.2} s]\n", elapsed.as_secs_f64());
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(line.as_bytes());
    let _ = out.flush();
    assert!(passed, "criterion {id} failed: {detail}");
}

fn random_yxn(rng: &mut ChaCha8Rng) -> YxnGeometry<f64> {
    let n = rng.gen_range(2..=4);
    let r: f64 = rng.gen_range(1.0..6.0);
    let circum = match n {
        2 => r / 2.0,
        3 => r / 3f64.sqrt(),
        _ => r * (3.0f64 / 8.0).sqrt(),
    };
    let d = if n == 4 { circum } else { circum * rng.gen_range(1.02..3.0) };
    YxnGeometry::new(n, d, r, rng.gen_range(0.5..5.0), rng.gen_range(0.0..3.0)).unwrap()
}

#[test]
fn criterion_1_xn_oracle() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    for _ in 0..200 {
        let n = rng.gen_range(2..=4);
        let g = XnGeometry::new(n, rng.gen_range(1.0..6.0), rng.gen_range(0.5..5.0)).unwrap();
        let k: f64 = rng.gen_range(1e-3..=2.0);
        let p = xn_phases(&g, k).unwrap();
        let oracle = determinant_oracle(&OracleGeometry::Xn(g), k).unwrap();
        match compare_with_oracle(&[(p.delta0.tan(), 1), (p.delta1.tan(), n - 1)], &oracle, 1e-8) {
            Some(w) => worst = worst.max(w),
            None => failures.push(format!("{g:?} k={k}")),
        }
    }
    let elapsed = t.elapsed();
    let ok = failures.is_empty() && worst <= 1e-8 && elapsed < Duration::from_secs(10);
    let detail = format!("200 draws, worst tan mismatch {worst:.2e} (tol 1e-8), {} mismatched", failures.len());
    report(1, "X_n determinant oracle", ok, &detail, elapsed);
}

#[test]
fn criterion_2_yxn_oracle() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    for _ in 0..200 {
        let g = random_yxn(&mut rng);
        let k: f64 = rng.gen_range(1e-3..=2.0);
        let p = yxn_phases(&g, k).unwrap();
        let oracle = determinant_oracle(&OracleGeometry::Yxn(g), k).unwrap();
        let analytic = [(p.delta0.tan(), 1), (p.delta1.tan(), 1), (p.delta2.tan(), g.n - 1)];
        match compare_with_oracle(&analytic, &oracle, 1e-8) {
            Some(w) => worst = worst.max(w),
            None => failures.push(format!("{g:?} k={k}")),
        }
    }
    let elapsed = t.elapsed();
    let ok = failures.is_empty() && worst <= 1e-8 && elapsed < Duration::from_secs(10);
    let detail = format!("200 draws, worst tan mismatch {worst:.2e} (tol 1e-8), {} mismatched", failures.len());
    report(2, "YX_n determinant oracle", ok, &detail, elapsed);
}

#[test]
fn criterion_3_dressing_oracle() {
    let t = Instant::now();
    let mut worst = 0.0f64;
    let mut errors = Vec::new();
    for &(alpha, kappa) in &[(1.0f64, 0.185f64), (2.0, 0.5), (0.5, 1.0)] {
        let rm = default_match_radius(kappa);
        for i in 0..=95 {
            let k = 0.05 + 0.01 * i as f64;
            let p = RadialProblem::new(0, k, poschl_teller(kappa), (k * k + kappa * kappa) / alpha, rm);
            match integrate_phase(&p) {
                Ok(ph) => {
                    let exact = -(k / alpha).atan() - (k / kappa).atan();
                    worst = worst.max(phase_distance_mod_pi(ph.delta, exact));
                }
                Err(e) => errors.push(format!("alpha={alpha} kappa={kappa} k={k}: {e}")),
            }
        }
    }
    let elapsed = t.elapsed();
    let ok = errors.is_empty() && worst <= 1e-3 && elapsed < Duration::from_secs(5);
    let detail = format!("worst phase error {worst:.2e} rad (tol 1e-3) over 3x96 momenta, {} errors", errors.len());
    report(3, "Numerov vs dressed phase", ok, &detail, elapsed);
}

#[test]
fn criterion_4_identities() {
    let t = Instant::now();
    let kappa = 0.185;
    let grid = RadialGrid::uniform(0.1, 20.0, 2000).unwrap();
    let prop = PropFunction::CoshOverR { kappa };
    let riccati = riccati_residual(&log_derivative_s(&prop), 0, kappa * kappa, &grid);

    let mut wronskian = 0.0f64;
    for l in 1..=2 {
        let props = gzrp_props(&GzrpChannel::new(l, 1.3).unwrap());
        let ws: Vec<Complex<f64>> =
            (0..=45).map(|i| crum_wronskian(&props, 0.5 + 0.1 * i as f64).unwrap()).collect();
        let w0 = ws[0];
        wronskian = ws.iter().map(|w| (w - w0).norm() / w0.norm()).fold(wronskian, f64::max);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut poles = 0.0f64;
    for l in 0..=3 {
        for _ in 0..200 {
            let alpha = rng.gen_range(0.1..5.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let k = rng.gen_range(0.01..3.0);
            let ch = GzrpChannel::new(l, alpha).unwrap();
            poles = poles.max((ch.s_matrix(k) - ch.s_matrix_from_poles(k)).norm());
        }
    }
    let elapsed = t.elapsed();
    let ok = riccati <= 1e-10 && wronskian <= 1e-6 && poles <= 1e-10;
    let detail = format!(
        "Riccati {riccati:.2e} (tol 1e-10), Wronskian variation {wronskian:.2e} (tol 1e-6), pole product {poles:.2e} (tol 1e-10)"
    );
    report(4, "identities", ok, &detail, elapsed);
}

#[test]
fn criterion_5_limits() {
    let t = Instant::now();
    let mut notes = Vec::new();
    let mut ok = true;

    // a_y = 0: the central atom is inert
    let mut reduce = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let g = random_yxn(&mut rng);
        let g = YxnGeometry::new(g.n, g.d, g.r, g.a_x, 0.0).unwrap();
        let k: f64 = rng.gen_range(1e-3..=2.0);
        let y = yxn_phases(&g, k).unwrap().delta0;
        let x = xn_phases(&g.xn(), k).unwrap().delta0;
        reduce = reduce.max(phase_distance_mod_pi(y, x));
    }
    ok &= reduce <= 1e-10;
    notes.push(format!("a_y=0 reduction {reduce:.2e} (tol 1e-10)"));

    // far central atom: tan delta_1 -> -a_y k
    let (a_x, a_y, k) = (1.1f64, 0.8f64, 0.1f64);
    let g = YxnGeometry::new(3, 1e3, 2.0, a_x, a_y).unwrap();
    let d1 = yxn_phases(&g, k).unwrap().delta1;
    let far = (d1.tan() / (-a_y * k) - 1.0).abs();
    ok &= far <= 1e-3;
    notes.push(format!("D=1e3 tan(delta_1) rel. error {far:.2e} (tol 1e-3)"));

    // single center
    let a = 1.234_567_891_f64;
    let single = xn_scattering_length(&XnGeometry::new(1, 3.0, a).unwrap()).unwrap();
    ok &= single == a;
    notes.push(format!("n=1 length {}", if single == a { "exact" } else { "inexact" }));

    // threshold cross section
    let mut thresh = 0.0f64;
    for n in 1..=4 {
        let g = XnGeometry::new(n, 2.5, 1.3).unwrap();
        let len = xn_scattering_length(&g).unwrap();
        let k = 1e-3;
        let p = xn_phases(&g, k).unwrap();
        let total = total_cross_section(&p.channels(n), k).unwrap().total;
        thresh = thresh.max((total / (4.0 * std::f64::consts::PI * len * len) - 1.0).abs());
    }
    ok &= thresh <= 1e-2;
    notes.push(format!("k=1e-3 sigma vs 4 pi A^2 rel. {thresh:.2e} (tol 1e-2)"));

    report(5, "limits", ok, &notes.join("; "), t.elapsed());
}

#[test]
fn criterion_6_silane_minimum() {
    let t = Instant::now();
    let model = SilaneModel::<f64>::default();
    let geom = model.geometry().unwrap();
    let deviation = geom.tetrahedral_deviation();
    let grid = EnergyGrid::linear(0.01, 1.0, 0.001).unwrap();
    let series = sigma_a1_scan(&model, &grid, false).unwrap();
    let min = find_rt_minimum(&series);
    let elapsed = t.elapsed();
    let (in_window, found) = match &min {
        Ok(m) => ((0.30..=0.40).contains(&m.e_ev), format!("E_min = {:.4} eV, sigma_min = {:.3e} a0^2", m.e_ev, m.sigma)),
        Err(e) => (false, format!("no minimum: {e}")),
    };
    let ok = in_window && deviation <= 1e-3 && elapsed < Duration::from_secs(2);
    let detail = format!(
        "{found} (expected in [0.30, 0.40] eV); |R - 2 sqrt(2/3) D| / R = {deviation:.2e} (tol 1e-3); {} points",
        grid.len()
    );
    report(6, "silane RT minimum", ok, &detail, elapsed);
}

#[test]
fn criterion_7_fit_round_trip() {
    let t = Instant::now();
    let truth = SilaneModel::<f64>::default();
    let energies: Vec<f64> = (0..40).map(|i| 0.02 + 0.03 * i as f64).collect();
    let ks: Vec<f64> = energies.iter().map(|&e| k_from_ev(e)).collect();
    let sigma = sigma_a1_at(&truth, &ks).unwrap();
    let points = energies.iter().zip(sigma).map(|(&e, s)| DataPoint { e_ev: e, sigma: s, sigma_err: None }).collect();
    let data = ExperimentDataset::new("synthetic", points).unwrap();
    let base = SilaneModel { a_x: 1.0, a_y: 1.0, kappa: 1.0, ..truth };
    let opts = FitOptions { seed: 2024, ..FitOptions::default() };
    let fit = fit_parameters(&base, &data, &opts).unwrap();
    let again = fit_parameters(&base, &data, &opts).unwrap();
    let elapsed = t.elapsed();
    let truths = [(FitParameter::AX, truth.a_x), (FitParameter::AY, truth.a_y), (FitParameter::Kappa, truth.kappa)];
    let worst = truths.iter().map(|&(p, v)| (fit.value(p) / v - 1.0).abs()).fold(0.0, f64::max);
    let deterministic = fit == again;
    let ok = worst < 1e-2 && fit.residual <= 1e-10 && deterministic && elapsed < Duration::from_secs(30);
    let detail = format!(
        "worst parameter rel. error {worst:.2e} (tol 1e-2), residual {:.2e} a0^4 (tol 1e-10), deterministic: {deterministic}",
        fit.residual
    );
    report(7, "fit round trip", ok, &detail, elapsed);
}

#[test]
fn criterion_8_numerics_hygiene() {
    let t = Instant::now();
    let (alpha, kappa, k) = (0.6f64, 1.0f64, 1.2f64);
    let p = RadialProblem::new(0, k, poschl_teller(kappa), (k * k + kappa * kappa) / alpha, 25.0);
    let exact = -(k / alpha).atan() - (k / kappa).atan();
    let e1 = reduce_mod_pi(integrate_phase_with_step(&p, 0.04).unwrap() - exact).abs();
    let e2 = reduce_mod_pi(integrate_phase_with_step(&p, 0.02).unwrap() - exact).abs();
    let ratio = e1 / e2;

    let mut rec = 0.0f64;
    for l in 1..=8 {
        for i in 0..=999 {
            let x = 0.1 + (50.0 - 0.1) * i as f64 / 999.0;
            for kind in [SphericalKind::J, SphericalKind::N] {
                rec = rec.max(recurrence_residual(kind, l, x).unwrap());
            }
        }
    }
    let ok = (12.0..=20.0).contains(&ratio) && rec <= 1e-10;
    let detail = format!("Numerov error ratio h->h/2 {ratio:.2} (expected in [12, 20]); recurrence residual {rec:.2e} (tol 1e-10)");
    report(8, "numerics hygiene", ok, &detail, t.elapsed());
}
