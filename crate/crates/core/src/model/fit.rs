//! Least-squares fit of the silane model to measured cross sections: Nelder–Mead
//! from seeded random starts inside box bounds, evaluated in parallel.

use argmin::core::{CostFunction, Error as ArgminError, Executor, State};
use argmin::solver::neldermead::NelderMead;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{sigma_a1_at, ExperimentDataset, SilaneModel};
use crate::error::{Result, ZrpError};
use crate::scalar::k_from_ev;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum FitParameter {
    #[value(name = "a_x")]
    AX,
    #[value(name = "a_y")]
    AY,
    Kappa,
}

const START_DECADES: f64 = 3.0;
/// Random starts per restart and the iteration cap of each probe descent.
const PROBES: usize = 8;
const PROBE_ITERS: u64 = 300;

impl FitParameter {
    /// Open-closed bounds `(lo, hi]`.
    pub fn bounds(self) -> (f64, f64) {
        match self {
            FitParameter::AX | FitParameter::AY => (0.0, 20.0),
            FitParameter::Kappa => (0.0, 5.0),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FitParameter::AX => "a_x",
            FitParameter::AY => "a_y",
            FitParameter::Kappa => "kappa",
        }
    }

    fn get(self, m: &SilaneModel<f64>) -> f64 {
        match self {
            FitParameter::AX => m.a_x,
            FitParameter::AY => m.a_y,
            FitParameter::Kappa => m.kappa,
        }
    }

    fn set(self, m: &mut SilaneModel<f64>, v: f64) {
        match self {
            FitParameter::AX => m.a_x = v,
            FitParameter::AY => m.a_y = v,
            FitParameter::Kappa => m.kappa = v,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    /// Free parameters; the rest (and the geometry) stay at the base model.
    pub free: Vec<FitParameter>,
    pub restarts: usize,
    pub seed: u64,
    pub max_iters: u64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            free: vec![FitParameter::AX, FitParameter::AY, FitParameter::Kappa],
            restarts: 10,
            seed: 0,
            max_iters: 2000,
        }
    }
}

/// One restart, in natural (not log) parameter values.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RestartOutcome {
    pub start: Vec<f64>,
    pub start_cost: f64,
    pub end: Vec<f64>,
    pub cost: f64,
}

impl RestartOutcome {
    fn improved(&self) -> bool {
        self.cost.is_finite() && (!self.start_cost.is_finite() || self.cost < self.start_cost)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitResult {
    pub model: SilaneModel<f64>,
    /// Sum of squared residuals (a0^4).
    pub residual: f64,
    pub free: Vec<FitParameter>,
    pub restarts: Vec<RestartOutcome>,
}

/// `sum_i (sigma_model(E_i) - sigma_i)^2`; infinite if the model cannot be evaluated.
pub fn sum_of_squares(model: &SilaneModel<f64>, data: &ExperimentDataset) -> f64 {
    let ks: Vec<f64> = data.points.iter().map(|p| k_from_ev(p.e_ev)).collect();
    match sigma_a1_at(model, &ks) {
        Ok(s) => s.iter().zip(&data.points).map(|(m, p)| (m - p.sigma).powi(2)).sum(),
        Err(_) => f64::INFINITY,
    }
}

fn log_misfit(model: &SilaneModel<f64>, data: &ExperimentDataset, floor: f64) -> f64 {
    let ks: Vec<f64> = data.points.iter().map(|p| k_from_ev(p.e_ev)).collect();
    match sigma_a1_at(model, &ks) {
        Ok(s) => s
            .iter()
            .zip(&data.points)
            .map(|(m, p)| ((m + floor).ln() - (p.sigma.max(0.0) + floor).ln()).powi(2))
            .sum(),
        Err(_) => f64::INFINITY,
    }
}

/// Objective over `y = ln(p)` for the free parameters: the search is scale free and
/// the open lower bound at zero is built in.
#[derive(Clone, Copy)]
struct Objective<'a> {
    base: SilaneModel<f64>,
    free: &'a [FitParameter],
    data: &'a ExperimentDataset,
    metric: Metric,
}

/// `Log` compares `ln(sigma + floor)`: near a zero-energy resonance the squared
/// residuals span many decades and trap the simplex; on a log scale they do not.
#[derive(Clone, Copy)]
enum Metric {
    Squares,
    Log { floor: f64 },
}

impl Objective<'_> {
    fn model(&self, y: &[f64]) -> SilaneModel<f64> {
        let mut m = self.base;
        for (p, &v) in self.free.iter().zip(y) {
            p.set(&mut m, v.exp());
        }
        m
    }

    fn value(&self, y: &[f64]) -> f64 {
        let inside = self.free.iter().zip(y).all(|(p, &v)| {
            let (lo, hi) = p.bounds();
            let x = v.exp();
            x > lo && x <= hi
        });
        if !inside {
            return f64::INFINITY;
        }
        match self.metric {
            Metric::Squares => sum_of_squares(&self.model(y), self.data),
            Metric::Log { floor } => log_misfit(&self.model(y), self.data, floor),
        }
    }

    fn coarse_metric(&self) -> Metric {
        let mean = self.data.points.iter().map(|p| p.sigma.abs()).sum::<f64>() / self.data.len() as f64;
        Metric::Log { floor: 1e-3 * mean.max(f64::MIN_POSITIVE) }
    }

    fn with_metric(&self, metric: Metric) -> Self {
        Objective { metric, ..*self }
    }
}

impl CostFunction for Objective<'_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, y: &Self::Param) -> std::result::Result<f64, ArgminError> {
        Ok(self.value(y))
    }
}

fn simplex(y: &[f64], free: &[FitParameter], step: f64) -> Vec<Vec<f64>> {
    let mut pts = vec![y.to_vec()];
    for (i, p) in free.iter().enumerate() {
        let top = p.bounds().1.ln();
        let mut v = y.to_vec();
        // step towards the interior so the vertex stays feasible
        v[i] = if y[i] + step <= top { y[i] + step } else { y[i] - step };
        pts.push(v);
    }
    pts
}

/// Nelder–Mead passes from fresh simplices of decreasing size (log units); stops a
/// pass once the cost spread falls below `rel_tol` times the current best.
fn descend(obj: &Objective, start: &[f64], steps: &[f64], max_iters: u64, rel_tol: f64) -> (Vec<f64>, f64) {
    let mut best = (start.to_vec(), obj.value(start));
    for &step in steps {
        let tol = (rel_tol * best.1).max(1e-16);
        let solver = match NelderMead::new(simplex(&best.0, obj.free, step)).with_sd_tolerance(tol) {
            Ok(s) => s,
            Err(_) => break,
        };
        let run = Executor::new(ByRef(obj), solver).configure(|s| s.max_iters(max_iters)).run();
        if let Ok(res) = run {
            let state = res.state();
            if let Some(p) = state.get_best_param() {
                let c = state.get_best_cost();
                if c < best.1 {
                    best = (p.clone(), c);
                }
            }
        }
    }
    best
}

/// One restart: short descents on the log misfit from a few random starts, then the
/// best of them is polished on the sum of squares.
fn restart(obj: &Objective, rng: &mut ChaCha8Rng, max_iters: u64) -> RestartOutcome {
    let coarse = obj.with_metric(obj.coarse_metric());
    let (start, probe) = (0..PROBES)
        .map(|_| {
            // log-uniform over the upper decades of each (0, hi] range
            let y: Vec<f64> = obj
                .free
                .iter()
                .map(|p| {
                    let top = p.bounds().1.ln();
                    rng.gen_range(top - START_DECADES * std::f64::consts::LN_10..=top)
                })
                .collect();
            let end = descend(&coarse, &y, &[0.5, 0.1], PROBE_ITERS, 1e-8);
            (y, end)
        })
        .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1).then_with(|| lexicographic(&a.1 .0, &b.1 .0)))
        .expect("at least one probe");
    let refined = descend(&coarse, &probe.0, &[0.05], max_iters, 1e-12).0;
    let start_cost = obj.value(&start);
    let (mut end, mut cost) = descend(obj, &refined, &[0.1, 0.02, 0.005], max_iters, 1e-13);
    if !(cost < start_cost) && start_cost.is_finite() {
        (end, cost) = (start.clone(), start_cost);
    }
    let exp = |v: &[f64]| v.iter().map(|x| x.exp()).collect();
    RestartOutcome { start: exp(&start), start_cost, end: exp(&end), cost }
}

/// Borrowing adaptor so one objective serves several executor runs.
struct ByRef<'o, 'a>(&'o Objective<'a>);

impl CostFunction for ByRef<'_, '_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, x: &Self::Param) -> std::result::Result<f64, ArgminError> {
        self.0.cost(x)
    }
}

/// Fits the free parameters of `base` to `data`. Restart `i` draws its start from a
/// ChaCha stream seeded with `seed + i`; ties in the residual break on the parameter
/// vector in lexicographic order, so the result is reproducible.
pub fn fit_parameters(base: &SilaneModel<f64>, data: &ExperimentDataset, opts: &FitOptions) -> Result<FitResult> {
    if data.len() < 3 {
        return Err(ZrpError::Domain(format!("fitting needs at least 3 data points, got {}", data.len())));
    }
    if opts.free.is_empty() || opts.restarts == 0 {
        return Err(ZrpError::Domain("nothing to fit: no free parameters or no restarts".into()));
    }
    let mut free = opts.free.clone();
    free.sort();
    free.dedup();
    base.geometry()?;
    let obj = Objective { base: *base, free: &free, data, metric: Metric::Squares };
    let outcomes: Vec<RestartOutcome> = (0..opts.restarts)
        .into_par_iter()
        .map(|i| restart(&obj, &mut ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(i as u64)), opts.max_iters))
        .collect();
    let best = outcomes
        .iter()
        .filter(|o| o.improved())
        .min_by(|x, y| x.cost.total_cmp(&y.cost).then_with(|| lexicographic(&x.end, &y.end)));
    match best {
        Some(b) => {
            let y: Vec<f64> = b.end.iter().map(|v| v.ln()).collect();
            Ok(FitResult { model: obj.model(&y), residual: b.cost, free: free.clone(), restarts: outcomes.clone() })
        }
        None => Err(ZrpError::FitFailure {
            trace: outcomes
                .iter()
                .enumerate()
                .map(|(i, o)| format!("restart {i}: start {:?} cost {:e} -> {:?} cost {:e}", o.start, o.start_cost, o.end, o.cost))
                .collect(),
        }),
    }
}

fn lexicographic(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    a.iter().zip(b).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
}

impl FitResult {
    pub fn value(&self, p: FitParameter) -> f64 {
        p.get(&self.model)
    }
}
