//! The dressed `YX_4` silane model: energy grids, the dressed A1 cross section,
//! the Ramsauer–Townsend minimum, and experimental datasets.

mod fit;

use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result, ZrpError};
use crate::multicenter::{partial_cross_section, yxn_phase_scan, CrossSectionSeries, YxnGeometry};
use crate::scalar::{k_from_ev, Real};

pub use fit::{fit_parameters, sum_of_squares, FitOptions, FitParameter, FitResult, RestartOutcome};

/// Column holding the dressed A1 cross section.
pub const SIGMA_A1_COLUMN: &str = "sigma_A1_dressed";
/// Column holding the total with the dressed A1 channel.
pub const SIGMA_TOTAL_DRESSED_COLUMN: &str = "sigma_total_dressed";

/// Five-parameter `YX_4` model with a single dressing eigenvalue on the A1 channel.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SilaneModel<T> {
    pub a_x: T,
    pub a_y: T,
    /// X–X distance.
    pub r: T,
    /// Y–X distance.
    pub d: T,
    pub kappa: T,
}

impl<T: Real> Default for SilaneModel<T> {
    fn default() -> Self {
        Self {
            a_x: T::lit(4.10),
            a_y: T::lit(1.88),
            r: T::lit(4.51),
            d: T::lit(2.762),
            kappa: T::lit(0.185),
        }
    }
}

impl<T: Real> SilaneModel<T> {
    pub fn geometry(&self) -> Result<YxnGeometry<T>> {
        if !(self.kappa > T::zero()) {
            return domain("dressing parameter kappa must be positive");
        }
        YxnGeometry::new(4, self.d, self.r, self.a_x, self.a_y)
    }

    /// Dressed A1 phase from the undressed one: `delta0 - atan(k / kappa)`.
    pub fn dress(&self, delta0: T, k: T) -> T {
        delta0 - (k / self.kappa).atan()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Log,
}

/// Strictly increasing positive energies in eV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyGrid<T> {
    energies: Vec<T>,
}

impl<T: Real> EnergyGrid<T> {
    pub fn new(energies: Vec<T>) -> Result<Self> {
        if energies.iter().any(|&e| !(e > T::zero()) || !e.is_finite()) {
            return domain("energies must be positive and finite");
        }
        if energies.windows(2).any(|w| !(w[1] > w[0])) {
            return domain("energies must be strictly increasing");
        }
        Ok(Self { energies })
    }

    /// `emin, emin + step, ...` up to `emax` (inclusive within round-off).
    pub fn linear(emin: T, emax: T, step: T) -> Result<Self> {
        if !(step > T::zero()) || !(emax >= emin) {
            return domain("need step > 0 and emax >= emin");
        }
        let count = ((emax - emin) / step + T::lit(1e-9)).floor().to_usize().unwrap_or(0) + 1;
        Self::new((0..count).map(|i| emin + step * T::from_count(i)).collect())
    }

    /// `count` points from `emin` to `emax`, both included.
    pub fn with_count(emin: T, emax: T, count: usize, spacing: Spacing) -> Result<Self> {
        if count < 2 || !(emax > emin) {
            return domain("need at least two points and emax > emin");
        }
        let last = T::from_count(count - 1);
        let energies = match spacing {
            Spacing::Linear => (0..count).map(|i| emin + (emax - emin) * T::from_count(i) / last).collect(),
            Spacing::Log => {
                if !(emin > T::zero()) {
                    return domain("log spacing needs emin > 0");
                }
                let ratio = (emax / emin).ln();
                (0..count).map(|i| emin * (ratio * T::from_count(i) / last).exp()).collect()
            }
        };
        Self::new(energies)
    }

    pub fn energies(&self) -> &[T] {
        &self.energies
    }

    pub fn momenta(&self) -> Vec<T> {
        self.energies.iter().map(|&e| k_from_ev(e)).collect()
    }

    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }
}

/// Dressed A1 cross sections (a0^2) at increasing momenta.
pub fn sigma_a1_at<T: Real>(model: &SilaneModel<T>, ks: &[T]) -> Result<Vec<T>> {
    let geom = model.geometry()?;
    Ok(yxn_phase_scan(&geom, ks)?
        .iter()
        .map(|p| partial_cross_section(model.dress(p.delta0, p.k), p.k))
        .collect())
}

/// `YX_4` scan with the dressed A1 cross section appended as [`SIGMA_A1_COLUMN`].
/// With `full_total`, also appends [`SIGMA_TOTAL_DRESSED_COLUMN`]: the degeneracy-weighted
/// total in which only the A1 channel is dressed.
pub fn sigma_a1_scan<T: Real>(
    model: &SilaneModel<T>,
    grid: &EnergyGrid<T>,
    full_total: bool,
) -> Result<CrossSectionSeries<T>> {
    let geom = model.geometry()?;
    let ks = grid.momenta();
    let phases = yxn_phase_scan(&geom, &ks)?;
    let mut series = CrossSectionSeries::new(vec![1, 1, geom.n - 1]);
    for p in &phases {
        series.push(p.k, vec![p.delta0, p.delta1, p.delta2])?;
    }
    // keep the exact requested energies rather than the k round trip
    for (row, &e) in series.rows.iter_mut().zip(grid.energies()) {
        row.e_ev = e;
    }
    let a1: Vec<T> = phases.iter().map(|p| partial_cross_section(model.dress(p.delta0, p.k), p.k)).collect();
    if full_total {
        let totals = series.rows.iter().zip(&a1).map(|(row, &s)| row.total - row.sigmas[0] + s).collect();
        series.add_column(SIGMA_A1_COLUMN, a1)?;
        series.add_column(SIGMA_TOTAL_DRESSED_COLUMN, totals)?;
    } else {
        series.add_column(SIGMA_A1_COLUMN, a1)?;
    }
    Ok(series)
}

/// Minimum located by a parabola through the lowest interior local minimum and its neighbours.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RtMinimum<T> {
    pub e_ev: T,
    pub sigma: T,
}

pub fn find_minimum<T: Real>(energies: &[T], sigma: &[T]) -> Result<RtMinimum<T>> {
    if energies.len() != sigma.len() || energies.len() < 3 {
        return domain("minimum search needs at least three matching samples");
    }
    let best = (1..sigma.len() - 1)
        .filter(|&i| sigma[i] < sigma[i - 1] && sigma[i] <= sigma[i + 1])
        .min_by(|&i, &j| sigma[i].partial_cmp(&sigma[j]).unwrap_or(std::cmp::Ordering::Equal))
        .ok_or(ZrpError::NoMinimum)?;
    let (x0, x1, x2) = (energies[best - 1], energies[best], energies[best + 1]);
    let (y0, y1, y2) = (sigma[best - 1], sigma[best], sigma[best + 1]);
    // vertex of the interpolating parabola (Newton divided differences)
    let d01 = (y1 - y0) / (x1 - x0);
    let d12 = (y2 - y1) / (x2 - x1);
    let c = (d12 - d01) / (x2 - x0);
    if !(c > T::zero()) {
        return Ok(RtMinimum { e_ev: x1, sigma: y1 });
    }
    let b = d01 - c * (x0 + x1);
    let xv = (-b / (T::lit(2.0) * c)).max(x0).min(x2);
    // a cross section cannot dip below zero; the parabola can near a node
    let yv = (y0 + d01 * (xv - x0) + c * (xv - x0) * (xv - x1)).max(T::zero());
    Ok(RtMinimum { e_ev: xv, sigma: yv })
}

/// Ramsauer–Townsend minimum of a scan: uses [`SIGMA_A1_COLUMN`] when present,
/// else the total.
pub fn find_rt_minimum<T: Real>(series: &CrossSectionSeries<T>) -> Result<RtMinimum<T>> {
    let sigma = series
        .column(SIGMA_A1_COLUMN)
        .unwrap_or_else(|| series.rows.iter().map(|r| r.total).collect());
    find_minimum(&series.energies(), &sigma)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DataPoint {
    #[serde(rename = "E_eV")]
    pub e_ev: f64,
    pub sigma: f64,
    #[serde(default)]
    pub sigma_err: Option<f64>,
}

/// Measured cross sections read from `E_eV,sigma[,sigma_err]` CSV.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentDataset {
    pub source: String,
    pub points: Vec<DataPoint>,
}

impl ExperimentDataset {
    pub fn new(source: impl Into<String>, points: Vec<DataPoint>) -> Result<Self> {
        if points.iter().any(|p| !(p.e_ev > 0.0) || !(p.sigma > 0.0) || !p.sigma.is_finite()) {
            return Err(ZrpError::Input("dataset needs E > 0 and sigma > 0 in every row".into()));
        }
        if points.windows(2).any(|w| !(w[1].e_ev > w[0].e_ev)) {
            return Err(ZrpError::Input("dataset energies must be strictly increasing".into()));
        }
        Ok(Self { source: source.into(), points })
    }

    pub fn from_reader<R: Read>(source: impl Into<String>, reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.get(0) != Some("E_eV") || headers.get(1) != Some("sigma") {
            return Err(ZrpError::Input(format!(
                "expected header E_eV,sigma[,sigma_err], found {}",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let points = rdr.deserialize().collect::<std::result::Result<Vec<DataPoint>, _>>()?;
        Self::new(source, points)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::from_reader(path.display().to_string(), file)
    }

    pub fn energies(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.e_ev).collect()
    }

    pub fn sigmas(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.sigma).collect()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}
