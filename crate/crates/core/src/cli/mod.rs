//! Command-line front end. The parsed command line is a [`RunConfig`], which also
//! serializes to JSON (`--print-config`) and can be read back (`--config`).

pub mod verify;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::darboux::{chain_phase, dressed_potential, write_potential_csv, DressingChain, PropFunction, RadialGrid};
use crate::error::{Result, ZrpError};
use crate::gzrp::{gzrp_phase, GzrpChannel};
use crate::io::fmt_sig;
use crate::model::{fit_parameters, FitOptions, FitParameter};
use crate::model::{find_rt_minimum, sigma_a1_scan, EnergyGrid, ExperimentDataset, SilaneModel, Spacing};
use crate::multicenter::{xn_scattering_length, xn_series, yxn_series, CrossSectionSeries, XnGeometry, YxnGeometry};
use crate::scalar::BOHR2_IN_ANGSTROM2;
pub use verify::{run_suite, Check, Suite};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_VERIFY_FAILED: i32 = 3;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq, Parser, Serialize, Deserialize)]
#[command(name = "dressed-zrp", version, about = "Zero-range potential scattering: scans, checks and fits")]
pub struct RunConfig {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    pub format: Format,
    /// Write the main output here instead of stdout.
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,
    /// Report cross sections in square angstrom instead of a0^2.
    #[arg(long, global = true)]
    pub angstrom: bool,
    /// Seed for randomized checks and fit restarts.
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
    /// Load the whole configuration from a JSON file (as written by --print-config).
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Print the configuration as JSON and exit.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub print_config: bool,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Clone, Debug, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "subcommand")]
pub enum Command {
    /// Ring/polyhedron of n identical centers: phases and cross sections.
    Xn(XnArgs),
    /// Central atom with n ligands: phases and cross sections.
    Yxn(YxnArgs),
    /// Dressed silane model: A1 scan and Ramsauer–Townsend minimum.
    Silane(SilaneArgs),
    /// Dressed single-center ZRP: potential samples and chain phases.
    Dress(DressArgs),
    /// Run the built-in consistency checks.
    Verify(VerifyArgs),
    /// Fit the silane model to a measured cross section.
    Fit(FitArgs),
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
pub struct GridArgs {
    /// Lowest energy (eV).
    #[arg(long, default_value_t = 0.01)]
    pub emin: f64,
    /// Highest energy (eV).
    #[arg(long, default_value_t = 1.0)]
    pub emax: f64,
    /// Energy step (eV); linear spacing only.
    #[arg(long, conflicts_with = "count")]
    pub step: Option<f64>,
    /// Number of energies (default 1000 when no step is given).
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long, value_enum, default_value_t = Spacing::Linear)]
    pub spacing: Spacing,
}

impl GridArgs {
    pub fn grid(&self) -> Result<EnergyGrid<f64>> {
        match (self.step, self.spacing) {
            (Some(_), Spacing::Log) => Err(ZrpError::Domain("--step requires linear spacing; use --count".into())),
            (Some(step), Spacing::Linear) => EnergyGrid::linear(self.emin, self.emax, step),
            (None, spacing) => EnergyGrid::with_count(self.emin, self.emax, self.count.unwrap_or(1000), spacing),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
pub struct XnArgs {
    /// Number of centers (1-4).
    #[arg(long)]
    pub n: usize,
    /// Single-center scattering length (a0).
    #[arg(long)]
    pub a: f64,
    /// Nearest-neighbour distance (a0).
    #[arg(long = "R")]
    pub r: f64,
    /// Print only the zero-energy scattering length.
    #[arg(long)]
    pub length_only: bool,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
pub struct YxnArgs {
    /// Number of ligands (2-4).
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    #[arg(long)]
    pub a_x: f64,
    #[arg(long)]
    pub a_y: f64,
    /// Ligand–ligand distance (a0).
    #[arg(long = "R")]
    pub r: f64,
    /// Center–ligand distance (a0).
    #[arg(long = "D")]
    pub d: f64,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
pub struct ModelArgs {
    #[arg(long, default_value_t = 4.10)]
    pub a_x: f64,
    #[arg(long, default_value_t = 1.88)]
    pub a_y: f64,
    #[arg(long = "R", default_value_t = 4.51)]
    pub r: f64,
    #[arg(long = "D", default_value_t = 2.762)]
    pub d: f64,
    /// Dressing parameter of the A1 channel (a0^-1).
    #[arg(long, default_value_t = 0.185)]
    pub kappa: f64,
}

impl ModelArgs {
    pub fn model(&self) -> SilaneModel<f64> {
        SilaneModel { a_x: self.a_x, a_y: self.a_y, r: self.r, d: self.d, kappa: self.kappa }
    }
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
pub struct SilaneArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Also emit the total cross section with the dressed A1 channel.
    #[arg(long)]
    pub full_total: bool,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
pub struct DressArgs {
    #[arg(long, default_value_t = 0)]
    pub l: usize,
    /// ZRP parameter (a0^(2l+1)).
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: f64,
    /// Dressing parameters, comma separated (a0^-1).
    #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
    pub kappa: Vec<f64>,
    /// Potential sampling range (a0).
    #[arg(long, default_value_t = 0.05)]
    pub rmin: f64,
    #[arg(long, default_value_t = 20.0)]
    pub rmax: f64,
    #[arg(long, default_value_t = 400)]
    pub points: usize,
    /// Write the potential samples to a separate file.
    #[arg(long)]
    pub potential_output: Option<PathBuf>,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = Suite::All)]
    pub suite: Suite,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
pub struct FitArgs {
    /// CSV with columns E_eV, sigma and optionally sigma_err.
    #[arg(long)]
    pub data: PathBuf,
    /// Parameters to fit, comma separated.
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [FitParameter::AX, FitParameter::AY, FitParameter::Kappa])]
    pub free: Vec<FitParameter>,
    #[arg(long, default_value_t = 10)]
    pub restarts: usize,
    #[arg(long, default_value_t = 2000)]
    pub max_iters: u64,
    /// Starting model; parameters not in --free stay fixed at these values.
    #[command(flatten)]
    pub model: ModelArgs,
}

impl RunConfig {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("configuration serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| ZrpError::Input(format!("bad configuration: {e}")))
    }
}

/// Parses `argv` (program name first), runs it, and returns the process exit code.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let stdout = io::stdout();
    let stderr = io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// [`run`] with explicit output streams.
pub fn run_with<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let parsed = match RunConfig::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let text = e.render();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    let config = match &parsed.config {
        Some(path) => match std::fs::read_to_string(path).map_err(ZrpError::from).and_then(|s| RunConfig::from_json(&s)) {
            Ok(c) => RunConfig { print_config: parsed.print_config, ..c },
            Err(e) => {
                let _ = writeln!(err, "error: {}: {e}", path.display());
                return EXIT_INVALID;
            }
        },
        None => parsed,
    };
    if config.print_config {
        let _ = writeln!(out, "{}", config.to_json());
        return EXIT_OK;
    }
    match execute(&config, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INVALID
        }
    }
}

/// Runs a configuration; `Ok` carries the exit code (verification failures are not errors).
pub fn execute(config: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let Some(command) = &config.command else {
        return Err(ZrpError::Domain("no subcommand given (try --help)".into()));
    };
    match command {
        Command::Xn(a) => {
            let geom = XnGeometry::new(a.n, a.r, a.a)?;
            if a.length_only {
                let len = xn_scattering_length(&geom)?;
                match config.format {
                    Format::Csv => writeln!(out, "A = {} a0", fmt_sig(len))?,
                    Format::Json => writeln!(out, "{}", serde_json::json!({ "scattering_length_a0": len }))?,
                }
                return Ok(EXIT_OK);
            }
            let series = xn_series(&geom, &a.grid.grid()?.momenta())?;
            emit_series(config, series, out)?;
        }
        Command::Yxn(a) => {
            let geom = YxnGeometry::new(a.n, a.d, a.r, a.a_x, a.a_y)?;
            if let Some(w) = geom.constraint_warning() {
                writeln!(err, "warning: {w}")?;
            }
            let series = yxn_series(&geom, &a.grid.grid()?.momenta())?;
            emit_series(config, series, out)?;
        }
        Command::Silane(a) => {
            let model = a.model.model();
            if let Some(w) = model.geometry()?.constraint_warning() {
                writeln!(err, "warning: {w}")?;
            }
            let series = sigma_a1_scan(&model, &a.grid.grid()?, a.full_total)?;
            let (scale, unit) = if config.angstrom { (BOHR2_IN_ANGSTROM2, "A^2") } else { (1.0, "a0^2") };
            match find_rt_minimum(&series) {
                Ok(m) => writeln!(err, "RT-minimum: E={:.3} eV, sigma={} {unit}", m.e_ev, fmt_sig(m.sigma * scale))?,
                Err(ZrpError::NoMinimum) => writeln!(err, "RT-minimum: none in scanned range")?,
                Err(e) => return Err(e),
            }
            emit_series(config, series, out)?;
        }
        Command::Dress(a) => dress(config, a, out, err)?,
        Command::Verify(a) => {
            let checks = run_suite(a.suite, config.seed);
            let passed = checks.iter().all(|c| c.passed);
            match config.format {
                Format::Csv => {
                    for c in &checks {
                        writeln!(out, "{}", c.line())?;
                    }
                    let failed = checks.iter().filter(|c| !c.passed).count();
                    writeln!(out, "{} checks, {} failed", checks.len(), failed)?;
                }
                Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&checks).map_err(json_err)?)?,
            }
            return Ok(if passed { EXIT_OK } else { EXIT_VERIFY_FAILED });
        }
        Command::Fit(a) => {
            let data = ExperimentDataset::from_path(&a.data)?;
            let opts = FitOptions { free: a.free.clone(), restarts: a.restarts, seed: config.seed, max_iters: a.max_iters };
            let fit = fit_parameters(&a.model.model(), &data, &opts)?;
            let mut sink = open_output(config.output.as_deref(), out)?;
            match config.format {
                Format::Csv => {
                    let mut w = csv::Writer::from_writer(&mut sink);
                    w.write_record(["parameter", "value", "unit"])?;
                    for p in [FitParameter::AX, FitParameter::AY, FitParameter::Kappa] {
                        let unit = if p == FitParameter::Kappa { "a0^-1" } else { "a0" };
                        w.write_record([p.name(), &fmt_sig(fit.value(p)), unit])?;
                    }
                    w.write_record(["residual", &fmt_sig(fit.residual), "a0^4"])?;
                    w.flush()?;
                }
                Format::Json => writeln!(sink, "{}", serde_json::to_string_pretty(&fit).map_err(json_err)?)?,
            }
            sink.flush()?;
        }
    }
    Ok(EXIT_OK)
}

fn json_err(e: serde_json::Error) -> ZrpError {
    ZrpError::Input(e.to_string())
}

fn open_output<'a>(path: Option<&Path>, stdout: &'a mut dyn Write) -> Result<Box<dyn Write + 'a>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(stdout),
    })
}

fn emit_series(config: &RunConfig, mut series: CrossSectionSeries<f64>, out: &mut dyn Write) -> Result<()> {
    if config.angstrom {
        series.convert_to_angstrom2();
    }
    let mut sink = open_output(config.output.as_deref(), out)?;
    match config.format {
        Format::Csv => series.write_csv(&mut sink)?,
        Format::Json => {
            series.write_json(&mut sink)?;
            writeln!(sink)?;
        }
    }
    sink.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct DressedPhaseRow {
    #[serde(rename = "E_eV")]
    e_ev: f64,
    k_au: f64,
    delta_zrp_rad: f64,
    delta_dressed_rad: f64,
    sigma_dressed: f64,
}

fn dress(config: &RunConfig, a: &DressArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let channel = GzrpChannel::new(a.l, a.alpha)?;
    let chain = DressingChain::from_kappas(a.kappa.clone())?;
    let grid = a.grid.grid()?;
    let (scale, unit) = if config.angstrom { (BOHR2_IN_ANGSTROM2, "A2") } else { (1.0, "a02") };
    let rows = grid
        .energies()
        .iter()
        .zip(grid.momenta())
        .map(|(&e, k)| {
            let bare = gzrp_phase(&channel, k)?;
            let dressed = chain_phase(&channel, &chain, k)?;
            let s = dressed.delta.sin();
            let sigma = 4.0 * std::f64::consts::PI * (2 * a.l + 1) as f64 * s * s / (k * k);
            Ok(DressedPhaseRow {
                e_ev: e,
                k_au: k,
                delta_zrp_rad: bare.delta,
                delta_dressed_rad: dressed.delta,
                sigma_dressed: sigma * scale,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    // The closed-form potential is available for a single s-wave dressing step.
    let potential = if a.l == 0 && a.kappa.len() == 1 {
        let r = RadialGrid::uniform(a.rmin, a.rmax, a.points)?;
        let u = dressed_potential(&PropFunction::CoshOverR { kappa: a.kappa[0] }, 0, &r)?;
        Some((r, u))
    } else {
        writeln!(err, "note: potential samples are only emitted for l = 0 with a single kappa")?;
        None
    };

    let mut sink = open_output(config.output.as_deref(), out)?;
    match config.format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut sink);
            w.write_record(["E_eV", "k_au", "delta_zrp_rad", "delta_dressed_rad", &format!("sigma_dressed_{unit}")])?;
            for row in &rows {
                w.write_record(
                    [row.e_ev, row.k_au, row.delta_zrp_rad, row.delta_dressed_rad, row.sigma_dressed].map(fmt_sig),
                )?;
            }
            w.flush()?;
            drop(w);
            if let Some((r, u)) = &potential {
                match &a.potential_output {
                    Some(p) => write_potential_csv(BufWriter::new(File::create(p)?), r, u)?,
                    None => {
                        writeln!(sink)?;
                        write_potential_csv(&mut sink, r, u)?;
                    }
                }
            }
        }
        Format::Json => {
            let pot = potential.as_ref().map(|(r, u)| {
                let v: Vec<f64> = u.iter().map(|x| 0.5 * x).collect();
                serde_json::json!({ "r_a0": r.points(), "u_a0^-2": u, "V_hartree": v })
            });
            let doc = serde_json::json!({ "phases": rows, "potential": pot, "sigma_unit": unit });
            writeln!(sink, "{}", serde_json::to_string_pretty(&doc).map_err(json_err)?)?;
        }
    }
    sink.flush()?;
    Ok(())
}
