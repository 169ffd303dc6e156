//! `barrierlab`: transmission sweeps, wavefunctions, dwell times, resonance
//! searches, oracle comparisons and unit conversion from the command line.
//!
//! Exit status: 0 on success, 2 on invalid input, 3 on numerical failure.

mod output;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use barrierlab_core::analysis::{dwell_time, find_resonances, restore_units, turning_interval, ResonanceSearch};
use barrierlab_core::oracle::{
    integrate_scattering, needs_truncation, IntegratorConfig, OracleResult, TruncatedPotential,
};
use barrierlab_core::units::convert;
use barrierlab_core::{
    probability_density, solve, transmission_sweep, CompositePotential, ConstantSet, Error, SampledPotential,
    UnitSystem,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use output::{emit, fmt_num, render_json, Format, Table};

#[derive(Parser)]
#[command(name = "barrierlab", version, about = "Tunneling through parabolic and sech^2 barriers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// T(E) and R(E) on an energy grid, plus any refined resonance energies.
    Transmission {
        #[command(flatten)]
        potential: PotentialArgs,
        #[command(flatten)]
        grid: EnergyGrid,
        /// Evaluate the evenly spaced grid only.
        #[arg(long)]
        uniform: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// psi(x) and |psi|^2 at one energy.
    Wavefunction {
        #[command(flatten)]
        potential: PotentialArgs,
        #[arg(long)]
        energy: f64,
        #[arg(long, allow_hyphen_values = true)]
        x_min: f64,
        #[arg(long, allow_hyphen_values = true)]
        x_max: f64,
        #[arg(long, default_value_t = 1000)]
        points: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Dwell time over an interval.
    Dwell {
        #[command(flatten)]
        potential: PotentialArgs,
        #[arg(long)]
        energy: f64,
        /// `turning:i:j` (1-based turning points) or `x1,x2`.
        #[arg(long, allow_hyphen_values = true)]
        interval: String,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Energies where T reaches 1.
    Resonance {
        #[command(flatten)]
        potential: PotentialArgs,
        #[command(flatten)]
        grid: EnergyGrid,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Compare against the direct ODE integrator, or run it on sampled data.
    OracleCheck {
        #[arg(long, required_unless_present = "sampled", conflicts_with = "sampled")]
        potential: Option<PathBuf>,
        /// CSV of `x,U` samples, linearly interpolated.
        #[arg(long)]
        sampled: Option<PathBuf>,
        /// Unit system of the inputs (and of `--sampled` data).
        #[arg(long)]
        units: Option<String>,
        #[arg(long, value_enum, default_value_t = Constants::Rounded)]
        constants: Constants,
        #[command(flatten)]
        grid: EnergyGrid,
        #[arg(long, default_value_t = 1e-9)]
        rel_tol: f64,
        /// Largest accepted |T - T_oracle|.
        #[arg(long, default_value_t = 1e-6)]
        tolerance: f64,
        /// Half-width of the window a whole-line sech^2 barrier is cut to, in 1/alpha.
        #[arg(long, default_value_t = 30.0)]
        truncate: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Convert a value between named units, or a potential between unit systems.
    Units {
        #[arg(long, allow_hyphen_values = true, required_unless_present = "potential")]
        value: Option<f64>,
        #[arg(long, requires = "value")]
        from: Option<String>,
        /// Unit name, or unit system name with `--potential`.
        #[arg(long)]
        to: String,
        #[arg(long, value_enum, default_value_t = Constants::Rounded)]
        constants: Constants,
        #[arg(long, conflicts_with = "value", requires = "energy")]
        potential: Option<PathBuf>,
        #[arg(long)]
        energy: Option<f64>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct PotentialArgs {
    /// JSON potential document.
    #[arg(long)]
    potential: PathBuf,
    /// Unit system for the command-line values and the output (default: the document's).
    #[arg(long)]
    units: Option<String>,
}

#[derive(Args)]
struct EnergyGrid {
    #[arg(long)]
    e_min: f64,
    #[arg(long)]
    e_max: f64,
    #[arg(long, default_value_t = 500)]
    points: usize,
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Constants {
    Rounded,
    Codata,
}

impl From<Constants> for ConstantSet {
    fn from(c: Constants) -> Self {
        match c {
            Constants::Rounded => ConstantSet::Rounded,
            Constants::Codata => ConstantSet::Codata,
        }
    }
}

enum Failure {
    Invalid(String),
    Numerical(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Invalid(_) => 2,
            Failure::Numerical(_) => 3,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_validation() {
            Failure::Invalid(e.to_string())
        } else {
            Failure::Numerical(e.to_string())
        }
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = configure_threads().and_then(|()| run(cli.command));
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (kind, message) = match &f {
                Failure::Invalid(m) => ("validation", m),
                Failure::Numerical(m) => ("numerical", m),
            };
            eprintln!("{}", json!({ "error": kind, "exit_code": f.code(), "message": message }));
            ExitCode::from(f.code())
        }
    }
}

fn configure_threads() -> Outcome {
    let Ok(raw) = std::env::var("BARRIERLAB_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Invalid(format!("BARRIERLAB_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Numerical(format!("thread pool: {e}")))
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Transmission { potential, grid, uniform, out } => {
            transmission(&potential.load()?, &grid, uniform, &out)
        }
        Command::Wavefunction { potential, energy, x_min, x_max, points, out } => {
            wavefunction(&potential.load()?, energy, (x_min, x_max, points), &out)
        }
        Command::Dwell { potential, energy, interval, out } => dwell(&potential.load()?, energy, &interval, &out),
        Command::Resonance { potential, grid, out } => resonance(&potential.load()?, &grid, &out),
        Command::OracleCheck { potential, sampled, units, constants, grid, rel_tol, tolerance, truncate, out } => {
            let cfg = IntegratorConfig { rel_tol, ..IntegratorConfig::default() };
            match (potential, sampled) {
                (Some(path), _) => {
                    let p = PotentialArgs { potential: path, units }.load()?;
                    oracle_check(&p, &grid, &cfg, tolerance, truncate, &out)
                }
                (None, Some(path)) => {
                    let units = UnitSystem::by_name(units.as_deref().unwrap_or("atomic"), constants.into())?;
                    let s = SampledPotential::from_csv(units, &read(&path)?)?;
                    oracle_sampled(&s, &grid, &cfg, &out)
                }
                (None, None) => Err(Failure::Invalid("either --potential or --sampled is required".into())),
            }
        }
        Command::Units { value, from, to, constants, potential, energy, output } => match (potential, value) {
            (Some(path), _) => {
                let p = PotentialArgs { potential: path, units: None }.load()?;
                let energy = energy.ok_or_else(|| Failure::Invalid("--energy is required with --potential".into()))?;
                units_potential(&p, energy, &to, output.as_deref())
            }
            (None, Some(v)) => {
                let from = from.ok_or_else(|| Failure::Invalid("--from is required with --value".into()))?;
                let converted = convert(v, &from, &to, constants.into())?;
                write(&format!("{}\n", fmt_num(converted)), output.as_deref())
            }
            (None, None) => Err(Failure::Invalid("either --value or --potential is required".into())),
        },
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))
}

fn write(text: &str, path: Option<&Path>) -> Outcome {
    emit(text, path).map_err(|e| {
        let target = path.map_or("stdout".to_string(), |p| p.display().to_string());
        Failure::Invalid(format!("cannot write {target}: {e}"))
    })
}

impl PotentialArgs {
    fn load(&self) -> Result<CompositePotential, Failure> {
        let p = CompositePotential::from_json(&read(&self.potential)?)?;
        match &self.units {
            None => Ok(p),
            Some(name) => {
                let target = UnitSystem::by_name(name, p.units().constants)?;
                if target.name == p.units().name {
                    Ok(p)
                } else {
                    Ok(p.convert_units(&target)?)
                }
            }
        }
    }
}

impl EnergyGrid {
    fn energies(&self) -> Result<Vec<f64>, Failure> {
        if !(self.e_min > 0.0 && self.e_min <= self.e_max && self.e_max.is_finite()) {
            return Err(Failure::Invalid(format!("need 0 < e-min <= e-max, got [{}, {}]", self.e_min, self.e_max)));
        }
        if self.points == 0 {
            return Err(Failure::Invalid("--points must be at least 1".into()));
        }
        Ok(linspace(self.e_min, self.e_max, self.points))
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let h = (hi - lo) / (n - 1) as f64;
    (0..n).map(|i| if i + 1 == n { hi } else { lo + h * i as f64 }).collect()
}

fn units_json(u: &UnitSystem) -> Value {
    json!({
        "name": u.name,
        "constants": u.constants,
        "energy": u.energy_unit.name,
        "length": u.length_unit.name,
        "time": u.time_unit.name,
    })
}

fn transmission(p: &CompositePotential, grid: &EnergyGrid, uniform: bool, out: &OutputArgs) -> Outcome {
    let mut energies = grid.energies()?;
    // Peaks narrower than the grid step would otherwise be missed entirely.
    if !uniform && grid.points >= 3 {
        energies.extend(find_resonances(p, grid.e_min, grid.e_max, grid.points)?.energies());
        energies.sort_by(f64::total_cmp);
        energies.dedup();
    }
    let sweep = transmission_sweep(p, &energies);
    if let Some(bad) = sweep.iter().find(|s| s.error.is_some()) {
        return Err(Failure::Numerical(format!("E = {}: {}", bad.energy, bad.error.as_deref().unwrap_or(""))));
    }
    let text = match out.format {
        Format::Csv => {
            let mut t = Table::new(&["energy", "transmission", "reflection"]);
            for s in &sweep {
                t.push_nums(&[s.energy, s.big_t, s.big_r]);
            }
            t.render()
        }
        Format::Json => render_json(&json!({
            "unit_system": units_json(p.units()),
            "points": sweep.iter().map(|s| json!({
                "energy": s.energy, "transmission": s.big_t, "reflection": s.big_r,
            })).collect::<Vec<_>>(),
        })),
    };
    write(&text, out.output.as_deref())
}

fn wavefunction(
    p: &CompositePotential,
    energy: f64,
    (x_min, x_max, n): (f64, f64, usize),
    out: &OutputArgs,
) -> Outcome {
    if !(x_min < x_max && x_min.is_finite() && x_max.is_finite()) || n < 2 {
        return Err(Failure::Invalid(format!(
            "need x-min < x-max and at least 2 points, got [{x_min}, {x_max}] / {n}"
        )));
    }
    let sol = solve(p, energy)?;
    let mut rows = Vec::with_capacity(n);
    for x in linspace(x_min, x_max, n) {
        let psi = sol.psi(x)?;
        rows.push([x, psi.re, psi.im, probability_density(&sol, x)?, p.evaluate(x)]);
    }
    let text = match out.format {
        Format::Csv => {
            let mut t = Table::new(&["x", "psi_re", "psi_im", "density", "potential"]);
            for r in &rows {
                t.push_nums(r);
            }
            t.render()
        }
        Format::Json => render_json(&json!({
            "unit_system": units_json(p.units()),
            "energy": energy,
            "transmission": sol.big_t,
            "reflection": sol.big_r,
            "points": rows.iter().map(|r| json!({
                "x": r[0], "psi_re": r[1], "psi_im": r[2], "density": r[3], "potential": r[4],
            })).collect::<Vec<_>>(),
        })),
    };
    write(&text, out.output.as_deref())
}

/// `turning:i:j` or `x1,x2`.
fn parse_interval(spec: &str, p: &CompositePotential, energy: f64) -> Result<(f64, f64), Failure> {
    let bad = || Failure::Invalid(format!("interval must be turning:i:j or x1,x2, got {spec:?}"));
    if let Some(rest) = spec.strip_prefix("turning:") {
        let (i, j) = rest.split_once(':').ok_or_else(bad)?;
        let i: usize = i.trim().parse().map_err(|_| bad())?;
        let j: usize = j.trim().parse().map_err(|_| bad())?;
        return Ok(turning_interval(p, energy, i, j)?);
    }
    let (a, b) = spec.split_once(',').ok_or_else(bad)?;
    let a: f64 = a.trim().parse().map_err(|_| bad())?;
    let b: f64 = b.trim().parse().map_err(|_| bad())?;
    Ok((a, b))
}

fn dwell(p: &CompositePotential, energy: f64, interval: &str, out: &OutputArgs) -> Outcome {
    let (x1, x2) = parse_interval(interval, p, energy)?;
    let sol = solve(p, energy)?;
    let report = dwell_time(&sol, p, x1, x2)?;
    let text = match out.format {
        Format::Csv => {
            let mut t = Table::new(&["x1", "x2", "energy", "j_in", "integral", "tau", "time_unit"]);
            let [a, b] = report.interval;
            let mut row: Vec<String> =
                [a, b, report.energy, report.j_in, report.integral, report.tau].iter().map(|&v| fmt_num(v)).collect();
            row.push(report.time_unit.clone());
            t.push(row);
            t.render()
        }
        Format::Json => {
            let mut v = serde_json::to_value(&report).expect("report serializes");
            v["units"] = units_json(p.units());
            render_json(&v)
        }
    };
    write(&text, out.output.as_deref())
}

fn resonance(p: &CompositePotential, grid: &EnergyGrid, out: &OutputArgs) -> Outcome {
    grid.energies()?;
    let search = find_resonances(p, grid.e_min, grid.e_max, grid.points.max(3))?;
    let found = match &search {
        ResonanceSearch::TriviallyTransparent => {
            eprintln!("{}", json!({ "note": "no barrier: transmission is 1 at every energy" }));
            Vec::new()
        }
        ResonanceSearch::Found(v) => v.clone(),
    };
    let text = match out.format {
        Format::Csv => {
            let mut t = Table::new(&["energy", "transmission"]);
            for r in &found {
                t.push_nums(&[r.energy, r.big_t]);
            }
            t.render()
        }
        Format::Json => render_json(&json!({
            "unit_system": units_json(p.units()),
            "trivially_transparent": matches!(search, ResonanceSearch::TriviallyTransparent),
            "resonances": found,
        })),
    };
    write(&text, out.output.as_deref())
}

fn oracle_check(
    p: &CompositePotential,
    grid: &EnergyGrid,
    cfg: &IntegratorConfig,
    tolerance: f64,
    truncate: f64,
    out: &OutputArgs,
) -> Outcome {
    let energies = grid.energies()?;
    let window = match p.as_landau() {
        Some(s) if needs_truncation(p) => Some(TruncatedPotential::around_center(p, truncate / s.alpha_inv)?),
        _ => None,
    };
    let rows: Vec<Result<[f64; 5], Error>> = energies
        .par_iter()
        .map(|&e| {
            let exact = solve(p, e)?.big_t;
            let o = match &window {
                Some(w) => integrate_scattering(w, e, cfg)?,
                None => integrate_scattering(p, e, cfg)?,
            };
            Ok([e, exact, o.big_t, (exact - o.big_t).abs(), o.error_estimate])
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>, _>>()?;
    let worst = rows.iter().map(|r| r[3]).fold(0.0, f64::max);
    let text = match out.format {
        Format::Csv => {
            let mut t = Table::new(&["energy", "transmission", "oracle_transmission", "difference", "oracle_error"]);
            for r in &rows {
                t.push_nums(r);
            }
            t.render()
        }
        Format::Json => render_json(&json!({
            "unit_system": units_json(p.units()),
            "tolerance": tolerance,
            "max_difference": worst,
            "points": rows.iter().map(|r| json!({
                "energy": r[0], "transmission": r[1], "oracle_transmission": r[2],
                "difference": r[3], "oracle_error": r[4],
            })).collect::<Vec<_>>(),
        })),
    };
    write(&text, out.output.as_deref())?;
    if worst > tolerance {
        return Err(Failure::Numerical(format!("max |T - T_oracle| = {worst:e} exceeds {tolerance:e}")));
    }
    Ok(())
}

fn oracle_sampled(s: &SampledPotential, grid: &EnergyGrid, cfg: &IntegratorConfig, out: &OutputArgs) -> Outcome {
    let energies = grid.energies()?;
    let rows: Vec<Result<OracleResult, Error>> =
        energies.par_iter().map(|&e| integrate_scattering(s, e, cfg)).collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>, _>>()?;
    let units = barrierlab_core::oracle::OracleTarget::units(s);
    let text = match out.format {
        Format::Csv => {
            let mut t = Table::new(&["energy", "transmission", "reflection", "error_estimate"]);
            for (e, o) in energies.iter().zip(&rows) {
                t.push_nums(&[*e, o.big_t, o.big_r, o.error_estimate]);
            }
            t.render()
        }
        Format::Json => render_json(&json!({
            "unit_system": units_json(units),
            "points": energies.iter().zip(&rows).map(|(e, o)| json!({
                "energy": e, "transmission": o.big_t, "reflection": o.big_r, "error_estimate": o.error_estimate,
            })).collect::<Vec<_>>(),
        })),
    };
    write(&text, out.output.as_deref())
}

fn units_potential(p: &CompositePotential, energy: f64, to: &str, output: Option<&Path>) -> Outcome {
    let target = UnitSystem::by_name(to, p.units().constants)?;
    let restored = restore_units(p, energy, &target)?;
    let mut v = serde_json::to_value(&restored).expect("parameters serialize");
    v["units"] = units_json(&target);
    v["potential"] = serde_json::to_value(restored.potential.to_document()).expect("document serializes");
    write(&render_json(&v), output)
}
