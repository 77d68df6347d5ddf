//! Command-line front end for the `klein` library.
//!
//! Every subcommand returns its full output as a string so that runs can be
//! compared byte for byte; [`run`] maps failures onto exit codes
//! (2 for bad input, 3 for numerical failure).

pub mod dsl;
pub mod output;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use klein::analytic::{
    barrier_scatter, coulomb_penetration, resonance_energies, step_scatter, CoulombRegime, ALPHA,
};
use klein::quad::QuadControl;
use klein::spectrum::{
    adiabatic_sweep, delta_adiabatic_sweep, delta_ledger, delta_well_energy, positron_bound,
    well_ledger, well_spectrum,
};
use klein::transfer::{build_profile, scatter_numeric, transmission_sweep};
use klein::vacuum::{
    emission_estimates, klein_modes, mode_current, pair_current, write_integrand_csv,
    CurrentSource,
};
use klein::{Mass, PotentialProfile, ScatteringResult, Segment};

use output::{json_lines, json_pretty, Cell, Format, Table};

/// Relative `--out` paths are resolved against this directory when set.
pub const OUTPUT_DIR_ENV: &str = "KLEIN_OUTPUT_DIR";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numerical(_) => 3,
            CliError::Input(_) | CliError::Io(_) => 2,
        }
    }
}

impl From<klein::Error> for CliError {
    fn from(e: klein::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Input(e.to_string())
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "klein", version, about = "Dirac scattering, bound states and pair production in one dimension")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct Common {
    /// Fermion mass.
    #[arg(long = "m", default_value_t = 1.0, global = true)]
    pub m: f64,
    /// Output format (each command has its own default).
    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,
    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Clone)]
pub struct PotentialArgs {
    /// step, barrier, well, sauter, or a path to a profile file.
    #[arg(long, default_value = "step")]
    pub potential: String,
    /// Height of the step or barrier, depth of the well.
    #[arg(long = "V", default_value_t = 5.0, allow_negative_numbers = true)]
    pub v: f64,
    /// Half-width of the barrier or well.
    #[arg(long = "a", default_value_t = 1.0)]
    pub a: f64,
    /// Slope of the Sauter ramp.
    #[arg(long, default_value_t = 0.5)]
    pub field: f64,
    /// Stair count for the Sauter ramp.
    #[arg(long, default_value_t = 400)]
    pub steps: usize,
    /// Use transfer matrices even where a closed form exists.
    #[arg(long)]
    pub numeric: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// R, T and amplitudes at one energy.
    Scatter {
        #[command(flatten)]
        pot: PotentialArgs,
        #[arg(long = "E", default_value_t = 1.5, allow_negative_numbers = true)]
        e: f64,
        #[command(flatten)]
        common: Common,
    },
    /// R(E) and T(E) on an energy grid.
    Sweep {
        #[command(flatten)]
        pot: PotentialArgs,
        #[arg(long, default_value_t = 1.01, allow_negative_numbers = true)]
        emin: f64,
        #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
        emax: f64,
        #[arg(long, default_value_t = 200)]
        esteps: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Bound states and charge ledger of a square or delta well.
    Spectrum {
        #[arg(long = "V", default_value_t = 5.0)]
        v: f64,
        #[arg(long = "a", default_value_t = 1.0)]
        a: f64,
        /// Delta well of strength lambda instead of the square well.
        #[arg(long)]
        delta: bool,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Event log of a well deepened from zero.
    Adiabatic {
        /// Final depth.
        #[arg(long = "V", default_value_t = 5.0)]
        v: f64,
        #[arg(long = "a", default_value_t = 1.0)]
        a: f64,
        #[arg(long, default_value_t = 0.01)]
        dv: f64,
        /// Sweep the delta-well strength up to lambda instead.
        #[arg(long)]
        delta: bool,
        #[arg(long, default_value_t = 3.5)]
        lambda: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Vacuum pair-production current.
    Current {
        #[command(flatten)]
        pot: PotentialArgs,
        /// Dump the integrand on this many points as CSV instead.
        #[arg(long)]
        integrand: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Klein-zone normal modes sampled on an x grid.
    Modes {
        #[arg(long = "V", default_value_t = 5.0)]
        v: f64,
        #[arg(long = "E", default_value_t = 1.5)]
        e: f64,
        #[arg(long, default_value_t = -5.0, allow_negative_numbers = true)]
        xmin: f64,
        #[arg(long, default_value_t = 5.0, allow_negative_numbers = true)]
        xmax: f64,
        #[arg(long, default_value_t = 101)]
        xsteps: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Emission estimates for a slightly supercritical well.
    Emission {
        #[arg(long = "V", default_value_t = 5.0)]
        v: f64,
        #[arg(long = "a", default_value_t = 1.0)]
        a: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Positron-to-electron density ratio at a Coulomb centre.
    Coulomb {
        #[arg(long = "Z", default_value_t = 137.036)]
        z: f64,
        /// Use the nonrelativistic ratio at this energy (needs --p).
        #[arg(long = "E")]
        e: Option<f64>,
        /// Momentum for the nonrelativistic ratio.
        #[arg(long = "p")]
        p: Option<f64>,
        #[arg(long, default_value_t = ALPHA)]
        alpha: f64,
        /// Prefactor f of the relativistic ratio.
        #[arg(long = "f-prefactor", default_value_t = 1.0)]
        f_prefactor: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Transmission resonances of the square barrier.
    Resonances {
        #[arg(long = "V", default_value_t = 5.0)]
        v: f64,
        #[arg(long = "a", default_value_t = 1.0)]
        a: f64,
        #[command(flatten)]
        common: Common,
    },
}

/// Serde name of a unit enum variant.
fn tag<T: Serialize>(v: &T) -> String {
    match serde_json::to_value(v) {
        Ok(serde_json::Value::String(s)) => s,
        _ => String::new(),
    }
}

fn mass(m: f64) -> Result<Mass, CliError> {
    Ok(Mass::new(m)?)
}

enum Builtin {
    Step,
    Barrier,
    Well,
    Sauter,
    File(PathBuf),
}

impl PotentialArgs {
    fn kind(&self) -> Builtin {
        match self.potential.as_str() {
            "step" => Builtin::Step,
            "barrier" => Builtin::Barrier,
            "well" => Builtin::Well,
            "sauter" => Builtin::Sauter,
            path => Builtin::File(PathBuf::from(path)),
        }
    }

    fn profile(&self, m: Mass) -> Result<PotentialProfile, CliError> {
        Ok(match self.kind() {
            Builtin::Step => PotentialProfile::step(self.v, m),
            Builtin::Barrier => PotentialProfile::barrier(self.v, self.a, m)?,
            Builtin::Well => build_profile(0.0, 0.0, vec![Segment::new(-self.a, self.a, -self.v)], m)?,
            Builtin::Sauter => PotentialProfile::sauter(self.field, self.v, self.steps, m)?,
            Builtin::File(path) => load_profile(&path)?,
        })
    }

    /// Closed-form scattering where one exists and `--numeric` is off.
    fn analytic(&self, e: f64, m: Mass) -> Option<klein::Result<ScatteringResult>> {
        if self.numeric {
            return None;
        }
        match self.kind() {
            Builtin::Step => Some(step_scatter(e, self.v, m)),
            Builtin::Barrier => Some(barrier_scatter(e, self.v, self.a, m)),
            Builtin::Well => Some(barrier_scatter(e, -self.v, self.a, m)),
            _ => None,
        }
    }
}

/// Read a profile file in the line format or JSON.
pub fn load_profile(path: &Path) -> Result<PotentialProfile, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    dsl::load(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn scattering_row(s: &ScatteringResult) -> Vec<Cell> {
    vec![
        s.energy.into(),
        s.r.into(),
        s.t.into(),
        s.kappa.into(),
        s.b.re.into(),
        s.b.im.into(),
        s.f.re.into(),
        s.f.im.into(),
        s.resonance.into(),
    ]
}

const SCATTER_HEADERS: [&str; 9] = ["E", "R", "T", "kappa", "B_re", "B_im", "F_re", "F_im", "resonance"];

fn emit_table(table: &Table, format: Format) -> Result<String, CliError> {
    match format {
        Format::Csv => table.to_csv(),
        Format::Json => json_pretty(&table.to_json()),
    }
}

/// Execute a parsed command and return what it prints.
pub fn execute(command: &Command) -> Result<String, CliError> {
    match command {
        Command::Scatter { pot, e, common } => {
            let m = mass(common.m)?;
            let format = common.format.unwrap_or(Format::Csv);
            let (result, extra) = match pot.analytic(*e, m) {
                Some(r) => (r?, None),
                None => {
                    let r = scatter_numeric(&pot.profile(m)?, *e)?;
                    (r.scattering, Some(r))
                }
            };
            match (format, extra) {
                (Format::Json, Some(r)) => json_pretty(&r),
                (Format::Json, None) => json_pretty(&result),
                (Format::Csv, _) => {
                    let mut t = Table::new(&SCATTER_HEADERS);
                    t.push(scattering_row(&result));
                    t.to_csv()
                }
            }
        }
        Command::Sweep {
            pot,
            emin,
            emax,
            esteps,
            common,
        } => {
            let m = mass(common.m)?;
            let mut table = Table::new(&SCATTER_HEADERS);
            if pot.analytic(*emin, m).is_some() {
                for e in klein::transfer::energy_grid(*emin, *emax, *esteps)? {
                    match pot.analytic(e, m).expect("closed form available") {
                        Ok(s) => table.push(scattering_row(&s)),
                        Err(klein::Error::Threshold { .. }) => {}
                        Err(err) => return Err(err.into()),
                    }
                }
            } else {
                let sweep = transmission_sweep(&pot.profile(m)?, *emin, *emax, *esteps)?;
                if let Some((_, err)) = sweep.failures.into_iter().next() {
                    return Err(err.into());
                }
                for r in &sweep.results {
                    table.push(scattering_row(&r.scattering));
                }
            }
            emit_table(&table, common.format.unwrap_or(Format::Csv))
        }
        Command::Spectrum {
            v,
            a,
            delta,
            lambda,
            common,
        } => {
            let m = mass(common.m)?;
            let format = common.format.unwrap_or(Format::Json);
            if *delta {
                let state = delta_well_energy(*lambda, m)?;
                let ledger = delta_ledger(*lambda)?;
                return match format {
                    Format::Json => json_pretty(&json!({
                        "lambda": lambda,
                        "parity": state.parity,
                        "E": state.energy,
                        "ledger": ledger,
                    })),
                    Format::Csv => {
                        let mut t = Table::new(&["lambda", "parity", "E", "Q_p", "Q_0", "Q_S", "Q_total"]);
                        t.push(vec![
                            (*lambda).into(),
                            tag(&state.parity).into(),
                            state.energy.into(),
                            ledger.q_p.into(),
                            ledger.q_0.into(),
                            ledger.q_s.into(),
                            ledger.q_total.into(),
                        ]);
                        t.to_csv()
                    }
                };
            }
            let levels = well_spectrum(*v, *a, m)?;
            match format {
                Format::Json => json_pretty(&json!({
                    "V": v,
                    "a": a,
                    "states": levels.states,
                    "supercritical": levels.supercritical,
                    "ledger": well_ledger(*v, *a, m)?,
                    "positron_bound": positron_bound(*v, *a, m),
                })),
                Format::Csv => {
                    let mut t = Table::new(&["N", "parity", "E", "p", "residual"]);
                    for s in &levels.states {
                        t.push(vec![
                            s.n.into(),
                            tag(&s.parity).into(),
                            s.energy.into(),
                            s.well_momentum.into(),
                            s.residual.into(),
                        ]);
                    }
                    t.to_csv()
                }
            }
        }
        Command::Adiabatic {
            v,
            a,
            dv,
            delta,
            lambda,
            common,
        } => {
            let m = mass(common.m)?;
            let events = if *delta {
                delta_adiabatic_sweep(*lambda, m)
            } else {
                adiabatic_sweep(*a, m, *v, *dv)?
            };
            match common.format.unwrap_or(Format::Csv) {
                Format::Json => json_lines(&events),
                Format::Csv => {
                    let mut t = Table::new(&[
                        if *delta { "lambda" } else { "V" },
                        "event",
                        "parity",
                        "N",
                        "E",
                        "Q_p",
                        "Q_0",
                        "Q_S",
                        "Q_total",
                    ]);
                    for ev in &events {
                        t.push(vec![
                            ev.v.into(),
                            tag(&ev.event).into(),
                            tag(&ev.parity).into(),
                            ev.n.into(),
                            ev.energy.into(),
                            ev.ledger.q_p.into(),
                            ev.ledger.q_0.into(),
                            ev.ledger.q_s.into(),
                            ev.ledger.q_total.into(),
                        ]);
                    }
                    t.to_csv()
                }
            }
        }
        Command::Current {
            pot,
            integrand,
            common,
        } => {
            let m = mass(common.m)?;
            let source = match pot.kind() {
                Builtin::Step if !pot.numeric => CurrentSource::Step { potential: pot.v, mass: m },
                _ => CurrentSource::Profile(pot.profile(m)?),
            };
            if let Some(n) = integrand {
                let mut buf = Vec::new();
                write_integrand_csv(&source, *n, &mut buf)?;
                return String::from_utf8(buf).map_err(|e| CliError::Io(e.to_string()));
            }
            let report = pair_current(&source, QuadControl::default())?;
            match common.format.unwrap_or(Format::Json) {
                Format::Json => json_pretty(&report),
                Format::Csv => {
                    let mut t = Table::new(&[
                        "j_vacuum",
                        "j_l",
                        "j_r",
                        "E_min",
                        "E_max",
                        "quadrature_error",
                        "evaluations",
                        "subcritical",
                    ]);
                    t.push(vec![
                        report.j_vacuum.into(),
                        report.j_l.into(),
                        report.j_r.into(),
                        report.e_range.0.into(),
                        report.e_range.1.into(),
                        report.quadrature_error.into(),
                        report.evaluations.into(),
                        report.subcritical.into(),
                    ]);
                    t.to_csv()
                }
            }
        }
        Command::Modes {
            v,
            e,
            xmin,
            xmax,
            xsteps,
            common,
        } => {
            let m = mass(common.m)?;
            let (l, r) = klein_modes(*e, *v, m)?;
            let xs = klein::transfer::energy_grid(*xmin, *xmax, *xsteps)?;
            let mut t = Table::new(&["x", "mode", "upper_re", "upper_im", "lower_re", "lower_im", "j"]);
            for (name, mode) in [("L", &l), ("R", &r)] {
                for &x in &xs {
                    let s = mode.at(x);
                    t.push(vec![
                        x.into(),
                        name.into(),
                        s.upper.re.into(),
                        s.upper.im.into(),
                        s.lower.re.into(),
                        s.lower.im.into(),
                        mode_current(mode, x).into(),
                    ]);
                }
            }
            match common.format.unwrap_or(Format::Csv) {
                Format::Csv => t.to_csv(),
                Format::Json => json_pretty(&json!({ "modes": [l, r], "samples": t.to_json() })),
            }
        }
        Command::Emission { v, a, common } => {
            let est = emission_estimates(*v, *a, mass(common.m)?)?;
            match common.format.unwrap_or(Format::Json) {
                Format::Json => json_pretty(&est),
                Format::Csv => {
                    let mut t = Table::new(&["N", "E_N"]);
                    for (i, e) in est.energies.iter().enumerate() {
                        t.push(vec![(i + 1).into(), (*e).into()]);
                    }
                    t.to_csv()
                }
            }
        }
        Command::Coulomb {
            z,
            e,
            p,
            alpha,
            f_prefactor,
            common,
        } => {
            let regime = match (e, p) {
                (Some(energy), Some(momentum)) => CoulombRegime::Nonrelativistic {
                    energy: *energy,
                    momentum: *momentum,
                },
                (None, None) => CoulombRegime::Relativistic,
                _ => {
                    return Err(CliError::Input(
                        "the nonrelativistic ratio needs both --E and --p".into(),
                    ))
                }
            };
            let ratio = coulomb_penetration(*z, regime, *alpha, *f_prefactor)?;
            match common.format.unwrap_or(Format::Json) {
                Format::Json => json_pretty(&ratio),
                Format::Csv => {
                    let mut t = Table::new(&["Z", "alpha", "regime", "rho", "f"]);
                    let name = match regime {
                        CoulombRegime::Relativistic => "relativistic",
                        CoulombRegime::Nonrelativistic { .. } => "nonrelativistic",
                    };
                    t.push(vec![ratio.z.into(), ratio.alpha.into(), name.into(), ratio.rho.into(), ratio.f.into()]);
                    t.to_csv()
                }
            }
        }
        Command::Resonances { v, a, common } => {
            let m = mass(common.m)?;
            let mut t = Table::new(&["N", "E"]);
            for r in resonance_energies(*v, *a, m) {
                t.push(vec![r.n.into(), r.energy.into()]);
            }
            emit_table(&t, common.format.unwrap_or(Format::Csv))
        }
    }
}

fn common(command: &Command) -> &Common {
    match command {
        Command::Scatter { common, .. }
        | Command::Sweep { common, .. }
        | Command::Spectrum { common, .. }
        | Command::Adiabatic { common, .. }
        | Command::Current { common, .. }
        | Command::Modes { common, .. }
        | Command::Emission { common, .. }
        | Command::Coulomb { common, .. }
        | Command::Resonances { common, .. } => common,
    }
}

fn resolve_out(path: &Path) -> PathBuf {
    match std::env::var_os(OUTPUT_DIR_ENV) {
        Some(dir) if path.is_relative() => PathBuf::from(dir).join(path),
        _ => path.to_path_buf(),
    }
}

/// Parse `args`, run the command and write its output. Returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn std::io::Write, stderr: &mut dyn std::io::Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                stdout.write_all(text.as_bytes())
            } else {
                stderr.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = execute(&cli.command).and_then(|text| match &common(&cli.command).out {
        Some(path) => std::fs::write(resolve_out(path), text)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(e.to_string())),
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
