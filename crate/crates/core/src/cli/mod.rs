//! The `talbot` command line.
//!
//! Parameters are quantity strings with units (`990nm`, `5.55e-5rad/s`). They
//! come from a preset, then a `key = value` config file, then flags; later
//! sources override earlier ones. Exit status is 0 on success, 1 for bad input
//! and 2 when a numerical method fails to converge.

mod params;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::budget::{evaluate_budget, BudgetInputs, TorsionInput};
use crate::error::{Error, Result};
use crate::fringe::{extract_visibility, synthesize_scan, FringeScan, Noise};
use crate::inertial::{
    coriolis_reduction, coriolis_shift, gravity_reduction, gravity_shift, mass_bound_fixed_length,
    mass_bound_fixed_period, sagnac_phase, velocity_selection_limit,
};
use crate::model::{talbot_length, BeamModel, InertialEnvironment, InterferometerGeometry};
use crate::numfmt::sci;
use crate::oracle::{velocity_average_oracle, visibility_oracle, Perturbation, TrajectoryScenario};
use crate::specfun::QuadratureSpec;
use crate::spectrum::{
    analyze_trace, isolation_gain, predict_sweep, AccelTrace, SweepMode, DEFAULT_SENSITIVITY,
};
use crate::units::{AMU, STANDARD_GRAVITY};
use crate::vibration::{
    gaussian_reduction, independent_reduction, pendulum_reduction, pendulum_shift,
    torsion_reduction, torsion_shift, torsion_static_limit, CommonPendulum, GaussianJitter,
    IndependentHarmonic, TorsionPendulum, VibrationMode,
};

pub use params::{parse_range, ParamSet, KEYS, PRESETS};

macro_rules! param_flags {
    ($($field:ident => $name:literal : $help:literal),* $(,)?) => {
        #[derive(Debug, Args)]
        struct ParamFlags {
            $(
                #[arg(long = $name, global = true, value_name = "VALUE", allow_hyphen_values = true, help = $help)]
                $field: Option<String>,
            )*
        }

        impl ParamFlags {
            fn pairs(&self) -> Vec<(&'static str, Option<&str>)> {
                vec![$(($name, self.$field.as_deref())),*]
            }
        }
    };
}

param_flags! {
    d => "d": "grating period, e.g. 990nm",
    l => "L": "grating separation, e.g. 0.38m",
    n => "N": "Talbot order",
    theta => "theta": "grating-bar tilt, e.g. 1mrad",
    mass => "mass": "particle mass, e.g. 840amu",
    v => "v": "mean forward velocity, e.g. 200m/s",
    sigma_v => "sigma-v": "velocity standard deviation",
    omega => "omega": "rotation rate parallel to the bars, e.g. 5.55e-5rad/s",
    g => "g": "gravitational acceleration [default 9.81m/s^2]",
    a => "A": "vibration amplitude",
    f => "f": "frequency, or start:stop:step range such as 1:1000:1Hz",
    phi => "phi": "oscillation phase at the first grating [default 0rad]",
    omega_t => "omega-t": "peak angular velocity of the torsion oscillation",
    z0 => "z0": "first-grating position relative to the torsion pivot",
    a1 => "A1": "amplitude of grating 1",
    a2 => "A2": "amplitude of grating 2",
    a3 => "A3": "amplitude of grating 3",
    f1 => "f1": "frequency of grating 1",
    f2 => "f2": "frequency of grating 2",
    f3 => "f3": "frequency of grating 3",
    jitter => "jitter": "position standard deviation of every grating",
    sigma1 => "sigma1": "position standard deviation of grating 1",
    sigma2 => "sigma2": "position standard deviation of grating 2",
    sigma3 => "sigma3": "position standard deviation of grating 3",
    d_min => "d-min": "smallest available period [default d]",
    l_max => "L-max": "longest available separation [default L]",
    visibility => "V": "fringe visibility",
    offset => "offset": "mean counts per scan point",
    points => "points": "number of scan points [default 100]",
    span => "span": "scan length [default 2d]",
    samples => "samples": "Monte Carlo samples [default 1e6]",
    rate => "rate": "sample rate of a volts-only trace",
    sensitivity => "sensitivity": "accelerometer sensitivity [default 316mV/(m/s^2)]",
}

#[derive(Debug, Parser)]
#[command(
    name = "talbot",
    version,
    about = "Fringe shifts and visibility budgets for three-grating Talbot-Lau interferometers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Built-in parameter set: c70-fast, c70-slow or insulin.
    #[arg(long, global = true)]
    preset: Option<String>,

    /// File of `key = value` lines, applied after the preset.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Worker threads for sweeps and Monte Carlo batches.
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(flatten)]
    params: ParamFlags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fringe shift of one effect.
    Shift { kind: ShiftKind },
    /// Visibility reduction factor of one effect.
    Visibility { kind: VisibilityKind },
    /// Largest mass tolerable against rotation dephasing, and the velocity-selection limit.
    MassLimit,
    /// Reduction factor over a frequency range.
    Sweep { kind: SweepKind },
    /// Closed form against brute-force averaging.
    Oracle { kind: OracleKind },
    /// Writes a synthetic `position_m,counts` scan.
    Synthesize {
        #[arg(long, value_enum, default_value_t = NoiseArg::None)]
        noise: NoiseArg,
        /// Output file [default stdout].
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Fits visibility, phase and offset to a `position_m,counts` scan.
    Fit {
        #[arg(long)]
        input: PathBuf,
    },
    /// Vibration lines of an accelerometer trace, or the isolation gain between two traces.
    Spectrum {
        #[arg(long)]
        input: PathBuf,
        /// Second trace; prints the gain from `input` to this one at --f.
        #[arg(long)]
        after: Option<PathBuf>,
    },
    /// All reduction factors of a proposed experiment.
    Budget,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ShiftKind {
    Coriolis,
    Gravity,
    Pendulum,
    Torsion,
    Sagnac,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum VisibilityKind {
    Coriolis,
    Gravity,
    Pendulum,
    Torsion,
    TorsionLimit,
    Independent,
    Gaussian,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SweepKind {
    Pendulum,
    Independent,
    Torsion,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OracleKind {
    Pendulum,
    Torsion,
    Independent,
    Gaussian,
    Coriolis,
    VelocityAverage,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum NoiseArg {
    None,
    Poisson,
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::QuadratureNotConverged { .. } => 2,
        _ => 1,
    }
}

/// Runs the command line `args` (program name first) and returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                1
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    let result = match cli.jobs {
        Some(0) => Err(Error::Usage("--jobs must be at least 1".into())),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| execute(&cli)),
            Err(e) => Err(Error::Usage(format!("cannot start {n} workers: {e}"))),
        },
        None => execute(&cli),
    };
    match result {
        Ok(text) => match out.write_all(text.as_bytes()) {
            Ok(()) => 0,
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                1
            }
        },
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path)
        .map_err(|e| Error::Usage(format!("cannot read {}: {e}", path.display())))
}

fn collect_params(cli: &Cli) -> Result<ParamSet> {
    let mut p = ParamSet::default();
    if let Some(name) = &cli.preset {
        p.apply_preset(name)?;
    }
    if let Some(path) = &cli.config {
        p.apply_config(&read_file(path)?)?;
    }
    for (name, value) in cli.params.pairs() {
        if let Some(value) = value {
            p.set(name, value)
                .map_err(|e| Error::Usage(format!("--{name}: {e}")))?;
        }
    }
    Ok(p)
}

fn execute(cli: &Cli) -> Result<String> {
    let p = collect_params(cli)?;
    let format = cli.format;
    match &cli.command {
        Command::Shift { kind } => shift(&p, *kind).map(|t| t.render(format)),
        Command::Visibility { kind } => visibility(&p, *kind).map(|t| t.render(format)),
        Command::MassLimit => mass_limit(&p).map(|t| t.render(format)),
        Command::Sweep { kind } => sweep(&p, *kind, format),
        Command::Oracle { kind } => oracle(&p, *kind, cli.seed, format),
        Command::Synthesize { noise, output } => {
            synthesize(&p, *noise, cli.seed, output.as_deref())
        }
        Command::Fit { input } => fit(&p, input).map(|t| t.render(format)),
        Command::Spectrum { input, after } => spectrum(&p, input, after.as_deref(), format),
        Command::Budget => budget(&p, format),
    }
}

/// Rows of (name, value, unit).
#[derive(Debug, Default)]
struct Table {
    rows: Vec<(String, f64, &'static str)>,
}

impl Table {
    fn row(mut self, name: &str, value: f64, unit: &'static str) -> Self {
        self.rows.push((name.to_owned(), value, unit));
        self
    }

    fn render(&self, format: Format) -> String {
        let mut out = String::new();
        match format {
            Format::Csv => {
                out.push_str("quantity,value,unit\n");
                for (name, value, unit) in &self.rows {
                    let _ = writeln!(out, "{name},{},{unit}", sci(*value));
                }
            }
            Format::Text => {
                let width = self.rows.iter().map(|r| r.0.len()).max().unwrap_or(0);
                for (name, value, unit) in &self.rows {
                    let line = format!("{name:<width$} = {} {unit}", plain(*value));
                    let _ = writeln!(out, "{}", line.trim_end());
                }
            }
        }
        out
    }
}

/// Full-precision human-readable number.
fn plain(x: f64) -> String {
    if x == 0.0 || (1e-3..1e6).contains(&x.abs()) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn geometry(p: &ParamSet) -> Result<InterferometerGeometry> {
    let order = p.count("N")?.unwrap_or(1);
    let order = u32::try_from(order).map_err(|_| Error::Usage("--N is too large".into()))?;
    InterferometerGeometry::new(p.require("d")?, p.require("L")?)?
        .with_talbot_order(order)?
        .with_tilt(p.get_or("theta", 0.0)?)
}

/// The mass only matters for wavelength and Sagnac results; shift and
/// visibility formulas are mass-independent, so 1 amu stands in when absent.
fn beam(p: &ParamSet) -> Result<BeamModel> {
    BeamModel::new(
        p.get_or("mass", AMU)?,
        p.require("v")?,
        p.get_or("sigma-v", 0.0)?,
    )
}

fn environment(p: &ParamSet) -> Result<InertialEnvironment> {
    InertialEnvironment::new(p.get_or("omega", 0.0)?, p.get_or("g", STANDARD_GRAVITY)?)
}

fn pendulum(p: &ParamSet) -> Result<CommonPendulum> {
    CommonPendulum::new(p.require("A")?, p.require("f")?)
}

fn torsion(p: &ParamSet) -> Result<TorsionPendulum> {
    TorsionPendulum::new(p.require("omega-t")?, p.require("f")?, p.require("z0")?)
}

fn per_grating(p: &ParamSet, names: [&str; 3], fallback: &str) -> Result<[f64; 3]> {
    let common = p.get(fallback)?;
    let mut out = [0.0; 3];
    for (slot, name) in out.iter_mut().zip(names) {
        *slot = match (p.get(name)?, common) {
            (Some(x), _) | (None, Some(x)) => x,
            (None, None) => return Err(params::missing(name)),
        };
    }
    Ok(out)
}

fn independent(p: &ParamSet) -> Result<IndependentHarmonic> {
    let amplitudes = per_grating(p, ["A1", "A2", "A3"], "A")?;
    // frequencies do not enter the closed form
    let frequencies = per_grating(p, ["f1", "f2", "f3"], "f").unwrap_or([1.0; 3]);
    IndependentHarmonic::new(amplitudes, frequencies)
}

fn jitter(p: &ParamSet) -> Result<GaussianJitter> {
    GaussianJitter::new(per_grating(p, ["sigma1", "sigma2", "sigma3"], "jitter")?)
}

fn shift(p: &ParamSet, kind: ShiftKind) -> Result<Table> {
    let (g, b) = (geometry(p)?, beam(p)?);
    let s = match kind {
        ShiftKind::Coriolis => {
            p.require("omega")?;
            coriolis_shift(&g, &b, &environment(p)?)
        }
        ShiftKind::Gravity => {
            p.require("theta")?;
            gravity_shift(&g, &b, &environment(p)?)
        }
        ShiftKind::Pendulum => pendulum_shift(&pendulum(p)?, &g, &b, p.get_or("phi", 0.0)?),
        ShiftKind::Torsion => torsion_shift(&torsion(p)?, &g, &b, p.get_or("phi", 0.0)?),
        ShiftKind::Sagnac => {
            p.require("omega")?;
            p.require("mass")?;
            let env = environment(p)?;
            let phase = sagnac_phase(&g, &b, &env);
            return Ok(Table::default()
                .row("sagnac_phase", phase, "rad")
                .row("sagnac_phase_over_2pi", phase / std::f64::consts::TAU, "")
                .row(
                    "coriolis_shift_over_period",
                    coriolis_shift(&g, &b, &env).fraction_of_period,
                    "",
                )
                .row("talbot_length", talbot_length(&g, &b), "m"));
        }
    };
    Ok(Table::default().row("shift", s.shift, "m").row(
        "shift_over_period",
        s.fraction_of_period,
        "",
    ))
}

fn visibility(p: &ParamSet, kind: VisibilityKind) -> Result<Table> {
    let (g, b) = (geometry(p)?, beam(p)?);
    let (name, value) = match kind {
        VisibilityKind::Coriolis => {
            p.require("omega")?;
            p.require("sigma-v")?;
            ("R_C", coriolis_reduction(&g, &b, &environment(p)?))
        }
        VisibilityKind::Gravity => {
            p.require("theta")?;
            p.require("sigma-v")?;
            ("R_G", gravity_reduction(&g, &b, &environment(p)?))
        }
        VisibilityKind::Pendulum => ("R_P", pendulum_reduction(&pendulum(p)?, &g, &b)),
        VisibilityKind::Torsion => ("R_T", torsion_reduction(&torsion(p)?, &g, &b)),
        VisibilityKind::TorsionLimit => (
            "R_T_static",
            torsion_static_limit(p.require("omega-t")?, &g, &b),
        ),
        VisibilityKind::Independent => ("R_I", independent_reduction(&independent(p)?, &g)),
        VisibilityKind::Gaussian => ("R_gauss", gaussian_reduction(&jitter(p)?, &g)),
    };
    Ok(Table::default().row(name, value, ""))
}

fn mass_limit(p: &ParamSet) -> Result<Table> {
    let (d, l, v, sigma, omega) = (
        p.require("d")?,
        p.require("L")?,
        p.require("v")?,
        p.require("sigma-v")?,
        p.require("omega")?,
    );
    let fixed_period = mass_bound_fixed_period(d, sigma, omega);
    let fixed_length = mass_bound_fixed_length(l, v, sigma, omega);
    let limit = velocity_selection_limit(p.get_or("d-min", d)?, p.get_or("L-max", l)?, omega);
    Ok(Table::default()
        .row("mass_bound_fixed_period", fixed_period, "kg")
        .row("mass_bound_fixed_period_amu", fixed_period / AMU, "amu")
        .row("mass_bound_fixed_length", fixed_length, "kg")
        .row("mass_bound_fixed_length_amu", fixed_length / AMU, "amu")
        .row("velocity_selection_limit", limit, "s/m")
        .row("sigma_v_over_v_squared", sigma / (v * v), "s/m"))
}

fn two_columns(header: [&str; 2], rows: &[(f64, f64)], format: Format) -> String {
    let mut out = String::new();
    match format {
        Format::Csv => {
            let _ = writeln!(out, "{},{}", header[0], header[1]);
            for (x, y) in rows {
                let _ = writeln!(out, "{},{}", sci(*x), sci(*y));
            }
        }
        Format::Text => {
            let _ = writeln!(out, "{:>14}  {}", header[0], header[1]);
            for (x, y) in rows {
                let _ = writeln!(out, "{:>14}  {}", plain(*x), plain(*y));
            }
        }
    }
    out
}

fn sweep(p: &ParamSet, kind: SweepKind, format: Format) -> Result<String> {
    let (g, b) = (geometry(p)?, beam(p)?);
    let grid = p.frequencies()?.ok_or_else(|| params::missing("f"))?;
    let rows = match kind {
        SweepKind::Pendulum => {
            predict_sweep(&g, &b, p.require("A")?, &grid, SweepMode::CommonPendulum)?
        }
        SweepKind::Independent => predict_sweep(
            &g,
            &b,
            p.require("A")?,
            &grid,
            SweepMode::IndependentHarmonic,
        )?,
        SweepKind::Torsion => {
            let (peak, z0) = (p.require("omega-t")?, p.require("z0")?);
            let modes = grid
                .iter()
                .map(|&f| TorsionPendulum::new(peak, f, z0))
                .collect::<Result<Vec<_>>>()?;
            modes
                .par_iter()
                .map(|m| (m.frequency, torsion_reduction(m, &g, &b)))
                .collect()
        }
    };
    Ok(two_columns(["freq_hz", "R"], &rows, format))
}

fn oracle(p: &ParamSet, kind: OracleKind, seed: u64, format: Format) -> Result<String> {
    let (g, b) = (geometry(p)?, beam(p)?);
    let header = "quantity,closed_form,oracle,standard_error,relative_discrepancy";
    let mut rows: Vec<(&str, f64, f64, f64, f64)> = Vec::new();
    if let OracleKind::VelocityAverage = kind {
        p.require("sigma-v")?;
        let report = velocity_average_oracle(&g, &b, &environment(p)?, &QuadratureSpec::default())?;
        rows.push((
            "R_C",
            report.coriolis_closed_form,
            report.coriolis_oracle,
            0.0,
            report.coriolis_discrepancy(),
        ));
        rows.push((
            "R_G",
            report.gravity_closed_form,
            report.gravity_oracle,
            0.0,
            report.gravity_discrepancy(),
        ));
    } else {
        let (name, perturbation): (&str, Perturbation) = match kind {
            OracleKind::Pendulum => ("R_P", VibrationMode::CommonPendulum(pendulum(p)?).into()),
            OracleKind::Torsion => ("R_T", VibrationMode::TorsionPendulum(torsion(p)?).into()),
            OracleKind::Independent => {
                per_grating(p, ["f1", "f2", "f3"], "f")?;
                (
                    "R_I",
                    VibrationMode::IndependentHarmonic(independent(p)?).into(),
                )
            }
            OracleKind::Gaussian => ("R_gauss", VibrationMode::GaussianJitter(jitter(p)?).into()),
            OracleKind::Coriolis => {
                p.require("omega")?;
                ("R_C_R_G", environment(p)?.into())
            }
            OracleKind::VelocityAverage => unreachable!(),
        };
        let samples = p.count("samples")?.unwrap_or(1_000_000);
        let r = visibility_oracle(&TrajectoryScenario::new(
            g,
            b,
            vec![perturbation],
            seed,
            samples,
        )?);
        rows.push((
            name,
            r.closed_form_r,
            r.r_oracle,
            r.standard_error,
            r.relative_discrepancy,
        ));
    }

    let mut out = String::new();
    match format {
        Format::Csv => {
            let _ = writeln!(out, "{header}");
            for (n, c, o, s, rel) in rows {
                let _ = writeln!(out, "{n},{},{},{},{}", sci(c), sci(o), sci(s), sci(rel));
            }
        }
        Format::Text => {
            let cols: Vec<&str> = header.split(',').collect();
            let _ = writeln!(
                out,
                "{:<10} {:>22} {:>22} {:>22} {:>22}",
                cols[0], cols[1], cols[2], cols[3], cols[4]
            );
            for (n, c, o, s, rel) in rows {
                let _ = writeln!(
                    out,
                    "{n:<10} {:>22} {:>22} {:>22} {:>22}",
                    plain(c),
                    plain(o),
                    plain(s),
                    plain(rel)
                );
            }
        }
    }
    Ok(out)
}

fn synthesize(p: &ParamSet, noise: NoiseArg, seed: u64, output: Option<&Path>) -> Result<String> {
    let d = p.require("d")?;
    let points = p.count("points")?.unwrap_or(100);
    let scan = synthesize_scan(
        p.require("V")?,
        p.require("offset")?,
        p.get_or("phi", 0.0)?,
        d,
        usize::try_from(points).map_err(|_| Error::Usage("--points is too large".into()))?,
        p.get_or("span", 2.0 * d)?,
        match noise {
            NoiseArg::None => Noise::None,
            NoiseArg::Poisson => Noise::Poisson,
        },
        seed,
    )?;
    let mut buf = Vec::new();
    scan.write_csv(&mut buf).expect("writing to memory");
    match output {
        Some(path) => {
            fs::write(path, &buf)
                .map_err(|e| Error::Usage(format!("cannot write {}: {e}", path.display())))?;
            Ok(String::new())
        }
        None => Ok(String::from_utf8(buf).expect("ascii csv")),
    }
}

fn fit(p: &ParamSet, input: &Path) -> Result<Table> {
    let scan = FringeScan::read_csv(read_file(input)?.as_bytes(), p.require("d")?)?;
    let est = extract_visibility(&scan)?;
    Ok(Table::default()
        .row("V", est.visibility, "")
        .row("V_stderr", est.visibility_stderr, "")
        .row("phase", est.phase, "rad")
        .row("offset", est.offset, "counts")
        .row("clamped", f64::from(u8::from(est.clamped)), "")
        .row("degenerate", f64::from(u8::from(est.degenerate)), ""))
}

fn spectrum(p: &ParamSet, input: &Path, after: Option<&Path>, format: Format) -> Result<String> {
    let rate = p.get("rate")?;
    let k = p.get_or("sensitivity", DEFAULT_SENSITIVITY)?;
    let before = analyze_trace(&AccelTrace::read_csv(
        read_file(input)?.as_bytes(),
        rate,
        k,
    )?);
    if let Some(path) = after {
        let after = analyze_trace(&AccelTrace::read_csv(read_file(path)?.as_bytes(), rate, k)?);
        let f = p.require("f")?;
        return Ok(Table::default()
            .row("isolation_gain", isolation_gain(&before, &after, f)?, "dB")
            .render(format));
    }
    let mut out = String::new();
    match format {
        Format::Csv => {
            out.push_str("freq_hz,volts,accel_ms2,displacement_m\n");
            for l in &before.lines {
                let _ = writeln!(
                    out,
                    "{},{},{},{}",
                    sci(l.frequency),
                    sci(l.volts),
                    sci(l.acceleration),
                    sci(l.displacement)
                );
            }
        }
        Format::Text => {
            let _ = writeln!(
                out,
                "{:>24} {:>24} {:>24} {:>24}",
                "freq_hz", "volts", "accel_ms2", "displacement_m"
            );
            for l in &before.lines {
                let _ = writeln!(
                    out,
                    "{:>24} {:>24} {:>24} {:>24}",
                    plain(l.frequency),
                    plain(l.volts),
                    plain(l.acceleration),
                    plain(l.displacement)
                );
            }
        }
    }
    Ok(out)
}

fn budget(p: &ParamSet, format: Format) -> Result<String> {
    let mut inputs =
        BudgetInputs::new(geometry(p)?, beam(p)?, environment(p)?, p.get_or("A", 0.0)?);
    inputs.grating_amplitudes = [
        p.get("A1")?.unwrap_or(inputs.pendulum_amplitude),
        p.get("A2")?.unwrap_or(inputs.pendulum_amplitude),
        p.get("A3")?.unwrap_or(inputs.pendulum_amplitude),
    ];
    if let Some(grid) = p.frequencies()? {
        inputs.frequency_grid = grid;
    }
    if let Some(z0) = p.get("z0")? {
        inputs.torsion = Some(TorsionInput {
            peak_rotation: p.require("omega-t")?,
            pivot_offset: z0,
        });
    }
    if p.raw("jitter").is_some() || p.raw("sigma1").is_some() {
        inputs.jitter = Some(jitter(p)?.sigmas);
    }
    let report = evaluate_budget(&inputs)?;
    Ok(match format {
        Format::Csv => report.to_csv(),
        Format::Text => report.to_text(),
    })
}
