//! Command-line front end.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use binlattice_core::dynamics::{default_time_grid, evolve, DEFAULT_SAMPLES};
use binlattice_core::lattice::{LatticeParams, Truncation};
use binlattice_core::rabi::{monodromy_quasienergies, verify, RabiParams, DEFAULT_STEPS_PER_PERIOD};
use binlattice_core::resonance::{find_anticrossing, shirley_shift, CONVERGENCE_TOLERANCE};
use binlattice_core::spectral::converge_truncation;
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use crate::output::{self, round_sig, AnticrossReport, MonodromyReport, ShirleyReport, VerifyReport};
use crate::parallel;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// `--help` / `--version` text; not a failure.
    #[error("{0}")]
    Info(String),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Core(#[from] binlattice_core::Error),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Info(_) => 0,
            CliError::Usage(_) => 1,
            CliError::Core(e) if e.is_validation() => 1,
            CliError::Core(_) | CliError::Io { .. } => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "binlattice", version, about = "Binary tight-binding lattice in a static force and its semiclassical Rabi twin")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Eigenvalues inside an energy window along an epsilon sweep (CSV)
    #[command(allow_negative_numbers = true)]
    Spectrum(SpectrumArgs),
    /// Locate the order-n level anticrossing (JSON)
    #[command(allow_negative_numbers = true)]
    Anticross(OrderArgs),
    /// Site occupations after starting on one site (CSV)
    #[command(allow_negative_numbers = true)]
    Evolve(EvolveArgs),
    /// IPR of the site-0 anchored eigenstate over a (V, epsilon) grid (CSV)
    #[command(name = "ipr-map", allow_negative_numbers = true)]
    IprMap(IprArgs),
    /// Perturbative Bloch-Siegert shift of the order-n resonance (JSON)
    #[command(allow_negative_numbers = true)]
    Shirley(OrderArgs),
    /// Lattice / Floquet consistency checks (JSON)
    #[command(allow_negative_numbers = true)]
    Verify(VerifyArgs),
    /// Quasienergies from one-period time integration (JSON)
    #[command(allow_negative_numbers = true)]
    Monodromy(MonodromyArgs),
}

#[derive(Debug, Args)]
struct OutArg {
    /// Write to this file instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SpectrumArgs {
    #[arg(long = "V", default_value_t = 0.2)]
    v: f64,
    #[arg(long = "F", default_value_t = 1.0)]
    f: f64,
    #[arg(long, default_value_t = 0.5)]
    emin: f64,
    #[arg(long, default_value_t = 1.5)]
    emax: f64,
    #[arg(long, default_value_t = 201)]
    esteps: usize,
    /// Lower edge of the energy window [default: 0]
    #[arg(long)]
    wmin: Option<f64>,
    /// Upper edge of the energy window [default: F]
    #[arg(long)]
    wmax: Option<f64>,
    /// Truncation half-width; chosen by the doubling test when absent
    #[arg(long = "N")]
    half_width: Option<usize>,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Debug, Args)]
struct OrderArgs {
    #[arg(long, default_value_t = 0)]
    order: u32,
    #[arg(long = "V")]
    v: f64,
    #[arg(long = "F", default_value_t = 1.0)]
    f: f64,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Debug, Args)]
struct EvolveArgs {
    /// Defaults to the located anticrossing when --order is given
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long = "V")]
    v: f64,
    #[arg(long = "F", default_value_t = 1.0)]
    f: f64,
    #[arg(long, default_value_t = 0)]
    site: i64,
    /// End of the time grid; defaults to 1.1 periods of the order-n anticrossing
    #[arg(long)]
    tmax: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,
    /// Resonance order used for the default epsilon and time span
    #[arg(long)]
    order: Option<u32>,
    #[arg(long = "N")]
    half_width: Option<usize>,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Debug, Args)]
struct IprArgs {
    #[arg(long, default_value_t = 0.02)]
    vmin: f64,
    #[arg(long, default_value_t = 1.2)]
    vmax: f64,
    #[arg(long, default_value_t = 60)]
    vsteps: usize,
    #[arg(long, default_value_t = 0.2)]
    emin: f64,
    #[arg(long, default_value_t = 6.0)]
    emax: f64,
    #[arg(long, default_value_t = 120)]
    esteps: usize,
    #[arg(long = "F", default_value_t = 1.0)]
    f: f64,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Debug, Args)]
struct RabiArgs {
    #[arg(long = "Omega")]
    splitting: f64,
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
    #[arg(long)]
    lambda: f64,
    /// Integrator step; defaults to period / 10000
    #[arg(long)]
    step: Option<f64>,
}

impl RabiArgs {
    fn params(&self) -> Result<(RabiParams, f64), CliError> {
        let rabi = RabiParams::new(self.splitting, self.omega, self.lambda)?;
        let step = self.step.unwrap_or(rabi.period() / DEFAULT_STEPS_PER_PERIOD as f64);
        Ok((rabi, step))
    }
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(flatten)]
    rabi: RabiArgs,
    #[arg(long = "N", default_value_t = 40)]
    half_width: usize,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Debug, Args)]
struct MonodromyArgs {
    #[command(flatten)]
    rabi: RabiArgs,
    #[command(flatten)]
    out: OutArg,
}

/// Rendered output and where it should go.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub text: String,
    pub path: Option<PathBuf>,
}

fn linspace(lo: f64, hi: f64, steps: usize, what: &str) -> Result<Vec<f64>, CliError> {
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(CliError::Usage(format!("{what} grid bounds must be finite")));
    }
    if steps == 1 && lo == hi {
        return Ok(vec![lo]);
    }
    if steps < 2 || !(hi > lo) {
        return Err(CliError::Usage(format!("{what} grid needs max > min and at least 2 steps")));
    }
    let d = (hi - lo) / (steps - 1) as f64;
    Ok((0..steps).map(|i| if i + 1 == steps { hi } else { lo + d * i as f64 }).collect())
}

fn explicit_truncation(half_width: Option<usize>) -> Result<Option<Truncation>, CliError> {
    Ok(half_width.map(Truncation::new).transpose()?)
}

/// Largest converged truncation over a few representative parameter points.
fn auto_truncation(points: &[LatticeParams]) -> Result<Truncation, CliError> {
    let mut best = Truncation::new(1)?;
    for p in points {
        best = best.max(converge_truncation(p, CONVERGENCE_TOLERANCE)?);
    }
    Ok(best)
}

fn spectrum(a: &SpectrumArgs) -> Result<String, CliError> {
    let grid = linspace(a.emin, a.emax, a.esteps, "epsilon")?;
    let window = (a.wmin.unwrap_or(0.0), a.wmax.unwrap_or(a.f));
    let trunc = match explicit_truncation(a.half_width)? {
        Some(t) => t,
        None => {
            let mid = grid[grid.len() / 2];
            let points = [grid[0], mid, grid[grid.len() - 1]]
                .iter()
                .map(|&e| LatticeParams::new(a.v, e, a.f))
                .collect::<Result<Vec<_>, _>>()?;
            auto_truncation(&points)?
        }
    };
    let table = parallel::spectrum_sweep(a.v, a.f, &grid, window, trunc)?;
    Ok(output::sweep_csv(&table))
}

fn anticross(a: &OrderArgs) -> Result<String, CliError> {
    let r = find_anticrossing(a.order, a.v, a.f)?;
    Ok(output::to_json(&AnticrossReport::from(&r)))
}

fn shirley(a: &OrderArgs) -> Result<String, CliError> {
    LatticeParams::new(a.v, 0.0, a.f)?;
    let shift = shirley_shift(a.order, a.v, a.f);
    let report = ShirleyReport {
        order: a.order,
        v: round_sig(a.v),
        f: round_sig(a.f),
        shift: round_sig(shift),
        predicted_epsilon: round_sig((2 * a.order + 1) as f64 * a.f - shift),
    };
    Ok(output::to_json(&report))
}

fn evolve_cmd(a: &EvolveArgs) -> Result<String, CliError> {
    let anticrossing = a.order.map(|n| find_anticrossing(n, a.v, a.f)).transpose()?;
    let epsilon = match (a.epsilon, &anticrossing) {
        (Some(e), _) => e,
        (None, Some(r)) => r.epsilon_star,
        (None, None) => return Err(CliError::Usage("evolve needs --epsilon or --order".into())),
    };
    let times = match (a.tmax, &anticrossing) {
        (Some(t), _) => linspace(0.0, t, a.samples, "time")?,
        (None, Some(r)) => default_time_grid(r.gap_min, a.samples)?,
        (None, None) => return Err(CliError::Usage("evolve needs --tmax or --order".into())),
    };
    let params = LatticeParams::new(a.v, epsilon, a.f)?;
    let trunc = match explicit_truncation(a.half_width)? {
        Some(t) => t,
        None => {
            let mut t = auto_truncation(&[params])?;
            while (t.half_width() as i64) / 2 < a.site.abs() {
                t = t.doubled();
            }
            t
        }
    };
    let traj = evolve(&params, a.site, &times, trunc)?;
    Ok(output::trajectory_csv(&traj))
}

fn ipr_map(a: &IprArgs) -> Result<String, CliError> {
    let v = linspace(a.vmin, a.vmax, a.vsteps, "V")?;
    let eps = linspace(a.emin, a.emax, a.esteps, "epsilon")?;
    let grid = parallel::ipr_map(&v, &eps, a.f)?;
    Ok(output::ipr_csv(&grid))
}

fn verify_cmd(a: &VerifyArgs) -> Result<String, CliError> {
    let (rabi, step) = a.rabi.params()?;
    let report = verify(&rabi, Truncation::new(a.half_width)?, step)?;
    Ok(output::to_json(&VerifyReport::from(&report)))
}

fn monodromy(a: &MonodromyArgs) -> Result<String, CliError> {
    let (rabi, step) = a.rabi.params()?;
    let (lo, hi) = monodromy_quasienergies(&rabi, step)?;
    let report = MonodromyReport {
        splitting: round_sig(rabi.splitting()),
        omega: round_sig(rabi.frequency()),
        lambda: round_sig(rabi.coupling()),
        step: round_sig(step),
        quasienergies: [round_sig(lo), round_sig(hi)],
    };
    Ok(output::to_json(&report))
}

/// Parse `argv` (program name first) and compute the output without writing it.
pub fn execute<I, T>(argv: I) -> Result<Output, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| match e.kind() {
        ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => CliError::Info(e.to_string()),
        _ => CliError::Usage(e.render().to_string()),
    })?;
    let (text, out) = match &cli.command {
        Command::Spectrum(a) => (spectrum(a)?, &a.out),
        Command::Anticross(a) => (anticross(a)?, &a.out),
        Command::Evolve(a) => (evolve_cmd(a)?, &a.out),
        Command::IprMap(a) => (ipr_map(a)?, &a.out),
        Command::Shirley(a) => (shirley(a)?, &a.out),
        Command::Verify(a) => (verify_cmd(a)?, &a.out),
        Command::Monodromy(a) => (monodromy(a)?, &a.out),
    };
    Ok(Output { text, path: out.out.clone() })
}

/// Run the CLI and return the process exit code: 0 on success, 1 for
/// invalid input, 2 for numerical or IO failures.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let result = execute(argv).and_then(|o| {
        match &o.path {
            Some(path) => std::fs::write(path, &o.text).map_err(|source| CliError::Io { path: path.clone(), source }),
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout
                    .write_all(o.text.as_bytes())
                    .and_then(|_| stdout.flush())
                    .map_err(|source| CliError::Io { path: "<stdout>".into(), source })
            }
        }
    });
    match result {
        Ok(()) => 0,
        Err(CliError::Info(text)) => {
            print!("{text}");
            0
        }
        Err(e) => {
            match &e {
                CliError::Usage(text) => eprint!("{text}"),
                CliError::Core(inner) if !inner.is_validation() => {
                    eprintln!("error: {e}");
                    eprintln!("hint: retry with a larger --N, a longer time span or a smaller --step");
                }
                _ => eprintln!("error: {e}"),
            }
            e.exit_code()
        }
    }
}
