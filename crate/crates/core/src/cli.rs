//! Command-line front end.
//!
//! Every run writes CSV files whose `#` header lines echo the full
//! configuration, so any artifact can be regenerated from its own header.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::csv::{fmt_real, parse_response_csv, CsvTable};
use crate::error::{Error, Result};
use crate::forward::{
    response_function, solve_forward_ode, solve_forward_spectral, solve_forward_spectral_delta, TimeGrid, Trajectory,
    Waveform,
};
use crate::inverse::{recover_string, with_additive_noise, RecoveryResult, Regularization};
use crate::model::{StringSpec, SystemMatrices};
use crate::spectral::compute_spectral_data;
use crate::uniform::{sweep, Proposition, QuadControls, SweepParams, TestFunction};

#[derive(Debug, Parser)]
#[command(name = "krein-string", version, about = "Forward and inverse problems for Krein-Stieltjes strings")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenvalues and weights of the string.
    Spectral(SpectralArgs),
    /// Mass trajectories under a boundary control.
    Forward(ForwardArgs),
    /// Response function sampled on [0, T].
    Response(ResponseArgs),
    /// Recover masses and lengths from a response CSV.
    Invert(InvertArgs),
    /// Convergence experiments for the uniform string.
    UniformSweep(SweepArgs),
    /// Synthesize the response of a string, invert it and compare.
    Roundtrip(RoundtripArgs),
}

#[derive(Debug, Args)]
pub struct SpectralArgs {
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Solver {
    Spectral,
    Ode,
}

#[derive(Debug, Args)]
pub struct ForwardArgs {
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long = "T")]
    pub horizon: f64,
    #[arg(long)]
    pub steps: usize,
    /// `delta`, `step`, or a test-function descriptor such as `gauss:0.5,0.1`.
    #[arg(long, default_value = "step")]
    pub control: String,
    #[arg(long, value_enum, default_value = "spectral")]
    pub solver: Solver,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ResponseArgs {
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long = "T")]
    pub horizon: f64,
    #[arg(long)]
    pub steps: usize,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct RegArgs {
    /// Relative singular-value cutoff; defaults to 1e-8, or 1e-4 with noise.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Largest accepted relative residual of a Krein solve.
    #[arg(long)]
    pub max_residual: Option<f64>,
}

impl RegArgs {
    fn resolve(&self, noisy: bool) -> Result<Regularization> {
        let base = if noisy { Regularization::NOISY } else { Regularization::EXACT };
        let reg = Regularization {
            threshold: self.threshold.unwrap_or(base.threshold),
            max_residual: self.max_residual.unwrap_or(base.max_residual),
        };
        if !(reg.threshold > 0.0 && reg.threshold < 1.0) || !(reg.max_residual > 0.0) {
            return Err(Error::InvalidArgument("threshold must lie in (0, 1), max residual must be positive".into()));
        }
        Ok(reg)
    }
}

#[derive(Debug, Args)]
pub struct InvertArgs {
    /// CSV with header `t,r` sampled from t = 0 on a uniform grid.
    #[arg(long)]
    pub response: PathBuf,
    #[arg(long)]
    pub l1: f64,
    /// Observation horizon; the response must cover [0, 2T]. Defaults to half its span.
    #[arg(long = "T")]
    pub horizon: Option<f64>,
    #[command(flatten)]
    pub reg: RegArgs,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// 1: delta solution, 2: response, 3: corrected response, 4: sine projection.
    #[arg(long)]
    pub prop: u32,
    #[arg(long = "N", value_delimiter = ',', required = true)]
    pub ns: Vec<usize>,
    #[arg(long, default_value = "gauss:0,0.3")]
    pub xi: String,
    /// Mass index (proposition 1).
    #[arg(long, default_value_t = 1)]
    pub j: usize,
    /// Time (propositions 1 and 4).
    #[arg(long, default_value_t = 0.5)]
    pub t: f64,
    /// Sine mode (proposition 4).
    #[arg(long, default_value_t = 1)]
    pub k: u32,
    /// Tail-bound tolerance of the pairings.
    #[arg(long, default_value_t = 1e-4)]
    pub tol: f64,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct RoundtripArgs {
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long = "T")]
    pub horizon: f64,
    #[arg(long)]
    pub steps: usize,
    /// First segment length passed to the inversion; defaults to the spec's.
    #[arg(long)]
    pub l1: Option<f64>,
    /// Standard deviation of additive Gaussian noise on r.
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub reg: RegArgs,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

/// `key=value` pairs echoed into every output header.
struct Echo(Vec<(String, String)>);

impl Echo {
    fn new(command: &str) -> Self {
        Echo(vec![("command".into(), command.into())])
    }

    fn add(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.0.push((key.into(), value.to_string()));
        self
    }

    fn spec(&mut self, path: &Path, spec: &StringSpec) -> &mut Self {
        self.add("spec", path.display());
        self.add("lengths", join_reals(spec.lengths()));
        self.add("masses", join_reals(spec.masses()))
    }

    fn stamp(&self, table: &mut CsvTable) {
        let line = self.0.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(" ");
        table.comment(format!("krein-string {line}"));
    }
}

fn join_reals(xs: &[f64]) -> String {
    xs.iter().map(|&x| fmt_real(x)).collect::<Vec<_>>().join(",")
}

fn load_spec(path: &Path) -> Result<StringSpec> {
    StringSpec::parse(&fs::read_to_string(path)?)
}

fn write_table(dir: &Path, name: &str, table: &CsvTable) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, table.render())?;
    Ok(path)
}

fn trajectory_table(traj: &Trajectory) -> CsvTable {
    let mut header = vec!["t".to_string()];
    header.extend((1..=traj.dimension()).map(|i| format!("u_{i}")));
    let mut table = CsvTable::new(&header);
    for (j, state) in traj.states().iter().enumerate() {
        let mut row = vec![traj.grid().time(j)];
        row.extend_from_slice(state);
        table.push_reals(&row);
    }
    table
}

fn waveform_table(w: &Waveform, column: &str) -> CsvTable {
    let mut table = CsvTable::new(&["t", column]);
    for (j, v) in w.values().iter().enumerate() {
        table.push_reals(&[w.grid().time(j), *v]);
    }
    table
}

fn recovery_tables(rec: &RecoveryResult, echo: &Echo) -> (CsvTable, CsvTable) {
    let mut report = CsvTable::new(&["k", "m_k", "b_k", "a_k", "l_k", "residual_k", "cond_k"]);
    echo.stamp(&mut report);
    report.comment(format!("rank={} l1_estimate={}", rec.diagnostics.rank, fmt_real(rec.diagnostics.l1_estimate)));
    for (k, &l) in rec.lengths.iter().enumerate() {
        let cell = |v: Option<&f64>| v.map_or(String::new(), |&x| fmt_real(x));
        report.push_row(vec![
            (k + 1).to_string(),
            cell(rec.masses.get(k)),
            cell(rec.b.get(k)),
            cell(rec.a.get(k)),
            fmt_real(l),
            cell(rec.diagnostics.residuals.get(k)),
            cell(rec.diagnostics.conditions.get(k)),
        ]);
    }
    let mut sv = CsvTable::new(&["i", "sigma_i"]);
    echo.stamp(&mut sv);
    for (i, s) in rec.diagnostics.singular_values.iter().enumerate() {
        sv.push_row(vec![(i + 1).to_string(), fmt_real(*s)]);
    }
    (report, sv)
}

fn control_waveform(descriptor: &str, grid: TimeGrid) -> Result<Waveform> {
    match descriptor.trim() {
        "step" => Ok(Waveform::sample(grid, |_| 1.0)),
        d => {
            let xi: TestFunction = d.parse()?;
            Ok(Waveform::sample(grid, |t| xi.eval(t)))
        }
    }
}

fn max_rel_err(got: &[f64], want: &[f64]) -> f64 {
    if got.len() != want.len() {
        return f64::INFINITY;
    }
    got.iter().zip(want).map(|(g, w)| ((g - w) / w).abs()).fold(0.0, f64::max)
}

/// Executes one command, returning the lines to print on stdout.
pub fn run(cli: &Cli) -> Result<Vec<String>> {
    match &cli.command {
        Command::Spectral(a) => {
            let spec = load_spec(&a.spec)?;
            let data = compute_spectral_data(&SystemMatrices::from_spec(&spec))?;
            let mut echo = Echo::new("spectral");
            echo.spec(&a.spec, &spec);
            let mut table = CsvTable::new(&["k", "lambda", "omega"]);
            echo.stamp(&mut table);
            for (k, (l, w)) in data.eigenvalues().iter().zip(data.weights()).enumerate() {
                table.push_row(vec![(k + 1).to_string(), fmt_real(*l), fmt_real(*w)]);
            }
            let path = write_table(&a.out, "spectral.csv", &table)?;
            Ok(vec![format!("wrote {}", path.display())])
        }
        Command::Forward(a) => {
            let spec = load_spec(&a.spec)?;
            let mats = SystemMatrices::from_spec(&spec);
            let grid = TimeGrid::new(a.horizon, a.steps)?;
            let traj = match (a.control.trim(), a.solver) {
                ("delta", Solver::Spectral) => {
                    let data = compute_spectral_data(&mats)?;
                    solve_forward_spectral_delta(&mats, &data, grid, spec.l1())?
                }
                ("delta", Solver::Ode) => {
                    return Err(Error::InvalidArgument("the delta control needs the spectral solver".into()));
                }
                (d, Solver::Spectral) => {
                    let data = compute_spectral_data(&mats)?;
                    solve_forward_spectral(&mats, &data, &control_waveform(d, grid)?, spec.l1())?
                }
                (d, Solver::Ode) => solve_forward_ode(&mats, &control_waveform(d, grid)?, spec.l1())?,
            };
            let mut echo = Echo::new("forward");
            echo.spec(&a.spec, &spec)
                .add("T", fmt_real(a.horizon))
                .add("steps", a.steps)
                .add("control", a.control.trim())
                .add("solver", format!("{:?}", a.solver).to_lowercase());
            let mut table = trajectory_table(&traj);
            echo.stamp(&mut table);
            let path = write_table(&a.out, "trajectory.csv", &table)?;
            Ok(vec![format!("wrote {}", path.display())])
        }
        Command::Response(a) => {
            let spec = load_spec(&a.spec)?;
            let data = compute_spectral_data(&SystemMatrices::from_spec(&spec))?;
            let grid = TimeGrid::new(a.horizon, a.steps)?;
            let r = response_function(&data, spec.l1(), grid);
            let mut echo = Echo::new("response");
            echo.spec(&a.spec, &spec).add("T", fmt_real(a.horizon)).add("steps", a.steps);
            let mut table = waveform_table(&r, "r");
            echo.stamp(&mut table);
            let path = write_table(&a.out, "response.csv", &table)?;
            Ok(vec![format!("wrote {}", path.display())])
        }
        Command::Invert(a) => {
            let reg = a.reg.resolve(false)?;
            let (dt, values) = parse_response_csv(&fs::read_to_string(&a.response)?)?;
            let total_steps = values.len() - 1;
            let r = Waveform::new(TimeGrid::new(dt * total_steps as f64, total_steps)?, values)?;
            let steps = match a.horizon {
                Some(t) => {
                    let steps = (t / dt).round() as usize;
                    if !(t > 0.0) || (steps as f64 * dt - t).abs() > 1e-9 * t {
                        return Err(Error::GridMismatch(format!("T = {t} is not a multiple of the sample spacing {dt}")));
                    }
                    steps
                }
                None => total_steps / 2,
            };
            let grid = TimeGrid::new(steps as f64 * dt, steps)?;
            let rec = recover_string(&r, a.l1, grid, reg)?;
            let mut echo = Echo::new("invert");
            echo.add("response", a.response.display())
                .add("l1", fmt_real(a.l1))
                .add("T", fmt_real(grid.horizon()))
                .add("steps", steps)
                .add("threshold", fmt_real(reg.threshold))
                .add("max_residual", fmt_real(reg.max_residual));
            let (report, sv) = recovery_tables(&rec, &echo);
            let p1 = write_table(&a.out, "recovery.csv", &report)?;
            let p2 = write_table(&a.out, "singular_values.csv", &sv)?;
            let recovered = rec.to_spec()?;
            fs::create_dir_all(&a.out)?;
            let p3 = a.out.join("recovered_spec.txt");
            fs::write(&p3, recovered.to_text())?;
            Ok(vec![
                format!("wrote {}", p1.display()),
                format!("wrote {}", p2.display()),
                format!("wrote {}", p3.display()),
                format!("recovered_masses={} rank={}", rec.masses.len(), rec.diagnostics.rank),
            ])
        }
        Command::UniformSweep(a) => {
            let prop = Proposition::from_index(a.prop)?;
            if a.ns.is_empty() {
                return Err(Error::InvalidArgument("empty N list".into()));
            }
            let params = SweepParams {
                xi: a.xi.parse()?,
                j: a.j,
                t: a.t,
                k: a.k,
                quad: QuadControls { tol: a.tol, ..QuadControls::default() },
            };
            let rows = sweep(prop, &a.ns, &params)?;
            let mut echo = Echo::new("uniform-sweep");
            echo.add("prop", a.prop)
                .add("N", a.ns.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(","))
                .add("xi", params.xi.descriptor())
                .add("j", a.j)
                .add("t", fmt_real(a.t))
                .add("k", a.k)
                .add("tol", fmt_real(a.tol));
            let mut table = CsvTable::new(&["N", "target", "value", "abs_error"]);
            echo.stamp(&mut table);
            for row in &rows {
                table.push_row(vec![row.n.to_string(), fmt_real(row.target), fmt_real(row.value), fmt_real(row.abs_error)]);
            }
            let path = write_table(&a.out, &format!("sweep_prop{}.csv", a.prop), &table)?;
            Ok(vec![format!("wrote {}", path.display())])
        }
        Command::Roundtrip(a) => {
            let spec = load_spec(&a.spec)?;
            if !(a.noise >= 0.0 && a.noise.is_finite()) {
                return Err(Error::InvalidArgument(format!("noise level must be non-negative, got {}", a.noise)));
            }
            let reg = a.reg.resolve(a.noise > 0.0)?;
            let l1 = a.l1.unwrap_or(spec.l1());
            let data = compute_spectral_data(&SystemMatrices::from_spec(&spec))?;
            let grid = TimeGrid::new(a.horizon, a.steps)?;
            let mut r = response_function(&data, spec.l1(), grid.extended(2));
            if a.noise > 0.0 {
                r = with_additive_noise(&r, a.noise, a.seed)?;
            }
            let rec = recover_string(&r, l1, grid, reg)?;
            let err_m = max_rel_err(&rec.masses, spec.masses());
            let err_l = max_rel_err(&rec.lengths, spec.lengths());
            let mut echo = Echo::new("roundtrip");
            echo.spec(&a.spec, &spec)
                .add("T", fmt_real(a.horizon))
                .add("steps", a.steps)
                .add("l1", fmt_real(l1))
                .add("noise", fmt_real(a.noise))
                .add("seed", a.seed)
                .add("threshold", fmt_real(reg.threshold))
                .add("max_residual", fmt_real(reg.max_residual));
            let (mut report, sv) = recovery_tables(&rec, &echo);
            report.comment(format!("max_rel_err_m={} max_rel_err_l={}", fmt_real(err_m), fmt_real(err_l)));
            let p1 = write_table(&a.out, "recovery.csv", &report)?;
            let p2 = write_table(&a.out, "singular_values.csv", &sv)?;
            Ok(vec![
                format!("wrote {}", p1.display()),
                format!("wrote {}", p2.display()),
                format!("max_rel_err_m={} max_rel_err_l={}", fmt_real(err_m), fmt_real(err_l)),
            ])
        }
    }
}
