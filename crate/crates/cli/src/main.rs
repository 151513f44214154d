mod table;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use nrspinor::boundstates::{
    energy_levels, find_levels_numerically, periodic_residual, WellProblem,
};
use nrspinor::checks::{run_suite, CheckConfig, Fault};
use nrspinor::pauligauge::{convergence_orders, convergence_table, ConvergenceConfig};
use nrspinor::scattering::{
    closed_form, ratio_grid, solve_barrier, solve_step, sweep, BarrierProblem, Coefficients,
    Method, SweepTemplate,
};
use nrspinor::spinors::Spin;
use nrspinor::waveop::{PhysicalConstants, Regime};

use table::{Cell, Format, Table};

const EXIT_PROPERTY: u8 = 1;
const EXIT_FLAGGED: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser, Debug)]
#[command(
    name = "nrspinor",
    version,
    about = "Spin-resolved scattering and bound states of the first-order spinor equation"
)]
struct Cli {
    /// key=value file with hbar_c (eV nm) and mass_c2 (eV); flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the table here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Significant digits.
    #[arg(long, global = true, default_value_t = 12, value_parser = clap::value_parser!(u8).range(6..=17))]
    precision: u8,
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    #[arg(long, global = true, hide = true)]
    fault: Option<FaultArg>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FaultArg {
    EtaSign,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Numeric,
    Closed,
    Both,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SpinArg {
    Up,
    Down,
}

impl From<SpinArg> for Spin {
    fn from(s: SpinArg) -> Self {
        match s {
            SpinArg::Up => Spin::Up,
            SpinArg::Down => Spin::Down,
        }
    }
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        Ok(x) => Err(format!("must be positive and finite, got {x}")),
        Err(e) => Err(e.to_string()),
    }
}

fn finite(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        Ok(x) => Err(format!("must be finite, got {x}")),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Args, Debug)]
struct Range {
    /// Lowest E/V0.
    #[arg(long, default_value_t = 0.05, value_parser = positive)]
    emin: f64,
    /// Highest E/V0.
    #[arg(long, default_value_t = 3.0, value_parser = positive)]
    emax: f64,
    #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u32).range(1..))]
    steps: u32,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Transmission and reflection over an energy sweep for a square barrier.
    Barrier {
        /// Barrier height, eV.
        #[arg(long, value_parser = positive)]
        v0: f64,
        /// Barrier width, nm.
        #[arg(long, value_parser = positive)]
        length: f64,
        /// Rest energy mc², eV.
        #[arg(long, value_parser = positive)]
        mass: Option<f64>,
        #[command(flatten)]
        range: Range,
        #[arg(long, value_enum, default_value_t = MethodArg::Numeric)]
        method: MethodArg,
        #[arg(long, value_enum, default_value_t = SpinArg::Up)]
        spin: SpinArg,
    },
    /// Single potential step at z = 0.
    Step {
        /// Step height, eV.
        #[arg(long, value_parser = positive)]
        v0: f64,
        #[arg(long, value_parser = positive)]
        mass: Option<f64>,
        #[command(flatten)]
        range: Range,
        #[arg(long, value_enum, default_value_t = SpinArg::Up)]
        spin: SpinArg,
    },
    /// Energy levels of the periodic well on [-L, L].
    Well {
        /// Half-width L, nm.
        #[arg(long, value_parser = positive)]
        length: f64,
        #[arg(long, value_parser = positive)]
        mass: Option<f64>,
        #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u32).range(1..))]
        nmax: u32,
        /// Also locate the levels by root finding.
        #[arg(long)]
        numeric: bool,
    },
    /// Lattice residuals of the Pauli identity, gauge invariance and [Pi_x, Pi_y].
    Pauli {
        /// Sites per axis, comma separated, coarsest first.
        #[arg(long, value_delimiter = ',', default_values_t = [32usize, 64, 128])]
        extents: Vec<usize>,
        /// Box side, nm.
        #[arg(long, default_value_t = 8.0, value_parser = positive)]
        box_length: f64,
        /// Uniform field strength for the identity and commutator checks.
        #[arg(long, default_value_t = 0.8, value_parser = finite)]
        bz: f64,
    },
    /// Run the full property suite and print a pass/fail report.
    Check {
        /// Random barrier problems per regime.
        #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u32).range(1..))]
        samples: u32,
    },
    /// Coefficients at one energy from both solvers.
    Point {
        #[arg(long, value_parser = positive)]
        v0: f64,
        #[arg(long, value_parser = positive)]
        length: f64,
        #[arg(long, value_parser = positive)]
        mass: Option<f64>,
        #[arg(long = "e-over-v0", value_parser = positive)]
        e_over_v0: f64,
        #[arg(long, value_enum, default_value_t = SpinArg::Up)]
        spin: SpinArg,
    },
}

/// Failure that maps to an exit code.
enum Failure {
    Usage(String),
    Io(io::Error),
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

struct Output {
    table: Option<Table>,
    text: Option<String>,
    code: u8,
}

fn constants(cli: &Cli, mass: Option<f64>) -> Result<PhysicalConstants, Failure> {
    let mut c = PhysicalConstants::default();
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read config {}: {e}", path.display())))?;
        c = c
            .with_config(&text)
            .map_err(|e| Failure::Usage(e.to_string()))?;
    }
    if let Some(m) = mass {
        c.mass_c2 = m;
    }
    Ok(c)
}

fn coefficient_cells(c: &Coefficients) -> Vec<Cell> {
    [c.t1, c.t2, c.r1, c.r2, c.t_qm, c.r_qm, c.sum()]
        .into_iter()
        .map(Cell::Num)
        .collect()
}

fn spin_note(spin: SpinArg) {
    if let SpinArg::Down = spin {
        eprintln!("note: spin-down incidence is an extrapolation: spin labels of the spin-up result are exchanged");
    }
}

fn ratios(r: &Range) -> Result<Vec<f64>, Failure> {
    if r.emax < r.emin {
        return Err(Failure::Usage(format!(
            "--emax {} is below --emin {}",
            r.emax, r.emin
        )));
    }
    Ok(ratio_grid(r.emin, r.emax, r.steps as usize))
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    match &cli.command {
        Command::Barrier {
            v0,
            length,
            mass,
            range,
            method,
            spin,
        } => {
            spin_note(*spin);
            let template = SweepTemplate {
                v0: *v0,
                length: *length,
                incident: (*spin).into(),
                constants: constants(cli, *mass)?,
            };
            let energies: Vec<f64> = ratios(range)?.iter().map(|r| r * v0).collect();
            let method = match method {
                MethodArg::Numeric => Method::Numeric,
                MethodArg::Closed => Method::Closed,
                MethodArg::Both => Method::Both,
            };
            let mut headers = vec!["e_over_v0", "T1", "T2", "R1", "R2", "T_qm", "R_qm", "sum"];
            if method == Method::Both {
                headers.push("delta_numeric_closed");
            }
            let mut table = Table::new(&headers);
            let mut flagged = 0;
            for row in sweep(&template, &energies, method) {
                let mut cells = vec![Cell::Num(row.e_over_v0)];
                cells.extend(coefficient_cells(&row.coefficients));
                if method == Method::Both {
                    // Inside the critical band only the series limit exists: delta is 0 by construction.
                    cells.push(Cell::Num(row.delta.unwrap_or(if row.flag.is_some() {
                        f64::NAN
                    } else {
                        0.0
                    })));
                }
                if let Some(flag) = &row.flag {
                    flagged += 1;
                    eprintln!("flagged E/V0 = {}: {flag}", row.e_over_v0);
                }
                table.push(cells);
            }
            Ok(Output {
                table: Some(table),
                text: None,
                code: if flagged > 0 { EXIT_FLAGGED } else { 0 },
            })
        }
        Command::Step {
            v0,
            mass,
            range,
            spin,
        } => {
            let c = constants(cli, *mass)?;
            let mut table = Table::new(&["e_over_v0", "T1", "T2", "R1", "R2", "sum"]);
            let mut flagged = 0;
            for r in ratios(range)? {
                let coeffs = solve_step(r * v0, *v0, &c, (*spin).into()).unwrap_or_else(|e| {
                    flagged += 1;
                    eprintln!("flagged E/V0 = {r}: {e}");
                    Coefficients::new(f64::NAN, f64::NAN, f64::NAN, f64::NAN)
                });
                let mut cells = vec![Cell::Num(r)];
                cells.extend(
                    [coeffs.t1, coeffs.t2, coeffs.r1, coeffs.r2, coeffs.sum()].map(Cell::Num),
                );
                table.push(cells);
            }
            Ok(Output {
                table: Some(table),
                text: None,
                code: if flagged > 0 { EXIT_FLAGGED } else { 0 },
            })
        }
        Command::Well {
            length,
            mass,
            nmax,
            numeric,
        } => {
            let w = WellProblem::new(*length, *nmax as usize, constants(cli, *mass)?)
                .map_err(|e| Failure::Usage(e.to_string()))?;
            let analytic = energy_levels(&w);
            let mut headers = vec!["n", "E_n_eV", "residual"];
            let found = numeric.then(|| {
                let e_hi = (*nmax as f64 + 0.5).powi(2) * w.ground_energy();
                find_levels_numerically(&w, e_hi)
            });
            if found.is_some() {
                headers.extend(["E_n_numeric_eV", "rel_deviation"]);
            }
            let mut table = Table::new(&headers);
            let mut worst = 0.0_f64;
            for (i, level) in analytic.levels.iter().enumerate() {
                let residual = periodic_residual(level.energy, &w).unwrap_or(f64::NAN);
                let mut cells = vec![
                    Cell::Int(level.n as i64),
                    Cell::Num(level.energy),
                    Cell::Num(residual),
                ];
                if let Some(f) = &found {
                    let e = f.levels.get(i).map_or(f64::NAN, |l| l.energy);
                    let dev = ((e - level.energy) / level.energy).abs();
                    worst = if dev.is_nan() {
                        f64::NAN
                    } else {
                        worst.max(dev)
                    };
                    cells.extend([Cell::Num(e), Cell::Num(dev)]);
                }
                table.push(cells);
            }
            let mut code = 0;
            if let Some(f) = &found {
                eprintln!(
                    "max relative deviation: {}",
                    table::format_g(worst, cli.precision as usize)
                );
                if f.len() != analytic.len() || !(worst <= 1e-10) {
                    code = EXIT_PROPERTY;
                }
            }
            Ok(Output {
                table: Some(table),
                text: None,
                code,
            })
        }
        Command::Pauli {
            extents,
            box_length,
            bz,
        } => {
            let cfg = ConvergenceConfig {
                box_length: *box_length,
                extents: extents.clone(),
                bz: *bz,
                ..ConvergenceConfig::default()
            };
            let rows = convergence_table(&cfg).map_err(|e| Failure::Usage(e.to_string()))?;
            let mut table = Table::new(&[
                "h_nm",
                "identity_residual",
                "gauge_residual",
                "commutator_residual",
            ]);
            for r in &rows {
                table.push(
                    [r.h, r.identity, r.gauge, r.commutator]
                        .map(Cell::Num)
                        .to_vec(),
                );
            }
            let hs: Vec<f64> = rows.iter().map(|r| r.h).collect();
            let mut code = 0;
            for (name, v) in [
                (
                    "identity",
                    rows.iter().map(|r| r.identity).collect::<Vec<_>>(),
                ),
                ("gauge", rows.iter().map(|r| r.gauge).collect()),
                ("commutator", rows.iter().map(|r| r.commutator).collect()),
            ] {
                let orders = convergence_orders(&hs, &v);
                let shown: Vec<String> = orders.iter().map(|o| format!("{o:.3}")).collect();
                eprintln!("{name} convergence orders: [{}]", shown.join(", "));
                if orders.iter().any(|&o| !(o >= 1.9)) {
                    code = EXIT_PROPERTY;
                }
            }
            Ok(Output {
                table: Some(table),
                text: None,
                code,
            })
        }
        Command::Check { samples } => {
            let cfg = CheckConfig {
                seed: cli.seed,
                samples: *samples as usize,
                pauli: ConvergenceConfig::default(),
                fault: cli.fault.map(|f| match f {
                    FaultArg::EtaSign => Fault::EtaSign,
                }),
            };
            let report = run_suite(&cfg);
            Ok(Output {
                table: None,
                text: Some(report.render()),
                code: if report.all_passed() {
                    0
                } else {
                    EXIT_PROPERTY
                },
            })
        }
        Command::Point {
            v0,
            length,
            mass,
            e_over_v0,
            spin,
        } => {
            spin_note(*spin);
            let p = BarrierProblem::new(
                e_over_v0 * v0,
                *v0,
                *length,
                (*spin).into(),
                constants(cli, *mass)?,
            )
            .map_err(|e| Failure::Usage(e.to_string()))?;
            let mut table = Table::new(&[
                "method",
                "e_over_v0",
                "T1",
                "T2",
                "R1",
                "R2",
                "T_qm",
                "R_qm",
                "sum",
            ]);
            let mut push = |method: &str, c: &Coefficients| {
                let mut cells = vec![Cell::Text(method.into()), Cell::Num(*e_over_v0)];
                cells.extend(coefficient_cells(c));
                table.push(cells);
            };
            let mut code = 0;
            if p.regime() == Regime::Critical {
                push("series", &closed_form(&p));
            } else {
                match solve_barrier(&p) {
                    Ok((_, c)) => push("numeric", &c),
                    Err(e) => {
                        eprintln!("flagged: {e}");
                        code = EXIT_FLAGGED;
                    }
                }
                push("closed", &closed_form(&p));
            }
            Ok(Output {
                table: Some(table),
                text: None,
                code,
            })
        }
    }
}

fn emit(cli: &Cli, out: &Output) -> io::Result<()> {
    let mut sink: Box<dyn Write> = match &cli.output {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    let format = match cli.format {
        FormatArg::Csv => Format::Csv,
        FormatArg::Json => Format::Json,
    };
    if let Some(t) = &out.table {
        t.write(&mut sink, format, cli.precision as usize)?;
    }
    if let Some(text) = &out.text {
        sink.write_all(text.as_bytes())?;
    }
    sink.flush()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    ExitCode::SUCCESS
                }
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    let result = run(&cli).and_then(|out| {
        emit(&cli, &out)?;
        Ok(out.code)
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_PROPERTY)
        }
    }
}
