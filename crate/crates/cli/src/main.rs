use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use matched_adi::adi::Scheme;
use matched_adi::cases::{CaseId, ExampleCase};
use matched_adi::csvio::{self, Table};
use matched_adi::geometry::find_crossings;
use matched_adi::linalg::EigenOptions;
use matched_adi::stability::{assemble_stability_matrices, spectrum_report};
use matched_adi::study::{
    boundedness_run, default_dt_sweep, run_case, spatial_convergence, temporal_convergence,
};

#[derive(Parser, Debug)]
#[command(name = "matched-adi", version, about = "Matched ADI solver for heat equations with material interfaces")]
struct Cli {
    /// Worker threads for line sweeps and assembly (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct CaseArgs {
    /// Example: 1, 2, 3, 4, 5a or 5b.
    #[arg(long)]
    example: CaseId,
    #[arg(long)]
    alpha_minus: Option<f64>,
    #[arg(long)]
    alpha_plus: Option<f64>,
}

impl CaseArgs {
    fn case(&self) -> Result<ExampleCase> {
        let (am, ap) = self.example.default_alphas();
        Ok(ExampleCase::with_alphas(
            self.example,
            self.alpha_minus.unwrap_or(am),
            self.alpha_plus.unwrap_or(ap),
        )?)
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Advance one example to its final time and report the error.
    Run {
        #[command(flatten)]
        case: CaseArgs,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        dt: f64,
        /// Final time (default: the example's stopping time).
        #[arg(long)]
        tfinal: Option<f64>,
        /// douglas or euler.
        #[arg(long, default_value = "douglas")]
        scheme: Scheme,
        /// Error summary CSV.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Nodal field CSV.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Mesh refinement study at a fixed step size.
    ConvergeSpace {
        #[command(flatten)]
        case: CaseArgs,
        #[arg(long, value_delimiter = ',', default_values_t = [21, 41, 81, 161, 321])]
        meshes: Vec<usize>,
        /// Step size (default: the example's study value).
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        tfinal: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Step size study on a fixed mesh with fitted rates.
    ConvergeTime {
        #[command(flatten)]
        case: CaseArgs,
        #[arg(long, default_value_t = 321)]
        n: usize,
        /// Step sizes (default: 1, 0.5, 0.1, ..., 1e-6).
        #[arg(long, value_delimiter = ',')]
        dts: Vec<f64>,
        #[arg(long)]
        tfinal: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Long runs recording the error after every step.
    Boundedness {
        #[command(flatten)]
        case: CaseArgs,
        #[arg(long, default_value_t = 161)]
        n: usize,
        #[arg(long, value_delimiter = ',', default_values_t = [0.1, 1.0, 5.0])]
        dts: Vec<f64>,
        #[arg(long, default_value_t = 10_000)]
        steps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Leading eigenvalues of the implicit Euler magnifying matrix.
    Stability {
        #[command(flatten)]
        case: CaseArgs,
        #[arg(long, default_value_t = 41)]
        n: usize,
        #[arg(long)]
        dt: f64,
        #[arg(long, default_value_t = 10)]
        k: usize,
        /// Starting vector seed for the iterative eigensolver.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit(table: &Table, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => table
            .write_atomic(path)
            .with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{}", table.render()?);
            Ok(())
        }
    }
}

fn execute(cmd: Command) -> Result<()> {
    match cmd {
        Command::Run {
            case,
            n,
            dt,
            tfinal,
            scheme,
            out,
            dump,
        } => {
            let case = case.case()?;
            let t_final = tfinal.unwrap_or(case.final_time);
            let (state, rec) = run_case(&case, n, dt, t_final, scheme)?;
            eprintln!(
                "{} N={n} dt={dt:e} T={t_final}: Linf {:.6e} L2 {:.6e} ({:.2}s)",
                case.id, rec.linf, rec.l2, rec.wall_seconds
            );
            let mut table = Table::new(&["N", "dt", "t_final", "Linf", "L2"])
                .param("example", case.id)
                .param("scheme", format!("{scheme:?}"))
                .param("alpha_minus", case.alpha_minus)
                .param("alpha_plus", case.alpha_plus);
            table.push(vec![n as f64, dt, t_final, rec.linf, rec.l2])?;
            emit(&table, out.as_deref())?;
            if let Some(path) = dump {
                let grid = case.grid(n)?;
                csvio::field_table(&case, &grid, &state)
                    .param("example", case.id)
                    .write_atomic(&path)
                    .with_context(|| format!("writing {}", path.display()))?;
            }
        }
        Command::ConvergeSpace {
            case,
            meshes,
            dt,
            tfinal,
            out,
        } => {
            let case = case.case()?;
            let dt = dt.unwrap_or(case.id.spatial_study_dt());
            let table = spatial_convergence(&case, &meshes, dt, tfinal.unwrap_or(case.final_time))?;
            let mut csv = csvio::spatial_table(&table).param("example", case.id);
            if let Ok((linf, l2)) = table.fitted_spatial_order() {
                csv = csv
                    .param("fitted_order_Linf", csvio::format_value(linf))
                    .param("fitted_order_L2", csvio::format_value(l2));
            }
            emit(&csv, out.as_deref())?;
        }
        Command::ConvergeTime {
            case,
            n,
            dts,
            tfinal,
            out,
        } => {
            let case = case.case()?;
            let dts = if dts.is_empty() { default_dt_sweep() } else { dts };
            let study = temporal_convergence(&case, &dts, n, tfinal.unwrap_or(case.final_time))?;
            emit(&csvio::temporal_table(&study).param("example", case.id), out.as_deref())?;
        }
        Command::Boundedness {
            case,
            n,
            dts,
            steps,
            out,
        } => {
            let case = case.case()?;
            let records = boundedness_run(&case, n, &dts, steps)?;
            for r in &records {
                eprintln!(
                    "{} N={n} dt={}: max error {:.6e}, {}",
                    case.id,
                    r.dt,
                    r.max_error,
                    if r.bounded { "bounded" } else { "UNBOUNDED" }
                );
            }
            let table = csvio::boundedness_table(&records)
                .param("example", case.id)
                .param("N", n)
                .param("steps", steps);
            emit(&table, out.as_deref())?;
        }
        Command::Stability {
            case,
            n,
            dt,
            k,
            seed,
            out,
        } => {
            let case = case.case()?;
            let problem = case.problem(n)?;
            let topology = find_crossings(&problem.grid, &problem.interface)?;
            let sm = assemble_stability_matrices(&problem, &topology, dt)?;
            let mut opts = EigenOptions::default();
            if let Some(s) = seed {
                opts.seed = s;
            }
            let report = spectrum_report(&sm, k, &opts)?;
            eprintln!(
                "{} N={n} dt={dt:e}: max |lambda| {:.12}, {} of modulus one, {}",
                case.id,
                report.max_modulus,
                report.unit_count,
                if report.stable { "stable" } else { "UNSTABLE" }
            );
            emit(&csvio::spectrum_table(&report).param("example", case.id), out.as_deref())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: cannot configure {t} threads: {e}");
            return ExitCode::FAILURE;
        }
    }
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
