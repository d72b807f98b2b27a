use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use sgfem1d::analytic;
use sgfem1d::basis::Method;
use sgfem1d::sweep::{self, Format, RawConfig, Report, SweepConfig};
use sgfem1d::{Error, Result};

#[derive(Parser)]
#[command(name = "sgfem1d", version, about = "FEM / stable GFEM refinement studies for 1D interface problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Source-problem sweep against the manufactured solution.
    Source(SweepArgs),
    /// Eigenvalue sweep against the exact eigenpairs.
    Eigen(EigenArgs),
    /// Print exact eigenpairs for a piecewise-constant coefficient.
    Oracle {
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        eta: f64,
        #[arg(long, default_value_t = 8)]
        count: usize,
    },
    /// Scaled condition numbers of the stiffness matrix under refinement.
    Cond {
        #[arg(long)]
        p: usize,
        #[arg(long = "N-list", value_delimiter = ',', default_values_t = [20, 40, 80, 160, 320])]
        n_list: Vec<usize>,
        #[arg(long, default_value_t = 1.0 / 3.0)]
        gamma: f64,
        #[arg(long, default_value_t = 4.0)]
        eta: f64,
        #[arg(long, value_delimiter = ',', default_values_t = [String::from("fem"), String::from("sgfem")])]
        methods: Vec<String>,
    },
}

#[derive(Args)]
struct SweepArgs {
    /// Flat key = value configuration file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    p: Option<Vec<usize>>,
    #[arg(long = "N", value_delimiter = ',')]
    n: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<String>>,
    /// Subset of h1_semi, l2, rel_lambda.
    #[arg(long, value_delimiter = ',')]
    outputs: Option<Vec<String>>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    format: String,
    /// Write K, M (and F) of every cell as MatrixMarket files.
    #[arg(long)]
    dump_matrices: Option<PathBuf>,
}

#[derive(Args)]
struct EigenArgs {
    #[command(flatten)]
    common: SweepArgs,
    /// 1 or 2 for the two benchmarks, or a registry name (case1, case2,
    /// case3, custom).
    #[arg(long)]
    case: Option<String>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    eigs: Option<Vec<usize>>,
    /// Instead of a sweep, write (x, u_h, u) samples for one eigenfunction,
    /// using the first degree, element count and method of the config.
    #[arg(long)]
    dump_function: Option<PathBuf>,
    /// Eigenpair rank for --dump-function (default: first of --eigs).
    #[arg(long)]
    dump_eig: Option<usize>,
}

impl SweepArgs {
    fn layers(&self, problem: &str) -> Result<RawConfig> {
        let file = match &self.config {
            Some(path) => RawConfig::from_file(path)?,
            None => RawConfig::default(),
        };
        let base = RawConfig { problem: Some(problem.into()), ..Default::default() };
        Ok(base.merge(file).merge(RawConfig {
            degrees: self.p.clone(),
            ns: self.n.clone(),
            methods: self.methods.clone(),
            outputs: self.outputs.clone(),
            dump_matrices: self.dump_matrices.clone(),
            ..Default::default()
        }))
    }
}

fn write_report(report: &Report, args: &SweepArgs) -> Result<()> {
    let format: Format = args.format.parse()?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    if !report.metadata.fitting_cells.is_empty() {
        eprintln!("note: enrichment disabled on fitting meshes {:?} (p, N)", report.metadata.fitting_cells);
    }
    eprintln!(
        "{} rows, {} rates in {:.2?} (sgfem1d {})",
        report.rows.len(),
        report.rates.len(),
        report.metadata.wall_time,
        report.metadata.version
    );
    match &args.out {
        Some(path) => sweep::emit_report(report, format, path),
        None => {
            let mut out = std::io::stdout().lock();
            match format {
                Format::Csv => sweep::write_csv(report, &mut out)?,
                Format::Markdown => out.write_all(sweep::render_markdown(report).as_bytes())?,
            }
            Ok(())
        }
    }
}

fn eigen(args: &EigenArgs) -> Result<()> {
    let raw = args.common.layers("eigen")?.merge(RawConfig {
        case: args.case.clone(),
        gamma: args.gamma,
        eta: args.eta,
        eigen_indices: args.eigs.clone(),
        ..Default::default()
    });
    let cfg: SweepConfig = raw.resolve()?;
    if let Some(path) = &args.dump_function {
        let index = args.dump_eig.unwrap_or(cfg.eigen_indices[0]);
        let file = std::fs::File::create(path)?;
        return sweep::dump_eigenfunction(&cfg, cfg.degrees[0], cfg.ns[0], cfg.methods[0], index, file);
    }
    write_report(&sweep::run_eigen_sweep(&cfg)?, &args.common)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Source(args) => {
            let cfg = args.layers("source")?.resolve()?;
            write_report(&sweep::run_source_sweep(&cfg)?, &args)
        }
        Command::Eigen(args) => eigen(&args),
        Command::Oracle { gamma, eta, count } => {
            let pairs = analytic::solve_matching_system(gamma, eta, count)?;
            let mut out = std::io::stdout().lock();
            writeln!(out, "index,omega1,d,lambda")?;
            for pr in pairs {
                writeln!(
                    out,
                    "{},{},{},{}",
                    pr.index,
                    sweep::sci17(pr.omega1),
                    sweep::sci17(pr.d),
                    sweep::sci17(pr.lambda)
                )?;
            }
            Ok(())
        }
        Command::Cond { p, n_list, gamma, eta, methods } => {
            let methods = methods.iter().map(|m| m.parse()).collect::<Result<Vec<Method>>>()?;
            let recs = sweep::condition_numbers(gamma, eta, p, &n_list, &methods)?;
            let mut out = std::io::stdout().lock();
            writeln!(out, "method,p,N,cond")?;
            for r in &recs {
                writeln!(out, "{},{},{},{}", r.method, r.p, r.n, sweep::sci17(r.cond))?;
            }
            for m in methods {
                let group: Vec<_> = recs.iter().filter(|r| r.method == m).cloned().collect();
                match sweep::growth_slope(&group) {
                    Ok(s) => eprintln!("{m}: log-log growth slope {s:.3}"),
                    Err(e) => eprintln!("{m}: {e}"),
                }
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_config() || matches!(e, Error::Io(_)) {
                ExitCode::from(2)
            } else {
                ExitCode::from(3)
            }
        }
    }
}
