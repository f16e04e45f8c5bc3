use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use hyperklein::harness::{
    convergence_profile, emit_complexity_surface, published_reference, run_sweep, write_csv, Manifest, RunParams,
    Sweep, SweepReport, SweepSpec,
};
use hyperklein::Result;

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SweepArg {
    D,
    S,
    Eps,
}

impl From<SweepArg> for Sweep {
    fn from(a: SweepArg) -> Self {
        match a {
            SweepArg::D => Sweep::Dimension,
            SweepArg::S => Sweep::Radius,
            SweepArg::Eps => Sweep::Accuracy,
        }
    }
}

/// Klein cutting-plane benchmark runs on hyperbolic balls.
///
/// Without --sweep, runs the seeded minimax benchmark at a single configuration.
#[derive(Debug, Parser)]
#[command(version)]
struct Cli {
    /// Dimension.
    #[arg(long, default_value_t = 4)]
    d: usize,
    /// Curvature scale; the curvature is -kappa^2.
    #[arg(long, default_value_t = 1.0)]
    kappa: f64,
    /// Ball radius; with kappa = 1 this is s.
    #[arg(long, default_value_t = 2.0)]
    r: f64,
    #[arg(long, default_value_t = 1e-3)]
    eps: f64,
    /// Anchor offset of the minimax benchmark.
    #[arg(long, default_value_t = 0.8)]
    tau: f64,
    /// Klein norm of the minimizer as a fraction of tanh(s).
    #[arg(long, default_value_t = 0.55)]
    fraction: f64,
    #[arg(long, default_value_t = 20)]
    seeds: usize,
    #[arg(long, default_value_t = 0)]
    base_seed: u64,
    #[arg(long, value_enum)]
    sweep: Option<SweepArg>,
    /// Comma-separated swept values; defaults to the reference grid.
    #[arg(long, value_delimiter = ',')]
    values: Vec<f64>,
    /// Run the three reference sweeps over d, s and eps.
    #[arg(long, conflicts_with_all = ["sweep", "surface"])]
    reference: bool,
    /// Emit the complexity surface instead of running the solver.
    #[arg(long)]
    surface: bool,
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.3,0.5,1,2,4,8")]
    s_grid: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.01,0.001,0.0001")]
    eps_grid: Vec<f64>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

impl Cli {
    fn fixed(&self) -> RunParams {
        RunParams {
            d: self.d,
            kappa: self.kappa,
            s: self.kappa * self.r,
            eps: self.eps,
            tau: self.tau,
            fraction: self.fraction,
            seed: self.base_seed,
        }
    }

    fn spec(&self, swept: Sweep, values: Vec<f64>) -> SweepSpec {
        SweepSpec {
            swept,
            values,
            fixed: self.fixed(),
            num_seeds: self.seeds,
            base_seed: self.base_seed,
        }
    }
}

fn write_report(dir: &Path, stem: &str, report: &SweepReport) -> Result<()> {
    write_csv(
        BufWriter::new(File::create(dir.join(format!("{stem}_runs.csv")))?),
        &report.rows,
    )?;
    write_csv(
        BufWriter::new(File::create(dir.join(format!("{stem}_summary.csv")))?),
        &report.summary,
    )?;
    write_csv(
        BufWriter::new(File::create(dir.join(format!("{stem}_convergence.csv")))?),
        &convergence_profile(&report.outcomes),
    )?;
    Manifest::for_spec(&report.spec)?
        .write(BufWriter::new(File::create(dir.join(format!("{stem}_manifest.json")))?))?;
    Ok(())
}

fn print_report(report: &SweepReport) {
    println!(
        "{:>5} {:>8} {:>5} {:>9} {:>8} {:>5} {:>7} {:>11}  published mean/max",
        "sweep", "value", "runs", "mean", "std", "max", "N", "max_gap"
    );
    for s in &report.summary {
        let reference = published_reference(report.spec.swept, s.value)
            .map(|(mean, _, max, _)| format!("{mean}/{max}"))
            .unwrap_or_else(|| "-".into());
        println!(
            "{:>5} {:>8} {:>5} {:>9.2} {:>8.2} {:>5} {:>7} {:>11.3e}  {reference}",
            s.sweep, s.value, s.runs, s.mean, s.std, s.max, s.theorem_n, s.max_gap
        );
        if s.unreached > 0 {
            println!("      {} run(s) never reached eps", s.unreached);
        }
    }
    for f in &report.soft_flags {
        println!(
            "note: {}={} mean {:.2} is outside +-75% of the published {}",
            f.sweep, f.value, f.mean, f.reference_mean
        );
    }
}

fn run(cli: &Cli) -> Result<()> {
    fs::create_dir_all(&cli.out)?;
    if cli.surface {
        let path = cli.out.join("surface.csv");
        let rows = emit_complexity_surface(&cli.s_grid, &cli.eps_grid, BufWriter::new(File::create(&path)?))?;
        println!("wrote {} rows to {}", rows.len(), path.display());
        return Ok(());
    }

    let specs: Vec<(String, SweepSpec)> = if cli.reference {
        [Sweep::Dimension, Sweep::Radius, Sweep::Accuracy]
            .into_iter()
            .map(|sw| {
                let mut spec = SweepSpec::reference(sw, cli.seeds);
                spec.base_seed = cli.base_seed;
                (format!("reference_{}", sw.label()), spec)
            })
            .collect()
    } else if let Some(arg) = cli.sweep {
        let swept = Sweep::from(arg);
        let values = if cli.values.is_empty() {
            swept.reference_values()
        } else {
            cli.values.clone()
        };
        vec![(format!("sweep_{}", swept.label()), cli.spec(swept, values))]
    } else {
        vec![("single".to_string(), cli.spec(Sweep::Radius, vec![cli.kappa * cli.r]))]
    };

    for (stem, spec) in specs {
        let report = run_sweep(&spec)?;
        print_report(&report);
        write_report(&cli.out, &stem, &report)?;
        println!("wrote {}/{stem}_*.csv", cli.out.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
