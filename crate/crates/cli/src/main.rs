use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use shapefit::datagen::{catalog_entry, generate, NoiseSpec, DEFAULT_SAMPLES};
use shapefit::eval::{compare, Tolerances};
use shapefit::io::{read_points_file, write_points_file};
use shapefit::plot::render_svg;
use shapefit::report::FitReport;
use shapefit::{fit, Config, Family, JacobianMode, LambdaPolicy, Spec};

const EXIT_FAILURE: u8 = 1;
const EXIT_NOT_CONVERGED: u8 = 2;
const EXIT_TOLERANCE: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "shapefit",
    version,
    about = "Fit polygons and ellipses to 2D points"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample a catalog shape, optionally with gaps and noise, to CSV.
    Generate {
        /// Catalog id (T0, T1, T2, R0, R1, R2, R3, H0, H1, E0, E1).
        #[arg(long)]
        shape: String,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        n: usize,
        /// Standard deviation of per-coordinate Gaussian noise.
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        /// Fraction of each vertex neighbourhood (or ellipse arc) to remove.
        #[arg(long, default_value_t = 0.0)]
        gaps: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Fit a shape family to a CSV point set and write a JSON report.
    Fit {
        #[arg(long)]
        family: Family,
        #[arg(long)]
        points: PathBuf,
        /// `free`, or a fixed shear value.
        #[arg(long, default_value = "0")]
        lambda: LambdaArg,
        #[arg(long, default_value_t = 1e-6)]
        eps: f64,
        #[arg(long, default_value_t = 100)]
        max_iter: usize,
        #[arg(long, default_value_t = JacobianMode::Hybrid)]
        jacobian: JacobianMode,
        /// Starting orientations screened before iterating; 1 uses only the principal axis.
        #[arg(long, default_value_t = Config::default().starts)]
        starts: usize,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Compare a fit report with a catalog id or another report.
    Eval {
        #[arg(long)]
        fit: PathBuf,
        /// Catalog id or path to a report.
        #[arg(long)]
        truth: String,
        #[arg(long, default_value_t = Tolerances::default().center)]
        tol_center: f64,
        #[arg(long, default_value_t = Tolerances::default().scale)]
        tol_scale: f64,
        /// Degrees.
        #[arg(long, default_value_t = Tolerances::default().angle)]
        tol_angle: f64,
        #[arg(long)]
        tol_hausdorff: Option<f64>,
    },
    /// Render points and a fitted boundary as SVG.
    Plot {
        #[arg(long)]
        points: PathBuf,
        #[arg(long)]
        fit: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Clone, Copy, Debug)]
enum LambdaArg {
    Free,
    Fixed(f64),
}

impl std::str::FromStr for LambdaArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("free") {
            return Ok(LambdaArg::Free);
        }
        match s.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(LambdaArg::Fixed(v)),
            _ => Err(format!("expected `free` or a number, got `{s}`")),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_FAILURE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_FAILURE)
        }
    }
}

fn run(command: Command) -> Result<ExitCode, String> {
    match command {
        Command::Generate {
            shape,
            n,
            noise,
            gaps,
            seed,
            output,
        } => {
            let entry =
                catalog_entry(&shape).ok_or_else(|| format!("unknown shape id `{shape}`"))?;
            let points = generate::<f64>(entry, n, gaps, NoiseSpec { sigma: noise, seed })
                .map_err(|e| e.to_string())?;
            write_points_file(&output, &points)
                .map_err(|e| format!("{}: {e}", output.display()))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Fit {
            family,
            points,
            lambda,
            eps,
            max_iter,
            jacobian,
            starts,
            output,
        } => {
            let data =
                read_points_file(&points).map_err(|e| format!("{}: {e}", points.display()))?;
            let config = Config {
                eps,
                max_iter,
                jacobian,
                starts,
                ..Config::default()
            };
            let policy = match lambda {
                LambdaArg::Free => LambdaPolicy::free(),
                LambdaArg::Fixed(v) => LambdaPolicy::Fixed(v),
            };
            let result = fit(&data, family, &config, policy).map_err(|e| e.to_string())?;
            let report = FitReport::from_fit(&result);
            report
                .write(&output)
                .map_err(|e| format!("{}: {e}", output.display()))?;
            println!("{}", report.summary());
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            Ok(if report.converged {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_NOT_CONVERGED)
            })
        }
        Command::Eval {
            fit,
            truth,
            tol_center,
            tol_scale,
            tol_angle,
            tol_hausdorff,
        } => {
            let fitted = FitReport::read(&fit).map_err(|e| format!("{}: {e}", fit.display()))?;
            let (truth_family, truth_params) = if Path::new(&truth).is_file() {
                let r = FitReport::read(&truth).map_err(|e| format!("{truth}: {e}"))?;
                (r.family, r.params())
            } else {
                let entry = catalog_entry(&truth).ok_or_else(|| {
                    format!("`{truth}` is neither a report file nor a catalog id")
                })?;
                (entry.family, entry.params())
            };
            let tol = Tolerances {
                center: tol_center,
                scale: tol_scale,
                angle: tol_angle,
                hausdorff: tol_hausdorff,
            };
            let cmp = compare(
                fitted.family,
                &fitted.params(),
                truth_family,
                &truth_params,
                &tol,
            )
            .map_err(|e| e.to_string())?;
            println!("{}", cmp.render());
            Ok(if cmp.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_TOLERANCE)
            })
        }
        Command::Plot {
            points,
            fit,
            output,
        } => {
            let data =
                read_points_file(&points).map_err(|e| format!("{}: {e}", points.display()))?;
            let report = FitReport::read(&fit).map_err(|e| format!("{}: {e}", fit.display()))?;
            let svg = render_svg(&data, &report.params(), &Spec::new(report.family));
            std::fs::write(&output, svg).map_err(|e| format!("{}: {e}", output.display()))?;
            Ok(ExitCode::SUCCESS)
        }
    }
}
