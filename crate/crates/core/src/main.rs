//! Command-line front end: classification, exponentials, SVD, the
//! reachability certificate, normal-form reduction, single-target pulse
//! optimization, grid sweeps, plots, boundary bisection and the
//! self-check suite.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use sp2control::algebra::StabilityClass;
use sp2control::certificate;
use sp2control::error::Sp2Error;
use sp2control::euler;
use sp2control::export::{self, ExportFormat};
use sp2control::grid::{self, Axis, ProblemDefaults, SweepSpec};
use sp2control::normal_form;
use sp2control::plot::{self, Projection};
use sp2control::pulse::{optimize, PulseProblem};
use sp2control::verify::verify_suite;
use sp2control::{Algebra, Euler, Mat2d, Offsets, Symplectic, System};

#[derive(Parser)]
#[command(name = "sp2control", version, about = "Single-mode symplectic control toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify an algebra element by the sign of Tr[M^2]
    Classify {
        /// Matrix entries m11,m12,m21,m22
        #[arg(long, allow_hyphen_values = true)]
        matrix: String,
    },
    /// Closed-form exponential exp(M t)
    Expm {
        #[arg(long, allow_hyphen_values = true)]
        matrix: String,
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
    },
    /// Unique Euler (singular value) decomposition
    Svd {
        #[arg(long, allow_hyphen_values = true)]
        matrix: String,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        theta0: f64,
        #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2, allow_hyphen_values = true)]
        phi0: f64,
    },
    /// Rebuild R_theta diag(1/z, z) R_phi
    Compose {
        #[arg(long, allow_hyphen_values = true)]
        theta: f64,
        #[arg(long, allow_hyphen_values = true)]
        z: f64,
        #[arg(long, allow_hyphen_values = true)]
        phi: f64,
    },
    /// Reachability certificate f (matrix form) or f_z (SVD form)
    Certificate(CertificateArgs),
    /// Reduce a control system to the normal form -K_x + b K_z + u K_y
    Normalize {
        /// Example-system parameter c
        #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["drift", "control"])]
        c: Option<f64>,
        /// Drift matrix entries m11,m12,m21,m22
        #[arg(long = "A", requires = "control", allow_hyphen_values = true)]
        drift: Option<String>,
        /// Control matrix entries m11,m12,m21,m22
        #[arg(long = "B", requires = "drift", allow_hyphen_values = true)]
        control: Option<String>,
    },
    /// Optimize a pulse toward one SVD-space target
    Reach {
        #[arg(long, allow_hyphen_values = true)]
        c: f64,
        #[arg(long = "T", allow_hyphen_values = true)]
        t: f64,
        #[arg(long, allow_hyphen_values = true)]
        target_theta: f64,
        #[arg(long, allow_hyphen_values = true)]
        target_z: f64,
        #[arg(long, allow_hyphen_values = true)]
        target_phi: f64,
        #[command(flatten)]
        opt: OptArgs,
    },
    /// Run a (c, T) x grid sweep from a JSON spec
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long, default_value = "results.json")]
        out: PathBuf,
        #[arg(long, default_value = "json")]
        format: String,
    },
    /// Render a 2-D scatter projection of sweep records
    Plot {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value = "theta-phi")]
        projection: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the analytic property suites
    Verify,
    /// Bisect the reachable/unreachable boundary along one coordinate
    Boundary {
        /// Fixed coordinates, e.g. --fix theta=-2.356 --fix phi=2.356
        #[arg(long = "fix", allow_hyphen_values = true)]
        fixed: Vec<String>,
        #[arg(long)]
        axis: String,
        /// Bracket endpoints a,b
        #[arg(long, allow_hyphen_values = true)]
        bracket: String,
        #[arg(long, allow_hyphen_values = true)]
        c: f64,
        #[arg(long = "T", allow_hyphen_values = true)]
        t: f64,
        #[command(flatten)]
        opt: OptArgs,
    },
}

#[derive(Args)]
struct CertificateArgs {
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["theta", "z", "phi"])]
    matrix: Option<String>,
    #[arg(long, allow_hyphen_values = true, requires_all = ["z", "phi"])]
    theta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    z: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    phi: Option<f64>,
}

#[derive(Args)]
struct OptArgs {
    #[arg(long, default_value_t = 10)]
    slices: usize,
    #[arg(long, default_value_t = 20.0)]
    umax: f64,
    #[arg(long, default_value_t = 5)]
    restarts: usize,
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10.0)]
    wall_limit: f64,
}

impl OptArgs {
    fn defaults(&self) -> ProblemDefaults {
        ProblemDefaults {
            slices: self.slices,
            u_max: self.umax,
            tol: self.tol,
            restarts: self.restarts,
            wall_limit: self.wall_limit,
        }
    }
}

fn parse_matrix(text: &str) -> Result<Mat2d, String> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 4 {
        return Err(format!("expected 4 comma-separated entries, got {}", parts.len()));
    }
    let mut vals = [0.0; 4];
    for (i, p) in parts.iter().enumerate() {
        vals[i] = p
            .trim()
            .parse()
            .map_err(|e| format!("entry {}: {e}", i + 1))?;
    }
    Ok(Mat2d::new(vals[0], vals[1], vals[2], vals[3]))
}

fn class_name(c: StabilityClass) -> &'static str {
    match c {
        StabilityClass::Parabolic => "parabolic",
        StabilityClass::Hyperbolic => "hyperbolic",
        StabilityClass::Elliptic => "elliptic",
    }
}

enum CliError {
    Usage(String),
    Io(String),
    VerificationFailed,
}

impl From<Sp2Error> for CliError {
    fn from(e: Sp2Error) -> Self {
        match e {
            Sp2Error::Io { .. } => CliError::Io(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Classify { matrix } => {
            let m = Algebra::new(parse_matrix(&matrix).map_err(CliError::Usage)?)?;
            println!(
                "{}",
                json!({ "class": class_name(m.classify()), "trace_sq": m.trace_sq() })
            );
        }
        Command::Expm { matrix, t } => {
            let m = Algebra::new(parse_matrix(&matrix).map_err(CliError::Usage)?)?;
            let s = m.expm(t).mat();
            println!("{}", json!(s.as_array()));
        }
        Command::Svd {
            matrix,
            theta0,
            phi0,
        } => {
            let m = parse_matrix(&matrix).map_err(CliError::Usage)?;
            let s = Symplectic::new(m)?;
            let e = euler::decompose(&s, &Offsets { theta0, phi0 })?;
            println!("{}", json!({ "theta": e.theta, "z": e.zed, "phi": e.phi }));
        }
        Command::Compose { theta, z, phi } => {
            if z < 1.0 {
                return Err(CliError::Usage("z must be >= 1".into()));
            }
            let s = euler::compose(&Euler::new(theta, z, phi));
            println!("{}", json!(s.mat().as_array()));
        }
        Command::Certificate(args) => match (args.matrix, args.theta, args.z, args.phi) {
            (Some(matrix), None, None, None) => {
                let m = parse_matrix(&matrix).map_err(CliError::Usage)?;
                println!("{}", json!({ "f": certificate::f_of_matrix(&m) }));
            }
            (None, Some(theta), Some(z), Some(phi)) => {
                let fz = certificate::fz_of_triple(&Euler::new(theta, z, phi))?;
                println!("{}", json!({ "fz": fz }));
            }
            _ => {
                return Err(CliError::Usage(
                    "provide either --matrix or all of --theta --z --phi".into(),
                ))
            }
        },
        Command::Normalize { c, drift, control } => {
            let sys = match (c, drift, control) {
                (Some(c), None, None) => System::example(c),
                (None, Some(a), Some(b)) => System::new(
                    Algebra::new(parse_matrix(&a).map_err(CliError::Usage)?)?,
                    Algebra::new(parse_matrix(&b).map_err(CliError::Usage)?)?,
                ),
                _ => {
                    return Err(CliError::Usage(
                        "provide either --c or both --A and --B".into(),
                    ))
                }
            };
            let nf = normal_form::normalize(&sys)?;
            println!(
                "{}",
                json!({
                    "b": nf.b,
                    "time_scale": nf.time_scale,
                    "u_offset": nf.u_offset,
                    "u_scale": nf.u_scale,
                    "time_reversed": nf.time_reversed,
                    "P": nf.p.mat().as_array(),
                })
            );
        }
        Command::Reach {
            c,
            t,
            target_theta,
            target_z,
            target_phi,
            opt,
        } => {
            if target_z < 1.0 {
                return Err(CliError::Usage("--target-z must be >= 1".into()));
            }
            let target = euler::compose(&Euler::new(target_theta, target_z, target_phi));
            let problem: PulseProblem = opt.defaults().problem(c, t, target, opt.seed);
            let result = optimize(&problem);
            println!(
                "{}",
                serde_json::to_string_pretty(&result)
                    .map_err(|e| CliError::Usage(e.to_string()))?
            );
        }
        Command::Sweep {
            config,
            jobs,
            out,
            format,
        } => {
            let text = std::fs::read_to_string(&config).map_err(|e| {
                CliError::Io(format!("{}: {e}", config.display()))
            })?;
            let mut spec: SweepSpec =
                serde_json::from_str(&text).map_err(|e| CliError::Usage(e.to_string()))?;
            if let Some(jobs) = jobs {
                spec.jobs = jobs;
            }
            let records = grid::run_grid(&spec)?;
            let format: ExportFormat = format.parse()?;
            export::export(&records, &out, format)?;
            let reached = records.iter().filter(|r| r.reached()).count();
            eprintln!(
                "{} points, {} reached; wrote {}",
                records.len(),
                reached,
                out.display()
            );
        }
        Command::Plot {
            input,
            projection,
            out,
        } => {
            let records = export::import_json(&input)?;
            let projection: Projection = projection.parse()?;
            plot::render_scatter(&records, projection, &out)?;
            eprintln!("wrote {}", out.display());
        }
        Command::Verify => {
            let report = verify_suite();
            for check in &report.checks {
                let status = if check.passed() { "PASS" } else { "FAIL" };
                let detail = if check.detail.is_empty() {
                    String::new()
                } else {
                    format!(" [{}]", check.detail)
                };
                println!(
                    "{status} {} ({} samples, {} failures){detail}",
                    check.name, check.samples, check.failures
                );
            }
            if !report.passed() {
                return Err(CliError::VerificationFailed);
            }
        }
        Command::Boundary {
            fixed,
            axis,
            bracket,
            c,
            t,
            opt,
        } => {
            let axis = match axis.as_str() {
                "theta" => Axis::Theta,
                "z" => Axis::Z,
                "phi" => Axis::Phi,
                other => {
                    return Err(CliError::Usage(format!(
                        "unknown axis '{other}' (expected theta, z or phi)"
                    )))
                }
            };
            let mut point = Euler::new(0.0, 1.0, std::f64::consts::FRAC_PI_2);
            for f in &fixed {
                let (name, value) = f
                    .split_once('=')
                    .ok_or_else(|| CliError::Usage(format!("--fix expects name=value, got '{f}'")))?;
                let value: f64 = value
                    .parse()
                    .map_err(|e| CliError::Usage(format!("--fix {name}: {e}")))?;
                match name {
                    "theta" => point.theta = value,
                    "z" => point.zed = value,
                    "phi" => point.phi = value,
                    other => {
                        return Err(CliError::Usage(format!("unknown coordinate '{other}'")))
                    }
                }
            }
            let (a, b) = bracket
                .split_once(',')
                .ok_or_else(|| CliError::Usage("--bracket expects a,b".into()))?;
            let bracket = (
                a.trim()
                    .parse()
                    .map_err(|e| CliError::Usage(format!("bracket: {e}")))?,
                b.trim()
                    .parse()
                    .map_err(|e| CliError::Usage(format!("bracket: {e}")))?,
            );
            let result =
                grid::bisect_boundary(c, t, &point, axis, bracket, &opt.defaults(), opt.seed)?;
            println!(
                "{}",
                serde_json::to_string_pretty(&result)
                    .map_err(|e| CliError::Usage(e.to_string()))?
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version requests are successful exits
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::VerificationFailed) => {
            eprintln!("error: verification failed");
            ExitCode::from(3)
        }
    }
}
