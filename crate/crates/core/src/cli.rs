//! The `hyplog` command line.
//!
//! Every command prints one JSON document. `verify` commands exit with 0 when
//! the check passes and 1 when it fails; malformed input exits with 2.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::domain::{build_paired_grid, polarize_mask, DomainSpec, Polarizer};
use crate::error::{invalid, Error, Result};
use crate::experiments::{self, PlotPoint, Report};
use crate::hypgeo::{Geodesic, PointD, Side};
use crate::operator::assemble;
use crate::spectral::{leading_eigenpairs, radial_oracle_table};

const MIN_PITCH: f64 = 1e-4;
const MAX_PITCH: f64 = 0.2;

#[derive(Parser, Debug)]
#[command(
    name = "hyplog",
    version,
    about = "Logarithmic potential operator on the Poincaré disk",
    arg_required_else_help = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Largest eigenvalues of the discretized operator on a domain.
    Spectrum {
        #[command(flatten)]
        domain: DomainArgs,
        /// Grid pitch.
        #[arg(long)]
        pitch: f64,
        /// Number of leading eigenvalues.
        #[arg(long, default_value_t = 10)]
        count: usize,
        /// Write the symmetric matrix to this file (u64 size header, row-major f64, little-endian).
        #[arg(long)]
        dump: Option<PathBuf>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Polarize a domain on a paired grid and print both masks.
    Polarize {
        #[command(flatten)]
        domain: DomainArgs,
        #[command(flatten)]
        polarizer: PolarizerArgs,
        /// Grid pitch.
        #[arg(long)]
        pitch: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run one verification.
    Verify {
        #[arg(value_enum)]
        check: Check,
        #[command(flatten)]
        domain: DomainArgs,
        #[command(flatten)]
        polarizer: OptionalPolarizerArgs,
        /// Grid pitch, or a comma-separated list where a check uses several.
        #[arg(long, value_delimiter = ',', required = true)]
        pitch: Vec<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random trials for `bound`.
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Centre `x,y` for `representation`.
        #[arg(long, value_delimiter = ',', num_args = 1, default_value = "0,0", allow_hyphen_values = true)]
        z: Vec<f64>,
        /// Circle radius for `representation`.
        #[arg(long, default_value_t = 0.1)]
        r: f64,
        /// Radii for `decay`.
        #[arg(long, value_delimiter = ',', default_value = "0.7,0.9,0.99,0.999")]
        radii: Vec<f64>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Radial reference eigenvalue and its convergence table.
    Oracle {
        /// Euclidean radius of the centred disk.
        #[arg(long = "R", short = 'R')]
        radius: f64,
        /// Radial node counts, ascending.
        #[arg(long, value_delimiter = ',', default_value = "128,256,512")]
        n: Vec<usize>,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Check {
    Fk,
    Riesz,
    Positivity,
    Representation,
    Bound,
    Decay,
    Eigenfunction,
}

#[derive(Args, Debug)]
struct DomainArgs {
    /// Domain JSON, inline or a path to a file.
    #[arg(long)]
    domain: String,
}

#[derive(Args, Debug)]
struct PolarizerArgs {
    /// `diam:<theta>` or `arc:<theta>:<a>`.
    #[arg(long, allow_hyphen_values = true)]
    geodesic: String,
    /// `pos` or `neg`.
    #[arg(long)]
    side: String,
}

#[derive(Args, Debug)]
struct OptionalPolarizerArgs {
    /// `diam:<theta>` or `arc:<theta>:<a>`, for `fk` and `riesz`.
    #[arg(long, allow_hyphen_values = true)]
    geodesic: Option<String>,
    /// `pos` or `neg`, for `fk` and `riesz`.
    #[arg(long)]
    side: Option<String>,
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Write the JSON document here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Append reports to this JSON-lines manifest.
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Write plot data (`x,y,series`) here.
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn parse_domain(text: &str) -> Result<DomainSpec> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        DomainSpec::from_json(trimmed)
    } else {
        DomainSpec::from_json(&std::fs::read_to_string(text)?)
    }
}

fn parse_polarizer(geodesic: &str, side: &str) -> Result<Polarizer> {
    let g: Geodesic = geodesic.parse()?;
    let s: Side = side.parse()?;
    Polarizer::new(g, s)
}

fn check_pitch(h: f64) -> Result<f64> {
    if h > MIN_PITCH && h < MAX_PITCH {
        Ok(h)
    } else {
        Err(invalid(format!("pitch {h} must lie in ({MIN_PITCH}, {MAX_PITCH})")))
    }
}

#[derive(Serialize)]
struct SpectrumDoc {
    #[serde(flatten)]
    report: Report,
    eigenvalues: Vec<f64>,
}

#[derive(Serialize)]
struct MaskNode {
    x: f64,
    y: f64,
    weight: f64,
    omega: bool,
    polarized: bool,
}

#[derive(Serialize)]
struct PolarizeDoc {
    #[serde(flatten)]
    report: Report,
    geodesic: String,
    side: String,
    mask: Vec<MaskNode>,
}

#[derive(Serialize)]
struct OracleDoc {
    #[serde(flatten)]
    report: Report,
    table: Vec<crate::spectral::OracleRow>,
}

/// Result of one command: JSON text, reports for the manifest, plot data and pass flag.
struct Outcome {
    json: String,
    reports: Vec<Report>,
    plot: Vec<PlotPoint>,
    pass: bool,
}

impl Outcome {
    fn from_report(report: Report, plot: Vec<PlotPoint>) -> Self {
        let pass = report.pass;
        Outcome { json: report.to_json_pretty(), reports: vec![report], plot, pass }
    }
}

fn quantity_plot(report: &Report) -> Vec<PlotPoint> {
    report
        .quantities
        .iter()
        .enumerate()
        .map(|(k, (name, v))| PlotPoint { x: k as f64, y: *v, series: name.clone() })
        .collect()
}

fn spectrum(domain: &str, pitch: f64, count: usize, dump: Option<&PathBuf>) -> Result<Outcome> {
    let spec = parse_domain(domain)?;
    let (_, mask) = crate::domain::build_grid(&spec, check_pitch(pitch)?)?;
    let op = assemble(&mask)?;
    if let Some(path) = dump {
        op.dump(path)?;
    }
    let k = count.clamp(1, op.n());
    let s = leading_eigenpairs(&op, k)?;
    let residual = s.max_residual(&op);
    let tol = 1e-9 * op.frobenius_norm();
    let mut report = Report {
        name: "spectrum".into(),
        quantities: Default::default(),
        tolerance: tol,
        pass: residual <= tol && s.orthonormality_defect() <= 1e-10,
        pitch,
        nodes: op.n(),
        seed: None,
        context: [("domain".to_string(), spec.to_json())].into_iter().collect(),
    };
    report.quantities.insert("max_residual".into(), residual);
    report.quantities.insert("tau".into(), s.eigenvalues[0]);
    let plot = s
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(i, v)| PlotPoint { x: i as f64, y: *v, series: "eigenvalue".into() })
        .collect();
    let pass = report.pass;
    let doc = SpectrumDoc { report: report.clone(), eigenvalues: s.eigenvalues };
    Ok(Outcome { json: serde_json::to_string_pretty(&doc)?, reports: vec![report], plot, pass })
}

fn polarize(domain: &str, pol: &PolarizerArgs, pitch: f64) -> Result<Outcome> {
    let spec = parse_domain(domain)?;
    let p = parse_polarizer(&pol.geodesic, &pol.side)?;
    let (grid, omega) = build_paired_grid(&spec, check_pitch(pitch)?, p)?;
    let polarized = polarize_mask(&omega)?;
    let mask = grid
        .nodes()
        .iter()
        .zip(grid.weights())
        .enumerate()
        .map(|(i, (z, w))| MaskNode {
            x: z.re(),
            y: z.im(),
            weight: *w,
            omega: omega.inside()[i],
            polarized: polarized.inside()[i],
        })
        .collect();
    let mut report = Report {
        name: "polarize".into(),
        quantities: Default::default(),
        tolerance: 0.0,
        pass: true,
        pitch,
        nodes: grid.len(),
        seed: None,
        context: [("domain".to_string(), spec.to_json())].into_iter().collect(),
    };
    report.quantities.insert("measure_omega".into(), omega.measure());
    report.quantities.insert("measure_polarized".into(), polarized.measure());
    report.quantities.insert("symdiff".into(), crate::domain::symmetric_difference_measure(&omega, &polarized)?);
    let plot = grid
        .nodes()
        .iter()
        .enumerate()
        .filter(|(i, _)| polarized.inside()[*i])
        .map(|(_, z)| PlotPoint { x: z.re(), y: z.im(), series: "polarized".into() })
        .collect();
    let doc = PolarizeDoc { report: report.clone(), geodesic: p.geodesic.to_string(), side: pol.side.clone(), mask };
    Ok(Outcome { json: serde_json::to_string_pretty(&doc)?, reports: vec![report], plot, pass: true })
}

fn oracle(radius: f64, ns: &[usize]) -> Result<Outcome> {
    let table = radial_oracle_table(radius, ns)?;
    let diffs: Vec<f64> = table.iter().filter_map(|r| r.cauchy_difference).collect();
    let monotone = diffs.windows(2).all(|w| w[1] < w[0]);
    let last = table.last().ok_or_else(|| invalid("oracle needs at least one n"))?;
    let mut report = Report {
        name: "oracle".into(),
        quantities: Default::default(),
        tolerance: 0.0,
        pass: monotone,
        pitch: radius / last.n as f64,
        nodes: last.n,
        seed: None,
        context: Default::default(),
    };
    report.quantities.insert("R".into(), radius);
    report.quantities.insert("tau".into(), last.tau);
    let plot = table.iter().map(|r| PlotPoint { x: r.n as f64, y: r.tau, series: "oracle".into() }).collect();
    let doc = OracleDoc { report: report.clone(), table };
    Ok(Outcome { json: serde_json::to_string_pretty(&doc)?, reports: vec![report], plot, pass: monotone })
}

#[allow(clippy::too_many_arguments)]
fn verify(
    check: Check,
    domain: &str,
    pol: &OptionalPolarizerArgs,
    pitches: &[f64],
    seed: u64,
    trials: usize,
    z: &[f64],
    r: f64,
    radii: &[f64],
) -> Result<Outcome> {
    let spec = parse_domain(domain)?;
    for &h in pitches {
        check_pitch(h)?;
    }
    let pitch = pitches[0];
    let polarizer = || -> Result<Polarizer> {
        match (&pol.geodesic, &pol.side) {
            (Some(g), Some(s)) => parse_polarizer(g, s),
            _ => Err(invalid("this check needs --geodesic and --side")),
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let outcome = match check {
        Check::Fk => {
            let rep = experiments::verify_reverse_faber_krahn(&spec, polarizer()?, pitch)?.with_seed(seed);
            let plot = quantity_plot(&rep);
            Outcome::from_report(rep, plot)
        }
        Check::Riesz => {
            let (grid, mask) = build_paired_grid(&spec, pitch, polarizer()?)?;
            let op = experiments::full_operator(&grid)?;
            let f = experiments::random_nonnegative_field(&mask, &mut rng)?;
            let rep = experiments::verify_riesz(&op, &f)?.with_seed(seed);
            let plot = quantity_plot(&rep);
            Outcome::from_report(rep, plot)
        }
        Check::Positivity => {
            let rep = experiments::verify_positivity(&spec, pitches)?.with_seed(seed);
            let plot = pitches
                .iter()
                .filter_map(|h| {
                    rep.quantity(&format!("min_eigenvalue@{h}")).map(|v| PlotPoint {
                        x: *h,
                        y: v,
                        series: "min_eigenvalue".into(),
                    })
                })
                .collect();
            Outcome::from_report(rep, plot)
        }
        Check::Representation => {
            if z.len() != 2 {
                return Err(invalid("--z takes two numbers: x,y"));
            }
            let zp = PointD::new(z[0], z[1])?;
            let rep = experiments::verify_representation(&spec, pitch, zp, r)?.with_seed(seed);
            let plot = vec![
                PlotPoint {
                    x: pitch,
                    y: rep.quantity("residual_coarse").unwrap_or(f64::NAN),
                    series: "residual".into(),
                },
                PlotPoint {
                    x: 0.5 * pitch,
                    y: rep.quantity("residual_fine").unwrap_or(f64::NAN),
                    series: "residual".into(),
                },
            ];
            Outcome::from_report(rep, plot)
        }
        Check::Bound => {
            let rep = experiments::verify_uniform_bound(&spec, pitch, trials, &mut rng)?.with_seed(seed);
            let plot = quantity_plot(&rep);
            Outcome::from_report(rep, plot)
        }
        Check::Decay => {
            let rep = experiments::verify_boundary_decay(&spec, pitch, radii)?.with_seed(seed);
            let plot = radii
                .iter()
                .filter_map(|x| {
                    rep.quantity(&format!("max_potential@{x}")).map(|v| PlotPoint {
                        x: *x,
                        y: v,
                        series: "max_potential".into(),
                    })
                })
                .collect();
            Outcome::from_report(rep, plot)
        }
        Check::Eigenfunction => {
            let mut reports = pitches
                .iter()
                .map(|&h| experiments::verify_first_eigenfunction(&spec, h).map(|r| r.with_seed(seed)))
                .collect::<Result<Vec<_>>>()?;
            let mut pass = reports.iter().all(|r| r.pass);
            if reports.len() >= 2 {
                let stable = reports.windows(2).all(|w| experiments::gap_is_stable(&w[0], &w[1]));
                pass &= stable;
                reports.last_mut().expect("nonempty").quantities.insert("gap_stable".into(), stable as u8 as f64);
            }
            let plot = reports
                .iter()
                .map(|r| PlotPoint {
                    x: r.pitch,
                    y: r.quantity("relative_gap").unwrap_or(f64::NAN),
                    series: "relative_gap".into(),
                })
                .collect();
            let json =
                if reports.len() == 1 { reports[0].to_json_pretty() } else { serde_json::to_string_pretty(&reports)? };
            Outcome { json, reports, plot, pass }
        }
    };
    Ok(outcome)
}

fn execute(cli: Cli) -> Result<(Outcome, OutputArgs)> {
    Ok(match cli.command {
        Command::Spectrum { domain, pitch, count, dump, out } => {
            (spectrum(&domain.domain, pitch, count, dump.as_ref())?, out)
        }
        Command::Polarize { domain, polarizer, pitch, out } => (polarize(&domain.domain, &polarizer, pitch)?, out),
        Command::Verify { check, domain, polarizer, pitch, seed, trials, z, r, radii, out } => {
            (verify(check, &domain.domain, &polarizer, &pitch, seed, trials, &z, r, &radii)?, out)
        }
        Command::Oracle { radius, n, out } => (oracle(radius, &n)?, out),
    })
}

fn emit(outcome: &Outcome, out: &OutputArgs, stdout: &mut dyn Write) -> Result<()> {
    match &out.output {
        Some(path) => std::fs::write(path, format!("{}\n", outcome.json))?,
        None => writeln!(stdout, "{}", outcome.json)?,
    }
    if let Some(path) = &out.manifest {
        experiments::append_manifest(path, &outcome.reports)?;
    }
    if let Some(path) = &out.csv {
        experiments::write_csv(path, &outcome.plot)?;
    }
    Ok(())
}

/// Runs the command line and returns the process exit status: 0 when every
/// check passes, 1 when a check fails, 2 on invalid usage or input.
pub fn run_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(stdout, "{text}") } else { write!(stderr, "{text}") };
            return code;
        }
    };
    match execute(cli).and_then(|(outcome, out)| emit(&outcome, &out, stdout).map(|_| outcome.pass)) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            match e {
                Error::NoConvergence(_) | Error::NonFinite(_) => 1,
                _ => 2,
            }
        }
    }
}

/// Entry point used by the binary.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let code = run_with(args, &mut std::io::stdout().lock(), &mut std::io::stderr().lock());
    ExitCode::from(code)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (u8, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run_with(std::iter::once("hyplog").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn no_arguments_is_usage_error() {
        let (code, _, err) = run_capture(&[]);
        assert_eq!(code, 2);
        assert!(err.contains("Usage"));
    }

    #[test]
    fn unknown_flag_is_usage_error() {
        let (code, _, _) = run_capture(&["oracle", "--R", "0.5", "--bogus"]);
        assert_eq!(code, 2);
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = run_capture(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("verify"));
    }

    #[test]
    fn pitch_range_enforced() {
        let d = r#"{"disks":[{"cx":0,"cy":0,"rho":0.3,"op":"union"}]}"#;
        let (code, _, err) = run_capture(&["spectrum", "--domain", d, "--pitch", "0.5"]);
        assert_eq!(code, 2);
        assert!(err.contains("pitch"));
    }

    #[test]
    fn bad_geodesic_is_usage_error() {
        let d = r#"{"disks":[{"cx":0,"cy":0,"rho":0.3,"op":"union"}]}"#;
        let (code, _, _) =
            run_capture(&["verify", "fk", "--domain", d, "--geodesic", "line:1", "--side", "pos", "--pitch", "0.05"]);
        assert_eq!(code, 2);
        let (code, _, _) = run_capture(&["verify", "fk", "--domain", d, "--pitch", "0.05"]);
        assert_eq!(code, 2);
    }

    #[test]
    fn oracle_table() {
        let (code, out, _) = run_capture(&["oracle", "--R", "0.5", "--n", "64,128,256"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["table"].as_array().unwrap().len(), 3);
        assert_eq!(v["pass"], true);
    }
}
