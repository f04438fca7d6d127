//! Argument parsing and command dispatch.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::PathBuf;

use akmass::ale_mass::{self, MassEstimate, ThetaMethod};
use akmass::catalog::{self, CatalogEntry, IntegrationScheme};
use akmass::riemann::curvature_packet;
use akmass::tensor::Tensor;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::anchors;
use crate::config::{RunConfig, Tolerances};
use crate::error::CliError;
use crate::report::{emit, mass_table_csv, CheckRecord, Format, VerificationReport};
use crate::suites;

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "AKMASS_THREADS";

#[derive(Parser, Debug)]
#[command(name = "akmass", version, about = "Curvature, spin^c and ADM-mass checks on almost-Kähler metrics")]
struct Cli {
    /// TOML file with the same fields as the flags; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Fill the `ms` column with wall times (makes output run-dependent).
    #[arg(long, global = true)]
    timings: bool,
    /// Override one tolerance family, e.g. `--tol pointwise=1e-9`.
    #[arg(long = "tol", global = true, value_name = "FAMILY=VALUE")]
    tol: Vec<String>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Catalog operations.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Christoffel symbols and curvature at a point.
    Curvature {
        #[command(flatten)]
        metric: MetricArgs,
        /// Comma-separated coordinates.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        point: Option<Vec<f64>>,
    },
    /// Residual suites.
    Verify {
        #[command(subcommand)]
        suite: VerifySuite,
    },
    /// ADM mass (or the θ∧ω^{m-1} mass) over a radius sweep.
    Mass {
        #[command(flatten)]
        metric: MetricArgs,
        #[command(flatten)]
        radii: RadiiArgs,
        /// Sphere quadrature degree.
        #[arg(long)]
        degree: Option<usize>,
        /// `adm`, `theta` or `both`.
        #[arg(long)]
        method: Option<String>,
    },
    /// Both sides of the mass formula.
    MassFormula {
        #[command(flatten)]
        metric: MetricArgs,
        #[command(flatten)]
        radii: RadiiArgs,
        #[arg(long)]
        rmax: Option<f64>,
    },
    /// Total Hermitian scalar curvature against the c₁ pairing on a compact entry.
    Blair {
        #[command(flatten)]
        metric: MetricArgs,
    },
    /// Mass against exceptional-curve area on a blown-up entry.
    Penrose {
        #[command(flatten)]
        metric: MetricArgs,
        #[command(flatten)]
        radii: RadiiArgs,
    },
}

#[derive(Subcommand, Debug)]
enum CatalogAction {
    List,
}

#[derive(Subcommand, Debug)]
enum VerifySuite {
    /// Almost-Kähler, four-dimensional and spin^c identities.
    Identities(SampleArgs),
    /// Riemann symmetries and Bianchi identities.
    Curvature(SampleArgs),
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[command(flatten)]
    metric: MetricArgs,
    #[arg(long)]
    samples: Option<usize>,
    /// Sampling seed; also the structure seed of `random_ak` unless `--param seed=` is given.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct MetricArgs {
    #[arg(long)]
    metric: Option<String>,
    /// Mass parameter or complex dimension.
    #[arg(long)]
    m: Option<f64>,
    /// Eguchi–Hanson scale.
    #[arg(long)]
    a: Option<f64>,
    /// Burns scale.
    #[arg(long)]
    c: Option<f64>,
    /// Real dimension.
    #[arg(long)]
    n: Option<f64>,
    /// Further parameters, `key=value`.
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
}

#[derive(Args, Debug)]
struct RadiiArgs {
    /// Comma-separated, strictly increasing.
    #[arg(long, value_delimiter = ',')]
    radii: Option<Vec<f64>>,
}

impl MetricArgs {
    fn into_config(self, cfg: &mut RunConfig) -> Result<(), CliError> {
        cfg.metric = self.metric;
        for (k, v) in [("m", self.m), ("a", self.a), ("c", self.c), ("n", self.n)] {
            if let Some(v) = v {
                cfg.params.insert(k.into(), v);
            }
        }
        for kv in self.params {
            let (k, v) = kv.split_once('=').ok_or_else(|| CliError::Usage(format!("expected KEY=VALUE, got `{kv}`")))?;
            let v: f64 = v.trim().parse().map_err(|_| CliError::Usage(format!("`{v}` is not a number")))?;
            cfg.params.insert(k.trim().into(), v);
        }
        Ok(())
    }
}

fn flags_to_config(cli: Cli) -> Result<(RunConfig, Vec<String>), CliError> {
    let mut cfg = RunConfig { format: cli.format, output: cli.output, timings: cli.timings.then_some(true), ..Default::default() };
    let command = match cli.command {
        None => None,
        Some(Command::Catalog { action: CatalogAction::List }) => Some("catalog-list"),
        Some(Command::Curvature { metric, point }) => {
            metric.into_config(&mut cfg)?;
            cfg.point = point;
            Some("curvature")
        }
        Some(Command::Verify { suite }) => {
            let (name, args) = match suite {
                VerifySuite::Identities(a) => ("verify-identities", a),
                VerifySuite::Curvature(a) => ("verify-curvature", a),
            };
            args.metric.into_config(&mut cfg)?;
            cfg.samples = args.samples;
            cfg.seed = args.seed;
            Some(name)
        }
        Some(Command::Mass { metric, radii, degree, method }) => {
            metric.into_config(&mut cfg)?;
            cfg.radii = radii.radii;
            cfg.degree = degree;
            cfg.method = method;
            Some("mass")
        }
        Some(Command::MassFormula { metric, radii, rmax }) => {
            metric.into_config(&mut cfg)?;
            cfg.radii = radii.radii;
            cfg.rmax = rmax;
            Some("mass-formula")
        }
        Some(Command::Blair { metric }) => {
            metric.into_config(&mut cfg)?;
            Some("blair")
        }
        Some(Command::Penrose { metric, radii }) => {
            metric.into_config(&mut cfg)?;
            cfg.radii = radii.radii;
            Some("penrose")
        }
    };
    cfg.command = command.map(str::to_string);
    let base = match &cli.config {
        Some(p) => RunConfig::from_file(p)?,
        None => RunConfig::default(),
    };
    Ok((cfg.over(base), cli.tol))
}

/// Parses `argv`, runs the command and returns the process exit code:
/// 0 all checks pass, 1 a check failed, 2 usage or configuration error,
/// 3 numerical-domain or I/O error.
pub fn run_cli<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match configure_threads().and_then(|_| flags_to_config(cli)).and_then(|(cfg, tol)| execute(cfg, &tol)) {
        Ok(pass) => i32::from(!pass),
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var(THREADS_ENV) else { return Ok(()) };
    let n: usize = v.trim().parse().map_err(|_| CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got `{v}`")))?;
    if n == 0 {
        return Err(CliError::Usage(format!("{THREADS_ENV} must be positive")));
    }
    // a second call in the same process keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn tolerances(cfg: &RunConfig, overrides: &[String]) -> Result<Tolerances, CliError> {
    let mut t = cfg.tolerances.unwrap_or_default();
    for kv in overrides {
        let (k, v) = kv.split_once('=').ok_or_else(|| CliError::Usage(format!("expected FAMILY=VALUE, got `{kv}`")))?;
        let v: f64 = v.trim().parse().map_err(|_| CliError::Usage(format!("`{v}` is not a number")))?;
        t.set(k.trim(), v)?;
    }
    t.validate()?;
    Ok(t)
}

fn entry_for(cfg: &RunConfig) -> Result<CatalogEntry, CliError> {
    let name = cfg.metric_name()?;
    let mut params = cfg.param_list();
    if name == "random_ak" && !cfg.params.contains_key("seed") {
        if let Some(s) = cfg.seed {
            params.push(("seed".into(), s as f64));
        }
    }
    Ok(catalog::lookup(name, &params)?)
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    command: &'a str,
    metric: Option<&'a str>,
    params: &'a BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    result: Option<T>,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<&'a VerificationReport>,
}

fn write_json<T: Serialize>(cfg: &RunConfig, command: &str, result: Option<T>, report: Option<&VerificationReport>) -> Result<(), CliError> {
    let env = Envelope { command, metric: cfg.metric.as_deref(), params: &cfg.params, result, report };
    let mut text = serde_json::to_string_pretty(&env)?;
    text.push('\n');
    emit(&text, cfg.output.as_deref())
}

fn execute(cfg: RunConfig, tol_overrides: &[String]) -> Result<bool, CliError> {
    cfg.validate()?;
    let tol = tolerances(&cfg, tol_overrides)?;
    let format = cfg.format.unwrap_or_default();
    let timings = cfg.timings.unwrap_or(false);
    let command = cfg.command.clone().ok_or_else(|| CliError::Usage("no command given (on the command line or as `command` in the config)".into()))?;
    match command.as_str() {
        "catalog-list" => {
            let rows: Vec<_> = catalog::builtin_entries().iter().map(CatalogEntry::summary).collect();
            match format {
                Format::Json => {
                    #[derive(Serialize)]
                    struct Listing<T> {
                        entries: Vec<T>,
                    }
                    let mut text = serde_json::to_string_pretty(&Listing { entries: rows })?;
                    text.push('\n');
                    emit(&text, cfg.output.as_deref())?;
                }
                Format::Csv => {
                    let mut w = csv::Writer::from_writer(Vec::new());
                    for r in &rows {
                        w.serialize(r)?;
                    }
                    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
                    emit(&String::from_utf8_lossy(&bytes), cfg.output.as_deref())?;
                }
            }
            Ok(true)
        }
        "curvature" => {
            let entry = entry_for(&cfg)?;
            let point = cfg.point.clone().ok_or_else(|| CliError::Usage("--point is required".into()))?;
            if point.len() != entry.n {
                return Err(CliError::Usage(format!("`{}` needs {} coordinates, got {}", entry.name, entry.n, point.len())));
            }
            let pk = curvature_packet(entry.chart.as_ref(), &point)?;
            let tensors = [("christoffel", &pk.christoffel), ("riemann", &pk.riemann), ("ricci", &pk.ricci), ("weyl", &pk.weyl)];
            match format {
                Format::Json => {
                    #[derive(Serialize)]
                    struct Curv<'a> {
                        point: &'a [f64],
                        scalar: f64,
                        tensors: BTreeMap<&'a str, Vec<f64>>,
                    }
                    let tensors = tensors.iter().map(|(k, t)| (*k, t.data().to_vec())).collect();
                    write_json(&cfg, &command, Some(Curv { point: &point, scalar: pk.scalar, tensors }), None)?;
                }
                Format::Csv => {
                    let mut w = csv::Writer::from_writer(Vec::new());
                    w.write_record(["quantity", "index", "value"])?;
                    w.serialize(("scalar", "", pk.scalar))?;
                    for (k, t) in tensors {
                        for (idx, v) in indexed(t) {
                            w.serialize((k, idx, v))?;
                        }
                    }
                    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
                    emit(&String::from_utf8_lossy(&bytes), cfg.output.as_deref())?;
                }
            }
            Ok(true)
        }
        "verify-identities" | "verify-curvature" => {
            let entry = entry_for(&cfg)?;
            let samples = cfg.samples.unwrap_or(100);
            let seed = cfg.seed.unwrap_or(0);
            if samples == 0 {
                return Err(CliError::Usage("--samples must be positive".into()));
            }
            let rep = if command == "verify-identities" {
                suites::identities_suite(&entry, samples, seed, &tol, timings)?
            } else {
                suites::curvature_suite(&entry, samples, seed, &tol, timings)?
            };
            output_report(&cfg, &command, format, None::<()>, &rep)?;
            Ok(rep.pass)
        }
        "mass" => {
            let entry = entry_for(&cfg)?;
            let radii = required_radii(&cfg)?;
            let degree = cfg.degree.unwrap_or(ale_mass::DEFAULT_SPHERE_DEGREE);
            let method = cfg.method.as_deref().unwrap_or("adm");
            let mut rep = VerificationReport::new(timings);
            let end = entry.end.as_ref().ok_or_else(|| CliError::Usage(format!("`{}` has no ALE end", entry.name)))?;
            let adm = match method {
                "adm" | "both" => Some(ale_mass::adm_mass_with(entry.chart.as_ref(), end, &radii, degree)?),
                "theta" => None,
                other => return Err(CliError::Usage(format!("unknown method `{other}`; valid: adm, theta, both"))),
            };
            let theta = match method {
                "theta" | "both" => Some(ale_mass::mass_via_theta_with(&entry, &radii, ThetaMethod::RadialProfile, degree.min(12))?),
                _ => None,
            };
            let main = adm.as_ref().or(theta.as_ref()).expect("one method selected");
            if let Some(k) = &entry.known.expected_mass {
                let d = (main.extrapolated - k.value).abs();
                rep.push(CheckRecord::new("mass.expected", anchors::ADM_SPHERE, d, tol.mass_abs(k.value), radii.len()));
            }
            if let (Some(a), Some(t)) = (&adm, &theta) {
                rep.push(pipeline_record(a, t, radii.len()));
            }
            for w in [&adm, &theta].into_iter().flatten().filter_map(|e| e.warning.as_ref()) {
                eprintln!("warning: {w}");
            }
            #[derive(Serialize)]
            struct MassOut<'a> {
                method: &'a str,
                adm: Option<&'a MassEstimate>,
                theta: Option<&'a MassEstimate>,
            }
            match format {
                Format::Json => write_json(&cfg, &command, Some(MassOut { method, adm: adm.as_ref(), theta: theta.as_ref() }), Some(&rep))?,
                Format::Csv => emit(&mass_table_csv(main)?, cfg.output.as_deref())?,
            }
            Ok(rep.pass)
        }
        "mass-formula" => {
            let entry = entry_for(&cfg)?;
            let radii = required_radii(&cfg)?;
            let rmax = cfg.rmax.unwrap_or(*radii.last().unwrap());
            let res = ale_mass::mass_formula_check(&entry, &radii, rmax)?;
            let mut rep = VerificationReport::new(timings);
            let scale = res.lhs.abs().max(res.rhs_bulk.abs() + res.rhs_topological.abs());
            rep.push(CheckRecord::new("mass_formula.discrepancy", anchors::MASS_FORMULA, res.discrepancy, tol.mass_abs(scale).max(2.0 * res.combined_error), radii.len()));
            if matches!(entry.scheme, IntegrationScheme::Radial { .. }) && entry.n >= 4 {
                let theta = ale_mass::mass_via_theta(&entry, &radii)?;
                rep.push(pipeline_record(&res.adm, &theta, radii.len()));
                let d = (theta.extrapolated - res.rhs()).abs();
                rep.push(CheckRecord::new("mass_formula.theta_vs_rhs", anchors::MASS_FORMULA, d, tol.mass_abs(scale), radii.len()));
            }
            output_report(&cfg, &command, format, Some(&res), &rep)?;
            Ok(rep.pass)
        }
        "blair" => {
            let entry = entry_for(&cfg)?;
            let res = ale_mass::blair_check(&entry)?;
            let mut rep = VerificationReport::new(timings);
            let rec = |id: &str, lhs: f64, rhs: f64| {
                if lhs.abs().max(rhs.abs()) <= tol.symmetry {
                    CheckRecord::new(id, anchors::BLAIR, lhs.abs().max(rhs.abs()), tol.symmetry, 1)
                } else {
                    CheckRecord::new(id, anchors::BLAIR, (lhs / rhs - 1.0).abs(), tol.mass, 1)
                }
            };
            rep.push(rec("blair.numeric_pairing", res.lhs, res.rhs));
            if let Some(k) = res.rhs_known {
                rep.push(rec("blair.known_pairing", res.lhs, k));
            }
            output_report(&cfg, &command, format, Some(&res), &rep)?;
            Ok(rep.pass)
        }
        "penrose" => {
            let entry = entry_for(&cfg)?;
            let radii = cfg.radii.clone().unwrap_or_else(|| vec![10.0, 20.0, 40.0, 80.0]);
            let res = ale_mass::penrose_check(&entry, &radii)?;
            let mut rep = VerificationReport::new(timings);
            rep.push(CheckRecord::new("penrose.equality", anchors::PENROSE, res.relative_gap, tol.mass, radii.len()));
            output_report(&cfg, &command, format, Some(&res), &rep)?;
            Ok(rep.pass)
        }
        other => Err(CliError::Usage(format!(
            "unknown command `{other}`; valid: catalog-list, curvature, verify-identities, verify-curvature, mass, mass-formula, blair, penrose"
        ))),
    }
}

fn pipeline_record(adm: &MassEstimate, theta: &MassEstimate, samples: usize) -> CheckRecord {
    let d = (adm.extrapolated - theta.extrapolated).abs();
    CheckRecord::new("mass.adm_vs_theta", anchors::THETA_MASS, d, adm.error_bar + theta.error_bar, samples)
}

fn required_radii(cfg: &RunConfig) -> Result<Vec<f64>, CliError> {
    cfg.radii.clone().ok_or_else(|| CliError::Usage("--radii is required".into()))
}

fn output_report<T: Serialize>(cfg: &RunConfig, command: &str, format: Format, result: Option<T>, rep: &VerificationReport) -> Result<(), CliError> {
    match format {
        Format::Json => write_json(cfg, command, result, Some(rep)),
        Format::Csv => emit(&rep.to_csv()?, cfg.output.as_deref()),
    }
}

fn indexed(t: &Tensor<f64>) -> Vec<(String, f64)> {
    let (n, rank) = (t.n(), t.rank());
    t.data()
        .iter()
        .enumerate()
        .map(|(flat, v)| {
            let mut idx = vec![0; rank];
            let mut k = flat;
            for slot in idx.iter_mut().rev() {
                *slot = k % n;
                k /= n;
            }
            (idx.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" "), *v)
        })
        .collect()
}
