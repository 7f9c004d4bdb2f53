use clap::builder::PossibleValuesParser;
use clap::{Args, Parser, Subcommand, ValueEnum};
use ff8v::suites::studies::{
    amoeba_study, decay_study_regime, edge_table, edge_table_csv, free_energy_study, oracle_report,
};
use ff8v::suites::{resolve_graph, run_suite, SuiteConfig, SuiteReport, SUITES};
use ff8v::torus_spectral::AmoebaGrid;
use ff8v::z_invariant::Site;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "ff8v", version, about = "Free-fermion eight-vertex model: identity checks and data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct Output {
    /// Write the result to this file instead of stdout.
    #[arg(long)]
    out: Option<String>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Subcommand)]
enum Command {
    /// Run an identity suite and report the worst residuals.
    Verify {
        #[arg(value_parser = PossibleValuesParser::new(SUITES))]
        suite: String,
        /// Builtin graph (cube, torus, torus:MxN) or a JSON graph file.
        #[arg(long)]
        graph: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        k2: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        l2: Option<f64>,
        #[arg(long)]
        trials: Option<usize>,
        #[command(flatten)]
        output: Output,
    },
    /// Amoeba points of the eight-vertex and six-vertex characteristic polynomials.
    Amoeba {
        #[arg(long, default_value = "torus")]
        graph: String,
        #[arg(long, default_value_t = 0.09, allow_hyphen_values = true)]
        k2: f64,
        #[arg(long, default_value_t = 0.49, allow_hyphen_values = true)]
        l2: f64,
        /// Rhombus half-angle on every face.
        #[arg(long, default_value_t = std::f64::consts::FRAC_PI_4)]
        theta: f64,
        #[arg(long, default_value_t = 3.0)]
        half_width: f64,
        #[arg(long, default_value_t = 41)]
        resolution: usize,
        #[arg(long, default_value_t = 32)]
        phases: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Edge probabilities of the infinite-volume measure, or a decay scan.
    Correlations {
        /// Comma-separated values of k^2.
        #[arg(long, value_delimiter = ',', default_value = "0,0.04,0.16", allow_hyphen_values = true)]
        k2: Vec<f64>,
        #[arg(long, default_value_t = 0.49, allow_hyphen_values = true)]
        l2: f64,
        /// Edge set as comma-separated x:y:i decoration vertices; repeatable.
        #[arg(long)]
        edges: Vec<String>,
        /// Decay scan over distances lo:hi on the square lattice, for the first k^2.
        #[arg(long)]
        scan: Option<String>,
        #[command(flatten)]
        output: Output,
    },
    /// Free energy of the elliptic weights and its finite-torus sequence.
    FreeEnergy {
        #[arg(long, default_value_t = 0.09, allow_hyphen_values = true)]
        k2: f64,
        #[arg(long, default_value_t = 0.49, allow_hyphen_values = true)]
        l2: f64,
        /// Tori of n x n fundamental domains.
        #[arg(long, value_delimiter = ',', default_value = "2,4,6")]
        sizes: Vec<usize>,
        #[command(flatten)]
        output: Output,
    },
    /// Brute-force partition function of a seeded random field.
    Oracle {
        #[arg(long, default_value = "cube")]
        graph: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
}

type Res<T> = std::result::Result<T, String>;

fn emit(output: &Output, text: &str) -> Res<()> {
    match &output.out {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("cannot write {path}: {e}")),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json<T: serde::Serialize>(v: &T) -> Res<String> {
    serde_json::to_string_pretty(v).map(|s| s + "\n").map_err(|e| e.to_string())
}

fn report_csv(r: &SuiteReport) -> String {
    let mut s = String::from("check,bound,worst,limit,instances,pass\n");
    for c in &r.checks {
        let bound = serde_json::to_value(c.bound).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
        s.push_str(&format!("{},{},{},{},{},{}\n", c.name, bound, c.worst, c.limit, c.instances, c.pass));
    }
    s
}

fn parse_site(s: &str) -> Res<Site> {
    let parts: Vec<&str> = s.trim().split(':').collect();
    let bad = || format!("edge {s} must read x:y:i with i in 0..4");
    if parts.len() != 3 {
        return Err(bad());
    }
    let x = parts[0].parse().map_err(|_| bad())?;
    let y = parts[1].parse().map_err(|_| bad())?;
    let i: usize = parts[2].parse().map_err(|_| bad())?;
    if i > 3 {
        return Err(bad());
    }
    Ok(Site::new(x, y, i))
}

fn parse_range(s: &str) -> Res<Vec<usize>> {
    let bad = || format!("scan range {s} must read lo:hi with 1 <= lo and hi >= lo + 5");
    let (lo, hi) = s.split_once(':').ok_or_else(bad)?;
    let (lo, hi): (usize, usize) = (lo.parse().map_err(|_| bad())?, hi.parse().map_err(|_| bad())?);
    if lo == 0 || hi < lo + 5 {
        return Err(bad());
    }
    Ok((lo..=hi).collect())
}

fn default_sets() -> Vec<Vec<Site>> {
    let mut sets: Vec<Vec<Site>> = (0..4).map(|i| vec![Site::new(0, 0, i)]).collect();
    sets.push(vec![Site::new(0, 0, 0), Site::new(0, 0, 1)]);
    sets
}

/// Exit code 0 when the command passed, 1 when a suite failed.
fn run(cli: Cli) -> Res<u8> {
    let err = |e: ff8v::Error| e.to_string();
    match cli.command {
        Command::Verify { suite, graph, seed, tol, k2, l2, trials, output } => {
            let cfg = SuiteConfig { graph, seed, tol, k2, l2, trials };
            let report = run_suite(&suite, &cfg).map_err(err)?;
            let text = match output.format {
                Some(Format::Csv) => report_csv(&report),
                _ => report.to_json().map_err(err)? + "\n",
            };
            emit(&output, &text)?;
            eprintln!("{}", report.summary());
            Ok(if report.pass { 0 } else { 1 })
        }
        Command::Amoeba { graph, k2, l2, theta, half_width, resolution, phases, output } => {
            let q = resolve_graph(&graph).map_err(err)?;
            let grid = AmoebaGrid { half_width, resolution, phases, ..AmoebaGrid::default() };
            let cloud = amoeba_study(&q, k2, l2, theta, &grid).map_err(err)?;
            let text = match output.format {
                Some(Format::Json) => json(&cloud)?,
                _ => cloud.to_csv(),
            };
            emit(&output, &text)?;
            Ok(0)
        }
        Command::Correlations { k2, l2, edges, scan, output } => {
            let text = if let Some(range) = scan {
                let rs = parse_range(&range)?;
                let k2 = *k2.first().ok_or("at least one k^2 is needed")?;
                let study = decay_study_regime(k2, l2, &rs).map_err(err)?;
                match output.format {
                    Some(Format::Json) => json(&study)?,
                    _ => study.to_csv(),
                }
            } else {
                let sets = if edges.is_empty() {
                    default_sets()
                } else {
                    edges
                        .iter()
                        .map(|set| set.split(',').map(parse_site).collect::<Res<Vec<Site>>>())
                        .collect::<Res<_>>()?
                };
                let rows = edge_table(&k2, l2, &sets).map_err(err)?;
                match output.format {
                    Some(Format::Csv) => edge_table_csv(&rows),
                    _ => json(&rows)?,
                }
            };
            emit(&output, &text)?;
            Ok(0)
        }
        Command::FreeEnergy { k2, l2, sizes, output } => {
            let study = free_energy_study(k2, l2, &sizes).map_err(err)?;
            let text = match output.format {
                Some(Format::Csv) => {
                    let mut s = String::from("n,value,gap\n");
                    for t in &study.finite {
                        s.push_str(&format!("{},{},{}\n", t.n, t.value, t.gap));
                    }
                    s
                }
                _ => json(&study)?,
            };
            emit(&output, &text)?;
            Ok(0)
        }
        Command::Oracle { graph, seed, output } => {
            let q = resolve_graph(&graph).map_err(err)?;
            let report = oracle_report(&q, seed).map_err(err)?;
            if output.format == Some(Format::Csv) {
                return Err("the oracle report is only available as json".into());
            }
            emit(&output, &json(&report)?)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
