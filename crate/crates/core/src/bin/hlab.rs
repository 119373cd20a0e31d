use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use heisenberg_rigidity::cc::cc_dist;
use heisenberg_rigidity::experiment::{
    family_map, load_map, run_fit, run_sharpness, run_suite, ScenarioConfig, SuiteName,
};
use heisenberg_rigidity::group::{d_h, koranyi_dist};
use heisenberg_rigidity::john::{build_chain, write_chain, JohnDomain};
use heisenberg_rigidity::{Error, Point};

const AFTER_HELP: &str = "\
CSV columns:
  sharpness  sharpness.csv: epsilon,sup_d,sup_dH,sobolev_dev
             slopes.csv:    quantity,slope,lo,hi
  suite      <name>.csv:    suite,case,status,value,bound,margin,detail
  distance   metric,value
  chain      chain.txt:     i center_x center_y center_t radius
  fit        fit.txt:       one key=value record per line

Exit status: 0 all checks pass, 1 a check failed, 2 usage or I/O error.";

#[derive(Parser)]
#[command(name = "hlab", version, about = "Heisenberg-group rigidity lab", after_help = AFTER_HELP)]
struct Cli {
    /// Scenario configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; results go to stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Quadrature cells per axis.
    #[arg(long, global = true)]
    grid: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit the best isometry to δ_{1+ε} for each configured ε and report
    /// log-log slopes.
    Sharpness,
    /// Run one inequality suite.
    Suite {
        #[arg(value_parser = parse_suite)]
        name: SuiteName,
    },
    /// Fit the best isometry to a tabulated map, or to the configured family.
    Fit {
        /// Map file in the columnar text format.
        #[arg(long)]
        map: Option<PathBuf>,
    },
    /// Distance between two points given as x,y,t.
    Distance {
        #[arg(long, value_enum, default_value_t = MetricArg::Cc)]
        metric: MetricArg,
        #[arg(allow_hyphen_values = true, value_parser = parse_point)]
        p: Point,
        #[arg(allow_hyphen_values = true, value_parser = parse_point)]
        q: Point,
    },
    /// Build and verify a chain of balls from the distinguished point to x,y,t.
    Chain {
        #[arg(allow_hyphen_values = true, value_parser = parse_point)]
        point: Point,
        #[arg(long, default_value_t = 2.0)]
        kappa: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricArg {
    Cc,
    Koranyi,
    Dh,
}

fn parse_suite(s: &str) -> Result<SuiteName, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_point(s: &str) -> Result<Point, String> {
    let c: Vec<f64> = s
        .split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|e| format!("{v:?}: {e}")))
        .collect::<Result<_, _>>()?;
    match c[..] {
        [x, y, t] if c.iter().all(|v| v.is_finite()) => Ok(Point::new(x, y, t)),
        _ => Err(format!("expected three finite numbers x,y,t, got {s:?}")),
    }
}

fn load_config(cli: &Cli) -> Result<ScenarioConfig, Error> {
    let mut cfg = match &cli.config {
        Some(p) => ScenarioConfig::load(p).map_err(|e| match e {
            Error::Io(io) => Error::Io(io::Error::new(io.kind(), format!("{}: {io}", p.display()))),
            e => e,
        })?,
        None => ScenarioConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(w) = cli.workers {
        cfg.workers = w;
    }
    if let Some(g) = cli.grid {
        cfg.grid = g;
    }
    if let Some(o) = &cli.out {
        cfg.output.dir = Some(o.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Writes named outputs into the output directory, or to stdout.
fn emit(cfg: &ScenarioConfig, files: &[(&str, String)]) -> Result<(), Error> {
    match &cfg.output.dir {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            for (name, body) in files {
                fs::write(dir.join(name), body)?;
            }
        }
        None => {
            let mut out = io::stdout().lock();
            for (_, body) in files {
                out.write_all(body.as_bytes())?;
            }
        }
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<bool, Error> {
    let cfg = load_config(cli)?;
    if cfg.workers > 0 {
        // Fails only when a pool already exists, which is harmless.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cfg.workers).build_global();
    }
    match &cli.command {
        Command::Sharpness => {
            let r = run_sharpness(&cfg)?;
            emit(&cfg, &[("sharpness.csv", r.to_csv()), ("slopes.csv", r.slopes_csv())])?;
            Ok(r.slopes_in_windows())
        }
        Command::Suite { name } => {
            let r = run_suite(*name, &cfg)?;
            emit(&cfg, &[(&format!("{name}.csv"), r.to_csv())])?;
            for m in r.failure_messages() {
                eprintln!("{m}");
            }
            Ok(r.passed())
        }
        Command::Fit { map } => {
            let f = match map {
                Some(p) => load_map(p)?,
                None => family_map(&cfg)?,
            };
            let rec = run_fit(&f, &cfg)?;
            emit(&cfg, &[("fit.txt", rec.to_string())])?;
            Ok(true)
        }
        Command::Distance { metric, p, q } => {
            let (name, v) = match metric {
                MetricArg::Cc => ("cc", cc_dist(*p, *q)?),
                MetricArg::Koranyi => ("koranyi", koranyi_dist(*p, *q)),
                MetricArg::Dh => ("dh", d_h(*p, *q)),
            };
            emit(&cfg, &[("distance.csv", format!("metric,value\n{name},{v:.16e}\n"))])?;
            Ok(true)
        }
        Command::Chain { point, kappa } => {
            let domain = JohnDomain::new(cfg.domain)?;
            match build_chain(&domain, *point, *kappa) {
                Ok((chain, _)) => {
                    let mut buf = Vec::new();
                    write_chain(&chain, &mut buf)?;
                    emit(&cfg, &[("chain.txt", String::from_utf8_lossy(&buf).into_owned())])?;
                    Ok(true)
                }
                Err(e @ Error::ChainClause { .. }) => {
                    eprintln!("{e}");
                    Ok(false)
                }
                Err(e) => Err(e),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("hlab: {e}");
            ExitCode::from(2)
        }
    }
}
