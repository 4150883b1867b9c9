use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use entire_dynamics::dynamics::batch::{lyapunov_batch, read_starts, write_rows};
use entire_dynamics::harness::{self, Config, ExperimentReport};
use entire_dynamics::{FunctionDescriptor, Result};

#[derive(Parser)]
#[command(name = "entire-dyn", version, about = "Growth experiments for iterated entire functions")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Global {
    /// JSON config; missing fields take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Args, Default)]
struct RangeArgs {
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    n_max: Option<usize>,
    /// Re-centre the region on a periodic point of this period.
    #[arg(long)]
    center_on_periodic: Option<usize>,
}

#[derive(Subcommand)]
enum Cmd {
    /// μ(U, fⁿ) against log M^{n−m}(R, f).
    Thm7(RangeArgs),
    /// Spherical area between log M^{n−m}(R_lower) and log Mⁿ(R_upper).
    Thm56(RangeArgs),
    /// Finite-horizon growth of (1/n) log μ(U, fⁿ).
    Thm1scan {
        #[arg(long)]
        starts: Option<usize>,
        #[arg(long)]
        horizon: Option<usize>,
    },
    /// Slowly escaping orbits of λe^z with fast derivative growth.
    Thm3 {
        #[arg(long)]
        x0: Option<f64>,
        #[arg(long)]
        n_max: Option<usize>,
        #[arg(long)]
        precision_bits: Option<u32>,
    },
    /// Upper growth bound scan for η·E_α.
    Thm4scan {
        #[arg(long)]
        starts: Option<usize>,
        #[arg(long)]
        horizon: Option<usize>,
    },
    /// Koebe and Harnack inequality suites.
    Classical,
    /// Escape-time PPM image with fast-escaping classification.
    Render {
        #[arg(long)]
        width: Option<usize>,
        #[arg(long)]
        height: Option<usize>,
    },
    /// Special-function and derivative regression checks.
    SpecfunCheck,
    /// Every experiment in sequence plus a combined report.json.
    Suite,
    /// Prints the effective configuration as JSON.
    Config,
    /// Lyapunov estimates for starts read from a CSV with columns re,im.
    Orbits {
        /// Function descriptor as JSON, e.g. '{"variant":"exp_affine","lambda":[1,0]}'.
        #[arg(long)]
        function: String,
        #[arg(long)]
        starts: PathBuf,
        #[arg(long, default_value_t = 64)]
        horizon: usize,
    },
}

fn apply_range(r: &RangeArgs, m: &mut usize, n_max: &mut usize, center: &mut Option<usize>) {
    if let Some(v) = r.m {
        *m = v;
    }
    if let Some(v) = r.n_max {
        *n_max = v;
    }
    if r.center_on_periodic.is_some() {
        *center = r.center_on_periodic;
    }
}

fn set<T>(dst: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *dst = v;
    }
}

fn emit(rep: &ExperimentReport, dir: &Path) -> Result<()> {
    rep.write_to(dir)?;
    let bad = rep.violations().count();
    println!("{}: {:?} ({} rows, {} violated) -> {}", rep.experiment_id, rep.verdict, rep.rows.len(), bad, dir.display());
    for n in &rep.notes {
        println!("  note: {n}");
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let g = cli.global;
    if let Some(t) = g.threads {
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global().map_err(|e| entire_dynamics::Error::InvalidArgument(e.to_string()))?;
    }
    let mut c = match &g.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    set(&mut c.seed, g.seed);
    let id = match cli.cmd {
        Cmd::Thm7(r) => {
            apply_range(&r, &mut c.thm7.m, &mut c.thm7.n_max, &mut c.thm7.center_on_periodic);
            "thm7"
        }
        Cmd::Thm56(r) => {
            apply_range(&r, &mut c.thm56.m, &mut c.thm56.n_max, &mut c.thm56.center_on_periodic);
            "thm56"
        }
        Cmd::Thm1scan { starts, horizon } => {
            set(&mut c.thm1scan.starts, starts);
            set(&mut c.thm1scan.horizon, horizon);
            "thm1scan"
        }
        Cmd::Thm3 { x0, n_max, precision_bits } => {
            set(&mut c.thm3.x0, x0);
            set(&mut c.thm3.n_max, n_max);
            set(&mut c.thm3.precision_bits, precision_bits);
            "thm3"
        }
        Cmd::Thm4scan { starts, horizon } => {
            set(&mut c.thm4scan.starts, starts);
            set(&mut c.thm4scan.horizon, horizon);
            "thm4scan"
        }
        Cmd::Classical => "classical",
        Cmd::Render { width, height } => {
            set(&mut c.render.params.width, width);
            set(&mut c.render.params.height, height);
            "render"
        }
        Cmd::SpecfunCheck => "specfun",
        Cmd::Suite => {
            for rep in harness::run_suite(&c, &g.out)? {
                println!("{}: {:?}", rep.experiment_id, rep.verdict);
            }
            println!("combined report -> {}", g.out.join("report.json").display());
            return Ok(());
        }
        Cmd::Config => {
            c.validate()?;
            println!("{}", serde_json::to_string_pretty(&c)?);
            return Ok(());
        }
        Cmd::Orbits { function, starts, horizon } => {
            let f = FunctionDescriptor::from_json(&function)?;
            let zs = read_starts(std::fs::File::open(&starts)?)?;
            let rows = lyapunov_batch(&f, &zs, horizon);
            std::fs::create_dir_all(&g.out)?;
            let path = g.out.join("orbits.csv");
            write_rows(std::fs::File::create(&path)?, &rows)?;
            println!("orbits: {} starts -> {}", rows.len(), path.display());
            return Ok(());
        }
    };
    c.validate()?;
    let rep = harness::run_experiment(id, &c, &g.out)?;
    emit(&rep, &g.out)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
