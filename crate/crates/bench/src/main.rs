use std::collections::BTreeMap;
use std::fs;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use phbar_bench::{
    aggregate, emit_csv, emit_plot, fit_exponent, run_sweep, series_points, speedup, Mode,
    SeriesKey, SweepConfig,
};
use phbar_core::{
    classify_regime, compute_barcode, filtration_of, generate_uniform_cloud, kruskal_barcode,
    mst_total_weight, predict_steps, read_points, regime_thresholds, write_points, MachineProfile,
    PointCloud, ReductionOptions,
};

#[derive(Parser)]
#[command(version, about = "0th persistent homology barcodes and their scaling")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a seeded uniform point cloud on (0,1)^dim
    Generate {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute a barcode by boundary-matrix reduction
    Compute {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long, value_enum, default_value_t = Switch::On)]
        pivot: Switch,
        /// Also print the never-dying component as `0,inf,-`
        #[arg(long)]
        show_essential: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time (or model) the pipeline over a list of cloud sizes
    Bench(BenchArgs),
    /// Predicted step counts, regimes and regime thresholds
    Model {
        #[arg(long, value_delimiter = ',', required = true)]
        n_list: Vec<usize>,
        #[arg(long, default_value_t = phbar_core::parmodel::DEFAULT_WIDTH)]
        width: u64,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Print the union-find (Kruskal) barcode for cross-checking
    Oracle {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        show_essential: bool,
    },
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    n_list: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    workers_list: Vec<usize>,
    #[arg(long, default_value_t = 10)]
    reps: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Seq)]
    mode: ModeArg,
    /// Parallel width of the modeled machine (model mode)
    #[arg(long, default_value_t = phbar_core::parmodel::DEFAULT_WIDTH)]
    width: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Collision lookup through the claimed-low table (on) or by scanning
    /// every earlier column (off)
    #[arg(long, value_enum, default_value_t = Switch::Off)]
    pivot: Switch,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct Input {
    /// Point file: one point per line, comma or whitespace separated
    #[arg(long = "in", conflicts_with = "n", required_unless_present = "n")]
    path: Option<PathBuf>,
    /// Generate this many uniform points instead of reading a file
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 2)]
    dim: usize,
}

impl Input {
    fn load(&self) -> Result<PointCloud> {
        match (&self.path, self.n) {
            (Some(path), _) => {
                let file = fs::File::open(path)
                    .with_context(|| format!("cannot open {}", path.display()))?;
                read_points(BufReader::new(file)).with_context(|| path.display().to_string())
            }
            (None, Some(n)) => Ok(generate_uniform_cloud(n, self.dim, self.seed)?),
            (None, None) => bail!("one of --in or --n is required"),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Seq,
    Par,
    Model,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Seq => Mode::Seq,
            ModeArg::Par => Mode::Par,
            ModeArg::Model => Mode::Model,
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
        }
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn profile(width: u64) -> Result<MachineProfile> {
    MachineProfile::new(width).context("--width must be at least 1")
}

fn bench(args: BenchArgs) -> Result<()> {
    let BenchArgs {
        n_list,
        workers_list,
        reps,
        mode,
        width,
        seed,
        pivot,
        dim,
        csv,
        svg,
    } = args;
    let mode: Mode = mode.into();
    let mut workers_list = workers_list;
    if mode != Mode::Par {
        // seq and model results do not depend on the worker count
        workers_list = vec![1];
    }
    let mut records = Vec::new();
    for &workers in &workers_list {
        let mut cfg = SweepConfig::new(n_list.clone(), workers, reps, mode, seed)
            .pivoting(pivot == Switch::On)
            .profile(profile(width)?);
        cfg.dim = dim;
        records.extend(run_sweep(&cfg)?);
    }

    let series = aggregate(&records);
    let mut fits = BTreeMap::new();
    let mut summary = String::new();
    for (key, points) in &series {
        summary.push_str(&format!("# series {}\n", key.label()));
        for p in points {
            summary.push_str(&format!(
                "#   n={:<6} mean={:.6e} reps={}\n",
                p.n, p.mean, p.reps
            ));
        }
        match fit_exponent(&series_points(points)) {
            Ok(fit) => {
                summary.push_str(&format!(
                    "#   slope={:.3} r2={:.4}\n",
                    fit.slope, fit.r_squared
                ));
                fits.insert(*key, fit);
            }
            Err(e) => summary.push_str(&format!("#   no fit: {e}\n")),
        }
    }
    let base_key = SeriesKey {
        mode: Mode::Par,
        workers: 1,
    };
    if let Some(base) = series.get(&base_key) {
        for (key, points) in series
            .iter()
            .filter(|(k, _)| k.mode == Mode::Par && k.workers > 1)
        {
            for (b, p) in base.iter().zip(points).filter(|(b, p)| b.n == p.n) {
                if let Ok(s) = speedup(b.mean, p.mean) {
                    summary.push_str(&format!(
                        "# speedup n={} w=1->{}: {:.3}\n",
                        p.n, key.workers, s
                    ));
                }
            }
        }
    }

    let csv_text = emit_csv(&records);
    match &csv {
        Some(path) => {
            emit(Some(path), &csv_text)?;
            print!("{summary}");
        }
        None => {
            print!("{csv_text}");
            eprint!("{summary}");
        }
    }
    if let Some(path) = svg {
        emit(Some(&path), &emit_plot(&records, &fits)?)?;
    }
    Ok(())
}

fn model(n_list: Vec<usize>, width: u64, csv: Option<PathBuf>) -> Result<()> {
    let profile = profile(width)?;
    let mut text = String::from("n,width,regime,distance,sort,build,reduce,extract,total\n");
    for n in n_list {
        let s = predict_steps(n, &profile)?;
        let regime = classify_regime(n, &profile)?;
        text.push_str(&format!(
            "{n},{width},{regime},{},{},{},{},{},{}\n",
            s.distance,
            s.sort,
            s.build,
            s.reduce,
            s.extract,
            s.total()
        ));
    }
    let t = regime_thresholds(&profile);
    let note = format!(
        "# width={width}: ROW regime up to n={}, COLUMN regime up to n={}\n",
        t.n_row, t.n_col
    );
    match csv {
        Some(path) => {
            emit(Some(&path), &text)?;
            print!("{note}");
        }
        None => {
            print!("{text}");
            eprint!("{note}");
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate { n, dim, seed, out } => {
            let cloud = generate_uniform_cloud(n, dim, seed)?;
            emit(out.as_deref(), &write_points(&cloud))
        }
        Command::Compute {
            input,
            workers,
            pivot,
            show_essential,
            out,
        } => {
            if workers == 0 {
                bail!("--workers must be at least 1");
            }
            let cloud = input.load()?;
            let opts = ReductionOptions::default()
                .with_workers(workers)
                .with_pivoting(pivot == Switch::On);
            let barcode = compute_barcode(&cloud, &opts)?;
            emit(out.as_deref(), &barcode.display(show_essential).to_string())
        }
        Command::Bench(args) => bench(args),
        Command::Model { n_list, width, csv } => model(n_list, width, csv),
        Command::Oracle {
            input,
            show_essential,
        } => {
            let cloud = input.load()?;
            let f = filtration_of(&cloud);
            let barcode = kruskal_barcode(&f, cloud.len());
            print!("{}", barcode.display(show_essential));
            eprintln!("# mst total weight {}", mst_total_weight(&f, cloud.len()));
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
