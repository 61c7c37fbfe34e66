use cgp::error::CgpError;
use cgp::harness::{
    parse_runs_csv, row_metric_values, run_grid, run_single, runs_csv_rows, ExperimentConfig,
    RUNS_CSV_HEADER,
};
use cgp::stats::{summarize_values, Metric};
use clap::{Parser, Subcommand};
use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "cgp", about = "CGP with phenotypic insertion/deletion mutations", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute seeded runs of a single grid cell and print per-run CSV rows.
    Run {
        #[arg(long)]
        problem: String,
        #[arg(long, default_value_t = 0.0)]
        insertion_rate: f64,
        #[arg(long, default_value_t = 0.0)]
        deletion_rate: f64,
        #[arg(long, default_value_t = 1)]
        runs: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Use the single active-gene mutation instead of point mutation.
        #[arg(long)]
        sagms: bool,
        #[arg(long)]
        point_rate: Option<f64>,
        #[arg(long)]
        lambda: Option<usize>,
        #[arg(long)]
        min_active: Option<usize>,
        /// Fitness-evaluation budget (0 = unbounded).
        #[arg(long)]
        budget: Option<usize>,
        /// Generation safety cap (0 = unbounded).
        #[arg(long)]
        max_generations: Option<usize>,
        /// Pin one shared dataset seed across all runs (regression only).
        #[arg(long)]
        dataset_seed: Option<u64>,
    },
    /// Sweep the full insertion/deletion rate grid and emit tables.
    Grid {
        #[arg(long)]
        problem: Option<String>,
        /// Comma-separated rate axis, e.g. 0.0,0.1,0.2,0.3
        #[arg(long)]
        rates: Option<String>,
        #[arg(long)]
        runs: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        workers: Option<usize>,
        /// Output directory for runs.csv, summary.csv, summary.md and
        /// best_solutions.txt. Without it, tables go to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// key=value config file; command-line flags take precedence.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        sagms: bool,
        #[arg(long)]
        point_rate: Option<f64>,
        #[arg(long)]
        lambda: Option<usize>,
        #[arg(long)]
        min_active: Option<usize>,
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long)]
        max_generations: Option<usize>,
        #[arg(long)]
        dataset_seed: Option<u64>,
    },
    /// Compare two per-run CSV files with a Mann-Whitney U test.
    Stats {
        #[arg(long)]
        baseline: PathBuf,
        #[arg(long)]
        treatment: PathBuf,
        /// generations | fitness
        #[arg(long)]
        metric: String,
    },
}

enum CliError {
    Config(String),
    Io(String),
}

impl From<CgpError> for CliError {
    fn from(e: CgpError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse().command) {
        Ok(()) => ExitCode::from(0),
        Err(CliError::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Io(msg)) => {
            eprintln!("I/O error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn parse_rates(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| CliError::Config(format!("bad rate {t:?}: {e}")))
        })
        .collect()
}

fn load_key_values(path: &PathBuf) -> Result<HashMap<String, String>, CliError> {
    let content = fs::read_to_string(path)?;
    let mut map = HashMap::new();
    for (lineno, line) in content.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            CliError::Config(format!("{}:{}: expected key=value", path.display(), lineno + 1))
        })?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

fn file_value<T: std::str::FromStr>(
    map: &HashMap<String, String>,
    key: &str,
) -> Result<Option<T>, CliError>
where
    T::Err: std::fmt::Display,
{
    match map.get(key) {
        None => Ok(None),
        Some(v) => v
            .parse::<T>()
            .map(Some)
            .map_err(|e| CliError::Config(format!("config key {key}: {e}"))),
    }
}

#[allow(clippy::too_many_arguments)]
fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Run {
            problem,
            insertion_rate,
            deletion_rate,
            runs,
            seed,
            sagms,
            point_rate,
            lambda,
            min_active,
            budget,
            max_generations,
            dataset_seed,
        } => {
            let mut config = ExperimentConfig::for_problem(&problem)?;
            config.base_seed = seed;
            config.runs_per_cell = runs;
            config.use_sagms = sagms;
            config.dataset_seed = dataset_seed;
            if let Some(v) = point_rate {
                config.point_rate = v;
            }
            if let Some(v) = lambda {
                config.lambda = v;
            }
            if let Some(v) = min_active {
                config.min_active = v;
            }
            if let Some(v) = budget {
                config.eval_budget = v;
            }
            if let Some(v) = max_generations {
                config.generation_cap = v;
            }
            config.validate()?;

            let stdout = std::io::stdout();
            let mut out = stdout.lock();
            writeln!(out, "{RUNS_CSV_HEADER}")?;
            let mut records = Vec::with_capacity(runs);
            for run_index in 0..runs {
                let r = run_single(&config, insertion_rate, deletion_rate, run_index)?;
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{}",
                    problem,
                    deletion_rate,
                    insertion_rate,
                    run_index,
                    r.seed,
                    r.generations,
                    r.evaluations,
                    r.best_fitness,
                    r.success
                )?;
                records.push(r);
            }
            let metric = config.metric()?;
            let (vals, excluded) = cgp::stats::metric_values(&records, metric);
            let s = summarize_values(&vals, excluded, None, insertion_rate, deletion_rate);
            eprintln!(
                "{problem} del={deletion_rate} ins={insertion_rate}: n={} mean={} median={} stddev={} excluded={}",
                s.n_runs, s.mean, s.median, s.std_dev, s.excluded
            );
            if let Some(best) = records
                .iter()
                .min_by(|a, b| a.best_fitness.total_cmp(&b.best_fitness))
            {
                let nf = function_set_size(&config)?;
                eprintln!("best genotype: {}", best.best_genotype.to_line(nf));
            }
            Ok(())
        }
        Command::Grid {
            problem,
            rates,
            runs,
            seed,
            workers,
            out,
            config: config_path,
            sagms,
            point_rate,
            lambda,
            min_active,
            budget,
            max_generations,
            dataset_seed,
        } => {
            let file = match &config_path {
                Some(p) => load_key_values(p)?,
                None => HashMap::new(),
            };
            let problem = problem
                .or(file.get("problem").cloned())
                .ok_or_else(|| CliError::Config("missing --problem (or problem= in config)".into()))?;
            let mut config = ExperimentConfig::for_problem(&problem)?;
            if let Some(r) = rates.as_deref().map(parse_rates).transpose()? {
                config.rate_axis = r;
            } else if let Some(r) = file.get("rates") {
                config.rate_axis = parse_rates(r)?;
            }
            macro_rules! resolve {
                ($field:ident, $flag:expr, $key:literal) => {
                    if let Some(v) = $flag.or(file_value(&file, $key)?) {
                        config.$field = v;
                    }
                };
            }
            resolve!(runs_per_cell, runs, "runs");
            resolve!(base_seed, seed, "seed");
            resolve!(workers, workers, "workers");
            resolve!(point_rate, point_rate, "point_rate");
            resolve!(lambda, lambda, "lambda");
            resolve!(min_active, min_active, "min_active");
            resolve!(eval_budget, budget, "budget");
            resolve!(generation_cap, max_generations, "max_generations");
            config.use_sagms = sagms || file_value(&file, "sagms")?.unwrap_or(false);
            config.dataset_seed = dataset_seed.or(file_value(&file, "dataset_seed")?);
            config.output_dir = out.or(file.get("out").map(PathBuf::from));
            config.validate()?;

            match config.output_dir.clone() {
                Some(dir) => {
                    fs::create_dir_all(&dir)?;
                    let runs_path = dir.join("runs.csv");
                    let mut runs_file = fs::File::create(&runs_path)?;
                    writeln!(runs_file, "{RUNS_CSV_HEADER}")?;
                    let total_cells = config.rate_axis.len() * config.rate_axis.len();
                    let mut done = 0usize;
                    let mut io_err: Option<std::io::Error> = None;
                    let result = run_grid(&config, |cell| {
                        if io_err.is_some() {
                            return;
                        }
                        if let Err(e) = runs_file
                            .write_all(runs_csv_rows(&problem, cell).as_bytes())
                            .and_then(|()| runs_file.flush())
                        {
                            io_err = Some(e);
                            return;
                        }
                        done += 1;
                        eprintln!(
                            "cell del={} ins={} done ({done}/{total_cells})",
                            cell.deletion_rate, cell.insertion_rate
                        );
                    })?;
                    if let Some(e) = io_err {
                        return Err(e.into());
                    }
                    fs::write(dir.join("summary.csv"), result.summary_csv())?;
                    fs::write(dir.join("summary.md"), result.summary_markdown())?;
                    let nf = function_set_size(&config)?;
                    fs::write(dir.join("best_solutions.txt"), result.best_solutions(nf))?;
                    eprintln!("wrote {}", dir.display());
                }
                None => {
                    let total_cells = config.rate_axis.len() * config.rate_axis.len();
                    let mut done = 0usize;
                    let result = run_grid(&config, |cell| {
                        done += 1;
                        eprintln!(
                            "cell del={} ins={} done ({done}/{total_cells})",
                            cell.deletion_rate, cell.insertion_rate
                        );
                    })?;
                    print!("{}", result.summary_markdown());
                    println!();
                    print!("{}", result.summary_csv());
                }
            }
            Ok(())
        }
        Command::Stats {
            baseline,
            treatment,
            metric,
        } => {
            let metric: Metric = metric.parse()?;
            let base_rows = parse_runs_csv(&fs::read_to_string(&baseline)?)?;
            let treat_rows = parse_runs_csv(&fs::read_to_string(&treatment)?)?;
            let (base_vals, base_excluded) = row_metric_values(&base_rows, metric);
            let (treat_vals, treat_excluded) = row_metric_values(&treat_rows, metric);
            if base_vals.is_empty() || treat_vals.is_empty() {
                return Err(CliError::Config(
                    "no usable metric values in one of the samples".into(),
                ));
            }
            let s = summarize_values(&treat_vals, treat_excluded, Some(&base_vals), 0.0, 0.0);
            let b = summarize_values(&base_vals, base_excluded, None, 0.0, 0.0);
            println!(
                "baseline:  n={} mean={} median={} stddev={} excluded={}",
                b.n_runs, b.mean, b.median, b.std_dev, b.excluded
            );
            println!(
                "treatment: n={} mean={} median={} stddev={} excluded={}",
                s.n_runs, s.mean, s.median, s.std_dev, s.excluded
            );
            println!(
                "mann-whitney: U={} p={} marker={}",
                s.u_statistic.unwrap(),
                s.p_value.unwrap(),
                s.marker.csv_label()
            );
            Ok(())
        }
    }
}

fn function_set_size(config: &ExperimentConfig) -> Result<usize, CliError> {
    Ok(match config.kind()? {
        cgp::harness::ProblemKind::Boolean(name) => {
            cgp::problems::make_boolean_problem(name).function_set().len()
        }
        cgp::harness::ProblemKind::Regression(_) => cgp::problems::regression_function_set().len(),
    })
}
