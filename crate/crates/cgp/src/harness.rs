use crate::error::{CgpError, Result};
use crate::evolution::{run, EvolutionParams, RunRecord};
use crate::mutation::MutationParams;
use crate::problems::{
    make_boolean_problem, make_regression_problem, with_dataset, BooleanProblemName, Dataset,
    Problem, RegressionProblemName,
};
use crate::stats::{summarize_cell, GridCellSummary, Metric};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::fmt::Write as _;
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    Boolean(BooleanProblemName),
    Regression(RegressionProblemName),
}

impl std::str::FromStr for ProblemKind {
    type Err = CgpError;
    fn from_str(s: &str) -> Result<Self> {
        if let Ok(b) = s.parse::<BooleanProblemName>() {
            return Ok(ProblemKind::Boolean(b));
        }
        if let Ok(r) = s.parse::<RegressionProblemName>() {
            return Ok(ProblemKind::Regression(r));
        }
        Err(CgpError::Config(format!(
            "unknown problem {s}; expected one of adder2, mul2, sub2, koza2, koza3, pagie1"
        )))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub problem: String,
    pub rate_axis: Vec<f64>,
    pub runs_per_cell: usize,
    pub base_seed: u64,
    pub lambda: usize,
    pub point_rate: f64,
    pub min_active: usize,
    /// Fitness-evaluation budget; 0 = unbounded.
    pub eval_budget: usize,
    /// Generation safety cap; 0 = unbounded.
    pub generation_cap: usize,
    pub use_sagms: bool,
    /// When set, all runs share one dataset drawn from this seed.
    pub dataset_seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
    pub workers: usize,
}

impl ExperimentConfig {
    /// Default experiment for a named problem: 4x4 rate grid in 0.1 steps,
    /// 100 runs per cell, (1+4)-CGP, minimum of 4 active nodes. Boolean
    /// problems run to success under a generation safety cap; regression
    /// problems run on a 10000-evaluation budget.
    pub fn for_problem(problem: &str) -> Result<Self> {
        let kind: ProblemKind = problem.parse()?;
        let (point_rate, eval_budget, generation_cap) = match kind {
            ProblemKind::Boolean(_) => (0.05, 0, 10_000_000),
            ProblemKind::Regression(_) => (0.2, 10_000, 10_000_000),
        };
        Ok(ExperimentConfig {
            problem: problem.to_string(),
            rate_axis: vec![0.0, 0.1, 0.2, 0.3],
            runs_per_cell: 100,
            base_seed: 1,
            lambda: 4,
            point_rate,
            min_active: 4,
            eval_budget,
            generation_cap,
            use_sagms: false,
            dataset_seed: None,
            output_dir: None,
            workers: 1,
        })
    }

    pub fn kind(&self) -> Result<ProblemKind> {
        self.problem.parse()
    }

    pub fn metric(&self) -> Result<Metric> {
        Ok(match self.kind()? {
            ProblemKind::Boolean(_) => Metric::Generations,
            ProblemKind::Regression(_) => Metric::BestFitness,
        })
    }

    pub fn target_fitness(&self) -> Result<f64> {
        Ok(match self.kind()? {
            ProblemKind::Boolean(_) => 0.0,
            ProblemKind::Regression(_) => 0.01,
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.kind()?;
        if self.runs_per_cell < 1 {
            return Err(CgpError::Config("runs_per_cell must be >= 1".into()));
        }
        if self.rate_axis.is_empty() {
            return Err(CgpError::Config("rate axis must be non-empty".into()));
        }
        for &r in &self.rate_axis {
            if !(0.0..=1.0).contains(&r) {
                return Err(CgpError::Config(format!("rate {r} outside [0, 1]")));
            }
        }
        if self.workers < 1 {
            return Err(CgpError::Config("workers must be >= 1".into()));
        }
        self.evolution_params(0.0, 0.0)?.validate()
    }

    pub fn evolution_params(&self, insertion_rate: f64, deletion_rate: f64) -> Result<EvolutionParams> {
        Ok(EvolutionParams {
            lambda: self.lambda,
            target_fitness: self.target_fitness()?,
            max_evaluations: self.eval_budget,
            max_generations: self.generation_cap,
            mutation: MutationParams {
                point_rate: self.point_rate,
                insertion_rate,
                deletion_rate,
                min_active: self.min_active,
                use_sagms: self.use_sagms,
            },
        })
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Stable per-run seed: a 64-bit mix of the base seed, the cell's rates and
/// the run index. Independent of execution order and worker count.
pub fn derive_seed(base_seed: u64, deletion_rate: f64, insertion_rate: f64, run_index: usize) -> u64 {
    let mut h = splitmix64(base_seed ^ 0x6A09_E667_F3BC_C909);
    h = splitmix64(h ^ deletion_rate.to_bits());
    h = splitmix64(h ^ insertion_rate.to_bits());
    splitmix64(h ^ run_index as u64)
}

const DATASET_STREAM_SALT: u64 = 0xBB67_AE85_84CA_A73B;

fn build_problem(config: &ExperimentConfig, run_seed: u64) -> Result<Problem> {
    match config.kind()? {
        ProblemKind::Boolean(name) => Ok(make_boolean_problem(name)),
        ProblemKind::Regression(name) => {
            // U-datasets come from a dedicated substream so the evolutionary
            // stream is unaffected; a pinned dataset seed shares one dataset
            // across all runs.
            let dataset_seed = config
                .dataset_seed
                .unwrap_or_else(|| splitmix64(run_seed ^ DATASET_STREAM_SALT));
            let mut dataset_rng = ChaCha8Rng::seed_from_u64(dataset_seed);
            Ok(make_regression_problem(name, &mut dataset_rng))
        }
    }
}

/// One seeded run of one grid cell.
pub fn run_single(
    config: &ExperimentConfig,
    insertion_rate: f64,
    deletion_rate: f64,
    run_index: usize,
) -> Result<RunRecord> {
    let seed = derive_seed(config.base_seed, deletion_rate, insertion_rate, run_index);
    let problem = build_problem(config, seed)?;
    let params = config.evolution_params(insertion_rate, deletion_rate)?;
    run(&problem, &params, seed)
}

/// Re-evaluates a regression problem with an externally pinned dataset.
pub fn run_single_with_dataset(
    config: &ExperimentConfig,
    insertion_rate: f64,
    deletion_rate: f64,
    run_index: usize,
    dataset: &Dataset,
) -> Result<RunRecord> {
    let seed = derive_seed(config.base_seed, deletion_rate, insertion_rate, run_index);
    let problem = with_dataset(&build_problem(config, seed)?, dataset.clone())?;
    let params = config.evolution_params(insertion_rate, deletion_rate)?;
    run(&problem, &params, seed)
}

#[derive(Debug, Clone)]
pub struct CellResult {
    pub deletion_rate: f64,
    pub insertion_rate: f64,
    pub records: Vec<RunRecord>,
}

#[derive(Debug, Clone)]
pub struct GridResult {
    pub problem: String,
    pub metric: Metric,
    pub rate_axis: Vec<f64>,
    /// Cells in row-major order: deletion rate outer, insertion rate inner.
    pub cells: Vec<CellResult>,
    pub summaries: Vec<GridCellSummary>,
}

/// Executes all cells of the rate grid. Runs within a cell execute on a
/// worker pool; `on_cell` fires after each completed cell so callers can
/// flush partial results.
pub fn run_grid(
    config: &ExperimentConfig,
    mut on_cell: impl FnMut(&CellResult),
) -> Result<GridResult> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| CgpError::Config(format!("worker pool: {e}")))?;

    let mut cells = Vec::with_capacity(config.rate_axis.len() * config.rate_axis.len());
    for &deletion_rate in &config.rate_axis {
        for &insertion_rate in &config.rate_axis {
            let records: Vec<RunRecord> = pool.install(|| {
                (0..config.runs_per_cell)
                    .into_par_iter()
                    .map(|run_index| run_single(config, insertion_rate, deletion_rate, run_index))
                    .collect::<Result<Vec<_>>>()
            })?;
            let cell = CellResult {
                deletion_rate,
                insertion_rate,
                records,
            };
            on_cell(&cell);
            cells.push(cell);
        }
    }

    let metric = config.metric()?;
    let baseline = &cells[0].records;
    let summaries = cells
        .iter()
        .enumerate()
        .map(|(i, cell)| {
            let base = if i == 0 { None } else { Some(baseline.as_slice()) };
            summarize_cell(
                &cell.records,
                base,
                metric,
                cell.insertion_rate,
                cell.deletion_rate,
            )
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(GridResult {
        problem: config.problem.clone(),
        metric,
        rate_axis: config.rate_axis.clone(),
        cells,
        summaries,
    })
}

pub const RUNS_CSV_HEADER: &str =
    "problem,deletion_rate,insertion_rate,run,seed,generations,evaluations,best_fitness,success";

pub const SUMMARY_CSV_HEADER: &str =
    "problem,deletion_rate,insertion_rate,n,mean,median,stddev,u,p,marker,excluded";

pub fn runs_csv_rows(problem: &str, cell: &CellResult) -> String {
    let mut out = String::new();
    for (run_index, r) in cell.records.iter().enumerate() {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            problem,
            cell.deletion_rate,
            cell.insertion_rate,
            run_index,
            r.seed,
            r.generations,
            r.evaluations,
            r.best_fitness,
            r.success
        )
        .unwrap();
    }
    out
}

impl GridResult {
    pub fn runs_csv(&self) -> String {
        let mut out = String::from(RUNS_CSV_HEADER);
        out.push('\n');
        for cell in &self.cells {
            out.push_str(&runs_csv_rows(&self.problem, cell));
        }
        out
    }

    pub fn summary_csv(&self) -> String {
        let mut out = String::from(SUMMARY_CSV_HEADER);
        out.push('\n');
        for s in &self.summaries {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{}",
                self.problem,
                s.deletion_rate,
                s.insertion_rate,
                s.n_runs,
                s.mean,
                s.median,
                s.std_dev,
                s.u_statistic.map_or(String::new(), |u| u.to_string()),
                s.p_value.map_or(String::new(), |p| p.to_string()),
                s.marker.csv_label(),
                s.excluded
            )
            .unwrap();
        }
        out
    }

    fn summary_at(&self, deletion_rate: f64, insertion_rate: f64) -> &GridCellSummary {
        self.summaries
            .iter()
            .find(|s| s.deletion_rate == deletion_rate && s.insertion_rate == insertion_rate)
            .expect("cell present")
    }

    /// Markdown table: insertion rate as columns, deletion rate as rows,
    /// mean values with significance markers.
    pub fn summary_markdown(&self) -> String {
        let fmt_mean = |s: &GridCellSummary| -> String {
            let mean = match self.metric {
                Metric::Generations => format!("{:.0}", s.mean),
                Metric::BestFitness => format!("{:.2}", s.mean),
            };
            format!("{}{}", mean, s.marker.symbol())
        };
        let mut out = String::new();
        writeln!(
            out,
            "Mean {} for {} (rows: deletion rate, columns: insertion rate)",
            match self.metric {
                Metric::Generations => "generations-to-success",
                Metric::BestFitness => "best-fitness-of-run",
            },
            self.problem
        )
        .unwrap();
        writeln!(out).unwrap();
        let mut header = String::from("| del \\ ins |");
        let mut rule = String::from("|---|");
        for ins in &self.rate_axis {
            write!(header, " {ins} |").unwrap();
            rule.push_str("---|");
        }
        writeln!(out, "{header}").unwrap();
        writeln!(out, "{rule}").unwrap();
        for del in &self.rate_axis {
            let mut row = format!("| **{del}** |");
            for ins in &self.rate_axis {
                write!(row, " {} |", fmt_mean(self.summary_at(*del, *ins))).unwrap();
            }
            writeln!(out, "{row}").unwrap();
        }
        let excluded: usize = self.summaries.iter().map(|s| s.excluded).sum();
        if excluded > 0 {
            writeln!(out).unwrap();
            writeln!(
                out,
                "Note: {excluded} capped unsuccessful run(s) excluded from generation statistics."
            )
            .unwrap();
        }
        out
    }

    /// Best genotype per cell, dumped as header-prefixed gene lines.
    pub fn best_solutions(&self, num_functions: usize) -> String {
        let mut out = String::new();
        for cell in &self.cells {
            if let Some((run_index, best)) = cell
                .records
                .iter()
                .enumerate()
                .min_by(|(_, a), (_, b)| a.best_fitness.total_cmp(&b.best_fitness))
            {
                writeln!(
                    out,
                    "# problem={} deletion_rate={} insertion_rate={} run={} fitness={}",
                    self.problem, cell.deletion_rate, cell.insertion_rate, run_index, best.best_fitness
                )
                .unwrap();
                writeln!(out, "{}", best.best_genotype.to_line(num_functions)).unwrap();
            }
        }
        out
    }
}

/// One parsed row of the per-run CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRow {
    pub problem: String,
    pub deletion_rate: f64,
    pub insertion_rate: f64,
    pub run: usize,
    pub seed: u64,
    pub generations: usize,
    pub evaluations: usize,
    pub best_fitness: f64,
    pub success: bool,
}

pub fn parse_runs_csv(content: &str) -> Result<Vec<RunRow>> {
    let mut rows = Vec::new();
    for (lineno, line) in content.lines().enumerate() {
        if lineno == 0 && line.starts_with("problem,") {
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 9 {
            return Err(CgpError::Parse(format!(
                "line {}: expected 9 fields, got {}",
                lineno + 1,
                parts.len()
            )));
        }
        let field = |i: usize| parts[i].trim();
        let parse_err = |i: usize, e: &dyn std::fmt::Display| {
            CgpError::Parse(format!("line {}, field {}: {e}", lineno + 1, i + 1))
        };
        rows.push(RunRow {
            problem: field(0).to_string(),
            deletion_rate: field(1).parse().map_err(|e| parse_err(1, &e))?,
            insertion_rate: field(2).parse().map_err(|e| parse_err(2, &e))?,
            run: field(3).parse().map_err(|e| parse_err(3, &e))?,
            seed: field(4).parse().map_err(|e| parse_err(4, &e))?,
            generations: field(5).parse().map_err(|e| parse_err(5, &e))?,
            evaluations: field(6).parse().map_err(|e| parse_err(6, &e))?,
            best_fitness: field(7).parse().map_err(|e| parse_err(7, &e))?,
            success: field(8).parse().map_err(|e| parse_err(8, &e))?,
        });
    }
    Ok(rows)
}

/// Metric values for parsed CSV rows, mirroring `stats::metric_values`.
pub fn row_metric_values(rows: &[RunRow], metric: Metric) -> (Vec<f64>, usize) {
    match metric {
        Metric::Generations => {
            let vals: Vec<f64> = rows
                .iter()
                .filter(|r| r.success)
                .map(|r| r.generations as f64)
                .collect();
            let excluded = rows.len() - vals.len();
            (vals, excluded)
        }
        Metric::BestFitness => (rows.iter().map(|r| r.best_fitness).collect(), 0),
    }
}
