use crate::error::{CgpError, Result};
use crate::evolution::RunRecord;
use statrs::distribution::{ContinuousCDF, Normal};

/// Enumerating subsets for the tie-aware exact test is capped at this many
/// combinations; beyond it the normal approximation takes over.
const EXACT_ENUMERATION_LIMIT: f64 = 2_000_000.0;

/// Two-tailed Mann-Whitney U test. Returns the smaller U statistic and the
/// p-value. Uses exact enumeration when the smaller sample has at most 8
/// elements (dynamic programming over rank sums for tie-free data, subset
/// enumeration otherwise), and the tie-corrected, continuity-corrected
/// normal approximation for larger samples.
pub fn mann_whitney_u(a: &[f64], b: &[f64]) -> (f64, f64) {
    assert!(!a.is_empty() && !b.is_empty(), "samples must be non-empty");
    let na = a.len();
    let nb = b.len();
    let n = na + nb;

    // combined midranks, doubled so ties stay integral
    let mut combined: Vec<(f64, usize)> = a
        .iter()
        .map(|&v| (v, 0usize))
        .chain(b.iter().map(|&v| (v, 1usize)))
        .collect();
    combined.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut double_ranks = vec![0u64; n];
    let mut tie_groups: Vec<usize> = Vec::new();
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && combined[j].0 == combined[i].0 {
            j += 1;
        }
        let dr = (i + j + 1) as u64; // 2 * midrank for 1-based ranks
        for r in double_ranks.iter_mut().take(j).skip(i) {
            *r = dr;
        }
        tie_groups.push(j - i);
        i = j;
    }

    let double_rank_sum_a: u64 = combined
        .iter()
        .zip(&double_ranks)
        .filter(|((_, group), _)| *group == 0)
        .map(|(_, &dr)| dr)
        .sum();
    let u_a = double_rank_sum_a as f64 / 2.0 - (na * (na + 1)) as f64 / 2.0;
    let u_b = (na * nb) as f64 - u_a;
    let u = u_a.min(u_b);

    let has_ties = tie_groups.iter().any(|&t| t > 1);
    let k = na.min(nb);
    let p = if k <= 8 && !has_ties {
        exact_p_no_ties(na, nb, if na <= nb { u_a } else { u_b })
    } else if k <= 8 && choose(n, k) <= EXACT_ENUMERATION_LIMIT {
        exact_p_with_ties(&double_ranks, na, nb, if na <= nb { u_a } else { u_b })
    } else {
        normal_approx_p(na, nb, u, &tie_groups)
    };
    (u, p.min(1.0))
}

fn choose(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Two-tailed tail mass of a U distribution given as counts indexed by U.
fn two_tailed_from_counts(counts: &[f64], u_obs: f64, max_u: f64) -> f64 {
    let total: f64 = counts.iter().sum();
    let lo = u_obs.min(max_u - u_obs);
    let hi = u_obs.max(max_u - u_obs);
    let mass: f64 = counts
        .iter()
        .enumerate()
        .filter(|(u, _)| (*u as f64) <= lo + 1e-9 || (*u as f64) >= hi - 1e-9)
        .map(|(_, &c)| c)
        .sum();
    mass / total
}

/// Exact null distribution of the smaller sample's U via subset-sum counting
/// over the ranks 1..=n. `u_obs` is the U of the smaller sample.
fn exact_p_no_ties(na: usize, nb: usize, u_obs: f64) -> f64 {
    let k = na.min(nb);
    let n = na + nb;
    let max_u = na * nb;
    // ways[j][s]: subsets of size j with rank sum s
    let max_sum: usize = (n - k + 1..=n).sum();
    let mut ways = vec![vec![0.0f64; max_sum + 1]; k + 1];
    ways[0][0] = 1.0;
    for rank in 1..=n {
        for j in (1..=k).rev() {
            for s in (rank..=max_sum).rev() {
                if ways[j - 1][s - rank] > 0.0 {
                    ways[j][s] += ways[j - 1][s - rank];
                }
            }
        }
    }
    let offset = k * (k + 1) / 2; // U = ranksum - offset
    let mut counts = vec![0.0f64; max_u + 1];
    for (s, &w) in ways[k].iter().enumerate() {
        if w > 0.0 && s >= offset && s - offset <= max_u {
            counts[s - offset] += w;
        }
    }
    two_tailed_from_counts(&counts, u_obs, max_u as f64)
}

/// Exact test conditional on the observed tie pattern: enumerates every
/// assignment of the doubled midranks to the smaller sample.
fn exact_p_with_ties(double_ranks: &[u64], na: usize, nb: usize, u_obs: f64) -> f64 {
    let k = na.min(nb);
    // tally in doubled units so midranks stay integral
    let max_double_sum: u64 = double_ranks.iter().sum();
    let mut counts = vec![0.0f64; (max_double_sum + 1) as usize];

    fn recurse(
        double_ranks: &[u64],
        start: usize,
        remaining: usize,
        sum: u64,
        counts: &mut [f64],
    ) {
        if remaining == 0 {
            counts[sum as usize] += 1.0;
            return;
        }
        let n = double_ranks.len();
        for i in start..=n - remaining {
            recurse(double_ranks, i + 1, remaining - 1, sum + double_ranks[i], counts);
        }
    }
    recurse(double_ranks, 0, k, 0, &mut counts);

    // doubled U = doubled ranksum - k(k+1)
    let offset = (k * (k + 1)) as u64;
    let max_u2 = 2 * na as u64 * nb as u64;
    let total: f64 = counts.iter().sum();
    let u2_obs = 2.0 * u_obs;
    let lo = u2_obs.min(max_u2 as f64 - u2_obs);
    let hi = u2_obs.max(max_u2 as f64 - u2_obs);
    let mass: f64 = counts
        .iter()
        .enumerate()
        .filter(|(s2, &c)| c > 0.0 && *s2 as u64 >= offset)
        .map(|(s2, &c)| (s2 as u64 - offset, c))
        .filter(|(u2, _)| (*u2 as f64) <= lo + 1e-9 || (*u2 as f64) >= hi - 1e-9)
        .map(|(_, c)| c)
        .sum();
    mass / total
}

fn normal_approx_p(na: usize, nb: usize, u_min: f64, tie_groups: &[usize]) -> f64 {
    let n = (na + nb) as f64;
    let prod = (na * nb) as f64;
    let tie_term: f64 = tie_groups
        .iter()
        .map(|&t| {
            let t = t as f64;
            t * t * t - t
        })
        .sum();
    let variance = prod / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if variance <= 0.0 {
        return 1.0; // all values identical
    }
    let mean = prod / 2.0;
    // continuity correction toward the mean; u_min <= mean by construction
    let z = (u_min - mean + 0.5) / variance.sqrt();
    let normal = Normal::new(0.0, 1.0).unwrap();
    (2.0 * normal.cdf(z)).min(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Generations,
    BestFitness,
}

impl std::str::FromStr for Metric {
    type Err = CgpError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "generations" => Ok(Metric::Generations),
            "fitness" | "best_fitness" => Ok(Metric::BestFitness),
            other => Err(CgpError::Config(format!("unknown metric {other}"))),
        }
    }
}

/// Significance marker mirroring the dagger notation: `Dagger` for
/// p < 0.05, `DoubleDagger` for p < 0.01.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Marker {
    None,
    Dagger,
    DoubleDagger,
}

impl Marker {
    pub fn from_p(p: Option<f64>) -> Marker {
        match p {
            Some(p) if p < 0.01 => Marker::DoubleDagger,
            Some(p) if p < 0.05 => Marker::Dagger,
            _ => Marker::None,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Marker::None => "",
            Marker::Dagger => "†",
            Marker::DoubleDagger => "‡",
        }
    }

    pub fn csv_label(self) -> &'static str {
        match self {
            Marker::None => "none",
            Marker::Dagger => "dagger",
            Marker::DoubleDagger => "double_dagger",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridCellSummary {
    pub insertion_rate: f64,
    pub deletion_rate: f64,
    pub n_runs: usize,
    pub mean: f64,
    pub median: f64,
    pub std_dev: f64,
    pub u_statistic: Option<f64>,
    pub p_value: Option<f64>,
    pub marker: Marker,
    /// Capped unsuccessful runs excluded from generations statistics.
    pub excluded: usize,
}

/// Extracts the metric values from run records. For generations-to-success,
/// unsuccessful (capped) runs are excluded and counted.
pub fn metric_values(records: &[RunRecord], metric: Metric) -> (Vec<f64>, usize) {
    match metric {
        Metric::Generations => {
            let vals: Vec<f64> = records
                .iter()
                .filter(|r| r.success)
                .map(|r| r.generations as f64)
                .collect();
            let excluded = records.len() - vals.len();
            (vals, excluded)
        }
        Metric::BestFitness => (records.iter().map(|r| r.best_fitness).collect(), 0),
    }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

fn std_dev(xs: &[f64], m: f64) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

/// Aggregates metric values already extracted from runs. `baseline` is
/// `None` for the baseline cell itself.
pub fn summarize_values(
    values: &[f64],
    excluded: usize,
    baseline: Option<&[f64]>,
    insertion_rate: f64,
    deletion_rate: f64,
) -> GridCellSummary {
    let (m, md, sd) = if values.is_empty() {
        (f64::NAN, f64::NAN, f64::NAN)
    } else {
        let m = mean(values);
        (m, median(values), std_dev(values, m))
    };
    let (u, p) = match baseline {
        Some(base) if !values.is_empty() && !base.is_empty() => {
            let (u, p) = mann_whitney_u(values, base);
            (Some(u), Some(p))
        }
        _ => (None, None),
    };
    GridCellSummary {
        insertion_rate,
        deletion_rate,
        n_runs: values.len(),
        mean: m,
        median: md,
        std_dev: sd,
        u_statistic: u,
        p_value: p,
        marker: Marker::from_p(p),
        excluded,
    }
}

/// Aggregates one grid cell and tests it against the baseline cell's runs.
pub fn summarize_cell(
    records: &[RunRecord],
    baseline: Option<&[RunRecord]>,
    metric: Metric,
    insertion_rate: f64,
    deletion_rate: f64,
) -> Result<GridCellSummary> {
    if records.is_empty() {
        return Err(CgpError::Config("no run records to summarize".into()));
    }
    let (vals, excluded) = metric_values(records, metric);
    let base_vals = baseline.map(|base| metric_values(base, metric).0);
    Ok(summarize_values(
        &vals,
        excluded,
        base_vals.as_deref(),
        insertion_rate,
        deletion_rate,
    ))
}
