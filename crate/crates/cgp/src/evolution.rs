use crate::error::{CgpError, Result};
use crate::genotype::{random_genotype, Genotype};
use crate::mutation::{breed_offspring, MutationParams};
use crate::problems::Problem;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionParams {
    pub lambda: usize,
    /// Run terminates successfully once best fitness <= target (minimization).
    pub target_fitness: f64,
    /// Fitness-evaluation budget; 0 means unbounded.
    pub max_evaluations: usize,
    /// Generation safety cap; 0 means unbounded.
    pub max_generations: usize,
    pub mutation: MutationParams,
}

impl EvolutionParams {
    pub fn validate(&self) -> Result<()> {
        if self.lambda < 1 {
            return Err(CgpError::Config("lambda must be >= 1".into()));
        }
        if self.max_evaluations == 0 && self.max_generations == 0 {
            return Err(CgpError::Config(
                "at least one of max_evaluations/max_generations must be bounded".into(),
            ));
        }
        self.mutation.validate()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub genotype: Genotype,
    pub fitness: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub seed: u64,
    pub generations: usize,
    pub evaluations: usize,
    pub best_fitness: f64,
    pub success: bool,
    pub best_genotype: Genotype,
}

/// Neutral-drift replacement: any offspring whose fitness is less than or
/// equal to the parent's may become the new parent, and offspring are
/// preferred over the incumbent so that plateaus keep moving. Ties among
/// equally best offspring break uniformly at random.
pub fn replace_parent(
    parent: Individual,
    offspring: Vec<Individual>,
    rng: &mut impl Rng,
) -> Individual {
    let best = offspring
        .iter()
        .map(|o| o.fitness)
        .fold(f64::INFINITY, f64::min);
    if best > parent.fitness {
        return parent;
    }
    let winners: Vec<Individual> = offspring
        .into_iter()
        .filter(|o| o.fitness == best)
        .collect();
    let k = rng.gen_range(0..winners.len());
    winners.into_iter().nth(k).unwrap()
}

/// The (1+lambda) evolutionary loop. Fitness is minimized. Deterministic for
/// a given seed.
pub fn run(problem: &Problem, params: &EvolutionParams, seed: u64) -> Result<RunRecord> {
    params.validate()?;
    problem.check_compatible(params)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let genotype = random_genotype(problem.geometry(), problem.function_set(), &mut rng);
    let fitness = problem.evaluate(&genotype)?;
    let mut parent = Individual { genotype, fitness };
    let mut evaluations = 1usize;
    let mut generations = 0usize;

    let record = |parent: &Individual, generations, evaluations| RunRecord {
        seed,
        generations,
        evaluations,
        best_fitness: parent.fitness,
        success: parent.fitness <= params.target_fitness,
        best_genotype: parent.genotype.clone(),
    };

    if parent.fitness <= params.target_fitness {
        return Ok(record(&parent, generations, evaluations));
    }

    loop {
        if params.max_evaluations > 0 && evaluations + params.lambda > params.max_evaluations {
            break;
        }
        if params.max_generations > 0 && generations >= params.max_generations {
            break;
        }
        let offspring: Vec<Individual> = (0..params.lambda)
            .map(|_| {
                let genotype = breed_offspring(
                    &parent.genotype,
                    problem.function_set(),
                    &params.mutation,
                    &mut rng,
                );
                let fitness = problem.evaluate(&genotype)?;
                Ok(Individual { genotype, fitness })
            })
            .collect::<Result<_>>()?;
        evaluations += params.lambda;
        generations += 1;

        if offspring
            .iter()
            .any(|o| o.fitness <= params.target_fitness)
        {
            let best = offspring
                .into_iter()
                .min_by(|a, b| a.fitness.total_cmp(&b.fitness))
                .unwrap();
            return Ok(record(&best, generations, evaluations));
        }
        parent = replace_parent(parent, offspring, &mut rng);
    }
    Ok(record(&parent, generations, evaluations))
}
