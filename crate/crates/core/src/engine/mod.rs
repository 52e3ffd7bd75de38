//! The generational loop.
//!
//! A population of random trees is scored by class separability, then
//! replaced each generation by children bred from tournament winners. The
//! best individual ever scored is kept aside and returned at the end; it is
//! not reinserted into the population.
//!
//! All randomness comes from one ChaCha stream seeded by [`GPConfig::seed`],
//! and scoring consumes none of it, so a run is a pure function of its
//! config and data.

use alloc::vec::Vec;

use rand::Rng;

use crate::dataset::{DatasetError, PixelDataset};
use crate::expr::{random_tree, ExprTree, InitMethod};
use crate::seeded_rng;

mod fitness;
mod variation;

pub use fitness::{fitness, separability, FitnessContext, FITNESS_CAP};
pub use variation::{crossover, crossover_at, mutate, tournament_select};

/// A tree and, once scored, its fitness.
#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub tree: ExprTree,
    pub fitness: Option<f64>,
}

impl Individual {
    pub fn new(tree: ExprTree) -> Self {
        Individual {
            tree,
            fitness: None,
        }
    }

    pub fn evaluated(tree: ExprTree, fitness: f64) -> Self {
        Individual {
            tree,
            fitness: Some(fitness),
        }
    }

    /// Fitness for ranking; unscored individuals rank below everything.
    pub fn score(&self) -> f64 {
        self.fitness.unwrap_or(f64::NEG_INFINITY)
    }
}

/// How mutation enters breeding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MutationMode {
    /// Parents pair up and cross over with `p_crossover`, otherwise they are
    /// copied; every child then mutates with `p_mutation`.
    Offspring,
    /// Each breeding step picks exactly one of crossover (`p_crossover`),
    /// mutation (`p_mutation`) or replication (the remaining mass).
    Exclusive,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("`{0}` must be at least 1")]
    TooSmall(&'static str),
    #[error("probability `{name}` = {value} is outside [0, 1]")]
    Probability { name: &'static str, value: f64 },
    #[error("operator probabilities sum to {0}, more than 1")]
    RatesExceedOne(f64),
    #[error("max_initial_depth {initial} exceeds max_tree_depth {cap}")]
    InitialDepthAboveCap { initial: usize, cap: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GPConfig {
    pub population_size: usize,
    pub generations: usize,
    pub max_initial_depth: usize,
    pub max_tree_depth: usize,
    pub tournament_k: usize,
    pub p_crossover: f64,
    pub p_mutation: f64,
    pub p_replication: f64,
    pub mutation_subtree_max_depth: usize,
    pub mutation_mode: MutationMode,
    pub seed: u64,
}

impl Default for GPConfig {
    fn default() -> Self {
        GPConfig {
            population_size: 100,
            generations: 200,
            max_initial_depth: 6,
            max_tree_depth: 17,
            tournament_k: 3,
            p_crossover: 0.9,
            p_mutation: 0.1,
            p_replication: 0.0,
            mutation_subtree_max_depth: 4,
            mutation_mode: MutationMode::Offspring,
            seed: 0,
        }
    }
}

impl GPConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        for (name, v) in [
            ("population_size", self.population_size),
            ("max_initial_depth", self.max_initial_depth),
            ("max_tree_depth", self.max_tree_depth),
            ("tournament_k", self.tournament_k),
            (
                "mutation_subtree_max_depth",
                self.mutation_subtree_max_depth,
            ),
        ] {
            if v == 0 {
                return Err(ConfigError::TooSmall(name));
            }
        }
        for (name, value) in [
            ("p_crossover", self.p_crossover),
            ("p_mutation", self.p_mutation),
            ("p_replication", self.p_replication),
        ] {
            if !(0.0..=1.0).contains(&value) {
                return Err(ConfigError::Probability { name, value });
            }
        }
        let branch_mass = match self.mutation_mode {
            MutationMode::Offspring => self.p_crossover + self.p_replication,
            MutationMode::Exclusive => self.p_crossover + self.p_mutation + self.p_replication,
        };
        if branch_mass > 1.0 + 1e-12 {
            return Err(ConfigError::RatesExceedOne(branch_mass));
        }
        if self.max_initial_depth > self.max_tree_depth {
            return Err(ConfigError::InitialDepthAboveCap {
                initial: self.max_initial_depth,
                cap: self.max_tree_depth,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EngineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
}

/// Summary of one completed generation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenerationRecord {
    /// 1-based generation number.
    pub generation: usize,
    pub best_so_far: f64,
    pub generation_best: f64,
    pub mean_fitness: f64,
    pub mean_size: f64,
}

/// Receives a record after every generation.
pub trait ProgressSink {
    fn record(&mut self, record: &GenerationRecord);
}

impl ProgressSink for () {
    fn record(&mut self, _: &GenerationRecord) {}
}

impl<F: FnMut(&GenerationRecord)> ProgressSink for F {
    fn record(&mut self, record: &GenerationRecord) {
        self(record)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionResult {
    /// Best individual seen in any generation, including the initial one.
    pub best: Individual,
    /// One record per generation; empty when `generations == 0`.
    pub history: Vec<GenerationRecord>,
    /// The population after the last generation, all scored.
    pub final_population: Vec<Individual>,
}

/// Ramped half-and-half: depths cycle through `2..=max_depth`, alternating
/// full and grow trees.
pub fn ramped_half_and_half<R: Rng + ?Sized>(
    rng: &mut R,
    arity: usize,
    size: usize,
    max_depth: usize,
) -> Vec<ExprTree> {
    let depths: Vec<usize> = if max_depth >= 2 {
        (2..=max_depth).collect()
    } else {
        alloc::vec![max_depth]
    };
    (0..size)
        .map(|i| {
            let depth = depths[(i / 2) % depths.len()];
            let method = if i % 2 == 0 {
                InitMethod::Full
            } else {
                InitMethod::Grow
            };
            random_tree(rng, arity, depth, method)
        })
        .collect()
}

fn score_all(
    ctx: &mut FitnessContext,
    trees: Vec<ExprTree>,
) -> Result<Vec<Individual>, DatasetError> {
    trees
        .into_iter()
        .map(|t| {
            let f = ctx.score(&t)?;
            Ok(Individual::evaluated(t, f))
        })
        .collect()
}

fn best_of(pop: &[Individual]) -> &Individual {
    let mut best = &pop[0];
    for ind in &pop[1..] {
        if ind.score() > best.score() {
            best = ind;
        }
    }
    best
}

fn breed<R: Rng + ?Sized>(
    rng: &mut R,
    cfg: &GPConfig,
    arity: usize,
    pop: &[Individual],
) -> Vec<ExprTree> {
    let n = cfg.population_size;
    let mut children = Vec::with_capacity(n + 1);
    let mutate = |rng: &mut R, t: &ExprTree| {
        mutate(
            rng,
            t,
            arity,
            cfg.mutation_subtree_max_depth,
            cfg.max_tree_depth,
        )
    };
    while children.len() < n {
        let r: f64 = rng.gen();
        match cfg.mutation_mode {
            MutationMode::Offspring => {
                let p1 = &tournament_select(rng, pop, cfg.tournament_k).tree;
                let p2 = &tournament_select(rng, pop, cfg.tournament_k).tree;
                let (c1, c2) = if r < cfg.p_crossover {
                    crossover(rng, p1, p2, cfg.max_tree_depth)
                } else {
                    (p1.clone(), p2.clone())
                };
                for child in [c1, c2] {
                    let child = if rng.gen::<f64>() < cfg.p_mutation {
                        mutate(rng, &child)
                    } else {
                        child
                    };
                    children.push(child);
                }
            }
            MutationMode::Exclusive => {
                if r < cfg.p_crossover {
                    let p1 = &tournament_select(rng, pop, cfg.tournament_k).tree;
                    let p2 = &tournament_select(rng, pop, cfg.tournament_k).tree;
                    let (c1, c2) = crossover(rng, p1, p2, cfg.max_tree_depth);
                    children.push(c1);
                    children.push(c2);
                } else if r < cfg.p_crossover + cfg.p_mutation {
                    let p = &tournament_select(rng, pop, cfg.tournament_k).tree;
                    children.push(mutate(rng, p));
                } else {
                    children.push(tournament_select(rng, pop, cfg.tournament_k).tree.clone());
                }
            }
        }
    }
    children.truncate(n);
    children
}

fn record_for(generation: usize, best: &Individual, pop: &[Individual]) -> GenerationRecord {
    let n = pop.len() as f64;
    GenerationRecord {
        generation,
        best_so_far: best.score(),
        generation_best: best_of(pop).score(),
        mean_fitness: pop.iter().map(Individual::score).sum::<f64>() / n,
        mean_size: pop.iter().map(|i| i.tree.node_count() as f64).sum::<f64>() / n,
    }
}

/// Runs the full evolution on `data` and returns the best index found.
pub fn evolve(
    config: &GPConfig,
    data: &PixelDataset,
    sink: &mut dyn ProgressSink,
) -> Result<EvolutionResult, EngineError> {
    config.validate()?;
    let mut ctx = FitnessContext::new(data)?;
    let arity = data.schema().arity();
    let mut rng = seeded_rng(config.seed);

    let initial = ramped_half_and_half(
        &mut rng,
        arity,
        config.population_size,
        config.max_initial_depth,
    );
    let mut population = score_all(&mut ctx, initial)?;
    let mut best = best_of(&population).clone();
    let mut history = Vec::with_capacity(config.generations);

    for generation in 1..=config.generations {
        let children = breed(&mut rng, config, arity, &population);
        population = score_all(&mut ctx, children)?;
        let gen_best = best_of(&population);
        if gen_best.score() > best.score() {
            best = gen_best.clone();
        }
        let record = record_for(generation, &best, &population);
        sink.record(&record);
        history.push(record);
    }

    Ok(EvolutionResult {
        best,
        history,
        final_population: population,
    })
}
