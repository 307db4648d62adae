//! The coevolutionary generation loop.
//!
//! One generation:
//!
//! 1. draw `u ∈ [0, 1)` and pick inversion or crossover;
//! 2. inversion: `k_inv` successive attempts, each on a uniformly chosen
//!    member with two uniformly chosen positions; crossover: two distinct
//!    random members cut at a random point, both children considered;
//! 3. each candidate is evaluated; a zero residual ends the run, otherwise
//!    it enters the population only if admissible against the attack family
//!    and strictly better than the worst member;
//! 4. duplicated residuals are registered as new attacks;
//! 5. if any attack value is held by two or more members (always the case
//!    right after a new attack), the extra holders are diversified.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coevolution::{
    admissible, detect_attacks, diversify, has_attacked_duplicates, Attack, AttackFamily,
    DefenseLedger,
};
use crate::equation::{Equation, ResidualValue};
use crate::error::{Error, Result};
use crate::genome::{
    permuted_chromosome, random_chromosome, Chromosome, GeneRange, GeneSampling, Individual,
    Population,
};
use crate::operators::{crossover, elitist_replace, invert, OperatorChoice};
use crate::rng::{run_rng, RunRng};

pub const DEFAULT_POPULATION: usize = 5;
pub const DEFAULT_P_INVERSION: f64 = 0.60;
pub const DEFAULT_MAX_GENERATIONS: u64 = 200_000;
pub const DEFAULT_DIVERSIFY_BUDGET: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub equation: Equation,
    pub range: GeneRange,
    pub population_size: usize,
    /// How initial chromosomes are drawn.
    pub sampling: GeneSampling,
    /// Defaults to the range width `b - a`.
    pub chromosome_length: Option<usize>,
    pub p_inversion: f64,
    /// Inversion attempts per inversion generation; defaults to the
    /// chromosome length.
    pub k_inv: Option<usize>,
    pub max_generations: u64,
    pub seed: u64,
    pub literal_operator_rule: bool,
    pub diversify_budget: usize,
}

impl RunConfig {
    pub fn new(equation: Equation, range: GeneRange) -> Self {
        RunConfig {
            equation,
            range,
            population_size: DEFAULT_POPULATION,
            sampling: GeneSampling::Permutation,
            chromosome_length: None,
            p_inversion: DEFAULT_P_INVERSION,
            k_inv: None,
            max_generations: DEFAULT_MAX_GENERATIONS,
            seed: 0,
            literal_operator_rule: false,
            diversify_budget: DEFAULT_DIVERSIFY_BUDGET,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_max_generations(mut self, max_generations: u64) -> Self {
        self.max_generations = max_generations;
        self
    }

    pub fn chromosome_length(&self) -> usize {
        self.chromosome_length
            .unwrap_or_else(|| usize::try_from(self.range.width()).unwrap_or(usize::MAX))
    }

    pub fn k_inv(&self) -> usize {
        self.k_inv.unwrap_or_else(|| self.chromosome_length())
    }

    pub fn p_crossover(&self) -> f64 {
        1.0 - self.p_inversion
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p_inversion) {
            return Err(Error::Config(format!(
                "p_inversion must lie in [0, 1], got {}",
                self.p_inversion
            )));
        }
        if self.population_size < 2 {
            return Err(Error::Config("population size must be at least 2".into()));
        }
        let len = self.chromosome_length();
        if len < self.equation.arity() {
            return Err(Error::Config(format!(
                "chromosome length {len} is shorter than the equation arity {}",
                self.equation.arity()
            )));
        }
        if len < 2 {
            return Err(Error::Config("chromosome length must be at least 2".into()));
        }
        if self.k_inv() == 0 {
            return Err(Error::Config("k_inv must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Solution,
    GenerationBudget,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunStats {
    /// Generation in which a solution appeared; 0 means the initial
    /// population already held one.
    pub generations_to_solution: Option<u64>,
    pub generations_run: u64,
    pub attack_count: usize,
    pub attack_trace: Vec<Attack>,
    pub defense_count: usize,
    /// Duplicated members that diversification could not move.
    pub diversify_exhausted: u64,
    /// The leading `arity` genes of the solving chromosome.
    pub solution: Option<Vec<i64>>,
    pub best_residual: ResidualValue,
    pub evaluations_used: u64,
    pub terminated_by: Termination,
}

/// Hooks into a run, for auditing and tracing. All methods default to no-ops.
pub trait Observer {
    /// Called after every residual computation.
    fn on_evaluation(&mut self, _candidate: &Individual) {}

    /// Called when a candidate enters the population.
    fn on_accept(&mut self, _generation: u64, _accepted: &Individual) {}

    /// Called after each completed generation, including generation 0
    /// (initialization).
    fn on_generation_end(&mut self, _generation: u64, _pop: &Population, _attacks: &AttackFamily) {}
}

pub struct NoopObserver;

impl Observer for NoopObserver {}

/// Runs the solver to a solution or to the generation budget.
pub fn run(config: &RunConfig) -> Result<RunStats> {
    run_with_observer(config, &mut NoopObserver)
}

pub fn run_with_observer(config: &RunConfig, observer: &mut dyn Observer) -> Result<RunStats> {
    config.validate()?;
    Run::new(config, observer)?.execute()
}

/// Runs independent configurations, in parallel, returning results in input
/// order. A failing configuration does not affect the others.
pub fn run_batch(configs: &[RunConfig]) -> Vec<Result<RunStats>> {
    configs.par_iter().map(run).collect()
}

struct Run<'a> {
    config: &'a RunConfig,
    observer: &'a mut dyn Observer,
    rng: RunRng,
    pop: Population,
    attacks: AttackFamily,
    defenses: DefenseLedger,
    evaluations: u64,
    exhausted: u64,
    len: usize,
}

fn evaluate(
    eq: &Equation,
    evaluations: &mut u64,
    observer: &mut dyn Observer,
    chromosome: Chromosome,
) -> Result<Individual> {
    let ind = Individual::evaluate(eq, chromosome)?;
    *evaluations += 1;
    observer.on_evaluation(&ind);
    Ok(ind)
}

impl<'a> Run<'a> {
    fn new(config: &'a RunConfig, observer: &'a mut dyn Observer) -> Result<Self> {
        let len = config.chromosome_length();
        let mut rng = run_rng(config.seed);
        let mut evaluations = 0;
        let mut members = Vec::with_capacity(config.population_size);
        for _ in 0..config.population_size {
            let c = match config.sampling {
                GeneSampling::Permutation => permuted_chromosome(config.range, len, &mut rng)?,
                GeneSampling::Independent => random_chromosome(config.range, len, &mut rng)?,
            };
            members.push(evaluate(&config.equation, &mut evaluations, observer, c)?);
        }
        Ok(Run {
            config,
            observer,
            rng,
            pop: Population::from_members(members),
            attacks: AttackFamily::new(),
            defenses: DefenseLedger::new(),
            evaluations,
            exhausted: 0,
            len,
        })
    }

    fn eval(&mut self, chromosome: Chromosome) -> Result<Individual> {
        evaluate(
            &self.config.equation,
            &mut self.evaluations,
            self.observer,
            chromosome,
        )
    }

    fn execute(mut self) -> Result<RunStats> {
        self.observer.on_generation_end(0, &self.pop, &self.attacks);
        if self.pop.best().residual.is_zero() {
            let solution = self.pop.best().clone();
            return Ok(self.finish(0, Some(solution)));
        }
        for generation in 1..=self.config.max_generations {
            if let Some(solution) = self.generation(generation)? {
                return Ok(self.finish(generation, Some(solution)));
            }
            self.observer
                .on_generation_end(generation, &self.pop, &self.attacks);
        }
        let last = self.config.max_generations;
        Ok(self.finish(last, None))
    }

    /// Offers a nonzero candidate to the population.
    fn offer(&mut self, candidate: Individual, generation: u64) {
        if !admissible(candidate.residual, &self.attacks) {
            return;
        }
        let residual = candidate.residual;
        let accepted = candidate.clone();
        if elitist_replace(&mut self.pop, candidate) {
            self.defenses.record(residual, generation);
            self.observer.on_accept(generation, &accepted);
        }
    }

    /// Returns a solving individual if one turned up.
    fn generation(&mut self, generation: u64) -> Result<Option<Individual>> {
        let size = self.pop.len();
        let u: f64 = self.rng.random();
        match OperatorChoice::from_draw(
            u,
            self.config.p_inversion,
            self.config.literal_operator_rule,
        ) {
            OperatorChoice::Inversion => {
                for _ in 0..self.config.k_inv() {
                    let member = self.rng.random_range(0..size);
                    let i = self.rng.random_range(0..self.len);
                    let j = self.rng.random_range(0..self.len);
                    let child = invert(&self.pop.get(member).chromosome, i, j)?;
                    let child = self.eval(child)?;
                    if child.residual.is_zero() {
                        return Ok(Some(child));
                    }
                    self.offer(child, generation);
                }
            }
            OperatorChoice::Crossover => {
                let first = self.rng.random_range(0..size);
                let mut second = self.rng.random_range(0..size - 1);
                if second >= first {
                    second += 1;
                }
                let point = self.rng.random_range(1..self.len);
                let (c1, c2) = crossover(
                    &self.pop.get(first).chromosome,
                    &self.pop.get(second).chromosome,
                    point,
                )?;
                let c1 = self.eval(c1)?;
                let c2 = self.eval(c2)?;
                for child in [c1, c2] {
                    if child.residual.is_zero() {
                        return Ok(Some(child));
                    }
                    self.offer(child, generation);
                }
            }
        }

        detect_attacks(&self.pop, &mut self.attacks, generation);
        if has_attacked_duplicates(&self.pop, &self.attacks) {
            let eq = &self.config.equation;
            let evaluations = &mut self.evaluations;
            let observer = &mut *self.observer;
            let outcome = diversify(
                &mut self.pop,
                &self.attacks,
                self.config.diversify_budget,
                &mut self.rng,
                |c| evaluate(eq, evaluations, observer, c),
            )?;
            self.exhausted += outcome.exhausted as u64;
            if let Some(solution) = outcome.solution {
                return Ok(Some(solution));
            }
            for ind in &outcome.accepted {
                self.defenses.record(ind.residual, generation);
                self.observer.on_accept(generation, ind);
            }
        }
        Ok(None)
    }

    fn finish(self, generation: u64, solution: Option<Individual>) -> RunStats {
        let arity = self.config.equation.arity();
        let (generations_to_solution, solution, terminated_by, best_residual) = match solution {
            Some(ind) => {
                let genes = ind.chromosome.genes()[..arity].to_vec();
                debug_assert!(self.config.equation.is_solution(&genes));
                (
                    Some(generation),
                    Some(genes),
                    Termination::Solution,
                    ResidualValue::ZERO,
                )
            }
            None => (
                None,
                None,
                Termination::GenerationBudget,
                self.pop.best().residual,
            ),
        };
        RunStats {
            generations_to_solution,
            generations_run: generation,
            attack_count: self.attacks.len(),
            attack_trace: self.attacks.as_slice().to_vec(),
            defense_count: self.defenses.len(),
            diversify_exhausted: self.exhausted,
            solution,
            best_residual,
            evaluations_used: self.evaluations,
            terminated_by,
        }
    }
}
