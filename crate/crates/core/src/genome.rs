//! Gene ranges, chromosomes and the sorted elite population.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::equation::{Equation, ResidualValue};
use crate::error::{Error, Result};

/// Admissible gene values `{lower_exclusive + 1, ..., upper_inclusive}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GeneRange {
    lower_exclusive: i64,
    upper_inclusive: i64,
}

impl GeneRange {
    pub fn new(lower_exclusive: i64, upper_inclusive: i64) -> Result<Self> {
        if upper_inclusive <= lower_exclusive {
            return Err(Error::EmptyRange {
                lower_exclusive,
                upper_inclusive,
            });
        }
        Ok(GeneRange {
            lower_exclusive,
            upper_inclusive,
        })
    }

    /// Inclusive bounds `first..=last`, as written on the command line.
    pub fn inclusive(first: i64, last: i64) -> Result<Self> {
        let lower = first.checked_sub(1).ok_or(Error::EmptyRange {
            lower_exclusive: first,
            upper_inclusive: last,
        })?;
        GeneRange::new(lower, last)
    }

    pub fn lower_exclusive(&self) -> i64 {
        self.lower_exclusive
    }

    pub fn upper_inclusive(&self) -> i64 {
        self.upper_inclusive
    }

    pub fn first(&self) -> i64 {
        self.lower_exclusive + 1
    }

    /// Number of admissible values, `b - a`.
    pub fn width(&self) -> u64 {
        self.upper_inclusive.abs_diff(self.lower_exclusive)
    }

    pub fn contains(&self, value: i64) -> bool {
        value > self.lower_exclusive && value <= self.upper_inclusive
    }

    pub fn values(&self) -> std::ops::RangeInclusive<i64> {
        self.first()..=self.upper_inclusive
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> i64 {
        rng.random_range(self.first()..=self.upper_inclusive)
    }
}

impl fmt::Display for GeneRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.first(), self.upper_inclusive)
    }
}

/// Parses `A..B` as the inclusive value range `A..=B`.
impl FromStr for GeneRange {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("range must look like A..B, got '{s}'"));
        let (lo, hi) = s.split_once("..").ok_or_else(bad)?;
        let hi = hi.strip_prefix('=').unwrap_or(hi);
        let lo: i64 = lo.trim().parse().map_err(|_| bad())?;
        let hi: i64 = hi.trim().parse().map_err(|_| bad())?;
        GeneRange::inclusive(lo, hi)
    }
}

/// Fixed-length tuple of genes. Only the leading `arity` genes are
/// substituted into an equation; the rest ride along as a reservoir.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Chromosome(Vec<i64>);

impl Chromosome {
    pub fn new(genes: Vec<i64>) -> Self {
        Chromosome(genes)
    }

    pub fn genes(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_genes(self) -> Vec<i64> {
        self.0
    }

    pub(crate) fn genes_mut(&mut self) -> &mut [i64] {
        &mut self.0
    }
}

impl From<Vec<i64>> for Chromosome {
    fn from(genes: Vec<i64>) -> Self {
        Chromosome(genes)
    }
}

/// Draws `length` genes independently and uniformly from `range`.
pub fn random_chromosome<R: Rng + ?Sized>(
    range: GeneRange,
    length: usize,
    rng: &mut R,
) -> Result<Chromosome> {
    if length == 0 {
        return Err(Error::Config("chromosome length must be at least 1".into()));
    }
    Ok(Chromosome((0..length).map(|_| range.sample(rng)).collect()))
}

/// How initial chromosomes are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneSampling {
    /// Distinct values: a random arrangement of the range, truncated to the
    /// chromosome length. With the default length `b - a` every chromosome
    /// holds each admissible value exactly once.
    #[default]
    Permutation,
    /// Every gene drawn independently, duplicates allowed.
    Independent,
}

/// Draws `length` distinct genes from `range` in random order. Lengths past
/// the range width are filled with further independent arrangements.
pub fn permuted_chromosome<R: Rng + ?Sized>(
    range: GeneRange,
    length: usize,
    rng: &mut R,
) -> Result<Chromosome> {
    if length == 0 {
        return Err(Error::Config("chromosome length must be at least 1".into()));
    }
    let width = usize::try_from(range.width()).unwrap_or(usize::MAX);
    let mut genes = Vec::with_capacity(length);
    while genes.len() < length {
        let take = (length - genes.len()).min(width);
        genes.extend(
            rand::seq::index::sample(rng, width, take)
                .into_iter()
                .map(|k| range.first() + k as i64),
        );
    }
    Ok(Chromosome(genes))
}

/// A chromosome with its cached residual.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Individual {
    pub chromosome: Chromosome,
    pub residual: ResidualValue,
}

impl Individual {
    pub fn evaluate(eq: &Equation, chromosome: Chromosome) -> Result<Self> {
        let residual = eq.residual(chromosome.genes())?;
        Ok(Individual {
            chromosome,
            residual,
        })
    }
}

/// Fixed-size population kept sorted by residual, best first.
/// Equal residuals keep their insertion order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Population {
    members: Vec<Individual>,
}

impl Population {
    pub fn from_members(mut members: Vec<Individual>) -> Self {
        members.sort_by_key(|m| m.residual);
        Population { members }
    }

    pub fn members(&self) -> &[Individual] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn best(&self) -> &Individual {
        &self.members[0]
    }

    pub fn worst(&self) -> &Individual {
        &self.members[self.members.len() - 1]
    }

    pub fn get(&self, index: usize) -> &Individual {
        &self.members[index]
    }

    pub fn is_sorted(&self) -> bool {
        self.members
            .windows(2)
            .all(|w| w[0].residual <= w[1].residual)
    }

    pub fn residuals(&self) -> impl Iterator<Item = ResidualValue> + '_ {
        self.members.iter().map(|m| m.residual)
    }

    /// Evicts the worst member and inserts `candidate` after any members
    /// with an equal residual.
    pub(crate) fn replace_worst(&mut self, candidate: Individual) {
        self.members.pop();
        self.insert_sorted(candidate);
    }

    fn insert_sorted(&mut self, candidate: Individual) {
        let at = self
            .members
            .partition_point(|m| m.residual <= candidate.residual);
        self.members.insert(at, candidate);
    }
}

/// Draws `size` random chromosomes, evaluates them and sorts by residual.
pub fn init_population<R: Rng + ?Sized>(
    eq: &Equation,
    range: GeneRange,
    size: usize,
    length: usize,
    rng: &mut R,
) -> Result<Population> {
    if size < 2 {
        return Err(Error::Config("population size must be at least 2".into()));
    }
    if length < eq.arity() {
        return Err(Error::Config(format!(
            "chromosome length {length} is shorter than the equation arity {}",
            eq.arity()
        )));
    }
    let members = (0..size)
        .map(|_| Individual::evaluate(eq, random_chromosome(range, length, rng)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(Population::from_members(members))
}
