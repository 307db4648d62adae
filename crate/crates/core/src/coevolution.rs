//! Parasite attacks and host defenses.
//!
//! A residual value shared by two or more population members marks a
//! plateau. Such values are registered as attacks and stay registered for
//! the rest of the run; no later candidate whose residual equals an attack
//! may enter the population. Residuals of accepted candidates form the
//! host's defense ledger.

use std::collections::{HashMap, HashSet};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::equation::ResidualValue;
use crate::error::Result;
use crate::genome::{Chromosome, Individual, Population};
use crate::operators::{crossover, invert};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Attack {
    pub generation: u64,
    pub value: ResidualValue,
}

/// Insertion-ordered set of attack values.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AttackFamily {
    attacks: Vec<Attack>,
    index: HashSet<ResidualValue>,
}

impl AttackFamily {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.attacks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.attacks.is_empty()
    }

    pub fn contains(&self, value: ResidualValue) -> bool {
        self.index.contains(&value)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Attack> {
        self.attacks.iter()
    }

    pub fn values(&self) -> impl Iterator<Item = ResidualValue> + '_ {
        self.attacks.iter().map(|a| a.value)
    }

    pub fn as_slice(&self) -> &[Attack] {
        &self.attacks
    }

    /// Registers `value`; zero and already-known values are ignored.
    pub fn register(&mut self, value: ResidualValue, generation: u64) -> bool {
        if value.is_zero() || !self.index.insert(value) {
            return false;
        }
        self.attacks.push(Attack { generation, value });
        true
    }
}

impl FromIterator<ResidualValue> for AttackFamily {
    fn from_iter<I: IntoIterator<Item = ResidualValue>>(iter: I) -> Self {
        let mut family = AttackFamily::new();
        for v in iter {
            family.register(v, 0);
        }
        family
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Defense {
    pub generation: u64,
    pub value: ResidualValue,
}

/// Append-only record of residuals of accepted candidates.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DefenseLedger {
    defenses: Vec<Defense>,
}

impl DefenseLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, value: ResidualValue, generation: u64) {
        self.defenses.push(Defense { generation, value });
    }

    pub fn len(&self) -> usize {
        self.defenses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.defenses.is_empty()
    }

    pub fn as_slice(&self) -> &[Defense] {
        &self.defenses
    }
}

/// A candidate may join the population only if its residual differs from
/// every registered attack, i.e. `∏ (r − a) ≠ 0`. A zero residual is a
/// solution and always admissible.
pub fn admissible(residual: ResidualValue, attacks: &AttackFamily) -> bool {
    residual.is_zero() || !attacks.contains(residual)
}

/// Registers every nonzero residual held by two or more members that is not
/// yet an attack. Returns how many new attacks were added.
pub fn detect_attacks(pop: &Population, attacks: &mut AttackFamily, generation: u64) -> usize {
    let mut counts: HashMap<ResidualValue, usize> = HashMap::new();
    for r in pop.residuals() {
        *counts.entry(r).or_default() += 1;
    }
    // Walk in population order so registration order is deterministic.
    let mut added = 0;
    for r in pop.residuals() {
        if counts[&r] >= 2 && attacks.register(r, generation) {
            added += 1;
        }
    }
    added
}

/// True when some registered attack value is held by two or more members,
/// which is when [`diversify`] has work to do.
pub fn has_attacked_duplicates(pop: &Population, attacks: &AttackFamily) -> bool {
    // sorted, so equal residuals are adjacent
    pop.members()
        .windows(2)
        .any(|w| w[0].residual == w[1].residual && attacks.contains(w[0].residual))
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DiversifyOutcome {
    /// Members swapped in.
    pub accepted: Vec<Individual>,
    /// Members left in place after exhausting the budget.
    pub exhausted: usize,
    /// A zero-residual candidate met along the way; the population is left
    /// as it was when it was found.
    pub solution: Option<Individual>,
}

/// Pushes duplicated members off attacked plateaus.
///
/// For every attack value held by two or more members, all holders but the
/// first are perturbed: up to `budget - 1` successive inversions on a working
/// copy, then one crossover of the working copy with a random other member.
/// A perturbed candidate replaces the
/// holder when it is admissible, strictly better than the holder, and its
/// residual is not held by any other member. `evaluate` must compute the
/// residual (and may count evaluations).
pub fn diversify<R, F>(
    pop: &mut Population,
    attacks: &AttackFamily,
    budget: usize,
    rng: &mut R,
    mut evaluate: F,
) -> Result<DiversifyOutcome>
where
    R: Rng + ?Sized,
    F: FnMut(Chromosome) -> Result<Individual>,
{
    let mut outcome = DiversifyOutcome::default();
    if pop.len() < 2 {
        return Ok(outcome);
    }
    let mut members = pop.members().to_vec();
    let len = members[0].chromosome.len();

    for attack in attacks.values() {
        let holders: Vec<usize> = (0..members.len())
            .filter(|&i| members[i].residual == attack)
            .collect();
        for &h in holders.iter().skip(1) {
            let mut working = members[h].chromosome.clone();
            let mut replaced = false;
            for attempt in 0..budget {
                let crossover_turn = len >= 2 && attempt + 1 == budget;
                let candidates = if crossover_turn {
                    let partner = loop {
                        let p = rng.random_range(0..members.len());
                        if p != h {
                            break p;
                        }
                    };
                    let point = rng.random_range(1..len);
                    let (c1, c2) = crossover(&working, &members[partner].chromosome, point)?;
                    working = c1.clone();
                    vec![c1, c2]
                } else {
                    let i = rng.random_range(0..len);
                    let j = rng.random_range(0..len);
                    working = invert(&working, i, j)?;
                    vec![working.clone()]
                };
                for cand in candidates {
                    let ind = evaluate(cand)?;
                    if ind.residual.is_zero() {
                        outcome.solution = Some(ind);
                        *pop = Population::from_members(members);
                        return Ok(outcome);
                    }
                    let fits = admissible(ind.residual, attacks)
                        && ind.residual < members[h].residual
                        && members
                            .iter()
                            .enumerate()
                            .all(|(k, m)| k == h || m.residual != ind.residual);
                    if fits {
                        outcome.accepted.push(ind.clone());
                        members[h] = ind;
                        replaced = true;
                        break;
                    }
                }
                if replaced {
                    break;
                }
            }
            if !replaced {
                outcome.exhausted += 1;
            }
        }
    }
    *pop = Population::from_members(members);
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equation::Equation;
    use crate::genome::GeneRange;
    use crate::rng::run_rng;

    fn rv(v: u128) -> ResidualValue {
        ResidualValue::new(v)
    }

    fn family(values: &[u128]) -> AttackFamily {
        values.iter().map(|&v| rv(v)).collect()
    }

    fn pop_of(residuals: &[u128]) -> Population {
        Population::from_members(
            residuals
                .iter()
                .enumerate()
                .map(|(i, &r)| Individual {
                    chromosome: Chromosome::new(vec![i as i64]),
                    residual: rv(r),
                })
                .collect(),
        )
    }

    #[test]
    fn admissible_examples() {
        let attacks = family(&[4, 36, 21, 53]);
        assert!(!admissible(rv(36), &attacks));
        assert!(admissible(rv(35), &attacks));
        assert!(admissible(rv(0), &attacks));
        assert!(admissible(rv(7), &AttackFamily::new()));
    }

    #[test]
    fn family_rejects_zero_and_duplicates() {
        let mut f = AttackFamily::new();
        assert!(!f.register(rv(0), 1));
        assert!(f.register(rv(5), 1));
        assert!(!f.register(rv(5), 2));
        assert_eq!(f.len(), 1);
        assert_eq!(
            f.as_slice()[0],
            Attack {
                generation: 1,
                value: rv(5)
            }
        );
    }

    #[test]
    fn attacked_duplicates() {
        assert!(has_attacked_duplicates(
            &pop_of(&[3, 5, 5, 9]),
            &family(&[5])
        ));
        assert!(!has_attacked_duplicates(
            &pop_of(&[3, 5, 5, 9]),
            &family(&[3, 9])
        ));
        assert!(!has_attacked_duplicates(
            &pop_of(&[3, 5, 7, 9]),
            &family(&[3, 5, 7])
        ));
    }

    #[test]
    fn detect_examples() {
        let mut f = AttackFamily::new();
        assert_eq!(detect_attacks(&pop_of(&[5, 5, 12, 40, 40]), &mut f, 3), 2);
        assert_eq!(f.values().collect::<Vec<_>>(), [rv(5), rv(40)]);
        assert!(f.iter().all(|a| a.generation == 3));

        let mut f = AttackFamily::new();
        assert_eq!(detect_attacks(&pop_of(&[1, 2, 3, 4, 5]), &mut f, 1), 0);
        assert!(f.is_empty());

        let mut f = family(&[7]);
        assert_eq!(detect_attacks(&pop_of(&[7, 7]), &mut f, 9), 0);
        assert_eq!(f.len(), 1);

        let mut f = AttackFamily::new();
        assert_eq!(detect_attacks(&pop_of(&[0, 0, 3]), &mut f, 1), 0);
    }

    /// Every multiset of 5 residuals over {0..3}: the registered values are
    /// exactly the nonzero values occurring at least twice.
    #[test]
    fn detect_exhaustive_small_multisets() {
        for code in 0..4u32.pow(5) {
            let residuals: Vec<u128> = (0..5)
                .map(|k| u128::from((code / 4u32.pow(k)) % 4))
                .collect();
            let mut f = AttackFamily::new();
            detect_attacks(&pop_of(&residuals), &mut f, 0);
            let mut expect: Vec<u128> = (1..4)
                .filter(|v| residuals.iter().filter(|&&r| r == *v).count() >= 2)
                .collect();
            let mut got: Vec<u128> = f.values().map(|v| v.get()).collect();
            expect.sort();
            got.sort();
            assert_eq!(got, expect, "{residuals:?}");
        }
    }

    fn run_diversify(
        eq: &Equation,
        chromosomes: Vec<Vec<i64>>,
        attacks: &AttackFamily,
        seed: u64,
    ) -> (Population, DiversifyOutcome) {
        let members = chromosomes
            .into_iter()
            .map(|g| Individual::evaluate(eq, Chromosome::new(g)).unwrap())
            .collect();
        let mut pop = Population::from_members(members);
        let outcome = diversify(&mut pop, attacks, 20, &mut run_rng(seed), |c| {
            Individual::evaluate(eq, c)
        })
        .unwrap();
        (pop, outcome)
    }

    #[test]
    fn diversify_breaks_duplicate_or_reports_exhaustion() {
        let eq: Equation = "x1^2 + x2^2 = 149".parse().unwrap();
        let range = GeneRange::new(0, 25).unwrap();
        for seed in 0..50 {
            // Two members with residual 149 - (1 + 4) = 144.
            let dup = vec![1, 2, 9, 3, 14, 20, 6, 25];
            let chromosomes = vec![
                vec![7, 9, 1, 1, 1, 1, 1, 1],
                dup.clone(),
                dup.clone(),
                vec![3, 3, 3, 3, 3, 3, 3, 3],
                vec![2, 2, 5, 5, 5, 5, 5, 5],
            ];
            let attacks = family(&[144]);
            let (pop, outcome) = run_diversify(&eq, chromosomes, &attacks, seed);
            assert_eq!(pop.len(), 5);
            assert!(pop.is_sorted());
            if outcome.solution.is_none() {
                let holders = pop.residuals().filter(|r| r.get() == 144).count();
                assert!(holders <= 1 || outcome.exhausted > 0);
                assert_eq!(holders + outcome.accepted.len(), 2);
            }
            for m in pop.members() {
                assert_eq!(m.residual, eq.residual(m.chromosome.genes()).unwrap());
                assert!(m.chromosome.genes().iter().all(|&g| range.contains(g)));
            }
            for ind in &outcome.accepted {
                assert!(admissible(ind.residual, &attacks));
                assert!(ind.residual.get() < 144);
            }
        }
    }

    #[test]
    fn diversify_noop_without_duplicates() {
        let eq: Equation = "x1 + x2 = 100".parse().unwrap();
        let chromosomes = vec![vec![1, 2, 3], vec![4, 5, 6], vec![7, 8, 9]];
        let attacks = family(&[97, 3]);
        let members: Vec<Individual> = chromosomes
            .iter()
            .map(|g| Individual::evaluate(&eq, Chromosome::new(g.clone())).unwrap())
            .collect();
        let before = Population::from_members(members);
        let (pop, outcome) = run_diversify(&eq, chromosomes, &attacks, 1);
        assert_eq!(pop, before);
        assert_eq!(outcome, DiversifyOutcome::default());
    }

    #[test]
    fn diversify_reports_solution() {
        // Both duplicates hold 149 - 100 - 4 = 45; the only improving swap
        // (positions 1 and 2) yields the solution (10, 7).
        let eq: Equation = "x1^2 + x2^2 = 149".parse().unwrap();
        let dup = vec![10, 2, 7, 1];
        let found = (0..200).any(|seed| {
            let (_, outcome) = run_diversify(
                &eq,
                vec![vec![1, 1, 1, 1], dup.clone(), dup.clone()],
                &family(&[45]),
                seed,
            );
            outcome
                .solution
                .is_some_and(|s| eq.is_solution(s.chromosome.genes()))
        });
        assert!(found);
    }
}
