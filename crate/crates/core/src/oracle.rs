//! Exhaustive enumeration of solutions inside a gene range.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::equation::Equation;
use crate::error::{Error, Result};
use crate::genome::GeneRange;

pub const DEFAULT_BUDGET: u128 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionSet {
    pub solutions: BTreeSet<Vec<i64>>,
    pub exhaustive: bool,
}

impl SolutionSet {
    pub fn contains(&self, values: &[i64]) -> bool {
        self.solutions.contains(values)
    }

    pub fn len(&self) -> usize {
        self.solutions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.solutions.is_empty()
    }
}

/// Size of `range^arity`, or `None` past `u128`.
pub fn search_space(eq: &Equation, range: GeneRange) -> Option<u128> {
    u128::from(range.width()).checked_pow(u32::try_from(eq.arity()).ok()?)
}

/// Every tuple in `range^arity` that solves `eq`.
///
/// Fails when the search space exceeds `budget`. With all coefficients
/// positive and a non-negative range, each variable's contribution grows
/// with its value, so a coordinate loop stops as soon as the partial sum
/// plus the smallest possible remainder overshoots the target.
pub fn enumerate(eq: &Equation, range: GeneRange, budget: u128) -> Result<SolutionSet> {
    let size = search_space(eq, range).unwrap_or(u128::MAX);
    if size > budget {
        return Err(Error::BudgetExceeded { size, budget });
    }
    let values: Vec<i64> = range.values().collect();
    // contributions[v][k]: sum of the terms on variable v+1 at values[k]
    let mut contributions = vec![vec![0i128; values.len()]; eq.arity()];
    for term in eq.terms() {
        for (k, &x) in values.iter().enumerate() {
            let c = i128::from(x)
                .checked_pow(term.power)
                .and_then(|p| p.checked_mul(i128::from(term.coefficient)))
                .ok_or(Error::Overflow)?;
            let slot = &mut contributions[term.variable - 1][k];
            *slot = slot.checked_add(c).ok_or(Error::Overflow)?;
        }
    }
    let prune = eq.all_coefficients_positive() && range.first() >= 0;
    // min_rest[v]: smallest total the variables v.. can add
    let mut min_rest = vec![0i128; eq.arity() + 1];
    for v in (0..eq.arity()).rev() {
        let least = contributions[v].iter().copied().min().unwrap_or(0);
        min_rest[v] = min_rest[v + 1].saturating_add(least);
    }

    let search = Search {
        values: &values,
        contributions: &contributions,
        min_rest: &min_rest,
        target: i128::from(eq.target()),
        prune,
    };
    let mut solutions = BTreeSet::new();
    let mut tuple = Vec::with_capacity(eq.arity());
    search.descend(0, 0, &mut tuple, &mut solutions)?;
    debug_assert!(solutions.iter().all(|s| eq.is_solution(s)));
    Ok(SolutionSet {
        solutions,
        exhaustive: true,
    })
}

struct Search<'a> {
    values: &'a [i64],
    contributions: &'a [Vec<i128>],
    min_rest: &'a [i128],
    target: i128,
    prune: bool,
}

impl Search<'_> {
    fn descend(
        &self,
        var: usize,
        partial: i128,
        tuple: &mut Vec<i64>,
        out: &mut BTreeSet<Vec<i64>>,
    ) -> Result<()> {
        if var == self.contributions.len() {
            if partial == self.target {
                out.insert(tuple.clone());
            }
            return Ok(());
        }
        for (k, &x) in self.values.iter().enumerate() {
            let sum = partial
                .checked_add(self.contributions[var][k])
                .ok_or(Error::Overflow)?;
            if self.prune && sum.saturating_add(self.min_rest[var + 1]) > self.target {
                break;
            }
            tuple.push(x);
            self.descend(var + 1, sum, tuple, out)?;
            tuple.pop();
        }
        Ok(())
    }
}
