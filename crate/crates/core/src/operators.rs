//! Variation operators and elitist replacement.
//!
//! Positions are 0-based indices into the chromosome.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::genome::{Chromosome, Individual, Population};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OperatorChoice {
    Inversion,
    Crossover,
}

impl OperatorChoice {
    /// Picks the operator for a uniform draw `u ∈ [0, 1)`.
    ///
    /// By default inversion is chosen when `u < p_inversion`, so that
    /// `p_inversion` is the probability of inversion. With `literal` set the
    /// comparison is flipped: inversion when `u > p_inversion`.
    pub fn from_draw(u: f64, p_inversion: f64, literal: bool) -> Self {
        let inversion = if literal {
            u > p_inversion
        } else {
            u < p_inversion
        };
        if inversion {
            OperatorChoice::Inversion
        } else {
            OperatorChoice::Crossover
        }
    }
}

/// Copy of `c` with the genes at `i` and `j` exchanged.
pub fn invert(c: &Chromosome, i: usize, j: usize) -> Result<Chromosome> {
    let len = c.len();
    for position in [i, j] {
        if position >= len {
            return Err(Error::PositionOutOfBounds { position, len });
        }
    }
    let mut out = c.clone();
    out.genes_mut().swap(i, j);
    Ok(out)
}

/// One-point crossover keeping the first `point` genes of each parent and
/// exchanging the rest. Requires `1 <= point < len`.
pub fn crossover(
    p1: &Chromosome,
    p2: &Chromosome,
    point: usize,
) -> Result<(Chromosome, Chromosome)> {
    if p1.len() != p2.len() {
        return Err(Error::LengthMismatch {
            left: p1.len(),
            right: p2.len(),
        });
    }
    let len = p1.len();
    if point == 0 || point >= len {
        return Err(Error::CrossoverPoint { point, len });
    }
    let (head1, tail1) = p1.genes().split_at(point);
    let (head2, tail2) = p2.genes().split_at(point);
    let child1 = head1.iter().chain(tail2).copied().collect::<Vec<_>>();
    let child2 = head2.iter().chain(tail1).copied().collect::<Vec<_>>();
    Ok((child1.into(), child2.into()))
}

/// Replaces the worst member when `candidate` is strictly better than it.
///
/// The caller is responsible for the admissibility check and for handling
/// zero-residual candidates as solutions.
pub fn elitist_replace(pop: &mut Population, candidate: Individual) -> bool {
    if candidate.residual < pop.worst().residual {
        pop.replace_worst(candidate);
        true
    } else {
        false
    }
}
