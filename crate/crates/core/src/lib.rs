//! Host-parasite coevolutionary search for integer solutions of
//! Diophantine equations.
//!
//! A small elite population of integer chromosomes evolves by inversion and
//! one-point crossover under elitist replacement. Residual values that
//! several members share are registered as parasite attacks; from then on a
//! candidate can only enter the population if its residual avoids every
//! attack, which keeps the population moving off plateaus.
//!
//! ```
//! use dioph_coevo::{run, GeneRange, RunConfig};
//!
//! let eq = "x1^2 + x2^2 = 149".parse().unwrap();
//! let config = RunConfig::new(eq, GeneRange::inclusive(1, 25).unwrap()).with_seed(7);
//! let stats = run(&config).unwrap();
//! let solution = stats.solution.unwrap();
//! assert!(solution == [7, 10] || solution == [10, 7]);
//! ```

pub mod coevolution;
pub mod engine;
pub mod equation;
pub mod error;
pub mod genome;
pub mod operators;
pub mod oracle;
pub mod presets;
pub mod report;
pub mod rng;

pub use coevolution::{admissible, Attack, AttackFamily};
pub use engine::{run, run_batch, run_with_observer, Observer, RunConfig, RunStats, Termination};
pub use equation::{parse_equation, Equation, ResidualValue, Term};
pub use error::{Error, Result};
pub use genome::{Chromosome, GeneRange, GeneSampling, Individual, Population};
pub use oracle::{enumerate, SolutionSet};
