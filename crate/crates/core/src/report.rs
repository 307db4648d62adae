//! Experiment rows, CSV/JSON output and per-equation summaries.

use std::fmt::Write as _;
use std::io;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::{run, RunConfig, RunStats, Termination};
use crate::equation::{parse_equation, Equation, ResidualValue};
use crate::error::{Error, Result};
use crate::presets::reference_for;

/// How many attack values a row keeps.
pub const ATTACK_SAMPLE: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    Solution,
    GenerationBudget,
    Error,
}

impl From<Termination> for RowStatus {
    fn from(t: Termination) -> Self {
        match t {
            Termination::Solution => RowStatus::Solution,
            Termination::GenerationBudget => RowStatus::GenerationBudget,
        }
    }
}

impl RowStatus {
    fn as_str(self) -> &'static str {
        match self {
            RowStatus::Solution => "solution",
            RowStatus::GenerationBudget => "generation_budget",
            RowStatus::Error => "error",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "solution" => Some(RowStatus::Solution),
            "generation_budget" => Some(RowStatus::GenerationBudget),
            "error" => Some(RowStatus::Error),
            _ => None,
        }
    }
}

/// One (equation, seed) run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportRow {
    pub equation_text: String,
    pub degree: u32,
    pub arity: usize,
    pub seed: u64,
    pub generations_to_solution: Option<u64>,
    pub attack_count: usize,
    /// The first attacks in detection order, at most [`ATTACK_SAMPLE`].
    pub attack_values_sample: Vec<ResidualValue>,
    pub solution: Option<Vec<i64>>,
    pub evaluations_used: u64,
    pub wall_time_ms: u64,
    pub terminated_by: RowStatus,
    pub error: Option<String>,
}

impl ReportRow {
    /// Builds a row, re-checking any solution against the exact evaluator.
    pub fn from_stats(
        eq: &Equation,
        seed: u64,
        stats: &RunStats,
        wall_time_ms: u64,
    ) -> Result<Self> {
        if let Some(solution) = &stats.solution {
            if !eq.is_solution(solution) {
                return Err(Error::Config(format!(
                    "reported solution {solution:?} does not satisfy {eq}"
                )));
            }
        }
        Ok(ReportRow {
            equation_text: eq.to_string(),
            degree: eq.degree(),
            arity: eq.arity(),
            seed,
            generations_to_solution: stats.generations_to_solution,
            attack_count: stats.attack_count,
            attack_values_sample: stats
                .attack_trace
                .iter()
                .take(ATTACK_SAMPLE)
                .map(|a| a.value)
                .collect(),
            solution: stats.solution.clone(),
            evaluations_used: stats.evaluations_used,
            wall_time_ms,
            terminated_by: stats.terminated_by.into(),
            error: None,
        })
    }

    pub fn failed(eq: &Equation, seed: u64, error: &Error, wall_time_ms: u64) -> Self {
        ReportRow {
            equation_text: eq.to_string(),
            degree: eq.degree(),
            arity: eq.arity(),
            seed,
            generations_to_solution: None,
            attack_count: 0,
            attack_values_sample: Vec::new(),
            solution: None,
            evaluations_used: 0,
            wall_time_ms,
            terminated_by: RowStatus::Error,
            error: Some(error.to_string()),
        }
    }

    pub fn solved(&self) -> bool {
        self.terminated_by == RowStatus::Solution
    }
}

/// Flat CSV shape; lists are joined with `;`.
#[derive(Debug, Serialize, Deserialize)]
struct CsvRow {
    equation_text: String,
    degree: u32,
    arity: usize,
    seed: u64,
    generations_to_solution: Option<u64>,
    attack_count: usize,
    attack_values_sample: String,
    solution: String,
    evaluations_used: u64,
    wall_time_ms: u64,
    terminated_by: String,
    error: Option<String>,
}

fn join<T: ToString>(items: &[T]) -> String {
    items
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(";")
}

fn split<T: std::str::FromStr>(s: &str) -> Result<Vec<T>> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(';')
        .map(|p| {
            p.trim()
                .parse()
                .map_err(|_| Error::Config(format!("bad list element '{p}'")))
        })
        .collect()
}

impl From<&ReportRow> for CsvRow {
    fn from(r: &ReportRow) -> Self {
        CsvRow {
            equation_text: r.equation_text.clone(),
            degree: r.degree,
            arity: r.arity,
            seed: r.seed,
            generations_to_solution: r.generations_to_solution,
            attack_count: r.attack_count,
            attack_values_sample: join(
                &r.attack_values_sample
                    .iter()
                    .map(|v| v.get())
                    .collect::<Vec<_>>(),
            ),
            solution: r.solution.as_deref().map(join).unwrap_or_default(),
            evaluations_used: r.evaluations_used,
            wall_time_ms: r.wall_time_ms,
            terminated_by: r.terminated_by.as_str().to_string(),
            error: r.error.clone(),
        }
    }
}

impl TryFrom<CsvRow> for ReportRow {
    type Error = Error;

    fn try_from(c: CsvRow) -> Result<Self> {
        let solution = if c.solution.is_empty() {
            None
        } else {
            Some(split(&c.solution)?)
        };
        Ok(ReportRow {
            equation_text: c.equation_text,
            degree: c.degree,
            arity: c.arity,
            seed: c.seed,
            generations_to_solution: c.generations_to_solution,
            attack_count: c.attack_count,
            attack_values_sample: split::<u128>(&c.attack_values_sample)?
                .into_iter()
                .map(ResidualValue::new)
                .collect(),
            solution,
            evaluations_used: c.evaluations_used,
            wall_time_ms: c.wall_time_ms,
            terminated_by: RowStatus::parse(&c.terminated_by)
                .ok_or_else(|| Error::Config(format!("unknown status '{}'", c.terminated_by)))?,
            error: c.error,
        })
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Config(format!("csv: {e}"))
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub rows: Vec<ReportRow>,
}

impl ExperimentReport {
    pub fn write_csv<W: io::Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        for row in &self.rows {
            w.serialize(CsvRow::from(row)).map_err(csv_error)?;
        }
        if self.rows.is_empty() {
            w.write_record([
                "equation_text",
                "degree",
                "arity",
                "seed",
                "generations_to_solution",
                "attack_count",
                "attack_values_sample",
                "solution",
                "evaluations_used",
                "wall_time_ms",
                "terminated_by",
                "error",
            ])
            .map_err(csv_error)?;
        }
        w.flush().map_err(|e| Error::Config(format!("csv: {e}")))
    }

    pub fn read_csv<R: io::Read>(reader: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        let rows = r
            .deserialize::<CsvRow>()
            .map(|row| row.map_err(csv_error).and_then(ReportRow::try_from))
            .collect::<Result<Vec<_>>>()?;
        Ok(ExperimentReport { rows })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Groups rows by equation, in first-appearance order.
    pub fn summaries(&self) -> Vec<EquationSummary> {
        let mut order: Vec<String> = Vec::new();
        for row in &self.rows {
            if !order.contains(&row.equation_text) {
                order.push(row.equation_text.clone());
            }
        }
        order
            .into_iter()
            .map(|text| {
                let rows: Vec<&ReportRow> = self
                    .rows
                    .iter()
                    .filter(|r| r.equation_text == text)
                    .collect();
                let solved: Vec<&ReportRow> = rows.iter().copied().filter(|r| r.solved()).collect();
                let reference = parse_equation(&text)
                    .ok()
                    .and_then(|eq| reference_for(&eq))
                    .map(|e| (e.reference_generations, e.reference_attacks));
                EquationSummary {
                    runs: rows.len(),
                    solved: solved.len(),
                    median_generations: median(
                        solved.iter().filter_map(|r| r.generations_to_solution),
                    ),
                    median_attacks: median(
                        rows.iter()
                            .filter(|r| r.terminated_by != RowStatus::Error)
                            .map(|r| r.attack_count as u64),
                    ),
                    reference,
                    equation_text: text,
                }
            })
            .collect()
    }

    pub fn summary_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<72} {:>7} {:>10} {:>10} {:>14}",
            "equation", "success", "med_gens", "med_att", "reference"
        );
        for s in self.summaries() {
            let fmt = |m: Option<f64>| m.map_or_else(|| "-".to_string(), |v| format!("{v:.1}"));
            let reference = s
                .reference
                .map_or_else(|| "-".to_string(), |(g, a)| format!("{g} / {a}"));
            let _ = writeln!(
                out,
                "{:<72} {:>7} {:>10} {:>10} {:>14}",
                s.equation_text,
                format!("{}/{}", s.solved, s.runs),
                fmt(s.median_generations),
                fmt(s.median_attacks),
                reference
            );
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquationSummary {
    pub equation_text: String,
    pub runs: usize,
    pub solved: usize,
    /// Over solved runs only.
    pub median_generations: Option<f64>,
    /// Over all runs that completed without error.
    pub median_attacks: Option<f64>,
    /// Published single-run (generations, attacks), when known.
    pub reference: Option<(u64, u64)>,
}

impl EquationSummary {
    pub fn success_rate(&self) -> f64 {
        if self.runs == 0 {
            0.0
        } else {
            self.solved as f64 / self.runs as f64
        }
    }
}

pub fn median(values: impl IntoIterator<Item = u64>) -> Option<f64> {
    let mut v: Vec<u64> = values.into_iter().collect();
    if v.is_empty() {
        return None;
    }
    v.sort_unstable();
    let mid = v.len() / 2;
    Some(if v.len() % 2 == 1 {
        v[mid] as f64
    } else {
        (v[mid - 1] as f64 + v[mid] as f64) / 2.0
    })
}

/// Runs every equation against every seed, in parallel, and collects rows
/// in (equation, seed) order. `configure` builds the run for one pair.
pub fn run_experiment<F>(
    equations: &[Equation],
    seeds: &[u64],
    configure: F,
) -> Result<ExperimentReport>
where
    F: Fn(&Equation, u64) -> RunConfig + Sync,
{
    if seeds.is_empty() {
        return Err(Error::Config("seed list is empty".into()));
    }
    if equations.is_empty() {
        return Err(Error::Config("no equations to run".into()));
    }
    let jobs: Vec<(&Equation, u64)> = equations
        .iter()
        .flat_map(|eq| seeds.iter().map(move |&s| (eq, s)))
        .collect();
    let rows = jobs
        .par_iter()
        .map(|&(eq, seed)| {
            let config = configure(eq, seed);
            let start = Instant::now();
            let result = run(&config);
            let ms = start.elapsed().as_millis() as u64;
            match result {
                Ok(stats) => ReportRow::from_stats(eq, seed, &stats, ms)
                    .unwrap_or_else(|e| ReportRow::failed(eq, seed, &e, ms)),
                Err(e) => ReportRow::failed(eq, seed, &e, ms),
            }
        })
        .collect();
    Ok(ExperimentReport { rows })
}
