use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use dioph_coevo::engine::{DEFAULT_DIVERSIFY_BUDGET, DEFAULT_MAX_GENERATIONS, DEFAULT_P_INVERSION};
use dioph_coevo::oracle::{self, DEFAULT_BUDGET};
use dioph_coevo::presets::{parse_suite, preset, preset_equations};
use dioph_coevo::report::{run_experiment, ExperimentReport, ReportRow};
use dioph_coevo::{parse_equation, run, Equation, GeneRange, GeneSampling, RunConfig, Termination};

const EXIT_SOLVED: u8 = 0;
const EXIT_ERROR: u8 = 1;
const EXIT_BUDGET: u8 = 2;

/// Coevolutionary search for integer solutions of Diophantine equations.
#[derive(Debug, Parser)]
#[command(name = "dioph-coevo", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the solver once on a single equation.
    Solve {
        /// Equation, e.g. "x1^2 + x2^2 = 149".
        equation: String,
        #[command(flatten)]
        search: SearchArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also print the run as a report row.
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Run a suite of equations against several seeds.
    Bench {
        /// Preset name (`table1`, `table2`) or path to a suite file.
        suite: String,
        #[command(flatten)]
        search: SearchArgs,
        /// Comma-separated seeds, e.g. 1,2,3.
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        seeds: Vec<u64>,
        /// Output file; the report goes to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Enumerate every solution inside the range.
    Oracle {
        equation: String,
        #[arg(long, default_value = "1..25")]
        range: GeneRange,
        /// Largest search space to enumerate.
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u128,
    },
}

#[derive(Debug, Args)]
struct SearchArgs {
    /// Inclusive gene value range.
    #[arg(long, default_value = "1..25")]
    range: GeneRange,
    #[arg(long, default_value_t = DEFAULT_P_INVERSION)]
    p_inversion: f64,
    #[arg(long, default_value_t = DEFAULT_MAX_GENERATIONS)]
    max_generations: u64,
    #[arg(long, default_value_t = 5)]
    population: usize,
    /// How initial chromosomes are drawn.
    #[arg(long, value_enum, default_value_t = Sampling::Permutation)]
    sampling: Sampling,
    /// Defaults to the number of values in the range.
    #[arg(long)]
    chromosome_length: Option<usize>,
    /// Inversion attempts per inversion generation; defaults to the
    /// chromosome length.
    #[arg(long)]
    k_inv: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_DIVERSIFY_BUDGET)]
    diversify_budget: usize,
    /// Choose inversion when the draw exceeds p_inversion.
    #[arg(long)]
    literal_operator_rule: bool,
}

impl SearchArgs {
    fn config(&self, equation: Equation, seed: u64) -> RunConfig {
        RunConfig {
            equation,
            range: self.range,
            population_size: self.population,
            sampling: match self.sampling {
                Sampling::Permutation => GeneSampling::Permutation,
                Sampling::Independent => GeneSampling::Independent,
            },
            chromosome_length: self.chromosome_length,
            p_inversion: self.p_inversion,
            k_inv: self.k_inv,
            max_generations: self.max_generations,
            seed,
            literal_operator_rule: self.literal_operator_rule,
            diversify_budget: self.diversify_budget,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Sampling {
    /// Distinct genes per chromosome.
    Permutation,
    /// Independent uniform genes.
    Independent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                EXIT_ERROR
            } else {
                EXIT_SOLVED
            });
        }
    };
    let result = match cli.command {
        Command::Solve {
            equation,
            search,
            seed,
            format,
        } => solve(&equation, &search, seed, format),
        Command::Bench {
            suite,
            search,
            seeds,
            out,
            format,
        } => bench(&suite, &search, &seeds, out, format).map(|()| EXIT_SOLVED),
        Command::Oracle {
            equation,
            range,
            budget,
        } => run_oracle(&equation, range, budget).map(|()| EXIT_SOLVED),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

fn parse(text: &str) -> anyhow::Result<Equation> {
    parse_equation(text).with_context(|| format!("cannot parse equation '{text}'"))
}

fn solve(text: &str, search: &SearchArgs, seed: u64, format: Option<Format>) -> anyhow::Result<u8> {
    let eq = parse(text)?;
    let config = search.config(eq.clone(), seed);
    let start = Instant::now();
    let stats = run(&config)?;
    let ms = start.elapsed().as_millis() as u64;
    // from_stats re-checks the solution against the exact evaluator
    let row = ReportRow::from_stats(&eq, seed, &stats, ms)?;

    match (&stats.solution, stats.terminated_by) {
        (Some(solution), Termination::Solution) => {
            let values = solution
                .iter()
                .enumerate()
                .map(|(i, v)| format!("x{}={v}", i + 1))
                .collect::<Vec<_>>()
                .join(", ");
            println!("solution: {values}");
            println!(
                "generations: {}",
                stats.generations_to_solution.unwrap_or_default()
            );
        }
        _ => {
            println!(
                "no solution found within {} generations (best residual {})",
                stats.generations_run, stats.best_residual
            );
        }
    }
    println!("attacks: {}", stats.attack_count);
    let sample: Vec<String> = row
        .attack_values_sample
        .iter()
        .map(|v| v.to_string())
        .collect();
    if !sample.is_empty() {
        println!("first attacks: {}", sample.join(", "));
    }
    println!("evaluations: {}", stats.evaluations_used);

    if let Some(format) = format {
        let report = ExperimentReport { rows: vec![row] };
        write_report(&report, format, &mut io::stdout().lock())?;
    }
    Ok(match stats.terminated_by {
        Termination::Solution => EXIT_SOLVED,
        Termination::GenerationBudget => EXIT_BUDGET,
    })
}

fn load_suite(suite: &str) -> anyhow::Result<Vec<Equation>> {
    if let Some(entries) = preset(suite) {
        return Ok(preset_equations(entries));
    }
    let text =
        fs::read_to_string(suite).with_context(|| format!("cannot read suite file '{suite}'"))?;
    let equations = parse_suite(&text)?;
    if equations.is_empty() {
        bail!("suite '{suite}' contains no equations");
    }
    Ok(equations)
}

fn write_report(
    report: &ExperimentReport,
    format: Format,
    out: &mut dyn Write,
) -> anyhow::Result<()> {
    match format {
        Format::Csv => report.write_csv(out)?,
        Format::Json => writeln!(out, "{}", report.to_json())?,
    }
    Ok(())
}

fn bench(
    suite: &str,
    search: &SearchArgs,
    seeds: &[u64],
    out: Option<PathBuf>,
    format: Format,
) -> anyhow::Result<()> {
    if seeds.is_empty() {
        bail!("--seeds must list at least one seed");
    }
    let equations = load_suite(suite)?;
    let report = run_experiment(&equations, seeds, |eq, seed| {
        search.config(eq.clone(), seed)
    })?;
    match out {
        Some(path) => {
            let mut file = fs::File::create(&path)
                .with_context(|| format!("cannot create '{}'", path.display()))?;
            write_report(&report, format, &mut file)?;
            print!("{}", report.summary_table());
        }
        None => {
            write_report(&report, format, &mut io::stdout().lock())?;
            eprint!("{}", report.summary_table());
        }
    }
    Ok(())
}

fn run_oracle(text: &str, range: GeneRange, budget: u128) -> anyhow::Result<()> {
    let eq = parse(text)?;
    let set = oracle::enumerate(&eq, range, budget)?;
    println!("{} solution(s) of {eq} in {range}", set.len());
    for s in &set.solutions {
        let tuple = s
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(", ");
        println!("({tuple})");
    }
    Ok(())
}
