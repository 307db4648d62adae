//! Built-in benchmark suites and the suite file format.
//!
//! A suite file holds one equation per line; blank lines and everything
//! after `#` are ignored.

use crate::equation::{parse_equation, Equation};
use crate::error::{Error, Result};

/// A suite entry along with the single-run figures published for it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PresetEntry {
    pub text: &'static str,
    pub reference_generations: u64,
    pub reference_attacks: u64,
}

const fn entry(text: &'static str, generations: u64, attacks: u64) -> PresetEntry {
    PresetEntry {
        text,
        reference_generations: generations,
        reference_attacks: attacks,
    }
}

/// Sums of squares in 2 to 10 variables.
pub const TABLE1: &[PresetEntry] = &[
    entry("x1^2 + x2^2 = 149", 31, 13),
    entry("x1^2 + x2^2 + x3^2 = 210", 57, 22),
    entry("x1^2 + x2^2 + x3^2 + x4^2 = 248", 49, 19),
    entry("x1^2 + x2^2 + x3^2 + x4^2 + x5^2 = 325", 50, 19),
    entry("x1^2 + x2^2 + x3^2 + x4^2 + x5^2 + x6^2 = 420", 139, 60),
    entry(
        "x1^2 + x2^2 + x3^2 + x4^2 + x5^2 + x6^2 + x7^2 = 450",
        132,
        56,
    ),
    entry(
        "x1^2 + x2^2 + x3^2 + x4^2 + x5^2 + x6^2 + x7^2 + x8^2 = 590",
        93,
        40,
    ),
    entry(
        "x1^2 + x2^2 + x3^2 + x4^2 + x5^2 + x6^2 + x7^2 + x8^2 + x9^2 = 720",
        52,
        23,
    ),
    entry(
        "x1^2 + x2^2 + x3^2 + x4^2 + x5^2 + x6^2 + x7^2 + x8^2 + x9^2 + x10^2 = 956",
        319,
        147,
    ),
];

/// Two-variable equations of degree 2 to 7.
pub const TABLE2: &[PresetEntry] = &[
    entry("x1^2 + x2^2 = 625", 24, 9),
    entry("x1^3 + x2^3 = 1008", 13, 5),
    entry("x1^4 + x2^4 = 706", 17, 6),
    entry("x1^5 + x2^5 = 1056", 24, 9),
    entry("x1^6 + x2^6 = 4097", 33, 13),
    entry("x1^7 + x2^7 = 2315", 1, 0),
];

pub fn preset(name: &str) -> Option<&'static [PresetEntry]> {
    match name {
        "table1" => Some(TABLE1),
        "table2" => Some(TABLE2),
        _ => None,
    }
}

/// Looks up the published figures for an equation, if it is in a preset.
pub fn reference_for(eq: &Equation) -> Option<&'static PresetEntry> {
    TABLE1
        .iter()
        .chain(TABLE2)
        .find(|e| parse_equation(e.text).is_ok_and(|p| &p == eq))
}

pub fn preset_equations(entries: &[PresetEntry]) -> Vec<Equation> {
    entries
        .iter()
        .map(|e| parse_equation(e.text).expect("preset equations parse"))
        .collect()
}

/// Parses a suite file. Errors name the 1-based line.
pub fn parse_suite(text: &str) -> Result<Vec<Equation>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let eq = parse_equation(content)
            .map_err(|e| Error::Config(format!("line {}: {e}", lineno + 1)))?;
        out.push(eq);
    }
    Ok(out)
}
