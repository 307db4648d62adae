//! Diophantine equations of the separable form `Σ a_i · x_{k_i}^{p_i} = N`.
//!
//! Equations are written in a small text syntax:
//!
//! ```text
//! equation := term (("+"|"-") term)* "=" integer
//! term     := [integer "*"] "x" integer ["^" integer]
//! ```
//!
//! The first term may carry a leading sign and whitespace is ignored
//! everywhere. Rendering is canonical: terms ordered by variable index,
//! unit coefficients and unit powers omitted.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One `coefficient · x_variable ^ power` summand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Term {
    pub coefficient: i64,
    /// 1-based variable index.
    pub variable: usize,
    pub power: u32,
}

impl Term {
    pub fn new(coefficient: i64, variable: usize, power: u32) -> Self {
        Term {
            coefficient,
            variable,
            power,
        }
    }
}

/// A validated equation. Construct with [`Equation::new`] or by parsing.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawEquation", into = "RawEquation")]
pub struct Equation {
    terms: Vec<Term>,
    target: i64,
    arity: usize,
}

#[derive(Serialize, Deserialize)]
struct RawEquation {
    terms: Vec<Term>,
    target: i64,
}

impl TryFrom<RawEquation> for Equation {
    type Error = Error;

    fn try_from(raw: RawEquation) -> Result<Self> {
        Equation::new(raw.terms, raw.target)
    }
}

impl From<Equation> for RawEquation {
    fn from(eq: Equation) -> Self {
        RawEquation {
            terms: eq.terms,
            target: eq.target,
        }
    }
}

/// Absolute distance between the target and the evaluated polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ResidualValue(u128);

impl ResidualValue {
    pub const ZERO: ResidualValue = ResidualValue(0);

    pub fn new(value: u128) -> Self {
        ResidualValue(value)
    }

    pub fn get(self) -> u128 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for ResidualValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl Equation {
    /// Builds an equation, ordering terms by variable index (stable) and
    /// validating powers, indices and the absence of phantom variables.
    pub fn new(mut terms: Vec<Term>, target: i64) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::EmptyEquation);
        }
        for term in &terms {
            if term.power == 0 {
                return Err(Error::InvalidPower { position: 0 });
            }
            if term.variable == 0 {
                return Err(Error::InvalidVariable { position: 0 });
            }
        }
        terms.sort_by_key(|t| t.variable);
        let arity = terms.last().map(|t| t.variable).unwrap_or(0);
        let mut seen = vec![false; arity];
        for term in &terms {
            seen[term.variable - 1] = true;
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::ArityGap {
                missing: missing + 1,
                arity,
            });
        }
        Ok(Equation {
            terms,
            target,
            arity,
        })
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn target(&self) -> i64 {
        self.target
    }

    /// Number of distinct variables, i.e. the largest variable index.
    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Highest power appearing in any term.
    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|t| t.power).max().unwrap_or(1)
    }

    /// `|N − Σ a·x^p|` over the first `arity` genes, in checked 128-bit
    /// arithmetic. Genes past the arity are ignored.
    pub fn residual(&self, genes: &[i64]) -> Result<ResidualValue> {
        if genes.len() < self.arity {
            return Err(Error::TooFewGenes {
                genes: genes.len(),
                arity: self.arity,
            });
        }
        let mut sum: i128 = 0;
        for term in &self.terms {
            let x = i128::from(genes[term.variable - 1]);
            let value = x
                .checked_pow(term.power)
                .and_then(|p| p.checked_mul(i128::from(term.coefficient)))
                .ok_or(Error::Overflow)?;
            sum = sum.checked_add(value).ok_or(Error::Overflow)?;
        }
        let diff = i128::from(self.target)
            .checked_sub(sum)
            .ok_or(Error::Overflow)?;
        Ok(ResidualValue(diff.unsigned_abs()))
    }

    /// Exact value of the left-hand side at `values`, in arbitrary precision.
    ///
    /// Shares no arithmetic with [`Equation::residual`]; used to re-check
    /// reported solutions.
    pub fn evaluate_exact(&self, values: &[i64]) -> Result<BigInt> {
        if values.len() < self.arity {
            return Err(Error::TooFewGenes {
                genes: values.len(),
                arity: self.arity,
            });
        }
        Ok(self
            .terms
            .iter()
            .map(|t| {
                BigInt::from(t.coefficient) * BigInt::from(values[t.variable - 1]).pow(t.power)
            })
            .sum())
    }

    /// True when substituting `values` yields exact equality.
    pub fn is_solution(&self, values: &[i64]) -> bool {
        self.evaluate_exact(values)
            .map(|lhs| lhs == BigInt::from(self.target))
            .unwrap_or(false)
    }

    /// True when every coefficient is strictly positive.
    pub fn all_coefficients_positive(&self) -> bool {
        self.terms.iter().all(|t| t.coefficient > 0)
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (idx, term) in self.terms.iter().enumerate() {
            let magnitude = term.coefficient.unsigned_abs();
            let negative = term.coefficient < 0;
            match (idx, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if magnitude != 1 {
                write!(f, "{magnitude}*")?;
            }
            write!(f, "x{}", term.variable)?;
            if term.power != 1 {
                write!(f, "^{}", term.power)?;
            }
        }
        write!(f, " = {}", self.target)
    }
}

impl FromStr for Equation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_equation(s)
    }
}

/// Parses the equation syntax described in the module docs.
///
/// Error positions are 1-based character columns in `text`.
pub fn parse_equation(text: &str) -> Result<Equation> {
    let mut parser = Parser::new(text);
    let terms = parser.terms()?;
    parser.expect('=')?;
    let target = parser.signed_integer()?;
    parser.skip_ws();
    if let Some((pos, c)) = parser.peek() {
        return Err(Error::Syntax {
            position: pos,
            message: format!("unexpected '{c}' after target"),
        });
    }
    Equation::new(terms, target)
}

struct Parser {
    chars: Vec<char>,
    idx: usize,
}

impl Parser {
    fn new(text: &str) -> Self {
        Parser {
            chars: text.chars().collect(),
            idx: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.chars.get(self.idx).is_some_and(|c| c.is_whitespace()) {
            self.idx += 1;
        }
    }

    /// Next non-whitespace char with its 1-based column.
    fn peek(&mut self) -> Option<(usize, char)> {
        self.skip_ws();
        self.chars.get(self.idx).map(|&c| (self.idx + 1, c))
    }

    fn column(&mut self) -> usize {
        self.skip_ws();
        self.idx + 1
    }

    fn error(&mut self, expected: &str) -> Error {
        match self.peek() {
            Some((position, c)) => Error::Syntax {
                position,
                message: format!("expected {expected}, found '{c}'"),
            },
            None => Error::Syntax {
                position: self.chars.len() + 1,
                message: format!("expected {expected}, found end of input"),
            },
        }
    }

    fn eat(&mut self, want: char) -> bool {
        if self.peek().is_some_and(|(_, c)| c == want) {
            self.idx += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, want: char) -> Result<()> {
        if self.eat(want) {
            Ok(())
        } else {
            Err(self.error(&format!("'{want}'")))
        }
    }

    /// Unsigned digit run; whitespace between digits is not allowed.
    fn digits(&mut self) -> Result<Option<(usize, u64)>> {
        let start = self.column();
        let begin = self.idx;
        while self.chars.get(self.idx).is_some_and(|c| c.is_ascii_digit()) {
            self.idx += 1;
        }
        if begin == self.idx {
            return Ok(None);
        }
        let text: String = self.chars[begin..self.idx].iter().collect();
        text.parse::<u64>()
            .map(|v| Some((start, v)))
            .map_err(|_| Error::LiteralOverflow { position: start })
    }

    fn signed_integer(&mut self) -> Result<i64> {
        let negative = if self.eat('-') {
            true
        } else {
            self.eat('+');
            false
        };
        let (position, magnitude) = self.digits()?.ok_or_else(|| self.error("integer"))?;
        apply_sign(magnitude, negative).ok_or(Error::LiteralOverflow { position })
    }

    fn terms(&mut self) -> Result<Vec<Term>> {
        let mut terms = Vec::new();
        let mut negative = self.eat('-');
        loop {
            terms.push(self.term(negative)?);
            if self.eat('+') {
                negative = false;
            } else if self.eat('-') {
                negative = true;
            } else {
                break;
            }
        }
        Ok(terms)
    }

    fn term(&mut self, negative: bool) -> Result<Term> {
        let coefficient = match self.digits()? {
            Some((position, magnitude)) => {
                self.expect('*')?;
                apply_sign(magnitude, negative).ok_or(Error::LiteralOverflow { position })?
            }
            None if negative => -1,
            None => 1,
        };
        if !self.eat('x') {
            return Err(self.error("variable 'x<k>'"));
        }
        let (var_pos, variable) = self.digits()?.ok_or_else(|| self.error("variable index"))?;
        if variable == 0 {
            return Err(Error::InvalidVariable { position: var_pos });
        }
        let variable =
            usize::try_from(variable).map_err(|_| Error::LiteralOverflow { position: var_pos })?;
        let power = if self.eat('^') {
            let (pos, p) = self.digits()?.ok_or_else(|| self.error("power"))?;
            if p == 0 {
                return Err(Error::InvalidPower { position: pos });
            }
            u32::try_from(p).map_err(|_| Error::LiteralOverflow { position: pos })?
        } else {
            1
        };
        Ok(Term {
            coefficient,
            variable,
            power,
        })
    }
}

fn apply_sign(magnitude: u64, negative: bool) -> Option<i64> {
    if negative {
        0i64.checked_sub_unsigned(magnitude)
    } else {
        i64::try_from(magnitude).ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sum_of_powers(n: usize, power: u32, target: i64) -> Equation {
        Equation::new((1..=n).map(|v| Term::new(1, v, power)).collect(), target).unwrap()
    }

    #[test]
    fn parses_table_equation() {
        let eq = parse_equation("x1^2 + x2^2 = 149").unwrap();
        assert_eq!(eq.terms(), &[Term::new(1, 1, 2), Term::new(1, 2, 2)]);
        assert_eq!(eq.target(), 149);
        assert_eq!(eq.arity(), 2);
    }

    #[test]
    fn parses_identity() {
        let eq = parse_equation("x1 = 0").unwrap();
        assert_eq!(eq.terms(), &[Term::new(1, 1, 1)]);
        assert_eq!(eq.target(), 0);
        assert_eq!(eq.arity(), 1);
    }

    #[test]
    fn parses_coefficients_and_signs() {
        let eq = parse_equation("2*x1^3 - x2 = 15").unwrap();
        assert_eq!(eq.terms(), &[Term::new(2, 1, 3), Term::new(-1, 2, 1)]);
        assert_eq!(eq.to_string(), "2*x1^3 - x2 = 15");

        let eq = parse_equation("-3*x2+x1^2=-7").unwrap();
        assert_eq!(eq.terms(), &[Term::new(1, 1, 2), Term::new(-3, 2, 1)]);
        assert_eq!(eq.target(), -7);
        assert_eq!(eq.to_string(), "x1^2 - 3*x2 = -7");
    }

    #[test]
    fn whitespace_is_insignificant() {
        let a = parse_equation(" 2 * x 1 ^ 3   -x2=  15 ").unwrap();
        let b = parse_equation("2*x1^3-x2=15").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn syntax_errors_carry_position() {
        match parse_equation("x1^2 +") {
            Err(Error::Syntax { position, .. }) => assert_eq!(position, 7),
            other => panic!("unexpected {other:?}"),
        }
        match parse_equation("x1 + y2 = 3") {
            Err(Error::Syntax { position, .. }) => assert_eq!(position, 6),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_equation("x1 = 3 4"),
            Err(Error::Syntax { position: 8, .. })
        ));
        assert!(matches!(
            parse_equation("x1 + x2"),
            Err(Error::Syntax { .. })
        ));
        assert!(matches!(
            parse_equation("2 x1 = 1"),
            Err(Error::Syntax { .. })
        ));
    }

    #[test]
    fn rejects_arity_gap_and_bad_powers() {
        assert_eq!(
            parse_equation("x1 + x3 = 4"),
            Err(Error::ArityGap {
                missing: 2,
                arity: 3
            })
        );
        assert!(matches!(
            parse_equation("x1^0 = 1"),
            Err(Error::InvalidPower { position: 4 })
        ));
        assert!(matches!(
            parse_equation("x0 = 1"),
            Err(Error::InvalidVariable { .. })
        ));
    }

    #[test]
    fn rejects_target_overflow() {
        assert!(matches!(
            parse_equation("x1 = 99999999999999999999"),
            Err(Error::LiteralOverflow { position: 6 })
        ));
        assert!(matches!(
            parse_equation("x1 = 9223372036854775808"),
            Err(Error::LiteralOverflow { .. })
        ));
        assert_eq!(
            parse_equation("x1 = -9223372036854775808")
                .unwrap()
                .target(),
            i64::MIN
        );
    }

    #[test]
    fn residual_uses_leading_genes_only() {
        let eq = sum_of_powers(6, 2, 544);
        let genes: Vec<i64> = (1..=20).collect();
        assert_eq!(eq.residual(&genes).unwrap().get(), 453);
    }

    #[test]
    fn residual_zero_on_solution() {
        let eq = parse_equation("x1^2 + x2^2 = 149").unwrap();
        assert!(eq.residual(&[7, 10, 3, 3]).unwrap().is_zero());
        let eq = parse_equation("x1 = 5").unwrap();
        assert!(eq.residual(&[5]).unwrap().is_zero());
    }

    #[test]
    fn residual_errors() {
        let eq = parse_equation("x1 + x2 = 3").unwrap();
        assert_eq!(
            eq.residual(&[1]),
            Err(Error::TooFewGenes { genes: 1, arity: 2 })
        );
        let eq = parse_equation("x1^40 = 3").unwrap();
        assert_eq!(eq.residual(&[25]), Err(Error::Overflow));
        // 25^10 fits comfortably
        let eq = parse_equation("x1^10 = 1").unwrap();
        assert_eq!(eq.residual(&[25]).unwrap().get(), 25u128.pow(10) - 1);
    }

    #[test]
    fn exact_evaluator_agrees_on_solution() {
        let eq = parse_equation("x1^7 + x2^7 = 2315").unwrap();
        assert!(eq.is_solution(&[3, 2]));
        assert!(eq.is_solution(&[2, 3, 17]));
        assert!(!eq.is_solution(&[3, 3]));
        assert!(!eq.is_solution(&[3]));
    }

    #[test]
    fn degree_and_serde() {
        let eq = parse_equation("x1^2 + 4*x2^5 - x3 = 10").unwrap();
        assert_eq!(eq.degree(), 5);
        let json = serde_json::to_string(&eq).unwrap();
        let back: Equation = serde_json::from_str(&json).unwrap();
        assert_eq!(back, eq);
        assert!(serde_json::from_str::<Equation>(r#"{"terms":[],"target":1}"#).is_err());
    }

    /// Sweeping one coordinate of a sum of powers, the residual falls toward
    /// the per-coordinate optimum and rises after it.
    #[test]
    fn residual_monotone_per_coordinate() {
        for (n, p, target) in [(2, 2, 149), (3, 2, 210), (2, 3, 1008), (4, 2, 248)] {
            let eq = sum_of_powers(n, p, target);
            for fixed in [1i64, 4, 9] {
                for coord in 0..n {
                    let residuals: Vec<u128> = (1..=25)
                        .map(|v| {
                            let mut g = vec![fixed; n];
                            g[coord] = v;
                            eq.residual(&g).unwrap().get()
                        })
                        .collect();
                    let best = *residuals.iter().min().unwrap();
                    let argmin = residuals.iter().position(|&r| r == best).unwrap();
                    for w in residuals[..=argmin].windows(2) {
                        assert!(w[0] > w[1], "{residuals:?}");
                    }
                    // A tie at the minimum is possible when the optimum falls
                    // between two integers.
                    let after = &residuals[argmin..];
                    for (k, w) in after.windows(2).enumerate() {
                        if k == 0 {
                            assert!(w[0] <= w[1], "{residuals:?}");
                        } else {
                            assert!(w[0] < w[1], "{residuals:?}");
                        }
                    }
                }
            }
        }
    }
}
