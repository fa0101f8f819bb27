//! Textual ladder-operator expressions.
//!
//! Grammar (whitespace is insignificant):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary ('*' unary)*
//! unary  := '-' unary | power
//! power  := primary ('^' uint)*
//! primary:= scalar | atom | '(' expr ')'
//! atom   := ('g1' | 'g2' | 'b') ['\'' | '†']
//! scalar := decimal ['i'] | 'i'
//! ```
//!
//! `b` is the oscillator annihilator, `g1`/`g2` the graviton annihilators and a
//! trailing apostrophe daggers an atom. Products keep their written order and
//! nothing is normal-ordered: `"b*b'"` and `"b'*b"` evaluate to different
//! matrices.

mod parser;

use std::collections::BTreeSet;
use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

use crate::error::Result;
use crate::fock::{FockSpace, Mode, Operator};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{message} at offset {offset}")]
pub struct ParseError {
    /// Byte offset into the source text.
    pub offset: usize,
    pub message: String,
}

impl ParseError {
    fn new(offset: usize, message: impl Into<String>) -> Self {
        Self {
            offset,
            message: message.into(),
        }
    }
}

/// A sum of terms.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorExpr {
    pub terms: Vec<Term>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub coeff: Complex64,
    pub factors: Vec<Factor>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Factor {
    Mode { mode: Mode, dagger: bool },
    Group(OperatorExpr),
    Power(Box<Factor>, u32),
}

pub fn parse(text: &str) -> Result<OperatorExpr, ParseError> {
    parser::parse(text)
}

/// Parse and evaluate in one step.
pub fn operator(text: &str, space: FockSpace) -> Result<Operator> {
    evaluate(&parse(text)?, space)
}

pub fn evaluate(expr: &OperatorExpr, space: FockSpace) -> Result<Operator> {
    let atoms = Atoms::new(space);
    atoms.expr(expr)
}

/// Modes mentioned anywhere in the expression.
pub fn support(expr: &OperatorExpr) -> BTreeSet<Mode> {
    let mut out = BTreeSet::new();
    collect_expr(expr, &mut out);
    out
}

fn collect_expr(expr: &OperatorExpr, out: &mut BTreeSet<Mode>) {
    for t in &expr.terms {
        for f in &t.factors {
            collect_factor(f, out);
        }
    }
}

fn collect_factor(f: &Factor, out: &mut BTreeSet<Mode>) {
    match f {
        Factor::Mode { mode, .. } => {
            out.insert(*mode);
        }
        Factor::Group(e) => collect_expr(e, out),
        Factor::Power(inner, _) => collect_factor(inner, out),
    }
}

impl OperatorExpr {
    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    /// Hermitian conjugate: conjugated coefficients, reversed factor order.
    pub fn adjoint(&self) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    coeff: t.coeff.conj(),
                    factors: t.factors.iter().rev().map(Factor::adjoint).collect(),
                })
                .collect(),
        }
    }

    pub fn support(&self) -> BTreeSet<Mode> {
        support(self)
    }
}

impl Factor {
    pub fn adjoint(&self) -> Self {
        match self {
            Factor::Mode { mode, dagger } => Factor::Mode {
                mode: *mode,
                dagger: !dagger,
            },
            Factor::Group(e) => Factor::Group(e.adjoint()),
            Factor::Power(inner, n) => Factor::Power(Box::new(inner.adjoint()), *n),
        }
    }
}

struct Atoms {
    space: FockSpace,
    lowering: [Operator; 3],
}

impl Atoms {
    fn new(space: FockSpace) -> Self {
        Self {
            space,
            lowering: Mode::ALL.map(|m| Operator::annihilator(space, m)),
        }
    }

    fn expr(&self, expr: &OperatorExpr) -> Result<Operator> {
        let mut acc = Operator::zeros(self.space);
        for t in &expr.terms {
            acc = acc.add(&self.term(t)?)?;
        }
        Ok(acc)
    }

    fn term(&self, t: &Term) -> Result<Operator> {
        let mut acc = Operator::identity(self.space);
        for f in &t.factors {
            acc = acc.dot(&self.factor(f)?)?;
        }
        Ok(acc.scale(t.coeff))
    }

    fn factor(&self, f: &Factor) -> Result<Operator> {
        match f {
            Factor::Mode { mode, dagger } => {
                let a = &self.lowering[mode.position()];
                Ok(if *dagger { a.adjoint() } else { a.clone() })
            }
            Factor::Group(e) => self.expr(e),
            Factor::Power(inner, n) => Ok(self.factor(inner)?.powi(*n)),
        }
    }
}

/// Shortest decimal that reparses to the same `f64`.
fn write_real(f: &mut fmt::Formatter<'_>, x: f64) -> fmt::Result {
    write!(f, "{x:?}")
}

fn write_coeff(f: &mut fmt::Formatter<'_>, c: Complex64) -> fmt::Result {
    match (c.re, c.im) {
        (re, im) if im == 0.0 => write_real(f, re),
        (re, im) if re == 0.0 => {
            write_real(f, im)?;
            f.write_str("i")
        }
        (re, im) => {
            f.write_str("(")?;
            write_real(f, re)?;
            f.write_str(" + ")?;
            write_real(f, im)?;
            f.write_str("i)")
        }
    }
}

impl fmt::Display for OperatorExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, t) in self.terms.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let unit = self.coeff == Complex64::new(1.0, 0.0);
        if self.factors.is_empty() || !unit {
            write_coeff(f, self.coeff)?;
            if !self.factors.is_empty() {
                f.write_str("*")?;
            }
        }
        for (k, factor) in self.factors.iter().enumerate() {
            if k > 0 {
                f.write_str("*")?;
            }
            write!(f, "{factor}")?;
        }
        Ok(())
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Factor::Mode { mode, dagger } => {
                f.write_str(mode.symbol())?;
                if *dagger {
                    f.write_str("'")?;
                }
                Ok(())
            }
            Factor::Group(e) => write!(f, "({e})"),
            Factor::Power(inner, n) => write!(f, "{inner}^{n}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::StateVector;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn atom(mode: Mode, dagger: bool) -> Factor {
        Factor::Mode { mode, dagger }
    }

    fn one_term(factors: Vec<Factor>) -> Term {
        Term {
            coeff: c(1.0, 0.0),
            factors,
        }
    }

    #[test]
    fn quadrature() {
        let e = parse("b + b'").unwrap();
        assert_eq!(
            e,
            OperatorExpr {
                terms: vec![
                    one_term(vec![atom(Mode::M, false)]),
                    one_term(vec![atom(Mode::M, true)]),
                ]
            }
        );
    }

    #[test]
    fn h1_shape() {
        let e = parse("(g1 + g1')*(b + b')^2").unwrap();
        let g = OperatorExpr {
            terms: vec![
                one_term(vec![atom(Mode::G1, false)]),
                one_term(vec![atom(Mode::G1, true)]),
            ],
        };
        let x = OperatorExpr {
            terms: vec![
                one_term(vec![atom(Mode::M, false)]),
                one_term(vec![atom(Mode::M, true)]),
            ],
        };
        assert_eq!(
            e,
            OperatorExpr {
                terms: vec![one_term(vec![
                    Factor::Group(g),
                    Factor::Power(Box::new(Factor::Group(x)), 2),
                ])]
            }
        );
    }

    #[test]
    fn unknown_mode() {
        let err = parse("g3*b").unwrap_err();
        assert_eq!(err.offset, 0);
        assert_eq!(err.message, "unknown mode g3");
        assert_eq!(err.to_string(), "unknown mode g3 at offset 0");
    }

    #[test]
    fn positioned_errors() {
        assert_eq!(parse("(b + g1").unwrap_err().offset, 7);
        assert!(parse("(b + g1").unwrap_err().message.contains("unbalanced"));
        assert_eq!(parse("b + g1)").unwrap_err().offset, 6);
        assert!(parse("2x*b")
            .unwrap_err()
            .message
            .contains("malformed scalar"));
        assert!(parse("1e*b")
            .unwrap_err()
            .message
            .contains("malformed scalar"));
        assert_eq!(parse("b^-1").unwrap_err().offset, 2);
        assert!(parse("b^1.5").is_err());
        assert!(parse("").is_err());
        assert!(parse("b +").is_err());
        assert!(parse("(b)'").is_err());
        assert_eq!(parse("  b ? g1").unwrap_err().offset, 4);
    }

    #[test]
    fn scalars() {
        assert_eq!(parse("2.5i").unwrap().terms[0].coeff, c(0.0, 2.5));
        assert_eq!(parse("i").unwrap().terms[0].coeff, c(0.0, 1.0));
        assert_eq!(parse("-3*b").unwrap().terms[0].coeff, c(-3.0, 0.0));
        assert_eq!(parse("1e-3").unwrap().terms[0].coeff, c(1e-3, 0.0));
        assert_eq!(parse("2^3").unwrap().terms[0].coeff, c(8.0, 0.0));
        assert_eq!(parse("(1 + 2i)*b").unwrap().terms[0].coeff, c(1.0, 2.0));
        assert_eq!(parse("b - 2*g1").unwrap().terms[1].coeff, c(-2.0, 0.0));
    }

    #[test]
    fn unicode_aliases() {
        let s = FockSpace::new([2, 2, 3]).unwrap();
        let a = operator("b† − g1", s).unwrap();
        let b = operator("b' - g1", s).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn zero_literal() {
        let s = FockSpace::new([2, 2, 3]).unwrap();
        assert_eq!(operator("0", s).unwrap(), Operator::zeros(s));
    }

    #[test]
    fn exponent_zero_is_identity() {
        let s = FockSpace::new([2, 2, 3]).unwrap();
        assert_eq!(operator("b^0", s).unwrap(), Operator::identity(s));
    }

    #[test]
    fn commutator_below_top_level() {
        let s = FockSpace::new([1, 1, 8]).unwrap();
        let diff = operator("b*b'", s)
            .unwrap()
            .sub(&operator("b'*b", s).unwrap())
            .unwrap();
        for i in 0..7 {
            for j in 0..8 {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((diff.matrix()[[i, j]] - c(expected, 0.0)).norm() < 1e-12);
            }
        }
        assert!((diff.matrix()[[7, 7]] - c(-7.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn supports() {
        let set = |t: &str| support(&parse(t).unwrap());
        assert_eq!(set("b^2"), BTreeSet::from([Mode::M]));
        assert_eq!(
            set("(1 + g1)*(1 + g2)*b^2"),
            BTreeSet::from([Mode::G1, Mode::G2, Mode::M])
        );
        assert_eq!(set("g1' * g1"), BTreeSet::from([Mode::G1]));
        assert!(set("3 + 2i").is_empty());
    }

    #[test]
    fn written_order_is_kept() {
        let s = FockSpace::new([1, 1, 4]).unwrap();
        let v = StateVector::vacuum(s);
        // b†b kills the vacuum, b b† does not
        assert_eq!(
            operator("b'*b", s).unwrap().expect(&v).unwrap(),
            c(0.0, 0.0)
        );
        assert_eq!(
            operator("b*b'", s).unwrap().expect(&v).unwrap(),
            c(1.0, 0.0)
        );
    }

    #[test]
    fn deep_nesting_is_an_error_not_a_crash() {
        let text = "(".repeat(10_000) + "b" + &")".repeat(10_000);
        assert!(parse(&text).unwrap_err().message.contains("nested"));
        let minus = "-".repeat(10_000) + "b";
        assert!(parse(&minus).is_err());
    }

    #[test]
    fn display_reparses() {
        for text in [
            "(g1+g1')*(b+b')^2",
            "-0.5*b'^3 + 2i*g2",
            "(1 + 2i)*g1*g1'",
            "0",
            "1e-300*b",
        ] {
            let e = parse(text).unwrap();
            let printed = e.to_string();
            let again = parse(&printed).unwrap_or_else(|err| panic!("{printed}: {err}"));
            let s = FockSpace::new([2, 2, 4]).unwrap();
            assert_eq!(
                evaluate(&e, s).unwrap(),
                evaluate(&again, s).unwrap(),
                "{printed}"
            );
        }
    }
}
