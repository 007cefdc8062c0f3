//! Exact symbolic expressions over arbitrary-precision rationals.
//!
//! Every [`Expr`] handed out by this module is in canonical form: sums and
//! products are flattened and sorted, like terms and like factors are
//! collected, rationals are reduced and unit factors are elided. Structural
//! equality is therefore semantic equality for polynomial expressions.
//!
//! Radicals `sqrt(k)` and `sqrt(-k)` are plain symbols whose square rewrites
//! to `k` and `-k` respectively (see [`Symbol::radical`]).

mod calculus;
mod eval;
mod expand;
mod normalize;
mod order;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub(crate) use calculus::rational_sqrt;
pub use calculus::{differentiate, differentiate_with, substitute};
pub use eval::{eval_numeric, EvalError};
pub use expand::{as_polynomial, expand, expand_with_cap, DEFAULT_EXPANSION_CAP};
pub use normalize::normalize;

/// A named symbol. Cheap to clone.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(name: &str) -> Self {
        Symbol(Arc::from(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    /// The auxiliary square-root symbol for `base` (`sqrt(k)`) or for its
    /// negation (`sqrt(-k)`).
    pub fn sqrt_of(base: &Symbol, negated: bool) -> Self {
        if negated {
            Symbol::new(&format!("sqrt(-{})", base.name()))
        } else {
            Symbol::new(&format!("sqrt({})", base.name()))
        }
    }

    /// For a radical symbol returns `(base, negated)` such that the symbol
    /// squared equals `base` (or `-base` when `negated`).
    pub fn radical(&self) -> Option<(Symbol, bool)> {
        let inner = self.0.strip_prefix("sqrt(")?.strip_suffix(')')?;
        match inner.strip_prefix('-') {
            Some(base) if is_identifier(base) => Some((Symbol::new(base), true)),
            None if is_identifier(inner) => Some((Symbol::new(inner), false)),
            _ => None,
        }
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Symbol {
    fn from(s: &str) -> Self {
        Symbol::new(s)
    }
}

/// Transcendental functions that appear in assembled closed forms.
///
/// The `-1/ξ` branch of the Riccati equation needs no function node; it is
/// the integer power `ξ^-1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FuncKind {
    Tan,
    Cot,
    Tanh,
    Coth,
}

impl FuncKind {
    pub fn name(self) -> &'static str {
        match self {
            FuncKind::Tan => "tan",
            FuncKind::Cot => "cot",
            FuncKind::Tanh => "tanh",
            FuncKind::Coth => "coth",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "tan" => Some(FuncKind::Tan),
            "cot" => Some(FuncKind::Cot),
            "tanh" => Some(FuncKind::Tanh),
            "coth" => Some(FuncKind::Coth),
            _ => None,
        }
    }
}

/// Symbolic expression tree.
///
/// `Deriv(arg, vars)` is an unevaluated derivative of `arg` with respect to
/// each variable of `vars` in turn; it houses `u_xxx`, `D(u*v, x)` and the
/// ODE derivatives `u'''` (taken with respect to `xi`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Rational(BigRational),
    Symbol(Symbol),
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    Power(Box<Expr>, i64),
    Func(FuncKind, Box<Expr>),
    Deriv(Box<Expr>, Vec<Symbol>),
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExprError {
    #[error("malformed expression: {0}")]
    Malformed(String),
    #[error("expansion exceeded the cap of {cap} monomials")]
    ExpansionTooLarge { cap: usize },
    #[error("expression is not a polynomial in {symbol}: {reason}")]
    NotPolynomial { symbol: Symbol, reason: String },
}

impl Expr {
    pub fn zero() -> Self {
        Expr::Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Expr::Rational(BigRational::one())
    }

    pub fn int(n: i64) -> Self {
        Expr::Rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn rational(num: i64, den: i64) -> Result<Self, ExprError> {
        if den == 0 {
            return Err(ExprError::Malformed("zero denominator".into()));
        }
        Ok(Expr::Rational(BigRational::new(num.into(), den.into())))
    }

    pub fn from_rational(r: BigRational) -> Self {
        Expr::Rational(r)
    }

    pub fn sym(name: &str) -> Self {
        Expr::Symbol(Symbol::new(name))
    }

    pub fn func(kind: FuncKind, arg: Expr) -> Self {
        normalize::simplify_func(kind, arg)
    }

    pub fn deriv(arg: Expr, vars: Vec<Symbol>) -> Self {
        normalize::simplify_deriv(arg, vars)
    }

    /// Integer power of an already-canonical expression.
    ///
    /// Fails only when a zero base is raised to a negative power.
    pub fn pow(&self, exponent: i64) -> Result<Expr, ExprError> {
        normalize::simplify_power(self.clone(), exponent)
    }

    pub fn checked_div(&self, other: &Expr) -> Result<Expr, ExprError> {
        Ok(self * &other.pow(-1)?)
    }

    pub fn sum(terms: Vec<Expr>) -> Expr {
        normalize::simplify_sum(terms)
    }

    pub fn product(factors: Vec<Expr>) -> Expr {
        normalize::simplify_product(factors)
            .expect("canonical factors never contain a zero base with a negative exponent")
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Rational(r) if r.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Expr::Rational(r) if r.is_one())
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Expr::Rational(r) => Some(r),
            _ => None,
        }
    }

    pub fn as_symbol(&self) -> Option<&Symbol> {
        match self {
            Expr::Symbol(s) => Some(s),
            _ => None,
        }
    }

    /// Splits a canonical term into its rational coefficient and the rest.
    pub fn split_coefficient(&self) -> (BigRational, Expr) {
        match self {
            Expr::Rational(r) => (r.clone(), Expr::one()),
            Expr::Product(fs) => match &fs[0] {
                Expr::Rational(c) => {
                    let rest = if fs.len() == 2 {
                        fs[1].clone()
                    } else {
                        Expr::Product(fs[1..].to_vec())
                    };
                    (c.clone(), rest)
                }
                _ => (BigRational::one(), self.clone()),
            },
            _ => (BigRational::one(), self.clone()),
        }
    }

    /// The summands of a canonical expression (a single term unless it is a sum).
    pub fn terms(&self) -> Vec<Expr> {
        match self {
            Expr::Sum(ts) => ts.clone(),
            e if e.is_zero() => Vec::new(),
            e => vec![e.clone()],
        }
    }

    /// The factors of a canonical term, coefficient included.
    pub fn factors(&self) -> Vec<Expr> {
        match self {
            Expr::Product(fs) => fs.clone(),
            e => vec![e.clone()],
        }
    }

    /// True when the term carries a negative rational coefficient.
    pub fn is_negative_term(&self) -> bool {
        self.split_coefficient().0.is_negative()
    }

    pub fn contains_symbol(&self, s: &Symbol) -> bool {
        let mut found = false;
        self.visit(&mut |e| {
            if let Expr::Symbol(x) = e {
                if x == s || x.radical().is_some_and(|(b, _)| &b == s) {
                    found = true;
                }
            }
            if let Expr::Deriv(_, vars) = e {
                if vars.contains(s) {
                    found = true;
                }
            }
        });
        found
    }

    pub fn contains_func(&self) -> bool {
        let mut found = false;
        self.visit(&mut |e| found |= matches!(e, Expr::Func(..)));
        found
    }

    pub fn contains_deriv(&self) -> bool {
        let mut found = false;
        self.visit(&mut |e| found |= matches!(e, Expr::Deriv(..)));
        found
    }

    /// All symbols occurring in the expression (derivative variables included).
    pub fn symbols(&self) -> std::collections::BTreeSet<Symbol> {
        let mut out = std::collections::BTreeSet::new();
        self.visit(&mut |e| match e {
            Expr::Symbol(s) => {
                out.insert(s.clone());
            }
            Expr::Deriv(_, vars) => out.extend(vars.iter().cloned()),
            _ => {}
        });
        out
    }

    /// Pre-order traversal.
    pub fn visit<F: FnMut(&Expr)>(&self, f: &mut F) {
        f(self);
        match self {
            Expr::Sum(xs) | Expr::Product(xs) => xs.iter().for_each(|x| x.visit(f)),
            Expr::Power(b, _) => b.visit(f),
            Expr::Func(_, a) | Expr::Deriv(a, _) => a.visit(f),
            Expr::Rational(_) | Expr::Symbol(_) => {}
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::parser::render_expr(
            self,
            crate::parser::RenderFormat::Dsl,
        ))
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Self {
        Expr::int(n)
    }
}

impl From<Symbol> for Expr {
    fn from(s: Symbol) -> Self {
        Expr::Symbol(s)
    }
}

impl From<BigRational> for Expr {
    fn from(r: BigRational) -> Self {
        Expr::Rational(r)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $body:expr) => {
        impl $trait<&Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                let f: fn(&Expr, &Expr) -> Expr = $body;
                f(self, rhs)
            }
        }
        impl $trait<Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                (&self).$method(rhs)
            }
        }
        impl $trait<Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                self.$method(&rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| Expr::sum(vec![a.clone(), b.clone()]));
binop!(Sub, sub, |a, b| Expr::sum(vec![a.clone(), -b]));
binop!(Mul, mul, |a, b| Expr::product(vec![a.clone(), b.clone()]));

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::product(vec![Expr::int(-1), self.clone()])
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -&self
    }
}
