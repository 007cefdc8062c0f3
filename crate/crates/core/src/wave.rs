//! Traveling-wave reduction `u(x,t) = u(xi)`, `xi = x + lambda*t`.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::parser::{PDESystem, WAVE_VARIABLE};
use crate::symexpr::{differentiate_with, expand, Expr, ExprError, Symbol};

/// Highest total derivative order accepted in an input equation.
pub const MAX_DERIVATIVE_ORDER: usize = 6;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ReductionError {
    #[error("derivative order {order} exceeds the limit of {MAX_DERIVATIVE_ORDER}")]
    OrderTooHigh { order: usize },
    #[error("equation {index} depends explicitly on `{symbol}`; only autonomous systems reduce")]
    NonAutonomous { index: usize, symbol: Symbol },
    #[error("wave speed name `{0}` collides with an existing symbol")]
    NameClash(String),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// The coupled ODE system in the wave variable `xi`.
///
/// `equations[i] = scales[i] * raw[i]`, where `raw[i]` is the direct
/// substitution of the wave ansatz into `lhs - rhs` of input equation `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct ODESystem {
    pub name: String,
    pub unknowns: Vec<Symbol>,
    pub wave_speed: Symbol,
    pub parameters: Vec<Symbol>,
    pub equations: Vec<Expr>,
    pub raw: Vec<Expr>,
    pub scales: Vec<BigRational>,
    /// Indices of input equations that reduced to `0 = 0`.
    pub dropped: Vec<usize>,
}

impl ODESystem {
    pub fn wave_variable() -> Symbol {
        Symbol::new(WAVE_VARIABLE)
    }
}

/// Substitutes the traveling wave into every equation and normalizes the result.
pub fn reduce_to_ode(p: &PDESystem, wave_speed_name: &str) -> Result<ODESystem, ReductionError> {
    let lambda = Symbol::new(wave_speed_name);
    let (x, t) = p.space_time();
    let functions = p.function_names();
    let xi = ODESystem::wave_variable();
    if [&x, &t, &xi].contains(&&lambda)
        || functions.contains(&lambda)
        || p.parameters.contains(&lambda)
        || lambda.radical().is_some()
    {
        return Err(ReductionError::NameClash(wave_speed_name.into()));
    }
    let deps: BTreeSet<Symbol> = functions.iter().cloned().collect();
    let mut raw = Vec::with_capacity(p.equations.len());
    for (index, eq) in p.equations.iter().enumerate() {
        let r = reduce_expr(eq, &lambda, &xi, &deps)?;
        for s in [&x, &t] {
            if r.contains_symbol(s) {
                return Err(ReductionError::NonAutonomous {
                    index,
                    symbol: s.clone(),
                });
            }
        }
        raw.push(expand(&r)?);
    }
    let normalized = normalize_ode(&raw);
    Ok(ODESystem {
        name: p.name.clone(),
        unknowns: functions,
        wave_speed: lambda,
        parameters: p.parameters.clone(),
        equations: normalized.equations,
        raw,
        scales: normalized.scales,
        dropped: normalized.dropped,
    })
}

/// Rewrites every `Deriv` node with `a` x's and `b` t's as
/// `lambda^b * d^(a+b)/dxi^(a+b)` of its argument.
pub fn reduce_expr(
    e: &Expr,
    lambda: &Symbol,
    xi: &Symbol,
    deps: &BTreeSet<Symbol>,
) -> Result<Expr, ReductionError> {
    Ok(match e {
        Expr::Rational(_) | Expr::Symbol(_) => e.clone(),
        Expr::Sum(ts) => Expr::sum(
            ts.iter()
                .map(|t| reduce_expr(t, lambda, xi, deps))
                .collect::<Result<_, _>>()?,
        ),
        Expr::Product(fs) => Expr::product(
            fs.iter()
                .map(|f| reduce_expr(f, lambda, xi, deps))
                .collect::<Result<_, _>>()?,
        ),
        Expr::Power(b, n) => reduce_expr(b, lambda, xi, deps)?.pow(*n)?,
        Expr::Func(k, a) => Expr::func(*k, reduce_expr(a, lambda, xi, deps)?),
        Expr::Deriv(arg, vars) => {
            if vars.len() > MAX_DERIVATIVE_ORDER {
                return Err(ReductionError::OrderTooHigh { order: vars.len() });
            }
            let b = vars.iter().filter(|v| v.name() == "t").count();
            let mut d = reduce_expr(arg, lambda, xi, deps)?;
            for _ in 0..vars.len() {
                d = differentiate_with(&d, xi, deps);
            }
            Expr::Symbol(lambda.clone()).pow(b as i64)? * d
        }
    })
}

/// Result of [`normalize_ode`].
#[derive(Debug, Clone, PartialEq)]
pub struct Normalized {
    pub equations: Vec<Expr>,
    pub scales: Vec<BigRational>,
    pub dropped: Vec<usize>,
}

/// Clears denominators, divides out the integer content and makes the
/// coefficient of the leading highest-order derivative monomial positive.
///
/// Equations that vanish identically are dropped with a warning; the scale
/// of a dropped equation is recorded as zero.
pub fn normalize_ode(raw: &[Expr]) -> Normalized {
    let mut out = Normalized {
        equations: Vec::new(),
        scales: Vec::new(),
        dropped: Vec::new(),
    };
    for (i, e) in raw.iter().enumerate() {
        let e = expand(e).unwrap_or_else(|_| e.clone());
        if e.is_zero() {
            log::warn!("equation {} reduces to 0 = 0 and is dropped", i + 1);
            out.dropped.push(i);
            out.scales.push(BigRational::zero());
            continue;
        }
        let scale = normalizing_scale(&e);
        out.equations.push(Expr::from_rational(scale.clone()) * &e);
        out.scales.push(scale);
    }
    out
}

fn normalizing_scale(e: &Expr) -> BigRational {
    let terms = e.terms();
    let mut den = BigInt::one();
    let mut num = BigInt::zero();
    for t in &terms {
        den = den.lcm(t.split_coefficient().0.denom());
    }
    for t in &terms {
        let c = t.split_coefficient().0 * BigRational::from_integer(den.clone());
        num = num.gcd(&c.to_integer());
    }
    let mut scale = BigRational::new(den, num);
    let lead = terms
        .iter()
        .max_by(|a, b| {
            derivative_order(a)
                .cmp(&derivative_order(b))
                .then_with(|| b.split_coefficient().1.cmp(&a.split_coefficient().1))
        })
        .expect("nonzero equation has a term");
    if lead.is_negative_term() {
        scale = -scale;
    }
    scale
}

/// Highest derivative order of any factor of a monomial.
pub fn derivative_order(term: &Expr) -> usize {
    let mut order = 0;
    term.visit(&mut |e| {
        if let Expr::Deriv(_, vars) = e {
            order = order.max(vars.len());
        }
    });
    order
}
