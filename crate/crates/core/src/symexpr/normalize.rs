use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};

use super::{Expr, ExprError, FuncKind, Symbol};

/// Returns the canonical form of an arbitrary tree.
///
/// Idempotent; fails only on a zero denominator (a zero base raised to a
/// negative power, or a rational literal with zero denominator).
pub fn normalize(raw: &Expr) -> Result<Expr, ExprError> {
    Ok(match raw {
        Expr::Rational(r) => Expr::Rational(r.clone()),
        Expr::Symbol(s) => Expr::Symbol(s.clone()),
        Expr::Sum(terms) => {
            simplify_sum(terms.iter().map(normalize).collect::<Result<Vec<_>, _>>()?)
        }
        Expr::Product(factors) => simplify_product(
            factors
                .iter()
                .map(normalize)
                .collect::<Result<Vec<_>, _>>()?,
        )?,
        Expr::Power(base, n) => simplify_power(normalize(base)?, *n)?,
        Expr::Func(kind, arg) => simplify_func(*kind, normalize(arg)?),
        Expr::Deriv(arg, vars) => simplify_deriv(normalize(arg)?, vars.clone()),
    })
}

/// Combines already-canonical terms into a canonical sum.
pub(crate) fn simplify_sum(terms: Vec<Expr>) -> Expr {
    let mut collected: BTreeMap<Expr, BigRational> = BTreeMap::new();
    let mut push = |t: Expr| {
        let (c, body) = t.split_coefficient();
        if c.is_zero() {
            return;
        }
        *collected.entry(body).or_insert_with(BigRational::zero) += c;
    };
    for t in terms {
        match t {
            Expr::Sum(inner) => inner.into_iter().for_each(&mut push),
            t => push(t),
        }
    }
    let mut out: Vec<Expr> = collected
        .into_iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(body, c)| with_coefficient(c, body))
        .collect();
    out.sort();
    match out.len() {
        0 => Expr::zero(),
        1 => out.pop().unwrap(),
        _ => Expr::Sum(out),
    }
}

fn with_coefficient(c: BigRational, body: Expr) -> Expr {
    if body.is_one() {
        return Expr::Rational(c);
    }
    if c.is_one() {
        return body;
    }
    let mut fs = vec![Expr::Rational(c)];
    match body {
        Expr::Product(inner) => fs.extend(inner),
        b => fs.push(b),
    }
    Expr::Product(fs)
}

/// Combines already-canonical factors into a canonical product.
pub(crate) fn simplify_product(factors: Vec<Expr>) -> Result<Expr, ExprError> {
    let mut pending = factors;
    let mut coeff = BigRational::one();
    let mut bases: BTreeMap<Expr, i64> = BTreeMap::new();
    // Radical rewrites can spill new factors, so iterate until the base map settles.
    loop {
        for f in pending.drain(..) {
            match f {
                Expr::Rational(r) => coeff *= r,
                Expr::Product(inner) => {
                    for g in inner {
                        absorb(g, &mut coeff, &mut bases)?;
                    }
                }
                g => absorb(g, &mut coeff, &mut bases)?,
            }
        }
        if coeff.is_zero() {
            return Ok(Expr::zero());
        }
        let mut settled = Vec::with_capacity(bases.len());
        for (base, n) in std::mem::take(&mut bases) {
            if n == 0 {
                continue;
            }
            match simplify_power(base, n)? {
                Expr::Rational(r) => coeff *= r,
                p @ Expr::Product(_) => pending.push(p),
                p => settled.push(p),
            }
        }
        if pending.is_empty() {
            if coeff.is_zero() {
                return Ok(Expr::zero());
            }
            settled.sort();
            return Ok(assemble_product(coeff, settled));
        }
        for p in settled {
            absorb(p, &mut coeff, &mut bases)?;
        }
    }
}

fn absorb(
    f: Expr,
    coeff: &mut BigRational,
    bases: &mut BTreeMap<Expr, i64>,
) -> Result<(), ExprError> {
    let (base, n) = match f {
        Expr::Rational(r) => {
            *coeff *= r;
            return Ok(());
        }
        Expr::Power(b, n) => (*b, n),
        other => (other, 1),
    };
    let slot = bases.entry(base).or_insert(0);
    *slot = slot
        .checked_add(n)
        .ok_or_else(|| ExprError::Malformed("exponent overflow".into()))?;
    Ok(())
}

fn assemble_product(coeff: BigRational, mut factors: Vec<Expr>) -> Expr {
    if factors.is_empty() {
        return Expr::Rational(coeff);
    }
    // A bare rational multiple of a sum distributes.
    if factors.len() == 1 {
        if let Expr::Sum(terms) = &factors[0] {
            if !coeff.is_one() {
                let c = Expr::Rational(coeff);
                return simplify_sum(
                    terms
                        .iter()
                        .map(|t| Expr::product(vec![c.clone(), t.clone()]))
                        .collect(),
                );
            }
        }
        if coeff.is_one() {
            return factors.pop().unwrap();
        }
    }
    if !coeff.is_one() {
        factors.insert(0, Expr::Rational(coeff));
    }
    Expr::Product(factors)
}

/// Raises a canonical base to an integer power.
pub(crate) fn simplify_power(base: Expr, n: i64) -> Result<Expr, ExprError> {
    if n == 0 {
        return Ok(Expr::one());
    }
    if n == 1 {
        return Ok(base);
    }
    match base {
        Expr::Rational(r) => {
            if r.is_zero() {
                if n < 0 {
                    return Err(ExprError::Malformed("division by zero".into()));
                }
                return Ok(Expr::zero());
            }
            let e = BigInt::from(n);
            Ok(Expr::Rational(Pow::pow(r, e)))
        }
        Expr::Power(b, m) => {
            let e = m
                .checked_mul(n)
                .ok_or_else(|| ExprError::Malformed("exponent overflow".into()))?;
            simplify_power(*b, e)
        }
        Expr::Product(fs) => {
            let powered = fs
                .into_iter()
                .map(|f| simplify_power(f, n))
                .collect::<Result<Vec<_>, _>>()?;
            simplify_product(powered)
        }
        Expr::Symbol(s) => match s.radical() {
            Some((radicand, negated)) => {
                let q = n.div_euclid(2);
                let r = n.rem_euclid(2);
                let mut square = Expr::Symbol(radicand);
                if negated {
                    square = Expr::product(vec![Expr::int(-1), square]);
                }
                let mut fs = vec![simplify_power(square, q)?];
                if r == 1 {
                    fs.push(Expr::Symbol(s));
                }
                simplify_product(fs)
            }
            None => Ok(Expr::Power(Box::new(Expr::Symbol(s)), n)),
        },
        other => Ok(Expr::Power(Box::new(other), n)),
    }
}

pub(crate) fn simplify_func(kind: FuncKind, arg: Expr) -> Expr {
    if arg.is_zero() && matches!(kind, FuncKind::Tan | FuncKind::Tanh) {
        return Expr::zero();
    }
    Expr::Func(kind, Box::new(arg))
}

pub(crate) fn simplify_deriv(arg: Expr, mut vars: Vec<Symbol>) -> Expr {
    if vars.is_empty() {
        return arg;
    }
    if matches!(arg, Expr::Rational(_)) {
        return Expr::zero();
    }
    // Nested derivatives merge; mixed partials commute.
    let arg = match arg {
        Expr::Deriv(inner, inner_vars) => {
            vars.extend(inner_vars);
            *inner
        }
        a => a,
    };
    vars.sort();
    Expr::Deriv(Box::new(arg), vars)
}
