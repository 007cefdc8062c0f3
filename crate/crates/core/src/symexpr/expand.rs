use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{Expr, ExprError, Symbol};

pub const DEFAULT_EXPANSION_CAP: usize = 100_000;

type Terms = BTreeMap<Expr, BigRational>;

/// Fully distributes products and positive powers of sums.
///
/// Function nodes, derivative nodes and negative powers are treated as atoms.
pub fn expand(e: &Expr) -> Result<Expr, ExprError> {
    expand_with_cap(e, DEFAULT_EXPANSION_CAP)
}

pub fn expand_with_cap(e: &Expr, cap: usize) -> Result<Expr, ExprError> {
    let terms = expand_terms(e, cap)?;
    Ok(Expr::sum(
        terms
            .into_iter()
            .map(|(body, c)| Expr::product(vec![Expr::Rational(c), body]))
            .collect(),
    ))
}

fn single(body: Expr, c: BigRational) -> Terms {
    let mut t = Terms::new();
    if !c.is_zero() {
        t.insert(body, c);
    }
    t
}

fn add_into(acc: &mut Terms, body: Expr, c: BigRational) {
    let slot = acc.entry(body).or_insert_with(BigRational::zero);
    *slot += c;
}

fn expand_terms(e: &Expr, cap: usize) -> Result<Terms, ExprError> {
    Ok(match e {
        Expr::Rational(r) => single(Expr::one(), r.clone()),
        Expr::Symbol(_) | Expr::Func(..) | Expr::Deriv(..) => single(e.clone(), BigRational::one()),
        Expr::Sum(ts) => {
            let mut acc = Terms::new();
            for t in ts {
                for (body, c) in expand_terms(t, cap)? {
                    add_into(&mut acc, body, c);
                }
            }
            acc.retain(|_, c| !c.is_zero());
            acc
        }
        Expr::Product(fs) => {
            let mut acc = single(Expr::one(), BigRational::one());
            for f in fs {
                let rhs = expand_terms(f, cap)?;
                acc = multiply(&acc, &rhs, cap)?;
            }
            acc
        }
        Expr::Power(b, n) if *n > 0 => {
            let base = expand_terms(b, cap)?;
            if base.len() == 1 {
                let (body, c) = base.into_iter().next().unwrap();
                let (c2, body2) = body.pow(*n)?.split_coefficient();
                single(body2, num_traits::Pow::pow(c, *n as u64) * c2)
            } else {
                let mut acc = base.clone();
                for _ in 1..*n {
                    acc = multiply(&acc, &base, cap)?;
                }
                acc
            }
        }
        Expr::Power(b, n) => {
            let inner = expand_with_cap(b, cap)?;
            let (c, body) = inner.pow(*n)?.split_coefficient();
            single(body, c)
        }
    })
}

fn multiply(a: &Terms, b: &Terms, cap: usize) -> Result<Terms, ExprError> {
    if a.len().saturating_mul(b.len()) > cap.saturating_mul(4) {
        return Err(ExprError::ExpansionTooLarge { cap });
    }
    let mut acc = Terms::new();
    for (ba, ca) in a {
        for (bb, cb) in b {
            let prod = Expr::product(vec![ba.clone(), bb.clone()]);
            let (c, body) = prod.split_coefficient();
            add_into(&mut acc, body, c * ca * cb);
        }
    }
    acc.retain(|_, c| !c.is_zero());
    if acc.len() > cap {
        return Err(ExprError::ExpansionTooLarge { cap });
    }
    Ok(acc)
}

/// Degree-to-coefficient map of `e` viewed as a polynomial in `s`.
///
/// The expression is expanded first; zero coefficients are never stored.
pub fn as_polynomial(e: &Expr, s: &Symbol) -> Result<BTreeMap<u32, Expr>, ExprError> {
    let expanded = expand(e)?;
    let mut out: BTreeMap<u32, Vec<Expr>> = BTreeMap::new();
    for term in expanded.terms() {
        let mut degree = 0u32;
        let mut rest = Vec::new();
        for f in term.factors() {
            match &f {
                Expr::Symbol(y) if y == s => degree += 1,
                Expr::Power(b, n) if b.as_symbol() == Some(s) => {
                    if *n < 0 {
                        return Err(ExprError::NotPolynomial {
                            symbol: s.clone(),
                            reason: "negative power".into(),
                        });
                    }
                    degree += *n as u32;
                }
                other if other.contains_symbol(s) => {
                    return Err(ExprError::NotPolynomial {
                        symbol: s.clone(),
                        reason: format!("occurs inside {other}"),
                    });
                }
                other => rest.push(other.clone()),
            }
        }
        out.entry(degree).or_default().push(Expr::product(rest));
    }
    Ok(out
        .into_iter()
        .map(|(d, cs)| (d, Expr::sum(cs)))
        .filter(|(_, c)| !c.is_zero())
        .collect())
}
