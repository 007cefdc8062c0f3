use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;

use super::normalize::normalize;
use super::{Expr, ExprError, FuncKind, Symbol};

/// Exact derivative with respect to `s`, treating every other symbol as a constant.
pub fn differentiate(e: &Expr, s: &Symbol) -> Expr {
    differentiate_with(e, s, &BTreeSet::new())
}

/// Total derivative with respect to `s` where the symbols in `dependents`
/// are functions of `s`. Their derivatives become `Deriv` nodes, so
/// `d/dxi (u*v)` is `u'*v + u*v'`.
pub fn differentiate_with(e: &Expr, s: &Symbol, dependents: &BTreeSet<Symbol>) -> Expr {
    match e {
        Expr::Rational(_) => Expr::zero(),
        Expr::Symbol(y) => {
            if y == s {
                Expr::one()
            } else if dependents.contains(y) {
                Expr::deriv(e.clone(), vec![s.clone()])
            } else if let Some((base, _)) = y.radical().filter(|(b, _)| b == s) {
                // d sqrt(+-k)/dk = sqrt(+-k) / (2k)
                Expr::product(vec![
                    Expr::rational(1, 2).unwrap(),
                    e.clone(),
                    Expr::Symbol(base).pow(-1).unwrap(),
                ])
            } else {
                Expr::zero()
            }
        }
        Expr::Sum(terms) => Expr::sum(
            terms
                .iter()
                .map(|t| differentiate_with(t, s, dependents))
                .collect(),
        ),
        Expr::Product(fs) => {
            let mut out = Vec::with_capacity(fs.len());
            for i in 0..fs.len() {
                let d = differentiate_with(&fs[i], s, dependents);
                if d.is_zero() {
                    continue;
                }
                let mut rest: Vec<Expr> = fs
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .map(|(_, f)| f.clone())
                    .collect();
                rest.push(d);
                out.push(Expr::product(rest));
            }
            Expr::sum(out)
        }
        Expr::Power(b, n) => {
            let db = differentiate_with(b, s, dependents);
            if db.is_zero() {
                return Expr::zero();
            }
            Expr::product(vec![Expr::int(*n), b.pow(n - 1).expect("nonzero base"), db])
        }
        Expr::Func(kind, arg) => {
            let da = differentiate_with(arg, s, dependents);
            if da.is_zero() {
                return Expr::zero();
            }
            let f2 = e.pow(2).expect("nonzero base");
            let outer = match kind {
                FuncKind::Tan => Expr::one() + f2,
                FuncKind::Cot => -(Expr::one() + f2),
                FuncKind::Tanh | FuncKind::Coth => Expr::one() - f2,
            };
            outer * da
        }
        Expr::Deriv(arg, vars) => {
            let depends = arg
                .symbols()
                .iter()
                .any(|y| dependents.contains(y) || y == s);
            if !depends {
                return Expr::zero();
            }
            let mut vs = vars.clone();
            vs.push(s.clone());
            Expr::deriv((**arg).clone(), vs)
        }
    }
}

/// Simultaneous substitution followed by normalization.
///
/// Symbols inside `Deriv` arguments are replaced as well, leaving the
/// derivative unevaluated.
pub fn substitute(e: &Expr, bindings: &BTreeMap<Symbol, Expr>) -> Result<Expr, ExprError> {
    normalize(&replace(e, bindings))
}

fn replace(e: &Expr, bindings: &BTreeMap<Symbol, Expr>) -> Expr {
    match e {
        Expr::Rational(_) => e.clone(),
        Expr::Symbol(s) => {
            if let Some(v) = bindings.get(s) {
                return v.clone();
            }
            // A bound radicand makes its square-root symbol concrete when rational.
            if let Some((base, negated)) = s.radical() {
                if let Some(Expr::Rational(r)) = bindings.get(&base) {
                    let r: BigRational = if negated { -r.clone() } else { r.clone() };
                    if let Some(root) = rational_sqrt(&r) {
                        return Expr::Rational(root);
                    }
                }
            }
            e.clone()
        }
        Expr::Sum(ts) => Expr::Sum(ts.iter().map(|t| replace(t, bindings)).collect()),
        Expr::Product(fs) => Expr::Product(fs.iter().map(|f| replace(f, bindings)).collect()),
        Expr::Power(b, n) => Expr::Power(Box::new(replace(b, bindings)), *n),
        Expr::Func(k, a) => Expr::Func(*k, Box::new(replace(a, bindings))),
        Expr::Deriv(a, vars) => Expr::Deriv(Box::new(replace(a, bindings)), vars.clone()),
    }
}

pub(crate) fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    use num_traits::Signed;
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    (&n * &n == *r.numer() && &d * &d == *r.denom()).then(|| BigRational::new(n, d))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_rule() {
        let x = Expr::sym("x");
        let d = differentiate(&x.pow(3).unwrap(), &Symbol::new("x"));
        assert_eq!(d, Expr::int(3) * x.pow(2).unwrap());
    }

    #[test]
    fn unrelated_symbol_is_constant() {
        assert_eq!(
            differentiate(&Expr::sym("k"), &Symbol::new("x")),
            Expr::zero()
        );
    }

    #[test]
    fn tanh_chain_rule() {
        let xi = Symbol::new("xi");
        let arg = Expr::sym("s") * Expr::Symbol(xi.clone());
        let th = Expr::func(FuncKind::Tanh, arg);
        let expected = Expr::sym("s") * (Expr::one() - th.pow(2).unwrap());
        assert_eq!(differentiate(&th, &xi), expected);
    }

    #[test]
    fn product_rule_on_dependent_functions() {
        let xi = Symbol::new("xi");
        let deps: BTreeSet<Symbol> = [Symbol::new("u"), Symbol::new("v")].into_iter().collect();
        let uv = Expr::sym("u") * Expr::sym("v");
        let d = differentiate_with(&uv, &xi, &deps);
        let du = Expr::deriv(Expr::sym("u"), vec![xi.clone()]);
        let dv = Expr::deriv(Expr::sym("v"), vec![xi]);
        assert_eq!(d, du * Expr::sym("v") + Expr::sym("u") * dv);
    }

    #[test]
    fn substitution_is_simultaneous() {
        let x = Symbol::new("x");
        let y = Symbol::new("y");
        let e = Expr::Symbol(x.clone()).pow(2).unwrap() + Expr::Symbol(y.clone());
        let mut b = BTreeMap::new();
        b.insert(x.clone(), Expr::int(2));
        assert_eq!(substitute(&e, &b).unwrap(), Expr::int(4) + Expr::sym("y"));
        let mut swap = BTreeMap::new();
        swap.insert(x.clone(), Expr::Symbol(y.clone()));
        swap.insert(y, Expr::Symbol(x));
        let xy = Expr::sym("x") - Expr::sym("y");
        assert_eq!(substitute(&xy, &swap).unwrap(), -xy);
    }

    #[test]
    fn substituting_zero_kills_the_term() {
        let e = Expr::sym("a1") * Expr::sym("phi");
        let mut b = BTreeMap::new();
        b.insert(Symbol::new("phi"), Expr::zero());
        assert_eq!(substitute(&e, &b).unwrap(), Expr::zero());
    }
}
