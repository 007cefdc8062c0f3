use std::collections::BTreeMap;

use num_traits::ToPrimitive;

use super::{Expr, FuncKind, Symbol};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("unbound symbol {0}")]
    Unbound(Symbol),
    #[error("singular evaluation at {0}")]
    Singular(Expr),
    #[error("cannot evaluate unevaluated derivative {0}")]
    Derivative(Expr),
}

/// Evaluates `e` in double precision.
///
/// Radical symbols `sqrt(k)` / `sqrt(-k)` take their value from the binding of
/// `k` unless bound directly.
pub fn eval_numeric(e: &Expr, bindings: &BTreeMap<Symbol, f64>) -> Result<f64, EvalError> {
    let v = match e {
        Expr::Rational(r) => r.to_f64().unwrap_or(f64::NAN),
        Expr::Symbol(s) => {
            if let Some(v) = bindings.get(s) {
                *v
            } else if let Some((base, negated)) = s.radical() {
                let b = *bindings
                    .get(&base)
                    .ok_or_else(|| EvalError::Unbound(base.clone()))?;
                let radicand = if negated { -b } else { b };
                if radicand < 0.0 {
                    return Err(EvalError::Singular(e.clone()));
                }
                radicand.sqrt()
            } else {
                return Err(EvalError::Unbound(s.clone()));
            }
        }
        Expr::Sum(ts) => {
            let mut acc = 0.0;
            for t in ts {
                acc += eval_numeric(t, bindings)?;
            }
            acc
        }
        Expr::Product(fs) => {
            let mut acc = 1.0;
            for f in fs {
                acc *= eval_numeric(f, bindings)?;
            }
            acc
        }
        Expr::Power(b, n) => {
            let base = eval_numeric(b, bindings)?;
            if base == 0.0 && *n < 0 {
                return Err(EvalError::Singular(e.clone()));
            }
            powi(base, *n)
        }
        Expr::Func(kind, arg) => {
            let a = eval_numeric(arg, bindings)?;
            match kind {
                FuncKind::Tan => a.tan(),
                FuncKind::Tanh => a.tanh(),
                FuncKind::Cot => {
                    let s = a.sin();
                    if s == 0.0 {
                        return Err(EvalError::Singular(e.clone()));
                    }
                    a.cos() / s
                }
                FuncKind::Coth => {
                    if a == 0.0 {
                        return Err(EvalError::Singular(e.clone()));
                    }
                    1.0 / a.tanh()
                }
            }
        }
        Expr::Deriv(..) => return Err(EvalError::Derivative(e.clone())),
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(EvalError::Singular(e.clone()))
    }
}

fn powi(base: f64, n: i64) -> f64 {
    match i32::try_from(n) {
        Ok(k) => base.powi(k),
        Err(_) => base.powf(n as f64),
    }
}
