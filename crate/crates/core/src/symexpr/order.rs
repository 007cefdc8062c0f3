//! Canonical total order on expressions.
//!
//! Rationals sort first. Products and sums compare their operand lists from
//! the last element backwards, and a non-product operand compares as a
//! one-element product (likewise `x` compares as `x^1`). This keeps `x`,
//! `x^2` and `2*x` adjacent and gives readable sums when rendered in reverse.

use std::cmp::Ordering;

use super::Expr;

impl Ord for Expr {
    fn cmp(&self, other: &Self) -> Ordering {
        canonical_cmp(self, other).then_with(|| structural_cmp(self, other))
    }
}

impl PartialOrd for Expr {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn canonical_cmp(a: &Expr, b: &Expr) -> Ordering {
    use Expr::*;
    match (a, b) {
        (Rational(x), Rational(y)) => x.cmp(y),
        (Rational(_), _) => Ordering::Less,
        (_, Rational(_)) => Ordering::Greater,
        (Symbol(x), Symbol(y)) => x.cmp(y),
        (Sum(x), Sum(y)) | (Product(x), Product(y)) => cmp_reversed(x, y),
        (Power(b1, e1), Power(b2, e2)) => canonical_cmp(b1, b2).then(e1.cmp(e2)),
        (Func(k1, a1), Func(k2, a2)) => k1.cmp(k2).then_with(|| canonical_cmp(a1, a2)),
        (Deriv(a1, v1), Deriv(a2, v2)) => canonical_cmp(a1, a2)
            .then(v1.len().cmp(&v2.len()))
            .then_with(|| v1.cmp(v2)),
        (Product(x), _) => cmp_reversed(x, std::slice::from_ref(b)),
        (_, Product(y)) => cmp_reversed(std::slice::from_ref(a), y),
        (Power(b1, e1), _) => canonical_cmp(b1, b).then(e1.cmp(&1)),
        (_, Power(b2, e2)) => canonical_cmp(a, b2).then(1.cmp(e2)),
        (Sum(x), _) => cmp_reversed(x, std::slice::from_ref(b)),
        (_, Sum(y)) => cmp_reversed(std::slice::from_ref(a), y),
        (Symbol(_), _) => Ordering::Less,
        (_, Symbol(_)) => Ordering::Greater,
        (Func(..), Deriv(..)) => Ordering::Less,
        (Deriv(..), Func(..)) => Ordering::Greater,
    }
}

fn cmp_reversed(x: &[Expr], y: &[Expr]) -> Ordering {
    for (p, q) in x.iter().rev().zip(y.iter().rev()) {
        let c = canonical_cmp(p, q);
        if c != Ordering::Equal {
            return c;
        }
    }
    x.len().cmp(&y.len())
}

fn rank(e: &Expr) -> u8 {
    match e {
        Expr::Rational(_) => 0,
        Expr::Symbol(_) => 1,
        Expr::Power(..) => 2,
        Expr::Product(_) => 3,
        Expr::Sum(_) => 4,
        Expr::Func(..) => 5,
        Expr::Deriv(..) => 6,
    }
}

// Only reached for non-canonical trees that the canonical order cannot tell apart.
fn structural_cmp(a: &Expr, b: &Expr) -> Ordering {
    use Expr::*;
    match (a, b) {
        (Rational(x), Rational(y)) => x.cmp(y),
        (Symbol(x), Symbol(y)) => x.cmp(y),
        (Sum(x), Sum(y)) | (Product(x), Product(y)) => x.len().cmp(&y.len()).then_with(|| {
            x.iter()
                .zip(y)
                .map(|(p, q)| p.cmp(q))
                .find(|c| *c != Ordering::Equal)
                .unwrap_or(Ordering::Equal)
        }),
        (Power(b1, e1), Power(b2, e2)) => e1.cmp(e2).then_with(|| b1.cmp(b2)),
        (Func(k1, a1), Func(k2, a2)) => k1.cmp(k2).then_with(|| a1.cmp(a2)),
        (Deriv(a1, v1), Deriv(a2, v2)) => v1.cmp(v2).then_with(|| a1.cmp(a2)),
        _ => rank(a).cmp(&rank(b)),
    }
}
