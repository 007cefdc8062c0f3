//! Sparse multivariate polynomials over Q in lexicographic order, and the
//! rational functions built from them.
//!
//! Variable `0` is the most significant in the monomial order. The solver
//! puts unknowns first and parameters last, so leading terms are driven by
//! unknowns.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::symexpr::{expand, rational_sqrt, Expr, ExprError, Symbol};

pub type Mono = Vec<u32>;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Poly {
    n: usize,
    terms: BTreeMap<Mono, BigRational>,
}

fn mono_mul(a: &Mono, b: &Mono) -> Mono {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn mono_div(a: &Mono, b: &Mono) -> Option<Mono> {
    a.iter().zip(b).map(|(x, y)| x.checked_sub(*y)).collect()
}

impl Poly {
    pub fn zero(n: usize) -> Self {
        Poly {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, c: BigRational) -> Self {
        let mut p = Poly::zero(n);
        if !c.is_zero() {
            p.terms.insert(vec![0; n], c);
        }
        p
    }

    pub fn one(n: usize) -> Self {
        Poly::constant(n, BigRational::one())
    }

    pub fn var(n: usize, i: usize) -> Self {
        Poly::monomial(n, i, 1, BigRational::one())
    }

    /// `c * x_i^d`
    pub fn monomial(n: usize, i: usize, d: u32, c: BigRational) -> Self {
        let mut m = vec![0; n];
        m[i] = d;
        let mut p = Poly::zero(n);
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    fn from_terms(n: usize, terms: BTreeMap<Mono, BigRational>) -> Self {
        Poly { n, terms }
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &BigRational)> {
        self.terms.iter()
    }

    /// The value of a constant polynomial (zero included).
    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.iter().all(|e| *e == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.as_constant().is_some()
    }

    pub fn leading(&self) -> Option<(&Mono, &BigRational)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coefficient(&self) -> BigRational {
        self.leading()
            .map(|(_, c)| c.clone())
            .unwrap_or_else(BigRational::zero)
    }

    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.keys().map(|m| m[i]).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.iter().sum()).max().unwrap_or(0)
    }

    /// Total degree counting only the variables in `vars`.
    pub fn degree_in_set(&self, vars: &[usize]) -> u32 {
        self.terms
            .keys()
            .map(|m| vars.iter().map(|&i| m[i]).sum())
            .max()
            .unwrap_or(0)
    }

    pub fn uses(&self, i: usize) -> bool {
        self.terms.keys().any(|m| m[i] > 0)
    }

    pub fn variables(&self) -> BTreeSet<usize> {
        (0..self.n).filter(|&i| self.uses(i)).collect()
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.n);
        }
        Poly::from_terms(
            self.n,
            self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect(),
        )
    }

    /// Divides by the leading coefficient.
    pub fn monic(&self) -> Poly {
        match self.leading() {
            None => self.clone(),
            Some((_, c)) => self.scale(&c.recip()),
        }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one(self.n);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Coefficients with respect to `x_i`, indexed by degree.
    pub fn coeffs_in(&self, i: usize) -> Vec<Poly> {
        let d = self.degree_in(i) as usize;
        let mut out = vec![Poly::zero(self.n); d + 1];
        for (m, c) in &self.terms {
            let mut m2 = m.clone();
            let e = m2[i] as usize;
            m2[i] = 0;
            out[e].terms.insert(m2, c.clone());
        }
        out
    }

    /// Evaluates `x_i := c`.
    pub fn eval_var(&self, i: usize, c: &BigRational) -> Poly {
        let mut acc = Poly::zero(self.n);
        for (e, coeff) in self.coeffs_in(i).into_iter().enumerate() {
            let pw = num_traits::Pow::pow(c, e as u32);
            acc = &acc + &coeff.scale(&pw);
        }
        acc
    }

    /// `den^d * self(x_i := num/den)` where `d` is the degree in `x_i`:
    /// substitution with denominators cleared.
    pub fn subst_clear(&self, i: usize, num: &Poly, den: &Poly) -> Poly {
        let cs = self.coeffs_in(i);
        let d = cs.len() - 1;
        let mut acc = Poly::zero(self.n);
        let mut num_pows = vec![Poly::one(self.n)];
        let mut den_pows = vec![Poly::one(self.n)];
        for _ in 0..d {
            num_pows.push(num_pows.last().unwrap() * num);
            den_pows.push(den_pows.last().unwrap() * den);
        }
        for (e, c) in cs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            acc = &acc + &(&(c * &num_pows[e]) * &den_pows[d - e]);
        }
        acc
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        let (dm, dc) = d.leading()?;
        let mut q = Poly::zero(self.n);
        let mut r = self.clone();
        while let Some((rm, rc)) = r.leading() {
            let m = mono_div(rm, dm)?;
            let c = rc / dc;
            let mut t = Poly::zero(self.n);
            t.terms.insert(m, c);
            r = &r - &(&t * d);
            q = &q + &t;
        }
        Some(q)
    }

    /// Groups terms by their exponents in `vars`: the map sends each exponent
    /// vector (over `vars`) to its coefficient polynomial in the other variables.
    pub fn split_over(&self, vars: &[usize]) -> BTreeMap<Vec<u32>, Poly> {
        let mut out: BTreeMap<Vec<u32>, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let key: Vec<u32> = vars.iter().map(|&i| m[i]).collect();
            let mut rest = m.clone();
            for &i in vars {
                rest[i] = 0;
            }
            out.entry(key)
                .or_insert_with(|| Poly::zero(self.n))
                .terms
                .insert(rest, c.clone());
        }
        out
    }

    /// The largest monomial dividing every term, with coefficient one.
    pub fn monomial_content(&self) -> Poly {
        let mut m: Option<Mono> = None;
        for k in self.terms.keys() {
            m = Some(match m {
                None => k.clone(),
                Some(prev) => prev.iter().zip(k).map(|(a, b)| *a.min(b)).collect(),
            });
        }
        let mut p = Poly::zero(self.n);
        p.terms
            .insert(m.unwrap_or_else(|| vec![0; self.n]), BigRational::one());
        p
    }

    /// Greatest common divisor of the coefficients in `x_i`, as a monic polynomial.
    pub fn content_in(&self, i: usize) -> Poly {
        let mut g = Poly::zero(self.n);
        for c in self.coeffs_in(i) {
            if c.is_zero() {
                continue;
            }
            g = gcd(&g, &c);
            if g.is_constant() {
                break;
            }
        }
        g
    }

    pub fn primitive_part_in(&self, i: usize) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let c = self.content_in(i);
        self.div_exact(&c).expect("content divides")
    }

    /// Scales to integer coefficients with unit content and a positive leading
    /// coefficient.
    pub fn integer_normalized(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut den = BigInt::one();
        let mut num = BigInt::zero();
        for c in self.terms.values() {
            den = den.lcm(c.denom());
        }
        for c in self.terms.values() {
            num = num.gcd(&(c * BigRational::from_integer(den.clone())).to_integer());
        }
        let mut s = BigRational::new(den, num);
        if self.leading_coefficient().is_negative() {
            s = -s;
        }
        self.scale(&s)
    }

    /// Exact square root when `self` is a perfect square in Q[x].
    pub fn sqrt(&self) -> Option<Poly> {
        if self.is_zero() {
            return Some(self.clone());
        }
        let (lm, lc) = self.leading()?;
        if lm.iter().any(|e| e % 2 == 1) {
            return None;
        }
        let root_m: Mono = lm.iter().map(|e| e / 2).collect();
        let root_c = rational_sqrt(lc)?;
        let mut lead = Poly::zero(self.n);
        lead.terms.insert(root_m.clone(), root_c.clone());
        let two_lead_c = &root_c * BigRational::from_integer(2.into());
        let bounds: Vec<u32> = (0..self.n).map(|i| self.degree_in(i) / 2).collect();
        let mut q = lead;
        let mut r = self - &(&q * &q);
        while let Some((rm, rc)) = r.leading() {
            let m = mono_div(rm, &root_m)?;
            if m >= root_m || m.iter().zip(&bounds).any(|(e, b)| e > b) {
                return None;
            }
            let mut t = Poly::zero(self.n);
            t.terms.insert(m, rc / &two_lead_c);
            r = &(&r - &(&q * &t).scale(&BigRational::from_integer(2.into()))) - &(&t * &t);
            q = &q + &t;
        }
        Some(q)
    }

    /// Rational roots of a polynomial that only involves `x_i`.
    pub fn rational_roots(&self, i: usize) -> Option<Vec<BigRational>> {
        if self.variables().iter().any(|&v| v != i) {
            return None;
        }
        let cs: Vec<BigRational> = self
            .coeffs_in(i)
            .into_iter()
            .map(|c| c.as_constant().unwrap())
            .collect();
        let mut den = BigInt::one();
        for c in &cs {
            den = den.lcm(c.denom());
        }
        let ints: Vec<BigInt> = cs
            .iter()
            .map(|c| (c * BigRational::from_integer(den.clone())).to_integer())
            .collect();
        let low = ints.iter().position(|c| !c.is_zero())?;
        let mut roots = Vec::new();
        if low > 0 {
            roots.push(BigRational::zero());
        }
        let a0 = ints[low].abs();
        let an = ints.last().unwrap().abs();
        let ps = divisors(&a0)?;
        let qs = divisors(&an)?;
        let mut seen = BTreeSet::new();
        for p in &ps {
            for q in &qs {
                for sign in [1, -1] {
                    let r = BigRational::new(p * BigInt::from(sign), q.clone());
                    if !seen.insert(r.clone()) {
                        continue;
                    }
                    let v = cs
                        .iter()
                        .rev()
                        .fold(BigRational::zero(), |acc, c| acc * &r + c);
                    if v.is_zero() {
                        roots.push(r);
                    }
                }
            }
        }
        roots.sort();
        Some(roots)
    }

    pub fn from_expr(e: &Expr, vars: &[Symbol]) -> Result<Poly, ExprError> {
        let n = vars.len();
        let index: BTreeMap<&Symbol, usize> =
            vars.iter().enumerate().map(|(i, s)| (s, i)).collect();
        let not_poly = |why: String| ExprError::NotPolynomial {
            symbol: vars.first().cloned().unwrap_or_else(|| Symbol::new("?")),
            reason: why,
        };
        let mut out = Poly::zero(n);
        for term in expand(e)?.terms() {
            let (c, rest) = term.split_coefficient();
            let mut m = vec![0u32; n];
            if !rest.is_one() {
                for f in rest.factors() {
                    let (s, d) = match &f {
                        Expr::Symbol(s) => (s.clone(), 1),
                        Expr::Power(b, d) if *d > 0 => match b.as_symbol() {
                            Some(s) => (s.clone(), *d as u32),
                            None => return Err(not_poly(format!("non-polynomial factor {f}"))),
                        },
                        _ => return Err(not_poly(format!("non-polynomial factor {f}"))),
                    };
                    let i = *index
                        .get(&s)
                        .ok_or_else(|| not_poly(format!("unexpected symbol {s}")))?;
                    m[i] += d;
                }
            }
            let slot = out.terms.entry(m).or_insert_with(BigRational::zero);
            *slot += c;
        }
        out.terms.retain(|_, c| !c.is_zero());
        Ok(out)
    }

    pub fn to_expr(&self, vars: &[Symbol]) -> Expr {
        Expr::sum(
            self.terms
                .iter()
                .map(|(m, c)| {
                    let mut fs = vec![Expr::Rational(c.clone())];
                    for (i, e) in m.iter().enumerate() {
                        if *e > 0 {
                            fs.push(Expr::Symbol(vars[i].clone()).pow(*e as i64).unwrap());
                        }
                    }
                    Expr::product(fs)
                })
                .collect(),
        )
    }
}

/// Positive divisors of a small nonzero integer; `None` when too large to enumerate.
fn divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    let n = n.to_u64().filter(|n| *n > 0 && *n <= 1_000_000_000_000)?;
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(BigInt::from(d));
            if d * d != n {
                out.push(BigInt::from(n / d));
            }
        }
        d += 1;
    }
    Some(out)
}

/// Pseudo-remainder of `a` by `b` with respect to `x_i`.
fn prem(a: &Poly, b: &Poly, i: usize) -> Poly {
    let db = b.degree_in(i);
    let lb = b.coeffs_in(i).pop().unwrap();
    let mut r = a.clone();
    while !r.is_zero() && r.uses(i) && r.degree_in(i) >= db {
        let dr = r.degree_in(i);
        let lr = r.coeffs_in(i).pop().unwrap();
        let shift = Poly::monomial(r.n, i, dr - db, BigRational::one());
        r = &(&lb * &r) - &(&(&lr * &shift) * b);
    }
    r
}

/// Monic greatest common divisor; `gcd(0, 0) = 0`.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one(a.n);
    }
    let va = a.variables();
    let vb = b.variables();
    let v = *va.union(&vb).next().unwrap();
    match (a.uses(v), b.uses(v)) {
        (true, false) => gcd(&a.content_in(v), b),
        (false, true) => gcd(a, &b.content_in(v)),
        _ => {
            let ca = a.content_in(v);
            let cb = b.content_in(v);
            let g = gcd(&ca, &cb);
            let mut p = a.div_exact(&ca).expect("content divides");
            let mut q = b.div_exact(&cb).expect("content divides");
            if p.degree_in(v) < q.degree_in(v) {
                std::mem::swap(&mut p, &mut q);
            }
            while !q.is_zero() && q.uses(v) {
                let r = prem(&p, &q, v);
                p = q;
                q = if r.is_zero() {
                    r
                } else {
                    r.primitive_part_in(v)
                };
            }
            let h = if q.is_zero() { p } else { Poly::one(a.n) };
            (&g * &h).monic()
        }
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<Symbol> = (0..self.n).map(|i| Symbol::new(&format!("x{i}"))).collect();
        write!(f, "{}", self.to_expr(&names))
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut terms = self.terms.clone();
        for (m, c) in &rhs.terms {
            let slot = terms.entry(m.clone()).or_insert_with(BigRational::zero);
            *slot += c;
            if slot.is_zero() {
                terms.remove(m);
            }
        }
        Poly::from_terms(self.n, terms)
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::from_terms(
            self.n,
            self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        )
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut terms: BTreeMap<Mono, BigRational> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let slot = terms
                    .entry(mono_mul(ma, mb))
                    .or_insert_with(BigRational::zero);
                *slot += ca * cb;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        Poly::from_terms(self.n, terms)
    }
}

/// A reduced quotient of polynomials with a monic denominator.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    /// Fails only on a zero denominator.
    pub fn new(num: Poly, den: Poly) -> Option<RatFunc> {
        if den.is_zero() {
            return None;
        }
        let g = gcd(&num, &den);
        let (mut num, mut den) = if g.is_constant() {
            (num, den)
        } else {
            (num.div_exact(&g).unwrap(), den.div_exact(&g).unwrap())
        };
        let lc = den.leading_coefficient().recip();
        num = num.scale(&lc);
        den = den.scale(&lc);
        if num.is_zero() {
            den = Poly::one(num.n);
        }
        Some(RatFunc { num, den })
    }

    pub fn from_poly(p: Poly) -> RatFunc {
        let n = p.n;
        RatFunc {
            num: p,
            den: Poly::one(n),
        }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn uses(&self, i: usize) -> bool {
        self.num.uses(i) || self.den.uses(i)
    }

    /// Substitutes `x_i := num/den`. `None` when the result has a zero denominator.
    pub fn subst(&self, i: usize, num: &Poly, den: &Poly) -> Option<RatFunc> {
        if !self.uses(i) {
            return Some(self.clone());
        }
        let dn = self.num.degree_in(i);
        let dd = self.den.degree_in(i);
        let mut n2 = self.num.subst_clear(i, num, den);
        let mut d2 = self.den.subst_clear(i, num, den);
        if dd > dn {
            n2 = &n2 * &den.pow(dd - dn);
        } else if dn > dd {
            d2 = &d2 * &den.pow(dn - dd);
        }
        RatFunc::new(n2, d2)
    }

    pub fn add(&self, o: &RatFunc) -> RatFunc {
        let num = &(&self.num * &o.den) + &(&o.num * &self.den);
        RatFunc::new(num, &self.den * &o.den).expect("nonzero denominators")
    }

    pub fn mul(&self, o: &RatFunc) -> RatFunc {
        RatFunc::new(&self.num * &o.num, &self.den * &o.den).expect("nonzero denominators")
    }

    /// `None` for the zero function.
    pub fn recip(&self) -> Option<RatFunc> {
        RatFunc::new(self.den.clone(), self.num.clone())
    }

    /// Converts an expression built from rationals, the given symbols, sums,
    /// products and integer powers.
    pub fn from_expr(e: &Expr, vars: &[Symbol]) -> Result<RatFunc, ExprError> {
        let n = vars.len();
        Ok(match e {
            Expr::Rational(r) => RatFunc::from_poly(Poly::constant(n, r.clone())),
            Expr::Symbol(_) => RatFunc::from_poly(Poly::from_expr(e, vars)?),
            Expr::Sum(ts) => {
                let mut acc = RatFunc::from_poly(Poly::zero(n));
                for t in ts {
                    acc = acc.add(&RatFunc::from_expr(t, vars)?);
                }
                acc
            }
            Expr::Product(fs) => {
                let mut acc = RatFunc::from_poly(Poly::one(n));
                for f in fs {
                    acc = acc.mul(&RatFunc::from_expr(f, vars)?);
                }
                acc
            }
            Expr::Power(b, k) => {
                let base = RatFunc::from_expr(b, vars)?;
                let base = if *k < 0 {
                    base.recip()
                        .ok_or_else(|| ExprError::Malformed("division by zero".into()))?
                } else {
                    base
                };
                let mut acc = RatFunc::from_poly(Poly::one(n));
                for _ in 0..k.unsigned_abs() {
                    acc = acc.mul(&base);
                }
                acc
            }
            Expr::Func(..) | Expr::Deriv(..) => {
                return Err(ExprError::Malformed(format!(
                    "not a rational function: {e}"
                )))
            }
        })
    }

    pub fn to_expr(&self, vars: &[Symbol]) -> Expr {
        let n = self.num.to_expr(vars);
        if let Some(c) = self.den.as_constant() {
            return Expr::product(vec![Expr::Rational(c.recip()), n]);
        }
        let d = self.den.to_expr(vars);
        n.checked_div(&d).expect("nonzero denominator")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vars(names: &[&str]) -> Vec<Symbol> {
        names.iter().map(|n| Symbol::new(n)).collect()
    }

    fn p(src: &str, vs: &[Symbol]) -> Poly {
        Poly::from_expr(&crate::parser::parse_expr(src).unwrap(), vs).unwrap()
    }

    #[test]
    fn expr_round_trip() {
        let vs = vars(&["x", "y", "k"]);
        let e = crate::parser::parse_expr("3*x^2*y - k/2 + 7").unwrap();
        assert_eq!(Poly::from_expr(&e, &vs).unwrap().to_expr(&vs), e);
    }

    #[test]
    fn exact_division_and_gcd() {
        let vs = vars(&["x", "y"]);
        let a = p("(x+y)^2*(x-1)", &vs);
        let b = p("(x+y)*(x+2)", &vs);
        assert_eq!(gcd(&a, &b), p("x+y", &vs));
        assert_eq!(a.div_exact(&p("x-1", &vs)).unwrap(), p("(x+y)^2", &vs));
        assert!(a.div_exact(&p("x+2", &vs)).is_none());
    }

    #[test]
    fn gcd_with_parametric_content() {
        let vs = vars(&["a", "k"]);
        let a = p("k*a^2 - k", &vs);
        let b = p("k^2*a + k^2", &vs);
        assert_eq!(gcd(&a, &b), p("k*a + k", &vs));
    }

    #[test]
    fn perfect_squares() {
        let vs = vars(&["a", "b", "k"]);
        assert_eq!(
            p("4*a^2 + 12*a*b + 9*b^2", &vs).sqrt().unwrap(),
            p("2*a + 3*b", &vs)
        );
        assert_eq!(p("a^2 - 2*a*k + k^2", &vs).sqrt().unwrap(), p("a - k", &vs));
        assert!(p("a^2 + 1", &vs).sqrt().is_none());
        assert!(p("a^2 + k", &vs).sqrt().is_none());
    }

    #[test]
    fn rational_root_test() {
        let vs = vars(&["a"]);
        let roots = p("6*a^3 - a^2 - 2*a", &vs).rational_roots(0).unwrap();
        let expect: Vec<BigRational> = [(-1, 2), (0, 1), (2, 3)]
            .iter()
            .map(|(n, d)| BigRational::new((*n).into(), (*d).into()))
            .collect();
        assert_eq!(roots, expect);
        assert!(p("a^2 + 1", &vs).rational_roots(0).unwrap().is_empty());
    }

    #[test]
    fn cleared_substitution() {
        let vs = vars(&["y", "a", "b"]);
        // y^2 + y with y = a/b gives a^2 + a*b after multiplying by b^2.
        let q = p("y^2 + y", &vs).subst_clear(0, &p("a", &vs), &p("b", &vs));
        assert_eq!(q, p("a^2 + a*b", &vs));
    }

    #[test]
    fn rational_function_from_expression() {
        let vs = vars(&["x", "k"]);
        let e = crate::parser::parse_expr("1/(x - k) - 1/(x + k)").unwrap();
        let r = RatFunc::from_expr(&e, &vs).unwrap();
        assert_eq!(r.num(), &p("2*k", &vs));
        assert_eq!(r.den(), &p("x^2 - k^2", &vs));
        assert_eq!(RatFunc::from_expr(&r.to_expr(&vs), &vs).unwrap(), r);
    }

    #[test]
    fn rational_function_reduction() {
        let vs = vars(&["x", "k"]);
        let r = RatFunc::new(p("2*x^2 - 2*k^2", &vs), p("4*x + 4*k", &vs)).unwrap();
        assert_eq!(r.num(), &p("x/2 - k/2", &vs));
        assert!(r.den().is_constant());
    }
}
