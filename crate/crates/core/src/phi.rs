//! Riccati-closed polynomial calculus: the ansatz `u = sum a_i phi^i` with
//! `phi' = phi^2 + k`, degree balancing, and coefficient collection.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Rational64;
use num_traits::{Signed, Zero};

use crate::symexpr::{expand, Expr, ExprError, Symbol};
use crate::wave::ODESystem;

/// Name of the auxiliary function of the ansatz.
pub const PHI: &str = "phi";
/// Name of the Riccati constant in `phi' = phi^2 + k`.
pub const RICCATI: &str = "k";

/// A polynomial in `phi` with symbolic coefficients kept in expanded form.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PhiPoly {
    coeffs: BTreeMap<u32, Expr>,
}

impl PhiPoly {
    pub fn zero() -> Self {
        PhiPoly::default()
    }

    pub fn constant(c: Expr) -> Self {
        PhiPoly::from_coeffs([(0, c)])
    }

    /// `c * phi^d`
    pub fn term(d: u32, c: Expr) -> Self {
        PhiPoly::from_coeffs([(d, c)])
    }

    pub fn from_coeffs<I: IntoIterator<Item = (u32, Expr)>>(it: I) -> Self {
        let mut p = PhiPoly::zero();
        for (d, c) in it {
            p.add_term(d, &c);
        }
        p
    }

    fn add_term(&mut self, d: u32, c: &Expr) {
        let v = match self.coeffs.remove(&d) {
            Some(old) => old + c,
            None => c.clone(),
        };
        let v = expand(&v).unwrap_or(v);
        if !v.is_zero() {
            self.coeffs.insert(d, v);
        }
    }

    pub fn coeffs(&self) -> &BTreeMap<u32, Expr> {
        &self.coeffs
    }

    pub fn coeff(&self, d: u32) -> Expr {
        self.coeffs.get(&d).cloned().unwrap_or_else(Expr::zero)
    }

    pub fn degree(&self) -> Option<u32> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, other: &PhiPoly) -> PhiPoly {
        let mut out = self.clone();
        for (d, c) in &other.coeffs {
            out.add_term(*d, c);
        }
        out
    }

    pub fn scale(&self, c: &Expr) -> PhiPoly {
        PhiPoly::from_coeffs(self.coeffs.iter().map(|(d, x)| (*d, x * c)))
    }

    pub fn mul(&self, other: &PhiPoly) -> PhiPoly {
        let mut out = PhiPoly::zero();
        for (da, ca) in &self.coeffs {
            for (db, cb) in &other.coeffs {
                out.add_term(da + db, &(ca * cb));
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> PhiPoly {
        let mut acc = PhiPoly::constant(Expr::one());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// `sum c_d * phi^d` as an expression in `phi`.
    pub fn to_expr(&self, phi: &Expr) -> Expr {
        Expr::sum(
            self.coeffs
                .iter()
                .map(|(d, c)| c * phi.pow(*d as i64).unwrap())
                .collect(),
        )
    }
}

impl fmt::Display for PhiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_expr(&Expr::sym(PHI)))
    }
}

/// `d/dxi` under the closure `phi' = phi^2 + k`:
/// `(c phi^i)' = i c phi^(i+1) + i c k phi^(i-1)`.
pub fn phi_derivative(p: &PhiPoly) -> PhiPoly {
    phi_derivative_with(p, &Expr::sym(RICCATI))
}

pub fn phi_derivative_with(p: &PhiPoly, k: &Expr) -> PhiPoly {
    let mut out = PhiPoly::zero();
    for (&i, c) in &p.coeffs {
        if i == 0 {
            continue;
        }
        let ic = Expr::int(i as i64) * c;
        out.add_term(i + 1, &ic);
        out.add_term(i - 1, &(&ic * k));
    }
    out
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AnsatzError {
    #[error("ansatz degrees must be positive, got {0:?}")]
    NonPositive(Vec<i64>),
    #[error("ansatz needs one degree per unknown function ({expected}), got {got}")]
    Arity { expected: usize, got: usize },
    #[error("ansatz symbol `{0}` collides with a system symbol")]
    NameClash(String),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// `u = a_0 + ... + a_m phi^m` (and `v = b_0 + ... + b_n phi^n`).
#[derive(Debug, Clone, PartialEq)]
pub struct Ansatz {
    pub degrees: Vec<u32>,
    pub coeff_symbols: Vec<Vec<Symbol>>,
}

const COEFF_LETTERS: [char; 2] = ['a', 'b'];

impl Ansatz {
    pub fn m(&self) -> u32 {
        self.degrees[0]
    }

    pub fn n(&self) -> Option<u32> {
        self.degrees.get(1).copied()
    }

    /// The ansatz for unknown function number `f`.
    pub fn phi_poly(&self, f: usize) -> PhiPoly {
        PhiPoly::from_coeffs(
            self.coeff_symbols[f]
                .iter()
                .enumerate()
                .map(|(i, s)| (i as u32, Expr::Symbol(s.clone()))),
        )
    }

    /// Every coefficient symbol, `a_0..a_m` then `b_0..b_n`.
    pub fn all_symbols(&self) -> Vec<Symbol> {
        self.coeff_symbols.iter().flatten().cloned().collect()
    }

    /// Leading coefficients `a_m` (and `b_n`).
    pub fn leading_symbols(&self) -> Vec<Symbol> {
        self.coeff_symbols
            .iter()
            .map(|c| c.last().unwrap().clone())
            .collect()
    }
}

/// The two-function ansatz of degrees `(m, n)`.
pub fn make_ansatz(m: i64, n: i64) -> Result<Ansatz, AnsatzError> {
    ansatz_for(&[m, n])
}

/// An ansatz with one degree per unknown function (one or two functions).
pub fn ansatz_for(degrees: &[i64]) -> Result<Ansatz, AnsatzError> {
    if degrees.is_empty() || degrees.len() > COEFF_LETTERS.len() {
        return Err(AnsatzError::Arity {
            expected: 2,
            got: degrees.len(),
        });
    }
    if degrees.iter().any(|d| *d < 1 || *d > u32::MAX as i64) {
        return Err(AnsatzError::NonPositive(degrees.to_vec()));
    }
    let coeff_symbols = degrees
        .iter()
        .zip(COEFF_LETTERS)
        .map(|(&d, letter)| {
            (0..=d)
                .map(|i| Symbol::new(&format!("{letter}{i}")))
                .collect()
        })
        .collect();
    Ok(Ansatz {
        degrees: degrees.iter().map(|d| *d as u32).collect(),
        coeff_symbols,
    })
}

/// Balancing degrees; `n` is absent for a single unknown function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Degrees {
    pub m: u32,
    pub n: Option<u32>,
}

impl Degrees {
    pub fn to_vec(self) -> Vec<i64> {
        std::iter::once(self.m)
            .chain(self.n)
            .map(i64::from)
            .collect()
    }
}

/// The phi-degree `c + alpha*m + beta*n` of an ODE monomial.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DegreeForm {
    pub constant: i64,
    pub coeffs: Vec<i64>,
}

impl DegreeForm {
    fn weight(&self) -> i64 {
        self.coeffs.iter().sum()
    }
}

impl fmt::Display for DegreeForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (c, name) in self.coeffs.iter().zip(["m", "n"]) {
            match c {
                0 => {}
                1 => parts.push(name.to_string()),
                c => parts.push(format!("{c}{name}")),
            }
        }
        if self.constant != 0 || parts.is_empty() {
            parts.push(self.constant.to_string());
        }
        f.write_str(&parts.join("+"))
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BalanceError {
    #[error("balancing has no positive integer solution; degree forms per equation: {forms}")]
    Failure { forms: String },
    #[error("balancing is underdetermined ({forms}); pass explicit degrees with --degrees M,N")]
    Ambiguous { forms: String },
    #[error("balancing supports one or two unknown functions, found {0}")]
    Unsupported(usize),
    #[error("term {0} is not a polynomial in the unknown functions")]
    NotPolynomial(String),
}

/// Per-equation degree forms of every monomial, deduplicated and sorted.
pub fn degree_forms(ode: &ODESystem) -> Result<Vec<Vec<DegreeForm>>, BalanceError> {
    let nf = ode.unknowns.len();
    let mut out = Vec::new();
    for eq in &ode.equations {
        let mut forms = Vec::new();
        for term in eq.terms() {
            let mut form = DegreeForm {
                constant: 0,
                coeffs: vec![0; nf],
            };
            let mut touches = false;
            for f in term.factors() {
                let (base, pw) = match &f {
                    Expr::Power(b, p) => ((**b).clone(), *p),
                    other => (other.clone(), 1),
                };
                let (func, order) = match &base {
                    Expr::Symbol(s) => (s.clone(), 0),
                    Expr::Deriv(a, vars) => match a.as_symbol() {
                        Some(s) => (s.clone(), vars.len() as i64),
                        None => return Err(BalanceError::NotPolynomial(term.to_string())),
                    },
                    _ => continue,
                };
                if let Some(idx) = ode.unknowns.iter().position(|u| *u == func) {
                    if pw < 0 {
                        return Err(BalanceError::NotPolynomial(term.to_string()));
                    }
                    form.coeffs[idx] += pw;
                    form.constant += pw * order;
                    touches = true;
                }
            }
            if touches {
                forms.push(form);
            }
        }
        forms.sort();
        forms.dedup();
        out.push(forms);
    }
    Ok(out)
}

fn describe_forms(forms: &[Vec<DegreeForm>]) -> String {
    forms
        .iter()
        .enumerate()
        .map(|(i, fs)| {
            let s: Vec<String> = fs.iter().map(|f| f.to_string()).collect();
            format!("eq{}: {{{}}}", i + 1, s.join(", "))
        })
        .collect::<Vec<_>>()
        .join("; ")
}

/// The degree equalities used by [`balance`] for one equation.
///
/// Forms are ranked by `(alpha + beta, c)`, largest first. When several forms
/// share the top rank they are all equated; otherwise the top form is equated
/// with every form of the next rank.
pub fn balance_pairs(forms: &[DegreeForm]) -> Vec<(DegreeForm, DegreeForm)> {
    let mut groups: BTreeMap<(i64, i64), Vec<DegreeForm>> = BTreeMap::new();
    for f in forms {
        groups
            .entry((f.weight(), f.constant))
            .or_default()
            .push(f.clone());
    }
    let mut ranked = groups.into_values().rev();
    let Some(top) = ranked.next() else {
        return Vec::new();
    };
    if top.len() >= 2 {
        return top
            .windows(2)
            .map(|w| (w[0].clone(), w[1].clone()))
            .collect();
    }
    match ranked.next() {
        Some(next) => next.into_iter().map(|f| (top[0].clone(), f)).collect(),
        None => Vec::new(),
    }
}

/// Determines the ansatz degrees by balancing highest-degree terms.
pub fn balance(ode: &ODESystem) -> Result<Degrees, BalanceError> {
    let nf = ode.unknowns.len();
    if nf == 0 || nf > 2 {
        return Err(BalanceError::Unsupported(nf));
    }
    let forms = degree_forms(ode)?;
    let described = describe_forms(&forms);
    let mut rows: Vec<(Vec<Rational64>, Rational64)> = Vec::new();
    for fs in &forms {
        for (a, b) in balance_pairs(fs) {
            let lhs: Vec<Rational64> = a
                .coeffs
                .iter()
                .zip(&b.coeffs)
                .map(|(x, y)| Rational64::from_integer(x - y))
                .collect();
            let rhs = Rational64::from_integer(b.constant - a.constant);
            if lhs.iter().all(|c| c.is_zero()) {
                if rhs.is_zero() {
                    continue;
                }
                return Err(BalanceError::Failure { forms: described });
            }
            rows.push((lhs, rhs));
        }
    }
    let solution = solve_linear(rows, nf).map_err(|singular| {
        if singular {
            BalanceError::Ambiguous {
                forms: described.clone(),
            }
        } else {
            BalanceError::Failure {
                forms: described.clone(),
            }
        }
    })?;
    let mut ints = Vec::new();
    for v in solution {
        if !v.is_integer() || !v.is_positive() {
            return Err(BalanceError::Failure { forms: described });
        }
        ints.push(v.to_integer() as u32);
    }
    Ok(Degrees {
        m: ints[0],
        n: ints.get(1).copied(),
    })
}

/// Gauss-Jordan elimination. `Err(true)` for an underdetermined system,
/// `Err(false)` for an inconsistent one.
fn solve_linear(
    mut rows: Vec<(Vec<Rational64>, Rational64)>,
    nvars: usize,
) -> Result<Vec<Rational64>, bool> {
    let mut pivot_row = 0;
    let mut pivots = Vec::new();
    for col in 0..nvars {
        let Some(r) = (pivot_row..rows.len()).find(|&r| !rows[r].0[col].is_zero()) else {
            continue;
        };
        rows.swap(pivot_row, r);
        let p = rows[pivot_row].0[col];
        for c in rows[pivot_row].0.iter_mut() {
            *c /= p;
        }
        rows[pivot_row].1 /= p;
        let (prow, prhs) = rows[pivot_row].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != pivot_row && !row.0[col].is_zero() {
                let f = row.0[col];
                for (c, pc) in row.0.iter_mut().zip(&prow) {
                    *c -= f * pc;
                }
                row.1 -= f * prhs;
            }
        }
        pivots.push(col);
        pivot_row += 1;
    }
    if rows[pivot_row..].iter().any(|(_, rhs)| !rhs.is_zero()) {
        return Err(false);
    }
    if pivots.len() < nvars {
        return Err(true);
    }
    Ok(rows[..nvars].iter().map(|(_, rhs)| *rhs).collect())
}

/// One collected coefficient equation: the coefficient of `phi^phi_power`
/// in ODE `ode_index`.
#[derive(Debug, Clone, PartialEq)]
pub struct CollectedEquation {
    pub ode_index: usize,
    pub phi_power: u32,
    pub lhs: Expr,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraicSystem {
    pub equations: Vec<CollectedEquation>,
    pub unknowns: Vec<Symbol>,
    pub parameters: Vec<Symbol>,
    /// The ansatz the equations were collected from, when there is one; it
    /// identifies leading and non-constant coefficients for branch flags.
    pub ansatz: Option<Ansatz>,
}

impl AlgebraicSystem {
    pub fn new(equations: Vec<Expr>, unknowns: Vec<Symbol>, parameters: Vec<Symbol>) -> Self {
        AlgebraicSystem {
            equations: equations
                .into_iter()
                .enumerate()
                .map(|(i, lhs)| CollectedEquation {
                    ode_index: 0,
                    phi_power: i as u32,
                    lhs,
                })
                .collect(),
            unknowns,
            parameters,
            ansatz: None,
        }
    }

    pub fn lhs(&self) -> Vec<Expr> {
        self.equations.iter().map(|e| e.lhs.clone()).collect()
    }
}

/// The ODE equations as phi-polynomials under the ansatz.
pub fn substitute_ansatz(ode: &ODESystem, ansatz: &Ansatz) -> Result<Vec<PhiPoly>, AnsatzError> {
    if ansatz.degrees.len() != ode.unknowns.len() {
        return Err(AnsatzError::Arity {
            expected: ode.unknowns.len(),
            got: ansatz.degrees.len(),
        });
    }
    let mut taken: Vec<&Symbol> = ode.parameters.iter().collect();
    taken.push(&ode.wave_speed);
    taken.extend(ode.unknowns.iter());
    for s in ansatz.all_symbols() {
        if taken.contains(&&s) || s.name() == RICCATI || s.name() == PHI {
            return Err(AnsatzError::NameClash(s.name().to_string()));
        }
    }
    for s in &taken {
        if s.name() == RICCATI || s.name() == PHI {
            return Err(AnsatzError::NameClash(s.name().to_string()));
        }
    }
    // derivs[f][r] is the r-th derivative of function f's ansatz
    let mut derivs: Vec<Vec<PhiPoly>> = (0..ode.unknowns.len())
        .map(|f| vec![ansatz.phi_poly(f)])
        .collect();
    let mut derivative = |f: usize, r: usize| -> PhiPoly {
        while derivs[f].len() <= r {
            let next = phi_derivative(derivs[f].last().unwrap());
            derivs[f].push(next);
        }
        derivs[f][r].clone()
    };
    let mut out = Vec::new();
    for eq in &ode.equations {
        let mut acc = PhiPoly::zero();
        for term in expand(eq)?.terms() {
            let mut poly = PhiPoly::constant(Expr::one());
            let mut coeff = Vec::new();
            for f in term.factors() {
                let (base, pw) = match &f {
                    Expr::Power(b, p) => ((**b).clone(), *p),
                    other => (other.clone(), 1),
                };
                let hit = match &base {
                    Expr::Symbol(s) => ode.unknowns.iter().position(|u| u == s).map(|i| (i, 0)),
                    Expr::Deriv(a, vars) => a
                        .as_symbol()
                        .and_then(|s| ode.unknowns.iter().position(|u| u == s))
                        .map(|i| (i, vars.len())),
                    _ => None,
                };
                match hit {
                    Some((i, r)) if pw > 0 => poly = poly.mul(&derivative(i, r).pow(pw as u32)),
                    Some(_) => {
                        return Err(AnsatzError::Expr(ExprError::NotPolynomial {
                            symbol: ode.unknowns[0].clone(),
                            reason: format!("negative power in {term}"),
                        }))
                    }
                    None => coeff.push(f),
                }
            }
            acc = acc.add(&poly.scale(&Expr::product(coeff)));
        }
        out.push(acc);
    }
    Ok(out)
}

/// Substitutes the ansatz and equates every phi-power coefficient to zero.
pub fn substitute_and_collect(
    ode: &ODESystem,
    ansatz: &Ansatz,
) -> Result<AlgebraicSystem, AnsatzError> {
    let polys = substitute_ansatz(ode, ansatz)?;
    let mut equations = Vec::new();
    for (ode_index, p) in polys.iter().enumerate() {
        for (d, c) in p.coeffs() {
            equations.push(CollectedEquation {
                ode_index,
                phi_power: *d,
                lhs: c.clone(),
            });
        }
    }
    let mut unknowns = ansatz.all_symbols();
    unknowns.push(ode.wave_speed.clone());
    let mut parameters = vec![Symbol::new(RICCATI)];
    parameters.extend(ode.parameters.iter().cloned());
    parameters.sort();
    Ok(AlgebraicSystem {
        equations,
        unknowns,
        parameters,
        ansatz: Some(ansatz.clone()),
    })
}
