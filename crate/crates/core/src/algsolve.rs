//! Exact case-splitting solver for parametric polynomial systems.
//!
//! Parameters are treated as transcendentals: a polynomial in parameters
//! alone is never assumed to vanish, so splits only happen on expressions
//! that involve at least one unknown. Each branch carries the nonvanishing
//! constraints under which its assignment is valid.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_rational::BigRational;
use num_traits::Zero;

use crate::mpoly::{Poly, RatFunc};
use crate::phi::AlgebraicSystem;
use crate::symexpr::{Expr, ExprError, Symbol};

pub const MAX_UNKNOWNS: usize = 8;
pub const MAX_DEGREE: u32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_depth: usize,
    pub max_branches: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_depth: 32,
            max_branches: 512,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Relation {
    NonZero,
    Zero,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Constraint {
    pub expr: Expr,
    pub relation: Relation,
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rel = match self.relation {
            Relation::NonZero => "!=",
            Relation::Zero => "=",
        };
        write!(f, "{} {} 0", self.expr, rel)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolutionBranch {
    /// Values of the solved unknowns over parameters and free unknowns.
    pub assignment: BTreeMap<Symbol, Expr>,
    pub constraints: Vec<Constraint>,
    pub free_unknowns: Vec<Symbol>,
    /// A leading ansatz coefficient (`a_m` or `b_n`) is assigned zero.
    pub degenerate: bool,
    /// Every non-constant ansatz coefficient is zero: the solution is constant.
    pub constant: bool,
}

impl SolutionBranch {
    /// The value of `s`: its assignment, or `s` itself when free.
    pub fn value(&self, s: &Symbol) -> Expr {
        self.assignment
            .get(s)
            .cloned()
            .unwrap_or_else(|| Expr::Symbol(s.clone()))
    }
}

impl fmt::Display for SolutionBranch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .assignment
            .iter()
            .map(|(s, v)| format!("{s} = {v}"))
            .collect();
        write!(f, "{{{}}}", parts.join(", "))?;
        if !self.free_unknowns.is_empty() {
            let fr: Vec<&str> = self.free_unknowns.iter().map(|s| s.name()).collect();
            write!(f, " free {}", fr.join(", "))?;
        }
        for c in &self.constraints {
            write!(f, ", {c}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub branches: Vec<SolutionBranch>,
    /// False when a limit pruned part of the search tree or a node could not
    /// be decomposed further.
    pub complete: bool,
    pub branches_explored: usize,
    pub diagnostics: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolveError {
    #[error("{count} unknowns exceed the supported maximum of {MAX_UNKNOWNS}")]
    TooManyUnknowns { count: usize },
    #[error("equation {index} has degree {degree} in the unknowns; the maximum is {MAX_DEGREE}")]
    DegreeTooHigh { index: usize, degree: u32 },
    #[error("`{0}` is declared both as an unknown and as a parameter")]
    Overlap(Symbol),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// Linear pivot ranking: coefficient class, coefficient size, equation size,
/// occurrences, unknown name, equation index.
type PivotKey<'s> = (u8, usize, usize, usize, &'s str, usize);

#[derive(Clone, Debug)]
struct Node {
    eqs: Vec<Poly>,
    assign: Vec<(usize, RatFunc)>,
    nonzero: Vec<Poly>,
    depth: usize,
}

struct Solver<'a> {
    vars: Vec<Symbol>,
    nu: usize,
    unknowns: Vec<usize>,
    diagnostics: Vec<String>,
    complete: bool,
    sys: &'a AlgebraicSystem,
}

fn variables_of(sys: &AlgebraicSystem) -> Result<Vec<Symbol>, SolveError> {
    let mut vars = sys.unknowns.clone();
    for p in &sys.parameters {
        if vars.contains(p) {
            return Err(SolveError::Overlap(p.clone()));
        }
        vars.push(p.clone());
    }
    // Symbols that appear in the equations without being declared are
    // treated as further parameters.
    let mut extra = BTreeSet::new();
    for eq in &sys.equations {
        for s in eq.lhs.symbols() {
            if !vars.contains(&s) {
                extra.insert(s);
            }
        }
    }
    vars.extend(extra);
    Ok(vars)
}

/// Solves `sys` by linear pivoting and factor splitting.
pub fn solve_system(sys: &AlgebraicSystem, limits: Limits) -> Result<SolveResult, SolveError> {
    if sys.unknowns.len() > MAX_UNKNOWNS {
        return Err(SolveError::TooManyUnknowns {
            count: sys.unknowns.len(),
        });
    }
    let vars = variables_of(sys)?;
    let nu = sys.unknowns.len();
    let unknowns: Vec<usize> = (0..nu).collect();
    let mut eqs = Vec::new();
    for (index, e) in sys.equations.iter().enumerate() {
        let p = Poly::from_expr(&e.lhs, &vars)?;
        let degree = p.degree_in_set(&unknowns);
        if degree > MAX_DEGREE {
            return Err(SolveError::DegreeTooHigh { index, degree });
        }
        eqs.push(p);
    }
    let mut solver = Solver {
        vars,
        nu,
        unknowns,
        diagnostics: Vec::new(),
        complete: true,
        sys,
    };
    let originals = eqs.clone();
    let mut stack = vec![Node {
        eqs,
        assign: Vec::new(),
        nonzero: Vec::new(),
        depth: 0,
    }];
    let mut leaves = Vec::new();
    let mut explored = 0;
    while let Some(node) = stack.pop() {
        if explored >= limits.max_branches {
            solver.complete = false;
            solver.diagnostics.push(format!(
                "branch limit {} reached; {} pending branches not explored",
                limits.max_branches,
                stack.len() + 1
            ));
            break;
        }
        explored += 1;
        let Some(node) = solver.simplify(node) else {
            continue;
        };
        if node.eqs.is_empty() {
            leaves.push(node);
            continue;
        }
        if node.depth >= limits.max_depth {
            solver.complete = false;
            solver.diagnostics.push(format!(
                "depth limit {} reached; branch pruned",
                limits.max_depth
            ));
            continue;
        }
        let children = solver.split(&node);
        stack.extend(children.into_iter().rev());
    }
    log::debug!("solver explored {explored} nodes, {} leaves", leaves.len());
    let mut branches = Vec::new();
    for leaf in leaves {
        if !solver.sound(&leaf, &originals) {
            solver
                .diagnostics
                .push("unsound leaf discarded after back-substitution".to_string());
            continue;
        }
        branches.push(solver.prune_constraints(leaf));
    }
    let branches = solver.merge(branches);
    let out: Vec<SolutionBranch> = branches.iter().map(|b| solver.to_branch(b)).collect();
    Ok(SolveResult {
        branches: out,
        complete: solver.complete,
        branches_explored: explored,
        diagnostics: solver.diagnostics,
    })
}

impl Solver<'_> {
    fn is_param_only(&self, p: &Poly) -> bool {
        !self.unknowns.iter().any(|&i| p.uses(i))
    }

    fn name(&self, i: usize) -> &str {
        self.vars[i].name()
    }

    fn render(&self, p: &Poly) -> String {
        p.to_expr(&self.vars).to_string()
    }

    /// Largest factor depending on parameters only.
    fn param_content(&self, p: &Poly) -> Poly {
        let mut g = Poly::zero(p.nvars());
        for c in p.split_over(&self.unknowns).values() {
            g = crate::mpoly::gcd(&g, c);
            if g.is_constant() {
                break;
            }
        }
        g
    }

    /// Canonical representative of an equation: parameter content and known
    /// nonzero factors removed, integer coefficients.
    fn clean(&self, p: &Poly, nonzero: &[Poly]) -> Poly {
        let mut p = p.clone();
        let c = self.param_content(&p);
        if !c.is_zero() && !c.is_constant() {
            p = p.div_exact(&c).expect("content divides");
        }
        for f in nonzero {
            if f.is_constant() {
                continue;
            }
            while let Some(q) = p.div_exact(f) {
                if q.is_constant() && !p.is_constant() && self.is_param_only(&q) {
                    // p is a multiple of a nonzero factor: it cannot vanish
                    p = Poly::one(p.nvars());
                    break;
                }
                p = q;
            }
        }
        p.integer_normalized()
    }

    fn simplify(&mut self, mut node: Node) -> Option<Node> {
        let mut nonzero = Vec::new();
        for c in node.nonzero.drain(..) {
            if c.is_zero() {
                return None;
            }
            if self.is_param_only(&c) {
                continue;
            }
            let c = self.clean(&c, &[]);
            if !nonzero.contains(&c) {
                nonzero.push(c);
            }
        }
        nonzero.sort();
        let mut eqs = Vec::new();
        for e in &node.eqs {
            if e.is_zero() {
                continue;
            }
            if self.is_param_only(e) {
                return None;
            }
            let e = self.clean(e, &nonzero);
            if self.is_param_only(&e) {
                return None;
            }
            eqs.push(e);
        }
        eqs.sort_by(|a, b| {
            a.degree_in_set(&self.unknowns)
                .cmp(&b.degree_in_set(&self.unknowns))
                .then(a.len().cmp(&b.len()))
                .then(a.cmp(b))
        });
        eqs.dedup();
        node.eqs = eqs;
        node.nonzero = nonzero;
        Some(node)
    }

    fn split(&mut self, node: &Node) -> Vec<Node> {
        for (ei, eq) in node.eqs.iter().enumerate() {
            if let Some(fs) = self.monomial_factor(eq) {
                return self.factor_children(node, ei, fs);
            }
        }
        if let Some(children) = self.linear_split(node) {
            return children;
        }
        for (ei, eq) in node.eqs.iter().enumerate() {
            match self.factor(eq) {
                Factoring::Factors(fs) => return self.factor_children(node, ei, fs),
                Factoring::NoRationalZero => {
                    self.diagnostics.push(format!(
                        "no rational solution of {} = 0; branch pruned",
                        self.render(eq)
                    ));
                    return Vec::new();
                }
                Factoring::Irreducible => {}
            }
        }
        self.complete = false;
        let eqs: Vec<String> = node.eqs.iter().map(|e| self.render(e)).collect();
        self.diagnostics.push(format!(
            "could not decompose the system {{{}}}",
            eqs.join(", ")
        ));
        Vec::new()
    }

    fn linear_split(&self, node: &Node) -> Option<Vec<Node>> {
        let occurrences: Vec<usize> = (0..self.nu)
            .map(|y| node.eqs.iter().filter(|e| e.uses(y)).count())
            .collect();
        let mut best: Option<(PivotKey<'_>, usize, usize)> = None;
        for (ei, eq) in node.eqs.iter().enumerate() {
            for (y, &occ) in occurrences.iter().enumerate() {
                if eq.degree_in(y) != 1 {
                    continue;
                }
                let a = eq.coeffs_in(y).pop().unwrap();
                let class = if a.is_constant() {
                    0
                } else if self.is_param_only(&a) {
                    1
                } else {
                    2
                };
                let key = (class, a.len(), eq.len(), occ, self.name(y), ei);
                if best.as_ref().is_none_or(|(k, _, _)| key < *k) {
                    best = Some((key, ei, y));
                }
            }
        }
        let (_, ei, y) = best?;
        let cs = node.eqs[ei].coeffs_in(y);
        let (b, a) = (&cs[0], &cs[1]);
        let mut out = Vec::new();
        if let Some(child) = self.assign(node, ei, y, a, b) {
            out.push(child);
        }
        if !self.is_param_only(a) {
            let mut eqs: Vec<Poly> = node
                .eqs
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != ei)
                .map(|(_, e)| e.clone())
                .collect();
            eqs.push(a.clone());
            eqs.push(b.clone());
            out.push(Node {
                eqs,
                assign: node.assign.clone(),
                nonzero: node.nonzero.clone(),
                depth: node.depth + 1,
            });
        }
        Some(out)
    }

    /// Child with `x_y := -b/a` under `a != 0`.
    fn assign(&self, node: &Node, skip: usize, y: usize, a: &Poly, b: &Poly) -> Option<Node> {
        let num = -b;
        let den = a.clone();
        let eqs = node
            .eqs
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != skip)
            .map(|(_, e)| {
                if e.uses(y) {
                    e.subst_clear(y, &num, &den)
                } else {
                    e.clone()
                }
            })
            .collect();
        let mut assign = Vec::with_capacity(node.assign.len() + 1);
        for (v, val) in &node.assign {
            assign.push((*v, val.subst(y, &num, &den)?));
        }
        assign.push((y, RatFunc::new(num.clone(), den.clone())?));
        let mut nonzero: Vec<Poly> = node
            .nonzero
            .iter()
            .map(|c| {
                if c.uses(y) {
                    c.subst_clear(y, &num, &den)
                } else {
                    c.clone()
                }
            })
            .collect();
        nonzero.push(den);
        Some(Node {
            eqs,
            assign,
            nonzero,
            depth: node.depth + 1,
        })
    }

    fn factor_children(&self, node: &Node, ei: usize, factors: Vec<Poly>) -> Vec<Node> {
        let mut out = Vec::new();
        for (j, f) in factors.iter().enumerate() {
            let mut eqs = node.eqs.clone();
            eqs[ei] = f.clone();
            let mut nonzero = node.nonzero.clone();
            nonzero.extend(factors[..j].iter().cloned());
            out.push(Node {
                eqs,
                assign: node.assign.clone(),
                nonzero,
                depth: node.depth + 1,
            });
        }
        out
    }

    /// Splits off a monomial factor in the unknowns, if any.
    fn monomial_factor(&self, eq: &Poly) -> Option<Vec<Poly>> {
        let n = eq.nvars();
        let mut min_exp: Vec<u32> = vec![u32::MAX; self.nu];
        for (m, _) in eq.terms() {
            for i in 0..self.nu {
                min_exp[i] = min_exp[i].min(m[i]);
            }
        }
        let mono_vars: Vec<usize> = (0..self.nu).filter(|&i| min_exp[i] > 0).collect();
        if !mono_vars.is_empty() {
            let mut m = Poly::one(n);
            for &i in &mono_vars {
                m = &m * &Poly::monomial(n, i, min_exp[i], BigRational::from_integer(1.into()));
            }
            let rest = eq.div_exact(&m).expect("monomial divides");
            let mut fs: Vec<Poly> = mono_vars.iter().map(|&i| Poly::var(n, i)).collect();
            if !self.is_param_only(&rest) {
                fs.push(rest);
            }
            if fs.len() == 1 && fs[0].integer_normalized() == eq.integer_normalized() {
                return None;
            }
            return Some(fs);
        }
        None
    }

    fn factor(&self, eq: &Poly) -> Factoring {
        let n = eq.nvars();
        let used: Vec<usize> = self
            .unknowns
            .iter()
            .copied()
            .filter(|&i| eq.uses(i))
            .collect();
        if let Some(fs) = self.monomial_factor(eq) {
            return Factoring::Factors(fs);
        }
        // content with respect to one unknown
        for &y in &used {
            let c = eq.content_in(y);
            if !self.is_param_only(&c) {
                let rest = eq.div_exact(&c).expect("content divides");
                return Factoring::Factors(vec![c, rest]);
            }
        }
        // quadratic with a square discriminant
        for &y in &used {
            if eq.degree_in(y) != 2 {
                continue;
            }
            let cs = eq.coeffs_in(y);
            let (c, b, a) = (&cs[0], &cs[1], &cs[2]);
            let disc = &(b * b) - &(a * c).scale(&BigRational::from_integer(4.into()));
            let Some(s) = disc.sqrt() else { continue };
            let two_ay_b = &(a * &Poly::var(n, y)).scale(&BigRational::from_integer(2.into())) + b;
            for cand in [&two_ay_b - &s, &two_ay_b + &s] {
                if cand.is_zero() || !cand.uses(y) {
                    continue;
                }
                let f1 = cand.primitive_part_in(y);
                if let Some(f2) = eq.div_exact(&f1) {
                    let mut fs = vec![f1.clone()];
                    if !self.is_param_only(&f2)
                        && f2.integer_normalized() != f1.integer_normalized()
                    {
                        fs.push(f2);
                    }
                    return Factoring::Factors(fs);
                }
            }
        }
        // a single unknown with rational coefficients
        if used.len() == 1 && eq.variables().len() == 1 {
            let y = used[0];
            let roots = eq.rational_roots(y).unwrap_or_default();
            if roots.is_empty() {
                return Factoring::NoRationalZero;
            }
            let fs: Vec<Poly> = roots
                .iter()
                .map(|r| &Poly::var(n, y) - &Poly::constant(n, r.clone()))
                .collect();
            let mut cofactor = eq.clone();
            for f in &fs {
                while let Some(q) = cofactor.div_exact(f) {
                    cofactor = q;
                }
            }
            if !cofactor.is_constant() {
                log::debug!(
                    "dropping factor {} without rational roots",
                    self.render(&cofactor)
                );
            }
            return Factoring::Factors(fs);
        }
        if used.len() == 1 {
            // univariate over the parameters with no factorization found
            return Factoring::NoRationalZero;
        }
        Factoring::Irreducible
    }

    fn sound(&self, leaf: &Node, originals: &[Poly]) -> bool {
        originals.iter().all(|e| {
            let mut r = RatFunc::from_poly(e.clone());
            for (v, val) in &leaf.assign {
                match r.subst(*v, val.num(), val.den()) {
                    Some(x) => r = x,
                    None => return false,
                }
            }
            r.is_zero()
        })
    }

    /// Keeps only the constraints that guard a denominator of the assignment;
    /// the others record how the branch was reached, not where it is valid.
    fn prune_constraints(&self, mut leaf: Node) -> Node {
        let dens: Vec<&Poly> = leaf.assign.iter().map(|(_, r)| r.den()).collect();
        leaf.nonzero
            .retain(|c| dens.iter().any(|d| !crate::mpoly::gcd(c, d).is_constant()));
        leaf
    }

    fn value_of(&self, leaf: &Node, v: usize) -> RatFunc {
        leaf.assign
            .iter()
            .find(|(x, _)| *x == v)
            .map(|(_, r)| r.clone())
            .unwrap_or_else(|| RatFunc::from_poly(Poly::var(self.vars.len(), v)))
    }

    /// True when `b` is a specialization of `a`: every value of `a`, with
    /// `b`'s assignment applied, equals `b`'s value, and `a`'s constraints
    /// stay nonzero.
    fn specializes(&self, b: &Node, a: &Node) -> bool {
        let apply = |r: &RatFunc| -> Option<RatFunc> {
            let mut r = r.clone();
            for (v, val) in &b.assign {
                r = r.subst(*v, val.num(), val.den())?;
            }
            Some(r)
        };
        for v in 0..self.nu {
            match apply(&self.value_of(a, v)) {
                Some(x) if x == self.value_of(b, v) => {}
                _ => return false,
            }
        }
        a.nonzero
            .iter()
            .all(|c| apply(&RatFunc::from_poly(c.clone())).is_some_and(|x| !x.is_zero()))
    }

    fn merge(&self, leaves: Vec<Node>) -> Vec<Node> {
        let mut leaves: Vec<Node> = leaves
            .into_iter()
            .map(|mut l| {
                l.assign.sort_by_key(|(v, _)| *v);
                l
            })
            .collect();
        // fewer assignments (more general) first, then fewer constraints
        leaves.sort_by(|x, y| {
            x.assign
                .len()
                .cmp(&y.assign.len())
                .then(x.nonzero.len().cmp(&y.nonzero.len()))
        });
        let mut kept: Vec<Node> = Vec::new();
        for leaf in leaves {
            if kept.iter().any(|k| self.specializes(&leaf, k)) {
                continue;
            }
            kept.push(leaf);
        }
        let mut keyed: Vec<(String, Node)> = kept
            .into_iter()
            .map(|l| (self.to_branch(&l).to_string(), l))
            .collect();
        keyed.sort_by(|a, b| a.0.cmp(&b.0));
        keyed.into_iter().map(|(_, l)| l).collect()
    }

    fn to_branch(&self, leaf: &Node) -> SolutionBranch {
        let mut assignment = BTreeMap::new();
        for (v, val) in &leaf.assign {
            assignment.insert(self.vars[*v].clone(), val.to_expr(&self.vars));
        }
        let free_unknowns: Vec<Symbol> = self
            .sys
            .unknowns
            .iter()
            .filter(|s| !assignment.contains_key(*s))
            .cloned()
            .collect();
        let mut constraints: Vec<Constraint> = leaf
            .nonzero
            .iter()
            .filter(|c| !self.is_param_only(c))
            .map(|c| Constraint {
                expr: c.to_expr(&self.vars),
                relation: Relation::NonZero,
            })
            .collect();
        constraints.sort();
        constraints.dedup();
        let (degenerate, constant) = flags(self.sys, &assignment);
        SolutionBranch {
            assignment,
            constraints,
            free_unknowns,
            degenerate,
            constant,
        }
    }
}

enum Factoring {
    Factors(Vec<Poly>),
    /// The equation has no solution over the rationals in the parameters.
    NoRationalZero,
    Irreducible,
}

fn flags(sys: &AlgebraicSystem, assignment: &BTreeMap<Symbol, Expr>) -> (bool, bool) {
    let Some(ansatz) = &sys.ansatz else {
        return (false, false);
    };
    let is_zero = |s: &Symbol| assignment.get(s).is_some_and(|v| v.is_zero());
    let degenerate = ansatz.leading_symbols().iter().any(is_zero);
    let constant = ansatz
        .coeff_symbols
        .iter()
        .all(|cs| cs[1..].iter().all(is_zero));
    (degenerate, constant)
}

/// True when every equation vanishes identically under the branch, with its
/// `= 0` constraints used as rewrite rules and everything else generic.
pub fn check_assignment(sys: &AlgebraicSystem, branch: &SolutionBranch) -> bool {
    let Ok(vars) = variables_of(sys).map(|mut v| {
        for s in branch.free_unknowns.iter().chain(branch.assignment.keys()) {
            if !v.contains(s) {
                v.push(s.clone());
            }
        }
        for s in branch.assignment.values().flat_map(|e| e.symbols()) {
            if !v.contains(&s) {
                v.push(s);
            }
        }
        v
    }) else {
        return false;
    };
    let mut values = Vec::new();
    for (s, e) in &branch.assignment {
        let i = vars.iter().position(|v| v == s).unwrap();
        match RatFunc::from_expr(e, &vars) {
            Ok(r) => values.push((i, r)),
            Err(_) => return false,
        }
    }
    let mut rules = Vec::new();
    for c in &branch.constraints {
        if c.relation == Relation::Zero {
            match Poly::from_expr(&c.expr, &vars) {
                Ok(p) if !p.is_zero() => rules.push(p),
                Ok(_) => {}
                Err(_) => return false,
            }
        }
    }
    sys.equations.iter().all(|eq| {
        let Ok(p) = Poly::from_expr(&eq.lhs, &vars) else {
            return false;
        };
        let mut r = RatFunc::from_poly(p);
        for (i, val) in &values {
            match r.subst(*i, val.num(), val.den()) {
                Some(x) => r = x,
                None => return false,
            }
        }
        r.is_zero() || reduce(r.num(), &rules).is_zero()
    })
}

/// Normal form of `p` under greedy leading-term division by `rules`.
fn reduce(p: &Poly, rules: &[Poly]) -> Poly {
    if rules.is_empty() {
        return p.clone();
    }
    let mut p = p.clone();
    let mut rest = Poly::zero(p.nvars());
    'outer: while let Some((m, c)) = p.leading().map(|(m, c)| (m.clone(), c.clone())) {
        for g in rules {
            let (gm, gc) = g.leading().unwrap();
            if m.iter().zip(gm).all(|(a, b)| a >= b) {
                let q: Vec<u32> = m.iter().zip(gm).map(|(a, b)| a - b).collect();
                let mut t = Poly::one(p.nvars());
                for (i, e) in q.iter().enumerate() {
                    if *e > 0 {
                        t = &t
                            * &Poly::monomial(
                                p.nvars(),
                                i,
                                *e,
                                BigRational::from_integer(1.into()),
                            );
                    }
                }
                let t = t.scale(&(&c / gc));
                p = &p - &(&t * g);
                continue 'outer;
            }
        }
        let mut lt = Poly::one(p.nvars());
        for (i, e) in m.iter().enumerate() {
            if *e > 0 {
                lt = &lt * &Poly::monomial(p.nvars(), i, *e, BigRational::from_integer(1.into()));
            }
        }
        let lt = lt.scale(&c);
        rest = &rest + &lt;
        p = &p - &lt;
    }
    debug_assert!(p.is_zero() || rest.leading_coefficient() != BigRational::zero());
    rest
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_expr;

    fn system(eqs: &[&str], unknowns: &[&str], params: &[&str]) -> AlgebraicSystem {
        AlgebraicSystem::new(
            eqs.iter().map(|e| parse_expr(e).unwrap()).collect(),
            unknowns.iter().map(|s| Symbol::new(s)).collect(),
            params.iter().map(|s| Symbol::new(s)).collect(),
        )
    }

    fn assignments(r: &SolveResult) -> Vec<String> {
        r.branches.iter().map(|b| b.to_string()).collect()
    }

    #[test]
    fn triangular_system() {
        let sys = system(&["a1 - 3", "lambda + 7*k"], &["a1", "lambda"], &["k"]);
        let r = solve_system(&sys, Limits::default()).unwrap();
        assert_eq!(assignments(&r), vec!["{a1 = 3, lambda = -7*k}"]);
        assert!(r.complete);
    }

    #[test]
    fn product_splits_into_two_branches() {
        let sys = system(&["a*b"], &["a", "b"], &[]);
        let r = solve_system(&sys, Limits::default()).unwrap();
        assert_eq!(assignments(&r), vec!["{a = 0} free b", "{b = 0} free a"]);
    }

    #[test]
    fn quadratic_with_square_discriminant() {
        let sys = system(&["a^2 - 4*k^2", "b - a"], &["a", "b"], &["k"]);
        let r = solve_system(&sys, Limits::default()).unwrap();
        assert_eq!(
            assignments(&r),
            vec!["{a = -2*k, b = -2*k}", "{a = 2*k, b = 2*k}"]
        );
    }

    #[test]
    fn parametric_pivot_records_constraint() {
        let sys = system(&["a*b - k"], &["a", "b"], &["k"]);
        let r = solve_system(&sys, Limits::default()).unwrap();
        assert_eq!(r.branches.len(), 1);
        let b = &r.branches[0];
        assert_eq!(b.constraints.len(), 1);
        assert!(check_assignment(&sys, b));
    }

    #[test]
    fn no_rational_root() {
        let sys = system(&["a^2 + 1"], &["a"], &[]);
        let r = solve_system(&sys, Limits::default()).unwrap();
        assert!(r.branches.is_empty());
        assert!(!r.diagnostics.is_empty());
    }

    #[test]
    fn inconsistent_parameters() {
        let sys = system(&["a", "a - k"], &["a"], &["k"]);
        assert!(solve_system(&sys, Limits::default())
            .unwrap()
            .branches
            .is_empty());
    }

    #[test]
    fn check_assignment_cases() {
        let sys = system(&["a1"], &["a1"], &[]);
        let bad = SolutionBranch {
            assignment: [(Symbol::new("a1"), Expr::one())].into_iter().collect(),
            constraints: vec![],
            free_unknowns: vec![],
            degenerate: false,
            constant: false,
        };
        assert!(!check_assignment(&sys, &bad));
        let empty = system(&[], &["a1"], &[]);
        assert!(check_assignment(&empty, &bad));
    }

    #[test]
    fn scope_is_enforced() {
        let sys = system(&["a^5 - 1"], &["a"], &[]);
        assert!(matches!(
            solve_system(&sys, Limits::default()),
            Err(SolveError::DegreeTooHigh { .. })
        ));
    }

    #[test]
    fn branch_limit_marks_incomplete() {
        let sys = system(&["a*b", "b*c", "c*a"], &["a", "b", "c"], &[]);
        let r = solve_system(
            &sys,
            Limits {
                max_depth: 32,
                max_branches: 2,
            },
        )
        .unwrap();
        assert!(!r.complete);
    }
}
