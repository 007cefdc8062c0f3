//! Generators and property checks shared by the property suite and the
//! acceptance harness. Every check takes its case count explicitly and runs
//! on a deterministic ChaCha stream, so a failure reproduces exactly.

#![allow(dead_code)]

use std::collections::BTreeMap;

use num_rational::BigRational;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

use twsolve::algsolve::{check_assignment, solve_system, Limits, SolutionBranch};
use twsolve::parser::{parse_expr, render_expr, RenderFormat};
use twsolve::phi::{phi_derivative, AlgebraicSystem, PhiPoly};
use twsolve::pipeline::{run_solve, RunConfig};
use twsolve::solutions::{phi_branch_expr, BranchKind, OutputFormat};
use twsolve::symexpr::{
    differentiate, eval_numeric, normalize, substitute, Expr, FuncKind, Symbol,
};

/// Relative agreement required between exact and central-difference derivatives.
pub const FD_REL_TOL: f64 = 1e-5;
/// Central-difference step.
pub const FD_STEP: f64 = 1e-5;

pub fn runner(cases: u32) -> TestRunner {
    let config = Config {
        cases,
        max_global_rejects: 100_000,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn small_rational() -> impl Strategy<Value = Expr> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| Expr::rational(n, d).unwrap())
}

/// Expressions in `x` and `y` over the four transcendental functions.
pub fn expr_strategy() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        3 => Just(Expr::sym("x")),
        1 => Just(Expr::sym("y")),
        2 => small_rational(),
    ];
    leaf.prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            3 => prop::collection::vec(inner.clone(), 2..4).prop_map(Expr::sum),
            3 => prop::collection::vec(inner.clone(), 2..3).prop_map(Expr::product),
            2 => (inner.clone(), 0i64..=3).prop_map(|(b, n)| b.pow(n).unwrap_or_else(|_| Expr::one())),
            1 => inner.clone().prop_map(|b| b.pow(-1).unwrap_or_else(|_| Expr::one())),
            2 => (
                prop::sample::select(vec![FuncKind::Tan, FuncKind::Cot, FuncKind::Tanh, FuncKind::Coth]),
                inner,
            )
                .prop_map(|(k, a)| Expr::func(k, a)),
        ]
    })
}

/// Symbolic derivative against central differences.
pub fn check_differentiation(cases: u32) -> Result<(), String> {
    let x = Symbol::new("x");
    runner(cases)
        .run(&(expr_strategy(), -1.5f64..1.5), |(e, x0)| {
            let at = |xv: f64| {
                eval_numeric(
                    &e,
                    &BTreeMap::from([(x.clone(), xv), (Symbol::new("y"), 0.7)]),
                )
            };
            let (Ok(lo), Ok(mid), Ok(hi)) = (at(x0 - FD_STEP), at(x0), at(x0 + FD_STEP)) else {
                return Err(TestCaseError::reject("pole"));
            };
            let fd = (hi - lo) / (2.0 * FD_STEP);
            prop_assume!(lo.is_finite() && hi.is_finite() && mid.abs() < 1e3 && fd.abs() < 1e3);
            let d = differentiate(&e, &x);
            let exact = eval_numeric(
                &d,
                &BTreeMap::from([(x.clone(), x0), (Symbol::new("y"), 0.7)]),
            )
            .map_err(|err| TestCaseError::fail(format!("{d}: {err}")))?;
            // curvature bounds the truncation error; skip stiff points
            let curvature = ((hi - 2.0 * mid + lo) / (FD_STEP * FD_STEP)).abs();
            prop_assume!(curvature < 1e4);
            let err = (exact - fd).abs() / exact.abs().max(1.0);
            prop_assert!(err < FD_REL_TOL, "d/dx {e} = {d}: exact {exact}, fd {fd}");
            Ok(())
        })
        .map_err(|e| e.to_string())
}

/// Expressions that the DSL can express: adds radicals and primed derivatives.
pub fn dsl_expr_strategy() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        3 => prop::sample::select(vec!["x", "t", "k", "eta", "a0", "lambda"]).prop_map(Expr::sym),
        1 => prop::sample::select(vec!["sqrt(k)", "sqrt(-k)", "u'", "v'''"])
            .prop_map(|s| parse_expr(s).unwrap()),
        2 => small_rational(),
    ];
    leaf.prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            3 => prop::collection::vec(inner.clone(), 2..4).prop_map(Expr::sum),
            3 => prop::collection::vec(inner.clone(), 2..3).prop_map(Expr::product),
            2 => (inner.clone(), -2i64..=4).prop_map(|(b, n)| b.pow(n).unwrap_or_else(|_| Expr::one())),
            1 => (prop::sample::select(vec![FuncKind::Tan, FuncKind::Coth]), inner)
                .prop_map(|(k, a)| Expr::func(k, a)),
        ]
    })
}

/// DSL rendering parses back to the same canonical expression.
pub fn check_round_trip(cases: u32) -> Result<(), String> {
    runner(cases)
        .run(&dsl_expr_strategy(), |e| {
            let text = render_expr(&e, RenderFormat::Dsl);
            let back =
                parse_expr(&text).map_err(|err| TestCaseError::fail(format!("{text}: {err}")))?;
            prop_assert_eq!(back, e, "{}", text);
            Ok(())
        })
        .map_err(|e| e.to_string())
}

/// Canonical expressions are fixed points of `normalize`.
pub fn check_normalize_idempotent(cases: u32) -> Result<(), String> {
    runner(cases)
        .run(&dsl_expr_strategy(), |e| {
            let once = normalize(&e).map_err(|err| TestCaseError::fail(err.to_string()))?;
            let twice = normalize(&once).map_err(|err| TestCaseError::fail(err.to_string()))?;
            prop_assert_eq!(&once, &e);
            prop_assert_eq!(once, twice);
            Ok(())
        })
        .map_err(|e| e.to_string())
}

fn phi_poly_strategy() -> impl Strategy<Value = PhiPoly> {
    prop::collection::vec(-5i64..=5, 1..6).prop_map(|cs| {
        PhiPoly::from_coeffs(
            cs.into_iter()
                .enumerate()
                .map(|(d, c)| (d as u32, Expr::int(c))),
        )
    })
}

/// `deg D(p) = deg p + 1` for nonconstant `p`, and `D` agrees with the
/// derivative of `p(phi(xi))` along the tanh branch.
pub fn check_phi_derivative(cases: u32) -> Result<(), String> {
    let xi = Symbol::new("xi");
    let phi = phi_branch_expr(BranchKind::TanhNeg);
    runner(cases)
        .run(&(phi_poly_strategy(), -2.0f64..2.0), |(p, x0)| {
            let d = phi_derivative(&p);
            match p.degree() {
                Some(n) if n >= 1 => prop_assert_eq!(d.degree(), Some(n + 1)),
                _ => prop_assert!(d.is_zero()),
            }
            let at = |q: &PhiPoly, xv: f64| {
                eval_numeric(
                    &q.to_expr(&phi),
                    &BTreeMap::from([(xi.clone(), xv), (Symbol::new("k"), -1.0)]),
                )
                .unwrap()
            };
            let h = 1e-5;
            let fd = (at(&p, x0 + h) - at(&p, x0 - h)) / (2.0 * h);
            let exact = at(&d, x0);
            prop_assert!(
                (fd - exact).abs() <= 1e-5 * exact.abs().max(1.0),
                "{p}: {fd} vs {exact}"
            );
            Ok(())
        })
        .map_err(|e| e.to_string())
}

/// A random triangular system together with the rational point it vanishes at.
#[derive(Debug, Clone)]
pub struct Planted {
    pub system: AlgebraicSystem,
    pub point: BTreeMap<Symbol, BigRational>,
}

/// Equation `i` is `(y_i - r_i)(1 + sum_{j<i} c_j y_j) + sum_{j<i} d_j (y_j - r_j)`:
/// degree at most two, triangular, and zero at `y = r`.
pub fn planted_strategy() -> impl Strategy<Value = Planted> {
    (1usize..=4)
        .prop_flat_map(|n| {
            (
                prop::collection::vec((-4i64..=4, 1i64..=3), n),
                prop::collection::vec(prop::collection::vec((-2i64..=2, -2i64..=2), n), n),
            )
        })
        .prop_map(|(roots, mix)| {
            let n = roots.len();
            let ys: Vec<Symbol> = (0..n).map(|i| Symbol::new(&format!("y{i}"))).collect();
            let rs: Vec<Expr> = roots
                .iter()
                .map(|&(p, q)| Expr::rational(p, q).unwrap())
                .collect();
            let shifted = |i: usize| Expr::Symbol(ys[i].clone()) - rs[i].clone();
            let mut eqs = Vec::new();
            for (i, row) in mix.iter().enumerate() {
                let mut factor = vec![Expr::one()];
                let mut tail = Vec::new();
                for (j, &(c, d)) in row.iter().enumerate().take(i) {
                    factor.push(Expr::int(c) * Expr::Symbol(ys[j].clone()));
                    tail.push(Expr::int(d) * shifted(j));
                }
                let mut terms = vec![shifted(i) * Expr::sum(factor)];
                terms.extend(tail);
                eqs.push(twsolve::symexpr::expand(&Expr::sum(terms)).unwrap());
            }
            let point = ys
                .iter()
                .zip(&roots)
                .map(|(y, &(p, q))| (y.clone(), BigRational::new(p.into(), q.into())))
                .collect();
            Planted {
                system: AlgebraicSystem::new(eqs, ys, Vec::new()),
                point,
            }
        })
}

/// Whether `branch` specializes to `point`.
pub fn branch_contains(branch: &SolutionBranch, point: &BTreeMap<Symbol, BigRational>) -> bool {
    let free: BTreeMap<Symbol, Expr> = branch
        .free_unknowns
        .iter()
        .map(|s| (s.clone(), Expr::from_rational(point[s].clone())))
        .collect();
    let values_match = branch
        .assignment
        .iter()
        .all(|(s, v)| matches!(substitute(v, &free), Ok(Expr::Rational(r)) if r == point[s]));
    let constraints_hold = branch.constraints.iter().all(|c| {
        substitute(&c.expr, &free)
            .map(|e| !e.is_zero())
            .unwrap_or(false)
    });
    values_match && constraints_hold
}

/// Planted solutions are recovered and every returned branch is sound.
pub fn check_planted(cases: u32) -> Result<(), String> {
    runner(cases)
        .run(&planted_strategy(), |p| {
            let r = solve_system(&p.system, Limits::default())
                .map_err(|e| TestCaseError::fail(e.to_string()))?;
            for b in &r.branches {
                prop_assert!(check_assignment(&p.system, b), "unsound branch {}", b);
            }
            prop_assert!(
                r.branches.iter().any(|b| branch_contains(b, &p.point)),
                "planted {:?} missing from {:?}",
                p.point,
                r.branches.iter().map(|b| b.to_string()).collect::<Vec<_>>()
            );
            Ok(())
        })
        .map_err(|e| e.to_string())
}

/// Two runs of the full pipeline produce byte-identical reports.
pub fn check_determinism(source: &str) -> Result<(), String> {
    let config = RunConfig {
        format: OutputFormat::Json,
        ..RunConfig::default()
    };
    let a = run_solve(source, &config).map_err(|e| e.to_string())?;
    let b = run_solve(source, &config).map_err(|e| e.to_string())?;
    if a == b {
        Ok(())
    } else {
        Err("reports differ between runs".to_string())
    }
}
