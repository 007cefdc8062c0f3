//! End-to-end regression on the coupled MkdV system. Expected values were
//! derived independently and are frozen here.

use std::collections::BTreeMap;

use twsolve::algsolve::{check_assignment, solve_system, Limits, SolutionBranch};
use twsolve::parser::{parse_expr, parse_system, MKDV_SOURCE};
use twsolve::phi::{balance, make_ansatz, substitute_and_collect, AlgebraicSystem, Degrees};
use twsolve::pipeline::{solve, RunConfig};
use twsolve::solutions::BranchKind;
use twsolve::symexpr::Symbol;
use twsolve::verify::{catalog_check, CatalogStatus, NumericConfig};
use twsolve::wave::reduce_to_ode;

fn system() -> AlgebraicSystem {
    let ode = reduce_to_ode(&parse_system(MKDV_SOURCE).unwrap(), "lambda").unwrap();
    substitute_and_collect(&ode, &make_ansatz(1, 2).unwrap()).unwrap()
}

fn assignment(pairs: &[(&str, &str)]) -> BTreeMap<Symbol, twsolve::symexpr::Expr> {
    pairs
        .iter()
        .map(|(s, e)| (Symbol::new(s), parse_expr(e).unwrap()))
        .collect()
}

fn find<'a>(branches: &'a [SolutionBranch], pairs: &[(&str, &str)]) -> Option<&'a SolutionBranch> {
    let want = assignment(pairs);
    branches.iter().find(|b| b.assignment == want)
}

#[test]
fn balance_is_one_two() {
    let ode = reduce_to_ode(&parse_system(MKDV_SOURCE).unwrap(), "lambda").unwrap();
    assert_eq!(balance(&ode).unwrap(), Degrees { m: 1, n: Some(2) });
}

#[test]
fn collected_system_shape() {
    let sys = system();
    assert_eq!(sys.equations.len(), 11);
    let names: Vec<&str> = sys.unknowns.iter().map(|s| s.name()).collect();
    assert_eq!(names, ["a0", "a1", "b0", "b1", "b2", "lambda"]);
}

#[test]
fn solver_recovers_every_family() {
    let sys = system();
    let r = solve_system(&sys, Limits::default()).unwrap();
    assert!(r.complete);
    for b in &r.branches {
        assert!(check_assignment(&sys, b), "unsound {b}");
    }
    let first = find(
        &r.branches,
        &[
            ("a1", "-1"),
            ("b0", "eta"),
            ("b1", "-2*a0"),
            ("b2", "0"),
            ("lambda", "k + 3*a0^2"),
        ],
    )
    .expect("first family");
    assert_eq!(first.free_unknowns, [Symbol::new("a0")]);
    assert!(first.degenerate && !first.constant);
    let fixed = [
        // third
        [
            ("a0", "0"),
            ("a1", "-2"),
            ("b0", "eta"),
            ("b1", "0"),
            ("b2", "2"),
            ("lambda", "-2*k"),
        ],
        // fourth
        [
            ("a0", "0"),
            ("a1", "-1"),
            ("b0", "eta - 2*k"),
            ("b1", "0"),
            ("b2", "-2"),
            ("lambda", "k"),
        ],
        // second, with signs and constant fixed by the solver
        [
            ("a0", "0"),
            ("a1", "3"),
            ("b0", "eta - 10*k/3"),
            ("b1", "0"),
            ("b2", "2"),
            ("lambda", "-7*k"),
        ],
    ];
    for pairs in &fixed {
        let b = find(&r.branches, pairs).unwrap_or_else(|| panic!("missing {pairs:?}"));
        assert!(b.free_unknowns.is_empty() && !b.degenerate);
    }
    for a1 in ["1", "-1"] {
        let b = find(
            &r.branches,
            &[
                ("a0", "0"),
                ("a1", a1),
                ("b0", "eta - k/3 + lambda/3"),
                ("b1", "0"),
                ("b2", "0"),
            ],
        )
        .expect("speed-free family");
        assert_eq!(b.free_unknowns, [Symbol::new("lambda")]);
    }
    let constant = find(&r.branches, &[("a1", "0"), ("b1", "0"), ("b2", "0")]).expect("constant");
    assert!(constant.constant && constant.degenerate);
    assert_eq!(r.branches.len(), 7);
}

#[test]
fn pipeline_expands_and_verifies_all_families() {
    let (report, code) = solve(MKDV_SOURCE, &RunConfig::default()).unwrap();
    assert_eq!(code, 0);
    assert_eq!(report.balance, [1, 2]);
    // six non-constant branches, five kinds each
    assert_eq!(report.families.len(), 30);
    for f in &report.families {
        let v = f.verification.as_ref().unwrap();
        assert!(v.passed(), "{}: {}", f.id, v.summary());
    }
}

#[test]
fn first_family_rational_kind() {
    let (report, _) = solve(MKDV_SOURCE, &RunConfig::default()).unwrap();
    let f = report
        .families
        .iter()
        .find(|f| {
            f.kind == BranchKind::RationalZeroK && f.branch.free_unknowns == [Symbol::new("a0")]
        })
        .unwrap();
    assert_eq!(f.closed[0], parse_expr("a0 + 1/(x + 3*a0^2*t)").unwrap());
    assert_eq!(
        f.closed[1],
        parse_expr("eta + 2*a0/(x + 3*a0^2*t)").unwrap()
    );
    assert!(
        f.verification
            .as_ref()
            .unwrap()
            .numeric_max_residual
            .unwrap()
            < 1e-8
    );
}

#[test]
fn catalog_statuses() {
    let s = catalog_check(
        &parse_system(MKDV_SOURCE).unwrap(),
        &NumericConfig::default(),
    )
    .unwrap();
    let corrected = |c: &str| CatalogStatus::Corrected {
        category: c.to_string(),
    };
    let expected: Vec<CatalogStatus> = (1..=16)
        .map(|id| match id {
            4 | 12 | 16 => corrected("cot-sign"),
            5 | 6 | 8 => corrected("second-family-sign"),
            14 => corrected("u14-argument"),
            _ => CatalogStatus::Pass,
        })
        .collect();
    assert_eq!(
        s.rows.iter().map(|r| r.status.clone()).collect::<Vec<_>>(),
        expected
    );
    assert_eq!(s.passed_as_printed(), 9);
    assert_eq!(s.passing_under(&["second-family-sign", "u14-argument"]), 13);
    assert_eq!(s.failed(), 0);
}
