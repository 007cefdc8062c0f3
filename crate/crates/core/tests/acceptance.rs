//! Acceptance harness: one PASS/FAIL line per criterion.
//!
//! Tolerances and budgets are pinned below; the process exits nonzero when
//! any criterion fails.

mod common;

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use num_rational::BigRational;
use twsolve::algsolve::{check_assignment, solve_system, Limits};
use twsolve::parser::{parse_expr, parse_system, MKDV_SOURCE};
use twsolve::phi::{balance, make_ansatz, substitute_and_collect};
use twsolve::pipeline::{solve, RunConfig};
use twsolve::solutions::{assemble_family, BranchKind};
use twsolve::symexpr::Symbol;
use twsolve::verify::{catalog_check, verify_numeric, NumericConfig};
use twsolve::wave::{normalize_ode, reduce_to_ode};

/// Absolute max-residual tolerance of every numeric gate.
const NUMERIC_TOL: f64 = 1e-8;
const REDUCE_BUDGET: Duration = Duration::from_secs(1);
const BALANCE_BUDGET: Duration = Duration::from_secs(1);
const SOLVE_BUDGET: Duration = Duration::from_secs(60);
/// Catalog entries that must verify exactly as printed.
const CATALOG_AS_PRINTED: usize = 12;
/// Correction categories the criterion admits.
const DOCUMENTED_CORRECTIONS: [&str; 2] = ["second-family-sign", "u14-argument"];
const DIFF_CASES: u32 = 200;
const ROUND_TRIP_CASES: u32 = 100;
const PHI_CASES: u32 = 100;
const PLANTED_SYSTEMS: u32 = 50;

const SINGLE_EQUATION: &str =
    "system \"mkdv_single\"\nfunctions u(x,t)\neq: u_t + 6*u^2*u_x + u_xxx = 0\n";

type Verdict = Result<String, String>;
type Criterion = fn() -> Verdict;
type Check = Box<dyn Fn() -> Result<(), String>>;

fn within(budget: Duration, start: Instant) -> Result<Duration, String> {
    let spent = start.elapsed();
    if spent < budget {
        Ok(spent)
    } else {
        Err(format!("took {spent:?}, budget {budget:?}"))
    }
}

fn reduction_golden() -> Verdict {
    let start = Instant::now();
    let pde = parse_system(MKDV_SOURCE).map_err(|e| e.to_string())?;
    let ode = reduce_to_ode(&pde, "lambda").map_err(|e| e.to_string())?;
    let spent = within(REDUCE_BUDGET, start)?;
    let reference = [
        "2*(3*eta + lambda)*u' + 6*u^2*u' - 6*u'*v - 6*u*v' - 3*v'' - u'''",
        "(lambda - 3*eta)*v' - 3*u^2*v' + 3*v*v' + 3*u'*v' + v'''",
    ]
    .map(|s| parse_expr(s).unwrap());
    let normalized = normalize_ode(&reference);
    if ode.equations != normalized.equations {
        return Err(format!(
            "reduced {:?}",
            ode.equations
                .iter()
                .map(|e| e.to_string())
                .collect::<Vec<_>>()
        ));
    }
    let minus_two = BigRational::from_integer((-2).into());
    if ode.scales[0] != minus_two || ode.scales[1] == BigRational::from_integer(0.into()) {
        return Err(format!("scales {:?}", ode.scales));
    }
    Ok(format!(
        "structural match, scales [{}, {}], {spent:?}",
        ode.scales[0], ode.scales[1]
    ))
}

fn balance_golden() -> Verdict {
    let start = Instant::now();
    let pde = parse_system(MKDV_SOURCE).map_err(|e| e.to_string())?;
    let ode = reduce_to_ode(&pde, "lambda").map_err(|e| e.to_string())?;
    let d = balance(&ode).map_err(|e| e.to_string())?;
    let spent = within(BALANCE_BUDGET, start)?;
    if (d.m, d.n) == (1, Some(2)) {
        Ok(format!("(m, n) = (1, 2), {spent:?}"))
    } else {
        Err(format!("got {d:?}"))
    }
}

fn family_recovery() -> Verdict {
    let start = Instant::now();
    let ode = reduce_to_ode(&parse_system(MKDV_SOURCE).unwrap(), "lambda").unwrap();
    let sys =
        substitute_and_collect(&ode, &make_ansatz(1, 2).unwrap()).map_err(|e| e.to_string())?;
    let r = solve_system(&sys, Limits::default()).map_err(|e| e.to_string())?;
    let spent = within(SOLVE_BUDGET, start)?;
    let unsound = r
        .branches
        .iter()
        .filter(|b| !check_assignment(&sys, b))
        .count();
    if unsound > 0 {
        return Err(format!("{unsound} unsound branches"));
    }
    let has = |pairs: &[(&str, &str)]| {
        let want: BTreeMap<Symbol, _> = pairs
            .iter()
            .map(|(s, e)| (Symbol::new(s), parse_expr(e).unwrap()))
            .collect();
        r.branches.iter().any(|b| b.assignment == want)
    };
    let families = [
        (
            "first",
            vec![
                ("a1", "-1"),
                ("b0", "eta"),
                ("b1", "-2*a0"),
                ("b2", "0"),
                ("lambda", "k + 3*a0^2"),
            ],
        ),
        (
            "third",
            vec![
                ("a0", "0"),
                ("a1", "-2"),
                ("b0", "eta"),
                ("b1", "0"),
                ("b2", "2"),
                ("lambda", "-2*k"),
            ],
        ),
        (
            "fourth",
            vec![
                ("a0", "0"),
                ("a1", "-1"),
                ("b0", "eta - 2*k"),
                ("b1", "0"),
                ("b2", "-2"),
                ("lambda", "k"),
            ],
        ),
    ];
    for (name, pairs) in &families {
        if !has(pairs) {
            return Err(format!("{name} family missing"));
        }
    }
    let seven = r.branches.iter().find(|b| {
        let v = |s: &str| b.assignment.get(&Symbol::new(s)).map(|e| e.to_string());
        v("lambda").as_deref() == Some("-7*k")
            && v("b2").as_deref() == Some("2")
            && matches!(v("a1").as_deref(), Some("3") | Some("-3"))
    });
    let Some(seven) = seven else {
        return Err("no lambda = -7k branch with b2 = 2, |a1| = 3".into());
    };
    Ok(format!(
        "first/third/fourth exact, {seven}; {} branches all sound, {spent:?}",
        r.branches.len()
    ))
}

fn catalog_regression() -> Verdict {
    let pde = parse_system(MKDV_SOURCE).unwrap();
    let s = catalog_check(
        &pde,
        &NumericConfig {
            tol: NUMERIC_TOL,
            ..NumericConfig::default()
        },
    )
    .map_err(|e| e.to_string())?;
    let printed = s.passed_as_printed();
    let documented = s.passing_under(&DOCUMENTED_CORRECTIONS);
    let all = s.rows.len() - s.failed();
    let detail = format!(
        "{printed}/16 as printed, {documented}/16 under documented corrections, {all}/16 with every catalog correction"
    );
    if printed >= CATALOG_AS_PRINTED && documented == 16 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn rational_branch() -> Verdict {
    let ode = reduce_to_ode(&parse_system(MKDV_SOURCE).unwrap(), "lambda").unwrap();
    let ansatz = make_ansatz(1, 2).unwrap();
    let sys = substitute_and_collect(&ode, &ansatz).unwrap();
    let r = solve_system(&sys, Limits::default()).map_err(|e| e.to_string())?;
    let first = r
        .branches
        .iter()
        .find(|b| b.free_unknowns == [Symbol::new("a0")] && !b.constant)
        .ok_or("first family missing")?;
    let f = assemble_family(
        first,
        &ansatz,
        &ode.unknowns,
        &ode.wave_speed,
        BranchKind::RationalZeroK,
    )
    .map_err(|e| e.to_string())?;
    let (u, v) = (
        parse_expr("a0 + 1/(x + 3*a0^2*t)").unwrap(),
        parse_expr("eta + 2*a0/(x + 3*a0^2*t)").unwrap(),
    );
    if f.closed != [u, v] {
        return Err(format!("closed forms {} / {}", f.closed[0], f.closed[1]));
    }
    let config = NumericConfig {
        tol: NUMERIC_TOL,
        ..NumericConfig::default()
    };
    let rep = verify_numeric(&f, &parse_system(MKDV_SOURCE).unwrap(), &config)
        .map_err(|e| e.to_string())?;
    let res = rep.numeric_max_residual.unwrap_or(f64::INFINITY);
    if res < NUMERIC_TOL {
        Ok(format!("u = {}, max residual {res:.2e}", f.closed[0]))
    } else {
        Err(format!("max residual {res:.2e}"))
    }
}

fn single_equation() -> Verdict {
    let config = RunConfig {
        numeric: NumericConfig {
            tol: NUMERIC_TOL,
            ..NumericConfig::default()
        },
        ..RunConfig::default()
    };
    let (report, code) = solve(SINGLE_EQUATION, &config).map_err(|e| e.to_string())?;
    if report.balance != [1] {
        return Err(format!("balance {:?}", report.balance));
    }
    let ok = report.families.iter().any(|f| {
        f.kind == BranchKind::TanhNeg
            && !f.branch.degenerate
            && f.verification
                .as_ref()
                .is_some_and(|v| v.numeric_ok() == Some(true))
    });
    if ok {
        Ok(format!("m = 1, verified tanh family (exit {code})"))
    } else {
        Err(format!(
            "m = 1 but no nondegenerate branch over the rationals: a1 (a1^2 + 1) = 0 admits only a1 = 0 (exit {code})"
        ))
    }
}

fn property_suites() -> Verdict {
    let checks: [(&str, Check); 5] = [
        (
            "differentiation",
            Box::new(|| common::check_differentiation(DIFF_CASES)),
        ),
        (
            "round-trip",
            Box::new(|| common::check_round_trip(ROUND_TRIP_CASES)),
        ),
        (
            "phi law",
            Box::new(|| common::check_phi_derivative(PHI_CASES)),
        ),
        (
            "planted",
            Box::new(|| common::check_planted(PLANTED_SYSTEMS)),
        ),
        (
            "determinism",
            Box::new(|| common::check_determinism(MKDV_SOURCE)),
        ),
    ];
    let mut failed = Vec::new();
    for (name, check) in &checks {
        if let Err(e) = check() {
            failed.push(format!("{name}: {e}"));
        }
    }
    if failed.is_empty() {
        Ok(format!(
            "{DIFF_CASES} derivatives, {ROUND_TRIP_CASES} round-trips, {PHI_CASES} phi polynomials, {PLANTED_SYSTEMS} planted systems, determinism"
        ))
    } else {
        Err(failed.join("; "))
    }
}

fn main() {
    let criteria: [(&str, Criterion); 7] = [
        ("reduction golden", reduction_golden),
        ("balance golden", balance_golden),
        ("family recovery", family_recovery),
        ("sixteen-solution regression", catalog_regression),
        ("k=0 rational branch", rational_branch),
        ("single-equation smoke test", single_equation),
        ("property suites", property_suites),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("criterion {}: FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria pass",
        criteria.len() - failures,
        criteria.len()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
