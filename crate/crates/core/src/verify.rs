//! Symbolic and numeric verification of solution families, plus the
//! regression catalog of published MkdV solutions.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};

use serde::Deserialize;

use crate::algsolve::{check_assignment, SolutionBranch};
use crate::parser::{parse_expr, PDESystem, ParseError};
use crate::phi::{AlgebraicSystem, RICCATI};
use crate::solutions::{BranchKind, SolutionFamily};
use crate::symexpr::{differentiate, eval_numeric, EvalError, Expr, ExprError, FuncKind, Symbol};

/// The catalog of printed MkdV solutions shipped with the crate.
pub const CATALOG_SOURCE: &str = include_str!("../data/catalog.toml");

/// Value bound to free unknowns that the configuration leaves open.
pub const DEFAULT_FREE_VALUE: f64 = 0.4;

#[derive(Debug, Clone, PartialEq)]
pub struct NumericConfig {
    /// Explicit bindings. A binding of `k` is used only for kinds whose sign
    /// condition it satisfies; otherwise the kind's default applies.
    pub bindings: BTreeMap<Symbol, f64>,
    pub xs: Vec<f64>,
    pub ts: Vec<f64>,
    /// Points closer than this to a pole of tan, cot, coth or `1/xi` are skipped.
    pub guard: f64,
    pub tol: f64,
}

impl Default for NumericConfig {
    fn default() -> Self {
        NumericConfig {
            bindings: BTreeMap::from([(Symbol::new("eta"), 1.0 / 3.0), (Symbol::new("a0"), 0.4)]),
            xs: vec![-2.0, -1.1, 0.3, 1.1, 2.0],
            ts: vec![0.0, 0.25, 0.7],
            guard: 0.05,
            tol: 1e-8,
        }
    }
}

impl NumericConfig {
    /// The value of `k` used for `kind`.
    pub fn k_for(&self, kind: BranchKind) -> f64 {
        let default = match kind.k_sign() {
            Ordering::Less => -1.0,
            Ordering::Equal => 0.0,
            Ordering::Greater => 1.0,
        };
        match self.bindings.get(&Symbol::new(RICCATI)) {
            Some(&k) if k.partial_cmp(&0.0) == Some(kind.k_sign()) => k,
            _ => default,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    /// `None` when symbolic verification was not requested.
    pub symbolic_ok: Option<bool>,
    /// `None` when numeric verification was not requested.
    pub numeric_max_residual: Option<f64>,
    pub tol: f64,
    pub sample_params: BTreeMap<String, f64>,
    pub grid: Vec<(f64, f64)>,
    pub skipped_points: Vec<((f64, f64), String)>,
}

impl VerificationReport {
    pub fn empty(tol: f64) -> Self {
        VerificationReport {
            symbolic_ok: None,
            numeric_max_residual: None,
            tol,
            sample_params: BTreeMap::new(),
            grid: Vec::new(),
            skipped_points: Vec::new(),
        }
    }

    pub fn numeric_ok(&self) -> Option<bool> {
        self.numeric_max_residual.map(|r| r <= self.tol)
    }

    /// True unless a requested check failed.
    pub fn passed(&self) -> bool {
        self.symbolic_ok != Some(false) && self.numeric_ok() != Some(false)
    }

    pub fn summary(&self) -> String {
        let mut parts = Vec::new();
        if let Some(ok) = self.symbolic_ok {
            parts.push(format!("symbolic {}", if ok { "ok" } else { "FAILED" }));
        }
        if let Some(r) = self.numeric_max_residual {
            let verdict = if r <= self.tol { "ok" } else { "FAILED" };
            let params: Vec<String> = self
                .sample_params
                .iter()
                .map(|(s, v)| format!("{s}={v}"))
                .collect();
            parts.push(format!(
                "numeric {verdict} (max residual {r:.3e}, {} points, {} skipped; {})",
                self.grid.len(),
                self.skipped_points.len(),
                params.join(", ")
            ));
        }
        if parts.is_empty() {
            "not verified".to_string()
        } else {
            parts.join("; ")
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum VerifyError {
    #[error("every grid point was skipped near a pole; verification is inconclusive")]
    Inconclusive { skipped: Vec<((f64, f64), String)> },
    #[error("unbound symbol `{0}` in a closed form")]
    Unbound(Symbol),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("catalog: {0}")]
    Catalog(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// Symbolic gate: every collected coefficient vanishes under the branch.
pub fn verify_symbolic(branch: &SolutionBranch, sys: &AlgebraicSystem) -> bool {
    check_assignment(sys, branch)
}

/// Numeric gate: evaluates the PDE residuals of `family` on the grid.
pub fn verify_numeric(
    family: &SolutionFamily,
    pde: &PDESystem,
    config: &NumericConfig,
) -> Result<VerificationReport, VerifyError> {
    let fields: Vec<(Symbol, Expr)> = family
        .functions
        .iter()
        .cloned()
        .zip(family.closed.iter().cloned())
        .collect();
    numeric_residual(&fields, pde, family.kind, config)
}

/// Replaces each function symbol by its closed form and evaluates every
/// derivative node exactly.
pub fn instantiate(e: &Expr, fields: &BTreeMap<Symbol, Expr>) -> Result<Expr, ExprError> {
    Ok(match e {
        Expr::Rational(_) => e.clone(),
        Expr::Symbol(s) => fields.get(s).cloned().unwrap_or_else(|| e.clone()),
        Expr::Sum(ts) => Expr::sum(
            ts.iter()
                .map(|t| instantiate(t, fields))
                .collect::<Result<_, _>>()?,
        ),
        Expr::Product(fs) => Expr::product(
            fs.iter()
                .map(|f| instantiate(f, fields))
                .collect::<Result<_, _>>()?,
        ),
        Expr::Power(b, n) => instantiate(b, fields)?.pow(*n)?,
        Expr::Func(k, a) => Expr::func(*k, instantiate(a, fields)?),
        Expr::Deriv(arg, vars) => {
            let mut d = instantiate(arg, fields)?;
            for v in vars {
                d = differentiate(&d, v);
            }
            d
        }
    })
}

/// Subexpressions whose value approaches a pole: function arguments and
/// bases of negative powers.
fn pole_sites(e: &Expr, out: &mut Vec<(Option<FuncKind>, Expr)>) {
    e.visit(&mut |s| match s {
        Expr::Func(k, a) if *k != FuncKind::Tanh => out.push((Some(*k), (**a).clone())),
        Expr::Power(b, n) if *n < 0 => out.push((None, (**b).clone())),
        _ => {}
    });
}

fn pole_distance(kind: Option<FuncKind>, a: f64) -> f64 {
    match kind {
        Some(FuncKind::Tan) => {
            let r = (a - FRAC_PI_2).rem_euclid(PI);
            r.min(PI - r)
        }
        Some(FuncKind::Cot) => {
            let r = a.rem_euclid(PI);
            r.min(PI - r)
        }
        Some(FuncKind::Coth) | None => a.abs(),
        Some(FuncKind::Tanh) => f64::INFINITY,
    }
}

fn near_pole(
    sites: &[(Option<FuncKind>, Expr)],
    bindings: &BTreeMap<Symbol, f64>,
    guard: f64,
) -> Result<Option<String>, EvalError> {
    for (kind, arg) in sites {
        let a = eval_numeric(arg, bindings)?;
        if pole_distance(*kind, a) < guard {
            let what = kind.map(|f| f.name()).unwrap_or("reciprocal");
            return Ok(Some(format!(
                "{what} argument {a:.4} within the pole guard"
            )));
        }
    }
    Ok(None)
}

/// Max-norm PDE residual of closed forms `fields` (function name, closed form).
pub fn numeric_residual(
    fields: &[(Symbol, Expr)],
    pde: &PDESystem,
    kind: BranchKind,
    config: &NumericConfig,
) -> Result<VerificationReport, VerifyError> {
    let map: BTreeMap<Symbol, Expr> = fields.iter().cloned().collect();
    let residuals: Vec<Expr> = pde
        .equations
        .iter()
        .map(|e| instantiate(e, &map))
        .collect::<Result<_, _>>()?;
    let mut sites = Vec::new();
    for (_, e) in fields {
        pole_sites(e, &mut sites);
    }
    let (x, t) = pde.space_time();
    let k = Symbol::new(RICCATI);
    let mut bindings = BTreeMap::new();
    let mut params = BTreeMap::new();
    let mut needed = std::collections::BTreeSet::new();
    for e in residuals.iter().chain(fields.iter().map(|(_, e)| e)) {
        for s in e.symbols() {
            needed.insert(s.radical().map(|(b, _)| b).unwrap_or(s));
        }
    }
    needed.insert(k.clone());
    for s in needed {
        if s == x || s == t {
            continue;
        }
        let v = if s == k {
            config.k_for(kind)
        } else {
            config
                .bindings
                .get(&s)
                .copied()
                .unwrap_or(DEFAULT_FREE_VALUE)
        };
        bindings.insert(s.clone(), v);
        params.insert(s.name().to_string(), v);
    }
    let mut report = VerificationReport::empty(config.tol);
    report.sample_params = params;
    let mut max: f64 = 0.0;
    for &xv in &config.xs {
        for &tv in &config.ts {
            bindings.insert(x.clone(), xv);
            bindings.insert(t.clone(), tv);
            if let Some(reason) = near_pole(&sites, &bindings, config.guard)? {
                report.skipped_points.push(((xv, tv), reason));
                continue;
            }
            for r in &residuals {
                let v = eval_numeric(r, &bindings)?;
                max = max.max(if v.is_nan() { f64::INFINITY } else { v.abs() });
            }
            report.grid.push((xv, tv));
        }
    }
    if report.grid.is_empty() {
        return Err(VerifyError::Inconclusive {
            skipped: report.skipped_points,
        });
    }
    report.numeric_max_residual = Some(max);
    Ok(report)
}

#[derive(Deserialize)]
struct CatalogFile {
    entry: Vec<RawEntry>,
}

#[derive(Deserialize)]
struct RawEntry {
    id: u32,
    family: String,
    kind: String,
    u: String,
    v: String,
    #[serde(default)]
    correction: Vec<RawCorrection>,
}

#[derive(Deserialize)]
struct RawCorrection {
    category: String,
    note: String,
    u: String,
    v: String,
}

/// An alternative reading of a printed solution.
#[derive(Debug, Clone, PartialEq)]
pub struct Correction {
    pub category: String,
    pub note: String,
    pub u: Expr,
    pub v: Expr,
}

/// A printed solution pair.
#[derive(Debug, Clone, PartialEq)]
pub struct CatalogEntry {
    pub id: u32,
    pub family: String,
    pub kind: BranchKind,
    pub u: Expr,
    pub v: Expr,
    pub corrections: Vec<Correction>,
}

/// Parses a catalog in the TOML layout of [`CATALOG_SOURCE`].
pub fn load_catalog(text: &str) -> Result<Vec<CatalogEntry>, VerifyError> {
    let file: CatalogFile =
        toml::from_str(text).map_err(|e| VerifyError::Catalog(e.to_string()))?;
    file.entry
        .into_iter()
        .map(|e| {
            let kind = BranchKind::from_name(&e.kind)
                .ok_or_else(|| VerifyError::Catalog(format!("unknown kind `{}`", e.kind)))?;
            let corrections = e
                .correction
                .into_iter()
                .map(|c| {
                    Ok(Correction {
                        category: c.category,
                        note: c.note,
                        u: parse_expr(&c.u)?,
                        v: parse_expr(&c.v)?,
                    })
                })
                .collect::<Result<_, VerifyError>>()?;
            Ok(CatalogEntry {
                id: e.id,
                family: e.family,
                kind,
                u: parse_expr(&e.u)?,
                v: parse_expr(&e.v)?,
                corrections,
            })
        })
        .collect()
}

/// The shipped 16-entry catalog.
pub fn builtin_catalog() -> Vec<CatalogEntry> {
    let entries = load_catalog(CATALOG_SOURCE).expect("shipped catalog parses");
    assert_eq!(entries.len(), 16, "shipped catalog has sixteen entries");
    entries
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CatalogStatus {
    /// Verifies exactly as printed.
    Pass,
    /// Fails as printed; verifies under the named correction.
    Corrected {
        category: String,
    },
    Fail,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CatalogRow {
    pub id: u32,
    pub family: String,
    pub kind: BranchKind,
    pub status: CatalogStatus,
    pub printed_residual: f64,
    /// `(category, residual)` for every documented correction.
    pub corrections: Vec<(String, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CatalogSummary {
    pub rows: Vec<CatalogRow>,
    pub tol: f64,
    pub notes: Vec<String>,
}

impl CatalogSummary {
    pub fn passed_as_printed(&self) -> usize {
        self.rows
            .iter()
            .filter(|r| r.status == CatalogStatus::Pass)
            .count()
    }

    pub fn corrected(&self) -> usize {
        self.rows
            .iter()
            .filter(|r| matches!(r.status, CatalogStatus::Corrected { .. }))
            .count()
    }

    pub fn failed(&self) -> usize {
        self.rows
            .iter()
            .filter(|r| r.status == CatalogStatus::Fail)
            .count()
    }

    /// Entries that verify after applying only corrections of `categories`.
    pub fn passing_under(&self, categories: &[&str]) -> usize {
        self.rows
            .iter()
            .filter(|r| match &r.status {
                CatalogStatus::Pass => true,
                CatalogStatus::Corrected { .. } => r
                    .corrections
                    .iter()
                    .any(|(c, res)| *res <= self.tol && categories.contains(&c.as_str())),
                CatalogStatus::Fail => false,
            })
            .count()
    }

    pub fn render_table(&self) -> String {
        let mut out = format!(
            "{:<4} {:<7} {:<5} {:<34} {:>12}  corrections\n",
            "id", "family", "kind", "status", "printed"
        );
        for r in &self.rows {
            let status = match &r.status {
                CatalogStatus::Pass => "pass".to_string(),
                CatalogStatus::Corrected { category } => format!("corrected ({category})"),
                CatalogStatus::Fail => "FAIL".to_string(),
            };
            let corr: Vec<String> = r
                .corrections
                .iter()
                .map(|(c, res)| format!("{c}={res:.3e}"))
                .collect();
            out.push_str(&format!(
                "u{:<3} {:<7} {:<5} {:<34} {:>12.3e}  {}\n",
                r.id,
                r.family,
                r.kind.name(),
                status,
                r.printed_residual,
                corr.join(" ")
            ));
        }
        out.push_str(&format!(
            "as printed {}/{}, corrected {}, failed {} (tol {:e})\n",
            self.passed_as_printed(),
            self.rows.len(),
            self.corrected(),
            self.failed(),
            self.tol
        ));
        for n in &self.notes {
            out.push_str(&format!("note: {n}\n"));
        }
        out
    }
}

fn pair_residual(
    u: &Expr,
    v: &Expr,
    pde: &PDESystem,
    kind: BranchKind,
    config: &NumericConfig,
) -> Result<f64, VerifyError> {
    let names = pde.function_names();
    if names.len() != 2 {
        return Err(VerifyError::Catalog(
            "the catalog needs a two-function system".into(),
        ));
    }
    let fields = [(names[0].clone(), u.clone()), (names[1].clone(), v.clone())];
    let report = numeric_residual(&fields, pde, kind, config)?;
    Ok(report.numeric_max_residual.unwrap_or(f64::INFINITY))
}

/// Verifies every entry of `entries` as printed and under each correction.
pub fn check_catalog(
    entries: &[CatalogEntry],
    pde: &PDESystem,
    config: &NumericConfig,
) -> Result<CatalogSummary, VerifyError> {
    let mut rows = Vec::with_capacity(entries.len());
    for e in entries {
        let printed = pair_residual(&e.u, &e.v, pde, e.kind, config)?;
        let mut corrections = Vec::new();
        for c in &e.corrections {
            corrections.push((
                c.category.clone(),
                pair_residual(&c.u, &c.v, pde, e.kind, config)?,
            ));
        }
        let status = if printed <= config.tol {
            CatalogStatus::Pass
        } else if let Some((category, _)) = corrections.iter().find(|(_, r)| *r <= config.tol) {
            CatalogStatus::Corrected {
                category: category.clone(),
            }
        } else {
            CatalogStatus::Fail
        };
        rows.push(CatalogRow {
            id: e.id,
            family: e.family.clone(),
            kind: e.kind,
            status,
            printed_residual: printed,
            corrections,
        });
    }
    let mut notes = Vec::new();
    if !entries.iter().any(|e| e.kind == BranchKind::RationalZeroK) {
        notes.push("the catalog holds no k = 0 (rational) entries".to_string());
    }
    Ok(CatalogSummary {
        rows,
        tol: config.tol,
        notes,
    })
}

/// Runs the shipped catalog against `pde`.
pub fn catalog_check(
    pde: &PDESystem,
    config: &NumericConfig,
) -> Result<CatalogSummary, VerifyError> {
    check_catalog(&builtin_catalog(), pde, config)
}
