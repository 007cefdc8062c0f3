//! Closed-form traveling-wave families built from solved branches.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::algsolve::{Relation, SolutionBranch};
use crate::parser::{render_expr, RenderFormat, WAVE_VARIABLE};
use crate::phi::{Ansatz, RICCATI};
use crate::symexpr::{normalize, substitute, Expr, ExprError, FuncKind, Symbol};
use crate::verify::VerificationReport;

/// The five closed forms of `phi' = phi^2 + k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BranchKind {
    /// `phi = -1/xi`, `k = 0`.
    RationalZeroK,
    /// `phi = sqrt(k) tan(sqrt(k) xi)`, `k > 0`.
    TanPos,
    /// `phi = -sqrt(k) cot(sqrt(k) xi)`, `k > 0`.
    CotPos,
    /// `phi = -sqrt(-k) tanh(sqrt(-k) xi)`, `k < 0`.
    TanhNeg,
    /// `phi = -sqrt(-k) coth(sqrt(-k) xi)`, `k < 0`.
    CothNeg,
}

impl BranchKind {
    pub const ALL: [BranchKind; 5] = [
        BranchKind::TanhNeg,
        BranchKind::CothNeg,
        BranchKind::TanPos,
        BranchKind::CotPos,
        BranchKind::RationalZeroK,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BranchKind::RationalZeroK => "rational",
            BranchKind::TanPos => "tan",
            BranchKind::CotPos => "cot",
            BranchKind::TanhNeg => "tanh",
            BranchKind::CothNeg => "coth",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        BranchKind::ALL.into_iter().find(|k| k.name() == name)
    }

    /// Sign of `k` required by the closed form.
    pub fn k_sign(self) -> std::cmp::Ordering {
        match self {
            BranchKind::RationalZeroK => std::cmp::Ordering::Equal,
            BranchKind::TanPos | BranchKind::CotPos => std::cmp::Ordering::Greater,
            BranchKind::TanhNeg | BranchKind::CothNeg => std::cmp::Ordering::Less,
        }
    }

    pub fn condition(self) -> &'static str {
        match self.k_sign() {
            std::cmp::Ordering::Equal => "k = 0",
            std::cmp::Ordering::Greater => "k > 0",
            std::cmp::Ordering::Less => "k < 0",
        }
    }
}

impl fmt::Display for BranchKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `phi(xi)` for `kind`, in the symbols `xi` and `k`.
pub fn phi_branch_expr(kind: BranchKind) -> Expr {
    let xi = Expr::sym(WAVE_VARIABLE);
    let k = Symbol::new(RICCATI);
    let (func, negated, sign) = match kind {
        BranchKind::RationalZeroK => return -xi.pow(-1).expect("xi is nonzero"),
        BranchKind::TanPos => (FuncKind::Tan, false, 1),
        BranchKind::CotPos => (FuncKind::Cot, false, -1),
        BranchKind::TanhNeg => (FuncKind::Tanh, true, -1),
        BranchKind::CothNeg => (FuncKind::Coth, true, -1),
    };
    let s = Expr::Symbol(Symbol::sqrt_of(&k, negated));
    Expr::product(vec![Expr::int(sign), s.clone(), Expr::func(func, s * xi)])
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AssembleError {
    #[error("branch is incompatible with the {kind} kind: {reason}")]
    Incompatible { kind: BranchKind, reason: String },
    #[error("the algebraic system carries no ansatz")]
    MissingAnsatz,
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// A closed-form solution: one branch evaluated on one kind of `phi`.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionFamily {
    pub id: String,
    pub branch: SolutionBranch,
    pub kind: BranchKind,
    pub functions: Vec<Symbol>,
    /// Closed forms in `x`, `t`, parameters and free unknowns, one per function.
    pub closed: Vec<Expr>,
    pub verification: Option<VerificationReport>,
}

impl SolutionFamily {
    pub fn u_closed(&self) -> &Expr {
        &self.closed[0]
    }

    pub fn v_closed(&self) -> Option<&Expr> {
        self.closed.get(1)
    }

    /// Free symbols of the closed forms other than `x` and `t`.
    pub fn free_symbols(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        for e in &self.closed {
            for s in e.symbols() {
                let s = s.radical().map(|(b, _)| b).unwrap_or(s);
                if s.name() != "x" && s.name() != "t" {
                    out.insert(s);
                }
            }
        }
        out
    }
}

/// Builds the closed forms of `branch` for `kind`: the ansatz with `phi`
/// replaced by [`phi_branch_expr`] and `xi` by `x + lambda*t`.
pub fn assemble_family(
    branch: &SolutionBranch,
    ansatz: &Ansatz,
    functions: &[Symbol],
    wave_speed: &Symbol,
    kind: BranchKind,
) -> Result<SolutionFamily, AssembleError> {
    let mut k_binding = BTreeMap::new();
    if kind == BranchKind::RationalZeroK {
        k_binding.insert(Symbol::new(RICCATI), Expr::zero());
    }
    let incompatible = |reason: String| AssembleError::Incompatible { kind, reason };
    let value = |s: &Symbol| {
        substitute(&branch.value(s), &k_binding)
            .map_err(|_| incompatible(format!("{s} = {} is singular", branch.value(s))))
    };
    for c in &branch.constraints {
        if c.relation != Relation::NonZero {
            continue;
        }
        let e = substitute(&c.expr, &k_binding).map_err(|_| incompatible(format!("{c}")))?;
        if e.is_zero() {
            return Err(incompatible(format!("requires {c}")));
        }
    }
    let lambda = value(wave_speed)?;
    let xi = Expr::sym("x") + lambda * Expr::sym("t");
    let phi = substitute(
        &phi_branch_expr(kind),
        &BTreeMap::from([(Symbol::new(WAVE_VARIABLE), xi)]),
    )?;
    let mut closed = Vec::with_capacity(functions.len());
    for symbols in ansatz.coeff_symbols.iter().take(functions.len()) {
        let mut terms = Vec::with_capacity(symbols.len());
        for (i, s) in symbols.iter().enumerate() {
            terms.push(value(s)? * phi.pow(i as i64)?);
        }
        closed.push(normalize(&Expr::sum(terms))?);
    }
    Ok(SolutionFamily {
        id: kind.name().to_string(),
        branch: branch.clone(),
        kind,
        functions: functions.to_vec(),
        closed,
        verification: None,
    })
}

/// Expands `branch` into every requested kind it is compatible with.
pub fn expand_branch(
    branch: &SolutionBranch,
    ansatz: &Ansatz,
    functions: &[Symbol],
    wave_speed: &Symbol,
    kinds: &[BranchKind],
) -> Result<Vec<SolutionFamily>, AssembleError> {
    let mut out = Vec::new();
    for &kind in kinds {
        match assemble_family(branch, ansatz, functions, wave_speed, kind) {
            Ok(f) => out.push(f),
            Err(AssembleError::Incompatible { reason, .. }) => {
                log::info!("skipping {kind} for branch {branch}: {reason}");
            }
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// Merges families whose closed forms agree after renaming free unknowns
/// canonically. Distinct kinds are always kept apart.
pub fn dedupe(families: Vec<SolutionFamily>) -> Vec<SolutionFamily> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for f in families {
        let renaming: BTreeMap<Symbol, Expr> = f
            .branch
            .free_unknowns
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), Expr::sym(&format!("free_{i}"))))
            .collect();
        let key: Vec<String> = f
            .closed
            .iter()
            .map(|e| {
                substitute(e, &renaming)
                    .unwrap_or_else(|_| e.clone())
                    .to_string()
            })
            .collect();
        if seen.insert((f.kind, key)) {
            out.push(f);
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Text,
    Latex,
    Json,
}

/// Everything a solve run reports.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionReport {
    pub system: String,
    pub balance: Vec<u32>,
    pub families: Vec<SolutionFamily>,
    pub complete: bool,
    pub branches_explored: usize,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    system: &'a str,
    balance: JsonBalance,
    families: Vec<JsonFamily>,
    search: JsonSearch,
}

#[derive(Serialize)]
struct JsonBalance {
    m: Option<u32>,
    n: Option<u32>,
}

#[derive(Serialize)]
struct JsonSearch {
    complete: bool,
    branches_explored: usize,
}

#[derive(Serialize)]
struct JsonFamily {
    id: String,
    assignment: BTreeMap<String, String>,
    constraints: Vec<String>,
    free: Vec<String>,
    branch_kind: &'static str,
    u: String,
    v: Option<String>,
    latex_u: String,
    latex_v: Option<String>,
    verified_symbolic: Option<bool>,
    verified_numeric: JsonNumeric,
}

#[derive(Serialize)]
struct JsonNumeric {
    max_residual: Option<f64>,
    params: BTreeMap<String, f64>,
}

fn dsl(e: &Expr) -> String {
    render_expr(e, RenderFormat::Dsl)
}

fn latex(e: &Expr) -> String {
    render_expr(e, RenderFormat::Latex)
}

/// Deterministic rendering of a report.
pub fn render_families(report: &SolutionReport, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => render_json(report),
        OutputFormat::Text => render_text(report),
        OutputFormat::Latex => render_latex(report),
    }
}

fn render_json(report: &SolutionReport) -> String {
    let families = report
        .families
        .iter()
        .map(|f| {
            let v = f.verification.as_ref();
            JsonFamily {
                id: f.id.clone(),
                assignment: f
                    .branch
                    .assignment
                    .iter()
                    .map(|(s, e)| (s.name().to_string(), dsl(e)))
                    .collect(),
                constraints: f.branch.constraints.iter().map(|c| c.to_string()).collect(),
                free: f
                    .branch
                    .free_unknowns
                    .iter()
                    .map(|s| s.name().to_string())
                    .collect(),
                branch_kind: f.kind.name(),
                u: dsl(f.u_closed()),
                v: f.v_closed().map(dsl),
                latex_u: latex(f.u_closed()),
                latex_v: f.v_closed().map(latex),
                verified_symbolic: v.and_then(|r| r.symbolic_ok),
                verified_numeric: JsonNumeric {
                    max_residual: v.and_then(|r| r.numeric_max_residual),
                    params: v.map(|r| r.sample_params.clone()).unwrap_or_default(),
                },
            }
        })
        .collect();
    let json = JsonReport {
        system: &report.system,
        balance: JsonBalance {
            m: report.balance.first().copied(),
            n: report.balance.get(1).copied(),
        },
        families,
        search: JsonSearch {
            complete: report.complete,
            branches_explored: report.branches_explored,
        },
    };
    let mut s = serde_json::to_string_pretty(&json).expect("report serializes");
    s.push('\n');
    s
}

fn balance_text(balance: &[u32]) -> String {
    let names = ["m", "n"];
    let parts: Vec<String> = balance
        .iter()
        .enumerate()
        .map(|(i, d)| format!("{}={d}", names.get(i).copied().unwrap_or("?")))
        .collect();
    parts.join(" ")
}

fn render_text(report: &SolutionReport) -> String {
    let mut out = format!("system {}\n", report.system);
    out.push_str(&format!("balance {}\n", balance_text(&report.balance)));
    out.push_str(&format!(
        "search complete={} branches_explored={}\n",
        report.complete, report.branches_explored
    ));
    out.push_str(&format!("families {}\n", report.families.len()));
    for f in &report.families {
        out.push_str(&format!(
            "\n[{}] {} ({})\n",
            f.id,
            f.kind,
            f.kind.condition()
        ));
        out.push_str(&format!("  branch: {}\n", f.branch));
        for (name, e) in f.functions.iter().zip(&f.closed) {
            out.push_str(&format!("  {name} = {}\n", dsl(e)));
        }
        if let Some(r) = &f.verification {
            out.push_str(&format!("  verification: {}\n", r.summary()));
        }
    }
    out
}

fn render_latex(report: &SolutionReport) -> String {
    let mut out = format!("% system {}\n", report.system);
    out.push_str(&format!("% balance {}\n", balance_text(&report.balance)));
    for f in &report.families {
        out.push_str(&format!(
            "% {} ({})\n\\begin{{aligned}}\n",
            f.id,
            f.kind.condition()
        ));
        let lines: Vec<String> = f
            .functions
            .iter()
            .zip(&f.closed)
            .map(|(name, e)| format!("{name} &= {}", latex(e)))
            .collect();
        out.push_str(&lines.join(" \\\\\n"));
        out.push_str("\n\\end{aligned}\n");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_expr;
    use crate::phi::make_ansatz;

    fn branch(pairs: &[(&str, &str)], free: &[&str]) -> SolutionBranch {
        SolutionBranch {
            assignment: pairs
                .iter()
                .map(|(s, e)| (Symbol::new(s), parse_expr(e).unwrap()))
                .collect(),
            constraints: Vec::new(),
            free_unknowns: free.iter().map(|s| Symbol::new(s)).collect(),
            degenerate: false,
            constant: false,
        }
    }

    fn fourth() -> SolutionBranch {
        branch(
            &[
                ("a0", "0"),
                ("a1", "-1"),
                ("b0", "eta - 2*k"),
                ("b1", "0"),
                ("b2", "-2"),
                ("lambda", "k"),
            ],
            &[],
        )
    }

    fn assemble(b: &SolutionBranch, kind: BranchKind) -> Result<SolutionFamily, AssembleError> {
        let ansatz = make_ansatz(1, 2).unwrap();
        let fs = [Symbol::new("u"), Symbol::new("v")];
        assemble_family(b, &ansatz, &fs, &Symbol::new("lambda"), kind)
    }

    #[test]
    fn phi_closed_forms() {
        assert_eq!(
            phi_branch_expr(BranchKind::TanhNeg),
            parse_expr("-sqrt(-k)*tanh(sqrt(-k)*xi)").unwrap()
        );
        assert_eq!(
            phi_branch_expr(BranchKind::RationalZeroK),
            parse_expr("-1/xi").unwrap()
        );
        let at_zero = substitute(
            &phi_branch_expr(BranchKind::TanPos),
            &BTreeMap::from([(Symbol::new("xi"), Expr::zero())]),
        )
        .unwrap();
        let v = crate::symexpr::eval_numeric(&at_zero, &BTreeMap::from([(Symbol::new("k"), 2.5)]));
        assert_eq!(v, Ok(0.0));
    }

    #[test]
    fn fourth_family_tanh() {
        let f = assemble(&fourth(), BranchKind::TanhNeg).unwrap();
        assert_eq!(
            f.closed[0],
            parse_expr("sqrt(-k)*tanh(sqrt(-k)*(x + k*t))").unwrap()
        );
        assert_eq!(
            f.closed[1],
            parse_expr("eta - 2*k + 2*k*tanh(sqrt(-k)*(x + k*t))^2").unwrap()
        );
    }

    #[test]
    fn third_family_cot() {
        let third = branch(
            &[
                ("a0", "0"),
                ("a1", "-2"),
                ("b0", "eta"),
                ("b1", "0"),
                ("b2", "2"),
                ("lambda", "-2*k"),
            ],
            &[],
        );
        let f = assemble(&third, BranchKind::CotPos).unwrap();
        assert_eq!(
            f.closed[0],
            parse_expr("2*sqrt(k)*cot(sqrt(k)*(x - 2*k*t))").unwrap()
        );
        assert_eq!(
            f.closed[1],
            parse_expr("eta + 2*k*cot(sqrt(k)*(x - 2*k*t))^2").unwrap()
        );
    }

    #[test]
    fn first_family_rational() {
        let first = branch(
            &[
                ("a1", "-1"),
                ("b0", "eta"),
                ("b1", "-2*a0"),
                ("b2", "0"),
                ("lambda", "k + 3*a0^2"),
            ],
            &["a0"],
        );
        let f = assemble(&first, BranchKind::RationalZeroK).unwrap();
        assert_eq!(f.closed[0], parse_expr("a0 + 1/(x + 3*a0^2*t)").unwrap());
        assert_eq!(
            f.closed[1],
            parse_expr("eta + 2*a0/(x + 3*a0^2*t)").unwrap()
        );
    }

    #[test]
    fn rational_kind_needs_k_free_of_poles() {
        let b = branch(&[("a1", "1/k"), ("lambda", "k")], &[]);
        assert!(matches!(
            assemble(&b, BranchKind::RationalZeroK),
            Err(AssembleError::Incompatible { .. })
        ));
        assert!(assemble(&b, BranchKind::TanhNeg).is_ok());
    }

    #[test]
    fn dedupe_merges_renamed_copies() {
        let mk = |name: &str| {
            let b = branch(&[("a1", "-1"), ("lambda", &format!("{name}^2"))], &[name]);
            let mut f = assemble(&b, BranchKind::TanhNeg).unwrap();
            f.closed = f
                .closed
                .iter()
                .map(|e| {
                    substitute(e, &BTreeMap::from([(Symbol::new("a0"), Expr::sym(name))])).unwrap()
                })
                .collect();
            f
        };
        let (a, c) = (mk("a0"), mk("c0"));
        assert_eq!(dedupe(vec![a.clone(), c]).len(), 1);
        let mut coth = a.clone();
        coth.kind = BranchKind::CothNeg;
        assert_eq!(dedupe(vec![a.clone(), a.clone(), coth]).len(), 2);
    }

    #[test]
    fn renders() {
        let mut f = assemble(&fourth(), BranchKind::TanhNeg).unwrap();
        f.id = "1.tanh".into();
        let report = SolutionReport {
            system: "s".into(),
            balance: vec![1, 2],
            families: vec![f],
            complete: true,
            branches_explored: 3,
        };
        let tex = render_families(&report, OutputFormat::Latex);
        assert!(tex.contains("\\tanh") && tex.contains("x+kt"), "{tex}");
        let json: serde_json::Value =
            serde_json::from_str(&render_families(&report, OutputFormat::Json)).unwrap();
        assert_eq!(json["balance"]["n"], 2);
        assert_eq!(json["families"][0]["branch_kind"], "tanh");
        let empty = SolutionReport {
            families: Vec::new(),
            ..report
        };
        let json: serde_json::Value =
            serde_json::from_str(&render_families(&empty, OutputFormat::Json)).unwrap();
        assert_eq!(json["families"].as_array().unwrap().len(), 0);
    }
}
