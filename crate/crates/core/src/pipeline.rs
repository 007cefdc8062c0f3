//! End-to-end driver: parse, reduce, balance, collect, solve, assemble,
//! verify and render. Every stage is deterministic.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::algsolve::{solve_system, Limits, SolveError};
use crate::parser::{parse_expr, parse_system, render_expr, PDESystem, ParseError, RenderFormat};
use crate::phi::{ansatz_for, balance, substitute_and_collect, AnsatzError, BalanceError, Degrees};
use crate::solutions::{
    dedupe, expand_branch, render_families, AssembleError, BranchKind, OutputFormat, SolutionReport,
};
use crate::symexpr::{eval_numeric, Symbol};
use crate::verify::{
    catalog_check, verify_numeric, verify_symbolic, CatalogStatus, NumericConfig,
    VerificationReport, VerifyError,
};
use crate::wave::{reduce_to_ode, ODESystem, ReductionError};

/// Process exit codes of the `twsolve` binary.
pub mod exit {
    pub const OK: i32 = 0;
    pub const IO: i32 = 1;
    pub const PARSE: i32 = 2;
    pub const BALANCE: i32 = 3;
    pub const NO_SOLUTION: i32 = 4;
    pub const VERIFY: i32 = 5;
    pub const LIMITS: i32 = 6;
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub wave_speed: String,
    /// Bypasses balancing when set.
    pub degrees: Option<Vec<i64>>,
    pub kinds: Vec<BranchKind>,
    pub verify_symbolic: bool,
    pub verify_numeric: bool,
    pub numeric: NumericConfig,
    pub format: OutputFormat,
    pub limits: Limits,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            wave_speed: "lambda".to_string(),
            degrees: None,
            kinds: BranchKind::ALL.to_vec(),
            verify_symbolic: true,
            verify_numeric: true,
            numeric: NumericConfig::default(),
            format: OutputFormat::Text,
            limits: Limits::default(),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Reduction(#[from] ReductionError),
    #[error(transparent)]
    Balance(#[from] BalanceError),
    #[error(transparent)]
    Ansatz(#[from] AnsatzError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Assemble(#[from] AssembleError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error("invalid argument: {0}")]
    Argument(String),
}

impl PipelineError {
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Parse(_) | PipelineError::Reduction(_) | PipelineError::Argument(_) => {
                exit::PARSE
            }
            PipelineError::Balance(_) | PipelineError::Ansatz(_) => exit::BALANCE,
            PipelineError::Solve(_) => exit::LIMITS,
            PipelineError::Assemble(_) | PipelineError::Verify(_) => exit::VERIFY,
        }
    }
}

/// A rendered report plus the exit code it implies.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub report: String,
}

/// Parses `name=value` pairs separated by commas; values are decimals or
/// exact ratios such as `1/3`.
pub fn parse_bindings(text: &str) -> Result<BTreeMap<Symbol, f64>, PipelineError> {
    let mut out = BTreeMap::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (name, value) = part
            .split_once('=')
            .ok_or_else(|| PipelineError::Argument(format!("binding `{part}` lacks `=`")))?;
        let value = value.trim();
        let v = match value.parse::<f64>() {
            Ok(v) => v,
            Err(_) => {
                let e = parse_expr(value)
                    .map_err(|e| PipelineError::Argument(format!("binding `{part}`: {e}")))?;
                eval_numeric(&e, &BTreeMap::new())
                    .map_err(|e| PipelineError::Argument(format!("binding `{part}`: {e}")))?
            }
        };
        out.insert(Symbol::new(name.trim()), v);
    }
    Ok(out)
}

/// Parses a comma-separated list of branch kinds.
pub fn parse_kinds(text: &str) -> Result<Vec<BranchKind>, PipelineError> {
    text.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| {
            BranchKind::from_name(p)
                .ok_or_else(|| PipelineError::Argument(format!("unknown branch kind `{p}`")))
        })
        .collect()
}

/// Parses `M,N` (or `M` for one function).
pub fn parse_degrees(text: &str) -> Result<Vec<i64>, PipelineError> {
    let ds: Vec<i64> = text
        .split(',')
        .map(|p| p.trim().parse::<i64>())
        .collect::<Result<_, _>>()
        .map_err(|_| PipelineError::Argument(format!("degrees `{text}` are not integers")))?;
    if ds.is_empty() || ds.len() > 2 || ds.iter().any(|&d| d <= 0) {
        return Err(PipelineError::Argument(format!(
            "degrees `{text}` must be one or two positive integers"
        )));
    }
    Ok(ds)
}

fn reduce(source: &str, config: &RunConfig) -> Result<(PDESystem, ODESystem), PipelineError> {
    let pde = parse_system(source)?;
    let ode = reduce_to_ode(&pde, &config.wave_speed)?;
    Ok((pde, ode))
}

/// The `reduce` subcommand.
pub fn run_reduce(source: &str, config: &RunConfig) -> Result<Outcome, PipelineError> {
    let (_, ode) = reduce(source, config)?;
    #[derive(Serialize)]
    struct Eq {
        ode: String,
        latex: String,
        scale: String,
    }
    let mut eqs = Vec::new();
    let mut live = ode.equations.iter();
    for (i, scale) in ode.scales.iter().enumerate() {
        if ode.dropped.contains(&i) {
            continue;
        }
        let e = live.next().expect("one equation per kept scale");
        eqs.push(Eq {
            ode: render_expr(e, RenderFormat::Dsl),
            latex: render_expr(e, RenderFormat::Latex),
            scale: scale.to_string(),
        });
    }
    let report = match config.format {
        OutputFormat::Json => {
            #[derive(Serialize)]
            struct Json<'a> {
                system: &'a str,
                wave_speed: &'a str,
                equations: Vec<Eq>,
                dropped: Vec<usize>,
            }
            let j = Json {
                system: &ode.name,
                wave_speed: ode.wave_speed.name(),
                equations: eqs,
                dropped: ode.dropped.iter().map(|i| i + 1).collect(),
            };
            serde_json::to_string_pretty(&j).expect("serializes") + "\n"
        }
        OutputFormat::Text => {
            let mut s = format!("system {}\n", ode.name);
            for e in &eqs {
                s.push_str(&format!("{} = 0    [scale {}]\n", e.ode, e.scale));
            }
            s
        }
        OutputFormat::Latex => {
            let lines: Vec<String> = eqs.iter().map(|e| format!("{} &= 0", e.latex)).collect();
            format!(
                "\\begin{{aligned}}\n{}\n\\end{{aligned}}\n",
                lines.join(" \\\\\n")
            )
        }
    };
    Ok(Outcome {
        code: exit::OK,
        report,
    })
}

fn degrees_for(ode: &ODESystem, config: &RunConfig) -> Result<Vec<u32>, PipelineError> {
    let ds = match &config.degrees {
        Some(ds) => {
            if ds.len() != ode.unknowns.len() {
                return Err(PipelineError::Argument(format!(
                    "{} degrees given for {} functions",
                    ds.len(),
                    ode.unknowns.len()
                )));
            }
            ds.clone()
        }
        None => balance(ode)?.to_vec(),
    };
    Ok(ds.into_iter().map(|d| d as u32).collect())
}

/// The `balance` subcommand.
pub fn run_balance(source: &str, config: &RunConfig) -> Result<Outcome, PipelineError> {
    let (_, ode) = reduce(source, config)?;
    let ds = degrees_for(&ode, config)?;
    let d = Degrees {
        m: ds[0],
        n: ds.get(1).copied(),
    };
    let report = match config.format {
        OutputFormat::Json => {
            serde_json::to_string(&serde_json::json!({ "m": d.m, "n": d.n })).expect("serializes")
                + "\n"
        }
        OutputFormat::Text | OutputFormat::Latex => match d.n {
            Some(n) => format!("m = {}, n = {n}\n", d.m),
            None => format!("m = {}\n", d.m),
        },
    };
    Ok(Outcome {
        code: exit::OK,
        report,
    })
}

/// Runs the full pipeline and returns the report structure.
pub fn solve(source: &str, config: &RunConfig) -> Result<(SolutionReport, i32), PipelineError> {
    let (pde, ode) = reduce(source, config)?;
    let degrees = degrees_for(&ode, config)?;
    let ds: Vec<i64> = degrees.iter().map(|&d| d as i64).collect();
    let ansatz = ansatz_for(&ds)?;
    let sys = substitute_and_collect(&ode, &ansatz)?;
    let result = solve_system(&sys, config.limits)?;
    for d in &result.diagnostics {
        log::info!("solver: {d}");
    }
    let mut families = Vec::new();
    for (bi, branch) in result.branches.iter().enumerate() {
        if branch.constant {
            log::info!("constant branch {branch} is not expanded");
            continue;
        }
        let symbolic = config
            .verify_symbolic
            .then(|| verify_symbolic(branch, &sys));
        for mut f in expand_branch(
            branch,
            &ansatz,
            &ode.unknowns,
            &ode.wave_speed,
            &config.kinds,
        )? {
            f.id = format!("{}.{}", bi + 1, f.kind);
            let mut report = VerificationReport::empty(config.numeric.tol);
            report.symbolic_ok = symbolic;
            if config.verify_numeric {
                match verify_numeric(&f, &pde, &config.numeric) {
                    Ok(r) => {
                        report = VerificationReport {
                            symbolic_ok: symbolic,
                            ..r
                        }
                    }
                    Err(e) => {
                        log::warn!("family {}: {e}", f.id);
                        report.numeric_max_residual = Some(f64::INFINITY);
                    }
                }
            }
            f.verification = Some(report);
            families.push(f);
        }
    }
    let families = dedupe(families);
    let code = if families.is_empty() {
        if result.complete {
            exit::NO_SOLUTION
        } else {
            exit::LIMITS
        }
    } else if families
        .iter()
        .any(|f| f.verification.as_ref().is_some_and(|r| r.passed()))
    {
        exit::OK
    } else {
        exit::VERIFY
    };
    let report = SolutionReport {
        system: ode.name.clone(),
        balance: degrees,
        families,
        complete: result.complete,
        branches_explored: result.branches_explored,
    };
    Ok((report, code))
}

/// The `solve` subcommand.
pub fn run_solve(source: &str, config: &RunConfig) -> Result<Outcome, PipelineError> {
    let (report, code) = solve(source, config)?;
    Ok(Outcome {
        code,
        report: render_families(&report, config.format),
    })
}

/// The `catalog` subcommand: requires the two-function MkdV system.
pub fn run_catalog(source: &str, config: &RunConfig) -> Result<Outcome, PipelineError> {
    let pde = parse_system(source)?;
    let summary = catalog_check(&pde, &config.numeric)?;
    let report = match config.format {
        OutputFormat::Json => {
            let rows: Vec<serde_json::Value> = summary
                .rows
                .iter()
                .map(|r| {
                    let (status, category) = match &r.status {
                        CatalogStatus::Pass => ("pass", None),
                        CatalogStatus::Corrected { category } => {
                            ("corrected", Some(category.clone()))
                        }
                        CatalogStatus::Fail => ("fail", None),
                    };
                    let corrections: BTreeMap<&str, f64> = r
                        .corrections
                        .iter()
                        .map(|(c, v)| (c.as_str(), *v))
                        .collect();
                    serde_json::json!({
                        "id": format!("u{}", r.id),
                        "family": r.family,
                        "kind": r.kind.name(),
                        "status": status,
                        "correction": category,
                        "printed_residual": r.printed_residual,
                        "corrections": corrections,
                    })
                })
                .collect();
            let j = serde_json::json!({
                "entries": rows,
                "passed_as_printed": summary.passed_as_printed(),
                "corrected": summary.corrected(),
                "failed": summary.failed(),
                "tol": summary.tol,
                "notes": summary.notes,
            });
            serde_json::to_string_pretty(&j).expect("serializes") + "\n"
        }
        OutputFormat::Text | OutputFormat::Latex => summary.render_table(),
    };
    let code = if summary.failed() == 0 {
        exit::OK
    } else {
        exit::VERIFY
    };
    Ok(Outcome { code, report })
}
