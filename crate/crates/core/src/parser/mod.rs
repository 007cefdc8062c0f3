//! Input DSL for coupled evolution systems, plus rendering back to text.
//!
//! ```text
//! system "coupled_mkdv"
//! params eta
//! functions u(x,t), v(x,t)
//! eq: u_t = 1/2*u_xxx - 3*u^2*u_x + 3/2*v_xx + 3*D(u*v, x) - 3*eta*u_x
//! eq: v_t = -v_xxx - 3*v*v_x - 3*u_x*v_x + 3*u^2*v_x + 3*eta*v_x
//! ```
//!
//! Subscript sugar `u_xxt` is accepted on declared function names only;
//! compound arguments need `D(expr, x, ...)`. Powers take integer literal
//! exponents and numeric literals are exact integers or ratios.

mod lexer;
mod render;

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::symexpr::{normalize, Expr, FuncKind, Symbol};
use lexer::{tokenize, Tok, Token};

pub use render::{render_expr, RenderFormat};

/// Name of the traveling-wave variable used for primed derivatives (`u'`).
pub const WAVE_VARIABLE: &str = "xi";

const MAX_NESTING: usize = 200;
const MAX_EXPONENT: i64 = 1000;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{line}:{col}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParseErrorKind {
    #[error("unexpected character {0:?}")]
    UnexpectedChar(char),
    #[error("decimal literals are not allowed; write exact ratios like 3/2")]
    DecimalLiteral,
    #[error("unterminated string literal")]
    UnterminatedString,
    #[error("expected {expected}, found {found}")]
    Syntax { expected: String, found: String },
    #[error("undeclared identifier `{0}`")]
    UndeclaredIdentifier(String),
    #[error("`{0}` is not an independent variable")]
    UndeclaredVariable(String),
    #[error("derivative of an expression without unknown functions: {0}")]
    DerivativeOfParameter(String),
    #[error("arity mismatch: {0}")]
    Arity(String),
    #[error("duplicate declaration of `{0}`")]
    Duplicate(String),
    #[error("function `{0}` is not allowed in equations")]
    UnsupportedFunction(String),
    #[error("exponent out of range")]
    ExponentRange,
    #[error("expression nested too deeply")]
    TooDeep,
    #[error("malformed expression: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionDecl {
    pub name: Symbol,
    pub vars: [Symbol; 2],
}

/// A parsed coupled system; each equation is stored as `lhs - rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct PDESystem {
    pub name: String,
    pub functions: Vec<FunctionDecl>,
    pub parameters: Vec<Symbol>,
    pub equations: Vec<Expr>,
}

impl PDESystem {
    pub fn function_names(&self) -> Vec<Symbol> {
        self.functions.iter().map(|f| f.name.clone()).collect()
    }

    /// Independent variables of the system, `x` then `t`.
    pub fn space_time(&self) -> (Symbol, Symbol) {
        (Symbol::new("x"), Symbol::new("t"))
    }

    /// Renders the system back to DSL text that parses to the same system.
    pub fn to_dsl(&self) -> String {
        let mut out = format!("system \"{}\"\n", self.name);
        if !self.parameters.is_empty() {
            let ps: Vec<_> = self
                .parameters
                .iter()
                .map(|p| p.name().to_string())
                .collect();
            out.push_str(&format!("params {}\n", ps.join(", ")));
        }
        let fs: Vec<_> = self
            .functions
            .iter()
            .map(|f| format!("{}({}, {})", f.name, f.vars[0], f.vars[1]))
            .collect();
        out.push_str(&format!("functions {}\n", fs.join(", ")));
        for e in &self.equations {
            out.push_str(&format!("eq: {} = 0\n", render_expr(e, RenderFormat::Dsl)));
        }
        out
    }
}

/// The coupled MkdV reference system shipped with the crate.
pub const MKDV_SOURCE: &str = include_str!("../../data/mkdv.pde");

pub fn parse_system(text: &str) -> Result<PDESystem, ParseError> {
    let tokens = tokenize(text)?;
    let mut p = Parser::new(tokens, Mode::System(Declarations::default()));
    p.system()
}

/// Parses a standalone expression in which every identifier is a symbol.
///
/// Besides the equation syntax this accepts `tan`, `cot`, `tanh`, `coth`,
/// the radicals `sqrt(k)` / `sqrt(-k)`, and primed derivatives `u''` taken
/// with respect to [`WAVE_VARIABLE`].
pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    let tokens = tokenize(text)?;
    let mut p = Parser::new(tokens, Mode::Free);
    let e = p.expr()?;
    p.expect_eof()?;
    p.finish(e)
}

#[derive(Default)]
struct Declarations {
    params: Vec<Symbol>,
    functions: Vec<FunctionDecl>,
}

enum Mode {
    Free,
    System(Declarations),
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    mode: Mode,
    depth: usize,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Int(n) => format!("`{n}`"),
        Tok::Str(s) => format!("\"{s}\""),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::Comma => "`,`".into(),
        Tok::Colon => "`:`".into(),
        Tok::Eq => "`=`".into(),
        Tok::Plus => "`+`".into(),
        Tok::Minus => "`-`".into(),
        Tok::Star => "`*`".into(),
        Tok::Slash => "`/`".into(),
        Tok::Caret => "`^`".into(),
        Tok::Prime => "`'`".into(),
        Tok::Eof => "end of input".into(),
    }
}

impl Parser {
    fn new(tokens: Vec<Token>, mode: Mode) -> Self {
        Parser {
            tokens,
            pos: 0,
            mode,
            depth: 0,
        }
    }

    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error_here(&self, kind: ParseErrorKind) -> ParseError {
        let t = &self.tokens[self.pos];
        ParseError {
            line: t.line,
            col: t.col,
            kind,
        }
    }

    fn error_at(t: &Token, kind: ParseErrorKind) -> ParseError {
        ParseError {
            line: t.line,
            col: t.col,
            kind,
        }
    }

    fn syntax(&self, expected: &str) -> ParseError {
        self.error_here(ParseErrorKind::Syntax {
            expected: expected.into(),
            found: describe(self.peek()),
        })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<Token, ParseError> {
        if *self.peek() == tok {
            Ok(self.bump())
        } else {
            Err(self.syntax(what))
        }
    }

    fn expect_ident(&mut self) -> Result<(String, Token), ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => Ok((s, self.bump())),
            _ => Err(self.syntax("identifier")),
        }
    }

    fn expect_eof(&self) -> Result<(), ParseError> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(self.syntax("end of input"))
        }
    }

    fn finish(&self, raw: Expr) -> Result<Expr, ParseError> {
        normalize(&raw).map_err(|e| self.error_here(ParseErrorKind::Malformed(e.to_string())))
    }

    fn decls(&mut self) -> &mut Declarations {
        match &mut self.mode {
            Mode::System(d) => d,
            Mode::Free => unreachable!("declarations only exist in system mode"),
        }
    }

    fn is_declared(&self, name: &str) -> bool {
        match &self.mode {
            Mode::Free => false,
            Mode::System(d) => {
                name == "x"
                    || name == "t"
                    || d.params.iter().any(|p| p.name() == name)
                    || d.functions.iter().any(|f| f.name.name() == name)
            }
        }
    }

    fn system(&mut self) -> Result<PDESystem, ParseError> {
        match self.peek() {
            Tok::Ident(s) if s == "system" => {
                self.bump();
            }
            _ => return Err(self.syntax("`system` header")),
        }
        let name = match self.peek().clone() {
            Tok::Str(s) => {
                self.bump();
                s
            }
            _ => return Err(self.syntax("system name string")),
        };
        let mut equations = Vec::new();
        loop {
            let head = self.tokens[self.pos].clone();
            match &head.tok {
                Tok::Eof => break,
                Tok::Ident(kw) if kw == "params" => {
                    self.bump();
                    loop {
                        let (p, tok) = self.expect_ident()?;
                        if self.is_declared(&p) || p == "D" {
                            return Err(Self::error_at(&tok, ParseErrorKind::Duplicate(p)));
                        }
                        self.decls().params.push(Symbol::new(&p));
                        if *self.peek() != Tok::Comma {
                            break;
                        }
                        self.bump();
                    }
                }
                Tok::Ident(kw) if kw == "functions" => {
                    self.bump();
                    loop {
                        let decl = self.fundecl()?;
                        self.decls().functions.push(decl);
                        if *self.peek() != Tok::Comma {
                            break;
                        }
                        self.bump();
                    }
                }
                Tok::Ident(kw) if kw == "eq" => {
                    self.bump();
                    self.expect(Tok::Colon, "`:` after `eq`")?;
                    let lhs = self.expr()?;
                    self.expect(Tok::Eq, "`=`")?;
                    let rhs = self.expr()?;
                    let raw = Expr::Sum(vec![lhs, Expr::Product(vec![Expr::int(-1), rhs])]);
                    let e = normalize(&raw).map_err(|e| {
                        Self::error_at(&head, ParseErrorKind::Malformed(e.to_string()))
                    })?;
                    equations.push(e);
                }
                _ => return Err(self.syntax("`params`, `functions` or `eq:`")),
            }
        }
        let d = std::mem::take(self.decls());
        let end = self.tokens[self.pos].clone();
        if d.functions.is_empty() || d.functions.len() > 2 {
            return Err(Self::error_at(
                &end,
                ParseErrorKind::Arity(format!(
                    "expected one or two unknown functions, found {}",
                    d.functions.len()
                )),
            ));
        }
        if equations.len() != d.functions.len() {
            return Err(Self::error_at(
                &end,
                ParseErrorKind::Arity(format!(
                    "{} equations for {} unknown functions",
                    equations.len(),
                    d.functions.len()
                )),
            ));
        }
        Ok(PDESystem {
            name,
            functions: d.functions,
            parameters: d.params,
            equations,
        })
    }

    fn fundecl(&mut self) -> Result<FunctionDecl, ParseError> {
        let (name, tok) = self.expect_ident()?;
        if self.is_declared(&name) || name == "D" || name.contains('_') {
            return Err(Self::error_at(&tok, ParseErrorKind::Duplicate(name)));
        }
        self.expect(Tok::LParen, "`(`")?;
        let mut vars = Vec::new();
        loop {
            let (v, vt) = self.expect_ident()?;
            vars.push((v, vt));
            if *self.peek() != Tok::Comma {
                break;
            }
            self.bump();
        }
        self.expect(Tok::RParen, "`)`")?;
        if vars.len() != 2 {
            return Err(Self::error_at(
                &tok,
                ParseErrorKind::Arity(format!(
                    "`{name}` must depend on (x, t), found {} variables",
                    vars.len()
                )),
            ));
        }
        let names: Vec<&str> = vars.iter().map(|(v, _)| v.as_str()).collect();
        if !(names == ["x", "t"] || names == ["t", "x"]) {
            let bad = vars
                .iter()
                .find(|(v, _)| v != "x" && v != "t")
                .unwrap_or(&vars[1]);
            return Err(Self::error_at(
                &bad.1,
                ParseErrorKind::UndeclaredVariable(bad.0.clone()),
            ));
        }
        Ok(FunctionDecl {
            name: Symbol::new(&name),
            vars: [Symbol::new("x"), Symbol::new("t")],
        })
    }

    fn enter(&mut self) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_NESTING {
            return Err(self.error_here(ParseErrorKind::TooDeep));
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        self.enter()?;
        let mut terms = vec![self.term()?];
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    terms.push(self.term()?);
                }
                Tok::Minus => {
                    self.bump();
                    let t = self.term()?;
                    terms.push(Expr::Product(vec![Expr::int(-1), t]));
                }
                _ => break,
            }
        }
        self.depth -= 1;
        Ok(if terms.len() == 1 {
            terms.pop().unwrap()
        } else {
            Expr::Sum(terms)
        })
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    let rhs = self.unary()?;
                    acc = Expr::Product(vec![acc, rhs]);
                }
                Tok::Slash => {
                    self.bump();
                    let rhs = self.unary()?;
                    acc = Expr::Product(vec![acc, Expr::Power(Box::new(rhs), -1)]);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            self.enter()?;
            let inner = self.unary()?;
            self.depth -= 1;
            return Ok(Expr::Product(vec![Expr::int(-1), inner]));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let n = self.exponent()?;
        Ok(Expr::Power(Box::new(base), n))
    }

    /// Integer exponent literal, optionally signed or parenthesized; `^` chains
    /// associate to the right.
    fn exponent(&mut self) -> Result<i64, ParseError> {
        let parenthesized = *self.peek() == Tok::LParen;
        if parenthesized {
            self.bump();
        }
        let negative = *self.peek() == Tok::Minus;
        if negative {
            self.bump();
        }
        let n = match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                n
            }
            _ => return Err(self.syntax("integer exponent")),
        };
        if parenthesized {
            self.expect(Tok::RParen, "`)`")?;
        }
        let mut value: i64 = i64::try_from(&n)
            .ok()
            .filter(|v| *v <= MAX_EXPONENT)
            .ok_or_else(|| self.error_here(ParseErrorKind::ExponentRange))?;
        if negative {
            value = -value;
        }
        if *self.peek() == Tok::Caret {
            self.bump();
            let rest = self.exponent()?;
            if !(0..=64).contains(&rest) {
                return Err(self.error_here(ParseErrorKind::ExponentRange));
            }
            let big = num_traits::Pow::pow(BigInt::from(value), rest as u64);
            value = i64::try_from(&big)
                .ok()
                .filter(|v| v.abs() <= MAX_EXPONENT)
                .ok_or_else(|| self.error_here(ParseErrorKind::ExponentRange))?;
        }
        Ok(value)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let tok = self.tokens[self.pos].clone();
        match tok.tok.clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(Expr::Rational(BigRational::from_integer(n)))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.bump();
                if *self.peek() == Tok::LParen {
                    if name == "D" {
                        return self.derivative(&tok);
                    }
                    if let Some(kind) = FuncKind::from_name(&name) {
                        return self.function(kind, &tok);
                    }
                    if name == "sqrt" {
                        return self.radical(&tok);
                    }
                }
                self.identifier(name, &tok)
            }
            _ => Err(self.syntax("expression")),
        }
    }

    fn function(&mut self, kind: FuncKind, tok: &Token) -> Result<Expr, ParseError> {
        if matches!(self.mode, Mode::System(_)) {
            return Err(Self::error_at(
                tok,
                ParseErrorKind::UnsupportedFunction(kind.name().into()),
            ));
        }
        self.bump();
        let arg = self.expr()?;
        self.expect(Tok::RParen, "`)`")?;
        Ok(Expr::Func(kind, Box::new(arg)))
    }

    fn radical(&mut self, tok: &Token) -> Result<Expr, ParseError> {
        if matches!(self.mode, Mode::System(_)) {
            return Err(Self::error_at(
                tok,
                ParseErrorKind::UnsupportedFunction("sqrt".into()),
            ));
        }
        self.bump();
        let negated = *self.peek() == Tok::Minus;
        if negated {
            self.bump();
        }
        let (base, _) = self.expect_ident()?;
        self.expect(Tok::RParen, "`)` (radicals take a single symbol)")?;
        Ok(Expr::Symbol(Symbol::sqrt_of(&Symbol::new(&base), negated)))
    }

    fn derivative(&mut self, tok: &Token) -> Result<Expr, ParseError> {
        self.bump();
        let arg = self.expr()?;
        let mut vars = Vec::new();
        while *self.peek() == Tok::Comma {
            self.bump();
            let (v, vt) = self.expect_ident()?;
            if let Mode::System(_) = self.mode {
                if v != "x" && v != "t" {
                    return Err(Self::error_at(&vt, ParseErrorKind::UndeclaredVariable(v)));
                }
            }
            vars.push(Symbol::new(&v));
        }
        self.expect(Tok::RParen, "`)`")?;
        if vars.is_empty() {
            return Err(Self::error_at(
                tok,
                ParseErrorKind::Arity("D(expr, var, ...) needs at least one variable".into()),
            ));
        }
        if let Mode::System(d) = &self.mode {
            let funcs: Vec<&Symbol> = d.functions.iter().map(|f| &f.name).collect();
            let syms = arg.symbols();
            if !syms.iter().any(|s| funcs.contains(&s)) {
                return Err(Self::error_at(
                    tok,
                    ParseErrorKind::DerivativeOfParameter(render_expr(
                        &normalize(&arg).unwrap_or(arg.clone()),
                        RenderFormat::Dsl,
                    )),
                ));
            }
        }
        Ok(Expr::Deriv(Box::new(arg), vars))
    }

    fn identifier(&mut self, name: String, tok: &Token) -> Result<Expr, ParseError> {
        match &self.mode {
            Mode::Free => {
                let mut primes = 0;
                while *self.peek() == Tok::Prime {
                    self.bump();
                    primes += 1;
                }
                let sym = Expr::Symbol(Symbol::new(&name));
                if primes == 0 {
                    Ok(sym)
                } else {
                    Ok(Expr::Deriv(
                        Box::new(sym),
                        vec![Symbol::new(WAVE_VARIABLE); primes],
                    ))
                }
            }
            Mode::System(d) => {
                if *self.peek() == Tok::Prime {
                    return Err(self.syntax("operator"));
                }
                if self.is_declared(&name) {
                    return Ok(Expr::Symbol(Symbol::new(&name)));
                }
                if let Some((base, suffix)) = name.split_once('_') {
                    if d.functions.iter().any(|f| f.name.name() == base) {
                        let mut vars = Vec::new();
                        for c in suffix.chars() {
                            if c != 'x' && c != 't' {
                                return Err(Self::error_at(
                                    tok,
                                    ParseErrorKind::UndeclaredVariable(c.to_string()),
                                ));
                            }
                            vars.push(Symbol::new(&c.to_string()));
                        }
                        if vars.is_empty() {
                            return Err(Self::error_at(
                                tok,
                                ParseErrorKind::UndeclaredIdentifier(name),
                            ));
                        }
                        return Ok(Expr::Deriv(Box::new(Expr::sym(base)), vars));
                    }
                }
                Err(Self::error_at(
                    tok,
                    ParseErrorKind::UndeclaredIdentifier(name),
                ))
            }
        }
    }
}

impl fmt::Display for PDESystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_dsl())
    }
}
