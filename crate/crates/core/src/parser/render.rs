use num_rational::BigRational;
use num_traits::{One, Signed};

use super::WAVE_VARIABLE;
use crate::symexpr::Expr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RenderFormat {
    Dsl,
    Latex,
}

/// Renders an expression. DSL output parses back to the same canonical form.
pub fn render_expr(e: &Expr, format: RenderFormat) -> String {
    match format {
        RenderFormat::Dsl => dsl(e).0,
        RenderFormat::Latex => latex(e).0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Prec {
    Sum,
    Product,
    Neg,
    Power,
    Atom,
}

/// Sum terms in display order: the reverse of canonical order, so constants
/// trail and higher powers lead.
fn display_terms(terms: &[Expr]) -> impl Iterator<Item = &Expr> {
    terms.iter().rev()
}

/// Splits a canonical term into `(coefficient, numerator factors, denominator factors)`.
fn fraction_parts(e: &Expr) -> (BigRational, Vec<Expr>, Vec<Expr>) {
    let (c, rest) = e.split_coefficient();
    let mut num = Vec::new();
    let mut den = Vec::new();
    if !rest.is_one() {
        for f in rest.factors() {
            match f {
                Expr::Power(b, n) if n < 0 => den.push(b.pow(-n).expect("nonzero base")),
                f => num.push(f),
            }
        }
    }
    (c, num, den)
}

fn dsl_wrap(e: &Expr, min: Prec) -> String {
    let (s, p) = dsl(e);
    if p < min {
        format!("({s})")
    } else {
        s
    }
}

fn dsl(e: &Expr) -> (String, Prec) {
    match e {
        Expr::Rational(r) => {
            if r.is_negative() {
                (
                    format!("-{}", dsl(&Expr::Rational(-r.clone())).0),
                    Prec::Neg,
                )
            } else if r.is_integer() {
                (r.numer().to_string(), Prec::Atom)
            } else {
                (format!("{}/{}", r.numer(), r.denom()), Prec::Product)
            }
        }
        Expr::Symbol(s) => (s.name().to_string(), Prec::Atom),
        Expr::Sum(terms) => {
            let mut out = String::new();
            for (i, t) in display_terms(terms).enumerate() {
                let neg = t.is_negative_term();
                let body = if neg { -t } else { t.clone() };
                let s = dsl_wrap(&body, Prec::Product);
                match (i, neg) {
                    (0, false) => out.push_str(&s),
                    (0, true) => out.push_str(&format!("-{s}")),
                    (_, false) => out.push_str(&format!(" + {s}")),
                    (_, true) => out.push_str(&format!(" - {s}")),
                }
            }
            (out, Prec::Sum)
        }
        Expr::Product(_) => dsl_product(e),
        Expr::Power(_, n) if *n < 0 => dsl_product(e),
        Expr::Power(b, n) => (format!("{}^{}", dsl_wrap(b, Prec::Atom), n), Prec::Power),
        Expr::Func(kind, arg) => (format!("{}({})", kind.name(), dsl(arg).0), Prec::Atom),
        Expr::Deriv(arg, vars) => {
            let names: Vec<&str> = vars.iter().map(|v| v.name()).collect();
            match arg.as_symbol() {
                Some(f) if names.iter().all(|v| *v == "x" || *v == "t") => {
                    (format!("{}_{}", f, names.concat()), Prec::Atom)
                }
                Some(f) if names.iter().all(|v| *v == WAVE_VARIABLE) => {
                    (format!("{}{}", f, "'".repeat(names.len())), Prec::Atom)
                }
                _ => (
                    format!("D({}, {})", dsl(arg).0, names.join(", ")),
                    Prec::Atom,
                ),
            }
        }
    }
}

fn dsl_product(e: &Expr) -> (String, Prec) {
    let (c, num, den) = fraction_parts(e);
    let neg = c.is_negative();
    let c = c.abs();
    let mut num_parts: Vec<String> = Vec::new();
    if !c.numer().is_one() || num.is_empty() {
        num_parts.push(c.numer().to_string());
    }
    num_parts.extend(num.iter().map(|f| dsl_wrap(f, Prec::Power)));
    let mut den_parts: Vec<String> = Vec::new();
    if !c.denom().is_one() {
        den_parts.push(c.denom().to_string());
    }
    den_parts.extend(den.iter().map(|f| dsl_wrap(f, Prec::Power)));
    let mut s = num_parts.join("*");
    if !den_parts.is_empty() {
        s.push('/');
        if den_parts.len() == 1 {
            s.push_str(&den_parts[0]);
        } else {
            s.push_str(&format!("({})", den_parts.join("*")));
        }
    }
    if neg {
        (format!("-{s}"), Prec::Neg)
    } else {
        (s, Prec::Product)
    }
}

const GREEK: &[&str] = &[
    "alpha", "beta", "gamma", "delta", "epsilon", "zeta", "eta", "theta", "kappa", "lambda", "mu",
    "nu", "xi", "pi", "rho", "sigma", "tau", "phi", "chi", "psi", "omega",
];

fn latex_symbol(name: &str) -> String {
    if let Some(inner) = name.strip_prefix("sqrt(").and_then(|s| s.strip_suffix(')')) {
        return format!("\\sqrt{{{}}}", inner);
    }
    if GREEK.contains(&name) {
        return format!("\\{name}");
    }
    if let Some((head, sub)) = name.split_once('_') {
        return format!("{}_{{{}}}", latex_symbol(head), sub);
    }
    let split = name.trim_end_matches(|c: char| c.is_ascii_digit()).len();
    if split > 0 && split < name.len() {
        return format!("{}_{{{}}}", latex_symbol(&name[..split]), &name[split..]);
    }
    name.to_string()
}

fn latex_wrap(e: &Expr, min: Prec) -> String {
    let (s, p) = latex(e);
    if p < min {
        format!("\\left({s}\\right)")
    } else {
        s
    }
}

fn juxtapose(parts: &[String]) -> String {
    let mut out = String::new();
    for p in parts {
        if let (Some(prev), Some(next)) = (out.chars().last(), p.chars().next()) {
            let control_word = out
                .rsplit('\\')
                .next()
                .is_some_and(|w| !w.is_empty() && w.chars().all(|c| c.is_ascii_alphabetic()))
                && out.contains('\\');
            if prev.is_ascii_digit() && next.is_ascii_digit() {
                out.push_str(" \\cdot ");
            } else if control_word && prev.is_ascii_alphabetic() && next.is_ascii_alphabetic() {
                out.push(' ');
            }
        }
        out.push_str(p);
    }
    out
}

fn latex(e: &Expr) -> (String, Prec) {
    match e {
        Expr::Rational(r) => {
            if r.is_negative() {
                (
                    format!("-{}", latex(&Expr::Rational(-r.clone())).0),
                    Prec::Neg,
                )
            } else if r.is_integer() {
                (r.numer().to_string(), Prec::Atom)
            } else {
                (
                    format!("\\frac{{{}}}{{{}}}", r.numer(), r.denom()),
                    Prec::Atom,
                )
            }
        }
        Expr::Symbol(s) => (latex_symbol(s.name()), Prec::Atom),
        Expr::Sum(terms) => {
            let mut out = String::new();
            for (i, t) in display_terms(terms).enumerate() {
                let neg = t.is_negative_term();
                let body = if neg { -t } else { t.clone() };
                let s = latex_wrap(&body, Prec::Product);
                match (i, neg) {
                    (0, false) => out.push_str(&s),
                    (0, true) => out.push_str(&format!("-{s}")),
                    (_, false) => out.push_str(&format!("+{s}")),
                    (_, true) => out.push_str(&format!("-{s}")),
                }
            }
            (out, Prec::Sum)
        }
        Expr::Product(_) => latex_product(e),
        Expr::Power(_, n) if *n < 0 => latex_product(e),
        Expr::Power(b, n) => (
            format!("{}^{{{}}}", latex_wrap(b, Prec::Atom), n),
            Prec::Power,
        ),
        Expr::Func(kind, arg) => (
            format!("\\{}\\left({}\\right)", kind.name(), latex(arg).0),
            Prec::Atom,
        ),
        Expr::Deriv(arg, vars) => {
            let names: Vec<&str> = vars.iter().map(|v| v.name()).collect();
            match arg.as_symbol() {
                Some(f) if names.iter().all(|v| *v == "x" || *v == "t") => (
                    format!("{}_{{{}}}", latex_symbol(f.name()), names.concat()),
                    Prec::Atom,
                ),
                Some(f) if names.iter().all(|v| *v == WAVE_VARIABLE) => (
                    format!("{}{}", latex_symbol(f.name()), "'".repeat(names.len())),
                    Prec::Atom,
                ),
                _ => {
                    let denom: Vec<String> = names
                        .iter()
                        .map(|v| format!("\\partial {}", latex_symbol(v)))
                        .collect();
                    (
                        format!(
                            "\\frac{{\\partial^{{{}}}}}{{{}}}\\left({}\\right)",
                            names.len(),
                            denom.join(" "),
                            latex(arg).0
                        ),
                        Prec::Atom,
                    )
                }
            }
        }
    }
}

fn latex_product(e: &Expr) -> (String, Prec) {
    let (c, num, den) = fraction_parts(e);
    let neg = c.is_negative();
    let c = c.abs();
    let mut num_parts: Vec<String> = Vec::new();
    if !c.numer().is_one() || num.is_empty() {
        num_parts.push(c.numer().to_string());
    }
    num_parts.extend(num.iter().map(|f| latex_wrap(f, Prec::Power)));
    let mut den_parts: Vec<String> = Vec::new();
    if !c.denom().is_one() {
        den_parts.push(c.denom().to_string());
    }
    den_parts.extend(den.iter().map(|f| latex_wrap(f, Prec::Power)));
    let body = if den_parts.is_empty() {
        juxtapose(&num_parts)
    } else {
        format!(
            "\\frac{{{}}}{{{}}}",
            juxtapose(&num_parts),
            juxtapose(&den_parts)
        )
    };
    if neg {
        (format!("-{body}"), Prec::Neg)
    } else {
        (body, Prec::Product)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_expr;

    fn dsl_of(src: &str) -> String {
        render_expr(&parse_expr(src).unwrap(), RenderFormat::Dsl)
    }

    #[test]
    fn polynomial_text() {
        assert_eq!(dsl_of("x^2+1"), "x^2 + 1");
        assert_eq!(dsl_of("1 - x"), "-x + 1");
        assert_eq!(dsl_of("3/2*v"), "3*v/2");
        assert_eq!(dsl_of("-a/(b*c)"), "-a/(b*c)");
    }

    #[test]
    fn closed_form_text() {
        assert_eq!(
            dsl_of("sqrt(-k)*tanh(sqrt(-k)*(x + k*t))"),
            "sqrt(-k)*tanh(sqrt(-k)*(x + k*t))"
        );
    }

    #[test]
    fn derivatives_text() {
        assert_eq!(dsl_of("u'' + D(u*v, xi)"), "D(u*v, xi) + u''");
    }

    #[test]
    fn latex_forms() {
        let e = parse_expr("sqrt(-k)*tanh(sqrt(-k)*(x + k*t))").unwrap();
        let s = render_expr(&e, RenderFormat::Latex);
        assert!(s.contains("\\tanh"), "{s}");
        assert!(s.contains("x+kt"), "{s}");
        let e = parse_expr("eta*k + a0^2/2").unwrap();
        assert_eq!(
            render_expr(&e, RenderFormat::Latex),
            "\\eta k+\\frac{a_{0}^{2}}{2}"
        );
    }
}
