//! Parse an expression, differentiate it and render it three ways.

use twsolve::parser::{parse_expr, render_expr, RenderFormat};
use twsolve::symexpr::{differentiate, Symbol};

fn main() {
    let e = parse_expr("a0 + a1*tanh(sqrt(-k)*(x + lambda*t))^2").expect("valid expression");
    let d = differentiate(&e, &Symbol::new("x"));
    for format in [RenderFormat::Dsl, RenderFormat::Latex] {
        println!("{}", render_expr(&e, format));
        println!("d/dx: {}", render_expr(&d, format));
    }
}
