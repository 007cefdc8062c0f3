//! Reduce the coupled MkdV system to its traveling-wave ODEs.

use twsolve::parser::{parse_system, MKDV_SOURCE};
use twsolve::wave::reduce_to_ode;

fn main() {
    let pde = parse_system(MKDV_SOURCE).expect("bundled system parses");
    let ode = reduce_to_ode(&pde, "lambda").expect("reduction succeeds");
    for (eq, scale) in ode.equations.iter().zip(&ode.scales) {
        println!("{eq} = 0    [scale {scale}]");
    }
}
