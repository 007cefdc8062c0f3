//! Check the sixteen published solutions and print the status table.

use twsolve::parser::{parse_system, MKDV_SOURCE};
use twsolve::verify::{catalog_check, NumericConfig};

fn main() {
    let pde = parse_system(MKDV_SOURCE).unwrap();
    let summary = catalog_check(&pde, &NumericConfig::default()).expect("catalog loads");
    print!("{}", summary.render_table());
}
