//! Run the oracle suite that backs `bubblerad verify` and print its table.
//!
//!     cargo run --release --example verify_report [rel_tol]

use bubblerad::cli::verify::{self, Status};

fn main() {
    let rel_tol = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(1e-9);
    let checks = verify::run_suite(rel_tol);
    print!("{}", verify::render_table(&checks));
    let failed = checks.iter().filter(|c| c.status == Status::Fail).count();
    println!("{failed} failed");
}
