//! The verification suite at reduced scale: every criterion, small ranges.
//!
//! The full-scale run is the `acceptance` test target
//! (`cargo test --test acceptance -- --nocapture`) or
//! `cargo run --release -- run-suite`.
//!
//! ```text
//! cargo run --example verification_suite
//! ```

use lattice_sampling::verify::{run_suite, SuiteConfig};

fn main() -> lattice_sampling::Result<()> {
    let report = run_suite(&SuiteConfig::quick())?;
    println!("{}", report.summary());
    Ok(())
}
