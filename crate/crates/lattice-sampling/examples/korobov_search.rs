//! Finding Korobov cubature rules exact on hyperbolic-cross polynomials in
//! three and four dimensions: the smallest admissible prime modulus and the
//! smallest generator `h` with `(1, h, h², ...)` avoiding `Γ(L, d)`.
//!
//! ```text
//! cargo run --example korobov_search
//! ```

use lattice_sampling::freqsets::build_hyperbolic_cross;
use lattice_sampling::lattices::{is_exact_on, korobov_search};

fn main() -> lattice_sampling::Result<()> {
    for d in [3usize, 4] {
        println!("d = {d}:");
        println!("  {:>3} {:>8} {:>8} {:>6} {:>9}", "L", "|Γ(L,d)|", "m", "h", "verified");
        for l in 1..=6u64 {
            let found = korobov_search(l, d)?;
            let gamma = build_hyperbolic_cross(l, d)?;
            let exact = is_exact_on(&found.dual()?, &gamma);
            println!(
                "  {:>3} {:>8} {:>8} {:>6} {:>9}",
                l, found.card_gamma, found.m, found.h, exact
            );
        }
    }
    println!("\nthe modulus grows like L(log L)^(d-1), the cross cardinality rate");
    Ok(())
}
