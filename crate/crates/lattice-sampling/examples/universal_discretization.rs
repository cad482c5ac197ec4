//! One point set serving a whole collection of rectangle polynomial spaces:
//! two-sided sampling discretization of `L_p` norms, exact at `p = 2`, with
//! uniformly bounded constants otherwise.
//!
//! ```text
//! cargo run --example universal_discretization
//! ```

use lattice_sampling::discretize::{universal_check, Collection};
use lattice_sampling::lattices::{fibonacci_n_max, fibonacci_points};

fn main() -> lattice_sampling::Result<()> {
    let n = 12;
    let ps = fibonacci_points(n)?;
    let big_n = fibonacci_n_max(n)? / 9;
    let collection = Collection::MaxProduct { n: big_n };
    println!(
        "F_{n} ({} points), collection C'({big_n}, 2) of all rectangles with j1·j2 ≤ {big_n}",
        ps.len()
    );
    println!(
        "{:>5} {:>12} {:>12} {:>12} {:>12}",
        "p", "min ratio", "max ratio", "max SpR", "repr err"
    );
    for p in [2.0, 4.0, f64::INFINITY] {
        let report = universal_check(&collection, &ps, p, 3, 0)?;
        assert!(report.exactness_verified);
        println!(
            "{:>5} {:>12.8} {:>12.8} {:>12.4} {:>12.3e}",
            if p.is_infinite() { "inf".into() } else { format!("{p}") },
            report.min_lower,
            report.max_upper,
            report.max_spr,
            report.max_representation_error,
        );
    }
    println!("(ratios are (1/m)Σ|f(ξ)|^p against ‖f‖_p^p over random polynomials)");
    Ok(())
}
