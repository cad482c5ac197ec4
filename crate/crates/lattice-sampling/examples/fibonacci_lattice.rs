//! Fibonacci point sets and their dual lattices.
//!
//! Builds `F_n`, shows the points as exact rationals, and scans the largest
//! hyperbolic cross `Γ(N, 2)` that the cubature rule integrates exactly:
//!
//! ```text
//! cargo run --example fibonacci_lattice
//! ```

use lattice_sampling::freqsets::FreqIndex;
use lattice_sampling::lattices::{fibonacci_points, gamma_scan};

fn main() -> lattice_sampling::Result<()> {
    let ps = fibonacci_points(7)?;
    println!("F_7 has {} points; coordinates are multiples of 2π/{}:", ps.len(), ps.modulus());
    for (mu, row) in ps.residues().iter().enumerate() {
        println!("  y^{:<2} = 2π·({:>2}/21, {:>2}/21)", mu + 1, row[0], row[1]);
    }

    let dual = ps.dual().expect("rank-1 lattice");
    println!("\ndual lattice: k1 + {}·k2 ≡ 0 (mod {})", dual.generator()[1], dual.modulus());
    for k in [[3, 1], [8, 1], [1, 0], [13, 1]] {
        let k = FreqIndex::new(k.to_vec());
        println!("  contains {:?}: {}", k.coords(), dual.contains(&k));
    }

    println!("\nexactness scan (largest N with Γ(N,2) avoiding the dual lattice):");
    println!("  {:>3} {:>8} {:>7} {:>7}", "n", "b_n", "N_max", "ratio");
    for row in gamma_scan(3, 20)? {
        println!("  {:>3} {:>8} {:>7} {:>7.4}", row.n, row.b_n, row.n_max, row.ratio);
    }
    Ok(())
}
