//! Norms of the shift operators `a ↦ (1/b_n) Σ a_ν V_(Q_r)(x - y^ν)` as the
//! cross level r grows: the `p = 1` and `p = ∞` norms scale like r, and the
//! Gram-based `p = 2` norm like √r.
//!
//! ```text
//! cargo run --example operator_norms
//! ```

use lattice_sampling::discretize::{op_norm, op_norm_probe, ShiftOperator};
use lattice_sampling::kernels::KernelId;
use lattice_sampling::lattices::{fibonacci_n_max, fibonacci_points};

fn main() -> lattice_sampling::Result<()> {
    let n = 13;
    let ps = fibonacci_points(n)?;
    let n_max = fibonacci_n_max(n)?;
    let r_max = 63 - n_max.leading_zeros();
    println!(
        "F_{n} ({} points), N_max = {n_max}: admissible cross levels r ≤ {r_max}",
        ps.len()
    );
    println!(
        "{:>3} {:>10} {:>10} {:>10} {:>12}",
        "r", "‖·‖₁", "‖·‖₂", "‖·‖_∞", "probe(p=4)"
    );
    for r in 1..=r_max {
        let op = ShiftOperator::from_kernel_id(KernelId::HcValleePoussin { r, dim: 2 }, ps.clone())?;
        println!(
            "{:>3} {:>10.4} {:>10.4} {:>10.4} {:>12.4}",
            r,
            op_norm(&op, 1.0)?,
            op_norm(&op, 2.0)?,
            op_norm(&op, f64::INFINITY)?,
            op_norm_probe(&op, 4.0, 10, 1)?,
        );
    }
    println!("(the p = 4 column is a probing lower bound, not a norm)");
    Ok(())
}
