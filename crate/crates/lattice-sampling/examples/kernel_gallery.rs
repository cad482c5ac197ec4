//! The kernel families: Dirichlet, Fejér, de la Vallée Poussin, dyadic
//! blocks, and the hyperbolic-cross kernel, with their norms and the
//! closed-form/coefficient agreement.
//!
//! ```text
//! cargo run --example kernel_gallery
//! ```

use lattice_sampling::kernels::{
    block_a, dirichlet, dirichlet_closed, fejer, hc_vallee_poussin, vallee_poussin,
    vallee_poussin_closed,
};

fn main() -> lattice_sampling::Result<()> {
    println!("Dirichlet D_4 at a few points (coefficients vs closed form):");
    let d4 = dirichlet(4);
    for x in [0.0, 0.5, 2.2] {
        println!(
            "  D_4({x:.2}) = {:+.6}  |  sin(4.5x)/sin(x/2) = {:+.6}",
            d4.evaluate(&[x]).re,
            dirichlet_closed(4, x)
        );
    }

    println!("\nFejér kernels: unit mean, peak j, nonnegative:");
    for j in [1u32, 4, 16] {
        let k = fejer(j)?;
        println!(
            "  K_{j:<2}: ‖·‖₁ = {:.12}, ‖·‖_∞ = {:.6}",
            k.lp_norm(1.0)?,
            k.lp_norm(f64::INFINITY)?
        );
    }

    println!("\nde la Vallée Poussin kernels: ‖V_j‖₁ stays below 3:");
    for j in [1u32, 8, 64] {
        let v = vallee_poussin(j)?;
        println!("  V_{j:<2}: {} coefficients, ‖·‖₁ = {:.6}", v.num_coeffs(), v.lp_norm(1.0)?);
    }
    println!(
        "  V_3(1.0) = {:.6} via coefficients, {:.6} via 2K_6 - K_3",
        vallee_poussin(3)?.evaluate(&[1.0]).re,
        vallee_poussin_closed(3, 1.0)
    );

    println!("\ndyadic blocks A_s (support {{2^(s-2) < |k| <= 2^s - 1}}):");
    for s in 0..=4u32 {
        let a = block_a(s)?;
        let support: Vec<i64> = a.coeffs().map(|(k, _)| k[0]).collect();
        println!("  A_{s}: support {support:?}");
    }

    println!("\nhyperbolic-cross kernel V_(Q_r) in two dimensions:");
    for r in 0..=5u32 {
        let v = hc_vallee_poussin(r, 2)?;
        println!(
            "  r = {r}: {} coefficients, V(0,0) = {:.1}, ‖·‖₂ = {:.4}",
            v.num_coeffs(),
            v.evaluate(&[0.0, 0.0]).re,
            v.lp_norm(2.0)?
        );
    }
    Ok(())
}
