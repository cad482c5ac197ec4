//! Convolution with the integral replaced by a lattice cubature sum.
//!
//! Inside the exactness regime the discretized convolution reproduces the
//! exact coefficient-wise convolution to rounding error; outside it, aliasing
//! moves spectral mass and the error is macroscopic.
//!
//! ```text
//! cargo run --example discretized_convolution
//! ```

use lattice_sampling::discretize::{
    convolution_exactness_set, discretized_convolution,
};
use lattice_sampling::freqsets::{build_rectangle, FreqIndex};
use lattice_sampling::lattices::{fibonacci_points, is_exact_on};
use lattice_sampling::trigpoly::{max_coeff_diff, random_poly, CoefficientLaw, TrigPoly};
use num_complex::Complex64;

fn main() -> lattice_sampling::Result<()> {
    let ps = fibonacci_points(12)?; // 233 points
    let dual = ps.dual().expect("rank-1 lattice");

    println!("lattice: F_12 with {} points", ps.len());

    // random polynomials on R(4,4): difference frequencies reach R(7,7)
    let rect = build_rectangle(&[4, 4])?;
    let f = random_poly(&rect, 1, CoefficientLaw::ComplexGaussian);
    let g = random_poly(&rect, 2, CoefficientLaw::ComplexGaussian);
    let needed = convolution_exactness_set(&f, &g)?;
    println!(
        "exactness set has {} frequencies; dual-free: {}",
        needed.len(),
        is_exact_on(&dual, &needed)
    );
    let fast = discretized_convolution(&f, &g, &ps)?;
    let exact = f.convolve(&g)?;
    println!(
        "coefficient-wise |discretized - exact| = {:.3e}",
        max_coeff_diff(&fast, &exact)
    );

    // an aliasing witness: e_k for a dual-lattice k convolved with 1
    let witness = FreqIndex::new(vec![89, 1]); // 89 + 144·1 ≡ 0 (mod 233)
    assert!(dual.contains(&witness));
    let f = TrigPoly::exponential(witness);
    let g = TrigPoly::constant(2, Complex64::new(1.0, 0.0));
    let fast = discretized_convolution(&f, &g, &ps)?;
    let exact = f.convolve(&g)?;
    println!(
        "aliasing witness e_(89,1) * 1: exact = 0, discretized mean = {:.3}, error = {:.3}",
        fast.evaluate(&[0.0, 0.0]).re,
        max_coeff_diff(&fast, &exact)
    );
    Ok(())
}
