//! Reconstructing a polynomial from lattice samples:
//! `f(x) = (1/m) Σ f(ξ^ν) V_j(x - ξ^ν)`.
//!
//! ```text
//! cargo run --example sampling_representation
//! ```

use lattice_sampling::discretize::{sampling_representation_check, ShiftOperator};
use lattice_sampling::freqsets::build_rectangle;
use lattice_sampling::kernels::KernelId;
use lattice_sampling::lattices::fibonacci_points;
use lattice_sampling::trigpoly::{random_poly, CoefficientLaw};

fn main() -> lattice_sampling::Result<()> {
    // in the exact regime the reconstruction error is float noise
    let ps = fibonacci_points(12)?;
    let rect = build_rectangle(&[4, 4])?;
    let f = random_poly(&rect, 7, CoefficientLaw::ComplexGaussian);
    let op = ShiftOperator::from_kernel_id(KernelId::TensorVP { j: vec![4, 4] }, ps)?;
    let err = sampling_representation_check(&f, &op, 64, 0)?;
    println!("F_12, f in T(R(4,4)), kernel V_(4,4): max pointwise error {err:.3e}");

    // the same rectangle on a lattice that is too small aliases badly
    let ps = fibonacci_points(6)?;
    let op = ShiftOperator::from_kernel_id(KernelId::TensorVP { j: vec![4, 4] }, ps)?;
    let err = sampling_representation_check(&f, &op, 64, 0)?;
    println!("F_6 (13 points), same f and kernel:       max pointwise error {err:.3e}");
    Ok(())
}
