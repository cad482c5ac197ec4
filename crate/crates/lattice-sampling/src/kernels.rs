//! The named trigonometric kernels, as sparse coefficient maps and, where a
//! closed form exists, as cheap pointwise evaluators.
//!
//! Univariate building blocks:
//!
//! * Dirichlet `D_j`: coefficient 1 on `|k| <= j`,
//! * Fejér `K_j = j^{-1} (D_0 + ... + D_{j-1})`, nonnegative, unit mean,
//! * de la Vallée Poussin `V_j = 2 K_{2j} - K_j`, identity on degree `<= j`,
//! * dyadic blocks `A_0 = 1`, `A_1 = V_1 - 1`, `A_s = V_{2^{s-1}} - V_{2^{s-2}}`.
//!
//! Multivariate kernels are tensor products of these, and the hyperbolic-cross
//! kernel `V_{Q_r}` is the sum of the tensor blocks `A_s` over `|s|_1 <= r`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use once_cell::sync::Lazy;
use serde::Serialize;

use crate::freqsets::FreqIndex;
use crate::trigpoly::TrigPoly;
use crate::{Error, Result};

/// Identifies a kernel; used as the cache key.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum KernelId {
    Dirichlet { j: u32 },
    Fejer { j: u32 },
    ValleePoussin { j: u32 },
    BlockA { s: u32 },
    /// `V_j(x_1) ... V_j(x_d)` with per-dimension orders.
    TensorVP { j: Vec<u32> },
    /// `K_j(x_1) ... K_j(x_d)`.
    TensorFejer { j: Vec<u32> },
    /// `A_s(x_1) ... A_s(x_d)`.
    TensorBlockA { s: Vec<u32> },
    HcValleePoussin { r: u32, dim: usize },
    DeltaHcVp { r: u32, dim: usize },
}

impl KernelId {
    pub fn dim(&self) -> usize {
        match self {
            KernelId::Dirichlet { .. }
            | KernelId::Fejer { .. }
            | KernelId::ValleePoussin { .. }
            | KernelId::BlockA { .. } => 1,
            KernelId::TensorVP { j } => j.len(),
            KernelId::TensorFejer { j } => j.len(),
            KernelId::TensorBlockA { s } => s.len(),
            KernelId::HcValleePoussin { dim, .. } | KernelId::DeltaHcVp { dim, .. } => *dim,
        }
    }
}

fn re(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

/// The Dirichlet kernel `D_j`, coefficients 1 on `|k| <= j`.
pub fn dirichlet(j: u32) -> TrigPoly {
    let j = j as i64;
    TrigPoly::from_coeffs(1, (-j..=j).map(|k| (FreqIndex::new(vec![k]), re(1.0))))
        .expect("univariate coefficients")
}

/// The Fejér kernel `K_j`, `j >= 1`: coefficients `1 - |k|/j` on `|k| <= j-1`.
pub fn fejer(j: u32) -> Result<TrigPoly> {
    if j < 1 {
        return Err(Error::InvalidParameter("Fejér kernel needs j >= 1".into()));
    }
    let jj = j as i64;
    Ok(TrigPoly::from_coeffs(
        1,
        (-(jj - 1)..=(jj - 1))
            .map(|k| (FreqIndex::new(vec![k]), re(1.0 - k.abs() as f64 / j as f64))),
    )
    .expect("univariate coefficients"))
}

/// The de la Vallée Poussin kernel `V_j = 2 K_{2j} - K_j`, `j >= 1`:
/// coefficient 1 on `|k| <= j` and `(2j - |k|)/j` on `j < |k| < 2j`.
pub fn vallee_poussin(j: u32) -> Result<TrigPoly> {
    if j < 1 {
        return Err(Error::InvalidParameter(
            "de la Vallée Poussin kernel needs j >= 1".into(),
        ));
    }
    let jj = j as i64;
    Ok(TrigPoly::from_coeffs(
        1,
        (-(2 * jj - 1)..=(2 * jj - 1)).map(|k| {
            let a = k.abs();
            let c = if a <= jj {
                1.0
            } else {
                (2 * jj - a) as f64 / j as f64
            };
            (FreqIndex::new(vec![k]), re(c))
        }),
    )
    .expect("univariate coefficients"))
}

/// The dyadic block kernel: `A_0 = 1`, `A_1 = V_1 - 1`,
/// `A_s = V_{2^(s-1)} - V_{2^(s-2)}` for `s >= 2`.
pub fn block_a(s: u32) -> Result<TrigPoly> {
    match s {
        0 => Ok(TrigPoly::constant(1, re(1.0))),
        1 => vallee_poussin(1)?.sub(&TrigPoly::constant(1, re(1.0))),
        _ => {
            if s >= 32 {
                return Err(Error::Overflow(format!("block kernel A_{s}")));
            }
            vallee_poussin(1 << (s - 1))?.sub(&vallee_poussin(1 << (s - 2))?)
        }
    }
}

/// Tensor product of univariate polynomials: coefficients multiply.
pub fn tensor(parts: &[TrigPoly]) -> Result<TrigPoly> {
    if parts.is_empty() {
        return Err(Error::InvalidParameter("empty tensor product".into()));
    }
    let mut acc = parts[0].clone();
    for part in &parts[1..] {
        let dim = acc.dim() + part.dim();
        let mut entries = Vec::with_capacity(acc.num_coeffs() * part.num_coeffs());
        for (ka, &ca) in acc.coeffs() {
            for (kb, &cb) in part.coeffs() {
                let mut coords = ka.coords().to_vec();
                coords.extend_from_slice(kb.coords());
                entries.push((FreqIndex::new(coords), ca * cb));
            }
        }
        acc = TrigPoly::from_coeffs(dim, entries)?;
    }
    Ok(acc)
}

/// Builds the kernel identified by `id` as a coefficient map.
pub fn build_kernel(id: &KernelId) -> Result<TrigPoly> {
    match id {
        KernelId::Dirichlet { j } => Ok(dirichlet(*j)),
        KernelId::Fejer { j } => fejer(*j),
        KernelId::ValleePoussin { j } => vallee_poussin(*j),
        KernelId::BlockA { s } => block_a(*s),
        KernelId::TensorVP { j } => {
            let parts: Vec<TrigPoly> = j.iter().map(|&ji| vallee_poussin(ji)).collect::<Result<_>>()?;
            tensor(&parts)
        }
        KernelId::TensorFejer { j } => {
            let parts: Vec<TrigPoly> = j.iter().map(|&ji| fejer(ji)).collect::<Result<_>>()?;
            tensor(&parts)
        }
        KernelId::TensorBlockA { s } => {
            let parts: Vec<TrigPoly> = s.iter().map(|&si| block_a(si)).collect::<Result<_>>()?;
            tensor(&parts)
        }
        KernelId::HcValleePoussin { r, dim } => hc_vallee_poussin(*r, *dim),
        KernelId::DeltaHcVp { r, dim } => delta_hc_vp(*r, *dim),
    }
}

/// The hyperbolic-cross de la Vallée Poussin kernel
/// `V_{Q_r} = sum over |s|_1 <= r of the tensor blocks A_s`.
pub fn hc_vallee_poussin(r: u32, dim: usize) -> Result<TrigPoly> {
    if dim < 1 {
        return Err(Error::InvalidParameter("dimension must be >= 1".into()));
    }
    let mut acc = TrigPoly::zero(dim);
    let mut s = vec![0u32; dim];
    sum_blocks(r, 0, &mut s, &mut acc)?;
    Ok(acc)
}

fn sum_blocks(budget: u32, axis: usize, s: &mut Vec<u32>, acc: &mut TrigPoly) -> Result<()> {
    if axis == s.len() {
        let block = build_kernel(&KernelId::TensorBlockA { s: s.clone() })?;
        *acc = acc.add(&block)?;
        return Ok(());
    }
    for v in 0..=budget {
        s[axis] = v;
        sum_blocks(budget - v, axis + 1, s, acc)?;
    }
    Ok(())
}

/// `ΔV_{Q_r} = V_{Q_r} - V_{Q_{r-1}}`, `r >= 1`; equals the sum of tensor
/// blocks with `|s|_1 = r` exactly.
pub fn delta_hc_vp(r: u32, dim: usize) -> Result<TrigPoly> {
    if r < 1 {
        return Err(Error::InvalidParameter("ΔV_{Q_r} needs r >= 1".into()));
    }
    hc_vallee_poussin(r, dim)?.sub(&hc_vallee_poussin(r - 1, dim)?)
}

static KERNEL_CACHE: Lazy<Mutex<HashMap<KernelId, Arc<TrigPoly>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

/// Cached kernel lookup. Construction happens outside the lock, so concurrent
/// misses may build the same kernel twice; the first insert wins.
pub fn kernel(id: &KernelId) -> Result<Arc<TrigPoly>> {
    if let Some(k) = KERNEL_CACHE.lock().unwrap().get(id) {
        return Ok(Arc::clone(k));
    }
    let built = Arc::new(build_kernel(id)?);
    let mut cache = KERNEL_CACHE.lock().unwrap();
    Ok(Arc::clone(cache.entry(id.clone()).or_insert(built)))
}

// ---------------------------------------------------------------------------
// Closed-form evaluators. All kernels here are real-valued; the removable
// singularity at x ≡ 0 (mod 2π) takes the limit value.
// ---------------------------------------------------------------------------

/// `D_j(x) = sin((j + 1/2) x) / sin(x/2)`, with `D_j(0) = 2j + 1`.
pub fn dirichlet_closed(j: u32, x: f64) -> f64 {
    let s = (0.5 * x).sin();
    if s == 0.0 {
        (2 * j + 1) as f64
    } else {
        ((j as f64 + 0.5) * x).sin() / s
    }
}

/// `K_j(x) = sin(jx/2)^2 / (j sin(x/2)^2)`, with `K_j(0) = j`.
pub fn fejer_closed(j: u32, x: f64) -> f64 {
    let s = (0.5 * x).sin();
    if s == 0.0 {
        j as f64
    } else {
        let t = (0.5 * j as f64 * x).sin();
        t * t / (j as f64 * s * s)
    }
}

/// `V_j(x) = 2 K_{2j}(x) - K_j(x)`.
pub fn vallee_poussin_closed(j: u32, x: f64) -> f64 {
    2.0 * fejer_closed(2 * j, x) - fejer_closed(j, x)
}

pub fn block_a_closed(s: u32, x: f64) -> f64 {
    match s {
        0 => 1.0,
        1 => vallee_poussin_closed(1, x) - 1.0,
        _ => vallee_poussin_closed(1 << (s - 1), x) - vallee_poussin_closed(1 << (s - 2), x),
    }
}

/// `V_{2^e}` with the convention `V_{2^{-1}} = 1` (e = -1).
fn vp_dyadic_closed(e: i64, x: f64) -> f64 {
    if e < 0 {
        1.0
    } else {
        vallee_poussin_closed(1u32 << e, x)
    }
}

/// `V_{Q_r}(x)` for any dimension, via the per-coordinate block expansion
/// `V_{Q_r}(x) = sum_s A_s(x_1) V_{Q_{r-s}}(x_2, ..., x_d)`; cost `O(r^(d-1))`.
pub fn hc_vallee_poussin_closed(r: u32, x: &[f64]) -> f64 {
    match x.len() {
        0 => panic!("empty evaluation point"),
        1 => vp_dyadic_closed(r as i64 - 1, x[0]),
        _ => (0..=r)
            .map(|s1| block_a_closed(s1, x[0]) * hc_vallee_poussin_closed(r - s1, &x[1..]))
            .sum(),
    }
}

pub fn delta_hc_vp_closed(r: u32, x: &[f64]) -> f64 {
    assert!(r >= 1);
    hc_vallee_poussin_closed(r, x) - hc_vallee_poussin_closed(r - 1, x)
}

/// Streams `V_{Q_r}(x_1, x_2)` over an equispaced `m1 × m2` grid in row-major
/// order. The separable block expansion needs only `O((r+1)(m1+m2))` closed
/// evaluations and `O(m1 m2 r)` multiplications, so no grid table is stored.
pub fn hc_vp_grid_scan_2d(r: u32, m1: usize, m2: usize, mut visit: impl FnMut(usize, f64)) {
    use std::f64::consts::TAU;
    let terms = (r + 1) as usize;
    // vtab[s1][j2] = V_{2^(r-s1-1)}(x2)
    let mut vtab = vec![vec![0.0f64; m2]; terms];
    for s1 in 0..terms {
        let e = r as i64 - s1 as i64 - 1;
        for (j2, slot) in vtab[s1].iter_mut().enumerate() {
            *slot = vp_dyadic_closed(e, TAU * j2 as f64 / m2 as f64);
        }
    }
    let mut a = vec![0.0f64; terms];
    let mut flat = 0usize;
    for j1 in 0..m1 {
        let x1 = TAU * j1 as f64 / m1 as f64;
        for (s1, slot) in a.iter_mut().enumerate() {
            *slot = block_a_closed(s1 as u32, x1);
        }
        for j2 in 0..m2 {
            let mut v = 0.0;
            for s1 in 0..terms {
                v += a[s1] * vtab[s1][j2];
            }
            visit(flat, v);
            flat += 1;
        }
    }
}

/// Streams `ΔV_{Q_r}` over an equispaced grid; see [`hc_vp_grid_scan_2d`].
pub fn delta_hc_vp_grid_scan_2d(r: u32, m1: usize, m2: usize, mut visit: impl FnMut(usize, f64)) {
    assert!(r >= 1);
    let mut prev = vec![0.0f64; m1 * m2];
    hc_vp_grid_scan_2d(r - 1, m1, m2, |flat, v| prev[flat] = v);
    hc_vp_grid_scan_2d(r, m1, m2, |flat, v| visit(flat, v - prev[flat]));
}

/// Pointwise evaluation through the closed form, where one exists for the
/// kernel family. The coefficient route `kernel(id).evaluate(x)` agrees with
/// this up to roundoff.
pub fn closed_eval(id: &KernelId, x: &[f64]) -> f64 {
    debug_assert_eq!(id.dim(), x.len());
    match id {
        KernelId::Dirichlet { j } => dirichlet_closed(*j, x[0]),
        KernelId::Fejer { j } => fejer_closed(*j, x[0]),
        KernelId::ValleePoussin { j } => vallee_poussin_closed(*j, x[0]),
        KernelId::BlockA { s } => block_a_closed(*s, x[0]),
        KernelId::TensorVP { j } => j
            .iter()
            .zip(x)
            .map(|(&ji, &xi)| vallee_poussin_closed(ji, xi))
            .product(),
        KernelId::TensorFejer { j } => j
            .iter()
            .zip(x)
            .map(|(&ji, &xi)| fejer_closed(ji, xi))
            .product(),
        KernelId::TensorBlockA { s } => s
            .iter()
            .zip(x)
            .map(|(&si, &xi)| block_a_closed(si, xi))
            .product(),
        KernelId::HcValleePoussin { r, .. } => hc_vallee_poussin_closed(*r, x),
        KernelId::DeltaHcVp { r, .. } => delta_hc_vp_closed(*r, x),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freqsets::{build_step_hyperbolic_cross, FreqIndex};
    use crate::trigpoly::{max_coeff_diff, GridSpec};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{PI, TAU};

    fn fi(coords: &[i64]) -> FreqIndex {
        FreqIndex::new(coords.to_vec())
    }

    #[test]
    fn dirichlet_basics() {
        let d0 = dirichlet(0);
        assert_eq!(d0.num_coeffs(), 1);
        assert!((d0.evaluate(&[0.7]).re - 1.0).abs() < 1e-15);

        for j in [1u32, 2, 5] {
            let dj = dirichlet(j);
            assert!((dj.evaluate(&[0.0]).re - (2 * j + 1) as f64).abs() < 1e-12);
        }
        assert!((dirichlet(1).evaluate(&[PI]).re + 1.0).abs() < 1e-12);
        assert!((dirichlet(2).evaluate(&[0.0]).re - 5.0).abs() < 1e-12);
    }

    #[test]
    fn fejer_basics() {
        let k1 = fejer(1).unwrap();
        assert_eq!(k1.num_coeffs(), 1);
        assert!((k1.evaluate(&[1.3]).re - 1.0).abs() < 1e-15);

        let k2 = fejer(2).unwrap();
        assert!((k2.evaluate(&[0.0]).re - 2.0).abs() < 1e-14);
        assert!((k2.coeff(&fi(&[1])).re - 0.5).abs() < 1e-15);
        assert!((k2.coeff(&fi(&[-1])).re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn fejer_is_nonnegative_on_fine_grid() {
        for j in [1u32, 2, 3, 7, 16, 33] {
            let k = fejer(j).unwrap();
            let grid = GridSpec::new(vec![16 * j as usize]).unwrap();
            let min = k
                .grid_values(&grid)
                .unwrap()
                .iter()
                .map(|v| v.re)
                .fold(f64::INFINITY, f64::min);
            assert!(min >= -1e-12, "K_{j} dips to {min}");
        }
    }

    #[test]
    fn fejer_is_average_of_dirichlets() {
        for j in [1u32, 2, 3, 8] {
            let mut acc = TrigPoly::zero(1);
            for l in 0..j {
                acc = acc.add(&dirichlet(l)).unwrap();
            }
            let avg = acc.scale(Complex64::new(1.0 / j as f64, 0.0));
            assert!(max_coeff_diff(&avg, &fejer(j).unwrap()) < 1e-15);
        }
    }

    #[test]
    fn vallee_poussin_two_routes_agree() {
        for j in [1u32, 2, 3, 5, 8, 16] {
            let direct = vallee_poussin(j).unwrap();
            // route 1: 2 K_{2j} - K_j
            let combo = fejer(2 * j)
                .unwrap()
                .scale(Complex64::new(2.0, 0.0))
                .sub(&fejer(j).unwrap())
                .unwrap();
            assert!(max_coeff_diff(&direct, &combo) < 1e-15, "j={j}");
            // route 2: j^{-1} (D_j + ... + D_{2j-1})
            let mut acc = TrigPoly::zero(1);
            for l in j..2 * j {
                acc = acc.add(&dirichlet(l)).unwrap();
            }
            let avg = acc.scale(Complex64::new(1.0 / j as f64, 0.0));
            assert!(max_coeff_diff(&direct, &avg) < 1e-14, "j={j}");
        }
    }

    #[test]
    fn vallee_poussin_examples() {
        let v1 = vallee_poussin(1).unwrap();
        assert!((v1.coeff(&fi(&[1])).re - 1.0).abs() < 1e-15);
        assert!((v1.coeff(&fi(&[-1])).re - 1.0).abs() < 1e-15);
        assert!((v1.evaluate(&[PI]).re + 1.0).abs() < 1e-14); // 1 + 2cos π

        let v2 = vallee_poussin(2).unwrap();
        assert!((v2.coeff(&fi(&[3])).re - 0.5).abs() < 1e-15);
        assert_eq!(v2.max_freq(), vec![3]);
    }

    #[test]
    fn vallee_poussin_l1_bounded_by_three() {
        for j in [1u32, 2, 4, 7, 16, 32, 64] {
            let n1 = vallee_poussin(j).unwrap().lp_norm(1.0).unwrap();
            assert!(n1 <= 3.0 + 1e-9, "‖V_{j}‖₁ = {n1}");
        }
    }

    #[test]
    fn block_a_basics() {
        let a0 = block_a(0).unwrap();
        assert!((a0.evaluate(&[0.4]).re - 1.0).abs() < 1e-15);

        let a1 = block_a(1).unwrap();
        assert!((a1.coeff(&fi(&[1])).re - 1.0).abs() < 1e-15);
        assert_eq!(a1.coeff(&fi(&[0])).norm(), 0.0);

        for s in 2..=8u32 {
            let a = block_a(s).unwrap();
            let lo = 1i64 << (s - 2);
            let hi = (1i64 << s) - 1;
            for (k, _) in a.coeffs() {
                let abs = k[0].abs();
                assert!(abs > lo && abs <= hi, "A_{s} coefficient at {abs}");
            }
        }
    }

    #[test]
    fn blocks_telescope_to_vallee_poussin() {
        for s in 0..=8u32 {
            let mut acc = TrigPoly::zero(1);
            for t in 0..=s {
                acc = acc.add(&block_a(t).unwrap()).unwrap();
            }
            let expect = if s == 0 {
                TrigPoly::constant(1, Complex64::new(1.0, 0.0))
            } else {
                vallee_poussin(1 << (s - 1)).unwrap()
            };
            assert!(max_coeff_diff(&acc, &expect) < 1e-14, "s={s}");
        }
    }

    #[test]
    fn block_orthogonality_by_support() {
        for s in 0..=7u32 {
            for sp in 0..=7u32 {
                let a = block_a(s).unwrap();
                let b = block_a(sp).unwrap();
                let conv = a.convolve(&b).unwrap();
                if s.abs_diff(sp) >= 2 {
                    assert_eq!(conv.num_coeffs(), 0, "A_{s} * A_{sp} should vanish");
                }
            }
        }
    }

    #[test]
    fn tensor_examples() {
        let v11 = build_kernel(&KernelId::TensorVP { j: vec![1, 1] }).unwrap();
        assert!((v11.evaluate(&[0.0, 0.0]).re - 9.0).abs() < 1e-12);

        let v22 = build_kernel(&KernelId::TensorVP { j: vec![2, 2] }).unwrap();
        assert!((v22.coeff(&fi(&[1, 1])).re - 1.0).abs() < 1e-15);

        let a10 = build_kernel(&KernelId::TensorBlockA { s: vec![1, 0] }).unwrap();
        let mut support: Vec<_> = a10.coeffs().map(|(k, _)| k.clone()).collect();
        support.sort();
        assert_eq!(support, vec![fi(&[-1, 0]), fi(&[1, 0])]);
    }

    #[test]
    fn hc_vp_univariate_collapses() {
        for r in 0..=8u32 {
            let hc = hc_vallee_poussin(r, 1).unwrap();
            let expect = if r == 0 {
                TrigPoly::constant(1, Complex64::new(1.0, 0.0))
            } else {
                vallee_poussin(1 << (r - 1)).unwrap()
            };
            assert!(max_coeff_diff(&hc, &expect) < 1e-14, "r={r}");
        }
    }

    #[test]
    fn hc_vp_matches_collapsed_form() {
        // V_{Q_r}(x) = Σ_{s_1 <= r} A_{s_1}(x_1) V_{2^{r-s_1-1}}(x_2) for d=2,
        // coefficient-exact.
        for r in 0..=6u32 {
            let direct = hc_vallee_poussin(r, 2).unwrap();
            let mut acc = TrigPoly::zero(2);
            for s1 in 0..=r {
                let a = block_a(s1).unwrap();
                let e = r as i64 - s1 as i64 - 1;
                let v = if e < 0 {
                    TrigPoly::constant(1, Complex64::new(1.0, 0.0))
                } else {
                    vallee_poussin(1 << e).unwrap()
                };
                acc = acc.add(&tensor(&[a, v]).unwrap()).unwrap();
            }
            assert!(max_coeff_diff(&direct, &acc) < 1e-13, "r={r}");
        }
    }

    #[test]
    fn hc_vp_support_and_center() {
        for r in 0..=8u32 {
            let hc = hc_vallee_poussin(r, 2).unwrap();
            let q = build_step_hyperbolic_cross(r, 2).unwrap();
            for (k, _) in hc.coeffs() {
                assert!(q.contains(k), "coefficient outside Q_{r} at {k:?}");
            }
            assert!((hc.coeff(&fi(&[0, 0])).re - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn hc_vp_reproduces_inner_cross() {
        // Coefficients equal 1 on Q_{r-d}, so convolution with V_{Q_r} is the
        // identity on polynomials supported there. This range is a measured
        // property, checked by scan.
        for dim in 1..=3usize {
            for r in dim as u32..=8 {
                let hc = hc_vallee_poussin(r, dim).unwrap();
                let inner = build_step_hyperbolic_cross(r - dim as u32, dim).unwrap();
                for k in inner.iter() {
                    assert!(
                        (hc.coeff(k).re - 1.0).abs() < 1e-13,
                        "d={dim}, r={r}, k={k:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn dirichlet_tensor_reproduces_rectangle_polynomials() {
        // D_(R(j)) has coefficient 1 on all of R(j), so convolution with it
        // is the identity on T(R(j)).
        let d = tensor(&[dirichlet(2), dirichlet(3)]).unwrap();
        let rect = crate::freqsets::build_rectangle(&[3, 4]).unwrap();
        let f = crate::trigpoly::random_poly(&rect, 11, crate::trigpoly::CoefficientLaw::ComplexGaussian);
        let reproduced = f.convolve(&d).unwrap();
        assert!(max_coeff_diff(&f, &reproduced) < 1e-15);
    }

    #[test]
    fn delta_hc_vp_examples() {
        let delta = delta_hc_vp(2, 1).unwrap();
        let expect = vallee_poussin(2).unwrap().sub(&vallee_poussin(1).unwrap()).unwrap();
        assert!(max_coeff_diff(&delta, &expect) < 1e-14);

        for r in 1..=6u32 {
            let delta = delta_hc_vp(r, 2).unwrap();
            assert_eq!(delta.coeff(&fi(&[0, 0])).norm(), 0.0);

            // equals the sum of blocks at exactly |s|_1 = r
            let mut acc = TrigPoly::zero(2);
            for s1 in 0..=r {
                let block =
                    build_kernel(&KernelId::TensorBlockA { s: vec![s1, r - s1] }).unwrap();
                acc = acc.add(&block).unwrap();
            }
            assert!(max_coeff_diff(&delta, &acc) < 1e-13, "r={r}");

            // The blocks A_s spill one dyadic level down, so the support is
            // disjoint from Q_{r-3} in general and from Q_{r-2} only while
            // both coordinates lack interior points, i.e. r <= 5.
            if r >= 3 {
                let q = build_step_hyperbolic_cross(r - 3, 2).unwrap();
                for (k, _) in delta.coeffs() {
                    assert!(!q.contains(k), "ΔV_{{Q_{r}}} support touches Q_{}", r - 3);
                }
            }
            if (2..=5).contains(&r) {
                let q = build_step_hyperbolic_cross(r - 2, 2).unwrap();
                for (k, _) in delta.coeffs() {
                    assert!(!q.contains(k), "ΔV_{{Q_{r}}} support touches Q_{}", r - 2);
                }
            }
        }

        // First contact with Q_{r-2} happens at r = 6, at the interior points
        // of the level-(2,2) block: ΔV^(±3,±3) = (1 - V^_2(3))^2 = 1/4.
        let delta6 = delta_hc_vp(6, 2).unwrap();
        assert!((delta6.coeff(&fi(&[3, 3])).re - 0.25).abs() < 1e-14);
        assert!(build_step_hyperbolic_cross(4, 2).unwrap().contains(&fi(&[3, 3])));
    }

    #[test]
    fn closed_forms_agree_with_coefficients() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let js: Vec<u32> = vec![1, 2, 3, 4, 7, 16, 64, 256];
        for _ in 0..1000 {
            let x: f64 = rng.random::<f64>() * TAU;
            let j = js[rng.random_range(0..js.len())];
            let d = dirichlet(j).evaluate(&[x]).re;
            assert!(
                (d - dirichlet_closed(j, x)).abs() < 1e-10 * (2.0 * j as f64 + 1.0),
                "D_{j}({x})"
            );
            let k = fejer(j).unwrap().evaluate(&[x]).re;
            assert!((k - fejer_closed(j, x)).abs() < 1e-10 * j as f64, "K_{j}({x})");
            let v = vallee_poussin(j).unwrap().evaluate(&[x]).re;
            assert!(
                (v - vallee_poussin_closed(j, x)).abs() < 1e-10 * j as f64,
                "V_{j}({x})"
            );
        }
        // limit values at the removable singularity
        assert_eq!(dirichlet_closed(5, 0.0), 11.0);
        assert_eq!(fejer_closed(5, 0.0), 5.0);
        assert!((vallee_poussin_closed(5, 0.0) - 15.0).abs() < 1e-12);
    }

    #[test]
    fn hc_closed_form_agrees_with_coefficients() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for r in 0..=6u32 {
            let hc = hc_vallee_poussin(r, 2).unwrap();
            for _ in 0..40 {
                let x = [rng.random::<f64>() * TAU, rng.random::<f64>() * TAU];
                let via_coeffs = hc.evaluate(&x).re;
                let via_closed = hc_vallee_poussin_closed(r, &x);
                assert!(
                    (via_coeffs - via_closed).abs() < 1e-9 * (1.0 + via_coeffs.abs()),
                    "r={r}, x={x:?}: {via_coeffs} vs {via_closed}"
                );
            }
        }
    }

    #[test]
    fn fejer_autocorrelation_stays_nonnegative() {
        let k = fejer(4).unwrap();
        let ks = k.autocorrelate();
        let grid = GridSpec::new(vec![128]).unwrap();
        for v in ks.grid_values(&grid).unwrap() {
            assert!(v.re >= -1e-12);
        }
    }

    #[test]
    fn grid_scans_match_pointwise_closed_forms() {
        let grid = GridSpec::new(vec![13, 9]).unwrap();
        for r in [0u32, 1, 3, 5] {
            let mut vals = vec![0.0; 13 * 9];
            hc_vp_grid_scan_2d(r, 13, 9, |flat, v| vals[flat] = v);
            for flat in [0usize, 5, 50, 100, 116] {
                let x = grid.node(flat);
                let direct = hc_vallee_poussin_closed(r, &x);
                assert!((vals[flat] - direct).abs() < 1e-9 * (1.0 + direct.abs()));
            }
        }
        let mut vals = vec![0.0; 13 * 9];
        delta_hc_vp_grid_scan_2d(4, 13, 9, |flat, v| vals[flat] = v);
        for flat in [3usize, 40, 99] {
            let x = grid.node(flat);
            let direct = delta_hc_vp_closed(4, &x);
            assert!((vals[flat] - direct).abs() < 1e-9 * (1.0 + direct.abs()));
        }
    }

    #[test]
    fn kernel_cache_returns_shared_instances() {
        let id = KernelId::HcValleePoussin { r: 4, dim: 2 };
        let a = kernel(&id).unwrap();
        let b = kernel(&id).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
        assert!(max_coeff_diff(&a, &hc_vallee_poussin(4, 2).unwrap()) == 0.0);
    }
}
