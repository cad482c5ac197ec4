//! Sparse trigonometric polynomials over `[0, 2π)^d`.
//!
//! A [`TrigPoly`] is a map from integer frequencies to complex Fourier
//! coefficients. Convolution and autocorrelation act coefficient-wise and are
//! therefore exact; `L_p` norms are exact for `p = 2` (Parseval) and for even
//! integer `p` (equispaced quadrature of `|f|^p`), and grid estimates with a
//! documented oversampling factor otherwise. All norms are taken with respect
//! to the normalized Lebesgue measure.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::freqsets::{FreqIndex, FreqSet};
use crate::{Error, Result};

/// Coefficients with modulus at or below this tolerance are pruned; kernel
/// differences like `A_s = V - V` cancel exactly in exact arithmetic but
/// leave float dust otherwise.
pub const PRUNE_TOLERANCE: f64 = 1e-15;

/// Default oversampling factor (grid points per unit of maximum frequency)
/// for grid-estimated quantities.
pub const DEFAULT_OVERSAMPLE: usize = 8;

/// Minimum number of nodes per active dimension in estimate grids.
pub const MIN_ESTIMATE_GRID: usize = 64;

/// A sparse trigonometric polynomial `f(x) = sum_k c_k e^{i(k,x)}`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigPoly {
    dim: usize,
    coeffs: BTreeMap<FreqIndex, Complex64>,
}

impl TrigPoly {
    pub fn zero(dim: usize) -> Self {
        TrigPoly {
            dim,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: Complex64) -> Self {
        let mut p = TrigPoly::zero(dim);
        p.set_coeff(FreqIndex::new(vec![0; dim]), c);
        p
    }

    /// The single exponential `e^{i(k,x)}`.
    pub fn exponential(k: FreqIndex) -> Self {
        let mut p = TrigPoly::zero(k.dim());
        p.set_coeff(k, Complex64::new(1.0, 0.0));
        p
    }

    pub fn from_coeffs<I>(dim: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (FreqIndex, Complex64)>,
    {
        let mut p = TrigPoly::zero(dim);
        for (k, c) in entries {
            if k.dim() != dim {
                return Err(Error::DimensionMismatch(k.dim(), dim));
            }
            let cur = p.coeff(&k) + c;
            p.set_coeff(k, cur);
        }
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_coeffs(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, k: &FreqIndex) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    /// Iterates stored (nonzero) coefficients in lexicographic frequency order.
    pub fn coeffs(&self) -> impl Iterator<Item = (&FreqIndex, &Complex64)> {
        self.coeffs.iter()
    }

    fn set_coeff(&mut self, k: FreqIndex, c: Complex64) {
        if c.norm() <= PRUNE_TOLERANCE {
            self.coeffs.remove(&k);
        } else {
            self.coeffs.insert(k, c);
        }
    }

    /// The spectral support as an explicit frequency set.
    pub fn support(&self) -> FreqSet {
        crate::freqsets::build_explicit(self.coeffs.keys().cloned().collect(), self.dim)
            .expect("support vectors share the polynomial dimension")
    }

    /// Per-dimension maximum of `|k_i|` over the support (zeros for the zero
    /// polynomial).
    pub fn max_freq(&self) -> Vec<i64> {
        let mut m = vec![0i64; self.dim];
        for k in self.coeffs.keys() {
            for (i, &c) in k.coords().iter().enumerate() {
                m[i] = m[i].max(c.abs());
            }
        }
        m
    }

    pub fn evaluate(&self, x: &[f64]) -> Complex64 {
        assert_eq!(x.len(), self.dim, "evaluation point has wrong dimension");
        let mut acc = Complex64::default();
        for (k, c) in &self.coeffs {
            let angle: f64 = k.coords().iter().zip(x).map(|(&ki, &xi)| ki as f64 * xi).sum();
            let (s, co) = angle.sin_cos();
            acc += c * Complex64::new(co, s);
        }
        acc
    }

    pub fn add(&self, other: &TrigPoly) -> Result<TrigPoly> {
        self.combine(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &TrigPoly) -> Result<TrigPoly> {
        self.combine(other, |a, b| a - b)
    }

    fn combine(&self, other: &TrigPoly, op: impl Fn(Complex64, Complex64) -> Complex64) -> Result<TrigPoly> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        let mut out = self.clone();
        for (k, &c) in &other.coeffs {
            out.set_coeff(k.clone(), op(self.coeff(k), c));
        }
        Ok(out)
    }

    pub fn scale(&self, c: Complex64) -> TrigPoly {
        let mut out = TrigPoly::zero(self.dim);
        for (k, &v) in &self.coeffs {
            out.set_coeff(k.clone(), v * c);
        }
        out
    }

    /// Exact convolution: coefficient-wise product,
    /// `(f*g)^(k) = f^(k) g^(k)`.
    pub fn convolve(&self, other: &TrigPoly) -> Result<TrigPoly> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        let mut out = TrigPoly::zero(self.dim);
        let (small, large) = if self.coeffs.len() <= other.coeffs.len() {
            (self, other)
        } else {
            (other, self)
        };
        for (k, &c) in &small.coeffs {
            let d = large.coeff(k);
            if d != Complex64::default() {
                out.set_coeff(k.clone(), c * d);
            }
        }
        Ok(out)
    }

    /// `f* = f * f`, squaring every coefficient.
    pub fn autocorrelate(&self) -> TrigPoly {
        let mut out = TrigPoly::zero(self.dim);
        for (k, &c) in &self.coeffs {
            out.set_coeff(k.clone(), c * c);
        }
        out
    }

    /// Whether the polynomial is real-valued: `c(-k) = conj(c(k))` for all k.
    pub fn is_real_valued(&self, tol: f64) -> bool {
        self.coeffs
            .iter()
            .all(|(k, &c)| (self.coeff(&k.neg()) - c.conj()).norm() <= tol)
    }

    /// Values on the equispaced grid, in row-major node order.
    ///
    /// Computed by scattering coefficients modulo the grid sizes and running
    /// an unnormalized inverse FFT along each axis; this yields the exact
    /// node values `f(2π m_1/M_1, ..., 2π m_d/M_d)` for any grid size.
    pub fn grid_values(&self, grid: &GridSpec) -> Result<Vec<Complex64>> {
        if grid.dim() != self.dim {
            return Err(Error::DimensionMismatch(grid.dim(), self.dim));
        }
        let total = grid.total()?;
        let mut data = vec![Complex64::default(); total];
        for (k, &c) in &self.coeffs {
            let mut idx = 0usize;
            for (i, &ki) in k.coords().iter().enumerate() {
                let m = grid.sizes[i] as i64;
                idx = idx * grid.sizes[i] + ki.rem_euclid(m) as usize;
            }
            data[idx] += c;
        }
        let mut planner = FftPlanner::new();
        for axis in 0..self.dim {
            let m = grid.sizes[axis];
            if m == 1 {
                continue;
            }
            let fft = planner.plan_fft_inverse(m);
            let stride: usize = grid.sizes[axis + 1..].iter().product();
            let block = stride * m;
            let mut scratch = vec![Complex64::default(); m];
            for base in (0..total).step_by(block) {
                for off in 0..stride {
                    for (t, slot) in scratch.iter_mut().enumerate() {
                        *slot = data[base + off + t * stride];
                    }
                    fft.process(&mut scratch);
                    for (t, &v) in scratch.iter().enumerate() {
                        data[base + off + t * stride] = v;
                    }
                }
            }
        }
        Ok(data)
    }

    /// The `L_p` norm on the automatically chosen grid; see
    /// [`TrigPoly::lp_norm_detailed`].
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        Ok(self.lp_norm_detailed(p, None)?.value)
    }

    /// The `L_p` norm on an explicit grid.
    pub fn lp_norm_on(&self, p: f64, grid: &GridSpec) -> Result<f64> {
        Ok(self.lp_norm_detailed(p, Some(grid))?.value)
    }

    /// Computes the `L_p` norm and reports how it was obtained.
    ///
    /// * `p = 2` without an explicit grid: exact via Parseval.
    /// * even integer `p`: exact equispaced quadrature of `|f|^p` with
    ///   `M_i >= p * max|k_i| + 1` points per dimension.
    /// * any other `p`, and `p = ∞`: estimated on a grid oversampled by
    ///   [`DEFAULT_OVERSAMPLE`] relative to the maximum frequency.
    pub fn lp_norm_detailed(&self, p: f64, grid: Option<&GridSpec>) -> Result<NormEstimate> {
        if !(p >= 1.0) {
            return Err(Error::InvalidParameter(format!("L_p norm needs p >= 1, got {p}")));
        }
        if p.is_infinite() {
            let auto;
            let g = match grid {
                Some(g) => g,
                None => {
                    auto = GridSpec::oversampled(self, DEFAULT_OVERSAMPLE)?;
                    &auto
                }
            };
            let value = self
                .grid_values(g)?
                .iter()
                .map(|v| v.norm())
                .fold(0.0, f64::max);
            return Ok(NormEstimate {
                value,
                method: NormMethod::GridEstimate {
                    grid: g.sizes.clone(),
                    oversample: DEFAULT_OVERSAMPLE,
                },
            });
        }
        if p == 2.0 && grid.is_none() {
            let value = self.coeffs.values().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            return Ok(NormEstimate {
                value,
                method: NormMethod::Parseval,
            });
        }
        let even = p.fract() == 0.0 && (p as u64) % 2 == 0;
        let auto;
        let g = match grid {
            Some(g) => g,
            None if even => {
                auto = GridSpec::for_exact_power(self, p as u64)?;
                &auto
            }
            None => {
                auto = GridSpec::oversampled(self, DEFAULT_OVERSAMPLE)?;
                &auto
            }
        };
        let values = self.grid_values(g)?;
        let mean = values.iter().map(|v| v.norm().powf(p)).sum::<f64>() / values.len() as f64;
        let value = mean.powf(1.0 / p);
        let exact = even && g.exact_for_power(self, p as u64);
        Ok(NormEstimate {
            value,
            method: if exact {
                NormMethod::ExactQuadrature { grid: g.sizes.clone() }
            } else {
                NormMethod::GridEstimate {
                    grid: g.sizes.clone(),
                    oversample: DEFAULT_OVERSAMPLE,
                }
            },
        })
    }

    /// JSON form `{dim, entries: [[k, re, im], ...]}` in lexicographic order.
    pub fn to_json(&self) -> serde_json::Value {
        let entries: Vec<serde_json::Value> = self
            .coeffs
            .iter()
            .map(|(k, c)| serde_json::json!([k.coords(), c.re, c.im]))
            .collect();
        serde_json::json!({ "dim": self.dim, "entries": entries })
    }
}

/// Largest absolute coefficient difference between two polynomials.
pub fn max_coeff_diff(a: &TrigPoly, b: &TrigPoly) -> f64 {
    let mut worst = 0.0f64;
    for (k, &c) in a.coeffs() {
        worst = worst.max((c - b.coeff(k)).norm());
    }
    for (k, &c) in b.coeffs() {
        worst = worst.max((c - a.coeff(k)).norm());
    }
    worst
}

/// How a norm value was computed.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum NormMethod {
    Parseval,
    ExactQuadrature { grid: Vec<usize> },
    GridEstimate { grid: Vec<usize>, oversample: usize },
}

#[derive(Clone, Debug, Serialize)]
pub struct NormEstimate {
    pub value: f64,
    pub method: NormMethod,
}

impl NormEstimate {
    pub fn is_exact(&self) -> bool {
        !matches!(self.method, NormMethod::GridEstimate { .. })
    }
}

/// An equispaced product grid with nodes `2π m / M_i`, `m = 0..M_i-1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridSpec {
    sizes: Vec<usize>,
}

impl GridSpec {
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        if sizes.is_empty() || sizes.contains(&0) {
            return Err(Error::InvalidParameter(format!(
                "grid sizes must be positive, got {sizes:?}"
            )));
        }
        Ok(GridSpec { sizes })
    }

    /// Grid sufficient to integrate `|f|^p` exactly for even `p`:
    /// `M_i = p * max|k_i| + 1`.
    pub fn for_exact_power(f: &TrigPoly, p: u64) -> Result<Self> {
        let sizes = f
            .max_freq()
            .iter()
            .map(|&k| (p as usize) * k as usize + 1)
            .collect();
        let g = GridSpec::new(sizes)?;
        g.total()?;
        Ok(g)
    }

    /// Grid oversampled by `factor` relative to the maximum frequency, with a
    /// floor of [`MIN_ESTIMATE_GRID`] points per active dimension so that
    /// low-degree polynomials are not estimated on a handful of nodes.
    /// Dimensions with no frequency content keep a single node (exact).
    pub fn oversampled(f: &TrigPoly, factor: usize) -> Result<Self> {
        let sizes = f
            .max_freq()
            .iter()
            .map(|&k| {
                if k == 0 {
                    1
                } else {
                    (factor * k as usize).max(MIN_ESTIMATE_GRID)
                }
            })
            .collect();
        let g = GridSpec::new(sizes)?;
        g.total()?;
        Ok(g)
    }

    pub fn dim(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn total(&self) -> Result<usize> {
        let mut t = 1usize;
        for &m in &self.sizes {
            t = t
                .checked_mul(m)
                .filter(|&t| t <= 1 << 28)
                .ok_or_else(|| Error::Overflow(format!("grid of sizes {:?}", self.sizes)))?;
        }
        Ok(t)
    }

    /// Coordinates of the node with the given row-major flat index.
    pub fn node(&self, mut flat: usize) -> Vec<f64> {
        let mut x = vec![0.0; self.sizes.len()];
        for i in (0..self.sizes.len()).rev() {
            let m = self.sizes[i];
            x[i] = TAU * (flat % m) as f64 / m as f64;
            flat /= m;
        }
        x
    }

    fn exact_for_power(&self, f: &TrigPoly, p: u64) -> bool {
        self.sizes
            .iter()
            .zip(f.max_freq())
            .all(|(&m, k)| m as u64 > p * k as u64)
    }
}

/// Coefficient laws for [`random_poly`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CoefficientLaw {
    /// Independent complex Gaussians with `E|c|^2 = 1`.
    ComplexGaussian,
    /// Independent uniform points on the unit circle.
    Unimodular,
}

/// A random polynomial on the frequency set `q`, deterministic in
/// `(q, seed, law)`: coefficients are assigned in the set's lexicographic
/// enumeration order from a ChaCha8 stream.
pub fn random_poly(q: &FreqSet, seed: u64, law: CoefficientLaw) -> TrigPoly {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p = TrigPoly::zero(q.dim());
    for k in q.iter() {
        let c = match law {
            CoefficientLaw::ComplexGaussian => {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
            }
            CoefficientLaw::Unimodular => {
                let theta: f64 = rng.random::<f64>() * TAU;
                Complex64::from_polar(1.0, theta)
            }
        };
        p.set_coeff(k.clone(), c);
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freqsets::{build_hyperbolic_cross, build_rectangle};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn fi(coords: &[i64]) -> FreqIndex {
        FreqIndex::new(coords.to_vec())
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn evaluate_examples() {
        let e11 = TrigPoly::exponential(fi(&[1, 1]));
        assert!((e11.evaluate(&[0.0, 0.0]) - c(1.0, 0.0)).norm() < 1e-15);

        // 1 + 2 cos x  =  e^{-ix} + 1 + e^{ix}
        let f = TrigPoly::from_coeffs(
            1,
            [
                (fi(&[-1]), c(1.0, 0.0)),
                (fi(&[0]), c(1.0, 0.0)),
                (fi(&[1]), c(1.0, 0.0)),
            ],
        )
        .unwrap();
        assert!((f.evaluate(&[PI]) - c(-1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn convolution_of_exponentials() {
        let ek = TrigPoly::exponential(fi(&[2, -1]));
        let el = TrigPoly::exponential(fi(&[1, 3]));
        assert_eq!(ek.convolve(&el).unwrap().num_coeffs(), 0);
        let same = ek.convolve(&ek).unwrap();
        assert!((same.coeff(&fi(&[2, -1])) - c(1.0, 0.0)).norm() < 1e-15);
        assert!(ek.convolve(&TrigPoly::zero(3)).is_err());
    }

    #[test]
    fn autocorrelation_squares_coefficients() {
        let f = TrigPoly::from_coeffs(1, [(fi(&[4]), c(2.0, 0.0))]).unwrap();
        let fs = f.autocorrelate();
        assert!((fs.coeff(&fi(&[4])) - c(4.0, 0.0)).norm() < 1e-15);
        let e = TrigPoly::exponential(fi(&[1]));
        assert_eq!(e.autocorrelate(), e);
    }

    #[test]
    fn grid_values_match_direct_evaluation() {
        let q = build_hyperbolic_cross(4, 2).unwrap();
        let f = random_poly(&q, 7, CoefficientLaw::ComplexGaussian);
        let g = GridSpec::new(vec![9, 11]).unwrap();
        let values = f.grid_values(&g).unwrap();
        for flat in [0usize, 1, 17, 53, 98] {
            let x = g.node(flat);
            assert!(
                (values[flat] - f.evaluate(&x)).norm() < 1e-11,
                "node {flat} mismatch"
            );
        }
    }

    #[test]
    fn quadrature_exactness_at_nyquist() {
        // M >= 2K+1 integrates f exactly: the grid mean equals c_0.
        let q = build_rectangle(&[5, 4]).unwrap();
        let f = random_poly(&q, 3, CoefficientLaw::ComplexGaussian);
        let g = GridSpec::new(vec![9, 7]).unwrap();
        let values = f.grid_values(&g).unwrap();
        let mean = values.iter().sum::<Complex64>() / values.len() as f64;
        assert!((mean - f.coeff(&fi(&[0, 0]))).norm() < 1e-12);
    }

    #[test]
    fn parseval_matches_quadrature_route() {
        for seed in 0..100 {
            let q = build_hyperbolic_cross(3, 2).unwrap();
            let f = random_poly(&q, seed, CoefficientLaw::ComplexGaussian);
            let parseval = f.lp_norm(2.0).unwrap();
            let grid = GridSpec::for_exact_power(&f, 2).unwrap();
            let quad = f.lp_norm_on(2.0, &grid).unwrap();
            assert!((parseval - quad).abs() < 1e-12, "seed {seed}");
            let direct: f64 = f.coeffs().map(|(_, c)| c.norm_sqr()).sum::<f64>().sqrt();
            assert!((parseval - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn norms_of_single_exponential_are_one() {
        let e = TrigPoly::exponential(fi(&[3, -2]));
        for p in [1.0, 2.0, 2.5, 4.0, f64::INFINITY] {
            assert!((e.lp_norm(p).unwrap() - 1.0).abs() < 1e-12, "p={p}");
        }
    }

    #[test]
    fn lp_norm_rejects_p_below_one() {
        let e = TrigPoly::exponential(fi(&[1]));
        assert!(e.lp_norm(0.5).is_err());
        assert!(e.lp_norm(f64::NAN).is_err());
    }

    #[test]
    fn norm_methods_are_labeled() {
        let q = build_rectangle(&[3]).unwrap();
        let f = random_poly(&q, 1, CoefficientLaw::ComplexGaussian);
        assert_eq!(
            f.lp_norm_detailed(2.0, None).unwrap().method,
            NormMethod::Parseval
        );
        assert!(matches!(
            f.lp_norm_detailed(4.0, None).unwrap().method,
            NormMethod::ExactQuadrature { .. }
        ));
        assert!(matches!(
            f.lp_norm_detailed(1.0, None).unwrap().method,
            NormMethod::GridEstimate { oversample: 8, .. }
        ));
    }

    #[test]
    fn random_poly_is_deterministic() {
        let q = build_hyperbolic_cross(5, 2).unwrap();
        let a = random_poly(&q, 42, CoefficientLaw::Unimodular);
        let b = random_poly(&q, 42, CoefficientLaw::Unimodular);
        assert_eq!(a, b);
        let c = random_poly(&q, 43, CoefficientLaw::Unimodular);
        assert_ne!(a, c);
    }

    #[test]
    fn prng_stream_is_pinned() {
        // The coefficient stream is part of the reproducibility contract
        // (chacha8, lexicographic assignment); these values must not drift
        // across releases or platforms.
        let q = build_rectangle(&[2]).unwrap();
        let f = random_poly(&q, 42, CoefficientLaw::Unimodular);
        let expect = [
            (-1i64, -4.14969103033697384e-1, -9.09835503554026315e-1),
            (0, 9.51589826677334827e-1, -3.07370788729507904e-1),
            (1, -8.98072912084221908e-1, 4.39846614833586502e-1),
        ];
        for (k, re, im) in expect {
            let got = f.coeff(&fi(&[k]));
            assert!((got - c(re, im)).norm() < 1e-15, "k={k}");
        }
        let g = random_poly(&q, 42, CoefficientLaw::ComplexGaussian);
        assert!((g.coeff(&fi(&[-1])) - c(3.37983774917950952e-1, 9.43330375076586902e-1)).norm() < 1e-15);
    }

    #[test]
    fn unimodular_norm_is_sqrt_cardinality() {
        let q = build_hyperbolic_cross(4, 2).unwrap();
        for seed in [0, 9, 77] {
            let f = random_poly(&q, seed, CoefficientLaw::Unimodular);
            let n2 = f.lp_norm(2.0).unwrap();
            assert!((n2 * n2 - q.len() as f64).abs() < 1e-12 * q.len() as f64);
        }
        let just_zero = crate::freqsets::build_explicit(vec![fi(&[0])], 1).unwrap();
        let f = random_poly(&just_zero, 5, CoefficientLaw::Unimodular);
        assert!((f.coeff(&fi(&[0])).norm() - 1.0).abs() < 1e-15);
        assert_eq!(f.num_coeffs(), 1);
    }

    #[test]
    fn json_round_shape() {
        let f = TrigPoly::from_coeffs(2, [(fi(&[1, -2]), c(0.5, -0.25))]).unwrap();
        let v = f.to_json();
        assert_eq!(v["dim"], 2);
        assert_eq!(v["entries"][0][0][1], -2);
        assert_eq!(v["entries"][0][1], 0.5);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn convolve_is_bilinear_commutative_associative(sa in 0u64..1000, sb in 0u64..1000, sc in 0u64..1000) {
            let q = build_hyperbolic_cross(3, 2).unwrap();
            let f = random_poly(&q, sa, CoefficientLaw::ComplexGaussian);
            let g = random_poly(&q, sb, CoefficientLaw::ComplexGaussian);
            let h = random_poly(&q, sc, CoefficientLaw::ComplexGaussian);

            let fg = f.convolve(&g).unwrap();
            let gf = g.convolve(&f).unwrap();
            prop_assert!(max_coeff_diff(&fg, &gf) < 1e-12);

            let assoc_l = fg.convolve(&h).unwrap();
            let assoc_r = f.convolve(&g.convolve(&h).unwrap()).unwrap();
            prop_assert!(max_coeff_diff(&assoc_l, &assoc_r) < 1e-12);

            let sum = f.add(&g).unwrap().convolve(&h).unwrap();
            let split = f.convolve(&h).unwrap().add(&g.convolve(&h).unwrap()).unwrap();
            prop_assert!(max_coeff_diff(&sum, &split) < 1e-12);
        }

        #[test]
        fn lp_norm_nondecreasing_in_p(seed in 0u64..500) {
            let q = build_hyperbolic_cross(3, 2).unwrap();
            let f = random_poly(&q, seed, CoefficientLaw::ComplexGaussian);
            let ps = [1.0, 2.0, 2.5, 4.0, 6.0, f64::INFINITY];
            let norms: Vec<f64> = ps.iter().map(|&p| f.lp_norm(p).unwrap()).collect();
            for w in norms.windows(2) {
                prop_assert!(w[0] <= w[1] + 1e-9, "norms not monotone: {norms:?}");
            }
        }

        #[test]
        fn real_valued_predicate(seed in 0u64..200) {
            let q = build_rectangle(&[3, 3]).unwrap();
            let f = random_poly(&q, seed, CoefficientLaw::ComplexGaussian);
            // symmetrize: g(x) = f(x) + conj(f)(x) is real-valued
            let sym = TrigPoly::from_coeffs(
                2,
                f.coeffs().map(|(k, c)| (k.clone(), *c)).chain(
                    f.coeffs().map(|(k, c)| (k.neg(), c.conj())),
                ),
            ).unwrap();
            prop_assert!(sym.is_real_valued(1e-12));
            let x = [1.234, 2.345];
            prop_assert!(sym.evaluate(&x).im.abs() < 1e-12);
        }
    }
}
