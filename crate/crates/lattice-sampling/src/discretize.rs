//! Discretization of convolution and norms on lattice point sets.
//!
//! The central objects are cubature sums `(1/m) Σ f(ξ^ν)`, the discretized
//! convolution that replaces the integral in `f * g` by such a sum, and the
//! shift operators `a ↦ (1/m) Σ a_ν K(x - ξ^ν)`. Everything here has two
//! routes: a pointwise route through point evaluation and a spectral route
//! through dual-lattice residues, and the tests hold the two against each
//! other.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::TAU;
use std::sync::Arc;

use crate::freqsets::{build_explicit, FreqIndex, FreqSet};
use crate::kernels::{self, KernelId};
use crate::lattices::{is_exact_on, PointSet};
use crate::trigpoly::{CoefficientLaw, GridSpec, TrigPoly, DEFAULT_OVERSAMPLE};
use crate::{Error, Result};

/// A coefficient vector `a` tied to an `m`-point set, with the normalized
/// norms `‖a‖_{p,m} = ((1/m) Σ |a_ν|^p)^{1/p}` and `‖a‖_∞ = max |a_ν|`.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleVector(Vec<Complex64>);

impl SampleVector {
    pub fn new(values: Vec<Complex64>) -> Self {
        SampleVector(values)
    }

    pub fn from_real(values: &[f64]) -> Self {
        SampleVector(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    /// Samples a polynomial at every point of the set.
    pub fn sample(f: &TrigPoly, points: &PointSet) -> Result<Self> {
        Ok(SampleVector(lattice_values(f, points)?))
    }

    /// Deterministic random vector; coefficients follow `law`.
    pub fn random(m: usize, seed: u64, law: CoefficientLaw) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        SampleVector(
            (0..m)
                .map(|_| match law {
                    CoefficientLaw::ComplexGaussian => {
                        let re: f64 = rng.sample(rand_distr::StandardNormal);
                        let im: f64 = rng.sample(rand_distr::StandardNormal);
                        Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
                    }
                    CoefficientLaw::Unimodular => {
                        Complex64::from_polar(1.0, rng.random::<f64>() * TAU)
                    }
                })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.0
    }

    /// `‖a‖_{p,m}`; `p = ∞` gives the maximum modulus.
    pub fn norm_pm(&self, p: f64) -> f64 {
        assert!(p >= 1.0, "norm needs p >= 1");
        if self.0.is_empty() {
            return 0.0;
        }
        if p.is_infinite() {
            return self.0.iter().map(|v| v.norm()).fold(0.0, f64::max);
        }
        let mean = self.0.iter().map(|v| v.norm().powf(p)).sum::<f64>() / self.0.len() as f64;
        mean.powf(1.0 / p)
    }
}

/// `f(ξ^ν)` for every point, through the exact residue phases.
pub fn lattice_values(f: &TrigPoly, points: &PointSet) -> Result<Vec<Complex64>> {
    if f.dim() != points.dim() {
        return Err(Error::DimensionMismatch(f.dim(), points.dim()));
    }
    let m = points.len();
    let mut out = vec![Complex64::default(); m];
    let roots = points.unit_roots();
    if let Some(dual) = points.dual() {
        // rank-1: the phase of coefficient k advances by ω^{t_k} per point
        let mu = points.modulus() as usize;
        for (k, &c) in f.coeffs() {
            let t = dual.residue(k) as usize;
            let mut idx = t; // point ν=0 is μ=1
            for slot in out.iter_mut() {
                *slot += c * roots[idx];
                idx += t;
                if idx >= mu {
                    idx -= mu;
                }
            }
        }
    } else {
        for (k, &c) in f.coeffs() {
            for (slot, phase) in out.iter_mut().zip(points.phases(k, &roots)) {
                *slot += c * phase;
            }
        }
    }
    Ok(out)
}

/// The cubature sum `(1/m) Σ f(ξ^ν)` (pointwise route).
pub fn cubature(points: &PointSet, f: &TrigPoly) -> Result<Complex64> {
    let values = lattice_values(f, points)?;
    Ok(values.iter().sum::<Complex64>() / values.len() as f64)
}

/// Cubature of already-sampled values.
pub fn cubature_samples(points: &PointSet, values: &[Complex64]) -> Result<Complex64> {
    if values.len() != points.len() {
        return Err(Error::LengthMismatch {
            expected: points.len(),
            got: values.len(),
        });
    }
    Ok(values.iter().sum::<Complex64>() / values.len() as f64)
}

/// The spectral route: `Σ_k f^(k) S(k)` where `S(k)` is the dual-lattice
/// indicator, an exact integer computation for rank-1 sets.
pub fn cubature_spectral(points: &PointSet, f: &TrigPoly) -> Result<Complex64> {
    if f.dim() != points.dim() {
        return Err(Error::DimensionMismatch(f.dim(), points.dim()));
    }
    let dual = points.dual().ok_or_else(|| {
        Error::InvalidParameter("spectral cubature needs a rank-1 point set".into())
    })?;
    Ok(f.coeffs()
        .filter(|(k, _)| dual.contains(k))
        .map(|(_, &c)| c)
        .sum())
}

/// The numerically computed exponential sum `S(k) = (1/m) Σ e^{i(k, ξ^ν)}`.
pub fn exponential_sum(points: &PointSet, k: &FreqIndex) -> Complex64 {
    let roots = points.unit_roots();
    let phases = points.phases(k, &roots);
    phases.iter().sum::<Complex64>() / phases.len() as f64
}

/// The frequency set whose dual-freeness makes `discretized_convolution`
/// exact: the differences `{k - l}` over the two supports, together with the
/// supports themselves.
pub fn convolution_exactness_set(f: &TrigPoly, g: &TrigPoly) -> Result<FreqSet> {
    if f.dim() != g.dim() {
        return Err(Error::DimensionMismatch(f.dim(), g.dim()));
    }
    let mut members: Vec<FreqIndex> = Vec::new();
    for (k, _) in g.coeffs() {
        for (l, _) in f.coeffs() {
            members.push(k.sub(l));
        }
    }
    members.extend(f.coeffs().map(|(k, _)| k.clone()));
    members.extend(g.coeffs().map(|(k, _)| k.clone()));
    build_explicit(members, f.dim())
}

/// Replaces the convolution integral by the cubature sum:
/// the output has coefficients `g^(k) · (1/m) Σ f(ξ^ν) e^{-i(k, ξ^ν)}`.
///
/// This equals [`TrigPoly::convolve`] exactly whenever the point set is exact
/// on [`convolution_exactness_set`]; outside that regime aliasing shifts
/// spectral mass and the two disagree.
pub fn discretized_convolution(f: &TrigPoly, g: &TrigPoly, points: &PointSet) -> Result<TrigPoly> {
    if f.dim() != g.dim() {
        return Err(Error::DimensionMismatch(f.dim(), g.dim()));
    }
    let fvals = lattice_values(f, points)?;
    let m = points.len();
    let roots = points.unit_roots();
    let mut entries = Vec::with_capacity(g.num_coeffs());
    for (k, &gk) in g.coeffs() {
        let phases = points.phases(k, &roots);
        let mut acc = Complex64::default();
        for (fv, ph) in fvals.iter().zip(&phases) {
            acc += fv * ph.conj();
        }
        entries.push((k.clone(), gk * acc / m as f64));
    }
    TrigPoly::from_coeffs(f.dim(), entries)
}

/// A shift operator `a ↦ (1/m) Σ a_ν K(x - ξ^ν)`.
///
/// Keeping the kernel identifier around lets the norm routines use the
/// closed-form evaluators instead of the coefficient map.
#[derive(Clone)]
pub struct ShiftOperator {
    kernel_id: Option<KernelId>,
    kernel: Arc<TrigPoly>,
    points: PointSet,
}

impl ShiftOperator {
    pub fn new(kernel: TrigPoly, points: PointSet) -> Result<Self> {
        if kernel.dim() != points.dim() {
            return Err(Error::DimensionMismatch(kernel.dim(), points.dim()));
        }
        Ok(ShiftOperator {
            kernel_id: None,
            kernel: Arc::new(kernel),
            points,
        })
    }

    pub fn from_kernel_id(id: KernelId, points: PointSet) -> Result<Self> {
        if id.dim() != points.dim() {
            return Err(Error::DimensionMismatch(id.dim(), points.dim()));
        }
        let kernel = kernels::kernel(&id)?;
        Ok(ShiftOperator {
            kernel_id: Some(id),
            kernel,
            points,
        })
    }

    pub fn kernel(&self) -> &TrigPoly {
        &self.kernel
    }

    pub fn kernel_id(&self) -> Option<&KernelId> {
        self.kernel_id.as_ref()
    }

    pub fn points(&self) -> &PointSet {
        &self.points
    }

    fn kernel_value_at(&self, x: &[f64]) -> f64 {
        match &self.kernel_id {
            Some(id) => kernels::closed_eval(id, x),
            None => self.kernel.evaluate(x).re,
        }
    }

    /// Applies the operator spectrally: the output has coefficients
    /// `K^(k) · (1/m) Σ a_ν e^{-i(k, ξ^ν)}`.
    pub fn apply(&self, a: &SampleVector) -> Result<TrigPoly> {
        if a.len() != self.points.len() {
            return Err(Error::LengthMismatch {
                expected: self.points.len(),
                got: a.len(),
            });
        }
        let m = self.points.len();
        let roots = self.points.unit_roots();
        let mut entries = Vec::with_capacity(self.kernel.num_coeffs());
        for (k, &kk) in self.kernel.coeffs() {
            let phases = self.points.phases(k, &roots);
            let mut acc = Complex64::default();
            for (av, ph) in a.values().iter().zip(&phases) {
                acc += av * ph.conj();
            }
            entries.push((k.clone(), kk * acc / m as f64));
        }
        TrigPoly::from_coeffs(self.kernel.dim(), entries)
    }

    /// The defining sum `(1/m) Σ a_ν K(x - ξ^ν)` evaluated directly at one
    /// point; the spectral route must agree with this.
    pub fn apply_pointwise_at(&self, a: &SampleVector, x: &[f64]) -> Result<Complex64> {
        if a.len() != self.points.len() {
            return Err(Error::LengthMismatch {
                expected: self.points.len(),
                got: a.len(),
            });
        }
        let mut acc = Complex64::default();
        let mut diff = vec![0.0; x.len()];
        for (a_nu, p) in a.values().iter().zip(self.points.points()) {
            for i in 0..x.len() {
                diff[i] = x[i] - p[i];
            }
            acc += a_nu * self.kernel_value_at(&diff);
        }
        Ok(acc / self.points.len() as f64)
    }
}

/// Maximum pointwise reconstruction error of the sampling representation
/// `f(x) = (1/m) Σ f(ξ^ν) K(x - ξ^ν)` over a random probe of points.
///
/// In the exactness regime this is at the float-noise level; outside it the
/// error is macroscopic, and the harness asserts both directions.
pub fn sampling_representation_check(
    f: &TrigPoly,
    op: &ShiftOperator,
    probes: usize,
    seed: u64,
) -> Result<f64> {
    let samples = SampleVector::sample(f, op.points())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = f.dim();
    let mut worst = 0.0f64;
    for _ in 0..probes {
        let x: Vec<f64> = (0..dim).map(|_| rng.random::<f64>() * TAU).collect();
        let recon = op.apply_pointwise_at(&samples, &x)?;
        worst = worst.max((f.evaluate(&x) - recon).norm());
    }
    Ok(worst)
}

// ---------------------------------------------------------------------------
// Fibonacci sums and the `L_∞` operator norm grid scan
// ---------------------------------------------------------------------------

/// `FSV(x) = (1/m) Σ |K(x - ξ^ν)|` at the nodes of an arbitrary grid,
/// in row-major node order.
pub fn shift_abs_sum_on_grid(op: &ShiftOperator, grid: &GridSpec) -> Result<Vec<f64>> {
    if grid.dim() != op.points.dim() {
        return Err(Error::DimensionMismatch(grid.dim(), op.points.dim()));
    }
    let total = grid.total()?;
    let m = op.points.len() as f64;
    let mut out = Vec::with_capacity(total);
    let mut diff = vec![0.0; grid.dim()];
    for flat in 0..total {
        let x = grid.node(flat);
        let mut acc = 0.0;
        for p in op.points.points() {
            for i in 0..diff.len() {
                diff[i] = x[i] - p[i];
            }
            acc += op.kernel_value_at(&diff).abs();
        }
        out.push(acc / m);
    }
    Ok(out)
}

/// The Fibonacci sum of `V_{Q_r}` at the nodes of `grid`:
/// `FSV(x) = (1/b_n) Σ |V_{Q_r}(x - y^ν)|`.
pub fn fibonacci_sum(r: u32, n: u32, grid: &GridSpec) -> Result<Vec<f64>> {
    let points = crate::lattices::fibonacci_points(n)?;
    let op = ShiftOperator::from_kernel_id(KernelId::HcValleePoussin { r, dim: 2 }, points)?;
    shift_abs_sum_on_grid(&op, grid)
}

/// Statistics of `FSV` over a lattice-compatible fine grid.
#[derive(Clone, Debug, Serialize)]
pub struct ShiftSumStats {
    /// `max_x FSV(x)` over the grid — the `ℓ_∞ → L_∞` operator norm up to
    /// grid resolution.
    pub max: f64,
    /// Grid estimates of `‖FSV‖_p` for p = 1, 2.
    pub l1: f64,
    pub l2: f64,
    /// Grid size per dimension (`s · m`) and the oversampling it achieves.
    pub grid_size: usize,
    pub oversample: usize,
}

/// How kernel values at grid differences are produced during the scan.
enum ScanEval {
    /// `|K(x)| = Π tab_i[idx_i]` — tensor kernels, absolute value splits.
    Product(Vec<Vec<f64>>),
    /// `K(x1, x2) = Σ_s a_tab[s][i1] · v_tab[s][i2]`, possibly minus a second
    /// pair of tables — the block expansion of `V_{Q_r}` and `ΔV_{Q_r}`.
    Blocks2D {
        a_tab: Vec<Vec<f64>>,
        v_tab: Vec<Vec<f64>>,
        minus: Option<(Vec<Vec<f64>>, Vec<Vec<f64>>)>,
    },
    /// `|K|` tabulated on the whole grid (FFT route for bare coefficients).
    FullTable(Vec<f64>),
    /// Closed form per node (fallback for closed-form kernels in d >= 3).
    PerNode,
}

fn block_tables(r: u32, big_m: usize) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let terms = (r + 1) as usize;
    let mut a_tab = vec![vec![0.0; big_m]; terms];
    let mut v_tab = vec![vec![0.0; big_m]; terms];
    for s1 in 0..terms {
        for t in 0..big_m {
            let x = TAU * t as f64 / big_m as f64;
            a_tab[s1][t] = kernels::block_a_closed(s1 as u32, x);
            v_tab[s1][t] = kernels::hc_vallee_poussin_closed(r - s1 as u32, &[x]);
        }
    }
    (a_tab, v_tab)
}

fn one_dim_tables(dims: &[u32], kind: fn(u32, f64) -> f64, big_m: usize) -> ScanEval {
    ScanEval::Product(
        dims.iter()
            .map(|&ji| {
                (0..big_m)
                    .map(|t| kind(ji, TAU * t as f64 / big_m as f64).abs())
                    .collect()
            })
            .collect(),
    )
}

/// Scans `FSV(x) = (1/m) Σ |K(x - ξ^ν)|` over the grid of size `(s·m)^d`
/// chosen so that `s·m` is at least `oversample` times the kernel's maximum
/// frequency.
///
/// Because the grid is a union of lattice translates, `FSV` is constant on
/// lattice orbits; only one representative per orbit is evaluated, which
/// turns an `(s·m)^d · m` scan into an `s · (s·m)^(d-1) · m` one. This is a
/// reduction of the full grid scan, not an approximation of it. Grid
/// differences are again grid points, so kernel values come from
/// per-dimension tables indexed by integer offsets.
pub fn shift_sum_stats(op: &ShiftOperator, oversample: usize) -> Result<ShiftSumStats> {
    let points = &op.points;
    let h = points.rank1_vector().ok_or_else(|| {
        Error::InvalidParameter("orbit-reduced scan needs a rank-1 point set".into())
    })?;
    if h[0] != 1 {
        return Err(Error::InvalidParameter(
            "orbit reduction expects a generating vector starting with 1".into(),
        ));
    }
    let m = points.len();
    let dim = points.dim();
    let maxfreq = op.kernel.max_freq().into_iter().max().unwrap_or(0) as usize;
    let s = (oversample * maxfreq).div_ceil(m).max(1);
    let big_m = s * m;

    let eval = match &op.kernel_id {
        Some(KernelId::TensorVP { j }) => one_dim_tables(j, kernels::vallee_poussin_closed, big_m),
        Some(KernelId::TensorFejer { j }) => one_dim_tables(j, kernels::fejer_closed, big_m),
        Some(KernelId::TensorBlockA { s }) => one_dim_tables(s, kernels::block_a_closed, big_m),
        Some(KernelId::Dirichlet { j }) => one_dim_tables(&[*j], kernels::dirichlet_closed, big_m),
        Some(KernelId::Fejer { j }) => one_dim_tables(&[*j], kernels::fejer_closed, big_m),
        Some(KernelId::ValleePoussin { j }) => {
            one_dim_tables(&[*j], kernels::vallee_poussin_closed, big_m)
        }
        Some(KernelId::BlockA { s }) => one_dim_tables(&[*s], kernels::block_a_closed, big_m),
        Some(KernelId::HcValleePoussin { r, dim: 2 }) => {
            let (a_tab, v_tab) = block_tables(*r, big_m);
            ScanEval::Blocks2D {
                a_tab,
                v_tab,
                minus: None,
            }
        }
        Some(KernelId::DeltaHcVp { r, dim: 2 }) => {
            let (a_tab, v_tab) = block_tables(*r, big_m);
            ScanEval::Blocks2D {
                a_tab,
                v_tab,
                minus: Some(block_tables(*r - 1, big_m)),
            }
        }
        Some(_) => ScanEval::PerNode,
        None => {
            let grid = GridSpec::new(vec![big_m; dim])?;
            let values = op.kernel.grid_values(&grid)?;
            ScanEval::FullTable(values.into_iter().map(|v| v.norm()).collect())
        }
    };

    // Integer offsets of the lattice points on the fine grid, per dimension.
    let offsets: Vec<Vec<usize>> = (0..dim)
        .map(|i| {
            points
                .residues()
                .iter()
                .map(|row| (row[i] as usize % m) * s % big_m)
                .collect()
        })
        .collect();

    // Representatives (c1, j2, ..., jd) with c1 in [0, s): every orbit of the
    // lattice action on the grid contains exactly one of them.
    let reps = s * big_m.pow(dim as u32 - 1);
    let mut max = 0.0f64;
    let mut sum1 = 0.0f64;
    let mut sum2 = 0.0f64;
    let mut rep_coords = vec![0usize; dim];
    let mut idx = vec![0usize; dim];
    for rep in 0..reps {
        // decode representative: first coordinate in [0, s), rest in [0, big_m)
        let mut t = rep;
        for i in (1..dim).rev() {
            rep_coords[i] = t % big_m;
            t /= big_m;
        }
        rep_coords[0] = t;
        debug_assert!(rep_coords[0] < s);

        let mut acc = 0.0f64;
        for nu in 0..m {
            for i in 0..dim {
                idx[i] = (rep_coords[i] + big_m - offsets[i][nu]) % big_m;
            }
            acc += match &eval {
                ScanEval::Product(tabs) => {
                    let mut v = 1.0;
                    for (i, tab) in tabs.iter().enumerate() {
                        v *= tab[idx[i]];
                    }
                    v.abs()
                }
                ScanEval::Blocks2D { a_tab, v_tab, minus } => {
                    let mut v = 0.0;
                    for s1 in 0..a_tab.len() {
                        v += a_tab[s1][idx[0]] * v_tab[s1][idx[1]];
                    }
                    if let Some((a2, v2)) = minus {
                        for s1 in 0..a2.len() {
                            v -= a2[s1][idx[0]] * v2[s1][idx[1]];
                        }
                    }
                    v.abs()
                }
                ScanEval::FullTable(table) => {
                    let mut flat = 0usize;
                    for &i in idx.iter() {
                        flat = flat * big_m + i;
                    }
                    table[flat]
                }
                ScanEval::PerNode => {
                    let x: Vec<f64> = idx
                        .iter()
                        .map(|&c| TAU * c as f64 / big_m as f64)
                        .collect();
                    op.kernel_value_at(&x).abs()
                }
            };
        }
        let v = acc / m as f64;
        max = max.max(v);
        sum1 += v;
        sum2 += v * v;
    }
    Ok(ShiftSumStats {
        max,
        l1: sum1 / reps as f64,
        l2: (sum2 / reps as f64).sqrt(),
        grid_size: big_m,
        oversample,
    })
}

// ---------------------------------------------------------------------------
// Operator norms
// ---------------------------------------------------------------------------

/// Result of the Gram-matrix power iteration.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PowerIteration {
    pub lambda: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Largest eigenvalue of the Gram matrix `G_{νμ} = K*(ξ^ν - ξ^μ)` of shifted
/// kernels, by power iteration to the given relative tolerance.
///
/// For rank-1 sets `G` is circulant (`ξ^ν - ξ^μ` is again a lattice point),
/// so only the first row is materialized. General point sets get the dense
/// matrix, capped at 4096 points.
pub fn gram_lambda_max(op: &ShiftOperator, rel_tol: f64, max_iter: usize) -> Result<PowerIteration> {
    let m = op.points.len();
    if op.points.dual().is_some() {
        let row = circulant_gram_row(op)?;
        Ok(power_iteration(
            |v, out| {
                // (Gv)[i] = Σ_j row[(j - i) mod m] v[j]
                for i in 0..m {
                    let mut acc = 0.0;
                    let mut t = 0usize;
                    for j in i..m {
                        acc += row[t] * v[j];
                        t += 1;
                    }
                    for j in 0..i {
                        acc += row[t] * v[j];
                        t += 1;
                    }
                    out[i] = acc;
                }
            },
            m,
            rel_tol,
            max_iter,
        ))
    } else {
        if m > 4096 {
            return Err(Error::InvalidParameter(format!(
                "dense Gram power iteration capped at 4096 points, got {m}"
            )));
        }
        let kstar = op.kernel.autocorrelate();
        let mut g = vec![0.0f64; m * m];
        let pts = op.points.points();
        let dim = op.points.dim();
        let mut diff = vec![0.0; dim];
        for i in 0..m {
            for j in 0..m {
                for c in 0..dim {
                    diff[c] = pts[j][c] - pts[i][c];
                }
                g[i * m + j] = kstar.evaluate(&diff).re;
            }
        }
        Ok(power_iteration(
            |v, out| {
                for i in 0..m {
                    let row = &g[i * m..(i + 1) * m];
                    out[i] = row.iter().zip(v).map(|(&a, &b)| a * b).sum();
                }
            },
            m,
            rel_tol,
            max_iter,
        ))
    }
}

/// Exact largest eigenvalue of the circulant Gram matrix through its symbol:
/// the eigenvalues of a circulant matrix are the DFT values of its first row,
/// so the maximum is a direct `O(m²)` computation with no iteration error.
pub fn circulant_lambda_max(op: &ShiftOperator) -> Result<f64> {
    let row = circulant_gram_row(op)?;
    let m = row.len();
    let roots = op.points.unit_roots();
    let mut best = f64::NEG_INFINITY;
    for t in 0..m {
        let mut acc = 0.0f64;
        let mut idx = 0usize;
        for &g in &row {
            acc += g * roots[idx].re;
            idx += t;
            if idx >= m {
                idx -= m;
            }
        }
        best = best.max(acc);
    }
    Ok(best)
}

/// First row of the circulant Gram matrix:
/// `g[t] = K*(y^t) = Σ_k |K^(k)|² ω^{t·residue(k)}`.
fn circulant_gram_row(op: &ShiftOperator) -> Result<Vec<f64>> {
    let points = &op.points;
    let dual = points
        .dual()
        .ok_or_else(|| Error::InvalidParameter("circulant Gram needs a rank-1 set".into()))?;
    let m = points.len();
    let roots = points.unit_roots();
    let mut row = vec![Complex64::default(); m];
    for (k, &c) in op.kernel.coeffs() {
        let w = c.norm_sqr();
        let tk = dual.residue(k) as usize;
        let mut idx = 0usize;
        for slot in row.iter_mut() {
            *slot += w * roots[idx];
            idx += tk;
            if idx >= m {
                idx -= m;
            }
        }
    }
    Ok(row.into_iter().map(|v| v.re).collect())
}

fn power_iteration(
    matvec: impl Fn(&[f64], &mut [f64]),
    m: usize,
    rel_tol: f64,
    max_iter: usize,
) -> PowerIteration {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1597);
    let mut v: Vec<f64> = (0..m).map(|_| rng.sample(rand_distr::StandardNormal)).collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
    let mut w = vec![0.0; m];
    let mut lambda = 0.0f64;
    for it in 1..=max_iter {
        matvec(&v, &mut w);
        let new_lambda = v.iter().zip(&w).map(|(&a, &b)| a * b).sum::<f64>();
        let wnorm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if wnorm == 0.0 {
            return PowerIteration {
                lambda: 0.0,
                iterations: it,
                converged: true,
            };
        }
        for (vi, &wi) in v.iter_mut().zip(&w) {
            *vi = wi / wnorm;
        }
        if (new_lambda - lambda).abs() <= rel_tol * new_lambda.abs().max(f64::MIN_POSITIVE) {
            return PowerIteration {
                lambda: new_lambda,
                iterations: it,
                converged: true,
            };
        }
        lambda = new_lambda;
    }
    PowerIteration {
        lambda,
        iterations: max_iter,
        converged: false,
    }
}

/// Exact operator norm of the shift operator `ℓ_{p,m} → L_p` for
/// `p ∈ {1, 2, ∞}`:
///
/// * `p = 1`: `‖K‖₁` (coordinate vectors are extremal),
/// * `p = ∞`: `max_x FSV(x)` over the compatible fine grid,
/// * `p = 2`: `sqrt(λ_max(G)/m)` from the Gram matrix of shifted kernels.
///
/// For rank-1 sets the Gram matrix is circulant and `λ_max` comes from the
/// exact symbol; power iteration ([`gram_lambda_max`]) stays available as an
/// independent route but stalls below 1e-10 when the symbol has an eigenvalue
/// cluster under its maximum. Other exponents are rejected; see
/// [`op_norm_upper_bound`] and [`op_norm_probe`].
pub fn op_norm(op: &ShiftOperator, p: f64) -> Result<f64> {
    if p == 1.0 {
        return kernel_l1_norm(op);
    }
    if p == 2.0 {
        let lambda = if op.points.dual().is_some() {
            circulant_lambda_max(op)?
        } else {
            gram_lambda_max(op, 1e-10, 5000)?.lambda
        };
        return Ok((lambda.max(0.0) / op.points.len() as f64).sqrt());
    }
    if p.is_infinite() {
        return Ok(shift_sum_stats(op, DEFAULT_OVERSAMPLE)?.max);
    }
    Err(Error::InvalidParameter(format!(
        "exact operator norms exist for p in {{1, 2, ∞}} only, got {p}"
    )))
}

/// `‖K‖₁`, factorized over dimensions for tensor kernels (the absolute value
/// of a tensor product splits), otherwise grid-estimated.
fn kernel_l1_norm(op: &ShiftOperator) -> Result<f64> {
    match &op.kernel_id {
        Some(KernelId::TensorVP { j }) => j
            .iter()
            .map(|&ji| kernels::vallee_poussin(ji)?.lp_norm(1.0))
            .product(),
        Some(KernelId::TensorFejer { j }) => {
            j.iter().map(|&ji| kernels::fejer(ji)?.lp_norm(1.0)).product()
        }
        Some(KernelId::HcValleePoussin { r, dim: 2 }) => {
            let maxfreq = op.kernel.max_freq().into_iter().max().unwrap_or(0) as usize;
            let m = (DEFAULT_OVERSAMPLE * maxfreq).max(crate::trigpoly::MIN_ESTIMATE_GRID);
            let mut sum = 0.0;
            kernels::hc_vp_grid_scan_2d(*r, m, m, |_, v| sum += v.abs());
            Ok(sum / (m * m) as f64)
        }
        Some(KernelId::DeltaHcVp { r, dim: 2 }) => {
            let maxfreq = op.kernel.max_freq().into_iter().max().unwrap_or(0) as usize;
            let m = (DEFAULT_OVERSAMPLE * maxfreq).max(crate::trigpoly::MIN_ESTIMATE_GRID);
            let mut sum = 0.0;
            kernels::delta_hc_vp_grid_scan_2d(*r, m, m, |_, v| sum += v.abs());
            Ok(sum / (m * m) as f64)
        }
        _ => op.kernel.lp_norm(1.0),
    }
}

/// Upper bound on the operator norm for intermediate exponents by
/// interpolation between the exact `p = 1` and `p = ∞` norms:
/// `‖T‖_p <= ‖T‖₁^(1/p) ‖T‖_∞^(1-1/p)`. This is a bound, not a norm.
pub fn op_norm_upper_bound(op: &ShiftOperator, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidParameter(format!("needs p >= 1, got {p}")));
    }
    if p == 1.0 || p == 2.0 || p.is_infinite() {
        return op_norm(op, p);
    }
    let n1 = op_norm(op, 1.0)?;
    let ninf = op_norm(op, f64::INFINITY)?;
    Ok(n1.powf(1.0 / p) * ninf.powf(1.0 - 1.0 / p))
}

/// Probing lower bound: the largest ratio `‖T a‖_p / ‖a‖_{p,m}` over random
/// coefficient vectors. Valid for any `p >= 1`, converges to the norm from
/// below.
pub fn op_norm_probe(op: &ShiftOperator, p: f64, trials: usize, seed: u64) -> Result<f64> {
    let m = op.points.len();
    let mut best = 0.0f64;
    for t in 0..trials {
        let a = SampleVector::random(m, seed.wrapping_add(t as u64), CoefficientLaw::ComplexGaussian);
        let image = op.apply(&a)?;
        let ratio = image.lp_norm(p)? / a.norm_pm(p);
        best = best.max(ratio);
    }
    Ok(best)
}

// ---------------------------------------------------------------------------
// Sampling discretization
// ---------------------------------------------------------------------------

/// The two sides of the sampling discretization comparison at exponent `p`:
/// `sampled = (1/m) Σ |f(ξ^ν)|^p` against `true_norm = ‖f‖_p^p`
/// (maximum and plain norm for `p = ∞`).
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DiscretizationRatio {
    pub sampled: f64,
    pub true_norm: f64,
}

impl DiscretizationRatio {
    pub fn ratio(&self) -> f64 {
        self.sampled / self.true_norm
    }
}

pub fn discretization_ratio(f: &TrigPoly, points: &PointSet, p: f64) -> Result<DiscretizationRatio> {
    if !(p >= 1.0) {
        return Err(Error::InvalidParameter(format!("needs p >= 1, got {p}")));
    }
    let values = lattice_values(f, points)?;
    let m = values.len() as f64;
    if p.is_infinite() {
        Ok(DiscretizationRatio {
            sampled: values.iter().map(|v| v.norm()).fold(0.0, f64::max),
            true_norm: f.lp_norm(f64::INFINITY)?,
        })
    } else {
        Ok(DiscretizationRatio {
            sampled: values.iter().map(|v| v.norm().powf(p)).sum::<f64>() / m,
            true_norm: f.lp_norm(p)?.powf(p),
        })
    }
}

// ---------------------------------------------------------------------------
// Universal checks over rectangle collections
// ---------------------------------------------------------------------------

/// A collection of rectangle index sets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Collection {
    /// All `R(j)` with `j_1 ⋯ j_d <= N`.
    MaxProduct { n: u64 },
    /// All dyadic `R(2^s)` with `‖s‖₁ = n`.
    DyadicShell { n: u32 },
}

/// Enumerates the side vectors `j` of the collection, lexicographically.
pub fn collection_rectangles(c: &Collection, dim: usize) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    match c {
        Collection::MaxProduct { n } => {
            let mut cur = vec![1u64; dim];
            fn rec(budget: u64, axis: usize, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
                if axis == cur.len() {
                    out.push(cur.clone());
                    return;
                }
                for j in 1..=budget {
                    cur[axis] = j;
                    rec(budget / j, axis + 1, cur, out);
                }
            }
            rec(*n, 0, &mut cur, &mut out);
        }
        Collection::DyadicShell { n } => {
            let mut cur = vec![0u32; dim];
            fn rec(left: u32, axis: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u64>>) {
                if axis + 1 == cur.len() {
                    cur[axis] = left;
                    out.push(cur.iter().map(|&s| 1u64 << s).collect());
                    return;
                }
                for s in 0..=left {
                    cur[axis] = s;
                    rec(left - s, axis + 1, cur, out);
                }
            }
            rec(*n, 0, &mut cur, &mut out);
        }
    }
    out
}

/// Exponent wrapper that serializes `∞` as the string `"inf"` (bare JSON has
/// no infinities).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PExp(pub f64);

impl Serialize for PExp {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            s.serialize_f64(self.0)
        } else {
            s.serialize_str("inf")
        }
    }
}

/// Per-rectangle measurements of a universal check.
#[derive(Clone, Debug, Serialize)]
pub struct RectangleReport {
    pub j: Vec<u64>,
    /// Smallest and largest `sampled / true` discretization ratio over the
    /// trials.
    pub lower: f64,
    pub upper: f64,
    /// Largest `‖f‖_p / ‖(f(ξ^ν))‖_{p,m}` over the trials — the measured
    /// shift p-representation constant.
    pub spr_constant: f64,
    /// Worst pointwise error of the sampling representation with `V_j`.
    pub representation_error: f64,
    /// Interpolated (exact at 1, 2, ∞) operator-norm upper bounds at `p` and
    /// the dual exponent.
    pub op_norm_p: f64,
    pub op_norm_dual: f64,
}

/// Report of [`universal_check`].
#[derive(Clone, Debug, Serialize)]
pub struct UniversalCheckReport {
    pub collection: Collection,
    pub dim: usize,
    pub points_len: usize,
    pub p: PExp,
    pub trials: usize,
    pub seed: u64,
    /// Whether every rectangle passed its per-instance exactness check
    /// (dual lattice avoids the representation frequency set).
    pub exactness_verified: bool,
    pub rectangles: Vec<RectangleReport>,
    pub min_lower: f64,
    pub max_upper: f64,
    pub max_spr: f64,
    pub max_representation_error: f64,
}

/// Runs the two-sided discretization and shift-representation measurements
/// for every rectangle of the collection on one point set.
///
/// For each rectangle `R(j)` the kernel is the tensor de la Vallée Poussin
/// kernel `V_j`; per-instance exactness is checked on the frequency set of
/// the representation sums, the rectangle `{|k_i| <= 3j_i - 2}`.
pub fn universal_check(
    collection: &Collection,
    points: &PointSet,
    p: f64,
    trials: usize,
    seed: u64,
) -> Result<UniversalCheckReport> {
    if trials < 1 {
        return Err(Error::InvalidParameter("need at least one trial".into()));
    }
    if !(p >= 1.0) {
        return Err(Error::InvalidParameter(format!("needs p >= 1, got {p}")));
    }
    let dim = points.dim();
    let dual = points
        .dual()
        .ok_or_else(|| Error::InvalidParameter("universal check needs a rank-1 set".into()))?;
    let p_dual = if p.is_infinite() {
        1.0
    } else if p == 1.0 {
        f64::INFINITY
    } else {
        p / (p - 1.0)
    };

    let mut rectangles = Vec::new();
    let mut exactness_verified = true;
    for j in collection_rectangles(collection, dim) {
        // representation frequency set: differences of R(j) and supp V_j
        let rep_set = crate::freqsets::build_rectangle(
            &j.iter().map(|&ji| 3 * ji - 1).collect::<Vec<_>>(),
        )?;
        exactness_verified &= is_exact_on(&dual, &rep_set);

        let op = ShiftOperator::from_kernel_id(
            KernelId::TensorVP {
                j: j.iter().map(|&x| x as u32).collect(),
            },
            points.clone(),
        )?;
        let op_norm_p = op_norm_upper_bound(&op, p)?;
        let op_norm_dual = op_norm_upper_bound(&op, p_dual)?;

        let rect = crate::freqsets::build_rectangle(&j)?;
        let mut lower = f64::INFINITY;
        let mut upper = 0.0f64;
        let mut spr = 0.0f64;
        let mut rep_err = 0.0f64;
        for t in 0..trials {
            let f_seed = seed
                .wrapping_mul(0x9E37_79B9_7F4A_7C15)
                .wrapping_add(j.iter().fold(t as u64, |acc, &ji| acc * 131 + ji));
            let f = crate::trigpoly::random_poly(&rect, f_seed, CoefficientLaw::ComplexGaussian);
            let dr = discretization_ratio(&f, points, p)?;
            lower = lower.min(dr.ratio());
            upper = upper.max(dr.ratio());

            let samples = SampleVector::sample(&f, points)?;
            let fp = f.lp_norm(p)?;
            if samples.norm_pm(p) > 0.0 {
                spr = spr.max(fp / samples.norm_pm(p));
            }
            rep_err = rep_err.max(sampling_representation_check(&f, &op, 64, f_seed ^ 0xABCD)?);
        }
        rectangles.push(RectangleReport {
            j,
            lower,
            upper,
            spr_constant: spr,
            representation_error: rep_err,
            op_norm_p,
            op_norm_dual,
        });
    }
    let min_lower = rectangles.iter().map(|r| r.lower).fold(f64::INFINITY, f64::min);
    let max_upper = rectangles.iter().map(|r| r.upper).fold(0.0, f64::max);
    let max_spr = rectangles.iter().map(|r| r.spr_constant).fold(0.0, f64::max);
    let max_representation_error = rectangles
        .iter()
        .map(|r| r.representation_error)
        .fold(0.0, f64::max);
    Ok(UniversalCheckReport {
        collection: collection.clone(),
        dim,
        points_len: points.len(),
        p: PExp(p),
        trials,
        seed,
        exactness_verified,
        rectangles,
        min_lower,
        max_upper,
        max_spr,
        max_representation_error,
    })
}
