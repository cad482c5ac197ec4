//! Rank-1 lattice point sets and their dual lattices.
//!
//! The Fibonacci set `F_n` is the two-dimensional rank-1 lattice with
//! `m = b_n` points and generating vector `(1, b_{n-1})`; the Korobov sets
//! generalize this to any dimension. Cubature on such a set integrates
//! `e^{i(k,x)}` to 1 when `k` lies in the dual lattice
//! `{k : (h,k) ≡ 0 (mod m)}` and to 0 otherwise, which makes exactness
//! questions pure integer arithmetic.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;

use crate::freqsets::{FreqIndex, FreqSet};
use crate::{Error, Result};

/// Exact Fibonacci numbers with `b_0 = b_1 = 1`; overflow is an error, never
/// a wrap.
pub fn fibonacci_number(n: u32) -> Result<u64> {
    let (mut a, mut b) = (1u64, 1u64); // b_0, b_1
    for _ in 1..n {
        let next = a
            .checked_add(b)
            .ok_or_else(|| Error::Overflow(format!("Fibonacci number b_{n}")))?;
        a = b;
        b = next;
    }
    Ok(if n == 0 { a } else { b })
}

/// Generator metadata carried by a [`PointSet`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
pub enum Generator {
    Fibonacci { n: u32, m: u64, prev: u64 },
    Korobov { m: u64, h: Vec<i64> },
    Explicit { m: u64 },
}

/// A finite point set in `[0, 2π)^d` with exact rational structure: every
/// coordinate is `2π r / m` with the integer residue `r` stored alongside the
/// float value.
#[derive(Clone, Debug)]
pub struct PointSet {
    dim: usize,
    m: u64,
    residues: Vec<Vec<u64>>,
    points: Vec<Vec<f64>>,
    provenance: Generator,
}

impl PointSet {
    fn from_residues(dim: usize, m: u64, residues: Vec<Vec<u64>>, provenance: Generator) -> Self {
        let points = residues
            .iter()
            .map(|row| row.iter().map(|&r| TAU * r as f64 / m as f64).collect())
            .collect();
        PointSet {
            dim,
            m,
            residues,
            points,
            provenance,
        }
    }

    /// Rebuilds a point set from serialized rational coordinates `r_i / m`.
    pub fn from_fractions(dim: usize, m: u64, residues: Vec<Vec<u64>>) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParameter("modulus must be positive".into()));
        }
        for row in &residues {
            if row.len() != dim {
                return Err(Error::DimensionMismatch(row.len(), dim));
            }
            if row.iter().any(|&r| r >= m) {
                return Err(Error::InvalidParameter(format!(
                    "residue out of range for modulus {m}"
                )));
            }
        }
        let count = residues.len() as u64;
        Ok(PointSet::from_residues(dim, m, residues, Generator::Explicit { m: count }))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of points.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Common denominator of the rational coordinates.
    pub fn modulus(&self) -> u64 {
        self.m
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn point(&self, nu: usize) -> &[f64] {
        &self.points[nu]
    }

    /// Exact residues `r` with coordinates `2π r / m`, one row per point.
    pub fn residues(&self) -> &[Vec<u64>] {
        &self.residues
    }

    pub fn provenance(&self) -> &Generator {
        &self.provenance
    }

    /// The generating vector, if this is a rank-1 lattice.
    pub fn rank1_vector(&self) -> Option<Vec<i64>> {
        match &self.provenance {
            Generator::Fibonacci { prev, .. } => Some(vec![1, *prev as i64]),
            Generator::Korobov { h, .. } => Some(h.clone()),
            Generator::Explicit { .. } => None,
        }
    }

    /// The dual lattice `{k : (h,k) ≡ 0 (mod m)}`, if rank-1.
    pub fn dual(&self) -> Option<DualLattice> {
        self.rank1_vector()
            .map(|h| DualLattice::new(self.m, h).expect("valid generator"))
    }

    /// The `m`-th roots of unity `ω^t = e^{2πi t/m}`, `t = 0..m-1`.
    pub fn unit_roots(&self) -> Vec<Complex64> {
        let m = self.m;
        (0..m)
            .map(|t| {
                let (s, c) = (TAU * t as f64 / m as f64).sin_cos();
                Complex64::new(c, s)
            })
            .collect()
    }

    /// Serializes the set with exact rational coordinates: the numerators of
    /// `x_i / 2π = r_i / m`, plus the generator that produced them.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "dim": self.dim,
            "denominator": self.m,
            "generator": self.provenance,
            "numerators": self.residues,
        })
    }

    /// Rebuilds a point set from its serialized form. When the generator is a
    /// rank-1 description, the stored numerators must match what the
    /// generator produces; the round trip is exact, never floating-point.
    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let bad = |what: &str| Error::InvalidParameter(format!("point-set JSON: {what}"));
        let dim = v["dim"].as_u64().ok_or_else(|| bad("missing dim"))? as usize;
        let m = v["denominator"]
            .as_u64()
            .ok_or_else(|| bad("missing denominator"))?;
        let residues: Vec<Vec<u64>> =
            serde_json::from_value(v["numerators"].clone()).map_err(|_| bad("bad numerators"))?;
        let provenance: Generator =
            serde_json::from_value(v["generator"].clone()).map_err(|_| bad("bad generator"))?;
        let rebuilt = match &provenance {
            Generator::Fibonacci { n, .. } => fibonacci_points(*n)?,
            Generator::Korobov { m, h } => korobov_points(*m, h)?,
            Generator::Explicit { .. } => return PointSet::from_fractions(dim, m, residues),
        };
        if rebuilt.dim != dim || rebuilt.m != m || rebuilt.residues != residues {
            return Err(bad("stored numerators disagree with the generator"));
        }
        Ok(rebuilt)
    }

    /// `e^{i(k, ξ^ν)}` for every point, computed through the exact residues:
    /// the angle `(k, ξ^ν)` reduces to `2π ((k, r^ν) mod m)/m` in integers.
    pub fn phases(&self, k: &FreqIndex, roots: &[Complex64]) -> Vec<Complex64> {
        let m = self.m as i128;
        self.residues
            .iter()
            .map(|row| {
                let t: i128 = k
                    .coords()
                    .iter()
                    .zip(row)
                    .map(|(&ki, &ri)| (ki as i128) * (ri as i128))
                    .sum();
                roots[t.rem_euclid(m) as usize]
            })
            .collect()
    }
}

/// The Fibonacci point set `F_n = {(2πμ/b_n, 2π{μ b_{n-1}/b_n})}`, `μ = 1..b_n`.
pub fn fibonacci_points(n: u32) -> Result<PointSet> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "Fibonacci point set needs n >= 2, got {n}"
        )));
    }
    let m = fibonacci_number(n)?;
    let prev = fibonacci_number(n - 1)?;
    let residues = (1..=m)
        .map(|mu| vec![mu % m, (mu as u128 * prev as u128 % m as u128) as u64])
        .collect();
    Ok(PointSet::from_residues(
        2,
        m,
        residues,
        Generator::Fibonacci { n, m, prev },
    ))
}

/// The Korobov point set `R_m(h) = {(2π{μh_1/m}, ..., 2π{μh_d/m})}`, `μ = 1..m`.
pub fn korobov_points(m: u64, h: &[i64]) -> Result<PointSet> {
    if m < 1 {
        return Err(Error::InvalidParameter("modulus must be >= 1".into()));
    }
    if h.is_empty() {
        return Err(Error::InvalidParameter("empty generating vector".into()));
    }
    let dim = h.len();
    let hm: Vec<u64> = h.iter().map(|&hi| (hi as i128).rem_euclid(m as i128) as u64).collect();
    let residues = (1..=m)
        .map(|mu| {
            hm.iter()
                .map(|&hi| (mu as u128 * hi as u128 % m as u128) as u64)
                .collect()
        })
        .collect();
    Ok(PointSet::from_residues(
        dim,
        m,
        residues,
        Generator::Korobov { m, h: h.to_vec() },
    ))
}

/// The special Korobov form `h = (1, h, h^2, ..., h^(d-1)) mod m`.
pub fn korobov_points_special(m: u64, h: u64, dim: usize) -> Result<PointSet> {
    korobov_points(m, &special_vector(m, h, dim))
}

fn special_vector(m: u64, h: u64, dim: usize) -> Vec<i64> {
    let mut v = Vec::with_capacity(dim);
    let mut pow = 1u64 % m.max(1);
    for _ in 0..dim {
        v.push(pow as i64);
        pow = (pow as u128 * h as u128 % m.max(1) as u128) as u64;
    }
    v
}

/// The dual lattice `L(m, h) = {k : (h, k) ≡ 0 (mod m)}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DualLattice {
    m: u64,
    h: Vec<i64>,
}

impl DualLattice {
    pub fn new(m: u64, h: Vec<i64>) -> Result<Self> {
        if m < 1 || h.is_empty() {
            return Err(Error::InvalidParameter(
                "dual lattice needs m >= 1 and a nonempty generator".into(),
            ));
        }
        Ok(DualLattice { m, h })
    }

    /// Dual lattice of the Fibonacci set `F_n`: `k_1 + b_{n-1} k_2 ≡ 0 (mod b_n)`.
    pub fn fibonacci(n: u32) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!(
                "Fibonacci lattice needs n >= 2, got {n}"
            )));
        }
        DualLattice::new(fibonacci_number(n)?, vec![1, fibonacci_number(n - 1)? as i64])
    }

    pub fn modulus(&self) -> u64 {
        self.m
    }

    pub fn generator(&self) -> &[i64] {
        &self.h
    }

    pub fn dim(&self) -> usize {
        self.h.len()
    }

    /// `(h, k) mod m`, in `[0, m)`.
    pub fn residue(&self, k: &FreqIndex) -> u64 {
        let dot: i128 = self
            .h
            .iter()
            .zip(k.coords())
            .map(|(&hi, &ki)| hi as i128 * ki as i128)
            .sum();
        dot.rem_euclid(self.m as i128) as u64
    }

    pub fn contains(&self, k: &FreqIndex) -> bool {
        assert_eq!(k.dim(), self.h.len(), "frequency dimension mismatch");
        self.residue(k) == 0
    }
}

/// True when no nonzero frequency of `q` lies in the dual lattice, i.e. the
/// cubature rule reproduces `f^(0)` on `T(q)`.
pub fn is_exact_on(dual: &DualLattice, q: &FreqSet) -> bool {
    q.iter().all(|k| k.is_zero() || !dual.contains(k))
}

/// Smallest `prod max(|k_i|, 1)` over nonzero dual vectors, for
/// two-dimensional dual lattices whose first generator coordinate is
/// invertible mod m.
///
/// The scan walks `k_2 = 0, 1, 2, ...`; for each `k_2` the admissible `k_1`
/// form a residue class mod m, of which only the two smallest-magnitude
/// representatives matter. A row is pruned as soon as `k_2` alone reaches the
/// best product found so far, which keeps the scan exact.
pub fn min_product(dual: &DualLattice) -> Result<u64> {
    if dual.h.len() != 2 {
        return Err(Error::InvalidParameter(
            "min_product expects a 2-dimensional dual lattice".into(),
        ));
    }
    let m = dual.m;
    if m == 1 {
        return Ok(1); // every vector is dual; (1, 0) has product 1
    }
    let h1 = dual.h[0].rem_euclid(m as i64) as u64;
    let h1_inv = mod_inverse(h1, m).ok_or_else(|| {
        Error::InvalidParameter(format!("h_1 = {} is not invertible mod {m}", dual.h[0]))
    })?;
    let h2 = dual.h[1].rem_euclid(m as i64) as u64;
    // reduce to k1 ≡ -q k2 (mod m)
    let q = (h1_inv as u128 * h2 as u128 % m as u128) as u64;

    let mut best = m; // row k2 = 0: smallest nonzero |k1| with k1 ≡ 0 is m
    let mut k2 = 1u64;
    while k2 < best {
        let r = (m - (k2 as u128 * q as u128 % m as u128) as u64) % m;
        let k1 = r.min(m - r); // 0 when the row contains (0, k2) itself
        let product = k1.max(1) * k2;
        best = best.min(product);
        k2 += 1;
    }
    Ok(best)
}

fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    // extended Euclid
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

/// One row of a `gamma-scan` report.
#[derive(Clone, Debug, Serialize)]
pub struct GammaScanRow {
    pub n: u32,
    pub b_n: u64,
    pub n_max: u64,
    pub ratio: f64,
}

/// Largest `N` with `Γ(N, 2) ∩ L(n)' = ∅`, i.e. `min_product - 1`.
pub fn fibonacci_n_max(n: u32) -> Result<u64> {
    Ok(min_product(&DualLattice::fibonacci(n)?)? - 1)
}

/// Scans `N_max(n) / b_n` over a range of Fibonacci indices.
pub fn gamma_scan(n_min: u32, n_max: u32) -> Result<Vec<GammaScanRow>> {
    if n_min < 3 || n_max < n_min {
        return Err(Error::InvalidParameter(format!(
            "gamma scan needs 3 <= n_min <= n_max, got [{n_min}, {n_max}]"
        )));
    }
    (n_min..=n_max)
        .map(|n| {
            let b_n = fibonacci_number(n)?;
            let n_max = fibonacci_n_max(n)?;
            Ok(GammaScanRow {
                n,
                b_n,
                n_max,
                ratio: n_max as f64 / b_n as f64,
            })
        })
        .collect()
}

/// Deterministic primality by trial division; moduli stay far below the range
/// where this would hurt.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

fn next_prime(mut n: u64) -> u64 {
    loop {
        if is_prime(n) {
            return n;
        }
        n += 1;
    }
}

/// Result of the Korobov generating-vector search.
#[derive(Clone, Debug, Serialize)]
pub struct KorobovSearch {
    #[serde(rename = "L")]
    pub l: u64,
    pub d: usize,
    #[serde(rename = "cardGamma")]
    pub card_gamma: usize,
    pub m: u64,
    pub h: u64,
    pub verified: bool,
}

impl KorobovSearch {
    pub fn points(&self) -> Result<PointSet> {
        korobov_points_special(self.m, self.h, self.d)
    }

    pub fn dual(&self) -> Result<DualLattice> {
        DualLattice::new(self.m, special_vector(self.m, self.h, self.d))
    }
}

/// Finds the smallest prime `m` with `|Γ(L,d)| < (m-1)/d` and the smallest
/// `h in [1, m)` such that `k_1 + h k_2 + ... + h^(d-1) k_d ≢ 0 (mod m)` for
/// every nonzero `k in Γ(L,d)`. Such an `h` exists for every prime `m`
/// satisfying the cardinality bound; failure aborts with diagnostics rather
/// than silently relaxing `m`.
pub fn korobov_search(l: u64, d: usize) -> Result<KorobovSearch> {
    if l < 1 || d < 2 {
        return Err(Error::InvalidParameter(format!(
            "search needs L >= 1 and d >= 2, got L={l}, d={d}"
        )));
    }
    let gamma = crate::freqsets::build_hyperbolic_cross(l, d)?;
    let card = gamma.len() as u64;
    let m = next_prime(d as u64 * card + 2);

    // residues of each nonzero frequency vector, ready for Horner evaluation
    let nonzero: Vec<&FreqIndex> = gamma.iter().filter(|k| !k.is_zero()).collect();
    'h_loop: for h in 1..m {
        for k in &nonzero {
            let mut t: u64 = 0;
            for &ki in k.coords().iter().rev() {
                let term = (t as u128 * h as u128) as i128 + ki as i128;
                t = term.rem_euclid(m as i128) as u64;
            }
            if t == 0 {
                continue 'h_loop;
            }
        }
        let result = KorobovSearch {
            l,
            d,
            card_gamma: card as usize,
            m,
            h,
            verified: true,
        };
        debug_assert!(is_exact_on(&result.dual()?, &gamma));
        return Ok(result);
    }
    Err(Error::SearchFailed(format!(
        "no admissible h in [1, {m}) for L={l}, d={d}, |Γ|={card}; \
         the cardinality bound |Γ| < (m-1)/d guarantees one exists"
    )))
}
