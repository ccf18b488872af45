//! Irreducible characters of SU(N).
//!
//! A dominant weight is an `(N−1)`-tuple `a` of non-negative coefficients on
//! the fundamental weights; its partition is `λ_i = Σ_{t ≥ i} a_t`. Characters
//! are Schur polynomials in the eigenvalues, evaluated through the
//! Jacobi–Trudi determinant `det(h_{λ_i − i + j})`. The bialternant ratio is
//! kept only as a cross-check.

use num_complex::Complex64;
use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::angle::{self, Angle};
use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::linalg::det_bareiss;
use crate::torus;

/// Tolerance on `Σθ_j ≡ 0 (mod 2π)`.
pub const SU_CONSTRAINT_TOL: f64 = 1e-9;
/// Summands per parallel chunk in the partial sums.
pub const DEFAULT_CHUNK: usize = 4096;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DominantWeight(pub Vec<u32>);

impl DominantWeight {
    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn weight_sum(&self) -> u64 {
        self.0.iter().map(|&a| u64::from(a)).sum()
    }

    /// `λ_i = Σ_{t ≥ i} a_t`, padded with a trailing zero to length N.
    pub fn partition(&self) -> Vec<u64> {
        let mut lambda = vec![0u64; self.rank() + 1];
        for i in (0..self.rank()).rev() {
            lambda[i] = lambda[i + 1] + u64::from(self.0[i]);
        }
        lambda
    }
}

/// `C(n+r, r)`, the number of r-tuples with sum at most n.
pub fn simplex_count(r: usize, n: u64) -> u128 {
    let mut c: u128 = 1;
    for i in 1..=r as u128 {
        // C(n+i, i) = C(n+i-1, i-1) · (n+i) / i, exact at every step
        c = c * (u128::from(n) + i) / i;
    }
    c
}

/// All `r`-tuples of non-negative integers with sum `≤ n`, lexicographically.
pub fn enumerate_dominant_weights(r: usize, n: u64, caps: &Caps) -> Result<Vec<DominantWeight>> {
    if r == 0 {
        return Err(Error::InvalidArgument("rank must be at least 1".into()));
    }
    let count = simplex_count(r, n);
    if count > caps.weights {
        return Err(Error::CapExceeded {
            what: "dominant weights",
            requested: count,
            cap: caps.weights,
        });
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut current = vec![0u32; r];
    fill_weights(&mut current, 0, n, &mut out);
    Ok(out)
}

fn fill_weights(current: &mut Vec<u32>, pos: usize, budget: u64, out: &mut Vec<DominantWeight>) {
    if pos == current.len() {
        out.push(DominantWeight(current.clone()));
        return;
    }
    for v in 0..=budget {
        current[pos] = v as u32;
        fill_weights(current, pos + 1, budget - v, out);
    }
    current[pos] = 0;
}

/// Weyl dimension `∏_{i<j} (λ_i − λ_j + j − i)/(j − i)`, exact.
pub fn weyl_dimension(a: &DominantWeight, n: usize) -> u128 {
    assert_eq!(a.rank() + 1, n, "weight length must be N − 1");
    let lambda = a.partition();
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..n {
        for j in i + 1..n {
            let f = u128::from(lambda[i] - lambda[j]) + (j - i) as u128;
            let g = (j - i) as u128;
            let (fa, ga) = (f / f.gcd(&den), den / f.gcd(&den));
            num *= fa;
            den = ga * g;
            let d = num.gcd(&den);
            num /= d;
            den /= d;
        }
    }
    debug_assert_eq!(den, 1);
    num / den
}

/// Eigenangles of an element of SU(n): `n` of them, summing to 0 mod 2π.
pub fn check_su_angles(theta: &[Angle], n: usize) -> Result<()> {
    if theta.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: theta.len(),
        });
    }
    let total = theta.iter().fold(Angle::zero(), |acc, t| acc.add(t));
    let residual = total.distance(&Angle::zero());
    if residual > SU_CONSTRAINT_TOL {
        return Err(Error::ConstraintViolation(residual));
    }
    Ok(())
}

/// Complete homogeneous symmetric polynomials of fixed eigenvalues.
#[derive(Clone, Debug)]
pub struct SchurEvaluator {
    n: usize,
    h: Vec<Complex64>,
}

impl SchurEvaluator {
    /// Prepares `h_0 … h_{max_degree}` at `e^{iθ_j}` by the generating-function recurrence.
    pub fn new(theta: &[Angle], max_degree: usize) -> Self {
        let mut h = vec![Complex64::new(0.0, 0.0); max_degree + 1];
        h[0] = Complex64::new(1.0, 0.0);
        for t in theta {
            let x = angle::phase(t, 1);
            for k in 1..=max_degree {
                let prev = h[k - 1];
                h[k] += x * prev;
            }
        }
        SchurEvaluator { n: theta.len(), h }
    }

    fn h(&self, k: i64) -> Complex64 {
        if k < 0 {
            Complex64::new(0.0, 0.0)
        } else {
            self.h[k as usize]
        }
    }

    /// Schur polynomial `s_λ` for the weight `a`; needs `max_degree ≥ λ_1 + N`.
    pub fn character(&self, a: &DominantWeight) -> Complex64 {
        debug_assert_eq!(a.rank() + 1, self.n);
        let lambda = a.partition();
        let len = lambda.iter().take_while(|&&l| l > 0).count();
        let m: Vec<Vec<Complex64>> = (0..len)
            .map(|i| {
                (0..len)
                    .map(|j| self.h(lambda[i] as i64 - i as i64 + j as i64))
                    .collect()
            })
            .collect();
        det_bareiss(m)
    }
}

/// `s_λ(e^{iθ_1}, …, e^{iθ_N})`, the character of the irreducible with weight `a`.
pub fn su_character(a: &DominantWeight, theta: &[Angle]) -> Result<Complex64> {
    check_su_angles(theta, a.rank() + 1)?;
    let top = a.partition()[0] as usize + theta.len();
    Ok(SchurEvaluator::new(theta, top).character(a))
}

/// Bialternant `det(x_j^{λ_i + N − i}) / det(x_j^{N − i})`; ill-conditioned
/// when eigenvalues nearly coincide.
pub fn su_character_bialternant(a: &DominantWeight, theta: &[Angle]) -> Result<Complex64> {
    let n = a.rank() + 1;
    check_su_angles(theta, n)?;
    let lambda = a.partition();
    let alternant = |shift: &dyn Fn(usize) -> i64| {
        let m = (0..n)
            .map(|i| theta.iter().map(|t| angle::phase(t, shift(i))).collect())
            .collect();
        det_bareiss(m)
    };
    let top = alternant(&|i| (lambda[i] + (n - 1 - i) as u64) as i64);
    let vandermonde = alternant(&|i| (n - 1 - i) as i64);
    Ok(top / vandermonde)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SUPartialSumReport {
    pub n_size: usize,
    pub depth: u64,
    pub eigenangles: Vec<Angle>,
    /// `Σ_{χ ∈ Irr(G)_n} χ(g)/χ(1)`.
    pub raw: Complex64,
    /// `|Irr(G)_n| = C(n+r, r)`.
    pub irr_count: u128,
    /// `d − r + 1`.
    pub exponent: i32,
    /// `raw / |Irr(G)_n|^{d−r+1}`.
    pub normalized: Complex64,
    /// `1 / |Irr(G)_n|^{d−r}`.
    pub bound: f64,
    pub violates_bound: bool,
    pub chunk_size: usize,
}

/// Reports for every depth `0..=max_depth`, sharing one pass over the weights.
///
/// Summands are grouped by weight-sum; each group is split into fixed chunks
/// that are summed in parallel and then combined pairwise in chunk order, so
/// the result depends only on `chunk_size`.
pub fn su_convergence(
    n_size: usize,
    theta: &[Angle],
    max_depth: u64,
    chunk_size: usize,
    caps: &Caps,
) -> Result<Vec<SUPartialSumReport>> {
    if n_size < 2 {
        return Err(Error::InvalidArgument("SU(N) needs N ≥ 2".into()));
    }
    check_su_angles(theta, n_size)?;
    let chunk_size = chunk_size.max(1);
    let rank = n_size - 1;
    let weights = enumerate_dominant_weights(rank, max_depth, caps)?;
    let evaluator = SchurEvaluator::new(theta, max_depth as usize + n_size);
    let summands: Vec<Complex64> = weights
        .par_iter()
        .map(|a| evaluator.character(a) / weyl_dimension(a, n_size) as f64)
        .collect();

    let mut levels: Vec<Vec<Complex64>> = vec![Vec::new(); max_depth as usize + 1];
    for (a, s) in weights.iter().zip(summands) {
        levels[a.weight_sum() as usize].push(s);
    }
    let level_sums: Vec<Complex64> = levels.iter().map(|l| chunked_sum(l, chunk_size)).collect();

    let dim = (n_size * n_size - 1) as i32;
    let d_minus_r = dim - rank as i32;
    let mut raw = Complex64::new(0.0, 0.0);
    let mut reports = Vec::with_capacity(level_sums.len());
    for (depth, level) in level_sums.into_iter().enumerate() {
        raw += level;
        let count = simplex_count(rank, depth as u64);
        let c = count as f64;
        let scale = c.powi(d_minus_r);
        let normalized = (raw / c) / scale;
        let bound = 1.0 / scale;
        reports.push(SUPartialSumReport {
            n_size,
            depth: depth as u64,
            eigenangles: theta.to_vec(),
            raw,
            irr_count: count,
            exponent: d_minus_r + 1,
            normalized,
            bound,
            violates_bound: normalized.norm() > bound,
            chunk_size,
        });
    }
    Ok(reports)
}

/// Normalized partial sum at a single depth.
pub fn su_partial_sum(n_size: usize, theta: &[Angle], depth: u64, caps: &Caps) -> Result<SUPartialSumReport> {
    let mut all = su_convergence(n_size, theta, depth, DEFAULT_CHUNK, caps)?;
    Ok(all.pop().expect("at least depth 0"))
}

fn chunked_sum(values: &[Complex64], chunk_size: usize) -> Complex64 {
    let partials: Vec<Complex64> = values
        .par_chunks(chunk_size)
        .map(|c| c.iter().sum())
        .collect();
    pairwise_sum(&partials)
}

fn pairwise_sum(values: &[Complex64]) -> Complex64 {
    match values.len() {
        0 => Complex64::new(0.0, 0.0),
        1 => values[0],
        n => pairwise_sum(&values[..n / 2]) + pairwise_sum(&values[n / 2..]),
    }
}

/// One factor of a product of tori and special unitary groups.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LieFactor {
    Torus(usize),
    SpecialUnitary(usize),
}

impl LieFactor {
    pub fn dimension(&self) -> usize {
        match *self {
            LieFactor::Torus(k) => k,
            LieFactor::SpecialUnitary(n) => n * n - 1,
        }
    }

    pub fn rank(&self) -> usize {
        match *self {
            LieFactor::Torus(k) => k,
            LieFactor::SpecialUnitary(n) => n - 1,
        }
    }

    /// Angles describing a point of this factor: k torus angles or N eigenangles.
    pub fn point_len(&self) -> usize {
        match *self {
            LieFactor::Torus(k) => k,
            LieFactor::SpecialUnitary(n) => n,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductPartialSumReport {
    pub factors: Vec<LieFactor>,
    pub depth: u64,
    pub raw: Complex64,
    pub irr_count: u128,
    pub dimension: usize,
    pub rank: usize,
    pub normalized: Complex64,
    pub bound: Option<f64>,
}

/// Partial sum on a product group with every factor truncated at the same depth:
/// box `|m_j| ≤ n` on torus factors, weight-sum `≤ n` on SU factors.
pub fn product_partial_sum(
    factors: &[LieFactor],
    points: &[Vec<Angle>],
    depth: u64,
    caps: &Caps,
) -> Result<ProductPartialSumReport> {
    if factors.len() != points.len() {
        return Err(Error::DimensionMismatch {
            expected: factors.len(),
            got: points.len(),
        });
    }
    let mut raw = Complex64::new(1.0, 0.0);
    let mut count: u128 = 1;
    for (f, p) in factors.iter().zip(points) {
        if p.len() != f.point_len() {
            return Err(Error::DimensionMismatch {
                expected: f.point_len(),
                got: p.len(),
            });
        }
        match *f {
            LieFactor::Torus(k) => {
                raw *= p.iter().map(|t| torus::dirichlet_kernel(t, depth)).product::<f64>();
                count *= u128::from(2 * depth + 1).pow(k as u32);
            }
            LieFactor::SpecialUnitary(n) => {
                let r = su_partial_sum(n, p, depth, caps)?;
                raw *= r.raw;
                count *= r.irr_count;
            }
        }
    }
    let dimension: usize = factors.iter().map(LieFactor::dimension).sum();
    let rank: usize = factors.iter().map(LieFactor::rank).sum();
    let c = count as f64;
    let scale = c.powi((dimension - rank) as i32);
    Ok(ProductPartialSumReport {
        factors: factors.to_vec(),
        depth,
        raw,
        irr_count: count,
        dimension,
        rank,
        normalized: (raw / c) / scale,
        bound: (dimension > rank).then(|| 1.0 / scale),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn w(v: &[u32]) -> DominantWeight {
        DominantWeight(v.to_vec())
    }

    #[test]
    fn enumeration() {
        let caps = Caps::default();
        let su2 = enumerate_dominant_weights(1, 3, &caps).unwrap();
        assert_eq!(su2, vec![w(&[0]), w(&[1]), w(&[2]), w(&[3])]);
        assert_eq!(enumerate_dominant_weights(2, 2, &caps).unwrap().len(), 6);
        assert_eq!(enumerate_dominant_weights(2, 0, &caps).unwrap(), vec![w(&[0, 0])]);
        let small = Caps { weights: 5, ..caps };
        assert!(matches!(enumerate_dominant_weights(2, 2, &small), Err(Error::CapExceeded { .. })));
        let lex = enumerate_dominant_weights(3, 4, &caps).unwrap();
        assert!(lex.windows(2).all(|p| p[0] < p[1]));
        assert_eq!(lex.len() as u128, simplex_count(3, 4));
    }

    #[test]
    fn dimensions() {
        assert_eq!(weyl_dimension(&w(&[3]), 2), 4);
        assert_eq!(weyl_dimension(&w(&[1, 1]), 3), 8);
        assert_eq!(weyl_dimension(&w(&[0, 0, 0]), 4), 1);
        // fundamental representations of SU(4) have dimensions 4, 6, 4
        assert_eq!(weyl_dimension(&w(&[0, 1, 0]), 4), 6);
    }

    #[test]
    fn character_examples() {
        let quarter = [Angle::from_pi_fraction(1, 2), Angle::from_pi_fraction(-1, 2)];
        assert!(su_character(&w(&[1]), &quarter).unwrap().norm() < 1e-15);
        let thirds = [Angle::zero(), Angle::from_pi_fraction(2, 3), Angle::from_pi_fraction(-2, 3)];
        assert!(su_character(&w(&[1, 0]), &thirds).unwrap().norm() < 1e-14);
        let id = [Angle::zero(); 3];
        assert_eq!(su_character(&w(&[2, 1]), &id).unwrap(), Complex64::new(15.0, 0.0));
    }

    #[test]
    fn constraint_violation() {
        let bad = [Angle::radians(0.3), Angle::radians(0.3)];
        assert!(matches!(su_character(&w(&[1]), &bad), Err(Error::ConstraintViolation(_))));
        assert!(matches!(su_character(&w(&[1]), &[Angle::zero()]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn su2_closed_form() {
        for m in 0..12u32 {
            for &t in &[0.3, 1.1, 2.5, PI - 0.01] {
                let theta = [Angle::radians(t), Angle::radians(-t)];
                let v = su_character(&w(&[m]), &theta).unwrap();
                let expect = ((m + 1) as f64 * t).sin() / t.sin();
                assert!((v.re - expect).abs() < 1e-8 && v.im.abs() < 1e-8);
            }
        }
    }

    #[test]
    fn partial_sum_examples() {
        let caps = Caps::default();
        let r = su_partial_sum(2, &[Angle::zero(), Angle::zero()], 9, &caps).unwrap();
        assert!((r.normalized.re - 0.01).abs() < 1e-15);
        let quarter = [Angle::from_pi_fraction(1, 2), Angle::from_pi_fraction(-1, 2)];
        let r = su_partial_sum(2, &quarter, 3, &caps).unwrap();
        assert!((r.raw.re - 2.0 / 3.0).abs() < 1e-14);
        assert!((r.normalized.re - (2.0 / 3.0) / 64.0).abs() < 1e-15);
        let r = su_partial_sum(3, &[Angle::zero(); 3], 2, &caps).unwrap();
        assert_eq!(r.irr_count, 6);
        // d = 8, r = 2: exponent d − r + 1 = 7, so S_2 = 6/6^7
        assert_eq!(r.exponent, 7);
        assert!((r.normalized.re - 6f64.powi(-6)).abs() < 1e-20);
        assert!(!r.violates_bound);
    }

    #[test]
    fn chunking_does_not_change_depth_layout() {
        let caps = Caps::default();
        let theta = [Angle::radians(0.4), Angle::radians(1.3), Angle::radians(-1.7)];
        let a = su_convergence(3, &theta, 12, 7, &caps).unwrap();
        let b = su_convergence(3, &theta, 12, 7, &caps).unwrap();
        assert_eq!(a, b);
        let c = su_convergence(3, &theta, 12, 4096, &caps).unwrap();
        for (x, y) in a.iter().zip(&c) {
            assert!((x.raw - y.raw).norm() < 1e-12);
        }
    }

    #[test]
    fn product_with_torus_factor() {
        let caps = Caps::default();
        let factors = [LieFactor::SpecialUnitary(2), LieFactor::Torus(1)];
        let points = vec![vec![Angle::zero(), Angle::zero()], vec![Angle::zero()]];
        let r = product_partial_sum(&factors, &points, 3, &caps).unwrap();
        // 4 SU(2) weights times 7 torus weights, all summands 1
        assert_eq!(r.irr_count, 28);
        assert_eq!(r.raw, Complex64::new(28.0, 0.0));
        assert_eq!((r.dimension, r.rank), (4, 2));
        assert!((r.normalized.re - 28f64.powi(-2)).abs() < 1e-15);
    }
}
