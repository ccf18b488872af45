//! Haar sampling and hit-ratio estimators.
//!
//! Samples are drawn in fixed-size chunks, each from its own ChaCha stream of
//! the run seed, and hit counts are summed as integers, so a run is
//! reproducible from `(seed, samples, chunk_size)` regardless of thread count.

use std::f64::consts::TAU;
use std::time::Instant;

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::angle::Angle;
use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::fc::FcPoint;
use crate::group::{GroupPoint, GroupSpec};
use crate::openfc::SdPoint;
use crate::weyl::{enumerate_dominant_weights, DominantWeight, SchurEvaluator};

pub const DEFAULT_MC_CHUNK: usize = 8192;

/// One independent random stream of a seeded run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngStream {
    pub seed: u64,
    pub stream: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        RngStream { seed, stream }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

/// Haar-random element of U(n): Ginibre matrix, QR, then the phases of
/// `diag(R)` moved into `Q`.
pub fn haar_unitary<R: Rng>(n: usize, rng: &mut R) -> DMatrix<Complex64> {
    let z = DMatrix::from_fn(n, n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    });
    let qr = z.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Haar-random element of SU(n): a U(n) sample divided by an `n`-th root of
/// its determinant chosen uniformly among the `n` roots.
pub fn haar_special_unitary<R: Rng>(n: usize, rng: &mut R) -> DMatrix<Complex64> {
    let u = haar_unitary(n, rng);
    let det = u.determinant();
    let j = rng.random_range(0..n) as f64;
    let root = Complex64::from_polar(1.0, (det.arg() + TAU * j) / n as f64);
    u / root
}

fn uniform_angle<R: Rng>(rng: &mut R) -> Angle {
    Angle::radians(rng.random::<f64>() * TAU)
}

/// Haar-random element of `spec`.
pub fn haar_sample<R: Rng>(spec: &GroupSpec, rng: &mut R) -> Result<GroupPoint> {
    Ok(match spec {
        GroupSpec::Finite(g) => GroupPoint::Permutation(g.element(rng.random_range(0..g.order())).clone()),
        GroupSpec::Torus(k) => GroupPoint::Torus((0..*k).map(|_| uniform_angle(rng)).collect()),
        GroupSpec::SpecialUnitary(0) => return Err(Error::UnsupportedSpec("SU(0)".into())),
        GroupSpec::SpecialUnitary(n) => GroupPoint::SpecialUnitary(haar_special_unitary(*n, rng)),
        GroupSpec::Product(parts) => {
            GroupPoint::Product(parts.iter().map(|p| haar_sample(p, rng)).collect::<Result<_>>()?)
        }
        GroupSpec::FcQuotient(g) => GroupPoint::Coset(FcPoint {
            torus: (0..g.torus_dim()).map(|_| uniform_angle(rng)).collect(),
            delta: rng.random_range(0..g.delta().order()),
        }),
        GroupSpec::Semidirect(g) => GroupPoint::Semidirect(SdPoint {
            torus: (0..g.torus_dim()).map(|_| uniform_angle(rng)).collect(),
            phi: rng.random_range(0..g.phi().order()),
        }),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MCEstimate {
    pub estimate: f64,
    /// `√(p̂(1−p̂)/n)`.
    pub std_error: f64,
    pub samples: u64,
    pub hits: u64,
    pub seed: u64,
    /// Ball radius; absent when hits are decided by exact equality.
    pub epsilon: Option<f64>,
    pub metric: String,
    pub group_digest: String,
    pub chunk_size: usize,
    pub wall_time: f64,
}

impl MCEstimate {
    /// `|a − b| / √(σ_a² + σ_b²)`.
    pub fn z_score(&self, other: &MCEstimate) -> f64 {
        let sigma = (self.std_error.powi(2) + other.std_error.powi(2)).sqrt();
        let diff = (self.estimate - other.estimate).abs();
        if sigma == 0.0 {
            if diff == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            diff / sigma
        }
    }
}

/// Counts pairs `(x, y)` of Haar samples with `hit([x, y])`.
fn count_hits<F>(spec: &GroupSpec, samples: u64, seed: u64, chunk: usize, hit: F) -> Result<u64>
where
    F: Fn(&GroupPoint) -> bool + Sync,
{
    let chunk = chunk.max(1) as u64;
    let chunks = samples.div_ceil(chunk);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = RngStream::new(seed, c).rng();
            let len = chunk.min(samples - c * chunk);
            let mut hits = 0u64;
            for _ in 0..len {
                let x = haar_sample(spec, &mut rng)?;
                let y = haar_sample(spec, &mut rng)?;
                if hit(&spec.commutator_unchecked(&x, &y)) {
                    hits += 1;
                }
            }
            Ok(hits)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))
}

fn finish(spec: &GroupSpec, hits: u64, samples: u64, seed: u64, epsilon: Option<f64>, chunk: usize, start: Instant) -> MCEstimate {
    let p = hits as f64 / samples as f64;
    MCEstimate {
        estimate: p,
        std_error: (p * (1.0 - p) / samples as f64).sqrt(),
        samples,
        hits,
        seed,
        epsilon,
        metric: spec.metric_name(),
        group_digest: spec.digest(),
        chunk_size: chunk,
        wall_time: start.elapsed().as_secs_f64(),
    }
}

/// Fraction of Haar pairs that commute. Exact specs test `[x,y] = e` by
/// equality and ignore `epsilon`; the others test `d([x,y], e) < epsilon`.
pub fn estimate_commuting_probability(
    spec: &GroupSpec,
    samples: u64,
    seed: u64,
    epsilon: f64,
    chunk: usize,
) -> Result<MCEstimate> {
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be at least 1".into()));
    }
    let start = Instant::now();
    let e = spec.identity();
    let exact = spec.is_exact();
    if !exact && !(epsilon > 0.0) {
        return Err(Error::InvalidArgument("epsilon must be positive".into()));
    }
    let hits = count_hits(spec, samples, seed, chunk, |c| {
        let d = spec.distance_unchecked(c, &e);
        if exact {
            d == 0.0
        } else {
            d < epsilon
        }
    })?;
    Ok(finish(spec, hits, samples, seed, (!exact).then_some(epsilon), chunk, start))
}

/// Fraction of Haar pairs whose commutator lies within `epsilon` of `g`.
pub fn estimate_ball_fiber(
    spec: &GroupSpec,
    g: &GroupPoint,
    epsilon: f64,
    samples: u64,
    seed: u64,
    chunk: usize,
) -> Result<MCEstimate> {
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be at least 1".into()));
    }
    if !(epsilon > 0.0) {
        return Err(Error::InvalidArgument("epsilon must be positive".into()));
    }
    if !spec.contains(g) {
        return Err(Error::SpecMismatch(format!("{} is not an element of {}", spec.format_point(g), spec.describe())));
    }
    let start = Instant::now();
    let hits = count_hits(spec, samples, seed, chunk, |c| spec.distance_unchecked(c, g) < epsilon)?;
    Ok(finish(spec, hits, samples, seed, Some(epsilon), chunk, start))
}

/// Ball estimates at each radius, the `i`-th drawn with seed `seed + i`.
pub fn ball_decay(
    spec: &GroupSpec,
    g: &GroupPoint,
    epsilons: &[f64],
    samples: u64,
    seed: u64,
    chunk: usize,
) -> Result<Vec<MCEstimate>> {
    epsilons
        .iter()
        .enumerate()
        .map(|(i, &eps)| estimate_ball_fiber(spec, g, eps, samples, seed.wrapping_add(i as u64), chunk))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConjugationCheck {
    pub original: MCEstimate,
    pub conjugated: MCEstimate,
    pub z: f64,
    pub passed: bool,
}

/// Ball estimates at `g` and `hgh⁻¹` from independent seeds, compared within
/// three combined standard errors.
pub fn conjugation_invariance(
    spec: &GroupSpec,
    g: &GroupPoint,
    h: &GroupPoint,
    epsilon: f64,
    samples: u64,
    seed: u64,
    chunk: usize,
) -> Result<ConjugationCheck> {
    let conj = spec.conjugate(h, g)?;
    let original = estimate_ball_fiber(spec, g, epsilon, samples, seed, chunk)?;
    let conjugated = estimate_ball_fiber(spec, &conj, epsilon, samples, seed.wrapping_add(1), chunk)?;
    let z = original.z_score(&conjugated);
    Ok(ConjugationCheck {
        original,
        conjugated,
        z,
        passed: z <= 3.0,
    })
}

/// Eigenangles of a unitary matrix from its complex Schur form.
pub fn eigenangles(u: &DMatrix<Complex64>) -> Result<Vec<Angle>> {
    let schur = Schur::try_new(u.clone(), 1e-14, 10_000)
        .ok_or_else(|| Error::DegenerateSpectrum(u.nrows()))?;
    let values = schur
        .eigenvalues()
        .ok_or_else(|| Error::DegenerateSpectrum(u.nrows()))?;
    Ok(values.iter().map(|z| Angle::radians(z.arg())).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrthogonalityEntry {
    pub a: DominantWeight,
    pub b: DominantWeight,
    /// Sample mean of `χ_a(U)·conj(χ_b(U))`.
    pub mean: Complex64,
    /// Standard error of the complex mean, `√(E|X − X̄|²/n)`.
    pub std_error: f64,
    pub expected: f64,
    pub passed: bool,
}

/// Empirical `E[χ_a conj(χ_b)]` over Haar samples of SU(n) for every pair of
/// weights with weight-sum at most `max_weight_sum`.
pub fn character_orthogonality(
    n: usize,
    max_weight_sum: u64,
    samples: u64,
    seed: u64,
    chunk: usize,
) -> Result<Vec<OrthogonalityEntry>> {
    if n < 2 || samples < 2 {
        return Err(Error::InvalidArgument("needs n ≥ 2 and at least 2 samples".into()));
    }
    let weights = enumerate_dominant_weights(n - 1, max_weight_sum, &Caps::default())?;
    let w = weights.len();
    let top = max_weight_sum as usize + n;
    let chunk = chunk.max(1) as u64;
    let chunks = samples.div_ceil(chunk);
    // per chunk: Σ X and Σ |X|² for each pair, reduced in chunk order
    let partials: Vec<(Vec<Complex64>, Vec<f64>)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = RngStream::new(seed, c).rng();
            let len = chunk.min(samples - c * chunk);
            let mut sum = vec![Complex64::new(0.0, 0.0); w * w];
            let mut sq = vec![0.0; w * w];
            for _ in 0..len {
                let u = haar_special_unitary(n, &mut rng);
                let theta = eigenangles(&u)?;
                let eval = SchurEvaluator::new(&theta, top);
                let chi: Vec<Complex64> = weights.iter().map(|a| eval.character(a)).collect();
                for i in 0..w {
                    for j in 0..w {
                        let x = chi[i] * chi[j].conj();
                        sum[i * w + j] += x;
                        sq[i * w + j] += x.norm_sqr();
                    }
                }
            }
            Ok((sum, sq))
        })
        .collect::<Result<_>>()?;
    let mut sum = vec![Complex64::new(0.0, 0.0); w * w];
    let mut sq = vec![0.0; w * w];
    for (s, q) in partials {
        for k in 0..w * w {
            sum[k] += s[k];
            sq[k] += q[k];
        }
    }
    let count = samples as f64;
    let mut entries = Vec::with_capacity(w * w);
    for i in 0..w {
        for j in 0..w {
            let mean = sum[i * w + j] / count;
            let var = (sq[i * w + j] / count - mean.norm_sqr()).max(0.0) * count / (count - 1.0);
            let std_error = (var / count).sqrt();
            let expected = if i == j { 1.0 } else { 0.0 };
            let passed = (mean - expected).norm() <= 3.0 * std_error + 1e-9;
            entries.push(OrthogonalityEntry {
                a: weights[i].clone(),
                b: weights[j].clone(),
                mean,
                std_error,
                expected,
                passed,
            });
        }
    }
    Ok(entries)
}
