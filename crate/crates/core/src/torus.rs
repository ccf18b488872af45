//! Characters of the torus T^k and their box-truncated averages.
//!
//! The character with weight `m ∈ Z^k` is `θ ↦ ∏ e^{i m_j θ_j}`. The depth-`n`
//! set is the box `|m_j| ≤ n`, which has `(2n+1)^k` elements, and the average
//! of the characters over it factors into one-dimensional Dirichlet kernels.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::angle::{self, Angle};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TorusWeight(pub Vec<i64>);

impl TorusWeight {
    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

/// `∏_j e^{i m_j θ_j}`.
pub fn torus_character(m: &TorusWeight, theta: &[Angle]) -> Result<Complex64> {
    if m.dim() != theta.len() {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            got: theta.len(),
        });
    }
    Ok(m.0
        .iter()
        .zip(theta)
        .map(|(&mj, t)| angle::phase(t, mj))
        .product())
}

/// `D_n(θ) = Σ_{|m| ≤ n} e^{imθ}`: `sin((n+½)θ)/sin(θ/2)`, or `2n+1` on the lattice.
pub fn dirichlet_kernel(theta: &Angle, n: u64) -> f64 {
    if theta.is_identity() {
        return (2 * n + 1) as f64;
    }
    let (num, den) = match *theta {
        Angle::Turns(t) => {
            // (n+½)θ = (2n+1)·π·t with t in turns; reduce the numerator mod 2·denom
            let q = i128::from(*t.denom());
            let p = (i128::from(*t.numer()) * (2 * n as i128 + 1)).rem_euclid(2 * q);
            let x = PI * p as f64 / q as f64;
            let half = PI * (*t.numer() as f64) / (*t.denom() as f64);
            (x.sin(), half.sin())
        }
        Angle::Radians(x) => (((n as f64 + 0.5) * x).sin(), (x / 2.0).sin()),
    };
    num / den
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusPartialSumReport {
    pub k: usize,
    pub n: u64,
    pub theta: Vec<Angle>,
    pub value: Complex64,
    /// `(2n+1)^k`.
    pub count: u128,
    /// Upper bound on `|value|` from `|D_n(θ)| ≤ 1/|sin(θ/2)|`.
    pub bound: f64,
    /// The limit as `n → ∞`: 1 at the identity, 0 elsewhere.
    pub limit: Option<u8>,
}

/// `(1/(2n+1)^k) Σ_{|m_j| ≤ n} χ_m(θ)` in closed form.
pub fn torus_partial_sum(theta: &[Angle], n: u64) -> TorusPartialSumReport {
    let size = (2 * n + 1) as f64;
    let value: f64 = theta.iter().map(|t| dirichlet_kernel(t, n) / size).product();
    TorusPartialSumReport {
        k: theta.len(),
        n,
        theta: theta.to_vec(),
        value: Complex64::new(value, 0.0),
        count: u128::from(2 * n + 1).pow(theta.len() as u32),
        bound: dirichlet_bound(theta, n),
        limit: torus_limit(theta).ok(),
    }
}

/// `∏_j min(1, 1/((2n+1)|sin(θ_j/2)|))` over the coordinates off the lattice.
pub fn dirichlet_bound(theta: &[Angle], n: u64) -> f64 {
    let size = (2 * n + 1) as f64;
    theta
        .iter()
        .filter(|t| !t.is_identity())
        .map(|t| (1.0 / (size * angle::half_sine(t))).min(1.0))
        .product()
}

/// Limit of the normalized sum: 1 if every coordinate lies on 2πZ, else 0.
pub fn torus_limit(theta: &[Angle]) -> Result<u8> {
    for t in theta {
        if !angle::on_lattice(t)? {
            return Ok(0);
        }
    }
    Ok(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn character_values() {
        let v = torus_character(&TorusWeight(vec![2]), &[Angle::from_pi_fraction(1, 2)]).unwrap();
        assert!((v - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
        let v = torus_character(&TorusWeight(vec![0, 0]), &[Angle::radians(0.3), Angle::radians(2.0)]).unwrap();
        assert_eq!(v, Complex64::new(1.0, 0.0));
        let third = Angle::radians(PI / 3.0);
        let v = torus_character(&TorusWeight(vec![1, -1]), &[third, third]).unwrap();
        assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(matches!(
            torus_character(&TorusWeight(vec![1]), &[third, third]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn partial_sum_examples() {
        assert_eq!(torus_partial_sum(&[Angle::zero(), Angle::zero()], 7).value.re, 1.0);
        let r = torus_partial_sum(&[Angle::from_pi_fraction(1, 1)], 2);
        assert!((r.value.re - 0.2).abs() < 1e-15);
        assert_eq!(r.count, 5);
        let r = torus_partial_sum(&[Angle::from_pi_fraction(2, 3)], 1);
        assert!(r.value.re.abs() < 1e-15);
    }

    #[test]
    fn float_and_exact_kernels_agree() {
        for n in [0u64, 1, 5, 40] {
            let exact = dirichlet_kernel(&Angle::from_turns(2, 7), n);
            let float = dirichlet_kernel(&Angle::radians(4.0 * PI / 7.0), n);
            assert!((exact - float).abs() < 1e-10);
        }
    }

    #[test]
    fn limits() {
        assert_eq!(torus_limit(&[Angle::zero(), Angle::zero()]).unwrap(), 1);
        assert_eq!(torus_limit(&[Angle::from_pi_fraction(1, 1)]).unwrap(), 0);
        assert_eq!(torus_limit(&[Angle::from_pi_fraction(2, 1)]).unwrap(), 1);
        assert!(matches!(torus_limit(&[Angle::radians(3e-13)]), Err(Error::AmbiguousInput(_))));
    }
}
