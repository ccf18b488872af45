//! Compact Lie FC groups presented as `(T^k × Δ)/N`.
//!
//! `Δ` is a finite permutation group and `N` a finite subgroup of `T^k × Δ`
//! embedded diagonally: both projections of `N` are injective and its `Δ`-parts
//! are central. Points of the quotient are stored by a representative in the
//! cover, canonicalized to the smallest element of its `N`-orbit.
//!
//! Characters of the quotient are the pairs `(η, m)` of a `Δ`-character and a
//! torus weight that are trivial on `N`. Fiber measures are computed two ways:
//! the truncated character sum and the exact decomposition over `N`.

use std::cmp::Ordering;
use std::sync::Arc;

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::angle::{self, Angle};
use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::finite::{self, CharacterTable, FiniteGroup};
use crate::torus::{self, TorusWeight};

/// Tolerance for `λ_χ(n) = 1` in the descent test.
const DESCENT_TOL: f64 = 1e-6;
/// Largest imaginary part tolerated in a fiber measure.
pub const REALITY_TOL: f64 = 1e-9;

/// An element of `N`: exact torus coordinates (in turns) and an index into `Δ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NElement {
    pub torus: Vec<Rational64>,
    pub delta: usize,
}

/// A representative in `T^k × Δ` of a point of the quotient.
#[derive(Clone, Debug, PartialEq)]
pub struct FcPoint {
    pub torus: Vec<Angle>,
    pub delta: usize,
}

#[derive(Debug)]
pub struct FcGroup {
    torus_dim: usize,
    delta: Arc<FiniteGroup>,
    n: Vec<NElement>,
    /// `η(δ_n)/η(1)` for every character row and element of `N`.
    central_scalars: Vec<Vec<Complex64>>,
}

/// Validates `N` and builds the quotient `(T^k × Δ)/N`.
///
/// An empty `N` means the trivial subgroup.
pub fn build_fc_group(torus_dim: usize, delta: Arc<FiniteGroup>, n: Vec<(Vec<Angle>, usize)>) -> Result<FcGroup> {
    let mut elements: Vec<NElement> = Vec::with_capacity(n.len().max(1));
    for (t, d) in n {
        if t.len() != torus_dim {
            return Err(Error::DimensionMismatch {
                expected: torus_dim,
                got: t.len(),
            });
        }
        if d >= delta.order() {
            return Err(Error::NotASubgroup(format!("Δ index {d} out of range")));
        }
        let torus = t
            .iter()
            .map(|a| {
                a.as_turns().ok_or_else(|| {
                    Error::NotASubgroup(format!("torus coordinate {a} is not a rational multiple of 2π"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let e = NElement { torus, delta: d };
        if !elements.contains(&e) {
            elements.push(e);
        }
    }
    let identity = NElement {
        torus: vec![Rational64::zero(); torus_dim],
        delta: delta.identity(),
    };
    if elements.is_empty() {
        elements.push(identity.clone());
    }
    if !elements.contains(&identity) {
        return Err(Error::NotASubgroup("the identity is missing".into()));
    }
    for a in &elements {
        for b in &elements {
            let prod = n_mul(&delta, a, b);
            if !elements.contains(&prod) {
                return Err(Error::NotASubgroup(format!(
                    "product of {} and {} is not in N",
                    describe_n(&delta, a),
                    describe_n(&delta, b)
                )));
            }
        }
    }
    for e in &elements {
        if !delta.is_central(e.delta) {
            return Err(Error::NotCentral(format!(
                "Δ-part {} of {} is not central",
                delta.element(e.delta),
                describe_n(&delta, e)
            )));
        }
    }
    for (i, a) in elements.iter().enumerate() {
        for b in &elements[i + 1..] {
            if a.torus == b.torus {
                return Err(Error::NotDiagonal(format!(
                    "{} and {} share a torus part",
                    describe_n(&delta, a),
                    describe_n(&delta, b)
                )));
            }
            if a.delta == b.delta {
                return Err(Error::NotDiagonal(format!(
                    "{} and {} share a Δ-part",
                    describe_n(&delta, a),
                    describe_n(&delta, b)
                )));
            }
        }
    }
    elements.sort_by(|a, b| a.torus.cmp(&b.torus).then(a.delta.cmp(&b.delta)));

    let table = delta.character_table()?;
    let central_scalars = (0..table.len())
        .map(|row| {
            elements
                .iter()
                .map(|e| table.value(row, delta.class_of(e.delta)) / table.degree(row) as f64)
                .collect()
        })
        .collect();
    Ok(FcGroup {
        torus_dim,
        delta,
        n: elements,
        central_scalars,
    })
}

fn n_mul(delta: &FiniteGroup, a: &NElement, b: &NElement) -> NElement {
    NElement {
        torus: a
            .torus
            .iter()
            .zip(&b.torus)
            .map(|(x, y)| Angle::turns(x + y).as_turns().unwrap())
            .collect(),
        delta: delta.mul(a.delta, b.delta),
    }
}

fn describe_n(delta: &FiniteGroup, e: &NElement) -> String {
    let t: Vec<String> = e.torus.iter().map(|x| x.to_string()).collect();
    format!("([{}], {})", t.join(", "), delta.element(e.delta))
}

fn cmp_points(a: &FcPoint, b: &FcPoint) -> Ordering {
    a.torus
        .iter()
        .zip(&b.torus)
        .map(|(x, y)| x.canonical_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
        .then(a.delta.cmp(&b.delta))
}

/// A character `(η, m)` of the quotient.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FcCharacter {
    /// Row of the `Δ` character table.
    pub eta: usize,
    pub m: TorusWeight,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FcCharacterSet {
    pub depth: u64,
    pub characters: Vec<FcCharacter>,
    /// `|Irr(Δ)|·(2t+1)^k/|N|`.
    pub expected_count: f64,
    /// Whether the descended count equals `expected_count` exactly.
    pub evenly_distributed: bool,
}

impl FcGroup {
    pub fn torus_dim(&self) -> usize {
        self.torus_dim
    }

    pub fn delta(&self) -> &Arc<FiniteGroup> {
        &self.delta
    }

    pub fn n_elements(&self) -> &[NElement] {
        &self.n
    }

    pub fn n_order(&self) -> usize {
        self.n.len()
    }

    fn table(&self) -> &CharacterTable {
        self.delta.character_table().expect("validated at construction")
    }

    pub fn identity(&self) -> FcPoint {
        FcPoint {
            torus: vec![Angle::zero(); self.torus_dim],
            delta: self.delta.identity(),
        }
    }

    pub fn contains(&self, p: &FcPoint) -> bool {
        p.torus.len() == self.torus_dim && p.delta < self.delta.order()
    }

    /// `h·n` for the `i`-th element of `N`.
    pub fn shift(&self, p: &FcPoint, i: usize) -> FcPoint {
        let n = &self.n[i];
        FcPoint {
            torus: p
                .torus
                .iter()
                .zip(&n.torus)
                .map(|(a, t)| a.add(&Angle::turns(*t)))
                .collect(),
            delta: self.delta.mul(p.delta, n.delta),
        }
    }

    /// Smallest element of the `N`-orbit of the representative.
    pub fn canonicalize(&self, p: &FcPoint) -> FcPoint {
        (0..self.n.len())
            .map(|i| self.shift(p, i))
            .min_by(cmp_points)
            .expect("N is non-empty")
    }

    pub fn mul(&self, a: &FcPoint, b: &FcPoint) -> FcPoint {
        self.canonicalize(&FcPoint {
            torus: a.torus.iter().zip(&b.torus).map(|(x, y)| x.add(y)).collect(),
            delta: self.delta.mul(a.delta, b.delta),
        })
    }

    pub fn inverse(&self, a: &FcPoint) -> FcPoint {
        self.canonicalize(&FcPoint {
            torus: a.torus.iter().map(Angle::neg).collect(),
            delta: self.delta.inv(a.delta),
        })
    }

    /// The torus is central, so only the `Δ`-parts contribute.
    pub fn commutator(&self, a: &FcPoint, b: &FcPoint) -> FcPoint {
        self.canonicalize(&FcPoint {
            torus: vec![Angle::zero(); self.torus_dim],
            delta: self.delta.commutator(a.delta, b.delta),
        })
    }

    /// Product metric on the cover, minimized over the `N`-orbit.
    pub fn distance(&self, a: &FcPoint, b: &FcPoint) -> f64 {
        // shifting either side keeps the result exactly symmetric in floats
        self.shifted_distance(a, b).min(self.shifted_distance(b, a))
    }

    fn shifted_distance(&self, a: &FcPoint, b: &FcPoint) -> f64 {
        (0..self.n.len())
            .map(|i| {
                let bn = self.shift(b, i);
                let torus = a
                    .torus
                    .iter()
                    .zip(&bn.torus)
                    .map(|(x, y)| x.distance(y))
                    .fold(0.0, f64::max);
                let finite = if a.delta == bn.delta { 0.0 } else { 1.0 };
                torus.max(finite)
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn same_point(&self, a: &FcPoint, b: &FcPoint) -> bool {
        (0..self.n.len()).any(|i| {
            let bn = self.shift(b, i);
            bn.delta == a.delta && bn.torus == a.torus
        })
    }

    /// `λ_{(η,m)}(n) = η(δ_n)/η(1) · e^{2πi m·t_n}` is 1 on every element of `N`.
    pub fn descends(&self, eta: usize, m: &TorusWeight) -> bool {
        self.n.iter().enumerate().all(|(i, n)| {
            let phase: Complex64 = m
                .0
                .iter()
                .zip(&n.torus)
                .map(|(&mj, t)| angle::phase(&Angle::Turns(*t), mj))
                .product();
            (self.central_scalars[eta][i] * phase - 1.0).norm() < DESCENT_TOL
        })
    }

    /// `χ(g)/χ(1)` for the character `(η, m)` at a representative.
    pub fn normalized_character(&self, c: &FcCharacter, p: &FcPoint) -> Complex64 {
        let table = self.table();
        let eta = table.value(c.eta, self.delta.class_of(p.delta)) / table.degree(c.eta) as f64;
        let torus: Complex64 = c
            .m
            .0
            .iter()
            .zip(&p.torus)
            .map(|(&mj, t)| angle::phase(t, mj))
            .product();
        eta * torus
    }

    /// All characters of the quotient with `|m_j| ≤ depth`.
    pub fn enumerate_characters(&self, depth: u64) -> FcCharacterSet {
        let table = self.table();
        let mut characters = Vec::new();
        let side = 2 * depth as i64 + 1;
        let total = (side as u128).pow(self.torus_dim as u32);
        for eta in 0..table.len() {
            for idx in 0..total {
                let mut rest = idx;
                let m: Vec<i64> = (0..self.torus_dim)
                    .map(|_| {
                        let v = (rest % side as u128) as i64 - depth as i64;
                        rest /= side as u128;
                        v
                    })
                    .rev()
                    .collect();
                let m = TorusWeight(m);
                if self.descends(eta, &m) {
                    characters.push(FcCharacter { eta, m });
                }
            }
        }
        let expected_count = (table.len() as u128 * total) as f64 / self.n.len() as f64;
        FcCharacterSet {
            depth,
            evenly_distributed: characters.len() as f64 == expected_count,
            characters,
            expected_count,
        }
    }

    /// `(|N|/|Δ|) · (1/(2t+1)^k) Σ_{χ ∈ Irr(G)_t} χ(g0)/χ(1)` at finite depth `t`.
    pub fn fiber_formula(&self, g0: &FcPoint, depth: u64) -> Result<f64> {
        let chars = self.enumerate_characters(depth);
        let sum: Complex64 = chars
            .characters
            .iter()
            .map(|c| self.normalized_character(c, g0))
            .sum();
        let torus_count = ((2 * depth + 1) as f64).powi(self.torus_dim as i32);
        let value = sum * (self.n.len() as f64 / self.delta.order() as f64) / torus_count;
        if value.im.abs() > REALITY_TOL {
            return Err(Error::NonRealResult(value.im));
        }
        Ok(value.re)
    }

    /// `Σ_{n ∈ N} [torus part of h0·n is trivial] · f_Δ(Δ-part of h0·n)/|Δ|²`.
    ///
    /// A float torus coordinate counts as trivial only when it is exactly 0.
    pub fn fiber_exact(&self, g0: &FcPoint, caps: &Caps) -> Result<Rational64> {
        let order = self.delta.order() as i64;
        let mut total = Rational64::zero();
        for i in 0..self.n.len() {
            let h = self.shift(g0, i);
            if h.torus.iter().all(Angle::is_identity) {
                let f = finite::brute_force_fiber(&self.delta, h.delta, caps)?;
                total += Rational64::new(f as i64, order * order);
            }
        }
        Ok(total)
    }

    /// `C` with `|fiber_formula(g0, t) − fiber_exact(g0)| ≤ C/(2t+1)` for all `t`.
    ///
    /// Each `n ∈ N` whose shifted torus part is nontrivial leaves a Dirichlet
    /// tail weighted by `f_Δ(δ0·δ_n)/|Δ|²`.
    pub fn convergence_constant(&self, g0: &FcPoint, caps: &Caps) -> Result<f64> {
        let order = self.delta.order() as f64;
        let mut c = 0.0;
        for i in 0..self.n.len() {
            let h = self.shift(g0, i);
            if h.torus.iter().all(Angle::is_identity) {
                continue;
            }
            let f = finite::brute_force_fiber(&self.delta, h.delta, caps)? as f64;
            if f == 0.0 {
                continue;
            }
            let tail = h
                .torus
                .iter()
                .filter(|t| !t.is_identity())
                .map(|t| 1.0 / angle::half_sine(t))
                .fold(f64::INFINITY, f64::min);
            c += f / (order * order) * tail;
        }
        Ok(c)
    }

    /// Points where the truncated sum carries no Dirichlet tail, so formula and
    /// exact value agree at every depth: each `N`-shift of the representative
    /// either has trivial torus part or a `Δ`-part outside the commutator image.
    pub fn is_torus_trivial(&self, g0: &FcPoint, caps: &Caps) -> Result<bool> {
        Ok(self.convergence_constant(g0, caps)? == 0.0)
    }

    /// `(1/|Δ|) Σ_η η(δ)/η(1)`, the finite-group factor of the formula for trivial `N`.
    pub fn delta_average(&self, delta: usize) -> f64 {
        let table = self.table();
        let class = self.delta.class_of(delta);
        let s: Complex64 = (0..table.len())
            .map(|r| table.value(r, class) / table.degree(r) as f64)
            .sum();
        s.re / self.delta.order() as f64
    }

    /// Torus factor for trivial `N`: the box average of torus characters.
    pub fn torus_average(&self, g0: &FcPoint, depth: u64) -> f64 {
        torus::torus_partial_sum(&g0.torus, depth).value.re
    }

    pub fn describe(&self) -> String {
        let n: Vec<String> = self.n.iter().map(|e| describe_n(&self.delta, e)).collect();
        format!(
            "fc(torus_dim={},delta={},N=[{}])",
            self.torus_dim,
            self.delta.describe(),
            n.join(",")
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite::{builtin, q8_unit};

    fn q8_circle() -> FcGroup {
        build_fc_group(1, Arc::new(builtin("Q8").unwrap()), vec![]).unwrap()
    }

    fn circle_mod_diagonal() -> FcGroup {
        let z2 = Arc::new(builtin("Z2").unwrap());
        let s = 1 - z2.identity();
        build_fc_group(
            1,
            z2.clone(),
            vec![(vec![Angle::zero()], z2.identity()), (vec![Angle::from_turns(1, 2)], s)],
        )
        .unwrap()
    }

    fn q8_point(g: &FcGroup, name: &str, torus: Angle) -> FcPoint {
        FcPoint {
            torus: vec![torus],
            delta: g.delta().index_of(&q8_unit(name).unwrap()).unwrap(),
        }
    }

    #[test]
    fn validation_errors() {
        let s3 = Arc::new(builtin("S3").unwrap());
        let t = s3.parse_element("(0 1)").unwrap();
        let r = build_fc_group(1, s3.clone(), vec![(vec![Angle::zero()], s3.identity()), (vec![Angle::from_turns(1, 2)], t)]);
        assert!(matches!(r, Err(Error::NotCentral(_))));

        let z2 = Arc::new(builtin("Z2").unwrap());
        let s = 1 - z2.identity();
        let missing_identity = build_fc_group(1, z2.clone(), vec![(vec![Angle::from_turns(1, 2)], s)]);
        assert!(matches!(missing_identity, Err(Error::NotASubgroup(_))));

        let not_closed = build_fc_group(
            1,
            z2.clone(),
            vec![(vec![Angle::zero()], z2.identity()), (vec![Angle::from_turns(1, 3)], s)],
        );
        assert!(matches!(not_closed, Err(Error::NotASubgroup(_))));

        let torus_only = build_fc_group(
            1,
            z2.clone(),
            vec![(vec![Angle::zero()], z2.identity()), (vec![Angle::from_turns(1, 2)], z2.identity())],
        );
        assert!(matches!(torus_only, Err(Error::NotDiagonal(_))));

        let float = build_fc_group(1, z2.clone(), vec![(vec![Angle::radians(0.5)], z2.identity())]);
        assert!(matches!(float, Err(Error::NotASubgroup(_))));
    }

    #[test]
    fn character_counts() {
        assert_eq!(q8_circle().enumerate_characters(1).characters.len(), 15);
        let set = circle_mod_diagonal().enumerate_characters(1);
        assert_eq!(set.characters.len(), 3);
        assert!(set.evenly_distributed);
        let g = circle_mod_diagonal();
        for t in [0u64, 2, 5] {
            let set = g.enumerate_characters(t);
            assert_eq!(set.characters.len() as u64, 2 * t + 1);
            assert!(set.characters.iter().any(|c| c.eta == 0 && c.m.0.iter().all(|&x| x == 0)));
        }
    }

    #[test]
    fn q8_circle_values() {
        let g = q8_circle();
        let caps = Caps::default();
        let minus_one = q8_point(&g, "-1", Angle::zero());
        let i = q8_point(&g, "i", Angle::zero());
        let e = g.identity();
        for t in [0u64, 3, 50] {
            assert!((g.fiber_formula(&minus_one, t).unwrap() - 0.375).abs() < 1e-12);
            assert!(g.fiber_formula(&i, t).unwrap().abs() < 1e-12);
            assert!((g.fiber_formula(&e, t).unwrap() - 0.625).abs() < 1e-12);
        }
        assert_eq!(g.fiber_exact(&minus_one, &caps).unwrap(), Rational64::new(3, 8));
        assert_eq!(g.fiber_exact(&e, &caps).unwrap(), Rational64::new(5, 8));
        assert_eq!(g.fiber_exact(&i, &caps).unwrap(), Rational64::zero());
    }

    #[test]
    fn torus_shift_decays() {
        let g = q8_circle();
        let caps = Caps::default();
        let p = q8_point(&g, "1", Angle::from_turns(1, 5));
        assert_eq!(g.fiber_exact(&p, &caps).unwrap(), Rational64::zero());
        let c = g.convergence_constant(&p, &caps).unwrap();
        assert!(c > 0.0);
        for t in [1u64, 10, 100] {
            assert!(g.fiber_formula(&p, t).unwrap().abs() <= c / (2 * t + 1) as f64 + 1e-12);
        }
        let irrational = q8_point(&g, "1", Angle::radians(1.0));
        assert_eq!(g.fiber_exact(&irrational, &caps).unwrap(), Rational64::zero());
    }

    #[test]
    fn diagonal_quotient_is_a_circle() {
        let g = circle_mod_diagonal();
        let caps = Caps::default();
        let e = g.identity();
        assert_eq!(g.fiber_exact(&e, &caps).unwrap(), Rational64::from_integer(1));
        for t in [0u64, 1, 7] {
            assert!((g.fiber_formula(&e, t).unwrap() - 1.0).abs() < 1e-12);
        }
        assert!(g.is_torus_trivial(&e, &caps).unwrap());
        // (0, s) is the half-turn of the circle, a nontrivial point
        let half = FcPoint { torus: vec![Angle::zero()], delta: 1 - g.delta().identity() };
        assert!(!g.is_torus_trivial(&half, &caps).unwrap());
        assert_eq!(g.fiber_exact(&half, &caps).unwrap(), Rational64::zero());
        assert!(g.same_point(&half, &FcPoint { torus: vec![Angle::from_turns(1, 2)], delta: g.delta().identity() }));
    }

    #[test]
    fn canonical_form_is_idempotent() {
        let g = circle_mod_diagonal();
        let p = FcPoint { torus: vec![Angle::from_turns(3, 4)], delta: 1 - g.delta().identity() };
        let c = g.canonicalize(&p);
        assert_eq!(g.canonicalize(&c), c);
        assert_eq!(c.torus[0], Angle::from_turns(1, 4));
        assert_eq!(g.distance(&p, &c), 0.0);
    }
}
