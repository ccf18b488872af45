//! Split extensions `T^k ⋊ Φ` of a torus by a finite group acting through
//! integer matrices, with multiplication `(t,φ)(s,ψ) = (t + A_φ s, φψ)`.
//!
//! The FC-centre is `T^k ⋊ Φ₀` where `Φ₀` is the kernel of the action. It is
//! open of index `|Φ|/|Φ₀|`, and since `Φ₀` acts trivially it is the direct
//! product `T^k × Φ₀`, an FC group handled by [`crate::fc`].

use std::collections::VecDeque;
use std::sync::Arc;

use num_rational::Rational64;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::angle::Angle;
use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::fc::{build_fc_group, FcGroup, FcPoint};
use crate::finite::{enumerate_group, FiniteGroup};
use crate::linalg::IntMatrix;
use crate::perm::Perm;

/// Tolerance for commutator identities checked in floating point.
pub const WITNESS_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SdPoint {
    pub torus: Vec<Angle>,
    /// Index into `Φ`.
    pub phi: usize,
}

#[derive(Debug)]
pub struct SemidirectGroup {
    k: usize,
    phi: Arc<FiniteGroup>,
    action: Vec<IntMatrix>,
    kernel: Vec<usize>,
    centre: FcGroup,
}

/// `A·t` on the torus.
fn act(a: &IntMatrix, t: &[Angle]) -> Vec<Angle> {
    (0..a.size())
        .map(|i| {
            t.iter()
                .enumerate()
                .fold(Angle::zero(), |acc, (j, tj)| acc.add(&tj.scale(a.get(i, j))))
        })
        .collect()
}

/// Builds the extension from the action of some elements of `Φ`, which must
/// generate it; the action on the rest follows from the homomorphism property.
pub fn build_semidirect(k: usize, phi: Arc<FiniteGroup>, generator_action: &[(Perm, IntMatrix)]) -> Result<SemidirectGroup> {
    let mut gens = Vec::with_capacity(generator_action.len());
    for (p, m) in generator_action {
        if m.size() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                got: m.size(),
            });
        }
        if m.det().abs() != 1 {
            return Err(Error::NotUnimodular(format!("action of {p} has determinant {}", m.det())));
        }
        let idx = phi
            .index_of(p)
            .ok_or_else(|| Error::NotAHomomorphism(format!("{p} is not an element of Φ")))?;
        gens.push((idx, m.clone()));
    }

    let order = phi.order();
    let mut action: Vec<Option<IntMatrix>> = vec![None; order];
    action[phi.identity()] = Some(IntMatrix::identity(k));
    let mut queue = VecDeque::from([phi.identity()]);
    while let Some(x) = queue.pop_front() {
        let ax = action[x].clone().expect("queued elements are assigned");
        for (g, ag) in &gens {
            let y = phi.mul(*g, x);
            let ay = ag.mul(&ax);
            match &action[y] {
                Some(existing) if *existing != ay => {
                    return Err(Error::NotAHomomorphism(format!(
                        "two products give different matrices for {}",
                        phi.element(y)
                    )))
                }
                Some(_) => {}
                None => {
                    action[y] = Some(ay);
                    queue.push_back(y);
                }
            }
        }
    }
    let action: Vec<IntMatrix> = action
        .into_iter()
        .enumerate()
        .map(|(i, a)| {
            a.ok_or_else(|| {
                Error::NotAHomomorphism(format!("the action does not determine a matrix for {}", phi.element(i)))
            })
        })
        .collect::<Result<_>>()?;
    for x in 0..order {
        for y in 0..order {
            if action[phi.mul(x, y)] != action[x].mul(&action[y]) {
                return Err(Error::NotAHomomorphism(format!(
                    "A({}·{}) differs from A({})·A({})",
                    phi.element(x),
                    phi.element(y),
                    phi.element(x),
                    phi.element(y)
                )));
            }
        }
    }

    let kernel: Vec<usize> = (0..order).filter(|&i| action[i].is_identity()).collect();
    let kernel_gens: Vec<Perm> = kernel.iter().map(|&i| phi.element(i).clone()).collect();
    let kernel_group = Arc::new(enumerate_group(&kernel_gens, &Caps::default())?);
    let centre = build_fc_group(k, kernel_group, vec![])?;
    Ok(SemidirectGroup {
        k,
        phi,
        action,
        kernel,
        centre,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FcCentre {
    pub torus_dim: usize,
    /// Indices into `Φ` of the kernel `Φ₀`.
    pub kernel: Vec<usize>,
    pub kernel_order: usize,
    /// `|Φ|/|Φ₀|`.
    pub index: usize,
    pub open: bool,
    pub is_whole_group: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub h0: SdPoint,
    pub trials: usize,
    pub passes: usize,
    /// Trials whose `y` was drawn from the centralizer of `x`.
    pub centralizer_trials: usize,
}

impl SemidirectGroup {
    pub fn torus_dim(&self) -> usize {
        self.k
    }

    pub fn phi(&self) -> &Arc<FiniteGroup> {
        &self.phi
    }

    pub fn action(&self, phi: usize) -> &IntMatrix {
        &self.action[phi]
    }

    pub fn identity(&self) -> SdPoint {
        SdPoint {
            torus: vec![Angle::zero(); self.k],
            phi: self.phi.identity(),
        }
    }

    pub fn contains(&self, p: &SdPoint) -> bool {
        p.torus.len() == self.k && p.phi < self.phi.order()
    }

    pub fn mul(&self, a: &SdPoint, b: &SdPoint) -> SdPoint {
        let moved = act(&self.action[a.phi], &b.torus);
        SdPoint {
            torus: a.torus.iter().zip(&moved).map(|(x, y)| x.add(y)).collect(),
            phi: self.phi.mul(a.phi, b.phi),
        }
    }

    pub fn inverse(&self, a: &SdPoint) -> SdPoint {
        let inv = self.phi.inv(a.phi);
        SdPoint {
            torus: act(&self.action[inv], &a.torus).iter().map(Angle::neg).collect(),
            phi: inv,
        }
    }

    pub fn commutator(&self, a: &SdPoint, b: &SdPoint) -> SdPoint {
        let ab = self.mul(a, b);
        let ba = self.mul(b, a);
        self.mul(&ab, &self.inverse(&ba))
    }

    /// Max of the circular distances and the discrete distance on `Φ`.
    pub fn distance(&self, a: &SdPoint, b: &SdPoint) -> f64 {
        let finite = if a.phi == b.phi { 0.0 } else { 1.0 };
        a.torus
            .iter()
            .zip(&b.torus)
            .map(|(x, y)| x.distance(y))
            .fold(finite, f64::max)
    }

    pub fn in_kernel(&self, phi: usize) -> bool {
        self.action[phi].is_identity()
    }

    pub fn fc_centre(&self) -> FcCentre {
        FcCentre {
            torus_dim: self.k,
            kernel: self.kernel.clone(),
            kernel_order: self.kernel.len(),
            index: self.phi.order() / self.kernel.len(),
            open: true,
            is_whole_group: self.kernel.len() == self.phi.order(),
        }
    }

    /// The FC-centre as the FC group `T^k × Φ₀`.
    pub fn centre_group(&self) -> &FcGroup {
        &self.centre
    }

    /// Measure of the commutator fiber over `g`, computed inside the FC-centre
    /// and rescaled by `(|Φ₀|/|Φ|)²`; zero off the FC-centre.
    pub fn restricted_fiber_measure(&self, g: &SdPoint, caps: &Caps) -> Result<Rational64> {
        if let Some(t) = g.torus.iter().find(|t| !t.is_exact()) {
            return Err(Error::IrrationalElement(format!(
                "torus coordinate {t} is not an exact rational multiple of π"
            )));
        }
        if !self.in_kernel(g.phi) {
            return Ok(Rational64::zero());
        }
        let delta = self
            .centre
            .delta()
            .index_of(self.phi.element(g.phi))
            .expect("kernel elements belong to the kernel group");
        let inside = self.centre.fiber_exact(
            &FcPoint {
                torus: g.torus.clone(),
                delta,
            },
            caps,
        )?;
        let ratio = Rational64::new(self.kernel.len() as i64, self.phi.order() as i64);
        Ok(inside * ratio * ratio)
    }

    /// Torus parts `b` with `M·b = v` on `T^k`, as a particular solution plus
    /// the data needed to move through the solution set.
    fn solve_torus(&self, m: &IntMatrix, v: &[Angle]) -> Option<TorusSolution> {
        let (u, d, vmat) = m.diagonalize();
        let v_prime = act(&u, v);
        let mut particular = Vec::with_capacity(self.k);
        for (di, vi) in d.iter().zip(&v_prime) {
            if *di == 0 {
                let zero = match vi {
                    Angle::Turns(t) => t.is_zero(),
                    Angle::Radians(_) => vi.distance(&Angle::zero()) < WITNESS_TOL,
                };
                if !zero {
                    return None;
                }
                particular.push(Angle::zero());
            } else {
                particular.push(vi.div_int(*di));
            }
        }
        Some(TorusSolution {
            d,
            v: vmat,
            particular,
        })
    }

    /// Matrix and right-hand side of the torus equation for `[x, (b, ψ)] = g`.
    fn torus_equation(&self, x: &SdPoint, psi: usize, g: &SdPoint) -> (IntMatrix, Vec<Angle>) {
        let a_phi = &self.action[x.phi];
        let a_gamma = &self.action[g.phi];
        let conj = self.phi.mul(self.phi.mul(x.phi, psi), self.phi.inv(x.phi));
        let shift = IntMatrix::identity(self.k).sub(&self.action[conj]);
        let moved = act(&shift, &x.torus);
        let rhs = g.torus.iter().zip(&moved).map(|(c, s)| c.sub(s)).collect();
        (a_phi.sub(a_gamma), rhs)
    }

    /// First `h0` in the canonical order of `Φ` with `[x, h0] = g`.
    pub fn find_witness(&self, x: &SdPoint, g: &SdPoint) -> Result<SdPoint> {
        self.check(x)?;
        self.check(g)?;
        for psi in 0..self.phi.order() {
            if self.phi.commutator(x.phi, psi) != g.phi {
                continue;
            }
            let (m, rhs) = self.torus_equation(x, psi, g);
            if let Some(sol) = self.solve_torus(&m, &rhs) {
                let h0 = SdPoint {
                    torus: act(&sol.v, &sol.particular),
                    phi: psi,
                };
                if self.distance(&self.commutator(x, &h0), g) < WITNESS_TOL {
                    return Ok(h0);
                }
            }
        }
        Err(Error::NoWitness)
    }

    /// Finds `h0` with `[x, h0] = g` and checks `y ∈ Z(x) ⇔ h0·y ∈ Z^g(x)` on
    /// `trials` random `y`: half Haar-random, half drawn from `Z(x)`.
    pub fn coset_witness(&self, x: &SdPoint, g: &SdPoint, trials: usize, seed: u64) -> Result<WitnessReport> {
        let h0 = self.find_witness(x, g)?;
        let identity = self.identity();
        let centralizing: Vec<(usize, TorusSolution)> = (0..self.phi.order())
            .filter(|&psi| self.phi.commutator(x.phi, psi) == self.phi.identity())
            .filter_map(|psi| {
                let (m, rhs) = self.torus_equation(x, psi, &identity);
                self.solve_torus(&m, &rhs).map(|s| (psi, s))
            })
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut passes = 0;
        let mut centralizer_trials = 0;
        for trial in 0..trials {
            let y = if trial % 2 == 1 && !centralizing.is_empty() {
                centralizer_trials += 1;
                let (psi, sol) = &centralizing[rng.random_range(0..centralizing.len())];
                SdPoint {
                    torus: act(&sol.v, &sol.sample(&mut rng)),
                    phi: *psi,
                }
            } else {
                SdPoint {
                    torus: (0..self.k)
                        .map(|_| Angle::radians(rng.random::<f64>() * std::f64::consts::TAU))
                        .collect(),
                    phi: rng.random_range(0..self.phi.order()),
                }
            };
            let in_centralizer = self.distance(&self.commutator(x, &y), &identity) < WITNESS_TOL;
            let hy = self.mul(&h0, &y);
            let in_fiber = self.distance(&self.commutator(x, &hy), g) < WITNESS_TOL;
            if in_centralizer == in_fiber {
                passes += 1;
            }
        }
        Ok(WitnessReport {
            h0,
            trials,
            passes,
            centralizer_trials,
        })
    }

    fn check(&self, p: &SdPoint) -> Result<()> {
        if p.torus.len() != self.k {
            return Err(Error::DimensionMismatch {
                expected: self.k,
                got: p.torus.len(),
            });
        }
        if p.phi >= self.phi.order() {
            return Err(Error::SpecMismatch(format!("Φ index {} out of range", p.phi)));
        }
        Ok(())
    }

    pub fn describe(&self) -> String {
        let action: Vec<String> = self
            .phi
            .generators()
            .iter()
            .filter_map(|g| self.phi.index_of(g))
            .map(|i| format!("{}:{:?}", self.phi.element(i), self.action[i].rows()))
            .collect();
        format!(
            "semidirect(torus_dim={},phi={},action=[{}])",
            self.k,
            self.phi.describe(),
            action.join(",")
        )
    }
}

struct TorusSolution {
    d: Vec<i64>,
    v: IntMatrix,
    particular: Vec<Angle>,
}

impl TorusSolution {
    /// A uniformly random solution, in the diagonalized coordinates.
    fn sample(&self, rng: &mut ChaCha8Rng) -> Vec<Angle> {
        self.d
            .iter()
            .zip(&self.particular)
            .map(|(&d, p)| {
                if d == 0 {
                    Angle::radians(rng.random::<f64>() * std::f64::consts::TAU)
                } else {
                    let j = rng.random_range(0..d.unsigned_abs()) as i64;
                    p.add(&Angle::from_turns(j, d))
                }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite::builtin;

    pub(crate) fn o2() -> SemidirectGroup {
        let z2 = Arc::new(builtin("Z2").unwrap());
        let s = z2.generators()[0].clone();
        build_semidirect(1, z2, &[(s, IntMatrix::from_rows(&[vec![-1]]).unwrap())]).unwrap()
    }

    fn reflection(g: &SemidirectGroup, t: Angle) -> SdPoint {
        SdPoint {
            torus: vec![t],
            phi: 1 - g.phi().identity(),
        }
    }

    fn rotation(g: &SemidirectGroup, t: Angle) -> SdPoint {
        SdPoint {
            torus: vec![t],
            phi: g.phi().identity(),
        }
    }

    #[test]
    fn build_errors() {
        let z2 = Arc::new(builtin("Z2").unwrap());
        let s = z2.generators()[0].clone();
        let r = build_semidirect(1, z2.clone(), &[(s.clone(), IntMatrix::from_rows(&[vec![2]]).unwrap())]);
        assert!(matches!(r, Err(Error::NotUnimodular(_))));
        let rot = IntMatrix::from_rows(&[vec![0, -1], vec![1, 0]]).unwrap();
        let r = build_semidirect(2, z2.clone(), &[(s, rot.clone())]);
        assert!(matches!(r, Err(Error::NotAHomomorphism(_))));
        let z4 = Arc::new(builtin("Z4").unwrap());
        let g = build_semidirect(2, z4.clone(), &[(z4.generators()[0].clone(), rot)]).unwrap();
        let c = g.fc_centre();
        assert_eq!((c.kernel_order, c.index), (1, 4));
    }

    #[test]
    fn centres() {
        let c = o2().fc_centre();
        assert_eq!((c.kernel_order, c.index, c.is_whole_group), (1, 2, false));
        let q8 = Arc::new(builtin("Q8").unwrap());
        let actions: Vec<(Perm, IntMatrix)> = q8
            .generators()
            .iter()
            .map(|p| (p.clone(), IntMatrix::identity(1)))
            .collect();
        let g = build_semidirect(1, q8, &actions).unwrap();
        let c = g.fc_centre();
        assert!(c.is_whole_group);
        assert_eq!(c.index, 1);
    }

    #[test]
    fn group_law() {
        let g = o2();
        let s = reflection(&g, Angle::from_turns(1, 8));
        assert_eq!(g.mul(&s, &s), g.identity());
        let r = rotation(&g, Angle::from_turns(1, 5));
        // reflections invert rotations
        let conj = g.mul(&g.mul(&s, &r), &g.inverse(&s));
        assert_eq!(conj, rotation(&g, Angle::from_turns(4, 5)));
        assert_eq!(g.commutator(&s, &r), rotation(&g, Angle::from_turns(3, 5)));
    }

    #[test]
    fn fiber_measures() {
        let g = o2();
        let caps = Caps::default();
        assert_eq!(g.restricted_fiber_measure(&g.identity(), &caps).unwrap(), Rational64::new(1, 4));
        assert_eq!(
            g.restricted_fiber_measure(&rotation(&g, Angle::from_turns(1, 2)), &caps).unwrap(),
            Rational64::zero()
        );
        assert_eq!(
            g.restricted_fiber_measure(&reflection(&g, Angle::from_turns(1, 3)), &caps).unwrap(),
            Rational64::zero()
        );
        assert!(matches!(
            g.restricted_fiber_measure(&rotation(&g, Angle::radians(1.0)), &caps),
            Err(Error::IrrationalElement(_))
        ));
    }

    #[test]
    fn witnesses() {
        let g = o2();
        let x = reflection(&g, Angle::zero());
        let s = Angle::from_turns(1, 10);
        let target = rotation(&g, s.scale(2));
        let report = g.coset_witness(&x, &target, 200, 7).unwrap();
        assert_eq!(report.passes, 200);
        assert!(report.centralizer_trials > 0);
        assert_eq!(g.commutator(&x, &report.h0), target);
        assert_eq!(report.h0, rotation(&g, s.neg()));

        let r = g.coset_witness(&rotation(&g, Angle::from_turns(1, 7)), &g.identity(), 50, 1).unwrap();
        assert_eq!(r.h0, g.identity());
        assert_eq!(r.passes, 50);

        assert!(matches!(
            g.coset_witness(&g.identity(), &rotation(&g, Angle::from_turns(1, 3)), 10, 1),
            Err(Error::NoWitness)
        ));
    }

    #[test]
    fn rotation_action_witness() {
        let z4 = Arc::new(builtin("Z4").unwrap());
        let rot = IntMatrix::from_rows(&[vec![0, -1], vec![1, 0]]).unwrap();
        let g = build_semidirect(2, z4.clone(), &[(z4.generators()[0].clone(), rot)]).unwrap();
        let x = SdPoint {
            torus: vec![Angle::from_turns(1, 3), Angle::zero()],
            phi: z4.index_of(&z4.generators()[0]).unwrap(),
        };
        let target = SdPoint {
            torus: vec![Angle::from_turns(1, 5), Angle::from_turns(2, 7)],
            phi: z4.identity(),
        };
        let report = g.coset_witness(&x, &target, 100, 3).unwrap();
        assert_eq!(report.passes, 100);
        assert_eq!(g.commutator(&x, &report.h0), target);
    }
}
