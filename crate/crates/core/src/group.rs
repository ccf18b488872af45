//! One element algebra over every supported group: finite permutation groups,
//! tori, SU(N), finite products, FC quotients and torus semidirect products.
//!
//! Operations take the ambient [`GroupSpec`] and fail with `SpecMismatch` when
//! a point does not belong to it.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use sha2::{Digest, Sha256};

use crate::angle::{self, Angle};
use crate::error::{Error, Result};
use crate::fc::{FcGroup, FcPoint};
use crate::finite::FiniteGroup;
use crate::openfc::{SdPoint, SemidirectGroup};
use crate::perm::Perm;

/// Frobenius-norm tolerance for unitarity, determinant and matrix equality.
pub const MATRIX_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub enum GroupSpec {
    Finite(Arc<FiniteGroup>),
    Torus(usize),
    SpecialUnitary(usize),
    Product(Vec<GroupSpec>),
    FcQuotient(Arc<FcGroup>),
    Semidirect(Arc<SemidirectGroup>),
}

#[derive(Clone, Debug, PartialEq)]
pub enum GroupPoint {
    Permutation(Perm),
    Torus(Vec<Angle>),
    SpecialUnitary(DMatrix<Complex64>),
    Product(Vec<GroupPoint>),
    Coset(FcPoint),
    Semidirect(SdPoint),
}

fn mismatch(spec: &GroupSpec, p: &GroupPoint) -> Error {
    Error::SpecMismatch(format!("{} is not an element of {}", spec.format_point(p), spec.describe()))
}

/// `diag(e^{iθ_1}, …, e^{iθ_N})`.
pub fn diagonal_unitary(theta: &[Angle]) -> DMatrix<Complex64> {
    let n = theta.len();
    DMatrix::from_fn(n, n, |i, j| if i == j { angle::phase(&theta[i], 1) } else { Complex64::new(0.0, 0.0) })
}

impl GroupSpec {
    /// Real dimension `d`.
    pub fn dimension(&self) -> usize {
        match self {
            GroupSpec::Finite(_) => 0,
            GroupSpec::Torus(k) => *k,
            GroupSpec::SpecialUnitary(n) => n * n - 1,
            GroupSpec::Product(parts) => parts.iter().map(GroupSpec::dimension).sum(),
            GroupSpec::FcQuotient(g) => g.torus_dim(),
            GroupSpec::Semidirect(g) => g.torus_dim(),
        }
    }

    /// Rank `r`, the dimension of a maximal torus.
    pub fn rank(&self) -> usize {
        match self {
            GroupSpec::Finite(_) => 0,
            GroupSpec::Torus(k) => *k,
            GroupSpec::SpecialUnitary(n) => n - 1,
            GroupSpec::Product(parts) => parts.iter().map(GroupSpec::rank).sum(),
            GroupSpec::FcQuotient(g) => g.torus_dim(),
            GroupSpec::Semidirect(g) => g.torus_dim(),
        }
    }

    /// Whether commutators of exact inputs are computed without rounding, so
    /// fiber membership can be tested by equality.
    pub fn is_exact(&self) -> bool {
        match self {
            GroupSpec::Finite(_) | GroupSpec::Torus(_) | GroupSpec::FcQuotient(_) => true,
            GroupSpec::SpecialUnitary(_) | GroupSpec::Semidirect(_) => false,
            GroupSpec::Product(parts) => parts.iter().all(GroupSpec::is_exact),
        }
    }

    pub fn metric_name(&self) -> String {
        match self {
            GroupSpec::Finite(_) => "discrete".into(),
            GroupSpec::Torus(_) => "max-circular".into(),
            GroupSpec::SpecialUnitary(_) => "frobenius".into(),
            GroupSpec::Product(parts) => {
                let names: Vec<String> = parts.iter().map(GroupSpec::metric_name).collect();
                format!("max({})", names.join(","))
            }
            GroupSpec::FcQuotient(_) => "min-over-N(max(max-circular,discrete))".into(),
            GroupSpec::Semidirect(_) => "max(max-circular,discrete)".into(),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            GroupSpec::Finite(g) => g.describe(),
            GroupSpec::Torus(k) => format!("torus({k})"),
            GroupSpec::SpecialUnitary(n) => format!("su({n})"),
            GroupSpec::Product(parts) => {
                let d: Vec<String> = parts.iter().map(GroupSpec::describe).collect();
                format!("product({})", d.join(","))
            }
            GroupSpec::FcQuotient(g) => g.describe(),
            GroupSpec::Semidirect(g) => g.describe(),
        }
    }

    /// SHA-256 of [`GroupSpec::describe`], hex encoded.
    pub fn digest(&self) -> String {
        Sha256::digest(self.describe().as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    pub fn identity(&self) -> GroupPoint {
        match self {
            GroupSpec::Finite(g) => GroupPoint::Permutation(g.element(g.identity()).clone()),
            GroupSpec::Torus(k) => GroupPoint::Torus(vec![Angle::zero(); *k]),
            GroupSpec::SpecialUnitary(n) => GroupPoint::SpecialUnitary(DMatrix::identity(*n, *n)),
            GroupSpec::Product(parts) => GroupPoint::Product(parts.iter().map(GroupSpec::identity).collect()),
            GroupSpec::FcQuotient(g) => GroupPoint::Coset(g.identity()),
            GroupSpec::Semidirect(g) => GroupPoint::Semidirect(g.identity()),
        }
    }

    pub fn contains(&self, p: &GroupPoint) -> bool {
        self.contains_within(p, MATRIX_TOL)
    }

    /// Membership, with `tol` bounding `‖U†U − I‖_F` and `|det U − 1|`.
    pub fn contains_within(&self, p: &GroupPoint, tol: f64) -> bool {
        match (self, p) {
            (GroupSpec::Finite(g), GroupPoint::Permutation(x)) => x.degree() == g.degree() && g.index_of(x).is_some(),
            (GroupSpec::Torus(k), GroupPoint::Torus(t)) => t.len() == *k,
            (GroupSpec::SpecialUnitary(n), GroupPoint::SpecialUnitary(u)) => {
                u.nrows() == *n
                    && u.ncols() == *n
                    && (u.adjoint() * u - DMatrix::identity(*n, *n)).norm() < tol
                    && (u.determinant() - Complex64::new(1.0, 0.0)).norm() < tol
            }
            (GroupSpec::Product(parts), GroupPoint::Product(xs)) => {
                parts.len() == xs.len() && parts.iter().zip(xs).all(|(s, x)| s.contains_within(x, tol))
            }
            (GroupSpec::FcQuotient(g), GroupPoint::Coset(x)) => g.contains(x),
            (GroupSpec::Semidirect(g), GroupPoint::Semidirect(x)) => g.contains(x),
            _ => false,
        }
    }

    fn check(&self, p: &GroupPoint) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(mismatch(self, p))
        }
    }

    fn finite_index(g: &FiniteGroup, p: &Perm) -> usize {
        g.index_of(p).expect("membership checked")
    }

    fn multiply_unchecked(&self, a: &GroupPoint, b: &GroupPoint) -> GroupPoint {
        match (self, a, b) {
            (GroupSpec::Finite(_), GroupPoint::Permutation(x), GroupPoint::Permutation(y)) => {
                GroupPoint::Permutation(x.compose(y))
            }
            (GroupSpec::Torus(_), GroupPoint::Torus(x), GroupPoint::Torus(y)) => {
                GroupPoint::Torus(x.iter().zip(y).map(|(s, t)| s.add(t)).collect())
            }
            (GroupSpec::SpecialUnitary(_), GroupPoint::SpecialUnitary(x), GroupPoint::SpecialUnitary(y)) => {
                GroupPoint::SpecialUnitary(x * y)
            }
            (GroupSpec::Product(parts), GroupPoint::Product(xs), GroupPoint::Product(ys)) => GroupPoint::Product(
                parts
                    .iter()
                    .zip(xs.iter().zip(ys))
                    .map(|(s, (x, y))| s.multiply_unchecked(x, y))
                    .collect(),
            ),
            (GroupSpec::FcQuotient(g), GroupPoint::Coset(x), GroupPoint::Coset(y)) => GroupPoint::Coset(g.mul(x, y)),
            (GroupSpec::Semidirect(g), GroupPoint::Semidirect(x), GroupPoint::Semidirect(y)) => {
                GroupPoint::Semidirect(g.mul(x, y))
            }
            _ => unreachable!("membership checked"),
        }
    }

    fn inverse_unchecked(&self, a: &GroupPoint) -> GroupPoint {
        match (self, a) {
            (GroupSpec::Finite(_), GroupPoint::Permutation(x)) => GroupPoint::Permutation(x.inverse()),
            (GroupSpec::Torus(_), GroupPoint::Torus(x)) => GroupPoint::Torus(x.iter().map(Angle::neg).collect()),
            (GroupSpec::SpecialUnitary(_), GroupPoint::SpecialUnitary(x)) => GroupPoint::SpecialUnitary(x.adjoint()),
            (GroupSpec::Product(parts), GroupPoint::Product(xs)) => {
                GroupPoint::Product(parts.iter().zip(xs).map(|(s, x)| s.inverse_unchecked(x)).collect())
            }
            (GroupSpec::FcQuotient(g), GroupPoint::Coset(x)) => GroupPoint::Coset(g.inverse(x)),
            (GroupSpec::Semidirect(g), GroupPoint::Semidirect(x)) => GroupPoint::Semidirect(g.inverse(x)),
            _ => unreachable!("membership checked"),
        }
    }

    pub(crate) fn commutator_unchecked(&self, a: &GroupPoint, b: &GroupPoint) -> GroupPoint {
        match (self, a, b) {
            (GroupSpec::Finite(g), GroupPoint::Permutation(x), GroupPoint::Permutation(y)) => {
                let c = g.commutator(Self::finite_index(g, x), Self::finite_index(g, y));
                GroupPoint::Permutation(g.element(c).clone())
            }
            (GroupSpec::Torus(k), GroupPoint::Torus(_), GroupPoint::Torus(_)) => {
                GroupPoint::Torus(vec![Angle::zero(); *k])
            }
            (GroupSpec::Product(parts), GroupPoint::Product(xs), GroupPoint::Product(ys)) => GroupPoint::Product(
                parts
                    .iter()
                    .zip(xs.iter().zip(ys))
                    .map(|(s, (x, y))| s.commutator_unchecked(x, y))
                    .collect(),
            ),
            (GroupSpec::FcQuotient(g), GroupPoint::Coset(x), GroupPoint::Coset(y)) => {
                GroupPoint::Coset(g.commutator(x, y))
            }
            (GroupSpec::Semidirect(g), GroupPoint::Semidirect(x), GroupPoint::Semidirect(y)) => {
                GroupPoint::Semidirect(g.commutator(x, y))
            }
            _ => {
                let ab = self.multiply_unchecked(a, b);
                let ab_ainv = self.multiply_unchecked(&ab, &self.inverse_unchecked(a));
                self.multiply_unchecked(&ab_ainv, &self.inverse_unchecked(b))
            }
        }
    }

    pub fn multiply(&self, a: &GroupPoint, b: &GroupPoint) -> Result<GroupPoint> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.multiply_unchecked(a, b))
    }

    pub fn inverse(&self, a: &GroupPoint) -> Result<GroupPoint> {
        self.check(a)?;
        Ok(self.inverse_unchecked(a))
    }

    /// `aba⁻¹b⁻¹`.
    pub fn commutator(&self, a: &GroupPoint, b: &GroupPoint) -> Result<GroupPoint> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.commutator_unchecked(a, b))
    }

    /// `hah⁻¹`.
    pub fn conjugate(&self, h: &GroupPoint, a: &GroupPoint) -> Result<GroupPoint> {
        self.check(h)?;
        self.check(a)?;
        let ha = self.multiply_unchecked(h, a);
        Ok(self.multiply_unchecked(&ha, &self.inverse_unchecked(h)))
    }

    /// The metric named by [`GroupSpec::metric_name`].
    pub fn distance(&self, a: &GroupPoint, b: &GroupPoint) -> Result<f64> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.distance_unchecked(a, b))
    }

    pub(crate) fn distance_unchecked(&self, a: &GroupPoint, b: &GroupPoint) -> f64 {
        match (self, a, b) {
            (GroupSpec::Finite(_), GroupPoint::Permutation(x), GroupPoint::Permutation(y)) => {
                if x == y {
                    0.0
                } else {
                    1.0
                }
            }
            (GroupSpec::Torus(_), GroupPoint::Torus(x), GroupPoint::Torus(y)) => {
                x.iter().zip(y).map(|(s, t)| s.distance(t)).fold(0.0, f64::max)
            }
            (GroupSpec::SpecialUnitary(_), GroupPoint::SpecialUnitary(x), GroupPoint::SpecialUnitary(y)) => {
                (x - y).norm()
            }
            (GroupSpec::Product(parts), GroupPoint::Product(xs), GroupPoint::Product(ys)) => parts
                .iter()
                .zip(xs.iter().zip(ys))
                .map(|(s, (x, y))| s.distance_unchecked(x, y))
                .fold(0.0, f64::max),
            (GroupSpec::FcQuotient(g), GroupPoint::Coset(x), GroupPoint::Coset(y)) => g.distance(x, y),
            (GroupSpec::Semidirect(g), GroupPoint::Semidirect(x), GroupPoint::Semidirect(y)) => g.distance(x, y),
            _ => unreachable!("membership checked"),
        }
    }

    /// Reduced form: coset points move to their canonical representative;
    /// every other variant is already reduced by its operations.
    pub fn canonicalize(&self, a: &GroupPoint) -> Result<GroupPoint> {
        self.check(a)?;
        Ok(match (self, a) {
            (GroupSpec::FcQuotient(g), GroupPoint::Coset(x)) => GroupPoint::Coset(g.canonicalize(x)),
            (GroupSpec::Product(parts), GroupPoint::Product(xs)) => GroupPoint::Product(
                parts
                    .iter()
                    .zip(xs)
                    .map(|(s, x)| s.canonicalize(x))
                    .collect::<Result<_>>()?,
            ),
            (GroupSpec::Torus(_), GroupPoint::Torus(x)) => GroupPoint::Torus(x.iter().map(Angle::canonical).collect()),
            _ => a.clone(),
        })
    }

    /// Parses a point: cycle notation for finite groups, comma-separated angles
    /// for tori, eigenangles for SU(N) (a diagonal matrix), `angles;cycle` for
    /// quotients and semidirect products, and `|`-separated components for
    /// products.
    pub fn parse_point(&self, s: &str) -> Result<GroupPoint> {
        let s = s.trim();
        let p = match self {
            GroupSpec::Finite(g) => GroupPoint::Permutation(Perm::parse_cycles(s, g.degree())?),
            GroupSpec::Torus(_) => GroupPoint::Torus(angle::parse_angle_list(s)?),
            GroupSpec::SpecialUnitary(n) => {
                let theta = angle::parse_angle_list(s)?;
                crate::weyl::check_su_angles(&theta, *n)?;
                GroupPoint::SpecialUnitary(diagonal_unitary(&theta))
            }
            GroupSpec::Product(parts) => {
                let pieces: Vec<&str> = s.split('|').collect();
                if pieces.len() != parts.len() {
                    return Err(Error::DimensionMismatch {
                        expected: parts.len(),
                        got: pieces.len(),
                    });
                }
                GroupPoint::Product(
                    parts
                        .iter()
                        .zip(pieces)
                        .map(|(spec, piece)| spec.parse_point(piece))
                        .collect::<Result<_>>()?,
                )
            }
            GroupSpec::FcQuotient(g) => {
                let (torus, delta) = split_pair(s)?;
                let delta = g.delta().parse_element(delta)?;
                GroupPoint::Coset(FcPoint { torus, delta })
            }
            GroupSpec::Semidirect(g) => {
                let (torus, phi) = split_pair(s)?;
                let phi = g.phi().parse_element(phi)?;
                GroupPoint::Semidirect(SdPoint { torus, phi })
            }
        };
        if !self.contains(&p) {
            return Err(Error::InvalidArgument(format!(
                "{} is not an element of {}",
                s,
                self.describe()
            )));
        }
        Ok(p)
    }

    pub fn format_point(&self, p: &GroupPoint) -> String {
        let angles = |t: &[Angle]| t.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(",");
        match (self, p) {
            (GroupSpec::Product(parts), GroupPoint::Product(xs)) if parts.len() == xs.len() => parts
                .iter()
                .zip(xs)
                .map(|(s, x)| s.format_point(x))
                .collect::<Vec<_>>()
                .join("|"),
            (GroupSpec::FcQuotient(g), GroupPoint::Coset(x)) if x.delta < g.delta().order() => {
                format!("{};{}", angles(&x.torus), g.delta().element(x.delta))
            }
            (GroupSpec::Semidirect(g), GroupPoint::Semidirect(x)) if x.phi < g.phi().order() => {
                format!("{};{}", angles(&x.torus), g.phi().element(x.phi))
            }
            (_, GroupPoint::Permutation(x)) => x.to_string(),
            (_, GroupPoint::Torus(t)) => angles(t),
            (_, GroupPoint::SpecialUnitary(u)) => {
                let rows: Vec<String> = u
                    .row_iter()
                    .map(|r| r.iter().map(|z| format!("{:.6}{:+.6}i", z.re, z.im)).collect::<Vec<_>>().join(" "))
                    .collect();
                format!("[{}]", rows.join("; "))
            }
            (_, other) => format!("{other:?}"),
        }
    }
}

fn split_pair(s: &str) -> Result<(Vec<Angle>, &str)> {
    let (t, f) = s
        .split_once(';')
        .ok_or_else(|| Error::Parse(format!("expected `angles;cycle`, got `{s}`")))?;
    Ok((angle::parse_angle_list(t)?, f.trim()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fc::build_fc_group;
    use crate::finite::builtin;
    use crate::linalg::IntMatrix;
    use crate::openfc::build_semidirect;
    use std::f64::consts::PI;

    fn s3() -> GroupSpec {
        GroupSpec::Finite(Arc::new(builtin("S3").unwrap()))
    }

    #[test]
    fn finite_commutator() {
        let g = s3();
        let a = g.parse_point("(0 1)").unwrap();
        let b = g.parse_point("(0 2)").unwrap();
        assert_eq!(g.commutator(&a, &b).unwrap(), g.parse_point("(0 1 2)").unwrap());
        assert_eq!(g.commutator(&a, &a).unwrap(), g.identity());
        assert_eq!(g.distance(&a, &a).unwrap(), 0.0);
        assert_eq!(g.distance(&a, &b).unwrap(), 1.0);
    }

    #[test]
    fn spec_mismatch() {
        let g = s3();
        let t = GroupPoint::Torus(vec![Angle::zero()]);
        assert!(matches!(g.commutator(&g.identity(), &t), Err(Error::SpecMismatch(_))));
        let outside = GroupPoint::Permutation(Perm::parse_cycles("(0 1)", 4).unwrap());
        assert!(matches!(g.distance(&outside, &g.identity()), Err(Error::SpecMismatch(_))));
        let su = GroupSpec::SpecialUnitary(2);
        let not_special = GroupPoint::SpecialUnitary(diagonal_unitary(&[Angle::from_turns(1, 4), Angle::zero()]));
        assert!(matches!(su.inverse(&not_special), Err(Error::SpecMismatch(_))));
    }

    #[test]
    fn torus_points() {
        let g = GroupSpec::Torus(2);
        let a = g.parse_point("1/3 pi, 1.0").unwrap();
        let b = g.parse_point("pi, 2.5").unwrap();
        assert_eq!(g.commutator(&a, &b).unwrap(), g.identity());
        let t1 = GroupSpec::Torus(1);
        let d = t1.distance(&t1.identity(), &t1.parse_point("pi").unwrap()).unwrap();
        assert!((d - PI).abs() < 1e-15);
        assert_eq!((g.dimension(), g.rank()), (2, 2));
    }

    #[test]
    fn su_points() {
        let g = GroupSpec::SpecialUnitary(2);
        let minus = g.parse_point("pi, -pi").unwrap();
        let d = g.distance(&g.identity(), &minus).unwrap();
        assert!((d - 2.0 * 2f64.sqrt()).abs() < 1e-12);
        assert_eq!((g.dimension(), g.rank()), (3, 1));
        assert_eq!(GroupSpec::SpecialUnitary(3).dimension(), 8);
        assert!(matches!(g.parse_point("1.0, 1.0"), Err(Error::ConstraintViolation(_))));
    }

    #[test]
    fn product_points() {
        let g = GroupSpec::Product(vec![s3(), GroupSpec::Torus(1)]);
        let a = g.parse_point("(0 1)|1/2 pi").unwrap();
        let b = g.parse_point("(1 2)|pi").unwrap();
        let c = g.commutator(&a, &b).unwrap();
        assert_eq!(g.format_point(&c), "(0 2 1)|0");
        assert_eq!(g.inverse(&g.commutator(&b, &a).unwrap()).unwrap(), c);
        assert_eq!(g.metric_name(), "max(discrete,max-circular)");
    }

    #[test]
    fn quotient_and_semidirect_points() {
        let z2 = Arc::new(builtin("Z2").unwrap());
        let s = 1 - z2.identity();
        let fc = build_fc_group(
            1,
            z2.clone(),
            vec![(vec![Angle::zero()], z2.identity()), (vec![Angle::from_turns(1, 2)], s)],
        )
        .unwrap();
        let g = GroupSpec::FcQuotient(Arc::new(fc));
        let a = g.parse_point("3/2 pi;(0 1)").unwrap();
        let c = g.canonicalize(&a).unwrap();
        assert_eq!(g.canonicalize(&c).unwrap(), c);
        assert_eq!(g.format_point(&c), "1/2 pi;()");
        assert_eq!(g.distance(&a, &c).unwrap(), 0.0);

        let o2 = build_semidirect(
            1,
            z2.clone(),
            &[(z2.generators()[0].clone(), IntMatrix::from_rows(&[vec![-1]]).unwrap())],
        )
        .unwrap();
        let g = GroupSpec::Semidirect(Arc::new(o2));
        let refl = g.parse_point("0;(0 1)").unwrap();
        let rot = g.parse_point("1/5 pi;()").unwrap();
        assert_eq!(g.format_point(&g.commutator(&refl, &rot).unwrap()), "8/5 pi;()");
    }

    #[test]
    fn digests_are_stable() {
        assert_eq!(s3().digest(), s3().digest());
        assert_ne!(s3().digest(), GroupSpec::Torus(1).digest());
        assert_eq!(s3().digest().len(), 64);
    }
}
