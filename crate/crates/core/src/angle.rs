//! Points of the circle R/2πZ.
//!
//! Angles that must have finite order (elements of a finite central subgroup,
//! test fixtures, user input written as `p/q pi`) are kept as exact fractions
//! of a full turn. Everything sampled is kept in radians. Mixing the two falls
//! back to radians.

use std::cmp::Ordering;
use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Distance to the lattice below which a float angle is treated as ambiguous.
pub const LATTICE_AMBIGUITY: f64 = 1e-12;

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub enum Angle {
    /// Exact fraction of a full turn, reduced into [0, 1).
    Turns(Rational64),
    /// Radians, reduced into [0, 2π).
    Radians(f64),
}

fn reduce_turns(t: Rational64) -> Rational64 {
    let n = t.numer().mod_floor(t.denom());
    Rational64::new(n, *t.denom())
}

fn reduce_radians(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    // rem_euclid may round tiny negatives up to exactly TAU
    if r >= TAU {
        0.0
    } else {
        r
    }
}

impl Angle {
    pub fn zero() -> Self {
        Angle::Turns(Rational64::zero())
    }

    pub fn turns(t: Rational64) -> Self {
        Angle::Turns(reduce_turns(t))
    }

    /// `numer/denom` of a full turn.
    pub fn from_turns(numer: i64, denom: i64) -> Self {
        Self::turns(Rational64::new(numer, denom))
    }

    /// `numer/denom · π` radians, kept exact.
    pub fn from_pi_fraction(numer: i64, denom: i64) -> Self {
        Self::turns(Rational64::new(numer, 2 * denom))
    }

    pub fn radians(x: f64) -> Self {
        Angle::Radians(reduce_radians(x))
    }

    pub fn to_radians(&self) -> f64 {
        match *self {
            Angle::Turns(t) => t.to_f64().unwrap_or(f64::NAN) * TAU,
            Angle::Radians(x) => x,
        }
    }

    pub fn as_turns(&self) -> Option<Rational64> {
        match *self {
            Angle::Turns(t) => Some(t),
            Angle::Radians(_) => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Angle::Turns(_))
    }

    /// True only for the exact identity (exact zero, or a float that is exactly 0).
    pub fn is_identity(&self) -> bool {
        match *self {
            Angle::Turns(t) => t.is_zero(),
            Angle::Radians(x) => x == 0.0,
        }
    }

    /// Re-reduce into the fundamental interval.
    pub fn canonical(&self) -> Self {
        match *self {
            Angle::Turns(t) => Angle::turns(t),
            Angle::Radians(x) => Angle::radians(x),
        }
    }

    pub fn add(&self, other: &Angle) -> Angle {
        match (*self, *other) {
            (Angle::Turns(a), Angle::Turns(b)) => Angle::turns(a + b),
            _ => Angle::radians(self.to_radians() + other.to_radians()),
        }
    }

    pub fn neg(&self) -> Angle {
        match *self {
            Angle::Turns(a) => Angle::turns(-a),
            Angle::Radians(x) => Angle::radians(-x),
        }
    }

    pub fn sub(&self, other: &Angle) -> Angle {
        self.add(&other.neg())
    }

    pub fn scale(&self, m: i64) -> Angle {
        match *self {
            Angle::Turns(a) => Angle::turns(a * Rational64::from_integer(m)),
            Angle::Radians(x) => Angle::radians(x * m as f64),
        }
    }

    /// One solution `s` of `d·s = self` on the circle; the others are `s + j/d` turns.
    pub fn div_int(&self, d: i64) -> Angle {
        assert!(d != 0, "division of an angle by zero");
        match *self {
            Angle::Turns(a) => Angle::turns(a / Rational64::from_integer(d)),
            Angle::Radians(x) => Angle::radians(x / d as f64),
        }
    }

    /// Circular distance in radians, in [0, π].
    pub fn distance(&self, other: &Angle) -> f64 {
        match (*self, *other) {
            (Angle::Turns(a), Angle::Turns(b)) => {
                let d = reduce_turns(a - b);
                let d = d.min(Rational64::from_integer(1) - d);
                d.to_f64().unwrap_or(f64::NAN) * TAU
            }
            _ => {
                // both lie in [0, 2π), and |x − y| is exactly symmetric
                let d = (self.to_radians() - other.to_radians()).abs();
                d.min(TAU - d)
            }
        }
    }

    /// Order used to pick canonical coset representatives.
    pub fn canonical_cmp(&self, other: &Angle) -> Ordering {
        match (*self, *other) {
            (Angle::Turns(a), Angle::Turns(b)) => a.cmp(&b),
            _ => self.to_radians().total_cmp(&other.to_radians()),
        }
    }
}

impl PartialEq for Angle {
    fn eq(&self, other: &Self) -> bool {
        match (*self, *other) {
            (Angle::Turns(a), Angle::Turns(b)) => reduce_turns(a) == reduce_turns(b),
            _ => self.to_radians() == other.to_radians(),
        }
    }
}

impl fmt::Display for Angle {
    /// Exact angles print as `p/q pi`, floats as radians.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Angle::Turns(t) => {
                let r = t * Rational64::from_integer(2);
                if r.is_zero() {
                    write!(f, "0")
                } else if *r.denom() == 1 {
                    write!(f, "{} pi", r.numer())
                } else {
                    write!(f, "{}/{} pi", r.numer(), r.denom())
                }
            }
            Angle::Radians(x) => write!(f, "{x}"),
        }
    }
}

impl FromStr for Angle {
    type Err = Error;

    /// Accepts `p/q pi`, `p pi`, `pi`, `-pi`, `p/q π` or a decimal number of
    /// radians; a decimal zero is the exact identity.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let lower = s.to_ascii_lowercase();
        let stripped = lower
            .strip_suffix("pi")
            .or_else(|| lower.strip_suffix('π'));
        match stripped {
            Some(coef) => {
                let coef = coef.trim().trim_end_matches('*').trim();
                let frac = match coef {
                    "" | "+" => Rational64::from_integer(1),
                    "-" => Rational64::from_integer(-1),
                    c => parse_rational(c)?,
                };
                Ok(Angle::turns(frac / Rational64::from_integer(2)))
            }
            None => {
                let x: f64 = s
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad angle {s:?}")))?;
                if !x.is_finite() {
                    return Err(Error::Parse(format!("non-finite angle {s:?}")));
                }
                if x == 0.0 {
                    return Ok(Angle::zero());
                }
                Ok(Angle::radians(x))
            }
        }
    }
}

/// Parses `p/q` or `p` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational64> {
    let s = s.trim();
    let bad = || Error::Parse(format!("bad rational {s:?}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: i64 = p.trim().parse().map_err(|_| bad())?;
            let q: i64 = q.trim().parse().map_err(|_| bad())?;
            if q == 0 {
                return Err(bad());
            }
            Ok(Rational64::new(p, q))
        }
        None => Ok(Rational64::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Parses a comma-separated list of angles.
pub fn parse_angle_list(s: &str) -> Result<Vec<Angle>> {
    s.split(',')
        .filter(|part| !part.trim().is_empty())
        .map(str::parse)
        .collect()
}

/// Whether the angle sits on 2πZ; errors for floats that only nearly do.
pub fn on_lattice(a: &Angle) -> Result<bool> {
    match *a {
        Angle::Turns(t) => Ok(reduce_turns(t).is_zero()),
        Angle::Radians(x) => {
            if x == 0.0 {
                Ok(true)
            } else {
                let d = x.min(TAU - x);
                if d.abs() < LATTICE_AMBIGUITY {
                    Err(Error::AmbiguousInput(x))
                } else {
                    Ok(false)
                }
            }
        }
    }
}

/// `|sin(θ/2)|`, computed from the exact turn when possible.
pub fn half_sine(a: &Angle) -> f64 {
    match *a {
        Angle::Turns(t) => (t.to_f64().unwrap_or(f64::NAN) * PI).sin().abs(),
        Angle::Radians(x) => (x / 2.0).sin().abs(),
    }
}

/// `e^{i m θ}` with the product `mθ` reduced exactly when θ is exact.
pub fn phase(a: &Angle, m: i64) -> num_complex::Complex64 {
    let x = match *a {
        Angle::Turns(t) => {
            let p = (i128::from(*t.numer()) * i128::from(m)).rem_euclid(i128::from(*t.denom()));
            (p as f64 / *t.denom() as f64) * TAU
        }
        Angle::Radians(x) => x * m as f64,
    };
    num_complex::Complex64::from_polar(1.0, x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_pi_fractions() {
        let a: Angle = "1/2 pi".parse().unwrap();
        assert_eq!(a, Angle::from_turns(1, 4));
        let b: Angle = "-1/2 pi".parse().unwrap();
        assert_eq!(b, Angle::from_turns(3, 4));
        let c: Angle = "2/3pi".parse().unwrap();
        assert_eq!(c, Angle::from_turns(1, 3));
        assert_eq!("pi".parse::<Angle>().unwrap(), Angle::from_turns(1, 2));
        assert_eq!("2 pi".parse::<Angle>().unwrap(), Angle::zero());
        assert!(matches!("1.5".parse::<Angle>().unwrap(), Angle::Radians(x) if x == 1.5));
        assert!("1/0 pi".parse::<Angle>().is_err());
        assert!("abc".parse::<Angle>().is_err());
    }

    #[test]
    fn reduction_stays_in_range() {
        let a = Angle::radians(-1e-20);
        assert!(a.to_radians() >= 0.0 && a.to_radians() < TAU);
        let b = Angle::radians(7.0 * TAU + 0.5);
        assert!((b.to_radians() - 0.5).abs() < 1e-12);
        assert_eq!(Angle::from_turns(5, 4), Angle::from_turns(1, 4));
    }

    #[test]
    fn circular_distance() {
        assert!((Angle::zero().distance(&Angle::from_turns(1, 2)) - PI).abs() < 1e-15);
        assert!((Angle::radians(0.1).distance(&Angle::radians(TAU - 0.1)) - 0.2).abs() < 1e-12);
        assert_eq!(Angle::from_turns(1, 3).distance(&Angle::from_turns(1, 3)), 0.0);
    }

    #[test]
    fn lattice_check() {
        assert!(on_lattice(&Angle::from_turns(1, 1)).unwrap());
        assert!(!on_lattice(&Angle::from_turns(1, 2)).unwrap());
        assert!(on_lattice(&Angle::radians(0.0)).unwrap());
        assert_eq!(
            on_lattice(&Angle::radians(1e-13)),
            Err(Error::AmbiguousInput(1e-13))
        );
        assert!(!on_lattice(&Angle::radians(1e-6)).unwrap());
    }

    #[test]
    fn exact_phase() {
        let z = phase(&Angle::from_turns(1, 4), 2);
        assert!((z.re + 1.0).abs() < 1e-15 && z.im.abs() < 1e-15);
    }

    #[test]
    fn display_round_trips() {
        for a in [Angle::from_turns(1, 3), Angle::zero(), Angle::from_turns(1, 2)] {
            let back: Angle = a.to_string().parse().unwrap();
            assert_eq!(back, a);
        }
    }
}
