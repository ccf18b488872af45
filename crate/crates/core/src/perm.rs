//! Permutations of `{0, …, deg−1}`.
//!
//! Composition convention: `(p·q)(i) = p(q(i))`, the right factor acts first.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A permutation stored by its image list. The derived order (lexicographic on
/// images) is the canonical element order used throughout.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Perm(Vec<u32>);

impl Perm {
    pub fn identity(degree: usize) -> Self {
        Perm((0..degree as u32).collect())
    }

    pub fn from_images(images: Vec<u32>) -> Result<Self> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            let slot = seen
                .get_mut(i as usize)
                .ok_or_else(|| Error::BadGenerator(format!("image {i} out of range in {images:?}")))?;
            if *slot {
                return Err(Error::BadGenerator(format!("image {i} repeated in {images:?}")));
            }
            *slot = true;
        }
        Ok(Perm(images))
    }

    pub fn images(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i] as usize
    }

    /// `self · other`, i.e. apply `other` first.
    pub fn compose(&self, other: &Perm) -> Perm {
        debug_assert_eq!(self.degree(), other.degree());
        Perm(other.0.iter().map(|&i| self.0[i as usize]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u32; self.0.len()];
        for (i, &p) in self.0.iter().enumerate() {
            inv[p as usize] = i as u32;
        }
        Perm(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &p)| i as u32 == p)
    }

    /// `self · other · self⁻¹ · other⁻¹`.
    pub fn commutator(&self, other: &Perm) -> Perm {
        self.compose(other)
            .compose(&self.inverse())
            .compose(&other.inverse())
    }

    pub fn order(&self) -> usize {
        let mut p = self.clone();
        let mut n = 1;
        while !p.is_identity() {
            p = p.compose(self);
            n += 1;
        }
        n
    }

    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.degree()];
        let mut out = Vec::new();
        for start in 0..self.degree() {
            if seen[start] || self.apply(start) == start {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut i = self.apply(start);
            while i != start {
                seen[i] = true;
                cycle.push(i);
                i = self.apply(i);
            }
            out.push(cycle);
        }
        out
    }

    /// Parses cycle notation such as `(0 1 2)(3 4)`; `()` is the identity.
    /// Cycles compose right to left, like the product they denote.
    pub fn parse_cycles(s: &str, degree: usize) -> Result<Perm> {
        let s = s.trim();
        let bad = |msg: &str| Error::Parse(format!("{msg} in cycle notation {s:?}"));
        let mut cycles: Vec<Vec<usize>> = Vec::new();
        let mut rest = s;
        while !rest.is_empty() {
            rest = rest.trim_start();
            if rest.is_empty() {
                break;
            }
            let body = rest.strip_prefix('(').ok_or_else(|| bad("expected '('"))?;
            let close = body.find(')').ok_or_else(|| bad("unclosed cycle"))?;
            let points = body[..close]
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<usize>().map_err(|_| bad("bad point")))
                .collect::<Result<Vec<_>>>()?;
            if let Some(&p) = points.iter().find(|&&p| p >= degree) {
                return Err(bad(&format!("point {p} exceeds degree {degree}")));
            }
            let mut sorted = points.clone();
            sorted.sort_unstable();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(bad("repeated point"));
            }
            cycles.push(points);
            rest = &body[close + 1..];
        }
        if s.is_empty() {
            return Err(bad("empty string"));
        }
        let mut result = Perm::identity(degree);
        for cycle in cycles.iter().rev() {
            let mut images: Vec<u32> = (0..degree as u32).collect();
            for (k, &p) in cycle.iter().enumerate() {
                images[p] = cycle[(k + 1) % cycle.len()] as u32;
            }
            result = Perm(images).compose(&result);
        }
        Ok(result)
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for c in cycles {
            let body: Vec<String> = c.iter().map(usize::to_string).collect();
            write!(f, "({})", body.join(" "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        let p = Perm::parse_cycles("(0 1 2)(3 4)", 5).unwrap();
        assert_eq!(p.images(), &[1, 2, 0, 4, 3]);
        assert_eq!(p.to_string(), "(0 1 2)(3 4)");
        assert!(Perm::parse_cycles("()", 3).unwrap().is_identity());
        assert_eq!(Perm::identity(3).to_string(), "()");
    }

    #[test]
    fn parse_errors() {
        assert!(Perm::parse_cycles("(0 1", 3).is_err());
        assert!(Perm::parse_cycles("(0 5)", 3).is_err());
        assert!(Perm::parse_cycles("(0 0)", 3).is_err());
        assert!(Perm::parse_cycles("0 1", 3).is_err());
        assert!(Perm::parse_cycles("", 3).is_err());
    }

    #[test]
    fn bijection_check() {
        assert!(Perm::from_images(vec![0, 0, 1]).is_err());
        assert!(Perm::from_images(vec![0, 3, 1]).is_err());
        assert!(Perm::from_images(vec![2, 0, 1]).is_ok());
    }

    #[test]
    fn composition_right_acts_first() {
        let a = Perm::parse_cycles("(0 1)", 3).unwrap();
        let b = Perm::parse_cycles("(0 2)", 3).unwrap();
        // (a·b)(0) = a(b(0)) = a(2) = 2
        assert_eq!(a.compose(&b).apply(0), 2);
    }

    #[test]
    fn s3_commutator() {
        // [(0 1), (0 2)] = (0 1)(0 2)(0 1)(0 2), rightmost factor first:
        // 0 -> 2 -> 2 -> 0 -> 1, 1 -> 1 -> 0 -> 2 -> 2, 2 -> 0 -> 1 -> 1 -> 0.
        let a = Perm::parse_cycles("(0 1)", 3).unwrap();
        let b = Perm::parse_cycles("(0 2)", 3).unwrap();
        assert_eq!(a.commutator(&b), Perm::parse_cycles("(0 1 2)", 3).unwrap());
    }

    #[test]
    fn order_of_cycle_type() {
        assert_eq!(Perm::parse_cycles("(0 1 2)(3 4)", 5).unwrap().order(), 6);
    }
}
