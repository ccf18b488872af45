//! Exact engine for finite permutation groups.
//!
//! Groups are closed under the generators by breadth-first search and stored in
//! canonical order (sorted image lists), so element indices are stable. The
//! character table comes from the Burnside class-matrix method; commutator
//! fibers are counted both through the character sum and by brute force.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::sync::OnceLock;

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;
use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::perm::Perm;

/// Orders up to this size get a full multiplication table.
const TABLE_LIMIT: usize = 2048;
const TABLE_ATTEMPTS: usize = 10;
pub const ORTHOGONALITY_TOL: f64 = 1e-8;
pub const INTEGRALITY_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjugacyClass {
    /// Smallest member in canonical order.
    pub representative: usize,
    pub members: Vec<usize>,
}

impl ConjugacyClass {
    pub fn size(&self) -> usize {
        self.members.len()
    }
}

pub struct FiniteGroup {
    degree: usize,
    generators: Vec<Perm>,
    elements: Vec<Perm>,
    index: HashMap<Perm, usize>,
    table: Option<Vec<u32>>,
    inverses: Vec<usize>,
    identity: usize,
    classes: Vec<ConjugacyClass>,
    class_of: Vec<usize>,
    characters: OnceLock<CharacterTable>,
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteGroup")
            .field("degree", &self.degree)
            .field("order", &self.order())
            .field("generators", &self.generators)
            .finish()
    }
}

/// Closes `generators` under multiplication.
pub fn enumerate_group(generators: &[Perm], caps: &Caps) -> Result<FiniteGroup> {
    let degree = generators
        .first()
        .map(Perm::degree)
        .ok_or_else(|| Error::BadGenerator("at least one generator is required".into()))?;
    for g in generators {
        if g.degree() != degree {
            return Err(Error::BadGenerator(format!(
                "generator {g} has degree {}, expected {degree}",
                g.degree()
            )));
        }
        Perm::from_images(g.images().to_vec())?;
    }

    let identity = Perm::identity(degree);
    let mut seen: HashMap<Perm, ()> = HashMap::new();
    let mut queue = VecDeque::from([identity.clone()]);
    seen.insert(identity, ());
    while let Some(x) = queue.pop_front() {
        for s in generators {
            let y = s.compose(&x);
            if !seen.contains_key(&y) {
                if seen.len() >= caps.group_order {
                    return Err(Error::CapExceeded {
                        what: "group order",
                        requested: seen.len() as u128 + 1,
                        cap: caps.group_order as u128,
                    });
                }
                seen.insert(y.clone(), ());
                queue.push_back(y);
            }
        }
    }

    let mut elements: Vec<Perm> = seen.into_keys().collect();
    elements.sort();
    Ok(FiniteGroup::from_sorted(degree, generators.to_vec(), elements))
}

impl FiniteGroup {
    fn from_sorted(degree: usize, generators: Vec<Perm>, elements: Vec<Perm>) -> Self {
        let n = elements.len();
        let index: HashMap<Perm, usize> = elements.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        let identity = index[&Perm::identity(degree)];
        let inverses = elements.iter().map(|p| index[&p.inverse()]).collect();
        let table = (n <= TABLE_LIMIT).then(|| {
            let mut t = Vec::with_capacity(n * n);
            for a in &elements {
                for b in &elements {
                    t.push(index[&a.compose(b)] as u32);
                }
            }
            t
        });
        let mut group = FiniteGroup {
            degree,
            generators,
            elements,
            index,
            table,
            inverses,
            identity,
            classes: Vec::new(),
            class_of: Vec::new(),
            characters: OnceLock::new(),
        };
        let classes = conjugacy_classes(&group);
        let mut class_of = vec![0; n];
        for (c, class) in classes.iter().enumerate() {
            for &m in &class.members {
                class_of[m] = c;
            }
        }
        group.classes = classes;
        group.class_of = class_of;
        group
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn generators(&self) -> &[Perm] {
        &self.generators
    }

    pub fn elements(&self) -> &[Perm] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &Perm {
        &self.elements[i]
    }

    pub fn index_of(&self, p: &Perm) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        match &self.table {
            Some(t) => t[a * self.order() + b] as usize,
            None => self.index[&self.elements[a].compose(&self.elements[b])],
        }
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverses[a]
    }

    pub fn commutator(&self, a: usize, b: usize) -> usize {
        let ab = self.mul(a, b);
        let ab_ai = self.mul(ab, self.inv(a));
        self.mul(ab_ai, self.inv(b))
    }

    pub fn conjugacy_classes(&self) -> &[ConjugacyClass] {
        &self.classes
    }

    pub fn class_of(&self, element: usize) -> usize {
        self.class_of[element]
    }

    pub fn is_central(&self, element: usize) -> bool {
        self.classes[self.class_of[element]].size() == 1
    }

    /// Indices of the centre.
    pub fn center(&self) -> Vec<usize> {
        (0..self.order()).filter(|&e| self.is_central(e)).collect()
    }

    pub fn is_abelian(&self) -> bool {
        self.classes.len() == self.order()
    }

    /// The character table, computed on first use with default caps.
    pub fn character_table(&self) -> Result<&CharacterTable> {
        self.character_table_with(&Caps::default())
    }

    pub fn character_table_with(&self, caps: &Caps) -> Result<&CharacterTable> {
        if let Some(t) = self.characters.get() {
            return Ok(t);
        }
        let t = character_table(self, caps)?;
        Ok(self.characters.get_or_init(|| t))
    }

    /// Parses an element in cycle notation and checks membership.
    pub fn parse_element(&self, s: &str) -> Result<usize> {
        let p = Perm::parse_cycles(s, self.degree)?;
        self.index_of(&p)
            .ok_or_else(|| Error::InvalidArgument(format!("{p} is not an element of the group")))
    }

    pub fn describe(&self) -> String {
        let gens: Vec<String> = self.generators.iter().map(|g| format!("{:?}", g.images())).collect();
        format!("finite(degree={},generators=[{}])", self.degree, gens.join(","))
    }
}

/// Orbits of the conjugation action, in order of their smallest member.
pub fn conjugacy_classes(group: &FiniteGroup) -> Vec<ConjugacyClass> {
    let n = group.order();
    let gens: Vec<usize> = group
        .generators
        .iter()
        .map(|g| group.index[g])
        .collect();
    let mut assigned = vec![false; n];
    let mut classes = Vec::new();
    for start in 0..n {
        if assigned[start] {
            continue;
        }
        let mut members = vec![start];
        assigned[start] = true;
        let mut frontier = vec![start];
        while let Some(x) = frontier.pop() {
            for &s in &gens {
                let y = group.mul(group.mul(s, x), group.inv(s));
                if !assigned[y] {
                    assigned[y] = true;
                    members.push(y);
                    frontier.push(y);
                }
            }
        }
        members.sort_unstable();
        classes.push(ConjugacyClass {
            representative: members[0],
            members,
        });
    }
    classes
}

/// Irreducible characters as rows over conjugacy classes.
#[derive(Clone, Debug)]
pub struct CharacterTable {
    order: usize,
    class_sizes: Vec<usize>,
    degrees: Vec<u64>,
    values: Vec<Vec<Complex64>>,
}

impl CharacterTable {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.degrees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.degrees.is_empty()
    }

    pub fn degrees(&self) -> &[u64] {
        &self.degrees
    }

    pub fn degree(&self, row: usize) -> u64 {
        self.degrees[row]
    }

    pub fn class_sizes(&self) -> &[usize] {
        &self.class_sizes
    }

    pub fn row(&self, row: usize) -> &[Complex64] {
        &self.values[row]
    }

    pub fn value(&self, row: usize, class: usize) -> Complex64 {
        self.values[row][class]
    }

    /// Largest deviation of `(1/|G|) Σ_C |C| χ_i(C) conj χ_j(C)` from `δ_ij`.
    pub fn row_orthogonality_error(&self) -> f64 {
        let k = self.len();
        let mut worst: f64 = 0.0;
        for i in 0..k {
            for j in 0..k {
                let s: Complex64 = (0..k)
                    .map(|c| self.values[i][c] * self.values[j][c].conj() * self.class_sizes[c] as f64)
                    .sum::<Complex64>()
                    / self.order as f64;
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((s - target).norm());
            }
        }
        worst
    }

    /// Largest deviation of `Σ_χ χ(C) conj χ(D)` from `δ_CD |G|/|C|`.
    pub fn column_orthogonality_error(&self) -> f64 {
        let k = self.len();
        let mut worst: f64 = 0.0;
        for c in 0..k {
            for d in 0..k {
                let s: Complex64 = (0..k).map(|i| self.values[i][c] * self.values[i][d].conj()).sum();
                let target = if c == d { self.order as f64 / self.class_sizes[c] as f64 } else { 0.0 };
                worst = worst.max((s - target).norm());
            }
        }
        worst
    }
}

/// Burnside's method: common eigenvectors of the class-multiplication matrices,
/// found as eigenvectors of a random real combination of them.
pub fn character_table(group: &FiniteGroup, caps: &Caps) -> Result<CharacterTable> {
    let k = group.classes.len();
    if k > caps.class_count {
        return Err(Error::CapExceeded {
            what: "conjugacy classes",
            requested: k as u128,
            cap: caps.class_count as u128,
        });
    }
    let constants = class_constants(group);
    let sizes: Vec<usize> = group.classes.iter().map(ConjugacyClass::size).collect();
    for attempt in 0..TABLE_ATTEMPTS {
        if let Some(table) = try_character_table(group, &constants, &sizes, attempt as u64) {
            return Ok(table);
        }
    }
    Err(Error::DegenerateSpectrum(TABLE_ATTEMPTS))
}

/// `a[r][s][t]` = number of `(x, y) ∈ C_r × C_s` with `xy = z_t`.
fn class_constants(group: &FiniteGroup) -> Vec<Vec<Vec<f64>>> {
    let k = group.classes.len();
    let mut a = vec![vec![vec![0.0; k]; k]; k];
    for (t, class) in group.classes.iter().enumerate() {
        let z = class.representative;
        for x in 0..group.order() {
            let y = group.mul(group.inv(x), z);
            a[group.class_of[x]][group.class_of[y]][t] += 1.0;
        }
    }
    a
}

fn try_character_table(
    group: &FiniteGroup,
    constants: &[Vec<Vec<f64>>],
    sizes: &[usize],
    attempt: u64,
) -> Option<CharacterTable> {
    let k = sizes.len();
    let order = group.order() as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_c1a5 + attempt);
    let coeffs: Vec<f64> = (0..k).map(|_| rng.random_range(-1.0..1.0)).collect();
    let class_matrix = |r: usize| DMatrix::from_fn(k, k, |s, t| Complex64::new(constants[r][s][t], 0.0));
    let combo = DMatrix::from_fn(k, k, |s, t| {
        Complex64::new((0..k).map(|r| coeffs[r] * constants[r][s][t]).sum(), 0.0)
    });

    let eigenvalues = Schur::try_new(combo.clone(), 1e-14, 10_000)?.eigenvalues()?;
    let scale = 1.0 + eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max);
    for i in 0..k {
        for j in i + 1..k {
            if (eigenvalues[i] - eigenvalues[j]).norm() < 1e-6 * scale {
                return None;
            }
        }
    }

    let mut rows: Vec<(u64, Vec<Complex64>)> = Vec::with_capacity(k);
    for &lambda in eigenvalues.iter() {
        let shifted = &combo - DMatrix::identity(k, k) * lambda;
        let svd = shifted.svd(false, true);
        let v_t = svd.v_t?;
        let (smallest, _) = svd
            .singular_values
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))?;
        let mut w: Vec<Complex64> = v_t.row(smallest).iter().map(|z| z.conj()).collect();
        // class 0 is the identity; the central character is 1 there
        if w[0].norm() < 1e-10 {
            return None;
        }
        let w0 = w[0];
        w.iter_mut().for_each(|z| *z /= w0);

        for r in 0..k {
            let mw = class_matrix(r) * nalgebra::DVector::from_vec(w.clone());
            let resid = (0..k).map(|t| (mw[t] - w[r] * w[t]).norm()).fold(0.0, f64::max);
            if resid > 1e-6 * (1.0 + w[r].norm()) * scale {
                return None;
            }
        }

        let norm: f64 = (0..k).map(|t| w[t].norm_sqr() / sizes[t] as f64).sum();
        let degree_f = (order / norm).sqrt();
        let degree = degree_f.round();
        if degree < 1.0 || (degree_f - degree).abs() > INTEGRALITY_TOL * degree {
            return None;
        }
        let values = (0..k).map(|t| w[t] * degree / sizes[t] as f64).collect();
        rows.push((degree as u64, values));
    }

    let quantize = |z: &Complex64| ((-z.re * 1e6).round() as i64, (-z.im * 1e6).round() as i64);
    rows.sort_by(|a, b| {
        a.0.cmp(&b.0)
            .then_with(|| a.1.iter().map(quantize).cmp(b.1.iter().map(quantize)))
    });
    let table = CharacterTable {
        order: group.order(),
        class_sizes: sizes.to_vec(),
        degrees: rows.iter().map(|r| r.0).collect(),
        values: rows.into_iter().map(|r| r.1).collect(),
    };
    let degree_square_sum: u64 = table.degrees.iter().map(|d| d * d).sum();
    (degree_square_sum == group.order() as u64
        && table.row_orthogonality_error() < ORTHOGONALITY_TOL
        && table.column_orthogonality_error() < ORTHOGONALITY_TOL)
        .then_some(table)
}

fn check_pair_cap(group: &FiniteGroup, caps: &Caps) -> Result<()> {
    let pairs = (group.order() as u128).pow(2);
    if pairs > caps.pair_evaluations {
        return Err(Error::CapExceeded {
            what: "pair evaluations",
            requested: pairs,
            cap: caps.pair_evaluations,
        });
    }
    Ok(())
}

/// `|{(x, y) : [x, y] = g}|` by looping over every pair.
pub fn brute_force_fiber(group: &FiniteGroup, g: usize, caps: &Caps) -> Result<u64> {
    check_pair_cap(group, caps)?;
    let n = group.order();
    let mut count = 0u64;
    for x in 0..n {
        for y in 0..n {
            if group.commutator(x, y) == g {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// Brute-force fiber sizes of every element in one pass over the pairs.
pub fn brute_force_fibers(group: &FiniteGroup, caps: &Caps) -> Result<Vec<u64>> {
    check_pair_cap(group, caps)?;
    let n = group.order();
    let mut counts = vec![0u64; n];
    for x in 0..n {
        for y in 0..n {
            counts[group.commutator(x, y)] += 1;
        }
    }
    Ok(counts)
}

/// `|G| Σ_χ χ(g)/χ(1)`, checked to be an integer.
pub fn frobenius_fiber(group: &FiniteGroup, g: usize) -> Result<u64> {
    let table = group.character_table()?;
    frobenius_fiber_with(group, table, g)
}

pub fn frobenius_fiber_with(group: &FiniteGroup, table: &CharacterTable, g: usize) -> Result<u64> {
    let class = group.class_of(g);
    let sum: Complex64 = (0..table.len())
        .map(|i| table.value(i, class) / table.degree(i) as f64)
        .sum();
    let value = sum * group.order() as f64;
    let rounded = value.re.round();
    if (value.re - rounded).abs() > INTEGRALITY_TOL || value.im.abs() > INTEGRALITY_TOL || rounded < 0.0 {
        return Err(Error::NonIntegral {
            value: value.re,
            tol: INTEGRALITY_TOL,
        });
    }
    Ok(rounded as u64)
}

/// `|χ(g)χ(h) − (χ(1)/|G|) Σ_z χ(g z h z⁻¹)|` for the character in `row`.
pub fn character_product_residual(group: &FiniteGroup, table: &CharacterTable, row: usize, g: usize, h: usize) -> f64 {
    let chi = |e: usize| table.value(row, group.class_of(e));
    let sum: Complex64 = (0..group.order())
        .map(|z| {
            let zhz = group.mul(group.mul(z, h), group.inv(z));
            chi(group.mul(g, zhz))
        })
        .sum();
    let rhs = sum * table.degree(row) as f64 / group.order() as f64;
    (chi(g) * chi(h) - rhs).norm()
}

/// `Pr_G(g) = f(g)/|G|²`, exact.
pub fn finite_pr(group: &FiniteGroup, g: usize, caps: &Caps) -> Result<Rational64> {
    let f = brute_force_fiber(group, g, caps)?;
    let n = group.order() as i64;
    Ok(Rational64::new(f as i64, n * n))
}

/// Generators of the built-in groups.
pub fn builtin_generators(name: &str) -> Option<Vec<Perm>> {
    let cycles = |degree: usize, gens: &[&str]| {
        gens.iter()
            .map(|g| Perm::parse_cycles(g, degree).expect("built-in generator"))
            .collect::<Vec<_>>()
    };
    Some(match name.to_ascii_uppercase().as_str() {
        "S3" => cycles(3, &["(0 1)", "(0 1 2)"]),
        "S4" => cycles(4, &["(0 1)", "(0 1 2 3)"]),
        "A4" => cycles(4, &["(0 1 2)", "(1 2 3)"]),
        "D4" => cycles(4, &["(0 1 2 3)", "(1 3)"]),
        "Q8" => vec![q8_unit("i").unwrap(), q8_unit("j").unwrap()],
        "Z2" => cycles(2, &["(0 1)"]),
        "Z4" => cycles(4, &["(0 1 2 3)"]),
        _ => return None,
    })
}

pub const BUILTIN_NAMES: [&str; 7] = ["S3", "S4", "A4", "D4", "Q8", "Z2", "Z4"];

pub fn builtin(name: &str) -> Option<FiniteGroup> {
    builtin_generators(name).map(|g| enumerate_group(&g, &Caps::default()).expect("built-in group"))
}

// Q8 acts on itself by left multiplication; points 0..8 stand for
// 1, -1, i, -i, j, -j, k, -k.
const Q8_UNITS: [&str; 8] = ["1", "-1", "i", "-i", "j", "-j", "k", "-k"];

fn q8_mul(a: usize, b: usize) -> usize {
    // basis index 0..4 = 1, i, j, k; table of (sign, basis) for basis products
    const TABLE: [[(bool, usize); 4]; 4] = [
        [(false, 0), (false, 1), (false, 2), (false, 3)],
        [(false, 1), (true, 0), (false, 3), (true, 2)],
        [(false, 2), (true, 3), (true, 0), (false, 1)],
        [(false, 3), (false, 2), (true, 1), (true, 0)],
    ];
    let (neg_a, ba) = (a % 2 == 1, a / 2);
    let (neg_b, bb) = (b % 2 == 1, b / 2);
    let (neg, basis) = TABLE[ba][bb];
    basis * 2 + usize::from(neg ^ neg_a ^ neg_b)
}

/// Left multiplication by the named unit quaternion as a degree-8 permutation.
pub fn q8_unit(name: &str) -> Option<Perm> {
    let a = Q8_UNITS.iter().position(|&u| u == name)?;
    Some(Perm::from_images((0..8).map(|b| q8_mul(a, b) as u32).collect()).expect("Q8 is a group"))
}
