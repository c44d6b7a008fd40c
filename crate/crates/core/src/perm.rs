//! Permutations of `{1, …, m}` and their cycle structure.
//!
//! Points are 1-based in every textual or JSON form and 0-based in the
//! underlying image array. Composition is right-to-left: `a.compose(&b)`
//! maps `i ↦ a(b(i))`.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A permutation of `{1, …, degree}` stored as a 0-based image array.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "PermutationJson", into = "PermutationJson")]
pub struct Permutation {
    images: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct PermutationJson {
    degree: usize,
    images: Vec<usize>,
}

impl TryFrom<PermutationJson> for Permutation {
    type Error = Error;

    fn try_from(json: PermutationJson) -> Result<Self> {
        if json.images.len() != json.degree {
            return Err(Error::InvalidPermutation(format!(
                "degree {} but {} images",
                json.degree,
                json.images.len()
            )));
        }
        Permutation::from_images_one_based(&json.images)
    }
}

impl From<Permutation> for PermutationJson {
    fn from(p: Permutation) -> Self {
        PermutationJson {
            degree: p.degree(),
            images: p.images.iter().map(|&x| x as usize + 1).collect(),
        }
    }
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        assert!(degree >= 1, "degree must be positive");
        Permutation {
            images: (0..degree as u32).collect(),
        }
    }

    /// Builds a permutation from 0-based images, validating bijectivity.
    pub fn from_images(images: Vec<u32>) -> Result<Self> {
        if images.is_empty() {
            return Err(Error::InvalidPermutation("degree must be positive".into()));
        }
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            let x = x as usize;
            if x >= n || seen[x] {
                return Err(Error::InvalidPermutation(format!(
                    "image array is not a bijection of 0..{n}"
                )));
            }
            seen[x] = true;
        }
        Ok(Permutation { images })
    }

    pub fn from_images_one_based(images: &[usize]) -> Result<Self> {
        let zero_based = images
            .iter()
            .map(|&x| {
                if x == 0 {
                    Err(Error::InvalidPermutation(
                        "point 0 in 1-based images".into(),
                    ))
                } else {
                    Ok((x - 1) as u32)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Permutation::from_images(zero_based)
    }

    /// Unchecked constructor for internal callers that build bijections by construction.
    pub(crate) fn from_images_unchecked(images: Vec<u32>) -> Self {
        debug_assert!(Permutation::from_images(images.clone()).is_ok());
        Permutation { images }
    }

    /// Builds a permutation from 1-based cycles.
    pub fn from_cycles(degree: usize, cycles: &[Vec<usize>]) -> Result<Self> {
        if degree == 0 {
            return Err(Error::InvalidPermutation("degree must be positive".into()));
        }
        let mut images: Vec<u32> = (0..degree as u32).collect();
        let mut used = vec![false; degree];
        for cycle in cycles {
            for &pt in cycle {
                if pt == 0 || pt > degree {
                    return Err(Error::Parse(format!("point {pt} outside 1..={degree}")));
                }
                if used[pt - 1] {
                    return Err(Error::Parse(format!("repeated point {pt}")));
                }
                used[pt - 1] = true;
            }
            for (i, &pt) in cycle.iter().enumerate() {
                let next = cycle[(i + 1) % cycle.len()];
                images[pt - 1] = (next - 1) as u32;
            }
        }
        Ok(Permutation { images })
    }

    /// Parses disjoint-cycle notation such as `"(1 2 3)(4 5)"`; commas are
    /// accepted as separators. Points not mentioned are fixed.
    pub fn parse_cycles(text: &str, degree: usize) -> Result<Self> {
        let mut cycles = Vec::new();
        let mut rest = text.trim();
        while !rest.is_empty() {
            let Some(body) = rest.strip_prefix('(') else {
                return Err(Error::Parse(format!("expected '(' at {rest:?}")));
            };
            let Some(close) = body.find(')') else {
                return Err(Error::Parse("unbalanced parenthesis".into()));
            };
            let inner = &body[..close];
            if inner.contains('(') {
                return Err(Error::Parse("nested parenthesis".into()));
            }
            let cycle = inner
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse::<usize>()
                        .map_err(|_| Error::Parse(format!("bad point {s:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            if !cycle.is_empty() {
                cycles.push(cycle);
            }
            rest = body[close + 1..].trim_start();
        }
        Permutation::from_cycles(degree, &cycles)
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.images.len()
    }

    /// 0-based image array.
    #[inline]
    pub fn images(&self) -> &[u32] {
        &self.images
    }

    /// Image of a 0-based point.
    #[inline]
    pub fn apply(&self, point: usize) -> usize {
        self.images[point] as usize
    }

    /// Image of a 1-based point.
    pub fn image_of(&self, point: usize) -> usize {
        self.images[point - 1] as usize + 1
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }

    /// `i ↦ self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        check_degree(self, other)?;
        Ok(self.compose_unchecked(other))
    }

    #[inline]
    pub(crate) fn compose_unchecked(&self, other: &Permutation) -> Permutation {
        Permutation {
            images: other
                .images
                .iter()
                .map(|&x| self.images[x as usize])
                .collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u32; self.images.len()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x as usize] = i as u32;
        }
        Permutation { images: inv }
    }

    pub fn pow(&self, exp: i64) -> Permutation {
        let base = if exp < 0 {
            self.inverse()
        } else {
            self.clone()
        };
        let mut e = exp.unsigned_abs();
        let mut acc = Permutation::identity(self.degree());
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose_unchecked(&sq);
            }
            sq = sq.compose_unchecked(&sq);
            e >>= 1;
        }
        acc
    }

    /// `self ▷ x = self · x · self⁻¹`.
    pub fn conjugate(&self, x: &Permutation) -> Result<Permutation> {
        check_degree(self, x)?;
        Ok(self.conjugate_unchecked(x))
    }

    /// Conjugation by relabelling: `(g x g⁻¹)(g(i)) = g(x(i))`.
    #[inline]
    pub(crate) fn conjugate_unchecked(&self, x: &Permutation) -> Permutation {
        let mut images = vec![0u32; x.images.len()];
        for (i, &xi) in x.images.iter().enumerate() {
            images[self.images[i] as usize] = self.images[xi as usize];
        }
        Permutation { images }
    }

    pub fn commutes_with(&self, other: &Permutation) -> bool {
        self.degree() == other.degree()
            && self
                .images
                .iter()
                .zip(&other.images)
                .all(|(&a, &b)| self.images[b as usize] == other.images[a as usize])
    }

    /// Extends to a larger degree by fixing the new points.
    pub fn extend(&self, degree: usize) -> Result<Permutation> {
        if degree < self.degree() {
            return Err(Error::InvalidArgument(format!(
                "cannot shrink degree {} to {degree}",
                self.degree()
            )));
        }
        let mut images = self.images.clone();
        images.extend(self.degree() as u32..degree as u32);
        Ok(Permutation { images })
    }

    /// Disjoint cycles of length ≥ 2, each starting at its smallest point (0-based).
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.degree()];
        let mut out = Vec::new();
        for start in 0..self.degree() {
            if seen[start] || self.apply(start) == start {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut cur = self.apply(start);
            while cur != start {
                seen[cur] = true;
                cycle.push(cur);
                cur = self.apply(cur);
            }
            out.push(cycle);
        }
        out
    }

    /// All cycles including fixed points as 1-cycles (0-based).
    pub fn cycles_with_fixed(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.degree()];
        let mut out = Vec::new();
        for start in 0..self.degree() {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut cur = self.apply(start);
            while cur != start {
                seen[cur] = true;
                cycle.push(cur);
                cur = self.apply(cur);
            }
            out.push(cycle);
        }
        out
    }

    /// Moved points, 1-based and sorted.
    pub fn support(&self) -> Vec<usize> {
        (0..self.degree())
            .filter(|&i| self.apply(i) != i)
            .map(|i| i + 1)
            .collect()
    }

    /// `+1` for even permutations, `-1` for odd ones.
    pub fn parity(&self) -> i8 {
        let transpositions: usize = self.cycles().iter().map(|c| c.len() - 1).sum();
        if transpositions.is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    pub fn is_even(&self) -> bool {
        self.parity() == 1
    }

    /// Multiplicative order: lcm of the cycle lengths.
    pub fn order(&self) -> u64 {
        self.cycles()
            .iter()
            .fold(1u64, |acc, c| acc.lcm(&(c.len() as u64)))
    }

    pub fn cycle_type(&self) -> CycleType {
        let mut lengths: Vec<usize> = self.cycles_with_fixed().iter().map(Vec::len).collect();
        lengths.sort_unstable();
        CycleType { lengths }
    }

    pub fn cycle_structure(&self) -> CycleStructure {
        CycleStructure {
            cycle_type: self.cycle_type(),
            support: self.support(),
            parity: self.parity(),
            order: self.order(),
        }
    }

    /// True iff this is a single cycle of the given length (the rest fixed).
    pub fn is_cycle_of_length(&self, len: usize) -> bool {
        let cycles = self.cycles();
        cycles.len() == 1 && cycles[0].len() == len
    }
}

fn check_degree(a: &Permutation, b: &Permutation) -> Result<()> {
    if a.degree() != b.degree() {
        Err(Error::DegreeMismatch(a.degree(), b.degree()))
    } else {
        Ok(())
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return f.write_str("()");
        }
        for cycle in cycles {
            f.write_str("(")?;
            for (i, pt) in cycle.iter().enumerate() {
                if i > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{}", pt + 1)?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}[{}]", self.degree())
    }
}

/// Multiset of cycle lengths including fixed points, sorted ascending.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CycleType {
    lengths: Vec<usize>,
}

impl CycleType {
    pub fn from_lengths(mut lengths: Vec<usize>) -> Self {
        lengths.sort_unstable();
        CycleType { lengths }
    }

    /// Lengths including fixed points.
    pub fn lengths(&self) -> &[usize] {
        &self.lengths
    }

    /// Lengths of the nontrivial cycles only.
    pub fn moved_lengths(&self) -> Vec<usize> {
        self.lengths.iter().copied().filter(|&l| l > 1).collect()
    }

    pub fn degree(&self) -> usize {
        self.lengths.iter().sum()
    }

    /// Whether the symmetric-group class of this type splits into two
    /// alternating-group classes: every length odd and no length repeated.
    pub fn splits_in_alternating(&self) -> bool {
        self.lengths.iter().all(|l| l % 2 == 1) && self.lengths.windows(2).all(|w| w[0] != w[1])
    }

    /// Size of the conjugacy class of this type in the symmetric group.
    pub fn symmetric_class_size(&self) -> num_bigint::BigUint {
        use num_bigint::BigUint;
        let n = self.degree();
        let mut centralizer = BigUint::from(1u32);
        let mut i = 0;
        while i < self.lengths.len() {
            let l = self.lengths[i];
            let mut mult = 0u32;
            while i < self.lengths.len() && self.lengths[i] == l {
                mult += 1;
                i += 1;
            }
            centralizer *= BigUint::from(l).pow(mult);
            centralizer *= factorial(mult as usize);
        }
        factorial(n) / centralizer
    }
}

pub(crate) fn factorial(n: usize) -> num_bigint::BigUint {
    (1..=n).fold(num_bigint::BigUint::from(1u32), |acc, k| acc * k)
}

impl fmt::Display for CycleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        let mut i = 0;
        let mut first = true;
        while i < self.lengths.len() {
            let l = self.lengths[i];
            let mut mult = 0;
            while i < self.lengths.len() && self.lengths[i] == l {
                mult += 1;
                i += 1;
            }
            if !first {
                f.write_str(",")?;
            }
            first = false;
            if mult == 1 {
                write!(f, "{l}")?;
            } else {
                write!(f, "{l}^{mult}")?;
            }
        }
        f.write_str(")")
    }
}

/// Output of [`Permutation::cycle_structure`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleStructure {
    pub cycle_type: CycleType,
    /// Moved points, 1-based.
    pub support: Vec<usize>,
    pub parity: i8,
    pub order: u64,
}

/// Parses `"(…)"` against an explicit degree; see [`Permutation::parse_cycles`].
pub fn parse_cycles(text: &str, degree: usize) -> Result<Permutation> {
    Permutation::parse_cycles(text, degree)
}

/// Parses cycle notation, taking the degree from the largest point named.
impl FromStr for Permutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let max = s
            .split(|c: char| !c.is_ascii_digit())
            .filter_map(|t| t.parse::<usize>().ok())
            .max()
            .unwrap_or(1);
        Permutation::parse_cycles(s, max.max(1))
    }
}
