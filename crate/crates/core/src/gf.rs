//! Finite fields `GF(s^a)` as polynomials over `GF(s)` modulo a fixed
//! irreducible polynomial.
//!
//! Elements are coefficient vectors `(c_0, …, c_{a−1})`, low degree first.
//! The index of an element is `Σ c_i s^i`; [`FieldSpec::label`] adds one to
//! get a point of `{1, …, q}`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numth::{prime_factors, prime_power_decompose};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldSpec {
    characteristic: u32,
    degree: u32,
    /// Monic modulus, low degree first, length `degree + 1`.
    modulus: Vec<u32>,
}

impl FieldSpec {
    /// Builds `GF(q)` with the smallest monic irreducible modulus, where
    /// candidates `x^a + Σ c_i x^i` are ordered by the integer `Σ c_i s^i`.
    pub fn new(q: u64) -> Result<Arc<FieldSpec>> {
        let Some((s, a)) = prime_power_decompose(q.max(2))?.filter(|_| q >= 2) else {
            return Err(Error::InvalidArgument(format!("{q} is not a prime power")));
        };
        if q > 1 << 20 {
            return Err(Error::InvalidArgument(format!("field size {q} too large")));
        }
        let s = s as u32;
        let modulus = if a == 1 {
            vec![0, 1]
        } else {
            smallest_irreducible(s, a)
        };
        Ok(Arc::new(FieldSpec {
            characteristic: s,
            degree: a,
            modulus,
        }))
    }

    pub fn characteristic(&self) -> u32 {
        self.characteristic
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn size(&self) -> u64 {
        (self.characteristic as u64).pow(self.degree)
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    fn coeffs_of_index(&self, mut index: u64) -> Vec<u32> {
        let s = self.characteristic as u64;
        (0..self.degree)
            .map(|_| {
                let c = (index % s) as u32;
                index /= s;
                c
            })
            .collect()
    }

    fn index_of_coeffs(&self, coeffs: &[u32]) -> u64 {
        coeffs
            .iter()
            .rev()
            .fold(0u64, |acc, &c| acc * self.characteristic as u64 + c as u64)
    }

    fn add_coeffs(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        let s = self.characteristic;
        a.iter().zip(b).map(|(x, y)| (x + y) % s).collect()
    }

    fn sub_coeffs(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        let s = self.characteristic;
        a.iter().zip(b).map(|(x, y)| (x + s - y) % s).collect()
    }

    fn mul_coeffs(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        let s = self.characteristic as u64;
        let n = self.degree as usize;
        let mut prod = vec![0u64; 2 * n];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u64 * y as u64) % s;
            }
        }
        // Reduce by the monic modulus from the top down.
        for top in (n..2 * n).rev() {
            let c = prod[top];
            if c == 0 {
                continue;
            }
            prod[top] = 0;
            for (k, &m) in self.modulus[..n].iter().enumerate() {
                let idx = top - n + k;
                prod[idx] = (prod[idx] + (s - c) * m as u64) % s;
            }
        }
        prod[..n].iter().map(|&c| c as u32).collect()
    }

    /// Element with the given index in `0..q`.
    pub fn element(self: &Arc<Self>, index: u64) -> FieldElement {
        assert!(index < self.size(), "index {index} out of range");
        FieldElement {
            field: Arc::clone(self),
            coeffs: self.coeffs_of_index(index),
        }
    }

    pub fn zero(self: &Arc<Self>) -> FieldElement {
        self.element(0)
    }

    pub fn one(self: &Arc<Self>) -> FieldElement {
        self.element(1)
    }

    pub fn elements(self: &Arc<Self>) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.size()).map(move |i| self.element(i))
    }

    /// Point label in `{1, …, q}`: `1 + Σ c_i s^i`.
    pub fn label(&self, x: &FieldElement) -> usize {
        self.index_of_coeffs(&x.coeffs) as usize + 1
    }

    pub fn from_label(self: &Arc<Self>, label: usize) -> FieldElement {
        self.element(label as u64 - 1)
    }

    /// First element, in index order, whose multiplicative order is `q − 1`.
    pub fn primitive_element(self: &Arc<Self>) -> FieldElement {
        let q = self.size();
        let group_order = q - 1;
        let factors = prime_factors(group_order);
        for idx in 1..q {
            let x = self.element(idx);
            if factors
                .iter()
                .all(|&f| x.pow(group_order / f) != self.one())
            {
                return x;
            }
        }
        unreachable!("every finite field has a primitive element")
    }
}

/// Polynomial `x^a + …` over `GF(s)` given by its `a` lower coefficients.
fn is_irreducible(s: u32, lower: &[u32]) -> bool {
    let a = lower.len();
    let mut f: Vec<u32> = lower.to_vec();
    f.push(1);
    for d in 1..=a / 2 {
        let count = (s as u64).pow(d as u32);
        for idx in 0..count {
            let mut g = Vec::with_capacity(d + 1);
            let mut rest = idx;
            for _ in 0..d {
                g.push((rest % s as u64) as u32);
                rest /= s as u64;
            }
            g.push(1);
            if poly_rem_is_zero(s, &f, &g) {
                return false;
            }
        }
    }
    true
}

fn poly_rem_is_zero(s: u32, f: &[u32], g: &[u32]) -> bool {
    let s = s as u64;
    let mut r: Vec<u64> = f.iter().map(|&c| c as u64).collect();
    let dg = g.len() - 1;
    for top in (dg..r.len()).rev() {
        let c = r[top];
        if c == 0 {
            continue;
        }
        for (k, &gk) in g.iter().enumerate() {
            let idx = top - dg + k;
            r[idx] = (r[idx] + (s - c) * gk as u64) % s;
        }
    }
    r.iter().all(|&c| c == 0)
}

fn smallest_irreducible(s: u32, a: u32) -> Vec<u32> {
    let a = a as usize;
    let count = (s as u64).pow(a as u32);
    // Candidates in order of their encoding Σ c_i s^i.
    for idx in 0..count {
        let mut lower = vec![0u32; a];
        let mut rest = idx;
        for slot in lower.iter_mut() {
            *slot = (rest % s as u64) as u32;
            rest /= s as u64;
        }
        if is_irreducible(s, &lower) {
            lower.push(1);
            return lower;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldElement {
    field: Arc<FieldSpec>,
    coeffs: Vec<u32>,
}

impl std::hash::Hash for FieldSpec {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.characteristic.hash(state);
        self.modulus.hash(state);
    }
}

impl FieldElement {
    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn index(&self) -> u64 {
        self.field.index_of_coeffs(&self.coeffs)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    fn same_field(&self, other: &FieldElement) -> Result<()> {
        if Arc::ptr_eq(&self.field, &other.field) || self.field == other.field {
            Ok(())
        } else {
            Err(Error::MixedFields)
        }
    }

    fn with(&self, coeffs: Vec<u32>) -> FieldElement {
        FieldElement {
            field: Arc::clone(&self.field),
            coeffs,
        }
    }

    pub fn add(&self, other: &FieldElement) -> Result<FieldElement> {
        self.same_field(other)?;
        Ok(self.with(self.field.add_coeffs(&self.coeffs, &other.coeffs)))
    }

    pub fn sub(&self, other: &FieldElement) -> Result<FieldElement> {
        self.same_field(other)?;
        Ok(self.with(self.field.sub_coeffs(&self.coeffs, &other.coeffs)))
    }

    pub fn mul(&self, other: &FieldElement) -> Result<FieldElement> {
        self.same_field(other)?;
        Ok(self.with(self.field.mul_coeffs(&self.coeffs, &other.coeffs)))
    }

    pub fn neg(&self) -> FieldElement {
        self.field.zero().sub(self).expect("same field")
    }

    pub fn pow(&self, mut exp: u64) -> FieldElement {
        let mut acc = self.field.one();
        let mut base = self.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&base).expect("same field");
            }
            base = base.mul(&base).expect("same field");
            exp >>= 1;
        }
        acc
    }

    /// `x^(q−2)`.
    pub fn inv(&self) -> Result<FieldElement> {
        if self.is_zero() {
            return Err(Error::ZeroInverse);
        }
        Ok(self.pow(self.field.size() - 2))
    }

    /// Multiplicative order of a nonzero element.
    pub fn multiplicative_order(&self) -> Result<u64> {
        if self.is_zero() {
            return Err(Error::ZeroInverse);
        }
        let mut order = self.field.size() - 1;
        for f in prime_factors(order) {
            while order.is_multiple_of(f) && self.pow(order / f) == self.field.one() {
                order /= f;
            }
        }
        Ok(order)
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})#{}", self.field.size(), self.index())
    }
}

pub fn make_field(q: u64) -> Result<Arc<FieldSpec>> {
    FieldSpec::new(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn gf8_modulus_is_x3_x_1() {
        let f = make_field(8).unwrap();
        assert_eq!(f.modulus(), &[1, 1, 0, 1]);
        assert_eq!((f.characteristic(), f.degree(), f.size()), (2, 3, 8));
    }

    #[test]
    fn prime_field_and_errors() {
        let f = make_field(7).unwrap();
        assert_eq!((f.characteristic(), f.degree()), (7, 1));
        assert!(make_field(6).is_err());
        assert!(make_field(1).is_err());
    }

    #[test]
    fn smallest_modulus_by_root_free_enumeration() {
        // Degree 2 and 3 polynomials are irreducible iff root-free.
        for (q, s, a) in [
            (4u64, 2u32, 2u32),
            (8, 2, 3),
            (9, 3, 2),
            (25, 5, 2),
            (27, 3, 3),
        ] {
            let mut expected = None;
            'outer: for idx in 0..(s as u64).pow(a) {
                let mut lower = vec![0u32; a as usize];
                let mut rest = idx;
                for slot in lower.iter_mut() {
                    *slot = (rest % s as u64) as u32;
                    rest /= s as u64;
                }
                for x in 0..s as u64 {
                    let mut val = 1u64;
                    for _ in 0..a {
                        val = val * x % s as u64;
                    }
                    for (i, &c) in lower.iter().enumerate() {
                        val = (val + c as u64 * x.pow(i as u32)) % s as u64;
                    }
                    if val == 0 {
                        continue 'outer;
                    }
                }
                lower.push(1);
                expected = Some(lower);
                break;
            }
            assert_eq!(
                make_field(q).unwrap().modulus(),
                expected.unwrap().as_slice(),
                "q={q}"
            );
        }
    }

    #[test]
    fn gf8_arithmetic() {
        let f = make_field(8).unwrap();
        let x = f.element(2); // coefficients (0,1,0)
        let x2 = x.mul(&x).unwrap();
        assert_eq!(x2.coeffs(), &[0, 0, 1]);
        let x3 = x.mul(&x2).unwrap();
        assert_eq!(x3.coeffs(), &[1, 1, 0]);
        assert_eq!(x.add(&f.zero()).unwrap(), x);
    }

    #[test]
    fn gf5_inverse() {
        let f = make_field(5).unwrap();
        assert_eq!(f.element(2).inv().unwrap(), f.element(3));
        assert_eq!(f.zero().inv(), Err(Error::ZeroInverse));
    }

    #[test]
    fn mixed_fields_rejected() {
        let a = make_field(5).unwrap().element(1);
        let b = make_field(7).unwrap().element(1);
        assert_eq!(a.add(&b), Err(Error::MixedFields));
    }

    #[test]
    fn primitive_elements() {
        let f8 = make_field(8).unwrap();
        assert_eq!(f8.primitive_element().coeffs(), &[0, 1, 0]);
        let f5 = make_field(5).unwrap();
        assert_eq!(f5.primitive_element(), f5.element(2));
        let f2 = make_field(2).unwrap();
        assert_eq!(f2.primitive_element(), f2.one());
        for q in [3u64, 4, 7, 9, 16, 25, 27, 32, 49, 64, 81, 121, 128, 256] {
            let f = make_field(q).unwrap();
            assert_eq!(f.primitive_element().multiplicative_order().unwrap(), q - 1);
        }
    }

    #[test]
    fn labels() {
        let f8 = make_field(8).unwrap();
        assert_eq!(f8.label(&f8.zero()), 1);
        assert_eq!(f8.label(&f8.element(2)), 3);
        let f5 = make_field(5).unwrap();
        assert_eq!(f5.label(&f5.element(4)), 5);
        for q in [
            2u64, 3, 4, 5, 7, 8, 9, 16, 25, 27, 32, 64, 125, 128, 243, 256,
        ] {
            let f = make_field(q).unwrap();
            let mut labels: Vec<usize> = f.elements().map(|x| f.label(&x)).collect();
            labels.sort_unstable();
            assert_eq!(labels, (1..=q as usize).collect::<Vec<_>>());
            for x in f.elements() {
                assert_eq!(f.from_label(f.label(&x)), x);
            }
        }
    }

    #[test]
    fn field_axioms_exhaustive_small() {
        for q in [4u64, 8, 9] {
            let f = make_field(q).unwrap();
            let all: Vec<_> = f.elements().collect();
            for a in &all {
                if !a.is_zero() {
                    assert_eq!(a.inv().unwrap().mul(a).unwrap(), f.one());
                }
                for b in &all {
                    assert_eq!(a.mul(b).unwrap(), b.mul(a).unwrap());
                    for c in &all {
                        let lhs = a.mul(&b.add(c).unwrap()).unwrap();
                        let rhs = a.mul(b).unwrap().add(&a.mul(c).unwrap()).unwrap();
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn frobenius_is_additive(q in prop::sample::select(vec![4u64, 8, 9, 16, 25, 27, 32, 49, 125]),
                                 i in 0u64..1000, j in 0u64..1000) {
            let f = make_field(q).unwrap();
            let a = f.element(i % q);
            let b = f.element(j % q);
            let s = f.characteristic() as u64;
            prop_assert_eq!(a.add(&b).unwrap().pow(s), a.pow(s).add(&b.pow(s)).unwrap());
        }
    }
}
