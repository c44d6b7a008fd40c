//! Concrete permutation groups: `L_k(r)` on projective points, the affine
//! group `F_q ⋊ F_q^×`, and the natural `p`-cycle classes of `A_m`.

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{FieldElement, FieldSpec};
use crate::groups::{OrbitVerdict, PermGroup, DEFAULT_ORBIT_CAP};
use crate::numth::{is_prime, prime_power_decompose};
use crate::perm::{factorial, Permutation};

/// Normalized representatives of `P^{k−1}(F_r)`, numbered `1..=(r^k−1)/(r−1)`.
#[derive(Clone, Debug)]
pub struct ProjectivePointIndex {
    field: Arc<FieldSpec>,
    dim: usize,
    /// Coordinates as field indices.
    points: Vec<Vec<u64>>,
    lookup: HashMap<Vec<u64>, usize>,
}

impl ProjectivePointIndex {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    /// Coordinates of the 1-based point `label`.
    pub fn point(&self, label: usize) -> &[u64] {
        &self.points[label - 1]
    }

    /// 1-based label of the line through a nonzero vector.
    pub fn label_of(&self, v: &[FieldElement]) -> Option<usize> {
        let lead = v.iter().find(|x| !x.is_zero())?;
        let scale = lead.inv().ok()?;
        let key: Vec<u64> = v.iter().map(|x| x.mul(&scale).unwrap().index()).collect();
        self.lookup.get(&key).map(|i| i + 1)
    }

    /// Permutation of the points induced by `v ↦ M v`.
    pub fn induced_permutation(&self, matrix: &[Vec<FieldElement>]) -> Result<Permutation> {
        let mut images = Vec::with_capacity(self.len());
        for coords in &self.points {
            let v: Vec<FieldElement> = coords.iter().map(|&c| self.field.element(c)).collect();
            let mv: Vec<FieldElement> = matrix
                .iter()
                .map(|row| {
                    row.iter().zip(&v).fold(self.field.zero(), |acc, (a, b)| {
                        acc.add(&a.mul(b).unwrap()).unwrap()
                    })
                })
                .collect();
            let label = self
                .label_of(&mv)
                .ok_or_else(|| Error::InvalidArgument("matrix is singular".into()))?;
            images.push((label - 1) as u32);
        }
        Permutation::from_images(images)
    }
}

pub fn projective_points(k: usize, r: u64) -> Result<ProjectivePointIndex> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("k = {k} < 2")));
    }
    if r < 2 || prime_power_decompose(r)?.is_none() {
        return Err(Error::InvalidArgument(format!("{r} is not a prime power")));
    }
    let field = FieldSpec::new(r)?;
    let total = (r as u128).pow(k as u32);
    if total > 10_000_000 {
        return Err(Error::SizeGuard(format!("{r}^{k} vectors")));
    }
    let mut points = Vec::new();
    // Lexicographic on coordinates, coordinate 0 most significant.
    for idx in 0..total as u64 {
        let mut coords = vec![0u64; k];
        let mut rest = idx;
        for slot in coords.iter_mut().rev() {
            *slot = rest % r;
            rest /= r;
        }
        if coords.iter().find(|&&c| c != 0) == Some(&1) {
            points.push(coords);
        }
    }
    let lookup = points
        .iter()
        .enumerate()
        .map(|(i, c)| (c.clone(), i))
        .collect();
    Ok(ProjectivePointIndex {
        field,
        dim: k,
        points,
        lookup,
    })
}

/// `(r^k − 1)/(r − 1)`.
pub fn projective_degree(k: usize, r: u64) -> u128 {
    ((r as u128).pow(k as u32) - 1) / (r as u128 - 1)
}

/// `|L_k(r)| = r^(k(k−1)/2) · Π_{i=2..k} (r^i − 1) / gcd(k, r − 1)`.
pub fn psl_order(k: usize, r: u64) -> BigUint {
    let rr = BigUint::from(r);
    let mut order = rr.pow((k * (k - 1) / 2) as u32);
    for i in 2..=k as u32 {
        order *= rr.pow(i) - 1u32;
    }
    order / (k as u64).gcd(&(r - 1))
}

/// `L_k(r)` acting on the `(r^k−1)/(r−1)` projective points, for prime degree.
///
/// Generators are the transvections `I + c·E_ij` for `i ≠ j` and `c`
/// running over the power basis `1, ω, …, ω^(a−1)` of `F_r` over its prime
/// field, so every `I + c·E_ij` lies in the generated group.
pub fn psl_permutation_group(k: usize, r: u64) -> Result<PermGroup> {
    let degree = projective_degree(k, r);
    if !is_prime(degree as u64) {
        return Err(Error::InvalidArgument(format!(
            "(r^k−1)/(r−1) = {degree} is not prime"
        )));
    }
    let points = projective_points(k, r)?;
    let field = points.field().clone();
    let omega = field.primitive_element();
    let basis: Vec<FieldElement> = (0..field.degree() as u64).map(|t| omega.pow(t)).collect();
    let mut gens = Vec::new();
    for i in 0..k {
        for j in 0..k {
            if i == j {
                continue;
            }
            for c in &basis {
                let matrix: Vec<Vec<FieldElement>> = (0..k)
                    .map(|a| {
                        (0..k)
                            .map(|b| {
                                if a == b {
                                    field.one()
                                } else if a == i && b == j {
                                    c.clone()
                                } else {
                                    field.zero()
                                }
                            })
                            .collect()
                    })
                    .collect();
                gens.push(points.induced_permutation(&matrix)?);
            }
        }
    }
    PermGroup::new(&gens)
}

/// Order-`p` classes of a group, all represented inside one cyclic subgroup `⟨σ⟩`.
#[derive(Clone, Debug)]
pub struct OrderPClasses {
    /// The order-`p` element whose powers represent every class.
    pub generator: Permutation,
    /// Exponents `ℓ ∈ 1..p` grouped by `G`-class, each group ascending.
    pub exponent_classes: Vec<Vec<u64>>,
}

impl OrderPClasses {
    /// One representative `σ^ℓ` per class, with `ℓ` the least exponent in the class.
    pub fn representatives(&self) -> Vec<Permutation> {
        self.exponent_classes
            .iter()
            .map(|c| self.generator.pow(c[0] as i64))
            .collect()
    }
}

/// Finds an element of order `p` by powering random elements.
pub fn find_order_p_element(g: &PermGroup, p: u64, seed: u64) -> Result<Permutation> {
    if g.order() % BigUint::from(p) != BigUint::from(0u32) {
        return Err(Error::InvalidArgument(format!("{p} does not divide |G|")));
    }
    let budget = 64 * g.order().bits().max(1) as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..budget {
        let x = g.random_element(&mut rng);
        let o = x.order();
        if o.is_multiple_of(p) {
            return Ok(x.pow((o / p) as i64));
        }
    }
    Err(Error::BudgetExhausted(format!(
        "no element of order {p} in {budget} draws"
    )))
}

/// Classes of order-`p` elements, assuming every such class meets one cyclic
/// subgroup of order `p` (true when Sylow `p`-subgroups have order `p`).
pub fn order_p_classes(g: &PermGroup, p: u64, seed: u64) -> Result<OrderPClasses> {
    let sigma = find_order_p_element(g, p, seed)?;
    order_p_classes_of(g, &sigma, p)
}

/// As [`order_p_classes`], with the order-`p` element supplied.
pub fn order_p_classes_of(g: &PermGroup, sigma: &Permutation, p: u64) -> Result<OrderPClasses> {
    let mut classes: Vec<Vec<u64>> = Vec::new();
    for ell in 1..p {
        let x = sigma.pow(ell as i64);
        let mut placed = false;
        for class in classes.iter_mut() {
            let rep = sigma.pow(class[0] as i64);
            match g.conjugacy_orbit_contains(&rep, &x, DEFAULT_ORBIT_CAP)? {
                OrbitVerdict::Yes => {
                    class.push(ell);
                    placed = true;
                    break;
                }
                OrbitVerdict::No => {}
                OrbitVerdict::Capped => return Err(Error::Indeterminate(DEFAULT_ORBIT_CAP)),
            }
        }
        if !placed {
            classes.push(vec![ell]);
        }
    }
    Ok(OrderPClasses {
        generator: sigma.clone(),
        exponent_classes: classes,
    })
}

pub fn order_p_class_reps(g: &PermGroup, p: u64) -> Result<Vec<Permutation>> {
    Ok(order_p_classes(g, p, 0)?.representatives())
}

/// `F_q ⋊ F_q^×` for `q = 2^h`, acting on `{1, …, q}` through field labels.
pub fn affine_frobenius_group(h: u32) -> Result<PermGroup> {
    if h < 2 {
        return Err(Error::InvalidArgument(format!("h = {h} < 2")));
    }
    if h > 20 {
        return Err(Error::SizeGuard(format!("q = 2^{h}")));
    }
    let field = FieldSpec::new(1u64 << h)?;
    let generator = field.primitive_element();
    let one = field.one();
    let q = field.size() as usize;
    let mut translation = vec![0u32; q];
    let mut dilation = vec![0u32; q];
    for x in field.elements() {
        let from = field.label(&x) - 1;
        translation[from] = (field.label(&x.add(&one)?) - 1) as u32;
        dilation[from] = (field.label(&x.mul(&generator)?) - 1) as u32;
    }
    PermGroup::new(&[
        Permutation::from_images(translation)?,
        Permutation::from_images(dilation)?,
    ])
}

/// `σ = (1 2 … p)` in degree `m` with the size of its `A_m`-class.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NaturalClass {
    pub p: u64,
    pub m: usize,
    pub sigma: Permutation,
    #[serde(with = "crate::decimal")]
    pub class_size: BigUint,
}

pub fn natural_class(p: u64, m: usize) -> Result<NaturalClass> {
    check_prime_and_degree(p, m)?;
    let sigma = natural_cycle(p as usize, m);
    // Types (p) and (1,p) are all-odd-distinct, so the S_m-class splits.
    let class_size = sigma.cycle_type().symmetric_class_size() / 2u32;
    Ok(NaturalClass {
        p,
        m,
        sigma,
        class_size,
    })
}

pub(crate) fn check_prime_and_degree(p: u64, m: usize) -> Result<()> {
    if p < 5 || !is_prime(p) {
        return Err(Error::InvalidArgument("p must be prime ≥ 5".into()));
    }
    if m as u64 != p && m as u64 != p + 1 {
        return Err(Error::InvalidArgument(format!(
            "m must be {p} or {}",
            p + 1
        )));
    }
    Ok(())
}

/// `(1 2 … p)` in degree `m`.
pub fn natural_cycle(p: usize, m: usize) -> Permutation {
    Permutation::from_cycles(m, &[(1..=p).collect()]).expect("p ≤ m")
}

/// `g ▷ G`: the group generated by the conjugated generators.
pub fn conjugate_group(g: &Permutation, group: &PermGroup) -> Result<PermGroup> {
    let gens = group
        .generators()
        .iter()
        .map(|x| g.conjugate(x))
        .collect::<Result<Vec<_>>>()?;
    PermGroup::new(&gens)
}

/// The group with each generator extended by fixed points to degree `m`.
pub fn extend_group(group: &PermGroup, m: usize) -> Result<PermGroup> {
    let gens = group
        .generators()
        .iter()
        .map(|x| x.extend(m))
        .collect::<Result<Vec<_>>>()?;
    PermGroup::new(&gens)
}

/// `m!/2`.
pub fn alternating_order(m: usize) -> BigUint {
    if m < 2 {
        BigUint::one()
    } else {
        factorial(m) / 2u32
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::alternating_conjugate;
    use crate::numth::jacobi;

    #[test]
    fn projective_point_counts() {
        assert_eq!(projective_points(3, 3).unwrap().len(), 13);
        assert_eq!(projective_points(2, 4).unwrap().len(), 5);
        assert_eq!(projective_points(2, 2).unwrap().len(), 3);
        assert_eq!(projective_points(5, 2).unwrap().len(), 31);
        assert!(projective_points(2, 6).is_err());
        assert!(projective_points(1, 4).is_err());
    }

    #[test]
    fn projective_points_are_normalized_and_sorted() {
        let pts = projective_points(3, 4).unwrap();
        assert_eq!(pts.len(), 21);
        let all: Vec<&[u64]> = (1..=pts.len()).map(|i| pts.point(i)).collect();
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        for p in all {
            assert_eq!(p.iter().find(|&&c| c != 0), Some(&1));
        }
    }

    #[test]
    fn psl_orders() {
        for (k, r, order) in [
            (3usize, 3u64, 5616u128),
            (2, 4, 60),
            (3, 2, 168),
            (2, 16, 4080),
        ] {
            let g = psl_permutation_group(k, r).unwrap();
            assert_eq!(g.order_u128(), order, "L_{k}({r})");
            assert_eq!(g.order(), &psl_order(k, r));
            assert_eq!(g.degree() as u128, projective_degree(k, r));
        }
        assert!(psl_permutation_group(2, 3).is_err()); // degree 4
    }

    #[test]
    fn psl_matches_order_formula_for_more_cases() {
        for (k, r) in [(2usize, 5u64), (2, 8), (5, 2), (3, 5)] {
            if is_prime(projective_degree(k, r) as u64) {
                let g = psl_permutation_group(k, r).unwrap();
                assert_eq!(g.order(), &psl_order(k, r), "L_{k}({r})");
            }
        }
    }

    #[test]
    fn psl_is_two_transitive_and_even() {
        for (k, r) in [(3usize, 2u64), (2, 4), (3, 3), (2, 5), (5, 2)] {
            if !is_prime(projective_degree(k, r) as u64) {
                continue;
            }
            let g = psl_permutation_group(k, r).unwrap();
            let n = g.degree();
            assert!(g.generators().iter().all(Permutation::is_even));
            let mut seen = vec![vec![false; n]; n];
            let mut stack = vec![(0usize, 1usize)];
            seen[0][1] = true;
            let mut count = 1;
            while let Some((a, b)) = stack.pop() {
                for x in g.generators() {
                    let (c, d) = (x.apply(a), x.apply(b));
                    if !seen[c][d] {
                        seen[c][d] = true;
                        count += 1;
                        stack.push((c, d));
                    }
                }
            }
            assert_eq!(count, n * (n - 1), "L_{k}({r}) not 2-transitive");
        }
    }

    #[test]
    fn class_counts_and_split() {
        for (k, r, p) in [(3usize, 2u64, 7u64), (3, 3, 13), (2, 4, 5), (2, 5, 31)] {
            if projective_degree(k, r) != p as u128 {
                // (2,5) has degree 6; skip non-prime degrees.
                continue;
            }
            let g = psl_permutation_group(k, r).unwrap();
            let classes = order_p_classes(&g, p, 3).unwrap();
            let t = classes.exponent_classes.len() as u64;
            assert_eq!(t, (p - 1) / k as u64, "L_{k}({r})");
            assert_eq!(t % 2, 0);
            let sigma = &classes.generator;
            let same = classes
                .representatives()
                .iter()
                .filter(|x| alternating_conjugate(sigma, x, p as usize).unwrap())
                .count();
            assert_eq!(2 * same as u64, t);
            for class in &classes.exponent_classes {
                let signs: Vec<i8> = class
                    .iter()
                    .map(|&l| jacobi(l as i64, p).unwrap())
                    .collect();
                assert!(signs.iter().all(|&s| s == signs[0]));
            }
        }
    }

    #[test]
    fn order_p_reps_errors() {
        let g = psl_permutation_group(3, 2).unwrap();
        assert!(order_p_class_reps(&g, 5).is_err());
        assert_eq!(order_p_class_reps(&g, 7).unwrap().len(), 2);
        let a5 = psl_permutation_group(2, 4).unwrap();
        assert_eq!(order_p_class_reps(&a5, 5).unwrap().len(), 2);
    }

    #[test]
    fn frobenius_groups() {
        let g = affine_frobenius_group(3).unwrap();
        assert_eq!((g.degree(), g.order_u128()), (8, 56));
        let g = affine_frobenius_group(2).unwrap();
        assert_eq!((g.degree(), g.order_u128()), (4, 12));
        let g = affine_frobenius_group(5).unwrap();
        assert_eq!((g.degree(), g.order_u128()), (32, 992));
        assert!(g.generators()[1].is_cycle_of_length(31));
        assert_eq!(g.generators()[1].image_of(1), 1);
        assert!(affine_frobenius_group(1).is_err());
    }

    #[test]
    fn natural_classes() {
        assert_eq!(natural_class(5, 5).unwrap().class_size, 12u32.into());
        assert_eq!(natural_class(7, 7).unwrap().class_size, 360u32.into());
        assert_eq!(natural_class(5, 6).unwrap().class_size, 72u32.into());
        assert_eq!(natural_class(7, 8).unwrap().class_size, 2880u32.into());
        assert_eq!(
            natural_class(7, 7).unwrap().sigma.to_string(),
            "(1 2 3 4 5 6 7)"
        );
        assert!(natural_class(4, 4).is_err());
        assert!(natural_class(3, 3).is_err());
        assert!(natural_class(5, 7).is_err());
    }
}
