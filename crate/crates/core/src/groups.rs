//! Permutation groups via a base and strong generating set.
//!
//! [`PermGroup::new`] runs deterministic Schreier–Sims. The base is chosen
//! greedily: whenever a new base point is needed it is the smallest point
//! moved by the element that forced it.

use std::collections::{HashSet, VecDeque};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use rand::Rng;

use crate::error::{Error, Result};
use crate::perm::{factorial, Permutation};

/// Default cap on conjugacy-orbit breadth-first searches.
pub const DEFAULT_ORBIT_CAP: usize = 10_000_000;

#[derive(Clone, Debug)]
struct Level {
    base_point: usize,
    /// Strong generators fixing every earlier base point.
    gens: Vec<Permutation>,
    orbit: Vec<usize>,
    /// `transversal[γ] = u` with `u(base_point) = γ`, plus its inverse.
    transversal: Vec<Option<(Permutation, Permutation)>>,
}

impl Level {
    fn new(degree: usize, base_point: usize) -> Self {
        let mut level = Level {
            base_point,
            gens: Vec::new(),
            orbit: Vec::new(),
            transversal: vec![None; degree],
        };
        level.recompute(degree);
        level
    }

    fn recompute(&mut self, degree: usize) {
        let id = Permutation::identity(degree);
        self.transversal = vec![None; degree];
        self.transversal[self.base_point] = Some((id.clone(), id));
        self.orbit = vec![self.base_point];
        let mut head = 0;
        while head < self.orbit.len() {
            let beta = self.orbit[head];
            head += 1;
            for g in &self.gens {
                let gamma = g.apply(beta);
                if self.transversal[gamma].is_none() {
                    let (u, _) = self.transversal[beta].as_ref().unwrap();
                    let v = g.compose_unchecked(u);
                    let v_inv = v.inverse();
                    self.transversal[gamma] = Some((v, v_inv));
                    self.orbit.push(gamma);
                }
            }
        }
    }
}

/// Whether a group is the full symmetric or alternating group on the
/// points it moves.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Giant {
    Alternating,
    Symmetric,
}

/// Outcome of [`PermGroup::conjugacy_orbit_contains`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrbitVerdict {
    Yes,
    No,
    Capped,
}

#[derive(Clone, Debug)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Permutation>,
    levels: Vec<Level>,
    order: BigUint,
}

impl PermGroup {
    /// Builds the base and strong generating set of `⟨gens⟩`.
    pub fn new(gens: &[Permutation]) -> Result<Self> {
        let Some(first) = gens.first() else {
            return Err(Error::InvalidArgument("empty generator list".into()));
        };
        let degree = first.degree();
        if let Some(bad) = gens.iter().find(|g| g.degree() != degree) {
            return Err(Error::DegreeMismatch(degree, bad.degree()));
        }
        let mut group = PermGroup {
            degree,
            generators: gens.to_vec(),
            levels: Vec::new(),
            order: BigUint::one(),
        };
        group.schreier_sims();
        Ok(group)
    }

    fn base_fixes(&self, g: &Permutation, upto: usize) -> bool {
        self.levels[..upto]
            .iter()
            .all(|l| g.apply(l.base_point) == l.base_point)
    }

    fn push_level_for(&mut self, g: &Permutation) {
        let point = (0..self.degree)
            .find(|&i| g.apply(i) != i)
            .expect("non-identity element moves a point");
        self.levels.push(Level::new(self.degree, point));
    }

    fn schreier_sims(&mut self) {
        let mut seen = HashSet::new();
        let strong: Vec<Permutation> = self
            .generators
            .iter()
            .filter(|g| !g.is_identity() && seen.insert((*g).clone()))
            .cloned()
            .collect();
        for g in &strong {
            if self.base_fixes(g, self.levels.len()) {
                self.push_level_for(g);
            }
        }
        for g in &strong {
            let fixes = self
                .levels
                .iter()
                .take_while(|l| g.apply(l.base_point) == l.base_point)
                .count();
            // g belongs to the gens of every level up to and including `fixes`.
            for level in self.levels.iter_mut().take(fixes + 1) {
                level.gens.push(g.clone());
            }
        }
        for level in &mut self.levels {
            level.recompute(self.degree);
        }

        let mut i = self.levels.len() as isize - 1;
        while i >= 0 {
            let li = i as usize;
            match self.find_new_strong_generator(li) {
                Some((h, j)) => {
                    if j == self.levels.len() {
                        self.push_level_for(&h);
                    }
                    for level in &mut self.levels[li + 1..=j] {
                        level.gens.push(h.clone());
                        level.recompute(self.degree);
                    }
                    i = j as isize;
                }
                None => i -= 1,
            }
        }
        self.order = self
            .levels
            .iter()
            .fold(BigUint::one(), |acc, l| acc * BigUint::from(l.orbit.len()));
    }

    /// Tests every Schreier generator of level `li` by sifting through the
    /// deeper levels; returns the first residue that is not the identity.
    fn find_new_strong_generator(&self, li: usize) -> Option<(Permutation, usize)> {
        let level = &self.levels[li];
        for &beta in &level.orbit {
            let (u_beta, _) = level.transversal[beta].as_ref().unwrap();
            for x in &level.gens {
                let gamma = x.apply(beta);
                let (u_gamma, u_gamma_inv) = level.transversal[gamma].as_ref().unwrap();
                let xu = x.compose_unchecked(u_beta);
                if &xu == u_gamma {
                    continue;
                }
                let schreier = u_gamma_inv.compose_unchecked(&xu);
                let (h, j) = self.strip(schreier, li + 1);
                if j < self.levels.len() || !h.is_identity() {
                    return Some((h, j));
                }
            }
        }
        None
    }

    /// Sifts `g` from level `start`; returns the residue and the level where it stopped.
    fn strip(&self, mut g: Permutation, start: usize) -> (Permutation, usize) {
        for (t, level) in self.levels.iter().enumerate().skip(start) {
            let gamma = g.apply(level.base_point);
            match &level.transversal[gamma] {
                Some((_, u_inv)) => g = u_inv.compose_unchecked(&g),
                None => return (g, t),
            }
        }
        (g, self.levels.len())
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    /// Base points, 1-based.
    pub fn base(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.base_point + 1).collect()
    }

    pub fn transversal_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.orbit.len()).collect()
    }

    pub fn strong_generators(&self) -> Vec<Permutation> {
        let mut seen = HashSet::new();
        self.levels
            .iter()
            .flat_map(|l| l.gens.iter())
            .filter(|g| seen.insert((*g).clone()))
            .cloned()
            .collect()
    }

    pub fn order(&self) -> &BigUint {
        &self.order
    }

    pub fn order_u128(&self) -> u128 {
        self.order.to_u128().expect("group order fits in u128")
    }

    pub fn contains(&self, x: &Permutation) -> Result<bool> {
        if x.degree() != self.degree {
            return Err(Error::DegreeMismatch(self.degree, x.degree()));
        }
        let (h, j) = self.strip(x.clone(), 0);
        Ok(j == self.levels.len() && h.is_identity())
    }

    /// Uniform element: one independent transversal choice per level.
    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> Permutation {
        let mut g = Permutation::identity(self.degree);
        for level in &self.levels {
            let gamma = level.orbit[rng.gen_range(0..level.orbit.len())];
            let (u, _) = level.transversal[gamma].as_ref().unwrap();
            g = g.compose_unchecked(u);
        }
        g
    }

    /// Points moved by some generator, 0-based and sorted.
    pub fn moved_points(&self) -> Vec<usize> {
        (0..self.degree)
            .filter(|&i| self.generators.iter().any(|g| g.apply(i) != i))
            .collect()
    }

    /// Orbit of a 1-based point, 1-based and sorted.
    pub fn orbit_of_point(&self, point: usize) -> Vec<usize> {
        let mut seen = vec![false; self.degree];
        let mut queue = vec![point - 1];
        seen[point - 1] = true;
        while let Some(x) = queue.pop() {
            for g in &self.generators {
                let y = g.apply(x);
                if !seen[y] {
                    seen[y] = true;
                    queue.push(y);
                }
            }
        }
        (0..self.degree)
            .filter(|&i| seen[i])
            .map(|i| i + 1)
            .collect()
    }

    /// Detects `Alt(S)` or `Sym(S)` for `S` the moved points, by order.
    pub fn giant_on_support(&self) -> Option<Giant> {
        let support = self.moved_points();
        let n = support.len();
        if n < 2 {
            return None;
        }
        // ⟨gens⟩ ≤ Sym(S); an index-2 subgroup of Sym(S) is Alt(S).
        let full = factorial(n);
        if self.order == full {
            Some(Giant::Symmetric)
        } else if n >= 3 && &self.order * 2u32 == full {
            Some(Giant::Alternating)
        } else {
            None
        }
    }

    /// Decides whether `target` lies in `{g ▷ x : g ∈ G}`.
    ///
    /// Full alternating and symmetric groups on the moved points are
    /// decided from cycle data; everything else by breadth-first search
    /// over generator conjugation, stopping at `cap` orbit elements.
    pub fn conjugacy_orbit_contains(
        &self,
        x: &Permutation,
        target: &Permutation,
        cap: usize,
    ) -> Result<OrbitVerdict> {
        if cap < 1 {
            return Err(Error::InvalidArgument("orbit cap must be ≥ 1".into()));
        }
        for p in [x, target] {
            if p.degree() != self.degree {
                return Err(Error::DegreeMismatch(self.degree, p.degree()));
            }
        }
        if x == target {
            return Ok(OrbitVerdict::Yes);
        }
        if let Some(verdict) = self.giant_conjugacy(x, target)? {
            return Ok(if verdict {
                OrbitVerdict::Yes
            } else {
                OrbitVerdict::No
            });
        }
        let mut seen: HashSet<Permutation> = HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert(x.clone());
        queue.push_back(x.clone());
        while let Some(y) = queue.pop_front() {
            for g in &self.generators {
                let z = g.conjugate_unchecked(&y);
                if z == *target {
                    return Ok(OrbitVerdict::Yes);
                }
                if !seen.contains(&z) {
                    if seen.len() >= cap {
                        return Ok(OrbitVerdict::Capped);
                    }
                    seen.insert(z.clone());
                    queue.push_back(z);
                }
            }
        }
        Ok(OrbitVerdict::No)
    }

    /// Full conjugacy orbit of `x` (breadth-first, generator conjugation).
    pub fn conjugacy_orbit(&self, x: &Permutation, cap: usize) -> Result<Vec<Permutation>> {
        if x.degree() != self.degree {
            return Err(Error::DegreeMismatch(self.degree, x.degree()));
        }
        let mut seen: HashSet<Permutation> = HashSet::new();
        let mut orbit = vec![x.clone()];
        seen.insert(x.clone());
        let mut head = 0;
        while head < orbit.len() {
            let y = orbit[head].clone();
            head += 1;
            for g in &self.generators {
                let z = g.conjugate_unchecked(&y);
                if seen.insert(z.clone()) {
                    if orbit.len() >= cap {
                        return Err(Error::Indeterminate(cap));
                    }
                    orbit.push(z);
                }
            }
        }
        Ok(orbit)
    }

    /// Size of the `G`-conjugacy class of `x`, by cycle data for giants and
    /// by orbit enumeration otherwise.
    pub fn class_size(&self, x: &Permutation, cap: usize) -> Result<BigUint> {
        if let Some((giant, restricted)) = self.restrict_to_giant(x) {
            let ty = restricted.cycle_type();
            let sym = ty.symmetric_class_size();
            return Ok(match giant {
                Giant::Alternating if ty.splits_in_alternating() => sym / 2u32,
                _ => sym,
            });
        }
        Ok(BigUint::from(self.conjugacy_orbit(x, cap)?.len()))
    }

    /// For a giant `G` on support `S` and `x` preserving `S`: `x|_S`.
    fn restrict_to_giant(&self, x: &Permutation) -> Option<(Giant, Permutation)> {
        let giant = self.giant_on_support()?;
        let support = self.moved_points();
        let restricted = restrict(x, &support)?;
        Some((giant, restricted))
    }

    fn giant_conjugacy(&self, x: &Permutation, target: &Permutation) -> Result<Option<bool>> {
        let Some(giant) = self.giant_on_support() else {
            return Ok(None);
        };
        let support = self.moved_points();
        let in_support: Vec<bool> = (0..self.degree)
            .map(|i| support.binary_search(&i).is_ok())
            .collect();
        // Conjugation by G never changes the action off S.
        if (0..self.degree).any(|i| !in_support[i] && x.apply(i) != target.apply(i)) {
            return Ok(Some(false));
        }
        let (Some(xr), Some(tr)) = (restrict(x, &support), restrict(target, &support)) else {
            return Ok(None);
        };
        Ok(Some(match giant {
            Giant::Symmetric => xr.cycle_type() == tr.cycle_type(),
            Giant::Alternating => alternating_conjugate(&xr, &tr, support.len())?,
        }))
    }
}

/// Restriction of `x` to a sorted 0-based point set it preserves, relabelled to `0..n`.
fn restrict(x: &Permutation, points: &[usize]) -> Option<Permutation> {
    let mut images = Vec::with_capacity(points.len());
    for &p in points {
        let img = x.apply(p);
        images.push(points.binary_search(&img).ok()? as u32);
    }
    Some(Permutation::from_images_unchecked(images))
}

/// Builds `⟨gens⟩`; see [`PermGroup::new`].
pub fn build_bsgs(gens: &[Permutation]) -> Result<PermGroup> {
    PermGroup::new(gens)
}

/// Standard two generators of `A_m` (`m ≥ 3`).
pub fn alternating_generators(m: usize) -> Vec<Permutation> {
    assert!(m >= 3);
    let three = Permutation::from_cycles(m, &[vec![1, 2, 3]]).unwrap();
    let long = if m % 2 == 1 {
        Permutation::from_cycles(m, &[(1..=m).collect()]).unwrap()
    } else {
        Permutation::from_cycles(m, &[(2..=m).collect()]).unwrap()
    };
    vec![three, long]
}

/// Some `g` with `g ▷ x = y`, built by aligning cycle decompositions of equal type.
pub fn aligning_conjugator(x: &Permutation, y: &Permutation) -> Option<Permutation> {
    if x.degree() != y.degree() || x.cycle_type() != y.cycle_type() {
        return None;
    }
    let mut xc = x.cycles_with_fixed();
    let mut yc = y.cycles_with_fixed();
    xc.sort_by_key(|c| c.len());
    yc.sort_by_key(|c| c.len());
    let mut images = vec![0u32; x.degree()];
    for (a, b) in xc.iter().zip(&yc) {
        for (&ai, &bi) in a.iter().zip(b) {
            images[ai] = bi as u32;
        }
    }
    Some(Permutation::from_images_unchecked(images))
}

/// Whether `tau` is conjugate to `sigma` in `A_m`.
///
/// Same cycle type gives an `S_m`-conjugator `g`; if `g` is odd the answer
/// is still yes exactly when the type is not all-odd-distinct, because only
/// then does the centralizer of `sigma` contain an odd element.
pub fn alternating_conjugate(sigma: &Permutation, tau: &Permutation, m: usize) -> Result<bool> {
    for p in [sigma, tau] {
        if p.degree() != m {
            return Err(Error::DegreeMismatch(m, p.degree()));
        }
    }
    let Some(g) = aligning_conjugator(sigma, tau) else {
        return Ok(false);
    };
    if g.is_even() {
        return Ok(true);
    }
    Ok(!sigma.cycle_type().splits_in_alternating())
}

/// Uniformly random even permutation of degree `m`.
pub fn random_even_permutation<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Permutation {
    use rand::seq::SliceRandom;
    let mut images: Vec<u32> = (0..m as u32).collect();
    images.shuffle(rng);
    let mut g = Permutation::from_images_unchecked(images);
    if !g.is_even() && m >= 2 {
        // Right-multiplying by (1 2) is a bijection from odd to even permutations.
        let t = Permutation::from_cycles(m, &[vec![1, 2]]).unwrap();
        g = g.compose_unchecked(&t);
    }
    g
}
