//! Finite racks given by their operation table, and the type-D pair test
//! for conjugation racks.
//!
//! `table[i][j]` is the index of `x_i ▷ x_j`. For a conjugation rack the
//! elements are permutations and `x ▷ y = x y x⁻¹`.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groups::{PermGroup, DEFAULT_ORBIT_CAP};
use crate::perm::Permutation;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteRack {
    table: Vec<Vec<u32>>,
    labels: Option<Vec<String>>,
    degree: Option<usize>,
    elements: Option<Vec<Permutation>>,
}

#[derive(Serialize, Deserialize)]
struct RackJson {
    size: usize,
    table: Vec<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    degree: Option<usize>,
}

/// First failure found by [`FiniteRack::validate`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RackViolation {
    /// Wrong row length or an entry out of range.
    Shape { row: usize },
    /// Left translation by `row` is not injective.
    NotBijective { row: usize },
    /// `i ▷ (j ▷ k) ≠ (i ▷ j) ▷ (i ▷ k)`.
    NotDistributive { i: usize, j: usize, k: usize },
}

impl FiniteRack {
    /// Wraps a raw table without validation.
    pub fn from_table(table: Vec<Vec<u32>>) -> Self {
        FiniteRack {
            table,
            labels: None,
            degree: None,
            elements: None,
        }
    }

    /// The trivial rack on `n` points: `x ▷ y = y`.
    pub fn trivial(n: usize) -> Self {
        FiniteRack::from_table(vec![(0..n as u32).collect(); n])
    }

    /// Rack on a conjugation-closed, duplicate-free set of permutations.
    pub fn conjugation(elems: &[Permutation]) -> Result<Self> {
        let Some(first) = elems.first() else {
            return Err(Error::InvalidArgument("empty element list".into()));
        };
        let degree = first.degree();
        let mut index = HashMap::with_capacity(elems.len());
        for (i, x) in elems.iter().enumerate() {
            if x.degree() != degree {
                return Err(Error::DegreeMismatch(degree, x.degree()));
            }
            if index.insert(x, i as u32).is_some() {
                return Err(Error::InvalidArgument(format!("duplicate element {x}")));
            }
        }
        let mut table = Vec::with_capacity(elems.len());
        for x in elems {
            let row = elems
                .iter()
                .map(|y| {
                    index
                        .get(&x.conjugate_unchecked(y))
                        .copied()
                        .ok_or(Error::NotClosed)
                })
                .collect::<Result<Vec<u32>>>()?;
            table.push(row);
        }
        Ok(FiniteRack {
            table,
            labels: Some(elems.iter().map(ToString::to_string).collect()),
            degree: Some(degree),
            elements: Some(elems.to_vec()),
        })
    }

    pub fn size(&self) -> usize {
        self.table.len()
    }

    pub fn table(&self) -> &[Vec<u32>] {
        &self.table
    }

    #[inline]
    pub fn op(&self, i: usize, j: usize) -> usize {
        self.table[i][j] as usize
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Permutation elements, for conjugation racks.
    pub fn elements(&self) -> Option<&[Permutation]> {
        self.elements.as_deref()
    }

    pub fn index_of(&self, x: &Permutation) -> Option<usize> {
        self.elements.as_ref()?.iter().position(|e| e == x)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&RackJson {
            size: self.size(),
            table: self.table.clone(),
            labels: self.labels.clone(),
            degree: self.degree,
        })
        .expect("rack serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let json: RackJson =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("rack JSON: {e}")))?;
        if json.table.len() != json.size {
            return Err(Error::Parse(format!(
                "size {} but {} table rows",
                json.size,
                json.table.len()
            )));
        }
        if let Some(labels) = &json.labels {
            if labels.len() != json.size {
                return Err(Error::Parse("label count differs from size".into()));
            }
        }
        let elements = match (&json.labels, json.degree) {
            (Some(labels), Some(degree)) => Some(
                labels
                    .iter()
                    .map(|s| Permutation::parse_cycles(s, degree))
                    .collect::<Result<Vec<_>>>()?,
            ),
            _ => None,
        };
        Ok(FiniteRack {
            table: json.table,
            labels: json.labels,
            degree: json.degree,
            elements,
        })
    }

    /// Exhaustive check of both rack axioms.
    pub fn validate(&self) -> std::result::Result<(), RackViolation> {
        let n = self.size();
        for (row, entries) in self.table.iter().enumerate() {
            if entries.len() != n || entries.iter().any(|&e| e as usize >= n) {
                return Err(RackViolation::Shape { row });
            }
            let mut seen = vec![false; n];
            for &e in entries {
                if std::mem::replace(&mut seen[e as usize], true) {
                    return Err(RackViolation::NotBijective { row });
                }
            }
        }
        for i in 0..n {
            let ti = &self.table[i];
            for j in 0..n {
                let ij = ti[j] as usize;
                let tj = &self.table[j];
                let tij = &self.table[ij];
                for k in 0..n {
                    if ti[tj[k] as usize] != tij[ti[k] as usize] {
                        return Err(RackViolation::NotDistributive { i, j, k });
                    }
                }
            }
        }
        Ok(())
    }

    /// `inverse[i][k] = j` iff `i ▷ j = k`.
    pub fn inverse_table(&self) -> Vec<Vec<u32>> {
        self.table
            .iter()
            .map(|row| {
                let mut inv = vec![0u32; row.len()];
                for (j, &k) in row.iter().enumerate() {
                    inv[k as usize] = j as u32;
                }
                inv
            })
            .collect()
    }

    /// Smallest subset containing `seed` closed under `▷` and inverse translations; sorted.
    pub fn subrack_closure(&self, seed: &[usize]) -> Vec<usize> {
        let inverse = self.inverse_table();
        self.closure_with(seed, &inverse)
    }

    fn closure_with(&self, seed: &[usize], inverse: &[Vec<u32>]) -> Vec<usize> {
        let n = self.size();
        let mut member = vec![false; n];
        let mut members = Vec::new();
        for &s in seed {
            if !std::mem::replace(&mut member[s], true) {
                members.push(s);
            }
        }
        // Every pair (a, b) with max position ≥ head has been processed once
        // b's position is reached.
        let mut head = 0;
        while head < members.len() {
            let b = members[head];
            let upto = head + 1;
            for idx in 0..upto {
                let a = members[idx];
                let mut products = [
                    self.table[a][b] as usize,
                    self.table[b][a] as usize,
                    inverse[a][b] as usize,
                    inverse[b][a] as usize,
                ];
                products.sort_unstable();
                for c in products {
                    if !std::mem::replace(&mut member[c], true) {
                        members.push(c);
                    }
                }
            }
            head += 1;
        }
        members.sort_unstable();
        members
    }

    /// Largest abelian subrack (`a ▷ b = b` for all members) through `x`.
    ///
    /// Exact clique search below 2000 elements, greedy above.
    pub fn maximal_abelian_subrack_through(&self, x: usize) -> Vec<usize> {
        let n = self.size();
        let commute = |a: usize, b: usize| self.op(a, b) == b && self.op(b, a) == a;
        let candidates: Vec<usize> = (0..n).filter(|&y| y != x && commute(x, y)).collect();
        let mut best: Vec<usize> = Vec::new();
        if n < 2000 {
            let mut current = Vec::new();
            max_clique(&candidates, &commute, &mut current, &mut best);
        } else {
            for &c in &candidates {
                if best.iter().all(|&b| commute(b, c)) {
                    best.push(c);
                }
            }
        }
        best.push(x);
        best.sort_unstable();
        best
    }

    /// Whether `a ▷ b = b` for every pair in `subset`.
    pub fn is_abelian_subset(&self, subset: &[usize]) -> bool {
        subset
            .iter()
            .all(|&a| subset.iter().all(|&b| self.op(a, b) == b))
    }

    /// Rack with elements permuted: new index of old element `i` is `perm[i]`.
    pub fn relabel(&self, perm: &[usize]) -> FiniteRack {
        let n = self.size();
        let mut table = vec![vec![0u32; n]; n];
        for i in 0..n {
            for j in 0..n {
                table[perm[i]][perm[j]] = perm[self.op(i, j)] as u32;
            }
        }
        FiniteRack::from_table(table)
    }
}

fn max_clique(
    candidates: &[usize],
    adjacent: &dyn Fn(usize, usize) -> bool,
    current: &mut Vec<usize>,
    best: &mut Vec<usize>,
) {
    if current.len() > best.len() {
        *best = current.clone();
    }
    for (i, &c) in candidates.iter().enumerate() {
        if current.len() + candidates.len() - i <= best.len() {
            return;
        }
        let rest: Vec<usize> = candidates[i + 1..]
            .iter()
            .copied()
            .filter(|&d| adjacent(c, d))
            .collect();
        current.push(c);
        max_clique(&rest, adjacent, current, best);
        current.pop();
    }
}

pub fn conjugation_rack(elems: &[Permutation]) -> Result<FiniteRack> {
    FiniteRack::conjugation(elems)
}

pub fn validate_rack(rack: &FiniteRack) -> std::result::Result<(), RackViolation> {
    rack.validate()
}

pub fn subrack_closure(rack: &FiniteRack, seed: &[usize]) -> Vec<usize> {
    rack.subrack_closure(seed)
}

/// How (Ax. 2) was settled.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "method")]
pub enum Ax2Evidence {
    /// `⟨σ, τ⟩` is the full alternating group on its support and the two
    /// elements lie in different classes of it.
    AlternatingSplit { support: usize },
    /// The whole conjugacy orbit of σ was enumerated and τ is absent.
    OrbitSearch { orbit_size: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessEvidence {
    pub sigma_tau_squared: String,
    pub tau_sigma_squared: String,
    /// `|⟨σ, τ⟩|` in decimal.
    pub group_order: String,
    pub ax2: Ax2Evidence,
}

/// A pair satisfying both (Ax. 1) and (Ax. 2).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeDWitness {
    pub sigma: Permutation,
    pub tau: Permutation,
    pub evidence: WitnessEvidence,
}

impl TypeDWitness {
    /// Recomputes both axioms from the stored pair.
    pub fn verify(&self) -> Result<()> {
        match type_d_pair(&self.sigma, &self.tau)? {
            PairVerdict::Witness(w) if w.evidence.group_order == self.evidence.group_order => {
                Ok(())
            }
            other => Err(Error::VerificationFailed(format!(
                "stored witness ({}, {}) re-verified as {:?}",
                self.sigma,
                self.tau,
                other.kind()
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairVerdict {
    /// `(στ)² = (τσ)²`.
    Ax1Fail,
    /// σ and τ are conjugate in `⟨σ, τ⟩`.
    Ax2Fail {
        group_order: String,
    },
    Witness(TypeDWitness),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictKind {
    Ax1Fail,
    Ax2Fail,
    Witness,
}

impl PairVerdict {
    pub fn kind(&self) -> VerdictKind {
        match self {
            PairVerdict::Ax1Fail => VerdictKind::Ax1Fail,
            PairVerdict::Ax2Fail { .. } => VerdictKind::Ax2Fail,
            PairVerdict::Witness(_) => VerdictKind::Witness,
        }
    }

    pub fn is_witness(&self) -> bool {
        matches!(self, PairVerdict::Witness(_))
    }
}

/// `(στ)² ≠ (τσ)²`.
pub fn ax1_holds(sigma: &Permutation, tau: &Permutation) -> bool {
    let st = sigma.compose_unchecked(tau);
    let ts = tau.compose_unchecked(sigma);
    st.compose_unchecked(&st) != ts.compose_unchecked(&ts)
}

/// Decides (Ax. 2) inside an already built `⟨σ, τ⟩`.
pub fn ax2_in_group(
    group: &PermGroup,
    sigma: &Permutation,
    tau: &Permutation,
    cap: usize,
) -> Result<Option<Ax2Evidence>> {
    if sigma == tau {
        return Ok(None);
    }
    if group.giant_on_support().is_some() {
        let verdict = group.conjugacy_orbit_contains(sigma, tau, cap)?;
        return Ok(match verdict {
            crate::groups::OrbitVerdict::No => Some(Ax2Evidence::AlternatingSplit {
                support: group.moved_points().len(),
            }),
            crate::groups::OrbitVerdict::Yes => None,
            crate::groups::OrbitVerdict::Capped => return Err(Error::Indeterminate(cap)),
        });
    }
    let orbit = group.conjugacy_orbit(sigma, cap)?;
    Ok(if orbit.contains(tau) {
        None
    } else {
        Some(Ax2Evidence::OrbitSearch {
            orbit_size: orbit.len(),
        })
    })
}

/// Type-D pair test with the default orbit cap.
pub fn type_d_pair(sigma: &Permutation, tau: &Permutation) -> Result<PairVerdict> {
    type_d_pair_with_cap(sigma, tau, DEFAULT_ORBIT_CAP)
}

pub fn type_d_pair_with_cap(
    sigma: &Permutation,
    tau: &Permutation,
    cap: usize,
) -> Result<PairVerdict> {
    if sigma.degree() != tau.degree() {
        return Err(Error::DegreeMismatch(sigma.degree(), tau.degree()));
    }
    if !ax1_holds(sigma, tau) {
        return Ok(PairVerdict::Ax1Fail);
    }
    let group = PermGroup::new(&[sigma.clone(), tau.clone()])?;
    type_d_pair_in(&group, sigma, tau, cap)
}

/// Type-D test when `group = ⟨σ, τ⟩` is already built and (Ax. 1) is known to hold.
pub(crate) fn type_d_pair_in(
    group: &PermGroup,
    sigma: &Permutation,
    tau: &Permutation,
    cap: usize,
) -> Result<PairVerdict> {
    let group_order = group.order().to_string();
    match ax2_in_group(group, sigma, tau, cap)? {
        None => Ok(PairVerdict::Ax2Fail { group_order }),
        Some(ax2) => {
            let st = sigma.compose_unchecked(tau);
            let ts = tau.compose_unchecked(sigma);
            Ok(PairVerdict::Witness(TypeDWitness {
                sigma: sigma.clone(),
                tau: tau.clone(),
                evidence: WitnessEvidence {
                    sigma_tau_squared: st.compose_unchecked(&st).to_string(),
                    tau_sigma_squared: ts.compose_unchecked(&ts).to_string(),
                    group_order,
                    ax2,
                },
            }))
        }
    }
}

/// Searches for a table-preserving bijection `f` with `f(a ▷ b) = f(a) ▷ f(b)`.
///
/// For racks of permutations, power maps `x ↦ x^ℓ` and conjugation by
/// transpositions are tried before the general backtracking search, which
/// assigns images to a generating set and propagates through the tables.
pub fn rack_isomorphic(r: &FiniteRack, s: &FiniteRack) -> Option<Vec<usize>> {
    if r.size() != s.size() {
        return None;
    }
    if let Some(map) = candidate_label_maps(r, s) {
        return Some(map);
    }
    IsoSearch::new(r, s).run()
}

/// Checks whether `map` is a rack isomorphism `r → s`.
pub fn is_rack_isomorphism(r: &FiniteRack, s: &FiniteRack, map: &[usize]) -> bool {
    let n = r.size();
    if map.len() != n || s.size() != n {
        return false;
    }
    let mut hit = vec![false; n];
    for &m in map {
        if m >= n || std::mem::replace(&mut hit[m], true) {
            return false;
        }
    }
    (0..n).all(|a| (0..n).all(|b| map[r.op(a, b)] == s.op(map[a], map[b])))
}

fn candidate_label_maps(r: &FiniteRack, s: &FiniteRack) -> Option<Vec<usize>> {
    let (re, se) = (r.elements()?, s.elements()?);
    let degree = re.first()?.degree();
    if se.first()?.degree() != degree {
        return None;
    }
    let index: HashMap<&Permutation, usize> = se.iter().enumerate().map(|(i, x)| (x, i)).collect();
    let try_map = |f: &dyn Fn(&Permutation) -> Permutation| -> Option<Vec<usize>> {
        let map: Option<Vec<usize>> = re.iter().map(|x| index.get(&f(x)).copied()).collect();
        map.filter(|m| is_rack_isomorphism(r, s, m))
    };
    let order = re.iter().map(Permutation::order).max().unwrap_or(1);
    for ell in 1..order.max(2) {
        if num_integer::gcd(ell, order) != 1 {
            continue;
        }
        if let Some(m) = try_map(&|x: &Permutation| x.pow(ell as i64)) {
            return Some(m);
        }
    }
    for i in 1..=degree {
        for j in i + 1..=degree {
            let t = Permutation::from_cycles(degree, &[vec![i, j]]).ok()?;
            if let Some(m) = try_map(&|x: &Permutation| t.conjugate_unchecked(x)) {
                return Some(m);
            }
        }
    }
    None
}

struct IsoSearch<'a> {
    r: &'a FiniteRack,
    s: &'a FiniteRack,
    r_inv: Vec<Vec<u32>>,
    s_inv: Vec<Vec<u32>>,
    gens: Vec<usize>,
    r_profile: Vec<(usize, Vec<usize>)>,
    s_profile: Vec<(usize, Vec<usize>)>,
}

/// Isomorphism-invariant data of an element: fixed points of its left
/// translation and that translation's cycle type.
fn element_profiles(rack: &FiniteRack) -> Vec<(usize, Vec<usize>)> {
    rack.table()
        .iter()
        .map(|row| {
            let p = Permutation::from_images_unchecked(row.clone());
            let fixed = row
                .iter()
                .enumerate()
                .filter(|(i, &x)| *i as u32 == x)
                .count();
            (fixed, p.cycle_type().lengths().to_vec())
        })
        .collect()
}

impl<'a> IsoSearch<'a> {
    fn new(r: &'a FiniteRack, s: &'a FiniteRack) -> Self {
        let r_inv = r.inverse_table();
        let mut gens = Vec::new();
        let mut covered = vec![false; r.size()];
        for x in 0..r.size() {
            if !covered[x] {
                gens.push(x);
                for c in r.closure_with(&gens, &r_inv) {
                    covered[c] = true;
                }
            }
        }
        IsoSearch {
            r,
            s,
            s_inv: s.inverse_table(),
            r_inv,
            gens,
            r_profile: element_profiles(r),
            s_profile: element_profiles(s),
        }
    }

    fn run(&self) -> Option<Vec<usize>> {
        let mut r_sorted = self.r_profile.clone();
        let mut s_sorted = self.s_profile.clone();
        r_sorted.sort();
        s_sorted.sort();
        if r_sorted != s_sorted {
            return None;
        }
        let n = self.r.size();
        let forward = vec![usize::MAX; n];
        let backward = vec![usize::MAX; n];
        self.assign(0, forward, backward)
    }

    fn assign(&self, g: usize, forward: Vec<usize>, backward: Vec<usize>) -> Option<Vec<usize>> {
        if g == self.gens.len() {
            return (forward.iter().all(|&x| x != usize::MAX)
                && is_rack_isomorphism(self.r, self.s, &forward))
            .then_some(forward);
        }
        let x = self.gens[g];
        if forward[x] != usize::MAX {
            return self.assign(g + 1, forward, backward);
        }
        for y in 0..self.s.size() {
            if backward[y] != usize::MAX || self.r_profile[x] != self.s_profile[y] {
                continue;
            }
            let mut f = forward.clone();
            let mut b = backward.clone();
            f[x] = y;
            b[y] = x;
            if self.propagate(&mut f, &mut b) {
                if let Some(done) = self.assign(g + 1, f, b) {
                    return Some(done);
                }
            }
        }
        None
    }

    /// Closes the partial map under `▷` and inverse translations; false on conflict.
    fn propagate(&self, f: &mut [usize], b: &mut [usize]) -> bool {
        let mut known: Vec<usize> = (0..f.len()).filter(|&i| f[i] != usize::MAX).collect();
        let mut in_known: HashSet<usize> = known.iter().copied().collect();
        let mut head = 0;
        while head < known.len() {
            let q = known[head];
            for idx in 0..=head {
                let p = known[idx];
                for (a, c) in [(p, q), (q, p)] {
                    let pairs = [
                        (self.r.op(a, c), self.s.op(f[a], f[c])),
                        (self.r_inv[a][c] as usize, self.s_inv[f[a]][f[c]] as usize),
                    ];
                    for (src, dst) in pairs {
                        if f[src] == usize::MAX {
                            if b[dst] != usize::MAX {
                                return false;
                            }
                            f[src] = dst;
                            b[dst] = src;
                            if in_known.insert(src) {
                                known.push(src);
                            }
                        } else if f[src] != dst {
                            return false;
                        }
                    }
                }
            }
            head += 1;
        }
        true
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::constructions::psl_permutation_group;
    use crate::groups::alternating_generators;

    fn p(s: &str, n: usize) -> Permutation {
        Permutation::parse_cycles(s, n).unwrap()
    }

    pub(crate) fn a_class(x: &Permutation) -> Vec<Permutation> {
        let g = PermGroup::new(&alternating_generators(x.degree())).unwrap();
        let mut orbit = g.conjugacy_orbit(x, 1_000_000).unwrap();
        orbit.sort();
        orbit
    }

    #[test]
    fn conjugation_rack_examples() {
        let o5 = FiniteRack::conjugation(&a_class(&p("(1 2 3 4 5)", 5))).unwrap();
        assert_eq!(o5.size(), 12);
        assert_eq!(o5.validate(), Ok(()));

        let single = FiniteRack::conjugation(&[p("(1 2 3)", 3)]).unwrap();
        assert_eq!(single.table(), &[vec![0]]);

        assert_eq!(
            FiniteRack::conjugation(&[p("(1 2 3)", 3), p("(1 2)", 3)]),
            Err(Error::NotClosed)
        );
        assert!(FiniteRack::conjugation(&[p("(1 2)", 3), p("(1 2)", 3)]).is_err());
    }

    #[test]
    fn validation_reports_violations() {
        let mut t = FiniteRack::trivial(3).table().to_vec();
        t[1][2] = 0;
        assert_eq!(
            FiniteRack::from_table(t).validate(),
            Err(RackViolation::NotBijective { row: 1 })
        );
        // Rows are bijections but 0 ▷ (1 ▷ 0) = 0 ▷ 2 = 2 while
        // (0 ▷ 1) ▷ (0 ▷ 0) = 1 ▷ 0 = 2; break it at 0 ▷ 2 instead.
        let table = vec![vec![0, 2, 1], vec![2, 1, 0], vec![0, 1, 2]];
        let rack = FiniteRack::from_table(table);
        let v = rack.validate().unwrap_err();
        let RackViolation::NotDistributive { i, j, k } = v else {
            panic!("expected distributivity failure, got {v:?}");
        };
        assert_ne!(
            rack.op(i, rack.op(j, k)),
            rack.op(rack.op(i, j), rack.op(i, k))
        );
        assert_eq!(
            FiniteRack::from_table(vec![vec![0, 5], vec![0, 1]]).validate(),
            Err(RackViolation::Shape { row: 0 })
        );
    }

    #[test]
    fn closure_examples() {
        let commuting = FiniteRack::conjugation(&[p("(1 2 3)", 6), p("(4 5 6)", 6)]).unwrap();
        assert_eq!(commuting.subrack_closure(&[0]), vec![0]);

        let sigma = p("(1 2 3 4 5 6 7)", 7);
        let class = a_class(&sigma);
        let o7 = FiniteRack::conjugation(&class).unwrap();
        let all: Vec<usize> = (0..o7.size()).collect();
        assert_eq!(o7.subrack_closure(&all), all);

        // A copy of L_3(2) inside A_7 that contains σ.
        let l = psl_permutation_group(3, 2).unwrap();
        let x = crate::constructions::find_order_p_element(&l, 7, 1).unwrap();
        let mut g = crate::groups::aligning_conjugator(&x, &sigma).unwrap();
        if !g.is_even() {
            // x³ lies in the other A_7-class, so its aligning conjugator is even.
            g = crate::groups::aligning_conjugator(&x.pow(3), &sigma).unwrap();
        }
        assert!(g.is_even());
        let lg = crate::constructions::conjugate_group(&g, &l).unwrap();
        assert!(lg.contains(&sigma).unwrap());
        let sub_class = lg.conjugacy_orbit(&sigma, 1000).unwrap();
        assert_eq!(sub_class.len(), 24);
        let tau = sub_class.iter().find(|t| !t.commutes_with(&sigma)).unwrap();
        let i = o7.index_of(&sigma).unwrap();
        let j = o7.index_of(tau).unwrap();
        let closure = o7.subrack_closure(&[i, j]);
        assert_eq!(closure.len(), 24);
        assert_eq!(o7.subrack_closure(&closure), closure);
    }

    #[test]
    fn abelian_subracks() {
        let sigma = p("(1 2 3 4 5)", 5);
        let o5 = FiniteRack::conjugation(&a_class(&sigma)).unwrap();
        let i = o5.index_of(&sigma).unwrap();
        let ab = o5.maximal_abelian_subrack_through(i);
        let elems: Vec<_> = ab
            .iter()
            .map(|&k| o5.elements().unwrap()[k].clone())
            .collect();
        assert_eq!(ab.len(), 2);
        assert!(elems.contains(&sigma.pow(4)));

        let sigma = p("(1 2 3 4 5 6 7)", 7);
        let o7 = FiniteRack::conjugation(&a_class(&sigma)).unwrap();
        let ab = o7.maximal_abelian_subrack_through(o7.index_of(&sigma).unwrap());
        let mut elems: Vec<_> = ab
            .iter()
            .map(|&k| o7.elements().unwrap()[k].clone())
            .collect();
        elems.sort();
        let mut expected = vec![sigma.clone(), sigma.pow(2), sigma.pow(4)];
        expected.sort();
        assert_eq!(elems, expected);
        assert!(o7.is_abelian_subset(&ab));

        let trivial = FiniteRack::trivial(5);
        assert_eq!(
            trivial.maximal_abelian_subrack_through(2),
            vec![0, 1, 2, 3, 4]
        );
    }

    #[test]
    fn type_d_pair_examples() {
        let sigma = p("(1 2 3 4 5)", 10);
        assert_eq!(type_d_pair(&sigma, &sigma).unwrap(), PairVerdict::Ax1Fail);
        let disjoint = p("(6 7 8 9 10)", 10);
        assert_eq!(
            type_d_pair(&sigma, &disjoint).unwrap(),
            PairVerdict::Ax1Fail
        );
        assert!(type_d_pair(&sigma, &p("(1 2)", 5)).is_err());
    }

    #[test]
    fn power_map_between_a5_classes() {
        let sigma = p("(1 2 3 4 5)", 5);
        let c1 = a_class(&sigma);
        let c2 = a_class(&sigma.pow(2));
        assert!(c1.iter().all(|x| !c2.contains(x)));
        let r1 = FiniteRack::conjugation(&c1).unwrap();
        let r2 = FiniteRack::conjugation(&c2).unwrap();
        let map = rack_isomorphic(&r1, &r2).unwrap();
        assert!(is_rack_isomorphism(&r1, &r2, &map));
        // x ↦ x² is a bijection between the classes.
        let squares: HashSet<_> = c1.iter().map(|x| x.pow(2)).collect();
        assert_eq!(squares, c2.iter().cloned().collect());
        let square_map: Vec<usize> = c1.iter().map(|x| r2.index_of(&x.pow(2)).unwrap()).collect();
        // ...but not a rack morphism: (x ▷ y)² = x y² x⁻¹ ≠ x² y² x⁻².
        assert!(!is_rack_isomorphism(&r1, &r2, &square_map));
        let t = p("(1 2)", 5);
        let conj_map: Vec<usize> = c1
            .iter()
            .map(|x| r2.index_of(&t.conjugate(x).unwrap()).unwrap())
            .collect();
        assert!(is_rack_isomorphism(&r1, &r2, &conj_map));
    }

    #[test]
    fn isomorphism_examples() {
        let r = FiniteRack::conjugation(&a_class(&p("(1 2 3 4 5)", 5))).unwrap();
        let id = rack_isomorphic(&r, &r).unwrap();
        assert!(is_rack_isomorphism(&r, &r, &id));
        assert!(rack_isomorphic(&FiniteRack::trivial(1), &FiniteRack::trivial(2)).is_none());

        // Pure table search on a relabelled copy.
        let n = r.size();
        let perm: Vec<usize> = (0..n).map(|i| (i * 5 + 3) % n).collect();
        let shuffled = r.relabel(&perm);
        let plain = FiniteRack::from_table(r.table().to_vec());
        let map = rack_isomorphic(&plain, &shuffled).unwrap();
        assert!(is_rack_isomorphism(&plain, &shuffled, &map));

        // Trivial rack on 12 points is not isomorphic to O_(5).
        assert!(rack_isomorphic(&plain, &FiniteRack::trivial(12)).is_none());
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let r = FiniteRack::conjugation(&a_class(&p("(1 2 3 4 5)", 5))).unwrap();
        let json = r.to_json();
        let back = FiniteRack::from_json(&json).unwrap();
        assert_eq!(back.to_json(), json);
        assert_eq!(back, r);

        let bare = r#"{"size":2,"table":[[0,1],[0,1]]}"#;
        assert_eq!(FiniteRack::from_json(bare).unwrap().to_json(), bare);
        assert!(FiniteRack::from_json(r#"{"size":3,"table":[[0]]}"#).is_err());
    }

    #[test]
    fn lemma_dichotomy_small_classes() {
        for prime in [5usize, 7] {
            let sigma = Permutation::from_cycles(prime, &[(1..=prime).collect()]).unwrap();
            for tau in a_class(&sigma) {
                if !ax1_holds(&sigma, &tau) {
                    let st = sigma.compose(&tau).unwrap();
                    assert!(sigma.commutes_with(&tau) || st.order() == 2);
                }
            }
        }
    }

    #[test]
    fn squares_commuting_pair_can_generate_a7() {
        let sigma = p("(1 2 3 4 5 6 7)", 7);
        let tau = p("(1 2 3 7 6 5 4)", 7);
        assert!(!ax1_holds(&sigma, &tau));
        assert_eq!(sigma.compose(&tau).unwrap().order(), 2);
        let g = PermGroup::new(&[sigma, tau]).unwrap();
        assert_eq!(g.order_u128(), 2520);
    }
}
