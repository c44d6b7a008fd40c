//! Rack homology in degree two and the structure of `H²(X, k^×)`.
//!
//! Chains: `C_q` is free abelian on `X^q`, with
//!
//! ```text
//! ∂₂(x, y)    = (y) − (x ▷ y)
//! ∂₃(x, y, z) = (y, z) + (x, y ▷ z) − (x, z) − (x ▷ y, x ▷ z)
//! ```
//!
//! Dually a 2-cochain `q` is a cocycle iff
//! `q(x, y ▷ z) q(y, z) = q(x ▷ y, x ▷ z) q(x, z)`. Since `k^×` is divisible,
//! `H²(X, k^×) ≅ Hom(H₂(X, Z), k^×)`, so a free summand of `H₂` contributes a
//! `k^×` factor and `Z/d` contributes the `d`-th roots of unity `G_d`.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rack::FiniteRack;

/// Largest `n³` accepted by [`boundary_matrices`].
pub const MAX_CUBE: usize = 10_000_000;

/// Sparse integer matrix stored by columns; entries are nonzero and sorted by row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    columns: Vec<Vec<(u32, BigInt)>>,
}

impl IntegerMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntegerMatrix {
            rows,
            cols,
            columns: vec![Vec::new(); cols],
        }
    }

    pub fn from_dense<T: Into<BigInt> + Copy>(rows: &[Vec<T>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let mut m = IntegerMatrix::zeros(nrows, ncols);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), ncols, "ragged matrix");
            for (j, &v) in row.iter().enumerate() {
                m.add_to(i, j, v.into());
            }
        }
        m
    }

    /// Builds a column from `(row, value)` terms, merging duplicates.
    fn set_column(&mut self, col: usize, terms: &[(usize, i64)]) {
        let mut acc: Vec<(u32, i64)> = terms.iter().map(|&(r, v)| (r as u32, v)).collect();
        acc.sort_unstable_by_key(|t| t.0);
        let mut merged: Vec<(u32, BigInt)> = Vec::with_capacity(acc.len());
        for (r, v) in acc {
            match merged.last_mut() {
                Some((lr, lv)) if *lr == r => *lv += v,
                _ => merged.push((r, BigInt::from(v))),
            }
        }
        merged.retain(|(_, v)| !v.is_zero());
        self.columns[col] = merged;
    }

    pub fn add_to(&mut self, row: usize, col: usize, value: BigInt) {
        assert!(row < self.rows && col < self.cols);
        let column = &mut self.columns[col];
        match column.binary_search_by_key(&(row as u32), |t| t.0) {
            Ok(pos) => {
                column[pos].1 += value;
                if column[pos].1.is_zero() {
                    column.remove(pos);
                }
            }
            Err(pos) => {
                if !value.is_zero() {
                    column.insert(pos, (row as u32, value));
                }
            }
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> BigInt {
        let column = &self.columns[col];
        column
            .binary_search_by_key(&(row as u32), |t| t.0)
            .map(|pos| column[pos].1.clone())
            .unwrap_or_default()
    }

    pub fn column(&self, col: usize) -> &[(u32, BigInt)] {
        &self.columns[col]
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(Vec::is_empty)
    }

    pub fn to_dense(&self) -> Vec<Vec<BigInt>> {
        let mut out = vec![vec![BigInt::zero(); self.cols]; self.rows];
        for (j, col) in self.columns.iter().enumerate() {
            for (i, v) in col {
                out[*i as usize][j] = v.clone();
            }
        }
        out
    }

    /// `self · other`.
    pub fn mul(&self, other: &IntegerMatrix) -> Result<IntegerMatrix> {
        if self.cols != other.rows {
            return Err(Error::DegreeMismatch(self.cols, other.rows));
        }
        let mut out = IntegerMatrix::zeros(self.rows, other.cols);
        for (j, col) in other.columns.iter().enumerate() {
            let mut acc: HashMap<u32, BigInt> = HashMap::new();
            for (k, b) in col {
                for (i, a) in &self.columns[*k as usize] {
                    *acc.entry(*i).or_default() += a * b;
                }
            }
            let mut entries: Vec<(u32, BigInt)> =
                acc.into_iter().filter(|(_, v)| !v.is_zero()).collect();
            entries.sort_unstable_by_key(|t| t.0);
            out.columns[j] = entries;
        }
        Ok(out)
    }
}

/// `(∂₂, ∂₃)`; `C₂` is indexed by `x·n + y`, `C₃` by `(x·n + y)·n + z`.
pub fn boundary_matrices(rack: &FiniteRack) -> Result<(IntegerMatrix, IntegerMatrix)> {
    let n = rack.size();
    if n.checked_pow(3).is_none_or(|c| c > MAX_CUBE) {
        return Err(Error::SizeGuard(format!(
            "n³ for n = {n} exceeds {MAX_CUBE}"
        )));
    }
    let mut d2 = IntegerMatrix::zeros(n, n * n);
    for x in 0..n {
        for y in 0..n {
            d2.set_column(x * n + y, &[(y, 1), (rack.op(x, y), -1)]);
        }
    }
    let mut d3 = IntegerMatrix::zeros(n * n, n * n * n);
    for x in 0..n {
        for y in 0..n {
            let xy = rack.op(x, y);
            for z in 0..n {
                let terms = [
                    (y * n + z, 1),
                    (x * n + rack.op(y, z), 1),
                    (x * n + z, -1),
                    (xy * n + rack.op(x, z), -1),
                ];
                d3.set_column((x * n + y) * n + z, &terms);
            }
        }
    }
    Ok((d2, d3))
}

/// Invariant factors `d₁ | d₂ | …` (all positive) and the rank.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithForm {
    pub invariants: Vec<BigInt>,
}

impl SmithForm {
    pub fn rank(&self) -> usize {
        self.invariants.len()
    }

    /// Invariant factors greater than one.
    pub fn torsion(&self) -> Vec<BigInt> {
        self.invariants
            .iter()
            .filter(|d| !d.is_one())
            .cloned()
            .collect()
    }
}

/// Coefficient ring for the elimination phase: `i64` with overflow
/// detection, or `BigInt`.
trait Coeff: Clone + PartialEq + fmt::Debug {
    fn from_big(v: &BigInt) -> Option<Self>;
    fn vanishes(&self) -> bool;
    fn unit_sign(&self) -> Option<i64>;
    /// `a − c·b`.
    fn sub_mul(a: &Self, c: &Self, b: &Self) -> Option<Self>;
    fn nil() -> Self;
    fn scale_sign(&self, sign: i64) -> Self;
}

impl Coeff for i64 {
    fn from_big(v: &BigInt) -> Option<Self> {
        v.to_i64()
    }
    fn vanishes(&self) -> bool {
        *self == 0
    }
    fn unit_sign(&self) -> Option<i64> {
        (self.abs() == 1).then_some(*self)
    }
    fn sub_mul(a: &Self, c: &Self, b: &Self) -> Option<Self> {
        a.checked_sub(c.checked_mul(*b)?)
    }
    fn nil() -> Self {
        0
    }
    fn scale_sign(&self, sign: i64) -> Self {
        self * sign
    }
}

impl Coeff for BigInt {
    fn from_big(v: &BigInt) -> Option<Self> {
        Some(v.clone())
    }
    fn vanishes(&self) -> bool {
        Zero::is_zero(self)
    }
    fn unit_sign(&self) -> Option<i64> {
        if self.is_one() {
            Some(1)
        } else if (-self).is_one() {
            Some(-1)
        } else {
            None
        }
    }
    fn sub_mul(a: &Self, c: &Self, b: &Self) -> Option<Self> {
        Some(a - c * b)
    }
    fn nil() -> Self {
        BigInt::zero()
    }
    fn scale_sign(&self, sign: i64) -> Self {
        self * sign
    }
}

type SparseVec<T> = Vec<(u32, T)>;

fn sparse_get<T: Coeff>(v: &SparseVec<T>, coord: u32) -> Option<&T> {
    v.binary_search_by_key(&coord, |t| t.0)
        .ok()
        .map(|i| &v[i].1)
}

/// `a − c·b` on sparse vectors.
fn sparse_sub_mul<T: Coeff>(a: &SparseVec<T>, c: &T, b: &SparseVec<T>) -> Option<SparseVec<T>> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j == b.len() || (i < a.len() && a[i].0 < b[j].0);
        let take_b = i == a.len() || (j < b.len() && b[j].0 < a[i].0);
        if take_a {
            out.push(a[i].clone());
            i += 1;
        } else if take_b {
            let v = T::sub_mul(&T::nil(), c, &b[j].1)?;
            out.push((b[j].0, v));
            j += 1;
        } else {
            let v = T::sub_mul(&a[i].1, c, &b[j].1)?;
            if !v.vanishes() {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    Some(out)
}

/// Unit-pivot elimination over the column lattice. Returns the number of
/// unit pivots and the leftover generators, which vanish on every pivot
/// coordinate and have no unit entries.
fn eliminate_units<T: Coeff>(m: &IntegerMatrix) -> Option<(usize, Vec<SparseVec<T>>)> {
    // Pivot vectors carry +1 at their pivot coordinate and 0 at every other
    // pivot coordinate.
    let mut pivots: Vec<SparseVec<T>> = Vec::new();
    let mut pivot_at: HashMap<u32, usize> = HashMap::new();
    let mut residual: Vec<SparseVec<T>> = Vec::new();

    let reduce = |v: SparseVec<T>, pivots: &[SparseVec<T>], pivot_at: &HashMap<u32, usize>| {
        let hits: Vec<(usize, T)> = v
            .iter()
            .filter_map(|(c, a)| pivot_at.get(c).map(|&p| (p, a.clone())))
            .collect();
        let mut v = v;
        for (p, a) in hits {
            v = sparse_sub_mul(&v, &a, &pivots[p])?;
        }
        Some(v)
    };

    let mut pending: Vec<SparseVec<T>> = Vec::new();
    for col in &m.columns {
        let v: SparseVec<T> = col
            .iter()
            .map(|(r, x)| T::from_big(x).map(|t| (*r, t)))
            .collect::<Option<_>>()?;
        pending.push(v);
    }

    loop {
        for v in pending.drain(..) {
            let v = reduce(v, &pivots, &pivot_at)?;
            if v.is_empty() {
                continue;
            }
            let unit = v.iter().find_map(|(c, a)| a.unit_sign().map(|s| (*c, s)));
            let Some((coord, sign)) = unit else {
                residual.push(v);
                continue;
            };
            let b: SparseVec<T> = v.iter().map(|(c, a)| (*c, a.scale_sign(sign))).collect();
            for other in pivots.iter_mut().chain(residual.iter_mut()) {
                if let Some(a) = sparse_get(other, coord).cloned() {
                    *other = sparse_sub_mul(other, &a, &b)?;
                }
            }
            pivot_at.insert(coord, pivots.len());
            pivots.push(b);
        }
        // Residuals may have acquired unit entries; retry them.
        let (retry, keep): (Vec<_>, Vec<_>) = residual
            .drain(..)
            .filter(|v| !v.is_empty())
            .partition(|v| v.iter().any(|(_, a)| a.unit_sign().is_some()));
        residual = keep;
        if retry.is_empty() {
            break;
        }
        pending = retry;
    }
    Some((pivots.len(), residual))
}

/// Exact Smith normal form invariants of an integer matrix.
///
/// Unit pivots are eliminated sparsely (in `i64` when entries stay small,
/// otherwise in `BigInt`); the remaining generators go through a dense
/// `BigInt` reduction.
pub fn smith_normal_form(m: &IntegerMatrix) -> SmithForm {
    let (units, residual) = match eliminate_units::<i64>(m) {
        Some((u, r)) => (
            u,
            r.into_iter()
                .map(|v| v.into_iter().map(|(c, a)| (c, BigInt::from(a))).collect())
                .collect(),
        ),
        None => eliminate_units::<BigInt>(m).expect("BigInt elimination cannot overflow"),
    };
    let mut invariants = vec![BigInt::one(); units];
    invariants.extend(dense_invariants(residual));
    SmithForm { invariants }
}

/// Invariants of the lattice spanned by sparse generators.
fn dense_invariants(gens: Vec<SparseVec<BigInt>>) -> Vec<BigInt> {
    let mut gens: Vec<SparseVec<BigInt>> = gens.into_iter().filter(|v| !v.is_empty()).collect();
    if gens.is_empty() {
        return Vec::new();
    }
    gens.sort();
    gens.dedup();
    let mut coords: Vec<u32> = gens.iter().flat_map(|v| v.iter().map(|t| t.0)).collect();
    coords.sort_unstable();
    coords.dedup();
    let pos: HashMap<u32, usize> = coords.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    // Reduce to a basis first so the dense pass works on at most `coords` rows.
    let basis = lattice_basis(&gens, &pos, coords.len());
    let diag = dense_snf_diagonal(basis);
    normalize_chain(diag)
}

/// Row-echelon basis of the lattice spanned by `gens` (as dense rows).
fn lattice_basis(
    gens: &[SparseVec<BigInt>],
    pos: &HashMap<u32, usize>,
    width: usize,
) -> Vec<Vec<BigInt>> {
    let mut echelon: Vec<Option<Vec<BigInt>>> = vec![None; width];
    for g in gens {
        let mut v = vec![BigInt::zero(); width];
        for (c, a) in g {
            v[pos[c]] = a.clone();
        }
        let mut lead = 0;
        loop {
            while lead < width && v[lead].is_zero() {
                lead += 1;
            }
            if lead == width {
                break;
            }
            match echelon[lead].take() {
                None => {
                    if v[lead].is_negative() {
                        v.iter_mut().for_each(|x| *x = -&*x);
                    }
                    echelon[lead] = Some(v);
                    break;
                }
                Some(mut b) => {
                    // Replace (b, v) by (g-combination, remainder) with a unimodular step.
                    let egcd = b[lead].extended_gcd(&v[lead]);
                    let (g, s, t) = (egcd.gcd, egcd.x, egcd.y);
                    let bq = &b[lead] / &g;
                    let vq = &v[lead] / &g;
                    let new_b: Vec<BigInt> =
                        b.iter().zip(&v).map(|(x, y)| &s * x + &t * y).collect();
                    let new_v: Vec<BigInt> =
                        b.iter().zip(&v).map(|(x, y)| &vq * x - &bq * y).collect();
                    b = new_b;
                    if b[lead].is_negative() {
                        b.iter_mut().for_each(|x| *x = -&*x);
                    }
                    echelon[lead] = Some(b);
                    v = new_v;
                }
            }
        }
    }
    echelon.into_iter().flatten().collect()
}

/// Diagonal of a dense Smith reduction (not yet a divisibility chain).
fn dense_snf_diagonal(mut a: Vec<Vec<BigInt>>) -> Vec<BigInt> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut diag = Vec::new();
    for t in 0..rows.min(cols) {
        loop {
            // Smallest nonzero entry in the trailing block.
            let mut best: Option<(usize, usize)> = None;
            for (i, row) in a.iter().enumerate().skip(t) {
                for (j, x) in row.iter().enumerate().skip(t) {
                    if !x.is_zero() && best.is_none_or(|(bi, bj)| x.abs() < a[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return diag;
            };
            a.swap(t, pi);
            for row in a.iter_mut() {
                row.swap(t, pj);
            }
            let pivot = a[t][t].clone();
            let mut clean = true;
            for i in t + 1..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = a[i][t].div_floor(&pivot);
                let (head, tail) = a.split_at_mut(i);
                for (x, y) in tail[0].iter_mut().zip(&head[t]).skip(t) {
                    *x -= &q * y;
                }
                clean &= a[i][t].is_zero();
            }
            for j in t + 1..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = a[t][j].div_floor(&pivot);
                for row in a.iter_mut().skip(t) {
                    let y = row[t].clone();
                    row[j] -= &q * y;
                }
                clean &= a[t][j].is_zero();
            }
            if clean {
                diag.push(pivot.abs());
                break;
            }
        }
    }
    diag
}

/// Turns a diagonal into the divisibility chain `d₁ | d₂ | …` via gcd/lcm swaps.
fn normalize_chain(mut diag: Vec<BigInt>) -> Vec<BigInt> {
    diag.retain(|d| !d.is_zero());
    for i in 0..diag.len() {
        for j in i + 1..diag.len() {
            let g = diag[i].gcd(&diag[j]);
            let l = diag[i].lcm(&diag[j]);
            diag[i] = g;
            diag[j] = l;
        }
    }
    diag
}

/// `H₂(X, Z) ≅ Z^free_rank ⊕ ⊕ Z/d_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyResult {
    pub free_rank: usize,
    pub torsion: Vec<u64>,
}

impl HomologyResult {
    /// `H²(X, k^×)` in the form `k^× × G_d …`.
    pub fn pretty(&self) -> String {
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("k^×".to_string()),
            b => parts.push(format!("(k^×)^{b}")),
        }
        parts.extend(self.torsion.iter().map(|d| format!("G_{d}")));
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join(" × ")
        }
    }
}

pub fn second_homology(rack: &FiniteRack) -> Result<HomologyResult> {
    let n = rack.size();
    let (d2, d3) = boundary_matrices(rack)?;
    let snf2 = smith_normal_form(&d2);
    let snf3 = smith_normal_form(&d3);
    let torsion = snf3
        .torsion()
        .iter()
        .map(|d| {
            d.to_u64()
                .ok_or_else(|| Error::SizeGuard(format!("torsion coefficient {d} exceeds u64")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(HomologyResult {
        free_rank: n * n - snf2.rank() - snf3.rank(),
        torsion,
    })
}

/// `(number of k^× factors, orders d of the G_d factors)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohomologyStructure {
    pub free_rank: usize,
    pub torsion: Vec<u64>,
    pub pretty: String,
}

pub fn second_cohomology_structure(rack: &FiniteRack) -> Result<CohomologyStructure> {
    let h = second_homology(rack)?;
    Ok(CohomologyStructure {
        pretty: h.pretty(),
        free_rank: h.free_rank,
        torsion: h.torsion,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::Permutation;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn snf_examples() {
        let m = IntegerMatrix::from_dense(&[vec![2i64, 4], vec![6, 8]]);
        let s = smith_normal_form(&m);
        assert_eq!(s.invariants, ints(&[2, 4]));
        assert_eq!(s.rank(), 2);

        let z = IntegerMatrix::zeros(3, 4);
        assert_eq!(smith_normal_form(&z).rank(), 0);

        let id = IntegerMatrix::from_dense(&[vec![1i64, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
        assert_eq!(smith_normal_form(&id).invariants, ints(&[1, 1, 1]));
    }

    #[test]
    fn snf_divisibility_chain() {
        let m = IntegerMatrix::from_dense(&[vec![6i64, 0, 0], vec![0, 10, 0], vec![0, 0, 15]]);
        assert_eq!(smith_normal_form(&m).invariants, ints(&[1, 30, 30]));
        let m = IntegerMatrix::from_dense(&[vec![2i64, 0], vec![0, 3]]);
        assert_eq!(smith_normal_form(&m).invariants, ints(&[1, 6]));
    }

    #[test]
    fn snf_big_entries_fall_back_to_bigint() {
        let big: BigInt = BigInt::from(i64::MAX) * 4;
        let mut m = IntegerMatrix::zeros(2, 2);
        m.add_to(0, 0, big.clone());
        m.add_to(1, 1, BigInt::from(2));
        assert_eq!(smith_normal_form(&m).invariants, vec![BigInt::from(2), big]);
    }

    #[test]
    fn trivial_rack_boundaries() {
        let r = FiniteRack::trivial(1);
        let (d2, d3) = boundary_matrices(&r).unwrap();
        assert_eq!((d2.rows(), d2.cols(), d3.rows(), d3.cols()), (1, 1, 1, 1));
        assert!(d2.is_zero() && d3.is_zero());
        let h = second_homology(&r).unwrap();
        assert_eq!(
            h,
            HomologyResult {
                free_rank: 1,
                torsion: vec![]
            }
        );
        assert_eq!(second_cohomology_structure(&r).unwrap().pretty, "k^×");
    }

    #[test]
    fn boundary_shapes_and_column_sums() {
        let sigma = Permutation::parse_cycles("(1 2 3 4 5)", 5).unwrap();
        let g = crate::groups::PermGroup::new(&crate::groups::alternating_generators(5)).unwrap();
        let class = g.conjugacy_orbit(&sigma, 100).unwrap();
        let r = FiniteRack::conjugation(&class).unwrap();
        let (d2, d3) = boundary_matrices(&r).unwrap();
        assert_eq!((d2.rows(), d2.cols()), (12, 144));
        assert_eq!((d3.rows(), d3.cols()), (144, 1728));
        for j in 0..d2.cols() {
            let sum: BigInt = d2.column(j).iter().map(|t| t.1.clone()).sum();
            assert!(sum.is_zero());
        }
        assert!(d2.mul(&d3).unwrap().is_zero());
    }

    #[test]
    fn golden_pentagon_class() {
        let sigma = Permutation::parse_cycles("(1 2 3 4 5)", 5).unwrap();
        let r = FiniteRack::conjugation(&crate::rack::tests::a_class(&sigma)).unwrap();
        let h = second_homology(&r).unwrap();
        assert_eq!(
            h,
            HomologyResult {
                free_rank: 1,
                torsion: vec![10]
            }
        );
        assert_eq!(h.pretty(), "k^× × G_10");
    }

    #[test]
    fn golden_heptagon_subrack() {
        let sigma = Permutation::parse_cycles("(1 2 3 4 5 6 7)", 7).unwrap();
        let l = crate::constructions::psl_permutation_group(3, 2).unwrap();
        let x = crate::constructions::find_order_p_element(&l, 7, 1).unwrap();
        let mut g = crate::groups::aligning_conjugator(&x, &sigma).unwrap();
        if !g.is_even() {
            g = crate::groups::aligning_conjugator(&x.pow(3), &sigma).unwrap();
        }
        let lg = crate::constructions::conjugate_group(&g, &l).unwrap();
        let mut class = lg.conjugacy_orbit(&sigma, 1000).unwrap();
        class.sort();
        let r = FiniteRack::conjugation(&class).unwrap();
        assert_eq!(r.size(), 24);
        let h = second_homology(&r).unwrap();
        assert_eq!(
            h,
            HomologyResult {
                free_rank: 1,
                torsion: vec![14]
            }
        );
    }

    #[test]
    fn size_guard() {
        let r = FiniteRack::trivial(216);
        assert!(matches!(boundary_matrices(&r), Err(Error::SizeGuard(_))));
        let r = FiniteRack::trivial(215);
        assert!(boundary_matrices(&r).is_ok());
        let r = FiniteRack::trivial(360);
        assert!(matches!(boundary_matrices(&r), Err(Error::SizeGuard(_))));
    }

    #[test]
    fn pretty_forms() {
        let h = HomologyResult {
            free_rank: 1,
            torsion: vec![10],
        };
        assert_eq!(h.pretty(), "k^× × G_10");
        let h = HomologyResult {
            free_rank: 2,
            torsion: vec![2, 4],
        };
        assert_eq!(h.pretty(), "(k^×)^2 × G_2 × G_4");
        assert_eq!(
            HomologyResult {
                free_rank: 0,
                torsion: vec![]
            }
            .pretty(),
            "1"
        );
    }
}
