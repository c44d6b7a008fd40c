//! Type-D classification of the classes of `p`-cycles in `A_p` and `A_{p+1}`.
//!
//! The closed form rests on the cyclotomic shape `p = (r^k − 1)/(r − 1)`;
//! everything else here produces or checks evidence for it: identification
//! of `⟨σ, τ⟩` against the groups two `p`-cycles can generate, witness
//! searches, and statistics on small subracks.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constructions::{
    affine_frobenius_group, alternating_order, check_prime_and_degree, conjugate_group,
    extend_group, find_order_p_element, natural_class, natural_cycle, order_p_classes,
    order_p_classes_of, psl_order, psl_permutation_group,
};
use crate::error::{Error, Result};
use crate::groups::{
    aligning_conjugator, alternating_conjugate, random_even_permutation, DEFAULT_ORBIT_CAP,
};
use crate::numth::{cyclotomic_decompositions, is_prime, jacobi};
use crate::perm::Permutation;
use crate::rack::{ax1_holds, type_d_pair, type_d_pair_in, PairVerdict, TypeDWitness, VerdictKind};
use crate::PermGroup;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    TypeD,
    NotTypeD,
}

/// Why a class got its verdict. Decompositions are `[r, k]` pairs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictReason {
    Cyclotomic(Vec<[u64; 2]>),
    BelowThreshold {
        threshold: u64,
        cyclotomic: Vec<[u64; 2]>,
    },
    NotCyclotomic,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassVerdict {
    pub p: u64,
    pub m: usize,
    pub verdict: Verdict,
    pub reason: VerdictReason,
}

/// Smallest `p` for which a cyclotomic `p` gives type D in degree `m`.
fn type_d_threshold(p: u64, m: usize) -> u64 {
    if m as u64 == p {
        13
    } else {
        7
    }
}

/// Verdict for the class of `(1 2 … p)` in `A_m`, `m ∈ {p, p+1}`.
pub fn classify_class(p: u64, m: usize) -> Result<ClassVerdict> {
    check_prime_and_degree(p, m)?;
    let decompositions = cyclotomic_decompositions(p)?.as_tuples();
    let threshold = type_d_threshold(p, m);
    let (verdict, reason) = if decompositions.is_empty() {
        (Verdict::NotTypeD, VerdictReason::NotCyclotomic)
    } else if p < threshold {
        (
            Verdict::NotTypeD,
            VerdictReason::BelowThreshold {
                threshold,
                cyclotomic: decompositions,
            },
        )
    } else {
        (Verdict::TypeD, VerdictReason::Cyclotomic(decompositions))
    };
    Ok(ClassVerdict {
        p,
        m,
        verdict,
        reason,
    })
}

/// The thirteen shapes of a group generated by two `p`-cycles.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FwTag {
    I,
    Ii,
    Iii,
    Iv,
    V,
    Vi,
    Vii,
    Viii,
    Ix,
    X,
    Xi,
    Xii,
    Xiii,
}

impl FwTag {
    pub const ALL: [FwTag; 13] = [
        FwTag::I,
        FwTag::Ii,
        FwTag::Iii,
        FwTag::Iv,
        FwTag::V,
        FwTag::Vi,
        FwTag::Vii,
        FwTag::Viii,
        FwTag::Ix,
        FwTag::X,
        FwTag::Xi,
        FwTag::Xii,
        FwTag::Xiii,
    ];

    pub fn roman(self) -> &'static str {
        const NAMES: [&str; 13] = [
            "i", "ii", "iii", "iv", "v", "vi", "vii", "viii", "ix", "x", "xi", "xii", "xiii",
        ];
        NAMES[self as usize]
    }
}

impl fmt::Display for FwTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.roman())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "match", rename_all = "snake_case")]
pub enum FwMatch {
    /// One case fits; `aliases` lists other cases naming an isomorphic group
    /// of the same degree and order.
    Case {
        tag: FwTag,
        group: String,
        aliases: Vec<FwTag>,
    },
    Ambiguous {
        candidates: Vec<FwTag>,
    },
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FwCase {
    pub p: u64,
    pub m: usize,
    #[serde(with = "crate::decimal")]
    pub order: BigUint,
    #[serde(flatten)]
    pub result: FwMatch,
}

impl FwCase {
    pub fn tag(&self) -> Option<FwTag> {
        match &self.result {
            FwMatch::Case { tag, .. } => Some(*tag),
            _ => None,
        }
    }
}

/// Every case admissible for `(p, m)`, as `(tag, group name, order)`.
fn fw_candidates(p: u64, m: usize) -> Result<Vec<(FwTag, String, BigUint)>> {
    let mut out = Vec::new();
    let mm = m as u64;
    let pb = BigUint::from(p);
    let mersenne = (p + 1).is_power_of_two();
    if mm == p {
        out.push((FwTag::I, format!("Z/{p}"), pb.clone()));
    }
    if mm == 2 * p {
        out.push((FwTag::Ii, format!("Z/{p} × Z/{p}"), &pb * &pb));
    }
    if mm == p {
        for pair in cyclotomic_decompositions(p)?.pairs() {
            let (r, k) = (pair.r, pair.k as usize);
            out.push((FwTag::Iii, format!("L_{k}({r})"), psl_order(k, r)));
        }
    }
    if mm == p + 2 && mersenne {
        out.push((FwTag::Iv, format!("L_2({})", p + 1), psl_order(2, p + 1)));
    }
    if mm == p + 1 {
        out.push((FwTag::V, format!("L_2({p})"), psl_order(2, p)));
    }
    if mm == p && p == 11 {
        out.push((FwTag::Vi, "L_2(11)".into(), BigUint::from(660u32)));
        out.push((FwTag::Vi, "M_11".into(), BigUint::from(7920u32)));
    }
    if mm == p && p == 23 {
        out.push((FwTag::Vii, "M_23".into(), BigUint::from(10_200_960u64)));
    }
    if mm == 12 && p == 11 {
        out.push((FwTag::Viii, "M_12".into(), BigUint::from(95_040u32)));
        out.push((FwTag::Viii, "M_11".into(), BigUint::from(7920u32)));
        out.push((FwTag::Viii, "L_2(11)".into(), BigUint::from(660u32)));
    }
    if mm == 24 && p == 23 {
        out.push((FwTag::Ix, "M_24".into(), BigUint::from(244_823_040u64)));
    }
    if mm == p + 1 && mersenne {
        out.push((FwTag::X, format!("F_{m} ⋊ Z/{p}"), BigUint::from(mm * p)));
        let k = m.trailing_zeros() as usize;
        if k != 3 {
            out.push((
                FwTag::Xi,
                format!("2^{k} ⋊ L_{k}(2)"),
                BigUint::from(mm) * psl_order(k, 2),
            ));
        }
    }
    if mm == 3 && p == 2 {
        out.push((FwTag::Xii, "S_3".into(), BigUint::from(6u32)));
    }
    if m >= 3 {
        out.push((FwTag::Xiii, format!("A_{m}"), alternating_order(m)));
    }
    Ok(out)
}

/// Collapses the exceptional isomorphisms among the listed groups.
fn canonical_group(name: &str) -> &str {
    match name {
        "L_2(4)" | "L_2(5)" => "A_5",
        "L_3(2)" => "L_2(7)",
        "L_2(9)" => "A_6",
        "L_4(2)" => "A_8",
        "L_2(2)" => "S_3",
        "L_2(3)" | "F_4 ⋊ Z/3" => "A_4",
        other => other,
    }
}

/// Identifies `⟨σ, τ⟩` for two `p`-cycles by its degree `m` (the size of
/// the joint support) and its exact order.
pub fn fw_identify(sigma: &Permutation, tau: &Permutation) -> Result<FwCase> {
    if sigma.degree() != tau.degree() {
        return Err(Error::DegreeMismatch(sigma.degree(), tau.degree()));
    }
    let p = sigma.support().len();
    if !is_prime(p as u64) || !sigma.is_cycle_of_length(p) || !tau.is_cycle_of_length(p) {
        return Err(Error::InvalidArgument(format!(
            "{sigma} and {tau} are not cycles of the same prime length"
        )));
    }
    let mut joint: BTreeSet<usize> = sigma.support().into_iter().collect();
    joint.extend(tau.support());
    let m = joint.len();
    let order = PermGroup::new(&[sigma.clone(), tau.clone()])?
        .order()
        .clone();
    let p = p as u64;
    let hits: Vec<(FwTag, String)> = fw_candidates(p, m)?
        .into_iter()
        .filter(|(_, _, o)| *o == order)
        .map(|(t, g, _)| (t, g))
        .collect();
    let result = match hits.as_slice() {
        [] => FwMatch::Unknown,
        [(tag, group), rest @ ..]
            if rest
                .iter()
                .all(|(_, g)| canonical_group(g) == canonical_group(group)) =>
        {
            let mut aliases: Vec<FwTag> =
                rest.iter().map(|(t, _)| *t).filter(|t| t != tag).collect();
            aliases.dedup();
            FwMatch::Case {
                tag: *tag,
                group: group.clone(),
                aliases,
            }
        }
        _ => {
            let mut candidates: Vec<FwTag> = hits.iter().map(|(t, _)| *t).collect();
            candidates.dedup();
            FwMatch::Ambiguous { candidates }
        }
    };
    Ok(FwCase {
        p,
        m,
        order,
        result,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Exhaustive,
    Random,
    Subgroup,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::Exhaustive => "exhaustive",
            Strategy::Random => "random",
            Strategy::Subgroup => "subgroup",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exhaustive" => Ok(Strategy::Exhaustive),
            "random" => Ok(Strategy::Random),
            "subgroup" => Ok(Strategy::Subgroup),
            _ => Err(Error::InvalidArgument(format!("unknown strategy {s:?}"))),
        }
    }
}

/// Classes larger than this are only enumerated exhaustively on request.
pub const DEEP_THRESHOLD: u64 = 100_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub strategy: Strategy,
    /// Maximum number of candidate `τ` examined.
    pub budget: u64,
    pub seed: u64,
    /// Allows exhaustive enumeration of classes above [`DEEP_THRESHOLD`].
    pub deep: bool,
}

impl SearchConfig {
    pub fn new(strategy: Strategy, budget: u64, seed: u64) -> Self {
        SearchConfig {
            strategy,
            budget,
            seed,
            deep: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SearchOutcome {
    Found {
        witness: TypeDWitness,
        subgroup: Option<String>,
    },
    /// The whole class was examined without a witness.
    ProvenAbsent,
    BudgetExhausted,
    /// The strategy ran out of candidates; this proves nothing.
    Inconclusive,
}

/// Number of examined pairs with a given verdict and `|⟨σ, τ⟩|`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TallyEntry {
    pub verdict: VerdictKind,
    #[serde(with = "crate::decimal")]
    pub group_order: BigUint,
    pub count: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchReport {
    pub p: u64,
    pub m: usize,
    pub strategy: Strategy,
    pub seed: u64,
    pub budget: u64,
    #[serde(with = "crate::decimal")]
    pub class_size: BigUint,
    pub pairs_examined: u64,
    pub outcome: SearchOutcome,
    pub tally: Vec<TallyEntry>,
    pub cached: bool,
}

impl SearchReport {
    pub fn witness(&self) -> Option<&TypeDWitness> {
        match &self.outcome {
            SearchOutcome::Found { witness, .. } => Some(witness),
            _ => None,
        }
    }

    /// Distinct orders of `⟨σ, τ⟩` seen among examined pairs.
    pub fn order_spectrum(&self) -> BTreeSet<BigUint> {
        self.tally.iter().map(|e| e.group_order.clone()).collect()
    }
}

type Tally = BTreeMap<(VerdictKind, BigUint), u64>;

fn tally_entries(tally: Tally) -> Vec<TallyEntry> {
    tally
        .into_iter()
        .map(|((verdict, group_order), count)| TallyEntry {
            verdict,
            group_order,
            count,
        })
        .collect()
}

/// Full verdict for a pair plus `|⟨σ, τ⟩|`, which is computed even when
/// (Ax. 1) already fails.
fn evaluate_pair(sigma: &Permutation, tau: &Permutation) -> Result<(PairVerdict, BigUint)> {
    let group = PermGroup::new(&[sigma.clone(), tau.clone()])?;
    let order = group.order().clone();
    let verdict = if ax1_holds(sigma, tau) {
        type_d_pair_in(&group, sigma, tau, DEFAULT_ORBIT_CAP)?
    } else {
        PairVerdict::Ax1Fail
    };
    Ok((verdict, order))
}

/// Lexicographic permutations of a sorted slice.
struct LexPermutations {
    current: Option<Vec<usize>>,
}

impl LexPermutations {
    fn new(items: Vec<usize>) -> Self {
        LexPermutations {
            current: Some(items),
        }
    }
}

impl Iterator for LexPermutations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.take()?;
        let mut next = out.clone();
        let n = next.len();
        if n >= 2 {
            if let Some(i) = (0..n - 1).rev().find(|&i| next[i] < next[i + 1]) {
                let j = (i + 1..n)
                    .rev()
                    .find(|&j| next[j] > next[i])
                    .expect("successor exists");
                next.swap(i, j);
                next[i + 1..].reverse();
                self.current = Some(next);
            }
        }
        Some(out)
    }
}

/// The `A_m`-class of `(1 2 … p)` in a fixed order, each element once.
///
/// Supports are visited in lexicographic order; on each support `S` the
/// cycles `(s₀ π(s₁) … π(s_{p−1}))` with `s₀ = min S` run over the
/// lexicographic permutations `π`, and the `S_m`-class is halved with
/// [`alternating_conjugate`].
pub fn class_elements(p: u64, m: usize) -> Result<impl Iterator<Item = Permutation>> {
    check_prime_and_degree(p, m)?;
    let p = p as usize;
    let sigma = natural_cycle(p, m);
    let supports: Vec<Vec<usize>> = if m == p {
        vec![(1..=p).collect()]
    } else {
        (1..=m)
            .rev()
            .map(|omit| (1..=m).filter(|&x| x != omit).collect())
            .collect()
    };
    Ok(supports.into_iter().flat_map(move |support| {
        let first = support[0];
        let sigma = sigma.clone();
        LexPermutations::new(support[1..].to_vec()).filter_map(move |rest| {
            let mut cycle = Vec::with_capacity(p);
            cycle.push(first);
            cycle.extend(rest);
            let tau = Permutation::from_cycles(m, &[cycle]).expect("valid cycle");
            alternating_conjugate(&sigma, &tau, m)
                .expect("same degree")
                .then_some(tau)
        })
    }))
}

/// `τ_i = g_i ▷ σ` with `g_i` a uniform even permutation drawn from stream
/// `i` of a generator seeded with `seed`, so sample `i` is independent of
/// how many threads evaluate the samples.
pub fn random_class_element(sigma: &Permutation, seed: u64, index: u64) -> Permutation {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let g = random_even_permutation(sigma.degree(), &mut rng);
    g.conjugate_unchecked(sigma)
}

const CHUNK: usize = 512;

struct ScanResult {
    examined: u64,
    witness: Option<TypeDWitness>,
    tally: Tally,
    source_exhausted: bool,
}

/// Evaluates candidates in order, in parallel chunks, stopping at the first
/// witness by index or after `limit` candidates.
fn scan<I: Iterator<Item = Permutation>>(
    sigma: &Permutation,
    candidates: I,
    limit: u64,
) -> Result<ScanResult> {
    let mut candidates = candidates.peekable();
    let mut result = ScanResult {
        examined: 0,
        witness: None,
        tally: Tally::new(),
        source_exhausted: false,
    };
    loop {
        if candidates.peek().is_none() {
            result.source_exhausted = true;
            return Ok(result);
        }
        let room = limit - result.examined;
        if room == 0 {
            return Ok(result);
        }
        let chunk: Vec<Permutation> = candidates
            .by_ref()
            .take(room.min(CHUNK as u64) as usize)
            .collect();
        let verdicts: Vec<Result<(PairVerdict, BigUint)>> = chunk
            .par_iter()
            .map(|tau| evaluate_pair(sigma, tau))
            .collect();
        for v in verdicts {
            let (verdict, order) = v?;
            result.examined += 1;
            *result.tally.entry((verdict.kind(), order)).or_default() += 1;
            if let PairVerdict::Witness(w) = verdict {
                result.witness = Some(w);
                return Ok(result);
            }
        }
    }
}

/// Searches the class of `σ = (1 2 … p)` in `A_m` for `τ` with `(σ, τ)` a
/// type-D pair. Returned witnesses have been re-verified from scratch.
pub fn witness_search(p: u64, m: usize, config: &SearchConfig) -> Result<SearchReport> {
    let class = natural_class(p, m)?;
    let sigma = class.sigma.clone();
    let mut report = SearchReport {
        p,
        m,
        strategy: config.strategy,
        seed: config.seed,
        budget: config.budget,
        class_size: class.class_size.clone(),
        pairs_examined: 0,
        outcome: SearchOutcome::Inconclusive,
        tally: Vec::new(),
        cached: false,
    };
    match config.strategy {
        Strategy::Exhaustive => {
            let size = class.class_size.to_u64().unwrap_or(u64::MAX);
            if size > DEEP_THRESHOLD && !config.deep {
                return Err(Error::SizeGuard(format!(
                    "exhaustive enumeration of {size} class elements needs deep mode"
                )));
            }
            let scan = scan(&sigma, class_elements(p, m)?, config.budget)?;
            report.pairs_examined = scan.examined;
            report.outcome = match scan.witness {
                Some(witness) => SearchOutcome::Found {
                    witness,
                    subgroup: None,
                },
                None if scan.source_exhausted => {
                    if BigUint::from(scan.examined) != class.class_size {
                        return Err(Error::VerificationFailed(format!(
                            "enumerated {} elements, expected {}",
                            scan.examined, class.class_size
                        )));
                    }
                    SearchOutcome::ProvenAbsent
                }
                None => SearchOutcome::BudgetExhausted,
            };
            report.tally = tally_entries(scan.tally);
        }
        Strategy::Random => {
            let seed = config.seed;
            let samples = (0..).map(|i| random_class_element(&sigma, seed, i));
            let scan = scan(&sigma, samples, config.budget)?;
            report.pairs_examined = scan.examined;
            report.outcome = match scan.witness {
                Some(witness) => SearchOutcome::Found {
                    witness,
                    subgroup: None,
                },
                None => SearchOutcome::BudgetExhausted,
            };
            report.tally = tally_entries(scan.tally);
        }
        Strategy::Subgroup => subgroup_search(&sigma, p, m, config, &mut report)?,
    }
    if let Some(w) = report.witness() {
        w.verify()?;
    }
    Ok(report)
}

/// A subgroup of `A_m` containing `(1 2 … p)`.
#[derive(Clone, Debug)]
pub struct CandidateSubgroup {
    pub name: String,
    pub group: PermGroup,
}

/// Moves `h` (degree `m`) so that it contains `sigma`, via some order-`p`
/// element of `h`.
fn relabel_through(h: &PermGroup, sigma: &Permutation, p: u64, seed: u64) -> Result<PermGroup> {
    let x = find_order_p_element(h, p, seed)?;
    let g = aligning_conjugator(&x, sigma)
        .ok_or_else(|| Error::InvalidArgument(format!("{x} is not a {p}-cycle")))?;
    let moved = conjugate_group(&g, h)?;
    debug_assert!(moved.contains(sigma)?);
    Ok(moved)
}

/// `L_k(r)` for each decomposition of `p`, and for Mersenne `p` with
/// `m = p + 1` the affine group `F_{p+1} ⋊ F_{p+1}^×`, all relabelled to
/// contain `(1 2 … p)`.
pub fn subgroup_candidates(p: u64, m: usize, seed: u64) -> Result<Vec<CandidateSubgroup>> {
    check_prime_and_degree(p, m)?;
    let sigma = natural_cycle(p as usize, m);
    let sigma_p = natural_cycle(p as usize, p as usize);
    let mut out = Vec::new();
    for pair in cyclotomic_decompositions(p)?.pairs() {
        let (r, k) = (pair.r, pair.k as usize);
        let h = psl_permutation_group(k, r)?;
        let moved = relabel_through(&h, &sigma_p, p, seed)?;
        out.push(CandidateSubgroup {
            name: format!("L_{k}({r})"),
            group: extend_group(&moved, m)?,
        });
    }
    if m as u64 == p + 1 && (p + 1).is_power_of_two() {
        let h = affine_frobenius_group(m.trailing_zeros())?;
        out.push(CandidateSubgroup {
            name: format!("F_{m} ⋊ F_{m}^×"),
            group: relabel_through(&h, &sigma, p, seed)?,
        });
    }
    Ok(out)
}

/// Inside each candidate `H`, look at `H`-classes of `σ^ℓ` in the same
/// `A_m`-class as `σ` but a different `H`-class, and take the first conjugate
/// `τ` with `(στ)² ≠ (τσ)²`. (Ax. 2) then comes for free since `τ` is not
/// conjugate to `σ` even in `H ⊇ ⟨σ, τ⟩`. In `L_k(r)` any `τ` with
/// `|στ| ∉ {1, 2, p}` qualifies; in the Frobenius group every element has
/// order `1`, `2` or `p`, so the axiom itself is the filter.
fn subgroup_search(
    sigma: &Permutation,
    p: u64,
    m: usize,
    config: &SearchConfig,
    report: &mut SearchReport,
) -> Result<()> {
    let mut tally = Tally::new();
    for candidate in subgroup_candidates(p, m, config.seed)? {
        let h = &candidate.group;
        let classes = order_p_classes_of(h, sigma, p)?;
        for class in &classes.exponent_classes {
            let ell = class[0];
            if class.contains(&1) || jacobi(ell as i64, p)? != 1 {
                continue;
            }
            let start = sigma.pow(ell as i64);
            for tau in h.conjugacy_orbit(&start, DEFAULT_ORBIT_CAP)? {
                if report.pairs_examined == config.budget {
                    report.outcome = SearchOutcome::BudgetExhausted;
                    report.tally = tally_entries(tally);
                    return Ok(());
                }
                report.pairs_examined += 1;
                if !ax1_holds(sigma, &tau) {
                    continue;
                }
                let (verdict, order) = evaluate_pair(sigma, &tau)?;
                *tally.entry((verdict.kind(), order)).or_default() += 1;
                let PairVerdict::Witness(witness) = verdict else {
                    return Err(Error::VerificationFailed(format!(
                        "{tau} lies in another class of {} yet fails (Ax. 2)",
                        candidate.name
                    )));
                };
                report.outcome = SearchOutcome::Found {
                    witness,
                    subgroup: Some(candidate.name.clone()),
                };
                report.tally = tally_entries(tally);
                return Ok(());
            }
        }
    }
    report.outcome = SearchOutcome::Inconclusive;
    report.tally = tally_entries(tally);
    Ok(())
}

/// Stored witnesses keyed by `p:m:strategy:seed`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessCache {
    entries: BTreeMap<String, TypeDWitness>,
}

impl WitnessCache {
    pub fn key(p: u64, m: usize, strategy: Strategy, seed: u64) -> String {
        format!("{p}:{m}:{strategy}:{seed}")
    }

    /// Loads a cache file; a missing file is an empty cache.
    pub fn load(path: &Path) -> Result<Self> {
        match std::fs::read_to_string(path) {
            Ok(text) => serde_json::from_str(&text)
                .map_err(|e| Error::Parse(format!("{}: {e}", path.display()))),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(WitnessCache::default()),
            Err(e) => Err(Error::Io(format!("{}: {e}", path.display()))),
        }
    }

    /// Writes through a temporary file so a crash never leaves a torn cache.
    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).expect("cache serializes");
        let tmp = path.with_extension("tmp");
        std::fs::write(&tmp, text + "\n")
            .map_err(|e| Error::Io(format!("{}: {e}", tmp.display())))?;
        std::fs::rename(&tmp, path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
    }

    pub fn get(&self, key: &str) -> Option<&TypeDWitness> {
        self.entries.get(key)
    }

    pub fn insert(&mut self, key: String, witness: TypeDWitness) {
        self.entries.insert(key, witness);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// [`witness_search`] consulting and updating `cache`. Cached witnesses are
/// re-verified before use; a stale entry is dropped and the search rerun.
pub fn witness_search_cached(
    p: u64,
    m: usize,
    config: &SearchConfig,
    cache: &mut WitnessCache,
) -> Result<SearchReport> {
    let key = WitnessCache::key(p, m, config.strategy, config.seed);
    if let Some(w) = cache.get(&key) {
        if w.verify().is_ok() && w.sigma == natural_cycle(p as usize, m) {
            let class = natural_class(p, m)?;
            return Ok(SearchReport {
                p,
                m,
                strategy: config.strategy,
                seed: config.seed,
                budget: config.budget,
                class_size: class.class_size,
                pairs_examined: 0,
                outcome: SearchOutcome::Found {
                    witness: w.clone(),
                    subgroup: None,
                },
                tally: Vec::new(),
                cached: true,
            });
        }
        cache.entries.remove(&key);
    }
    let report = witness_search(p, m, config)?;
    if let Some(w) = report.witness() {
        cache.insert(key, w.clone());
    }
    Ok(report)
}

/// `σ = (1 2 … p)` and `τ = (1 3) ▷ σ`, a type-D pair for the class of
/// `p`-cycles in `S_p`: the two lie in different `A_p`-classes.
pub fn symmetric_group_witness(p: u64) -> Result<TypeDWitness> {
    check_prime_and_degree(p, p as usize)?;
    let n = p as usize;
    let sigma = natural_cycle(n, n);
    let swap = Permutation::from_cycles(n, &[vec![1, 3]])?;
    let tau = swap.conjugate(&sigma)?;
    match type_d_pair(&sigma, &tau)? {
        PairVerdict::Witness(w) => Ok(w),
        other => Err(Error::VerificationFailed(format!(
            "(1 3) ▷ σ for p = {p} gave {:?}",
            other.kind()
        ))),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductPairResult {
    /// Index of σ's class in `class_exponents`.
    pub from_class: usize,
    pub to_class: usize,
    pub sigma: Permutation,
    pub tau: Option<Permutation>,
    pub product_order: Option<u64>,
    pub searched: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegularProductReport {
    pub k: usize,
    pub r: u64,
    pub p: u64,
    #[serde(with = "crate::decimal")]
    pub group_order: BigUint,
    /// Exponents `ℓ` with `σ^ℓ` in each class of order-`p` elements.
    pub class_exponents: Vec<Vec<u64>>,
    pub pairs: Vec<ProductPairResult>,
}

impl RegularProductReport {
    pub fn all_found(&self) -> bool {
        self.pairs.iter().all(|r| r.tau.is_some())
    }
}

/// Largest class of order-`p` elements searched by [`regular_product_check`].
pub const PRODUCT_CLASS_LIMIT: u64 = 1_000_000;

/// For ordered pairs of distinct classes `(C_i, C_j)` of order-`p` elements
/// in `L_k(r)`, looks for `τ ∈ C_j` with `|στ| ∉ {1, 2, p}` for a fixed
/// `σ ∈ C_i`.
pub fn regular_product_check(k: usize, r: u64) -> Result<RegularProductReport> {
    let g = psl_permutation_group(k, r)?;
    let p = g.degree() as u64;
    let class_len = (g.order() / BigUint::from(p)).to_u64().unwrap_or(u64::MAX);
    if class_len > PRODUCT_CLASS_LIMIT {
        return Err(Error::SizeGuard(format!("classes of {class_len} elements")));
    }
    let classes = order_p_classes(&g, p, 0)?;
    let reps = classes.representatives();
    let mut pairs = Vec::new();
    for (i, sigma) in reps.iter().enumerate() {
        for (j, start) in reps.iter().enumerate() {
            if i == j {
                continue;
            }
            let class = g.conjugacy_orbit(start, DEFAULT_ORBIT_CAP)?;
            let mut hit = None;
            let mut searched = 0;
            for tau in &class {
                searched += 1;
                let o = sigma.compose(tau)?.order();
                if o != 1 && o != 2 && o != p {
                    hit = Some((tau.clone(), o));
                    break;
                }
            }
            pairs.push(ProductPairResult {
                from_class: i,
                to_class: j,
                sigma: sigma.clone(),
                product_order: hit.as_ref().map(|h| h.1),
                tau: hit.map(|h| h.0),
                searched,
            });
        }
    }
    Ok(RegularProductReport {
        k,
        r,
        p,
        group_order: g.order().clone(),
        class_exponents: classes.exponent_classes,
        pairs,
    })
}

/// Pairs sharing a closure size, abelianness and group case.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusEntry {
    #[serde(with = "crate::decimal")]
    pub closure_size: BigUint,
    pub abelian: bool,
    pub case: Option<FwTag>,
    pub count: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusReport {
    pub p: u64,
    pub m: usize,
    #[serde(with = "crate::decimal")]
    pub class_size: BigUint,
    /// False when the class was sampled rather than enumerated.
    pub complete: bool,
    pub pairs_examined: u64,
    pub entries: Vec<CensusEntry>,
    /// Closure sizes of non-abelian subracks other than the whole class.
    pub non_abelian_proper_sizes: Vec<String>,
}

/// Size of the subrack generated by `{σ, τ}` in a conjugation rack: the
/// union of the `⟨σ, τ⟩`-classes of σ and τ.
pub fn pair_closure_size(sigma: &Permutation, tau: &Permutation) -> Result<BigUint> {
    if sigma.commutes_with(tau) {
        return Ok(BigUint::from(if sigma == tau { 1u32 } else { 2 }));
    }
    let h = PermGroup::new(&[sigma.clone(), tau.clone()])?;
    let own = h.class_size(sigma, DEFAULT_ORBIT_CAP)?;
    let same = match h.conjugacy_orbit_contains(sigma, tau, DEFAULT_ORBIT_CAP)? {
        crate::OrbitVerdict::Yes => true,
        crate::OrbitVerdict::No => false,
        crate::OrbitVerdict::Capped => return Err(Error::Indeterminate(DEFAULT_ORBIT_CAP)),
    };
    Ok(if same {
        own
    } else {
        own + h.class_size(tau, DEFAULT_ORBIT_CAP)?
    })
}

/// Candidates for `τ`: the whole class when it fits in `budget`, otherwise
/// `budget` seeded samples.
fn class_pairs(
    p: u64,
    m: usize,
    budget: u64,
    seed: u64,
) -> Result<(Vec<Permutation>, bool, BigUint)> {
    let class = natural_class(p, m)?;
    if class.class_size <= BigUint::from(budget) {
        Ok((class_elements(p, m)?.collect(), true, class.class_size))
    } else {
        let sigma = class.sigma;
        let taus = (0..budget)
            .map(|i| random_class_element(&sigma, seed, i))
            .collect();
        Ok((taus, false, class.class_size))
    }
}

/// Histogram of subrack closures of `{σ, τ}` over the class of `σ`.
pub fn subrack_census(p: u64, m: usize, budget: u64, seed: u64) -> Result<CensusReport> {
    let (taus, complete, class_size) = class_pairs(p, m, budget, seed)?;
    let sigma = natural_cycle(p as usize, m);
    let rows: Vec<Result<(BigUint, bool, Option<FwTag>)>> = taus
        .par_iter()
        .map(|tau| {
            let size = pair_closure_size(&sigma, tau)?;
            let case = fw_identify(&sigma, tau)?.tag();
            Ok((size, sigma.commutes_with(tau), case))
        })
        .collect();
    let mut hist: BTreeMap<(BigUint, bool, Option<FwTag>), u64> = BTreeMap::new();
    let mut proper = BTreeSet::new();
    for row in rows {
        let (size, abelian, case) = row?;
        if !abelian && size < class_size {
            proper.insert(size.clone());
        }
        *hist.entry((size, abelian, case)).or_default() += 1;
    }
    Ok(CensusReport {
        p,
        m,
        class_size,
        complete,
        pairs_examined: taus.len() as u64,
        entries: hist
            .into_iter()
            .map(|((closure_size, abelian, case), count)| CensusEntry {
                closure_size,
                abelian,
                case,
                count,
            })
            .collect(),
        non_abelian_proper_sizes: proper.iter().map(BigUint::to_string).collect(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundViolation {
    pub tau: Permutation,
    #[serde(with = "crate::decimal")]
    pub group_order: BigUint,
}

/// Pairs with `(στ)² = (τσ)²`, checked against "σ and τ commute or
/// `|στ| = 2`" and against `|⟨σ, τ⟩| ≤ p²`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub p: u64,
    pub m: usize,
    pub complete: bool,
    pub pairs_examined: u64,
    pub squares_commute: u64,
    pub dichotomy_violations: Vec<Permutation>,
    pub bound_violations: Vec<BoundViolation>,
}

impl LemmaReport {
    pub fn dichotomy_holds(&self) -> bool {
        self.dichotomy_violations.is_empty()
    }

    pub fn bound_holds(&self) -> bool {
        self.bound_violations.is_empty()
    }
}

pub fn lemma_square_check(p: u64, m: usize, budget: u64, seed: u64) -> Result<LemmaReport> {
    let (taus, complete, _) = class_pairs(p, m, budget, seed)?;
    let sigma = natural_cycle(p as usize, m);
    let bound = BigUint::from(p * p);
    let mut report = LemmaReport {
        p,
        m,
        complete,
        pairs_examined: taus.len() as u64,
        squares_commute: 0,
        dichotomy_violations: Vec::new(),
        bound_violations: Vec::new(),
    };
    for tau in taus {
        if ax1_holds(&sigma, &tau) {
            continue;
        }
        report.squares_commute += 1;
        if !sigma.commutes_with(&tau) && sigma.compose(&tau)?.order() != 2 {
            report.dichotomy_violations.push(tau.clone());
        }
        let order = PermGroup::new(&[sigma.clone(), tau.clone()])?
            .order()
            .clone();
        if order > bound {
            report.bound_violations.push(BoundViolation {
                tau,
                group_order: order,
            });
        }
    }
    Ok(report)
}

/// `|⟨σ, τ⟩|` values allowed for two `p`-cycles with joint support `m`.
pub fn admissible_orders(p: u64, m: usize) -> Result<BTreeSet<BigUint>> {
    Ok(fw_candidates(p, m)?.into_iter().map(|c| c.2).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str, n: usize) -> Permutation {
        Permutation::parse_cycles(s, n).unwrap()
    }

    #[test]
    fn classify_examples() {
        let v = classify_class(13, 13).unwrap();
        assert_eq!(v.verdict, Verdict::TypeD);
        assert_eq!(v.reason, VerdictReason::Cyclotomic(vec![[3, 3]]));
        assert_eq!(
            serde_json::to_string(&v).unwrap(),
            r#"{"p":13,"m":13,"verdict":"TypeD","reason":{"cyclotomic":[[3,3]]}}"#
        );
        assert_eq!(classify_class(7, 7).unwrap().verdict, Verdict::NotTypeD);
        assert_eq!(classify_class(7, 8).unwrap().verdict, Verdict::TypeD);
        let v = classify_class(23, 23).unwrap();
        assert_eq!(
            (v.verdict, v.reason),
            (Verdict::NotTypeD, VerdictReason::NotCyclotomic)
        );
        let err = classify_class(4, 4).unwrap_err();
        assert!(err.to_string().contains("p must be prime ≥ 5"));
        assert!(classify_class(9, 9).is_err());
        assert!(classify_class(7, 9).is_err());
    }

    #[test]
    fn fw_examples() {
        let sigma = p("(1 2 3 4 5 6 7)", 14);
        let c = fw_identify(&sigma, &sigma).unwrap();
        assert_eq!(
            (c.tag(), c.m, c.order.clone()),
            (Some(FwTag::I), 7, BigUint::from(7u32))
        );

        let tau = p("(8 9 10 11 12 13 14)", 14);
        let c = fw_identify(&sigma, &tau).unwrap();
        assert_eq!((c.tag(), c.m), (Some(FwTag::Ii), 14));
        assert_eq!(c.order, BigUint::from(49u32));

        let f = affine_frobenius_group(3).unwrap();
        let gens = f.generators();
        let x = gens.iter().find(|g| g.order() == 7).unwrap().clone();
        let y = gens
            .iter()
            .find(|g| g.order() == 2)
            .unwrap()
            .conjugate(&x)
            .unwrap();
        let c = fw_identify(&x, &y).unwrap();
        assert_eq!(
            (c.tag(), c.m, c.order.clone()),
            (Some(FwTag::X), 8, BigUint::from(56u32))
        );

        assert!(fw_identify(&p("(1 2 3 4)", 5), &p("(1 2 3 4)", 5)).is_err());
        assert!(fw_identify(&p("(1 2 3)", 5), &p("(1 2 3 4 5)", 5)).is_err());
    }

    #[test]
    fn fw_isomorphic_coincidences_resolve() {
        // A_5 ≅ L_2(4): the whole A_5 case list collapses to one group.
        let sigma = p("(1 2 3 4 5)", 5);
        let tau = p("(1 3 2 5 4)", 5);
        let c = fw_identify(&sigma, &tau).unwrap();
        assert_eq!(c.order, BigUint::from(60u32));
        assert_eq!(
            c.result,
            FwMatch::Case {
                tag: FwTag::Iii,
                group: "L_2(4)".into(),
                aliases: vec![FwTag::Xiii]
            }
        );
    }

    #[test]
    fn class_enumeration_counts() {
        for (pp, m, size) in [(5, 5, 12), (5, 6, 72), (7, 7, 360), (7, 8, 2880)] {
            let all: Vec<Permutation> = class_elements(pp, m).unwrap().collect();
            assert_eq!(all.len(), size, "({pp}, {m})");
            let distinct: BTreeSet<_> = all.iter().cloned().collect();
            assert_eq!(distinct.len(), size);
            assert_eq!(all[0], natural_cycle(pp as usize, m));
        }
    }

    #[test]
    fn lex_permutations() {
        let all: Vec<Vec<usize>> = LexPermutations::new(vec![1, 2, 3]).collect();
        assert_eq!(all.len(), 6);
        assert_eq!(all[1], vec![1, 3, 2]);
        assert_eq!(LexPermutations::new(vec![]).count(), 1);
    }

    #[test]
    fn exhaustive_absence_for_five() {
        let r = witness_search(5, 5, &SearchConfig::new(Strategy::Exhaustive, 1000, 0)).unwrap();
        assert_eq!(r.outcome, SearchOutcome::ProvenAbsent);
        assert_eq!(r.pairs_examined, 12);
        let orders: BTreeSet<BigUint> = r.order_spectrum();
        assert!(orders
            .iter()
            .all(|o| *o == BigUint::from(5u32) || *o == BigUint::from(60u32)));

        let r = witness_search(5, 5, &SearchConfig::new(Strategy::Exhaustive, 4, 0)).unwrap();
        assert_eq!(
            (r.outcome, r.pairs_examined),
            (SearchOutcome::BudgetExhausted, 4)
        );
    }

    #[test]
    fn deep_gate() {
        let cfg = SearchConfig::new(Strategy::Exhaustive, 10, 0);
        assert!(matches!(
            witness_search(11, 11, &cfg),
            Err(Error::SizeGuard(_))
        ));
    }

    #[test]
    fn frobenius_witness_for_seven() {
        let r = witness_search(7, 8, &SearchConfig::new(Strategy::Subgroup, 10_000, 0)).unwrap();
        let SearchOutcome::Found { witness, subgroup } = &r.outcome else {
            panic!("no witness: {r:?}");
        };
        assert_eq!(subgroup.as_deref(), Some("F_8 ⋊ F_8^×"));
        assert_eq!(witness.evidence.group_order, "56");
        witness.verify().unwrap();
    }

    #[test]
    fn subgroup_search_is_inconclusive_for_five() {
        let r = witness_search(5, 5, &SearchConfig::new(Strategy::Subgroup, 10_000, 0)).unwrap();
        assert_eq!(r.outcome, SearchOutcome::Inconclusive);
    }

    #[test]
    fn random_search_is_reproducible() {
        let cfg = SearchConfig::new(Strategy::Random, 40, 9);
        let a = witness_search(7, 7, &cfg).unwrap();
        let b = witness_search(7, 7, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.outcome, SearchOutcome::BudgetExhausted);
        assert_eq!(a.pairs_examined, 40);
    }

    #[test]
    fn symmetric_witness_for_five() {
        let w = symmetric_group_witness(5).unwrap();
        assert_eq!(w.tau, p("(1 4 5 3 2)", 5));
        w.verify().unwrap();
    }

    #[test]
    fn regular_products_small() {
        for (k, r, classes) in [(3, 2, 2), (2, 4, 2)] {
            let rep = regular_product_check(k, r).unwrap();
            assert_eq!(rep.class_exponents.len(), classes);
            assert_eq!(rep.pairs.len(), classes * (classes - 1));
            assert!(rep.all_found(), "({k}, {r})");
        }
    }

    #[test]
    fn census_for_five() {
        let c = subrack_census(5, 5, 1000, 0).unwrap();
        assert!(c.complete);
        assert!(c.non_abelian_proper_sizes.is_empty());
        let sizes: BTreeSet<String> = c
            .entries
            .iter()
            .map(|e| e.closure_size.to_string())
            .collect();
        assert_eq!(
            sizes,
            ["1", "12", "2"].iter().map(|s| s.to_string()).collect()
        );
    }

    #[test]
    fn closure_size_matches_rack_closure() {
        use crate::rack::FiniteRack;
        let all: Vec<Permutation> = class_elements(7, 7).unwrap().collect();
        let mut sorted = all.clone();
        sorted.sort();
        let rack = FiniteRack::conjugation(&sorted).unwrap();
        let sigma = natural_cycle(7, 7);
        let i = rack.index_of(&sigma).unwrap();
        for tau in all.iter().step_by(7) {
            let j = rack.index_of(tau).unwrap();
            let by_rack = rack.subrack_closure(&[i, j]).len();
            assert_eq!(
                pair_closure_size(&sigma, tau).unwrap(),
                BigUint::from(by_rack),
                "{tau}"
            );
        }
    }

    #[test]
    fn lemma_for_five() {
        let r = lemma_square_check(5, 5, 1000, 0).unwrap();
        assert!(r.complete);
        assert_eq!(r.pairs_examined, 12);
        assert!(r.dichotomy_holds());
    }

    #[test]
    fn cache_round_trip() {
        let dir = std::env::temp_dir().join(format!("rackforge-cache-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("cache.json");
        let mut cache = WitnessCache::load(&path).unwrap();
        assert!(cache.is_empty());
        let cfg = SearchConfig::new(Strategy::Subgroup, 10_000, 0);
        let first = witness_search_cached(7, 8, &cfg, &mut cache).unwrap();
        assert!(!first.cached);
        cache.save(&path).unwrap();
        let mut reloaded = WitnessCache::load(&path).unwrap();
        assert_eq!(reloaded.len(), 1);
        let second = witness_search_cached(7, 8, &cfg, &mut reloaded).unwrap();
        assert!(second.cached);
        assert_eq!(second.witness(), first.witness());
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
