//! The acceptance checks behind `verify-all`, one function per check.
//!
//! A check passes when its result is exactly right and it finishes within
//! its time limit.

use std::collections::BTreeSet;
use std::time::Instant;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use rackforge::classify::{
    classify_class, fw_identify, lemma_square_check, subgroup_candidates, subrack_census,
    symmetric_group_witness, witness_search, FwTag, SearchConfig, SearchOutcome,
    Strategy as Search, Verdict,
};
use rackforge::constructions::{
    affine_frobenius_group, alternating_order, find_order_p_element, natural_cycle,
    order_p_class_reps, psl_permutation_group,
};
use rackforge::groups::{alternating_conjugate, alternating_generators, random_even_permutation};
use rackforge::homology::{
    boundary_matrices, second_cohomology_structure, smith_normal_form, IntegerMatrix,
};
use rackforge::numth::{cyclotomic_decompositions, cyclotomic_primes_below, jacobi};
use rackforge::rack::{type_d_pair, Ax2Evidence, FiniteRack, PairVerdict};
use rackforge::{PermGroup, Permutation};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub const ALL_IDS: [u8; 13] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13];

/// The property-based suites, skipped by `verify-all` without `--desk`.
pub const PROPERTY_SUITE_ID: u8 = 13;

/// Where the reference values come from.
pub const PROVENANCE: &[&str] = &[
    "1: type-D table for p in {5,7,11,13,17,23,31}, m in {p, p+1}",
    "2: primes (r^k-1)/(r-1) below 1000",
    "4: order spectrum {11, 660, 7920, 11!/2} for two 11-cycles on 11 points",
    "7: (p-1)/k classes of elements of order p in L_k(r)",
    "8: H^2(O_(5)) = k^x x G_10 and H^2 of the 24-element subrack of O_(7) = k^x x G_14",
    "11: maximal abelian subracks of size 2 in O_(5) and 3 in O_(7)",
    "12: non-abelian proper 2-generated subracks of O_(7) have 24 elements",
];

const PROPERTY_CASES: u32 = 1000;

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub limit_ms: u64,
    pub wall_clock_ms: u64,
}

impl CheckResult {
    /// One status line, e.g. `[PASS] 02 cyclotomic primes below 1000 (0 ms): …`.
    pub fn line(&self) -> String {
        format!(
            "[{}] {:02} {} ({} ms, limit {} ms): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.wall_clock_ms,
            self.limit_ms,
            self.detail
        )
    }
}

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lib<T>(r: rackforge::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

struct Check {
    id: u8,
    title: &'static str,
    limit_ms: u64,
    body: fn() -> Outcome,
}

const SECOND: u64 = 1000;
const MINUTE: u64 = 60 * SECOND;

const CHECKS: [Check; 13] = [
    Check {
        id: 1,
        title: "type-D table",
        limit_ms: SECOND,
        body: type_d_table,
    },
    Check {
        id: 2,
        title: "cyclotomic primes below 1000",
        limit_ms: SECOND,
        body: cyclotomic_primes,
    },
    Check {
        id: 3,
        title: "positive witnesses in subgroups",
        limit_ms: 5 * MINUTE + MINUTE,
        body: positive_witnesses,
    },
    Check {
        id: 4,
        title: "absence by exhaustion and sampling",
        limit_ms: 30 * SECOND + 10 * MINUTE,
        body: proven_absence,
    },
    Check {
        id: 5,
        title: "two-cycle group cases",
        limit_ms: 5 * MINUTE,
        body: two_cycle_cases,
    },
    Check {
        id: 6,
        title: "Jacobi splitting law",
        limit_ms: 10 * SECOND,
        body: jacobi_law,
    },
    Check {
        id: 7,
        title: "order-p class counts",
        limit_ms: 2 * MINUTE,
        body: class_counts,
    },
    Check {
        id: 8,
        title: "cohomology golden values",
        limit_ms: 61 * MINUTE,
        body: cohomology_golden,
    },
    Check {
        id: 9,
        title: "commuting-squares dichotomy and bound",
        limit_ms: 30 * SECOND,
        body: squares_lemma,
    },
    Check {
        id: 10,
        title: "symmetric-group witnesses",
        limit_ms: MINUTE,
        body: symmetric_witnesses,
    },
    Check {
        id: 11,
        title: "maximal abelian subracks",
        limit_ms: 30 * SECOND,
        body: abelian_subracks,
    },
    Check {
        id: 12,
        title: "subrack census for p = m = 7",
        limit_ms: 5 * MINUTE,
        body: census_seven,
    },
    Check {
        id: 13,
        title: "structural property suites",
        limit_ms: 30 * MINUTE,
        body: property_suites,
    },
];

/// Runs one check by id. Panics on an unknown id.
pub fn run_check(id: u8) -> CheckResult {
    let check = CHECKS.iter().find(|c| c.id == id).expect("known check id");
    let started = Instant::now();
    let outcome = (check.body)();
    let elapsed = started.elapsed().as_millis() as u64;
    let in_time = elapsed <= check.limit_ms;
    let (passed, detail) = match outcome {
        Ok(d) if in_time => (true, d),
        Ok(d) => (false, format!("{d}; over time limit")),
        Err(e) => (false, e),
    };
    CheckResult {
        id,
        title: check.title,
        passed,
        detail,
        limit_ms: check.limit_ms,
        wall_clock_ms: elapsed,
    }
}

pub fn run_selected(ids: &[u8]) -> Vec<CheckResult> {
    ids.iter().map(|&id| run_check(id)).collect()
}

fn type_d_table() -> Outcome {
    let expected = [
        (5, 5, false),
        (5, 6, false),
        (7, 7, false),
        (7, 8, true),
        (11, 11, false),
        (11, 12, false),
        (13, 13, true),
        (13, 14, true),
        (17, 17, true),
        (23, 23, false),
        (23, 24, false),
        (31, 31, true),
    ];
    for (p, m, type_d) in expected {
        let v = lib(classify_class(p, m))?;
        ensure((v.verdict == Verdict::TypeD) == type_d, || {
            format!("({p},{m}) gave {:?}", v.verdict)
        })?;
    }
    Ok(format!("{} classes match", expected.len()))
}

fn cyclotomic_primes() -> Outcome {
    let primes = cyclotomic_primes_below(1000);
    let expected = [3, 5, 7, 13, 17, 31, 73, 127, 257, 307, 757];
    ensure(primes == expected, || format!("got {primes:?}"))?;
    let d = lib(cyclotomic_decompositions(31))?.as_tuples();
    ensure(d.contains(&[2, 5]) && d.contains(&[5, 3]), || {
        format!("31 decomposes as {d:?}")
    })?;
    Ok("11 primes; 31 = (2^5-1)/1 = (5^3-1)/4".into())
}

fn positive_witnesses() -> Outcome {
    let cases: [(u64, usize, &str, u64); 4] = [
        (7, 8, "F_8 ⋊ F_8^×", SECOND),
        (13, 13, "L_3(3)", MINUTE),
        (13, 14, "L_3(3)", MINUTE),
        (17, 17, "L_2(16)", 5 * MINUTE),
    ];
    let mut found = Vec::new();
    for (p, m, expected_subgroup, limit) in cases {
        let started = Instant::now();
        let report = lib(witness_search(
            p,
            m,
            &SearchConfig::new(Search::Subgroup, u64::MAX, 0),
        ))?;
        let elapsed = started.elapsed().as_millis() as u64;
        let SearchOutcome::Found { witness, subgroup } = &report.outcome else {
            return Err(format!("({p},{m}): {:?}", report.outcome));
        };
        ensure(subgroup.as_deref() == Some(expected_subgroup), || {
            format!("({p},{m}) found in {subgroup:?}")
        })?;
        ensure(elapsed <= limit, || format!("({p},{m}) took {elapsed} ms"))?;
        let e = &witness.evidence;
        ensure(e.sigma_tau_squared != e.tau_sigma_squared, || {
            format!("({p},{m}) squares agree")
        })?;
        ensure(matches!(e.ax2, Ax2Evidence::OrbitSearch { .. }), || {
            format!("({p},{m}) Ax.2 settled by {:?}", e.ax2)
        })?;
        match lib(type_d_pair(&witness.sigma, &witness.tau))? {
            PairVerdict::Witness(w) if w == *witness => {}
            other => return Err(format!("({p},{m}) re-verified as {:?}", other.kind())),
        }
        found.push(format!(
            "({p},{m}) |<s,t>|={} in {expected_subgroup}",
            e.group_order
        ));
    }
    Ok(found.join("; "))
}

fn proven_absence() -> Outcome {
    let started = Instant::now();
    let mut parts = Vec::new();
    for (p, m, pairs) in [(5u64, 5usize, 12u64), (5, 6, 72), (7, 7, 360)] {
        let r = lib(witness_search(
            p,
            m,
            &SearchConfig::new(Search::Exhaustive, u64::MAX, 0),
        ))?;
        ensure(
            r.outcome == SearchOutcome::ProvenAbsent && r.pairs_examined == pairs,
            || format!("({p},{m}): {:?} over {} pairs", r.outcome, r.pairs_examined),
        )?;
        parts.push(format!("({p},{m}) {pairs} pairs"));
    }
    let exhaustive_ms = started.elapsed().as_millis() as u64;
    ensure(exhaustive_ms <= 30 * SECOND, || {
        format!("exhaustive part took {exhaustive_ms} ms")
    })?;

    let r = lib(witness_search(
        11,
        11,
        &SearchConfig::new(Search::Random, 10_000, 0),
    ))?;
    ensure(
        r.outcome == SearchOutcome::BudgetExhausted && r.pairs_examined == 10_000,
        || {
            format!(
                "(11,11) sampling: {:?} over {}",
                r.outcome, r.pairs_examined
            )
        },
    )?;
    let allowed: BTreeSet<BigUint> = [11u32, 660, 7920]
        .into_iter()
        .map(BigUint::from)
        .chain([alternating_order(11)])
        .collect();
    let spectrum = r.order_spectrum();
    ensure(spectrum.is_subset(&allowed), || {
        format!("(11,11) orders {spectrum:?}")
    })?;
    let seen: Vec<String> = spectrum.iter().map(BigUint::to_string).collect();
    parts.push(format!(
        "(11,11) 10000 samples, orders {{{}}}",
        seen.join(", ")
    ));
    Ok(parts.join("; "))
}

fn random_cycle(p: usize, degree: usize, rng: &mut ChaCha8Rng) -> Permutation {
    let mut points: Vec<usize> = (1..=degree).collect();
    points.shuffle(rng);
    points.truncate(p);
    Permutation::from_cycles(degree, &[points]).expect("valid cycle")
}

fn two_cycle_cases() -> Outcome {
    let mut disjoint = 0;
    for p in [5usize, 7, 11, 13] {
        let degree = 2 * p;
        let mut rng = ChaCha8Rng::seed_from_u64(p as u64);
        for i in 0..1000 {
            let s = random_cycle(p, degree, &mut rng);
            // Every tenth pair is forced disjoint so that case is exercised.
            let t = if i % 10 == 0 {
                let rest: Vec<usize> = (1..=degree).filter(|x| s.apply(x - 1) == x - 1).collect();
                Permutation::from_cycles(degree, &[rest]).expect("valid cycle")
            } else {
                random_cycle(p, degree, &mut rng)
            };
            let case = lib(fw_identify(&s, &t))?;
            let Some(tag) = case.tag() else {
                return Err(format!("{s}, {t}: {:?}", case.result));
            };
            let apart = s.support().iter().all(|x| !t.support().contains(x));
            if apart {
                disjoint += 1;
                let p2 = BigUint::from(p * p);
                ensure(tag == FwTag::Ii && case.order == p2, || {
                    format!("disjoint {s}, {t} gave {tag}")
                })?;
            }
        }
    }
    Ok(format!(
        "4000 pairs identified, {disjoint} disjoint all in case (ii)"
    ))
}

fn jacobi_law() -> Outcome {
    let mut count = 0;
    for p in [5u64, 7, 11, 13, 17, 23] {
        let sigma = natural_cycle(p as usize, p as usize);
        for ell in 1..p {
            let conj = lib(alternating_conjugate(
                &sigma,
                &sigma.pow(ell as i64),
                p as usize,
            ))?;
            let residue = lib(jacobi(ell as i64, p))? == 1;
            ensure(conj == residue, || format!("p={p}, l={ell}"))?;
            count += 1;
        }
    }
    Ok(format!("{count} powers agree with the Jacobi symbol"))
}

fn class_counts() -> Outcome {
    let mut parts = Vec::new();
    for (k, r, expected) in [(3usize, 2u64, 2usize), (3, 3, 4), (2, 4, 2)] {
        let g = lib(psl_permutation_group(k, r))?;
        let p = g.degree() as u64;
        let reps = lib(order_p_class_reps(&g, p))?;
        ensure(reps.len() == expected, || {
            format!("L_{k}({r}): {} classes", reps.len())
        })?;
        let mut same = 0;
        for rep in &reps {
            if lib(alternating_conjugate(&reps[0], rep, p as usize))? {
                same += 1;
            }
        }
        ensure(2 * same == expected, || {
            format!("L_{k}({r}): split {same}/{expected}")
        })?;
        parts.push(format!("L_{k}({r}) {expected}"));
    }
    Ok(parts.join(", "))
}

/// Conjugation rack on the `⟨gens⟩`-class of `x`, sorted.
fn orbit_rack(group: &PermGroup, x: &Permutation) -> Result<FiniteRack, String> {
    let mut class = lib(group.conjugacy_orbit(x, 100_000))?;
    class.sort();
    lib(FiniteRack::conjugation(&class))
}

fn pentagon_class() -> Result<FiniteRack, String> {
    let a5 = lib(PermGroup::new(&alternating_generators(5)))?;
    orbit_rack(&a5, &natural_cycle(5, 5))
}

fn heptagon_class() -> Result<FiniteRack, String> {
    let a7 = lib(PermGroup::new(&alternating_generators(7)))?;
    orbit_rack(&a7, &natural_cycle(7, 7))
}

/// The `L_3(2)`-class of `(1 2 … 7)`: a 24-element subrack of the 7-cycles.
fn heptagon_subrack() -> Result<FiniteRack, String> {
    let sigma = natural_cycle(7, 7);
    let l = lib(subgroup_candidates(7, 7, 0))?
        .into_iter()
        .find(|c| c.name == "L_3(2)")
        .ok_or("no L_3(2) candidate")?;
    orbit_rack(&l.group, &sigma)
}

fn cohomology_golden() -> Outcome {
    let started = Instant::now();
    let h5 = lib(second_cohomology_structure(&pentagon_class()?))?;
    let pentagon_ms = started.elapsed().as_millis() as u64;
    ensure(h5.free_rank == 1 && h5.torsion == [10], || {
        format!("O_(5): {}", h5.pretty)
    })?;
    ensure(pentagon_ms <= MINUTE, || {
        format!("O_(5) took {pentagon_ms} ms")
    })?;
    let sub = heptagon_subrack()?;
    ensure(sub.size() == 24, || {
        format!("subrack has {} elements", sub.size())
    })?;
    let h7 = lib(second_cohomology_structure(&sub))?;
    ensure(h7.free_rank == 1 && h7.torsion == [14], || {
        format!("24-element subrack: {}", h7.pretty)
    })?;
    Ok(format!(
        "O_(5): {}; 24-element subrack: {}",
        h5.pretty, h7.pretty
    ))
}

fn squares_lemma() -> Outcome {
    let mut parts = Vec::new();
    let mut failures = Vec::new();
    for (p, m) in [(5u64, 5usize), (7, 7)] {
        let r = lib(lemma_square_check(p, m, u64::MAX, 0))?;
        ensure(r.complete, || format!("({p},{m}) not exhaustive"))?;
        if !r.dichotomy_holds() {
            failures.push(format!(
                "({p},{m}) dichotomy fails for {}",
                r.dichotomy_violations[0]
            ));
        }
        if let Some(v) = r.bound_violations.first() {
            failures.push(format!(
                "({p},{m}) {} pairs exceed |<s,t>| <= {}, e.g. tau = {} with order {}",
                r.bound_violations.len(),
                p * p,
                v.tau,
                v.group_order
            ));
        }
        parts.push(format!(
            "({p},{m}) {} commuting-square pairs",
            r.squares_commute
        ));
    }
    if failures.is_empty() {
        Ok(parts.join("; "))
    } else {
        Err(failures.join("; "))
    }
}

fn symmetric_witnesses() -> Outcome {
    for p in [5u64, 7, 11, 13] {
        let w = lib(symmetric_group_witness(p))?;
        lib(w.verify())?;
    }
    Ok("p = 5, 7, 11, 13 verified".into())
}

fn largest_abelian(r: &FiniteRack) -> usize {
    (0..r.size())
        .map(|x| r.maximal_abelian_subrack_through(x).len())
        .max()
        .unwrap_or(0)
}

fn abelian_subracks() -> Outcome {
    let five = largest_abelian(&pentagon_class()?);
    let seven = largest_abelian(&heptagon_class()?);
    ensure(five == 2 && seven == 3, || {
        format!("sizes {five} and {seven}")
    })?;
    Ok("O_(5): 2, O_(7): 3".into())
}

fn census_seven() -> Outcome {
    let c = lib(subrack_census(7, 7, u64::MAX, 0))?;
    ensure(c.complete, || "census not exhaustive".into())?;
    ensure(c.non_abelian_proper_sizes == ["24"], || {
        format!("sizes {:?}", c.non_abelian_proper_sizes)
    })?;
    Ok(format!(
        "{} pairs, every non-abelian proper closure has 24 elements",
        c.pairs_examined
    ))
}

fn runner() -> TestRunner {
    let config = Config {
        cases: PROPERTY_CASES,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn run_suite<S: Strategy>(
    name: &str,
    strategy: &S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String>
where
    S::Value: std::fmt::Debug,
{
    runner()
        .run(strategy, test)
        .map_err(|e| format!("{name}: {e}"))
}

/// `Z/n` with `i ▷ j = t·j + (1 − t)·i`.
fn alexander_rack(n: usize, t: usize) -> FiniteRack {
    let table = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| ((t * j + (n + 1 - t) * i) % n) as u32)
                .collect()
        })
        .collect();
    FiniteRack::from_table(table)
}

fn rack_pool() -> Result<Vec<FiniteRack>, String> {
    let a4 = lib(PermGroup::new(&alternating_generators(4)))?;
    let s4 = lib(PermGroup::new(&[natural_cycle(4, 4), natural_cycle(2, 4)]))?;
    let frob = lib(affine_frobenius_group(3))?;
    let seven = lib(find_order_p_element(&frob, 7, 0))?;
    Ok(vec![
        FiniteRack::trivial(5),
        alexander_rack(5, 2),
        alexander_rack(7, 3),
        alexander_rack(9, 2),
        orbit_rack(&a4, &natural_cycle(3, 4))?,
        orbit_rack(&s4, &natural_cycle(2, 4))?,
        orbit_rack(&frob, &seven)?,
        pentagon_class()?,
        heptagon_subrack()?,
    ])
}

fn shuffled(n: usize, seed: u64) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    perm
}

fn det(m: &[Vec<i128>]) -> i128 {
    if m.len() == 1 {
        return m[0][0];
    }
    (0..m.len())
        .map(|j| {
            let minor: Vec<Vec<i128>> = m[1..]
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .filter(|(c, _)| *c != j)
                        .map(|(_, v)| *v)
                        .collect()
                })
                .collect();
            let sign = if j % 2 == 0 { 1 } else { -1 };
            sign * m[0][j] * det(&minor)
        })
        .sum()
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// Invariant factors from gcds of `k × k` minors.
fn minor_gcd_invariants(m: &[Vec<i64>]) -> Vec<BigInt> {
    let (rows, cols) = (m.len(), m[0].len());
    let mut divisors = vec![BigInt::one()];
    for k in 1..=rows.min(cols) {
        let mut g = BigInt::zero();
        for rs in subsets(rows, k) {
            for cs in subsets(cols, k) {
                let sub: Vec<Vec<i128>> = rs
                    .iter()
                    .map(|&r| cs.iter().map(|&c| m[r][c] as i128).collect())
                    .collect();
                g = g.gcd(&BigInt::from(det(&sub)));
            }
        }
        if g.is_zero() {
            break;
        }
        divisors.push(g);
    }
    divisors.windows(2).map(|w| &w[1] / &w[0]).collect()
}

fn property_suites() -> Outcome {
    let pool = rack_pool()?;
    run_suite(
        "rack axioms",
        &(0..pool.len(), any::<u64>()),
        |(i, seed)| {
            let r = pool[i].relabel(&shuffled(pool[i].size(), seed));
            prop_assert_eq!(r.validate(), Ok(()));
            Ok(())
        },
    )?;

    let pentagon = pentagon_class()?;
    let closures = (0..pentagon.size(), 0..pentagon.size()).prop_map(move |(a, b)| {
        let keep = pentagon.subrack_closure(&[a, b]);
        let index = |x: usize| keep.iter().position(|&k| k == x).expect("closed");
        let table = keep
            .iter()
            .map(|&i| {
                keep.iter()
                    .map(|&j| index(pentagon.op(i, j)) as u32)
                    .collect()
            })
            .collect();
        FiniteRack::from_table(table)
    });
    let alexander = (2usize..=8, 1usize..8).prop_filter_map("unit", |(n, t)| {
        (t < n && t.gcd(&n) == 1).then(|| alexander_rack(n, t))
    });
    let racks = prop_oneof![closures, alexander];
    run_suite("boundary composes to zero", &racks, |r| {
        let (d2, d3) = boundary_matrices(&r).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let product = d2
            .mul(&d3)
            .map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert!(product.is_zero());
        Ok(())
    })?;

    run_suite(
        "alternating group orders",
        &(3usize..=14, any::<u64>()),
        |(m, seed)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = random_even_permutation(m, &mut rng);
            let gens: Vec<Permutation> = alternating_generators(m)
                .iter()
                .map(|x| g.conjugate(x).expect("same degree"))
                .collect();
            let extra = random_even_permutation(m, &mut rng);
            let group = PermGroup::new(&[gens, vec![extra]].concat())
                .map_err(|e| TestCaseError::fail(e.to_string()))?;
            prop_assert_eq!(group.order(), &alternating_order(m));
            Ok(())
        },
    )?;

    let matrices = (1usize..=6, 1usize..=6).prop_flat_map(|(r, c)| {
        proptest::collection::vec(proptest::collection::vec(-5i64..=5, c), r)
    });
    run_suite("Smith form against minor gcds", &matrices, |m| {
        let snf = smith_normal_form(&IntegerMatrix::from_dense(&m));
        prop_assert_eq!(snf.invariants, minor_gcd_invariants(&m));
        Ok(())
    })?;
    Ok(format!("4 suites x {PROPERTY_CASES} cases"))
}
