use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rackforge::homology::{smith_normal_form, IntegerMatrix};

fn det(m: &[Vec<i128>]) -> i128 {
    let n = m.len();
    if n == 1 {
        return m[0][0];
    }
    (0..n)
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

/// d₁⋯d_k equals the gcd of all k×k minors.
fn determinantal_invariants(m: &[Vec<i64>]) -> Vec<BigInt> {
    let rows = m.len();
    let cols = m[0].len();
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

fn small_matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..=4, 1usize..=4).prop_flat_map(|(r, c)| {
        proptest::collection::vec(proptest::collection::vec(-6i64..=6, c), r)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn snf_matches_minor_gcds(m in small_matrix()) {
        let snf = smith_normal_form(&IntegerMatrix::from_dense(&m));
        prop_assert_eq!(snf.invariants, determinantal_invariants(&m));
    }

    #[test]
    fn snf_invariant_under_column_permutation(m in small_matrix(), shift in 0usize..4) {
        let cols = m[0].len();
        let shifted: Vec<Vec<i64>> = m
            .iter()
            .map(|row| (0..cols).map(|j| row[(j + shift) % cols]).collect())
            .collect();
        prop_assert_eq!(
            smith_normal_form(&IntegerMatrix::from_dense(&m)),
            smith_normal_form(&IntegerMatrix::from_dense(&shifted))
        );
    }
}
