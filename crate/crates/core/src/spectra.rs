//! Eventual index and period of `{A^m}` and of `{B_m = A^m (A^T)^m}`.

use std::collections::HashMap;

use serde::Serialize;

use crate::{BoolMatrix, Error, Fingerprint, Result};

/// Default cap on multiplications spent looking for a repeat.
pub const DEFAULT_BUDGET: usize = 200_000;

/// Tail of an eventually periodic matrix sequence `X_1, X_2, ...`.
///
/// `index` is the least `m >= 1` with `X_m = X_{m+period}`; `cycle` holds
/// `X_index, ..., X_{index+period-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PeriodicTail {
    pub index: usize,
    pub period: usize,
    #[serde(skip)]
    pub cycle: Vec<BoolMatrix>,
}

impl PeriodicTail {
    /// Element `X_m` for any `m >= index`.
    pub fn at(&self, m: usize) -> &BoolMatrix {
        assert!(m >= self.index, "X_{m} precedes the cycle");
        &self.cycle[(m - self.index) % self.period]
    }
}

/// Powers `A^1, ..., A^{index+period-1}` together with the tail.
#[derive(Debug, Clone)]
pub struct PowerSequence {
    /// `powers[m-1] = A^m`.
    pub powers: Vec<BoolMatrix>,
    pub tail: PeriodicTail,
}

impl PowerSequence {
    /// `A^m` for any `m >= 1`.
    pub fn power(&self, m: usize) -> &BoolMatrix {
        assert!(m >= 1);
        if m <= self.powers.len() {
            &self.powers[m - 1]
        } else {
            self.tail.at(m)
        }
    }
}

/// Runs `A, A^2, ...` until a matrix repeats, within `budget` products.
pub fn power_sequence(a: &BoolMatrix, budget: usize) -> Result<PowerSequence> {
    let mut seen: HashMap<Fingerprint, Vec<usize>> = HashMap::new();
    let mut powers = vec![a.clone()];
    seen.entry(a.fingerprint()).or_default().push(1);
    loop {
        if powers.len() > budget {
            return Err(Error::BudgetExceeded(budget));
        }
        let next = powers[powers.len() - 1].multiply(a)?;
        let m = powers.len() + 1;
        let fp = next.fingerprint();
        let first = seen
            .get(&fp)
            .and_then(|ms| ms.iter().copied().find(|&k| powers[k - 1] == next));
        if let Some(first) = first {
            let cycle = powers[first - 1..].to_vec();
            return Ok(PowerSequence {
                tail: PeriodicTail {
                    index: first,
                    period: m - first,
                    cycle,
                },
                powers,
            });
        }
        seen.entry(fp).or_default().push(m);
        powers.push(next);
    }
}

pub fn power_tail(a: &BoolMatrix) -> Result<PeriodicTail> {
    power_sequence(a, DEFAULT_BUDGET).map(|seq| seq.tail)
}

pub fn matrix_period(a: &BoolMatrix) -> Result<usize> {
    power_tail(a).map(|t| t.period)
}

/// `B_m = A^m (A^T)^m`.
pub fn competition_matrix(a: &BoolMatrix, m: u64) -> Result<BoolMatrix> {
    if m == 0 {
        return Err(Error::ZeroStep);
    }
    Ok(a.power(m).gram())
}

/// Competition index, period and cycle derived from a power sequence.
pub fn competition_tail_from(seq: &PowerSequence) -> PeriodicTail {
    let (qa, pa) = (seq.tail.index, seq.tail.period);
    let horizon = qa + 2 * pa;
    let b: Vec<BoolMatrix> = (1..=horizon).map(|m| seq.power(m).gram()).collect();
    let at = |m: usize| &b[m - 1];

    // B_m is periodic with period pa from qa on; find its least period.
    let period = (1..=pa)
        .find(|&p| (qa..qa + pa).all(|m| at(m) == at(m + p)))
        .expect("pa is always a period");
    let mut index = qa;
    while index > 1 && at(index - 1) == at(index - 1 + period) {
        index -= 1;
    }
    let cycle = (index..index + period).map(|m| at(m).clone()).collect();
    PeriodicTail {
        index,
        period,
        cycle,
    }
}

pub fn competition_tail(a: &BoolMatrix) -> Result<PeriodicTail> {
    power_sequence(a, DEFAULT_BUDGET).map(|seq| competition_tail_from(&seq))
}

/// Limit of `{B_m}`; fails if the competition period exceeds 1.
pub fn competition_limit(a: &BoolMatrix) -> Result<BoolMatrix> {
    let tail = competition_tail(a)?;
    limit_of(&tail)
}

pub fn limit_of(tail: &PeriodicTail) -> Result<BoolMatrix> {
    if tail.period != 1 {
        return Err(Error::NoLimit(tail.period));
    }
    Ok(tail.cycle[0].clone())
}

/// Residue-class ordering and the expected block limit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueBlocks {
    /// `order[k]` is the vertex at position `k + 1` after permuting.
    pub order: Vec<usize>,
    /// Class `i` (1..=d) is `{v : v = i mod d}`.
    pub classes: Vec<Vec<usize>>,
    pub block_sizes: Vec<usize>,
    /// Unpermuted: `(u, v) = 1` iff `u = v mod d`.
    pub expected: BoolMatrix,
}

pub fn residue_classes(n: usize, d: usize) -> Vec<Vec<usize>> {
    (1..=d)
        .map(|i| (i..=n).step_by(d).collect::<Vec<_>>())
        .collect()
}

pub fn residue_block_matrix(n: usize, d: usize) -> Result<ResidueBlocks> {
    if d == 0 || d > n {
        return Err(Error::DimensionMismatch { left: n, right: d });
    }
    let classes = residue_classes(n, d);
    let order = classes.iter().flatten().copied().collect();
    let block_sizes = classes.iter().map(Vec::len).collect();
    let expected = BoolMatrix::from_fn(n, |u, v| u % d == v % d)?;
    Ok(ResidueBlocks {
        order,
        classes,
        block_sizes,
        expected,
    })
}

/// Block-diagonal `diag(J_{m_1}, ..., J_{m_d})`.
pub fn block_diagonal_ones(sizes: &[usize]) -> Result<BoolMatrix> {
    let n = sizes.iter().sum();
    let mut block_of = Vec::with_capacity(n);
    for (b, &len) in sizes.iter().enumerate() {
        block_of.extend(std::iter::repeat_n(b, len));
    }
    BoolMatrix::from_fn(n, |i, j| block_of[i - 1] == block_of[j - 1])
}

/// Smallest `m` such that `A^k` is Toeplitz for every `k >= m`, if any.
pub fn power_is_eventually_toeplitz(a: &BoolMatrix, tail: &PeriodicTail) -> Option<usize> {
    if !tail.cycle.iter().all(BoolMatrix::is_toeplitz) {
        return None;
    }
    let mut prefix = vec![a.clone()];
    for _ in 2..tail.index {
        let next = prefix[prefix.len() - 1]
            .multiply(a)
            .expect("same dimension");
        prefix.push(next);
    }
    let mut first = tail.index;
    while first > 1 && prefix[first - 2].is_toeplitz() {
        first -= 1;
    }
    Some(first)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ToeplitzSpec;

    fn matrix(lit: &str) -> BoolMatrix {
        lit.parse::<ToeplitzSpec>().unwrap().build_matrix()
    }

    /// Oracle: brute-force the least (index, period) by comparing all powers.
    fn brute_tail(a: &BoolMatrix, limit: usize) -> (usize, usize) {
        let mut p = vec![a.clone()];
        for _ in 1..limit {
            let next = p[p.len() - 1].multiply(a).unwrap();
            p.push(next);
        }
        for m0 in 1..limit {
            for per in 1..limit {
                if m0 + per + per <= limit && (m0..=limit - per).all(|m| p[m - 1] == p[m + per - 1])
                {
                    return (m0, per);
                }
            }
        }
        panic!("limit too small");
    }

    #[test]
    fn small_tails() {
        let t = power_tail(&matrix("T5<2;4>")).unwrap();
        assert_eq!((t.index, t.period), (2, 3));
        let t = power_tail(&matrix("T3<1;2>")).unwrap();
        assert_eq!((t.index, t.period), (1, 3));
        let t = power_tail(&BoolMatrix::identity(4).unwrap()).unwrap();
        assert_eq!((t.index, t.period), (1, 1));
        assert_eq!(matrix_period(&matrix("T8<1,4;2,5>")).unwrap(), 3);
        assert_eq!(matrix_period(&matrix("T2<1;1>")).unwrap(), 2);
    }

    #[test]
    fn tails_match_brute_force() {
        for lit in [
            "T5<2;4>",
            "T8<1,4;2,5>",
            "T6<2,4;4,5>",
            "T7<3;5>",
            "T9<2,7;6>",
        ] {
            let a = matrix(lit);
            let t = power_tail(&a).unwrap();
            assert_eq!((t.index, t.period), brute_tail(&a, 80), "{lit}");
            // Minimality: X_{index-1} differs from X_{index-1+period}.
            if t.index > 1 {
                assert_ne!(
                    a.power(t.index as u64 - 1),
                    a.power((t.index - 1 + t.period) as u64)
                );
            }
        }
    }

    #[test]
    fn budget_is_enforced() {
        let a = matrix("T5<2;4>");
        assert_eq!(power_sequence(&a, 2).err(), Some(Error::BudgetExceeded(2)));
    }

    #[test]
    fn competition_examples() {
        let t = competition_tail(&matrix("T2<1;1>")).unwrap();
        assert_eq!((t.index, t.period), (1, 1));
        assert_eq!(t.cycle[0], BoolMatrix::identity(2).unwrap());

        let a = matrix("T5<2;4>");
        let t = competition_tail(&a).unwrap();
        assert_eq!(t.period, 1);
        let brute: Vec<_> = (1..=10)
            .map(|m| competition_matrix(&a, m).unwrap())
            .collect();
        assert!(brute[t.index - 1..].iter().all(|b| *b == brute[9]));
        if t.index > 1 {
            assert_ne!(brute[t.index - 2], brute[9]);
        }

        assert_eq!(
            competition_limit(&matrix("T3<1;2>")).unwrap(),
            BoolMatrix::identity(3).unwrap()
        );
        assert_eq!(competition_matrix(&a, 0), Err(Error::ZeroStep));
    }

    #[test]
    fn competition_of_permutation_is_identity() {
        let perm = BoolMatrix::from_rows(&["0010", "1000", "0001", "0100"]).unwrap();
        for m in 1..6 {
            assert_eq!(
                competition_matrix(&perm, m).unwrap(),
                BoolMatrix::identity(4).unwrap()
            );
        }
        assert_eq!(
            competition_limit(&perm).unwrap(),
            BoolMatrix::identity(4).unwrap()
        );
    }

    #[test]
    fn first_competition_step_shares_columns() {
        let a = matrix("T8<1,4;2,5>");
        let b1 = competition_matrix(&a, 1).unwrap();
        for i in 1..=8 {
            for j in 1..=8 {
                let common = (1..=8).any(|k| a.get(i, k) && a.get(j, k));
                assert_eq!(b1.get(i, j), common);
            }
        }
    }

    #[test]
    fn running_example_limit_is_residue_blocks() {
        let a = matrix("T8<1,4;2,5>");
        let limit = competition_limit(&a).unwrap();
        let blocks = residue_block_matrix(8, 3).unwrap();
        assert_eq!(limit, blocks.expected);
        assert_eq!(
            limit.permute(&blocks.order).unwrap(),
            block_diagonal_ones(&blocks.block_sizes).unwrap()
        );
        assert!(competition_matrix(&a, 40).unwrap() == limit);
    }

    #[test]
    fn residue_blocks() {
        let b = residue_block_matrix(8, 3).unwrap();
        assert_eq!(b.block_sizes, vec![3, 3, 2]);
        assert_eq!(b.classes, vec![vec![1, 4, 7], vec![2, 5, 8], vec![3, 6]]);
        assert_eq!(b.order, vec![1, 4, 7, 2, 5, 8, 3, 6]);
        assert_eq!(
            residue_block_matrix(5, 1).unwrap().expected,
            BoolMatrix::ones(5).unwrap()
        );
        assert_eq!(
            residue_block_matrix(4, 4).unwrap().expected,
            BoolMatrix::identity(4).unwrap()
        );
        assert!(residue_block_matrix(4, 5).is_err());
    }

    #[test]
    fn eventually_toeplitz_examples() {
        let a = matrix("T5<2;4>");
        let tail = power_tail(&a).unwrap();
        assert_eq!(power_is_eventually_toeplitz(&a, &tail), None);

        let a = matrix("T8<1,4;2,5>");
        let tail = power_tail(&a).unwrap();
        let first = power_is_eventually_toeplitz(&a, &tail).unwrap();
        for m in first..first + 12 {
            assert!(a.power(m as u64).is_toeplitz());
        }
        if first > 1 {
            assert!(!a.power(first as u64 - 1).is_toeplitz());
        }
    }
}
