//! Multi-indices, the graded-lex monomial basis and exact combinatorics.
//!
//! Graded-lex here means: lower total degree first, and within one degree the
//! exponent vectors in *descending* lexicographic order, so that for two
//! variables and degree 3 the basis reads `z1^3, z1^2 z2, z1 z2^2, z2^3`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_traits::One;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        MultiIndex(exponents)
    }

    pub fn zeros(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    /// The unit vector `e_i` in `n` variables.
    pub fn unit(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        MultiIndex(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    /// Number of variables.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn get(&self, i: usize) -> u32 {
        self.0[i]
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        debug_assert_eq!(self.len(), other.len());
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self - other`, or `None` if some component would go negative.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        debug_assert_eq!(self.len(), other.len());
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(MultiIndex)
    }

    /// `alpha!` = product of the factorials of the entries.
    pub fn factorial(&self) -> BigUint {
        self.0.iter().map(|&a| factorial(a)).product()
    }

    /// `|alpha|! / alpha!`.
    pub fn multinomial(&self) -> BigUint {
        factorial(self.degree()) / self.factorial()
    }

    /// Position inside `enumerate_degree(self.len(), self.degree())`,
    /// computed without materializing the list.
    pub fn rank(&self) -> usize {
        let n = self.len();
        let mut remaining = self.degree() as usize;
        let mut rank = 0usize;
        for (i, &a) in self.0.iter().enumerate() {
            let rest = n - i - 1;
            if rest == 0 {
                break;
            }
            // Every composition whose i-th entry exceeds `a` precedes us.
            for v in (a as usize + 1)..=remaining {
                rank += binomial_usize(remaining - v + rest - 1, rest - 1);
            }
            remaining -= a as usize;
        }
        rank
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

impl From<Vec<u32>> for MultiIndex {
    fn from(v: Vec<u32>) -> Self {
        MultiIndex(v)
    }
}

/// All multi-indices of `n` variables and total degree `degree`, in
/// graded-lex order.
pub fn enumerate_degree(n: usize, degree: u32) -> Vec<MultiIndex> {
    assert!(n >= 1, "need at least one variable");
    let mut out = Vec::with_capacity(dim_homogeneous_usize(n, degree));
    let mut current = vec![0u32; n];
    fill(&mut current, 0, degree, &mut out);
    out
}

fn fill(current: &mut [u32], pos: usize, remaining: u32, out: &mut Vec<MultiIndex>) {
    if pos + 1 == current.len() {
        current[pos] = remaining;
        out.push(MultiIndex(current.to_vec()));
        return;
    }
    for v in (0..=remaining).rev() {
        current[pos] = v;
        fill(current, pos + 1, remaining - v, out);
    }
}

/// Dimension of the space of homogeneous polynomials of degree `degree` in
/// `n` variables, `C(degree + n - 1, n - 1)`.
pub fn dim_homogeneous(n: usize, degree: u32) -> BigUint {
    assert!(n >= 1, "need at least one variable");
    binomial(degree as u64 + n as u64 - 1, n as u64 - 1)
}

/// Same as [`dim_homogeneous`], saturating at `usize::MAX`.
pub fn dim_homogeneous_usize(n: usize, degree: u32) -> usize {
    usize::try_from(dim_homogeneous(n, degree)).unwrap_or(usize::MAX)
}

pub fn factorial(k: u32) -> BigUint {
    (2..=k).fold(BigUint::one(), |acc, i| acc * i)
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::ZERO;
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

fn binomial_usize(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

/// `|alpha|! / alpha!` for a raw exponent slice.
pub fn multinomial(alpha: &[u32]) -> BigUint {
    MultiIndex::new(alpha.to_vec()).multinomial()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex::new(v.to_vec())
    }

    #[test]
    fn enumerate_small_cases() {
        assert_eq!(enumerate_degree(2, 0), vec![mi(&[0, 0])]);
        assert_eq!(
            enumerate_degree(2, 3),
            vec![mi(&[3, 0]), mi(&[2, 1]), mi(&[1, 2]), mi(&[0, 3])]
        );
    }

    #[test]
    fn enumerate_matches_brute_force() {
        // every 3-tuple with entries in 0..=2 summing to 2
        let mut brute = Vec::new();
        for a in 0..=2u32 {
            for b in 0..=2u32 {
                for c in 0..=2u32 {
                    if a + b + c == 2 {
                        brute.push(mi(&[a, b, c]));
                    }
                }
            }
        }
        brute.sort();
        let listed = enumerate_degree(3, 2);
        assert_eq!(listed.len(), 6);
        assert_eq!(listed, brute);
    }

    #[test]
    fn dimension_counts() {
        assert_eq!(dim_homogeneous(2, 3), BigUint::from(4u32));
        assert_eq!(dim_homogeneous(1, 7), BigUint::from(1u32));
        assert_eq!(dim_homogeneous(4, 5), BigUint::from(enumerate_degree(4, 5).len()));
        assert_eq!(enumerate_degree(4, 5).len(), 56);
    }

    #[test]
    fn rank_examples() {
        assert_eq!(mi(&[3, 0]).rank(), 0);
        assert_eq!(mi(&[0, 3]).rank(), 3);
        let list = enumerate_degree(3, 2);
        let pos = list.iter().position(|a| *a == mi(&[1, 0, 1])).unwrap();
        assert_eq!(mi(&[1, 0, 1]).rank(), pos);
    }

    #[test]
    fn factorials_and_multinomials() {
        assert_eq!(factorial(0), BigUint::one());
        assert_eq!(factorial(20), BigUint::from(2_432_902_008_176_640_000u64));
        assert_eq!(multinomial(&[2, 0]), BigUint::one());
        assert_eq!(multinomial(&[1, 1]), BigUint::from(2u32));
        assert_eq!(multinomial(&[2, 2, 1]), BigUint::from(30u32));
        // 25! does not fit in 64 bits
        assert!(factorial(25) > BigUint::from(u64::MAX));
    }

    #[test]
    fn multinomial_theorem() {
        for n in 1..=4usize {
            for m in 0..=10u32 {
                let total: BigUint = enumerate_degree(n, m).iter().map(|a| a.multinomial()).sum();
                assert_eq!(total, BigUint::from(n as u64).pow(m), "n={n} m={m}");
            }
        }
    }

    #[test]
    fn pascal_recurrence() {
        // dim(n, M) = sum_{k<=M} dim(n-1, k)
        for n in 2..=5usize {
            for m in 0..=8u32 {
                let partial: BigUint = (0..=m).map(|k| dim_homogeneous(n - 1, k)).sum();
                assert_eq!(dim_homogeneous(n, m), partial);
            }
        }
    }

    #[test]
    fn ordering_is_graded() {
        assert!(mi(&[0, 1]) < mi(&[2, 0]));
        assert!(mi(&[2, 0]) < mi(&[1, 1]));
    }

    proptest! {
        #[test]
        fn rank_inverts_enumeration(n in 1usize..5, m in 0u32..8) {
            for (i, a) in enumerate_degree(n, m).iter().enumerate() {
                prop_assert_eq!(a.rank(), i);
            }
        }

        #[test]
        fn enumeration_is_sorted_and_unique(n in 1usize..5, m in 0u32..7) {
            let list = enumerate_degree(n, m);
            prop_assert!(list.windows(2).all(|w| w[0] < w[1]));
            prop_assert!(list.iter().all(|a| a.degree() == m && a.len() == n));
        }
    }
}
