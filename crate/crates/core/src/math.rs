//! Exact integer arithmetic and tree degree sequences.
//!
//! Counts are [`BigCount`] (signed, because the inversion of the dimension
//! expansion alternates signs before everything cancels). Every closed form
//! in this crate multiplies numerators out fully and then divides through
//! [`exact_div`], which refuses to round.

use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

pub type BigCount = BigInt;

const FACTORIAL_TABLE: usize = 256;

fn factorial_table() -> &'static [BigUint] {
    static TABLE: OnceLock<Vec<BigUint>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table = Vec::with_capacity(FACTORIAL_TABLE);
        let mut acc = BigUint::one();
        table.push(acc.clone());
        for k in 1..FACTORIAL_TABLE as u64 {
            acc *= k;
            table.push(acc.clone());
        }
        table
    })
}

pub fn factorial(k: u64) -> BigUint {
    if (k as usize) < FACTORIAL_TABLE {
        return factorial_table()[k as usize].clone();
    }
    let mut acc = factorial_table()[FACTORIAL_TABLE - 1].clone();
    for j in FACTORIAL_TABLE as u64..=k {
        acc *= j;
    }
    acc
}

/// `(n1, ..., nk)! = (n1 + ... + nk)! / (n1! ... nk!)`, and zero as soon as
/// any part is negative.
pub fn multinomial(parts: &[i64]) -> BigCount {
    if parts.iter().any(|&p| p < 0) {
        return BigCount::zero();
    }
    let total: u64 = parts.iter().map(|&p| p as u64).sum();
    let mut denominator = BigUint::one();
    for &p in parts {
        if p > 1 {
            denominator *= factorial(p as u64);
        }
    }
    BigInt::from(factorial(total) / denominator)
}

/// Binomial coefficient with the usual conventions: zero for `k < 0` or
/// `k > n`, and for negative `n`.
pub fn binomial(n: i64, k: i64) -> BigCount {
    if n < 0 || k < 0 || k > n {
        return BigCount::zero();
    }
    let k = k.min(n - k) as u64;
    let n = n as u64;
    let mut acc = BigUint::one();
    for j in 0..k {
        acc *= n - j;
        acc /= j + 1;
    }
    BigInt::from(acc)
}

pub fn pow2(e: u32) -> BigCount {
    BigCount::one() << e
}

/// Divides and insists on a zero remainder.
pub fn exact_div(numerator: &BigCount, denominator: &BigCount, formula: &'static str) -> Result<BigCount> {
    if denominator.is_zero() {
        return Err(Error::InexactDivision {
            formula,
            numerator: numerator.to_string(),
            denominator: "0".into(),
        });
    }
    let (q, r) = numerator.div_rem(denominator);
    if !r.is_zero() {
        return Err(Error::InexactDivision {
            formula,
            numerator: numerator.to_string(),
            denominator: denominator.to_string(),
        });
    }
    Ok(q)
}

/// Sorted vertex-degree multiset of a tree on `n` vertices.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DegreeSequence {
    degrees: Vec<usize>,
}

impl DegreeSequence {
    /// Sorts `degrees` and checks that it is the degree sequence of some tree.
    pub fn new(mut degrees: Vec<usize>) -> Result<Self> {
        let n = degrees.len();
        if n < 2 {
            return Err(Error::InvalidInput(format!(
                "a tree degree sequence needs at least 2 vertices, got {n}"
            )));
        }
        if let Some(&d) = degrees.iter().find(|&&d| d == 0 || d > n - 1) {
            return Err(Error::InvalidInput(format!(
                "degree {d} outside 1..={} for n = {n}",
                n - 1
            )));
        }
        let sum: usize = degrees.iter().sum();
        if sum != 2 * (n - 1) {
            return Err(Error::InvalidInput(format!(
                "degrees sum to {sum}, a tree on {n} vertices needs {}",
                2 * (n - 1)
            )));
        }
        degrees.sort_unstable();
        Ok(Self { degrees })
    }

    /// Builds the sequence from a partition of `n - 2`: each part plus one,
    /// padded with leaves.
    pub fn from_partition(n: usize, parts: &[usize]) -> Result<Self> {
        if parts.len() > n {
            return Err(Error::InvalidInput(format!("partition {parts:?} too long for n = {n}")));
        }
        let mut degrees = vec![1; n - parts.len()];
        degrees.extend(parts.iter().map(|&p| p + 1));
        Self::new(degrees)
    }

    pub fn n(&self) -> usize {
        self.degrees.len()
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn sum_squares(&self) -> i64 {
        self.degrees.iter().map(|&d| (d * d) as i64).sum()
    }

    pub fn max_degree(&self) -> usize {
        *self.degrees.last().expect("non-empty")
    }

    pub fn census(&self) -> DegreeCensus {
        census(self)
    }
}

impl std::fmt::Display for DegreeSequence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (k, d) in self.degrees.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{d}")?;
        }
        write!(f, ")")
    }
}

/// Degree multiplicities `alpha[d]` and the power sums
/// `X_k = sum_d d^k alpha[d]` for `k <= 4`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeCensus {
    n: usize,
    /// `alpha[d]` for `d in 0..n`; `alpha[0]` is always zero.
    alpha: Vec<i64>,
    moments: [i64; 5],
}

impl DegreeCensus {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of vertices of degree `d` (zero outside `1..n`).
    pub fn alpha(&self, d: usize) -> i64 {
        self.alpha.get(d).copied().unwrap_or(0)
    }

    /// `alpha_1 ..= alpha_{n-1}`.
    pub fn alphas(&self) -> &[i64] {
        &self.alpha[1..]
    }

    pub fn moment(&self, k: usize) -> i64 {
        self.moments[k]
    }

    /// Degrees that actually occur.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        (1..self.alpha.len()).filter(|&d| self.alpha[d] > 0)
    }
}

pub fn census(delta: &DegreeSequence) -> DegreeCensus {
    let n = delta.n();
    let mut alpha = vec![0i64; n];
    for &d in delta.degrees() {
        alpha[d] += 1;
    }
    let mut moments = [0i64; 5];
    for &d in delta.degrees() {
        let mut p = 1i64;
        for m in moments.iter_mut() {
            *m += p;
            p *= d as i64;
        }
    }
    DegreeCensus { n, alpha, moments }
}

/// Partitions of `m` in lexicographically descending order, parts listed
/// largest first: `(m), (m-1, 1), ..., (1, ..., 1)`.
#[derive(Clone, Debug)]
pub struct Partitions {
    current: Option<Vec<usize>>,
}

impl Partitions {
    pub fn new(m: usize) -> Self {
        let first = if m == 0 { Vec::new() } else { vec![m] };
        Self { current: Some(first) }
    }
}

impl Iterator for Partitions {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let current = self.current.take()?;
        // rightmost part that can still be split
        if let Some(k) = current.iter().rposition(|&p| p > 1) {
            let mut next = current[..k].to_vec();
            let part = current[k] - 1;
            let mut rest: usize = current[k + 1..].iter().sum::<usize>() + 1;
            next.push(part);
            while rest > 0 {
                let p = part.min(rest);
                next.push(p);
                rest -= p;
            }
            self.current = Some(next);
        }
        Some(current)
    }
}

/// Every sorted degree sequence of a tree on `n` vertices, in the order of
/// the partitions of `n - 2` given by [`Partitions`].
pub fn degree_sequences(n: usize) -> Result<impl Iterator<Item = DegreeSequence>> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("degree sequences need n >= 2, got {n}")));
    }
    Ok(Partitions::new(n - 2)
        .map(move |parts| DegreeSequence::from_partition(n, &parts).expect("partition of n-2 is a tree sequence")))
}
