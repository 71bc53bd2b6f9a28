//! Stirling-type number families and the composition-indexed coefficient
//! polynomials used by the face-probability formulas.
//!
//! Four triangles are kept, all indexed `(n, k)` with `0 <= k <= n`:
//!
//! * `First`: signless Stirling numbers of the first kind, the coefficients
//!   of `t(t+1)...(t+n-1)`.
//! * `Second`: Stirling numbers of the second kind.
//! * `FirstB`: coefficients of `(t+1)(t+3)...(t+2n-1)`.
//! * `SecondB`: `sum_{m=k}^{n} 2^(m-k) C(n,m) {m k}`.
//!
//! Reads outside `0 <= k <= n` return zero. Tables are filled lazily per
//! family and are immutable afterwards, so one `StirlingTables` can be shared
//! between threads.

use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which Stirling-type family to read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StirlingKind {
    First,
    Second,
    FirstB,
    SecondB,
}

impl StirlingKind {
    pub const ALL: [StirlingKind; 4] = [
        StirlingKind::First,
        StirlingKind::Second,
        StirlingKind::FirstB,
        StirlingKind::SecondB,
    ];

    fn index(self) -> usize {
        match self {
            StirlingKind::First => 0,
            StirlingKind::Second => 1,
            StirlingKind::FirstB => 2,
            StirlingKind::SecondB => 3,
        }
    }
}

impl fmt::Display for StirlingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            StirlingKind::First => "first",
            StirlingKind::Second => "second",
            StirlingKind::FirstB => "first_b",
            StirlingKind::SecondB => "second_b",
        };
        f.write_str(name)
    }
}

type Triangle = Vec<Vec<BigUint>>;

/// Lazily built, read-only triangles of the four families up to `max_n`.
pub struct StirlingTables {
    max_n: usize,
    families: [OnceLock<Triangle>; 4],
    zero: BigUint,
}

impl fmt::Debug for StirlingTables {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let built: Vec<StirlingKind> = StirlingKind::ALL
            .into_iter()
            .filter(|k| self.families[k.index()].get().is_some())
            .collect();
        f.debug_struct("StirlingTables")
            .field("max_n", &self.max_n)
            .field("built", &built)
            .finish()
    }
}

impl StirlingTables {
    pub fn new(max_n: usize) -> Self {
        StirlingTables {
            max_n,
            families: Default::default(),
            zero: BigUint::zero(),
        }
    }

    /// Tables with a single entry shifted by `+1`. Only useful for checking
    /// that identity checks actually detect a corrupted table.
    #[doc(hidden)]
    pub fn tampered(max_n: usize, kind: StirlingKind, n: usize, k: usize) -> Self {
        assert!(k <= n && n <= max_n, "tampered entry out of range");
        let tables = StirlingTables::new(max_n);
        let mut triangle = tables.build(kind);
        triangle[n][k] += 1u32;
        tables.families[kind.index()]
            .set(triangle)
            .expect("fresh table");
        tables
    }

    pub fn max_n(&self) -> usize {
        self.max_n
    }

    /// Checked lookup: negative `n` and `n > max_n` are errors, any other
    /// out-of-range `k` reads as zero.
    pub fn stirling(&self, kind: StirlingKind, n: i64, k: i64) -> Result<BigUint> {
        if n < 0 {
            return Err(Error::domain(format!(
                "stirling {kind}: n must be non-negative, got {n}"
            )));
        }
        if n as u64 > self.max_n as u64 {
            return Err(Error::domain(format!(
                "stirling {kind}: n = {n} exceeds table size {}",
                self.max_n
            )));
        }
        Ok(self.entry(kind, n, k).clone())
    }

    /// Unchecked read used by the formula code. Any index outside the
    /// triangle, including negative `n`, is zero.
    ///
    /// Panics if `n > max_n`.
    pub fn entry(&self, kind: StirlingKind, n: i64, k: i64) -> &BigUint {
        if n < 0 || k < 0 || k > n {
            return &self.zero;
        }
        let (n, k) = (n as usize, k as usize);
        assert!(
            n <= self.max_n,
            "stirling table holds n <= {}, asked for {n}",
            self.max_n
        );
        &self.triangle(kind)[n][k]
    }

    /// Full row `n` of a family, `k = 0..=n`.
    pub fn row(&self, kind: StirlingKind, n: usize) -> &[BigUint] {
        assert!(n <= self.max_n);
        &self.triangle(kind)[n]
    }

    pub fn first(&self, n: i64, k: i64) -> &BigUint {
        self.entry(StirlingKind::First, n, k)
    }

    pub fn second(&self, n: i64, k: i64) -> &BigUint {
        self.entry(StirlingKind::Second, n, k)
    }

    pub fn first_b(&self, n: i64, k: i64) -> &BigUint {
        self.entry(StirlingKind::FirstB, n, k)
    }

    pub fn second_b(&self, n: i64, k: i64) -> &BigUint {
        self.entry(StirlingKind::SecondB, n, k)
    }

    fn triangle(&self, kind: StirlingKind) -> &Triangle {
        self.families[kind.index()].get_or_init(|| self.build(kind))
    }

    fn build(&self, kind: StirlingKind) -> Triangle {
        match kind {
            StirlingKind::First => build_linear(self.max_n, |n, _k| (n - 1) as u64),
            StirlingKind::Second => build_linear(self.max_n, |_n, k| k as u64),
            StirlingKind::FirstB => build_first_b(self.max_n),
            StirlingKind::SecondB => build_second_b(self.max_n, self.triangle(StirlingKind::Second)),
        }
    }
}

/// Triangles obeying `T(n,k) = T(n-1,k-1) + w(n,k) T(n-1,k)` with `T(0,0) = 1`.
fn build_linear(max_n: usize, weight: impl Fn(usize, usize) -> u64) -> Triangle {
    let mut rows: Triangle = Vec::with_capacity(max_n + 1);
    rows.push(vec![BigUint::one()]);
    for n in 1..=max_n {
        let prev = &rows[n - 1];
        let mut row = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let mut v = if k >= 1 { prev[k - 1].clone() } else { BigUint::zero() };
            if k < n {
                let w = weight(n, k);
                if w != 0 {
                    v += &prev[k] * w;
                }
            }
            row.push(v);
        }
        rows.push(row);
    }
    rows
}

fn build_first_b(max_n: usize) -> Triangle {
    // (t+1)(t+3)...(t+2n-1): multiplying row n-1 by (t + 2n - 1).
    build_linear(max_n, |n, _k| (2 * n - 1) as u64)
}

fn build_second_b(max_n: usize, second: &Triangle) -> Triangle {
    let binom = pascal(max_n);
    (0..=max_n)
        .map(|n| {
            (0..=n)
                .map(|k| {
                    let mut acc = BigUint::zero();
                    for m in k..=n {
                        let term = &binom[n][m] * &second[m][k];
                        acc += term << (m - k);
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

fn pascal(max_n: usize) -> Triangle {
    let mut rows: Triangle = Vec::with_capacity(max_n + 1);
    rows.push(vec![BigUint::one()]);
    for n in 1..=max_n {
        let prev = &rows[n - 1];
        let mut row = vec![BigUint::one(); n + 1];
        for k in 1..n {
            row[k] = &prev[k - 1] + &prev[k];
        }
        rows.push(row);
    }
    rows
}

/// Single Stirling-type number, building throwaway tables of size `n`.
pub fn stirling(kind: StirlingKind, n: i64, k: i64) -> Result<BigUint> {
    if n < 0 {
        return Err(Error::domain(format!(
            "stirling {kind}: n must be non-negative, got {n}"
        )));
    }
    StirlingTables::new(n as usize).stirling(kind, n, k)
}

/// `C(n, k)`, zero when `k` is outside `0..=n`.
pub fn binomial(n: i64, k: i64) -> Result<BigUint> {
    if n < 0 {
        return Err(Error::domain(format!(
            "binomial: n must be non-negative, got {n}"
        )));
    }
    if k < 0 || k > n {
        return Ok(BigUint::zero());
    }
    Ok(num_integer::binomial(BigUint::from(n as u64), BigUint::from(k as u64)))
}

pub fn factorial(n: usize) -> BigUint {
    (1..=n as u64).fold(BigUint::one(), |acc, i| acc * i)
}

/// Ordered block lengths `j_1, ..., j_k` of a prefix of `{1, ..., n}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Composition {
    parts: Vec<usize>,
}

impl Composition {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if let Some(pos) = parts.iter().position(|&p| p == 0) {
            return Err(Error::domain(format!(
                "composition part {} is zero; every block needs length >= 1",
                pos + 1
            )));
        }
        Ok(Composition { parts })
    }

    /// Block lengths from increasing indices `1 <= i_1 < ... < i_k`.
    pub fn from_indices(indices: &[usize]) -> Result<Self> {
        let mut prev = 0usize;
        let mut parts = Vec::with_capacity(indices.len());
        for &i in indices {
            if i <= prev {
                return Err(Error::domain(format!(
                    "indices must be strictly increasing and >= 1, got {indices:?}"
                )));
            }
            parts.push(i - prev);
            prev = i;
        }
        Ok(Composition { parts })
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn total(&self) -> usize {
        self.parts.iter().sum()
    }

    /// `n - (j_1 + ... + j_k)`, or an error if the parts overshoot `n`.
    pub fn remainder(&self, n: usize) -> Result<usize> {
        n.checked_sub(self.total()).ok_or_else(|| {
            Error::domain(format!(
                "composition {:?} sums to {} > n = {n}",
                self.parts,
                self.total()
            ))
        })
    }
}

/// Coefficients (ascending powers) of a product of linear factors `t + c`.
fn product_of_shifts(shifts: impl IntoIterator<Item = u64>) -> Vec<BigUint> {
    let mut coeffs = vec![BigUint::one()];
    for c in shifts {
        let mut next = vec![BigUint::zero(); coeffs.len() + 1];
        for (i, a) in coeffs.iter().enumerate() {
            next[i + 1] += a;
            if c != 0 {
                next[i] += a * c;
            }
        }
        coeffs = next;
    }
    coeffs
}

/// `(t+1)(t+2)...(t+len-1)`, the factor contributed by a bridge block.
fn bridge_factor(len: usize) -> impl Iterator<Item = u64> {
    1..len as u64
}

/// `(t+1)(t+3)...(t+2len-1)`, the factor contributed by a walk block.
fn walk_factor(len: usize) -> impl Iterator<Item = u64> {
    (1..=len as u64).map(|i| 2 * i - 1)
}

/// Polynomial whose coefficients are the walk face-probability numbers:
/// one walk factor for the trailing block `n - sum(parts)` and one bridge
/// factor per part.
pub fn p_polynomial(n: usize, parts: &Composition) -> Result<Vec<BigUint>> {
    let walk = parts.remainder(n)?;
    let shifts = walk_factor(walk).chain(parts.parts().iter().flat_map(|&j| bridge_factor(j)));
    Ok(product_of_shifts(shifts))
}

/// Polynomial of bridge factors for every part plus the implicit last part
/// `n - sum(parts)`, which must be at least 1.
pub fn q_polynomial(n: usize, parts: &Composition) -> Result<Vec<BigUint>> {
    let last = parts.remainder(n)?;
    if last == 0 {
        return Err(Error::domain(format!(
            "composition {:?} leaves an empty final bridge block for n = {n}",
            parts.parts()
        )));
    }
    let shifts = parts
        .parts()
        .iter()
        .chain(std::iter::once(&last))
        .flat_map(|&j| bridge_factor(j));
    Ok(product_of_shifts(shifts))
}

/// Product polynomial for a family of walks and bridges of the given lengths.
pub fn joint_polynomial(walk_lengths: &[usize], bridge_lengths: &[usize]) -> Vec<BigUint> {
    let shifts = walk_lengths
        .iter()
        .flat_map(|&n| walk_factor(n))
        .chain(bridge_lengths.iter().flat_map(|&m| bridge_factor(m)));
    product_of_shifts(shifts)
}

fn coefficient(poly: &[BigUint], r: i64) -> BigUint {
    if r < 0 {
        return BigUint::zero();
    }
    poly.get(r as usize).cloned().unwrap_or_default()
}

/// Coefficient of `t^r` in [`p_polynomial`]; zero for `r < 0` or `r > n - k`.
pub fn coeff_p(n: usize, parts: &Composition, r: i64) -> Result<BigUint> {
    Ok(coefficient(&p_polynomial(n, parts)?, r))
}

/// Coefficient of `t^r` in [`q_polynomial`]; zero for `r < 0` or `r > n - k - 1`.
pub fn coeff_q(n: usize, parts: &Composition, r: i64) -> Result<BigUint> {
    Ok(coefficient(&q_polynomial(n, parts)?, r))
}

/// Every composition of `n` into exactly `parts` positive parts, in
/// lexicographic order.
pub fn compositions(n: usize, parts: usize) -> Vec<Vec<usize>> {
    fn rec(left: usize, slots: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if slots == 0 {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        if left < slots {
            return;
        }
        for first in 1..=left - (slots - 1) {
            cur.push(first);
            rec(left - first, slots - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, parts, &mut Vec::with_capacity(parts), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(tables: &StirlingTables, kind: StirlingKind, n: usize) -> Vec<u64> {
        tables
            .row(kind, n)
            .iter()
            .map(|v| u64::try_from(v).unwrap())
            .collect()
    }

    /// Cycle count of a permutation given as an image vector.
    fn cycles(perm: &[usize]) -> usize {
        let mut seen = vec![false; perm.len()];
        let mut count = 0;
        for start in 0..perm.len() {
            if !seen[start] {
                count += 1;
                let mut i = start;
                while !seen[i] {
                    seen[i] = true;
                    i = perm[i];
                }
            }
        }
        count
    }

    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in permutations(n - 1) {
            for pos in 0..=p.len() {
                let mut q = p.clone();
                q.insert(pos, n - 1);
                out.push(q);
            }
        }
        out
    }

    #[test]
    fn first_kind_counts_permutations_by_cycles() {
        let tables = StirlingTables::new(6);
        for n in 0..=6 {
            let mut counts = vec![0u64; n + 1];
            for p in permutations(n) {
                counts[cycles(&p)] += 1;
            }
            assert_eq!(row(&tables, StirlingKind::First, n), counts, "n = {n}");
        }
        assert_eq!(tables.first(4, 2), &BigUint::from(11u32));
    }

    #[test]
    fn first_b_row_three() {
        let tables = StirlingTables::new(3);
        assert_eq!(row(&tables, StirlingKind::FirstB, 3), vec![15, 23, 9, 1]);
    }

    #[test]
    fn second_b_row_two() {
        let tables = StirlingTables::new(2);
        assert_eq!(row(&tables, StirlingKind::SecondB, 2), vec![1, 4, 1]);
    }

    #[test]
    fn second_kind_diagonal_is_one() {
        let tables = StirlingTables::new(40);
        for n in 0..=40 {
            assert!(tables.second(n, n).is_one());
        }
    }

    #[test]
    fn out_of_range_reads_zero() {
        let tables = StirlingTables::new(5);
        for kind in StirlingKind::ALL {
            assert!(tables.entry(kind, 3, -1).is_zero());
            assert!(tables.entry(kind, 3, 4).is_zero());
            assert!(tables.entry(kind, -2, 0).is_zero());
            assert!(tables.entry(kind, 0, 0).is_one());
        }
    }

    #[test]
    fn negative_n_is_domain_error() {
        assert!(stirling(StirlingKind::First, -1, 0).is_err());
        assert!(binomial(-1, 0).is_err());
        let tables = StirlingTables::new(3);
        assert!(tables.stirling(StirlingKind::Second, 4, 1).is_err());
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(3, 1).unwrap(), BigUint::from(3u32));
        let wendel: BigUint = (0..3).map(|k| binomial(3, k).unwrap()).sum();
        assert_eq!(wendel, BigUint::from(7u32));
        assert_eq!(binomial(5, 2).unwrap(), BigUint::from(10u32));
        assert!(binomial(5, 6).unwrap().is_zero());
        assert!(binomial(5, -1).unwrap().is_zero());
    }

    #[test]
    fn coeff_p_examples() {
        let parts = Composition::new(vec![1]).unwrap();
        let poly = p_polynomial(3, &parts).unwrap();
        assert_eq!(poly, vec![3u32, 4, 1].into_iter().map(BigUint::from).collect::<Vec<_>>());
        assert_eq!(coeff_p(3, &parts, 0).unwrap(), BigUint::from(3u32));
        assert!(coeff_p(3, &parts, -1).unwrap().is_zero());
        assert!(coeff_p(3, &parts, 3).unwrap().is_zero());

        // n = k, all parts 1, empty walk block: the empty product.
        let ones = Composition::new(vec![1, 1, 1]).unwrap();
        assert_eq!(p_polynomial(3, &ones).unwrap(), vec![BigUint::one()]);
    }

    #[test]
    fn coeff_q_examples() {
        let parts = Composition::new(vec![1]).unwrap();
        assert_eq!(q_polynomial(2, &parts).unwrap(), vec![BigUint::one()]);
        let parts = Composition::new(vec![2]).unwrap();
        let q: Vec<u64> = (0..3)
            .map(|r| u64::try_from(coeff_q(4, &parts, r).unwrap()).unwrap())
            .collect();
        assert_eq!(q, vec![1, 2, 1]);
        assert!(coeff_q(4, &parts, 3).unwrap().is_zero());
    }

    #[test]
    fn invalid_compositions_rejected() {
        assert!(Composition::new(vec![1, 0]).is_err());
        let parts = Composition::new(vec![2, 2]).unwrap();
        assert!(coeff_p(3, &parts, 0).is_err());
        // Q needs a non-empty final block.
        assert!(coeff_q(4, &parts, 0).is_err());
        assert!(Composition::from_indices(&[2, 2]).is_err());
        assert!(Composition::from_indices(&[0]).is_err());
        assert_eq!(Composition::from_indices(&[1, 3, 4]).unwrap().parts(), &[1, 2, 1]);
    }

    #[test]
    fn polynomial_at_one_is_product_of_factor_values() {
        // Each (t + c) evaluates to 1 + c at t = 1.
        for n in 1..=7usize {
            for k in 0..=n {
                for parts in compositions_upto(n, k) {
                    let comp = Composition::new(parts.clone()).unwrap();
                    let poly = p_polynomial(n, &comp).unwrap();
                    let at_one: BigUint = poly.iter().sum();
                    let walk = n - comp.total();
                    let mut expected = BigUint::one();
                    for i in 1..=walk as u64 {
                        expected *= 2 * i;
                    }
                    for &j in &parts {
                        for c in 1..j as u64 {
                            expected *= c + 1;
                        }
                    }
                    assert_eq!(at_one, expected);
                }
            }
        }
    }

    fn compositions_upto(n: usize, k: usize) -> Vec<Vec<usize>> {
        (k..=n).flat_map(|total| compositions(total, k)).collect()
    }

    #[test]
    fn compositions_enumerate_correct_count() {
        // C(n-1, k-1) compositions of n into k parts.
        for n in 1..=9usize {
            for k in 1..=n {
                let expected = binomial(n as i64 - 1, k as i64 - 1).unwrap();
                assert_eq!(BigUint::from(compositions(n, k).len()), expected);
            }
        }
        assert_eq!(compositions(0, 0), vec![Vec::<usize>::new()]);
    }
}
