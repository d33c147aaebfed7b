//! Exact checks of the identities satisfied by `h_n`.
//!
//! Every range check streams the sequence through a sliding window, so the
//! memory held is a handful of big integers regardless of the range.

use std::collections::VecDeque;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{precondition, Error, Result};
use crate::sequence::{ptm, Fibs, Terms};

/// Window over a sequence defined from index `-2`.
struct Cursor<I: Iterator<Item = BigInt>> {
    source: I,
    next_index: i64,
    window: VecDeque<BigInt>,
    width: usize,
}

impl<I: Iterator<Item = BigInt>> Cursor<I> {
    fn new(source: I, width: usize) -> Self {
        Cursor { source, next_index: -2, window: VecDeque::with_capacity(width + 1), width }
    }

    /// Make `last` the newest index held.
    fn advance_to(&mut self, last: i64) {
        while self.next_index <= last {
            self.window.push_back(self.source.next().expect("infinite sequence"));
            if self.window.len() > self.width {
                self.window.pop_front();
            }
            self.next_index += 1;
        }
    }

    fn get(&self, index: i64) -> &BigInt {
        let newest = self.next_index - 1;
        let back = (newest - index) as usize;
        assert!(back < self.window.len(), "index {index} left the window");
        &self.window[self.window.len() - 1 - back]
    }
}

fn h_cursor(width: usize) -> Cursor<impl Iterator<Item = BigInt>> {
    Cursor::new(Terms::starting_at(-2).map(|t| t.value), width)
}

/// Fibonacci numbers with `f_{-2} = -1, f_{-1} = 1`.
fn fib_cursor(width: usize) -> Cursor<impl Iterator<Item = BigInt>> {
    Cursor::new([BigInt::from(-1), BigInt::one()].into_iter().chain(Fibs::new()), width)
}

fn signed(t: i8, v: &BigInt) -> BigInt {
    if t == 1 {
        v.clone()
    } else {
        -v
    }
}

/// Outcome of one identity over an index range.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub id: String,
    pub first: u64,
    pub last: u64,
    pub checked: u64,
    pub not_applicable: u64,
    /// Indices where the identity failed; empty on a passing run.
    pub failures: Vec<u64>,
}

impl IdentityReport {
    fn new(id: &str, first: u64, last: u64) -> Self {
        IdentityReport { id: id.to_string(), first, last, checked: 0, not_applicable: 0, failures: Vec::new() }
    }

    fn record(&mut self, n: u64, ok: bool) {
        self.checked += 1;
        if !ok {
            self.failures.push(n);
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// `h_{2n+1} = t_{2n+1} h_{2n-2}`.
pub fn check_odd_reduction(n: u64) -> Result<bool> {
    precondition(n >= 1, || "odd reduction needs n >= 1".into())?;
    Ok(odd_reduction_holds(n, &crate::h(2 * n as i64 + 1), &crate::h(2 * n as i64 - 2)))
}

fn odd_reduction_holds(n: u64, h_odd: &BigInt, h_back: &BigInt) -> bool {
    *h_odd == signed(ptm(2 * n + 1), h_back)
}

pub fn odd_reduction_range(max_n: u64) -> IdentityReport {
    let mut report = IdentityReport::new("odd-reduction", 1, max_n);
    let mut cursor = h_cursor(4);
    for n in 1..=max_n {
        let top = 2 * n as i64 + 1;
        cursor.advance_to(top);
        let ok = odd_reduction_holds(n, cursor.get(top), cursor.get(top - 3));
        report.record(n, ok);
    }
    report
}

/// `h_{4n} = t_n h_{4n-3}` when `t_n != t_{n-1}`; `None` otherwise.
pub fn check_4n_identity(n: u64) -> Result<Option<bool>> {
    precondition(n >= 1, || "the 4n identity needs n >= 1".into())?;
    if ptm(n) == ptm(n - 1) {
        return Ok(None);
    }
    Ok(Some(crate::h(4 * n as i64) == signed(ptm(n), &crate::h(4 * n as i64 - 3))))
}

pub fn four_n_range(max_n: u64) -> IdentityReport {
    let mut report = IdentityReport::new("4n-identity", 1, max_n);
    let mut cursor = h_cursor(4);
    for n in 1..=max_n {
        let top = 4 * n as i64;
        cursor.advance_to(top);
        if ptm(n) == ptm(n - 1) {
            report.not_applicable += 1;
            continue;
        }
        let ok = *cursor.get(top) == signed(ptm(n), cursor.get(top - 3));
        report.record(n, ok);
    }
    report
}

fn ratio(num: &BigInt, den: &BigInt) -> Result<BigRational> {
    if den.is_zero() {
        return Err(Error::InvariantViolation("zero divisor in the PTM-free recurrence".into()));
    }
    Ok(BigRational::new(num.clone(), den.clone()))
}

/// Each half of the PTM-free recurrence given the seven terms
/// `h_{n-2}, h_{n-1}, h_n` and `h_{2n-2}, ..., h_{2n+1}`.
fn ptm_free_halves(low: [&BigInt; 3], high: [&BigInt; 4]) -> Result<(bool, bool)> {
    let [a2, a1, a0] = low;
    let [b_2, b_1, b0, b1] = high;
    let diff = BigRational::from_integer(a0 - a2);
    let even = ratio(b_1, a1)? * &diff + BigRational::from_integer(b_2.clone());
    let odd = ratio(b0, a1)? * (-diff) + BigRational::from_integer(b_1.clone());
    Ok((even == BigRational::from_integer(b0.clone()), odd == BigRational::from_integer(b1.clone())))
}

/// Both PTM-free recurrences at `n`, in exact rational arithmetic.
pub fn check_ptm_free(n: u64) -> Result<bool> {
    precondition(n >= 5, || "the PTM-free recurrence is checked from n = 5".into())?;
    let n = n as i64;
    let (a, b) = ((n - 2..=n).map(crate::h).collect::<Vec<_>>(), (2 * n - 2..=2 * n + 1).map(crate::h).collect::<Vec<_>>());
    let (even, odd) = ptm_free_halves([&a[0], &a[1], &a[2]], [&b[0], &b[1], &b[2], &b[3]])?;
    Ok(even && odd)
}

/// Reports for the even half, the odd half and both together.
fn ptm_free_scan<I: Iterator<Item = BigInt>>(
    id: &str,
    min_n: u64,
    max_n: u64,
    mut low: Cursor<I>,
    mut high: Cursor<I>,
) -> Result<[IdentityReport; 3]> {
    let mut even_report = IdentityReport::new(&format!("{id}-even"), min_n, max_n);
    let mut odd_report = IdentityReport::new(&format!("{id}-odd"), min_n, max_n);
    let mut report = IdentityReport::new(id, min_n, max_n);
    for n in min_n..=max_n {
        let n_ = n as i64;
        low.advance_to(n_);
        high.advance_to(2 * n_ + 1);
        let (even, odd) = ptm_free_halves(
            [low.get(n_ - 2), low.get(n_ - 1), low.get(n_)],
            [high.get(2 * n_ - 2), high.get(2 * n_ - 1), high.get(2 * n_), high.get(2 * n_ + 1)],
        )?;
        even_report.record(n, even);
        odd_report.record(n, odd);
        report.record(n, even && odd);
    }
    Ok([report, even_report, odd_report])
}

pub fn ptm_free_range(max_n: u64) -> Result<IdentityReport> {
    let [report, ..] = ptm_free_scan("ptm-free", 5, max_n, h_cursor(3), h_cursor(4))?;
    Ok(report)
}

/// The two PTM-free recurrences with Fibonacci numbers in place of `h`, from
/// `n = 2`, as `[even, odd]`. The even half holds; the odd half carries the
/// sign of `t_{2n+1} = -t_n` and fails for every `n`.
pub fn ptm_free_fibonacci(max_n: u64) -> Result<[IdentityReport; 2]> {
    let [_, even, odd] = ptm_free_scan("ptm-free-fibonacci", 2, max_n, fib_cursor(3), fib_cursor(4))?;
    Ok([even, odd])
}

/// `F(p, q, r, s) = r^2 - q^2 + qs - pr`.
pub fn quartic(p: &BigInt, q: &BigInt, r: &BigInt, s: &BigInt) -> BigInt {
    r * r - q * q + q * s - p * r
}

/// `F(h_{2n-2}, h_{2n-1}, h_{2n}, h_{2n+1}) = 0`.
pub fn check_quartic(n: u64) -> Result<bool> {
    precondition(n >= 1, || "the quartic relation needs n >= 1".into())?;
    let v: Vec<BigInt> = (2 * n as i64 - 2..=2 * n as i64 + 1).map(crate::h).collect();
    Ok(quartic(&v[0], &v[1], &v[2], &v[3]).is_zero())
}

fn quartic_scan<I: Iterator<Item = BigInt>>(id: &str, max_n: u64, mut cursor: Cursor<I>) -> IdentityReport {
    let mut report = IdentityReport::new(id, 1, max_n);
    for n in 1..=max_n {
        let top = 2 * n as i64 + 1;
        cursor.advance_to(top);
        let ok = quartic(cursor.get(top - 3), cursor.get(top - 2), cursor.get(top - 1), cursor.get(top)).is_zero();
        report.record(n, ok);
    }
    report
}

pub fn quartic_range(max_n: u64) -> IdentityReport {
    quartic_scan("quartic", max_n, h_cursor(4))
}

/// `sum t_i h_{2i-1} = h_{2n}` and `sum t_i h_{2i} = 1 - h_{2n+1}` over `1..=n`.
pub fn check_summations(n: u64) -> Result<bool> {
    precondition(n >= 1, || "summations need n >= 1".into())?;
    let report = summations_range(n);
    Ok(report.failures.last() != Some(&n))
}

pub fn summations_range(max_n: u64) -> IdentityReport {
    let mut report = IdentityReport::new("summations", 1, max_n);
    let mut cursor = h_cursor(2);
    let (mut odd_sum, mut even_sum) = (BigInt::zero(), BigInt::zero());
    for n in 1..=max_n {
        let n_ = n as i64;
        cursor.advance_to(2 * n_ - 1);
        odd_sum += signed(ptm(n), cursor.get(2 * n_ - 1));
        cursor.advance_to(2 * n_);
        even_sum += signed(ptm(n), cursor.get(2 * n_));
        let ok_odd = odd_sum == *cursor.get(2 * n_);
        cursor.advance_to(2 * n_ + 1);
        let ok_even = even_sum == BigInt::one() - cursor.get(2 * n_ + 1);
        report.record(n, ok_odd && ok_even);
    }
    report
}

/// Block-diagonal 4x4 matrix `diag([[a1, a2], [a3, a4]], [[a5, a6], [a7, a8]])`
/// mapping `(r_{-1}, r_{-2}, r'_{-1}, r'_{-2})` to
/// `(r_{2^n-1}, r_{2^n-2}, r'_{2^n-1}, r'_{2^n-2})`, where `r` follows the PTM
/// recurrence and `r'` the one with `-t_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix4 {
    /// `a_{n,1} ..= a_{n,8}`.
    pub entries: [BigInt; 8],
}

impl Matrix4 {
    pub fn initial() -> Self {
        let e = [1, 1, 1, 0, -1, 1, 1, 0].map(BigInt::from);
        Matrix4 { entries: e }
    }

    /// `a_{n,i}` with the 1-based index used in the block layout.
    pub fn a(&self, i: usize) -> &BigInt {
        &self.entries[i - 1]
    }

    /// `a_{n+1}`: the block-swapped matrix times `a_n`, so the upper block
    /// becomes `lower * upper` and the lower block `upper * lower`.
    pub fn next(&self) -> Self {
        let [a1, a2, a3, a4, a5, a6, a7, a8] = &self.entries;
        Matrix4 {
            entries: [
                a1 * a5 + a3 * a6,
                a2 * a5 + a4 * a6,
                a1 * a7 + a3 * a8,
                a2 * a7 + a4 * a8,
                a1 * a5 + a2 * a7,
                a1 * a6 + a2 * a8,
                a3 * a5 + a4 * a7,
                a3 * a6 + a4 * a8,
            ],
        }
    }

    /// Dense 4x4 layout.
    pub fn to_dense(&self) -> [[BigInt; 4]; 4] {
        let e = &self.entries;
        let z = BigInt::zero;
        [
            [e[0].clone(), e[1].clone(), z(), z()],
            [e[2].clone(), e[3].clone(), z(), z()],
            [z(), z(), e[4].clone(), e[5].clone()],
            [z(), z(), e[6].clone(), e[7].clone()],
        ]
    }

    /// `(h_{2^n-1}, h_{2^n-2})` from `(h_{-1}, h_{-2}) = (1, -1)`.
    pub fn h_pair(&self) -> (BigInt, BigInt) {
        (self.a(1) - self.a(2), self.a(3) - self.a(4))
    }

    /// `a_5 = a_1, a_8 = a_4, a_6 = -a_2, a_3 = (-1)^n a_2, a_7 = (-1)^{n+1} a_2`.
    pub fn relations_hold(&self, n: u32) -> bool {
        let s = if n.is_multiple_of(2) { BigInt::one() } else { -BigInt::one() };
        self.a(5) == self.a(1)
            && self.a(8) == self.a(4)
            && *self.a(6) == -self.a(2)
            && *self.a(3) == &s * self.a(2)
            && *self.a(7) == -&s * self.a(2)
    }
}

/// `a_n` by iteration.
pub fn matrix_a(n: u32) -> Result<Matrix4> {
    precondition(n <= 32, || format!("matrix index {n} exceeds 32"))?;
    Ok((0..n).fold(Matrix4::initial(), |a, _| a.next()))
}

/// Relations of `a_n` for `1 <= n <= max_n`, the simplified recurrences for
/// `a_{n+1,1}, a_{n+1,2}, a_{n+1,4}`, and agreement with directly computed
/// `h_{2^n-1}, h_{2^n-2}` while `2^n <= 2^16`.
pub fn matrix_relations_range(max_n: u32) -> Result<IdentityReport> {
    precondition(max_n <= 32, || format!("matrix index {max_n} exceeds 32"))?;
    let mut report = IdentityReport::new("matrix-relations", 1, max_n as u64);
    let direct_limit = max_n.min(16);
    let mut cursor = h_cursor(2);
    let mut a = Matrix4::initial();
    for n in 1..=max_n {
        let next = a.next();
        let mut ok = next.relations_hold(n);
        if n >= 2 {
            // simplified recurrences from the relations at n - 1 >= 1
            let k = n - 1;
            let s = if (k + 1) % 2 == 0 { BigInt::one() } else { -BigInt::one() };
            let sq2 = a.a(2) * a.a(2);
            ok &= *next.a(1) == a.a(1) * a.a(1) + &s * &sq2;
            ok &= *next.a(2) == a.a(2) * (a.a(1) - a.a(4));
            ok &= *next.a(4) == a.a(4) * a.a(4) + &s * &sq2;
        }
        if n <= direct_limit {
            let top = (1i64 << n) - 1;
            cursor.advance_to(top);
            ok &= next.h_pair() == (cursor.get(top).clone(), cursor.get(top - 1).clone());
        }
        report.record(n as u64, ok);
        a = next;
    }
    Ok(report)
}

/// `h_{2^{2k+1}-1}^2 + h_{2^{2k+1}+1}^2 = h_{2^{2k+1}-2}^2 + h_{2^{2k+1}-1}^2 = h_{2^{2k+2}-3}`.
pub fn check_sum_of_squares(k: u32) -> Result<bool> {
    precondition(k <= 10, || format!("k = {k} exceeds 10"))?;
    let m = 1i64 << (2 * k + 1);
    let top = 2 * m - 3;
    let mut cursor = h_cursor(4);
    cursor.advance_to(m + 1);
    let (lo2, lo1, hi1) = (cursor.get(m - 2).clone(), cursor.get(m - 1).clone(), cursor.get(m + 1).clone());
    cursor.advance_to(top);
    let target = cursor.get(top);
    let left = &lo1 * &lo1 + &hi1 * &hi1;
    let middle = &lo2 * &lo2 + &lo1 * &lo1;
    Ok(left == middle && middle == *target)
}

pub fn sum_of_squares_range(max_k: u32) -> Result<IdentityReport> {
    let mut report = IdentityReport::new("sum-of-squares", 0, max_k as u64);
    for k in 0..=max_k {
        report.record(k as u64, check_sum_of_squares(k)?);
    }
    Ok(report)
}

/// Index bounds for [`verify_all`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityBounds {
    pub odd_reduction: u64,
    pub four_n: u64,
    pub ptm_free: u64,
    pub quartic: u64,
    pub summations: u64,
    pub matrix: u32,
    pub sum_of_squares: u32,
}

impl Default for IdentityBounds {
    fn default() -> Self {
        IdentityBounds {
            odd_reduction: 50_000,
            four_n: 25_000,
            ptm_free: 10_000,
            quartic: 50_000,
            summations: 10_000,
            matrix: 20,
            sum_of_squares: 6,
        }
    }
}

/// Every identity over its range, in a fixed order. Independent checks run in
/// parallel on the current rayon pool.
pub fn verify_all(bounds: &IdentityBounds) -> Result<Vec<IdentityReport>> {
    type Job<'a> = Box<dyn Fn() -> Result<IdentityReport> + Send + Sync + 'a>;
    let jobs: Vec<Job> = vec![
        Box::new(|| Ok(odd_reduction_range(bounds.odd_reduction))),
        Box::new(|| Ok(four_n_range(bounds.four_n))),
        Box::new(|| ptm_free_range(bounds.ptm_free)),
        Box::new(|| Ok(quartic_range(bounds.quartic))),
        Box::new(|| Ok(summations_range(bounds.summations))),
        Box::new(|| matrix_relations_range(bounds.matrix)),
        Box::new(|| sum_of_squares_range(bounds.sum_of_squares)),
    ];
    use rayon::prelude::*;
    jobs.par_iter().map(|job| job()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::h;

    #[test]
    fn small_cases() {
        assert!(check_odd_reduction(1).unwrap());
        assert!(check_odd_reduction(4).unwrap());
        assert_eq!(h(19), BigInt::from(5));
        assert_eq!(h(16), BigInt::from(-5));
        assert!(check_odd_reduction(9).unwrap());
        assert_eq!(check_4n_identity(1).unwrap(), Some(true));
        assert_eq!(check_4n_identity(3).unwrap(), Some(true));
        assert_eq!(check_4n_identity(2).unwrap(), None);
        assert_eq!(check_4n_identity(5).unwrap(), Some(true));
        assert!(check_ptm_free(5).unwrap());
        assert!(check_ptm_free(6).unwrap());
        assert!(check_ptm_free(4).is_err());
        assert!(check_quartic(1).unwrap());
        assert!(check_quartic(3).unwrap());
        assert!(check_quartic(8).unwrap());
        assert!(check_summations(1).unwrap());
        assert!(check_summations(2).unwrap());
        assert!(check_summations(50).unwrap());
    }

    #[test]
    fn quartic_value_at_three() {
        let f = quartic(&BigInt::from(-1), &BigInt::from(-1), &BigInt::from(-2), &BigInt::from(1));
        assert!(f.is_zero());
    }

    #[test]
    fn ranges_pass() {
        assert!(odd_reduction_range(2_000).passed());
        assert!(four_n_range(1_000).passed());
        assert!(ptm_free_range(500).unwrap().passed());
        assert!(quartic_range(2_000).passed());
        assert!(summations_range(500).passed());
    }

    #[test]
    fn four_n_counts_guard() {
        let r = four_n_range(8);
        // t_0..t_8 = 1, -1, -1, 1, -1, 1, 1, -1, -1
        assert_eq!(r.checked + r.not_applicable, 8);
        assert_eq!(r.not_applicable, 3);
    }

    #[test]
    fn shifted_summation_fails() {
        // reading the right side as 1 - h_{2n-1} breaks already at n = 2
        let lhs = -h(2) - h(4);
        assert_ne!(lhs, BigInt::one() - h(3));
        assert_eq!(lhs, BigInt::one() - h(5));
    }

    #[test]
    fn matrix_values() {
        let a0 = matrix_a(0).unwrap();
        assert_eq!(a0.entries[..4], [1, 1, 1, 0].map(BigInt::from));
        let a1 = matrix_a(1).unwrap();
        assert_eq!(a1.entries, [0, -1, 1, 1, 0, 1, -1, 1].map(BigInt::from));
        assert_eq!(a1.a(5), a1.a(1));
        let a3 = matrix_a(3).unwrap();
        assert_eq!(a3.a(1) - a3.a(2), h(7));
        assert_eq!(a3.a(1) - a3.a(2), BigInt::one());
        assert!(matrix_a(33).is_err());
        assert!(matrix_relations_range(20).unwrap().passed());
    }

    #[test]
    fn conjugating_inside_blocks_breaks_relations() {
        let j = [[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]].map(|r| r.map(BigInt::from));
        let mul = |x: &[[BigInt; 4]; 4], y: &[[BigInt; 4]; 4]| -> [[BigInt; 4]; 4] {
            std::array::from_fn(|i| std::array::from_fn(|k| (0..4).map(|l| &x[i][l] * &y[l][k]).sum()))
        };
        let a0 = Matrix4::initial().to_dense();
        let a1 = mul(&mul(&mul(&j, &a0), &j), &a0);
        let e = [&a1[0][0], &a1[0][1], &a1[1][0], &a1[1][1]];
        let (h1, h2) = (e[0] - e[1], e[2] - e[3]);
        assert_ne!((h1, h2), (h(1), h(0)));
        assert_eq!(Matrix4::initial().next().h_pair(), (h(1), h(0)));
    }

    #[test]
    fn fibonacci_halves() {
        let [even, odd] = ptm_free_fibonacci(300).unwrap();
        assert!(even.passed());
        assert_eq!(even.checked, 299);
        assert_eq!(odd.failures.len(), 299);
    }

    #[test]
    fn sums_of_squares() {
        for k in 0..=3 {
            assert!(check_sum_of_squares(k).unwrap(), "k = {k}");
        }
        assert_eq!(h(7) * h(7) + h(9) * h(9), h(13));
        assert!(check_sum_of_squares(11).is_err());
    }

    #[test]
    fn verify_all_small() {
        let bounds = IdentityBounds {
            odd_reduction: 100,
            four_n: 100,
            ptm_free: 100,
            quartic: 100,
            summations: 100,
            matrix: 10,
            sum_of_squares: 2,
        };
        let reports = verify_all(&bounds).unwrap();
        assert_eq!(reports.len(), 7);
        assert!(reports.iter().all(IdentityReport::passed));
    }
}
