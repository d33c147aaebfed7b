//! The Prouhet-Thue-Morse sequence `t_n`, the twisted Fibonacci sequence
//! `h_n = t_n h_{n-1} + h_{n-2}` and scans over its terms.
//!
//! Terms are exact [`BigInt`]s. The backward extension `h_{-2} = -1`,
//! `h_{-1} = 1` is part of the domain: with it the recurrence already holds at
//! `n = 0` and `n = 1`, so every generator here starts from that pair.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;
use std::sync::RwLock;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{precondition, Error, Result};

/// `t_n = (-1)^{s_2(n)}`.
#[inline]
pub fn ptm(n: u64) -> i8 {
    if n.count_ones().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// [`ptm`] for indices wider than 64 bits.
#[inline]
pub fn ptm_wide(n: u128) -> i8 {
    if n.count_ones().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Sign of an integer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn of(v: &BigInt) -> Sign {
        if v.is_zero() {
            Sign::Zero
        } else if v.is_positive() {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }

    pub fn from_i8(v: i8) -> Sign {
        match v.signum() {
            -1 => Sign::Negative,
            0 => Sign::Zero,
            _ => Sign::Positive,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Negative => -1,
            Sign::Zero => 0,
            Sign::Positive => 1,
        }
    }
}

/// One term `h_index`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub index: i64,
    pub value: BigInt,
}

/// Streaming generator of `h_n`. Holds two big integers at a time.
#[derive(Clone, Debug)]
pub struct Terms {
    index: i64,
    // (h_{index-2}, h_{index-1}); only meaningful once index >= 0
    prev2: BigInt,
    prev1: BigInt,
}

impl Terms {
    /// Generator whose first item is `h_0`.
    pub fn new() -> Self {
        Terms { index: 0, prev2: BigInt::from(-1), prev1: BigInt::one() }
    }

    /// Generator whose first item is `h_start`; `start >= -2`.
    pub fn starting_at(start: i64) -> Self {
        assert!(start >= -2, "h is defined from index -2");
        let mut terms = Terms::new();
        if start < 0 {
            terms.index = start;
            return terms;
        }
        for _ in 0..start {
            terms.advance();
        }
        terms
    }

    /// Index of the next term to be produced.
    pub fn next_index(&self) -> i64 {
        self.index
    }

    fn advance(&mut self) -> BigInt {
        let n = self.index as u64;
        let mut value = if ptm(n) == 1 { self.prev1.clone() } else { -&self.prev1 };
        value += &self.prev2;
        let old = std::mem::replace(&mut self.prev1, value.clone());
        self.prev2 = old;
        self.index += 1;
        value
    }
}

impl Default for Terms {
    fn default() -> Self {
        Terms::new()
    }
}

impl Iterator for Terms {
    type Item = Term;

    fn next(&mut self) -> Option<Term> {
        let index = self.index;
        let value = match index {
            -2 => {
                self.index += 1;
                BigInt::from(-1)
            }
            -1 => {
                self.index += 1;
                BigInt::one()
            }
            _ => self.advance(),
        };
        Some(Term { index, value })
    }
}

/// Exact value of `h_n` for `n >= -2`.
pub fn h(n: i64) -> BigInt {
    assert!(n >= -2, "h is defined from index -2");
    Terms::starting_at(n).next().expect("infinite generator").value
}

/// Fibonacci numbers `f_0 = 0, f_1 = 1, ...`.
#[derive(Clone, Debug)]
pub struct Fibs {
    a: BigInt,
    b: BigInt,
}

impl Fibs {
    pub fn new() -> Self {
        Fibs { a: BigInt::zero(), b: BigInt::one() }
    }
}

impl Default for Fibs {
    fn default() -> Self {
        Fibs::new()
    }
}

impl Iterator for Fibs {
    type Item = BigInt;

    fn next(&mut self) -> Option<BigInt> {
        let next = &self.a + &self.b;
        let out = std::mem::replace(&mut self.a, std::mem::replace(&mut self.b, next));
        Some(out)
    }
}

pub fn fib(n: u64) -> BigInt {
    Fibs::new().nth(n as usize).expect("infinite generator")
}

/// Dense table `h_{-2} ..= h_max`.
#[derive(Clone, Debug)]
pub struct TermTable {
    values: Vec<BigInt>,
}

impl TermTable {
    pub fn up_to(max: u64) -> Self {
        let values = Terms::starting_at(-2).take(max as usize + 3).map(|t| t.value).collect();
        TermTable { values }
    }

    pub fn max_index(&self) -> u64 {
        (self.values.len() - 3) as u64
    }

    /// `h_n`; panics outside `-2 ..= max_index()`.
    pub fn get(&self, n: i64) -> &BigInt {
        &self.values[(n + 2) as usize]
    }

    /// Terms `h_0 ..= h_max`.
    pub fn nonnegative(&self) -> &[BigInt] {
        &self.values[2..]
    }
}

/// Opt-in shared memo of terms. Lookups extend the table under a write lock;
/// returned values never depend on call order.
#[derive(Debug, Default)]
pub struct TermCache {
    inner: RwLock<CacheInner>,
}

#[derive(Debug, Default)]
struct CacheInner {
    values: Vec<BigInt>,
    terms: Terms,
}

impl TermCache {
    pub fn new() -> Self {
        TermCache::default()
    }

    pub fn get(&self, n: u64) -> BigInt {
        let idx = n as usize;
        if let Some(v) = self.inner.read().expect("term cache poisoned").values.get(idx) {
            return v.clone();
        }
        let mut inner = self.inner.write().expect("term cache poisoned");
        while inner.values.len() <= idx {
            let next = inner.terms.next().expect("infinite generator").value;
            inner.values.push(next);
        }
        inner.values[idx].clone()
    }

    pub fn len(&self) -> usize {
        self.inner.read().expect("term cache poisoned").values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Consecutive terms `h_start, h_{start+1}, ...`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SequenceWindow {
    pub start: i64,
    pub terms: Vec<Term>,
}

impl SequenceWindow {
    /// Terms with indices in `start ..= end`.
    pub fn new(start: i64, end: i64) -> Result<Self> {
        precondition(start >= -2, || format!("window start {start} is below -2"))?;
        precondition(end >= start, || format!("window end {end} precedes start {start}"))?;
        let terms = Terms::starting_at(start).take((end - start + 1) as usize).collect();
        Ok(SequenceWindow { start, terms })
    }

    /// Every term from index 0 on obeys the recurrence relative to its two
    /// predecessors inside the window.
    pub fn is_consistent(&self) -> bool {
        self.terms.windows(3).all(|w| {
            let n = w[2].index;
            if n < 0 {
                return true;
            }
            let expected = BigInt::from(ptm(n as u64)) * &w[1].value + &w[0].value;
            w[2].value == expected && w[1].index + 1 == n && w[0].index + 2 == n
        })
    }
}

/// `u_n = sign(h_n)` from its closed form: `u_0 = u_3 = 0`, `u_{2n} = -1`
/// for `n != 0` and `u_{2n+1} = t_n` for `n != 1`.
pub fn sign_closed(n: u64) -> Sign {
    match n {
        0 | 3 => Sign::Zero,
        _ if n.is_multiple_of(2) => Sign::Negative,
        _ => Sign::from_i8(ptm(n / 2)),
    }
}

/// `sum_{i=0}^{n} h_i`.
pub fn partial_sum(n: u64) -> BigInt {
    Terms::new().take(n as usize + 1).fold(BigInt::zero(), |acc, t| acc + t.value)
}

/// Running partial sums `S_0, S_1, ...`.
pub fn partial_sums() -> impl Iterator<Item = (u64, BigInt)> {
    Terms::new().scan(BigInt::zero(), |acc, t| {
        *acc += &t.value;
        Some((t.index as u64, acc.clone()))
    })
}

/// The fixed vocabulary of run predicates over consecutive terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RunKind {
    /// `h_{n+i} < 0` for `i = 0..5`.
    NegRun5,
    /// `h_{n+i} < 0` for `i = 0..6`.
    NegRun6,
    /// `h_{n+i} > 0` for `i = 0..3`.
    PosRun3,
    /// `h_n < h_{n+1} < h_{n+2}`.
    IncRun3,
    /// `h_n < ... < h_{n+3}`.
    IncRun4,
    /// `h_n > ... > h_{n+3}`.
    DecRun4,
    /// `h_n > ... > h_{n+4}`.
    DecRun5,
}

impl RunKind {
    pub const ALL: [RunKind; 7] = [
        RunKind::NegRun5,
        RunKind::NegRun6,
        RunKind::PosRun3,
        RunKind::IncRun3,
        RunKind::IncRun4,
        RunKind::DecRun4,
        RunKind::DecRun5,
    ];

    pub fn window_len(self) -> usize {
        match self {
            RunKind::NegRun5 | RunKind::DecRun5 => 5,
            RunKind::NegRun6 => 6,
            RunKind::PosRun3 | RunKind::IncRun3 => 3,
            RunKind::IncRun4 | RunKind::DecRun4 => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            RunKind::NegRun5 => "neg-run-5",
            RunKind::NegRun6 => "neg-run-6",
            RunKind::PosRun3 => "pos-run-3",
            RunKind::IncRun3 => "inc-run-3",
            RunKind::IncRun4 => "inc-run-4",
            RunKind::DecRun4 => "dec-run-4",
            RunKind::DecRun5 => "dec-run-5",
        }
    }

    /// Whether the predicate holds on `window`, which has exactly `self.window_len()` terms.
    pub fn holds<'a, I>(self, window: I) -> bool
    where
        I: IntoIterator<Item = &'a BigInt>,
        I::IntoIter: Clone,
    {
        let it = window.into_iter();
        let pairs = || it.clone().zip(it.clone().skip(1));
        match self {
            RunKind::NegRun5 | RunKind::NegRun6 => it.clone().all(|v| v.is_negative()),
            RunKind::PosRun3 => it.clone().all(|v| v.is_positive()),
            RunKind::IncRun3 | RunKind::IncRun4 => pairs().all(|(a, b)| a < b),
            RunKind::DecRun4 | RunKind::DecRun5 => pairs().all(|(a, b)| a > b),
        }
    }
}

impl fmt::Display for RunKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RunKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        RunKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Precondition(format!("unknown run kind `{s}`")))
    }
}

/// All starting indices `n <= max_n` at which `kind` holds.
pub fn run_scan(max_n: u64, kind: RunKind) -> Result<Vec<u64>> {
    precondition(max_n >= 10, || format!("run scan bound {max_n} is below 10"))?;
    let len = kind.window_len();
    let mut window: VecDeque<BigInt> = VecDeque::with_capacity(len);
    let mut hits = Vec::new();
    for term in Terms::new() {
        if window.len() == len {
            window.pop_front();
        }
        window.push_back(term.value);
        if window.len() < len {
            continue;
        }
        let start = term.index as u64 + 1 - len as u64;
        if start > max_n {
            break;
        }
        if kind.holds(window.iter()) {
            hits.push(start);
        }
    }
    Ok(hits)
}

/// Starting indices `n <= max_n` with `t_n = t_{n+1} = t_{n+2}`.
pub fn ptm_triples(max_n: u64) -> Vec<u64> {
    (0..=max_n).filter(|&n| ptm(n) == ptm(n + 1) && ptm(n + 1) == ptm(n + 2)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIRST_TWENTY: [i64; 20] =
        [0, 1, -1, 0, -1, -1, -2, 1, -3, -2, -5, 3, -2, 5, -7, -2, -5, -7, -12, 5];

    #[test]
    fn ptm_values() {
        assert_eq!(ptm(0), 1);
        assert_eq!(ptm(1), -1);
        assert_eq!(ptm(3), 1);
        for n in 0..4096u64 {
            assert_eq!(ptm(2 * n), ptm(n));
            assert_eq!(ptm(2 * n + 1), -ptm(n));
        }
    }

    #[test]
    fn first_twenty_terms() {
        let got: Vec<BigInt> = Terms::new().take(20).map(|t| t.value).collect();
        let want: Vec<BigInt> = FIRST_TWENTY.iter().map(|&v| BigInt::from(v)).collect();
        assert_eq!(got, want);
        assert_eq!(h(6), BigInt::from(-2));
        assert_eq!(h(18), BigInt::from(-12));
        assert_eq!(h(0), BigInt::zero());
    }

    #[test]
    fn negative_indices() {
        assert_eq!(h(-2), BigInt::from(-1));
        assert_eq!(h(-1), BigInt::one());
        let w = SequenceWindow::new(-2, 30).unwrap();
        assert_eq!(w.terms.len(), 33);
        assert!(w.is_consistent());
        assert!(SequenceWindow::new(-3, 4).is_err());
    }

    #[test]
    fn closed_sign_examples() {
        assert_eq!(sign_closed(3), Sign::Zero);
        assert_eq!(sign_closed(5), Sign::Negative);
        assert_eq!(sign_closed(7), Sign::Positive);
        assert_eq!(h(7), BigInt::one());
    }

    #[test]
    fn fibonacci() {
        assert_eq!(fib(0), BigInt::zero());
        assert_eq!(fib(2), BigInt::one());
        // frozen from the plain recurrence
        assert_eq!(fib(10), BigInt::from(55));
        assert_eq!(fib(90), "2880067194370816120".parse::<BigInt>().unwrap());
    }

    #[test]
    fn partial_sum_examples() {
        assert_eq!(partial_sum(7), BigInt::from(-3));
        assert_eq!(partial_sum(1), BigInt::one());
        assert_eq!(partial_sum(3), BigInt::zero());
        let streamed: Vec<_> = partial_sums().take(40).map(|(_, s)| s).collect();
        for (n, s) in streamed.iter().enumerate() {
            assert_eq!(*s, partial_sum(n as u64));
        }
    }

    #[test]
    fn table_and_cache_agree_with_stream() {
        let table = TermTable::up_to(200);
        let cache = TermCache::new();
        assert_eq!(cache.get(150), *table.get(150));
        assert_eq!(cache.get(3), *table.get(3));
        assert_eq!(cache.get(151), *table.get(151));
        for t in Terms::starting_at(-2).take(203) {
            assert_eq!(*table.get(t.index), t.value);
        }
        assert_eq!(table.nonnegative().len(), 201);
    }

    #[test]
    fn run_kinds_parse() {
        for k in RunKind::ALL {
            assert_eq!(k.name().parse::<RunKind>().unwrap(), k);
        }
        assert!("neg-run-7".parse::<RunKind>().is_err());
        assert!(run_scan(5, RunKind::IncRun3).is_err());
    }

    #[test]
    fn small_run_scans() {
        assert!(run_scan(10_000, RunKind::IncRun4).unwrap().is_empty());
        assert!(run_scan(10_000, RunKind::DecRun5).unwrap().is_empty());
        assert!(run_scan(10_000, RunKind::NegRun6).unwrap().is_empty());
        assert!(run_scan(10_000, RunKind::PosRun3).unwrap().is_empty());
        assert!(!run_scan(10_000, RunKind::DecRun4).unwrap().is_empty());
        assert!(!run_scan(10_000, RunKind::NegRun5).unwrap().is_empty());
        assert!(!run_scan(10_000, RunKind::IncRun3).unwrap().is_empty());
        assert!(ptm_triples(10_000).is_empty());
    }
}
