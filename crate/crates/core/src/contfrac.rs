//! Continued fractions of `h_n / h_{n-1}` for `n >= 5`.
//!
//! Two expansions are available: the non-regular one whose partial quotients
//! are the PTM values `t_n, t_{n-1}, ..., t_5`, and the regular Euclidean
//! expansion of `|h_n| / |h_{n-1}|`. All arithmetic is on exact integers.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{precondition, Error, Result};
use crate::sequence::{ptm, Sign, TermTable};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CfKind {
    Regular,
    PtmNonregular,
}

/// `[leading; quotients...]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContinuedFraction {
    pub leading: i64,
    pub quotients: Vec<i64>,
    pub kind: CfKind,
}

impl ContinuedFraction {
    /// Exact value. A zero intermediate denominator is an invariant violation.
    pub fn evaluate(&self) -> Result<BigRational> {
        let digits: Vec<i64> = std::iter::once(self.leading).chain(self.quotients.iter().copied()).collect();
        let (last, rest) = digits.split_last().expect("at least the leading digit");
        let mut num = BigInt::from(*last);
        let mut den = BigInt::from(1);
        for &a in rest.iter().rev() {
            if num.is_zero() {
                return Err(Error::InvariantViolation("continued fraction has a zero denominator".into()));
            }
            // a + den / num
            let next = match a {
                1 => &num + &den,
                -1 => &den - &num,
                _ => &num * a + &den,
            };
            den = std::mem::replace(&mut num, next);
        }
        if den.is_zero() {
            return Err(Error::InvariantViolation("continued fraction has a zero denominator".into()));
        }
        Ok(BigRational::new(num, den))
    }
}

impl fmt::Display for ContinuedFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}", self.leading)?;
        for (i, q) in self.quotients.iter().enumerate() {
            write!(f, "{}{q}", if i == 0 { "; " } else { ", " })?;
        }
        write!(f, "]")
    }
}

/// `[t_n; t_{n-1}, ..., t_5]`.
pub fn nonregular_cf(n: u64) -> Result<ContinuedFraction> {
    precondition(n >= 5, || format!("continued fractions start at n = 5, got {n}"))?;
    Ok(ContinuedFraction {
        leading: ptm(n) as i64,
        quotients: (5..n).rev().map(|j| ptm(j) as i64).collect(),
        kind: CfKind::PtmNonregular,
    })
}

/// Regular expansion of `a / b` by the plain Euclidean algorithm, `a >= 0, b > 0`.
/// Quotients are found by repeated subtraction while small.
pub fn euclid(a: &BigInt, b: &BigInt) -> Result<ContinuedFraction> {
    precondition(!a.is_negative() && b.is_positive(), || "euclid needs a >= 0 and b > 0".into())?;
    let (mut a, mut b) = (a.clone(), b.clone());
    let mut digits = Vec::new();
    while !b.is_zero() {
        let mut q = 0i64;
        while q < 8 && a >= b {
            a -= &b;
            q += 1;
        }
        if a >= b {
            let (big_q, r) = a.div_rem(&b);
            let extra = big_q
                .to_i64()
                .ok_or_else(|| Error::Precondition("partial quotient does not fit in 64 bits".into()))?;
            q += extra;
            a = r;
        }
        digits.push(q);
        std::mem::swap(&mut a, &mut b);
    }
    Ok(ContinuedFraction { leading: digits[0], quotients: digits[1..].to_vec(), kind: CfKind::Regular })
}

/// Regular expansion of `|h_n| / |h_{n-1}|`.
pub fn regular_cf(n: u64) -> Result<ContinuedFraction> {
    precondition(n >= 5, || format!("continued fractions start at n = 5, got {n}"))?;
    euclid(&crate::h(n as i64).abs(), &crate::h(n as i64 - 1).abs())
}

/// `a(n) = floor(|h_n| / |h_{n-1}|)` for `5 <= n <= max_n`.
pub fn leading_digit_sequence(max_n: u64) -> Result<Vec<u8>> {
    precondition(max_n >= 5, || format!("max_n must be at least 5, got {max_n}"))?;
    let table = TermTable::up_to(max_n);
    Ok((5..=max_n as i64)
        .map(|n| {
            let q = table.get(n).abs() / table.get(n - 1).abs();
            q.to_u8().expect("leading digit is small")
        })
        .collect())
}

/// The seven sign patterns splitting the range of `a(n)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CfCase(pub u8);

impl CfCase {
    /// Allowed values of `a(n)`.
    pub fn range(self) -> &'static [i64] {
        match self.0 {
            1..=3 => &[0, 1, 2],
            4 => &[0],
            5 | 6 => &[1, 2, 3, 4],
            7 => &[1, 2],
            _ => unreachable!("case ids run from 1 to 7"),
        }
    }
}

/// Case from the signs of `h_n, h_{n-1}, h_{n-2}` and `t_n`; `None` when a
/// sign is zero or no pattern applies.
pub fn classify_signs(hn: Sign, hn1: Sign, hn2: Sign, tn: i8) -> Option<CfCase> {
    use Sign::{Negative as N, Positive as P};
    let id = match (hn, hn1, hn2, tn) {
        (N, P, _, 1) => 1,
        (N, N, P, _) => 2,
        (N, N, N, -1) => 3,
        (P, _, N, _) => 4,
        (N, P, _, -1) => 5,
        (N, N, N, 1) => 6,
        (P, _, P, _) => 7,
        _ => return None,
    };
    Some(CfCase(id))
}

pub fn case_classify(n: u64) -> Result<Option<CfCase>> {
    precondition(n >= 5, || format!("continued fractions start at n = 5, got {n}"))?;
    let n_ = n as i64;
    Ok(classify_signs(Sign::of(&crate::h(n_)), Sign::of(&crate::h(n_ - 1)), Sign::of(&crate::h(n_ - 2)), ptm(n)))
}

/// One line of [`scan`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CfRow {
    pub n: u64,
    pub regular: ContinuedFraction,
    pub case: Option<u8>,
}

/// Outcome of checking every `n` in `5..=max_n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CfScan {
    pub max_n: u64,
    pub convention: String,
    pub rows: Vec<CfRow>,
    /// Non-regular expansion does not evaluate to `h_n / h_{n-1}`.
    pub nonregular_failures: Vec<u64>,
    /// Regular expansion does not evaluate to `|h_n| / |h_{n-1}|`.
    pub regular_failures: Vec<u64>,
    /// `a(n) > 4` or a partial quotient outside `{1, 2, 3}`.
    pub digit_failures: Vec<u64>,
    /// `a(n)` outside the range of its case.
    pub case_failures: Vec<u64>,
    /// No case applies (a zero among the three signs).
    pub unclassified: Vec<u64>,
}

impl CfScan {
    pub fn passed(&self) -> bool {
        self.nonregular_failures.is_empty()
            && self.regular_failures.is_empty()
            && self.digit_failures.is_empty()
            && self.case_failures.is_empty()
    }
}

/// Name of the regular-expansion convention in use.
pub const CONVENTION: &str = "plain-euclid";

struct RowCheck {
    row: CfRow,
    nonregular_ok: bool,
    regular_ok: bool,
    digits_ok: bool,
    case_ok: Option<bool>,
}

fn check_row(table: &TermTable, n: u64) -> Result<RowCheck> {
    let n_ = n as i64;
    let (hn, hn1, hn2) = (table.get(n_), table.get(n_ - 1), table.get(n_ - 2));
    let nonregular_ok = nonregular_cf(n)?.evaluate()? == BigRational::new(hn.clone(), hn1.clone());
    let regular = euclid(&hn.abs(), &hn1.abs())?;
    let regular_ok = regular.evaluate()? == BigRational::new(hn.abs(), hn1.abs());
    let digits_ok = (0..=4).contains(&regular.leading) && regular.quotients.iter().all(|q| (1..=3).contains(q));
    let case = classify_signs(Sign::of(hn), Sign::of(hn1), Sign::of(hn2), ptm(n));
    let case_ok = case.map(|c| c.range().contains(&regular.leading));
    Ok(RowCheck {
        row: CfRow { n, regular, case: case.map(|c| c.0) },
        nonregular_ok,
        regular_ok,
        digits_ok,
        case_ok,
    })
}

/// Checks both expansions, the digit bounds and the case ranges for
/// `5 <= n <= max_n`. Rows are computed in parallel and returned in order.
pub fn scan(max_n: u64) -> Result<CfScan> {
    precondition(max_n >= 5, || format!("max_n must be at least 5, got {max_n}"))?;
    let table = TermTable::up_to(max_n);
    let checks: Vec<RowCheck> = (5..=max_n).into_par_iter().map(|n| check_row(&table, n)).collect::<Result<_>>()?;
    let pick = |f: &dyn Fn(&RowCheck) -> bool| checks.iter().filter(|c| f(c)).map(|c| c.row.n).collect::<Vec<_>>();
    let report = CfScan {
        max_n,
        convention: CONVENTION.to_string(),
        nonregular_failures: pick(&|c| !c.nonregular_ok),
        regular_failures: pick(&|c| !c.regular_ok),
        digit_failures: pick(&|c| !c.digits_ok),
        case_failures: pick(&|c| c.case_ok == Some(false)),
        unclassified: pick(&|c| c.case_ok.is_none()),
        rows: checks.into_iter().map(|c| c.row).collect(),
    };
    Ok(report)
}

/// CSV with columns `n,a(n),quotients,case`; quotients are space separated.
pub fn scan_csv(scan: &CfScan) -> String {
    let mut out = String::from("n,a(n),quotients,case\n");
    for row in &scan.rows {
        let quotients: Vec<String> = row.regular.quotients.iter().map(i64::to_string).collect();
        let case = row.case.map(|c| c.to_string()).unwrap_or_default();
        out.push_str(&format!("{},{},{},{}\n", row.n, row.regular.leading, quotients.join(" "), case));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::h;

    fn frac(a: i64, b: i64) -> BigRational {
        BigRational::new(BigInt::from(a), BigInt::from(b))
    }

    #[test]
    fn nonregular_small() {
        let cf5 = nonregular_cf(5).unwrap();
        assert_eq!(cf5.leading, 1);
        assert!(cf5.quotients.is_empty());
        assert_eq!(cf5.evaluate().unwrap(), frac(1, 1));
        let cf6 = nonregular_cf(6).unwrap();
        assert_eq!((cf6.leading, cf6.quotients.clone()), (1, vec![1]));
        assert_eq!(cf6.evaluate().unwrap(), frac(2, 1));
        let cf20 = nonregular_cf(20).unwrap();
        assert_eq!(cf20.evaluate().unwrap(), BigRational::new(h(20), h(19)));
        assert!(nonregular_cf(4).is_err());
    }

    #[test]
    fn zero_denominator_is_reported() {
        let cf = ContinuedFraction { leading: 1, quotients: vec![1, -1], kind: CfKind::PtmNonregular };
        assert!(matches!(cf.evaluate(), Err(Error::InvariantViolation(_))));
    }

    #[test]
    fn regular_small() {
        let r5 = regular_cf(5).unwrap();
        assert_eq!((r5.leading, r5.quotients.len()), (1, 0));
        let r6 = regular_cf(6).unwrap();
        assert_eq!((r6.leading, r6.quotients.len()), (2, 0));
        let r7 = regular_cf(7).unwrap();
        assert_eq!((r7.leading, r7.quotients.clone()), (0, vec![2]));
        let r14 = regular_cf(14).unwrap();
        assert_eq!((r14.leading, r14.quotients.clone()), (1, vec![2, 2]));
        assert_eq!(r14.to_string(), "[1; 2, 2]");
    }

    #[test]
    fn euclid_large_quotient() {
        let cf = euclid(&BigInt::from(1000), &BigInt::from(7)).unwrap();
        assert_eq!((cf.leading, cf.quotients.clone()), (142, vec![1, 6]));
        assert_eq!(cf.evaluate().unwrap(), frac(1000, 7));
    }

    #[test]
    fn leading_digits() {
        let a = leading_digit_sequence(10_000).unwrap();
        assert_eq!(a[1], 2);
        assert_eq!(a[2], 0);
        assert!(a.iter().all(|&d| d <= 4));
    }

    #[test]
    fn cases() {
        assert_eq!(case_classify(5).unwrap(), None);
        let c6 = case_classify(6).unwrap().unwrap();
        assert_eq!(c6, CfCase(6));
        assert_eq!(c6.range(), &[1, 2, 3, 4]);
        assert_eq!(classify_signs(Sign::Positive, Sign::Negative, Sign::Negative, -1).unwrap().range(), &[0]);
        assert_eq!(classify_signs(Sign::Positive, Sign::Negative, Sign::Positive, -1).unwrap().range(), &[1, 2]);
    }

    #[test]
    fn scan_small() {
        let s = scan(2_000).unwrap();
        assert!(s.passed(), "{:?}", (&s.digit_failures, &s.case_failures));
        assert_eq!(s.unclassified, vec![5]);
        assert_eq!(s.rows.len(), 1_996);
        let csv = scan_csv(&s);
        assert!(csv.starts_with("n,a(n),quotients,case\n5,1,,\n6,2,,6\n7,0,2,"));
    }
}
