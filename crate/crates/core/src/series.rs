//! Truncated power series and dense polynomials over `Z` or `Z/m`, and the
//! functional equations satisfied by the generating functions of `t_n`,
//! `sign(h_n)` and `h_n mod 3`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{precondition, Error, Result};
use crate::modauto::residues;
use crate::sequence::{ptm, Sign, Terms};

/// Coefficient ring.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Ring {
    Integers,
    Mod(u32),
}

impl Ring {
    /// Canonical representative: signed for `Z`, `0..m` for `Z/m`.
    pub fn reduce(self, v: i128) -> i64 {
        match self {
            Ring::Integers => i64::try_from(v).expect("integer coefficient overflow"),
            Ring::Mod(m) => v.rem_euclid(m as i128) as i64,
        }
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ring::Integers => write!(f, "Z"),
            Ring::Mod(m) => write!(f, "Z/{m}"),
        }
    }
}

fn convolve(ring: Ring, a: &[i64], b: &[i64], len: usize) -> Vec<i64> {
    let mut acc = vec![0i128; len];
    for (i, &x) in a.iter().enumerate().take(len) {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate().take(len - i) {
            acc[i + j] += x as i128 * y as i128;
        }
    }
    acc.into_iter().map(|v| ring.reduce(v)).collect()
}

/// Polynomial with coefficients in ascending degree, trailing zeros trimmed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensePolynomial {
    ring: Ring,
    coeffs: Vec<i64>,
}

impl DensePolynomial {
    pub fn new(ring: Ring, coeffs: Vec<i64>) -> Self {
        let mut coeffs: Vec<i64> = coeffs.into_iter().map(|c| ring.reduce(c as i128)).collect();
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        DensePolynomial { ring, coeffs }
    }

    /// From `(exponent, coefficient)` pairs; repeated exponents add up.
    pub fn from_terms(ring: Ring, terms: &[(usize, i64)]) -> Self {
        let len = terms.iter().map(|&(e, _)| e + 1).max().unwrap_or(0);
        let mut coeffs = vec![0i64; len];
        for &(e, c) in terms {
            coeffs[e] += c;
        }
        DensePolynomial::new(ring, coeffs)
    }

    pub fn one(ring: Ring) -> Self {
        DensePolynomial::new(ring, vec![1])
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, i: usize) -> i64 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn mul(&self, other: &DensePolynomial) -> DensePolynomial {
        assert_eq!(self.ring, other.ring, "ring mismatch");
        if self.is_zero() || other.is_zero() {
            return DensePolynomial::new(self.ring, Vec::new());
        }
        let len = self.coeffs.len() + other.coeffs.len() - 1;
        DensePolynomial::new(self.ring, convolve(self.ring, &self.coeffs, &other.coeffs, len))
    }

    pub fn change_ring(&self, ring: Ring) -> DensePolynomial {
        DensePolynomial::new(ring, self.coeffs.clone())
    }
}

/// Power series known exactly for the coefficients of `x^0 ..= x^order`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncatedSeries {
    ring: Ring,
    order: usize,
    // exactly order + 1 entries
    coeffs: Vec<i64>,
}

impl TruncatedSeries {
    /// Pads with zeros or truncates `coeffs` to `order + 1` entries.
    pub fn new(ring: Ring, mut coeffs: Vec<i64>, order: usize) -> Self {
        coeffs.resize(order + 1, 0);
        let coeffs = coeffs.into_iter().map(|c| ring.reduce(c as i128)).collect();
        TruncatedSeries { ring, order, coeffs }
    }

    pub fn from_polynomial(p: &DensePolynomial, order: usize) -> Self {
        TruncatedSeries::new(p.ring, p.coeffs.clone(), order)
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> i64 {
        self.coeffs[i]
    }

    pub fn truncate(&self, order: usize) -> Self {
        assert!(order <= self.order, "cannot extend a truncated series");
        TruncatedSeries::new(self.ring, self.coeffs[..=order].to_vec(), order)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.ring, other.ring, "ring mismatch");
        let order = self.order.min(other.order);
        let coeffs = (0..=order).map(|i| self.coeffs[i] + other.coeffs[i]).collect();
        TruncatedSeries::new(self.ring, coeffs, order)
    }

    pub fn neg(&self) -> Self {
        TruncatedSeries::new(self.ring, self.coeffs.iter().map(|c| -c).collect(), self.order)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.ring, other.ring, "ring mismatch");
        let order = self.order.min(other.order);
        TruncatedSeries::new(self.ring, convolve(self.ring, &self.coeffs, &other.coeffs, order + 1), order)
    }

    /// Product with an exact polynomial; the order is unchanged.
    pub fn mul_poly(&self, p: &DensePolynomial) -> Self {
        assert_eq!(self.ring, p.ring, "ring mismatch");
        TruncatedSeries::new(self.ring, convolve(self.ring, &p.coeffs, &self.coeffs, self.order + 1), self.order)
    }

    /// `A(x^2)`, known to order `2 * order`.
    pub fn substitute_square(&self) -> Self {
        let order = 2 * self.order;
        let mut coeffs = vec![0; order + 1];
        for (k, &c) in self.coeffs.iter().enumerate() {
            coeffs[2 * k] = c;
        }
        TruncatedSeries::new(self.ring, coeffs, order)
    }

    pub fn change_ring(&self, ring: Ring) -> Self {
        TruncatedSeries::new(ring, self.coeffs.clone(), self.order)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn first_nonzero(&self) -> Option<usize> {
        self.coeffs.iter().position(|&c| c != 0)
    }
}

/// `T(x) = sum t_n x^n` over `Z`.
pub fn series_t(order: usize) -> TruncatedSeries {
    let coeffs = (0..=order as u64).map(|n| ptm(n) as i64).collect();
    TruncatedSeries::new(Ring::Integers, coeffs, order)
}

/// `T(x) - (1 - x) T(x^2)`; zero exactly when the Mahler equation holds.
pub fn t_mahler_residual(order: usize) -> Result<TruncatedSeries> {
    precondition(order >= 1, || "order must be positive".into())?;
    let t = series_t(order);
    let one_minus_x = DensePolynomial::new(Ring::Integers, vec![1, -1]);
    let rhs = t.substitute_square().truncate(order).mul_poly(&one_minus_x);
    Ok(t.sub(&rhs))
}

/// `U(x) = sum sign(h_n) x^n`, from the exact terms.
pub fn series_u(order: usize) -> TruncatedSeries {
    let coeffs = Terms::new().take(order + 1).map(|t| Sign::of(&t.value).as_i8() as i64).collect();
    TruncatedSeries::new(Ring::Integers, coeffs, order)
}

/// `-x^2 + x^3 - x^4 / (1 - x^2) + x prod_{n>=0} (1 - x^{2^{n+1}})`, with the
/// product multiplied out factor by factor.
pub fn u_closed_form(order: usize) -> TruncatedSeries {
    u_closed_form_with_cubic(order, 1)
}

/// The closed form with `cubic * x^3` in place of `+x^3`.
pub fn u_closed_form_with_cubic(order: usize, cubic: i64) -> TruncatedSeries {
    let mut product = TruncatedSeries::new(Ring::Integers, vec![1], order);
    let mut step = 2usize;
    while step <= order {
        let mut factor = vec![0i64; step + 1];
        factor[0] = 1;
        factor[step] = -1;
        product = product.mul_poly(&DensePolynomial::new(Ring::Integers, factor));
        step *= 2;
    }
    let mut coeffs = vec![0i64; order + 1];
    for n in 0..order {
        coeffs[n + 1] += product.coeff(n);
    }
    for (i, c) in [(2usize, -1i64), (3, cubic)] {
        if i <= order {
            coeffs[i] += c;
        }
    }
    for i in (4..=order).step_by(2) {
        coeffs[i] -= 1;
    }
    TruncatedSeries::new(Ring::Integers, coeffs, order)
}

pub fn verify_u_closed_form(order: usize) -> Result<bool> {
    precondition(order >= 16, || format!("order {order} is below 16"))?;
    Ok(series_u(order) == u_closed_form(order))
}

/// `S(x^2) == S(x)^2` to `order`, computed in the ring of `s`.
pub fn frobenius_holds(s: &TruncatedSeries, order: usize) -> bool {
    let s = s.truncate(order);
    s.substitute_square().truncate(order) == s.mul(&s)
}

/// `G(x) = sum (h_n mod m) x^n` over `Z/m`.
pub fn residue_series(m: u32, order: usize) -> TruncatedSeries {
    let coeffs = residues(m, order + 1).into_iter().map(i64::from).collect();
    TruncatedSeries::new(Ring::Mod(m), coeffs, order)
}

/// Frobenius congruence over `Z/2` for `h_n mod 2` and for `(h_n mod 3) mod 2`.
pub fn frobenius_check_mod2(order: usize) -> Result<bool> {
    precondition(order >= 64, || format!("order {order} is below 64"))?;
    let s = residue_series(2, order);
    let f = residue_series(3, order).change_ring(Ring::Mod(2));
    Ok(frobenius_holds(&s, order) && frobenius_holds(&f, order))
}

/// `(exponent, coefficient)` pairs.
pub type SparseTerms = Vec<(usize, i64)>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactoredPolynomial {
    pub degree: usize,
    pub factors: Vec<SparseTerms>,
    pub expanded: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparsePolynomial {
    pub degree: usize,
    pub terms: SparseTerms,
}

/// Coefficients `p, q, r` of the mod-3 functional equation
/// `p(x) G(x^2) + q(x) G(x) + r(x) = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MahlerData {
    pub ring: String,
    pub p: FactoredPolynomial,
    pub q: FactoredPolynomial,
    pub r: SparsePolynomial,
}

/// Bundled copy of the coefficient data.
pub const MAHLER_MOD3_JSON: &str = include_str!("../data/mahler_mod3.json");

/// The three polynomials over `Z`, after checking the data file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MahlerPolynomials {
    pub p: DensePolynomial,
    pub q: DensePolynomial,
    pub r: DensePolynomial,
}

fn check_factored(name: &str, f: &FactoredPolynomial) -> Result<DensePolynomial> {
    let product = f
        .factors
        .iter()
        .map(|t| DensePolynomial::from_terms(Ring::Integers, t))
        .fold(DensePolynomial::one(Ring::Integers), |acc, g| acc.mul(&g));
    let expanded = DensePolynomial::new(Ring::Integers, f.expanded.clone());
    if product != expanded {
        return Err(Error::PolynomialData(format!("{name}: factored form does not expand to the listed coefficients")));
    }
    if expanded.degree() != Some(f.degree) {
        return Err(Error::PolynomialData(format!("{name}: degree is {:?}, listed as {}", expanded.degree(), f.degree)));
    }
    Ok(expanded)
}

impl MahlerData {
    pub fn bundled() -> Result<MahlerData> {
        MahlerData::from_json(MAHLER_MOD3_JSON)
    }

    pub fn from_json(text: &str) -> Result<MahlerData> {
        serde_json::from_str(text).map_err(|e| Error::PolynomialData(format!("unreadable polynomial data: {e}")))
    }

    /// Checks both forms of `p` and `q` and all listed degrees.
    pub fn polynomials(&self) -> Result<MahlerPolynomials> {
        if self.ring != "Z/3" {
            return Err(Error::PolynomialData(format!("expected ring Z/3, found {}", self.ring)));
        }
        let p = check_factored("p", &self.p)?;
        let q = check_factored("q", &self.q)?;
        let r = DensePolynomial::from_terms(Ring::Integers, &self.r.terms);
        if r.degree() != Some(self.r.degree) {
            return Err(Error::PolynomialData(format!("r: degree is {:?}, listed as {}", r.degree(), self.r.degree)));
        }
        Ok(MahlerPolynomials { p, q, r })
    }
}

/// `p A(x^2) + q A + r` in the ring of `a`, to order `a.order() - deg p`.
pub fn mahler_residual(polys: &MahlerPolynomials, a: &TruncatedSeries) -> TruncatedSeries {
    let ring = a.ring();
    let order = a.order().saturating_sub(polys.p.degree().unwrap_or(0));
    let a = a.truncate(order);
    let lhs = a.substitute_square().truncate(order).mul_poly(&polys.p.change_ring(ring));
    let mid = a.mul_poly(&polys.q.change_ring(ring));
    lhs.add(&mid).add(&TruncatedSeries::from_polynomial(&polys.r.change_ring(ring), order))
}

/// `p A^2 + q A + r` in the ring of `a`, to `a.order()`.
pub fn quadratic_residual(polys: &MahlerPolynomials, a: &TruncatedSeries) -> TruncatedSeries {
    let ring = a.ring();
    let lhs = a.mul(a).mul_poly(&polys.p.change_ring(ring));
    let mid = a.mul_poly(&polys.q.change_ring(ring));
    lhs.add(&mid).add(&TruncatedSeries::from_polynomial(&polys.r.change_ring(ring), a.order()))
}

/// Outcome of the mod-3 functional equation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MahlerReport {
    pub order: usize,
    pub residual_order: usize,
    pub residual_zero: bool,
    pub first_nonzero: Option<usize>,
    pub first_nonzero_value: Option<i64>,
    pub nonzero_count: usize,
    /// `p F^2 + q F + r == 0` over `Z/2` for `F = G mod 2`, to `order`.
    pub quadratic_mod2_zero: bool,
}

/// Residual of the mod-3 equation with the transcribed polynomials.
pub fn mahler_check_mod3(order: usize, data: &MahlerData) -> Result<MahlerReport> {
    precondition(order >= 128, || format!("order {order} is below 128"))?;
    let polys = data.polynomials()?;
    let g = residue_series(3, order);
    let residual = mahler_residual(&polys, &g);
    let first = residual.first_nonzero();
    let f = g.change_ring(Ring::Mod(2));
    Ok(MahlerReport {
        order,
        residual_order: residual.order(),
        residual_zero: residual.is_zero(),
        first_nonzero: first,
        first_nonzero_value: first.map(|i| residual.coeff(i)),
        nonzero_count: residual.coeffs().iter().filter(|&&c| c != 0).count(),
        quadratic_mod2_zero: quadratic_residual(&polys, &f).is_zero(),
    })
}

/// Fingerprint of the residual obtained from the bundled data at order 256:
/// `(first nonzero index, its value, number of nonzero coefficients)`.
pub const MOD3_RESIDUAL_FINGERPRINT: (usize, i64, usize) = (2, 2, 132);

impl MahlerReport {
    /// Zero residual, or exactly the known nonzero residual of the bundled
    /// coefficients at order 256, with the mod-2 quadratic holding.
    pub fn accepted(&self) -> bool {
        if !self.quadratic_mod2_zero {
            return false;
        }
        if self.residual_zero {
            return true;
        }
        let (index, value, count) = MOD3_RESIDUAL_FINGERPRINT;
        self.order == 256
            && self.first_nonzero == Some(index)
            && self.first_nonzero_value == Some(value)
            && self.nonzero_count == count
    }
}

/// Polynomial solutions `g`, `deg g <= D`, of `p g^2 + q g + r = 0` over `Z/2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub degree_bound: usize,
    /// Number of solutions; the solution set is an affine space over `Z/2`.
    pub roots: u128,
    /// One solution, coefficients ascending, if any.
    pub example: Option<Vec<u8>>,
}

/// Over `Z/2` squaring is linear, so `p g^2 + q g = r` is a linear system in
/// the coefficients of `g`; solved by Gaussian elimination.
pub fn root_search_mod2(p: &DensePolynomial, q: &DensePolynomial, r: &DensePolynomial, degree_bound: usize) -> ProbeReport {
    let bit = |poly: &DensePolynomial, i: usize| (poly.coeff(i).rem_euclid(2)) as u8;
    let unknowns = degree_bound + 1;
    let words = unknowns.div_ceil(64);
    let deg = |poly: &DensePolynomial| poly.degree().unwrap_or(0);
    let rows_len = (deg(p) + 2 * degree_bound).max(deg(q) + degree_bound).max(deg(r)) + 1;
    // each row: coefficient bits of g_0..g_D, then the right-hand side
    let mut rows: Vec<(Vec<u64>, u8)> = (0..rows_len)
        .map(|k| {
            let mut v = vec![0u64; words];
            for i in 0..unknowns {
                let mut c = 0u8;
                if k >= 2 * i {
                    c ^= bit(p, k - 2 * i);
                }
                if k >= i {
                    c ^= bit(q, k - i);
                }
                if c == 1 {
                    v[i / 64] |= 1 << (i % 64);
                }
            }
            (v, bit(r, k))
        })
        .collect();

    let mut pivots = Vec::new();
    let mut next_row = 0;
    for col in 0..unknowns {
        let (w, b) = (col / 64, 1u64 << (col % 64));
        let Some(found) = (next_row..rows.len()).find(|&i| rows[i].0[w] & b != 0) else {
            continue;
        };
        rows.swap(next_row, found);
        let pivot = rows[next_row].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != next_row && row.0[w] & b != 0 {
                for (x, y) in row.0.iter_mut().zip(&pivot.0) {
                    *x ^= y;
                }
                row.1 ^= pivot.1;
            }
        }
        pivots.push(col);
        next_row += 1;
    }
    let consistent = rows[next_row..].iter().all(|row| row.1 == 0);
    if !consistent {
        return ProbeReport { degree_bound, roots: 0, example: None };
    }
    let free = unknowns - pivots.len();
    let mut example = vec![0u8; unknowns];
    for (row, &col) in rows.iter().zip(&pivots) {
        example[col] = row.1;
    }
    while example.len() > 1 && example.last() == Some(&0) {
        example.pop();
    }
    let roots = if free >= 128 { u128::MAX } else { 1u128 << free };
    ProbeReport { degree_bound, roots, example: Some(example) }
}

/// Bounded search for polynomial roots of `p y^2 + q y + r` over `Z/2`.
pub fn irreducibility_probe(degree_bound: usize, data: &MahlerData) -> Result<ProbeReport> {
    precondition(degree_bound >= 32, || format!("degree bound {degree_bound} is below 32"))?;
    let polys = data.polynomials()?;
    Ok(root_search_mod2(&polys.p, &polys.q, &polys.r, degree_bound))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(c: &[i64], order: usize) -> TruncatedSeries {
        TruncatedSeries::new(Ring::Integers, c.to_vec(), order)
    }

    #[test]
    fn t_coefficients_and_equation() {
        let t = series_t(16);
        assert_eq!(t.coeff(0), 1);
        assert_eq!(t.coeff(3), 1);
        assert_eq!(t.coeff(7), -1);
        assert!(t_mahler_residual(1024).unwrap().is_zero());
    }

    #[test]
    fn u_closed_form_matches() {
        assert!(verify_u_closed_form(16).unwrap());
        assert!(verify_u_closed_form(1024).unwrap());
        assert_eq!(series_u(16).coeff(0), 0);
        assert_eq!(u_closed_form(16).coeff(0), 0);
        assert!(verify_u_closed_form(15).is_err());
    }

    #[test]
    fn negative_cubic_differs_only_at_three() {
        let diff = series_u(256).sub(&u_closed_form_with_cubic(256, -1));
        assert_eq!(diff.first_nonzero(), Some(3));
        assert_eq!(diff.coeff(3), 2);
        assert_eq!(diff.truncate(256).coeffs().iter().filter(|&&c| c != 0).count(), 1);
    }

    #[test]
    fn arithmetic_laws() {
        let a = int(&[1, 2, -3, 4], 6);
        let b = int(&[0, -1, 5], 6);
        let c = int(&[7, 0, 0, 1, 1], 5);
        assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
        assert_eq!(a.mul(&b), b.mul(&a));
        assert_eq!(a.add(&c).order(), 5);
        let sq = a.substitute_square();
        assert_eq!(sq.order(), 12);
        assert_eq!(sq.coeff(4), -3);
        assert_eq!(sq.coeff(5), 0);
    }

    #[test]
    fn polynomial_basics() {
        let p = DensePolynomial::new(Ring::Mod(3), vec![4, 0, 3, 0]);
        assert_eq!(p.coeffs(), &[1]);
        assert_eq!(p.degree(), Some(0));
        assert_eq!(DensePolynomial::new(Ring::Integers, vec![0, 0]).degree(), None);
        let x1 = DensePolynomial::new(Ring::Integers, vec![1, 1]);
        assert_eq!(x1.mul(&x1).coeffs(), &[1, 2, 1]);
    }

    #[test]
    fn frobenius() {
        assert!(frobenius_check_mod2(1024).unwrap());
        let s = TruncatedSeries::new(Ring::Mod(3), vec![1, 1], 8);
        assert!(!frobenius_holds(&s, 8));
        let s2 = s.change_ring(Ring::Mod(2));
        assert!(frobenius_holds(&s2, 8));
    }

    #[test]
    fn bundled_data_is_consistent() {
        let data = MahlerData::bundled().unwrap();
        let polys = data.polynomials().unwrap();
        assert_eq!(polys.p.degree(), Some(59));
        assert_eq!(polys.q.degree(), Some(56));
        assert_eq!(polys.r.degree(), Some(57));
        assert_eq!(polys.r.coeff(0), 0);
    }

    #[test]
    fn corrupted_data_is_rejected() {
        let mut data = MahlerData::bundled().unwrap();
        data.p.expanded[10] += 1;
        assert!(matches!(data.polynomials(), Err(Error::PolynomialData(_))));
        let mut data = MahlerData::bundled().unwrap();
        data.r.degree = 56;
        assert!(data.polynomials().is_err());
        assert!(MahlerData::from_json("{").is_err());
    }

    #[test]
    fn mod3_residual_fingerprint() {
        let data = MahlerData::bundled().unwrap();
        let report = mahler_check_mod3(256, &data).unwrap();
        assert_eq!(report.residual_order, 256 - 59);
        assert!(!report.residual_zero);
        let (index, value, count) = MOD3_RESIDUAL_FINGERPRINT;
        assert_eq!(report.first_nonzero, Some(index));
        assert_eq!(report.first_nonzero_value, Some(value));
        assert_eq!(report.nonzero_count, count);
        assert!(report.quadratic_mod2_zero);
        assert!(report.accepted());
        // the constant coefficient vanishes
        assert_ne!(report.first_nonzero, Some(0));
    }

    #[test]
    fn mod2_quadratic_deep() {
        let polys = MahlerData::bundled().unwrap().polynomials().unwrap();
        let f = residue_series(3, 512).change_ring(Ring::Mod(2));
        assert!(quadratic_residual(&polys, &f).is_zero());
        let h2 = residue_series(2, 512);
        assert!(!quadratic_residual(&polys, &h2).is_zero());
    }

    #[test]
    fn probe_self_test() {
        let one = DensePolynomial::one(Ring::Integers);
        let zero = DensePolynomial::new(Ring::Integers, vec![]);
        let report = root_search_mod2(&one, &one, &zero, 40);
        assert_eq!(report.roots, 2);
        assert_eq!(report.example, Some(vec![0]));
        // y^2 + y + x^2 + x has roots x and x + 1
        let r = DensePolynomial::new(Ring::Integers, vec![0, 1, 1]);
        let report = root_search_mod2(&one, &one, &r, 40);
        assert_eq!(report.roots, 2);
    }

    #[test]
    fn probe_finds_no_root() {
        let data = MahlerData::bundled().unwrap();
        let report = irreducibility_probe(64, &data).unwrap();
        assert_eq!(report.roots, 0);
        assert!(irreducibility_probe(31, &data).is_err());
    }
}
