//! Automata computing `h_n mod m`.
//!
//! The step function `f_k` maps a residue pair `(h_{l-2}, h_{l-1})` and a sign
//! `z = t_j` to the pair `2^k` recurrence steps later, for a block whose PTM
//! pattern is `z * (t_0, ..., t_{2^k - 1})`:
//!
//! ```text
//! f_0((x, y), z)     = (y, z*y + x)  (mod m)
//! f_{k+1}((x, y), z) = f_k(f_k((x, y), z), -z)
//! ```
//!
//! Only finitely many tables exist, so `f_p = f_{p+q}` for some minimal
//! `(p, q)`, after which the family is periodic. The [`Cascade`] machine keeps
//! `p + q` residue-pair cells plus the running PTM sign and reads `n` most
//! significant digit first.

use std::collections::{HashMap, VecDeque};

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::automata::{Dfao, Direction};
use crate::error::{precondition, Error, Result};
use crate::sequence::{ptm, ptm_wide};

/// Reachable-state ceiling for [`build_cascade`].
pub const DEFAULT_STATE_LIMIT: usize = 2_000_000;

/// Indices up to this bound are checked against the plain recurrence.
pub const DIRECT_VERIFY_LIMIT: u128 = 1 << 24;

#[inline]
fn sign_slot(z: i8) -> usize {
    if z >= 0 {
        0
    } else {
        1
    }
}

/// Full table of one `f_k` over `(Z/m)^2 x {+1, -1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StepFunction {
    modulus: u32,
    // table[((x * m) + y) * 2 + slot(z)]
    table: Vec<(u32, u32)>,
}

impl StepFunction {
    /// `f_0`.
    pub fn base(modulus: u32) -> Self {
        assert!(modulus >= 2, "modulus must be at least 2");
        let m = modulus;
        let mut table = Vec::with_capacity((2 * m * m) as usize);
        for x in 0..m {
            for y in 0..m {
                table.push((y, (y + x) % m));
                table.push((y, (m - y + x) % m));
            }
        }
        StepFunction { modulus, table }
    }

    /// `f_{k+1}` from `f_k`.
    pub fn next(&self) -> Self {
        let table = (0..self.table.len())
            .map(|i| {
                let (x, y) = self.table[i];
                let flipped = if i % 2 == 0 { -1 } else { 1 };
                self.apply(x, y, flipped)
            })
            .collect();
        StepFunction { modulus: self.modulus, table }
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    #[inline]
    pub fn apply(&self, x: u32, y: u32, z: i8) -> (u32, u32) {
        self.table[((x * self.modulus + y) as usize) * 2 + sign_slot(z)]
    }

    /// For both signs, `(x, y) |-> f((x, y), z)` is a permutation of `(Z/m)^2`.
    pub fn slices_are_permutations(&self) -> bool {
        let m = self.modulus as usize;
        [1i8, -1].iter().all(|&z| {
            let mut seen = vec![false; m * m];
            for x in 0..self.modulus {
                for y in 0..self.modulus {
                    let (a, b) = self.apply(x, y, z);
                    let slot = a as usize * m + b as usize;
                    if seen[slot] {
                        return false;
                    }
                    seen[slot] = true;
                }
            }
            true
        })
    }
}

/// `f_k` for modulus `m`.
pub fn step_function(k: u32, m: u32) -> StepFunction {
    (0..k).fold(StepFunction::base(m), |f, _| f.next())
}

/// Smallest `p`, then smallest `q >= 1`, with `f_p = f_{p+q}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PeriodPair {
    pub p: u32,
    pub q: u32,
}

impl PeriodPair {
    /// `q` if even, otherwise `2q`.
    pub fn even_q(self) -> u32 {
        if self.q.is_multiple_of(2) {
            self.q
        } else {
            2 * self.q
        }
    }

    /// Representative in `0..p+q` of `f_k`.
    pub fn reduce(self, k: u32) -> u32 {
        if k < self.p {
            k
        } else {
            (k - self.p) % self.q + self.p
        }
    }
}

/// `f_0 ..= f_{p+q-1}` together with their period.
#[derive(Clone, Debug)]
pub struct StepFamily {
    period: PeriodPair,
    functions: Vec<StepFunction>,
}

impl StepFamily {
    pub fn new(m: u32) -> Self {
        let mut first_seen: HashMap<StepFunction, u32> = HashMap::new();
        let mut functions = Vec::new();
        let mut current = StepFunction::base(m);
        loop {
            // HashMap lookup compares full tables on hash hits
            if let Some(&p) = first_seen.get(&current) {
                let k = functions.len() as u32;
                return StepFamily { period: PeriodPair { p, q: k - p }, functions };
            }
            first_seen.insert(current.clone(), functions.len() as u32);
            let next = current.next();
            functions.push(current);
            current = next;
        }
    }

    pub fn modulus(&self) -> u32 {
        self.functions[0].modulus
    }

    pub fn period(&self) -> PeriodPair {
        self.period
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    /// `f_k` for any `k`, through the period.
    pub fn get(&self, k: u32) -> &StepFunction {
        &self.functions[self.period.reduce(k) as usize]
    }
}

pub fn find_period(m: u32) -> PeriodPair {
    StepFamily::new(m).period()
}

/// Cell contents of the cascade machine: `p` cells of the transient part,
/// then `q` cells of the cyclic part, then the PTM sign of the prefix read.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CascadeState {
    pub cells: Vec<(u32, u32)>,
    pub c: i8,
}

impl CascadeState {
    pub fn q1_cells(&self, p: u32) -> &[(u32, u32)] {
        &self.cells[..p as usize]
    }

    pub fn q2_cells(&self, p: u32) -> &[(u32, u32)] {
        &self.cells[p as usize..]
    }
}

/// The cascade DFAO for `h_n mod m`, evaluated lazily.
#[derive(Clone, Debug)]
pub struct Cascade {
    family: StepFamily,
}

impl Cascade {
    pub fn new(m: u32) -> Self {
        Cascade { family: StepFamily::new(m) }
    }

    pub fn modulus(&self) -> u32 {
        self.family.modulus()
    }

    pub fn period(&self) -> PeriodPair {
        self.family.period()
    }

    pub fn family(&self) -> &StepFamily {
        &self.family
    }

    fn cell_count(&self) -> usize {
        let PeriodPair { p, q } = self.period();
        (p + q) as usize
    }

    /// `((v_{-2}, v_{-1})^p, (v_{-2}, v_{-1})^q, +1)`.
    pub fn initial(&self) -> CascadeState {
        let m = self.modulus();
        CascadeState { cells: vec![(m - 1, 1 % m); self.cell_count()], c: 1 }
    }

    /// Digit 0 moves `Q1` down one cell and rotates `Q2`; digit 1 applies
    /// `f_j` to the value moving into cell `j` and flips the sign.
    pub fn step(&self, state: &CascadeState, digit: u32) -> CascadeState {
        let p = self.period().p as usize;
        let len = state.cells.len();
        let source = |j: usize| if j + 1 < len { state.cells[j + 1] } else { state.cells[p] };
        match digit {
            0 => CascadeState { cells: (0..len).map(source).collect(), c: state.c },
            1 => CascadeState {
                cells: (0..len)
                    .map(|j| {
                        let (x, y) = source(j);
                        self.family.functions[j].apply(x, y, state.c)
                    })
                    .collect(),
                c: -state.c,
            },
            _ => panic!("cascade input digit {digit} is not binary"),
        }
    }

    /// `c * g_{0,1} + g_{0,0} mod m`.
    pub fn output(&self, state: &CascadeState) -> u32 {
        let m = self.modulus();
        let (g0, g1) = state.cells[0];
        let scaled = if state.c >= 0 { g1 } else { (m - g1) % m };
        (scaled + g0) % m
    }

    /// `h_n mod m` by running the machine on the binary digits of `n`.
    pub fn eval(&self, n: u128) -> u32 {
        let mut state = self.initial();
        let bits = 128 - n.leading_zeros();
        for b in (0..bits).rev() {
            state = self.step(&state, ((n >> b) & 1) as u32);
        }
        self.output(&state)
    }

    /// Size of the full product `(m^2)^(p+q) * 2`.
    pub fn raw_state_count(&self) -> BigUint {
        let m = BigUint::from(self.modulus());
        let cells = self.cell_count() as u32;
        (&m * &m).pow(cells) * 2u32
    }

    fn encode(&self, state: &CascadeState) -> Vec<u32> {
        let m = self.modulus();
        let mut key: Vec<u32> = state.cells.iter().map(|&(x, y)| x * m + y).collect();
        key.push(u32::from(state.c < 0));
        key
    }

    /// Reachable part of the machine as an explicit MSB-first [`Dfao`].
    pub fn to_dfao(&self, limit: usize) -> Result<Dfao> {
        let mut ids: HashMap<Vec<u32>, u32> = HashMap::new();
        let mut states = Vec::new();
        let mut queue = VecDeque::new();
        let start = self.initial();
        ids.insert(self.encode(&start), 0);
        states.push(start.clone());
        queue.push_back(start);
        let mut transitions: Vec<Vec<u32>> = Vec::new();
        while let Some(state) = queue.pop_front() {
            let mut row = Vec::with_capacity(2);
            for digit in 0..2 {
                let next = self.step(&state, digit);
                let key = self.encode(&next);
                let id = match ids.get(&key) {
                    Some(&id) => id,
                    None => {
                        if states.len() >= limit {
                            return Err(Error::StateLimit { modulus: self.modulus(), limit });
                        }
                        let id = states.len() as u32;
                        ids.insert(key, id);
                        states.push(next.clone());
                        queue.push_back(next);
                        id
                    }
                };
                row.push(id);
            }
            transitions.push(row);
        }
        let outputs = states.iter().map(|s| self.output(s) as i64).collect();
        Dfao::new(2, transitions, 0, outputs, Direction::MsbFirst)
    }
}

/// Reachable cascade automaton for `h_n mod m`.
pub fn build_cascade(m: u32) -> Result<Dfao> {
    precondition(m >= 2, || format!("modulus {m} is below 2"))?;
    Cascade::new(m).to_dfao(DEFAULT_STATE_LIMIT)
}

/// `h_n mod m` through the cascade machine.
pub fn h_mod(n: u64, m: u32) -> u32 {
    Cascade::new(m).eval(n as u128)
}

/// `h_0 mod m, ..., h_{count-1} mod m` by the plain recurrence.
pub fn residues(m: u32, count: usize) -> Vec<u32> {
    let m64 = m as u64;
    let mut out = Vec::with_capacity(count);
    let (mut a, mut b) = (m64 - 1, 1 % m64);
    for n in 0..count as u64 {
        let v = if ptm(n) == 1 { (b + a) % m64 } else { (m64 - b + a) % m64 };
        out.push(v as u32);
        a = b;
        b = v;
    }
    out
}

/// Plain-recurrence residue at a single index.
pub fn h_mod_direct(n: u64, m: u32) -> u32 {
    let m64 = m as u64;
    let (mut a, mut b) = (m64 - 1, 1 % m64);
    for i in 0..n {
        let v = if ptm(i) == 1 { (b + a) % m64 } else { (m64 - b + a) % m64 };
        a = b;
        b = v;
    }
    if ptm(n) == 1 {
        ((b + a) % m64) as u32
    } else {
        ((m64 - b + a) % m64) as u32
    }
}

type Mat2 = [[u64; 2]; 2];

fn mat_mul(a: &Mat2, b: &Mat2, m: u64) -> Mat2 {
    let mut out = [[0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = (a[i][0] * b[0][j] + a[i][1] * b[1][j]) % m;
        }
    }
    out
}

/// `h_n mod m` for very large `n` by multiplying 2x2 recurrence matrices over
/// dyadic blocks. Independent of the step-function tables.
pub fn h_mod_transfer(n: u128, m: u32) -> u32 {
    let m64 = m as u64;
    let single = |t: i64| -> Mat2 { [[0, 1], [1, t.rem_euclid(m as i64) as u64]] };
    let bits = (128 - n.leading_zeros()) as usize;
    // blocks[k] = (M_k(+1), M_k(-1)) acting on column (h_{i-2}, h_{i-1})
    let mut blocks: Vec<(Mat2, Mat2)> = vec![(single(1), single(-1))];
    for k in 1..bits.max(1) {
        let (plus, minus) = blocks[k - 1];
        blocks.push((mat_mul(&minus, &plus, m64), mat_mul(&plus, &minus, m64)));
    }
    let (mut a, mut b) = (m64 - 1, 1 % m64);
    let mut sign = 1i8;
    for k in (0..bits).rev() {
        if (n >> k) & 1 == 1 {
            let mat = if sign == 1 { &blocks[k].0 } else { &blocks[k].1 };
            let na = (mat[0][0] * a + mat[0][1] * b) % m64;
            let nb = (mat[1][0] * a + mat[1][1] * b) % m64;
            a = na;
            b = nb;
            sign = -sign;
        }
    }
    let v = if ptm_wide(n) == 1 { (b + a) % m64 } else { (m64 - b + a) % m64 };
    v as u32
}

/// Residue at `n` by the plain recurrence when cheap, otherwise by
/// [`h_mod_transfer`].
pub fn h_mod_reference(n: u128, m: u32) -> u32 {
    if n <= DIRECT_VERIFY_LIMIT {
        h_mod_direct(n as u64, m)
    } else {
        h_mod_transfer(n, m)
    }
}

/// Verified zeros of `h_n mod m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZeroIndices {
    pub modulus: u32,
    pub period: PeriodPair,
    pub even_q: u32,
    /// `2^(p+q') - 2^p`.
    pub witness: u128,
    /// Sorted; contains the `count` smallest zeros found by the scan and the witness.
    pub indices: Vec<u128>,
}

/// The `count` smallest zeros of `h_n mod m` found below `scan_bound`, plus
/// the witness `2^(p+q') - 2^p` with `q'` the even multiple of `q`. Extra
/// witnesses `2^(p+j q') - 2^p` fill in if the scan finds too few.
pub fn zero_indices(m: u32, count: usize, scan_bound: u64) -> Result<ZeroIndices> {
    precondition(m >= 2, || format!("modulus {m} is below 2"))?;
    precondition(count >= 1, || "count must be positive".into())?;
    let cascade = Cascade::new(m);
    let period = cascade.period();
    let even_q = period.even_q();
    let witness_at = |j: u32| -> Result<u128> {
        let top = period.p + j * even_q;
        if top >= 127 {
            return Err(Error::Precondition(format!("witness 2^{top} does not fit in 128 bits")));
        }
        Ok((1u128 << top) - (1u128 << period.p))
    };

    let mut indices: Vec<u128> = residues(m, scan_bound as usize + 1)
        .into_iter()
        .enumerate()
        .filter(|&(_, v)| v == 0)
        .map(|(n, _)| n as u128)
        .take(count)
        .collect();
    let witness = witness_at(1)?;
    indices.push(witness);
    let mut j = 2;
    while indices.len() < count + 1 {
        indices.push(witness_at(j)?);
        j += 1;
    }
    indices.sort_unstable();
    indices.dedup();

    for &n in &indices {
        let by_cascade = cascade.eval(n);
        let by_reference = h_mod_reference(n, m);
        if by_cascade != 0 || by_reference != 0 {
            return Err(Error::InvariantViolation(format!(
                "index {n} is not a zero mod {m} (cascade {by_cascade}, reference {by_reference})"
            )));
        }
    }
    Ok(ZeroIndices { modulus: m, period, even_q, witness, indices })
}

/// Blocks of the 16-uniform morphism whose image of `(t_n)` is `(h_n mod 3)`.
pub const M3_BLOCK_PLUS: [u32; 16] = [0, 1, 2, 0, 2, 2, 1, 1, 0, 1, 1, 0, 1, 2, 2, 1];
pub const M3_BLOCK_MINUS: [u32; 16] = [1, 2, 0, 2, 2, 0, 2, 2, 1, 1, 0, 1, 2, 0, 2, 1];

/// Whether `h_n mod 3` matches the morphic image of the PTM sequence on the
/// first `prefix_length` terms.
pub fn morphism_check_m3(prefix_length: usize) -> Result<bool> {
    precondition(prefix_length <= 1 << 16, || format!("prefix length {prefix_length} exceeds 2^16"))?;
    let direct = residues(3, prefix_length);
    Ok(direct.iter().enumerate().all(|(n, &v)| {
        let block = if ptm((n / 16) as u64) == 1 { &M3_BLOCK_PLUS } else { &M3_BLOCK_MINUS };
        block[n % 16] == v
    }))
}

/// First `n <= max` where the cascade disagrees with the plain recurrence.
pub fn first_cascade_mismatch(m: u32, max: u64) -> Option<u64> {
    let cascade = Cascade::new(m);
    residues(m, max as usize + 1)
        .into_iter()
        .enumerate()
        .find(|&(n, v)| cascade.eval(n as u128) != v)
        .map(|(n, _)| n as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequence::TermTable;
    use num_bigint::BigInt;
    use num_traits::ToPrimitive;
    use proptest::prelude::*;

    fn modulo(v: &BigInt, m: u32) -> u32 {
        let r = v % BigInt::from(m);
        let r = r.to_i64().unwrap();
        r.rem_euclid(m as i64) as u32
    }

    #[test]
    fn f1_and_f4_mod_3() {
        let f1 = step_function(1, 3);
        let f4 = step_function(4, 3);
        for x in 0..3u32 {
            for y in 0..3u32 {
                for z in [1i8, -1] {
                    let zi = z as i64;
                    let (x_, y_) = (x as i64, y as i64);
                    assert_eq!(
                        f1.apply(x, y, z),
                        ((zi * y_ + x_).rem_euclid(3) as u32, (-zi * x_).rem_euclid(3) as u32)
                    );
                    assert_eq!(f4.apply(x, y, z), (x, y));
                }
            }
        }
    }

    #[test]
    fn f6_equals_f2_mod_4() {
        assert_eq!(step_function(6, 4), step_function(2, 4));
        assert_ne!(step_function(5, 4), step_function(1, 4));
    }

    #[test]
    fn periods() {
        assert_eq!(find_period(3), PeriodPair { p: 4, q: 1 });
        assert_eq!(find_period(4), PeriodPair { p: 2, q: 4 });
        // frozen from a brute-force comparison of full tables
        assert_eq!(find_period(2), PeriodPair { p: 0, q: 2 });
        assert_eq!(find_period(5), PeriodPair { p: 1, q: 6 });
        assert_eq!(find_period(29), PeriodPair { p: 17, q: 52 });
    }

    #[test]
    fn period_brute_force() {
        for m in 2..=12 {
            let tables: Vec<StepFunction> = (0..80).map(|k| step_function(k, m)).collect();
            let mut best = None;
            'outer: for p in 0..40usize {
                for q in 1..40usize {
                    if tables[p] == tables[p + q] {
                        best = Some((p as u32, q as u32));
                        break 'outer;
                    }
                }
            }
            let (p, q) = best.unwrap();
            assert_eq!(find_period(m), PeriodPair { p, q }, "m = {m}");
        }
    }

    #[test]
    fn ultimate_periodicity() {
        for m in 2..=12 {
            let PeriodPair { p, q } = find_period(m);
            for k in 0..=3 * q {
                assert_eq!(step_function(p + k, m), step_function(p + q + k, m));
            }
        }
    }

    #[test]
    fn slices_are_bijections() {
        for m in 2..=12 {
            let family = StepFamily::new(m);
            for k in 0..family.len() as u32 {
                assert!(family.get(k).slices_are_permutations(), "m = {m}, k = {k}");
            }
        }
    }

    #[test]
    fn block_invariant() {
        // f_k((v_{2^k l - 2}, v_{2^k l - 1}), t_l) = (v_{2^k l + 2^k - 2}, v_{2^k l + 2^k - 1})
        let table = TermTable::up_to(1 << 14);
        for m in [3u32, 4, 5, 7] {
            let PeriodPair { p, q } = find_period(m);
            for k in 0..=(p + q) {
                let f = step_function(k, m);
                let block = 1i64 << k;
                for l in 0..=64i64 {
                    if block * l + block - 1 > table.max_index() as i64 {
                        break;
                    }
                    let x = modulo(table.get(block * l - 2), m);
                    let y = modulo(table.get(block * l - 1), m);
                    let want = (
                        modulo(table.get(block * l + block - 2), m),
                        modulo(table.get(block * l + block - 1), m),
                    );
                    assert_eq!(f.apply(x, y, ptm(l as u64)), want, "m={m} k={k} l={l}");
                }
            }
        }
    }

    #[test]
    fn h_mod_examples() {
        assert_eq!(h_mod(6, 2), 0);
        assert_eq!(h_mod(13, 3), 2);
        for m in 2..=20 {
            assert_eq!(h_mod(0, m), 0);
        }
    }

    #[test]
    fn cascade_matches_recurrence() {
        for m in 2..=12 {
            assert_eq!(first_cascade_mismatch(m, 10_000), None, "m = {m}");
        }
    }

    #[test]
    fn residues_match_big_integers() {
        let table = TermTable::up_to(2_000);
        for m in 2..=12 {
            let r = residues(m, 2_001);
            for (n, &v) in r.iter().enumerate() {
                assert_eq!(v, modulo(table.get(n as i64), m));
                if n % 97 == 0 {
                    assert_eq!(h_mod_direct(n as u64, m), v);
                }
            }
        }
    }

    #[test]
    fn transfer_matches_direct() {
        for m in [2u32, 3, 4, 7, 12, 29] {
            let r = residues(m, 5_000);
            for n in (0..5_000).step_by(7) {
                assert_eq!(h_mod_transfer(n as u128, m), r[n], "m={m} n={n}");
            }
        }
    }

    #[test]
    fn raw_count_m3() {
        assert_eq!(Cascade::new(3).raw_state_count(), BigUint::from(118_098u32));
    }

    #[test]
    fn cascade_leading_zeros_do_not_matter() {
        let cascade = Cascade::new(5);
        let zero = cascade.step(&cascade.initial(), 0);
        assert_eq!(zero, cascade.initial());
    }

    #[test]
    fn zero_witnesses() {
        let z2 = zero_indices(2, 3, 1_000).unwrap();
        assert_eq!(z2.indices, vec![0, 3, 6]);
        let z3 = zero_indices(3, 1, 1_000).unwrap();
        assert_eq!(z3.witness, 48);
        assert!(z3.indices.contains(&48));
        assert!(z3.indices.contains(&0));
        for m in 2..=12 {
            assert!(zero_indices(m, 1, 100).unwrap().indices.contains(&0));
        }
        let z29 = zero_indices(29, 5, 1_000_000).unwrap();
        assert_eq!(z29.witness, (1u128 << 69) - (1 << 17));
    }

    #[test]
    fn morphism_prefixes() {
        assert_eq!(residues(3, 16), M3_BLOCK_PLUS.to_vec());
        assert_eq!(residues(3, 32)[16..], M3_BLOCK_MINUS);
        assert!(morphism_check_m3(16).unwrap());
        assert!(morphism_check_m3(32).unwrap());
        assert!(morphism_check_m3(10_000).unwrap());
        assert!(morphism_check_m3((1 << 16) + 1).is_err());
    }

    #[test]
    fn small_cascades() {
        let a3 = build_cascade(3).unwrap();
        assert_eq!(a3.minimize().num_states(), 28);
        assert_eq!(a3.minimize().reverse_direction().minimize().num_states(), 22);
        let a4 = build_cascade(4).unwrap();
        assert_eq!(a4.minimize().num_states(), 80);
        assert!(matches!(Cascade::new(5).to_dfao(1_000), Err(Error::StateLimit { .. })));
    }

    proptest! {
        #[test]
        fn cascade_eval_matches_transfer(n in 0u128..(1u128 << 100), m in 2u32..40) {
            prop_assert_eq!(Cascade::new(m).eval(n), h_mod_transfer(n, m));
        }
    }
}
