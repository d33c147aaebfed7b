//! The complete verification battery.
//!
//! Checks are split into theorem checks, which decide the overall verdict,
//! and conjecture scans, which are recorded only. The report contains no
//! timings or other run-dependent data, so equal configurations give
//! byte-identical JSON whatever the degree of parallelism.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::automata::{kernel_of_slice, Dfao, Direction};
use crate::conjectures;
use crate::contfrac;
use crate::error::{Error, Result};
use crate::identities::{self, IdentityBounds};
use crate::modauto::{self, find_period, residues, Cascade, PeriodPair};
use crate::sequence::{sign_closed, Sign, Terms};
use crate::series::{self, MahlerData};

/// Bounds and options for [`verify_all`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    /// Sign closed form and non-vanishing are checked up to here.
    pub sign_max: u64,
    /// Cascade automata are compared with the recurrence up to here.
    pub automaton_max: u64,
    pub automaton_moduli: Vec<u32>,
    pub morphism_prefix: usize,
    pub zero_m_max: u32,
    pub zero_count: usize,
    pub zero_scan: u64,
    pub identities: IdentityBounds,
    pub cf_max: u64,
    pub series_order: usize,
    pub mahler_order: usize,
    pub probe_degree: usize,
    pub coverage_m_max: u32,
    pub coverage_bound: u64,
    pub growth_n: u64,
    pub ratio_k_max: u32,
    pub ratio_max: u64,
    pub power_moduli: Vec<u32>,
    pub power_max: u64,
    pub fib_value_bound: u64,
    pub fib_index_bound: u64,
    pub divisibility_n_max: u32,
    pub kernel_max_i: u32,
    /// Worker threads; results do not depend on it and it is left out of
    /// serialized reports.
    #[serde(skip_serializing, default = "default_parallelism")]
    pub parallelism: usize,
}

fn default_parallelism() -> usize {
    4
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            sign_max: 100_000,
            automaton_max: 100_000,
            automaton_moduli: vec![2, 3, 4],
            morphism_prefix: 10_000,
            zero_m_max: 50,
            zero_count: 5,
            zero_scan: 1_000_000,
            identities: IdentityBounds::default(),
            cf_max: 10_000,
            series_order: 1024,
            mahler_order: 256,
            probe_degree: 64,
            coverage_m_max: 100,
            coverage_bound: 1_000_000,
            growth_n: 100_000,
            ratio_k_max: 7,
            ratio_max: 100_000,
            power_moduli: vec![2, 3, 5],
            power_max: 10_000,
            fib_value_bound: 1_000_000,
            fib_index_bound: 100_000,
            divisibility_n_max: 4,
            kernel_max_i: 6,
            parallelism: default_parallelism(),
        }
    }
}

impl RunConfig {
    /// Defaults with every index bound capped at `max`, never below the
    /// smallest value the corresponding check accepts.
    pub fn capped(max: u64) -> Self {
        let d = RunConfig::default();
        let cap = |v: u64, floor: u64| v.min(max).max(floor);
        let cap32 = |v: u32, floor: u32| v.min(max.min(u32::MAX as u64) as u32).max(floor);
        RunConfig {
            sign_max: cap(d.sign_max, 10),
            automaton_max: cap(d.automaton_max, 10),
            morphism_prefix: cap(d.morphism_prefix as u64, 16) as usize,
            zero_m_max: cap32(d.zero_m_max, 2),
            identities: IdentityBounds {
                odd_reduction: cap(d.identities.odd_reduction, 1),
                four_n: cap(d.identities.four_n, 1),
                ptm_free: cap(d.identities.ptm_free, 5),
                quartic: cap(d.identities.quartic, 1),
                summations: cap(d.identities.summations, 1),
                matrix: d.identities.matrix.min(max as u32).max(1),
                sum_of_squares: d.identities.sum_of_squares.min(max as u32),
            },
            cf_max: cap(d.cf_max, 5),
            series_order: cap(d.series_order as u64, 64) as usize,
            mahler_order: d.mahler_order,
            probe_degree: cap(d.probe_degree as u64, 32) as usize,
            coverage_m_max: cap32(d.coverage_m_max, 2),
            coverage_bound: cap(d.coverage_bound, 10_000),
            growth_n: cap(d.growth_n, 1_000),
            ratio_k_max: d.ratio_k_max,
            ratio_max: cap(d.ratio_max, 16 << d.ratio_k_max),
            power_max: cap(d.power_max, 11),
            fib_index_bound: cap(d.fib_index_bound, 10),
            divisibility_n_max: cap32(d.divisibility_n_max, 1),
            kernel_max_i: d.kernel_max_i.min(3),
            ..d
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    /// Decides the verdict.
    Theorem,
    /// Recorded only.
    Conjecture,
}

/// One entry of the report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub id: String,
    pub kind: CheckKind,
    pub passed: bool,
    /// First failing index or similar, when a check fails.
    pub witness: Option<String>,
    pub detail: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub config: RunConfig,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

impl SuiteReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn check(&self, id: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.id == id)
    }

    /// Failing theorem checks.
    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| c.kind == CheckKind::Theorem && !c.passed)
    }
}

fn theorem(id: &str, passed: bool, witness: Option<String>, detail: Value) -> CheckResult {
    CheckResult { id: id.to_string(), kind: CheckKind::Theorem, passed, witness, detail }
}

fn conjecture(id: &str, passed: bool, witness: Option<String>, detail: Value) -> CheckResult {
    CheckResult { id: id.to_string(), kind: CheckKind::Conjecture, passed, witness, detail }
}

/// `h_0 ..= h_19`.
pub const FIRST_TERMS: [i64; 20] = [0, 1, -1, 0, -1, -1, -2, 1, -3, -2, -5, 3, -2, 5, -7, -2, -5, -7, -12, 5];

fn check_terms() -> CheckResult {
    let got: Vec<BigInt> = Terms::new().take(20).map(|t| t.value).collect();
    let want: Vec<BigInt> = FIRST_TERMS.iter().map(|&v| BigInt::from(v)).collect();
    let witness = got.iter().zip(&want).position(|(a, b)| a != b).map(|i| i.to_string());
    theorem("terms-prefix", witness.is_none(), witness, json!({ "count": 20 }))
}

fn check_signs(max: u64) -> CheckResult {
    let mut sign_failure = None;
    let mut zero_failure = None;
    for t in Terms::new().take(max as usize + 1) {
        let n = t.index as u64;
        let s = Sign::of(&t.value);
        if sign_failure.is_none() && s != sign_closed(n) {
            sign_failure = Some(n);
        }
        if zero_failure.is_none() && n >= 4 && s == Sign::Zero {
            zero_failure = Some(n);
        }
    }
    let witness = sign_failure.or(zero_failure).map(|n| n.to_string());
    theorem(
        "sign-closed-form",
        witness.is_none(),
        witness,
        json!({ "max_n": max, "sign_mismatch": sign_failure, "zero_from_4": zero_failure }),
    )
}

fn check_periods() -> CheckResult {
    let p3 = find_period(3);
    let p4 = find_period(4);
    let p2 = find_period(2);
    let ok = p3 == PeriodPair { p: 4, q: 1 } && p4 == PeriodPair { p: 2, q: 4 };
    theorem("step-function-period", ok, None, json!({ "m2": p2, "m3": p3, "m4": p4 }))
}

fn first_disagreement(a: &Dfao, direct: &[u32]) -> Option<u64> {
    (0..direct.len() as u64).find(|&n| a.run(n) != direct[n as usize] as i64)
}

fn check_cascade(config: &RunConfig) -> Result<CheckResult> {
    let raw_m3 = Cascade::new(3).raw_state_count().to_string();
    let a3 = modauto::build_cascade(3)?;
    let msb3 = a3.minimize();
    let lsb3 = msb3.reverse_direction().minimize();
    let a4 = modauto::build_cascade(4)?;
    let msb4 = a4.minimize();
    let lsb4 = msb4.reverse_direction().minimize();
    let mut ok = raw_m3 == "118098" && msb3.num_states() <= 28 && lsb3.num_states() == 22 && msb4.num_states() == 80;
    let mut witness = None;
    let mut per_modulus = Vec::new();
    for &m in &config.automaton_moduli {
        let built = modauto::build_cascade(m)?;
        let minimal = built.minimize();
        let reversed = minimal.reverse_direction();
        let direct = residues(m, config.automaton_max as usize + 1);
        let bad = [&built, &minimal, &reversed].iter().find_map(|a| first_disagreement(a, &direct));
        let lz = built.is_leading_zero_invariant() && minimal.is_leading_zero_invariant();
        if let Some(n) = bad {
            witness.get_or_insert(format!("m={m} n={n}"));
        }
        ok &= bad.is_none() && lz && reversed.direction() == Direction::LsbFirst;
        per_modulus.push(json!({
            "m": m,
            "reachable": built.num_states(),
            "minimal_msb": minimal.num_states(),
            "minimal_lsb": reversed.minimize().num_states(),
            "agrees_to": config.automaton_max,
            "leading_zero_invariant": lz,
        }));
    }
    Ok(theorem(
        "cascade-automaton",
        ok,
        witness,
        json!({
            "m3_raw_states": raw_m3,
            "m3_reachable": a3.num_states(),
            "m3_minimal_msb": msb3.num_states(),
            "m3_minimal_lsb": lsb3.num_states(),
            "m4_reachable": a4.num_states(),
            "m4_minimal_msb": msb4.num_states(),
            "m4_minimal_lsb": lsb4.num_states(),
            "moduli": per_modulus,
        }),
    ))
}

fn check_morphism(prefix: usize) -> Result<CheckResult> {
    let ok = modauto::morphism_check_m3(prefix)?;
    Ok(theorem("morphism-m3", ok, None, json!({ "prefix": prefix })))
}

fn check_zeros(config: &RunConfig) -> Result<CheckResult> {
    use rayon::prelude::*;
    let found: Vec<Result<modauto::ZeroIndices>> = (2..=config.zero_m_max)
        .into_par_iter()
        .map(|m| modauto::zero_indices(m, config.zero_count, config.zero_scan))
        .collect();
    let mut rows = Vec::new();
    let mut witness = None;
    for (m, z) in (2..=config.zero_m_max).zip(found) {
        match z {
            Ok(z) => {
                let ok = z.indices.len() >= config.zero_count && z.indices.contains(&z.witness);
                if !ok {
                    witness.get_or_insert(format!("m={m}"));
                }
                let shown: Vec<String> = z.indices.iter().map(u128::to_string).collect();
                rows.push(json!({ "m": m, "p": z.period.p, "q": z.period.q, "witness": z.witness.to_string(), "indices": shown }));
            }
            Err(e) => {
                witness.get_or_insert(format!("m={m}: {e}"));
            }
        }
    }
    Ok(theorem("zero-residues", witness.is_none(), witness, json!({ "count": config.zero_count, "moduli": rows })))
}

fn check_identities(bounds: &IdentityBounds) -> Result<Vec<CheckResult>> {
    Ok(identities::verify_all(bounds)?
        .into_iter()
        .map(|r| {
            let witness = r.failures.first().map(u64::to_string);
            let id = format!("identity-{}", r.id);
            theorem(&id, r.passed(), witness, serde_json::to_value(&r).expect("report serializes"))
        })
        .collect())
}

fn check_cf(max: u64) -> Result<CheckResult> {
    let scan = contfrac::scan(max)?;
    let witness = [&scan.nonregular_failures, &scan.regular_failures, &scan.digit_failures, &scan.case_failures]
        .iter()
        .find_map(|v| v.first())
        .map(u64::to_string);
    Ok(theorem(
        "continued-fractions",
        scan.passed(),
        witness,
        json!({
            "max_n": max,
            "convention": scan.convention,
            "nonregular_failures": scan.nonregular_failures,
            "regular_failures": scan.regular_failures,
            "digit_failures": scan.digit_failures,
            "case_failures": scan.case_failures,
            "unclassified": scan.unclassified,
        }),
    ))
}

fn check_series(config: &RunConfig, data: &str) -> Result<Vec<CheckResult>> {
    let order = config.series_order;
    let u = series::verify_u_closed_form(order)?;
    let t_res = series::t_mahler_residual(order)?;
    let frob = series::frobenius_check_mod2(order)?;
    let mut out = vec![
        theorem("series-u-closed-form", u, None, json!({ "order": order })),
        theorem("series-t-mahler", t_res.is_zero(), t_res.first_nonzero().map(|i| i.to_string()), json!({ "order": order })),
        theorem("series-frobenius-mod2", frob, None, json!({ "order": order })),
    ];
    let parsed = MahlerData::from_json(data).and_then(|d| d.polynomials().map(|_| d));
    match parsed {
        Ok(data) => {
            let report = series::mahler_check_mod3(config.mahler_order, &data)?;
            let witness = report.first_nonzero.map(|i| format!("coefficient {i}"));
            out.push(theorem(
                "series-mahler-mod3",
                report.accepted(),
                witness,
                serde_json::to_value(&report).expect("report serializes"),
            ));
            let probe = series::irreducibility_probe(config.probe_degree, &data)?;
            out.push(theorem(
                "series-root-probe-mod2",
                probe.roots == 0,
                None,
                serde_json::to_value(&probe).expect("report serializes"),
            ));
        }
        Err(e) => {
            out.push(theorem("series-mahler-mod3", false, Some(e.to_string()), Value::Null));
            out.push(theorem("series-root-probe-mod2", false, Some(e.to_string()), Value::Null));
        }
    }
    Ok(out)
}

fn check_conjectures(config: &RunConfig) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();

    let coverage = conjectures::coverage_table(config.coverage_m_max, config.coverage_bound)?;
    let incomplete: Vec<u32> = coverage.iter().filter(|r| !r.complete).map(|r| r.m).collect();
    let expected: Vec<u32> =
        conjectures::KNOWN_INCOMPLETE.iter().copied().filter(|&m| m <= config.coverage_m_max).collect();
    let coverage_detail = json!({ "m_max": config.coverage_m_max, "scan_bound": config.coverage_bound, "incomplete": incomplete });
    // the exceptional set up to 100 is a checked fact at the bound 10^6
    if config.coverage_bound >= 1_000_000 {
        let ok = incomplete == expected;
        out.push(theorem("residue-coverage", ok, (!ok).then(|| format!("{incomplete:?}")), coverage_detail));
    } else {
        out.push(conjecture("residue-coverage", incomplete == expected, None, coverage_detail));
    }

    let g = conjectures::growth_estimate(config.growth_n)?;
    out.push(conjecture(
        "growth-constant",
        (1.142..=1.162).contains(&g),
        None,
        json!({ "n": config.growth_n, "estimate": format!("{g:.6}") }),
    ));

    let table = conjectures::ratio_table(config.ratio_k_max, config.ratio_max)?;
    let mut ratio_ok = true;
    let mut records = Vec::new();
    for r in table.iter().filter(|r| r.i == 0) {
        let expected = conjectures::CONJECTURED_C.get(r.k as usize).copied();
        ratio_ok &= expected.is_none_or(|e| e == r.min_ratio);
        records.push(json!({ "k": r.k, "i": 0, "min": r.min_ratio, "argmin_n": r.argmin_n, "conjectured": expected }));
    }
    out.push(conjecture(
        "ratio-minima",
        ratio_ok,
        None,
        json!({ "scan_bound": config.ratio_max, "progressions": table.len(), "i0": records }),
    ));

    let mut power_ok = true;
    let mut power_rows = Vec::new();
    for &m in &config.power_moduli {
        let v = conjectures::power_char_violation(m, config.power_max.max(2 * m as u64 + 1))?;
        power_ok &= v.is_none();
        power_rows.push(json!({ "m": m, "first_violation": v }));
    }
    out.push(conjecture("power-sign-law", power_ok, None, json!({ "max_n": config.power_max, "moduli": power_rows })));

    let found = conjectures::fib_intersection(&BigInt::from(config.fib_value_bound), config.fib_index_bound)?;
    let shown: Vec<String> = found.iter().map(BigInt::to_string).collect();
    let fib_ok = found == [0, 1, 3, 5].map(BigInt::from);
    out.push(conjecture(
        "fibonacci-intersection",
        fib_ok,
        None,
        json!({ "value_bound": config.fib_value_bound, "index_bound": config.fib_index_bound, "values": shown }),
    ));

    let [even, odd] = identities::ptm_free_fibonacci(config.identities.ptm_free)?;
    out.push(conjecture(
        "fibonacci-ptm-free",
        even.passed(),
        odd.failures.first().map(u64::to_string),
        json!({
            "even": { "checked": even.checked, "failures": even.failures.len() },
            "odd": { "checked": odd.checked, "failures": odd.failures.len() },
        }),
    ));

    let mut div_rows = Vec::new();
    let mut first_ok = true;
    for n in 1..=config.divisibility_n_max {
        let r = conjectures::check_divisibility_conjecture(n)?;
        first_ok &= r.first;
        div_rows.push(serde_json::to_value(&r).expect("record serializes"));
    }
    out.push(conjecture("divisibility", first_ok, None, json!({ "records": div_rows })));

    let prefix = 64usize;
    let needed = (1usize << config.kernel_max_i) * prefix;
    let digits = contfrac::leading_digit_sequence(needed.max(5) as u64)?;
    // a(n) is defined from n = 5; indices 0..5 are padded with zero
    let padded: Vec<i64> = std::iter::repeat_n(0, 5).chain(digits.iter().map(|&d| d as i64)).collect();
    let counts: Vec<usize> = (1..=config.kernel_max_i)
        .map(|i| kernel_of_slice(&padded, 2, i, prefix).map(|r| r.distinct_subsequences))
        .collect::<Result<_>>()?;
    out.push(conjecture("leading-digit-kernel", true, None, json!({ "prefix": prefix, "counts_by_max_i": counts })));
    Ok(out)
}

/// Runs every check on a dedicated pool of `config.parallelism` threads.
/// `mahler_data` is the JSON text of the polynomial data.
pub fn verify_all_with_data(config: &RunConfig, mahler_data: &str) -> Result<SuiteReport> {
    if config.parallelism == 0 {
        return Err(Error::Precondition("parallelism must be positive".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.parallelism)
        .build()
        .map_err(|e| Error::Precondition(format!("cannot start worker pool: {e}")))?;
    pool.install(|| -> Result<SuiteReport> {
        let mut checks = vec![check_terms(), check_signs(config.sign_max), check_periods()];
        let ((cascade, zeros), (idents, cf)) = rayon::join(
            || (check_cascade(config), check_zeros(config)),
            || (check_identities(&config.identities), check_cf(config.cf_max)),
        );
        checks.push(cascade?);
        checks.push(check_morphism(config.morphism_prefix)?);
        checks.push(zeros?);
        checks.extend(idents?);
        checks.push(cf?);
        checks.extend(check_series(config, mahler_data)?);
        checks.extend(check_conjectures(config)?);
        let passed = checks.iter().all(|c| c.kind != CheckKind::Theorem || c.passed);
        Ok(SuiteReport { config: config.clone(), passed, checks })
    })
}

/// [`verify_all_with_data`] with the bundled polynomial data.
pub fn verify_all(config: &RunConfig) -> Result<SuiteReport> {
    verify_all_with_data(config, series::MAHLER_MOD3_JSON)
}
