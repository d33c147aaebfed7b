//! `tmfib`: command-line front end for `tmfib-core`.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use tmfib_core::conjectures;
use tmfib_core::contfrac;
use tmfib_core::identities::{self, IdentityBounds};
use tmfib_core::modauto::{self, Cascade, DEFAULT_STATE_LIMIT};
use tmfib_core::sequence::{partial_sums, run_scan};
use tmfib_core::series::{self, MahlerData};
use tmfib_core::suite::{self, CheckKind};
use tmfib_core::{sign_closed, Dfao, Direction, RunConfig, RunKind, Sign, Terms};

#[derive(Parser)]
#[command(name = "tmfib", version, about = "Exact computations with the Thue-Morse twisted Fibonacci sequence")]
struct Cli {
    /// Upper bound on worker threads for every subcommand.
    #[arg(long, global = true, env = "TMFIB_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print h_n for a range of indices.
    Terms {
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        start: i64,
        #[arg(long, default_value_t = 20)]
        count: usize,
    },
    /// Print sign(h_n) for n <= max, or compare it with the closed form.
    Signs {
        #[arg(long, default_value_t = 100)]
        max: u64,
        #[arg(long)]
        verify: bool,
    },
    /// Print the partial sums h_0 + ... + h_n.
    PartialSums {
        #[arg(long, default_value_t = 100)]
        max: u64,
    },
    /// List the indices where a sign or monotone run starts.
    Runs {
        #[arg(long, default_value_t = 10_000)]
        max: u64,
        /// One of neg-run-5, neg-run-6, pos-run-3, inc-run-3, inc-run-4, dec-run-4, dec-run-5.
        #[arg(long)]
        kind: String,
    },
    #[command(subcommand)]
    Automaton(AutomatonCommand),
    #[command(subcommand)]
    Modauto(ModautoCommand),
    #[command(subcommand)]
    Identities(IdentitiesCommand),
    #[command(subcommand)]
    Cf(CfCommand),
    #[command(subcommand)]
    Series(SeriesCommand),
    #[command(subcommand)]
    Conjecture(ConjectureCommand),
    /// Run the complete battery and write a JSON report.
    VerifyAll(VerifyAllArgs),
}

#[derive(Subcommand)]
enum AutomatonCommand {
    /// Write an automaton as DOT or JSON. Without --in, the Thue-Morse DFAO.
    Export {
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long)]
        dot: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Minimize an automaton stored as JSON.
    Minimize {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate an automaton at n. Without --in, the Thue-Morse DFAO.
    Run {
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long)]
        n: u128,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum DirectionArg {
    Msb,
    Lsb,
}

#[derive(Subcommand)]
enum ModautoCommand {
    /// Print the period pair (p, q) of the step functions modulo m.
    Period {
        #[arg(long)]
        m: u32,
    },
    /// Build the cascade automaton for h_n mod m.
    Build {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        minimize: bool,
        #[arg(long, value_enum, default_value = "msb")]
        direction: DirectionArg,
        #[arg(long, default_value_t = DEFAULT_STATE_LIMIT)]
        state_limit: usize,
        #[arg(long)]
        dot: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the cascade with the recurrence for n <= max.
    Verify {
        #[arg(long)]
        m: u32,
        #[arg(long, default_value_t = 100_000)]
        max: u64,
    },
    /// Indices with h_n = 0 mod m, including the period witness.
    Zeros {
        #[arg(long)]
        m: u32,
        #[arg(long, default_value_t = 5)]
        count: usize,
        #[arg(long, default_value_t = 1_000_000)]
        scan: u64,
    },
}

#[derive(Subcommand)]
enum IdentitiesCommand {
    /// Check every identity over its default range.
    Verify {
        /// Accepted for symmetry; every identity is always checked.
        #[arg(long)]
        all: bool,
        /// Caps every range at this value.
        #[arg(long)]
        max: Option<u64>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum CfCommand {
    /// Regular continued fraction of h_n / h_{n-1}.
    Regular {
        #[arg(long)]
        n: u64,
    },
    /// The continued fraction read off the recurrence.
    Nonregular {
        #[arg(long)]
        n: u64,
    },
    /// Check every n in 5..=max.
    Scan {
        #[arg(long, default_value_t = 10_000)]
        max: u64,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SeriesWhich {
    #[value(name = "U", alias = "u")]
    U,
    #[value(name = "T", alias = "t")]
    T,
    Mahler3,
    Frobenius2,
    Probe,
}

#[derive(Subcommand)]
enum SeriesCommand {
    /// Check one functional equation to a given order.
    Check {
        #[arg(long, value_enum)]
        which: SeriesWhich,
        #[arg(long, default_value_t = 1024)]
        order: usize,
        /// Polynomial data for mahler3 and probe.
        #[arg(long)]
        data: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum ConjectureCommand {
    /// Ratios |h_{2^k n + i + 1}| / |h_{2^k n + i}| as CSV.
    Ratios {
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 100_000)]
        max: u64,
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Print the exact minima instead of the plot data.
        #[arg(long)]
        minima: bool,
    },
    /// Residue coverage of h_n mod m.
    Coverage {
        #[arg(long, default_value_t = 100)]
        m_max: u32,
        #[arg(long, default_value_t = 1_000_000)]
        bound: u64,
    },
    /// |h_n|^{1/n} estimate.
    Growth {
        #[arg(long, default_value_t = 100_000)]
        n: u64,
    },
    /// The divisibility congruences for n <= n_max.
    Divisibility {
        #[arg(long, default_value_t = 4)]
        n_max: u32,
    },
    /// Sign law of the sequence twisted by powers of m.
    Power {
        #[arg(long)]
        m: u32,
        #[arg(long, default_value_t = 10_000)]
        max: u64,
    },
    /// Values shared by |h_n| and the Fibonacci numbers.
    Fib {
        #[arg(long, default_value_t = 1_000_000)]
        bound: u64,
        #[arg(long, default_value_t = 100_000)]
        index_bound: u64,
    },
}

#[derive(Args)]
struct VerifyAllArgs {
    /// Caps every scan bound; the default runs the full battery.
    #[arg(long)]
    max: Option<u64>,
    #[arg(long)]
    parallelism: Option<usize>,
    /// Polynomial data replacing the bundled file.
    #[arg(long)]
    data: Option<PathBuf>,
    /// No-op: nothing in the toolkit is random.
    #[arg(long)]
    seedless: bool,
    /// Directory for report.json.
    #[arg(long, env = "TMFIB_OUT_DIR")]
    out_dir: Option<PathBuf>,
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            if !text.ends_with('\n') {
                stdout.write_all(b"\n")?;
            }
            Ok(())
        }
    }
}

fn read_dfao(path: Option<&Path>) -> Result<Dfao> {
    match path {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            Ok(Dfao::from_json(&text)?)
        }
        None => Ok(Dfao::thue_morse()),
    }
}

fn read_data(path: Option<&Path>) -> Result<String> {
    match path {
        Some(p) => fs::read_to_string(p).with_context(|| format!("reading {}", p.display())),
        None => Ok(series::MAHLER_MOD3_JSON.to_string()),
    }
}

fn verdict(ok: bool, line: String) -> ExitCode {
    println!("{} {line}", if ok { "ok" } else { "FAILED" });
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn direction_of(arg: DirectionArg) -> Direction {
    match arg {
        DirectionArg::Msb => Direction::MsbFirst,
        DirectionArg::Lsb => Direction::LsbFirst,
    }
}

fn automaton(cmd: AutomatonCommand) -> Result<ExitCode> {
    match cmd {
        AutomatonCommand::Export { input, dot, out } => {
            let a = read_dfao(input.as_deref())?;
            let text = if dot { a.export_dot()? } else { a.to_json()? };
            emit(out.as_deref(), &text)?;
        }
        AutomatonCommand::Minimize { input, out } => {
            let a = read_dfao(Some(&input))?;
            let m = a.minimize();
            eprintln!("{} -> {} states", a.num_states(), m.num_states());
            emit(out.as_deref(), &m.to_json()?)?;
        }
        AutomatonCommand::Run { input, n } => {
            let a = read_dfao(input.as_deref())?;
            println!("{}", a.run_wide(n));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn modauto(cmd: ModautoCommand) -> Result<ExitCode> {
    match cmd {
        ModautoCommand::Period { m } => {
            let p = modauto::find_period(m);
            println!("m={m} p={} q={} even_q={}", p.p, p.q, p.even_q());
        }
        ModautoCommand::Build { m, minimize, direction, state_limit, dot, out } => {
            let mut a = Cascade::new(m).to_dfao(state_limit)?;
            if minimize {
                a = a.minimize();
            }
            if a.direction() != direction_of(direction) {
                a = a.reverse_direction();
                if minimize {
                    a = a.minimize();
                }
            }
            eprintln!("m={m} {} states, {}", a.num_states(), a.direction().name());
            let text = if dot { a.export_dot()? } else { a.to_json()? };
            emit(out.as_deref(), &text)?;
        }
        ModautoCommand::Verify { m, max } => {
            let bad = modauto::first_cascade_mismatch(m, max);
            let line = match bad {
                None => format!("cascade mod {m} agrees with the recurrence for n <= {max}"),
                Some(n) => format!("cascade mod {m} disagrees at n = {n}"),
            };
            return Ok(verdict(bad.is_none(), line));
        }
        ModautoCommand::Zeros { m, count, scan } => {
            let z = modauto::zero_indices(m, count, scan)?;
            println!("m={m} p={} q={} witness={}", z.period.p, z.period.q, z.witness);
            for n in &z.indices {
                println!("{n}");
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn capped_bounds(max: Option<u64>) -> IdentityBounds {
    match max {
        Some(max) => RunConfig::capped(max).identities,
        None => IdentityBounds::default(),
    }
}

fn identities_cmd(cmd: IdentitiesCommand) -> Result<ExitCode> {
    let IdentitiesCommand::Verify { all: _, max, report } = cmd;
    let reports = identities::verify_all(&capped_bounds(max))?;
    let mut ok = true;
    for r in &reports {
        ok &= r.passed();
        let first = r.failures.first().map(|n| format!(", first failure n = {n}")).unwrap_or_default();
        println!("{} {} {}..={} checked {}{first}", if r.passed() { "ok" } else { "FAILED" }, r.id, r.first, r.last, r.checked);
    }
    if let Some(path) = report {
        emit(Some(&path), &serde_json::to_string_pretty(&reports)?)?;
    }
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn cf(cmd: CfCommand) -> Result<ExitCode> {
    match cmd {
        CfCommand::Regular { n } => println!("{}", contfrac::regular_cf(n)?),
        CfCommand::Nonregular { n } => println!("{}", contfrac::nonregular_cf(n)?),
        CfCommand::Scan { max, csv } => {
            let scan = contfrac::scan(max)?;
            if let Some(path) = csv {
                emit(Some(&path), &contfrac::scan_csv(&scan))?;
            }
            let line = format!(
                "5..={max} ({}): nonregular {} regular {} digit {} case {} failures, unclassified {:?}",
                scan.convention,
                scan.nonregular_failures.len(),
                scan.regular_failures.len(),
                scan.digit_failures.len(),
                scan.case_failures.len(),
                scan.unclassified
            );
            return Ok(verdict(scan.passed(), line));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn series_cmd(cmd: SeriesCommand) -> Result<ExitCode> {
    let SeriesCommand::Check { which, order, data } = cmd;
    let (ok, line) = match which {
        SeriesWhich::U => (series::verify_u_closed_form(order)?, format!("U closed form to order {order}")),
        SeriesWhich::T => {
            let r = series::t_mahler_residual(order)?;
            (r.is_zero(), format!("T(x) = (1 - x) T(x^2) to order {order}, first nonzero {:?}", r.first_nonzero()))
        }
        SeriesWhich::Frobenius2 => (series::frobenius_check_mod2(order)?, format!("S(x^2) = S(x)^2 over Z/2 to order {order}")),
        SeriesWhich::Mahler3 => {
            let data = MahlerData::from_json(&read_data(data.as_deref())?)?;
            let r = series::mahler_check_mod3(order, &data)?;
            println!("{}", serde_json::to_string_pretty(&r)?);
            (r.accepted(), format!("mod-3 equation to order {order}, residual zero {}", r.residual_zero))
        }
        SeriesWhich::Probe => {
            let data = MahlerData::from_json(&read_data(data.as_deref())?)?;
            let r = series::irreducibility_probe(order, &data)?;
            (r.roots == 0, format!("{} polynomial roots over Z/2 of degree <= {order}", r.roots))
        }
    };
    Ok(verdict(ok, line))
}

fn conjecture(cmd: ConjectureCommand) -> Result<ExitCode> {
    match cmd {
        ConjectureCommand::Ratios { k, max, csv, minima } => {
            if minima {
                for r in conjectures::ratio_table(k, max)?.iter().filter(|r| r.k == k) {
                    println!("k={} i={} min={} at n={}", r.k, r.i, r.min_ratio, r.argmin_n);
                }
            } else {
                emit(csv.as_deref(), &conjectures::emit_ratio_plot_data(k, max)?)?;
            }
        }
        ConjectureCommand::Coverage { m_max, bound } => {
            for r in conjectures::coverage_table(m_max, bound)? {
                if !r.complete {
                    println!("m={} misses {} residues", r.m, r.m as usize - r.residues_seen.len());
                }
            }
        }
        ConjectureCommand::Growth { n } => println!("{:.6}", conjectures::growth_estimate(n)?),
        ConjectureCommand::Divisibility { n_max } => {
            for n in 1..=n_max {
                println!("{}", serde_json::to_string(&conjectures::check_divisibility_conjecture(n)?)?);
            }
        }
        ConjectureCommand::Power { m, max } => match conjectures::power_char_violation(m, max)? {
            None => println!("sign law holds for m={m}, n <= {max}"),
            Some(n) => println!("sign law fails for m={m} at n = {n}"),
        },
        ConjectureCommand::Fib { bound, index_bound } => {
            let found = conjectures::fib_intersection(&bound.into(), index_bound)?;
            let shown: Vec<String> = found.iter().map(ToString::to_string).collect();
            println!("{}", shown.join(" "));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn verify_all(args: VerifyAllArgs, threads: Option<usize>) -> Result<ExitCode> {
    let mut config = args.max.map(RunConfig::capped).unwrap_or_default();
    if let Some(p) = args.parallelism {
        config.parallelism = p;
    }
    if let Some(cap) = threads {
        config.parallelism = config.parallelism.min(cap.max(1));
    }
    let data = read_data(args.data.as_deref())?;
    let report = suite::verify_all_with_data(&config, &data)?;
    for c in &report.checks {
        let tag = match (c.kind, c.passed) {
            (CheckKind::Theorem, true) => "ok",
            (CheckKind::Theorem, false) => "FAILED",
            (CheckKind::Conjecture, true) => "holds",
            (CheckKind::Conjecture, false) => "open",
        };
        let witness = c.witness.as_deref().map(|w| format!(" (witness {w})")).unwrap_or_default();
        println!("{tag} {}{witness}", c.id);
    }
    if let Some(dir) = args.out_dir {
        fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
        emit(Some(&dir.join("report.json")), &report.to_json()?)?;
    }
    if report.passed {
        Ok(ExitCode::SUCCESS)
    } else {
        for c in report.failures() {
            eprintln!("failed: {} witness {}", c.id, c.witness.as_deref().unwrap_or("-"));
        }
        Ok(ExitCode::FAILURE)
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    if let Some(t) = cli.threads {
        if t == 0 {
            bail!("--threads must be positive");
        }
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global()?;
    }
    let mut out = BufWriter::new(io::stdout().lock());
    match cli.command {
        Command::Terms { start, count } => {
            for t in Terms::starting_at(start).take(count) {
                writeln!(out, "{} {}", t.index, t.value)?;
            }
        }
        Command::Signs { max, verify } => {
            let mut bad = None;
            for t in Terms::new().take(max as usize + 1) {
                let s = Sign::of(&t.value);
                if verify {
                    if bad.is_none() && s != sign_closed(t.index as u64) {
                        bad = Some(t.index);
                    }
                } else {
                    writeln!(out, "{} {}", t.index, s.as_i8())?;
                }
            }
            if verify {
                drop(out);
                let line = match bad {
                    None => format!("closed form matches sign(h_n) for n <= {max}"),
                    Some(n) => format!("closed form differs at n = {n}"),
                };
                return Ok(verdict(bad.is_none(), line));
            }
        }
        Command::PartialSums { max } => {
            for (n, s) in partial_sums().take(max as usize + 1) {
                writeln!(out, "{n} {s}")?;
            }
        }
        Command::Runs { max, kind } => {
            let kind = RunKind::ALL.into_iter().find(|k| k.name() == kind).with_context(|| format!("unknown run kind {kind}"))?;
            for n in run_scan(max, kind)? {
                writeln!(out, "{n}")?;
            }
        }
        Command::Automaton(cmd) => {
            drop(out);
            return automaton(cmd);
        }
        Command::Modauto(cmd) => {
            drop(out);
            return modauto(cmd);
        }
        Command::Identities(cmd) => {
            drop(out);
            return identities_cmd(cmd);
        }
        Command::Cf(cmd) => {
            drop(out);
            return cf(cmd);
        }
        Command::Series(cmd) => {
            drop(out);
            return series_cmd(cmd);
        }
        Command::Conjecture(cmd) => {
            drop(out);
            return conjecture(cmd);
        }
        Command::VerifyAll(args) => {
            drop(out);
            return verify_all(args, cli.threads);
        }
    }
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
