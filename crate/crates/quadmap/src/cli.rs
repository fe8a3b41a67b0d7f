//! Command-line front end. One subcommand per library construction, JSON on
//! stdout (CSV for the tabular commands with `--format csv`), JSON errors on
//! stderr, and byte-deterministic output for fixed input.
//!
//! Exit codes: 0 success, 1 domain error (bad mathematical input), 2 usage
//! error (unknown flags, malformed invocations, or an output format the
//! command does not support).

use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::exactnum::{parse_rational, Prime, PrimeSet, Rational};
use crate::families;
use crate::invariants::{sigma_invariants, MilnorPoint};
use crate::projmap::{Mobius, ProjPoint, QuadMap};
use crate::reduction::{bad_primes, reduce_map};
use crate::structures::{
    cycle_good_at, cycle_invariant, fixed_pair_normal_form, triple_good_at,
    two_cycle_normal_form, u_invariant, validate_fixed_pair, validate_two_cycle,
};
use crate::sunit::{covering_check, solve_unit_equation};
use crate::{Error, Result};

/// Parse `"a0,a1,a2;b0,b1,b2"` into a map, rejecting zero resultant
/// ("degenerate map").
pub fn parse_map(s: &str) -> Result<QuadMap> {
    s.parse()
}

// ---------------------------------------------------------------------------
// Argument grammar
// ---------------------------------------------------------------------------

#[derive(Parser, Debug)]
#[command(
    name = "quadmap",
    about = "Exact arithmetic for quadratic rational maps on P^1 over Q",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
}

#[derive(Args, Debug)]
struct FormatArg {
    /// Output format; CSV is available only for tabular commands.
    #[arg(long, value_enum, default_value = "json")]
    format: OutputFormat,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Milnor invariants and resultant of a map.
    Invariants {
        /// The map, as "a0,a1,a2;b0,b1,b2" with rational entries.
        #[arg(long, allow_hyphen_values = true)]
        map: String,
        #[command(flatten)]
        format: FormatArg,
    },
    /// Conjugate a map by an invertible 2x2 matrix.
    Conjugate {
        #[arg(long, allow_hyphen_values = true)]
        map: String,
        /// The matrix, as "a,b;c,d" with rational entries.
        #[arg(long, allow_hyphen_values = true)]
        pgl: String,
        #[command(flatten)]
        format: FormatArg,
    },
    /// Reduce a map modulo a prime and report the degree of the reduction.
    Reduce {
        #[arg(long, allow_hyphen_values = true)]
        map: String,
        #[arg(long)]
        prime: u64,
        #[command(flatten)]
        format: FormatArg,
    },
    /// Bad primes of a map, optionally checked against an allowed set S.
    GoodReduction {
        #[arg(long, allow_hyphen_values = true)]
        map: String,
        /// Comma-separated primes; present = also report whether all bad
        /// primes lie inside this set.
        #[arg(long = "outside-S")]
        outside_s: Option<String>,
        #[command(flatten)]
        format: FormatArg,
    },
    /// Validate a map marked with two fixed points and compute its normal
    /// form and u-invariant.
    ClassifyFixed {
        #[arg(long, allow_hyphen_values = true)]
        map: String,
        /// First marked point, as "x:y".
        #[arg(long, allow_hyphen_values = true)]
        p1: String,
        /// Second marked point, as "x:y".
        #[arg(long, allow_hyphen_values = true)]
        p2: String,
        /// Also report whether the marked structure has good reduction at
        /// this prime.
        #[arg(long)]
        prime: Option<u64>,
        #[command(flatten)]
        format: FormatArg,
    },
    /// Validate a map marked with a 2-cycle and compute its normal form and
    /// invariant.
    ClassifyCycle {
        #[arg(long, allow_hyphen_values = true)]
        map: String,
        #[arg(long, allow_hyphen_values = true)]
        p1: String,
        #[arg(long, allow_hyphen_values = true)]
        p2: String,
        #[arg(long)]
        prime: Option<u64>,
        #[command(flatten)]
        format: FormatArg,
    },
    /// Explicit families: the unit-resultant N-member family (kind cpnf) or
    /// the two-parameter fixed-point family (kind fpnf).
    Family {
        #[arg(long)]
        kind: FamilyKind,
        /// Prime p (kind cpnf).
        #[arg(long)]
        p: Option<u64>,
        /// Member count N (kind cpnf).
        #[arg(long = "N")]
        cap_n: Option<u32>,
        /// First multiplier alpha (kind fpnf), a nonzero rational.
        #[arg(long, allow_hyphen_values = true)]
        alpha: Option<String>,
        /// Target resultant beta (kind fpnf), a nonzero rational.
        #[arg(long, allow_hyphen_values = true)]
        beta: Option<String>,
        #[command(flatten)]
        format: FormatArg,
    },
    /// Verified table of the N-member family at (p, N): shared sigma1,
    /// pairwise-distinct sigma2, empty bad-prime sets.
    DensityWitness {
        #[arg(long)]
        p: u64,
        #[arg(long = "N")]
        cap_n: u32,
        #[command(flatten)]
        format: FormatArg,
    },
    /// Solve x + y = 1 in S-units with exponents bounded in absolute value.
    SunitSolve {
        /// Comma-separated primes; empty or omitted for the empty set.
        #[arg(long = "S", default_value = "")]
        s: String,
        #[arg(long)]
        bound: u32,
        #[command(flatten)]
        format: FormatArg,
    },
    /// Enumerate all S-unit normal-form triples inside a coefficient box and
    /// check every invariant against the unit-equation covering set.
    CoveringCheck {
        #[arg(long = "S", default_value = "")]
        s: String,
        #[arg(long = "coeff-bound")]
        coeff_bound: u32,
        #[arg(long = "eq-bound")]
        eq_bound: u32,
        #[command(flatten)]
        format: FormatArg,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum FamilyKind {
    Cpnf,
    Fpnf,
}

// ---------------------------------------------------------------------------
// Output shapes (field order is the byte-level contract)
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct InvariantsOut {
    sigma1: String,
    sigma2: String,
    sigma3: String,
    resultant: String,
}

#[derive(Serialize)]
struct ConjugateOut {
    map: String,
    resultant: String,
}

#[derive(Serialize)]
struct ReduceOut {
    reduced: String,
    degree: u8,
}

#[derive(Serialize)]
struct GoodReductionOut {
    bad_primes: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    good_outside_s: Option<bool>,
}

#[derive(Serialize)]
struct ClassifyOut {
    kind: &'static str,
    normal_form: String,
    u: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    prime: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    good: Option<bool>,
}

#[derive(Serialize)]
struct FamilyCpnfOut {
    kind: &'static str,
    p: u64,
    #[serde(rename = "N")]
    cap_n: u32,
    members: Vec<String>,
}

#[derive(Serialize)]
struct FamilyFpnfOut {
    kind: &'static str,
    alpha: String,
    beta: String,
    map: String,
    resultant: String,
}

#[derive(Serialize)]
struct SunitOut {
    #[serde(rename = "S")]
    s: Vec<u64>,
    bound: u32,
    solutions: Vec<[String; 2]>,
    u_values: Vec<String>,
}

#[derive(Serialize)]
struct CoveringOut {
    #[serde(rename = "S")]
    s: Vec<u64>,
    coeff_bound: u32,
    eq_bound: u32,
    covering: Vec<String>,
    fixed_pair_count: u64,
    fixed_pair_u_values: Vec<String>,
    two_cycle_count: u64,
    two_cycle_u_values: Vec<String>,
    violations: Vec<String>,
}

#[derive(Serialize)]
struct ErrorOut {
    error: String,
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

/// A finished command: JSON value (always) plus CSV lines for the tabular
/// commands.
struct Rendered {
    json: String,
    csv: Option<String>,
}

impl Rendered {
    fn json_only<T: Serialize>(value: &T) -> Rendered {
        Rendered {
            json: serde_json::to_string(value).expect("serialization cannot fail"),
            csv: None,
        }
    }

    fn with_csv<T: Serialize>(value: &T, header: &str, rows: Vec<Vec<String>>) -> Rendered {
        let mut csv = String::from(header);
        csv.push('\n');
        for row in rows {
            let cells: Vec<String> = row.iter().map(|c| csv_field(c)).collect();
            csv.push_str(&cells.join(","));
            csv.push('\n');
        }
        Rendered {
            json: serde_json::to_string(value).expect("serialization cannot fail"),
            csv: Some(csv),
        }
    }
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn rat_strings(v: &[Rational]) -> Vec<String> {
    v.iter().map(Rational::to_string).collect()
}

fn prime_list(s: &PrimeSet) -> Vec<u64> {
    s.iter().map(Prime::get).collect()
}

fn milnor_strings(m: &MilnorPoint) -> (String, String, String) {
    (
        m.sigma1().to_string(),
        m.sigma2().to_string(),
        m.sigma3().to_string(),
    )
}

// ---------------------------------------------------------------------------
// Dispatch
// ---------------------------------------------------------------------------

/// A usage-level failure discovered after flag parsing (e.g. an unsupported
/// output format or a missing kind-specific flag) exits 2 like any other
/// usage error.
enum RunError {
    Domain(Error),
    Usage(String),
}

impl From<Error> for RunError {
    fn from(e: Error) -> RunError {
        RunError::Domain(e)
    }
}

fn usage(msg: impl Into<String>) -> RunError {
    RunError::Usage(msg.into())
}

fn parse_point(s: &str) -> Result<ProjPoint> {
    s.parse()
}

fn parse_matrix(s: &str) -> Result<Mobius> {
    s.parse()
}

fn parse_prime(p: u64) -> Result<Prime> {
    Prime::new(p)
}

fn classify_common(
    kind: &'static str,
    normal_form: String,
    u: Rational,
    prime: Option<u64>,
    good: Option<bool>,
) -> ClassifyOut {
    ClassifyOut {
        kind,
        normal_form,
        u: u.to_string(),
        prime,
        good,
    }
}

fn execute(cmd: &Command) -> std::result::Result<(Rendered, OutputFormat), RunError> {
    match cmd {
        Command::Invariants { map, format } => {
            let phi = parse_map(map)?;
            let m = sigma_invariants(&phi);
            let (sigma1, sigma2, sigma3) = milnor_strings(&m);
            let out = InvariantsOut {
                sigma1,
                sigma2,
                sigma3,
                resultant: phi.resultant().to_string(),
            };
            Ok((Rendered::json_only(&out), format.format))
        }
        Command::Conjugate { map, pgl, format } => {
            let phi = parse_map(map)?;
            let f = parse_matrix(pgl)?;
            let conj = phi.conjugate(&f);
            let out = ConjugateOut {
                resultant: conj.resultant().to_string(),
                map: conj.to_string(),
            };
            Ok((Rendered::json_only(&out), format.format))
        }
        Command::Reduce { map, prime, format } => {
            let phi = parse_map(map)?;
            let p = parse_prime(*prime)?;
            let red = reduce_map(&phi, p);
            let out = ReduceOut {
                reduced: red.to_string(),
                degree: red.degree(),
            };
            Ok((Rendered::json_only(&out), format.format))
        }
        Command::GoodReduction {
            map,
            outside_s,
            format,
        } => {
            let phi = parse_map(map)?;
            let bad = bad_primes(&phi);
            let good_outside_s = match outside_s {
                Some(text) => {
                    let s: PrimeSet = text.parse()?;
                    Some(bad.is_subset(&s))
                }
                None => None,
            };
            let out = GoodReductionOut {
                bad_primes: prime_list(&bad),
                good_outside_s,
            };
            Ok((Rendered::json_only(&out), format.format))
        }
        Command::ClassifyFixed {
            map,
            p1,
            p2,
            prime,
            format,
        } => {
            let phi = parse_map(map)?;
            let p1 = parse_point(p1)?;
            let p2 = parse_point(p2)?;
            let triple = validate_fixed_pair(&phi, &p1, &p2)?;
            let (nf, _) = fixed_pair_normal_form(&triple);
            let u = u_invariant(&nf);
            let (prime_field, good) = match prime {
                Some(p) => {
                    let p = parse_prime(*p)?;
                    (Some(p.get()), Some(triple_good_at(&nf, p)))
                }
                None => (None, None),
            };
            let out = classify_common("fixed-pair", nf.to_string(), u, prime_field, good);
            Ok((Rendered::json_only(&out), format.format))
        }
        Command::ClassifyCycle {
            map,
            p1,
            p2,
            prime,
            format,
        } => {
            let phi = parse_map(map)?;
            let p1 = parse_point(p1)?;
            let p2 = parse_point(p2)?;
            let triple = validate_two_cycle(&phi, &p1, &p2)?;
            let (nf, _) = two_cycle_normal_form(&triple);
            let u = cycle_invariant(&nf);
            let (prime_field, good) = match prime {
                Some(p) => {
                    let p = parse_prime(*p)?;
                    (Some(p.get()), Some(cycle_good_at(&nf, p)))
                }
                None => (None, None),
            };
            let out = classify_common("two-cycle", nf.to_string(), u, prime_field, good);
            Ok((Rendered::json_only(&out), format.format))
        }
        Command::Family {
            kind,
            p,
            cap_n,
            alpha,
            beta,
            format,
        } => match kind {
            FamilyKind::Cpnf => {
                let p = p.ok_or_else(|| usage("--p is required for --kind cpnf"))?;
                let cap_n = cap_n.ok_or_else(|| usage("--N is required for --kind cpnf"))?;
                let prime = parse_prime(p)?;
                let members = families::cpnf_family(prime, cap_n)?;
                let member_strings: Vec<String> =
                    members.iter().map(QuadMap::to_string).collect();
                let out = FamilyCpnfOut {
                    kind: "cpnf",
                    p,
                    cap_n,
                    members: member_strings.clone(),
                };
                let rows = member_strings
                    .iter()
                    .enumerate()
                    .map(|(n, m)| vec![n.to_string(), m.clone()])
                    .collect();
                Ok((Rendered::with_csv(&out, "n,map", rows), format.format))
            }
            FamilyKind::Fpnf => {
                let alpha = alpha
                    .as_deref()
                    .ok_or_else(|| usage("--alpha is required for --kind fpnf"))?;
                let beta = beta
                    .as_deref()
                    .ok_or_else(|| usage("--beta is required for --kind fpnf"))?;
                let alpha = parse_rational(alpha)?;
                let beta = parse_rational(beta)?;
                let phi = families::fpnf_map(&alpha, &beta)?;
                let out = FamilyFpnfOut {
                    kind: "fpnf",
                    alpha: alpha.to_string(),
                    beta: beta.to_string(),
                    map: phi.to_string(),
                    resultant: phi.resultant().to_string(),
                };
                let rows = vec![vec![
                    out.alpha.clone(),
                    out.beta.clone(),
                    out.map.clone(),
                    out.resultant.clone(),
                ]];
                Ok((
                    Rendered::with_csv(&out, "alpha,beta,map,resultant", rows),
                    format.format,
                ))
            }
        },
        Command::DensityWitness { p, cap_n, format } => {
            let prime = parse_prime(*p)?;
            let witness = families::density_witness(prime, *cap_n)?;
            let rows = witness
                .rows
                .iter()
                .map(|r| {
                    vec![
                        r.n.to_string(),
                        r.sigma2.to_string(),
                        r.bad_primes.to_string(),
                    ]
                })
                .collect();
            Ok((
                Rendered::with_csv(&witness, "n,sigma2,bad_primes", rows),
                format.format,
            ))
        }
        Command::SunitSolve { s, bound, format } => {
            let s: PrimeSet = s.parse()?;
            let sols = solve_unit_equation(&s, *bound);
            let solutions: Vec<[String; 2]> = sols
                .solutions()
                .iter()
                .map(|(x, y)| [x.to_string(), y.to_string()])
                .collect();
            let out = SunitOut {
                s: prime_list(&s),
                bound: *bound,
                solutions: solutions.clone(),
                u_values: rat_strings(&sols.u_values()),
            };
            let rows = solutions.iter().map(|xy| xy.to_vec()).collect();
            Ok((Rendered::with_csv(&out, "x,y", rows), format.format))
        }
        Command::CoveringCheck {
            s,
            coeff_bound,
            eq_bound,
            format,
        } => {
            let s: PrimeSet = s.parse()?;
            let report = covering_check(&s, *coeff_bound, *eq_bound);
            let out = CoveringOut {
                s: prime_list(&report.s),
                coeff_bound: report.coeff_bound,
                eq_bound: report.eq_bound,
                covering: rat_strings(&report.covering),
                fixed_pair_count: report.fixed_pair_count,
                fixed_pair_u_values: rat_strings(&report.fixed_pair_u_values),
                two_cycle_count: report.two_cycle_count,
                two_cycle_u_values: rat_strings(&report.two_cycle_u_values),
                violations: report.violations.clone(),
            };
            Ok((Rendered::json_only(&out), format.format))
        }
    }
}

// ---------------------------------------------------------------------------
// Entry points
// ---------------------------------------------------------------------------

/// Run with explicit argv and output sinks; returns the process exit code.
/// argv\[0\] is the program name, as usual.
pub fn run_to<S: AsRef<str>>(
    argv: &[S],
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32 {
    let args = argv.iter().map(|a| a.as_ref().to_string());
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            // --help/--version are successful terminations in clap's model.
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = writeln!(stdout, "{}", e.render());
                return 0;
            }
            emit_error(stderr, &e.render().to_string());
            return 2;
        }
    };
    match execute(&cli.command) {
        Ok((rendered, format)) => match format {
            OutputFormat::Json => {
                let _ = writeln!(stdout, "{}", rendered.json);
                0
            }
            OutputFormat::Csv => match rendered.csv {
                Some(csv) => {
                    let _ = write!(stdout, "{csv}");
                    0
                }
                None => {
                    emit_error(stderr, "csv output is not available for this command");
                    2
                }
            },
        },
        Err(RunError::Domain(e)) => {
            emit_error(stderr, &e.to_string());
            1
        }
        Err(RunError::Usage(msg)) => {
            emit_error(stderr, &msg);
            2
        }
    }
}

fn emit_error(stderr: &mut dyn Write, message: &str) {
    let payload = serde_json::to_string(&ErrorOut {
        error: message.to_string(),
    })
    .expect("serialization cannot fail");
    let _ = writeln!(stderr, "{payload}");
}

/// Run against the real process streams.
pub fn run<S: AsRef<str>>(argv: &[S]) -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_to(argv, &mut stdout.lock(), &mut stderr.lock())
}
