//! Batch command-line front end: verification, expansion, eta fitting,
//! q -> 1 limit tables, closed-form constant checks, and partition
//! congruences.
//!
//! Exit codes: 0 = all checks passed; 1 = a well-formed run whose
//! mathematical check failed (mismatch, infeasible fit, counterexample);
//! 2 = usage, parse, or I/O error. Output is deterministic: identical argv
//! produces byte-identical stdout.

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;

use qident::arith::Rational;
use qident::etasolve::{fit_eta_quotient, EtasolveError, FitResult};
use qident::numerics::{
    self, check_constants, limit_table, pi_expr_value, BigFloat, DEFAULT_PRECISION_BITS,
};
use qident::registry::{
    self, auxiliary_limits, builtin_registry, check_partition_congruence, CongruenceCheck,
    IdentityEntry, Verification,
};

const MATH_FAIL: u8 = 1;
const USAGE: u8 = 2;

#[derive(Parser)]
#[command(
    name = "qident",
    about = "Exact verification of q-series identities and their limiting constants",
    version
)]
struct Cli {
    /// Working precision in bits for numeric subcommands; overrides the
    /// QIDENT_PRECISION_BITS environment variable (default 256).
    #[arg(long, global = true)]
    precision_bits: Option<u32>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Verify catalog identities coefficientwise at a truncation order.
    Verify(VerifyArgs),
    /// Expand a DSL expression and print its coefficients.
    Expand(ExpandArgs),
    /// Fit eta-quotient exponents to a DSL expression.
    Fit(FitArgs),
    /// Tabulate (1-q)^w * value against the limiting constant.
    Limits(LimitsArgs),
    /// Check the catalogued closed-form L-value constants.
    Constants(ConstantsArgs),
    /// Scan a partition congruence p(m n + a) = 0 (mod m).
    Partition(PartitionArgs),
}

#[derive(Args)]
struct VerifyArgs {
    /// Verify every catalog entry (built-ins plus any loaded registry file).
    #[arg(long, conflicts_with = "id")]
    all: bool,
    /// Comma-separated identity ids.
    #[arg(long, value_delimiter = ',')]
    id: Vec<String>,
    /// Truncation order (default 500, or the entry's own order for
    /// registry-file identities).
    #[arg(long)]
    order: Option<usize>,
    #[arg(long)]
    json: bool,
    /// Additional identities from a JSON registry file ("format": 1).
    #[arg(long)]
    registry: Option<std::path::PathBuf>,
}

#[derive(Args)]
struct ExpandArgs {
    /// DSL expression, e.g. "eta(5)^5/eta(1)".
    expr: String,
    #[arg(long, default_value_t = 32)]
    order: usize,
    /// JSON array of coefficient strings.
    #[arg(long, conflicts_with = "csv")]
    json: bool,
    /// CSV rows: index, numerator, denominator.
    #[arg(long)]
    csv: bool,
}

#[derive(Args)]
struct FitArgs {
    /// DSL expression for the target series.
    expr: String,
    /// Comma-separated candidate periods, ascending.
    #[arg(long, value_delimiter = ',', required = true)]
    periods: Vec<usize>,
    #[arg(long, default_value_t = 200)]
    order: usize,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct LimitsArgs {
    /// Identity id with limit metadata, or the auxiliary id "eq11".
    #[arg(long)]
    id: String,
    /// Comma-separated q values in (0, 1).
    #[arg(long, value_delimiter = ',', default_value = "0.9,0.99,0.999,0.9999")]
    q: Vec<String>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ConstantsArgs {
    /// Exit 1 when any constant misses the tolerance.
    #[arg(long)]
    check: bool,
    /// Absolute tolerance, e.g. 1e-10.
    #[arg(long, default_value = "1e-10")]
    tol: String,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct PartitionArgs {
    /// Modulus and residue as "m,a", e.g. --congruence 5,4.
    #[arg(long, value_delimiter = ',', required = true)]
    congruence: Vec<u64>,
    #[arg(long, default_value_t = 200)]
    count: usize,
    #[arg(long)]
    json: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let bits = effective_bits(cli.precision_bits);
    let code = match cli.command {
        Command::Verify(args) => cmd_verify(args),
        Command::Expand(args) => cmd_expand(args),
        Command::Fit(args) => cmd_fit(args),
        Command::Limits(args) => cmd_limits(args, bits),
        Command::Constants(args) => cmd_constants(args, bits),
        Command::Partition(args) => cmd_partition(args),
    };
    ExitCode::from(code)
}

/// Flag wins over QIDENT_PRECISION_BITS, which wins over the default.
fn effective_bits(flag: Option<u32>) -> u32 {
    flag.or_else(|| {
        std::env::var("QIDENT_PRECISION_BITS")
            .ok()
            .and_then(|v| v.parse().ok())
    })
    .unwrap_or(DEFAULT_PRECISION_BITS)
}

fn fail_usage(message: impl std::fmt::Display) -> u8 {
    eprintln!("error: {message}");
    USAGE
}

/// Exact rational from a decimal/scientific literal such as "0.9999",
/// "1e-10" or "2.5e-3".
fn parse_decimal_rational(text: &str) -> Option<Rational> {
    let (mantissa, exp10) = match text.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    let negative = int_part.starts_with('-');
    let digits: String = format!("{}{}", int_part.trim_start_matches(['-', '+']), frac_part);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let numer: BigInt = digits.parse().ok()?;
    let shift = frac_part.len() as i32 - exp10;
    let ten = BigInt::from(10u32);
    let value = if shift >= 0 {
        Rational::new(numer, ten.pow(shift as u32))
    } else {
        Rational::from_integer(numer * ten.pow((-shift) as u32))
    };
    Some(if negative { -value } else { value })
}

struct CatalogItem {
    entry: IdentityEntry,
    default_order: Option<usize>,
}

fn load_catalog(registry: Option<&std::path::Path>) -> Result<Vec<CatalogItem>, String> {
    let mut items: Vec<CatalogItem> = builtin_registry()
        .into_iter()
        .map(|entry| CatalogItem {
            entry,
            default_order: None,
        })
        .collect();
    if let Some(path) = registry {
        let loaded = registry::load_user_registry(path).map_err(|e| e.to_string())?;
        items.extend(loaded.into_iter().map(|u| CatalogItem {
            entry: u.entry,
            default_order: u.default_order,
        }));
    }
    Ok(items)
}

fn cmd_verify(args: VerifyArgs) -> u8 {
    if !args.all && args.id.is_empty() {
        return fail_usage("verify requires --all or --id");
    }
    let catalog = match load_catalog(args.registry.as_deref()) {
        Ok(c) => c,
        Err(e) => return fail_usage(e),
    };
    let selected: Vec<&CatalogItem> = if args.all {
        catalog.iter().collect()
    } else {
        let mut out = Vec::new();
        for id in &args.id {
            match catalog.iter().find(|c| &c.entry.id == id) {
                Some(item) => out.push(item),
                None => return fail_usage(format!("unknown identity id {id:?}")),
            }
        }
        out
    };

    let mut code = 0u8;
    let mut json_rows = Vec::new();
    for item in selected {
        let order = args.order.or(item.default_order).unwrap_or(500);
        match registry::verify(&item.entry, order) {
            Ok(Verification::Verified) => {
                if args.json {
                    json_rows.push(format!(
                        r#"{{"id":"{}","order":{},"verified":true}}"#,
                        item.entry.id, order
                    ));
                } else {
                    println!("{}: verified (order {})", item.entry.id, order);
                }
            }
            Ok(Verification::Mismatch { index, lhs, rhs }) => {
                code = code.max(MATH_FAIL);
                if args.json {
                    json_rows.push(format!(
                        r#"{{"id":"{}","order":{},"verified":false,"mismatch":{{"index":{},"lhs":"{}","rhs":"{}"}}}}"#,
                        item.entry.id, order, index, lhs, rhs
                    ));
                } else {
                    println!(
                        "{}: MISMATCH at index {} (lhs = {}, rhs = {})",
                        item.entry.id, index, lhs, rhs
                    );
                }
            }
            Err(e) => return fail_usage(format!("{}: {e}", item.entry.id)),
        }
    }
    if args.json {
        println!("[{}]", json_rows.join(","));
    }
    code
}

fn cmd_expand(args: ExpandArgs) -> u8 {
    if args.order < 1 {
        return fail_usage("--order must be at least 1");
    }
    let series = match qident::dsl::eval_str(&args.expr, args.order) {
        Ok(s) => s,
        Err(e) => return fail_usage(e),
    };
    if args.json {
        println!("{}", series.to_json());
    } else if args.csv {
        print!("{}", series.to_csv());
    } else {
        println!("{}", series.coeff_strings().join(","));
    }
    0
}

fn cmd_fit(args: FitArgs) -> u8 {
    let target = match qident::dsl::eval_str(&args.expr, args.order) {
        Ok(s) => s,
        Err(e) => return fail_usage(e),
    };
    let result = match fit_eta_quotient(&target, &args.periods) {
        Ok(r) => r,
        Err(e @ (EtasolveError::BadCandidates | EtasolveError::InsufficientOrder { .. })) => {
            return fail_usage(e)
        }
        Err(e) => return fail_usage(e),
    };
    if args.json {
        println!("{}", result.to_json(args.order));
    } else {
        match &result {
            FitResult::Fitted(eta) => println!("fitted: {eta} (verified to order {})", args.order),
            FitResult::Infeasible(reason) => println!("infeasible: {reason:?}"),
        }
    }
    match result {
        FitResult::Fitted(_) => 0,
        FitResult::Infeasible(_) => MATH_FAIL,
    }
}

/// Limit targets: catalog entries carrying limit metadata, plus the
/// auxiliary even/odd quotient "eq11".
fn cmd_limits(args: LimitsArgs, bits: u32) -> u8 {
    let catalog = builtin_registry();
    let (expr, meta) = if let Some(entry) = registry::lookup(&catalog, &args.id) {
        match &entry.limit_meta {
            Some(meta) => (entry.rhs.clone(), meta.clone()),
            None => return fail_usage(format!("identity {:?} has no limit metadata", args.id)),
        }
    } else if let Some((_, expr, meta)) = auxiliary_limits().into_iter().find(|(n, _, _)| n == &args.id) {
        (expr, meta)
    } else {
        return fail_usage(format!("unknown limit id {:?}", args.id));
    };

    let mut q_values = Vec::new();
    for text in &args.q {
        match parse_decimal_rational(text) {
            Some(q) => q_values.push(q),
            None => return fail_usage(format!("cannot parse q value {text:?}")),
        }
    }
    let rows = match limit_table(&expr, meta.weight, &meta.constant, &q_values, bits) {
        Ok(r) => r,
        Err(e) => return fail_usage(e),
    };
    let digits = BigFloat::full_digits(bits);
    if args.json {
        let body: Vec<String> = rows
            .iter()
            .map(|r| {
                format!(
                    r#"{{"q":"{}","scaled":"{}","target":"{}","abs_err":"{}"}}"#,
                    r.q,
                    r.scaled.to_decimal(digits),
                    r.target.to_decimal(digits),
                    r.abs_err.to_decimal(digits)
                )
            })
            .collect();
        println!("[{}]", body.join(","));
    } else {
        println!(
            "id {}: weight {}, target {} = {}",
            args.id,
            meta.weight,
            meta.constant,
            pi_expr_value(&meta.constant, bits).to_decimal(24)
        );
        for r in rows {
            println!(
                "q = {}: scaled = {}  abs_err = {}",
                r.q,
                r.scaled.to_decimal(24),
                r.abs_err.to_decimal(24)
            );
        }
    }
    0
}

fn cmd_constants(args: ConstantsArgs, bits: u32) -> u8 {
    let Some(tol) = parse_decimal_rational(&args.tol).filter(|t| t > &Rational::from_integer(0.into()))
    else {
        return fail_usage(format!("cannot parse tolerance {:?}", args.tol));
    };
    let work_bits = numerics::working_precision(bits, numerics::tolerance_bits(&tol));
    let checks = match check_constants(&tol, work_bits) {
        Ok(c) => c,
        Err(e) => return fail_usage(e),
    };
    let digits = BigFloat::full_digits(work_bits);
    let mut all_pass = true;
    if args.json {
        let body: Vec<String> = checks
            .iter()
            .map(|c| {
                all_pass &= c.pass;
                format!(
                    r#"{{"id":"{}","computed":"{}","closed":"{}","abs_err":"{}","pass":{}}}"#,
                    c.id,
                    c.computed.to_decimal(digits),
                    c.closed.to_decimal(digits),
                    c.abs_err.to_decimal(digits),
                    c.pass
                )
            })
            .collect();
        println!("[{}]", body.join(","));
    } else {
        for c in &checks {
            all_pass &= c.pass;
            println!(
                "{}: {} | computed {} | abs_err {}",
                c.id,
                if c.pass { "pass" } else { "FAIL" },
                c.computed.to_decimal(24),
                c.abs_err.to_decimal(24)
            );
        }
    }
    if args.check && !all_pass {
        MATH_FAIL
    } else {
        0
    }
}

fn cmd_partition(args: PartitionArgs) -> u8 {
    let [modulus, residue] = args.congruence[..] else {
        return fail_usage("--congruence takes exactly \"modulus,residue\"");
    };
    if modulus < 2 || residue >= modulus || args.count < 1 {
        return fail_usage("require modulus >= 2, residue < modulus, count >= 1");
    }
    match check_partition_congruence(modulus, residue, args.count) {
        CongruenceCheck::Verified => {
            if args.json {
                println!(
                    r#"{{"modulus":{},"residue":{},"count":{},"verified":true}}"#,
                    modulus, residue, args.count
                );
            } else {
                println!(
                    "p({m}n+{a}) = 0 (mod {m}) verified for n = 0..{}",
                    args.count - 1,
                    m = modulus,
                    a = residue
                );
            }
            0
        }
        CongruenceCheck::Counterexample { n, value } => {
            if args.json {
                println!(
                    r#"{{"modulus":{},"residue":{},"count":{},"verified":false,"counterexample":{{"n":{},"p":"{}"}}}}"#,
                    modulus, residue, args.count, n, value
                );
            } else {
                println!(
                    "counterexample at n = {n}: p({}) = {value} (mod {modulus} != 0)",
                    modulus as usize * n + residue as usize
                );
            }
            MATH_FAIL
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_rational_parsing() {
        use qident::arith::rat;
        assert_eq!(parse_decimal_rational("0.9999"), Some(rat(9999, 10_000)));
        assert_eq!(parse_decimal_rational("1e-10"), Some(rat(1, 10_000_000_000)));
        assert_eq!(parse_decimal_rational("2.5e-3"), Some(rat(1, 400)));
        assert_eq!(parse_decimal_rational("25e2"), Some(rat(2500, 1)));
        assert_eq!(parse_decimal_rational("-0.5"), Some(rat(-1, 2)));
        assert_eq!(parse_decimal_rational("x"), None);
        assert_eq!(parse_decimal_rational(""), None);
        assert_eq!(parse_decimal_rational("."), None);
    }
}
