//! Command-line front end. `run` returns the process exit code: 0 on
//! success, 1 when a verification fails, 2 on usage errors.

use std::ffi::OsString;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::arith::{parse_rational, product_formula, ProductKind, Rat};
use crate::asymptotics::{distance_sweep, finite_correlation, sweep, to_csv, Model};
use crate::matrices::{count_region, CountKind, MatrixError};
use crate::oracle::{count_families, count_tilings, count_weighted_tilings, Constraint, DEFAULT_BUDGET};
use crate::regions::{build_region, enumerate_specs, lgv_points, parse_positions, PathPicture, RegionKind, RegionSpec};
use crate::zeta::{verify_injection, verify_upper};

#[derive(Debug, Parser)]
#[command(name = "holey", version, about = "Exact tiling counts of holey hexagons and their asymptotics")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Debug, Args)]
struct SpecArgs {
    #[arg(long)]
    n: i64,
    #[arg(long)]
    m: i64,
    /// comma-separated left hole positions
    #[arg(long, default_value = "", allow_hyphen_values = true)]
    left: String,
    /// comma-separated right hole positions
    #[arg(long, default_value = "", allow_hyphen_values = true)]
    right: String,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KindArg {
    Lower,
    Upper,
    Full,
    Free,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModelArg {
    Bulk,
    Free,
}

impl From<ModelArg> for Model {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Bulk => Model::Bulk,
            ModelArg::Free => Model::FreeBoundary,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum HalfArg {
    Lower,
    Upper,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormulaArg {
    Box,
    Tc,
    Vs,
}

#[derive(Debug, Subcommand)]
enum Verb {
    /// Exact tiling count as JSON
    Count {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, value_enum, default_value = "full")]
        kind: KindArg,
    },
    /// Compare determinant counts with brute-force counts on every small spec
    Verify {
        #[arg(long, default_value_t = 6)]
        max_n: i64,
        #[arg(long, default_value_t = 2)]
        max_m: i64,
        #[arg(long, default_value_t = 2)]
        max_p: usize,
        /// stop at the first mismatch
        #[arg(long)]
        strict: bool,
    },
    /// Finite-size correlation report as JSON
    Correlate {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, value_enum, default_value = "bulk")]
        model: ModelArg,
    },
    /// CSV series over n (fixed holes) or over hole separation (fixed n)
    Sweep {
        #[arg(long, default_value = "", allow_hyphen_values = true)]
        left: String,
        #[arg(long, default_value = "", allow_hyphen_values = true)]
        right: String,
        /// ratio 2m/n as an exact rational, e.g. 3/2
        #[arg(long, default_value = "1")]
        xi: String,
        /// comma-separated n values
        #[arg(long, default_value = "40,80,120,160")]
        n_values: String,
        /// separations d for the family L = {-d}, R = {d} at n = the first n value
        #[arg(long)]
        distances: Option<String>,
        #[arg(long, value_enum, default_value = "bulk")]
        model: ModelArg,
    },
    /// Exhaustive injectivity check of the propagation-path map
    Zeta {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, value_enum, default_value = "lower")]
        half: HalfArg,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Evaluate a product formula
    Formulas {
        #[arg(long, value_enum)]
        which: FormulaArg,
        #[arg(long)]
        n: i64,
        #[arg(long)]
        m: i64,
    },
}

enum Failure {
    Usage(String),
    Verification(String),
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn positions(s: &str, flag: &str) -> Result<Vec<i64>, Failure> {
    parse_positions(s).ok_or_else(|| usage(format!("--{flag}: expected comma-separated integers, got {s:?}")))
}

fn spec_from(args: &SpecArgs) -> Result<RegionSpec, Failure> {
    let left = positions(&args.left, "left")?;
    let right = positions(&args.right, "right")?;
    RegionSpec::validate(args.n, args.m, &left, &right).map_err(|errs| {
        usage(errs.iter().map(|e| format!("invalid spec: {e}")).collect::<Vec<_>>().join("\n"))
    })
}

/// Runs the CLI on `args` (including the program name), writing results to
/// `out` and diagnostics to `err`.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            let _ = if code == 0 { write!(out, "{rendered}") } else { write!(err, "{rendered}") };
            return if code == 0 { 0 } else { 2 };
        }
    };
    match dispatch(cli.verb, out, err) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "{msg}");
            2
        }
        Err(Failure::Verification(msg)) => {
            let _ = writeln!(err, "{msg}");
            1
        }
    }
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(args, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

fn print_json(out: &mut dyn Write, v: &serde_json::Value) {
    let _ = writeln!(out, "{}", serde_json::to_string_pretty(v).unwrap_or_default());
}

fn dispatch(verb: Verb, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    match verb {
        Verb::Count { spec, kind } => {
            let spec = spec_from(&spec)?;
            let kind = match kind {
                KindArg::Lower => CountKind::Lower,
                KindArg::Upper => CountKind::UpperWeighted,
                KindArg::Full => CountKind::Full,
                KindArg::Free => CountKind::FreeHalf,
            };
            let result = count_region(&spec, kind).map_err(|e| match e {
                MatrixError::Inconsistent { .. } => Failure::Verification(e.to_string()),
                _ => usage(e.to_string()),
            })?;
            print_json(out, &result.to_json());
        }
        Verb::Verify { max_n, max_m, max_p, strict } => verify(max_n, max_m, max_p, strict, out)?,
        Verb::Correlate { spec, model } => {
            let spec = spec_from(&spec)?;
            let report = finite_correlation(&spec, model.into()).map_err(|e| usage(e.to_string()))?;
            let mut v = serde_json::to_value(&report).unwrap_or_default();
            v["exact_det_lower"] = json!(report.exact_lower.to_string());
            v["exact_det_upper"] = json!(report.exact_upper.to_string());
            print_json(out, &v);
        }
        Verb::Sweep { left, right, xi, n_values, distances, model } => {
            let xi: Rat = parse_rational(&xi).ok_or_else(|| usage(format!("--xi: not a rational: {xi:?}")))?;
            let ns = positions(&n_values, "n-values")?;
            let reports = match distances {
                Some(ds) => {
                    let ds = positions(&ds, "distances")?;
                    let n = *ns.first().ok_or_else(|| usage("--n-values is empty"))?;
                    let fit = distance_sweep(n, &xi, &ds, model.into()).map_err(|e| usage(e.to_string()))?;
                    let _ = writeln!(err, "slope {:.6} prefactor_ratio {:.6}", fit.slope, fit.prefactor_ratio);
                    fit.reports
                }
                None => {
                    let (l, r) = (positions(&left, "left")?, positions(&right, "right")?);
                    sweep(&l, &r, &xi, &ns, model.into()).map_err(|e| usage(e.to_string()))?
                }
            };
            let _ = write!(out, "{}", to_csv(&reports));
        }
        Verb::Zeta { spec, half, budget } => {
            let spec = spec_from(&spec)?;
            let report = match half {
                HalfArg::Lower => verify_injection(&spec, budget),
                HalfArg::Upper => verify_upper(&spec, budget),
            }
            .map_err(|e| usage(e.to_string()))?;
            print_json(out, &serde_json::to_value(&report).unwrap_or_default());
            if !report.ok {
                return Err(Failure::Verification(format!("map is not an injection on {}", report.spec)));
            }
        }
        Verb::Formulas { which, n, m } => {
            let kind = match which {
                FormulaArg::Box => ProductKind::Box,
                FormulaArg::Tc => ProductKind::TransposeComplement,
                FormulaArg::Vs => ProductKind::VerticalSymmetric,
            };
            if n < 1 || m < 0 {
                return Err(usage("formulas need n >= 1 and m >= 0"));
            }
            let v = product_formula(kind, n, m).map_err(|e| usage(e.to_string()))?;
            let _ = writeln!(out, "{v}");
        }
    }
    Ok(())
}

fn verify(max_n: i64, max_m: i64, max_p: usize, strict: bool, out: &mut dyn Write) -> Result<(), Failure> {
    let _ = writeln!(out, "{:<36} {:<8} {:>16} {:>16}  match", "spec", "kind", "formula", "oracle");
    let mut failures = 0usize;
    for n in 1..=max_n {
        for m in 1..=max_m {
            for p in 0..=max_p {
                for spec in enumerate_specs(n, m, p) {
                    for (kind, formula, oracle) in verify_rows(&spec) {
                        let ok = formula.is_some() && formula == oracle;
                        let show = |x: &Option<String>| x.clone().unwrap_or_else(|| "error".into());
                        let _ = writeln!(
                            out,
                            "{:<36} {:<8} {:>16} {:>16}  {}",
                            spec.canonical(),
                            kind,
                            show(&formula),
                            show(&oracle),
                            if ok { "yes" } else { "NO" }
                        );
                        if !ok {
                            failures += 1;
                            if strict {
                                return Err(Failure::Verification(format!("mismatch at {} ({kind})", spec.canonical())));
                            }
                        }
                    }
                }
            }
        }
    }
    if failures > 0 {
        return Err(Failure::Verification(format!("{failures} mismatches")));
    }
    Ok(())
}

/// (kind, determinant value, brute-force value) for the full region and,
/// for even n, both halves.
fn verify_rows(spec: &RegionSpec) -> Vec<(&'static str, Option<String>, Option<String>)> {
    let formula = |k| count_region(spec, k).ok().map(|r| r.value.to_string());
    let mut rows = Vec::new();
    let full = build_region(spec, RegionKind::Full).ok().and_then(|r| count_tilings(&r, DEFAULT_BUDGET).ok());
    rows.push(("full", formula(CountKind::Full), full.map(|v| v.to_string())));
    if spec.n % 2 == 0 {
        let (a, e) = lgv_points(spec, PathPicture::Lower);
        let lower = count_families(&a, &e, Constraint::AvoidDiagonal, DEFAULT_BUDGET).ok();
        rows.push(("lower", formula(CountKind::Lower), lower.map(|c| c.weighted.to_string())));
        let upper = build_region(spec, RegionKind::Upper).ok().and_then(|r| count_weighted_tilings(&r, DEFAULT_BUDGET).ok());
        rows.push(("upper", formula(CountKind::UpperWeighted), upper.map(|v| v.to_string())));
    }
    rows
}
