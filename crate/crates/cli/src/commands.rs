use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser};
use serde::Serialize;
use serde_json::Value;

use qes_core::conditional::{admissible_a, closed_form_check_n01, conditional_family, termination_energy};
use qes_core::exact::exact_state;
use qes_core::models::{refute, Model};
use qes_core::oracle::{hft_check, solve_spectrum, OracleConfig};
use qes_core::{parse_rational, Error, RadialProblem, Rational, Scalar};

use crate::output::{num, read_manifest, OutputDir};
use crate::{Cli, Command};

/// Accepts decimals, integers and `p/q` fractions.
fn number(text: &str) -> std::result::Result<f64, String> {
    parse_rational(text)
        .map(|q| q.to_f64())
        .ok_or_else(|| format!("'{text}' is not a number (decimal or p/q)"))
}

fn rational(text: &str) -> std::result::Result<Rational, String> {
    parse_rational(text).ok_or_else(|| format!("'{text}' is not a number (decimal or p/q)"))
}

#[derive(Debug, Args, Serialize)]
pub struct ExactArgs {
    /// γ; fractions such as 1/3 keep the coefficients exact.
    #[arg(long, value_parser = rational, allow_hyphen_values = true)]
    #[serde(serialize_with = "as_string")]
    pub gamma: Rational,
    /// Highest radial index ν.
    #[arg(long)]
    pub nu_max: u32,
    /// Samples per eigenfunction on (0, rho_max].
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    #[arg(long, default_value_t = 8.0)]
    pub rho_max: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct ConditionalArgs {
    /// Polynomial degree n.
    #[arg(long)]
    pub n: u32,
    #[arg(long, value_parser = number, allow_hyphen_values = true)]
    pub gamma: f64,
    #[arg(long, value_parser = number, allow_hyphen_values = true)]
    pub b: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct OracleArgs {
    #[arg(long, value_parser = number, allow_hyphen_values = true)]
    pub gamma: f64,
    #[arg(long, value_parser = number, allow_hyphen_values = true, default_value = "0")]
    pub a: f64,
    #[arg(long, value_parser = number, allow_hyphen_values = true, default_value = "0")]
    pub b: f64,
    /// Number of eigenvalues.
    #[arg(long, default_value_t = 4)]
    pub states: usize,
    /// Domain truncation [default: 12 + |b| + |a|/2].
    #[arg(long)]
    pub rho_max: Option<f64>,
    /// Coarse-grid cells; the fine grid doubles this.
    #[arg(long, default_value_t = 4000)]
    pub num_points: usize,
    /// Also run the Hellmann-Feynman check for state --nu.
    #[arg(long)]
    pub hft: bool,
    #[arg(long, default_value_t = 0)]
    pub nu: usize,
    /// Finite-difference step for the Hellmann-Feynman check.
    #[arg(long, default_value_t = 1e-3)]
    pub delta: f64,
    /// Write sampled eigenfunctions.
    #[arg(long)]
    pub write_states: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct RefuteArgs {
    /// Model record (JSON, see schemas/model.schema.json).
    #[arg(long)]
    pub model: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct SweepArgs {
    #[arg(long, value_parser = number, allow_hyphen_values = true)]
    pub gamma: f64,
    #[arg(long, default_value_t = 0)]
    pub n_min: u32,
    #[arg(long)]
    pub n_max: u32,
    /// Comma-separated b values.
    #[arg(long, value_delimiter = ',', value_parser = number, allow_hyphen_values = true)]
    pub b_grid: Vec<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct ReplayArgs {
    #[arg(long)]
    pub manifest: PathBuf,
}

fn as_string<S: serde::Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&q.to_string())
}

fn params<T: Serialize>(args: &T) -> Result<BTreeMap<String, Value>> {
    match serde_json::to_value(args)? {
        Value::Object(map) => Ok(map.into_iter().collect()),
        other => bail!("unexpected parameter encoding {other}"),
    }
}

/// Drops `--out-dir` and its value so the recorded argv replays anywhere.
pub fn strip_out_dir(args: &[String]) -> Vec<String> {
    let mut out = Vec::with_capacity(args.len());
    let mut skip = false;
    for arg in args {
        if skip {
            skip = false;
        } else if arg == "--out-dir" {
            skip = true;
        } else if !arg.starts_with("--out-dir=") {
            out.push(arg.clone());
        }
    }
    out
}

pub fn run(cli: Cli, argv: Vec<String>) -> Result<()> {
    let out = OutputDir::create(&cli.out_dir)?;
    match cli.command {
        Command::Exact(args) => exact(args, out, argv),
        Command::Conditional(args) => conditional(args, out, argv),
        Command::Oracle(args) => oracle(args, out, argv),
        Command::Refute(args) => refute_cmd(args, out, argv),
        Command::Sweep(args) => sweep(args, out, argv),
        Command::Replay(args) => replay(args, cli.out_dir),
    }
}

fn exact(args: ExactArgs, mut out: OutputDir, argv: Vec<String>) -> Result<()> {
    if args.samples < 2 || !args.rho_max.is_finite() || args.rho_max <= 0.0 {
        return Err(Error::Argument("--samples must be >= 2 and --rho-max positive".into()).into());
    }
    let mut spectrum = Vec::new();
    let mut coeff_rows = Vec::new();
    println!("{:>4}  {:>24}  W (exact)", "nu", "W");
    for nu in 0..=args.nu_max {
        let state = exact_state(i64::from(nu), &args.gamma)?;
        println!("{nu:>4}  {:>24}  {}", num(state.w.to_f64()), state.w);
        spectrum.push(vec![nu.to_string(), num(state.w.to_f64()), state.w.to_string()]);
        for (j, c) in state.solution.coeffs.iter().enumerate() {
            coeff_rows.push(vec![nu.to_string(), j.to_string(), num(c.to_f64()), c.to_string()]);
        }
        let float_solution = state.solution.map(Scalar::to_f64);
        let rows: Vec<Vec<String>> = (1..=args.samples)
            .map(|k| {
                let rho = args.rho_max * k as f64 / args.samples as f64;
                vec![num(rho), num(float_solution.eval(rho))]
            })
            .collect();
        out.write_csv(&format!("exact_state_{nu}.csv"), &["rho", "F"], &rows)?;
    }
    out.write_csv("exact_spectrum.csv", &["nu", "W", "W_exact"], &spectrum)?;
    out.write_csv("exact_coefficients.csv", &["nu", "j", "c", "c_exact"], &coeff_rows)?;
    finish(out, "exact", argv, &args)
}

#[derive(Serialize)]
struct ConditionalOutput {
    family: qes_core::conditional::ConditionalFamily,
    #[serde(skip_serializing_if = "Option::is_none")]
    closed_form: Option<qes_core::conditional::ClosedFormReport>,
}

fn conditional(args: ConditionalArgs, mut out: OutputDir, argv: Vec<String>) -> Result<()> {
    let family = conditional_family(i64::from(args.n), args.gamma, args.b)?;
    println!("n = {}, gamma = {}, b = {}, W = {}", family.n, args.gamma, args.b, num(family.w));
    println!("{:>3}  {:>24}  coefficients c_0..c_n", "i", "a");
    let mut rows = Vec::new();
    for (i, (a, sol)) in family.members().enumerate() {
        let coeffs: Vec<String> = sol.coeffs.iter().map(|c| num(*c)).collect();
        println!("{:>3}  {:>24}  [{}]", i + 1, num(a), coeffs.join(", "));
        for (j, c) in sol.coeffs.iter().enumerate() {
            rows.push(vec![(i + 1).to_string(), num(a), j.to_string(), num(*c)]);
        }
    }
    for w in &family.warnings {
        eprintln!("warning: roots {:?} separated by only {:e}", w.indices, w.separation);
    }
    let closed_form = if family.n <= 1 { Some(closed_form_check_n01(args.gamma, args.b)?) } else { None };
    if let Some(report) = &closed_form {
        if !report.all_match {
            return Err(Error::Consistency("closed forms for n = 0, 1 disagree with the root finder".into()).into());
        }
    }
    out.write_csv("conditional_roots.csv", &["i", "a", "j", "c"], &rows)?;
    out.write_json("conditional.json", &ConditionalOutput { family, closed_form })?;
    finish(out, "conditional", argv, &args)
}

#[derive(Serialize)]
struct SpectrumOutput<'a> {
    problem: &'a RadialProblem,
    config: &'a OracleConfig,
    eigenvalues: &'a [f64],
    accuracy: &'a [f64],
    node_counts: &'a [usize],
    warnings: &'a [String],
}

fn oracle(args: OracleArgs, mut out: OutputDir, argv: Vec<String>) -> Result<()> {
    let problem = RadialProblem::new(args.gamma, args.a, args.b);
    let mut config = OracleConfig::for_problem(&problem);
    config.rho_max = args.rho_max.unwrap_or(config.rho_max);
    config.num_points = args.num_points;
    config.num_states = args.states;
    config.validate()?;
    let spectrum = solve_spectrum(&problem, &config)?;
    println!("{:>4}  {:>24}  {:>10}  {:>5}", "nu", "W", "accuracy", "nodes");
    let mut rows = Vec::new();
    for (nu, w) in spectrum.eigenvalues.iter().enumerate() {
        println!("{nu:>4}  {:>24}  {:>10.2e}  {:>5}", num(*w), spectrum.accuracy[nu], spectrum.node_counts[nu]);
        rows.push(vec![
            nu.to_string(),
            num(*w),
            num(spectrum.fine_eigenvalues[nu]),
            num(spectrum.accuracy[nu]),
            spectrum.node_counts[nu].to_string(),
        ]);
    }
    for w in &spectrum.warnings {
        eprintln!("warning: {w}");
    }
    out.write_csv("oracle_spectrum.csv", &["nu", "W", "W_fine", "accuracy", "nodes"], &rows)?;
    out.write_json(
        "oracle_spectrum.json",
        &SpectrumOutput {
            problem: &problem,
            config: &config,
            eigenvalues: &spectrum.eigenvalues,
            accuracy: &spectrum.accuracy,
            node_counts: &spectrum.node_counts,
            warnings: &spectrum.warnings,
        },
    )?;
    if args.write_states {
        let nodes = spectrum.states[0].nodes();
        let mut header = vec!["rho".to_string()];
        header.extend((0..spectrum.states.len()).map(|k| format!("F_{k}")));
        let rows: Vec<Vec<String>> = nodes
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let mut row = vec![num(*r)];
                row.extend(spectrum.states.iter().map(|s| num(s.values()[i])));
                row
            })
            .collect();
        let header: Vec<&str> = header.iter().map(String::as_str).collect();
        out.write_csv("oracle_states.csv", &header, &rows)?;
    }
    if args.hft {
        let report = hft_check(&problem, args.nu, args.delta, &config)?;
        println!(
            "HFT nu={}: dW/da = {} vs <1/rho> = {}; dW/db = {} vs <rho> = {}; max rel error {:.2e}{}",
            report.nu,
            num(report.dw_da_fd),
            num(report.expect_inv_rho),
            num(report.dw_db_fd),
            num(report.expect_rho),
            report.max_rel_error,
            if report.valid { "" } else { " (INVALID: state crossing)" }
        );
        out.write_json("hft.json", &report)?;
    }
    finish(out, "oracle", argv, &args)
}

fn refute_cmd(args: RefuteArgs, mut out: OutputDir, argv: Vec<String>) -> Result<()> {
    let text = std::fs::read_to_string(&args.model).with_context(|| format!("reading {}", args.model.display()))?;
    let model: Model = serde_json::from_str(&text)
        .map_err(|e| Error::Argument(format!("invalid model file {}: {e}", args.model.display())))?;
    let report = refute(&model, None)?;
    println!("model {}: claimed energy {} (scaled {})", report.model, num(report.mustafa_value), num(report.mustafa_scaled));
    println!("canonical (gamma, a, b) = ({}, {}, {}), scale {}", report.canonical.gamma, report.canonical.a, report.canonical.b, report.scale);
    println!("{:<14}  {:>24}  {:>24}", "partial", "claimed", "Hellmann-Feynman");
    for (name, claimed) in &report.mustafa_partials {
        println!("{name:<14}  {:>24}  {:>24}", num(*claimed), num(report.oracle_partials[name]));
    }
    println!(
        "nearest eigenvalue W_{} = {}, gap {} (tolerance {:.2e})",
        report.oracle_nearest_index,
        num(report.oracle_nearest_eigenvalue),
        num(report.gap),
        report.gap_tolerance
    );
    for (name, verdict) in &report.verdicts {
        println!("{name:<28} {verdict}");
    }
    out.write_json("refutation.json", &report)?;
    let mut parameters = params(&args)?;
    parameters.insert("model_record".into(), serde_json::to_value(&model)?);
    let root = out.root().display().to_string();
    let manifest = out.finish("refute", argv, parameters)?;
    println!("wrote {} artifacts to {root}", manifest.artifacts.len());
    Ok(())
}

fn sweep(args: SweepArgs, mut out: OutputDir, argv: Vec<String>) -> Result<()> {
    if args.b_grid.is_empty() {
        return Err(Error::Argument("--b-grid must list at least one value".into()).into());
    }
    if args.n_min > args.n_max {
        return Err(Error::Argument("--n-min must not exceed --n-max".into()).into());
    }
    let mut rows = Vec::new();
    for n in args.n_min..=args.n_max {
        for &b in &args.b_grid {
            let w = termination_energy(i64::from(n), &args.gamma, &b)?;
            let found = admissible_a(i64::from(n), args.gamma, b)?;
            for (i, a) in found.roots.iter().enumerate() {
                rows.push(vec![n.to_string(), (i + 1).to_string(), num(b), num(*a), num(w)]);
            }
        }
    }
    println!("{} points over n = {}..={}, {} b values", rows.len(), args.n_min, args.n_max, args.b_grid.len());
    out.write_csv("sweep.csv", &["n", "i", "b", "a", "W"], &rows)?;
    finish(out, "sweep", argv, &args)
}

fn replay(args: ReplayArgs, out_dir: PathBuf) -> Result<()> {
    let manifest = read_manifest(&args.manifest)?;
    if manifest.command == "replay" {
        bail!("refusing to replay a replay manifest");
    }
    let mut argv = vec!["qes".to_string()];
    argv.extend(manifest.argv.iter().cloned());
    let cli = Cli::try_parse_from(&argv).map_err(|e| Error::Argument(format!("manifest argv does not parse: {e}")))?;
    let cli = Cli { out_dir, ..cli };
    run(cli, manifest.argv)
}

fn finish<T: Serialize>(out: OutputDir, command: &str, argv: Vec<String>, args: &T) -> Result<()> {
    let root = out.root().display().to_string();
    let manifest = out.finish(command, argv, params(args)?)?;
    println!("wrote {} artifacts to {root}", manifest.artifacts.len());
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn out_dir_is_stripped() {
        let argv: Vec<String> = ["exact", "--out-dir", "x", "--gamma", "1", "--out-dir=y"].iter().map(|s| s.to_string()).collect();
        assert_eq!(strip_out_dir(&argv), vec!["exact", "--gamma", "1"]);
    }

    #[test]
    fn numbers_accept_fractions() {
        assert_eq!(number("1/2"), Ok(0.5));
        assert_eq!(number("-2.5"), Ok(-2.5));
        assert!(number("x").is_err());
    }
}
