use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use commlb::bounds::{self, verify_certificate, BoundResult, CertificateMode, Limits};
use commlb::constructions::{self, PruneResult};
use commlb::io::{self, RelationFile};
use commlb::measures::renyi_inf_cost;
use commlb::protocols::{enumerate_zero_error, SEARCH_ALPHABET_CAP};
use commlb::pseudotranscript::{channel_of, pseudotranscript_error};
use commlb::rational::{self, Rational};
use commlb::{ErrorFn, InputDistribution, Relation};

/// Lower bounds for two-party communication complexity.
#[derive(Parser)]
#[command(name = "commlb", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Partition bound prt(f, E): exact cover, per-cell error at most E.
    Prt(BoundArgs),
    /// Relaxed partition bound: cover at most 1, per-cell error at most eps.
    RelaxedPrt(BoundArgs),
    /// Distributional relaxed partition bound: average error under mu.
    RelaxedPrtMu(BoundArgs),
    /// Cut a pseudotranscript into an exact-cover tiling.
    Slice(SliceArgs),
    /// Turn an exact-cover tiling into a pseudotranscript.
    Lift(LiftArgs),
    /// Prune a sliced pseudotranscript into a relaxed-partition certificate.
    Prune(PruneArgs),
    /// Compare the bounds and the deterministic communication complexity.
    Report(ReportArgs),
}

#[derive(Args)]
struct Common {
    /// Error bound as "p/q"; overrides the relation file's error field.
    #[arg(long)]
    eps: Option<String>,
    /// Input distribution file, or "uniform".
    #[arg(long)]
    mu: Option<String>,
    /// Print machine-readable JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct BoundArgs {
    /// Relation file.
    relation: PathBuf,
    #[command(flatten)]
    common: Common,
    /// Write the optimal tiling certificate here.
    #[arg(long, value_name = "PATH")]
    emit_cert: Option<PathBuf>,
}

#[derive(Args)]
struct SliceArgs {
    relation: PathBuf,
    /// Pseudotranscript file.
    pseudotranscript: PathBuf,
    /// Write the tiling certificate here.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct LiftArgs {
    relation: PathBuf,
    /// Tiling certificate file.
    certificate: PathBuf,
    /// Write the pseudotranscript here.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct PruneArgs {
    relation: PathBuf,
    pseudotranscript: PathBuf,
    /// Error budget delta in (0, 1], as "p/q".
    #[arg(long)]
    delta: String,
    /// Input distribution file, or "uniform" (the default).
    #[arg(long)]
    mu: Option<String>,
    /// Write the JSON report here.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ReportArgs {
    relation: PathBuf,
    #[command(flatten)]
    common: Common,
    /// Bit budget for the deterministic protocol search.
    #[arg(long, default_value_t = 4)]
    max_bits: usize,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

/// `Ok(false)` when everything was computed but a check failed.
fn run(cli: Cli) -> Result<bool> {
    let limits = limits()?;
    match cli.command {
        Command::Prt(a) => bound_cmd("prt", a, &limits),
        Command::RelaxedPrt(a) => bound_cmd("relaxed-prt", a, &limits),
        Command::RelaxedPrtMu(a) => bound_cmd("relaxed-prt-mu", a, &limits),
        Command::Slice(a) => slice_cmd(a),
        Command::Lift(a) => lift_cmd(a),
        Command::Prune(a) => prune_cmd(a, &limits),
        Command::Report(a) => report_cmd(a, &limits),
    }
}

fn limits() -> Result<Limits> {
    let mut limits = Limits::default();
    if let Ok(v) = std::env::var("COMMLB_TILE_CAP") {
        limits.tile_cap = v
            .trim()
            .parse()
            .with_context(|| format!("COMMLB_TILE_CAP={v:?} is not a nonnegative integer"))?;
    }
    Ok(limits)
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_relation(path: &Path) -> Result<RelationFile> {
    io::parse_relation(&read(path)?).with_context(|| format!("in {}", path.display()))
}

fn load_mu(arg: Option<&str>, rel: &Relation) -> Result<InputDistribution> {
    let mu = match arg {
        None | Some("uniform") => InputDistribution::uniform(rel.x_size(), rel.y_size()),
        Some(path) => io::parse_distribution(&read(Path::new(path))?)
            .with_context(|| format!("in {path}"))?,
    };
    if (mu.x_size(), mu.y_size()) != (rel.x_size(), rel.y_size()) {
        bail!(
            "distribution is {}x{} but the relation is {}x{}",
            mu.x_size(),
            mu.y_size(),
            rel.x_size(),
            rel.y_size()
        );
    }
    Ok(mu)
}

/// `--eps` wins over the file's error field, which wins over zero.
fn error_fn(file: &RelationFile, eps: Option<&str>) -> Result<ErrorFn> {
    let rel = &file.relation;
    match (eps, &file.error) {
        (Some(e), _) => Ok(ErrorFn::constant(
            rel.x_size(),
            rel.y_size(),
            rational::parse(e, "--eps")?,
        )?),
        (None, Some(e)) => Ok(e.clone()),
        (None, None) => Ok(ErrorFn::zero(rel.x_size(), rel.y_size())),
    }
}

/// The relaxed bounds take one constant; a non-constant error matrix
/// contributes its largest entry.
fn constant_eps(errfn: &ErrorFn) -> Rational {
    errfn.values().iter().max().cloned().unwrap_or_else(rational::zero)
}

fn bits(log2: f64) -> String {
    format!("{log2:.6} bits")
}

fn write_json(path: &Path, v: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(v)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn print_json(v: &Value) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn bound_cmd(name: &str, a: BoundArgs, limits: &Limits) -> Result<bool> {
    let file = load_relation(&a.relation)?;
    let rel = &file.relation;
    let errfn = error_fn(&file, a.common.eps.as_deref())?;
    let (result, mode) = match name {
        "prt" => (
            bounds::prt_with(rel, &errfn, limits)?,
            CertificateMode::Prt(errfn),
        ),
        "relaxed-prt" => {
            let eps = constant_eps(&errfn);
            (
                bounds::relaxed_prt_with(rel, &eps, limits)?,
                CertificateMode::Relaxed(eps),
            )
        }
        _ => {
            let eps = constant_eps(&errfn);
            let mu = load_mu(a.common.mu.as_deref(), rel)?;
            (
                bounds::relaxed_prt_mu_with(rel, &eps, &mu, limits)?,
                CertificateMode::RelaxedMu(eps, mu),
            )
        }
    };
    let verified = verify_certificate(rel, &result.certificate, &mode)?.pass();
    if let Some(path) = &a.emit_cert {
        write_json(path, &io::certificate_to_json(&result.certificate))?;
    }
    if a.common.json {
        let mut v = io::bound_to_json(&result);
        v["bound"] = json!(name);
        v["certificate_verified"] = json!(verified);
        print_json(&v)?;
    } else {
        println!("{name} = {}", rational::format(&result.value));
        println!("log2 = {}", bits(result.log2_value));
        println!("certificate: {} tiles, verified: {}", result.certificate.len(), yes(verified));
    }
    Ok(verified)
}

fn yes(b: bool) -> &'static str {
    if b {
        "pass"
    } else {
        "FAIL"
    }
}

fn slice_cmd(a: SliceArgs) -> Result<bool> {
    let rel = load_relation(&a.relation)?.relation;
    let q = io::parse_pseudotranscript(&read(&a.pseudotranscript)?)
        .with_context(|| format!("in {}", a.pseudotranscript.display()))?;
    let s = constructions::slice(&rel, &q)?;
    let argument = q.renyi_argument();
    let errfn = ErrorFn::from_values(rel.x_size(), rel.y_size(), pseudotranscript_error(&rel, &q)?)?;
    let report = verify_certificate(&rel, &s.weighting, &CertificateMode::Prt(errfn))?;
    let ok = report.pass() && s.total == argument;
    if let Some(path) = &a.out {
        write_json(path, &io::certificate_to_json(&s.weighting))?;
    }
    if a.json {
        print_json(&json!({
            "renyi_argument": rational::format(&argument),
            "total_weight": rational::format(&s.total),
            "exact_cover": report.pass(),
            "certificate": io::certificate_to_json(&s.weighting),
        }))?;
    } else {
        println!("I-inf argument = {}", rational::format(&argument));
        println!("I-inf = {}", bits(rational::log2(&argument)));
        println!("tiles = {}", s.weighting.len());
        println!("total weight = {}", rational::format(&s.total));
        println!("exact cover with the pseudotranscript's error: {}", yes(report.pass()));
    }
    Ok(ok)
}

fn lift_cmd(a: LiftArgs) -> Result<bool> {
    let rel = load_relation(&a.relation)?.relation;
    let w = io::parse_certificate(&read(&a.certificate)?)
        .with_context(|| format!("in {}", a.certificate.display()))?;
    let q = constructions::lift(&rel, &w)?;
    let argument = renyi_inf_cost(&channel_of(&q))
        .exact_argument
        .unwrap_or_else(rational::zero);
    let ok = argument == w.total();
    if let Some(path) = &a.out {
        write_json(path, &io::pseudotranscript_to_json(&q))?;
    }
    if a.json {
        print_json(&json!({
            "renyi_argument": rational::format(&argument),
            "total_weight": rational::format(&w.total()),
            "pseudotranscript": io::pseudotranscript_to_json(&q),
        }))?;
    } else {
        println!("outcomes = {}", q.outcomes().len());
        println!("I-inf argument = {}", rational::format(&argument));
        println!("I-inf = {}", bits(rational::log2(&argument)));
    }
    Ok(ok)
}

fn prune_cmd(a: PruneArgs, limits: &Limits) -> Result<bool> {
    let rel = load_relation(&a.relation)?.relation;
    let q = io::parse_pseudotranscript(&read(&a.pseudotranscript)?)
        .with_context(|| format!("in {}", a.pseudotranscript.display()))?;
    let mu = load_mu(a.mu.as_deref(), &rel)?;
    let delta = rational::parse(&a.delta, "--delta")?;
    let r = constructions::prune_with(&rel, &q, &mu, &delta, limits)?;
    let report = io::prune_report_json(&r);
    if let Some(path) = &a.out {
        write_json(path, &report)?;
    }
    if a.json {
        print_json(&report)?;
    } else {
        print_prune(&r);
    }
    Ok(r.all_pass())
}

fn print_prune(r: &PruneResult) {
    println!("delta = {}", rational::format(&r.delta));
    println!("I(XY;Q) = {}", bits(r.information));
    println!("Delta = {:.6}", r.big_delta);
    println!("epsilon = {}", rational::format(&r.epsilon));
    println!("bad pairs = {}", r.bad_set.len());
    if r.trivial {
        println!("single-cell domain: the bound holds trivially");
    }
    println!(
        "[{}] missing mass: {} <= {}",
        yes(r.missing_mass.pass),
        rational::format(&r.removed_mass),
        rational::format(&r.delta)
    );
    println!(
        "[{}] tile bound: {:.6} <= {:.6}",
        yes(r.tile_bound.pass),
        r.tile_bound.lhs,
        r.tile_bound.rhs
    );
    println!(
        "[{}] pruned certificate: average error {} <= {}",
        yes(r.feasible),
        rational::format(&r.pruned_error),
        rational::format(&(&r.epsilon + &r.delta))
    );
    println!(
        "[{}] final inequality: {:.6} <= {:.6} (relaxed-prt-mu = {})",
        yes(r.final_inequality.pass),
        r.final_inequality.lhs,
        r.final_inequality.rhs,
        rational::format(&r.relaxed_value)
    );
}

struct Row {
    name: &'static str,
    value: Option<Rational>,
    note: String,
}

impl Row {
    fn log2(&self) -> Option<f64> {
        self.value.as_ref().map(rational::log2)
    }
}

fn report_cmd(a: ReportArgs, limits: &Limits) -> Result<bool> {
    let file = load_relation(&a.relation)?;
    let rel = &file.relation;
    let errfn = error_fn(&file, a.common.eps.as_deref())?;
    let eps = constant_eps(&errfn);
    let mu = load_mu(a.common.mu.as_deref(), rel)?;

    let relaxed_mu = bounds::relaxed_prt_mu_with(rel, &eps, &mu, limits)?;
    let relaxed = bounds::relaxed_prt_with(rel, &eps, limits)?;
    let prt = bounds::prt_with(rel, &errfn, limits)?;
    let zero_error = errfn.values().iter().all(|e| e == &rational::zero());
    let small = rel.x_size().max(rel.y_size()) <= SEARCH_ALPHABET_CAP;
    let rdet = if !zero_error {
        Row { name: "R_det", value: None, note: "skipped (eps > 0)".into() }
    } else if !small {
        Row { name: "R_det", value: None, note: "skipped (size)".into() }
    } else {
        match enumerate_zero_error(rel, a.max_bits)? {
            Some((b, _)) => Row { name: "R_det", value: Some(rational::int(b as i64)), note: String::new() },
            None => Row { name: "R_det", value: None, note: format!("none <= {} bits", a.max_bits) },
        }
    };

    let value_row = |name, b: &BoundResult| Row { name, value: Some(b.value.clone()), note: String::new() };
    let rows = [
        value_row("relaxed-prt^mu", &relaxed_mu),
        value_row("relaxed-prt", &relaxed),
        value_row("prt", &prt),
        rdet,
    ];

    // log relaxed-prt^mu <= log relaxed-prt <= log prt exactly; log prt <= R_det
    // compares prt with 2^R_det.
    let mut violations = Vec::new();
    if relaxed_mu.value > relaxed.value {
        violations.push("relaxed-prt^mu > relaxed-prt");
    }
    if relaxed.value > prt.value {
        violations.push("relaxed-prt > prt");
    }
    if let Some(r) = &rows[3].value {
        let bits: u32 = r.to_integer().try_into().unwrap_or(u32::MAX);
        let bound = (0..bits).fold(rational::int(1), |acc, _| acc * rational::int(2));
        if prt.value > bound {
            violations.push("log prt > R_det");
        }
    }

    if a.common.json {
        let table: Vec<Value> = rows
            .iter()
            .map(|r| {
                json!({
                    "measure": r.name,
                    "value": r.value.as_ref().map(rational::format),
                    "log2": if r.name == "R_det" { r.value.as_ref().map(rational::to_f64) } else { r.log2() },
                    "note": r.note,
                })
            })
            .collect();
        print_json(&json!({
            "epsilon": rational::format(&eps),
            "rows": table,
            "violations": violations,
            "ordering_holds": violations.is_empty(),
        }))?;
    } else {
        println!("epsilon = {}", rational::format(&eps));
        println!("{:<20} {:>12} {:>10}", "measure", "value", "bits");
        for r in &rows {
            match (&r.value, r.name) {
                (Some(v), "R_det") => println!("{:<20} {:>12} {:>10.3}", r.name, rational::format(v), rational::to_f64(v)),
                (Some(v), _) => println!(
                    "{:<20} {:>12} {:>10.3}",
                    r.name,
                    rational::format(v),
                    r.log2().unwrap_or(f64::NAN)
                ),
                (None, _) => println!("{:<20} {:>12} {:>10}", r.name, "-", r.note),
            }
        }
        let rdet_text = match &rows[3].value {
            Some(v) => rational::format(v),
            None => rows[3].note.clone(),
        };
        println!("log prt = {:.3}, R_det = {}", prt.log2_value, rdet_text);
        if violations.is_empty() {
            println!("ordering: holds");
        } else {
            println!("ordering: VIOLATED ({})", violations.join("; "));
        }
    }
    Ok(violations.is_empty())
}
