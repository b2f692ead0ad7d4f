//! The `coded` command line: code inspection, simulated coded runs and
//! recovery-threshold measurement.

use std::ffi::OsString;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use coded_compute::algebra::Field;
use coded_compute::codes::{Family, LinearCode};
use coded_compute::evalcodes::{hermitian_code_on, hermitian_degree_for_dim, hermitian_genus, rs_code_prefix};
use coded_compute::harness::{
    csv_header, parse_config, parse_tensor, simulate, threshold_report, CodeSpec, FaultSpec, Job, Mode, Selection,
    TensorSpec, ThresholdReport, SCHEMA_VERSION,
};
use coded_compute::scheme::JobPlan;
use coded_compute::security::{
    collusion_leakage_check, secure_threshold_report, MotherFamily, SecurePlan,
};
use coded_compute::tensors::MultilinearDecomp;
use coded_compute::Error;

#[derive(Parser, Debug)]
#[command(name = "coded", version, about = "Coded distributed computation over finite fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Inspect linear codes.
    #[command(subcommand)]
    Code(CodeCommand),
    /// Simulate a coded computation with faulty workers.
    #[command(subcommand)]
    Run(RunCommand),
    /// Measure recovery thresholds by subset enumeration.
    #[command(subcommand)]
    Measure(MeasureCommand),
}

#[derive(Subcommand, Debug)]
enum CodeCommand {
    /// Parameters, distance and generalized genus.
    Info(Opts),
    /// Schur product of two codes (or the square of one).
    HsProduct(Opts),
    /// Whether d(C1 o C2) >= d(C1) + d(C2) - n.
    CheckLogAdditive(Opts),
    /// Generalized genus n - k + 1 - d.
    Genus(Opts),
}

#[derive(Subcommand, Debug)]
enum RunCommand {
    BatchMatmul(Opts),
    GeneralMatmul(Opts),
    Tensor(Opts),
    SecureMatmul(Opts),
}

#[derive(Subcommand, Debug)]
enum MeasureCommand {
    Threshold(Opts),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OutFormat {
    Json,
    Csv,
    Text,
}

#[derive(Args, Debug, Clone)]
struct Opts {
    /// Field as p or p^m.
    #[arg(long)]
    field: Option<String>,
    /// rs:<q>:<n>:<k>, hermitian:<q>:<m>, or a family (rs, rs:<q>, hermitian:<q>); repeatable.
    #[arg(long)]
    code: Vec<String>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, default_value_t = 0)]
    stragglers: usize,
    #[arg(long, default_value_t = 0)]
    byzantine: usize,
    #[arg(long)]
    colluding: Option<usize>,
    #[arg(long)]
    padding: Option<usize>,
    /// naive:<a>x<b>x<c>, strassen, strassen^<s>, dot:<m> or trace3:<m>.
    #[arg(long)]
    tensor: Option<String>,
    /// Number of products (or real inputs in secure runs).
    #[arg(long)]
    k: Option<usize>,
    /// Block shape PxSxQ.
    #[arg(long, default_value = "2x2x2")]
    block: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// exhaustive or sampled:<trials>.
    #[arg(long, default_value = "exhaustive")]
    mode: String,
    /// Enumerate every straggler set of the given size instead of drawing one.
    #[arg(long)]
    adversarial: bool,
    #[arg(long, value_enum, default_value_t = OutFormat::Text)]
    out: OutFormat,
    #[arg(long)]
    output: Option<std::path::PathBuf>,
    /// File of key = value lines mirroring the flags; flags given on the
    /// command line take precedence.
    #[arg(long)]
    config: Option<std::path::PathBuf>,
}

/// Failure of a command, with its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { code: 2, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

/// A command's result in every output format.
struct Report {
    json: Value,
    text: String,
    csv: Option<Vec<String>>,
    ok: bool,
}

/// Runs the CLI on `argv` (including the program name), writing to `out` and
/// `err`; returns the exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let argv = match with_config(argv) {
        Ok(a) => a,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            return f.code;
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 { write!(out, "{rendered}") } else { write!(err, "{rendered}") };
            return code;
        }
    };
    match execute(&cli.command) {
        Ok((opts, report)) => match emit(&opts, &report, out) {
            Ok(()) => {
                if report.ok {
                    0
                } else {
                    1
                }
            }
            Err(f) => {
                let _ = writeln!(err, "error: {}", f.message);
                f.code
            }
        },
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

/// Inserts `--key value` pairs from a `--config` file after the subcommand
/// words, skipping keys already given on the command line.
fn with_config(argv: Vec<OsString>) -> Result<Vec<OsString>, Failure> {
    let strs: Vec<String> = argv.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let Some(i) = strs.iter().position(|a| a == "--config" || a.starts_with("--config=")) else {
        return Ok(argv);
    };
    let path = match strs[i].strip_prefix("--config=") {
        Some(p) => p.to_string(),
        None => strs.get(i + 1).cloned().ok_or_else(|| usage("--config needs a file"))?,
    };
    let text = std::fs::read_to_string(&path).map_err(|e| usage(format!("cannot read config {path}: {e}")))?;
    let given: Vec<&str> = strs
        .iter()
        .filter_map(|a| a.strip_prefix("--"))
        .map(|a| a.split('=').next().unwrap_or(a))
        .collect();
    let mut injected = Vec::new();
    for (key, value) in parse_config(&text)? {
        let key = key.replace('_', "-");
        if key == "config" || given.contains(&key.as_str()) {
            continue;
        }
        if key == "adversarial" {
            if value == "true" {
                injected.push(OsString::from("--adversarial"));
            }
            continue;
        }
        for v in value.split_whitespace() {
            injected.push(OsString::from(format!("--{key}")));
            injected.push(OsString::from(v));
        }
    }
    let at = 3.min(argv.len());
    let mut out = argv[..at].to_vec();
    out.extend(injected);
    out.extend_from_slice(&argv[at..]);
    Ok(out)
}

fn emit(opts: &Opts, report: &Report, out: &mut dyn Write) -> Result<(), Failure> {
    let body = match opts.out {
        OutFormat::Json => {
            let mut s = serde_json::to_string_pretty(&report.json).expect("report serializes");
            s.push('\n');
            s
        }
        OutFormat::Text => report.text.clone(),
        OutFormat::Csv => match &report.csv {
            Some(rows) => {
                let mut s = format!("{}\n", csv_header());
                for r in rows {
                    s.push_str(r);
                    s.push('\n');
                }
                s
            }
            None => return Err(usage("csv output is available for code info, code genus, code hs-product and measure threshold")),
        },
    };
    match &opts.output {
        Some(path) => std::fs::write(path, body)
            .map_err(|e| Failure { code: 1, message: format!("cannot write {}: {e}", path.display()) }),
        None => out
            .write_all(body.as_bytes())
            .map_err(|e| Failure { code: 1, message: e.to_string() }),
    }
}

fn execute(command: &Command) -> Result<(Opts, Report), Failure> {
    let (opts, report) = match command {
        Command::Code(c) => match c {
            CodeCommand::Info(o) => (o, code_info(o)?),
            CodeCommand::HsProduct(o) => (o, hs_product(o)?),
            CodeCommand::CheckLogAdditive(o) => (o, check_log_additive(o)?),
            CodeCommand::Genus(o) => (o, genus(o)?),
        },
        Command::Run(r) => match r {
            RunCommand::BatchMatmul(o) => (o, run_job(o, JobKind::Batch)?),
            RunCommand::GeneralMatmul(o) => (o, run_job(o, JobKind::General)?),
            RunCommand::Tensor(o) => (o, run_job(o, JobKind::Tensor)?),
            RunCommand::SecureMatmul(o) => (o, run_secure(o)?),
        },
        Command::Measure(MeasureCommand::Threshold(o)) => (o, measure(o)?),
    };
    Ok((opts.clone(), report))
}

fn versioned(command: &str, mut body: Value) -> Value {
    let mut doc = json!({ "schema_version": SCHEMA_VERSION, "command": command });
    if let (Some(d), Some(b)) = (doc.as_object_mut(), body.as_object_mut()) {
        d.append(b);
    }
    doc
}

fn field_opt(o: &Opts) -> Result<Option<Field>, Failure> {
    o.field.as_deref().map(Field::parse).transpose().map_err(Failure::from)
}

fn code_specs(o: &Opts) -> Result<Vec<CodeSpec>, Failure> {
    if o.code.is_empty() {
        return Err(usage("--code is required"));
    }
    o.code.iter().map(|c| CodeSpec::parse(c).map_err(Failure::from)).collect()
}

fn full_codes(o: &Opts) -> Result<Vec<(String, LinearCode)>, Failure> {
    let field = field_opt(o)?;
    let specs = code_specs(o)?;
    specs
        .iter()
        .zip(&o.code)
        .map(|(s, text)| Ok((text.clone(), s.build(field.as_ref())?)))
        .collect()
}

fn exact_distance(c: &LinearCode) -> Result<usize, Failure> {
    match c.distance_bound() {
        Some((d, true)) => Ok(d),
        _ => Ok(c.min_distance()?),
    }
}

fn describe(c: &LinearCode, d: usize) -> Value {
    let genus = c.len() + 1 - c.dim() - d;
    let mut v = json!({
        "family": c.family().name(),
        "field": c.field().label(),
        "n": c.len(),
        "k": c.dim(),
        "d": d,
        "generalized_genus": genus,
        "designed_threshold": c.len() - d + 1,
    });
    if let Family::Hermitian { q, m } = c.family() {
        v["q"] = json!(q);
        v["m"] = json!(m);
        v["curve_genus"] = json!(hermitian_genus(*q));
    }
    v
}

fn csv_line(code: &str, ell: usize, k: usize, genus: usize, designed: usize) -> String {
    format!("{code},{ell},{k},{genus},{designed},,,")
}

fn code_info(o: &Opts) -> Result<Report, Failure> {
    let mut docs = Vec::new();
    let mut text = String::new();
    let mut csv = Vec::new();
    for (name, c) in full_codes(o)? {
        let d = exact_distance(&c)?;
        let mut v = describe(&c, d);
        v["code"] = json!(name);
        v["generator"] = serde_json::to_value(c.generator()).expect("matrix serializes");
        let genus = c.len() + 1 - c.dim() - d;
        text.push_str(&format!(
            "{name}: [{}, {}, {d}] over GF({}), 𝔤 = {genus}, designed threshold n - d + 1 = {}\n",
            c.len(),
            c.dim(),
            c.field().label(),
            c.len() - d + 1
        ));
        csv.push(csv_line(&name, 1, c.dim(), genus, c.len() - d + 1));
        docs.push(v);
    }
    Ok(Report {
        json: versioned("code info", json!({ "codes": docs })),
        text,
        csv: Some(csv),
        ok: true,
    })
}

fn genus(o: &Opts) -> Result<Report, Failure> {
    let mut docs = Vec::new();
    let mut text = String::new();
    let mut csv = Vec::new();
    for (name, c) in full_codes(o)? {
        let d = exact_distance(&c)?;
        let g = c.len() + 1 - c.dim() - d;
        text.push_str(&format!("{name}: 𝔤 = {g}"));
        if let Family::Hermitian { q, .. } = c.family() {
            text.push_str(&format!(" (curve genus g = {})", hermitian_genus(*q)));
        }
        text.push('\n');
        csv.push(csv_line(&name, 1, c.dim(), g, c.len() - d + 1));
        let mut v = describe(&c, d);
        v["code"] = json!(name);
        docs.push(v);
    }
    Ok(Report {
        json: versioned("code genus", json!({ "codes": docs })),
        text,
        csv: Some(csv),
        ok: true,
    })
}

type Named = (String, LinearCode);

fn two_codes(o: &Opts) -> Result<(Named, Named), Failure> {
    let mut codes = full_codes(o)?;
    match codes.len() {
        1 => {
            let c = codes.remove(0);
            Ok((c.clone(), c))
        }
        2 => {
            let b = codes.remove(1);
            Ok((codes.remove(0), b))
        }
        n => Err(usage(format!("expected one or two --code values, got {n}"))),
    }
}

fn hs_product(o: &Opts) -> Result<Report, Failure> {
    let ((n1, c1), (n2, c2)) = two_codes(o)?;
    let p = c1.hs_product(&c2)?;
    let d = exact_distance(&p)?;
    let genus = p.len() + 1 - p.dim() - d;
    let name = format!("{n1} o {n2}");
    let text = format!(
        "{name}: [{}, {}, {d}], 𝔤 = {genus}, designed threshold n - d + 1 = {}\n",
        p.len(),
        p.dim(),
        p.len() - d + 1
    );
    let mut v = describe(&p, d);
    v["codes"] = json!([n1, n2]);
    v["generator"] = serde_json::to_value(p.generator()).expect("matrix serializes");
    Ok(Report {
        json: versioned("code hs-product", v),
        text,
        csv: Some(vec![csv_line(&name, 2, c1.dim(), genus, p.len() - d + 1)]),
        ok: true,
    })
}

fn check_log_additive(o: &Opts) -> Result<Report, Failure> {
    let ((n1, c1), (n2, c2)) = two_codes(o)?;
    let verdict = c1.is_log_additive(&c2)?;
    let pairwise = c1.min_pairwise_product_weight(&c2)?;
    let text = format!(
        "{n1} o {n2}: d(C1 o C2) = {} {} d(C1) + d(C2) - n = {} + {} - {} = {}; log-additive: {}; \
         min pairwise w(x o y) = {pairwise}\n",
        verdict.d_product,
        if verdict.holds { ">=" } else { "<" },
        verdict.d1,
        verdict.d2,
        verdict.n,
        verdict.bound,
        if verdict.holds { "yes" } else { "no" }
    );
    let mut v = serde_json::to_value(&verdict).expect("verdict serializes");
    v["codes"] = json!([n1, n2]);
    v["min_pairwise_product_weight"] = json!(pairwise);
    Ok(Report {
        json: versioned("code check-log-additive", v),
        text,
        csv: None,
        ok: true,
    })
}

fn parse_block(text: &str) -> Result<(usize, usize, usize), Failure> {
    let dims: Vec<usize> = text
        .split('x')
        .map(|d| d.trim().parse().map_err(|_| usage(format!("--block {text:?}: expected PxSxQ"))))
        .collect::<Result<_, _>>()?;
    match dims[..] {
        [p, s, q] if p > 0 && s > 0 && q > 0 => Ok((p, s, q)),
        _ => Err(usage(format!("--block {text:?}: expected three positive sizes PxSxQ"))),
    }
}

/// A code of dimension `k`: the full spec, or a family built on `workers`
/// points.
fn code_of_dim(o: &Opts, k: usize) -> Result<LinearCode, Failure> {
    let specs = code_specs(o)?;
    if specs.len() != 1 {
        return Err(usage("this command takes a single --code"));
    }
    let field = field_opt(o)?;
    let code = match specs[0] {
        CodeSpec::RsFamily { q } => {
            let n = o.workers.ok_or_else(|| usage("a code family needs --workers"))?;
            let f = match (field, q) {
                (Some(f), _) => f,
                (None, Some(q)) => Field::of_order(q)?,
                (None, None) => Field::of_order(smallest_prime_at_least(n as u64))?,
            };
            rs_code_prefix(&f, n, k)?
        }
        CodeSpec::HermitianFamily { q } => {
            let n = o.workers.ok_or_else(|| usage("a code family needs --workers"))?;
            let q = q.ok_or_else(|| usage("give the curve as hermitian:<q>"))?;
            hermitian_code_on(q, hermitian_degree_for_dim(q, k), n)?
        }
        ref full => full.build(field.as_ref())?,
    };
    if code.dim() != k {
        return Err(usage(format!(
            "{} has dimension {}, but this job needs dimension {k}",
            o.code[0],
            code.dim()
        )));
    }
    Ok(code)
}

fn smallest_prime_at_least(n: u64) -> u64 {
    (n.max(2)..).find(|&p| (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0)).expect("primes are unbounded")
}

#[derive(Clone, Copy)]
enum JobKind {
    Batch,
    General,
    Tensor,
}

fn build_job(o: &Opts, kind: JobKind) -> Result<Job, Failure> {
    let block = parse_block(&o.block)?;
    match kind {
        JobKind::Batch => {
            let code = match (o.k, full_codes(o)) {
                (_, Ok(mut c)) if c.len() == 1 => c.remove(0).1,
                (Some(k), _) => code_of_dim(o, k)?,
                (None, Err(e)) => return Err(e),
                (None, Ok(_)) => return Err(usage("this command takes a single --code")),
            };
            if o.k.is_some_and(|k| k != code.dim()) {
                return Err(usage(format!("--k {} differs from the code dimension {}", o.k.unwrap(), code.dim())));
            }
            let workers = o.workers.unwrap_or(code.len());
            let plan = JobPlan::batch_matmul(&code, &code, workers, o.stragglers, o.byzantine)?;
            Ok(Job::Batch { plan, block })
        }
        JobKind::General | JobKind::Tensor => {
            let tensor_text = o.tensor.as_deref().unwrap_or("strassen");
            let field = match field_opt(o)? {
                Some(f) => f,
                None => guess_field(o)?,
            };
            let spec = parse_tensor(tensor_text, &field)?;
            match (kind, spec) {
                (JobKind::General, TensorSpec::Bilinear(t)) => {
                    let code = code_of_dim(o, t.rank())?;
                    let workers = o.workers.unwrap_or(code.len());
                    let plan = JobPlan::batch_matmul(&code, &code, workers, o.stragglers, o.byzantine)?;
                    Ok(Job::General { plan, tensor: t, block })
                }
                (JobKind::General, TensorSpec::Multilinear(_)) => {
                    Err(usage("general-matmul needs a bilinear --tensor (naive:..., strassen, strassen^s)"))
                }
                (_, spec) => {
                    let map = match spec {
                        TensorSpec::Bilinear(t) => MultilinearDecomp::from_bilinear(&t),
                        TensorSpec::Multilinear(m) => m,
                    };
                    let code = code_of_dim(o, map.rank())?;
                    let workers = o.workers.unwrap_or(code.len());
                    let codes = vec![code; map.arity() + 1];
                    let plan = JobPlan::new(codes, workers, o.stragglers, o.byzantine)?;
                    Ok(Job::Multilinear { plan, map })
                }
            }
        }
    }
}

/// The field a code spec implies, for parsing tensors before the code is
/// built.
fn guess_field(o: &Opts) -> Result<Field, Failure> {
    let specs = code_specs(o)?;
    match specs.first() {
        Some(CodeSpec::ReedSolomon { q, .. }) | Some(CodeSpec::RsFamily { q: Some(q) }) => Ok(Field::of_order(*q)?),
        Some(CodeSpec::Hermitian { q, .. }) | Some(CodeSpec::HermitianFamily { q: Some(q) }) => {
            Ok(Field::of_order((*q as u64).pow(2))?)
        }
        _ => {
            let n = o.workers.ok_or_else(|| usage("--code rs without a field order needs --workers"))?;
            Ok(Field::of_order(smallest_prime_at_least(n as u64))?)
        }
    }
}

fn fault_spec(o: &Opts) -> FaultSpec {
    FaultSpec {
        stragglers: if o.adversarial {
            Selection::Adversarial { count: o.stragglers }
        } else {
            Selection::Random { count: o.stragglers }
        },
        byzantine: Selection::Random { count: o.byzantine },
        seed: o.seed,
    }
}

fn run_job(o: &Opts, kind: JobKind) -> Result<Report, Failure> {
    let job = build_job(o, kind)?;
    let inputs = job.random_inputs(o.seed);
    let t = simulate(&job, &inputs, &fault_spec(o))?;
    let text = format!(
        "{}: {} ({} of {} fault patterns failed)\nworkers {}, wait for {}, designed threshold {}\n\
         stragglers {:?}, byzantine {:?}\n{}",
        t.job,
        if t.outcome.success { "success, output equals the reference" } else { "FAILED" },
        t.patterns_failed,
        t.patterns_tested,
        job.workers(),
        t.wait_for,
        t.designed_threshold,
        t.stragglers,
        t.byzantine,
        t.outcome.error.as_ref().map_or(String::new(), |e| format!("decode error: {e}\n")),
    );
    let ok = t.outcome.success;
    let json = serde_json::to_value(&t).expect("transcript serializes");
    Ok(Report {
        json: versioned(&format!("run {}", t.job), json),
        text,
        csv: None,
        ok,
    })
}

fn secure_plan(o: &Opts) -> Result<SecurePlan, Failure> {
    let workers = o.workers.ok_or_else(|| usage("secure runs need --workers"))?;
    let t = o.padding.ok_or_else(|| usage("secure runs need --padding"))?;
    let k = o.k.unwrap_or(2);
    let specs = code_specs(o)?;
    let n = (workers + k + t) as u64;
    let family = match (&specs[..], field_opt(o)?) {
        ([CodeSpec::RsFamily { .. }], Some(f)) => MotherFamily::ReedSolomon { q: f.order() as u64 },
        ([CodeSpec::RsFamily { q: Some(q) }], None) => MotherFamily::ReedSolomon { q: *q },
        ([CodeSpec::RsFamily { q: None }], None) => MotherFamily::ReedSolomon { q: smallest_prime_at_least(n) },
        ([CodeSpec::HermitianFamily { q: Some(q) }], _) => MotherFamily::Hermitian { q: *q },
        _ => return Err(usage("secure runs take --code rs, rs:<q> or hermitian:<q>; the length is N + k + t")),
    };
    let plan = SecurePlan::new(&family, workers, k, t)?.with_byzantine(o.byzantine)?;
    if let Some(c) = o.colluding {
        if c > plan.collusion_tolerance() {
            return Err(usage(format!(
                "hypothesis violated: c = {c} colluders exceed t - 𝔤 = {} - {} = {}",
                t,
                plan.generalized_genus(),
                plan.collusion_tolerance()
            )));
        }
    }
    Ok(plan)
}

/// Most colluder sets the leakage check examines.
const LEAKAGE_SETS: u64 = 1 << 16;

fn run_secure(o: &Opts) -> Result<Report, Failure> {
    let plan = secure_plan(o)?;
    let c = o.colluding.unwrap_or(plan.collusion_tolerance());
    let leakage = collusion_leakage_check(&plan, c, LEAKAGE_SETS)?;
    let formulas = secure_threshold_report(&plan, plan.k())?;
    let job = Job::Secure {
        plan: plan.clone(),
        block: parse_block(&o.block)?,
    };
    let inputs = job.random_inputs(o.seed);
    let transcript = simulate(&job, &inputs, &fault_spec(o))?;
    let ok = transcript.outcome.success && leakage.secure;
    let text = format!(
        "secure-matmul: {}\nmother code [{}, {}] over GF({}), N = {}, k = {}, t = {}, 𝔤 = {}, c = {}\n\
         leakage check: {} of {} colluder sets of size {c} checked, {}\n\
         wait for {} (designed 2(k + t) - 1 + g = {})\n{}",
        if transcript.outcome.success { "success, output equals the reference" } else { "FAILED" },
        plan.mother().len(),
        plan.mother().dim(),
        plan.field().label(),
        plan.workers(),
        plan.k(),
        plan.padding(),
        plan.generalized_genus(),
        plan.collusion_tolerance(),
        leakage.sets_checked,
        leakage.total_sets,
        if leakage.secure { "all full rank".to_string() } else { format!("set {:?} is not masked", leakage.witness) },
        plan.wait_for(),
        formulas.designed,
        transcript.outcome.error.as_ref().map_or(String::new(), |e| format!("decode error: {e}\n")),
    );
    let json = json!({
        "transcript": serde_json::to_value(&transcript).expect("transcript serializes"),
        "leakage": leakage,
        "thresholds": formulas,
    });
    Ok(Report {
        json: versioned("run secure-matmul", json),
        text,
        csv: None,
        ok,
    })
}

fn measure(o: &Opts) -> Result<Report, Failure> {
    let mode = Mode::parse(&o.mode)?;
    let mut reports: Vec<ThresholdReport> = Vec::new();
    for code in &o.code {
        let single = Opts { code: vec![code.clone()], ..o.clone() };
        let job = if o.padding.is_some() {
            Job::Secure {
                plan: secure_plan(&single)?,
                block: parse_block(&o.block)?,
            }
        } else {
            match o.tensor.as_deref() {
                None => build_job(&single, JobKind::Batch)?,
                Some(t) if t.starts_with("dot:") || t.starts_with("trace3:") => build_job(&single, JobKind::Tensor)?,
                Some(_) => build_job(&single, JobKind::General)?,
            }
        };
        reports.push(threshold_report(&job, mode, o.seed)?);
    }
    if reports.is_empty() {
        return Err(usage("--code is required"));
    }
    let mut text = String::new();
    for r in &reports {
        text.push_str(&format!(
            "{}\n{}: ℓ = {}, k = {}, 𝔤 = {}, designed {}, ℓk + g - 1 = {}, ℓ(k + 𝔤 - 1) + 1 = {}, mode {}{}\nmatches: {}\n",
            r.measured.map_or("none".to_string(), |m| m.to_string()),
            r.code,
            r.ell,
            r.k,
            r.genus,
            r.designed,
            r.key_ag,
            r.log_additive_bound,
            r.measurement.mode,
            r.measurement.trials.map_or(String::new(), |t| format!(" ({t} trials per size, {})", r.measurement.guarantee)),
            if r.matches.is_empty() { "none".to_string() } else { r.matches.join(", ") },
        ));
    }
    let csv = reports.iter().map(ThresholdReport::csv_row).collect();
    let json = versioned(
        "measure threshold",
        json!({ "reports": serde_json::to_value(&reports).expect("reports serialize") }),
    );
    Ok(Report { json, text, csv: Some(csv), ok: true })
}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/cli.md")]
mod book {}
