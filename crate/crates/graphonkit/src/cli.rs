//! Argument parsing and subcommand dispatch for the `graphonkit` binary.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use graphonkit_core::cutnorm::{self, K_EXACT};
use graphonkit_core::metrics::{self, Metric, Mode, Options, DEFAULT_RESTARTS};
use graphonkit_core::ops::{self, TailNorm};
use graphonkit_core::{gallery, sampler, StepGraphon};
use serde_json::{json, Value};

use crate::error::CliError;
use crate::io;

#[derive(Debug, Parser)]
#[command(name = "graphonkit", version, about = "Cut norms, distances, sampling and examples for step graphons")]
pub struct Cli {
    /// Worker threads; output does not depend on this.
    #[arg(long, global = true, env = "GRAPHONKIT_THREADS")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cut norm of a graphon.
    Cutnorm(CutnormArgs),
    /// Distance between two graphons.
    Dist(DistArgs),
    /// Integrability and regularity profiles of a family.
    Diag(DiagArgs),
    /// Sample a Poisson random graph.
    Sample(SampleArgs),
    /// Distance from sampled graphs back to the graphon, over a time grid.
    Converge(ConvergeArgs),
    /// Write a gallery example as graphon JSON.
    Example(ExampleArgs),
    /// Check the claims of a gallery example (exit code 2 on failure).
    Verify(VerifyArgs),
    /// Entropy of a [0, 1]-valued graphon.
    Entropy(EntropyArgs),
    /// Stretch or normalize a graphon.
    Stretch(StretchArgs),
}

#[derive(Debug, Args)]
pub struct CutnormArgs {
    pub graphon: PathBuf,
    /// Exact enumeration only; fails above the block limit.
    #[arg(long, conflicts_with = "heuristic")]
    pub exact: bool,
    /// Alternating maximization with this many restarts.
    #[arg(long, value_name = "R")]
    pub heuristic: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Largest block count handled by exact enumeration.
    #[arg(long, default_value_t = K_EXACT)]
    pub k_exact: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MetricArg {
    Cut,
    L1,
    Lp,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Perm,
    Altlp,
    Both,
}

#[derive(Debug, Args)]
pub struct DistArgs {
    pub first: PathBuf,
    pub second: PathBuf,
    #[arg(long, value_enum, default_value = "cut")]
    pub metric: MetricArg,
    /// Exponent for `--metric lp`.
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long, value_enum, default_value = "both")]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_RESTARTS)]
    pub restarts: usize,
    /// Compare the normalized graphons.
    #[arg(long)]
    pub stretched: bool,
    /// Allow signed graphons with `--metric lp`.
    #[arg(long)]
    pub allow_signed: bool,
    #[arg(long, default_value_t = K_EXACT)]
    pub k_exact: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum DiagKind {
    Ui,
    Tails,
    Ucr,
}

#[derive(Debug, Args)]
pub struct DiagArgs {
    #[arg(value_enum)]
    pub kind: DiagKind,
    #[arg(long, num_args = 1.., required = true)]
    pub family: Vec<PathBuf>,
    /// Levels B, comma separated.
    #[arg(long = "B", value_delimiter = ',', default_value = "1,2,4,8")]
    pub b: Vec<f64>,
    /// Mass budgets M, comma separated.
    #[arg(long = "M", value_delimiter = ',', default_value = "1,2,4")]
    pub m: Vec<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    pub graphon: PathBuf,
    #[arg(long)]
    pub t: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Keep vertices without edges.
    #[arg(long)]
    pub keep_isolated: bool,
    /// Instead of a graph, report the stretch/time invariance check for this `u`.
    #[arg(long, value_name = "U")]
    pub invariance: Option<f64>,
    /// Runs per side for `--invariance`.
    #[arg(long, default_value_t = 1000)]
    pub runs: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ConvergeArgs {
    pub graphon: PathBuf,
    #[arg(long, value_delimiter = ',', required = true)]
    pub tgrid: Vec<f64>,
    #[arg(long, default_value_t = 50)]
    pub runs: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExampleArgs {
    pub name: String,
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Example name, or `all`.
    pub name: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct EntropyArgs {
    pub graphon: PathBuf,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct StretchTarget {
    /// Stretch factor.
    #[arg(long)]
    pub u: Option<f64>,
    /// Stretch to unit L1 norm.
    #[arg(long)]
    pub normalize: bool,
}

#[derive(Debug, Args)]
pub struct StretchArgs {
    pub graphon: PathBuf,
    #[command(flatten)]
    pub target: StretchTarget,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// What a subcommand produced: text for stdout or a file, and whether
/// a verification failed after the text was produced.
struct Output {
    text: String,
    dest: Option<PathBuf>,
    failed: Option<String>,
}

impl Output {
    fn to(text: String, dest: Option<PathBuf>) -> Self {
        Self { text, dest, failed: None }
    }
}

fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn read(path: &Path) -> Result<StepGraphon, CliError> {
    Ok(io::read_graphon(path)?.graphon)
}

fn indices(x: &[bool]) -> Vec<usize> {
    x.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect()
}

fn cutnorm_cmd(a: CutnormArgs) -> Result<Output, CliError> {
    let file = io::read_graphon(&a.graphon)?;
    let w = &file.graphon;
    let k = w.block_count();
    let result = match a.heuristic {
        Some(r) => cutnorm::cut_norm_heuristic(w, r, a.seed)?,
        None if a.exact || k <= a.k_exact => cutnorm::cut_norm_exact_with_limit(w, a.k_exact)?,
        // Above the limit a non-negative graphon still has an exact answer.
        None if w.is_nonnegative() => cutnorm::CutNormResult {
            value: cutnorm::cut_norm_nonneg(w)?,
            witness_x: vec![true; k],
            witness_y: vec![true; k],
            kind: cutnorm::BoundKind::Exact,
            certificate_note: "non-negative values: cut norm equals the L1 norm".into(),
        },
        None => cutnorm::cut_norm_heuristic(w, DEFAULT_RESTARTS, a.seed)?,
    };
    let mut v = json!({
        "value": result.value,
        "kind": result.kind.as_str(),
        "blocks": k,
        "witness_x": indices(&result.witness_x),
        "witness_y": indices(&result.witness_y),
        "note": result.certificate_note,
    });
    if result.kind == cutnorm::BoundKind::Exact {
        let exact = file.exact.as_ref().and_then(|e| {
            if k > a.k_exact { e.l1_norm().ok() } else { e.cut_norm_with_limit(a.k_exact).ok() }
        });
        if let Some(q) = exact {
            v["rational"] = json!(q.to_string());
        }
    }
    Ok(Output::to(json_text(&v), a.out))
}

fn dist_cmd(a: DistArgs) -> Result<Output, CliError> {
    let (w1, w2) = (read(&a.first)?, read(&a.second)?);
    let metric = match (a.metric, a.p) {
        (MetricArg::Cut, _) => Metric::Cut,
        (MetricArg::L1, _) => Metric::L1,
        (MetricArg::Lp, Some(p)) => Metric::Lp(p),
        (MetricArg::Lp, None) => return Err(CliError::Usage("--metric lp needs --p".into())),
    };
    let mode = match a.mode {
        ModeArg::Perm => Mode::Permutation,
        ModeArg::Altlp => Mode::AlternatingLp,
        ModeArg::Both => Mode::Both,
    };
    let opts = Options {
        mode,
        seed: a.seed,
        restarts: a.restarts,
        allow_signed: a.allow_signed,
        k_exact: a.k_exact,
        warm_starts: Vec::new(),
    };
    let est = if a.stretched {
        metrics::stretched_distance(&w1, &w2, metric, &opts)?
    } else {
        match metric {
            Metric::Cut => metrics::cut_distance(&w1, &w2, &opts)?,
            Metric::L1 => metrics::delta_1(&w1, &w2, &opts)?,
            Metric::Lp(p) => metrics::delta_p(&w1, &w2, p, &opts)?,
        }
    };
    let coupling: Vec<Value> = est.coupling.support().map(|(i, j, m)| json!([i, j, m])).collect();
    let v = json!({
        "value": est.value,
        "lower": est.lower,
        "kind": est.kind.as_str(),
        "method": est.method,
        "coupling": coupling,
    });
    Ok(Output::to(json_text(&v), a.out))
}

fn diag_cmd(a: DiagArgs) -> Result<Output, CliError> {
    let family: Vec<(String, StepGraphon)> =
        a.family.iter().map(|p| Ok((p.display().to_string(), read(p)?))).collect::<Result<_, CliError>>()?;
    let graphons: Vec<StepGraphon> = family.iter().map(|(_, w)| w.clone()).collect();
    let mut rows: Vec<(String, String, f64)> = Vec::new();
    match a.kind {
        DiagKind::Ui => {
            for (id, w) in &family {
                rows.push((id.clone(), "l1".into(), w.l1_norm()));
                for &b in &a.b {
                    rows.push((id.clone(), format!("tail[B={b}]"), ops::tail_integral(w, b)));
                }
            }
            for &b in &a.b {
                let p = ops::ui_profile(&graphons, b)?;
                rows.push(("family".into(), format!("sup_l1[B={b}]"), p.sup_l1));
                rows.push(("family".into(), format!("sup_tail[B={b}]"), p.sup_tail));
            }
        }
        DiagKind::Tails => {
            for &m in &a.m {
                let mut sup = [0.0f64; 2];
                for (id, w) in &family {
                    for (slot, (name, norm)) in [("l1_tail", TailNorm::L1), ("cut_tail", TailNorm::Cut)].into_iter().enumerate() {
                        let r = ops::regular_tail_mass(w, m, norm)?;
                        rows.push((id.clone(), format!("{name}[M={m},{}]", r.kind.as_str()), r.value));
                        sup[slot] = sup[slot].max(r.value);
                    }
                }
                rows.push(("family".into(), format!("sup_l1_tail[M={m}]"), sup[0]));
                rows.push(("family".into(), format!("sup_cut_tail[M={m}]"), sup[1]));
            }
        }
        DiagKind::Ucr => {
            for &b in &a.b {
                let mut sup = 0.0f64;
                for (id, w) in &family {
                    let r = ops::bounded_approx_error(w, b)?;
                    rows.push((id.clone(), format!("cut_error[B={b},{}]", r.kind.as_str()), r.value));
                    sup = sup.max(r.value);
                }
                rows.push(("family".into(), format!("sup_cut_error[B={b}]"), sup));
            }
        }
    }
    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record(["graphon_id", "parameter", "value"])?;
    for (id, param, value) in rows {
        wtr.write_record([id, param, value.to_string()])?;
    }
    Ok(Output::to(csv_text(wtr)?, a.out))
}

fn csv_text(wtr: csv::Writer<Vec<u8>>) -> Result<String, CliError> {
    let bytes = wtr.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("CSV fields are UTF-8"))
}

fn sample_cmd(a: SampleArgs) -> Result<Output, CliError> {
    let w = read(&a.graphon)?;
    if let Some(u) = a.invariance {
        let r = sampler::stretch_time_invariance_check(&w, u, a.t, a.runs, a.seed)?;
        let tests: Vec<Value> = r
            .tests
            .iter()
            .map(|t| json!({"name": t.name, "statistic": t.result.statistic, "p_value": t.result.p_value}))
            .collect();
        let v = json!({"u": r.u, "t": r.t, "runs": r.runs, "alpha": r.alpha, "tests": tests, "pass": r.pass});
        return Ok(Output::to(json_text(&v), a.out));
    }
    let g = sampler::sample_tilde_graph(&w, a.t, a.seed)?;
    let g = if a.keep_isolated { g } else { sampler::drop_isolated(&g) };
    Ok(Output::to(io::graph_to_text(g.vertex_count(), &g.edges), a.out))
}

fn converge_cmd(a: ConvergeArgs) -> Result<Output, CliError> {
    let w = read(&a.graphon)?;
    let rows = sampler::convergence_series(&w, &a.tgrid, a.runs, a.seed)?;
    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record(["t", "run", "estimate", "median"])?;
    for r in rows {
        wtr.write_record([r.t.to_string(), r.run.to_string(), r.estimate.to_string(), r.median.to_string()])?;
    }
    Ok(Output::to(csv_text(wtr)?, a.out))
}

fn example_cmd(a: ExampleArgs) -> Result<Output, CliError> {
    let v = match gallery::build(&a.name, a.n, a.seed)? {
        gallery::Built::Exact(e) => io::exact_graphon_to_json(&e),
        gallery::Built::Float(f) => io::graphon_to_json(&f),
    };
    Ok(Output::to(io::graphon_text(&v), a.out))
}

fn verify_cmd(a: VerifyArgs) -> Result<Output, CliError> {
    let names: Vec<&str> = if a.name == "all" { gallery::VERIFY_NAMES.to_vec() } else { vec![a.name.as_str()] };
    let mut text = String::new();
    let mut failed = Vec::new();
    for name in names {
        let claims = gallery::verify(name, a.seed)?;
        let ok = gallery::all_hold(&claims);
        let passed = claims.iter().filter(|c| c.holds).count();
        text.push_str(&format!("== {name}: {passed}/{} claims hold\n", claims.len()));
        text.push_str(&gallery::claims_table(&claims));
        if !ok {
            failed.push(name.to_string());
        }
    }
    let failed = (!failed.is_empty()).then(|| failed.join(", "));
    Ok(Output { text, dest: None, failed })
}

fn entropy_cmd(a: EntropyArgs) -> Result<Output, CliError> {
    let w = read(&a.graphon)?;
    Ok(Output::to(json_text(&json!({ "entropy": ops::entropy(&w)? })), None))
}

fn stretch_cmd(a: StretchArgs) -> Result<Output, CliError> {
    let w = read(&a.graphon)?;
    let s = match a.target.u {
        Some(u) => ops::stretch(&w, u)?,
        None => ops::normalize(&w),
    };
    Ok(Output::to(io::graphon_text(&io::graphon_to_json(&s)), a.out))
}

fn execute(cmd: Command) -> Result<Output, CliError> {
    match cmd {
        Command::Cutnorm(a) => cutnorm_cmd(a),
        Command::Dist(a) => dist_cmd(a),
        Command::Diag(a) => diag_cmd(a),
        Command::Sample(a) => sample_cmd(a),
        Command::Converge(a) => converge_cmd(a),
        Command::Example(a) => example_cmd(a),
        Command::Verify(a) => verify_cmd(a),
        Command::Entropy(a) => entropy_cmd(a),
        Command::Stretch(a) => stretch_cmd(a),
    }
}

/// Runs a parsed command line, writing results to `stdout` or the `--out` file.
pub fn run(cli: Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    let output = match cli.threads {
        Some(0) => return Err(CliError::Usage("--threads must be at least 1".into())),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Usage(format!("cannot start {n} threads: {e}")))?;
            pool.install(|| execute(cli.command))?
        }
        None => execute(cli.command)?,
    };
    match &output.dest {
        Some(path) => std::fs::write(path, &output.text)?,
        None => match stdout.write_all(output.text.as_bytes()).and_then(|()| stdout.flush()) {
            Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
            r => r?,
        },
    }
    match output.failed {
        Some(names) => Err(CliError::VerifyFailed(names)),
        None => Ok(()),
    }
}

/// Parses `args` (including the program name) and runs them. Returns the
/// process exit code: 0 on success, 1 on usage, input or validation errors,
/// 2 when `verify` finds a failing claim.
pub fn main_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    let _ = stdout.write_all(text.as_bytes());
                    0
                }
                _ => {
                    let _ = stderr.write_all(text.as_bytes());
                    1
                }
            };
        }
    };
    match run(cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
