//! `wiretap`: rate regions, capacities and small-blocklength simulations for
//! wiretap channels with state.
//!
//! Exit codes: 0 success, 1 I/O, 2 validation or usage, 3 infeasible search
//! configuration, 4 enumeration guard exceeded.

mod provenance;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use wiretap_core::sim::{
    index_size, lemma_thresholds, run_trials, soft_cover_divergence, soft_cover_exact, CoverMode,
    Rates, SimMode, SimOptions, DEFAULT_GUARD,
};
use wiretap_core::{
    build_joint, builtin_example, degradedness_flags, frontier_dominates, optimize_region,
    optimize_scalar, transform_general_csi, AuxiliaryScheme, Axis, BoundId, Error, JointSystem,
    RegionFrontier, RegionSearch, SchemeMode, SearchConfig, SideInfo, WiretapChannel,
};

use provenance::Provenance;

type Result<T> = std::result::Result<T, Error>;

#[derive(Parser)]
#[command(
    name = "wiretap",
    version,
    about = "Secret-message / secret-key regions for wiretap channels with state"
)]
struct Cli {
    /// Worker threads for searches and simulations (default: all cores).
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    threads: Option<u16>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a channel file and report its alphabets and degradedness.
    Validate {
        /// Channel file, or `builtin:<name>`.
        channel: String,
    },
    /// Trace the frontier of a bound's region and write it as CSV.
    Region(RegionArgs),
    /// Maximize the SM or SK projection of a bound.
    Capacity(CapacityArgs),
    /// Pairwise dominance and endpoints of several bounds.
    Compare(CompareArgs),
    /// Simulate the likelihood-encoder code for a given design.
    Simulate(SimulateArgs),
    /// Expected soft-covering divergence of a design's random codebook.
    Softcover(SoftcoverArgs),
    /// Reduce a channel with correlated state observations to an ordinary one.
    Transform {
        channel: String,
        /// Side-information kernel `p(s_a, s_b, s_e | s)`.
        #[arg(long)]
        side: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Clone)]
struct SearchArgs {
    /// Grid steps per simplex block.
    #[arg(long, default_value_t = 8)]
    grid: usize,
    /// Random restarts per direction.
    #[arg(long, default_value_t = 3)]
    restarts: usize,
    /// Local moves per work unit.
    #[arg(long, default_value_t = 400)]
    iters: usize,
    /// Scalarization directions over [0°, 90°].
    #[arg(long, default_value_t = 33)]
    directions: usize,
    /// Exhaustive grid limit; larger grids are sampled.
    #[arg(long, default_value_t = 4096)]
    max_grid: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// |U| (default: the cardinality cap).
    #[arg(long)]
    u_size: Option<usize>,
    /// |V| (default: the cardinality cap).
    #[arg(long)]
    v_size: Option<usize>,
    /// Search stochastic selectors p(x|s,u,v) instead of deterministic tables.
    #[arg(long)]
    stochastic: bool,
    /// Pin the selector to the functional representation x = f_v(s).
    #[arg(long)]
    functional: bool,
    /// Causal bounds whose designs are also evaluated under the target.
    #[arg(long, value_delimiter = ',', value_parser = parse_bound)]
    extend: Vec<BoundId>,
}

impl SearchArgs {
    fn config(&self, ch: &WiretapChannel) -> SearchConfig {
        let base = if self.functional {
            SearchConfig::functional_representation(ch)
        } else {
            SearchConfig::default()
        };
        SearchConfig {
            u_size: self.u_size.or(base.u_size),
            v_size: self.v_size.or(base.v_size),
            resolution: self.grid,
            restarts: self.restarts,
            refine_iters: self.iters,
            seed: self.seed,
            directions: self.directions,
            stochastic_selectors: self.stochastic,
            max_grid_points: self.max_grid,
            extend_from: self.extend.clone(),
            ..base
        }
    }
}

#[derive(Args)]
struct RegionArgs {
    channel: String,
    #[arg(long, value_parser = parse_bound)]
    bound: BoundId,
    /// Report the upper concave envelope instead of the raw union.
    #[arg(long)]
    hull: bool,
    #[command(flatten)]
    search: SearchArgs,
    /// CSV path; the designs go to `<out>.designs.json`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CapacityArgs {
    channel: String,
    #[arg(long, value_parser = parse_bound)]
    bound: BoundId,
    /// `sm` or `sk`.
    #[arg(long, value_parser = parse_axis)]
    axis: Axis,
    #[command(flatten)]
    search: SearchArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    channel: String,
    #[arg(long, value_delimiter = ',', required = true, value_parser = parse_bound)]
    bounds: Vec<BoundId>,
    #[command(flatten)]
    search: SearchArgs,
    /// JSON path for the matrix and endpoints.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SimModeArg {
    /// Exact when the enumeration fits the guard, Monte Carlo otherwise.
    Auto,
    Exact,
    Mc,
}

#[derive(Args)]
struct SimulateArgs {
    channel: String,
    /// Auxiliary design file.
    #[arg(long = "aux-file", alias = "aux")]
    aux_file: PathBuf,
    #[arg(long)]
    n: usize,
    /// `R1,R2,RK,RM`, each non-negative.
    #[arg(long, value_parser = parse_rates)]
    rates: Rates,
    /// Monte Carlo trials.
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "auto")]
    mode: SimModeArg,
    /// Decoder typicality tolerance.
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    #[arg(long, default_value_t = DEFAULT_GUARD)]
    guard: u128,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum CoverModeArg {
    Exact,
    Mc,
}

#[derive(Args)]
struct SoftcoverArgs {
    /// Auxiliary design file.
    design: PathBuf,
    /// Channel supplying the state law; needed for causal designs.
    #[arg(long)]
    channel: Option<String>,
    /// Blocklength, or the largest one with `--sweep n`.
    #[arg(long, default_value_t = 1)]
    n: usize,
    #[arg(long = "R1", alias = "r1", default_value_t = 0.0)]
    r1: f64,
    #[arg(long = "R2", alias = "r2", default_value_t = 0.0)]
    r2: f64,
    #[arg(long, value_enum, default_value = "exact")]
    mode: CoverModeArg,
    /// Samples per row in Monte Carlo mode.
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    /// `n` (rows n = 1..=N), or `R1=a,b,...` / `R2=a,b,...` at fixed n.
    #[arg(long)]
    sweep: Option<String>,
    #[arg(long, default_value_t = DEFAULT_GUARD)]
    guard: u128,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_bound(s: &str) -> std::result::Result<BoundId, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_axis(s: &str) -> std::result::Result<Axis, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_rates(s: &str) -> std::result::Result<Rates, String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("`{p}`: {e}")))
        .collect::<std::result::Result<_, _>>()?;
    if parts.len() != 4 {
        return Err(format!(
            "expected four rates R1,R2,RK,RM, got {}",
            parts.len()
        ));
    }
    if let Some(r) = parts.iter().find(|r| !r.is_finite() || **r < 0.0) {
        return Err(format!("rate {r} must be finite and non-negative"));
    }
    Ok(Rates::new(parts[0], parts[1], parts[2], parts[3]))
}

fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn utf8(bytes: &[u8]) -> Result<&str> {
    std::str::from_utf8(bytes).map_err(|e| Error::Parse {
        line: 0,
        column: 0,
        msg: e.to_string(),
    })
}

/// A channel file or `builtin:<name>`, with the bytes that identify it.
fn load_channel(spec: &str) -> Result<(WiretapChannel, Vec<u8>)> {
    if let Some(name) = spec.strip_prefix("builtin:") {
        return Ok((builtin_example(name)?, spec.as_bytes().to_vec()));
    }
    let bytes = read_bytes(Path::new(spec))?;
    let ch = WiretapChannel::from_json_str(utf8(&bytes)?)?;
    Ok((ch, bytes))
}

fn load_design(path: &Path) -> Result<(AuxiliaryScheme, Vec<u8>)> {
    let bytes = read_bytes(path)?;
    let aux = AuxiliaryScheme::from_json_str(utf8(&bytes)?)?;
    Ok((aux, bytes))
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| Error::Io {
            path: p.display().to_string(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON value serializes") + "\n"
}

fn with_provenance(mut v: Value, prov: &Provenance) -> Value {
    if let Value::Object(m) = &mut v {
        m.insert("provenance".into(), prov.json());
    }
    v
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Io { .. } => "io",
        Error::Parse { .. } => "parse",
        Error::Dimension(_) => "dimension",
        Error::NotStochastic { .. } => "not-stochastic",
        Error::NegativeProbability { .. } => "negative-probability",
        Error::InvalidDistribution(_) => "invalid-distribution",
        Error::ModeMismatch { .. } => "mode-mismatch",
        Error::InvalidArgument(_) => "invalid-argument",
        Error::InfeasibleConfig(_) => "infeasible-config",
        Error::GuardExceeded { .. } => "guard-exceeded",
        Error::AtypicalState => "atypical-state",
        Error::UnknownExample(_) => "unknown-example",
        Error::UnknownBound { .. } => "unknown-bound",
        Error::Solver(_) => "solver",
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io { .. } => 1,
        Error::InfeasibleConfig(_) => 3,
        Error::GuardExceeded { .. } => 4,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let args: Vec<String> = std::env::args().skip(1).collect();
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(usize::from(t))
            .build_global()
            .expect("global thread pool is configured once");
    }
    let validate = matches!(cli.command, Command::Validate { .. });
    let suggest_mc = matches!(cli.command, Command::Simulate(_) | Command::Softcover(_));
    match run(cli.command, &args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if validate {
                print!(
                    "{}",
                    pretty(
                        &json!({ "valid": false, "error": error_kind(&e), "message": e.to_string() })
                    )
                );
            }
            eprintln!("error: {e}");
            if suggest_mc && matches!(e, Error::GuardExceeded { .. }) {
                eprintln!(
                    "hint: rerun with --mode mc for a Monte Carlo estimate, or raise --guard"
                );
            }
            ExitCode::from(exit_code(&e))
        }
    }
}

fn run(cmd: Command, args: &[String]) -> Result<()> {
    match cmd {
        Command::Validate { channel } => cmd_validate(&channel, args),
        Command::Region(a) => cmd_region(a, args),
        Command::Capacity(a) => cmd_capacity(a, args),
        Command::Compare(a) => cmd_compare(a, args),
        Command::Simulate(a) => cmd_simulate(a, args),
        Command::Softcover(a) => cmd_softcover(a, args),
        Command::Transform { channel, side, out } => {
            cmd_transform(&channel, &side, out.as_deref(), args)
        }
    }
}

fn cmd_validate(channel: &str, args: &[String]) -> Result<()> {
    let (ch, bytes) = load_channel(channel)?;
    let [s, x, y, z] = ch.dims();
    let flags = degradedness_flags(&ch);
    let prov = Provenance::new("validate", None, args, &[bytes]);
    let out = json!({
        "valid": true,
        "alphabets": { "S": s, "X": x, "Y": y, "Z": z },
        "degraded": flags.degraded,
        "reversely_degraded": flags.reversely,
    });
    print!("{}", pretty(&with_provenance(out, &prov)));
    Ok(())
}

fn frontier_json(f: &RegionFrontier) -> Value {
    Value::Array(
        f.vertices
            .iter()
            .zip(&f.provenance)
            .map(|(&(a, b), id)| json!([a, b, id]))
            .collect(),
    )
}

fn designs_json(r: &RegionSearch, hull: bool, prov: &Provenance) -> Value {
    let designs: Map<String, Value> = r
        .designs
        .iter()
        .zip(&r.polytopes)
        .enumerate()
        .map(|(i, (d, p))| {
            (
                i.to_string(),
                json!({ "design": d.to_json_value(), "c_m": p.c_m, "c_sum": p.c_sum }),
            )
        })
        .collect();
    with_provenance(
        json!({
            "bound": r.bound.name(),
            "frontier": if hull { "hull" } else { "union" },
            "union": frontier_json(&r.union),
            "hull": frontier_json(&r.hull),
            "designs": designs,
        }),
        prov,
    )
}

fn cmd_region(a: RegionArgs, args: &[String]) -> Result<()> {
    let (ch, bytes) = load_channel(&a.channel)?;
    let cfg = SearchConfig {
        hull: a.hull,
        ..a.search.config(&ch)
    };
    let r = optimize_region(&ch, a.bound, &cfg)?;
    let prov = Provenance::new("region", Some(cfg.seed), args, &[bytes]);
    let header = prov.csv_header(&[
        ("bound", a.bound.name().to_string()),
        (
            "frontier",
            if a.hull { "hull" } else { "union" }.to_string(),
        ),
        ("aux-sizes", format!("|U|={} |V|={}", r.u_size, r.v_size)),
        ("evaluations", r.evaluations.to_string()),
    ]);
    write_out(a.out.as_deref(), &(header + &r.frontier.to_csv()))?;
    if let Some(out) = &a.out {
        let mut companion = out.clone().into_os_string();
        companion.push(".designs.json");
        write_out(
            Some(Path::new(&companion)),
            &pretty(&designs_json(&r, a.hull, &prov)),
        )?;
    }
    eprintln!(
        "{}: SM endpoint {:.6}, SK endpoint {:.6}",
        a.bound,
        r.frontier.message_endpoint(),
        r.frontier.key_endpoint()
    );
    Ok(())
}

fn cmd_capacity(a: CapacityArgs, args: &[String]) -> Result<()> {
    let (ch, bytes) = load_channel(&a.channel)?;
    let cfg = a.search.config(&ch);
    let o = optimize_scalar(&ch, a.bound, a.axis, &cfg)?;
    let prov = Provenance::new("capacity", Some(cfg.seed), args, &[bytes]);
    let axis = match a.axis {
        Axis::SM => "SM",
        Axis::SK => "SK",
    };
    let out = json!({
        "bound": a.bound.name(),
        "axis": axis,
        "value": o.value,
        "signed": o.signed,
        "feasible": o.feasible,
        // Designs with cM ≥ -gate_tol pass the SK gate, so equality counts.
        "gate_tol": o.gate_tol,
        "c_m": o.polytope.c_m,
        "c_sum": o.polytope.c_sum,
        "design": o.design.to_json_value(),
        "evaluations": o.evaluations,
    });
    write_out(a.out.as_deref(), &pretty(&with_provenance(out, &prov)))?;
    eprintln!(
        "{} {axis}: {:.6} (signed {:.6}, feasible {})",
        a.bound, o.value, o.signed, o.feasible
    );
    Ok(())
}

/// Signed SK value with the gate applied: `-inf` when no design passes.
fn gated(signed: f64, feasible: bool) -> f64 {
    if feasible {
        signed
    } else {
        f64::NEG_INFINITY
    }
}

fn fmt_num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.6}")
    } else {
        "infeasible".to_string()
    }
}

fn cmd_compare(a: CompareArgs, args: &[String]) -> Result<()> {
    let (ch, bytes) = load_channel(&a.channel)?;
    let base = a.search.config(&ch);
    let tol = 1e-6;
    let mut rows = Vec::new();
    for &b in &a.bounds {
        let cfg = base.adapted_to(b);
        let region = optimize_region(&ch, b, &cfg)?;
        let sm = optimize_scalar(&ch, b, Axis::SM, &cfg)?;
        let sk = optimize_scalar(&ch, b, Axis::SK, &cfg)?;
        rows.push((b, region, sm, sk));
    }
    let matrix: Vec<Vec<bool>> = rows
        .iter()
        .map(|r| {
            rows.iter()
                .map(|c| frontier_dominates(&r.1.frontier, &c.1.frontier, tol))
                .collect()
        })
        .collect();

    let width = a
        .bounds
        .iter()
        .map(|b| b.name().len())
        .max()
        .unwrap_or(5)
        .max(5);
    let mut table = format!(
        "{:width$}  {:>10}  {:>10}  {:>10}  {:>10}\n",
        "bound", "SM end", "SK end", "SM max", "SK max"
    );
    for (b, region, sm, sk) in &rows {
        table.push_str(&format!(
            "{:width$}  {:>10.6}  {:>10.6}  {:>10}  {:>10}\n",
            b.name(),
            region.frontier.message_endpoint(),
            region.frontier.key_endpoint(),
            fmt_num(sm.signed),
            fmt_num(gated(sk.signed, sk.feasible)),
        ));
    }
    table.push_str(&format!(
        "\nrow region contains column region (tol {tol:e}):\n{:width$}",
        ""
    ));
    for b in &a.bounds {
        table.push_str(&format!("  {:>width$}", b.name()));
    }
    table.push('\n');
    for (b, row) in a.bounds.iter().zip(&matrix) {
        table.push_str(&format!("{:width$}", b.name()));
        for &d in row {
            table.push_str(&format!("  {:>width$}", if d { "yes" } else { "no" }));
        }
        table.push('\n');
    }
    let mut orderings = Vec::new();
    for i in 0..rows.len() {
        for k in i + 1..rows.len() {
            let (x, y) = (
                gated(rows[i].3.signed, rows[i].3.feasible),
                gated(rows[k].3.signed, rows[k].3.feasible),
            );
            let rel = if x < y - tol {
                "<"
            } else if x > y + tol {
                ">"
            } else {
                "="
            };
            table.push_str(&format!("SK: {} {rel} {}\n", rows[i].0, rows[k].0));
            orderings
                .push(json!({ "left": rows[i].0.name(), "right": rows[k].0.name(), "sk": rel }));
        }
    }
    print!("{table}");

    let prov = Provenance::new("compare", Some(base.seed), args, &[bytes]);
    let bounds: Vec<Value> = rows
        .iter()
        .map(|(b, region, sm, sk)| {
            json!({
                "bound": b.name(),
                "sm_endpoint": region.frontier.message_endpoint(),
                "sk_endpoint": region.frontier.key_endpoint(),
                "sm_max": sm.signed,
                "sk_max": if sk.feasible { json!(sk.signed) } else { Value::Null },
                "sk_feasible": sk.feasible,
            })
        })
        .collect();
    let out = json!({
        "tol": tol,
        "bounds": bounds,
        "dominates": matrix,
        "sk_order": orderings,
    });
    if let Some(p) = &a.out {
        write_out(Some(p), &pretty(&with_provenance(out, &prov)))?;
    }
    Ok(())
}

fn cmd_simulate(a: SimulateArgs, args: &[String]) -> Result<()> {
    let (ch, ch_bytes) = load_channel(&a.channel)?;
    let (aux, aux_bytes) = load_design(&a.aux_file)?;
    let j = build_joint(&ch, &aux)?;
    let opts = SimOptions {
        mode: match a.mode {
            SimModeArg::Auto => None,
            SimModeArg::Exact => Some(SimMode::Exact),
            SimModeArg::Mc => Some(SimMode::MonteCarlo),
        },
        eps: a.eps,
        guard: a.guard,
    };
    let report = run_trials(&ch, &j, a.n, a.rates, a.trials, a.seed, &opts)?;
    let prov = Provenance::new("simulate", Some(a.seed), args, &[ch_bytes, aux_bytes]);
    let v = serde_json::to_value(&report).expect("report serializes");
    write_out(a.out.as_deref(), &pretty(&with_provenance(v, &prov)))
}

/// The design's joint law; without a channel, a non-causal design supplies
/// the state law itself.
fn design_joint(aux: &AuxiliaryScheme, channel: Option<&WiretapChannel>) -> Result<JointSystem> {
    if let Some(ch) = channel {
        return build_joint(ch, aux);
    }
    if aux.mode() != SchemeMode::NonCausal {
        return Err(Error::InvalidArgument(format!(
            "{} designs need --channel for the state distribution",
            aux.mode()
        )));
    }
    let [s_n, u_n, v_n, x_n] = aux.dims();
    let p_s: Vec<f64> = aux
        .input()
        .chunks(u_n * v_n)
        .map(|c| c.iter().sum())
        .collect();
    debug_assert_eq!(p_s.len(), s_n);
    let ch = WiretapChannel::from_fn([s_n, x_n, 1, 1], p_s, |_, _, _, _| 1.0)?;
    build_joint(&ch, aux)
}

enum Sweep {
    Single,
    N,
    R1(Vec<f64>),
    R2(Vec<f64>),
}

fn parse_sweep(s: Option<&str>) -> Result<Sweep> {
    let Some(s) = s else { return Ok(Sweep::Single) };
    if s == "n" {
        return Ok(Sweep::N);
    }
    let list = |t: &str| -> Result<Vec<f64>> {
        t.split(',')
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::InvalidArgument(format!("sweep value `{p}`: {e}")))
            })
            .collect()
    };
    if let Some(t) = s.strip_prefix("R1=").or_else(|| s.strip_prefix("r1=")) {
        return Ok(Sweep::R1(list(t)?));
    }
    if let Some(t) = s.strip_prefix("R2=").or_else(|| s.strip_prefix("r2=")) {
        return Ok(Sweep::R2(list(t)?));
    }
    Err(Error::InvalidArgument(format!(
        "unknown sweep `{s}` (use n, R1=a,b,... or R2=a,b,...)"
    )))
}

fn cmd_softcover(a: SoftcoverArgs, args: &[String]) -> Result<()> {
    let (aux, aux_bytes) = load_design(&a.design)?;
    let mut inputs = vec![aux_bytes];
    let channel = match &a.channel {
        Some(c) => {
            let (ch, bytes) = load_channel(c)?;
            inputs.push(bytes);
            Some(ch)
        }
        None => None,
    };
    let j = design_joint(&aux, channel.as_ref())?;
    if a.n == 0 {
        return Err(Error::InvalidArgument(
            "blocklength must be at least 1".into(),
        ));
    }
    let points: Vec<(usize, f64, f64)> = match parse_sweep(a.sweep.as_deref())? {
        Sweep::Single => vec![(a.n, a.r1, a.r2)],
        Sweep::N => (1..=a.n).map(|n| (n, a.r1, a.r2)).collect(),
        Sweep::R1(rs) => rs.into_iter().map(|r| (a.n, r, a.r2)).collect(),
        Sweep::R2(rs) => rs.into_iter().map(|r| (a.n, a.r1, r)).collect(),
    };
    let (i_us, i_uvs) = lemma_thresholds(&j);
    let prov = Provenance::new("softcover", Some(a.seed), args, &inputs);
    let mode = match a.mode {
        CoverModeArg::Exact => "exact",
        CoverModeArg::Mc => "monte-carlo",
    };
    let mut csv = prov.csv_header(&[
        ("I(U;S)", format!("{i_us}")),
        ("I(UV;S)", format!("{i_uvs}")),
        ("mode", mode.to_string()),
    ]);
    csv.push_str("n,R1,R2,L,N,divergence_bits,half_width_bits\n");
    for (n, r1, r2) in points {
        let (l, nn) = (index_size(n, r1)?, index_size(n, r2)?);
        let (value, half) = match a.mode {
            CoverModeArg::Exact => (soft_cover_exact(&j, n, l, nn, a.guard)?, 0.0),
            CoverModeArg::Mc => {
                let e = soft_cover_divergence(
                    &j,
                    n,
                    r1,
                    r2,
                    CoverMode::MonteCarlo { samples: a.samples },
                    a.seed,
                )?;
                (e.value, e.half_width)
            }
        };
        csv.push_str(&format!("{n},{r1},{r2},{l},{nn},{value},{half}\n"));
    }
    write_out(a.out.as_deref(), &csv)
}

fn cmd_transform(channel: &str, side: &Path, out: Option<&Path>, args: &[String]) -> Result<()> {
    let (ch, ch_bytes) = load_channel(channel)?;
    let side_bytes = read_bytes(side)?;
    let side_info = SideInfo::from_json_str(utf8(&side_bytes)?)?;
    let reduced = transform_general_csi(&ch, &side_info)?;
    let prov = Provenance::new("transform", None, args, &[ch_bytes, side_bytes]);
    let v: Value = serde_json::from_str(&reduced.to_json_string()).expect("channel JSON parses");
    write_out(out, &pretty(&with_provenance(v, &prov)))
}
