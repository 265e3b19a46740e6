use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use zslab::atoms::{self, EnumConfig};
use zslab::cache::{atoms_with, AtomCache};
use zslab::invariants::{self, aap_decompose, Sweep, SweepConfig};
use zslab::lengths;
use zslab::rational;
use zslab::syslen;
use zslab::verify;
use zslab::{Error, GElement, GroupSpec, Sequence};

#[derive(Parser)]
#[command(
    name = "zslab",
    version,
    about = "Exact zero-sum invariants of finite abelian groups"
)]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Opts {
    /// JSON output (the default)
    #[arg(long, global = true, conflicts_with = "csv")]
    json: bool,
    /// CSV output
    #[arg(long, global = true)]
    csv: bool,
    /// add decimal approximations next to exact rationals
    #[arg(long, global = true)]
    float: bool,
    /// worker threads (default: available parallelism)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// node budget for atom enumeration
    #[arg(long, global = true, value_name = "NODES")]
    budget: Option<u64>,
    /// skip the feasibility guard on atom enumeration
    #[arg(long, global = true)]
    force: bool,
    /// neither read nor write the atom cache
    #[arg(long, global = true)]
    no_cache: bool,
    /// only sweep subsets with at most N elements (results become lower bounds)
    #[arg(long, global = true, value_name = "N")]
    max_subset_size: Option<usize>,
    /// sweep every subset instead of one per automorphism orbit
    #[arg(long, global = true)]
    no_orbit_reduction: bool,
    /// print one JSON line per swept subset before the result
    #[arg(long, global = true)]
    reports: bool,
    /// include maximizing subsets in sweep results
    #[arg(long, global = true)]
    witness: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Minimal zero-sum sequences over a subset (default: G without 0)
    Atoms(SubsetArgs),
    /// Davenport constant D(G)
    Davenport { group: String },
    /// K*(G) from the primary decomposition
    Kstar { group: String },
    /// Set of lengths of a zero-sum sequence, e.g. "(1,0)^2 (0,1)^2 (1,1)^2" or "1^3 2^3"
    Lengths {
        group: String,
        sequence: String,
        /// also decompose as an almost arithmetical progression with this difference
        #[arg(long)]
        aap: Option<u64>,
    },
    /// min Δ(G₀) via the relation lattice
    MinDelta(SubsetArgs),
    /// Elasticity ρ(G₀) with an attaining sequence
    Elasticity(SubsetArgs),
    /// Δ*(G) by subset sweep
    DeltaStar { group: String },
    /// m(G) by subset sweep
    M { group: String },
    /// ρ*(G,d) by subset sweep
    RhoStar(GroupD),
    /// K(G,d) by subset sweep
    KOf(GroupD),
    /// Bounds lower ≤ ρ(G,d) ≤ ρ*(G,d)
    RhoD(GroupD),
    /// Δ*(G) ⊆ Δ₁(G) ⊆ upper
    Delta1Bounds { group: String },
    /// Sets of lengths of zero-sum sequences of length ≤ max-len
    System {
        group: String,
        #[arg(long)]
        max_len: u64,
    },
    /// Compare the bounded systems of sets of lengths of two groups
    Compare {
        left: String,
        right: String,
        #[arg(long)]
        max_len: u64,
    },
    /// Run a self-check suite
    Verify {
        #[arg(long, default_value = "core")]
        suite: String,
        #[arg(long)]
        group: String,
    },
    /// Exploratory (non-normative) scan of K(C_n^r, r-1) against conjectured closed forms
    ConjectureScan {
        /// groups C_n^r with r >= n-1 (default: C2^3, C3^2, C2^4)
        #[arg(long)]
        group: Vec<String>,
    },
}

#[derive(Args)]
struct SubsetArgs {
    group: String,
    /// elements of G₀, e.g. "(1,0) (0,1) (1,1)"; default G without 0
    #[arg(long)]
    subset: Option<String>,
}

#[derive(Args)]
struct GroupD {
    group: String,
    #[arg(long)]
    d: u64,
}

/// What a command prints: JSON, an optional CSV table, and optional report lines.
struct Output {
    json: Value,
    table: Option<(Vec<&'static str>, Vec<Vec<String>>)>,
    /// human-readable lines printed instead of JSON unless --json/--csv is given
    text: Option<String>,
    /// JSON lines printed before the result with --reports
    reports: Option<String>,
    failed: bool,
}

impl Output {
    fn json(json: Value) -> Self {
        Output {
            json,
            table: None,
            text: None,
            reports: None,
            failed: false,
        }
    }
}

enum Failure {
    Usage(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::BudgetExceeded { .. } | Error::CapExceeded(_) | Error::Incomplete(_) => 3,
        Error::Io(_) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(io::stdout(), "{e}");
                return ExitCode::SUCCESS;
            }
            report_error("usage", &e.kind().to_string(), &e.to_string(), 2);
            return ExitCode::from(2);
        }
    };
    if let Some(n) = cli.opts.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            report_error("usage", "threads", &e.to_string(), 2);
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(out) => {
            if let Err(e) = emit(&cli.opts, &out) {
                if e.kind() == io::ErrorKind::BrokenPipe {
                    return ExitCode::SUCCESS;
                }
                report_error("io", "io", &e.to_string(), 1);
                return ExitCode::from(1);
            }
            if out.failed {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(Failure::Usage(msg)) => {
            report_error("usage", "usage", &msg, 2);
            ExitCode::from(2)
        }
        Err(Failure::Lib(e)) => {
            let code = exit_code(&e);
            report_error("error", e.kind(), &e.to_string(), code);
            ExitCode::from(code)
        }
    }
}

fn report_error(class: &str, kind: &str, message: &str, code: u8) {
    let v = json!({ "error": class, "kind": kind, "message": message.trim(), "exit_code": code });
    eprintln!("{v}");
}

fn emit(opts: &Opts, out: &Output) -> io::Result<()> {
    let stdout = io::stdout();
    let mut w = stdout.lock();
    if opts.reports {
        if let Some(r) = &out.reports {
            w.write_all(r.as_bytes())?;
        }
    }
    if opts.csv {
        let mut wr = csv::Writer::from_writer(&mut w);
        match &out.table {
            Some((header, rows)) => {
                wr.write_record(header)?;
                for r in rows {
                    wr.write_record(r)?;
                }
            }
            None => {
                let (header, row) = flatten(&out.json);
                wr.write_record(&header)?;
                wr.write_record(&row)?;
            }
        }
        wr.flush()?;
        return Ok(());
    }
    if !opts.json {
        if let Some(t) = &out.text {
            return w.write_all(t.as_bytes());
        }
    }
    let mut v = out.json.clone();
    if opts.float {
        add_floats(&mut v);
    }
    writeln!(w, "{v}")
}

/// One CSV row from the top-level fields of a JSON object.
fn flatten(v: &Value) -> (Vec<String>, Vec<String>) {
    match v {
        Value::Object(m) => m
            .iter()
            .map(|(k, v)| {
                let cell = match v {
                    Value::String(s) => s.clone(),
                    Value::Null => String::new(),
                    other => other.to_string(),
                };
                (k.clone(), cell)
            })
            .unzip(),
        other => (vec!["value".into()], vec![other.to_string()]),
    }
}

/// Adds `<key>_float` beside every string field holding an exact rational.
fn add_floats(v: &mut Value) {
    match v {
        Value::Object(m) => {
            let mut out = Map::new();
            for (k, mut val) in std::mem::take(m) {
                add_floats(&mut val);
                let approx = match &val {
                    Value::String(s) => rational::parse(s).ok().map(|q| rational::to_f64(&q)),
                    _ => None,
                };
                out.insert(k.clone(), val);
                if let Some(f) = approx {
                    out.insert(format!("{k}_float"), json!(f));
                }
            }
            *m = out;
        }
        Value::Array(a) => a.iter_mut().for_each(add_floats),
        _ => {}
    }
}

fn enum_cfg(opts: &Opts) -> EnumConfig {
    let mut c = EnumConfig::default();
    if let Some(b) = opts.budget {
        c.node_budget = b;
    }
    c.force = opts.force;
    c
}

fn sweep_cfg(opts: &Opts) -> SweepConfig {
    let mut c = SweepConfig {
        max_subset_size: opts.max_subset_size,
        orbit_reduction: !opts.no_orbit_reduction,
        ..SweepConfig::default()
    };
    if let Some(b) = opts.budget {
        c.enum_cfg.node_budget = b;
    }
    c
}

fn group(s: &str) -> Result<GroupSpec, Failure> {
    GroupSpec::parse(s).map_err(|e| Failure::Usage(e.to_string()))
}

fn subset_of(g: &GroupSpec, s: &Option<String>) -> Result<Vec<GElement>, Failure> {
    match s {
        None => Ok(g.nonzero_elements()?),
        Some(text) => {
            let seq = Sequence::parse(g, text).map_err(|e| Failure::Usage(e.to_string()))?;
            if seq.is_empty() {
                return Err(Failure::Usage("empty subset".into()));
            }
            Ok(seq.support())
        }
    }
}

fn elems(v: &[GElement]) -> Vec<String> {
    v.iter().map(|g| g.to_string()).collect()
}

fn q(r: &zslab::Rational) -> String {
    rational::format(r)
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    let opts = &cli.opts;
    let cache_owned = (!opts.no_cache).then(|| AtomCache::new(AtomCache::default_dir()));
    let cache = cache_owned.as_ref();
    let ecfg = enum_cfg(opts);
    match &cli.cmd {
        Cmd::Atoms(a) => {
            let g = group(&a.group)?;
            let subset = subset_of(&g, &a.subset)?;
            let set = atoms_with(cache, &g, &subset, &ecfg)?;
            let rows: Vec<Vec<String>> = set
                .atoms()
                .iter()
                .map(|s| vec![s.to_string(), s.len().to_string(), q(&s.cross_number())])
                .collect();
            let json = json!({
                "group": g.name(),
                "subset": elems(set.subset()),
                "count": set.len(),
                "davenport": set.davenport(),
                "max_cross": q(&set.max_cross()),
                "min_cross": q(&set.min_cross()),
                "atoms": set.atoms().iter().map(|s| s.to_string()).collect::<Vec<_>>(),
            });
            Ok(Output {
                table: Some((vec!["atom", "length", "cross_number"], rows)),
                ..Output::json(json)
            })
        }
        Cmd::Davenport { group: s } => {
            let g = group(s)?;
            let nonzero = g.nonzero_elements()?;
            let d = if nonzero.is_empty() {
                1
            } else {
                atoms_with(cache, &g, &nonzero, &ecfg)?.davenport()
            };
            Ok(Output::json(json!({ "value": d })))
        }
        Cmd::Kstar { group: s } => {
            let g = group(s)?;
            Ok(Output::json(json!({ "value": q(&atoms::k_star(&g)) })))
        }
        Cmd::Lengths {
            group: s,
            sequence,
            aap,
        } => {
            let g = group(s)?;
            let b = Sequence::parse(&g, sequence).map_err(|e| Failure::Usage(e.to_string()))?;
            if !b.is_zero_sum() {
                return Err(Failure::Usage(format!("{b} is not a zero-sum sequence")));
            }
            let l = if b.is_empty() {
                lengths::LengthSet::new([0])?
            } else {
                let set = atoms_with(cache, &g, &b.support(), &ecfg)?;
                lengths::length_set(&b, &set)?
            };
            let mut json = json!({
                "value": l,
                "elasticity": q(&l.elasticity()),
                "deltas": l.deltas(),
            });
            if let Some(d) = aap {
                let w = aap_decompose(&l, *d).map_err(|e| Failure::Usage(e.to_string()))?;
                json["aap"] = json!({
                    "y": w.y, "d": w.d, "ell": w.ell, "bound_m": w.bound_m,
                    "head": w.head, "tail": w.tail, "congruent": w.congruent,
                });
            }
            Ok(Output::json(json))
        }
        Cmd::MinDelta(a) => {
            let g = group(&a.group)?;
            let subset = subset_of(&g, &a.subset)?;
            let set = atoms_with(cache, &g, &subset, &ecfg)?;
            let md = lengths::min_delta(&set);
            Ok(Output::json(json!({
                "value": md,
                "half_factorial": md == 0,
                "rank": lengths::relation_rank(&set),
                "atoms": set.len(),
            })))
        }
        Cmd::Elasticity(a) => {
            let g = group(&a.group)?;
            let subset = subset_of(&g, &a.subset)?;
            let set = atoms_with(cache, &g, &subset, &ecfg)?;
            let el = lengths::elasticity(&set)?;
            let b = el.witness_sequence(&set)?;
            let (short, long) = el.factorization_lengths();
            Ok(Output::json(json!({
                "value": q(&el.value),
                "accepted": el.is_accepted(&set),
                "witness": b.to_string(),
                "factorization_lengths": [short, long],
            })))
        }
        Cmd::DeltaStar { group: s } => {
            let (sweep, reports) = sweep(opts, s, false, cache)?;
            let v = sweep.delta_star()?;
            Ok(with_reports(
                json!({ "value": v.value, "exact": v.exact }),
                reports,
            ))
        }
        Cmd::M { group: s } => {
            let (sweep, reports) = sweep(opts, s, false, cache)?;
            let v = sweep.m()?;
            Ok(with_reports(
                json!({ "value": v.value, "exact": v.exact }),
                reports,
            ))
        }
        Cmd::RhoStar(a) => {
            let (sweep, reports) = sweep(opts, &a.group, true, cache)?;
            let json = match sweep.rho_star_with_witness(a.d)? {
                Some((v, w)) => {
                    with_witness(json!({ "value": q(&v.value), "exact": v.exact }), opts, &w)
                }
                None => json!({ "value": null, "exact": sweep.is_exact() }),
            };
            Ok(with_reports(json, reports))
        }
        Cmd::KOf(a) => {
            let (sweep, reports) = sweep(opts, &a.group, false, cache)?;
            let json = match sweep.k_of_with_witness(a.d)? {
                Some((v, w)) => {
                    with_witness(json!({ "value": q(&v.value), "exact": v.exact }), opts, &w)
                }
                None => json!({ "value": null, "exact": sweep.is_exact() }),
            };
            Ok(with_reports(json, reports))
        }
        Cmd::RhoD(a) => {
            let (sweep, reports) = sweep(opts, &a.group, true, cache)?;
            let json = match sweep.rho_d_bounds(a.d)? {
                Some(b) => json!({
                    "d": b.d,
                    "lower": q(&b.lower),
                    "upper": q(&b.upper),
                    "exact": b.exact,
                    "sweep_exact": b.sweep_exact,
                    "lower_witness": b.lower_witness.as_deref().map(elems),
                    "upper_witness": elems(&b.upper_witness),
                }),
                None => {
                    json!({ "d": a.d, "lower": null, "upper": null, "exact": false, "sweep_exact": sweep.is_exact() })
                }
            };
            Ok(with_reports(json, reports))
        }
        Cmd::Delta1Bounds { group: s } => {
            let (sweep, reports) = sweep(opts, s, false, cache)?;
            let b = sweep.delta1_bounds()?;
            Ok(with_reports(
                json!({ "lower": b.lower, "upper": b.upper, "exact_lower": b.exact_lower }),
                reports,
            ))
        }
        Cmd::System { group: s, max_len } => {
            let g = group(s)?;
            let sys = syslen::system_with(&g, *max_len, &ecfg, cache)?;
            let rows = sys
                .sets()
                .map(|l| {
                    let b = sys.realizer(l).expect("every set has a realizer");
                    vec![l.to_string(), b.to_string()]
                })
                .collect();
            Ok(Output {
                table: Some((vec!["lengths", "sequence"], rows)),
                ..Output::json(sys.to_json())
            })
        }
        Cmd::Compare {
            left,
            right,
            max_len,
        } => {
            let (g, h) = (group(left)?, group(right)?);
            let c = syslen::compare_with(&g, &h, *max_len, &ecfg, cache)?;
            Ok(Output::json(c.to_json()))
        }
        Cmd::Verify { suite, group: s } => {
            let g = group(s)?;
            let report = verify::run_suite(suite, &g, cache).map_err(|e| match e {
                Error::Parse(m) | Error::Precondition(m) => Failure::Usage(m),
                other => Failure::Lib(other),
            })?;
            let rows = report
                .claims
                .iter()
                .map(|c| {
                    vec![
                        c.id.to_string(),
                        c.statement.to_string(),
                        c.computed.clone().unwrap_or_default(),
                        c.relation.to_string(),
                        c.expected.clone().unwrap_or_default(),
                        c.status.as_str().to_string(),
                    ]
                })
                .collect();
            Ok(Output {
                table: Some((
                    vec![
                        "claim",
                        "statement",
                        "computed",
                        "relation",
                        "expected",
                        "verdict",
                    ],
                    rows,
                )),
                text: Some(report.to_text()),
                failed: !report.passed(),
                ..Output::json(report.to_json())
            })
        }
        Cmd::ConjectureScan { group: gs } => {
            let names: Vec<String> = if gs.is_empty() {
                vec!["C2^3".into(), "C3^2".into(), "C2^4".into()]
            } else {
                gs.clone()
            };
            let cfg = sweep_cfg(opts);
            let mut rows = Vec::new();
            for n in &names {
                let g = group(n)?;
                let row = verify::conjecture_scan(&g, &cfg, cache).map_err(|e| match e {
                    Error::Precondition(m) => Failure::Usage(m),
                    other => Failure::Lib(other),
                })?;
                rows.push(row);
            }
            let mut text = format!("# {}\n", verify::SCAN_DISCLAIMER);
            for r in &rows {
                let f = |x: &Option<zslab::Rational>| x.as_ref().map_or("-".to_string(), q);
                let b = |x: Option<bool>| x.map_or("-".to_string(), |v| v.to_string());
                text.push_str(&format!(
                    "{}: K(G,{}) = {}{} s = {} coprime = {} predicted = {} match = {}{}\n",
                    r.group,
                    r.r - 1,
                    f(&r.k),
                    if r.exact { "" } else { " (lower bound)" },
                    f(&r.s),
                    b(r.s_coprime),
                    q(&r.predicted),
                    b(r.matches_prediction),
                    r.note.as_ref().map_or(String::new(), |n| format!(" ({n})")),
                ));
            }
            let table = rows
                .iter()
                .map(|r| {
                    let v = r.to_json();
                    [
                        "group",
                        "n",
                        "r",
                        "K",
                        "exact",
                        "s",
                        "s_integral_coprime_to_n",
                        "predicted",
                        "matches_prediction",
                        "note",
                    ]
                    .iter()
                    .map(|k| match &v[*k] {
                        Value::String(s) => s.clone(),
                        Value::Null => String::new(),
                        o => o.to_string(),
                    })
                    .collect()
                })
                .collect();
            Ok(Output {
                table: Some((
                    vec![
                        "group",
                        "n",
                        "r",
                        "K",
                        "exact",
                        "s",
                        "s_integral_coprime_to_n",
                        "predicted",
                        "matches_prediction",
                        "note",
                    ],
                    table,
                )),
                text: Some(text),
                ..Output::json(json!({
                    "note": verify::SCAN_DISCLAIMER,
                    "rows": rows.iter().map(|r| r.to_json()).collect::<Vec<_>>(),
                }))
            })
        }
    }
}

fn sweep(
    opts: &Opts,
    group_text: &str,
    with_elasticity: bool,
    cache: Option<&AtomCache>,
) -> Result<(Sweep, String), Failure> {
    let g = group(group_text)?;
    let cfg = SweepConfig {
        with_elasticity,
        ..sweep_cfg(opts)
    };
    let s = invariants::sweep_subsets(&g, &cfg, cache)?;
    let lines = if opts.reports {
        s.to_json_lines()
    } else {
        String::new()
    };
    Ok((s, lines))
}

fn with_reports(json: Value, reports: String) -> Output {
    Output {
        reports: Some(reports),
        ..Output::json(json)
    }
}

fn with_witness(mut json: Value, opts: &Opts, w: &[GElement]) -> Value {
    if opts.witness {
        json["witness"] = json!(elems(w));
    }
    json
}
