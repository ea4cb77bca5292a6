mod config;

use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand};
use num_bigint::BigInt;
use serde_json::{json, Value};

use config::FileConfig;
use tauseq::combinatorics::{
    maya_from_young_charge, young_charge_from_maya, MayaDiagram, Partition,
};
use tauseq::exact::{format_rational, parse_rational, Rational};
use tauseq::lattice::{polygon_to_basis, EdgePolygon, LatticeError, SublatticeBasis};
use tauseq::oeis::{load_stripped, match_sequence, MatchPolicy, OnlineClient, StrippedDb};
use tauseq::recurrence::{derive, generate, BilinearRecurrence, RecurrenceError};
use tauseq::scan::{run_scan, write_outputs, write_records, ScanConfig};
use tauseq::verify::{run_check, Check, Reading, VerifyOptions};

#[derive(Parser, Debug)]
#[command(
    name = "tauseq",
    version,
    about = "Integer sequences from double-period tau functions"
)]
struct Cli {
    /// Seed for randomized checks.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Print one JSON document (JSON Lines for scan) including the resolved config.
    #[arg(long, global = true)]
    json: bool,
    /// key=value file of defaults; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Convert between (partition, charge) and a Maya diagram.
    #[command(group(ArgGroup::new("input").required(true).args(["young", "maya"])))]
    Maya {
        /// Partition parts, comma separated; "" is the empty partition.
        #[arg(long, allow_hyphen_values = true)]
        young: Option<String>,
        #[arg(long, allow_hyphen_values = true, requires = "young")]
        charge: Option<i64>,
        /// Maya diagram JSON, as printed by this command.
        #[arg(long)]
        maya: Option<String>,
    },
    /// Derive the bilinear recurrence of a sublattice.
    #[command(group(ArgGroup::new("input").required(true).args(["matrix", "polygon"])))]
    Derive {
        /// Two rows, e.g. "5,-2,-2,-1;1,1,-1,-1".
        #[arg(long, allow_hyphen_values = true)]
        matrix: Option<String>,
        /// Counterclockwise vertices, e.g. "0,0 5,1 3,2 2,3".
        #[arg(long, allow_hyphen_values = true)]
        polygon: Option<String>,
    },
    /// Generate terms of a recurrence.
    #[command(group(ArgGroup::new("input").required(true).args(["recurrence_json", "matrix"])))]
    Generate {
        /// Recurrence JSON, or @path to read it from a file.
        #[arg(long)]
        recurrence_json: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        matrix: Option<String>,
        #[arg(long)]
        terms: Option<usize>,
        /// Initial window, comma separated rationals (default all ones).
        #[arg(long, allow_hyphen_values = true)]
        init: Option<String>,
    },
    /// Enumerate polygons and run the derive, generate, match pipeline.
    Scan {
        #[arg(long)]
        bound: Option<i64>,
        #[arg(long)]
        terms: Option<usize>,
        #[arg(long)]
        workers: Option<usize>,
        /// Stripped OEIS file (plain or gzip).
        #[arg(long)]
        oeis: Option<PathBuf>,
        /// JSON Lines output; the summary goes to <out>.summary.json.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also query the live search for unmatched integral sequences.
        #[arg(long)]
        online: bool,
        #[arg(long)]
        min_match_terms: Option<usize>,
    },
    /// Run a seeded oracle check.
    Verify {
        #[arg(value_parser = ["plucker", "plucker4", "states", "octahedron", "kp", "permutation"])]
        check: String,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        cutoff: Option<usize>,
        #[arg(long)]
        max_weight: Option<usize>,
        #[arg(long)]
        dim: Option<usize>,
        /// Which four-term reading decides pass/fail.
        #[arg(long, value_parser = ["verbatim", "symmetric"])]
        reading: Option<String>,
    },
    /// Look a sequence up in a stripped OEIS file.
    Match {
        /// Comma separated integers.
        #[arg(long, allow_hyphen_values = true)]
        terms: String,
        #[arg(long)]
        oeis: Option<PathBuf>,
        #[arg(long)]
        online: bool,
        #[arg(long)]
        min_match_terms: Option<usize>,
        /// Keep leading ones in the query.
        #[arg(long)]
        no_trim: bool,
        /// Only match at the start of an entry.
        #[arg(long)]
        anchored: bool,
    },
}

/// Errors carry their exit code: 2 input, 3 torsion, 4 rank, 5 unsolvable.
#[derive(Debug)]
enum Failure {
    Input(String),
    Torsion(Vec<BigInt>, String),
    Rank(String),
    Unsolvable(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Torsion(..) => 3,
            Failure::Rank(_) => 4,
            Failure::Unsolvable(_) => 5,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m)
            | Failure::Torsion(_, m)
            | Failure::Rank(m)
            | Failure::Unsolvable(m) => m,
        }
    }

    fn to_json(&self) -> Value {
        let kind = match self {
            Failure::Input(_) => "input",
            Failure::Torsion(..) => "torsion",
            Failure::Rank(_) => "rank",
            Failure::Unsolvable(_) => "unsolvable",
        };
        let mut v = json!({"kind": kind, "exit_code": self.code(), "message": self.message()});
        if let Failure::Torsion(factors, _) = self {
            v["invariant_factors"] = factors.iter().map(big_to_json).collect();
        }
        v
    }
}

impl From<String> for Failure {
    fn from(m: String) -> Self {
        Failure::Input(m)
    }
}

impl From<LatticeError> for Failure {
    fn from(e: LatticeError) -> Self {
        let m = e.to_string();
        match e {
            LatticeError::Torsion(f) => Failure::Torsion(f, m),
            LatticeError::RankDeficient | LatticeError::UnsupportedRank(_) => Failure::Rank(m),
            _ => Failure::Input(m),
        }
    }
}

impl From<RecurrenceError> for Failure {
    fn from(e: RecurrenceError) -> Self {
        match e {
            RecurrenceError::Lattice(l) => l.into(),
            RecurrenceError::Unsolvable { .. } => Failure::Unsolvable(e.to_string()),
            other => Failure::Input(other.to_string()),
        }
    }
}

fn big_to_json(x: &BigInt) -> Value {
    serde_json::from_str(&x.to_string()).unwrap_or_else(|_| Value::String(x.to_string()))
}

/// What a command prints on success, plus its exit code.
struct Report {
    result: Value,
    text: String,
    code: u8,
}

impl Report {
    fn ok(result: Value, text: String) -> Self {
        Report {
            result,
            text,
            code: 0,
        }
    }
}

struct Ctx {
    file: FileConfig,
    seed: u64,
    json: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let file = match cli.config.as_deref().map(FileConfig::load).transpose() {
        Ok(f) => f.unwrap_or_default(),
        Err(e) => return fail_early(&e),
    };
    let resolved = file
        .pick(cli.seed, "seed", 0)
        .and_then(|seed| Ok((seed, file.switch(cli.json, "json")?)));
    let (seed, json) = match resolved {
        Ok(v) => v,
        Err(e) => return fail_early(&e),
    };
    let ctx = Ctx { file, seed, json };
    let mut config = json!({"seed": seed});
    let outcome = match &cli.cmd {
        Cmd::Maya {
            young,
            charge,
            maya,
        } => cmd_maya(young.as_deref(), *charge, maya.as_deref(), &mut config),
        Cmd::Derive { matrix, polygon } => {
            cmd_derive(matrix.as_deref(), polygon.as_deref(), &mut config)
        }
        Cmd::Generate {
            recurrence_json,
            matrix,
            terms,
            init,
        } => cmd_generate(
            &ctx,
            recurrence_json.as_deref(),
            matrix.as_deref(),
            *terms,
            init.as_deref(),
            &mut config,
        ),
        Cmd::Scan {
            bound,
            terms,
            workers,
            oeis,
            out,
            online,
            min_match_terms,
        } => {
            let args = ScanArgs {
                bound: *bound,
                terms: *terms,
                workers: *workers,
                oeis: oeis.clone(),
                out: out.clone(),
                online: *online,
                min_match_terms: *min_match_terms,
            };
            return finish_scan(&ctx, cmd_scan(&ctx, args, &mut config), &config);
        }
        Cmd::Verify {
            check,
            trials,
            cutoff,
            max_weight,
            dim,
            reading,
        } => {
            let args = VerifyArgs {
                check: check.clone(),
                trials: *trials,
                cutoff: *cutoff,
                max_weight: *max_weight,
                dim: *dim,
                reading: reading.clone(),
            };
            cmd_verify(&ctx, args, &mut config)
        }
        Cmd::Match {
            terms,
            oeis,
            online,
            min_match_terms,
            no_trim,
            anchored,
        } => {
            let args = MatchArgs {
                terms: terms.clone(),
                oeis: oeis.clone(),
                online: *online,
                min_match_terms: *min_match_terms,
                no_trim: *no_trim,
                anchored: *anchored,
            };
            cmd_match(&ctx, args, &mut config)
        }
    };
    config["command"] = Value::String(command_name(&cli.cmd).into());
    emit(&ctx, outcome, &config)
}

fn command_name(cmd: &Cmd) -> &'static str {
    match cmd {
        Cmd::Maya { .. } => "maya",
        Cmd::Derive { .. } => "derive",
        Cmd::Generate { .. } => "generate",
        Cmd::Scan { .. } => "scan",
        Cmd::Verify { .. } => "verify",
        Cmd::Match { .. } => "match",
    }
}

fn fail_early(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn print_json(v: &Value) {
    let mut out = io::stdout().lock();
    let _ = serde_json::to_writer(&mut out, v);
    let _ = writeln!(out);
}

fn emit(ctx: &Ctx, outcome: Result<Report, Failure>, config: &Value) -> ExitCode {
    match outcome {
        Ok(r) => {
            if ctx.json {
                print_json(&json!({"config": config, "result": r.result}));
            } else {
                println!("{}", r.text);
            }
            ExitCode::from(r.code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            if ctx.json {
                print_json(&json!({"config": config, "error": f.to_json()}));
            }
            ExitCode::from(f.code())
        }
    }
}

fn parse_matrix(s: &str) -> Result<SublatticeBasis, Failure> {
    Ok(s.parse::<SublatticeBasis>()?)
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>, Failure> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse()
                .map_err(|_| Failure::Input(format!("bad {what} {t:?}")))
        })
        .collect()
}

fn cmd_maya(
    young: Option<&str>,
    charge: Option<i64>,
    maya: Option<&str>,
    config: &mut Value,
) -> Result<Report, Failure> {
    if let Some(text) = maya {
        config["maya"] = json!(text);
        let m: MayaDiagram =
            serde_json::from_str(text).map_err(|e| format!("bad Maya diagram: {e}"))?;
        let (lambda, l) = young_charge_from_maya(&m);
        let result = json!({"young": lambda.parts(), "charge": l});
        return Ok(Report::ok(
            result,
            format!("partition {lambda}, charge {l}"),
        ));
    }
    let young = young.unwrap_or_default();
    let l = charge.unwrap_or(0);
    config["young"] = json!(young);
    config["charge"] = json!(l);
    let lambda: Partition = young
        .parse()
        .map_err(|e| format!("bad partition {young:?}: {e}"))?;
    let m = maya_from_young_charge(&lambda, l);
    let result = serde_json::to_value(&m).expect("serializable");
    Ok(Report::ok(result.clone(), result.to_string()))
}

fn cmd_derive(
    matrix: Option<&str>,
    polygon: Option<&str>,
    config: &mut Value,
) -> Result<Report, Failure> {
    let basis = match (matrix, polygon) {
        (Some(m), _) => {
            config["matrix"] = json!(m);
            parse_matrix(m)?
        }
        (None, Some(p)) => {
            config["polygon"] = json!(p);
            polygon_to_basis(&p.parse::<EdgePolygon>()?)
        }
        (None, None) => unreachable!("clap requires one input"),
    };
    let d = derive(&basis)?;
    let mut result = serde_json::to_value(&d).expect("serializable");
    result["key"] = json!(d.recurrence.key());
    result["equation"] = json!(d.recurrence.to_string());
    let text = format!(
        "basis {}\nreduced {}\nw = {:?}, step {}\nrecurrence {}\nkey {}",
        d.basis,
        d.reduced,
        d.quotient.w,
        d.quotient.step,
        d.recurrence,
        d.recurrence.key()
    );
    Ok(Report::ok(result, text))
}

fn read_arg(s: &str) -> Result<String, Failure> {
    match s.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| Failure::Input(format!("cannot read {path}: {e}"))),
        None => Ok(s.to_string()),
    }
}

fn cmd_generate(
    ctx: &Ctx,
    recurrence_json: Option<&str>,
    matrix: Option<&str>,
    terms: Option<usize>,
    init: Option<&str>,
    config: &mut Value,
) -> Result<Report, Failure> {
    let count = ctx.file.pick(terms, "terms", 24)?;
    config["terms"] = json!(count);
    let rec: BilinearRecurrence = match (recurrence_json, matrix) {
        (Some(r), _) => {
            config["recurrence_json"] = json!(r);
            serde_json::from_str(&read_arg(r)?).map_err(|e| format!("bad recurrence JSON: {e}"))?
        }
        (None, Some(m)) => {
            config["matrix"] = json!(m);
            derive(&parse_matrix(m)?)?.recurrence
        }
        (None, None) => unreachable!("clap requires one input"),
    };
    let init: Option<Vec<Rational>> = init
        .map(|s| {
            config["init"] = json!(s);
            s.split(',')
                .map(|t| {
                    parse_rational(t.trim())
                        .ok_or_else(|| Failure::Input(format!("bad rational {t:?}")))
                })
                .collect()
        })
        .transpose()?;
    let run = generate(&rec, init.as_deref(), count)?;
    let text = format!(
        "{}\nstatus {}\n{}",
        rec,
        run.status.label(),
        run.terms
            .iter()
            .map(format_rational)
            .collect::<Vec<_>>()
            .join(",")
    );
    Ok(Report::ok(
        serde_json::to_value(&run).expect("serializable"),
        text,
    ))
}

struct VerifyArgs {
    check: String,
    trials: Option<usize>,
    cutoff: Option<usize>,
    max_weight: Option<usize>,
    dim: Option<usize>,
    reading: Option<String>,
}

fn cmd_verify(ctx: &Ctx, a: VerifyArgs, config: &mut Value) -> Result<Report, Failure> {
    let check: Check = a
        .check
        .parse()
        .map_err(|e: tauseq::verify::VerifyError| e.to_string())?;
    let f = &ctx.file;
    let reading = match f
        .pick(a.reading, "reading", "verbatim".to_string())?
        .as_str()
    {
        "verbatim" => Reading::Verbatim,
        "symmetric" => Reading::Symmetric,
        other => return Err(Failure::Input(format!("unknown reading {other:?}"))),
    };
    let opts = VerifyOptions {
        trials: f.pick(a.trials, "trials", 100)?,
        seed: ctx.seed,
        cutoff: a.cutoff.map_or_else(|| f.get("cutoff"), |c| Ok(Some(c)))?,
        max_weight: f.pick(a.max_weight, "max_weight", 6)?,
        dim: a.dim.map_or_else(|| f.get("dim"), |d| Ok(Some(d)))?,
        reading,
    };
    config["check"] = json!(check.name());
    config["trials"] = json!(opts.trials);
    config["cutoff"] = json!(opts.cutoff);
    config["max_weight"] = json!(opts.max_weight);
    config["dim"] = json!(opts.dim);
    config["reading"] = json!(opts.reading);
    let report = run_check(check, &opts).map_err(|e| Failure::Input(e.to_string()))?;
    let mut text = format!(
        "{}: {} trials, {} failures (seed {})",
        report.check, report.trials, report.failures, report.seed
    );
    if let Some(first) = &report.first_failure {
        text.push_str(&format!("\nfirst failure: {first}"));
    }
    let code = if report.passed() { 0 } else { 1 };
    Ok(Report {
        result: serde_json::to_value(&report).expect("serializable"),
        text,
        code,
    })
}

fn load_db(path: Option<&Path>) -> Result<StrippedDb, Failure> {
    let Some(path) = path else {
        return Ok(StrippedDb::new());
    };
    let file = File::open(path).map_err(|e| format!("cannot open {}: {e}", path.display()))?;
    let loaded = load_stripped(BufReader::new(file)).map_err(|e| e.to_string())?;
    for m in &loaded.malformed {
        eprintln!("warning: {}:{}: {}", path.display(), m.line, m.reason);
    }
    Ok(loaded.db)
}

fn online_lookup(terms: &[BigInt]) -> Value {
    let client = OnlineClient::from_env();
    match client.search(terms) {
        Ok(r) => serde_json::to_value(&r).expect("serializable"),
        Err(e) => {
            eprintln!("warning: online search failed: {e}");
            json!({"advisory": true, "endpoint": client.endpoint(), "error": e.to_string()})
        }
    }
}

struct MatchArgs {
    terms: String,
    oeis: Option<PathBuf>,
    online: bool,
    min_match_terms: Option<usize>,
    no_trim: bool,
    anchored: bool,
}

fn policy_from(
    f: &FileConfig,
    min: Option<usize>,
    no_trim: bool,
    anchored: bool,
) -> Result<MatchPolicy, Failure> {
    let d = MatchPolicy::default();
    let trim = !no_trim && f.get("trim_leading_ones")?.unwrap_or(d.trim_leading_ones);
    let offset = !anchored && f.get("allow_offset")?.unwrap_or(d.allow_offset);
    let min = f.pick(min, "min_match_terms", d.min_match_terms)?;
    MatchPolicy::new(trim, min, offset).map_err(|e| Failure::Input(e.to_string()))
}

fn cmd_match(ctx: &Ctx, a: MatchArgs, config: &mut Value) -> Result<Report, Failure> {
    let f = &ctx.file;
    let oeis: Option<PathBuf> = a.oeis.map_or_else(|| f.get("oeis"), |p| Ok(Some(p)))?;
    let online = f.switch(a.online, "online")?;
    let policy = policy_from(f, a.min_match_terms, a.no_trim, a.anchored)?;
    config["terms"] = json!(a.terms);
    config["oeis"] = json!(oeis);
    config["online"] = json!(online);
    config["policy"] = serde_json::to_value(policy).expect("serializable");
    let terms: Vec<BigInt> = parse_list(&a.terms, "term")?;
    let db = load_db(oeis.as_deref())?;
    let matches = match_sequence(&db, &terms, &policy).map_err(|e| e.to_string())?;
    let mut result = json!({
        "query": policy.trim(&terms).iter().map(ToString::to_string).collect::<Vec<_>>(),
        "matches": matches,
    });
    let mut text = if matches.is_empty() {
        "no matches".to_string()
    } else {
        matches
            .iter()
            .map(|m| format!("{} at {}", m.a_number, m.position))
            .collect::<Vec<_>>()
            .join("\n")
    };
    if online {
        let hits = online_lookup(policy.trim(&terms));
        text.push_str(&format!("\nonline (advisory): {hits}"));
        result["online"] = hits;
    }
    Ok(Report::ok(result, text))
}

struct ScanArgs {
    bound: Option<i64>,
    terms: Option<usize>,
    workers: Option<usize>,
    oeis: Option<PathBuf>,
    out: Option<PathBuf>,
    online: bool,
    min_match_terms: Option<usize>,
}

struct ScanDone {
    outcome: tauseq::scan::ScanOutcome,
    out: Option<PathBuf>,
    summary_path: Option<PathBuf>,
    online: Option<Value>,
}

fn cmd_scan(ctx: &Ctx, a: ScanArgs, config: &mut Value) -> Result<ScanDone, Failure> {
    let f = &ctx.file;
    let d = ScanConfig::default();
    let cfg = ScanConfig {
        bound: f.pick(a.bound, "bound", d.bound)?,
        terms: f.pick(a.terms, "terms", d.terms)?,
        seed: ctx.seed,
        workers: f.pick(a.workers, "workers", d.workers)?,
        policy: policy_from(f, a.min_match_terms, false, false)?,
    };
    let oeis: Option<PathBuf> = a.oeis.map_or_else(|| f.get("oeis"), |p| Ok(Some(p)))?;
    let out: Option<PathBuf> = a.out.map_or_else(|| f.get("out"), |p| Ok(Some(p)))?;
    let online = f.switch(a.online, "online")?;
    config["command"] = json!("scan");
    config["scan"] = serde_json::to_value(&cfg).expect("serializable");
    config["workers"] = json!(cfg.workers);
    config["oeis"] = json!(oeis);
    config["out"] = json!(out);
    config["online"] = json!(online);
    if oeis.is_none() {
        eprintln!("warning: no --oeis file given, nothing will match");
    }
    let db = load_db(oeis.as_deref())?;
    let outcome = run_scan(&cfg, &db).map_err(|e| e.to_string())?;
    let summary_path = match &out {
        Some(p) => Some(write_outputs(&outcome, p).map_err(|e| e.to_string())?),
        None => None,
    };
    let online = online.then(|| {
        let lookups: Vec<Value> = outcome
            .records
            .iter()
            .filter(|r| r.status == "ok" && r.matches.is_empty() && r.duplicate_of.is_none())
            .map(|r| {
                let terms: Vec<BigInt> = r.terms.iter().filter_map(|t| t.parse().ok()).collect();
                json!({"key": r.key, "online": online_lookup(cfg.policy.trim(&terms))})
            })
            .collect();
        Value::Array(lookups)
    });
    Ok(ScanDone {
        outcome,
        out,
        summary_path,
        online,
    })
}

fn finish_scan(ctx: &Ctx, done: Result<ScanDone, Failure>, config: &Value) -> ExitCode {
    let done = match done {
        Ok(d) => d,
        Err(f) => return emit(ctx, Err(f), config),
    };
    let summary = serde_json::to_value(&done.outcome.summary).expect("serializable");
    let mut tail = json!({"config": config, "summary": summary});
    if let Some(p) = &done.summary_path {
        tail["records"] = json!(done.out);
        tail["summary_file"] = json!(p);
    }
    if let Some(o) = done.online {
        tail["online"] = o;
    }
    if done.out.is_none() {
        let mut stdout = io::stdout().lock();
        if let Err(e) = write_records(&done.outcome, &mut stdout) {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    if ctx.json {
        // one JSON object per line, the run summary last
        println!("{tail}");
    } else {
        let s = &done.outcome.summary;
        eprintln!(
            "scanned {} bases: {} integral ({} matched), {} non-integral, {} degenerate, {} skipped, {} unique recurrences",
            s.total,
            s.integral,
            s.matched,
            s.non_integral,
            s.degenerate,
            s.skipped.values().sum::<usize>(),
            s.unique_recurrences
        );
        if let Some(p) = &done.summary_path {
            eprintln!("summary written to {}", p.display());
        }
    }
    ExitCode::SUCCESS
}
