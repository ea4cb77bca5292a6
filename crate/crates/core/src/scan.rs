//! Exhaustive scan over quadrilaterals: derive, generate, match.

use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::lattice::{polygon_to_basis, EdgePolygon, LatticeError, SublatticeBasis};
use crate::oeis::{match_sequence, Match, MatchPolicy, StrippedDb};
use crate::recurrence::{
    derive_recurrence, generate, BilinearRecurrence, RecurrenceError, RunStatus,
};

#[derive(Debug, Error)]
pub enum ScanError {
    #[error("coordinate bound must be at least 1")]
    Bound,
    #[error("need at least 16 terms per sequence, got {0}")]
    Terms(usize),
    #[error("worker count must be positive")]
    Workers,
    #[error("cannot build worker pool: {0}")]
    Pool(String),
    #[error("dedup key {key} produced different terms for {first} and {second}")]
    DedupMismatch {
        key: String,
        first: String,
        second: String,
    },
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScanConfig {
    pub bound: i64,
    pub terms: usize,
    pub seed: u64,
    #[serde(skip)]
    pub workers: usize,
    pub policy: MatchPolicy,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            bound: 5,
            terms: 24,
            seed: 0,
            workers: 1,
            policy: MatchPolicy::default(),
        }
    }
}

impl ScanConfig {
    pub fn validate(&self) -> Result<(), ScanError> {
        if self.bound < 1 {
            return Err(ScanError::Bound);
        }
        if self.terms < 16 {
            return Err(ScanError::Terms(self.terms));
        }
        if self.workers == 0 {
            return Err(ScanError::Workers);
        }
        Ok(())
    }
}

fn cross(u: (i64, i64), v: (i64, i64)) -> i64 {
    u.0 * v.1 - u.1 * v.0
}

/// Convex lattice quadrilaterals with edge coordinates in `[-bound, bound]`,
/// one per cyclic rotation class, in lexicographic order of edge lists.
pub fn enumerate_polygons(bound: i64) -> Vec<EdgePolygon> {
    let range = -bound..=bound;
    let vs: Vec<(i64, i64)> = range
        .clone()
        .flat_map(|x| range.clone().map(move |y| (x, y)))
        .collect();
    let mut out = Vec::new();
    for &e1 in &vs {
        for &e2 in vs.iter().filter(|&&e2| cross(e1, e2) > 0) {
            for &e3 in vs.iter().filter(|&&e3| cross(e2, e3) > 0) {
                let e4 = (-e1.0 - e2.0 - e3.0, -e1.1 - e2.1 - e3.1);
                if e4.0.abs() > bound || e4.1.abs() > bound {
                    continue;
                }
                if cross(e3, e4) <= 0 || cross(e4, e1) <= 0 {
                    continue;
                }
                let edges = [e1, e2, e3, e4];
                let smallest = (1..4).all(|r| {
                    let rot: Vec<_> = edges.iter().cycle().skip(r).take(4).copied().collect();
                    edges.as_slice() <= rot.as_slice()
                });
                if smallest {
                    out.push(EdgePolygon::from_edges(&edges).expect("convex by construction"));
                }
            }
        }
    }
    out
}

pub fn enumerate_bases(cfg: &ScanConfig) -> Vec<SublatticeBasis> {
    if cfg.bound < 1 {
        return Vec::new();
    }
    enumerate_polygons(cfg.bound)
        .iter()
        .map(polygon_to_basis)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SkipReason {
    Torsion,
    Rank,
    Unsolvable,
    /// The recurrence needs more initial values than terms requested.
    Window,
    Other,
}

impl SkipReason {
    fn of(e: &RecurrenceError) -> Self {
        match e {
            RecurrenceError::Lattice(LatticeError::Torsion(_)) => SkipReason::Torsion,
            RecurrenceError::Lattice(
                LatticeError::RankDeficient | LatticeError::UnsupportedRank(_),
            ) => SkipReason::Rank,
            RecurrenceError::Unsolvable { .. } => SkipReason::Unsolvable,
            _ => SkipReason::Other,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScanRecord {
    pub basis: SublatticeBasis,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skip_reason: Option<SkipReason>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub key: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub recurrence: Option<BilinearRecurrence>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub terms: Vec<String>,
    pub matches: Vec<Match>,
    /// Earlier basis with the same dedup key.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub duplicate_of: Option<SublatticeBasis>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ScanSummary {
    pub total: usize,
    pub skipped: BTreeMap<SkipReason, usize>,
    pub integral: usize,
    pub non_integral: usize,
    pub degenerate: usize,
    pub matched: usize,
    pub unmatched: usize,
    pub unique_recurrences: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScanOutcome {
    pub config: ScanConfig,
    pub records: Vec<ScanRecord>,
    pub summary: ScanSummary,
}

fn process(basis: SublatticeBasis, cfg: &ScanConfig, db: &StrippedDb) -> ScanRecord {
    let mut rec = ScanRecord {
        basis,
        status: "skipped".into(),
        skip_reason: None,
        detail: None,
        key: None,
        recurrence: None,
        terms: Vec::new(),
        matches: Vec::new(),
        duplicate_of: None,
    };
    let recurrence = match derive_recurrence(&rec.basis) {
        Ok(r) => r,
        Err(e) => {
            rec.skip_reason = Some(SkipReason::of(&e));
            rec.detail = Some(e.to_string());
            return rec;
        }
    };
    let run = match generate(&recurrence, None, cfg.terms) {
        Ok(run) => run,
        Err(e) => {
            rec.skip_reason = Some(match e {
                RecurrenceError::CountTooSmall { .. } => SkipReason::Window,
                _ => SkipReason::Other,
            });
            rec.detail = Some(e.to_string());
            rec.key = Some(recurrence.key());
            rec.recurrence = Some(recurrence);
            return rec;
        }
    };
    rec.status = run.status.label().into();
    rec.terms = run.rendered_terms();
    rec.key = Some(recurrence.key());
    rec.recurrence = Some(recurrence);
    if run.status == RunStatus::Ok {
        let ints: Vec<BigInt> = run.terms.iter().map(|t| t.to_integer()).collect();
        match match_sequence(db, &ints, &cfg.policy) {
            Ok(m) => rec.matches = m,
            Err(e) => rec.detail = Some(e.to_string()),
        }
    }
    rec
}

/// Runs the whole pipeline. Work units are independent; results are merged in
/// enumeration order by the calling thread, so the output does not depend on
/// the number of workers.
pub fn run_scan(cfg: &ScanConfig, db: &StrippedDb) -> Result<ScanOutcome, ScanError> {
    cfg.validate()?;
    let bases = enumerate_bases(cfg);
    let mut records: Vec<ScanRecord> = if cfg.workers == 1 {
        bases.into_iter().map(|b| process(b, cfg, db)).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.workers)
            .build()
            .map_err(|e| ScanError::Pool(e.to_string()))?;
        pool.install(|| bases.into_par_iter().map(|b| process(b, cfg, db)).collect())
    };

    let mut summary = ScanSummary {
        total: records.len(),
        ..Default::default()
    };
    let mut first_by_key: HashMap<String, usize> = HashMap::new();
    for i in 0..records.len() {
        if let Some(reason) = records[i].skip_reason {
            *summary.skipped.entry(reason).or_default() += 1;
            continue;
        }
        let key = records[i].key.clone().expect("derived records carry a key");
        if let Some(&j) = first_by_key.get(&key) {
            if records[j].terms != records[i].terms {
                return Err(ScanError::DedupMismatch {
                    key,
                    first: records[j].basis.to_string(),
                    second: records[i].basis.to_string(),
                });
            }
            records[i].duplicate_of = Some(records[j].basis.clone());
        } else {
            first_by_key.insert(key, i);
        }
        let r = &records[i];
        match r.status.as_str() {
            "ok" => {
                summary.integral += 1;
                if r.matches.is_empty() {
                    summary.unmatched += 1;
                } else {
                    summary.matched += 1;
                }
            }
            "non-integral" => summary.non_integral += 1,
            _ => summary.degenerate += 1,
        }
    }
    summary.unique_recurrences = first_by_key.len();
    Ok(ScanOutcome {
        config: cfg.clone(),
        records,
        summary,
    })
}

/// Path of the summary written next to the record file.
pub fn summary_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".summary.json");
    out.with_file_name(name)
}

pub fn write_records<W: Write>(outcome: &ScanOutcome, mut out: W) -> Result<(), ScanError> {
    for r in &outcome.records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

/// Writes the records as JSON Lines to `out` and the summary beside it.
pub fn write_outputs(outcome: &ScanOutcome, out: &Path) -> Result<PathBuf, ScanError> {
    write_records(outcome, BufWriter::new(File::create(out)?))?;
    let side = summary_path(out);
    let mut f = BufWriter::new(File::create(&side)?);
    serde_json::to_writer_pretty(
        &mut f,
        &serde_json::json!({ "config": outcome.config, "summary": outcome.summary }),
    )?;
    f.write_all(b"\n")?;
    f.flush()?;
    Ok(side)
}
