//! Offline sequence lookup against an OEIS "stripped" snapshot.
//!
//! Each data line reads `A000045 ,0,1,1,2,3,5,`; lines starting with `#` are
//! comments. Gzip input is detected from its magic bytes.

mod online;

pub use online::{
    OnlineClient, OnlineError, OnlineHit, OnlineResults, DEFAULT_ENDPOINT, ENDPOINT_ENV,
};

use std::collections::BTreeMap;
use std::io::{self, Read, Write};

use flate2::read::MultiGzDecoder;
use num_bigint::BigInt;
use num_traits::One;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OeisError {
    #[error("cannot read stripped file: {0}")]
    Io(#[from] io::Error),
    #[error("query has {len} terms after trimming, at least {min} needed")]
    QueryTooShort { len: usize, min: usize },
    #[error("min_match_terms must be at least 4, got {0}")]
    BadPolicy(usize),
}

/// A line of the input that could not be parsed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MalformedLine {
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StrippedDb {
    entries: BTreeMap<String, Vec<BigInt>>,
}

fn valid_a_number(id: &str) -> bool {
    id.len() == 7 && id.starts_with('A') && id[1..].bytes().all(|b| b.is_ascii_digit())
}

impl StrippedDb {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, id: &str, terms: Vec<BigInt>) -> bool {
        if !valid_a_number(id) || terms.is_empty() {
            return false;
        }
        self.entries.insert(id.to_string(), terms);
        true
    }

    pub fn get(&self, id: &str) -> Option<&[BigInt]> {
        self.entries.get(id).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[BigInt])> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }
}

/// A parsed database together with the lines that were skipped.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Loaded {
    pub db: StrippedDb,
    pub malformed: Vec<MalformedLine>,
}

fn parse_line(line: &str) -> Result<(String, Vec<BigInt>), String> {
    let (id, rest) = line
        .split_once(|c: char| c.is_whitespace())
        .ok_or("no space after the A-number")?;
    if !valid_a_number(id) {
        return Err(format!("bad A-number {id:?}"));
    }
    let rest = rest
        .trim()
        .strip_prefix(',')
        .ok_or("missing leading comma after the A-number")?;
    let terms = rest
        .split(',')
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.trim()
                .parse::<BigInt>()
                .map_err(|_| format!("bad term {t:?}"))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if terms.is_empty() {
        return Err("no terms".into());
    }
    Ok((id.to_string(), terms))
}

pub fn load_stripped<R: Read>(mut source: R) -> Result<Loaded, OeisError> {
    let mut raw = Vec::new();
    source.read_to_end(&mut raw)?;
    let text = if raw.starts_with(&[0x1f, 0x8b]) {
        let mut s = String::new();
        MultiGzDecoder::new(raw.as_slice()).read_to_string(&mut s)?;
        s
    } else {
        String::from_utf8(raw).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))?
    };
    let mut out = Loaded::default();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim_end();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let number = i + 1;
        match parse_line(line) {
            Ok((id, _)) if out.db.entries.contains_key(&id) => out.malformed.push(MalformedLine {
                line: number,
                reason: format!("duplicate entry {id}"),
            }),
            Ok((id, terms)) => {
                out.db.entries.insert(id, terms);
            }
            Err(reason) => out.malformed.push(MalformedLine {
                line: number,
                reason,
            }),
        }
    }
    Ok(out)
}

pub fn write_stripped<W: Write>(db: &StrippedDb, mut out: W) -> io::Result<()> {
    for (id, terms) in &db.entries {
        write!(out, "{id} ,")?;
        for t in terms {
            write!(out, "{t},")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MatchPolicy {
    pub trim_leading_ones: bool,
    pub min_match_terms: usize,
    pub allow_offset: bool,
}

impl Default for MatchPolicy {
    fn default() -> Self {
        MatchPolicy {
            trim_leading_ones: true,
            min_match_terms: 10,
            allow_offset: true,
        }
    }
}

impl MatchPolicy {
    pub fn new(
        trim_leading_ones: bool,
        min_match_terms: usize,
        allow_offset: bool,
    ) -> Result<Self, OeisError> {
        if min_match_terms < 4 {
            return Err(OeisError::BadPolicy(min_match_terms));
        }
        Ok(MatchPolicy {
            trim_leading_ones,
            min_match_terms,
            allow_offset,
        })
    }

    /// The part of `terms` actually searched for.
    pub fn trim<'a>(&self, terms: &'a [BigInt]) -> &'a [BigInt] {
        if self.trim_leading_ones {
            let start = terms
                .iter()
                .position(|t| !t.is_one())
                .unwrap_or(terms.len());
            &terms[start..]
        } else {
            terms
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Match {
    pub a_number: String,
    /// 0-based index into the entry where the trimmed query starts.
    pub position: usize,
}

/// Entries containing the trimmed query as a contiguous run, by A-number.
pub fn match_sequence(
    db: &StrippedDb,
    terms: &[BigInt],
    policy: &MatchPolicy,
) -> Result<Vec<Match>, OeisError> {
    if policy.min_match_terms < 4 {
        return Err(OeisError::BadPolicy(policy.min_match_terms));
    }
    let query = policy.trim(terms);
    if query.len() < policy.min_match_terms {
        return Err(OeisError::QueryTooShort {
            len: query.len(),
            min: policy.min_match_terms,
        });
    }
    let mut hits = Vec::new();
    for (id, entry) in &db.entries {
        let found = if policy.allow_offset {
            entry.windows(query.len()).position(|w| w == query)
        } else {
            entry.starts_with(query).then_some(0)
        };
        if let Some(position) = found {
            hits.push(Match {
                a_number: id.clone(),
                position,
            });
        }
    }
    Ok(hits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use flate2::write::GzEncoder;
    use flate2::Compression;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    const SAMPLE: &str = "# OEIS sample\n\
A000045 ,0,1,1,2,3,5,8,13,21,34,55,89,144,233,377,\n\
A018896 ,1,1,1,1,1,1,1,1,2,3,4,5,9,18,34,93,\n\
A000001,0,1,1,1,2,\n\
A000002 ,1,2,x,\n\
\n\
A000003 ,-1,2,-3,\n";

    #[test]
    fn parses_and_reports() {
        let l = load_stripped(SAMPLE.as_bytes()).unwrap();
        assert_eq!(l.db.len(), 3);
        assert_eq!(l.db.get("A018896").unwrap().len(), 16);
        assert_eq!(l.db.get("A000003").unwrap(), big(&[-1, 2, -3]).as_slice());
        let lines: Vec<usize> = l.malformed.iter().map(|m| m.line).collect();
        assert_eq!(lines, vec![4, 5]);
        assert!(l.malformed[0].reason.contains("A-number"));
    }

    #[test]
    fn missing_leading_comma() {
        let l = load_stripped("A000004 1,2,3,\n".as_bytes()).unwrap();
        assert!(l.db.is_empty());
        assert_eq!(l.malformed[0].line, 1);
        assert!(l.malformed[0].reason.contains("leading comma"));
    }

    #[test]
    fn empty_and_duplicate() {
        assert!(load_stripped(&b""[..]).unwrap().db.is_empty());
        let l = load_stripped("A000010 ,1,2,\nA000010 ,3,4,\n".as_bytes()).unwrap();
        assert_eq!(l.db.get("A000010").unwrap(), big(&[1, 2]).as_slice());
        assert_eq!(l.malformed.len(), 1);
    }

    #[test]
    fn gzip_is_detected() {
        let mut enc = GzEncoder::new(Vec::new(), Compression::default());
        enc.write_all(SAMPLE.as_bytes()).unwrap();
        let gz = enc.finish().unwrap();
        assert_eq!(
            load_stripped(gz.as_slice()).unwrap(),
            load_stripped(SAMPLE.as_bytes()).unwrap()
        );
    }

    #[test]
    fn write_then_read() {
        let db = load_stripped(SAMPLE.as_bytes()).unwrap().db;
        let mut buf = Vec::new();
        write_stripped(&db, &mut buf).unwrap();
        let again = load_stripped(buf.as_slice()).unwrap();
        assert!(again.malformed.is_empty());
        assert_eq!(again.db, db);
    }

    #[test]
    fn matching() {
        let db = load_stripped(SAMPLE.as_bytes()).unwrap().db;
        let p = MatchPolicy::default();
        let q = big(&[1, 1, 1, 2, 3, 4, 5, 9, 18, 34, 93, 180]);
        let p8 = MatchPolicy::new(true, 8, true).unwrap();
        // the entry stops at 93, so the full query is not contained
        assert!(match_sequence(&db, &q, &p8).unwrap().is_empty());
        let hits = match_sequence(&db, &q[..11], &p8).unwrap();
        assert_eq!(
            hits,
            vec![Match {
                a_number: "A018896".into(),
                position: 8
            }]
        );

        let fib = big(&[2, 3, 5, 8, 13, 21, 34, 55, 89, 144]);
        assert_eq!(match_sequence(&db, &fib, &p).unwrap()[0].position, 3);
        let anchored = MatchPolicy {
            allow_offset: false,
            ..p
        };
        assert!(match_sequence(&db, &fib, &anchored).unwrap().is_empty());

        assert!(matches!(
            match_sequence(&db, &big(&[1, 1, 1, 2, 3]), &p),
            Err(OeisError::QueryTooShort { len: 2, min: 10 })
        ));
        assert!(match_sequence(&StrippedDb::new(), &fib, &p)
            .unwrap()
            .is_empty());
        assert!(matches!(
            MatchPolicy::new(true, 3, true),
            Err(OeisError::BadPolicy(3))
        ));
    }
}
