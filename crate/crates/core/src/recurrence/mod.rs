//! Three-term bilinear recurrences compiled from the octahedral relation of a
//! doubly periodic tau function.

mod permutation;
mod sequence;

pub use permutation::{
    act_permutation, q_sigma, table_octahedron_residual, tau_table, Permutation, PermutationError,
    TauTable,
};
pub use sequence::{generate, RunStatus, SequenceRun};

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::lattice::{hermite_reduce, quotient_map, LatticeError, QuotientMap, SublatticeBasis};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RecurrenceError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("degenerate recurrence: top offset {top} is not isolated in pairs {}", render_pairs(.pairs))]
    Unsolvable { top: i64, pairs: Vec<(i64, i64)> },
    #[error("signs must be +1 or -1, got {0:?}")]
    BadSigns(Vec<i64>),
    #[error("expected 3 pairs and 3 signs, got {0} and {1}")]
    Arity(usize, usize),
    #[error("window {given} does not match the recurrence (expected {expected})")]
    WindowMismatch { expected: i64, given: i64 },
    #[error("initial window needs {expected} values, got {got}")]
    InitLength { expected: usize, got: usize },
    #[error("requested {count} terms, fewer than the window {window}")]
    CountTooSmall { count: usize, window: usize },
}

fn render_pairs(p: &[(i64, i64)]) -> String {
    p.iter()
        .map(|(a, b)| format!("({a},{b})"))
        .collect::<Vec<_>>()
        .join(", ")
}

type Term = (i64, i64, i8);

/// Translation to min offset 0, each pair `(max, min)`, pairs descending,
/// first sign positive.
fn normalize(terms: [Term; 3]) -> [Term; 3] {
    let lo = terms
        .iter()
        .map(|t| t.0.min(t.1))
        .min()
        .expect("three terms");
    let mut out = terms.map(|(p, q, s)| (p.max(q) - lo, p.min(q) - lo, s));
    out.sort_by(|x, y| y.cmp(x));
    if out[0].2 < 0 {
        out = out.map(|(p, q, s)| (p, q, -s));
    }
    out
}

fn solvable(terms: &[Term; 3]) -> Result<(), RecurrenceError> {
    let top = terms[0].0;
    let hits: Vec<(i64, i64)> = terms
        .iter()
        .filter(|t| t.0 == top)
        .map(|t| (t.0, t.1))
        .collect();
    if hits.len() != 1 || hits[0].1 == top {
        return Err(RecurrenceError::Unsolvable { top, pairs: hits });
    }
    Ok(())
}

/// `Σ s_k T(l + p_k) T(l + q_k) = 0` for all `l`, stored canonically: the
/// lexicographically smaller of the relation and its reflection `l ↦ −l`
/// after [`normalize`], among those that isolate their top term.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BilinearRecurrence {
    terms: [Term; 3],
}

impl BilinearRecurrence {
    pub fn from_terms(pairs: [(i64, i64); 3], signs: [i8; 3]) -> Result<Self, RecurrenceError> {
        if signs.iter().any(|s| s.abs() != 1) {
            return Err(RecurrenceError::BadSigns(
                signs.iter().map(|&s| s as i64).collect(),
            ));
        }
        let terms: [Term; 3] = std::array::from_fn(|k| (pairs[k].0, pairs[k].1, signs[k]));
        let direct = normalize(terms);
        let reflected = normalize(terms.map(|(p, q, s)| (-q, -p, s)));
        // a relation that only isolates its top term when run backwards is
        // still usable, so solvable orientations win over the smaller one
        let chosen = match (solvable(&direct), solvable(&reflected)) {
            (Ok(()), Ok(())) => direct.min(reflected),
            (Ok(()), Err(_)) => direct,
            (Err(_), Ok(())) => reflected,
            (Err(e), Err(_)) => return Err(e),
        };
        Ok(BilinearRecurrence { terms: chosen })
    }

    /// Canonical pairs, each `(max, min)`, min offset 0, descending.
    pub fn pairs(&self) -> [(i64, i64); 3] {
        self.terms.map(|t| (t.0, t.1))
    }

    pub fn signs(&self) -> [i8; 3] {
        self.terms.map(|t| t.2)
    }

    /// Number of initial values: the spread between largest and smallest offset.
    pub fn window(&self) -> usize {
        self.terms[0].0 as usize
    }

    /// Index of the pair containing the top offset (always 0 in canonical form).
    pub(crate) fn top_term(&self) -> Term {
        self.terms[0]
    }

    pub(crate) fn other_terms(&self) -> [Term; 2] {
        [self.terms[1], self.terms[2]]
    }

    /// Printed form with signs `(+, −, +)`: the odd-signed term in the middle,
    /// the other two ascending, shifted so the first pair has max 0.
    pub fn display_pairs(&self) -> [(i64, i64); 3] {
        let odd = (0..3)
            .find(|&k| {
                (0..3)
                    .filter(|&j| self.terms[j].2 == self.terms[k].2)
                    .count()
                    == 1
            })
            .expect("three signs of ±1 have one odd member");
        let mut same: Vec<(i64, i64)> = (0..3)
            .filter(|&k| k != odd)
            .map(|k| (self.terms[k].0, self.terms[k].1))
            .collect();
        same.sort();
        let shift = same[0].0;
        let at = |(p, q): (i64, i64)| (p - shift, q - shift);
        [
            at(same[0]),
            at((self.terms[odd].0, self.terms[odd].1)),
            at(same[1]),
        ]
    }

    /// Deduplication key, invariant under translation, reflection and negation.
    pub fn key(&self) -> String {
        let pairs: Vec<String> = self
            .terms
            .iter()
            .map(|t| format!("{},{}", t.0, t.1))
            .collect();
        let signs: String = self
            .terms
            .iter()
            .map(|t| if t.2 > 0 { '+' } else { '-' })
            .collect();
        format!("{}|{}", pairs.join(";"), signs)
    }
}

fn offset(k: i64) -> String {
    match k {
        0 => "a(l)".to_string(),
        k if k > 0 => format!("a(l+{k})"),
        k => format!("a(l{k})"),
    }
}

impl fmt::Display for BilinearRecurrence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.display_pairs();
        let prod = |(p, q): (i64, i64)| format!("{}{}", offset(p), offset(q));
        write!(f, "{} - {} + {} = 0", prod(d[0]), prod(d[1]), prod(d[2]))
    }
}

#[derive(Serialize, Deserialize)]
struct RecurrenceJson {
    pairs: Vec<(i64, i64)>,
    signs: Vec<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    window: Option<i64>,
}

impl Serialize for BilinearRecurrence {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        RecurrenceJson {
            pairs: self.display_pairs().to_vec(),
            signs: vec![1, -1, 1],
            window: Some(self.window() as i64),
        }
        .serialize(s)
    }
}

impl TryFrom<RecurrenceJson> for BilinearRecurrence {
    type Error = RecurrenceError;

    fn try_from(j: RecurrenceJson) -> Result<Self, Self::Error> {
        let (Ok(pairs), Ok(signs)) = (
            <[(i64, i64); 3]>::try_from(j.pairs.clone()),
            <[i64; 3]>::try_from(j.signs.clone()),
        ) else {
            return Err(RecurrenceError::Arity(j.pairs.len(), j.signs.len()));
        };
        if signs.iter().any(|s| s.abs() != 1) {
            return Err(RecurrenceError::BadSigns(signs.to_vec()));
        }
        let rec = Self::from_terms(pairs, signs.map(|s| s as i8))?;
        if let Some(given) = j.window {
            if given != rec.window() as i64 {
                return Err(RecurrenceError::WindowMismatch {
                    expected: rec.window() as i64,
                    given,
                });
            }
        }
        Ok(rec)
    }
}

impl<'de> Deserialize<'de> for BilinearRecurrence {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = RecurrenceJson::deserialize(d)?;
        Self::try_from(j).map_err(serde::de::Error::custom)
    }
}

/// Everything computed on the way from a basis to its recurrence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Derivation {
    pub basis: SublatticeBasis,
    pub reduced: SublatticeBasis,
    pub quotient: QuotientMap,
    pub base: Vec<i64>,
    /// The octahedron points `n + e^α + e^β` paired as in the relation.
    pub points: [[Vec<i64>; 2]; 3],
    /// Their projected indices, before canonicalization.
    pub raw_pairs: [(i64, i64); 3],
    pub recurrence: BilinearRecurrence,
}

/// The three pairings `{12|34}`, `{13|24}`, `{14|23}` with signs `+, −, +`.
pub const OCTAHEDRON_PAIRINGS: [([usize; 2], [usize; 2], i8); 3] = [
    ([0, 1], [2, 3], 1),
    ([0, 2], [1, 3], -1),
    ([0, 3], [1, 2], 1),
];

pub fn derive(basis: &SublatticeBasis) -> Result<Derivation, RecurrenceError> {
    let quotient = quotient_map(basis)?;
    let (reduced, _) = hermite_reduce(basis)?;
    let base = vec![0, 0, -1, -1];
    let point = |[i, j]: [usize; 2]| {
        let mut p = base.clone();
        p[i] += 1;
        p[j] += 1;
        p
    };
    let points = OCTAHEDRON_PAIRINGS.map(|(x, y, _)| [point(x), point(y)]);
    let mut raw_pairs = [(0, 0); 3];
    for (k, [x, y]) in points.iter().enumerate() {
        raw_pairs[k] = (quotient.project(x)?, quotient.project(y)?);
    }
    let recurrence = BilinearRecurrence::from_terms(raw_pairs, OCTAHEDRON_PAIRINGS.map(|t| t.2))?;
    Ok(Derivation {
        basis: basis.clone(),
        reduced,
        quotient,
        base,
        points,
        raw_pairs,
        recurrence,
    })
}

pub fn derive_recurrence(basis: &SublatticeBasis) -> Result<BilinearRecurrence, RecurrenceError> {
    derive(basis).map(|d| d.recurrence)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn basis(s: &str) -> SublatticeBasis {
        s.parse().unwrap()
    }

    #[test]
    fn example_one() {
        let d = derive(&basis("5,-2,-2,-1;1,1,-1,-1")).unwrap();
        assert_eq!(d.raw_pairs, [(0, 0), (4, -4), (-3, 3)]);
        let r = d.recurrence;
        assert_eq!(r.pairs(), [(8, 0), (7, 1), (4, 4)]);
        assert_eq!(r.signs(), [1, -1, -1]);
        assert_eq!(r.window(), 8);
        assert_eq!(r.display_pairs(), [(0, 0), (4, -4), (3, -3)]);
        assert_eq!(r.to_string(), "a(l)a(l) - a(l+4)a(l-4) + a(l+3)a(l-3) = 0");
        assert_eq!(
            serde_json::to_string(&r).unwrap(),
            r#"{"pairs":[[0,0],[4,-4],[3,-3]],"signs":[1,-1,1],"window":8}"#
        );
    }

    #[test]
    fn example_two() {
        let d = derive(&basis("1,3,-3,-1;0,1,2,-3")).unwrap();
        assert_eq!(d.raw_pairs, [(6, 0), (9, -3), (8, -2)]);
        let r = d.recurrence;
        assert_eq!(r.pairs(), [(12, 0), (11, 1), (9, 3)]);
        assert_eq!(r.window(), 12);
        assert_eq!(r.display_pairs(), [(0, -6), (3, -9), (2, -8)]);
    }

    #[test]
    fn invariant_under_translation_reflection_negation() {
        let r = BilinearRecurrence::from_terms([(0, -6), (3, -9), (2, -8)], [1, -1, 1]).unwrap();
        let moved =
            BilinearRecurrence::from_terms([(-3, 7), (9, 4), (-6, 8)], [-1, -1, 1]).unwrap();
        assert_eq!(r.key(), "12,0;11,1;9,3|+--");
        // reflection of the above, shifted, negated and reordered
        let reflected =
            BilinearRecurrence::from_terms([(6, 0), (-3, 9), (8, -2)], [-1, 1, -1]).unwrap();
        assert_eq!(r, reflected);
        assert_ne!(r, moved);
    }

    #[test]
    fn reflection_picks_the_smaller_form() {
        // T(5)T(0) - T(4)T(1) - T(3)T(3) against its mirror image
        let r = BilinearRecurrence::from_terms([(5, 0), (4, 1), (3, 3)], [1, -1, -1]).unwrap();
        let m = BilinearRecurrence::from_terms([(0, -5), (-1, -4), (-3, -3)], [1, -1, -1]).unwrap();
        assert_eq!(r, m);
        let asym = BilinearRecurrence::from_terms([(5, 0), (4, 2), (3, 1)], [1, -1, 1]).unwrap();
        let mirror =
            BilinearRecurrence::from_terms([(0, -5), (-2, -4), (-1, -3)], [1, -1, 1]).unwrap();
        assert_eq!(asym, mirror);
        assert_eq!(asym.pairs(), [(5, 0), (4, 2), (3, 1)]);
        assert_eq!(asym.signs(), [1, -1, 1]);
    }

    #[test]
    fn unsolvable_configurations() {
        let e = BilinearRecurrence::from_terms([(4, 0), (4, 1), (3, 0)], [1, -1, 1]).unwrap_err();
        assert_eq!(
            e,
            RecurrenceError::Unsolvable {
                top: 4,
                pairs: vec![(4, 1), (4, 0)]
            }
        );
        assert!(e.to_string().starts_with("degenerate recurrence"));
        assert!(BilinearRecurrence::from_terms([(3, 3), (2, 0), (3, 0)], [1, -1, 1]).is_err());
        assert!(matches!(
            BilinearRecurrence::from_terms([(3, 0), (2, 0), (1, 1)], [1, 2, 1]),
            Err(RecurrenceError::BadSigns(_))
        ));
    }

    #[test]
    fn backwards_solvable_relation_is_reflected() {
        // forwards the top offset 4 sits in two pairs; backwards it is isolated
        let r = BilinearRecurrence::from_terms([(4, 0), (4, 1), (2, 2)], [1, -1, 1]).unwrap();
        assert_eq!(r.pairs(), [(4, 0), (3, 0), (2, 2)]);
        let r = BilinearRecurrence::from_terms([(3, 3), (2, 0), (1, 1)], [1, -1, 1]).unwrap();
        assert_eq!(r.pairs(), [(3, 1), (2, 2), (0, 0)]);
    }

    #[test]
    fn json_roundtrip_and_validation() {
        let r = derive_recurrence(&basis("5,-2,-2,-1;1,1,-1,-1")).unwrap();
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(serde_json::from_str::<BilinearRecurrence>(&s).unwrap(), r);
        let no_window = r#"{"pairs":[[0,0],[4,-4],[3,-3]],"signs":[1,-1,1]}"#;
        assert_eq!(
            serde_json::from_str::<BilinearRecurrence>(no_window).unwrap(),
            r
        );
        let wrong = r#"{"pairs":[[0,0],[4,-4],[3,-3]],"signs":[1,-1,1],"window":7}"#;
        assert!(serde_json::from_str::<BilinearRecurrence>(wrong).is_err());
        let short = r#"{"pairs":[[0,0],[4,-4]],"signs":[1,-1]}"#;
        assert!(serde_json::from_str::<BilinearRecurrence>(short).is_err());
    }

    #[test]
    fn errors_propagate_from_lattice() {
        let e = derive(&basis("2,-2,0,0;0,0,1,-1")).unwrap_err();
        assert_eq!(
            e,
            RecurrenceError::Lattice(LatticeError::Torsion(vec![BigInt::from(2)]))
        );
    }

    #[test]
    fn square_polygon_regression() {
        let sq = basis("1,0,-1,0;0,1,0,-1");
        let d = derive(&sq).unwrap();
        assert_eq!(d.quotient.w, vec![1, -1, 1, -1]);
        assert_eq!(d.quotient.step, 2);
        assert_eq!(d.raw_pairs, [(0, 0), (1, -1), (0, 0)]);
        assert_eq!(d.recurrence.pairs(), [(2, 0), (1, 1), (1, 1)]);
        assert_eq!(d.recurrence.signs(), [1, -1, -1]);
    }
}
