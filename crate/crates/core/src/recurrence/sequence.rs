use num_traits::{One, Zero};
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use super::{BilinearRecurrence, RecurrenceError};
use crate::exact::{format_rational, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RunStatus {
    Ok,
    /// Division by zero while computing the term at this index; the run stops.
    Degenerate(usize),
    /// First term that is not an integer; later terms are exact rationals.
    NonIntegral(usize),
}

impl RunStatus {
    pub fn label(&self) -> &'static str {
        match self {
            RunStatus::Ok => "ok",
            RunStatus::Degenerate(_) => "degenerate",
            RunStatus::NonIntegral(_) => "non-integral",
        }
    }

    pub fn index(&self) -> Option<usize> {
        match *self {
            RunStatus::Ok => None,
            RunStatus::Degenerate(i) | RunStatus::NonIntegral(i) => Some(i),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceRun {
    pub recurrence: BilinearRecurrence,
    pub seed_window: Vec<Rational>,
    pub terms: Vec<Rational>,
    pub status: RunStatus,
}

impl SequenceRun {
    pub fn is_integral(&self) -> bool {
        self.terms.iter().all(|t| t.is_integer())
    }

    pub fn rendered_terms(&self) -> Vec<String> {
        self.terms.iter().map(format_rational).collect()
    }
}

impl Serialize for SequenceRun {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(None)?;
        m.serialize_entry("terms", &self.rendered_terms())?;
        m.serialize_entry("status", self.status.label())?;
        if let Some(i) = self.status.index() {
            m.serialize_entry("status_index", &i)?;
        }
        let init: Vec<String> = self.seed_window.iter().map(format_rational).collect();
        m.serialize_entry("init", &init)?;
        m.serialize_entry("recurrence", &self.recurrence)?;
        m.end()
    }
}

/// Runs the recurrence forward from `init` (all ones when `None`) until
/// `count` terms exist or a zero divisor appears.
pub fn generate(
    rec: &BilinearRecurrence,
    init: Option<&[Rational]>,
    count: usize,
) -> Result<SequenceRun, RecurrenceError> {
    let w = rec.window();
    let seed: Vec<Rational> = match init {
        Some(v) if v.len() != w => {
            return Err(RecurrenceError::InitLength {
                expected: w,
                got: v.len(),
            })
        }
        Some(v) => v.to_vec(),
        None => vec![Rational::one(); w],
    };
    if count < w {
        return Err(RecurrenceError::CountTooSmall { count, window: w });
    }
    let mut status = if seed.iter().all(|t| t.is_integer()) {
        RunStatus::Ok
    } else {
        RunStatus::NonIntegral(seed.iter().position(|t| !t.is_integer()).unwrap_or(0))
    };
    let (top, partner, top_sign) = {
        let t = rec.top_term();
        (t.0 as usize, t.1 as usize, t.2)
    };
    let rest = rec.other_terms();
    let mut terms = seed.clone();
    for n in w..count {
        let l = n - top;
        let mut rhs = Rational::zero();
        for (p, q, s) in rest {
            let prod = &terms[l + p as usize] * &terms[l + q as usize];
            if s > 0 {
                rhs -= prod;
            } else {
                rhs += prod;
            }
        }
        let divisor = &terms[l + partner];
        if divisor.is_zero() {
            status = RunStatus::Degenerate(n);
            break;
        }
        let mut next = rhs / divisor;
        if top_sign < 0 {
            next = -next;
        }
        if status == RunStatus::Ok && !next.is_integer() {
            status = RunStatus::NonIntegral(n);
        }
        terms.push(next);
    }
    Ok(SequenceRun {
        recurrence: rec.clone(),
        seed_window: seed,
        terms,
        status,
    })
}
