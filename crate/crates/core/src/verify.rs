//! Seeded drivers for the oracles, each producing one uniform report.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::combinatorics::Partition;
use crate::exact::{format_rational, Rational};
use crate::fock::{
    octahedron_check, plucker3_check, plucker4_check, random_base, verify_state_identities,
    FockError, GroupElement, Window,
};
use crate::recurrence::{act_permutation, table_octahedron_residual, tau_table, Permutation};
use crate::symbolic::{kp_bilinear_residual, schur, KpError, MultiPoly};

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Fock(#[from] FockError),
    #[error(transparent)]
    Kp(#[from] KpError),
    #[error("unknown check {0:?}")]
    UnknownCheck(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Check {
    Plucker,
    Plucker4,
    States,
    Octahedron,
    Kp,
    Permutation,
}

impl Check {
    pub const ALL: [Check; 6] = [
        Check::Plucker,
        Check::Plucker4,
        Check::States,
        Check::Octahedron,
        Check::Kp,
        Check::Permutation,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Check::Plucker => "plucker",
            Check::Plucker4 => "plucker4",
            Check::States => "states",
            Check::Octahedron => "octahedron",
            Check::Kp => "kp",
            Check::Permutation => "permutation",
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Check {
    type Err = VerifyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Check::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| VerifyError::UnknownCheck(s.to_string()))
    }
}

/// Which form of the four-term relation decides pass/fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Reading {
    Verbatim,
    Symmetric,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyOptions {
    pub trials: usize,
    pub seed: u64,
    /// Window cutoff for the Fock-space checks; `None` picks the check's default.
    pub cutoff: Option<usize>,
    pub max_weight: usize,
    /// Ambient dimension for the Plücker checks; `None` picks 8 or 9.
    pub dim: Option<usize>,
    pub reading: Reading,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            trials: 100,
            seed: 0,
            cutoff: None,
            max_weight: 6,
            dim: None,
            reading: Reading::Verbatim,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub check: &'static str,
    pub trials: usize,
    pub failures: usize,
    pub first_failure: Option<Value>,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub details: Option<Value>,
}

impl VerifyReport {
    fn new(check: Check, seed: u64) -> Self {
        VerifyReport {
            check: check.name(),
            trials: 0,
            failures: 0,
            first_failure: None,
            seed,
            details: None,
        }
    }

    fn record(&mut self, ok: bool, failure: impl FnOnce() -> Value) {
        self.trials += 1;
        if !ok {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(failure());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

pub fn run_check(check: Check, opts: &VerifyOptions) -> Result<VerifyReport, VerifyError> {
    match check {
        Check::Plucker => plucker(opts),
        Check::Plucker4 => plucker4(opts),
        Check::States => states(opts),
        Check::Octahedron => octahedron(opts),
        Check::Kp => kp(opts),
        Check::Permutation => permutation(opts),
    }
}

fn trial_seed(seed: u64, i: usize) -> u64 {
    seed.wrapping_add(i as u64)
}

fn plucker(opts: &VerifyOptions) -> Result<VerifyReport, VerifyError> {
    let dim = opts.dim.unwrap_or(8);
    let mut r = VerifyReport::new(Check::Plucker, opts.seed);
    for i in 0..opts.trials {
        let s = trial_seed(opts.seed, i);
        let residual = plucker3_check(dim, s)?;
        r.record(
            residual.is_zero(),
            || json!({"trial": i, "trial_seed": s, "residual": format_rational(&residual)}),
        );
    }
    r.details = Some(json!({"dim": dim, "codim": 2}));
    Ok(r)
}

fn plucker4(opts: &VerifyOptions) -> Result<VerifyReport, VerifyError> {
    let dim = opts.dim.unwrap_or(9);
    let mut r = VerifyReport::new(Check::Plucker4, opts.seed);
    let (mut verbatim_failures, mut symmetric_failures) = (0, 0);
    for i in 0..opts.trials {
        let s = trial_seed(opts.seed, i);
        let out = plucker4_check(dim, s)?;
        verbatim_failures += usize::from(!out.verbatim.is_zero());
        symmetric_failures += usize::from(!out.symmetric.is_zero());
        let judged = match opts.reading {
            Reading::Verbatim => &out.verbatim,
            Reading::Symmetric => &out.symmetric,
        };
        r.record(judged.is_zero(), || {
            json!({
                "trial": i,
                "trial_seed": s,
                "verbatim_residual": format_rational(&out.verbatim),
                "symmetric_residual": format_rational(&out.symmetric),
            })
        });
    }
    r.details = Some(json!({
        "dim": dim,
        "codim": 3,
        "reading": opts.reading,
        "verbatim_failures": verbatim_failures,
        "symmetric_failures": symmetric_failures,
    }));
    Ok(r)
}

fn states(opts: &VerifyOptions) -> Result<VerifyReport, VerifyError> {
    let cutoff = opts.cutoff.unwrap_or(6);
    let mut r = VerifyReport::new(Check::States, opts.seed);
    let results = verify_state_identities(cutoff)?;
    for s in &results {
        r.record(s.holds, || serde_json::to_value(s).expect("serializable"));
    }
    r.details = Some(json!({"cutoff": cutoff, "identities": results}));
    Ok(r)
}

fn octahedron(opts: &VerifyOptions) -> Result<VerifyReport, VerifyError> {
    let cutoff = opts.cutoff.unwrap_or(4);
    let w = Window::new(cutoff, 4)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut r = VerifyReport::new(Check::Octahedron, opts.seed);
    for i in 0..opts.trials {
        let g = GroupElement::random(w, &mut rng);
        let n = random_base(&mut rng, 4, 1);
        let residual = octahedron_check(&g, &n, [0, 1, 2, 3])?;
        r.record(
            residual.is_zero(),
            || json!({"trial": i, "n": n.as_slice(), "residual": format_rational(&residual)}),
        );
    }
    r.details = Some(json!({"cutoff": cutoff, "components": 4}));
    Ok(r)
}

fn kp(opts: &VerifyOptions) -> Result<VerifyReport, VerifyError> {
    let m = opts.max_weight.max(8);
    let mut r = VerifyReport::new(Check::Kp, opts.seed);
    for lambda in Partition::up_to_size(opts.max_weight as u32) {
        let residual = kp_bilinear_residual(&schur(&lambda, m)?)?;
        r.record(
            residual.is_zero(),
            || json!({"partition": lambda.to_string(), "residual": residual.to_string()}),
        );
    }
    let mut quartic = vec![0; m];
    quartic[0] = 4;
    let control = &MultiPoly::one(m) + &MultiPoly::monomial(quartic, Rational::one());
    let control_residual = kp_bilinear_residual(&control)?;
    r.details = Some(json!({
        "variables": m,
        "max_weight": opts.max_weight,
        "control": control.to_string(),
        "control_residual": control_residual.to_string(),
    }));
    Ok(r)
}

const PERMUTATIONS_PER_TABLE: usize = 5;
const PROBES_PER_PERMUTATION: usize = 100;

fn permutation(opts: &VerifyOptions) -> Result<VerifyReport, VerifyError> {
    let cutoff = opts.cutoff.unwrap_or(4);
    let w = Window::new(cutoff, 4)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut r = VerifyReport::new(Check::Permutation, opts.seed);
    let mut probes = 0;
    for table_index in 0..opts.trials {
        let g = GroupElement::random(w, &mut rng);
        let table = tau_table(&g, 2)?;
        let mut failure: Option<Value> = None;
        for _ in 0..PERMUTATIONS_PER_TABLE {
            let sigma = Permutation::random(4, &mut rng);
            let acted = act_permutation(&sigma, &table).expect("lengths agree");
            let back = act_permutation(&sigma.inverse(), &acted).expect("lengths agree");
            if back != table && failure.is_none() {
                failure = Some(
                    json!({"table": table_index, "sigma": sigma.to_string(), "inverse_roundtrip": false}),
                );
            }
            for _ in 0..PROBES_PER_PERMUTATION {
                probes += 1;
                let n = random_base(&mut rng, 4, 1);
                let residual = table_octahedron_residual(&acted, n.as_slice(), [0, 1, 2, 3]);
                if residual.as_ref().is_none_or(|x| !x.is_zero()) && failure.is_none() {
                    failure = Some(json!({
                        "table": table_index,
                        "sigma": sigma.to_string(),
                        "n": n.as_slice(),
                        "residual": residual.as_ref().map(format_rational),
                    }));
                }
            }
        }
        let ok = failure.is_none();
        r.record(ok, || failure.unwrap_or(Value::Null));
    }
    r.details = Some(json!({
        "cutoff": cutoff,
        "permutations_per_table": PERMUTATIONS_PER_TABLE,
        "probes": probes,
    }));
    Ok(r)
}
