use std::collections::BTreeMap;
use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::exact::Rational;
use crate::fock::{tau_discrete, ChargeVector, FockError, GroupElement};

/// Tau values keyed by degree-0 charge vectors.
pub type TauTable = BTreeMap<Vec<i64>, Rational>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PermutationError {
    #[error("{images:?} is not a permutation", images = .0)]
    NotBijective(Vec<usize>),
    #[error("permutation of {expected} letters applied to a vector of length {got}")]
    Length { expected: usize, got: usize },
}

/// A permutation `σ` of the components, stored as images `σ(α)` (0-based).
/// It moves entry `α` of a charge vector to position `σ(α)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self, PermutationError> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            if i >= images.len() || std::mem::replace(&mut seen[i], true) {
                return Err(PermutationError::NotBijective(images));
            }
        }
        Ok(Permutation(images))
    }

    pub fn identity(s: usize) -> Self {
        Permutation((0..s).collect())
    }

    pub fn transposition(s: usize, i: usize, j: usize) -> Self {
        let mut v: Vec<usize> = (0..s).collect();
        v.swap(i, j);
        Permutation(v)
    }

    pub fn reversal(s: usize) -> Self {
        Permutation((0..s).rev().collect())
    }

    pub fn random<R: Rng + ?Sized>(s: usize, rng: &mut R) -> Self {
        let mut v: Vec<usize> = (0..s).collect();
        v.shuffle(rng);
        Permutation(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.0.len()];
        for (a, &b) in self.0.iter().enumerate() {
            inv[b] = a;
        }
        Permutation(inv)
    }

    /// `(σn)_{σ(α)} = n_α`.
    pub fn apply(&self, n: &[i64]) -> Result<Vec<i64>, PermutationError> {
        if n.len() != self.0.len() {
            return Err(PermutationError::Length {
                expected: self.0.len(),
                got: n.len(),
            });
        }
        let mut out = vec![0; n.len()];
        for (a, &x) in n.iter().enumerate() {
            out[self.0[a]] = x;
        }
        Ok(out)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let one_based: Vec<String> = self.0.iter().map(|i| (i + 1).to_string()).collect();
        write!(f, "[{}]", one_based.join(" "))
    }
}

/// `Σ n_α n_β` over inversions `α < β`, `σ(α) > σ(β)`.
pub fn q_sigma(sigma: &Permutation, n: &[i64]) -> Result<i64, PermutationError> {
    let s = sigma.len();
    if n.len() != s {
        return Err(PermutationError::Length {
            expected: s,
            got: n.len(),
        });
    }
    let mut q = 0;
    for a in 0..s {
        for b in a + 1..s {
            if sigma.0[a] > sigma.0[b] {
                q += n[a] * n[b];
            }
        }
    }
    Ok(q)
}

/// `τ'(n) = (−1)^{q_σ(n)} τ(σn)` on every key whose image is in the table.
pub fn act_permutation(
    sigma: &Permutation,
    table: &TauTable,
) -> Result<TauTable, PermutationError> {
    let mut out = TauTable::new();
    for n in table.keys() {
        let image = sigma.apply(n)?;
        if let Some(v) = table.get(&image) {
            let v = if q_sigma(sigma, n)? % 2 == 0 {
                v.clone()
            } else {
                -v.clone()
            };
            out.insert(n.clone(), v);
        }
    }
    Ok(out)
}

/// Octahedral residual read off a table; `None` when a needed entry is missing.
pub fn table_octahedron_residual(
    table: &TauTable,
    n: &[i64],
    quad: [usize; 4],
) -> Option<Rational> {
    let at = |i: usize, j: usize| {
        let mut p = n.to_vec();
        p[quad[i]] += 1;
        p[quad[j]] += 1;
        table.get(&p)
    };
    let t = |a: usize, b: usize, c: usize, d: usize| Some(at(a, b)? * at(c, d)?);
    Some(t(0, 1, 2, 3)? - t(0, 2, 1, 3)? + t(0, 3, 1, 2)?)
}

/// Determinantal tau values at every degree-0 point with `|n_c| <= bound`.
pub fn tau_table(g: &GroupElement, bound: i64) -> Result<TauTable, FockError> {
    let s = g.window().components();
    let mut table = TauTable::new();
    let mut n = vec![-bound; s];
    loop {
        if n.iter().sum::<i64>() == 0 {
            table.insert(n.clone(), tau_discrete(g, &ChargeVector::new(n.clone()))?);
        }
        let Some(k) = n.iter().rposition(|&x| x < bound) else {
            break;
        };
        n[k] += 1;
        for x in &mut n[k + 1..] {
            *x = -bound;
        }
    }
    Ok(table)
}
