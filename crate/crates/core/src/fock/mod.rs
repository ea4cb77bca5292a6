//! Truncated fermionic Fock spaces with one or more components.
//!
//! A [`Window`] keeps the `2K` positions `-K+1/2 … K-1/2` of every component.
//! Basis wedges are subsets of the `s·2K` slots. All signs come from one
//! global order, component ascending and then position descending, so
//! `ψ_{c,p}` wedges `v_{c,p}` onto the front and picks up `(-1)^m` where `m`
//! counts the occupied slots that precede `(c,p)`. Operators drop any term
//! that would leave the window.

mod plucker;
mod states;
mod tau;

pub use plucker::{
    plucker3_check, plucker3_terms, plucker4_check, plucker4_terms_symmetric,
    plucker4_terms_verbatim, random_vector, Plucker4Outcome, PluckerFrame,
};
pub use states::{verify_state_identities, StateIdentity};
pub use tau::{
    insertion_pairing, octahedron_check, pairing, random_base, tau_discrete,
    tau_octahedron_residual, tau_with_insertions, vacuum, ChargeVector, GroupElement,
};

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::combinatorics::HalfInt;
use crate::exact::{format_rational, Rational};
use crate::symbolic::MultiPoly;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FockError {
    #[error(
        "window needs cutoff >= 2 and at least one component (got K={cutoff}, s={components})"
    )]
    BadWindow { cutoff: usize, components: usize },
    #[error("window too small: cutoff {got} < required {needed}")]
    WindowTooSmall { needed: usize, got: usize },
    #[error("component {component} out of range for {components} components")]
    BadComponent { component: usize, components: usize },
    #[error("position {position} lies outside the window of cutoff {cutoff}")]
    OutOfWindow { position: HalfInt, cutoff: usize },
    #[error("charge vector {n:?} violates the headroom |n_c| <= {limit}")]
    Headroom { n: Vec<i64>, limit: i64 },
    #[error("charge vector has {got} entries, window has {expected} components")]
    ChargeLength { expected: usize, got: usize },
    #[error("charge vector has degree {got}, expected {expected}")]
    Degree { expected: i64, got: i64 },
    #[error("group element must be a {expected}x{expected} matrix")]
    MatrixShape { expected: usize },
    #[error("group element is singular")]
    Singular,
    #[error("components must satisfy {0}")]
    BadComponents(String),
    #[error("ambient dimension {got} is below the minimum {needed}")]
    DimensionTooSmall { needed: usize, got: usize },
    #[error("no non-degenerate draw after {0} attempts")]
    Degenerate(usize),
}

/// Truncation of the fermionic space: `components` copies of `2·cutoff` slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Window {
    cutoff: usize,
    components: usize,
}

impl Window {
    pub fn new(cutoff: usize, components: usize) -> Result<Self, FockError> {
        if cutoff < 2 || components == 0 {
            return Err(FockError::BadWindow { cutoff, components });
        }
        Ok(Window { cutoff, components })
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn slots_per_component(&self) -> usize {
        2 * self.cutoff
    }

    /// Total number of slots, the dimension of the one-particle space.
    pub fn dim(&self) -> usize {
        self.components * self.slots_per_component()
    }

    pub fn contains(&self, p: HalfInt) -> bool {
        let k = self.cutoff as i64;
        (-k..k).contains(&p.code())
    }

    /// Global index of `(component, position)`; components are 0-based.
    pub fn slot(&self, component: usize, p: HalfInt) -> Result<usize, FockError> {
        if component >= self.components {
            return Err(FockError::BadComponent {
                component,
                components: self.components,
            });
        }
        if !self.contains(p) {
            return Err(FockError::OutOfWindow {
                position: p,
                cutoff: self.cutoff,
            });
        }
        let k = self.cutoff as i64;
        Ok(component * self.slots_per_component() + (k - 1 - p.code()) as usize)
    }

    pub fn slot_position(&self, slot: usize) -> (usize, HalfInt) {
        let per = self.slots_per_component();
        let k = self.cutoff as i64;
        (slot / per, HalfInt::from_code(k - 1 - (slot % per) as i64))
    }
}

/// A basis wedge, stored as strictly increasing global slot indices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct BasisWedge {
    slots: Vec<usize>,
}

impl BasisWedge {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Wedge `v_{s_1} ∧ v_{s_2} ∧ …` in the given order, sorted into canonical
    /// form. Returns the sign of the sorting permutation, or `None` if a slot repeats.
    pub fn from_sequence(seq: &[usize]) -> Option<(bool, BasisWedge)> {
        let mut v = seq.to_vec();
        let mut negative = false;
        // insertion sort, counting transpositions
        for i in 1..v.len() {
            let mut j = i;
            while j > 0 && v[j - 1] > v[j] {
                v.swap(j - 1, j);
                negative = !negative;
                j -= 1;
            }
        }
        if v.windows(2).any(|w| w[0] == w[1]) {
            return None;
        }
        Some((negative, BasisWedge { slots: v }))
    }

    pub fn slots(&self) -> &[usize] {
        &self.slots
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn contains(&self, slot: usize) -> bool {
        self.slots.binary_search(&slot).is_ok()
    }

    /// `v_slot ∧ self`; the flag is true when the sign is negative.
    pub fn wedge_front(&self, slot: usize) -> Option<(bool, BasisWedge)> {
        match self.slots.binary_search(&slot) {
            Ok(_) => None,
            Err(pos) => {
                let mut slots = self.slots.clone();
                slots.insert(pos, slot);
                Some((pos % 2 == 1, BasisWedge { slots }))
            }
        }
    }

    /// Contraction removing `v_slot` after moving it to the front.
    pub fn contract(&self, slot: usize) -> Option<(bool, BasisWedge)> {
        match self.slots.binary_search(&slot) {
            Err(_) => None,
            Ok(pos) => {
                let mut slots = self.slots.clone();
                slots.remove(pos);
                Some((pos % 2 == 1, BasisWedge { slots }))
            }
        }
    }

    pub fn render(&self, w: &Window) -> String {
        if self.slots.is_empty() {
            return "1".into();
        }
        self.slots
            .iter()
            .map(|&s| {
                let (c, p) = w.slot_position(s);
                if w.components() == 1 {
                    format!("v[{p}]")
                } else {
                    format!("v[{c};{p}]")
                }
            })
            .collect::<Vec<_>>()
            .join("")
    }
}

/// Finite linear combination of basis wedges with exact coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FockVector {
    terms: BTreeMap<BasisWedge, Rational>,
}

impl FockVector {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(w: BasisWedge) -> Self {
        let mut v = Self::zero();
        v.add_term(w, Rational::one());
        v
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BasisWedge, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, w: &BasisWedge) -> Rational {
        self.terms.get(w).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add_term(&mut self, w: BasisWedge, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(w) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &FockVector) -> FockVector {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &FockVector) -> FockVector {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> FockVector {
        if c.is_zero() {
            return FockVector::zero();
        }
        FockVector {
            terms: self.terms.iter().map(|(w, x)| (w.clone(), x * c)).collect(),
        }
    }

    fn map_basis(&self, f: impl Fn(&BasisWedge) -> Option<(bool, BasisWedge)>) -> FockVector {
        let mut out = FockVector::zero();
        for (w, c) in &self.terms {
            if let Some((neg, nw)) = f(w) {
                out.add_term(nw, if neg { -c.clone() } else { c.clone() });
            }
        }
        out
    }

    pub fn render(&self, w: &Window) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        self.terms
            .iter()
            .map(|(b, c)| format!("({})·{}", format_rational(c), b.render(w)))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// `ψ_{c,p}`: wedge `v_{c,p}` onto the front of every term.
pub fn apply_psi(
    w: &Window,
    c: usize,
    p: HalfInt,
    v: &FockVector,
) -> Result<FockVector, FockError> {
    let slot = w.slot(c, p)?;
    Ok(v.map_basis(|b| b.wedge_front(slot)))
}

/// `ψ*_{c,p}`: remove `v_{c,p}` with the sign of moving it to the front.
pub fn apply_psi_star(
    w: &Window,
    c: usize,
    p: HalfInt,
    v: &FockVector,
) -> Result<FockVector, FockError> {
    let slot = w.slot(c, p)?;
    Ok(v.map_basis(|b| b.contract(slot)))
}

/// `p_k = Σ_i ψ_{c,i+k} ψ*_{c,i}` over window positions with `i` and `i+k`
/// both inside the window.
pub fn apply_p(w: &Window, c: usize, k: i64, v: &FockVector) -> Result<FockVector, FockError> {
    if c >= w.components() {
        return Err(FockError::BadComponent {
            component: c,
            components: w.components(),
        });
    }
    let kk = w.cutoff() as i64;
    let mut out = FockVector::zero();
    if k == 0 || k.abs() >= 2 * kk {
        return Ok(out);
    }
    for (b, coeff) in v.terms() {
        for &slot in b.slots() {
            let (comp, pos) = w.slot_position(slot);
            if comp != c {
                continue;
            }
            let target = HalfInt::from_code(pos.code() + k);
            if !w.contains(target) {
                continue;
            }
            let tslot = w.slot(c, target)?;
            let Some((n1, rest)) = b.contract(slot) else {
                continue;
            };
            let Some((n2, nb)) = rest.wedge_front(tslot) else {
                continue;
            };
            out.add_term(
                nb,
                if n1 ^ n2 {
                    -coeff.clone()
                } else {
                    coeff.clone()
                },
            );
        }
    }
    Ok(out)
}

/// Charge of component `c` of a basis wedge: occupied slots at positive
/// positions minus vacant slots at negative positions (within the window).
pub fn component_charge(w: &Window, c: usize, b: &BasisWedge) -> i64 {
    let kk = w.cutoff() as i64;
    (-kk..kk)
        .map(|code| {
            let p = HalfInt::from_code(code);
            let occ = b.contains(w.slot(c, p).expect("window position"));
            match (code >= 0, occ) {
                (true, true) => 1,
                (false, false) => -1,
                _ => 0,
            }
        })
        .sum()
}

/// Normally ordered charge operator `Σ_i :ψ_{c,i} ψ*_{c,i}:` of component `c`.
pub fn apply_charge(w: &Window, c: usize, v: &FockVector) -> FockVector {
    let mut out = FockVector::zero();
    for (b, coeff) in v.terms() {
        let q = component_charge(w, c, b);
        out.add_term(b.clone(), coeff * Rational::from_integer(q.into()));
    }
    out
}

/// Applies a polynomial in the commuting creation operators `p_1 … p_m`
/// (variable `k` of `poly` is `p_k`) to `v` on component `c`.
pub fn apply_boson_poly(
    w: &Window,
    c: usize,
    poly: &MultiPoly,
    v: &FockVector,
) -> Result<FockVector, FockError> {
    let mut out = FockVector::zero();
    for (exps, coeff) in poly.terms() {
        let mut cur = v.clone();
        for (i, &e) in exps.iter().enumerate() {
            for _ in 0..e {
                cur = apply_p(w, c, i as i64 + 1, &cur)?;
            }
        }
        out = out.add(&cur.scale(coeff));
    }
    Ok(out)
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "K={} s={}", self.cutoff, self.components)
    }
}
