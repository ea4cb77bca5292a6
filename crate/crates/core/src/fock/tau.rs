//! Determinantal discrete tau functions `τ(n) = <g|n>`.
//!
//! `<g|` is the neutral-vacuum row selection of an invertible matrix `g`, so
//! `<g|v>` for a basis wedge `v` is the minor of `g` with rows = the neutral
//! vacuum slots and columns = the slots of `v`, both in the global order.

use num_bigint::BigInt;
use num_traits::Zero;
use rand::Rng;

use super::{apply_psi, BasisWedge, FockError, FockVector, Window};
use crate::combinatorics::HalfInt;
use crate::exact::{det_integer, det_rational, Rational};

/// Integer charge vector `(n_1, …, n_s)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ChargeVector(Vec<i64>);

impl ChargeVector {
    pub fn new(n: Vec<i64>) -> Self {
        ChargeVector(n)
    }

    pub fn zero(s: usize) -> Self {
        ChargeVector(vec![0; s])
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }

    pub fn degree(&self) -> i64 {
        self.0.iter().sum()
    }

    /// `n + e^a + e^b` (0-based components).
    pub fn plus_units(&self, a: usize, b: usize) -> Self {
        let mut v = self.0.clone();
        v[a] += 1;
        v[b] += 1;
        ChargeVector(v)
    }
}

impl From<Vec<i64>> for ChargeVector {
    fn from(v: Vec<i64>) -> Self {
        ChargeVector(v)
    }
}

fn check_charge(n: &ChargeVector, w: &Window, limit: i64) -> Result<(), FockError> {
    if n.0.len() != w.components() {
        return Err(FockError::ChargeLength {
            expected: w.components(),
            got: n.0.len(),
        });
    }
    if n.0.iter().any(|x| x.abs() > limit) {
        return Err(FockError::Headroom {
            n: n.0.clone(),
            limit,
        });
    }
    Ok(())
}

/// The charged vacuum `|n>`: component `c` occupies `{p < n_c}` in the window.
/// Needs `|n_c| <= K - 1`.
pub fn vacuum(n: &ChargeVector, w: &Window) -> Result<BasisWedge, FockError> {
    check_charge(n, w, w.cutoff() as i64 - 1)?;
    let k = w.cutoff() as i64;
    let mut slots = Vec::new();
    for (c, &nc) in n.0.iter().enumerate() {
        for code in (-k..nc).rev() {
            slots.push(w.slot(c, HalfInt::from_code(code))?);
        }
    }
    let (neg, b) = BasisWedge::from_sequence(&slots).expect("distinct slots");
    debug_assert!(!neg);
    Ok(b)
}

/// Invertible exact matrix acting on the one-particle space of a window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupElement {
    window: Window,
    matrix: Vec<Vec<Rational>>,
    rows: Vec<usize>,
}

impl GroupElement {
    pub fn new(window: Window, matrix: Vec<Vec<Rational>>) -> Result<Self, FockError> {
        let d = window.dim();
        if matrix.len() != d || matrix.iter().any(|r| r.len() != d) {
            return Err(FockError::MatrixShape { expected: d });
        }
        if det_rational(&matrix).is_zero() {
            return Err(FockError::Singular);
        }
        let rows = vacuum(&ChargeVector::zero(window.components()), &window)?
            .slots()
            .to_vec();
        Ok(GroupElement {
            window,
            matrix,
            rows,
        })
    }

    pub fn identity(window: Window) -> Self {
        let d = window.dim();
        let matrix = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| Rational::from_integer(BigInt::from((i == j) as i64)))
                    .collect()
            })
            .collect();
        Self::new(window, matrix).expect("identity is invertible")
    }

    /// Uniform integer entries in `[-3, 3]`, redrawn until invertible.
    pub fn random<R: Rng + ?Sized>(window: Window, rng: &mut R) -> Self {
        let d = window.dim();
        loop {
            let ints: Vec<Vec<i64>> = (0..d)
                .map(|_| (0..d).map(|_| rng.gen_range(-3..=3)).collect())
                .collect();
            let big = ints
                .iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect();
            if det_integer(big).is_zero() {
                continue;
            }
            let matrix = ints
                .into_iter()
                .map(|r| {
                    r.into_iter()
                        .map(|x| Rational::from_integer(x.into()))
                        .collect()
                })
                .collect();
            let rows = vacuum(&ChargeVector::zero(window.components()), &window)
                .expect("neutral vacuum fits")
                .slots()
                .to_vec();
            return GroupElement {
                window,
                matrix,
                rows,
            };
        }
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn matrix(&self) -> &[Vec<Rational>] {
        &self.matrix
    }

    /// Copy with row `i` multiplied by `r` (must be nonzero).
    pub fn with_scaled_row(&self, i: usize, r: &Rational) -> Result<Self, FockError> {
        let mut m = self.matrix.clone();
        for x in &mut m[i] {
            *x *= r;
        }
        Self::new(self.window, m)
    }

    fn minor(&self, cols: &[usize]) -> Rational {
        let sub: Vec<Vec<Rational>> = self
            .rows
            .iter()
            .map(|&r| cols.iter().map(|&c| self.matrix[r][c].clone()).collect())
            .collect();
        det_rational(&sub)
    }
}

/// `<g|v>` extended linearly; terms of the wrong size pair to zero.
pub fn pairing(g: &GroupElement, v: &FockVector) -> Rational {
    let mut total = Rational::zero();
    for (b, c) in v.terms() {
        if b.len() == g.rows.len() {
            total += c * g.minor(b.slots());
        }
    }
    total
}

/// `τ(n) = <g|n>` for a degree-0 charge vector.
pub fn tau_discrete(g: &GroupElement, n: &ChargeVector) -> Result<Rational, FockError> {
    if n.degree() != 0 {
        return Err(FockError::Degree {
            expected: 0,
            got: n.degree(),
        });
    }
    let b = vacuum(n, g.window())?;
    Ok(g.minor(b.slots()))
}

/// `<g| v_{c_1,p_1} v_{c_2,p_2} … |n>` for arbitrary insertions (applied
/// right to left, so the first listed vector ends up in front).
pub fn insertion_pairing(
    g: &GroupElement,
    n: &ChargeVector,
    inserts: &[(usize, HalfInt)],
) -> Result<Rational, FockError> {
    let w = g.window();
    let mut v = FockVector::basis(vacuum(n, w)?);
    for &(c, p) in inserts.iter().rev() {
        v = apply_psi(w, c, p, &v)?;
    }
    Ok(pairing(g, &v))
}

/// `<g| v_{α, n_α+1/2} v_{β, n_β+1/2} |n>` for `deg n = -2`, `α < β`
/// (0-based components). Equals `±τ(n + e^α + e^β)`.
pub fn tau_with_insertions(
    g: &GroupElement,
    n: &ChargeVector,
    (alpha, beta): (usize, usize),
) -> Result<Rational, FockError> {
    let s = g.window().components();
    if !(alpha < beta && beta < s) {
        return Err(FockError::BadComponents(format!(
            "alpha < beta < {s}, got ({alpha}, {beta})"
        )));
    }
    if n.degree() != -2 {
        return Err(FockError::Degree {
            expected: -2,
            got: n.degree(),
        });
    }
    // one insertion per component must stay inside the window
    check_charge(n, g.window(), g.window().cutoff() as i64 - 2)?;
    let ns = n.as_slice();
    insertion_pairing(
        g,
        n,
        &[
            (alpha, HalfInt::from_code(ns[alpha])),
            (beta, HalfInt::from_code(ns[beta])),
        ],
    )
}

fn check_quad(quad: [usize; 4], s: usize) -> Result<(), FockError> {
    let [a, b, c, d] = quad;
    if a < b && b < c && c < d && d < s {
        Ok(())
    } else {
        Err(FockError::BadComponents(format!(
            "a < b < c < d < {s}, got {quad:?}"
        )))
    }
}

/// Residual of the octahedral relation at base `n` (degree −2), with every
/// factor computed through fermion insertions.
pub fn octahedron_check(
    g: &GroupElement,
    n: &ChargeVector,
    quad: [usize; 4],
) -> Result<Rational, FockError> {
    check_quad(quad, g.window().components())?;
    let [a, b, c, d] = quad;
    let t = |x, y| tau_with_insertions(g, n, (x, y));
    Ok(t(a, b)? * t(c, d)? - t(a, c)? * t(b, d)? + t(a, d)? * t(b, c)?)
}

/// The same relation evaluated on `τ_discrete` directly, with no insertion
/// signs. The signs factor out of all three products equally.
pub fn tau_octahedron_residual(
    g: &GroupElement,
    n: &ChargeVector,
    quad: [usize; 4],
) -> Result<Rational, FockError> {
    check_quad(quad, g.window().components())?;
    if n.degree() != -2 {
        return Err(FockError::Degree {
            expected: -2,
            got: n.degree(),
        });
    }
    let [a, b, c, d] = quad;
    let t = |x, y| tau_discrete(g, &n.plus_units(x, y));
    Ok(t(a, b)? * t(c, d)? - t(a, c)? * t(b, d)? + t(a, d)? * t(b, c)?)
}

/// Uniform degree −2 vector with entries in `[-bound, bound]`.
pub fn random_base<R: Rng + ?Sized>(rng: &mut R, s: usize, bound: i64) -> ChargeVector {
    loop {
        let v: Vec<i64> = (0..s).map(|_| rng.gen_range(-bound..=bound)).collect();
        if v.iter().sum::<i64>() == -2 {
            return ChargeVector(v);
        }
    }
}
