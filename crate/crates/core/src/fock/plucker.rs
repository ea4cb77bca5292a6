//! Finite-dimensional Plücker identities `<L'| … |L>` as determinants.
//!
//! `<L'| u_1 … u_k |L>` is the determinant of the columns
//! `w_d, …, w_1, u_1, …, u_k, v_1, v_2, …` where `L' = span(w)` and
//! `L = span(v)` together have codimension `k` in `Q^dim`.

use num_bigint::BigInt;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::FockError;
use crate::exact::{det_rational, rank_rational, Rational};

const MAX_ATTEMPTS: usize = 64;

/// Small random rational vector (numerators in `[-5, 5]`, denominators in `[1, 3]`).
pub fn random_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<Rational> {
    (0..dim)
        .map(|_| {
            Rational::new(
                BigInt::from(rng.gen_range(-5..=5)),
                BigInt::from(rng.gen_range(1..=3)),
            )
        })
        .collect()
}

/// A pair of complementary-up-to-codimension subspaces `L'` and `L`.
#[derive(Debug, Clone)]
pub struct PluckerFrame {
    dim: usize,
    codim: usize,
    left: Vec<Vec<Rational>>,
    right: Vec<Vec<Rational>>,
}

impl PluckerFrame {
    /// Random `L'` of dimension `d` (itself random) and `L` of dimension
    /// `dim − codim − d`, redrawn until `L ∩ L' = 0`.
    pub fn random<R: Rng + ?Sized>(
        dim: usize,
        codim: usize,
        rng: &mut R,
    ) -> Result<Self, FockError> {
        let span = dim.checked_sub(codim).ok_or(FockError::DimensionTooSmall {
            needed: codim,
            got: dim,
        })?;
        for _ in 0..MAX_ATTEMPTS {
            let d = rng.gen_range(0..=span);
            let left: Vec<_> = (0..d).map(|_| random_vector(dim, rng)).collect();
            let right: Vec<_> = (0..span - d).map(|_| random_vector(dim, rng)).collect();
            let all: Vec<_> = left.iter().chain(&right).cloned().collect();
            if rank_rational(&all) == span {
                return Ok(PluckerFrame {
                    dim,
                    codim,
                    left,
                    right,
                });
            }
        }
        Err(FockError::Degenerate(MAX_ATTEMPTS))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn codim(&self) -> usize {
        self.codim
    }

    /// `<L'| inner |L>`; `inner` must have exactly `codim` vectors.
    pub fn bracket(&self, inner: &[&[Rational]]) -> Rational {
        assert_eq!(inner.len(), self.codim, "bracket arity");
        let cols: Vec<&[Rational]> = self
            .left
            .iter()
            .rev()
            .map(Vec::as_slice)
            .chain(inner.iter().copied())
            .chain(self.right.iter().map(Vec::as_slice))
            .collect();
        let m: Vec<Vec<Rational>> = (0..self.dim)
            .map(|r| cols.iter().map(|c| c[r].clone()).collect())
            .collect();
        det_rational(&m)
    }

    /// Random element of `L ⊕ L'`.
    pub fn random_in_span<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.dim];
        for v in self.left.iter().chain(&self.right) {
            let k = Rational::from_integer(BigInt::from(rng.gen_range(-3..=3)));
            for (o, x) in out.iter_mut().zip(v) {
                *o += x * &k;
            }
        }
        out
    }
}

/// The three products `<ab><cd>`, `<ac><bd>`, `<ad><bc>` of the three-term relation.
pub fn plucker3_terms(
    f: &PluckerFrame,
    a: &[Rational],
    b: &[Rational],
    c: &[Rational],
    d: &[Rational],
) -> [Rational; 3] {
    [
        f.bracket(&[a, b]) * f.bracket(&[c, d]),
        f.bracket(&[a, c]) * f.bracket(&[b, d]),
        f.bracket(&[a, d]) * f.bracket(&[b, c]),
    ]
}

/// One seeded trial of `<ab><cd> − <ac><bd> + <ad><bc>` at codimension 2.
pub fn plucker3_check(dim: usize, seed: u64) -> Result<Rational, FockError> {
    if dim < 6 {
        return Err(FockError::DimensionTooSmall {
            needed: 6,
            got: dim,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = PluckerFrame::random(dim, 2, &mut rng)?;
    let [a, b, c, d] = [0; 4].map(|_| random_vector(dim, &mut rng));
    let [t1, t2, t3] = plucker3_terms(&f, &a, &b, &c, &d);
    Ok(t1 - t2 + t3)
}

/// The four products of the codimension-3 relation exactly as printed:
/// `<abc><xyz>`, `<abx><ayz>`, `<aby><cxz>`, `<abz><axy>`.
pub fn plucker4_terms_verbatim(f: &PluckerFrame, v: [&[Rational]; 6]) -> [Rational; 4] {
    let [a, b, c, x, y, z] = v;
    [
        f.bracket(&[a, b, c]) * f.bracket(&[x, y, z]),
        f.bracket(&[a, b, x]) * f.bracket(&[a, y, z]),
        f.bracket(&[a, b, y]) * f.bracket(&[c, x, z]),
        f.bracket(&[a, b, z]) * f.bracket(&[a, x, y]),
    ]
}

/// The exchange reading with `c` in every second factor:
/// `<abc><xyz>`, `<abx><cyz>`, `<aby><cxz>`, `<abz><cxy>`.
pub fn plucker4_terms_symmetric(f: &PluckerFrame, v: [&[Rational]; 6]) -> [Rational; 4] {
    let [a, b, c, x, y, z] = v;
    [
        f.bracket(&[a, b, c]) * f.bracket(&[x, y, z]),
        f.bracket(&[a, b, x]) * f.bracket(&[c, y, z]),
        f.bracket(&[a, b, y]) * f.bracket(&[c, x, z]),
        f.bracket(&[a, b, z]) * f.bracket(&[c, x, y]),
    ]
}

fn alternate([t1, t2, t3, t4]: [Rational; 4]) -> Rational {
    t1 - t2 + t3 - t4
}

/// Residuals of both readings of the four-term relation on one draw.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Plucker4Outcome {
    pub verbatim: Rational,
    pub symmetric: Rational,
}

pub fn plucker4_check(dim: usize, seed: u64) -> Result<Plucker4Outcome, FockError> {
    if dim < 9 {
        return Err(FockError::DimensionTooSmall {
            needed: 9,
            got: dim,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = PluckerFrame::random(dim, 3, &mut rng)?;
    let vs = [0; 6].map(|_| random_vector(dim, &mut rng));
    let refs: [&[Rational]; 6] = std::array::from_fn(|i| vs[i].as_slice());
    Ok(Plucker4Outcome {
        verbatim: alternate(plucker4_terms_verbatim(&f, refs)),
        symmetric: alternate(plucker4_terms_symmetric(&f, refs)),
    })
}
