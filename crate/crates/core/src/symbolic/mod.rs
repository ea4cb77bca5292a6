//! Sparse multivariate polynomials over exact rationals in the variables
//! `t1, …, tm`, and the Schur/KP machinery built on top of them.

mod kp;

pub use kp::{h_series, kp_bilinear_residual, schur, KpError};

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::exact::{format_rational, Rational};

/// Exponent vector, one entry per variable.
pub type Exponents = Vec<u32>;

/// A polynomial in `nvars` variables, numbered from 1 (`t1` is variable 1).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Exponents, Rational>,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    /// The variable `t_k`, `1 <= k <= nvars`.
    pub fn var(nvars: usize, k: usize) -> Self {
        assert!((1..=nvars).contains(&k), "variable t{k} out of range");
        let mut e = vec![0; nvars];
        e[k - 1] = 1;
        Self::monomial(e, Rational::one())
    }

    pub fn monomial(exps: Exponents, c: Rational) -> Self {
        let mut p = Self::zero(exps.len());
        p.add_term(exps, c);
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, exps: &[u32]) -> Rational {
        self.terms.get(exps).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// Adds `c·t^exps` in place, dropping the entry if it cancels.
    pub fn add_term(&mut self, exps: Exponents, c: Rational) {
        assert_eq!(exps.len(), self.nvars, "exponent vector length");
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(exps) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        MultiPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    /// Partial derivative of the given order in `t_k`.
    pub fn diff(&self, k: usize, order: u32) -> Self {
        assert!((1..=self.nvars).contains(&k), "variable t{k} out of range");
        let i = k - 1;
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] < order {
                continue;
            }
            let falling: BigInt = (0..order).map(|j| BigInt::from(e[i] - j)).product();
            let mut ne = e.clone();
            ne[i] -= order;
            out.add_term(ne, c * Rational::from_integer(falling));
        }
        out
    }

    /// Rewrites each monomial `∏ t_k^{e_k}` as `∏ (x_k / k)^{e_k}`, i.e. the
    /// substitution `t_k = x_k / k`.
    pub fn times_to_power_sums(&self) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            let den: BigInt = e
                .iter()
                .enumerate()
                .map(|(i, &x)| BigInt::from(i + 1).pow(x))
                .product();
            out.add_term(e.clone(), c / Rational::from_integer(den));
        }
        out
    }

    /// Same polynomial viewed in `nvars` variables; extra variables must be absent.
    pub fn with_nvars(&self, nvars: usize) -> Self {
        let mut out = Self::zero(nvars);
        for (e, c) in &self.terms {
            assert!(e[nvars.min(e.len())..].iter().all(|&x| x == 0));
            let mut ne = vec![0; nvars];
            for (i, &x) in e.iter().enumerate().take(nvars) {
                ne[i] = x;
            }
            out.add_term(ne, c.clone());
        }
        out
    }

    fn display_order(a: &Exponents, b: &Exponents) -> Ordering {
        let da: u32 = a.iter().sum();
        let db: u32 = b.iter().sum();
        db.cmp(&da).then_with(|| b.cmp(a))
    }
}

fn combine(a: &MultiPoly, b: &MultiPoly, sign: bool) -> MultiPoly {
    assert_eq!(a.nvars, b.nvars, "variable count mismatch");
    let mut out = a.clone();
    for (e, c) in &b.terms {
        out.add_term(e.clone(), if sign { -c.clone() } else { c.clone() });
    }
    out
}

impl Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        combine(self, rhs, false)
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        combine(self, rhs, true)
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut out = MultiPoly::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.scale(&-Rational::one())
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for MultiPoly {
            type Output = MultiPoly;
            fn $m(self, rhs: MultiPoly) -> MultiPoly {
                (&self).$m(&rhs)
            }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

/// Monomials by decreasing total degree, e.g. `t1^4/24` renders as
/// `1/24·t1^4` and a full polynomial as `1/2·t1^2 - t2`.
impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut keys: Vec<&Exponents> = self.terms.keys().collect();
        keys.sort_by(|a, b| MultiPoly::display_order(a, b));
        for (n, e) in keys.into_iter().enumerate() {
            let c = &self.terms[e];
            let neg = c.is_negative();
            match (n, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let a = c.abs();
            let vars: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &x)| x > 0)
                .map(|(i, &x)| {
                    if x == 1 {
                        format!("t{}", i + 1)
                    } else {
                        format!("t{}^{}", i + 1, x)
                    }
                })
                .collect();
            if vars.is_empty() {
                write!(f, "{}", format_rational(&a))?;
            } else if a.is_one() {
                write!(f, "{}", vars.join("·"))?;
            } else {
                write!(f, "{}·{}", format_rational(&a), vars.join("·"))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, rat_frac};
    use proptest::prelude::*;

    const N: usize = 3;

    fn arb_poly() -> impl Strategy<Value = MultiPoly> {
        prop::collection::vec(
            (prop::collection::vec(0u32..3, N), -4i64..=4, 1i64..=3),
            0..5,
        )
        .prop_map(|ts| {
            let mut p = MultiPoly::zero(N);
            for (e, n, d) in ts {
                p.add_term(e, rat_frac(n, d));
            }
            p
        })
    }

    #[test]
    fn derivative_examples() {
        let t1 = MultiPoly::var(2, 1);
        let sq = &t1 * &t1;
        assert_eq!(sq.diff(1, 1), t1.scale(&rat(2)));
        assert!(MultiPoly::constant(2, rat(5)).diff(2, 1).is_zero());
        assert_eq!(sq.diff(1, 0), sq);
        assert!(sq.diff(1, 3).is_zero());
    }

    #[test]
    fn rendering() {
        let t1 = MultiPoly::var(3, 1);
        let t3 = MultiPoly::var(3, 3);
        let p = (&(&t1 * &t1) * &t3).scale(&rat_frac(3, 2));
        assert_eq!(p.to_string(), "3/2·t1^2·t3");
        let q = &(&t1 * &t1).scale(&rat_frac(1, 2)) - &MultiPoly::var(3, 2);
        assert_eq!(q.to_string(), "1/2·t1^2 - t2");
        assert_eq!((-&MultiPoly::one(3)).to_string(), "-1");
        assert_eq!(MultiPoly::zero(3).to_string(), "0");
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert!((&a - &a).is_zero());
            prop_assert_eq!(&a * &MultiPoly::one(N), a.clone());
        }

        #[test]
        fn mixed_partials_commute(a in arb_poly(), i in 1usize..=N, j in 1usize..=N) {
            prop_assert_eq!(a.diff(i, 1).diff(j, 1), a.diff(j, 1).diff(i, 1));
        }

        #[test]
        fn leibniz_rule(a in arb_poly(), b in arb_poly(), k in 1usize..=N) {
            let lhs = (&a * &b).diff(k, 1);
            let rhs = &(&a.diff(k, 1) * &b) + &(&a * &b.diff(k, 1));
            prop_assert_eq!(lhs, rhs);
        }
    }
}
