use thiserror::Error;

use super::MultiPoly;
use crate::combinatorics::Partition;
use crate::exact::{rat, Rational};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum KpError {
    #[error("need at least {needed} variables, got {got}")]
    TooFewVariables { needed: usize, got: usize },
}

/// Complete homogeneous polynomials `h_0 … h_max_n` of
/// `exp(Σ_{k≤m} t_k z^k) = Σ h_n z^n`, via `n·h_n = Σ_k k·t_k·h_{n−k}`.
pub fn h_series(max_n: usize, m: usize) -> Result<Vec<MultiPoly>, KpError> {
    if m == 0 {
        return Err(KpError::TooFewVariables { needed: 1, got: 0 });
    }
    let mut h = vec![MultiPoly::one(m)];
    for n in 1..=max_n {
        let mut acc = MultiPoly::zero(m);
        for k in 1..=n.min(m) {
            let term = (&MultiPoly::var(m, k) * &h[n - k]).scale(&rat(k as i64));
            acc = &acc + &term;
        }
        h.push(acc.scale(&(Rational::from_integer(1.into()) / rat(n as i64))));
    }
    Ok(h)
}

/// Schur polynomial `s_λ = det(h_{λ_i − i + j})` in the times `t_1 … t_m`.
pub fn schur(lambda: &Partition, m: usize) -> Result<MultiPoly, KpError> {
    let size = lambda.size() as usize;
    if m < size.max(1) {
        return Err(KpError::TooFewVariables {
            needed: size.max(1),
            got: m,
        });
    }
    let l = lambda.len();
    if l == 0 {
        return Ok(MultiPoly::one(m));
    }
    let h = h_series(lambda.part(1) as usize + l, m)?;
    let entry = |i: usize, j: usize| -> Option<&MultiPoly> {
        let idx = lambda.part(i + 1) as i64 - i as i64 + j as i64;
        if idx < 0 {
            None
        } else {
            Some(&h[idx as usize])
        }
    };
    let cols: Vec<usize> = (0..l).collect();
    Ok(laplace(0, &cols, &entry, m))
}

// Expansion along row `row` over the remaining columns.
fn laplace<'a>(
    row: usize,
    cols: &[usize],
    entry: &impl Fn(usize, usize) -> Option<&'a MultiPoly>,
    m: usize,
) -> MultiPoly {
    if cols.is_empty() {
        return MultiPoly::one(m);
    }
    let mut acc = MultiPoly::zero(m);
    for (pos, &c) in cols.iter().enumerate() {
        let Some(e) = entry(row, c) else { continue };
        if e.is_zero() {
            continue;
        }
        let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
        let minor = laplace(row + 1, &rest, entry, m);
        let term = e * &minor;
        acc = if pos % 2 == 0 {
            &acc + &term
        } else {
            &acc - &term
        };
    }
    acc
}

/// `ττ₁₁₁₁ − 4τ₁₁₁τ₁ + 3τ₁₁² − 4(ττ₁₃ − τ₁τ₃) + 3(ττ₂₂ − τ₂²)` with
/// `x = t1`, `y = t2`, `t = t3`. Zero exactly when τ solves the bilinear KP equation.
pub fn kp_bilinear_residual(tau: &MultiPoly) -> Result<MultiPoly, KpError> {
    if tau.nvars() < 3 {
        return Err(KpError::TooFewVariables {
            needed: 3,
            got: tau.nvars(),
        });
    }
    let d = |k: usize, o: u32| tau.diff(k, o);
    let t1 = d(1, 1);
    let t11 = d(1, 2);
    let t111 = d(1, 3);
    let t1111 = d(1, 4);
    let t2 = d(2, 1);
    let t22 = d(2, 2);
    let t3 = d(3, 1);
    let t13 = t1.diff(3, 1);

    let three = rat(3);
    let four = rat(4);
    let first = &(&(tau * &t1111) - &(&t111 * &t1).scale(&four)) + &(&t11 * &t11).scale(&three);
    let second = (&(tau * &t13) - &(&t1 * &t3)).scale(&four);
    let third = (&(tau * &t22) - &(&t2 * &t2)).scale(&three);
    Ok(&(&first - &second) + &third)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat_frac;

    fn p(parts: &[u32]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    fn t(m: usize, k: usize) -> MultiPoly {
        MultiPoly::var(m, k)
    }

    // exp(u) truncated: Σ_j u^j / j! with u = Σ t_k z^k, tracking the z-degree
    // as an extra variable (index m+1) and reading off coefficients.
    fn h_by_exponential(max_n: usize, m: usize) -> Vec<MultiPoly> {
        let nv = m + 1;
        let mut u = MultiPoly::zero(nv);
        for k in 1..=m {
            let mut e = vec![0; nv];
            e[k - 1] = 1;
            e[m] = k as u32;
            u.add_term(e, rat(1));
        }
        let mut total = MultiPoly::one(nv);
        let mut power = MultiPoly::one(nv);
        let mut fact = rat(1);
        for j in 1..=max_n {
            power = &power * &u;
            fact *= rat(j as i64);
            total = &total + &power.scale(&(rat(1) / &fact));
        }
        (0..=max_n)
            .map(|n| {
                let mut out = MultiPoly::zero(m);
                for (e, c) in total.terms() {
                    if e[m] as usize == n {
                        out.add_term(e[..m].to_vec(), c.clone());
                    }
                }
                out
            })
            .collect()
    }

    #[test]
    fn h_low_degrees() {
        let h = h_series(4, 4).unwrap();
        assert_eq!(h[0], MultiPoly::one(4));
        assert_eq!(h[1], t(4, 1));
        let h2 = &(&t(4, 1) * &t(4, 1)).scale(&rat_frac(1, 2)) + &t(4, 2);
        assert_eq!(h[2], h2);
        assert_eq!(h[4].coefficient(&[4, 0, 0, 0]), rat_frac(1, 24));
        assert_eq!(h[4].coefficient(&[0, 0, 0, 1]), rat(1));
        assert!(h_series(3, 0).is_err());
    }

    #[test]
    fn h_matches_exponential_expansion() {
        for m in [1, 3, 8] {
            assert_eq!(h_series(8, m).unwrap(), h_by_exponential(8, m));
        }
    }

    #[test]
    fn small_schur_polynomials() {
        assert_eq!(schur(&Partition::empty(), 8).unwrap(), MultiPoly::one(8));
        let sq = (&t(8, 1) * &t(8, 1)).scale(&rat_frac(1, 2));
        assert_eq!(schur(&p(&[2]), 8).unwrap(), &sq + &t(8, 2));
        assert_eq!(schur(&p(&[1, 1]), 8).unwrap(), &sq - &t(8, 2));
        assert_eq!(schur(&p(&[1]), 1).unwrap(), t(1, 1));
        assert!(schur(&p(&[2, 1]), 2).is_err());
    }

    // s_(2,2) with t_k = p_k / k is (p1^4 + 3 p2^2 - 4 p1 p3) / 12.
    #[test]
    fn schur_22_in_power_sums() {
        let s = schur(&p(&[2, 2]), 4).unwrap();
        let mut expected = MultiPoly::zero(4);
        expected.add_term(vec![4, 0, 0, 0], rat_frac(1, 12));
        expected.add_term(vec![0, 2, 0, 0], rat_frac(3, 12));
        expected.add_term(vec![1, 0, 1, 0], rat_frac(-4, 12));
        assert_eq!(s.times_to_power_sums(), expected);
    }

    #[test]
    fn kp_negative_control() {
        let x = t(3, 1);
        let x4 = &(&x * &x) * &(&x * &x);
        let tau = &MultiPoly::one(3) + &x4;
        let expected = &MultiPoly::constant(3, rat(24)) + &x4.scale(&rat(72));
        assert_eq!(kp_bilinear_residual(&tau).unwrap(), expected);
        assert!(kp_bilinear_residual(&MultiPoly::one(3)).unwrap().is_zero());
        assert!(kp_bilinear_residual(&MultiPoly::one(2)).is_err());
    }

    #[test]
    fn schur_polynomials_solve_kp() {
        let parts = Partition::up_to_size(6);
        assert_eq!(parts.len(), 30);
        for lambda in parts {
            let s = schur(&lambda, 8).unwrap();
            assert!(kp_bilinear_residual(&s).unwrap().is_zero(), "{lambda}");
        }
    }

    #[test]
    fn residual_is_quadratic_in_tau() {
        let c = rat_frac(3, 2);
        for tau in [
            schur(&p(&[3, 1]), 4).unwrap(),
            &MultiPoly::one(4) + &(&t(4, 1) * &t(4, 3)),
        ] {
            let r = kp_bilinear_residual(&tau).unwrap();
            let rc = kp_bilinear_residual(&tau.scale(&c)).unwrap();
            assert_eq!(rc, r.scale(&(&c * &c)));
        }
    }

    #[test]
    fn non_schur_fails() {
        let tau = &schur(&p(&[2]), 4).unwrap() + &schur(&p(&[1, 1]), 4).unwrap().scale(&rat(2));
        assert!(!kp_bilinear_residual(&tau).unwrap().is_zero());
    }
}
