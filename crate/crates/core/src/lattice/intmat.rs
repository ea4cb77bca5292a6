//! Integer matrix normal forms over arbitrary-precision integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::exact::{det_integer, gcd_all};

pub type IntMatrix = Vec<Vec<BigInt>>;

pub fn identity(n: usize) -> IntMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| BigInt::from((i == j) as i64)).collect())
        .collect()
}

fn row_axpy(m: &mut IntMatrix, target: usize, src: usize, k: &BigInt) {
    if k.is_zero() {
        return;
    }
    let s = m[src].clone();
    for (t, x) in m[target].iter_mut().zip(&s) {
        *t -= k * x;
    }
}

fn negate_row(m: &mut IntMatrix, r: usize) {
    for x in &mut m[r] {
        *x = -x.clone();
    }
}

/// Row-style Hermite normal form `H = U·M` with `U` unimodular.
///
/// Nonzero rows come first, each with a positive pivot strictly right of the
/// previous one; entries above a pivot lie in `[0, pivot)`.
pub fn hermite(m: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut h = m.clone();
    let mut u = identity(rows);
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        // smallest nonzero magnitude at or below row r
        while let Some(p) = (r..rows)
            .filter(|&i| !h[i][c].is_zero())
            .min_by(|&i, &j| h[i][c].abs().cmp(&h[j][c].abs()))
        {
            h.swap(r, p);
            u.swap(r, p);
            let mut done = true;
            for i in r + 1..rows {
                if h[i][c].is_zero() {
                    continue;
                }
                let q = h[i][c].div_floor(&h[r][c]);
                row_axpy(&mut h, i, r, &q);
                row_axpy(&mut u, i, r, &q);
                if !h[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h[r][c].is_zero() {
            continue;
        }
        if h[r][c].is_negative() {
            negate_row(&mut h, r);
            negate_row(&mut u, r);
        }
        for i in 0..r {
            let q = h[i][c].div_floor(&h[r][c]);
            row_axpy(&mut h, i, r, &q);
            row_axpy(&mut u, i, r, &q);
        }
        r += 1;
    }
    (h, u)
}

/// Nonzero invariant factors `d_1 | d_2 | …` of the Smith normal form.
pub fn smith_invariants(m: &IntMatrix) -> Vec<BigInt> {
    let mut a = m.clone();
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut out = Vec::new();
    for t in 0..rows.min(cols) {
        loop {
            let Some((pi, pj)) = (t..rows)
                .flat_map(|i| (t..cols).map(move |j| (i, j)))
                .filter(|&(i, j)| !a[i][j].is_zero())
                .min_by(|&(i, j), &(k, l)| a[i][j].abs().cmp(&a[k][l].abs()))
            else {
                return out;
            };
            a.swap(t, pi);
            for row in a.iter_mut() {
                row.swap(t, pj);
            }
            let mut clean = true;
            for i in t + 1..rows {
                let q = a[i][t].div_floor(&a[t][t]);
                row_axpy(&mut a, i, t, &q);
                clean &= a[i][t].is_zero();
            }
            for j in t + 1..cols {
                let q = a[t][j].div_floor(&a[t][t]);
                if !q.is_zero() {
                    for row in a.iter_mut() {
                        let v = &row[t] * &q;
                        row[j] -= v;
                    }
                }
                clean &= a[t][j].is_zero();
            }
            if !clean {
                continue;
            }
            // the pivot must divide the rest; fold an offending row in otherwise
            let offending =
                (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !(&a[i][j] % &a[t][t]).is_zero()));
            match offending {
                Some(i) => {
                    let s = a[i].clone();
                    for (x, y) in a[t].iter_mut().zip(&s) {
                        *x += y;
                    }
                }
                None => break,
            }
        }
        out.push(a[t][t].abs());
    }
    out
}

/// Primitive integer generator of the kernel of an `(n−1)×n` matrix of full
/// rank, from its signed maximal minors.
pub fn kernel_generator(m: &IntMatrix) -> Option<Vec<BigInt>> {
    let n = m.first()?.len();
    if m.len() + 1 != n {
        return None;
    }
    let w: Vec<BigInt> = (0..n)
        .map(|j| {
            let minor: IntMatrix = m
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .filter(|&(k, _)| k != j)
                        .map(|(_, x)| x.clone())
                        .collect()
                })
                .collect();
            let d = det_integer(minor);
            if j % 2 == 0 {
                d
            } else {
                -d
            }
        })
        .collect();
    let g = gcd_all(&w);
    if g.is_zero() {
        return None;
    }
    Some(w.into_iter().map(|x| x / &g).collect())
}

pub fn mat_mul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).map(|k| &row[k] * &b[k][j]).sum())
                .collect()
        })
        .collect()
}

pub fn is_unimodular(u: &IntMatrix) -> bool {
    det_integer(u.clone()).abs().is_one()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        rows.iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect()
    }

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn hermite_examples() {
        let a = m(&[&[1, 3, -3, -1], &[0, 1, 2, -3]]);
        let (h, u) = hermite(&a);
        assert_eq!(h, m(&[&[1, 0, -9, 8], &[0, 1, 2, -3]]));
        assert_eq!(mat_mul(&u, &a), h);
        assert!(is_unimodular(&u));

        let a = m(&[&[5, -2, -2, -1], &[1, 1, -1, -1]]);
        let (h, u) = hermite(&a);
        assert_eq!(h, m(&[&[1, 1, -1, -1], &[0, 7, -3, -4]]));
        assert_eq!(mat_mul(&u, &a), h);

        let (h2, u2) = hermite(&h);
        assert_eq!(h2, h);
        assert_eq!(u2, identity(2));
    }

    #[test]
    fn hermite_rank_deficient() {
        let a = m(&[&[2, 4, 6], &[1, 2, 3]]);
        let (h, u) = hermite(&a);
        assert_eq!(h, m(&[&[1, 2, 3], &[0, 0, 0]]));
        assert_eq!(mat_mul(&u, &a), h);
    }

    #[test]
    fn smith_examples() {
        assert_eq!(
            smith_invariants(&m(&[&[5, 3, 1], &[1, 2, 1]])),
            big(&[1, 1])
        );
        assert_eq!(
            smith_invariants(&m(&[&[2, 0, 0], &[0, 0, 1]])),
            big(&[1, 2])
        );
        assert_eq!(smith_invariants(&m(&[&[2, 4], &[6, 8]])), big(&[2, 4]));
        assert_eq!(smith_invariants(&m(&[&[0, 0], &[0, 0]])), big(&[]));
        assert_eq!(smith_invariants(&m(&[&[4, 0], &[0, 6]])), big(&[2, 12]));
    }

    #[test]
    fn kernel_of_three_rows() {
        let a = m(&[&[5, -2, -2, -1], &[1, 1, -1, -1], &[1, 1, 1, 1]]);
        let w = kernel_generator(&a).unwrap();
        let zero = mat_mul(&a, &w.iter().map(|x| vec![x.clone()]).collect());
        assert!(zero.iter().all(|r| r[0].is_zero()));
        assert_eq!(gcd_all(&w), BigInt::one());
        assert!(w == big(&[1, -1, 7, -7]) || w == big(&[-1, 1, -7, 7]));
    }
}
