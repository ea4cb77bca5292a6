//! Convex lattice polygons, rank-2 sublattices of `A_{s-1}` and the projection
//! of `A_{s-1}/<a, b>` onto the integers.

pub mod intmat;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use intmat::{hermite, kernel_generator, smith_invariants, IntMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("a polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("polygon is not strictly convex and counterclockwise at vertex {0}")]
    NotConvex(usize),
    #[error("polygon winds around more than once")]
    MultipleWinding,
    #[error("basis rows must have the same length s >= 3, got {0} and {1}")]
    Shape(usize, usize),
    #[error("row {row} has degree {degree}, expected 0")]
    RowDegree { row: usize, degree: i64 },
    #[error("basis rows are linearly dependent")]
    RankDeficient,
    #[error("quotient has torsion with invariant factors {}", join(.0))]
    Torsion(Vec<BigInt>),
    #[error("unsupported quotient rank {0} (only rank 1 is handled)")]
    UnsupportedRank(usize),
    #[error("point has degree {0}, expected 0")]
    PointDegree(i64),
    #[error("point has {got} coordinates, expected {expected}")]
    Length { expected: usize, got: usize },
    #[error("integer overflow")]
    Overflow,
}

fn join(v: &[BigInt]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(", ")
}

fn cross(u: (i64, i64), v: (i64, i64)) -> i128 {
    u.0 as i128 * v.1 as i128 - u.1 as i128 * v.0 as i128
}

/// Position of a direction on the circle, starting at the positive x-axis.
fn half_plane(v: (i64, i64)) -> u8 {
    if v.1 > 0 || (v.1 == 0 && v.0 > 0) {
        0
    } else {
        1
    }
}

fn angle_less(u: (i64, i64), v: (i64, i64)) -> bool {
    let (hu, hv) = (half_plane(u), half_plane(v));
    hu < hv || (hu == hv && cross(u, v) > 0)
}

/// A strictly convex lattice polygon with vertices in counterclockwise order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgePolygon {
    vertices: Vec<(i64, i64)>,
}

impl EdgePolygon {
    pub fn from_vertices(vertices: Vec<(i64, i64)>) -> Result<Self, LatticeError> {
        let n = vertices.len();
        if n < 3 {
            return Err(LatticeError::TooFewVertices(n));
        }
        let p = EdgePolygon { vertices };
        let e = p.edges();
        for i in 0..n {
            if cross(e[i], e[(i + 1) % n]) <= 0 {
                return Err(LatticeError::NotConvex((i + 1) % n));
            }
        }
        let wraps = (0..n)
            .filter(|&i| !angle_less(e[i], e[(i + 1) % n]))
            .count();
        if wraps != 1 {
            return Err(LatticeError::MultipleWinding);
        }
        Ok(p)
    }

    /// Polygon with the given edge vectors, starting at the origin.
    pub fn from_edges(edges: &[(i64, i64)]) -> Result<Self, LatticeError> {
        let sum = edges
            .iter()
            .fold((0i64, 0i64), |acc, e| (acc.0 + e.0, acc.1 + e.1));
        if sum != (0, 0) {
            return Err(LatticeError::Parse(format!(
                "edge vectors sum to ({}, {}), not (0, 0)",
                sum.0, sum.1
            )));
        }
        let mut at = (0, 0);
        let mut vertices = Vec::with_capacity(edges.len());
        for e in edges {
            vertices.push(at);
            at = (at.0 + e.0, at.1 + e.1);
        }
        Self::from_vertices(vertices)
    }

    pub fn vertices(&self) -> &[(i64, i64)] {
        &self.vertices
    }

    pub fn edges(&self) -> Vec<(i64, i64)> {
        let n = self.vertices.len();
        (0..n)
            .map(|i| {
                let (p, q) = (self.vertices[i], self.vertices[(i + 1) % n]);
                (q.0 - p.0, q.1 - p.1)
            })
            .collect()
    }
}

impl FromStr for EdgePolygon {
    type Err = LatticeError;

    /// Vertex list `"x1,y1 x2,y2 …"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let vertices = s
            .split_whitespace()
            .map(|tok| {
                let (x, y) = tok
                    .split_once(',')
                    .ok_or_else(|| LatticeError::Parse(format!("vertex {tok:?} is not x,y")))?;
                Ok((parse_int(x)?, parse_int(y)?))
            })
            .collect::<Result<Vec<_>, LatticeError>>()?;
        Self::from_vertices(vertices)
    }
}

fn parse_int(s: &str) -> Result<i64, LatticeError> {
    s.trim()
        .replace('\u{2212}', "-")
        .parse()
        .map_err(|_| LatticeError::Parse(format!("not an integer: {s:?}")))
}

/// Rows `a`, `b` of degree zero spanning a rank-2 sublattice of `A_{s-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<i64>>", into = "Vec<Vec<i64>>")]
pub struct SublatticeBasis {
    a: Vec<i64>,
    b: Vec<i64>,
}

impl SublatticeBasis {
    pub fn new(a: Vec<i64>, b: Vec<i64>) -> Result<Self, LatticeError> {
        if a.len() != b.len() || a.len() < 3 {
            return Err(LatticeError::Shape(a.len(), b.len()));
        }
        for (row, v) in [&a, &b].into_iter().enumerate() {
            let degree: i64 = v.iter().sum();
            if degree != 0 {
                return Err(LatticeError::RowDegree { row, degree });
            }
        }
        let s = a.len();
        let independent =
            (0..s).any(|i| (i + 1..s).any(|j| cross((a[i], b[i]), (a[j], b[j])) != 0));
        if !independent {
            return Err(LatticeError::RankDeficient);
        }
        Ok(SublatticeBasis { a, b })
    }

    pub fn a(&self) -> &[i64] {
        &self.a
    }

    pub fn b(&self) -> &[i64] {
        &self.b
    }

    pub fn s(&self) -> usize {
        self.a.len()
    }

    fn big_rows(&self) -> IntMatrix {
        [&self.a, &self.b]
            .iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect()
    }

    /// Whether `v` is an integer combination of `a` and `b`.
    pub fn contains(&self, v: &[i64]) -> bool {
        if v.len() != self.s() {
            return false;
        }
        let (h, _) = hermite(&self.big_rows());
        let mut rest: Vec<BigInt> = v.iter().map(|&x| BigInt::from(x)).collect();
        for row in &h {
            let Some(c) = row.iter().position(|x| !x.is_zero()) else {
                continue;
            };
            let (q, r) = rest[c].div_rem(&row[c]);
            if !r.is_zero() {
                return false;
            }
            for (x, y) in rest.iter_mut().zip(row) {
                *x -= &q * y;
            }
        }
        rest.iter().all(Zero::is_zero)
    }
}

impl fmt::Display for SublatticeBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let row = |r: &[i64]| {
            r.iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(",")
        };
        write!(f, "{};{}", row(&self.a), row(&self.b))
    }
}

impl FromStr for SublatticeBasis {
    type Err = LatticeError;

    /// Matrix syntax `"5,-2,-2,-1;1,1,-1,-1"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let rows = s
            .split(';')
            .map(|r| r.split(',').map(parse_int).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        match <[Vec<i64>; 2]>::try_from(rows) {
            Ok([a, b]) => Self::new(a, b),
            Err(rows) => Err(LatticeError::Parse(format!(
                "expected 2 rows separated by ';', got {}",
                rows.len()
            ))),
        }
    }
}

impl TryFrom<Vec<Vec<i64>>> for SublatticeBasis {
    type Error = LatticeError;

    fn try_from(rows: Vec<Vec<i64>>) -> Result<Self, Self::Error> {
        match <[Vec<i64>; 2]>::try_from(rows) {
            Ok([a, b]) => Self::new(a, b),
            Err(rows) => Err(LatticeError::Parse(format!(
                "expected 2 rows, got {}",
                rows.len()
            ))),
        }
    }
}

impl From<SublatticeBasis> for Vec<Vec<i64>> {
    fn from(b: SublatticeBasis) -> Self {
        vec![b.a, b.b]
    }
}

/// Columns of the basis are the counterclockwise edge vectors.
pub fn polygon_to_basis(p: &EdgePolygon) -> SublatticeBasis {
    let (a, b) = p.edges().into_iter().unzip();
    SublatticeBasis::new(a, b).expect("edges of a convex polygon span a rank-2 lattice")
}

fn to_i64(x: &BigInt) -> Result<i64, LatticeError> {
    x.to_i64().ok_or(LatticeError::Overflow)
}

/// Hermite normal form of the basis, with `reduced = U · basis`.
pub fn hermite_reduce(
    basis: &SublatticeBasis,
) -> Result<(SublatticeBasis, [[i64; 2]; 2]), LatticeError> {
    let (h, u) = hermite(&basis.big_rows());
    let rows = h
        .iter()
        .map(|r| r.iter().map(to_i64).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    let reduced = SublatticeBasis::try_from(rows)?;
    let t = [
        [to_i64(&u[0][0])?, to_i64(&u[0][1])?],
        [to_i64(&u[1][0])?, to_i64(&u[1][1])?],
    ];
    Ok((reduced, t))
}

/// The projection `n ↦ (w·n)/step` of `A_{s-1}` onto `A_{s-1}/<a, b> ≅ ℤ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuotientMap {
    pub w: Vec<i64>,
    pub step: i64,
    pub torsion_free: bool,
}

impl QuotientMap {
    pub fn project(&self, n: &[i64]) -> Result<i64, LatticeError> {
        if n.len() != self.w.len() {
            return Err(LatticeError::Length {
                expected: self.w.len(),
                got: n.len(),
            });
        }
        let degree: i64 = n.iter().sum();
        if degree != 0 {
            return Err(LatticeError::PointDegree(degree));
        }
        let dot: i128 = self
            .w
            .iter()
            .zip(n)
            .map(|(&w, &x)| w as i128 * x as i128)
            .sum();
        let idx = dot / self.step as i128;
        debug_assert_eq!(idx * self.step as i128, dot);
        i64::try_from(idx).map_err(|_| LatticeError::Overflow)
    }
}

/// Invariant factors of `<a, b>` inside `A_{s-1}`, using coordinates in
/// `f_i = e^i − e^{i+1}`.
pub fn elementary_divisors(basis: &SublatticeBasis) -> Vec<BigInt> {
    let coords: IntMatrix = [basis.a(), basis.b()]
        .iter()
        .map(|row| {
            row[..row.len() - 1]
                .iter()
                .scan(BigInt::zero(), |acc, &x| {
                    *acc += x;
                    Some(acc.clone())
                })
                .collect()
        })
        .collect();
    smith_invariants(&coords)
}

pub fn quotient_map(basis: &SublatticeBasis) -> Result<QuotientMap, LatticeError> {
    let divisors = elementary_divisors(basis);
    if divisors.len() < 2 {
        return Err(LatticeError::RankDeficient);
    }
    if divisors.iter().any(|d| !d.is_one()) {
        return Err(LatticeError::Torsion(
            divisors.into_iter().filter(|d| !d.is_one()).collect(),
        ));
    }
    let s = basis.s();
    if s != 4 {
        return Err(LatticeError::UnsupportedRank(s - 3));
    }
    let mut m = basis.big_rows();
    m.push(vec![BigInt::one(); s]);
    let mut w = kernel_generator(&m).ok_or(LatticeError::RankDeficient)?;
    if w.iter()
        .find(|x| !x.is_zero())
        .is_some_and(Signed::is_negative)
    {
        w = w.into_iter().map(|x| -x).collect();
    }
    let step = w
        .windows(2)
        .fold(BigInt::zero(), |g, p| g.gcd(&(&p[0] - &p[1])));
    Ok(QuotientMap {
        w: w.iter().map(to_i64).collect::<Result<_, _>>()?,
        step: to_i64(&step)?,
        torsion_free: true,
    })
}

pub fn project(map: &QuotientMap, n: &[i64]) -> Result<i64, LatticeError> {
    map.project(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex1() -> SublatticeBasis {
        "5,-2,-2,-1;1,1,-1,-1".parse().unwrap()
    }

    fn ex2() -> SublatticeBasis {
        "1,3,-3,-1;0,1,2,-3".parse().unwrap()
    }

    #[test]
    fn polygon_examples() {
        let p = EdgePolygon::from_edges(&[(5, 1), (-2, 1), (-2, -1), (-1, -1)]).unwrap();
        assert_eq!(polygon_to_basis(&p), ex1());
        let p = EdgePolygon::from_edges(&[(1, 0), (3, 1), (-3, 2), (-1, -3)]).unwrap();
        assert_eq!(polygon_to_basis(&p), ex2());
        let sq: EdgePolygon = "0,0 1,0 1,1 0,1".parse().unwrap();
        assert_eq!(
            polygon_to_basis(&sq),
            SublatticeBasis::new(vec![1, 0, -1, 0], vec![0, 1, 0, -1]).unwrap()
        );
    }

    #[test]
    fn polygon_errors() {
        assert_eq!(
            "0,0 1,0".parse::<EdgePolygon>(),
            Err(LatticeError::TooFewVertices(2))
        );
        // clockwise
        assert!(matches!(
            "0,0 0,1 1,1 1,0".parse::<EdgePolygon>(),
            Err(LatticeError::NotConvex(_))
        ));
        // collinear vertex
        assert!(matches!(
            "0,0 1,0 2,0 1,1".parse::<EdgePolygon>(),
            Err(LatticeError::NotConvex(_))
        ));
        // pentagram: every turn is left but the boundary winds twice
        assert_eq!(
            EdgePolygon::from_edges(&[(3, 2), (-4, 0), (3, -2), (-1, 3), (-1, -3)]),
            Err(LatticeError::MultipleWinding)
        );
        assert!(matches!(
            "0,0 1".parse::<EdgePolygon>(),
            Err(LatticeError::Parse(_))
        ));
    }

    #[test]
    fn basis_validation() {
        assert_eq!(
            SublatticeBasis::new(vec![1, 0, 0, 0], vec![0, 1, -1, 0]),
            Err(LatticeError::RowDegree { row: 0, degree: 1 })
        );
        assert_eq!(
            SublatticeBasis::new(vec![1, -1, 0, 0], vec![2, -2, 0, 0]),
            Err(LatticeError::RankDeficient)
        );
        assert!(matches!(
            "1,2;3".parse::<SublatticeBasis>(),
            Err(LatticeError::Shape(2, 1))
        ));
        assert!(matches!(
            "1,-1,0".parse::<SublatticeBasis>(),
            Err(LatticeError::Parse(_))
        ));
        assert_eq!(ex1().to_string(), "5,-2,-2,-1;1,1,-1,-1");
        let json = serde_json::to_string(&ex1()).unwrap();
        assert_eq!(json, "[[5,-2,-2,-1],[1,1,-1,-1]]");
        assert_eq!(
            serde_json::from_str::<SublatticeBasis>(&json).unwrap(),
            ex1()
        );
    }

    #[test]
    fn hermite_spans_the_printed_forms() {
        let (h1, t1) = hermite_reduce(&ex1()).unwrap();
        let printed = SublatticeBasis::new(vec![3, -4, 0, 1], vec![-4, 3, 1, 0]).unwrap();
        for r in [printed.a(), printed.b()] {
            assert!(h1.contains(r));
        }
        for r in [h1.a(), h1.b()] {
            assert!(printed.contains(r));
        }
        assert_eq!((t1[0][0] * t1[1][1] - t1[0][1] * t1[1][0]).abs(), 1);

        let (h2, _) = hermite_reduce(&ex2()).unwrap();
        assert_eq!(
            h2,
            SublatticeBasis::new(vec![1, 0, -9, 8], vec![0, 1, 2, -3]).unwrap()
        );

        let (again, t) = hermite_reduce(&h2).unwrap();
        assert_eq!(again, h2);
        assert_eq!(t, [[1, 0], [0, 1]]);
    }

    #[test]
    fn quotient_examples() {
        let q = quotient_map(&ex1()).unwrap();
        assert_eq!(q.w, vec![1, -1, 7, -7]);
        assert_eq!(q.step, 2);
        assert!(q.torsion_free);
        for l in -5..=5 {
            assert_eq!(q.project(&[l, -l, 0, 0]).unwrap(), l);
            assert_eq!(
                q.project(&[l, -l - 1, 1, 0]).unwrap(),
                q.project(&[l + 4, -l - 4, 0, 0]).unwrap()
            );
        }
        assert_eq!(q.project(ex1().a()).unwrap(), 0);
        assert_eq!(q.project(ex1().b()).unwrap(), 0);

        let q = quotient_map(&ex2()).unwrap();
        for l in -5..=5 {
            assert_eq!(q.project(&[0, 0, l, -l]).unwrap(), l);
        }
        assert_eq!(q.project(&[1, 0, 0, 0]), Err(LatticeError::PointDegree(1)));
        assert!(matches!(
            q.project(&[0, 0]),
            Err(LatticeError::Length { .. })
        ));
    }

    #[test]
    fn divisors_of_examples() {
        let ones = vec![BigInt::one(), BigInt::one()];
        assert_eq!(elementary_divisors(&ex1()), ones);
        assert_eq!(elementary_divisors(&ex2()), ones);
    }

    #[test]
    fn torsion_and_rank_errors() {
        let t: SublatticeBasis = "2,-2,0,0;0,0,1,-1".parse().unwrap();
        let err = quotient_map(&t).unwrap_err();
        assert_eq!(err, LatticeError::Torsion(vec![BigInt::from(2)]));
        assert_eq!(
            err.to_string(),
            "quotient has torsion with invariant factors 2"
        );
        let five: SublatticeBasis = "1,-1,0,0,0;0,0,1,-1,0".parse().unwrap();
        assert_eq!(quotient_map(&five), Err(LatticeError::UnsupportedRank(2)));
        let three: SublatticeBasis = "1,-1,0;0,1,-1".parse().unwrap();
        assert_eq!(quotient_map(&three), Err(LatticeError::UnsupportedRank(0)));
    }

    #[test]
    fn quotient_agrees_after_reduction() {
        for b in [ex1(), ex2()] {
            let (h, _) = hermite_reduce(&b).unwrap();
            let (q, qh) = (quotient_map(&b).unwrap(), quotient_map(&h).unwrap());
            assert_eq!(q.step, qh.step);
            let neg: Vec<i64> = qh.w.iter().map(|x| -x).collect();
            assert!(q.w == qh.w || q.w == neg);
        }
    }
}
