//! The six low-degree bosonic states on the neutral vacuum, checked against
//! the wedge states `v_x v_y |L>` with `|L> = v_{-5/2} v_{-7/2} …`.

use serde::Serialize;

use super::{apply_boson_poly, BasisWedge, ChargeVector, FockError, FockVector, Window};
use crate::combinatorics::HalfInt;
use crate::exact::{format_rational, rat_frac, Rational};
use crate::symbolic::MultiPoly;

/// Outcome of one state identity `P(p)|0> = v_x v_y |L>`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StateIdentity {
    /// Partition of the target wedge state, written `s(λ)`.
    pub label: &'static str,
    pub operator: &'static str,
    pub target: String,
    pub holds: bool,
    /// The computed left-hand side.
    pub observed: String,
    /// Labels of listed targets that the observed state equals, if any.
    pub observed_equals: Vec<&'static str>,
    /// `(wedge, expected coefficient, observed coefficient)` where they differ.
    pub mismatches: Vec<(String, String, String)>,
}

struct Spec {
    label: &'static str,
    operator: &'static str,
    poly: Vec<(Vec<u32>, Rational)>,
    top: [i64; 2],
}

fn specs() -> Vec<Spec> {
    let one = |n, d| rat_frac(n, d);
    vec![
        Spec {
            label: "s()",
            operator: "1",
            poly: vec![(vec![0, 0, 0, 0], one(1, 1))],
            top: [-1, -2],
        },
        Spec {
            label: "s(1)",
            operator: "p1",
            poly: vec![(vec![1, 0, 0, 0], one(1, 1))],
            top: [0, -2],
        },
        Spec {
            label: "s(1,1)",
            operator: "1/2(p1^2 + p2)",
            poly: vec![(vec![2, 0, 0, 0], one(1, 2)), (vec![0, 1, 0, 0], one(1, 2))],
            top: [0, -1],
        },
        Spec {
            label: "s(2)",
            operator: "1/2(p1^2 - p2)",
            poly: vec![
                (vec![2, 0, 0, 0], one(1, 2)),
                (vec![0, 1, 0, 0], one(-1, 2)),
            ],
            top: [1, -2],
        },
        Spec {
            label: "s(2,1)",
            operator: "1/3(p1^3 - p3)",
            poly: vec![
                (vec![3, 0, 0, 0], one(1, 3)),
                (vec![0, 0, 1, 0], one(-1, 3)),
            ],
            top: [1, -1],
        },
        Spec {
            label: "s(2,2)",
            operator: "1/12(p1^4 + 3p2^2 - 4p1p3)",
            poly: vec![
                (vec![4, 0, 0, 0], one(1, 12)),
                (vec![0, 2, 0, 0], one(3, 12)),
                (vec![1, 0, 1, 0], one(-4, 12)),
            ],
            top: [1, 0],
        },
    ]
}

fn target_state(w: &Window, top: [i64; 2]) -> FockVector {
    let k = w.cutoff() as i64;
    let mut seq: Vec<usize> = top
        .iter()
        .map(|&c| w.slot(0, HalfInt::from_code(c)).expect("in window"))
        .collect();
    for code in (-k..=-3).rev() {
        seq.push(w.slot(0, HalfInt::from_code(code)).expect("in window"));
    }
    let (neg, b) = BasisWedge::from_sequence(&seq).expect("distinct");
    let v = FockVector::basis(b);
    if neg {
        v.scale(&rat_frac(-1, 1))
    } else {
        v
    }
}

/// Checks the six identities on a single-component window with cutoff `cutoff`.
/// Needs `cutoff >= 6` so that fourth-order states stay inside the window.
pub fn verify_state_identities(cutoff: usize) -> Result<Vec<StateIdentity>, FockError> {
    if cutoff < 6 {
        return Err(FockError::WindowTooSmall {
            needed: 6,
            got: cutoff,
        });
    }
    let w = Window::new(cutoff, 1)?;
    let vac = FockVector::basis(super::vacuum(&ChargeVector::zero(1), &w)?);
    let specs = specs();
    let targets: Vec<FockVector> = specs.iter().map(|s| target_state(&w, s.top)).collect();
    let render_top = |top: [i64; 2]| {
        format!(
            "v[{}]v[{}]|L>",
            HalfInt::from_code(top[0]),
            HalfInt::from_code(top[1])
        )
    };

    let mut out = Vec::new();
    for (spec, target) in specs.iter().zip(&targets) {
        let mut poly = MultiPoly::zero(4);
        for (e, c) in &spec.poly {
            poly.add_term(e.clone(), c.clone());
        }
        let observed = apply_boson_poly(&w, 0, &poly, &vac)?;
        let diff = observed.sub(target);
        let mismatches = diff
            .terms()
            .map(|(b, _)| {
                (
                    b.render(&w),
                    format_rational(&target.coefficient(b)),
                    format_rational(&observed.coefficient(b)),
                )
            })
            .collect();
        let observed_equals = specs
            .iter()
            .zip(&targets)
            .filter(|(_, t)| **t == observed)
            .map(|(s, _)| s.label)
            .collect();
        out.push(StateIdentity {
            label: spec.label,
            operator: spec.operator,
            target: render_top(spec.top),
            holds: diff.is_zero(),
            observed: observed.render(&w),
            observed_equals,
            mismatches,
        });
    }
    Ok(out)
}
