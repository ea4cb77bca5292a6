use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tauseq::exact::Rational;
use tauseq::fock::{tau_discrete, ChargeVector, GroupElement, Window};
use tauseq::lattice::{project, SublatticeBasis};
use tauseq::oeis::load_stripped;
use tauseq::recurrence::{derive, derive_recurrence, generate, OCTAHEDRON_PAIRINGS};
use tauseq::scan::{run_scan, ScanConfig};

const SOMOS_LINE: &str =
    "A018896 ,1,1,1,1,1,1,1,1,2,3,4,5,9,18,34,93,180,348,724,3033,9666,24986,83761,261033,\n";

fn basis(s: &str) -> SublatticeBasis {
    s.parse().unwrap()
}

#[test]
fn second_example_is_found_unmatched_at_bound_three() {
    let db = load_stripped(SOMOS_LINE.as_bytes()).unwrap().db;
    let cfg = ScanConfig {
        bound: 3,
        ..Default::default()
    };
    let out = run_scan(&cfg, &db).unwrap();
    let key = derive_recurrence(&basis("1,3,-3,-1;0,1,2,-3"))
        .unwrap()
        .key();
    let first = out
        .records
        .iter()
        .find(|r| r.key.as_deref() == Some(key.as_str()) && r.duplicate_of.is_none())
        .expect("record for the second example");
    assert_eq!(first.status, "ok");
    assert!(first.matches.is_empty());
    assert_eq!(first.terms.len(), 24);
    assert_eq!(&first.terms[20..], ["41", "79", "163", "490"]);
}

/// The six octahedron points of a derivation, fed to the determinantal tau,
/// satisfy the signed relation, and their projections are the raw pairs.
#[test]
fn derivation_points_satisfy_the_relation() {
    let d = derive(&basis("5,-2,-2,-1;1,1,-1,-1")).unwrap();
    for (k, [p, q]) in d.points.iter().enumerate() {
        let pair = (
            project(&d.quotient, p).unwrap(),
            project(&d.quotient, q).unwrap(),
        );
        assert_eq!(pair, d.raw_pairs[k]);
    }
    let w = Window::new(5, 4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..5 {
        let g = GroupElement::random(w, &mut rng);
        let mut sum = Rational::zero();
        for ([p, q], (_, _, sign)) in d.points.iter().zip(OCTAHEDRON_PAIRINGS) {
            let t = |v: &Vec<i64>| tau_discrete(&g, &ChargeVector::new(v.clone())).unwrap();
            let prod = t(p) * t(q);
            sum += if sign > 0 { prod } else { -prod };
        }
        assert!(sum.is_zero());
    }
}

#[test]
fn first_example_generates_the_listed_terms() {
    let rec = derive_recurrence(&basis("5,-2,-2,-1;1,1,-1,-1")).unwrap();
    let run = generate(&rec, None, 24).unwrap();
    let listed: Vec<String> = SOMOS_LINE
        .trim()
        .trim_start_matches("A018896 ,")
        .trim_end_matches(',')
        .split(',')
        .map(String::from)
        .collect();
    assert_eq!(run.rendered_terms(), listed);
}
