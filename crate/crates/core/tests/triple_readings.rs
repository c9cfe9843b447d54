//! The two readings of the triple sum: the pattern on the smoothed link
//! diagram (`Reading::Diagram`) and on `iota` of the smoothed curve
//! (`Reading::Curve`, which is also how the flat version is defined).

use tricobracket::diagram::{random_diagram, Diagram, Kind, Shape};
use tricobracket::fuzz::{fuzz, replay_steps, FuzzConfig};
use tricobracket::gdf::{builtin_pattern, Pattern, Perm};
use tricobracket::invariants::{flat_triple_invariant, triple_invariant, triple_invariant_with, Invariant, Reading};
use tricobracket::moves::{apply_move, enumerate_moves, MoveKind};

fn knot(s: &str) -> Diagram {
    Diagram::parse(s, Kind::Knotted).unwrap()
}

fn long8() -> Diagram {
    let text = include_str!("../fixtures/long8.txt");
    let line = text.lines().find(|l| !l.starts_with('#')).unwrap();
    knot(line)
}

fn pattern(name: &str, sigma: &str) -> Pattern {
    builtin_pattern(name, Some(sigma.parse().unwrap())).unwrap()
}

/// (pattern, permutation) pairs whose curve value is not identically zero.
const LIVE: [(&str, &str); 4] = [("lambda", "213"), ("lambda", "312"), ("nu", "132"), ("nu", "231")];

fn long_knots(count: u64, crossings: usize) -> impl Iterator<Item = Diagram> {
    (0..count).map(move |s| random_diagram(crossings, &[Shape::Line], Kind::Knotted, s).unwrap())
}

#[test]
fn iota_images_point_up() {
    // over markers at first visits, components visited in order: every
    // arrow between two components runs from the lower to the higher one
    for d in long_knots(200, 8) {
        let d = d.shadow().iota().unwrap();
        for a in d.arrows() {
            let (o, u) = (a.over_slot().unwrap(), a.under_slot().unwrap());
            assert!(o < u);
            assert!(o.comp <= u.comp);
        }
    }
}

#[test]
fn curve_reading_vanishes_except_on_four_permutations() {
    for name in ["lambda", "nu"] {
        for sigma in Perm::all() {
            let p = builtin_pattern(name, Some(sigma)).unwrap();
            let live = LIVE.contains(&(name, sigma.to_string().as_str()));
            let nonzero = long_knots(150, 8)
                .filter(|d| !triple_invariant_with(d, &p, Reading::Curve).unwrap().is_zero())
                .count();
            if live {
                assert!(nonzero > 50, "{name}[{sigma}]: {nonzero}");
            } else {
                assert_eq!(nonzero, 0, "{name}[{sigma}]");
            }
        }
    }
    let mu = builtin_pattern("mu123", None).unwrap();
    assert!(long_knots(150, 8).all(|d| triple_invariant_with(&d, &mu, Reading::Curve).unwrap().is_zero()));
}

#[test]
fn live_permutations_are_not_invariant() {
    let cfg = FuzzConfig { diagrams: 40, crossings: 8, steps: 15, seed: 5, self_crossing_changes: false };
    for (name, sigma) in LIVE {
        let inv = Invariant::FlatTriple(pattern(name, sigma));
        let s = fuzz(&inv, &cfg).unwrap();
        assert!(!s.passed(), "{name}[{sigma}]");
        let v = &s.violations[0];
        let end = replay_steps(&Diagram::parse(&v.start, Kind::Flat).unwrap(), &v.trace).unwrap();
        assert_eq!(inv.compute(&end).unwrap(), v.found);
    }
}

// smoothing either crossing of a bigon leaves the other one behind with
// over/under and writhe swapped
#[test]
fn diagram_reading_breaks_under_r2_only() {
    let mu = builtin_pattern("mu123", None).unwrap();
    let d = knot("(line) O1+ U2+ U1+ O2+");
    let before = triple_invariant(&d, &mu).unwrap();
    let mut changed = Vec::new();
    for site in enumerate_moves(&d) {
        let after = apply_move(&d, &site).unwrap();
        if triple_invariant(&after, &mu).unwrap() != before {
            changed.push(site.kind);
        }
    }
    assert!(changed.contains(&MoveKind::R2a));
    assert!(!changed.contains(&MoveKind::R1a) && !changed.contains(&MoveKind::R1b));
}

#[test]
fn iota_round_trip_holds_for_the_curve_reading() {
    let f = long8().shadow();
    let lifted = f.iota().unwrap();
    let mut patterns = vec![builtin_pattern("mu123", None).unwrap()];
    for name in ["lambda", "nu"] {
        for s in Perm::all() {
            patterns.push(builtin_pattern(name, Some(s)).unwrap());
        }
    }
    for p in &patterns {
        assert_eq!(triple_invariant_with(&lifted, p, Reading::Curve).unwrap(), flat_triple_invariant(&f, p).unwrap());
    }
    for d in long_knots(100, 7) {
        let f = d.shadow();
        let lifted = f.iota().unwrap();
        for p in &patterns {
            assert_eq!(triple_invariant_with(&lifted, p, Reading::Curve).unwrap(), flat_triple_invariant(&f, p).unwrap());
        }
    }
}

#[test]
fn iota_round_trip_fails_for_the_diagram_reading() {
    let mu = builtin_pattern("mu123", None).unwrap();
    let differs = long_knots(200, 8).any(|d| {
        let f = d.shadow();
        triple_invariant(&f.iota().unwrap(), &mu).unwrap() != flat_triple_invariant(&f, &mu).unwrap()
    });
    assert!(differs);
}

#[test]
fn eight_crossing_fixture() {
    let d = long8();
    assert_eq!(d.crossing_count(), 8);
    let mu = builtin_pattern("mu123", None).unwrap();
    assert_eq!(triple_invariant(&d, &mu).unwrap().to_string(), "-10 + 6t + 4t^2");
    let nu = pattern("nu", "123");
    assert_eq!(triple_invariant(&d, &nu).unwrap().to_string(), "2t^-2 + 2t^-1 - 4 - 2t + 2t^2");
    // lambda with the identity permutation is mu123
    assert_eq!(triple_invariant(&d, &pattern("lambda", "123")).unwrap(), triple_invariant(&d, &mu).unwrap());
}
