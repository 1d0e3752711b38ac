use lozenge_core::continuum::*;
use lozenge_core::correlation::*;
use lozenge_core::coupling::{CouplingTable, Direct, UFitConfig};
use lozenge_core::exact::rat_to_f64;
use lozenge_core::lattice::*;
use lozenge_core::oracle::{oracle_probability, Region};
use lozenge_core::Error;
use num_rational::Ratio;
use proptest::prelude::*;

fn opts() -> CorrelationOptions {
    CorrelationOptions::default()
}

fn pair(d: i64) -> HoleSystem {
    HoleSystem::from_holes([TriHole::e(0, 0), TriHole::w(d, 0)])
}

#[test]
fn lone_lozenges_have_probability_one_third() {
    for dir in LozengeDir::ALL {
        let p =
            placement_probability(&Direct, LozengeLocation::new(3, -7, dir), &HoleSystem::default(), &opts()).unwrap();
        assert!((p.value - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(p.exactness, Exactness::Exact);
    }
}

#[test]
fn probabilities_are_exact_distributions_near_the_pair() {
    let hs = pair(12);
    let holes = hole_triangles(&hs).unwrap();
    let mut checked = 0;
    for x in -4..16 {
        for y in -10..10 {
            for e in [l(x, y), r(x, y)] {
                if holes.contains(&e) {
                    continue;
                }
                let f = discrete_field(&Direct, e, &hs, &opts()).unwrap();
                assert_eq!(f.exact_sum_is_one, Some(true), "{e:?}");
                for p in f.p {
                    assert!((-1e-12..=1.0 + 1e-12).contains(&p), "{e:?} {p}");
                }
                checked += 1;
            }
        }
    }
    assert!(checked > 700);
}

#[test]
fn charge_zero_systems_are_translation_invariant_exactly() {
    let hs = HoleSystem::from_holes([TriHole::e(0, 0), TriHole::w(4, 1)]);
    let base = omega(&Direct, &hs, &[], &opts()).unwrap();
    for v in [ObliqueCoord::new(5, -2), ObliqueCoord::new(-9, 11)] {
        let moved = omega(&Direct, &hs.translate(v), &[], &opts()).unwrap();
        assert_eq!(base.exact, moved.exact);
    }
}

#[test]
fn reflection_swaps_the_two_field_components() {
    let hs = pair(6);
    let rs = hs.reflect().unwrap();
    for e in [l(2, 3), l(-3, 1), r(4, -2), r(1, 1)] {
        let f = discrete_field(&Direct, e, &hs, &opts()).unwrap();
        let g = discrete_field(&Direct, e.reflect(), &rs, &opts()).unwrap();
        assert!((g.fx + f.fy).abs() < 1e-14 && (g.fy + f.fx).abs() < 1e-14, "{e:?}: {f:?} {g:?}");
    }
}

#[test]
fn float_correlator_matches_exact_ratios() {
    let hs = pair(6);
    let table = CouplingTable::new(-30, 30, -30, 30).to_float();
    let fc = FloatCorrelator::new(|x, y| table.value(x, y), &hs, UFitConfig::default()).unwrap();
    for lz in [
        LozengeLocation::new(1, 0, LozengeDir::D0),
        LozengeLocation::new(3, 4, LozengeDir::D120),
        LozengeLocation::new(-5, 2, LozengeDir::D240),
    ] {
        let exact = placement_probability(&Direct, lz, &hs, &opts()).unwrap().value;
        assert!((fc.probability(lz).unwrap() - exact).abs() < 1e-13);
    }
}

#[test]
fn probes_on_holes_are_rejected() {
    let hs = pair(6);
    let err = placement_probability(&Direct, LozengeLocation::new(0, 0, LozengeDir::D0), &hs, &opts()).unwrap_err();
    assert_eq!(err, Error::ProbeOverlapsHole);
    assert_eq!(discrete_field(&Direct, l(0, 0), &hs, &opts()).unwrap_err(), Error::ProbeOverlapsHole);
}

#[test]
fn mirror_field_approaches_negated_left_field() {
    // F′ at r(x,y) against F at l(x,y), as the configuration is scaled up.
    let mut last = f64::INFINITY;
    for k in [2i64, 4, 8] {
        let hs = HoleSystem::from_holes([TriHole::e(-k, 0), TriHole::w(k, 0)]);
        let (x, y) = (-k / 2, k);
        let fl = discrete_field(&Direct, l(x, y), &hs, &opts()).unwrap();
        let fr = discrete_field(&Direct, r(x, y), &hs, &opts()).unwrap();
        let gap = ((fl.fx + fr.fx).powi(2) + (fl.fy + fr.fy).powi(2)).sqrt() / (fl.fx.powi(2) + fl.fy.powi(2)).sqrt();
        assert!(gap < last, "k={k}: {gap} not below {last}");
        last = gap;
    }
}

#[test]
fn field_converges_towards_the_coulomb_field() {
    let mut last = f64::INFINITY;
    for rr in [4i64, 8, 16] {
        let hs = HoleSystem::from_holes([TriHole::e(-rr, 0), TriHole::w(rr, 0)]);
        let f = discrete_field(&Direct, l(-rr / 2, rr), &hs, &opts()).unwrap();
        let cfg = LimitConfig {
            positives: vec![PositiveCharge { x: -1.0, y: 0.0, s: 1, alpha: 0, beta: 0 }],
            negatives: vec![NegativeCharge { z: 1.0, w: 0.0, t: 1, gamma: 0, delta: 0 }],
            q: Ratio::from_integer(1),
            probe: LimitProbe { x: -0.5, y: 1.0, alpha: 0, beta: 0 },
        };
        let c = coulomb_field(&cfg, rr as f64).unwrap();
        let err = ((f.fx - c.0).powi(2) + (f.fy - c.1).powi(2)).sqrt() / (c.0.powi(2) + c.1.powi(2)).sqrt();
        assert!(err < last, "R={rr}: {err}");
        last = err;
    }
    assert!(last < 0.2);
}

#[test]
fn lone_e_hole_correlation_is_kappa_squared_over_four() {
    let k = 3f64.sqrt() / std::f64::consts::PI;
    for h in [TriHole::e(0, 0), TriHole::e(7, -3)] {
        let w = omega(&Direct, &HoleSystem::from_holes([h]), &[], &opts()).unwrap();
        assert!((w.value - k * k / 4.0).abs() < 1e-15);
    }
}

#[test]
fn hexagon_oracle_gap_shrinks_with_size() {
    let hs = pair(6);
    let lz = LozengeLocation::new(1, 0, LozengeDir::D0);
    let plane = placement_probability(&Direct, lz, &hs, &opts()).unwrap().value;
    let mid = (TriHole::e(0, 0).centroid_cartesian().0 + TriHole::w(6, 0).centroid_cartesian().0) / 2.0;
    let mut last = f64::INFINITY;
    for side in [6i64, 10, 14] {
        let region = Region::hexagon_centered(side, side, side, (mid, 0.5)).remove_holes(&hs).unwrap();
        let q = rat_to_f64(&oracle_probability(lz, &region).unwrap());
        let gap = (q - plane).abs();
        assert!(gap < last, "side {side}: gap {gap}");
        last = gap;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn translation_leaves_probabilities_unchanged(dx in -20i64..20, dy in -20i64..20, px in -6i64..6, py in 2i64..6) {
        let hs = pair(4);
        let lz = LozengeLocation::new(px, py, LozengeDir::D120);
        let v = ObliqueCoord::new(dx, dy);
        let a = placement_probability(&Direct, lz, &hs, &opts()).unwrap();
        let b = placement_probability(&Direct, lz.translate(v), &hs.translate(v), &opts()).unwrap();
        prop_assert_eq!(a.numer, b.numer);
        prop_assert_eq!(a.denom, b.denom);
    }

    #[test]
    fn covering_probabilities_sum_to_one(x in -8i64..8, y in 2i64..8, left in any::<bool>()) {
        let hs = pair(6);
        let e = if left { l(x, y) } else { r(x, y) };
        let f = discrete_field(&Direct, e, &hs, &opts()).unwrap();
        prop_assert_eq!(f.exact_sum_is_one, Some(true));
    }
}
