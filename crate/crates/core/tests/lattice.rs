use lozenge_core::lattice::*;
use lozenge_core::Error;
use proptest::prelude::*;

fn monomer() -> impl Strategy<Value = Monomer> {
    (-50i64..50, -50i64..50, any::<bool>()).prop_map(|(x, y, left)| if left { l(x, y) } else { r(x, y) })
}

#[test]
fn hole_decomposition_examples() {
    assert_eq!(decompose_hole(TriHole::e(3, -1)), [r(2, -1), r(3, -2)]);
    assert_eq!(decompose_hole(TriHole::w(3, -1)), [l(4, -1), l(3, 0)]);
}

#[test]
fn charges() {
    assert_eq!(TriHole::e(0, 0).charge(), 2);
    assert_eq!(TriHole::w(0, 0).charge(), -2);
    assert_eq!(charge(TriHole::e(5, 5).triangles()), 2);
    let hs = HoleSystem::from_holes([TriHole::e(0, 0), TriHole::e(5, 0), TriHole::w(9, 9)]);
    assert_eq!(hs.total_charge(), 2);
}

#[test]
fn overlapping_holes_are_rejected() {
    let hs = HoleSystem::from_holes([TriHole::e(0, 0), TriHole::w(0, 0)]);
    assert_eq!(validate_system(&hs, &[]).unwrap_err(), Error::OverlappingHoles);
}

#[test]
fn oblique_distance_uses_sixty_degree_metric() {
    let (a, b) = (ObliqueCoord::new(0, 0), ObliqueCoord::new(1, 1));
    assert!((distance(a, b) - 3f64.sqrt()).abs() < 1e-15);
    assert!((distance(a, ObliqueCoord::new(1, -1)) - 1.0).abs() < 1e-15);
}

proptest! {
    #[test]
    fn reflection_is_an_involution(m in monomer()) {
        prop_assert_eq!(m.reflect().reflect(), m);
        prop_assert_ne!(m.reflect().is_left(), m.is_left());
    }

    #[test]
    fn lozenge_monomers_share_an_edge(x in -50i64..50, y in -50i64..50, d in 0usize..3) {
        let lz = LozengeLocation::new(x, y, LozengeDir::ALL[d]);
        let [rm, lm] = lz.monomers();
        let shared = rm.vertices().iter().filter(|v| lm.vertices().contains(v)).count();
        prop_assert_eq!(shared, 2);
        prop_assert_eq!(LozengeLocation::from_pair(rm, lm), Some(lz));
        prop_assert_eq!(lz.reflect().reflect(), lz);
    }

    #[test]
    fn covering_lozenges_contain_the_triangle(m in monomer()) {
        for lz in lozenges_covering(m) {
            prop_assert!(lz.monomers().contains(&m));
        }
    }

    #[test]
    fn hole_reflection_flips_charge(x in -30i64..30, y in -30i64..30, east in any::<bool>()) {
        let h = if east { TriHole::e(x, y) } else { TriHole::w(x, y) };
        prop_assert_eq!(h.reflect().charge(), -h.charge());
        let mut a: Vec<Monomer> = h.triangles().iter().map(|t| t.reflect()).collect();
        let mut b: Vec<Monomer> = h.reflect().triangles().to_vec();
        a.sort();
        b.sort();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn translation_commutes_with_geometry(m in monomer(), dx in -20i64..20, dy in -20i64..20) {
        let v = ObliqueCoord::new(dx, dy);
        let t = m.translate(v);
        let (p, q) = (m.centroid_cartesian(), t.centroid_cartesian());
        let (ex, ey) = v.to_cartesian();
        prop_assert!((q.0 - p.0 - ex).abs() < 1e-9 && (q.1 - p.1 - ey).abs() < 1e-9);
    }
}
