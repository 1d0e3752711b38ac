use lozenge_core::correlation::{hole_triangles, FloatCorrelator};
use lozenge_core::coupling::{CouplingTable, FloatCouplingTable, UFitConfig};
use lozenge_core::lattice::*;
use lozenge_core::surface::*;
use lozenge_core::Error;
use proptest::prelude::*;
use std::sync::OnceLock;

fn table() -> &'static FloatCouplingTable {
    static T: OnceLock<FloatCouplingTable> = OnceLock::new();
    T.get_or_init(|| CouplingTable::new(-70, 70, -70, 70).to_float())
}

fn golden() -> HoleSystem {
    HoleSystem::from_holes([TriHole::e(0, 0), TriHole::w(12, 0)])
}

fn correlator(hs: &HoleSystem) -> FloatCorrelator<impl Fn(i64, i64) -> f64> {
    let t = table();
    FloatCorrelator::new(move |x, y| t.value(x, y), hs, UFitConfig::default()).unwrap()
}

#[test]
fn monodromy_counts_enclosed_charge() {
    let hs = golden();
    let fc = correlator(&hs);
    let tris = hole_triangles(&hs).unwrap();
    let prob = |lz| fc.probability(lz).unwrap();
    let model = EdgeModel::new(&prob, &tris);
    let step = 3.0 / 2f64.sqrt();
    for (x0, y0, x1, y1, q) in [(-3, -3, 3, 3, 2), (9, -4, 15, 4, -2), (-4, -6, 16, 6, 0), (3, -5, 8, 5, 0)] {
        assert_eq!(enclosed_charge(&hs, x0, y0, x1, y1).unwrap(), q);
        let c = loop_circulation(&parallelogram_loop(x0, y0, x1, y1), &model).unwrap();
        assert!((c + step * q as f64).abs() < 1e-8, "loop ({x0},{y0})-({x1},{y1}): {c}");
    }
}

#[test]
fn sheet_satisfies_the_edge_rule_everywhere() {
    let hs = golden();
    let fc = correlator(&hs);
    let w = Window::new(-6, -10, 18, 10);
    let cuts = CutFamily::eastward(&hs).unwrap();
    let sheet = average_surface(&hs, &w, &cuts, |lz| fc.probability(lz).unwrap()).unwrap();
    assert!(sheet.residual < 1e-9, "{}", sheet.residual);
    assert_eq!(sheet.heights.len(), w.nodes().len());
    assert_eq!(sheet.heights[&sheet.basepoint], 0.0);
}

#[test]
fn changing_cuts_moves_heights_by_whole_sheets() {
    let hs = golden();
    let fc = correlator(&hs);
    let w = Window::new(-6, -10, 18, 10);
    let prob = |lz| fc.probability(lz).unwrap();
    let east = CutFamily::eastward(&hs).unwrap();
    let a = average_surface(&hs, &w, &east, prob).unwrap();
    // Same holes, cuts shifted to the lower half of each hole's row.
    let lowered = CutFamily {
        cuts: east.cuts.iter().map(|c| Cut { start: (c.start.0, c.start.1 - 0.5), end_x: c.end_x }).collect(),
    };
    let b = average_surface(&hs, &w, &lowered, prob).unwrap();
    let mut moved = 0;
    for (n, ha) in &a.heights {
        let k = (b.heights[n] - ha) / SHEET_SPACING;
        assert!((k - k.round()).abs() < 1e-9, "{n:?}: {k}");
        if k.round() != 0.0 {
            moved += 1;
        }
    }
    assert!(moved > 0);
}

#[test]
fn sheets_approach_the_helicoid_sum() {
    let mut last = (f64::INFINITY, f64::INFINITY);
    for rr in [4i64, 8, 16] {
        let hs = HoleSystem::from_holes([TriHole::e(0, 0), TriHole::w(rr, 0)]);
        let fc = correlator(&hs);
        let tris = hole_triangles(&hs).unwrap();
        let prob = |lz| fc.probability(lz).unwrap();
        let w = Window::new(-2 * rr, -2 * rr, 3 * rr, 2 * rr);
        let sheet = average_surface(&hs, &w, &CutFamily::eastward(&hs).unwrap(), prob).unwrap();
        let model = EdgeModel::new(&prob, &tris);
        let rep = compare_to_helicoids(&sheet, &hole_helicoids(&hs).unwrap(), 0.75 * rr as f64, &model).unwrap();
        assert!(rep.max_abs < last.0 && rep.grad_rms_rel < last.1, "R={rr}: {rep:?}");
        last = (rep.max_abs, rep.grad_rms_rel);
    }
}

#[test]
fn window_must_contain_the_holes() {
    let hs = golden();
    let fc = correlator(&hs);
    let w = Window::new(-3, -3, 5, 3);
    let err = average_surface(&hs, &w, &CutFamily::eastward(&hs).unwrap(), |lz| fc.probability(lz).unwrap());
    assert_eq!(err.unwrap_err(), Error::WindowTooSmall);
}

#[test]
fn obj_output_is_deterministic_and_stacked() {
    let hs = HoleSystem::from_holes([TriHole::e(0, 0), TriHole::w(4, 0)]);
    let fc = correlator(&hs);
    let tris = hole_triangles(&hs).unwrap();
    let w = Window::new(-4, -4, 8, 4);
    let cuts = CutFamily::eastward(&hs).unwrap();
    let build = || {
        let sheet = average_surface(&hs, &w, &cuts, |lz| fc.probability(lz).unwrap()).unwrap();
        obj_mesh(&MultiSheetSurface::new(sheet), 3, &tris, &cuts)
    };
    let (a, b) = (build(), build());
    assert_eq!(a, b);
    let verts = a.lines().filter(|l| l.starts_with("v ")).count();
    assert_eq!(verts, 3 * w.nodes().len());
    let faces = a.lines().filter(|l| l.starts_with("f ")).count();
    assert!(faces > 0 && faces % 3 == 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn circulation_matches_enclosed_charge(x0 in -8i64..10, y0 in -9i64..0, dx in 2i64..12, dy in 2i64..12) {
        let hs = golden();
        let (x1, y1) = (x0 + dx, y0 + dy);
        prop_assume!(loop_clear_of_holes(&hs, x0, y0, x1, y1).unwrap());
        let fc = correlator(&hs);
        let tris = hole_triangles(&hs).unwrap();
        let prob = |lz| fc.probability(lz).unwrap();
        let model = EdgeModel::new(&prob, &tris);
        let c = loop_circulation(&parallelogram_loop(x0, y0, x1, y1), &model).unwrap();
        let q = enclosed_charge(&hs, x0, y0, x1, y1).unwrap();
        prop_assert!((c + SHEET_SPACING * q as f64).abs() < 1e-8, "{} vs charge {}", c, q);
    }

    #[test]
    fn contractible_loops_close(x0 in -30i64..30, y0 in -30i64..30, dx in 1i64..6, dy in 1i64..6) {
        let hs = golden();
        prop_assume!(x0 > 16 || x0 + dx < -2 || y0 > 3 || y0 + dy < -3);
        let fc = correlator(&hs);
        let tris = hole_triangles(&hs).unwrap();
        let prob = |lz| fc.probability(lz).unwrap();
        let model = EdgeModel::new(&prob, &tris);
        let c = loop_circulation(&parallelogram_loop(x0, y0, x0 + dx, y0 + dy), &model).unwrap();
        prop_assert!(c.abs() < 1e-9, "{}", c);
    }
}
