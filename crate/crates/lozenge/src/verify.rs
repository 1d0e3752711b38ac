//! Self-checks behind `lozenge verify`.

use crate::cache::covering_table;
use crate::error::Result;
use lozenge_core::continuum::{
    bracket_block2, bracket_block3, field_ratio, lower_by_columns, lower_by_rows, proposition31_rhs, raise_by_columns,
    sample_limit_config, shift_block3, shifted_block3, ZetaPair,
};
use lozenge_core::correlation::{hole_triangles, FloatCorrelator};
use lozenge_core::coupling::{CouplingTable, UFitConfig};
use lozenge_core::eisenstein::eval_rational_function;
use lozenge_core::lattice::HoleSystem;
use lozenge_core::surface::{
    enclosed_charge, loop_circulation, loop_clear_of_holes, parallelogram_loop, EdgeModel, Window, SHEET_SPACING,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct VerifyReport {
    pub name: &'static str,
    pub checked: usize,
    pub failures: usize,
    /// Largest residual relative to the tolerance scale; zero for exact checks.
    pub max_residual: f64,
    pub tolerance: f64,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failures == 0 && self.checked > 0
    }

    pub fn summary(&self) -> String {
        format!(
            "{}: {} checks, {} failures, max residual {:.3e} (tolerance {:.1e})",
            self.name, self.checked, self.failures, self.max_residual, self.tolerance
        )
    }
}

/// Field ratio against the closed-form right-hand side on seeded random configurations.
pub fn identity31(trials: usize, seed: u64) -> Result<VerifyReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = VerifyReport { name: "identity31", tolerance: 1e-8, ..Default::default() };
    for _ in 0..trials {
        let cfg = sample_limit_config(&mut rng);
        let lhs = field_ratio(&cfg)?;
        let rhs = proposition31_rhs(&cfg)?;
        let res = (lhs - rhs).norm() / (1.0 + rhs.norm());
        rep.checked += 1;
        rep.max_residual = rep.max_residual.max(res);
        if !(res <= rep.tolerance) {
            rep.failures += 1;
        }
    }
    Ok(rep)
}

fn coefficients(rng: &mut ChaCha8Rng, deg: usize) -> Vec<BigRational> {
    (0..=deg)
        .map(|_| BigRational::new(BigInt::from(rng.gen_range(-9..=9)), BigInt::from(rng.gen_range(1..=7))))
        .collect()
}

/// A random rational function of t with small rational coefficients, taken at ζ and ζ⁻¹.
pub fn random_function(rng: &mut ChaCha8Rng) -> ZetaPair {
    loop {
        let (nd, dd) = (rng.gen_range(0..4), rng.gen_range(0..4));
        let num = coefficients(rng, nd);
        let den = coefficients(rng, dd);
        if let Some(v) = eval_rational_function(&num, &den) {
            if !v.is_zero() {
                return ZetaPair::real(v);
            }
        }
    }
}

/// Row and column operations on the 2×2 matrices, checked exactly in ℚ(ζ).
pub fn lemma33(trials: usize, seed: u64) -> VerifyReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = VerifyReport { name: "lemma33", ..Default::default() };
    for _ in 0..trials {
        let f = random_function(&mut rng);
        for a in -4..=4 {
            let m = bracket_block2(a, &f);
            let lower = bracket_block2(a - 1, &f);
            for ok in [
                lower_by_rows(&m) == lower,
                lower_by_columns(&m) == lower,
                raise_by_columns(&m) == bracket_block2(a + 1, &f),
            ] {
                rep.checked += 1;
                rep.failures += usize::from(!ok);
            }
        }
    }
    rep
}

/// The 3×3 operations, checked exactly at random residues.
pub fn lemma34(trials: usize, seed: u64) -> VerifyReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = VerifyReport { name: "lemma34", ..Default::default() };
    for _ in 0..trials {
        let f = random_function(&mut rng);
        for _ in 0..5 {
            let (al, be, ga) = (rng.gen_range(-6..=6), rng.gen_range(-6..=6), rng.gen_range(-6..=6));
            rep.checked += 1;
            if shift_block3(&bracket_block3(al, be, ga, &f)) != shifted_block3(al, be, ga, &f) {
                rep.failures += 1;
            }
        }
    }
    rep
}

/// P(x,y) = P(y,x) = P(−x−y−1,x) and the local recurrence, exactly on a box.
pub fn symmetries(range: i64) -> VerifyReport {
    let t = CouplingTable::new(-range - 1, range + 1, -range - 1, range + 1);
    let mut rep = VerifyReport { name: "symmetries", ..Default::default() };
    let exact = |x: i64, y: i64| t.get(x, y).unwrap_or_else(|| lozenge_core::coupling::coupling_p(x, y));
    for x in -range..=range {
        for y in -range..=range {
            let p = exact(x, y);
            let sum = &(&p + &exact(x - 1, y)) + &exact(x, y - 1);
            let delta = if (x, y) == (0, 0) { 1 } else { 0 };
            let checks = [
                p == exact(y, x),
                p == exact(-x - y - 1, x),
                sum == lozenge_core::coupling::CouplingValue::from_ints(delta, 1, 0, 1),
            ];
            for ok in checks {
                rep.checked += 1;
                rep.failures += usize::from(!ok);
            }
        }
    }
    rep
}

/// Circulation around every parallelogram with corners on a `stride` grid inside the window.
///
/// Loops whose boundary touches a hole are skipped; the rest must close up to
/// −(3/√2)·(enclosed charge).
pub fn circulation(hs: &HoleSystem, window: &Window, stride: i64) -> Result<VerifyReport> {
    let tris = hole_triangles(hs)?;
    let (x0, y0, x1, y1) = (window.x0, window.y0, window.x1, window.y1);
    let table = covering_table(hs, x0, y0, x1, y1)?;
    let fc = FloatCorrelator::new(|x, y| table.value(x, y), hs, UFitConfig::default())?;
    let prob = |lz| fc.probability(lz).unwrap_or(f64::NAN);
    let model = EdgeModel::new(&prob, &tris);
    let mut rep = VerifyReport { name: "circulation", tolerance: 1e-8, ..Default::default() };
    let stride = stride.max(1);
    let xs: Vec<i64> = (x0..=x1).step_by(stride as usize).collect();
    let ys: Vec<i64> = (y0..=y1).step_by(stride as usize).collect();
    for (i, &a0) in xs.iter().enumerate() {
        for &a1 in &xs[i + 1..] {
            for (j, &b0) in ys.iter().enumerate() {
                for &b1 in &ys[j + 1..] {
                    if !loop_clear_of_holes(hs, a0, b0, a1, b1)? {
                        continue;
                    }
                    let Some(c) = loop_circulation(&parallelogram_loop(a0, b0, a1, b1), &model) else {
                        continue;
                    };
                    let q = enclosed_charge(hs, a0, b0, a1, b1)?;
                    let res = (c + SHEET_SPACING * q as f64).abs();
                    rep.checked += 1;
                    rep.max_residual = rep.max_residual.max(res);
                    if !(res <= rep.tolerance) {
                        rep.failures += 1;
                    }
                }
            }
        }
    }
    Ok(rep)
}
