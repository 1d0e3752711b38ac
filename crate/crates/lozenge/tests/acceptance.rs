//! One PASS/FAIL line per acceptance criterion; exits nonzero if any fails.

use lozenge::cache::covering_table;
use lozenge::verify;
use lozenge_core::continuum::{coulomb_field, LimitConfig, LimitProbe, NegativeCharge, PositiveCharge};
use lozenge_core::correlation::{
    covering_probabilities, discrete_field, hole_triangles, placement_probability, CorrelationOptions, FloatCorrelator,
};
use lozenge_core::coupling::{coupling_p, dd_p_exact, dd_p_leading, CouplingValue, Direct, UFitConfig};
use lozenge_core::exact::{rat_to_f64, KappaFixed};
use lozenge_core::lattice::*;
use lozenge_core::oracle::{
    brute_force_count, count_tilings, kasteleyn_count, oracle_probability, Region, BRUTE_FORCE_LIMIT,
};
use lozenge_core::surface::*;
use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use std::f64::consts::PI;
use std::process::Command;
use std::time::Instant;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

/// Gauss–Legendre nodes and weights on [−1, 1] by Newton iteration on P_n.
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// Moves (x, y) into x ≤ −1 along the orbit of the two generating symmetries.
fn reduce(x: i64, y: i64) -> (i64, i64) {
    let mut orbit = vec![(x, y)];
    let mut i = 0;
    while i < orbit.len() {
        let (a, b) = orbit[i];
        for p in [(b, a), (-a - b - 1, a)] {
            if !orbit.contains(&p) {
                orbit.push(p);
            }
        }
        i += 1;
    }
    *orbit.iter().find(|p| p.0 <= -1).expect("every orbit meets x ≤ −1")
}

/// (1/2π)∫ t^{−y}(−1−t)^N dθ over the arc θ ∈ [2π/3, 4π/3].
fn quadrature(x: i64, y: i64, rule: &[(f64, f64)]) -> f64 {
    let (x, y) = reduce(x, y);
    let n = -x - 1;
    let (lo, hi) = (2.0 * PI / 3.0, 4.0 * PI / 3.0);
    let mut acc = 0.0;
    for &(s, w) in rule {
        let th = 0.5 * (hi - lo) * s + 0.5 * (hi + lo);
        let (c, sn) = (th.cos(), th.sin());
        let (mut re, mut im) = (1.0, 0.0);
        for _ in 0..n {
            let (a, b) = (-1.0 - c, -sn);
            (re, im) = (re * a - im * b, re * b + im * a);
        }
        let (pc, ps) = ((-(y as f64) * th).cos(), (-(y as f64) * th).sin());
        acc += w * (re * pc - im * ps);
    }
    0.5 * (hi - lo) * acc / (2.0 * PI)
}

fn c1_coupling() -> Outcome {
    let third = CouplingValue::rational(BigRational::new(BigInt::from(1), BigInt::from(3)));
    let origin = coupling_p(0, 0) == third;
    let mut sym_fail = 0;
    for x in -30..=30 {
        for y in -30..=30 {
            let p = coupling_p(x, y);
            let s1 = coupling_p(y, x);
            let s2 = coupling_p(-x - y - 1, x);
            let s3 = coupling_p(y, -x - y - 1);
            sym_fail += usize::from(p != s1 || p != s2 || p != s3);
        }
    }
    let rule = gauss_legendre(96);
    let kf = KappaFixed::new(128);
    let mut quad_err = 0.0f64;
    for x in -15..=15 {
        for y in -15..=15 {
            quad_err = quad_err.max((coupling_p(x, y).to_f64(&kf) - quadrature(x, y, &rule)).abs());
        }
    }
    outcome(
        origin && sym_fail == 0 && quad_err <= 1e-10,
        format!(
            "P(0,0)=1/3 {origin}, symmetry failures {sym_fail}/3721, quadrature max err {quad_err:.2e} (tol 1e-10)"
        ),
    )
}

fn c2_identity() -> Outcome {
    match verify::identity31(100, 7) {
        Ok(rep) => outcome(rep.passed() && rep.checked == 100, rep.summary()),
        Err(e) => outcome(false, format!("error {e}")),
    }
}

fn c3_block_operations() -> Outcome {
    let a = verify::lemma33(20, 3);
    let b = verify::lemma34(20, 3);
    outcome(a.passed() && b.passed(), format!("{}; {}", a.summary(), b.summary()))
}

fn c4_coulomb() -> Outcome {
    let cfg = LimitConfig {
        positives: vec![PositiveCharge { x: -1.0, y: 0.0, s: 1, alpha: 0, beta: 0 }],
        negatives: vec![NegativeCharge { z: 1.0, w: 0.0, t: 1, gamma: 0, delta: 0 }],
        q: Ratio::from_integer(1),
        probe: LimitProbe { x: -0.5, y: 1.0, alpha: 0, beta: 0 },
    };
    let limit = coulomb_field(&cfg, 1.0).expect("distinct points");
    let mut errs = Vec::new();
    for rr in [8i64, 16, 32, 64] {
        let hs = HoleSystem::from_holes([TriHole::e(-rr, 0), TriHole::w(rr, 0)]);
        let f = discrete_field(&Direct, l(-rr / 2, rr), &hs, &CorrelationOptions::default()).expect("exact field");
        let (fx, fy) = (rr as f64 * f.fx, rr as f64 * f.fy);
        let err = ((fx - limit.0).powi(2) + (fy - limit.1).powi(2)).sqrt() / (limit.0.powi(2) + limit.1.powi(2)).sqrt();
        errs.push(err);
    }
    let decreasing = errs.windows(2).all(|w| w[1] < w[0]);
    outcome(
        decreasing && errs[3] <= 0.05,
        format!(
            "relative errors at R=8,16,32,64: {:.4} {:.4} {:.4} {:.4} (last ≤ 0.05)",
            errs[0], errs[1], errs[2], errs[3]
        ),
    )
}

fn golden() -> HoleSystem {
    HoleSystem::from_holes([TriHole::e(0, 0), TriHole::w(12, 0)])
}

/// The 20×20 block of positions around the golden pair.
const WINDOW: (i64, i64, i64, i64) = (-4, -10, 15, 9);

fn c5_axioms() -> Outcome {
    let hs = golden();
    let tris = hole_triangles(&hs).unwrap();
    let (x0, y0, x1, y1) = WINDOW;
    let (mut probes, mut bad_sum, mut bad_range) = (0, 0, 0);
    for x in x0..=x1 {
        for y in y0..=y1 {
            for e in [l(x, y), r(x, y)] {
                if tris.contains(&e) {
                    continue;
                }
                let ps = covering_probabilities(&Direct, e, &hs, &CorrelationOptions::default())
                    .expect("exact probabilities");
                probes += 1;
                let num = ps.iter().fold(lozenge_core::exact::KRatio::zero(), |acc, p| {
                    &acc + p.numer.as_ref().expect("exact numerator")
                });
                bad_sum += usize::from(Some(&num) != ps[0].denom.as_ref());
                bad_range += ps.iter().filter(|p| !(0.0..=1.0).contains(&p.value)).count();
            }
        }
    }
    outcome(
        bad_sum == 0 && bad_range == 0 && probes > 700,
        format!("{probes} probes, inexact sums {bad_sum}, values outside [0,1] {bad_range}"),
    )
}

fn c6_circulation() -> Outcome {
    let hs = golden();
    let tris = hole_triangles(&hs).unwrap();
    let (x0, y0, x1, y1) = WINDOW;
    let table = covering_table(&hs, x0 - 1, y0 - 1, x1 + 1, y1 + 1).unwrap();
    let fc = FloatCorrelator::new(|x, y| table.value(x, y), &hs, UFitConfig::default()).unwrap();
    let prob = |lz| fc.probability(lz).unwrap();
    let model = EdgeModel::new(&prob, &tris);
    let (mut charged, mut neutral) = ((0, 0.0f64), (0, 0.0f64));
    for a0 in x0..=x1 {
        for a1 in a0 + 1..=x1 {
            for b0 in y0..=y1 {
                for b1 in b0 + 1..=y1 {
                    if !loop_clear_of_holes(&hs, a0, b0, a1, b1).unwrap() {
                        continue;
                    }
                    let Some(c) = loop_circulation(&parallelogram_loop(a0, b0, a1, b1), &model) else {
                        continue;
                    };
                    let q = enclosed_charge(&hs, a0, b0, a1, b1).unwrap();
                    let res = (c + SHEET_SPACING * q as f64).abs();
                    let slot = if q == 0 { &mut neutral } else { &mut charged };
                    slot.0 += 1;
                    slot.1 = slot.1.max(res);
                }
            }
        }
    }
    outcome(
        charged.0 > 0 && neutral.0 > 0 && charged.1 <= 1e-8 && neutral.1 <= 1e-9,
        format!(
            "{} charged loops max err {:.2e} (tol 1e-8), {} contractible loops max err {:.2e} (tol 1e-9)",
            charged.0, charged.1, neutral.0, neutral.1
        ),
    )
}

fn c7_appendix() -> Outcome {
    let nodes = [0i64, 1, 2];
    let mut worst = 0.0f64;
    let mut fails = Vec::new();
    for (u, v, qq) in [(-1i64, -1i64, 1i64), (1, -2, -2), (2, -1, 1)] {
        for k in 0..=2usize {
            for l in 0..=2usize {
                let scaled: Vec<f64> = [50i64, 100, 200, 400]
                    .iter()
                    .map(|&n| {
                        let q = Ratio::from_integer(qq);
                        let ex = dd_p_exact(&Direct, k, l, u * n, v * n, q, &nodes, &nodes).unwrap().to_f64_auto();
                        let lead = dd_p_leading(k as u32, l as u32, u * n, v * n, q).unwrap();
                        (ex - lead).abs() * (n as f64).powi((k + l + 2) as i32)
                    })
                    .collect();
                let (lo, hi) = scaled.iter().fold((f64::MAX, 0.0f64), |a, &s| (a.0.min(s), a.1.max(s)));
                worst = worst.max(hi / lo);
                if hi > 3.0 * lo || hi.is_nan() {
                    fails.push(format!("({u},{v},{qq}) k={k} l={l}"));
                }
            }
        }
    }
    outcome(
        fails.is_empty(),
        format!(
            "27 series, worst max/min ratio {worst:.3} (band 3){}",
            if fails.is_empty() { String::new() } else { format!("; failing {fails:?}") }
        ),
    )
}

fn c8_helicoids() -> Outcome {
    let mut rows = Vec::new();
    for rr in [8i64, 16, 32] {
        let hs = HoleSystem::from_holes([TriHole::e(0, 0), TriHole::w(rr, 0)]);
        let tris = hole_triangles(&hs).unwrap();
        let w = Window::new(-2 * rr, -2 * rr, 3 * rr, 2 * rr);
        let table = covering_table(&hs, w.x0 - 1, w.y0 - 1, w.x1 + 1, w.y1 + 1).unwrap();
        let fc = FloatCorrelator::new(|x, y| table.value(x, y), &hs, UFitConfig::default()).unwrap();
        let prob = |lz| fc.probability(lz).unwrap();
        let sheet = average_surface(&hs, &w, &CutFamily::eastward(&hs).unwrap(), prob).unwrap();
        let model = EdgeModel::new(&prob, &tris);
        let rep = compare_to_helicoids(&sheet, &hole_helicoids(&hs).unwrap(), 0.75 * rr as f64, &model).unwrap();
        rows.push(rep);
    }
    let decreasing = rows.windows(2).all(|w| w[1].max_abs < w[0].max_abs);
    let last = rows[2];
    outcome(
        decreasing && last.grad_max_rel <= 0.10,
        format!(
            "max fiber distance at R=8,16,32: {:.4} {:.4} {:.4}; gradient error at R=32 max {:.2}% rms {:.2}% (≤ 10%)",
            rows[0].max_abs,
            rows[1].max_abs,
            rows[2].max_abs,
            100.0 * last.grad_max_rel,
            100.0 * last.grad_rms_rel
        ),
    )
}

/// Regions of at most 40 triangles: small hexagons, with and without removed pieces.
fn corpus() -> Vec<Region> {
    let mut out = Vec::new();
    for (a, b, c) in [(1, 1, 1), (1, 1, 2), (1, 2, 2), (2, 2, 2), (1, 2, 3), (1, 1, 5), (2, 2, 3), (1, 3, 3)] {
        out.push(Region::hexagon(a, b, c));
    }
    for (a, b, c) in [(2, 2, 3), (1, 3, 3)] {
        let h = Region::hexagon(a, b, c);
        let tris: Vec<Monomer> = h.triangles().collect();
        for (i, &t) in tris.iter().enumerate() {
            for &u in tris.iter().skip(i + 1).step_by(3) {
                if t.is_left() != u.is_left() {
                    out.push(h.remove(&[t, u]).unwrap());
                }
            }
        }
    }
    out.retain(|r| r.len() <= BRUTE_FORCE_LIMIT);
    out
}

fn c9_oracle() -> Outcome {
    let corpus = corpus();
    let mismatches = corpus.iter().filter(|r| kasteleyn_count(r) != brute_force_count(r).unwrap()).count();
    let h222 = count_tilings(&Region::hexagon(2, 2, 2));
    let hs = HoleSystem::from_holes([TriHole::e(0, 0), TriHole::w(6, 0)]);
    let lz = LozengeLocation::new(1, 0, LozengeDir::D0);
    let plane = placement_probability(&Direct, lz, &hs, &CorrelationOptions::default()).unwrap().value;
    let mid = (TriHole::e(0, 0).centroid_cartesian().0 + TriHole::w(6, 0).centroid_cartesian().0) / 2.0;
    let gaps: Vec<f64> = [8i64, 16, 24]
        .iter()
        .map(|&side| {
            let region = Region::hexagon_centered(side, side, side, (mid, 0.5)).remove_holes(&hs).unwrap();
            (rat_to_f64(&oracle_probability(lz, &region).unwrap()) - plane).abs()
        })
        .collect();
    let decreasing = gaps.windows(2).all(|w| w[1] < w[0]);
    outcome(
        mismatches == 0 && corpus.len() >= 50 && h222 == 20u32.into() && decreasing,
        format!(
            "{} corpus regions, {mismatches} mismatches; H(2,2,2) = {h222}; gaps at sides 8,16,24: {:.3e} {:.3e} {:.3e}",
            corpus.len(),
            gaps[0],
            gaps[1],
            gaps[2]
        ),
    )
}

/// Exit status, stdout, and the bytes of every output file named on the command line.
type RunResult = (i32, Vec<u8>, Vec<(String, Vec<u8>)>);

fn run_cli(args: &[&str], threads: &str) -> RunResult {
    let dir = std::env::temp_dir().join(format!("lozenge-acceptance-{}-{threads}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let args: Vec<String> = args.iter().map(|a| a.replace("{dir}", dir.to_str().unwrap())).collect();
    let out = Command::new(env!("CARGO_BIN_EXE_lozenge"))
        .args(&args)
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .env("LOZENGE_THREADS", threads)
        .output()
        .expect("binary runs");
    let mut files = Vec::new();
    for a in &args {
        if a.starts_with(dir.to_str().unwrap()) {
            files.push((a.clone(), std::fs::read(a).unwrap_or_default()));
        }
    }
    let _ = std::fs::remove_dir_all(&dir);
    (
        out.status.code().unwrap_or(-1),
        out.stdout,
        files.into_iter().map(|(p, b)| (p.rsplit('/').next().unwrap().to_string(), b)).collect(),
    )
}

fn c10_determinism() -> Outcome {
    let commands: &[&[&str]] = &[
        &["coupling", "--x", "3", "--y", "-5"],
        &["coupling-table", "--range", "6", "--out", "{dir}/table.csv"],
        &["field", "--holes", "../../data/golden.json", "--probes", "grid:-2,-3,14,3", "--out", "{dir}/field.csv"],
        &[
            "field",
            "--holes",
            "../../data/golden.json",
            "--probes",
            "grid:-2,-3,14,3",
            "--float",
            "--out",
            "{dir}/field.csv",
        ],
        &[
            "coulomb",
            "--config",
            "../../data/dipole.json",
            "--grid",
            "-2,-2,2,2,9,9",
            "--R",
            "4",
            "--out",
            "{dir}/c.csv",
        ],
        &[
            "converge",
            "--holes",
            "../../data/pair.json",
            "--probe",
            "-0.5,1",
            "--R-list",
            "4,8,16",
            "--out",
            "{dir}/conv.csv",
        ],
        &[
            "surface",
            "--holes",
            "../../data/golden.json",
            "--window",
            "-8,-8,20,8",
            "--R",
            "12",
            "--sheets",
            "2",
            "--out",
            "{dir}/s.obj",
            "--compare",
        ],
        &["verify", "identity31", "--trials", "10", "--seed", "11"],
        &["verify", "lemma33", "--trials", "3", "--seed", "11"],
        &["verify", "lemma34", "--trials", "3", "--seed", "11"],
        &["verify", "symmetries", "--range", "8"],
        &["verify", "circulation", "--holes", "../../data/golden.json", "--window", "-4,-6,16,6", "--stride", "2"],
        &["oracle", "count", "--region", "hex:3,4,5"],
        &["oracle", "compare", "--region", "hex:8,8,8", "--holes", "../../data/pair.json", "--lozenge", "0,1,120"],
        &["oracle", "torus", "--n", "6", "--holes", "../../data/pair.json"],
    ];
    let mut bad = Vec::new();
    for cmd in commands {
        let a = run_cli(cmd, "1");
        let b = run_cli(cmd, "4");
        if a.0 != 0 || a != b {
            bad.push(format!("{} (exit {} / {})", cmd[..2].join(" "), a.0, b.0));
        }
    }
    outcome(
        bad.is_empty(),
        format!(
            "{} commands run twice (1 and 4 threads){}",
            commands.len(),
            if bad.is_empty() { String::new() } else { format!("; differing or failing: {bad:?}") }
        ),
    )
}

fn main() {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 10] = [
        ("coupling exactness", c1_coupling),
        ("field ratio identity", c2_identity),
        ("bracket matrix operations", c3_block_operations),
        ("Coulomb convergence", c4_coulomb),
        ("probability axioms", c5_axioms),
        ("circulation and monodromy", c6_circulation),
        ("divided-difference asymptotics", c7_appendix),
        ("surface vs helicoids", c8_helicoids),
        ("oracle agreement", c9_oracle),
        ("CLI determinism", c10_determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = f();
        let status = if o.pass { "PASS" } else { "FAIL" };
        failed += usize::from(!o.pass);
        println!("{status} {:>2} {name} [{:.2}s]: {}", i + 1, t.elapsed().as_secs_f64(), o.detail);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
