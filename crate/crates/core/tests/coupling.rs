use lozenge_core::coupling::*;
use lozenge_core::exact::KappaFixed;
use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use proptest::prelude::*;
use std::f64::consts::PI;

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

/// Moves (x, y) into x ≤ −1 along the orbit of the two symmetries.
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

/// (1/2π)∫ t^{−y}(−1−t)^N dθ over t = e^{iθ}, θ ∈ [2π/3, 4π/3].
fn quadrature(x: i64, y: i64, rule: &[(f64, f64)]) -> f64 {
    let (x, y) = reduce(x, y);
    let n = -x - 1;
    let (lo, hi) = (2.0 * PI / 3.0, 4.0 * PI / 3.0);
    let mut acc = (0.0, 0.0);
    for &(s, w) in rule {
        let th = 0.5 * (hi - lo) * s + 0.5 * (hi + lo);
        let (c, sn) = (th.cos(), th.sin());
        // (−1−t)^N by repeated complex multiplication.
        let (mut re, mut im) = (1.0, 0.0);
        for _ in 0..n {
            let (a, b) = (-1.0 - c, -sn);
            (re, im) = (re * a - im * b, re * b + im * a);
        }
        let (pc, ps) = ((-(y as f64) * th).cos(), (-(y as f64) * th).sin());
        acc.0 += w * (re * pc - im * ps);
        acc.1 += w * (re * ps + im * pc);
    }
    0.5 * (hi - lo) * acc.0 / (2.0 * PI)
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[test]
fn value_at_origin_is_one_third() {
    assert_eq!(coupling_p(0, 0), CouplingValue::rational(q(1, 3)));
    assert_eq!(coupling_p(-1, 0), CouplingValue::rational(q(1, 3)));
}

#[test]
fn minus_one_minus_one_is_minus_sqrt3_over_2pi() {
    let v = coupling_p(-1, -1).to_f64_auto();
    assert!((v + 3f64.sqrt() / (2.0 * PI)).abs() < 1e-15, "{v}");
}

#[test]
fn symmetries_hold_exactly_on_the_box() {
    for x in -30..=30 {
        for y in -30..=30 {
            let p = coupling_p(x, y);
            assert_eq!(p, coupling_p(y, x), "({x},{y})");
            assert_eq!(p, coupling_p(-x - y - 1, x), "({x},{y})");
        }
    }
}

#[test]
fn quadrature_agrees_with_binomial_evaluation() {
    let rule = gauss_legendre(96);
    let kf = KappaFixed::new(128);
    for x in -15..=15 {
        for y in -15..=15 {
            let exact = coupling_p(x, y).to_f64(&kf);
            let quad = quadrature(x, y, &rule);
            assert!((exact - quad).abs() < 1e-10, "({x},{y}): {exact} vs {quad}");
        }
    }
}

#[test]
fn reduction_examples() {
    assert_eq!(reduce_domain(-3, 5), (-3, 5));
    assert_eq!(reduce_domain(5, -3), (-3, 5));
    assert_eq!(reduce_domain(2, 1), (-4, 2));
}

#[test]
fn u0_values() {
    assert!(u0_exact(1, 0).is_zero());
    let v = u0_exact(2, 0).to_f64_auto();
    assert!((v - 3f64.sqrt() / (2.0 * PI)).abs() < 1e-15);
}

#[test]
fn extrapolated_u0_matches_closed_form() {
    let cfg = UFitConfig::default();
    for (a, b) in [(1, 0), (2, 0), (0, 0), (3, 1)] {
        let est = u_coefficient(0, a, b, &cfg).unwrap();
        let exact = u0_exact(a, b).to_f64_auto();
        assert!((est.value - exact).abs() < 1e-6, "({a},{b}) {} vs {exact}", est.value);
    }
}

#[test]
fn divided_differences_of_polynomials() {
    let spec = DividedDifferenceSpec { nodes: vec![-2, 0, 1, 5], order: 3 };
    let cubic = |x: i64| (2 * x * x * x - x + 7) as f64;
    assert!((divided_difference(cubic, &spec).unwrap() - 2.0).abs() < 1e-12);
    let quad = |x: i64| (x * x) as f64;
    assert!(divided_difference(quad, &spec).unwrap().abs() < 1e-12);
    let zeroth = DividedDifferenceSpec { nodes: vec![4], order: 0 };
    assert_eq!(divided_difference(quad, &zeroth).unwrap(), 16.0);
    let short = DividedDifferenceSpec { nodes: vec![1, 2], order: 2 };
    assert!(divided_difference(quad, &short).is_err());
}

#[test]
fn leading_term_specialization() {
    // k = l = 0: (1/2πi)⟨ζ^{r−s−1}/(−r+sζ)⟩ is the asymptotic term itself.
    for (r, s) in [(-40, 7), (13, -29), (-25, -25)] {
        let lead = dd_p_leading(0, 0, r, s, Ratio::from_integer(1)).unwrap();
        assert!((lead - coupling_asymptotic(r, s)).abs() < 1e-15);
    }
    assert!(dd_p_leading(1, 1, 0, 0, Ratio::from_integer(1)).is_err());
}

#[test]
fn divided_difference_error_scales_with_the_next_power() {
    // Ratio of scaled errors between n and 2n stays bounded in a fixed residue class.
    let nodes = [0i64, 1, 2];
    for (u, v, qq) in [(-1i64, -1i64, 1i64), (1, -2, -2)] {
        for k in 0..=1usize {
            for l in 0..=1usize {
                let scaled: Vec<f64> = [40i64, 80, 160]
                    .iter()
                    .map(|&n| {
                        let ex = dd_p_exact(&Direct, k, l, u * n, v * n, Ratio::from_integer(qq), &nodes, &nodes)
                            .unwrap()
                            .to_f64_auto();
                        let lead = dd_p_leading(k as u32, l as u32, u * n, v * n, Ratio::from_integer(qq)).unwrap();
                        (ex - lead).abs() * (n as f64).powi((k + l + 2) as i32)
                    })
                    .collect();
                let (lo, hi) = scaled.iter().fold((f64::MAX, 0.0f64), |a, &s| (a.0.min(s), a.1.max(s)));
                assert!(hi <= 3.0 * lo, "({u},{v},{qq}) k={k} l={l}: {scaled:?}");
            }
        }
    }
}

#[test]
fn table_and_float_table_agree_with_direct() {
    let t = CouplingTable::new(-12, 12, -12, 12);
    let f = t.to_float();
    for x in -12..=12 {
        for y in -12..=12 {
            assert_eq!(t.get(x, y).unwrap(), coupling_p(x, y));
            assert!((f.value(x, y) - coupling_p(x, y).to_f64_auto()).abs() < 1e-15);
        }
    }
}

proptest! {
    #[test]
    fn symmetries_hold_beyond_the_box(x in -60i64..60, y in -60i64..60) {
        let p = coupling_p(x, y);
        prop_assert_eq!(&p, &coupling_p(y, x));
        prop_assert_eq!(&p, &coupling_p(-x - y - 1, x));
    }

    #[test]
    fn local_recurrence(x in -40i64..40, y in -40i64..40) {
        // P(x,y) + P(x−1,y) + P(x,y−1) = δ_{(x,y),(0,0)}.
        let s = &(&coupling_p(x, y) + &coupling_p(x - 1, y)) + &coupling_p(x, y - 1);
        let expected = if (x, y) == (0, 0) { CouplingValue::rational(q(1, 1)) } else { CouplingValue::zero() };
        prop_assert_eq!(s, expected);
    }

    #[test]
    fn values_are_bounded(x in -80i64..80, y in -80i64..80) {
        prop_assert!(coupling_p(x, y).to_f64_auto().abs() <= 1.0);
    }

    #[test]
    fn reduction_lands_in_domain(x in -500i64..500, y in -500i64..500) {
        let (a, b) = reduce_domain(x, y);
        prop_assert!(a <= -1);
        prop_assert_eq!(coupling_p(x, y), coupling_p(a, b));
    }
}
