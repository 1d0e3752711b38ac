use lozenge_core::continuum::*;
use lozenge_core::eisenstein::{eval_rational_function, Eis};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn coefficients(rng: &mut ChaCha8Rng, deg: usize) -> Vec<BigRational> {
    (0..=deg).map(|_| rat(rng.gen_range(-9..=9), rng.gen_range(1..=7))).collect()
}

/// A random rational function of t with small rational coefficients, evaluated at ζ and ζ⁻¹.
fn random_function(rng: &mut ChaCha8Rng) -> ZetaPair {
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

#[test]
fn bracket_block_shifts_for_twenty_random_functions() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    for _ in 0..20 {
        let f = random_function(&mut rng);
        for a in -4..=4 {
            let m = bracket_block2(a, &f);
            assert_eq!(lower_by_rows(&m), bracket_block2(a - 1, &f));
            assert_eq!(lower_by_columns(&m), bracket_block2(a - 1, &f));
            assert_eq!(raise_by_columns(&m), bracket_block2(a + 1, &f));
        }
        for _ in 0..5 {
            let (al, be, ga) = (rng.gen_range(-6..=6), rng.gen_range(-6..=6), rng.gen_range(-6..=6));
            assert_eq!(shift_block3(&bracket_block3(al, be, ga, &f)), shifted_block3(al, be, ga, &f));
        }
    }
}

#[test]
fn printed_column_operations_do_not_raise_the_index() {
    let f = ZetaPair::real(Eis::new(rat(1, 2), rat(3, 5)));
    let m = bracket_block2(0, &f);
    assert_ne!(lower_by_columns(&m), bracket_block2(1, &f));
}

proptest! {
    #[test]
    fn identities_hold_for_unrelated_values(
        a in -8i64..8, al in -8i64..8, be in -8i64..8, ga in -8i64..8,
        c in proptest::array::uniform4(-20i64..20),
    ) {
        // Independent values at ζ and ζ⁻¹: the operations only use 1 + ζ + ζ² = 0.
        let f = ZetaPair {
            at_zeta: Eis::new(rat(c[0], 3), rat(c[1], 5)),
            at_inv: Eis::new(rat(c[2], 7), rat(c[3], 2)),
        };
        let m = bracket_block2(a, &f);
        prop_assert_eq!(lower_by_rows(&m), bracket_block2(a - 1, &f));
        prop_assert_eq!(raise_by_columns(&m), bracket_block2(a + 1, &f));
        prop_assert_eq!(shift_block3(&bracket_block3(al, be, ga, &f)), shifted_block3(al, be, ga, &f));
    }
}
