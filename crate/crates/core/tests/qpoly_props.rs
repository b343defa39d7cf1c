use kpotent_core::qpoly::{binomial, multinomial};
use kpotent_core::QPolynomial;
use num_bigint::BigInt;
use proptest::prelude::*;

fn poly() -> impl Strategy<Value = QPolynomial> {
    proptest::collection::vec((-50i64..50, 0u32..12), 0..6).prop_map(|terms| {
        let mut p = QPolynomial::zero();
        for (c, d) in terms {
            p.add_term(BigInt::from(c), d);
        }
        p
    })
}

proptest! {
    #[test]
    fn evaluation_is_a_ring_homomorphism(a in poly(), b in poly(), q in -6i64..7) {
        let q = BigInt::from(q);
        prop_assert_eq!((&a + &b).eval(&q), a.eval(&q) + b.eval(&q));
        prop_assert_eq!((&a * &b).eval(&q), a.eval(&q) * b.eval(&q));
        prop_assert_eq!((-&a).eval(&q), -a.eval(&q));
    }

    #[test]
    fn text_round_trip(a in poly()) {
        let back: QPolynomial = a.to_string().parse().unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn subtraction_cancels(a in poly(), b in poly()) {
        prop_assert_eq!(&(&a + &b) - &b, a);
    }

    #[test]
    fn multinomial_is_symmetric(mut parts in proptest::collection::vec(0u64..6, 1..6), seed in any::<u64>()) {
        let n: u64 = parts.iter().sum();
        let before = multinomial(n, &parts).unwrap();
        // Deterministic shuffle from the seed.
        let len = parts.len();
        for i in (1..len).rev() {
            let j = (seed.rotate_left(i as u32) % (i as u64 + 1)) as usize;
            parts.swap(i, j);
        }
        prop_assert_eq!(multinomial(n, &parts).unwrap(), before);
    }

    #[test]
    fn binomial_is_a_two_part_multinomial(n in 0u64..40, r in 0u64..40) {
        prop_assume!(r <= n);
        prop_assert_eq!(binomial(n, r), multinomial(n, &[r, n - r]).unwrap());
    }
}

#[test]
fn multinomials_sum_to_powers() {
    // Σ over compositions of n into s parts of (n; parts) = s^n.
    use kpotent_core::counting::Compositions;
    for n in 0..8u64 {
        for s in 1..5usize {
            let total: num_bigint::BigUint = Compositions::new(n, s)
                .map(|c| multinomial(n, &c).unwrap())
                .sum();
            assert_eq!(total, num_bigint::BigUint::from(s).pow(n as u32));
        }
    }
}
