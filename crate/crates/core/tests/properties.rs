use eiconal::matrix::ScalarMatrix;
use eiconal::{Monomial, Polynomial, Rational, Scalar};
use num_bigint::BigInt;
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = Rational> {
    (-40i64..=40, 1i64..=12).prop_map(|(n, d)| Rational::new(BigInt::from(n), BigInt::from(d)))
}

fn scalar() -> impl Strategy<Value = Scalar> {
    (rational(), rational(), rational(), rational())
        .prop_map(|(a, b, c, d)| Scalar::new(a, b, c, d))
}

fn small_scalar() -> impl Strategy<Value = Scalar> {
    (-3i64..=3, -2i64..=2, 1i64..=3)
        .prop_map(|(a, b, den)| Scalar::ratio(a, den) + Scalar::sqrt3() * Scalar::from_int(b))
}

fn polynomial(n: usize, max_deg: u32) -> impl Strategy<Value = Polynomial> {
    prop::collection::vec(
        (prop::collection::vec(0..=max_deg, n), small_scalar()),
        0..6,
    )
    .prop_map(move |terms| {
        let mut p = Polynomial::zero(n);
        for (e, c) in terms {
            p.add_term(Monomial::new(e), c);
        }
        p
    })
}

fn homogeneous(n: usize, deg: u32) -> impl Strategy<Value = Polynomial> {
    prop::collection::vec(
        (prop::collection::vec(0..n, deg as usize), small_scalar()),
        0..6,
    )
    .prop_map(move |terms| {
        let mut p = Polynomial::zero(n);
        for (vars, c) in terms {
            let mut e = vec![0u32; n];
            for v in vars {
                e[v] += 1;
            }
            p.add_term(Monomial::new(e), c);
        }
        p
    })
}

fn matrix(n: usize) -> impl Strategy<Value = ScalarMatrix> {
    prop::collection::vec(small_scalar(), n * n).prop_map(move |v| {
        let rows: Vec<Vec<Scalar>> = v.chunks(n).map(|r| r.to_vec()).collect();
        ScalarMatrix::from_rows(rows).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn field_axioms(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a + &Scalar::zero(), a.clone());
        prop_assert_eq!(&a * &Scalar::one(), a.clone());
        prop_assert!((&a - &a).is_zero());
        if !a.is_zero() {
            prop_assert!((&a * &a.inv().unwrap()).is_one());
        }
    }

    #[test]
    fn no_zero_divisors(a in scalar(), b in scalar()) {
        prop_assert_eq!((&a * &b).is_zero(), a.is_zero() || b.is_zero());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn scalar_json_round_trip(a in scalar()) {
        let text = serde_json::to_string(&a).unwrap();
        let back: Scalar = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&back, &a);
        prop_assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }

    #[test]
    fn polynomial_json_round_trip(p in polynomial(3, 3)) {
        let text = serde_json::to_string(&p).unwrap();
        let back: Polynomial = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&back, &p);
        prop_assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }

    #[test]
    fn leibniz_rule(f in polynomial(3, 3), g in polynomial(3, 3), i in 0usize..3) {
        let lhs = (&f * &g).derivative(i);
        let rhs = &(&f.derivative(i) * &g) + &(&f * &g.derivative(i));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn hessian_trace_is_laplacian(f in polynomial(3, 4)) {
        let h = f.hessian();
        let trace = (0..3).fold(Polynomial::zero(3), |acc, i| &acc + &h[i][i]);
        prop_assert_eq!(trace, f.laplacian());
    }

    #[test]
    fn euler_identity(f in homogeneous(3, 3)) {
        prop_assert_eq!(f.euler(), f.scale(&Scalar::from_int(3)));
    }

    #[test]
    fn substitution_composes(f in polynomial(2, 3), a in matrix(2), b in matrix(2)) {
        let lhs = f.substitute_linear(&a).unwrap().substitute_linear(&b).unwrap();
        let rhs = f.substitute_linear(&a.mul(&b).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn substitution_is_a_ring_map(f in polynomial(2, 2), g in polynomial(2, 2), a in matrix(2)) {
        let lhs = (&f * &g).substitute_linear(&a).unwrap();
        let rhs = &f.substitute_linear(&a).unwrap() * &g.substitute_linear(&a).unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}
