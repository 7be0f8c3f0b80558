use std::sync::Arc;

use num_traits::{One, Zero};
use proptest::prelude::*;

use orbgw_core::exactalg::{bernoulli_eval, rat, SeriesVars, TruncSeries};
use orbgw_core::groupchar::all_actions;
use orbgw_core::{CycRational, CyclotomicField, Exponent, PuiseuxMonomial, PuiseuxPoly, Rational};

const RANK: usize = 2;

fn field() -> Arc<CyclotomicField> {
    CyclotomicField::get(12)
}

fn small_rational() -> impl Strategy<Value = Rational> {
    (-20i64..=20, 1i64..=9).prop_map(|(n, d)| rat(n, d))
}

fn cyclotomic() -> impl Strategy<Value = CycRational> {
    let f = field();
    proptest::collection::vec(small_rational(), f.degree())
        .prop_map(move |c| CycRational::from_coords(&f, c).unwrap())
}

fn monomial() -> impl Strategy<Value = PuiseuxMonomial> {
    proptest::collection::vec((-4i64..=4, 1i64..=3), RANK)
        .prop_map(|e| PuiseuxMonomial::new(e.into_iter().map(|(n, d)| Exponent::new(n, d)).collect()))
}

fn poly() -> impl Strategy<Value = PuiseuxPoly> {
    proptest::collection::vec((monomial(), cyclotomic()), 0..4).prop_map(|terms| {
        let mut p = PuiseuxPoly::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    })
}

/// Univariate series in `z` without constant term, truncated at `order`.
fn series(order: u32) -> impl Strategy<Value = TruncSeries> {
    proptest::collection::vec(small_rational(), order as usize).prop_map(move |cs| {
        let f = field();
        let mut s = TruncSeries::zero(&f, RANK, SeriesVars::Z, order);
        for (i, c) in cs.into_iter().enumerate() {
            s.set(i as u32 + 1, 0, PuiseuxPoly::rational(&f, RANK, c));
        }
        s
    })
}

fn bivariate(order: u32) -> impl Strategy<Value = TruncSeries> {
    let n = ((order + 1) * (order + 2) / 2) as usize;
    proptest::collection::vec(small_rational(), n).prop_map(move |cs| {
        let f = field();
        let mut s = TruncSeries::zero(&f, RANK, SeriesVars::ZZeta, order);
        let mut it = cs.into_iter();
        for d in 0..=order {
            for i in 0..=d {
                s.set(i, d - i, PuiseuxPoly::rational(&f, RANK, it.next().unwrap()));
            }
        }
        s
    })
}

proptest! {
    #[test]
    fn poly_ring_axioms(a in poly(), b in poly(), c in poly()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(&a * &PuiseuxPoly::one(&field(), RANK), a.clone());
    }

    #[test]
    fn poly_records_round_trip(a in poly()) {
        let records = a.to_records();
        prop_assert_eq!(PuiseuxPoly::from_records(&records, &field()).unwrap(), a);
    }

    #[test]
    fn poly_records_survive_json(a in poly()) {
        let json = serde_json::to_string(&a.to_records()).unwrap();
        let back: Vec<orbgw_core::exactalg::TermRecord> = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(PuiseuxPoly::from_records(&back, &field()).unwrap(), a);
    }

    #[test]
    fn bernoulli_shift_and_reflection(m in 0u32..=8, x in small_rational()) {
        let one = Rational::one();
        let shifted = bernoulli_eval(m, &(&x + &one)) - bernoulli_eval(m, &x);
        let expected = if m == 0 {
            Rational::zero()
        } else {
            Rational::from_integer(m.into()) * num_traits::pow(x.clone(), m as usize - 1)
        };
        prop_assert_eq!(shifted, expected);
        let sign = if m % 2 == 0 { one.clone() } else { -one.clone() };
        prop_assert_eq!(bernoulli_eval(m, &(&one - &x)), sign * bernoulli_eval(m, &x));
    }

    #[test]
    fn exp_is_a_homomorphism(s in series(6)) {
        let f = field();
        let product = s.exp().unwrap().mul(&s.neg().exp().unwrap()).unwrap();
        prop_assert_eq!(product, TruncSeries::one(&f, RANK, SeriesVars::Z, 6));
    }

    #[test]
    fn divide_inverts_multiplication(q in bivariate(5)) {
        let f = field();
        let mut linear = TruncSeries::zero(&f, RANK, SeriesVars::ZZeta, 6);
        linear.set(1, 0, PuiseuxPoly::one(&f, RANK));
        linear.set(0, 1, PuiseuxPoly::one(&f, RANK));
        let mut q6 = TruncSeries::zero(&f, RANK, SeriesVars::ZZeta, 6);
        for (&(i, j), c) in q.terms() {
            q6.set(i, j, c.clone());
        }
        let product = linear.mul(&q6).unwrap();
        prop_assert_eq!(product.divide_by_z_plus_zeta().unwrap(), q);
    }

    #[test]
    fn divide_rejects_odd_remainder(q in bivariate(3), c in 1i64..5) {
        let f = field();
        let mut linear = TruncSeries::zero(&f, RANK, SeriesVars::ZZeta, 4);
        linear.set(1, 0, PuiseuxPoly::one(&f, RANK));
        linear.set(0, 1, PuiseuxPoly::one(&f, RANK));
        let mut q4 = TruncSeries::zero(&f, RANK, SeriesVars::ZZeta, 4);
        for (&(i, j), x) in q.terms() {
            q4.set(i, j, x.clone());
        }
        let mut product = linear.mul(&q4).unwrap();
        let bump = &product.coeff(2, 0) + &PuiseuxPoly::rational(&f, RANK, rat(c, 1));
        product.set(2, 0, bump);
        prop_assert!(product.divide_by_z_plus_zeta().is_err());
    }
}

#[test]
fn group_invariants() {
    for orders in [vec![2], vec![3], vec![4], vec![2, 2], vec![6]] {
        for orb in all_actions(&orders, 2) {
            let n = orb.group_order();
            let r = orb.rank();
            for h in 0..n {
                let hi = orb.inverse(h);
                assert_eq!(orb.multiply(h, hi), orb.identity());
                let mut moved = 0;
                for i in 0..r {
                    let s = orb.rotation(h, i) + orb.rotation(hi, i);
                    assert!(s == Exponent::from_integer(0) || s == Exponent::from_integer(1));
                    moved += (s == Exponent::from_integer(1)) as usize;
                }
                assert_eq!(moved, r - orb.fixed_dimension(h));
                assert_eq!(orb.age(h) + orb.age(hi), Exponent::from_integer(moved as i64));
                // characters are homomorphisms
                for g in 0..n {
                    for gamma in 0..n {
                        assert_eq!(orb.chi(gamma, orb.multiply(h, g)), &orb.chi(gamma, h) * &orb.chi(gamma, g));
                    }
                }
            }
        }
    }
}
