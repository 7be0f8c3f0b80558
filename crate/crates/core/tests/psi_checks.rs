use num_bigint::BigInt;
use num_traits::{One, Zero};

use orbgw_core::exactalg::rat;
use orbgw_core::psiint::psi_integral;
use orbgw_core::Rational;

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * i)
}

/// Multisets of `n` exponents summing to `total`, nondecreasing.
fn multisets(total: u32, n: usize, min: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    (min..=total)
        .flat_map(|a| {
            multisets(total - a, n - 1, a).into_iter().map(move |mut rest| {
                rest.insert(0, a);
                rest
            })
        })
        .collect()
}

#[test]
fn known_values() {
    assert_eq!(psi_integral(2, &[2, 3]), rat(29, 5760));
    assert_eq!(psi_integral(2, &[2, 2, 2]), rat(7, 240));
    assert_eq!(psi_integral(2, &[1, 4]), rat(1, 384));
    assert_eq!(psi_integral(3, &[7]), rat(1, 82944));
    assert_eq!(psi_integral(1, &[1, 1]), rat(1, 24));
}

#[test]
fn one_point_closed_form() {
    // <tau_{3g-2}>_g = 1/(24^g g!)
    for g in 1..=6u32 {
        let expected = Rational::new(BigInt::one(), BigInt::from(24).pow(g) * factorial(g));
        assert_eq!(psi_integral(g, &[3 * g - 2]), expected, "g = {g}");
    }
}

#[test]
fn dilaton_equation() {
    // <tau_1 tau_D>_g = (2g - 2 + |D|) <tau_D>_g
    for g in 0..=3u32 {
        for n in 1..=5usize {
            if 2 * g as i64 - 2 + n as i64 <= 0 {
                continue;
            }
            let dim = 3 * g + n as u32 - 3;
            for d in multisets(dim, n, 0) {
                let mut with = d.clone();
                with.push(1);
                let factor = Rational::from_integer((2 * g as i64 - 2 + n as i64).into());
                assert_eq!(psi_integral(g, &with), factor * psi_integral(g, &d), "g={g} {d:?}");
            }
        }
    }
}

#[test]
fn genus_one_tau_one_powers() {
    // <tau_1^n>_1 = (n-1)!/24
    for n in 1..=6u32 {
        let expected = Rational::new(factorial(n - 1), 24.into());
        assert_eq!(psi_integral(1, &vec![1; n as usize]), expected);
    }
}

#[test]
fn order_independence_and_dimension() {
    assert_eq!(psi_integral(2, &[3, 2]), psi_integral(2, &[2, 3]));
    assert!(psi_integral(2, &[2, 2]).is_zero());
    assert!(psi_integral(0, &[0, 0]).is_zero());
}
