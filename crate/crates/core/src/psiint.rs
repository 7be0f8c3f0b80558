//! Intersection numbers of psi classes on the moduli of stable curves.
//!
//! Values come from the string equation and the DVV (Virasoro) recursion,
//! memoized on `(g, sorted exponents)`. Unstable or dimension-violating
//! queries evaluate to zero.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::exactalg::{rat, Rational};

type Key = (u32, Vec<u32>);

static MEMO: OnceLock<RwLock<HashMap<Key, Rational>>> = OnceLock::new();

/// `<tau_{a_1} .. tau_{a_n}>_g`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PsiQuery {
    pub genus: u32,
    pub exponents: Vec<u32>,
}

impl PsiQuery {
    pub fn new(genus: u32, exponents: &[u32]) -> Self {
        PsiQuery {
            genus,
            exponents: exponents.to_vec(),
        }
    }

    pub fn evaluate(&self) -> Rational {
        psi_integral(self.genus, &self.exponents)
    }
}

/// `(2k-1)!!` with `(-1)!! = 1`, as a big integer.
fn odd_double_factorial(k: i64) -> BigInt {
    let mut acc = BigInt::one();
    let mut x = 2 * k - 1;
    while x > 1 {
        acc *= x;
        x -= 2;
    }
    acc
}

/// `dim M_{g,n} - sum a`; zero means the integrand has top degree.
fn dimension_defect(g: u32, a: &[u32]) -> i64 {
    3 * g as i64 - 3 + a.len() as i64 - a.iter().map(|&x| x as i64).sum::<i64>()
}

pub fn is_stable(g: u32, n: usize) -> bool {
    2 * g as i64 - 2 + n as i64 > 0
}

/// Exact value of `int_{M_{g,n}} psi_1^{a_1} .. psi_n^{a_n}`.
pub fn psi_integral(g: u32, exponents: &[u32]) -> Rational {
    if !is_stable(g, exponents.len()) || dimension_defect(g, exponents) != 0 {
        return Rational::zero();
    }
    let mut key = exponents.to_vec();
    key.sort_unstable();
    let memo = MEMO.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(v) = memo.read().unwrap().get(&(g, key.clone())) {
        return v.clone();
    }
    let value = compute(g, &key);
    memo.write().unwrap().entry((g, key)).or_insert(value).clone()
}

fn compute(g: u32, a: &[u32]) -> Rational {
    let n = a.len();
    if g == 0 && n == 3 {
        return Rational::one();
    }
    if g == 1 && n == 1 {
        return rat(1, 24);
    }
    // a is sorted, so a zero exponent sits first
    if a[0] == 0 {
        let rest = &a[1..];
        let mut acc = Rational::zero();
        for j in 0..rest.len() {
            if rest[j] > 0 {
                let mut b = rest.to_vec();
                b[j] -= 1;
                acc += psi_integral(g, &b);
            }
        }
        return acc;
    }
    dvv(g, a)
}

/// `<tau_{k+1} tau_D>_g` via the DVV recursion, with `k+1` the largest exponent.
fn dvv(g: u32, a: &[u32]) -> Rational {
    let n = a.len();
    let k = (a[n - 1] - 1) as i64;
    let d = &a[..n - 1];
    let mut acc = Rational::zero();

    for j in 0..d.len() {
        let dj = d[j] as i64;
        let mut b = d.to_vec();
        b[j] += k as u32;
        let v = psi_integral(g, &b);
        if !v.is_zero() {
            let c = Rational::new(odd_double_factorial(k + dj + 1), odd_double_factorial(dj));
            acc += c * v;
        }
    }

    let half = rat(1, 2);
    for r in 0..k {
        let s = k - 1 - r;
        let c = Rational::from_integer(odd_double_factorial(r + 1) * odd_double_factorial(s + 1));
        if g >= 1 {
            let mut b = d.to_vec();
            b.push(r as u32);
            b.push(s as u32);
            let v = psi_integral(g - 1, &b);
            if !v.is_zero() {
                acc += &half * &c * v;
            }
        }
        // split d into two labeled subsets, genus into g1 + g2
        for mask in 0u32..(1u32 << d.len()) {
            let mut left = vec![r as u32];
            let mut right = vec![s as u32];
            for (i, &x) in d.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    left.push(x);
                } else {
                    right.push(x);
                }
            }
            for g1 in 0..=g {
                let v1 = psi_integral(g1, &left);
                if v1.is_zero() {
                    continue;
                }
                let v2 = psi_integral(g - g1, &right);
                if !v2.is_zero() {
                    acc += &half * &c * v1 * v2;
                }
            }
        }
    }
    acc / Rational::from_integer(odd_double_factorial(k + 2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: u32) -> BigInt {
        (1..=n).fold(BigInt::one(), |acc, i| acc * i)
    }

    fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
        if parts == 0 {
            return if total == 0 { vec![vec![]] } else { vec![] };
        }
        (0..=total)
            .flat_map(|first| {
                compositions(total - first, parts - 1).into_iter().map(move |mut rest| {
                    rest.insert(0, first);
                    rest
                })
            })
            .collect()
    }

    #[test]
    fn base_values() {
        assert_eq!(psi_integral(0, &[0, 0, 0]), rat(1, 1));
        assert_eq!(psi_integral(1, &[1]), rat(1, 24));
        assert_eq!(psi_integral(2, &[4]), rat(1, 1152));
        assert_eq!(psi_integral(1, &[0, 1]), rat(0, 1));
        assert_eq!(psi_integral(1, &[0, 2]), rat(1, 24));
        assert_eq!(psi_integral(1, &[1, 1]), rat(1, 24));
        assert_eq!(psi_integral(0, &[0, 0]), rat(0, 1));
        assert_eq!(psi_integral(2, &[2, 3]), rat(29, 5760));
    }

    #[test]
    fn genus_zero_multinomial() {
        for n in 3..=7usize {
            for a in compositions(n as u32 - 3, n) {
                let expected = Rational::new(
                    factorial(n as u32 - 3),
                    a.iter().map(|&x| factorial(x)).product(),
                );
                assert_eq!(psi_integral(0, &a), expected, "{a:?}");
            }
        }
    }

    #[test]
    fn one_point_closed_form() {
        // <tau_{3g-2}>_g = 1/(24^g g!)
        for g in 1..=5u32 {
            let expected = Rational::new(BigInt::one(), BigInt::from(24).pow(g) * factorial(g));
            assert_eq!(psi_integral(g, &[3 * g - 2]), expected);
        }
    }

    #[test]
    fn string_and_dilaton() {
        for g in 0..=3u32 {
            for n in 1..=4usize {
                if !is_stable(g, n) {
                    continue;
                }
                let dim = 3 * g + n as u32 - 3;
                for a in compositions(dim, n) {
                    let base = psi_integral(g, &a);
                    // dilaton: <tau_1 prod> = (2g-2+n) <prod>
                    let mut with_one = a.clone();
                    with_one.push(1);
                    assert_eq!(
                        psi_integral(g, &with_one),
                        base.clone() * rat(2 * g as i64 - 2 + n as i64, 1)
                    );
                }
                // string: <tau_0 prod> with prod of dimension dim - 1 + 1
                for a in compositions(dim + 1, n) {
                    let mut with_zero = a.clone();
                    with_zero.push(0);
                    let rhs = (0..n)
                        .filter(|&j| a[j] > 0)
                        .map(|j| {
                            let mut b = a.clone();
                            b[j] -= 1;
                            psi_integral(g, &b)
                        })
                        .fold(Rational::zero(), |x, y| x + y);
                    assert_eq!(psi_integral(g, &with_zero), rhs);
                }
            }
        }
    }

    #[test]
    fn order_independent() {
        assert_eq!(psi_integral(2, &[3, 0, 2]), psi_integral(2, &[0, 2, 3]));
    }
}
