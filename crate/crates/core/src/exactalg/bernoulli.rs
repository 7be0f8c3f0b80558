use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::rational::Rational;

/// Bernoulli polynomial coefficients per degree, lowest power first.
/// Grows monotonically; entries are never rewritten.
static TABLE: OnceLock<RwLock<Vec<Vec<Rational>>>> = OnceLock::new();

fn binomial(n: u32, k: u32) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Bernoulli numbers `B_0..=B_m` with `B_1 = -1/2`.
fn bernoulli_numbers(m: u32) -> Vec<Rational> {
    let mut b: Vec<Rational> = Vec::with_capacity(m as usize + 1);
    b.push(Rational::one());
    for n in 1..=m {
        // sum_{k=0}^{n} C(n+1, k) B_k = 0
        let s = (0..n).fold(Rational::zero(), |acc, k| {
            acc + Rational::from_integer(binomial(n + 1, k)) * &b[k as usize]
        });
        b.push(-s / Rational::from_integer(BigInt::from(n + 1)));
    }
    b
}

fn ensure(m: u32) {
    let table = TABLE.get_or_init(|| RwLock::new(Vec::new()));
    if table.read().unwrap().len() > m as usize {
        return;
    }
    let mut guard = table.write().unwrap();
    if guard.len() > m as usize {
        return;
    }
    let numbers = bernoulli_numbers(m);
    for deg in guard.len() as u32..=m {
        // B_deg(x) = sum_k C(deg, k) B_k x^(deg-k)
        let mut coeffs = vec![Rational::zero(); deg as usize + 1];
        for k in 0..=deg {
            coeffs[(deg - k) as usize] =
                Rational::from_integer(binomial(deg, k)) * &numbers[k as usize];
        }
        guard.push(coeffs);
    }
}

pub fn bernoulli_number(m: u32) -> Rational {
    bernoulli_polynomial(m)[0].clone()
}

/// Coefficients of `B_m(x)`, lowest power first.
pub fn bernoulli_polynomial(m: u32) -> Vec<Rational> {
    ensure(m);
    TABLE.get().unwrap().read().unwrap()[m as usize].clone()
}

/// `B_m(x)`, evaluated exactly.
pub fn bernoulli_eval(m: u32, x: &Rational) -> Rational {
    ensure(m);
    let table = TABLE.get().unwrap().read().unwrap();
    table[m as usize]
        .iter()
        .rev()
        .fold(Rational::zero(), |acc, c| acc * x + c)
}
