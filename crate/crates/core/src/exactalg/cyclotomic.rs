use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock, RwLock};

use num_traits::{One, Zero};

use super::rational::{format_rational, Rational};
use crate::error::{Error, Result};

/// The field `Q(zeta_N)` presented as `Q[x] / Phi_N(x)`.
#[derive(Debug)]
pub struct CyclotomicField {
    conductor: u32,
    /// Coefficients of the monic `Phi_N`, lowest degree first.
    modulus: Vec<i64>,
    /// `zeta^k` reduced into the power basis, for `k` in `0..N`.
    powers: Vec<Vec<Rational>>,
}

static FIELDS: OnceLock<RwLock<HashMap<u32, Arc<CyclotomicField>>>> = OnceLock::new();

fn poly_div_exact(num: &[i64], den: &[i64]) -> Vec<i64> {
    // den is monic
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let mut quot = vec![0i64; num.len() - dd];
    for k in (0..quot.len()).rev() {
        let c = rem[k + dd];
        quot[k] = c;
        for (j, &d) in den.iter().enumerate() {
            rem[k + j] -= c * d;
        }
    }
    debug_assert!(rem.iter().all(|&c| c == 0));
    quot
}

fn cyclotomic_polynomial(n: u32) -> Vec<i64> {
    // x^n - 1 divided by Phi_d for every proper divisor d
    let mut p = vec![0i64; n as usize + 1];
    p[0] = -1;
    p[n as usize] = 1;
    for d in 1..n {
        if n.is_multiple_of(d) {
            p = poly_div_exact(&p, &cyclotomic_polynomial(d));
        }
    }
    p
}

impl CyclotomicField {
    /// Shared field instance for conductor `n` (`n = 1` is `Q`).
    pub fn get(n: u32) -> Arc<CyclotomicField> {
        assert!(n >= 1, "conductor must be positive");
        let registry = FIELDS.get_or_init(|| RwLock::new(HashMap::new()));
        if let Some(f) = registry.read().unwrap().get(&n) {
            return f.clone();
        }
        let field = Arc::new(Self::build(n));
        registry
            .write()
            .unwrap()
            .entry(n)
            .or_insert(field)
            .clone()
    }

    fn build(n: u32) -> Self {
        let modulus = cyclotomic_polynomial(n);
        let degree = modulus.len() - 1;
        let mut powers = Vec::with_capacity(n as usize);
        let mut cur = vec![Rational::zero(); degree];
        cur[0] = Rational::one();
        for _ in 0..n {
            powers.push(cur.clone());
            // multiply by x and reduce
            let mut next = vec![Rational::zero(); degree + 1];
            for (i, c) in cur.iter().enumerate() {
                next[i + 1] = c.clone();
            }
            let top = next.pop().unwrap();
            if !top.is_zero() {
                for (j, &m) in modulus.iter().take(degree).enumerate() {
                    next[j] -= &top * Rational::from_integer(m.into());
                }
            }
            cur = next;
        }
        CyclotomicField {
            conductor: n,
            modulus,
            powers,
        }
    }

    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    /// `phi(N)`, the dimension over `Q`.
    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    pub fn modulus(&self) -> &[i64] {
        &self.modulus
    }

    fn reduce(&self, mut p: Vec<Rational>) -> Vec<Rational> {
        let d = self.degree();
        while p.len() > d {
            let top = p.pop().unwrap();
            if top.is_zero() {
                continue;
            }
            let base = p.len() - d;
            for (j, &m) in self.modulus.iter().take(d).enumerate() {
                if m != 0 {
                    p[base + j] -= &top * Rational::from_integer(m.into());
                }
            }
        }
        p.resize(d, Rational::zero());
        p
    }
}

/// An element of `Q(zeta_N)` in the power basis `1, zeta, .., zeta^(phi(N)-1)`.
#[derive(Clone)]
pub struct CycRational {
    field: Arc<CyclotomicField>,
    coords: Vec<Rational>,
}

impl CycRational {
    pub fn zero(field: &Arc<CyclotomicField>) -> Self {
        CycRational {
            field: field.clone(),
            coords: vec![Rational::zero(); field.degree()],
        }
    }

    pub fn one(field: &Arc<CyclotomicField>) -> Self {
        Self::from_rational(field, Rational::one())
    }

    pub fn from_rational(field: &Arc<CyclotomicField>, x: Rational) -> Self {
        let mut c = Self::zero(field);
        c.coords[0] = x;
        c
    }

    /// `zeta_N^k`, with `k` taken modulo `N`.
    pub fn root_power(field: &Arc<CyclotomicField>, k: i64) -> Self {
        let n = field.conductor as i64;
        let idx = k.rem_euclid(n) as usize;
        CycRational {
            field: field.clone(),
            coords: field.powers[idx].clone(),
        }
    }

    pub fn from_coords(field: &Arc<CyclotomicField>, coords: Vec<Rational>) -> Result<Self> {
        if coords.len() != field.degree() {
            return Err(Error::Parse(format!(
                "expected {} cyclotomic coordinates, got {}",
                field.degree(),
                coords.len()
            )));
        }
        Ok(CycRational {
            field: field.clone(),
            coords,
        })
    }

    pub fn field(&self) -> &Arc<CyclotomicField> {
        &self.field
    }

    pub fn conductor(&self) -> u32 {
        self.field.conductor
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coords[0].is_one() && self.coords[1..].iter().all(Zero::is_zero)
    }

    /// True when every coordinate past the constant one vanishes.
    pub fn is_rational(&self) -> bool {
        self.coords[1..].iter().all(Zero::is_zero)
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        self.is_rational().then(|| &self.coords[0])
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.field.conductor != other.field.conductor {
            return Err(Error::ConductorMismatch {
                left: self.field.conductor,
                right: other.field.conductor,
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a + b)
            .collect();
        Ok(CycRational {
            field: self.field.clone(),
            coords,
        })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a - b)
            .collect();
        Ok(CycRational {
            field: self.field.clone(),
            coords,
        })
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let d = self.field.degree();
        if d == 1 {
            return Ok(CycRational {
                field: self.field.clone(),
                coords: vec![&self.coords[0] * &other.coords[0]],
            });
        }
        let mut prod = vec![Rational::zero(); 2 * d - 1];
        for (i, a) in self.coords.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coords.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        Ok(CycRational {
            field: self.field.clone(),
            coords: self.field.reduce(prod),
        })
    }

    pub fn checked_eq(&self, other: &Self) -> Result<bool> {
        self.check(other)?;
        Ok(self.coords == other.coords)
    }

    pub fn scale(&self, x: &Rational) -> Self {
        CycRational {
            field: self.field.clone(),
            coords: self.coords.iter().map(|c| c * x).collect(),
        }
    }

    pub fn add_assign_ref(&mut self, other: &Self) {
        assert_eq!(self.conductor(), other.conductor(), "conductor mismatch");
        for (a, b) in self.coords.iter_mut().zip(&other.coords) {
            *a += b;
        }
    }
}

impl PartialEq for CycRational {
    fn eq(&self, other: &Self) -> bool {
        self.field.conductor == other.field.conductor && self.coords == other.coords
    }
}

impl Eq for CycRational {}

impl fmt::Debug for CycRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for CycRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            return write!(f, "{}", format_rational(&self.coords[0]));
        }
        let parts: Vec<String> = self
            .coords
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => format_rational(c),
                1 => format!("({})z{}", format_rational(c), self.field.conductor),
                _ => format!("({})z{}^{}", format_rational(c), self.field.conductor, i),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl<'a> $tr<&'a CycRational> for &'a CycRational {
            type Output = CycRational;
            /// Panics on conductor mismatch; use the `checked_*` form to recover.
            fn $method(self, rhs: &'a CycRational) -> CycRational {
                self.$checked(rhs).expect("cyclotomic conductor mismatch")
            }
        }
        impl $tr for CycRational {
            type Output = CycRational;
            fn $method(self, rhs: CycRational) -> CycRational {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);

impl Neg for &CycRational {
    type Output = CycRational;
    fn neg(self) -> CycRational {
        CycRational {
            field: self.field.clone(),
            coords: self.coords.iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for CycRational {
    type Output = CycRational;
    fn neg(self) -> CycRational {
        -&self
    }
}
