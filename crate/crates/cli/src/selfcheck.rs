//! Invariant suites of every module, run from the binary.

use std::sync::Arc;
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use orbgw_core::exactalg::{bernoulli_polynomial, rat, SeriesVars, TruncSeries};
use orbgw_core::graphsum::{correlator, GraphSum};
use orbgw_core::groupchar::standard_test_set;
use orbgw_core::psiint::psi_integral;
use orbgw_core::qrroracle::{twisted_potential, OracleBounds};
use orbgw_core::{
    ClassTag, CorrelatorRequest, CycRational, Exponent, InsertionSeries, Normalization, OrbifoldData,
    PuiseuxMonomial, PuiseuxPoly, RMatrix, Rational,
};

use crate::VERSION;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Quick,
    Full,
}

/// Deliberate corruptions, used to confirm that failures are localized.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Faults {
    /// add `1/1000` to the constant term of `B_3`
    pub perturb_bernoulli: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub module: String,
    pub check: String,
    pub passed: bool,
    /// instances covered, or the failing instance with both sides
    pub detail: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelfCheckReport {
    pub version: String,
    pub level: Level,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

type Outcome = Result<String, String>;

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * i)
}

fn describe(orb: &OrbifoldData) -> String {
    let action: Vec<_> = orb.action().iter().map(|c| c.0.clone()).collect();
    format!("G={:?} action={action:?}", orb.orders())
}

fn test_set(level: Level) -> Vec<OrbifoldData> {
    let set = standard_test_set();
    match level {
        Level::Full => set,
        Level::Quick => set
            .into_iter()
            .filter(|o| o.group_order() <= 3 && o.rank() <= 2)
            .collect(),
    }
}

fn eval_poly(coeffs: &[Rational], x: &Rational) -> Rational {
    coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
}

fn bernoulli_identities(faults: Faults) -> Outcome {
    let mut count = 0;
    for m in 0..=12u32 {
        let mut table = bernoulli_polynomial(m);
        if faults.perturb_bernoulli && m == 3 {
            table[0] += rat(1, 1000);
        }
        let sign = if m % 2 == 0 { Rational::one() } else { -Rational::one() };
        for num in -6..=6 {
            let x = rat(num, 5);
            let lhs = eval_poly(&table, &(Rational::one() - &x));
            let rhs = sign.clone() * eval_poly(&table, &x);
            if lhs != rhs {
                return Err(format!("B_{m}(1-x) = {lhs}, (-1)^m B_{m}(x) = {rhs} at x = {x}"));
            }
            let shift = eval_poly(&table, &(&x + Rational::one())) - eval_poly(&table, &x);
            let expected = if m == 0 {
                Rational::zero()
            } else {
                Rational::from_integer(m.into()) * num_traits::pow(x.clone(), m as usize - 1)
            };
            if shift != expected {
                return Err(format!("B_{m}(x+1) - B_{m}(x) = {shift}, m x^(m-1) = {expected} at x = {x}"));
            }
            count += 1;
        }
    }
    Ok(format!("reflection and shift, m <= 12, {count} points"))
}

fn series_identities() -> Outcome {
    let orb = OrbifoldData::build(&[3], &[vec![1], vec![2]]).map_err(|e| e.to_string())?;
    let f = orb.field();
    let mut s = TruncSeries::zero(f, 2, SeriesVars::Z, 8);
    for i in 1..=8u32 {
        s.set(i, 0, PuiseuxPoly::constant(orb.chi(1, 1).scale(&rat(i as i64, 7)), 2));
    }
    let prod = s.exp().and_then(|e| e.mul(&s.neg().exp()?)).map_err(|e| e.to_string())?;
    let one = TruncSeries::one(f, 2, SeriesVars::Z, 8);
    if prod != one {
        return Err(format!("exp(s) exp(-s) = {prod:?}, expected 1"));
    }
    Ok("exp(s) exp(-s) = 1 through z^8".into())
}

fn orthogonality() -> Outcome {
    let mut count = 0;
    let presentations: Vec<Vec<u32>> = vec![
        vec![],
        vec![2],
        vec![3],
        vec![4],
        vec![5],
        vec![6],
        vec![7],
        vec![8],
        vec![9],
        vec![10],
        vec![11],
        vec![12],
        vec![2, 2],
        vec![2, 3],
        vec![2, 4],
        vec![2, 5],
        vec![2, 6],
        vec![3, 3],
        vec![3, 4],
        vec![2, 2, 2],
        vec![2, 2, 3],
    ];
    for orders in presentations {
        let orb = OrbifoldData::build(&orders, &[vec![0; orders.len()]]).map_err(|e| e.to_string())?;
        let n = orb.group_order();
        for x in 0..n {
            for y in 0..n {
                let mut s1 = CycRational::zero(orb.field());
                let mut s2 = CycRational::zero(orb.field());
                for k in 0..n {
                    s1.add_assign_ref(&(&orb.chi(x, orb.inverse(k)) * &orb.chi(y, k)));
                    s2.add_assign_ref(&(&orb.chi(k, orb.inverse(x)) * &orb.chi(k, y)));
                }
                let delta = if x == y { n as i64 } else { 0 };
                let expected = CycRational::from_rational(orb.field(), rat(delta, 1));
                if s1 != expected || s2 != expected {
                    return Err(format!("G={orders:?} ({x},{y}): sums {s1}, {s2}, expected {expected}"));
                }
            }
        }
        count += 1;
    }
    Ok(format!("{count} presentations with |G| <= 12"))
}

fn age_relation(level: Level) -> Outcome {
    let set = test_set(level);
    for orb in &set {
        for h in 0..orb.group_order() {
            let lhs = orb.age(h) + orb.age(orb.inverse(h));
            let rhs = Exponent::from_integer((orb.rank() - orb.fixed_dimension(h)) as i64);
            if lhs != rhs {
                return Err(format!("{} h={h}: age sum {lhs}, codimension {rhs}", describe(orb)));
            }
        }
    }
    Ok(format!("{} orbifolds", set.len()))
}

fn psi_closed_forms() -> Outcome {
    let fixed = [(0, vec![0, 0, 0], rat(1, 1)), (1, vec![1], rat(1, 24)), (2, vec![4], rat(1, 1152))];
    for (g, a, v) in fixed {
        let got = psi_integral(g, &a);
        if got != v {
            return Err(format!("<{a:?}>_{g} = {got}, expected {v}"));
        }
    }
    for g in 1..=5u32 {
        let expected = Rational::new(BigInt::one(), BigInt::from(24).pow(g) * factorial(g));
        let got = psi_integral(g, &[3 * g - 2]);
        if got != expected {
            return Err(format!("<tau_{}>_{g} = {got}, expected {expected}", 3 * g - 2));
        }
    }
    for n in 3..=7u32 {
        let mut a = vec![0; n as usize];
        a[0] = n - 3;
        let expected = Rational::from_integer(BigInt::one());
        let got = psi_integral(0, &a);
        if got != expected {
            return Err(format!("<{a:?}>_0 = {got}, expected 1"));
        }
    }
    Ok("fixed values, one-point and genus-0 closed forms".into())
}

fn symplectic(level: Level) -> Outcome {
    let set = test_set(level);
    for orb in &set {
        let rm = RMatrix::new(Arc::new(orb.clone()), 6);
        if let Err((a, b, p)) = rm.check_symplectic() {
            return Err(format!("{} ({a},{b}): R(z) R^T(-z) entry {p}, expected delta", describe(orb)));
        }
    }
    Ok(format!("{} orbifolds through z^6", set.len()))
}

fn divisibility(level: Level) -> Outcome {
    let set = test_set(level);
    for orb in &set {
        let rm = RMatrix::new(Arc::new(orb.clone()), 6);
        for a in 0..orb.group_order() {
            for b in 0..orb.group_order() {
                rm.edge_numerator_canonical(a, b)
                    .and_then(|n| n.divide_by_z_plus_zeta())
                    .map_err(|e| format!("{} ({a},{b}): {e}", describe(orb)))?;
            }
        }
    }
    Ok(format!("{} orbifolds through total order 6", set.len()))
}

fn hodge_constants() -> Outcome {
    let orb = Arc::new(OrbifoldData::build(&[], &[vec![]]).map_err(|e| e.to_string())?);
    for (a, x, p) in [(0u32, rat(-1, 24), -1i64), (1, rat(1, 24), 0)] {
        let expected = PuiseuxPoly::term(
            PuiseuxMonomial::var(1, 0, Exponent::from_integer(p)),
            CycRational::from_rational(orb.field(), x),
        );
        let req = CorrelatorRequest::new(orb.clone(), 1, Normalization::Equivariant).with_ordered(
            InsertionSeries::class(&orb, a, &ClassTag::UnitBar(0), Normalization::Equivariant),
        );
        let got = correlator(&req).map_err(|e| e.to_string())?;
        if got != expected {
            return Err(format!("<tau_{a}(1bar)>_1 = {got}, expected {expected}"));
        }
    }
    Ok("genus-one Hodge constants on C".into())
}

fn oracle_equality(level: Level) -> Outcome {
    let targets: &[(u32, usize)] = &[(0, 3), (0, 4), (0, 5), (1, 1), (1, 2), (2, 1)];
    let set = match level {
        Level::Full => standard_test_set(),
        Level::Quick => vec![
            OrbifoldData::build(&[3], &[vec![1], vec![1], vec![1]]).map_err(|e| e.to_string())?,
            OrbifoldData::build(&[2], &[vec![1], vec![0]]).map_err(|e| e.to_string())?,
        ],
    };
    let bounds = OracleBounds::covering(targets);
    let mut coefficients = 0;
    for orb in &set {
        let orb = Arc::new(orb.clone());
        let tw = twisted_potential(orb.clone(), bounds).map_err(|e| format!("{}: {e}", describe(&orb)))?;
        for &(g, n) in targets {
            let graph = GraphSum::new(orb.clone(), g, 0, n)
                .symbolic_potential(Normalization::Twisted)
                .map_err(|e| e.to_string())?;
            let oracle = tw.potential.restricted(g, n);
            for key in graph.terms.keys().chain(oracle.terms.keys()) {
                let (x, y) = (graph.coefficient(key), oracle.coefficient(key));
                if x != y {
                    return Err(format!("{} ({g},{n}) {key:?}: graph sum {x}, oracle {y}", describe(&orb)));
                }
            }
            coefficients += graph.len();
        }
    }
    Ok(format!("{} orbifolds, {coefficients} coefficients", set.len()))
}

fn record(module: &str, check: &str, run: impl FnOnce() -> Outcome) -> CheckResult {
    let start = Instant::now();
    let outcome = run();
    let seconds = start.elapsed().as_secs_f64();
    let (passed, detail) = match outcome {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    CheckResult {
        module: module.into(),
        check: check.into(),
        passed,
        detail,
        seconds,
    }
}

pub fn run_selfcheck(level: Level) -> SelfCheckReport {
    run_selfcheck_with(level, Faults::default())
}

pub fn run_selfcheck_with(level: Level, faults: Faults) -> SelfCheckReport {
    let checks = vec![
        record("exactalg", "Bernoulli identities", || bernoulli_identities(faults)),
        record("exactalg", "series exponential", series_identities),
        record("groupchar", "character orthogonality", orthogonality),
        record("groupchar", "age relation", || age_relation(level)),
        record("psiint", "closed forms", psi_closed_forms),
        record("rmatrix", "symplectic identity", || symplectic(level)),
        record("rmatrix", "edge divisibility", || divisibility(level)),
        record("graphsum", "Hodge constants", hodge_constants),
        record("qrroracle", "graph sum equals oracle", || oracle_equality(level)),
    ];
    SelfCheckReport {
        version: VERSION.to_string(),
        level,
        passed: checks.iter().all(|c| c.passed),
        checks,
    }
}
