//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line per
//! criterion, and exits nonzero if any fails. All comparisons are exact.

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::One;
use rayon::prelude::*;

use orbgw_core::exactalg::rat;
use orbgw_core::graphsum::{
    correlator, graph_weight, CorrelatorRequest, GraphSum, InsertionSeries, Normalization,
};
use orbgw_core::groupchar::standard_test_set;
use orbgw_core::psiint::psi_integral;
use orbgw_core::qrroracle::{oracle_correlator, twisted_potential, OracleBounds};
use orbgw_core::{
    ClassTag, CycRational, Exponent, OrbifoldData, PuiseuxMonomial, PuiseuxPoly, RMatrix, Rational,
};

type Outcome = Result<String, String>;

/// id, name, check, time limit in seconds
type Criterion = (u32, &'static str, fn() -> Outcome, u64);

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * i)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn describe(orb: &OrbifoldData) -> String {
    let action: Vec<_> = orb.action().iter().map(|c| c.0.clone()).collect();
    format!("G={:?} action={:?}", orb.orders(), action)
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

fn criterion_1() -> Outcome {
    ensure(psi_integral(0, &[0, 0, 0]) == rat(1, 1), || "<tau_0^3>_0 != 1".into())?;
    ensure(psi_integral(1, &[1]) == rat(1, 24), || "<tau_1>_1 != 1/24".into())?;
    ensure(psi_integral(2, &[4]) == rat(1, 1152), || "<tau_4>_2 != 1/1152".into())?;
    let mut checked = 0;
    for n in 3..=7usize {
        for a in compositions(n as u32 - 3, n) {
            let expected = Rational::new(factorial(n as u32 - 3), a.iter().map(|&x| factorial(x)).product());
            let got = psi_integral(0, &a);
            ensure(got == expected, || format!("genus 0 {a:?}: got {got}, expected {expected}"))?;
            checked += 1;
        }
    }
    Ok(format!("3 fixed values, {checked} genus-0 closed forms"))
}

fn criterion_2() -> Outcome {
    let mut presentations: Vec<Vec<u32>> = vec![vec![]];
    let mut frontier: Vec<Vec<u32>> = vec![vec![]];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for p in &frontier {
            let prod: u32 = p.iter().product();
            let lo = p.last().copied().unwrap_or(2);
            for n in lo..=12 {
                if prod * n <= 12 {
                    let mut q = p.clone();
                    q.push(n);
                    next.push(q);
                }
            }
        }
        presentations.extend(next.iter().cloned());
        frontier = next;
    }
    for orders in &presentations {
        let orb = OrbifoldData::build(orders, &[vec![0; orders.len()]]).map_err(|e| e.to_string())?;
        let n = orb.group_order();
        let f = orb.field();
        let inv_g = orb.inv_order();
        for x in 0..n {
            for y in 0..n {
                let mut first = CycRational::zero(f);
                let mut second = CycRational::zero(f);
                for k in 0..n {
                    first.add_assign_ref(&(&orb.chi(x, orb.inverse(k)) * &orb.chi(y, k)));
                    second.add_assign_ref(&(&orb.chi(k, orb.inverse(x)) * &orb.chi(k, y)));
                }
                let delta = if x == y { CycRational::one(f) } else { CycRational::zero(f) };
                ensure(first.scale(&inv_g) == delta, || format!("G={orders:?}: first relation at ({x},{y})"))?;
                ensure(second.scale(&inv_g) == delta, || format!("G={orders:?}: second relation at ({x},{y})"))?;
            }
        }
    }
    Ok(format!("{} presentations with |G| <= 12", presentations.len()))
}

fn criterion_3() -> Outcome {
    let set = standard_test_set();
    set.par_iter().try_for_each(|orb| {
        let rm = RMatrix::new(Arc::new(orb.clone()), 6);
        rm.check_symplectic()
            .map_err(|(a, b, p)| format!("{}: ({a},{b}) product {p}", describe(orb)))
    })?;
    Ok(format!("{} orbifolds through z^6", set.len()))
}

fn criterion_4() -> Outcome {
    let set = standard_test_set();
    set.par_iter().try_for_each(|orb| {
        let rm = RMatrix::new(Arc::new(orb.clone()), 6);
        for a in 0..orb.group_order() {
            for b in 0..orb.group_order() {
                let num = rm.edge_numerator_canonical(a, b).map_err(|e| e.to_string())?;
                let q = num
                    .divide_by_z_plus_zeta()
                    .map_err(|e| format!("{}: ({a},{b}) {e}", describe(orb)))?;
                let diag = rm.edge_series(a, b).map_err(|e| e.to_string())?;
                ensure(q == diag, || format!("{}: ({a},{b}) quotient disagrees with diagonal form", describe(orb)))?;
            }
        }
        Ok::<_, String>(())
    })?;
    Ok(format!("{} orbifolds through total order 6", set.len()))
}

const ORACLE_TARGETS: [(u32, usize); 6] = [(0, 3), (0, 4), (0, 5), (1, 1), (1, 2), (2, 1)];

fn criterion_5() -> Outcome {
    let set = standard_test_set();
    let bounds = OracleBounds::covering(&ORACLE_TARGETS);
    let keys: usize = set
        .par_iter()
        .map(|orb| {
            let orb = Arc::new(orb.clone());
            let tw = twisted_potential(orb.clone(), bounds).map_err(|e| format!("{}: {e}", describe(&orb)))?;
            let mut keys = 0;
            for &(g, n) in &ORACLE_TARGETS {
                let sum = GraphSum::new(orb.clone(), g, 0, n);
                let graph = sum.symbolic_potential(Normalization::Twisted).map_err(|e| e.to_string())?;
                let oracle = tw.potential.restricted(g, n);
                for key in graph.terms.keys().chain(oracle.terms.keys()) {
                    let (x, y) = (graph.coefficient(key), oracle.coefficient(key));
                    ensure(x == y, || format!("{} ({g},{n}) {key:?}: graph sum {x}, oracle {y}", describe(&orb)))?;
                }
                ensure(!graph.is_empty(), || format!("{} ({g},{n}): empty potential", describe(&orb)))?;
                keys += graph.len();
            }
            Ok::<_, String>(keys)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(format!("{} orbifolds, {keys} potential coefficients", set.len()))
}

fn criterion_6() -> Outcome {
    let orb = Arc::new(OrbifoldData::build(&[], &[vec![]]).map_err(|e| e.to_string())?);
    let w = |x: Rational, p: i64| {
        PuiseuxPoly::term(
            PuiseuxMonomial::var(1, 0, Exponent::from_integer(p)),
            CycRational::from_rational(orb.field(), x),
        )
    };
    for (a, expected) in [(0u32, w(rat(-1, 24), -1)), (1, w(rat(1, 24), 0))] {
        let req = CorrelatorRequest::new(orb.clone(), 1, Normalization::Equivariant).with_ordered(
            InsertionSeries::class(&orb, a, &ClassTag::UnitBar(0), Normalization::Equivariant),
        );
        let got = correlator(&req).map_err(|e| e.to_string())?;
        ensure(got == expected, || format!("tau_{a}: graph sum {got}, expected {expected}"))?;
        let oracle = oracle_correlator(&req).map_err(|e| e.to_string())?;
        ensure(oracle == expected, || format!("tau_{a}: oracle {oracle}, expected {expected}"))?;
    }
    Ok("<tau_0(1bar)>_1 = -1/(24w), <tau_1(1bar)>_1 = 1/24".into())
}

/// A series with distinct coefficients on every `(gamma, a)` with `a <= max_a`.
fn generic_series(orb: &OrbifoldData, max_a: u32, salt: i64) -> InsertionSeries {
    let mut u = InsertionSeries::default();
    for gamma in 0..orb.group_order() {
        for a in 0..=max_a {
            let x = rat(gamma as i64 + 2 * a as i64 + salt, 3 + gamma as i64 + salt * a as i64);
            u.add_term(gamma, a, PuiseuxPoly::rational(orb.field(), orb.rank(), x));
        }
    }
    u
}

fn criterion_7() -> Outcome {
    let cells: [(u32, usize); 7] = [(0, 3), (0, 4), (0, 5), (1, 1), (1, 2), (1, 3), (2, 1)];
    let set = standard_test_set();
    let graphs: usize = set
        .par_iter()
        .map(|orb| {
            let orb = Arc::new(orb.clone());
            let mut count = 0;
            for &(g, n) in &cells {
                let dim = 3 * g + n as u32 - 3;
                let series: Vec<InsertionSeries> = (0..n).map(|j| generic_series(&orb, dim, j as i64 + 1)).collect();
                let shared = generic_series(&orb, dim, 7);
                let factor = orb.e_one().pow(Exponent::from_integer(g as i64 - 1));
                for (n_ordered, n_unordered) in [(n, 0), (0, n)] {
                    let sum = GraphSum::new(orb.clone(), g, n_ordered, n_unordered);
                    let ordered = &series[..n_ordered];
                    for (graph, _) in sum.graphs() {
                        let euler: i64 = (0..graph.vertices.len())
                            .map(|v| 2 * graph.vertices[v].genus as i64 - 2 + graph.valence(v) as i64)
                            .sum();
                        ensure(euler == 2 * (g as i64 - 1) + graph.leaf_count() as i64, || {
                            format!("{}: Euler count fails on {graph:?}", describe(&orb))
                        })?;
                        let rm = sum.rmatrix();
                        let tw = graph_weight(rm, graph, ordered, &shared, Normalization::Twisted)
                            .map_err(|e| e.to_string())?;
                        let eq = graph_weight(rm, graph, ordered, &shared, Normalization::Equivariant)
                            .map_err(|e| e.to_string())?;
                        ensure(eq == tw.mul_monomial(&factor), || {
                            format!("{} ({g},{n}): w = {eq}, e1^(g-1) w~ = {} on {graph:?}", describe(&orb), tw.mul_monomial(&factor))
                        })?;
                        count += 1;
                    }
                }
            }
            Ok::<_, String>(count)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(format!("{graphs} graphs over {} orbifolds", set.len()))
}

fn criterion_8() -> Outcome {
    let cases: Vec<(Vec<u32>, Vec<Vec<u32>>)> = vec![
        (vec![3], vec![vec![1], vec![1], vec![1]]),
        (vec![3], vec![vec![1], vec![2]]),
        (vec![4], vec![vec![1]]),
        (vec![4], vec![vec![1], vec![3]]),
        (vec![4], vec![vec![1], vec![1], vec![2]]),
    ];
    let cells: [(u32, usize); 5] = [(0, 3), (0, 4), (1, 1), (1, 2), (2, 1)];
    let mut total = 0;
    let mut nonzero = 0;
    for (orders, action) in &cases {
        let orb = Arc::new(OrbifoldData::build(orders, action).map_err(|e| e.to_string())?);
        let n_el = orb.group_order();
        for &(g, n) in &cells {
            let sum = GraphSum::new(orb.clone(), g, n, 0);
            let dim = 3 * g + n as u32 - 3;
            let mut jobs = Vec::new();
            for hs in (0..n).map(|_| 0..n_el).fold(vec![vec![]], |acc: Vec<Vec<usize>>, r| {
                acc.into_iter()
                    .flat_map(|p| r.clone().map(move |h| [p.clone(), vec![h]].concat()))
                    .collect()
            }) {
                if hs.windows(2).any(|w| w[0] > w[1]) {
                    continue;
                }
                for s in 0..=dim {
                    for a in compositions(s, n) {
                        jobs.push((hs.clone(), a));
                    }
                }
            }
            let results: Vec<Result<bool, String>> = jobs
                .par_iter()
                .map(|(hs, a)| {
                    let ins: Vec<InsertionSeries> = hs
                        .iter()
                        .zip(a)
                        .map(|(&h, &aj)| InsertionSeries::class(&orb, aj, &ClassTag::UnitBar(h), Normalization::Equivariant))
                        .collect();
                    let v = sum
                        .evaluate(&ins, &InsertionSeries::default(), Normalization::Equivariant)
                        .map_err(|e| e.to_string())?;
                    ensure(v.is_rational(), || format!("{} g={g} h={hs:?} a={a:?}: {v}", describe(&orb)))?;
                    Ok(!v.is_zero())
                })
                .collect();
            for r in results {
                nonzero += r? as usize;
                total += 1;
            }
        }
    }
    ensure(nonzero > 0, || "every tested correlator vanished".into())?;
    Ok(format!("{total} correlators ({nonzero} nonzero)"))
}

fn criterion_9() -> Outcome {
    let cases: Vec<(Vec<u32>, Vec<Vec<u32>>)> = vec![
        (vec![], vec![vec![], vec![]]),
        (vec![3], vec![vec![1], vec![2]]),
        (vec![2, 2], vec![vec![1, 0], vec![1, 1]]),
    ];
    let cells: [(u32, usize); 6] = [(0, 3), (0, 4), (0, 5), (1, 1), (1, 2), (2, 1)];
    let mut checked = 0;
    for (orders, action) in &cases {
        let orb = Arc::new(OrbifoldData::build(orders, action).map_err(|e| e.to_string())?);
        for &(g, n) in &cells {
            let u = generic_series(&orb, 3 * g + n as u32 - 3, 2);
            for norm in [Normalization::Twisted, Normalization::Equivariant] {
                let mut values = Vec::new();
                for n_ordered in 0..=n {
                    let n_unordered = n - n_ordered;
                    let mut req = CorrelatorRequest::new(orb.clone(), g, norm).with_unordered(u.clone(), n_unordered);
                    for _ in 0..n_ordered {
                        req = req.with_ordered(u.clone());
                    }
                    let v = correlator(&req).map_err(|e| e.to_string())?;
                    // undo the 1/n'! of the unordered part
                    values.push(v.scale_rational(&Rational::from_integer(factorial(n_unordered as u32))));
                }
                let unordered_eq = values[0].scale_rational(&Rational::new(BigInt::one(), factorial(n as u32)));
                ensure(!values[0].is_zero(), || format!("{} ({g},{n}): zero correlator", describe(&orb)))?;
                for (k, v) in values.iter().enumerate() {
                    ensure(*v == values[0], || {
                        format!("{} ({g},{n}) {norm:?}: {k} ordered leaves give {v}, all unordered give {}", describe(&orb), values[0])
                    })?;
                }
                ensure(values[n] == unordered_eq.scale_rational(&Rational::from_integer(factorial(n as u32))), || {
                    "multinomial mismatch".into()
                })?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} (orbifold, genus, points, normalization) cells"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        (1, "psi-integral table", criterion_1, 5),
        (2, "character orthogonality, |G| <= 12", criterion_2, 5),
        (3, "R-matrix symplectic identity", criterion_3, 60),
        (4, "edge-numerator divisibility", criterion_4, 60),
        (5, "graph sum equals quantized-operator oracle", criterion_5, 900),
        (6, "Hodge constants on C", criterion_6, 10),
        (7, "per-graph normalization bridge", criterion_7, 300),
        (8, "rationality in the 1bar_h basis", criterion_8, 60),
        (9, "ordered/unordered consistency", criterion_9, 60),
    ];
    // optional criterion numbers on the command line select a subset
    let only: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    let mut ran = 0;
    for (id, name, run, limit) in criteria {
        if !only.is_empty() && !only.contains(&id) {
            continue;
        }
        ran += 1;
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(run))
            .unwrap_or_else(|p| Err(format!("panicked: {:?}", p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())))));
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > Duration::from_secs(limit) => {
                Err(format!("{detail}; took {:.1}s, limit {limit}s", elapsed.as_secs_f64()))
            }
            other => other,
        };
        match outcome {
            Ok(detail) => println!("criterion {id} PASS  {name}: {detail} ({:.2}s)", elapsed.as_secs_f64()),
            Err(err) => {
                failed += 1;
                println!("criterion {id} FAIL  {name}: {err} ({:.2}s)", elapsed.as_secs_f64());
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", ran - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
