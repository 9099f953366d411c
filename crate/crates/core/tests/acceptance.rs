//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use dist_torus::canonical::counts::{count_canonical_total, count_ordinary_points_m1};
use dist_torus::canonical::{enumerate_classes, is_ordinary, is_partition};
use dist_torus::cli::DEFAULT_GRID;
use dist_torus::idempotents::{from_idempotent_basis, idempotent_h, in_basis};
use dist_torus::linalg::{rank, span_equal};
use dist_torus::modp::{alternating_power_sum, binomial};
use dist_torus::ss_basis::{class_sizes, class_sum_basis, gl11_generators, ordinary_sum, ss_nullspace_oracle, OracleMode};
use dist_torus::supersymmetry::{dagger_witness, is_supersymmetric, phi, star_system_check};
use dist_torus::{Basis, ExponentVector, FpScalar, Prime, TorusElement, TorusSpec};

type Verdict = std::result::Result<String, String>;

fn grid() -> Vec<TorusSpec> {
    DEFAULT_GRID.iter().map(|&(m, n, p, r)| TorusSpec::new(m, n, p, r).unwrap()).collect()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_label(spec: &TorusSpec, rng: &mut ChaCha8Rng) -> ExponentVector {
    spec.label(rng.gen_range(0..spec.dim()))
}

fn random_element(spec: &TorusSpec, rng: &mut ChaCha8Rng) -> TorusElement {
    let p = i64::from(spec.p().get());
    let len = rng.gen_range(1..=spec.dim().min(12));
    let terms: BTreeMap<ExponentVector, i64> =
        (0..len).map(|_| (random_label(spec, rng), rng.gen_range(1..p))).collect();
    TorusElement::from_terms(spec, Basis::Binomial, terms).unwrap()
}

/// Evaluates a binomial-basis element at an integer point, modulo p.
fn evaluate(f: &TorusElement, point: &[u32]) -> u32 {
    let p = f.spec().p();
    let mut acc = BigInt::zero();
    for (ev, c) in f.terms() {
        let mut term = BigInt::from(c.value());
        for (&k, &t) in ev.flat().iter().zip(point) {
            term *= BigInt::from(binomial(u64::from(t), u64::from(k)));
        }
        acc += term;
    }
    let m = BigInt::from(p.get());
    u32::try_from(((acc % &m) + &m) % &m).unwrap()
}

fn idempotents_complete_and_orthogonal() -> Verdict {
    let mut pairs = 0usize;
    for spec in grid() {
        let hs: Vec<TorusElement> = spec.labels().map(|ev| idempotent_h(&spec, &ev).unwrap()).collect();
        let labels: Vec<Vec<u32>> = spec.labels().map(|ev| ev.flat()).collect();
        let sum = hs.iter().try_fold(TorusElement::zero(&spec), |acc, h| acc.add(h)).unwrap();
        ensure(sum == TorusElement::one(&spec), || format!("{spec}: idempotents do not sum to 1"))?;
        for (u, h) in hs.iter().enumerate() {
            for (t, point) in labels.iter().enumerate() {
                let want = u32::from(u == t);
                ensure(evaluate(h, point) == want, || format!("{spec}: h_{} at {point:?}", spec.label(u as u64)))?;
            }
        }
        let bad = (0..hs.len())
            .into_par_iter()
            .flat_map_iter(|u| (0..hs.len()).map(move |v| (u, v)))
            .find_any(|&(u, v)| {
                let prod = hs[u].multiply(&hs[v]).unwrap();
                if u == v { prod != hs[u] } else { !prod.is_zero() }
            });
        if let Some((u, v)) = bad {
            return Err(format!("{spec}: h_{} h_{} is not as expected", spec.label(u as u64), spec.label(v as u64)));
        }
        pairs += hs.len() * hs.len();
    }
    Ok(format!("{pairs} products checked"))
}

/// `C(x, a) C(x, b) = sum_k d_k C(x, k)` over the integers, by forward differences.
fn integer_univariate_product(a: u32, b: u32) -> Vec<BigInt> {
    (0..=a + b)
        .map(|k| {
            (0..=k).fold(BigInt::zero(), |acc, t| {
                let v = BigInt::from(binomial(u64::from(k), u64::from(t)))
                    * BigInt::from(binomial(u64::from(t), u64::from(a)))
                    * BigInt::from(binomial(u64::from(t), u64::from(b)));
                if (k - t) % 2 == 1 { acc - v } else { acc + v }
            })
        })
        .collect()
}

fn truncation_is_sound() -> Verdict {
    let mut dropped = 0usize;
    for (s, spec) in grid().into_iter().enumerate() {
        let mut rng = rng(0x2000 + s as u64);
        let p = BigInt::from(spec.p().get());
        let q = spec.q();
        for _ in 0..1000 {
            let u = random_label(&spec, &mut rng);
            let v = random_label(&spec, &mut rng);
            let got = TorusElement::monomial(&spec, &u).unwrap().multiply(&TorusElement::monomial(&spec, &v).unwrap()).unwrap();
            let factors: Vec<Vec<BigInt>> =
                u.flat().iter().zip(v.flat()).map(|(&a, b)| integer_univariate_product(a, b)).collect();
            let mut kept: BTreeMap<Vec<u32>, BigInt> = BTreeMap::new();
            let mut stack: Vec<(Vec<u32>, BigInt)> = vec![(Vec::new(), BigInt::one())];
            for f in &factors {
                stack = stack
                    .into_iter()
                    .flat_map(|(exps, c)| {
                        f.iter().enumerate().filter(|(_, d)| !d.is_zero()).map(move |(k, d)| {
                            let mut e = exps.clone();
                            e.push(k as u32);
                            (e, &c * d)
                        })
                    })
                    .collect();
            }
            for (exps, c) in stack {
                if exps.iter().any(|&k| k >= q) {
                    dropped += 1;
                    ensure((&c % &p).is_zero(), || format!("{spec}: {u}*{v} drops {c} at {exps:?}"))?;
                } else {
                    kept.insert(exps, c);
                }
            }
            let want = TorusElement::from_terms(
                &spec,
                Basis::Binomial,
                kept.into_iter().map(|(e, c)| {
                    let r = ((c % &p) + &p) % &p;
                    (ExponentVector::from_flat(&e, spec.m()), i64::try_from(r).unwrap())
                }),
            )
            .unwrap();
            ensure(got == want, || format!("{spec}: {u}*{v} differs from the integer product"))?;
        }
    }
    Ok(format!("9000 products, {dropped} dropped terms all divisible by p"))
}

fn alternating_sums() -> Verdict {
    for a in 1..=12u32 {
        let fact: BigInt = (1..=a).map(BigInt::from).product();
        for b in 0..=a {
            let want = if b < a { BigInt::zero() } else if a % 2 == 1 { -fact.clone() } else { fact.clone() };
            let got = alternating_power_sum(a, b);
            ensure(got == want, || format!("a={a} b={b}: {got} vs {want}"))?;
            ensure(b < a || got.abs() == fact, || format!("a={a}: magnitude"))?;
        }
    }
    Ok("78 identities".into())
}

fn quasiderivation_law() -> Verdict {
    for (s, spec) in grid().into_iter().enumerate() {
        let mut rng = rng(0x4000 + s as u64);
        let pairs: Vec<(TorusElement, TorusElement, usize, usize)> = (0..500)
            .map(|_| {
                let f = random_element(&spec, &mut rng);
                let g = random_element(&spec, &mut rng);
                (f, g, rng.gen_range(0..spec.m()), rng.gen_range(0..spec.n()))
            })
            .collect();
        let bad = pairs.par_iter().find_any(|(f, g, i, j)| {
            let (df, dg) = (phi(f, *i, *j).unwrap(), phi(g, *i, *j).unwrap());
            let lhs = phi(&f.multiply(g).unwrap(), *i, *j).unwrap();
            let rhs = df
                .multiply(g)
                .unwrap()
                .add(&f.multiply(&dg).unwrap())
                .unwrap()
                .sub(&df.multiply(&dg).unwrap())
                .unwrap();
            lhs != rhs
        });
        ensure(bad.is_none(), || format!("{spec}: law fails"))?;
    }
    Ok("4500 pairs".into())
}

fn dimension_theorem() -> Verdict {
    let expected: [((usize, usize, u64, u32), u64); 6] = [
        ((1, 1, 2, 1), 3),
        ((1, 1, 2, 2), 10),
        ((1, 1, 3, 1), 7),
        ((2, 1, 3, 1), 12),
        ((3, 1, 2, 1), 5),
        ((2, 1, 2, 2), 16),
    ];
    let mut specs = grid();
    specs.push(TorusSpec::new(2, 1, 2, 2).unwrap());
    let mut dims = Vec::new();
    for spec in &specs {
        let p = spec.p();
        let oracle = ss_nullspace_oracle(spec, OracleMode::FirstPair).unwrap();
        let basis = class_sum_basis(spec).unwrap();
        let closed = count_canonical_total(spec);
        let (o, h) = (oracle.len() as u64, basis.len() as u64);
        ensure(closed == BigUint::from(o) && o == h, || format!("{spec}: oracle {o}, class sums {h}, closed form {closed}"))?;
        let orow: Vec<Vec<u32>> = oracle.iter().map(TorusElement::to_dense).collect();
        let hrow: Vec<Vec<u32>> = basis.iter().map(TorusElement::to_dense).collect();
        ensure(span_equal(&orow, &hrow, p) && rank(&hrow, p) == basis.len(), || format!("{spec}: spans differ"))?;
        let key = (spec.m(), spec.n(), u64::from(p.get()), spec.r());
        if let Some(&(_, want)) = expected.iter().find(|(k, _)| *k == key) {
            ensure(o == want, || format!("{spec}: dimension {o}, expected {want}"))?;
        }
        dims.push(o.to_string());
    }
    Ok(format!("dimensions {}", dims.join(",")))
}

fn gl11_generators_span() -> Verdict {
    for (p, r) in [(2, 1), (2, 2), (3, 1)] {
        let spec = TorusSpec::new(1, 1, p, r).unwrap();
        let gens: Vec<Vec<u32>> = gl11_generators(&spec).unwrap().iter().map(TorusElement::to_dense).collect();
        let oracle: Vec<Vec<u32>> =
            ss_nullspace_oracle(&spec, OracleMode::AllPairs).unwrap().iter().map(TorusElement::to_dense).collect();
        ensure(span_equal(&gens, &oracle, spec.p()), || format!("{spec}: generator span differs"))?;
    }
    Ok("p,r in (2,1),(2,2),(3,1)".into())
}

fn class_size_claims() -> Verdict {
    let mut seen = Vec::new();
    for p in [2u64, 3, 5] {
        let s21 = TorusSpec::new(2, 1, p, 1).unwrap();
        for a in 0..s21.q() {
            let len = ordinary_sum(&s21, a).unwrap().len() as u64;
            ensure(len == 2 * p - 1, || format!("GL(2|1) p={p}: {len} ordinary summands at total {a}"))?;
        }
        let s31 = TorusSpec::new(3, 1, p, 1).unwrap();
        let mut linked = 0;
        for (c, size) in class_sizes(&s31).unwrap() {
            if c.defect != 1 {
                continue;
            }
            linked += 1;
            let a = &c.ev.a;
            let want = if a[1] == a[2] { 3 * p - 2 } else { 6 * p - 6 };
            ensure(a[0] == 0 && a[1] <= a[2] && size as u64 == want, || {
                format!("GL(3|1) p={p}: class {} has {size} members, expected {want}", c.ev)
            })?;
        }
        ensure(linked == p * (p + 1) / 2, || format!("GL(3|1) p={p}: {linked} linked classes"))?;
        seen.push(p.to_string());
    }
    Ok(format!("p in {}", seen.join(",")))
}

fn ordinary_point_count() -> Verdict {
    for m in 1..=3usize {
        for p in [2u64, 3, 5] {
            let spec = TorusSpec::new(m, 1, p, 1).unwrap();
            let scanned = spec.labels().filter(|ev| is_ordinary(ev, &spec)).count();
            let closed = count_ordinary_points_m1(m, Prime::new(p).unwrap());
            ensure(closed == BigUint::from(scanned), || format!("m={m} p={p}: {closed} vs {scanned}"))?;
        }
    }
    Ok("m<=3, p in 2,3,5".into())
}

fn classes_partition_labels() -> Verdict {
    for spec in grid() {
        let classes = enumerate_classes(&spec).unwrap();
        let total: usize = classes.iter().map(|c| c.members.len()).sum();
        ensure(is_partition(&classes, &spec) && total as u64 == spec.dim(), || format!("{spec}: not a partition"))?;
    }
    Ok("9 specs".into())
}

/// Whether changing one binomial coefficient of `a` (or of `b`) at `idx` can
/// change some row of the linear system for the pair `(0, 0)`.
fn detectable(spec: &TorusSpec, idx: usize, in_quotient: bool) -> bool {
    let ev = spec.label(idx as u64);
    let (li, lj) = (ev.a[0], ev.b[0]);
    if !in_quotient {
        return li > 0 || lj > 0;
    }
    let (p, q) = (spec.p().get(), spec.q());
    (li + lj) % p != 0 || (li + 1 < q && (li + 1) % p != 0) || (lj + 1 < q && (lj + 1) % p != 0)
}

fn star_system_consistency() -> Verdict {
    let mut rejected = 0usize;
    let mut skipped = 0usize;
    for (s, spec) in grid().into_iter().enumerate() {
        let p = spec.p().get();
        let basis: Vec<TorusElement> = class_sum_basis(&spec).unwrap();
        let mut rng = rng(0xA000 + s as u64);
        for _ in 0..200 {
            let mut f = TorusElement::zero_in(&spec, Basis::Idempotent);
            for h in &basis {
                let c = rng.gen_range(0..p);
                f = f.add(&h.scale(FpScalar::new(i64::from(c), spec.p())).unwrap()).unwrap();
            }
            ensure(is_supersymmetric(&f).unwrap(), || format!("{spec}: combination not supersymmetric"))?;
            let w = dagger_witness(&f, 0, 0).unwrap();
            let a = from_idempotent_basis(&f).unwrap();
            let b = in_basis(&w.quotient.expect("witness"), Basis::Binomial).unwrap();
            ensure(star_system_check(&a, &b, 0, 0).unwrap(), || format!("{spec}: valid pair rejected"))?;
            let (ad, bd) = (a.to_dense(), b.to_dense());
            for (in_quotient, dense) in [(false, &ad), (true, &bd)] {
                for idx in 0..dense.len() {
                    if !detectable(&spec, idx, in_quotient) {
                        skipped += 1;
                        continue;
                    }
                    let mut v = dense.clone();
                    v[idx] = (v[idx] + rng.gen_range(1..p)) % p;
                    let moved = TorusElement::from_dense(&spec, Basis::Binomial, &v);
                    let ok = if in_quotient {
                        star_system_check(&a, &moved, 0, 0)
                    } else {
                        star_system_check(&moved, &b, 0, 0)
                    }
                    .unwrap();
                    ensure(!ok, || format!("{spec}: perturbation at {} accepted", spec.label(idx as u64)))?;
                    rejected += 1;
                }
            }
        }
    }
    Ok(format!("{rejected} perturbations rejected, {skipped} positions outside the system"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Verdict, Duration); 10] = [
        ("idempotent completeness and orthogonality", idempotents_complete_and_orthogonal, Duration::from_secs(5)),
        ("truncated products match integer products", truncation_is_sound, Duration::from_secs(5)),
        ("alternating power sums", alternating_sums, Duration::from_secs(1)),
        ("quasiderivation law", quasiderivation_law, Duration::from_secs(10)),
        ("dimension theorem", dimension_theorem, Duration::from_secs(30)),
        ("GL(1|1) generators span", gl11_generators_span, Duration::MAX),
        ("class sizes", class_size_claims, Duration::MAX),
        ("ordinary point count", ordinary_point_count, Duration::MAX),
        ("classes partition the labels", classes_partition_labels, Duration::MAX),
        ("linear system matches divisibility", star_system_consistency, Duration::MAX),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (k, (name, run, budget)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let verdict = run();
        let elapsed = t.elapsed();
        let verdict = match verdict {
            Ok(detail) if elapsed > *budget => Err(format!("{detail}; took {elapsed:?}, budget {budget:?}")),
            v => v,
        };
        match verdict {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} ({:.2?})", k + 1, elapsed),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail} ({:.2?})", k + 1, elapsed);
            }
        }
    }
    println!("{} of 10 criteria passed in {:.2?}", 10 - failed, start.elapsed());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
