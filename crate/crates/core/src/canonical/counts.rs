//! Closed-form counts of canonical labels, in exact integers.

use itertools::Itertools;
use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::modp::{binomial, Prime};
use crate::torus::TorusSpec;

/// Positive compositions of `n` into `l` parts, lexicographically ordered.
pub fn compositions(n: usize, l: usize) -> Vec<Vec<usize>> {
    if l == 0 {
        return if n == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    if n < l {
        return Vec::new();
    }
    (1..n)
        .combinations(l - 1)
        .map(|cuts| {
            let mut parts = Vec::with_capacity(l);
            let mut prev = 0;
            for c in cuts.into_iter().chain(std::iter::once(n)) {
                parts.push(c - prev);
                prev = c;
            }
            parts
        })
        .collect()
}

fn c(n: u64, k: u64) -> BigUint {
    binomial(n, k)
}

/// Number of defect-0 canonical labels: sorted pairs of tuples with entries
/// in `[0, q)` and no `a_i + b_j` divisible by `p`.
pub fn count_c(m: usize, n: usize, q: u64, p: Prime) -> BigUint {
    let (mu, nu) = (m as u64, n as u64);
    match (m, n) {
        (0, 0) => BigUint::one(),
        (_, 0) => c(q + mu - 1, mu),
        (0, _) => c(q + nu - 1, nu),
        _ => {
            let pp = p.as_u64();
            let block = q / pp;
            let mut total = BigUint::zero();
            for l in 1..=(pp - 1).min(nu) {
                let inner: BigUint = compositions(n, l as usize)
                    .iter()
                    .map(|parts| parts.iter().map(|&nj| c(block + nj as u64 - 1, nj as u64)).product::<BigUint>())
                    .sum();
                total += c(pp, l) * c(q - block * l + mu - 1, mu) * inner;
            }
            total
        }
    }
}

/// Number of sorted pairs of tuples with entries in `(0, p)` and no
/// `a_i + b_j` divisible by `p`.
pub fn count_c_prime(m: usize, n: usize, p: Prime) -> BigUint {
    let (mu, nu, pp) = (m as u64, n as u64, p.as_u64());
    match (m, n) {
        (0, 0) => BigUint::one(),
        (_, 0) => c(mu + pp - 2, mu),
        (0, _) => c(nu + pp - 2, nu),
        _ => {
            let top = nu.min(pp.saturating_sub(2));
            (1..=top)
                .map(|l| c(pp - 1, l) * c(nu - 1, nu - l) * c(mu + pp - l - 2, mu))
                .sum()
        }
    }
}

/// Number of canonical labels of defect `d >= 1`.
pub fn count_defect(m: usize, n: usize, d: usize, q: u64, p: Prime) -> Result<BigUint> {
    if d == 0 {
        return Err(Error::InvalidSpec("defect must be at least 1; use count_c for defect 0".into()));
    }
    if d > m.min(n) {
        return Ok(BigUint::zero());
    }
    let first: BigUint = (d..=m).map(|e| count_c_prime(m - e, n - d, p)).sum();
    let second: BigUint = (d + 1..=n).map(|f| count_c_prime(m - d, n - f, p)).sum();
    Ok(BigUint::from(q / p.as_u64()) * (first + second))
}

/// Counts of canonical labels indexed by defect `0..=min(m, n)`.
pub fn count_by_defect(spec: &TorusSpec) -> Vec<BigUint> {
    by_defect(spec.m(), spec.n(), u64::from(spec.q()), spec.p())
}

/// [`count_by_defect`] from raw parameters, with no dimension cap.
pub fn by_defect(m: usize, n: usize, q: u64, p: Prime) -> Vec<BigUint> {
    std::iter::once(count_c(m, n, q, p))
        .chain((1..=m.min(n)).map(|d| count_defect(m, n, d, q, p).expect("d >= 1")))
        .collect()
}

/// `q C(q - q/p + k - 1, k) + (q/p) C(p + k - 2, k - 1)`, the count when one
/// block has a single entry and the other has `k`.
fn single_odd(k: usize, q: u64, p: Prime) -> BigUint {
    let (k, pp) = (k as u64, p.as_u64());
    BigUint::from(q) * c(q - q / pp + k - 1, k) + BigUint::from(q / pp) * c(pp + k - 2, k - 1)
}

/// The closed form for the number of canonical labels.
pub fn count_canonical_total(spec: &TorusSpec) -> BigUint {
    canonical_total(spec.m(), spec.n(), u64::from(spec.q()), spec.p())
}

/// [`count_canonical_total`] from raw parameters, with no dimension cap.
pub fn canonical_total(m: usize, n: usize, q: u64, p: Prime) -> BigUint {
    if n == 0 {
        return count_c(m, 0, q, p);
    }
    if n == 1 {
        return single_odd(m, q, p);
    }
    if m == 1 {
        return single_odd(n, q, p);
    }
    let pp = p.as_u64();
    let block = BigUint::from(q / pp);
    let (mu, nu) = (m as u64, n as u64);
    let edges = c(pp + mu - 2, mu - 1) + c(pp + nu - 2, nu - 1) - BigUint::one();
    let mut interior = BigUint::zero();
    for e in 1..mu {
        for f in 1..nu {
            for l in 1..=f.min(pp.saturating_sub(2)) {
                interior += c(pp - 1, l) * c(f - 1, f - l) * c(e + pp - l - 2, e);
            }
        }
    }
    count_c(m, n, q, p) + block * (edges + interior)
}

/// The total from the two lemmas directly: defect-0 count plus the
/// `(e, f)` double sum.
pub fn count_canonical_by_lemmas(spec: &TorusSpec) -> BigUint {
    let (m, n, q, p) = (spec.m(), spec.n(), u64::from(spec.q()), spec.p());
    let mut linked = BigUint::zero();
    for e in 1..=m {
        for f in 1..=n {
            linked += count_c_prime(m - e, n - f, p);
        }
    }
    count_c(m, n, q, p) + BigUint::from(q / p.as_u64()) * linked
}

/// Number of labels `(a_1..a_m | b)` over `[0, p)` with some `a_i + b`
/// divisible by `p`: `sum_{i<m} (-1)^(i+m-1) C(m, i) p^(i+1)`.
pub fn count_ordinary_points_m1(m: usize, p: Prime) -> BigUint {
    let mut total = BigInt::zero();
    for i in 0..m {
        let term = BigInt::from(c(m as u64, i as u64)) * BigInt::from(p.as_u64()).pow(i as u32 + 1);
        if (i + m - 1) % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total.to_biguint().expect("count is nonnegative")
}
