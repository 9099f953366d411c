//! The shift `s_ij` (`x_i -> x_i - 1`, `y_j -> y_j + 1`), the difference
//! operator `phi_ij(f) = f - s_ij(f)`, divisibility by `x_i + y_j`,
//! bisymmetry and supersymmetry tests, and the linear system expressing
//! `phi_ij(f) = (x_i + y_j) g` in binomial coordinates.
//!
//! Variable indices `i` (even block) and `j` (odd block) are zero-based.

use std::collections::BTreeSet;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::idempotents::in_basis;
use crate::torus::{Accumulator, Basis, ExponentVector, TorusElement, TorusSpec, Var};

/// Outcome of a divisibility test by `x_i + y_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DaggerWitness {
    pub holds: bool,
    /// The preimage supported on labels where `a_i + b_j` is a unit; present
    /// iff `holds`. Expressed in the basis of the tested element.
    pub quotient: Option<TorusElement>,
}

fn slots(spec: &TorusSpec, i: usize, j: usize) -> Result<(usize, usize)> {
    Ok((spec.slot(Var::X(i))?, spec.slot(Var::Y(j))?))
}

/// `s_ij(f)`. On binomial monomials this uses
/// `C(x-1, k) = sum_{l<=k} (-1)^(k-l) C(x, l)` and `C(y+1, k) = C(y, k) + C(y, k-1)`;
/// on idempotents it moves `h_u` to `h_{u + e_i - e_j}` (indices mod q).
pub fn shift_substitute(f: &TorusElement, i: usize, j: usize) -> Result<TorusElement> {
    let spec = *f.spec();
    let (sx, sy) = slots(&spec, i, j)?;
    let p = spec.p();
    let q = u64::from(spec.q());
    let (wx, wy) = (spec.stride(sx), spec.stride(sy));
    match f.basis() {
        Basis::Idempotent => {
            let terms = f
                .indexed_terms()
                .iter()
                .map(|(&idx, &c)| {
                    let ux = (idx / wx) % q;
                    let uy = (idx / wy) % q;
                    let nx = (ux + 1) % q;
                    let ny = (uy + q - 1) % q;
                    (idx - ux * wx + nx * wx - uy * wy + ny * wy, c)
                })
                .collect();
            Ok(TorusElement::from_index_map(&spec, Basis::Idempotent, terms))
        }
        Basis::Binomial => {
            let mut acc = Accumulator::new(&spec);
            for (&idx, &c) in f.indexed_terms() {
                let kx = (idx / wx) % q;
                let ky = (idx / wy) % q;
                let base = idx - kx * wx;
                for l in 0..=kx {
                    let cl = if (kx - l) % 2 == 1 { p.neg(c) } else { c };
                    let at = base + l * wx;
                    acc.add(at, cl);
                    if ky > 0 {
                        acc.add(at - wy, cl);
                    }
                }
            }
            Ok(TorusElement::from_index_map(&spec, Basis::Binomial, acc.finish()))
        }
    }
}

/// `phi_ij(f) = f - s_ij(f)`, in the basis of `f`.
pub fn phi(f: &TorusElement, i: usize, j: usize) -> Result<TorusElement> {
    f.sub(&shift_substitute(f, i, j)?)
}

/// True iff `p` divides `a_i + b_j` for the label with this index.
pub(crate) fn is_bad_label(spec: &TorusSpec, idx: u64, sx: usize, sy: usize) -> bool {
    let q = u64::from(spec.q());
    let ax = (idx / spec.stride(sx)) % q;
    let by = (idx / spec.stride(sy)) % q;
    (ax + by) % spec.p().as_u64() == 0
}

/// Tests whether `g` is a multiple of `x_i + y_j` in Dist(T_r).
pub fn is_multiple_of_linear(g: &TorusElement, i: usize, j: usize) -> Result<DaggerWitness> {
    let spec = *g.spec();
    let (sx, sy) = slots(&spec, i, j)?;
    let h = in_basis(g, Basis::Idempotent)?;
    if h.indexed_terms().keys().any(|&idx| is_bad_label(&spec, idx, sx, sy)) {
        return Ok(DaggerWitness { holds: false, quotient: None });
    }
    let p = spec.p();
    let q = u64::from(spec.q());
    let terms = h
        .indexed_terms()
        .iter()
        .map(|(&idx, &c)| {
            let ev = (idx / spec.stride(sx)) % q + (idx / spec.stride(sy)) % q;
            let inv = p.inv(p.reduce(ev as i64)).expect("good label has unit eigenvalue");
            (idx, p.mul(c, inv))
        })
        .collect();
    let quotient = TorusElement::from_index_map(&spec, Basis::Idempotent, terms);
    Ok(DaggerWitness { holds: true, quotient: Some(in_basis(&quotient, g.basis())?) })
}

/// Applies a permutation of label slots to every key of `f`.
fn permuted(f: &TorusElement, perm: impl Fn(&mut [u32])) -> TorusElement {
    let spec = *f.spec();
    let mut digits = vec![0u32; spec.vars()];
    let terms = f
        .indexed_terms()
        .iter()
        .map(|(&idx, &c)| {
            spec.decode_into(idx, &mut digits);
            perm(&mut digits);
            (spec.encode(&digits), c)
        })
        .collect();
    TorusElement::from_index_map(&spec, f.basis(), terms)
}

/// Invariance under every adjacent transposition within each block.
pub fn is_bisymmetric(f: &TorusElement) -> bool {
    let spec = f.spec();
    let (m, n) = (spec.m(), spec.n());
    let swaps = (0..m.saturating_sub(1)).chain((m..m + n).filter(|&s| s + 1 < m + n));
    swaps.into_iter().all(|s| permuted(f, |d| d.swap(s, s + 1)) == *f)
}

/// The distinct `Sigma_m x Sigma_n`-orbit of a label, sorted.
pub fn orbit(ev: &ExponentVector) -> Vec<ExponentVector> {
    let perms = |v: &[u32]| -> BTreeSet<Vec<u32>> { v.iter().copied().permutations(v.len()).collect() };
    let (pa, pb) = (perms(&ev.a), perms(&ev.b));
    pa.iter()
        .cartesian_product(pb.iter())
        .map(|(a, b)| ExponentVector::new(a.clone(), b.clone()))
        .collect()
}

/// The sum of the idempotents over the orbit of `ev`, each with coefficient 1.
pub fn symmetrize(spec: &TorusSpec, ev: &ExponentVector) -> Result<TorusElement> {
    spec.validate(ev)?;
    TorusElement::from_terms(spec, Basis::Idempotent, orbit(ev).into_iter().map(|e| (e, 1)))
}

/// The divisibility witness for `phi_ij(f)`.
pub fn dagger_witness(f: &TorusElement, i: usize, j: usize) -> Result<DaggerWitness> {
    let h = in_basis(f, Basis::Idempotent)?;
    let w = is_multiple_of_linear(&phi(&h, i, j)?, i, j)?;
    Ok(match w.quotient {
        Some(qt) => DaggerWitness { holds: true, quotient: Some(in_basis(&qt, f.basis())?) },
        None => w,
    })
}

/// Whether `phi_ij(f)` is divisible by `x_i + y_j`.
pub fn satisfies_dagger(f: &TorusElement, i: usize, j: usize) -> Result<bool> {
    let spec = *f.spec();
    let (sx, sy) = slots(&spec, i, j)?;
    let d = phi(&in_basis(f, Basis::Idempotent)?, i, j)?;
    Ok(!d.indexed_terms().keys().any(|&idx| is_bad_label(&spec, idx, sx, sy)))
}

fn require_odd(spec: &TorusSpec) -> Result<()> {
    if spec.n() == 0 {
        Err(Error::NoOddVariables)
    } else {
        Ok(())
    }
}

/// Bisymmetry plus the divisibility condition for the first pair of variables.
pub fn is_supersymmetric(f: &TorusElement) -> Result<bool> {
    require_odd(f.spec())?;
    Ok(is_bisymmetric(f) && satisfies_dagger(f, 0, 0)?)
}

/// Bisymmetry plus the divisibility condition for every pair `(i, j)`.
pub fn is_supersymmetric_all_pairs(f: &TorusElement) -> Result<bool> {
    let spec = f.spec();
    require_odd(spec)?;
    if !is_bisymmetric(f) {
        return Ok(false);
    }
    for i in 0..spec.m() {
        for j in 0..spec.n() {
            if !satisfies_dagger(f, i, j)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Checks, label by label in binomial coordinates, that `a` and `b` satisfy
///
/// `-sum_{pi != lambda} (-1)^(pi_i - lambda_i) a_pi
///     = (lambda_i + lambda_j) b_lambda + lambda_i b_{lambda - e_i} + lambda_j b_{lambda - e_j}`
///
/// where `pi` agrees with `lambda` off slots `i, j`, `pi_i >= lambda_i` and
/// `pi_j` is `lambda_j` or `lambda_j + 1`. Equivalent to `phi_ij(a) = (x_i + y_j) b`.
pub fn star_system_check(a: &TorusElement, b: &TorusElement, i: usize, j: usize) -> Result<bool> {
    if a.spec() != b.spec() {
        return Err(Error::SpecMismatch);
    }
    let spec = *a.spec();
    let (sx, sy) = slots(&spec, i, j)?;
    let a = in_basis(a, Basis::Binomial)?.to_dense();
    let b = in_basis(b, Basis::Binomial)?.to_dense();
    let p = spec.p();
    let q = u64::from(spec.q());
    let (wx, wy) = (spec.stride(sx), spec.stride(sy));
    for lam in 0..spec.dim() {
        let li = (lam / wx) % q;
        let lj = (lam / wy) % q;
        let mut lhs = 0u32;
        for pi_i in li..q {
            let sign_odd = (pi_i - li) % 2 == 1;
            for dj in 0..2u64 {
                if (pi_i == li && dj == 0) || lj + dj >= q {
                    continue;
                }
                let pi = lam + (pi_i - li) * wx + dj * wy;
                let c = a[pi as usize];
                lhs = if sign_odd { p.add(lhs, c) } else { p.sub(lhs, c) };
            }
        }
        let mut rhs = p.mul(p.reduce((li + lj) as i64), b[lam as usize]);
        if li > 0 {
            rhs = p.add(rhs, p.mul(p.reduce(li as i64), b[(lam - wx) as usize]));
        }
        if lj > 0 {
            rhs = p.add(rhs, p.mul(p.reduce(lj as i64), b[(lam - wy) as usize]));
        }
        if lhs != rhs {
            return Ok(false);
        }
    }
    Ok(true)
}
