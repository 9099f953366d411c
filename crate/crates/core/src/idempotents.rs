//! Primitive orthogonal idempotents of Dist(T_r) and the change of basis
//! between binomial and idempotent coordinates.
//!
//! Idempotent coordinates of `f` are the values of `f` at the integer points
//! `(a | b)` reduced mod p. By Lucas' theorem the evaluation matrix
//! `C(a, k) mod p` factors over base-p digits, so both directions are applied
//! as a sequence of `p x p` transforms, one per digit of every variable.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::modp::{LucasTable, Prime};
use crate::torus::{Basis, ExponentVector, TorusElement, TorusSpec, Var};

const PARALLEL_THRESHOLD: usize = 1 << 12;

/// `X_{var,a} = sum_{k=a}^{q-1} (-1)^{k-a} C(k, a) C(var, k)` in the binomial basis.
pub fn idempotent_univariate(spec: &TorusSpec, var: Var, a: u32) -> Result<TorusElement> {
    let slot = spec.slot(var)?;
    if a >= spec.q() {
        return Err(Error::InvalidLabel(format!("{a} is not below q = {}", spec.q())));
    }
    let p = spec.p();
    let lucas = LucasTable::new(p);
    let stride = spec.stride(slot);
    let terms = (a..spec.q())
        .map(|k| {
            let c = lucas.binom(u64::from(k), u64::from(a));
            let c = if (k - a) % 2 == 1 { p.neg(c) } else { c };
            (u64::from(k) * stride, c)
        })
        .collect();
    Ok(TorusElement::from_index_map(spec, Basis::Binomial, terms))
}

/// `h_{a|b}`, the product of the univariate idempotents of every variable,
/// in the binomial basis.
pub fn idempotent_h(spec: &TorusSpec, ev: &ExponentVector) -> Result<TorusElement> {
    let idx = spec.index_of(ev)?;
    let mut dense = vec![0u32; spec.dim() as usize];
    dense[idx as usize] = 1 % spec.p().get();
    transform(spec, &mut dense, Direction::ToBinomial);
    Ok(TorusElement::from_dense(spec, Basis::Binomial, &dense))
}

/// Rewrites a binomial-basis element in idempotent coordinates.
pub fn to_idempotent_basis(f: &TorusElement) -> Result<TorusElement> {
    f.require_basis(Basis::Binomial)?;
    let mut dense = f.to_dense();
    transform(f.spec(), &mut dense, Direction::ToIdempotent);
    Ok(TorusElement::from_dense(f.spec(), Basis::Idempotent, &dense))
}

/// Rewrites an idempotent-basis element in binomial coordinates.
pub fn from_idempotent_basis(f: &TorusElement) -> Result<TorusElement> {
    f.require_basis(Basis::Idempotent)?;
    let mut dense = f.to_dense();
    transform(f.spec(), &mut dense, Direction::ToBinomial);
    Ok(TorusElement::from_dense(f.spec(), Basis::Binomial, &dense))
}

/// Converts to the requested basis, cloning when already there.
pub fn in_basis(f: &TorusElement, basis: Basis) -> Result<TorusElement> {
    match (f.basis(), basis) {
        (a, b) if a == b => Ok(f.clone()),
        (Basis::Binomial, Basis::Idempotent) => to_idempotent_basis(f),
        _ => from_idempotent_basis(f),
    }
}

/// Product of two idempotent-basis elements: the coordinatewise product.
pub fn multiply_idempotent_basis(f: &TorusElement, g: &TorusElement) -> Result<TorusElement> {
    if f.spec() != g.spec() {
        return Err(Error::SpecMismatch);
    }
    f.require_basis(Basis::Idempotent)?;
    g.require_basis(Basis::Idempotent)?;
    let p = f.spec().p();
    let (small, large) = if f.len() <= g.len() { (f, g) } else { (g, f) };
    let terms = small
        .indexed_terms()
        .iter()
        .filter_map(|(i, &c)| large.indexed_terms().get(i).map(|&d| (*i, p.mul(c, d))))
        .collect();
    Ok(TorusElement::from_index_map(f.spec(), Basis::Idempotent, terms))
}

#[derive(Clone, Copy)]
enum Direction {
    ToIdempotent,
    ToBinomial,
}

/// The `p x p` digit matrix, row-major: `C(a, k)` for evaluation and
/// `(-1)^(a-k) C(a, k)` for its inverse.
fn digit_matrix(p: Prime, dir: Direction) -> Vec<u32> {
    let lucas = LucasTable::new(p);
    let pu = p.get() as usize;
    let mut mat = vec![0u32; pu * pu];
    for a in 0..pu {
        for k in 0..=a {
            let c = lucas.binom(a as u64, k as u64);
            mat[a * pu + k] = match dir {
                Direction::ToBinomial if (a - k) % 2 == 1 => p.neg(c),
                _ => c,
            };
        }
    }
    mat
}

fn transform(spec: &TorusSpec, v: &mut [u32], dir: Direction) {
    let p = spec.p();
    let pu = p.get() as usize;
    let mat = digit_matrix(p, dir);
    for slot in 0..spec.vars() {
        let mut stride = spec.stride(slot) as usize;
        for _ in 0..spec.r() {
            let block = stride * pu;
            let apply = |chunk: &mut [u32]| {
                let mut buf = vec![0u32; pu];
                for off in 0..stride {
                    for (d, slot) in buf.iter_mut().enumerate() {
                        *slot = chunk[off + d * stride];
                    }
                    for a in 0..pu {
                        let row = &mat[a * pu..a * pu + a + 1];
                        let acc = row
                            .iter()
                            .zip(&buf)
                            .fold(0u64, |acc, (&m, &x)| acc + u64::from(m) * u64::from(x));
                        chunk[off + a * stride] = (acc % p.as_u64()) as u32;
                    }
                }
            };
            if v.len() >= PARALLEL_THRESHOLD {
                v.par_chunks_mut(block).for_each(apply);
            } else {
                v.chunks_mut(block).for_each(apply);
            }
            stride = block;
        }
    }
}
