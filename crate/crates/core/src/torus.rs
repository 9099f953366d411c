//! The algebra Dist(T_r) of the r-th Frobenius kernel of the diagonal torus
//! of GL(m|n), stored as sparse F_p-combinations of binomial monomials
//! `prod C(x_i, a_i) prod C(y_j, b_j)` with every exponent below `q = p^r`.
//!
//! Labels are encoded internally as mixed-radix indices whose numeric order
//! is the lexicographic order on `(a_1, .., a_m, b_1, .., b_n)`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modp::{FpScalar, LucasTable, Prime};

pub const DEFAULT_CAP: u64 = 10_000_000;

/// Parameters `(m, n, p, r)` fixing one algebra Dist(T_r).
#[derive(Clone, Copy, Debug)]
pub struct TorusSpec {
    m: usize,
    n: usize,
    p: Prime,
    r: u32,
    q: u32,
    dim: u64,
    cap: u64,
}

impl PartialEq for TorusSpec {
    fn eq(&self, other: &Self) -> bool {
        (self.m, self.n, self.p, self.r) == (other.m, other.n, other.p, other.r)
    }
}

impl Eq for TorusSpec {}

impl Hash for TorusSpec {
    fn hash<H: Hasher>(&self, state: &mut H) {
        (self.m, self.n, self.p, self.r).hash(state);
    }
}

impl TorusSpec {
    pub fn new(m: usize, n: usize, p: u64, r: u32) -> Result<Self> {
        Self::with_cap(m, n, p, r, DEFAULT_CAP)
    }

    pub fn with_cap(m: usize, n: usize, p: u64, r: u32, cap: u64) -> Result<Self> {
        let p = Prime::new(p)?;
        if m == 0 {
            return Err(Error::InvalidSpec("m must be at least 1".into()));
        }
        if r == 0 {
            return Err(Error::InvalidSpec("r must be at least 1".into()));
        }
        let q = p
            .as_u64()
            .checked_pow(r)
            .filter(|&q| q <= u64::from(u32::MAX))
            .ok_or_else(|| Error::InvalidSpec(format!("q = {p}^{r} does not fit in 32 bits")))?;
        let vars = (m + n) as u32;
        let dim = q.checked_pow(vars);
        match dim {
            Some(d) if d <= cap => Ok(TorusSpec { m, n, p, r, q: q as u32, dim: d, cap }),
            _ => Err(Error::CapExceeded { dim: format!("{q}^{vars}"), cap }),
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> Prime {
        self.p
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn cap(&self) -> u64 {
        self.cap
    }

    /// Number of basis labels, `q^(m+n)`.
    pub fn dim(&self) -> u64 {
        self.dim
    }

    /// Total number of variables `m + n`.
    pub fn vars(&self) -> usize {
        self.m + self.n
    }

    /// Position of a variable in the flattened label `(a | b)`.
    pub fn slot(&self, var: Var) -> Result<usize> {
        match var {
            Var::X(i) if i < self.m => Ok(i),
            Var::Y(j) if j < self.n => Ok(self.m + j),
            _ => Err(Error::InvalidVariable(format!("{var} for GL({}|{})", self.m, self.n))),
        }
    }

    pub(crate) fn stride(&self, slot: usize) -> u64 {
        u64::from(self.q).pow((self.vars() - 1 - slot) as u32)
    }

    pub(crate) fn strides(&self) -> Vec<u64> {
        (0..self.vars()).map(|s| self.stride(s)).collect()
    }

    pub(crate) fn encode(&self, digits: &[u32]) -> u64 {
        digits.iter().fold(0u64, |acc, &d| acc * u64::from(self.q) + u64::from(d))
    }

    pub(crate) fn decode_into(&self, mut index: u64, out: &mut [u32]) {
        for slot in (0..self.vars()).rev() {
            out[slot] = (index % u64::from(self.q)) as u32;
            index /= u64::from(self.q);
        }
    }

    pub(crate) fn decode(&self, index: u64) -> Vec<u32> {
        let mut out = vec![0; self.vars()];
        self.decode_into(index, &mut out);
        out
    }

    pub fn validate(&self, ev: &ExponentVector) -> Result<()> {
        if ev.a.len() != self.m || ev.b.len() != self.n {
            return Err(Error::InvalidLabel(format!(
                "{ev} does not have shape ({}|{})",
                self.m, self.n
            )));
        }
        if let Some(bad) = ev.a.iter().chain(&ev.b).find(|&&e| e >= self.q) {
            return Err(Error::InvalidLabel(format!("{ev}: entry {bad} is not below q = {}", self.q)));
        }
        Ok(())
    }

    pub fn index_of(&self, ev: &ExponentVector) -> Result<u64> {
        self.validate(ev)?;
        Ok(self.encode(&ev.flat()))
    }

    pub fn label(&self, index: u64) -> ExponentVector {
        ExponentVector::from_flat(&self.decode(index), self.m)
    }

    /// All labels in lexicographic order.
    pub fn labels(&self) -> impl Iterator<Item = ExponentVector> + '_ {
        (0..self.dim).map(|i| self.label(i))
    }
}

impl fmt::Display for TorusSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GL({}|{}) p={} r={}", self.m, self.n, self.p, self.r)
    }
}

/// A variable of the torus: even `x_i` or odd-block `y_j`, zero-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Var {
    X(usize),
    Y(usize),
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::X(i) => write!(f, "x{}", i + 1),
            Var::Y(j) => write!(f, "y{}", j + 1),
        }
    }
}

/// A label `(a_1..a_m | b_1..b_n)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ExponentVector {
    pub a: Vec<u32>,
    pub b: Vec<u32>,
}

impl ExponentVector {
    pub fn new(a: Vec<u32>, b: Vec<u32>) -> Self {
        ExponentVector { a, b }
    }

    pub fn zeros(m: usize, n: usize) -> Self {
        ExponentVector { a: vec![0; m], b: vec![0; n] }
    }

    pub fn flat(&self) -> Vec<u32> {
        self.a.iter().chain(&self.b).copied().collect()
    }

    pub fn from_flat(flat: &[u32], m: usize) -> Self {
        ExponentVector { a: flat[..m].to_vec(), b: flat[m..].to_vec() }
    }

    pub fn total(&self) -> u64 {
        self.a.iter().chain(&self.b).map(|&e| u64::from(e)).sum()
    }
}

impl fmt::Display for ExponentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[u32]| v.iter().map(u32::to_string).collect::<Vec<_>>().join(",");
        write!(f, "({}|{})", join(&self.a), join(&self.b))
    }
}

impl FromStr for ExponentVector {
    type Err = Error;

    /// Parses `a1,a2|b1,b2`, optionally wrapped in parentheses.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let s = s.strip_prefix('(').and_then(|t| t.strip_suffix(')')).unwrap_or(s);
        let (a, b) = s
            .split_once('|')
            .ok_or_else(|| Error::Parse(format!("expected `a..|b..`, got `{s}`")))?;
        let parse = |part: &str| -> Result<Vec<u32>> {
            let part = part.trim();
            if part.is_empty() {
                return Ok(Vec::new());
            }
            part.split(',')
                .map(|t| t.trim().parse::<u32>().map_err(|e| Error::Parse(format!("`{t}`: {e}"))))
                .collect()
        };
        Ok(ExponentVector { a: parse(a)?, b: parse(b)? })
    }
}

/// Which basis the coefficients of a [`TorusElement`] refer to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    Binomial,
    Idempotent,
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Basis::Binomial => f.write_str("binomial"),
            Basis::Idempotent => f.write_str("idempotent"),
        }
    }
}

/// Accumulates coefficients by label index; dense for small tori.
pub(crate) struct Accumulator {
    p: Prime,
    dense: Option<Vec<u32>>,
    sparse: HashMap<u64, u32>,
}

const DENSE_LIMIT: u64 = 1 << 16;

impl Accumulator {
    pub(crate) fn new(spec: &TorusSpec) -> Self {
        let dense = (spec.dim() <= DENSE_LIMIT).then(|| vec![0u32; spec.dim() as usize]);
        Accumulator { p: spec.p(), dense, sparse: HashMap::new() }
    }

    #[inline]
    pub(crate) fn add(&mut self, index: u64, c: u32) {
        if c == 0 {
            return;
        }
        let p = self.p;
        match &mut self.dense {
            Some(d) => {
                let slot = &mut d[index as usize];
                *slot = p.add(*slot, c);
            }
            None => {
                let slot = self.sparse.entry(index).or_insert(0);
                *slot = p.add(*slot, c);
            }
        }
    }

    pub(crate) fn finish(self) -> BTreeMap<u64, u32> {
        match self.dense {
            Some(d) => d
                .into_iter()
                .enumerate()
                .filter(|&(_, c)| c != 0)
                .map(|(i, c)| (i as u64, c))
                .collect(),
            None => self.sparse.into_iter().filter(|&(_, c)| c != 0).collect(),
        }
    }
}

/// Expands a coefficient over a tensor product of per-slot term lists
/// `(exponent, coefficient)`, calling `sink(index, coefficient)` per product term.
pub(crate) fn for_each_tensor_term(
    lists: &[&[(u32, u32)]],
    strides: &[u64],
    p: Prime,
    c0: u32,
    sink: &mut impl FnMut(u64, u32),
) {
    fn go(
        lists: &[&[(u32, u32)]],
        strides: &[u64],
        p: Prime,
        slot: usize,
        index: u64,
        c: u32,
        sink: &mut impl FnMut(u64, u32),
    ) {
        if slot == lists.len() {
            sink(index, c);
            return;
        }
        for &(e, k) in lists[slot] {
            let ck = p.mul(c, k);
            if ck != 0 {
                go(lists, strides, p, slot + 1, index + u64::from(e) * strides[slot], ck, sink);
            }
        }
    }
    if c0 != 0 {
        go(lists, strides, p, 0, 0, c0, sink);
    }
}

/// A sparse F_p-linear combination of basis labels of one Dist(T_r).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorusElement {
    spec: TorusSpec,
    basis: Basis,
    terms: BTreeMap<u64, u32>,
}

impl TorusElement {
    pub fn zero(spec: &TorusSpec) -> Self {
        Self::zero_in(spec, Basis::Binomial)
    }

    pub fn zero_in(spec: &TorusSpec, basis: Basis) -> Self {
        TorusElement { spec: *spec, basis, terms: BTreeMap::new() }
    }

    /// The empty monomial `prod C(x_i, 0) prod C(y_j, 0)`.
    pub fn one(spec: &TorusSpec) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(0, 1 % spec.p().get());
        TorusElement { spec: *spec, basis: Basis::Binomial, terms }
    }

    /// `c` times the basis vector labelled `ev`.
    pub fn basis_vector(spec: &TorusSpec, basis: Basis, ev: &ExponentVector, c: i64) -> Result<Self> {
        Self::from_terms(spec, basis, [(ev.clone(), c)])
    }

    pub fn monomial(spec: &TorusSpec, ev: &ExponentVector) -> Result<Self> {
        Self::basis_vector(spec, Basis::Binomial, ev, 1)
    }

    /// Builds an element from `(label, integer coefficient)` pairs; repeated
    /// labels are summed.
    pub fn from_terms<I>(spec: &TorusSpec, basis: Basis, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (ExponentVector, i64)>,
    {
        let p = spec.p();
        let mut map = BTreeMap::new();
        for (ev, c) in terms {
            let idx = spec.index_of(&ev)?;
            let slot = map.entry(idx).or_insert(0u32);
            *slot = p.add(*slot, p.reduce(c));
        }
        map.retain(|_, c| *c != 0);
        Ok(TorusElement { spec: *spec, basis, terms: map })
    }

    pub(crate) fn from_index_map(spec: &TorusSpec, basis: Basis, mut terms: BTreeMap<u64, u32>) -> Self {
        terms.retain(|_, c| *c != 0);
        TorusElement { spec: *spec, basis, terms }
    }

    /// Element from a dense coefficient vector indexed by label index.
    pub fn from_dense(spec: &TorusSpec, basis: Basis, coeffs: &[u32]) -> Self {
        debug_assert_eq!(coeffs.len() as u64, spec.dim());
        let p = spec.p().get();
        let terms = coeffs
            .iter()
            .enumerate()
            .filter(|&(_, &c)| c % p != 0)
            .map(|(i, &c)| (i as u64, c % p))
            .collect();
        TorusElement { spec: *spec, basis, terms }
    }

    pub fn to_dense(&self) -> Vec<u32> {
        let mut out = vec![0u32; self.spec.dim() as usize];
        for (&i, &c) in &self.terms {
            out[i as usize] = c;
        }
        out
    }

    pub fn spec(&self) -> &TorusSpec {
        &self.spec
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, ev: &ExponentVector) -> FpScalar {
        let p = self.spec.p();
        match self.spec.index_of(ev) {
            Ok(i) => FpScalar::new(i64::from(self.terms.get(&i).copied().unwrap_or(0)), p),
            Err(_) => FpScalar::zero(p),
        }
    }

    /// Nonzero terms in lexicographic label order.
    pub fn terms(&self) -> impl Iterator<Item = (ExponentVector, FpScalar)> + '_ {
        let p = self.spec.p();
        self.terms
            .iter()
            .map(move |(&i, &c)| (self.spec.label(i), FpScalar::from_residue(c, p)))
    }

    pub(crate) fn indexed_terms(&self) -> &BTreeMap<u64, u32> {
        &self.terms
    }

    fn check_compatible(&self, other: &TorusElement) -> Result<()> {
        if self.spec != other.spec {
            return Err(Error::SpecMismatch);
        }
        if self.basis != other.basis {
            return Err(Error::BasisMismatch { expected: self.basis, found: other.basis });
        }
        Ok(())
    }

    pub(crate) fn require_basis(&self, basis: Basis) -> Result<()> {
        if self.basis != basis {
            return Err(Error::BasisMismatch { expected: basis, found: self.basis });
        }
        Ok(())
    }

    pub fn add(&self, other: &TorusElement) -> Result<TorusElement> {
        self.check_compatible(other)?;
        let p = self.spec.p();
        let mut terms = self.terms.clone();
        for (&i, &c) in &other.terms {
            let slot = terms.entry(i).or_insert(0);
            *slot = p.add(*slot, c);
        }
        Ok(Self::from_index_map(&self.spec, self.basis, terms))
    }

    pub fn sub(&self, other: &TorusElement) -> Result<TorusElement> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> TorusElement {
        let p = self.spec.p();
        let terms = self.terms.iter().map(|(&i, &c)| (i, p.neg(c))).collect();
        TorusElement { spec: self.spec, basis: self.basis, terms }
    }

    pub fn scale(&self, c: FpScalar) -> Result<TorusElement> {
        if c.modulus() != self.spec.p() {
            return Err(Error::SpecMismatch);
        }
        let p = self.spec.p();
        let terms = self.terms.iter().map(|(&i, &v)| (i, p.mul(v, c.value()))).collect();
        Ok(Self::from_index_map(&self.spec, self.basis, terms))
    }

    #[cfg(test)]
    pub(crate) fn scale_residue(&self, c: u32) -> TorusElement {
        let p = self.spec.p();
        let terms = self.terms.iter().map(|(&i, &v)| (i, p.mul(v, c))).collect();
        Self::from_index_map(&self.spec, self.basis, terms)
    }

    /// Product in the binomial basis: the coordinatewise univariate rule,
    /// extended bilinearly.
    pub fn multiply(&self, other: &TorusElement) -> Result<TorusElement> {
        self.check_compatible(other)?;
        self.require_basis(Basis::Binomial)?;
        let spec = self.spec;
        let p = spec.p();
        let lucas = LucasTable::new(p);
        let strides = spec.strides();
        let vars = spec.vars();
        let mut memo: HashMap<(u32, u32), Vec<(u32, u32)>> = HashMap::new();
        let mut acc = Accumulator::new(&spec);
        let mut du = vec![0u32; vars];
        let mut dv = vec![0u32; vars];
        for (&u, &cu) in &self.terms {
            spec.decode_into(u, &mut du);
            for (&v, &cv) in &other.terms {
                spec.decode_into(v, &mut dv);
                for s in 0..vars {
                    memo.entry((du[s], dv[s]))
                        .or_insert_with(|| univariate_product(du[s], dv[s], spec.q(), &lucas));
                }
                let lists: Vec<&[(u32, u32)]> =
                    (0..vars).map(|s| memo[&(du[s], dv[s])].as_slice()).collect();
                for_each_tensor_term(&lists, &strides, p, p.mul(cu, cv), &mut |i, c| acc.add(i, c));
            }
        }
        Ok(Self::from_index_map(&spec, Basis::Binomial, acc.finish()))
    }

    /// `x_i * f` (or `y_j * f`). In the binomial basis this is
    /// `x C(x,k) = (k+1) C(x,k+1) + k C(x,k)`; on an idempotent `h_{a|b}` it
    /// scales by the matching entry of the label.
    pub fn multiply_by_coordinate(&self, var: Var) -> Result<TorusElement> {
        let spec = self.spec;
        let slot = spec.slot(var)?;
        let p = spec.p();
        let stride = spec.stride(slot);
        let q = u64::from(spec.q());
        if self.basis == Basis::Idempotent {
            let terms = self
                .terms
                .iter()
                .map(|(&i, &c)| (i, p.mul(c, p.reduce(((i / stride) % q) as i64))))
                .collect();
            return Ok(Self::from_index_map(&spec, Basis::Idempotent, terms));
        }
        let mut acc = Accumulator::new(&spec);
        for (&i, &c) in &self.terms {
            let k = (i / stride) % q;
            acc.add(i, p.mul(c, p.reduce(k as i64)));
            if k + 1 < q {
                acc.add(i + stride, p.mul(c, p.reduce((k + 1) as i64)));
            }
        }
        Ok(Self::from_index_map(&spec, Basis::Binomial, acc.finish()))
    }

    /// `(x_i + y_j) * f`.
    pub fn multiply_by_linear(&self, i: usize, j: usize) -> Result<TorusElement> {
        self.multiply_by_coordinate(Var::X(i))?
            .add(&self.multiply_by_coordinate(Var::Y(j))?)
    }
}

/// `C(x, a) C(x, b) = sum_i C(a+b-i, a-i) C(b, b-i) C(x, a+b-i)`, keeping
/// exponents below `q`. Returns `(exponent, coefficient)` pairs, exponents
/// descending, zero coefficients removed.
fn univariate_product(a: u32, b: u32, q: u32, lucas: &LucasTable) -> Vec<(u32, u32)> {
    let p = lucas.prime();
    (0..=a.min(b))
        .filter_map(|i| {
            let top = a + b - i;
            if top >= q {
                return None;
            }
            let c = p.mul(
                lucas.binom(u64::from(top), u64::from(a - i)),
                lucas.binom(u64::from(b), u64::from(b - i)),
            );
            (c != 0).then_some((top, c))
        })
        .collect()
}

/// The expansion of `C(x, k_a) C(x, k_b)` in Dist((G_m)_r), as a map
/// exponent -> coefficient.
pub fn mono_product_univariate(k_a: u32, k_b: u32, spec: &TorusSpec) -> Result<BTreeMap<u32, FpScalar>> {
    if k_a >= spec.q() || k_b >= spec.q() {
        return Err(Error::InvalidLabel(format!(
            "exponents {k_a}, {k_b} must be below q = {}",
            spec.q()
        )));
    }
    let lucas = LucasTable::new(spec.p());
    Ok(univariate_product(k_a, k_b, spec.q(), &lucas)
        .into_iter()
        .map(|(e, c)| (e, FpScalar::from_residue(c, spec.p())))
        .collect())
}
