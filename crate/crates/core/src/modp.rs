//! Arithmetic modulo a prime: the scalar field, binomial coefficients via
//! Lucas' theorem, p-adic carries and exact integer helpers.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A prime modulus. Primality is checked by trial division on construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Prime(u32);

impl Prime {
    pub fn new(p: u64) -> Result<Self> {
        if p < 2 {
            return Err(Error::NotPrime(p));
        }
        if p > u64::from(u32::MAX) {
            return Err(Error::InvalidSpec(format!("prime {p} does not fit in 32 bits")));
        }
        let mut d = 2u64;
        while d * d <= p {
            if p % d == 0 {
                return Err(Error::NotPrime(p));
            }
            d += 1;
        }
        Ok(Prime(p as u32))
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn as_u64(self) -> u64 {
        u64::from(self.0)
    }

    /// Reduces a signed integer to its representative in `[0, p)`.
    #[inline]
    pub fn reduce(self, v: i64) -> u32 {
        v.rem_euclid(i64::from(self.0)) as u32
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        ((u64::from(a) + u64::from(b)) % self.as_u64()) as u32
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        ((u64::from(a) + self.as_u64() - u64::from(b)) % self.as_u64()) as u32
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((u64::from(a) * u64::from(b)) % self.as_u64()) as u32
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.0 - a
        }
    }

    pub fn pow(self, base: u32, mut exp: u64) -> u32 {
        let mut acc = 1 % self.0;
        let mut b = base % self.0;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(self, a: u32) -> Option<u32> {
        let a = a % self.0;
        if a == 0 {
            None
        } else {
            Some(self.pow(a, u64::from(self.0) - 2))
        }
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<'de> Deserialize<'de> for Prime {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let p = u64::deserialize(d)?;
        Prime::new(p).map_err(serde::de::Error::custom)
    }
}

/// An element of F_p, stored as its canonical representative.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FpScalar {
    value: u32,
    p: Prime,
}

impl FpScalar {
    pub fn new(value: i64, p: Prime) -> Self {
        FpScalar { value: p.reduce(value), p }
    }

    pub(crate) fn from_residue(value: u32, p: Prime) -> Self {
        debug_assert!(value < p.get());
        FpScalar { value, p }
    }

    pub fn zero(p: Prime) -> Self {
        FpScalar { value: 0, p }
    }

    pub fn one(p: Prime) -> Self {
        FpScalar { value: 1 % p.get(), p }
    }

    pub fn value(self) -> u32 {
        self.value
    }

    pub fn modulus(self) -> Prime {
        self.p
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn inv(self) -> Option<Self> {
        self.p.inv(self.value).map(|v| FpScalar { value: v, p: self.p })
    }
}

impl fmt::Display for FpScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Add for FpScalar {
    type Output = FpScalar;
    fn add(self, rhs: Self) -> Self {
        assert_eq!(self.p, rhs.p, "mixed moduli");
        FpScalar { value: self.p.add(self.value, rhs.value), p: self.p }
    }
}

impl Sub for FpScalar {
    type Output = FpScalar;
    fn sub(self, rhs: Self) -> Self {
        assert_eq!(self.p, rhs.p, "mixed moduli");
        FpScalar { value: self.p.sub(self.value, rhs.value), p: self.p }
    }
}

impl Mul for FpScalar {
    type Output = FpScalar;
    fn mul(self, rhs: Self) -> Self {
        assert_eq!(self.p, rhs.p, "mixed moduli");
        FpScalar { value: self.p.mul(self.value, rhs.value), p: self.p }
    }
}

impl Neg for FpScalar {
    type Output = FpScalar;
    fn neg(self) -> Self {
        FpScalar { value: self.p.neg(self.value), p: self.p }
    }
}

/// Base-p digits of `n`, least significant first.
pub fn digits(mut n: u64, p: Prime) -> Vec<u32> {
    let mut out = Vec::new();
    while n > 0 {
        out.push((n % p.as_u64()) as u32);
        n /= p.as_u64();
    }
    out
}

fn small_binom(n: u32, k: u32, p: Prime) -> u32 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut num = 1u32;
    let mut den = 1u32;
    for i in 0..k {
        num = p.mul(num, n - i);
        den = p.mul(den, i + 1);
    }
    p.mul(num, p.inv(den).expect("digits are below p"))
}

/// C(n, k) mod p as a product of digit binomials (Lucas).
pub fn binom_mod_p(n: u64, k: u64, p: Prime) -> FpScalar {
    if k > n {
        return FpScalar::zero(p);
    }
    let (mut n, mut k) = (n, k);
    let mut acc = 1 % p.get();
    while k > 0 {
        let nd = (n % p.as_u64()) as u32;
        let kd = (k % p.as_u64()) as u32;
        if kd > nd {
            return FpScalar::zero(p);
        }
        acc = p.mul(acc, small_binom(nd, kd, p));
        n /= p.as_u64();
        k /= p.as_u64();
    }
    FpScalar::from_residue(acc, p)
}

/// True iff adding `a` and `b` in base p produces at least one carry.
pub fn has_padic_carry(a: u64, b: u64, p: Prime) -> bool {
    let (mut a, mut b) = (a, b);
    while a > 0 && b > 0 {
        if a % p.as_u64() + b % p.as_u64() >= p.as_u64() {
            return true;
        }
        a /= p.as_u64();
        b /= p.as_u64();
    }
    false
}

/// Factorial tables mod p; answers C(n, k) mod p in O(log_p n).
#[derive(Clone, Debug)]
pub struct LucasTable {
    p: Prime,
    fact: Vec<u32>,
    inv_fact: Vec<u32>,
}

impl LucasTable {
    pub fn new(p: Prime) -> Self {
        let pu = p.get() as usize;
        let mut fact = vec![1u32 % p.get(); pu];
        for i in 1..pu {
            fact[i] = p.mul(fact[i - 1], i as u32);
        }
        let mut inv_fact = vec![1u32 % p.get(); pu];
        inv_fact[pu - 1] = p.inv(fact[pu - 1]).expect("(p-1)! is a unit");
        for i in (1..pu).rev() {
            inv_fact[i - 1] = p.mul(inv_fact[i], i as u32);
        }
        LucasTable { p, fact, inv_fact }
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn binom(&self, n: u64, k: u64) -> u32 {
        if k > n {
            return 0;
        }
        let p = self.p;
        let (mut n, mut k) = (n, k);
        let mut acc = 1 % p.get();
        while k > 0 {
            let nd = (n % p.as_u64()) as usize;
            let kd = (k % p.as_u64()) as usize;
            if kd > nd {
                return 0;
            }
            acc = p.mul(acc, self.fact[nd]);
            acc = p.mul(acc, self.inv_fact[kd]);
            acc = p.mul(acc, self.inv_fact[nd - kd]);
            n /= p.as_u64();
            k /= p.as_u64();
        }
        acc
    }
}

/// Exact binomial coefficient.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// The exact sum `sum_{r=0}^{a} (-1)^r C(a, r) r^b`.
pub fn alternating_power_sum(a: u32, b: u32) -> BigInt {
    let mut total = BigInt::zero();
    for r in 0..=a {
        let term = BigInt::from(binomial(u64::from(a), u64::from(r))) * BigInt::from(r).pow(b);
        if r % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}
