//! Coefficient rings, truncated polynomials with the shift-style division by
//! `x`, and random prime sampling.

use std::fmt::Debug;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;

use crate::error::RingError;

/// Arithmetic the counting engine needs from its coefficients.
pub trait Ring: Clone + Send + Sync {
    type Elem: Clone + PartialEq + Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_bigint(&self, v: &BigInt) -> Self::Elem;
    /// Canonical integer representative (residues lie in `[0, m)`).
    fn to_bigint(&self, a: &Self::Elem) -> BigInt;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add_assign(&self, a: &mut Self::Elem, b: &Self::Elem);
    fn sub_assign(&self, a: &mut Self::Elem, b: &Self::Elem);
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;

    fn from_i64(&self, v: i64) -> Self::Elem {
        self.from_bigint(&BigInt::from(v))
    }

    /// `acc += a * b`
    fn mul_add_assign(&self, acc: &mut Self::Elem, a: &Self::Elem, b: &Self::Elem) {
        let p = self.mul(a, b);
        self.add_assign(acc, &p);
    }
}

/// The integers, exactly.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Integers;

impl Ring for Integers {
    type Elem = BigInt;

    fn zero(&self) -> BigInt {
        BigInt::zero()
    }
    fn one(&self) -> BigInt {
        BigInt::one()
    }
    fn from_bigint(&self, v: &BigInt) -> BigInt {
        v.clone()
    }
    fn to_bigint(&self, a: &BigInt) -> BigInt {
        a.clone()
    }
    fn is_zero(&self, a: &BigInt) -> bool {
        a.is_zero()
    }
    fn add_assign(&self, a: &mut BigInt, b: &BigInt) {
        *a += b;
    }
    fn sub_assign(&self, a: &mut BigInt, b: &BigInt) {
        *a -= b;
    }
    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a * b
    }
    fn mul_add_assign(&self, acc: &mut BigInt, a: &BigInt, b: &BigInt) {
        if !a.is_zero() && !b.is_zero() {
            *acc += a * b;
        }
    }
}

/// Integers modulo a word-sized `m < 2^63`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Zmod64 {
    m: u64,
    prime: bool,
}

impl Zmod64 {
    pub fn new(m: u64) -> Result<Self, RingError> {
        if m < 2 || m >= 1 << 63 {
            return Err(RingError::InvalidModulus);
        }
        Ok(Zmod64 {
            m,
            prime: is_prime(m),
        })
    }

    pub fn modulus(&self) -> u64 {
        self.m
    }

    pub fn is_field(&self) -> bool {
        self.prime
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1 % self.m;
        base %= self.m;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            exp >>= 1;
        }
        acc
    }

    pub fn inverse(&self, a: u64) -> Result<u64, RingError> {
        if !self.prime {
            return Err(RingError::NotAField);
        }
        if a % self.m == 0 {
            return Err(RingError::DenominatorVanished);
        }
        Ok(self.pow(a, self.m - 2))
    }
}

impl Ring for Zmod64 {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn from_bigint(&self, v: &BigInt) -> u64 {
        let m = BigInt::from(self.m);
        let r = ((v % &m) + &m) % &m;
        r.to_u64().expect("residue fits")
    }
    fn to_bigint(&self, a: &u64) -> BigInt {
        BigInt::from(*a)
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    #[inline]
    fn add_assign(&self, a: &mut u64, b: &u64) {
        let s = *a + *b;
        *a = if s >= self.m { s - self.m } else { s };
    }
    #[inline]
    fn sub_assign(&self, a: &mut u64, b: &u64) {
        *a = if *a >= *b { *a - *b } else { *a + self.m - *b };
    }
    #[inline]
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 * *b as u128) % self.m as u128) as u64
    }
}

/// Integers modulo an arbitrary-precision `m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZmodBig {
    m: BigUint,
}

impl ZmodBig {
    pub fn new(m: BigUint) -> Result<Self, RingError> {
        if m < BigUint::from(2u32) {
            return Err(RingError::InvalidModulus);
        }
        Ok(ZmodBig { m })
    }

    pub fn modulus(&self) -> &BigUint {
        &self.m
    }
}

impl Ring for ZmodBig {
    type Elem = BigUint;

    fn zero(&self) -> BigUint {
        BigUint::zero()
    }
    fn one(&self) -> BigUint {
        BigUint::one()
    }
    fn from_bigint(&self, v: &BigInt) -> BigUint {
        let r = v.magnitude() % &self.m;
        if v.sign() == Sign::Minus && !r.is_zero() {
            &self.m - r
        } else {
            r
        }
    }
    fn to_bigint(&self, a: &BigUint) -> BigInt {
        BigInt::from(a.clone())
    }
    fn is_zero(&self, a: &BigUint) -> bool {
        a.is_zero()
    }
    fn add_assign(&self, a: &mut BigUint, b: &BigUint) {
        *a += b;
        if *a >= self.m {
            *a -= &self.m;
        }
    }
    fn sub_assign(&self, a: &mut BigUint, b: &BigUint) {
        if *a < *b {
            *a += &self.m;
        }
        *a -= b;
    }
    fn mul(&self, a: &BigUint, b: &BigUint) -> BigUint {
        (a * b) % &self.m
    }
}

/// Which ring a count is computed in.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoefficientRing {
    /// Arbitrary-precision integers.
    Exact,
    /// Integers modulo `m >= 2`.
    Modular(BigUint),
}

impl CoefficientRing {
    pub fn modular(m: u64) -> Self {
        CoefficientRing::Modular(BigUint::from(m))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, CoefficientRing::Exact)
    }

    pub fn modulus(&self) -> Option<&BigUint> {
        match self {
            CoefficientRing::Exact => None,
            CoefficientRing::Modular(m) => Some(m),
        }
    }

    /// Canonical representative of `v` in this ring.
    pub fn reduce(&self, v: &BigInt) -> BigInt {
        match self {
            CoefficientRing::Exact => v.clone(),
            CoefficientRing::Modular(m) => {
                let m = BigInt::from(m.clone());
                ((v % &m) + &m) % &m
            }
        }
    }
}

/// Multiplicative inverse of `c` in `Z_m` for prime `m`.
pub fn mod_inverse(c: &BigInt, ring: &CoefficientRing) -> Result<BigInt, RingError> {
    let m = ring.modulus().ok_or(RingError::NotAField)?;
    if let Some(m64) = m.to_u64().filter(|&m| m < 1 << 63) {
        let z = Zmod64::new(m64)?;
        let inv = z.inverse(z.from_bigint(c))?;
        return Ok(BigInt::from(inv));
    }
    if !is_prime_big(m) {
        return Err(RingError::NotAField);
    }
    let z = ZmodBig::new(m.clone())?;
    let a = z.from_bigint(c);
    if a.is_zero() {
        return Err(RingError::DenominatorVanished);
    }
    let e = m - BigUint::from(2u32);
    Ok(BigInt::from(a.modpow(&e, m)))
}

/// Deterministic primality test, complete for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    primal_check::miller_rabin(n)
}

fn is_prime_big(n: &BigUint) -> bool {
    // Miller-Rabin with the first twelve prime bases; only reached for
    // moduli above 2^63, which the solvers never invert in.
    if let Some(small) = n.to_u64() {
        return is_prime(small);
    }
    let one = BigUint::one();
    let two = BigUint::from(2u32);
    let nm1 = n - &one;
    let s = nm1.trailing_zeros().unwrap_or(0);
    let dodd = &nm1 >> s;
    'outer: for a in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = BigUint::from(a).modpow(&dodd, n);
        if x == one || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == nm1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// Polynomial in `x` truncated to degrees `0..cap`.
#[derive(Clone, Debug)]
pub struct TruncatedPolynomial<R: Ring> {
    coeffs: Vec<R::Elem>,
    cap: usize,
}

impl<R: Ring> PartialEq for TruncatedPolynomial<R> {
    /// Coefficient vectors never carry trailing zeros, so this is equality of
    /// polynomials; caps must agree as well.
    fn eq(&self, other: &Self) -> bool {
        self.cap == other.cap && self.coeffs == other.coeffs
    }
}

impl<R: Ring> TruncatedPolynomial<R> {
    pub fn zero(cap: usize) -> Self {
        TruncatedPolynomial {
            coeffs: Vec::new(),
            cap,
        }
    }

    pub fn constant(c: R::Elem, cap: usize, ring: &R) -> Self {
        Self::from_coeffs(vec![c], cap, ring)
    }

    pub fn one(cap: usize, ring: &R) -> Self {
        Self::constant(ring.one(), cap, ring)
    }

    /// Coefficients from degree 0 upwards; degrees `>= cap` are dropped.
    pub fn from_coeffs(mut coeffs: Vec<R::Elem>, cap: usize, ring: &R) -> Self {
        coeffs.truncate(cap);
        let mut p = TruncatedPolynomial { coeffs, cap };
        p.trim(ring);
        p
    }

    pub fn from_i64s(vals: &[i64], cap: usize, ring: &R) -> Self {
        Self::from_coeffs(vals.iter().map(|&v| ring.from_i64(v)).collect(), cap, ring)
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn coeffs(&self) -> &[R::Elem] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize, ring: &R) -> R::Elem {
        self.coeffs.get(i).cloned().unwrap_or_else(|| ring.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of `x^0`.
    pub fn free_term(&self, ring: &R) -> R::Elem {
        self.coeff(0, ring)
    }

    fn trim(&mut self, ring: &R) {
        while self.coeffs.last().is_some_and(|c| ring.is_zero(c)) {
            self.coeffs.pop();
        }
    }

    fn check_cap(&self, other: &Self) -> Result<(), RingError> {
        if self.cap != other.cap {
            return Err(RingError::CapMismatch(self.cap, other.cap));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self, ring: &R) -> Result<Self, RingError> {
        self.check_cap(other)?;
        let mut out = self.clone();
        out.add_shifted(other, 0, usize::MAX, ring);
        Ok(out)
    }

    pub fn sub(&self, other: &Self, ring: &R) -> Result<Self, RingError> {
        self.check_cap(other)?;
        let mut out = self.clone();
        out.sub_assign(other, ring);
        Ok(out)
    }

    pub fn mul(&self, other: &Self, ring: &R) -> Result<Self, RingError> {
        self.check_cap(other)?;
        Ok(self.mul_upto(other, self.cap, ring))
    }

    pub fn scale(&self, c: &R::Elem, ring: &R) -> Self {
        let coeffs = self.coeffs.iter().map(|a| ring.mul(a, c)).collect();
        Self::from_coeffs(coeffs, self.cap, ring)
    }

    /// The shift `x^i / x^e = x^{i-e}` for `i >= e`, and `0` for `i < e`.
    /// This is not ring division: low coefficients are discarded.
    pub fn div_by_x_power(&self, e: usize) -> Self {
        TruncatedPolynomial {
            coeffs: self.coeffs.iter().skip(e).cloned().collect(),
            cap: self.cap,
        }
    }

    /// `self += x^shift * other`, keeping degrees `<= hi` (and `< cap`).
    pub(crate) fn add_shifted(&mut self, other: &Self, shift: usize, hi: usize, ring: &R) {
        let limit = self.cap.min(hi.saturating_add(1));
        for (i, c) in other.coeffs.iter().enumerate() {
            let j = i + shift;
            if j >= limit {
                break;
            }
            if j >= self.coeffs.len() {
                self.coeffs.resize(j + 1, ring.zero());
            }
            ring.add_assign(&mut self.coeffs[j], c);
        }
        self.trim(ring);
    }

    pub(crate) fn sub_assign(&mut self, other: &Self, ring: &R) {
        if other.coeffs.len() > self.coeffs.len() {
            self.coeffs.resize(other.coeffs.len(), ring.zero());
        }
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            ring.sub_assign(a, b);
        }
        self.trim(ring);
    }

    /// Product keeping only degrees `< min(limit, cap)`.
    pub(crate) fn mul_upto(&self, other: &Self, limit: usize, ring: &R) -> Self {
        let limit = limit.min(self.cap);
        if self.is_zero() || other.is_zero() || limit == 0 {
            return Self::zero(self.cap);
        }
        let len = (self.coeffs.len() + other.coeffs.len() - 1).min(limit);
        let mut coeffs = vec![ring.zero(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if i >= len {
                break;
            }
            if ring.is_zero(a) {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                ring.mul_add_assign(&mut coeffs[i + j], a, b);
            }
        }
        Self::from_coeffs(coeffs, self.cap, ring)
    }

    /// `self *= c0 + c1 x`, keeping degrees `< min(limit, cap)`.
    pub(crate) fn mul_linear_upto(&mut self, c0: &R::Elem, c1: &R::Elem, limit: usize, ring: &R) {
        let limit = limit.min(self.cap);
        if self.coeffs.len() < limit && !ring.is_zero(c1) {
            self.coeffs.push(ring.zero());
        }
        self.coeffs.truncate(limit);
        for i in (0..self.coeffs.len()).rev() {
            let mut v = ring.mul(&self.coeffs[i], c0);
            if i > 0 {
                ring.mul_add_assign(&mut v, &self.coeffs[i - 1], c1);
            }
            self.coeffs[i] = v;
        }
        self.trim(ring);
    }

    pub(crate) fn scale_in_place(&mut self, c: &R::Elem, ring: &R) {
        for a in self.coeffs.iter_mut() {
            *a = ring.mul(a, c);
        }
        self.trim(ring);
    }
}

/// Parameters of the random prime `p` drawn from `(A, 2A)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PrimeSamplerConfig {
    /// The constant `L` below which `A` never drops.
    pub lower_threshold: u64,
    /// The error exponent `C` in `A = max(L, n^5 2^{5 C d^2})`.
    pub error_exponent: f64,
    /// Upper cap for `A`; keeps `2A` below `2^63`.
    pub max_bound: u64,
    /// Trials before giving up.
    pub max_trials: usize,
}

impl Default for PrimeSamplerConfig {
    fn default() -> Self {
        PrimeSamplerConfig {
            lower_threshold: 21,
            error_exponent: 1.0,
            max_bound: 1 << 61,
            max_trials: 10_000,
        }
    }
}

impl PrimeSamplerConfig {
    /// `A = max(L, n^5 * 2^{5 C d^2})`, capped at `max_bound`.
    pub fn interval_bound(&self, n: usize, d: usize) -> u64 {
        let log2 = 5.0 * (n.max(1) as f64).log2()
            + 5.0 * self.error_exponent * (d * d) as f64;
        let cap = self.max_bound.min(1 << 62);
        let raw = if log2 >= 62.0 {
            cap
        } else {
            (2f64.powf(log2).round() as u64).min(cap)
        };
        raw.max(self.lower_threshold).min(cap)
    }
}

/// Samples a uniform integer in `(A, 2A)` until it is prime. `None` after
/// `max_trials` misses or when the interval holds no integer.
pub fn sample_prime<G: Rng + ?Sized>(a: u64, max_trials: usize, rng: &mut G) -> Option<u64> {
    assert!(a < 1 << 62, "interval bound too large");
    if a + 1 >= 2 * a {
        return None;
    }
    for _ in 0..max_trials {
        let c = rng.gen_range(a + 1..2 * a);
        if is_prime(c) {
            return Some(c);
        }
    }
    None
}
