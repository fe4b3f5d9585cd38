use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::{Signed, ToPrimitive};

use super::{fmt_rational, Field, Rational};
use crate::error::{Error, Result};

/// Element of a multi-quadratic field `Q(sqrt p1, ..., sqrt pk)`.
///
/// Stored as a sparse sum `sum_s c_s * sqrt(s)` over square-free keys `s >= 1`.
/// Square roots of distinct square-free integers are linearly independent
/// over `Q`, so the representation is unique and zero-testing is exact.
/// The generator set is implicit: it is the set of primes dividing some key,
/// so values built from different generator sets combine without explicit
/// promotion.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct MultiQuad {
    terms: BTreeMap<u64, Rational>,
}

impl MultiQuad {
    pub fn from_rational(r: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !r.is_zero() {
            terms.insert(1, r);
        }
        Self { terms }
    }

    /// `coeff * sqrt(key)`; `key` must be square-free.
    pub fn term(coeff: Rational, key: u64) -> Self {
        debug_assert!(key >= 1 && is_square_free(key));
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(key, coeff);
        }
        Self { terms }
    }

    /// Iterator over `(square-free key, coefficient)` pairs in key order.
    pub fn terms(&self) -> impl Iterator<Item = (u64, &Rational)> {
        self.terms.iter().map(|(k, c)| (*k, c))
    }

    /// The rational part if the value lies in `Q`.
    pub fn as_rational(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&1).cloned(),
            _ => None,
        }
    }

    /// Sorted primes whose square roots generate the smallest field holding
    /// this value.
    pub fn generators(&self) -> Vec<u64> {
        let mut primes: Vec<u64> = self.terms.keys().flat_map(|&k| prime_factors(k)).collect();
        primes.sort_unstable();
        primes.dedup();
        primes
    }

    fn add_term(&mut self, key: u64, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(key).or_insert_with(Rational::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    fn scale_by_int(&self, factor: u64) -> Self {
        let f = Rational::from_integer(BigInt::from(factor));
        Self {
            terms: self.terms.iter().map(|(k, c)| (*k, c * &f)).collect(),
        }
    }

    /// Splits `self = a + b*sqrt(p)` where no key of `a` or `b` is divisible by `p`.
    fn split(&self, p: u64) -> (Self, Self) {
        let mut a = Self::default();
        let mut b = Self::default();
        for (&k, c) in &self.terms {
            if k % p == 0 {
                b.terms.insert(k / p, c.clone());
            } else {
                a.terms.insert(k, c.clone());
            }
        }
        (a, b)
    }

    /// Multiplicative inverse, `None` for zero.
    ///
    /// Eliminates one generator at a time through the conjugate
    /// `(a + b sqrt p)(a - b sqrt p) = a^2 - p b^2`.
    pub fn inverse(&self) -> Option<Self> {
        if self.terms.is_empty() {
            return None;
        }
        let Some(p) = self.generators().last().copied() else {
            let c = &self.terms[&1];
            return Some(Self::from_rational(c.recip()));
        };
        let (a, b) = self.split(p);
        let conj = a.minus(&b.times(&Self::term(Rational::one(), p)));
        let norm = a.times(&a).minus(&b.times(&b).scale_by_int(p));
        let norm_inv = norm.inverse()?;
        Some(conj.times(&norm_inv))
    }
}

impl Field for MultiQuad {
    fn zero() -> Self {
        Self::default()
    }
    fn one() -> Self {
        Self::from_rational(Rational::one())
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn plus(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (&k, c) in &rhs.terms {
            out.add_term(k, c.clone());
        }
        out
    }
    fn minus(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (&k, c) in &rhs.terms {
            out.add_term(k, -c);
        }
        out
    }
    fn times(&self, rhs: &Self) -> Self {
        let mut out = Self::default();
        for (&a, ca) in &self.terms {
            for (&b, cb) in &rhs.terms {
                // sqrt(a) sqrt(b) = g sqrt((a/g)(b/g)) with g = gcd(a, b)
                let g = a.gcd(&b);
                let key = (a / g) * (b / g);
                out.add_term(key, ca * cb * Rational::from_integer(BigInt::from(g)));
            }
        }
        out
    }
    fn negated(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect(),
        }
    }
    fn over(&self, rhs: &Self) -> Self {
        self.times(&rhs.inverse().expect("division by zero"))
    }
}

impl From<Rational> for MultiQuad {
    fn from(r: Rational) -> Self {
        Self::from_rational(r)
    }
}

impl fmt::Display for MultiQuad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (&k, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if k == 1 {
                write!(f, "{}", fmt_rational(&mag))?;
            } else if mag == Rational::one() {
                write!(f, "√{k}")?;
            } else {
                write!(f, "{}√{k}", fmt_rational(&mag))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for MultiQuad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiQuad({self})")
    }
}

fn is_square_free(mut n: u64) -> bool {
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p * p) {
            return false;
        }
        if n.is_multiple_of(p) {
            n /= p;
        }
        p += 1;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Writes `n = f^2 * s` with `s` square-free and returns `(f, s)`.
///
/// Trial division runs up to the cube root; whatever remains is either 1, a
/// prime, a product of two distinct primes or the square of a prime, and
/// only the last case is a perfect square.
pub fn square_free_decomposition(mut n: u64) -> (u64, u64) {
    if n == 0 {
        return (0, 1);
    }
    let (mut f, mut s) = (1u64, 1u64);
    let mut p = 2u64;
    while p.saturating_mul(p).saturating_mul(p) <= n {
        let mut e = 0;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        f *= p.pow(e / 2);
        if e % 2 == 1 {
            s *= p;
        }
        p += 1;
    }
    let r = n.sqrt();
    if r > 1 && r * r == n {
        f *= r;
    } else {
        s *= n;
    }
    (f, s)
}

/// Exact square root of a nonnegative rational inside the multi-quadratic
/// field: `sqrt(p/q) = sqrt(p*q)/q`, and `p*q = f^2 s` gives `(f/q) sqrt(s)`.
pub fn sqrt_embed(r: &Rational) -> Result<MultiQuad> {
    if r.is_negative() {
        return Err(Error::NegativeSqrt(fmt_rational(r)));
    }
    if r.is_zero() {
        return Ok(MultiQuad::zero());
    }
    let pq = r.numer() * r.denom();
    let n = pq.to_u64().ok_or_else(|| Error::Overflow(pq.to_string()))?;
    let (f, s) = square_free_decomposition(n);
    let coeff = Rational::new(BigInt::from(f), r.denom().clone());
    Ok(MultiQuad::term(coeff, s))
}
