//! Exact arithmetic in GF(p) and GF(p^m).
//!
//! An extension field is represented in the polynomial basis `1, a, ..., a^(m-1)`
//! where `a` is a root of a monic irreducible modulus. Elements are packed into a
//! single `u64` as `c_0 + c_1 p + ... + c_(m-1) p^(m-1)`, so an element is `Copy`
//! and equality of packed values is coordinate-wise equality.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;
use thiserror::Error;

/// Largest field order accepted. Exponent sums of two canonical monomials must
/// still fit in a `u64`.
pub const MAX_ORDER: u64 = 1 << 62;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("modulus must be monic of degree {expected}, got {got} coefficients")]
    BadModulus { expected: usize, got: usize },
    #[error("modulus coefficient {0} is not reduced modulo p")]
    UnreducedCoefficient(u64),
    #[error("modulus is reducible over GF({0})")]
    Reducible(u64),
    #[error("field order {0}^{1} is too large")]
    TooLarge(u64, usize),
    #[error("no default modulus shipped for GF({0}^{1}); supply one explicitly")]
    NoDefaultModulus(u64, usize),
    #[error("element {0} does not belong to the field")]
    NotAnElement(u64),
    #[error("coordinate vector has length {got}, expected {expected}")]
    CoordinateLength { expected: usize, got: usize },
    #[error("inversion of zero")]
    ZeroInverse,
    #[error("field specs differ: {0} vs {1}")]
    Mismatch(String, String),
    #[error("cannot parse field spec `{0}`")]
    Syntax(String),
}

/// An element of some [`Field`]. Meaningless without the field that produced it.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement(u64);

impl FieldElement {
    /// The packed representation; for prime fields this is the residue itself.
    pub fn packed(self) -> u64 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

#[derive(Debug, PartialEq, Eq, Hash)]
struct FieldInner {
    p: u64,
    m: usize,
    /// Monic modulus, lowest coefficient first, length `m + 1`.
    modulus: Vec<u64>,
    order: u64,
    /// `p^i` for `i < m`.
    place: Vec<u64>,
}

/// A prime field or an extension field with a fixed polynomial basis.
///
/// Cheap to clone; all clones share the same spec.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Field(Arc<FieldInner>);

/// Moduli shipped for small extension fields, highest coefficient first.
const DEFAULT_MODULI: &[(u64, usize, &[u64])] = &[
    (2, 2, &[1, 1, 1]),       // x^2 + x + 1
    (2, 3, &[1, 0, 1, 1]),    // x^3 + x + 1
    (3, 2, &[1, 2, 2]),       // x^2 + 2x + 2 = x^2 - x - 1
    (3, 3, &[1, 0, 2, 1]),    // x^3 + 2x + 1
    (2, 4, &[1, 0, 0, 1, 1]), // x^4 + x + 1
    (5, 2, &[1, 4, 2]),       // x^2 + 4x + 2
];

impl Field {
    /// GF(p).
    pub fn prime(p: u64) -> Result<Self, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if p > MAX_ORDER {
            return Err(FieldError::TooLarge(p, 1));
        }
        Ok(Self::build(p, vec![0, 1]))
    }

    /// GF(p^m) with the given monic modulus, highest coefficient first
    /// (`[1, 2, 2]` is `x^2 + 2x + 2`).
    pub fn extension(p: u64, modulus_high_first: &[u64]) -> Result<Self, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if modulus_high_first.len() < 2 {
            return Err(FieldError::ZeroDegree);
        }
        let m = modulus_high_first.len() - 1;
        if modulus_high_first[0] != 1 {
            return Err(FieldError::BadModulus {
                expected: m,
                got: modulus_high_first.len(),
            });
        }
        if let Some(&c) = modulus_high_first.iter().find(|&&c| c >= p) {
            return Err(FieldError::UnreducedCoefficient(c));
        }
        let mut order: u64 = 1;
        for _ in 0..m {
            order = order
                .checked_mul(p)
                .filter(|&o| o <= MAX_ORDER)
                .ok_or(FieldError::TooLarge(p, m))?;
        }
        let modulus: Vec<u64> = modulus_high_first.iter().rev().copied().collect();
        if m > 1 && !gfp_poly::is_irreducible(&modulus, p) {
            return Err(FieldError::Reducible(p));
        }
        Ok(Self::build(p, modulus))
    }

    /// GF(p^m) using one of the shipped moduli (GF(4), GF(8), GF(9), GF(27), GF(16), GF(25)).
    pub fn default_extension(p: u64, m: usize) -> Result<Self, FieldError> {
        if m == 1 {
            return Self::prime(p);
        }
        let (_, _, modulus) = DEFAULT_MODULI
            .iter()
            .find(|(q, k, _)| *q == p && *k == m)
            .ok_or(FieldError::NoDefaultModulus(p, m))?;
        Self::extension(p, modulus)
    }

    fn build(p: u64, modulus: Vec<u64>) -> Self {
        let m = modulus.len() - 1;
        let mut place = Vec::with_capacity(m);
        let mut acc = 1u64;
        for _ in 0..m {
            place.push(acc);
            acc = acc.saturating_mul(p);
        }
        Field(Arc::new(FieldInner {
            p,
            m,
            modulus,
            order: acc,
            place,
        }))
    }

    pub fn characteristic(&self) -> u64 {
        self.0.p
    }

    pub fn degree(&self) -> usize {
        self.0.m
    }

    /// Number of elements, `p^m`.
    pub fn order(&self) -> u64 {
        self.0.order
    }

    pub fn is_prime_field(&self) -> bool {
        self.0.m == 1
    }

    /// Modulus coefficients, lowest first.
    pub fn modulus(&self) -> &[u64] {
        &self.0.modulus
    }

    /// The prime subfield GF(p).
    pub fn prime_subfield(&self) -> Field {
        if self.is_prime_field() {
            self.clone()
        } else {
            Self::build(self.0.p, vec![0, 1])
        }
    }

    pub fn ensure_same(&self, other: &Field) -> Result<(), FieldError> {
        if self == other {
            Ok(())
        } else {
            Err(FieldError::Mismatch(self.to_string(), other.to_string()))
        }
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement(0)
    }

    pub fn one(&self) -> FieldElement {
        FieldElement(1)
    }

    /// The integer `x` viewed in the prime subfield.
    pub fn from_u64(&self, x: u64) -> FieldElement {
        FieldElement(x % self.0.p)
    }

    /// The integer `x` (possibly negative) viewed in the prime subfield.
    pub fn from_i64(&self, x: i64) -> FieldElement {
        FieldElement(x.rem_euclid(self.0.p as i64) as u64)
    }

    /// Element from its packed index in `0..order`.
    pub fn element(&self, packed: u64) -> Result<FieldElement, FieldError> {
        if packed < self.0.order {
            Ok(FieldElement(packed))
        } else {
            Err(FieldError::NotAnElement(packed))
        }
    }

    pub fn contains(&self, a: FieldElement) -> bool {
        a.0 < self.0.order
    }

    /// Element from basis coordinates `c_0, ..., c_(m-1)`, each in `[0, p)`.
    pub fn from_coords(&self, coords: &[u64]) -> Result<FieldElement, FieldError> {
        if coords.len() != self.0.m {
            return Err(FieldError::CoordinateLength {
                expected: self.0.m,
                got: coords.len(),
            });
        }
        if let Some(&c) = coords.iter().find(|&&c| c >= self.0.p) {
            return Err(FieldError::NotAnElement(c));
        }
        Ok(self.pack(coords))
    }

    /// Coordinates in the basis `1, a, ..., a^(m-1)`.
    pub fn coords(&self, a: FieldElement) -> Vec<u64> {
        let mut out = vec![0; self.0.m];
        self.unpack_into(a, &mut out);
        out
    }

    fn unpack_into(&self, a: FieldElement, out: &mut [u64]) {
        let p = self.0.p;
        let mut x = a.0;
        for c in out.iter_mut() {
            *c = x % p;
            x /= p;
        }
    }

    fn pack(&self, coords: &[u64]) -> FieldElement {
        FieldElement(coords.iter().zip(&self.0.place).map(|(c, w)| c * w).sum())
    }

    /// The basis `1, a, a^2, ..., a^(m-1)`.
    pub fn basis(&self) -> Vec<FieldElement> {
        self.0.place.iter().map(|&w| FieldElement(w)).collect()
    }

    /// The generator `a` of the polynomial basis; `None` for prime fields.
    pub fn generator(&self) -> Option<FieldElement> {
        self.0.place.get(1).map(|&w| FieldElement(w))
    }

    /// All elements in packed order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.0.order).map(FieldElement)
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        FieldElement(rng.gen_range(0..self.0.order))
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        FieldElement(rng.gen_range(1..self.0.order))
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let p = self.0.p;
        if self.0.m == 1 {
            let s = a.0 + b.0;
            return FieldElement(if s >= p { s - p } else { s });
        }
        let (mut x, mut y) = (a.0, b.0);
        let mut out = 0;
        for &w in &self.0.place {
            let s = (x % p + y % p) % p;
            out += s * w;
            x /= p;
            y /= p;
        }
        FieldElement(out)
    }

    pub fn neg(&self, a: FieldElement) -> FieldElement {
        let p = self.0.p;
        if self.0.m == 1 {
            return FieldElement(if a.0 == 0 { 0 } else { p - a.0 });
        }
        let mut x = a.0;
        let mut out = 0;
        for &w in &self.0.place {
            let c = x % p;
            out += ((p - c) % p) * w;
            x /= p;
        }
        FieldElement(out)
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let p = self.0.p;
        if self.0.m == 1 {
            return FieldElement(mul_mod(a.0, b.0, p));
        }
        let m = self.0.m;
        let mut xa = vec![0u64; m];
        let mut xb = vec![0u64; m];
        self.unpack_into(a, &mut xa);
        self.unpack_into(b, &mut xb);
        let mut prod = vec![0u64; 2 * m - 1];
        for (i, &ca) in xa.iter().enumerate() {
            if ca == 0 {
                continue;
            }
            for (j, &cb) in xb.iter().enumerate() {
                prod[i + j] = add_mod(prod[i + j], mul_mod(ca, cb, p), p);
            }
        }
        gfp_poly::reduce_monic(&mut prod, &self.0.modulus, p);
        prod.truncate(m);
        self.pack(&prod)
    }

    /// Multiplication by an integer of the prime subfield.
    pub fn scale(&self, a: FieldElement, k: u64) -> FieldElement {
        self.mul(a, self.from_u64(k))
    }

    pub fn pow(&self, a: FieldElement, mut e: u64) -> FieldElement {
        let mut base = a;
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement, FieldError> {
        if a.is_zero() {
            return Err(FieldError::ZeroInverse);
        }
        let p = self.0.p;
        if self.0.m == 1 {
            return Ok(FieldElement(inv_mod(a.0, p)));
        }
        let coords = self.coords(a);
        let inv = gfp_poly::inverse_mod(&coords, &self.0.modulus, p);
        let mut padded = inv;
        padded.resize(self.0.m, 0);
        Ok(self.pack(&padded))
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn sum<I: IntoIterator<Item = FieldElement>>(&self, items: I) -> FieldElement {
        items
            .into_iter()
            .fold(self.zero(), |acc, x| self.add(acc, x))
    }

    /// Text form of an element: a residue for the prime subfield, otherwise a
    /// polynomial in `a` such as `2*a+1`.
    pub fn format_element(&self, x: FieldElement) -> String {
        if x.0 < self.0.p {
            return x.0.to_string();
        }
        let coords = self.coords(x);
        let mut parts = Vec::new();
        for (i, &c) in coords.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let var = match i {
                0 => String::new(),
                1 => "a".to_string(),
                _ => format!("a^{i}"),
            };
            parts.push(match (c, i) {
                (_, 0) => c.to_string(),
                (1, _) => var,
                _ => format!("{c}*{var}"),
            });
        }
        parts.join("+")
    }
}

impl fmt::Display for Field {
    /// `p` for prime fields, `p^m/c_m,...,c_0` otherwise.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.m == 1 {
            return write!(f, "{}", self.0.p);
        }
        let coeffs: Vec<String> = self.0.modulus.iter().rev().map(u64::to_string).collect();
        write!(f, "{}^{}/{}", self.0.p, self.0.m, coeffs.join(","))
    }
}

impl FromStr for Field {
    type Err = FieldError;

    /// Accepts `p`, `p^m` (shipped modulus), a bare prime power `q` (same as
    /// `p^m`) and `p^m/c_m,...,c_0`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || FieldError::Syntax(s.to_string());
        let s = s.trim();
        let (head, modulus) = match s.split_once('/') {
            Some((h, m)) => (h.trim(), Some(m)),
            None => (s, None),
        };
        let (p, m) = match head.split_once('^') {
            Some((p, m)) => (
                p.trim().parse::<u64>().map_err(|_| bad())?,
                m.trim().parse::<usize>().map_err(|_| bad())?,
            ),
            None => {
                let q = head.parse::<u64>().map_err(|_| bad())?;
                if modulus.is_none() && q > 1 && !is_prime(q) {
                    if let Some((p, m)) = prime_power(q) {
                        return Self::default_extension(p, m);
                    }
                }
                (q, 1)
            }
        };
        match modulus {
            None => Self::default_extension(p, m),
            Some(text) => {
                let coeffs = text
                    .split(',')
                    .map(|c| c.trim().parse::<u64>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|_| bad())?;
                if coeffs.len() != m + 1 {
                    return Err(FieldError::BadModulus {
                        expected: m,
                        got: coeffs.len(),
                    });
                }
                if m == 1 {
                    // A linear modulus still describes GF(p).
                    Self::extension(p, &coeffs).map(|_| ())?;
                    return Self::prime(p);
                }
                Self::extension(p, &coeffs)
            }
        }
    }
}

/// `(p, m)` with `q = p^m`, `m >= 2`, if `q` is a prime power.
fn prime_power(q: u64) -> Option<(u64, usize)> {
    let p = (2..)
        .take_while(|d| d * d <= q)
        .find(|d| q.is_multiple_of(*d))?;
    let mut rest = q;
    let mut m = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        m += 1;
    }
    (rest == 1).then_some((p, m))
}

pub(crate) fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    let s = a as u128 + b as u128;
    (s % p as u128) as u64
}

pub(crate) fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub(crate) fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    acc
}

/// Inverse of a nonzero residue by the extended Euclidean algorithm.
pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    let (mut r0, mut r1) = (p as i128, (a % p) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    s0.rem_euclid(p as i128) as u64
}

/// Deterministic Miller-Rabin for 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &q in &SMALL {
        if n.is_multiple_of(q) {
            return n == q;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &SMALL {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Dense univariate polynomials over GF(p), lowest coefficient first.
mod gfp_poly {
    use super::{add_mod, inv_mod, mul_mod};

    fn trim(a: &mut Vec<u64>) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    /// Reduces `a` in place modulo a monic polynomial.
    pub(super) fn reduce_monic(a: &mut Vec<u64>, modulus: &[u64], p: u64) {
        let m = modulus.len() - 1;
        for top in (m..a.len()).rev() {
            let c = a[top];
            if c == 0 {
                continue;
            }
            a[top] = 0;
            for (i, &mi) in modulus[..m].iter().enumerate() {
                let t = mul_mod(c, mi, p);
                a[top - m + i] = add_mod(a[top - m + i], p - t, p);
            }
        }
        trim(a);
    }

    /// Remainder of `a` by an arbitrary nonzero `b`.
    fn rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut r = a.to_vec();
        trim(&mut r);
        let db = b.len() - 1;
        let lead_inv = inv_mod(b[db], p);
        while r.len() > db {
            let top = r.len() - 1;
            let c = mul_mod(r[top], lead_inv, p);
            for (i, &bi) in b.iter().enumerate() {
                let t = mul_mod(c, bi, p);
                r[top - db + i] = add_mod(r[top - db + i], p - t, p);
            }
            trim(&mut r);
        }
        r
    }

    fn mul_rem(a: &[u64], b: &[u64], modulus: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut prod = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = add_mod(prod[i + j], mul_mod(x, y, p), p);
            }
        }
        reduce_monic(&mut prod, modulus, p);
        prod
    }

    fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut x = a.to_vec();
        let mut y = b.to_vec();
        trim(&mut x);
        trim(&mut y);
        while !y.is_empty() {
            let r = rem(&x, &y, p);
            x = y;
            y = r;
        }
        x
    }

    /// Ben-Or: a monic `f` of degree `m` is irreducible iff
    /// `gcd(x^(p^i) - x, f) = 1` for all `1 <= i <= m/2`.
    pub(super) fn is_irreducible(modulus: &[u64], p: u64) -> bool {
        let m = modulus.len() - 1;
        let x = vec![0, 1];
        let mut power = x.clone();
        for _ in 1..=m / 2 {
            // power <- power^p mod f
            let mut acc = vec![1u64];
            let mut base = power.clone();
            let mut e = p;
            while e > 0 {
                if e & 1 == 1 {
                    acc = mul_rem(&acc, &base, modulus, p);
                }
                base = mul_rem(&base, &base, modulus, p);
                e >>= 1;
            }
            power = acc;
            let mut diff = power.clone();
            diff.resize(diff.len().max(2), 0);
            diff[1] = add_mod(diff[1], p - 1, p);
            trim(&mut diff);
            if diff.is_empty() {
                return false;
            }
            let g = gcd(modulus, &diff, p);
            if g.len() != 1 {
                return false;
            }
        }
        true
    }

    /// Inverse of nonzero `a` modulo an irreducible modulus, by the extended
    /// Euclidean algorithm on polynomials.
    pub(super) fn inverse_mod(a: &[u64], modulus: &[u64], p: u64) -> Vec<u64> {
        let mut r0 = modulus.to_vec();
        let mut r1 = a.to_vec();
        trim(&mut r1);
        let mut s0: Vec<u64> = Vec::new();
        let mut s1: Vec<u64> = vec![1];
        while !r1.is_empty() {
            // (q, r) = divmod(r0, r1)
            let mut r = r0.clone();
            let d1 = r1.len() - 1;
            let lead_inv = inv_mod(r1[d1], p);
            let mut q = vec![0u64; r.len().saturating_sub(d1).max(1)];
            while r.len() > d1 {
                let top = r.len() - 1;
                let c = mul_mod(r[top], lead_inv, p);
                q[top - d1] = c;
                for (i, &bi) in r1.iter().enumerate() {
                    let t = mul_mod(c, bi, p);
                    r[top - d1 + i] = add_mod(r[top - d1 + i], p - t, p);
                }
                trim(&mut r);
            }
            // s_next = s0 - q * s1
            let mut qs = vec![0u64; q.len() + s1.len()];
            for (i, &x) in q.iter().enumerate() {
                for (j, &y) in s1.iter().enumerate() {
                    qs[i + j] = add_mod(qs[i + j], mul_mod(x, y, p), p);
                }
            }
            let mut s_next = s0.clone();
            s_next.resize(s_next.len().max(qs.len()), 0);
            for (i, &c) in qs.iter().enumerate() {
                s_next[i] = add_mod(s_next[i], p - c, p);
            }
            trim(&mut s_next);
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s_next);
        }
        // r0 is a nonzero constant
        let c = inv_mod(r0[0], p);
        s0.iter().map(|&x| mul_mod(x, c, p)).collect()
    }
}
