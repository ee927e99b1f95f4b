//! Combinatorics modulo a prime: digit sums, carry counts, multinomials
//! computed digit by digit, and the differentiation constants `D(d, j, m)`.

use thiserror::Error;

use crate::field::{inv_mod, mul_mod};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CombinatError {
    #[error("parts sum to {got}, expected {expected}")]
    PartsSum { expected: u64, got: u64 },
    #[error("need 1 <= m <= j <= d, got d={d}, j={j}, m={m}")]
    Ordering { d: u64, j: u64, m: u64 },
    #[error("empty part list")]
    NoParts,
}

/// An ordered composition `(i_1, ..., i_k)` of `sum` into positive parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Composition {
    pub parts: Vec<u64>,
    pub sum: u64,
}

/// Base-`p` digits of `a`, least significant first. Empty for `a = 0`.
pub fn digits(mut a: u64, p: u64) -> Vec<u64> {
    let mut out = Vec::new();
    while a > 0 {
        out.push(a % p);
        a /= p;
    }
    out
}

/// Sum of the base-`p` digits of `a`.
pub fn digit_sum(mut a: u64, p: u64) -> u64 {
    let mut s = 0;
    while a > 0 {
        s += a % p;
        a /= p;
    }
    s
}

/// Total carry produced when adding all `parts` in base `p`. A column whose
/// sum is `s` (including the incoming carry) contributes `s / p`.
pub fn carry_count(parts: &[u64], p: u64) -> Result<u64, CombinatError> {
    if parts.is_empty() {
        return Err(CombinatError::NoParts);
    }
    let mut rest: Vec<u64> = parts.to_vec();
    let mut carry: u128 = 0;
    let mut total: u64 = 0;
    while carry > 0 || rest.iter().any(|&x| x > 0) {
        let mut column: u128 = carry;
        for x in rest.iter_mut() {
            column += (*x % p) as u128;
            *x /= p;
        }
        carry = column / p as u128;
        total += carry as u64;
    }
    Ok(total)
}

/// `binom(n, k) mod p` for `n < p`.
fn small_binomial(n: u64, k: u64, p: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut num = 1u64;
    let mut den = 1u64;
    for i in 0..k {
        num = mul_mod(num, (n - i) % p, p);
        den = mul_mod(den, (i + 1) % p, p);
    }
    mul_mod(num, inv_mod(den, p), p)
}

/// `binom(n, k) mod p` by Lucas' theorem.
pub fn binomial_mod(mut n: u64, mut k: u64, p: u64) -> u64 {
    if k > n {
        return 0;
    }
    let mut acc = 1 % p;
    while k > 0 || n > 0 {
        let (nd, kd) = (n % p, k % p);
        if kd > nd {
            return 0;
        }
        acc = mul_mod(acc, small_binomial(nd, kd, p), p);
        n /= p;
        k /= p;
    }
    acc
}

/// Multinomial `d! / (k_1! ... k_s!) mod p`, computed digit-wise: zero exactly
/// when some column of the base-`p` addition carries, otherwise the product
/// over columns of the digit multinomials.
pub fn multinomial_mod(d: u64, parts: &[u64], p: u64) -> Result<u64, CombinatError> {
    let got = parts.iter().try_fold(0u64, |acc, &x| acc.checked_add(x));
    if got != Some(d) {
        return Err(CombinatError::PartsSum {
            expected: d,
            got: got.unwrap_or(u64::MAX),
        });
    }
    let mut rest: Vec<u64> = parts.iter().copied().filter(|&x| x > 0).collect();
    let mut n = d;
    let mut acc = 1 % p;
    while n > 0 {
        let nd = n % p;
        let mut column = 0;
        for x in rest.iter_mut() {
            let kd = *x % p;
            // running column sum stays <= nd < p when there is no carry
            column += kd;
            if column > nd {
                return Ok(0);
            }
            acc = mul_mod(acc, small_binomial(column, kd, p), p);
            *x /= p;
        }
        if column != nd {
            return Ok(0);
        }
        n /= p;
    }
    Ok(acc)
}

/// Compositions `(i_1, ..., i_k)` of `j` into positive parts for which
/// `binom(d; i_1, ..., i_k, d - j)` is nonzero mod `p`, together with that
/// residue. Backtracking over digit vectors: every part must take its base-`p`
/// digits from what remains of the digits of `j`, and `j` itself must sit
/// digit-wise below `d`.
pub fn nonzero_compositions(d: u64, j: u64, k: u64, p: u64) -> Vec<(Composition, u64)> {
    let mut out = Vec::new();
    if k == 0 || j < k || j > d {
        return out;
    }
    let jd = digits(j, p);
    let dd = digits(d, p);
    if jd
        .iter()
        .enumerate()
        .any(|(i, &x)| x > dd.get(i).copied().unwrap_or(0))
    {
        return out;
    }
    let Ok(tail) = multinomial_mod(d, &[j, d - j], p) else {
        return out;
    };
    let mut parts = Vec::with_capacity(k as usize);
    let mut remaining = jd.clone();
    backtrack(&mut remaining, k, p, &mut parts, &mut |parts| {
        let coeff = multinomial_mod(j, parts, p).unwrap_or(0);
        let value = mul_mod(coeff, tail, p);
        if value != 0 {
            out.push((
                Composition {
                    parts: parts.to_vec(),
                    sum: j,
                },
                value,
            ));
        }
    });
    out
}

fn backtrack(
    remaining: &mut Vec<u64>,
    k_left: u64,
    p: u64,
    parts: &mut Vec<u64>,
    emit: &mut dyn FnMut(&[u64]),
) {
    let budget: u64 = remaining.iter().sum();
    if k_left == 1 {
        if budget == 0 {
            return;
        }
        let last = remaining.iter().rev().fold(0u64, |acc, &x| acc * p + x);
        parts.push(last);
        emit(parts);
        parts.pop();
        return;
    }
    // every later part needs at least one unit of digit mass
    if budget < k_left {
        return;
    }
    // enumerate digit vectors x <= remaining, x != 0, in increasing numeric order
    let len = remaining.len();
    let mut choice = vec![0u64; len];
    loop {
        // increment mixed-radix counter
        let mut pos = 0;
        loop {
            if pos == len {
                return;
            }
            if choice[pos] < remaining[pos] {
                choice[pos] += 1;
                break;
            }
            choice[pos] = 0;
            pos += 1;
        }
        let mass: u64 = choice.iter().sum();
        if budget - mass < k_left - 1 {
            continue;
        }
        let value = choice.iter().rev().fold(0u64, |acc, &x| acc * p + x);
        for (r, c) in remaining.iter_mut().zip(&choice) {
            *r -= c;
        }
        parts.push(value);
        backtrack(remaining, k_left - 1, p, parts, emit);
        parts.pop();
        for (r, c) in remaining.iter_mut().zip(&choice) {
            *r += c;
        }
    }
}

/// The set `C_p(d, j, k)`, sorted lexicographically.
pub fn composition_set(d: u64, j: u64, k: u64, p: u64) -> impl Iterator<Item = Composition> {
    let mut set: Vec<Composition> = nonzero_compositions(d, j, k, p)
        .into_iter()
        .map(|(c, _)| c)
        .collect();
    set.sort();
    set.into_iter()
}

/// `D(d, j, m) mod p`: the sum over compositions of `j` into `m` positive parts
/// of `binom(d; i_1, ..., i_m, d - j)`. This is the coefficient of `x^(d-j)`
/// after `m` unit-step differences of `x^d`.
pub fn diff_coefficient(d: u64, j: u64, m: u64, p: u64) -> Result<u64, CombinatError> {
    if !(1 <= m && m <= j && j <= d) {
        return Err(CombinatError::Ordering { d, j, m });
    }
    Ok(nonzero_compositions(d, j, m, p)
        .into_iter()
        .fold(0u64, |acc, (_, v)| (acc + v) % p))
}

/// Upper bound on the degree of `x^d` after `k` differences with nonzero steps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DegreeBound {
    /// Degree at most this value; `Degree(0)` is a constant that may be nonzero.
    Degree(u64),
    /// The result is the zero function.
    IdenticallyZero,
}

/// Consumes `k` units of base-`p` digit mass of `d` starting from the least
/// significant digit. Exceeding the digit sum leaves nothing.
pub fn degree_after_diff(d: u64, k: u64, p: u64) -> DegreeBound {
    if k > digit_sum(d, p) {
        return DegreeBound::IdenticallyZero;
    }
    let mut ds = digits(d, p);
    let mut left = k;
    for digit in ds.iter_mut() {
        let take = left.min(*digit);
        *digit -= take;
        left -= take;
        if left == 0 {
            break;
        }
    }
    DegreeBound::Degree(ds.iter().rev().fold(0u64, |acc, &x| acc * p + x))
}
