//! Small integer helpers shared by the kernels.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// `(g, u, v)` with `u*a + v*b = g = gcd(a, b) >= 0`.
pub fn xgcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let e = a.extended_gcd(b);
    if e.gcd.is_negative() {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}

/// Residue in `[0, n)`.
pub fn nonneg_mod(a: &BigInt, n: &BigInt) -> BigInt {
    a.mod_floor(n)
}

/// Residue in `(-n/2, n/2]`.
pub fn sym_mod(a: &BigInt, n: &BigInt) -> BigInt {
    let r = a.mod_floor(n);
    if &r * 2 > *n {
        r - n
    } else {
        r
    }
}

/// Nearest integer with ties going down, so `q - round(q)` lies in `(-1/2, 1/2]`.
pub fn round_centered(q: &BigRational) -> BigInt {
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    (q - half).ceil().to_integer()
}

pub fn floor_rat(q: &BigRational) -> BigInt {
    q.floor().to_integer()
}

pub fn gcd_all<'a, I: IntoIterator<Item = &'a BigInt>>(it: I) -> BigInt {
    let mut g = BigInt::zero();
    for x in it {
        g = g.gcd(x);
        if g.is_one() {
            break;
        }
    }
    g
}

pub fn lcm(a: &BigInt, b: &BigInt) -> BigInt {
    a.lcm(b)
}

/// Smallest integer `s` with `s*s >= x`, for `x >= 0`.
pub fn isqrt_ceil(x: &BigInt) -> BigInt {
    if x.sign() != Sign::Plus {
        return BigInt::zero();
    }
    let s = x.sqrt();
    if &s * &s == *x {
        s
    } else {
        s + 1
    }
}

const LOG_FRAC_BITS: u32 = 16;

/// Dyadic upper approximation of `log2 |x|` with denominator `2^16`.
/// Returns zero for `|x| <= 1`.
pub fn log2_upper(x: &BigInt) -> BigRational {
    let a = x.abs();
    if a <= BigInt::one() {
        return BigRational::zero();
    }
    let bits = a.bits();
    // keep the top 53 bits; the discarded tail only makes the value smaller
    let shift = bits.saturating_sub(53);
    let top = (&a >> shift).to_f64().unwrap_or(f64::MAX);
    let approx = top.log2() + shift as f64;
    let scale = (1u64 << LOG_FRAC_BITS) as f64;
    // two ulps of slack in the scaled value absorb the f64 rounding of log2
    let num = (approx * scale).ceil() as i64 + 2;
    BigRational::new(BigInt::from(num), BigInt::from(1u64 << LOG_FRAC_BITS))
}

/// Dyadic upper approximation of `log2 q` for a positive rational.
pub fn log2_upper_rat(q: &BigRational) -> BigRational {
    let lower_den = log2_lower(q.denom());
    log2_upper(q.numer()) - lower_den
}

/// Dyadic lower approximation of `log2 |x|` (zero for `|x| <= 1`).
pub fn log2_lower(x: &BigInt) -> BigRational {
    let a = x.abs();
    if a <= BigInt::one() {
        return BigRational::zero();
    }
    let bits = a.bits();
    let shift = bits.saturating_sub(53);
    let top = (&a >> shift).to_f64().unwrap_or(f64::MAX);
    let approx = top.log2() + shift as f64;
    let scale = (1u64 << LOG_FRAC_BITS) as f64;
    let num = ((approx * scale).floor() as i64 - 2).max(0);
    BigRational::new(BigInt::from(num), BigInt::from(1u64 << LOG_FRAC_BITS))
}

/// Rational reconstruction of `a mod m` as `r/s` with `|r| <= nb`, `0 < s <= db`.
/// Requires `2 * nb * db < m` for uniqueness.
pub fn rational_reconstruction(
    a: &BigInt,
    m: &BigInt,
    nb: &BigInt,
    db: &BigInt,
) -> Option<BigRational> {
    let a = a.mod_floor(m);
    if a.is_zero() {
        return Some(BigRational::zero());
    }
    let (mut r0, mut r1) = (m.clone(), a);
    let (mut s0, mut s1) = (BigInt::zero(), BigInt::one());
    while &r1 > nb {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let s2 = &s0 - &q * &s1;
        r0 = std::mem::replace(&mut r1, r2);
        s0 = std::mem::replace(&mut s1, s2);
    }
    if s1.is_zero() || s1.abs() > *db {
        return None;
    }
    if !r1.gcd(&s1).is_one() {
        return None;
    }
    Some(BigRational::new(r1, s1))
}

pub fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    r
}

/// Inverse modulo a prime `p`; `a` must be nonzero mod `p`.
pub fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

/// Reduce a big integer into `[0, p)`.
pub fn to_residue(a: &BigInt, p: u64) -> u64 {
    a.mod_floor(&BigInt::from(p)).to_u64().expect("residue fits")
}

/// Reduce a rational whose denominator is prime to `p`.
pub fn rat_to_residue(q: &BigRational, p: u64) -> Option<u64> {
    let d = to_residue(q.denom(), p);
    if d == 0 {
        return None;
    }
    Some(mul_mod(to_residue(q.numer(), p), inv_mod(d, p), p))
}

/// Incremental prime generator backed by a doubling sieve of Eratosthenes.
#[derive(Debug, Clone)]
pub struct PrimeSieve {
    limit: u64,
    primes: Vec<u64>,
}

impl Default for PrimeSieve {
    fn default() -> Self {
        Self::new()
    }
}

impl PrimeSieve {
    pub fn new() -> Self {
        let mut s = PrimeSieve {
            limit: 0,
            primes: Vec::new(),
        };
        s.extend_to(1 << 12);
        s
    }

    fn extend_to(&mut self, limit: u64) {
        let n = limit as usize + 1;
        let mut comp = vec![false; n];
        let mut i = 2usize;
        while i * i < n {
            if !comp[i] {
                let mut j = i * i;
                while j < n {
                    comp[j] = true;
                    j += i;
                }
            }
            i += 1;
        }
        self.primes = (2..n).filter(|&k| !comp[k]).map(|k| k as u64).collect();
        self.limit = limit;
    }

    /// The `k`-th prime (0-based).
    pub fn nth(&mut self, k: usize) -> u64 {
        while self.primes.len() <= k {
            let l = self.limit * 2;
            self.extend_to(l);
        }
        self.primes[k]
    }

    /// Primes in increasing order starting from the smallest one `>= start`.
    pub fn from(&mut self, start: u64) -> impl Iterator<Item = u64> + '_ {
        let mut k = 0;
        std::iter::from_fn(move || loop {
            let p = self.nth(k);
            k += 1;
            if p >= start {
                return Some(p);
            }
        })
    }
}

pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: BigInt) -> BigRational {
    BigRational::from_integer(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sym_mod_range() {
        let n = BigInt::from(15);
        assert_eq!(sym_mod(&BigInt::from(11), &n), BigInt::from(-4));
        assert_eq!(sym_mod(&BigInt::from(7), &n), BigInt::from(7));
        let n = BigInt::from(4);
        assert_eq!(sym_mod(&BigInt::from(2), &n), BigInt::from(2));
    }

    #[test]
    fn centered_rounding_ties_down() {
        assert_eq!(round_centered(&rat(3, 2)), BigInt::from(1));
        assert_eq!(round_centered(&rat(-3, 2)), BigInt::from(-2));
        assert_eq!(round_centered(&rat(7, 5)), BigInt::from(1));
    }

    #[test]
    fn log2_bounds_bracket() {
        for x in [2i64, 3, 1000, 1 << 40, 123456789] {
            let up = log2_upper(&BigInt::from(x));
            let lo = log2_lower(&BigInt::from(x));
            let t = (x as f64).log2();
            assert!(up.to_f64().unwrap() >= t);
            assert!(lo.to_f64().unwrap() <= t);
        }
        let big = BigInt::from(3).pow(500u32);
        let up = log2_upper(&big).to_f64().unwrap();
        assert!(up >= 500.0 * 3f64.log2() && up < 500.0 * 3f64.log2() + 0.01);
    }

    #[test]
    fn reconstruction_recovers_fraction() {
        let m = BigInt::from(1_000_003i64);
        let inv3 = BigInt::from(3).modpow(&(&m - 2), &m);
        let a = (BigInt::from(-7) * inv3).mod_floor(&m);
        let b = BigInt::from(500);
        assert_eq!(rational_reconstruction(&a, &m, &b, &b), Some(rat(-7, 3)));
    }

    #[test]
    fn sieve_lists_primes() {
        let mut s = PrimeSieve::new();
        let v: Vec<u64> = s.from(0).take(6).collect();
        assert_eq!(v, vec![2, 3, 5, 7, 11, 13]);
        assert_eq!(s.nth(1000), 7927);
        assert!(s.from(65530).next() == Some(65537));
    }
}
