//! Integer helpers: primality, factoring of small-to-medium integers, and
//! multiplicative orders modulo prime powers.

use num_bigint::{BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

const SMALL_PRIMES: [u32; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Miller-Rabin with the first twelve prime bases, which is deterministic
/// below 3.3 * 10^24 (so in particular for every 64-bit input). Larger inputs
/// get 64 additional random bases, for an error bound below 2^-128.
pub fn is_probable_prime(n: &BigUint) -> bool {
    let two = BigUint::from(2u32);
    if *n < two {
        return false;
    }
    for &q in SMALL_PRIMES.iter() {
        let q = BigUint::from(q);
        if *n == q {
            return true;
        }
        if (n % &q).is_zero() {
            return false;
        }
    }
    let n_minus_one = n - 1u32;
    let s = n_minus_one.trailing_zeros().unwrap_or(0);
    let d = &n_minus_one >> s;

    let witness = |a: &BigUint| -> bool {
        let mut x = a.modpow(&d, n);
        if x.is_one() || x == n_minus_one {
            return true;
        }
        for _ in 1..s {
            x = &x * &x % n;
            if x == n_minus_one {
                return true;
            }
        }
        false
    };

    if !SMALL_PRIMES.iter().all(|&a| witness(&BigUint::from(a))) {
        return false;
    }
    if n.bits() <= 64 {
        return true;
    }
    let mut rng = rand::thread_rng();
    (0..64).all(|_| {
        let a = rng.gen_biguint_range(&two, &n_minus_one);
        witness(&a)
    })
}

/// Distinct prime factors of `n`, ascending. Trial division first, then
/// Pollard-Brent rho on what remains. Returns `None` if a composite cofactor
/// resists the iteration budget.
pub fn prime_factors(n: &BigUint) -> Option<Vec<BigUint>> {
    let mut out = Vec::new();
    let mut rest = n.clone();
    if rest.is_zero() {
        return None;
    }
    let mut q = 2u32;
    while q < 10_000 && !rest.is_one() {
        let qb = BigUint::from(q);
        if (&rest % &qb).is_zero() {
            out.push(qb.clone());
            while (&rest % &qb).is_zero() {
                rest /= &qb;
            }
        }
        q += if q == 2 { 1 } else { 2 };
    }
    let mut stack = vec![rest];
    while let Some(c) = stack.pop() {
        if c.is_one() {
            continue;
        }
        if is_probable_prime(&c) {
            out.push(c);
            continue;
        }
        let d = pollard_brent(&c)?;
        let e = &c / &d;
        stack.push(d);
        stack.push(e);
    }
    out.sort();
    out.dedup();
    Some(out)
}

fn pollard_brent(n: &BigUint) -> Option<BigUint> {
    if n.is_even() {
        return Some(BigUint::from(2u32));
    }
    for c in 1u32..64 {
        let c = BigUint::from(c);
        let f = |x: &BigUint| (x * x + &c) % n;
        let mut y = BigUint::from(2u32);
        let mut r: u64 = 1;
        let mut q = BigUint::one();
        let mut g = BigUint::one();
        let mut x = y.clone();
        let mut ys = y.clone();
        let batch = 128u64;
        let mut iterations = 0u64;
        while g.is_one() {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0u64;
            while k < r && g.is_one() {
                ys = y.clone();
                for _ in 0..batch.min(r - k) {
                    y = f(&y);
                    let diff = if x > y { &x - &y } else { &y - &x };
                    q = q * diff % n;
                }
                g = q.gcd(n);
                k += batch;
            }
            r *= 2;
            iterations += r;
            if iterations > 1 << 24 {
                break;
            }
        }
        if g == *n {
            loop {
                ys = f(&ys);
                let diff = if x > ys { &x - &ys } else { &ys - &x };
                g = diff.gcd(n);
                if !g.is_one() {
                    break;
                }
            }
        }
        if !g.is_one() && g != *n {
            return Some(g);
        }
    }
    None
}

/// Multiplicative order of `x` modulo `p^k`, for prime `p` and `gcd(x, p) = 1`.
/// Returns `None` when `x` is not a unit or `p - 1` cannot be factored.
pub fn multiplicative_order(x: &BigUint, p: &BigUint, k: u32) -> Option<BigUint> {
    let modulus = p.pow(k);
    let x = x % &modulus;
    if (&x % p).is_zero() {
        return None;
    }
    // |(Z/p^k)^*| = p^(k-1) (p - 1)
    let mut factors = prime_factors(&(p - 1u32))?;
    if k > 1 && !factors.contains(p) {
        factors.push(p.clone());
    }
    let mut order = p.pow(k - 1) * (p - 1u32);
    for q in factors {
        while (&order % &q).is_zero() {
            let candidate = &order / &q;
            if x.modpow(&candidate, &modulus).is_one() {
                order = candidate;
            } else {
                break;
            }
        }
    }
    Some(order)
}

/// True when `y` has multiplicative order exactly `p - 1` modulo `p`.
pub fn is_primitive_root(y: &BigUint, p: &BigUint) -> Option<bool> {
    let y = y % p;
    if y.is_zero() {
        return Some(false);
    }
    let order = multiplicative_order(&y, p, 1)?;
    Some(order == p - 1u32)
}

/// Number of bits needed to write every value in `[0, bound)`.
pub fn width_bits(bound: &BigUint) -> usize {
    if bound <= &BigUint::one() {
        0
    } else {
        (bound - 1u32).bits() as usize
    }
}

/// Number of bytes needed to write every value in `[0, bound)`, at least one.
pub fn width_bytes(bound: &BigUint) -> usize {
    width_bits(bound).div_ceil(8).max(1)
}

/// p-adic valuation of `v` capped at `cap` (returns `cap` for zero).
pub fn valuation(v: &BigUint, p: &BigUint, cap: u32) -> u32 {
    let mut v = v.clone();
    let mut e = 0;
    while e < cap && !v.is_zero() && (&v % p).is_zero() {
        v /= p;
        e += 1;
    }
    if v.is_zero() {
        cap
    } else {
        e
    }
}

/// Small helper for converting counts that are known to be tiny.
pub(crate) fn to_u64_saturating(v: &BigUint) -> u64 {
    v.to_u64().unwrap_or(u64::MAX)
}
