//! Big-integer number theory shared by the field and encryption layers.

use std::collections::HashMap;

use num_bigint::{BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};

/// Miller-Rabin rounds with random bases. 4^-41 < 2^-80.
const MR_ROUNDS: usize = 41;

const SMALL_PRIMES: [u32; 25] =
    [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97];

/// The first 13 primes as bases are a deterministic test below this bound
/// (Sorenson and Webster, 2015).
const DETERMINISTIC_LIMIT: u128 = 3_317_044_064_679_887_385_961_981;

/// Probabilistic primality test.
///
/// Exact for `n < 3.3 * 10^24`. Above that, 41 Miller-Rabin rounds with bases
/// drawn from a generator seeded by the SHA-256 of `n`, so the answer is
/// reproducible for a given input.
pub fn is_probable_prime(n: &BigUint) -> bool {
    let two = BigUint::from(2u32);
    if *n < two {
        return false;
    }
    for &p in SMALL_PRIMES.iter() {
        let p = BigUint::from(p);
        if *n == p {
            return true;
        }
        if (n % &p).is_zero() {
            return false;
        }
    }

    let n_minus_one = n - 1u32;
    let shift = n_minus_one.trailing_zeros().unwrap_or(0);
    let odd = &n_minus_one >> shift;

    let witness_passes = |a: &BigUint| -> bool {
        let mut x = a.modpow(&odd, n);
        if x.is_one() || x == n_minus_one {
            return true;
        }
        for _ in 1..shift {
            x = x.modpow(&two, n);
            if x == n_minus_one {
                return true;
            }
            if x.is_one() {
                return false;
            }
        }
        false
    };

    if n.to_u128().is_some_and(|v| v < DETERMINISTIC_LIMIT) {
        return SMALL_PRIMES[..13].iter().all(|&a| witness_passes(&BigUint::from(a)));
    }

    let seed: [u8; 32] = Sha256::digest(n.to_bytes_be()).into();
    let mut rng = ChaCha20Rng::from_seed(seed);
    let upper = n - 2u32;
    (0..MR_ROUNDS).all(|_| {
        let a = rng.gen_biguint_range(&two, &upper);
        witness_passes(&a)
    })
}

/// Uniform random prime with exactly `bits` bits (top bit set). `bits >= 2`.
pub fn random_prime<R: Rng + ?Sized>(bits: u64, rng: &mut R) -> BigUint {
    assert!(bits >= 2, "a prime needs at least two bits");
    loop {
        let mut candidate = rng.gen_biguint(bits);
        candidate.set_bit(bits - 1, true);
        if bits > 2 {
            candidate.set_bit(0, true);
        }
        if is_probable_prime(&candidate) {
            return candidate;
        }
    }
}

/// Modular inverse in a prime field via Fermat, `a^(p-2) mod p`.
/// Returns zero when `a` is zero mod `p`.
pub fn inverse_mod_prime(a: &BigUint, p: &BigUint) -> BigUint {
    a.modpow(&(p - 2u32), p)
}

/// Legendre symbol `(a / p)` for an odd prime `p`, as -1, 0 or 1.
pub fn legendre(a: &BigUint, p: &BigUint) -> i8 {
    let a = a % p;
    if a.is_zero() {
        return 0;
    }
    let e = (p - 1u32) >> 1;
    if a.modpow(&e, p).is_one() {
        1
    } else {
        -1
    }
}

/// Jacobi symbol `(a / n)` for odd `n`.
pub fn jacobi(a: &BigUint, n: &BigUint) -> i8 {
    assert!(n.is_odd(), "Jacobi symbol needs an odd modulus");
    let mut a = a % n;
    let mut n = n.clone();
    let mut result = 1i8;
    while !a.is_zero() {
        while a.is_even() {
            a >>= 1;
            let r = (&n % 8u32).to_u32().unwrap_or(0);
            if r == 3 || r == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if (&a % 4u32) == BigUint::from(3u32) && (&n % 4u32) == BigUint::from(3u32) {
            result = -result;
        }
        a %= &n;
    }
    if n.is_one() {
        result
    } else {
        0
    }
}

/// Baby-step giant-step: the smallest `m` in `[0, order)` with `base^m = target (mod modulus)`.
///
/// `base` must have multiplicative order dividing `order`. The step table holds
/// `ceil(sqrt(order))` entries, so callers keep `order` small enough to fit in memory.
pub fn discrete_log(base: &BigUint, target: &BigUint, order: u64, modulus: &BigUint) -> Option<u64> {
    if order == 0 {
        return None;
    }
    let step = (order as f64).sqrt().ceil() as u64;
    let step = step.max(1);

    let mut baby: HashMap<BigUint, u64> = HashMap::with_capacity(step as usize);
    let mut cur = BigUint::one() % modulus;
    for j in 0..step {
        baby.entry(cur.clone()).or_insert(j);
        cur = cur * base % modulus;
    }

    // base^(-step) = base^(order - step mod order)
    let back = (order - step % order) % order;
    let giant = base.modpow(&BigUint::from(back), modulus);
    let mut gamma = target % modulus;
    for i in 0..step {
        if let Some(&j) = baby.get(&gamma) {
            let m = i * step + j;
            if m < order {
                return Some(m);
            }
        }
        gamma = gamma * &giant % modulus;
    }
    None
}
