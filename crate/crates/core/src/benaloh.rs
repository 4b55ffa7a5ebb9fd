//! Probabilistic, additively homomorphic encryption over a composite modulus.
//!
//! A plaintext `m` in `Z_r` encrypts to `x^r * y^m mod N` for a fresh random
//! `x` coprime to `N`. Multiplying ciphertexts adds plaintexts mod `r`, and
//! raising a ciphertext to `k` multiplies its plaintext by `k`.
//!
//! The private key is the factorisation `N = p * q` with `r | p - 1`. For odd
//! `r` we also require `gcd(r, (p - 1) / r) = 1` and `gcd(r, q - 1) = 1`, and
//! `y` is chosen so that `y^(phi(N)/r) != 1 mod N`. For `r = 2` the base is a
//! quadratic non-residue modulo both primes, which gives Jacobi symbol `+1`.

use std::fmt;

use num_bigint::{BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use thiserror::Error;

use crate::arith;

/// Largest plaintext order for which [`decrypt`] builds a step table.
pub const MAX_DECRYPT_ORDER: u64 = 1 << 40;

const WITNESS_DRAWS: usize = 128;
const BASE_DRAWS: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncError {
    #[error("plaintext order {0} is not prime")]
    OrderNotPrime(BigUint),
    #[error("no suitable key parameters found within the attempt bound")]
    ParameterSearchFailed,
    #[error("message {message} is outside [0, {order})")]
    MessageOutOfRange { message: BigUint, order: BigUint },
    #[error("value is not a ciphertext under this key")]
    NotAValidCiphertext,
    #[error("invalid public key: {0}")]
    InvalidPublicKey(&'static str),
    #[error("invalid private key: {0}")]
    InvalidPrivateKey(&'static str),
    #[error("could not draw a unit modulo N")]
    WitnessSamplingFailed,
    #[error("plaintext order too large to decrypt by table lookup")]
    OrderTooLarge,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EncPublicKey {
    modulus: BigUint,
    base: BigUint,
    order: BigUint,
}

/// `p` is the factor with `r | p - 1`.
#[derive(Clone, PartialEq, Eq)]
pub struct EncPrivateKey {
    p: BigUint,
    q: BigUint,
}

impl fmt::Debug for EncPrivateKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("EncPrivateKey(..)")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Ciphertext(BigUint);

/// The randomness `x` used for one encryption.
#[derive(Clone, PartialEq, Eq)]
pub struct EncryptionWitness(BigUint);

impl fmt::Debug for EncryptionWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("EncryptionWitness(..)")
    }
}

impl EncPublicKey {
    /// Validates the publicly checkable parts of a key.
    pub fn new(modulus: BigUint, base: BigUint, order: BigUint) -> Result<Self, EncError> {
        if !arith::is_probable_prime(&order) {
            return Err(EncError::OrderNotPrime(order));
        }
        if modulus < BigUint::from(6u32) || modulus.is_even() {
            return Err(EncError::InvalidPublicKey("modulus must be an odd composite"));
        }
        if base.is_zero() || base >= modulus {
            return Err(EncError::InvalidPublicKey("base must lie in [1, N)"));
        }
        if !base.gcd(&modulus).is_one() {
            return Err(EncError::InvalidPublicKey("base shares a factor with N"));
        }
        Ok(Self { modulus, base, order })
    }

    /// N
    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    /// y
    pub fn base(&self) -> &BigUint {
        &self.base
    }

    /// r, the plaintext-space order.
    pub fn order(&self) -> &BigUint {
        &self.order
    }

    /// Wraps a raw group element, checking it is a unit mod `N`.
    pub fn ciphertext(&self, c: BigUint) -> Result<Ciphertext, EncError> {
        if c.is_zero() || c >= self.modulus || !c.gcd(&self.modulus).is_one() {
            return Err(EncError::NotAValidCiphertext);
        }
        Ok(Ciphertext(c))
    }

    pub fn witness(&self, x: BigUint) -> Result<EncryptionWitness, EncError> {
        if x.is_zero() || x >= self.modulus || !x.gcd(&self.modulus).is_one() {
            return Err(EncError::WitnessSamplingFailed);
        }
        Ok(EncryptionWitness(x))
    }

    /// Uniform unit mod `N` by rejection.
    pub fn random_unit<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<BigUint, EncError> {
        let one = BigUint::one();
        for _ in 0..WITNESS_DRAWS {
            let x = rng.gen_biguint_range(&one, &self.modulus);
            if x.gcd(&self.modulus).is_one() {
                return Ok(x);
            }
        }
        Err(EncError::WitnessSamplingFailed)
    }
}

impl EncPrivateKey {
    /// Checks the factorisation against `pk`. The factor with `r | p - 1` may
    /// be passed in either position.
    pub fn new(p: BigUint, q: BigUint, pk: &EncPublicKey) -> Result<Self, EncError> {
        let r = pk.order();
        let (p, q) = if ((&p - 1u32) % r).is_zero() { (p, q) } else { (q, p) };
        if p == q {
            return Err(EncError::InvalidPrivateKey("factors must be distinct"));
        }
        if &p * &q != *pk.modulus() {
            return Err(EncError::InvalidPrivateKey("factors do not multiply to N"));
        }
        if !arith::is_probable_prime(&p) || !arith::is_probable_prime(&q) {
            return Err(EncError::InvalidPrivateKey("factors must be prime"));
        }
        if !satisfies_prime_conditions(r, &p, &q) {
            return Err(EncError::InvalidPrivateKey("factors violate the order conditions"));
        }
        if !base_is_admissible(pk.base(), r, &p, &q) {
            return Err(EncError::InvalidPrivateKey("base does not generate the residue classes"));
        }
        Ok(Self { p, q })
    }

    pub fn factors(&self) -> (&BigUint, &BigUint) {
        (&self.p, &self.q)
    }

    pub fn phi(&self) -> BigUint {
        (&self.p - 1u32) * (&self.q - 1u32)
    }

    pub(crate) fn wipe(&mut self) {
        self.p.set_zero();
        self.q.set_zero();
    }
}

impl Ciphertext {
    pub fn value(&self) -> &BigUint {
        &self.0
    }
}

impl EncryptionWitness {
    pub fn value(&self) -> &BigUint {
        &self.0
    }

    pub(crate) fn wipe(&mut self) {
        self.0.set_zero();
    }
}

/// `r | p - 1`; for odd `r` also `r` coprime to `(p - 1)/r` and to `q - 1`;
/// for `r = 2`, `(p - 1)/2` odd. Always `gcd(N, phi(N)) = 1`.
fn satisfies_prime_conditions(r: &BigUint, p: &BigUint, q: &BigUint) -> bool {
    let p1 = p - 1u32;
    let q1 = q - 1u32;
    if !(&p1 % r).is_zero() {
        return false;
    }
    let cofactor = &p1 / r;
    if (&cofactor % r).is_zero() {
        return false;
    }
    if *r != BigUint::from(2u32) && (&q1 % r).is_zero() {
        return false;
    }
    !(&q1 % p).is_zero() && !(&p1 % q).is_zero()
}

fn base_is_admissible(y: &BigUint, r: &BigUint, p: &BigUint, q: &BigUint) -> bool {
    let n = p * q;
    if y.is_zero() || !y.gcd(&n).is_one() {
        return false;
    }
    if *r == BigUint::from(2u32) {
        arith::legendre(y, p) == -1 && arith::legendre(y, q) == -1
    } else {
        let phi = (p - 1u32) * (q - 1u32);
        !y.modpow(&(phi / r), &n).is_one()
    }
}

/// Prime width used when no key size is requested: 32 bits above the order,
/// and never below 64.
pub fn default_key_bits(order: &BigUint) -> u64 {
    (order.bits() + 32).max(64)
}

/// Random key pair with `bits`-bit primes and plaintext order `r`.
pub fn keygen<R: Rng + ?Sized>(r: &BigUint, bits: u64, rng: &mut R) -> Result<(EncPublicKey, EncPrivateKey), EncError> {
    if !arith::is_probable_prime(r) {
        return Err(EncError::OrderNotPrime(r.clone()));
    }
    if bits < 3 || bits <= r.bits() + 1 {
        return Err(EncError::ParameterSearchFailed);
    }
    let attempts = 64 * bits as usize + 1024;

    // p = r*m + 1 with exactly `bits` bits and r not dividing m.
    let low = BigUint::one() << (bits - 1);
    let high = (BigUint::one() << bits) - 1u32;
    let m_low = (&low - 1u32).div_ceil(r);
    let m_high = (&high - 1u32) / r;
    if m_low > m_high {
        return Err(EncError::ParameterSearchFailed);
    }
    let two = BigUint::from(2u32);
    let mut p = None;
    for _ in 0..attempts {
        let m = rng.gen_biguint_range(&m_low, &(&m_high + 1u32));
        if (&m % r).is_zero() {
            continue;
        }
        let candidate = r * &m + 1u32;
        if candidate.is_even() || candidate < low || candidate > high {
            continue;
        }
        if *r == two && m.is_even() {
            continue;
        }
        if arith::is_probable_prime(&candidate) {
            p = Some(candidate);
            break;
        }
    }
    let p = p.ok_or(EncError::ParameterSearchFailed)?;

    let mut q = None;
    for _ in 0..attempts {
        let mut candidate = rng.gen_biguint(bits);
        candidate.set_bit(bits - 1, true);
        candidate.set_bit(0, true);
        if candidate == p || !satisfies_prime_conditions(r, &p, &candidate) {
            continue;
        }
        if arith::is_probable_prime(&candidate) {
            q = Some(candidate);
            break;
        }
    }
    let q = q.ok_or(EncError::ParameterSearchFailed)?;

    let n = &p * &q;
    let one = BigUint::one();
    for _ in 0..BASE_DRAWS {
        let y = rng.gen_biguint_range(&one, &n);
        if base_is_admissible(&y, r, &p, &q) {
            let pk = EncPublicKey::new(n, y, r.clone())?;
            return Ok((pk, EncPrivateKey { p, q }));
        }
    }
    Err(EncError::ParameterSearchFailed)
}

/// Deterministic smallest key for order `r`: the least prime `p = r*m + 1`,
/// then the least odd prime `q`, then the least base `y >= 2`, each meeting
/// the key conditions. Only meant for desk-scale test profiles.
pub fn smallest_keypair(r: &BigUint) -> Result<(EncPublicKey, EncPrivateKey), EncError> {
    if !arith::is_probable_prime(r) {
        return Err(EncError::OrderNotPrime(r.clone()));
    }
    const LIMIT: u32 = 1 << 20;
    let two = BigUint::from(2u32);

    let p = (1..LIMIT)
        .map(BigUint::from)
        .filter(|m| !(m % r).is_zero() && !(*r == two && m.is_even()))
        .map(|m| r * m + 1u32)
        .find(|c| c.is_odd() && arith::is_probable_prime(c))
        .ok_or(EncError::ParameterSearchFailed)?;

    let q = (3..LIMIT)
        .step_by(2)
        .map(BigUint::from)
        .find(|c| *c != p && arith::is_probable_prime(c) && satisfies_prime_conditions(r, &p, c))
        .ok_or(EncError::ParameterSearchFailed)?;

    let n = &p * &q;
    let mut y = two;
    while y < n {
        if base_is_admissible(&y, r, &p, &q) {
            let pk = EncPublicKey::new(n, y, r.clone())?;
            return Ok((pk, EncPrivateKey { p, q }));
        }
        y += 1u32;
    }
    Err(EncError::ParameterSearchFailed)
}

fn check_message(pk: &EncPublicKey, m: &BigUint) -> Result<(), EncError> {
    if m >= pk.order() {
        return Err(EncError::MessageOutOfRange { message: m.clone(), order: pk.order().clone() });
    }
    Ok(())
}

/// `x^r * y^m mod N` for a given witness `x`.
pub fn encrypt_with(pk: &EncPublicKey, m: &BigUint, witness: &EncryptionWitness) -> Result<Ciphertext, EncError> {
    check_message(pk, m)?;
    let n = pk.modulus();
    let c = witness.0.modpow(pk.order(), n) * pk.base().modpow(m, n) % n;
    Ok(Ciphertext(c))
}

/// Encrypts `m` under fresh randomness and returns the witness alongside.
pub fn encrypt<R: Rng + ?Sized>(
    pk: &EncPublicKey,
    m: &BigUint,
    rng: &mut R,
) -> Result<(Ciphertext, EncryptionWitness), EncError> {
    check_message(pk, m)?;
    let witness = EncryptionWitness(pk.random_unit(rng)?);
    let c = encrypt_with(pk, m, &witness)?;
    Ok((c, witness))
}

/// Recovers `m` by a discrete log in the order-`r` subgroup mod `p`.
///
/// `c^((p-1)/r) = z^m (mod p)` with `z = y^((p-1)/r)`. For odd `r` this is
/// equivalent to `c^(phi/r) = (y^(phi/r))^m (mod N)`.
pub fn decrypt(sk: &EncPrivateKey, pk: &EncPublicKey, c: &Ciphertext) -> Result<BigUint, EncError> {
    let order = pk.order().to_u64().filter(|r| *r <= MAX_DECRYPT_ORDER).ok_or(EncError::OrderTooLarge)?;
    if c.0.is_zero() || !c.0.gcd(pk.modulus()).is_one() {
        return Err(EncError::NotAValidCiphertext);
    }
    let p = &sk.p;
    let e = (p - 1u32) / pk.order();
    let z = pk.base().modpow(&e, p);
    let w = c.0.modpow(&e, p);
    arith::discrete_log(&z, &w, order, p).map(BigUint::from).ok_or(EncError::NotAValidCiphertext)
}

/// Ciphertext product; encrypts the plaintext sum mod `r`.
pub fn hom_add(pk: &EncPublicKey, c1: &Ciphertext, c2: &Ciphertext) -> Ciphertext {
    Ciphertext(&c1.0 * &c2.0 % pk.modulus())
}

/// `c^k mod N`; encrypts `k * m mod r`. `k` may be arbitrarily large.
pub fn hom_scale(pk: &EncPublicKey, c: &Ciphertext, k: &BigUint) -> Ciphertext {
    Ciphertext(c.0.modpow(k, pk.modulus()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    fn toy5() -> (EncPublicKey, EncPrivateKey) {
        smallest_keypair(&big(5)).unwrap()
    }

    #[test]
    fn smallest_keys_match_hand_search() {
        let (pk, sk) = toy5();
        assert_eq!((pk.modulus(), pk.base(), pk.order()), (&big(33), &big(2), &big(5)));
        assert_eq!(sk.factors(), (&big(11), &big(3)));

        let (pk, sk) = smallest_keypair(&big(17)).unwrap();
        assert_eq!((pk.modulus(), pk.base()), (&big(515), &big(2)));
        assert_eq!(sk.factors(), (&big(103), &big(5)));
        assert_eq!(big(2).modpow(&big(24), &big(515)), big(61));
    }

    #[test]
    fn order_two_uses_quadratic_non_residues() {
        let (pk, sk) = smallest_keypair(&big(2)).unwrap();
        let (p, q) = sk.factors();
        assert_eq!(arith::legendre(pk.base(), p), -1);
        assert_eq!(arith::legendre(pk.base(), q), -1);
        assert_eq!(arith::jacobi(pk.base(), pk.modulus()), 1);

        let mut rng = ChaCha20Rng::seed_from_u64(21);
        let (pk, sk) = keygen(&big(2), 48, &mut rng).unwrap();
        let (p, q) = sk.factors();
        assert_eq!(arith::legendre(pk.base(), p), -1);
        assert_eq!(arith::legendre(pk.base(), q), -1);
        assert_eq!(arith::jacobi(pk.base(), pk.modulus()), 1);
        for m in 0..2u64 {
            for _ in 0..20 {
                let (c, _) = encrypt(&pk, &big(m), &mut rng).unwrap();
                assert_eq!(decrypt(&sk, &pk, &c).unwrap(), big(m));
            }
        }
    }

    #[test]
    fn keygen_produces_valid_keys() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        for r in [3u64, 17, 65537] {
            let (pk, sk) = keygen(&big(r), 64, &mut rng).unwrap();
            let (p, q) = sk.factors();
            assert_eq!(p.bits(), 64);
            assert_eq!(q.bits(), 64);
            // Re-validating through the checked constructor exercises every invariant.
            let again = EncPrivateKey::new(p.clone(), q.clone(), &pk).unwrap();
            assert_eq!(again, sk);
        }
        assert_eq!(keygen(&big(15), 64, &mut rng), Err(EncError::OrderNotPrime(big(15))));
        assert_eq!(keygen(&big(65537), 17, &mut rng), Err(EncError::ParameterSearchFailed));
    }

    #[test]
    fn encrypt_examples() {
        let (pk, sk) = toy5();
        let c = encrypt_with(&pk, &big(3), &pk.witness(big(2)).unwrap()).unwrap();
        assert_eq!(c.value(), &big(25));
        let one = encrypt_with(&pk, &big(0), &pk.witness(big(1)).unwrap()).unwrap();
        assert_eq!(one.value(), &big(1));
        assert!(matches!(
            encrypt_with(&pk, &big(5), &pk.witness(big(2)).unwrap()),
            Err(EncError::MessageOutOfRange { .. })
        ));

        assert_eq!(decrypt(&sk, &pk, &c).unwrap(), big(3));
        assert_eq!(decrypt(&sk, &pk, &one).unwrap(), big(0));
    }

    #[test]
    fn homomorphic_examples() {
        let (pk, sk) = toy5();
        let c1 = encrypt_with(&pk, &big(1), &pk.witness(big(2)).unwrap()).unwrap();
        let c2 = encrypt_with(&pk, &big(2), &pk.witness(big(4)).unwrap()).unwrap();
        assert_eq!(c1.value(), &big(31));
        assert_eq!(c2.value(), &big(4));
        let sum = hom_add(&pk, &c1, &c2);
        assert_eq!(sum.value(), &big(25));
        assert_eq!(decrypt(&sk, &pk, &sum).unwrap(), big(3));
        assert_eq!(hom_add(&pk, &c2, &c1), sum);

        let identity = pk.ciphertext(big(1)).unwrap();
        assert_eq!(hom_add(&pk, &c1, &identity), c1);

        assert_eq!(hom_scale(&pk, &c2, &big(1)), c2);
        assert_eq!(hom_scale(&pk, &c2, &big(0)).value(), &big(1));
        let tripled = hom_scale(&pk, &c2, &big(3));
        assert_eq!(tripled.value(), &big(31));
        assert_eq!(decrypt(&sk, &pk, &tripled).unwrap(), big(1));
    }

    #[test]
    fn decrypt_matches_full_modulus_relation() {
        let (pk, sk) = smallest_keypair(&big(17)).unwrap();
        let e = sk.phi() / pk.order();
        let g = pk.base().modpow(&e, pk.modulus());
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        for m in 0..17u64 {
            let (c, _) = encrypt(&pk, &big(m), &mut rng).unwrap();
            let lhs = c.value().modpow(&e, pk.modulus());
            assert_eq!(lhs, g.modpow(&big(m), pk.modulus()));
            assert_eq!(decrypt(&sk, &pk, &c).unwrap(), big(m));
        }
    }

    #[test]
    fn validation() {
        let (pk, _) = toy5();
        assert_eq!(pk.ciphertext(big(0)), Err(EncError::NotAValidCiphertext));
        assert_eq!(pk.ciphertext(big(11)), Err(EncError::NotAValidCiphertext));
        assert_eq!(pk.ciphertext(big(33)), Err(EncError::NotAValidCiphertext));
        assert!(EncPublicKey::new(big(33), big(3), big(5)).is_err());
        assert!(EncPublicKey::new(big(33), big(2), big(4)).is_err());
        assert!(EncPrivateKey::new(big(3), big(11), &pk).is_ok());
        assert!(EncPrivateKey::new(big(3), big(13), &pk).is_err());
        let bad = EncPublicKey::new(big(33), big(1), big(5)).unwrap();
        assert!(EncPrivateKey::new(big(11), big(3), &bad).is_err());
    }

    #[test]
    fn large_order_is_not_table_decryptable() {
        let m127 = (BigUint::one() << 127) - 1u32;
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let (pk, sk) = keygen(&m127, 160, &mut rng).unwrap();
        let (c, _) = encrypt(&pk, &big(9), &mut rng).unwrap();
        assert_eq!(decrypt(&sk, &pk, &c), Err(EncError::OrderTooLarge));
    }
}
