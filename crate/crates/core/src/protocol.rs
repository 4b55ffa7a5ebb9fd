//! The two protocol phases.
//!
//! Dealing samples a polynomial with the secret as constant term, hands each
//! shareholder `(i, f(i))`, publishes encryptions `C_j = E(a_j)` of every
//! coefficient, and records share and secret digests in a [`HashRegistry`].
//!
//! A fresh encryption of `f(i)` never equals the homomorphic combination
//! `prod_j C_j^(i^j)` because the randomness differs. The dealer knows every
//! witness `x_j`, so it sends shareholder `i` a hint
//! `X_i = y^k_i * prod_j x_j^(i^j) mod N`, where `k_i` is the integer quotient
//! `(sum_j a_j i^j - f(i)) / P`. With `r = P` the honest share then satisfies
//!
//! ```text
//! X_i^r * y^f(i) = prod_j C_j^(i^j)   (mod N)
//! ```
//!
//! Reconstruction uses public data only: the broadcast and the registry.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigUint;
use num_traits::One;
use rand::Rng;
use thiserror::Error;

use crate::benaloh::{self, Ciphertext, EncError, EncPrivateKey, EncPublicKey, EncryptionWitness};
use crate::field::{self, FieldElement, FieldError, FieldParams, Polynomial, Share};
use crate::registry::{self, HashRegistry, RegistryError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProtocolError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Encryption(#[from] EncError),
    #[error(transparent)]
    Registry(#[from] RegistryError),
    #[error("plaintext order {order} of the encryption key differs from the field prime {prime}")]
    OrderMismatch { order: BigUint, prime: BigUint },
    #[error("malformed broadcast: {0}")]
    MalformedBroadcast(&'static str),
    #[error("shareholders {rejected:?} did not accept their shares")]
    NotAllAccepted { rejected: Vec<u64> },
    #[error("dealer state has been discarded")]
    DiscardedState,
}

/// Public parameters of one deal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DealParams {
    threshold: usize,
    shares: usize,
    field: FieldParams,
    pk: EncPublicKey,
}

impl DealParams {
    /// Requires `1 <= t <= n < P` and the key's plaintext order equal to `P`.
    pub fn new(threshold: usize, shares: usize, field: FieldParams, pk: EncPublicKey) -> Result<Self, ProtocolError> {
        if threshold < 1 {
            return Err(FieldError::InvalidThreshold.into());
        }
        if threshold > shares {
            return Err(FieldError::ThresholdExceedsN { threshold, shares }.into());
        }
        if BigUint::from(shares) >= *field.prime() {
            return Err(FieldError::TooManyShareholders { shares }.into());
        }
        if pk.order() != field.prime() {
            return Err(ProtocolError::OrderMismatch { order: pk.order().clone(), prime: field.prime().clone() });
        }
        Ok(Self { threshold, shares, field, pk })
    }

    pub fn threshold(&self) -> usize {
        self.threshold
    }

    pub fn shares(&self) -> usize {
        self.shares
    }

    pub fn field(&self) -> &FieldParams {
        &self.field
    }

    pub fn public_key(&self) -> &EncPublicKey {
        &self.pk
    }

    pub fn digest(&self) -> registry::Digest {
        registry::digest_params(&self.field, self.threshold, self.shares, &self.pk)
    }
}

/// `C_j = E(a_j)` for `j = 0..t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoefficientCommitments(Vec<Ciphertext>);

impl CoefficientCommitments {
    pub fn new(commitments: Vec<Ciphertext>) -> Self {
        Self(commitments)
    }

    pub fn as_slice(&self) -> &[Ciphertext] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// What every party receives over the broadcast channel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BroadcastMessage {
    params: DealParams,
    commitments: CoefficientCommitments,
    registry: HashRegistry,
}

impl BroadcastMessage {
    /// Checks that the pieces describe one deal: `t` commitments, one digest
    /// for each index `1..=n`, and a registry bound to these parameters.
    pub fn new(
        params: DealParams,
        commitments: CoefficientCommitments,
        registry: HashRegistry,
    ) -> Result<Self, ProtocolError> {
        if commitments.len() != params.threshold {
            return Err(ProtocolError::MalformedBroadcast("commitment count differs from threshold"));
        }
        if !registry.share_digests.keys().copied().eq(1..=params.shares as u64) {
            return Err(ProtocolError::MalformedBroadcast("registry must cover indices 1..=n"));
        }
        if registry.params_digest != params.digest() {
            return Err(ProtocolError::MalformedBroadcast("registry is bound to other parameters"));
        }
        Ok(Self { params, commitments, registry })
    }

    pub fn params(&self) -> &DealParams {
        &self.params
    }

    pub fn commitments(&self) -> &CoefficientCommitments {
        &self.commitments
    }

    pub fn registry(&self) -> &HashRegistry {
        &self.registry
    }

    pub fn into_parts(self) -> (DealParams, CoefficientCommitments, HashRegistry) {
        (self.params, self.commitments, self.registry)
    }

    /// `prod_j C_j^(i^j) mod N` with exact integer exponents.
    pub fn commitment_product(&self, index: u64) -> BigUint {
        let n = self.params.pk.modulus();
        let i = BigUint::from(index);
        let mut power = BigUint::one();
        let mut acc = BigUint::one();
        for c in self.commitments.as_slice() {
            acc = acc * benaloh::hom_scale(&self.params.pk, c, &power).value() % n;
            power *= &i;
        }
        acc
    }
}

/// The group element `X_i` that lets shareholder `i` check its share.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ConsistencyHint(BigUint);

impl ConsistencyHint {
    pub fn new(value: BigUint) -> Self {
        Self(value)
    }

    pub fn value(&self) -> &BigUint {
        &self.0
    }
}

/// What shareholder `i` receives over its private channel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrivateMessage {
    pub share: Share,
    pub hint: ConsistencyHint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VerificationFailure {
    HashMismatch,
    ConsistencyMismatch,
}

impl fmt::Display for VerificationFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::HashMismatch => "HashMismatch",
            Self::ConsistencyMismatch => "ConsistencyMismatch",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VerificationVerdict {
    Accepted,
    Rejected(VerificationFailure),
}

impl VerificationVerdict {
    pub fn is_accepted(&self) -> bool {
        matches!(self, Self::Accepted)
    }

    pub fn failure(&self) -> Option<VerificationFailure> {
        match self {
            Self::Accepted => None,
            Self::Rejected(f) => Some(*f),
        }
    }
}

impl fmt::Display for VerificationVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Accepted => f.write_str("ACCEPT"),
            Self::Rejected(why) => write!(f, "REJECT({why})"),
        }
    }
}

struct SecretMaterial {
    polynomial: Polynomial,
    witnesses: Vec<EncryptionWitness>,
    private_key: Option<EncPrivateKey>,
}

impl SecretMaterial {
    fn wipe(&mut self) {
        self.polynomial.wipe();
        for w in self.witnesses.iter_mut() {
            w.wipe();
        }
        self.witnesses.clear();
        if let Some(sk) = self.private_key.as_mut() {
            sk.wipe();
        }
        self.private_key = None;
    }
}

/// Everything the dealer must destroy once every shareholder has accepted.
pub struct DealerSecretState {
    shares: usize,
    material: Option<SecretMaterial>,
}

impl fmt::Debug for DealerSecretState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DealerSecretState")
            .field("shares", &self.shares)
            .field("discarded", &self.is_discarded())
            .finish()
    }
}

impl DealerSecretState {
    fn material(&self) -> Result<&SecretMaterial, ProtocolError> {
        self.material.as_ref().ok_or(ProtocolError::DiscardedState)
    }

    pub fn polynomial(&self) -> Result<&Polynomial, ProtocolError> {
        Ok(&self.material()?.polynomial)
    }

    pub fn witnesses(&self) -> Result<&[EncryptionWitness], ProtocolError> {
        Ok(&self.material()?.witnesses)
    }

    pub fn private_key(&self) -> Result<Option<&EncPrivateKey>, ProtocolError> {
        Ok(self.material()?.private_key.as_ref())
    }

    pub fn is_discarded(&self) -> bool {
        self.material.is_none()
    }

    /// Destroys the polynomial, witnesses and private key once all `n`
    /// shareholders report acceptance. Discarding twice is a no-op.
    pub fn discard(&mut self, verdicts: &[VerificationVerdict]) -> Result<(), ProtocolError> {
        if self.material.is_none() {
            return Ok(());
        }
        let rejected: Vec<u64> = (1..=self.shares as u64)
            .filter(|&i| !verdicts.get(i as usize - 1).is_some_and(|v| v.is_accepted()))
            .collect();
        if !rejected.is_empty() {
            return Err(ProtocolError::NotAllAccepted { rejected });
        }
        if let Some(mut m) = self.material.take() {
            m.wipe();
        }
        Ok(())
    }
}

impl Drop for DealerSecretState {
    fn drop(&mut self) {
        if let Some(m) = self.material.as_mut() {
            m.wipe();
        }
    }
}

/// Output of the dealing phase.
#[derive(Debug)]
pub struct Deal {
    pub broadcast: BroadcastMessage,
    pub messages: Vec<PrivateMessage>,
    pub state: DealerSecretState,
}

/// Computes `X_i = y^k_i * prod_j x_j^(i^j) mod N` for `polynomial` and the
/// witnesses of the published commitments.
pub fn consistency_hint(
    params: &DealParams,
    polynomial: &Polynomial,
    witnesses: &[EncryptionWitness],
    index: u64,
) -> ConsistencyHint {
    let pk = &params.pk;
    let n = pk.modulus();
    let integer_value = polynomial.eval_integer(index);
    let reduced = &integer_value % params.field.prime();
    let quotient = (integer_value - reduced) / params.field.prime();

    let i = BigUint::from(index);
    let mut power = BigUint::one();
    let mut acc = pk.base().modpow(&quotient, n);
    for w in witnesses {
        acc = acc * w.value().modpow(&power, n) % n;
        power *= &i;
    }
    ConsistencyHint(acc)
}

/// Encrypts every coefficient with a fresh witness.
pub fn commit_polynomial<R: Rng + ?Sized>(
    pk: &EncPublicKey,
    polynomial: &Polynomial,
    rng: &mut R,
) -> Result<(CoefficientCommitments, Vec<EncryptionWitness>), ProtocolError> {
    let mut commitments = Vec::with_capacity(polynomial.threshold());
    let mut witnesses = Vec::with_capacity(polynomial.threshold());
    for a in polynomial.coefficients() {
        let (c, w) = benaloh::encrypt(pk, a.value(), rng)?;
        commitments.push(c);
        witnesses.push(w);
    }
    Ok((CoefficientCommitments(commitments), witnesses))
}

/// Share generation and distribution.
///
/// `private_key`, when given, is held in the dealer state until discard.
pub fn deal<R: Rng + ?Sized>(
    secret: &FieldElement,
    params: &DealParams,
    private_key: Option<EncPrivateKey>,
    rng: &mut R,
) -> Result<Deal, ProtocolError> {
    let polynomial = Polynomial::random(&params.field, secret, params.threshold, rng)?;
    let shares = polynomial.shares(&params.field, params.shares)?;
    let (commitments, witnesses) = commit_polynomial(&params.pk, &polynomial, rng)?;
    let registry = HashRegistry::build(&shares, polynomial.secret(), params.digest());

    let messages = shares
        .into_iter()
        .map(|share| {
            let hint = consistency_hint(params, &polynomial, &witnesses, share.index);
            PrivateMessage { share, hint }
        })
        .collect();

    let broadcast = BroadcastMessage::new(params.clone(), commitments, registry)?;
    Ok(Deal {
        broadcast,
        messages,
        state: DealerSecretState {
            shares: params.shares,
            material: Some(SecretMaterial { polynomial, witnesses, private_key }),
        },
    })
}

/// `X_i^r * y^S_i = prod_j C_j^(i^j) (mod N)`.
pub fn consistency_holds(bm: &BroadcastMessage, share: &Share, hint: &ConsistencyHint) -> bool {
    let pk = &bm.params.pk;
    let n = pk.modulus();
    let lhs = hint.0.modpow(pk.order(), n) * pk.base().modpow(share.value.value(), n) % n;
    lhs == bm.commitment_product(share.index)
}

/// Shareholder-side check: registry digest first, then the commitment congruence.
pub fn verify_share(bm: &BroadcastMessage, pm: &PrivateMessage) -> Result<VerificationVerdict, ProtocolError> {
    if !bm.registry.check_share(&pm.share)? {
        return Ok(VerificationVerdict::Rejected(VerificationFailure::HashMismatch));
    }
    if !consistency_holds(bm, &pm.share, &pm.hint) {
        return Ok(VerificationVerdict::Rejected(VerificationFailure::ConsistencyMismatch));
    }
    Ok(VerificationVerdict::Accepted)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReconstructionResult {
    pub secret: Option<FieldElement>,
    pub accepted_shares: BTreeSet<u64>,
    /// Indices whose submissions failed the registry check: the identified cheaters.
    pub rejected_shares: BTreeSet<u64>,
    pub secret_verified: bool,
}

/// Reconstruction from submitted shares using only public information.
///
/// Each submission is checked against the registry; an index with any failing
/// or unknown submission is rejected. With at least `t` accepted indices the
/// `t` smallest are interpolated and the result checked against `H(S)`.
pub fn reconstruct(bm: &BroadcastMessage, submitted: &[Share]) -> ReconstructionResult {
    let mut accepted = std::collections::BTreeMap::new();
    let mut rejected = BTreeSet::new();
    for share in submitted {
        match bm.registry.check_share(share) {
            Ok(true) if share.value.value() < bm.params.field.prime() => {
                accepted.entry(share.index).or_insert_with(|| share.clone());
            }
            _ => {
                rejected.insert(share.index);
            }
        }
    }
    accepted.retain(|i, _| !rejected.contains(i));

    let t = bm.params.threshold;
    let (secret, secret_verified) = if accepted.len() >= t {
        let chosen: Vec<Share> = accepted.values().take(t).cloned().collect();
        let s = field::lagrange_reconstruct(&bm.params.field, &chosen)
            .expect("accepted shares have distinct in-range indices");
        let verified = bm.registry.check_secret(&s);
        (Some(s), verified)
    } else {
        (None, false)
    };

    ReconstructionResult {
        secret,
        accepted_shares: accepted.into_keys().collect(),
        rejected_shares: rejected,
        secret_verified,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    fn toy_params(t: usize, n: usize) -> (DealParams, EncPrivateKey) {
        let field = FieldParams::new(big(17)).unwrap();
        let (pk, sk) = benaloh::smallest_keypair(&big(17)).unwrap();
        (DealParams::new(t, n, field, pk).unwrap(), sk)
    }

    fn toy_deal(seed: u64) -> (Deal, EncPrivateKey) {
        let (params, sk) = toy_params(2, 4);
        let secret = params.field().element(big(13)).unwrap();
        let deal = deal(&secret, &params, Some(sk.clone()), &mut ChaCha20Rng::seed_from_u64(seed)).unwrap();
        (deal, sk)
    }

    #[test]
    fn params_validation() {
        let field = FieldParams::new(big(17)).unwrap();
        let (pk, _) = benaloh::smallest_keypair(&big(17)).unwrap();
        assert_eq!(
            DealParams::new(5, 4, field.clone(), pk.clone()),
            Err(ProtocolError::Field(FieldError::ThresholdExceedsN { threshold: 5, shares: 4 }))
        );
        assert_eq!(
            DealParams::new(0, 4, field.clone(), pk.clone()),
            Err(ProtocolError::Field(FieldError::InvalidThreshold))
        );
        assert_eq!(
            DealParams::new(2, 17, field.clone(), pk),
            Err(ProtocolError::Field(FieldError::TooManyShareholders { shares: 17 }))
        );
        let (pk5, _) = benaloh::smallest_keypair(&big(5)).unwrap();
        assert!(matches!(DealParams::new(2, 4, field, pk5), Err(ProtocolError::OrderMismatch { .. })));
    }

    #[test]
    fn honest_deal_is_accepted_and_commits_to_the_secret() {
        let (deal, sk) = toy_deal(1);
        let bm = &deal.broadcast;
        assert_eq!(bm.commitments().len(), 2);
        assert_eq!(bm.registry().len(), 4);
        assert_eq!(deal.messages.len(), 4);
        for pm in &deal.messages {
            assert_eq!(verify_share(bm, pm).unwrap(), VerificationVerdict::Accepted);
        }
        let c0 = &bm.commitments().as_slice()[0];
        assert_eq!(benaloh::decrypt(&sk, bm.params().public_key(), c0).unwrap(), big(13));
        assert!(bm.registry().check_secret(&bm.params().field().element(big(13)).unwrap()));
    }

    #[test]
    fn constant_polynomial_hint_is_the_witness() {
        let (params, _) = toy_params(1, 3);
        let secret = params.field().element(big(6)).unwrap();
        let deal = deal(&secret, &params, None, &mut ChaCha20Rng::seed_from_u64(3)).unwrap();
        let x0 = deal.state.witnesses().unwrap()[0].value().clone();
        let pk = params.public_key();
        let c0 = deal.broadcast.commitments().as_slice()[0].value();
        for pm in &deal.messages {
            assert_eq!(pm.hint.value(), &x0);
            let lhs = pm.hint.value().modpow(pk.order(), pk.modulus()) * pk.base().modpow(&big(6), pk.modulus())
                % pk.modulus();
            assert_eq!(&lhs, c0);
        }
    }

    #[test]
    fn tampered_value_is_a_hash_mismatch() {
        let (deal, _) = toy_deal(2);
        let field = deal.broadcast.params().field().clone();
        let mut pm = deal.messages[1].clone();
        pm.share.value = field.add(&pm.share.value, &field.element(big(1)).unwrap());
        assert_eq!(
            verify_share(&deal.broadcast, &pm).unwrap(),
            VerificationVerdict::Rejected(VerificationFailure::HashMismatch)
        );
    }

    #[test]
    fn forged_registry_entry_is_caught_by_the_congruence() {
        let (deal, _) = toy_deal(3);
        let field = deal.broadcast.params().field().clone();
        for honest in &deal.messages {
            for v in 0..17u64 {
                let value = field.element(big(v)).unwrap();
                if value == honest.share.value {
                    continue;
                }
                let fake = Share::new(honest.share.index, value);
                let (params, commitments, mut reg) = deal.broadcast.clone().into_parts();
                reg.set_share_digest(fake.index, registry::digest_share(fake.index, fake.value.value()));
                let bm = BroadcastMessage::new(params, commitments, reg).unwrap();
                let pm = PrivateMessage { share: fake, hint: honest.hint.clone() };
                assert_eq!(
                    verify_share(&bm, &pm).unwrap(),
                    VerificationVerdict::Rejected(VerificationFailure::ConsistencyMismatch)
                );
            }
        }
    }

    #[test]
    fn unknown_index_is_an_error() {
        let (deal, _) = toy_deal(4);
        let mut pm = deal.messages[0].clone();
        pm.share.index = 9;
        assert_eq!(verify_share(&deal.broadcast, &pm), Err(ProtocolError::Registry(RegistryError::UnknownIndex(9))));
    }

    #[test]
    fn broadcast_shape_is_validated() {
        let (deal, _) = toy_deal(5);
        let (params, commitments, reg) = deal.broadcast.clone().into_parts();
        let short = CoefficientCommitments::new(commitments.as_slice()[..1].to_vec());
        assert!(BroadcastMessage::new(params.clone(), short, reg.clone()).is_err());

        let mut missing = reg.clone();
        missing.share_digests.remove(&4);
        assert!(BroadcastMessage::new(params.clone(), commitments.clone(), missing).is_err());

        let mut rebound = reg;
        rebound.params_digest = registry::Digest::of(b"other deal");
        assert!(BroadcastMessage::new(params, commitments, rebound).is_err());
    }

    #[test]
    fn discard_lifecycle() {
        let (mut deal, _) = toy_deal(6);
        assert!(deal.state.private_key().unwrap().is_some());
        let mut verdicts: Vec<_> = deal.messages.iter().map(|pm| verify_share(&deal.broadcast, pm).unwrap()).collect();

        verdicts[3] = VerificationVerdict::Rejected(VerificationFailure::HashMismatch);
        assert_eq!(deal.state.discard(&verdicts), Err(ProtocolError::NotAllAccepted { rejected: vec![4] }));
        assert_eq!(deal.state.discard(&verdicts[..3]), Err(ProtocolError::NotAllAccepted { rejected: vec![4] }));
        assert!(!deal.state.is_discarded());

        verdicts[3] = VerificationVerdict::Accepted;
        deal.state.discard(&verdicts).unwrap();
        assert!(deal.state.is_discarded());
        assert_eq!(deal.state.polynomial().unwrap_err(), ProtocolError::DiscardedState);
        assert_eq!(deal.state.witnesses().unwrap_err(), ProtocolError::DiscardedState);
        assert_eq!(deal.state.private_key().unwrap_err(), ProtocolError::DiscardedState);
        deal.state.discard(&verdicts).unwrap();
        deal.state.discard(&[]).unwrap();
    }

    #[test]
    fn reconstruction_examples() {
        let field = FieldParams::new(big(17)).unwrap();
        let (pk, _) = benaloh::smallest_keypair(&big(17)).unwrap();
        let params = DealParams::new(2, 4, field.clone(), pk.clone()).unwrap();
        let poly = Polynomial::from_coefficients(&field, vec![big(13), big(2)]).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(8);
        let shares = poly.shares(&field, 4).unwrap();
        let (commitments, _) = commit_polynomial(&pk, &poly, &mut rng).unwrap();
        let reg = HashRegistry::build(&shares, poly.secret(), params.digest());
        let bm = BroadcastMessage::new(params, commitments, reg).unwrap();
        let s = |i: u64, v: u64| Share::new(i, field.element(big(v)).unwrap());

        let r = reconstruct(&bm, &[s(1, 15), s(3, 2)]);
        assert_eq!(r.secret, Some(field.element(big(13)).unwrap()));
        assert!(r.secret_verified);
        assert!(r.rejected_shares.is_empty());

        let r = reconstruct(&bm, &[s(1, 15), s(3, 9)]);
        assert_eq!(r.secret, None);
        assert!(!r.secret_verified);
        assert_eq!(r.rejected_shares, BTreeSet::from([3]));
        assert_eq!(r.accepted_shares, BTreeSet::from([1]));

        let r = reconstruct(&bm, &[s(4, 4), s(2, 5), s(3, 2), s(1, 15)]);
        assert_eq!(r.rejected_shares, BTreeSet::from([2]));
        assert_eq!(r.accepted_shares, BTreeSet::from([1, 3, 4]));
        assert_eq!(r.secret, Some(field.element(big(13)).unwrap()));
        assert!(r.secret_verified);

        // A duplicated index with one forged copy is rejected outright.
        let r = reconstruct(&bm, &[s(1, 15), s(1, 16), s(3, 2), s(4, 4)]);
        assert_eq!(r.rejected_shares, BTreeSet::from([1]));
        assert_eq!(r.accepted_shares, BTreeSet::from([3, 4]));
        assert!(r.secret_verified);

        let r = reconstruct(&bm, &[s(9, 1), s(3, 2), s(4, 4)]);
        assert_eq!(r.rejected_shares, BTreeSet::from([9]));
        assert!(r.secret_verified);

        let r = reconstruct(&bm, &[]);
        assert_eq!(r.secret, None);
    }
}
