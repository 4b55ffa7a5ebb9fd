//! The dealer's public file: SHA-256 digests of every share and of the secret,
//! bound to one set of protocol parameters.
//!
//! Preimages are ASCII with versioned tags, e.g. `vss1:share:1:15`,
//! `vss1:secret:13` and `vss1:params:<P>:<t>:<n>:<N>:<y>:<r>`. Decimals carry
//! no leading zeros or whitespace.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use sha2::{Digest as _, Sha256};
use thiserror::Error;

use crate::benaloh::EncPublicKey;
use crate::field::{FieldElement, FieldParams, Share};

pub const TAG: &str = "vss1";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegistryError {
    #[error("share index {0} is not in the registry")]
    UnknownIndex(u64),
}

/// A 32-byte SHA-256 output.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Digest([u8; 32]);

impl Digest {
    pub fn of(preimage: &[u8]) -> Self {
        Self(Sha256::digest(preimage).into())
    }

    pub fn as_bytes(&self) -> &[u8; 32] {
        &self.0
    }

    pub fn from_bytes(bytes: [u8; 32]) -> Self {
        Self(bytes)
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }
}

impl fmt::Debug for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Digest({})", self.to_hex())
    }
}

impl fmt::Display for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("expected 64 lowercase hex characters")]
pub struct ParseDigestError;

impl FromStr for Digest {
    type Err = ParseDigestError;

    /// Accepts only the canonical lowercase form.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.len() != 64 || !s.bytes().all(|b| b.is_ascii_digit() || (b'a'..=b'f').contains(&b)) {
            return Err(ParseDigestError);
        }
        let mut out = [0u8; 32];
        hex::decode_to_slice(s, &mut out).map_err(|_| ParseDigestError)?;
        Ok(Self(out))
    }
}

pub fn digest_share(index: u64, value: &BigUint) -> Digest {
    Digest::of(format!("{TAG}:share:{index}:{value}").as_bytes())
}

pub fn digest_secret(secret: &BigUint) -> Digest {
    Digest::of(format!("{TAG}:secret:{secret}").as_bytes())
}

pub fn digest_params(field: &FieldParams, threshold: usize, shares: usize, pk: &EncPublicKey) -> Digest {
    Digest::of(
        format!(
            "{TAG}:params:{}:{}:{}:{}:{}:{}",
            field.prime(),
            threshold,
            shares,
            pk.modulus(),
            pk.base(),
            pk.order()
        )
        .as_bytes(),
    )
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HashRegistry {
    pub params_digest: Digest,
    pub share_digests: BTreeMap<u64, Digest>,
    pub secret_digest: Digest,
}

impl HashRegistry {
    pub fn build(shares: &[Share], secret: &FieldElement, params_digest: Digest) -> Self {
        Self {
            params_digest,
            share_digests: shares.iter().map(|s| (s.index, digest_share(s.index, s.value.value()))).collect(),
            secret_digest: digest_secret(secret.value()),
        }
    }

    pub fn len(&self) -> usize {
        self.share_digests.len()
    }

    pub fn is_empty(&self) -> bool {
        self.share_digests.is_empty()
    }

    /// True iff the share's digest matches the registered one.
    pub fn check_share(&self, share: &Share) -> Result<bool, RegistryError> {
        let registered = self.share_digests.get(&share.index).ok_or(RegistryError::UnknownIndex(share.index))?;
        Ok(*registered == digest_share(share.index, share.value.value()))
    }

    pub fn check_secret(&self, secret: &FieldElement) -> bool {
        self.secret_digest == digest_secret(secret.value())
    }

    /// Replaces the digest registered for `index`.
    pub fn set_share_digest(&mut self, index: u64, digest: Digest) {
        self.share_digests.insert(index, digest);
    }
}
