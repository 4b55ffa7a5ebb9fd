//! Canonical JSON encodings of the public file and share files.
//!
//! Objects have sorted keys and no insignificant whitespace, integers are
//! decimal strings without leading zeros, digests are lowercase hex, and every
//! document ends with a single newline. Parsing is strict about field names
//! and value syntax, so `serialize(parse(bytes)) == bytes` for any canonical
//! input.

use std::collections::BTreeMap;
use std::str::FromStr;

use num_bigint::BigUint;
use serde_json::{Map, Value};
use thiserror::Error;

use crate::benaloh::EncPublicKey;
use crate::field::{FieldParams, Share};
use crate::protocol::{
    BroadcastMessage, CoefficientCommitments, ConsistencyHint, DealParams, PrivateMessage, ProtocolError,
};
use crate::registry::{Digest, HashRegistry, TAG};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{path}: {reason}")]
    Field { path: String, reason: &'static str },
    #[error("unsupported version {0:?}")]
    Version(String),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
}

fn bad(path: &str, reason: &'static str) -> FormatError {
    FormatError::Field { path: path.to_string(), reason }
}

/// Compact JSON with sorted object keys and a trailing newline.
pub fn to_canonical_string(value: &Value) -> String {
    // serde_json's default map is ordered by key.
    let mut out = serde_json::to_string(value).expect("JSON values always serialize");
    out.push('\n');
    out
}

pub fn decimal(v: &BigUint) -> Value {
    Value::String(v.to_string())
}

fn parse_decimal(s: &str) -> Option<BigUint> {
    let canonical = !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit()) && (s == "0" || !s.starts_with('0'));
    if !canonical {
        return None;
    }
    BigUint::from_str(s).ok()
}

/// Reads a fixed set of keys out of a JSON object, refusing extra ones.
struct Fields<'a> {
    path: &'a str,
    map: &'a Map<String, Value>,
}

impl<'a> Fields<'a> {
    fn new(path: &'a str, value: &'a Value, keys: &[&str]) -> Result<Self, FormatError> {
        let map = value.as_object().ok_or_else(|| bad(path, "expected an object"))?;
        if map.len() != keys.len() || !keys.iter().all(|k| map.contains_key(*k)) {
            return Err(bad(path, "unexpected or missing keys"));
        }
        Ok(Self { path, map })
    }

    fn get(&self, key: &str) -> &'a Value {
        &self.map[key]
    }

    fn str(&self, key: &str) -> Result<&'a str, FormatError> {
        self.get(key).as_str().ok_or_else(|| bad(&format!("{}.{key}", self.path), "expected a string"))
    }

    fn int(&self, key: &str) -> Result<BigUint, FormatError> {
        parse_decimal(self.str(key)?)
            .ok_or_else(|| bad(&format!("{}.{key}", self.path), "expected a canonical decimal"))
    }

    fn small(&self, key: &str) -> Result<u64, FormatError> {
        u64::try_from(self.int(key)?).map_err(|_| bad(&format!("{}.{key}", self.path), "value does not fit 64 bits"))
    }

    fn digest(&self, key: &str) -> Result<Digest, FormatError> {
        self.str(key)?.parse().map_err(|_| bad(&format!("{}.{key}", self.path), "expected 64 lowercase hex digits"))
    }

    fn version(&self) -> Result<(), FormatError> {
        let v = self.str("version")?;
        if v != TAG {
            return Err(FormatError::Version(v.to_string()));
        }
        Ok(())
    }
}

/// Parameters as they appear in the public file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PublicParams {
    pub field_prime: BigUint,
    pub threshold: u64,
    pub shares: u64,
    pub modulus: BigUint,
    pub base: BigUint,
    pub order: BigUint,
}

/// The broadcast content: parameters, coefficient commitments and registry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PublicFile {
    pub params: PublicParams,
    pub commitments: Vec<BigUint>,
    pub params_digest: Digest,
    pub secret_digest: Digest,
    pub share_digests: BTreeMap<u64, Digest>,
}

impl PublicFile {
    pub fn from_broadcast(bm: &BroadcastMessage) -> Self {
        let p = bm.params();
        let pk = p.public_key();
        let reg = bm.registry();
        Self {
            params: PublicParams {
                field_prime: p.field().prime().clone(),
                threshold: p.threshold() as u64,
                shares: p.shares() as u64,
                modulus: pk.modulus().clone(),
                base: pk.base().clone(),
                order: pk.order().clone(),
            },
            commitments: bm.commitments().as_slice().iter().map(|c| c.value().clone()).collect(),
            params_digest: reg.params_digest,
            secret_digest: reg.secret_digest,
            share_digests: reg.share_digests.clone(),
        }
    }

    /// Validates the parameters, key and registry binding.
    pub fn to_broadcast(&self) -> Result<BroadcastMessage, FormatError> {
        let p = &self.params;
        let field = FieldParams::new(p.field_prime.clone()).map_err(ProtocolError::from)?;
        let pk = EncPublicKey::new(p.modulus.clone(), p.base.clone(), p.order.clone()).map_err(ProtocolError::from)?;
        let threshold = usize::try_from(p.threshold).map_err(|_| bad("params.threshold", "too large"))?;
        let shares = usize::try_from(p.shares).map_err(|_| bad("params.shares", "too large"))?;
        let params = DealParams::new(threshold, shares, field, pk)?;
        let commitments = self
            .commitments
            .iter()
            .map(|c| params.public_key().ciphertext(c.clone()))
            .collect::<Result<Vec<_>, _>>()
            .map_err(ProtocolError::from)?;
        let registry = HashRegistry {
            params_digest: self.params_digest,
            share_digests: self.share_digests.clone(),
            secret_digest: self.secret_digest,
        };
        Ok(BroadcastMessage::new(params, CoefficientCommitments::new(commitments), registry)?)
    }

    pub fn to_json(&self) -> Value {
        let p = &self.params;
        let mut params = Map::new();
        params.insert("base".into(), decimal(&p.base));
        params.insert("field_prime".into(), decimal(&p.field_prime));
        params.insert("modulus".into(), decimal(&p.modulus));
        params.insert("order".into(), decimal(&p.order));
        params.insert("shares".into(), Value::String(p.shares.to_string()));
        params.insert("threshold".into(), Value::String(p.threshold.to_string()));

        let share_digests = self
            .share_digests
            .iter()
            .map(|(i, d)| {
                let mut entry = Map::new();
                entry.insert("digest".into(), Value::String(d.to_hex()));
                entry.insert("index".into(), Value::String(i.to_string()));
                Value::Object(entry)
            })
            .collect();
        let mut registry = Map::new();
        registry.insert("params_digest".into(), Value::String(self.params_digest.to_hex()));
        registry.insert("secret_digest".into(), Value::String(self.secret_digest.to_hex()));
        registry.insert("share_digests".into(), Value::Array(share_digests));

        let mut root = Map::new();
        root.insert("commitments".into(), Value::Array(self.commitments.iter().map(decimal).collect()));
        root.insert("params".into(), Value::Object(params));
        root.insert("registry".into(), Value::Object(registry));
        root.insert("version".into(), Value::String(TAG.into()));
        Value::Object(root)
    }

    pub fn to_canonical_string(&self) -> String {
        to_canonical_string(&self.to_json())
    }

    pub fn parse(bytes: &[u8]) -> Result<Self, FormatError> {
        let root: Value = serde_json::from_slice(bytes)?;
        let top = Fields::new("$", &root, &["commitments", "params", "registry", "version"])?;
        top.version()?;

        let pf = Fields::new(
            "params",
            top.get("params"),
            &["base", "field_prime", "modulus", "order", "shares", "threshold"],
        )?;
        let params = PublicParams {
            field_prime: pf.int("field_prime")?,
            threshold: pf.small("threshold")?,
            shares: pf.small("shares")?,
            modulus: pf.int("modulus")?,
            base: pf.int("base")?,
            order: pf.int("order")?,
        };

        let commitments = top
            .get("commitments")
            .as_array()
            .ok_or_else(|| bad("commitments", "expected an array"))?
            .iter()
            .map(|c| {
                c.as_str().and_then(parse_decimal).ok_or_else(|| bad("commitments", "expected canonical decimals"))
            })
            .collect::<Result<Vec<_>, _>>()?;

        let rf = Fields::new("registry", top.get("registry"), &["params_digest", "secret_digest", "share_digests"])?;
        let mut share_digests = BTreeMap::new();
        let mut last = 0u64;
        for entry in
            rf.get("share_digests").as_array().ok_or_else(|| bad("registry.share_digests", "expected an array"))?
        {
            let ef = Fields::new("registry.share_digests[]", entry, &["digest", "index"])?;
            let index = ef.small("index")?;
            if index <= last {
                return Err(bad("registry.share_digests", "indices must be positive and increasing"));
            }
            last = index;
            share_digests.insert(index, ef.digest("digest")?);
        }

        Ok(Self {
            params,
            commitments,
            params_digest: rf.digest("params_digest")?,
            secret_digest: rf.digest("secret_digest")?,
            share_digests,
        })
    }
}

/// One shareholder's private message.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShareFile {
    pub index: u64,
    pub value: BigUint,
    pub hint: BigUint,
}

impl ShareFile {
    pub fn from_private(pm: &PrivateMessage) -> Self {
        Self { index: pm.share.index, value: pm.share.value.value().clone(), hint: pm.hint.value().clone() }
    }

    /// Checks the share value lies in the field of `params`.
    pub fn to_private(&self, params: &DealParams) -> Result<PrivateMessage, FormatError> {
        let value =
            params.field().element(self.value.clone()).map_err(|_| bad("value", "not below the field prime"))?;
        if self.index == 0 {
            return Err(bad("index", "share indices start at 1"));
        }
        Ok(PrivateMessage { share: Share::new(self.index, value), hint: ConsistencyHint::new(self.hint.clone()) })
    }

    pub fn to_json(&self) -> Value {
        let mut root = Map::new();
        root.insert("hint".into(), decimal(&self.hint));
        root.insert("index".into(), Value::String(self.index.to_string()));
        root.insert("value".into(), decimal(&self.value));
        root.insert("version".into(), Value::String(TAG.into()));
        Value::Object(root)
    }

    pub fn to_canonical_string(&self) -> String {
        to_canonical_string(&self.to_json())
    }

    pub fn parse(bytes: &[u8]) -> Result<Self, FormatError> {
        let root: Value = serde_json::from_slice(bytes)?;
        let f = Fields::new("$", &root, &["hint", "index", "value", "version"])?;
        f.version()?;
        Ok(Self { index: f.small("index")?, value: f.int("value")?, hint: f.int("hint")? })
    }
}
