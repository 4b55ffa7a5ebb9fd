//! Deterministic multi-party simulation with injectable cheating.
//!
//! One dealer and `n` shareholders talk over private point-to-point channels
//! plus a broadcast channel that delivers the same message to everyone.
//! Parties act sequentially: the dealer deals, shareholders verify in index
//! order, the dealer discards its state if nobody complained, every
//! shareholder submits its share, and a reconstructor holding only public data
//! recovers the secret. All randomness comes from the scenario seed.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde_json::{json, Value};
use thiserror::Error;

use crate::benaloh::{self, default_key_bits};
use crate::field::{FieldElement, FieldParams, Polynomial, Share};
use crate::format::{decimal, to_canonical_string};
use crate::protocol::{
    self, BroadcastMessage, Deal, DealParams, PrivateMessage, ProtocolError, ReconstructionResult, VerificationFailure,
    VerificationVerdict,
};
use crate::registry::{self, HashRegistry};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HarnessError {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
}

fn invalid(msg: impl Into<String>) -> HarnessError {
    HarnessError::InvalidScenario(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ScenarioKind {
    /// Everyone follows the protocol.
    Honest,
    /// The dealer serves target shareholders from a second polynomial while
    /// committing to the first, and registers digests of what it actually sent.
    DealerInconsistent,
    /// Target shareholders submit forged values at reconstruction.
    ShareholderFake,
    /// Target shares are modified in transit from the dealer.
    IntruderTamper,
    /// The dealer publishes the digest of a different secret.
    SecretMismatch,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 5] =
        [Self::Honest, Self::DealerInconsistent, Self::ShareholderFake, Self::IntruderTamper, Self::SecretMismatch];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Honest => "HONEST",
            Self::DealerInconsistent => "DEALER_INCONSISTENT",
            Self::ShareholderFake => "SHAREHOLDER_FAKE",
            Self::IntruderTamper => "INTRUDER_TAMPER",
            Self::SecretMismatch => "SECRET_MISMATCH",
        }
    }

    fn has_targets(&self) -> bool {
        matches!(self, Self::DealerInconsistent | Self::ShareholderFake | Self::IntruderTamper)
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScenarioKind {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| invalid(format!("unknown scenario {s:?}")))
    }
}

/// How an adversary replaces a share value. Always yields a different value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TamperRule {
    /// `v + k mod P`, with `k` nonzero mod `P`.
    Offset(BigUint),
    /// A uniformly random different value.
    Randomize,
}

impl TamperRule {
    fn apply<R: Rng + ?Sized>(&self, field: &FieldParams, v: &FieldElement, rng: &mut R) -> FieldElement {
        match self {
            Self::Offset(k) => field.add(v, &field.reduce(k)),
            Self::Randomize => loop {
                let w = field.random_element(rng);
                if w != *v {
                    return w;
                }
            },
        }
    }

    fn describe(&self) -> String {
        match self {
            Self::Offset(k) => format!("offset:{k}"),
            Self::Randomize => "randomize".into(),
        }
    }
}

/// Whether the dealer's second polynomial keeps the real secret as constant term.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InconsistentVariant {
    SameSecret,
    DifferentSecret,
}

/// Key material used by a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KeyProfile {
    /// The deterministic smallest key for `r = P`.
    Smallest,
    /// A random key with primes of the given width.
    Random { bits: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scenario {
    pub kind: ScenarioKind,
    pub field_prime: BigUint,
    pub threshold: usize,
    pub shares: usize,
    pub secret: BigUint,
    pub targets: BTreeSet<u64>,
    pub rule: TamperRule,
    pub variant: InconsistentVariant,
    pub key: KeyProfile,
    pub seed: u64,
}

impl Scenario {
    /// `P = 17, t = 2, n = 4, S = 13` with one target per adversarial kind:
    /// shareholder 4 for a cheating dealer, 2 for a forging shareholder and 3
    /// for a tampering intruder.
    pub fn new(kind: ScenarioKind, seed: u64) -> Self {
        let targets = match kind {
            ScenarioKind::DealerInconsistent => BTreeSet::from([4]),
            ScenarioKind::ShareholderFake => BTreeSet::from([2]),
            ScenarioKind::IntruderTamper => BTreeSet::from([3]),
            _ => BTreeSet::new(),
        };
        let p = BigUint::from(17u32);
        Self {
            kind,
            key: KeyProfile::Random { bits: default_key_bits(&p) },
            field_prime: p,
            threshold: 2,
            shares: 4,
            secret: BigUint::from(13u32),
            targets,
            rule: TamperRule::Offset(BigUint::from(1u32)),
            variant: InconsistentVariant::SameSecret,
            seed,
        }
    }

    /// Random desk-scale scenario of `kind` derived from `seed`.
    pub fn sample(kind: ScenarioKind, seed: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed ^ 0x5eed_5ca1_ab1e);
        let prime = [17u32, 251, 65537][rng.gen_range(0..3)];
        let p = BigUint::from(prime);
        let shares = rng.gen_range(1..=6usize);
        let threshold = rng.gen_range(1..=shares);
        // A constant polynomial can only be varied through its secret.
        let variant = if threshold > 1 && rng.gen_bool(0.5) {
            InconsistentVariant::SameSecret
        } else {
            InconsistentVariant::DifferentSecret
        };
        let targets = if kind.has_targets() {
            let mut t: BTreeSet<u64> = (1..=shares as u64).filter(|_| rng.gen_bool(0.4)).collect();
            if t.is_empty() {
                t.insert(rng.gen_range(1..=shares as u64));
            }
            t
        } else {
            BTreeSet::new()
        };
        let rule = if rng.gen_bool(0.5) {
            TamperRule::Randomize
        } else {
            TamperRule::Offset(BigUint::from(rng.gen_range(1..prime)))
        };
        let secret = BigUint::from(rng.gen_range(0..prime));
        Self {
            kind,
            key: KeyProfile::Random { bits: default_key_bits(&p) },
            field_prime: p,
            threshold,
            shares,
            secret,
            targets,
            rule,
            variant,
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let field = FieldParams::new(self.field_prime.clone()).map_err(|e| invalid(format!("field prime: {e}")))?;
        if self.threshold < 1 || self.threshold > self.shares {
            return Err(invalid("need 1 <= threshold <= shares"));
        }
        if BigUint::from(self.shares) >= *field.prime() {
            return Err(invalid("shares must be below the field prime"));
        }
        if self.secret >= *field.prime() {
            return Err(invalid("secret must be below the field prime"));
        }
        if self.targets.iter().any(|&i| i == 0 || i > self.shares as u64) {
            return Err(invalid("targets must lie in 1..=shares"));
        }
        if self.kind.has_targets() == self.targets.is_empty() {
            return Err(invalid(if self.kind.has_targets() {
                "this scenario needs at least one target"
            } else {
                "this scenario takes no targets"
            }));
        }
        if let TamperRule::Offset(k) = &self.rule {
            if (k % field.prime()).is_zero() {
                return Err(invalid("tamper offset must be nonzero mod P"));
            }
        }
        if self.kind == ScenarioKind::DealerInconsistent
            && self.variant == InconsistentVariant::SameSecret
            && self.threshold == 1
        {
            return Err(invalid("a constant polynomial cannot be varied without changing the secret"));
        }
        Ok(())
    }

    fn to_json(&self) -> Value {
        json!({
            "kind": self.kind.name(),
            "field_prime": decimal(&self.field_prime),
            "threshold": self.threshold.to_string(),
            "shares": self.shares.to_string(),
            "secret": decimal(&self.secret),
            "targets": self.targets.iter().map(|i| i.to_string()).collect::<Vec<_>>(),
            "rule": self.rule.describe(),
            "variant": match self.variant {
                InconsistentVariant::SameSecret => "same-secret",
                InconsistentVariant::DifferentSecret => "different-secret",
            },
            "key": match self.key {
                KeyProfile::Smallest => "smallest".to_string(),
                KeyProfile::Random { bits } => format!("random:{bits}"),
            },
            "seed": self.seed.to_string(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Event {
    KeyReady { modulus: BigUint, base: BigUint, order: BigUint },
    Broadcast { commitments: Vec<BigUint>, secret_digest: registry::Digest },
    PrivateSent { to: u64, value: BigUint },
    Tampered { to: u64, original: BigUint, replaced: BigUint },
    Delivered { to: u64, value: BigUint },
    Verdict { party: u64, verdict: VerificationVerdict },
    Complaint { party: u64, failure: VerificationFailure },
    DealerDiscarded,
    DealHalted { complaints: Vec<u64> },
    Submitted { party: u64, value: BigUint, forged: bool },
    Reconstructed(ReconstructionResult),
}

impl Event {
    fn to_json(&self) -> Value {
        match self {
            Self::KeyReady { modulus, base, order } => json!({
                "event": "key_ready", "modulus": decimal(modulus), "base": decimal(base), "order": decimal(order),
            }),
            Self::Broadcast { commitments, secret_digest } => json!({
                "event": "broadcast",
                "commitments": commitments.iter().map(decimal).collect::<Vec<_>>(),
                "secret_digest": secret_digest.to_hex(),
            }),
            Self::PrivateSent { to, value } => json!({
                "event": "private_sent", "to": to.to_string(), "value": decimal(value),
            }),
            Self::Tampered { to, original, replaced } => json!({
                "event": "tampered", "to": to.to_string(),
                "original": decimal(original), "replaced": decimal(replaced),
            }),
            Self::Delivered { to, value } => json!({
                "event": "delivered", "to": to.to_string(), "value": decimal(value),
            }),
            Self::Verdict { party, verdict } => json!({
                "event": "verdict", "party": party.to_string(), "verdict": verdict.to_string(),
            }),
            Self::Complaint { party, failure } => json!({
                "event": "complaint", "party": party.to_string(), "failure": failure.to_string(),
            }),
            Self::DealerDiscarded => json!({ "event": "dealer_discarded" }),
            Self::DealHalted { complaints } => json!({
                "event": "deal_halted",
                "complaints": complaints.iter().map(|i| i.to_string()).collect::<Vec<_>>(),
            }),
            Self::Submitted { party, value, forged } => json!({
                "event": "submitted", "party": party.to_string(), "value": decimal(value), "forged": forged,
            }),
            Self::Reconstructed(r) => json!({
                "event": "reconstructed",
                "secret": r.secret.as_ref().map(|s| decimal(s.value())),
                "secret_verified": r.secret_verified,
                "accepted": r.accepted_shares.iter().map(|i| i.to_string()).collect::<Vec<_>>(),
                "rejected": r.rejected_shares.iter().map(|i| i.to_string()).collect::<Vec<_>>(),
            }),
        }
    }
}

/// Full record of one run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transcript {
    pub scenario: Scenario,
    pub events: Vec<Event>,
    pub verdicts: BTreeMap<u64, VerificationVerdict>,
    pub discarded: bool,
    pub result: ReconstructionResult,
}

impl Transcript {
    pub fn to_json(&self) -> Value {
        json!({
            "scenario": self.scenario.to_json(),
            "events": self.events.iter().map(Event::to_json).collect::<Vec<_>>(),
        })
    }

    pub fn to_canonical_string(&self) -> String {
        to_canonical_string(&self.to_json())
    }
}

struct Run {
    events: Vec<Event>,
}

impl Run {
    fn log(&mut self, e: Event) {
        self.events.push(e);
    }
}

/// Deals honestly, then swaps in an inconsistent second polynomial for the
/// targets. Commitments stay those of the first polynomial; the registry and
/// hints are rebuilt from what is actually sent.
fn inconsistent_deal<R: Rng + ?Sized>(
    sc: &Scenario,
    params: &DealParams,
    secret: &FieldElement,
    rng: &mut R,
) -> Result<(BroadcastMessage, Vec<PrivateMessage>), HarnessError> {
    let field = params.field();
    let first = Polynomial::random(field, secret, params.threshold(), rng).map_err(ProtocolError::from)?;
    let (commitments, witnesses) = protocol::commit_polynomial(params.public_key(), &first, rng)?;

    let mut second = None;
    for _ in 0..1024 {
        let constant = match sc.variant {
            InconsistentVariant::SameSecret => secret.clone(),
            InconsistentVariant::DifferentSecret => loop {
                let s = field.random_element(rng);
                if s != *secret {
                    break s;
                }
            },
        };
        let candidate = Polynomial::random(field, &constant, params.threshold(), rng).map_err(ProtocolError::from)?;
        let differs = sc.targets.iter().all(|&i| {
            let x = field.reduce(&BigUint::from(i));
            candidate.eval(field, &x) != first.eval(field, &x)
        });
        if differs {
            second = Some(candidate);
            break;
        }
    }
    let second = second.ok_or_else(|| invalid("could not find a polynomial differing at every target"))?;

    let messages: Vec<PrivateMessage> = (1..=params.shares() as u64)
        .map(|i| {
            let poly = if sc.targets.contains(&i) { &second } else { &first };
            let value = poly.eval(field, &field.reduce(&BigUint::from(i)));
            PrivateMessage {
                share: Share::new(i, value),
                hint: protocol::consistency_hint(params, poly, &witnesses, i),
            }
        })
        .collect();
    let shares: Vec<Share> = messages.iter().map(|m| m.share.clone()).collect();
    let registry = HashRegistry::build(&shares, secret, params.digest());
    let bm = BroadcastMessage::new(params.clone(), commitments, registry)?;
    Ok((bm, messages))
}

/// Executes one scenario end to end.
pub fn run_scenario(sc: &Scenario) -> Result<Transcript, HarnessError> {
    sc.validate()?;
    let mut rng = ChaCha20Rng::seed_from_u64(sc.seed);
    let mut run = Run { events: Vec::new() };

    let field = FieldParams::new(sc.field_prime.clone()).map_err(ProtocolError::from)?;
    let (pk, sk) = match sc.key {
        KeyProfile::Smallest => benaloh::smallest_keypair(&sc.field_prime),
        KeyProfile::Random { bits } => benaloh::keygen(&sc.field_prime, bits, &mut rng),
    }
    .map_err(ProtocolError::from)?;
    run.log(Event::KeyReady { modulus: pk.modulus().clone(), base: pk.base().clone(), order: pk.order().clone() });
    let params = DealParams::new(sc.threshold, sc.shares, field.clone(), pk)?;
    let secret = field.element(sc.secret.clone()).map_err(ProtocolError::from)?;

    // Dealer.
    let (broadcast, messages, mut state) = match sc.kind {
        ScenarioKind::DealerInconsistent => {
            let (bm, msgs) = inconsistent_deal(sc, &params, &secret, &mut rng)?;
            (bm, msgs, None)
        }
        _ => {
            let Deal { broadcast, messages, state } = protocol::deal(&secret, &params, Some(sk), &mut rng)?;
            let broadcast = if sc.kind == ScenarioKind::SecretMismatch {
                let other = field.add(&secret, &field.reduce(&BigUint::from(1u32)));
                let (p, c, mut reg) = broadcast.into_parts();
                reg.secret_digest = registry::digest_secret(other.value());
                BroadcastMessage::new(p, c, reg)?
            } else {
                broadcast
            };
            (broadcast, messages, Some(state))
        }
    };
    run.log(Event::Broadcast {
        commitments: broadcast.commitments().as_slice().iter().map(|c| c.value().clone()).collect(),
        secret_digest: broadcast.registry().secret_digest,
    });

    // Private channels, with an optional intruder on the wire.
    let mut held = Vec::with_capacity(messages.len());
    for mut pm in messages {
        let to = pm.share.index;
        run.log(Event::PrivateSent { to, value: pm.share.value.value().clone() });
        if sc.kind == ScenarioKind::IntruderTamper && sc.targets.contains(&to) {
            let replaced = sc.rule.apply(&field, &pm.share.value, &mut rng);
            run.log(Event::Tampered {
                to,
                original: pm.share.value.value().clone(),
                replaced: replaced.value().clone(),
            });
            pm.share.value = replaced;
        }
        run.log(Event::Delivered { to, value: pm.share.value.value().clone() });
        held.push(pm);
    }

    // Shareholders verify in index order.
    let mut verdicts = BTreeMap::new();
    let mut ordered = Vec::with_capacity(held.len());
    for pm in &held {
        let party = pm.share.index;
        let verdict = protocol::verify_share(&broadcast, pm)?;
        run.log(Event::Verdict { party, verdict });
        if let Some(failure) = verdict.failure() {
            run.log(Event::Complaint { party, failure });
        }
        verdicts.insert(party, verdict);
        ordered.push(verdict);
    }

    let complaints: Vec<u64> = verdicts.iter().filter(|(_, v)| !v.is_accepted()).map(|(i, _)| *i).collect();
    let mut discarded = false;
    match state.as_mut() {
        Some(st) => match st.discard(&ordered) {
            Ok(()) => {
                discarded = true;
                run.log(Event::DealerDiscarded);
            }
            Err(ProtocolError::NotAllAccepted { rejected }) => {
                run.log(Event::DealHalted { complaints: rejected });
            }
            Err(e) => return Err(e.into()),
        },
        // The cheating dealer keeps its material either way.
        None => {
            if complaints.is_empty() {
                run.log(Event::DealerDiscarded);
                discarded = true;
            } else {
                run.log(Event::DealHalted { complaints: complaints.clone() });
            }
        }
    }

    // Submission.
    let mut submitted = Vec::with_capacity(held.len());
    for pm in &held {
        let party = pm.share.index;
        let forged = sc.kind == ScenarioKind::ShareholderFake && sc.targets.contains(&party);
        let value = if forged { sc.rule.apply(&field, &pm.share.value, &mut rng) } else { pm.share.value.clone() };
        run.log(Event::Submitted { party, value: value.value().clone(), forged });
        submitted.push(Share::new(party, value));
    }

    let result = protocol::reconstruct(&broadcast, &submitted);
    run.log(Event::Reconstructed(result.clone()));

    Ok(Transcript { scenario: sc.clone(), events: run.events, verdicts, discarded, result })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpectedVerdict {
    Accept,
    /// Either failure kind is acceptable.
    RejectAny,
    Reject(VerificationFailure),
}

impl ExpectedVerdict {
    fn admits(&self, v: &VerificationVerdict) -> bool {
        match (self, v) {
            (Self::Accept, VerificationVerdict::Accepted) => true,
            (Self::RejectAny, VerificationVerdict::Rejected(_)) => true,
            (Self::Reject(want), VerificationVerdict::Rejected(got)) => want == got,
            _ => false,
        }
    }
}

/// The verdict and reconstruction pattern a transcript must show. `None`
/// fields are unconstrained.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expectation {
    pub verdicts: BTreeMap<u64, ExpectedVerdict>,
    pub rejected_shares: Option<BTreeSet<u64>>,
    pub secret_recovered: Option<bool>,
    pub secret_verified: Option<bool>,
}

impl Expectation {
    /// Human-readable list of every deviation; empty when the transcript matches.
    pub fn mismatches(&self, tr: &Transcript) -> Vec<String> {
        let mut out = Vec::new();
        if tr.verdicts.len() != self.verdicts.len() {
            out.push(format!("expected {} verdicts, saw {}", self.verdicts.len(), tr.verdicts.len()));
        }
        for (i, want) in &self.verdicts {
            match tr.verdicts.get(i) {
                Some(got) if want.admits(got) => {}
                got => out.push(format!("shareholder {i}: expected {want:?}, saw {got:?}")),
            }
        }
        if let Some(want) = &self.rejected_shares {
            if *want != tr.result.rejected_shares {
                out.push(format!("rejected shares: expected {want:?}, saw {:?}", tr.result.rejected_shares));
            }
        }
        if let Some(want) = self.secret_recovered {
            if want != tr.result.secret.is_some() {
                out.push(format!("secret recovered: expected {want}"));
            }
        }
        if let Some(want) = self.secret_verified {
            if want != tr.result.secret_verified {
                out.push(format!("secret verified: expected {want}"));
            }
        }
        out
    }

    pub fn matches(&self, tr: &Transcript) -> bool {
        self.mismatches(tr).is_empty()
    }
}

/// What each scenario must produce.
pub fn scenario_expectations(sc: &Scenario) -> Expectation {
    let n = sc.shares as u64;
    let all = |v: ExpectedVerdict| (1..=n).map(|i| (i, v)).collect::<BTreeMap<_, _>>();
    let with_targets = |v: ExpectedVerdict| {
        (1..=n)
            .map(|i| (i, if sc.targets.contains(&i) { v } else { ExpectedVerdict::Accept }))
            .collect::<BTreeMap<_, _>>()
    };
    let enough_honest = sc.shares - sc.targets.len() >= sc.threshold;

    match sc.kind {
        ScenarioKind::Honest => Expectation {
            verdicts: all(ExpectedVerdict::Accept),
            rejected_shares: Some(BTreeSet::new()),
            secret_recovered: Some(true),
            secret_verified: Some(true),
        },
        ScenarioKind::DealerInconsistent => Expectation {
            verdicts: with_targets(ExpectedVerdict::RejectAny),
            rejected_shares: None,
            secret_recovered: None,
            secret_verified: None,
        },
        ScenarioKind::ShareholderFake => Expectation {
            verdicts: all(ExpectedVerdict::Accept),
            rejected_shares: Some(sc.targets.clone()),
            secret_recovered: Some(enough_honest),
            secret_verified: Some(enough_honest),
        },
        ScenarioKind::IntruderTamper => Expectation {
            verdicts: with_targets(ExpectedVerdict::Reject(VerificationFailure::HashMismatch)),
            rejected_shares: Some(sc.targets.clone()),
            secret_recovered: Some(enough_honest),
            secret_verified: Some(enough_honest),
        },
        ScenarioKind::SecretMismatch => Expectation {
            verdicts: all(ExpectedVerdict::Accept),
            rejected_shares: Some(BTreeSet::new()),
            secret_recovered: Some(true),
            secret_verified: Some(false),
        },
    }
}
