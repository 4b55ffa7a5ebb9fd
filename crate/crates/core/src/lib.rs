//! Verifiable threshold secret sharing.
//!
//! A dealer splits a secret with Shamir's scheme over a prime field, publishes
//! probabilistic homomorphic encryptions of the polynomial coefficients, and
//! keeps a public registry of SHA-256 digests of every share and of the
//! secret. Shareholders check their shares against both; at reconstruction
//! time the registry identifies forged submissions and confirms the
//! recovered secret.

pub mod arith;
pub mod benaloh;
pub mod field;
pub mod format;
pub mod harness;
pub mod protocol;
pub mod registry;

pub use benaloh::{Ciphertext, EncPrivateKey, EncPublicKey};
pub use field::{lagrange_reconstruct, FieldElement, FieldParams, Polynomial, Share};
pub use protocol::{
    deal, reconstruct, verify_share, BroadcastMessage, DealParams, PrivateMessage, ReconstructionResult,
    VerificationFailure, VerificationVerdict,
};
pub use registry::{Digest, HashRegistry};
