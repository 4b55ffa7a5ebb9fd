use std::collections::BTreeSet;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use vss_core::benaloh::{self, keygen, smallest_keypair};
use vss_core::field::{lagrange_reconstruct, FieldParams, Share};
use vss_core::protocol::{consistency_holds, deal, reconstruct, verify_share, DealParams, VerificationVerdict};

fn big(v: u64) -> BigUint {
    BigUint::from(v)
}

fn toy_params(t: usize, n: usize) -> DealParams {
    let field = FieldParams::new(big(17)).unwrap();
    let (pk, _) = smallest_keypair(&big(17)).unwrap();
    DealParams::new(t, n, field, pk).unwrap()
}

#[test]
fn honest_deals_always_verify() {
    let mut rng = ChaCha20Rng::seed_from_u64(11);
    let mut keys = std::collections::HashMap::new();
    for case in 0..500u64 {
        let p = [17u64, 251, 65537][(case % 3) as usize];
        let n = rng.gen_range(1..=6usize);
        let t = rng.gen_range(1..=n);
        // One random key per prime keeps the sweep fast; the toy key covers p = 17.
        let pk = keys
            .entry(p)
            .or_insert_with(|| {
                if p == 17 {
                    smallest_keypair(&big(p)).unwrap().0
                } else {
                    keygen(&big(p), 64, &mut ChaCha20Rng::seed_from_u64(p)).unwrap().0
                }
            })
            .clone();
        let field = FieldParams::new(big(p)).unwrap();
        let params = DealParams::new(t, n, field.clone(), pk).unwrap();
        let secret = field.random_element(&mut rng);
        let d = deal(&secret, &params, None, &mut rng).unwrap();
        for pm in &d.messages {
            assert_eq!(verify_share(&d.broadcast, pm).unwrap(), VerificationVerdict::Accepted, "case {case}");
        }
    }
}

#[test]
fn every_wrong_value_fails_the_congruence() {
    let params = toy_params(3, 5);
    let field = params.field().clone();
    for seed in 0..20u64 {
        let secret = field.element(big(seed % 17)).unwrap();
        let d = deal(&secret, &params, None, &mut ChaCha20Rng::seed_from_u64(seed)).unwrap();
        for pm in &d.messages {
            let mut failures = 0;
            for v in 0..17u64 {
                let value = field.element(big(v)).unwrap();
                let holds = consistency_holds(&d.broadcast, &Share::new(pm.share.index, value.clone()), &pm.hint);
                if value == pm.share.value {
                    assert!(holds);
                } else {
                    assert!(!holds, "seed {seed}, index {}, wrong value {v}", pm.share.index);
                    failures += 1;
                }
            }
            assert_eq!(failures, 16);
        }
    }
}

#[test]
fn accepted_deals_are_t_consistent() {
    let params = toy_params(3, 6);
    let field = params.field().clone();
    for seed in 0..30u64 {
        let secret = field.element(big((seed * 5) % 17)).unwrap();
        let d = deal(&secret, &params, None, &mut ChaCha20Rng::seed_from_u64(seed)).unwrap();
        assert!(d.messages.iter().all(|pm| verify_share(&d.broadcast, pm).unwrap().is_accepted()));
        let shares: Vec<Share> = d.messages.iter().map(|m| m.share.clone()).collect();
        for mask in 0u32..64 {
            if mask.count_ones() != 3 {
                continue;
            }
            let subset: Vec<Share> =
                shares.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, s)| s.clone()).collect();
            let s = lagrange_reconstruct(&field, &subset).unwrap();
            assert_eq!(s, secret);
            assert!(d.broadcast.registry().check_secret(&s));
            let r = reconstruct(&d.broadcast, &subset);
            assert_eq!(r.secret, Some(secret.clone()));
            assert!(r.secret_verified);
        }
    }
}

#[test]
fn any_altered_submission_is_rejected() {
    let params = toy_params(2, 5);
    let field = params.field().clone();
    let secret = field.element(big(9)).unwrap();
    let d = deal(&secret, &params, None, &mut ChaCha20Rng::seed_from_u64(99)).unwrap();
    let honest: Vec<Share> = d.messages.iter().map(|m| m.share.clone()).collect();
    for target in 0..5 {
        for v in 0..17u64 {
            let value = field.element(big(v)).unwrap();
            if value == honest[target].value {
                continue;
            }
            let mut submitted = honest.clone();
            submitted[target].value = value;
            let r = reconstruct(&d.broadcast, &submitted);
            assert_eq!(r.rejected_shares, BTreeSet::from([target as u64 + 1]));
            assert_eq!(r.secret, Some(secret.clone()));
            assert!(r.secret_verified);
        }
    }
}

#[test]
fn commitment_to_the_secret_decrypts() {
    let mut rng = ChaCha20Rng::seed_from_u64(5);
    let (pk, sk) = keygen(&big(251), 64, &mut rng).unwrap();
    let field = FieldParams::new(big(251)).unwrap();
    let params = DealParams::new(3, 5, field.clone(), pk).unwrap();
    for s in [0u64, 1, 128, 250] {
        let secret = field.element(big(s)).unwrap();
        let d = deal(&secret, &params, Some(sk.clone()), &mut rng).unwrap();
        let poly = d.state.polynomial().unwrap();
        for (c, a) in d.broadcast.commitments().as_slice().iter().zip(poly.coefficients()) {
            assert_eq!(&benaloh::decrypt(&sk, params.public_key(), c).unwrap(), a.value());
        }
    }
}
