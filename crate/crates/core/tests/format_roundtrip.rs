use std::collections::BTreeMap;

use num_bigint::BigUint;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use vss_core::benaloh::keygen;
use vss_core::field::FieldParams;
use vss_core::format::{PublicFile, PublicParams, ShareFile};
use vss_core::protocol::{deal, DealParams};
use vss_core::registry::Digest;

fn biguint() -> impl Strategy<Value = BigUint> {
    prop::collection::vec(any::<u8>(), 0..48).prop_map(|b| BigUint::from_bytes_be(&b))
}

fn digest() -> impl Strategy<Value = Digest> {
    any::<[u8; 32]>().prop_map(Digest::from_bytes)
}

fn public_file() -> impl Strategy<Value = PublicFile> {
    (
        (biguint(), any::<u64>(), any::<u64>(), biguint(), biguint(), biguint()),
        prop::collection::vec(biguint(), 0..6),
        digest(),
        digest(),
        prop::collection::btree_map(1u64..1000, digest(), 0..8),
    )
        .prop_map(
            |((field_prime, threshold, shares, modulus, base, order), commitments, pd, sd, share_digests)| PublicFile {
                params: PublicParams { field_prime, threshold, shares, modulus, base, order },
                commitments,
                params_digest: pd,
                secret_digest: sd,
                share_digests,
            },
        )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn public_file_round_trips(pf in public_file()) {
        let text = pf.to_canonical_string();
        let parsed = PublicFile::parse(text.as_bytes()).unwrap();
        prop_assert_eq!(&parsed, &pf);
        prop_assert_eq!(parsed.to_canonical_string(), text);
    }

    #[test]
    fn share_file_round_trips(index in any::<u64>(), value in biguint(), hint in biguint()) {
        let sf = ShareFile { index, value, hint };
        let text = sf.to_canonical_string();
        let parsed = ShareFile::parse(text.as_bytes()).unwrap();
        prop_assert_eq!(&parsed, &sf);
        prop_assert_eq!(parsed.to_canonical_string(), text);
    }
}

#[test]
fn public_file_carries_no_secret_material() {
    let m127: BigUint = (BigUint::from(1u32) << 127usize) - 1u32;
    let field = FieldParams::new(m127.clone()).unwrap();
    let mut rng = ChaCha20Rng::seed_from_u64(17);
    let (pk, _) = keygen(&m127, 160, &mut rng).unwrap();
    let params = DealParams::new(3, 5, field.clone(), pk).unwrap();
    for _ in 0..5 {
        let secret = field.random_element(&mut rng);
        let d = deal(&secret, &params, None, &mut rng).unwrap();
        let text = PublicFile::from_broadcast(&d.broadcast).to_canonical_string();
        let poly = d.state.polynomial().unwrap();
        let mut forbidden: BTreeMap<String, &str> = BTreeMap::new();
        for (j, a) in poly.coefficients().iter().enumerate() {
            let what = if j == 0 { "secret" } else { "coefficient" };
            forbidden.insert(a.value().to_string(), what);
            forbidden.insert(a.value().to_str_radix(16), what);
        }
        for w in d.state.witnesses().unwrap() {
            forbidden.insert(w.value().to_string(), "witness");
        }
        for pm in &d.messages {
            forbidden.insert(pm.share.value.value().to_string(), "share");
            forbidden.insert(pm.hint.value().to_string(), "hint");
        }
        for (needle, what) in forbidden {
            // Values this short could collide with digits by chance.
            if needle.len() >= 16 {
                assert!(!text.contains(&needle), "{what} {needle} leaked");
            }
        }
    }
}
