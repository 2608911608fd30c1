use discursive_ledger::*;
use proptest::prelude::*;

fn build(len: usize, salt: &str) -> Ledger {
    let mut l = Ledger::genesis(Salt::new(salt).unwrap(), Timestamp::epoch());
    for i in 1..len {
        let kind = [Kind::Initial, Kind::Critique, Kind::Harmonization, Kind::Revision][i % 4];
        l.append(Payload::new(
            format!("agent-{}", i % 3),
            kind,
            format!("statement {i}: the value is {}", i * 7),
            Timestamp::from_millis(i as i64).unwrap(),
        ))
        .unwrap();
    }
    l
}

fn flip(s: &str, pos: usize) -> String {
    let mut bytes = s.as_bytes().to_vec();
    bytes[pos] ^= 0x01;
    String::from_utf8(bytes).unwrap_or_else(|_| format!("{s}x"))
}

#[test]
fn every_message_byte_flip_is_caught() {
    let l = build(50, "tamper");
    for j in 0..l.len() {
        for pos in 0..l.blocks()[j].message.len() {
            let mut t = l.clone();
            let m = flip(&t.blocks()[j].message, pos);
            t.blocks_mut()[j].message = m;
            assert_eq!(t.verify(), Verdict::ContentMismatch(j as u64), "block {j} byte {pos}");
        }
    }
}

#[test]
fn every_timestamp_flip_is_caught() {
    let l = build(50, "tamper");
    for j in 0..l.len() {
        let mut t = l.clone();
        let ts = flip(&t.blocks()[j].timestamp, 20);
        t.blocks_mut()[j].timestamp = ts;
        assert_eq!(t.verify(), Verdict::ContentMismatch(j as u64));
    }
}

#[test]
fn hash_substitution_is_caught() {
    let l = build(50, "tamper");
    let bogus = Digest([0xab; 32]);
    for j in 0..l.len() {
        let mut t = l.clone();
        t.blocks_mut()[j].content_hash = bogus;
        assert_eq!(t.verify(), Verdict::ContentMismatch(j as u64));

        let mut t = l.clone();
        t.blocks_mut()[j].chain_hash = bogus;
        assert_eq!(t.verify(), Verdict::ChainMismatch(j as u64));
    }
}

#[test]
fn index_edits_are_caught() {
    let l = build(50, "tamper");
    for j in 0..l.len() {
        let mut t = l.clone();
        t.blocks_mut()[j].index += 1;
        assert_eq!(t.verify(), Verdict::ChainMismatch(j as u64));
    }
}

#[test]
fn deletions_are_caught() {
    let l = build(50, "tamper");
    let head = *l.head().unwrap();
    for j in 0..l.len() {
        let mut t = l.clone();
        t.blocks_mut().remove(j);
        assert_eq!(
            t.verify_against_head(l.len(), &head),
            Verdict::ChainMismatch(j as u64),
            "deleted {j}"
        );
    }
}

#[test]
fn forged_block_without_salt_is_caught() {
    let l = build(20, "tamper");
    let attacker = Salt::new("guess").unwrap();
    for j in 1..l.len() {
        let mut t = l.clone();
        let b = &mut t.blocks_mut()[j];
        b.message = "forged".into();
        b.content_hash = content_hash(&b.message, &b.timestamp, &attacker);
        assert_eq!(t.verify(), Verdict::ContentMismatch(j as u64));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn any_single_field_mutation_is_caught(len in 1usize..=50, pick in any::<prop::sample::Index>(), field in 0u8..5) {
        let l = build(len, "prop");
        let j = pick.index(len);
        let mut t = l.clone();
        let b = &mut t.blocks_mut()[j];
        match field {
            0 => b.message.push('.'),
            1 => b.timestamp = "2099-01-01T00:00:00.000Z".into(),
            2 => b.content_hash.0[0] ^= 0x80,
            3 => b.chain_hash.0[31] ^= 0x01,
            _ => b.index = b.index.wrapping_add(3),
        }
        let v = t.verify();
        prop_assert!(!v.is_verified());
        prop_assert_eq!(v.failing_index(), Some(j as u64));
    }

    #[test]
    fn prefixes_verify_and_appends_preserve_bytes(len in 1usize..=40, extra in 1usize..10) {
        let l = build(len, "prefix");
        for k in 1..=len {
            let prefix = Ledger::from_blocks(l.salt().clone(), l.blocks()[..k].to_vec());
            prop_assert!(prefix.verify().is_verified());
        }
        let mut grown = l.clone();
        for i in 0..extra {
            grown.append(Payload::new("x", Kind::Revision, format!("more {i}"), Timestamp::epoch())).unwrap();
        }
        prop_assert_eq!(&grown.blocks()[..len], l.blocks());
    }

    #[test]
    fn construction_is_deterministic(len in 1usize..=30) {
        prop_assert_eq!(to_jsonl(&build(len, "det")), to_jsonl(&build(len, "det")));
    }
}
