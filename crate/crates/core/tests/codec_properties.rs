mod common;

use std::collections::HashMap;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use safe_core::chem::{canonical_smiles, is_isomorphic, parse_smiles, MolecularGraph};
use safe_core::codec::{
    canonical_safe, decode_safe, encode_safe, encode_with_cuts, list_fragments, randomize_safe, CodecError, CutSource,
};
use safe_core::fragment::default_rules;
use safe_core::tokenizer::{pretokenize, ring_label};

use common::{arb_molecule, corpus_sample};

/// Highest ring-closure number in a SMILES string, scanning outside
/// brackets for bare digits and `%nn`.
fn highest_digit(smiles: &str) -> u16 {
    let mut max = 0;
    let mut chars = smiles.chars().peekable();
    let mut in_bracket = false;
    while let Some(c) = chars.next() {
        match c {
            '[' => in_bracket = true,
            ']' => in_bracket = false,
            '%' if !in_bracket => {
                let tens = chars.next().and_then(|d| d.to_digit(10)).unwrap();
                let ones = chars.next().and_then(|d| d.to_digit(10)).unwrap();
                max = max.max((tens * 10 + ones) as u16);
            }
            d if !in_bracket && d.is_ascii_digit() => max = max.max(d.to_digit(10).unwrap() as u16),
            _ => {}
        }
    }
    max
}

fn blocks(text: &str) -> Vec<&str> {
    text.split('.').collect()
}

fn label_counts(text: &str) -> HashMap<u16, usize> {
    let mut counts = HashMap::new();
    for tok in pretokenize(text).unwrap() {
        if let Some(l) = ring_label(tok) {
            *counts.entry(l).or_default() += 1;
        }
    }
    counts
}

fn check_encoding(mol: &MolecularGraph) {
    let (safe, report) = encode_safe(mol, &default_rules(), true).unwrap();
    let text = safe.as_str();
    // SAFE is SMILES, and decodes to the input
    let parsed = parse_smiles(text).unwrap_or_else(|e| panic!("{text}: {e}"));
    assert!(is_isomorphic(&parsed, mol), "{text}");
    assert!(is_isomorphic(&decode_safe(text).unwrap(), mol), "{text}");
    // numbering
    let max = highest_digit(&canonical_smiles(mol));
    assert_eq!(report.max_original_ring_digit, max, "{text}");
    assert_eq!(report.first_attachment_digit, max + 1, "{text}");
    if let Some(&first) = safe.attachment_digits.first() {
        assert_eq!(first, max + 1, "{text}");
    }
    // attachment labels: consecutive, each written exactly twice
    let counts = label_counts(text);
    for (k, &d) in safe.attachment_digits.iter().enumerate() {
        assert_eq!(d, max + 1 + k as u16, "{text}");
        assert_eq!(counts[&d], 2, "{text}");
    }
    // blocks: one per fragment, non-increasing heavy atoms
    assert_eq!(report.n_fragments, safe.fragment_spans.len());
    let heavy: Vec<usize> = list_fragments(text).unwrap().iter().map(|f| f.heavy_atom_count).collect();
    assert!(heavy.windows(2).all(|w| w[0] >= w[1]), "{text}");
    let spans: Vec<&str> = safe.blocks().collect();
    assert_eq!(spans, blocks(text));
    assert_eq!(report.cut_rule_source == CutSource::None, spans.len() == mol.components().len());
}

fn check_permutations(text: &str, seed: u64) {
    let reference = canonical_smiles(&decode_safe(text).unwrap());
    let canonical = canonical_safe(text).unwrap();
    assert_eq!(canonical_safe(canonical.as_str()).unwrap(), canonical, "{text}");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..5 {
        let mut parts = blocks(text);
        parts.shuffle(&mut rng);
        let shuffled = parts.join(".");
        assert_eq!(canonical_smiles(&decode_safe(&shuffled).unwrap()), reference, "{shuffled}");
        assert_eq!(canonical_safe(&shuffled).unwrap(), canonical, "{shuffled}");
    }
    for s in 0..5 {
        for reroot in [false, true] {
            let r = randomize_safe(text, seed + s, reroot).unwrap();
            assert_eq!(r, randomize_safe(text, seed + s, reroot).unwrap());
            assert_eq!(canonical_smiles(&decode_safe(r.as_str()).unwrap()), reference, "{}", r.text);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn random_molecules_encode_faithfully(mol in arb_molecule(14)) {
        check_encoding(&mol);
    }

    #[test]
    fn random_molecules_are_block_order_invariant(mol in arb_molecule(14), seed in any::<u64>()) {
        let (safe, _) = encode_safe(&mol, &default_rules(), false).unwrap();
        check_permutations(safe.as_str(), seed);
    }

    #[test]
    fn canonical_encoding_ignores_atom_order(mol in arb_molecule(12), order_seed in any::<u64>()) {
        let mut order: Vec<usize> = (0..mol.atom_count()).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(order_seed));
        let a = encode_safe(&mol, &default_rules(), true).unwrap().0;
        let b = encode_safe(&mol.permuted(&order), &default_rules(), true).unwrap().0;
        prop_assert_eq!(a, b);
    }
}

#[test]
fn corpus_encodings() {
    for (_, mol) in corpus_sample(1) {
        check_encoding(&mol);
    }
}

#[test]
fn corpus_block_permutations() {
    for (i, (_, mol)) in corpus_sample(3).into_iter().enumerate() {
        let (safe, _) = encode_safe(&mol, &default_rules(), true).unwrap();
        check_permutations(safe.as_str(), i as u64);
    }
}

#[test]
fn worked_examples() {
    let enc = |s: &str| encode_safe(&parse_smiles(s).unwrap(), &default_rules(), true).unwrap();
    let (safe, report) = enc("CCc1ccccc1");
    assert_eq!(safe.as_str(), "c12ccccc1.C2C");
    assert_eq!((report.n_fragments, report.max_original_ring_digit, report.first_attachment_digit), (2, 1, 2));

    let (safe, report) = enc("C");
    assert_eq!(safe.as_str(), "C");
    assert!(safe.attachment_digits.is_empty());
    assert_eq!(report.cut_rule_source, CutSource::None);

    let (safe, _) = enc("CC(=O)Nc1ccccc1");
    assert!(safe.fragment_spans.len() >= 2);
    assert!(safe.blocks().next().unwrap().starts_with('c'));

    assert_eq!(
        canonical_safe("C2C.c12ccccc1").unwrap(),
        canonical_safe("c12ccccc1.C2C").unwrap()
    );
    assert_eq!(decode_safe("C1CC1.C2C"), Err(CodecError::OpenAttachment { label: 2 }));
}

#[test]
fn ten_arm_star_uses_percent_labels() {
    // ten phenyl rings on a chain of ring-chain cuts
    let arms = "C(c1ccccc1)".repeat(10);
    let mol = parse_smiles(&format!("C{arms}")).unwrap();
    let (safe, report) = encode_safe(&mol, &default_rules(), true).unwrap();
    assert!(report.n_fragments > 10);
    assert!(safe.as_str().contains("%10"));
    assert!(safe.as_str().contains("%11"));
    assert!(is_isomorphic(&decode_safe(safe.as_str()).unwrap(), &mol));
}

#[test]
fn list_fragment_examples() {
    let frags = list_fragments("c12ccccc1.C2C").unwrap();
    let heavy: Vec<usize> = frags.iter().map(|f| f.heavy_atom_count).collect();
    assert_eq!(heavy, vec![6, 2]);
    assert_eq!(frags[0].attachments[0].label, frags[1].attachments[0].label);

    let prefix = list_fragments("c12ccccc1.").unwrap();
    assert_eq!(prefix.len(), 1);
    assert_eq!(prefix[0].attachments.len(), 1);
    assert_eq!(prefix[0].attachments[0].label, 2);

    assert!(list_fragments("C").unwrap()[0].attachments.is_empty());
}

#[test]
fn explicit_cut_errors() {
    let mol = parse_smiles("C1CC1C").unwrap();
    let ring_bond = mol.bond_between(0, 1).unwrap();
    assert!(matches!(encode_with_cuts(&mol, &[ring_bond], true), Err(CodecError::Fragment(_))));
    assert!(encode_with_cuts(&mol, &[42], true).is_err());
    let one_block = randomize_safe("c1ccccc1", 3, false).unwrap();
    assert_eq!(one_block.as_str(), "c1ccccc1");
}
