use proptest::prelude::*;
use treeprod::diary::{Sentence, Token};
use treeprod::morse_thue::{decorate, mt_bit, mt_prefix, synchronize_check, Verdict};

fn words(max: usize) -> impl Strategy<Value = Vec<Vec<u8>>> {
    prop::collection::vec(prop::collection::vec(0u8..3, 0..10), 1..5).prop_map(move |mut w| {
        w.truncate(max);
        w
    })
}

proptest! {
    #[test]
    fn decorated_tails_synchronize(
        tail in words(4),
        head_a in prop::collection::vec(0u8..3, 0..30),
        head_b in prop::collection::vec(0u8..3, 0..30),
        l in 1u64..24,
    ) {
        let join = |head: &[u8]| {
            let mut w = vec![head.to_vec()];
            w.extend(tail.iter().cloned());
            decorate(&Sentence::<Token<u8>>::from_letter_words(&w))
        };
        let (a, b) = (join(&head_a), join(&head_b));
        prop_assert_ne!(synchronize_check(&a, &b, l), Verdict::Violated, "{} vs {}", a, b);
    }

    #[test]
    fn prefix_matches_bits(n in 0usize..2000) {
        let p = mt_prefix(n);
        prop_assert_eq!(p.len(), n);
        prop_assert!(p.iter().enumerate().all(|(k, &b)| b == mt_bit(k as u64)));
    }
}
