use proptest::prelude::*;
use treeprod::diary::{encode, encode_with_rest, reconstruct, Sentence, Token};
use treeprod::morse_thue::{decorate, is_well_decorated, strip};

fn sentence() -> impl Strategy<Value = Sentence<Token<u8>>> {
    prop::collection::vec(prop::collection::vec(0u8..3, 0..6), 1..7)
        .prop_map(|words| Sentence::from_letter_words(&words))
}

proptest! {
    #[test]
    fn encoded_sentence_is_a_member(s in sentence(), kappa in 1usize..6) {
        let (diary, rest) = encode_with_rest(&s, kappa).unwrap();
        prop_assert_eq!(diary.pages.len(), s.word_count());
        let hat = reconstruct(&diary).unwrap();
        prop_assert!(hat.contains(&s));
        prop_assert_eq!(hat.rest_of(&s), Some(rest));
    }

    #[test]
    fn every_fill_shares_the_diary(
        s in sentence(),
        kappa in 1usize..6,
        fills in prop::collection::vec(prop::collection::vec(0u8..3, 0..5), 7),
    ) {
        let diary = encode(&s, kappa).unwrap();
        let hat = reconstruct(&diary).unwrap();
        let filled = hat.fill_slots(&fills[..hat.slot_count()]).unwrap();
        prop_assert!(hat.contains(&filled));
        prop_assert_eq!(encode(&filled, kappa).unwrap(), diary);
    }

    #[test]
    fn decorated_sentences_round_trip(s in sentence(), kappa in 1usize..6) {
        let d = decorate(&s);
        prop_assert!(is_well_decorated(&d));
        prop_assert_eq!(strip(&d), s);
        let hat = reconstruct(&encode(&d, kappa).unwrap()).unwrap();
        prop_assert!(hat.contains(&d));
    }

    #[test]
    fn large_kappa_diary_is_honest(s in sentence()) {
        let kappa = s.tokens().len() + 1;
        let hat = reconstruct(&encode(&s, kappa).unwrap()).unwrap();
        prop_assert!(hat.is_honest());
        prop_assert!(hat.contains(&s));
    }
}
