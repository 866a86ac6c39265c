//! The page codec: a sentence is written as one page per word, each page
//! recording up to `kappa` not-yet-written symbols backwards from the end of
//! the current word. Reconstruction recovers the preimage class as a
//! sentence with slots.

use std::fmt::{self, Debug, Display};
use std::hash::Hash;

use crate::error::DiaryError;

/// A symbol of a sentence; stop signs terminate words.
pub trait Symbol: Clone + Eq + Hash + Ord + Debug {
    fn is_stop(&self) -> bool;
}

/// Undecorated symbols: letters of some alphabet plus the stop sign.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Token<L> {
    Letter(L),
    Stop,
}

impl<L: Clone + Eq + Hash + Ord + Debug> Symbol for Token<L> {
    fn is_stop(&self) -> bool {
        matches!(self, Token::Stop)
    }
}

impl<L: Display> Display for Token<L> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Letter(l) => write!(f, "{l}"),
            Token::Stop => f.write_str("s"),
        }
    }
}

/// Words separated by stop signs; empty, or ending with a stop sign.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sentence<S> {
    tokens: Vec<S>,
}

impl<S: Symbol> Sentence<S> {
    pub fn new(tokens: Vec<S>) -> Result<Self, DiaryError> {
        match tokens.last() {
            Some(last) if !last.is_stop() => Err(DiaryError::Unterminated),
            _ => Ok(Self { tokens }),
        }
    }

    pub fn empty() -> Self {
        Self { tokens: Vec::new() }
    }

    /// Concatenates `letters_i stop_i`; letters must not contain stops.
    pub fn from_words(words: &[(Vec<S>, S)]) -> Result<Self, DiaryError> {
        let mut tokens = Vec::new();
        for (letters, stop) in words {
            if letters.iter().any(Symbol::is_stop) || !stop.is_stop() {
                return Err(DiaryError::Token("misplaced stop sign".into()));
            }
            tokens.extend(letters.iter().cloned());
            tokens.push(stop.clone());
        }
        Ok(Self { tokens })
    }

    pub fn tokens(&self) -> &[S] {
        &self.tokens
    }

    pub fn into_tokens(self) -> Vec<S> {
        self.tokens
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Letter runs of the words, stop signs removed.
    pub fn words(&self) -> Vec<&[S]> {
        let mut out = Vec::new();
        let mut start = 0;
        for (i, t) in self.tokens.iter().enumerate() {
            if t.is_stop() {
                out.push(&self.tokens[start..i]);
                start = i + 1;
            }
        }
        out
    }

    /// The stop sign closing each word.
    pub fn stops(&self) -> Vec<&S> {
        self.tokens.iter().filter(|t| t.is_stop()).collect()
    }

    pub fn word_count(&self) -> usize {
        self.tokens.iter().filter(|t| t.is_stop()).count()
    }

    /// The first `n` words with their stops.
    pub fn prefix_words(&self, n: usize) -> Self {
        let mut seen = 0;
        let end = self
            .tokens
            .iter()
            .position(|t| {
                if t.is_stop() {
                    seen += 1;
                }
                seen == n && t.is_stop()
            })
            .map_or(if n == 0 { 0 } else { self.tokens.len() }, |i| i + 1);
        Self { tokens: self.tokens[..end].to_vec() }
    }
}

impl<S: Display> Display for Sentence<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.tokens.iter().map(ToString::to_string).collect();
        f.write_str(&parts.join(" "))
    }
}

impl<L: Clone + Eq + Hash + Ord + Debug> Sentence<Token<L>> {
    /// Sentence `w_1 s w_2 s ... w_k s`.
    pub fn from_letter_words(words: &[Vec<L>]) -> Self {
        let mut tokens = Vec::new();
        for w in words {
            tokens.extend(w.iter().cloned().map(Token::Letter));
            tokens.push(Token::Stop);
        }
        Self { tokens }
    }
}

/// Parses space-separated tokens with `s` as the stop sign.
pub fn parse_sentence(text: &str) -> Result<Sentence<Token<String>>, DiaryError> {
    let tokens = text
        .split_whitespace()
        .map(|t| match t {
            "s" => Ok(Token::Stop),
            "*" | "_" => Err(DiaryError::Token(t.to_string())),
            _ => Ok(Token::Letter(t.to_string())),
        })
        .collect::<Result<Vec<_>, _>>()?;
    Sentence::new(tokens)
}

/// One page: exactly `kappa` symbols, or fewer followed by a star.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Page<S> {
    /// Symbols in page order, i.e. reversed relative to the sentence.
    pub tokens: Vec<S>,
    pub star: bool,
}

impl<S: Display> Display for Page<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.tokens {
            write!(f, "{t}")?;
        }
        if self.star {
            f.write_str("⋆")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Diary<S> {
    pub kappa: usize,
    pub pages: Vec<Page<S>>,
}

impl<S: Display> Diary<S> {
    /// `(page)(page)...` with symbols concatenated.
    pub fn compact(&self) -> String {
        self.pages.iter().map(|p| format!("({p})")).collect()
    }
}

/// Encodes `sentence` and also returns the symbols never written to a page.
pub fn encode_with_rest<S: Symbol>(
    sentence: &Sentence<S>,
    kappa: usize,
) -> Result<(Diary<S>, Sentence<S>), DiaryError> {
    if kappa == 0 {
        return Err(DiaryError::ZeroKappa);
    }
    let mut rest: Vec<S> = Vec::new();
    let mut pages = Vec::with_capacity(sentence.word_count());
    let mut start = 0;
    for (i, t) in sentence.tokens.iter().enumerate() {
        if !t.is_stop() {
            continue;
        }
        rest.extend_from_slice(&sentence.tokens[start..i]);
        let take = kappa.min(rest.len());
        let cut = rest.len() - take;
        let tokens: Vec<S> = rest[cut..].iter().rev().cloned().collect();
        pages.push(Page { tokens, star: take < kappa });
        rest.truncate(cut);
        rest.push(t.clone());
        start = i + 1;
    }
    Ok((Diary { kappa, pages }, Sentence { tokens: rest }))
}

pub fn encode<S: Symbol>(sentence: &Sentence<S>, kappa: usize) -> Result<Diary<S>, DiaryError> {
    encode_with_rest(sentence, kappa).map(|(d, _)| d)
}

/// Symbols of `sentence` that no page records; always ends with the final stop.
pub fn rest_sentence<S: Symbol>(sentence: &Sentence<S>, kappa: usize) -> Result<Sentence<S>, DiaryError> {
    encode_with_rest(sentence, kappa).map(|(_, r)| r)
}

/// A word of a slotted sentence: an optional leading slot, the known letters
/// after it, and the stop sign when some page recorded it.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SlotWord<S> {
    pub slot: bool,
    pub letters: Vec<S>,
    pub stop: Option<S>,
}

/// One stop-terminated piece of the unwritten rest.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RestPart {
    /// Empty content, then the stop of word `stop_of`.
    Residue { stop_of: usize },
    /// The slot content of word `word`, then the stop of word `stop_of`.
    Slot { word: usize, stop_of: usize },
}

/// A sentence with slots, together with the layout of its unwritten rest.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SlottedSentence<S> {
    pub words: Vec<SlotWord<S>>,
    pub rest: Vec<RestPart>,
}

/// Rebuilds the slotted sentence whose fillings are exactly the preimages of `diary`.
pub fn reconstruct<S: Symbol>(diary: &Diary<S>) -> Result<SlottedSentence<S>, DiaryError> {
    let kappa = diary.kappa;
    if kappa == 0 {
        return Err(DiaryError::ZeroKappa);
    }
    let mut words: Vec<SlotWord<S>> = Vec::with_capacity(diary.pages.len());
    let mut rest: Vec<RestPart> = Vec::new();
    for (i, page) in diary.pages.iter().enumerate() {
        let shape_ok = if page.star { page.tokens.len() < kappa } else { page.tokens.len() == kappa };
        if !shape_ok {
            return Err(DiaryError::PageShape { page: i, kappa });
        }
        // Forward order g_0 S_0 g_1 ... S_{t-1} g_t.
        let forward: Vec<S> = page.tokens.iter().rev().cloned().collect();
        let mut groups: Vec<Vec<S>> = vec![Vec::new()];
        let mut stops: Vec<S> = Vec::new();
        for t in forward {
            if t.is_stop() {
                stops.push(t);
                groups.push(Vec::new());
            } else {
                groups.last_mut().expect("nonempty").push(t);
            }
        }
        let t = stops.len();
        let q = rest.len();
        let inconsistent = || DiaryError::Inconsistent { page: i };
        if t > q || (page.star && t != q) {
            return Err(inconsistent());
        }
        let current = groups.pop().expect("at least one group");
        if t == 0 {
            words.push(SlotWord { slot: !page.star, letters: current, stop: None });
            if page.star {
                rest = vec![RestPart::Residue { stop_of: i }];
            } else {
                rest.push(RestPart::Slot { word: i, stop_of: i });
            }
            continue;
        }
        words.push(SlotWord { slot: false, letters: current, stop: None });
        for (k, (content, stop)) in groups.into_iter().zip(stops).enumerate() {
            let part = rest[q - t + k];
            let full = k > 0 || page.star;
            match part {
                RestPart::Residue { stop_of } => {
                    if !content.is_empty() {
                        return Err(inconsistent());
                    }
                    words[stop_of].stop = Some(stop);
                }
                RestPart::Slot { word, stop_of } => {
                    let w = &mut words[word];
                    let mut letters = content;
                    letters.append(&mut w.letters);
                    w.letters = letters;
                    if full {
                        w.slot = false;
                    }
                    words[stop_of].stop = Some(stop);
                }
            }
        }
        if page.star {
            rest = vec![RestPart::Residue { stop_of: i }];
        } else {
            rest.truncate(q - t + 1);
            let last = rest.last_mut().expect("q - t + 1 >= 1");
            *last = match *last {
                RestPart::Residue { .. } => RestPart::Residue { stop_of: i },
                RestPart::Slot { word, .. } => RestPart::Slot { word, stop_of: i },
            };
        }
    }
    Ok(SlottedSentence { words, rest })
}

impl<S: Symbol> SlottedSentence<S> {
    pub fn slot_count(&self) -> usize {
        self.words.iter().filter(|w| w.slot).count()
    }

    pub fn is_honest(&self) -> bool {
        self.slot_count() == 0
    }

    pub fn word_count(&self) -> usize {
        self.words.len()
    }

    /// Whether `sentence` arises by filling every slot with some word and
    /// every unrecorded stop with some stop sign.
    pub fn contains(&self, sentence: &Sentence<S>) -> bool {
        let words = sentence.words();
        let stops = sentence.stops();
        if words.len() != self.words.len() {
            return false;
        }
        self.words.iter().zip(words.iter().zip(stops)).all(|(w, (letters, stop))| {
            let letters_ok = if w.slot {
                letters.ends_with(&w.letters)
            } else {
                *letters == w.letters.as_slice()
            };
            letters_ok && w.stop.as_ref().is_none_or(|s| s == stop)
        })
    }

    /// The rest sentence of a member, read off the recorded rest layout.
    pub fn rest_of(&self, sentence: &Sentence<S>) -> Option<Sentence<S>> {
        if !self.contains(sentence) {
            return None;
        }
        let words = sentence.words();
        let stops = sentence.stops();
        let mut tokens = Vec::new();
        for part in &self.rest {
            let stop_of = match *part {
                RestPart::Residue { stop_of } => stop_of,
                RestPart::Slot { word, stop_of } => {
                    let full = words[word];
                    tokens.extend_from_slice(&full[..full.len() - self.words[word].letters.len()]);
                    stop_of
                }
            };
            tokens.push(stops[stop_of].clone());
        }
        Some(Sentence { tokens })
    }

    /// Fills the slots in order; unrecorded stops come from `stop_for(word index, tokens so far)`.
    pub fn fill_with(
        &self,
        fillings: &[Vec<S>],
        mut stop_for: impl FnMut(usize, &[S]) -> S,
    ) -> Result<Sentence<S>, DiaryError> {
        if fillings.len() != self.slot_count() {
            return Err(DiaryError::Arity { expected: self.slot_count(), given: fillings.len() });
        }
        let mut next = fillings.iter();
        let mut tokens = Vec::new();
        for (i, w) in self.words.iter().enumerate() {
            if w.slot {
                let fill = next.next().expect("arity checked");
                if fill.iter().any(Symbol::is_stop) {
                    return Err(DiaryError::Token("stop sign inside a slot filling".into()));
                }
                tokens.extend(fill.iter().cloned());
            }
            tokens.extend(w.letters.iter().cloned());
            let stop = w.stop.clone().unwrap_or_else(|| stop_for(i, &tokens));
            tokens.push(stop);
        }
        Sentence::new(tokens)
    }
}

impl<L: Clone + Eq + Hash + Ord + Debug> SlottedSentence<Token<L>> {
    pub fn fill_slots(&self, fillings: &[Vec<L>]) -> Result<Sentence<Token<L>>, DiaryError> {
        let fillings: Vec<Vec<Token<L>>> = fillings
            .iter()
            .map(|w| w.iter().cloned().map(Token::Letter).collect())
            .collect();
        self.fill_with(&fillings, |_, _| Token::Stop)
    }
}

impl<S: Display> SlottedSentence<S> {
    /// Text form with `_` for slots; unrecorded stops print as `s`.
    pub fn to_text(&self) -> String {
        let mut parts = Vec::new();
        for w in &self.words {
            if w.slot {
                parts.push("_".to_string());
            }
            parts.extend(w.letters.iter().map(ToString::to_string));
            parts.push(w.stop.as_ref().map_or_else(|| "s".to_string(), ToString::to_string));
        }
        parts.join(" ")
    }
}

/// Parses the slotted text syntax; `_` may only start a word.
pub fn parse_slotted(text: &str) -> Result<SlottedSentence<Token<String>>, DiaryError> {
    let mut words = Vec::new();
    let mut current = SlotWord { slot: false, letters: Vec::new(), stop: None };
    for t in text.split_whitespace() {
        match t {
            "s" => {
                current.stop = Some(Token::Stop);
                words.push(std::mem::replace(
                    &mut current,
                    SlotWord { slot: false, letters: Vec::new(), stop: None },
                ));
            }
            "_" if !current.slot && current.letters.is_empty() => current.slot = true,
            "_" | "*" => return Err(DiaryError::Token(t.to_string())),
            _ => current.letters.push(Token::Letter(t.to_string())),
        }
    }
    if current.slot || !current.letters.is_empty() {
        return Err(DiaryError::Unterminated);
    }
    let rest = words
        .iter()
        .enumerate()
        .filter(|(_, w)| w.slot)
        .map(|(i, _)| RestPart::Slot { word: i, stop_of: i })
        .collect();
    Ok(SlottedSentence { words, rest })
}

/// Number of symbols strictly between the `m`-th and `(m+p)`-th stop signs
/// (1-based; stop 0 is the start of the sentence).
pub fn symbols_between<S: Symbol>(sentence: &Sentence<S>, m: usize, p: usize) -> Option<usize> {
    let positions: Vec<usize> = sentence
        .tokens
        .iter()
        .enumerate()
        .filter(|(_, t)| t.is_stop())
        .map(|(i, _)| i)
        .collect();
    let at = |k: usize| -> Option<isize> {
        if k == 0 {
            Some(-1)
        } else {
            positions.get(k - 1).map(|&i| i as isize)
        }
    };
    let (a, b) = (at(m)?, at(m + p)?);
    Some((b - a - 1) as usize)
}

/// Length of the slot-free run of symbols just before the `(m+1)`-th stop of
/// a slotted sentence, and whether that run reaches the sentence start.
pub fn unslotted_run<S>(slotted: &SlottedSentence<S>, m: usize) -> (usize, bool) {
    let mut run = 0;
    for (i, w) in slotted.words[..=m].iter().enumerate().rev() {
        run += w.letters.len();
        if w.slot {
            return (run, false);
        }
        if i > 0 {
            run += 1; // the stop closing the previous word
        }
    }
    (run, true)
}

/// Whether the string-recovery bound holds for stops `m`, `m + p`; `None`
/// when the hypothesis `kappa p >= #(s_m, s_{m+p}) + 1` fails or indices are out of range.
pub fn string_recovery_holds<S: Symbol>(
    sentence: &Sentence<S>,
    slotted: &SlottedSentence<S>,
    kappa: usize,
    m: usize,
    p: usize,
) -> Option<bool> {
    if m == 0 || p == 0 || m + p > sentence.word_count() {
        return None;
    }
    let span = symbols_between(sentence, m, p)?;
    if kappa * p < span + 1 {
        return None;
    }
    let q = kappa * p - span;
    let need = kappa + q + symbols_between(sentence, m, 1)?;
    let (run, whole) = unslotted_run(slotted, m);
    Some(whole || run >= need)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(text: &str) -> Sentence<Token<String>> {
        parse_sentence(text).unwrap()
    }

    #[test]
    fn worked_example() {
        let alpha = s("a a b c s a s b c b s c s b s");
        let diary = encode(&alpha, 3).unwrap();
        assert_eq!(diary.compact(), "(cba)(asa)(bcb)(css)(bs⋆)");
        let hat = reconstruct(&diary).unwrap();
        assert!(hat.is_honest());
        assert_eq!(hat.fill_slots(&[]).unwrap(), alpha);
    }

    #[test]
    fn short_pages() {
        assert_eq!(encode(&s("a s"), 3).unwrap().compact(), "(a⋆)");
        let first = encode(&s("a b s c d s e s"), 3).unwrap();
        let second = encode(&s("c a b s d s e s"), 3).unwrap();
        assert_eq!(first.pages[0].to_string(), "ba⋆");
        assert_eq!(second.pages[0].to_string(), "bac");
    }

    #[test]
    fn first_page_alone() {
        let diary = encode(&s("a a b c s"), 3).unwrap();
        let hat = reconstruct(&diary).unwrap();
        assert_eq!(hat.to_text(), "_ a b c s");
        assert_eq!(hat.fill_slots(&[vec!["a".into()]]).unwrap(), s("a a b c s"));
        assert!(!hat.contains(&s("b c s")));
        assert!(reconstruct(&encode(&s("a s"), 3).unwrap()).unwrap().is_honest());
    }

    #[test]
    fn rest_examples() {
        let alpha = s("a a b c s a s b c b s c s b s");
        assert_eq!(rest_sentence(&alpha.prefix_words(1), 3).unwrap(), s("a s"));
        assert_eq!(rest_sentence(&alpha, 3).unwrap(), s("s"));
        assert_eq!(rest_sentence(&s("a b s"), 1).unwrap(), s("a s"));
    }

    #[test]
    fn residue_after_honest_prefix() {
        // The stop left behind by a starred page stays in the rest.
        let alpha = s("a s b b b b s");
        let diary = encode(&alpha, 3).unwrap();
        let hat = reconstruct(&diary).unwrap();
        assert_eq!(rest_sentence(&alpha, 3).unwrap(), s("s b s"));
        assert_eq!(hat.rest_of(&alpha).unwrap(), s("s b s"));
    }

    #[test]
    fn empty_sentence_and_errors() {
        let empty = Sentence::<Token<String>>::empty();
        assert!(encode(&empty, 2).unwrap().pages.is_empty());
        assert!(encode(&s("a s"), 0).is_err());
        assert!(parse_sentence("a b").is_err());
        let hat = parse_slotted("_ a b c s").unwrap();
        assert!(matches!(hat.fill_slots(&[]), Err(DiaryError::Arity { expected: 1, given: 0 })));
        assert_eq!(parse_slotted("a s").unwrap().fill_slots(&[]).unwrap(), s("a s"));
    }

    #[test]
    fn malformed_diaries() {
        let bad_shape = Diary { kappa: 3, pages: vec![Page { tokens: vec![Token::Letter("a")], star: false }] };
        assert!(matches!(reconstruct(&bad_shape), Err(DiaryError::PageShape { page: 0, .. })));
        let too_many_stops = Diary {
            kappa: 2,
            pages: vec![Page { tokens: vec![Token::Stop, Token::Letter("a")], star: false }],
        };
        assert!(matches!(reconstruct(&too_many_stops), Err(DiaryError::Inconsistent { page: 0 })));
    }

    #[test]
    fn string_recovery_counts() {
        let alpha = s("a a b c s a s b c b s c s b s");
        assert_eq!(symbols_between(&alpha, 1, 1), Some(1));
        assert_eq!(symbols_between(&alpha, 0, 1), Some(4));
        let hat = reconstruct(&encode(&alpha, 3).unwrap()).unwrap();
        assert_eq!(unslotted_run(&hat, 4), (alpha.tokens().len() - 1, true));
        assert_eq!(string_recovery_holds(&alpha, &hat, 3, 1, 2), Some(true));
    }
}
