//! The Morse–Thue sequence, cube detection, level decoration of sentences
//! and the synchronization checks built on them.

use std::fmt::{self, Display};

use rayon::prelude::*;
use serde::Serialize;

use crate::diary::{encode, Sentence, Symbol, Token};
use crate::error::DiaryError;

/// First `n` bits, by repeated substitution `0 -> 01`, `1 -> 10` from `0`.
pub fn mt_prefix(n: usize) -> Vec<u8> {
    let mut bits = vec![0u8];
    while bits.len() < n {
        bits = bits.iter().flat_map(|&b| [b, 1 - b]).collect();
    }
    bits.truncate(n);
    bits
}

/// Bit `k` of the sequence: the substitution gives `t(2k) = t(k)`, `t(2k+1) = 1 - t(k)`.
pub fn mt_bit(mut k: u64) -> u8 {
    let mut bit = 0;
    while k > 0 {
        bit ^= (k & 1) as u8;
        k >>= 1;
    }
    bit
}

/// True iff no factor `www` with nonempty `w` occurs. For each period `p`,
/// a cube is a run of at least `2p` positions `i` with `bits[i] == bits[i + p]`.
pub fn is_cube_free(bits: &[u8]) -> bool {
    let n = bits.len();
    (1..=n / 3).into_par_iter().all(|p| {
        let mut run = 0;
        for i in 0..n - p {
            if bits[i] == bits[i + p] {
                run += 1;
                if run >= 2 * p {
                    return false;
                }
            } else {
                run = 0;
            }
        }
        true
    })
}

/// A symbol paired with the sequence bit of its level.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Decorated<S> {
    pub symbol: S,
    pub bit: u8,
}

impl<S: Symbol> Symbol for Decorated<S> {
    fn is_stop(&self) -> bool {
        self.symbol.is_stop()
    }
}

impl<S: Display> Display for Decorated<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.symbol, self.bit)
    }
}

/// Level of every symbol: letters count up from 1, stops repeat the level of
/// the letter before them (0 before any letter).
pub fn levels<S: Symbol>(tokens: &[S]) -> Vec<u64> {
    let mut level = 0;
    tokens
        .iter()
        .map(|t| {
            if !t.is_stop() {
                level += 1;
            }
            level
        })
        .collect()
}

/// Replaces each symbol of level `m` by `(symbol, t(m))`.
pub fn decorate<S: Symbol>(sentence: &Sentence<S>) -> Sentence<Decorated<S>> {
    let tokens = sentence
        .tokens()
        .iter()
        .zip(levels(sentence.tokens()))
        .map(|(s, m)| Decorated { symbol: s.clone(), bit: mt_bit(m) })
        .collect();
    Sentence::new(tokens).expect("decoration keeps the final stop")
}

pub fn strip<S: Symbol>(sentence: &Sentence<Decorated<S>>) -> Sentence<S> {
    Sentence::new(sentence.tokens().iter().map(|d| d.symbol.clone()).collect())
        .expect("stripping keeps the final stop")
}

/// Whether every bit matches the level of its symbol.
pub fn is_well_decorated<S: Symbol>(sentence: &Sentence<Decorated<S>>) -> bool {
    decorate(&strip(sentence)) == *sentence
}

/// `|alpha|`: the level of the last letter, stops ignored.
pub fn sentence_length<S: Symbol>(tokens: &[S]) -> u64 {
    tokens.iter().filter(|t| !t.is_stop()).count() as u64
}

/// Outcome of a conditional check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Holds,
    Violated,
    /// The hypotheses do not apply.
    Inconclusive,
}

/// Letters in the longest common suffix that starts with a letter.
pub fn common_tail_length<S: Symbol>(a: &[S], b: &[S]) -> u64 {
    let common = a.iter().rev().zip(b.iter().rev()).take_while(|(x, y)| x == y).count();
    sentence_length(&a[a.len() - common..])
}

/// Identical tails of length `>= l` and lengths within `l/2` force equal lengths.
pub fn synchronize_check<S: Symbol>(a: &Sentence<S>, b: &Sentence<S>, l: u64) -> Verdict {
    let tail = common_tail_length(a.tokens(), b.tokens());
    let (la, lb) = (sentence_length(a.tokens()), sentence_length(b.tokens()));
    if l == 0 || tail < l || 2 * la.abs_diff(lb) > l {
        return Verdict::Inconclusive;
    }
    if la == lb {
        Verdict::Holds
    } else {
        Verdict::Violated
    }
}

/// A letter position: token index in the sentence.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LetterAt {
    pub index: usize,
}

fn word_index<S: Symbol>(tokens: &[S], index: usize) -> usize {
    tokens[..index].iter().filter(|t| t.is_stop()).count()
}

/// Which hypotheses of the equal-diaries statement hold for a letter pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Hypotheses {
    /// Both positions are letters and neither sentence has an empty word.
    pub no_empty_words: bool,
    /// Equal levels and word indices at most 2 apart.
    pub aligned: bool,
    /// At least `p >= 3` stops behind both letters and tails of at most `n(p-2)` letters.
    pub short_tails: bool,
    /// `kappa >= 5n + 1`.
    pub kappa_large: bool,
    pub diaries_equal: bool,
}

impl Hypotheses {
    pub fn all(self) -> bool {
        self.no_empty_words && self.aligned && self.short_tails && self.kappa_large && self.diaries_equal
    }
}

pub fn equal_diaries_hypotheses<S: Symbol>(
    alpha: &Sentence<S>,
    a: LetterAt,
    beta: &Sentence<S>,
    b: LetterAt,
    kappa: usize,
    n: u64,
    p: usize,
) -> Result<Hypotheses, DiaryError> {
    let (ta, tb) = (alpha.tokens(), beta.tokens());
    let letter = |t: &[S], i: usize| i < t.len() && !t[i].is_stop();
    let no_empty_word = |t: &[S]| {
        t.first().is_none_or(|x| !x.is_stop()) && t.windows(2).all(|w| !(w[0].is_stop() && w[1].is_stop()))
    };
    let mut h = Hypotheses {
        no_empty_words: letter(ta, a.index) && letter(tb, b.index) && no_empty_word(ta) && no_empty_word(tb),
        aligned: false,
        short_tails: false,
        kappa_large: kappa as u64 > 5 * n,
        diaries_equal: encode(alpha, kappa)? == encode(beta, kappa)?,
    };
    if !h.no_empty_words {
        return Ok(h);
    }
    let (la, lb) = (levels(ta), levels(tb));
    let (ma, mb) = (word_index(ta, a.index), word_index(tb, b.index));
    h.aligned = la[a.index] == lb[b.index] && ma.abs_diff(mb) <= 2;
    let stops_behind = |t: &[S], i: usize| t[i..].iter().filter(|x| x.is_stop()).count();
    let tail = sentence_length(&ta[a.index..]).max(sentence_length(&tb[b.index..]));
    h.short_tails = p >= 3
        && stops_behind(ta, a.index) >= p
        && stops_behind(tb, b.index) >= p
        && tail <= n * (p as u64 - 2);
    Ok(h)
}

/// The equal-diaries conclusion `a = a'` under its four hypotheses; any
/// unmet hypothesis gives `Inconclusive`.
pub fn equal_diaries_check<S: Symbol>(
    alpha: &Sentence<S>,
    a: LetterAt,
    beta: &Sentence<S>,
    b: LetterAt,
    kappa: usize,
    n: u64,
    p: usize,
) -> Result<Verdict, DiaryError> {
    if !equal_diaries_hypotheses(alpha, a, beta, b, kappa, n, p)?.all() {
        return Ok(Verdict::Inconclusive);
    }
    Ok(if alpha.tokens()[a.index] == beta.tokens()[b.index] { Verdict::Holds } else { Verdict::Violated })
}

/// `w^k s^n` with `w = b a^6`: one word followed by `n - 1` empty words.
pub fn exodus_sentence(k: usize, n: usize) -> Sentence<Token<char>> {
    let w: Vec<char> = std::iter::once('b').chain(std::iter::repeat_n('a', 6)).collect();
    let mut words = vec![w.repeat(k)];
    words.extend(std::iter::repeat_n(Vec::new(), n.saturating_sub(1)));
    Sentence::from_letter_words(&words)
}

/// Undecorated diaries of `w^k s^n` and `w^(k+1) s^n` at `kappa`, then the decorated ones.
pub fn exodus_diaries(k: usize, n: usize, kappa: usize) -> Result<(bool, bool), DiaryError> {
    let (a, b) = (exodus_sentence(k, n), exodus_sentence(k + 1, n));
    let plain = encode(&a, kappa)? == encode(&b, kappa)?;
    let decorated = encode(&decorate(&a), kappa)? == encode(&decorate(&b), kappa)?;
    Ok((plain, decorated))
}
