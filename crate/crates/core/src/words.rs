//! Words over signed generator alphabets.
//!
//! A generator is a lowercase ASCII letter; its inverse is written with the
//! matching uppercase letter. Words are stored freely reduced and never
//! mutated after construction.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::Mul;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("unknown letter '{0}'")]
    UnknownLetter(char),
    #[error("malformed exponent at byte {0}")]
    MalformedExponent(usize),
    #[error("letter '{letter}' is not in the alphabet {{{alphabet}}}")]
    AlphabetMismatch { letter: char, alphabet: String },
    #[error("substitution is missing an image for '{0}'")]
    IncompleteMap(char),
}

/// A generator symbol, always a lowercase ASCII letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Generator(char);

impl Generator {
    pub fn new(c: char) -> Result<Self, WordError> {
        if c.is_ascii_lowercase() {
            Ok(Generator(c))
        } else {
            Err(WordError::UnknownLetter(c))
        }
    }

    pub fn symbol(self) -> char {
        self.0
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub gen: Generator,
    pub inverse: bool,
}

impl Letter {
    pub fn pos(gen: Generator) -> Self {
        Letter { gen, inverse: false }
    }

    pub fn neg(gen: Generator) -> Self {
        Letter { gen, inverse: true }
    }

    pub fn inv(self) -> Self {
        Letter { gen: self.gen, inverse: !self.inverse }
    }

    /// Exponent sign, +1 or -1.
    pub fn sign(self) -> i32 {
        if self.inverse {
            -1
        } else {
            1
        }
    }

    fn as_char(self) -> char {
        if self.inverse {
            self.gen.0.to_ascii_uppercase()
        } else {
            self.gen.0
        }
    }
}

/// An ordered set of generators.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Alphabet(BTreeSet<Generator>);

impl Alphabet {
    /// Builds an alphabet from its lowercase letters, e.g. `"abc"`.
    pub fn new(letters: &str) -> Result<Self, WordError> {
        letters.chars().map(Generator::new).collect::<Result<BTreeSet<_>, _>>().map(Alphabet)
    }

    /// The Artin alphabet {a, b, c} of B4.
    pub fn artin() -> Self {
        Self::new("abc").unwrap()
    }

    /// The six band-type generators {a, b, c, d, e, f}.
    pub fn six() -> Self {
        Self::new("abcdef").unwrap()
    }

    /// The two generators {x, y} of the central quotient.
    pub fn xy() -> Self {
        Self::new("xy").unwrap()
    }

    /// {s, t} for the SL2(Z) generators S and T. Lowercase because uppercase
    /// letters denote inverses in the word syntax.
    pub fn st() -> Self {
        Self::new("st").unwrap()
    }

    pub fn contains(&self, g: Generator) -> bool {
        self.0.contains(&g)
    }

    pub fn generators(&self) -> impl Iterator<Item = Generator> + '_ {
        self.0.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Position of `g` in the alphabet order.
    pub fn index_of(&self, g: Generator) -> Option<usize> {
        self.0.iter().position(|&h| h == g)
    }

    pub fn check(&self, w: &Word) -> Result<(), WordError> {
        match w.letters().iter().find(|l| !self.contains(l.gen)) {
            Some(l) => Err(WordError::AlphabetMismatch { letter: l.gen.0, alphabet: self.to_string() }),
            None => Ok(()),
        }
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for g in &self.0 {
            write!(f, "{}", g.0)?;
        }
        Ok(())
    }
}

/// A freely reduced word.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<Letter>);

/// Cancels adjacent inverse pairs until none remain.
pub fn free_reduce<I: IntoIterator<Item = Letter>>(letters: I) -> Word {
    let mut out: Vec<Letter> = Vec::new();
    for l in letters {
        if out.last() == Some(&l.inv()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    Word(out)
}

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn gen(g: Generator) -> Self {
        Word(vec![Letter::pos(g)])
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inv()).collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        free_reduce(self.0.iter().chain(other.0.iter()).copied())
    }

    pub fn pow(&self, k: i32) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::empty();
        for _ in 0..k.unsigned_abs() {
            out = out.concat(&base);
        }
        out
    }

    /// `g w g^-1`.
    pub fn conjugate_by(&self, g: &Word) -> Word {
        g.concat(self).concat(&g.inverse())
    }

    /// Sum of the exponents of all letters.
    pub fn exponent_sum(&self) -> i64 {
        self.0.iter().map(|l| i64::from(l.sign())).sum()
    }

    pub fn substitute(&self, m: &GenMap) -> Result<Word, WordError> {
        m.domain.check(self)?;
        let mut letters = Vec::new();
        for l in &self.0 {
            let image = m.images.get(&l.gen).ok_or(WordError::IncompleteMap(l.gen.0))?;
            if l.inverse {
                letters.extend(image.0.iter().rev().map(|x| x.inv()));
            } else {
                letters.extend(image.0.iter().copied());
            }
        }
        Ok(free_reduce(letters))
    }

    /// Every cyclic rotation of the word, starting with itself.
    pub fn rotations(&self) -> Vec<Word> {
        (0..self.0.len().max(1))
            .map(|i| {
                let mut v = self.0[i..].to_vec();
                v.extend_from_slice(&self.0[..i]);
                free_reduce(v)
            })
            .collect()
    }
}

impl Mul for &Word {
    type Output = Word;
    fn mul(self, rhs: &Word) -> Word {
        self.concat(rhs)
    }
}

impl fmt::Display for Word {
    /// Runs of a repeated letter print as `x^k` or `x^-k`; single letters
    /// print bare, with uppercase for an inverse.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        let mut i = 0;
        while i < self.0.len() {
            let l = self.0[i];
            let mut j = i;
            while j < self.0.len() && self.0[j] == l {
                j += 1;
            }
            let run = j - i;
            if !first {
                write!(f, " ")?;
            }
            first = false;
            match (run, l.inverse) {
                (1, _) => write!(f, "{}", l.as_char())?,
                (k, false) => write!(f, "{}^{}", l.gen.0, k)?,
                (k, true) => write!(f, "{}^-{}", l.gen.0, k)?,
            }
            i = j;
        }
        Ok(())
    }
}

impl serde::Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Parses the word syntax: lowercase letter = generator, uppercase = inverse,
/// optional `^k`, `^-k` or `^{k}` repetition, whitespace ignored.
pub fn parse_word(text: &str, alphabet: &Alphabet) -> Result<Word, WordError> {
    let bytes = text.as_bytes();
    let mut letters = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if !c.is_ascii_alphabetic() {
            return Err(if c == '^' {
                WordError::MalformedExponent(i)
            } else {
                WordError::UnknownLetter(text[i..].chars().next().unwrap_or(c))
            });
        }
        let gen = Generator(c.to_ascii_lowercase());
        if !alphabet.contains(gen) {
            return Err(WordError::UnknownLetter(c));
        }
        let letter = if c.is_ascii_uppercase() { Letter::neg(gen) } else { Letter::pos(gen) };
        i += 1;
        let mut exp: i64 = 1;
        let mut k = i;
        while k < bytes.len() && (bytes[k] as char).is_whitespace() {
            k += 1;
        }
        if k < bytes.len() && bytes[k] == b'^' {
            let (e, next) = parse_exponent(bytes, k + 1)?;
            exp = e;
            i = next;
        }
        let l = if exp < 0 { letter.inv() } else { letter };
        for _ in 0..exp.unsigned_abs() {
            letters.push(l);
        }
    }
    Ok(free_reduce(letters))
}

fn parse_exponent(bytes: &[u8], start: usize) -> Result<(i64, usize), WordError> {
    let mut i = start;
    let braced = i < bytes.len() && bytes[i] == b'{';
    if braced {
        i += 1;
    }
    let neg = i < bytes.len() && bytes[i] == b'-';
    if neg {
        i += 1;
    }
    let digits_start = i;
    while i < bytes.len() && bytes[i].is_ascii_digit() {
        i += 1;
    }
    if i == digits_start || i - digits_start > 6 {
        return Err(WordError::MalformedExponent(start));
    }
    let value: i64 = std::str::from_utf8(&bytes[digits_start..i])
        .unwrap()
        .parse()
        .map_err(|_| WordError::MalformedExponent(start))?;
    if braced {
        if i >= bytes.len() || bytes[i] != b'}' {
            return Err(WordError::MalformedExponent(start));
        }
        i += 1;
    }
    Ok((if neg { -value } else { value }, i))
}

/// A substitution homomorphism: one image word per domain generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenMap {
    domain: Alphabet,
    images: BTreeMap<Generator, Word>,
}

impl GenMap {
    pub fn new(domain: Alphabet, images: BTreeMap<Generator, Word>) -> Result<Self, WordError> {
        if let Some(g) = domain.generators().find(|g| !images.contains_key(g)) {
            return Err(WordError::IncompleteMap(g.0));
        }
        Ok(GenMap { domain, images })
    }

    /// Builds a map from `(generator, image text)` pairs, parsing each image
    /// over `target`.
    pub fn from_texts(pairs: &[(char, &str)], target: &Alphabet) -> Result<Self, WordError> {
        let mut images = BTreeMap::new();
        let mut domain = String::new();
        for &(g, text) in pairs {
            images.insert(Generator::new(g)?, parse_word(text, target)?);
            domain.push(g);
        }
        GenMap::new(Alphabet::new(&domain)?, images)
    }

    pub fn domain(&self) -> &Alphabet {
        &self.domain
    }

    pub fn image(&self, g: Generator) -> Option<&Word> {
        self.images.get(&g)
    }
}

/// Named words and substitutions used throughout the toolkit.
pub mod dictionary {
    use super::*;

    /// e = a b a^-1
    pub const E: &str = "abA";
    /// f = c b c^-1
    pub const F: &str = "cbC";
    /// d = (ac)^-1 b (ac)
    pub const D: &str = "CAbac";
    /// x = b a c
    pub const X: &str = "bac";
    /// y = x c
    pub const Y: &str = "bacc";
    /// First reading of the hatted b: c^-1 b c^2.
    pub const BHAT_SHORT: &str = "Cbc^2";
    /// Second reading of the hatted b: c^-2 b c^2.
    pub const BHAT_LONG: &str = "c^-2 b c^2";

    pub fn artin(text: &str) -> Word {
        parse_word(text, &Alphabet::artin()).expect("dictionary word over {a,b,c}")
    }

    pub fn xy(text: &str) -> Word {
        parse_word(text, &Alphabet::xy()).expect("dictionary word over {x,y}")
    }

    /// Six band-type generators expressed in the Artin generators.
    pub fn six_to_artin() -> GenMap {
        GenMap::from_texts(&[('a', "a"), ('b', "b"), ('c', "c"), ('d', D), ('e', E), ('f', F)], &Alphabet::artin())
            .unwrap()
    }

    /// x and y expressed in the Artin generators.
    pub fn xy_to_artin() -> GenMap {
        GenMap::from_texts(&[('x', X), ('y', Y)], &Alphabet::artin()).unwrap()
    }

    /// The back-substitution as printed: c = x y^-1, a = x y x^-2,
    /// b = x a^-1 c^-1.
    pub fn artin_to_xy() -> GenMap {
        GenMap::from_texts(&[('a', "xyx^-2"), ('b', "x x^2 Y X y X"), ('c', "xY")], &Alphabet::xy()).unwrap()
    }

    /// Every name the toolkit accepts in braid expressions, as Artin words.
    pub fn braid_names() -> GenMap {
        GenMap::from_texts(
            &[('a', "a"), ('b', "b"), ('c', "c"), ('d', D), ('e', E), ('f', F), ('x', X), ('y', Y)],
            &Alphabet::artin(),
        )
        .unwrap()
    }
}
