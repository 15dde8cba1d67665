//! Left-greedy Garside normal form in the four-strand braid group.
//!
//! Generators `a`, `b`, `c` are the Artin generators σ1, σ2, σ3. A simple
//! braid is indexed by its permutation: the reduced word `s_i1 … s_ik` of a
//! permutation `w = s_i1 ∘ … ∘ s_ik` gives the positive braid
//! `σ_i1 … σ_ik`. With that reading, `i` is a right descent of `w` exactly
//! when the braid can end in σ_i, and a left descent when it can start with
//! σ_i.

use std::fmt;
use std::sync::OnceLock;

use serde::Serialize;
use thiserror::Error;

use crate::perm::Perm4;
use crate::words::{dictionary, Alphabet, Generator, Letter, Word, WordError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GarsideError {
    #[error(transparent)]
    Alphabet(#[from] WordError),
}

const N_SIMPLE: usize = 24;

struct Tables {
    perms: [Perm4; N_SIMPLE],
    // perm images packed base 4 -> index
    index: [u8; 256],
    // pair (p, q) rewritten to its left-weighted form
    normalize: [[(u8, u8); N_SIMPLE]; N_SIMPLE],
    left_weighted: [[bool; N_SIMPLE]; N_SIMPLE],
    flip: [u8; N_SIMPLE],
    identity: u8,
    delta: u8,
    generator: [u8; 3],
    // Δ σ_i^-1
    complement: [u8; 3],
}

fn pack(p: Perm4) -> usize {
    p.images().iter().fold(0, |acc, &i| acc * 4 + i as usize)
}

fn tables() -> &'static Tables {
    static TABLES: OnceLock<Tables> = OnceLock::new();
    TABLES.get_or_init(|| {
        let mut perms = [Perm4::IDENTITY; N_SIMPLE];
        let mut index = [u8::MAX; 256];
        for (i, p) in Perm4::all().enumerate() {
            perms[i] = p;
            index[pack(p)] = i as u8;
        }
        let idx = |p: Perm4| index[pack(p)];
        let mut normalize = [[(0u8, 0u8); N_SIMPLE]; N_SIMPLE];
        let mut left_weighted = [[false; N_SIMPLE]; N_SIMPLE];
        for (i, &p0) in perms.iter().enumerate() {
            for (j, &q0) in perms.iter().enumerate() {
                left_weighted[i][j] = q0.left_descents() & !p0.right_descents() == 0;
                let (mut p, mut q) = (p0, q0);
                loop {
                    let movable = q.left_descents() & !p.right_descents();
                    if movable == 0 {
                        break;
                    }
                    let s = Perm4::adjacent(movable.trailing_zeros() as usize);
                    p = p.compose(s);
                    q = s.compose(q);
                }
                normalize[i][j] = (idx(p), idx(q));
            }
        }
        let w0 = Perm4::REVERSAL;
        let flip = perms.map(|p| idx(w0.compose(p).compose(w0)));
        let generator = [0, 1, 2].map(|i| idx(Perm4::adjacent(i)));
        let complement = [0, 1, 2].map(|i| idx(w0.compose(Perm4::adjacent(i))));
        Tables {
            perms,
            index,
            normalize,
            left_weighted,
            flip,
            identity: idx(Perm4::IDENTITY),
            delta: idx(w0),
            generator,
            complement,
        }
    })
}

/// A permutation braid, identified by its permutation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SimpleBraid(u8);

impl SimpleBraid {
    pub fn from_perm(p: Perm4) -> Self {
        SimpleBraid(tables().index[pack(p)])
    }

    pub fn perm(self) -> Perm4 {
        tables().perms[self.0 as usize]
    }

    pub fn identity() -> Self {
        SimpleBraid(tables().identity)
    }

    pub fn delta() -> Self {
        SimpleBraid(tables().delta)
    }

    /// Number of crossings.
    pub fn length(self) -> u32 {
        self.perm().length()
    }

    /// Conjugation by Δ, which exchanges σ1 and σ3.
    pub fn flip(self) -> Self {
        SimpleBraid(tables().flip[self.0 as usize])
    }

    /// One reduced positive word, as 0-based Artin generator indices.
    pub fn reduced_word(self) -> Vec<usize> {
        let mut w = self.perm();
        let mut rev = Vec::new();
        while w != Perm4::IDENTITY {
            let i = w.right_descents().trailing_zeros() as usize;
            rev.push(i);
            w = w.compose(Perm4::adjacent(i));
        }
        rev.reverse();
        rev
    }
}

/// `(p, q)` is left-weighted when every σ_i that can start `q` can also end `p`.
pub fn is_left_weighted(p: SimpleBraid, q: SimpleBraid) -> bool {
    tables().left_weighted[p.0 as usize][q.0 as usize]
}

/// `Δ^inf · p1 ⋯ pk` with every `p_i` distinct from the identity and Δ and
/// every adjacent pair left-weighted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct GarsideNF {
    inf: i64,
    factors: Vec<SimpleBraid>,
}

impl GarsideNF {
    pub fn identity() -> Self {
        GarsideNF::default()
    }

    pub fn delta_power(k: i64) -> Self {
        GarsideNF { inf: k, factors: Vec::new() }
    }

    pub fn inf(&self) -> i64 {
        self.inf
    }

    pub fn factors(&self) -> &[SimpleBraid] {
        &self.factors
    }

    /// Number of non-Δ factors (the canonical length).
    pub fn canonical_length(&self) -> usize {
        self.factors.len()
    }

    pub fn is_delta_power(&self) -> bool {
        self.factors.is_empty()
    }

    /// A power of Δ², i.e. a central element.
    pub fn is_central_power(&self) -> bool {
        self.factors.is_empty() && self.inf % 2 == 0
    }

    /// Right multiplication by a simple braid, restoring left-weightedness
    /// with a single right-to-left pass.
    fn push_simple(&mut self, s: SimpleBraid) {
        let t = tables();
        if s.0 == t.identity {
            return;
        }
        if s.0 == t.delta {
            self.inf += 1;
            for f in &mut self.factors {
                *f = f.flip();
            }
            return;
        }
        self.factors.push(s);
        let mut j = self.factors.len() - 1;
        while j > 0 {
            let (p, q) = (self.factors[j - 1], self.factors[j]);
            let (p2, q2) = t.normalize[p.0 as usize][q.0 as usize];
            if (p2, q2) == (p.0, q.0) {
                break;
            }
            self.factors[j - 1] = SimpleBraid(p2);
            self.factors[j] = SimpleBraid(q2);
            j -= 1;
        }
        let leading = self.factors.iter().take_while(|f| f.0 == t.delta).count();
        if leading > 0 {
            self.factors.drain(..leading);
            self.inf += leading as i64;
        }
        while self.factors.last().is_some_and(|f| f.0 == t.identity) {
            self.factors.pop();
        }
    }

    /// `self · Δ^-1`, written as `Δ^-1 · τ(self)`.
    fn push_delta_inverse(&mut self) {
        self.inf -= 1;
        for f in &mut self.factors {
            *f = f.flip();
        }
    }

    fn push_letter(&mut self, gen_index: usize, inverse: bool) {
        let t = tables();
        if inverse {
            self.push_delta_inverse();
            self.push_simple(SimpleBraid(t.complement[gen_index]));
        } else {
            self.push_simple(SimpleBraid(t.generator[gen_index]));
        }
    }

    /// Product of two normal forms.
    pub fn mul(&self, other: &GarsideNF) -> GarsideNF {
        let mut out = self.clone();
        out.inf += other.inf;
        if other.inf.rem_euclid(2) == 1 {
            for f in &mut out.factors {
                *f = f.flip();
            }
        }
        for &f in &other.factors {
            out.push_simple(f);
        }
        out
    }

    /// Expands back to a word over {a, b, c}.
    pub fn to_word(&self) -> Word {
        let delta = Word::from_iter_artin(SimpleBraid::delta().reduced_word());
        let mut w = delta.pow(self.inf as i32);
        for f in &self.factors {
            w = w.concat(&Word::from_iter_artin(f.reduced_word()));
        }
        w
    }
}

impl Word {
    fn from_iter_artin(gens: Vec<usize>) -> Word {
        crate::words::free_reduce(
            gens.into_iter().map(|i| Letter::pos(Generator::new((b'a' + i as u8) as char).unwrap())),
        )
    }
}

impl fmt::Display for GarsideNF {
    /// `D^k | [i1 i2 i3 i4] | …`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "D^{}", self.inf)?;
        for p in &self.factors {
            write!(f, " | {}", p.perm())?;
        }
        Ok(())
    }
}

/// Normal form of a word over {a, b, c}.
pub fn normal_form(w: &Word) -> Result<GarsideNF, GarsideError> {
    Alphabet::artin().check(w)?;
    let mut nf = GarsideNF::identity();
    for l in w.letters() {
        let i = (l.gen.symbol() as u8 - b'a') as usize;
        nf.push_letter(i, l.inverse);
    }
    Ok(nf)
}

pub fn equals_in_b4(w1: &Word, w2: &Word) -> Result<bool, GarsideError> {
    Ok(normal_form(w1)? == normal_form(w2)?)
}

/// Equality in the quotient of B4 by its center ⟨Δ²⟩.
pub fn equals_mod_center(w1: &Word, w2: &Word) -> Result<bool, GarsideError> {
    Ok(normal_form(&w1.concat(&w2.inverse()))?.is_central_power())
}

/// Commutes with a, b and c.
pub fn is_central(w: &Word) -> Result<bool, GarsideError> {
    for g in ["a", "b", "c"] {
        let g = dictionary::artin(g);
        if !equals_in_b4(&w.concat(&g), &g.concat(w))? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Side on which a group element acts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    /// Conjugation `w ↦ g w g^-1`; permutations compose right to left.
    Left,
    /// Conjugation `w ↦ g^-1 w g`; permutations compose left to right.
    Right,
}

impl Convention {
    pub fn conjugate(self, w: &Word, g: &Word) -> Word {
        match self {
            Convention::Left => w.conjugate_by(g),
            Convention::Right => w.conjugate_by(&g.inverse()),
        }
    }
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Convention::Left => "left",
            Convention::Right => "right",
        })
    }
}

impl std::str::FromStr for Convention {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "left" => Ok(Convention::Left),
            "right" => Ok(Convention::Right),
            other => Err(format!("unknown convention '{other}' (expected left|right)")),
        }
    }
}

/// `seed, g·seed, g²·seed, …` (`steps + 1` entries) under conjugation.
pub fn conjugation_orbit(
    g: &Word,
    seed: &Word,
    steps: usize,
    convention: Convention,
) -> Result<Vec<GarsideNF>, GarsideError> {
    let mut out = Vec::with_capacity(steps + 1);
    let mut w = seed.clone();
    out.push(normal_form(&w)?);
    for _ in 0..steps {
        w = convention.conjugate(&w, g);
        out.push(normal_form(&w)?);
    }
    Ok(out)
}

/// Smallest `k ≥ 1` with `g^k` fixing `seed` under conjugation, if `k ≤ max`.
pub fn orbit_period(g: &Word, seed: &Word, max: usize, convention: Convention) -> Result<Option<usize>, GarsideError> {
    let orbit = conjugation_orbit(g, seed, max, convention)?;
    Ok(orbit.iter().skip(1).position(|nf| *nf == orbit[0]).map(|k| k + 1))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ClaimStatus {
    Pass,
    Fail,
}

impl ClaimStatus {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            ClaimStatus::Pass
        } else {
            ClaimStatus::Fail
        }
    }
}

/// One checked word identity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClaimEntry {
    pub claim: String,
    pub status: ClaimStatus,
    pub lhs_nf: String,
    pub rhs_nf: String,
}

impl ClaimEntry {
    pub fn check(claim: impl Into<String>, lhs: &Word, rhs: &Word) -> Result<Self, GarsideError> {
        let (l, r) = (normal_form(lhs)?, normal_form(rhs)?);
        Ok(ClaimEntry {
            claim: claim.into(),
            status: ClaimStatus::from_bool(l == r),
            lhs_nf: l.to_string(),
            rhs_nf: r.to_string(),
        })
    }

    pub fn passed(&self) -> bool {
        self.status == ClaimStatus::Pass
    }
}

/// Words for the three derived generators d, e, f over {a, b, c}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SixGeneratorFixture {
    pub d: Word,
    pub e: Word,
    pub f: Word,
}

impl SixGeneratorFixture {
    /// e = aba^-1, f = cbc^-1, d = (ac)^-1 bac.
    pub fn printed() -> Self {
        SixGeneratorFixture {
            d: dictionary::artin(dictionary::D),
            e: dictionary::artin(dictionary::E),
            f: dictionary::artin(dictionary::F),
        }
    }

    fn word(&self, g: char) -> Word {
        match g {
            'd' => self.d.clone(),
            'e' => self.e.clone(),
            'f' => self.f.clone(),
            other => dictionary::artin(&other.to_string()),
        }
    }

    fn product(&self, s: &str) -> Word {
        s.chars().fold(Word::empty(), |w, g| w.concat(&self.word(g)))
    }
}

/// The ten equalities making up the six-generator presentation.
pub const SIX_GENERATOR_CLAIMS: [(&str, &str); 10] = [
    ("ba", "ae"),
    ("ae", "eb"),
    ("de", "ec"),
    ("ec", "cd"),
    ("bc", "cf"),
    ("cf", "fb"),
    ("df", "fa"),
    ("fa", "ad"),
    ("ca", "ac"),
    ("ef", "fe"),
];

pub fn verify_six_generator_presentation(fixture: &SixGeneratorFixture) -> Vec<ClaimEntry> {
    SIX_GENERATOR_CLAIMS
        .iter()
        .map(|(l, r)| {
            ClaimEntry::check(format!("{l}={r}"), &fixture.product(l), &fixture.product(r))
                .expect("fixture words are over {a,b,c}")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::{parse_word, Alphabet};

    fn w(s: &str) -> Word {
        parse_word(s, &Alphabet::artin()).unwrap()
    }

    fn nf(s: &str) -> GarsideNF {
        normal_form(&w(s)).unwrap()
    }

    #[test]
    fn braid_relations() {
        assert_eq!(nf("aba"), nf("bab"));
        assert_eq!(nf("bcb"), nf("cbc"));
        assert_eq!(nf("ac"), nf("ca"));
        assert_ne!(nf("ab"), nf("ba"));
        assert_eq!(nf(""), GarsideNF::identity());
        assert_eq!(nf("").to_string(), "D^0");
    }

    #[test]
    fn delta_and_center() {
        assert_eq!(nf("abacba"), GarsideNF::delta_power(1));
        let x4 = w("bac").pow(4);
        let y3 = w("bacc").pow(3);
        assert_eq!(normal_form(&x4).unwrap(), GarsideNF::delta_power(2));
        assert_eq!(normal_form(&y3).unwrap(), GarsideNF::delta_power(2));
        assert!(is_central(&x4).unwrap());
        assert!(!is_central(&w("bac").pow(2)).unwrap());
        assert!(!is_central(&w("a")).unwrap());
        assert!(is_central(&Word::empty()).unwrap());
    }

    #[test]
    fn inverse_letters() {
        assert_eq!(nf("aA"), GarsideNF::identity());
        assert_eq!(nf("A").inf(), -1);
        assert_eq!(nf("A").mul(&nf("a")), GarsideNF::identity());
        assert_eq!(nf("baB"), nf("Aba"));
        assert_eq!(nf("ab").mul(&nf("Cb")), nf("abCb"));
    }

    #[test]
    fn mod_center() {
        let x4 = w("bac").pow(4);
        assert!(equals_mod_center(&x4, &Word::empty()).unwrap());
        assert!(equals_mod_center(&w("bacc").pow(3), &Word::empty()).unwrap());
        assert!(!equals_mod_center(&w("a"), &Word::empty()).unwrap());
        // Δ alone is not central
        assert!(!equals_mod_center(&w("abacba"), &Word::empty()).unwrap());
    }

    #[test]
    fn conjugation_by_delta_flips() {
        let delta = w("abacba");
        let c = Convention::Left;
        assert_eq!(normal_form(&c.conjugate(&w("a"), &delta)).unwrap(), nf("c"));
        assert_eq!(normal_form(&c.conjugate(&w("b"), &delta)).unwrap(), nf("b"));
        assert_eq!(normal_form(&c.conjugate(&w("c"), &delta)).unwrap(), nf("a"));
    }

    #[test]
    fn alphabet_is_checked() {
        let xy = parse_word("xy", &Alphabet::xy()).unwrap();
        assert!(normal_form(&xy).is_err());
    }

    #[test]
    fn b_is_a_conjugate_of_a() {
        assert!(!equals_in_b4(&w("a"), &w("b")).unwrap());
        assert!(equals_in_b4(&w("aB"), &w("aB")).unwrap());
    }

    #[test]
    fn left_weighted_table_matches_normal_forms() {
        for f in nf("abcAbCCbaBa").factors().windows(2) {
            assert!(is_left_weighted(f[0], f[1]));
        }
    }

    #[test]
    fn to_word_round_trip() {
        for s in ["", "a", "ABC", "abCbaCA", "cccBBa"] {
            let n = nf(s);
            assert_eq!(normal_form(&n.to_word()).unwrap(), n);
            assert!(equals_in_b4(&n.to_word(), &w(s)).unwrap());
        }
    }

    #[test]
    fn corrupted_fixture_fails() {
        let mut fx = SixGeneratorFixture::printed();
        fx.e = w("ab");
        let report = verify_six_generator_presentation(&fx);
        assert!(report.iter().any(|e| !e.passed()));
    }
}
