//! Exact 2×2 integer matrices and S4 permutation images of words.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::coset::Presentation;
use crate::garside::{ClaimStatus, Convention};
use crate::words::{dictionary, Generator, Word, WordError};

pub use crate::perm::Perm4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RepError {
    #[error("integer overflow while multiplying matrices")]
    Overflow,
    #[error("no image assigned to generator '{0}'")]
    Unassigned(char),
    #[error("matrix {0} has determinant {1}, cannot invert over the integers")]
    NotUnimodular(Matrix2, i64),
    #[error(transparent)]
    Word(#[from] WordError),
}

/// `[[a, b], [c, d]]` over checked 64-bit integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Matrix2 {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl Matrix2 {
    pub const IDENTITY: Matrix2 = Matrix2::new(1, 0, 0, 1);
    /// S = [[0, 1], [-1, 0]]
    pub const S: Matrix2 = Matrix2::new(0, 1, -1, 0);
    /// T = [[1, 0], [1, 1]]
    pub const T: Matrix2 = Matrix2::new(1, 0, 1, 1);

    pub const fn new(a: i64, b: i64, c: i64, d: i64) -> Self {
        Matrix2 { a, b, c, d }
    }

    pub fn det(&self) -> Result<i64, RepError> {
        let ad = self.a.checked_mul(self.d).ok_or(RepError::Overflow)?;
        let bc = self.b.checked_mul(self.c).ok_or(RepError::Overflow)?;
        ad.checked_sub(bc).ok_or(RepError::Overflow)
    }

    pub fn mul(&self, o: &Matrix2) -> Result<Matrix2, RepError> {
        let dot = |x: i64, y: i64, z: i64, w: i64| -> Result<i64, RepError> {
            x.checked_mul(y).zip(z.checked_mul(w)).and_then(|(p, q)| p.checked_add(q)).ok_or(RepError::Overflow)
        };
        Ok(Matrix2 {
            a: dot(self.a, o.a, self.b, o.c)?,
            b: dot(self.a, o.b, self.b, o.d)?,
            c: dot(self.c, o.a, self.d, o.c)?,
            d: dot(self.c, o.b, self.d, o.d)?,
        })
    }

    pub fn neg(&self) -> Result<Matrix2, RepError> {
        let n = |x: i64| x.checked_neg().ok_or(RepError::Overflow);
        Ok(Matrix2 { a: n(self.a)?, b: n(self.b)?, c: n(self.c)?, d: n(self.d)? })
    }

    /// Exact inverse; requires determinant 1.
    pub fn inverse(&self) -> Result<Matrix2, RepError> {
        match self.det()? {
            1 => {
                let b = self.b.checked_neg().ok_or(RepError::Overflow)?;
                let c = self.c.checked_neg().ok_or(RepError::Overflow)?;
                Ok(Matrix2::new(self.d, b, c, self.a))
            }
            det => Err(RepError::NotUnimodular(*self, det)),
        }
    }

    pub fn pow(&self, k: u32) -> Result<Matrix2, RepError> {
        (0..k).try_fold(Matrix2::IDENTITY, |acc, _| acc.mul(self))
    }
}

impl fmt::Display for Matrix2 {
    /// Row-major `[[a,b],[c,d]]`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{},{}],[{},{}]]", self.a, self.b, self.c, self.d)
    }
}

impl Serialize for Matrix2 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [[self.a, self.b], [self.c, self.d]].serialize(s)
    }
}

pub type MatrixAssignment = BTreeMap<Generator, Matrix2>;

fn gen(c: char) -> Generator {
    Generator::new(c).unwrap()
}

/// x ↦ S, y ↦ -ST.
pub fn pi_assignment() -> MatrixAssignment {
    let minus_st = Matrix2::S.mul(&Matrix2::T).and_then(|m| m.neg()).unwrap();
    BTreeMap::from([(gen('x'), Matrix2::S), (gen('y'), minus_st)])
}

/// s ↦ S, t ↦ T.
pub fn sl2_assignment() -> MatrixAssignment {
    BTreeMap::from([(gen('s'), Matrix2::S), (gen('t'), Matrix2::T)])
}

/// Product of the letter images, left to right.
pub fn eval_matrix(w: &Word, assign: &MatrixAssignment) -> Result<Matrix2, RepError> {
    let mut out = Matrix2::IDENTITY;
    for l in w.letters() {
        let m = assign.get(&l.gen).ok_or(RepError::Unassigned(l.gen.symbol()))?;
        let m = if l.inverse { m.inverse()? } else { *m };
        out = out.mul(&m)?;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelatorImage {
    pub relator: String,
    pub image: Option<Matrix2>,
    pub status: ClaimStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// One entry per relator; the map is well defined iff every relator maps to
/// the identity.
pub fn verify_matrix_homomorphism(p: &Presentation, assign: &MatrixAssignment) -> Vec<RelatorImage> {
    p.relators()
        .iter()
        .map(|r| match eval_matrix(r, assign) {
            Ok(m) => RelatorImage {
                relator: r.to_string(),
                image: Some(m),
                status: ClaimStatus::from_bool(m == Matrix2::IDENTITY),
                error: None,
            },
            Err(e) => RelatorImage {
                relator: r.to_string(),
                image: None,
                status: ClaimStatus::Fail,
                error: Some(e.to_string()),
            },
        })
        .collect()
}

pub type PermAssignment = BTreeMap<Generator, Perm4>;

/// a ↦ (1 2), b ↦ (2 3), c ↦ (3 4).
pub fn standard_perm_assignment() -> PermAssignment {
    BTreeMap::from([(gen('a'), Perm4::adjacent(0)), (gen('b'), Perm4::adjacent(1)), (gen('c'), Perm4::adjacent(2))])
}

/// Image of a word. Under [`Convention::Left`] the word `g1 g2 … gk` maps
/// to `π(g1) ∘ π(g2) ∘ … ∘ π(gk)`; under [`Convention::Right`] the letters
/// act in reading order, giving `π(gk) ∘ … ∘ π(g1)`.
pub fn eval_perm(w: &Word, assign: &PermAssignment, convention: Convention) -> Result<Perm4, RepError> {
    let mut out = Perm4::IDENTITY;
    for l in w.letters() {
        let p = *assign.get(&l.gen).ok_or(RepError::Unassigned(l.gen.symbol()))?;
        let p = if l.inverse { p.inverse() } else { p };
        out = match convention {
            Convention::Left => out.compose(p),
            Convention::Right => p.compose(out),
        };
    }
    Ok(out)
}

/// Permutation image of a word over the braid names {a,…,f,x,y}.
pub fn braid_perm(w: &Word, convention: Convention) -> Result<Perm4, RepError> {
    let artin = w.substitute(&dictionary::braid_names())?;
    eval_perm(&artin, &standard_perm_assignment(), convention)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PermGroupSummary {
    pub order: usize,
    /// Points fixed by every element, 1-based.
    pub fixed_points: Vec<u8>,
    pub is_point_stabilizer: bool,
}

/// The subgroup of S4 generated by `gens`.
pub fn subgroup_closure(gens: &[Perm4]) -> BTreeSet<Perm4> {
    let mut group = BTreeSet::from([Perm4::IDENTITY]);
    let mut frontier = vec![Perm4::IDENTITY];
    while let Some(p) = frontier.pop() {
        for &g in gens {
            let q = p.compose(g);
            if group.insert(q) {
                frontier.push(q);
            }
        }
    }
    group
}

pub fn summarize(group: &BTreeSet<Perm4>) -> PermGroupSummary {
    let fixed_points: Vec<u8> = (0..4u8).filter(|&i| group.iter().all(|p| p.apply(i) == i)).map(|i| i + 1).collect();
    // the full stabilizer of a point in S4 has order 3! = 6
    let is_point_stabilizer = group.len() == 6 && fixed_points.len() == 1;
    PermGroupSummary { order: group.len(), fixed_points, is_point_stabilizer }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::{parse_word, Alphabet};
    use proptest::prelude::*;

    fn xy(s: &str) -> Word {
        parse_word(s, &Alphabet::xy()).unwrap()
    }

    fn st(s: &str) -> Word {
        parse_word(s, &Alphabet::st()).unwrap()
    }

    #[test]
    fn sl2_relations() {
        let a = sl2_assignment();
        assert_eq!(eval_matrix(&st("s^4"), &a).unwrap(), Matrix2::IDENTITY);
        let s2 = Matrix2::S.pow(2).unwrap();
        assert_eq!(s2, Matrix2::IDENTITY.neg().unwrap());
        assert_eq!(eval_matrix(&st("ststst"), &a).unwrap(), s2);
        // -ST = S^-1 T
        assert_eq!(eval_matrix(&st("st"), &a).unwrap().neg().unwrap(), eval_matrix(&st("St"), &a).unwrap());
    }

    #[test]
    fn pi_is_a_homomorphism() {
        let p = Presentation::g0();
        let rep = verify_matrix_homomorphism(&p, &pi_assignment());
        assert_eq!(rep.len(), 3);
        assert!(rep.iter().all(|e| e.status == ClaimStatus::Pass));
        let a = pi_assignment();
        assert_eq!(eval_matrix(&xy("x^4"), &a).unwrap(), Matrix2::IDENTITY);
        assert_eq!(eval_matrix(&xy("y^3"), &a).unwrap(), Matrix2::IDENTITY);
    }

    #[test]
    fn wrong_sign_breaks_pi() {
        let mut a = pi_assignment();
        a.insert(gen('y'), Matrix2::S.mul(&Matrix2::T).unwrap());
        let rep = verify_matrix_homomorphism(&Presentation::g0(), &a);
        assert!(rep.iter().any(|e| e.status == ClaimStatus::Fail));
    }

    #[test]
    fn inverse_requires_unimodular() {
        let m = Matrix2::new(2, 0, 0, 1);
        assert!(matches!(m.inverse(), Err(RepError::NotUnimodular(_, 2))));
        let big = Matrix2::new(i64::MAX, 1, 0, 1);
        assert_eq!(big.mul(&big), Err(RepError::Overflow));
        assert_eq!(eval_matrix(&xy("x"), &sl2_assignment()), Err(RepError::Unassigned('x')));
    }

    #[test]
    fn permutation_images() {
        let y = braid_perm(&parse_word("y", &Alphabet::xy()).unwrap(), Convention::Left).unwrap();
        assert_eq!(y.cycles_string(), "(1 3 2)");
        let x = braid_perm(&parse_word("x", &Alphabet::xy()).unwrap(), Convention::Left).unwrap();
        assert_eq!(x.order(), 4);
        assert_eq!(eval_perm(&Word::empty(), &standard_perm_assignment(), Convention::Left).unwrap(), Perm4::IDENTITY);
    }

    #[test]
    fn closures() {
        let a = Perm4::adjacent(0);
        let y = braid_perm(&parse_word("y", &Alphabet::xy()).unwrap(), Convention::Left).unwrap();
        let g1 = summarize(&subgroup_closure(&[a, y]));
        assert_eq!(g1.order, 6);
        assert_eq!(g1.fixed_points, vec![4]);
        assert!(g1.is_point_stabilizer);
        let all = subgroup_closure(&[Perm4::adjacent(0), Perm4::adjacent(1), Perm4::adjacent(2)]);
        assert_eq!(all.len(), 24);
        assert_eq!(subgroup_closure(&[Perm4::IDENTITY]).len(), 1);
    }

    fn st_words() -> impl Strategy<Value = Word> {
        "[sStT]{0,12}".prop_map(|s| st(&s))
    }

    proptest! {
        #[test]
        fn eval_is_multiplicative(w1 in st_words(), w2 in st_words()) {
            let a = sl2_assignment();
            let lhs = eval_matrix(&w1.concat(&w2), &a).unwrap();
            let rhs = eval_matrix(&w1, &a).unwrap().mul(&eval_matrix(&w2, &a).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
            prop_assert_eq!(lhs.det().unwrap(), 1);
        }
    }
}
