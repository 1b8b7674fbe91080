//! Normal forms for colored words in the graph product of cyclic groups.
//!
//! A word is a sequence of letters `(type, color)` with `color ∈ [1, q-1]`.
//! Letters of types `i ≠ j` commute exactly when `m(i,j) = 2`; letters of the
//! same type multiply by adding colors mod `q`. The normal form is the
//! ShortLex-least representative of the commutation class: no two same-type
//! letters can be brought together by swaps, and among all equivalent
//! orderings the type sequence is lexicographically smallest in declaration
//! order.

use std::fmt;

use crate::diagram::{Diagram, TypeIndex, TypeSet};
use crate::error::{Error, Result};

/// Panel sizes `q_i ≥ 2`, indexed by declaration order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Parameters {
    q: Vec<u16>,
}

impl Parameters {
    pub fn new(q: Vec<u16>) -> Result<Self> {
        for (i, &qi) in q.iter().enumerate() {
            if qi < 2 {
                return Err(Error::PreconditionViolated(format!(
                    "parameter q at position {i} must be at least 2, got {qi}"
                )));
            }
        }
        Ok(Parameters { q })
    }

    /// Same parameter for every type.
    pub fn uniform(rank: usize, q: u16) -> Result<Self> {
        Parameters::new(vec![q; rank])
    }

    pub fn rank(&self) -> usize {
        self.q.len()
    }

    #[inline]
    pub fn q(&self, i: TypeIndex) -> u16 {
        self.q[i.index()]
    }

    /// Thick means every panel has at least 3 chambers.
    pub fn is_thick(&self) -> bool {
        self.q.iter().all(|&q| q >= 3)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub ty: TypeIndex,
    pub color: u16,
}

impl Letter {
    pub fn new(ty: TypeIndex, color: u16) -> Letter {
        Letter { ty, color }
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.ty.0, self.color)
    }
}

/// A word in normal form. Constructors normalize, so a `Word` value is
/// always reduced and ShortLex-least.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn empty() -> Word {
        Word::default()
    }

    /// Builds the normal form of an arbitrary letter sequence. Zero colors
    /// are dropped; colors `≥ q` are rejected.
    pub fn from_letters(d: &Diagram, p: &Parameters, letters: &[Letter]) -> Result<Word> {
        let mut w = Word::empty();
        for &l in letters {
            if l.ty.index() >= d.rank() {
                return Err(Error::UnknownType(format!("type index {}", l.ty.0)));
            }
            if l.color >= p.q(l.ty) {
                return Err(Error::ColorOutOfRange {
                    ty: d.label(l.ty).to_owned(),
                    color: l.color as u32,
                    q: p.q(l.ty) as u32,
                });
            }
            if l.color != 0 {
                push_letter(&mut w.letters, l, d, p);
            }
        }
        Ok(w)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "e");
        }
        for l in &self.letters {
            write!(f, "{:?}", l)?;
        }
        Ok(())
    }
}

/// Inserts one letter at the right end of a normal word, keeping it normal.
///
/// First scans leftward past letters commuting with `l.ty`; a same-type
/// letter found there absorbs the color (and disappears on zero). Otherwise
/// the letter is placed at the lexicographically least position it can reach.
fn push_letter(letters: &mut Vec<Letter>, l: Letter, d: &Diagram, p: &Parameters) {
    let t = l.ty;
    let mut k = letters.len();
    while k > 0 && d.commutes(letters[k - 1].ty, t) {
        k -= 1;
    }
    if k > 0 && letters[k - 1].ty == t {
        let q = p.q(t) as u32;
        let c = ((letters[k - 1].color as u32 + l.color as u32) % q) as u16;
        if c == 0 {
            // removal keeps the rest normal: everything right of the merge
            // position commutes with t, so it never blocked another pair
            letters.remove(k - 1);
        } else {
            letters[k - 1].color = c;
        }
        return;
    }
    // letters[k..] all commute with t and have different types
    let mut j = k;
    while j < letters.len() && letters[j].ty < t {
        j += 1;
    }
    letters.insert(j, l);
}

/// Recomputes the normal form. Idempotent.
pub fn normalize(w: &Word, d: &Diagram, p: &Parameters) -> Word {
    let mut out = Word::empty();
    for &l in &w.letters {
        if l.color != 0 {
            push_letter(&mut out.letters, l, d, p);
        }
    }
    out
}

/// Product of two normal words.
pub fn multiply(u: &Word, v: &Word, d: &Diagram, p: &Parameters) -> Word {
    let mut out = u.clone();
    for &l in &v.letters {
        push_letter(&mut out.letters, l, d, p);
    }
    out
}

/// Inverse of a normal word: reverse and negate colors mod q.
pub fn invert(u: &Word, d: &Diagram, p: &Parameters) -> Word {
    let mut out = Word::empty();
    for &l in u.letters.iter().rev() {
        let q = p.q(l.ty);
        push_letter(&mut out.letters, Letter::new(l.ty, q - l.color), d, p);
    }
    out
}

/// The type sequence of a normal word: a reduced word in the right-angled
/// Coxeter group, whose length is the gallery distance it realizes.
pub fn weyl(u: &Word) -> (Vec<TypeIndex>, usize) {
    let types: Vec<TypeIndex> = u.letters.iter().map(|l| l.ty).collect();
    let len = types.len();
    (types, len)
}

/// Number of letters of type `i`; independent of the reduced expression.
pub fn i_count(u: &Word, i: TypeIndex) -> usize {
    u.letters.iter().filter(|l| l.ty == i).count()
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Side {
    Prefix,
    Suffix,
}

/// Factors `u = a·b` (suffix) or `u = b·a` (prefix) with `b` the maximal
/// word over `J`-letters extractable to that side via commutations.
pub fn split(u: &Word, j_set: TypeSet, side: Side, d: &Diagram, p: &Parameters) -> (Word, Word) {
    let mut rest: Vec<Letter> = u.letters.clone();
    let mut extracted: Vec<Letter> = Vec::new();
    loop {
        let found = match side {
            Side::Suffix => (0..rest.len()).rev().find(|&idx| {
                j_set.contains(rest[idx].ty)
                    && rest[idx + 1..].iter().all(|r| d.commutes(r.ty, rest[idx].ty))
            }),
            Side::Prefix => (0..rest.len()).find(|&idx| {
                j_set.contains(rest[idx].ty)
                    && rest[..idx].iter().all(|r| d.commutes(r.ty, rest[idx].ty))
            }),
        };
        match found {
            Some(idx) => {
                let l = rest.remove(idx);
                match side {
                    Side::Suffix => extracted.insert(0, l),
                    Side::Prefix => extracted.push(l),
                }
            }
            None => break,
        }
    }
    // removal can break ShortLex-minimality of the remainder, so renormalize
    let a = Word::from_letters(d, p, &rest).expect("letters of a normal word stay valid");
    let b = Word::from_letters(d, p, &extracted).expect("letters of a normal word stay valid");
    (a, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ladder() -> (Diagram, Parameters) {
        let d = Diagram::numbered(3, &[(2, 3)]).unwrap();
        let p = Parameters::uniform(3, 3).unwrap();
        (d, p)
    }

    fn tree() -> (Diagram, Parameters) {
        let d = Diagram::numbered(2, &[(1, 2)]).unwrap();
        let p = Parameters::uniform(2, 3).unwrap();
        (d, p)
    }

    fn w(d: &Diagram, p: &Parameters, ls: &[(u8, u16)]) -> Word {
        let letters: Vec<Letter> = ls.iter().map(|&(t, c)| Letter::new(TypeIndex(t - 1), c)).collect();
        Word::from_letters(d, p, &letters).unwrap()
    }

    #[test]
    fn normalize_sorts_commuting_letters() {
        let (d, p) = ladder();
        let u = w(&d, &p, &[(2, 1), (1, 2)]);
        assert_eq!(u, w(&d, &p, &[(1, 2), (2, 1)]));
        assert_eq!(u.letters()[0].ty, TypeIndex(0));
    }

    #[test]
    fn normalize_cancels_same_type() {
        let (d, p) = ladder();
        assert!(w(&d, &p, &[(1, 1), (1, 2)]).is_empty());
    }

    #[test]
    fn normalize_keeps_blocked_letters() {
        let (d, p) = tree();
        let u = w(&d, &p, &[(1, 1), (2, 1), (1, 1)]);
        assert_eq!(u.len(), 3);
        assert_eq!(normalize(&u, &d, &p), u);
    }

    #[test]
    fn color_out_of_range() {
        let (d, p) = tree();
        let err = Word::from_letters(&d, &p, &[Letter::new(TypeIndex(0), 3)]);
        assert!(matches!(err, Err(Error::ColorOutOfRange { .. })));
    }

    #[test]
    fn multiply_examples() {
        let (d, p) = ladder();
        assert!(multiply(&w(&d, &p, &[(1, 1)]), &w(&d, &p, &[(1, 2)]), &d, &p).is_empty());
        assert_eq!(
            multiply(&w(&d, &p, &[(2, 1)]), &w(&d, &p, &[(1, 1)]), &d, &p),
            w(&d, &p, &[(1, 1), (2, 1)])
        );
        let (d, p) = tree();
        let u = w(&d, &p, &[(1, 1), (2, 1)]);
        let v = w(&d, &p, &[(2, 2), (1, 2)]);
        assert!(multiply(&u, &v, &d, &p).is_empty());
    }

    #[test]
    fn invert_examples() {
        let (d, p) = tree();
        assert!(invert(&Word::empty(), &d, &p).is_empty());
        assert_eq!(invert(&w(&d, &p, &[(1, 1)]), &d, &p), w(&d, &p, &[(1, 2)]));
        let u = w(&d, &p, &[(1, 1), (2, 1)]);
        assert_eq!(invert(&u, &d, &p), w(&d, &p, &[(2, 2), (1, 2)]));
        assert!(multiply(&u, &invert(&u, &d, &p), &d, &p).is_empty());
    }

    #[test]
    fn weyl_and_count() {
        let (d, p) = tree();
        assert_eq!(weyl(&Word::empty()), (vec![], 0));
        let u = w(&d, &p, &[(1, 1), (2, 1), (1, 2)]);
        assert_eq!(
            weyl(&u),
            (vec![TypeIndex(0), TypeIndex(1), TypeIndex(0)], 3)
        );
        assert_eq!(i_count(&u, TypeIndex(0)), 2);

        let (d, p) = ladder();
        let u = w(&d, &p, &[(1, 2), (2, 1)]);
        assert_eq!(weyl(&u).1, 2);
        assert_eq!(i_count(&u, TypeIndex(2)), 0);
    }

    #[test]
    fn split_examples() {
        let (d, p) = tree();
        let u = w(&d, &p, &[(1, 1), (2, 1), (1, 1)]);
        let (a, b) = split(&u, TypeSet::singleton(TypeIndex(0)), Side::Suffix, &d, &p);
        assert_eq!(a, w(&d, &p, &[(1, 1), (2, 1)]));
        assert_eq!(b, w(&d, &p, &[(1, 1)]));

        let (d, p) = ladder();
        let u = w(&d, &p, &[(1, 2), (2, 1)]);
        let (a, b) = split(&u, TypeSet::singleton(TypeIndex(0)), Side::Suffix, &d, &p);
        assert_eq!(a, w(&d, &p, &[(2, 1)]));
        assert_eq!(b, w(&d, &p, &[(1, 2)]));

        let (a, b) = split(&u, TypeSet::EMPTY, Side::Suffix, &d, &p);
        assert_eq!(a, u);
        assert!(b.is_empty());
    }

    #[test]
    fn split_prefix_renormalizes_remainder() {
        // types 1<2<3 with 2,3 commuting and 1 blocked by 3: splitting the
        // 3-prefix out of [2,3,1]-like words must leave a normal remainder
        let d = Diagram::numbered(3, &[(1, 2)]).unwrap();
        let p = Parameters::uniform(3, 3).unwrap();
        let u = w(&d, &p, &[(2, 1), (3, 1), (1, 1)]);
        let (a, b) = split(&u, TypeSet::singleton(TypeIndex(2)), Side::Prefix, &d, &p);
        assert_eq!(b, w(&d, &p, &[(3, 1)]));
        assert_eq!(a, normalize(&a, &d, &p));
        assert_eq!(multiply(&b, &a, &d, &p), u);
    }
}
