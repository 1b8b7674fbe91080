//! Right-angled Coxeter diagrams and their purely graph-theoretic analyses.
//!
//! A diagram is a finite simple graph on the index set `I` whose edges mark
//! the pairs with Coxeter entry `m = ∞`; non-edges mean `m = 2`. Rungs,
//! ladderfulness, reducibility and vertex covers are all read off this graph.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Position of a generator type in the diagram's declaration order.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TypeIndex(pub u8);

impl TypeIndex {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Debug for TypeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t{}", self.0)
    }
}

/// A set of types, stored as a bitset over declaration indices.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct TypeSet(u64);

impl TypeSet {
    pub const EMPTY: TypeSet = TypeSet(0);

    pub fn singleton(i: TypeIndex) -> TypeSet {
        TypeSet(1 << i.0)
    }

    pub fn insert(&mut self, i: TypeIndex) {
        self.0 |= 1 << i.0;
    }

    pub fn contains(self, i: TypeIndex) -> bool {
        self.0 >> i.0 & 1 == 1
    }

    pub fn union(self, other: TypeSet) -> TypeSet {
        TypeSet(self.0 | other.0)
    }

    pub fn intersection(self, other: TypeSet) -> TypeSet {
        TypeSet(self.0 & other.0)
    }

    pub fn is_subset_of(self, other: TypeSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = TypeIndex> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as u8;
                bits &= bits - 1;
                Some(TypeIndex(i))
            }
        })
    }
}

impl FromIterator<TypeIndex> for TypeSet {
    fn from_iter<T: IntoIterator<Item = TypeIndex>>(iter: T) -> Self {
        let mut s = TypeSet::EMPTY;
        for i in iter {
            s.insert(i);
        }
        s
    }
}

impl fmt::Debug for TypeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Entry of the right-angled Coxeter matrix.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum MValue {
    One,
    Two,
    Infinity,
}

/// A right-angled Coxeter diagram: labelled vertices plus the set of
/// `m = ∞` edges. Everything else defaults to `m = 2`.
#[derive(Clone, PartialEq, Eq)]
pub struct Diagram {
    labels: Vec<String>,
    /// Adjacency bitmask of the ∞-edge graph, one word per vertex.
    adj: Vec<u64>,
}

impl Diagram {
    pub const MAX_RANK: usize = 64;

    pub fn new<S: Into<String>>(labels: Vec<S>, infinity_edges: &[(usize, usize)]) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() || labels.len() > Self::MAX_RANK {
            return Err(Error::RankTooLarge {
                rank: labels.len(),
                bound: Self::MAX_RANK,
            });
        }
        for (k, l) in labels.iter().enumerate() {
            if labels[..k].contains(l) {
                return Err(Error::PreconditionViolated(format!(
                    "duplicate type label `{l}`"
                )));
            }
        }
        let mut adj = vec![0u64; labels.len()];
        for &(a, b) in infinity_edges {
            if a >= labels.len() || b >= labels.len() {
                return Err(Error::UnknownType(format!("vertex index {}", a.max(b))));
            }
            if a == b {
                return Err(Error::PreconditionViolated(format!(
                    "self-loop on `{}`",
                    labels[a]
                )));
            }
            adj[a] |= 1 << b;
            adj[b] |= 1 << a;
        }
        Ok(Diagram { labels, adj })
    }

    /// Convenience constructor with labels "1", "2", ... and 1-based edges.
    pub fn numbered(rank: usize, infinity_edges: &[(usize, usize)]) -> Result<Self> {
        let labels: Vec<String> = (1..=rank).map(|i| i.to_string()).collect();
        let edges: Vec<(usize, usize)> = infinity_edges
            .iter()
            .map(|&(a, b)| (a.wrapping_sub(1), b.wrapping_sub(1)))
            .collect();
        Diagram::new(labels, &edges)
    }

    pub fn rank(&self) -> usize {
        self.labels.len()
    }

    pub fn types(&self) -> impl Iterator<Item = TypeIndex> + '_ {
        (0..self.labels.len() as u8).map(TypeIndex)
    }

    pub fn all_types(&self) -> TypeSet {
        if self.rank() == 64 {
            TypeSet(u64::MAX)
        } else {
            TypeSet((1u64 << self.rank()) - 1)
        }
    }

    pub fn label(&self, i: TypeIndex) -> &str {
        &self.labels[i.index()]
    }

    pub fn labels_of(&self, s: TypeSet) -> Vec<String> {
        s.iter().map(|i| self.label(i).to_owned()).collect()
    }

    /// Resolves a label to its type index.
    pub fn lookup(&self, label: &str) -> Result<TypeIndex> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|p| TypeIndex(p as u8))
            .ok_or_else(|| Error::UnknownType(label.to_owned()))
    }

    pub fn m_value(&self, i: TypeIndex, j: TypeIndex) -> MValue {
        if i == j {
            MValue::One
        } else if self.adj[i.index()] >> j.0 & 1 == 1 {
            MValue::Infinity
        } else {
            MValue::Two
        }
    }

    /// True iff `i ≠ j` and the generators commute (`m = 2`).
    #[inline]
    pub fn commutes(&self, i: TypeIndex, j: TypeIndex) -> bool {
        i != j && self.adj[i.index()] >> j.0 & 1 == 0
    }

    /// `J⊥`: the types outside `J` commuting with everything in `J`.
    pub fn perp(&self, j_set: TypeSet) -> TypeSet {
        let mut out = TypeSet::EMPTY;
        for i in self.types() {
            if j_set.contains(i) {
                continue;
            }
            if j_set.iter().all(|j| self.commutes(i, j)) {
                out.insert(i);
            }
        }
        out
    }

    pub fn infinity_edges(&self) -> Vec<(TypeIndex, TypeIndex)> {
        let mut out = Vec::new();
        for i in self.types() {
            for j in self.types() {
                if i < j && self.m_value(i, j) == MValue::Infinity {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Types `i` admitting a ladder: some ∞-edge `{j,k}` with both `j` and
    /// `k` commuting with `i`.
    pub fn rung_types(&self) -> TypeSet {
        let mut out = TypeSet::EMPTY;
        for i in self.types() {
            let perp = self.perp(TypeSet::singleton(i));
            'search: for j in perp.iter() {
                for k in perp.iter() {
                    if j < k && self.m_value(j, k) == MValue::Infinity {
                        out.insert(i);
                        break 'search;
                    }
                }
            }
        }
        out
    }

    pub fn is_ladderful(&self) -> bool {
        self.rung_types() == self.all_types()
    }

    /// Connected-component decomposition of the ∞-edge graph.
    pub fn decompose(&self) -> Decomposition {
        let n = self.rank();
        let mut seen = vec![false; n];
        let mut components = Vec::new();
        let mut isolated = Vec::new();
        for start in self.types() {
            if seen[start.index()] {
                continue;
            }
            if self.adj[start.index()] == 0 {
                seen[start.index()] = true;
                isolated.push(start);
                continue;
            }
            let mut comp = TypeSet::EMPTY;
            let mut stack = vec![start];
            seen[start.index()] = true;
            while let Some(v) = stack.pop() {
                comp.insert(v);
                for w in self.types() {
                    if !seen[w.index()] && self.adj[v.index()] >> w.0 & 1 == 1 {
                        seen[w.index()] = true;
                        stack.push(w);
                    }
                }
            }
            components.push(comp);
        }
        let irreducible = (components.len() == 1 && isolated.is_empty() && n >= 2) || n == 1;
        Decomposition {
            components,
            isolated,
            irreducible,
        }
    }

    /// True iff some vertex cover of the ∞-edge graph is contained in `s`,
    /// i.e. no ∞-edge joins two types outside `s`.
    pub fn vertex_cover_within(&self, s: TypeSet) -> bool {
        self.infinity_edges()
            .iter()
            .all(|&(i, j)| s.contains(i) || s.contains(j))
    }

}

impl fmt::Debug for Diagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Diagram({:?}; ∞-edges ", self.labels)?;
        f.debug_set()
            .entries(
                self.infinity_edges()
                    .iter()
                    .map(|&(i, j)| (self.label(i), self.label(j))),
            )
            .finish()?;
        write!(f, ")")
    }
}

/// Result of [`Diagram::decompose`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    /// Connected components of the ∞-edge graph with at least two vertices.
    pub components: Vec<TypeSet>,
    /// Types with no ∞-edge at all.
    pub isolated: Vec<TypeIndex>,
    pub irreducible: bool,
}

// ---------------------------------------------------------------------------
// Census of ladderful diagrams

/// Bound on the census rank; brute-force canonical labelling is exact but
/// exponential.
pub const CENSUS_MAX_RANK: usize = 8;

/// All irreducible ladderful diagrams on `n` vertices, one representative per
/// isomorphism class, in increasing canonical-code order. Vertices are
/// labelled `v0..v{n-1}`.
pub fn enumerate_ladderful(n: usize) -> Result<Vec<Diagram>> {
    if n == 0 || n > CENSUS_MAX_RANK {
        return Err(Error::RankTooLarge {
            rank: n,
            bound: CENSUS_MAX_RANK,
        });
    }
    let m = n * (n - 1) / 2;
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .collect();

    let mut canon_codes = std::collections::BTreeSet::new();
    for code in 0u64..(1u64 << m) {
        let mut adj = vec![0u64; n];
        for (pos, &(i, j)) in pairs.iter().enumerate() {
            if code >> pos & 1 == 1 {
                adj[i] |= 1 << j;
                adj[j] |= 1 << i;
            }
        }
        if !ladderful_and_irreducible(&adj, n) {
            continue;
        }
        canon_codes.insert(canonical_code(&adj, n, &pairs));
    }

    let mut out = Vec::new();
    for code in canon_codes {
        let edges: Vec<(usize, usize)> = pairs
            .iter()
            .enumerate()
            .filter(|&(pos, _)| code >> pos & 1 == 1)
            .map(|(_, &e)| e)
            .collect();
        let labels: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
        out.push(Diagram::new(labels, &edges)?);
    }
    Ok(out)
}

fn ladderful_and_irreducible(adj: &[u64], n: usize) -> bool {
    // every vertex must be a rung
    for v in 0..n {
        let forbidden = adj[v] | (1 << v);
        let mut found = false;
        'edges: for j in 0..n {
            if forbidden >> j & 1 == 1 {
                continue;
            }
            for k in (j + 1)..n {
                if forbidden >> k & 1 == 0 && adj[j] >> k & 1 == 1 {
                    found = true;
                    break 'edges;
                }
            }
        }
        if !found {
            return false;
        }
    }
    // connected (a ladderful graph has no isolated vertices, so a single
    // component of full size is exactly irreducibility)
    let mut seen = 1u64;
    let mut frontier = 1u64;
    while frontier != 0 {
        let mut next = 0u64;
        let mut f = frontier;
        while f != 0 {
            let v = f.trailing_zeros() as usize;
            f &= f - 1;
            next |= adj[v] & !seen;
        }
        seen |= next;
        frontier = next;
    }
    seen.count_ones() as usize == n
}

/// Minimal edge-bit code over all vertex permutations.
fn canonical_code(adj: &[u64], n: usize, pairs: &[(usize, usize)]) -> u64 {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = u64::MAX;
    permute(&mut perm, 0, &mut |p| {
        let mut bits = 0u64;
        for (pos, &(i, j)) in pairs.iter().enumerate() {
            if adj[p[i]] >> p[j] & 1 == 1 {
                bits |= 1 << pos;
            }
        }
        if bits < best {
            best = bits;
        }
    });
    best
}

fn permute(perm: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == perm.len() {
        visit(perm);
        return;
    }
    for i in k..perm.len() {
        perm.swap(k, i);
        permute(perm, k + 1, visit);
        perm.swap(k, i);
    }
}

/// Checks two diagrams for graph isomorphism by brute force.
pub fn isomorphic(a: &Diagram, b: &Diagram) -> bool {
    if a.rank() != b.rank() {
        return false;
    }
    let n = a.rank();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .collect();
    canonical_code(&a.adj, n, &pairs) == canonical_code(&b.adj, n, &pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ladder() -> Diagram {
        // types {1,2,3}, single ∞-edge {2,3}
        Diagram::numbered(3, &[(2, 3)]).unwrap()
    }

    fn pentagon() -> Diagram {
        Diagram::numbered(5, &[(1, 2), (2, 3), (3, 4), (4, 5), (5, 1)]).unwrap()
    }

    fn triangle() -> Diagram {
        Diagram::numbered(3, &[(1, 2), (2, 3), (3, 1)]).unwrap()
    }

    #[test]
    fn m_values() {
        let d = ladder();
        let (t1, t2, t3) = (TypeIndex(0), TypeIndex(1), TypeIndex(2));
        assert_eq!(d.m_value(t2, t3), MValue::Infinity);
        assert_eq!(d.m_value(t1, t2), MValue::Two);
        assert_eq!(d.m_value(t1, t1), MValue::One);
        assert!(d.lookup("7").is_err());
    }

    #[test]
    fn perp_examples() {
        let d = ladder();
        let p = d.perp(TypeSet::singleton(TypeIndex(0)));
        assert_eq!(p, [TypeIndex(1), TypeIndex(2)].into_iter().collect());

        let c5 = pentagon();
        let p = c5.perp(TypeSet::singleton(TypeIndex(0)));
        assert_eq!(p, [TypeIndex(2), TypeIndex(3)].into_iter().collect());

        // J = ∅ is vacuous
        assert_eq!(d.perp(TypeSet::EMPTY), d.all_types());
    }

    #[test]
    fn rungs_and_ladderful() {
        assert_eq!(ladder().rung_types(), TypeSet::singleton(TypeIndex(0)));
        assert_eq!(pentagon().rung_types(), pentagon().all_types());
        assert!(triangle().rung_types().is_empty());

        assert!(pentagon().is_ladderful());
        assert!(!ladder().is_ladderful());
        assert!(!Diagram::numbered(2, &[(1, 2)]).unwrap().is_ladderful());
    }

    #[test]
    fn decompose_examples() {
        let d = Diagram::numbered(4, &[(1, 2), (3, 4)]).unwrap();
        let dec = d.decompose();
        assert_eq!(dec.components.len(), 2);
        assert!(dec.isolated.is_empty());
        assert!(!dec.irreducible);

        let dec = pentagon().decompose();
        assert_eq!(dec.components.len(), 1);
        assert_eq!(dec.components[0].len(), 5);
        assert!(dec.irreducible);

        let dec = ladder().decompose();
        assert_eq!(dec.components, vec![[TypeIndex(1), TypeIndex(2)].into_iter().collect()]);
        assert_eq!(dec.isolated, vec![TypeIndex(0)]);
        assert!(!dec.irreducible);

        assert!(Diagram::numbered(1, &[]).unwrap().decompose().irreducible);
    }

    #[test]
    fn vertex_covers() {
        let c5 = pentagon();
        assert!(c5.vertex_cover_within(c5.all_types()));
        let s = [TypeIndex(0), TypeIndex(1), TypeIndex(2)].into_iter().collect();
        assert!(!c5.vertex_cover_within(s)); // edge {4,5} uncovered

        let d = Diagram::numbered(2, &[(1, 2)]).unwrap();
        assert!(d.vertex_cover_within(TypeSet::singleton(TypeIndex(0))));
    }

    #[test]
    fn census_small_ranks() {
        assert_eq!(enumerate_ladderful(3).unwrap().len(), 0);
        assert_eq!(enumerate_ladderful(4).unwrap().len(), 0);
        let rank5 = enumerate_ladderful(5).unwrap();
        assert_eq!(rank5.len(), 1);
        assert!(isomorphic(&rank5[0], &pentagon()));
        assert!(enumerate_ladderful(9).is_err());
    }

    #[test]
    fn census_members_are_valid() {
        for d in enumerate_ladderful(5).unwrap() {
            assert!(d.is_ladderful());
            assert!(d.decompose().irreducible);
        }
    }

    #[test]
    fn rung_iff_perp_contains_edge() {
        for d in [ladder(), pentagon(), triangle()] {
            for i in d.types() {
                let perp = d.perp(TypeSet::singleton(i));
                let has_edge = perp
                    .iter()
                    .any(|j| perp.iter().any(|k| j < k && d.m_value(j, k) == MValue::Infinity));
                assert_eq!(d.rung_types().contains(i), has_edge);
            }
        }
    }

    #[test]
    fn decompose_partitions_types() {
        for d in [ladder(), pentagon(), triangle(), Diagram::numbered(4, &[(1, 2)]).unwrap()] {
            let dec = d.decompose();
            let mut all = TypeSet::EMPTY;
            let mut count = 0;
            for c in &dec.components {
                all = all.union(*c);
                count += c.len();
            }
            for &i in &dec.isolated {
                all.insert(i);
                count += 1;
            }
            assert_eq!(all, d.all_types());
            assert_eq!(count, d.rank());
        }
    }
}
