//! Finite-degree permutation groups, analysed by full enumeration.
//!
//! The local groups appearing here have tiny degree, so exact breadth-first
//! closure over the generators beats any clever structure; a configurable
//! bound keeps runaway inputs in check.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Default cap on the number of enumerated elements.
pub const DEFAULT_GROUP_BOUND: usize = 1_000_000;

/// A permutation of `{0..n-1}`, stored by images.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    images: Vec<u16>,
}

impl Perm {
    pub fn identity(degree: usize) -> Perm {
        Perm {
            images: (0..degree as u16).collect(),
        }
    }

    pub fn from_images(images: Vec<u16>) -> Result<Perm> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            if (x as usize) >= n || seen[x as usize] {
                return Err(Error::NotAPermutation(format!("image array {images:?}")));
            }
            seen[x as usize] = true;
        }
        Ok(Perm { images })
    }

    /// Builds a permutation from disjoint cycles, e.g. `&[&[0,1,2]]`.
    pub fn from_cycles(degree: usize, cycles: &[&[u16]]) -> Result<Perm> {
        let mut images: Vec<u16> = (0..degree as u16).collect();
        for cycle in cycles {
            for k in 0..cycle.len() {
                let a = cycle[k] as usize;
                if a >= degree {
                    return Err(Error::NotAPermutation(format!("point {a} out of range")));
                }
                images[a] = cycle[(k + 1) % cycle.len()];
            }
        }
        Perm::from_images(images)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn apply(&self, x: u16) -> u16 {
        self.images[x as usize]
    }

    pub fn images(&self) -> &[u16] {
        &self.images
    }

    /// Function composition: `(self ∘ other)(x) = self(other(x))`.
    pub fn compose(&self, other: &Perm) -> Perm {
        debug_assert_eq!(self.degree(), other.degree());
        Perm {
            images: other.images.iter().map(|&x| self.images[x as usize]).collect(),
        }
    }

    pub fn inverse(&self) -> Perm {
        let mut images = vec![0u16; self.images.len()];
        for (x, &y) in self.images.iter().enumerate() {
            images[y as usize] = x as u16;
        }
        Perm { images }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i as u16 == x)
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.images.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "))
    }
}

/// A permutation group given by generators, with a cached full enumeration.
#[derive(Clone)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Perm>,
    elements: OnceLock<BTreeSet<Perm>>,
}

impl PermGroup {
    pub fn new(degree: usize, generators: Vec<Perm>) -> Result<PermGroup> {
        for g in &generators {
            if g.degree() != degree {
                return Err(Error::DegreeMismatch {
                    expected: degree,
                    got: g.degree(),
                    context: "generator degree".into(),
                });
            }
        }
        Ok(PermGroup {
            degree,
            generators,
            elements: OnceLock::new(),
        })
    }

    pub fn trivial(degree: usize) -> PermGroup {
        PermGroup::new(degree, vec![]).unwrap()
    }

    pub fn symmetric(degree: usize) -> PermGroup {
        let mut gens = Vec::new();
        for i in 0..degree.saturating_sub(1) {
            gens.push(Perm::from_cycles(degree, &[&[i as u16, i as u16 + 1]]).unwrap());
        }
        PermGroup::new(degree, gens).unwrap()
    }

    pub fn cyclic(degree: usize) -> PermGroup {
        let cycle: Vec<u16> = (0..degree as u16).collect();
        PermGroup::new(degree, vec![Perm::from_cycles(degree, &[&cycle]).unwrap()]).unwrap()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Perm] {
        &self.generators
    }

    /// Full element set by breadth-first closure over the generators.
    pub fn enumerate(&self, bound: usize) -> Result<BTreeSet<Perm>> {
        enumerate_closure(self.degree, &self.generators, bound)
    }

    /// Cached enumeration with the default bound.
    pub fn elements(&self) -> Result<&BTreeSet<Perm>> {
        if let Some(e) = self.elements.get() {
            return Ok(e);
        }
        let e = self.enumerate(DEFAULT_GROUP_BOUND)?;
        Ok(self.elements.get_or_init(|| e))
    }

    pub fn order(&self) -> Result<usize> {
        Ok(self.elements()?.len())
    }

    pub fn contains(&self, p: &Perm) -> Result<bool> {
        Ok(p.degree() == self.degree && self.elements()?.contains(p))
    }

    /// Orbit partition of `{0..n-1}`, blocks sorted by minimum element.
    pub fn orbits(&self) -> Vec<Vec<u16>> {
        let n = self.degree;
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut Vec<usize>, x: usize) -> usize {
            if parent[x] != x {
                let r = find(parent, parent[x]);
                parent[x] = r;
            }
            parent[x]
        }
        for g in &self.generators {
            for x in 0..n {
                let a = find(&mut parent, x);
                let b = find(&mut parent, g.apply(x as u16) as usize);
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        let mut blocks: Vec<Vec<u16>> = vec![Vec::new(); n];
        for x in 0..n {
            let r = find(&mut parent, x);
            blocks[r].push(x as u16);
        }
        blocks.retain(|b| !b.is_empty());
        blocks
    }

    pub fn orbit_count(&self) -> usize {
        self.orbits().len()
    }

    pub fn is_transitive(&self) -> bool {
        self.orbit_count() == 1
    }

    /// Orbit identifier of a point: the minimal element of its orbit.
    pub fn orbit_of(&self, x: u16) -> u16 {
        for block in self.orbits() {
            if block.contains(&x) {
                return block[0];
            }
        }
        x
    }

    /// The Young overgroup: all permutations stabilizing each orbit block,
    /// generated by within-block adjacent transpositions.
    pub fn young_overgroup(&self) -> PermGroup {
        let mut gens = Vec::new();
        for block in self.orbits() {
            for w in block.windows(2) {
                gens.push(Perm::from_cycles(self.degree, &[&[w[0], w[1]]]).unwrap());
            }
        }
        PermGroup::new(self.degree, gens).unwrap()
    }

    /// Order of the Young overgroup, `∏ |block|!`, without enumeration.
    pub fn young_order(&self) -> u128 {
        self.orbits()
            .iter()
            .map(|b| (1..=b.len() as u128).product::<u128>())
            .product()
    }

    /// True iff every generator preserves each orbit block of `self`.
    /// Equivalent to `other ≤ young_overgroup(self)` without enumeration.
    pub fn within_young_overgroup(&self, other: &PermGroup) -> bool {
        if other.degree != self.degree {
            return false;
        }
        let orbit_id: Vec<u16> = (0..self.degree as u16).map(|x| self.orbit_of(x)).collect();
        other.generators.iter().all(|g| {
            (0..self.degree as u16).all(|x| orbit_id[g.apply(x) as usize] == orbit_id[x as usize])
        })
    }

    pub fn is_subgroup_of(&self, other: &PermGroup) -> Result<bool> {
        if self.degree != other.degree {
            return Ok(false);
        }
        let big = other.elements()?;
        Ok(self.generators.iter().all(|g| big.contains(g)))
    }

    pub fn same_group(&self, other: &PermGroup) -> Result<bool> {
        Ok(self.is_subgroup_of(other)? && other.is_subgroup_of(self)?)
    }

    /// Point stabilizer data: generation by point stabilizers and freeness.
    pub fn stabilizer_analysis(&self) -> Result<StabilizerAnalysis> {
        let elements = self.elements()?;
        let mut stab_union: Vec<Perm> = Vec::new();
        let mut free = true;
        for x in 0..self.degree as u16 {
            for g in elements {
                if g.apply(x) == x {
                    if !g.is_identity() {
                        free = false;
                    }
                    stab_union.push(g.clone());
                }
            }
        }
        let closure = enumerate_closure(self.degree, &stab_union, DEFAULT_GROUP_BOUND)?;
        Ok(StabilizerAnalysis {
            gen_by_point_stabs: closure.len() == elements.len(),
            free,
        })
    }
}

impl fmt::Debug for PermGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PermGroup(deg {}, gens {:?})", self.degree, self.generators)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StabilizerAnalysis {
    /// Whether the union of all point stabilizers generates the group.
    pub gen_by_point_stabs: bool,
    /// Whether every point stabilizer is trivial (the action is free).
    pub free: bool,
}

fn enumerate_closure(degree: usize, generators: &[Perm], bound: usize) -> Result<BTreeSet<Perm>> {
    let mut elements = BTreeSet::new();
    elements.insert(Perm::identity(degree));
    let mut frontier: Vec<Perm> = vec![Perm::identity(degree)];
    while let Some(g) = frontier.pop() {
        for s in generators {
            let h = s.compose(&g);
            if !elements.contains(&h) {
                if elements.len() >= bound {
                    return Err(Error::GroupTooLarge(bound));
                }
                elements.insert(h.clone());
                frontier.push(h);
            }
        }
    }
    Ok(elements)
}

/// `[G : H]` for `H ≤ G`, both fully enumerable.
pub fn subgroup_index(h: &PermGroup, g: &PermGroup) -> Result<usize> {
    if !h.is_subgroup_of(g)? {
        return Err(Error::NotASubgroup);
    }
    Ok(g.order()? / h.order()?)
}

/// Per-type validity report for a pair of local data collections.
#[derive(Clone, Debug)]
pub struct LocalDataReport {
    pub per_type: Vec<LocalDataTypeReport>,
}

#[derive(Clone, Debug)]
pub struct LocalDataTypeReport {
    pub degree_ok: bool,
    pub f_le_facute: bool,
    pub facute_le_young: bool,
    pub orbits_equal: bool,
}

impl LocalDataReport {
    pub fn is_valid(&self) -> bool {
        self.per_type
            .iter()
            .all(|r| r.degree_ok && r.f_le_facute && r.facute_le_young && r.orbits_equal)
    }
}

/// Checks `F_i ≤ F́_i ≤ Ŷ(F_i)` and orbit equality for all types.
pub fn validate_local_data(
    f: &[PermGroup],
    facute: &[PermGroup],
    q: &[u16],
) -> Result<LocalDataReport> {
    if f.len() != q.len() || facute.len() != q.len() {
        return Err(Error::DegreeMismatch {
            expected: q.len(),
            got: f.len().max(facute.len()),
            context: "number of local groups".into(),
        });
    }
    let mut per_type = Vec::new();
    for i in 0..q.len() {
        let degree_ok = f[i].degree() == q[i] as usize && facute[i].degree() == q[i] as usize;
        let (f_le_facute, facute_le_young, orbits_equal) = if degree_ok {
            (
                f[i].is_subgroup_of(&facute[i])?,
                f[i].within_young_overgroup(&facute[i]),
                f[i].orbits() == facute[i].orbits(),
            )
        } else {
            (false, false, false)
        };
        per_type.push(LocalDataTypeReport {
            degree_ok,
            f_le_facute,
            facute_le_young,
            orbits_equal,
        });
    }
    Ok(LocalDataReport { per_type })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumerate_small_groups() {
        assert_eq!(PermGroup::cyclic(3).order().unwrap(), 3);
        assert_eq!(PermGroup::symmetric(3).order().unwrap(), 6);
        assert_eq!(PermGroup::trivial(4).order().unwrap(), 1);
    }

    #[test]
    fn enumeration_bound() {
        let g = PermGroup::symmetric(6);
        assert!(matches!(g.enumerate(100), Err(Error::GroupTooLarge(100))));
        assert_eq!(g.enumerate(720).unwrap().len(), 720);
    }

    #[test]
    fn orbits_examples() {
        let g = PermGroup::new(3, vec![Perm::from_cycles(3, &[&[0, 1]]).unwrap()]).unwrap();
        assert_eq!(g.orbits(), vec![vec![0, 1], vec![2]]);
        assert_eq!(PermGroup::symmetric(3).orbits(), vec![vec![0, 1, 2]]);
        assert!(PermGroup::symmetric(3).is_transitive());
    }

    #[test]
    fn young_overgroup_examples() {
        let c3 = PermGroup::cyclic(3);
        assert!(c3.young_overgroup().same_group(&PermGroup::symmetric(3)).unwrap());

        let g = PermGroup::new(3, vec![Perm::from_cycles(3, &[&[0, 1]]).unwrap()]).unwrap();
        assert_eq!(g.young_overgroup().order().unwrap(), 2);
        assert_eq!(g.young_order(), 2);

        // G ≤ Ŷ(G) with equal orbits
        for g in [c3, PermGroup::symmetric(4), PermGroup::trivial(3)] {
            let y = g.young_overgroup();
            assert!(g.is_subgroup_of(&y).unwrap());
            assert_eq!(g.orbits(), y.orbits());
            // idempotent
            assert!(y.young_overgroup().same_group(&y).unwrap());
        }
    }

    #[test]
    fn stabilizer_analysis_examples() {
        let s3 = PermGroup::symmetric(3).stabilizer_analysis().unwrap();
        assert!(s3.gen_by_point_stabs);
        assert!(!s3.free);

        let c3 = PermGroup::cyclic(3).stabilizer_analysis().unwrap();
        assert!(!c3.gen_by_point_stabs);
        assert!(c3.free);

        let triv = PermGroup::trivial(3).stabilizer_analysis().unwrap();
        assert!(triv.gen_by_point_stabs);
        assert!(triv.free);
    }

    #[test]
    fn subgroup_index_examples() {
        let c3 = PermGroup::cyclic(3);
        let s3 = PermGroup::symmetric(3);
        assert_eq!(subgroup_index(&c3, &s3).unwrap(), 2);
        assert_eq!(subgroup_index(&s3, &s3).unwrap(), 1);
        assert!(matches!(
            subgroup_index(&s3, &c3),
            Err(Error::NotASubgroup)
        ));
    }

    #[test]
    fn validate_local_data_examples() {
        let q = [3u16];
        let c3 = PermGroup::cyclic(3);
        let s3 = PermGroup::symmetric(3);
        let swap = PermGroup::new(3, vec![Perm::from_cycles(3, &[&[0, 1]]).unwrap()]).unwrap();

        assert!(validate_local_data(&[c3.clone()], &[c3.clone()], &q).unwrap().is_valid());
        assert!(validate_local_data(&[c3.clone()], &[s3.clone()], &q).unwrap().is_valid());
        let bad = validate_local_data(&[swap], &[s3], &q).unwrap();
        assert!(!bad.is_valid());
        assert!(!bad.per_type[0].facute_le_young);
    }

    #[test]
    fn compose_convention() {
        // (a ∘ b)(x) = a(b(x))
        let a = Perm::from_cycles(3, &[&[0, 1]]).unwrap();
        let b = Perm::from_cycles(3, &[&[1, 2]]).unwrap();
        let ab = a.compose(&b);
        assert_eq!(ab.apply(1), 2);
        assert_eq!(ab.apply(2), 0);
        assert_eq!(ab.apply(0), 1);
        assert!(a.compose(&a.inverse()).is_identity());
    }
}
