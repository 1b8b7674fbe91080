//! Finite truncations of the semiregular right-angled building.
//!
//! Chambers are modelled as normal words in the graph product of cyclic
//! groups `Z/q_i` over the commutation graph (`m = 2` pairs commute); the
//! empty word is the base chamber. All geometry is computed lazily inside
//! caller-specified balls, with explicit errors when a computation escapes
//! its bound.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use crate::diagram::{Diagram, MValue, TypeIndex, TypeSet};
use crate::error::{Error, Result};
use crate::words::{self, Letter, Parameters, Side, Word};

/// A chamber of the building: a normal word relative to the base chamber.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Chamber(Word);

impl Chamber {
    pub fn word(&self) -> &Word {
        &self.0
    }

    pub fn is_base(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Debug for Chamber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Canonical key for a residue: its type set together with the unique
/// minimal-length chamber it contains.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ResidueKey {
    pub types: TypeSet,
    pub rep: Chamber,
}

impl ResidueKey {
    /// Panel type, if this key has rank one.
    pub fn panel_type(&self) -> Result<TypeIndex> {
        let mut it = self.types.iter();
        match (it.next(), it.next()) {
            (Some(i), None) => Ok(i),
            _ => Err(Error::NotAPanel(format!("{:?}", self.types))),
        }
    }
}

impl fmt::Debug for ResidueKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "R{:?}@{:?}", self.types, self.rep)
    }
}

/// Canonical key for an equivalence class of parallel `i`-panels: the
/// residue of type `{i} ∪ i⊥` containing them, plus the type itself.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TreeWall {
    pub ty: TypeIndex,
    pub residue: ResidueKey,
}

impl fmt::Debug for TreeWall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TW[{}]{:?}", self.ty.0, self.residue.rep)
    }
}

/// A gallery: a path of pairwise-adjacent chambers with recorded step types.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gallery {
    pub chambers: Vec<Chamber>,
    pub step_types: Vec<TypeIndex>,
}

impl Gallery {
    pub fn len(&self) -> usize {
        self.step_types.len()
    }

    pub fn is_empty(&self) -> bool {
        self.step_types.is_empty()
    }

    pub fn start(&self) -> &Chamber {
        self.chambers.first().expect("gallery has at least one chamber")
    }

    pub fn end(&self) -> &Chamber {
        self.chambers.last().expect("gallery has at least one chamber")
    }
}

/// A ball computed by breadth-first search, with distances from its center.
#[derive(Clone, Debug)]
pub struct Ball {
    chambers: Vec<Chamber>,
    dist: HashMap<Chamber, usize>,
    radius: usize,
}

impl Ball {
    pub fn chambers(&self) -> &[Chamber] {
        &self.chambers
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.chambers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chambers.is_empty()
    }

    pub fn contains(&self, c: &Chamber) -> bool {
        self.dist.contains_key(c)
    }

    pub fn dist_to_center(&self, c: &Chamber) -> Option<usize> {
        self.dist.get(c).copied()
    }
}

/// Explicit finite panel-closed set of chambers: convex, and containing
/// every panel it meets in at least two chambers. Validated at construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PanelClosedSet {
    chambers: Vec<Chamber>,
}

impl PanelClosedSet {
    pub fn chambers(&self) -> &[Chamber] {
        &self.chambers
    }

    pub fn contains(&self, c: &Chamber) -> bool {
        self.chambers.binary_search(c).is_ok()
    }

    pub fn len(&self) -> usize {
        self.chambers.len()
    }
}

/// Outcome of the sphere dichotomy for a panel against a panel-closed set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SphereCase {
    /// The panel lies in one sphere and is parallel to a panel inside the set.
    Parallel(ResidueKey),
    /// Exactly one chamber is closest; the whole panel projects to one gate.
    Gate(Chamber),
}

/// Result of a closing-square completion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosingSquare {
    pub d: Chamber,
    pub i: TypeIndex,
    pub j: TypeIndex,
}

/// A concave gallery together with its phase boundaries: distances to the
/// reference set strictly decrease up to `j`, stay constant up to `k`, and
/// strictly increase afterwards.
#[derive(Clone, Debug)]
pub struct ConcaveGallery {
    pub gallery: Gallery,
    pub j: usize,
    pub k: usize,
}

/// The bipartite incidence graph between `i`-tree-walls and residues of type
/// `I∖{i}` met by a ball; edges are the `i⊥`-residues. A tree for the full
/// building, hence acyclic on any ball.
#[derive(Clone, Debug)]
pub struct TreeWallTree {
    pub ty: TypeIndex,
    pub tree_walls: Vec<TreeWall>,
    pub residues: Vec<ResidueKey>,
    /// (tree-wall index, residue index, defining `i⊥`-residue)
    pub edges: Vec<(usize, usize, ResidueKey)>,
}

impl TreeWallTree {
    pub fn is_acyclic(&self) -> bool {
        // union-find over the disjoint node sets; a cycle shows up as an
        // edge joining two already-connected nodes
        let n = self.tree_walls.len() + self.residues.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut Vec<usize>, x: usize) -> usize {
            if parent[x] != x {
                let r = find(parent, parent[x]);
                parent[x] = r;
            }
            parent[x]
        }
        for &(t, r, _) in &self.edges {
            let a = find(&mut parent, t);
            let b = find(&mut parent, self.tree_walls.len() + r);
            if a == b {
                return false;
            }
            parent[a] = b;
        }
        true
    }
}

/// A diagram with parameters: everything needed to compute in the unique
/// semiregular right-angled building they determine.
#[derive(Clone, Debug)]
pub struct Building {
    diagram: Diagram,
    params: Parameters,
}

impl Building {
    pub fn new(diagram: Diagram, params: Parameters) -> Result<Building> {
        if params.rank() != diagram.rank() {
            return Err(Error::DegreeMismatch {
                expected: diagram.rank(),
                got: params.rank(),
                context: "parameters per diagram type".into(),
            });
        }
        Ok(Building { diagram, params })
    }

    pub fn diagram(&self) -> &Diagram {
        &self.diagram
    }

    pub fn params(&self) -> &Parameters {
        &self.params
    }

    pub fn base(&self) -> Chamber {
        Chamber(Word::empty())
    }

    pub fn chamber(&self, word: Word) -> Chamber {
        Chamber(word)
    }

    /// Builds a chamber from `(type, color)` pairs in declaration indices.
    pub fn chamber_from_pairs(&self, pairs: &[(TypeIndex, u16)]) -> Result<Chamber> {
        let letters: Vec<Letter> = pairs.iter().map(|&(t, c)| Letter::new(t, c)).collect();
        Ok(Chamber(Word::from_letters(&self.diagram, &self.params, &letters)?))
    }

    /// The unique chamber with prescribed coloring `λ_i = colors[i]`.
    pub fn chamber_with_colors(&self, colors: &[u16]) -> Result<Chamber> {
        let pairs: Vec<(TypeIndex, u16)> = self
            .diagram
            .types()
            .zip(colors.iter().copied())
            .filter(|&(_, c)| c != 0)
            .collect();
        self.chamber_from_pairs(&pairs)
    }

    pub fn mul(&self, c: &Chamber, w: &Word) -> Chamber {
        Chamber(words::multiply(&c.0, w, &self.diagram, &self.params))
    }

    pub fn step(&self, c: &Chamber, ty: TypeIndex, color: u16) -> Chamber {
        let w = Word::from_letters(&self.diagram, &self.params, &[Letter::new(ty, color)])
            .expect("single valid letter");
        self.mul(c, &w)
    }

    /// `c⁻¹ · e` as a normal word.
    pub fn diff(&self, c: &Chamber, e: &Chamber) -> Word {
        let inv = words::invert(&c.0, &self.diagram, &self.params);
        words::multiply(&inv, &e.0, &self.diagram, &self.params)
    }

    /// Gallery distance, computed algebraically as the reduced word length.
    pub fn dist(&self, c: &Chamber, e: &Chamber) -> usize {
        self.diff(c, e).len()
    }

    /// `i`-distance: the number of type-`i` letters separating two chambers.
    pub fn dist_i(&self, i: TypeIndex, c: &Chamber, e: &Chamber) -> usize {
        words::i_count(&self.diff(c, e), i)
    }

    /// All chambers adjacent to `c`, in declaration-then-color order.
    pub fn neighbors(&self, c: &Chamber) -> Vec<(TypeIndex, Chamber)> {
        let mut out = Vec::new();
        for i in self.diagram.types() {
            for color in 1..self.params.q(i) {
                out.push((i, self.step(c, i, color)));
            }
        }
        out
    }

    /// The adjacency type of two distinct chambers in a common panel.
    pub fn adjacency(&self, c: &Chamber, e: &Chamber) -> Option<TypeIndex> {
        let d = self.diff(c, e);
        match d.letters() {
            [single] => Some(single.ty),
            _ => None,
        }
    }

    // -- residues and projections ------------------------------------------

    /// Canonical key of the `J`-residue containing `c`: the representative
    /// is `c` with its maximal extractable `J`-suffix stripped.
    pub fn residue_key(&self, c: &Chamber, j_set: TypeSet) -> ResidueKey {
        let (rest, _) = words::split(&c.0, j_set, Side::Suffix, &self.diagram, &self.params);
        ResidueKey {
            types: j_set,
            rep: Chamber(rest),
        }
    }

    pub fn panel(&self, c: &Chamber, i: TypeIndex) -> ResidueKey {
        self.residue_key(c, TypeSet::singleton(i))
    }

    /// The `q_i` chambers of a panel, in color order of the offset from the
    /// representative.
    pub fn panel_chambers(&self, p: &ResidueKey) -> Result<Vec<Chamber>> {
        let i = p.panel_type()?;
        let mut out = vec![p.rep.clone()];
        for color in 1..self.params.q(i) {
            out.push(self.step(&p.rep, i, color));
        }
        Ok(out)
    }

    /// Enumerates a residue whose types pairwise commute (the finite case).
    pub fn residue_chambers(&self, r: &ResidueKey) -> Result<Vec<Chamber>> {
        let types: Vec<TypeIndex> = r.types.iter().collect();
        for (a, &i) in types.iter().enumerate() {
            for &j in &types[a + 1..] {
                if self.diagram.m_value(i, j) == MValue::Infinity {
                    return Err(Error::PreconditionViolated(format!(
                        "residue of type {:?} is infinite (types `{}` and `{}` do not commute)",
                        r.types,
                        self.diagram.label(i),
                        self.diagram.label(j)
                    )));
                }
            }
        }
        let mut out = vec![r.rep.clone()];
        for &i in &types {
            let mut next = Vec::with_capacity(out.len() * self.params.q(i) as usize);
            for c in &out {
                next.push(c.clone());
                for color in 1..self.params.q(i) {
                    next.push(self.step(c, i, color));
                }
            }
            out = next;
        }
        Ok(out)
    }

    /// The legal coloring: `λ_i(c)` is the total type-`i` color of `c`
    /// (sum of the colors of its `i`-letters mod `q_i`). Bijective on every
    /// `i`-panel in coordinate `i` and constant in every other coordinate.
    pub fn lambda(&self, c: &Chamber) -> Vec<u16> {
        let mut out = vec![0u32; self.diagram.rank()];
        for l in c.0.letters() {
            out[l.ty.index()] += l.color as u32;
        }
        out.iter()
            .enumerate()
            .map(|(i, &s)| (s % self.params.q(TypeIndex(i as u8)) as u32) as u16)
            .collect()
    }

    pub fn lambda_i(&self, c: &Chamber, i: TypeIndex) -> u16 {
        let q = self.params.q(i) as u32;
        let s: u32 = c
            .0
            .letters()
            .iter()
            .filter(|l| l.ty == i)
            .map(|l| l.color as u32)
            .sum();
        (s % q) as u16
    }

    /// The chamber of panel `p` with prescribed `λ_i`-color.
    pub fn panel_chamber_with_color(&self, p: &ResidueKey, color: u16) -> Result<Chamber> {
        let i = p.panel_type()?;
        let q = self.params.q(i);
        let rep_color = self.lambda_i(&p.rep, i);
        let offset = (color + q - rep_color) % q;
        Ok(if offset == 0 {
            p.rep.clone()
        } else {
            self.step(&p.rep, i, offset)
        })
    }

    /// Gate projection onto a residue: the unique chamber of the residue
    /// closest to `c`.
    pub fn project_residue(&self, c: &Chamber, r: &ResidueKey) -> Chamber {
        let x = self.diff(&r.rep, c);
        let (_, prefix) = words::split(&x, r.types, Side::Prefix, &self.diagram, &self.params);
        self.mul(&r.rep, &prefix)
    }

    // -- balls and galleries -----------------------------------------------

    pub fn ball(&self, center: &Chamber, radius: usize, limit: usize) -> Result<Ball> {
        self.ball_around(std::slice::from_ref(center), radius, limit)
    }

    /// Multi-source ball: all chambers within `radius` of the given set.
    pub fn ball_around(&self, centers: &[Chamber], radius: usize, limit: usize) -> Result<Ball> {
        let mut dist: HashMap<Chamber, usize> = HashMap::new();
        let mut order: Vec<Chamber> = Vec::new();
        let mut queue: VecDeque<Chamber> = VecDeque::new();
        for c in centers {
            if !dist.contains_key(c) {
                dist.insert(c.clone(), 0);
                order.push(c.clone());
                queue.push_back(c.clone());
            }
        }
        while let Some(c) = queue.pop_front() {
            let d = dist[&c];
            if d == radius {
                continue;
            }
            for (_, n) in self.neighbors(&c) {
                if !dist.contains_key(&n) {
                    if order.len() >= limit {
                        return Err(Error::BallTooLarge { limit });
                    }
                    dist.insert(n.clone(), d + 1);
                    order.push(n.clone());
                    queue.push_back(n);
                }
            }
        }
        Ok(Ball {
            chambers: order,
            dist,
            radius,
        })
    }

    /// A minimal gallery realizing the normal form of `c⁻¹e` letter by letter.
    pub fn minimal_gallery(&self, c: &Chamber, e: &Chamber) -> Gallery {
        let w = self.diff(c, e);
        let mut chambers = vec![c.clone()];
        let mut step_types = Vec::new();
        let mut cur = c.clone();
        for &l in w.letters() {
            cur = self.step(&cur, l.ty, l.color);
            chambers.push(cur.clone());
            step_types.push(l.ty);
        }
        Gallery {
            chambers,
            step_types,
        }
    }

    pub fn is_minimal(&self, g: &Gallery) -> bool {
        g.len() == self.dist(g.start(), g.end())
            && g.chambers.windows(2).zip(&g.step_types).all(|(w, &t)| {
                self.adjacency(&w[0], &w[1]) == Some(t)
            })
    }

    // -- panel-closed sets --------------------------------------------------

    /// Validates convexity and panel-saturation of an explicit chamber set.
    pub fn panel_closed_set(&self, chambers: Vec<Chamber>) -> Result<PanelClosedSet> {
        let mut chambers: Vec<Chamber> = chambers;
        chambers.sort();
        chambers.dedup();
        if chambers.is_empty() {
            return Err(Error::InvalidPanelClosedSet("empty set".into()));
        }
        let set: BTreeSet<&Chamber> = chambers.iter().collect();
        for c in &chambers {
            for e in &chambers {
                if c >= e {
                    continue;
                }
                if self.dist(c, e) == 1 {
                    let i = self.adjacency(c, e).expect("distance-one chambers are adjacent");
                    for x in self.panel_chambers(&self.panel(c, i))? {
                        if !set.contains(&x) {
                            return Err(Error::InvalidPanelClosedSet(format!(
                                "panel of type `{}` at {:?} meets the set twice but {:?} is missing",
                                self.diagram.label(i),
                                c,
                                x
                            )));
                        }
                    }
                }
                for x in self.interval(c, e) {
                    if !set.contains(&x) {
                        return Err(Error::InvalidPanelClosedSet(format!(
                            "chamber {:?} on a minimal gallery between {:?} and {:?} is missing",
                            x, c, e
                        )));
                    }
                }
            }
        }
        Ok(PanelClosedSet { chambers })
    }

    /// All chambers on minimal galleries between `c` and `e`.
    pub fn interval(&self, c: &Chamber, e: &Chamber) -> Vec<Chamber> {
        let total = self.dist(c, e);
        let mut seen: BTreeSet<Chamber> = BTreeSet::new();
        let mut stack = vec![c.clone()];
        seen.insert(c.clone());
        while let Some(x) = stack.pop() {
            let dx = self.dist(&x, e);
            if dx == 0 {
                continue;
            }
            for (_, n) in self.neighbors(&x) {
                if self.dist(&n, e) + 1 == dx && !seen.contains(&n) {
                    seen.insert(n.clone());
                    stack.push(n);
                }
            }
        }
        debug_assert!(seen.iter().all(|x| self.dist(c, x) + self.dist(x, e) == total));
        seen.into_iter().collect()
    }

    /// Distance from a chamber to a panel-closed set.
    pub fn dist_to_set(&self, set: &PanelClosedSet, c: &Chamber) -> usize {
        set.chambers
            .iter()
            .map(|x| self.dist(x, c))
            .min()
            .expect("panel-closed sets are nonempty")
    }

    /// The unique gate of `c` in the set, with its distance.
    pub fn project_panel_closed(
        &self,
        set: &PanelClosedSet,
        c: &Chamber,
    ) -> Result<(Chamber, usize)> {
        let mut best: Option<(Chamber, usize)> = None;
        let mut tie = false;
        for x in &set.chambers {
            let d = self.dist(x, c);
            match &best {
                Some((_, bd)) if d > *bd => {}
                Some((_, bd)) if d == *bd => tie = true,
                _ => {
                    best = Some((x.clone(), d));
                    tie = false;
                }
            }
        }
        let (proj, d) = best.expect("panel-closed sets are nonempty");
        if tie {
            return Err(Error::InvalidPanelClosedSet(
                "projection is not unique".into(),
            ));
        }
        Ok((proj, d))
    }

    /// Closes a square over a panel-closed set. `variant` selects the
    /// distance pattern: 1 expects `(n, n+1, n)` for `(c1, c2, c3)`,
    /// 2 expects `(n+1, n+1, n)`.
    pub fn closing_square(
        &self,
        set: &PanelClosedSet,
        c1: &Chamber,
        c2: &Chamber,
        c3: &Chamber,
        variant: u8,
    ) -> Result<ClosingSquare> {
        let i = self
            .adjacency(c1, c2)
            .ok_or_else(|| Error::PreconditionViolated("c1 and c2 are not adjacent".into()))?;
        let j = self
            .adjacency(c2, c3)
            .ok_or_else(|| Error::PreconditionViolated("c2 and c3 are not adjacent".into()))?;
        if i == j {
            return Err(Error::PreconditionViolated(
                "adjacency types must differ".into(),
            ));
        }
        let (d1, d2, d3) = (
            self.dist_to_set(set, c1),
            self.dist_to_set(set, c2),
            self.dist_to_set(set, c3),
        );
        let expected_d = match variant {
            1 => {
                if !(d1 == d3 && d2 == d1 + 1) {
                    return Err(Error::PreconditionViolated(format!(
                        "variant 1 needs distances (n, n+1, n), got ({d1}, {d2}, {d3})"
                    )));
                }
                d1.checked_sub(1).ok_or_else(|| {
                    Error::PreconditionViolated("variant 1 needs n ≥ 1".into())
                })?
            }
            2 => {
                if !(d1 == d2 && d1 == d3 + 1) {
                    return Err(Error::PreconditionViolated(format!(
                        "variant 2 needs distances (n+1, n+1, n), got ({d1}, {d2}, {d3})"
                    )));
                }
                d3
            }
            v => {
                return Err(Error::PreconditionViolated(format!(
                    "unknown closing-square variant {v}"
                )))
            }
        };
        if self.diagram.m_value(i, j) != MValue::Two {
            return Err(Error::NonCommutingTypes {
                i: self.diagram.label(i).to_owned(),
                j: self.diagram.label(j).to_owned(),
            });
        }
        // c3 = c1 · (i,a)(j,b); the fourth corner is c1 · (j,b)
        let x = self.diff(c1, c3);
        let j_letter = x
            .letters()
            .iter()
            .find(|l| l.ty == j)
            .copied()
            .ok_or_else(|| Error::PreconditionViolated("degenerate square".into()))?;
        let d = self.step(c1, j, j_letter.color);
        let dd = self.dist_to_set(set, &d);
        if dd != expected_d
            || self.adjacency(c1, &d) != Some(j)
            || self.adjacency(&d, c3) != Some(i)
        {
            return Err(Error::PreconditionViolated(format!(
                "closing square postcondition failed: dist(C,d) = {dd}, expected {expected_d}"
            )));
        }
        Ok(ClosingSquare { d, i, j })
    }

    /// A minimal gallery from `c1` to `c2` that is concave with respect to
    /// the panel-closed set: the distance profile strictly decreases, stays
    /// constant, then strictly increases.
    pub fn concave_gallery(
        &self,
        c1: &Chamber,
        c2: &Chamber,
        set: &PanelClosedSet,
    ) -> Result<ConcaveGallery> {
        let mut g = self.minimal_gallery(c1, c2);
        let mut dists: Vec<usize> = g
            .chambers
            .iter()
            .map(|c| self.dist_to_set(set, c))
            .collect();
        loop {
            match concavity_phases(&dists) {
                Some((j, k)) => return Ok(ConcaveGallery { gallery: g, j, k }),
                None => {
                    let m = find_violation(&dists)
                        .expect("non-concave profiles contain a fixable local pattern");
                    // replace the middle chamber by the opposite square corner
                    let square = if dists[m - 1] == dists[m + 1] && dists[m] == dists[m - 1] + 1 {
                        self.closing_square(set, &g.chambers[m - 1], &g.chambers[m], &g.chambers[m + 1], 1)?
                    } else if dists[m - 1] == dists[m] && dists[m] == dists[m + 1] + 1 {
                        self.closing_square(set, &g.chambers[m - 1], &g.chambers[m], &g.chambers[m + 1], 2)?
                    } else {
                        // rising-then-flat pattern, apply variant 2 backwards
                        let sq = self.closing_square(
                            set,
                            &g.chambers[m + 1],
                            &g.chambers[m],
                            &g.chambers[m - 1],
                            2,
                        )?;
                        ClosingSquare {
                            d: sq.d,
                            i: sq.j,
                            j: sq.i,
                        }
                    };
                    g.chambers[m] = square.d;
                    g.step_types[m - 1] = square.j;
                    g.step_types[m] = square.i;
                    dists[m] = self.dist_to_set(set, &g.chambers[m]);
                }
            }
        }
    }

    /// Sphere dichotomy for a panel against a panel-closed set.
    pub fn sphere_case(&self, p: &ResidueKey, set: &PanelClosedSet) -> Result<SphereCase> {
        let i = p.panel_type()?;
        let chambers = self.panel_chambers(p)?;
        let dists: Vec<usize> = chambers.iter().map(|c| self.dist_to_set(set, c)).collect();
        let n = *dists.iter().min().expect("panels are nonempty");
        let at_n = dists.iter().filter(|&&d| d == n).count();
        if at_n == chambers.len() {
            let projections: BTreeSet<Chamber> = chambers
                .iter()
                .map(|c| self.project_panel_closed(set, c).map(|(p, _)| p))
                .collect::<Result<_>>()?;
            let first = projections.iter().next().expect("nonempty");
            let parallel = self.panel(first, i);
            let parallel_chambers: BTreeSet<Chamber> =
                self.panel_chambers(&parallel)?.into_iter().collect();
            if projections != parallel_chambers {
                return Err(Error::InvalidPanelClosedSet(
                    "projections of an equidistant panel do not form a panel".into(),
                ));
            }
            Ok(SphereCase::Parallel(parallel))
        } else if at_n == 1 && dists.iter().all(|&d| d == n || d == n + 1) {
            let gate = self.project_panel_closed(set, &chambers[0])?.0;
            for c in &chambers[1..] {
                if self.project_panel_closed(set, c)?.0 != gate {
                    return Err(Error::InvalidPanelClosedSet(
                        "gate-case panel has several projections".into(),
                    ));
                }
            }
            Ok(SphereCase::Gate(gate))
        } else {
            Err(Error::InvalidPanelClosedSet(format!(
                "sphere dichotomy violated on panel {p:?} (distances {dists:?})"
            )))
        }
    }

    /// Smallest panel-closed superset of `seed`, computed by alternating
    /// convex- and panel-saturation to a fixpoint inside the radius-`bound`
    /// ball around the seed.
    pub fn panel_closed_closure(
        &self,
        seed: &[Chamber],
        bound: usize,
    ) -> Result<PanelClosedSet> {
        if seed.is_empty() {
            return Err(Error::InvalidPanelClosedSet("empty seed".into()));
        }
        let within_bound = |c: &Chamber| seed.iter().any(|s| self.dist(s, c) <= bound);
        let mut cur: BTreeSet<Chamber> = seed.iter().cloned().collect();
        loop {
            let mut added = Vec::new();
            // convex saturation
            let list: Vec<Chamber> = cur.iter().cloned().collect();
            for (a, c) in list.iter().enumerate() {
                for e in &list[a + 1..] {
                    for x in self.interval(c, e) {
                        if !cur.contains(&x) {
                            added.push(x);
                        }
                    }
                }
            }
            // panel saturation
            let mut by_panel: BTreeMap<ResidueKey, usize> = BTreeMap::new();
            for c in &list {
                for i in self.diagram.types() {
                    *by_panel.entry(self.panel(c, i)).or_default() += 1;
                }
            }
            for (panel, count) in by_panel {
                if count >= 2 {
                    for x in self.panel_chambers(&panel)? {
                        if !cur.contains(&x) {
                            added.push(x);
                        }
                    }
                }
            }
            if added.is_empty() {
                break;
            }
            for x in added {
                if !within_bound(&x) {
                    return Err(Error::EscapesBound(bound as u32));
                }
                cur.insert(x);
            }
        }
        self.panel_closed_set(cur.into_iter().collect())
    }

    // -- tree-walls ----------------------------------------------------------

    /// The tree-wall (parallel class) of a panel: keyed by the residue of
    /// type `{i} ∪ i⊥` containing it.
    pub fn tree_wall_of(&self, p: &ResidueKey) -> Result<TreeWall> {
        let i = p.panel_type()?;
        let closure = TypeSet::singleton(i).union(self.diagram.perp(TypeSet::singleton(i)));
        Ok(TreeWall {
            ty: i,
            residue: self.residue_key(&p.rep, closure),
        })
    }

    /// All panels of a finite tree-wall, of size `∏_{j ∈ i⊥} q_j`. Rung
    /// types have unbounded parallel classes and are rejected.
    pub fn tree_wall_panels(&self, t: &TreeWall) -> Result<Vec<ResidueKey>> {
        if self.diagram.rung_types().contains(t.ty) {
            return Err(Error::InfiniteTreeWall(self.diagram.label(t.ty).to_owned()));
        }
        let perp = self.diagram.perp(TypeSet::singleton(t.ty));
        let mut reps = vec![t.residue.rep.clone()];
        for j in perp.iter() {
            let mut next = Vec::with_capacity(reps.len() * self.params.q(j) as usize);
            for c in &reps {
                next.push(c.clone());
                for color in 1..self.params.q(j) {
                    next.push(self.step(c, j, color));
                }
            }
            reps = next;
        }
        Ok(reps
            .into_iter()
            .map(|c| ResidueKey {
                types: TypeSet::singleton(t.ty),
                rep: c,
            })
            .collect())
    }

    /// The chambers of a finite tree-wall.
    pub fn tree_wall_chambers(&self, t: &TreeWall) -> Result<Vec<Chamber>> {
        if self.diagram.rung_types().contains(t.ty) {
            return Err(Error::InfiniteTreeWall(self.diagram.label(t.ty).to_owned()));
        }
        self.residue_chambers(&t.residue)
    }

    /// The portion of the `i`-tree-wall tree met by a ball.
    pub fn tree_wall_tree(&self, i: TypeIndex, ball: &Ball) -> TreeWallTree {
        let co_types: TypeSet = self.diagram.types().filter(|&t| t != i).collect();
        let perp = self.diagram.perp(TypeSet::singleton(i));
        let mut tree_walls: Vec<TreeWall> = Vec::new();
        let mut tw_index: HashMap<TreeWall, usize> = HashMap::new();
        let mut residues: Vec<ResidueKey> = Vec::new();
        let mut res_index: HashMap<ResidueKey, usize> = HashMap::new();
        let mut edges: Vec<(usize, usize, ResidueKey)> = Vec::new();
        let mut edge_seen: HashMap<ResidueKey, (usize, usize)> = HashMap::new();
        for c in ball.chambers() {
            let tw = self
                .tree_wall_of(&self.panel(c, i))
                .expect("panels have rank one");
            let res = self.residue_key(c, co_types);
            let edge = self.residue_key(c, perp);
            let ti = *tw_index.entry(tw.clone()).or_insert_with(|| {
                tree_walls.push(tw.clone());
                tree_walls.len() - 1
            });
            let ri = *res_index.entry(res.clone()).or_insert_with(|| {
                residues.push(res.clone());
                residues.len() - 1
            });
            match edge_seen.get(&edge) {
                Some(&(eti, eri)) => {
                    debug_assert_eq!((eti, eri), (ti, ri), "edge joins a unique node pair");
                }
                None => {
                    edge_seen.insert(edge.clone(), (ti, ri));
                    edges.push((ti, ri, edge));
                }
            }
        }
        TreeWallTree {
            ty: i,
            tree_walls,
            residues,
            edges,
        }
    }

    /// Line-graph distance in the `i`-tree-wall tree between the edges given
    /// by the `i⊥`-residues of the two chambers. Adjacent edges are at
    /// distance one.
    pub fn tw_distance(
        &self,
        i: TypeIndex,
        c1: &Chamber,
        c2: &Chamber,
        ball: &Ball,
    ) -> Result<usize> {
        let tree = self.tree_wall_tree(i, ball);
        let perp = self.diagram.perp(TypeSet::singleton(i));
        let e1 = self.residue_key(c1, perp);
        let e2 = self.residue_key(c2, perp);
        let pos = |key: &ResidueKey| tree.edges.iter().position(|(_, _, e)| e == key);
        let (s, t) = match (pos(&e1), pos(&e2)) {
            (Some(s), Some(t)) => (s, t),
            _ => return Err(Error::PathEscapesBall),
        };
        if s == t {
            return Ok(0);
        }
        // BFS on the line graph: edges sharing an endpoint are adjacent
        let mut dist: Vec<Option<usize>> = vec![None; tree.edges.len()];
        dist[s] = Some(0);
        let mut queue = VecDeque::from([s]);
        while let Some(e) = queue.pop_front() {
            let d = dist[e].unwrap();
            if e == t {
                return Ok(d);
            }
            let (ti, ri, _) = tree.edges[e];
            for (f, &(fti, fri, _)) in tree.edges.iter().enumerate() {
                if dist[f].is_none() && (fti == ti || fri == ri) {
                    dist[f] = Some(d + 1);
                    queue.push_back(f);
                }
            }
        }
        Err(Error::PathEscapesBall)
    }

    /// Whether `d` lies in the `J`-wing of `c`: its projection onto the
    /// `J`-residue of `c` is `c` itself.
    pub fn in_wing(&self, d: &Chamber, c: &Chamber, j_set: TypeSet) -> bool {
        let r = self.residue_key(c, j_set);
        self.project_residue(d, &r) == *c
    }
}

/// Phase boundaries `(j, k)` of a concave distance profile, or `None`.
fn concavity_phases(dists: &[usize]) -> Option<(usize, usize)> {
    let mut j = 0;
    while j + 1 < dists.len() && dists[j + 1] + 1 == dists[j] {
        j += 1;
    }
    let mut k = j;
    while k + 1 < dists.len() && dists[k + 1] == dists[k] {
        k += 1;
    }
    for m in k..dists.len() - 1 {
        if dists[m + 1] != dists[m] + 1 {
            return None;
        }
    }
    Some((j, k))
}

/// Index of a middle chamber whose local pattern closing squares can fix.
fn find_violation(dists: &[usize]) -> Option<usize> {
    for m in 1..dists.len().saturating_sub(1) {
        let (a, b, c) = (dists[m - 1], dists[m], dists[m + 1]);
        if (b == a + 1 && c == a) || (a == b && c + 1 == b) || (b == a + 1 && c == b) {
            return Some(m);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn tree() -> Building {
        Building::new(
            Diagram::numbered(2, &[(1, 2)]).unwrap(),
            Parameters::uniform(2, 3).unwrap(),
        )
        .unwrap()
    }

    pub(crate) fn ladder() -> Building {
        Building::new(
            Diagram::numbered(3, &[(2, 3)]).unwrap(),
            Parameters::uniform(3, 3).unwrap(),
        )
        .unwrap()
    }

    fn ch(b: &Building, pairs: &[(u8, u16)]) -> Chamber {
        b.chamber_from_pairs(
            &pairs
                .iter()
                .map(|&(t, c)| (TypeIndex(t - 1), c))
                .collect::<Vec<_>>(),
        )
        .unwrap()
    }

    #[test]
    fn adjacency_examples() {
        let b = tree();
        assert_eq!(b.adjacency(&b.base(), &ch(&b, &[(1, 1)])), Some(TypeIndex(0)));
        assert_eq!(b.adjacency(&b.base(), &b.base()), None);
        assert_eq!(
            b.adjacency(&ch(&b, &[(1, 1)]), &ch(&b, &[(1, 2)])),
            Some(TypeIndex(0))
        );
    }

    #[test]
    fn residue_key_examples() {
        let b = tree();
        let c = ch(&b, &[(1, 1), (2, 1)]);
        let k = b.residue_key(&c, TypeSet::singleton(TypeIndex(1)));
        assert_eq!(k.rep, ch(&b, &[(1, 1)]));

        let b = ladder();
        let c = ch(&b, &[(1, 2), (2, 1)]);
        let k = b.residue_key(&c, TypeSet::singleton(TypeIndex(0)));
        assert_eq!(k.rep, ch(&b, &[(2, 1)]));

        let k = b.residue_key(&c, TypeSet::EMPTY);
        assert_eq!(k.rep, c);
    }

    #[test]
    fn panel_chambers_examples() {
        let b = tree();
        let p = b.panel(&b.base(), TypeIndex(0));
        let cs = b.panel_chambers(&p).unwrap();
        assert_eq!(cs, vec![b.base(), ch(&b, &[(1, 1)]), ch(&b, &[(1, 2)])]);
        // same panel from another member
        assert_eq!(b.panel(&ch(&b, &[(1, 1)]), TypeIndex(0)), p);
    }

    #[test]
    fn lambda_examples() {
        let b = ladder();
        assert_eq!(b.lambda(&b.base()), vec![0, 0, 0]);
        assert_eq!(b.lambda(&ch(&b, &[(1, 2)])), vec![2, 0, 0]);
        let c = ch(&b, &[(2, 1), (1, 2)]);
        assert_eq!(b.lambda_i(&c, TypeIndex(0)), 2);
        assert_eq!(b.lambda_i(&c, TypeIndex(1)), 1);
    }

    #[test]
    fn lambda_legal_on_panels() {
        // bijective in coordinate i, constant in the others, on every panel
        // of a radius-3 ball of the tree and the ladder
        for b in [tree(), ladder()] {
            let ball = b.ball(&b.base(), 3, 100_000).unwrap();
            let mut seen: BTreeSet<ResidueKey> = BTreeSet::new();
            for c in ball.chambers() {
                for i in b.diagram().types() {
                    let p = b.panel(c, i);
                    if !seen.insert(p.clone()) {
                        continue;
                    }
                    let chambers = b.panel_chambers(&p).unwrap();
                    let colors: BTreeSet<u16> =
                        chambers.iter().map(|x| b.lambda_i(x, i)).collect();
                    assert_eq!(colors.len(), b.params().q(i) as usize);
                    for j in b.diagram().types().filter(|&j| j != i) {
                        let other: BTreeSet<u16> =
                            chambers.iter().map(|x| b.lambda_i(x, j)).collect();
                        assert_eq!(other.len(), 1, "λ_{} not constant on {:?}", j.0, p);
                    }
                }
            }
        }
    }

    #[test]
    fn project_residue_examples() {
        let b = tree();
        let c = ch(&b, &[(1, 1), (2, 1), (1, 1)]);
        let r = b.panel(&b.base(), TypeIndex(0));
        assert_eq!(b.project_residue(&c, &r), ch(&b, &[(1, 1)]));
        // inside the residue: identity
        assert_eq!(b.project_residue(&ch(&b, &[(1, 2)]), &r), ch(&b, &[(1, 2)]));
        // whole building
        let all = b.residue_key(&b.base(), b.diagram().all_types());
        assert_eq!(b.project_residue(&c, &all), c);
    }

    #[test]
    fn ball_counts() {
        let b = tree();
        assert_eq!(b.ball(&b.base(), 2, 10_000).unwrap().len(), 13);
        assert_eq!(b.ball(&b.base(), 0, 10).unwrap().len(), 1);
        let b = ladder();
        assert_eq!(b.ball(&b.base(), 2, 10_000).unwrap().len(), 23);
        assert!(matches!(
            b.ball(&b.base(), 4, 10).unwrap_err(),
            Error::BallTooLarge { limit: 10 }
        ));
    }

    #[test]
    fn minimal_gallery_examples() {
        let b = tree();
        let g = b.minimal_gallery(&b.base(), &b.base());
        assert_eq!(g.chambers.len(), 1);
        let g = b.minimal_gallery(&b.base(), &ch(&b, &[(1, 1), (2, 1)]));
        assert_eq!(g.step_types, vec![TypeIndex(0), TypeIndex(1)]);
        assert!(b.is_minimal(&g));
    }

    #[test]
    fn panel_closed_validation() {
        let b = tree();
        assert!(b.panel_closed_set(vec![b.base()]).is_ok());
        // two chambers of a panel without the third: not closed
        assert!(b
            .panel_closed_set(vec![b.base(), ch(&b, &[(1, 1)])])
            .is_err());
        let full = vec![b.base(), ch(&b, &[(1, 1)]), ch(&b, &[(1, 2)])];
        assert!(b.panel_closed_set(full).is_ok());
    }

    #[test]
    fn panel_closed_closure_examples() {
        let b = tree();
        let c = b.panel_closed_closure(&[b.base()], 2).unwrap();
        assert_eq!(c.chambers(), &[b.base()]);

        let c = b
            .panel_closed_closure(&[b.base(), ch(&b, &[(1, 1)])], 2)
            .unwrap();
        assert_eq!(c.len(), 3);
    }

    #[test]
    fn projection_gate_and_uniqueness() {
        let b = tree();
        let set = b.panel_closed_set(vec![b.base()]).unwrap();
        let c = ch(&b, &[(1, 1), (2, 1)]);
        assert_eq!(b.project_panel_closed(&set, &c).unwrap(), (b.base(), 2));
        let inside = b.panel_closed_set(vec![c.clone()]).unwrap();
        assert_eq!(b.project_panel_closed(&inside, &c).unwrap(), (c, 0));
    }

    #[test]
    fn closing_square_example() {
        let b = ladder();
        let set = b.panel_closed_set(vec![b.base()]).unwrap();
        let c1 = ch(&b, &[(1, 1)]);
        let c2 = ch(&b, &[(1, 1), (2, 1)]);
        let c3 = ch(&b, &[(2, 1)]);
        let sq = b.closing_square(&set, &c1, &c2, &c3, 1).unwrap();
        assert_eq!(sq.d, b.base());
        assert_eq!((sq.i, sq.j), (TypeIndex(1), TypeIndex(0)));
    }

    #[test]
    fn concave_gallery_example() {
        let b = ladder();
        let set = b.panel_closed_set(vec![b.base()]).unwrap();
        let c1 = ch(&b, &[(2, 1)]);
        let c2 = ch(&b, &[(3, 1)]);
        let cg = b.concave_gallery(&c1, &c2, &set).unwrap();
        assert_eq!(cg.gallery.len(), 2);
        assert_eq!((cg.j, cg.k), (1, 1));
        assert_eq!(cg.gallery.chambers[1], b.base());

        let cg = b.concave_gallery(&c1, &c1, &set).unwrap();
        assert_eq!((cg.j, cg.k), (0, 0));
        assert_eq!(cg.gallery.len(), 0);
    }

    #[test]
    fn sphere_case_examples() {
        let b = tree();
        let p = b.panel(&b.base(), TypeIndex(0));
        let full_panel = b.panel_closed_set(b.panel_chambers(&p).unwrap()).unwrap();
        assert_eq!(
            b.sphere_case(&p, &full_panel).unwrap(),
            SphereCase::Parallel(p.clone())
        );

        let set = b.panel_closed_set(vec![b.base()]).unwrap();
        let p = b.panel(&ch(&b, &[(2, 1)]), TypeIndex(0));
        assert_eq!(b.sphere_case(&p, &set).unwrap(), SphereCase::Gate(b.base()));
    }

    #[test]
    fn tree_wall_examples() {
        let b = tree();
        // 1⊥ = ∅: tree-wall of a 1-panel is keyed by the panel itself
        let p = b.panel(&b.base(), TypeIndex(0));
        let t = b.tree_wall_of(&p).unwrap();
        assert_eq!(t.residue.types, TypeSet::singleton(TypeIndex(0)));
        assert_eq!(b.tree_wall_panels(&t).unwrap().len(), 1);

        let b = ladder();
        // two 1-panels linked by a 2-step are parallel (2 ∈ 1⊥)
        let p0 = b.panel(&b.base(), TypeIndex(0));
        let p1 = b.panel(&ch(&b, &[(2, 1)]), TypeIndex(0));
        assert_eq!(b.tree_wall_of(&p0).unwrap(), b.tree_wall_of(&p1).unwrap());

        // type-2 tree-walls have 2⊥ = {1}: q_1 = 3 panels
        let t = b.tree_wall_of(&b.panel(&b.base(), TypeIndex(1))).unwrap();
        assert_eq!(b.tree_wall_panels(&t).unwrap().len(), 3);

        // type-1 is the rung type: unbounded class
        let t = b.tree_wall_of(&p0).unwrap();
        assert!(matches!(
            b.tree_wall_panels(&t),
            Err(Error::InfiniteTreeWall(_))
        ));
    }

    #[test]
    fn tree_wall_tree_acyclic() {
        for b in [tree(), ladder()] {
            let ball = b.ball(&b.base(), 3, 100_000).unwrap();
            for i in b.diagram().types() {
                let t = b.tree_wall_tree(i, &ball);
                assert!(t.is_acyclic(), "Γ_{} has a cycle", i.0);
            }
        }
    }

    #[test]
    fn tw_distance_examples() {
        let b = tree();
        let ball = b.ball(&b.base(), 4, 100_000).unwrap();
        let i = TypeIndex(0);
        assert_eq!(b.tw_distance(i, &b.base(), &b.base(), &ball).unwrap(), 0);
        assert_eq!(
            b.tw_distance(i, &b.base(), &ch(&b, &[(1, 1)]), &ball).unwrap(),
            1
        );
        // dist_1 = 1, ε = -1
        assert_eq!(b.dist_i(i, &b.base(), &ch(&b, &[(1, 1)])), 1);
    }

    #[test]
    fn wing_examples() {
        let b = tree();
        let j = TypeSet::singleton(TypeIndex(0));
        assert!(b.in_wing(&b.base(), &b.base(), j));
        assert!(!b.in_wing(&ch(&b, &[(1, 1)]), &b.base(), j));
        assert!(b.in_wing(&ch(&b, &[(2, 1)]), &b.base(), j));
    }

    #[test]
    fn wings_partition_ball() {
        let b = tree();
        let j = TypeSet::singleton(TypeIndex(0));
        let panel = b.panel(&b.base(), TypeIndex(0));
        let ball = b.ball(&b.base(), 4, 100_000).unwrap();
        for c in ball.chambers() {
            let count = b
                .panel_chambers(&panel)
                .unwrap()
                .iter()
                .filter(|p| b.in_wing(c, p, j))
                .count();
            assert_eq!(count, 1);
        }
    }
}
