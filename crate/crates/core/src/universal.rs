//! Automorphisms of the building given by their local actions.
//!
//! A portrait is a base-chamber image, a per-type default permutation and a
//! finite map from tree-walls to permutations. Parallel panels always carry
//! the same local action, so keying by tree-walls is forced. Evaluation is
//! relative to local data `F`: at a tree-wall without an explicit
//! assignment, the default is corrected by a canonical `F_i`-element so that
//! the approach color of the crossing is mapped correctly (the correction is
//! `res(x→y) = s(y)∘s(x)⁻¹` for a fixed orbit section `s`, which makes the
//! canonical choices compose). A portrait whose data cannot be resolved this
//! way is inconsistent, and evaluation reports it.

use std::collections::{BTreeMap, BTreeSet};

use crate::building::{Building, Chamber, PanelClosedSet, ResidueKey, TreeWall};
use crate::diagram::{TypeIndex, TypeSet};
use crate::error::{Error, Result};
use crate::permgrp::{LocalDataReport, Perm, PermGroup};
use crate::words::Letter;

/// Prescribed local groups, one per type, of degree `q_i`.
#[derive(Clone, Debug)]
pub struct LocalData {
    groups: Vec<PermGroup>,
}

impl LocalData {
    pub fn new(b: &Building, groups: Vec<PermGroup>) -> Result<LocalData> {
        if groups.len() != b.diagram().rank() {
            return Err(Error::DegreeMismatch {
                expected: b.diagram().rank(),
                got: groups.len(),
                context: "one local group per type".into(),
            });
        }
        for (i, g) in groups.iter().enumerate() {
            let q = b.params().q(TypeIndex(i as u8)) as usize;
            if g.degree() != q {
                return Err(Error::DegreeMismatch {
                    expected: q,
                    got: g.degree(),
                    context: format!("local group at type `{}`", b.diagram().label(TypeIndex(i as u8))),
                });
            }
        }
        Ok(LocalData { groups })
    }

    /// Full symmetric groups at every type.
    pub fn symmetric(b: &Building) -> LocalData {
        let groups = b
            .diagram()
            .types()
            .map(|i| PermGroup::symmetric(b.params().q(i) as usize))
            .collect();
        LocalData { groups }
    }

    pub fn group(&self, i: TypeIndex) -> &PermGroup {
        &self.groups[i.index()]
    }

    pub fn groups(&self) -> &[PermGroup] {
        &self.groups
    }

    /// Fixed orbit section: the first group element (in enumeration order)
    /// taking the orbit minimum of `x` to `x`.
    fn section(&self, i: TypeIndex, x: u16) -> Result<Perm> {
        let g = self.group(i);
        let base = g.orbit_of(x);
        g.elements()?
            .iter()
            .find(|h| h.apply(base) == x)
            .cloned()
            .ok_or_else(|| Error::InconsistentPortrait(format!("no section element for color {x}")))
    }

    /// Canonical group element mapping `x` to `y`, composing sections.
    /// Defined exactly when `x` and `y` lie in the same orbit.
    fn resolve(&self, i: TypeIndex, x: u16, y: u16) -> Result<Perm> {
        if self.group(i).orbit_of(x) != self.group(i).orbit_of(y) {
            return Err(Error::InconsistentPortrait(format!(
                "colors {x} and {y} lie in different orbits of the local group"
            )));
        }
        if x == y {
            return Ok(Perm::identity(self.group(i).degree()));
        }
        Ok(self.section(i, y)?.compose(&self.section(i, x)?.inverse()))
    }

    pub fn validate_against(&self, facute: &LocalData, b: &Building) -> Result<LocalDataReport> {
        let q: Vec<u16> = b.diagram().types().map(|i| b.params().q(i)).collect();
        crate::permgrp::validate_local_data(&self.groups, &facute.groups, &q)
    }
}

/// An automorphism represented by its local actions: the image of the base
/// chamber, one default permutation per type, and a finite set of tree-walls
/// carrying explicit actions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Portrait {
    base_image: Chamber,
    defaults: Vec<Perm>,
    assignments: BTreeMap<TreeWall, Perm>,
}

impl Portrait {
    pub fn new(
        b: &Building,
        base_image: Chamber,
        defaults: Vec<Perm>,
        assignments: BTreeMap<TreeWall, Perm>,
    ) -> Result<Portrait> {
        if defaults.len() != b.diagram().rank() {
            return Err(Error::DegreeMismatch {
                expected: b.diagram().rank(),
                got: defaults.len(),
                context: "one default permutation per type".into(),
            });
        }
        for (i, d) in defaults.iter().enumerate() {
            let q = b.params().q(TypeIndex(i as u8)) as usize;
            if d.degree() != q {
                return Err(Error::DegreeMismatch {
                    expected: q,
                    got: d.degree(),
                    context: format!("default at type `{}`", b.diagram().label(TypeIndex(i as u8))),
                });
            }
        }
        for (t, p) in &assignments {
            if p.degree() != b.params().q(t.ty) as usize {
                return Err(Error::DegreeMismatch {
                    expected: b.params().q(t.ty) as usize,
                    got: p.degree(),
                    context: format!("assignment at tree-wall {t:?}"),
                });
            }
        }
        Ok(Portrait {
            base_image,
            defaults,
            assignments,
        })
    }

    pub fn identity(b: &Building) -> Portrait {
        Portrait {
            base_image: b.base(),
            defaults: b
                .diagram()
                .types()
                .map(|i| Perm::identity(b.params().q(i) as usize))
                .collect(),
            assignments: BTreeMap::new(),
        }
    }

    pub fn base_image(&self) -> &Chamber {
        &self.base_image
    }

    pub fn defaults(&self) -> &[Perm] {
        &self.defaults
    }

    pub fn assignments(&self) -> &BTreeMap<TreeWall, Perm> {
        &self.assignments
    }

    /// The action used when crossing a panel of tree-wall `t`, given the
    /// approach pair: `nu` is the color of the gate-side chamber, `mu` the
    /// color of its image. An assignment must match the pair exactly; the
    /// default is corrected within `F` otherwise.
    fn resolve_sigma(
        &self,
        f: &LocalData,
        t: &TreeWall,
        nu: u16,
        mu: u16,
    ) -> Result<Perm> {
        if let Some(sigma) = self.assignments.get(t) {
            if sigma.apply(nu) != mu {
                return Err(Error::InconsistentPortrait(format!(
                    "assignment at {t:?} maps approach color {nu} to {}, expected {mu}",
                    sigma.apply(nu)
                )));
            }
            return Ok(sigma.clone());
        }
        filler_sigma(f, &self.defaults[t.ty.index()], t.ty, nu, mu)
    }

    /// Evaluates the portrait along an explicit letter sequence starting
    /// from an anchored (source, image) pair.
    fn walk_letters(
        &self,
        b: &Building,
        f: &LocalData,
        anchor_src: &Chamber,
        anchor_img: &Chamber,
        letters: &[Letter],
    ) -> Result<Chamber> {
        let mut src = anchor_src.clone();
        let mut img = anchor_img.clone();
        for &l in letters {
            let t = b.tree_wall_of(&b.panel(&src, l.ty))?;
            let nu = b.lambda_i(&src, l.ty);
            let mu = b.lambda_i(&img, l.ty);
            let sigma = self.resolve_sigma(f, &t, nu, mu)?;
            let next_src = b.step(&src, l.ty, l.color);
            let color = sigma.apply(b.lambda_i(&next_src, l.ty));
            img = b.panel_chamber_with_color(&b.panel(&img, l.ty), color)?;
            src = next_src;
        }
        Ok(img)
    }

    fn walk_pair(
        &self,
        b: &Building,
        f: &LocalData,
        anchor_src: &Chamber,
        anchor_img: &Chamber,
        target: &Chamber,
    ) -> Result<Chamber> {
        let w = b.diff(anchor_src, target);
        self.walk_letters(b, f, anchor_src, anchor_img, w.letters())
    }

    /// The image of a chamber.
    pub fn apply(&self, b: &Building, f: &LocalData, c: &Chamber) -> Result<Chamber> {
        self.walk_pair(b, f, &b.base(), &self.base_image, c)
    }

    /// The preimage of a chamber, by walking the image side.
    pub fn apply_inverse(&self, b: &Building, f: &LocalData, c: &Chamber) -> Result<Chamber> {
        let w = b.diff(&self.base_image, c);
        let mut src = b.base();
        let mut img = self.base_image.clone();
        for &l in w.letters() {
            let t = b.tree_wall_of(&b.panel(&src, l.ty))?;
            let nu = b.lambda_i(&src, l.ty);
            let mu = b.lambda_i(&img, l.ty);
            let sigma = self.resolve_sigma(f, &t, nu, mu)?;
            let next_img = b.step(&img, l.ty, l.color);
            let color = sigma.inverse().apply(b.lambda_i(&next_img, l.ty));
            src = b.panel_chamber_with_color(&b.panel(&src, l.ty), color)?;
            img = next_img;
        }
        Ok(src)
    }

    /// Evaluates along every reduced expression of the chamber word and
    /// checks that all agree.
    pub fn eval_all_reduced(&self, b: &Building, f: &LocalData, c: &Chamber) -> Result<Chamber> {
        let mut result: Option<Chamber> = None;
        for expr in reduced_expressions(b, c.word().letters()) {
            let img = self.walk_letters(b, f, &b.base(), &self.base_image, &expr)?;
            match &result {
                None => result = Some(img),
                Some(r) if *r != img => {
                    return Err(Error::InconsistentPortrait(format!(
                        "reduced expressions of {c:?} evaluate to {r:?} and {img:?}"
                    )))
                }
                _ => {}
            }
        }
        Ok(result.expect("every chamber has at least one reduced expression"))
    }

    /// The local action at a panel: `λ_i ∘ g ∘ λ_i⁻¹` on its chambers.
    pub fn local_action(&self, b: &Building, f: &LocalData, p: &ResidueKey) -> Result<Perm> {
        let i = p.panel_type()?;
        let q = b.params().q(i) as usize;
        let mut images = vec![u16::MAX; q];
        for c in b.panel_chambers(p)? {
            let from = b.lambda_i(&c, i);
            let to = b.lambda_i(&self.apply(b, f, &c)?, i);
            images[from as usize] = to;
        }
        Perm::from_images(images)
            .map_err(|_| Error::InconsistentPortrait(format!("local action at {p:?} is not a bijection")))
    }

    /// The image tree-wall under this portrait.
    pub fn tree_wall_image(&self, b: &Building, f: &LocalData, t: &TreeWall) -> Result<TreeWall> {
        let img = self.apply(b, f, &t.residue.rep)?;
        Ok(TreeWall {
            ty: t.ty,
            residue: b.residue_key(&img, t.residue.types),
        })
    }

    /// Portrait of the composition `g ∘ h` (apply `h` first).
    ///
    /// Besides the supports of the factors, explicit actions are recorded at
    /// the tree-walls crossed between the base chamber and `h⁻¹(base)`:
    /// there `h` moves the gates of tree-walls off their colors, so the
    /// composite's canonical corrections would not match the true actions.
    pub fn compose(b: &Building, f: &LocalData, g: &Portrait, h: &Portrait) -> Result<Portrait> {
        let base_image = g.apply(b, f, &h.base_image)?;
        let defaults: Vec<Perm> = g
            .defaults
            .iter()
            .zip(&h.defaults)
            .map(|(dg, dh)| dg.compose(dh))
            .collect();
        let mut support: BTreeSet<TreeWall> = h.assignments.keys().cloned().collect();
        for t in g.assignments.keys() {
            let rep_pre = h.apply_inverse(b, f, &t.residue.rep)?;
            let pre = TreeWall {
                ty: t.ty,
                residue: b.residue_key(&rep_pre, t.residue.types),
            };
            support.insert(pre);
        }
        let h_inv_base = h.apply_inverse(b, f, &b.base())?;
        support.extend(crossed_walls(b, &b.base(), &h_inv_base)?);
        let mut assignments = BTreeMap::new();
        for t in support {
            let p_t = b.panel(&t.residue.rep, t.ty);
            let sigma_h = h.local_action(b, f, &p_t)?;
            let ht = h.tree_wall_image(b, f, &t)?;
            let p_ht = b.panel(&ht.residue.rep, ht.ty);
            let sigma_g = g.local_action(b, f, &p_ht)?;
            let sigma = sigma_g.compose(&sigma_h);
            // drop entries the composite would resolve to by itself
            let nu = b.lambda_i(&t.residue.rep, t.ty);
            let resolves = filler_sigma(f, &defaults[t.ty.index()], t.ty, nu, sigma.apply(nu))
                .map(|r| r == sigma)
                .unwrap_or(false);
            if !resolves {
                assignments.insert(t, sigma);
            }
        }
        Portrait::new(b, base_image, defaults, assignments)
    }

    /// Portrait of the inverse automorphism. The extra recorded tree-walls
    /// mirror those of [`Portrait::compose`]: walls crossed between the base
    /// chamber and its image have their gates moved off-color.
    pub fn inverse(&self, b: &Building, f: &LocalData) -> Result<Portrait> {
        let base_image = self.apply_inverse(b, f, &b.base())?;
        let defaults: Vec<Perm> = self.defaults.iter().map(Perm::inverse).collect();
        let mut image_walls: BTreeSet<TreeWall> = BTreeSet::new();
        for t in self.assignments.keys() {
            image_walls.insert(self.tree_wall_image(b, f, t)?);
        }
        image_walls.extend(crossed_walls(b, &b.base(), &self.base_image)?);
        let mut assignments = BTreeMap::new();
        for w in image_walls {
            let rep_pre = self.apply_inverse(b, f, &w.residue.rep)?;
            let p_pre = b.panel(&rep_pre, w.ty);
            let inv = self.local_action(b, f, &p_pre)?.inverse();
            let nu = b.lambda_i(&w.residue.rep, w.ty);
            let resolves = filler_sigma(f, &defaults[w.ty.index()], w.ty, nu, inv.apply(nu))
                .map(|r| r == inv)
                .unwrap_or(false);
            if !resolves {
                assignments.insert(w, inv);
            }
        }
        Portrait::new(b, base_image, defaults, assignments)
    }
}

/// The canonical action at a tree-wall without an explicit assignment: the
/// default when it matches the approach pair, and otherwise the default
/// corrected by the fixed orbit section of the local group.
fn filler_sigma(f: &LocalData, default: &Perm, ty: TypeIndex, nu: u16, mu: u16) -> Result<Perm> {
    if default.apply(nu) == mu {
        return Ok(default.clone());
    }
    Ok(f.resolve(ty, default.apply(nu), mu)?.compose(default))
}

/// Tree-walls of the panels crossed by the normal-form gallery between two
/// chambers.
fn crossed_walls(b: &Building, from: &Chamber, to: &Chamber) -> Result<Vec<TreeWall>> {
    let gallery = b.minimal_gallery(from, to);
    let mut out = Vec::new();
    for (p, ty) in gallery.chambers.iter().zip(&gallery.step_types) {
        out.push(b.tree_wall_of(&b.panel(p, *ty))?);
    }
    Ok(out)
}

/// All reduced expressions of a normal word, enumerated by commutation swaps.
fn reduced_expressions(b: &Building, letters: &[Letter]) -> Vec<Vec<Letter>> {
    let mut seen: BTreeSet<Vec<Letter>> = BTreeSet::new();
    let mut stack = vec![letters.to_vec()];
    seen.insert(letters.to_vec());
    while let Some(w) = stack.pop() {
        for k in 0..w.len().saturating_sub(1) {
            if b.diagram().commutes(w[k].ty, w[k + 1].ty) {
                let mut v = w.clone();
                v.swap(k, k + 1);
                if seen.insert(v.clone()) {
                    stack.push(v);
                }
            }
        }
    }
    seen.into_iter().collect()
}

/// One singular tree-wall of a portrait: an explicit action outside `F_i`.
#[derive(Clone, Debug)]
pub struct SingularTreeWall {
    pub tree_wall: TreeWall,
    pub action: Perm,
    /// Number of panels in the parallel class; `None` for rung types,
    /// whose classes are unbounded.
    pub panel_count: Option<u64>,
    pub in_young: bool,
}

/// Singularity accounting for a portrait.
#[derive(Clone, Debug)]
pub struct SingularityReport {
    pub singular_tree_walls: Vec<SingularTreeWall>,
    /// No singular tree-wall has rung type.
    pub finite: bool,
    /// Every singular action lies in the Young overgroup of its local group.
    pub young_ok: bool,
}

/// Membership of a portrait in `U(F)`, `U(F́)` and `G(F,F́)`.
#[derive(Clone, Debug)]
pub struct MembershipReport {
    pub in_u_f: bool,
    pub in_u_facute: bool,
    pub in_g_f_facute: bool,
    pub report: SingularityReport,
}

/// Classifies a portrait against a pair of local data collections.
pub fn classify_membership(
    b: &Building,
    g: &Portrait,
    f: &LocalData,
    facute: &LocalData,
) -> Result<MembershipReport> {
    let rungs = b.diagram().rung_types();
    let mut defaults_in_f = true;
    let mut defaults_in_facute = true;
    for (i, d) in g.defaults().iter().enumerate() {
        let ty = TypeIndex(i as u8);
        if !f.group(ty).contains(d)? {
            defaults_in_f = false;
        }
        if !facute.group(ty).contains(d)? {
            defaults_in_facute = false;
        }
    }
    let mut assignments_in_f = true;
    let mut assignments_in_facute = true;
    let mut singular = Vec::new();
    for (t, sigma) in g.assignments() {
        let in_f = f.group(t.ty).contains(sigma)?;
        if !facute.group(t.ty).contains(sigma)? {
            assignments_in_facute = false;
        }
        if !in_f {
            assignments_in_f = false;
            let panel_count = if rungs.contains(t.ty) {
                None
            } else {
                let perp = b.diagram().perp(TypeSet::singleton(t.ty));
                Some(
                    perp.iter()
                        .map(|j| b.params().q(j) as u64)
                        .product::<u64>(),
                )
            };
            let mut blocks_ok = true;
            let grp = f.group(t.ty);
            for x in 0..grp.degree() as u16 {
                if grp.orbit_of(sigma.apply(x)) != grp.orbit_of(x) {
                    blocks_ok = false;
                }
            }
            singular.push(SingularTreeWall {
                tree_wall: t.clone(),
                action: sigma.clone(),
                panel_count,
                in_young: blocks_ok,
            });
        }
    }
    let finite = singular.iter().all(|s| s.panel_count.is_some());
    let young_ok = singular.iter().all(|s| s.in_young);
    Ok(MembershipReport {
        in_u_f: defaults_in_f && assignments_in_f,
        in_u_facute: defaults_in_facute && assignments_in_facute,
        in_g_f_facute: defaults_in_f && assignments_in_facute && finite,
        report: SingularityReport {
            singular_tree_walls: singular,
            finite,
            young_ok,
        },
    })
}

/// Whether two same-type residues are harmonious with respect to `F`: for
/// every type outside their type set, their colors lie in a common orbit.
pub fn harmonious(b: &Building, f: &LocalData, r1: &ResidueKey, r2: &ResidueKey) -> Result<bool> {
    if r1.types != r2.types {
        return Err(Error::TypeMismatch);
    }
    for k in b.diagram().types() {
        if r1.types.contains(k) {
            continue;
        }
        let g = f.group(k);
        if g.orbit_of(b.lambda_i(&r1.rep, k)) != g.orbit_of(b.lambda_i(&r2.rep, k)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Census of harmonious classes of non-rung panels.
#[derive(Clone, Debug)]
pub struct OrbitCensus {
    pub count: u64,
    pub representatives: Vec<ResidueKey>,
}

/// One panel per harmonious class of non-rung type, built at the canonical
/// chamber realizing each orbit-representative color tuple. The count is
/// `Σ_i ∏_{j≠i} m_j` over non-rung types `i`, with `m_j` the orbit count of
/// `F_j`.
pub fn orbit_census(b: &Building, f: &LocalData) -> Result<OrbitCensus> {
    let rungs = b.diagram().rung_types();
    let mut count: u64 = 0;
    let mut representatives = Vec::new();
    for i in b.diagram().types() {
        if rungs.contains(i) {
            continue;
        }
        let others: Vec<TypeIndex> = b.diagram().types().filter(|&j| j != i).collect();
        let mut formula: u64 = 1;
        for &j in &others {
            formula *= f.group(j).orbit_count() as u64;
        }
        count += formula;
        // cartesian product of orbit minima over the other types
        let orbit_reps: Vec<Vec<u16>> = others
            .iter()
            .map(|&j| f.group(j).orbits().iter().map(|o| o[0]).collect())
            .collect();
        let mut tuples: Vec<Vec<u16>> = vec![vec![]];
        for reps in &orbit_reps {
            let mut next = Vec::new();
            for t in &tuples {
                for &r in reps {
                    let mut t2 = t.clone();
                    t2.push(r);
                    next.push(t2);
                }
            }
            tuples = next;
        }
        for t in tuples {
            let mut colors = vec![0u16; b.diagram().rank()];
            for (&j, &c) in others.iter().zip(&t) {
                colors[j.index()] = c;
            }
            let chamber = b.chamber_with_colors(&colors)?;
            representatives.push(b.panel(&chamber, i));
        }
    }
    debug_assert_eq!(count as usize, representatives.len());
    Ok(OrbitCensus {
        count,
        representatives,
    })
}

/// An automorphism stabilizing panel `p` with local action `f_perm` on its
/// whole parallel class and canonical `F`-actions elsewhere.
pub fn kp_element(
    b: &Building,
    f: &LocalData,
    p: &ResidueKey,
    f_perm: &Perm,
) -> Result<Portrait> {
    let i = p.panel_type()?;
    if f_perm.degree() != b.params().q(i) as usize {
        return Err(Error::DegreeMismatch {
            expected: b.params().q(i) as usize,
            got: f_perm.degree(),
            context: "kp permutation degree".into(),
        });
    }
    let t = b.tree_wall_of(p)?;
    let mut assignments = BTreeMap::new();
    let defaults: Vec<Perm> = b
        .diagram()
        .types()
        .map(|j| Perm::identity(b.params().q(j) as usize))
        .collect();
    if !f_perm.is_identity() {
        assignments.insert(t.clone(), f_perm.clone());
    }
    // anchor the walk at the gate of the tree-wall residue: its image is
    // forced by the assignment, and the base image follows by evaluation
    let g0 = b.project_residue(&b.base(), &t.residue);
    let g0_img = b.panel_chamber_with_color(&b.panel(&g0, i), f_perm.apply(b.lambda_i(&g0, i)))?;
    let portrait = Portrait {
        base_image: b.base(),
        defaults,
        assignments,
    };
    let base_image = portrait.walk_pair(b, f, &g0, &g0_img, &b.base())?;
    Portrait::new(b, base_image, portrait.defaults, portrait.assignments)
}

/// Extends a partial automorphism of a panel-closed set to a portrait whose
/// local actions lie in `F` away from the panels parallel to the set.
///
/// Tree-walls with a full panel inside the set get the forced permutation
/// read from the partial map; tree-walls merely meeting the set get the
/// first element of `F_i` consistent with all collected color constraints;
/// untouched tree-walls act canonically within `F`. The `depth` parameter
/// bounds the self-check of that guarantee around the set.
pub fn extend_partial(
    b: &Building,
    set: &PanelClosedSet,
    partial: &BTreeMap<Chamber, Chamber>,
    f: &LocalData,
    depth: usize,
) -> Result<Portrait> {
    for c in set.chambers() {
        if !partial.contains_key(c) {
            return Err(Error::PreconditionViolated(format!(
                "partial map is undefined at {c:?}"
            )));
        }
    }
    // distance- and adjacency-type-preservation
    for c in set.chambers() {
        for e in set.chambers() {
            let d1 = b.dist(c, e);
            let d2 = b.dist(&partial[c], &partial[e]);
            if d1 != d2 {
                return Err(Error::NotDistancePreserving(format!(
                    "dist({c:?},{e:?}) = {d1} but images are at distance {d2}"
                )));
            }
            if d1 == 1 && b.adjacency(c, e) != b.adjacency(&partial[c], &partial[e]) {
                return Err(Error::NotDistancePreserving(format!(
                    "adjacency type of ({c:?},{e:?}) is not preserved"
                )));
            }
        }
    }
    // harmoniousness of each source-image pair
    for c in set.chambers() {
        let img = &partial[c];
        for k in b.diagram().types() {
            let g = f.group(k);
            if g.orbit_of(b.lambda_i(c, k)) != g.orbit_of(b.lambda_i(img, k)) {
                return Err(Error::NotHarmonious(
                    format!("{c:?}"),
                    format!("{img:?}"),
                    b.diagram().label(k).to_owned(),
                ));
            }
        }
    }
    // collect per-tree-wall color constraints and detect forced walls
    let mut constraints: BTreeMap<TreeWall, Vec<(u16, u16)>> = BTreeMap::new();
    let mut forced: BTreeSet<TreeWall> = BTreeSet::new();
    for c in set.chambers() {
        for i in b.diagram().types() {
            let panel = b.panel(c, i);
            let t = b.tree_wall_of(&panel)?;
            constraints
                .entry(t.clone())
                .or_default()
                .push((b.lambda_i(c, i), b.lambda_i(&partial[c], i)));
            let inside = b
                .panel_chambers(&panel)?
                .iter()
                .all(|x| set.contains(x));
            if inside {
                forced.insert(t);
            }
        }
    }
    // anchor the construction at the gate of the base in the set, and fix
    // the walls in order of increasing gate distance from the anchor: each
    // wall's approach pair then only depends on walls already fixed
    let (c0, _) = b.project_panel_closed(set, &b.base())?;
    let mut ordered: Vec<(usize, TreeWall)> = constraints
        .keys()
        .map(|t| {
            let gate = b.project_residue(&c0, &t.residue);
            (b.dist(&c0, &gate), t.clone())
        })
        .collect();
    ordered.sort();
    let defaults: Vec<Perm> = b
        .diagram()
        .types()
        .map(|j| Perm::identity(b.params().q(j) as usize))
        .collect();
    let mut draft = Portrait {
        base_image: b.base(),
        defaults,
        assignments: BTreeMap::new(),
    };
    for (_, t) in ordered {
        let pairs = &constraints[&t];
        let gate = b.project_residue(&c0, &t.residue);
        let nu = b.lambda_i(&gate, t.ty);
        let mu = b.lambda_i(&draft.walk_pair(b, f, &c0, &partial[&c0], &gate)?, t.ty);
        let q = b.params().q(t.ty) as usize;
        let sigma = if forced.contains(&t) {
            let mut images = vec![u16::MAX; q];
            for &(from, to) in pairs {
                if images[from as usize] != u16::MAX && images[from as usize] != to {
                    return Err(Error::InconsistentLocalActions(format!("{t:?}")));
                }
                images[from as usize] = to;
            }
            if images.contains(&u16::MAX) {
                return Err(Error::InconsistentLocalActions(format!(
                    "{t:?} is forced but its color constraints are incomplete"
                )));
            }
            let sigma = Perm::from_images(images)
                .map_err(|_| Error::InconsistentLocalActions(format!("{t:?}")))?;
            if sigma.apply(nu) != mu {
                return Err(Error::InconsistentLocalActions(format!(
                    "{t:?} is forced to an action violating its approach pair"
                )));
            }
            sigma
        } else {
            f.group(t.ty)
                .elements()?
                .iter()
                .find(|h| h.apply(nu) == mu && pairs.iter().all(|&(from, to)| h.apply(from) == to))
                .cloned()
                .ok_or_else(|| Error::NoValidLocalAction(b.diagram().label(t.ty).to_owned()))?
        };
        let resolves = filler_sigma(f, &draft.defaults[t.ty.index()], t.ty, nu, mu)
            .map(|r| r == sigma)
            .unwrap_or(false);
        if !resolves {
            draft.assignments.insert(t, sigma);
        }
    }
    let base_image = draft.walk_pair(b, f, &c0, &partial[&c0], &b.base())?;
    let portrait = Portrait::new(b, base_image, draft.defaults, draft.assignments)?;
    // the extension must reproduce the partial map
    for c in set.chambers() {
        let img = portrait.apply(b, f, c)?;
        if img != partial[c] {
            return Err(Error::InconsistentPortrait(format!(
                "extension maps {c:?} to {img:?}, partial map expects {:?}",
                partial[c]
            )));
        }
    }
    // within the requested depth, every panel is parallel to a panel in the
    // set or acts by an element of F
    if depth > 0 {
        let ball = b.ball_around(set.chambers(), depth, 2_000_000)?;
        let mut seen: BTreeSet<ResidueKey> = BTreeSet::new();
        for c in ball.chambers() {
            for i in b.diagram().types() {
                let panel = b.panel(c, i);
                if !seen.insert(panel.clone()) {
                    continue;
                }
                let t = b.tree_wall_of(&panel)?;
                if forced.contains(&t) {
                    continue;
                }
                let sigma = portrait.local_action(b, f, &panel)?;
                if !f.group(i).contains(&sigma)? {
                    return Err(Error::InconsistentPortrait(format!(
                        "extension acts outside F at {panel:?}"
                    )));
                }
            }
        }
    }
    Ok(portrait)
}

/// An automorphism acting as a given portrait on one wing of a panel and as
/// the identity elsewhere.
#[derive(Clone, Debug)]
pub struct PiecewiseAutomorphism {
    pub inner: Portrait,
    pub panel: ResidueKey,
    pub wing_chamber: Chamber,
}

impl PiecewiseAutomorphism {
    pub fn apply(&self, b: &Building, f: &LocalData, c: &Chamber) -> Result<Chamber> {
        let i = self.panel.panel_type()?;
        if b.in_wing(c, &self.wing_chamber, TypeSet::singleton(i)) {
            self.inner.apply(b, f, c)
        } else {
            Ok(c.clone())
        }
    }

    /// Membership report of the piecewise automorphism: singularities of the
    /// inner portrait restricted to tree-walls rooted inside the wing.
    pub fn classify(
        &self,
        b: &Building,
        f: &LocalData,
        facute: &LocalData,
    ) -> Result<MembershipReport> {
        let i = self.panel.panel_type()?;
        let wing = TypeSet::singleton(i);
        let inner = classify_membership(b, &self.inner, f, facute)?;
        let singular: Vec<SingularTreeWall> = inner
            .report
            .singular_tree_walls
            .into_iter()
            .filter(|s| b.in_wing(&s.tree_wall.residue.rep, &self.wing_chamber, wing))
            .collect();
        let finite = singular.iter().all(|s| s.panel_count.is_some());
        let young_ok = singular.iter().all(|s| s.in_young);
        Ok(MembershipReport {
            in_u_f: inner.in_u_f || singular.is_empty(),
            in_u_facute: inner.in_u_facute,
            in_g_f_facute: inner.in_g_f_facute,
            report: SingularityReport {
                singular_tree_walls: singular,
                finite,
                young_ok,
            },
        })
    }
}

/// Restricts a portrait fixing the tree-wall of `p` pointwise to the wing
/// of one chamber `c ∈ p`. The fixing precondition is validated inside the
/// tree-wall up to `radius` (exactly, when the tree-wall is finite).
pub fn wing_restrict(
    b: &Building,
    f: &LocalData,
    g: &Portrait,
    p: &ResidueKey,
    c: &Chamber,
    radius: usize,
) -> Result<PiecewiseAutomorphism> {
    let i = p.panel_type()?;
    let t = b.tree_wall_of(p)?;
    let chambers: Vec<Chamber> = if b.diagram().rung_types().contains(i) {
        // unbounded class: validate inside the residue up to the radius
        residue_ball(b, &t.residue, radius)
    } else {
        b.tree_wall_chambers(&t)?
    };
    for x in &chambers {
        if g.apply(b, f, x)? != *x {
            return Err(Error::TreeWallNotFixed);
        }
    }
    if b.project_residue(c, p) != *c {
        return Err(Error::PreconditionViolated(format!(
            "{c:?} is not a chamber of the panel"
        )));
    }
    Ok(PiecewiseAutomorphism {
        inner: g.clone(),
        panel: p.clone(),
        wing_chamber: c.clone(),
    })
}

/// Chambers of a residue within a bounded gallery radius of its
/// representative, staying inside the residue.
fn residue_ball(b: &Building, r: &ResidueKey, radius: usize) -> Vec<Chamber> {
    let mut seen: BTreeSet<Chamber> = BTreeSet::new();
    let mut frontier = vec![r.rep.clone()];
    seen.insert(r.rep.clone());
    for _ in 0..radius {
        let mut next = Vec::new();
        for c in frontier {
            for i in r.types.iter() {
                for color in 1..b.params().q(i) {
                    let n = b.step(&c, i, color);
                    if seen.insert(n.clone()) {
                        next.push(n);
                    }
                }
            }
        }
        frontier = next;
    }
    seen.into_iter().collect()
}
