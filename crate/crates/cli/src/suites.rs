//! Seeded property suites driving the geometry and portrait machinery.
//!
//! Every suite is deterministic given its seed: each sample draws its own
//! generator from the seed and the sample index, so results are independent
//! of sharding or execution order. A nonempty violation list makes the CLI
//! exit with status 4 and prints the serialized counterexamples.

use std::collections::{BTreeMap, BTreeSet};

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use rab_core::building::{Ball, Building, Chamber, ResidueKey};
use rab_core::serial::chamber_name;
use rab_core::universal::{
    classify_membership, extend_partial, harmonious, kp_element, orbit_census, wing_restrict,
    LocalData, Portrait,
};
use rab_core::{Error as CoreError, Perm, TypeIndex, TypeSet, Word};

use crate::spec::{BuildingSpec, CliError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SuiteName {
    Coloring,
    Gate,
    ClosingSquares,
    Concave,
    Treewall,
    PortraitAlgebra,
    Orbits,
    Extension,
    Independence,
}

impl SuiteName {
    pub fn parse(s: &str) -> Result<SuiteName, CliError> {
        Ok(match s {
            "coloring" => SuiteName::Coloring,
            "gate" => SuiteName::Gate,
            "closing-squares" => SuiteName::ClosingSquares,
            "concave" => SuiteName::Concave,
            "treewall" => SuiteName::Treewall,
            "portrait-algebra" => SuiteName::PortraitAlgebra,
            "orbits" => SuiteName::Orbits,
            "extension" => SuiteName::Extension,
            "independence" => SuiteName::Independence,
            other => return Err(CliError::Schema(format!("unknown suite `{other}`"))),
        })
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            SuiteName::Coloring => "coloring",
            SuiteName::Gate => "gate",
            SuiteName::ClosingSquares => "closing-squares",
            SuiteName::Concave => "concave",
            SuiteName::Treewall => "treewall",
            SuiteName::PortraitAlgebra => "portrait-algebra",
            SuiteName::Orbits => "orbits",
            SuiteName::Extension => "extension",
            SuiteName::Independence => "independence",
        }
    }

    pub fn all() -> &'static [SuiteName] {
        &[
            SuiteName::Coloring,
            SuiteName::Gate,
            SuiteName::ClosingSquares,
            SuiteName::Concave,
            SuiteName::Treewall,
            SuiteName::PortraitAlgebra,
            SuiteName::Orbits,
            SuiteName::Extension,
            SuiteName::Independence,
        ]
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SuiteConfig {
    pub radius: usize,
    pub samples: usize,
    pub seed: u64,
    /// Test hook: inject an inconsistent portrait and expect the suite to
    /// catch it.
    pub corrupt: bool,
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub suite: String,
    pub samples: usize,
    pub checks: u64,
    pub violations: Vec<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

const BALL_LIMIT: usize = 400_000;

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

fn sample_rng(seed: u64, sample: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix(seed ^ splitmix(sample)))
}

fn random_chamber(b: &Building, rng: &mut ChaCha8Rng, radius: usize) -> Chamber {
    let len = rng.gen_range(0..=radius);
    let mut letters = Vec::with_capacity(len);
    for _ in 0..len {
        let ty = TypeIndex(rng.gen_range(0..b.diagram().rank()) as u8);
        let color = rng.gen_range(1..b.params().q(ty));
        letters.push(rab_core::Letter::new(ty, color));
    }
    b.chamber(Word::from_letters(b.diagram(), b.params(), &letters).expect("letters in range"))
}

fn random_type(b: &Building, rng: &mut ChaCha8Rng) -> TypeIndex {
    TypeIndex(rng.gen_range(0..b.diagram().rank()) as u8)
}

/// A random valid portrait: identity defaults, a random harmonious base
/// image, and assignments drawn from the given groups at tree-walls sorted
/// by gate distance, each respecting the approach pair it must satisfy.
fn random_portrait(
    b: &Building,
    f: &LocalData,
    draw_from: &LocalData,
    rng: &mut ChaCha8Rng,
    radius: usize,
    walls: usize,
) -> Result<Portrait, CoreError> {
    // base image: per type, a random color in the orbit of 0
    let mut colors = Vec::new();
    for i in b.diagram().types() {
        let orbits = f.group(i).orbits();
        let zero_orbit = orbits
            .iter()
            .find(|o| o.contains(&0))
            .expect("0 lies in some orbit");
        colors.push(*zero_orbit.choose(rng).expect("orbits are nonempty"));
    }
    let base_image = b.chamber_with_colors(&colors)?;
    let defaults: Vec<Perm> = b
        .diagram()
        .types()
        .map(|i| Perm::identity(b.params().q(i) as usize))
        .collect();
    let mut portrait = Portrait::new(b, base_image, defaults, BTreeMap::new())?;

    // candidate tree-walls near the base, closest gates first so that
    // inserting one never disturbs the approach pairs of the earlier ones
    let mut candidates = Vec::new();
    for _ in 0..walls * 3 {
        let c = random_chamber(b, rng, radius);
        let i = random_type(b, rng);
        let t = b.tree_wall_of(&b.panel(&c, i))?;
        let gate = b.project_residue(&b.base(), &t.residue);
        candidates.push((b.dist(&b.base(), &gate), t, gate));
    }
    candidates.sort();
    candidates.dedup_by(|a, b| a.1 == b.1);

    let mut placed = 0;
    for (_, t, gate) in candidates {
        if placed >= walls {
            break;
        }
        if portrait.assignments().contains_key(&t) {
            continue;
        }
        let nu = b.lambda_i(&gate, t.ty);
        let mu = b.lambda_i(&portrait.apply(b, f, &gate)?, t.ty);
        let matching: Vec<&Perm> = draw_from
            .group(t.ty)
            .elements()?
            .iter()
            .filter(|h| h.apply(nu) == mu)
            .collect();
        let sigma = (*matching.choose(rng).expect("orbit equality provides a match")).clone();
        let mut assignments = portrait.assignments().clone();
        assignments.insert(t, sigma);
        portrait = Portrait::new(
            b,
            portrait.base_image().clone(),
            portrait.defaults().to_vec(),
            assignments,
        )?;
        placed += 1;
    }
    Ok(portrait)
}

/// All panels meeting a ball, deduplicated.
fn panels_in_ball(b: &Building, ball: &Ball) -> Vec<ResidueKey> {
    let mut seen = BTreeSet::new();
    for c in ball.chambers() {
        for i in b.diagram().types() {
            seen.insert(b.panel(c, i));
        }
    }
    seen.into_iter().collect()
}

pub fn run_suite(
    spec: &BuildingSpec,
    name: SuiteName,
    cfg: SuiteConfig,
) -> Result<SuiteReport, CliError> {
    let mut report = SuiteReport {
        suite: name.as_str().to_owned(),
        samples: cfg.samples,
        checks: 0,
        violations: Vec::new(),
    };
    match name {
        SuiteName::Coloring => coloring_suite(spec, cfg, &mut report)?,
        SuiteName::Gate => gate_suite(spec, cfg, &mut report)?,
        SuiteName::ClosingSquares => closing_squares_suite(spec, cfg, &mut report)?,
        SuiteName::Concave => concave_suite(spec, cfg, &mut report)?,
        SuiteName::Treewall => treewall_suite(spec, cfg, &mut report)?,
        SuiteName::PortraitAlgebra => portrait_algebra_suite(spec, cfg, &mut report)?,
        SuiteName::Orbits => orbits_suite(spec, cfg, &mut report)?,
        SuiteName::Extension => extension_suite(spec, cfg, &mut report)?,
        SuiteName::Independence => independence_suite(spec, cfg, &mut report)?,
    }
    Ok(report)
}

fn coloring_suite(
    spec: &BuildingSpec,
    cfg: SuiteConfig,
    report: &mut SuiteReport,
) -> Result<(), CliError> {
    let b = &spec.building;
    for k in 0..cfg.samples as u64 {
        let mut rng = sample_rng(cfg.seed, k);
        let center = random_chamber(b, &mut rng, cfg.radius);
        let ball = b.ball(&center, 2.min(cfg.radius), BALL_LIMIT).map_err(CliError::from)?;
        for p in panels_in_ball(b, &ball) {
            let i = p.panel_type().map_err(CliError::from)?;
            let chambers = b.panel_chambers(&p).map_err(CliError::from)?;
            let colors: BTreeSet<u16> = chambers.iter().map(|c| b.lambda_i(c, i)).collect();
            report.checks += 1;
            if colors.len() != b.params().q(i) as usize {
                report.violations.push(format!(
                    "λ_{} not bijective on panel of {}",
                    b.diagram().label(i),
                    chamber_name(b, &p.rep)
                ));
            }
            for j in b.diagram().types().filter(|&j| j != i) {
                let other: BTreeSet<u16> = chambers.iter().map(|c| b.lambda_i(c, j)).collect();
                report.checks += 1;
                if other.len() != 1 {
                    report.violations.push(format!(
                        "λ_{} not constant on panel of {}",
                        b.diagram().label(j),
                        chamber_name(b, &p.rep)
                    ));
                }
            }
        }
        // λ_k constant on J-residues for k ∉ J
        let mask: u64 = rng.gen();
        let j_set: TypeSet = b.diagram().types().filter(|t| mask >> t.0 & 1 == 1).collect();
        let r = b.residue_key(&center, j_set);
        let members: Vec<&Chamber> = ball
            .chambers()
            .iter()
            .filter(|c| b.residue_key(c, j_set) == r)
            .collect();
        for kk in b.diagram().types().filter(|t| !j_set.contains(*t)) {
            let vals: BTreeSet<u16> = members.iter().map(|c| b.lambda_i(c, kk)).collect();
            report.checks += 1;
            if vals.len() > 1 {
                report.violations.push(format!(
                    "λ_{} not constant on the {:?}-residue of {}",
                    b.diagram().label(kk),
                    j_set,
                    chamber_name(b, &center)
                ));
            }
        }
    }
    Ok(())
}

/// A small random panel-closed set: a singleton, a full panel, or the
/// closure of two nearby chambers.
fn random_panel_closed(
    b: &Building,
    rng: &mut ChaCha8Rng,
    radius: usize,
) -> Result<rab_core::PanelClosedSet, CoreError> {
    let c = random_chamber(b, rng, radius);
    match rng.gen_range(0..3) {
        0 => b.panel_closed_set(vec![c]),
        1 => {
            let i = TypeIndex(rng.gen_range(0..b.diagram().rank()) as u8);
            b.panel_closed_set(b.panel_chambers(&b.panel(&c, i))?)
        }
        _ => {
            let mut rng2 = rng.clone();
            let e = random_chamber(b, &mut rng2, 2);
            let e = b.mul(&c, e.word());
            match b.panel_closed_closure(&[c.clone(), e], 4) {
                Ok(set) => Ok(set),
                Err(CoreError::EscapesBound(_)) => b.panel_closed_set(vec![c]),
                Err(e) => Err(e),
            }
        }
    }
}

fn gate_suite(
    spec: &BuildingSpec,
    cfg: SuiteConfig,
    report: &mut SuiteReport,
) -> Result<(), CliError> {
    let b = &spec.building;
    for k in 0..cfg.samples as u64 {
        let mut rng = sample_rng(cfg.seed, k);
        let set = random_panel_closed(b, &mut rng, cfg.radius).map_err(CliError::from)?;
        let c = random_chamber(b, &mut rng, cfg.radius);
        // oracle ball around the set and the chamber
        let mut seeds: Vec<Chamber> = set.chambers().to_vec();
        seeds.push(c.clone());
        let ball = b
            .ball_around(&seeds, cfg.radius + 2, BALL_LIMIT)
            .map_err(CliError::from)?;
        let oracle = bfs_distances(b, &ball, &c);
        let (proj, dist) = b.project_panel_closed(&set, &c).map_err(CliError::from)?;
        let best = set
            .chambers()
            .iter()
            .filter_map(|x| oracle.get(x))
            .min()
            .copied();
        report.checks += 1;
        if best != Some(dist) {
            report.violations.push(format!(
                "projection distance mismatch at {} (algebraic {dist}, bfs {best:?})",
                chamber_name(b, &c)
            ));
            continue;
        }
        let argmin: Vec<&Chamber> = set
            .chambers()
            .iter()
            .filter(|x| oracle.get(*x) == Some(&dist))
            .collect();
        report.checks += 1;
        if argmin.len() != 1 || argmin[0] != &proj {
            report.violations.push(format!(
                "projection not the unique argmin at {}",
                chamber_name(b, &c)
            ));
        }
        // gate property against every member
        for e in set.chambers() {
            report.checks += 1;
            if b.dist(&c, &proj) + b.dist(&proj, e) != b.dist(&c, e) {
                report.violations.push(format!(
                    "gate property fails: {} → {} via {}",
                    chamber_name(b, &c),
                    chamber_name(b, e),
                    chamber_name(b, &proj)
                ));
            }
        }
        // residue projection oracle
        let i = random_type(b, &mut rng);
        let r = b.panel(&random_chamber(b, &mut rng, cfg.radius), i);
        let proj_r = b.project_residue(&c, &r);
        let members = b.panel_chambers(&r).map_err(CliError::from)?;
        let best = members.iter().map(|m| b.dist(&c, m)).min().unwrap();
        let argmin: Vec<&Chamber> = members.iter().filter(|m| b.dist(&c, m) == best).collect();
        report.checks += 1;
        if argmin.len() != 1 || argmin[0] != &proj_r {
            report.violations.push(format!(
                "residue projection is not the unique argmin at {}",
                chamber_name(b, &c)
            ));
        }
    }
    Ok(())
}

fn bfs_distances(
    b: &Building,
    ball: &Ball,
    from: &Chamber,
) -> std::collections::HashMap<Chamber, usize> {
    let mut dist = std::collections::HashMap::new();
    dist.insert(from.clone(), 0usize);
    let mut queue = std::collections::VecDeque::from([from.clone()]);
    while let Some(c) = queue.pop_front() {
        let d = dist[&c];
        for (_, n) in b.neighbors(&c) {
            if ball.contains(&n) && !dist.contains_key(&n) {
                dist.insert(n.clone(), d + 1);
                queue.push_back(n);
            }
        }
    }
    dist
}

fn closing_squares_suite(
    spec: &BuildingSpec,
    cfg: SuiteConfig,
    report: &mut SuiteReport,
) -> Result<(), CliError> {
    let b = &spec.building;
    for k in 0..cfg.samples as u64 {
        let mut rng = sample_rng(cfg.seed, k);
        // alternate chamber-centered and panel-closed variants
        let set = if k % 2 == 0 {
            b.panel_closed_set(vec![random_chamber(b, &mut rng, 2)])
                .map_err(CliError::from)?
        } else {
            random_panel_closed(b, &mut rng, 2).map_err(CliError::from)?
        };
        let ball = b
            .ball_around(set.chambers(), cfg.radius, BALL_LIMIT)
            .map_err(CliError::from)?;
        for c2 in ball.chambers() {
            let d2 = b.dist_to_set(&set, c2);
            let nbrs = b.neighbors(c2);
            for (i, c1) in &nbrs {
                for (j, c3) in &nbrs {
                    if i >= j || c1 == c3 {
                        continue;
                    }
                    let (d1, d3) = (b.dist_to_set(&set, c1), b.dist_to_set(&set, c3));
                    let (variant, expected) = if d1 == d3 && d2 == d1 + 1 && d1 >= 1 {
                        (1u8, d1 - 1)
                    } else if d1 == d2 && d3 + 1 == d1 {
                        (2u8, d3)
                    } else if d3 == d2 && d1 + 1 == d3 {
                        // mirrored variant 2
                        match b.closing_square(&set, c3, c2, c1, 2) {
                            Ok(sq) if b.dist_to_set(&set, &sq.d) == d1 => {
                                report.checks += 1;
                                continue;
                            }
                            Ok(_) | Err(_) => {
                                report.violations.push(format!(
                                    "mirrored closing square failed at {}",
                                    chamber_name(b, c2)
                                ));
                                continue;
                            }
                        }
                    } else {
                        continue;
                    };
                    report.checks += 1;
                    match b.closing_square(&set, c1, c2, c3, variant) {
                        Ok(sq) => {
                            if b.dist_to_set(&set, &sq.d) != expected {
                                report.violations.push(format!(
                                    "square at {} closed at wrong distance",
                                    chamber_name(b, c2)
                                ));
                            }
                        }
                        Err(e) => report.violations.push(format!(
                            "closing square error at {}: {e}",
                            chamber_name(b, c2)
                        )),
                    }
                }
            }
        }
    }
    Ok(())
}

fn concave_suite(
    spec: &BuildingSpec,
    cfg: SuiteConfig,
    report: &mut SuiteReport,
) -> Result<(), CliError> {
    let b = &spec.building;
    for k in 0..cfg.samples as u64 {
        let mut rng = sample_rng(cfg.seed, k);
        let set = random_panel_closed(b, &mut rng, 2).map_err(CliError::from)?;
        let c1 = random_chamber(b, &mut rng, cfg.radius);
        let c2 = random_chamber(b, &mut rng, cfg.radius);
        let cg = b.concave_gallery(&c1, &c2, &set).map_err(CliError::from)?;
        report.checks += 1;
        if !b.is_minimal(&cg.gallery) {
            report.violations.push(format!(
                "concave gallery between {} and {} is not minimal",
                chamber_name(b, &c1),
                chamber_name(b, &c2)
            ));
            continue;
        }
        let dists: Vec<usize> = cg
            .gallery
            .chambers
            .iter()
            .map(|v| b.dist_to_set(&set, v))
            .collect();
        let mut ok = true;
        for m in 1..dists.len() {
            let expected = if m <= cg.j {
                dists[m - 1].wrapping_sub(1)
            } else if m <= cg.k {
                dists[m - 1]
            } else {
                dists[m - 1] + 1
            };
            if dists[m] != expected {
                ok = false;
            }
        }
        report.checks += 1;
        if !ok {
            report.violations.push(format!(
                "profile {dists:?} is not concave with phases ({}, {})",
                cg.j, cg.k
            ));
        }
        // against the exhaustive filter for short distances
        if b.dist(&c1, &c2) <= 4 {
            let all = all_minimal_galleries(b, &c1, &c2);
            let concave: Vec<&Vec<Chamber>> = all
                .iter()
                .filter(|g| is_concave_profile(&g.iter().map(|v| b.dist_to_set(&set, v)).collect::<Vec<_>>()))
                .collect();
            report.checks += 1;
            if !concave.iter().any(|g| **g == cg.gallery.chambers) {
                report.violations.push(format!(
                    "constructed gallery between {} and {} is outside the exhaustive concave set",
                    chamber_name(b, &c1),
                    chamber_name(b, &c2)
                ));
            }
        }
    }
    Ok(())
}

fn all_minimal_galleries(b: &Building, c1: &Chamber, c2: &Chamber) -> Vec<Vec<Chamber>> {
    let mut out = Vec::new();
    let mut path = vec![c1.clone()];
    fn rec(
        b: &Building,
        path: &mut Vec<Chamber>,
        c2: &Chamber,
        out: &mut Vec<Vec<Chamber>>,
    ) {
        let last = path.last().unwrap().clone();
        if &last == c2 {
            out.push(path.clone());
            return;
        }
        let d = b.dist(&last, c2);
        for (_, n) in b.neighbors(&last) {
            if b.dist(&n, c2) + 1 == d {
                path.push(n);
                rec(b, path, c2, out);
                path.pop();
            }
        }
    }
    rec(b, &mut path, c2, &mut out);
    out
}

fn is_concave_profile(dists: &[usize]) -> bool {
    let mut j = 0;
    while j + 1 < dists.len() && dists[j + 1] + 1 == dists[j] {
        j += 1;
    }
    let mut k = j;
    while k + 1 < dists.len() && dists[k + 1] == dists[k] {
        k += 1;
    }
    (k..dists.len() - 1).all(|m| dists[m + 1] == dists[m] + 1)
}

fn treewall_suite(
    spec: &BuildingSpec,
    cfg: SuiteConfig,
    report: &mut SuiteReport,
) -> Result<(), CliError> {
    let b = &spec.building;
    let rungs = b.diagram().rung_types();
    for k in 0..cfg.samples as u64 {
        let mut rng = sample_rng(cfg.seed, k);
        let center = random_chamber(b, &mut rng, 2);
        let ball = b.ball(&center, cfg.radius, BALL_LIMIT).map_err(CliError::from)?;
        for i in b.diagram().types() {
            let tree = b.tree_wall_tree(i, &ball);
            report.checks += 1;
            if !tree.is_acyclic() {
                report
                    .violations
                    .push(format!("Γ_{} has a cycle", b.diagram().label(i)));
            }
        }
        // ε-range for a few pairs in the inner half of the ball
        let inner: Vec<&Chamber> = ball
            .chambers()
            .iter()
            .filter(|c| ball.dist_to_center(c).unwrap() * 2 <= cfg.radius)
            .collect();
        for _ in 0..10 {
            if inner.is_empty() {
                break;
            }
            let c1 = *inner.choose(&mut rng).unwrap();
            let c2 = *inner.choose(&mut rng).unwrap();
            let i = random_type(b, &mut rng);
            let lhs = b.tw_distance(i, c1, c2, &ball).map_err(CliError::from)?;
            let eps = lhs as isize - 2 * b.dist_i(i, c1, c2) as isize;
            report.checks += 1;
            if !(-1..=1).contains(&eps) || lhs > b.dist(c1, c2) {
                report.violations.push(format!(
                    "tree-wall distance law fails for {} and {} at type {}",
                    chamber_name(b, c1),
                    chamber_name(b, c2),
                    b.diagram().label(i)
                ));
            }
        }
        // size formula and parallelism for a sampled tree-wall
        let c = random_chamber(b, &mut rng, cfg.radius);
        let i = random_type(b, &mut rng);
        let t = b.tree_wall_of(&b.panel(&c, i)).map_err(CliError::from)?;
        if rungs.contains(i) {
            report.checks += 1;
            if !matches!(b.tree_wall_panels(&t), Err(CoreError::InfiniteTreeWall(_))) {
                report.violations.push(format!(
                    "rung-type tree-wall at {} did not report an unbounded class",
                    chamber_name(b, &c)
                ));
            }
        } else {
            let panels = b.tree_wall_panels(&t).map_err(CliError::from)?;
            let expected: u64 = b
                .diagram()
                .perp(TypeSet::singleton(i))
                .iter()
                .map(|j| b.params().q(j) as u64)
                .product();
            report.checks += 1;
            if panels.len() as u64 != expected {
                report.violations.push(format!(
                    "tree-wall of {} has {} panels, expected {expected}",
                    chamber_name(b, &c),
                    panels.len()
                ));
            }
            // key equality agrees with the distinct-projections criterion
            for p2 in panels.iter().take(4) {
                let parallel_by_proj = distinct_projections(b, &panels[0], p2)?;
                report.checks += 1;
                if !parallel_by_proj {
                    report.violations.push(format!(
                        "panels with equal tree-wall key are not projection-parallel at {}",
                        chamber_name(b, &p2.rep)
                    ));
                }
            }
            // a panel in a different tree-wall must not be projection-parallel
            let other = b.panel(&b.step(&t.residue.rep, i, 1), i);
            let far = b
                .diagram()
                .types()
                .find(|&j| !b.diagram().commutes(i, j) && j != i);
            if let Some(j) = far {
                let moved = b.panel(&b.step(&b.step(&other.rep, j, 1), i, 1), i);
                if b.tree_wall_of(&moved).map_err(CliError::from)? != t {
                    report.checks += 1;
                    if distinct_projections(b, &b.panel(&t.residue.rep, i), &moved)? {
                        report.violations.push(format!(
                            "panels with different keys are projection-parallel at {}",
                            chamber_name(b, &moved.rep)
                        ));
                    }
                }
            }
        }
    }
    Ok(())
}

/// Parallelism criterion: two chambers of `p1` with distinct projections
/// on `p2`.
fn distinct_projections(
    b: &Building,
    p1: &ResidueKey,
    p2: &ResidueKey,
) -> Result<bool, CliError> {
    let projections: BTreeSet<Chamber> = b
        .panel_chambers(p1)
        .map_err(CliError::from)?
        .iter()
        .map(|c| b.project_residue(c, p2))
        .collect();
    Ok(projections.len() >= 2)
}

fn portrait_algebra_suite(
    spec: &BuildingSpec,
    cfg: SuiteConfig,
    report: &mut SuiteReport,
) -> Result<(), CliError> {
    let b = &spec.building;
    let f = &spec.f;
    for k in 0..cfg.samples as u64 {
        let mut rng = sample_rng(cfg.seed, k);
        let g = random_portrait(b, f, &spec.facute, &mut rng, cfg.radius, 2)
            .map_err(CliError::from)?;
        let g = if cfg.corrupt { corrupt_portrait(b, &g) } else { g };
        let h = random_portrait(b, f, &spec.facute, &mut rng, cfg.radius, 2)
            .map_err(CliError::from)?;

        let check = (|| -> Result<Vec<String>, CoreError> {
            let mut violations = Vec::new();
            let gh = Portrait::compose(b, f, &g, &h)?;
            let ginv = g.inverse(b, f)?;
            let ball = b.ball(&b.base(), cfg.radius.min(3), BALL_LIMIT)?;
            for c in ball.chambers().iter().step_by(3) {
                let lhs = gh.apply(b, f, c)?;
                let rhs = g.apply(b, f, &h.apply(b, f, c)?)?;
                if lhs != rhs {
                    violations.push(format!(
                        "compose law fails at {}: {} vs {}",
                        chamber_name(b, c),
                        chamber_name(b, &lhs),
                        chamber_name(b, &rhs)
                    ));
                }
                let round = ginv.apply(b, f, &g.apply(b, f, c)?)?;
                if round != *c {
                    violations.push(format!("inverse law fails at {}", chamber_name(b, c)));
                }
            }
            // local-action laws at sampled panels
            let mut rng2 = rng.clone();
            for _ in 0..8 {
                let c = random_chamber(b, &mut rng2, cfg.radius.min(3));
                let i = random_type(b, &mut rng2);
                let p = b.panel(&c, i);
                let sigma_h = h.local_action(b, f, &p)?;
                let hp = b.panel(&h.apply(b, f, &p.rep)?, i);
                let sigma_g_hp = g.local_action(b, f, &hp)?;
                let sigma_gh = gh.local_action(b, f, &p)?;
                if sigma_gh != sigma_g_hp.compose(&sigma_h) {
                    violations.push(format!(
                        "σ(gh,P) ≠ σ(g,hP)σ(h,P) at panel of {}",
                        chamber_name(b, &p.rep)
                    ));
                }
                let gp = b.panel(&g.apply(b, f, &p.rep)?, i);
                let sigma_g = g.local_action(b, f, &p)?;
                if g.apply(b, f, &p.rep).is_ok()
                    && sigma_g.inverse() != ginv.local_action(b, f, &gp)?
                {
                    violations.push(format!(
                        "σ(g,P)⁻¹ ≠ σ(g⁻¹,gP) at panel of {}",
                        chamber_name(b, &p.rep)
                    ));
                }
                // parallel panels receive identical local actions
                if !b.diagram().rung_types().contains(i) {
                    let t = b.tree_wall_of(&p)?;
                    for q in b.tree_wall_panels(&t)? {
                        if g.local_action(b, f, &q)? != sigma_g {
                            violations.push(format!(
                                "parallel panels of {} got different local actions",
                                chamber_name(b, &p.rep)
                            ));
                        }
                    }
                }
            }
            Ok(violations)
        })();
        report.checks += 1;
        match check {
            Ok(violations) => {
                if cfg.corrupt && violations.is_empty() {
                    report
                        .violations
                        .push("corrupted portrait was not detected".to_owned());
                }
                report.violations.extend(violations);
            }
            Err(e) => {
                if cfg.corrupt {
                    // the inconsistency is the expected counterexample
                    report.violations.push(format!("counterexample: {e}"));
                } else {
                    report.violations.push(format!("evaluation error: {e}"));
                }
            }
        }
    }
    Ok(())
}

/// Breaks one assignment so that it violates its own approach pair.
fn corrupt_portrait(b: &Building, g: &Portrait) -> Portrait {
    let mut assignments = g.assignments().clone();
    if let Some((t, sigma)) = assignments.clone().into_iter().next() {
        let q = b.params().q(t.ty);
        let gate = b.project_residue(&b.base(), &t.residue);
        let nu = b.lambda_i(&gate, t.ty);
        // send the approach color somewhere else
        let other = (sigma.apply(nu) + 1) % q;
        let swap = Perm::from_cycles(q as usize, &[&[sigma.apply(nu), other]]).unwrap();
        assignments.insert(t, swap.compose(&sigma));
    } else {
        // no assignment to corrupt: break the base image instead
        let ty = TypeIndex(0);
        let base_image = b.step(g.base_image(), ty, 1);
        return Portrait::new(b, base_image, g.defaults().to_vec(), assignments).unwrap();
    }
    Portrait::new(b, g.base_image().clone(), g.defaults().to_vec(), assignments).unwrap()
}

fn orbits_suite(
    spec: &BuildingSpec,
    cfg: SuiteConfig,
    report: &mut SuiteReport,
) -> Result<(), CliError> {
    let b = &spec.building;
    let f = &spec.f;
    for k in 0..cfg.samples as u64 {
        let mut rng = sample_rng(cfg.seed, k);
        let c = random_chamber(b, &mut rng, cfg.radius.min(3));
        let e = random_chamber(b, &mut rng, cfg.radius.min(3));
        let rc = b.residue_key(&c, TypeSet::EMPTY);
        let re = b.residue_key(&e, TypeSet::EMPTY);
        let harm = harmonious(b, f, &rc, &re).map_err(CliError::from)?;
        let set = b.panel_closed_set(vec![c.clone()]).map_err(CliError::from)?;
        let mut partial = BTreeMap::new();
        partial.insert(c.clone(), e.clone());
        let attempt = extend_partial(b, &set, &partial, f, 1);
        report.checks += 1;
        match (harm, attempt) {
            (true, Ok(g)) => {
                let img = g.apply(b, f, &c).map_err(CliError::from)?;
                if img != e {
                    report.violations.push(format!(
                        "extension does not connect {} to {}",
                        chamber_name(b, &c),
                        chamber_name(b, &e)
                    ));
                }
                let m = classify_membership(b, &g, f, &spec.facute).map_err(CliError::from)?;
                if !m.in_u_f {
                    report.violations.push(format!(
                        "connecting element for {} is outside U(F)",
                        chamber_name(b, &c)
                    ));
                }
            }
            (true, Err(err)) => report.violations.push(format!(
                "harmonious pair {} / {} not connected: {err}",
                chamber_name(b, &c),
                chamber_name(b, &e)
            )),
            (false, Err(CoreError::NotHarmonious(..))) => {
                // the orbit-color witness rejects non-harmonious pairs
            }
            (false, other) => report.violations.push(format!(
                "non-harmonious pair {} / {} was not rejected: {other:?}",
                chamber_name(b, &c),
                chamber_name(b, &e)
            )),
        }
    }
    // census against the formula and an exhaustive classification
    let census = orbit_census(b, f).map_err(CliError::from)?;
    let rungs = b.diagram().rung_types();
    let mut formula: u64 = 0;
    for i in b.diagram().types() {
        if rungs.contains(i) {
            continue;
        }
        formula += b
            .diagram()
            .types()
            .filter(|&j| j != i)
            .map(|j| f.group(j).orbit_count() as u64)
            .product::<u64>();
    }
    report.checks += 1;
    if census.count != formula || census.representatives.len() as u64 != formula {
        report
            .violations
            .push(format!("census count {} differs from formula {formula}", census.count));
    }
    let class_radius = cfg.radius.max(b.diagram().rank());
    let ball = b
        .ball(&b.base(), class_radius, BALL_LIMIT)
        .map_err(CliError::from)?;
    let mut signatures: BTreeSet<(TypeIndex, Vec<u16>)> = BTreeSet::new();
    for c in ball.chambers() {
        for i in b.diagram().types() {
            if rungs.contains(i) {
                continue;
            }
            let p = b.panel(c, i);
            let sig: Vec<u16> = b
                .diagram()
                .types()
                .filter(|&j| j != i)
                .map(|j| f.group(j).orbit_of(b.lambda_i(&p.rep, j)))
                .collect();
            signatures.insert((i, sig));
        }
    }
    report.checks += 1;
    if signatures.len() as u64 != census.count {
        report.violations.push(format!(
            "exhaustive classification found {} classes, census reports {}",
            signatures.len(),
            census.count
        ));
    }
    // representatives pairwise non-harmonious
    for (a, r1) in census.representatives.iter().enumerate() {
        for r2 in census.representatives.iter().skip(a + 1) {
            if r1.types == r2.types {
                report.checks += 1;
                if harmonious(b, f, r1, r2).map_err(CliError::from)? {
                    report.violations.push(format!(
                        "census representatives {} and {} are harmonious",
                        chamber_name(b, &r1.rep),
                        chamber_name(b, &r2.rep)
                    ));
                }
            }
        }
    }
    Ok(())
}

fn extension_suite(
    spec: &BuildingSpec,
    cfg: SuiteConfig,
    report: &mut SuiteReport,
) -> Result<(), CliError> {
    let b = &spec.building;
    let f = &spec.f;
    for k in 0..cfg.samples as u64 {
        let mut rng = sample_rng(cfg.seed, k);
        let set = random_panel_closed(b, &mut rng, 2).map_err(CliError::from)?;
        // realize the partial map by a random known automorphism
        let model = random_portrait(b, f, &spec.facute, &mut rng, cfg.radius, 2)
            .map_err(CliError::from)?;
        let mut partial = BTreeMap::new();
        for c in set.chambers() {
            partial.insert(c.clone(), model.apply(b, f, c).map_err(CliError::from)?);
        }
        let depth = 1;
        let ext = match extend_partial(b, &set, &partial, f, depth) {
            Ok(ext) => ext,
            Err(e) => {
                report.violations.push(format!("extension failed: {e}"));
                continue;
            }
        };
        report.checks += 1;
        for c in set.chambers() {
            if ext.apply(b, f, c).map_err(CliError::from)? != partial[c] {
                report.violations.push(format!(
                    "extension disagrees with the partial map at {}",
                    chamber_name(b, c)
                ));
            }
        }
        // F-membership away from walls parallel to the set: panels within
        // the depth whose local action leaves F must be parallel to a panel
        // inside the set
        let ball = b
            .ball_around(set.chambers(), depth, BALL_LIMIT)
            .map_err(CliError::from)?;
        let inside: BTreeSet<Chamber> = set.chambers().iter().cloned().collect();
        for p in panels_in_ball(b, &ball) {
            let i = p.panel_type().map_err(CliError::from)?;
            let sigma = ext.local_action(b, f, &p).map_err(CliError::from)?;
            let t = b.tree_wall_of(&p).map_err(CliError::from)?;
            let parallel_inside = parallel_panel_inside(b, &t, &inside)?;
            report.checks += 1;
            if !f.group(i).contains(&sigma).map_err(CliError::from)? && !parallel_inside {
                report.violations.push(format!(
                    "extension acts outside F at a panel not parallel to the set ({})",
                    chamber_name(b, &p.rep)
                ));
            }
        }
        // negative control: a distance-breaking partial map is rejected
        if set.len() >= 2 {
            let mut bad = partial.clone();
            let first = set.chambers()[0].clone();
            let moved = b.step(&partial[&first], TypeIndex(0), 1);
            let moved = b.step(&moved, b.diagram().types().last().unwrap(), 1);
            bad.insert(first, moved);
            report.checks += 1;
            if extend_partial(b, &set, &bad, f, 0).is_ok() {
                report
                    .violations
                    .push("distance-breaking partial map was accepted".to_owned());
            }
        }
    }
    Ok(())
}

/// Whether some panel of the tree-wall lies completely inside the chamber set.
fn parallel_panel_inside(
    b: &Building,
    t: &rab_core::TreeWall,
    inside: &BTreeSet<Chamber>,
) -> Result<bool, CliError> {
    // panels of the tree-wall meeting the set are found through its members
    for c in inside {
        let p = b.panel(c, t.ty);
        if &b.tree_wall_of(&p).map_err(CliError::from)? == t {
            let all_in = b
                .panel_chambers(&p)
                .map_err(CliError::from)?
                .iter()
                .all(|x| inside.contains(x));
            if all_in {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

fn independence_suite(
    spec: &BuildingSpec,
    cfg: SuiteConfig,
    report: &mut SuiteReport,
) -> Result<(), CliError> {
    let b = &spec.building;
    let f = &spec.f;
    for k in 0..cfg.samples as u64 {
        let mut rng = sample_rng(cfg.seed, k);
        let i = random_type(b, &mut rng);
        let p = b.panel(&b.base(), i);
        // act inside one wing: a kp element at an i-panel lying strictly
        // inside the wing of a non-gate chamber of p, reached through a
        // type blocked against i so that its tree-wall differs from p's
        let wing_chamber = b.step(&b.base(), i, rng.gen_range(1..b.params().q(i)));
        let blocked = b
            .diagram()
            .types()
            .find(|&t| t != i && !b.diagram().commutes(i, t));
        let inner_anchor = match blocked {
            Some(t) => b.step(&wing_chamber, t, 1),
            // every other type commutes with i: all i-panels are parallel
            // and no nontrivial portrait fixes the tree-wall of p
            None => continue,
        };
        let q_panel = b.panel(&inner_anchor, i);
        let sigma_pool: Vec<Perm> = spec
            .facute
            .group(i)
            .elements()
            .map_err(CliError::from)?
            .iter()
            .cloned()
            .collect();
        let sigma = sigma_pool[rng.gen_range(0..sigma_pool.len())].clone();
        let g = match kp_element(b, f, &q_panel, &sigma) {
            Ok(g) => g,
            Err(e) => {
                report.violations.push(format!("kp element failed: {e}"));
                continue;
            }
        };
        // g must fix the tree-wall of p pointwise for the restriction to apply
        let restriction = wing_restrict(b, f, &g, &p, &wing_chamber, cfg.radius.min(3));
        let g_fixes_p = match restriction {
            Ok(_) => true,
            Err(CoreError::TreeWallNotFixed) => false,
            Err(e) => {
                report.violations.push(format!("wing restriction failed: {e}"));
                continue;
            }
        };
        if !g_fixes_p {
            continue; // sampled configuration does not meet the hypothesis
        }
        report.checks += 1;
        let restrictions: Vec<_> = b
            .panel_chambers(&p)
            .map_err(CliError::from)?
            .iter()
            .map(|c| wing_restrict(b, f, &g, &p, c, cfg.radius.min(3)))
            .collect::<Result<_, _>>()
            .map_err(CliError::from)?;
        let ball = b
            .ball(&b.base(), cfg.radius.min(3), BALL_LIMIT)
            .map_err(CliError::from)?;
        for c in ball.chambers() {
            let mut acc = c.clone();
            for r in &restrictions {
                acc = r.apply(b, f, &acc).map_err(CliError::from)?;
            }
            let direct = g.apply(b, f, c).map_err(CliError::from)?;
            if acc != direct {
                report.violations.push(format!(
                    "wing restrictions do not recompose the portrait at {}",
                    chamber_name(b, c)
                ));
                break;
            }
        }
        // membership is preserved by each restriction
        let whole = classify_membership(b, &g, f, &spec.facute).map_err(CliError::from)?;
        for (idx, c) in b.panel_chambers(&p).map_err(CliError::from)?.iter().enumerate() {
            let piece = wing_restrict(b, f, &g, &p, c, cfg.radius.min(3)).map_err(CliError::from)?;
            let m = piece.classify(b, f, &spec.facute).map_err(CliError::from)?;
            report.checks += 1;
            if whole.in_g_f_facute && !m.in_g_f_facute {
                report.violations.push(format!(
                    "restriction {idx} left G(F,F́) although the original is a member"
                ));
            }
        }
    }
    Ok(())
}

pub fn render_text(r: &SuiteReport) -> String {
    let mut out = format!(
        "suite {}: {} samples, {} checks, {} violations\n",
        r.suite,
        r.samples,
        r.checks,
        r.violations.len()
    );
    for v in r.violations.iter().take(10) {
        out.push_str(&format!("  counterexample: {v}\n"));
    }
    if r.violations.len() > 10 {
        out.push_str(&format!("  ... and {} more\n", r.violations.len() - 10));
    }
    out
}

#[cfg(test)]
mod debug_tests {
    use super::*;
    use crate::spec::parse_spec;

    #[test]
    fn random_portraits_are_individually_consistent() {
        let bytes = std::fs::read("../../specs/tree-sym3.json").unwrap();
        let spec = parse_spec(&bytes).unwrap();
        let b = &spec.building;
        let f = &spec.f;
        for k in 0..20u64 {
            let mut rng = sample_rng(7, k);
            let g = random_portrait(b, f, &spec.facute, &mut rng, 3, 2).unwrap();
            let ball = b.ball(&b.base(), 3, 100_000).unwrap();
            for c in ball.chambers() {
                if let Err(e) = g.apply(b, f, c) {
                    panic!("sample {k}: g inconsistent at {c:?}: {e}\n{g:#?}");
                }
            }
            let h = random_portrait(b, f, &spec.facute, &mut rng, 3, 2).unwrap();
            for c in ball.chambers() {
                if let Err(e) = h.apply(b, f, c) {
                    panic!("sample {k}: h inconsistent at {c:?}: {e}\n{h:#?}");
                }
            }
            let gh = Portrait::compose(b, f, &g, &h).unwrap_or_else(|e| panic!("sample {k}: compose failed: {e}"));
            for c in ball.chambers() {
                if let Err(e) = gh.apply(b, f, c) {
                    panic!("sample {k}: gh inconsistent at {c:?}: {e}\ng={g:#?}\nh={h:#?}\ngh={gh:#?}");
                }
            }
        }
    }
}
