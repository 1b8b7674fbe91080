//! Desk-scale combinatorics of locally finite semiregular right-angled
//! buildings and their (restricted) universal groups.
//!
//! The crate builds finite portions of a building from its right-angled
//! Coxeter diagram and panel parameters, evaluates automorphisms given by
//! their local actions, and decides the diagram-level criteria (rungs,
//! ladderfulness, reducibility, vertex covers) that govern the restricted
//! universal groups.

pub mod building;
pub mod diagram;
pub mod dot;
pub mod error;
pub mod permgrp;
pub mod serial;
pub mod universal;
pub mod words;

pub use building::{
    Ball, Building, Chamber, ClosingSquare, ConcaveGallery, Gallery, PanelClosedSet, ResidueKey,
    SphereCase, TreeWall, TreeWallTree,
};
pub use diagram::{enumerate_ladderful, isomorphic, Decomposition, Diagram, MValue, TypeIndex, TypeSet};
pub use error::{Error, Result};
pub use permgrp::{subgroup_index, validate_local_data, Perm, PermGroup, StabilizerAnalysis};
pub use universal::{
    kp_element, orbit_census, wing_restrict, LocalData, MembershipReport, OrbitCensus,
    PiecewiseAutomorphism, Portrait, SingularityReport,
};
pub use words::{Letter, Parameters, Word};
