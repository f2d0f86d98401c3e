//! Universal-group elements over the two buildings and the isomorphism
//! `φ: g ↦ ψ g ψ⁻¹` between them.

mod element;
mod local_group;
mod perm;
mod phi;

use thiserror::Error;

use crate::building::BuildingError;
use crate::coxeter::{ChamberWord, Gen};
use crate::treewall::TreeWallVertex;

pub use element::{
    vertices_within, AutomorphismReport, BuildingTag, Element, MembershipReport, MembershipViolation, Portrait, UniversalGroup,
};
pub use local_group::{LocalGroup, LocalGroupError, LocalGroupSpec, DEFAULT_ELEMENT_LIMIT};
pub use perm::Perm;
pub use phi::{CheckClass, Isomorphism, LocalGroups, PhiReport, PhiViolation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum UniversalError {
    #[error("{0:?} is not a permutation table")]
    NotAPermutation(Vec<u32>),
    #[error("element acts on {got:?}, expected {expected:?}")]
    BuildingMismatch { expected: BuildingTag, got: BuildingTag },
    #[error("chamber {0} does not belong to the building")]
    ForeignChamber(ChamberWord),
    /// A decoration key that is not a shortest coset representative cannot be
    /// attached to the tree, so the support would not be rooted.
    #[error("decoration at {0} is not attached to the tree-wall tree")]
    NonCanonicalVertex(TreeWallVertex),
    #[error("vertex {0} is decorated twice")]
    DuplicateDecoration(TreeWallVertex),
    #[error("decoration at {0} is outside the local group")]
    NotInLocalGroup(TreeWallVertex),
    #[error("decoration at {vertex} moves colour {colour} of the edge toward the base")]
    MovesRootwardColour { vertex: TreeWallVertex, colour: u32 },
    #[error("local group for {gen} acts on {got} points, expected {expected}")]
    DegreeMismatch { gen: Gen, expected: u32, got: u32 },
    #[error("local group for {0} is not transitive")]
    NotTransitive(Gen),
    #[error("the k local group must be a product matching the k-colour factors")]
    KNotProduct,
    #[error("not an automorphism: {0}")]
    NonAutomorphism(String),
    #[error(transparent)]
    LocalGroup(#[from] LocalGroupError),
    #[error(transparent)]
    Building(#[from] BuildingError),
}
