//! Semiregular right-angled buildings of type `⟨i,j,k | i²=j²=k²=(ij)²=1⟩`,
//! their tree-wall trees, the chamber bijection between two buildings with
//! complementary thicknesses, and the induced isomorphism of universal groups.

pub mod building;
pub mod correspondence;
pub mod coxeter;
pub mod treewall;
pub mod universal;

pub use building::{BuildingSpec, Colouring};
pub use correspondence::{CorrespondenceConfig, Direction};
pub use coxeter::{ChamberWord, Gen, Thickness};
pub use treewall::{Side, TreeWallVertex};
