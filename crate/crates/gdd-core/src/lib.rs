//! Tools for group divisible designs with block size 4: group-type
//! arithmetic and feasibility checks, cyclic development of base blocks,
//! exhaustive verification of the design axioms, a catalog of reference
//! constructions, text formats for systems and developed designs, and an
//! exact-cover search for base-block systems.

pub mod catalog;
pub mod design;
pub mod feasibility;
pub mod format;
pub mod group_type;
pub mod orbit;
pub mod search;
pub mod space;
pub mod verify;

pub use design::{DesignPoint, DevelopedDesign};
pub use group_type::{GroupType, BLOCK_SIZE};
pub use orbit::{act, develop_block, develop_system, orbit_length, BaseBlockSystem};
pub use space::{Block, GroupLayout, Point, PointSpace};
pub use verify::{verify, verify_system, VerificationReport};
