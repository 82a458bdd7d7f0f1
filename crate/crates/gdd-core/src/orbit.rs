//! Development of base blocks under the cyclic shift action: orbit lengths,
//! block expansion, and whole-system development.

use thiserror::Error;

use crate::design::{DesignPoint, DevelopedDesign};
use crate::group_type::GroupType;
use crate::space::{Block, FamilyKind, GroupLayout, Point, PointSpace};

/// A compact construction: a point space, a group layout over it, and a list
/// of base blocks to develop. `declared_orbits`, when present, carries the
/// orbit lengths the source of the construction claims, one per base block;
/// development cross-checks them and reports mismatches as warnings.
#[derive(Debug, Clone)]
pub struct BaseBlockSystem {
    pub name: String,
    pub space: PointSpace,
    pub layout: GroupLayout,
    pub claimed_type: Option<GroupType>,
    pub base_blocks: Vec<Block>,
    pub declared_orbits: Option<Vec<u32>>,
}

/// A declared orbit length that does not match the computed one. The
/// developed object is the ground truth; this never invalidates a design.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct OrbitNoteMismatch {
    pub base_index: usize,
    pub declared: u32,
    pub computed: u32,
}

/// The result of developing a system: the expanded design plus the computed
/// orbit length of every base block and any orbit-note warnings.
#[derive(Debug, Clone)]
pub struct Development {
    pub design: DevelopedDesign,
    pub orbit_lengths: Vec<u32>,
    pub orbit_warnings: Vec<OrbitNoteMismatch>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DevelopError {
    #[error("base block {index} {block} is degenerate: {first} and {second} collide under reduction modulo the family period")]
    DegenerateBlock {
        index: usize,
        block: String,
        first: String,
        second: String,
    },
    #[error("base block {index} contains a point outside the space")]
    UnknownPoint { index: usize },
    #[error("layout does not partition the space: {0}")]
    Layout(#[from] crate::space::LayoutError),
}

/// Applies the shift action: fixed points are unaltered; a periodic point
/// has `shift` added to its subscript modulo the family period.
pub fn act(space: &PointSpace, p: Point, shift: u64) -> Point {
    match space.family(p.family).kind {
        FamilyKind::Fixed => p,
        FamilyKind::Periodic { period } => {
            let period = u64::from(period);
            let index = ((u64::from(p.index) % period) + shift % period) % period;
            Point {
                family: p.family,
                index: index as u32,
            }
        }
    }
}

fn shifted_points(space: &PointSpace, b: &Block, shift: u64) -> [Point; 4] {
    let p = b.points();
    [
        act(space, p[0], shift),
        act(space, p[1], shift),
        act(space, p[2], shift),
        act(space, p[3], shift),
    ]
}

fn as_sorted_set(mut points: [Point; 4]) -> [Point; 4] {
    points.sort_unstable();
    points
}

/// Smallest d >= 1 such that shifting the block by d maps it to itself as a
/// set. Always divides the modulus, because every family period does.
pub fn orbit_length(space: &PointSpace, b: &Block) -> u32 {
    let base = as_sorted_set(shifted_points(space, b, 0));
    for d in 1..=u64::from(space.modulus()) {
        if as_sorted_set(shifted_points(space, b, d)) == base {
            return d as u32;
        }
    }
    unreachable!("shift by the modulus fixes every block");
}

/// Expands a base block into its full orbit `[b+0, b+1, ..., b+(d-1)]`.
///
/// Fails if two points of the block collide once subscripts are reduced
/// modulo their family period; the error names the colliding points.
pub fn develop_block(space: &PointSpace, b: &Block) -> Result<Vec<Block>, DevelopError> {
    develop_block_at(space, b, 0)
}

fn develop_block_at(
    space: &PointSpace,
    b: &Block,
    index: usize,
) -> Result<Vec<Block>, DevelopError> {
    if b.points().iter().any(|&p| !space.contains_family(p)) {
        return Err(DevelopError::UnknownPoint { index });
    }
    let reduced = shifted_points(space, b, 0);
    for i in 0..4 {
        for j in (i + 1)..4 {
            if reduced[i] == reduced[j] {
                return Err(DevelopError::DegenerateBlock {
                    index,
                    block: b.name(space),
                    first: space.point_name(b.points()[i]),
                    second: space.point_name(b.points()[j]),
                });
            }
        }
    }
    let d = orbit_length(space, b);
    let mut out = Vec::with_capacity(d as usize);
    for shift in 0..u64::from(d) {
        let block = Block::new(shifted_points(space, b, shift))
            .expect("shift action preserves distinctness");
        out.push(block);
    }
    debug_assert!({
        let mut sets: Vec<_> = out.clone();
        sets.sort_unstable();
        sets.windows(2).all(|w| w[0] != w[1])
    });
    Ok(out)
}

impl PointSpace {
    fn contains_family(&self, p: Point) -> bool {
        p.family < self.families().len()
    }
}

/// Develops every base block and assembles the expanded design. Block order
/// is base-block index, then shift. Duplicate blocks across orbits are kept.
pub fn develop_system(system: &BaseBlockSystem) -> Result<Development, DevelopError> {
    let space = &system.space;
    system.layout.validate(space)?;
    let space_points = space.points();
    let id_of = |p: Point| -> usize {
        space_points
            .binary_search(&p)
            .expect("developed point lies in the space")
    };

    let points: Vec<DesignPoint> = space_points
        .iter()
        .map(|&p| DesignPoint::from_token(&space.point_name(p)))
        .collect();
    let groups: Vec<Vec<usize>> = system
        .layout
        .groups()
        .iter()
        .map(|g| {
            let mut ids: Vec<usize> = g.iter().map(|&p| id_of(p)).collect();
            ids.sort_unstable();
            ids
        })
        .collect();

    let mut blocks: Vec<[usize; 4]> = Vec::new();
    let mut orbit_lengths = Vec::with_capacity(system.base_blocks.len());
    for (index, base) in system.base_blocks.iter().enumerate() {
        let orbit = develop_block_at(space, base, index)?;
        orbit_lengths.push(orbit.len() as u32);
        for block in orbit {
            let mut ids = [0usize; 4];
            for (slot, &p) in ids.iter_mut().zip(block.points()) {
                *slot = id_of(p);
            }
            ids.sort_unstable();
            blocks.push(ids);
        }
    }

    let mut orbit_warnings = Vec::new();
    if let Some(declared) = &system.declared_orbits {
        for (base_index, (&d, &c)) in declared.iter().zip(&orbit_lengths).enumerate() {
            if d != c {
                orbit_warnings.push(OrbitNoteMismatch {
                    base_index,
                    declared: d,
                    computed: c,
                });
            }
        }
    }

    Ok(Development {
        design: DevelopedDesign {
            points,
            groups,
            blocks,
        },
        orbit_lengths,
        orbit_warnings,
    })
}
