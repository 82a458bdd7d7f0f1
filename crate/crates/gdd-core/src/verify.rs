//! Exhaustive verification of the design axioms on a developed design:
//! no two points of one group share a block, and every cross-group pair of
//! points shares exactly one block.

use serde::Serialize;

use crate::design::DevelopedDesign;
use crate::group_type::GroupType;
use crate::orbit::{develop_system, BaseBlockSystem, DevelopError, OrbitNoteMismatch};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Status {
    Valid,
    Invalid,
}

/// A block containing two points of the same group.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct IntraGroupDiag {
    pub block: String,
    pub first: String,
    pub second: String,
}

/// A cross-group pair covered by no block.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct UncoveredDiag {
    pub first: String,
    pub second: String,
}

/// A cross-group pair covered more than once, with the covering blocks.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct OverCoveredDiag {
    pub first: String,
    pub second: String,
    pub blocks: Vec<String>,
}

/// A claimed group type that differs from the one the layout induces.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClaimMismatch {
    pub claimed: GroupType,
    pub induced: GroupType,
}

/// Blocks a point lies in, next to the replication number its group size
/// forces for a valid design.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct ReplicationEntry {
    pub point: String,
    pub group_size: u32,
    pub blocks: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub status: Status,
    pub claimed_type: Option<GroupType>,
    pub induced_type: GroupType,
    pub point_total: usize,
    pub block_total: usize,
    pub intra_group: Vec<IntraGroupDiag>,
    pub uncovered: Vec<UncoveredDiag>,
    pub overcovered: Vec<OverCoveredDiag>,
    pub malformed: Vec<String>,
    pub orbit_warnings: Vec<OrbitNoteMismatch>,
    pub claim_mismatch: Option<ClaimMismatch>,
    pub replication: Vec<ReplicationEntry>,
}

impl VerificationReport {
    pub fn is_valid(&self) -> bool {
        self.status == Status::Valid
    }

    /// One line per diagnostic, in a stable order. Warnings are not included.
    pub fn diagnostic_lines(&self) -> Vec<String> {
        let mut out = Vec::new();
        for d in &self.malformed {
            out.push(format!("malformed block: {d}"));
        }
        for d in &self.intra_group {
            out.push(format!(
                "intra-group pair {{{},{}}} inside block {}",
                d.first, d.second, d.block
            ));
        }
        for d in &self.uncovered {
            out.push(format!("uncovered cross pair {{{},{}}}", d.first, d.second));
        }
        for d in &self.overcovered {
            out.push(format!(
                "cross pair {{{},{}}} covered {} times: {}",
                d.first,
                d.second,
                d.blocks.len(),
                d.blocks.join(", ")
            ));
        }
        if let Some(m) = &self.claim_mismatch {
            out.push(format!(
                "claimed type {} but the layout induces {}",
                m.claimed, m.induced
            ));
        }
        out
    }

    pub fn warning_lines(&self) -> Vec<String> {
        self.orbit_warnings
            .iter()
            .map(|w| {
                format!(
                    "orbit-note mismatch on base block {}: declared {}, computed {}",
                    w.base_index, w.declared, w.computed
                )
            })
            .collect()
    }
}

/// The group type induced by a partition (multiset of group sizes).
pub fn infer_type(groups: &[Vec<usize>]) -> GroupType {
    let sizes: Vec<u32> = groups
        .iter()
        .filter(|g| !g.is_empty())
        .map(|g| g.len() as u32)
        .collect();
    GroupType::new(sizes).expect("a layout has at least one non-empty group")
}

/// Checks the design axioms on a developed design.
///
/// Violations are report content, not errors. The result is independent of
/// the order of points, groups and blocks. The design must have at least
/// one point.
pub fn verify(design: &DevelopedDesign) -> VerificationReport {
    verify_with(design, None, Vec::new())
}

fn verify_with(
    design: &DevelopedDesign,
    claimed_type: Option<GroupType>,
    orbit_warnings: Vec<OrbitNoteMismatch>,
) -> VerificationReport {
    let n = design.points.len();
    assert!(n > 0, "design must have at least one point");
    let name = |i: usize| design.points[i].to_string();

    let mut malformed: Vec<String> = Vec::new();

    // Group membership; points in no group or several groups are malformed.
    let mut group_of: Vec<Option<usize>> = vec![None; n];
    for (gi, group) in design.groups.iter().enumerate() {
        if group.is_empty() {
            malformed.push(format!("group {gi} is empty"));
        }
        for &p in group {
            if p >= n {
                malformed.push(format!("group {gi} references unknown point id {p}"));
                continue;
            }
            match group_of[p] {
                None => group_of[p] = Some(gi),
                Some(_) => malformed.push(format!("point `{}` lies in more than one group", name(p))),
            }
        }
    }
    for (p, g) in group_of.iter().enumerate() {
        if g.is_none() {
            malformed.push(format!("point `{}` is not covered by any group", name(p)));
        }
    }

    let pair_id = |a: usize, b: usize| -> usize {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        hi * (hi - 1) / 2 + lo
    };
    let mut coverage: Vec<Vec<usize>> = vec![Vec::new(); n * n.saturating_sub(1) / 2];

    let mut intra_group: Vec<IntraGroupDiag> = Vec::new();
    let mut well_formed_blocks = 0usize;
    for (bi, block) in design.blocks.iter().enumerate() {
        if block.iter().any(|&p| p >= n) {
            malformed.push(format!("block {bi} references an unknown point"));
            continue;
        }
        let mut sorted = *block;
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            malformed.push(format!(
                "block {} has a repeated point",
                design.block_name(block)
            ));
            continue;
        }
        well_formed_blocks += 1;
        for i in 0..4 {
            for j in (i + 1)..4 {
                let (a, b) = (sorted[i], sorted[j]);
                match (group_of[a], group_of[b]) {
                    (Some(ga), Some(gb)) if ga == gb => {
                        let (first, second) = ordered_names(design, a, b);
                        intra_group.push(IntraGroupDiag {
                            block: design.block_name(block),
                            first,
                            second,
                        });
                    }
                    _ => coverage[pair_id(a, b)].push(bi),
                }
            }
        }
    }

    let mut uncovered: Vec<UncoveredDiag> = Vec::new();
    let mut overcovered: Vec<OverCoveredDiag> = Vec::new();
    let mut cross_pairs = 0u64;
    for b in 1..n {
        for a in 0..b {
            match (group_of[a], group_of[b]) {
                (Some(ga), Some(gb)) if ga != gb => {
                    cross_pairs += 1;
                    let cover = &coverage[pair_id(a, b)];
                    let (first, second) = ordered_names(design, a, b);
                    match cover.len() {
                        1 => {}
                        0 => uncovered.push(UncoveredDiag { first, second }),
                        _ => {
                            let mut blocks: Vec<String> = cover
                                .iter()
                                .map(|&bi| design.block_name(&design.blocks[bi]))
                                .collect();
                            blocks.sort();
                            overcovered.push(OverCoveredDiag {
                                first,
                                second,
                                blocks,
                            });
                        }
                    }
                }
                _ => {}
            }
        }
    }

    let mut replication: Vec<ReplicationEntry> = Vec::new();
    for (p, group) in group_of.iter().enumerate() {
        if let Some(g) = *group {
            let blocks = design
                .blocks
                .iter()
                .filter(|block| block.contains(&p))
                .count();
            replication.push(ReplicationEntry {
                point: name(p),
                group_size: design.groups[g].len() as u32,
                blocks,
            });
        }
    }
    replication.sort();

    intra_group.sort();
    intra_group.dedup();
    uncovered.sort();
    overcovered.sort();
    malformed.sort();

    let induced_type = if design.groups.iter().any(|g| !g.is_empty()) {
        infer_type(&design.groups)
    } else {
        // Nothing partitions the points; report the whole set as one group
        // so the report still renders. The orphan diagnostics make it invalid.
        GroupType::new(vec![n as u32]).expect("n > 0")
    };
    let claim_mismatch = claimed_type.as_ref().and_then(|claimed| {
        (*claimed != induced_type).then(|| ClaimMismatch {
            claimed: claimed.clone(),
            induced: induced_type.clone(),
        })
    });

    let valid = intra_group.is_empty()
        && uncovered.is_empty()
        && overcovered.is_empty()
        && malformed.is_empty()
        && claim_mismatch.is_none();

    if valid {
        // Redundant counting oracles; a failure here is an internal bug.
        let v = induced_type.point_count() as u64;
        assert_eq!(v as usize, n);
        assert_eq!(
            cross_pairs,
            (v * v - induced_type.sum_of_squares()) / 2,
            "cross pair total disagrees with the type arithmetic"
        );
        assert_eq!(
            6 * well_formed_blocks as u64,
            cross_pairs,
            "block total times 6 must equal the cross pair count"
        );
        for entry in &replication {
            assert_eq!(
                entry.blocks as u32 * 3,
                induced_type.point_count() - entry.group_size,
                "replication of `{}` disagrees with (v - g)/3",
                entry.point
            );
        }
    }

    VerificationReport {
        status: if valid { Status::Valid } else { Status::Invalid },
        claimed_type,
        induced_type,
        point_total: n,
        block_total: design.blocks.len(),
        intra_group,
        uncovered,
        overcovered,
        malformed,
        orbit_warnings,
        claim_mismatch,
        replication,
    }
}

fn ordered_names(design: &DevelopedDesign, a: usize, b: usize) -> (String, String) {
    let (pa, pb) = (&design.points[a], &design.points[b]);
    if pa.sort_key() <= pb.sort_key() {
        (pa.to_string(), pb.to_string())
    } else {
        (pb.to_string(), pa.to_string())
    }
}

/// Develops a system and verifies the result, cross-checking the claimed
/// type and any declared orbit lengths. Degenerate base blocks abort.
pub fn verify_system(system: &BaseBlockSystem) -> Result<VerificationReport, DevelopError> {
    let development = develop_system(system)?;
    Ok(verify_with(
        &development.design,
        system.claimed_type.clone(),
        development.orbit_warnings,
    ))
}
