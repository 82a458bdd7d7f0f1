//! Property suites: group-action laws, orbit-length divisibility, format
//! round trips, verifier order-insensitivity and development closure.

use proptest::prelude::*;

use gdd_core::design::DevelopedDesign;
use gdd_core::format::{parse_design, parse_system, serialize_design, serialize_system};
use gdd_core::group_type::GroupType;
use gdd_core::orbit::{act, develop_block, develop_system, orbit_length, BaseBlockSystem};
use gdd_core::space::{Block, GroupLayout, Point, PointSpace};
use gdd_core::verify::verify;

/// Small deterministic generator so structured values shrink reasonably.
fn xorshift(state: &mut u64) -> u64 {
    let mut x = *state;
    x ^= x << 13;
    x ^= x >> 7;
    x ^= x << 17;
    *state = x.max(1);
    x
}

const FAMILY_LABELS: [&str; 4] = ["a", "b", "c", "d"];
const FIXED_LABELS: [&str; 2] = ["w", "v"];

fn build_space(modulus: u32, periods: &[u32], fixed_count: usize) -> PointSpace {
    let mut space = PointSpace::new(modulus).unwrap();
    for (i, &p) in periods.iter().enumerate() {
        space.add_family(FAMILY_LABELS[i], p).unwrap();
    }
    for label in FIXED_LABELS.iter().take(fixed_count) {
        space.add_fixed(label).unwrap();
    }
    space
}

fn build_system(
    modulus: u32,
    periods: Vec<u32>,
    fixed_count: usize,
    block_seeds: Vec<u64>,
    layout_seed: u64,
) -> BaseBlockSystem {
    let space = build_space(modulus, &periods, fixed_count);
    let mut points = space.points();
    let mut state = layout_seed.max(1);

    // Random partition: shuffle, then cut into chunks.
    for i in (1..points.len()).rev() {
        let j = (xorshift(&mut state) as usize) % (i + 1);
        points.swap(i, j);
    }
    let mut groups: Vec<Vec<Point>> = Vec::new();
    let mut rest = points.as_slice();
    while !rest.is_empty() {
        let take = 1 + (xorshift(&mut state) as usize) % rest.len().min(5);
        groups.push(rest[..take].to_vec());
        rest = &rest[take..];
    }
    let layout = GroupLayout::new(groups);

    let all = space.points();
    let mut base_blocks = Vec::new();
    if all.len() >= 4 {
        for seed in block_seeds {
            let mut state = seed.max(1);
            let mut chosen: Vec<Point> = Vec::new();
            while chosen.len() < 4 {
                let p = all[(xorshift(&mut state) as usize) % all.len()];
                if !chosen.contains(&p) {
                    chosen.push(p);
                }
            }
            base_blocks.push(Block::new([chosen[0], chosen[1], chosen[2], chosen[3]]).unwrap());
        }
    }

    let claimed_type = Some(layout.induced_type());
    BaseBlockSystem {
        name: String::new(),
        space,
        layout,
        claimed_type,
        base_blocks,
        declared_orbits: None,
    }
}

prop_compose! {
    fn arb_space_parts()(modulus in 1u32..=12)(
        modulus in Just(modulus),
        periods in prop::collection::vec(
            prop::sample::select(
                (1..=modulus).filter(|d| modulus % d == 0).collect::<Vec<u32>>()
            ),
            1..=4,
        ),
        fixed_count in 0usize..=2,
    ) -> (u32, Vec<u32>, usize) {
        (modulus, periods, fixed_count)
    }
}

prop_compose! {
    fn arb_system()(parts in arb_space_parts())(
        parts in Just(parts),
        block_seeds in prop::collection::vec(any::<u64>(), 0..=6),
        layout_seed in any::<u64>(),
    ) -> BaseBlockSystem {
        let (modulus, periods, fixed_count) = parts;
        build_system(modulus, periods, fixed_count, block_seeds, layout_seed)
    }
}

proptest! {
    /// act is a group action: identity and composition.
    #[test]
    fn act_satisfies_group_action_laws(
        parts in arb_space_parts(),
        point_pick in any::<u64>(),
        x in 0u64..10_000,
        y in 0u64..10_000,
    ) {
        let (modulus, periods, fixed_count) = parts;
        let space = build_space(modulus, &periods, fixed_count);
        let all = space.points();
        let p = all[(point_pick as usize) % all.len()];
        prop_assert_eq!(act(&space, p, 0), p);
        prop_assert_eq!(act(&space, act(&space, p, x), y), act(&space, p, x + y));
    }

    /// Orbit lengths divide the modulus, and a developed orbit has exactly
    /// that many pairwise distinct blocks.
    #[test]
    fn orbit_length_divides_modulus(system in arb_system()) {
        for block in &system.base_blocks {
            let d = orbit_length(&system.space, block);
            prop_assert_eq!(system.space.modulus() % d, 0);
            let orbit = develop_block(&system.space, block).unwrap();
            prop_assert_eq!(orbit.len() as u32, d);
            let mut sets = orbit.clone();
            sets.sort_unstable();
            sets.dedup();
            prop_assert_eq!(sets.len() as u32, d);
        }
    }

    /// Developing any developed block again lands inside the design.
    #[test]
    fn development_is_closed_under_the_action(
        system in arb_system(),
        shift in 0u64..100,
    ) {
        let mut all_blocks: Vec<Block> = Vec::new();
        for base in &system.base_blocks {
            all_blocks.extend(develop_block(&system.space, base).unwrap());
        }
        for block in &all_blocks {
            let shifted: Vec<Point> = block
                .points()
                .iter()
                .map(|&p| act(&system.space, p, shift))
                .collect();
            let shifted = Block::new([shifted[0], shifted[1], shifted[2], shifted[3]]).unwrap();
            prop_assert!(all_blocks.contains(&shifted));
        }
    }

    /// serialize then parse then serialize is byte-identical.
    #[test]
    fn system_round_trip_is_byte_stable(system in arb_system()) {
        let doc = serialize_system(&system);
        let reparsed = parse_system(&doc).unwrap();
        prop_assert_eq!(serialize_system(&reparsed), doc);
    }

    /// Same for developed designs.
    #[test]
    fn design_round_trip_is_byte_stable(system in arb_system()) {
        let dev = develop_system(&system).unwrap();
        let doc = serialize_design(&dev.design);
        let reparsed = parse_design(&doc).unwrap();
        prop_assert_eq!(serialize_design(&reparsed), doc);
    }

    /// Group type text form round-trips through parse.
    #[test]
    fn group_type_round_trip(sizes in prop::collection::vec(1u32..60, 1..12)) {
        let t = GroupType::new(sizes).unwrap();
        let reparsed: GroupType = t.to_string().parse().unwrap();
        prop_assert_eq!(reparsed, t);
    }

    /// Verification is insensitive to block order and point numbering.
    #[test]
    fn verifier_is_order_insensitive(
        system in arb_system(),
        block_seed in any::<u64>(),
        point_seed in any::<u64>(),
    ) {
        let design = develop_system(&system).unwrap().design;
        let baseline = verify(&design);
        let permuted = permute_design(&design, block_seed, point_seed);
        let report = verify(&permuted);
        prop_assert_eq!(report.status, baseline.status);
        prop_assert_eq!(report.intra_group, baseline.intra_group);
        prop_assert_eq!(report.uncovered, baseline.uncovered);
        prop_assert_eq!(report.overcovered, baseline.overcovered);
        prop_assert_eq!(report.malformed, baseline.malformed);
        prop_assert_eq!(report.replication, baseline.replication);
        prop_assert_eq!(report.induced_type, baseline.induced_type);
    }
}

/// Applies a random permutation to block order and to point numbering.
fn permute_design(design: &DevelopedDesign, block_seed: u64, point_seed: u64) -> DevelopedDesign {
    let n = design.points.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut state = point_seed.max(1);
    for i in (1..n).rev() {
        let j = (xorshift(&mut state) as usize) % (i + 1);
        perm.swap(i, j);
    }
    // perm[i] is the new id of old point i.
    let mut points = design.points.clone();
    for (old, &new) in perm.iter().enumerate() {
        points[new] = design.points[old].clone();
    }
    let groups: Vec<Vec<usize>> = design
        .groups
        .iter()
        .map(|g| g.iter().map(|&p| perm[p]).collect())
        .collect();
    let mut blocks: Vec<[usize; 4]> = design
        .blocks
        .iter()
        .map(|b| {
            let mut nb = b.map(|p| perm[p]);
            nb.sort_unstable();
            nb
        })
        .collect();
    let mut state = block_seed.max(1);
    for i in (1..blocks.len().max(1)).rev() {
        let j = (xorshift(&mut state) as usize) % (i + 1);
        blocks.swap(i, j);
    }
    DevelopedDesign {
        points,
        groups,
        blocks,
    }
}

#[test]
fn catalog_designs_are_closed_under_the_action() {
    // Deterministic spot check on a real construction.
    let system = gdd_core::catalog::get("lemma3").unwrap().system().unwrap();
    let mut all_blocks: Vec<Block> = Vec::new();
    for base in &system.base_blocks {
        all_blocks.extend(develop_block(&system.space, base).unwrap());
    }
    for block in &all_blocks {
        for shift in 0..6 {
            let shifted: Vec<Point> = block
                .points()
                .iter()
                .map(|&p| act(&system.space, p, shift))
                .collect();
            let shifted = Block::new([shifted[0], shifted[1], shifted[2], shifted[3]]).unwrap();
            assert!(all_blocks.contains(&shifted));
        }
    }
}
