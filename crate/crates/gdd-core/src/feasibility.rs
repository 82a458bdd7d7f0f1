//! Necessary conditions for the existence of a design of a given group type,
//! and enumeration of all types passing them in a point range.
//!
//! Feasible means exactly that the counting conditions below hold; it does
//! not assert that a design exists.

use serde::Serialize;
use thiserror::Error;

use crate::group_type::GroupType;

/// The four counting conditions.
///
/// C2 is point replication integrality: a point in a size-g group lies in
/// (v-g)/3 blocks. C3 is block count integrality: (v^2 - sum g^2)/12 blocks.
/// C4 is a pigeonhole bound: a point in the second-largest group meets every
/// point of the largest group, at most one per block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ConditionId {
    C1,
    C2,
    C3,
    C4,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Condition {
    pub id: ConditionId,
    pub description: String,
    pub pass: bool,
    pub witness: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FeasibilityReport {
    pub group_type: GroupType,
    pub v: u32,
    pub groups: usize,
    pub conditions: Vec<Condition>,
    pub feasible: bool,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EnumerateError {
    #[error("invalid point bounds: need 1 <= min <= max, got {min}..{max}")]
    BadBounds { min: u32, max: u32 },
    #[error("residue must be 0, 1 or 2, got {0}")]
    BadResidue(u32),
}

/// Evaluates the four conditions on a group type.
pub fn check_feasible(t: &GroupType) -> FeasibilityReport {
    let v = t.point_count();
    let m = t.group_count();
    let mut conditions = Vec::with_capacity(4);

    conditions.push(Condition {
        id: ConditionId::C1,
        description: "at least 4 groups (every block meets 4 distinct groups)".into(),
        pass: m >= 4,
        witness: format!("m = {m}"),
    });

    let c2_failures: Vec<String> = t
        .exponents()
        .iter()
        .filter(|(g, _)| !(v - g).is_multiple_of(3))
        .map(|(g, _)| format!("v - {g} = {}", v - g))
        .collect();
    conditions.push(Condition {
        id: ConditionId::C2,
        description: "v - g divisible by 3 for every group size g".into(),
        pass: c2_failures.is_empty(),
        witness: if c2_failures.is_empty() {
            t.exponents()
                .iter()
                .map(|(g, _)| format!("v - {g} = {}", v - g))
                .collect::<Vec<_>>()
                .join(", ")
        } else {
            c2_failures.join(", ")
        },
    });

    let pairs_twice = u64::from(v) * u64::from(v) - t.sum_of_squares();
    conditions.push(Condition {
        id: ConditionId::C3,
        description: "v^2 - sum g^2 divisible by 12 (integral block count)".into(),
        pass: pairs_twice.is_multiple_of(12),
        witness: if pairs_twice.is_multiple_of(12) {
            format!("v^2 - sum g^2 = {pairs_twice} = 12 * {}", pairs_twice / 12)
        } else {
            format!("v^2 - sum g^2 = {pairs_twice} = 12 * {} + {}", pairs_twice / 12, pairs_twice % 12)
        },
    });

    // With a single group there are no cross pairs and nothing to bound.
    let (c4_pass, c4_witness) = if m >= 2 {
        let sizes = t.sizes();
        let g1 = sizes[m - 1];
        let g2 = sizes[m - 2];
        (
            3 * g1 + g2 <= v,
            format!("3*{g1} + {g2} = {} vs v = {v}", 3 * g1 + g2),
        )
    } else {
        (true, "single group, nothing to bound".into())
    };
    conditions.push(Condition {
        id: ConditionId::C4,
        description: "3*g(1) + g(2) <= v for the two largest group sizes".into(),
        pass: c4_pass,
        witness: c4_witness,
    });

    let feasible = conditions.iter().all(|c| c.pass);
    FeasibilityReport {
        group_type: t.clone(),
        v,
        groups: m,
        conditions,
        feasible,
    }
}

/// All feasible group types with point count in `[v_min, v_max]`, optionally
/// restricted to a residue of v modulo 3. Output is ordered by v, then by
/// the canonical text form.
///
/// Generation prunes by C2 (all sizes congruent to v modulo 3) and C4
/// (bound on the largest size) instead of filtering raw partitions, so a
/// full run to v = 50 stays fast.
pub fn enumerate_feasible(
    v_min: u32,
    v_max: u32,
    residue: Option<u32>,
) -> Result<Vec<GroupType>, EnumerateError> {
    if v_min == 0 || v_min > v_max {
        return Err(EnumerateError::BadBounds {
            min: v_min,
            max: v_max,
        });
    }
    if let Some(r) = residue {
        if r > 2 {
            return Err(EnumerateError::BadResidue(r));
        }
    }

    let mut out = Vec::new();
    for v in v_min..=v_max {
        if let Some(r) = residue {
            if v % 3 != r {
                continue;
            }
        }
        let mut batch = Vec::new();
        let mut parts = Vec::new();
        descend(v, v, v, &mut parts, &mut batch);
        batch.sort_by_key(|t: &GroupType| t.to_string());
        out.extend(batch);
    }
    Ok(out)
}

/// Extends a descending partition of `v` whose parts all lie in the residue
/// class of `v` mod 3, with `remaining` still to place and `limit` an upper
/// bound on the next part.
fn descend(v: u32, remaining: u32, limit: u32, parts: &mut Vec<u32>, out: &mut Vec<GroupType>) {
    if remaining == 0 {
        // C1; C2 and C4 hold by construction. C3 still needs a check.
        if parts.len() >= 4 {
            let t = GroupType::new(parts.clone()).expect("parts are positive");
            let pairs_twice = u64::from(v) * u64::from(v) - t.sum_of_squares();
            if pairs_twice.is_multiple_of(12) {
                debug_assert!(check_feasible(&t).feasible);
                out.push(t);
            }
        }
        return;
    }
    // Smallest part in the residue class of v mod 3 (3 rather than 0).
    let min_part = match v % 3 {
        0 => 3,
        r => r,
    };
    let mut g = limit.min(remaining);
    // Align g with the residue class.
    while g >= min_part && g % 3 != v % 3 {
        g -= 1;
    }
    while g >= min_part {
        let ok = if parts.is_empty() {
            // g is the largest part; C4 needs a second part of at least
            // min_part to fit, so 3g + min_part <= v unless g is the only
            // part (which C1 kills anyway).
            3 * g + min_part <= v || g == v
        } else if parts.len() == 1 {
            3 * parts[0] + g <= v
        } else {
            true
        };
        if ok {
            parts.push(g);
            descend(v, remaining - g, g, parts, out);
            parts.pop();
        }
        if g < min_part + 3 {
            break;
        }
        g -= 3;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> GroupType {
        s.parse().unwrap()
    }

    fn feasible(s: &str) -> bool {
        check_feasible(&t(s)).feasible
    }

    fn failing_ids(s: &str) -> Vec<ConditionId> {
        check_feasible(&t(s))
            .conditions
            .iter()
            .filter(|c| !c.pass)
            .map(|c| c.id)
            .collect()
    }

    #[test]
    fn known_feasible_types() {
        assert!(feasible("2^6 5^2 11^2"));
        assert!(feasible("3^8 6^1 12^1"));
        // Feasible does not mean a design exists; no design of this type does.
        assert!(feasible("2^4"));
    }

    #[test]
    fn one_to_five_fails_replication() {
        assert!(!feasible("1^5"));
        assert!(failing_ids("1^5").contains(&ConditionId::C2));
    }

    #[test]
    fn c4_tight_cases_pass() {
        let report = check_feasible(&t("3^8 6^1 12^1"));
        let c4 = &report.conditions[3];
        assert!(c4.pass);
        assert!(c4.witness.contains("3*12 + 6 = 42"));
    }

    #[test]
    fn c4_failure() {
        // v = 16, largest 13: 3*13 + 1 = 40 > 16.
        assert!(failing_ids("1^3 13^1").contains(&ConditionId::C4));
    }

    #[test]
    fn single_group_fails_only_c1() {
        assert_eq!(failing_ids("50^1"), vec![ConditionId::C1]);
    }

    #[test]
    fn enumerate_small_ranges() {
        let twelve = enumerate_feasible(12, 12, None).unwrap();
        let names: Vec<String> = twelve.iter().map(|t| t.to_string()).collect();
        assert_eq!(names, vec!["3^4"]);

        let four = enumerate_feasible(4, 4, None).unwrap();
        let names: Vec<String> = four.iter().map(|t| t.to_string()).collect();
        assert_eq!(names, vec!["1^4"]);
    }

    #[test]
    fn enumerate_rejects_bad_arguments() {
        assert!(enumerate_feasible(5, 4, None).is_err());
        assert!(enumerate_feasible(0, 4, None).is_err());
        assert!(enumerate_feasible(4, 5, Some(3)).is_err());
    }

    #[test]
    fn residue_filter() {
        let types = enumerate_feasible(4, 20, Some(2)).unwrap();
        assert!(types.iter().all(|t| t.point_count() % 3 == 2));
    }

    /// Unpruned oracle: every partition of v, filtered through check_feasible.
    fn brute_force(v: u32) -> Vec<GroupType> {
        fn parts_rec(remaining: u32, limit: u32, parts: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
            if remaining == 0 {
                out.push(parts.clone());
                return;
            }
            for g in (1..=limit.min(remaining)).rev() {
                parts.push(g);
                parts_rec(remaining - g, g, parts, out);
                parts.pop();
            }
        }
        let mut all = Vec::new();
        parts_rec(v, v, &mut Vec::new(), &mut all);
        let mut feasible: Vec<GroupType> = all
            .into_iter()
            .map(|sizes| GroupType::new(sizes).unwrap())
            .filter(|t| check_feasible(t).feasible)
            .collect();
        feasible.sort_by_key(|t| t.to_string());
        feasible
    }

    #[test]
    fn pruned_enumeration_matches_brute_force_up_to_20() {
        for v in 1..=20 {
            let pruned = enumerate_feasible(v, v, None).unwrap();
            let brute = brute_force(v);
            assert_eq!(pruned, brute, "mismatch at v = {v}");
        }
    }
}
