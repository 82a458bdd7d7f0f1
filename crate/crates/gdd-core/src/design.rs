//! Fully expanded designs: an explicit point list, a group partition and a
//! block multiset. This is the object the design axioms are checked on.

use std::fmt;

use crate::space::{sort_key_of_token, split_subscript};

/// A concrete named point of a developed design.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DesignPoint {
    pub label: String,
    pub index: Option<u32>,
}

impl DesignPoint {
    pub fn from_token(token: &str) -> Self {
        match split_subscript(token) {
            Some((stem, i)) if !stem.is_empty() => DesignPoint {
                label: stem.to_string(),
                index: Some(i),
            },
            _ => DesignPoint {
                label: token.to_string(),
                index: None,
            },
        }
    }

    /// Sort key for canonical output: label, then numeric subscript.
    pub fn sort_key(&self) -> (String, u64) {
        sort_key_of_token(&self.to_string())
    }
}

impl fmt::Display for DesignPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.index {
            Some(i) => write!(f, "{}{}", self.label, i),
            None => write!(f, "{}", self.label),
        }
    }
}

/// A developed design. Groups and blocks hold indices into `points`.
/// Blocks are a multiset: duplicates are preserved so the verifier can
/// report them as over-coverage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DevelopedDesign {
    pub points: Vec<DesignPoint>,
    pub groups: Vec<Vec<usize>>,
    pub blocks: Vec<[usize; 4]>,
}

impl DevelopedDesign {
    pub fn point_count(&self) -> usize {
        self.points.len()
    }

    pub fn block_name(&self, block: &[usize; 4]) -> String {
        let mut names: Vec<&DesignPoint> = block.iter().map(|&i| &self.points[i]).collect();
        names.sort_by_key(|p| p.sort_key());
        format!(
            "{{{}}}",
            names
                .iter()
                .map(|p| p.to_string())
                .collect::<Vec<_>>()
                .join(",")
        )
    }
}
