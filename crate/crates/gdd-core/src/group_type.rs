//! Group types: multisets of group sizes in exponential notation, and the
//! counting arithmetic every other module leans on.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};
use thiserror::Error;

/// Block size is fixed for the whole toolkit.
pub const BLOCK_SIZE: u32 = 4;

/// A multiset of group sizes, kept sorted ascending.
///
/// The text form is exponential notation: `2^6 5^2 11^2` means six groups of
/// size 2, two of size 5 and two of size 11. Exponents are always printed,
/// even when 1, so parse and format round-trip without ambiguity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupType {
    sizes: Vec<u32>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TypeParseError {
    #[error("empty group type")]
    Empty,
    #[error("malformed term `{0}` (expected g or g^u with positive integers)")]
    MalformedTerm(String),
    #[error("group size must be positive in term `{0}`")]
    ZeroSize(String),
    #[error("exponent must be positive in term `{0}`")]
    ZeroExponent(String),
}

/// Counting operations can fail when a type violates the divisibility the
/// design axioms force; the error names the failing quantity.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum CountError {
    #[error("type {group_type}: v^2 - sum g_i^2 = {pairs_twice} is not divisible by 12; the pair count condition fails")]
    BlockCountIndivisible { group_type: String, pairs_twice: u64 },
    #[error("type {group_type}: v - g = {difference} is not divisible by 3 for group size {size}")]
    ReplicationIndivisible { group_type: String, size: u32, difference: u32 },
    #[error("type {group_type} has no group of size {size}")]
    SizeNotInType { group_type: String, size: u32 },
}

impl GroupType {
    /// Builds a type from a list of group sizes (any order, duplicates kept).
    pub fn new(mut sizes: Vec<u32>) -> Result<Self, TypeParseError> {
        if sizes.is_empty() {
            return Err(TypeParseError::Empty);
        }
        if let Some(&z) = sizes.iter().find(|&&g| g == 0) {
            return Err(TypeParseError::ZeroSize(z.to_string()));
        }
        sizes.sort_unstable();
        Ok(GroupType { sizes })
    }

    /// Fixed block size carried for honest error messages.
    pub fn block_size(&self) -> u32 {
        BLOCK_SIZE
    }

    /// All group sizes, ascending.
    pub fn sizes(&self) -> &[u32] {
        &self.sizes
    }

    /// Number of groups.
    pub fn group_count(&self) -> usize {
        self.sizes.len()
    }

    /// Total number of points, v.
    pub fn point_count(&self) -> u32 {
        self.sizes.iter().sum()
    }

    /// Distinct sizes with multiplicities, ascending by size.
    pub fn exponents(&self) -> Vec<(u32, u32)> {
        let mut out: Vec<(u32, u32)> = Vec::new();
        for &g in &self.sizes {
            match out.last_mut() {
                Some((size, count)) if *size == g => *count += 1,
                _ => out.push((g, 1)),
            }
        }
        out
    }

    /// Sum of squared group sizes.
    pub fn sum_of_squares(&self) -> u64 {
        self.sizes.iter().map(|&g| u64::from(g) * u64::from(g)).sum()
    }

    /// Number of unordered cross-group point pairs, (v^2 - sum g_i^2)/2.
    pub fn cross_pair_count(&self) -> u64 {
        let v = u64::from(self.point_count());
        (v * v - self.sum_of_squares()) / 2
    }

    /// Exact number of blocks any design of this type must have:
    /// each block covers 6 cross pairs, so (v^2 - sum g_i^2)/12.
    pub fn block_count(&self) -> Result<u64, CountError> {
        let v = u64::from(self.point_count());
        let pairs_twice = v * v - self.sum_of_squares();
        if !pairs_twice.is_multiple_of(12) {
            return Err(CountError::BlockCountIndivisible {
                group_type: self.to_string(),
                pairs_twice,
            });
        }
        Ok(pairs_twice / 12)
    }

    /// Number of blocks through each point of a size-`g` group: (v - g)/3.
    pub fn replication(&self, g: u32) -> Result<u32, CountError> {
        if !self.sizes.contains(&g) {
            return Err(CountError::SizeNotInType {
                group_type: self.to_string(),
                size: g,
            });
        }
        let v = self.point_count();
        if !(v - g).is_multiple_of(3) {
            return Err(CountError::ReplicationIndivisible {
                group_type: self.to_string(),
                size: g,
                difference: v - g,
            });
        }
        Ok((v - g) / 3)
    }
}

impl fmt::Display for GroupType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (size, count) in self.exponents() {
            if !first {
                write!(f, " ")?;
            }
            write!(f, "{size}^{count}")?;
            first = false;
        }
        Ok(())
    }
}

impl FromStr for GroupType {
    type Err = TypeParseError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut sizes = Vec::new();
        for term in text.split_whitespace() {
            let (base, exponent) = match term.split_once('^') {
                Some((b, e)) => (b, e),
                None => (term, "1"),
            };
            let parse_positive = |s: &str| -> Result<u32, TypeParseError> {
                if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(TypeParseError::MalformedTerm(term.to_string()));
                }
                s.parse::<u32>()
                    .map_err(|_| TypeParseError::MalformedTerm(term.to_string()))
            };
            let g = parse_positive(base)?;
            let u = parse_positive(exponent)?;
            if g == 0 {
                return Err(TypeParseError::ZeroSize(term.to_string()));
            }
            if u == 0 {
                return Err(TypeParseError::ZeroExponent(term.to_string()));
            }
            sizes.extend(std::iter::repeat_n(g, u as usize));
        }
        if sizes.is_empty() {
            return Err(TypeParseError::Empty);
        }
        GroupType::new(sizes)
    }
}

impl Serialize for GroupType {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> GroupType {
        s.parse().unwrap()
    }

    #[test]
    fn parse_exponential_notation() {
        let ty = t("2^6 5^2 11^2");
        assert_eq!(ty.sizes(), &[2, 2, 2, 2, 2, 2, 5, 5, 11, 11]);
        assert_eq!(ty.point_count(), 44);
    }

    #[test]
    fn parse_implicit_exponent() {
        let ty = t("7");
        assert_eq!(ty.sizes(), &[7]);
        assert_eq!(ty.point_count(), 7);
    }

    #[test]
    fn parse_merges_repeated_bases() {
        assert_eq!(t("3^2 3^6 6 12"), t("3^8 6^1 12^1"));
        assert_eq!(t("3^2 3^6 6 12").to_string(), "3^8 6^1 12^1");
    }

    #[test]
    fn format_is_ascending_with_explicit_exponents() {
        let ty = GroupType::new(vec![11, 2, 11, 2, 11, 11, 2]).unwrap();
        assert_eq!(ty.to_string(), "2^3 11^4");
        assert_eq!(t("5").to_string(), "5^1");
        assert_eq!(t("11^2 2^6 5^2").to_string(), "2^6 5^2 11^2");
    }

    #[test]
    fn parse_format_round_trip() {
        for s in ["2^3 11^4", "1^4", "3^8 6^1 12^1", "2^6 5^2 11^2"] {
            assert_eq!(t(s).to_string(), s);
            assert_eq!(t(&t(s).to_string()), t(s));
        }
    }

    #[test]
    fn parse_rejects_bad_terms() {
        assert!(matches!(
            "2^-1".parse::<GroupType>(),
            Err(TypeParseError::MalformedTerm(term)) if term == "2^-1"
        ));
        assert!(matches!(
            "x^2".parse::<GroupType>(),
            Err(TypeParseError::MalformedTerm(_))
        ));
        assert!(matches!(
            "0^3".parse::<GroupType>(),
            Err(TypeParseError::ZeroSize(_))
        ));
        assert!(matches!(
            "3^0".parse::<GroupType>(),
            Err(TypeParseError::ZeroExponent(_))
        ));
        assert_eq!("".parse::<GroupType>(), Err(TypeParseError::Empty));
        assert!(matches!(
            "2^".parse::<GroupType>(),
            Err(TypeParseError::MalformedTerm(_))
        ));
    }

    #[test]
    fn point_counts() {
        assert_eq!(t("2^9 5^2 11^2").point_count(), 50);
        assert_eq!(t("1^1").point_count(), 1);
        assert_eq!(t("3^8 6^1 12^1").point_count(), 42);
    }

    #[test]
    fn block_counts() {
        assert_eq!(t("2^6 5^2 11^2").block_count(), Ok(135));
        assert_eq!(t("1^4").block_count(), Ok(1));
        assert_eq!(t("2^3 11^4").block_count(), Ok(167));
        assert_eq!(t("2^9 5^2 11^2").block_count(), Ok(181));
        assert_eq!(t("2^6 5^1 11^3").block_count(), Ok(174));
        assert_eq!(t("3^8 6^1 12^1").block_count(), Ok(126));
        assert!(matches!(
            t("1^5").block_count(),
            Err(CountError::BlockCountIndivisible { .. })
        ));
    }

    #[test]
    fn replications() {
        assert_eq!(t("2^6 5^1 11^3").replication(11), Ok(13));
        assert_eq!(t("1^4").replication(1), Ok(1));
        assert_eq!(t("3^8 6^1 12^1").replication(12), Ok(10));
        assert_eq!(t("3^8 6^1 12^1").replication(3), Ok(13));
        assert_eq!(t("3^8 6^1 12^1").replication(6), Ok(12));
        assert!(matches!(
            t("2^4").replication(3),
            Err(CountError::SizeNotInType { .. })
        ));
        assert!(matches!(
            t("1^5").replication(1),
            Err(CountError::ReplicationIndivisible { .. })
        ));
    }

    #[test]
    fn block_count_ties_to_cross_pairs() {
        for s in ["2^6 5^2 11^2", "2^9 5^2 11^2", "2^6 5^1 11^3", "2^3 11^4"] {
            let ty = t(s);
            assert_eq!(ty.block_count().unwrap() * 6, ty.cross_pair_count());
        }
    }
}
