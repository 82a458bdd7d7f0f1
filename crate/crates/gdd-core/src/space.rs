//! Point spaces: the point families a cyclic shift acts on, plus blocks and
//! group layouts over those points.

use std::fmt;

use thiserror::Error;

use crate::group_type::GroupType;

/// How a family behaves under the shift action.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    /// Subscripted points `L0..L(p-1)`; shifts add to the subscript modulo p.
    Periodic { period: u32 },
    /// A single unsubscripted point that every shift fixes.
    Fixed,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Family {
    pub label: String,
    pub kind: FamilyKind,
}

impl Family {
    /// Number of points in the family (1 for fixed points).
    pub fn size(&self) -> u32 {
        match self.kind {
            FamilyKind::Periodic { period } => period,
            FamilyKind::Fixed => 1,
        }
    }
}

/// The set of points a construction lives on: a modulus n (the order of the
/// assumed cyclic shift group) and a list of labelled families.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointSpace {
    modulus: u32,
    families: Vec<Family>,
}

/// A point is a family plus a subscript (0 for fixed points). Ordering is by
/// family declaration position, then subscript.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Point {
    pub family: usize,
    pub index: u32,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SpaceError {
    #[error("modulus must be positive")]
    ZeroModulus,
    #[error("invalid family label `{0}` (letters and underscores only)")]
    BadFamilyLabel(String),
    #[error("invalid label `{0}`")]
    BadLabel(String),
    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),
    #[error("label `{fixed}` is ambiguous: it reads as point {index} of family `{family}`")]
    AmbiguousFixedLabel {
        fixed: String,
        family: String,
        index: u32,
    },
    #[error("period {period} of family `{label}` must be positive and divide the modulus {modulus}")]
    BadPeriod {
        label: String,
        period: u32,
        modulus: u32,
    },
}

fn is_family_label(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_alphabetic() || b == b'_')
}

fn is_fixed_label(s: &str) -> bool {
    let mut bytes = s.bytes();
    match bytes.next() {
        Some(b) if b.is_ascii_alphabetic() || b == b'_' => {}
        _ => return false,
    }
    bytes.all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

/// Splits a token into a trailing decimal subscript and its stem.
pub(crate) fn split_subscript(token: &str) -> Option<(&str, u32)> {
    let digits = token.len() - token.bytes().rev().take_while(u8::is_ascii_digit).count();
    if digits == token.len() {
        return None;
    }
    let (stem, tail) = token.split_at(digits);
    tail.parse().ok().map(|i| (stem, i))
}

impl PointSpace {
    pub fn new(modulus: u32) -> Result<Self, SpaceError> {
        if modulus == 0 {
            return Err(SpaceError::ZeroModulus);
        }
        Ok(PointSpace {
            modulus,
            families: Vec::new(),
        })
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn families(&self) -> &[Family] {
        &self.families
    }

    pub fn family(&self, id: usize) -> &Family {
        &self.families[id]
    }

    fn check_new_label(&self, label: &str) -> Result<(), SpaceError> {
        if self.families.iter().any(|f| f.label == label) {
            return Err(SpaceError::DuplicateLabel(label.to_string()));
        }
        Ok(())
    }

    /// Declares a periodic family; the period must divide the modulus.
    pub fn add_family(&mut self, label: &str, period: u32) -> Result<usize, SpaceError> {
        if !is_family_label(label) {
            return Err(SpaceError::BadFamilyLabel(label.to_string()));
        }
        self.check_new_label(label)?;
        if period == 0 || !self.modulus.is_multiple_of(period) {
            return Err(SpaceError::BadPeriod {
                label: label.to_string(),
                period,
                modulus: self.modulus,
            });
        }
        // A fixed point like `inf1` must not shadow a point of a new family `inf`.
        for f in &self.families {
            if f.kind == FamilyKind::Fixed {
                if let Some((stem, index)) = split_subscript(&f.label) {
                    if stem == label {
                        return Err(SpaceError::AmbiguousFixedLabel {
                            fixed: f.label.clone(),
                            family: label.to_string(),
                            index,
                        });
                    }
                }
            }
        }
        self.families.push(Family {
            label: label.to_string(),
            kind: FamilyKind::Periodic { period },
        });
        Ok(self.families.len() - 1)
    }

    /// Declares a fixed (infinite) point.
    pub fn add_fixed(&mut self, label: &str) -> Result<usize, SpaceError> {
        if !is_fixed_label(label) {
            return Err(SpaceError::BadLabel(label.to_string()));
        }
        self.check_new_label(label)?;
        if let Some((stem, index)) = split_subscript(label) {
            if let Some(f) = self.find_family(stem) {
                if matches!(self.families[f].kind, FamilyKind::Periodic { .. }) {
                    return Err(SpaceError::AmbiguousFixedLabel {
                        fixed: label.to_string(),
                        family: stem.to_string(),
                        index,
                    });
                }
            }
        }
        self.families.push(Family {
            label: label.to_string(),
            kind: FamilyKind::Fixed,
        });
        Ok(self.families.len() - 1)
    }

    pub fn find_family(&self, label: &str) -> Option<usize> {
        self.families.iter().position(|f| f.label == label)
    }

    /// Total number of points.
    pub fn point_count(&self) -> u32 {
        self.families.iter().map(Family::size).sum()
    }

    /// All points, in family declaration order then subscript order.
    pub fn points(&self) -> Vec<Point> {
        let mut out = Vec::with_capacity(self.point_count() as usize);
        for (family, f) in self.families.iter().enumerate() {
            for index in 0..f.size() {
                out.push(Point { family, index });
            }
        }
        out
    }

    /// Whether the point refers to a declared family with an in-range subscript.
    pub fn contains(&self, p: Point) -> bool {
        match self.families.get(p.family) {
            Some(f) => p.index < f.size(),
            None => false,
        }
    }

    /// Token form of a point: `a3` for periodic, bare label for fixed.
    pub fn point_name(&self, p: Point) -> String {
        let f = &self.families[p.family];
        match f.kind {
            FamilyKind::Periodic { .. } => format!("{}{}", f.label, p.index),
            FamilyKind::Fixed => f.label.clone(),
        }
    }

    /// Sort key used for canonical text output: label first, then subscript.
    pub fn display_key(&self, p: Point) -> (String, u32) {
        (self.families[p.family].label.clone(), p.index)
    }
}

/// A block: four pairwise distinct points, kept sorted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Block([Point; 4]);

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BlockError {
    #[error("block has a repeated point")]
    DuplicatePoint,
}

impl Block {
    pub fn new(mut points: [Point; 4]) -> Result<Self, BlockError> {
        points.sort_unstable();
        if points.windows(2).any(|w| w[0] == w[1]) {
            return Err(BlockError::DuplicatePoint);
        }
        Ok(Block(points))
    }

    pub fn points(&self) -> &[Point; 4] {
        &self.0
    }

    /// All six unordered point pairs of the block.
    pub fn pairs(&self) -> [(Point, Point); 6] {
        let p = &self.0;
        [
            (p[0], p[1]),
            (p[0], p[2]),
            (p[0], p[3]),
            (p[1], p[2]),
            (p[1], p[3]),
            (p[2], p[3]),
        ]
    }

    pub fn name(&self, space: &PointSpace) -> String {
        let mut names: Vec<String> = self.0.iter().map(|&p| space.point_name(p)).collect();
        names.sort_by_key(|n| sort_key_of_token(n));
        format!("{{{}}}", names.join(","))
    }
}

/// Sort key for a point token: stem, then numeric subscript.
pub(crate) fn sort_key_of_token(token: &str) -> (String, u64) {
    match split_subscript(token) {
        Some((stem, i)) => (stem.to_string(), u64::from(i)),
        None => (token.to_string(), u64::MAX),
    }
}

/// A partition of the point set into groups. Group order is as declared;
/// canonical serialization sorts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupLayout {
    groups: Vec<Vec<Point>>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LayoutError {
    #[error("group {group} contains unknown point")]
    UnknownPoint { group: usize },
    #[error("point `{point}` appears in more than one group")]
    Overlap { point: String },
    #[error("point `{point}` is not covered by any group")]
    Omitted { point: String },
    #[error("empty group")]
    EmptyGroup,
}

impl GroupLayout {
    pub fn new(groups: Vec<Vec<Point>>) -> Self {
        let mut groups = groups;
        for g in &mut groups {
            g.sort_unstable();
        }
        GroupLayout { groups }
    }

    pub fn groups(&self) -> &[Vec<Point>] {
        &self.groups
    }

    /// Checks the layout partitions the space: no unknown points, no overlap,
    /// no omission, no empty group.
    pub fn validate(&self, space: &PointSpace) -> Result<(), LayoutError> {
        let mut seen: std::collections::BTreeMap<Point, usize> = Default::default();
        for (gi, group) in self.groups.iter().enumerate() {
            if group.is_empty() {
                return Err(LayoutError::EmptyGroup);
            }
            for &p in group {
                if !space.contains(p) {
                    return Err(LayoutError::UnknownPoint { group: gi });
                }
                if seen.insert(p, gi).is_some() {
                    return Err(LayoutError::Overlap {
                        point: space.point_name(p),
                    });
                }
            }
        }
        for p in space.points() {
            if !seen.contains_key(&p) {
                return Err(LayoutError::Omitted {
                    point: space.point_name(p),
                });
            }
        }
        Ok(())
    }

    /// The group type this layout induces (multiset of group sizes).
    pub fn induced_type(&self) -> GroupType {
        GroupType::new(self.groups.iter().map(|g| g.len() as u32).collect())
            .expect("layout has at least one non-empty group")
    }

    /// Index of the group containing each point, for the given space.
    pub fn group_of(&self, space: &PointSpace) -> Vec<Option<usize>> {
        let points = space.points();
        let mut ids: std::collections::BTreeMap<Point, usize> = Default::default();
        for (i, p) in points.iter().enumerate() {
            ids.insert(*p, i);
        }
        let mut out = vec![None; points.len()];
        for (gi, group) in self.groups.iter().enumerate() {
            for &p in group {
                if let Some(&i) = ids.get(&p) {
                    out[i] = Some(gi);
                }
            }
        }
        out
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}:{}", self.family, self.index)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space_mod4() -> PointSpace {
        let mut s = PointSpace::new(4).unwrap();
        s.add_family("a", 4).unwrap();
        s.add_family("h", 2).unwrap();
        s.add_fixed("inf1").unwrap();
        s
    }

    #[test]
    fn period_must_divide_modulus() {
        let mut s = PointSpace::new(4).unwrap();
        assert!(matches!(
            s.add_family("x", 3),
            Err(SpaceError::BadPeriod { .. })
        ));
        assert!(s.add_family("x", 2).is_ok());
    }

    #[test]
    fn labels_are_checked() {
        let mut s = PointSpace::new(6).unwrap();
        s.add_family("a", 6).unwrap();
        assert!(matches!(
            s.add_family("a", 6),
            Err(SpaceError::DuplicateLabel(_))
        ));
        assert!(matches!(
            s.add_family("b2", 6),
            Err(SpaceError::BadFamilyLabel(_))
        ));
        // `a1` as a fixed label would shadow the point a1.
        assert!(matches!(
            s.add_fixed("a1"),
            Err(SpaceError::AmbiguousFixedLabel { .. })
        ));
        assert!(s.add_fixed("inf").is_ok());
    }

    #[test]
    fn fixed_then_family_collision() {
        let mut s = PointSpace::new(6).unwrap();
        s.add_fixed("inf1").unwrap();
        assert!(matches!(
            s.add_family("inf", 6),
            Err(SpaceError::AmbiguousFixedLabel { .. })
        ));
    }

    #[test]
    fn point_enumeration_and_names() {
        let s = space_mod4();
        let pts = s.points();
        assert_eq!(pts.len(), 7);
        assert_eq!(s.point_name(pts[0]), "a0");
        assert_eq!(s.point_name(pts[4]), "h0");
        assert_eq!(s.point_name(pts[6]), "inf1");
        assert_eq!(s.point_count(), 7);
    }

    #[test]
    fn block_rejects_duplicates() {
        let p = |family, index| Point { family, index };
        assert!(Block::new([p(0, 0), p(0, 0), p(1, 0), p(1, 1)]).is_err());
        let b = Block::new([p(1, 1), p(0, 0), p(1, 0), p(0, 3)]).unwrap();
        assert_eq!(b.points()[0], p(0, 0));
        assert_eq!(b.points()[3], p(1, 1));
    }

    #[test]
    fn layout_validation() {
        let s = space_mod4();
        let p = |family, index| Point { family, index };
        let full = GroupLayout::new(vec![
            vec![p(0, 0), p(0, 1), p(0, 2), p(0, 3)],
            vec![p(1, 0), p(1, 1)],
            vec![p(2, 0)],
        ]);
        assert!(full.validate(&s).is_ok());
        assert_eq!(full.induced_type().to_string(), "1^1 2^1 4^1");

        let missing = GroupLayout::new(vec![
            vec![p(0, 0), p(0, 1), p(0, 2), p(0, 3)],
            vec![p(1, 0), p(1, 1)],
        ]);
        assert!(matches!(
            missing.validate(&s),
            Err(LayoutError::Omitted { point }) if point == "inf1"
        ));

        let overlap = GroupLayout::new(vec![
            vec![p(0, 0), p(0, 1), p(0, 2), p(0, 3)],
            vec![p(1, 0), p(1, 1), p(0, 0)],
            vec![p(2, 0)],
        ]);
        assert!(matches!(
            overlap.validate(&s),
            Err(LayoutError::Overlap { point }) if point == "a0"
        ));
    }

    #[test]
    fn subscript_split() {
        assert_eq!(split_subscript("a10"), Some(("a", 10)));
        assert_eq!(split_subscript("inf"), None);
        assert_eq!(split_subscript("inf1"), Some(("inf", 1)));
        assert_eq!(split_subscript("123"), Some(("", 123)));
    }
}
