//! Line-oriented text formats for base-block systems (`gdd-system 1`) and
//! fully developed designs (`gdd-design 1`).
//!
//! Both formats are case-sensitive, treat `#` as a comment to end of line,
//! require the final line to end with a newline, and reject unknown
//! directives (the version header gates format evolution). The parser keeps
//! going after an error where it can, so a report lists every issue with
//! its line number.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::design::{DesignPoint, DevelopedDesign};
use crate::group_type::GroupType;
use crate::orbit::BaseBlockSystem;
use crate::space::{split_subscript, Block, FamilyKind, GroupLayout, Point, PointSpace};

pub const SYSTEM_HEADER: &str = "gdd-system 1";
pub const DESIGN_HEADER: &str = "gdd-design 1";

/// One parse problem, anchored to a 1-based line number (0 for document-wide
/// problems).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParseIssue {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ParseIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "{}", self.message)
        } else {
            write!(f, "line {}: {}", self.line, self.message)
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub struct ParseError {
    pub issues: Vec<ParseIssue>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} parse issue(s):", self.issues.len())?;
        for issue in &self.issues {
            writeln!(f, "  {issue}")?;
        }
        Ok(())
    }
}

struct Issues(Vec<ParseIssue>);

impl Issues {
    fn push(&mut self, line: usize, message: impl Into<String>) {
        self.0.push(ParseIssue {
            line,
            message: message.into(),
        });
    }
}

/// Strips comments and splits a document into (line number, tokens) rows.
/// Also checks the newline termination rule.
fn tokenize(text: &str, issues: &mut Issues) -> Vec<(usize, Vec<String>)> {
    if !text.is_empty() && !text.ends_with('\n') {
        issues.push(0, "final line must end with a newline");
    }
    let mut rows = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        let tokens: Vec<String> = line.split_whitespace().map(str::to_string).collect();
        if !tokens.is_empty() {
            rows.push((i + 1, tokens));
        }
    }
    rows
}

fn parse_u32(token: &str) -> Option<u32> {
    if token.is_empty() || !token.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    token.parse().ok()
}

/// Raw directive rows of a system document, before resolution.
struct SystemLines {
    modulus: Option<(usize, u32)>,
    families: Vec<(usize, String, u32)>,
    fixed: Vec<(usize, String)>,
    claimed_type: Option<(usize, GroupType)>,
    groups: Vec<(usize, Vec<String>)>,
    bases: Vec<(usize, Vec<String>)>,
    orbits: Option<(usize, Vec<u32>)>,
}

/// Parses a base-block system document. All problems found are returned
/// together, each with its line number.
pub fn parse_system(text: &str) -> Result<BaseBlockSystem, ParseError> {
    let mut issues = Issues(Vec::new());
    let rows = tokenize(text, &mut issues);

    let mut rows_iter = rows.into_iter();
    match rows_iter.next() {
        Some((line, tokens)) if tokens.join(" ") == SYSTEM_HEADER => {
            debug_assert_eq!(line, 1);
        }
        _ => {
            issues.push(1, format!("first line must be `{SYSTEM_HEADER}`"));
            return Err(ParseError { issues: issues.0 });
        }
    }

    let mut lines = SystemLines {
        modulus: None,
        families: Vec::new(),
        fixed: Vec::new(),
        claimed_type: None,
        groups: Vec::new(),
        bases: Vec::new(),
        orbits: None,
    };

    for (ln, tokens) in rows_iter {
        match tokens[0].as_str() {
            "modulus" => {
                if lines.modulus.is_some() {
                    issues.push(ln, "duplicate `modulus` line");
                } else if tokens.len() != 2 {
                    issues.push(ln, "`modulus` takes exactly one value");
                } else {
                    match parse_u32(&tokens[1]) {
                        Some(n) if n >= 1 => lines.modulus = Some((ln, n)),
                        _ => issues.push(ln, format!("invalid modulus `{}`", tokens[1])),
                    }
                }
            }
            "family" => {
                if tokens.len() != 3 {
                    issues.push(ln, "`family` takes a label and a period");
                } else {
                    match parse_u32(&tokens[2]) {
                        Some(p) => lines.families.push((ln, tokens[1].clone(), p)),
                        None => issues.push(ln, format!("invalid period `{}`", tokens[2])),
                    }
                }
            }
            "fixed" => {
                if tokens.len() != 2 {
                    issues.push(ln, "`fixed` takes exactly one label");
                } else {
                    lines.fixed.push((ln, tokens[1].clone()));
                }
            }
            "type" => {
                if lines.claimed_type.is_some() {
                    issues.push(ln, "duplicate `type` line");
                } else {
                    match tokens[1..].join(" ").parse::<GroupType>() {
                        Ok(t) => lines.claimed_type = Some((ln, t)),
                        Err(e) => issues.push(ln, format!("invalid type: {e}")),
                    }
                }
            }
            "group" => lines.groups.push((ln, tokens[1..].to_vec())),
            "base" => lines.bases.push((ln, tokens[1..].to_vec())),
            "orbits" => {
                if lines.orbits.is_some() {
                    issues.push(ln, "duplicate `orbits` line");
                } else {
                    let mut lengths = Vec::new();
                    let mut ok = true;
                    for t in &tokens[1..] {
                        match parse_u32(t) {
                            Some(d) if d >= 1 => lengths.push(d),
                            _ => {
                                issues.push(ln, format!("invalid orbit length `{t}`"));
                                ok = false;
                            }
                        }
                    }
                    if ok {
                        lines.orbits = Some((ln, lengths));
                    }
                }
            }
            other => issues.push(ln, format!("unknown directive `{other}`")),
        }
    }

    let modulus = match lines.modulus {
        Some((_, n)) => n,
        None => {
            issues.push(0, "missing `modulus` line");
            return Err(ParseError { issues: issues.0 });
        }
    };

    let mut space = PointSpace::new(modulus).expect("modulus checked positive");
    for (ln, label, period) in &lines.families {
        if let Err(e) = space.add_family(label, *period) {
            issues.push(*ln, e.to_string());
        }
    }
    for (ln, label) in &lines.fixed {
        if let Err(e) = space.add_fixed(label) {
            issues.push(*ln, e.to_string());
        }
    }
    if space.point_count() == 0 {
        issues.push(0, "the document declares no points");
        return Err(ParseError { issues: issues.0 });
    }

    let resolve = |token: &str, ln: usize, issues: &mut Issues| -> Option<Point> {
        resolve_token(&space, token, ln, issues)
    };

    let mut groups: Vec<Vec<Point>> = Vec::new();
    for (ln, tokens) in &lines.groups {
        if tokens.is_empty() {
            issues.push(*ln, "`group` needs at least one point");
            continue;
        }
        let mut group = Vec::new();
        for t in tokens {
            if let Some(p) = resolve(t, *ln, &mut issues) {
                if group.contains(&p) {
                    issues.push(*ln, format!("duplicate point `{t}` in group"));
                } else {
                    group.push(p);
                }
            }
        }
        groups.push(group);
    }

    let mut bases: Vec<Block> = Vec::new();
    for (ln, tokens) in &lines.bases {
        if tokens.len() != 4 {
            issues.push(
                *ln,
                format!("base block must have 4 points, found {}", tokens.len()),
            );
            continue;
        }
        let mut points = Vec::with_capacity(4);
        for t in tokens {
            if let Some(p) = resolve(t, *ln, &mut issues) {
                points.push(p);
            }
        }
        if points.len() == 4 {
            match Block::new([points[0], points[1], points[2], points[3]]) {
                Ok(b) => bases.push(b),
                Err(_) => issues.push(*ln, "duplicate point in base block"),
            }
        }
    }

    // The groups must partition the whole point set.
    let mut seen: BTreeMap<Point, usize> = BTreeMap::new();
    for (gi, group) in groups.iter().enumerate() {
        for &p in group {
            if let Some(first) = seen.insert(p, gi) {
                if first != gi {
                    issues.push(
                        0,
                        format!("point `{}` appears in more than one group", space.point_name(p)),
                    );
                }
            }
        }
    }
    for p in space.points() {
        if !seen.contains_key(&p) {
            issues.push(
                0,
                format!("point `{}` is not covered by any group", space.point_name(p)),
            );
        }
    }

    let declared_orbits = match lines.orbits {
        Some((ln, lengths)) => {
            if lengths.len() != lines.bases.len() {
                issues.push(
                    ln,
                    format!(
                        "`orbits` lists {} lengths but there are {} base blocks",
                        lengths.len(),
                        lines.bases.len()
                    ),
                );
                None
            } else {
                Some(lengths)
            }
        }
        None => None,
    };

    if !issues.0.is_empty() {
        return Err(ParseError { issues: issues.0 });
    }

    Ok(BaseBlockSystem {
        name: String::new(),
        space,
        layout: GroupLayout::new(groups),
        claimed_type: lines.claimed_type.map(|(_, t)| t),
        base_blocks: bases,
        declared_orbits,
    })
}

fn resolve_token(space: &PointSpace, token: &str, ln: usize, issues: &mut Issues) -> Option<Point> {
    // Fixed labels match verbatim and win over family-plus-subscript reads.
    if let Some(f) = space.find_family(token) {
        match space.family(f).kind {
            FamilyKind::Fixed => return Some(Point { family: f, index: 0 }),
            FamilyKind::Periodic { .. } => {
                issues.push(
                    ln,
                    format!("`{token}` names a periodic family and needs a subscript"),
                );
                return None;
            }
        }
    }
    match split_subscript(token) {
        Some((stem, index)) if !stem.is_empty() => match space.find_family(stem) {
            Some(f) => match space.family(f).kind {
                FamilyKind::Periodic { period } => {
                    if index < period {
                        Some(Point { family: f, index })
                    } else {
                        issues.push(
                            ln,
                            format!(
                                "subscript out of range: `{token}` (family `{stem}` has period {period})"
                            ),
                        );
                        None
                    }
                }
                FamilyKind::Fixed => {
                    issues.push(ln, format!("`{stem}` is a fixed point and takes no subscript"));
                    None
                }
            },
            None => {
                issues.push(ln, format!("unknown family `{stem}` in point `{token}`"));
                None
            }
        },
        _ => {
            issues.push(ln, format!("unknown point `{token}`"));
            None
        }
    }
}

/// Canonical text form of a system: sorted family and fixed declarations,
/// groups sorted by their least point, base blocks in declared order.
pub fn serialize_system(system: &BaseBlockSystem) -> String {
    let space = &system.space;
    let mut out = String::new();
    out.push_str(SYSTEM_HEADER);
    out.push('\n');
    out.push_str(&format!("modulus {}\n", space.modulus()));

    let mut periodic: Vec<(&str, u32)> = Vec::new();
    let mut fixed: Vec<&str> = Vec::new();
    for f in space.families() {
        match f.kind {
            FamilyKind::Periodic { period } => periodic.push((&f.label, period)),
            FamilyKind::Fixed => fixed.push(&f.label),
        }
    }
    periodic.sort();
    fixed.sort();
    for (label, period) in periodic {
        out.push_str(&format!("family {label} {period}\n"));
    }
    for label in fixed {
        out.push_str(&format!("fixed {label}\n"));
    }
    if let Some(t) = &system.claimed_type {
        out.push_str(&format!("type {t}\n"));
    }

    let mut group_lines: Vec<Vec<(String, u32)>> = system
        .layout
        .groups()
        .iter()
        .map(|g| {
            let mut keys: Vec<(String, u32)> = g.iter().map(|&p| space.display_key(p)).collect();
            keys.sort();
            keys
        })
        .collect();
    group_lines.sort();
    for keys in group_lines {
        let names: Vec<String> = keys.iter().map(|k| key_name(space, k)).collect();
        out.push_str(&format!("group {}\n", names.join(" ")));
    }

    for block in &system.base_blocks {
        let mut keys: Vec<(String, u32)> =
            block.points().iter().map(|&p| space.display_key(p)).collect();
        keys.sort();
        let names: Vec<String> = keys.iter().map(|k| key_name(space, k)).collect();
        out.push_str(&format!("base {}\n", names.join(" ")));
    }

    if let Some(orbits) = &system.declared_orbits {
        let text: Vec<String> = orbits.iter().map(u32::to_string).collect();
        out.push_str(&format!("orbits {}\n", text.join(" ")));
    }
    out
}

fn key_name(space: &PointSpace, key: &(String, u32)) -> String {
    let f = space
        .find_family(&key.0)
        .expect("display key comes from the space");
    match space.family(f).kind {
        FamilyKind::Periodic { .. } => format!("{}{}", key.0, key.1),
        FamilyKind::Fixed => key.0.clone(),
    }
}

/// Parses a developed design document: explicit `point` declarations, a
/// `group` partition and 4-point `block` lines.
pub fn parse_design(text: &str) -> Result<DevelopedDesign, ParseError> {
    let mut issues = Issues(Vec::new());
    let rows = tokenize(text, &mut issues);

    let mut rows_iter = rows.into_iter();
    match rows_iter.next() {
        Some((_, tokens)) if tokens.join(" ") == DESIGN_HEADER => {}
        _ => {
            issues.push(1, format!("first line must be `{DESIGN_HEADER}`"));
            return Err(ParseError { issues: issues.0 });
        }
    }

    let mut points: Vec<DesignPoint> = Vec::new();
    let mut ids: BTreeMap<DesignPoint, usize> = BTreeMap::new();
    let mut group_rows: Vec<(usize, Vec<String>)> = Vec::new();
    let mut block_rows: Vec<(usize, Vec<String>)> = Vec::new();

    for (ln, tokens) in rows_iter {
        match tokens[0].as_str() {
            "point" => {
                if tokens.len() != 2 {
                    issues.push(ln, "`point` takes exactly one token");
                    continue;
                }
                if !valid_point_token(&tokens[1]) {
                    issues.push(ln, format!("invalid point token `{}`", tokens[1]));
                    continue;
                }
                let p = DesignPoint::from_token(&tokens[1]);
                if ids.contains_key(&p) {
                    issues.push(ln, format!("duplicate point `{}`", tokens[1]));
                } else {
                    ids.insert(p.clone(), points.len());
                    points.push(p);
                }
            }
            "group" => group_rows.push((ln, tokens[1..].to_vec())),
            "block" => block_rows.push((ln, tokens[1..].to_vec())),
            other => issues.push(ln, format!("unknown directive `{other}`")),
        }
    }

    if points.is_empty() {
        issues.push(0, "the document declares no points");
        return Err(ParseError { issues: issues.0 });
    }

    let lookup = |token: &str, ln: usize, issues: &mut Issues| -> Option<usize> {
        match ids.get(&DesignPoint::from_token(token)) {
            Some(&i) => Some(i),
            None => {
                issues.push(ln, format!("undeclared point `{token}`"));
                None
            }
        }
    };

    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (ln, tokens) in &group_rows {
        if tokens.is_empty() {
            issues.push(*ln, "`group` needs at least one point");
            continue;
        }
        let mut group = Vec::new();
        for t in tokens {
            if let Some(i) = lookup(t, *ln, &mut issues) {
                if group.contains(&i) {
                    issues.push(*ln, format!("duplicate point `{t}` in group"));
                } else {
                    group.push(i);
                }
            }
        }
        group.sort_unstable();
        groups.push(group);
    }

    let mut blocks: Vec<[usize; 4]> = Vec::new();
    for (ln, tokens) in &block_rows {
        if tokens.len() != 4 {
            issues.push(
                *ln,
                format!("block must have 4 points, found {}", tokens.len()),
            );
            continue;
        }
        let mut resolved = Vec::with_capacity(4);
        for t in tokens {
            if let Some(i) = lookup(t, *ln, &mut issues) {
                resolved.push(i);
            }
        }
        if resolved.len() == 4 {
            let mut b = [resolved[0], resolved[1], resolved[2], resolved[3]];
            b.sort_unstable();
            if b.windows(2).any(|w| w[0] == w[1]) {
                issues.push(*ln, "duplicate point in block");
            } else {
                blocks.push(b);
            }
        }
    }

    let mut seen = vec![false; points.len()];
    for group in &groups {
        for &p in group {
            if seen[p] {
                issues.push(
                    0,
                    format!("point `{}` appears in more than one group", points[p]),
                );
            }
            seen[p] = true;
        }
    }
    for (i, covered) in seen.iter().enumerate() {
        if !covered {
            issues.push(0, format!("point `{}` is not covered by any group", points[i]));
        }
    }

    if !issues.0.is_empty() {
        return Err(ParseError { issues: issues.0 });
    }

    Ok(DevelopedDesign {
        points,
        groups,
        blocks,
    })
}

fn valid_point_token(token: &str) -> bool {
    let stem_len = token.len() - token.bytes().rev().take_while(u8::is_ascii_digit).count();
    let stem = &token[..stem_len];
    !stem.is_empty()
        && stem
            .bytes()
            .all(|b| b.is_ascii_alphabetic() || b == b'_')
}

/// Canonical text form of a design: points sorted by label then subscript,
/// groups sorted by least point, blocks in declared order.
pub fn serialize_design(design: &DevelopedDesign) -> String {
    let mut order: Vec<usize> = (0..design.points.len()).collect();
    order.sort_by_key(|&i| design.points[i].sort_key());

    let mut out = String::new();
    out.push_str(DESIGN_HEADER);
    out.push('\n');
    for &i in &order {
        out.push_str(&format!("point {}\n", design.points[i]));
    }

    let mut group_lines: Vec<Vec<(String, u64)>> = design
        .groups
        .iter()
        .map(|g| {
            let mut keys: Vec<(String, u64)> =
                g.iter().map(|&i| design.points[i].sort_key()).collect();
            keys.sort();
            keys
        })
        .collect();
    group_lines.sort();
    for keys in &group_lines {
        let names: Vec<String> = keys.iter().map(|(l, i)| render_key(l, *i)).collect();
        out.push_str(&format!("group {}\n", names.join(" ")));
    }

    for block in &design.blocks {
        let mut keys: Vec<(String, u64)> =
            block.iter().map(|&i| design.points[i].sort_key()).collect();
        keys.sort();
        let names: Vec<String> = keys.iter().map(|(l, i)| render_key(l, *i)).collect();
        out.push_str(&format!("block {}\n", names.join(" ")));
    }
    out
}

fn render_key(label: &str, index: u64) -> String {
    if index == u64::MAX {
        label.to_string()
    } else {
        format!("{label}{index}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "\
gdd-system 1
modulus 4
family a 4
family h 2
fixed inf
type 1^1 2^1 4^1
group a0 a1 a2 a3
group h0 h1
group inf
base a0 a1 h0 inf
orbits 4
";

    #[test]
    fn system_round_trip_is_byte_identical() {
        let system = parse_system(SMALL).unwrap();
        assert_eq!(serialize_system(&system), SMALL);
        assert_eq!(system.space.modulus(), 4);
        assert_eq!(system.base_blocks.len(), 1);
        assert_eq!(system.claimed_type.as_ref().unwrap().to_string(), "1^1 2^1 4^1");
        assert_eq!(system.declared_orbits, Some(vec![4]));
    }

    #[test]
    fn missing_newline_is_an_error() {
        let doc = SMALL.trim_end();
        let err = parse_system(doc).unwrap_err();
        assert!(err
            .issues
            .iter()
            .any(|i| i.message.contains("end with a newline")));
    }

    #[test]
    fn duplicate_point_in_base_block() {
        let doc = SMALL.replace("base a0 a1 h0 inf", "base a0 a0 h0 inf");
        let err = parse_system(&doc).unwrap_err();
        assert!(err
            .issues
            .iter()
            .any(|i| i.message.contains("duplicate point in base block")));
    }

    #[test]
    fn group_omission_names_the_orphan() {
        let doc = SMALL.replace("group a0 a1 a2 a3\n", "group a0 a1 a2\n");
        let err = parse_system(&doc).unwrap_err();
        assert!(err
            .issues
            .iter()
            .any(|i| i.message.contains("`a3` is not covered")));
    }

    #[test]
    fn unknown_family_and_out_of_range_subscript() {
        let doc = SMALL
            .replace("base a0 a1 h0 inf", "base a0 t1 h2 inf");
        let err = parse_system(&doc).unwrap_err();
        assert!(err
            .issues
            .iter()
            .any(|i| i.message.contains("unknown family `t`")));
        assert!(err
            .issues
            .iter()
            .any(|i| i.message.contains("subscript out of range: `h2`")));
    }

    #[test]
    fn period_must_divide_modulus() {
        let doc = SMALL.replace("family h 2", "family h 3");
        let err = parse_system(&doc).unwrap_err();
        assert!(err.issues.iter().any(|i| i.message.contains("period 3")));
    }

    #[test]
    fn unknown_directive_is_rejected() {
        let doc = format!("{SMALL}weight 3\n");
        let err = parse_system(&doc).unwrap_err();
        assert!(err
            .issues
            .iter()
            .any(|i| i.message.contains("unknown directive `weight`")));
    }

    #[test]
    fn orbits_must_align_with_base_blocks() {
        let doc = SMALL.replace("orbits 4", "orbits 4 2");
        let err = parse_system(&doc).unwrap_err();
        assert!(err.issues.iter().any(|i| i.message.contains("2 lengths")));
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let doc = SMALL.replace(
            "family a 4",
            "family a 4   # the main family\n\n# free-standing comment",
        );
        assert!(parse_system(&doc).is_ok());
    }

    const DESIGN: &str = "\
gdd-design 1
point a0
point a1
point b0
point b1
group a0 a1
group b0
group b1
block a0 a1 b0 b1
";

    #[test]
    fn design_round_trip() {
        let design = parse_design(DESIGN).unwrap();
        assert_eq!(serialize_design(&design), DESIGN);
        assert_eq!(design.points.len(), 4);
        assert_eq!(design.blocks.len(), 1);
    }

    #[test]
    fn design_block_needs_four_points() {
        let doc = DESIGN.replace("block a0 a1 b0 b1", "block a0 a1 b0");
        let err = parse_design(&doc).unwrap_err();
        assert!(err
            .issues
            .iter()
            .any(|i| i.message.contains("4 points, found 3")));
    }

    #[test]
    fn design_empty_blocks_section_parses() {
        let doc = DESIGN.replace("block a0 a1 b0 b1\n", "");
        let design = parse_design(&doc).unwrap();
        assert!(design.blocks.is_empty());
    }

    #[test]
    fn design_undeclared_point() {
        let doc = DESIGN.replace("block a0 a1 b0 b1", "block a0 a1 b0 c0");
        let err = parse_design(&doc).unwrap_err();
        assert!(err
            .issues
            .iter()
            .any(|i| i.message.contains("undeclared point `c0`")));
    }
}
