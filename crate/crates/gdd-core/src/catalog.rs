//! The built-in catalog: five reference constructions stored as system
//! documents, exactly as printed in their source tables.
//!
//! The four lemma entries parse, develop and verify. The example1 entry is
//! kept as printed even though its base blocks are inconsistent with its
//! point declarations; verifying it surfaces those inconsistencies instead
//! of guessing a repair.

use thiserror::Error;

use crate::format::{parse_system, ParseError, ParseIssue};
use crate::orbit::{BaseBlockSystem, DevelopError};
use crate::verify::{verify_system, VerificationReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum EntryStatus {
    /// Develops into a design that passes verification.
    Verified,
    /// Stored as printed but known to be internally inconsistent.
    Erratum,
}

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub claimed_type: &'static str,
    pub status: EntryStatus,
    pub modulus: u32,
    pub base_block_count: usize,
    pub notes: &'static str,
    pub document: &'static str,
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown catalog entry `{0}`")]
pub struct UnknownEntry(pub String);

/// Outcome of checking a catalog entry. Entries whose documents do not even
/// elaborate into a system report their transcription issues instead of a
/// design-level report.
#[derive(Debug)]
pub enum EntryVerification {
    Report(Box<VerificationReport>),
    Transcription(Vec<ParseIssue>),
    Develop(DevelopError),
}

impl EntryVerification {
    pub fn is_valid(&self) -> bool {
        match self {
            EntryVerification::Report(r) => r.is_valid(),
            _ => false,
        }
    }
}

impl CatalogEntry {
    /// Parses the stored document. Fails for erratum entries.
    pub fn system(&self) -> Result<BaseBlockSystem, ParseError> {
        let mut system = parse_system(self.document)?;
        system.name = self.name.to_string();
        Ok(system)
    }

    /// Full check of the entry: parse, develop, verify.
    pub fn verify(&self) -> EntryVerification {
        match self.system() {
            Ok(system) => match verify_system(&system) {
                Ok(report) => EntryVerification::Report(Box::new(report)),
                Err(e) => EntryVerification::Develop(e),
            },
            Err(e) => EntryVerification::Transcription(e.issues),
        }
    }
}

/// All entries, in a fixed order.
pub fn entries() -> &'static [CatalogEntry] {
    &ENTRIES
}

pub fn get(name: &str) -> Result<&'static CatalogEntry, UnknownEntry> {
    ENTRIES
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| UnknownEntry(name.to_string()))
}

static ENTRIES: [CatalogEntry; 5] = [
    CatalogEntry {
        name: "example1",
        claimed_type: "3^8 6^1 12^1",
        status: EntryStatus::Erratum,
        modulus: 6,
        base_block_count: 22,
        notes: "Stored as printed. The base blocks use families t and u that the point \
declarations do not include, while the declared families r and z never appear in any base \
block; subscripts p3, p4 and p5 fall outside the declared range of family p (subscripts \
modulo 3), and reducing them modulo 3 would collapse the first base block to three points. \
Candidate readings - t as r and u as z, or p subscripted modulo 6 with a reinterpreted \
size-6 group - are deliberately not applied; edit an emitted copy of this entry to \
experiment with an interpretation. The as-printed orbit lengths cover only the first \
column (3 and 3); the remaining blocks are recorded with full orbits.",
        document: EXAMPLE1,
    },
    CatalogEntry {
        name: "lemma1",
        claimed_type: "2^6 5^2 11^2",
        status: EntryStatus::Verified,
        modulus: 4,
        base_block_count: 35,
        notes: "Transcribed as printed. Develops modulo 4 into 135 blocks; the declared \
orbit lengths are 1 for the first base block, 2 for the second and 4 for the rest.",
        document: LEMMA1,
    },
    CatalogEntry {
        name: "lemma2",
        claimed_type: "2^9 5^2 11^2",
        status: EntryStatus::Verified,
        modulus: 4,
        base_block_count: 48,
        notes: "Transcribed as printed. Develops modulo 4 into 181 blocks; the declared \
orbit lengths are 1 for the first base block, 2 for the next four and 4 for the rest.",
        document: LEMMA2,
    },
    CatalogEntry {
        name: "lemma3",
        claimed_type: "2^6 5^1 11^3",
        status: EntryStatus::Verified,
        modulus: 6,
        base_block_count: 32,
        notes: "Transcribed as printed. Develops modulo 6 into 174 blocks; the declared \
orbit lengths are 2 for the first three base blocks, 3 for the next two and 6 for the rest.",
        document: LEMMA3,
    },
    CatalogEntry {
        name: "lemma4",
        claimed_type: "2^3 11^4",
        status: EntryStatus::Verified,
        modulus: 6,
        base_block_count: 30,
        notes: "Transcribed as printed. Develops modulo 6 into 167 blocks; the declared \
orbit lengths are 2 for the first two base blocks, 1 for the third and 6 for the rest.",
        document: LEMMA4,
    },
];

static EXAMPLE1: &str = "\
gdd-system 1
modulus 6
family a 6
family b 6
family p 3
family q 6
family r 6
family y 6
family z 6
fixed inf1
fixed inf2
fixed inf3
type 3^8 6^1 12^1
group a0 a1 a2 a3 a4 a5 b0 b1 b2 b3 b4 b5
group inf1 inf2 inf3 p0 p1 p2
group q0 q2 q4
group q1 q3 q5
group r0 r2 r4
group r1 r3 r5
group y0 y2 y4
group y1 y3 y5
group z0 z2 z4
group z1 z3 z5
base p0 p3 q0 q3
base t0 t3 u0 u3
base a0 p0 p1 y0
base a0 p2 q0 t0
base a0 p3 q2 u0
base a0 inf1 p4 t1
base a0 p5 t4 u3
base a0 inf3 q3 u5
base a0 q1 t3 u1
base a0 q4 t5 y2
base a0 q5 u2 y1
base a0 inf2 t2 u4
base b0 p4 q5 u0
base b0 inf2 p0 q2
base b0 p2 u3 y0
base b0 p1 t1 t2
base b0 inf3 p3 t5
base b0 p5 u4 u5
base b0 q0 q1 t4
base b0 q4 t3 y1
base b0 inf1 q3 u2
base b0 t0 u1 y2
orbits 3 3 6 6 6 6 6 6 6 6 6 6 6 6 6 6 6 6 6 6 6 6
";

static LEMMA1: &str = "\
gdd-system 1
modulus 4
family a 4
family b 4
family c 4
family f 4
family g 4
family h 2
family p 4
family q 4
family r 4
family s 4
family t 4
family u 2
type 2^6 5^2 11^2
group a0 b0
group a1 b1
group a2 b2
group a3 b3
group c0 c2
group c1 c3
group f0 f2 g0 g2 h0
group f1 f3 g1 g3 h1
group p0 p2 q0 q2 r0 r2 s0 s2 t0 t2 u0
group p1 p3 q1 q3 r1 r3 s1 s3 t1 t3 u1
base h0 h1 u0 u1
base a0 a2 b1 b3
base a0 a1 p0 r1
base a0 b2 c0 h0
base a0 c1 f1 g0
base a0 c2 p1 p2
base a0 c3 s0 s3
base a0 f2 q2 q3
base a0 f3 s1 u0
base a0 f0 t2 t3
base a0 g1 q0 u1
base a0 g2 r3 s2
base a0 g3 r2 t1
base a0 h1 q1 t0
base b0 b1 q2 s1
base b0 c1 f0 g1
base b0 c3 p1 u0
base b0 c0 q0 r1
base b0 f1 p2 q3
base b0 f2 r2 r3
base b0 f3 t0 u1
base b0 g2 p0 s3
base b0 g3 p3 t2
base b0 g0 r0 t1
base b0 h1 s2 t3
base c0 c1 q3 t0
base c0 f2 q1 r0
base c0 f1 s2 t1
base c0 g2 p1 t2
base c0 g1 r3 u0
base c0 h1 r2 s3
base f0 f1 p3 s0
base f0 h1 p0 r3
base g0 g1 q2 s3
base g0 h1 p1 q0
orbits 1 2 4 4 4 4 4 4 4 4 4 4 4 4 4 4 4 4 4 4 4 4 4 4 4 4 4 4 4 4 4 4 4 4 4
";

static LEMMA2: &str = "\
gdd-system 1
modulus 4
family a 4
family b 4
family c 4
family d 4
family f 4
family g 4
family h 2
family p 4
family q 4
family r 4
family s 4
family t 4
family u 2
fixed inf1
fixed inf2
type 2^9 5^2 11^2
group a0 b0
group a1 b1
group a2 b2
group a3 b3
group c0 d0
group c1 d1
group c2 d2
group c3 d3
group f0 f2 g0 g2 h0
group f1 f3 g1 g3 h1
group inf1 inf2
group p0 p2 q0 q2 r0 r2 s0 s2 t0 t2 u0
group p1 p3 q1 q3 r1 r3 s1 s3 t1 t3 u1
base h0 h1 u0 u1
base a0 a2 inf1 u0
base b0 b2 inf2 u1
base c0 c2 h0 inf2
base d0 d2 h1 inf1
base a0 a1 c0 g0
base a0 b1 f0 h1
base a0 b2 p1 s0
base a0 b3 q0 t1
base a0 c1 r0 s1
base a0 c2 r2 u1
base a0 d1 f1 g2
base a0 d0 f3 p3
base a0 d3 p0 q1
base a0 d2 t0 t3
base a0 f2 r3 t2
base a0 g1 p2 r1
base a0 h0 q2 s3
base a0 inf2 q3 s2
base b0 b1 c0 p1
base b0 c1 d0 t0
base b0 c2 g0 s0
base b0 d1 d2 s1
base b0 d3 r1 r2
base b0 f1 q0 q3
base b0 f0 r0 s3
base b0 f2 inf1 t3
base b0 g2 g3 q2
base b0 g1 t1 u0
base b0 h1 p2 r3
base c0 c1 f0 q0
base c0 d2 g1 r2
base c0 d1 q1 t0
base c0 f2 p0 p3
base c0 f1 s1 u0
base c0 g3 p2 t1
base c0 h1 s3 t2
base c0 inf1 q2 r1
base d0 f1 p0 u1
base d0 f2 inf2 r1
base d0 g2 q3 u0
base d0 g0 s1 s2
base d0 h0 p2 q1
base f0 f1 s2 t3
base f0 g3 q1 r2
base g0 h1 r2 t3
base g0 inf1 p2 s3
base g0 inf2 p0 t1
orbits 1 2 2 2 2 4 4 4 4 4 4 4 4 4 4 4 4 4 4 4 4 4 4 4 4 4 4 4 4 4 4 4 4 4 4 4 4 4 4 4 4 4 4 4 4 4 4 4
";

static LEMMA3: &str = "\
gdd-system 1
modulus 6
family a 6
family b 6
family c 6
family d 6
family e 6
family f 3
family p 2
family q 2
family s 6
family t 6
fixed inf
type 2^6 5^1 11^3
group a0 a3 b0 b3 c0 c3 d0 d3 e0 e3 f0
group a1 a4 b1 b4 c1 c4 d1 d4 e1 e4 f1
group a2 a5 b2 b5 c2 c5 d2 d5 e2 e5 f2
group inf p0 p1 q0 q1
group s0 t0
group s1 t1
group s2 t2
group s3 t3
group s4 t4
group s5 t5
base c0 c2 c4 q0
base e0 e2 e4 q0
base q0 s0 s2 s4
base f0 f1 t0 t3
base f0 inf s0 s3
base a0 a1 c2 s0
base a0 a2 d1 t0
base a0 b1 c5 s4
base a0 b4 d2 s2
base a0 b2 e1 p0
base a0 b5 inf t3
base a0 c4 p1 s1
base a0 d4 f2 q0
base a0 e5 f1 s3
base a0 e2 q1 t2
base a0 e4 t1 t5
base b0 b1 d2 q1
base b0 b2 s1 t5
base b0 c1 e2 s2
base b0 c5 f1 p1
base b0 c2 t1 t2
base b0 d5 e4 t0
base b0 e1 f2 s0
base c0 c1 e5 t4
base c0 d1 d5 s0
base c0 d4 e2 inf
base c0 d2 f1 t2
base c0 q1 s2 t1
base d0 d1 p0 t3
base d0 e1 e2 s4
base d0 s2 s3 t4
base e0 p0 s1 t4
orbits 2 2 2 3 3 6 6 6 6 6 6 6 6 6 6 6 6 6 6 6 6 6 6 6 6 6 6 6 6 6 6 6
";

static LEMMA4: &str = "\
gdd-system 1
modulus 6
family a 6
family b 6
family c 6
family d 6
family e 6
family f 3
family p 2
family q 2
family r 6
family t 6
fixed inf
type 2^3 11^4
group a0 a3 b0 b3 c0 c3 d0 d3 e0 e3 f0
group a1 a4 b1 b4 c1 c4 d1 d4 e1 e4 f1
group a2 a5 b2 b5 c2 c5 d2 d5 e2 e5 f2
group inf p0 p1 q0 q1 r0 r1 r2 r3 r4 r5
group t0 t3
group t1 t4
group t2 t5
base a0 a2 a4 p0
base c0 c2 c4 q0
base f0 f1 f2 inf
base a0 a1 c2 r0
base a0 b1 d2 p1
base a0 b2 d1 q0
base a0 b5 e1 t0
base a0 b4 inf t4
base a0 c5 e4 r2
base a0 c4 f2 t2
base a0 d4 e2 r3
base a0 d5 q1 t5
base a0 e5 f1 r4
base a0 r1 t1 t3
base b0 b2 d4 r2
base b0 b1 f2 r4
base b0 c4 e5 q1
base b0 c2 e4 r1
base b0 c1 p1 t3
base b0 c5 r5 t2
base b0 e1 t4 t5
base c0 c1 r2 t0
base c0 d4 d5 t1
base c0 d2 e4 inf
base c0 d1 f2 p1
base d0 d2 r2 t1
base d0 e1 e5 r1
base d0 f2 r3 t4
base e0 e1 p0 t1
base e0 f1 q1 t2
orbits 2 2 1 6 6 6 6 6 6 6 6 6 6 6 6 6 6 6 6 6 6 6 6 6 6 6 6 6 6 6
";

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entry_lookup() {
        assert_eq!(entries().len(), 5);
        assert_eq!(get("lemma1").unwrap().claimed_type, "2^6 5^2 11^2");
        assert!(get("nosuch").is_err());
    }

    #[test]
    fn stored_metadata_matches_documents() {
        for entry in entries() {
            let base_lines = entry
                .document
                .lines()
                .filter(|l| l.starts_with("base "))
                .count();
            assert_eq!(base_lines, entry.base_block_count, "{}", entry.name);
            let modulus_line = format!("modulus {}", entry.modulus);
            assert!(entry.document.contains(&modulus_line), "{}", entry.name);
            let type_line = format!("type {}", entry.claimed_type);
            assert!(entry.document.contains(&type_line), "{}", entry.name);
        }
    }

    #[test]
    fn lemma_documents_parse() {
        for name in ["lemma1", "lemma2", "lemma3", "lemma4"] {
            let entry = get(name).unwrap();
            let system = entry.system().unwrap();
            assert_eq!(system.base_blocks.len(), entry.base_block_count);
            assert_eq!(
                system.claimed_type.as_ref().unwrap().to_string(),
                entry.claimed_type
            );
        }
    }

    #[test]
    fn example1_reports_transcription_issues() {
        let entry = get("example1").unwrap();
        let err = entry.system().unwrap_err();
        let text: Vec<String> = err.issues.iter().map(|i| i.to_string()).collect();
        assert!(text.iter().any(|m| m.contains("unknown family `t`")));
        assert!(text.iter().any(|m| m.contains("unknown family `u`")));
        for bad in ["`p3`", "`p4`", "`p5`"] {
            assert!(
                text.iter()
                    .any(|m| m.contains("subscript out of range") && m.contains(bad)),
                "missing out-of-range issue for {bad}: {text:?}"
            );
        }
        match entry.verify() {
            EntryVerification::Transcription(issues) => assert!(!issues.is_empty()),
            other => panic!("expected transcription issues, got {other:?}"),
        }
    }

    #[test]
    fn lemma3_size_five_group_is_p_q_inf() {
        let entry = get("lemma3").unwrap();
        let system = entry.system().unwrap();
        let space = &system.space;
        let mut five: Vec<String> = system
            .layout
            .groups()
            .iter()
            .find(|g| g.len() == 5)
            .unwrap()
            .iter()
            .map(|&p| space.point_name(p))
            .collect();
        five.sort();
        assert_eq!(five, vec!["inf", "p0", "p1", "q0", "q1"]);
    }

    #[test]
    fn lemma4_families_are_as_declared() {
        let entry = get("lemma4").unwrap();
        let system = entry.system().unwrap();
        let space = &system.space;
        assert_eq!(space.modulus(), 6);
        let desc: Vec<(String, u32)> = space
            .families()
            .iter()
            .map(|f| (f.label.clone(), f.size()))
            .collect();
        assert_eq!(
            desc,
            vec![
                ("a".into(), 6),
                ("b".into(), 6),
                ("c".into(), 6),
                ("d".into(), 6),
                ("e".into(), 6),
                ("f".into(), 3),
                ("p".into(), 2),
                ("q".into(), 2),
                ("r".into(), 6),
                ("t".into(), 6),
                ("inf".into(), 1),
            ]
        );
    }
}
