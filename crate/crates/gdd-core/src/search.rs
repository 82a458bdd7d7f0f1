//! Exact-cover search for base-block systems under an assumed cyclic shift.
//!
//! Cross-group point pairs fall into orbits under the shift; a usable
//! candidate base block covers each pair of any orbit it touches exactly
//! once, so choosing base blocks is a pure exact cover of the pair orbits.
//! Candidates that would cover one of their own pairs twice are discarded
//! when the problem is built.

use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::feasibility::{check_feasible, FeasibilityReport};
use crate::group_type::GroupType;
use crate::orbit::{act, orbit_length, BaseBlockSystem};
use crate::space::{Block, GroupLayout, Point, PointSpace};
use crate::verify::verify_system;

/// An orbit of cross-group point pairs under the shift action.
#[derive(Debug, Clone)]
pub struct PairOrbit {
    pub representative: (Point, Point),
    pub size: u32,
}

/// A canonical candidate base block: minimal in its shift orbit, together
/// with the pair orbits its development covers (each exactly once).
#[derive(Debug, Clone)]
pub struct Candidate {
    pub block: Block,
    pub orbit_length: u32,
    items: Vec<u32>,
}

#[derive(Debug)]
pub struct SearchProblem {
    pub space: PointSpace,
    pub layout: GroupLayout,
    pub target_type: GroupType,
    pub pair_orbits: Vec<PairOrbit>,
    pub candidates: Vec<Candidate>,
    item_candidates: Vec<Vec<u32>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    /// Stop at the solution in the lowest top-level branch.
    First,
    /// Count every solution under the canonical candidate order.
    All,
}

/// Which uncovered pair orbit to branch on. Fail-first is the default; the
/// naive rule exists to check that selection order never changes the
/// solution set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SelectionRule {
    #[default]
    FewestCandidates,
    FirstUncovered,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SearchLimits {
    pub max_nodes: Option<u64>,
    pub max_time: Option<Duration>,
}

#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct SearchStats {
    pub nodes: u64,
    pub elapsed_ms: u128,
    pub solutions: u64,
}

#[derive(Debug)]
pub enum SearchOutcome {
    Found(Box<BaseBlockSystem>),
    Exhausted,
    LimitReached,
}

#[derive(Debug)]
pub struct SearchResult {
    pub outcome: SearchOutcome,
    pub stats: SearchStats,
}

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("type {} fails the necessary conditions; not searching", .0.group_type)]
    Infeasible(Box<FeasibilityReport>),
    #[error(
        "no automatic layout for type {group_type} with modulus {modulus}; \
         supported shapes are 1^v with modulus v and g^u with modulus g. \
         Supply a layout file for other shapes"
    )]
    UnsupportedShape { group_type: String, modulus: u32 },
    #[error("layout induces type {induced}, not the requested {requested}")]
    LayoutTypeMismatch { induced: String, requested: String },
    #[error("layout does not partition the space: {0}")]
    BadLayout(#[from] crate::space::LayoutError),
    #[error("space error: {0}")]
    Space(#[from] crate::space::SpaceError),
}

/// Excel-style family labels: a, b, ..., z, aa, ab, ...
fn family_label(i: usize) -> String {
    let mut n = i + 1;
    let mut out = Vec::new();
    while n > 0 {
        n -= 1;
        out.push(b'a' + (n % 26) as u8);
        n /= 26;
    }
    out.reverse();
    String::from_utf8(out).expect("ascii")
}

/// Builds the standard layouts: `1^v` with modulus v puts every point of a
/// single period-v family in its own group; `g^u` with modulus g uses u
/// families of period g, one group per family.
pub fn auto_layout(t: &GroupType, modulus: u32) -> Result<(PointSpace, GroupLayout), SearchError> {
    let exps = t.exponents();
    let v = t.point_count();
    if exps.len() == 1 && exps[0].0 == 1 && modulus == v {
        let mut space = PointSpace::new(modulus)?;
        let f = space.add_family("x", v)?;
        let groups = (0..v).map(|i| vec![Point { family: f, index: i }]).collect();
        return Ok((space, GroupLayout::new(groups)));
    }
    if exps.len() == 1 && exps[0].0 == modulus {
        let (g, u) = exps[0];
        let mut space = PointSpace::new(modulus)?;
        let mut groups = Vec::with_capacity(u as usize);
        for fi in 0..u as usize {
            let f = space.add_family(&family_label(fi), g)?;
            groups.push((0..g).map(|i| Point { family: f, index: i }).collect());
        }
        return Ok((space, GroupLayout::new(groups)));
    }
    Err(SearchError::UnsupportedShape {
        group_type: t.to_string(),
        modulus,
    })
}

/// Feasibility gate plus problem construction for a target type. The layout
/// defaults to `auto_layout` and must induce the target type.
pub fn prepare(
    t: &GroupType,
    modulus: u32,
    layout: Option<(PointSpace, GroupLayout)>,
) -> Result<SearchProblem, SearchError> {
    let report = check_feasible(t);
    if !report.feasible {
        return Err(SearchError::Infeasible(Box::new(report)));
    }
    let (space, layout) = match layout {
        Some(pair) => pair,
        None => auto_layout(t, modulus)?,
    };
    let induced = layout.induced_type();
    if induced != *t {
        return Err(SearchError::LayoutTypeMismatch {
            induced: induced.to_string(),
            requested: t.to_string(),
        });
    }
    build_problem(space, layout)
}

/// Enumerates the pair orbits and canonical candidate blocks of a space and
/// layout. Candidate order is lexicographic on the canonical representative.
pub fn build_problem(space: PointSpace, layout: GroupLayout) -> Result<SearchProblem, SearchError> {
    layout.validate(&space)?;
    let points = space.points();
    let n = points.len();
    let group_of: Vec<usize> = {
        let raw = layout.group_of(&space);
        raw.into_iter()
            .map(|g| g.expect("layout validated"))
            .collect()
    };
    let id_of = |p: Point| -> usize {
        points.binary_search(&p).expect("point of the space")
    };
    // Image of each point id under shift by one.
    let step: Vec<usize> = points.iter().map(|&p| id_of(act(&space, p, 1))).collect();

    let pair_id = |a: usize, b: usize| -> usize {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        hi * (hi - 1) / 2 + lo
    };

    // Pair orbits over cross-group pairs, in order of least representative.
    let mut orbit_of: Vec<Option<u32>> = vec![None; n * n.saturating_sub(1) / 2];
    let mut pair_orbits: Vec<PairOrbit> = Vec::new();
    for b in 1..n {
        for a in 0..b {
            if group_of[a] == group_of[b] || orbit_of[pair_id(a, b)].is_some() {
                continue;
            }
            let orbit_index = pair_orbits.len() as u32;
            let (mut x, mut y) = (a, b);
            let mut size = 0u32;
            loop {
                orbit_of[pair_id(x, y)] = Some(orbit_index);
                size += 1;
                x = step[x];
                y = step[y];
                if (x.min(y), x.max(y)) == (a, b) {
                    break;
                }
            }
            pair_orbits.push(PairOrbit {
                representative: (points[a], points[b]),
                size,
            });
        }
    }
    let total: u64 = pair_orbits.iter().map(|o| u64::from(o.size)).sum();
    assert_eq!(
        total,
        layout.induced_type().cross_pair_count(),
        "pair orbit sizes must add up to the cross pair count"
    );

    // Candidate blocks: four points from four distinct groups, canonical in
    // their shift orbit, whose development covers no pair twice.
    let mut candidates: Vec<Candidate> = Vec::new();
    let mut item_candidates: Vec<Vec<u32>> = vec![Vec::new(); pair_orbits.len()];
    let mut scratch: Vec<u32> = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if group_of[i] == group_of[j] {
                continue;
            }
            for k in (j + 1)..n {
                if group_of[k] == group_of[i] || group_of[k] == group_of[j] {
                    continue;
                }
                for l in (k + 1)..n {
                    if group_of[l] == group_of[i]
                        || group_of[l] == group_of[j]
                        || group_of[l] == group_of[k]
                    {
                        continue;
                    }
                    let ids = [i, j, k, l];
                    if !is_canonical(&ids, &step) {
                        continue;
                    }
                    let block = Block::new([points[i], points[j], points[k], points[l]])
                        .expect("distinct points");
                    let d = orbit_length(&space, &block);
                    // Collect the covered pairs of the whole orbit.
                    scratch.clear();
                    let mut shifted = ids;
                    let mut clean = true;
                    'shifts: for _ in 0..d {
                        for x in 0..4 {
                            for y in (x + 1)..4 {
                                let pid = pair_id(shifted[x], shifted[y]) as u32;
                                if scratch.contains(&pid) {
                                    clean = false;
                                    break 'shifts;
                                }
                                scratch.push(pid);
                            }
                        }
                        for s in &mut shifted {
                            *s = step[*s];
                        }
                    }
                    if !clean {
                        continue;
                    }
                    let mut items: Vec<u32> = scratch
                        .iter()
                        .map(|&pid| orbit_of[pid as usize].expect("cross pair"))
                        .collect();
                    items.sort_unstable();
                    items.dedup();
                    // Each touched orbit must be covered in full.
                    debug_assert_eq!(
                        items
                            .iter()
                            .map(|&it| u64::from(pair_orbits[it as usize].size))
                            .sum::<u64>(),
                        u64::from(d) * 6
                    );
                    let index = candidates.len() as u32;
                    for &it in &items {
                        item_candidates[it as usize].push(index);
                    }
                    candidates.push(Candidate {
                        block,
                        orbit_length: d,
                        items,
                    });
                }
            }
        }
    }

    let target_type = layout.induced_type();
    Ok(SearchProblem {
        space,
        layout,
        target_type,
        pair_orbits,
        candidates,
        item_candidates,
    })
}

/// True when `ids` (sorted) is the least member of its shift orbit.
fn is_canonical(ids: &[usize; 4], step: &[usize]) -> bool {
    let mut shifted = *ids;
    loop {
        for s in &mut shifted {
            *s = step[*s];
        }
        let mut sorted = shifted;
        sorted.sort_unstable();
        if sorted == *ids {
            return true;
        }
        if sorted < *ids {
            return false;
        }
    }
}

struct Shared<'p> {
    problem: &'p SearchProblem,
    nodes: AtomicU64,
    // Lowest top-level branch index with a solution, for first-mode pruning.
    best_branch: AtomicUsize,
    deadline: Option<Instant>,
}

#[derive(Debug, Clone)]
enum BranchOutcome {
    Solved(Vec<u32>, u64),
    Exhausted(u64),
    Cut,
    Skipped,
}

struct Dfs<'p, 's> {
    shared: &'s Shared<'p>,
    mode: SearchMode,
    rule: SelectionRule,
    covered: Vec<bool>,
    excluded: Vec<u32>,
    remaining: Vec<u32>,
    chosen: Vec<u32>,
    uncovered_count: usize,
    budget: u64,
    spent: u64,
    first_solution: Option<Vec<u32>>,
    solutions: u64,
    cut: bool,
}

impl<'p, 's> Dfs<'p, 's> {
    fn new(shared: &'s Shared<'p>, mode: SearchMode, rule: SelectionRule, budget: u64) -> Self {
        let p = shared.problem;
        let remaining = p
            .item_candidates
            .iter()
            .map(|c| c.len() as u32)
            .collect::<Vec<_>>();
        Dfs {
            shared,
            mode,
            rule,
            covered: vec![false; p.pair_orbits.len()],
            excluded: vec![0; p.candidates.len()],
            remaining,
            chosen: Vec::new(),
            uncovered_count: p.pair_orbits.len(),
            budget,
            spent: 0,
            first_solution: None,
            solutions: 0,
            cut: false,
        }
    }

    fn cover(&mut self, c: u32) {
        let p = self.shared.problem;
        self.chosen.push(c);
        for &it in &p.candidates[c as usize].items {
            self.covered[it as usize] = true;
            self.uncovered_count -= 1;
        }
        for &it in &p.candidates[c as usize].items {
            for &c2 in &p.item_candidates[it as usize] {
                self.excluded[c2 as usize] += 1;
                if self.excluded[c2 as usize] == 1 {
                    for &j in &p.candidates[c2 as usize].items {
                        if !self.covered[j as usize] {
                            self.remaining[j as usize] -= 1;
                        }
                    }
                }
            }
        }
    }

    fn uncover(&mut self, c: u32) {
        let p = self.shared.problem;
        for &it in p.candidates[c as usize].items.iter().rev() {
            for &c2 in &p.item_candidates[it as usize] {
                if self.excluded[c2 as usize] == 1 {
                    for &j in &p.candidates[c2 as usize].items {
                        if !self.covered[j as usize] {
                            self.remaining[j as usize] += 1;
                        }
                    }
                }
                self.excluded[c2 as usize] -= 1;
            }
        }
        for &it in &p.candidates[c as usize].items {
            self.covered[it as usize] = false;
            self.uncovered_count += 1;
        }
        self.chosen.pop();
    }

    fn select_item(&self) -> Option<usize> {
        let p = self.shared.problem;
        match self.rule {
            SelectionRule::FewestCandidates => {
                let mut best: Option<(u32, usize)> = None;
                for it in 0..p.pair_orbits.len() {
                    if self.covered[it] {
                        continue;
                    }
                    let r = self.remaining[it];
                    // Ties break to the lowest orbit representative.
                    if best.is_none_or(|(br, _)| r < br) {
                        best = Some((r, it));
                        if r == 0 {
                            break;
                        }
                    }
                }
                best.map(|(_, it)| it)
            }
            SelectionRule::FirstUncovered => (0..p.pair_orbits.len()).find(|&it| !self.covered[it]),
        }
    }

    /// Returns false when the search under the current state was cut short.
    fn run(&mut self) -> bool {
        if self.cut {
            return false;
        }
        if self.uncovered_count == 0 {
            self.solutions += 1;
            if self.first_solution.is_none() {
                let mut sol = self.chosen.clone();
                sol.sort_unstable();
                self.first_solution = Some(sol);
            }
            return true;
        }
        let item = match self.select_item() {
            Some(it) => it,
            None => return true,
        };
        if self.remaining[item] == 0 {
            return true;
        }
        let p = self.shared.problem;
        let options: Vec<u32> = p.item_candidates[item]
            .iter()
            .copied()
            .filter(|&c| self.excluded[c as usize] == 0)
            .collect();
        for c in options {
            self.spent += 1;
            if self.spent > self.budget {
                self.cut = true;
                return false;
            }
            if let Some(deadline) = self.shared.deadline {
                if self.spent.is_multiple_of(1024) && Instant::now() > deadline {
                    self.cut = true;
                    return false;
                }
            }
            self.cover(c);
            let done = self.run();
            self.uncover(c);
            if !done {
                return false;
            }
            if self.mode == SearchMode::First && self.first_solution.is_some() {
                return true;
            }
        }
        true
    }
}

/// Depth-first exact cover over the pair orbits.
///
/// Top-level branches (the candidates of the first selected orbit) are
/// distributed round-robin over the workers; results merge by branch index,
/// so the outcome for a given worker count is deterministic. In first mode
/// the reported system is the one from the lowest solved branch, re-checked
/// through the verifier before being returned.
pub fn search(
    problem: &SearchProblem,
    mode: SearchMode,
    rule: SelectionRule,
    limits: SearchLimits,
    workers: usize,
) -> SearchResult {
    let start = Instant::now();
    let workers = workers.max(1);
    let shared = Shared {
        problem,
        nodes: AtomicU64::new(0),
        best_branch: AtomicUsize::new(usize::MAX),
        deadline: limits.max_time.map(|d| start + d),
    };

    // Trivial instance: nothing to cover, the empty system is the solution.
    if problem.pair_orbits.is_empty() {
        let stats = SearchStats {
            nodes: 0,
            elapsed_ms: start.elapsed().as_millis(),
            solutions: 1,
        };
        let outcome = match mode {
            SearchMode::First => SearchOutcome::Found(Box::new(assemble(problem, &[]))),
            SearchMode::All => SearchOutcome::Exhausted,
        };
        return SearchResult { outcome, stats };
    }

    // Root item: fail-first on the initial counts (or first orbit).
    let probe = Dfs::new(&shared, mode, rule, u64::MAX);
    let root_item = probe
        .select_item()
        .expect("at least one uncovered pair orbit");
    drop(probe);
    let branches: Vec<u32> = problem.item_candidates[root_item].clone();
    let per_worker_budget = match limits.max_nodes {
        Some(n) => (n / workers as u64).max(1),
        None => u64::MAX,
    };

    let mut branch_outcomes: Vec<BranchOutcome> = vec![BranchOutcome::Skipped; branches.len()];
    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for w in 0..workers {
            let shared = &shared;
            let branches = &branches;
            handles.push(scope.spawn(move || {
                let mut results: Vec<(usize, BranchOutcome)> = Vec::new();
                let mut dfs = Dfs::new(shared, mode, rule, per_worker_budget);
                for bi in (w..branches.len()).step_by(workers) {
                    if mode == SearchMode::First
                        && shared.best_branch.load(Ordering::Relaxed) < bi
                    {
                        results.push((bi, BranchOutcome::Skipped));
                        continue;
                    }
                    dfs.spent += 1;
                    if dfs.spent > dfs.budget {
                        for rest in (bi..branches.len()).step_by(workers) {
                            results.push((rest, BranchOutcome::Cut));
                        }
                        break;
                    }
                    let before = dfs.solutions;
                    dfs.cover(branches[bi]);
                    let done = dfs.run();
                    dfs.uncover(branches[bi]);
                    let found = dfs.solutions - before;
                    let outcome = if !done {
                        BranchOutcome::Cut
                    } else if let Some(sol) = dfs.first_solution.take() {
                        shared.best_branch.fetch_min(bi, Ordering::Relaxed);
                        BranchOutcome::Solved(sol, found)
                    } else {
                        BranchOutcome::Exhausted(found)
                    };
                    results.push((bi, outcome));
                    if dfs.cut {
                        // The budget is exhausted; remaining branches stay cut.
                        for rest in (bi + workers..branches.len()).step_by(workers) {
                            results.push((rest, BranchOutcome::Cut));
                        }
                        break;
                    }
                }
                shared.nodes.fetch_add(dfs.spent, Ordering::Relaxed);
                results
            }));
        }
        for handle in handles {
            for (bi, outcome) in handle.join().expect("worker panicked") {
                branch_outcomes[bi] = outcome;
            }
        }
    });

    let mut solutions: u64 = 0;
    let mut any_cut = false;
    let mut winner: Option<Vec<u32>> = None;
    for outcome in &branch_outcomes {
        match outcome {
            BranchOutcome::Solved(sol, count) => {
                solutions += count;
                if mode == SearchMode::First {
                    // A cut branch below this index could hide an earlier
                    // solution, so "first" is only claimed on a clean prefix.
                    if !any_cut {
                        winner = Some(sol.clone());
                    }
                    break;
                }
            }
            BranchOutcome::Exhausted(count) => solutions += count,
            BranchOutcome::Cut => any_cut = true,
            BranchOutcome::Skipped => {}
        }
    }

    let stats = SearchStats {
        nodes: shared.nodes.load(Ordering::Relaxed),
        elapsed_ms: start.elapsed().as_millis(),
        solutions,
    };
    let outcome = match winner {
        Some(solution) => {
            let system = assemble(problem, &solution);
            let report = verify_system(&system).expect("searched system develops");
            assert!(
                report.is_valid(),
                "internal error: search produced a system that fails verification"
            );
            SearchOutcome::Found(Box::new(system))
        }
        None if any_cut => SearchOutcome::LimitReached,
        None => SearchOutcome::Exhausted,
    };
    SearchResult { outcome, stats }
}

fn assemble(problem: &SearchProblem, solution: &[u32]) -> BaseBlockSystem {
    let mut chosen: Vec<u32> = solution.to_vec();
    chosen.sort_unstable();
    let base_blocks: Vec<Block> = chosen
        .iter()
        .map(|&c| problem.candidates[c as usize].block)
        .collect();
    let orbits: Vec<u32> = chosen
        .iter()
        .map(|&c| problem.candidates[c as usize].orbit_length)
        .collect();
    BaseBlockSystem {
        name: format!(
            "search {} modulus {}",
            problem.target_type,
            problem.space.modulus()
        ),
        space: problem.space.clone(),
        layout: problem.layout.clone(),
        claimed_type: Some(problem.target_type.clone()),
        base_blocks,
        declared_orbits: Some(orbits),
    }
}
