//! Deciding conformance by searching for a strictly faithful assignment.

use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use crate::ast::ShapeSet;
use crate::eval::{Assignment, Atom, EvalError, Evaluator, TruthValue};
use crate::graph::PropertyGraph;
use crate::transforms::{is_normalized, local_violation};

pub const DEFAULT_MAX_ATOMS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Enumerate all `3^k` assignments.
    BruteForce,
    /// Depth-first search with propagation.
    Backtracking,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverConfig {
    pub strategy: Strategy,
    /// Largest instance brute force (and enumeration) accepts.
    pub max_atoms: usize,
    /// Search decisions allowed before giving up.
    pub max_branches: Option<u64>,
    pub time_budget: Option<Duration>,
    /// Work out, on failure, which targets fail on their own.
    pub explain: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            strategy: Strategy::Backtracking,
            max_atoms: DEFAULT_MAX_ATOMS,
            max_branches: None,
            time_budget: None,
            explain: true,
        }
    }
}

impl SolverConfig {
    pub fn brute_force() -> Self {
        SolverConfig { strategy: Strategy::BruteForce, ..Self::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error("{atoms} atoms exceed the limit of {limit} for exhaustive search")]
    TooLarge { atoms: usize, limit: usize },
    #[error("search budget exhausted after {branches} branches")]
    BudgetExceeded { branches: u64 },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// How a target fares.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TargetStatus {
    /// `1` in the witness. Without a witness: `1` in a faithful assignment
    /// that satisfies every target satisfiable on its own.
    Satisfied,
    /// No faithful assignment gives it `1`, even ignoring the other targets.
    Violated,
    /// Satisfiable alone, but not together with the other targets that are.
    Conflicting,
    /// The budget ran out before this target was classified.
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TargetReport {
    pub atom: Atom,
    /// The witness value, when there is a witness.
    pub value: Option<TruthValue>,
    pub status: TargetStatus,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub conforms: bool,
    pub witness: Option<Assignment>,
    pub targets: Vec<TargetReport>,
    pub strategy: Strategy,
    /// Decisions made (backtracking) or assignments tried (brute force).
    pub branches: u64,
}

impl ValidationReport {
    /// Targets that fail, with their status.
    pub fn violated_targets(&self) -> impl Iterator<Item = &TargetReport> {
        self.targets.iter().filter(|t| t.status != TargetStatus::Satisfied)
    }
}

/// Dispatches on `cfg.strategy`.
pub fn solve(g: &PropertyGraph, s: &ShapeSet, cfg: &SolverConfig) -> Result<ValidationReport, SolverError> {
    match cfg.strategy {
        Strategy::BruteForce => brute_force_with(g, s, cfg),
        Strategy::Backtracking => find_faithful_assignment(g, s, cfg),
    }
}

/// Exhaustive conformance check with the default atom limit.
pub fn brute_force_conformance(g: &PropertyGraph, s: &ShapeSet) -> Result<ValidationReport, SolverError> {
    brute_force_with(g, s, &SolverConfig::brute_force())
}

/// Tries every assignment, atoms in [`crate::eval::atoms`] order with the
/// first atom varying slowest and values ordered `0`, `½`, `1`; returns the
/// first strictly faithful one.
pub fn brute_force_with(g: &PropertyGraph, s: &ShapeSet, cfg: &SolverConfig) -> Result<ValidationReport, SolverError> {
    let ev = Evaluator::new(g, s);
    let k = ev.layout.len();
    if k > cfg.max_atoms {
        return Err(SolverError::TooLarge { atoms: k, limit: cfg.max_atoms });
    }
    let mut dense = vec![TruthValue::False; k];
    let mut tried = 0u64;
    let clock = Budget::new(cfg);
    loop {
        tried += 1;
        clock.check(tried)?;
        if ev.is_faithful_fast(&dense) {
            let witness = ev.to_assignment(&dense);
            return Ok(report(&ev, Some(witness), Strategy::BruteForce, tried, cfg));
        }
        // Odometer step, last atom fastest.
        let mut pos = k;
        loop {
            if pos == 0 {
                return Ok(report(&ev, None, Strategy::BruteForce, tried, cfg));
            }
            pos -= 1;
            dense[pos] = match dense[pos] {
                TruthValue::False => TruthValue::Unknown,
                TruthValue::Unknown => TruthValue::True,
                TruthValue::True => TruthValue::False,
            };
            if dense[pos] != TruthValue::False {
                break;
            }
        }
    }
}

/// Backtracking search for a strictly faithful assignment.
///
/// Atoms whose value is the same in every faithful assignment are fixed up
/// front (they are the definite atoms of the least fixpoint reached from the
/// all-`½` assignment). The remaining atoms are branched over in the order
/// targets first, then by shape name and element, trying `1`, `0`, `½`.
/// Whenever all atoms an atom's constraint reads are assigned, its value is
/// forced (or checked) by evaluation.
pub fn find_faithful_assignment(
    g: &PropertyGraph,
    s: &ShapeSet,
    cfg: &SolverConfig,
) -> Result<ValidationReport, SolverError> {
    let ev = Evaluator::new(g, s);
    let mut search = Search::new(&ev, cfg, ev.target_atoms.clone());
    let found = search.run(&mut |_| true)?;
    let branches = search.branches;
    Ok(report(&ev, found, Strategy::Backtracking, branches, cfg))
}

/// All strictly faithful assignments in search order, at most `limit`.
/// The first one equals [`find_faithful_assignment`]'s witness.
pub fn enumerate_faithful_assignments(
    g: &PropertyGraph,
    s: &ShapeSet,
    limit: usize,
) -> Result<Vec<Assignment>, SolverError> {
    enumerate_with(g, s, limit, &SolverConfig::default())
}

pub fn enumerate_with(
    g: &PropertyGraph,
    s: &ShapeSet,
    limit: usize,
    cfg: &SolverConfig,
) -> Result<Vec<Assignment>, SolverError> {
    let ev = Evaluator::new(g, s);
    if ev.layout.len() > cfg.max_atoms {
        return Err(SolverError::TooLarge { atoms: ev.layout.len(), limit: cfg.max_atoms });
    }
    let mut out = Vec::new();
    if limit == 0 {
        return Ok(out);
    }
    let mut search = Search::new(&ev, cfg, ev.target_atoms.clone());
    search.run(&mut |sigma| {
        out.push(sigma);
        out.len() >= limit
    })?;
    Ok(out)
}

fn report(
    ev: &Evaluator<'_>,
    witness: Option<Assignment>,
    strategy: Strategy,
    branches: u64,
    cfg: &SolverConfig,
) -> ValidationReport {
    let targets = match &witness {
        Some(w) => ev
            .target_atoms
            .iter()
            .map(|&ix| {
                let atom = ev.layout.atom(ev.g, ev.s, ix);
                let value = w.get(&atom);
                TargetReport { atom, value, status: TargetStatus::Satisfied }
            })
            .collect(),
        None if !cfg.explain => ev
            .target_atoms
            .iter()
            .map(|&ix| TargetReport {
                atom: ev.layout.atom(ev.g, ev.s, ix),
                value: None,
                status: TargetStatus::Undetermined,
            })
            .collect(),
        None => explain(ev, cfg),
    };
    ValidationReport { conforms: witness.is_some(), witness, targets, strategy, branches }
}

/// Classifies targets when there is no witness: each is first tried alone,
/// then all that pass alone are tried together.
fn explain(ev: &Evaluator<'_>, cfg: &SolverConfig) -> Vec<TargetReport> {
    let alone: Vec<Result<bool, SolverError>> = ev
        .target_atoms
        .iter()
        .map(|&ix| Search::new(ev, cfg, vec![ix]).run(&mut |_| true).map(|w| w.is_some()))
        .collect();
    let feasible: Vec<usize> =
        ev.target_atoms.iter().zip(&alone).filter(|(_, r)| matches!(r, Ok(true))).map(|(&ix, _)| ix).collect();
    let joint = Search::new(ev, cfg, feasible).run(&mut |_| true);
    ev.target_atoms
        .iter()
        .zip(alone)
        .map(|(&ix, r)| {
            let atom = ev.layout.atom(ev.g, ev.s, ix);
            let (value, status) = match (r, &joint) {
                (Ok(false), _) => (None, TargetStatus::Violated),
                (Ok(true), Ok(Some(w))) => (w.get(&atom), TargetStatus::Satisfied),
                (Ok(true), Ok(None)) => (None, TargetStatus::Conflicting),
                _ => (None, TargetStatus::Undetermined),
            };
            TargetReport { atom, value, status }
        })
        .collect()
}

struct Budget {
    start: Instant,
    max_branches: Option<u64>,
    time: Option<Duration>,
}

impl Budget {
    fn new(cfg: &SolverConfig) -> Self {
        Budget { start: Instant::now(), max_branches: cfg.max_branches, time: cfg.time_budget }
    }

    fn check(&self, branches: u64) -> Result<(), SolverError> {
        let over_count = self.max_branches.is_some_and(|m| branches > m);
        let over_time = branches.is_multiple_of(256) && self.time.is_some_and(|t| self.start.elapsed() > t);
        if over_count || over_time {
            Err(SolverError::BudgetExceeded { branches })
        } else {
            Ok(())
        }
    }
}

struct Search<'e, 'a> {
    ev: &'e Evaluator<'a>,
    normalized: bool,
    required: Vec<bool>,
    value: Vec<Option<TruthValue>>,
    dependents: Vec<Vec<usize>>,
    missing: Vec<usize>,
    trail: Vec<usize>,
    order: Vec<usize>,
    budget: Budget,
    branches: u64,
}

impl<'e, 'a> Search<'e, 'a> {
    fn new(ev: &'e Evaluator<'a>, cfg: &SolverConfig, required_atoms: Vec<usize>) -> Self {
        let k = ev.layout.len();
        let mut dependents = vec![Vec::new(); k];
        let mut missing = vec![0; k];
        let mut deps = Vec::new();
        for (a, miss) in missing.iter_mut().enumerate() {
            deps.clear();
            ev.atom_deps(a, &mut deps);
            deps.sort_unstable();
            deps.dedup();
            *miss = deps.len();
            for &d in &deps {
                dependents[d].push(a);
            }
        }
        let mut required = vec![false; k];
        for &t in &required_atoms {
            required[t] = true;
        }
        let atoms: Vec<Atom> = (0..k).map(|i| ev.layout.atom(ev.g, ev.s, i)).collect();
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&x, &y| required[y].cmp(&required[x]).then_with(|| atoms[x].cmp(&atoms[y])));
        Search {
            ev,
            normalized: is_normalized(ev.s),
            required,
            value: vec![None; k],
            dependents,
            missing,
            trail: Vec::new(),
            order,
            budget: Budget::new(cfg),
            branches: 0,
        }
    }

    fn eval(&self, a: usize) -> TruthValue {
        let sigma = |i: usize| self.value[i].expect("dependencies assigned");
        self.ev.eval_atom(&sigma, a)
    }

    /// Assigns `v` to `a` and propagates; `false` on a contradiction.
    /// Trail entries are kept either way so the caller can undo.
    fn assign(&mut self, a: usize, v: TruthValue) -> bool {
        let mut queue = vec![(a, v)];
        while let Some((x, v)) = queue.pop() {
            match self.value[x] {
                Some(old) if old != v => return false,
                Some(_) => continue,
                None => {}
            }
            if self.required[x] && v != TruthValue::True {
                return false;
            }
            self.value[x] = Some(v);
            self.trail.push(x);
            let mut ready = Vec::new();
            for &d in &self.dependents[x] {
                self.missing[d] -= 1;
                if self.missing[d] == 0 {
                    ready.push(d);
                }
            }
            for d in ready {
                let forced = self.eval(d);
                match self.value[d] {
                    Some(cur) if cur != forced => return false,
                    Some(_) => {}
                    None => queue.push((d, forced)),
                }
            }
        }
        true
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let x = self.trail.pop().expect("non-empty trail");
            self.value[x] = None;
            for &d in &self.dependents[x] {
                self.missing[d] += 1;
            }
        }
    }

    /// Least fixpoint in the information order, from all `½`.
    fn settled(&self) -> Vec<TruthValue> {
        let k = self.ev.layout.len();
        let mut cur = vec![TruthValue::Unknown; k];
        loop {
            let sigma = |i: usize| cur[i];
            let next: Vec<TruthValue> = (0..k).map(|a| self.ev.eval_atom(&sigma, a)).collect();
            if next == cur {
                return cur;
            }
            cur = next;
        }
    }

    /// Calls `emit` on each faithful assignment in order until it returns
    /// `true`; returns the assignment that stopped the search, if any.
    fn run(&mut self, emit: &mut dyn FnMut(Assignment) -> bool) -> Result<Option<Assignment>, SolverError> {
        let k = self.ev.layout.len();
        // Atoms reading nothing are decided by evaluation alone.
        for a in 0..k {
            if self.missing[a] == 0 && self.value[a].is_none() {
                let v = self.eval(a);
                if !self.assign(a, v) {
                    return Ok(None);
                }
            }
        }
        for (a, v) in self.settled().into_iter().enumerate() {
            if v != TruthValue::Unknown && !self.assign(a, v) {
                return Ok(None);
            }
        }
        self.dfs(0, emit)
    }

    fn dfs(
        &mut self,
        start: usize,
        emit: &mut dyn FnMut(Assignment) -> bool,
    ) -> Result<Option<Assignment>, SolverError> {
        let Some(pos) = (start..self.order.len()).find(|&p| self.value[self.order[p]].is_none()) else {
            let dense: Vec<TruthValue> = self.value.iter().map(|v| v.expect("complete")).collect();
            if self.accepts(&dense) {
                let sigma = self.ev.to_assignment(&dense);
                if emit(sigma.clone()) {
                    return Ok(Some(sigma));
                }
            }
            return Ok(None);
        };
        let a = self.order[pos];
        let choices: &[TruthValue] = if self.required[a] {
            &[TruthValue::True]
        } else {
            &[TruthValue::True, TruthValue::False, TruthValue::Unknown]
        };
        for &v in choices {
            self.branches += 1;
            self.budget.check(self.branches)?;
            let mark = self.trail.len();
            if self.assign(a, v) {
                if let Some(found) = self.dfs(pos + 1, emit)? {
                    return Ok(Some(found));
                }
            }
            self.undo(mark);
        }
        Ok(None)
    }

    /// Full strict-faithfulness check of a complete assignment, restricted
    /// to the targets this search enforces.
    fn accepts(&self, dense: &[TruthValue]) -> bool {
        let targets_ok = self.ev.target_atoms.iter().all(|&t| !self.required[t] || dense[t] == TruthValue::True);
        if !targets_ok {
            return false;
        }
        let all_targets = self.ev.target_atoms.iter().all(|&t| self.required[t]);
        if all_targets {
            if self.normalized {
                local_violation(self.ev, dense).is_none()
            } else {
                self.ev.first_violation(dense).is_none()
            }
        } else {
            let sigma = |i: usize| dense[i];
            (0..dense.len()).all(|a| self.ev.eval_atom(&sigma, a) == dense[a])
        }
    }
}
