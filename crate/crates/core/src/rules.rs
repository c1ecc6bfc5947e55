//! The declarative rule engine: per-constraint domain reduction rules and a
//! fair worklist driver computing their closure.
//!
//! Rules for the array constraint `x = a[y1,…,yn]`:
//!
//! * `Rarx` — restrict `D_x` to the union of the cell domains addressable
//!   by the current index domains.
//! * `Rary` — drop an index value `b` from `D_{y_k}` when `D_x` shares no
//!   value with any cell addressable with `b` in position `k`.
//! * `Rara` — once the index product is a single tuple, restrict that one
//!   cell's domain to `D_x`.
//! * `RaraPrime` — alternative to `Rara`: under the same condition, rewrite
//!   the constraint to the primitive equality `x = a[b]`; equality
//!   propagation then yields the same domains as `Rara` plus the `x` side.
//!
//! Plus primitive equality (`Eq`: intersect both sides) and disequality
//! (`Neq`: a singleton side removes its value from the other side).

use std::collections::{HashSet, VecDeque};
use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::domain::{Domain, Value};
use crate::model::{index_product, ArrayId, Constraint, CspModel, DomainTable, IndexTuple, VarId};
use crate::stats::PropagationStats;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RuleTag {
    Rarx,
    Rary,
    Rara,
    RaraPrime,
    Eq,
    Neq,
}

/// One relevant (domain- or constraint-changing) rule application.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleApplication {
    pub rule: RuleTag,
    pub constraint: usize,
    pub var: VarId,
    pub removed: Domain,
    pub rewrite: Option<Constraint>,
}

/// Result of running an engine to stability (or failure).
#[derive(Debug, Clone)]
pub struct ClosureResult {
    pub table: DomainTable,
    pub stable: bool,
    pub failed: bool,
    pub log: Vec<RuleApplication>,
    pub stats: PropagationStats,
}

/// How a fully instantiated index is handled: prune the selected cell in
/// place (`Rara`) or rewrite the constraint to a primitive equality
/// (`RaraPrime`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CellMode {
    #[default]
    Prune,
    Rewrite,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ClosureOptions {
    pub cell_mode: CellMode,
    /// Shuffles the initial worklist order; the closure must not depend
    /// on it.
    pub order_seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleError {
    NotApplicable,
}

impl fmt::Display for RuleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleError::NotApplicable => write!(f, "rule condition does not hold"),
        }
    }
}

impl std::error::Error for RuleError {}

/// Destructured view of an array constraint.
pub(crate) struct ArrayParts {
    pub(crate) result: VarId,
    pub(crate) array: ArrayId,
    pub(crate) index: Vec<VarId>,
}

pub(crate) fn array_parts(c: &Constraint) -> Option<ArrayParts> {
    match c {
        Constraint::ArrayEq { result, array, index } => Some(ArrayParts {
            result: result.var,
            array: *array,
            index: index.iter().map(|r| r.var).collect(),
        }),
        _ => None,
    }
}

pub(crate) fn index_dims(table: &DomainTable, index: &[VarId]) -> Vec<Vec<Value>> {
    index.iter().map(|&v| table.get(v).to_vec()).collect()
}

/// `Rarx`: `D_x := D_x ∩ ⋃ D_{a[b]}` over all addressable `b`. Returns the
/// values removed from `D_x`.
pub fn rule_rarx(
    model: &CspModel,
    c: &Constraint,
    table: &mut DomainTable,
    stats: &mut PropagationStats,
) -> Domain {
    let parts = match array_parts(c) {
        Some(p) => p,
        None => return Domain::empty(),
    };
    let def = model.array(parts.array);
    let dims = index_dims(table, &parts.index);
    let mut union = Domain::empty();
    for tuple in index_product(&dims) {
        let cell = def.cell(&tuple).expect("validated index");
        stats.cell_domain_reads += 1;
        union.union_with(table.get(cell));
    }
    let removed = table.get(parts.result).difference(&union);
    if !removed.is_empty() {
        table.get_mut(parts.result).intersect_with(&union);
        stats.values_pruned += removed.len() as u64;
    }
    removed
}

/// Per-(dimension, value) unions of addressable cell domains, computed in
/// one sweep that reads each addressable cell exactly once.
fn per_dimension_unions(
    model: &CspModel,
    parts: &ArrayParts,
    table: &DomainTable,
    stats: &mut PropagationStats,
) -> Vec<Vec<(Value, Domain)>> {
    let def = model.array(parts.array);
    let dims = index_dims(table, &parts.index);
    let mut unions: Vec<Vec<(Value, Domain)>> = dims
        .iter()
        .map(|d| d.iter().map(|&v| (v, Domain::empty())).collect())
        .collect();
    for tuple in index_product(&dims) {
        let cell = def.cell(&tuple).expect("validated index");
        stats.cell_domain_reads += 1;
        let cell_domain = table.get(cell).clone();
        for (k, &b) in tuple.0.iter().enumerate() {
            let slot = unions[k].iter_mut().find(|(v, _)| *v == b).expect("value in dim");
            slot.1.union_with(&cell_domain);
        }
    }
    unions
}

/// `Rary` for dimension `k` (0-based): removes every `b ∈ D_{y_k}` whose
/// addressable cells share no value with `D_x`. Returns the removed values.
pub fn rule_rary(
    model: &CspModel,
    c: &Constraint,
    table: &mut DomainTable,
    k: usize,
    stats: &mut PropagationStats,
) -> Domain {
    let parts = match array_parts(c) {
        Some(p) => p,
        None => return Domain::empty(),
    };
    let unions = per_dimension_unions(model, &parts, table, stats);
    apply_rary_dimension(&parts, table, &unions[k], k, stats)
}

fn apply_rary_dimension(
    parts: &ArrayParts,
    table: &mut DomainTable,
    unions_k: &[(Value, Domain)],
    k: usize,
    stats: &mut PropagationStats,
) -> Domain {
    let x_domain = table.get(parts.result).clone();
    let mut removed = Domain::empty();
    for (b, union) in unions_k {
        if table.get(parts.index[k]).contains(*b) && !x_domain.intersects(union) {
            removed.insert(*b);
        }
    }
    if !removed.is_empty() {
        table.get_mut(parts.index[k]).difference_with(&removed);
        stats.values_pruned += removed.len() as u64;
    }
    removed
}

/// All dimensions of `Rary` in one sweep. Returns `(dimension, removed)`
/// pairs for the dimensions that changed.
fn rule_rary_sweep(
    model: &CspModel,
    c: &Constraint,
    table: &mut DomainTable,
    stats: &mut PropagationStats,
) -> Vec<(usize, Domain)> {
    let parts = match array_parts(c) {
        Some(p) => p,
        None => return Vec::new(),
    };
    let unions = per_dimension_unions(model, &parts, table, stats);
    let mut out = Vec::new();
    for (k, unions_k) in unions.iter().enumerate() {
        let removed = apply_rary_dimension(&parts, table, unions_k, k, stats);
        if !removed.is_empty() {
            out.push((k, removed));
        }
    }
    out
}

/// The fully instantiated index tuple, when the index product is a single
/// tuple (the condition guarding `Rara` and `RaraPrime`).
fn singleton_index(table: &DomainTable, index: &[VarId]) -> Option<IndexTuple> {
    let mut tuple = Vec::with_capacity(index.len());
    for &v in index {
        tuple.push(table.get(v).as_singleton()?);
    }
    Some(IndexTuple(tuple))
}

/// `Rara`: when the index is fully instantiated to `b`, restrict
/// `D_{a[b]}` to `D_x`. Returns the affected cell and its removed values.
pub fn rule_rara(
    model: &CspModel,
    c: &Constraint,
    table: &mut DomainTable,
    stats: &mut PropagationStats,
) -> Option<(VarId, Domain)> {
    let parts = array_parts(c)?;
    let tuple = singleton_index(table, &parts.index)?;
    let cell = model.array(parts.array).cell(&tuple).expect("validated index");
    stats.cell_domain_reads += 1;
    let removed = table.get(cell).difference(table.get(parts.result));
    if !removed.is_empty() {
        let x_domain = table.get(parts.result).clone();
        table.get_mut(cell).intersect_with(&x_domain);
        stats.values_pruned += removed.len() as u64;
    }
    Some((cell, removed))
}

/// `RaraPrime`: under the same condition as `Rara`, yields the rewrite of
/// the array constraint into the primitive equality `x = a[b]` instead of
/// pruning. Pure: the caller installs the rewrite.
pub fn rule_rara_prime(
    model: &CspModel,
    c: &Constraint,
    table: &DomainTable,
) -> Result<Constraint, RuleError> {
    let parts = array_parts(c).ok_or(RuleError::NotApplicable)?;
    let tuple = singleton_index(table, &parts.index).ok_or(RuleError::NotApplicable)?;
    let cell = model.array(parts.array).cell(&tuple).expect("validated index");
    Ok(Constraint::VarEq { a: parts.result, b: cell })
}

/// `Eq`: intersect both sides. Returns `(removed from a, removed from b)`.
pub fn rule_eq(
    a: VarId,
    b: VarId,
    table: &mut DomainTable,
    stats: &mut PropagationStats,
) -> (Domain, Domain) {
    let common = table.get(a).intersection(table.get(b));
    let removed_a = table.get(a).difference(&common);
    let removed_b = table.get(b).difference(&common);
    if !removed_a.is_empty() {
        table.set(a, common.clone());
    }
    if !removed_b.is_empty() {
        table.set(b, common);
    }
    stats.values_pruned += (removed_a.len() + removed_b.len()) as u64;
    (removed_a, removed_b)
}

/// `Neq`: a singleton side removes its value from the other side;
/// otherwise nothing. Returns `(removed from a, removed from b)`.
pub fn rule_neq(
    a: VarId,
    b: VarId,
    table: &mut DomainTable,
    stats: &mut PropagationStats,
) -> (Domain, Domain) {
    let mut removed_a = Domain::empty();
    let mut removed_b = Domain::empty();
    if let Some(d) = table.get(a).as_singleton() {
        if table.get_mut(b).remove(d) {
            removed_b.insert(d);
        }
    }
    if let Some(d) = table.get(b).as_singleton() {
        if table.get_mut(a).remove(d) {
            removed_a.insert(d);
        }
    }
    stats.values_pruned += (removed_a.len() + removed_b.len()) as u64;
    (removed_a, removed_b)
}

/// Worklist slots: one schedulable unit of propagation per constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Slot {
    Rarx,
    Rary,
    Cell,
    EqNeq,
}

fn slots_for(c: &Constraint) -> &'static [Slot] {
    match c {
        Constraint::ArrayEq { .. } => &[Slot::Rarx, Slot::Rary, Slot::Cell],
        Constraint::VarEq { .. } | Constraint::VarNeq { .. } => &[Slot::EqNeq],
        Constraint::NestedEq { .. } => &[],
    }
}

/// Runs the rule set to closure from the model's initial domains.
pub fn rsarr_closure(model: &CspModel, opts: &ClosureOptions) -> ClosureResult {
    rsarr_closure_table(model, model.initial_table(), opts)
}

/// Runs the rule set to closure from a given domain table. Applications are
/// scheduled FIFO per (constraint, rule) pair and re-enqueued whenever a
/// participating variable's domain changes; the closure reached is
/// independent of the order.
pub fn rsarr_closure_table(
    model: &CspModel,
    mut table: DomainTable,
    opts: &ClosureOptions,
) -> ClosureResult {
    let mut stats = PropagationStats { runs: 1, ..Default::default() };
    let mut log: Vec<RuleApplication> = Vec::new();

    // Rewrites are engine-local; the model itself stays untouched.
    let mut active: Vec<Constraint> = model.constraints().to_vec();

    // var -> constraints watching it, from the original constraints (a
    // superset remains correct after rewrites).
    let mut watchers: Vec<Vec<usize>> = vec![Vec::new(); model.var_count()];
    for cid in 0..active.len() {
        for v in model.constraint_vars(cid) {
            watchers[v.index()].push(cid);
        }
    }

    let mut queue: VecDeque<(usize, Slot)> = VecDeque::new();
    let mut queued: HashSet<(usize, Slot)> = HashSet::new();
    let mut initial: Vec<(usize, Slot)> = Vec::new();
    for (cid, c) in active.iter().enumerate() {
        for &slot in slots_for(c) {
            initial.push((cid, slot));
        }
    }
    if let Some(seed) = opts.order_seed {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        initial.shuffle(&mut rng);
    }
    for item in initial {
        queued.insert(item);
        queue.push_back(item);
    }

    let mut failed = false;
    while let Some(item) = queue.pop_front() {
        queued.remove(&item);
        let (cid, slot) = item;
        let mut changed_vars: Vec<VarId> = Vec::new();

        match (slot, active[cid].clone()) {
            (Slot::Rarx, c @ Constraint::ArrayEq { .. }) => {
                let removed = rule_rarx(model, &c, &mut table, &mut stats);
                if !removed.is_empty() {
                    let result = array_parts(&c).unwrap().result;
                    log.push(RuleApplication {
                        rule: RuleTag::Rarx,
                        constraint: cid,
                        var: result,
                        removed,
                        rewrite: None,
                    });
                    changed_vars.push(result);
                }
            }
            (Slot::Rary, c @ Constraint::ArrayEq { .. }) => {
                for (k, removed) in rule_rary_sweep(model, &c, &mut table, &mut stats) {
                    let var = array_parts(&c).unwrap().index[k];
                    log.push(RuleApplication {
                        rule: RuleTag::Rary,
                        constraint: cid,
                        var,
                        removed,
                        rewrite: None,
                    });
                    changed_vars.push(var);
                }
            }
            (Slot::Cell, c @ Constraint::ArrayEq { .. }) => match opts.cell_mode {
                CellMode::Prune => {
                    if let Some((cell, removed)) = rule_rara(model, &c, &mut table, &mut stats) {
                        if !removed.is_empty() {
                            log.push(RuleApplication {
                                rule: RuleTag::Rara,
                                constraint: cid,
                                var: cell,
                                removed,
                                rewrite: None,
                            });
                            changed_vars.push(cell);
                        }
                    }
                }
                CellMode::Rewrite => {
                    if let Ok(eq) = rule_rara_prime(model, &c, &table) {
                        let result = array_parts(&c).unwrap().result;
                        log.push(RuleApplication {
                            rule: RuleTag::RaraPrime,
                            constraint: cid,
                            var: result,
                            removed: Domain::empty(),
                            rewrite: Some(eq.clone()),
                        });
                        active[cid] = eq;
                        if queued.insert((cid, Slot::EqNeq)) {
                            queue.push_back((cid, Slot::EqNeq));
                        }
                    }
                }
            },
            (Slot::EqNeq, Constraint::VarEq { a, b }) => {
                let (ra, rb) = rule_eq(a, b, &mut table, &mut stats);
                for (v, removed) in [(a, ra), (b, rb)] {
                    if !removed.is_empty() {
                        log.push(RuleApplication {
                            rule: RuleTag::Eq,
                            constraint: cid,
                            var: v,
                            removed,
                            rewrite: None,
                        });
                        changed_vars.push(v);
                    }
                }
            }
            (Slot::EqNeq, Constraint::VarNeq { a, b }) => {
                let (ra, rb) = rule_neq(a, b, &mut table, &mut stats);
                for (v, removed) in [(a, ra), (b, rb)] {
                    if !removed.is_empty() {
                        log.push(RuleApplication {
                            rule: RuleTag::Neq,
                            constraint: cid,
                            var: v,
                            removed,
                            rewrite: None,
                        });
                        changed_vars.push(v);
                    }
                }
            }
            // Slot no longer matches the active constraint (after a
            // rewrite) — nothing to do.
            _ => {}
        }

        for &v in &changed_vars {
            if table.get(v).is_empty() {
                failed = true;
            }
        }
        if failed {
            break;
        }
        for &v in &changed_vars {
            for &watcher in &watchers[v.index()] {
                for &slot in slots_for(&active[watcher]) {
                    if queued.insert((watcher, slot)) {
                        queue.push_back((watcher, slot));
                    }
                }
            }
        }
    }

    ClosureResult { table, stable: !failed, failed, log, stats }
}
