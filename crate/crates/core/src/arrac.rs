//! The one-pass array propagation algorithm and its fixpoint driver.
//!
//! One run over a constraint `x = a[y1,…,yn]` keeps, per dimension, the set
//! `Y_i` of index values not yet seen in any viable cell, and `X ⊆ D_x` of
//! result values not yet seen in any addressable cell. Walking the index
//! tuples once, it computes `T = D_x ∩ D_{a[b]}` only while the tuple still
//! contains an undecided index value; a nonempty `T` strikes the tuple's
//! values from the `Y_i` and `T` from `X`. Tuples with no undecided value
//! are set aside unread; a second phase replays them against `X` only while
//! `X` is still nonempty. Whatever survives in the `Y_i` and `X` is
//! unsupported and is removed from the domains. Each addressable cell
//! domain is read at most once per run.

use std::collections::HashMap;
use std::fmt;

use crate::domain::{Domain, Value};
use crate::model::{
    index_product, Constraint, CspModel, DomainTable, IndexTuple, VarId,
};
use crate::rules::{
    array_parts, index_dims, rule_eq, rule_neq, rule_rara, rule_rara_prime, CellMode,
    ClosureResult, RuleApplication, RuleTag,
};
use crate::stats::PropagationStats;

/// Order in which index tuples are drawn in the first phase.
#[derive(Debug, Clone, Default, PartialEq)]
pub enum IndexOrder {
    /// Lexicographic over the current index domains (last dimension
    /// fastest); the default, and the order used by all traces.
    #[default]
    Lex,
    /// An explicit tuple order; tuples outside the current index domains
    /// are skipped. For tests that need a specific processing order.
    Fixed(Vec<IndexTuple>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArracOptions {
    /// Transfer unprocessed tuples to the skipped set when the first phase
    /// exhausts every `Y_k` early. Disabling this reproduces a literal
    /// first-phase early exit, which over-prunes `D_x` (see the witness
    /// test); keep it on for sound propagation.
    pub amended: bool,
    /// Commit and restart a run as soon as some `Y_j` provably cannot
    /// shrink any further (every tuple containing a remaining `Y_j` value
    /// has been drawn). Off by default.
    pub early_restart: bool,
    /// Cell handling in the fixpoint driver: prune in place or rewrite to a
    /// primitive equality.
    pub cell_mode: CellMode,
    pub order: IndexOrder,
}

impl Default for ArracOptions {
    fn default() -> ArracOptions {
        ArracOptions {
            amended: true,
            early_restart: false,
            cell_mode: CellMode::Prune,
            order: IndexOrder::Lex,
        }
    }
}

/// What a single run did.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    /// Variables whose domains the commit phase changed (deduplicated).
    pub changed: Vec<VarId>,
    /// Some committed domain is now empty.
    pub failed: bool,
    /// The run stopped at the early-restart trigger; only the triggering
    /// dimensions were committed.
    pub restarted_early: bool,
    /// Counters for this run alone.
    pub stats: PropagationStats,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArracError {
    /// `supporting_cells` requires an arc-consistent constraint; the
    /// verification run still found work to do.
    NotArcConsistent,
}

impl fmt::Display for ArracError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArracError::NotArcConsistent => {
                write!(f, "constraint is not arc-consistent")
            }
        }
    }
}

impl std::error::Error for ArracError {}

/// One propagation run over a single array constraint. Commits its
/// removals to `table` and reports per-run counters.
pub fn arrac_run(
    model: &CspModel,
    c: &Constraint,
    table: &mut DomainTable,
    opts: &ArracOptions,
) -> RunOutcome {
    let parts = array_parts(c).expect("array constraint");
    let def = model.array(parts.array);
    let dims = index_dims(table, &parts.index);
    let d_x = table.get(parts.result).clone();

    let mut stats = PropagationStats { runs: 1, ..Default::default() };
    let mut y: Vec<Domain> = parts.index.iter().map(|&v| table.get(v).clone()).collect();
    let mut x = d_x.clone();
    let mut skipped: Vec<IndexTuple> = Vec::new();

    // Early-restart bookkeeping: how many undrawn tuples still contain each
    // (dimension, value) pair.
    let mut occurrences: Vec<HashMap<Value, u64>> = Vec::new();
    if opts.early_restart {
        let total: u64 = dims.iter().map(|d| d.len() as u64).product();
        for d in &dims {
            let per_value = total / d.len() as u64;
            occurrences.push(d.iter().map(|&v| (v, per_value)).collect());
        }
    }

    let mut drawn: Box<dyn Iterator<Item = IndexTuple>> = match &opts.order {
        IndexOrder::Lex => Box::new(index_product(&dims)),
        IndexOrder::Fixed(list) => {
            let dims = dims.clone();
            Box::new(list.clone().into_iter().filter(move |t| {
                t.0.iter().zip(dims.iter()).all(|(v, d)| d.contains(v))
            }))
        }
    };

    // Phase one: discover supports while some Y_k is undecided.
    let mut restart_dims: Vec<usize> = Vec::new();
    loop {
        if y.iter().all(|d| d.is_empty()) {
            break;
        }
        let b = match drawn.next() {
            Some(b) => b,
            None => break,
        };
        if opts.early_restart {
            for (k, &v) in b.0.iter().enumerate() {
                *occurrences[k].get_mut(&v).expect("value in dim") -= 1;
            }
        }
        if b.0.iter().zip(y.iter()).any(|(&v, yk)| yk.contains(v)) {
            let cell = def.cell(&b).expect("validated index");
            stats.cell_domain_reads += 1;
            stats.t_computations += 1;
            let t = d_x.intersection(table.get(cell));
            if !t.is_empty() {
                for (&v, yk) in b.0.iter().zip(y.iter_mut()) {
                    yk.remove(v);
                }
                x.difference_with(&t);
            }
        } else {
            // No undecided index value: irrelevant to the Y_i, and its cell
            // may still clear X values later — set it aside unread.
            skipped.push(b);
            stats.skipped_indices += 1;
        }
        if opts.early_restart {
            for (k, yk) in y.iter().enumerate() {
                if !yk.is_empty() && yk.iter().all(|v| occurrences[k][&v] == 0) {
                    restart_dims.push(k);
                }
            }
            if !restart_dims.is_empty() {
                break;
            }
        }
    }

    if !restart_dims.is_empty() {
        // Commit only the dimensions that can no longer shrink, and let the
        // caller rerun from the reduced domains.
        let mut changed = Vec::new();
        let mut failed = false;
        for &k in &restart_dims {
            let var = parts.index[k];
            table.get_mut(var).difference_with(&y[k]);
            stats.values_pruned += y[k].len() as u64;
            if !changed.contains(&var) {
                changed.push(var);
            }
            failed |= table.get(var).is_empty();
        }
        return RunOutcome { changed, failed, restarted_early: true, stats };
    }

    if opts.amended {
        // Tuples left over from an early exit would otherwise be dropped
        // entirely; X removals below would then be unsound.
        for b in drawn {
            skipped.push(b);
            stats.skipped_indices += 1;
        }
    }

    // Phase two: the set-aside tuples can still show X values supported.
    for b in &skipped {
        if x.is_empty() {
            break;
        }
        let cell = def.cell(b).expect("validated index");
        stats.cell_domain_reads += 1;
        x.difference_with(table.get(cell));
    }

    // Commit: whatever survived has no support.
    let mut changed: Vec<VarId> = Vec::new();
    for (k, yk) in y.iter().enumerate() {
        if !yk.is_empty() {
            let var = parts.index[k];
            table.get_mut(var).difference_with(yk);
            stats.values_pruned += yk.len() as u64;
            if !changed.contains(&var) {
                changed.push(var);
            }
        }
    }
    if !x.is_empty() {
        table.get_mut(parts.result).difference_with(&x);
        stats.values_pruned += x.len() as u64;
        if !changed.contains(&parts.result) {
            changed.push(parts.result);
        }
    }
    let failed = changed.iter().any(|&v| table.get(v).is_empty());
    RunOutcome { changed, failed, restarted_early: false, stats }
}

/// Runs the engine to a fixpoint from the model's initial domains.
pub fn arrac_fixpoint(model: &CspModel, opts: &ArracOptions) -> ClosureResult {
    arrac_fixpoint_table(model, model.initial_table(), opts)
}

/// Runs the engine to a fixpoint from the given table: passes of
/// per-constraint runs interleaved with cell handling and primitive
/// equality propagation, until a full pass changes nothing.
pub fn arrac_fixpoint_table(
    model: &CspModel,
    mut table: DomainTable,
    opts: &ArracOptions,
) -> ClosureResult {
    let mut stats = PropagationStats::default();
    let mut log: Vec<RuleApplication> = Vec::new();
    let mut active: Vec<Constraint> = model.constraints().to_vec();
    let mut failed = false;

    'outer: loop {
        let mut changed_any = false;
        // indexed because the rewrite arm replaces the entry in place
        #[allow(clippy::needless_range_loop)]
        for cid in 0..active.len() {
            match active[cid].clone() {
                c @ Constraint::ArrayEq { .. } => {
                    let outcome = arrac_run(model, &c, &mut table, opts);
                    stats.merge(&outcome.stats);
                    if !outcome.changed.is_empty() {
                        changed_any = true;
                    }
                    if outcome.failed {
                        failed = true;
                        break 'outer;
                    }
                    if outcome.restarted_early {
                        continue;
                    }
                    match opts.cell_mode {
                        CellMode::Prune => {
                            if let Some((cell, removed)) =
                                rule_rara(model, &c, &mut table, &mut stats)
                            {
                                if !removed.is_empty() {
                                    log.push(RuleApplication {
                                        rule: RuleTag::Rara,
                                        constraint: cid,
                                        var: cell,
                                        removed,
                                        rewrite: None,
                                    });
                                    changed_any = true;
                                    if table.get(cell).is_empty() {
                                        failed = true;
                                        break 'outer;
                                    }
                                }
                            }
                        }
                        CellMode::Rewrite => {
                            if let Ok(eq) = rule_rara_prime(model, &c, &table) {
                                log.push(RuleApplication {
                                    rule: RuleTag::RaraPrime,
                                    constraint: cid,
                                    var: array_parts(&c).unwrap().result,
                                    removed: Domain::empty(),
                                    rewrite: Some(eq.clone()),
                                });
                                active[cid] = eq;
                                changed_any = true;
                            }
                        }
                    }
                }
                Constraint::VarEq { a, b } => {
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
                            changed_any = true;
                            if table.get(v).is_empty() {
                                failed = true;
                                break 'outer;
                            }
                        }
                    }
                }
                Constraint::VarNeq { a, b } => {
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
                            changed_any = true;
                            if table.get(v).is_empty() {
                                failed = true;
                                break 'outer;
                            }
                        }
                    }
                }
                Constraint::NestedEq { .. } => {}
            }
        }
        if !changed_any {
            break;
        }
    }

    ClosureResult { table, stable: !failed, failed, log, stats }
}

/// The addressable index tuples whose cells share a value with `D_x` — the
/// cells the run regards as supporting. Only defined on an arc-consistent
/// constraint; a verification run checks that first.
pub fn supporting_cells(
    model: &CspModel,
    c: &Constraint,
    table: &DomainTable,
) -> Result<Vec<IndexTuple>, ArracError> {
    let mut probe = table.clone();
    let outcome = arrac_run(model, c, &mut probe, &ArracOptions::default());
    if !outcome.changed.is_empty() || outcome.failed {
        return Err(ArracError::NotArcConsistent);
    }
    let mut scratch = PropagationStats::default();
    if let Some((_, removed)) = rule_rara(model, c, &mut probe, &mut scratch) {
        if !removed.is_empty() {
            return Err(ArracError::NotArcConsistent);
        }
    }

    let parts = array_parts(c).expect("array constraint");
    let def = model.array(parts.array);
    let dims = index_dims(table, &parts.index);
    let d_x = table.get(parts.result);
    let mut out = Vec::new();
    for b in index_product(&dims) {
        let cell = def.cell(&b).expect("validated index");
        if d_x.intersects(table.get(cell)) {
            out.push(b);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Token;
    use crate::fixtures;
    use crate::model::ValidateOptions;
    use crate::oracle;

    fn dom(m: &CspModel, table: &DomainTable, name: &str) -> String {
        table.get(m.var_by_name(name).unwrap()).display(m.interner())
    }

    #[test]
    fn worked_2x3_run_counters() {
        let m = fixtures::worked_2x3_model();
        let mut table = m.initial_table();
        let outcome = arrac_run(&m, m.constraint(0), &mut table, &ArracOptions::default());
        assert!(outcome.changed.is_empty());
        assert!(!outcome.failed);
        assert_eq!(outcome.stats.t_computations, 4);
        assert_eq!(outcome.stats.cell_domain_reads, 4);
        assert_eq!(outcome.stats.skipped_indices, 2);
        assert_eq!(outcome.stats.values_pruned, 0);
        assert_eq!(table, m.initial_table());
    }

    #[test]
    fn worked_2x3_fixpoint_single_run() {
        let m = fixtures::worked_2x3_model();
        let res = arrac_fixpoint(&m, &ArracOptions::default());
        assert!(res.stable && !res.failed);
        assert_eq!(res.stats.runs, 1);
        assert_eq!(res.table, m.initial_table());
    }

    #[test]
    fn witness_amended_keeps_both_values() {
        let m = fixtures::witness_model();
        let opts = ArracOptions {
            order: IndexOrder::Fixed(fixtures::witness_order(&m)),
            ..Default::default()
        };
        let mut table = m.initial_table();
        let outcome = arrac_run(&m, m.constraint(0), &mut table, &opts);
        assert!(outcome.changed.is_empty());
        assert_eq!(dom(&m, &table, "x"), "{A, B}");
        assert_eq!(outcome.stats.t_computations, 2);
        assert_eq!(outcome.stats.skipped_indices, 2);
        // one skipped tuple read suffices to clear X
        assert_eq!(outcome.stats.cell_domain_reads, 3);

        let closed = oracle::ac_closure_oracle(&m, oracle::DEFAULT_LIMIT).unwrap();
        assert_eq!(table, closed);
    }

    #[test]
    fn witness_literal_mode_over_prunes() {
        let m = fixtures::witness_model();
        let opts = ArracOptions {
            amended: false,
            order: IndexOrder::Fixed(fixtures::witness_order(&m)),
            ..Default::default()
        };
        let mut table = m.initial_table();
        let outcome = arrac_run(&m, m.constraint(0), &mut table, &opts);
        let x = m.var_by_name("x").unwrap();
        assert_eq!(outcome.changed, vec![x]);
        // B is dropped although index (1,2) supports it
        assert_eq!(dom(&m, &table, "x"), "{A}");
    }

    #[test]
    fn unsupported_instance_fails() {
        let m = fixtures::unsupported_1d_model();
        let mut table = m.initial_table();
        let outcome = arrac_run(&m, m.constraint(0), &mut table, &ArracOptions::default());
        assert!(outcome.failed);
        assert!(table.get(m.var_by_name("x").unwrap()).is_empty());
        assert!(table.get(m.var_by_name("y").unwrap()).is_empty());
    }

    #[test]
    fn all_supported_family_is_linear_in_d() {
        for d in [4i64, 8, 16, 32] {
            let m = fixtures::all_supported_model(d);
            let mut table = m.initial_table();
            let outcome =
                arrac_run(&m, m.constraint(0), &mut table, &ArracOptions::default());
            assert!(outcome.changed.is_empty());
            assert_eq!(outcome.stats.t_computations, (2 * d - 1) as u64);
        }
    }

    #[test]
    fn fixpoint_vararray_both_cell_modes() {
        let m = fixtures::vararray_model();
        for cell_mode in [CellMode::Prune, CellMode::Rewrite] {
            let opts = ArracOptions { cell_mode, ..Default::default() };
            let res = arrac_fixpoint(&m, &opts);
            assert!(res.stable && !res.failed);
            assert_eq!(dom(&m, &res.table, "a[j]"), "{p, r}");
            assert_eq!(dom(&m, &res.table, "x"), "{p, r}");
        }
    }

    #[test]
    fn fixpoint_shared_array_matches_rules_engine() {
        let m = fixtures::shared_array_model();
        let res = arrac_fixpoint(&m, &ArracOptions::default());
        assert!(res.stable && !res.failed);
        assert_eq!(dom(&m, &res.table, "x"), "{p, r}");
        assert_eq!(dom(&m, &res.table, "y"), "{l}");
    }

    #[test]
    fn fixpoint_xor_relaxed_is_stable() {
        let m = fixtures::xor_model()
            .validate(ValidateOptions { allow_nonlinear: true })
            .unwrap();
        let res = arrac_fixpoint(&m, &ArracOptions::default());
        assert!(res.stable && !res.failed);
        assert_eq!(dom(&m, &res.table, "y"), "{0, 1}");
    }

    #[test]
    fn supporting_cells_worked_2x3() {
        let m = fixtures::worked_2x3_model();
        let table = m.initial_table();
        let cells = supporting_cells(&m, m.constraint(0), &table).unwrap();
        let shown: Vec<String> =
            cells.iter().map(|t| t.display(m.interner())).collect();
        assert_eq!(shown, vec!["(1,2)", "(1,3)", "(2,1)"]);
    }

    #[test]
    fn supporting_cells_rejects_unclosed() {
        let m = fixtures::unsupported_1d_model();
        let table = m.initial_table();
        assert_eq!(
            supporting_cells(&m, m.constraint(0), &table),
            Err(ArracError::NotArcConsistent)
        );
    }

    #[test]
    fn supporting_cells_singleton_index() {
        let m = fixtures::vararray_model();
        let res = arrac_fixpoint(&m, &ArracOptions::default());
        let cells = supporting_cells(&m, m.constraint(2), &res.table).unwrap();
        let shown: Vec<String> =
            cells.iter().map(|t| t.display(m.interner())).collect();
        assert_eq!(shown, vec!["(j)"]);
    }

    #[test]
    fn early_restart_commits_dimension_and_recovers() {
        // x={A}; row 1 holds B,B and row 2 holds A,A: after drawing
        // (1,1),(1,2),(2,1), value 1 of dimension one has no tuples left
        // and still sits in Y_1 — the restart trigger.
        let mut m = CspModel::new();
        let x = m.add_var("x", [Token::sym("A")]).unwrap();
        let y1 = m.add_var("y1", [Token::Int(1), Token::Int(2)]).unwrap();
        let y2 = m.add_var("y2", [Token::Int(1), Token::Int(2)]).unwrap();
        let bits = vec![Token::Int(1), Token::Int(2)];
        let a = m
            .add_const_array(
                "a",
                &[bits.clone(), bits],
                &[Token::sym("B"), Token::sym("B"), Token::sym("A"), Token::sym("A")],
            )
            .unwrap();
        m.add_array_eq(x, a, vec![y1, y2]);
        let m = m.validate(ValidateOptions::default()).unwrap();

        let opts = ArracOptions { early_restart: true, ..Default::default() };
        let mut table = m.initial_table();
        let outcome = arrac_run(&m, m.constraint(0), &mut table, &opts);
        assert!(outcome.restarted_early);
        assert_eq!(dom(&m, &table, "y1"), "{2}");

        let res = arrac_fixpoint(&m, &opts);
        assert!(res.stable && !res.failed);
        assert_eq!(dom(&m, &res.table, "y1"), "{2}");
        assert_eq!(dom(&m, &res.table, "y2"), "{1, 2}");
        assert_eq!(dom(&m, &res.table, "x"), "{A}");
        // early-restart result agrees with the default engine
        let plain = arrac_fixpoint(&m, &ArracOptions::default());
        assert_eq!(res.table, plain.table);
    }

    #[test]
    fn read_once_per_run() {
        for m in [
            fixtures::worked_2x3_model(),
            fixtures::witness_model(),
            fixtures::all_supported_model(8),
        ] {
            let mut table = m.initial_table();
            let c = m.constraint(0);
            let parts = array_parts(c).unwrap();
            let addressable: u64 = parts
                .index
                .iter()
                .map(|&v| table.get(v).len() as u64)
                .product();
            let outcome = arrac_run(&m, c, &mut table, &ArracOptions::default());
            assert!(outcome.stats.cell_domain_reads <= addressable);
            assert!(outcome.stats.t_computations <= addressable);
        }
    }
}
