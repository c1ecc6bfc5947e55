//! Propagation-driven backtracking search over validated models.

use crate::arrac::{arrac_fixpoint_table, ArracOptions};
use crate::model::{Assignment, CspModel, DomainTable, VarId};
use crate::rules::{rsarr_closure_table, ClosureOptions, ClosureResult};
use crate::stats::PropagationStats;

/// Which propagation engine drives search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Engine {
    Naive,
    #[default]
    Arrac,
}

impl Engine {
    pub fn as_str(self) -> &'static str {
        match self {
            Engine::Naive => "naive",
            Engine::Arrac => "arrac",
        }
    }
}

impl std::str::FromStr for Engine {
    type Err = String;

    fn from_str(s: &str) -> Result<Engine, String> {
        match s {
            "naive" => Ok(Engine::Naive),
            "arrac" => Ok(Engine::Arrac),
            other => Err(format!("unknown engine `{}` (expected naive or arrac)", other)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VarOrder {
    FirstUnbound,
    #[default]
    SmallestDomain,
}

#[derive(Debug, Clone, Default)]
pub struct SearchOptions {
    pub engine: Engine,
    pub var_order: VarOrder,
    /// Stop after this many solutions; `None` collects all.
    pub limit: Option<usize>,
    /// Configuration for the naive engine.
    pub closure: ClosureOptions,
    /// Configuration for the one-pass engine.
    pub arrac: ArracOptions,
}

impl SearchOptions {
    pub fn with_engine(engine: Engine) -> SearchOptions {
        SearchOptions { engine, ..Default::default() }
    }
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    /// Value order is ascending, so solutions arrive in a deterministic
    /// order; not necessarily sorted by variable id.
    pub solutions: Vec<Assignment>,
    pub stats: PropagationStats,
}

/// Runs the selected engine to a fixpoint from the model's initial domains.
pub fn propagate(model: &CspModel, opts: &SearchOptions) -> ClosureResult {
    propagate_table(model, model.initial_table(), opts)
}

/// Runs the selected engine to a fixpoint from the given table.
pub fn propagate_table(
    model: &CspModel,
    table: DomainTable,
    opts: &SearchOptions,
) -> ClosureResult {
    match opts.engine {
        Engine::Naive => rsarr_closure_table(model, table, &opts.closure),
        Engine::Arrac => arrac_fixpoint_table(model, table, &opts.arrac),
    }
}

/// Depth-first search: propagate, branch on an unbound variable, value
/// order ascending, backtrack on failure. Every reported solution passes
/// direct constraint evaluation.
pub fn solve(model: &CspModel, opts: &SearchOptions) -> SolveResult {
    let mut result = SolveResult { solutions: Vec::new(), stats: PropagationStats::default() };
    dfs(model, model.initial_table(), 0, opts, &mut result);
    result
}

/// Returns true when the solution limit has been reached.
fn dfs(
    model: &CspModel,
    table: DomainTable,
    depth: u32,
    opts: &SearchOptions,
    out: &mut SolveResult,
) -> bool {
    let closed = propagate_table(model, table, opts);
    out.stats.merge(&closed.stats);
    if closed.failed {
        if depth > 0 {
            out.stats.backtracks += 1;
        }
        return false;
    }
    if closed.table.all_singleton() {
        let asgn = closed.table.to_assignment().expect("all singleton");
        // Relaxed (non-linear) propagation can stabilize on a non-solution;
        // direct evaluation is the final word.
        if model.check_assignment(&asgn) {
            out.solutions.push(asgn);
            return opts.limit.is_some_and(|n| out.solutions.len() >= n);
        }
        if depth > 0 {
            out.stats.backtracks += 1;
        }
        return false;
    }

    let var = choose_var(model, &closed.table, opts.var_order);
    for value in closed.table.get(var).to_vec() {
        let mut child = closed.table.clone();
        child.assign(var, value);
        if dfs(model, child, depth + 1, opts, out) {
            return true;
        }
    }
    false
}

fn choose_var(model: &CspModel, table: &DomainTable, order: VarOrder) -> VarId {
    let unbound = model.var_ids().filter(|&v| table.get(v).len() > 1);
    match order {
        VarOrder::FirstUnbound => unbound.min_by_key(|v| v.index()),
        VarOrder::SmallestDomain => {
            unbound.min_by_key(|&v| (table.get(v).len(), v.index()))
        }
    }
    .expect("some unbound variable")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Token;
    use crate::fixtures;
    use crate::model::ValidateOptions;
    use crate::oracle;

    fn sorted(mut v: Vec<Assignment>) -> Vec<Assignment> {
        v.sort();
        v
    }

    #[test]
    fn worked_2x3_solutions_match_oracle() {
        let m = fixtures::worked_2x3_model();
        let expected = oracle::enumerate_solutions(&m, oracle::DEFAULT_LIMIT).unwrap();
        for engine in [Engine::Naive, Engine::Arrac] {
            let res = solve(&m, &SearchOptions::with_engine(engine));
            assert_eq!(sorted(res.solutions), expected);
        }
    }

    #[test]
    fn xor_relaxed_search_finds_nothing() {
        let m = fixtures::xor_model()
            .validate(ValidateOptions { allow_nonlinear: true })
            .unwrap();
        let res = solve(&m, &SearchOptions::default());
        assert!(res.solutions.is_empty());
        // exploring at most the two values of y
        assert!(res.stats.backtracks <= 2);
    }

    #[test]
    fn failed_root_has_zero_backtracks() {
        let m = fixtures::unsupported_1d_model();
        let res = solve(&m, &SearchOptions::default());
        assert!(res.solutions.is_empty());
        assert_eq!(res.stats.backtracks, 0);
    }

    #[test]
    fn solution_limit_stops_search() {
        let m = fixtures::worked_2x3_model();
        let res = solve(
            &m,
            &SearchOptions { limit: Some(1), ..Default::default() },
        );
        assert_eq!(res.solutions.len(), 1);
    }

    #[test]
    fn var_orders_agree_on_solution_set() {
        let m = fixtures::shared_array_model();
        let mut tables = Vec::new();
        for var_order in [VarOrder::FirstUnbound, VarOrder::SmallestDomain] {
            let res = solve(&m, &SearchOptions { var_order, ..Default::default() });
            tables.push(sorted(res.solutions));
        }
        assert_eq!(tables[0], tables[1]);
        assert!(!tables[0].is_empty());
    }

    #[test]
    fn every_solution_satisfies_every_constraint() {
        let m = fixtures::shared_array_model();
        let res = solve(&m, &SearchOptions::default());
        for s in &res.solutions {
            assert!(m.check_assignment(s));
        }
    }

    #[test]
    fn propagation_alone_solves_without_backtracks() {
        // x != A forces x={B}, which forces y=3
        let mut m = CspModel::new();
        let x = m.add_var("x", [Token::sym("A"), Token::sym("B")]).unwrap();
        let y = m
            .add_var("y", [Token::Int(1), Token::Int(2), Token::Int(3)])
            .unwrap();
        let a = m
            .add_const_array(
                "a",
                &[vec![Token::Int(1), Token::Int(2), Token::Int(3)]],
                &[Token::sym("A"), Token::sym("A"), Token::sym("B")],
            )
            .unwrap();
        m.add_array_eq(x, a, vec![y]);
        let a_const = m.constant(Token::sym("A"));
        m.add_var_neq(x, a_const);
        let m = m.validate(ValidateOptions::default()).unwrap();

        let res = solve(&m, &SearchOptions::default());
        assert_eq!(res.solutions.len(), 1);
        assert_eq!(res.stats.backtracks, 0);
        let y3 = m.value_of(&Token::Int(3)).unwrap();
        assert_eq!(res.solutions[0].get(y), y3);
        let _ = x;
    }

    #[test]
    fn backtracks_counted_per_failure() {
        // three variables over two values, pairwise distinct: unsatisfiable,
        // and disequality propagation cannot see it before branching. Each
        // branch on the first variable collapses the other two to the same
        // singleton and fails one level down.
        let mut m = CspModel::new();
        let two = [Token::Int(1), Token::Int(2)];
        let u = m.add_var("u", two.clone()).unwrap();
        let v = m.add_var("v", two.clone()).unwrap();
        let w = m.add_var("w", two).unwrap();
        m.add_var_neq(u, v);
        m.add_var_neq(u, w);
        m.add_var_neq(v, w);
        let m = m.validate(ValidateOptions::default()).unwrap();

        let res = solve(&m, &SearchOptions::default());
        assert!(res.solutions.is_empty());
        assert_eq!(res.stats.backtracks, 2);
    }
}
