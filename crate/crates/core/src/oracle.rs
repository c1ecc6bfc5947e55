//! Brute-force ground truth: solution enumeration and the support-based
//! arc-consistency closure.
//!
//! Everything here evaluates constraints by direct enumeration — including
//! exact handling of repeated variables — and is used by tests to certify
//! the propagation engines. None of it is a performance path.

use std::fmt;

use crate::domain::Value;
use crate::model::{index_product, product_size, Assignment, CspModel, DomainTable, VarId};

/// Default cap on enumerated assignments (global or per constraint).
pub const DEFAULT_LIMIT: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleError {
    SearchSpaceTooLarge { space: u128, limit: u64 },
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::SearchSpaceTooLarge { space, limit } => {
                write!(f, "search space of {} assignments exceeds the limit of {}", space, limit)
            }
        }
    }
}

impl std::error::Error for OracleError {}

/// Every solution of the model, in lexicographic order by variable id then
/// value. The whole assignment space must fit under `limit`.
pub fn enumerate_solutions(model: &CspModel, limit: u64) -> Result<Vec<Assignment>, OracleError> {
    enumerate_solutions_table(model, &model.initial_table(), limit)
}

/// As [`enumerate_solutions`] but over an explicit domain table.
pub fn enumerate_solutions_table(
    model: &CspModel,
    table: &DomainTable,
    limit: u64,
) -> Result<Vec<Assignment>, OracleError> {
    let dims: Vec<Vec<Value>> =
        model.var_ids().map(|v| table.get(v).to_vec()).collect();
    let space = product_size(&dims);
    if space > limit as u128 {
        return Err(OracleError::SearchSpaceTooLarge { space, limit });
    }
    let mut out = Vec::new();
    for tuple in index_product(&dims) {
        let asgn = Assignment { values: tuple.0 };
        if model.check_assignment(&asgn) {
            out.push(asgn);
        }
    }
    Ok(out)
}

/// Whether `var = value` participates in some solution of constraint `cid`,
/// enumerating only over that constraint's variables.
pub fn value_supported(
    model: &CspModel,
    table: &DomainTable,
    cid: usize,
    var: VarId,
    value: Value,
    limit: u64,
) -> Result<bool, OracleError> {
    let vars = model.constraint_vars(cid);
    debug_assert!(vars.contains(&var));
    let dims: Vec<Vec<Value>> = vars
        .iter()
        .map(|&v| if v == var { vec![value] } else { table.get(v).to_vec() })
        .collect();
    let space = product_size(&dims);
    if space > limit as u128 {
        return Err(OracleError::SearchSpaceTooLarge { space, limit });
    }
    // Variables outside the constraint are never read by constraint_holds;
    // fill the scratch assignment with a placeholder.
    let placeholder = Value(0);
    let mut scratch = Assignment { values: vec![placeholder; model.var_count()] };
    for tuple in index_product(&dims) {
        for (&v, &d) in vars.iter().zip(tuple.0.iter()) {
            scratch.values[v.index()] = d;
        }
        if model.constraint_holds(cid, &scratch) {
            return Ok(true);
        }
    }
    Ok(false)
}

/// The unique maximal arc-consistent refinement of the model's initial
/// domains: repeatedly drops every value without support in some constraint
/// until nothing changes. Domains may come back empty (inconsistency); no
/// short-circuit, so the result is the true closure even then.
pub fn ac_closure_oracle(model: &CspModel, limit: u64) -> Result<DomainTable, OracleError> {
    ac_closure_oracle_table(model, model.initial_table(), limit)
}

/// As [`ac_closure_oracle`] but starting from an explicit table.
pub fn ac_closure_oracle_table(
    model: &CspModel,
    mut table: DomainTable,
    limit: u64,
) -> Result<DomainTable, OracleError> {
    loop {
        let mut changed = false;
        for cid in 0..model.constraints().len() {
            for var in model.constraint_vars(cid) {
                for value in table.get(var).to_vec() {
                    if !value_supported(model, &table, cid, var, value, limit)? {
                        table.get_mut(var).remove(value);
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            return Ok(table);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Token;
    use crate::fixtures;
    use crate::model::ValidateOptions;

    fn names(model: &CspModel, asgn: &Assignment, vars: &[&str]) -> Vec<String> {
        vars.iter()
            .map(|n| {
                let v = model.var_by_name(n).unwrap();
                model.token(asgn.get(v)).to_string()
            })
            .collect()
    }

    #[test]
    fn worked_2x3_has_exactly_three_solutions() {
        let m = fixtures::worked_2x3_model();
        let sols = enumerate_solutions(&m, DEFAULT_LIMIT).unwrap();
        let picked: Vec<Vec<String>> =
            sols.iter().map(|s| names(&m, s, &["x", "y1", "y2"])).collect();
        assert_eq!(
            picked,
            vec![
                vec!["B".to_string(), "1".to_string(), "2".to_string()],
                vec!["C".to_string(), "1".to_string(), "3".to_string()],
                vec!["D".to_string(), "2".to_string(), "1".to_string()],
            ]
        );
    }

    #[test]
    fn xor_model_has_no_solution() {
        let m = fixtures::xor_model()
            .validate(ValidateOptions { allow_nonlinear: true })
            .unwrap();
        assert_eq!(enumerate_solutions(&m, DEFAULT_LIMIT).unwrap(), vec![]);
    }

    #[test]
    fn empty_domain_means_no_solutions() {
        let mut m = CspModel::new();
        let x = m.add_var("x", [Token::Int(1)]).unwrap();
        let y = m.add_var("y", [Token::Int(1), Token::Int(2)]).unwrap();
        m.add_var_eq(x, y);
        let mut table = m.initial_table();
        table.get_mut(x).remove(m.value_of(&Token::Int(1)).unwrap());
        assert_eq!(enumerate_solutions_table(&m, &table, DEFAULT_LIMIT).unwrap(), vec![]);
    }

    #[test]
    fn xor_closure_empties_y() {
        let m = fixtures::xor_model()
            .validate(ValidateOptions { allow_nonlinear: true })
            .unwrap();
        let closed = ac_closure_oracle(&m, DEFAULT_LIMIT).unwrap();
        let y = m.var_by_name("y").unwrap();
        assert!(closed.get(y).is_empty());
    }

    #[test]
    fn shared_array_closure_matches_expected_columns() {
        let m = fixtures::shared_array_model();
        let closed = ac_closure_oracle(&m, DEFAULT_LIMIT).unwrap();
        let x = m.var_by_name("x").unwrap();
        let y = m.var_by_name("y").unwrap();
        assert_eq!(closed.get(x).display(m.interner()), "{p, r}");
        assert_eq!(closed.get(y).display(m.interner()), "{l}");
    }

    #[test]
    fn worked_2x3_is_already_arc_consistent() {
        let m = fixtures::worked_2x3_model();
        let closed = ac_closure_oracle(&m, DEFAULT_LIMIT).unwrap();
        assert_eq!(closed, m.initial_table());
    }

    #[test]
    fn closure_is_idempotent() {
        let m = fixtures::shared_array_model();
        let once = ac_closure_oracle(&m, DEFAULT_LIMIT).unwrap();
        let twice = ac_closure_oracle_table(&m, once.clone(), DEFAULT_LIMIT).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn space_guard_trips() {
        let mut m = CspModel::new();
        let d: Vec<Token> = (0..100).map(Token::Int).collect();
        for i in 0..4 {
            m.add_var(format!("v{}", i), d.clone()).unwrap();
        }
        let err = enumerate_solutions(&m, DEFAULT_LIMIT).unwrap_err();
        assert!(matches!(err, OracleError::SearchSpaceTooLarge { .. }));
    }
}
