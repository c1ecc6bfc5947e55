//! Nested array expressions and their decomposition into flat constraints.
//!
//! An equation between nested expressions such as `a[b[y], z] = c[w]` is not
//! handled directly by the propagators. [`decompose_all`] rewrites every such
//! equation into a sequence of single-access constraints over synthetic
//! variables, after which the usual engines apply.

use std::fmt;

use crate::domain::Domain;
use crate::model::{ArrayId, Assignment, Constraint, CspModel, IndexTuple, VarId};

/// A variable or a (possibly nested) array access.
#[derive(Debug, Clone, PartialEq)]
pub enum Expression {
    Var(VarId),
    Access { array: ArrayId, index: Vec<Expression> },
}

impl Expression {
    pub fn var(v: VarId) -> Expression {
        Expression::Var(v)
    }

    pub fn access(array: ArrayId, index: Vec<Expression>) -> Expression {
        Expression::Access { array, index }
    }

    /// Every variable the expression can touch: index variables plus, for
    /// each access, all cell variables of the accessed array.
    pub fn collect_vars(&self, model: &CspModel, out: &mut Vec<VarId>) {
        match self {
            Expression::Var(v) => out.push(*v),
            Expression::Access { array, index } => {
                for e in index {
                    e.collect_vars(model, out);
                }
                out.extend(model.array(*array).cell_vars());
            }
        }
    }

    /// Evaluates the expression under a total assignment. `None` when an
    /// access lands on an unmapped index.
    pub fn eval(&self, model: &CspModel, asgn: &Assignment) -> Option<crate::domain::Value> {
        match self {
            Expression::Var(v) => Some(asgn.get(*v)),
            Expression::Access { array, index } => {
                let mut tuple = Vec::with_capacity(index.len());
                for e in index {
                    tuple.push(e.eval(model, asgn)?);
                }
                let cell = model.array(*array).cell(&IndexTuple(tuple))?;
                Some(asgn.get(cell))
            }
        }
    }

    pub fn display(&self, model: &CspModel) -> String {
        match self {
            Expression::Var(v) => model.var(*v).name.clone(),
            Expression::Access { array, index } => {
                let parts: Vec<String> = index.iter().map(|e| e.display(model)).collect();
                format!("{}[{}]", model.array(*array).name, parts.join(","))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DecomposeError {
    /// Decomposition produced a single-access constraint in which a variable
    /// occurs twice; positional propagation would be incomplete for it.
    NonLinearAfterDecomposition { constraint: usize, var: String },
}

impl fmt::Display for DecomposeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecomposeError::NonLinearAfterDecomposition { constraint, var } => write!(
                f,
                "constraint #{}: `{}` occurs more than once after decomposition \
                 (rerun with non-linear constraints allowed to propagate it anyway)",
                constraint, var
            ),
        }
    }
}

impl std::error::Error for DecomposeError {}

/// Rewrites every nested equation of the model into flat constraints,
/// keeping flat constraints as they are. Synthetic variables are named
/// `_v0, _v1, …` in order of introduction (innermost access first, left to
/// right); each gets the union of the accessed array's cell domains.
pub fn decompose_all(model: &CspModel, allow_nonlinear: bool) -> Result<CspModel, DecomposeError> {
    let mut out = model.clone_without_constraints();
    let mut fresh = 0usize;
    for (cid, c) in model.constraints().iter().enumerate() {
        match c {
            Constraint::NestedEq { lhs, rhs } => {
                decompose_eq(&mut out, cid, lhs, rhs, &mut fresh, allow_nonlinear)?;
            }
            flat => {
                out.push_constraint(flat.clone());
            }
        }
    }
    Ok(out)
}

/// Flattens one equation `lhs = rhs` into the model. See [`decompose_all`].
fn decompose_eq(
    model: &mut CspModel,
    origin: usize,
    lhs: &Expression,
    rhs: &Expression,
    fresh: &mut usize,
    allow_nonlinear: bool,
) -> Result<(), DecomposeError> {
    match (lhs, rhs) {
        (Expression::Var(a), Expression::Var(b)) => {
            model.add_var_eq(*a, *b);
            Ok(())
        }
        (Expression::Var(x), Expression::Access { array, index })
        | (Expression::Access { array, index }, Expression::Var(x)) => {
            let idx = flatten_indices(model, origin, index, fresh, allow_nonlinear)?;
            emit_array_eq(model, origin, *x, *array, idx, allow_nonlinear)
        }
        (Expression::Access { .. }, Expression::Access { array, index }) => {
            // Left access becomes a synthetic variable, then the right access
            // constrains that same variable.
            let t = flatten_to_var(model, origin, lhs, fresh, allow_nonlinear)?;
            let idx = flatten_indices(model, origin, index, fresh, allow_nonlinear)?;
            emit_array_eq(model, origin, t, *array, idx, allow_nonlinear)
        }
    }
}

/// Reduces an expression to a variable, introducing a synthetic result
/// variable for an access.
fn flatten_to_var(
    model: &mut CspModel,
    origin: usize,
    expr: &Expression,
    fresh: &mut usize,
    allow_nonlinear: bool,
) -> Result<VarId, DecomposeError> {
    match expr {
        Expression::Var(v) => Ok(*v),
        Expression::Access { array, index } => {
            let idx = flatten_indices(model, origin, index, fresh, allow_nonlinear)?;
            let domain = cell_union(model, *array);
            let t = model.add_fresh_var(*fresh, domain);
            *fresh += 1;
            emit_array_eq(model, origin, t, *array, idx, allow_nonlinear)?;
            Ok(t)
        }
    }
}

fn flatten_indices(
    model: &mut CspModel,
    origin: usize,
    index: &[Expression],
    fresh: &mut usize,
    allow_nonlinear: bool,
) -> Result<Vec<VarId>, DecomposeError> {
    index
        .iter()
        .map(|e| flatten_to_var(model, origin, e, fresh, allow_nonlinear))
        .collect()
}

fn emit_array_eq(
    model: &mut CspModel,
    origin: usize,
    result: VarId,
    array: ArrayId,
    index: Vec<VarId>,
    allow_nonlinear: bool,
) -> Result<(), DecomposeError> {
    if !allow_nonlinear {
        let mut seen: Vec<VarId> = Vec::new();
        for v in std::iter::once(result)
            .chain(index.iter().copied())
            .chain(model.array(array).cell_vars())
        {
            if seen.contains(&v) {
                return Err(DecomposeError::NonLinearAfterDecomposition {
                    constraint: origin,
                    var: model.var(v).name.clone(),
                });
            }
            seen.push(v);
        }
    }
    model.add_array_eq(result, array, index);
    Ok(())
}

/// Union of the initial domains of every cell of the array: every value a
/// synthetic result variable could take.
fn cell_union(model: &CspModel, array: ArrayId) -> Domain {
    let mut d = Domain::empty();
    for cell in model.array(array).cell_vars() {
        d.union_with(&model.var(cell).domain);
    }
    d
}
