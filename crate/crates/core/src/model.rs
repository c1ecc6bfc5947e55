//! Model structure: variables, arrays, constraints, validation.
//!
//! A [`CspModel`] owns the interner, the variable table with initial domains,
//! the array definitions and the constraint list. Models are immutable once
//! validated; propagation engines work on a private [`DomainTable`] copied
//! from the initial domains.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::domain::{Domain, Interner, Token, Value};
use crate::expr::Expression;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub(crate) u32);

impl VarId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ArrayId(pub(crate) u32);

impl ArrayId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// What a variable reference is used as inside a constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarRole {
    Plain,
    Result,
    Index,
    Cell,
}

/// A reference to a variable together with its role in the referencing
/// constraint. Identity (for linearity checks) is the id alone.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VarRef {
    pub var: VarId,
    pub role: VarRole,
}

impl VarRef {
    pub fn plain(var: VarId) -> VarRef {
        VarRef { var, role: VarRole::Plain }
    }
    pub fn result(var: VarId) -> VarRef {
        VarRef { var, role: VarRole::Result }
    }
    pub fn index(var: VarId) -> VarRef {
        VarRef { var, role: VarRole::Index }
    }
    pub fn cell(var: VarId) -> VarRef {
        VarRef { var, role: VarRole::Cell }
    }
}

/// A tuple of constant values addressing one array cell. Length equals the
/// arity of the array it addresses.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexTuple(pub Vec<Value>);

impl IndexTuple {
    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn display(&self, interner: &Interner) -> String {
        let parts: Vec<String> = self.0.iter().map(|&v| interner.token(v).to_string()).collect();
        format!("({})", parts.join(","))
    }
}

/// An arity-n array: a mapping from constant index tuples to cell variables.
///
/// Keys are unique, arity is uniform, and all mapped cell variables are
/// distinct (the builder enforces all three).
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayDef {
    pub name: String,
    pub arity: usize,
    pub cells: BTreeMap<IndexTuple, VarRef>,
}

impl ArrayDef {
    pub fn cell(&self, index: &IndexTuple) -> Option<VarId> {
        self.cells.get(index).map(|r| r.var)
    }

    pub fn cell_vars(&self) -> impl Iterator<Item = VarId> + '_ {
        self.cells.values().map(|r| r.var)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Constraint {
    /// `x = a[y_1, …, y_n]` over the result, the index variables and every
    /// cell variable of the array.
    ArrayEq {
        result: VarRef,
        array: ArrayId,
        index: Vec<VarRef>,
    },
    VarEq {
        a: VarId,
        b: VarId,
    },
    VarNeq {
        a: VarId,
        b: VarId,
    },
    /// Pre-decomposition form; rewritten into flat constraints before
    /// validation (see [`crate::expr::decompose_all`]).
    NestedEq {
        lhs: Expression,
        rhs: Expression,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: String,
    pub domain: Domain,
    /// Constants are modeled as frozen variables with singleton initial
    /// domains; they are anonymous and skipped in reports.
    pub frozen: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelError {
    DuplicateName(String),
    DuplicateIndex(String),
    DuplicateCellVar(String),
    ArityMismatch { array: String, expected: usize, got: usize },
    UnknownName(String),
    ValueNotInDomain { var: String, value: String },
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::DuplicateName(n) => write!(f, "duplicate name `{}`", n),
            ModelError::DuplicateIndex(s) => write!(f, "index {} mapped twice", s),
            ModelError::DuplicateCellVar(s) => write!(f, "cell variable {} mapped twice", s),
            ModelError::ArityMismatch { array, expected, got } => {
                write!(f, "array `{}` has arity {}, index has length {}", array, expected, got)
            }
            ModelError::UnknownName(n) => write!(f, "unknown name `{}`", n),
            ModelError::ValueNotInDomain { var, value } => {
                write!(f, "value {} not in the domain of `{}`", value, var)
            }
        }
    }
}

impl std::error::Error for ModelError {}

#[derive(Debug, Clone, PartialEq)]
pub enum ValidationError {
    /// A variable occurs more than once in one array constraint.
    NonLinearConstraint { constraint: usize, var: String },
    /// Some tuple addressable by the initial index domains has no mapping.
    InvalidIndex { constraint: usize, index: String },
    EmptyInitialDomain { var: String },
    /// A nested equality was not decomposed before validation.
    NestedNotDecomposed { constraint: usize },
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidationError::NonLinearConstraint { constraint, var } => {
                write!(f, "constraint #{}: variable `{}` occurs more than once", constraint, var)
            }
            ValidationError::InvalidIndex { constraint, index } => {
                write!(f, "constraint #{}: addressable index {} has no mapping", constraint, index)
            }
            ValidationError::EmptyInitialDomain { var } => {
                write!(f, "variable `{}` has an empty initial domain", var)
            }
            ValidationError::NestedNotDecomposed { constraint } => {
                write!(f, "constraint #{}: nested equality must be decomposed first", constraint)
            }
        }
    }
}

impl std::error::Error for ValidationError {}

#[derive(Debug, Clone, Copy, Default)]
pub struct ValidateOptions {
    /// Downgrades `NonLinearConstraint` to a "relaxed semantics" mark:
    /// propagation stays sound but completeness is not guaranteed.
    pub allow_nonlinear: bool,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CspModel {
    pub(crate) interner: Interner,
    vars: Vec<Variable>,
    var_names: HashMap<String, VarId>,
    arrays: Vec<ArrayDef>,
    array_names: HashMap<String, ArrayId>,
    constraints: Vec<Constraint>,
    /// Constraints validated under relaxed (non-linear) semantics.
    relaxed: Vec<usize>,
    validated: bool,
}

impl CspModel {
    pub fn new() -> CspModel {
        CspModel::default()
    }

    pub fn intern(&mut self, token: Token) -> Value {
        self.interner.intern(token)
    }

    pub fn interner(&self) -> &Interner {
        &self.interner
    }

    pub fn value_of(&self, token: &Token) -> Option<Value> {
        self.interner.lookup(token)
    }

    pub fn token(&self, v: Value) -> &Token {
        self.interner.token(v)
    }

    /// Declares a named variable with the given initial domain.
    pub fn add_var<I>(&mut self, name: impl Into<String>, tokens: I) -> Result<VarId, ModelError>
    where
        I: IntoIterator<Item = Token>,
    {
        let name = name.into();
        if self.var_names.contains_key(&name) || self.array_names.contains_key(&name) {
            return Err(ModelError::DuplicateName(name));
        }
        let domain = tokens.into_iter().map(|t| self.interner.intern(t)).collect();
        let id = VarId(self.vars.len() as u32);
        self.vars.push(Variable { name: name.clone(), domain, frozen: false });
        self.var_names.insert(name, id);
        self.validated = false;
        Ok(id)
    }

    /// Creates an anonymous frozen variable holding one constant. Each call
    /// makes a fresh variable, so repeated constants never alias and array
    /// constraints over constants stay linear.
    pub fn constant(&mut self, token: Token) -> VarId {
        let v = self.interner.intern(token.clone());
        let id = VarId(self.vars.len() as u32);
        self.vars.push(Variable {
            name: token.to_string(),
            domain: Domain::singleton(v),
            frozen: true,
        });
        self.validated = false;
        id
    }

    pub fn add_array(&mut self, name: impl Into<String>, arity: usize) -> Result<ArrayId, ModelError> {
        let name = name.into();
        if self.array_names.contains_key(&name) || self.var_names.contains_key(&name) {
            return Err(ModelError::DuplicateName(name));
        }
        let id = ArrayId(self.arrays.len() as u32);
        self.arrays.push(ArrayDef { name: name.clone(), arity, cells: BTreeMap::new() });
        self.array_names.insert(name, id);
        self.validated = false;
        Ok(id)
    }

    /// Maps one index tuple of an array to a cell variable.
    pub fn bind_cell(
        &mut self,
        array: ArrayId,
        index: IndexTuple,
        var: VarId,
    ) -> Result<(), ModelError> {
        let def = &self.arrays[array.index()];
        if index.arity() != def.arity {
            return Err(ModelError::ArityMismatch {
                array: def.name.clone(),
                expected: def.arity,
                got: index.arity(),
            });
        }
        if def.cells.contains_key(&index) {
            return Err(ModelError::DuplicateIndex(index.display(&self.interner)));
        }
        if def.cells.values().any(|r| r.var == var) {
            return Err(ModelError::DuplicateCellVar(self.vars[var.index()].name.clone()));
        }
        self.arrays[array.index()].cells.insert(index, VarRef::cell(var));
        self.validated = false;
        Ok(())
    }

    /// Convenience: binds a constant cell, creating its frozen variable.
    pub fn bind_const_cell(
        &mut self,
        array: ArrayId,
        index: IndexTuple,
        token: Token,
    ) -> Result<VarId, ModelError> {
        let var = self.constant(token);
        self.bind_cell(array, index, var)?;
        Ok(var)
    }

    /// Declares an array of constants. `dims` lists the index values per
    /// dimension; `values` supplies one constant per index tuple in
    /// lexicographic order (last dimension fastest).
    pub fn add_const_array(
        &mut self,
        name: impl Into<String>,
        dims: &[Vec<Token>],
        values: &[Token],
    ) -> Result<ArrayId, ModelError> {
        let id = self.add_array(name, dims.len())?;
        let dim_values: Vec<Vec<Value>> = dims
            .iter()
            .map(|d| d.iter().map(|t| self.interner.intern(t.clone())).collect())
            .collect();
        let tuples: Vec<IndexTuple> = index_product(&dim_values).collect();
        assert_eq!(
            tuples.len(),
            values.len(),
            "array `{}`: {} index tuples but {} values",
            self.arrays[id.index()].name,
            tuples.len(),
            values.len()
        );
        for (tuple, token) in tuples.into_iter().zip(values.iter().cloned()) {
            self.bind_const_cell(id, tuple, token)?;
        }
        Ok(id)
    }

    /// Declares an array of variables: one named cell variable per index
    /// tuple, each starting from the same domain. Cells are named
    /// `name[i,j]` and can be looked up with [`CspModel::var_by_name`].
    pub fn add_var_array(
        &mut self,
        name: impl Into<String>,
        dims: &[Vec<Token>],
        domain: &[Token],
    ) -> Result<ArrayId, ModelError> {
        let id = self.add_array(name, dims.len())?;
        let dim_values: Vec<Vec<Value>> = dims
            .iter()
            .map(|d| d.iter().map(|t| self.interner.intern(t.clone())).collect())
            .collect();
        let tuples: Vec<IndexTuple> = index_product(&dim_values).collect();
        for tuple in tuples {
            let cell_name = format!(
                "{}[{}]",
                self.arrays[id.index()].name,
                tuple
                    .0
                    .iter()
                    .map(|&v| self.interner.token(v).to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            );
            let cell = self.add_var(cell_name, domain.iter().cloned())?;
            self.bind_cell(id, tuple, cell)?;
        }
        Ok(id)
    }

    /// True when every cell of the array is a frozen constant.
    pub fn array_is_constant(&self, id: ArrayId) -> bool {
        self.arrays[id.index()]
            .cell_vars()
            .all(|v| self.vars[v.index()].frozen)
    }

    /// True when the variable is a cell of some array.
    pub fn is_cell_var(&self, var: VarId) -> bool {
        self.arrays.iter().any(|a| a.cell_vars().any(|v| v == var))
    }

    pub fn add_array_eq(&mut self, result: VarId, array: ArrayId, index: Vec<VarId>) -> usize {
        let c = Constraint::ArrayEq {
            result: VarRef::result(result),
            array,
            index: index.into_iter().map(VarRef::index).collect(),
        };
        self.push_constraint(c)
    }

    pub fn add_var_eq(&mut self, a: VarId, b: VarId) -> usize {
        self.push_constraint(Constraint::VarEq { a, b })
    }

    pub fn add_var_neq(&mut self, a: VarId, b: VarId) -> usize {
        self.push_constraint(Constraint::VarNeq { a, b })
    }

    pub fn add_nested_eq(&mut self, lhs: Expression, rhs: Expression) -> usize {
        self.push_constraint(Constraint::NestedEq { lhs, rhs })
    }

    pub(crate) fn push_constraint(&mut self, c: Constraint) -> usize {
        self.constraints.push(c);
        self.validated = false;
        self.constraints.len() - 1
    }

    /// Same variables, arrays and interner, empty constraint list. Used when
    /// rebuilding the constraint list during decomposition.
    pub(crate) fn clone_without_constraints(&self) -> CspModel {
        let mut copy = self.clone();
        copy.constraints.clear();
        copy.relaxed.clear();
        copy.validated = false;
        copy
    }

    /// Declares a synthetic variable (decomposition temporary). The name is
    /// adjusted on collision with declared names.
    pub(crate) fn add_fresh_var(&mut self, hint: usize, domain: Domain) -> VarId {
        let mut n = hint;
        let name = loop {
            let candidate = format!("_v{}", n);
            if !self.var_names.contains_key(&candidate) {
                break candidate;
            }
            n += 1;
        };
        let id = VarId(self.vars.len() as u32);
        self.vars.push(Variable { name: name.clone(), domain, frozen: false });
        self.var_names.insert(name, id);
        self.validated = false;
        id
    }

    pub fn var(&self, id: VarId) -> &Variable {
        &self.vars[id.index()]
    }

    pub fn var_by_name(&self, name: &str) -> Option<VarId> {
        self.var_names.get(name).copied()
    }

    pub fn var_count(&self) -> usize {
        self.vars.len()
    }

    pub fn var_ids(&self) -> impl Iterator<Item = VarId> {
        (0..self.vars.len() as u32).map(VarId)
    }

    pub fn array(&self, id: ArrayId) -> &ArrayDef {
        &self.arrays[id.index()]
    }

    pub fn array_by_name(&self, name: &str) -> Option<ArrayId> {
        self.array_names.get(name).copied()
    }

    pub fn arrays(&self) -> &[ArrayDef] {
        &self.arrays
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn constraint(&self, cid: usize) -> &Constraint {
        &self.constraints[cid]
    }

    pub fn is_validated(&self) -> bool {
        self.validated
    }

    pub fn is_relaxed(&self, cid: usize) -> bool {
        self.relaxed.contains(&cid)
    }

    pub fn relaxed_constraints(&self) -> &[usize] {
        &self.relaxed
    }

    /// All variables of a constraint, deduplicated, ascending. For an array
    /// constraint this includes every cell variable of the array.
    pub fn constraint_vars(&self, cid: usize) -> Vec<VarId> {
        let mut out = Vec::new();
        match &self.constraints[cid] {
            Constraint::ArrayEq { result, array, index } => {
                out.push(result.var);
                out.extend(index.iter().map(|r| r.var));
                out.extend(self.arrays[array.index()].cell_vars());
            }
            Constraint::VarEq { a, b } | Constraint::VarNeq { a, b } => {
                out.push(*a);
                out.push(*b);
            }
            Constraint::NestedEq { lhs, rhs } => {
                lhs.collect_vars(self, &mut out);
                rhs.collect_vars(self, &mut out);
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Certifies linearity and index validity. Consumes and returns the model
    /// so engines only ever see certified instances; validating a validated
    /// model yields an identical one.
    pub fn validate(mut self, opts: ValidateOptions) -> Result<CspModel, Vec<ValidationError>> {
        let mut errors = Vec::new();
        let mut relaxed = Vec::new();

        for (id, var) in self.vars.iter().enumerate() {
            if var.domain.is_empty() {
                errors.push(ValidationError::EmptyInitialDomain { var: var.name.clone() });
                let _ = id;
            }
        }

        for (cid, c) in self.constraints.iter().enumerate() {
            match c {
                Constraint::ArrayEq { result, array, index } => {
                    let def = &self.arrays[array.index()];
                    let mut seen: Vec<VarId> = Vec::new();
                    let occurs = |v: VarId, seen: &mut Vec<VarId>| -> bool {
                        if seen.contains(&v) {
                            true
                        } else {
                            seen.push(v);
                            false
                        }
                    };
                    let mut nonlinear = None;
                    for v in std::iter::once(result.var)
                        .chain(index.iter().map(|r| r.var))
                        .chain(def.cell_vars())
                    {
                        if occurs(v, &mut seen) {
                            nonlinear = Some(v);
                            break;
                        }
                    }
                    if let Some(v) = nonlinear {
                        if opts.allow_nonlinear {
                            relaxed.push(cid);
                        } else {
                            errors.push(ValidationError::NonLinearConstraint {
                                constraint: cid,
                                var: self.vars[v.index()].name.clone(),
                            });
                        }
                    }
                    // Index validity over the initial domains.
                    let dims: Vec<Vec<Value>> =
                        index.iter().map(|r| self.vars[r.var.index()].domain.to_vec()).collect();
                    for tuple in index_product(&dims) {
                        if !def.cells.contains_key(&tuple) {
                            errors.push(ValidationError::InvalidIndex {
                                constraint: cid,
                                index: tuple.display(&self.interner),
                            });
                            break;
                        }
                    }
                }
                Constraint::NestedEq { .. } => {
                    errors.push(ValidationError::NestedNotDecomposed { constraint: cid });
                }
                Constraint::VarEq { .. } | Constraint::VarNeq { .. } => {}
            }
        }

        if errors.is_empty() {
            self.relaxed = relaxed;
            self.validated = true;
            Ok(self)
        } else {
            Err(errors)
        }
    }

    /// Returns a copy of the model with `var` fixed to `value`.
    pub fn instantiate(&self, var: VarId, value: Value) -> Result<CspModel, ModelError> {
        if !self.vars[var.index()].domain.contains(value) {
            return Err(ModelError::ValueNotInDomain {
                var: self.vars[var.index()].name.clone(),
                value: self.interner.token(value).to_string(),
            });
        }
        let mut copy = self.clone();
        copy.vars[var.index()].domain = Domain::singleton(value);
        Ok(copy)
    }

    /// The initial domain table engines start from.
    pub fn initial_table(&self) -> DomainTable {
        DomainTable { domains: self.vars.iter().map(|v| v.domain.clone()).collect() }
    }

    /// Direct evaluation of every constraint under a full assignment.
    pub fn check_assignment(&self, asgn: &Assignment) -> bool {
        (0..self.constraints.len()).all(|cid| self.constraint_holds(cid, asgn))
    }

    /// Direct evaluation of one constraint under a full assignment. Array
    /// semantics are exact: a repeated index variable selects one cell.
    pub fn constraint_holds(&self, cid: usize, asgn: &Assignment) -> bool {
        match &self.constraints[cid] {
            Constraint::ArrayEq { result, array, index } => {
                let tuple = IndexTuple(index.iter().map(|r| asgn.get(r.var)).collect());
                match self.arrays[array.index()].cell(&tuple) {
                    Some(cell) => asgn.get(result.var) == asgn.get(cell),
                    None => false,
                }
            }
            Constraint::VarEq { a, b } => asgn.get(*a) == asgn.get(*b),
            Constraint::VarNeq { a, b } => asgn.get(*a) != asgn.get(*b),
            Constraint::NestedEq { lhs, rhs } => {
                match (lhs.eval(self, asgn), rhs.eval(self, asgn)) {
                    (Some(l), Some(r)) => l == r,
                    _ => false,
                }
            }
        }
    }
}

/// Mutable per-engine domain state, indexed by [`VarId`].
#[derive(Debug, Clone, PartialEq)]
pub struct DomainTable {
    domains: Vec<Domain>,
}

impl DomainTable {
    pub fn get(&self, var: VarId) -> &Domain {
        &self.domains[var.index()]
    }

    pub fn get_mut(&mut self, var: VarId) -> &mut Domain {
        &mut self.domains[var.index()]
    }

    pub fn set(&mut self, var: VarId, d: Domain) {
        self.domains[var.index()] = d;
    }

    pub fn assign(&mut self, var: VarId, value: Value) {
        debug_assert!(self.domains[var.index()].contains(value));
        self.domains[var.index()] = Domain::singleton(value);
    }

    pub fn len(&self) -> usize {
        self.domains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.domains.is_empty()
    }

    pub fn has_empty_domain(&self) -> bool {
        self.domains.iter().any(|d| d.is_empty())
    }

    pub fn all_singleton(&self) -> bool {
        self.domains.iter().all(|d| d.len() == 1)
    }

    /// Extracts the assignment when every domain is a singleton.
    pub fn to_assignment(&self) -> Option<Assignment> {
        let mut values = Vec::with_capacity(self.domains.len());
        for d in &self.domains {
            values.push(d.as_singleton()?);
        }
        Some(Assignment { values })
    }

    /// True when every domain of `self` is contained in the matching domain
    /// of `other`.
    pub fn is_refinement_of(&self, other: &DomainTable) -> bool {
        self.domains
            .iter()
            .zip(other.domains.iter())
            .all(|(a, b)| a.is_subset(b))
    }
}

/// A total assignment of values to variables, dense by [`VarId`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Assignment {
    pub values: Vec<Value>,
}

impl Assignment {
    pub fn get(&self, var: VarId) -> Value {
        self.values[var.index()]
    }
}

/// Lexicographic product of per-dimension value lists. Dimension lists must
/// already be in the order the product should follow.
pub fn index_product(dims: &[Vec<Value>]) -> IndexProduct<'_> {
    let empty = dims.iter().any(|d| d.is_empty());
    IndexProduct { dims, odometer: vec![0; dims.len()], done: empty }
}

pub struct IndexProduct<'a> {
    dims: &'a [Vec<Value>],
    odometer: Vec<usize>,
    done: bool,
}

impl Iterator for IndexProduct<'_> {
    type Item = IndexTuple;

    fn next(&mut self) -> Option<IndexTuple> {
        if self.done {
            return None;
        }
        let tuple = IndexTuple(
            self.odometer.iter().zip(self.dims.iter()).map(|(&i, d)| d[i]).collect(),
        );
        // Advance, rightmost dimension fastest.
        self.done = true;
        for i in (0..self.dims.len()).rev() {
            self.odometer[i] += 1;
            if self.odometer[i] < self.dims[i].len() {
                self.done = false;
                break;
            }
            self.odometer[i] = 0;
        }
        if self.dims.is_empty() {
            self.done = true;
        }
        Some(tuple)
    }
}

/// Total count of addressable index tuples.
pub fn product_size(dims: &[Vec<Value>]) -> u128 {
    dims.iter().map(|d| d.len() as u128).product()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn xor_model_is_nonlinear() {
        let model = fixtures::xor_model();
        let errs = model.validate(ValidateOptions::default()).unwrap_err();
        assert!(matches!(errs[0], ValidationError::NonLinearConstraint { .. }));
    }

    #[test]
    fn xor_model_relaxed_validates() {
        let model = fixtures::xor_model();
        let model = model.validate(ValidateOptions { allow_nonlinear: true }).unwrap();
        assert_eq!(model.relaxed_constraints().len(), 1);
    }

    #[test]
    fn worked_2x3_model_is_valid() {
        let model = fixtures::worked_2x3_model();
        assert!(model.is_validated());
    }

    #[test]
    fn missing_mapping_is_invalid_index() {
        let mut m = CspModel::new();
        let x = m.add_var("x", [Token::sym("B")]).unwrap();
        let y1 = m.add_var("y1", [Token::Int(1), Token::Int(2)]).unwrap();
        let y2 = m.add_var("y2", [Token::Int(1), Token::Int(2), Token::Int(3)]).unwrap();
        let a = m.add_array("a", 2).unwrap();
        for (i, j, s) in [(1, 1, "A"), (1, 2, "B"), (1, 3, "C"), (2, 1, "D"), (2, 2, "E")] {
            let idx = IndexTuple(vec![
                m.intern(Token::Int(i)),
                m.intern(Token::Int(j)),
            ]);
            m.bind_const_cell(a, idx, Token::sym(s)).unwrap();
        }
        m.add_array_eq(x, a, vec![y1, y2]);
        let errs = m.validate(ValidateOptions::default()).unwrap_err();
        assert!(errs.iter().any(|e| matches!(e, ValidationError::InvalidIndex { .. })));
    }

    #[test]
    fn empty_initial_domain_rejected() {
        let mut m = CspModel::new();
        m.add_var("x", []).unwrap();
        let errs = m.validate(ValidateOptions::default()).unwrap_err();
        assert!(matches!(errs[0], ValidationError::EmptyInitialDomain { .. }));
    }

    #[test]
    fn validate_is_idempotent() {
        let model = fixtures::worked_2x3_model();
        let again = model.clone().validate(ValidateOptions::default()).unwrap();
        assert_eq!(model, again);
    }

    #[test]
    fn instantiate_copies_and_checks_domain() {
        let model = fixtures::worked_2x3_model();
        let x = model.var_by_name("x").unwrap();
        let b = model.value_of(&Token::sym("B")).unwrap();
        let fixed = model.instantiate(x, b).unwrap();
        assert_eq!(fixed.var(x).domain, Domain::singleton(b));
        assert_eq!(model.var(x).domain.len(), 3);

        let a_val = model.value_of(&Token::sym("A")).unwrap();
        assert!(matches!(
            model.instantiate(x, a_val),
            Err(ModelError::ValueNotInDomain { .. })
        ));
    }

    #[test]
    fn instantiate_singleton_in_xor_model() {
        let model = fixtures::xor_model()
            .validate(ValidateOptions { allow_nonlinear: true })
            .unwrap();
        let y = model.var_by_name("y").unwrap();
        let zero = model.value_of(&Token::Int(0)).unwrap();
        let fixed = model.instantiate(y, zero).unwrap();
        assert_eq!(fixed.var(y).domain, Domain::singleton(zero));
    }

    #[test]
    fn linearity_flags_duplicates_anywhere() {
        // result duplicated as an index variable
        let mut m = CspModel::new();
        let x = m.add_var("x", [Token::Int(1), Token::Int(2)]).unwrap();
        let a = m.add_array("a", 1).unwrap();
        for i in [1, 2] {
            let idx = IndexTuple(vec![m.intern(Token::Int(i))]);
            m.bind_const_cell(a, idx, Token::Int(i)).unwrap();
        }
        m.add_array_eq(x, a, vec![x]);
        let errs = m.validate(ValidateOptions::default()).unwrap_err();
        assert!(matches!(errs[0], ValidationError::NonLinearConstraint { .. }));
    }

    #[test]
    fn duplicate_cell_binding_rejected() {
        let mut m = CspModel::new();
        let v = m.add_var("v", [Token::Int(7)]).unwrap();
        let a = m.add_array("a", 1).unwrap();
        let i1 = IndexTuple(vec![m.intern(Token::Int(1))]);
        let i2 = IndexTuple(vec![m.intern(Token::Int(2))]);
        m.bind_cell(a, i1.clone(), v).unwrap();
        assert!(matches!(m.bind_cell(a, i1, v), Err(ModelError::DuplicateIndex(_))));
        assert!(matches!(m.bind_cell(a, i2, v), Err(ModelError::DuplicateCellVar(_))));
    }

    #[test]
    fn index_product_is_lexicographic() {
        let dims = vec![
            vec![Value(0), Value(1)],
            vec![Value(5), Value(6), Value(7)],
        ];
        let tuples: Vec<IndexTuple> = index_product(&dims).collect();
        assert_eq!(tuples.len(), 6);
        assert_eq!(tuples[0].0, vec![Value(0), Value(5)]);
        assert_eq!(tuples[1].0, vec![Value(0), Value(6)]);
        assert_eq!(tuples[3].0, vec![Value(1), Value(5)]);
        assert_eq!(tuples[5].0, vec![Value(1), Value(7)]);
    }
}
