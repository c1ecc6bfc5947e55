//! Canonical text form for models. Printing a parsed model and re-parsing
//! the output reproduces the same text byte for byte, so the printed form
//! doubles as a normalizer.
//!
//! Limits worth knowing: symbolic constants print literally, so a constant
//! that shares its spelling with a declared variable cannot be expressed
//! (the parser would resolve it to the variable), and a cell variable used
//! directly as a result or index has no printable name. Neither shape can
//! be produced by the parser itself.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use arrayprop::domain::{Domain, Token, Value};
use arrayprop::expr::Expression;
use arrayprop::model::{ArrayId, Constraint, CspModel, IndexTuple, VarId};

/// Integers first in numeric order, then symbols lexicographically:
/// independent of interning order, hence stable across round-trips.
fn token_cmp(a: &Token, b: &Token) -> Ordering {
    match (a, b) {
        (Token::Int(x), Token::Int(y)) => x.cmp(y),
        (Token::Sym(x), Token::Sym(y)) => x.cmp(y),
        (Token::Int(_), Token::Sym(_)) => Ordering::Less,
        (Token::Sym(_), Token::Int(_)) => Ordering::Greater,
    }
}

pub(crate) fn canon_values(m: &CspModel, values: impl Iterator<Item = Value>) -> Vec<Value> {
    let mut out: Vec<Value> = values.collect();
    out.sort_by(|a, b| token_cmp(m.token(*a), m.token(*b)));
    out
}

fn token_text(t: &Token) -> String {
    match t {
        Token::Sym(s) => s.clone(),
        Token::Int(i) => i.to_string(),
    }
}

pub(crate) fn domain_text(m: &CspModel, d: &Domain) -> String {
    let parts: Vec<String> =
        canon_values(m, d.iter()).iter().map(|&v| token_text(m.token(v))).collect();
    format!("{{{}}}", parts.join(", "))
}

fn atom_text(m: &CspModel, var: VarId) -> String {
    let v = m.var(var);
    match (v.frozen, v.domain.as_singleton()) {
        (true, Some(value)) => token_text(m.token(value)),
        _ => v.name.clone(),
    }
}

fn expr_text(m: &CspModel, e: &Expression) -> String {
    match e {
        Expression::Var(v) => atom_text(m, *v),
        Expression::Access { array, index } => {
            let parts: Vec<String> = index.iter().map(|e| expr_text(m, e)).collect();
            format!("{}[{}]", m.array(*array).name, parts.join(", "))
        }
    }
}

/// Per-position index sets of an array, in canonical order.
fn array_dims(m: &CspModel, array: ArrayId) -> Vec<Vec<Value>> {
    let def = m.array(array);
    let mut dims: Vec<BTreeSet<Value>> = vec![BTreeSet::new(); def.arity];
    for tuple in def.cells.keys() {
        for (k, &v) in tuple.0.iter().enumerate() {
            dims[k].insert(v);
        }
    }
    dims.into_iter().map(|set| canon_values(m, set.into_iter())).collect()
}

fn dim_text(m: &CspModel, dim: &[Value]) -> String {
    let ints: Vec<i64> = dim
        .iter()
        .filter_map(|&v| match m.token(v) {
            Token::Int(i) => Some(*i),
            Token::Sym(_) => None,
        })
        .collect();
    // `1..=n` collapses to its length; everything else spells the set out
    if ints.len() == dim.len() && ints.iter().enumerate().all(|(i, &x)| x == i as i64 + 1) {
        return ints.len().to_string();
    }
    let parts: Vec<String> = dim.iter().map(|&v| token_text(m.token(v))).collect();
    format!("{{{}}}", parts.join(", "))
}

fn cells_text(m: &CspModel, array: ArrayId, dims: &[Vec<Value>], prefix: &mut Vec<Value>) -> String {
    match dims.split_first() {
        None => {
            let cell = m
                .array(array)
                .cell(&IndexTuple(prefix.clone()))
                .expect("dims cover every cell");
            let value = m.var(cell).domain.as_singleton().expect("constant cell");
            token_text(m.token(value))
        }
        Some((dim, rest)) => {
            let parts: Vec<String> = dim
                .iter()
                .map(|&v| {
                    prefix.push(v);
                    let s = cells_text(m, array, rest, prefix);
                    prefix.pop();
                    s
                })
                .collect();
            format!("({})", parts.join(", "))
        }
    }
}

/// The model as a parseable file: variables, then arrays, then constraints,
/// each in declaration order, one statement per line.
pub fn print_model(m: &CspModel) -> String {
    let mut lines = Vec::new();
    for id in m.var_ids() {
        let v = m.var(id);
        if v.frozen || m.is_cell_var(id) {
            continue;
        }
        lines.push(format!("var {} in {};", v.name, domain_text(m, &v.domain)));
    }
    for def in m.arrays() {
        let id = m.array_by_name(&def.name).expect("registered array");
        let dims = array_dims(m, id);
        let dims_text: Vec<String> = dims.iter().map(|d| dim_text(m, d)).collect();
        if m.array_is_constant(id) {
            let mut prefix = Vec::new();
            lines.push(format!(
                "array {} [{}] = {};",
                def.name,
                dims_text.join(", "),
                cells_text(m, id, &dims, &mut prefix)
            ));
        } else {
            let first = def.cells.values().next().expect("arrays are never empty");
            lines.push(format!(
                "vararray {} [{}] in {};",
                def.name,
                dims_text.join(", "),
                domain_text(m, &m.var(first.var).domain)
            ));
        }
    }
    for c in m.constraints() {
        let line = match c {
            Constraint::ArrayEq { result, array, index } => {
                let parts: Vec<String> = index.iter().map(|r| atom_text(m, r.var)).collect();
                format!(
                    "constraint {} = {}[{}];",
                    atom_text(m, result.var),
                    m.array(*array).name,
                    parts.join(", ")
                )
            }
            Constraint::VarEq { a, b } => {
                // keep a declared variable on the left where possible
                let (a, b) = if m.var(*a).frozen && !m.var(*b).frozen { (b, a) } else { (a, b) };
                format!("constraint {} = {};", atom_text(m, *a), atom_text(m, *b))
            }
            Constraint::VarNeq { a, b } => {
                let (a, b) = if m.var(*a).frozen && !m.var(*b).frozen { (b, a) } else { (a, b) };
                format!("constraint {} != {};", atom_text(m, *a), atom_text(m, *b))
            }
            Constraint::NestedEq { lhs, rhs } => {
                format!("constraint {} = {};", expr_text(m, lhs), expr_text(m, rhs))
            }
        };
        lines.push(line);
    }
    lines.push(String::new());
    lines.join("\n")
}
