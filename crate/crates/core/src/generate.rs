//! Seeded random instance generation for the equivalence and soundness
//! test suites.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::domain::{Token, Value};
use crate::expr::{decompose_all, Expression};
use crate::model::{index_product, CspModel, IndexTuple, ValidateOptions, VarId};

/// Keeps every generated constraint within reach of the brute-force oracle.
const SPACE_CAP: u128 = 100_000;

const ALPHABET: [&str; 6] = ["A", "B", "C", "D", "E", "F"];

fn random_subset_with(rng: &mut ChaCha8Rng, pool: &[Token], must_have: &Token) -> Vec<Token> {
    let mut out: Vec<Token> = pool
        .iter()
        .filter(|t| *t != must_have && rng.gen_bool(0.5))
        .cloned()
        .collect();
    out.insert(rng.gen_range(0..=out.len()), must_have.clone());
    out
}

/// A random satisfiable linear model: one or two array constraints over
/// shared index variables (arity ≤ 3, dimension sizes ≤ 4, domain sizes
/// ≤ 4), occasionally extra equality/disequality constraints. A full
/// assignment is planted first and every domain is built around it, so the
/// model always has at least that solution. Oracle-enumerable per
/// constraint by construction.
pub fn random_linear_model(seed: u64) -> CspModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = CspModel::new();

    let n = rng.gen_range(1..=3);
    let sizes: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=4)).collect();
    let dims: Vec<Vec<Token>> =
        sizes.iter().map(|&s| (1..=s).map(Token::Int).collect()).collect();
    let letters: Vec<Token> = ALPHABET.iter().map(|s| Token::sym(*s)).collect();

    // the planted solution: an index tuple and a result value per array
    let planted_index: Vec<Token> =
        sizes.iter().map(|&s| Token::Int(rng.gen_range(1..=s))).collect();

    let mut index_vars: Vec<VarId> = Vec::new();
    for (k, dim) in dims.iter().enumerate() {
        let domain = random_subset_with(&mut rng, dim, &planted_index[k]);
        index_vars.push(m.add_var(format!("y{}", k + 1), domain).unwrap());
    }

    let array_count = if rng.gen_bool(0.25) { 2 } else { 1 };
    for a_idx in 0..array_count {
        let planted_value = letters[rng.gen_range(0..letters.len())].clone();
        let x_domain = random_subset_with(&mut rng, &letters, &planted_value);
        let x = m.add_var(format!("x{}", a_idx + 1), x_domain).unwrap();

        let array = m.add_array(format!("a{}", a_idx + 1), n).unwrap();
        // a few variable cells, everything else constant
        let tuples: Vec<IndexTuple> = {
            let dim_values: Vec<Vec<Value>> = dims
                .iter()
                .map(|d| d.iter().map(|t| m.intern(t.clone())).collect())
                .collect();
            index_product(&dim_values).collect()
        };
        let mut var_cell_budget = rng.gen_range(0..=4usize);
        let planted_tuple = IndexTuple(
            planted_index.iter().map(|t| m.intern(t.clone())).collect(),
        );
        let mut space: u128 = tuples.len() as u128; // rough driver for the cap
        for tuple in tuples {
            let is_planted = tuple == planted_tuple;
            let make_var = var_cell_budget > 0 && space < SPACE_CAP && rng.gen_bool(0.2);
            if make_var {
                var_cell_budget -= 1;
                let anchor = if is_planted {
                    planted_value.clone()
                } else {
                    letters[rng.gen_range(0..letters.len())].clone()
                };
                let pool: Vec<Token> = letters[..3].to_vec();
                let domain = random_subset_with(&mut rng, &pool, &anchor);
                space *= domain.len() as u128;
                let cell = m
                    .add_var(format!("a{}{}", a_idx + 1, tuple.display(m.interner())), domain)
                    .unwrap();
                m.bind_cell(array, tuple, cell).unwrap();
            } else {
                let value = if is_planted {
                    planted_value.clone()
                } else {
                    letters[rng.gen_range(0..letters.len())].clone()
                };
                m.bind_const_cell(array, tuple, value).unwrap();
            }
        }
        m.add_array_eq(x, array, index_vars.clone());

        // occasionally a disequality consistent with the planted solution
        if rng.gen_bool(0.3) {
            let forbidden: Vec<&Token> =
                letters.iter().filter(|t| **t != planted_value).collect();
            let c = m.constant(forbidden[rng.gen_range(0..forbidden.len())].clone());
            m.add_var_neq(x, c);
        }
    }

    // occasionally tie an index variable to a second variable
    if rng.gen_bool(0.3) {
        let k = rng.gen_range(0..index_vars.len());
        let domain = random_subset_with(&mut rng, &dims[k], &planted_index[k]);
        let twin = m.add_var("t1", domain).unwrap();
        m.add_var_eq(index_vars[k], twin);
    }

    m.validate(ValidateOptions::default()).unwrap()
}

/// A random non-linear instance: `x = a[y,y]` with the same variable in
/// both positions, constant cells. Not necessarily satisfiable. Validated
/// under relaxed semantics.
pub fn random_nonlinear_model(seed: u64) -> CspModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = CspModel::new();
    let d = rng.gen_range(2..=3);
    let dim: Vec<Token> = (1..=d).map(Token::Int).collect();
    let letters: Vec<Token> = ALPHABET[..4].iter().map(|s| Token::sym(*s)).collect();

    let anchor = letters[rng.gen_range(0..letters.len())].clone();
    let x_domain = random_subset_with(&mut rng, &letters, &anchor);
    let x = m.add_var("x", x_domain).unwrap();
    let y = m.add_var("y", dim.clone()).unwrap();
    let values: Vec<Token> = (0..d * d)
        .map(|_| letters[rng.gen_range(0..letters.len())].clone())
        .collect();
    let a = m.add_const_array("a", &[dim.clone(), dim], &values).unwrap();
    m.add_array_eq(x, a, vec![y, y]);
    m.validate(ValidateOptions { allow_nonlinear: true }).unwrap()
}

/// A random nested instance `x = a[b[y]]` over constant arrays. Returns the
/// composed form (one nested equation) and its decomposition; the two share
/// variable ids for everything but the fresh variable.
pub fn random_nested_pair(seed: u64) -> (CspModel, CspModel) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = CspModel::new();
    let outer = rng.gen_range(2..=4); // index range of a
    let inner = rng.gen_range(2..=4); // index range of b

    let letters: Vec<Token> = ALPHABET[..4].iter().map(|s| Token::sym(*s)).collect();
    let inner_dim: Vec<Token> = (1..=inner).map(Token::Int).collect();
    let outer_dim: Vec<Token> = (1..=outer).map(Token::Int).collect();

    let anchor = letters[rng.gen_range(0..letters.len())].clone();
    let x = m.add_var("x", random_subset_with(&mut rng, &letters, &anchor)).unwrap();
    let planted_y = Token::Int(rng.gen_range(1..=inner));
    let y = m.add_var("y", random_subset_with(&mut rng, &inner_dim, &planted_y)).unwrap();

    // b maps the inner range into a's index range
    let b_values: Vec<Token> =
        (0..inner).map(|_| Token::Int(rng.gen_range(1..=outer))).collect();
    let b = m.add_const_array("b", &[inner_dim], &b_values).unwrap();
    let a_values: Vec<Token> = (0..outer)
        .map(|_| letters[rng.gen_range(0..letters.len())].clone())
        .collect();
    let a = m.add_const_array("a", &[outer_dim], &a_values).unwrap();

    m.add_nested_eq(
        Expression::var(x),
        Expression::access(a, vec![Expression::access(b, vec![Expression::var(y)])]),
    );

    let decomposed = decompose_all(&m, false)
        .unwrap()
        .validate(ValidateOptions::default())
        .unwrap();
    (m, decomposed)
}
