//! Small ready-made models shared by tests, benchmarks and docs.

use crate::domain::Token;
use crate::model::{CspModel, IndexTuple, ValidateOptions};

fn ints(range: std::ops::RangeInclusive<i64>) -> Vec<Token> {
    range.map(Token::Int).collect()
}

fn syms(names: &[&str]) -> Vec<Token> {
    names.iter().map(|s| Token::sym(*s)).collect()
}

/// The 2×3 worked example: constant array
///
/// ```text
///        1   2   3
///   1    A   B   C
///   2    D   E   F
/// ```
///
/// with `x ∈ {B,C,D}`, `y1 ∈ {1,2}`, `y2 ∈ {1,2,3}` and `x = a[y1,y2]`.
/// Already arc-consistent; a single engine run changes nothing.
pub fn worked_2x3_model() -> CspModel {
    let mut m = CspModel::new();
    let x = m.add_var("x", syms(&["B", "C", "D"])).unwrap();
    let y1 = m.add_var("y1", ints(1..=2)).unwrap();
    let y2 = m.add_var("y2", ints(1..=3)).unwrap();
    let a = m
        .add_const_array("a", &[ints(1..=2), ints(1..=3)], &syms(&["A", "B", "C", "D", "E", "F"]))
        .unwrap();
    m.add_array_eq(x, a, vec![y1, y2]);
    m.validate(ValidateOptions::default()).unwrap()
}

/// A 2×3 constant array with identical rows `(k↦p, l↦q, m↦r)` and the
/// constraints `v ≠ l`, `a[u,v] = x`, `a[z,y] = q`. Propagation reaches
/// `x ∈ {p,r}` and `y ∈ {l}`.
pub fn shared_array_model() -> CspModel {
    let mut m = CspModel::new();
    let dz = syms(&["i", "j"]);
    let dy = syms(&["k", "l", "m"]);
    let da = syms(&["p", "q", "r"]);
    let x = m.add_var("x", da.clone()).unwrap();
    let z = m.add_var("z", dz.clone()).unwrap();
    let y = m.add_var("y", dy.clone()).unwrap();
    let u = m.add_var("u", dz.clone()).unwrap();
    let v = m.add_var("v", dy.clone()).unwrap();
    let a = m
        .add_const_array("a", &[dz, dy], &syms(&["p", "q", "r", "p", "q", "r"]))
        .unwrap();
    let l = m.constant(Token::sym("l"));
    m.add_var_neq(v, l);
    m.add_array_eq(x, a, vec![u, v]);
    let q = m.constant(Token::sym("q"));
    m.add_array_eq(q, a, vec![z, y]);
    m.validate(ValidateOptions::default()).unwrap()
}

/// A one-dimensional array of variables `a[{i,j,k}]`, each cell in
/// `{p,q,r}`, with `y = j`, `x ≠ q`, `x = a[y]`. Propagation reaches
/// `a[j] ∈ {p,r}`.
pub fn vararray_model() -> CspModel {
    let mut m = CspModel::new();
    let dy = syms(&["i", "j", "k"]);
    let da = syms(&["p", "q", "r"]);
    let x = m.add_var("x", da.clone()).unwrap();
    let y = m.add_var("y", dy.clone()).unwrap();
    let a = m.add_var_array("a", &[dy], &da).unwrap();
    let j = m.constant(Token::sym("j"));
    m.add_var_eq(y, j);
    let q = m.constant(Token::sym("q"));
    m.add_var_neq(x, q);
    m.add_array_eq(x, a, vec![y]);
    m.validate(ValidateOptions::default()).unwrap()
}

/// The linearity-gap example `1 = xor[y,y]` with `y ∈ {0,1}` over the
/// boolean xor table. The repeated index variable makes the constraint
/// non-linear: positional propagation finds every value supported, yet the
/// constraint has no solution. Returned unvalidated so callers choose
/// strict or relaxed validation.
pub fn xor_model() -> CspModel {
    let mut m = CspModel::new();
    let y = m.add_var("y", ints(0..=1)).unwrap();
    let bits = ints(0..=1);
    let xor = m
        .add_const_array(
            "xor",
            &[bits.clone(), bits],
            &[Token::Int(0), Token::Int(1), Token::Int(1), Token::Int(0)],
        )
        .unwrap();
    let one = m.constant(Token::Int(1));
    m.add_array_eq(one, xor, vec![y, y]);
    m
}

/// The over-prune witness: `x ∈ {A,B}`, `y1,y2 ∈ {1,2}` and cells
///
/// ```text
///        1   2
///   1    A   B
///   2    C   A
/// ```
///
/// Processing `(1,1)` then `(2,2)` empties every `Y_k` while `X = {B}`;
/// whether the two untouched indices still get a chance to clear `X`
/// decides whether `B` survives. Already arc-consistent (`B` is supported
/// via index `(1,2)`).
pub fn witness_model() -> CspModel {
    let mut m = CspModel::new();
    let x = m.add_var("x", syms(&["A", "B"])).unwrap();
    let y1 = m.add_var("y1", ints(1..=2)).unwrap();
    let y2 = m.add_var("y2", ints(1..=2)).unwrap();
    let a = m
        .add_const_array("a", &[ints(1..=2), ints(1..=2)], &syms(&["A", "B", "C", "A"]))
        .unwrap();
    m.add_array_eq(x, a, vec![y1, y2]);
    m.validate(ValidateOptions::default()).unwrap()
}

/// The index processing order that triggers the witness: the two supporting
/// diagonal cells first.
pub fn witness_order(m: &CspModel) -> Vec<IndexTuple> {
    let one = m.value_of(&Token::Int(1)).unwrap();
    let two = m.value_of(&Token::Int(2)).unwrap();
    vec![
        IndexTuple(vec![one, one]),
        IndexTuple(vec![two, two]),
        IndexTuple(vec![one, two]),
        IndexTuple(vec![two, one]),
    ]
}

/// A d×d instance in which every index instantiation is part of a solution:
/// all cells hold the constant `A` and `x ∈ {A}`. The first engine loop
/// performs `2d − 1` intersection computations — linear in `d`, not `d²`.
pub fn all_supported_model(d: i64) -> CspModel {
    let mut m = CspModel::new();
    let x = m.add_var("x", syms(&["A"])).unwrap();
    let y1 = m.add_var("y1", ints(1..=d)).unwrap();
    let y2 = m.add_var("y2", ints(1..=d)).unwrap();
    let values: Vec<Token> = std::iter::repeat_n(Token::sym("A"), (d * d) as usize).collect();
    let a = m.add_const_array("a", &[ints(1..=d), ints(1..=d)], &values).unwrap();
    m.add_array_eq(x, a, vec![y1, y2]);
    m.validate(ValidateOptions::default()).unwrap()
}

/// `x ∈ {C}` against cells `a[1] = A`, `a[2] = B`: no value anywhere has
/// support, so propagation must empty both `x` and `y`.
pub fn unsupported_1d_model() -> CspModel {
    let mut m = CspModel::new();
    let x = m.add_var("x", syms(&["C"])).unwrap();
    let y = m.add_var("y", ints(1..=2)).unwrap();
    let a = m.add_const_array("a", &[ints(1..=2)], &syms(&["A", "B"])).unwrap();
    m.add_array_eq(x, a, vec![y]);
    m.validate(ValidateOptions::default()).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_build() {
        assert_eq!(worked_2x3_model().constraints().len(), 1);
        assert_eq!(shared_array_model().constraints().len(), 3);
        assert_eq!(vararray_model().constraints().len(), 3);
        assert_eq!(witness_model().constraints().len(), 1);
        assert!(all_supported_model(4).array_by_name("a").is_some());
        assert_eq!(unsupported_1d_model().constraints().len(), 1);
    }

    #[test]
    fn vararray_cells_are_variables() {
        let m = vararray_model();
        let aj = m.var_by_name("a[j]").unwrap();
        assert!(!m.var(aj).frozen);
        assert_eq!(m.var(aj).domain.len(), 3);
    }

    #[test]
    fn worked_2x3_has_three_solutions_by_hand() {
        // x=B via (1,2), x=C via (1,3), x=D via (2,1)
        let m = worked_2x3_model();
        let a = m.array_by_name("a").unwrap();
        let b_cell = {
            let one = m.value_of(&Token::Int(1)).unwrap();
            let two = m.value_of(&Token::Int(2)).unwrap();
            m.array(a).cell(&IndexTuple(vec![one, two])).unwrap()
        };
        let b_val = m.value_of(&Token::sym("B")).unwrap();
        assert!(m.var(b_cell).domain.contains(b_val));
        assert!(m.var(b_cell).frozen);
    }
}
