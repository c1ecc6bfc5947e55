//! Values and finite domains.
//!
//! Every constant that appears in a model (an integer or a symbol) is interned
//! once per model into a dense [`Value`] id. Domains are bit sets over those
//! ids, so intersection, union and difference are exact and cheap.

use std::collections::HashMap;
use std::fmt;

/// A discrete constant as written in a model: an integer or a symbol.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Token {
    Int(i64),
    Sym(String),
}

impl Token {
    pub fn sym(s: impl Into<String>) -> Token {
        Token::Sym(s.into())
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Int(i) => write!(f, "{}", i),
            Token::Sym(s) => write!(f, "{}", s),
        }
    }
}

/// Dense per-model id of an interned [`Token`]. Ordering and equality are by
/// id, which is a bijection with the token within one model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Value(pub(crate) u32);

impl Value {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Per-model bijection between tokens and dense value ids.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Interner {
    by_token: HashMap<Token, Value>,
    tokens: Vec<Token>,
}

impl Interner {
    pub fn new() -> Interner {
        Interner::default()
    }

    pub fn intern(&mut self, token: Token) -> Value {
        if let Some(&v) = self.by_token.get(&token) {
            return v;
        }
        let v = Value(self.tokens.len() as u32);
        self.by_token.insert(token.clone(), v);
        self.tokens.push(token);
        v
    }

    pub fn lookup(&self, token: &Token) -> Option<Value> {
        self.by_token.get(token).copied()
    }

    pub fn token(&self, v: Value) -> &Token {
        &self.tokens[v.index()]
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

const BLOCK_BITS: usize = 64;

/// A finite set of [`Value`]s backed by a bit set.
///
/// The empty domain is representable and signals failure during propagation.
/// Equality ignores capacity: two domains are equal iff they contain the same
/// values.
#[derive(Clone, Default, Eq)]
pub struct Domain {
    blocks: Vec<u64>,
}

impl Domain {
    pub fn empty() -> Domain {
        Domain::default()
    }

    pub fn singleton(v: Value) -> Domain {
        let mut d = Domain::empty();
        d.insert(v);
        d
    }

    pub fn from_values<I: IntoIterator<Item = Value>>(values: I) -> Domain {
        let mut d = Domain::empty();
        for v in values {
            d.insert(v);
        }
        d
    }

    pub fn insert(&mut self, v: Value) {
        let (block, bit) = (v.index() / BLOCK_BITS, v.index() % BLOCK_BITS);
        if block >= self.blocks.len() {
            self.blocks.resize(block + 1, 0);
        }
        self.blocks[block] |= 1u64 << bit;
    }

    /// Removes a value; returns whether it was present.
    pub fn remove(&mut self, v: Value) -> bool {
        let (block, bit) = (v.index() / BLOCK_BITS, v.index() % BLOCK_BITS);
        if block >= self.blocks.len() {
            return false;
        }
        let mask = 1u64 << bit;
        let present = self.blocks[block] & mask != 0;
        self.blocks[block] &= !mask;
        present
    }

    pub fn contains(&self, v: Value) -> bool {
        let (block, bit) = (v.index() / BLOCK_BITS, v.index() % BLOCK_BITS);
        self.blocks.get(block).is_some_and(|b| b & (1u64 << bit) != 0)
    }

    pub fn len(&self) -> usize {
        self.blocks.iter().map(|b| b.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.iter().all(|&b| b == 0)
    }

    /// The single element of a singleton domain, if it is one.
    pub fn as_singleton(&self) -> Option<Value> {
        let mut found = None;
        for (i, &b) in self.blocks.iter().enumerate() {
            if b == 0 {
                continue;
            }
            if found.is_some() || b.count_ones() != 1 {
                return None;
            }
            found = Some(Value((i * BLOCK_BITS + b.trailing_zeros() as usize) as u32));
        }
        found
    }

    pub fn first(&self) -> Option<Value> {
        self.iter().next()
    }

    pub fn intersect_with(&mut self, other: &Domain) {
        for (i, b) in self.blocks.iter_mut().enumerate() {
            *b &= other.blocks.get(i).copied().unwrap_or(0);
        }
    }

    pub fn union_with(&mut self, other: &Domain) {
        if other.blocks.len() > self.blocks.len() {
            self.blocks.resize(other.blocks.len(), 0);
        }
        for (i, &b) in other.blocks.iter().enumerate() {
            self.blocks[i] |= b;
        }
    }

    pub fn difference_with(&mut self, other: &Domain) {
        for (i, b) in self.blocks.iter_mut().enumerate() {
            *b &= !other.blocks.get(i).copied().unwrap_or(0);
        }
    }

    pub fn intersection(&self, other: &Domain) -> Domain {
        let mut d = self.clone();
        d.intersect_with(other);
        d
    }

    pub fn union(&self, other: &Domain) -> Domain {
        let mut d = self.clone();
        d.union_with(other);
        d
    }

    pub fn difference(&self, other: &Domain) -> Domain {
        let mut d = self.clone();
        d.difference_with(other);
        d
    }

    pub fn intersects(&self, other: &Domain) -> bool {
        self.blocks
            .iter()
            .zip(other.blocks.iter())
            .any(|(&a, &b)| a & b != 0)
    }

    pub fn is_subset(&self, other: &Domain) -> bool {
        self.blocks
            .iter()
            .enumerate()
            .all(|(i, &b)| b & !other.blocks.get(i).copied().unwrap_or(0) == 0)
    }

    /// Values in ascending id order.
    pub fn iter(&self) -> DomainIter<'_> {
        DomainIter {
            domain: self,
            block: 0,
            bits: self.blocks.first().copied().unwrap_or(0),
        }
    }

    pub fn to_vec(&self) -> Vec<Value> {
        self.iter().collect()
    }

    /// Renders the domain with its model's interner, e.g. `{p, r}`.
    pub fn display(&self, interner: &Interner) -> String {
        let items: Vec<String> = self.iter().map(|v| interner.token(v).to_string()).collect();
        format!("{{{}}}", items.join(", "))
    }
}

impl PartialEq for Domain {
    fn eq(&self, other: &Domain) -> bool {
        let common = self.blocks.len().min(other.blocks.len());
        self.blocks[..common] == other.blocks[..common]
            && self.blocks[common..].iter().all(|&b| b == 0)
            && other.blocks[common..].iter().all(|&b| b == 0)
    }
}

impl fmt::Debug for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(|v| v.0)).finish()
    }
}

impl FromIterator<Value> for Domain {
    fn from_iter<I: IntoIterator<Item = Value>>(iter: I) -> Domain {
        Domain::from_values(iter)
    }
}

pub struct DomainIter<'a> {
    domain: &'a Domain,
    block: usize,
    bits: u64,
}

impl Iterator for DomainIter<'_> {
    type Item = Value;

    fn next(&mut self) -> Option<Value> {
        loop {
            if self.bits != 0 {
                let bit = self.bits.trailing_zeros() as usize;
                self.bits &= self.bits - 1;
                return Some(Value((self.block * BLOCK_BITS + bit) as u32));
            }
            self.block += 1;
            if self.block >= self.domain.blocks.len() {
                return None;
            }
            self.bits = self.domain.blocks[self.block];
        }
    }
}
