//! The model-file language: a handful of declaration forms, one per
//! statement, each terminated by a semicolon.
//!
//! ```text
//! model      := (decl ";")*
//! decl       := varDecl | constArray | varArray | constraint
//! varDecl    := "var" IDENT "in" valueSet
//! constArray := "array" IDENT "[" dims "]" "=" nestedTuple
//! varArray   := "vararray" IDENT "[" dims "]" "in" valueSet
//! constraint := "constraint" (expr "=" expr
//!                            | IDENT "!=" atom
//!                            | "alldifferent" "(" identList ")")
//! dims       := dim ("," dim)*        dim := INT | valueSet
//! valueSet   := "{" atom ("," atom)* "}"
//! expr       := atom | IDENT "[" expr ("," expr)* "]"
//! atom       := IDENT | INT
//! ```
//!
//! An integer dimension `n` stands for the index set `1..=n`. In constraint
//! position an identifier names a declared variable if one exists and is a
//! symbolic constant otherwise; integers are always constants. Nested
//! accesses are flattened through fresh variables after parsing.

use std::fmt;

use arrayprop::domain::Token;
use arrayprop::expr::{decompose_all, Expression};
use arrayprop::model::{Constraint, CspModel, ValidateOptions, VarId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub pos: Pos,
    pub msg: String,
}

impl ParseError {
    fn new(pos: Pos, msg: impl Into<String>) -> ParseError {
        ParseError { pos, msg: msg.into() }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.pos.line, self.pos.col, self.msg)
    }
}

impl std::error::Error for ParseError {}

// ---------------------------------------------------------------- lexing

#[derive(Debug, Clone, PartialEq, Eq)]
enum TokKind {
    Ident(String),
    Int(i64),
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    LParen,
    RParen,
    Comma,
    Semi,
    Eq,
    Neq,
}

impl TokKind {
    fn describe(&self) -> String {
        match self {
            TokKind::Ident(s) => format!("`{}`", s),
            TokKind::Int(i) => format!("`{}`", i),
            TokKind::LBrace => "`{`".into(),
            TokKind::RBrace => "`}`".into(),
            TokKind::LBracket => "`[`".into(),
            TokKind::RBracket => "`]`".into(),
            TokKind::LParen => "`(`".into(),
            TokKind::RParen => "`)`".into(),
            TokKind::Comma => "`,`".into(),
            TokKind::Semi => "`;`".into(),
            TokKind::Eq => "`=`".into(),
            TokKind::Neq => "`!=`".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Tok {
    kind: TokKind,
    pos: Pos,
}

fn lex(text: &str) -> (Vec<Tok>, Vec<ParseError>) {
    let mut toks = Vec::new();
    let mut errors = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = text.chars().peekable();
    while let Some(&ch) = chars.peek() {
        let pos = Pos { line, col };
        let mut advance = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next().unwrap();
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            c
        };
        match ch {
            c if c.is_whitespace() => {
                advance(&mut chars);
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        s.push(advance(&mut chars));
                    } else {
                        break;
                    }
                }
                toks.push(Tok { kind: TokKind::Ident(s), pos });
            }
            c if c.is_ascii_digit() || c == '-' => {
                let mut s = String::new();
                s.push(advance(&mut chars));
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_digit() {
                        s.push(advance(&mut chars));
                    } else {
                        break;
                    }
                }
                match s.parse::<i64>() {
                    Ok(i) => toks.push(Tok { kind: TokKind::Int(i), pos }),
                    Err(_) => errors.push(ParseError::new(pos, format!("bad integer `{}`", s))),
                }
            }
            '!' => {
                advance(&mut chars);
                if chars.peek() == Some(&'=') {
                    advance(&mut chars);
                    toks.push(Tok { kind: TokKind::Neq, pos });
                } else {
                    errors.push(ParseError::new(pos, "expected `!=`"));
                }
            }
            _ => {
                let c = advance(&mut chars);
                let kind = match c {
                    '{' => Some(TokKind::LBrace),
                    '}' => Some(TokKind::RBrace),
                    '[' => Some(TokKind::LBracket),
                    ']' => Some(TokKind::RBracket),
                    '(' => Some(TokKind::LParen),
                    ')' => Some(TokKind::RParen),
                    ',' => Some(TokKind::Comma),
                    ';' => Some(TokKind::Semi),
                    '=' => Some(TokKind::Eq),
                    _ => None,
                };
                match kind {
                    Some(kind) => toks.push(Tok { kind, pos }),
                    None => {
                        errors.push(ParseError::new(pos, format!("unexpected character `{}`", c)))
                    }
                }
            }
        }
    }
    (toks, errors)
}

// --------------------------------------------------------------- parsing

#[derive(Debug, Clone, PartialEq, Eq)]
enum Atom {
    Ident(String),
    Int(i64),
}

#[derive(Debug, Clone)]
struct PAtom {
    atom: Atom,
    pos: Pos,
}

impl PAtom {
    fn token(&self) -> Token {
        match &self.atom {
            Atom::Ident(s) => Token::sym(s.clone()),
            Atom::Int(i) => Token::Int(*i),
        }
    }
}

#[derive(Debug, Clone)]
enum PExpr {
    Atom(PAtom),
    Access { name: String, pos: Pos, args: Vec<PExpr> },
}

#[derive(Debug, Clone)]
enum Dim {
    Count(i64),
    Set(Vec<PAtom>),
}

#[derive(Debug, Clone)]
enum Nested {
    Atom(PAtom),
    Tuple(Vec<Nested>, Pos),
}

#[derive(Debug, Clone)]
enum DeclKind {
    Var { name: String, set: Vec<PAtom> },
    ConstArray { name: String, dims: Vec<(Dim, Pos)>, value: Nested },
    VarArray { name: String, dims: Vec<(Dim, Pos)>, set: Vec<PAtom> },
    Eq(PExpr, PExpr),
    Neq(PAtom, PAtom),
    AllDiff(Vec<PAtom>),
}

#[derive(Debug, Clone)]
struct Decl {
    kind: DeclKind,
    pos: Pos,
}

struct Parser {
    toks: Vec<Tok>,
    i: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.i).cloned();
        self.i += 1;
        t
    }

    fn end_pos(&self) -> Pos {
        self.toks.last().map(|t| t.pos).unwrap_or(Pos { line: 1, col: 1 })
    }

    fn error_here(&self, expected: &str) -> ParseError {
        match self.peek() {
            Some(t) => ParseError::new(
                t.pos,
                format!("expected {}, found {}", expected, t.kind.describe()),
            ),
            None => ParseError::new(self.end_pos(), format!("expected {}, found end of input", expected)),
        }
    }

    fn expect(&mut self, kind: TokKind, expected: &str) -> Result<Pos, ParseError> {
        match self.peek() {
            Some(t) if t.kind == kind => Ok(self.bump().unwrap().pos),
            _ => Err(self.error_here(expected)),
        }
    }

    fn ident(&mut self, expected: &str) -> Result<(String, Pos), ParseError> {
        match self.peek() {
            Some(Tok { kind: TokKind::Ident(_), .. }) => {
                let t = self.bump().unwrap();
                match t.kind {
                    TokKind::Ident(s) => Ok((s, t.pos)),
                    _ => unreachable!(),
                }
            }
            _ => Err(self.error_here(expected)),
        }
    }

    /// Skips to just past the next semicolon so that one malformed
    /// statement does not swallow the rest of the file.
    fn recover(&mut self) {
        while let Some(t) = self.bump() {
            if t.kind == TokKind::Semi {
                break;
            }
        }
    }

    fn atom(&mut self) -> Result<PAtom, ParseError> {
        match self.peek() {
            Some(Tok { kind: TokKind::Ident(_), .. }) => {
                let t = self.bump().unwrap();
                match t.kind {
                    TokKind::Ident(s) => Ok(PAtom { atom: Atom::Ident(s), pos: t.pos }),
                    _ => unreachable!(),
                }
            }
            Some(Tok { kind: TokKind::Int(_), .. }) => {
                let t = self.bump().unwrap();
                match t.kind {
                    TokKind::Int(i) => Ok(PAtom { atom: Atom::Int(i), pos: t.pos }),
                    _ => unreachable!(),
                }
            }
            _ => Err(self.error_here("a value or identifier")),
        }
    }

    fn value_set(&mut self) -> Result<Vec<PAtom>, ParseError> {
        self.expect(TokKind::LBrace, "`{`")?;
        let mut atoms = vec![self.atom()?];
        loop {
            match self.peek().map(|t| &t.kind) {
                Some(TokKind::Comma) => {
                    self.bump();
                    atoms.push(self.atom()?);
                }
                Some(TokKind::RBrace) => {
                    self.bump();
                    return Ok(atoms);
                }
                _ => return Err(self.error_here("`,` or `}`")),
            }
        }
    }

    fn dims(&mut self) -> Result<Vec<(Dim, Pos)>, ParseError> {
        self.expect(TokKind::LBracket, "`[`")?;
        let mut dims = vec![self.dim()?];
        loop {
            match self.peek().map(|t| &t.kind) {
                Some(TokKind::Comma) => {
                    self.bump();
                    dims.push(self.dim()?);
                }
                Some(TokKind::RBracket) => {
                    self.bump();
                    return Ok(dims);
                }
                _ => return Err(self.error_here("`,` or `]`")),
            }
        }
    }

    fn dim(&mut self) -> Result<(Dim, Pos), ParseError> {
        match self.peek() {
            Some(Tok { kind: TokKind::Int(_), .. }) => {
                let t = self.bump().unwrap();
                match t.kind {
                    TokKind::Int(i) => Ok((Dim::Count(i), t.pos)),
                    _ => unreachable!(),
                }
            }
            Some(Tok { kind: TokKind::LBrace, pos }) => {
                let pos = *pos;
                Ok((Dim::Set(self.value_set()?), pos))
            }
            _ => Err(self.error_here("a dimension (integer or value set)")),
        }
    }

    fn nested(&mut self) -> Result<Nested, ParseError> {
        match self.peek() {
            Some(Tok { kind: TokKind::LParen, pos }) => {
                let pos = *pos;
                self.bump();
                let mut items = vec![self.nested()?];
                loop {
                    match self.peek().map(|t| &t.kind) {
                        Some(TokKind::Comma) => {
                            self.bump();
                            items.push(self.nested()?);
                        }
                        Some(TokKind::RParen) => {
                            self.bump();
                            return Ok(Nested::Tuple(items, pos));
                        }
                        _ => return Err(self.error_here("`,` or `)`")),
                    }
                }
            }
            _ => Ok(Nested::Atom(self.atom()?)),
        }
    }

    fn expr(&mut self) -> Result<PExpr, ParseError> {
        if let Some(Tok { kind: TokKind::Ident(_), .. }) = self.peek() {
            if matches!(self.toks.get(self.i + 1).map(|t| &t.kind), Some(TokKind::LBracket)) {
                let (name, pos) = self.ident("an identifier")?;
                self.bump(); // the bracket
                let mut args = vec![self.expr()?];
                loop {
                    match self.peek().map(|t| &t.kind) {
                        Some(TokKind::Comma) => {
                            self.bump();
                            args.push(self.expr()?);
                        }
                        Some(TokKind::RBracket) => {
                            self.bump();
                            return Ok(PExpr::Access { name, pos, args });
                        }
                        _ => return Err(self.error_here("`,` or `]`")),
                    }
                }
            }
        }
        Ok(PExpr::Atom(self.atom()?))
    }

    fn decl(&mut self) -> Result<Decl, ParseError> {
        let keyword = self.error_here("`var`, `array`, `vararray` or `constraint`");
        let (word, pos) = match self.peek() {
            Some(Tok { kind: TokKind::Ident(s), pos }) => (s.clone(), *pos),
            _ => return Err(keyword),
        };
        self.bump();
        let kind = match word.as_str() {
            "var" => {
                let (name, _) = self.ident("a variable name")?;
                let (kw, kw_pos) = self.ident("`in`")?;
                if kw != "in" {
                    return Err(ParseError::new(kw_pos, format!("expected `in`, found `{}`", kw)));
                }
                DeclKind::Var { name, set: self.value_set()? }
            }
            "array" => {
                let (name, _) = self.ident("an array name")?;
                let dims = self.dims()?;
                self.expect(TokKind::Eq, "`=`")?;
                DeclKind::ConstArray { name, dims, value: self.nested()? }
            }
            "vararray" => {
                let (name, _) = self.ident("an array name")?;
                let dims = self.dims()?;
                let (kw, kw_pos) = self.ident("`in`")?;
                if kw != "in" {
                    return Err(ParseError::new(kw_pos, format!("expected `in`, found `{}`", kw)));
                }
                DeclKind::VarArray { name, dims, set: self.value_set()? }
            }
            "constraint" => self.constraint()?,
            other => {
                return Err(ParseError::new(
                    pos,
                    format!("expected `var`, `array`, `vararray` or `constraint`, found `{}`", other),
                ))
            }
        };
        self.expect(TokKind::Semi, "`;`")?;
        Ok(Decl { kind, pos })
    }

    fn constraint(&mut self) -> Result<DeclKind, ParseError> {
        if let Some(Tok { kind: TokKind::Ident(s), .. }) = self.peek() {
            if s == "alldifferent"
                && matches!(self.toks.get(self.i + 1).map(|t| &t.kind), Some(TokKind::LParen))
            {
                self.bump();
                self.bump();
                let mut ids = vec![self.atom()?];
                loop {
                    match self.peek().map(|t| &t.kind) {
                        Some(TokKind::Comma) => {
                            self.bump();
                            ids.push(self.atom()?);
                        }
                        Some(TokKind::RParen) => {
                            self.bump();
                            return Ok(DeclKind::AllDiff(ids));
                        }
                        _ => return Err(self.error_here("`,` or `)`")),
                    }
                }
            }
        }
        let lhs = self.expr()?;
        match self.peek().map(|t| &t.kind) {
            Some(TokKind::Eq) => {
                self.bump();
                Ok(DeclKind::Eq(lhs, self.expr()?))
            }
            Some(TokKind::Neq) => {
                let lhs = match lhs {
                    PExpr::Atom(a @ PAtom { atom: Atom::Ident(_), .. }) => a,
                    PExpr::Atom(PAtom { pos, .. }) | PExpr::Access { pos, .. } => {
                        return Err(ParseError::new(
                            pos,
                            "the left side of `!=` must be an identifier",
                        ))
                    }
                };
                self.bump();
                Ok(DeclKind::Neq(lhs, self.atom()?))
            }
            _ => Err(self.error_here("`=` or `!=`")),
        }
    }
}

fn parse_decls(text: &str) -> Result<Vec<Decl>, Vec<ParseError>> {
    let (toks, mut errors) = lex(text);
    let mut parser = Parser { toks, i: 0 };
    let mut decls = Vec::new();
    while parser.peek().is_some() {
        match parser.decl() {
            Ok(d) => decls.push(d),
            Err(e) => {
                errors.push(e);
                parser.recover();
            }
        }
    }
    if errors.is_empty() {
        Ok(decls)
    } else {
        Err(errors)
    }
}

// -------------------------------------------------------- model building

fn dim_tokens(dims: &[(Dim, Pos)]) -> Result<Vec<Vec<Token>>, ParseError> {
    let mut out = Vec::with_capacity(dims.len());
    for (dim, pos) in dims {
        match dim {
            Dim::Count(n) => {
                if *n < 1 {
                    return Err(ParseError::new(*pos, "a dimension size must be at least 1"));
                }
                out.push((1..=*n).map(Token::Int).collect());
            }
            Dim::Set(atoms) => {
                let tokens: Vec<Token> = atoms.iter().map(PAtom::token).collect();
                for (i, t) in tokens.iter().enumerate() {
                    if tokens[..i].contains(t) {
                        return Err(ParseError::new(
                            atoms[i].pos,
                            "duplicate value in dimension",
                        ));
                    }
                }
                out.push(tokens);
            }
        }
    }
    Ok(out)
}

fn flatten_values(
    nested: &Nested,
    dims: &[Vec<Token>],
    out: &mut Vec<Token>,
) -> Result<(), ParseError> {
    match (nested, dims.split_first()) {
        (Nested::Tuple(items, pos), Some((dim, rest))) => {
            if items.len() != dim.len() {
                return Err(ParseError::new(
                    *pos,
                    format!("expected a tuple of {} entries, found {}", dim.len(), items.len()),
                ));
            }
            for item in items {
                flatten_values(item, rest, out)?;
            }
            Ok(())
        }
        (Nested::Atom(a), None) => {
            out.push(a.token());
            Ok(())
        }
        (Nested::Atom(a), Some(_)) => {
            Err(ParseError::new(a.pos, "expected a tuple, found a single value"))
        }
        (Nested::Tuple(_, pos), None) => {
            Err(ParseError::new(*pos, "tuple nesting exceeds the declared dimensions"))
        }
    }
}

/// Resolves an identifier the way constraint positions do: a declared
/// variable when one exists, a fresh symbolic constant otherwise.
fn resolve_atom(m: &mut CspModel, a: &PAtom) -> VarId {
    if let Atom::Ident(s) = &a.atom {
        if let Some(v) = m.var_by_name(s) {
            return v;
        }
    }
    m.constant(a.token())
}

fn to_expression(m: &mut CspModel, e: &PExpr) -> Result<Expression, ParseError> {
    match e {
        PExpr::Atom(a) => Ok(Expression::var(resolve_atom(m, a))),
        PExpr::Access { name, pos, args } => {
            let array = m
                .array_by_name(name)
                .ok_or_else(|| ParseError::new(*pos, format!("unknown array `{}`", name)))?;
            let arity = m.array(array).arity;
            if args.len() != arity {
                return Err(ParseError::new(
                    *pos,
                    format!("array `{}` takes {} indices, found {}", name, arity, args.len()),
                ));
            }
            let mut index = Vec::with_capacity(args.len());
            for arg in args {
                index.push(to_expression(m, arg)?);
            }
            Ok(Expression::access(array, index))
        }
    }
}

fn build(decls: &[Decl], allow_nonlinear: bool) -> Result<CspModel, Vec<ParseError>> {
    let mut m = CspModel::new();
    let mut errors = Vec::new();
    // declaration pass: variables and arrays, in file order
    for decl in decls {
        let result = match &decl.kind {
            DeclKind::Var { name, set } => {
                let tokens: Vec<Token> = set.iter().map(PAtom::token).collect();
                m.add_var(name.clone(), tokens).map(|_| ()).map_err(|e| {
                    ParseError::new(decl.pos, e.to_string())
                })
            }
            DeclKind::ConstArray { name, dims, value } => (|| {
                let dims = dim_tokens(dims)?;
                let mut values = Vec::new();
                flatten_values(value, &dims, &mut values)?;
                m.add_const_array(name.clone(), &dims, &values)
                    .map(|_| ())
                    .map_err(|e| ParseError::new(decl.pos, e.to_string()))
            })(),
            DeclKind::VarArray { name, dims, set } => (|| {
                let dims = dim_tokens(dims)?;
                let tokens: Vec<Token> = set.iter().map(PAtom::token).collect();
                m.add_var_array(name.clone(), &dims, &tokens)
                    .map(|_| ())
                    .map_err(|e| ParseError::new(decl.pos, e.to_string()))
            })(),
            _ => Ok(()),
        };
        if let Err(e) = result {
            errors.push(e);
        }
    }
    // constraint pass, with a file position per emitted constraint
    let mut cpos: Vec<Pos> = Vec::new();
    for decl in decls {
        let result = (|m: &mut CspModel, cpos: &mut Vec<Pos>| {
            match &decl.kind {
                DeclKind::Eq(lhs, rhs) => {
                    let l = to_expression(m, lhs)?;
                    let r = to_expression(m, rhs)?;
                    m.add_nested_eq(l, r);
                    cpos.push(decl.pos);
                }
                DeclKind::Neq(lhs, rhs) => {
                    let a = resolve_atom(m, lhs);
                    let b = resolve_atom(m, rhs);
                    m.add_var_neq(a, b);
                    cpos.push(decl.pos);
                }
                DeclKind::AllDiff(ids) => {
                    let mut vars = Vec::with_capacity(ids.len());
                    for id in ids {
                        match &id.atom {
                            Atom::Ident(s) => match m.var_by_name(s) {
                                Some(v) => vars.push(v),
                                None => {
                                    return Err(ParseError::new(
                                        id.pos,
                                        format!("unknown variable `{}`", s),
                                    ))
                                }
                            },
                            Atom::Int(_) => {
                                return Err(ParseError::new(
                                    id.pos,
                                    "alldifferent takes variable names",
                                ))
                            }
                        }
                    }
                    for i in 0..vars.len() {
                        for j in i + 1..vars.len() {
                            m.add_var_neq(vars[i], vars[j]);
                            cpos.push(decl.pos);
                        }
                    }
                }
                _ => {}
            }
            Ok(())
        })(&mut m, &mut cpos);
        if let Err(e) = result {
            errors.push(e);
        }
    }
    if !errors.is_empty() {
        return Err(errors);
    }

    let decomposed = match decompose_all(&m, allow_nonlinear) {
        Ok(d) => d,
        Err(e) => {
            let arrayprop::expr::DecomposeError::NonLinearAfterDecomposition {
                constraint, ..
            } = &e;
            let pos = cpos.get(*constraint).copied().unwrap_or(Pos { line: 1, col: 1 });
            return Err(vec![ParseError::new(pos, e.to_string())]);
        }
    };
    // positions for the decomposed list: a nested equation expands into one
    // constraint per array access (or a single equality when there is none)
    let mut dpos: Vec<Pos> = Vec::new();
    for (cid, c) in m.constraints().iter().enumerate() {
        let expansion = match c {
            Constraint::NestedEq { lhs, rhs } => {
                (access_count(lhs) + access_count(rhs)).max(1)
            }
            _ => 1,
        };
        for _ in 0..expansion {
            dpos.push(cpos[cid]);
        }
    }
    debug_assert_eq!(dpos.len(), decomposed.constraints().len());

    match decomposed.validate(ValidateOptions { allow_nonlinear }) {
        Ok(model) => Ok(model),
        Err(es) => Err(es
            .into_iter()
            .map(|e| {
                let pos = match &e {
                    arrayprop::model::ValidationError::NonLinearConstraint {
                        constraint, ..
                    }
                    | arrayprop::model::ValidationError::InvalidIndex { constraint, .. }
                    | arrayprop::model::ValidationError::NestedNotDecomposed { constraint } => {
                        dpos.get(*constraint).copied()
                    }
                    arrayprop::model::ValidationError::EmptyInitialDomain { .. } => None,
                };
                ParseError::new(pos.unwrap_or(Pos { line: 1, col: 1 }), e.to_string())
            })
            .collect()),
    }
}

fn access_count(e: &Expression) -> usize {
    match e {
        Expression::Var(_) => 0,
        Expression::Access { index, .. } => {
            1 + index.iter().map(access_count).sum::<usize>()
        }
    }
}

/// Parses a model file into a validated model, rejecting constraints in
/// which a variable occurs more than once.
pub fn parse_model(text: &str) -> Result<CspModel, Vec<ParseError>> {
    parse_model_with(text, false)
}

/// As [`parse_model`], optionally accepting repeated-variable constraints
/// for position-wise (relaxed) propagation.
pub fn parse_model_with(text: &str, allow_nonlinear: bool) -> Result<CspModel, Vec<ParseError>> {
    build(&parse_decls(text)?, allow_nonlinear)
}

#[cfg(test)]
mod tests {
    use super::*;
    use arrayprop::model::Constraint;

    const SHARED_ARRAY: &str = "\
var x in {p, q, r};
var z in {i, j};
var y in {k, l, m};
var u in {i, j};
var v in {k, l, m};
array a [{i, j}, {k, l, m}] = ((p, q, r), (p, q, r));
constraint v != l;
constraint a[u, v] = x;
constraint a[z, y] = q;
";

    const VARARRAY: &str = "\
var x in {p, q, r};
var y in {i, j, k};
vararray a [{i, j, k}] in {p, q, r};
constraint y = j;
constraint x != q;
constraint x = a[y];
";

    #[test]
    fn shared_array_source_parses() {
        let m = parse_model(SHARED_ARRAY).unwrap();
        let mut neq = 0;
        let mut arr = 0;
        for c in m.constraints() {
            match c {
                Constraint::VarNeq { .. } => neq += 1,
                Constraint::ArrayEq { .. } => arr += 1,
                other => panic!("unexpected constraint {:?}", other),
            }
        }
        assert_eq!((neq, arr), (1, 2));
        assert!(m.var_by_name("x").is_some());
        // `q` and `l` are constants, not declared variables
        assert_eq!(m.var_by_name("q"), None);
    }

    #[test]
    fn vararray_source_parses() {
        let m = parse_model(VARARRAY).unwrap();
        let kinds: Vec<&str> = m
            .constraints()
            .iter()
            .map(|c| match c {
                Constraint::VarEq { .. } => "eq",
                Constraint::VarNeq { .. } => "neq",
                Constraint::ArrayEq { .. } => "array",
                Constraint::NestedEq { .. } => "nested",
            })
            .collect();
        assert_eq!(kinds, ["eq", "neq", "array"]);
        assert!(m.var_by_name("a[j]").is_some(), "cell variables get names");
    }

    #[test]
    fn trailing_comma_is_a_positioned_error() {
        let errs = parse_model("var x in {A};\nvar y in {1};\nconstraint x = a[y,];\n")
            .unwrap_err();
        assert_eq!(errs.len(), 1);
        assert_eq!(errs[0].pos, Pos { line: 3, col: 20 });
        assert!(errs[0].msg.contains("expected"), "{}", errs[0].msg);
    }

    #[test]
    fn recovery_reports_several_errors() {
        let errs = parse_model("var x in ;\nvar y in {1};\nconstraint z = ;\n").unwrap_err();
        assert_eq!(errs.len(), 2);
        assert_eq!(errs[0].pos.line, 1);
        assert_eq!(errs[1].pos.line, 3);
    }

    #[test]
    fn unknown_array_is_positioned() {
        let errs = parse_model("var x in {A};\nconstraint x = b[x];\n").unwrap_err();
        assert_eq!(errs[0].pos, Pos { line: 2, col: 16 });
        assert!(errs[0].msg.contains("unknown array"));
    }

    #[test]
    fn arity_mismatch_is_reported() {
        let text = "var x in {A, B};\nvar y in {1, 2};\n\
                    array a [2] = (A, B);\nconstraint x = a[y, y];\n";
        let errs = parse_model(text).unwrap_err();
        assert!(errs[0].msg.contains("takes 1 indices, found 2"), "{}", errs[0].msg);
    }

    #[test]
    fn repeated_variable_needs_the_relaxed_switch() {
        let text = "var y in {0, 1};\n\
                    array xor [{0, 1}, {0, 1}] = ((0, 1), (1, 0));\n\
                    constraint 1 = xor[y, y];\n";
        let errs = parse_model(text).unwrap_err();
        assert_eq!(errs[0].pos.line, 3);
        assert!(errs[0].msg.contains("more than once"), "{}", errs[0].msg);
        let m = parse_model_with(text, true).unwrap();
        assert_eq!(m.relaxed_constraints().len(), 1);
    }

    #[test]
    fn integer_dimension_means_one_to_n() {
        let m = parse_model(
            "var x in {A, B};\nvar y in {1, 2};\narray a [2] = (A, B);\nconstraint x = a[y];\n",
        )
        .unwrap();
        let a = m.array_by_name("a").unwrap();
        assert_eq!(m.array(a).cells.len(), 2);
    }

    #[test]
    fn tuple_shape_must_match_dims() {
        let errs =
            parse_model("array a [2, 2] = ((A, B), (C));\n").unwrap_err();
        assert!(errs[0].msg.contains("expected a tuple of 2 entries, found 1"));
    }

    #[test]
    fn nested_access_decomposes() {
        let text = "var x in {A, B};\nvar y in {1, 2};\n\
                    array b [2] = (2, 1);\narray a [2] = (A, B);\n\
                    constraint x = a[b[y]];\n";
        let m = parse_model(text).unwrap();
        assert_eq!(m.constraints().len(), 2);
        assert!(m.var_by_name("_v0").is_some());
    }

    #[test]
    fn alldifferent_expands_pairwise() {
        let text = "var x in {1, 2};\nvar y in {1, 2};\nvar z in {1, 2};\n\
                    constraint alldifferent(x, y, z);\n";
        let m = parse_model(text).unwrap();
        assert_eq!(m.constraints().len(), 3);
        assert!(m.constraints().iter().all(|c| matches!(c, Constraint::VarNeq { .. })));
    }
}
