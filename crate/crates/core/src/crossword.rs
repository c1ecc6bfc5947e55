//! Crossword puzzles as constraint models.
//!
//! Each maximal run of two or more open cells becomes an entry variable
//! ranging over the words of matching length. A constant letter array
//! `l[w,p]` maps every word and 1-based position to a letter; a crossing
//! cell shared by an across and a down entry becomes the equation
//! `l[E_i, p] = l[E_j, q]`, decomposed into two array constraints sharing a
//! fresh letter variable. Entries must take pairwise distinct words.

use std::fmt;

use crate::domain::Token;
use crate::expr::{decompose_all, Expression};
use crate::model::{CspModel, ValidateOptions, VarId};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grid {
    rows: usize,
    cols: usize,
    open: Vec<bool>,
}

impl Grid {
    /// Parses a row-per-line picture: `.` open, `#` blocked.
    pub fn parse(text: &str) -> Result<Grid, CrosswordError> {
        let lines: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
        if lines.is_empty() {
            return Err(CrosswordError::BadGrid("no rows".into()));
        }
        let cols = lines[0].chars().count();
        let mut open = Vec::new();
        for (r, line) in lines.iter().enumerate() {
            if line.chars().count() != cols {
                return Err(CrosswordError::BadGrid(format!(
                    "row {} has {} cells, expected {}",
                    r + 1,
                    line.chars().count(),
                    cols
                )));
            }
            for ch in line.chars() {
                match ch {
                    '.' => open.push(true),
                    '#' => open.push(false),
                    other => {
                        return Err(CrosswordError::BadGrid(format!(
                            "unexpected cell `{}` in row {}",
                            other,
                            r + 1
                        )))
                    }
                }
            }
        }
        Ok(Grid { rows: lines.len(), cols, open })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_open(&self, row: usize, col: usize) -> bool {
        self.open[row * self.cols + col]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrosswordSpec {
    pub grid: Grid,
    pub words: Vec<String>,
}

/// One maximal run of ≥ 2 open cells, across or down.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub cells: Vec<(usize, usize)>,
    pub across: bool,
}

impl Entry {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// 1-based position of a grid cell within this entry, if covered.
    pub fn position_of(&self, cell: (usize, usize)) -> Option<usize> {
        self.cells.iter().position(|&c| c == cell).map(|i| i + 1)
    }

    fn describe(&self) -> String {
        let (r, c) = self.cells[0];
        format!(
            "{} entry of length {} at row {}, column {}",
            if self.across { "across" } else { "down" },
            self.len(),
            r + 1,
            c + 1
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CrosswordError {
    BadGrid(String),
    NoEntries,
    NoWords,
    /// Some entry's length matches no word in the list.
    NoFittingWord { entry: String },
}

impl fmt::Display for CrosswordError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CrosswordError::BadGrid(msg) => write!(f, "bad grid: {}", msg),
            CrosswordError::NoEntries => write!(f, "grid has no entry of length 2 or more"),
            CrosswordError::NoWords => write!(f, "word list is empty"),
            CrosswordError::NoFittingWord { entry } => {
                write!(f, "no word fits the {}", entry)
            }
        }
    }
}

impl std::error::Error for CrosswordError {}

/// The built model plus everything needed to interpret solutions.
#[derive(Debug, Clone)]
pub struct Crossword {
    pub model: CspModel,
    pub grid: Grid,
    pub entries: Vec<Entry>,
    pub entry_vars: Vec<VarId>,
}

/// Maximal open runs of length ≥ 2, across first (row-major), then down
/// (column-major). Length-1 runs are not entries.
pub fn entries(grid: &Grid) -> Vec<Entry> {
    let mut out = Vec::new();
    for r in 0..grid.rows() {
        let mut run: Vec<(usize, usize)> = Vec::new();
        for c in 0..=grid.cols() {
            if c < grid.cols() && grid.is_open(r, c) {
                run.push((r, c));
            } else {
                if run.len() >= 2 {
                    out.push(Entry { cells: std::mem::take(&mut run), across: true });
                }
                run.clear();
            }
        }
    }
    for c in 0..grid.cols() {
        let mut run: Vec<(usize, usize)> = Vec::new();
        for r in 0..=grid.rows() {
            if r < grid.rows() && grid.is_open(r, c) {
                run.push((r, c));
            } else {
                if run.len() >= 2 {
                    out.push(Entry { cells: std::mem::take(&mut run), across: false });
                }
                run.clear();
            }
        }
    }
    out
}

/// Letter at 1-based position `p` of `word`, or the padding sentinel past
/// its end.
fn letter_token(word: &str, p: usize) -> Token {
    match word.chars().nth(p - 1) {
        Some(ch) => Token::sym(ch.to_string()),
        None => Token::sym("_"),
    }
}

/// Builds the validated model for a crossword.
pub fn build_crossword(spec: &CrosswordSpec) -> Result<Crossword, CrosswordError> {
    if spec.words.is_empty() {
        return Err(CrosswordError::NoWords);
    }
    let entry_list = entries(&spec.grid);
    if entry_list.is_empty() {
        return Err(CrosswordError::NoEntries);
    }
    let max_len = spec.words.iter().map(|w| w.chars().count()).max().unwrap();

    let mut m = CspModel::new();

    // one variable per entry over the words of its length
    let mut entry_vars = Vec::new();
    for (i, entry) in entry_list.iter().enumerate() {
        let fitting: Vec<Token> = spec
            .words
            .iter()
            .filter(|w| w.chars().count() == entry.len())
            .map(Token::sym)
            .collect();
        if fitting.is_empty() {
            return Err(CrosswordError::NoFittingWord { entry: entry.describe() });
        }
        let var = m.add_var(format!("E{}", i + 1), fitting).expect("fresh entry name");
        entry_vars.push(var);
    }

    // the letter array over all words and positions, padded to max_len
    let word_tokens: Vec<Token> = spec.words.iter().map(Token::sym).collect();
    let positions: Vec<Token> = (1..=max_len as i64).map(Token::Int).collect();
    let letters: Vec<Token> = {
        let mut out = Vec::new();
        for w in &spec.words {
            for p in 1..=max_len {
                out.push(letter_token(w, p));
            }
        }
        out
    };
    let l = m
        .add_const_array("l", &[word_tokens, positions], &letters)
        .expect("fresh array name");

    // crossings: one letter equation per cell shared by two entries
    for i in 0..entry_list.len() {
        for j in (i + 1)..entry_list.len() {
            for &cell in &entry_list[i].cells {
                let (p, q) = match (
                    entry_list[i].position_of(cell),
                    entry_list[j].position_of(cell),
                ) {
                    (Some(p), Some(q)) => (p, q),
                    _ => continue,
                };
                let cp = m.constant(Token::Int(p as i64));
                let cq = m.constant(Token::Int(q as i64));
                m.add_nested_eq(
                    Expression::access(l, vec![Expression::var(entry_vars[i]), Expression::var(cp)]),
                    Expression::access(l, vec![Expression::var(entry_vars[j]), Expression::var(cq)]),
                );
            }
        }
    }

    // entries take pairwise distinct words
    for i in 0..entry_vars.len() {
        for j in (i + 1)..entry_vars.len() {
            m.add_var_neq(entry_vars[i], entry_vars[j]);
        }
    }

    let m = decompose_all(&m, false).expect("crossing equations are linear");
    let m = m.validate(ValidateOptions::default()).expect("crossword model is valid");
    Ok(Crossword { model: m, grid: spec.grid.clone(), entries: entry_list, entry_vars })
}

impl Crossword {
    /// Renders a solution as the filled grid: letters on entry cells, `#`
    /// on blocked cells, `.` on open cells no entry covers.
    pub fn render(&self, asgn: &crate::model::Assignment) -> String {
        let mut cells: Vec<Vec<char>> = (0..self.grid.rows())
            .map(|r| {
                (0..self.grid.cols())
                    .map(|c| if self.grid.is_open(r, c) { '.' } else { '#' })
                    .collect()
            })
            .collect();
        for (entry, &var) in self.entries.iter().zip(self.entry_vars.iter()) {
            let word = match self.model.token(asgn.get(var)) {
                Token::Sym(w) => w.clone(),
                Token::Int(n) => n.to_string(),
            };
            for (&(r, c), ch) in entry.cells.iter().zip(word.chars()) {
                cells[r][c] = ch;
            }
        }
        cells
            .into_iter()
            .map(|row| row.into_iter().collect::<String>())
            .collect::<Vec<_>>()
            .join("\n")
    }

    /// The entry words of a solution, in entry order.
    pub fn words_of(&self, asgn: &crate::model::Assignment) -> Vec<String> {
        self.entry_vars
            .iter()
            .map(|&v| self.model.token(asgn.get(v)).to_string())
            .collect()
    }
}

/// The toy one-crossing instance used throughout the tests: a 3-letter
/// across entry crossed by a 3-letter down entry at across position 2 /
/// down position 1.
pub fn toy_spec() -> CrosswordSpec {
    CrosswordSpec {
        grid: Grid::parse("...\n#.#\n#.#").unwrap(),
        words: ["CAT", "DOG", "ACE", "OAK"].iter().map(|s| s.to_string()).collect(),
    }
}

/// A 5×5 ring: four entries of length five crossing at the corners.
pub fn ring5_spec() -> CrosswordSpec {
    CrosswordSpec {
        grid: Grid::parse(".....\n.###.\n.###.\n.###.\n.....").unwrap(),
        words: ["SHARP", "SCALE", "EVENT", "PIVOT", "HEART", "TRUST", "CRANE"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
    }
}
