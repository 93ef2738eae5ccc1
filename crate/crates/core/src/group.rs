//! Group backends: free words over automaton generators, the integers, and
//! finite groups given by a multiplication table.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("elements come from different backends")]
    BackendMismatch,
    #[error("unknown generator or element `{0}`")]
    UnknownSymbol(String),
    #[error("multiplication table is not a group: {0}")]
    NotAGroup(String),
    #[error("generator names must be distinct and not `e` or `1`: `{0}`")]
    BadGeneratorName(String),
}

/// A group element. Words are free-reduced letter sequences where letter `k+1`
/// is generator `k` and `-(k+1)` its inverse.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Elem {
    Word(Vec<i32>),
    Int(i64),
    Fin(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    names: Vec<String>,
    table: Vec<Vec<usize>>,
    inverse: Vec<usize>,
    generators: Vec<usize>,
    /// A shortest generator word for each element, as generator indices.
    words: Vec<Vec<usize>>,
}

impl FiniteGroup {
    /// `table[i][j]` is the product of elements `i` and `j`; element 0 must be the identity.
    pub fn new(names: Vec<String>, table: Vec<Vec<usize>>, generators: Vec<usize>) -> Result<Self, GroupError> {
        let n = names.len();
        if n == 0 {
            return Err(GroupError::NotAGroup("no elements".into()));
        }
        if table.len() != n || table.iter().any(|row| row.len() != n || row.iter().any(|&x| x >= n)) {
            return Err(GroupError::NotAGroup("table shape".into()));
        }
        for i in 0..n {
            if table[0][i] != i || table[i][0] != i {
                return Err(GroupError::NotAGroup("first element is not an identity".into()));
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(GroupError::NotAGroup(format!(
                            "not associative at ({}, {}, {})",
                            names[a], names[b], names[c]
                        )));
                    }
                }
            }
        }
        let mut inverse = vec![usize::MAX; n];
        for a in 0..n {
            match (0..n).find(|&b| table[a][b] == 0 && table[b][a] == 0) {
                Some(b) => inverse[a] = b,
                None => return Err(GroupError::NotAGroup(format!("{} has no inverse", names[a]))),
            }
        }
        if generators.iter().any(|&g| g >= n) {
            return Err(GroupError::NotAGroup("generator out of range".into()));
        }
        let mut words: Vec<Option<Vec<usize>>> = vec![None; n];
        words[0] = Some(Vec::new());
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for (k, &s) in generators.iter().enumerate() {
                let y = table[s][x];
                if words[y].is_none() {
                    let mut w = vec![k];
                    w.extend(words[x].as_ref().unwrap());
                    words[y] = Some(w);
                    queue.push_back(y);
                }
            }
        }
        if let Some(i) = words.iter().position(|w| w.is_none()) {
            return Err(GroupError::NotAGroup(format!("{} is not generated by the generators", names[i])));
        }
        let words = words.into_iter().map(Option::unwrap).collect();
        Ok(FiniteGroup { names, table, inverse, generators, words })
    }

    pub fn trivial() -> Self {
        FiniteGroup::new(vec!["e".into()], vec![vec![0]], vec![]).unwrap()
    }

    /// The cyclic group `ℤ/n` generated by `1`, with elements named `0..n`.
    pub fn cyclic(n: usize) -> Self {
        let names = (0..n).map(|i| i.to_string()).collect();
        let table = (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect();
        FiniteGroup::new(names, table, if n > 1 { vec![1] } else { vec![] }).unwrap()
    }

    pub fn order(&self) -> usize {
        self.names.len()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    /// Generator indices `k₁…k_m` with `element = s_{k₁}⋯s_{k_m}`.
    pub fn word(&self, a: usize) -> &[usize] {
        &self.words[a]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Group {
    /// The free group on the generators; equality is decided against a system.
    Automaton { generators: Vec<String> },
    /// `ℤ`, generated by `1`.
    Integer { generator: String },
    Finite(FiniteGroup),
}

impl Group {
    pub fn automaton(generators: Vec<String>) -> Result<Self, GroupError> {
        check_names(&generators)?;
        Ok(Group::Automaton { generators })
    }

    pub fn integer() -> Self {
        Group::Integer { generator: "t".into() }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Group::Automaton { .. } => "automaton",
            Group::Integer { .. } => "integer",
            Group::Finite(_) => "finite",
        }
    }

    pub fn generator_names(&self) -> Vec<String> {
        match self {
            Group::Automaton { generators } => generators.clone(),
            Group::Integer { generator } => vec![generator.clone()],
            Group::Finite(f) => f.generators.iter().map(|&g| f.names[g].clone()).collect(),
        }
    }

    pub fn generator_count(&self) -> usize {
        match self {
            Group::Automaton { generators } => generators.len(),
            Group::Integer { .. } => 1,
            Group::Finite(f) => f.generators.len(),
        }
    }

    pub fn generator(&self, k: usize) -> Elem {
        match self {
            Group::Automaton { .. } => Elem::Word(vec![k as i32 + 1]),
            Group::Integer { .. } => Elem::Int(1),
            Group::Finite(f) => Elem::Fin(f.generators[k]),
        }
    }

    pub fn identity(&self) -> Elem {
        match self {
            Group::Automaton { .. } => Elem::Word(Vec::new()),
            Group::Integer { .. } => Elem::Int(0),
            Group::Finite(_) => Elem::Fin(0),
        }
    }

    pub fn owns(&self, a: &Elem) -> bool {
        matches!(
            (self, a),
            (Group::Automaton { .. }, Elem::Word(_)) | (Group::Integer { .. }, Elem::Int(_)) | (Group::Finite(_), Elem::Fin(_))
        )
    }

    pub fn checked_mul(&self, a: &Elem, b: &Elem) -> Result<Elem, GroupError> {
        if !self.owns(a) || !self.owns(b) {
            return Err(GroupError::BackendMismatch);
        }
        Ok(self.mul(a, b))
    }

    /// Group product. Panics if either element belongs to another backend.
    pub fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        match (self, a, b) {
            (Group::Automaton { .. }, Elem::Word(x), Elem::Word(y)) => {
                let mut w = x.clone();
                for &l in y {
                    if w.last() == Some(&-l) {
                        w.pop();
                    } else {
                        w.push(l);
                    }
                }
                Elem::Word(w)
            }
            (Group::Integer { .. }, Elem::Int(x), Elem::Int(y)) => {
                Elem::Int(x.checked_add(*y).expect("integer backend overflow"))
            }
            (Group::Finite(f), Elem::Fin(x), Elem::Fin(y)) => Elem::Fin(f.mul(*x, *y)),
            _ => panic!("{}", GroupError::BackendMismatch),
        }
    }

    pub fn inv(&self, a: &Elem) -> Elem {
        match (self, a) {
            (Group::Automaton { .. }, Elem::Word(x)) => Elem::Word(x.iter().rev().map(|l| -l).collect()),
            (Group::Integer { .. }, Elem::Int(x)) => Elem::Int(-x),
            (Group::Finite(f), Elem::Fin(x)) => Elem::Fin(f.inv(*x)),
            _ => panic!("{}", GroupError::BackendMismatch),
        }
    }

    pub fn pow(&self, a: &Elem, n: i64) -> Elem {
        let base = if n < 0 { self.inv(a) } else { a.clone() };
        let mut out = self.identity();
        for _ in 0..n.unsigned_abs() {
            out = self.mul(&out, &base);
        }
        out
    }

    /// Equality that needs no system: exact for integers and finite tables,
    /// syntactic for words (`Some(true)` only when the reduced words agree).
    pub fn intrinsic_eq(&self, a: &Elem, b: &Elem) -> Option<bool> {
        match (a, b) {
            (Elem::Word(x), Elem::Word(y)) => (x == y).then_some(true),
            _ => Some(a == b),
        }
    }

    pub fn is_syntactic_identity(&self, a: &Elem) -> bool {
        *a == self.identity()
    }

    pub fn display(&self, a: &Elem) -> String {
        match (self, a) {
            (Group::Automaton { generators }, Elem::Word(w)) => {
                if w.is_empty() {
                    return "e".into();
                }
                let single = generators.iter().all(|g| g.chars().count() == 1);
                let parts: Vec<String> = w
                    .iter()
                    .map(|&l| {
                        let name = &generators[(l.unsigned_abs() - 1) as usize];
                        if l > 0 {
                            name.clone()
                        } else {
                            format!("{name}^-1")
                        }
                    })
                    .collect();
                if single && w.iter().all(|&l| l > 0) {
                    parts.concat()
                } else {
                    parts.join(".")
                }
            }
            (_, Elem::Int(x)) => x.to_string(),
            (Group::Finite(f), Elem::Fin(x)) => f.names[*x].clone(),
            _ => format!("{a:?}"),
        }
    }

    /// Parses an element. Words accept generator names separated by `.` or
    /// whitespace, `^-1` suffixes, run-together single-character names, and
    /// `e` or `1` for the identity.
    pub fn parse(&self, text: &str) -> Result<Elem, GroupError> {
        let text = text.trim();
        match self {
            Group::Integer { generator } => {
                if let Ok(n) = text.parse::<i64>() {
                    return Ok(Elem::Int(n));
                }
                if text == generator {
                    return Ok(Elem::Int(1));
                }
                Err(GroupError::UnknownSymbol(text.into()))
            }
            Group::Finite(f) => f
                .names
                .iter()
                .position(|n| n == text)
                .map(Elem::Fin)
                .ok_or_else(|| GroupError::UnknownSymbol(text.into())),
            Group::Automaton { generators } => {
                let index: HashMap<&str, i32> =
                    generators.iter().enumerate().map(|(i, g)| (g.as_str(), i as i32 + 1)).collect();
                let mut out = Elem::Word(Vec::new());
                for token in text.split(|c: char| c == '.' || c.is_whitespace()).filter(|t| !t.is_empty()) {
                    if token == "e" || token == "1" {
                        continue;
                    }
                    let (body, inverse) = match token.strip_suffix("^-1") {
                        Some(b) => (b, true),
                        None => (token, false),
                    };
                    let letters: Vec<i32> = if let Some(&l) = index.get(body) {
                        vec![l]
                    } else {
                        body.chars()
                            .map(|c| index.get(c.to_string().as_str()).copied())
                            .collect::<Option<Vec<_>>>()
                            .ok_or_else(|| GroupError::UnknownSymbol(token.into()))?
                    };
                    let mut piece = Elem::Word(letters);
                    if inverse {
                        piece = self.inv(&piece);
                    }
                    out = self.mul(&out, &piece);
                }
                Ok(out)
            }
        }
    }
}

fn check_names(names: &[String]) -> Result<(), GroupError> {
    let mut seen = std::collections::HashSet::new();
    for n in names {
        if n.is_empty() || n == "e" || n == "1" || n.contains(|c: char| c == '.' || c == '^' || c.is_whitespace()) || !seen.insert(n) {
            return Err(GroupError::BadGeneratorName(n.clone()));
        }
    }
    Ok(())
}

/// Displays an element against its group.
pub struct ElemDisplay<'a>(pub &'a Group, pub &'a Elem);

impl fmt::Display for ElemDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.display(self.1))
    }
}
