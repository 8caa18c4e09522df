//! Automorphisms of the m-adic tree given by wreath recursion.
//!
//! A generator is a root permutation together with its `m` sections at the
//! first-level vertices. Elements are words in the generators; sections,
//! root actions and actions on whole levels are evaluated by rewriting.
//!
//! Conventions: actions are on the right and a product `w1 * w2` acts as
//! "first `w1`, then `w2`". Level-`n` vertices `(i_1, .., i_n)` (digits
//! `1..=m`) are indexed `1 + sum_j (i_j - 1) m^(n-j)`, so the descendants of a
//! first-level vertex form a contiguous block.

use std::fmt;

use thiserror::Error;

use crate::perm::{PermError, PermGroup, Permutation};

/// Default bound on the number of points of a level action.
pub const DEFAULT_DEGREE_CAP: usize = 1_000_000;

pub type GenId = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreeError {
    #[error("unknown generator {0:?}")]
    UnknownGenerator(String),
    #[error("vertex digit {digit} out of range 1..={degree}")]
    DigitOutOfRange { digit: usize, degree: usize },
    #[error("empty vertex")]
    EmptyVertex,
    #[error("level must be at least 1")]
    LevelZero,
    #[error("level {level} needs {points} points, above the degree cap {cap}")]
    DegreeCapExceeded { level: usize, points: String, cap: usize },
    #[error("cannot parse word {word:?}: {reason}")]
    WordSyntax { word: String, reason: String },
    #[error("invalid group: {0}")]
    Invalid(ValidationReport),
    #[error(transparent)]
    Perm(#[from] PermError),
}

/// `gen^exp` with `exp != 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Letter {
    pub gen: GenId,
    pub exp: i64,
}

/// A word in the generators of a self-similar group. Adjacent powers of the
/// same generator are merged and cancelled; no other reduction happens.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct TreeWord {
    letters: Vec<Letter>,
}

impl TreeWord {
    pub fn identity() -> Self {
        TreeWord::default()
    }

    pub fn generator(gen: GenId) -> Self {
        TreeWord { letters: vec![Letter { gen, exp: 1 }] }
    }

    pub fn power(gen: GenId, exp: i64) -> Self {
        let mut w = TreeWord::identity();
        w.push(Letter { gen, exp });
        w
    }

    pub fn from_letters(letters: impl IntoIterator<Item = Letter>) -> Self {
        let mut w = TreeWord::identity();
        for l in letters {
            w.push(l);
        }
        w
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn push(&mut self, letter: Letter) {
        if letter.exp == 0 {
            return;
        }
        if let Some(last) = self.letters.last_mut() {
            if last.gen == letter.gen {
                last.exp += letter.exp;
                if last.exp == 0 {
                    self.letters.pop();
                }
                return;
            }
        }
        self.letters.push(letter);
    }

    pub fn mul(&self, other: &TreeWord) -> TreeWord {
        let mut w = self.clone();
        w.mul_assign(other);
        w
    }

    pub fn mul_assign(&mut self, other: &TreeWord) {
        for &l in &other.letters {
            self.push(l);
        }
    }

    pub fn inverse(&self) -> TreeWord {
        TreeWord::from_letters(self.letters.iter().rev().map(|l| Letter { gen: l.gen, exp: -l.exp }))
    }

    pub fn pow(&self, e: u32) -> TreeWord {
        let mut w = TreeWord::identity();
        for _ in 0..e {
            w.mul_assign(self);
        }
        w
    }
}

/// `psi(g) = (g|_1, .., g|_m) sigma_g` for one generator.
#[derive(Clone, Debug)]
pub struct GeneratorRecursion {
    pub name: String,
    pub root: Permutation,
    pub sections: Vec<TreeWord>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    DegreeTooSmall(usize),
    AmbientDegree { index: usize, found: usize },
    AmbientTooSmall,
    DuplicateName(String),
    EmptyName,
    RootDegree { gen: String, found: usize },
    RootOutsideAmbient { gen: String, root: String },
    SectionArity { gen: String, found: usize, expected: usize },
    UnknownSectionGenerator { gen: String, id: GenId },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DegreeTooSmall(m) => write!(f, "tree degree {m} is below 2"),
            Violation::AmbientDegree { index, found } => {
                write!(f, "ambient generator {index} has degree {found}")
            }
            Violation::AmbientTooSmall => write!(f, "ambient group has order below 2"),
            Violation::DuplicateName(n) => write!(f, "generator name {n:?} declared twice"),
            Violation::EmptyName => write!(f, "generator with empty name"),
            Violation::RootDegree { gen, found } => {
                write!(f, "root permutation of {gen} has degree {found}")
            }
            Violation::RootOutsideAmbient { gen, root } => {
                write!(f, "root action {root} of {gen} lies outside the ambient group")
            }
            Violation::SectionArity { gen, found, expected } => {
                write!(f, "section arity: {gen} has {found} sections, expected {expected}")
            }
            Violation::UnknownSectionGenerator { gen, id } => {
                write!(f, "a section of {gen} uses undeclared generator #{id}")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return f.write_str("valid");
        }
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        f.write_str(&parts.join("; "))
    }
}

/// A group of automorphisms of the m-adic tree inside the iterated wreath
/// product `W_H`, closed under sections by construction.
#[derive(Clone, Debug)]
pub struct SelfSimilarGroup {
    degree: usize,
    ambient: Vec<Permutation>,
    generators: Vec<GeneratorRecursion>,
    root_inverses: Vec<Permutation>,
    name: Option<String>,
    notes: Vec<String>,
    degree_cap: usize,
}

impl SelfSimilarGroup {
    /// Builds and validates a group.
    pub fn new(
        degree: usize,
        ambient: Vec<Permutation>,
        generators: Vec<GeneratorRecursion>,
        name: Option<String>,
    ) -> Result<Self, TreeError> {
        let g = Self::new_unchecked(degree, ambient, generators, name);
        let report = g.validate();
        if report.is_valid() {
            Ok(g)
        } else {
            Err(TreeError::Invalid(report))
        }
    }

    /// Builds a group without validation; use [`SelfSimilarGroup::validate`]
    /// before evaluating anything.
    pub fn new_unchecked(
        degree: usize,
        ambient: Vec<Permutation>,
        generators: Vec<GeneratorRecursion>,
        name: Option<String>,
    ) -> Self {
        let root_inverses = generators.iter().map(|g| g.root.inverse()).collect();
        SelfSimilarGroup {
            degree,
            ambient,
            generators,
            root_inverses,
            name,
            notes: Vec::new(),
            degree_cap: DEFAULT_DEGREE_CAP,
        }
    }

    pub fn with_degree_cap(mut self, cap: usize) -> Self {
        self.degree_cap = cap;
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn degree_cap(&self) -> usize {
        self.degree_cap
    }

    pub fn ambient_generators(&self) -> &[Permutation] {
        &self.ambient
    }

    pub fn ambient_group(&self) -> PermGroup {
        PermGroup::new(self.degree, self.ambient.clone()).expect("ambient degrees validated")
    }

    pub fn generators(&self) -> &[GeneratorRecursion] {
        &self.generators
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    /// Warnings attached by constructors (for instance degenerate input).
    pub fn notes(&self) -> &[String] {
        &self.notes
    }

    pub fn generator_id(&self, name: &str) -> Option<GenId> {
        self.generators.iter().position(|g| g.name == name)
    }

    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        let m = self.degree;
        if m < 2 {
            violations.push(Violation::DegreeTooSmall(m));
        }
        let mut ambient_ok = true;
        for (index, h) in self.ambient.iter().enumerate() {
            if h.degree() != m {
                violations.push(Violation::AmbientDegree { index, found: h.degree() });
                ambient_ok = false;
            }
        }
        let ambient = if ambient_ok && m >= 2 {
            let group = PermGroup::new(m, self.ambient.clone()).expect("degrees checked");
            if group.order() < 2u32.into() {
                violations.push(Violation::AmbientTooSmall);
            }
            Some(group)
        } else {
            None
        };
        for (i, g) in self.generators.iter().enumerate() {
            if g.name.is_empty() {
                violations.push(Violation::EmptyName);
            }
            if self.generators[..i].iter().any(|h| h.name == g.name) {
                violations.push(Violation::DuplicateName(g.name.clone()));
            }
            if g.root.degree() != m {
                violations.push(Violation::RootDegree { gen: g.name.clone(), found: g.root.degree() });
            } else if let Some(h) = &ambient {
                if !h.contains(&g.root).unwrap_or(false) {
                    violations.push(Violation::RootOutsideAmbient {
                        gen: g.name.clone(),
                        root: g.root.to_string(),
                    });
                }
            }
            if g.sections.len() != m {
                violations.push(Violation::SectionArity {
                    gen: g.name.clone(),
                    found: g.sections.len(),
                    expected: m,
                });
            }
            for w in &g.sections {
                for l in w.letters() {
                    if l.gen >= self.generators.len() {
                        violations.push(Violation::UnknownSectionGenerator {
                            gen: g.name.clone(),
                            id: l.gen,
                        });
                    }
                }
            }
        }
        ValidationReport { violations }
    }

    /// Parses words such as `a^2*b^-1`, `a b a` or `1` (identity).
    pub fn parse_word(&self, text: &str) -> Result<TreeWord, TreeError> {
        parse_word_with(|name| self.generator_id(name), text)
    }

    pub fn format_word(&self, w: &TreeWord) -> String {
        if w.is_identity() {
            return "1".to_string();
        }
        let parts: Vec<String> = w
            .letters()
            .iter()
            .map(|l| {
                let name = self.generators.get(l.gen).map_or("?", |g| g.name.as_str());
                if l.exp == 1 {
                    name.to_string()
                } else {
                    format!("{name}^{}", l.exp)
                }
            })
            .collect();
        parts.join("*")
    }

    fn check_word(&self, w: &TreeWord) -> Result<(), TreeError> {
        match w.letters().iter().find(|l| l.gen >= self.generators.len()) {
            Some(l) => Err(TreeError::UnknownGenerator(format!("#{}", l.gen))),
            None => Ok(()),
        }
    }

    /// Section at a first-level vertex (0-based), by the rules
    /// `(gh)|_x = g|_x h|_{x^g}` and `(g^-1)|_x = (g|_{x^{g^-1}})^-1`.
    fn section_at_digit(&self, w: &TreeWord, x: usize) -> TreeWord {
        let mut out = TreeWord::identity();
        let mut y = x;
        for l in w.letters() {
            let g = &self.generators[l.gen];
            if l.exp > 0 {
                for _ in 0..l.exp {
                    out.mul_assign(&g.sections[y]);
                    y = g.root.image(y);
                }
            } else {
                let inv = &self.root_inverses[l.gen];
                for _ in 0..-l.exp {
                    y = inv.image(y);
                    out.mul_assign(&g.sections[y].inverse());
                }
            }
        }
        out
    }

    fn check_vertex(&self, vertex: &[usize]) -> Result<(), TreeError> {
        for &d in vertex {
            if d == 0 || d > self.degree {
                return Err(TreeError::DigitOutOfRange { digit: d, degree: self.degree });
            }
        }
        Ok(())
    }

    /// Section `w|_v` at the vertex `v` given by 1-based digits.
    pub fn section(&self, w: &TreeWord, vertex: &[usize]) -> Result<TreeWord, TreeError> {
        self.check_word(w)?;
        if vertex.is_empty() {
            return Err(TreeError::EmptyVertex);
        }
        self.check_vertex(vertex)?;
        let mut cur = w.clone();
        for &d in vertex {
            cur = self.section_at_digit(&cur, d - 1);
        }
        Ok(cur)
    }

    /// Permutation induced on the first level.
    pub fn root_action(&self, w: &TreeWord) -> Result<Permutation, TreeError> {
        self.check_word(w)?;
        let mut p = Permutation::identity(self.degree);
        for l in w.letters() {
            p.then_assign(&self.generators[l.gen].root.pow(l.exp));
        }
        Ok(p)
    }

    /// Image of a vertex (1-based digits) computed digit by digit from
    /// sections, without building any level permutation.
    pub fn vertex_image(&self, w: &TreeWord, vertex: &[usize]) -> Result<Vec<usize>, TreeError> {
        self.check_word(w)?;
        self.check_vertex(vertex)?;
        let mut out = Vec::with_capacity(vertex.len());
        let mut cur = w.clone();
        for &d in vertex {
            out.push(self.root_action(&cur)?.image(d - 1) + 1);
            cur = self.section_at_digit(&cur, d - 1);
        }
        Ok(out)
    }

    /// Number of vertices at `level`, subject to the degree cap.
    pub fn level_size(&self, level: usize) -> Result<usize, TreeError> {
        if level == 0 {
            return Err(TreeError::LevelZero);
        }
        let cap_err = || TreeError::DegreeCapExceeded {
            level,
            points: format!("{}^{}", self.degree, level),
            cap: self.degree_cap,
        };
        let size = u32::try_from(level)
            .ok()
            .and_then(|l| self.degree.checked_pow(l))
            .ok_or_else(cap_err)?;
        if size > self.degree_cap {
            return Err(cap_err());
        }
        Ok(size)
    }

    /// Actions of every generator on levels `1..=level`.
    pub fn level_actions(&self, level: usize) -> Result<LevelActions, TreeError> {
        self.level_size(level)?;
        let m = self.degree;
        let mut acts = LevelActions {
            tree_degree: m,
            levels: vec![self.generators.iter().map(|g| g.root.clone()).collect()],
        };
        let mut sub = 1usize;
        for below in 1..level {
            sub *= m;
            let mut next = Vec::with_capacity(self.generators.len());
            for g in &self.generators {
                let mut images = vec![0u32; sub * m];
                for i in 0..m {
                    let j = g.root.image(i);
                    let sec = acts.word(&g.sections[i], below)?;
                    for (r, &t) in sec.images().iter().enumerate() {
                        images[i * sub + r] = (j * sub) as u32 + t;
                    }
                }
                next.push(Permutation::from_images_unchecked(images));
            }
            acts.levels.push(next);
        }
        Ok(acts)
    }

    /// Action of `w` on the `level`-th level.
    pub fn level_action(&self, w: &TreeWord, level: usize) -> Result<Permutation, TreeError> {
        self.check_word(w)?;
        self.level_actions(level)?.word(w, level)
    }
}

/// Cached level permutations of the generators of a group.
#[derive(Clone, Debug)]
pub struct LevelActions {
    tree_degree: usize,
    levels: Vec<Vec<Permutation>>,
}

impl LevelActions {
    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// Generator permutations on `level` (1-based).
    pub fn generators(&self, level: usize) -> &[Permutation] {
        &self.levels[level - 1]
    }

    pub fn word(&self, w: &TreeWord, level: usize) -> Result<Permutation, TreeError> {
        if level == 0 {
            return Err(TreeError::LevelZero);
        }
        let gens = &self.levels[level - 1];
        let mut p = Permutation::identity(self.tree_degree.pow(level as u32));
        for l in w.letters() {
            let g = gens.get(l.gen).ok_or_else(|| TreeError::UnknownGenerator(format!("#{}", l.gen)))?;
            p.then_assign(&g.pow(l.exp));
        }
        Ok(p)
    }
}

/// Parses a word, resolving generator names through `lookup`.
pub fn parse_word_with(
    lookup: impl Fn(&str) -> Option<GenId>,
    text: &str,
) -> Result<TreeWord, TreeError> {
    let err = |reason: &str| TreeError::WordSyntax { word: text.to_string(), reason: reason.into() };
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Err(err("empty word"));
    }
    let mut w = TreeWord::identity();
    for tok in trimmed.split(|c: char| c == '*' || c.is_whitespace()).filter(|t| !t.is_empty()) {
        if tok == "1" {
            continue;
        }
        let (name, exp) = match tok.split_once('^') {
            Some((n, e)) => {
                let e: i64 = e.trim().parse().map_err(|_| err("bad exponent"))?;
                (n.trim(), e)
            }
            None => (tok, 1),
        };
        let gen = lookup(name).ok_or_else(|| TreeError::UnknownGenerator(name.to_string()))?;
        w.push(Letter { gen, exp });
    }
    Ok(w)
}

/// 0-based index of a level vertex given by 1-based digits.
pub fn vertex_index(degree: usize, vertex: &[usize]) -> usize {
    vertex.iter().fold(0, |acc, &d| acc * degree + (d - 1))
}

/// Inverse of [`vertex_index`].
pub fn vertex_digits(degree: usize, level: usize, mut index: usize) -> Vec<usize> {
    let mut digits = vec![0; level];
    for slot in digits.iter_mut().rev() {
        *slot = index % degree + 1;
        index /= degree;
    }
    digits
}
