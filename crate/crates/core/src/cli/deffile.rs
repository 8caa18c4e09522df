//! Group-definition files.
//!
//! ```text
//! # comments start with '#'
//! name    = rooted cycle and a directed element
//! degree  = 4
//! ambient = (1,2,3,4)            # several generators separated by ';'
//! gen a   = (1,2,3,4) | 1, 1, 1, 1
//! gen b   = ()        | a, 1, a, b
//! ```
//!
//! Each `gen` line gives the root permutation in cycle notation, then `|`,
//! then exactly `degree` comma-separated section words. Words are products of
//! `name` or `name^k` joined by `*` or spaces; `1` is the identity. Sections
//! may refer to generators declared further down.

use thiserror::Error;

use crate::perm::Permutation;
use crate::tree::{parse_word_with, GeneratorRecursion, SelfSimilarGroup, TreeError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DefinitionError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing `{0}` entry")]
    Missing(&'static str),
    #[error(transparent)]
    Invalid(#[from] TreeError),
}

fn syntax(line: usize, message: impl Into<String>) -> DefinitionError {
    DefinitionError::Syntax { line, message: message.into() }
}

struct GenLine {
    line: usize,
    name: String,
    root: String,
    sections: Vec<String>,
}

pub fn parse_definition(text: &str) -> Result<SelfSimilarGroup, DefinitionError> {
    let mut name = None;
    let mut degree: Option<(usize, usize)> = None;
    let mut ambient: Option<(usize, String)> = None;
    let mut gens: Vec<GenLine> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| syntax(line, "expected `key = value`"))?;
        let key = key.trim();
        let value = value.trim();
        if let Some(gen_name) = key.strip_prefix("gen ") {
            let gen_name = gen_name.trim();
            if gen_name.is_empty() || gen_name.contains(|c: char| c.is_whitespace() || "^*,|()".contains(c)) || gen_name == "1" {
                return Err(syntax(line, format!("invalid generator name {gen_name:?}")));
            }
            let (root, sections) = value
                .split_once('|')
                .ok_or_else(|| syntax(line, "expected `root | sections`"))?;
            gens.push(GenLine {
                line,
                name: gen_name.to_string(),
                root: root.trim().to_string(),
                sections: sections.split(',').map(|s| s.trim().to_string()).collect(),
            });
            continue;
        }
        match key {
            "name" => name = Some(value.to_string()),
            "degree" => {
                let m = value.parse().map_err(|_| syntax(line, format!("bad degree {value:?}")))?;
                degree = Some((line, m));
            }
            "ambient" => ambient = Some((line, value.to_string())),
            other => return Err(syntax(line, format!("unknown key {other:?}"))),
        }
    }

    let (degree_line, m) = degree.ok_or(DefinitionError::Missing("degree"))?;
    if m < 2 {
        return Err(syntax(degree_line, "degree must be at least 2"));
    }
    let (ambient_line, ambient_text) = ambient.ok_or(DefinitionError::Missing("ambient"))?;
    let ambient = ambient_text
        .split(';')
        .map(|p| Permutation::parse_cycles(m, p).map_err(|e| syntax(ambient_line, e.to_string())))
        .collect::<Result<Vec<_>, _>>()?;

    let names: Vec<String> = gens.iter().map(|g| g.name.clone()).collect();
    let lookup = |n: &str| names.iter().position(|x| x == n);
    let mut recursions = Vec::with_capacity(gens.len());
    for g in &gens {
        let root = Permutation::parse_cycles(m, &g.root).map_err(|e| syntax(g.line, e.to_string()))?;
        let sections = g
            .sections
            .iter()
            .map(|s| parse_word_with(lookup, s).map_err(|e| syntax(g.line, e.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        recursions.push(GeneratorRecursion { name: g.name.clone(), root, sections });
    }
    Ok(SelfSimilarGroup::new(m, ambient, recursions, name)?)
}
