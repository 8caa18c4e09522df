//! GGS-groups and named presets.

use std::fmt;

use thiserror::Error;

use crate::perm::Permutation;
use crate::tree::{GeneratorRecursion, SelfSimilarGroup, TreeWord};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CatalogError {
    #[error("tree degree must be at least 2, got {0}")]
    Degree(usize),
    #[error("defining vector for degree {m} needs {} entries, got {found}", m - 1)]
    Length { m: usize, found: usize },
    #[error("unknown preset {0:?}; expected \"ggs:m:e1,e2,..\" or \"second-grigorchuk\"")]
    UnknownPreset(String),
    #[error("cannot parse {0:?}")]
    Syntax(String),
}

/// Exponent vector `e = (e_1, .., e_{m-1})` of a GGS-group, entries mod `m`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DefiningVector {
    m: usize,
    e: Vec<usize>,
}

impl DefiningVector {
    /// Entries may be negative; they are reduced modulo `m`.
    pub fn new(m: usize, entries: &[i64]) -> Result<Self, CatalogError> {
        if m < 2 {
            return Err(CatalogError::Degree(m));
        }
        if entries.len() != m - 1 {
            return Err(CatalogError::Length { m, found: entries.len() });
        }
        let e = entries.iter().map(|&x| x.rem_euclid(m as i64) as usize).collect();
        Ok(DefiningVector { m, e })
    }

    pub fn degree(&self) -> usize {
        self.m
    }

    pub fn entries(&self) -> &[usize] {
        &self.e
    }

    pub fn is_degenerate(&self) -> bool {
        self.e.iter().all(|&x| x == 0)
    }

    pub fn reversed(&self) -> DefiningVector {
        DefiningVector { m: self.m, e: self.e.iter().rev().copied().collect() }
    }

    /// Parses `e1,e2,..` for degree `m`.
    pub fn parse(m: usize, text: &str) -> Result<Self, CatalogError> {
        let entries = text
            .split(',')
            .map(|t| t.trim().parse::<i64>().map_err(|_| CatalogError::Syntax(text.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(m, &entries)
    }
}

/// Renders residues above `m/2` as negatives, e.g. `(1,-1,2)` for `m = 4`.
impl fmt::Display for DefiningVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .e
            .iter()
            .map(|&x| {
                if 2 * x > self.m {
                    format!("-{}", self.m - x)
                } else {
                    x.to_string()
                }
            })
            .collect();
        write!(f, "({})", parts.join(","))
    }
}

fn m_cycle(m: usize) -> Permutation {
    Permutation::from_cycles(m, &[(1..=m).collect()]).expect("m-cycle is a permutation")
}

/// GGS-group `<a, b>` with `a` the rooted m-cycle `(1 2 .. m)` and
/// `psi(b) = (a^{e_1}, .., a^{e_{m-1}}, b)`, inside `W_H` for `H = <(1 2 .. m)>`.
pub fn ggs_group(v: &DefiningVector) -> SelfSimilarGroup {
    let m = v.m;
    let cycle = m_cycle(m);
    let a = GeneratorRecursion {
        name: "a".into(),
        root: cycle.clone(),
        sections: vec![TreeWord::identity(); m],
    };
    let mut sections: Vec<TreeWord> = v.e.iter().map(|&x| TreeWord::power(0, x as i64)).collect();
    sections.push(TreeWord::generator(1));
    let b = GeneratorRecursion { name: "b".into(), root: Permutation::identity(m), sections };
    let group = SelfSimilarGroup::new(m, vec![cycle], vec![a, b], Some(format!("GGS{v}")))
        .expect("GGS recursion is well formed");
    if v.is_degenerate() {
        group.with_note("degenerate defining vector: b is the identity and the group is not branch")
    } else {
        group
    }
}

/// `gcd(e_i, m) = 1` iff `gcd(e_{m-i}, m) = 1` for every `i`.
pub fn is_invertible_symmetric(v: &DefiningVector) -> bool {
    let unit = |x: usize| num_integer::gcd(x, v.m) == 1;
    let n = v.e.len();
    (0..n).all(|i| unit(v.e[i]) == unit(v.e[n - 1 - i]))
}

/// The eight non-IS defining vectors on the 4-adic tree with first entry 1,
/// in table order.
pub fn non_is_table_vectors() -> Vec<DefiningVector> {
    [[1, 0, 0], [1, 0, 2], [1, 2, 0], [1, 2, 2], [1, 1, 0], [1, 1, 2], [1, -1, 0], [1, -1, 2]]
        .iter()
        .map(|e| DefiningVector::new(4, e).expect("length 3"))
        .collect()
}

pub fn second_grigorchuk_vector() -> DefiningVector {
    DefiningVector::new(4, &[1, 0, 1]).expect("length 3")
}

/// The second Grigorchuk group, GGS on `T_4` with vector `(1,0,1)`.
pub fn second_grigorchuk() -> SelfSimilarGroup {
    let g = ggs_group(&second_grigorchuk_vector());
    let (m, ambient, gens) = (g.degree(), g.ambient_generators().to_vec(), g.generators().to_vec());
    SelfSimilarGroup::new(m, ambient, gens, Some("second Grigorchuk group".into()))
        .expect("valid recursion")
}

/// Resolves `ggs:m:e1,e2,..` or `second-grigorchuk`.
pub fn preset(name: &str) -> Result<SelfSimilarGroup, CatalogError> {
    let name = name.trim();
    if name == "second-grigorchuk" {
        return Ok(second_grigorchuk());
    }
    let rest = name.strip_prefix("ggs:").ok_or_else(|| CatalogError::UnknownPreset(name.into()))?;
    let (m, e) = rest.split_once(':').ok_or_else(|| CatalogError::Syntax(name.into()))?;
    let m: usize = m.trim().parse().map_err(|_| CatalogError::Syntax(name.into()))?;
    Ok(ggs_group(&DefiningVector::parse(m, e)?))
}
