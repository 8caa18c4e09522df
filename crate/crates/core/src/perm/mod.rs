//! Finite permutation groups: stabilizer chains, exact orders, membership,
//! normal closures, derived and lower central series, pointwise stabilizers.

mod chain;
mod permutation;

use std::collections::VecDeque;
use std::sync::OnceLock;

use num_bigint::BigUint;
use thiserror::Error;

pub use chain::StabilizerChain;
pub use permutation::Permutation;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PermError {
    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },
    #[error("point {point} out of range 1..={degree}")]
    PointOutOfRange { point: usize, degree: usize },
    #[error("images do not form a bijection")]
    NotABijection,
    #[error("base point {0} listed twice")]
    RepeatedBasePoint(usize),
    #[error("seed {0} is not an element of the ambient group")]
    SeedNotInAmbient(String),
    #[error("invalid permutation syntax: {0}")]
    Parse(String),
}

/// A permutation group given by generators; its stabilizer chain is built on
/// first use and cached.
#[derive(Debug)]
pub struct PermGroup {
    degree: usize,
    gens: Vec<Permutation>,
    chain: OnceLock<StabilizerChain>,
}

impl Clone for PermGroup {
    fn clone(&self) -> Self {
        let chain = OnceLock::new();
        if let Some(c) = self.chain.get() {
            let _ = chain.set(c.clone());
        }
        PermGroup { degree: self.degree, gens: self.gens.clone(), chain }
    }
}

impl PermGroup {
    pub fn new(degree: usize, gens: Vec<Permutation>) -> Result<Self, PermError> {
        if let Some(g) = gens.iter().find(|g| g.degree() != degree) {
            return Err(PermError::DegreeMismatch { expected: degree, found: g.degree() });
        }
        Ok(PermGroup { degree, gens, chain: OnceLock::new() })
    }

    pub fn trivial(degree: usize) -> Self {
        PermGroup { degree, gens: Vec::new(), chain: OnceLock::new() }
    }

    fn with_chain(gens: Vec<Permutation>, chain: StabilizerChain) -> Self {
        let degree = chain.degree();
        let cell = OnceLock::new();
        let _ = cell.set(chain);
        PermGroup { degree, gens, chain: cell }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.gens
    }

    pub fn chain(&self) -> &StabilizerChain {
        self.chain.get_or_init(|| {
            StabilizerChain::build(self.degree, &self.gens, &[])
                .expect("generator degrees checked at construction")
        })
    }

    pub fn order(&self) -> BigUint {
        self.chain().order()
    }

    pub fn contains(&self, p: &Permutation) -> Result<bool, PermError> {
        self.chain().contains(p)
    }

    /// True iff every generator of `self` lies in `sup`.
    pub fn is_subgroup_of(&self, sup: &PermGroup) -> Result<bool, PermError> {
        if self.degree != sup.degree {
            return Err(PermError::DegreeMismatch { expected: sup.degree, found: self.degree });
        }
        for g in &self.gens {
            if !sup.contains(g)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Smallest subgroup of `self` that contains `seeds` and is normalised
    /// by every generator of `self`.
    pub fn normal_closure(&self, seeds: &[Permutation]) -> Result<PermGroup, PermError> {
        for s in seeds {
            if !self.contains(s)? {
                return Err(PermError::SeedNotInAmbient(s.to_string()));
            }
        }
        let mut chain = StabilizerChain::build(self.degree, &[], &[])?;
        let mut gens = Vec::new();
        let mut queue = VecDeque::new();
        for s in seeds {
            if chain.extend(s)? {
                gens.push(s.clone());
                queue.push_back(s.clone());
            }
        }
        while let Some(n) = queue.pop_front() {
            for g in &self.gens {
                let c = n.conjugate_by(g);
                if chain.extend(&c)? {
                    gens.push(c.clone());
                    queue.push_back(c);
                }
            }
        }
        Ok(PermGroup::with_chain(gens, chain))
    }

    /// `[G, G]`, the normal closure of the generator commutators.
    pub fn derived_subgroup(&self) -> PermGroup {
        let mut seeds = Vec::new();
        for (i, a) in self.gens.iter().enumerate() {
            for b in &self.gens[i + 1..] {
                let c = Permutation::commutator(a, b);
                if !c.is_identity() {
                    seeds.push(c);
                }
            }
        }
        self.normal_closure(&seeds).expect("commutators lie in the group")
    }

    /// The `c`-th term of the lower central series, `gamma_1 = G`,
    /// `gamma_{c} = [gamma_{c-1}, G]`.
    pub fn lower_central(&self, c: usize) -> PermGroup {
        assert!(c >= 1, "lower central series is indexed from 1");
        let mut term = self.clone();
        for _ in 1..c {
            let mut seeds = Vec::new();
            for n in term.generators() {
                for g in &self.gens {
                    let x = Permutation::commutator(n, g);
                    if !x.is_identity() {
                        seeds.push(x);
                    }
                }
            }
            term = self.normal_closure(&seeds).expect("commutators lie in the group");
        }
        term
    }

    /// Subgroup fixing each listed 0-based point.
    pub fn pointwise_stabilizer(&self, points: &[usize]) -> Result<PermGroup, PermError> {
        if points.is_empty() {
            return Ok(self.clone());
        }
        let mut prefix = points.to_vec();
        prefix.sort_unstable();
        prefix.dedup();
        let full = StabilizerChain::build(self.degree, &self.gens, &prefix)?;
        let tail = full.tail(prefix.len());
        Ok(PermGroup::with_chain(tail.strong_generators().to_vec(), tail))
    }
}
