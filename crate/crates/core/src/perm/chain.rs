use std::fmt::Write as _;

use num_bigint::BigUint;
use num_traits::One;

use super::{PermError, Permutation};

const UNSEEN: u32 = u32::MAX;
const ROOT: u32 = u32::MAX - 1;

/// One level of a stabilizer chain: a base point, the strong generators
/// fixing all earlier base points, the basic orbit and its Schreier vector.
#[derive(Clone, Debug)]
struct Level {
    base: u32,
    /// Indices into `StabilizerChain::strong`.
    gens: Vec<u32>,
    orbit: Vec<u32>,
    /// Per point: `UNSEEN`, `ROOT` for the base point, or the index of the
    /// strong generator whose image first reached the point.
    label: Vec<u32>,
    /// Parallel to `gens`: how many orbit positions have had their Schreier
    /// generator for that strong generator checked.
    cursor: Vec<usize>,
}

impl Level {
    fn new(base: u32, degree: usize) -> Self {
        let mut label = vec![UNSEEN; degree];
        label[base as usize] = ROOT;
        Level { base, gens: Vec::new(), orbit: vec![base], label, cursor: Vec::new() }
    }
}

/// Base and strong generating set with Schreier-vector transversals.
///
/// Built by deterministic incremental Schreier-Sims: every Schreier
/// generator of every level is sifted through the levels below it before
/// construction returns, so the chain is exact.
#[derive(Clone, Debug)]
pub struct StabilizerChain {
    degree: usize,
    strong: Vec<Permutation>,
    inverses: Vec<Permutation>,
    /// Strong generators that belong to the user-supplied generating set (or
    /// were added by `extend`). Only these are needed for the Schreier
    /// generators of the first level.
    original: Vec<bool>,
    levels: Vec<Level>,
}

impl StabilizerChain {
    /// Builds a chain for `<generators>`; `base_prefix` (0-based points) heads
    /// the base in the given order.
    pub fn build(
        degree: usize,
        generators: &[Permutation],
        base_prefix: &[usize],
    ) -> Result<Self, PermError> {
        for g in generators {
            if g.degree() != degree {
                return Err(PermError::DegreeMismatch { expected: degree, found: g.degree() });
            }
        }
        let mut seen = vec![false; degree];
        for &p in base_prefix {
            if p >= degree {
                return Err(PermError::PointOutOfRange { point: p + 1, degree });
            }
            if seen[p] {
                return Err(PermError::RepeatedBasePoint(p + 1));
            }
            seen[p] = true;
        }
        let mut chain = StabilizerChain {
            degree,
            strong: Vec::new(),
            inverses: Vec::new(),
            original: Vec::new(),
            levels: base_prefix.iter().map(|&b| Level::new(b as u32, degree)).collect(),
        };
        for g in generators {
            if g.is_identity() || chain.strong.contains(g) {
                continue;
            }
            chain.add_strong(g.clone(), true);
        }
        if !chain.levels.is_empty() {
            chain.complete(chain.levels.len() - 1);
        }
        Ok(chain)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Base points, 0-based.
    pub fn base(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.base as usize).collect()
    }

    pub fn orbit_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.orbit.len()).collect()
    }

    pub fn strong_generators(&self) -> &[Permutation] {
        &self.strong
    }

    pub fn order(&self) -> BigUint {
        self.levels.iter().fold(BigUint::one(), |acc, l| acc * BigUint::from(l.orbit.len()))
    }

    pub fn contains(&self, p: &Permutation) -> Result<bool, PermError> {
        if p.degree() != self.degree {
            return Err(PermError::DegreeMismatch { expected: self.degree, found: p.degree() });
        }
        let mut g = p.clone();
        Ok(self.sift(&mut g, 0).is_none())
    }

    /// Adds `g` to the group; returns `false` if it was already a member.
    pub fn extend(&mut self, g: &Permutation) -> Result<bool, PermError> {
        if g.degree() != self.degree {
            return Err(PermError::DegreeMismatch { expected: self.degree, found: g.degree() });
        }
        let mut residue = g.clone();
        if self.sift(&mut residue, 0).is_none() {
            return Ok(false);
        }
        let depth = self.add_strong(residue, true);
        self.complete(depth);
        Ok(true)
    }

    /// The chain of the pointwise stabilizer of the first `k` base points.
    pub fn tail(&self, k: usize) -> StabilizerChain {
        assert!(k <= self.levels.len());
        if k == 0 {
            return self.clone();
        }
        let keep: Vec<u32> = match self.levels.get(k) {
            Some(level) => level.gens.clone(),
            None => Vec::new(),
        };
        let mut remap = vec![UNSEEN; self.strong.len()];
        for (new, &old) in keep.iter().enumerate() {
            remap[old as usize] = new as u32;
        }
        let strong = keep.iter().map(|&i| self.strong[i as usize].clone()).collect::<Vec<_>>();
        let inverses = keep.iter().map(|&i| self.inverses[i as usize].clone()).collect();
        let levels = self.levels[k..]
            .iter()
            .map(|l| Level {
                base: l.base,
                gens: l.gens.iter().map(|&i| remap[i as usize]).collect(),
                orbit: l.orbit.clone(),
                label: l
                    .label
                    .iter()
                    .map(|&x| if x == UNSEEN || x == ROOT { x } else { remap[x as usize] })
                    .collect(),
                cursor: l.cursor.clone(),
            })
            .collect();
        StabilizerChain {
            degree: self.degree,
            original: vec![true; strong.len()],
            strong,
            inverses,
            levels,
        }
    }

    /// Plain-text diagnostic dump: base (1-based), orbit sizes and order.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let base: Vec<String> = self.base().iter().map(|b| (b + 1).to_string()).collect();
        let sizes: Vec<String> = self.orbit_sizes().iter().map(|s| s.to_string()).collect();
        let _ = writeln!(out, "degree: {}", self.degree);
        let _ = writeln!(out, "base: [{}]", base.join(", "));
        let _ = writeln!(out, "orbit sizes: [{}]", sizes.join(", "));
        let _ = writeln!(out, "strong generators: {}", self.strong.len());
        let _ = writeln!(out, "order: {}", self.order());
        out
    }

    /// Sifts `g` in place starting at level `start`. Returns `None` when `g`
    /// reduces to the identity, otherwise the level at which sifting stopped
    /// (`levels.len()` if the residue fixes every base point).
    fn sift(&self, g: &mut Permutation, start: usize) -> Option<usize> {
        for (j, level) in self.levels.iter().enumerate().skip(start) {
            let mut x = g.image(level.base as usize);
            if x == level.base as usize {
                continue;
            }
            if level.label[x] == UNSEEN {
                return Some(j);
            }
            while x != level.base as usize {
                let s = level.label[x] as usize;
                let inv = &self.inverses[s];
                g.then_assign(inv);
                x = inv.image(x);
            }
        }
        if g.is_identity() {
            None
        } else {
            Some(self.levels.len())
        }
    }

    /// Transversal element `u_x` with `base^u_x = x`.
    fn coset_rep(&self, level: &Level, x: usize) -> Permutation {
        let mut path = Vec::new();
        let mut y = x;
        while y != level.base as usize {
            let s = level.label[y] as usize;
            path.push(s);
            y = self.inverses[s].image(y);
        }
        let mut rep = Permutation::identity(self.degree);
        for &s in path.iter().rev() {
            rep.then_assign(&self.strong[s]);
        }
        rep
    }

    /// Registers a new strong generator, extending the base if it fixes every
    /// base point. Returns the deepest level that received it.
    fn add_strong(&mut self, g: Permutation, original: bool) -> usize {
        let depth = self
            .levels
            .iter()
            .position(|l| g.image(l.base as usize) != l.base as usize)
            .unwrap_or_else(|| {
                let b = g.first_moved().expect("identity is never a strong generator");
                self.levels.push(Level::new(b as u32, self.degree));
                self.levels.len() - 1
            });
        let idx = self.strong.len() as u32;
        self.inverses.push(g.inverse());
        self.strong.push(g);
        self.original.push(original);
        let strong = &self.strong;
        for level in &mut self.levels[..=depth] {
            level.gens.push(idx);
            level.cursor.push(0);
            let new_gen = &strong[idx as usize];
            let old_len = level.orbit.len();
            for pos in 0..old_len {
                let y = new_gen.image(level.orbit[pos] as usize);
                if level.label[y] == UNSEEN {
                    level.label[y] = idx;
                    level.orbit.push(y as u32);
                }
            }
            let mut pos = old_len;
            while pos < level.orbit.len() {
                let x = level.orbit[pos] as usize;
                for &s in &level.gens {
                    let y = strong[s as usize].image(x);
                    if level.label[y] == UNSEEN {
                        level.label[y] = s;
                        level.orbit.push(y as u32);
                    }
                }
                pos += 1;
            }
        }
        depth
    }

    /// Next unchecked (generator slot, orbit position) pair at `level`.
    fn next_pair(&mut self, i: usize) -> Option<(u32, usize)> {
        let level = &mut self.levels[i];
        for slot in 0..level.gens.len() {
            let s = level.gens[slot];
            if i == 0 && !self.original[s as usize] {
                level.cursor[slot] = level.orbit.len();
                continue;
            }
            if level.cursor[slot] < level.orbit.len() {
                let pos = level.cursor[slot];
                level.cursor[slot] += 1;
                return Some((s, pos));
            }
        }
        None
    }

    /// Schreier-Sims main loop, starting at level `i` and working upwards.
    fn complete(&mut self, mut i: usize) {
        loop {
            let Some((s, pos)) = self.next_pair(i) else {
                if i == 0 {
                    return;
                }
                i -= 1;
                continue;
            };
            let level = &self.levels[i];
            let x = level.orbit[pos] as usize;
            let y = self.strong[s as usize].image(x);
            if level.label[y] == s {
                // tree edge: the Schreier generator is trivial
                continue;
            }
            let mut h = self.coset_rep(level, x);
            h.then_assign(&self.strong[s as usize]);
            let mut z = y;
            while z != level.base as usize {
                let t = level.label[z] as usize;
                let inv = &self.inverses[t];
                h.then_assign(inv);
                z = inv.image(z);
            }
            if self.sift(&mut h, i + 1).is_some() {
                i = self.add_strong(h, false);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: usize, s: &str) -> Permutation {
        Permutation::parse_cycles(n, s).unwrap()
    }

    #[test]
    fn cyclic_and_symmetric_orders() {
        let c = StabilizerChain::build(4, &[p(4, "(1,2,3,4)")], &[]).unwrap();
        assert_eq!(c.order(), BigUint::from(4u32));
        let s = StabilizerChain::build(4, &[p(4, "(1,2)"), p(4, "(1,2,3,4)")], &[]).unwrap();
        assert_eq!(s.order(), BigUint::from(24u32));
        let t = StabilizerChain::build(5, &[], &[]).unwrap();
        assert_eq!(t.order(), BigUint::one());
    }

    #[test]
    fn prescribed_prefix_heads_base() {
        let s = StabilizerChain::build(4, &[p(4, "(1,2)"), p(4, "(1,2,3,4)")], &[3, 2]).unwrap();
        assert_eq!(&s.base()[..2], &[3, 2]);
        assert_eq!(s.order(), BigUint::from(24u32));
        let tail = s.tail(2);
        assert_eq!(tail.order(), BigUint::from(2u32));
    }

    #[test]
    fn extend_grows_group() {
        let mut c = StabilizerChain::build(4, &[p(4, "(1,2,3,4)")], &[]).unwrap();
        assert!(!c.extend(&p(4, "(1,3)(2,4)")).unwrap());
        assert!(c.extend(&p(4, "(1,3)")).unwrap());
        assert_eq!(c.order(), BigUint::from(8u32));
    }

    #[test]
    fn rejects_degree_mismatch() {
        assert!(StabilizerChain::build(4, &[p(3, "(1,2)")], &[]).is_err());
        assert!(StabilizerChain::build(4, &[], &[1, 1]).is_err());
    }
}
