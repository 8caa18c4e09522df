//! Helpers shared by the integration tests: brute-force group enumeration,
//! seeded random inputs and the groups used throughout.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet, VecDeque};

use branch_hdim::catalog::{ggs_group, non_is_table_vectors, second_grigorchuk};
use branch_hdim::perm::Permutation;
use branch_hdim::tree::{Letter, SelfSimilarGroup, TreeWord};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type Elt = Vec<u32>;

pub fn compose(p: &Elt, q: &Elt) -> Elt {
    p.iter().map(|&x| q[x as usize]).collect()
}

pub fn invert(p: &Elt) -> Elt {
    let mut inv = vec![0; p.len()];
    for (x, &y) in p.iter().enumerate() {
        inv[y as usize] = x as u32;
    }
    inv
}

pub fn elt(p: &Permutation) -> Elt {
    p.images().to_vec()
}

/// Every element of `<gens>` by breadth-first closure under right
/// multiplication by generators.
pub fn enumerate(degree: usize, gens: &[Elt]) -> HashSet<Elt> {
    let id: Elt = (0..degree as u32).collect();
    let mut seen = HashSet::from([id.clone()]);
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = compose(&x, g);
            if seen.insert(y.clone()) {
                queue.push_back(y);
            }
        }
    }
    seen
}

/// Normal closure of `seeds` in `group` as the subgroup generated by all
/// conjugates of the seeds by all elements.
pub fn brute_normal_closure(degree: usize, group: &HashSet<Elt>, seeds: &[Elt]) -> HashSet<Elt> {
    let conjugates: BTreeSet<Elt> = seeds
        .iter()
        .flat_map(|s| group.iter().map(move |g| compose(&compose(&invert(g), s), g)))
        .collect();
    enumerate(degree, &conjugates.into_iter().collect::<Vec<_>>())
}

/// Subgroup generated by all commutators of pairs of elements.
pub fn brute_derived(degree: usize, group: &HashSet<Elt>) -> HashSet<Elt> {
    let elements: Vec<&Elt> = group.iter().collect();
    let mut commutators = BTreeSet::new();
    for a in &elements {
        let ai = invert(a);
        for b in &elements {
            let c = compose(&compose(&compose(&ai, &invert(b)), a), b);
            commutators.insert(c);
        }
    }
    enumerate(degree, &commutators.into_iter().collect::<Vec<_>>())
}

pub fn random_perm(rng: &mut ChaCha8Rng, degree: usize) -> Permutation {
    let mut images: Vec<u32> = (0..degree as u32).collect();
    images.shuffle(rng);
    Permutation::from_images(images).unwrap()
}

/// Generator sets on 1..=7 points; small groups are made likelier by
/// sometimes using fixed-point-heavy generators.
pub fn random_generator_set(rng: &mut ChaCha8Rng) -> (usize, Vec<Permutation>) {
    let degree = rng.gen_range(1..=7);
    let count = rng.gen_range(0..=3);
    let gens = (0..count)
        .map(|_| {
            if rng.gen_bool(0.4) && degree >= 2 {
                let a = rng.gen_range(0..degree);
                let b = rng.gen_range(0..degree);
                let mut images: Vec<u32> = (0..degree as u32).collect();
                images.swap(a, b);
                Permutation::from_images(images).unwrap()
            } else {
                random_perm(rng, degree)
            }
        })
        .collect();
    (degree, gens)
}

pub fn random_word(rng: &mut ChaCha8Rng, generators: usize, max_len: usize, max_exp: i64) -> TreeWord {
    let len = rng.gen_range(0..=max_len);
    TreeWord::from_letters((0..len).map(|_| Letter {
        gen: rng.gen_range(0..generators),
        exp: {
            let e = rng.gen_range(1..=max_exp);
            if rng.gen_bool(0.5) { -e } else { e }
        },
    }))
}

/// The eight table groups followed by the second Grigorchuk group.
pub fn structural_groups() -> Vec<SelfSimilarGroup> {
    let mut groups: Vec<_> = non_is_table_vectors().iter().map(ggs_group).collect();
    groups.push(second_grigorchuk());
    groups
}

/// Parent of a 0-based level-`n` vertex index.
pub fn parent(m: usize, index: usize) -> usize {
    index / m
}
