mod common;

use branch_hdim::quotients::QuotientTable;
use branch_hdim::tree::{vertex_digits, vertex_index};
use common::*;
use num_bigint::BigUint;
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const DEPTH: usize = 4;

#[test]
fn section_cocycle_law() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for g in structural_groups() {
        let m = g.degree();
        for _ in 0..40 {
            let u = random_word(&mut rng, 2, 6, 3);
            let v = random_word(&mut rng, 2, 6, 3);
            let x: Vec<usize> = (0..rng.gen_range(1..=3)).map(|_| rng.gen_range(1..=m)).collect();
            let xu = g.vertex_image(&u, &x).unwrap();
            let lhs = g.section(&u.mul(&v), &x).unwrap();
            let rhs = g.section(&u, &x).unwrap().mul(&g.section(&v, &xu).unwrap());
            assert_eq!(g.level_action(&lhs, 3).unwrap(), g.level_action(&rhs, 3).unwrap());
            // inverse rule: (u^-1)|_x = (u|_{x^{u^-1}})^-1
            let ui = u.inverse();
            let xui = g.vertex_image(&ui, &x).unwrap();
            let lhs = g.section(&ui, &x).unwrap();
            let rhs = g.section(&u, &xui).unwrap().inverse();
            assert_eq!(g.level_action(&lhs, 3).unwrap(), g.level_action(&rhs, 3).unwrap());
        }
    }
}

#[test]
fn level_action_is_a_homomorphism() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for g in structural_groups() {
        let acts = g.level_actions(DEPTH).unwrap();
        for _ in 0..30 {
            let u = random_word(&mut rng, 2, 8, 3);
            let v = random_word(&mut rng, 2, 8, 3);
            for n in 1..=DEPTH {
                let pu = acts.word(&u, n).unwrap();
                let pv = acts.word(&v, n).unwrap();
                assert_eq!(acts.word(&u.mul(&v), n).unwrap(), pu.then(&pv));
                assert!(acts.word(&u.mul(&u.inverse()), n).unwrap().is_identity());
                assert_eq!(acts.word(&u, n).unwrap(), g.level_action(&u, n).unwrap());
            }
        }
    }
}

#[test]
fn projection_and_vertex_images_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for g in structural_groups() {
        let m = g.degree();
        let acts = g.level_actions(DEPTH).unwrap();
        for _ in 0..10 {
            let w = random_word(&mut rng, 2, 8, 3);
            for n in 2..=DEPTH {
                let upper = acts.word(&w, n).unwrap();
                let lower = acts.word(&w, n - 1).unwrap();
                for i in 0..upper.degree() {
                    assert_eq!(parent(m, upper.image(i)), lower.image(parent(m, i)));
                }
            }
            for i in 0..m.pow(3) {
                let digits = vertex_digits(m, 3, i);
                assert_eq!(vertex_index(m, &digits), i);
                let image = g.vertex_image(&w, &digits).unwrap();
                assert_eq!(vertex_index(m, &image), acts.word(&w, 3).unwrap().image(i));
            }
        }
    }
}

#[test]
fn quotient_orders_divide_the_iterated_wreath_product() {
    for g in structural_groups() {
        let m = g.degree();
        let h = g.ambient_group().order();
        let table = QuotientTable::compute(g, DEPTH).unwrap();
        for n in 1..=DEPTH {
            let exponent = (m.pow(n as u32) - 1) / (m - 1);
            let bound: BigUint = num_traits::pow(h.clone(), exponent);
            assert!(bound.is_multiple_of(&table.order(n).unwrap()));
            assert!(table.order(n).unwrap().is_multiple_of(&table.order(n - 1).unwrap()));
        }
    }
}

#[test]
fn s_matches_stabilizer_orders() {
    for g in structural_groups() {
        let table = QuotientTable::compute(g, 4).unwrap();
        for n in 1..=3 {
            assert_eq!(table.s_via_stabilizers(n).unwrap(), table.s(n).unwrap());
        }
    }
}
