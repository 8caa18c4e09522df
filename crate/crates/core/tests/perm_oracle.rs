mod common;

use std::collections::{BTreeSet, HashSet};

use branch_hdim::perm::{PermGroup, Permutation};
use common::*;
use proptest::prelude::*;

fn perm_strategy(degree: usize) -> impl Strategy<Value = Permutation> {
    Just((0..degree as u32).collect::<Vec<_>>())
        .prop_shuffle()
        .prop_map(|v| Permutation::from_images(v).unwrap())
}

fn group_strategy() -> impl Strategy<Value = (usize, Vec<Permutation>)> {
    (1usize..=6).prop_flat_map(|n| (Just(n), prop::collection::vec(perm_strategy(n), 0..=3)))
}

fn all_perms(degree: usize) -> Vec<Elt> {
    let mut out = Vec::new();
    let mut cur: Vec<u32> = (0..degree as u32).collect();
    fn rec(k: usize, cur: &mut Vec<u32>, out: &mut Vec<Elt>) {
        if k == cur.len() {
            out.push(cur.clone());
            return;
        }
        for i in k..cur.len() {
            cur.swap(k, i);
            rec(k + 1, cur, out);
            cur.swap(k, i);
        }
    }
    rec(0, &mut cur, &mut out);
    out
}

fn as_set(g: &PermGroup) -> HashSet<Elt> {
    let gens: Vec<Elt> = g.generators().iter().map(elt).collect();
    enumerate(g.degree(), &gens)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn order_and_membership((n, gens) in group_strategy()) {
        let g = PermGroup::new(n, gens.clone()).unwrap();
        let brute = enumerate(n, &gens.iter().map(elt).collect::<Vec<_>>());
        prop_assert_eq!(g.order(), brute.len().into());
        for p in all_perms(n) {
            let q = Permutation::from_images(p.clone()).unwrap();
            prop_assert_eq!(g.contains(&q).unwrap(), brute.contains(&p));
        }
    }

    #[test]
    fn strong_generators_lie_in_the_group((n, gens) in group_strategy()) {
        let g = PermGroup::new(n, gens.clone()).unwrap();
        let brute = enumerate(n, &gens.iter().map(elt).collect::<Vec<_>>());
        for s in g.chain().strong_generators() {
            prop_assert!(brute.contains(&elt(s)));
        }
        let sizes: usize = g.chain().orbit_sizes().iter().product();
        prop_assert_eq!(sizes, brute.len());
    }

    #[test]
    fn normal_closure_matches((n, gens) in group_strategy(), picks in prop::collection::vec(any::<prop::sample::Index>(), 0..3)) {
        let g = PermGroup::new(n, gens.clone()).unwrap();
        let brute = enumerate(n, &gens.iter().map(elt).collect::<Vec<_>>());
        let sorted: Vec<Elt> = brute.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
        let seeds: Vec<Elt> = picks.iter().map(|i| sorted[i.index(sorted.len())].clone()).collect();
        let perms: Vec<Permutation> = seeds.iter().map(|s| Permutation::from_images(s.clone()).unwrap()).collect();
        let closure = g.normal_closure(&perms).unwrap();
        let expected = brute_normal_closure(n, &brute, &seeds);
        prop_assert_eq!(closure.order(), expected.len().into());
        prop_assert_eq!(as_set(&closure), expected);
    }

    #[test]
    fn derived_and_lower_central((n, gens) in group_strategy()) {
        let g = PermGroup::new(n, gens.clone()).unwrap();
        let brute = enumerate(n, &gens.iter().map(elt).collect::<Vec<_>>());
        let derived = brute_derived(n, &brute);
        prop_assert_eq!(as_set(&g.derived_subgroup()), derived.clone());
        // gamma_3 = <[x, y] : x in gamma_2, y in G>
        let mut comms = BTreeSet::new();
        for x in &derived {
            for y in &brute {
                comms.insert(compose(&compose(&compose(&invert(x), &invert(y)), x), y));
            }
        }
        let gamma3 = enumerate(n, &comms.into_iter().collect::<Vec<_>>());
        prop_assert_eq!(as_set(&g.lower_central(3)), gamma3);
    }

    #[test]
    fn pointwise_stabilizers((n, gens) in group_strategy(), points in prop::collection::vec(0usize..6, 0..3)) {
        let points: Vec<usize> = points.into_iter().filter(|&p| p < n).collect();
        let g = PermGroup::new(n, gens.clone()).unwrap();
        let brute = enumerate(n, &gens.iter().map(elt).collect::<Vec<_>>());
        let fixed: HashSet<Elt> = brute.into_iter().filter(|p| points.iter().all(|&x| p[x] == x as u32)).collect();
        let st = g.pointwise_stabilizer(&points).unwrap();
        prop_assert_eq!(as_set(&st), fixed);
        prop_assert!(st.is_subgroup_of(&g).unwrap());
    }

    #[test]
    fn product_laws(p in perm_strategy(7), q in perm_strategy(7), r in perm_strategy(7)) {
        prop_assert_eq!(p.then(&q).then(&r), p.then(&q.then(&r)));
        prop_assert!(p.then(&p.inverse()).is_identity());
        prop_assert_eq!(elt(&p.then(&q)), compose(&elt(&p), &elt(&q)));
        prop_assert_eq!(p.pow(5).then(&p.pow(-3)), p.pow(2));
        let text = p.to_string();
        prop_assert_eq!(Permutation::parse_cycles(7, &text).unwrap(), p);
    }
}
