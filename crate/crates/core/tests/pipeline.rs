use branch_hdim::branchcheck::{discard_by_s, verify_stabilizer_containment, Verdict};
use branch_hdim::catalog::{preset, second_grigorchuk};
use branch_hdim::hausdorff::{
    factor::omega, hausdorff_dimension, s_partial_sum, BranchStructure, IndexData, Normality,
    SubgroupSpec, Tier,
};
use branch_hdim::quotients::{LogValue, QuotientTable};
use branch_hdim::tree::TreeWord;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use proptest::prelude::*;

fn q(n: i64, d: i64) -> LogValue {
    LogValue::Exact(BigRational::new(BigInt::from(n), BigInt::from(d)))
}

fn index16() -> BranchStructure {
    BranchStructure { subgroup: SubgroupSpec::Derived, index: IndexData::Explicit(BigUint::from(16u32)) }
}

/// `(L_{t+1} - L_t) / (m^t log|H|)` straight from the big-integer orders, for
/// `m = 4` and `|H| = 4`: the quotient of orders is a power of two.
fn hdim_from_raw_orders(table: &QuotientTable, t: usize) -> BigRational {
    let ratio = table.order(t + 1).unwrap() / table.order(t).unwrap();
    let bits = ratio.bits() - 1;
    assert_eq!(ratio, BigUint::from(1u32) << bits);
    BigRational::new(BigInt::from(bits), BigInt::from(2u64 * 4u64.pow(t as u32)))
}

#[test]
fn second_grigorchuk_via_gamma3() {
    let mut table = QuotientTable::new(second_grigorchuk());
    let bs = BranchStructure { subgroup: SubgroupSpec::LowerCentral(3), index: IndexData::Witness(3) };
    let r = hausdorff_dimension(&mut table, &bs).unwrap();
    assert_eq!(r.hdim, q(43, 128));
    assert_eq!(r.tier, Tier::Witness);
    assert_eq!(r.s_used, vec![q(2, 1), q(5, 2), q(1, 2)]);
    assert_eq!(r.hdim.exact().unwrap(), &hdim_from_raw_orders(&table, 3));
    // a deeper witness level adds s_4 = 0 and leaves the dimension unchanged
    assert!(table.s(4).unwrap().is_zero());
    let deeper = BranchStructure { subgroup: SubgroupSpec::LowerCentral(3), index: IndexData::Witness(4) };
    assert_eq!(hausdorff_dimension(&mut table, &deeper).unwrap().hdim, q(43, 128));
}

#[test]
fn index_route_matches_raw_orders() {
    for (name, expected) in [("ggs:4:1,0,0", q(3, 4)), ("ggs:4:1,1,0", q(9, 16))] {
        let mut table = QuotientTable::new(preset(name).unwrap());
        let r = hausdorff_dimension(&mut table, &index16()).unwrap();
        assert_eq!(r.hdim, expected);
        assert_eq!(r.omega, 4);
        assert_eq!(r.tier, Tier::Index);
        assert_eq!(r.hdim.exact().unwrap(), &hdim_from_raw_orders(&table, 4));
    }
}

#[test]
fn s_partial_sums() {
    assert_eq!(s_partial_sum(&vec![LogValue::zero(); 3], 4).unwrap(), BigRational::from_integer(0.into()));
    let s = [q(0, 1), q(4, 1), q(0, 1), q(0, 1)];
    assert_eq!(LogValue::Exact(s_partial_sum(&s, 4).unwrap()), q(1, 4));
    let s = [q(2, 1), q(5, 2), q(1, 2)];
    assert_eq!(LogValue::Exact(s_partial_sum(&s, 4).unwrap()), q(85, 128));
}

#[test]
fn discard_is_sound_on_true_branch_structures() {
    let mut table = QuotientTable::new(second_grigorchuk());
    let v = discard_by_s(&mut table, 3, 4).unwrap();
    assert_eq!(v.verdict, Verdict::ConsistentUpTo(4));
    assert!(!v.to_string().contains("proved"));
    let v = discard_by_s(&mut table, 2, 4).unwrap();
    assert!(v.is_refuted());
}

#[test]
fn containment_failure_persists_upwards() {
    let mut table = QuotientTable::new(preset("ggs:4:1,0,0").unwrap());
    let specs = [
        SubgroupSpec::Words { words: vec![], normality: Normality::Asserted },
        SubgroupSpec::Words { words: vec![TreeWord::generator(0)], normality: Normality::Asserted },
    ];
    for spec in &specs {
        let first = (2..=4)
            .find(|&n| verify_stabilizer_containment(&mut table, spec, 1, n).unwrap().is_refuted())
            .expect("refuted somewhere");
        for n in first..=4 {
            assert!(verify_stabilizer_containment(&mut table, spec, 1, n).unwrap().is_refuted());
        }
    }
}

/// Needs level 6 (4096 points, several minutes per group in release mode).
#[test]
#[ignore]
fn discard_is_sound_for_ggs_at_omega_level() {
    for name in ["ggs:4:1,0,0", "ggs:4:1,1,0"] {
        let mut table = QuotientTable::new(preset(name).unwrap());
        let v = discard_by_s(&mut table, 4, 5).unwrap();
        assert_eq!(v.verdict, Verdict::ConsistentUpTo(5));
    }
}

proptest! {
    #[test]
    fn omega_is_additive(a in 1u64..=1_000_000_000_000, b in 1u64..=1_000_000_000_000) {
        let (a, b) = (BigUint::from(a), BigUint::from(b));
        prop_assert_eq!(omega(&(&a * &b)).unwrap(), omega(&a).unwrap() + omega(&b).unwrap());
    }
}
