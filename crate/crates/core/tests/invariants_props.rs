use maninforge::arith::is_squarefree;
use maninforge::hecke::{GorensteinVerdict, Idempotent};
use maninforge::invariants::*;
use maninforge::linalg::{IntLattice, IntMatrix, RatMatrix};
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use proptest::prelude::*;

/// `P⁻¹·diag(1,…,1,0,…,0)·P` for a random nonsingular integer `P`.
fn random_idempotent() -> impl Strategy<Value = RatMatrix> {
    (2usize..=5)
        .prop_flat_map(|n| (Just(n), 1..n, proptest::collection::vec(-4i64..=4, n * n)))
        .prop_filter_map("singular", |(n, k, v)| {
            let p = RatMatrix::from_int(&IntMatrix::from_i64(n, n, &v));
            let inv = p.inverse()?;
            let mut d = IntMatrix::zeros(n, n);
            for i in 0..k {
                d.set(i, i, BigInt::from(1));
            }
            Some(inv.mul(&RatMatrix::from_int(&d)).mul(&p))
        })
}

fn squarefree_level() -> impl Strategy<Value = u64> {
    (11u64..=90).prop_filter("squarefree", |&n| is_squarefree(n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn literal_and_fast_congruence_modules_agree(e in random_idempotent()) {
        let (num, den) = e.to_common_denominator();
        let idem = Idempotent::new(num, den);
        let fast = congruence_module_fast(&idem, Carrier::Other, None).unwrap();
        let lit = congruence_module(&IntLattice::full(e.rows()), &e, Carrier::Other, None).unwrap();
        prop_assert_eq!(&fast.invariant_factors, &lit.invariant_factors);
        prop_assert!(fast.is_consistent());
        prop_assert!(lit.is_consistent());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn level_reports_satisfy_the_local_theorems(n in squarefree_level()) {
        let data = LevelData::build(n).unwrap();
        let report = deg_cong_report(&data, &ReportOptions { extra_primes: vec![2, 3], ..Default::default() }).unwrap();
        for c in &report.classes {
            // S-congruence module order is deg²; module bookkeeping is consistent
            prop_assert_eq!(&c.s_module.order, &(&c.deg * &c.deg));
            prop_assert!(c.s_module.is_consistent() && c.t_module.is_consistent());
            for pp in &c.primes {
                if pp.p != BigInt::from(2) {
                    prop_assert_eq!(pp.ord_deg, pp.ord_cong);
                }
                let p = pp.p.to_u64().unwrap();
                let sum: u64 = c.ideals_over(p).map(|m| m.ord_cong).sum();
                prop_assert_eq!(sum, pp.ord_cong);
            }
            for m in &c.ideals {
                prop_assert!(m.ord_cong <= m.ord_deg);
                if m.dvr || m.gorenstein == GorensteinVerdict::Gorenstein {
                    prop_assert_eq!(m.ord_deg, m.ord_cong);
                }
                prop_assert!(m.fiber_dim <= m.socle_dim + 1);
            }
            if c.dim == 1 {
                prop_assert!(deg_divides_cong(c));
            }
            prop_assert!(local_violations(n, c).is_empty());
        }
    }
}
