use maninforge::arith::{divisors, is_prime_u64, is_squarefree};
use maninforge::linalg::IntMatrix;
use maninforge::modsym::*;
use maninforge::poly::{charpoly_int, factor_q};
use proptest::prelude::*;

#[test]
fn cuspidal_rank_is_twice_genus_up_to_200() {
    for n in 1..=200u64 {
        assert_eq!(build_space(n).cuspidal_rank() as u64, 2 * genus(n), "n = {n}");
    }
}

#[test]
fn multiplicity_formula_squarefree_up_to_100() {
    let mut new_rank = std::collections::HashMap::new();
    for n in (1..=100u64).filter(|&n| is_squarefree(n)) {
        let s = build_space(n);
        let r = new_lattice(&s).unwrap().rank();
        new_rank.insert(n, r);
        let total: usize = divisors(n)
            .into_iter()
            .map(|d| divisors(n / d).len() * new_rank[&d])
            .sum();
        assert_eq!(s.cuspidal_rank(), total, "n = {n}");
    }
}

fn hecke_primes() -> Vec<u64> {
    vec![2, 3, 5, 7, 11, 13]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn hecke_operators_commute(n in 2u64..=100, i in 0usize..6, j in 0usize..6) {
        let s = build_space(n);
        let (a, b) = (hecke_primes()[i], hecke_primes()[j]);
        let ta: IntMatrix = hecke(&s, a).unwrap().matrix;
        let tb: IntMatrix = hecke(&s, b).unwrap().matrix;
        prop_assert_eq!(ta.mul(&tb), tb.mul(&ta));
    }

    #[test]
    fn hecke_preserves_cuspidal_lattice(n in 2u64..=100, i in 0usize..6) {
        // restriction fails with an error if S is not mapped into itself
        let s = build_space(n);
        prop_assert!(hecke(&s, hecke_primes()[i]).is_ok());
    }

    #[test]
    fn charpoly_is_a_square_at_prime_level(n in prop::sample::select((2u64..=100).filter(|&n| is_prime_u64(n)).collect::<Vec<_>>()), i in 0usize..6) {
        let l = hecke_primes()[i];
        prop_assume!(n != l);
        let s = build_space(n);
        let f = factor_q(&charpoly_int(&hecke(&s, l).unwrap().matrix).unwrap()).unwrap();
        for (_, m) in &f.factors {
            prop_assert_eq!(m % 2, 0);
        }
    }

    #[test]
    fn star_commutes_and_splits_evenly(n in 2u64..=80) {
        let s = build_space(n);
        let st = star_involution(&s).unwrap().matrix;
        prop_assert!(st.mul(&st).is_identity());
        let l = if n % 2 == 0 { 3 } else { 2 };
        let t = hecke(&s, l).unwrap().matrix;
        prop_assert_eq!(st.mul(&t), t.mul(&st));
        let r = s.cuspidal_rank();
        let plus = maninforge::linalg::rank(&st.sub(&IntMatrix::identity(r)));
        prop_assert_eq!(plus as u64, genus(n));
    }
}
