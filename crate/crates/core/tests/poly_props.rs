use maninforge::linalg::IntMatrix;
use maninforge::poly::*;
use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;

fn poly(max_deg: usize, c: i64) -> impl Strategy<Value = IntPoly> {
    (1..=max_deg).prop_flat_map(move |d| {
        (proptest::collection::vec(-c..=c, d), 1..=c).prop_map(|(mut v, lead)| {
            v.push(lead);
            IntPoly::from_i64(&v)
        })
    })
}

/// det(x·I − M) by cofactor expansion over ℤ[x].
fn charpoly_oracle(m: &IntMatrix) -> IntPoly {
    let n = m.rows();
    let entries: Vec<Vec<IntPoly>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let a = IntPoly::constant(-m.get(i, j).clone());
                    if i == j {
                        a.add(&IntPoly::x())
                    } else {
                        a
                    }
                })
                .collect()
        })
        .collect();
    det_poly(&entries)
}

fn det_poly(a: &[Vec<IntPoly>]) -> IntPoly {
    let n = a.len();
    if n == 1 {
        return a[0][0].clone();
    }
    let mut acc = IntPoly::zero();
    for j in 0..n {
        let minor: Vec<Vec<IntPoly>> = a[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, x)| x.clone()).collect())
            .collect();
        let term = a[0][j].mul(&det_poly(&minor));
        acc = if j % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
    }
    acc
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn factor_q_round_trip(parts in proptest::collection::vec(poly(4, 10), 1..4), c in -6i64..=6) {
        prop_assume!(c != 0);
        let mut f = IntPoly::constant(BigInt::from(c));
        for g in &parts {
            f = f.mul(g);
        }
        let fz = factor_q(&f).unwrap();
        prop_assert_eq!(fz.expand(), f);
        for (g, _) in &fz.factors {
            prop_assert!(g.deg() >= 1);
            prop_assert_eq!(factor_q(g).unwrap().factors.len(), 1);
        }
        // every input factor splits into reported irreducibles
        let total: usize = fz.factors.iter().map(|(g, m)| g.deg() * *m as usize).sum();
        prop_assert_eq!(total, parts.iter().map(|g| g.deg()).sum::<usize>());
    }

    #[test]
    fn factor_fp_round_trip(coeffs in proptest::collection::vec(0u64..13, 2..12), p in prop::sample::select(vec![2u64, 3, 5, 7, 13])) {
        let f = FpPoly::new(p, coeffs);
        prop_assume!(!f.is_zero());
        let fs = factor_fp(&f).unwrap();
        let mut acc = FpPoly::one(p);
        for (g, m) in &fs {
            for _ in 0..*m {
                acc = acc.mul(g);
            }
        }
        prop_assert_eq!(acc.scale(f.lc()), f);
    }

    #[test]
    fn charpoly_matches_cofactor(v in proptest::collection::vec(-30i64..=30, 16)) {
        let m = IntMatrix::from_i64(4, 4, &v);
        prop_assert_eq!(charpoly_int(&m).unwrap(), charpoly_oracle(&m));
    }

    #[test]
    fn crt_split_is_idempotent(a in poly(3, 6), b in poly(3, 6)) {
        prop_assume!(gcd_int(&a, &b).deg() == 0);
        let (h, den) = crt_split(&a, &b).unwrap();
        let g = a.mul(&b);
        prop_assert!(h.deg() < g.deg() || h.is_zero());
        // h² − h ≡ 0 mod g, scaled by den²: h_num² − den·h_num
        let lhs = h.mul(&h).sub(&h.scale(&den));
        prop_assert!(lhs.pseudo_rem(&g).is_zero());
        prop_assert!(!den.is_zero());
    }
}
