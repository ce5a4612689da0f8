use maninforge::linalg::det::{det_bareiss, det_multimodular};
use maninforge::linalg::*;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

fn matrix(rows: usize, cols: usize, lo: i64, hi: i64) -> impl Strategy<Value = IntMatrix> {
    proptest::collection::vec(lo..=hi, rows * cols)
        .prop_map(move |v| IntMatrix::from_i64(rows, cols, &v))
}

/// Random unimodular matrix and its inverse, built from elementary row moves.
fn unimodular(n: usize) -> impl Strategy<Value = (IntMatrix, IntMatrix)> {
    proptest::collection::vec((0..n, 0..n, -3i64..=3), 0..12).prop_map(move |ops| {
        let mut p = IntMatrix::identity(n);
        let mut inv = IntMatrix::identity(n);
        for (i, j, c) in ops {
            if i == j {
                continue;
            }
            // E = I + c·e_ij ; E⁻¹ = I − c·e_ij
            let mut e = IntMatrix::identity(n);
            e.set(i, j, BigInt::from(c));
            let mut einv = IntMatrix::identity(n);
            einv.set(i, j, BigInt::from(-c));
            p = e.mul(&p);
            inv = inv.mul(&einv);
        }
        (p, inv)
    })
}

fn rat(m: &IntMatrix) -> RatMatrix {
    RatMatrix::from_int(m)
}

fn diag_rat(d: &[BigRational]) -> RatMatrix {
    let n = d.len();
    let mut m = RatMatrix::zeros(n, n);
    for (i, x) in d.iter().enumerate() {
        m.set(i, i, x.clone());
    }
    m
}

/// A rational idempotent X·D·X⁻¹ with X = P₁·diag(s)·P₂.
fn idempotent(n: usize) -> impl Strategy<Value = RatMatrix> {
    (
        unimodular(n),
        unimodular(n),
        proptest::collection::vec(1i64..=6, n),
        proptest::collection::vec(any::<bool>(), n),
    )
        .prop_map(move |((p1, p1i), (p2, p2i), s, d)| {
            let s_big: Vec<BigRational> = s.iter().map(|&x| BigRational::from_integer(x.into())).collect();
            let s_inv: Vec<BigRational> = s_big.iter().map(|x| x.recip()).collect();
            let dd: Vec<BigRational> = d
                .iter()
                .map(|&b| if b { BigRational::one() } else { BigRational::zero() })
                .collect();
            let x = rat(&p1).mul(&diag_rat(&s_big)).mul(&rat(&p2));
            let xi = rat(&p2i).mul(&diag_rat(&s_inv)).mul(&rat(&p1i));
            x.mul(&diag_rat(&dd)).mul(&xi)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn snf_product_is_abs_det(m in matrix(5, 5, -20, 20)) {
        let d = det_bareiss(&m);
        prop_assert_eq!(&d, &det_multimodular(&m));
        let f = snf(&m);
        if d.is_zero() {
            prop_assert!(f.len() < 5);
        } else {
            prop_assert_eq!(f.len(), 5);
            prop_assert_eq!(snf::snf_product(&f), d.abs());
        }
        for w in f.windows(2) {
            prop_assert!((&w[1] % &w[0]).is_zero());
        }
    }

    #[test]
    fn hnf_is_idempotent_and_canonical(m in matrix(4, 6, -9, 9), (u, _) in unimodular(4)) {
        let (h, t) = hnf(&m);
        prop_assert!(is_hnf(&h));
        prop_assert_eq!(t.mul(&m), h.clone());
        prop_assert_eq!(det(&t).abs(), BigInt::one());
        let (h2, t2) = hnf(&h);
        prop_assert_eq!(&h2, &h);
        prop_assert!(t2.is_identity());
        // same row lattice, same canonical form
        let (h3, _) = hnf(&u.mul(&m));
        prop_assert_eq!(h3, h);
    }

    #[test]
    fn idempotent_splits_lattice(e in idempotent(4), gens in matrix(4, 4, -5, 5)) {
        prop_assume!(det(&gens) != BigInt::zero());
        let l = IntLattice::from_generators(&gens);
        let one_minus = RatMatrix::identity(4).sub(&e);
        let a = idempotent_kernel_sublattice(&l, &e).unwrap();
        let b = idempotent_kernel_sublattice(&l, &one_minus).unwrap();
        let s = lattice_sum(&a, &b).unwrap();
        prop_assert!(sublattice_index(&s, &l).is_ok());
        prop_assert!(lattice_intersect(&a, &b).unwrap().is_zero());
    }

    #[test]
    fn index_equals_quotient_order(gens in matrix(3, 3, -8, 8), c in matrix(3, 3, -4, 4)) {
        prop_assume!(det(&gens) != BigInt::zero() && det(&c) != BigInt::zero());
        let l = IntLattice::from_generators(&gens);
        let sub = IntLattice::from_generators(&c.mul(l.basis()));
        let idx = sublattice_index(&sub, &l).unwrap();
        let q = quotient_invariants(&l, &sub).unwrap();
        prop_assert_eq!(q.order().unwrap(), idx);
    }

    #[test]
    fn kernel_is_saturated(m in matrix(2, 5, -6, 6)) {
        let k = kernel_saturated(&m);
        for i in 0..k.rank() {
            let v = k.basis().row(i);
            for r in 0..m.rows() {
                let s: BigInt = m.row(r).iter().zip(v).map(|(a, b)| a * b).sum();
                prop_assert!(s.is_zero());
            }
        }
        prop_assert!(k.is_saturated());
        prop_assert_eq!(k.rank() + rank(&m), 5);
    }

    #[test]
    fn local_snf_matches_global(m in matrix(4, 5, -30, 30), p in prop::sample::select(vec![2u64, 3, 5]), a in 1u32..5) {
        let global = snf(&m);
        let mut expect: Vec<u32> = global
            .iter()
            .map(|d| maninforge::arith::ord_p(d, p).min(a))
            .collect();
        expect.resize(4, a);
        expect.sort_unstable();
        prop_assert_eq!(local_valuations(&m, p, a), expect);
    }

    #[test]
    fn hnf_plus_scalar_lattice(m in matrix(3, 4, -9, 9), d in 1i64..30) {
        use maninforge::linalg::hnf_modular::hnf_mod_d;
        let db = BigInt::from(d);
        let gens: Vec<Vec<BigInt>> = (0..3).map(|i| m.row_vec(i)).collect();
        let fast = IntMatrix::from_rows(hnf_mod_d(&gens, 4, &db), 4);
        let slow = hnf_basis(&m.vstack(&IntMatrix::identity(4).scale(&db)));
        prop_assert_eq!(fast, slow);
    }

    #[test]
    fn text_round_trip(m in matrix(3, 4, -1000, 1000)) {
        let back: IntMatrix = IntMatrix::from_text(&m.to_text()).unwrap();
        prop_assert_eq!(back, m);
    }
}

#[test]
fn multimodular_det_matches_on_large_input() {
    // 70×70 triangular-plus-noise with a known determinant
    let n = 70;
    let mut m = IntMatrix::zeros(n, n);
    let mut expect = BigInt::one();
    for i in 0..n {
        let d = BigInt::from((i % 7) as i64 + 2);
        expect *= &d;
        m.set(i, i, d);
        for j in i + 1..n {
            m.set(i, j, BigInt::from(((i * 31 + j * 17) % 23) as i64 - 11));
        }
    }
    let (u, _) = {
        let mut p = IntMatrix::identity(n);
        for i in 1..n {
            let mut e = IntMatrix::identity(n);
            e.set(i, i - 1, BigInt::from(((i * 13) % 5) as i64 - 2));
            p = e.mul(&p);
        }
        (p, ())
    };
    let a = u.mul(&m);
    assert_eq!(det(&a), expect);
    assert_eq!(det_bareiss(&a), expect);
}
