//! Row HNF of large integer matrices by arithmetic modulo a multiple of the
//! lattice determinant.
//!
//! The lattice is projected onto its rank-profile columns, where it has full
//! rank and contains `d·ℤ^r` for any nonzero maximal minor `d`. The HNF of the
//! projection is computed with entries reduced modulo `d`, then lifted back
//! through `A[R,P]⁻¹·A[R,:]`, obtained by CRT.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::det::{det, hadamard_bits};
use super::matrix::IntMatrix;
use super::modp::ModMatrix;
use crate::arith::{big_mod_u64, large_primes, mul_mod, sub_mod, xgcd, CrtVec};

/// Row indices and pivot columns of an echelon basis of the row space mod p.
pub fn rank_profile_mod(m: &IntMatrix, p: u64, reverse_rows: bool) -> (Vec<usize>, Vec<usize>) {
    let cols = m.cols();
    let mut basis: Vec<(usize, Vec<u64>)> = Vec::new();
    let mut rows = Vec::new();
    let order: Vec<usize> = if reverse_rows {
        (0..m.rows()).rev().collect()
    } else {
        (0..m.rows()).collect()
    };
    for i in order {
        let mut x: Vec<u64> = m.row(i).iter().map(|v| big_mod_u64(v, p)).collect();
        for (c, b) in &basis {
            let f = x[*c];
            if f == 0 {
                continue;
            }
            for j in *c..cols {
                if b[j] != 0 {
                    x[j] = sub_mod(x[j], mul_mod(f, b[j], p), p);
                }
            }
        }
        let Some(lead) = x.iter().position(|&v| v != 0) else {
            continue;
        };
        let inv = crate::arith::inv_mod(x[lead], p);
        for v in x.iter_mut() {
            *v = mul_mod(*v, inv, p);
        }
        let pos = basis.partition_point(|(c, _)| *c < lead);
        basis.insert(pos, (lead, x));
        rows.push(i);
        if basis.len() == cols {
            break;
        }
    }
    rows.sort_unstable();
    (rows, basis.into_iter().map(|(c, _)| c).collect())
}

/// HNF (upper triangular, g×g) of a full-rank lattice in ℤ^g generated by
/// `gens`, where `d` is a multiple of the lattice determinant. The working
/// modulus shrinks by each pivot found.
pub fn hnf_mod_det(gens: &[Vec<BigInt>], g: usize, d: &BigInt) -> Vec<Vec<BigInt>> {
    hnf_modular_core(gens, g, d, true)
}

/// HNF of the lattice spanned by `gens` together with `d·ℤ^g`.
pub fn hnf_mod_d(gens: &[Vec<BigInt>], g: usize, d: &BigInt) -> Vec<Vec<BigInt>> {
    hnf_modular_core(gens, g, d, false)
}

fn hnf_modular_core(gens: &[Vec<BigInt>], g: usize, d: &BigInt, shrink: bool) -> Vec<Vec<BigInt>> {
    let mut r = d.abs();
    let mut rows: Vec<Vec<BigInt>> = gens
        .iter()
        .map(|w| w.iter().map(|x| x.mod_floor(&r)).collect::<Vec<_>>())
        .filter(|w: &Vec<BigInt>| w.iter().any(|x| !x.is_zero()))
        .collect();
    let mut h: Vec<Vec<BigInt>> = Vec::with_capacity(g);
    for i in 0..g {
        let mut piv = vec![BigInt::zero(); g];
        for w in rows.iter_mut() {
            if w[i].is_zero() {
                continue;
            }
            if piv[i].is_zero() {
                std::mem::swap(&mut piv, w);
                continue;
            }
            let (gg, s, t) = xgcd(&piv[i], &w[i]);
            let a = &piv[i] / &gg;
            let b = &w[i] / &gg;
            for j in i..g {
                let np = (&s * &piv[j] + &t * &w[j]).mod_floor(&r);
                let nw = (&a * &w[j] - &b * &piv[j]).mod_floor(&r);
                piv[j] = np;
                w[j] = nw;
            }
        }
        let (gg, s, _) = xgcd(&piv[i], &r);
        let mut out = vec![BigInt::zero(); g];
        for j in i + 1..g {
            out[j] = (&s * &piv[j]).mod_floor(&r);
        }
        out[i] = gg.clone();
        if !shrink && !piv[i].is_zero() {
            // the partner of the pivot against r·e_i stays in the lattice
            let b = &r / &gg;
            let rest: Vec<BigInt> = (0..g)
                .map(|j| if j > i { (-(&b * &piv[j])).mod_floor(&r) } else { BigInt::zero() })
                .collect();
            if rest.iter().any(|x| !x.is_zero()) {
                rows.push(rest);
            }
        }
        h.push(out);
        if shrink {
            r = &r / &gg;
        }
        rows.retain_mut(|w| {
            let mut nz = false;
            for x in w.iter_mut().skip(i + 1) {
                *x = x.mod_floor(&r);
                nz |= !x.is_zero();
            }
            nz
        });
    }
    for i in 0..g {
        let (top, rest) = h.split_at_mut(i);
        let hi = &rest[0];
        for row in top.iter_mut() {
            if row[i].is_zero() {
                continue;
            }
            let q = row[i].div_floor(&hi[i]);
            if q.is_zero() {
                continue;
            }
            for j in i..g {
                if !hi[j].is_zero() {
                    row[j] -= &q * &hi[j];
                }
            }
        }
    }
    h
}

/// Row HNF basis (nonzero rows only) via the modular route.
pub fn hnf_basis_modular(m: &IntMatrix) -> IntMatrix {
    let mut primes = large_primes();
    let p = primes.next().unwrap();
    let (rsel, pcols) = rank_profile_mod(m, p, false);
    let g = pcols.len();
    if g == 0 {
        return IntMatrix::zeros(0, m.cols());
    }
    let ap = m.select_cols(&pcols);
    let minor = ap.select_rows(&rsel);
    let det1 = det(&minor);
    assert!(!det1.is_zero(), "rank profile minor vanished over ℤ");
    let (rsel2, pcols2) = rank_profile_mod(m, p, true);
    let mut d = det1.abs();
    if pcols2 == pcols {
        let det2 = det(&ap.select_rows(&rsel2));
        if !det2.is_zero() {
            d = d.gcd(&det2);
        }
    }
    let gens: Vec<Vec<BigInt>> = (0..ap.rows()).map(|i| ap.row_vec(i)).collect();
    let hp = hnf_mod_det(&gens, g, &d);

    // Z = det1 · A[R,P]⁻¹ · A[R,Q] on the non-pivot columns Q
    let qcols: Vec<usize> = (0..m.cols()).filter(|c| pcols.binary_search(c).is_err()).collect();
    let mut full = IntMatrix::zeros(g, m.cols());
    for (i, row) in hp.iter().enumerate() {
        for (k, &c) in pcols.iter().enumerate() {
            full.set(i, c, row[k].clone());
        }
    }
    if qcols.is_empty() {
        return full;
    }
    let aq = m.select_rows(&rsel).select_cols(&qcols);
    let bound = hadamard_bits(&m.select_rows(&rsel)) + 2;
    let nq = qcols.len();
    let mut crt = CrtVec::new(g * nq);
    for p in primes {
        let dp = big_mod_u64(&det1, p);
        if dp == 0 {
            continue;
        }
        let mut aug = ModMatrix::zeros(g, g + nq, p);
        for i in 0..g {
            for j in 0..g {
                aug.set(i, j, big_mod_u64(minor.get(i, j), p));
            }
            for j in 0..nq {
                aug.set(i, g + j, big_mod_u64(aq.get(i, j), p));
            }
        }
        aug.rref();
        let mut res = Vec::with_capacity(g * nq);
        for i in 0..g {
            for j in 0..nq {
                res.push(mul_mod(aug.get(i, g + j), dp, p));
            }
        }
        crt.push(&res, p);
        if crt.modulus_bits() > bound {
            break;
        }
    }
    let z = crt.symmetric();
    for i in 0..g {
        for j in 0..nq {
            let mut acc = BigInt::zero();
            for k in i..g {
                let h = &hp[i][k];
                if !h.is_zero() {
                    acc += h * &z[k * nq + j];
                }
            }
            let (q, rem) = acc.div_rem(&det1);
            assert!(rem.is_zero(), "HNF lift is not integral");
            full.set(i, qcols[j], q);
        }
    }
    full
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::hnf::hnf_basis_naive;
    use rand::{Rng, SeedableRng};

    #[test]
    fn agrees_with_naive() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for (rows, cols, rank) in [(6, 5, 3), (12, 9, 9), (20, 15, 7), (30, 30, 30), (40, 25, 12)] {
            let a = IntMatrix::from_vec(
                rows,
                rank,
                (0..rows * rank).map(|_| BigInt::from(rng.gen_range(-9i64..=9))).collect(),
            );
            let b = IntMatrix::from_vec(
                rank,
                cols,
                (0..rank * cols).map(|_| BigInt::from(rng.gen_range(-9i64..=9))).collect(),
            );
            let m = a.mul(&b);
            assert_eq!(hnf_basis_modular(&m), hnf_basis_naive(&m), "{rows}x{cols} rank {rank}");
        }
    }

    #[test]
    fn lattice_plus_multiple_of_identity() {
        let two = BigInt::from(2);
        let four = BigInt::from(4);
        // span{(2, 1)} + 4ℤ² has basis (2, 1), (0, 2)
        let h = hnf_mod_d(&[vec![two.clone(), BigInt::from(1)]], 2, &four);
        assert_eq!(h, vec![vec![two.clone(), BigInt::from(1)], vec![BigInt::zero(), two.clone()]]);
        // no generators: just 2ℤ²
        let h = hnf_mod_d(&[], 2, &two);
        assert_eq!(h[0][0], two);
        assert_eq!(h[1][1], two);
    }

    #[test]
    fn zero_and_identity() {
        assert_eq!(hnf_basis_modular(&IntMatrix::zeros(3, 4)).rows(), 0);
        assert_eq!(hnf_basis_modular(&IntMatrix::identity(4)), IntMatrix::identity(4));
    }
}
