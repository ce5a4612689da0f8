//! Smith normal form invariant factors.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::hnf::{hnf_basis, row_sub_mul};
use super::matrix::IntMatrix;
use crate::arith::round_div;

/// Invariant factors `d₁ | d₂ | … | d_r` (positive), `r = rank(M)`.
///
/// Pivoting always takes the smallest nonzero magnitude in the active block,
/// scanning row-major, so the sequence of operations is reproducible.
pub fn snf(m: &IntMatrix) -> Vec<BigInt> {
    // rank-deficient and tall inputs shrink first; the row lattice carries
    // all the information about the invariant factors
    let reduced = if m.rows() > m.cols() {
        hnf_basis(m)
    } else {
        m.clone()
    };
    let mut a = reduced.into_rows();
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        let Some((pi, pj)) = smallest_entry(&a, t) else {
            break;
        };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let mut dirty = false;
            // clear column t below the pivot
            for k in t + 1..rows {
                if a[k][t].is_zero() {
                    continue;
                }
                let q = round_div(&a[k][t], &a[t][t]);
                let (lo, hi) = a.split_at_mut(k);
                row_sub_mul(&mut hi[0], &lo[t], &q);
                if !a[k][t].is_zero() {
                    dirty = true;
                }
            }
            // clear row t right of the pivot
            for j in t + 1..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = round_div(&a[t][j], &a[t][t]);
                for row in a.iter_mut().skip(t) {
                    if !row[t].is_zero() {
                        let delta = &q * &row[t];
                        row[j] -= delta;
                    }
                }
                if !a[t][j].is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                // a smaller remainder appeared; move it into pivot position
                if let Some((pi, pj)) = smallest_in_cross(&a, t) {
                    a.swap(t, pi);
                    for row in a.iter_mut() {
                        row.swap(t, pj);
                    }
                }
                continue;
            }
            // divisibility of the remaining block by the pivot
            let p = a[t][t].clone();
            let offender = (t + 1..rows).find(|&k| (t + 1..cols).any(|j| !a[k][j].is_multiple_of(&p)));
            match offender {
                Some(k) => {
                    let src = a[k].clone();
                    for (x, s) in a[t].iter_mut().zip(&src) {
                        *x += s;
                    }
                }
                None => break,
            }
        }
        diag.push(a[t][t].abs());
        t += 1;
    }
    normalize_chain(diag)
}

fn smallest_entry(a: &[Vec<BigInt>], t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for (i, row) in a.iter().enumerate().skip(t) {
        for (j, v) in row.iter().enumerate().skip(t) {
            if v.is_zero() {
                continue;
            }
            match best {
                None => best = Some((i, j)),
                Some((bi, bj)) => {
                    if v.magnitude() < a[bi][bj].magnitude() {
                        best = Some((i, j));
                    }
                }
            }
        }
    }
    best
}

fn smallest_in_cross(a: &[Vec<BigInt>], t: usize) -> Option<(usize, usize)> {
    let mut best = (t, t);
    for (i, row) in a.iter().enumerate().skip(t) {
        let v = &row[t];
        if !v.is_zero() && v.magnitude() < a[best.0][best.1].magnitude() {
            best = (i, t);
        }
    }
    for (j, v) in a[t].iter().enumerate().skip(t) {
        if !v.is_zero() && v.magnitude() < a[best.0][best.1].magnitude() {
            best = (t, j);
        }
    }
    if a[best.0][best.1].is_zero() {
        None
    } else {
        Some(best)
    }
}

/// Turn any diagonal into the divisibility chain with the same product
/// structure (pairwise gcd/lcm exchange).
fn normalize_chain(mut d: Vec<BigInt>) -> Vec<BigInt> {
    let n = d.len();
    for i in 0..n {
        for j in i + 1..n {
            let g = d[i].gcd(&d[j]);
            if g != d[i] {
                let l = d[i].lcm(&d[j]);
                d[i] = g;
                d[j] = l;
            }
        }
    }
    d
}

fn valuation_capped(x: &BigInt, p: &BigInt, cap: u32) -> u32 {
    if x.is_zero() {
        return cap;
    }
    let mut v = 0;
    let mut y = x.clone();
    while v < cap {
        let (q, r) = y.div_rem(p);
        if !r.is_zero() {
            break;
        }
        y = q;
        v += 1;
    }
    v
}

/// Valuations `v_1 ≤ … ≤ v_k` (capped at `a`, `k = min(rows, cols)`) of the
/// elementary divisors of `m` over `ℤ/p^a`.
pub fn local_valuations(m: &IntMatrix, p: u64, a: u32) -> Vec<u32> {
    let k = m.rows().min(m.cols());
    if a == 0 {
        return vec![0; k];
    }
    let pb = BigInt::from(p);
    let q = num_traits::pow(pb.clone(), a as usize);
    let cols = m.cols();
    let mut rows: Vec<Vec<BigInt>> = (0..m.rows())
        .map(|i| m.row(i).iter().map(|x| x.mod_floor(&q)).collect())
        .collect();
    let mut col_order: Vec<usize> = (0..cols).collect();
    let mut out = Vec::with_capacity(k);
    for step in 0..k {
        // entry of least valuation in the active block
        let mut best: Option<(u32, usize, usize)> = None;
        'scan: for (i, row) in rows.iter().enumerate().skip(step) {
            for (jj, &j) in col_order.iter().enumerate().skip(step) {
                if row[j].is_zero() {
                    continue;
                }
                let v = valuation_capped(&row[j], &pb, a);
                if best.is_none_or(|(bv, _, _)| v < bv) {
                    best = Some((v, i, jj));
                    if v == 0 {
                        break 'scan;
                    }
                }
            }
        }
        let Some((v, bi, bj)) = best else {
            out.extend(std::iter::repeat_n(a, k - step));
            break;
        };
        rows.swap(step, bi);
        col_order.swap(step, bj);
        let c = col_order[step];
        let pv = num_traits::pow(pb.clone(), v as usize);
        let unit = &rows[step][c] / &pv;
        let inv = unit.modinv(&q).expect("unit modulo p^a");
        let pivot: Vec<BigInt> = rows[step].iter().map(|x| (x * &inv).mod_floor(&q)).collect();
        for row in rows.iter_mut().skip(step + 1) {
            if row[c].is_zero() {
                continue;
            }
            let f = &row[c] / &pv;
            for (x, y) in row.iter_mut().zip(&pivot) {
                if !y.is_zero() {
                    *x = (&*x - &f * y).mod_floor(&q);
                }
            }
        }
        rows[step] = pivot;
        out.push(v);
    }
    out
}

/// `log_p` of the order of the row span of `m` inside `(ℤ/p^a)^cols`.
pub fn rowspan_order_exponent(m: &IntMatrix, p: u64, a: u32) -> u64 {
    local_valuations(m, p, a).iter().map(|&v| (a - v) as u64).sum()
}

/// Product of the invariant factors.
pub fn snf_product(factors: &[BigInt]) -> BigInt {
    factors.iter().fold(BigInt::one(), |acc, x| acc * x)
}
