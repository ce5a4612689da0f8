//! Row-style Hermite normal form.
//!
//! Canonical form: pivots positive, entries above each pivot reduced into
//! `[0, pivot)`, zero rows last. Two matrices with the same row lattice have
//! bit-identical HNF.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::matrix::IntMatrix;
use crate::arith::round_div;

type Rows = Vec<Vec<BigInt>>;

/// `target -= q * src`, skipping zeros.
#[inline]
pub(crate) fn row_sub_mul(target: &mut [BigInt], src: &[BigInt], q: &BigInt) {
    if q.is_zero() {
        return;
    }
    for (t, s) in target.iter_mut().zip(src) {
        if !s.is_zero() {
            *t -= q * s;
        }
    }
}

fn split_two(rows: &mut Rows, a: usize, b: usize) -> (&mut Vec<BigInt>, &mut Vec<BigInt>) {
    assert_ne!(a, b);
    if a < b {
        let (lo, hi) = rows.split_at_mut(b);
        (&mut lo[a], &mut hi[0])
    } else {
        let (lo, hi) = rows.split_at_mut(a);
        (&mut hi[0], &mut lo[b])
    }
}

struct Elimination {
    a: Rows,
    u: Option<Rows>,
}

impl Elimination {
    fn swap(&mut self, i: usize, k: usize) {
        self.a.swap(i, k);
        if let Some(u) = self.u.as_mut() {
            u.swap(i, k);
        }
    }

    fn sub_mul(&mut self, target: usize, src: usize, q: &BigInt) {
        let (t, s) = split_two(&mut self.a, target, src);
        row_sub_mul(t, s, q);
        if let Some(u) = self.u.as_mut() {
            let (t, s) = split_two(u, target, src);
            row_sub_mul(t, s, q);
        }
    }

    fn negate(&mut self, i: usize) {
        for x in self.a[i].iter_mut() {
            *x = -&*x;
        }
        if let Some(u) = self.u.as_mut() {
            for x in u[i].iter_mut() {
                *x = -&*x;
            }
        }
    }

    fn run(&mut self, cols: usize) -> usize {
        let m = self.a.len();
        let mut r = 0;
        for j in 0..cols {
            if r == m {
                break;
            }
            loop {
                // smallest nonzero magnitude at or below row r
                let mut best: Option<usize> = None;
                for i in r..m {
                    let v = &self.a[i][j];
                    if v.is_zero() {
                        continue;
                    }
                    match best {
                        None => best = Some(i),
                        Some(b) => {
                            if v.magnitude() < self.a[b][j].magnitude() {
                                best = Some(i)
                            }
                        }
                    }
                }
                let Some(b) = best else { break };
                self.swap(r, b);
                let mut cleared = true;
                for k in r + 1..m {
                    if self.a[k][j].is_zero() {
                        continue;
                    }
                    let q = round_div(&self.a[k][j], &self.a[r][j]);
                    self.sub_mul(k, r, &q);
                    if !self.a[k][j].is_zero() {
                        cleared = false;
                    }
                }
                if cleared {
                    break;
                }
            }
            if r < m && !self.a[r][j].is_zero() {
                if self.a[r][j].is_negative() {
                    self.negate(r);
                }
                for k in 0..r {
                    if self.a[k][j].is_zero() {
                        continue;
                    }
                    let q = self.a[k][j].div_floor(&self.a[r][j]);
                    self.sub_mul(k, r, &q);
                }
                r += 1;
            }
        }
        r
    }
}

fn to_rows(m: &IntMatrix) -> Rows {
    m.clone().into_rows()
}

fn from_rows(rows: Rows, cols: usize) -> IntMatrix {
    IntMatrix::from_rows(rows, cols)
}

/// Row HNF with unimodular transform: returns `(H, U)` with `U·M = H`.
pub fn hnf(m: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let rows = m.rows();
    let mut e = Elimination {
        a: to_rows(m),
        u: Some(to_rows(&IntMatrix::identity(rows))),
    };
    e.run(m.cols());
    let u = e.u.take().expect("transform tracked");
    (from_rows(e.a, m.cols()), from_rows(u, rows))
}

/// Size above which [`hnf_basis`] switches to the determinant-modular route.
const MODULAR_THRESHOLD: usize = 64;

/// Row HNF without transform; returns only the nonzero rows (a basis of the
/// row lattice in canonical form).
pub fn hnf_basis(m: &IntMatrix) -> IntMatrix {
    if m.rows() >= MODULAR_THRESHOLD && m.cols() >= MODULAR_THRESHOLD {
        return super::hnf_modular::hnf_basis_modular(m);
    }
    hnf_basis_naive(m)
}

/// Row HNF basis by direct elimination.
pub fn hnf_basis_naive(m: &IntMatrix) -> IntMatrix {
    let mut e = Elimination {
        a: to_rows(m),
        u: None,
    };
    let r = e.run(m.cols());
    e.a.truncate(r);
    from_rows(e.a, m.cols())
}

/// Pivot column of each nonzero row of a matrix already in row echelon form.
pub fn pivot_columns(h: &IntMatrix) -> Vec<usize> {
    let mut piv = Vec::new();
    for i in 0..h.rows() {
        if let Some(j) = h.row(i).iter().position(|x| !x.is_zero()) {
            piv.push(j);
        }
    }
    piv
}

/// Whether `h` is in canonical row HNF (zero rows allowed only at the end).
pub fn is_hnf(h: &IntMatrix) -> bool {
    let mut last_pivot: Option<usize> = None;
    let mut seen_zero = false;
    let mut pivots = Vec::new();
    for i in 0..h.rows() {
        match h.row(i).iter().position(|x| !x.is_zero()) {
            None => seen_zero = true,
            Some(j) => {
                if seen_zero {
                    return false;
                }
                if let Some(lp) = last_pivot {
                    if j <= lp {
                        return false;
                    }
                }
                if !h.get(i, j).is_positive() {
                    return false;
                }
                last_pivot = Some(j);
                pivots.push((i, j));
            }
        }
    }
    for &(i, j) in &pivots {
        let p = h.get(i, j);
        for k in 0..i {
            let v = h.get(k, j);
            if v.is_negative() || v >= p {
                return false;
            }
        }
    }
    true
}
