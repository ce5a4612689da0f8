//! Dense linear algebra over 𝔽_p with word-size primes.

use crate::arith::{add_mod, big_mod_u64, inv_mod, mul_mod, sub_mod};

use super::matrix::IntMatrix;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModMatrix {
    pub p: u64,
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<u64>,
}

impl ModMatrix {
    pub fn zeros(rows: usize, cols: usize, p: u64) -> Self {
        ModMatrix {
            p,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize, p: u64) -> Self {
        let mut m = Self::zeros(n, n, p);
        for i in 0..n {
            m.data[i * n + i] = 1 % p;
        }
        m
    }

    pub fn from_int(m: &IntMatrix, p: u64) -> Self {
        ModMatrix {
            p,
            rows: m.rows(),
            cols: m.cols(),
            data: m.entries().iter().map(|x| big_mod_u64(x, p)).collect(),
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul(&self, other: &ModMatrix) -> ModMatrix {
        assert_eq!(self.cols, other.rows);
        assert_eq!(self.p, other.p);
        let p = self.p;
        let mut out = ModMatrix::zeros(self.rows, other.cols, p);
        // accumulate in u128 and reduce once per entry; safe for up to 2^64
        // products of 62-bit residues
        let mut acc = vec![0u128; other.cols];
        for i in 0..self.rows {
            acc.iter_mut().for_each(|x| *x = 0);
            let mut pending = 0u32;
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == 0 {
                    continue;
                }
                let brow = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, &b) in acc.iter_mut().zip(brow) {
                    *o += a as u128 * b as u128;
                }
                pending += 1;
                if pending == 15 {
                    for o in acc.iter_mut() {
                        *o %= p as u128;
                    }
                    pending = 0;
                }
            }
            for (j, o) in acc.iter().enumerate() {
                out.data[i * other.cols + j] = (o % p as u128) as u64;
            }
        }
        out
    }

    pub fn vec_mul(&self, v: &[u64]) -> Vec<u64> {
        assert_eq!(v.len(), self.rows);
        let p = self.p;
        let mut out = vec![0u64; self.cols];
        for (k, &a) in v.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (o, &b) in out.iter_mut().zip(self.row(k)) {
                *o = add_mod(*o, mul_mod(a, b, p), p);
            }
        }
        out
    }

    pub fn from_rows(rows: &[Vec<u64>], cols: usize, p: u64) -> Self {
        let mut m = ModMatrix::zeros(rows.len(), cols, p);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols);
            m.data[i * cols..(i + 1) * cols].copy_from_slice(r);
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn add(&self, other: &ModMatrix) -> ModMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let p = self.p;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| add_mod(a, b, p)).collect();
        ModMatrix { data, ..*self }
    }

    pub fn sub(&self, other: &ModMatrix) -> ModMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let p = self.p;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| sub_mod(a, b, p)).collect();
        ModMatrix { data, ..*self }
    }

    /// `self += c·other`.
    pub fn add_scaled(&mut self, c: u64, other: &ModMatrix) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        if c == 0 {
            return;
        }
        let p = self.p;
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            if b != 0 {
                *a = add_mod(*a, mul_mod(c, b, p), p);
            }
        }
    }

    pub fn scale(&self, c: u64) -> ModMatrix {
        let p = self.p;
        let data = self.data.iter().map(|&a| mul_mod(a, c, p)).collect();
        ModMatrix { data, ..*self }
    }

    pub fn pow(&self, mut e: u64) -> ModMatrix {
        let mut base = self.clone();
        let mut acc = ModMatrix::identity(self.rows, self.p);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn vstack(&self, other: &ModMatrix) -> ModMatrix {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        ModMatrix {
            p: self.p,
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn hstack(&self, other: &ModMatrix) -> ModMatrix {
        assert_eq!(self.rows, other.rows);
        let cols = self.cols + other.cols;
        let mut data = Vec::with_capacity(self.rows * cols);
        for i in 0..self.rows {
            data.extend_from_slice(self.row(i));
            data.extend_from_slice(other.row(i));
        }
        ModMatrix {
            p: self.p,
            rows: self.rows,
            cols,
            data,
        }
    }

    /// Basis (rows, in reduced echelon form) of the row space.
    pub fn row_space(&self) -> ModMatrix {
        let mut e = self.clone();
        let r = e.rref().len();
        e.data.truncate(r * e.cols);
        e.rows = r;
        e
    }

    /// Inverse of a square matrix, or `None` when singular.
    pub fn inverse(&self) -> Option<ModMatrix> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = self.hstack(&ModMatrix::identity(n, self.p));
        let piv = aug.rref();
        if piv.len() < n || piv[n - 1] != n - 1 {
            return None;
        }
        let mut inv = ModMatrix::zeros(n, n, self.p);
        for i in 0..n {
            inv.data[i * n..(i + 1) * n].copy_from_slice(&aug.row(i)[n..]);
        }
        Some(inv)
    }

    pub fn transpose(&self) -> ModMatrix {
        let mut t = ModMatrix::zeros(self.cols, self.rows, self.p);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        t
    }

    /// Reduced row echelon form in place; returns pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let p = self.p;
        let (rows, cols) = (self.rows, self.cols);
        let mut pivots = Vec::new();
        let mut r = 0;
        for j in 0..cols {
            if r == rows {
                break;
            }
            let Some(i) = (r..rows).find(|&i| self.data[i * cols + j] != 0) else {
                continue;
            };
            if i != r {
                for c in 0..cols {
                    self.data.swap(i * cols + c, r * cols + c);
                }
            }
            let inv = inv_mod(self.data[r * cols + j], p);
            for c in j..cols {
                self.data[r * cols + c] = mul_mod(self.data[r * cols + c], inv, p);
            }
            let pivot_row: Vec<u64> = self.data[r * cols..(r + 1) * cols].to_vec();
            for k in 0..rows {
                if k == r {
                    continue;
                }
                let f = self.data[k * cols + j];
                if f == 0 {
                    continue;
                }
                let row = &mut self.data[k * cols..(k + 1) * cols];
                for c in j..cols {
                    if pivot_row[c] != 0 {
                        row[c] = sub_mod(row[c], mul_mod(f, pivot_row[c], p), p);
                    }
                }
            }
            pivots.push(j);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    /// Basis (rows) of the left kernel {x : x·A = 0}.
    pub fn left_kernel(&self) -> ModMatrix {
        self.transpose().right_kernel()
    }

    /// Basis (rows) of the right kernel {x : A·xᵀ = 0}.
    pub fn right_kernel(&self) -> ModMatrix {
        let mut e = self.clone();
        let pivots = e.rref();
        let p = self.p;
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut k = ModMatrix::zeros(free.len(), self.cols, p);
        for (fi, &f) in free.iter().enumerate() {
            k.data[fi * self.cols + f] = 1;
            for (pi, &pc) in pivots.iter().enumerate() {
                let v = e.data[pi * self.cols + f];
                k.data[fi * self.cols + pc] = (p - v) % p;
            }
        }
        k
    }

    pub fn det(&self) -> u64 {
        assert_eq!(self.rows, self.cols);
        let p = self.p;
        let n = self.rows;
        let mut a = self.data.clone();
        let mut det = 1u64;
        for j in 0..n {
            let Some(i) = (j..n).find(|&i| a[i * n + j] != 0) else {
                return 0;
            };
            if i != j {
                for c in 0..n {
                    a.swap(i * n + c, j * n + c);
                }
                det = (p - det) % p;
            }
            let piv = a[j * n + j];
            det = mul_mod(det, piv, p);
            let inv = inv_mod(piv, p);
            for k in j + 1..n {
                let f = mul_mod(a[k * n + j], inv, p);
                if f == 0 {
                    continue;
                }
                for c in j..n {
                    let v = mul_mod(f, a[j * n + c], p);
                    a[k * n + c] = sub_mod(a[k * n + c], v, p);
                }
            }
        }
        det
    }

    /// Characteristic polynomial det(x·I − A), ascending coefficients, via
    /// reduction to upper Hessenberg form.
    pub fn charpoly(&self) -> Vec<u64> {
        assert_eq!(self.rows, self.cols);
        let p = self.p;
        let n = self.rows;
        let mut h = self.data.clone();
        // similarity transforms to Hessenberg form
        for m in 1..n.saturating_sub(1) {
            let Some(i) = (m..n).find(|&i| h[i * n + (m - 1)] != 0) else {
                continue;
            };
            if i != m {
                for c in 0..n {
                    h.swap(i * n + c, m * n + c);
                }
                for r in 0..n {
                    h.swap(r * n + i, r * n + m);
                }
            }
            let inv = inv_mod(h[m * n + (m - 1)], p);
            for i in m + 1..n {
                let u = mul_mod(h[i * n + (m - 1)], inv, p);
                if u == 0 {
                    continue;
                }
                for c in 0..n {
                    let v = mul_mod(u, h[m * n + c], p);
                    h[i * n + c] = sub_mod(h[i * n + c], v, p);
                }
                for r in 0..n {
                    let v = mul_mod(u, h[r * n + i], p);
                    h[r * n + m] = add_mod(h[r * n + m], v, p);
                }
            }
        }
        // recurrence on leading principal minors
        let mut polys: Vec<Vec<u64>> = Vec::with_capacity(n + 1);
        polys.push(vec![1 % p]);
        for k in 1..=n {
            let hkk = h[(k - 1) * n + (k - 1)];
            // (x - h_kk) * P_{k-1}
            let prev = &polys[k - 1];
            let mut next = vec![0u64; k + 1];
            for (d, &c) in prev.iter().enumerate() {
                next[d + 1] = add_mod(next[d + 1], c, p);
                next[d] = sub_mod(next[d], mul_mod(hkk, c, p), p);
            }
            let mut t = 1u64;
            for i in 1..k {
                t = mul_mod(t, h[(k - i) * n + (k - i - 1)], p);
                let coeff = mul_mod(t, h[(k - i - 1) * n + (k - 1)], p);
                if coeff == 0 {
                    continue;
                }
                for (d, &c) in polys[k - i - 1].iter().enumerate() {
                    next[d] = sub_mod(next[d], mul_mod(coeff, c, p), p);
                }
            }
            polys.push(next);
        }
        polys.pop().expect("n+1 polynomials")
    }
}

/// Incrementally maintained echelon basis of a subspace of 𝔽_p^n.
#[derive(Clone, Debug)]
pub struct ModEchelon {
    p: u64,
    cols: usize,
    rows: Vec<(usize, Vec<u64>)>,
}

impl ModEchelon {
    pub fn new(cols: usize, p: u64) -> Self {
        ModEchelon {
            p,
            cols,
            rows: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Residue of `v` after elimination against the current basis.
    pub fn reduce(&self, v: &[u64]) -> Vec<u64> {
        let p = self.p;
        let mut x = v.to_vec();
        for (c, b) in &self.rows {
            let f = x[*c];
            if f == 0 {
                continue;
            }
            for j in *c..self.cols {
                if b[j] != 0 {
                    x[j] = sub_mod(x[j], mul_mod(f, b[j], p), p);
                }
            }
        }
        x
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }

    /// Adds `v` to the span; returns whether the rank grew.
    pub fn insert(&mut self, v: &[u64]) -> bool {
        let mut x = self.reduce(v);
        let Some(lead) = x.iter().position(|&a| a != 0) else {
            return false;
        };
        let inv = inv_mod(x[lead], self.p);
        for a in x.iter_mut() {
            *a = mul_mod(*a, inv, self.p);
        }
        let pos = self.rows.partition_point(|(c, _)| *c < lead);
        self.rows.insert(pos, (lead, x));
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn charpoly_small() {
        let p = 1_000_003;
        // [[2,1],[1,2]] has charpoly x^2 - 4x + 3
        let m = ModMatrix::from_int(&IntMatrix::from_i64(2, 2, &[2, 1, 1, 2]), p);
        assert_eq!(m.charpoly(), vec![3, p - 4, 1]);
        let z = ModMatrix::from_int(&IntMatrix::zeros(3, 3), p);
        assert_eq!(z.charpoly(), vec![0, 0, 0, 1]);
    }

    #[test]
    fn kernel_and_rank() {
        let p = 101;
        let m = ModMatrix::from_int(&IntMatrix::from_i64(2, 3, &[1, 2, 3, 2, 4, 6]), p);
        assert_eq!(m.rank(), 1);
        let k = m.right_kernel();
        assert_eq!(k.rows, 2);
        for i in 0..k.rows {
            let v = m.mul(&ModMatrix {
                p,
                rows: 3,
                cols: 1,
                data: k.row(i).to_vec(),
            });
            assert!(v.data.iter().all(|&x| x == 0));
        }
    }

    #[test]
    fn inverse_and_echelon() {
        let p = 101;
        let m = ModMatrix::from_int(&IntMatrix::from_i64(2, 2, &[2, 1, 1, 1]), p);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), ModMatrix::identity(2, p));
        let s = ModMatrix::from_int(&IntMatrix::from_i64(2, 2, &[1, 2, 2, 4]), p);
        assert!(s.inverse().is_none());
        let mut e = ModEchelon::new(3, p);
        assert!(e.insert(&[1, 2, 3]));
        assert!(!e.insert(&[2, 4, 6]));
        assert!(e.insert(&[0, 0, 1]));
        assert!(e.contains(&[1, 2, 0]));
        assert_eq!(e.rank(), 2);
    }

    #[test]
    fn det_with_swap() {
        let p = 101;
        let m = ModMatrix::from_int(&IntMatrix::from_i64(2, 2, &[0, 1, 1, 0]), p);
        assert_eq!(m.det(), p - 1);
    }
}
