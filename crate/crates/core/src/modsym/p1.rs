//! The projective line P¹(ℤ/nℤ), indexing Manin symbols.

use crate::arith::gcd_u64;

/// A point `(c : d)` in canonical form: the lexicographically smallest
/// `(u·c mod n, u·d mod n)` over units `u`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct P1Point {
    pub c: u64,
    pub d: u64,
}

/// All points of P¹(ℤ/nℤ), sorted, with an O(1) lookup table.
#[derive(Clone, Debug)]
pub struct P1List {
    n: u64,
    points: Vec<P1Point>,
    // index of the normalized class of (c, d), u32::MAX when gcd(c, d, n) > 1
    table: Vec<u32>,
}

impl P1List {
    pub fn new(n: u64) -> Self {
        assert!(n >= 1);
        let nn = n as usize;
        let units: Vec<u64> = (0..n).filter(|&u| gcd_u64(u, n) == 1).collect();
        let mut table = vec![u32::MAX; nn * nn];
        let mut points = Vec::new();
        if n == 1 {
            table[0] = 0;
            points.push(P1Point { c: 0, d: 0 });
            return P1List { n, points, table };
        }
        for c in 0..n {
            let gc = gcd_u64(c, n);
            for d in 0..n {
                let slot = (c as usize) * nn + d as usize;
                if table[slot] != u32::MAX || gcd_u64(gc, d) != 1 {
                    continue;
                }
                // lexicographic scan meets each orbit first at its minimum
                let idx = points.len() as u32;
                points.push(P1Point { c, d });
                for &u in &units {
                    let (uc, ud) = ((u * c) % n, (u * d) % n);
                    table[(uc as usize) * nn + ud as usize] = idx;
                }
            }
        }
        P1List { n, points, table }
    }

    pub fn level(&self) -> u64 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[P1Point] {
        &self.points
    }

    pub fn point(&self, i: usize) -> P1Point {
        self.points[i]
    }

    /// Index of the class of `(c : d)` for arbitrary integers, or `None`
    /// when `gcd(c, d, n) > 1`.
    #[inline]
    pub fn index(&self, c: i64, d: i64) -> Option<usize> {
        let n = self.n as i64;
        let (c, d) = (c.rem_euclid(n) as usize, d.rem_euclid(n) as usize);
        let v = self.table[c * self.n as usize + d];
        (v != u32::MAX).then_some(v as usize)
    }

    #[inline]
    pub fn index_u(&self, c: u64, d: u64) -> Option<usize> {
        let v = self.table[((c % self.n) * self.n + d % self.n) as usize];
        (v != u32::MAX).then_some(v as usize)
    }

    pub fn normalize(&self, c: i64, d: i64) -> Option<P1Point> {
        self.index(c, d).map(|i| self.points[i])
    }
}

/// ψ(n) = n·∏_{p|n}(1 + 1/p), the number of points of P¹(ℤ/nℤ).
pub fn psi(n: u64) -> u64 {
    let mut r = n;
    for (p, _) in crate::arith::factor_u64(n) {
        r = r / p * (p + 1);
    }
    r
}
