//! Heilbronn matrices of determinant ℓ, acting on Manin symbols by
//! `(u : v)·[[a, b], [c, d]] = (ua + vc : ub + vd)`.

/// `[a, b, c, d]` for the matrix `[[a, b], [c, d]]`.
pub type Mat2 = [i64; 4];

/// Cremona's Heilbronn set for a prime `p`.
pub fn heilbronn_cremona(p: u64) -> Vec<Mat2> {
    let p = p as i64;
    if p == 2 {
        return vec![[1, 0, 0, 2], [2, 0, 0, 1], [2, 1, 0, 1], [1, 0, 1, 2]];
    }
    let mut out = vec![[1, 0, 0, p]];
    for r in -(p / 2)..=(p / 2) {
        let (mut x1, mut x2, mut y1, mut y2) = (p, -r, 0i64, 1i64);
        let (mut a, mut b) = (-p, r);
        out.push([x1, x2, y1, y2]);
        while b != 0 {
            let q = round_ratio(a, b);
            let c = a - b * q;
            a = -b;
            b = c;
            let x3 = q * x2 - x1;
            x1 = x2;
            x2 = x3;
            let y3 = q * y2 - y1;
            y1 = y2;
            y2 = y3;
            out.push([x1, x2, y1, y2]);
        }
    }
    out
}

/// Nearest integer to `a/b`, halves rounded away from zero.
fn round_ratio(a: i64, b: i64) -> i64 {
    let (a2, b2) = (2 * a as i128, b as i128);
    let q = if (a2 >= 0) == (b2 > 0) {
        (a2.abs() + b2.abs()) / (2 * b2.abs())
    } else {
        -((a2.abs() + b2.abs()) / (2 * b2.abs()))
    };
    q as i64
}

/// Merel's set: `ad − bc = ℓ`, `a > b ≥ 0`, `d > c ≥ 0`.
pub fn heilbronn_merel(l: u64) -> Vec<Mat2> {
    let l = l as i64;
    let mut out = Vec::new();
    for a in 1..=l {
        for d in 1..=l {
            if (a * d - l) < 0 {
                continue;
            }
            let bc = a * d - l;
            for b in 0..a {
                if b == 0 {
                    if bc == 0 {
                        for c in 0..d {
                            out.push([a, 0, c, d]);
                        }
                    }
                    continue;
                }
                if bc % b == 0 {
                    let c = bc / b;
                    if c < d {
                        out.push([a, b, c, d]);
                    }
                }
            }
        }
    }
    out
}
